//! Thin wrappers over `argmin` for scalar roots, line searches and simplex minimization.

use argmin::core::{CostFunction, Error, Executor, State};
use argmin::solver::brent::BrentRoot;
use argmin::solver::goldensectionsearch::GoldenSectionSearch;
use argmin::solver::neldermead::NelderMead;

struct Scalar<F>(F);

impl<F: Fn(f64) -> f64> CostFunction for Scalar<F> {
    type Param = f64;
    type Output = f64;
    fn cost(&self, p: &f64) -> Result<f64, Error> {
        Ok((self.0)(*p))
    }
}

struct Multi<F>(F);

impl<F: Fn(&[f64]) -> f64> CostFunction for Multi<F> {
    type Param = Vec<f64>;
    type Output = f64;
    fn cost(&self, p: &Vec<f64>) -> Result<f64, Error> {
        let v = (self.0)(p);
        Ok(if v.is_finite() { v } else { f64::MAX })
    }
}

/// Root of `f` in `[a, b]`; `f(a)` and `f(b)` must have opposite signs.
pub fn brent_root<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Option<f64> {
    let res = Executor::new(Scalar(f), BrentRoot::new(a, b, tol))
        .configure(|s| s.param((a + b) / 2.0).max_iters(200))
        .run()
        .ok()?;
    res.state().get_best_param().copied()
}

/// Roots of `f` on `[a, b]` located by sign changes on `steps` subintervals.
pub fn bracketed_roots<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    steps: usize,
    tol: f64,
) -> Vec<f64> {
    let xs: Vec<f64> = (0..=steps)
        .map(|i| a + (b - a) * i as f64 / steps as f64)
        .collect();
    let fs: Vec<f64> = xs.iter().map(|&x| f(x)).collect();
    let mut roots = Vec::new();
    for i in 0..steps {
        let (f0, f1) = (fs[i], fs[i + 1]);
        if !(f0.is_finite() && f1.is_finite()) {
            continue;
        }
        if f0 == 0.0 {
            roots.push(xs[i]);
        } else if f0 * f1 < 0.0 {
            if let Some(r) = brent_root(&f, xs[i], xs[i + 1], tol) {
                roots.push(r);
            }
        }
    }
    roots
}

/// Minimizer of a unimodal `f` on `[a, b]`.
pub fn golden_section<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: f64) -> Option<(f64, f64)> {
    let solver = GoldenSectionSearch::new(a, b)
        .ok()?
        .with_tolerance(tol)
        .ok()?;
    let res = Executor::new(Scalar(f), solver)
        .configure(|s| s.param((a + b) / 2.0).max_iters(500))
        .run()
        .ok()?;
    let st = res.state();
    Some((*st.get_best_param()?, st.get_best_cost()))
}

/// Nelder-Mead from `x0` with an axis-aligned initial simplex of size `step`.
pub fn nelder_mead<F: Fn(&[f64]) -> f64>(
    f: F,
    x0: &[f64],
    step: f64,
    tol: f64,
    max_iters: u64,
) -> (Vec<f64>, f64) {
    let mut simplex = vec![x0.to_vec()];
    for i in 0..x0.len() {
        let mut v = x0.to_vec();
        v[i] += step;
        simplex.push(v);
    }
    let fallback = (x0.to_vec(), f(x0));
    let solver = match NelderMead::new(simplex).with_sd_tolerance(tol) {
        Ok(s) => s,
        Err(_) => return fallback,
    };
    match Executor::new(Multi(f), solver)
        .configure(|s| s.max_iters(max_iters))
        .run()
    {
        Ok(res) => {
            let st = res.state();
            match st.get_best_param() {
                Some(p) => (p.clone(), st.get_best_cost()),
                None => fallback,
            }
        }
        Err(_) => fallback,
    }
}

/// Gauss-Newton refinement of `r(x) = 0` in the least-squares sense, forward-difference Jacobian.
pub fn gauss_newton<F: Fn(&[f64]) -> Vec<f64>>(r: F, x0: &[f64], iters: usize) -> Vec<f64> {
    let n = x0.len();
    let norm2 = |v: &[f64]| v.iter().map(|a| a * a).sum::<f64>();
    let mut x = x0.to_vec();
    let mut rx = r(&x);
    for _ in 0..iters {
        let m = rx.len();
        let mut jac = nalgebra::DMatrix::<f64>::zeros(m, n);
        for j in 0..n {
            let h = 1e-7 * (1.0 + x[j].abs());
            let mut xh = x.clone();
            xh[j] += h;
            let rh = r(&xh);
            for i in 0..m {
                jac[(i, j)] = (rh[i] - rx[i]) / h;
            }
        }
        let rv = nalgebra::DVector::from_vec(rx.clone());
        let Some(step) = jac.clone().svd(true, true).solve(&(-rv), 1e-14).ok() else {
            break;
        };
        let mut accepted = false;
        let mut scale = 1.0;
        for _ in 0..20 {
            let xn: Vec<f64> = x
                .iter()
                .zip(step.iter())
                .map(|(a, s)| a + scale * s)
                .collect();
            let rn = r(&xn);
            if norm2(&rn) < norm2(&rx) {
                x = xn;
                rx = rn;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wrappers_solve_simple_problems() {
        let r = brent_root(|x| x * x - 2.0, 0.0, 3.0, 1e-14).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-12);
        let roots = bracketed_roots(|x| x.sin(), 0.5, 10.0, 100, 1e-14);
        assert_eq!(roots.len(), 3);
        let (m, _) = golden_section(|x| (x - 1.3).powi(2), 0.0, 5.0, 1e-10).unwrap();
        assert!((m - 1.3).abs() < 1e-6);
        let (p, c) = nelder_mead(
            |v| (v[0] - 1.0).powi(2) + 10.0 * (v[1] + 2.0).powi(2),
            &[0.0, 0.0],
            0.5,
            1e-14,
            2000,
        );
        assert!(c < 1e-12 && (p[0] - 1.0).abs() < 1e-5);
        let x = gauss_newton(|v| vec![v[0] * v[0] - 4.0, v[1] - v[0]], &[1.0, 0.0], 30);
        assert!((x[0] - 2.0).abs() < 1e-10 && (x[1] - 2.0).abs() < 1e-10);
    }
}
