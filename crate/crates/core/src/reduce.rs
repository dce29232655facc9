//! Photon-number reduction of a single control mode.
//!
//! The wave form of the heralded state is approximately invariant under
//! `phi_n(x) -> phi_n'(k x - d)` near its envelope centre. A plan fixes `(k, d)`
//! by matching local momenta of the two Fock wavefunctions; the filter then
//! rewrites the control moments so that detecting `n'` photons heralds the
//! corrected state.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::control::{control_params_single, ControlMoments};
use crate::error::{NgError, Result};
use crate::fock::hermite_functions;
use crate::linalg::*;
use crate::maps::{apply_filter, filter_to_choi, FilterRep, GaussianCPMap};
use crate::solve::{bracketed_roots, brent_root, gauss_newton, nelder_mead};
use crate::symplectic::{check_uncertainty, GaussianPure, GaussianUnitary};

const TINY: f64 = 1e-12;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    Identity,
    AnalyticParity,
    Method1,
    Method2,
    Method2AtTurning,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReductionPlan {
    pub n: usize,
    pub n_prime: usize,
    pub k: f64,
    pub d: f64,
    pub s0: f64,
    pub delta0: Complex64,
    pub s0_prime: f64,
    pub delta0_prime: Complex64,
    /// Envelope centre of the wave form.
    pub x0: f64,
    pub correction: GaussianUnitary,
    pub method: Method,
}

impl ReductionPlan {
    pub fn is_identity(&self) -> bool {
        self.method == Method::Identity
    }
}

pub fn fock_wavefunction(n: usize, x: f64) -> f64 {
    hermite_functions(n + 1, x)[n]
}

fn wavefunction_and_slope(n: usize, x: f64) -> (f64, f64) {
    let h = hermite_functions(n + 1, x);
    let lower = if n > 0 {
        (n as f64).sqrt() * h[n - 1]
    } else {
        0.0
    };
    (h[n], lower - 0.5 * x * h[n])
}

/// `sqrt(4n + 2 - x^2)`, zero outside the classically allowed region.
pub fn local_momentum(n: usize, x: f64) -> f64 {
    (4.0 * n as f64 + 2.0 - x * x).max(0.0).sqrt()
}

pub fn turning_point(n: usize) -> f64 {
    (4.0 * n as f64 + 2.0).sqrt()
}

/// Largest zero of `phi_n`; `None` for `n = 0`.
pub fn largest_root(n: usize) -> Option<f64> {
    if n == 0 {
        return None;
    }
    let xt = turning_point(n);
    let h = (0.5 / xt).min(0.05);
    let mut hi = xt;
    let mut fhi = fock_wavefunction(n, hi);
    loop {
        let lo = hi - h;
        let flo = fock_wavefunction(n, lo);
        if flo == 0.0 {
            return Some(lo.max(0.0));
        }
        if flo * fhi < 0.0 {
            return brent_root(|x| fock_wavefunction(n, x), lo, hi, 1e-15);
        }
        if lo < -h {
            return Some(0.0);
        }
        hi = lo;
        fhi = flo;
    }
}

/// Closed-form scale for centred matching with equal parity.
pub fn match_parity(n: usize, n_prime: usize) -> Result<(f64, f64)> {
    if n % 2 != n_prime % 2 {
        return Err(NgError::Invalid(format!(
            "parity mismatch between {n} and {n_prime}"
        )));
    }
    Ok((((2 * n + 1) as f64 / (2 * n_prime + 1) as f64).sqrt(), 0.0))
}

/// Matches the local momentum and its slope at `x0`; the scale solves a cubic in `k^2`.
pub fn method2(n: usize, n_prime: usize, x0: f64) -> Result<(f64, f64)> {
    if n_prime > n {
        return Err(NgError::Invalid("n' must not exceed n".into()));
    }
    let a = 4.0 * n_prime as f64 + 2.0;
    let b = 4.0 * n as f64 + 2.0 - x0 * x0;
    let x2 = x0 * x0;
    if x2 < TINY {
        if b <= 0.0 {
            return Err(NgError::Infeasible("no positive scale".into()));
        }
        return Ok(((b / a).sqrt(), 0.0));
    }
    let f = |kk: f64| a * kk * kk * kk - b * kk * kk - x2;
    let mut hi = 1.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(NgError::Infeasible("cubic has no positive root".into()));
        }
    }
    let kk =
        brent_root(f, 0.0, hi, 1e-15).ok_or_else(|| NgError::NoConvergence("cubic root".into()))?;
    let k = kk.sqrt();
    Ok((k, k * x0 - x0 / (k * k * k)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Method1Result {
    pub candidates: Vec<(f64, f64)>,
    pub best: (f64, f64),
}

/// WKB phase of `phi_n` at `x`, defined modulo pi.
fn wkb_phase(n: usize, x: f64) -> f64 {
    let (v, s) = wavefunction_and_slope(n, x);
    (v * local_momentum(n, x) / 2.0).atan2(s)
}

/// Matches local momentum and the log-derivative of the wavefunctions at `x0`.
///
/// Candidates are all phase-matched solutions with `k` in `[0.3, 3]` times
/// the centred parity scale.
pub fn method1(n: usize, n_prime: usize, x0: f64) -> Result<Method1Result> {
    if n_prime > n {
        return Err(NgError::Invalid("n' must not exceed n".into()));
    }
    let p0 = local_momentum(n, x0);
    if p0 <= TINY {
        return Err(NgError::Infeasible(
            "centre outside the oscillatory region".into(),
        ));
    }
    let a = 4.0 * n_prime as f64 + 2.0;
    let umax = a.sqrt();
    let theta = wkb_phase(n, x0);
    let k_par = ((2 * n + 1) as f64 / (2 * n_prime + 1) as f64).sqrt();
    // the scale follows from momentum matching once the image point u0 is fixed
    let scale = |u: f64| p0 / (a - u * u).max(TINY).sqrt();
    let res = |u: f64| (theta - wkb_phase(n_prime, u)).sin();
    let span = umax * (1.0 - 1e-9);
    let mut cands: Vec<(f64, f64)> = Vec::new();
    for u in bracketed_roots(res, -span, span, 400 + 40 * n, 1e-15) {
        let k = scale(u);
        if k < 0.3 * k_par || k > 3.0 * k_par {
            continue;
        }
        let d = k * x0 - u;
        if !cands
            .iter()
            .any(|(kc, dc)| (kc - k).abs() < 1e-6 && (dc - d).abs() < 1e-6)
        {
            cands.push((k, d));
        }
    }
    if cands.is_empty() {
        return Err(NgError::Infeasible("no phase-matched scale".into()));
    }
    // slope mismatch of the local momenta
    let slope = |k: f64, d: f64| {
        let u = k * x0 - d;
        let pt = local_momentum(n_prime, u).max(TINY);
        (-x0 / p0 + k * k * u / pt).abs()
    };
    let best = *cands
        .iter()
        .min_by(|x, y| slope(x.0, x.1).total_cmp(&slope(y.0, y.1)))
        .unwrap();
    Ok(Method1Result {
        candidates: cands,
        best,
    })
}

/// `s0' = s0 / k^2` and the reduced `delta0'` for the map `x -> k x - d` of the wave form.
pub fn reduced_parameters(s0: f64, delta0: Complex64, k: f64, d: f64) -> (f64, Complex64) {
    let w = delta0.conj();
    let k2 = k * k;
    let wx = ((s0 + k2) / (s0 + 1.0)).sqrt() * w.re;
    let wp = ((s0 + 1.0) / (s0 + k2)).sqrt() * w.im - s0 * d / (k * (s0 + k2).sqrt());
    (s0 / k2, Complex64::new(wx, -wp))
}

/// Unitary acting as `psi(x) -> sqrt(k) psi(k x - d)`.
pub fn correction_unitary(k: f64, d: f64) -> GaussianUnitary {
    GaussianUnitary {
        symplectic: Mat::from_row_slice(2, 2, &[1.0 / k, 0.0, 0.0, k]),
        displacement: Vect::from_vec(vec![d / k, 0.0]),
    }
}

/// Envelope centre of the wave form with parameters `(s0, delta0)`.
pub fn wave_centre(s0: f64, delta0: Complex64, n: usize) -> f64 {
    let wp = -delta0.im;
    if s0 > TINY {
        (s0 + 1.0).sqrt() * wp / s0
    } else if wp.abs() > TINY {
        wp.signum() * turning_point(n)
    } else {
        0.0
    }
}

pub fn plan_reduction(
    s0: f64,
    delta0: Complex64,
    n: usize,
    n_prime: usize,
) -> Result<ReductionPlan> {
    if n_prime > n {
        return Err(NgError::Invalid(format!("target {n_prime} exceeds {n}")));
    }
    if !(s0 >= 0.0) {
        return Err(NgError::Undefined);
    }
    let x0 = wave_centre(s0, delta0, n);
    let (k, d, method) = if n_prime == n {
        (1.0, 0.0, Method::Identity)
    } else if s0 <= TINY && x0 != 0.0 {
        let (k, d) = method2(n, n_prime, x0)?;
        (k, d, Method::Method2AtTurning)
    } else if x0.abs() < TINY && n % 2 == n_prime % 2 {
        let (k, d) = match_parity(n, n_prime)?;
        (k, d, Method::AnalyticParity)
    } else {
        let xz = largest_root(n).unwrap_or(0.0);
        let xt = turning_point(n);
        if x0.abs() < xz {
            match method1(n, n_prime, x0) {
                Ok(r) => (r.best.0, r.best.1, Method::Method1),
                Err(_) => {
                    let (k, d) = method2(n, n_prime, x0)?;
                    (k, d, Method::Method2)
                }
            }
        } else if x0.abs() < xt {
            let sgn = if x0 < 0.0 { -1.0 } else { 1.0 };
            let (k, d) = method2(n, n_prime, sgn * xt)?;
            (k, d, Method::Method2AtTurning)
        } else {
            let (k, d) = method2(n, n_prime, x0)?;
            (k, d, Method::Method2)
        }
    };
    let (s0p, dp) = reduced_parameters(s0, delta0, k, d);
    Ok(ReductionPlan {
        n,
        n_prime,
        k,
        d,
        s0,
        delta0,
        s0_prime: s0p,
        delta0_prime: dp,
        x0,
        correction: correction_unitary(k, d),
        method,
    })
}

fn cr(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// Wave-form filter `exp(-b p) exp(sqrt(s0+1) w_p x / 2) exp(-s0 x^2 / 4)` with `w = conj(delta0)`.
pub fn wave_filter(s0: f64, delta0: Complex64) -> FilterRep {
    let w = delta0.conj();
    let r = (s0 + 1.0).sqrt();
    FilterRep::exp_p(cr(-w.re / (2.0 * r)))
        .mul(&FilterRep::exp_x(cr(r / 2.0 * w.im)).mul(&FilterRep::gauss_x(s0)))
}

/// Filter relating the single-mode canonical purification of `(C_m, beta_m)` to its Fock-diagonal core.
fn core_filter(cm: &Mat, bm: &Vect) -> Result<FilterRep> {
    let nu = cm.determinant().max(0.0).sqrt();
    if nu <= 1.0 + 1e-9 {
        return Err(NgError::Undefined);
    }
    let s = sqrtm_psd(&(cm / nu));
    let q = ((nu - 1.0) / (nu + 1.0)).sqrt();
    let uc = FilterRep::from_unitary(&GaussianUnitary {
        symplectic: s,
        displacement: bm.clone(),
    })?;
    Ok(FilterRep::damping(&[-q.ln()]).mul(&uc.transpose()?))
}

fn unitarity_vector(f: &FilterRep) -> Vec<f64> {
    let p = CMat::from_row_slice(2, 2, &[cr(0.0), cr(1.0), cr(1.0), cr(0.0)]);
    let r1 = &p * f.s.map(|z| z.conj()) * &p - &f.s;
    let r2 = &p * f.b.map(|z| z.conj()) - &f.b;
    r1.iter()
        .chain(r2.iter())
        .flat_map(|z| [z.re, z.im])
        .collect()
}

/// Fock-diagonal frame `z = exp(mu + i theta)` making `K_G D(z)^-1 K_w^-1` unitary; also returns the residual.
pub fn solve_frame(cm: &Mat, bm: &Vect, s0: f64, delta0: Complex64) -> Result<(Complex64, f64)> {
    let kg = core_filter(cm, bm)?;
    let kwi = wave_filter(s0, delta0).inverse()?;
    let resid = |p: &[f64]| -> Vec<f64> {
        let z = Complex64::from_polar(p[0].exp(), p[1]);
        match FilterRep::frame(z).inverse() {
            Ok(di) => unitarity_vector(&kg.mul(&di.mul(&kwi))),
            Err(_) => vec![f64::MAX; 12],
        }
    };
    let cost = |p: &[f64]| resid(p).iter().map(|v| v * v).sum::<f64>();
    let mut best = (vec![0.0, 0.0], f64::INFINITY);
    'outer: for m in [-1.0, 0.0, 1.0] {
        for i in 0..13 {
            let th = -3.0 + 0.5 * i as f64;
            let (p, c) = nelder_mead(cost, &[m, th], 0.3, 1e-16, 2000);
            if c < best.1 {
                best = (p, c);
            }
            if best.1 < 1e-20 {
                break 'outer;
            }
        }
    }
    let p = gauss_newton(resid, &best.0, 30);
    let c = cost(&p).sqrt();
    if !(c < 1e-7) {
        return Err(NgError::NoConvergence(format!("frame residual {c:.2e}")));
    }
    Ok((Complex64::from_polar(p[0].exp(), p[1]), c))
}

#[derive(Clone, Debug)]
pub struct ReductionFilter {
    pub filter: FilterRep,
    pub map: GaussianCPMap,
    pub frame: Complex64,
    pub frame_residual: f64,
    pub mu_prime: f64,
}

fn assemble(z: Complex64, zp: Complex64, plan: &ReductionPlan) -> Result<FilterRep> {
    let x = FilterRep::frame(z)
        .inverse()?
        .mul(&wave_filter(plan.s0, plan.delta0).inverse()?)
        .mul(&FilterRep::from_unitary(&plan.correction)?)
        .mul(&wave_filter(plan.s0_prime, plan.delta0_prime))
        .mul(&FilterRep::frame(zp));
    x.transpose()
}

/// Filter on control mode `m` realizing `plan`; the output keeps the mode's symplectic eigenvalue.
pub fn build_filter(
    moments: &ControlMoments,
    m: usize,
    plan: &ReductionPlan,
) -> Result<ReductionFilter> {
    if m >= moments.modes() {
        return Err(NgError::Shape(format!("mode {m} out of range")));
    }
    if plan.is_identity() {
        let f = FilterRep::identity(1);
        return Ok(ReductionFilter {
            map: filter_to_choi(&f)?,
            filter: f,
            frame: cr(1.0),
            frame_residual: 0.0,
            mu_prime: 0.0,
        });
    }
    let (cm, bm) = moments.block(m);
    let nu = cm.determinant().sqrt();
    let (z, res) = solve_frame(&cm, &bm, plan.s0, plan.delta0)?;
    let theta = z.arg();
    let build = |mu: f64| assemble(z, Complex64::from_polar(mu.exp(), theta), plan);
    let outcome = |mu: f64| -> Option<(Mat, Vect)> {
        let f = build(mu).ok()?;
        apply_filter(&moments.c, &moments.beta, &f, &[m]).ok()
    };
    let gap = |mu: f64| match outcome(mu) {
        Some((c, _)) => {
            let blk = c.view((2 * m, 2 * m), (2, 2)).determinant();
            if blk > 0.0 {
                blk.sqrt() - nu
            } else {
                f64::NAN
            }
        }
        None => f64::NAN,
    };
    let roots = bracketed_roots(gap, -3.0, 3.0, 120, 1e-14);
    let mu_prime = roots
        .into_iter()
        .find(|&mu| {
            gap(mu).abs() < 1e-6 * nu
                && outcome(mu).is_some_and(|(c, _)| check_uncertainty(&c).unwrap_or(false))
        })
        .ok_or_else(|| {
            NgError::Infeasible(format!("no physical filter normalization for mode {m}"))
        })?;
    let f = build(mu_prime)?;
    Ok(ReductionFilter {
        map: filter_to_choi(&f)?,
        filter: f,
        frame: z,
        frame_residual: res,
        mu_prime,
    })
}

pub fn apply_reduction(
    moments: &ControlMoments,
    m: usize,
    plan: &ReductionPlan,
) -> Result<ControlMoments> {
    let rf = build_filter(moments, m, plan)?;
    let (c, b) = apply_filter(&moments.c, &moments.beta, &rf.filter, &[m])?;
    ControlMoments::new(c, b)
}

/// Applies the reduction of control mode `m` to a full generator state with `l` signal modes.
pub fn apply_reduction_state(
    g: &GaussianPure,
    l: usize,
    m: usize,
    plan: &ReductionPlan,
) -> Result<GaussianPure> {
    let moments = ControlMoments::from_state(g, l);
    let rf = build_filter(&moments, m, plan)?;
    let (c, b) = apply_filter(&g.cov, &g.mean, &rf.filter, &[l + m])?;
    GaussianPure::new(symmetrize(&c), b)
}

/// Plans the reduction of mode `m` from its raw diagonal block.
pub fn plan_for_mode(
    moments: &ControlMoments,
    m: usize,
    n: usize,
    n_prime: usize,
) -> Result<ReductionPlan> {
    let (cm, bm) = moments.block(m);
    let (s0, d0) = control_params_single(&cm, &bm)?;
    plan_reduction(s0, d0, n, n_prime)
}
