//! Gaussian CP maps in Choi form, and filters in the ladder-operator representation.
//!
//! A filter `F` on `k` modes is stored by its action on the ladder vector
//! `(a_1..a_k, a_1^dag..a_k^dag)`: `F v F^{-1} = S v + b`. Its Choi state is
//! `(F x I)|Phi>` with `|Phi> = sum_n |n>|n>`, ordered (output modes, input modes).

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::bargmann::moments_from_bargmann;
use crate::error::{NgError, Result};
use crate::linalg::*;
use crate::symplectic::{check_uncertainty, GaussianUnitary};

/// Damping parameter `t = coth(lambda)` of `exp(-lambda n)`; `Identity` is `t = inf`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Damping {
    Identity,
    Finite(f64),
}

impl Damping {
    pub fn from_lambda(lambda: f64) -> Self {
        if lambda == 0.0 {
            Damping::Identity
        } else {
            Damping::Finite(1.0 / lambda.tanh())
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            Damping::Identity => 0.0,
            Damping::Finite(t) => (1.0 / t).atanh(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianCPMap {
    pub in_modes: usize,
    pub out_modes: usize,
    /// Choi covariance over (outputs, inputs) of the non-passthrough modes.
    pub choi_cov: Mat,
    pub choi_mean: Vect,
    /// Input positions on which the map acts as the identity (excluded from the Choi state).
    pub passthrough: Vec<usize>,
    pub unphysical: bool,
}

impl GaussianCPMap {
    pub fn identity(k: usize) -> Self {
        Self {
            in_modes: k,
            out_modes: k,
            choi_cov: Mat::zeros(0, 0),
            choi_mean: Vect::zeros(0),
            passthrough: (0..k).collect(),
            unphysical: false,
        }
    }
}

/// Choi map of `exp(-lambda_m n_m)` per mode, given `t_m = coth(lambda_m)`.
pub fn damping_choi(t: &[Damping]) -> Result<GaussianCPMap> {
    let finite: Vec<f64> = t
        .iter()
        .filter_map(|d| match d {
            Damping::Finite(v) => Some(*v),
            Damping::Identity => None,
        })
        .collect();
    if let Some(bad) = finite.iter().find(|v| v.abs() <= 1.0 || !v.is_finite()) {
        return Err(NgError::Invalid(format!(
            "damping parameter |t| = {} <= 1",
            bad.abs()
        )));
    }
    let k = finite.len();
    let mut cov = Mat::zeros(4 * k, 4 * k);
    for (m, &tm) in finite.iter().enumerate() {
        // off-diagonal is 1/sinh(lambda), negative for lambda < 0
        let s = tm.signum() * (tm * tm - 1.0).sqrt();
        for q in 0..2 {
            let (o, i) = (2 * m + q, 2 * (k + m) + q);
            let sign = if q == 0 { 1.0 } else { -1.0 };
            cov[(o, o)] = tm;
            cov[(i, i)] = tm;
            cov[(o, i)] = sign * s;
            cov[(i, o)] = sign * s;
        }
    }
    Ok(GaussianCPMap {
        in_modes: t.len(),
        out_modes: t.len(),
        choi_cov: cov,
        choi_mean: Vect::zeros(4 * k),
        passthrough: t
            .iter()
            .enumerate()
            .filter(|(_, d)| matches!(d, Damping::Identity))
            .map(|(i, _)| i)
            .collect(),
        unphysical: finite.iter().any(|&v| v < 0.0),
    })
}

/// Projection of one mode onto the vacuum (1 input, 0 outputs).
pub fn vacuum_projection_choi() -> GaussianCPMap {
    GaussianCPMap {
        in_modes: 1,
        out_modes: 0,
        choi_cov: Mat::identity(2, 2),
        choi_mean: Vect::zeros(2),
        passthrough: vec![],
        unphysical: false,
    }
}

/// Probability of finding all `modes` in the vacuum.
pub fn vacuum_probability(cov: &Mat, mean: &Vect, modes: &[usize]) -> Result<f64> {
    let idx = quad_indices(modes);
    let a = submatrix(cov, &idx, &idx) + Mat::identity(idx.len(), idx.len());
    let al = subvector(mean, &idx);
    let q = (al.transpose() * inv(&a)? * &al)[(0, 0)];
    Ok(2f64.powi(modes.len() as i32) / a.determinant().sqrt() * (-0.5 * q).exp())
}

/// Applies `map` to `targets` of a state with moments `(cov, mean)`; returns unnormalized moments.
///
/// When the map has as many outputs as inputs the output modes take the places of the
/// targets; otherwise the outputs come first, followed by the untouched modes in order.
pub fn apply_map(
    cov: &Mat,
    mean: &Vect,
    map: &GaussianCPMap,
    targets: &[usize],
) -> Result<(Mat, Vect)> {
    let n = check_square_even(cov)?;
    if targets.len() != map.in_modes || targets.iter().any(|&t| t >= n) {
        return Err(NgError::Shape(
            "map input modes do not match targets".into(),
        ));
    }
    let active: Vec<usize> = targets
        .iter()
        .enumerate()
        .filter(|(i, _)| !map.passthrough.contains(i))
        .map(|(_, &t)| t)
        .collect();
    let k = active.len();
    let j = map.out_modes - map.passthrough.len();
    if k == 0 {
        return Ok((cov.clone(), mean.clone()));
    }
    let rest: Vec<usize> = (0..n).filter(|m| !active.contains(m)).collect();
    let (ai, ri) = (quad_indices(&active), quad_indices(&rest));
    let a = submatrix(cov, &ai, &ai);
    let b = submatrix(cov, &ri, &ai);
    let c = submatrix(cov, &ri, &ri);
    let (al, be) = (subvector(mean, &ai), subvector(mean, &ri));
    let jdx: Vec<usize> = (0..2 * j).collect();
    let kdx: Vec<usize> = (2 * j..2 * (j + k)).collect();
    let jm = submatrix(&map.choi_cov, &jdx, &jdx);
    let lm = submatrix(&map.choi_cov, &kdx, &jdx);
    let km = submatrix(&map.choi_cov, &kdx, &kdx);
    let eps = subvector(&map.choi_mean, &jdx);
    let del = subvector(&map.choi_mean, &kdx);
    let z = zmat(k);
    let pivot = &a + &z * &km * &z;
    if cond(&pivot) > 1e12 {
        return Err(NgError::Singular(
            "pivot block of the map application".into(),
        ));
    }
    let pi = inv(&pivot)?;
    let w = &al - &z * &del;
    let a2 = symmetrize(&(&jm - lm.transpose() * &z * &pi * &z * &lm));
    let b2 = &b * &pi * &z * &lm;
    let c2 = symmetrize(&(&c - &b * &pi * b.transpose()));
    let al2 = &eps + lm.transpose() * &z * &pi * &w;
    let be2 = &be - &b * &pi * &w;

    let nr = rest.len();
    let mut out = Mat::zeros(2 * (j + nr), 2 * (j + nr));
    out.view_mut((0, 0), (2 * j, 2 * j)).copy_from(&a2);
    out.view_mut((2 * j, 0), (2 * nr, 2 * j)).copy_from(&b2);
    out.view_mut((0, 2 * j), (2 * j, 2 * nr))
        .copy_from(&b2.transpose());
    out.view_mut((2 * j, 2 * j), (2 * nr, 2 * nr))
        .copy_from(&c2);
    let outm = concat(&al2, &be2);
    let (cov2, mean2) = if j == k {
        // put outputs back where the inputs were
        let mut pos = vec![0usize; n];
        for (i, &m) in active.iter().enumerate() {
            pos[m] = i;
        }
        for (i, &m) in rest.iter().enumerate() {
            pos[m] = k + i;
        }
        let idx = quad_indices(&pos);
        (submatrix(&out, &idx, &idx), subvector(&outm, &idx))
    } else {
        (out, outm)
    };
    if cov2.nrows() > 0 && !check_uncertainty(&cov2)? {
        return Err(NgError::Unphysical(
            "map output violates the uncertainty relation".into(),
        ));
    }
    Ok((cov2, mean2))
}

/// Ladder-operator representation `F v F^{-1} = S v + b`, `v = (a.., a^dag..)`.
#[derive(Clone, Debug, PartialEq)]
pub struct FilterRep {
    pub s: CMat,
    pub b: CVect,
}

fn c(x: f64) -> Complex64 {
    Complex64::new(x, 0.0)
}

/// `(a, a^dag) = L q` per mode in block order.
fn ladder_from_quad(k: usize) -> CMat {
    let mut m = CMat::zeros(2 * k, 2 * k);
    for i in 0..k {
        m[(i, i)] = c(0.5);
        m[(i, k + i)] = I * 0.5;
        m[(k + i, i)] = c(0.5);
        m[(k + i, k + i)] = -I * 0.5;
    }
    m
}

fn quad_from_ladder(k: usize) -> CMat {
    let mut m = CMat::zeros(2 * k, 2 * k);
    for i in 0..k {
        m[(i, i)] = c(1.0);
        m[(i, k + i)] = c(1.0);
        m[(k + i, i)] = -I;
        m[(k + i, k + i)] = I;
    }
    m
}

impl FilterRep {
    pub fn identity(k: usize) -> Self {
        Self {
            s: CMat::identity(2 * k, 2 * k),
            b: CVect::zeros(2 * k),
        }
    }

    pub fn modes(&self) -> usize {
        self.s.nrows() / 2
    }

    /// `exp(-mu_m n_m)` on each mode.
    pub fn damping(mu: &[f64]) -> Self {
        let k = mu.len();
        let d = CVect::from_fn(2 * k, |i, _| {
            if i < k {
                c(mu[i].exp())
            } else {
                c((-mu[i - k]).exp())
            }
        });
        Self {
            s: CMat::from_diagonal(&d),
            b: CVect::zeros(2 * k),
        }
    }

    /// Single-mode `R(theta) exp(-mu n)` with `z = exp(mu + i theta)`.
    pub fn frame(z: Complex64) -> Self {
        Self {
            s: CMat::from_diagonal(&CVect::from_vec(vec![z, z.inv()])),
            b: CVect::zeros(2),
        }
    }

    pub fn from_unitary(u: &GaussianUnitary) -> Result<Self> {
        let k = u.modes();
        let sq = complexify(&interleaved_to_block(&u.symplectic));
        let d = cvec(&vec_interleaved_to_block(&u.displacement));
        let si = cinv(&sq)?;
        let l = ladder_from_quad(k);
        Ok(Self {
            s: &l * &si * quad_from_ladder(k),
            b: -(&l * &si * d),
        })
    }

    /// Gaussian unitary with this action, if the representation is unitary.
    pub fn to_unitary(&self) -> Result<GaussianUnitary> {
        if self.unitarity_residual() > 1e-8 * (1.0 + cmax_abs(&self.s)) {
            return Err(NgError::Invalid("filter is not unitary".into()));
        }
        let k = self.modes();
        let sqi = quad_from_ladder(k) * &self.s * ladder_from_quad(k);
        let sq = cinv(&sqi)?;
        let d = -(&sq * quad_from_ladder(k) * &self.b);
        Ok(GaussianUnitary {
            symplectic: block_to_interleaved(&re(&sq)),
            displacement: vec_block_to_interleaved(&d.map(|z| z.re)),
        })
    }

    /// Single-mode `exp(c x)`.
    pub fn exp_x(cx: Complex64) -> Self {
        Self {
            s: CMat::identity(2, 2),
            b: CVect::from_vec(vec![-cx, cx]),
        }
    }

    /// Single-mode `exp(c p)`.
    pub fn exp_p(cp: Complex64) -> Self {
        Self {
            s: CMat::identity(2, 2),
            b: CVect::from_vec(vec![-I * cp, -I * cp]),
        }
    }

    /// Single-mode `exp(-s x^2 / 4)`.
    pub fn gauss_x(s: f64) -> Self {
        Self {
            s: CMat::from_row_slice(
                2,
                2,
                &[c(1.0 + s / 2.0), c(s / 2.0), c(-s / 2.0), c(1.0 - s / 2.0)],
            ),
            b: CVect::zeros(2),
        }
    }

    /// Single-mode `exp(delta a)`.
    pub fn exp_a(delta: Complex64) -> Self {
        Self {
            s: CMat::identity(2, 2),
            b: CVect::from_vec(vec![c(0.0), delta]),
        }
    }

    /// Single-mode `exp(s a^2 / 2)`.
    pub fn exp_a2(s: Complex64) -> Self {
        Self {
            s: CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), s, c(1.0)]),
            b: CVect::zeros(2),
        }
    }

    /// Operator product `self * other` (`other` acts first).
    pub fn mul(&self, other: &Self) -> Self {
        Self {
            s: &other.s * &self.s,
            b: &other.s * &self.b + &other.b,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let si = cinv(&self.s)?;
        let b = -(&si * &self.b);
        Ok(Self { s: si, b })
    }

    fn swap(k: usize) -> CMat {
        let mut p = CMat::zeros(2 * k, 2 * k);
        for i in 0..k {
            p[(i, k + i)] = c(1.0);
            p[(k + i, i)] = c(1.0);
        }
        p
    }

    /// Transpose in the Fock basis.
    pub fn transpose(&self) -> Result<Self> {
        let p = Self::swap(self.modes());
        let m = cinv(&(&p * &self.s * &p))?;
        let b = -(&m * &p * &self.b);
        Ok(Self { s: m, b })
    }

    /// Distance from the unitary set (`F^dag = F^{-1}` in this representation).
    pub fn unitarity_residual(&self) -> f64 {
        let p = Self::swap(self.modes());
        let r1 = &p * self.s.map(|z| z.conj()) * &p - &self.s;
        let r2 = &p * self.b.map(|z| z.conj()) - &self.b;
        cmax_abs(&r1).max(r2.iter().fold(0.0, |a, z| a.max(z.norm())))
    }

    /// Bargmann data `(A, b)` of the Choi state over (output, input) variables.
    pub fn choi_bargmann(&self) -> Result<(CMat, CVect)> {
        let k = self.modes();
        let saa = self.s.view((0, 0), (k, k));
        let sab = self.s.view((0, k), (k, k));
        let sba = self.s.view((k, 0), (k, k));
        let sbb = self.s.view((k, k), (k, k));
        let id = CMat::identity(k, k);
        let mut p = CMat::zeros(2 * k, 2 * k);
        let mut q = CMat::zeros(2 * k, 2 * k);
        p.view_mut((0, 0), (k, k)).copy_from(&saa);
        p.view_mut((k, 0), (k, k)).copy_from(&(-sba));
        p.view_mut((k, k), (k, k)).copy_from(&id);
        q.view_mut((0, 0), (k, k)).copy_from(&sab);
        q.view_mut((0, k), (k, k)).copy_from(&(-&id));
        q.view_mut((k, 0), (k, k)).copy_from(&(-sbb));
        let r = concat_c(
            &self.b.rows(0, k).into_owned(),
            &(-self.b.rows(k, k).into_owned()),
        );
        let pi =
            cinv(&p).map_err(|_| NgError::Invalid("filter has no Choi representation".into()))?;
        Ok((csymmetrize(&(-(&pi * q))), -(&pi * r)))
    }
}

fn concat_c(a: &CVect, b: &CVect) -> CVect {
    CVect::from_iterator(a.len() + b.len(), a.iter().chain(b.iter()).cloned())
}

/// Choi map of a filter. Unitary filters other than the identity have no
/// normalizable Choi state and yield `Singular`; use [`apply_filter`] for those.
pub fn filter_to_choi(f: &FilterRep) -> Result<GaussianCPMap> {
    let k = f.modes();
    if cmax_abs(&(&f.s - CMat::identity(2 * k, 2 * k))) < 1e-14
        && f.b.iter().all(|z| z.norm() < 1e-14)
    {
        return Ok(GaussianCPMap::identity(k));
    }
    let (a, b) = f.choi_bargmann()?;
    // Bargmann variables are (out_1..out_k, in_1..in_k): mode order matches the Choi layout.
    let (cov, mean) = moments_from_bargmann(&a, &b)?;
    let unphysical = !check_uncertainty(&cov)?;
    Ok(GaussianCPMap {
        in_modes: k,
        out_modes: k,
        choi_cov: cov,
        choi_mean: mean,
        passthrough: vec![],
        unphysical,
    })
}

/// Applies a filter to `targets`, using the symplectic action when it is unitary.
pub fn apply_filter(
    cov: &Mat,
    mean: &Vect,
    f: &FilterRep,
    targets: &[usize],
) -> Result<(Mat, Vect)> {
    if f.unitarity_residual() < 1e-10 * (1.0 + cmax_abs(&f.s)) {
        let u = f.to_unitary()?.embed(cov.nrows() / 2, targets)?;
        return Ok((
            symmetrize(&(&u.symplectic * cov * u.symplectic.transpose())),
            &u.symplectic * mean + &u.displacement,
        ));
    }
    apply_map(cov, mean, &filter_to_choi(f)?, targets)
}

/// Operator product `f1 * f2`: `f2` acts first.
pub fn compose_filters(f1: &FilterRep, f2: &FilterRep) -> FilterRep {
    f1.mul(f2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::GaussianPure;

    #[test]
    fn damping_on_thermal_block() {
        let g = GaussianPure::tmss(3.0).unwrap();
        let m = damping_choi(&[Damping::Finite(2.0)]).unwrap();
        let (c2, _) = apply_map(&g.cov, &g.mean, &m, &[1]).unwrap();
        let cb = submatrix(&c2, &[2, 3], &[2, 3]);
        assert!(max_abs(&(cb - Mat::identity(2, 2) * 1.4)) < 1e-12);
    }

    #[test]
    fn identity_map_is_identity() {
        let g = crate::symplectic::random_generator(1, 2, 1.0, 0.5, 2);
        let (c2, m2) = apply_map(&g.cov, &g.mean, &GaussianCPMap::identity(2), &[1, 2]).unwrap();
        assert_eq!(c2, g.cov);
        assert_eq!(m2, g.mean);
        let f = filter_to_choi(&FilterRep::identity(1)).unwrap();
        let (c3, m3) = apply_map(&g.cov, &g.mean, &f, &[2]).unwrap();
        assert!(max_abs(&(c3 - &g.cov)) < 1e-12);
        assert!((m3 - &g.mean).amax() < 1e-12);
    }

    #[test]
    fn vacuum_projection_of_tmss_arm() {
        let g = GaussianPure::tmss(3.0).unwrap();
        let (c2, m2) = apply_map(&g.cov, &g.mean, &vacuum_projection_choi(), &[0]).unwrap();
        assert!(max_abs(&(c2 - Mat::identity(2, 2))) < 1e-12);
        assert!(m2.amax() < 1e-15);
    }

    #[test]
    fn vacuum_overlap_of_coherent_state() {
        let p = vacuum_probability(&Mat::identity(2, 2), &Vect::from_vec(vec![2.0, 0.0]), &[0])
            .unwrap();
        assert!((p - (-1.0f64).exp()).abs() < 1e-14);
        let p = vacuum_probability(&Mat::identity(2, 2), &Vect::zeros(2), &[0]).unwrap();
        assert!((p - 1.0).abs() < 1e-14);
    }

    #[test]
    fn damping_filter_choi_matches_closed_form() {
        let lam = 1.0;
        let f = filter_to_choi(&FilterRep::damping(&[lam])).unwrap();
        let d = damping_choi(&[Damping::from_lambda(lam)]).unwrap();
        assert!(max_abs(&(&f.choi_cov - &d.choi_cov)) < 1e-10);
        assert!((1.0 / lam.tanh() - 1.3130352854993312).abs() < 1e-15);
        let f = filter_to_choi(&FilterRep::damping(&[-0.7])).unwrap();
        let d = damping_choi(&[Damping::from_lambda(-0.7)]).unwrap();
        assert!(max_abs(&(&f.choi_cov - &d.choi_cov)) < 1e-10);
        assert!(d.unphysical);
    }

    #[test]
    fn rejects_small_damping() {
        assert!(damping_choi(&[Damping::Finite(0.5)]).is_err());
    }

    #[test]
    fn unitary_filter_round_trip() {
        let u = GaussianUnitary::squeezer(0.3)
            .then(&GaussianUnitary::rotation(0.4))
            .then(&GaussianUnitary::displacement(&Vect::from_vec(vec![
                0.2, -0.5,
            ])));
        let f = FilterRep::from_unitary(&u).unwrap();
        assert!(f.unitarity_residual() < 1e-12);
        let back = f.to_unitary().unwrap();
        assert!(max_abs(&(back.symplectic - &u.symplectic)) < 1e-12);
        assert!((back.displacement - &u.displacement).amax() < 1e-12);
    }

    #[test]
    fn composite_filter_choi_matches_sequential_application() {
        let u = GaussianUnitary::squeezer(0.3).then(&GaussianUnitary::displacement(
            &Vect::from_vec(vec![0.2, -0.5]),
        ));
        let fu = FilterRep::from_unitary(&u).unwrap();
        assert!(filter_to_choi(&fu).is_err());
        let g = GaussianPure::tmss(2.0).unwrap();
        // damping first, then the unitary
        let f = compose_filters(&fu, &FilterRep::damping(&[0.4]));
        let (c2, m2) = apply_map(&g.cov, &g.mean, &filter_to_choi(&f).unwrap(), &[1]).unwrap();
        let d = damping_choi(&[Damping::from_lambda(0.4)]).unwrap();
        let (c1, m1) = apply_map(&g.cov, &g.mean, &d, &[1]).unwrap();
        let (c3, m3) = apply_filter(&c1, &m1, &fu, &[1]).unwrap();
        assert!(max_abs(&(c2 - c3)) < 1e-9);
        assert!((m2 - m3).amax() < 1e-9);
    }
}
