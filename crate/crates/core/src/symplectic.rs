//! Pure Gaussian states, Gaussian unitaries and symplectic decompositions.
//!
//! Units: hbar = 2, so the vacuum covariance is the identity. Quadratures are
//! interleaved `(x1, p1, x2, p2, ...)`.

use nalgebra::ComplexField;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{NgError, Result};
use crate::linalg::*;

const SYM_TOL: f64 = 1e-10;

/// Pure (or at least valid) Gaussian state given by its first two moments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianPure {
    pub cov: Mat,
    pub mean: Vect,
}

impl GaussianPure {
    /// Validates symmetry, dimensions and the uncertainty relation.
    pub fn new(cov: Mat, mean: Vect) -> Result<Self> {
        let n = check_square_even(&cov)?;
        if mean.len() != 2 * n {
            return Err(NgError::Shape(format!(
                "mean has length {}, expected {}",
                mean.len(),
                2 * n
            )));
        }
        if max_abs(&(&cov - cov.transpose())) > SYM_TOL * (1.0 + max_abs(&cov)) {
            return Err(NgError::Invalid("covariance is not symmetric".into()));
        }
        let cov = symmetrize(&cov);
        if !check_uncertainty(&cov)? {
            return Err(NgError::Unphysical("cov + i Omega is not PSD".into()));
        }
        Ok(Self { cov, mean })
    }

    pub fn vacuum(n: usize) -> Self {
        Self {
            cov: Mat::identity(2 * n, 2 * n),
            mean: Vect::zeros(2 * n),
        }
    }

    /// Two-mode squeezed vacuum whose reduced states have symplectic eigenvalue `a`.
    pub fn tmss(a: f64) -> Result<Self> {
        if a < 1.0 {
            return Err(NgError::Invalid(format!("TMSS parameter {a} < 1")));
        }
        let c = (a * a - 1.0).sqrt();
        let mut cov = Mat::identity(4, 4) * a;
        cov[(0, 2)] = c;
        cov[(2, 0)] = c;
        cov[(1, 3)] = -c;
        cov[(3, 1)] = -c;
        Ok(Self {
            cov,
            mean: Vect::zeros(4),
        })
    }

    /// Two-mode squeezed vacuum `sqrt(1-q^2) sum_j q^j |j>|j>`.
    pub fn tmss_from_schmidt(q: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&q) {
            return Err(NgError::Invalid(format!("Schmidt ratio {q} outside [0,1)")));
        }
        Self::tmss((1.0 + q * q) / (1.0 - q * q))
    }

    pub fn modes(&self) -> usize {
        self.cov.nrows() / 2
    }

    /// Purity test `(Sigma Omega)^2 = -I`.
    pub fn purity_defect(&self) -> f64 {
        let n = self.modes();
        let so = &self.cov * omega(n);
        max_abs(&(&so * &so + Mat::identity(2 * n, 2 * n)))
    }

    pub fn is_pure(&self, tol: f64) -> bool {
        self.purity_defect() < tol
    }

    /// Moments of the listed modes.
    pub fn reduced(&self, modes: &[usize]) -> (Mat, Vect) {
        let idx = quad_indices(modes);
        (
            submatrix(&self.cov, &idx, &idx),
            subvector(&self.mean, &idx),
        )
    }

    /// Reorders modes so that new mode `i` is old mode `order[i]`.
    pub fn permuted(&self, order: &[usize]) -> Self {
        let idx = quad_indices(order);
        Self {
            cov: submatrix(&self.cov, &idx, &idx),
            mean: subvector(&self.mean, &idx),
        }
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            cov: direct_sum(&self.cov, &other.cov),
            mean: concat(&self.mean, &other.mean),
        }
    }

    /// Applies `u` to the listed modes.
    /// Conditions on the x quadratures of `modes` taking `values`; the measured modes are removed.
    pub fn condition_x(&self, modes: &[usize], values: &[f64]) -> Result<Self> {
        let n = self.modes();
        if modes.len() != values.len() || modes.iter().any(|&m| m >= n) {
            return Err(NgError::Shape("measured modes/values mismatch".into()));
        }
        let keep: Vec<usize> = (0..n).filter(|m| !modes.contains(m)).collect();
        let ka = quad_indices(&keep);
        let xb: Vec<usize> = modes.iter().map(|m| 2 * m).collect();
        let saa = submatrix(&self.cov, &ka, &ka);
        let sab = submatrix(&self.cov, &ka, &xb);
        let sbb = inv(&submatrix(&self.cov, &xb, &xb))?;
        let resid = Vect::from_iterator(
            xb.len(),
            xb.iter().zip(values).map(|(&i, v)| v - self.mean[i]),
        );
        let cov = symmetrize(&(&saa - &sab * &sbb * sab.transpose()));
        let mean = subvector(&self.mean, &ka) + &sab * &sbb * resid;
        Ok(Self { cov, mean })
    }

    pub fn apply_unitary(&self, u: &GaussianUnitary, modes: &[usize]) -> Result<Self> {
        let full = u.embed(self.modes(), modes)?;
        Ok(Self {
            cov: symmetrize(&(&full.symplectic * &self.cov * full.symplectic.transpose())),
            mean: &full.symplectic * &self.mean + &full.displacement,
        })
    }
}

/// Gaussian unitary with Heisenberg action `U^dag q U = S q + d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GaussianUnitary {
    pub symplectic: Mat,
    pub displacement: Vect,
}

impl GaussianUnitary {
    pub fn new(symplectic: Mat, displacement: Vect) -> Result<Self> {
        let n = check_square_even(&symplectic)?;
        if displacement.len() != 2 * n {
            return Err(NgError::Shape("displacement length".into()));
        }
        let u = Self {
            symplectic,
            displacement,
        };
        if u.symplectic_defect() > SYM_TOL * (1.0 + max_abs(&u.symplectic).powi(2)) {
            return Err(NgError::Invalid("matrix is not symplectic".into()));
        }
        Ok(u)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            symplectic: Mat::identity(2 * n, 2 * n),
            displacement: Vect::zeros(2 * n),
        }
    }

    pub fn modes(&self) -> usize {
        self.symplectic.nrows() / 2
    }

    /// Single-mode squeezer; `x -> e^{-r} x` for `r > 0`.
    pub fn squeezer(r: f64) -> Self {
        Self {
            symplectic: Mat::from_diagonal(&Vect::from_vec(vec![(-r).exp(), r.exp()])),
            displacement: Vect::zeros(2),
        }
    }

    /// Phase rotation `exp(-i theta n)`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            symplectic: Mat::from_row_slice(2, 2, &[c, s, -s, c]),
            displacement: Vect::zeros(2),
        }
    }

    pub fn displacement(d: &Vect) -> Self {
        Self {
            symplectic: Mat::identity(d.len(), d.len()),
            displacement: d.clone(),
        }
    }

    /// Beamsplitter with reflectance `r`: `a1 -> sqrt(1-r) a1 - sqrt(r) a2`.
    pub fn beamsplitter(reflectance: f64) -> Self {
        let t = (1.0 - reflectance).sqrt();
        let s = reflectance.sqrt();
        let mut m = Mat::zeros(4, 4);
        for q in 0..2 {
            m[(q, q)] = t;
            m[(q, 2 + q)] = -s;
            m[(2 + q, q)] = s;
            m[(2 + q, 2 + q)] = t;
        }
        Self {
            symplectic: m,
            displacement: Vect::zeros(4),
        }
    }

    pub fn symplectic_defect(&self) -> f64 {
        let o = omega(self.modes());
        max_abs(&(&self.symplectic * &o * self.symplectic.transpose() - o))
    }

    /// `self` followed by `next` acting on the state.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            symplectic: &next.symplectic * &self.symplectic,
            displacement: &next.symplectic * &self.displacement + &next.displacement,
        }
    }

    pub fn inverse(&self) -> Result<Self> {
        let si = inv(&self.symplectic)?;
        let d = -(&si * &self.displacement);
        Ok(Self {
            symplectic: si,
            displacement: d,
        })
    }

    /// Extends to `total` modes, acting on `modes` and trivially elsewhere.
    pub fn embed(&self, total: usize, modes: &[usize]) -> Result<Self> {
        if modes.len() != self.modes() || modes.iter().any(|&m| m >= total) {
            return Err(NgError::Shape("unitary/mode list mismatch".into()));
        }
        let idx = quad_indices(modes);
        let mut s = Mat::identity(2 * total, 2 * total);
        let mut d = Vect::zeros(2 * total);
        for (i, &gi) in idx.iter().enumerate() {
            for (j, &gj) in idx.iter().enumerate() {
                s[(gi, gj)] = self.symplectic[(i, j)];
            }
            d[gi] = self.displacement[i];
        }
        Ok(Self {
            symplectic: s,
            displacement: d,
        })
    }

    pub fn tensor(&self, other: &Self) -> Self {
        Self {
            symplectic: direct_sum(&self.symplectic, &other.symplectic),
            displacement: concat(&self.displacement, &other.displacement),
        }
    }
}

/// `C = S D S^T` with `D = diag(nu_1, nu_1, ..., nu_k, nu_k)`.
#[derive(Clone, Debug)]
pub struct WilliamsonResult {
    pub symplectic: Mat,
    pub eigenvalues: Vec<f64>,
}

impl WilliamsonResult {
    pub fn diag(&self) -> Mat {
        Mat::from_diagonal(&Vect::from_fn(2 * self.eigenvalues.len(), |i, _| {
            self.eigenvalues[i / 2]
        }))
    }

    pub fn reconstruct(&self) -> Mat {
        &self.symplectic * self.diag() * self.symplectic.transpose()
    }
}

/// True iff `cov + i Omega` has no eigenvalue below `-1e-10`.
pub fn check_uncertainty(cov: &Mat) -> Result<bool> {
    let n = check_square_even(cov)?;
    let h = complexify(cov) + complexify(&omega(n)) * I;
    Ok(hermitian_min_eig(&h) >= -1e-10)
}

pub fn symplectic_eigenvalues(cov: &Mat) -> Result<Vec<f64>> {
    Ok(williamson(cov)?.eigenvalues)
}

pub fn williamson(c: &Mat) -> Result<WilliamsonResult> {
    let n = check_square_even(c)?;
    let (w, _) = sym_eig(c);
    if w[0] <= 0.0 {
        return Err(NgError::Invalid("matrix is not positive definite".into()));
    }
    let sq = sqrtm_psd(c);
    let k = &sq * omega(n) * &sq;
    let h = complexify(&k) * I;
    let h = (&h + h.adjoint()) * Complex64::new(0.5, 0.0);
    let e = h.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&a, &b| e.eigenvalues[b].total_cmp(&e.eigenvalues[a]));
    let mut o = Mat::zeros(2 * n, 2 * n);
    let mut nus = Vec::with_capacity(n);
    for (j, &col) in order.iter().take(n).enumerate() {
        nus.push(e.eigenvalues[col]);
        let u = e.eigenvectors.column(col);
        for r in 0..2 * n {
            o[(r, 2 * j)] = std::f64::consts::SQRT_2 * u[r].im;
            o[(r, 2 * j + 1)] = std::f64::consts::SQRT_2 * u[r].re;
        }
    }
    // Re-orthonormalize so that degenerate eigenspaces yield an exactly orthogonal frame.
    let qr = o.clone().qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..2 * n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    let dinv = Mat::from_diagonal(&Vect::from_fn(2 * n, |i, _| 1.0 / nus[i / 2].sqrt()));
    let s = &sq * q * dinv;
    let res = WilliamsonResult {
        symplectic: s,
        eigenvalues: nus,
    };
    if max_abs(&(res.reconstruct() - c)) > 1e-8 * (1.0 + max_abs(c)) {
        return Err(NgError::Degenerate(res.eigenvalues[0]));
    }
    Ok(res)
}

/// Canonical form of a pure state split into `l` signal and `k` control modes.
#[derive(Clone, Debug)]
pub struct CanonicalForm {
    /// Symplectic eigenvalues of the control block, descending.
    pub eigenvalues: Vec<f64>,
    pub u_s: GaussianUnitary,
    pub u_c: GaussianUnitary,
    pub schmidt_rank: usize,
}

impl CanonicalForm {
    /// TMSS pairs `(signal j, control j)` plus vacua, before the local unitaries.
    pub fn core_state(&self, l: usize) -> GaussianPure {
        let k = self.eigenvalues.len();
        let mut cov = Mat::identity(2 * (l + k), 2 * (l + k));
        for (j, &a) in self.eigenvalues.iter().enumerate() {
            let c = (a * a - 1.0).max(0.0).sqrt();
            let (s, t) = (2 * j, 2 * (l + j));
            if j < l {
                cov[(s, s)] = a;
                cov[(s + 1, s + 1)] = a;
                cov[(s, t)] = c;
                cov[(t, s)] = c;
                cov[(s + 1, t + 1)] = -c;
                cov[(t + 1, s + 1)] = -c;
            }
            cov[(t, t)] = a;
            cov[(t + 1, t + 1)] = a;
        }
        GaussianPure {
            cov,
            mean: Vect::zeros(2 * (l + k)),
        }
    }

    pub fn reconstruct(&self, l: usize) -> GaussianPure {
        let u = self.u_s.tensor(&self.u_c);
        let core = self.core_state(l);
        GaussianPure {
            cov: &u.symplectic * &core.cov * u.symplectic.transpose(),
            mean: u.displacement.clone(),
        }
    }
}

pub fn canonical_form(g: &GaussianPure, l: usize) -> Result<CanonicalForm> {
    let n = g.modes();
    if l > n {
        return Err(NgError::Shape("signal count exceeds modes".into()));
    }
    let k = n - l;
    if !g.is_pure(1e-6) {
        return Err(NgError::Impure(format!(
            "purity defect {:.3e}",
            g.purity_defect()
        )));
    }
    let sig: Vec<usize> = (0..l).collect();
    let ctl: Vec<usize> = (l..n).collect();
    let (a, alpha) = g.reduced(&sig);
    let (c, beta) = g.reduced(&ctl);
    let b = submatrix(&g.cov, &quad_indices(&ctl), &quad_indices(&sig));

    let wc = if k > 0 {
        williamson(&c)?
    } else {
        WilliamsonResult {
            symplectic: Mat::zeros(0, 0),
            eigenvalues: vec![],
        }
    };
    let nus = wc.eigenvalues.clone();
    let r = nus.iter().filter(|&&v| v > 1.0 + 1e-8).count();
    if r > l {
        return Err(NgError::Impure("Schmidt rank exceeds signal modes".into()));
    }
    let mut s_s = Mat::zeros(2 * l, 2 * l);
    if l > 0 {
        let bt = (inv(&wc.symplectic)? * &b).transpose();
        for j in 0..r {
            let f = (nus[j] * nus[j] - 1.0).sqrt();
            s_s.column_mut(2 * j).copy_from(&(bt.column(2 * j) / f));
            s_s.column_mut(2 * j + 1)
                .copy_from(&(-bt.column(2 * j + 1) / f));
        }
        if r < l {
            let wa = williamson(&a)?;
            for j in r..l {
                s_s.column_mut(2 * j)
                    .copy_from(&wa.symplectic.column(2 * j));
                s_s.column_mut(2 * j + 1)
                    .copy_from(&wa.symplectic.column(2 * j + 1));
            }
        }
    }
    let form = CanonicalForm {
        eigenvalues: nus.clone(),
        u_s: GaussianUnitary {
            symplectic: s_s,
            displacement: alpha,
        },
        u_c: GaussianUnitary {
            symplectic: wc.symplectic,
            displacement: beta,
        },
        schmidt_rank: r,
    };
    let rec = form.reconstruct(l);
    let err = max_abs(&(&rec.cov - &g.cov)) / (1.0 + max_abs(&g.cov));
    if err > 1e-6 || form.u_s.symplectic_defect() > 1e-6 {
        let worst = nus
            .windows(2)
            .filter(|w| (w[0] - w[1]).abs() < 1e-6)
            .map(|w| w[0])
            .next()
            .unwrap_or(nus.first().copied().unwrap_or(1.0));
        return Err(NgError::Degenerate(worst));
    }
    Ok(form)
}

/// `C~ = (C+I)^{-1}(C-I)`, `beta~ = (C+I)^{-1} beta`.
pub fn cayley(c: &Mat, beta: &Vect) -> Result<(Mat, Vect)> {
    let n = c.nrows();
    let id = Mat::identity(n, n);
    let p = c + &id;
    if cond(&p) > 1e12 {
        return Err(NgError::Singular("C + I".into()));
    }
    let pi = inv(&p)?;
    Ok((symmetrize(&(&pi * (c - &id))), &pi * beta))
}

pub fn inverse_cayley(ct: &Mat, bt: &Vect) -> Result<(Mat, Vect)> {
    let n = ct.nrows();
    let id = Mat::identity(n, n);
    let m = &id - ct;
    if cond(&m) > 1e12 {
        return Err(NgError::Singular("I - C~".into()));
    }
    let mi = inv(&m)?;
    let c = symmetrize(&(&mi * (&id + ct)));
    let beta = (&c + &id) * bt;
    Ok((c, beta))
}

/// Haar-random passive (orthogonal symplectic) transformation on `n` modes.
pub fn haar_passive<R: Rng>(n: usize, rng: &mut R) -> Mat {
    let z = CMat::from_fn(n, n, |_, _| {
        let re: f64 = rng.sample(StandardNormal);
        let im: f64 = rng.sample(StandardNormal);
        Complex64::new(re, im) / std::f64::consts::SQRT_2
    });
    let qr = z.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let ph = if d.abs() > 0.0 {
            d / Complex64::from_real(d.abs())
        } else {
            Complex64::new(1.0, 0.0)
        };
        let col = q.column(j) * ph;
        q.column_mut(j).copy_from(&col);
    }
    let mut blk = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let u = q[(i, j)];
            blk[(i, j)] = u.re;
            blk[(i, n + j)] = -u.im;
            blk[(n + i, j)] = u.im;
            blk[(n + i, n + j)] = u.re;
        }
    }
    block_to_interleaved(&blk)
}

/// `D(d) W S(r) V |0>` on `l + k` modes with uniform `r` and `d`.
pub fn random_generator(l: usize, k: usize, r_max: f64, d_max: f64, seed: u64) -> GaussianPure {
    let n = l + k;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let w = haar_passive(n, &mut rng);
    let v = haar_passive(n, &mut rng);
    let sq = Mat::from_diagonal(&Vect::from_fn(2 * n, |i, _| i as f64));
    let rs: Vec<f64> = (0..n).map(|_| rng.random::<f64>() * r_max).collect();
    let sq = sq.map_with_location(|i, j, _| {
        if i == j {
            let r = rs[i / 2];
            if i % 2 == 0 {
                (-r).exp()
            } else {
                r.exp()
            }
        } else {
            0.0
        }
    });
    let d = Vect::from_fn(2 * n, |_, _| rng.random::<f64>() * d_max);
    let s = &w * sq * &v;
    GaussianPure {
        cov: symmetrize(&(&s * s.transpose())),
        mean: d,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn uncertainty_examples() {
        assert!(check_uncertainty(&Mat::identity(2, 2)).unwrap());
        let c = Mat::from_diagonal(&Vect::from_vec(vec![0.60, 2.88]));
        assert!(check_uncertainty(&c).unwrap());
        let c = Mat::from_diagonal(&Vect::from_vec(vec![0.5, 0.5]));
        assert!(!check_uncertainty(&c).unwrap());
        assert!(check_uncertainty(&Mat::identity(3, 3)).is_err());
    }

    #[test]
    fn williamson_examples() {
        let w = williamson(&(Mat::identity(2, 2) * 3.0)).unwrap();
        assert_relative_eq!(w.eigenvalues[0], 3.0, epsilon = 1e-12);
        // only fixed up to a rotation
        let ss = &w.symplectic * w.symplectic.transpose();
        assert!(max_abs(&(ss - Mat::identity(2, 2))) < 1e-12);
        let c = Mat::from_diagonal(&Vect::from_vec(vec![0.60, 2.88]));
        let w = williamson(&c).unwrap();
        assert_relative_eq!(w.eigenvalues[0], 1.728f64.sqrt(), epsilon = 1e-12);
        let s = GaussianUnitary::squeezer(0.7).symplectic;
        let w = williamson(&(&s * s.transpose())).unwrap();
        assert_relative_eq!(w.eigenvalues[0], 1.0, epsilon = 1e-10);
    }

    #[test]
    fn williamson_degenerate_multimode() {
        let g = random_generator(0, 3, 0.0, 0.0, 1);
        let c = g.cov * 2.5;
        let w = williamson(&c).unwrap();
        for v in &w.eigenvalues {
            assert_relative_eq!(*v, 2.5, epsilon = 1e-10);
        }
        let u = GaussianUnitary {
            symplectic: w.symplectic.clone(),
            displacement: Vect::zeros(6),
        };
        assert!(u.symplectic_defect() < 1e-10);
    }

    #[test]
    fn tmss_is_pure_and_canonical() {
        let g = GaussianPure::tmss(3.0).unwrap();
        assert!(g.is_pure(1e-12));
        let f = canonical_form(&g, 1).unwrap();
        assert_eq!(f.schmidt_rank, 1);
        assert_relative_eq!(f.eigenvalues[0], 3.0, epsilon = 1e-10);
        for s in [&f.u_c.symplectic, &f.u_s.symplectic] {
            assert!(max_abs(&(s * s.transpose() - Mat::identity(2, 2))) < 1e-8);
        }
    }

    #[test]
    fn canonical_form_recovers_signal_squeezer() {
        let sq = GaussianUnitary::squeezer(0.4);
        let g = GaussianPure::tmss(3.0)
            .unwrap()
            .apply_unitary(&sq, &[0])
            .unwrap();
        let f = canonical_form(&g, 1).unwrap();
        let ss = &f.u_s.symplectic * f.u_s.symplectic.transpose();
        assert!(max_abs(&(ss - &sq.symplectic * &sq.symplectic)) < 1e-8);
    }

    #[test]
    fn canonical_form_random_round_trip() {
        for seed in 0..20 {
            let g = random_generator(2, 2, 1.0, 0.5, seed);
            let f = canonical_form(&g, 2).unwrap();
            let rec = f.reconstruct(2);
            assert!(max_abs(&(&rec.cov - &g.cov)) < 1e-6, "seed {seed}");
            assert!((&rec.mean - &g.mean).amax() < 1e-12);
        }
        // more control than signal modes: Schmidt rank limited by the signal side
        let g = random_generator(1, 3, 1.0, 0.5, 5);
        let f = canonical_form(&g, 1).unwrap();
        assert_eq!(f.schmidt_rank, 1);
        assert!(max_abs(&(f.reconstruct(1).cov - &g.cov)) < 1e-6);
    }

    #[test]
    fn cayley_examples() {
        let (ct, bt) = cayley(&(Mat::identity(2, 2) * 3.0), &Vect::zeros(2)).unwrap();
        assert!(max_abs(&(ct - Mat::identity(2, 2) * 0.5)) < 1e-15);
        assert_eq!(bt, Vect::zeros(2));
        let (ct, _) = cayley(&Mat::identity(2, 2), &Vect::zeros(2)).unwrap();
        assert!(max_abs(&ct) < 1e-15);
    }

    #[test]
    fn random_generator_examples() {
        let g = random_generator(1, 2, 0.0, 0.0, 9);
        assert!(max_abs(&(&g.cov - Mat::identity(6, 6))) < 1e-12);
        assert_eq!(g.mean, Vect::zeros(6));
        let a = random_generator(3, 4, 1.0, 0.5, 42);
        let b = random_generator(3, 4, 1.0, 0.5, 42);
        assert_eq!(a, b);
        assert!(a.is_pure(1e-8));
        assert!(a.mean.iter().all(|&d| (0.0..=0.5).contains(&d)));
    }

    #[test]
    fn beamsplitter_and_rotation_are_symplectic() {
        assert!(GaussianUnitary::beamsplitter(0.137).symplectic_defect() < 1e-14);
        assert!(GaussianUnitary::rotation(0.3).symplectic_defect() < 1e-14);
    }
}
