//! Truncated Fock-space computations: heralding, success probabilities, particle and
//! wave forms, Gaussian unitaries on Fock vectors, and phase-space diagnostics.

use nalgebra::ComplexField;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bargmann::{bargmann, fock_amplitudes, strides, BargmannForm};
use crate::control::ControlMoments;
use crate::error::{NgError, Result};
use crate::linalg::*;
use crate::maps::FilterRep;
use crate::symplectic::{GaussianPure, GaussianUnitary};

/// Default relative tail mass accepted before the cutoff is doubled.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;
const PROB_FLOOR: f64 = 1e-300;
const DOUBLED_BUDGET: usize = 4_000_000;
const MAX_CUTOFF: usize = 1024;

/// Single-mode truncated state; `amps[n] = <n|psi>`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockVector {
    pub amps: Vec<Complex64>,
}

impl FockVector {
    pub fn new(amps: Vec<Complex64>) -> Self {
        Self { amps }
    }

    pub fn basis(n: usize, cutoff: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); cutoff.max(n) + 1];
        amps[n] = Complex64::new(1.0, 0.0);
        Self { amps }
    }

    pub fn cutoff(&self) -> usize {
        self.amps.len().saturating_sub(1)
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self {
            amps: self.amps.iter().map(|z| z / n).collect(),
        }
    }

    /// Mass in the upper tenth of the levels, relative to the total.
    pub fn tail_mass(&self) -> f64 {
        let len = self.amps.len();
        let start = len - (len / 10).max(1);
        self.amps[start..].iter().map(|z| z.norm_sqr()).sum::<f64>()
            / self.norm_sqr().max(PROB_FLOOR)
    }

    pub fn padded(&self, len: usize) -> Vec<Complex64> {
        let mut v = self.amps.clone();
        v.resize(len.max(v.len()), Complex64::new(0.0, 0.0));
        v
    }
}

/// Multimode truncated amplitudes in row-major order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockTensor {
    pub dims: Vec<usize>,
    pub amps: Vec<Complex64>,
}

impl FockTensor {
    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn normalized(&self) -> Self {
        let n = self.norm_sqr().sqrt();
        Self {
            dims: self.dims.clone(),
            amps: self.amps.iter().map(|z| z / n).collect(),
        }
    }

    pub fn to_vector(&self) -> Result<FockVector> {
        if self.dims.len() != 1 {
            return Err(NgError::Shape("tensor is not single-mode".into()));
        }
        Ok(FockVector::new(self.amps.clone()))
    }

    /// Largest relative mass in the upper tenth of any single mode.
    pub fn tail_mass(&self) -> f64 {
        let total = self.norm_sqr().max(PROB_FLOOR);
        let st = strides(&self.dims);
        let mut worst: f64 = 0.0;
        for (m, &d) in self.dims.iter().enumerate() {
            let start = d - (d / 10).max(1);
            let mass: f64 = self
                .amps
                .iter()
                .enumerate()
                .filter(|(i, _)| (i / st[m]) % d >= start)
                .map(|(_, z)| z.norm_sqr())
                .sum();
            worst = worst.max(mass / total);
        }
        worst
    }
}

/// Cutoff policy for truncated computations.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FockOptions {
    /// Initial signal cutoff; `None` uses `max(3 * total photons, 40)`.
    pub cutoff: Option<usize>,
    pub tail_tol: f64,
    /// Double the cutoff until the tail mass is below `tail_tol`.
    pub adaptive: bool,
}

impl Default for FockOptions {
    fn default() -> Self {
        Self {
            cutoff: None,
            tail_tol: DEFAULT_TAIL_TOL,
            adaptive: true,
        }
    }
}

impl FockOptions {
    pub fn fixed(cutoff: usize) -> Self {
        Self {
            cutoff: Some(cutoff),
            tail_tol: DEFAULT_TAIL_TOL,
            adaptive: false,
        }
    }
}

/// Amplitudes of a pure Gaussian state with per-mode cutoffs; also returns the captured probability.
pub fn gaussian_fock_amplitudes(g: &GaussianPure, cutoffs: &[usize]) -> Result<(FockTensor, f64)> {
    if cutoffs.len() != g.modes() {
        return Err(NgError::Shape("one cutoff per mode".into()));
    }
    let dims: Vec<usize> = cutoffs.iter().map(|c| c + 1).collect();
    let amps = fock_amplitudes(&bargmann(&g.cov, &g.mean)?, &dims)?;
    let t = FockTensor { dims, amps };
    let p = t.norm_sqr();
    Ok((t, p))
}

#[derive(Clone, Debug)]
pub struct HeraldResult {
    /// Normalized signal state.
    pub signal: FockTensor,
    pub probability: f64,
    pub cutoff: usize,
    pub tail: f64,
}

fn herald_at(
    form: &BargmannForm,
    l: usize,
    pattern: &[usize],
    cutoff: usize,
) -> Result<(FockTensor, f64)> {
    let mut dims = vec![cutoff + 1; l];
    dims.extend(pattern.iter().map(|n| n + 1));
    let amps = fock_amplitudes(form, &dims)?;
    let st = strides(&dims);
    let offset: usize = pattern
        .iter()
        .enumerate()
        .map(|(j, &n)| n * st[l + j])
        .sum();
    let block = st[l.saturating_sub(1)].max(1);
    let sig_len = (cutoff + 1).pow(l as u32);
    let step = if l == 0 { 1 } else { block };
    let out: Vec<Complex64> = (0..sig_len).map(|i| amps[i * step + offset]).collect();
    let t = FockTensor {
        dims: vec![cutoff + 1; l],
        amps: out,
    };
    let p = t.norm_sqr();
    Ok((t, p))
}

/// Projects the control modes (modes `l..`) of `g` onto `|pattern>`.
pub fn herald(
    g: &GaussianPure,
    l: usize,
    pattern: &[usize],
    opts: &FockOptions,
) -> Result<HeraldResult> {
    if l + pattern.len() != g.modes() {
        return Err(NgError::Shape(
            "pattern length must equal the control mode count".into(),
        ));
    }
    let form = bargmann(&g.cov, &g.mean)?;
    let total: usize = pattern.iter().sum();
    let mut cutoff = opts.cutoff.unwrap_or((3 * total).max(40));
    loop {
        let (t, p) = herald_at(&form, l, pattern, cutoff)?;
        let tail = if l == 0 { 0.0 } else { t.tail_mass() };
        let grow = opts.adaptive && tail > opts.tail_tol && 2 * cutoff <= MAX_CUTOFF;
        let box_size =
            (2 * cutoff + 1).pow(l as u32) * pattern.iter().map(|n| n + 1).product::<usize>();
        if !grow || box_size > 50_000_000 {
            if p < PROB_FLOOR {
                return Err(NgError::Invalid(format!(
                    "herald probability {p:e} below floor"
                )));
            }
            return Ok(HeraldResult {
                signal: t.normalized(),
                probability: p,
                cutoff,
                tail,
            });
        }
        cutoff *= 2;
    }
}

/// Probability of `pattern` on a generator with control moments `m`.
///
/// Uses the minimal purification; the sum over signal photon numbers is done
/// analytically by a Gaussian integral, which leaves a Fock amplitude of a
/// doubled control space. Falls back to heralding when that space is too large.
pub fn success_probability(
    m: &ControlMoments,
    pattern: &[usize],
    opts: &FockOptions,
) -> Result<f64> {
    if pattern.len() != m.modes() {
        return Err(NgError::Shape(
            "pattern length must equal the control mode count".into(),
        ));
    }
    let (g, r) = minimal_purification(m)?;
    let boxed: usize = pattern.iter().map(|n| (n + 1) * (n + 1)).product();
    if boxed > DOUBLED_BUDGET {
        return Ok(herald(&g, r, pattern, opts)?.probability);
    }
    let form = bargmann(&g.cov, &g.mean)?;
    let traced = signal_traced_form(&form, &form, r)?;
    let dims: Vec<usize> = pattern
        .iter()
        .chain(pattern.iter())
        .map(|n| n + 1)
        .collect();
    let amps = fock_amplitudes(&traced, &dims)?;
    Ok(amps[amps.len() - 1].modulus())
}

/// Bargmann form over `(u, w)` whose `(m, m')` amplitude is `sum_s conj(<s, m|G1>) <s, m'|G2>`,
/// where `s` runs over the first `l` modes of both states.
///
/// The constant is only determined up to a phase; its modulus is exact.
pub fn signal_traced_form(f1: &BargmannForm, f2: &BargmannForm, l: usize) -> Result<BargmannForm> {
    let (n1, n2) = (f1.a.nrows(), f2.a.nrows());
    if l > n1 || l > n2 {
        return Err(NgError::Shape("signal count exceeds mode count".into()));
    }
    let (k1, k2) = (n1 - l, n2 - l);
    let conj = |x: &CMat| x.map(|z| z.conj());
    let a1 = conj(&f1.a);
    let b1 = f1.b.map(|z| z.conj());
    let (a2, b2) = (&f2.a, &f2.b);
    let mut mm = CMat::zeros(2 * l, 2 * l);
    mm.view_mut((0, 0), (l, l))
        .copy_from(&(-a2.view((0, 0), (l, l))));
    mm.view_mut((l, l), (l, l))
        .copy_from(&(-a1.view((0, 0), (l, l))));
    mm.view_mut((0, l), (l, l)).copy_from(&CMat::identity(l, l));
    mm.view_mut((l, 0), (l, l)).copy_from(&CMat::identity(l, l));
    let mi = cinv(&mm)?;
    // j = P (u, w) + j0 multiplies (alpha, conj alpha)
    let mut p = CMat::zeros(2 * l, k1 + k2);
    p.view_mut((0, k1), (l, k2))
        .copy_from(&a2.view((0, l), (l, k2)));
    p.view_mut((l, 0), (l, k1))
        .copy_from(&a1.view((0, l), (l, k1)));
    let j0 = CVect::from_iterator(
        2 * l,
        b2.rows(0, l).iter().chain(b1.rows(0, l).iter()).cloned(),
    );
    let mut at = CMat::zeros(k1 + k2, k1 + k2);
    at.view_mut((0, 0), (k1, k1))
        .copy_from(&a1.view((l, l), (k1, k1)));
    at.view_mut((k1, k1), (k2, k2))
        .copy_from(&a2.view((l, l), (k2, k2)));
    let at = csymmetrize(&(at + p.transpose() * &mi * &p));
    let bt0 = CVect::from_iterator(
        k1 + k2,
        b1.rows(l, k1).iter().chain(b2.rows(l, k2).iter()).cloned(),
    );
    let bt = bt0 + p.transpose() * &mi * &j0;
    let det =
        (CMat::identity(l, l) - a1.view((0, 0), (l, l)) * a2.view((0, 0), (l, l))).determinant();
    let expo = (j0.transpose() * &mi * &j0)[(0, 0)] * 0.5;
    let ct = f1.c.norm() * f2.c.norm() * det.modulus().powf(-0.5) * expo.re.exp();
    Ok(BargmannForm {
        a: at,
        b: bt,
        c: Complex64::new(ct, 0.0),
    })
}

/// `sum_s conj(<s, n1|G1>) <s, n2|G2>` over the first `l` modes, up to a global phase.
pub fn heralded_overlap(
    g1: &GaussianPure,
    n1: &[usize],
    g2: &GaussianPure,
    n2: &[usize],
    l: usize,
) -> Result<Complex64> {
    if g1.modes() != l + n1.len() || g2.modes() != l + n2.len() {
        return Err(NgError::Shape(
            "pattern length must equal the control mode count".into(),
        ));
    }
    let f = signal_traced_form(
        &bargmann(&g1.cov, &g1.mean)?,
        &bargmann(&g2.cov, &g2.mean)?,
        l,
    )?;
    let dims: Vec<usize> = n1.iter().chain(n2.iter()).map(|n| n + 1).collect();
    let amps = fock_amplitudes(&f, &dims)?;
    Ok(amps[amps.len() - 1])
}

/// Fidelity between the signal states heralded from two generators sharing the same `l` signal modes.
pub fn heralded_fidelity(
    g1: &GaussianPure,
    n1: &[usize],
    g2: &GaussianPure,
    n2: &[usize],
    l: usize,
    opts: &FockOptions,
) -> Result<f64> {
    let size = |n: &[usize]| n.iter().map(|x| x + 1).product::<usize>();
    let (s1, s2) = (size(n1), size(n2));
    if s1 * s2 <= DOUBLED_BUDGET && s1 * s1 <= DOUBLED_BUDGET && s2 * s2 <= DOUBLED_BUDGET {
        let ov = heralded_overlap(g1, n1, g2, n2, l)?;
        let p1 = heralded_overlap(g1, n1, g1, n1, l)?.norm();
        let p2 = heralded_overlap(g2, n2, g2, n2, l)?.norm();
        if p1 < PROB_FLOOR || p2 < PROB_FLOOR {
            return Err(NgError::Invalid("herald probability below floor".into()));
        }
        return Ok((ov.norm_sqr() / (p1 * p2)).min(1.0));
    }
    let h1 = herald(g1, l, n1, opts)?;
    let h2 = herald(g2, l, n2, opts)?;
    fidelity_tensor(&h1.signal, &h2.signal)
}

/// Purification with one signal mode per non-trivial symplectic eigenvalue.
pub fn minimal_purification(m: &ControlMoments) -> Result<(GaussianPure, usize)> {
    let full = m.purify()?;
    let k = m.modes();
    let w = crate::symplectic::williamson(&m.c)?;
    let keep: Vec<usize> = (0..k).filter(|&j| w.eigenvalues[j] > 1.0 + 1e-9).collect();
    let order: Vec<usize> = keep.iter().cloned().chain(k..2 * k).collect();
    Ok((full.permuted(&order), keep.len()))
}

/// `(a^dag + s0 a + delta0)^n |0>`, normalized.
pub fn particle_form(s0: f64, delta0: Complex64, n: usize, cutoff: usize) -> FockVector {
    let len = cutoff.max(n) + 1;
    let mut v = vec![Complex64::new(0.0, 0.0); len];
    v[0] = Complex64::new(1.0, 0.0);
    for _ in 0..n {
        let mut w = vec![Complex64::new(0.0, 0.0); len];
        for j in 0..len {
            if v[j] == Complex64::new(0.0, 0.0) {
                continue;
            }
            if j + 1 < len {
                w[j + 1] += v[j] * ((j + 1) as f64).sqrt();
            }
            if j > 0 {
                w[j - 1] += v[j] * s0 * (j as f64).sqrt();
            }
            w[j] += v[j] * delta0;
        }
        let nrm = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        v = w.into_iter().map(|z| z / nrm).collect();
    }
    FockVector::new(v)
}

/// Gaussian unitary taking the particle form to the wave form.
///
/// The wave form is `exp(sqrt(s0+1)/2 w_p y) exp(-s0 y^2/4) phi_n(y)` with
/// `y = x + i w_x / sqrt(s0+1)` and `w = conj(delta0)`.
pub fn p_to_w_unitary(s0: f64, delta0: Complex64) -> GaussianUnitary {
    let r = (s0 + 1.0).sqrt();
    let s = Mat::from_row_slice(2, 2, &[0.0, 1.0 / r, -r, 0.0]);
    let w = Vect::from_vec(vec![delta0.re, -delta0.im]);
    GaussianUnitary {
        displacement: &s * w,
        symplectic: s,
    }
}

pub fn wave_form(s0: f64, delta0: Complex64, n: usize, cutoff: usize) -> Result<FockVector> {
    let p = particle_form(s0, delta0, n, cutoff);
    apply_gaussian_unitary_fock(&p_to_w_unitary(s0, delta0), &p, cutoff, 1.0)
}

/// Fock matrix `<m|U|n>` for `m <= out_cutoff`, `n <= in_cutoff`, row-major, up to a global phase.
pub fn unitary_fock_matrix(
    u: &GaussianUnitary,
    out_cutoff: usize,
    in_cutoff: usize,
) -> Result<Vec<Complex64>> {
    if u.modes() != 1 {
        return Err(NgError::Shape("single-mode unitary expected".into()));
    }
    let f = FilterRep::from_unitary(u)?;
    let (a, b) = f.choi_bargmann()?;
    let cov = &u.symplectic * u.symplectic.transpose();
    let p0 = crate::maps::vacuum_probability(&cov, &u.displacement, &[0])?;
    let form = BargmannForm {
        a,
        b,
        c: Complex64::new(p0.sqrt(), 0.0),
    };
    fock_amplitudes(&form, &[out_cutoff + 1, in_cutoff + 1])
}

/// Applies a single-mode Gaussian unitary; fails if more than `max_loss` of the norm is truncated.
pub fn apply_gaussian_unitary_fock(
    u: &GaussianUnitary,
    v: &FockVector,
    out_cutoff: usize,
    max_loss: f64,
) -> Result<FockVector> {
    let lin = v.cutoff();
    let m = unitary_fock_matrix(u, out_cutoff, lin)?;
    let out: Vec<Complex64> = (0..=out_cutoff)
        .map(|i| (0..=lin).map(|j| m[i * (lin + 1) + j] * v.amps[j]).sum())
        .collect();
    let res = FockVector::new(out);
    let loss = 1.0 - res.norm_sqr() / v.norm_sqr().max(PROB_FLOOR);
    if loss > max_loss {
        return Err(NgError::TooLarge(format!(
            "norm loss {loss:.3e} at cutoff {out_cutoff}"
        )));
    }
    Ok(res)
}

/// `|<u|v>|^2` of the normalized inputs, zero-padding the shorter one.
pub fn fidelity(u: &FockVector, v: &FockVector) -> f64 {
    fidelity_slices(&u.amps, &v.amps)
}

pub fn fidelity_tensor(u: &FockTensor, v: &FockTensor) -> Result<f64> {
    if u.dims.len() != v.dims.len() {
        return Err(NgError::Shape("mode count mismatch".into()));
    }
    if u.dims == v.dims {
        return Ok(fidelity_slices(&u.amps, &v.amps));
    }
    let dims: Vec<usize> = u.dims.iter().zip(&v.dims).map(|(a, b)| *a.min(b)).collect();
    let (su, sv) = (strides(&u.dims), strides(&v.dims));
    let total: usize = dims.iter().product();
    let mut ov = Complex64::new(0.0, 0.0);
    let sd = strides(&dims);
    for flat in 0..total {
        let (mut iu, mut iv) = (0, 0);
        for m in 0..dims.len() {
            let k = (flat / sd[m]) % dims[m];
            iu += k * su[m];
            iv += k * sv[m];
        }
        ov += u.amps[iu].conj() * v.amps[iv];
    }
    Ok(ov.norm_sqr() / (u.norm_sqr() * v.norm_sqr()))
}

fn fidelity_slices(u: &[Complex64], v: &[Complex64]) -> f64 {
    let ov: Complex64 = u.iter().zip(v).map(|(a, b)| a.conj() * b).sum();
    let nu: f64 = u.iter().map(|z| z.norm_sqr()).sum();
    let nv: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    ov.norm_sqr() / (nu * nv)
}

/// `x_phi |v>` for `x_phi = a e^{-i phi} + a^dag e^{i phi}` (no truncation at the top).
pub fn apply_quadrature(v: &[Complex64], phi: f64) -> Vec<Complex64> {
    let e = Complex64::from_polar(1.0, phi);
    let mut w = vec![Complex64::new(0.0, 0.0); v.len() + 1];
    for (j, &c) in v.iter().enumerate() {
        if j > 0 {
            w[j - 1] += c * e.conj() * (j as f64).sqrt();
        }
        w[j + 1] += c * e * ((j + 1) as f64).sqrt();
    }
    w
}

/// `<x_phi^k>` for each `k` in `powers`, with `x_0 = x` and `x_{pi/2} = p`.
pub fn quadrature_moments(v: &FockVector, phi: f64, powers: &[usize]) -> Vec<f64> {
    let nv = v.norm_sqr();
    let maxp = powers.iter().cloned().max().unwrap_or(0);
    let mut chain = vec![v.amps.clone()];
    for _ in 0..maxp {
        let next = apply_quadrature(chain.last().unwrap(), phi);
        chain.push(next);
    }
    powers
        .iter()
        .map(|&k| {
            // <v| x^k |v> = <x^{k/2} v | x^{k - k/2} v>
            let (h1, h2) = (k / 2, k - k / 2);
            let (a, b) = (&chain[h1], &chain[h2]);
            let s: Complex64 = a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum();
            s.re / nv
        })
        .collect()
}

/// Fock wavefunctions `phi_0..phi_{len-1}` at `x` (hbar = 2).
pub fn hermite_functions(len: usize, x: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(len);
    if len == 0 {
        return out;
    }
    out.push((2.0 * std::f64::consts::PI).powf(-0.25) * (-x * x / 4.0).exp());
    if len > 1 {
        out.push(x * out[0]);
    }
    for n in 1..len.saturating_sub(1) {
        let v = (x * out[n] - (n as f64).sqrt() * out[n - 1]) / ((n + 1) as f64).sqrt();
        out.push(v);
    }
    out
}

pub fn x_wavefunction(v: &FockVector, xs: &[f64]) -> Vec<Complex64> {
    xs.iter()
        .map(|&x| {
            hermite_functions(v.amps.len(), x)
                .iter()
                .zip(&v.amps)
                .map(|(h, c)| c * *h)
                .sum()
        })
        .collect()
}

/// Wigner function on the grid, rows indexed by `ps`, columns by `xs`; integrates to 1 over `dx dp`.
pub fn wigner_grid(v: &FockVector, xs: &[f64], ps: &[f64]) -> Mat {
    let v = v.normalized();
    let c = &v.amps;
    let l = c.len();
    let rows: Vec<Vec<f64>> = ps
        .par_iter()
        .map(|&p| {
            xs.iter()
                .map(|&x| {
                    let a = Complex64::new(x, p) / 2.0;
                    let mut wl: Vec<Complex64> = vec![Complex64::new(0.0, 0.0); l];
                    wl[0] = Complex64::new((-2.0 * a.norm_sqr()).exp() / std::f64::consts::PI, 0.0);
                    let rho = |m: usize, n: usize| c[m] * c[n].conj();
                    let mut w = (rho(0, 0) * wl[0]).re;
                    for n in 1..l {
                        wl[n] = wl[n - 1] * a * 2.0 / (n as f64).sqrt();
                        w += 2.0 * (rho(0, n) * wl[n]).re;
                    }
                    for m in 1..l {
                        let mut temp = wl[m];
                        wl[m] = (a.conj() * temp * 2.0 - wl[m - 1] * (m as f64).sqrt())
                            / (m as f64).sqrt();
                        w += (rho(m, m) * wl[m]).re;
                        for n in m + 1..l {
                            let t2 = (a * wl[n - 1] * 2.0 - temp * (m as f64).sqrt())
                                / (n as f64).sqrt();
                            temp = wl[n];
                            wl[n] = t2;
                            w += 2.0 * (rho(m, n) * wl[n]).re;
                        }
                    }
                    w / 2.0
                })
                .collect()
        })
        .collect();
    Mat::from_fn(ps.len(), xs.len(), |i, j| rows[i][j])
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn cz(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn herald_tmss_single_photon() {
        // Schmidt ratio 1/2 gives <11> = (sqrt(3)/2)(1/2)
        let g = GaussianPure::tmss_from_schmidt(0.5).unwrap();
        let h = herald(&g, 1, &[1], &FockOptions::default()).unwrap();
        assert_relative_eq!(h.probability, 0.1875, epsilon = 1e-12);
        let v = h.signal.to_vector().unwrap();
        assert_relative_eq!(v.amps[1].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn success_probability_matches_closed_form() {
        for &a in &[1.5, 3.0, 10.0] {
            let m = ControlMoments::new(Mat::identity(2, 2) * a, Vect::zeros(2)).unwrap();
            for n in [0usize, 1, 5] {
                let p = success_probability(&m, &[n], &FockOptions::default()).unwrap();
                let want = 2.0 / (a + 1.0) * ((a - 1.0) / (a + 1.0)).powi(n as i32);
                assert_relative_eq!(p, want, max_relative = 1e-10);
            }
        }
        let m = ControlMoments::new(Mat::identity(2, 2), Vect::zeros(2)).unwrap();
        assert_relative_eq!(
            success_probability(&m, &[0], &FockOptions::default()).unwrap(),
            1.0,
            epsilon = 1e-14
        );
    }

    #[test]
    fn particle_form_examples() {
        let v = particle_form(0.0, cz(0.5, 0.0), 1, 4);
        assert_relative_eq!(v.amps[0].re / v.amps[1].re, 0.5, epsilon = 1e-14);
        let v = particle_form(1.0, cz(0.0, 0.0), 2, 4);
        assert_relative_eq!(v.amps[2].re, (2.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert_relative_eq!(v.amps[0].re, (1.0f64 / 3.0).sqrt(), epsilon = 1e-14);
        assert!(v.amps[3..].iter().all(|z| z.norm() == 0.0));
    }

    #[test]
    fn wave_form_of_zero_parameters_is_rotated_fock() {
        let w = wave_form(0.0, cz(0.0, 0.0), 3, 10).unwrap();
        assert_relative_eq!(w.amps[3].norm(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn wave_form_wavefunction_shape() {
        let (s0, n) = (0.8, 4);
        let w = wave_form(s0, cz(0.0, 0.0), n, 80).unwrap();
        let xs: Vec<f64> = (-20..=20).map(|i| i as f64 * 0.2).collect();
        let psi = x_wavefunction(&w, &xs);
        let want: Vec<f64> = xs
            .iter()
            .map(|&x| hermite_functions(n + 1, x)[n] * (-s0 * x * x / 4.0).exp())
            .collect();
        let ov: Complex64 = psi.iter().zip(&want).map(|(a, b)| a.conj() * *b).sum();
        let na: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
        let nb: f64 = want.iter().map(|z| z * z).sum();
        assert!(ov.norm_sqr() / (na * nb) > 1.0 - 1e-9);
    }

    #[test]
    fn unitary_on_fock_examples() {
        let v = FockVector::basis(0, 20);
        let d = GaussianUnitary::displacement(&Vect::from_vec(vec![2.0, 0.0]));
        let c = apply_gaussian_unitary_fock(&d, &v, 20, 1e-10).unwrap();
        let mut fact = 1.0;
        for n in 0..10 {
            if n > 0 {
                fact *= n as f64;
            }
            assert_relative_eq!(
                c.amps[n].norm(),
                (-0.5f64).exp() / fact.sqrt(),
                epsilon = 1e-12
            );
        }
        let s = apply_gaussian_unitary_fock(&GaussianUnitary::squeezer(0.5), &v, 40, 1e-8).unwrap();
        assert!(s.amps.iter().skip(1).step_by(2).all(|z| z.norm() < 1e-14));
        let id = apply_gaussian_unitary_fock(
            &GaussianUnitary::identity(1),
            &particle_form(0.3, cz(0.2, 0.1), 3, 3),
            3,
            1e-12,
        )
        .unwrap();
        assert_relative_eq!(
            fidelity(&id, &particle_form(0.3, cz(0.2, 0.1), 3, 3)),
            1.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn moments_of_number_states() {
        for n in 0..5 {
            let v = FockVector::basis(n, n);
            let m = quadrature_moments(&v, 0.0, &[1, 2, 4]);
            assert!(m[0].abs() < 1e-14);
            assert_relative_eq!(m[1], 2.0 * n as f64 + 1.0, epsilon = 1e-12);
        }
        let m = quadrature_moments(&FockVector::basis(1, 1), 0.0, &[4]);
        assert_relative_eq!(m[0], 15.0, epsilon = 1e-12);
    }

    #[test]
    fn wigner_normalization_and_centre() {
        let w = wigner_grid(&FockVector::basis(0, 0), &[0.0], &[0.0]);
        assert_relative_eq!(
            w[(0, 0)],
            1.0 / (2.0 * std::f64::consts::PI),
            epsilon = 1e-14
        );
        let w = wigner_grid(&FockVector::basis(1, 1), &[0.0], &[0.0]);
        assert_relative_eq!(
            w[(0, 0)],
            -1.0 / (2.0 * std::f64::consts::PI),
            epsilon = 1e-14
        );
        // coherent state with mean (1, 2)
        let d = GaussianUnitary::displacement(&Vect::from_vec(vec![1.0, 2.0]));
        let c = apply_gaussian_unitary_fock(&d, &FockVector::basis(0, 30), 30, 1e-10).unwrap();
        let w = wigner_grid(&c, &[1.0, -1.0], &[2.0]);
        assert_relative_eq!(
            w[(0, 0)],
            1.0 / (2.0 * std::f64::consts::PI),
            epsilon = 1e-10
        );
        let xs: Vec<f64> = (-80..=80).map(|i| i as f64 * 0.1).collect();
        let grid = wigner_grid(&FockVector::basis(2, 2), &xs, &xs);
        let integral: f64 = grid.iter().sum::<f64>() * 0.01;
        assert_relative_eq!(integral, 1.0, epsilon = 1e-6);
    }

    #[test]
    fn herald_vacuum_outcome_of_tmss() {
        let a = 3.0;
        let g = GaussianPure::tmss(a).unwrap();
        let h = herald(&g, 1, &[0], &FockOptions::default()).unwrap();
        assert_relative_eq!(h.probability, 2.0 / (a + 1.0), epsilon = 1e-12);
        assert_relative_eq!(h.signal.amps[0].norm(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn doubled_probability_agrees_with_herald() {
        for seed in 0..4 {
            let g = crate::symplectic::random_generator(1, 2, 0.8, 0.6, seed);
            let m = ControlMoments::from_state(&g, 1);
            for pat in [[0usize, 0], [2, 1], [3, 0]] {
                let direct = herald(&g, 1, &pat, &FockOptions::default())
                    .unwrap()
                    .probability;
                let doubled = success_probability(&m, &pat, &FockOptions::default()).unwrap();
                assert_relative_eq!(doubled, direct, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn traced_fidelity_agrees_with_truncated_states() {
        let g1 = crate::symplectic::random_generator(1, 2, 0.6, 0.5, 11);
        let u = GaussianUnitary::squeezer(0.1).then(&GaussianUnitary::rotation(0.3));
        let g2 = g1.apply_unitary(&u, &[1]).unwrap();
        for (n1, n2) in [([1usize, 2], [1usize, 2]), ([2, 0], [1, 1])] {
            let exact = heralded_fidelity(&g1, &n1, &g2, &n2, 1, &FockOptions::default()).unwrap();
            let h1 = herald(&g1, 1, &n1, &FockOptions::fixed(80)).unwrap();
            let h2 = herald(&g2, 1, &n2, &FockOptions::fixed(80)).unwrap();
            let direct = fidelity_tensor(&h1.signal, &h2.signal).unwrap();
            assert_relative_eq!(exact, direct, epsilon = 1e-9);
        }
        let f = heralded_fidelity(&g1, &[2, 1], &g1, &[2, 1], 1, &FockOptions::default()).unwrap();
        assert_relative_eq!(f, 1.0, epsilon = 1e-10);
    }
}
