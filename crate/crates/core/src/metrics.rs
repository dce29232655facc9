//! Non-Gaussian squeezing figures of merit evaluated on single-mode Fock vectors.
//!
//! Each metric is minimized over its free parameters; lower values mean a
//! state closer to the respective non-Gaussian target family.

use std::f64::consts::{PI, SQRT_2};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::fock::{apply_quadrature, hermite_functions, quadrature_moments, FockVector};
use crate::solve::golden_section;

pub const LAMBDA_TOL: f64 = 1e-8;
const CPS_RANGE: (f64, f64) = (0.05, 20.0);
const GKP_RANGE: (f64, f64) = (0.2, 5.0);
const GRID_POINTS: usize = 200;
const DENSITY_STEP: f64 = 0.01;

/// Quadrature normalization `x = a + a^dag` (`Hbar2`) or `x = (a + a^dag)/sqrt(2)` (`Hbar1`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    Hbar1,
    Hbar2,
}

impl Convention {
    /// Factor converting the internal `hbar = 2` quadrature into this convention.
    pub fn scale(self) -> f64 {
        match self {
            Convention::Hbar1 => 1.0 / SQRT_2,
            Convention::Hbar2 => 1.0,
        }
    }
}

/// Convention that reproduces the reference GKP squeezing values.
pub const GKP_CONVENTION: Convention = Convention::Hbar2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricResult {
    pub value: f64,
    pub lambda: f64,
    /// Optimal offset `d` of the cubic metric.
    pub offset: Option<f64>,
    /// Optimal phases of the lattice metric.
    pub phases: Option<(f64, f64)>,
    pub convention: Convention,
}

/// All three metrics of one state.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetricSet {
    pub xi_cat: MetricResult,
    pub xi_cps: MetricResult,
    pub xi_gkp: MetricResult,
}

impl MetricSet {
    pub fn evaluate(v: &FockVector) -> Self {
        Self {
            xi_cat: xi_cat(v),
            xi_cps: xi_cps(v),
            xi_gkp: xi_gkp(v, GKP_CONVENTION),
        }
    }
}

/// `min_lambda <(x^2/lambda^2 - 1)^2> = 1 - <x^2>^2/<x^4>`.
pub fn xi_cat(v: &FockVector) -> MetricResult {
    let m = quadrature_moments(v, 0.0, &[2, 4]);
    MetricResult {
        value: (1.0 - m[0] * m[0] / m[1]).max(0.0),
        lambda: (m[1] / m[0]).sqrt(),
        offset: None,
        phases: None,
        convention: Convention::Hbar2,
    }
}

/// Grid scan on a log scale followed by golden-section refinement around the best point.
fn minimize_log(f: impl Fn(f64) -> f64, range: (f64, f64)) -> (f64, f64) {
    let (la, lb) = (range.0.ln(), range.1.ln());
    let xs: Vec<f64> = (0..=GRID_POINTS)
        .map(|i| (la + (lb - la) * i as f64 / GRID_POINTS as f64).exp())
        .collect();
    let (ib, _) =
        xs.iter()
            .map(|&x| f(x))
            .enumerate()
            .fold(
                (0, f64::INFINITY),
                |(bi, bv), (i, v)| if v < bv { (i, v) } else { (bi, bv) },
            );
    let a = xs[ib.saturating_sub(1)];
    let b = xs[(ib + 1).min(GRID_POINTS)];
    match golden_section(&f, a, b, LAMBDA_TOL) {
        Some((x, fx)) if fx <= f(xs[ib]) => (x, fx),
        _ => (xs[ib], f(xs[ib])),
    }
}

fn dot(u: &[Complex64], v: &[Complex64]) -> Complex64 {
    u.iter().zip(v).map(|(a, b)| a.conj() * b).sum()
}

/// `min_{lambda, d} <(lambda p - x^2/(sqrt(2) lambda^2) - d)^2>` with `hbar = 1` quadratures.
pub fn xi_cps(v: &FockVector) -> MetricResult {
    let v = v.normalized();
    let len = v.amps.len() + 2;
    let base = v.padded(len);
    let s = Convention::Hbar1.scale();
    let xv = apply_quadrature(&v.amps, 0.0);
    let mut x2v = apply_quadrature(&xv, 0.0);
    let mut pv = apply_quadrature(&v.amps, PI / 2.0);
    x2v.resize(len, Complex64::new(0.0, 0.0));
    pv.resize(len, Complex64::new(0.0, 0.0));
    let op = |lam: f64| -> (f64, f64) {
        let a = lam * s;
        let b = -s * s / (SQRT_2 * lam * lam);
        let ov: Vec<Complex64> = pv.iter().zip(&x2v).map(|(p, x2)| p * a + x2 * b).collect();
        let mean = dot(&base, &ov).re;
        (dot(&ov, &ov).re - mean * mean, mean)
    };
    let (lambda, value) = minimize_log(|l| op(l).0, CPS_RANGE);
    MetricResult {
        value: value.max(0.0),
        lambda,
        offset: Some(op(lambda).1),
        phases: None,
        convention: Convention::Hbar1,
    }
}

/// Density of the rotated quadrature `x cos(phi) + p sin(phi)` on a uniform grid.
fn quadrature_density(v: &FockVector, phi: f64) -> (Vec<f64>, Vec<f64>) {
    let v = v.normalized();
    let c = v.amps.len();
    let half = (4.0 * c as f64 + 2.0).sqrt() + 10.0;
    let steps = (2.0 * half / DENSITY_STEP).ceil() as usize;
    let h = 2.0 * half / steps as f64;
    // e^{-i phi n} maps the rotated quadrature onto x
    let amps: Vec<Complex64> = v
        .amps
        .iter()
        .enumerate()
        .map(|(n, a)| a * Complex64::from_polar(1.0, -phi * n as f64))
        .collect();
    let xs: Vec<f64> = (0..=steps).map(|i| -half + h * i as f64).collect();
    let rho = xs
        .iter()
        .map(|&x| {
            let psi: Complex64 = hermite_functions(c, x)
                .iter()
                .zip(&amps)
                .map(|(f, a)| a * *f)
                .sum();
            psi.norm_sqr() * h
        })
        .collect();
    (xs, rho)
}

/// `<e^{i u x_phi}>` for each `u`, with `hbar = 2` quadratures.
pub fn characteristic(v: &FockVector, phi: f64, us: &[f64]) -> Vec<Complex64> {
    let (xs, rho) = quadrature_density(v, phi);
    us.iter().map(|&u| fourier(&xs, &rho, u)).collect()
}

fn fourier(xs: &[f64], rho: &[f64], u: f64) -> Complex64 {
    xs.iter()
        .zip(rho)
        .map(|(&x, &r)| Complex64::from_polar(r, u * x))
        .sum()
}

/// `min <2 cos^2(lambda sqrt(pi)/2 x + phi1) + 2 cos^2(sqrt(pi)/(2 lambda) p + phi2)>`.
///
/// The phase minimization is analytic, leaving `2 - |<e^{i u x}>| - |<e^{i w p}>|`
/// with `u = lambda sqrt(pi)`, `w = sqrt(pi)/lambda` in the chosen convention.
pub fn xi_gkp(v: &FockVector, convention: Convention) -> MetricResult {
    let s = convention.scale();
    let sp = PI.sqrt();
    let (xs, rx) = quadrature_density(v, 0.0);
    let (ps, rp) = quadrature_density(v, PI / 2.0);
    let chars = |lam: f64| {
        (
            fourier(&xs, &rx, lam * sp * s),
            fourier(&ps, &rp, sp * s / lam),
        )
    };
    let f = |lam: f64| {
        let (cx, cp) = chars(lam);
        2.0 - cx.norm() - cp.norm()
    };
    let (lambda, value) = minimize_log(f, GKP_RANGE);
    let (cx, cp) = chars(lambda);
    // cos(2 theta) = -1 when 2 phi = pi - arg
    let phase = |c: Complex64| ((PI - c.arg()) / 2.0).rem_euclid(PI);
    MetricResult {
        value: value.max(0.0),
        lambda,
        offset: None,
        phases: Some((phase(cx), phase(cp))),
        convention,
    }
}
