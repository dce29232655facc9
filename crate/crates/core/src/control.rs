//! Control-mode representation: control moments, non-Gaussian control parameters,
//! rotation and damping transformations, regime classification and convertibility.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{NgError, Result};
use crate::linalg::*;
use crate::maps::{apply_map, damping_choi, vacuum_projection_choi, Damping};
use crate::symplectic::{check_uncertainty, williamson, GaussianPure};

/// Covariance block `C` and mean `beta` of the control modes.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ControlMoments {
    pub c: Mat,
    pub beta: Vect,
}

impl ControlMoments {
    pub fn new(c: Mat, beta: Vect) -> Result<Self> {
        let k = check_square_even(&c)?;
        if beta.len() != 2 * k {
            return Err(NgError::Shape("beta length".into()));
        }
        if !check_uncertainty(&c)? {
            return Err(NgError::Unphysical("C violates C >= i Omega".into()));
        }
        Ok(Self {
            c: symmetrize(&c),
            beta,
        })
    }

    /// Control block of `g`, whose first `l` modes are signal modes.
    pub fn from_state(g: &GaussianPure, l: usize) -> Self {
        let ctl: Vec<usize> = (l..g.modes()).collect();
        let (c, beta) = g.reduced(&ctl);
        Self { c, beta }
    }

    pub fn modes(&self) -> usize {
        self.c.nrows() / 2
    }

    /// Diagonal block of control mode `m`.
    pub fn block(&self, m: usize) -> (Mat, Vect) {
        let idx = [2 * m, 2 * m + 1];
        (submatrix(&self.c, &idx, &idx), subvector(&self.beta, &idx))
    }

    /// Minimal pure state with these control moments: one signal mode per control
    /// mode (signal modes first), paired with the control Williamson modes.
    pub fn purify(&self) -> Result<GaussianPure> {
        let k = self.modes();
        let w = williamson(&self.c)?;
        let mut cov = Mat::zeros(4 * k, 4 * k);
        let mut cross = Mat::zeros(2 * k, 2 * k);
        for (j, &nu) in w.eigenvalues.iter().enumerate() {
            let nu = nu.max(1.0);
            let s = (nu * nu - 1.0).sqrt();
            cov[(2 * j, 2 * j)] = nu;
            cov[(2 * j + 1, 2 * j + 1)] = nu;
            cross[(2 * j, 2 * j)] = s;
            cross[(2 * j + 1, 2 * j + 1)] = -s;
        }
        let b = &w.symplectic * cross;
        cov.view_mut((2 * k, 0), (2 * k, 2 * k)).copy_from(&b);
        cov.view_mut((0, 2 * k), (2 * k, 2 * k))
            .copy_from(&b.transpose());
        cov.view_mut((2 * k, 2 * k), (2 * k, 2 * k))
            .copy_from(&self.c);
        Ok(GaussianPure {
            cov,
            mean: concat(&Vect::zeros(2 * k), &self.beta),
        })
    }
}

/// `(s0, delta0)` of one control mode.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeParams {
    pub s0: f64,
    pub delta0: Complex64,
    /// False when `cd = 1` and the parameters do not exist.
    pub defined: bool,
}

/// Canonical sign of `delta0`: first nonzero of (re, im) is non-negative.
pub fn canonical_delta(d: Complex64) -> Complex64 {
    const EPS: f64 = 1e-12;
    if d.re < -EPS || (d.re.abs() <= EPS && d.im < -EPS) {
        -d
    } else {
        d
    }
}

/// Eigen-decomposition `C = O^T diag(c, d) O`, `c >= d`, `O` a rotation.
fn principal_axes(cm: &Mat) -> (f64, f64, Mat) {
    let (w, v) = sym_eig(cm);
    let (d, c) = (w[0], w[1]);
    let mut o = Mat::from_row_slice(2, 2, &[v[(0, 1)], v[(1, 1)], v[(0, 0)], v[(1, 0)]]);
    if o.determinant() < 0.0 {
        o.row_mut(1).neg_mut();
    }
    (c, d, o)
}

/// Non-Gaussian control parameters of a single control mode.
///
/// `delta0` is given in the convention in which the output state is
/// `(a^dag + s0 a + delta0)^n |0>` up to a Gaussian unitary. For a phase-symmetric
/// block (`c = d`) the phase of `delta0` is free and is fixed to be imaginary.
pub fn control_params_single(cm: &Mat, beta: &Vect) -> Result<(f64, Complex64)> {
    if cm.shape() != (2, 2) || beta.len() != 2 {
        return Err(NgError::Shape("single-mode control block".into()));
    }
    let (c, d, o) = principal_axes(cm);
    let cd1 = c * d - 1.0;
    if cd1 <= 1e-12 {
        return Err(NgError::Undefined);
    }
    let s0 = ((c - d) / cd1).max(0.0);
    let bb = &o * beta;
    let r = cd1.sqrt();
    let delta = Complex64::new(
        ((d + 1.0) / (c + 1.0)).sqrt() * bb[0] / r,
        ((c + 1.0) / (d + 1.0)).sqrt() * bb[1] / r,
    );
    if (c - d).abs() <= 1e-9 * c {
        return Ok((0.0, Complex64::new(0.0, delta.norm())));
    }
    Ok((s0, canonical_delta(delta)))
}

/// Per-mode parameters from the diagonal blocks of `C` and `beta`.
pub fn control_params_multi(m: &ControlMoments) -> Vec<ModeParams> {
    (0..m.modes())
        .map(|j| {
            let (cm, bm) = m.block(j);
            match control_params_single(&cm, &bm) {
                Ok((s0, delta0)) => ModeParams {
                    s0,
                    delta0,
                    defined: true,
                },
                Err(_) => ModeParams {
                    s0: 0.0,
                    delta0: Complex64::new(0.0, 0.0),
                    defined: false,
                },
            }
        })
        .collect()
}

/// Control moments of mode `m` after projecting every other control mode onto vacuum.
pub fn project_others_to_vacuum(m: &ControlMoments, mode: usize) -> Result<(Mat, Vect)> {
    let mut c = m.c.clone();
    let mut beta = m.beta.clone();
    let mut remaining: Vec<usize> = (0..m.modes()).collect();
    while remaining.len() > 1 {
        let pos = remaining.iter().position(|&r| r != mode).unwrap();
        let (c2, b2) = apply_map(&c, &beta, &vacuum_projection_choi(), &[pos])?;
        c = c2;
        beta = b2;
        remaining.remove(pos);
    }
    Ok((c, beta))
}

/// Parameters of mode `m` that are unchanged by damping on the other control modes.
pub fn invariant_control_params(m: &ControlMoments, mode: usize) -> Result<(f64, Complex64)> {
    let (c, b) = project_others_to_vacuum(m, mode)?;
    control_params_single(&c, &b)
}

/// Same as [`invariant_control_params`], taking the generator state directly.
pub fn invariant_control_params_state(
    g: &GaussianPure,
    l: usize,
    mode: usize,
) -> Result<(f64, Complex64)> {
    invariant_control_params(&ControlMoments::from_state(g, l), mode)
}

fn block_rotation(theta: &[f64]) -> Mat {
    let k = theta.len();
    let mut o = Mat::zeros(2 * k, 2 * k);
    for (m, &t) in theta.iter().enumerate() {
        let (s, c) = t.sin_cos();
        o[(2 * m, 2 * m)] = c;
        o[(2 * m, 2 * m + 1)] = s;
        o[(2 * m + 1, 2 * m)] = -s;
        o[(2 * m + 1, 2 * m + 1)] = c;
    }
    o
}

/// `C' = O C O^T`, `beta' = O beta` with per-mode rotations.
pub fn rotation_transform(m: &ControlMoments, theta: &[f64]) -> Result<ControlMoments> {
    if theta.len() != m.modes() {
        return Err(NgError::Shape("one angle per control mode".into()));
    }
    let o = block_rotation(theta);
    Ok(ControlMoments {
        c: symmetrize(&(&o * &m.c * o.transpose())),
        beta: &o * &m.beta,
    })
}

/// Control moments after inserting `exp(-lambda_m n_m)` before detection.
pub fn damping_transform(m: &ControlMoments, t: &[Damping]) -> Result<ControlMoments> {
    if t.len() != m.modes() {
        return Err(NgError::Shape(
            "one damping parameter per control mode".into(),
        ));
    }
    if !damping_domain_check(&m.c, t) {
        return Err(NgError::Infeasible(
            "damping outside the physical domain".into(),
        ));
    }
    let targets: Vec<usize> = (0..m.modes()).collect();
    let (c, beta) = apply_map(&m.c, &m.beta, &damping_choi(t)?, &targets)?;
    Ok(ControlMoments { c, beta })
}

/// True iff every `|t_m| > 1` and the damped `C` is positive definite and physical.
pub fn damping_domain_check(c: &Mat, t: &[Damping]) -> bool {
    let Ok(map) = damping_choi(t) else {
        return false;
    };
    let targets: Vec<usize> = (0..t.len()).collect();
    match apply_map(c, &Vect::zeros(c.nrows()), &map, &targets) {
        Ok((c2, _)) => sym_eig(&c2).0[0] > 0.0,
        Err(_) => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Regime {
    Subtracted,
    Added,
    Critical,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegimeReport {
    pub regime: Regime,
    /// `s0 = 0` and `delta0 = 0`.
    pub fock: bool,
    pub cat_parity: Option<Parity>,
    pub cat_amplitude: Option<f64>,
    pub cps_p0: Option<f64>,
    pub cps_gamma: Option<f64>,
}

pub fn classify(s0: f64, delta0: Complex64, n: usize) -> RegimeReport {
    let regime = if (s0 - 1.0).abs() <= 1e-9 {
        Regime::Critical
    } else if s0 > 1.0 {
        Regime::Subtracted
    } else {
        Regime::Added
    };
    let nh = n as f64 + 0.5;
    let zero_delta = delta0.norm() <= 1e-12;
    let cat = zero_delta && s0 >= 1.0 - 1e-9;
    let cps = s0 == 0.0 && !zero_delta;
    RegimeReport {
        regime,
        fock: s0 == 0.0 && zero_delta,
        cat_parity: cat.then(|| {
            if n.is_multiple_of(2) {
                Parity::Even
            } else {
                Parity::Odd
            }
        }),
        cat_amplitude: cat.then(|| (nh / s0).sqrt()),
        cps_p0: cps.then(|| 2.0 * nh.sqrt()),
        cps_gamma: cps.then(|| 1.0 / (24.0 * nh.sqrt())),
    }
}

/// Gaussian-map convertibility in moment form: `C' <= C` and `beta - beta'` in the range of `C - C'`.
pub fn convertible(a: &ControlMoments, b: &ControlMoments) -> bool {
    if a.c.shape() != b.c.shape() {
        return false;
    }
    let diff = &a.c - &b.c;
    let (w, _) = sym_eig(&diff);
    if w[0] < -1e-9 {
        return false;
    }
    let db = &a.beta - &b.beta;
    let nb = db.norm();
    if nb <= 1e-12 {
        return true;
    }
    let svd = diff.svd(true, false);
    let u = svd.u.unwrap();
    let smax = svd.singular_values.max();
    let mut proj = Vect::zeros(db.len());
    for (i, &s) in svd.singular_values.iter().enumerate() {
        if s > 1e-9 * smax.max(1e-300) {
            let col = u.column(i);
            proj += col * col.dot(&db);
        }
    }
    (db - proj).norm() < 1e-8 * nb
}

/// Convertibility by a Gaussian map between states with equal photon number `n >= 2`.
pub fn convertible_params(
    s0: f64,
    delta0: Complex64,
    s0p: f64,
    delta0p: Complex64,
    _n: usize,
) -> bool {
    const TOL: f64 = 1e-9;
    let same = (s0 - s0p).abs() <= TOL
        && ((delta0 - delta0p).norm() <= TOL || (delta0 + delta0p).norm() <= TOL);
    same || (0.0..1.0).contains(&s0)
        || s0p > s0
        || ((s0 - 1.0).abs() <= TOL && (s0p - 1.0).abs() <= TOL && delta0.re.abs() <= TOL)
}
