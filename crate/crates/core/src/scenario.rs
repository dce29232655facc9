//! Generator specifications and the standard example circuits.

use serde::{Deserialize, Serialize};

use crate::control::ControlMoments;
use crate::error::{NgError, Result};
use crate::fock::{herald, minimal_purification, success_probability, FockOptions, HeraldResult};
use crate::linalg::*;
use crate::symplectic::{random_generator, GaussianPure, GaussianUnitary};

/// A pure Gaussian state whose trailing modes are measured with the given photon pattern.
///
/// The full state is kept (rather than only the control moments) so that the
/// signal frame of the heralded output is fixed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GeneratorSpec {
    pub state: GaussianPure,
    pub signal_modes: usize,
    pub photons: Vec<usize>,
}

impl GeneratorSpec {
    pub fn new(state: GaussianPure, signal_modes: usize, photons: Vec<usize>) -> Result<Self> {
        if signal_modes + photons.len() != state.modes() {
            return Err(NgError::Shape(format!(
                "{} modes cannot hold {signal_modes} signal and {} control modes",
                state.modes(),
                photons.len()
            )));
        }
        if photons.is_empty() {
            return Err(NgError::Invalid(
                "at least one control mode is required".into(),
            ));
        }
        if !state.is_pure(1e-6) {
            return Err(NgError::Impure(format!(
                "purity defect {:.3e}",
                state.purity_defect()
            )));
        }
        Ok(Self {
            state,
            signal_modes,
            photons,
        })
    }

    pub fn control_modes(&self) -> usize {
        self.photons.len()
    }

    pub fn moments(&self) -> ControlMoments {
        ControlMoments::from_state(&self.state, self.signal_modes)
    }

    pub fn probability(&self, opts: &FockOptions) -> Result<f64> {
        success_probability(&self.moments(), &self.photons, opts)
    }

    pub fn herald(&self, opts: &FockOptions) -> Result<HeraldResult> {
        herald(&self.state, self.signal_modes, &self.photons, opts)
    }

    pub fn with_state(&self, state: GaussianPure) -> Self {
        Self {
            state,
            signal_modes: self.signal_modes,
            photons: self.photons.clone(),
        }
    }

    /// Generator given only by control moments, realized by the minimal purification.
    pub fn from_moments(m: &ControlMoments, photons: Vec<usize>) -> Result<Self> {
        let (g, r) = minimal_purification(m)?;
        if r == 0 {
            return Err(NgError::Invalid(
                "control moments describe a pure state".into(),
            ));
        }
        Self::new(g, r, photons)
    }
}

/// Squeezing in dB to the squeezing parameter.
pub fn db_to_r(db: f64) -> f64 {
    db * std::f64::consts::LN_10 / 20.0
}

fn passive(o: &Mat) -> GaussianUnitary {
    let n = o.nrows();
    GaussianUnitary {
        symplectic: o.kronecker(&Mat::identity(2, 2)),
        displacement: Vect::zeros(2 * n),
    }
}

fn squeezed_pair(r1_db: f64, r2_db: f64) -> GaussianPure {
    let s = GaussianUnitary::squeezer(db_to_r(r1_db))
        .tensor(&GaussianUnitary::squeezer(db_to_r(r2_db)));
    GaussianPure::vacuum(2)
        .apply_unitary(&s, &[0, 1])
        .expect("two-mode unitary")
}

/// Phase `e^{i pi n / 2}` on the signal output, orienting cat and cubic-phase features along `x`.
fn output_frame(g: GaussianPure) -> Result<GaussianPure> {
    g.apply_unitary(
        &GaussianUnitary::rotation(-std::f64::consts::FRAC_PI_2),
        &[0],
    )
}

fn cat_state(r1_db: f64, r2_db: f64, reflectance: f64) -> Result<GaussianPure> {
    if !(0.0..=1.0).contains(&reflectance) {
        return Err(NgError::Invalid(format!(
            "reflectance {reflectance} outside [0, 1]"
        )));
    }
    let (s, t) = (reflectance.sqrt(), (1.0 - reflectance).sqrt());
    let mix = passive(&Mat::from_row_slice(2, 2, &[-s, t, t, s]));
    squeezed_pair(r1_db, r2_db).apply_unitary(&mix, &[0, 1])
}

/// Two squeezed modes mixed on a beamsplitter; mode 0 is the signal.
pub fn cat_generator(r1_db: f64, r2_db: f64, reflectance: f64, n: usize) -> Result<GeneratorSpec> {
    GeneratorSpec::new(
        output_frame(cat_state(r1_db, r2_db, reflectance)?)?,
        1,
        vec![n],
    )
}

/// Squeezed modes on a beamsplitter followed by displacements `alpha1` (signal) and `alpha2` (control).
pub fn cps_generator(
    r1_db: f64,
    r2_db: f64,
    reflectance: f64,
    alpha1: f64,
    alpha2: f64,
    n: usize,
) -> Result<GeneratorSpec> {
    if !(0.0..=1.0).contains(&reflectance) {
        return Err(NgError::Invalid(format!(
            "reflectance {reflectance} outside [0, 1]"
        )));
    }
    let g = squeezed_pair(r1_db, r2_db)
        .apply_unitary(&GaussianUnitary::beamsplitter(reflectance), &[0, 1])?
        .apply_unitary(
            &GaussianUnitary::displacement(&Vect::from_vec(vec![
                2.0 * alpha1,
                0.0,
                2.0 * alpha2,
                0.0,
            ])),
            &[0, 1],
        )?;
    GeneratorSpec::new(output_frame(g)?, 1, vec![n])
}

/// Orthogonal matrix whose first row is the uniform average.
fn helmert(k: usize) -> Mat {
    let mut o = Mat::zeros(k, k);
    for j in 0..k {
        o[(0, j)] = 1.0 / (k as f64).sqrt();
    }
    for i in 1..k {
        let nrm = ((i * (i + 1)) as f64).sqrt();
        for j in 0..i {
            o[(i, j)] = 1.0 / nrm;
        }
        o[(i, i)] = -(i as f64) / nrm;
    }
    o
}

/// Breeding of `copies` cat generators with `x = 0` conditioning moved into the Gaussian stage.
///
/// The signals are combined so that the output wavefunction is the product of
/// the cat wavefunctions at a common rescaled argument. Modes of the result are
/// (signal, control_1, .., control_copies).
pub fn gkp_breeding_generator(
    r_db: f64,
    reflectance: f64,
    copies: usize,
    n: usize,
) -> Result<GeneratorSpec> {
    if copies < 2 {
        return Err(NgError::Invalid("breeding needs at least two cats".into()));
    }
    let cat = cat_state(r_db, -r_db, reflectance)?;
    let mut g = cat.clone();
    for _ in 1..copies {
        g = g.tensor(&cat);
    }
    let signals: Vec<usize> = (0..copies).map(|i| 2 * i).collect();
    let g = g.apply_unitary(&passive(&helmert(copies)), &signals)?;
    let g = g.condition_x(&signals[1..], &vec![0.0; copies - 1])?;
    GeneratorSpec::new(g, 1, vec![n; copies])
}

/// Random generator `D(d) W S(r) V |0>` with `l` signal and `k` control modes.
pub fn random_spec(
    l: usize,
    k: usize,
    r_max: f64,
    d_max: f64,
    seed: u64,
    photons: Vec<usize>,
) -> Result<GeneratorSpec> {
    if photons.len() != k {
        return Err(NgError::Shape("one photon number per control mode".into()));
    }
    GeneratorSpec::new(random_generator(l, k, r_max, d_max, seed), l, photons)
}

pub fn cat_odd() -> GeneratorSpec {
    cat_generator(5.0, -5.0, 0.1, 15).expect("valid circuit")
}

pub fn cat_even() -> GeneratorSpec {
    cat_generator(5.0, -5.0, 0.1, 16).expect("valid circuit")
}

pub fn cps() -> GeneratorSpec {
    cps_generator(5.0, -5.0, 0.5, 3.40, 1.00, 20).expect("valid circuit")
}

pub fn gkp() -> GeneratorSpec {
    gkp_breeding_generator(8.0, 0.137, 3, 18).expect("valid circuit")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cat_control_block() {
        let m = cat_odd().moments();
        assert!((m.c[(0, 0)] - 0.60).abs() < 0.01, "{}", m.c);
        assert!((m.c[(1, 1)] - 2.88).abs() < 0.01);
        assert!(m.c[(0, 1)].abs() < 1e-12);
    }

    #[test]
    fn cps_control_block() {
        let m = cps().moments();
        assert!((m.c[(0, 0)] - 1.74).abs() < 0.01 && (m.c[(1, 1)] - 1.74).abs() < 0.01);
        assert!((m.beta[0] - 2.0).abs() < 1e-12 && m.beta[1].abs() < 1e-12);
    }

    #[test]
    fn helmert_is_orthogonal() {
        for k in 2..6 {
            let o = helmert(k);
            assert!(max_abs(&(&o * o.transpose() - Mat::identity(k, k))) < 1e-14);
        }
    }

    #[test]
    fn spec_validation() {
        let g = GaussianPure::vacuum(2);
        assert!(GeneratorSpec::new(g.clone(), 1, vec![1, 2]).is_err());
        assert!(GeneratorSpec::new(g, 1, vec![1]).is_ok());
    }
}
