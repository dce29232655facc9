use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use ngopt_core::control::ControlMoments;
use ngopt_core::linalg::{Mat, Vect};
use ngopt_core::optimizer::{auto_target, regime_target};
use ngopt_core::scenario::{self, GeneratorSpec};
use ngopt_core::symplectic::GaussianPure;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    CatOdd,
    CatEven,
    Cps,
    Gkp,
    Random,
    Custom,
}

/// Requested photon pattern after reduction.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Target {
    Explicit(Vec<usize>),
    /// Halve every photon count.
    Auto,
    /// Halve only modes in the subtracted regime.
    Regime,
}

impl std::str::FromStr for Target {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "auto" => Ok(Target::Auto),
            "regime" => Ok(Target::Regime),
            _ => s
                .split(',')
                .map(|t| {
                    t.trim()
                        .parse::<usize>()
                        .map_err(|e| format!("bad photon number {t:?}: {e}"))
                })
                .collect::<Result<Vec<_>, _>>()
                .map(Target::Explicit),
        }
    }
}

impl Target {
    pub fn resolve(&self, spec: &GeneratorSpec) -> anyhow::Result<Vec<usize>> {
        Ok(match self {
            Target::Explicit(v) => v.clone(),
            Target::Auto => auto_target(&spec.photons),
            Target::Regime => regime_target(spec)?,
        })
    }
}

/// Quadrature ordering of user-supplied matrices.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Ordering {
    /// `(x_1, .., x_n, p_1, .., p_n)`
    #[default]
    Block,
    /// `(x_1, p_1, .., x_n, p_n)`
    Interleaved,
}

/// A generator read from JSON, either as a full pure state or as control moments.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CustomInput {
    #[serde(default)]
    pub ordering: Ordering,
    pub photons: Vec<usize>,
    #[serde(default)]
    pub signal_modes: Option<usize>,
    #[serde(default)]
    pub covariance: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub mean: Option<Vec<f64>>,
    #[serde(default)]
    pub control_covariance: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub control_mean: Option<Vec<f64>>,
}

fn to_mat(rows: &[Vec<f64>]) -> anyhow::Result<Mat> {
    let n = rows.len();
    if rows.iter().any(|r| r.len() != n) {
        bail!("matrix must be square");
    }
    Ok(Mat::from_fn(n, n, |i, j| rows[i][j]))
}

/// Index map from interleaved to block positions.
fn interleave(n_modes: usize, ordering: Ordering) -> Vec<usize> {
    (0..2 * n_modes)
        .map(|i| match ordering {
            Ordering::Interleaved => i,
            Ordering::Block => (i / 2) + (i % 2) * n_modes,
        })
        .collect()
}

fn reorder(c: &Mat, beta: &Vect, ordering: Ordering) -> anyhow::Result<(Mat, Vect)> {
    if !c.nrows().is_multiple_of(2) || beta.len() != c.nrows() {
        bail!(
            "covariance of size {} and mean of size {} do not describe modes",
            c.nrows(),
            beta.len()
        );
    }
    let idx = interleave(c.nrows() / 2, ordering);
    Ok((
        Mat::from_fn(c.nrows(), c.ncols(), |i, j| c[(idx[i], idx[j])]),
        Vect::from_fn(beta.len(), |i, _| beta[idx[i]]),
    ))
}

impl CustomInput {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
    }

    pub fn build(&self) -> anyhow::Result<GeneratorSpec> {
        match (&self.covariance, &self.control_covariance) {
            (Some(cov), None) => {
                let c = to_mat(cov)?;
                let mean =
                    Vect::from_vec(self.mean.clone().unwrap_or_else(|| vec![0.0; c.nrows()]));
                let (c, mean) = reorder(&c, &mean, self.ordering)?;
                let g = GaussianPure::new(c, mean)?;
                let l = match self.signal_modes {
                    Some(l) => l,
                    None => g
                        .modes()
                        .checked_sub(self.photons.len())
                        .context("more photons than modes")?,
                };
                Ok(GeneratorSpec::new(g, l, self.photons.clone())?)
            }
            (None, Some(cc)) => {
                let c = to_mat(cc)?;
                let beta = Vect::from_vec(
                    self.control_mean
                        .clone()
                        .unwrap_or_else(|| vec![0.0; c.nrows()]),
                );
                let (c, beta) = reorder(&c, &beta, self.ordering)?;
                Ok(GeneratorSpec::from_moments(
                    &ControlMoments::new(c, beta)?,
                    self.photons.clone(),
                )?)
            }
            _ => bail!("give exactly one of `covariance` and `control_covariance`"),
        }
    }
}

/// Everything needed to rebuild a run; echoed as `params.json`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RunParams {
    pub scenario: Scenario,
    pub target: Option<Target>,
    pub resolved_target: Vec<usize>,
    pub photons: Vec<usize>,
    pub cutoff: Option<usize>,
    pub tail_tol: f64,
    pub seed: u64,
    pub jobs: Option<usize>,
    pub gkp_convention: ngopt_core::metrics::Convention,
    pub circuit: serde_json::Value,
    pub input: Option<PathBuf>,
    pub notes: Vec<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RandomShape {
    pub signal_modes: usize,
    pub control_modes: usize,
    pub photons: usize,
    pub r_max: f64,
    pub d_max: f64,
}

impl Default for RandomShape {
    fn default() -> Self {
        Self {
            signal_modes: 1,
            control_modes: 2,
            photons: 6,
            r_max: 1.0,
            d_max: 0.5,
        }
    }
}

/// Builds the generator, its default target, circuit description and notes.
pub fn build(
    which: Scenario,
    seed: u64,
    random: &RandomShape,
    input: Option<&Path>,
) -> anyhow::Result<(GeneratorSpec, Target, serde_json::Value, Vec<String>)> {
    use serde_json::json;
    Ok(match which {
        Scenario::CatOdd => (
            scenario::cat_odd(),
            Target::Explicit(vec![5]),
            json!({"r1_db": 5.0, "r2_db": -5.0, "reflectance": 0.1, "n": 15}),
            vec![],
        ),
        Scenario::CatEven => (
            scenario::cat_even(),
            Target::Explicit(vec![6]),
            json!({"r1_db": 5.0, "r2_db": -5.0, "reflectance": 0.1, "n": 16}),
            vec![],
        ),
        Scenario::Cps => (
            scenario::cps(),
            Target::Explicit(vec![7]),
            json!({"r1_db": 5.0, "r2_db": -5.0, "reflectance": 0.5, "alpha1": 3.40, "alpha2": 1.00, "n": 20}),
            vec![],
        ),
        Scenario::Gkp => (
            scenario::gkp(),
            Target::Explicit(vec![6, 6, 6]),
            json!({"r_db": 8.0, "reflectance": 0.137, "copies": 3, "n": 18}),
            vec![
                "pattern 18 -> 6 per cat gives p 1.74e-12 -> 1.44e-4".into(),
                "a 20 -> 7 pattern starts from a different original probability".into(),
            ],
        ),
        Scenario::Random => (
            scenario::random_spec(
                random.signal_modes,
                random.control_modes,
                random.r_max,
                random.d_max,
                seed,
                vec![random.photons; random.control_modes],
            )?,
            Target::Auto,
            serde_json::to_value(random)?,
            vec![],
        ),
        Scenario::Custom => {
            let path = input.context("the custom scenario needs --input FILE")?;
            let inp = CustomInput::load(path)?;
            (inp.build()?, Target::Auto, serde_json::to_value(&inp)?, vec![])
        }
    })
}
