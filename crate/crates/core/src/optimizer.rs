//! Two-step generator optimization: photon-number reduction, then damping search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::control::{
    control_params_multi, control_params_single, damping_domain_check, invariant_control_params,
    ModeParams,
};
use crate::error::{NgError, Result};
use crate::fock::{heralded_fidelity, FockOptions};
use crate::linalg::*;
use crate::maps::{apply_map, damping_choi, Damping};
use crate::metrics::MetricSet;
use crate::reduce::{apply_reduction_state, plan_for_mode, ReductionPlan};
use crate::scenario::GeneratorSpec;
use crate::solve::nelder_mead;
use crate::symplectic::GaussianPure;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizeOptions {
    pub fock: FockOptions,
    /// Random restarts of the damping search besides the default start.
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: u64,
    /// Starting `lambda` of every mode (`t = coth(lambda)`).
    pub lambda_start: f64,
    /// Compute the squeezing metrics of single-mode outputs.
    pub metrics: bool,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            fock: FockOptions::default(),
            restarts: 5,
            seed: 0,
            max_iters: 600,
            lambda_start: 0.1,
            metrics: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DampingResult {
    pub spec: GeneratorSpec,
    pub damping: Vec<Damping>,
    pub probability_start: f64,
    pub probability: f64,
}

/// Per-mode control parameters: raw diagonal-block values and the damping-invariant ones.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModeSummary {
    pub block: ModeParams,
    pub invariant: Option<ModeParams>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimizationReport {
    pub before: GeneratorSpec,
    pub intermediate: GeneratorSpec,
    pub after: GeneratorSpec,
    pub probability_before: f64,
    pub probability_intermediate: f64,
    pub probability_after: f64,
    /// Fidelity between the heralded outputs of `before` and `after`.
    pub fidelity: f64,
    /// Fidelity between the heralded outputs of `intermediate` and `after`.
    pub fidelity_damping: f64,
    pub modes_before: Vec<ModeSummary>,
    pub modes_after: Vec<ModeSummary>,
    pub plans: Vec<ReductionPlan>,
    pub damping: Vec<Damping>,
    pub metrics_before: Option<MetricSet>,
    pub metrics_after: Option<MetricSet>,
}

impl OptimizationReport {
    pub fn gain(&self) -> f64 {
        self.probability_after / self.probability_before
    }
}

pub fn mode_summaries(spec: &GeneratorSpec) -> Vec<ModeSummary> {
    let m = spec.moments();
    control_params_multi(&m)
        .into_iter()
        .enumerate()
        .map(|(j, block)| ModeSummary {
            block,
            invariant: invariant_control_params(&m, j)
                .ok()
                .map(|(s0, delta0)| ModeParams {
                    s0,
                    delta0,
                    defined: true,
                }),
        })
        .collect()
}

/// Reduces the detected photon numbers mode by mode, in ascending mode order.
pub fn reduce_photons(
    spec: &GeneratorSpec,
    target: &[usize],
) -> Result<(GeneratorSpec, Vec<ReductionPlan>)> {
    if target.len() != spec.control_modes() {
        return Err(NgError::Shape(format!(
            "target has {} entries for {} control modes",
            target.len(),
            spec.control_modes()
        )));
    }
    if let Some(m) = (0..target.len()).find(|&m| target[m] > spec.photons[m]) {
        return Err(NgError::Invalid(format!(
            "target {} exceeds {} photons on mode {m}",
            target[m], spec.photons[m]
        )));
    }
    let mut state = spec.state.clone();
    let mut photons = spec.photons.clone();
    let mut plans = Vec::with_capacity(target.len());
    for m in 0..target.len() {
        let cur = GeneratorSpec::new(state.clone(), spec.signal_modes, photons.clone())?;
        let plan = plan_for_mode(&cur.moments(), m, photons[m], target[m])
            .map_err(|e| NgError::Infeasible(format!("mode {m}: {e}")))?;
        if !plan.is_identity() {
            state = apply_reduction_state(&state, spec.signal_modes, m, &plan)
                .map_err(|e| NgError::Infeasible(format!("mode {m}: {e}")))?;
        }
        photons[m] = target[m];
        plans.push(plan);
    }
    Ok((
        GeneratorSpec::new(state, spec.signal_modes, photons)?,
        plans,
    ))
}

/// Generator state after `exp(-lambda_m n_m)` on each control mode.
pub fn damp_state(spec: &GeneratorSpec, t: &[Damping]) -> Result<GaussianPure> {
    let l = spec.signal_modes;
    let controls: Vec<usize> = (l..l + t.len()).collect();
    let c = submatrix(
        &spec.state.cov,
        &quad_indices(&controls),
        &quad_indices(&controls),
    );
    if !damping_domain_check(&c, t) {
        return Err(NgError::Infeasible(
            "damping outside the physical domain".into(),
        ));
    }
    let (cov, mean) = apply_map(
        &spec.state.cov,
        &spec.state.mean,
        &damping_choi(t)?,
        &controls,
    )?;
    GaussianPure::new(symmetrize(&cov), mean)
}

fn damped_probability(
    spec: &GeneratorSpec,
    lambdas: &[f64],
    opts: &FockOptions,
) -> Option<(GeneratorSpec, f64)> {
    let t: Vec<Damping> = lambdas.iter().map(|&l| Damping::from_lambda(l)).collect();
    let g = damp_state(spec, &t).ok()?;
    let s = spec.with_state(g);
    let p = s.probability(opts).ok()?;
    (p.is_finite() && p > 0.0).then_some((s, p))
}

/// Maximizes the success probability over the damping orbit by simplex descent on `-ln p`.
pub fn maximize_probability(spec: &GeneratorSpec, opts: &OptimizeOptions) -> Result<DampingResult> {
    let k = spec.control_modes();
    let p0 = spec.probability(&opts.fock)?;
    let cost = |x: &[f64]| match damped_probability(spec, x, &opts.fock) {
        Some((_, p)) => -p.ln(),
        None => f64::MAX,
    };
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut starts = vec![vec![opts.lambda_start; k]];
    for _ in 0..opts.restarts {
        // reject starts outside the domain
        for _ in 0..50 {
            let x: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..2.0)).collect();
            if cost(&x) < f64::MAX {
                starts.push(x);
                break;
            }
        }
    }
    let runs: Vec<(Vec<f64>, f64)> = starts
        .par_iter()
        .map(|x0| nelder_mead(cost, x0, 0.3, 1e-10, opts.max_iters))
        .collect();
    let (mut best, mut best_cost) = runs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .unwrap_or((vec![0.0; k], f64::MAX));
    if best_cost >= -p0.ln() {
        // coordinate sweep fallback
        let grid: Vec<f64> = (0..=60).map(|i| -2.0 + 0.1 * i as f64).collect();
        let mut x = vec![0.0; k];
        let mut fx = -p0.ln();
        for m in 0..k {
            for &g in &grid {
                let mut y = x.clone();
                y[m] = g;
                let fy = cost(&y);
                if fy < fx {
                    x = y;
                    fx = fy;
                }
            }
        }
        best = x;
        best_cost = fx;
    }
    match damped_probability(spec, &best, &opts.fock) {
        Some((s, p)) if best_cost < -p0.ln() && p >= p0 => Ok(DampingResult {
            spec: s,
            damping: best.iter().map(|&l| Damping::from_lambda(l)).collect(),
            probability_start: p0,
            probability: p,
        }),
        _ => Ok(DampingResult {
            spec: spec.clone(),
            damping: vec![Damping::Identity; k],
            probability_start: p0,
            probability: p0,
        }),
    }
}

fn metrics_of(spec: &GeneratorSpec, opts: &FockOptions) -> Option<MetricSet> {
    if spec.signal_modes != 1 {
        return None;
    }
    let v = spec.herald(opts).ok()?.signal.to_vector().ok()?;
    Some(MetricSet::evaluate(&v))
}

/// Photon reduction to `target` followed by the damping search.
pub fn optimize(
    spec: &GeneratorSpec,
    target: &[usize],
    opts: &OptimizeOptions,
) -> Result<OptimizationReport> {
    let (intermediate, plans) = reduce_photons(spec, target)?;
    let damped = maximize_probability(&intermediate, opts)?;
    let after = damped.spec;
    let l = spec.signal_modes;
    let fidelity = heralded_fidelity(
        &spec.state,
        &spec.photons,
        &after.state,
        &after.photons,
        l,
        &opts.fock,
    )?;
    let fidelity_damping = heralded_fidelity(
        &intermediate.state,
        &intermediate.photons,
        &after.state,
        &after.photons,
        l,
        &opts.fock,
    )?;
    let (metrics_before, metrics_after) = if opts.metrics {
        (metrics_of(spec, &opts.fock), metrics_of(&after, &opts.fock))
    } else {
        (None, None)
    };
    Ok(OptimizationReport {
        probability_before: spec.probability(&opts.fock)?,
        probability_intermediate: damped.probability_start,
        probability_after: damped.probability,
        fidelity,
        fidelity_damping,
        modes_before: mode_summaries(spec),
        modes_after: mode_summaries(&after),
        before: spec.clone(),
        intermediate,
        after,
        plans,
        damping: damped.damping,
        metrics_before,
        metrics_after,
    })
}

/// Default reduced pattern: every photon count halved.
pub fn auto_target(photons: &[usize]) -> Vec<usize> {
    photons.iter().map(|n| n / 2).collect()
}

/// Halves a mode only if it is in the subtracted regime (`s0 > 1`) when its turn comes.
///
/// Modes are visited in the same ascending order as [`reduce_photons`], so the
/// parameters seen here are the ones the reduction will use.
pub fn regime_target(spec: &GeneratorSpec) -> Result<Vec<usize>> {
    let mut cur = spec.clone();
    let mut target = spec.photons.clone();
    for m in 0..spec.control_modes() {
        let (cm, bm) = cur.moments().block(m);
        let subtracted = matches!(control_params_single(&cm, &bm), Ok((s0, _)) if s0 > 1.0);
        if subtracted {
            target[m] = spec.photons[m] / 2;
            let mut step = cur.photons.clone();
            step[m] = target[m];
            cur = reduce_photons(&cur, &step)?.0;
        }
    }
    Ok(target)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenario::{cat_odd, random_spec};

    #[test]
    fn identity_target_keeps_state() {
        let spec = cat_odd();
        let (s, plans) = reduce_photons(&spec, &[15]).unwrap();
        assert_eq!(s, spec);
        assert!(plans[0].is_identity());
    }

    #[test]
    fn target_above_current_is_rejected() {
        assert!(reduce_photons(&cat_odd(), &[16]).is_err());
        assert!(reduce_photons(&cat_odd(), &[3, 3]).is_err());
    }

    #[test]
    fn damping_never_regresses_and_preserves_output() {
        let spec = random_spec(1, 2, 0.8, 0.4, 3, vec![2, 1]).unwrap();
        let res = maximize_probability(&spec, &OptimizeOptions::default()).unwrap();
        assert!(res.probability >= res.probability_start);
        let f = heralded_fidelity(
            &spec.state,
            &spec.photons,
            &res.spec.state,
            &res.spec.photons,
            1,
            &FockOptions::default(),
        )
        .unwrap();
        assert!(f > 1.0 - 1e-6, "{f}");
    }

    #[test]
    fn auto_halves() {
        assert_eq!(auto_target(&[15, 4, 1]), vec![7, 2, 0]);
    }
}
