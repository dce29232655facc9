//! Executable acceptance criteria shared by the test suite and `ngopt verify`.

use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::control::{
    control_params_single, convertible, convertible_params, damping_domain_check,
    damping_transform, invariant_control_params, rotation_transform, ControlMoments,
};
use crate::fock::{
    gaussian_fock_amplitudes, herald, heralded_fidelity, particle_form, success_probability,
    FockOptions,
};
use crate::linalg::*;
use crate::maps::Damping;
use crate::metrics::{xi_cat, xi_cps};
use crate::optimizer::{damp_state, optimize, regime_target, OptimizationReport, OptimizeOptions};
use crate::scenario::{cat_even, cat_odd, cps, gkp, random_spec, GeneratorSpec};
use crate::symplectic::{check_uncertainty, random_generator, GaussianPure, GaussianUnitary};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriterionResult {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

impl std::fmt::Display for CriterionResult {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "[{}] {:>2} {:<28} {:>7.2}s  {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.name,
            self.seconds,
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str); 10] = [
    (1, "tmss-fock-oracle"),
    (2, "damping-rotation-exactness"),
    (3, "particle-form-ratios"),
    (4, "metric-calibration"),
    (5, "cat-reproduction"),
    (6, "cps-reproduction"),
    (7, "gkp-reproduction"),
    (8, "random-property-suite"),
    (9, "dual-oracle-probability"),
    (10, "convertibility-consistency"),
];

pub fn run(id: u8) -> CriterionResult {
    let start = Instant::now();
    let outcome = match id {
        1 => tmss_oracle(),
        2 => damping_rotation(),
        3 => particle_ratios(),
        4 => metric_calibration(),
        5 => cat_reproduction(),
        6 => cps_reproduction(),
        7 => gkp_reproduction(),
        8 => random_suite(),
        9 => dual_oracle(),
        10 => convertibility(),
        _ => Err(format!("unknown criterion {id}")),
    };
    let (passed, detail) = match outcome {
        Ok((p, d)) => (p, d),
        Err(e) => (false, format!("error: {e}")),
    };
    CriterionResult {
        id,
        name: CRITERIA
            .iter()
            .find(|(i, _)| *i == id)
            .map(|(_, n)| n.to_string())
            .unwrap_or_default(),
        passed,
        detail,
        seconds: start.elapsed().as_secs_f64(),
    }
}

pub fn run_all() -> Vec<CriterionResult> {
    CRITERIA.iter().map(|(id, _)| run(*id)).collect()
}

type Outcome = std::result::Result<(bool, String), String>;

fn e2s<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

fn within_factor(x: f64, target: f64, factor: f64) -> bool {
    x >= target / factor && x <= target * factor
}

fn tmss_oracle() -> Outcome {
    let mut amp_err: f64 = 0.0;
    let mut prob_err: f64 = 0.0;
    for a in [1.5f64, 3.0, 10.0] {
        let q = (a - 1.0) / (a + 1.0);
        let g = GaussianPure::tmss_from_schmidt(q).map_err(e2s)?;
        let (t, _) = gaussian_fock_amplitudes(&g, &[20, 20]).map_err(e2s)?;
        let pre = 2.0 * a.sqrt() / (a + 1.0);
        for i in 0..21 {
            for j in 0..21 {
                let want = if i == j { pre * q.powi(j as i32) } else { 0.0 };
                amp_err = amp_err.max((t.amps[i * 21 + j].norm() - want).abs());
            }
        }
        let m = ControlMoments::from_state(&g, 1);
        for n in 0..=20usize {
            let want = 4.0 * a / ((a + 1.0) * (a + 1.0)) * q.powi(2 * n as i32);
            let p1 = herald(&g, 1, &[n], &FockOptions::default())
                .map_err(e2s)?
                .probability;
            let p2 = success_probability(&m, &[n], &FockOptions::default()).map_err(e2s)?;
            prob_err = prob_err.max((p1 - want).abs()).max((p2 - want).abs());
        }
    }
    Ok((
        amp_err < 1e-10 && prob_err < 1e-10,
        format!("max amplitude error {amp_err:.1e}, max probability error {prob_err:.1e}"),
    ))
}

fn damping_rotation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let opts = FockOptions::default();
    let (mut worst_f, mut worst_dp) = (1.0f64, 0.0f64);
    for i in 0..50u64 {
        let n = rng.random_range(1..=4usize);
        let spec = GeneratorSpec::new(random_generator(1, 1, 1.0, 0.5, 100 + i), 1, vec![n])
            .map_err(e2s)?;
        let c = spec.moments().c;
        let t = loop {
            let lam: f64 = rng.random_range(-1.5..2.0);
            let t = [Damping::from_lambda(lam)];
            if lam.abs() > 1e-3 && damping_domain_check(&c, &t) {
                break t;
            }
        };
        let damped = damp_state(&spec, &t).map_err(e2s)?;
        worst_f = worst_f
            .min(heralded_fidelity(&spec.state, &[n], &damped, &[n], 1, &opts).map_err(e2s)?);
        let theta: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let rotated = spec
            .state
            .apply_unitary(&GaussianUnitary::rotation(theta), &[1])
            .map_err(e2s)?;
        worst_f = worst_f
            .min(heralded_fidelity(&spec.state, &[n], &rotated, &[n], 1, &opts).map_err(e2s)?);
        let p0 = spec.probability(&opts).map_err(e2s)?;
        let p1 = spec.with_state(rotated).probability(&opts).map_err(e2s)?;
        worst_dp = worst_dp.max((p1 - p0).abs() / p0);
    }
    Ok((
        worst_f >= 1.0 - 1e-6 && worst_dp < 1e-10,
        format!(
            "min fidelity 1 - {:.1e}, max relative rotation change {worst_dp:.1e}",
            1.0 - worst_f
        ),
    ))
}

fn particle_ratios() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let n = rng.random_range(2..=8usize);
        let s0: f64 = rng.random_range(0.0..3.0);
        let d = Complex64::new(rng.random_range(-1.5..1.5), rng.random_range(-1.5..1.5));
        let v = particle_form(s0, d, n, n);
        let c = &v.amps;
        let nf = n as f64;
        let r1 = c[n - 1] / c[n] - d * nf.sqrt();
        let r2 = c[n - 2] / c[n] - (d * d + s0) * (nf * (nf - 1.0)).sqrt() / 2.0;
        worst = worst.max(r1.norm()).max(r2.norm());
    }
    Ok((worst < 1e-8, format!("max ratio deviation {worst:.1e}")))
}

fn single_mode_gaussian(rng: &mut ChaCha8Rng, displaced: bool) -> GaussianPure {
    let r: f64 = rng.random_range(0.0..1.2);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::PI);
    let u = GaussianUnitary::squeezer(r).then(&GaussianUnitary::rotation(phi));
    let g = GaussianPure::vacuum(1)
        .apply_unitary(&u, &[0])
        .expect("one mode");
    if displaced {
        let d = Vect::from_vec(vec![
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        ]);
        g.apply_unitary(&GaussianUnitary::displacement(&d), &[0])
            .expect("one mode")
    } else {
        g
    }
}

fn metric_calibration() -> Outcome {
    let vac = crate::fock::FockVector::basis(0, 10);
    let cat0 = xi_cat(&vac).value;
    let cps0 = xi_cps(&vac).value;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut min_cat, mut min_cps) = (f64::INFINITY, f64::INFINITY);
    for i in 0..100 {
        // the x^2 bound concerns centred states; the cubic one holds for all Gaussian states
        let g = single_mode_gaussian(&mut rng, i % 2 == 1);
        let v = gaussian_fock_amplitudes(&g, &[90])
            .map_err(e2s)?
            .0
            .to_vector()
            .map_err(e2s)?;
        if g.mean.norm() == 0.0 {
            min_cat = min_cat.min(xi_cat(&v).value);
        }
        min_cps = min_cps.min(xi_cps(&v).value);
    }
    let ok = (cat0 - 2.0 / 3.0).abs() < 1e-14
        && (cps0 - 0.75).abs() < 1e-6
        && min_cat >= 2.0 / 3.0 - 1e-6
        && min_cps >= 0.75 - 1e-6;
    Ok((
        ok,
        format!("vacuum {cat0:.12}/{cps0:.9}, sweep minima {min_cat:.7}/{min_cps:.7}"),
    ))
}

fn report(
    spec: &GeneratorSpec,
    target: &[usize],
) -> std::result::Result<OptimizationReport, String> {
    optimize(spec, target, &OptimizeOptions::default()).map_err(e2s)
}

fn cat_reproduction() -> Outcome {
    let odd = report(&cat_odd(), &[5])?;
    let even = report(&cat_even(), &[6])?;
    let deg = |r: &OptimizationReport| -> Option<f64> {
        Some(r.metrics_after.as_ref()?.xi_cat.value - r.metrics_before.as_ref()?.xi_cat.value)
    };
    let (dodd, deven) = (
        deg(&odd).ok_or("missing metrics")?,
        deg(&even).ok_or("missing metrics")?,
    );
    let s0 = odd.modes_after[0].block.s0;
    let ok = (1.2e-6..=2.4e-6).contains(&odd.probability_before)
        && within_factor(odd.probability_after, 4.58e-2, 3.0)
        && odd.fidelity >= 0.99
        && (s0 - 1.11).abs() <= 0.05
        && dodd <= 0.03
        && within_factor(even.probability_after, 3.84e-2, 3.0)
        && even.fidelity >= 0.99
        && deven <= 0.03;
    Ok((
        ok,
        format!(
            "odd p {:.3e}->{:.3e} F {:.4} s0' {s0:.3} dxi {dodd:.4}; even p {:.3e}->{:.3e} F {:.4} dxi {deven:.4}",
            odd.probability_before,
            odd.probability_after,
            odd.fidelity,
            even.probability_before,
            even.probability_after,
            even.fidelity
        ),
    ))
}

fn cps_reproduction() -> Outcome {
    let r = report(&cps(), &[7])?;
    let (a, b) = (
        r.metrics_before
            .as_ref()
            .ok_or("missing metrics")?
            .xi_cps
            .value,
        r.metrics_after
            .as_ref()
            .ok_or("missing metrics")?
            .xi_cps
            .value,
    );
    let ok = within_factor(r.probability_before, 2.19e-8, 2.0)
        && within_factor(r.probability_after, 7.43e-2, 3.0)
        && r.fidelity >= 0.99
        && b - a <= 0.05;
    Ok((
        ok,
        format!(
            "p {:.3e}->{:.3e} F {:.4} xi {a:.4}->{b:.4}",
            r.probability_before, r.probability_after, r.fidelity
        ),
    ))
}

fn gkp_reproduction() -> Outcome {
    let spec = gkp();
    let before = invariant_control_params(&spec.moments(), 0).map_err(e2s)?.0;
    let r = report(&spec, &[6, 6, 6])?;
    let after = invariant_control_params(&r.after.moments(), 0)
        .map_err(e2s)?
        .0;
    let ok = within_factor(r.probability_before, 1.75e-12, 2.0)
        && within_factor(r.probability_after, 1.44e-4, 3.0)
        && r.fidelity >= 0.99
        && (before - 5.0).abs() <= 0.1
        && (after - 3.05).abs() <= 0.3
        && r.gain() >= 1e7;
    Ok((
        ok,
        format!(
            "p {:.3e}->{:.3e} (gain {:.2e}) F {:.4} invariant s0 {before:.3}->{after:.3}",
            r.probability_before,
            r.probability_after,
            r.gain(),
            r.fidelity
        ),
    ))
}

fn state_ok(g: &GaussianPure) -> bool {
    g.is_pure(1e-8)
        && check_uncertainty(&g.cov).unwrap_or(false)
        && g.cov.iter().all(|x| x.is_finite())
}

/// Seeds 0..10 of the random construction with one signal and two control modes, six photons each.
pub const RANDOM_SUITE_MODES: (usize, usize, usize) = (1, 2, 6);

fn random_suite() -> Outcome {
    let (l, k, n) = RANDOM_SUITE_MODES;
    let opts = OptimizeOptions {
        metrics: false,
        ..OptimizeOptions::default()
    };
    let mut lines = Vec::new();
    let mut ok = true;
    for seed in 0..10u64 {
        let spec = random_spec(l, k, 1.0, 0.5, seed, vec![n; k]).map_err(e2s)?;
        let target = regime_target(&spec).map_err(e2s)?;
        let r = optimize(&spec, &target, &opts).map_err(e2s)?;
        let invariants = state_ok(&r.before.state)
            && state_ok(&r.intermediate.state)
            && state_ok(&r.after.state)
            && r.fidelity <= 1.0 + 1e-9
            && r.fidelity_damping >= 1.0 - 1e-6;
        let good = r.probability_after >= r.probability_before && r.fidelity >= 0.80 && invariants;
        ok &= good;
        if !good {
            lines.push(format!("seed {seed} F {:.3}", r.fidelity));
        }
    }
    let detail = if lines.is_empty() {
        "10/10 seeds monotone, F >= 0.80, invariants hold".to_string()
    } else {
        format!("failing: {}", lines.join(", "))
    };
    Ok((ok, detail))
}

fn dual_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for i in 0..30u64 {
        let l = rng.random_range(1..=2usize);
        let k = rng.random_range(1..=3usize);
        let photons: Vec<usize> = (0..k).map(|_| rng.random_range(0..=3usize)).collect();
        let spec = random_spec(l, k, 1.0, 0.5, 900 + i, photons).map_err(e2s)?;
        let opts = FockOptions::default();
        let p1 = spec.probability(&opts).map_err(e2s)?;
        let p2 = spec.herald(&opts).map_err(e2s)?.probability;
        worst = worst.max((p1 - p2).abs() / p2);
    }
    Ok((
        worst < 1e-6,
        format!("max relative disagreement {worst:.1e}"),
    ))
}

/// Most negative feasible `lambda`, where the damped `C` diverges.
fn amplification_edge(m: &ControlMoments) -> f64 {
    let ok = |l: f64| damping_domain_check(&m.c, &[Damping::from_lambda(l)]);
    let (mut lo, mut hi) = (-20.0, -1e-6);
    if ok(lo) || !ok(hi) {
        return hi;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if ok(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Damping orbit that avoids the vacuum limit (`det C -> 1`) and approaches the divergence edge.
fn orbit(m: &ControlMoments) -> Vec<ControlMoments> {
    let edge = amplification_edge(m);
    let mut lams: Vec<f64> = vec![0.0];
    for i in 0..10 {
        lams.push(10f64.powf(-2.0 + 2.5 * i as f64 / 9.0));
        lams.push(edge * (1.0 - 10f64.powf(-(i as f64) * 0.8)));
    }
    lams.iter()
        .filter_map(|&l| damping_transform(m, &[Damping::from_lambda(l)]).ok())
        .filter(|d| d.c.determinant() - 1.0 >= 1e-4)
        .collect()
}

fn principal_angle(c: &Mat) -> f64 {
    0.5 * (2.0 * c[(0, 1)]).atan2(c[(0, 0)] - c[(1, 1)])
}

/// Some rotation of `b` on a grid, or aligning its principal axes with `a`, is reachable from `a`.
fn convertible_up_to_rotation(a: &ControlMoments, b: &ControlMoments) -> bool {
    let dphi = principal_angle(&a.c) - principal_angle(&b.c);
    (0..24)
        .map(|i| std::f64::consts::PI * i as f64 / 24.0)
        .chain([dphi, -dphi])
        .filter_map(|th| rotation_transform(b, &[th]).ok())
        .any(|y| convertible(a, &y))
}

fn convertibility() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut agree, mut total, mut positive) = (0, 0, 0);
    let mut seed = 5000u64;
    let mut mismatches = Vec::new();
    while total < 30 {
        let a = ControlMoments::from_state(&random_generator(1, 1, 1.2, 0.5, seed), 1);
        let b = ControlMoments::from_state(&random_generator(1, 1, 1.2, 0.5, seed + 1), 1);
        seed += 2;
        let (Ok(pa), Ok(pb)) = (
            control_params_single(&a.c, &a.beta),
            control_params_single(&b.c, &b.beta),
        ) else {
            continue;
        };
        if (pa.0 - pb.0).abs() <= 0.1 {
            continue;
        }
        let n = rng.random_range(2..=10usize);
        let by_params = convertible_params(pa.0, pa.1, pb.0, pb.1, n);
        let ob = orbit(&b);
        let by_moments = orbit(&a)
            .iter()
            .any(|x| ob.iter().any(|y| convertible_up_to_rotation(x, y)));
        total += 1;
        positive += usize::from(by_params);
        if by_params == by_moments {
            agree += 1;
        } else {
            mismatches.push(format!(
                "({:.2}->{:.2}: {by_params}/{by_moments})",
                pa.0, pb.0
            ));
        }
    }
    Ok((
        agree == total,
        format!(
            "{agree}/{total} pairs agree ({positive} convertible){}{}",
            if mismatches.is_empty() {
                ""
            } else {
                "; mismatches "
            },
            mismatches.join(" ")
        ),
    ))
}
