use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::Context;
use serde::Serialize;

use ngopt_core::fock::{heralded_fidelity, wigner_grid, FockOptions, FockVector};
use ngopt_core::metrics::MetricSet;
use ngopt_core::optimizer::{mode_summaries, ModeSummary, OptimizationReport};
use ngopt_core::scenario::GeneratorSpec;

pub const WIGNER_HALF_WIDTH: f64 = 8.0;
pub const WIGNER_POINTS: usize = 161;

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> anyhow::Result<()> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn join<T>(xs: &[T], f: impl Fn(&T) -> String) -> String {
    xs.iter().map(f).collect::<Vec<_>>().join(";")
}

fn fmt(x: f64) -> String {
    format!("{:.6e}", x + 0.0)
}

#[derive(Serialize)]
struct TableRow {
    stage: &'static str,
    photons: String,
    probability: String,
    fidelity: String,
    s0: String,
    delta0_re: String,
    delta0_im: String,
    s0_invariant: String,
    xi_cat: String,
    xi_cps: String,
    xi_gkp: String,
}

fn row(
    stage: &'static str,
    spec: &GeneratorSpec,
    p: f64,
    f: f64,
    modes: &[ModeSummary],
    m: Option<&MetricSet>,
) -> TableRow {
    let metric = |g: fn(&MetricSet) -> f64| m.map(|m| fmt(g(m))).unwrap_or_default();
    TableRow {
        stage,
        photons: join(&spec.photons, |n| n.to_string()),
        probability: fmt(p),
        fidelity: fmt(f),
        s0: join(modes, |s| fmt(s.block.s0)),
        delta0_re: join(modes, |s| fmt(s.block.delta0.re)),
        delta0_im: join(modes, |s| fmt(s.block.delta0.im)),
        s0_invariant: join(modes, |s| {
            s.invariant.as_ref().map(|i| fmt(i.s0)).unwrap_or_default()
        }),
        xi_cat: metric(|m| m.xi_cat.value),
        xi_cps: metric(|m| m.xi_cps.value),
        xi_gkp: metric(|m| m.xi_gkp.value),
    }
}

pub fn signal_vector(spec: &GeneratorSpec, opts: &FockOptions) -> Option<FockVector> {
    if spec.signal_modes != 1 {
        return None;
    }
    spec.herald(opts).ok()?.signal.to_vector().ok()
}

/// Original, reduced and final rows with per-mode values joined by `;`.
pub fn write_tables(
    path: &Path,
    r: &OptimizationReport,
    opts: &FockOptions,
    with_metrics: bool,
) -> anyhow::Result<()> {
    let l = r.before.signal_modes;
    let f_mid = heralded_fidelity(
        &r.before.state,
        &r.before.photons,
        &r.intermediate.state,
        &r.intermediate.photons,
        l,
        opts,
    )?;
    let mid_metrics = if with_metrics {
        signal_vector(&r.intermediate, opts).map(|v| MetricSet::evaluate(&v))
    } else {
        None
    };
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    w.serialize(row(
        "original",
        &r.before,
        r.probability_before,
        1.0,
        &r.modes_before,
        r.metrics_before.as_ref(),
    ))?;
    w.serialize(row(
        "reduced",
        &r.intermediate,
        r.probability_intermediate,
        f_mid,
        &mode_summaries(&r.intermediate),
        mid_metrics.as_ref(),
    ))?;
    w.serialize(row(
        "final",
        &r.after,
        r.probability_after,
        r.fidelity,
        &r.modes_after,
        r.metrics_after.as_ref(),
    ))?;
    w.flush()?;
    Ok(())
}

pub fn grid() -> Vec<f64> {
    let h = 2.0 * WIGNER_HALF_WIDTH / (WIGNER_POINTS - 1) as f64;
    (0..WIGNER_POINTS)
        .map(|i| -WIGNER_HALF_WIDTH + h * i as f64)
        .collect()
}

/// Header row of `x` values, then one row per `p` starting with the `p` value.
pub fn write_wigner(path: &Path, v: &FockVector) -> anyhow::Result<()> {
    let xs = grid();
    let w = wigner_grid(v, &xs, &xs);
    let mut out =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    let mut header = vec!["p\\x".to_string()];
    header.extend(xs.iter().map(|x| format!("{x:.4}")));
    out.write_record(&header)?;
    for (i, p) in xs.iter().enumerate() {
        let mut rec = vec![format!("{p:.4}")];
        rec.extend((0..xs.len()).map(|j| format!("{:.8e}", w[(i, j)])));
        out.write_record(&rec)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepPoint {
    pub n: usize,
    pub reflectance: f64,
    pub s0_invariant: f64,
    pub probability: f64,
    pub xi_gkp: f64,
}

pub fn write_sweep(path: &Path, points: &[SweepPoint]) -> anyhow::Result<()> {
    let mut w =
        csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))?;
    for p in points {
        w.serialize(p)?;
    }
    w.flush()?;
    Ok(())
}
