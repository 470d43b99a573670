use std::fs::File;
use std::io::BufWriter;
use std::path::Path;

use anyhow::{bail, Context};
use fnls_core::ensemble::{member_rng, smooth_random};
use fnls_core::inequality::{
    initial_data, last_over_median, max_by_truncation, BilinearSweep, DataKind, TruncationSweep,
};
use fnls_core::measure::{proof_bounds, ratio_scan, series_partial, write_measure_csv, MeasureRow};
use fnls_core::propagator::linear_propagate;
use fnls_core::report::{sort_reports, write_probe_csv, ProbeReport};
use fnls_core::solver::{
    critical_index, evolve, homogeneous_sobolev_norm, picard_iterate, rescale, write_diagnostics_csv, ScalingParams,
};
use fnls_core::spectral::{load_snapshot, save_snapshot, Field, Grid, SymbolSpec};
use fnls_core::Error;
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use crate::config::{InitialKind, RunConfig};
use crate::plotdata::{emit_plotdata, PlotKind, PlotPoint};
use crate::{Check, Command, Outcome};

pub(crate) fn dispatch(command: &Command, cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    match command {
        Command::Simulate(_) => simulate(cfg, out),
        Command::Picard(_) => picard(cfg, out),
        Command::Strichartz(_) => sweep(cfg, out, "strichartz"),
        Command::Inhomog(_) => sweep(cfg, out, "inhomog"),
        Command::Embedding(_) => sweep(cfg, out, "embedding"),
        Command::Bilinear(_) => bilinear(cfg, out),
        Command::Measure(_) => measure(cfg, out),
        Command::Scan(_) => scan(cfg, out),
        Command::Series(_) => series(cfg, out),
        Command::ProofBounds(_) => bounds(cfg, out),
        Command::Scaling(_) => scaling(cfg, out),
    }
}

fn create(path: &Path) -> anyhow::Result<BufWriter<File>> {
    let f = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(f))
}

fn write_rows<T: Serialize>(path: &Path, rows: &[T]) -> anyhow::Result<()> {
    let mut w = csv::Writer::from_writer(create(path)?);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn hypotheses_check(spec: &SymbolSpec) -> Check {
    Check::new(
        "within_hypotheses",
        spec.within_hypotheses(),
        format!("alpha = {} ({})", spec.alpha, spec.sign),
    )
}

fn initial_field(cfg: &RunConfig, grid: &std::sync::Arc<Grid>) -> anyhow::Result<Field> {
    let d = &cfg.data;
    let mut rng = member_rng(cfg.seed, 0);
    let phi = match d.kind {
        InitialKind::Smooth => smooth_random(grid, &mut rng, d.wj, d.wn),
        InitialKind::Gaussian => initial_data(DataKind::Gaussian, grid, &mut rng, d.n_trunc),
        InitialKind::WavePacket => initial_data(DataKind::WavePacket, grid, &mut rng, d.n_trunc),
        InitialKind::Knapp => initial_data(DataKind::Knapp, grid, &mut rng, d.n_trunc),
        InitialKind::Snapshot => {
            let Some(path) = &d.snapshot else {
                bail!("data.kind = \"snapshot\" needs data.snapshot = PATH");
            };
            let snap = load_snapshot(path).with_context(|| format!("loading snapshot {}", path.display()))?;
            let g = snap.field.grid();
            if g.nx() != grid.nx() || g.ny() != grid.ny() || g.lx() != grid.lx() || !grid.is_torus() {
                bail!(
                    "snapshot {} holds a {}×{} grid with Lx = {}, the configuration asks for {}×{} with Lx = {}",
                    path.display(),
                    g.nx(),
                    g.ny(),
                    g.lx(),
                    grid.nx(),
                    grid.ny(),
                    grid.lx()
                );
            }
            Field::from_data(grid, snap.field.representation(), snap.field.into_data())?
        }
    };
    Ok(phi.scaled(Complex64::new(d.amplitude, 0.0)))
}

fn simulate(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let sim = cfg.simulation()?;
    let phi = initial_field(cfg, &sim.grid)?;
    let traj = evolve(&phi, &sim)?;
    let path = out.join("simulate.csv");
    write_diagnostics_csv(create(&path)?, &traj.diagnostics)?;

    let mut snapshot_files = Vec::new();
    if sim.grid.is_torus() {
        let dir = out.join("snapshots");
        std::fs::create_dir_all(&dir).with_context(|| format!("creating {}", dir.display()))?;
        for (i, s) in traj.snapshots.iter().enumerate() {
            let p = dir.join(format!("snap_{i:05}.fnls"));
            save_snapshot(&p, &s.field, s.time).with_context(|| format!("writing {}", p.display()))?;
            snapshot_files.push(format!("snapshots/snap_{i:05}.fnls"));
        }
    }
    let t_final = traj.diagnostics.last().map_or(0.0, |r| r.t);
    let linear = linear_propagate(&phi, t_final, &sim.spec).to_physical();
    let distance = traj.final_state.distance(&linear)?;

    let points: Vec<PlotPoint> = traj
        .diagnostics
        .iter()
        .map(|r| PlotPoint::from_diagnostic(sim.spec.alpha, sim.spec.sign, r))
        .collect();
    emit_plotdata(&points, PlotKind::MassVsT, out)?;

    let drift = traj.max_mass_drift();
    let checks = vec![Check::new(
        "mass_conservation",
        drift <= 1e-10,
        format!("max relative drift {drift:e}"),
    )];
    Ok(Outcome {
        results: json!({
            "steps": traj.diagnostics.len() - 1,
            "t_final": t_final,
            "initial_mass": traj.diagnostics[0].mass,
            "final_mass": traj.diagnostics.last().map(|r| r.mass),
            "max_mass_drift": drift,
            "distance_to_linear": distance,
            "snapshots": snapshot_files,
        }),
        checks,
    })
}

#[derive(Serialize)]
struct PicardRow {
    iteration: usize,
    distance: f64,
    contraction_factor: Option<f64>,
}

fn picard(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let sim = cfg.simulation()?;
    let window = cfg.window()?;
    let phi = initial_field(cfg, &sim.grid)?;
    let n = &cfg.nonlinearity;
    let outcome = match picard_iterate(&phi, &sim, &window, n.max_iter, n.tol) {
        Ok(o) => o,
        Err(Error::PicardDiverged { iteration, distance }) => {
            write_rows::<PicardRow>(&out.join("picard.csv"), &[])?;
            return Ok(Outcome {
                results: json!({ "diverged_at": iteration, "last_distance": distance }),
                checks: vec![Check::new(
                    "converged",
                    false,
                    format!("distances grew three times in a row (iteration {iteration}, d = {distance:e})"),
                )],
            });
        }
        Err(e) => return Err(e.into()),
    };
    let r = &outcome.report;
    let rows: Vec<PicardRow> = r
        .distances
        .iter()
        .enumerate()
        .map(|(i, &d)| PicardRow {
            iteration: i + 1,
            distance: d,
            contraction_factor: r.contraction_factors.get(i).copied(),
        })
        .collect();
    write_rows(&out.join("picard.csv"), &rows)?;
    let contracting = r.contraction_factors.iter().all(|&q| q < 1.0);
    Ok(Outcome {
        results: serde_json::to_value(r)?,
        checks: vec![
            Check::new("converged", r.converged, format!("{} iterations", r.iterations)),
            Check::new(
                "contraction",
                contracting,
                match r.fitted_factor {
                    Some(q) => format!("fitted factor {q:.4}"),
                    None => "no fitted factor".into(),
                },
            ),
        ],
    })
}

fn sweep(cfg: &RunConfig, out: &Path, probe: &str) -> anyhow::Result<Outcome> {
    let spec = cfg.spec()?;
    let p = &cfg.probe;
    let sweep = TruncationSweep {
        spec,
        truncations: p.truncations.clone(),
        members: p.members,
        delta: cfg.time.delta,
        nt: cfg.time.nt,
        seed: cfg.seed,
        params: cfg.bourgain()?,
        kinds: p.kinds.clone(),
    };
    let mut reports = match probe {
        "strichartz" => sweep.strichartz()?,
        "embedding" => sweep.embedding()?,
        _ => sweep.inhomog()?,
    };
    sort_reports(&mut reports);
    probe_outputs(&reports, out, probe)?;
    let maxima = max_by_truncation(&reports);
    let values: Vec<f64> = maxima.iter().map(|m| m.1).collect();
    let growth = last_over_median(&values);
    Ok(Outcome {
        results: json!({
            "max_by_truncation": maxima,
            "last_over_median": growth,
            "probes": reports.len(),
        }),
        checks: vec![
            Check::new(
                "no_growth",
                growth <= p.flat_factor,
                format!("last/median = {growth:.4}, allowed {}", p.flat_factor),
            ),
            hypotheses_check(&spec),
        ],
    })
}

fn probe_outputs(reports: &[ProbeReport], out: &Path, name: &str) -> anyhow::Result<()> {
    let path = out.join(format!("{name}.csv"));
    write_probe_csv(create(&path)?, reports).with_context(|| format!("writing {}", path.display()))?;
    let points: Vec<PlotPoint> = reports.iter().map(PlotPoint::from_probe).collect();
    let kind = if name == "bilinear" {
        PlotKind::RatioVsK
    } else {
        PlotKind::RatioVsN
    };
    emit_plotdata(&points, kind, out)?;
    Ok(())
}

fn bilinear(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let spec = cfg.spec()?;
    let p = &cfg.probe;
    let sweep = BilinearSweep {
        spec,
        nx: cfg.grid.nx,
        ny: cfg.grid.ny,
        lx: cfg.grid.lx,
        nt: cfg.time.nt,
        delta: cfg.time.delta,
        ks: p.ks.clone(),
        members: p.members,
        seed: cfg.seed,
    };
    let summary = sweep.run()?;
    let reports: Vec<ProbeReport> = summary.probes.iter().map(|b| b.report.clone()).collect();
    probe_outputs(&reports, out, "bilinear")?;
    let worst_discard = summary.probes.iter().flat_map(|b| b.discarded).fold(0.0, f64::max);
    Ok(Outcome {
        results: json!({
            "ks": p.ks,
            "sup": summary.sup,
            "drift": summary.drift,
            "holder_ok": summary.holder_ok,
            "max_discarded_fraction": worst_discard,
            "probes": reports.len(),
        }),
        checks: vec![
            Check::new(
                "flat",
                summary.drift <= p.bilinear_factor,
                format!(
                    "product-order drift {:.4}, allowed {}",
                    summary.drift, p.bilinear_factor
                ),
            ),
            Check::new("holder", summary.holder_ok, "numerator within the Hölder bound"),
            hypotheses_check(&spec),
        ],
    })
}

fn measure(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let q = cfg.query()?;
    let row = MeasureRow::from_query(&q)?;
    let outside = !q.within_hypotheses();
    let path = out.join("measure.csv");
    write_measure_csv(create(&path)?, &[row], Some(outside))?;
    emit_plotdata(&[PlotPoint::from_measure(&row)], PlotKind::RatioVsK, out)?;
    let mut results = serde_json::to_value(row)?;
    results["outside_hypotheses"] = json!(outside);
    Ok(Outcome {
        results,
        checks: vec![hypotheses_check(&q.spec)],
    })
}

fn scan(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let spec = cfg.spec()?;
    let table = ratio_scan(spec, &cfg.scan_grid()?)?;
    let path = out.join("scan.csv");
    write_measure_csv(create(&path)?, &table.rows, Some(table.outside_hypotheses))?;
    let points: Vec<PlotPoint> = table.rows.iter().map(PlotPoint::from_measure).collect();
    emit_plotdata(&points, PlotKind::RatioVsK, out)?;
    emit_plotdata(&points, PlotKind::RatioVsC, out)?;
    let factor = cfg.scan.flat_factor;
    Ok(Outcome {
        results: json!({
            "sup_by_k": table.sup_by_k,
            "flatness": table.flatness,
            "spread": table.spread,
            "sup_by_c": table.sup_by_c,
            "c_exponent": table.c_exponent,
            "outside_hypotheses": table.outside_hypotheses,
            "rows": table.rows.len(),
        }),
        checks: vec![
            Check::new(
                "flat",
                table.is_flat(factor),
                format!("upward drift {:.4}, allowed {factor}", table.flatness),
            ),
            hypotheses_check(&spec),
        ],
    })
}

#[derive(Serialize)]
struct SeriesRow {
    kind: &'static str,
    alpha: f64,
    #[serde(rename = "C")]
    c: f64,
    #[serde(rename = "K")]
    k: f64,
    #[serde(rename = "N")]
    n: u64,
    partial: f64,
}

fn series(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let s = &cfg.scan;
    let alpha = cfg.symbol.alpha;
    let mut ns: Vec<u64> = std::iter::successors(Some(1u64), |&n| n.checked_mul(2))
        .take_while(|&n| n <= s.n_max)
        .collect();
    if ns.last() != Some(&s.n_max) {
        ns.push(s.n_max);
    }
    let rows: Vec<SeriesRow> = ns
        .iter()
        .map(|&n| {
            Ok(SeriesRow {
                kind: s.series.as_str(),
                alpha,
                c: s.c,
                k: s.k,
                n,
                partial: series_partial(s.series, alpha, s.c, s.k, n)?,
            })
        })
        .collect::<Result<_, Error>>()?;
    write_rows(&out.join("series.csv"), &rows)?;
    let points: Vec<PlotPoint> = rows
        .iter()
        .map(|r| PlotPoint::from_series(r.alpha, r.kind, r.c, r.k, r.n, r.partial))
        .collect();
    emit_plotdata(&points, PlotKind::SeriesVsN, out)?;
    // Growth per unit ln N over the upper half of the dyadic range.
    let tail = &rows[rows.len() / 2..];
    let log_slope = match (tail.first(), tail.last()) {
        (Some(a), Some(b)) if b.n > a.n => Some((b.partial - a.partial) / ((b.n as f64).ln() - (a.n as f64).ln())),
        _ => None,
    };
    let spec = cfg.spec()?;
    Ok(Outcome {
        results: json!({
            "kind": s.series.as_str(),
            "final_partial": rows.last().map(|r| r.partial),
            "log_slope": log_slope,
        }),
        checks: vec![hypotheses_check(&spec)],
    })
}

fn bounds(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let alpha = cfg.symbol.alpha;
    let mut rows = Vec::new();
    for &c in &cfg.scan_cs() {
        for &k in &cfg.scan.ks {
            rows.push(proof_bounds(alpha, c, k)?);
        }
    }
    write_rows(&out.join("proof_bounds.csv"), &rows)?;
    let passed = rows.iter().filter(|r| r.pass).count();
    Ok(Outcome {
        results: json!({ "cells": rows.len(), "passed": passed }),
        checks: vec![Check::new(
            "bounds_hold",
            passed == rows.len(),
            format!("{passed}/{} cells pass", rows.len()),
        )],
    })
}

#[derive(Serialize)]
struct ScalingRow {
    lambda: f64,
    l2_norm: f64,
    sobolev_norm: f64,
}

fn scaling(cfg: &RunConfig, out: &Path) -> anyhow::Result<Outcome> {
    let spec = cfg.spec()?;
    let g = &cfg.grid;
    let grid = Grid::planar(g.nx, g.ny, g.lx, g.ly.unwrap_or(g.lx))?;
    let w2 = 2.0 * cfg.scaling.width * cfg.scaling.width;
    let phi = Field::from_fn(&grid, |x, y| Complex64::new((-(x * x + y * y) / w2).exp(), 0.0));
    let s = cfg.scaling.s;
    let rows: Vec<ScalingRow> = cfg
        .scaling
        .lambdas
        .iter()
        .map(|&lambda| {
            let u = rescale(&phi, ScalingParams::new(lambda, s)?, &spec)?;
            Ok(ScalingRow {
                lambda,
                l2_norm: u.norm_l2(),
                sobolev_norm: homogeneous_sobolev_norm(&u, s, spec.alpha),
            })
        })
        .collect::<Result<_, Error>>()?;
    if rows.is_empty() {
        bail!("scaling.lambdas is empty");
    }
    write_rows(&out.join("scaling.csv"), &rows)?;
    let fit = fit_slope(rows.iter().map(|r| (r.lambda.ln(), r.l2_norm.ln())));
    let expected = (1.0 - 1.0 / spec.alpha) / 2.0;
    let ok = fit.is_some_and(|f| (f - expected).abs() <= 1e-3);
    Ok(Outcome {
        results: json!({
            "fitted_l2_exponent": fit,
            "expected_l2_exponent": expected,
            "critical_index": critical_index(spec.alpha),
        }),
        checks: vec![Check::new(
            "l2_exponent",
            ok,
            match fit {
                Some(f) => format!("fitted {f:.6}, expected {expected}"),
                None => "no fit".into(),
            },
        )],
    })
}

fn fit_slope(pts: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = pts.collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}
