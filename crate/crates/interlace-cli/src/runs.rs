//! Subcommand implementations. Every run resolves its parameters through
//! the flags > config file > defaults chain, derives one stream per
//! replica from the root seed, writes its data files, and records a run
//! manifest next to them.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use interlace::brownian::{
    sample_avoiding_ensemble, sample_brownian_bridge, uniform_mesh, AvoidingEnsembleSpec,
    ContinuousCurve, CurveBound,
};
use interlace::gibbs::{run_chain, ChainSchedule, DEFAULT_BURNIN, DEFAULT_THIN};
use interlace::lattice::{
    sample_bridge_exact, Boundary, BoundaryData, ExtInt, IncreasingPath, Signature,
};
use interlace::rng::{derive_stream, root_stream};
use interlace::schur::{
    default_m_n, embed_ensemble, scale_edge, spiked_params, SchurSampler, SchurSpec, SpikedSpec,
};
use interlace::stats;

use crate::util::{
    ecdf_svg, parse_grid, parse_list, quantile_fan_svg, with_suffix, write_manifest, CsvTable,
    CsvWriter, Resolver,
};
use crate::{BridgeArgs, BrownianArgs, CliError, McmcArgs, SchurArgs, StatsArgs, StatsKind};

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn finish_run(
    out: &Path,
    seed: u64,
    resolver: &Resolver,
    outputs: &[PathBuf],
) -> Result<(), CliError> {
    let manifest = write_manifest(out, seed, &resolver.resolved, outputs)?;
    eprintln!("wrote {} (+ manifest {})", outputs.iter().map(|p| p.display().to_string()).collect::<Vec<_>>().join(", "), manifest.display());
    Ok(())
}

// ---------------------------------------------------------------------------
// bridge
// ---------------------------------------------------------------------------

pub fn run_bridge(args: BridgeArgs, resolver: &mut Resolver) -> Result<(), CliError> {
    let t0 = resolver.get("t0", args.t0, 0)?;
    let t1: i64 = resolver.require("t1", args.t1)?;
    let z0 = resolver.get("z0", args.z0, 0)?;
    let z1: i64 = resolver.require("z1", args.z1)?;
    let samples = resolver.get("samples", args.samples, 100u64)?;
    let seed = resolver.seed(args.seed)?;
    let out: PathBuf = resolver.require("out", args.out)?;

    let mut rng = root_stream(seed);
    let mut csv = CsvWriter::create(&out, "sample,t,value")?;
    for i in 0..samples {
        let path = sample_bridge_exact(t0, t1, z0, z1, &mut rng)?;
        for t in path.t0()..=path.t1() {
            csv.row(format_args!("{i},{t},{}", path.value(t)))?;
        }
    }
    csv.finish()?;
    finish_run(&out, seed, resolver, &[out.clone()])
}

// ---------------------------------------------------------------------------
// mcmc
// ---------------------------------------------------------------------------

fn parse_lower_boundary(
    level: Option<i64>,
    file: Option<&Path>,
    t0: i64,
    t1: i64,
) -> Result<Boundary, CliError> {
    match (level, file) {
        (Some(_), Some(_)) => Err(usage("--g-level and --g-file are mutually exclusive")),
        (Some(l), None) => Ok(Boundary::level(t0, t1, l)),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)?;
            let values = text
                .split_whitespace()
                .map(|tok| tok.parse::<ExtInt>())
                .collect::<interlace::Result<Vec<_>>>()
                .map_err(CliError::Model)?;
            if values.len() != (t1 - t0 + 1) as usize {
                return Err(usage(format!(
                    "--g-file has {} values for horizon {}",
                    values.len(),
                    t1 - t0 + 1
                )));
            }
            Boundary::from_values(t0, values).map_err(CliError::Model)
        }
        (None, None) => Ok(Boundary::minus_infinity(t0, t1)),
    }
}

pub fn run_mcmc(args: McmcArgs, resolver: &mut Resolver) -> Result<(), CliError> {
    let k: usize = resolver.require("k", args.k)?;
    let t0 = resolver.get("t0", args.t0, 0)?;
    let t1: i64 = resolver.require("t1", args.t1)?;
    let x_raw: String = resolver.require("x", args.x)?;
    let y_raw: String = resolver.require("y", args.y)?;
    let g_level = resolver.optional("g-level", args.g_level)?;
    let g_file = resolver.optional("g-file", args.g_file)?;
    let sweeps = resolver.get("sweeps", args.sweeps, 10_000u64)?;
    let burnin = resolver.get("burnin", args.burnin, DEFAULT_BURNIN)?;
    let thin = resolver.get("thin", args.thin, DEFAULT_THIN)?;
    let seed = resolver.seed(args.seed)?;
    let replicas = resolver.get("replicas", args.replicas, 1u64)?;
    let out: PathBuf = resolver.require("out", args.out)?;

    let xs = parse_list::<i64>(&x_raw, "--x").map_err(usage)?;
    let ys = parse_list::<i64>(&y_raw, "--y").map_err(usage)?;
    if xs.len() != k || ys.len() != k {
        return Err(usage(format!("--x and --y must list exactly k = {k} values")));
    }
    let g = parse_lower_boundary(g_level, g_file.as_deref(), t0, t1)?;
    let boundary = BoundaryData::new(
        t0,
        t1,
        Signature::new(xs).map_err(CliError::Model)?,
        Signature::new(ys).map_err(CliError::Model)?,
        Boundary::plus_infinity(t0, t1),
        g,
    )
    .map_err(CliError::Model)?;

    let schedule = ChainSchedule { sweeps, burnin, thin };
    let per_replica: Vec<interlace::Result<Vec<_>>> = (0..replicas)
        .into_par_iter()
        .map(|r| run_chain(&boundary, schedule, derive_stream(seed, r)))
        .collect();

    let mut csv = CsvWriter::create(&out, "replica,sweep,curve,t,value")?;
    for (r, result) in per_replica.into_iter().enumerate() {
        let configs = result.map_err(CliError::Model)?;
        for (j, cfg) in configs.iter().enumerate() {
            let sweep = burnin + j as u64 * thin;
            for curve in 0..k {
                for t in t0..=t1 {
                    csv.row(format_args!("{r},{sweep},{},{t},{}", curve + 1, cfg.value(curve, t)))?;
                }
            }
        }
    }
    csv.finish()?;
    finish_run(&out, seed, resolver, &[out.clone()])
}

// ---------------------------------------------------------------------------
// brownian
// ---------------------------------------------------------------------------

pub fn run_brownian(args: BrownianArgs, resolver: &mut Resolver) -> Result<(), CliError> {
    let a = resolver.get("a", args.a, 0.0)?;
    let b = resolver.get("b", args.b, 1.0)?;
    let x_raw: String = resolver.require("x", args.x)?;
    let y_raw: String = resolver.require("y", args.y)?;
    let f_level = resolver.optional("f-level", args.f_level)?;
    let g_level = resolver.optional("g-level", args.g_level)?;
    let mesh_points = resolver.get("mesh", args.mesh, 512usize)?;
    let sigma = resolver.get("sigma", args.sigma, 1.0)?;
    let max_attempts = resolver.get("max-attempts", args.max_attempts, 1_000_000u64)?;
    let seed = resolver.seed(args.seed)?;
    let replicas = resolver.get("replicas", args.replicas, 1u64)?;
    let out: PathBuf = resolver.require("out", args.out)?;

    let xs = parse_list::<f64>(&x_raw, "--x").map_err(usage)?;
    let ys = parse_list::<f64>(&y_raw, "--y").map_err(usage)?;
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(usage("--x and --y must list the same positive number of values"));
    }
    let k = xs.len();
    let mesh = uniform_mesh(a, b, mesh_points);
    let conditioned = k > 1 || f_level.is_some() || g_level.is_some();
    if conditioned && sigma != 1.0 {
        return Err(usage("avoiding ensembles are defined for variance 1; drop --sigma"));
    }

    let mut csv = CsvWriter::create(&out, "replica,curve,t,value")?;
    if !conditioned {
        // Free bridge of prescribed variance.
        let curves: Vec<interlace::Result<ContinuousCurve>> = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let mut rng = derive_stream(seed, r);
                sample_brownian_bridge(a, b, xs[0], ys[0], sigma, &mesh, &mut rng)
            })
            .collect();
        for (r, curve) in curves.into_iter().enumerate() {
            let curve = curve.map_err(CliError::Model)?;
            for (t, v) in curve.mesh().iter().zip(curve.values()) {
                csv.row(format_args!("{r},1,{t},{v}"))?;
            }
        }
    } else {
        let f = f_level.map_or(CurveBound::PosInf, CurveBound::Level);
        let g = g_level.map_or(CurveBound::NegInf, CurveBound::Level);
        let spec = AvoidingEnsembleSpec::new(a, b, xs, ys, f, g).map_err(CliError::Model)?;
        let progress = if replicas == 1 { Some(10_000) } else { None };
        let draws: Vec<interlace::Result<_>> = (0..replicas)
            .into_par_iter()
            .map(|r| {
                let mut rng = derive_stream(seed, r);
                sample_avoiding_ensemble(&spec, &mesh, &mut rng, max_attempts, progress)
            })
            .collect();
        let mut attempts_total = 0u64;
        for (r, draw) in draws.into_iter().enumerate() {
            let draw = draw.map_err(CliError::Model)?;
            attempts_total += draw.attempts;
            for (i, curve) in draw.curves.iter().enumerate() {
                for (t, v) in curve.mesh().iter().zip(curve.values()) {
                    csv.row(format_args!("{r},{},{t},{v}", i + 1))?;
                }
            }
        }
        eprintln!(
            "acceptance rate {:.4} ({} ensembles in {} attempts; mesh {} intervals)",
            replicas as f64 / attempts_total as f64,
            replicas,
            attempts_total,
            mesh_points
        );
    }
    csv.finish()?;
    finish_run(&out, seed, resolver, &[out.clone()])
}

// ---------------------------------------------------------------------------
// schur
// ---------------------------------------------------------------------------

#[derive(serde::Serialize)]
struct SchurSidecar {
    q: f64,
    n: u64,
    m_n: usize,
    sigma_q: f64,
    f_q: f64,
    a_n: usize,
    b_n: usize,
    c_n_plus: usize,
    n0_ok: bool,
    degenerate: bool,
}

pub fn run_schur(args: SchurArgs, resolver: &mut Resolver) -> Result<(), CliError> {
    let q: f64 = resolver.require("q", args.q)?;
    let a_plus_raw = resolver.get("a-plus", args.a_plus, String::new())?;
    let b_plus_raw = resolver.get("b-plus", args.b_plus, String::new())?;
    let c_plus = resolver.get("c-plus", args.c_plus, 0.0)?;
    let n: u64 = resolver.require("n", args.n)?;
    let m_n = resolver.get("mn", args.mn, default_m_n(n))?;
    let seed = resolver.seed(args.seed)?;
    let replicas = resolver.get("replicas", args.replicas, 1u64)?;
    let grid_raw = resolver.get("scale-grid", args.scale_grid, "-2:2:41".to_string())?;
    let curves = resolver.get("curves", args.curves, 3usize)?;
    let out: PathBuf = resolver.require("out", args.out)?;

    let spec = SpikedSpec::new(
        q,
        parse_list(&a_plus_raw, "--a-plus").map_err(usage)?,
        parse_list(&b_plus_raw, "--b-plus").map_err(usage)?,
        c_plus,
    )
    .map_err(CliError::Model)?;
    let grid = parse_grid(&grid_raw).map_err(usage)?;
    let params = spiked_params(n, m_n, &spec);
    let degenerate = !params.n0_ok;
    // Below the admissible size the process degenerates to a single empty
    // shape; flagged in the sidecar since it is a boundary convention, not
    // a meaningful simulation.
    let (schur_spec, n_eff, m_eff) = if degenerate {
        (SchurSpec::new(vec![0.0], vec![0.0]).map_err(CliError::Model)?, 1u64, 1usize)
    } else {
        (
            SchurSpec::new(params.xs.clone(), params.ys.clone()).map_err(CliError::Model)?,
            n,
            m_n,
        )
    };

    let n23 = (n_eff as f64).powf(2.0 / 3.0);
    let s_lo = (grid[0] * n23).floor() as i64 - 1;
    let s_hi = ((grid[grid.len() - 1] * n23).ceil() as i64 + 1).max(s_lo + 1);

    let sampler = SchurSampler::new(schur_spec);
    let results: Vec<(Vec<IncreasingPath>, Vec<ContinuousCurve>)> = (0..replicas)
        .into_par_iter()
        .map(|r| {
            let mut rng = derive_stream(seed, r);
            let sample = sampler.sample(&mut rng);
            let paths = embed_ensemble(&sample, n_eff, s_lo, s_hi, curves);
            let scaled = scale_edge(&paths, n_eff, q, &grid).expect("grid fits the embedding");
            (paths, scaled)
        })
        .collect();

    let scaled_out = with_suffix(&out, ".scaled.csv");
    let sidecar_out = with_suffix(&out, ".json");
    let mut raw_csv = CsvWriter::create(&out, "replica,curve,s,value")?;
    let mut scaled_csv = CsvWriter::create(&scaled_out, "replica,curve,t,scaled_value")?;
    for (r, (paths, scaled)) in results.iter().enumerate() {
        for (i, path) in paths.iter().enumerate() {
            for s in path.t0()..=path.t1() {
                raw_csv.row(format_args!("{r},{},{s},{}", i + 1, path.value(s)))?;
            }
        }
        for (i, curve) in scaled.iter().enumerate() {
            for (t, v) in curve.mesh().iter().zip(curve.values()) {
                scaled_csv.row(format_args!("{r},{},{t},{v}", i + 1))?;
            }
        }
    }
    raw_csv.finish()?;
    scaled_csv.finish()?;
    let sidecar = SchurSidecar {
        q,
        n,
        m_n: m_eff,
        sigma_q: params.sigma_q,
        f_q: params.f_q,
        a_n: params.a_n,
        b_n: params.b_n,
        c_n_plus: params.c_n_plus,
        n0_ok: params.n0_ok,
        degenerate,
    };
    std::fs::write(&sidecar_out, serde_json::to_string_pretty(&sidecar).unwrap())?;
    finish_run(&out, seed, resolver, &[out.clone(), scaled_out, sidecar_out])
}

// ---------------------------------------------------------------------------
// stats
// ---------------------------------------------------------------------------

struct PointSelection {
    curve: Option<f64>,
    t: Option<f64>,
}

fn extract_points(table: &CsvTable, sel: &PointSelection) -> Result<Vec<(f64, f64)>, CliError> {
    let value_col = table.value_column().map_err(usage)?;
    let curve_col = table.column("curve");
    let t_col = table.column("t").or_else(|| table.column("s"));
    let mut out = Vec::new();
    for row in &table.rows {
        if let (Some(want), Some(col)) = (sel.curve, curve_col) {
            if (row[col] - want).abs() > 1e-9 {
                continue;
            }
        }
        if let Some(want) = sel.t {
            let col = t_col.ok_or_else(|| usage("CSV has no t column to select on"))?;
            if (row[col] - want).abs() > 1e-9 {
                continue;
            }
        }
        let t = t_col.map(|c| row[c]).unwrap_or(0.0);
        out.push((t, row[value_col]));
    }
    if out.is_empty() {
        return Err(usage("selection matched no rows"));
    }
    Ok(out)
}

/// Optional diffusive scaling of extracted `(t, value)` pairs.
fn apply_scaling(
    points: Vec<(f64, f64)>,
    p: Option<f64>,
    d_n: Option<f64>,
    c_n: Option<f64>,
) -> Result<Vec<f64>, CliError> {
    match (p, d_n) {
        (Some(p), Some(d_n)) => {
            let params = stats::ScaleParams::new(p, d_n, c_n.unwrap_or(0.0))
                .map_err(CliError::Model)?;
            Ok(points.into_iter().map(|(t, v)| params.scale_value(v, t)).collect())
        }
        (None, None) => {
            if c_n.is_some() {
                return Err(usage("--c-n needs --p and --d-n"));
            }
            Ok(points.into_iter().map(|(_, v)| v).collect())
        }
        _ => Err(usage("--p and --d-n must be given together")),
    }
}

/// Rebuilds one integer path per (replica, sweep) group for a given curve.
fn extract_paths(table: &CsvTable, curve: f64) -> Result<Vec<IncreasingPath>, CliError> {
    let value_col = table.value_column().map_err(usage)?;
    let t_col = table.column("t").or_else(|| table.column("s")).ok_or_else(|| usage("CSV has no time column"))?;
    let curve_col = table.column("curve");
    let replica_col = table.column("replica").or_else(|| table.column("sample"));
    let sweep_col = table.column("sweep");
    let mut groups: BTreeMap<(i64, i64), Vec<(i64, i64)>> = BTreeMap::new();
    for row in &table.rows {
        if let Some(col) = curve_col {
            if (row[col] - curve).abs() > 1e-9 {
                continue;
            }
        }
        let key = (
            replica_col.map(|c| row[c] as i64).unwrap_or(0),
            sweep_col.map(|c| row[c] as i64).unwrap_or(0),
        );
        groups.entry(key).or_default().push((row[t_col] as i64, row[value_col] as i64));
    }
    let mut paths = Vec::with_capacity(groups.len());
    for (_, mut pts) in groups {
        pts.sort_unstable();
        let t0 = pts[0].0;
        let values: Vec<i64> = pts.iter().map(|&(_, v)| v).collect();
        paths.push(IncreasingPath::new(t0, values).map_err(CliError::Model)?);
    }
    if paths.is_empty() {
        return Err(usage("selection matched no paths"));
    }
    Ok(paths)
}

/// Rebuilds one continuous curve per (replica, sweep) group.
fn extract_curves(table: &CsvTable, curve: f64) -> Result<Vec<ContinuousCurve>, CliError> {
    let value_col = table.value_column().map_err(usage)?;
    let t_col = table.column("t").ok_or_else(|| usage("CSV has no t column"))?;
    let curve_col = table.column("curve");
    let replica_col = table.column("replica").or_else(|| table.column("sample"));
    let sweep_col = table.column("sweep");
    let mut groups: BTreeMap<(i64, i64), Vec<(f64, f64)>> = BTreeMap::new();
    for row in &table.rows {
        if let Some(col) = curve_col {
            if (row[col] - curve).abs() > 1e-9 {
                continue;
            }
        }
        let key = (
            replica_col.map(|c| row[c] as i64).unwrap_or(0),
            sweep_col.map(|c| row[c] as i64).unwrap_or(0),
        );
        groups.entry(key).or_default().push((row[t_col], row[value_col]));
    }
    let mut curves = Vec::with_capacity(groups.len());
    for (_, mut pts) in groups {
        pts.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
        let mesh: Vec<f64> = pts.iter().map(|&(t, _)| t).collect();
        let values: Vec<f64> = pts.iter().map(|&(_, v)| v).collect();
        curves.push(ContinuousCurve::new(mesh, values).map_err(CliError::Model)?);
    }
    if curves.is_empty() {
        return Err(usage("selection matched no curves"));
    }
    Ok(curves)
}

fn write_report(
    out: Option<&Path>,
    seed_echo: u64,
    resolver: &Resolver,
    report: &serde_json::Value,
) -> Result<(), CliError> {
    let json = serde_json::to_string_pretty(report).unwrap();
    match out {
        Some(path) => {
            std::fs::write(path, &json)?;
            finish_run(path, seed_echo, resolver, &[path.to_path_buf()])
        }
        None => {
            println!("{json}");
            Ok(())
        }
    }
}

pub fn run_stats(args: StatsArgs, resolver: &mut Resolver) -> Result<(), CliError> {
    let kind = args.kind;
    let input: PathBuf = resolver.require("in", args.input.first().cloned())?;
    let table = CsvTable::read(&input)?;
    let out = args.out.clone();
    let sel = PointSelection { curve: args.curve, t: args.t };
    let mut plot_series: Option<Vec<(String, Vec<f64>)>> = None;

    let report = match kind {
        StatsKind::KsNormal => {
            let points = extract_points(&table, &sel)?;
            let samples = apply_scaling(points, args.p, args.d_n, args.c_n)?;
            let mean = args.mean.unwrap_or(0.0);
            let sd = args.sd.unwrap_or(1.0);
            let d = stats::ks_distance_normal(&samples, mean, sd).map_err(CliError::Model)?;
            plot_series = Some(vec![(format!("{}", input.display()), samples.clone())]);
            serde_json::json!({
                "kind": "ks-normal",
                "n": samples.len(),
                "ks_distance": d,
                "reference": {"mean": mean, "sd": sd},
            })
        }
        StatsKind::KsTwo => {
            let input2: PathBuf = resolver.require("in2", args.input2.clone())?;
            let table2 = CsvTable::read(&input2)?;
            let points = extract_points(&table, &sel)?;
            let samples = apply_scaling(points, args.p, args.d_n, args.c_n)?;
            let other: Vec<f64> =
                extract_points(&table2, &sel)?.into_iter().map(|(_, v)| v).collect();
            let d = stats::ks_distance_two_sample(&samples, &other).map_err(CliError::Model)?;
            plot_series = Some(vec![
                (format!("{}", input.display()), samples.clone()),
                (format!("{}", input2.display()), other.clone()),
            ]);
            serde_json::json!({
                "kind": "ks-two",
                "n1": samples.len(),
                "n2": other.len(),
                "ks_distance": d,
            })
        }
        StatsKind::Concentration => {
            let points = extract_points(&table, &sel)?;
            let samples = apply_scaling(points, args.p, args.d_n, args.c_n)?;
            let a = args.a.unwrap_or(0.0);
            let delta = args.delta.ok_or_else(|| usage("--delta is required"))?;
            let report =
                stats::concentration_probability(&samples, a, delta).map_err(CliError::Model)?;
            serde_json::to_value(&report).unwrap()
        }
        StatsKind::Separation => {
            let curve = args.curve.ok_or_else(|| usage("--curve selects the bottom curve k"))?;
            let paths = extract_paths(&table, curve)?;
            let p = args.p.ok_or_else(|| usage("--p is required"))?;
            let delta_sep = args.delta_sep.ok_or_else(|| usage("--delta-sep is required"))?;
            let window = args.window.unwrap_or(0.1);
            let t0_frac = args.t.unwrap_or(0.5);
            let g = match args.g_level {
                Some(level) => Boundary::level(paths[0].t0(), paths[0].t1(), level),
                None => Boundary::minus_infinity(paths[0].t0(), paths[0].t1()),
            };
            let report =
                stats::separation_probability(&paths, &g, t0_frac, delta_sep, window, p)
                    .map_err(CliError::Model)?;
            serde_json::to_value(&report).unwrap()
        }
        StatsKind::MaxTail => {
            let curve = args.curve.unwrap_or(1.0);
            let paths = extract_paths(&table, curve)?;
            let p = args.p.ok_or_else(|| usage("--p is required"))?;
            let d_n = args.d_n.ok_or_else(|| usage("--d-n is required"))?;
            let a = args.a.unwrap_or(0.0);
            let b = args.b.ok_or_else(|| usage("--b is required"))?;
            let thresholds =
                parse_list::<f64>(&args.thresholds.clone().unwrap_or_else(|| "1,2,3".into()), "--thresholds")
                    .map_err(usage)?;
            let reports = stats::max_statistic(&paths, a, b, p, d_n, &thresholds)
                .map_err(CliError::Model)?;
            serde_json::to_value(&reports).unwrap()
        }
        StatsKind::Modulus => {
            let curve = args.curve.unwrap_or(1.0);
            let curves = extract_curves(&table, curve)?;
            let delta = args.delta.ok_or_else(|| usage("--delta is required"))?;
            let epsilon = args.epsilon.ok_or_else(|| usage("--epsilon is required"))?;
            let report =
                stats::modulus_tail(&curves, delta, epsilon).map_err(CliError::Model)?;
            serde_json::to_value(&report).unwrap()
        }
        StatsKind::Tightness => {
            let inputs = args.input.clone();
            if inputs.len() < 2 {
                return Err(usage("tightness needs at least two --in files (repeat the flag)"));
            }
            let labels: Vec<f64> = match &args.labels {
                Some(raw) => parse_list(raw, "--labels").map_err(usage)?,
                None => (0..inputs.len()).map(|i| i as f64).collect(),
            };
            if labels.len() != inputs.len() {
                return Err(usage("--labels must match the number of --in files"));
            }
            let mut groups = Vec::new();
            for (label, path) in labels.iter().zip(&inputs) {
                let t = CsvTable::read(path)?;
                let points = extract_points(&t, &sel)?;
                groups.push((*label, points.into_iter().map(|(_, v)| v).collect::<Vec<f64>>()));
            }
            let report = stats::tightness_report(&groups).map_err(CliError::Model)?;
            if args.plot.is_some() {
                let fan = groups
                    .iter()
                    .map(|(l, v)| (*l, v.clone()))
                    .collect::<Vec<_>>();
                let svg = quantile_fan_svg(&fan);
                std::fs::write(args.plot.as_ref().unwrap(), svg)?;
            }
            serde_json::to_value(&report).unwrap()
        }
    };

    if let (Some(plot_path), Some(series)) = (&args.plot, &plot_series) {
        std::fs::write(plot_path, ecdf_svg(series))?;
    }
    let seed_echo = resolver.seed(None).unwrap_or(42);
    write_report(out.as_deref(), seed_echo, resolver, &report)
}
