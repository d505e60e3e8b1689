//! One runner per subcommand. Each resolves its config (flags over config
//! file over defaults), fans instances out over the worker pool with seeds
//! derived from the instance index, and packages rows for the reporter.

use anyhow::{anyhow, Context};
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use convex_sandwich::body::{GaugeBody, Subspace, VPolytope};
use convex_sandwich::cones::{self, DoubleCone};
use convex_sandwich::generate;
use convex_sandwich::metrics;
use convex_sandwich::pipeline::{self, ReductionParams, ReductionWitness, ReductionWitnessData};
use convex_sandwich::sampling::{derive_seed, GaussianSource};
use convex_sandwich::ReductionOutcomeData;

use crate::args::*;
use crate::bodyspec;
use crate::report::{cell, cell_opt, cell_vec, CommandResult, SvgSpec};
use crate::CliError;

type CmdResult = Result<CommandResult, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn pick<T: Clone>(cli: &Option<T>, file: Option<&Option<T>>, default: T) -> T {
    cli.clone()
        .or_else(|| file.and_then(|f| f.clone()))
        .unwrap_or(default)
}

fn rows_to_values<R: Serialize>(rows: &[R]) -> anyhow::Result<Vec<Value>> {
    rows.iter()
        .map(|r| serde_json::to_value(r).context("serializing row"))
        .collect()
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = xs.len();
    if n == 0 {
        return f64::NAN;
    }
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

// ---------------------------------------------------------------- lemma 3

#[derive(Serialize)]
struct Lemma3Row {
    instance: usize,
    delta: f64,
    inner_margin: Option<f64>,
    outer_margin: Option<f64>,
    verdict: bool,
}

pub fn verify_lemma3(cli: &VerifyLemma3Args, file: Option<&VerifyLemma3Args>) -> CmdResult {
    let dim = pick(&cli.dim, file.map(|f| &f.dim), 3);
    let instances = pick(&cli.instances, file.map(|f| &f.instances), 200);
    let seed = pick(&cli.seed, file.map(|f| &f.seed), 42);
    let max_delta = pick(&cli.max_delta, file.map(|f| &f.max_delta), 1.45);
    let perturbations = pick(&cli.perturbations, file.map(|f| &f.perturbations), 3);
    let noise = pick(&cli.noise, file.map(|f| &f.noise), 0.08);
    if !(2..=5).contains(&dim) {
        return Err(usage(format!("--dim {dim} out of supported range 2..=5")));
    }
    if !(1.0 < max_delta && max_delta < 1.5) {
        return Err(usage("--max-delta must lie in (1, 1.5)"));
    }
    let config = json!({
        "dim": dim, "instances": instances, "seed": seed,
        "max_delta": max_delta, "perturbations": perturbations, "noise": noise,
    });
    let computed: Vec<anyhow::Result<Lemma3Row>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut src = GaussianSource::new(derive_seed(seed, i as u64));
            let t = generate::random_double_cone(dim, &mut src)?;
            let (l, _) =
                generate::random_lemma3_instance(&t, &mut src, perturbations, noise, max_delta)?;
            let rep = cones::lemma3_verify(&l, &t)?;
            Ok(Lemma3Row {
                instance: i,
                delta: rep.delta,
                inner_margin: rep.inner_margin,
                outer_margin: rep.outer_margin,
                verdict: rep.verdict,
            })
        })
        .collect();
    let mut rows = Vec::with_capacity(instances);
    for r in computed {
        rows.push(r.map_err(CliError::Run)?);
    }
    let failures = rows.iter().filter(|r| !r.verdict).count();
    let worst_inner = rows
        .iter()
        .filter_map(|r| r.inner_margin)
        .fold(f64::INFINITY, f64::min);
    let worst_outer = rows
        .iter()
        .filter_map(|r| r.outer_margin)
        .fold(f64::INFINITY, f64::min);
    let max_delta_measured = rows.iter().map(|r| r.delta).fold(0.0, f64::max);
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.instance.to_string(),
                cell(r.delta),
                cell_opt(r.inner_margin),
                cell_opt(r.outer_margin),
                r.verdict.to_string(),
            ]
        })
        .collect();
    Ok(CommandResult {
        command: "verify-lemma3",
        config,
        rows: rows_to_values(&rows).map_err(CliError::Run)?,
        csv_headers: vec!["instance", "delta", "inner_margin", "outer_margin", "verdict"],
        csv_rows,
        summary: json!({
            "worst_inner_margin": worst_inner,
            "worst_outer_margin": worst_outer,
            "max_delta_measured": max_delta_measured,
        }),
        pass: failures == 0,
        failures,
        svg_points: None,
    })
}

// ---------------------------------------------------------- section identity

#[derive(Serialize)]
struct SliceRow {
    lambda: f64,
    lhs_scale: f64,
    rhs_scale: f64,
    discrepancy: f64,
    verdict: bool,
}

fn parse_cone(spec: &str, seed: u64) -> Result<DoubleCone, CliError> {
    let (name, arg) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("cone spec '{spec}' needs the form name:<dim>")))?;
    let m: usize = arg
        .parse()
        .map_err(|_| usage(format!("cone spec '{spec}': bad dimension")))?;
    match name {
        "b1" => DoubleCone::b1(m).map_err(|e| CliError::Run(e.into())),
        "random" => {
            let mut src = GaussianSource::new(derive_seed(seed, 0xC0DE));
            generate::random_double_cone(m, &mut src).map_err(|e| CliError::Run(e.into()))
        }
        other => Err(usage(format!("unknown cone spec '{other}'"))),
    }
}

pub fn section_identity(cli: &SectionIdentityArgs, file: Option<&SectionIdentityArgs>) -> CmdResult {
    let delta = pick(&cli.delta, file.map(|f| &f.delta), 1.25);
    let grid = pick(&cli.grid, file.map(|f| &f.grid), 32);
    let cone_spec = pick(&cli.cone, file.map(|f| &f.cone), "b1:2".to_string());
    let seed = pick(&cli.seed, file.map(|f| &f.seed), 42);
    if !(1.0..1.5).contains(&delta) {
        return Err(usage("--delta must lie in [1, 1.5)"));
    }
    if grid < 8 {
        return Err(usage("--grid must be ≥ 8"));
    }
    let cone = parse_cone(&cone_spec, seed)?;
    let config = json!({
        "delta": delta, "grid": grid, "cone": cone_spec, "seed": seed,
    });
    let slices = cones::intersection_identity_slices(delta, grid).map_err(|e| CliError::Run(e.into()))?;
    let rows: Vec<SliceRow> = slices
        .into_iter()
        .map(|s| SliceRow {
            lambda: s.lambda,
            lhs_scale: s.lhs_scale,
            rhs_scale: s.rhs_scale,
            discrepancy: s.discrepancy,
            verdict: s.discrepancy <= 1e-12,
        })
        .collect();
    let mut summary = json!({ "set_checked": false });
    let mut set_pass = true;
    if cone.dim() <= 4 {
        let (a, b) =
            cones::intersection_identity_set_margins(&cone, delta).map_err(|e| CliError::Run(e.into()))?;
        set_pass = a >= -cones::MARGIN_TOL && b >= -cones::MARGIN_TOL;
        summary = json!({
            "set_checked": true,
            "set_lhs_in_rhs_margin": a,
            "set_rhs_in_lhs_margin": b,
            "set_pass": set_pass,
        });
    }
    let failures = rows.iter().filter(|r| !r.verdict).count() + usize::from(!set_pass);
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                cell(r.lambda),
                cell(r.lhs_scale),
                cell(r.rhs_scale),
                cell(r.discrepancy),
                r.verdict.to_string(),
            ]
        })
        .collect();
    Ok(CommandResult {
        command: "section-identity",
        config,
        rows: rows_to_values(&rows).map_err(CliError::Run)?,
        csv_headers: vec!["lambda", "lhs_scale", "rhs_scale", "discrepancy", "verdict"],
        csv_rows,
        summary,
        pass: failures == 0,
        failures,
        svg_points: None,
    })
}

// ----------------------------------------------------------------- eq2 chain

#[derive(Serialize)]
struct Eq2Row {
    instance: usize,
    delta: f64,
    mean: f64,
    std_error: f64,
    lower_bound: f64,
    max_dev_polarity: f64,
    max_dev_difference: f64,
    verdict: bool,
}

/// `L = c + (1/2)·(rotated k-gon)`: the difference body is the inscribed
/// k-gon itself.
fn near_ball_instance(ngon: usize, src: &mut GaussianSource) -> anyhow::Result<VPolytope> {
    let gon = generate::regular_ngon(ngon)?;
    let theta = src.uniform_in(0.0, std::f64::consts::TAU);
    let rot = nalgebra::DMatrix::from_row_slice(
        2,
        2,
        &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
    );
    let rotated = gon.linear_image(&rot)?;
    let off = DVector::from_column_slice(&[src.uniform_in(-0.1, 0.1), src.uniform_in(-0.1, 0.1)]);
    let verts: Vec<DVector<f64>> = rotated.vertices().iter().map(|v| v * 0.5 + &off).collect();
    Ok(VPolytope::new(verts)?)
}

pub fn eq2_chain(cli: &Eq2ChainArgs, file: Option<&Eq2ChainArgs>) -> CmdResult {
    let ngon = pick(&cli.ngon, file.map(|f| &f.ngon), 64);
    let instances = pick(&cli.instances, file.map(|f| &f.instances), 20);
    let alpha = pick(&cli.alpha, file.map(|f| &f.alpha), 0.01);
    let samples = pick(&cli.samples, file.map(|f| &f.samples), 100_000);
    let seed = pick(&cli.seed, file.map(|f| &f.seed), 42);
    let input = cli.input.clone().or_else(|| file.and_then(|f| f.input.clone()));
    if ngon < 8 {
        return Err(usage("--ngon must be ≥ 8"));
    }
    let config = json!({
        "ngon": ngon, "instances": if input.is_some() { 1 } else { instances },
        "alpha": alpha, "samples": samples, "seed": seed,
        "input": input.as_ref().map(|p| p.display().to_string()),
    });
    let bodies: Vec<VPolytope> = if let Some(path) = &input {
        vec![bodyspec::load_file(path).map_err(CliError::Run)?]
    } else {
        let built: Vec<anyhow::Result<VPolytope>> = (0..instances)
            .into_par_iter()
            .map(|i| {
                let mut src = GaussianSource::new(derive_seed(seed, i as u64));
                near_ball_instance(ngon, &mut src)
            })
            .collect();
        let mut out = Vec::with_capacity(instances);
        for b in built {
            out.push(b.map_err(CliError::Run)?);
        }
        out
    };
    let computed: Vec<anyhow::Result<Eq2Row>> = bodies
        .par_iter()
        .enumerate()
        .map(|(i, l)| {
            let rep = pipeline::eq2_chain_check(l, alpha, samples, derive_seed(seed, 1_000 + i as u64))?;
            Ok(Eq2Row {
                instance: i,
                delta: rep.delta,
                mean: rep.mean,
                std_error: rep.std_error,
                lower_bound: rep.lower_bound,
                max_dev_polarity: rep.max_dev_polarity,
                max_dev_difference: rep.max_dev_difference,
                verdict: rep.pass,
            })
        })
        .collect();
    let mut rows = Vec::new();
    for r in computed {
        rows.push(r.map_err(CliError::Run)?);
    }
    let failures = rows.iter().filter(|r| !r.verdict).count();
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.instance.to_string(),
                cell(r.delta),
                cell(r.mean),
                cell(r.std_error),
                cell(r.lower_bound),
                cell(r.max_dev_polarity),
                cell(r.max_dev_difference),
                r.verdict.to_string(),
            ]
        })
        .collect();
    Ok(CommandResult {
        command: "eq2-chain",
        config,
        rows: rows_to_values(&rows).map_err(CliError::Run)?,
        csv_headers: vec![
            "instance",
            "delta",
            "mean",
            "std_error",
            "lower_bound",
            "max_dev_polarity",
            "max_dev_difference",
            "verdict",
        ],
        csv_rows,
        summary: json!({
            "worst_dev_polarity": rows.iter().map(|r| r.max_dev_polarity).fold(0.0, f64::max),
            "worst_dev_difference": rows.iter().map(|r| r.max_dev_difference).fold(0.0, f64::max),
        }),
        pass: failures == 0,
        failures,
        svg_points: None,
    })
}

// ---------------------------------------------------------------------- mvee

#[derive(Serialize)]
struct MveeRow {
    body: String,
    max_gauge: f64,
    margin: f64,
    verdict: bool,
}

pub fn mvee(cli: &MveeArgs, file: Option<&MveeArgs>) -> CmdResult {
    let input = cli.input.clone().or_else(|| file.and_then(|f| f.input.clone()));
    let body_spec = cli.body.clone().or_else(|| file.and_then(|f| f.body.clone()));
    let tol = pick(&cli.tol, file.map(|f| &f.tol), 1e-7);
    let (body, label) =
        bodyspec::resolve(input.as_deref(), body_spec.as_deref()).map_err(CliError::Usage2)?;
    let config = json!({ "body": label, "tol": tol });
    let e = metrics::mvee(body.vertices(), tol).map_err(|e| CliError::Run(e.into()))?;
    let max_gauge = body
        .vertices()
        .iter()
        .map(|v| e.gauge(v))
        .fold(0.0, f64::max);
    let margin = 1.0 - max_gauge;
    let verdict = margin >= -tol;
    let row = MveeRow {
        body: label,
        max_gauge,
        margin,
        verdict,
    };
    Ok(CommandResult {
        command: "mvee",
        config,
        rows: rows_to_values(&[&row]).map_err(CliError::Run)?,
        csv_headers: vec!["body", "max_gauge", "margin", "verdict"],
        csv_rows: vec![vec![
            row.body.clone(),
            cell(row.max_gauge),
            cell(row.margin),
            row.verdict.to_string(),
        ]],
        summary: json!({
            "center": e.center().iter().copied().collect::<Vec<f64>>(),
            "semi_axes": e.semi_axes(),
        }),
        pass: verdict,
        failures: usize::from(!verdict),
        svg_points: None,
    })
}

// ------------------------------------------------------------- ball distance

#[derive(Serialize)]
struct BallRow {
    body: String,
    lambda: f64,
    inner_margin: f64,
    outer_margin: f64,
    verdict: bool,
}

pub fn ball_distance(cli: &BallDistanceArgs, file: Option<&BallDistanceArgs>) -> CmdResult {
    let input = cli.input.clone().or_else(|| file.and_then(|f| f.input.clone()));
    let body_spec = cli.body.clone().or_else(|| file.and_then(|f| f.body.clone()));
    let (body, label) =
        bodyspec::resolve(input.as_deref(), body_spec.as_deref()).map_err(CliError::Usage2)?;
    let config = json!({ "body": label });
    let (lambda, cert) = metrics::ball_distance(&body).map_err(|e| CliError::Run(e.into()))?;
    // re-verify the certificate containments from scratch
    let mapped: Vec<DVector<f64>> = body
        .vertices()
        .iter()
        .map(|v| &cert.map * (v - &cert.center))
        .collect();
    let image = VPolytope::new(mapped.clone()).map_err(|e| CliError::Run(e.into()))?;
    let hull = metrics::facet_enum(&image).map_err(|e| CliError::Run(e.into()))?;
    let inner_margin = hull
        .facets()
        .iter()
        .map(|(n, c)| c / n.norm())
        .fold(f64::INFINITY, f64::min)
        - 1.0;
    let circum = mapped.iter().map(|q| q.norm()).fold(0.0, f64::max);
    let outer_margin = 1.0 - circum / lambda;
    let verdict = inner_margin >= -1e-8 && outer_margin >= -1e-8;
    let row = BallRow {
        body: label,
        lambda,
        inner_margin,
        outer_margin,
        verdict,
    };
    Ok(CommandResult {
        command: "ball-distance",
        config,
        rows: rows_to_values(&[&row]).map_err(CliError::Run)?,
        csv_headers: vec!["body", "lambda", "inner_margin", "outer_margin", "verdict"],
        csv_rows: vec![vec![
            row.body.clone(),
            cell(row.lambda),
            cell(row.inner_margin),
            cell(row.outer_margin),
            row.verdict.to_string(),
        ]],
        summary: json!({
            "lambda": lambda,
            "center": cert.center.iter().copied().collect::<Vec<f64>>(),
        }),
        pass: verdict,
        failures: usize::from(!verdict),
        svg_points: None,
    })
}

// ----------------------------------------------------------------- mean norm

#[derive(Serialize)]
struct MeanNormRow {
    body: String,
    mean: f64,
    std_error: f64,
    radius: f64,
    n_samples: usize,
    verdict: bool,
}

fn gauge_body_for(input: Option<&std::path::Path>, spec: Option<&str>) -> anyhow::Result<(GaugeBody, String)> {
    if let Some(s) = spec {
        // native oracles where the built-in has a closed form
        if let Some((name, arg)) = s.split_once(':') {
            if let Ok(n) = arg.parse::<usize>() {
                match name {
                    "cube" => return Ok((GaugeBody::cube(n), s.to_string())),
                    "crosspolytope" => return Ok((GaugeBody::cross_polytope(n), s.to_string())),
                    "b1cone" => {
                        return Ok((
                            GaugeBody::double_cone(generate::b1_cone(n)?),
                            s.to_string(),
                        ))
                    }
                    _ => {}
                }
            }
        }
    }
    let (body, label) = bodyspec::resolve(input, spec)?;
    Ok((GaugeBody::poly(body), label))
}

pub fn mean_norm(cli: &MeanNormArgs, file: Option<&MeanNormArgs>) -> CmdResult {
    let input = cli.input.clone().or_else(|| file.and_then(|f| f.input.clone()));
    let body_spec = cli.body.clone().or_else(|| file.and_then(|f| f.body.clone()));
    let samples = pick(&cli.samples, file.map(|f| &f.samples), 100_000);
    let seed = pick(&cli.seed, file.map(|f| &f.seed), 42);
    let (body, label) =
        gauge_body_for(input.as_deref(), body_spec.as_deref()).map_err(CliError::Usage2)?;
    let config = json!({ "body": label, "samples": samples, "seed": seed });
    let est = pipeline::mean_norm(&body, samples, seed).map_err(|e| CliError::Run(e.into()))?;
    let row = MeanNormRow {
        body: label,
        mean: est.mean,
        std_error: est.std_error,
        radius: est.radius,
        n_samples: est.n_samples,
        verdict: est.mean > 0.0,
    };
    Ok(CommandResult {
        command: "mean-norm",
        config,
        rows: rows_to_values(&[&row]).map_err(CliError::Run)?,
        csv_headers: vec!["body", "mean", "std_error", "radius", "n_samples", "verdict"],
        csv_rows: vec![vec![
            row.body.clone(),
            cell(row.mean),
            cell(row.std_error),
            cell(row.radius),
            row.n_samples.to_string(),
            row.verdict.to_string(),
        ]],
        summary: json!({ "mean": est.mean, "radius": est.radius }),
        pass: row.verdict,
        failures: usize::from(!row.verdict),
        svg_points: None,
    })
}

// ------------------------------------------------------------ dvoretzky scan

#[derive(Serialize)]
struct ScanRow {
    d: usize,
    m: usize,
    trial: usize,
    ratio: f64,
    verdict: bool,
}

pub fn dvoretzky_scan(cli: &DvoretzkyScanArgs, file: Option<&DvoretzkyScanArgs>) -> CmdResult {
    let dims_spec = pick(&cli.dims, file.map(|f| &f.dims), "4,8,16".to_string());
    let m = pick(&cli.m, file.map(|f| &f.m), 2);
    let trials = pick(&cli.trials, file.map(|f| &f.trials), 200);
    let samples = pick(&cli.samples, file.map(|f| &f.samples), 1024);
    let seed = pick(&cli.seed, file.map(|f| &f.seed), 42);
    let family = pick(&cli.family, file.map(|f| &f.family), "cube".to_string());
    let dims: Vec<usize> = dims_spec
        .split(',')
        .map(|s| s.trim().parse::<usize>())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("bad --dims list '{dims_spec}'")))?;
    if dims.is_empty() {
        return Err(usage("--dims must list at least one dimension"));
    }
    for &d in &dims {
        if d <= m {
            return Err(usage(format!("dimension {d} must exceed m = {m}")));
        }
        if d > 16 {
            return Err(usage("dimensions above 16 are not supported"));
        }
    }
    let body_for = |d: usize| -> anyhow::Result<GaugeBody> {
        match family.as_str() {
            "cube" => Ok(GaugeBody::cube(d)),
            "crosspolytope" => Ok(GaugeBody::cross_polytope(d)),
            "simplex" => Ok(GaugeBody::poly(generate::centered_simplex(d)?)),
            other => Err(anyhow!("unknown body family '{other}'")),
        }
    };
    let config = json!({
        "dims": dims, "m": m, "trials": trials, "samples": samples,
        "seed": seed, "family": family,
    });
    let mut rows: Vec<ScanRow> = Vec::with_capacity(dims.len() * trials);
    for &d in &dims {
        let body = body_for(d).map_err(CliError::Run)?;
        let dim_seed = derive_seed(seed, d as u64);
        let ratios: Vec<anyhow::Result<f64>> = (0..trials)
            .into_par_iter()
            .map(|t| {
                let sub = pipeline::haar_subspace(d, m, derive_seed(dim_seed, 2 * t as u64))?;
                Ok(metrics::spherical_ratio(
                    &body,
                    &sub,
                    samples,
                    derive_seed(dim_seed, 2 * t as u64 + 1),
                )?)
            })
            .collect();
        for (t, r) in ratios.into_iter().enumerate() {
            let ratio = r.map_err(CliError::Run)?;
            rows.push(ScanRow {
                d,
                m,
                trial: t,
                ratio,
                verdict: ratio >= 1.0,
            });
        }
    }
    let mut per_dim = Vec::new();
    for &d in &dims {
        let ratios: Vec<f64> = rows.iter().filter(|r| r.d == d).map(|r| r.ratio).collect();
        let best = ratios.iter().copied().fold(f64::INFINITY, f64::min);
        per_dim.push(json!({ "d": d, "best": best, "median": median(ratios) }));
    }
    let failures = rows.iter().filter(|r| !r.verdict).count();
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.d.to_string(),
                r.m.to_string(),
                r.trial.to_string(),
                cell(r.ratio),
            ]
        })
        .collect();
    let svg_points = Some(SvgSpec {
        points: rows.iter().map(|r| (r.d as f64, r.ratio)).collect(),
        x_label: "dimension".into(),
        y_label: "spherical ratio".into(),
    });
    Ok(CommandResult {
        command: "dvoretzky-scan",
        config,
        rows: rows_to_values(&rows).map_err(CliError::Run)?,
        csv_headers: vec!["d", "m", "trial", "ratio"],
        csv_rows,
        summary: json!({ "per_dim": per_dim }),
        pass: failures == 0,
        failures,
        svg_points,
    })
}

// -------------------------------------------------------------------- reduce

#[derive(Serialize)]
struct ReduceRow {
    case: String,
    lambda: f64,
    subspace_dim: usize,
    verdict: bool,
}

pub fn reduce(cli: &ReduceArgs, file: Option<&ReduceArgs>) -> CmdResult {
    let input = cli
        .input
        .clone()
        .or_else(|| file.and_then(|f| f.input.clone()))
        .ok_or_else(|| usage("--input is required"))?;
    let witness_path = cli.witness.clone().or_else(|| file.and_then(|f| f.witness.clone()));
    let case = cli.case.clone().or_else(|| file.and_then(|f| f.case.clone()));
    let m = pick(&cli.m, file.map(|f| &f.m), 0);
    let alpha = pick(&cli.alpha, file.map(|f| &f.alpha), 0.2);
    let trials = pick(&cli.trials, file.map(|f| &f.trials), 64);
    let samples = pick(&cli.samples, file.map(|f| &f.samples), 1024);
    let sub_dim = cli.sub_dim.or_else(|| file.and_then(|f| f.sub_dim));
    let seed = pick(&cli.seed, file.map(|f| &f.seed), 42);
    let threshold = pick(&cli.threshold, file.map(|f| &f.threshold), 1.1);
    let k = bodyspec::load_file(&input).map_err(CliError::Usage2)?;
    let witness: ReductionWitness = if let Some(path) = &witness_path {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading witness file {}", path.display()))
            .map_err(CliError::Usage2)?;
        let data: ReductionWitnessData = serde_json::from_str(&text)
            .with_context(|| format!("parsing witness file {}", path.display()))
            .map_err(CliError::Usage2)?;
        ReductionWitness::try_from(data).map_err(|e| CliError::Usage(e.to_string()))?
    } else {
        let case = case
            .as_deref()
            .ok_or_else(|| usage("either --witness or --case is required"))?;
        if m == 0 || m > k.dim() {
            return Err(usage("--m (auto-witness subspace dimension) is required with --case"));
        }
        let sub = Subspace::coordinate(k.dim(), m).map_err(|e| CliError::Run(e.into()))?;
        match case {
            "ball" => pipeline::make_ball_witness(&k, sub).map_err(|e| CliError::Run(e.into()))?,
            "cross" => pipeline::make_cross_witness(&k, sub).map_err(|e| CliError::Run(e.into()))?,
            other => return Err(usage(format!("unknown case '{other}' (ball|cross)"))),
        }
    };
    let config = json!({
        "input": input.display().to_string(),
        "witness": witness_path.as_ref().map(|p| p.display().to_string()),
        "case": format!("{}", witness.case_tag),
        "m": witness.subspace.dim(),
        "alpha": alpha, "trials": trials, "samples": samples,
        "sub_dim": sub_dim, "seed": seed, "threshold": threshold,
    });
    let params = ReductionParams {
        alpha,
        trials,
        n_samples: samples,
        sub_dim,
        seed,
    };
    let outcome = pipeline::reduce_nonsymmetric(&k, &witness, &params)
        .map_err(|e| CliError::Run(e.into()))?;
    let data = ReductionOutcomeData::from(&outcome);
    let verdict = outcome.lambda <= threshold;
    let row = ReduceRow {
        case: format!("{}", outcome.case_tag),
        lambda: outcome.lambda,
        subspace_dim: outcome.subspace.dim(),
        verdict,
    };
    Ok(CommandResult {
        command: "reduce",
        config,
        rows: rows_to_values(&[&row]).map_err(CliError::Run)?,
        csv_headers: vec!["case", "lambda", "subspace_dim", "center", "verdict"],
        csv_rows: vec![vec![
            row.case.clone(),
            cell(row.lambda),
            row.subspace_dim.to_string(),
            cell_vec(&data.center),
            row.verdict.to_string(),
        ]],
        summary: serde_json::to_value(&data).map_err(|e| CliError::Run(e.into()))?,
        pass: verdict,
        failures: usize::from(!verdict),
        svg_points: None,
    })
}

// ------------------------------------------------------------ polarity check

#[derive(Serialize)]
struct PolarityRow {
    instance: usize,
    subspace_dim: usize,
    max_dev: f64,
    verdict: bool,
}

pub fn polarity_check(cli: &PolarityCheckArgs, file: Option<&PolarityCheckArgs>) -> CmdResult {
    let input = cli.input.clone().or_else(|| file.and_then(|f| f.input.clone()));
    let dim = pick(&cli.dim, file.map(|f| &f.dim), 3);
    let subspace_dim = pick(&cli.subspace_dim, file.map(|f| &f.subspace_dim), 0);
    let pairs = pick(&cli.pairs, file.map(|f| &f.pairs), 20);
    let samples = pick(&cli.samples, file.map(|f| &f.samples), 500);
    let seed = pick(&cli.seed, file.map(|f| &f.seed), 42);
    let fixed_body = match &input {
        Some(p) => Some(bodyspec::load_file(p).map_err(CliError::Usage2)?),
        None => None,
    };
    let d = fixed_body.as_ref().map(|b| b.dim()).unwrap_or(dim);
    if d < 2 {
        return Err(usage("bodies must have dimension ≥ 2"));
    }
    if subspace_dim >= d {
        return Err(usage(format!("--subspace-dim must be < {d} (0 for random)")));
    }
    let config = json!({
        "input": input.as_ref().map(|p| p.display().to_string()),
        "dim": d, "subspace_dim": subspace_dim, "pairs": pairs,
        "samples": samples, "seed": seed,
    });
    let computed: Vec<anyhow::Result<PolarityRow>> = (0..pairs)
        .into_par_iter()
        .map(|i| {
            let mut src = GaussianSource::new(derive_seed(seed, i as u64));
            let body = match &fixed_body {
                Some(b) => b.clone(),
                None => generate::random_polytope_with_interior(d, 3, &mut src)?,
            };
            let m = if subspace_dim >= 1 {
                subspace_dim
            } else {
                1 + src.uniform_usize(d - 1)
            };
            let sub = pipeline::haar_subspace(d, m, derive_seed(seed, 10_000 + i as u64))?;
            let rep = pipeline::polarity_corollary_check(
                &body,
                &sub,
                samples,
                derive_seed(seed, 20_000 + i as u64),
            )?;
            Ok(PolarityRow {
                instance: i,
                subspace_dim: m,
                max_dev: rep.max_dev,
                verdict: rep.pass,
            })
        })
        .collect();
    let mut rows = Vec::new();
    for r in computed {
        rows.push(r.map_err(CliError::Run)?);
    }
    let failures = rows.iter().filter(|r| !r.verdict).count();
    let csv_rows = rows
        .iter()
        .map(|r| {
            vec![
                r.instance.to_string(),
                r.subspace_dim.to_string(),
                cell(r.max_dev),
                r.verdict.to_string(),
            ]
        })
        .collect();
    Ok(CommandResult {
        command: "polarity-check",
        config,
        rows: rows_to_values(&rows).map_err(CliError::Run)?,
        csv_headers: vec!["instance", "subspace_dim", "max_dev", "verdict"],
        csv_rows,
        summary: json!({
            "worst_dev": rows.iter().map(|r| r.max_dev).fold(0.0, f64::max),
        }),
        pass: failures == 0,
        failures,
        svg_points: None,
    })
}
