//! Subcommand implementations.

use std::process::ExitCode;

use critgap::contour::{ContourPair, Resolution};
use critgap::fredholm::{gap_probability, set_qa_sign_fault, Route};
use critgap::kernels::{CritKernel, FiniteKernel, FiniteModelParams, ModelParams};
use critgap::mc::{
    center_an, empirical_gap, ks_critical_1pct, ks_distance, log_exponential_cdf, quantile, sample_rightmost,
    samples_csv, McConfig,
};
use critgap::rh::u_of_x;
use critgap::validate::{self, Group};
use critgap::Complex64;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::json;

use crate::output::{csv, emit, linspace, sidecar, write_file, CliError, CliResult, Manifest};
use crate::{Fault, Format, GapArgs, KernelArgs, McArgs, ValidateArgs};

/// Allowance on `|P_hat - P|` beyond the 95% interval at finite N.
const MC_BIAS_ALLOWANCE: f64 = 0.03;

enum KernelEval {
    Crit(CritKernel),
    Finite(FiniteKernel),
}

impl KernelEval {
    fn build(args: &KernelArgs, res: &Resolution) -> CliResult<Self> {
        Ok(match &args.finite {
            Some(nm) => KernelEval::Finite(FiniteKernel::with_resolution(
                FiniteModelParams::new(nm[0], nm[1])?,
                res,
            )?),
            None => KernelEval::Crit(CritKernel::from_pair(
                args.alpha,
                &ContourPair::default_for(args.alpha, res)?,
            )?),
        })
    }

    fn eval(&self, x: f64, y: f64) -> CliResult<Complex64> {
        Ok(match self {
            KernelEval::Crit(k) => k.eval(x, y),
            KernelEval::Finite(k) => k.eval(x, y)?,
        })
    }
}

pub fn kernel(args: &KernelArgs, threads: usize) -> CliResult<ExitCode> {
    let res = args.resolution.0;
    if args.finite.is_none() {
        ModelParams::new(args.alpha, 1.0)?;
    }
    let shift = match &args.finite {
        Some(nm) if args.centered => center_an(nm[0], nm[1])?,
        _ => 0.0,
    };
    let (xs, ys) = match &args.grid {
        Some(g) => (g.0.clone(), g.0.clone()),
        None => (args.x.clone(), args.y.clone()),
    };
    if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
        return Err(CliError::Usage("x and y must be finite".into()));
    }
    let mut manifest = Manifest::start("kernel", args, Some(res), None, threads);
    let fine = KernelEval::build(args, &res)?;
    let coarse = KernelEval::build(args, &res.coarse())?;
    let points: Vec<(f64, f64)> = xs.iter().flat_map(|&x| ys.iter().map(move |&y| (x, y))).collect();
    let rows = points
        .par_iter()
        .map(|&(x, y)| {
            let k = fine.eval(x + shift, y + shift)?;
            let err = (k - coarse.eval(x + shift, y + shift)?).norm();
            Ok(vec![x + shift, y + shift, k.re, k.im, err])
        })
        .collect::<CliResult<Vec<_>>>()?;
    let body = match args.format {
        Format::Csv => {
            let cols = ["x", "y", "re", "im", "err"].map(String::from);
            csv(&manifest, &cols, &rows)
        }
        Format::Json => {
            manifest.finish();
            let values: Vec<_> = rows
                .iter()
                .map(|r| json!({"x": r[0], "y": r[1], "re": r[2], "im": r[3], "err": r[4]}))
                .collect();
            serde_json::to_string_pretty(&json!({"manifest": manifest, "values": values})).expect("json") + "\n"
        }
    };
    emit(args.out.as_deref(), &body, &mut manifest)
}

pub fn gap(args: &GapArgs, threads: usize) -> CliResult<ExitCode> {
    let res = args.resolution.0;
    ModelParams::new(args.alpha, args.a_min)?;
    if !(args.a_max >= args.a_min) || args.steps == 0 {
        return Err(CliError::Usage(format!(
            "need a_min <= a_max and steps >= 1 (a_min={}, a_max={}, steps={})",
            args.a_min, args.a_max, args.steps
        )));
    }
    let mut routes: Vec<Route> = Vec::new();
    for r in Route::ALL {
        if args.routes.contains(&r) {
            routes.push(r);
        }
    }
    let primary = if routes.contains(&Route::ContourQ) {
        Route::ContourQ
    } else {
        routes[0]
    };
    let mut manifest = Manifest::start("gap", args, Some(res), None, threads);
    let a_values = linspace(args.a_min, args.a_max, args.steps);
    let rows = a_values
        .par_iter()
        .map(|&a| {
            let mut row = vec![a];
            let (mut log_p, mut err) = (0.0, 0.0f64);
            for &r in &routes {
                let v = gap_probability(a, args.alpha, r, &res)?;
                row.push(v.p);
                err = err.max(v.err);
                if r == primary {
                    log_p = v.log_p;
                }
            }
            let u = u_of_x(a, args.alpha, &res)?;
            row.extend([log_p, u.u, u.u_asym, err]);
            Ok(row)
        })
        .collect::<CliResult<Vec<_>>>()?;
    let mut cols = vec!["a".to_string()];
    cols.extend(routes.iter().map(|r| format!("P_{}", r.name().replace('-', ""))));
    cols.extend(["logP", "u", "u_asym", "err"].map(String::from));
    emit(args.out.as_deref(), &csv(&manifest, &cols, &rows), &mut manifest)
}

#[derive(Serialize)]
struct GroupSummary {
    name: &'static str,
    hard: bool,
    pass: bool,
}

pub fn validate(args: &ValidateArgs, threads: usize) -> CliResult<ExitCode> {
    let groups: Vec<Group> = if args.groups.is_empty() {
        Group::ALL.to_vec()
    } else {
        args.groups.clone()
    };
    let mut manifest = Manifest::start("validate", args, Some(Resolution::default()), None, threads);
    set_qa_sign_fault(args.inject_fault == Some(Fault::QaSign));
    let mut checks = Vec::new();
    for g in &groups {
        let c = g.run();
        eprintln!(
            "{} {}",
            if c.iter().all(|c| c.pass) { "pass" } else { "FAIL" },
            g.name()
        );
        checks.extend(c);
    }
    set_qa_sign_fault(false);
    let report = validate::Report::new(checks);
    let summary: Vec<GroupSummary> = groups
        .iter()
        .map(|&g| GroupSummary {
            name: g.name(),
            hard: g.is_hard(),
            pass: report.group_pass(g),
        })
        .collect();
    manifest.finish();
    let body = serde_json::to_string_pretty(&json!({
        "manifest": manifest,
        "hard_pass": report.hard_pass,
        "groups": summary,
        "checks": report.checks,
    }))
    .expect("json")
        + "\n";
    match &args.out {
        Some(p) => write_file(p, &body)?,
        None => print!("{body}"),
    }
    Ok(if report.hard_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    })
}

#[derive(Serialize)]
struct CompareRow {
    a: f64,
    p_hat: f64,
    ci95: f64,
    p_theory: f64,
    theory_err: f64,
    diff: f64,
    allowance: f64,
    within: bool,
}

pub fn mc(args: &McArgs, threads: usize) -> CliResult<ExitCode> {
    let cfg = McConfig::new(args.n, args.m, args.trials, args.seed)?;
    let alpha = cfg.alpha_label();
    let res = args.resolution.0;
    if args.compare {
        if let Some(a) = args.a.iter().find(|a| !(**a > 0.0)) {
            return Err(CliError::Usage(format!("comparison points must be positive (got {a})")));
        }
    }
    let mut manifest = Manifest::start("mc", args, args.compare.then_some(res), Some(args.seed), threads);
    let result = sample_rightmost(&cfg)?;
    let s = &result.samples;
    let mean = s.iter().sum::<f64>() / s.len() as f64;
    let var = s.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (s.len().max(2) - 1) as f64;
    let mut ok = true;
    let ks = (cfg.n == 1 && cfg.m == 1).then(|| {
        let d = ks_distance(s, |y| log_exponential_cdf(y + result.a_n));
        let crit = ks_critical_1pct(s.len());
        ok &= d <= crit;
        json!({"law": "log|X|^2 ~ log Exp(1)", "distance": d, "critical_1pct": crit, "pass": d <= crit})
    });
    let compare = if args.compare {
        let rows = args
            .a
            .iter()
            .map(|&a| {
                let (p_hat, ci95) = empirical_gap(&result, a);
                let p = gap_probability(a, alpha, Route::ContourQ, &res)?;
                let diff = (p_hat - p.p).abs();
                let allowance = ci95 + MC_BIAS_ALLOWANCE;
                Ok(CompareRow {
                    a,
                    p_hat,
                    ci95,
                    p_theory: p.p,
                    theory_err: p.err,
                    diff,
                    allowance,
                    within: diff <= allowance,
                })
            })
            .collect::<CliResult<Vec<_>>>()?;
        Some(rows)
    } else {
        None
    };
    manifest.finish();
    let summary = json!({
        "manifest": manifest,
        "config": cfg,
        "alpha": alpha,
        "a_N": result.a_n,
        "mean": mean,
        "std": var.sqrt(),
        "quantiles": {"0.05": quantile(s, 0.05), "0.5": quantile(s, 0.5), "0.95": quantile(s, 0.95)},
        "ks": ks,
        "compare": compare,
    });
    let summary = serde_json::to_string_pretty(&summary).expect("json") + "\n";
    if let Some(p) = &args.out {
        write_file(p, &samples_csv(&result))?;
        write_file(&sidecar(p), &summary)?;
    }
    print!("{summary}");
    Ok(if ok { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
