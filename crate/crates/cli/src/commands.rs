use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::ArgMatches;
use serde::Serialize;
use wva_core::estimation::{run_comparison, ExperimentConfig, Strategy};
use wva_core::linalg::sigma_z;
use wva_core::postselection::{self, audit_inequality, AuditConfig, AuditSummary, InstanceSpec};
use wva_core::sweep::{attainment, envelopes, run_sweep, Engine, SelectionGrid, SweepSpec};
use wva_core::{GaussianProbe, ProbeGrid, Selection, StateVector};

use crate::args::{AuditArgs, EngineArg, McArgs, StrategyArg, SweepArgs};
use crate::config::{self, AuditFile, Layer, McFile, SweepFile};
use crate::error::CliError;

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<(), CliError> {
    match out {
        Some(path) => std::fs::write(path, bytes).map_err(|source| CliError::Io {
            path: path.to_path_buf(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|source| CliError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn json_line<T: Serialize>(value: &T) -> Vec<u8> {
    let mut bytes = serde_json::to_vec(value).expect("summaries serialize");
    bytes.push(b'\n');
    bytes
}

#[derive(Serialize)]
struct SweepSummary {
    rows: usize,
    skipped: usize,
    sigma: f64,
    /// Envelope of qfi_ps above qfi_int at the first nonzero theta.
    amplification_at_small_theta: bool,
    /// Smallest envelope ratio max(Pr(f) qfi_ps) / qfi_int over theta/sigma in [0.5, 4].
    attainment_min_ratio: Option<f64>,
    attainment_ok: bool,
}

pub fn sweep(args: SweepArgs, m: &ArgMatches) -> Result<ExitCode, CliError> {
    let file: SweepFile = config::load(args.common.config.as_deref())?;
    let l = Layer::new(m);
    let sigma = l.pick("sigma", args.common.sigma, file.sigma);
    let _seed = l.pick("seed", args.common.seed, file.seed);
    let out = l.pick_opt("out", args.common.out, file.out);
    let theta_min = l.pick("theta_min", args.theta_min, file.theta_min);
    let theta_max = l.pick("theta_max", args.theta_max, file.theta_max);
    let uniform = SelectionGrid::uniform(
        l.pick("n_t1", args.n_t1, file.n_t1),
        l.pick("n_t2", args.n_t2, file.n_t2),
        l.pick("n_ds", args.n_ds, file.n_ds),
    );
    let selections = SelectionGrid {
        t1: l.pick_opt("t1", args.t1, file.t1).unwrap_or(uniform.t1),
        t2: l.pick_opt("t2", args.t2, file.t2).unwrap_or(uniform.t2),
        ds: l.pick_opt("ds", args.ds, file.ds).unwrap_or(uniform.ds),
    };
    let engine = match l.pick("engine", args.engine, file.engine) {
        EngineArg::Grid => Engine::Grid,
        EngineArg::Analytic => Engine::Analytic,
    };
    let grid_points = l.pick_opt("grid_points", args.grid_points, file.grid_points);
    if let Some(n) = grid_points {
        if !n.is_power_of_two() || n < 2 {
            return Err(CliError::Config(format!(
                "grid_points: {n} is not a power of two"
            )));
        }
    }
    let spec = SweepSpec {
        sigma,
        theta_over_sigma: (theta_min, theta_max),
        steps: l.pick("steps", args.steps, file.steps),
        selections,
        engine,
        grid_points,
    };
    spec.validate()?;

    let table = run_sweep(&spec)?;
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in &table.rows {
        w.serialize(row)
            .map_err(|e| CliError::Core(wva_core::Error::Numerical(e.to_string())))?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| CliError::Core(wva_core::Error::Numerical(e.to_string())))?;
    emit(out.as_deref(), &bytes)?;

    let envs = envelopes(&table.rows);
    let points = attainment(&envs, sigma, (0.5, 4.0), 0.9);
    let summary = SweepSummary {
        rows: table.rows.len(),
        skipped: table.skipped,
        sigma,
        amplification_at_small_theta: envs.get(1).is_some_and(|e| e.max_qfi_ps > e.qfi_int),
        attainment_min_ratio: points.iter().map(|p| p.ratio).reduce(f64::min),
        attainment_ok: points.iter().all(|p| p.ok),
    };
    eprint!(
        "{}",
        String::from_utf8(json_line(&summary)).expect("json is utf-8")
    );
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct EqualityCase {
    sigma: f64,
    theta: f64,
    lhs: f64,
    rhs: f64,
}

#[derive(Serialize)]
struct AuditReport {
    seed: u64,
    tolerance: f64,
    #[serde(flatten)]
    summary: AuditSummary,
    equality_case: EqualityCase,
}

pub fn check_inequality(args: AuditArgs, m: &ArgMatches) -> Result<ExitCode, CliError> {
    let file: AuditFile = config::load(args.common.config.as_deref())?;
    let l = Layer::new(m);
    let sigma = l.pick("sigma", args.common.sigma, file.sigma);
    let out = l.pick_opt("out", args.common.out, file.out);
    let config = AuditConfig {
        trials: l.pick("trials", args.trials, file.trials),
        seed: l.pick("seed", args.common.seed, file.seed),
        min_dim: l.pick("min_dim", args.min_dim, file.min_dim),
        max_dim: l.pick("max_dim", args.max_dim, file.max_dim),
        theta_range: (
            l.pick("theta_min", args.theta_min, file.theta_min),
            l.pick("theta_max", args.theta_max, file.theta_max),
        ),
        tolerance: l.pick("tolerance", args.tolerance, file.tolerance),
        product_every: l.pick("product_every", args.product_every, file.product_every),
    };
    if !(config.tolerance >= 0.0) {
        return Err(CliError::Config(format!(
            "tolerance: must be nonnegative, got {}",
            config.tolerance
        )));
    }
    let (lo, hi) = config.theta_range;
    if !(hi >= lo && lo.is_finite() && hi.is_finite()) {
        return Err(CliError::Config(format!(
            "theta_min/theta_max: invalid range [{lo}, {hi}]"
        )));
    }

    let probe = GaussianProbe::new(sigma)?;
    let grid = ProbeGrid::default_for(&probe);
    let zero = StateVector::basis(2, 0);
    let eq = InstanceSpec::product_on_grid(sigma_z(), zero.clone(), zero, &probe, &grid, sigma)?;
    let eq = postselection::check_inequality(&eq)?;

    let summary = audit_inequality(&config)?;
    let ok = summary.all_passed();
    let report = AuditReport {
        seed: config.seed,
        tolerance: config.tolerance,
        summary,
        equality_case: EqualityCase {
            sigma,
            theta: sigma,
            lhs: eq.lhs,
            rhs: eq.rhs,
        },
    };
    emit(out.as_deref(), &json_line(&report))?;
    if ok {
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "wva: {} of {} instances violate the inequality",
            report.summary.failures.len(),
            report.summary.trials
        );
        Ok(ExitCode::from(1))
    }
}

pub fn mc(args: McArgs, m: &ArgMatches) -> Result<ExitCode, CliError> {
    let file: McFile = config::load(args.common.config.as_deref())?;
    let l = Layer::new(m);
    let sigma = l.pick("sigma", args.common.sigma, file.sigma);
    let seed = l.pick("seed", args.common.seed, file.seed);
    let out = l.pick_opt("out", args.common.out, file.out);
    let reps = l.pick("reps", args.reps, file.reps);
    if reps == 0 {
        return Err(CliError::Config(
            "reps: need at least one repetition".into(),
        ));
    }
    let strategies = l
        .pick("strategies", args.strategies, file.strategies)
        .into_iter()
        .map(|s| match s {
            StrategyArg::PostselectedPosition => Strategy::PostselectedPosition,
            StrategyArg::JointPosition => Strategy::JointPosition,
        })
        .collect();
    let search_min = l.pick_opt("search_min", args.search_min, file.search_min);
    let search_max = l.pick_opt("search_max", args.search_max, file.search_max);
    let search = match (search_min, search_max) {
        (None, None) => None,
        (a, b) => Some((a.unwrap_or(0.0), b.unwrap_or(8.0 * sigma))),
    };
    let config = ExperimentConfig {
        sigma,
        theta_true: sigma
            * l.pick(
                "theta_over_sigma",
                args.theta_over_sigma,
                file.theta_over_sigma,
            ),
        n: l.pick("n", args.n, file.n),
        selection: Selection::from_relative(
            l.pick("t1", args.t1, file.t1),
            l.pick("t2", args.t2, file.t2),
            l.pick("ds", args.ds, file.ds),
        ),
        strategies,
        search,
        table_points: l.pick("table_points", args.table_points, file.table_points),
    };
    let summary = run_comparison(&config, reps, seed)?;
    emit(out.as_deref(), &json_line(&summary))?;
    Ok(ExitCode::SUCCESS)
}
