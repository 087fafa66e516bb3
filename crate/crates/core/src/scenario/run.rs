use std::fmt::Write as _;
use std::io::Write as _;

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::config::{OutputSpec, ScenarioConfig, ScenarioKind, StateSpec};
use super::output::{encode_rows, LhvSearchReport, ResultRow};
use super::ScenarioError;
use crate::fock::{apply_loss, partial_transpose_min_eig, pure_state, tmsv_state, ModeSystem, QuantumState};
use crate::inequality::{evaluate, InequalityReport, Variant};
use crate::lhv::{adversarial_search, constraint_residual, SearchConfig};

type Result<T> = std::result::Result<T, ScenarioError>;

/// Encoded output of a scenario and a short human-readable summary.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutput {
    pub bytes: Vec<u8>,
    pub summary: String,
}

/// Seed of sweep point `index`, a SplitMix64 mix of the master seed and
/// the index.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master.wrapping_add(index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn build_state(spec: &StateSpec, dims: &[usize], seed: Option<u64>) -> Result<QuantumState> {
    let system = ModeSystem::new(dims.to_vec())?;
    let state = match spec {
        StateSpec::Vacuum => QuantumState::vacuum(&system),
        StateSpec::SinglePhoton => {
            let mut amps = vec![Complex64::new(0.0, 0.0); system.total_dim()];
            amps[system.index_of(&[0, 1])?] = Complex64::new(1.0, 0.0);
            amps[system.index_of(&[1, 0])?] = Complex64::new(1.0, 0.0);
            pure_state(&system, &amps)?
        }
        StateSpec::TwinPhoton => QuantumState::fock(&system, &[1, 1])?,
        StateSpec::Tmsv { r } => tmsv_state(&system, *r)?,
        StateSpec::Custom { amplitudes } => {
            let amps: Vec<Complex64> = amplitudes.iter().map(|[re, im]| Complex64::new(*re, *im)).collect();
            pure_state(&system, &amps)?
        }
        StateSpec::Random { rank } => {
            let seed = seed.ok_or_else(|| ScenarioError::Config("missing field `seed`".into()))?;
            QuantumState::random_mixed(&system, *rank, &mut ChaCha8Rng::seed_from_u64(seed))
        }
    };
    Ok(state)
}

struct Point<'a> {
    label: String,
    state: &'a StateSpec,
    r: Option<f64>,
    eta: (f64, f64),
    dims: Vec<usize>,
    k: u32,
    seed: Option<u64>,
}

fn dims_label(dims: &[usize]) -> String {
    if dims.windows(2).all(|w| w[0] == w[1]) {
        dims[0].to_string()
    } else {
        dims.iter().map(usize::to_string).collect::<Vec<_>>().join("x")
    }
}

fn evaluate_point(p: &Point) -> Result<(ResultRow, InequalityReport)> {
    let spec = match (p.state, p.r) {
        (StateSpec::Tmsv { .. }, Some(r)) => StateSpec::Tmsv { r },
        (s, _) => s.clone(),
    };
    let ideal = build_state(&spec, &p.dims, p.seed)?;
    let lossy = apply_loss(&apply_loss(&ideal, 0, p.eta.0)?, 1, p.eta.1)?;
    let report = evaluate(&lossy, p.k, &Variant::ALL)?.with_label(p.label.clone());
    let pt_min_eig = partial_transpose_min_eig(&lossy, 1)?;
    let get = |v| report.outcome(v).copied().expect("all variants evaluated");
    let (r1, r3, r4) = (get(Variant::R1), get(Variant::R3), get(Variant::R4));
    let row = ResultRow {
        scenario: p.label.clone(),
        r: spec.r(),
        eta1: p.eta.0,
        eta2: p.eta.1,
        d: dims_label(&p.dims),
        k: p.k,
        lhs: report.lhs,
        rhs_r1: r1.rhs,
        rhs_r3: r3.rhs,
        rhs_r4: r4.rhs,
        margin_r1: r1.margin,
        margin_r3: r3.margin,
        margin_r4: r4.margin,
        viol_r1: r1.violated,
        viol_r3: r3.violated,
        viol_r4: r4.violated,
        pt_min_eig,
        trunc_loss: lossy.truncation_loss(),
    };
    Ok((row, report))
}

fn quantum_state(config: &ScenarioConfig) -> Result<&StateSpec> {
    config
        .state
        .as_ref()
        .ok_or_else(|| ScenarioError::Config("scenario has no quantum state".into()))
}

fn expect_kind(config: &ScenarioConfig, kind: ScenarioKind) -> Result<()> {
    if config.kind == kind {
        Ok(())
    } else {
        Err(ScenarioError::Config(format!(
            "configuration is for `{}`, not `{}`",
            config.kind.as_str(),
            kind.as_str()
        )))
    }
}

fn single_point(config: &ScenarioConfig) -> Result<(ResultRow, InequalityReport)> {
    let state = quantum_state(config)?;
    evaluate_point(&Point {
        label: config.label.clone(),
        state,
        r: state.r(),
        eta: (config.eta1, config.eta2),
        dims: config.dims.clone(),
        k: config.order_k,
        seed: config.seed,
    })
}

pub fn evaluate_rows(config: &ScenarioConfig) -> Result<Vec<ResultRow>> {
    Ok(vec![single_point(config)?.0])
}

/// Rows for every grid point, in lexicographic grid order. Points are
/// evaluated in parallel.
pub fn sweep_rows(config: &ScenarioConfig) -> Result<Vec<ResultRow>> {
    let state = quantum_state(config)?;
    let grid = config
        .sweep
        .as_ref()
        .ok_or_else(|| ScenarioError::Config("scenario has no sweep grid".into()))?;
    let points = grid.points();
    points
        .par_iter()
        .enumerate()
        .map(|(index, gp)| {
            let point = Point {
                label: format!("{}/{index}", config.label),
                state,
                r: grid.r[gp.r_index],
                eta: grid.efficiencies[gp.eta_index],
                dims: config.dims_for(grid.d[gp.d_index]),
                k: grid.k[gp.k_index],
                seed: config.seed.map(|s| derive_seed(s, index as u64)),
            };
            evaluate_point(&point).map(|(row, _)| row)
        })
        .collect()
}

pub fn lhv_report(config: &ScenarioConfig) -> Result<LhvSearchReport> {
    let settings = config
        .lhv
        .ok_or_else(|| ScenarioError::Config("scenario has no lhv settings".into()))?;
    let seed = config
        .seed
        .ok_or_else(|| ScenarioError::Config("missing field `seed`".into()))?;
    let outcome = adversarial_search(&SearchConfig {
        constrained: settings.constrained,
        variant: settings.variant,
        budget: settings.budget,
        bounds: settings.bounds,
        seed,
    })?;
    let report = outcome.best_ensemble.report(&[settings.variant]);
    Ok(LhvSearchReport {
        scenario: config.label.clone(),
        constrained: settings.constrained,
        variant: settings.variant.to_string(),
        seed,
        budget: settings.budget,
        amplitude_bound: settings.bounds.amplitude,
        intensity_max: settings.bounds.intensity_max,
        evaluations_used: outcome.evaluations_used,
        best_score: outcome.best_score,
        lhs: report.lhs,
        rhs: report.rhs(settings.variant).unwrap_or(f64::NAN),
        constraint_residual: constraint_residual(&outcome.best_ensemble),
        points: outcome.best_ensemble.points().to_vec(),
    })
}

fn write_output(spec: &OutputSpec, bytes: &[u8]) -> Result<()> {
    match &spec.path {
        Some(path) => std::fs::write(path, bytes).map_err(|source| ScenarioError::Io {
            path: path.clone(),
            source,
        }),
        None => std::io::stdout()
            .lock()
            .write_all(bytes)
            .map_err(|source| ScenarioError::Io {
                path: "<stdout>".into(),
                source,
            }),
    }
}

fn describe_report(out: &mut String, report: &InequalityReport, variants: &[Variant]) {
    let _ = writeln!(out, "  lhs = {:.12}", report.lhs);
    for &v in variants {
        if let Some(o) = report.outcome(v) {
            let verdict = if o.violated { "VIOLATED" } else { "satisfied" };
            let _ = writeln!(out, "  {v}: rhs = {:.12}  margin = {:+.12}  {verdict}", o.rhs, o.margin);
        }
    }
}

pub fn run_evaluate(config: &ScenarioConfig) -> Result<RunOutput> {
    expect_kind(config, ScenarioKind::Evaluate)?;
    let (row, report) = single_point(config)?;
    let bytes = encode_rows(std::slice::from_ref(&row), config.output.format)?;
    write_output(&config.output, &bytes)?;

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "{}: k={} d={} eta=({}, {})",
        row.scenario, row.k, row.d, row.eta1, row.eta2
    );
    describe_report(&mut summary, &report, &config.variants);
    let npt = if row.pt_min_eig < -1e-12 { " (NPT)" } else { "" };
    let _ = writeln!(
        summary,
        "  partial-transpose min eigenvalue = {:.12}{npt}",
        row.pt_min_eig
    );
    Ok(RunOutput { bytes, summary })
}

pub fn run_sweep(config: &ScenarioConfig) -> Result<RunOutput> {
    expect_kind(config, ScenarioKind::Sweep)?;
    let rows = sweep_rows(config)?;
    let bytes = encode_rows(&rows, config.output.format)?;
    write_output(&config.output, &bytes)?;

    let count = |f: fn(&ResultRow) -> bool| rows.iter().filter(|r| f(r)).count();
    let mut summary = String::new();
    let _ = writeln!(summary, "{}: {} grid points", config.label, rows.len());
    let _ = writeln!(
        summary,
        "  violations: r1 {}  r3 {}  r4 {}",
        count(|r| r.viol_r1),
        count(|r| r.viol_r3),
        count(|r| r.viol_r4)
    );
    Ok(RunOutput { bytes, summary })
}

pub fn run_lhv(config: &ScenarioConfig) -> Result<RunOutput> {
    expect_kind(config, ScenarioKind::LhvSearch)?;
    let report = lhv_report(config)?;
    let bytes = report.encode(config.output.format)?;
    write_output(&config.output, &bytes)?;

    let mut summary = String::new();
    let _ = writeln!(
        summary,
        "{}: {} search on {}, {} evaluations (seed {})",
        report.scenario,
        if report.constrained {
            "constrained"
        } else {
            "unconstrained"
        },
        report.variant,
        report.evaluations_used,
        report.seed
    );
    let _ = writeln!(
        summary,
        "  best lhs - rhs = {:+.12}  (lhs {:.12}, rhs {:.12})",
        report.best_score, report.lhs, report.rhs
    );
    let _ = writeln!(summary, "  constraint residual = {:.3e}", report.constraint_residual);
    Ok(RunOutput { bytes, summary })
}

pub fn run(config: &ScenarioConfig) -> Result<RunOutput> {
    match config.kind {
        ScenarioKind::Evaluate => run_evaluate(config),
        ScenarioKind::Sweep => run_sweep(config),
        ScenarioKind::LhvSearch => run_lhv(config),
    }
}
