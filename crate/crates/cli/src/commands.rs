use std::collections::BTreeMap;
use std::path::Path;

use serde::Serialize;
use serde_json::json;
use trajlind::gadgets::{build_jump_gadget, resource_ledger, ResourceLedger, UNITARY_TOL};
use trajlind::lindblad::{check_constraint, model_from_json, require_admissible, ConstraintReport, LindbladModel};
use trajlind::matcore::{choi_distance, op_norm, DiamondBounds};
use trajlind::oracle::{exact_propagator, jump_channel, mc_channel_estimate, McConfig, McMode};
use trajlind::trajectory::{
    allocate_budget, ks_critical_01, ks_statistic, sample_holding_time, sample_jump_count, tail_bound,
    total_variation, trajectory_stream, truncation_order, SimulationBudget,
};

use crate::output::{emit, format_float, to_json, RunManifest};
use crate::CliError;

/// Ancilla qubits per block encoding.
const BLOCK_ANCILLAS: u32 = 1;

fn load_model(path: &Path) -> Result<LindbladModel, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    Ok(model_from_json(&text)?)
}

fn positive(name: &str, v: f64) -> Result<(), CliError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(CliError::Input(format!("--{name} must be positive and finite, got {v}")))
    }
}

/// Ledger scales: jump norms, or nothing when the model has no dissipation.
fn ledger_for(model: &LindbladModel, gamma: f64, t: f64, eps: f64) -> Result<ResourceLedger, CliError> {
    let alphas = if gamma > 0.0 { model.jump_norms()?.into_iter().filter(|&a| a > 0.0).collect() } else { Vec::new() };
    let alpha_h = op_norm(model.hamiltonian())?;
    Ok(resource_ledger(gamma, t, eps, alpha_h, &alphas, BLOCK_ANCILLAS)?)
}

#[derive(Serialize)]
struct CheckOutput {
    report: ConstraintReport,
    manifest: RunManifest,
}

pub fn check(model_path: &Path, tol: f64) -> Result<u8, CliError> {
    if !(tol >= 0.0) {
        return Err(CliError::Input(format!("--tol must be nonnegative, got {tol}")));
    }
    let model = load_model(model_path)?;
    let report = check_constraint(&model, tol);
    let admissible = report.admissible;
    let manifest = RunManifest::new("check", Some(model_path), json!({ "tol": tol }));
    emit(None, &to_json(&CheckOutput { report, manifest })?)?;
    Ok(if admissible { 0 } else { 2 })
}

pub struct RunArgs<'a> {
    pub model: &'a Path,
    pub time: f64,
    pub epsilon: f64,
    pub samples: usize,
    pub seed: u64,
    pub mode: McMode,
    pub injected_epsilon_h: Option<f64>,
    pub workers: usize,
    pub out: Option<&'a Path>,
}

#[derive(Serialize)]
struct RunOutput {
    budget: SimulationBudget,
    distance: DiamondBounds,
    mc_sigma: f64,
    restart_count: u64,
    jump_histogram: BTreeMap<usize, u64>,
    ledger: ResourceLedger,
    manifest: RunManifest,
}

pub fn run(args: RunArgs<'_>) -> Result<u8, CliError> {
    positive("time", args.time)?;
    if !(args.epsilon > 0.0 && args.epsilon < 1.0) {
        return Err(CliError::Input(format!("--epsilon must lie in (0, 1), got {}", args.epsilon)));
    }
    if args.samples == 0 || args.workers == 0 {
        return Err(CliError::Input("--samples and --workers must be positive".into()));
    }
    if args.injected_epsilon_h.is_some() && args.mode != McMode::ErrorInjected {
        return Err(CliError::Input("--injected-epsilon-h requires --mode error-injected".into()));
    }
    let model = load_model(args.model)?;
    let gamma = require_admissible(&model)?;
    let budget = allocate_budget(gamma, args.time, args.epsilon)?;
    let injected = match args.mode {
        McMode::ErrorInjected => args.injected_epsilon_h.unwrap_or(budget.epsilon_h),
        _ => 0.0,
    };
    let cfg = McConfig::new(args.samples, args.seed, args.mode).with_injected_error(injected).with_workers(args.workers);
    let res = mc_channel_estimate(&model, args.time, &budget, &cfg)?;
    let distance = res.distance_to(&exact_propagator(&model, args.time)?)?;
    let out = RunOutput {
        budget,
        distance,
        mc_sigma: res.mc_sigma,
        restart_count: res.restart_count,
        jump_histogram: res.jump_histogram,
        ledger: ledger_for(&model, gamma, args.time, args.epsilon)?,
        manifest: RunManifest::new(
            "run",
            Some(args.model),
            json!({
                "time": args.time,
                "epsilon": args.epsilon,
                "samples": args.samples,
                "seed": args.seed,
                "mode": args.mode,
                "injected_epsilon_h": injected,
                "workers": args.workers,
            }),
        ),
    };
    emit(args.out, &to_json(&out)?)?;
    Ok(0)
}

pub fn sweep(model_path: &Path, eps_list: &[f64], time_list: &[f64], out: Option<&Path>) -> Result<u8, CliError> {
    if eps_list.is_empty() || time_list.is_empty() {
        return Err(CliError::Input("--epsilon-list and --time-list must be nonempty".into()));
    }
    for &t in time_list {
        positive("time-list", t)?;
    }
    if let Some(e) = eps_list.iter().find(|&&e| !(e > 0.0 && e < 1.0)) {
        return Err(CliError::Input(format!("--epsilon-list entries must lie in (0, 1), got {e}")));
    }
    let model = load_model(model_path)?;
    let gamma = require_admissible(&model)?;
    let manifest = RunManifest::new(
        "sweep",
        Some(model_path),
        json!({ "epsilon_list": eps_list, "time_list": time_list }),
    );

    let mut body = format!("# manifest: {}", to_json(&manifest)?).into_bytes();
    {
        let mut w = csv::Writer::from_writer(&mut body);
        w.write_record(["T", "epsilon", "r", "jump_queries", "hamiltonian_queries", "gate_count", "tail_bound"])?;
        for &t in time_list {
            for &eps in eps_list {
                let r = truncation_order(gamma, t, eps)?;
                let ledger = ledger_for(&model, gamma, t, eps)?;
                w.write_record([
                    format_float(t),
                    format_float(eps),
                    r.to_string(),
                    format_float(ledger.jump_queries),
                    format_float(ledger.hamiltonian_queries),
                    format_float(ledger.gate_count),
                    format_float(tail_bound(gamma, t, r)),
                ])?;
            }
        }
        w.flush().map_err(|e| CliError::Io(e.to_string()))?;
    }
    emit(out, std::str::from_utf8(&body).expect("CSV is UTF-8"))?;
    Ok(0)
}

#[derive(Serialize)]
struct StatsOutput {
    samples: usize,
    ks_statistic: f64,
    ks_critical_01: f64,
    tv_distance: f64,
    r: usize,
    empirical_tail: f64,
    tail_bound: f64,
    tail_sigma: f64,
    manifest: RunManifest,
}

pub fn stats(gamma: f64, time: f64, samples: usize, seed: u64, epsilon: f64, out: Option<&Path>) -> Result<u8, CliError> {
    positive("gamma", gamma)?;
    positive("time", time)?;
    if samples < 2 {
        return Err(CliError::Input("--samples must be at least 2".into()));
    }
    let mut rng = trajectory_stream(seed, 0);
    let holding = (0..samples).map(|_| sample_holding_time(&mut rng, gamma)).collect::<Result<Vec<_>, _>>()?;
    let ks = ks_statistic(&holding, |t| 1.0 - (-gamma * t).exp());

    let mut rng = trajectory_stream(seed, 1);
    let mut counts: Vec<u64> = Vec::new();
    for _ in 0..samples {
        let n = sample_jump_count(&mut rng, gamma, time)?;
        if counts.len() <= n {
            counts.resize(n + 1, 0);
        }
        counts[n] += 1;
    }
    let tv = total_variation(&counts, |n| trajlind::trajectory::counting_pmf(n, gamma, time));
    let r = truncation_order(gamma, time, epsilon)?;
    let over: u64 = counts.iter().skip(r + 1).sum();
    let bound = tail_bound(gamma, time, r);
    let report = StatsOutput {
        samples,
        ks_statistic: ks,
        ks_critical_01: ks_critical_01(samples),
        tv_distance: tv,
        r,
        empirical_tail: over as f64 / samples as f64,
        tail_bound: bound,
        tail_sigma: (bound * (1.0 - bound).max(0.0) / samples as f64).sqrt(),
        manifest: RunManifest::new(
            "stats",
            None,
            json!({ "gamma": gamma, "time": time, "samples": samples, "seed": seed, "epsilon": epsilon }),
        ),
    };
    emit(out, &to_json(&report)?)?;
    Ok(0)
}

#[derive(Serialize)]
struct UnitarityResiduals {
    prep_oracle: f64,
    select_unitary: f64,
    w_circuit: f64,
    iterate: f64,
    circuit: f64,
}

#[derive(Serialize)]
struct GadgetOutput {
    alphas: Vec<f64>,
    gamma: f64,
    p0_raw: f64,
    p0: f64,
    theta: f64,
    iterations: usize,
    padded_weight: f64,
    choi_distance: f64,
    trace_residual: f64,
    unitarity_residuals: UnitarityResiduals,
    manifest: RunManifest,
}

pub fn gadget(model_path: &Path, alphas: Option<&[f64]>, out: Option<&Path>) -> Result<u8, CliError> {
    let model = load_model(model_path)?;
    require_admissible(&model)?;
    let alphas = match alphas {
        Some(a) => a.to_vec(),
        None => model.jump_norms()?,
    };
    let g = build_jump_gadget(&model, &alphas, UNITARY_TOL)?;
    let channel = g.channel();
    let report = GadgetOutput {
        choi_distance: choi_distance(&channel, &jump_channel(&model)?)?,
        trace_residual: channel.trace_preservation_residual(),
        unitarity_residuals: UnitarityResiduals {
            prep_oracle: g.prep_oracle.unitarity_residual(),
            select_unitary: g.select_unitary.unitarity_residual(),
            w_circuit: g.w_circuit.unitarity_residual(),
            iterate: g.iterate.unitarity_residual(),
            circuit: g.circuit.unitarity_residual(),
        },
        alphas: g.alphas.clone(),
        gamma: g.gamma,
        p0_raw: g.p0_raw,
        p0: g.p0,
        theta: g.theta,
        iterations: g.iterations,
        padded_weight: g.padded_weight,
        manifest: RunManifest::new("gadget", Some(model_path), json!({ "alphas": alphas })),
    };
    emit(out, &to_json(&report)?)?;
    Ok(0)
}
