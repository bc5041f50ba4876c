//! Ground truth and the Monte Carlo engine: exact propagators, exact
//! trajectory channels, statevector trajectories, and channel-mode
//! averaging with batch-means error bars.

use std::collections::BTreeMap;
use std::ops::Range;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{domain, invalid, Error, Result};
use crate::gadgets::{build_jump_gadget, UNITARY_TOL};
use crate::lindblad::{liouvillian, require_admissible, LindbladModel};
use crate::matcore::{
    diamond_distance_bounds, eigh, expm, kraus_to_superop, spectral_apply, trace_norm, CMat, DiamondBounds, SuperOp,
    C64,
};
use crate::trajectory::{compile_trajectory, tail_bound, trajectory_stream, SimulationBudget, TrajectoryPlan};

/// Number of batch means behind every MC error bar.
pub const BATCHES: usize = 20;

/// Trajectories summed sequentially inside one parallel task.
const CHUNK: usize = 256;

/// `e^{T𝓛}`; valid for any model, admissible or not.
pub fn exact_propagator(model: &LindbladModel, total_time: f64) -> Result<SuperOp> {
    if !(total_time >= 0.0) || !total_time.is_finite() {
        return Err(domain(format!("T must be finite and nonnegative, got {total_time}")));
    }
    SuperOp::new(model.dim(), expm(&liouvillian(model).matrix().scale_real(total_time))?)
}

/// The jump channel with Kraus operators `L_μ/√Γ`.
pub fn jump_channel(model: &LindbladModel) -> Result<SuperOp> {
    let gamma = require_admissible(model)?;
    if gamma <= 0.0 || model.jump_count() == 0 {
        return Err(domain("jump channel is undefined for Γ = 0"));
    }
    kraus_to_superop(&jump_kraus(model, gamma))
}

fn jump_kraus(model: &LindbladModel, gamma: f64) -> Vec<CMat> {
    let s = 1.0 / gamma.sqrt();
    model.jumps().iter().map(|l| l.scale_real(s)).collect()
}

/// `e^{−iHt}` from a single eigendecomposition of `H`.
#[derive(Clone, Debug)]
pub struct UnitaryEvolver {
    values: Vec<f64>,
    vectors: CMat,
}

impl UnitaryEvolver {
    pub fn new(hamiltonian: &CMat) -> Result<Self> {
        let (values, vectors) = eigh(hamiltonian)?;
        Ok(Self { values, vectors })
    }

    pub fn unitary(&self, t: f64) -> CMat {
        spectral_apply(&self.values, &self.vectors, |e| C64::from_polar(1.0, -e * t))
    }

    pub fn superop(&self, t: f64) -> SuperOp {
        SuperOp::unitary(&self.unitary(t)).expect("square unitary")
    }
}

/// `𝓤_res ∘ 𝓙 ∘ 𝓤_{t_N} ∘ ⋯ ∘ 𝓙 ∘ 𝓤_{t_1}` for a compiled plan.
pub fn trajectory_channel(model: &LindbladModel, plan: &TrajectoryPlan) -> Result<SuperOp> {
    let evolver = UnitaryEvolver::new(model.hamiltonian())?;
    let jump = if plan.jump_count() > 0 { Some(jump_channel(model)?) } else { None };
    let segments = |t: f64| evolver.superop(t);
    compose_plan(plan, &segments, jump.as_ref())
}

fn compose_plan(plan: &TrajectoryPlan, segment: &dyn Fn(f64) -> SuperOp, jump: Option<&SuperOp>) -> Result<SuperOp> {
    let mut acc = segment(plan.holding_times().first().copied().unwrap_or(plan.residual_time()));
    let rest = plan.holding_times().iter().skip(1).copied().chain(std::iter::once(plan.residual_time()));
    if plan.jump_count() == 0 {
        return Ok(acc);
    }
    let jump = jump.ok_or_else(|| domain("plan has jumps but the model has none"))?;
    for t in rest {
        acc = segment(t).after(&jump.after(&acc)?)?;
    }
    Ok(acc)
}

/// `e^{−iδY}` on the first qubit, identity on the rest.
pub fn perturbation_unitary(dim: usize, delta: f64) -> Result<CMat> {
    if dim < 2 || !dim.is_multiple_of(2) {
        return Err(domain(format!("error injection needs an even dimension, got {dim}")));
    }
    let (s, c) = delta.sin_cos();
    let rot = CMat::from_real(2, 2, &[c, -s, s, c])?;
    Ok(rot.kron(&CMat::identity(dim / 2)))
}

/// Rotation angle whose conjugation channel sits at diamond distance
/// `epsilon_h` from the identity.
///
/// For a unitary with eigenphases `±δ` the maximally entangled input is
/// optimal, so the normalized-Choi (lower) bound equals the diamond
/// distance `sin δ`; bisecting on it injects exactly `epsilon_h`.
pub fn calibrate_injection(dim: usize, epsilon_h: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&epsilon_h) {
        return Err(domain(format!("injected error must lie in [0, 1], got {epsilon_h}")));
    }
    if epsilon_h == 0.0 {
        return Ok(0.0);
    }
    let id = SuperOp::identity(dim);
    let dist = |delta: f64| -> Result<f64> {
        let p = SuperOp::unitary(&perturbation_unitary(dim, delta)?)?;
        Ok(diamond_distance_bounds(&p, &id)?.lower)
    };
    let (mut lo, mut hi) = (0.0, std::f64::consts::FRAC_PI_2);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if dist(mid)? < epsilon_h {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum McMode {
    ExactUnitary,
    GadgetSimulated,
    ErrorInjected,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: usize,
    pub seed: u64,
    pub mode: McMode,
    pub injected_epsilon_h: f64,
    pub workers: usize,
}

impl McConfig {
    pub fn new(samples: usize, seed: u64, mode: McMode) -> Self {
        Self { samples, seed, mode, injected_epsilon_h: 0.0, workers: 1 }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers;
        self
    }

    pub fn with_injected_error(mut self, epsilon_h: f64) -> Self {
        self.injected_epsilon_h = epsilon_h;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(invalid("samples must be positive"));
        }
        if self.workers == 0 {
            return Err(invalid("workers must be positive"));
        }
        if self.mode != McMode::ErrorInjected && self.injected_epsilon_h != 0.0 {
            return Err(invalid("injected error is only meaningful in error-injected mode"));
        }
        if !(self.injected_epsilon_h >= 0.0) {
            return Err(invalid("injected error must be nonnegative"));
        }
        Ok(())
    }
}

/// Channel-mode Monte Carlo output.
#[derive(Clone, Debug)]
pub struct McResult {
    pub mean_channel: SuperOp,
    pub batch_means: Vec<SuperOp>,
    /// Batch-means standard error of the diamond upper bound.
    pub mc_sigma: f64,
    pub sample_count: usize,
    pub restart_count: u64,
    pub jump_histogram: BTreeMap<usize, u64>,
}

impl McResult {
    pub fn distance_to(&self, reference: &SuperOp) -> Result<DiamondBounds> {
        diamond_distance_bounds(&self.mean_channel, reference)
    }
}

/// Statevector-mode Monte Carlo output.
#[derive(Clone, Debug)]
pub struct McStateResult {
    pub mean_state: CMat,
    pub batch_means: Vec<CMat>,
    /// Batch-means standard error of the trace distance.
    pub mc_sigma: f64,
    pub sample_count: usize,
    pub restart_count: u64,
    pub jump_histogram: BTreeMap<usize, u64>,
}

/// Jumps applied along one statevector trajectory.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct JumpRecord {
    /// Absolute times of the jumps.
    pub times: Vec<f64>,
    /// Index of the Kraus branch taken at each jump.
    pub branches: Vec<usize>,
    pub restarts: u32,
}

/// Everything a trajectory needs, precomputed once per run.
struct Engine {
    gamma: f64,
    total_time: f64,
    r: usize,
    evolver: UnitaryEvolver,
    perturbation: Option<CMat>,
    kraus: Vec<CMat>,
    jump: Option<SuperOp>,
}

impl Engine {
    fn new(model: &LindbladModel, total_time: f64, r: usize, cfg: &McConfig) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(domain(format!("T must be positive, got {total_time}")));
        }
        let gamma = require_admissible(model)?;
        let has_jumps = gamma > 0.0 && model.jump_count() > 0;
        if has_jumps && r == 0 {
            return Err(domain("truncation order must be at least 1 when Γ > 0"));
        }
        let kraus = match (has_jumps, cfg.mode) {
            (false, _) => Vec::new(),
            (true, McMode::GadgetSimulated) => {
                let alphas = model.jump_norms()?;
                build_jump_gadget(model, &alphas, UNITARY_TOL)?.kraus()
            }
            (true, _) => jump_kraus(model, gamma),
        };
        let jump = if has_jumps { Some(kraus_to_superop(&kraus)?) } else { None };
        let perturbation = if cfg.mode == McMode::ErrorInjected && cfg.injected_epsilon_h > 0.0 {
            let delta = calibrate_injection(model.dim(), cfg.injected_epsilon_h)?;
            Some(perturbation_unitary(model.dim(), delta)?)
        } else {
            None
        };
        Ok(Self {
            gamma: if has_jumps { gamma } else { 0.0 },
            total_time,
            r,
            evolver: UnitaryEvolver::new(model.hamiltonian())?,
            perturbation,
            kraus,
            jump,
        })
    }

    fn segment_unitary(&self, t: f64) -> CMat {
        let u = self.evolver.unitary(t);
        match &self.perturbation {
            Some(p) => p * &u,
            None => u,
        }
    }

    fn plan<R: Rng>(&self, rng: &mut R) -> Result<TrajectoryPlan> {
        compile_trajectory(rng, self.gamma, self.total_time, self.r)
    }

    fn channel(&self, plan: &TrajectoryPlan) -> Result<SuperOp> {
        let seg = |t: f64| SuperOp::unitary(&self.segment_unitary(t)).expect("square unitary");
        compose_plan(plan, &seg, self.jump.as_ref())
    }

    fn statevector<R: Rng>(&self, rng: &mut R, psi: &[C64]) -> Result<(Vec<C64>, JumpRecord)> {
        let plan = self.plan(rng)?;
        let mut state = psi.to_vec();
        let mut record = JumpRecord { restarts: plan.restarts(), ..JumpRecord::default() };
        let mut clock = 0.0;
        for &t in plan.holding_times() {
            state = self.segment_unitary(t).matvec(&state);
            clock += t;
            let branch = sample_branch(rng, &self.kraus, &state)?;
            let next = self.kraus[branch].matvec(&state);
            let norm = vec_norm(&next);
            state = next.into_iter().map(|z| z / norm).collect();
            record.times.push(clock);
            record.branches.push(branch);
        }
        state = self.segment_unitary(plan.residual_time()).matvec(&state);
        let norm = vec_norm(&state);
        state.iter_mut().for_each(|z| *z /= norm);
        Ok((state, record))
    }
}

fn vec_norm(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Picks branch `μ` with probability `‖K_μψ‖²`.
fn sample_branch<R: Rng>(rng: &mut R, kraus: &[CMat], psi: &[C64]) -> Result<usize> {
    let weights: Vec<f64> = kraus.iter().map(|k| vec_norm(&k.matvec(psi)).powi(2)).collect();
    let total: f64 = weights.iter().sum();
    if !(total > 0.0) {
        return Err(Error::Numerical("all jump branches have zero probability".into()));
    }
    let u = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (i, w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return Ok(i);
        }
    }
    Ok(weights.iter().rposition(|&w| w > 0.0).expect("positive total"))
}

/// One trajectory of the jump process on a pure state.
///
/// Between jumps the state evolves by `e^{−iHt}`; at each jump branch `μ`
/// is chosen with probability `‖L_μψ‖²/Γ` and the state becomes
/// `L_μψ/‖L_μψ‖`.
pub fn run_statevector_trajectory<R: Rng>(
    model: &LindbladModel,
    total_time: f64,
    r: usize,
    rng: &mut R,
    psi: &[C64],
) -> Result<(Vec<C64>, JumpRecord)> {
    check_state(model, psi)?;
    let engine = Engine::new(model, total_time, r, &McConfig::new(1, 0, McMode::ExactUnitary))?;
    engine.statevector(rng, psi)
}

fn check_state(model: &LindbladModel, psi: &[C64]) -> Result<()> {
    if psi.len() != model.dim() {
        return Err(invalid(format!("state has length {}, expected {}", psi.len(), model.dim())));
    }
    let n = vec_norm(psi);
    if (n - 1.0).abs() > 1e-10 {
        return Err(invalid(format!("input state has norm {n}, expected 1")));
    }
    Ok(())
}

struct ChunkSum {
    batch: usize,
    sum: CMat,
    restarts: u64,
    histogram: BTreeMap<usize, u64>,
}

/// Contiguous index ranges: `batches` batches, each cut into chunks of at
/// most `CHUNK` trajectories. The layout depends only on `samples`.
fn chunk_layout(samples: usize) -> Vec<(usize, Range<usize>)> {
    let batches = samples.min(BATCHES);
    let mut out = Vec::new();
    for b in 0..batches {
        let (start, end) = (b * samples / batches, (b + 1) * samples / batches);
        let mut s = start;
        while s < end {
            let e = (s + CHUNK).min(end);
            out.push((b, s..e));
            s = e;
        }
    }
    out
}

/// Per-batch `(sum, count)` pairs, total restarts, and the jump histogram.
type ChunkTotals = (Vec<(CMat, usize)>, u64, BTreeMap<usize, u64>);

/// Runs `per_trajectory` over all indices and returns per-batch sums.
///
/// Each chunk is summed in index order and chunk sums are combined in chunk
/// order, so the floating-point result does not depend on the worker count.
fn run_chunks(
    samples: usize,
    workers: usize,
    per_trajectory: impl Fn(u64) -> Result<(CMat, usize, u32)> + Sync,
) -> Result<ChunkTotals> {
    let layout = chunk_layout(samples);
    let work = || {
        layout
            .par_iter()
            .map(|(batch, range)| {
                let mut sum: Option<CMat> = None;
                let mut restarts = 0u64;
                let mut histogram = BTreeMap::new();
                for i in range.clone() {
                    let (m, jumps, rs) = per_trajectory(i as u64)?;
                    match &mut sum {
                        Some(s) => s.add_scaled(&m, C64::new(1.0, 0.0)),
                        None => sum = Some(m),
                    }
                    restarts += u64::from(rs);
                    *histogram.entry(jumps).or_insert(0) += 1;
                }
                Ok(ChunkSum { batch: *batch, sum: sum.expect("chunks are nonempty"), restarts, histogram })
            })
            .collect::<Result<Vec<_>>>()
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Numerical(format!("worker pool: {e}")))?;
    let chunks = pool.install(work)?;

    let batches = samples.min(BATCHES);
    let mut batch_sums: Vec<Option<(CMat, usize)>> = vec![None; batches];
    let mut restarts = 0;
    let mut histogram = BTreeMap::new();
    for (chunk, (_, range)) in chunks.into_iter().zip(&layout) {
        restarts += chunk.restarts;
        for (k, v) in chunk.histogram {
            *histogram.entry(k).or_insert(0) += v;
        }
        match &mut batch_sums[chunk.batch] {
            Some((s, n)) => {
                s.add_scaled(&chunk.sum, C64::new(1.0, 0.0));
                *n += range.len();
            }
            slot => *slot = Some((chunk.sum, range.len())),
        }
    }
    Ok((batch_sums.into_iter().map(|b| b.expect("every batch has work")).collect(), restarts, histogram))
}

fn overall_mean(batch_sums: &[(CMat, usize)], samples: usize) -> CMat {
    let mut total = batch_sums[0].0.clone();
    for (s, _) in &batch_sums[1..] {
        total.add_scaled(s, C64::new(1.0, 0.0));
    }
    total.scale_real(1.0 / samples as f64)
}

/// `sqrt(Σ_b d(M_b, M̄)² / (B(B − 1)))`; zero with fewer than two batches.
fn batch_sigma(distances: &[f64]) -> f64 {
    let b = distances.len();
    if b < 2 {
        return 0.0;
    }
    (distances.iter().map(|d| d * d).sum::<f64>() / (b * (b - 1)) as f64).sqrt()
}

/// Averages trajectory channels over `cfg.samples` compiled plans.
///
/// Trajectory `i` draws from stream `(cfg.seed, i)`. In gadget mode each
/// jump applies the system channel of the amplified jump gadget (with
/// `α_μ = ‖L_μ‖`); in error-injected mode every unitary segment is followed
/// by conjugation with `e^{−iδY}` on the first qubit at diamond distance
/// `cfg.injected_epsilon_h` from the identity.
pub fn mc_channel_estimate(
    model: &LindbladModel,
    total_time: f64,
    budget: &SimulationBudget,
    cfg: &McConfig,
) -> Result<McResult> {
    cfg.validate()?;
    let engine = Engine::new(model, total_time, budget.r, cfg)?;
    let (batch_sums, restart_count, jump_histogram) = run_chunks(cfg.samples, cfg.workers, |i| {
        let mut rng = trajectory_stream(cfg.seed, i);
        let plan = engine.plan(&mut rng)?;
        Ok((engine.channel(&plan)?.into_matrix(), plan.jump_count(), plan.restarts()))
    })?;
    let d = model.dim();
    let mean_channel = SuperOp::new(d, overall_mean(&batch_sums, cfg.samples))?;
    let batch_means = batch_sums
        .into_iter()
        .map(|(s, n)| SuperOp::new(d, s.scale_real(1.0 / n as f64)))
        .collect::<Result<Vec<_>>>()?;
    let distances = batch_means
        .iter()
        .map(|b| Ok(diamond_distance_bounds(b, &mean_channel)?.upper))
        .collect::<Result<Vec<_>>>()?;
    Ok(McResult {
        mean_channel,
        batch_means,
        mc_sigma: batch_sigma(&distances),
        sample_count: cfg.samples,
        restart_count,
        jump_histogram,
    })
}

/// Averages `|ψ(T)⟩⟨ψ(T)|` over statevector trajectories started from `psi`.
pub fn mc_state_estimate(
    model: &LindbladModel,
    total_time: f64,
    budget: &SimulationBudget,
    cfg: &McConfig,
    psi: &[C64],
) -> Result<McStateResult> {
    cfg.validate()?;
    check_state(model, psi)?;
    let engine = Engine::new(model, total_time, budget.r, cfg)?;
    let (batch_sums, restart_count, jump_histogram) = run_chunks(cfg.samples, cfg.workers, |i| {
        let mut rng = trajectory_stream(cfg.seed, i);
        let (out, record) = engine.statevector(&mut rng, psi)?;
        Ok((CMat::outer(&out, &out), record.branches.len(), record.restarts))
    })?;
    let mean_state = overall_mean(&batch_sums, cfg.samples);
    let batch_means: Vec<CMat> = batch_sums.into_iter().map(|(s, n)| s.scale_real(1.0 / n as f64)).collect();
    let distances =
        batch_means.iter().map(|b| Ok(0.5 * trace_norm(&(b - &mean_state))?)).collect::<Result<Vec<_>>>()?;
    Ok(McStateResult {
        mean_state,
        batch_means,
        mc_sigma: batch_sigma(&distances),
        sample_count: cfg.samples,
        restart_count,
        jump_histogram,
    })
}

/// One row of the error-budget table.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ErrorBudgetRow {
    pub epsilon_h: f64,
    /// Diamond upper bound between the MC mean channel and `e^{T𝓛}`.
    pub measured: f64,
    pub mc_sigma: f64,
    /// `tail_bound + (r + 1)ε_H`.
    pub bound: f64,
    /// `measured ≤ bound + 5σ`.
    pub within: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ErrorBudgetReport {
    pub r: usize,
    pub tail_bound: f64,
    pub rows: Vec<ErrorBudgetRow>,
    /// Least-squares slope of `measured` against `ε_H`.
    pub slope: f64,
}

/// Runs error-injected MC at each `ε_H` in `grid` and compares the measured
/// distance with `tail_bound(Γ, T, r) + (r + 1)ε_H`.
///
/// Every grid point reuses the same seed, so the fitted slope compares runs
/// with common random numbers.
pub fn validate_error_budget(
    model: &LindbladModel,
    total_time: f64,
    epsilon: f64,
    grid: &[f64],
    samples: usize,
    seed: u64,
    workers: usize,
) -> Result<ErrorBudgetReport> {
    if grid.is_empty() {
        return Err(invalid("empty ε_H grid"));
    }
    let gamma = require_admissible(model)?;
    let budget = crate::trajectory::allocate_budget(gamma, total_time, epsilon)?;
    let tail = tail_bound(gamma, total_time, budget.r);
    let exact = exact_propagator(model, total_time)?;
    let mut rows = Vec::with_capacity(grid.len());
    for &eh in grid {
        let cfg = McConfig::new(samples, seed, McMode::ErrorInjected).with_injected_error(eh).with_workers(workers);
        let res = mc_channel_estimate(model, total_time, &budget, &cfg)?;
        let measured = res.distance_to(&exact)?.upper;
        let bound = tail + (budget.r as f64 + 1.0) * eh;
        rows.push(ErrorBudgetRow {
            epsilon_h: eh,
            measured,
            mc_sigma: res.mc_sigma,
            bound,
            within: measured <= bound + 5.0 * res.mc_sigma,
        });
    }
    let slope = least_squares_slope(&rows.iter().map(|r| (r.epsilon_h, r.measured)).collect::<Vec<_>>());
    Ok(ErrorBudgetReport { r: budget.r, tail_bound: tail, rows, slope })
}

/// Slope of the ordinary least-squares line through `points`; zero when
/// the abscissae do not vary.
pub fn least_squares_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::paulis::*;

    fn dephasing(g: f64) -> LindbladModel {
        LindbladModel::new(CMat::zeros(2, 2), vec![z().scale_real(g.sqrt())]).unwrap()
    }

    #[test]
    fn zero_time_propagator_is_identity() {
        let p = exact_propagator(&dephasing(1.0), 0.0).unwrap();
        assert!(p.max_abs_diff(&SuperOp::identity(2)) < 1e-15);
        assert!(exact_propagator(&dephasing(1.0), -1.0).is_err());
    }

    #[test]
    fn dephasing_jump_channel_is_z_conjugation() {
        let j = jump_channel(&dephasing(0.4)).unwrap();
        assert!(j.max_abs_diff(&SuperOp::unitary(&z()).unwrap()) < 1e-14);
        let none = LindbladModel::hamiltonian_only(x()).unwrap();
        assert!(matches!(jump_channel(&none), Err(Error::Domain(_))));
    }

    #[test]
    fn single_jump_plan_is_z_conjugation() {
        let plan = TrajectoryPlan::new(vec![0.3], 1.0).unwrap();
        let ch = trajectory_channel(&dephasing(1.0), &plan).unwrap();
        assert!(ch.max_abs_diff(&SuperOp::unitary(&z()).unwrap()) < 1e-14);
        let plan2 = TrajectoryPlan::new(vec![0.3, 0.2], 1.0).unwrap();
        assert!(trajectory_channel(&dephasing(1.0), &plan2).unwrap().max_abs_diff(&SuperOp::identity(2)) < 1e-14);
    }

    #[test]
    fn chunk_layout_covers_every_index_once() {
        for n in [1, 7, 20, 21, 1000, 12345] {
            let layout = chunk_layout(n);
            let mut next = 0;
            for (_, r) in &layout {
                assert_eq!(r.start, next);
                next = r.end;
            }
            assert_eq!(next, n);
            assert_eq!(layout.last().unwrap().0 + 1, n.min(BATCHES));
        }
    }

    #[test]
    fn injection_calibration_hits_target() {
        for d in [2, 4] {
            let delta = calibrate_injection(d, 1e-2).unwrap();
            assert!((delta.sin() - 1e-2).abs() < 1e-12);
        }
        assert_eq!(calibrate_injection(2, 0.0).unwrap(), 0.0);
        assert!(perturbation_unitary(3, 0.1).is_err());
    }

    #[test]
    fn config_validation() {
        let m = dephasing(1.0);
        let b = SimulationBudget { epsilon: 0.1, r: 4, epsilon_h: 0.0 };
        let bad = McConfig::new(10, 1, McMode::ExactUnitary).with_injected_error(0.1);
        assert!(matches!(mc_channel_estimate(&m, 1.0, &b, &bad), Err(Error::InvalidInput(_))));
        let zero = McConfig::new(0, 1, McMode::ExactUnitary);
        assert!(matches!(mc_channel_estimate(&m, 1.0, &b, &zero), Err(Error::InvalidInput(_))));
    }

    #[test]
    fn slope_of_a_line() {
        let pts = [(0.0, 1.0), (1.0, 3.0), (2.0, 5.0)];
        assert!((least_squares_slope(&pts) - 2.0).abs() < 1e-15);
    }
}
