//! Holding-time sampling, the jump counting process, and the randomized
//! trajectory compiler with truncation at `r` jumps.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{domain, Error, Result};

/// Compilation gives up after this many rejected attempts.
pub const MAX_RESTARTS: u32 = 1_000_000;

/// Random stream for trajectory `index` of a run seeded with `seed`.
///
/// Streams are ChaCha8 with the trajectory index as stream id, so any
/// trajectory can be regenerated without touching the others.
pub fn trajectory_stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// One compiled circuit skeleton: unitary segments of the given lengths,
/// each followed by a jump, then a final residual segment.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPlan {
    holding_times: Vec<f64>,
    total_time: f64,
    residual_time: f64,
    restarts: u32,
}

impl TrajectoryPlan {
    /// Builds a plan from explicit holding times; their sum must not exceed `total_time`.
    pub fn new(holding_times: Vec<f64>, total_time: f64) -> Result<Self> {
        if !(total_time > 0.0) || !total_time.is_finite() {
            return Err(domain("total time must be positive and finite"));
        }
        if holding_times.iter().any(|&t| !(t >= 0.0) || !t.is_finite()) {
            return Err(domain("holding times must be finite and nonnegative"));
        }
        let used: f64 = holding_times.iter().sum();
        if used > total_time {
            return Err(domain(format!("holding times sum to {used} > T = {total_time}")));
        }
        Ok(Self { holding_times, total_time, residual_time: total_time - used, restarts: 0 })
    }

    pub fn holding_times(&self) -> &[f64] {
        &self.holding_times
    }

    pub fn jump_count(&self) -> usize {
        self.holding_times.len()
    }

    pub fn total_time(&self) -> f64 {
        self.total_time
    }

    pub fn residual_time(&self) -> f64 {
        self.residual_time
    }

    /// Rejected attempts before this plan was accepted.
    pub fn restarts(&self) -> u32 {
        self.restarts
    }

    /// Segment lengths in application order: the holding times then the residual.
    pub fn segments(&self) -> impl Iterator<Item = f64> + '_ {
        self.holding_times.iter().copied().chain(std::iter::once(self.residual_time))
    }
}

/// Error budget for one simulation.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct SimulationBudget {
    pub epsilon: f64,
    /// Maximum number of jumps compiled into one trajectory.
    pub r: usize,
    /// Per-segment Hamiltonian simulation error allowance.
    pub epsilon_h: f64,
}

fn check_rate(gamma: f64) -> Result<()> {
    if !(gamma > 0.0) || !gamma.is_finite() {
        return Err(domain(format!("jump rate must be positive and finite, got {gamma}")));
    }
    Ok(())
}

fn check_time(t: f64) -> Result<()> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(domain(format!("time must be positive and finite, got {t}")));
    }
    Ok(())
}

fn check_epsilon(eps: f64) -> Result<()> {
    if !(eps > 0.0 && eps < 1.0) {
        return Err(domain(format!("epsilon must lie in (0, 1), got {eps}")));
    }
    Ok(())
}

/// Inversion sampling of `Exp(Γ)`: `(1/Γ) ln(1/(1 − η))`.
pub fn holding_time_from_uniform(eta: f64, gamma: f64) -> Result<f64> {
    check_rate(gamma)?;
    if !(0.0..1.0).contains(&eta) {
        return Err(domain(format!("uniform variate must lie in [0, 1), got {eta}")));
    }
    Ok(-(-eta).ln_1p() / gamma)
}

pub fn sample_holding_time<R: Rng + ?Sized>(rng: &mut R, gamma: f64) -> Result<f64> {
    holding_time_from_uniform(rng.random::<f64>(), gamma)
}

/// Draws holding times until their running sum exceeds `T`; the overshooting
/// draw is discarded and a plan with at most `r` jumps is accepted. If
/// `r + 1` draws all fit inside `T` the attempt is thrown away and sampling
/// restarts.
pub fn compile_trajectory<R: Rng + ?Sized>(rng: &mut R, gamma: f64, total_time: f64, r: usize) -> Result<TrajectoryPlan> {
    check_time(total_time)?;
    if r == 0 && gamma > 0.0 {
        return Err(domain("truncation order must be at least 1"));
    }
    if gamma == 0.0 {
        return TrajectoryPlan::new(Vec::new(), total_time);
    }
    check_rate(gamma)?;
    let mut times = Vec::with_capacity(r);
    for restarts in 0..=MAX_RESTARTS {
        times.clear();
        let mut used = 0.0;
        for _ in 0..=r {
            let t = sample_holding_time(rng, gamma)?;
            if used + t > total_time {
                let mut plan = TrajectoryPlan::new(times, total_time)?;
                plan.restarts = restarts;
                return Ok(plan);
            }
            used += t;
            times.push(t);
        }
    }
    Err(Error::Numerical(format!("trajectory compilation exceeded {MAX_RESTARTS} restarts")))
}

/// Number of jumps of the untruncated counting process in `[0, T]`.
pub fn sample_jump_count<R: Rng + ?Sized>(rng: &mut R, gamma: f64, total_time: f64) -> Result<usize> {
    check_time(total_time)?;
    if gamma == 0.0 {
        return Ok(0);
    }
    check_rate(gamma)?;
    let mut used = 0.0;
    let mut n = 0;
    loop {
        used += sample_holding_time(rng, gamma)?;
        if used > total_time {
            return Ok(n);
        }
        n += 1;
    }
}

fn ln_factorial(n: usize) -> f64 {
    (2..=n).map(|k| (k as f64).ln()).sum()
}

/// Poisson probability `e^{−ΓT}(ΓT)ⁿ/n!` that exactly `n` jumps occur.
pub fn counting_pmf(n: usize, gamma: f64, total_time: f64) -> f64 {
    let x = gamma * total_time;
    if x == 0.0 {
        return if n == 0 { 1.0 } else { 0.0 };
    }
    (n as f64 * x.ln() - x - ln_factorial(n)).exp()
}

/// `G_n(T) = Pr(S_n > T) = Σ_{a<n} e^{−ΓT}(ΓT)^a/a!`, the survival function
/// of the `n`-th arrival time.
pub fn erlang_tail(n: usize, gamma: f64, total_time: f64) -> Result<f64> {
    if n < 1 {
        return Err(domain("erlang_tail needs n ≥ 1"));
    }
    check_rate(gamma)?;
    check_time(total_time)?;
    Ok((0..n).map(|a| counting_pmf(a, gamma, total_time)).sum())
}

fn ln_tail_bound(x: f64, r: usize) -> f64 {
    let r = r as f64;
    r * (1.0 + x.ln() - r.ln()) - x
}

/// Chernoff bound `(eΓT/r)^r e^{−ΓT}` on `Pr(N(T) > r)`.
pub fn tail_bound(gamma: f64, total_time: f64, r: usize) -> f64 {
    let x = gamma * total_time;
    if x == 0.0 {
        return 0.0;
    }
    if r == 0 {
        return 1.0;
    }
    ln_tail_bound(x, r).exp()
}

/// Smallest `r ≥ max(1, ⌈ΓT⌉)` whose tail bound is at most `ε/2`; zero when `ΓT = 0`.
pub fn truncation_order(gamma: f64, total_time: f64, epsilon: f64) -> Result<usize> {
    check_epsilon(epsilon)?;
    check_time(total_time)?;
    if !(gamma >= 0.0) || !gamma.is_finite() {
        return Err(domain("jump rate must be nonnegative and finite"));
    }
    let x = gamma * total_time;
    if x == 0.0 {
        return Ok(0);
    }
    let target = (epsilon / 2.0).ln();
    let mut r = (x.ceil() as usize).max(1);
    while ln_tail_bound(x, r) > target {
        r += 1;
    }
    Ok(r)
}

/// Picks `r` from [`truncation_order`] and splits the remaining half of the
/// budget evenly over the `r + 1` Hamiltonian segments.
pub fn allocate_budget(gamma: f64, total_time: f64, epsilon: f64) -> Result<SimulationBudget> {
    let r = truncation_order(gamma, total_time, epsilon)?;
    Ok(SimulationBudget { epsilon, r, epsilon_h: epsilon / (2.0 * (r as f64 + 1.0)) })
}

/// Kolmogorov–Smirnov statistic of `samples` against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Critical KS value `1.63/√n` at significance 0.01.
pub fn ks_critical_01(n: usize) -> f64 {
    1.63 / (n as f64).sqrt()
}

/// Total-variation distance between an empirical histogram (`counts[n]` is
/// the number of observations of `n`) and a pmf on the nonnegative integers.
pub fn total_variation(counts: &[u64], pmf: impl Fn(usize) -> f64) -> f64 {
    let total: u64 = counts.iter().sum();
    let mut covered = 0.0;
    let mut acc = 0.0;
    for (n, &c) in counts.iter().enumerate() {
        let p = pmf(n);
        covered += p;
        acc += (c as f64 / total as f64 - p).abs();
    }
    0.5 * (acc + (1.0 - covered).max(0.0))
}
