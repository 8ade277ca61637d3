//! Seeded Euler Monte Carlo of the joint rate and wealth dynamics under an
//! arbitrary weight path.
//!
//! One Brownian motion drives both equations, matching the single-noise
//! model. Every path draws from its own counter-based substream keyed by
//! the path index, so results are a pure function of the inputs and the
//! seed, independent of how many worker threads execute the paths.
//! Accumulation runs over the index-ordered terminal values with
//! compensated summation, which keeps the reduction order fixed.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{require_finite, Error, Result};
use crate::market::{bond_volatility, MarketParams, VasicekParams};
use crate::policy::{PolicyPath, UtilitySpec};

/// Monte Carlo run configuration.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub n_paths: usize,
    pub n_steps: usize,
    pub seed: u64,
    /// Pair consecutive paths on mirrored draws.
    #[serde(default)]
    pub antithetic: bool,
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths == 0 {
            return Err(Error::invalid("n_paths", "need at least one path"));
        }
        if self.n_steps == 0 {
            return Err(Error::invalid("n_steps", "need at least one step"));
        }
        Ok(())
    }
}

/// Terminal objective applied to simulated wealth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TerminalPayoff {
    /// Terminal wealth itself.
    Linear,
    /// Power utility `x^gamma`.
    Power { gamma: f64 },
    /// The floored payoff `max(floor, x)`.
    Floored { floor: f64 },
}

impl TerminalPayoff {
    pub fn validate(&self) -> Result<()> {
        match self {
            TerminalPayoff::Linear => Ok(()),
            TerminalPayoff::Power { gamma } => {
                if !gamma.is_finite() || *gamma <= 0.0 {
                    Err(Error::invalid(
                        "gamma",
                        "payoff exponent must be finite and > 0",
                    ))
                } else {
                    Ok(())
                }
            }
            TerminalPayoff::Floored { floor } => {
                if !floor.is_finite() || *floor < 0.0 {
                    Err(Error::invalid(
                        "floor",
                        "payoff floor must be finite and >= 0",
                    ))
                } else {
                    Ok(())
                }
            }
        }
    }

    fn apply(&self, x: f64) -> f64 {
        match self {
            TerminalPayoff::Linear => x,
            TerminalPayoff::Power { gamma } => x.powf(*gamma),
            TerminalPayoff::Floored { floor } => x.max(*floor),
        }
    }
}

impl From<UtilitySpec> for TerminalPayoff {
    fn from(u: UtilitySpec) -> Self {
        match u {
            UtilitySpec::Linear => TerminalPayoff::Linear,
            UtilitySpec::Power { gamma } => TerminalPayoff::Power { gamma },
        }
    }
}

/// Summary statistics of a simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SimResult {
    /// Estimate of the expected terminal payoff.
    pub mean_utility: f64,
    /// Monte Carlo standard error of the mean.
    pub std_error: f64,
    pub mean_terminal_wealth: f64,
    /// Share of paths finishing below the bankruptcy level.
    pub fraction_below_floor: f64,
}

/// Per-path generator: seeded by the run seed, stream-keyed by the path
/// index. Antithetic mode pairs path `2k+1` with path `2k` on the same
/// stream and a flipped sign.
fn path_stream(cfg: &SimConfig, path_index: usize) -> (ChaCha12Rng, f64) {
    let (stream, sign) = if cfg.antithetic {
        (
            (path_index / 2) as u64,
            if path_index.is_multiple_of(2) {
                1.0
            } else {
                -1.0
            },
        )
    } else {
        (path_index as u64, 1.0)
    };
    let mut rng = ChaCha12Rng::seed_from_u64(cfg.seed);
    rng.set_stream(stream);
    (rng, sign)
}

/// Euler path of the short rate on the uniform step grid; returns the
/// `n_steps + 1` values starting from `r0`.
pub fn simulate_rate_path(
    v: &VasicekParams,
    m: &MarketParams,
    cfg: &SimConfig,
    path_index: usize,
) -> Result<Vec<f64>> {
    v.validate()?;
    m.validate()?;
    cfg.validate()?;
    let dt = m.t / cfg.n_steps as f64;
    let sqrt_dt = dt.sqrt();
    let (mut rng, sign) = path_stream(cfg, path_index);
    let mut rates = Vec::with_capacity(cfg.n_steps + 1);
    let mut r = m.r0;
    rates.push(r);
    for _ in 0..cfg.n_steps {
        let z: f64 = StandardNormal.sample(&mut rng);
        r += (v.theta_v - v.alpha * r) * dt + v.b * sqrt_dt * (sign * z);
        rates.push(r);
    }
    Ok(rates)
}

fn check_policy_grid(policy: &PolicyPath, m: &MarketParams) -> Result<()> {
    if policy.times[0] > 1e-9 {
        return Err(Error::GridMismatch(format!(
            "policy grid starts at {} instead of the beginning of the horizon",
            policy.times[0]
        )));
    }
    let last = *policy.times.last().expect("paths are non-empty");
    if last > m.t + 1e-9 {
        return Err(Error::GridMismatch(format!(
            "policy grid extends to {last}, beyond the horizon {}",
            m.t
        )));
    }
    Ok(())
}

/// Simulates terminal wealth for every path, ordered by path index.
///
/// Wealth follows the Euler recursion of its SDE with the rate path sharing
/// each step's Gaussian draw. An Euler step that would take wealth negative
/// absorbs it at zero.
pub fn simulate_paths(
    v: &VasicekParams,
    m: &MarketParams,
    policy: &PolicyPath,
    x0: f64,
    cfg: &SimConfig,
) -> Result<Vec<f64>> {
    v.validate()?;
    m.validate()?;
    cfg.validate()?;
    require_finite("x0", x0)?;
    if x0 < 0.0 {
        return Err(Error::invalid("x0", "initial wealth must be non-negative"));
    }
    check_policy_grid(policy, m)?;

    let n_steps = cfg.n_steps;
    let dt = m.t / n_steps as f64;
    let sqrt_dt = dt.sqrt();
    // Per-step coefficients are policy- and time-dependent only.
    let mut sigmas = Vec::with_capacity(n_steps);
    let mut weights = Vec::with_capacity(n_steps);
    for j in 0..n_steps {
        let t = m.t * j as f64 / n_steps as f64;
        sigmas.push(bond_volatility(v, m, t)?);
        weights.push(policy.weight_at(t));
    }

    let terminal: Vec<f64> = (0..cfg.n_paths)
        .into_par_iter()
        .map(|path_index| {
            let (mut rng, sign) = path_stream(cfg, path_index);
            let mut r = m.r0;
            let mut x = x0;
            for j in 0..n_steps {
                let z: f64 = StandardNormal.sample(&mut rng);
                let z = sign * z;
                let w = weights[j];
                let s = sigmas[j];
                let x_next = x + x * (w * m.zeta * s + r) * dt + x * w * s * sqrt_dt * z;
                x = if x_next < 0.0 { 0.0 } else { x_next };
                r += (v.theta_v - v.alpha * r) * dt + v.b * sqrt_dt * z;
            }
            x
        })
        .collect();
    Ok(terminal)
}

fn kahan_sum<I: Iterator<Item = f64>>(values: I) -> f64 {
    let mut sum = 0.0;
    let mut carry = 0.0;
    for v in values {
        let y = v - carry;
        let t = sum + y;
        carry = (t - sum) - y;
        sum = t;
    }
    sum
}

/// Reduces terminal wealth values to a [`SimResult`] under the given payoff.
/// `floor` is the bankruptcy level used for the tail fraction.
pub fn summarize(terminal: &[f64], payoff: &TerminalPayoff, floor: f64) -> Result<SimResult> {
    payoff.validate()?;
    require_finite("floor", floor)?;
    if terminal.is_empty() {
        return Err(Error::invalid("terminal", "no paths to summarize"));
    }
    let n = terminal.len() as f64;
    let mean_utility = kahan_sum(terminal.iter().map(|&x| payoff.apply(x))) / n;
    let var = if terminal.len() > 1 {
        kahan_sum(terminal.iter().map(|&x| {
            let d = payoff.apply(x) - mean_utility;
            d * d
        })) / (n - 1.0)
    } else {
        0.0
    };
    let mean_terminal_wealth = kahan_sum(terminal.iter().copied()) / n;
    let below = terminal.iter().filter(|&&x| x < floor).count();
    Ok(SimResult {
        mean_utility,
        std_error: (var / n).sqrt(),
        mean_terminal_wealth,
        fraction_below_floor: below as f64 / n,
    })
}

/// Runs the wealth simulation and summarizes it in one call.
pub fn simulate_wealth(
    v: &VasicekParams,
    m: &MarketParams,
    policy: &PolicyPath,
    payoff: &TerminalPayoff,
    floor: f64,
    x0: f64,
    cfg: &SimConfig,
) -> Result<SimResult> {
    let terminal = simulate_paths(v, m, policy, x0, cfg)?;
    summarize(&terminal, payoff, floor)
}

/// Simulates every policy under common random numbers (identical seed and
/// substreams) and ranks them by mean payoff, best first. Ties keep the
/// input order. Returns `(input_index, result)` rows.
pub fn compare_policies(
    v: &VasicekParams,
    m: &MarketParams,
    policies: &[PolicyPath],
    payoff: &TerminalPayoff,
    floor: f64,
    x0: f64,
    cfg: &SimConfig,
) -> Result<Vec<(usize, SimResult)>> {
    if policies.len() < 2 {
        return Err(Error::invalid(
            "policies",
            "need at least two policies to compare",
        ));
    }
    let mut rows = Vec::with_capacity(policies.len());
    for (i, policy) in policies.iter().enumerate() {
        rows.push((i, simulate_wealth(v, m, policy, payoff, floor, x0, cfg)?));
    }
    rows.sort_by(|a, b| {
        b.1.mean_utility
            .partial_cmp(&a.1.mean_utility)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    Ok(rows)
}
