//! Brute-force verification of the closed-form policy against the
//! dynamic-programming optimality condition.
//!
//! The candidate value function is `G = x^gamma * exp(a(t) + beta(t) r)`.
//! Applying the controlled generator to it and discarding the terms that do
//! not involve the weight leaves a concave quadratic in `pi` once the common
//! positive factor is divided out. Its grid maximizer must coincide with the
//! closed-form weight at every time, up to one grid step. The unknown `a(t)`
//! only scales the quadratic, so it never needs to be solved for.

use crate::error::{require_finite, Error, Result};
use crate::market::{bond_volatility, MarketParams, VasicekParams};
use crate::policy::{hedge_coefficient, optimal_weight, ClampMode, UtilitySpec};

/// Point probe of the candidate value function: state, time, exponent, and
/// the hedging coefficient in force there. The derivative bundle is carried
/// as ratios to the (positive) function value, which is all the weight
/// optimization can see.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValueFunctionProbe {
    /// Power-utility exponent, in (0, 1).
    pub gamma: f64,
    /// Hedging coefficient beta(t) at the probe time.
    pub beta_t: f64,
    /// Wealth level, strictly positive.
    pub x: f64,
    /// Short rate at the probe; enters only through the common factor.
    pub r: f64,
    /// Probe time, within the decision horizon.
    pub t: f64,
}

impl ValueFunctionProbe {
    pub fn validate(&self) -> Result<()> {
        if !self.gamma.is_finite() || self.gamma <= 0.0 || self.gamma >= 1.0 {
            return Err(Error::invalid("gamma", "exponent must lie in (0, 1)"));
        }
        if !self.x.is_finite() || self.x <= 0.0 {
            return Err(Error::invalid("x", "wealth must be finite and > 0"));
        }
        require_finite("beta_t", self.beta_t)?;
        require_finite("r", self.r)?;
        require_finite("t", self.t)?;
        Ok(())
    }

    /// `G_x / G`
    fn dx_ratio(&self) -> f64 {
        self.gamma / self.x
    }

    /// `G_xx / G`; negative on (0, 1), the concavity that makes the
    /// quadratic well-posed.
    fn dxx_ratio(&self) -> f64 {
        self.gamma * (self.gamma - 1.0) / (self.x * self.x)
    }

    /// `G_xr / G`
    fn dxr_ratio(&self) -> f64 {
        self.gamma * self.beta_t / self.x
    }
}

/// Weight-dependent part of the generator applied to the candidate value
/// function, normalized by the function value: `quad * pi^2 + lin * pi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianSlice {
    /// Coefficient of `pi^2`; strictly negative for a valid probe.
    pub quad: f64,
    /// Coefficient of `pi`.
    pub lin: f64,
}

impl HamiltonianSlice {
    pub fn value(&self, pi: f64) -> f64 {
        (self.quad * pi + self.lin) * pi
    }

    /// Stationary point `-lin / (2 quad)` of the quadratic.
    pub fn vertex(&self) -> f64 {
        -self.lin / (2.0 * self.quad)
    }
}

/// Assembles the normalized weight slice of the generator at a probe point.
///
/// The second-order terms contribute `0.5 x^2 sigma^2 pi^2 G_xx` and the
/// rate cross term `x pi b sigma G_xr`; the first-order wealth term adds
/// `x pi zeta sigma G_x`. Dividing by `G` leaves
/// `quad = 0.5 sigma^2 gamma (gamma - 1)` and
/// `lin = sigma gamma (b beta + zeta)`, with the wealth level cancelling.
pub fn hamiltonian_slice(
    probe: &ValueFunctionProbe,
    v: &VasicekParams,
    m: &MarketParams,
) -> Result<HamiltonianSlice> {
    probe.validate()?;
    if probe.t < 0.0 || probe.t > m.t {
        return Err(Error::OutOfDomain {
            name: "t",
            value: probe.t,
            lo: 0.0,
            hi: m.t,
        });
    }
    let sigma = bond_volatility(v, m, probe.t)?;
    if sigma <= 0.0 {
        return Err(Error::invalid(
            "sigma",
            "bond volatility must be positive at the probe",
        ));
    }
    let x = probe.x;
    let quad = 0.5 * x * x * sigma * sigma * probe.dxx_ratio();
    let lin = x * v.b * sigma * probe.dxr_ratio() + x * m.zeta * sigma * probe.dx_ratio();
    Ok(HamiltonianSlice { quad, lin })
}

/// Maximizes `quad * pi^2 + lin * pi` over the grid
/// `{-delta, -delta + step, ..., +delta}` by exhaustive evaluation.
///
/// Both cap boundaries are always members of the grid. Ties resolve toward
/// the smaller weight magnitude.
pub fn grid_argmax(slice: &HamiltonianSlice, delta: f64, grid_step: f64) -> Result<f64> {
    require_finite("quad", slice.quad)?;
    require_finite("lin", slice.lin)?;
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::invalid("delta", "cap must be finite and > 0"));
    }
    if !grid_step.is_finite() || grid_step <= 0.0 {
        return Err(Error::invalid(
            "grid_step",
            "resolution must be finite and > 0",
        ));
    }

    let mut best_pi = -delta;
    let mut best_val = slice.value(-delta);
    let mut consider = |pi: f64| {
        let val = slice.value(pi);
        if val > best_val || (val == best_val && pi.abs() < best_pi.abs()) {
            best_val = val;
            best_pi = pi;
        }
    };

    let mut k = 1u64;
    loop {
        let pi = -delta + k as f64 * grid_step;
        if pi >= delta {
            break;
        }
        consider(pi);
        k += 1;
    }
    consider(delta);
    Ok(best_pi)
}

/// Outcome of sweeping the optimality check across the time grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyReport {
    /// Largest gap between the grid maximizer and the closed-form weight.
    pub max_deviation: f64,
    /// Time at which the largest gap occurred.
    pub worst_time: f64,
    /// Whether every gap stayed within one grid step.
    pub pass: bool,
}

/// Checks an arbitrary weight rule against the brute-force grid maximizer
/// on a uniform time grid. `weight_fn` receives each grid time and returns
/// the candidate weight there.
pub fn verify_weights<F>(
    gamma: f64,
    v: &VasicekParams,
    m: &MarketParams,
    delta: f64,
    n_times: usize,
    grid_step: f64,
    mut weight_fn: F,
) -> Result<VerifyReport>
where
    F: FnMut(f64) -> Result<f64>,
{
    if n_times < 2 {
        return Err(Error::invalid("n_times", "need at least 2 time points"));
    }
    let u = UtilitySpec::Power { gamma };
    u.validate()?;
    m.validate()?;

    let mut max_deviation = 0.0f64;
    let mut worst_time = 0.0f64;
    for i in 0..n_times {
        let t = m.t * i as f64 / (n_times - 1) as f64;
        let probe = ValueFunctionProbe {
            gamma,
            beta_t: hedge_coefficient(&u, v, m, t)?,
            x: 1.0,
            r: v.stationary_mean(),
            t,
        };
        let slice = hamiltonian_slice(&probe, v, m)?;
        let brute = grid_argmax(&slice, delta, grid_step)?;
        let candidate = weight_fn(t)?;
        let deviation = (brute - candidate).abs();
        if deviation > max_deviation {
            max_deviation = deviation;
            worst_time = t;
        }
    }
    Ok(VerifyReport {
        max_deviation,
        worst_time,
        pass: max_deviation <= grid_step,
    })
}

/// Sweeps the optimality check for the closed-form policy itself.
pub fn verify_policy(
    u: &UtilitySpec,
    v: &VasicekParams,
    m: &MarketParams,
    delta: f64,
    n_times: usize,
    grid_step: f64,
) -> Result<VerifyReport> {
    let gamma = match u {
        UtilitySpec::Power { gamma } => *gamma,
        UtilitySpec::Linear => return Err(Error::invalid(
            "utility",
            "verification targets the power objective; the linear policy has no interior optimum",
        )),
    };
    verify_weights(gamma, v, m, delta, n_times, grid_step, |t| {
        optimal_weight(u, v, m, delta, ClampMode::Symmetric, t).map(|(w, _)| w)
    })
}
