//! Closed-form optimal risky-bond weights under an expected-loss cap.
//!
//! For power utility the unconstrained weight is
//! `(zeta + b * beta(t)) / ((1 - gamma) * sigma(t))`, clamped to the cap
//! implied by the expected-loss budget. The linear objective has no
//! interior optimum; its policy sits at the cap throughout.

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, Error, Result};
use crate::market::{bond_volatility, MarketParams, VasicekParams};

/// Terminal objective selector.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum UtilitySpec {
    /// Expected terminal wealth itself.
    Linear,
    /// Power utility `x^gamma` with exponent in (0, 1).
    Power { gamma: f64 },
}

impl UtilitySpec {
    pub fn validate(&self) -> Result<()> {
        if let UtilitySpec::Power { gamma } = self {
            if !gamma.is_finite() || *gamma <= 0.0 || *gamma >= 1.0 {
                return Err(Error::invalid(
                    "gamma",
                    format!("power exponent must lie in (0, 1), got {gamma}"),
                ));
            }
        }
        Ok(())
    }
}

/// Credit-risk side of the scenario: default probability, loss given
/// default, the expected-loss budget, and the risk-based capital rule.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CreditParams {
    /// Probability of default of the risky bond, in [0, 1].
    pub p: f64,
    /// Loss given default, in [0, 1].
    pub lambda: f64,
    /// Cap on the portfolio expected loss.
    pub el_bound: f64,
    /// Slope of the risk-based capital requirement.
    pub k: f64,
    /// Minimum capital requirement.
    pub cap_floor: f64,
}

impl CreditParams {
    pub fn new(p: f64, lambda: f64, el_bound: f64, k: f64, cap_floor: f64) -> Result<Self> {
        let c = Self {
            p,
            lambda,
            el_bound,
            k,
            cap_floor,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.p.is_finite() || !(0.0..=1.0).contains(&self.p) {
            return Err(Error::invalid(
                "p",
                "default probability must lie in [0, 1]",
            ));
        }
        if !self.lambda.is_finite() || !(0.0..=1.0).contains(&self.lambda) {
            return Err(Error::invalid(
                "lambda",
                "loss given default must lie in [0, 1]",
            ));
        }
        if !self.el_bound.is_finite() || self.el_bound < 0.0 {
            return Err(Error::invalid("el_bound", "expected-loss cap must be >= 0"));
        }
        if !self.k.is_finite() || self.k < 0.0 {
            return Err(Error::invalid("k", "capital slope must be >= 0"));
        }
        if !self.cap_floor.is_finite() || self.cap_floor < 0.0 {
            return Err(Error::invalid("cap_floor", "capital floor must be >= 0"));
        }
        Ok(())
    }
}

/// How the weight cap is applied.
///
/// The expected-loss derivation bounds the long position, while the
/// admissibility constraint is written symmetrically; both readings are
/// supported, defaulting to the symmetric clamp.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClampMode {
    /// Clamp to `[-delta, +delta]`.
    #[default]
    Symmetric,
    /// Clamp to `[0, +delta]`.
    LongOnly,
}

/// A risky-bond weight path on a strictly increasing time grid, with flags
/// marking where the expected-loss cap binds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolicyPath {
    pub times: Vec<f64>,
    pub weights: Vec<f64>,
    pub clipped: Vec<bool>,
}

impl PolicyPath {
    pub fn new(times: Vec<f64>, weights: Vec<f64>, clipped: Vec<bool>) -> Result<Self> {
        if times.len() != weights.len() || times.len() != clipped.len() {
            return Err(Error::invalid(
                "policy path",
                format!(
                    "length mismatch: {} times, {} weights, {} flags",
                    times.len(),
                    weights.len(),
                    clipped.len()
                ),
            ));
        }
        if times.is_empty() {
            return Err(Error::invalid(
                "policy path",
                "must contain at least one point",
            ));
        }
        for pair in times.windows(2) {
            if pair[1] <= pair[0] {
                return Err(Error::invalid(
                    "policy path",
                    format!(
                        "times must be strictly increasing, got {} then {}",
                        pair[0], pair[1]
                    ),
                ));
            }
        }
        for (&t, &w) in times.iter().zip(&weights) {
            require_finite("time", t)?;
            require_finite("weight", w)?;
        }
        Ok(Self {
            times,
            weights,
            clipped,
        })
    }

    /// Constant-weight path on a uniform grid over `[0, horizon]`.
    pub fn constant(weight: f64, horizon: f64, n_points: usize) -> Result<Self> {
        if n_points < 2 {
            return Err(Error::invalid("n_points", "need at least 2 grid points"));
        }
        let times = uniform_grid(horizon, n_points);
        Self::new(times, vec![weight; n_points], vec![false; n_points])
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Weight in force at time `t`: piecewise-constant from the left, held
    /// flat beyond the last grid point.
    pub fn weight_at(&self, t: f64) -> f64 {
        let idx = self.times.partition_point(|&g| g <= t);
        if idx == 0 {
            self.weights[0]
        } else {
            self.weights[idx - 1]
        }
    }
}

fn uniform_grid(horizon: f64, n_points: usize) -> Vec<f64> {
    let last = (n_points - 1) as f64;
    (0..n_points).map(|i| horizon * i as f64 / last).collect()
}

/// Weight cap implied by the expected-loss budget: `el_bound / (p * lambda)`.
pub fn el_cap_delta(c: &CreditParams) -> Result<f64> {
    c.validate()?;
    let exposure = c.p * c.lambda;
    if exposure <= 0.0 {
        return Err(Error::invalid(
            "p * lambda",
            "cap undefined when the bond carries no expected loss; hold the risk-free asset only",
        ));
    }
    Ok(c.el_bound / exposure)
}

/// Time-dependent coefficient of the rate-hedging demand in the candidate
/// value function: `(gamma / alpha) (1 - exp(alpha (t - horizon)))`.
///
/// Vanishes at the horizon and stays non-negative before it.
pub fn hedge_coefficient(
    u: &UtilitySpec,
    v: &VasicekParams,
    m: &MarketParams,
    t: f64,
) -> Result<f64> {
    u.validate()?;
    v.validate()?;
    m.validate()?;
    let gamma = match u {
        UtilitySpec::Power { gamma } => *gamma,
        UtilitySpec::Linear => {
            return Err(Error::invalid(
                "utility",
                "hedging coefficient is defined for the power objective only",
            ))
        }
    };
    if !t.is_finite() || t < 0.0 || t > m.t {
        return Err(Error::OutOfDomain {
            name: "t",
            value: t,
            lo: 0.0,
            hi: m.t,
        });
    }
    Ok(gamma / v.alpha * (1.0 - (v.alpha * (t - m.t)).exp()))
}

/// Optimal weight at time `t` under the cap `delta`.
///
/// Power objective: the unconstrained weight
/// `(zeta + b * beta(t)) / ((1 - gamma) * sigma(t))` clamped per `mode`,
/// with the flag set when the clamp engages. Linear objective: the cap
/// itself at every time, always flagged.
pub fn optimal_weight(
    u: &UtilitySpec,
    v: &VasicekParams,
    m: &MarketParams,
    delta: f64,
    mode: ClampMode,
    t: f64,
) -> Result<(f64, bool)> {
    u.validate()?;
    if !delta.is_finite() || delta <= 0.0 {
        return Err(Error::invalid("delta", "weight cap must be finite and > 0"));
    }
    match u {
        UtilitySpec::Linear => {
            m.validate()?;
            v.validate()?;
            Ok((delta, true))
        }
        UtilitySpec::Power { gamma } => {
            let sigma = bond_volatility(v, m, t)?;
            if sigma <= 0.0 {
                return Err(Error::invalid(
                    "sigma",
                    format!("bond volatility vanished at t = {t}; no risky exposure to optimize"),
                ));
            }
            let beta = hedge_coefficient(u, v, m, t)?;
            let unconstrained = (m.zeta + v.b * beta) / ((1.0 - gamma) * sigma);
            let lo = match mode {
                ClampMode::Symmetric => -delta,
                ClampMode::LongOnly => 0.0,
            };
            let clipped = unconstrained < lo || unconstrained > delta;
            Ok((unconstrained.clamp(lo, delta), clipped))
        }
    }
}

/// Evaluates [`optimal_weight`] on a uniform `n_points` grid over the
/// horizon, with the cap taken from the expected-loss budget.
pub fn policy_path(
    u: &UtilitySpec,
    v: &VasicekParams,
    m: &MarketParams,
    c: &CreditParams,
    n_points: usize,
    mode: ClampMode,
) -> Result<PolicyPath> {
    if n_points < 2 {
        return Err(Error::invalid("n_points", "need at least 2 grid points"));
    }
    m.validate()?;
    let delta = el_cap_delta(c)?;
    let times = uniform_grid(m.t, n_points);
    let mut weights = Vec::with_capacity(n_points);
    let mut clipped = Vec::with_capacity(n_points);
    for &t in &times {
        let (w, flag) = optimal_weight(u, v, m, delta, mode, t)?;
        weights.push(w);
        clipped.push(flag);
    }
    PolicyPath::new(times, weights, clipped)
}

/// Per-time capital requirement `max(cap_floor, k * weight)`.
pub fn capital_path(path: &PolicyPath, c: &CreditParams) -> Result<Vec<f64>> {
    c.validate()?;
    Ok(path
        .weights
        .iter()
        .map(|&w| (c.k * w).max(c.cap_floor))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn assert_close(actual: f64, expected: f64, tol: f64, label: &str) {
        assert!(
            (actual - expected).abs() <= tol,
            "{label}: expected {expected}, got {actual}"
        );
    }

    fn baseline() -> (VasicekParams, MarketParams, CreditParams) {
        (
            VasicekParams::new(0.15, 0.0075, 0.67).unwrap(),
            MarketParams::new(0.3, 1.5, 1.0, 0.05).unwrap(),
            CreditParams::new(0.1, 0.6, 0.05, 0.2, 0.04).unwrap(),
        )
    }

    fn power() -> UtilitySpec {
        UtilitySpec::Power { gamma: 0.1821 }
    }

    #[test]
    fn cap_from_expected_loss_budget() {
        let (_, _, c) = baseline();
        let delta = el_cap_delta(&c).unwrap();
        assert_close(delta, 5.0 / 6.0, 1e-15, "delta");
        assert_eq!(format!("{delta:.2}"), "0.83");
    }

    #[test]
    fn cap_zero_budget_and_unit_ratio() {
        let zero = CreditParams::new(0.1, 0.6, 0.0, 0.2, 0.04).unwrap();
        assert_eq!(el_cap_delta(&zero).unwrap(), 0.0);
        let unit = CreditParams::new(0.1, 0.6, 0.06, 0.2, 0.04).unwrap();
        assert_close(el_cap_delta(&unit).unwrap(), 1.0, 1e-12, "unit cap");
    }

    #[test]
    fn cap_undefined_without_credit_exposure() {
        let riskless = CreditParams::new(0.0, 0.6, 0.05, 0.2, 0.04).unwrap();
        assert!(el_cap_delta(&riskless).is_err());
    }

    #[test]
    fn hedge_coefficient_values() {
        let (v, m, _) = baseline();
        assert_eq!(hedge_coefficient(&power(), &v, &m, 1.0).unwrap(), 0.0);
        assert_close(
            hedge_coefficient(&power(), &v, &m, 0.0).unwrap(),
            0.169_100_516_619_979_85,
            1e-12,
            "beta(0)",
        );
        let tiny = UtilitySpec::Power { gamma: 1e-12 };
        assert!(hedge_coefficient(&tiny, &v, &m, 0.3).unwrap() < 1e-11);
        assert!(hedge_coefficient(&power(), &v, &m, 1.1).is_err());
        assert!(hedge_coefficient(&UtilitySpec::Linear, &v, &m, 0.5).is_err());
    }

    #[test]
    fn weight_at_start_is_interior() {
        let (v, m, _) = baseline();
        let (w, clipped) =
            optimal_weight(&power(), &v, &m, 5.0 / 6.0, ClampMode::Symmetric, 0.0).unwrap();
        assert_close(w, 0.561_485_793_145_405_8, 1e-9, "pi(0)");
        assert!(!clipped);
    }

    #[test]
    fn weight_at_horizon_hits_the_cap() {
        let (v, m, _) = baseline();
        let delta = 5.0 / 6.0;
        let (w, clipped) =
            optimal_weight(&power(), &v, &m, delta, ClampMode::Symmetric, 1.0).unwrap();
        assert_eq!(w, delta, "clamp returns the cap exactly");
        assert!(clipped, "unconstrained weight 1.1365 exceeds the cap");
    }

    #[test]
    fn linear_objective_rides_the_cap() {
        let (v, m, _) = baseline();
        for t in [0.0, 0.5, 1.0] {
            let (w, clipped) =
                optimal_weight(&UtilitySpec::Linear, &v, &m, 0.8, ClampMode::Symmetric, t).unwrap();
            assert_eq!(w, 0.8);
            assert!(clipped);
        }
    }

    #[test]
    fn weight_rejects_degenerate_inputs() {
        let (v, m, _) = baseline();
        assert!(optimal_weight(&power(), &v, &m, 0.0, ClampMode::Symmetric, 0.0).is_err());
        let bad_gamma = UtilitySpec::Power { gamma: 1.0 };
        assert!(optimal_weight(&bad_gamma, &v, &m, 0.8, ClampMode::Symmetric, 0.0).is_err());
        // Maturity equal to the horizon would zero out sigma on [0, t].
        assert!(MarketParams::new(0.3, 1.0, 1.0, 0.05).is_err());
    }

    #[test]
    fn long_only_floor_engages_for_negative_premium() {
        let (v, _, _) = baseline();
        let m = MarketParams::new(-0.05, 1.5, 1.0, 0.05).unwrap();
        let (w_sym, clipped_sym) =
            optimal_weight(&power(), &v, &m, 0.5, ClampMode::Symmetric, 1.0).unwrap();
        assert!(w_sym < 0.0, "symmetric clamp admits a short position");
        assert!(!clipped_sym, "a mild short stays inside the symmetric cap");
        let (w_long, clipped_long) =
            optimal_weight(&power(), &v, &m, 0.5, ClampMode::LongOnly, 1.0).unwrap();
        assert_eq!(w_long, 0.0);
        assert!(clipped_long);
    }

    #[test]
    fn path_matches_pointwise_evaluation() {
        let (v, m, c) = baseline();
        let path = policy_path(&power(), &v, &m, &c, 101, ClampMode::Symmetric).unwrap();
        let delta = el_cap_delta(&c).unwrap();
        assert_eq!(path.len(), 101);
        assert_close(
            path.weights[0],
            0.561_485_793_145_405_8,
            1e-9,
            "first weight",
        );
        assert_eq!(*path.weights.last().unwrap(), delta);
        assert!(*path.clipped.last().unwrap());
        assert!(!path.clipped[0]);
        for pair in path.weights.windows(2) {
            assert!(pair[1] >= pair[0] - 1e-12, "path must be non-decreasing");
        }
        let onset = path.times[path.weights.iter().position(|&w| w == delta).unwrap()];
        assert!(
            onset > 0.0 && onset < 1.0,
            "cap onset strictly inside the horizon"
        );
    }

    #[test]
    fn linear_path_is_flat_at_the_cap() {
        let (v, m, c) = baseline();
        let path = policy_path(&UtilitySpec::Linear, &v, &m, &c, 11, ClampMode::Symmetric).unwrap();
        let delta = el_cap_delta(&c).unwrap();
        assert!(path.weights.iter().all(|&w| w == delta));
        assert!(path.clipped.iter().all(|&f| f));
    }

    #[test]
    fn loose_cap_never_clips() {
        let (v, m, _) = baseline();
        // el_bound = 0.6 makes the cap 10, far above the unconstrained path.
        let c = CreditParams::new(0.1, 0.6, 0.6, 0.2, 0.04).unwrap();
        let path = policy_path(&power(), &v, &m, &c, 51, ClampMode::Symmetric).unwrap();
        assert!(path.clipped.iter().all(|&f| !f));
    }

    #[test]
    fn path_rejects_tiny_grid() {
        let (v, m, c) = baseline();
        assert!(policy_path(&power(), &v, &m, &c, 1, ClampMode::Symmetric).is_err());
        assert!(policy_path(&power(), &v, &m, &c, 0, ClampMode::Symmetric).is_err());
    }

    #[test]
    fn capital_rule_values() {
        let (_, _, c) = baseline();
        let path =
            PolicyPath::new(vec![0.0, 0.5], vec![5.0 / 6.0, 0.1], vec![true, false]).unwrap();
        let cap = capital_path(&path, &c).unwrap();
        assert_close(cap[0], 1.0 / 6.0, 1e-15, "slope binds");
        assert_eq!(cap[1], 0.04, "floor binds");

        // Exact boundary tie: 0.16 * 0.25 is 0.04 in binary as well.
        let tie = CreditParams::new(0.1, 0.6, 0.05, 0.16, 0.04).unwrap();
        let flat = PolicyPath::constant(0.25, 1.0, 2).unwrap();
        let cap = capital_path(&flat, &tie).unwrap();
        assert_eq!(cap[0], 0.04, "boundary tie resolves to the floor value");
    }

    #[test]
    fn path_constructor_rejects_malformed_grids() {
        assert!(PolicyPath::new(vec![0.0, 0.0], vec![0.1, 0.1], vec![false, false]).is_err());
        assert!(PolicyPath::new(vec![0.0, 1.0], vec![0.1], vec![false]).is_err());
        assert!(PolicyPath::new(vec![], vec![], vec![]).is_err());
        assert!(PolicyPath::new(vec![0.0], vec![f64::NAN], vec![false]).is_err());
    }

    #[test]
    fn weight_lookup_is_left_constant() {
        let path =
            PolicyPath::new(vec![0.0, 0.5, 1.0], vec![0.1, 0.2, 0.3], vec![false; 3]).unwrap();
        assert_eq!(path.weight_at(-0.1), 0.1);
        assert_eq!(path.weight_at(0.0), 0.1);
        assert_eq!(path.weight_at(0.49), 0.1);
        assert_eq!(path.weight_at(0.5), 0.2);
        assert_eq!(path.weight_at(0.99), 0.2);
        assert_eq!(path.weight_at(1.0), 0.3);
        assert_eq!(path.weight_at(7.0), 0.3);
    }

    proptest! {
        #[test]
        fn unconstrained_weight_increases_with_gamma(
            g1 in 0.01f64..0.98,
            bump in 0.001f64..0.5,
            zeta in 0.0f64..1.0,
            alpha in 0.05f64..1.0,
            b in 0.01f64..1.5,
            t in 0.0f64..1.0,
        ) {
            let g2 = (g1 + bump).min(0.99);
            prop_assume!(g2 > g1);
            let v = VasicekParams::new(alpha, 0.0075, b).unwrap();
            let m = MarketParams::new(zeta, 1.5, 1.0, 0.05).unwrap();
            let huge = 1e9;
            let (w1, _) = optimal_weight(
                &UtilitySpec::Power { gamma: g1 }, &v, &m, huge, ClampMode::Symmetric, t,
            ).unwrap();
            let (w2, _) = optimal_weight(
                &UtilitySpec::Power { gamma: g2 }, &v, &m, huge, ClampMode::Symmetric, t,
            ).unwrap();
            prop_assert!(w2 > w1, "w({g2}) = {w2} <= w({g1}) = {w1}");

            // Slope against the analytic derivative (k(t) + zeta) / ((1-g)^2 sigma).
            let sigma = bond_volatility(&v, &m, t).unwrap();
            let k_t = b / alpha * (1.0 - (alpha * (t - m.t)).exp());
            let h = 1e-6;
            prop_assume!(g1 > h && g1 + h < 1.0);
            let (wp, _) = optimal_weight(
                &UtilitySpec::Power { gamma: g1 + h }, &v, &m, huge, ClampMode::Symmetric, t,
            ).unwrap();
            let (wm, _) = optimal_weight(
                &UtilitySpec::Power { gamma: g1 - h }, &v, &m, huge, ClampMode::Symmetric, t,
            ).unwrap();
            let fd = (wp - wm) / (2.0 * h);
            let analytic = (k_t + zeta) / ((1.0 - g1) * (1.0 - g1) * sigma);
            prop_assert!(analytic > 0.0);
            prop_assert!(
                (fd - analytic).abs() <= 1e-4 * analytic.abs().max(1.0),
                "slope mismatch: fd {fd} vs analytic {analytic}"
            );
        }

        #[test]
        fn clamp_is_tight_and_flagged(
            gamma in 0.05f64..0.95,
            delta in 0.05f64..1.5,
            zeta in -1.0f64..1.0,
            t in 0.0f64..1.0,
        ) {
            let v = VasicekParams::new(0.15, 0.0075, 0.67).unwrap();
            let m = MarketParams::new(zeta, 1.5, 1.0, 0.05).unwrap();
            let u = UtilitySpec::Power { gamma };
            let (w, clipped) = optimal_weight(&u, &v, &m, delta, ClampMode::Symmetric, t).unwrap();
            prop_assert!(w.abs() <= delta);
            let sigma = bond_volatility(&v, &m, t).unwrap();
            let beta = hedge_coefficient(&u, &v, &m, t).unwrap();
            let unconstrained = (zeta + v.b * beta) / ((1.0 - gamma) * sigma);
            prop_assert_eq!(clipped, unconstrained.abs() > delta);
            if !clipped {
                prop_assert_eq!(w, unconstrained);
            }
        }

        #[test]
        fn cap_scales_with_budget_and_exposure(
            el in 0.001f64..0.2,
            p in 0.01f64..1.0,
            lambda in 0.01f64..1.0,
            scale in 0.1f64..5.0,
        ) {
            let base = el_cap_delta(&CreditParams::new(p, lambda, el, 0.2, 0.04).unwrap()).unwrap();
            let budget_scaled = el_cap_delta(
                &CreditParams::new(p, lambda, (el * scale).min(1.0), 0.2, 0.04).unwrap(),
            ).unwrap();
            let want = base * (el * scale).min(1.0) / el;
            prop_assert!((budget_scaled - want).abs() <= 1e-9 * want.abs().max(1.0));

            if p * scale <= 1.0 {
                let p_scaled = el_cap_delta(
                    &CreditParams::new(p * scale, lambda, el, 0.2, 0.04).unwrap(),
                ).unwrap();
                prop_assert!((p_scaled * scale - base).abs() <= 1e-9 * base.abs().max(1.0));
            }
        }
    }
}
