//! Mean-reverting Gaussian short-rate dynamics, the risky bond's drift and
//! volatility, and the coefficient functions of the wealth process.
//!
//! The short rate follows `dr = (theta_v - alpha * r) dt + b dW`, and the
//! bank invests in a money-market account plus a zero-coupon bond maturing
//! at `t1`, beyond the decision horizon `t`. Wealth under risky weight `pi`
//! follows `dX = X [(pi * zeta * sigma(t) + r) dt + pi * sigma(t) dW]` with
//! the same Brownian motion driving both equations.

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, Error, Result};

/// Short-rate model parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VasicekParams {
    /// Mean-reversion speed (1/years); strictly positive.
    pub alpha: f64,
    /// Drift level parameter (1/years); the stationary mean is `theta_v / alpha`.
    pub theta_v: f64,
    /// Instantaneous rate volatility (1/years^(1/2)).
    pub b: f64,
}

impl VasicekParams {
    pub fn new(alpha: f64, theta_v: f64, b: f64) -> Result<Self> {
        let p = Self { alpha, theta_v, b };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.alpha.is_finite() || self.alpha <= 0.0 {
            return Err(Error::invalid("alpha", "must be finite and > 0"));
        }
        if !self.theta_v.is_finite() || self.theta_v < 0.0 {
            return Err(Error::invalid("theta_v", "must be finite and >= 0"));
        }
        if !self.b.is_finite() || self.b < 0.0 {
            return Err(Error::invalid("b", "must be finite and >= 0"));
        }
        Ok(())
    }

    /// Long-run mean of the short rate, `theta_v / alpha`.
    pub fn stationary_mean(&self) -> f64 {
        self.theta_v / self.alpha
    }
}

/// Market-side parameters: risk premium, bond maturity, decision horizon,
/// and the initial short rate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarketParams {
    /// Risk premium of the bond (dimensionless).
    pub zeta: f64,
    /// Bond maturity (years); must exceed the horizon.
    pub t1: f64,
    /// Decision horizon (years).
    pub t: f64,
    /// Initial short rate (1/years).
    pub r0: f64,
}

impl MarketParams {
    pub fn new(zeta: f64, t1: f64, t: f64, r0: f64) -> Result<Self> {
        let p = Self { zeta, t1, t, r0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        require_finite("zeta", self.zeta)?;
        require_finite("r0", self.r0)?;
        if !self.t.is_finite() || self.t <= 0.0 {
            return Err(Error::invalid("t", "horizon must be finite and > 0"));
        }
        // Strict ordering keeps sigma(t) > 0 on the whole horizon.
        if !self.t1.is_finite() || self.t1 <= self.t {
            return Err(Error::invalid(
                "t1",
                format!("bond maturity must exceed the horizon {}", self.t),
            ));
        }
        Ok(())
    }
}

/// Bond price volatility `sigma(t) = (b / alpha) (1 - exp(-alpha (t1 - t)))`.
///
/// Non-negative on `[0, t1]`, zero at maturity, and strictly decreasing in
/// `t` whenever `b > 0`.
pub fn bond_volatility(v: &VasicekParams, m: &MarketParams, t: f64) -> Result<f64> {
    v.validate()?;
    m.validate()?;
    if !t.is_finite() || t < 0.0 || t > m.t1 {
        return Err(Error::OutOfDomain {
            name: "t",
            value: t,
            lo: 0.0,
            hi: m.t1,
        });
    }
    Ok(v.b / v.alpha * (1.0 - (-v.alpha * (m.t1 - t)).exp()))
}

/// Bond price drift `mu(t) = r + zeta * sigma(t)`.
pub fn bond_drift(v: &VasicekParams, m: &MarketParams, r: f64, t: f64) -> Result<f64> {
    require_finite("r", r)?;
    Ok(r + m.zeta * bond_volatility(v, m, t)?)
}

/// Drift and diffusion coefficients of the wealth process at state `(x, r)`
/// under risky weight `pi`:
/// `(x (pi zeta sigma(t) + r), x pi sigma(t))`.
pub fn wealth_drift_diffusion(
    v: &VasicekParams,
    m: &MarketParams,
    x: f64,
    r: f64,
    pi: f64,
    t: f64,
) -> Result<(f64, f64)> {
    require_finite("x", x)?;
    require_finite("r", r)?;
    require_finite("pi", pi)?;
    if x < 0.0 {
        return Err(Error::invalid("x", "wealth must be non-negative"));
    }
    if t < 0.0 || t > m.t {
        return Err(Error::OutOfDomain {
            name: "t",
            value: t,
            lo: 0.0,
            hi: m.t,
        });
    }
    let sigma = bond_volatility(v, m, t)?;
    Ok((x * (pi * m.zeta * sigma + r), x * pi * sigma))
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

    fn baseline() -> (VasicekParams, MarketParams) {
        (
            VasicekParams::new(0.15, 0.0075, 0.67).unwrap(),
            MarketParams::new(0.3, 1.5, 1.0, 0.05).unwrap(),
        )
    }

    #[test]
    fn volatility_vanishes_at_maturity() {
        let (v, m) = baseline();
        assert_eq!(bond_volatility(&v, &m, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn volatility_at_time_zero() {
        let (v, m) = baseline();
        assert_close(
            bond_volatility(&v, &m, 0.0).unwrap(),
            0.899_960_889_541_449_1,
            1e-12,
            "sigma(0)",
        );
    }

    #[test]
    fn volatility_at_horizon() {
        let (v, m) = baseline();
        assert_close(
            bond_volatility(&v, &m, 1.0).unwrap(),
            0.322_745_761_065_797_2,
            1e-12,
            "sigma(1)",
        );
    }

    #[test]
    fn volatility_rejects_time_outside_bond_life() {
        let (v, m) = baseline();
        assert!(bond_volatility(&v, &m, -0.1).is_err());
        assert!(bond_volatility(&v, &m, 1.6).is_err());
        assert!(bond_volatility(&v, &m, f64::NAN).is_err());
    }

    #[test]
    fn drift_with_zero_premium_is_the_rate() {
        let (v, mut m) = baseline();
        m.zeta = 0.0;
        assert_eq!(bond_drift(&v, &m, 0.05, 0.7).unwrap(), 0.05);
    }

    #[test]
    fn drift_at_time_zero() {
        let (v, m) = baseline();
        assert_close(
            bond_drift(&v, &m, 0.05, 0.0).unwrap(),
            0.319_988_266_862_434_7,
            1e-12,
            "mu(0)",
        );
    }

    #[test]
    fn drift_vanishes_at_maturity_with_zero_rate() {
        let (v, m) = baseline();
        assert_eq!(bond_drift(&v, &m, 0.0, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn wealth_riskfree_portfolio() {
        let (v, m) = baseline();
        let (drift, diff) = wealth_drift_diffusion(&v, &m, 1.0, 0.05, 0.0, 0.4).unwrap();
        assert_eq!(drift, 0.05);
        assert_eq!(diff, 0.0);
    }

    #[test]
    fn wealth_absorbing_at_zero() {
        let (v, m) = baseline();
        let (drift, diff) = wealth_drift_diffusion(&v, &m, 0.0, 0.02, 0.7, 0.4).unwrap();
        assert_eq!(drift, 0.0);
        assert_eq!(diff, 0.0);
    }

    #[test]
    fn wealth_coefficients_at_time_zero() {
        let (v, m) = baseline();
        let (drift, diff) = wealth_drift_diffusion(&v, &m, 1.0, 0.05, 0.8333, 0.0).unwrap();
        assert_close(drift, 0.274_981_222_776_466_86, 1e-12, "wealth drift");
        assert_close(diff, 0.749_937_409_254_889_6, 1e-12, "wealth diffusion");
    }

    #[test]
    fn wealth_rejects_bad_inputs() {
        let (v, m) = baseline();
        assert!(wealth_drift_diffusion(&v, &m, -1.0, 0.05, 0.5, 0.0).is_err());
        assert!(wealth_drift_diffusion(&v, &m, 1.0, f64::INFINITY, 0.5, 0.0).is_err());
        assert!(wealth_drift_diffusion(&v, &m, 1.0, 0.05, f64::NAN, 0.0).is_err());
        assert!(wealth_drift_diffusion(&v, &m, 1.0, 0.05, 0.5, 1.2).is_err());
    }

    #[test]
    fn params_reject_violations() {
        assert!(VasicekParams::new(0.0, 0.0075, 0.67).is_err());
        assert!(VasicekParams::new(-0.1, 0.0075, 0.67).is_err());
        assert!(VasicekParams::new(0.15, -0.01, 0.67).is_err());
        assert!(VasicekParams::new(0.15, 0.0075, -0.67).is_err());
        assert!(MarketParams::new(0.3, 1.0, 1.0, 0.05).is_err(), "t1 == t");
        assert!(MarketParams::new(0.3, 0.9, 1.0, 0.05).is_err(), "t1 < t");
        assert!(MarketParams::new(0.3, 1.5, 0.0, 0.05).is_err(), "t == 0");
        assert!(MarketParams::new(f64::NAN, 1.5, 1.0, 0.05).is_err());
    }

    proptest! {
        #[test]
        fn volatility_nonnegative_and_decreasing(
            alpha in 0.01f64..2.0,
            b in 0.0f64..2.0,
            t1 in 0.2f64..5.0,
        ) {
            let v = VasicekParams::new(alpha, 0.01, b).unwrap();
            let m = MarketParams::new(0.3, t1, t1 * 0.5, 0.05).unwrap();
            let n = 64;
            let mut prev = f64::INFINITY;
            for i in 0..=n {
                let t = t1 * i as f64 / n as f64;
                let s = bond_volatility(&v, &m, t).unwrap();
                prop_assert!(s >= 0.0, "sigma({t}) = {s} < 0");
                if b > 0.0 {
                    prop_assert!(s < prev, "sigma not strictly decreasing at t = {t}");
                }
                prev = s;
            }
            let at_maturity = bond_volatility(&v, &m, t1).unwrap();
            prop_assert!(at_maturity.abs() < 1e-15, "sigma(t1) = {at_maturity}");
        }

        #[test]
        fn excess_drift_equals_premium_times_volatility(
            r in -0.2f64..0.4,
            zeta in -1.0f64..1.0,
            t in 0.0f64..1.0,
        ) {
            let v = VasicekParams::new(0.15, 0.0075, 0.67).unwrap();
            let m = MarketParams::new(zeta, 1.5, 1.0, 0.05).unwrap();
            let mu = bond_drift(&v, &m, r, t).unwrap();
            let sigma = bond_volatility(&v, &m, t).unwrap();
            prop_assert!(((mu - r) - zeta * sigma).abs() <= 1e-12);
        }

        #[test]
        fn wealth_diffusion_homogeneous_in_wealth(
            x in 0.01f64..10.0,
            scale in 0.01f64..100.0,
            pi in -2.0f64..2.0,
            t in 0.0f64..1.0,
        ) {
            let (v, m) = baseline();
            let (_, base) = wealth_drift_diffusion(&v, &m, x, 0.05, pi, t).unwrap();
            let (_, scaled) = wealth_drift_diffusion(&v, &m, scale * x, 0.05, pi, t).unwrap();
            let expect = scale * base;
            prop_assert!(
                (scaled - expect).abs() <= 1e-12 * expect.abs().max(1.0),
                "diffusion not degree-1 homogeneous: {scaled} vs {expect}"
            );
        }
    }
}
