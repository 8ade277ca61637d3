//! Distance-to-default metrics for the bank portfolio.
//!
//! The structural-model distance to default is
//! `DD = [ln(V_A / D) + (mu - sigma^2 / 2) t] / (sigma sqrt(t))`; larger
//! values mean the asset value sits further above the debt barrier. Its
//! total derivative in the volatility (with the drift tied to the rate via
//! `mu = r + sigma zeta`) is negative whenever the asset covers the debt,
//! so loading more portfolio risk always erodes the buffer. Over a policy
//! path the portfolio's instantaneous volatility is `pi(t) sigma(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{require_finite, Error, Result};
use crate::market::{bond_volatility, MarketParams, VasicekParams};
use crate::policy::PolicyPath;

/// Inputs of a single distance-to-default evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DDQuery {
    /// Asset value, strictly positive.
    pub v_a: f64,
    /// Debt face value, strictly positive.
    pub d: f64,
    /// Asset drift (1/years).
    pub mu: f64,
    /// Asset volatility (1/years^(1/2)), strictly positive.
    pub sigma: f64,
    /// Horizon (years), strictly positive.
    pub t: f64,
}

impl DDQuery {
    pub fn validate(&self) -> Result<()> {
        if !self.v_a.is_finite() || self.v_a <= 0.0 {
            return Err(Error::invalid("v_a", "asset value must be finite and > 0"));
        }
        if !self.d.is_finite() || self.d <= 0.0 {
            return Err(Error::invalid(
                "d",
                "debt face value must be finite and > 0",
            ));
        }
        require_finite("mu", self.mu)?;
        if !self.sigma.is_finite() || self.sigma <= 0.0 {
            return Err(Error::invalid("sigma", "volatility must be finite and > 0"));
        }
        if !self.t.is_finite() || self.t <= 0.0 {
            return Err(Error::invalid("t", "horizon must be finite and > 0"));
        }
        Ok(())
    }
}

/// Distance to default per time point along a policy path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DDSeries {
    /// Grid times with a usable (positive-volatility) evaluation.
    pub times: Vec<f64>,
    pub dd_values: Vec<f64>,
    /// Portfolio volatility `pi(t) sigma(t)` at each usable time.
    pub sigma_p: Vec<f64>,
    /// Portfolio drift `r_bar + pi(t) sigma(t) zeta` at each usable time.
    pub mu_p: Vec<f64>,
}

impl DDSeries {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }
}

/// Which horizon each point of a [`DDSeries`] uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HorizonMode {
    /// A fixed window of `fixed_horizon` years at every grid time.
    #[default]
    Fixed,
    /// The time remaining to the decision horizon; the terminal point drops
    /// out since its window is empty.
    Remaining,
}

/// `[ln(v_a / d) + (mu - sigma^2 / 2) t] / (sigma sqrt(t))`.
pub fn distance_to_default(q: &DDQuery) -> Result<f64> {
    q.validate()?;
    let numerator = (q.v_a / q.d).ln() + (q.mu - 0.5 * q.sigma * q.sigma) * q.t;
    Ok(numerator / (q.sigma * q.t.sqrt()))
}

/// Total derivative of the distance to default in the volatility, with the
/// drift linked to the short rate as `mu = r + sigma zeta`:
///
/// `-[ln(v_a / d) + r t + sigma^2 t / 2] / (sigma^2 sqrt(t))`.
///
/// The premium term cancels against the drift response, so the risk
/// premium never appears. Negative whenever `ln(v_a / d) + r t` outweighs
/// nothing, in particular for `v_a >= d` and `r >= 0`.
pub fn dd_sigma_sensitivity(q: &DDQuery, short_rate: f64) -> Result<f64> {
    q.validate()?;
    require_finite("short_rate", short_rate)?;
    let numerator = (q.v_a / q.d).ln() + short_rate * q.t + 0.5 * q.sigma * q.sigma * q.t;
    Ok(-numerator / (q.sigma * q.sigma * q.t.sqrt()))
}

/// Distance-to-default series along a policy path.
///
/// At each grid time the portfolio volatility is `pi(t) sigma(t)` and the
/// drift is `r_bar + pi(t) sigma(t) zeta`, with `r_bar` the stationary mean
/// of the short rate and the asset value normalized to 1. Points whose
/// portfolio volatility is not strictly positive are skipped, as is the
/// terminal point in remaining-horizon mode.
pub fn dd_series(
    path: &PolicyPath,
    v: &VasicekParams,
    m: &MarketParams,
    debt_face: f64,
    mode: HorizonMode,
    fixed_horizon: f64,
) -> Result<DDSeries> {
    v.validate()?;
    m.validate()?;
    if !debt_face.is_finite() || debt_face <= 0.0 {
        return Err(Error::invalid("debt_face", "must be finite and > 0"));
    }
    if mode == HorizonMode::Fixed && (!fixed_horizon.is_finite() || fixed_horizon <= 0.0) {
        return Err(Error::invalid("fixed_horizon", "must be finite and > 0"));
    }

    let r_bar = v.stationary_mean();
    let mut series = DDSeries {
        times: Vec::new(),
        dd_values: Vec::new(),
        sigma_p: Vec::new(),
        mu_p: Vec::new(),
    };
    for (&t, &w) in path.times.iter().zip(&path.weights) {
        let sigma_p = w * bond_volatility(v, m, t)?;
        if sigma_p <= 0.0 {
            continue;
        }
        let horizon = match mode {
            HorizonMode::Fixed => fixed_horizon,
            HorizonMode::Remaining => m.t - t,
        };
        if horizon <= 0.0 {
            continue;
        }
        let mu_p = r_bar + sigma_p * m.zeta;
        let dd = distance_to_default(&DDQuery {
            v_a: 1.0,
            d: debt_face,
            mu: mu_p,
            sigma: sigma_p,
            t: horizon,
        })?;
        series.times.push(t);
        series.dd_values.push(dd);
        series.sigma_p.push(sigma_p);
        series.mu_p.push(mu_p);
    }
    if series.is_empty() {
        return Err(Error::invalid(
            "path",
            "no usable grid points: portfolio volatility never strictly positive",
        ));
    }
    Ok(series)
}
