//! Scenario configuration: a fixed-schema JSON file collecting every model
//! parameter. Unknown fields are rejected so typos fail loudly instead of
//! silently falling back to defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use serde::{Deserialize, Serialize};

use llp_core::{CreditParams, LiabilityBounds, MarketParams, SimConfig, VasicekParams};

/// A fully resolved scenario. `market.r0` defaults to the stationary mean
/// of the short rate when the file omits it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScenarioConfig {
    pub vasicek: VasicekParams,
    pub market: MarketParams,
    pub credit: CreditParams,
    pub liability: LiabilityBounds,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub debt_face: Option<f64>,
    pub sim: SimConfig,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    vasicek: VasicekParams,
    market: RawMarket,
    credit: CreditParams,
    liability: LiabilityBounds,
    #[serde(default)]
    debt_face: Option<f64>,
    sim: SimConfig,
    #[serde(default)]
    output_dir: Option<PathBuf>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawMarket {
    zeta: f64,
    t1: f64,
    t: f64,
    #[serde(default)]
    r0: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawScenario =
            serde_json::from_str(text).context("cannot parse scenario config")?;
        raw.vasicek.validate().map_err(anyhow::Error::from)?;
        let r0 = raw
            .market
            .r0
            .unwrap_or_else(|| raw.vasicek.stationary_mean());
        let market = MarketParams::new(raw.market.zeta, raw.market.t1, raw.market.t, r0)
            .map_err(anyhow::Error::from)?;
        let config = ScenarioConfig {
            vasicek: raw.vasicek,
            market,
            credit: raw.credit,
            liability: raw.liability,
            debt_face: raw.debt_face,
            sim: raw.sim,
            output_dir: raw.output_dir,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in config {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        self.vasicek.validate()?;
        self.market.validate()?;
        self.credit.validate()?;
        self.liability.validate()?;
        self.sim.validate()?;
        if let Some(d) = self.debt_face {
            if !d.is_finite() || d <= 0.0 {
                bail!("invalid debt_face: must be finite and > 0, got {d}");
            }
        }
        Ok(())
    }
}
