//! Power-law fit to the limited-liability terminal payoff.
//!
//! The payoff `max(F, x)` on the wealth window `[0, B]` is approximated in
//! the L2 sense by `x^gamma`. The squared-error functional has a closed
//! antiderivative, its gamma-derivative is computed by quadrature, and the
//! optimal exponent is located by a coarse scan plus golden-section
//! refinement. The sign structure of the derivative guarantees the optimum
//! is interior to `(0, 1)` for moderate bounds.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numeric;

/// Tolerance handed to the quadrature that evaluates the error slope.
const SLOPE_QUAD_TOL: f64 = 1e-11;

/// Coarse-scan geometry for the exponent search. The interval is clipped
/// away from 0 and 1 so the antiderivative denominators stay bounded.
const SCAN_LO: f64 = 0.005;
const SCAN_HI: f64 = 0.995;
const SCAN_STEP: f64 = 0.01;

/// Floor and cap of the terminal payoff window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiabilityBounds {
    /// Bankruptcy level: the payoff floor, in (0, 1).
    pub f: f64,
    /// Wealth cap over the horizon, above 1.
    pub b: f64,
}

impl LiabilityBounds {
    pub fn new(f: f64, b: f64) -> Result<Self> {
        let lb = Self { f, b };
        lb.validate()?;
        Ok(lb)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.f.is_finite() || self.f <= 0.0 || self.f >= 1.0 {
            return Err(Error::invalid(
                "f",
                format!("bankruptcy level must satisfy 0 < f < 1, got {}", self.f),
            ));
        }
        if !self.b.is_finite() || self.b <= 1.0 {
            return Err(Error::invalid(
                "b",
                format!("wealth cap must satisfy b > 1, got {}", self.b),
            ));
        }
        Ok(())
    }
}

/// Outcome of the exponent search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GammaResult {
    /// Minimizing exponent, strictly inside (0, 1).
    pub gamma_star: f64,
    /// Squared-error value at the minimizer.
    pub err_at_min: f64,
    /// Golden-section iterations spent refining the scan minimum.
    pub iterations: usize,
    /// Bracket handed to the refinement stage.
    pub bracket: (f64, f64),
}

fn check_gamma(gamma: f64) -> Result<()> {
    if !gamma.is_finite() || gamma <= 0.0 {
        return Err(Error::invalid(
            "gamma",
            format!("exponent must be finite and > 0, got {gamma}"),
        ));
    }
    Ok(())
}

/// Squared L2 distance between `max(F, x)` and `x^gamma` on `[0, B]`,
/// evaluated in closed form:
///
/// `int_0^F (F - x^g)^2 dx + int_F^B (x - x^g)^2 dx`.
pub fn l2_error(lb: &LiabilityBounds, gamma: f64) -> Result<f64> {
    lb.validate()?;
    check_gamma(gamma)?;
    let (f, b, g) = (lb.f, lb.b, gamma);
    let near =
        f.powi(3) - 2.0 * f.powf(g + 2.0) / (g + 1.0) + f.powf(2.0 * g + 1.0) / (2.0 * g + 1.0);
    let far = (b.powi(3) - f.powi(3)) / 3.0 - 2.0 * (b.powf(g + 2.0) - f.powf(g + 2.0)) / (g + 2.0)
        + (b.powf(2.0 * g + 1.0) - f.powf(2.0 * g + 1.0)) / (2.0 * g + 1.0);
    Ok(near + far)
}

/// Derivative of [`l2_error`] with respect to the exponent, computed by
/// adaptive quadrature:
///
/// `-2 int_0^F (F - x^g) x^g ln x dx - 2 int_F^B (x - x^g) x^g ln x dx`.
///
/// The integrand tends to zero at the origin (the `ln` singularity is
/// integrable), so the lower endpoint is evaluated at its limit.
pub fn l2_error_dgamma(lb: &LiabilityBounds, gamma: f64) -> Result<f64> {
    lb.validate()?;
    check_gamma(gamma)?;
    let (f, b, g) = (lb.f, lb.b, gamma);
    let near = move |x: f64| {
        if x <= 0.0 {
            0.0
        } else {
            let xg = x.powf(g);
            (f - xg) * xg * x.ln()
        }
    };
    let far = move |x: f64| {
        let xg = x.powf(g);
        (x - xg) * xg * x.ln()
    };
    let i_near = numeric::integrate(&near, 0.0, f, SLOPE_QUAD_TOL);
    let i_far = numeric::integrate(&far, f, b, SLOPE_QUAD_TOL);
    Ok(-2.0 * (i_near + i_far))
}

/// Closed-form antiderivative of `(x - 1) ln x`, the integrand that drives
/// the error slope at a vanishing exponent:
///
/// `(x^2/2 - x) ln x - (x^2 - 4x) / 4`.
///
/// Non-decreasing on `(0, inf)` since its derivative `(x - 1) ln x` is
/// non-negative everywhere, vanishing only at `x = 1`.
pub fn zero_gamma_slope_primitive(x: f64) -> Result<f64> {
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::invalid(
            "x",
            format!("must be finite and > 0, got {x}"),
        ));
    }
    Ok((x * x / 2.0 - x) * x.ln() - (x * x - 4.0 * x) / 4.0)
}

/// Locates the exponent minimizing [`l2_error`] over `(0, 1)`.
///
/// A coarse scan over `[0.005, 0.995]` guards against non-unimodal error
/// profiles; golden-section refinement then shrinks the winning bracket to
/// `tol`. Fails if the scan bottoms out at a boundary point, which signals
/// bounds whose optimum escapes the search interval.
pub fn best_gamma(lb: &LiabilityBounds, tol: f64) -> Result<GammaResult> {
    lb.validate()?;
    if !tol.is_finite() || tol <= 0.0 {
        return Err(Error::invalid("tol", "must be finite and > 0"));
    }

    let mut grid = Vec::new();
    let mut g = SCAN_LO;
    while g <= SCAN_HI + 1e-12 {
        grid.push(g);
        g += SCAN_STEP;
    }

    let mut best_idx = 0;
    let mut best_val = f64::INFINITY;
    for (i, &g) in grid.iter().enumerate() {
        let v = l2_error(lb, g)?;
        if v < best_val {
            best_val = v;
            best_idx = i;
        }
    }
    if best_idx == 0 || best_idx == grid.len() - 1 {
        return Err(Error::EndpointMinimum {
            gamma: grid[best_idx],
        });
    }

    let bracket = (grid[best_idx - 1], grid[best_idx + 1]);
    let objective = |g: f64| l2_error(lb, g).expect("gamma stays inside the validated bracket");
    let (gamma_star, err_at_min, iterations) =
        numeric::golden_min(&objective, bracket.0, bracket.1, tol, 200);

    Ok(GammaResult {
        gamma_star,
        err_at_min,
        iterations,
        bracket,
    })
}
