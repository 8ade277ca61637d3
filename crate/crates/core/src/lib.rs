//! Continuous-time portfolio choice for a bank holding a money-market
//! account and a risky zero-coupon bond, with and without a limited-liability
//! floor on the terminal payoff.
//!
//! The pieces fit together as follows. [`payoff`] fits a power function
//! `x^gamma` to the floored payoff `max(F, x)` in the L2 sense, turning the
//! limited-liability objective into one with a closed-form policy. [`policy`]
//! evaluates that policy: the risky-bond weight under an expected-loss cap,
//! its capital charge, and the bang-bang policy of the linear objective.
//! [`hjb`] cross-checks the closed form against a brute-force maximizer of
//! the control Hamiltonian. [`credit`] scores the resulting portfolios by
//! distance to default, and [`sim`] estimates expected terminal utility by
//! seeded Monte Carlo so policies can be ranked end to end.

pub mod credit;
pub mod error;
pub mod hjb;
pub mod market;
pub mod numeric;
pub mod payoff;
pub mod policy;
pub mod sim;

pub use credit::{
    dd_series, dd_sigma_sensitivity, distance_to_default, DDQuery, DDSeries, HorizonMode,
};
pub use error::{Error, Result};
pub use hjb::{
    grid_argmax, hamiltonian_slice, verify_policy, verify_weights, HamiltonianSlice,
    ValueFunctionProbe, VerifyReport,
};
pub use market::{
    bond_drift, bond_volatility, wealth_drift_diffusion, MarketParams, VasicekParams,
};
pub use payoff::{
    best_gamma, l2_error, l2_error_dgamma, zero_gamma_slope_primitive, GammaResult, LiabilityBounds,
};
pub use policy::{
    capital_path, el_cap_delta, hedge_coefficient, optimal_weight, policy_path, ClampMode,
    CreditParams, PolicyPath, UtilitySpec,
};
pub use sim::{
    compare_policies, simulate_paths, simulate_rate_path, simulate_wealth, summarize, SimConfig,
    SimResult, TerminalPayoff,
};
