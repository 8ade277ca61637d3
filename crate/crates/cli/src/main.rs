//! Command-line front end for the limited-liability portfolio toolkit.
//!
//! Exit codes: 0 on success, 1 when a verification or dominance check
//! fails, 2 on invalid input.

mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

use llp_core::{
    best_gamma, bond_volatility, capital_path, dd_series, distance_to_default, el_cap_delta,
    hedge_coefficient, policy_path, simulate_paths, summarize, verify_policy, verify_weights,
    ClampMode, DDQuery, HorizonMode, PolicyPath, TerminalPayoff, UtilitySpec, VerifyReport,
};

use config::ScenarioConfig;
use output::{fmt_sig, write_csv};

#[derive(Parser)]
#[command(
    name = "llp",
    about = "Bank portfolio choice with and without a limited-liability payoff floor",
    version
)]
struct Cli {
    /// Scenario configuration file (JSON)
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Emit machine-readable JSON on stdout where supported
    #[arg(long, global = true)]
    json: bool,

    /// Directory for CSV outputs (overrides the config's output_dir)
    #[arg(long, global = true, value_name = "PATH")]
    output_dir: Option<PathBuf>,

    /// Override the simulation seed from the config
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Print 17 significant digits instead of 6
    #[arg(long, global = true)]
    full_precision: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Best power-law fit to the floored terminal payoff
    ApproxGamma {
        /// Payoff floor (bankruptcy level); defaults to the config's liability.f
        #[arg(long)]
        f: Option<f64>,
        /// Wealth cap; defaults to the config's liability.b
        #[arg(long)]
        b: Option<f64>,
        /// Exponent tolerance of the search
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Optimal risky-bond weight path with its capital charge (CSV)
    Policy {
        #[arg(long, value_enum, default_value_t = UtilityArg::Power)]
        utility: UtilityArg,
        /// Number of grid points over the horizon
        #[arg(long, default_value_t = 201)]
        n: usize,
        /// Power exponent; computed from the payoff bounds when omitted
        #[arg(long)]
        gamma: Option<f64>,
        /// Clamp the weight to [0, delta] instead of [-delta, delta]
        #[arg(long)]
        long_only: bool,
    },
    /// Distance-to-default point query
    Dd {
        #[arg(long)]
        va: f64,
        #[arg(long)]
        d: f64,
        #[arg(long)]
        mu: f64,
        #[arg(long)]
        sigma: f64,
        #[arg(long)]
        t: f64,
    },
    /// Check the closed-form weights against a brute-force grid maximizer
    Verify {
        /// Weight-grid resolution of the brute-force maximizer
        #[arg(long, default_value_t = 5e-4)]
        step: f64,
        /// Number of time points swept over the horizon
        #[arg(long, default_value_t = 51)]
        times: usize,
        /// Power exponent; computed from the payoff bounds when omitted
        #[arg(long)]
        gamma: Option<f64>,
        /// Negate the hedging term of the candidate weights (mutation hook
        /// for exercising the failure path)
        #[arg(long, hide = true)]
        flip_hedge_sign: bool,
    },
    /// Monte Carlo estimate of expected terminal utility for a policy
    Simulate {
        /// Policy to simulate: "ll", "noll", or "const:<weight>"
        #[arg(long)]
        policy: String,
        #[arg(long, value_enum, default_value_t = PayoffArg::Power)]
        utility: PayoffArg,
        /// Power exponent; computed from the payoff bounds when omitted
        #[arg(long)]
        gamma: Option<f64>,
        /// Also write per-path terminal wealth to terminal_wealth.csv
        #[arg(long)]
        per_path: bool,
        /// Clamp the closed-form weights to [0, delta]
        #[arg(long)]
        long_only: bool,
    },
    /// Weight-path and default-distance tables behind the two figures (CSV)
    Figures {
        #[arg(long, value_enum, default_value_t = HorizonArg::Fixed)]
        horizon_mode: HorizonArg,
        /// Window length in fixed mode (years)
        #[arg(long, default_value_t = 1.0)]
        horizon_years: f64,
        /// Clamp the weights to [0, delta]
        #[arg(long)]
        long_only: bool,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum UtilityArg {
    Linear,
    Power,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PayoffArg {
    Linear,
    Power,
    Payoff,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum HorizonArg {
    Fixed,
    Remaining,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}

/// Global flags shared by the subcommand handlers.
struct Ctx {
    json: bool,
    output_dir: Option<PathBuf>,
    sig: usize,
}

fn run(cli: Cli) -> Result<ExitCode> {
    let Cli {
        config: config_path,
        json,
        output_dir,
        seed,
        full_precision,
        command,
    } = cli;
    let ctx = Ctx {
        json,
        output_dir,
        sig: if full_precision { 17 } else { 6 },
    };
    let config = match &config_path {
        Some(path) => {
            let mut c = ScenarioConfig::load(path)?;
            if let Some(seed) = seed {
                c.sim.seed = seed;
            }
            Some(c)
        }
        None => None,
    };

    match command {
        Command::ApproxGamma { f, b, tol } => cmd_approx_gamma(&ctx, config.as_ref(), f, b, tol),
        Command::Policy {
            utility,
            n,
            gamma,
            long_only,
        } => {
            let config = require_config(config.as_ref())?;
            cmd_policy(&ctx, config, utility, n, gamma, long_only)
        }
        Command::Dd {
            va,
            d,
            mu,
            sigma,
            t,
        } => cmd_dd(&ctx, va, d, mu, sigma, t),
        Command::Verify {
            step,
            times,
            gamma,
            flip_hedge_sign,
        } => {
            let config = require_config(config.as_ref())?;
            cmd_verify(&ctx, config, step, times, gamma, flip_hedge_sign)
        }
        Command::Simulate {
            policy,
            utility,
            gamma,
            per_path,
            long_only,
        } => {
            let config = require_config(config.as_ref())?;
            cmd_simulate(&ctx, config, &policy, utility, gamma, per_path, long_only)
        }
        Command::Figures {
            horizon_mode,
            horizon_years,
            long_only,
        } => {
            let config = require_config(config.as_ref())?;
            cmd_figures(&ctx, config, horizon_mode, horizon_years, long_only)
        }
    }
}

fn require_config(config: Option<&ScenarioConfig>) -> Result<&ScenarioConfig> {
    config.ok_or_else(|| anyhow!("this subcommand needs a scenario config (--config <path>)"))
}

fn out_dir(ctx: &Ctx, config: &ScenarioConfig) -> PathBuf {
    ctx.output_dir
        .clone()
        .or_else(|| config.output_dir.clone())
        .unwrap_or_else(|| PathBuf::from("."))
}

/// Power exponent for the floored objective: the explicit override, or the
/// best-fit exponent for the configured payoff bounds.
fn resolve_gamma(config: &ScenarioConfig, gamma: Option<f64>) -> Result<f64> {
    match gamma {
        Some(g) => Ok(g),
        None => Ok(best_gamma(&config.liability, 1e-6)?.gamma_star),
    }
}

fn clamp_mode(long_only: bool) -> ClampMode {
    if long_only {
        ClampMode::LongOnly
    } else {
        ClampMode::Symmetric
    }
}

fn cmd_approx_gamma(
    ctx: &Ctx,
    config: Option<&ScenarioConfig>,
    f: Option<f64>,
    b: Option<f64>,
    tol: f64,
) -> Result<ExitCode> {
    let bounds = match (f, b, config) {
        (Some(f), Some(b), _) => llp_core::LiabilityBounds::new(f, b)?,
        (f, b, Some(c)) => {
            llp_core::LiabilityBounds::new(f.unwrap_or(c.liability.f), b.unwrap_or(c.liability.b))?
        }
        _ => {
            bail!("payoff bounds required: pass --f and --b, or a config with a liability section")
        }
    };
    let result = best_gamma(&bounds, tol)?;
    if ctx.json {
        println!("{}", serde_json::to_string(&result)?);
    } else {
        println!("gamma_star = {}", fmt_sig(result.gamma_star, ctx.sig));
        println!("err_at_min = {}", fmt_sig(result.err_at_min, ctx.sig));
        println!("iterations = {}", result.iterations);
        println!(
            "bracket = [{}, {}]",
            fmt_sig(result.bracket.0, ctx.sig),
            fmt_sig(result.bracket.1, ctx.sig)
        );
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_policy(
    ctx: &Ctx,
    config: &ScenarioConfig,
    utility: UtilityArg,
    n: usize,
    gamma: Option<f64>,
    long_only: bool,
) -> Result<ExitCode> {
    let spec = match utility {
        UtilityArg::Linear => UtilitySpec::Linear,
        UtilityArg::Power => UtilitySpec::Power {
            gamma: resolve_gamma(config, gamma)?,
        },
    };
    let path = policy_path(
        &spec,
        &config.vasicek,
        &config.market,
        &config.credit,
        n,
        clamp_mode(long_only),
    )?;
    let capital = capital_path(&path, &config.credit)?;

    let rows: Vec<Vec<String>> = (0..path.len())
        .map(|i| {
            vec![
                fmt_sig(path.times[i], ctx.sig),
                fmt_sig(path.weights[i], ctx.sig),
                path.clipped[i].to_string(),
                fmt_sig(capital[i], ctx.sig),
            ]
        })
        .collect();
    let file = out_dir(ctx, config).join("policy.csv");
    write_csv(&file, "t,pi,clipped,capital", &rows)?;
    println!("wrote {}", file.display());
    Ok(ExitCode::SUCCESS)
}

fn cmd_dd(ctx: &Ctx, va: f64, d: f64, mu: f64, sigma: f64, t: f64) -> Result<ExitCode> {
    let dd = distance_to_default(&DDQuery {
        v_a: va,
        d,
        mu,
        sigma,
        t,
    })?;
    if ctx.json {
        println!("{}", serde_json::json!({ "dd": dd }));
    } else {
        println!("dd = {}", fmt_sig(dd, ctx.sig));
    }
    Ok(ExitCode::SUCCESS)
}

#[allow(clippy::too_many_arguments)]
fn cmd_verify(
    ctx: &Ctx,
    config: &ScenarioConfig,
    step: f64,
    times: usize,
    gamma: Option<f64>,
    flip_hedge_sign: bool,
) -> Result<ExitCode> {
    let gamma = resolve_gamma(config, gamma)?;
    let spec = UtilitySpec::Power { gamma };
    let (v, m) = (&config.vasicek, &config.market);
    let delta = el_cap_delta(&config.credit)?;

    let report: VerifyReport = if flip_hedge_sign {
        verify_weights(gamma, v, m, delta, times, step, |t| {
            let sigma = bond_volatility(v, m, t)?;
            let beta = hedge_coefficient(&spec, v, m, t)?;
            let wrong = (m.zeta - v.b * beta) / ((1.0 - gamma) * sigma);
            Ok(wrong.clamp(-delta, delta))
        })?
    } else {
        verify_policy(&spec, v, m, delta, times, step)?
    };

    if ctx.json {
        println!(
            "{}",
            serde_json::json!({
                "max_deviation": report.max_deviation,
                "worst_time": report.worst_time,
                "pass": report.pass,
            })
        );
    } else {
        println!(
            "max deviation = {} at t = {}",
            fmt_sig(report.max_deviation, ctx.sig),
            fmt_sig(report.worst_time, ctx.sig)
        );
        println!(
            "verification: {}",
            if report.pass { "PASS" } else { "FAIL" }
        );
    }
    Ok(if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

enum PolicyChoice {
    ClosedForm,
    Cap,
    Constant(f64),
}

fn parse_policy_spec(s: &str) -> Result<PolicyChoice> {
    match s {
        "ll" => Ok(PolicyChoice::ClosedForm),
        "noll" => Ok(PolicyChoice::Cap),
        other => match other.strip_prefix("const:") {
            Some(w) => Ok(PolicyChoice::Constant(w.parse().with_context(|| {
                format!("cannot parse constant weight from {other:?}")
            })?)),
            None => bail!("unknown policy {other:?}: expected ll, noll, or const:<weight>"),
        },
    }
}

#[allow(clippy::too_many_arguments)]
fn cmd_simulate(
    ctx: &Ctx,
    config: &ScenarioConfig,
    policy_spec: &str,
    utility: PayoffArg,
    gamma: Option<f64>,
    per_path: bool,
    long_only: bool,
) -> Result<ExitCode> {
    let (v, m) = (&config.vasicek, &config.market);
    let delta = el_cap_delta(&config.credit)?;
    let mode = clamp_mode(long_only);
    let n_points = config.sim.n_steps + 1;

    let path = match parse_policy_spec(policy_spec)? {
        PolicyChoice::ClosedForm => {
            let spec = UtilitySpec::Power {
                gamma: resolve_gamma(config, gamma)?,
            };
            policy_path(&spec, v, m, &config.credit, n_points, mode)?
        }
        PolicyChoice::Cap => {
            policy_path(&UtilitySpec::Linear, v, m, &config.credit, n_points, mode)?
        }
        PolicyChoice::Constant(w) => {
            let lo = if long_only { 0.0 } else { -delta };
            if !w.is_finite() || w < lo || w > delta {
                bail!("constant weight {w} violates the expected-loss cap (allowed range [{lo}, {delta}])");
            }
            PolicyPath::constant(w, m.t, n_points)?
        }
    };

    let payoff = match utility {
        PayoffArg::Linear => TerminalPayoff::Linear,
        PayoffArg::Power => TerminalPayoff::Power {
            gamma: resolve_gamma(config, gamma)?,
        },
        PayoffArg::Payoff => TerminalPayoff::Floored {
            floor: config.liability.f,
        },
    };

    let terminal = simulate_paths(v, m, &path, 1.0, &config.sim)?;
    let result = summarize(&terminal, &payoff, config.liability.f)?;

    let dir = out_dir(ctx, config);
    let summary = dir.join("simulation.csv");
    write_csv(
        &summary,
        "mean_utility,std_error,mean_terminal_wealth,fraction_below_floor",
        &[vec![
            fmt_sig(result.mean_utility, ctx.sig),
            fmt_sig(result.std_error, ctx.sig),
            fmt_sig(result.mean_terminal_wealth, ctx.sig),
            fmt_sig(result.fraction_below_floor, ctx.sig),
        ]],
    )?;
    if per_path {
        let rows: Vec<Vec<String>> = terminal
            .iter()
            .enumerate()
            .map(|(i, &x)| vec![i.to_string(), fmt_sig(x, ctx.sig)])
            .collect();
        write_csv(
            &dir.join("terminal_wealth.csv"),
            "path,terminal_wealth",
            &rows,
        )?;
    }

    if ctx.json {
        println!("{}", serde_json::to_string(&result)?);
    } else {
        println!(
            "mean_utility = {} +/- {}",
            fmt_sig(result.mean_utility, ctx.sig),
            fmt_sig(result.std_error, ctx.sig)
        );
        println!(
            "mean_terminal_wealth = {}",
            fmt_sig(result.mean_terminal_wealth, ctx.sig)
        );
        println!(
            "fraction_below_floor = {}",
            fmt_sig(result.fraction_below_floor, ctx.sig)
        );
        println!("wrote {}", summary.display());
    }
    Ok(ExitCode::SUCCESS)
}

fn cmd_figures(
    ctx: &Ctx,
    config: &ScenarioConfig,
    horizon_mode: HorizonArg,
    horizon_years: f64,
    long_only: bool,
) -> Result<ExitCode> {
    let debt_face = config
        .debt_face
        .ok_or_else(|| anyhow!("config field debt_face is required for the figure tables"))?;
    let (v, m) = (&config.vasicek, &config.market);
    let mode = clamp_mode(long_only);
    let n_points = 201;

    let gamma = resolve_gamma(config, None)?;
    let with_floor = policy_path(
        &UtilitySpec::Power { gamma },
        v,
        m,
        &config.credit,
        n_points,
        mode,
    )?;
    let without_floor = policy_path(&UtilitySpec::Linear, v, m, &config.credit, n_points, mode)?;
    let capital = capital_path(&with_floor, &config.credit)?;

    let rows1: Vec<Vec<String>> = (0..n_points)
        .map(|i| {
            vec![
                fmt_sig(with_floor.times[i], ctx.sig),
                fmt_sig(without_floor.weights[i], ctx.sig),
                fmt_sig(with_floor.weights[i], ctx.sig),
                with_floor.clipped[i].to_string(),
                fmt_sig(capital[i], ctx.sig),
            ]
        })
        .collect();

    let horizon = match horizon_mode {
        HorizonArg::Fixed => HorizonMode::Fixed,
        HorizonArg::Remaining => HorizonMode::Remaining,
    };
    let dd_noll = dd_series(&without_floor, v, m, debt_face, horizon, horizon_years)?;
    let dd_ll = dd_series(&with_floor, v, m, debt_face, horizon, horizon_years)?;

    // Join the two series on their shared grid times; points skipped in
    // either series drop out of the table.
    let mut rows2 = Vec::new();
    let (mut i, mut j) = (0, 0);
    while i < dd_noll.len() && j < dd_ll.len() {
        let (ti, tj) = (dd_noll.times[i], dd_ll.times[j]);
        if ti == tj {
            rows2.push(vec![
                fmt_sig(ti, ctx.sig),
                fmt_sig(dd_noll.sigma_p[i], ctx.sig),
                fmt_sig(dd_ll.sigma_p[j], ctx.sig),
                fmt_sig(dd_noll.dd_values[i], ctx.sig),
                fmt_sig(dd_ll.dd_values[j], ctx.sig),
            ]);
            i += 1;
            j += 1;
        } else if ti < tj {
            i += 1;
        } else {
            j += 1;
        }
    }

    let dir = out_dir(ctx, config);
    let f1 = dir.join("figure1.csv");
    let f2 = dir.join("figure2.csv");
    write_csv(&f1, "t,pi_no_LL,pi_LL,clipped_LL,capital_LL", &rows1)?;
    write_csv(&f2, "t,sigma_p_no_LL,sigma_p_LL,dd_no_LL,dd_LL", &rows2)?;
    println!("wrote {}", f1.display());
    println!("wrote {}", f2.display());
    Ok(ExitCode::SUCCESS)
}
