//! `mapnorm` — certified distance measures for Hermiticity-preserving maps.
//!
//! Every subcommand reads a channel (JSON file or `builtin:` mini-spec,
//! except `nonmarkov`, which takes `--family`), runs self-checking
//! primal/dual solves, and prints one deterministic JSON report.
//! Identical inputs produce byte-identical output regardless of `--jobs`.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use mapnorm::error::ErrorClass;
use mapnorm::measures::MeasureOptions;
use mapnorm::{Error, Result};

/// Certified distance-to-channel measures, simulation plans, and
/// divisibility scans for Hermiticity-preserving maps.
#[derive(Parser)]
#[command(name = "mapnorm", version, about, max_term_width = 100)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,

    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args)]
struct GlobalArgs {
    /// Channel source: a JSON file path or `builtin:<name>?k=v&k=v`.
    #[arg(long, global = true, value_name = "SOURCE")]
    channel: Option<String>,

    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Relative duality-gap tolerance per solve (default 1e-9).
    #[arg(long, global = true, value_name = "TOL")]
    gap_tol: Option<f64>,

    /// Relative feasibility tolerance per solve (default 1e-9).
    #[arg(long, global = true, value_name = "TOL")]
    feas_tol: Option<f64>,

    /// Worker threads: 1 forces sequential evaluation, N sizes the pool.
    #[arg(long, global = true, value_name = "N")]
    jobs: Option<usize>,

    /// Seed for randomized verification probes.
    #[arg(long, global = true, value_name = "SEED", default_value_t = 0)]
    seed: u64,

    /// Also solve the certified programs where the command would
    /// otherwise report closed-form bounds only.
    #[arg(long, global = true)]
    certify: bool,

    /// Dump the compiled primal/dual cone programs to this file.
    #[arg(long, global = true, value_name = "PATH")]
    dump_sdp: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Evaluate named measures with primal/dual certification.
    Compute {
        /// Measures to evaluate: diamond_norm, base_norm_cptni, R, Rprime,
        /// Rdoubleprime, game_advantage, spa, spa_prime (aliases: dia,
        /// base, cptni, R', R'', advantage, spa').
        #[arg(required = true, value_name = "MEASURE")]
        measures: Vec<String>,
    },

    /// Report closed-form lower/upper bounds (no SDP unless --certify).
    Bounds {
        /// Forward channel source; treats --channel as its approximate
        /// inverse and adds composition-error bounds.
        #[arg(long, value_name = "SOURCE")]
        approx_inverse: Option<String>,

        /// Observed composition error for --approx-inverse.
        #[arg(long, value_name = "EPS", default_value_t = 0.0)]
        epsilon: f64,
    },

    /// Build a channel-simulation plan realizing the map at optimal cost.
    Simulate {
        /// Random probe states used to replay the plan against the map.
        #[arg(long, value_name = "N", default_value_t = 50)]
        probes: usize,
    },

    /// Construct a discrimination game whose payoff certifies the
    /// advantage of the map over every channel.
    Game,

    /// Cross-check all measure identities and inequalities; exit 0 only
    /// if every applicable check passes.
    Verify,

    /// Scan a one-parameter channel family for CP-divisibility breaking.
    Nonmarkov {
        /// Family mini-spec `<name>?k=v&k=v`, e.g.
        /// `depolarizing_semigroup?gamma=1` or
        /// `oscillatory_dephasing?gamma=0.2&omega=2`.
        #[arg(long, value_name = "SPEC")]
        family: String,

        /// Window start time.
        #[arg(long, value_name = "T", default_value_t = 0.0)]
        t_min: f64,

        /// Window end time.
        #[arg(long, value_name = "T")]
        t_max: f64,

        /// Grid intervals inside the window.
        #[arg(long, value_name = "N", default_value_t = 24)]
        steps: usize,

        /// Finite difference used for the divisibility rate.
        #[arg(long, value_name = "EPS", default_value_t = 1e-4)]
        eps: f64,
    },
}

fn tolerance(flag: &str, value: Option<f64>, default: f64) -> Result<f64> {
    match value {
        None => Ok(default),
        Some(v) if v.is_finite() && v > 0.0 && v < 1.0 => Ok(v),
        Some(v) => Err(Error::Validation(format!(
            "{flag} must lie strictly between 0 and 1, got {v}"
        ))),
    }
}

fn run(cli: Cli) -> Result<i32> {
    let g = cli.global;
    let mut opts = MeasureOptions::default();
    opts.gap_tol = tolerance("--gap-tol", g.gap_tol, opts.gap_tol)?;
    opts.feas_tol = tolerance("--feas-tol", g.feas_tol, opts.feas_tol)?;
    opts.parallelism = commands::configure_jobs(g.jobs)?;

    let ctx = commands::Ctx {
        channel: g.channel,
        out: g.out,
        opts,
        seed: g.seed,
        certify: g.certify,
        dump_sdp: g.dump_sdp,
    };

    match cli.command {
        Cmd::Compute { measures } => commands::cmd_compute(&ctx, &measures),
        Cmd::Bounds {
            approx_inverse,
            epsilon,
        } => commands::cmd_bounds(&ctx, approx_inverse.as_deref(), epsilon),
        Cmd::Simulate { probes } => commands::cmd_simulate(&ctx, probes),
        Cmd::Game => commands::cmd_game(&ctx),
        Cmd::Verify => commands::cmd_verify(&ctx),
        Cmd::Nonmarkov {
            family,
            t_min,
            t_max,
            steps,
            eps,
        } => commands::cmd_nonmarkov(&ctx, &family, t_min, t_max, steps, eps),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e.class() {
                ErrorClass::Input => 2,
                ErrorClass::Solver => 3,
                ErrorClass::Check => 1,
            })
        }
    }
}
