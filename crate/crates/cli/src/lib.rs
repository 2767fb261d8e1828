//! Command-line front end for the `rdgame` equilibrium engine.
//!
//! Exit codes: 0 on success, 1 on invalid input, 2 when `verify` finds a
//! failing check.

pub mod commands;
pub mod config;
pub mod output;

use std::path::PathBuf;

use anyhow::Result;
use clap::{Args, Parser, Subcommand, ValueEnum};
use rdgame_core::EntryMode;

use crate::commands::ExtraCheck;
use crate::config::{build_scenario, ConfigFile, Overrides};
use crate::output::{Format, Render};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 1;
pub const EXIT_VERIFY: i32 = 2;

const CSV_COLUMNS: &str = "\
CSV columns (a header row is always written):
  eq      plan,location,price,profit,foc_residual,max_deviation_gain
  expost  plan,location,held,expost_price,payoff,purchased,government_utility
  exante  plan,location,exante_price,expected_expost_profit,offer,adoption,cost_adopt_all,cost_adopt_none
  entry   fixed_cost,mode,n_star,alternate,binding_plan,net_profits
  sweep   fixed_cost,mode,n_star,alternate,binding_plan,net_profits
  audit   plan,location,status_quo,best_location,best_profit,max_gain,best_jump_profit,best_edge_profit,quadrature_gain
  verify  quantity,method,closed_form,oracle,abs_error,tolerance,stderr,samples,verdict
List-valued cells (net_profits) are ';'-separated; missing values print as '-'.
Plan numbers are 1-based and follow the order locations were given in.";

#[derive(Debug, Parser)]
#[command(name = "rdgame", version, about = "Location-price equilibria of competitively funded research plans", after_help = CSV_COLUMNS)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output encoding.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    pub format: Format,

    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// Monte Carlo seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Indifference band for adoption and the relocation check.
    #[arg(long, global = true)]
    pub tolerance: Option<f64>,

    /// Relocation grid resolution (points per unit interval).
    #[arg(long, global = true)]
    pub grid: Option<usize>,

    /// Monte Carlo sample count.
    #[arg(long = "mc-samples", global = true)]
    pub mc_samples: Option<usize>,

    /// TOML file with scenario defaults; flags override it.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Number of equally spaced plans.
    #[arg(long, global = true)]
    pub n: Option<usize>,

    /// Comma-separated plan locations in [0, 1].
    #[arg(long, value_delimiter = ',', global = true)]
    pub locations: Option<Vec<f64>>,

    /// Fixed cost of running a plan.
    #[arg(long = "fixed-cost", global = true)]
    pub fixed_cost: Option<f64>,

    /// Government's baseline utility (at least 2).
    #[arg(long = "baseline-utility", global = true)]
    pub baseline_utility: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Paper,
    Computed,
}

impl From<ModeArg> for EntryMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Paper => EntryMode::Paper,
            ModeArg::Computed => EntryMode::Computed,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Location equilibrium for --n plans: locations, prices, FOC residuals, relocation gains.
    Eq,
    /// Resolve the ex-post price game at ideal point --t.
    Expost {
        #[arg(long)]
        t: f64,
        /// Comma-separated plan numbers already funded ex ante.
        #[arg(long, value_delimiter = ',')]
        held: Vec<usize>,
        /// Total spent ex ante.
        #[arg(long = "exante-expenditure", default_value_t = 0.0)]
        exante_expenditure: f64,
    },
    /// Ex-ante prices, the government's response to offered prices, and the cost of both equilibria.
    Exante {
        /// Offered ex-ante prices, one per plan; defaults to the equilibrium prices.
        #[arg(long, value_delimiter = ',')]
        prices: Option<Vec<f64>>,
    },
    /// Free-entry number of plans for --fixed-cost.
    Entry {
        #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
        mode: ModeArg,
    },
    /// Free-entry variety over a range of fixed costs.
    Sweep {
        #[arg(long)]
        from: f64,
        #[arg(long)]
        to: f64,
        #[arg(long)]
        steps: usize,
        /// Geometric instead of linear spacing.
        #[arg(long)]
        log: bool,
        #[arg(long, value_enum, default_value_t = ModeArg::Paper)]
        mode: ModeArg,
    },
    /// Grid audit of every plan's relocation options, with its quadrature twin.
    Audit,
    /// Cross-check every closed form against its numerical oracle.
    Verify {
        #[arg(long, value_enum)]
        check: Vec<ExtraCheck>,
    },
}

fn overrides(g: &GlobalArgs) -> Overrides {
    Overrides {
        n: g.n,
        locations: g.locations.clone(),
        fixed_cost: g.fixed_cost,
        baseline_utility: g.baseline_utility,
        tolerance: g.tolerance,
        grid_resolution: g.grid,
        mc_samples: g.mc_samples,
        rng_seed: g.seed,
    }
}

/// Rendered output and the exit code it implies.
pub fn execute(cli: &Cli) -> Result<(String, i32)> {
    let file = cli.global.config.as_deref().map(ConfigFile::load).transpose()?;
    let scenario = build_scenario(file, overrides(&cli.global))?;
    let format = cli.global.format;
    Ok(match &cli.command {
        Command::Eq => (commands::eq(&scenario)?.render(format)?, EXIT_OK),
        Command::Expost { t, held, exante_expenditure } => {
            (commands::expost(&scenario, *t, held, *exante_expenditure)?.render(format)?, EXIT_OK)
        }
        Command::Exante { prices } => (commands::exante(&scenario, prices.as_deref())?.render(format)?, EXIT_OK),
        Command::Entry { mode } => (commands::entry(&scenario, (*mode).into())?.render(format)?, EXIT_OK),
        Command::Sweep { from, to, steps, log, mode } => {
            (commands::sweep(*from, *to, *steps, *log, (*mode).into())?.render(format)?, EXIT_OK)
        }
        Command::Audit => (commands::audit(&scenario)?.render(format)?, EXIT_OK),
        Command::Verify { check } => {
            let report = commands::verify(&scenario, check)?;
            let code = if report.passed { EXIT_OK } else { EXIT_VERIFY };
            (report.render(format)?, code)
        }
    })
}

/// Parses `args`, runs the command and writes its output; returns the exit code.
pub fn run<I, S>(args: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli).and_then(|(text, code)| {
        match &cli.global.out {
            Some(path) => std::fs::write(path, &text)?,
            None => print!("{text}"),
        }
        Ok(code)
    }) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_INPUT
        }
    }
}
