use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use fairdual::criteria::Orientation;
use fairdual::search::SearchOptions;
use fairdual::shares::PriceNormalization;

mod commands;
mod load;
mod output;

#[derive(Parser)]
#[command(name = "fairdual", version, about = "Fair allocation of goods and chores with copies")]
struct Cli {
    /// Print machine-readable JSON instead of tables.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for enumeration.
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrientationArg {
    Goods,
    Chores,
}

impl From<OrientationArg> for Orientation {
    fn from(o: OrientationArg) -> Self {
        match o {
            OrientationArg::Goods => Orientation::Goods,
            OrientationArg::Chores => Orientation::Chores,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum NormalizationArg {
    PerType,
    PerCopy,
}

impl From<NormalizationArg> for PriceNormalization {
    fn from(n: NormalizationArg) -> Self {
        match n {
            NormalizationArg::PerType => PriceNormalization::PerType,
            NormalizationArg::PerCopy => PriceNormalization::PerCopy,
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Check one allocation against a notion (ef, ef1, efx, efl, *_wc, prop, mms, pareto).
    Check {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        allocation: PathBuf,
        #[arg(long)]
        notion: String,
        #[arg(long, value_enum)]
        orientation: Option<OrientationArg>,
        /// Scale for mms, as p/q.
        #[arg(long)]
        alpha: Option<String>,
        /// Bound MMS from below through this allocation instead of computing it.
        #[arg(long)]
        witness: Option<PathBuf>,
    },
    /// Decide by enumeration whether a fair allocation exists.
    Exists {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        notion: String,
        #[arg(long, value_enum)]
        orientation: Option<OrientationArg>,
        #[arg(long)]
        alpha: Option<String>,
        /// Scan every allocation and count the fair ones.
        #[arg(long)]
        all: bool,
    },
    /// Swap goods and chores: negate values and complement copy counts.
    Dualize {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        allocation: Option<PathBuf>,
        #[arg(long)]
        out_instance: Option<PathBuf>,
        #[arg(long)]
        out_allocation: Option<PathBuf>,
        /// envy:efx|efl|ef1|ef or share:prop|mms
        #[arg(long)]
        check: Option<String>,
    },
    /// Compute one agent's share.
    Shares {
        #[arg(long)]
        instance: PathBuf,
        /// 1-based agent number.
        #[arg(long)]
        agent: usize,
        /// prop, mms, tps or aps.
        #[arg(long)]
        kind: String,
        /// APS entitlement as p/q; defaults to 1/n.
        #[arg(long)]
        entitlement: Option<String>,
        /// Lower-bound MMS through this allocation.
        #[arg(long)]
        witness: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "per-type")]
        normalization: NormalizationArg,
    },
    /// Maximize Nash welfare by enumeration.
    Mnw {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Find an EFX_WC allocation for leveled goods.
    SolveLeveled {
        #[arg(long)]
        instance: PathBuf,
        /// Write the swap trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Re-check the bundled fixtures.
    Replicate {
        #[arg(required_unless_present_any = ["all", "list"], conflicts_with_all = ["all", "list"])]
        id: Option<String>,
        #[arg(long)]
        all: bool,
        /// Print the fixture ids.
        #[arg(long)]
        list: bool,
    },
    /// Random sweep over the notion lattice and MMS ratios.
    Sweep {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 1000)]
        instances: u64,
        #[arg(long, default_value_t = 3)]
        max_agents: usize,
        #[arg(long, default_value_t = 4)]
        max_types: usize,
        #[arg(long, default_value_t = 4)]
        max_value: u32,
        /// Also write the JSON report here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn options(jobs: Option<usize>) -> fairdual::Result<SearchOptions> {
    let options = SearchOptions::from_env()?;
    match jobs {
        Some(k) => options.with_jobs(k),
        None => Ok(options),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = options(cli.jobs)
        .map_err(load::Failure::from)
        .and_then(|opts| commands::run(cli.command, &opts));
    match result {
        Ok(report) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&report.json).expect("serializable"));
            } else {
                print!("{}", report.text);
            }
            ExitCode::from(report.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
