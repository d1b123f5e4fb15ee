//! Command-line front end for the `clusterhom` engine.

mod commands;
mod output;

use std::io::{self, Write};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use clusterhom::Limits;

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "clusterhom", version, about = "Exact homology of configuration spaces of clusters")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "table")]
    pub format: Format,
    /// Worker threads; defaults to one per core.
    #[arg(long, global = true, env = "CLUSTERHOM_THREADS")]
    pub threads: Option<usize>,
    /// Seed for the randomized suites.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_parser = positive)]
    pub max_partition_size: Option<usize>,
    #[arg(long, global = true, value_parser = positive)]
    pub max_points: Option<usize>,
    #[arg(long, global = true, value_parser = positive)]
    pub max_dimension: Option<usize>,
    #[arg(long, global = true, value_parser = positive)]
    pub max_bar_weight: Option<usize>,
}

impl GlobalArgs {
    fn limits(&self) -> Limits {
        let d = Limits::default();
        Limits {
            max_partition_size: self.max_partition_size.unwrap_or(d.max_partition_size),
            max_points: self.max_points.unwrap_or(d.max_points),
            max_dimension: self.max_dimension.unwrap_or(d.max_dimension),
            max_bar_weight: self.max_bar_weight.unwrap_or(d.max_bar_weight),
        }
    }
}

fn positive(s: &str) -> Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(v) => Ok(v),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// List entanglement types of a given size, or of a given weight with uniform block size.
    TypesEnum(commands::TypesEnumArgs),
    /// Count entanglement types by size (or by weight with --k).
    TypesCount(commands::TypesCountArgs),
    /// Factor a partition into entanglement types.
    Factorize(commands::FactorizeArgs),
    /// Partition of a configuration on the line, with its face maps.
    Chi(commands::ChiArgs),
    /// Homology of the bar complex of the discrete cluster monoid.
    BarHomology(commands::BarHomologyArgs),
    /// Sign-twisted homology of a coloured configuration space.
    ColoredHomology(commands::ColoredHomologyArgs),
    /// Stable homology of vertical cluster configuration spaces.
    Stable(commands::StableArgs),
    /// One associated-graded piece of the stable homology.
    AssocGraded(commands::AssocGradedArgs),
    /// Conjectural homology of the space with r clusters.
    PredictUnstable(commands::PredictUnstableArgs),
    /// Run the invariant suite.
    Selftest,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    let limits = cli.global.limits();
    let report = match commands::run(&cli.command, &cli.global, &limits) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(commands::exit_code(&e));
        }
    };
    let mut stdout = io::stdout().lock();
    if let Err(e) = report.render(cli.global.format, &mut stdout).and_then(|_| Ok(stdout.flush()?)) {
        eprintln!("error: {e:#}");
        return ExitCode::from(1);
    }
    if let Some(msg) = &report.failed {
        eprintln!("failed: {msg}");
        return ExitCode::from(1);
    }
    if let Some(msg) = &report.incomplete {
        eprintln!("incomplete: {msg}");
        return ExitCode::from(2);
    }
    ExitCode::SUCCESS
}
