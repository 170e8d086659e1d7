use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

mod commands;
mod report;

use report::{Format, Report};

pub const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Parser, Debug)]
#[command(name = "khkit", version, about = "Knot invariants, Khovanov homology and slice-family checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,

    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Refuse diagrams with more crossings than this.
    #[arg(long, global = true)]
    max_crossings: Option<usize>,
}

#[derive(Args, Debug, Clone)]
#[group(required = true, multiple = false)]
pub struct Input {
    /// Braid word, `"<strands>: g1 g2 ..."`.
    #[arg(long, allow_hyphen_values = true)]
    pub braid: Option<String>,

    /// PD file, text `X(a,b,c,d) ... O(e)` or JSON.
    #[arg(long)]
    pub pd: Option<PathBuf>,

    /// Unlink with this many components.
    #[arg(long)]
    pub unlink: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Jones polynomial by the bracket state sum and by the skein tree.
    Jones(Input),
    /// Integral bigraded Khovanov homology and its collapsed grading.
    Khovanov(Input),
    /// Random Markov walk; checks Jones and Khovanov ranks are unchanged.
    MarkovTest {
        #[command(flatten)]
        input: Input,
        #[arg(long, default_value_t = 20)]
        steps: usize,
        #[arg(long, hide = true)]
        inject_bug: bool,
    },
    /// Checks on the slice family.
    #[command(subcommand)]
    Slice(SliceCommand),
}

#[derive(Subcommand, Debug)]
enum SliceCommand {
    /// Characteristic-polynomial identity on random exact instances.
    Charpoly {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Crossingless matchings of 2m points.
    Matchings {
        #[arg(long)]
        m: usize,
    },
    /// Parallel transport around the unit circle.
    Transport,
    /// The word identity (AB)^(6n) = I.
    Sl2 {
        #[arg(long)]
        n: usize,
    },
}

fn configure_threads() {
    if let Some(n) = std::env::var("KHKIT_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialization only happens in tests and is harmless
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build_global();
    }
}

fn run(cli: &Cli) -> khkit::Result<Report> {
    let caps = commands::Caps { max_crossings: cli.max_crossings };
    match &cli.command {
        Command::Jones(input) => commands::jones(input, caps),
        Command::Khovanov(input) => commands::khovanov(input, caps),
        Command::MarkovTest { input, steps, inject_bug } => {
            commands::markov_test(input, caps, *steps, cli.seed, *inject_bug)
        }
        Command::Slice(SliceCommand::Charpoly { m, trials }) => commands::slice_charpoly(*m, *trials, cli.seed),
        Command::Slice(SliceCommand::Matchings { m }) => commands::slice_matchings(*m),
        Command::Slice(SliceCommand::Transport) => commands::slice_transport(cli.seed),
        Command::Slice(SliceCommand::Sl2 { n }) => commands::slice_sl2(*n),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    match run(&cli) {
        Ok(report) => {
            print!("{}", report.render(cli.format));
            ExitCode::from(if report.passed { 0 } else { 1 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(commands::exit_code(&e))
        }
    }
}
