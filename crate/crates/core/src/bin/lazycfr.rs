//! `lazycfr run` and `lazycfr compare`.
//!
//! Exit status: 0 on success, 2 on invalid arguments, 3 when the output
//! cannot be written, 1 on any other failure.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, CommandFactory, Parser, Subcommand, ValueEnum};

use lazycfr::run::{
    compare, default_targets, run, EvalEvery, GameChoice, RunConfig, SolverKind, OUT_DIR_ENV,
};
use lazycfr::Error;

#[derive(Parser)]
#[command(name = "lazycfr", version, about = "CFR-family solvers benchmarked by touched nodes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one solver and write its convergence CSV and manifest.
    Run {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value = "cfr")]
        solver: SolverArg,
    },
    /// Run several solvers on one game and tabulate touched nodes per
    /// exploitability target.
    Compare {
        #[command(flatten)]
        common: Common,
        /// Repeat for each solver; the first is the baseline.
        #[arg(long, value_enum, required = true)]
        solver: Vec<SolverArg>,
        /// Exploitability targets (normalized units).
        #[arg(long, value_delimiter = ',')]
        targets: Vec<f64>,
    },
}

#[derive(Args)]
struct Common {
    #[arg(long, value_enum, default_value = "kuhn")]
    game: GameArg,
    /// Raises per player per betting round in Leduc.
    #[arg(long, default_value_t = 2)]
    bet_max: u32,
    /// Actions per decision for the gadget and adversary games.
    #[arg(long, default_value_t = 2)]
    branching: usize,
    /// Decisions per player in the adversary game.
    #[arg(long, default_value_t = 2)]
    depth: usize,
    #[arg(long, default_value_t = 1000)]
    rounds: usize,
    /// Evaluation cadence: `500` rounds or `2000000n` touched nodes.
    #[arg(long)]
    eval_every: Option<String>,
    /// Lazy update threshold θ.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// CSV path (run) or output directory (compare). Defaults to
    /// `$LAZYCFR_OUT_DIR`, then `./out`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Report payoffs in chips instead of normalized units.
    #[arg(long)]
    native_units: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum GameArg {
    Kuhn,
    Leduc,
    Gadget,
    Adversary,
}

#[derive(Clone, Copy, ValueEnum)]
#[value(rename_all = "snake_case")]
enum SolverArg {
    Cfr,
    CfrPlus,
    Mccfr,
    LazyCfr,
    LazyCfrPlus,
}

impl From<SolverArg> for SolverKind {
    fn from(s: SolverArg) -> Self {
        match s {
            SolverArg::Cfr => SolverKind::Cfr,
            SolverArg::CfrPlus => SolverKind::CfrPlus,
            SolverArg::Mccfr => SolverKind::Mccfr,
            SolverArg::LazyCfr => SolverKind::LazyCfr,
            SolverArg::LazyCfrPlus => SolverKind::LazyCfrPlus,
        }
    }
}

impl Common {
    fn config(&self, solver: SolverKind) -> Result<RunConfig, Error> {
        let game = match self.game {
            GameArg::Kuhn => GameChoice::Kuhn,
            GameArg::Leduc => GameChoice::Leduc {
                bet_maximum: self.bet_max,
            },
            GameArg::Gadget => GameChoice::Gadget {
                actions: self.branching,
            },
            GameArg::Adversary => GameChoice::Adversary {
                branching: self.branching,
                depth: self.depth,
            },
        };
        let mut c = RunConfig::new(game, solver, self.rounds);
        c.eval_every = self.eval_every.as_deref().map(EvalEvery::parse).transpose()?;
        c.threshold = self.threshold;
        c.seed = self.seed;
        c.out = self.out.clone();
        c.native_units = self.native_units;
        c.validate()?;
        Ok(c)
    }
}

fn fail(e: Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) => {
            eprintln!("\n{}", Cli::command().render_usage());
            ExitCode::from(2)
        }
        Error::Io { .. } => ExitCode::from(3),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Run { common, solver } => common.config(solver.into()).and_then(|c| {
            let out = run(&c)?;
            out.write()?;
            match out.manifest.final_exploitability {
                Some(e) => println!(
                    "{}: {} rounds, {} touched nodes, exploitability {e:.6e} -> {}",
                    c.solver.name(),
                    out.manifest.rounds_completed,
                    out.manifest.touched_nodes,
                    out.manifest.csv.display()
                ),
                None => println!("{} rounds -> {}", c.rounds, out.manifest.csv.display()),
            }
            Ok(())
        }),
        Command::Compare {
            common,
            solver,
            targets,
        } => (|| {
            let dir = common
                .out
                .clone()
                .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
                .unwrap_or_else(|| PathBuf::from("out"));
            let mut configs = Vec::new();
            for s in solver {
                let mut c = common.config(s.into())?;
                c.out = None;
                let name = c.csv_path();
                c.out = Some(dir.join(name.file_name().expect("csv file name")));
                configs.push(c);
            }
            let targets = if targets.is_empty() {
                default_targets()
            } else {
                targets
            };
            let (report, outputs) = compare(&configs, &targets)?;
            for o in &outputs {
                o.write()?;
            }
            let path = dir.join(format!("compare-{}.json", configs[0].game.name()));
            let text = serde_json::to_string_pretty(&report).map_err(|e| Error::Config(e.to_string()))?;
            std::fs::write(&path, text).map_err(|e| Error::Io {
                path: path.display().to_string(),
                reason: e.to_string(),
            })?;
            print!("{}", report.to_table());
            Ok(())
        })(),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(e),
    }
}
