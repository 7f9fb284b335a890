//! Experiment driver: build a game, run one solver with periodic
//! exploitability evaluation, and compare solvers by touched nodes.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adversary::{measure_lower_bound, AdversarySpec, LowerBoundCurve, RmLearner};
use crate::cfr::{CfrState, MccfrState, RunHistory, Variant};
use crate::error::{Error, Result};
use crate::game::{Game, Player, StrategyProfile};
use crate::games::{gadget_matrix, kuhn, leduc, LeducConfig};
use crate::lazy::LazyState;
use crate::metrics::{exploitability, external_regret, ConvergenceLog, LogRecord, XiReport};

/// Environment variable naming the directory outputs go to when no path is
/// given.
pub const OUT_DIR_ENV: &str = "LAZYCFR_OUT_DIR";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GameChoice {
    Kuhn,
    Leduc { bet_maximum: u32 },
    /// A random `A × A` matrix game played as an extensive-form game, with
    /// payoffs drawn from the run seed.
    Gadget { actions: usize },
    /// The lower-bound adversary. Runs the regret harness instead of a
    /// solver.
    Adversary { branching: usize, depth: usize },
}

impl GameChoice {
    pub fn name(&self) -> String {
        match self {
            GameChoice::Kuhn => "kuhn".into(),
            GameChoice::Leduc { bet_maximum } => format!("leduc{bet_maximum}"),
            GameChoice::Gadget { actions } => format!("gadget{actions}"),
            GameChoice::Adversary { branching, depth } => format!("adversary{branching}x{depth}"),
        }
    }

    /// Builds the game; `seed` only matters for the gadget.
    pub fn build(&self, seed: u64) -> Result<Game> {
        match *self {
            GameChoice::Kuhn => Game::new(&kuhn()),
            GameChoice::Leduc { bet_maximum } => {
                Game::new(&leduc(&LeducConfig::with_bet_maximum(bet_maximum))?)
            }
            GameChoice::Gadget { actions } => {
                if actions == 0 {
                    return Err(Error::Config("gadget needs at least one action".into()));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let m: Vec<Vec<f64>> = (0..actions)
                    .map(|_| (0..actions).map(|_| rng.gen_range(-1.0..=1.0)).collect())
                    .collect();
                Game::new(&gadget_matrix(&m))
            }
            GameChoice::Adversary { .. } => Err(Error::Config(
                "the adversary is an online environment, not a fixed game".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolverKind {
    Cfr,
    CfrPlus,
    Mccfr,
    LazyCfr,
    LazyCfrPlus,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Cfr,
        SolverKind::CfrPlus,
        SolverKind::Mccfr,
        SolverKind::LazyCfr,
        SolverKind::LazyCfrPlus,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Cfr => "cfr",
            SolverKind::CfrPlus => "cfr_plus",
            SolverKind::Mccfr => "mccfr",
            SolverKind::LazyCfr => "lazy_cfr",
            SolverKind::LazyCfrPlus => "lazy_cfr_plus",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown solver `{s}`")))
    }
}

/// When to evaluate the average strategy.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalEvery {
    Rounds(u64),
    /// Whenever the cumulative touched-node count crosses a multiple.
    Nodes(u64),
}

impl EvalEvery {
    /// `500` or `500r` is a round interval, `2000000n` a node interval.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = || Error::Config(format!("bad evaluation cadence `{s}`"));
        let (num, nodes) = match s.strip_suffix('n') {
            Some(n) => (n, true),
            None => (s.strip_suffix('r').unwrap_or(s), false),
        };
        let k: f64 = num.parse().map_err(|_| bad())?;
        if !(k >= 1.0 && k.fract() == 0.0 && k < u64::MAX as f64) {
            return Err(bad());
        }
        Ok(if nodes {
            EvalEvery::Nodes(k as u64)
        } else {
            EvalEvery::Rounds(k as u64)
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub game: GameChoice,
    pub solver: SolverKind,
    pub rounds: usize,
    /// `None` evaluates every four full traversals' worth of touched nodes.
    pub eval_every: Option<EvalEvery>,
    /// θ for the lazy solvers.
    pub threshold: f64,
    pub seed: u64,
    /// CSV destination; the manifest goes next to it with a `.json`
    /// extension.
    pub out: Option<PathBuf>,
    pub native_units: bool,
}

impl RunConfig {
    pub fn new(game: GameChoice, solver: SolverKind, rounds: usize) -> Self {
        Self {
            game,
            solver,
            rounds,
            eval_every: None,
            threshold: 1.0,
            seed: 0,
            out: None,
            native_units: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rounds == 0 {
            return Err(Error::Config("rounds must be at least 1".into()));
        }
        if matches!(self.eval_every, Some(EvalEvery::Rounds(0) | EvalEvery::Nodes(0))) {
            return Err(Error::Config("evaluation cadence must be at least 1".into()));
        }
        if self.threshold.is_nan() || self.threshold < 0.0 {
            return Err(Error::Config("threshold must be nonnegative".into()));
        }
        if matches!(self.game, GameChoice::Adversary { .. }) && self.solver != SolverKind::Cfr {
            return Err(Error::Config(
                "the adversary harness runs the regret-matching learner; use --solver cfr".into(),
            ));
        }
        Ok(())
    }

    /// Where the CSV goes: `out`, else `$LAZYCFR_OUT_DIR/<game>-<solver>-s<seed>.csv`,
    /// else the same name under `./out`.
    pub fn csv_path(&self) -> PathBuf {
        if let Some(p) = &self.out {
            return p.clone();
        }
        let dir = std::env::var_os(OUT_DIR_ENV)
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("out"));
        dir.join(format!(
            "{}-{}-s{}.csv",
            self.game.name(),
            self.solver.name(),
            self.seed
        ))
    }
}

/// What the driver needs from a solver.
pub trait Solver {
    fn step(&mut self);
    fn round(&self) -> usize;
    fn touched_nodes(&self) -> u64;
    fn history(&self) -> RunHistory;
    fn average_strategy(&self) -> StrategyProfile;
    /// Infosets whose regrets were updated in the last round.
    fn updated_last_round(&self) -> usize;
}

impl Solver for CfrState<'_> {
    fn step(&mut self) {
        CfrState::step(self)
    }
    fn round(&self) -> usize {
        CfrState::round(self)
    }
    fn touched_nodes(&self) -> u64 {
        CfrState::touched_nodes(self)
    }
    fn history(&self) -> RunHistory {
        CfrState::history(self)
    }
    fn average_strategy(&self) -> StrategyProfile {
        CfrState::average_strategy(self)
    }
    fn updated_last_round(&self) -> usize {
        if self.round() == 0 {
            0
        } else {
            self.game().num_infosets()
        }
    }
}

impl Solver for MccfrState<'_> {
    fn step(&mut self) {
        MccfrState::step(self)
    }
    fn round(&self) -> usize {
        MccfrState::round(self)
    }
    fn touched_nodes(&self) -> u64 {
        MccfrState::touched_nodes(self)
    }
    fn history(&self) -> RunHistory {
        MccfrState::history(self)
    }
    fn average_strategy(&self) -> StrategyProfile {
        MccfrState::average_strategy(self)
    }
    fn updated_last_round(&self) -> usize {
        MccfrState::updated_last_round(self)
    }
}

impl Solver for LazyState<'_> {
    fn step(&mut self) {
        LazyState::step(self)
    }
    fn round(&self) -> usize {
        LazyState::round(self)
    }
    fn touched_nodes(&self) -> u64 {
        LazyState::touched_nodes(self)
    }
    fn history(&self) -> RunHistory {
        LazyState::history(self)
    }
    fn average_strategy(&self) -> StrategyProfile {
        LazyState::average_strategy(self)
    }
    fn updated_last_round(&self) -> usize {
        LazyState::updated_last_round(self)
    }
}

/// A boxed solver for `kind` on `game`.
pub fn make_solver<'g>(
    kind: SolverKind,
    game: &'g Game,
    threshold: f64,
    seed: u64,
) -> Box<dyn Solver + 'g> {
    match kind {
        SolverKind::Cfr => Box::new(CfrState::new(game, Variant::Vanilla)),
        SolverKind::CfrPlus => Box::new(CfrState::new(game, Variant::Plus)),
        SolverKind::Mccfr => Box::new(MccfrState::new(game, seed)),
        SolverKind::LazyCfr => Box::new(LazyState::new(game, Variant::Vanilla, threshold)),
        SolverKind::LazyCfrPlus => Box::new(LazyState::new(game, Variant::Plus, threshold)),
    }
}

/// Evaluates the average strategy of `solver` into a log record.
pub fn evaluate(game: &Game, solver: &dyn Solver) -> LogRecord {
    let avg = solver.average_strategy();
    let history = solver.history();
    let regret = external_regret(game, &history, &avg);
    let w = if history.weight > 0.0 { history.weight } else { 1.0 };
    LogRecord {
        round: solver.round(),
        touched_nodes: solver.touched_nodes(),
        exploitability: exploitability(game, &avg),
        avg_regret: regret.map(|r| r / w),
        updated_infosets: solver.updated_last_round() as u64,
    }
}

/// Runs `solver` for `rounds` rounds, evaluating at the cadence and after the
/// last round. Returns the log and the seconds spent evaluating.
pub fn drive(
    game: &Game,
    solver: &mut dyn Solver,
    rounds: usize,
    eval_every: EvalEvery,
) -> (ConvergenceLog, f64) {
    let mut log = ConvergenceLog::new(game.tree().scale());
    let mut eval_secs = 0.0;
    let mut next_mark = match eval_every {
        EvalEvery::Rounds(k) | EvalEvery::Nodes(k) => k,
    };
    while solver.round() < rounds {
        solver.step();
        let due = match eval_every {
            EvalEvery::Rounds(_) => solver.round() as u64 >= next_mark,
            EvalEvery::Nodes(_) => solver.touched_nodes() >= next_mark,
        };
        if due || solver.round() == rounds {
            let t = Instant::now();
            log.push(evaluate(game, solver));
            eval_secs += t.elapsed().as_secs_f64();
        }
        if due {
            let (k, now) = match eval_every {
                EvalEvery::Rounds(k) => (k, solver.round() as u64),
                EvalEvery::Nodes(k) => (k, solver.touched_nodes()),
            };
            next_mark = (now / k + 1) * k;
        }
    }
    (log, eval_secs)
}

/// Sizes of a game, for manifests.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameSizes {
    pub nodes: usize,
    pub terminals: usize,
    pub infosets: [usize; 2],
    pub depth: usize,
    /// Payoffs in the log are native payoffs divided by this.
    pub scale: f64,
}

impl GameSizes {
    pub fn of(game: &Game) -> Self {
        let tree = game.tree();
        Self {
            nodes: tree.len(),
            terminals: tree.terminal_count(),
            infosets: Player::BOTH.map(|p| game.index(p).num_owned()),
            depth: tree.depth(),
            scale: tree.scale(),
        }
    }
}

/// Everything needed to reproduce a run, written next to its CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub config: RunConfig,
    pub csv: PathBuf,
    pub game: Option<GameSizes>,
    pub xi: Option<XiReport>,
    pub eval_every: EvalEvery,
    pub records: usize,
    pub rounds_completed: usize,
    pub touched_nodes: u64,
    pub final_exploitability: Option<f64>,
    pub solver_seconds: f64,
    /// Time spent computing exploitability and regrets, excluded from the
    /// solver's touched nodes.
    pub eval_seconds: f64,
}

#[derive(Debug, Clone)]
pub enum RunLog {
    Solver(ConvergenceLog),
    LowerBound(LowerBoundCurve),
}

#[derive(Debug, Clone)]
pub struct RunOutput {
    pub log: RunLog,
    pub manifest: Manifest,
}

impl RunOutput {
    /// The solver log; `None` for adversary runs.
    pub fn convergence(&self) -> Option<&ConvergenceLog> {
        match &self.log {
            RunLog::Solver(l) => Some(l),
            RunLog::LowerBound(_) => None,
        }
    }

    pub fn csv(&self) -> String {
        match &self.log {
            RunLog::Solver(l) => l.to_csv(self.manifest.config.native_units),
            RunLog::LowerBound(c) => c.to_csv(),
        }
    }

    /// Writes the CSV and the JSON manifest, creating the directory.
    pub fn write(&self) -> Result<()> {
        let csv = &self.manifest.csv;
        let io = |p: &Path, e: std::io::Error| Error::Io {
            path: p.display().to_string(),
            reason: e.to_string(),
        };
        if let Some(dir) = csv.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir).map_err(|e| io(dir, e))?;
        }
        std::fs::write(csv, self.csv()).map_err(|e| io(csv, e))?;
        let json = csv.with_extension("json");
        let text = serde_json::to_string_pretty(&self.manifest)
            .map_err(|e| Error::Config(e.to_string()))?;
        std::fs::write(&json, text).map_err(|e| io(&json, e))
    }
}

/// Runs one configuration in memory; call [`RunOutput::write`] to persist.
pub fn run(config: &RunConfig) -> Result<RunOutput> {
    config.validate()?;
    let start = Instant::now();
    if let GameChoice::Adversary { branching, depth } = config.game {
        let mut spec = AdversarySpec::new(branching, depth);
        spec.seed = config.seed;
        spec.rounds = config.rounds;
        let every = match config.eval_every {
            Some(EvalEvery::Rounds(k)) => k as usize,
            Some(EvalEvery::Nodes(_)) => {
                return Err(Error::Config("the adversary harness evaluates by rounds".into()))
            }
            None => (config.rounds / 10).max(1),
        };
        let curve = measure_lower_bound(&spec, 1, every, RmLearner::new)?;
        let last = curve.last().copied();
        let manifest = Manifest {
            config: config.clone(),
            csv: config.csv_path(),
            game: None,
            xi: None,
            eval_every: EvalEvery::Rounds(every as u64),
            records: curve.points.len(),
            rounds_completed: config.rounds,
            touched_nodes: last.map_or(0, |p| p.touched_nodes),
            final_exploitability: None,
            solver_seconds: start.elapsed().as_secs_f64(),
            eval_seconds: 0.0,
        };
        return Ok(RunOutput {
            log: RunLog::LowerBound(curve),
            manifest,
        });
    }

    let game = config.game.build(config.seed)?;
    let eval_every = config
        .eval_every
        .unwrap_or(EvalEvery::Nodes(4 * game.tree().len().max(1) as u64));
    let mut solver = make_solver(config.solver, &game, config.threshold, config.seed);
    let (log, eval_seconds) = drive(&game, solver.as_mut(), config.rounds, eval_every);
    let manifest = Manifest {
        config: config.clone(),
        csv: config.csv_path(),
        game: Some(GameSizes::of(&game)),
        xi: Some(XiReport::new(&game)),
        eval_every,
        records: log.records.len(),
        rounds_completed: solver.round(),
        touched_nodes: solver.touched_nodes(),
        final_exploitability: log.last().map(|r| r.exploitability),
        solver_seconds: start.elapsed().as_secs_f64() - eval_seconds,
        eval_seconds,
    };
    Ok(RunOutput {
        log: RunLog::Solver(log),
        manifest,
    })
}

/// One row of a comparison: touched nodes each solver needed to first reach
/// `target`, and the baseline's count divided by each solver's.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareRow {
    pub target: f64,
    pub nodes: Vec<Option<u64>>,
    pub ratio: Vec<Option<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareReport {
    pub game: GameChoice,
    /// Solver names; the first is the baseline.
    pub solvers: Vec<String>,
    pub final_exploitability: Vec<Option<f64>>,
    pub rows: Vec<CompareRow>,
}

impl CompareReport {
    /// Builds the table from logs that share a game.
    pub fn from_logs(game: GameChoice, solvers: Vec<String>, logs: &[&ConvergenceLog], targets: &[f64]) -> Self {
        let rows = targets
            .iter()
            .map(|&target| {
                let nodes: Vec<Option<u64>> = logs.iter().map(|l| l.nodes_to_reach(target)).collect();
                let ratio = nodes
                    .iter()
                    .map(|n| match (nodes[0], n) {
                        (Some(base), Some(n)) if *n > 0 => Some(base as f64 / *n as f64),
                        _ => None,
                    })
                    .collect();
                CompareRow { target, nodes, ratio }
            })
            .collect();
        Self {
            game,
            solvers,
            final_exploitability: logs.iter().map(|l| l.last().map(|r| r.exploitability)).collect(),
            rows,
        }
    }

    /// Fixed-width text table.
    pub fn to_table(&self) -> String {
        let mut out = String::new();
        let _ = write!(out, "{:>10}", "target");
        for s in &self.solvers {
            let _ = write!(out, " {:>16} {:>8}", s, "ratio");
        }
        out.push('\n');
        for row in &self.rows {
            let _ = write!(out, "{:>10.4}", row.target);
            for (n, r) in row.nodes.iter().zip(&row.ratio) {
                let n = n.map_or("-".to_string(), |n| n.to_string());
                let r = r.map_or("-".to_string(), |r| format!("{r:.2}"));
                let _ = write!(out, " {n:>16} {r:>8}");
            }
            out.push('\n');
        }
        out
    }
}

/// Default exploitability targets: 1, 0.5, 0.2, 0.1, … down to 1e-4.
pub fn default_targets() -> Vec<f64> {
    let mut t = Vec::new();
    let mut decade = 1.0;
    while decade > 1e-4 * 0.5 {
        for k in [1.0, 0.5, 0.2] {
            t.push(decade * k);
        }
        decade /= 10.0;
    }
    t.retain(|&x| x >= 1e-4 * 0.999);
    t
}

/// Runs every configuration (in parallel) and tabulates touched nodes to
/// each target. All configurations must name the same game.
pub fn compare(configs: &[RunConfig], targets: &[f64]) -> Result<(CompareReport, Vec<RunOutput>)> {
    let first = configs
        .first()
        .ok_or_else(|| Error::Config("compare needs at least one configuration".into()))?;
    if configs.iter().any(|c| c.game != first.game) {
        return Err(Error::Config("compared configurations use different games".into()));
    }
    if matches!(first.game, GameChoice::Adversary { .. }) {
        return Err(Error::Config("the adversary harness has no exploitability to compare".into()));
    }
    let outputs: Vec<Result<RunOutput>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run(c))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("run thread panicked"))
            .collect()
    });
    let outputs = outputs.into_iter().collect::<Result<Vec<_>>>()?;
    let logs: Vec<&ConvergenceLog> = outputs.iter().filter_map(|o| o.convergence()).collect();
    let names = configs.iter().map(|c| c.solver.name().to_string()).collect();
    Ok((CompareReport::from_logs(first.game, names, &logs, targets), outputs))
}
