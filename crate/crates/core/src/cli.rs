//! Command-line front end. [`run`] holds all logic so it can be tested without a process.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Deserialize;

use crate::analysis::{
    base_family, count_with_options, solve_double_violation, sweep, verification_suite, Cell, Grid, SweepConfig,
    SweepMode, Table,
};
use crate::channels::{ChannelKind, NoisyChannel};
use crate::closedform::{gamma_sequence, ScenarioClass, SharpnessEntry};
use crate::error::Error;
use crate::measurements::{Strategy, StrategyTag};
use crate::protocol::{run_protocol, Scenario};
use crate::qcore::StateFamily;

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_VERIFY_FAILED: i32 = 2;
pub const EXIT_INFEASIBLE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "seqshare", version, about = "Sequential nonlocality sharing through noisy channels")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate the protocol and print one witness per sequential observer.
    Simulate(Flags),
    /// Regenerate a figure or table dataset.
    Reproduce {
        name: Artifact,
        #[command(flatten)]
        flags: Flags,
    },
    /// Count the observers that can violate for given theta and epsilon.
    Count(Flags),
    /// Solve for the margin at which the second observer measures sharply.
    DoubleViolation(Flags),
    /// Compare closed forms with direct simulation on seeded random draws.
    Verify(Flags),
    /// Evaluate a quantity over a theta grid.
    Sweep(Flags),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Artifact {
    Fig2,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Table1,
    Table2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Jsonl => "jsonl",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SweepKind {
    Count,
    Gammas,
    Witness,
    DoubleViolation,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Flags {
    /// JSON file with the same keys as the flags; flags win.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub state: Option<String>,
    #[arg(long)]
    pub strategy: Option<String>,
    #[arg(long)]
    pub channel: Option<String>,
    #[arg(long = "p")]
    pub p: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    /// One value, or a comma list for sweeps.
    #[arg(long, value_delimiter = ',')]
    pub epsilon: Vec<f64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    /// start:stop:points[:log]
    #[arg(long)]
    pub grid: Option<String>,
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long)]
    pub draws: Option<usize>,
    #[arg(long, value_enum)]
    pub mode: Option<SweepKind>,
    /// Let the observer after the feasible prefix measure sharply.
    #[arg(long)]
    pub final_sharp: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
enum OneOrMany {
    One(f64),
    Many(Vec<f64>),
}

impl OneOrMany {
    fn into_vec(self) -> Vec<f64> {
        match self {
            OneOrMany::One(x) => vec![x],
            OneOrMany::Many(v) => v,
        }
    }
}

/// Config file contents; every key mirrors a flag.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
struct FileConfig {
    state: Option<String>,
    strategy: Option<String>,
    channel: Option<String>,
    p: Option<f64>,
    theta: Option<f64>,
    epsilon: Option<OneOrMany>,
    n: Option<usize>,
    gamma: Option<OneOrMany>,
    grid: Option<String>,
    format: Option<Format>,
    out: Option<PathBuf>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    draws: Option<usize>,
    mode: Option<SweepKind>,
    final_sharp: Option<bool>,
}

/// Failure of a command, carrying its exit status.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn invalid(message: impl Into<String>) -> Self {
        Self { code: EXIT_INVALID, message: message.into() }
    }

    fn infeasible(message: impl Into<String>) -> Self {
        Self { code: EXIT_INFEASIBLE, message: message.into() }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = if matches!(e, Error::NoRoot { .. }) { EXIT_INFEASIBLE } else { EXIT_INVALID };
        Self { code, message: e.to_string() }
    }
}

type CmdResult<T> = std::result::Result<T, Failure>;

/// Flags merged over the optional config file.
#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub state: Option<StateFamily>,
    pub strategy: Option<StrategyTag>,
    pub channel: ChannelKind,
    pub p: Option<f64>,
    pub theta: Option<f64>,
    pub epsilons: Vec<f64>,
    pub n: Option<usize>,
    pub gammas: Vec<f64>,
    pub grid: Option<Grid>,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub seed: u64,
    pub tolerance: f64,
    pub draws: usize,
    pub mode: SweepKind,
    pub final_sharp: bool,
}

fn field<T, E: std::fmt::Display>(name: &str, r: std::result::Result<T, E>) -> CmdResult<T> {
    r.map_err(|e| Failure::invalid(format!("field '{name}': {e}")))
}

impl ExperimentConfig {
    pub fn from_flags(flags: &Flags) -> CmdResult<Self> {
        let file = match &flags.config {
            Some(path) => {
                let text = fs::read_to_string(path)
                    .map_err(|e| Failure::invalid(format!("cannot read config {}: {e}", path.display())))?;
                serde_json::from_str::<FileConfig>(&text)
                    .map_err(|e| Failure::invalid(format!("config {}: {e}", path.display())))?
            }
            None => FileConfig::default(),
        };
        let pick_vec = |flag: &Vec<f64>, file: Option<OneOrMany>| {
            if flag.is_empty() {
                file.map(OneOrMany::into_vec).unwrap_or_default()
            } else {
                flag.clone()
            }
        };
        let state = flags.state.clone().or(file.state);
        let strategy = flags.strategy.clone().or(file.strategy);
        let channel = flags.channel.clone().or(file.channel);
        let grid = flags.grid.clone().or(file.grid);
        Ok(Self {
            state: state.map(|s| field("state", s.parse())).transpose()?,
            strategy: strategy.map(|s| field("strategy", s.parse())).transpose()?,
            channel: channel.map(|s| field("channel", s.parse())).transpose()?.unwrap_or(ChannelKind::Noiseless),
            p: flags.p.or(file.p),
            theta: flags.theta.or(file.theta),
            epsilons: pick_vec(&flags.epsilon, file.epsilon),
            n: flags.n.or(file.n),
            gammas: pick_vec(&flags.gamma, file.gamma),
            grid: grid.map(|g| field("grid", g.parse())).transpose()?,
            format: flags.format.or(file.format).unwrap_or_default(),
            out: flags.out.clone().or(file.out),
            seed: flags.seed.or(file.seed).unwrap_or(0),
            tolerance: flags.tolerance.or(file.tolerance).unwrap_or(1e-10),
            draws: flags.draws.or(file.draws).unwrap_or(200),
            mode: flags.mode.or(file.mode).unwrap_or(SweepKind::Count),
            final_sharp: flags.final_sharp || file.final_sharp.unwrap_or(false),
        })
    }

    fn strategy(&self) -> CmdResult<StrategyTag> {
        self.strategy.ok_or_else(|| Failure::invalid("--strategy is required"))
    }

    fn class(&self) -> CmdResult<ScenarioClass> {
        Ok(ScenarioClass::new(self.strategy()?, self.channel))
    }

    /// Channel strength; noiseless runs ignore it.
    fn p(&self) -> CmdResult<f64> {
        match (self.channel, self.p) {
            (ChannelKind::Noiseless, _) => Ok(1.0),
            (_, Some(p)) => Ok(p),
            _ => Err(Failure::invalid("--p is required for noisy channels")),
        }
    }

    fn theta(&self) -> CmdResult<f64> {
        self.theta.ok_or_else(|| Failure::invalid("--theta is required"))
    }

    fn single_epsilon(&self) -> CmdResult<f64> {
        match self.epsilons.as_slice() {
            [e] => Ok(*e),
            [] => Err(Failure::invalid("--epsilon is required")),
            _ => Err(Failure::invalid("this command takes a single --epsilon")),
        }
    }

    fn thetas(&self) -> CmdResult<Grid> {
        match (self.grid, self.theta) {
            (Some(g), _) => Ok(g),
            (None, Some(t)) => Ok(Grid::new(t, t, 1, false)?),
            (None, None) => Err(Failure::invalid("--theta or --grid is required")),
        }
    }
}

/// `%.12g`-style formatting: 12 significant digits, trailing zeros trimmed.
pub fn format_g12(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if !(-4..12).contains(&exp) {
        let m = trim_zeros(mantissa);
        let sign = if exp < 0 { '-' } else { '+' };
        return format!("{m}e{sign}{:02}", exp.abs());
    }
    let decimals = (11 - exp).max(0) as usize;
    trim_zeros(&format!("{x:.decimals$}")).to_string()
}

fn trim_zeros(s: &str) -> &str {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.')
    } else {
        s
    }
}

fn csv_cell(c: &Cell) -> String {
    match c {
        Cell::Int(i) => i.to_string(),
        Cell::Real(x) => format_g12(*x),
        Cell::Text(t) if t.contains([',', '"', '\n']) => format!("\"{}\"", t.replace('"', "\"\"")),
        Cell::Text(t) => t.clone(),
        Cell::Missing => String::new(),
    }
}

fn json_cell(c: &Cell) -> serde_json::Value {
    match c {
        Cell::Int(i) => (*i).into(),
        // round-trip through the 12-digit text so both formats carry the same digits
        Cell::Real(x) if x.is_finite() => {
            let v: f64 = format_g12(*x).parse().expect("formatted float parses");
            serde_json::Number::from_f64(v).map(Into::into).unwrap_or(serde_json::Value::Null)
        }
        Cell::Real(x) => format_g12(*x).into(),
        Cell::Text(t) => t.clone().into(),
        Cell::Missing => serde_json::Value::Null,
    }
}

pub fn write_table(table: &Table, format: Format, w: &mut dyn Write) -> std::io::Result<()> {
    match format {
        Format::Csv => {
            writeln!(w, "{}", table.columns.join(","))?;
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(csv_cell).collect();
                writeln!(w, "{}", cells.join(","))?;
            }
        }
        Format::Jsonl => {
            for row in &table.rows {
                let obj: serde_json::Map<String, serde_json::Value> =
                    table.columns.iter().cloned().zip(row.iter().map(json_cell)).collect();
                writeln!(w, "{}", serde_json::Value::Object(obj))?;
            }
        }
    }
    Ok(())
}

fn emit(table: &Table, cfg: &ExperimentConfig, stdout: &mut dyn Write) -> CmdResult<()> {
    let io = |e: std::io::Error| Failure::invalid(format!("write failed: {e}"));
    match &cfg.out {
        Some(path) => {
            let mut file = fs::File::create(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
            write_table(table, cfg.format, &mut file).map_err(io)
        }
        None => write_table(table, cfg.format, stdout).map_err(io),
    }
}

fn cmd_simulate(cfg: &ExperimentConfig) -> CmdResult<Table> {
    let tag = cfg.strategy()?;
    let family = cfg.state.unwrap_or_else(|| base_family(tag));
    let p = cfg.p()?;
    let theta = cfg.theta()?;
    let gammas = if !cfg.gammas.is_empty() {
        cfg.gammas.clone()
    } else {
        let n = cfg.n.unwrap_or(1);
        let eps = cfg.single_epsilon().map_err(|_| Failure::invalid("give --gamma or --epsilon"))?;
        let seq = gamma_sequence(ScenarioClass::new(tag, cfg.channel), theta, eps, p, n)?;
        if let Some(k) = seq.entries.iter().position(|e| *e == SharpnessEntry::Infeasible) {
            return Err(Failure::infeasible(format!(
                "observer {} needs a sharpness above 1 at theta = {theta}, epsilon = {eps}",
                k + 1
            )));
        }
        seq.feasible()
    };
    let n = cfg.n.unwrap_or(gammas.len());
    let strategy = Strategy::new(tag, theta, gammas.clone())?;
    let scenario = Scenario::new(family, strategy, NoisyChannel::new(cfg.channel, p)?, n)?;
    let trace = run_protocol(&scenario)?;
    let mut table = Table::new(["observer", "gamma", "witness", "margin"].map(String::from).to_vec());
    for (k, w) in trace.values.iter().enumerate() {
        table.rows.push(vec![(k + 1).into(), gammas[k].into(), (*w).into(), (*w - 2.0).into()]);
    }
    Ok(table)
}

fn count_config(cfg: &ExperimentConfig) -> CmdResult<SweepConfig> {
    if cfg.epsilons.is_empty() {
        return Err(Failure::invalid("--epsilon is required"));
    }
    Ok(SweepConfig {
        class: cfg.class()?,
        p: cfg.p()?,
        epsilons: cfg.epsilons.clone(),
        grid: cfg.thetas()?,
        mode: SweepMode::Count { n_max: cfg.n.unwrap_or(10), final_sharp: cfg.final_sharp },
    })
}

fn cmd_count(cfg: &ExperimentConfig) -> CmdResult<Table> {
    let sc = count_config(cfg)?;
    if sc.grid.points == 1 && sc.epsilons.len() == 1 {
        // surfaces domain errors directly instead of as a grid error
        count_with_options(sc.class, sc.grid.start, sc.epsilons[0], sc.p, cfg.n.unwrap_or(10), cfg.final_sharp)?;
    }
    Ok(sweep(&sc)?)
}

fn cmd_double_violation(cfg: &ExperimentConfig) -> CmdResult<Table> {
    let class = cfg.class()?;
    let p = cfg.p()?;
    let mut table = Table::new(["theta", "epsilon", "gamma_1", "witness_1", "witness_2"].map(String::from).to_vec());
    let grid = cfg.thetas()?;
    let single = grid.points == 1;
    for theta in grid.values() {
        match solve_double_violation(class, theta, p) {
            Ok(s) => table.rows.push(vec![theta.into(), s.epsilon.into(), s.gamma1.into(), s.witness1.into(), s.witness2.into()]),
            Err(Error::NoRoot { .. }) if !single => {
                table.rows.push(vec![theta.into(), Cell::Missing, Cell::Missing, Cell::Missing, Cell::Missing])
            }
            Err(e) => return Err(e.into()),
        }
    }
    Ok(table)
}

fn cmd_sweep(cfg: &ExperimentConfig) -> CmdResult<Table> {
    let grid = cfg.grid.ok_or_else(|| Failure::invalid("--grid is required"))?;
    let class = cfg.class()?;
    let mode = match cfg.mode {
        SweepKind::Count => SweepMode::Count { n_max: cfg.n.unwrap_or(10), final_sharp: cfg.final_sharp },
        SweepKind::Gammas => SweepMode::Gammas { n: cfg.n.unwrap_or(5) },
        SweepKind::Witness => {
            if cfg.gammas.is_empty() {
                return Err(Failure::invalid("witness sweeps need --gamma"));
            }
            SweepMode::Witness { gammas: cfg.gammas.clone() }
        }
        SweepKind::DoubleViolation => SweepMode::DoubleViolation { evaluate: class },
    };
    if matches!(mode, SweepMode::Count { .. } | SweepMode::Gammas { .. }) && cfg.epsilons.is_empty() {
        return Err(Failure::invalid("--epsilon is required"));
    }
    Ok(sweep(&SweepConfig { class, p: cfg.p()?, epsilons: cfg.epsilons.clone(), grid, mode })?)
}

fn cmd_verify(cfg: &ExperimentConfig, stderr: &mut dyn Write) -> CmdResult<(Table, bool)> {
    let report = verification_suite(cfg.draws, cfg.tolerance, cfg.seed)?;
    let mut table = Table::new(["check", "max_deviation", "tolerance", "pass", "seed", "draws"].map(String::from).to_vec());
    for c in &report.checks {
        table.rows.push(vec![
            c.name.as_str().into(),
            c.max_deviation.into(),
            c.tolerance.into(),
            if c.pass { "pass" } else { "fail" }.into(),
            Cell::Int(report.seed as i64),
            report.draws.into(),
        ]);
    }
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    let _ = writeln!(stderr, "seed {}: {} checks, {} failed", report.seed, report.checks.len(), failed);
    Ok((table, report.pass()))
}

pub const BELL_TABLE_THETAS: [f64; 14] = [0.01, 0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65];
pub const GHZ_TABLE_THETAS: [f64; 12] = [0.8, 0.82, 0.84, 0.86, 0.88, 0.9, 0.92, 0.94, 0.96, 0.98, 0.995, 0.999];

/// Margins shown in the observer-count figures.
pub const COUNT_EPSILONS: [f64; 3] = [0.1, 1.0, 2.0];
/// Length of the observer chain in the count figures.
pub const FIGURE_OBSERVERS: usize = 5;

fn table_rows(class: ScenarioClass, p: f64, thetas: &[f64]) -> crate::error::Result<Table> {
    let mut t = Table::new(["theta", "epsilon", "gamma_1", "witness_1", "witness_2"].map(String::from).to_vec());
    for &theta in thetas {
        let s = solve_double_violation(class, theta, p)?;
        t.rows.push(vec![theta.into(), s.epsilon.into(), s.gamma1.into(), s.witness1.into(), s.witness2.into()]);
    }
    Ok(t)
}

fn count_figure(strategies: [StrategyTag; 2], p: f64, grid: Grid) -> crate::error::Result<Table> {
    let mut out = Table::default();
    for tag in strategies {
        for channel in ChannelKind::ALL {
            out.extend(sweep(&SweepConfig {
                class: ScenarioClass::new(tag, channel),
                p,
                epsilons: COUNT_EPSILONS.to_vec(),
                grid,
                mode: SweepMode::Count { n_max: FIGURE_OBSERVERS, final_sharp: false },
            })?)?;
        }
    }
    Ok(out)
}

fn panels(solve: ScenarioClass, targets: [ScenarioClass; 4], p: f64, grid: Grid, stem: &str) -> crate::error::Result<Vec<(String, Table)>> {
    targets
        .iter()
        .zip(['a', 'b', 'c', 'd'])
        .map(|(&target, letter)| {
            let t = sweep(&SweepConfig {
                class: solve,
                p,
                epsilons: vec![],
                grid,
                mode: SweepMode::DoubleViolation { evaluate: target },
            })?;
            Ok((format!("{stem}{letter}_{}_{}", target.strategy, target.channel), t))
        })
        .collect()
}

/// Named datasets: `(file stem, table)` pairs.
pub fn reproduce(name: Artifact) -> crate::error::Result<Vec<(String, Table)>> {
    use ChannelKind::*;
    use StrategyTag::*;
    let c = ScenarioClass::new;
    Ok(match name {
        Artifact::Table1 => vec![("table1".into(), table_rows(c(Ms1, PhaseFlip), 0.9, &BELL_TABLE_THETAS)?)],
        Artifact::Table2 => vec![("table2".into(), table_rows(c(Ms3, BitFlip), 0.8, &GHZ_TABLE_THETAS)?)],
        Artifact::Fig2 => vec![("fig2".into(), count_figure([Ms1, Ms2], 0.95, Grid::log(1e-7, 0.785, 600)?)?)],
        Artifact::Fig4 => vec![("fig4".into(), count_figure([Ms3, Ms4], 0.85, Grid::linear(0.00025, 0.99975, 3999)?)?)],
        Artifact::Fig5 => vec![("fig5".into(), count_figure([Ms5, Ms6], 0.9, Grid::log(1e-7, 0.785, 600)?)?)],
        Artifact::Fig6 => panels(
            c(Ms1, PhaseFlip),
            [c(Ms1, PhaseFlip), c(Ms1, BitFlip), c(Ms1, Depolarizing), c(Ms2, BitFlip)],
            0.9,
            Grid::linear(0.01, 0.65, 129)?,
            "fig6",
        )?,
        Artifact::Fig7 => panels(
            c(Ms3, BitFlip),
            [c(Ms3, BitFlip), c(Ms3, PhaseFlip), c(Ms3, Depolarizing), c(Ms4, PhaseFlip)],
            0.8,
            Grid::linear(0.8, 0.999, 200)?,
            "fig7",
        )?,
    })
}

fn cmd_reproduce(name: Artifact, cfg: &ExperimentConfig, stdout: &mut dyn Write) -> CmdResult<()> {
    let outputs = reproduce(name)?;
    match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::invalid(format!("{}: {e}", dir.display())))?;
            for (stem, table) in &outputs {
                let path = dir.join(format!("{stem}.{}", cfg.format.extension()));
                write_file(&path, table, cfg.format)?;
            }
            Ok(())
        }
        None if outputs.len() == 1 => {
            write_table(&outputs[0].1, cfg.format, stdout).map_err(|e| Failure::invalid(format!("write failed: {e}")))
        }
        None => Err(Failure::invalid("this dataset has several panels; pass --out <directory>")),
    }
}

fn write_file(path: &Path, table: &Table, format: Format) -> CmdResult<()> {
    let mut file = fs::File::create(path).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))?;
    write_table(table, format, &mut file).map_err(|e| Failure::invalid(format!("{}: {e}", path.display())))
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, S>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let rendered = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{rendered}");
            } else {
                let _ = write!(stdout, "{rendered}");
            }
            return code;
        }
    };
    match execute(cli.command, stdout, stderr) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(stderr, "error: {}", f.message);
            f.code
        }
    }
}

fn execute(command: Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CmdResult<i32> {
    match command {
        Command::Simulate(flags) => {
            let cfg = ExperimentConfig::from_flags(&flags)?;
            emit(&cmd_simulate(&cfg)?, &cfg, stdout)?;
        }
        Command::Count(flags) => {
            let cfg = ExperimentConfig::from_flags(&flags)?;
            emit(&cmd_count(&cfg)?, &cfg, stdout)?;
        }
        Command::DoubleViolation(flags) => {
            let cfg = ExperimentConfig::from_flags(&flags)?;
            emit(&cmd_double_violation(&cfg)?, &cfg, stdout)?;
        }
        Command::Sweep(flags) => {
            let cfg = ExperimentConfig::from_flags(&flags)?;
            emit(&cmd_sweep(&cfg)?, &cfg, stdout)?;
        }
        Command::Verify(flags) => {
            let cfg = ExperimentConfig::from_flags(&flags)?;
            let (table, pass) = cmd_verify(&cfg, stderr)?;
            emit(&table, &cfg, stdout)?;
            if !pass {
                return Ok(EXIT_VERIFY_FAILED);
            }
        }
        Command::Reproduce { name, flags } => {
            let cfg = ExperimentConfig::from_flags(&flags)?;
            cmd_reproduce(name, &cfg, stdout)?;
        }
    }
    Ok(EXIT_OK)
}
