//! Observer counting, double-violation solving, sweeps and oracle verification.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::channels::{ChannelKind, NoisyChannel};
use crate::closedform::{gamma_sequence, required_sharpness, violation_margin, witness_closed, ScenarioClass, SharpnessEntry};
use crate::error::{Error, Result};
use crate::measurements::{Strategy, StrategyTag};
use crate::protocol::{run_protocol, Scenario};
use crate::qcore::StateFamily;

/// Bracket and iteration budget for the double-violation bisection.
pub const EPSILON_BRACKET: (f64, f64) = (1e-12, 1e4);
pub const BISECTION_ITERATIONS: usize = 200;
pub const ROOT_RESIDUAL: f64 = 1e-10;

/// The untransformed family each strategy is defined on.
pub fn base_family(tag: StrategyTag) -> StateFamily {
    match tag {
        StrategyTag::Ms1 | StrategyTag::Ms2 => StateFamily::Bell,
        StrategyTag::Ms3 | StrategyTag::Ms4 => StateFamily::Ghz,
        StrategyTag::Ms5 | StrategyTag::Ms6 => StateFamily::W,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CountResult {
    pub theta: f64,
    pub epsilon: f64,
    pub p: f64,
    pub class: ScenarioClass,
    pub count: usize,
}

/// Number of leading observers whose constructed sharpness stays within [0, 1].
pub fn count_violating_observers(class: ScenarioClass, theta: f64, epsilon: f64, p: f64, n_max: usize) -> Result<CountResult> {
    count_with_options(class, theta, epsilon, p, n_max, false)
}

/// As [`count_violating_observers`]; with `final_sharp` the observer after the
/// feasible prefix also counts if a projective measurement still violates.
pub fn count_with_options(
    class: ScenarioClass,
    theta: f64,
    epsilon: f64,
    p: f64,
    n_max: usize,
    final_sharp: bool,
) -> Result<CountResult> {
    if n_max == 0 {
        return Err(Error::param("n_max", 0.0, "must be at least 1"));
    }
    let seq = gamma_sequence(class, theta, epsilon, p, n_max)?;
    let mut gammas = seq.feasible();
    let mut count = gammas.len();
    if final_sharp && count < n_max {
        gammas.push(1.0);
        if violation_margin(class, count + 1, theta, &gammas, p)? > 0.0 {
            count += 1;
        }
    }
    Ok(CountResult { theta, epsilon, p, class, count })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DoubleViolationSolution {
    pub theta: f64,
    pub epsilon: f64,
    pub gamma1: f64,
    pub witness1: f64,
    pub witness2: f64,
}

impl DoubleViolationSolution {
    pub fn violates(&self) -> bool {
        self.witness1 > 2.0 && self.witness2 > 2.0
    }
}

/// `gamma_2(epsilon) - 1` with `gamma_1(epsilon)` substituted; `+inf` once `gamma_1 > 1`.
fn gamma2_excess(class: ScenarioClass, theta: f64, p: f64, epsilon: f64) -> Result<f64> {
    let g1 = required_sharpness(class, 1, theta, epsilon, &[], p)?;
    if g1.is_nan() || g1 > 1.0 {
        return Ok(f64::INFINITY);
    }
    Ok(required_sharpness(class, 2, theta, epsilon, &[g1.max(0.0)], p)? - 1.0)
}

/// Finds the margin epsilon for which the second observer needs exactly a sharp measurement.
pub fn solve_double_violation(class: ScenarioClass, theta: f64, p: f64) -> Result<DoubleViolationSolution> {
    let (mut lo, mut hi) = EPSILON_BRACKET;
    let f_lo = gamma2_excess(class, theta, p, lo)?;
    let f_hi = gamma2_excess(class, theta, p, hi)?;
    let no_root = |detail: String| Error::NoRoot { lo: EPSILON_BRACKET.0, hi: EPSILON_BRACKET.1, detail };
    if f_lo > 0.0 {
        return Err(no_root(format!("gamma_2 - 1 = {f_lo:e} already positive at the lower end")));
    }
    if f_hi < 0.0 {
        return Err(no_root(format!("gamma_2 - 1 = {f_hi:e} still negative at the upper end")));
    }
    for _ in 0..BISECTION_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if gamma2_excess(class, theta, p, mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let (r_lo, r_hi) = (gamma2_excess(class, theta, p, lo)?, gamma2_excess(class, theta, p, hi)?);
    let (epsilon, residual) = if r_lo.abs() <= r_hi.abs() { (lo, r_lo) } else { (hi, r_hi) };
    if residual.is_nan() || residual.abs() >= ROOT_RESIDUAL {
        return Err(no_root(format!("bisection stalled with residual {residual:e}")));
    }
    let gamma1 = required_sharpness(class, 1, theta, epsilon, &[], p)?;
    let gammas = [gamma1, 1.0];
    Ok(DoubleViolationSolution {
        theta,
        epsilon,
        gamma1,
        witness1: witness_closed(class, 1, theta, &gammas, p)?,
        witness2: witness_closed(class, 2, theta, &gammas, p)?,
    })
}

/// Closed-form witness values for observers 1..=n.
pub fn evaluate(class: ScenarioClass, theta: f64, gammas: &[f64], p: f64, n: usize) -> Result<Vec<f64>> {
    (1..=n).map(|k| witness_closed(class, k, theta, gammas, p)).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub start: f64,
    pub stop: f64,
    pub points: usize,
    #[serde(default)]
    pub log: bool,
}

impl Grid {
    pub fn new(start: f64, stop: f64, points: usize, log: bool) -> Result<Self> {
        let g = Self { start, stop, points, log };
        g.validate()?;
        Ok(g)
    }

    pub fn linear(start: f64, stop: f64, points: usize) -> Result<Self> {
        Self::new(start, stop, points, false)
    }

    pub fn log(start: f64, stop: f64, points: usize) -> Result<Self> {
        Self::new(start, stop, points, true)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.start.is_finite() || !self.stop.is_finite() {
            return Err(Error::InvalidGrid("bounds must be finite".into()));
        }
        if self.points == 0 {
            return Err(Error::InvalidGrid("at least one point is needed".into()));
        }
        if self.points == 1 && self.start != self.stop {
            return Err(Error::InvalidGrid("a single point needs start == stop".into()));
        }
        if self.log && (self.start <= 0.0 || self.stop <= 0.0) {
            return Err(Error::InvalidGrid("log grids need positive bounds".into()));
        }
        Ok(())
    }

    pub fn values(&self) -> Vec<f64> {
        let n = self.points;
        if n == 1 {
            return vec![self.start];
        }
        let (a, b) = if self.log { (self.start.ln(), self.stop.ln()) } else { (self.start, self.stop) };
        (0..n)
            .map(|i| {
                if i == 0 {
                    return self.start;
                }
                if i == n - 1 {
                    return self.stop;
                }
                let x = a + (b - a) * i as f64 / (n - 1) as f64;
                if self.log {
                    x.exp()
                } else {
                    x
                }
            })
            .collect()
    }
}

impl FromStr for Grid {
    type Err = Error;

    /// `start:stop:points[:log]`
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let bad = || Error::InvalidGrid(format!("expected start:stop:points[:log], got '{s}'"));
        if !(3..=4).contains(&parts.len()) {
            return Err(bad());
        }
        let start: f64 = parts[0].trim().parse().map_err(|_| bad())?;
        let stop: f64 = parts[1].trim().parse().map_err(|_| bad())?;
        let points: usize = parts[2].trim().parse().map_err(|_| bad())?;
        let log = match parts.get(3).map(|x| x.trim()) {
            None | Some("lin") | Some("linear") => false,
            Some("log") => true,
            Some(_) => return Err(bad()),
        };
        Grid::new(start, stop, points, log)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<SharpnessEntry> for Cell {
    fn from(e: SharpnessEntry) -> Self {
        match e {
            SharpnessEntry::Finite(g) => Cell::Real(g),
            SharpnessEntry::Infeasible => Cell::Text("infeasible".into()),
        }
    }
}

/// Column-named rows, in the order they should be written.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<String>) -> Self {
        Self { columns, rows: Vec::new() }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Appends the rows of `other`, which must have the same columns.
    pub fn extend(&mut self, other: Table) -> Result<()> {
        if self.columns.is_empty() && self.rows.is_empty() {
            *self = other;
            return Ok(());
        }
        if self.columns != other.columns {
            return Err(Error::Incompatible("tables have different columns".into()));
        }
        self.rows.extend(other.rows);
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SweepMode {
    /// Observer count per point.
    Count { n_max: usize, final_sharp: bool },
    /// The sharpness sequence itself.
    Gammas { n: usize },
    /// Witness values for fixed sharpness values.
    Witness { gammas: Vec<f64> },
    /// Solve under the sweep class, then evaluate the solution under `evaluate`.
    DoubleViolation { evaluate: ScenarioClass },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub class: ScenarioClass,
    pub p: f64,
    pub epsilons: Vec<f64>,
    pub grid: Grid,
    pub mode: SweepMode,
}

fn class_cells(class: ScenarioClass, p: f64) -> Vec<Cell> {
    vec![class.strategy.as_str().into(), class.channel.as_str().into(), p.into()]
}

fn numbered(prefix: &str, n: usize) -> impl Iterator<Item = String> + '_ {
    (1..=n).map(move |k| format!("{prefix}{k}"))
}

pub fn sweep(config: &SweepConfig) -> Result<Table> {
    config.grid.validate()?;
    let thetas = config.grid.values();
    for &t in &thetas {
        config.class.strategy.check_theta(t).map_err(|e| Error::InvalidGrid(e.to_string()))?;
    }
    let uses_epsilon = matches!(config.mode, SweepMode::Count { .. } | SweepMode::Gammas { .. });
    if uses_epsilon && config.epsilons.is_empty() {
        return Err(Error::InvalidGrid("at least one epsilon is needed".into()));
    }
    let base = ["strategy", "channel", "p"].map(String::from).to_vec();
    let class = config.class;
    let p = config.p;
    let (columns, rows): (Vec<String>, Result<Vec<Vec<Cell>>>) = match &config.mode {
        SweepMode::Count { n_max, final_sharp } => {
            let cols = [base, vec!["epsilon".into(), "theta".into(), "count".into()]].concat();
            let points: Vec<(f64, f64)> =
                config.epsilons.iter().flat_map(|&e| thetas.iter().map(move |&t| (e, t))).collect();
            let rows = points
                .par_iter()
                .map(|&(eps, theta)| {
                    let c = count_with_options(class, theta, eps, p, *n_max, *final_sharp)?;
                    Ok([class_cells(class, p), vec![eps.into(), theta.into(), c.count.into()]].concat())
                })
                .collect();
            (cols, rows)
        }
        SweepMode::Gammas { n } => {
            let cols = [base, vec!["epsilon".into(), "theta".into()], numbered("gamma_", *n).collect()].concat();
            let points: Vec<(f64, f64)> =
                config.epsilons.iter().flat_map(|&e| thetas.iter().map(move |&t| (e, t))).collect();
            let rows = points
                .par_iter()
                .map(|&(eps, theta)| {
                    let seq = gamma_sequence(class, theta, eps, p, *n)?;
                    let mut row = [class_cells(class, p), vec![eps.into(), theta.into()]].concat();
                    row.extend(seq.entries.into_iter().map(Cell::from));
                    Ok(row)
                })
                .collect();
            (cols, rows)
        }
        SweepMode::Witness { gammas } => {
            let n = gammas.len();
            let cols = [base, vec!["theta".into()], numbered("witness_", n).collect()].concat();
            let rows = thetas
                .par_iter()
                .map(|&theta| {
                    let mut row = [class_cells(class, p), vec![theta.into()]].concat();
                    row.extend(evaluate(class, theta, gammas, p, n)?.into_iter().map(Cell::from));
                    Ok(row)
                })
                .collect();
            (cols, rows)
        }
        SweepMode::DoubleViolation { evaluate: target } => {
            let target = *target;
            let cols = [
                base,
                ["theta", "epsilon", "gamma_1", "gamma_2", "witness_1", "witness_2"].map(String::from).to_vec(),
            ]
            .concat();
            let rows = thetas
                .par_iter()
                .map(|&theta| {
                    let mut row = [class_cells(target, p), vec![theta.into()]].concat();
                    match solve_double_violation(class, theta, p) {
                        Ok(sol) => {
                            let w = evaluate(target, theta, &[sol.gamma1, 1.0], p, 2)?;
                            row.extend([sol.epsilon, sol.gamma1, 1.0, w[0], w[1]].map(Cell::from));
                        }
                        Err(Error::NoRoot { .. }) => row.extend(std::iter::repeat_n(Cell::Missing, 5)),
                        Err(e) => return Err(e),
                    }
                    Ok(row)
                })
                .collect();
            (cols, rows)
        }
    };
    Ok(Table { columns, rows: rows? })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    fn new(name: String, max_deviation: f64, tolerance: f64) -> Self {
        let pass = max_deviation < tolerance;
        Self { name, max_deviation, tolerance, pass }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub seed: u64,
    pub draws: usize,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Number of sequential observers simulated per random draw.
pub const VERIFY_OBSERVERS: usize = 5;

#[derive(Debug, Clone, PartialEq)]
struct Draw {
    theta: f64,
    gammas: Vec<f64>,
    p: f64,
}

fn draw(rng: &mut ChaCha8Rng, tag: StrategyTag, channel: ChannelKind) -> Draw {
    let theta = match tag {
        StrategyTag::Ms1 | StrategyTag::Ms2 => rng.gen_range(1e-3..=FRAC_PI_4),
        StrategyTag::Ms3 | StrategyTag::Ms4 => rng.gen_range(1e-3..1.0),
        StrategyTag::Ms5 | StrategyTag::Ms6 => rng.gen_range(0.0..=FRAC_PI_2),
    };
    let gammas = (0..VERIFY_OBSERVERS).map(|_| rng.gen_range(0.0..=1.0)).collect();
    let p = match channel {
        ChannelKind::Noiseless => 1.0,
        ChannelKind::Depolarizing => rng.gen_range(0.0..=1.0),
        _ => rng.gen_range(0.5 + 1e-9..=1.0),
    };
    Draw { theta, gammas, p }
}

fn simulate(tag: StrategyTag, channel: ChannelKind, d: &Draw) -> Result<Vec<f64>> {
    let strategy = Strategy::new(tag, d.theta, d.gammas.clone())?;
    let scenario = Scenario::new(base_family(tag), strategy, NoisyChannel::new(channel, d.p)?, d.gammas.len())?;
    Ok(run_protocol(&scenario)?.values)
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// Per-class max deviation between the closed forms and direct simulation
/// over `draws` seeded random parameter sets, observers 1..=5.
pub fn verify_closed_vs_sim(classes: &[ScenarioClass], draws: usize, tolerance: f64, seed: u64) -> Result<VerificationReport> {
    if draws == 0 {
        return Err(Error::param("draws", 0.0, "at least one draw is needed"));
    }
    let checks = classes
        .par_iter()
        .map(|&class| {
            let stream = class_stream(class);
            let mut rng = rng_for(seed, stream);
            let mut worst: f64 = 0.0;
            for _ in 0..draws {
                let d = draw(&mut rng, class.strategy, class.channel);
                let sim = simulate(class.strategy, class.channel, &d)?;
                let closed = evaluate(class, d.theta, &d.gammas, d.p, VERIFY_OBSERVERS)?;
                worst = worst.max(max_abs_diff(&sim, &closed));
            }
            Ok(Check::new(format!("closed-vs-sim {class}"), worst, tolerance))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport { seed, draws, checks })
}

fn class_stream(class: ScenarioClass) -> u64 {
    let s = StrategyTag::ALL.iter().position(|&t| t == class.strategy).unwrap_or(0);
    let c = ChannelKind::ALL.iter().position(|&k| k == class.channel).unwrap_or(0);
    (s * ChannelKind::ALL.len() + c) as u64
}

/// Pairs of classes whose traces coincide for identical parameters.
pub fn equivalent_pairs() -> Vec<(ScenarioClass, ScenarioClass)> {
    use ChannelKind::*;
    use StrategyTag::*;
    let c = ScenarioClass::new;
    vec![
        (c(Ms4, PhaseFlip), c(Ms3, BitFlip)),
        (c(Ms4, BitFlip), c(Ms3, PhaseFlip)),
        (c(Ms4, Depolarizing), c(Ms3, Depolarizing)),
        (c(Ms6, BitFlip), c(Ms5, PhaseFlip)),
        (c(Ms6, PhaseFlip), c(Ms5, BitFlip)),
        (c(Ms6, Depolarizing), c(Ms5, Depolarizing)),
        (c(Ms2, BitFlip), c(Ms1, PhaseFlip)),
        (c(Ms2, PhaseFlip), c(Ms1, BitFlip)),
        (c(Ms2, Depolarizing), c(Ms1, Depolarizing)),
    ]
}

/// Direct simulations of [`equivalent_pairs`] on shared random draws.
pub fn verify_equivalences(draws: usize, tolerance: f64, seed: u64) -> Result<Vec<Check>> {
    equivalent_pairs()
        .into_par_iter()
        .enumerate()
        .map(|(i, (a, b))| {
            let mut rng = rng_for(seed, 1000 + i as u64);
            let mut worst: f64 = 0.0;
            for _ in 0..draws {
                let d = draw(&mut rng, a.strategy, a.channel);
                worst = worst.max(max_abs_diff(&simulate(a.strategy, a.channel, &d)?, &simulate(b.strategy, b.channel, &d)?));
            }
            Ok(Check::new(format!("equivalence {a} = {b}"), worst, tolerance))
        })
        .collect()
}

/// At p = 1 every channel must reproduce the noiseless simulation.
pub fn verify_p_one_collapse(draws: usize, tolerance: f64, seed: u64) -> Result<Vec<Check>> {
    StrategyTag::ALL
        .into_par_iter()
        .enumerate()
        .map(|(i, tag)| {
            let mut rng = rng_for(seed, 2000 + i as u64);
            let mut worst: f64 = 0.0;
            for _ in 0..draws {
                let d = draw(&mut rng, tag, ChannelKind::Noiseless);
                let base = simulate(tag, ChannelKind::Noiseless, &d)?;
                for ch in [ChannelKind::PhaseFlip, ChannelKind::BitFlip, ChannelKind::Depolarizing] {
                    worst = worst.max(max_abs_diff(&base, &simulate(tag, ch, &d)?));
                }
            }
            Ok(Check::new(format!("p=1 collapse {tag}"), worst, tolerance))
        })
        .collect()
}

/// Tolerance for checks that compare two simulations of the same quantity.
pub const EQUIVALENCE_TOL: f64 = 1e-12;

/// Everything `verify` runs: closed-form oracle for all classes at `tolerance`,
/// plus the structural equivalences at [`EQUIVALENCE_TOL`].
pub fn verification_suite(draws: usize, tolerance: f64, seed: u64) -> Result<VerificationReport> {
    let mut report = verify_closed_vs_sim(&ScenarioClass::all(), draws, tolerance, seed)?;
    report.checks.extend(verify_equivalences(draws, EQUIVALENCE_TOL, seed)?);
    report.checks.extend(verify_p_one_collapse(draws.min(50), EQUIVALENCE_TOL, seed)?);
    Ok(report)
}
