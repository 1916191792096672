//! Closed-form witness values and sharpness recursions.
//!
//! Every witness has the shape `2^(2-k) [a_k gamma_k S(theta) + b_k C(theta) P_k]`
//! where `P_k = prod_{j<k} (1 + sqrt(1 - gamma_j^2))` and `a_k`, `b_k` are powers
//! of the channel contraction seen by the sequential observer's two axes.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::channels::ChannelKind;
use crate::error::{Error, Result};
use crate::measurements::{check_gamma, StrategyTag};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ScenarioClass {
    pub strategy: StrategyTag,
    pub channel: ChannelKind,
}

impl ScenarioClass {
    pub fn new(strategy: StrategyTag, channel: ChannelKind) -> Self {
        Self { strategy, channel }
    }

    /// All 24 strategy/channel pairs.
    pub fn all() -> Vec<ScenarioClass> {
        StrategyTag::ALL
            .iter()
            .flat_map(|&s| ChannelKind::ALL.iter().map(move |&c| ScenarioClass::new(s, c)))
            .collect()
    }

    /// The channel under which this strategy keeps unbounded sharing.
    pub fn immune_channel(strategy: StrategyTag) -> ChannelKind {
        match strategy {
            StrategyTag::Ms1 | StrategyTag::Ms4 | StrategyTag::Ms5 => ChannelKind::PhaseFlip,
            StrategyTag::Ms2 | StrategyTag::Ms3 | StrategyTag::Ms6 => ChannelKind::BitFlip,
        }
    }

    pub fn is_immune(&self) -> bool {
        self.channel == ChannelKind::Noiseless || self.channel == Self::immune_channel(self.strategy)
    }

    /// Same strategy with phase-flip and bit-flip exchanged.
    pub fn swapped(&self) -> ScenarioClass {
        let channel = match self.channel {
            ChannelKind::PhaseFlip => ChannelKind::BitFlip,
            ChannelKind::BitFlip => ChannelKind::PhaseFlip,
            other => other,
        };
        ScenarioClass::new(self.strategy, channel)
    }

    /// Per-observer contraction of the `gamma_k` term and of the `P_k` term,
    /// as `(factor, ln factor)` pairs.
    fn contraction_pairs(&self, p: f64) -> ((f64, f64), (f64, f64)) {
        let (sharp_axis, unsharp_axis) = sequential_axes(self.strategy);
        (axis_contraction(self.channel, unsharp_axis, p), axis_contraction(self.channel, sharp_axis, p))
    }

    fn contractions(&self, p: f64) -> (f64, f64) {
        let (a, b) = self.contraction_pairs(p);
        (a.0, b.0)
    }

    fn check_p(&self, p: f64) -> Result<()> {
        match self.channel {
            ChannelKind::Noiseless => Ok(()),
            ChannelKind::Depolarizing if (0.0..=1.0).contains(&p) => Ok(()),
            ChannelKind::PhaseFlip | ChannelKind::BitFlip if p > 0.5 && p <= 1.0 => Ok(()),
            ChannelKind::Depolarizing => Err(Error::param("p", p, "depolarizing strength must lie in [0, 1]")),
            _ => Err(Error::param("p", p, "closed forms for flip channels need 1/2 < p <= 1")),
        }
    }

    fn check(&self, theta: f64, p: f64) -> Result<()> {
        self.strategy.check_theta(theta)?;
        self.check_p(p)
    }
}

impl fmt::Display for ScenarioClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.strategy, self.channel)
    }
}

impl FromStr for ScenarioClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once('/')
            .ok_or_else(|| Error::Unknown { kind: "scenario class", value: s.to_string() })?;
        Ok(ScenarioClass::new(a.parse()?, b.parse()?))
    }
}

/// `(S(theta), C(theta))` for the witness of this strategy family.
fn shape(strategy: StrategyTag, theta: f64) -> (f64, f64) {
    let (s, c) = theta.sin_cos();
    match strategy {
        StrategyTag::Ms1 | StrategyTag::Ms2 => (s, c),
        StrategyTag::Ms3 | StrategyTag::Ms4 => (theta, theta),
        StrategyTag::Ms5 | StrategyTag::Ms6 => (4.0 * s * c / 3.0, c * c + 2.0 * s * s / 3.0),
    }
}

/// `ln C(theta)`, accurate when C is close to 1.
fn ln_shape_c(strategy: StrategyTag, theta: f64) -> f64 {
    match strategy {
        StrategyTag::Ms1 | StrategyTag::Ms2 => {
            let h = (0.5 * theta).sin();
            (-2.0 * h * h).ln_1p()
        }
        StrategyTag::Ms3 | StrategyTag::Ms4 => theta.ln(),
        StrategyTag::Ms5 | StrategyTag::Ms6 => {
            let s = theta.sin();
            (-s * s / 3.0).ln_1p()
        }
    }
}

#[derive(Clone, Copy, PartialEq)]
enum Axis {
    X,
    Y,
    Z,
}

/// Bloch axes of the sequential observer's sharp input and unsharp input.
fn sequential_axes(strategy: StrategyTag) -> (Axis, Axis) {
    match strategy {
        StrategyTag::Ms1 | StrategyTag::Ms5 => (Axis::Z, Axis::X),
        StrategyTag::Ms2 | StrategyTag::Ms6 => (Axis::X, Axis::Z),
        StrategyTag::Ms3 => (Axis::X, Axis::Y),
        StrategyTag::Ms4 => (Axis::Z, Axis::Y),
    }
}

/// How much one use of the channel shrinks a Bloch component, with its log.
fn axis_contraction(channel: ChannelKind, axis: Axis, p: f64) -> (f64, f64) {
    let flip = || (2.0 * p - 1.0, (-2.0 * (1.0 - p)).ln_1p());
    match (channel, axis) {
        (ChannelKind::Noiseless, _) | (ChannelKind::PhaseFlip, Axis::Z) | (ChannelKind::BitFlip, Axis::X) => (1.0, 0.0),
        (ChannelKind::PhaseFlip | ChannelKind::BitFlip, _) => flip(),
        (ChannelKind::Depolarizing, _) => (p, p.ln()),
    }
}

/// `ln((1 + sqrt(1 - g^2)) / 2)`
fn ln_half_step(g: f64) -> f64 {
    let r = (1.0 - g * g).max(0.0).sqrt();
    (-0.5 * g * g / (1.0 + r)).ln_1p()
}

/// `P_k = prod_{j<k} (1 + sqrt(1 - gamma_j^2))`
pub fn p_product(gammas: &[f64], k: usize) -> f64 {
    gammas[..k - 1].iter().map(|g| 1.0 + (1.0 - g * g).max(0.0).sqrt()).product()
}

/// `Q(theta) = cos^2 theta + 2 sin^2 theta / 3`
pub fn w_q(theta: f64) -> f64 {
    shape(StrategyTag::Ms5, theta).1
}

fn check_gammas(gammas: &[f64], k: usize) -> Result<()> {
    if k == 0 {
        return Err(Error::param("k", 0.0, "observers are numbered from 1"));
    }
    if gammas.len() < k {
        return Err(Error::param("k", k as f64, format!("only {} sharpness values given", gammas.len())));
    }
    gammas[..k].iter().try_for_each(|&g| check_gamma(g))
}

fn general(class: ScenarioClass, k: usize, theta: f64, gammas: &[f64], p: f64) -> Result<f64> {
    class.check(theta, p)?;
    check_gammas(gammas, k)?;
    let (s, c) = shape(class.strategy, theta);
    let (a, b) = class.contractions(p);
    let e = (k - 1) as i32;
    Ok(2f64.powi(2 - k as i32) * (a.powi(e) * gammas[k - 1] * s + b.powi(e) * c * p_product(gammas, k)))
}

/// CHSH value between Alice and Bob_k.
///
/// MS1 under phase flip (and MS2 under bit flip) contract only the sharpness term:
/// `2^(2-k) [gamma_k sin(theta) (2p-1)^(k-1) + cos(theta) P_k]`.
/// The swapped channel contracts the `P_k` term instead, depolarizing contracts both by `p^(k-1)`.
pub fn chsh_closed(class: ScenarioClass, k: usize, theta: f64, gammas: &[f64], p: f64) -> Result<f64> {
    if class.strategy.arity() != 2 {
        return Err(Error::Incompatible(format!("{} is not a CHSH strategy", class.strategy)));
    }
    general(class, k, theta, gammas, p)
}

/// Mermin value for the GHZ strategies:
/// `2^(2-k) theta [gamma_k a^(k-1) + b^(k-1) P_k]`.
pub fn mermin_ghz_closed(class: ScenarioClass, k: usize, theta: f64, gammas: &[f64], p: f64) -> Result<f64> {
    if !matches!(class.strategy, StrategyTag::Ms3 | StrategyTag::Ms4) {
        return Err(Error::Incompatible(format!("{} is not a GHZ strategy", class.strategy)));
    }
    general(class, k, theta, gammas, p)
}

/// Mermin value for the W strategies:
/// `2^(2-k) [gamma_k a^(k-1) 4 sin(theta) cos(theta)/3 + b^(k-1) Q(theta) P_k]`.
pub fn mermin_w_closed(class: ScenarioClass, k: usize, theta: f64, gammas: &[f64], p: f64) -> Result<f64> {
    if !matches!(class.strategy, StrategyTag::Ms5 | StrategyTag::Ms6) {
        return Err(Error::Incompatible(format!("{} is not a W strategy", class.strategy)));
    }
    general(class, k, theta, gammas, p)
}

/// Dispatches to the witness formula matching the class.
pub fn witness_closed(class: ScenarioClass, k: usize, theta: f64, gammas: &[f64], p: f64) -> Result<f64> {
    match class.strategy {
        StrategyTag::Ms1 | StrategyTag::Ms2 => chsh_closed(class, k, theta, gammas, p),
        StrategyTag::Ms3 | StrategyTag::Ms4 => mermin_ghz_closed(class, k, theta, gammas, p),
        StrategyTag::Ms5 | StrategyTag::Ms6 => mermin_w_closed(class, k, theta, gammas, p),
    }
}

/// `ln(b^(k-1) C(theta) P_k / 2^(k-1))`, the log of half the non-sharpness term.
fn ln_memory_term(class: ScenarioClass, k: usize, theta: f64, gammas: &[f64], p: f64) -> f64 {
    let (_, (_, ln_b)) = class.contraction_pairs(p);
    let ln_pi: f64 = gammas[..k - 1].iter().map(|&g| ln_half_step(g)).sum();
    ln_shape_c(class.strategy, theta) + (k - 1) as f64 * ln_b + ln_pi
}

/// `witness - 2`, computed without cancellation for small theta.
pub fn violation_margin(class: ScenarioClass, k: usize, theta: f64, gammas: &[f64], p: f64) -> Result<f64> {
    class.check(theta, p)?;
    check_gammas(gammas, k)?;
    let (s, _) = shape(class.strategy, theta);
    let (a, _) = class.contractions(p);
    let sharp = 2f64.powi(2 - k as i32) * a.powi((k - 1) as i32) * s * gammas[k - 1];
    let deficit = -2.0 * ln_memory_term(class, k, theta, gammas, p).exp_m1();
    Ok(sharp - deficit)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "value")]
pub enum SharpnessEntry {
    Finite(f64),
    /// No sharpness in [0, 1] reaches the required margin.
    Infeasible,
}

impl SharpnessEntry {
    pub fn finite(self) -> Option<f64> {
        match self {
            SharpnessEntry::Finite(g) => Some(g),
            SharpnessEntry::Infeasible => None,
        }
    }

    pub fn is_finite(self) -> bool {
        matches!(self, SharpnessEntry::Finite(_))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SharpnessSequence {
    pub theta: f64,
    pub epsilon: f64,
    pub p: f64,
    pub entries: Vec<SharpnessEntry>,
}

impl SharpnessSequence {
    /// Leading finite entries.
    pub fn feasible(&self) -> Vec<f64> {
        self.entries.iter().map_while(|e| e.finite()).collect()
    }

    pub fn feasible_len(&self) -> usize {
        self.entries.iter().take_while(|e| e.is_finite()).count()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if epsilon > 0.0 && epsilon.is_finite() {
        Ok(())
    } else {
        Err(Error::param("epsilon", epsilon, "margin must be positive"))
    }
}

/// Sharpness that puts observer k exactly `(1+epsilon)` times past the bound,
/// given the earlier sharpness values. May exceed 1 or be infinite.
pub fn required_sharpness(class: ScenarioClass, k: usize, theta: f64, epsilon: f64, gammas: &[f64], p: f64) -> Result<f64> {
    class.check(theta, p)?;
    if k == 0 || gammas.len() < k - 1 {
        return Err(Error::param("k", k as f64, format!("needs {} earlier sharpness values", k.saturating_sub(1))));
    }
    gammas[..k - 1].iter().try_for_each(|&g| check_gamma(g))?;
    let (s, _) = shape(class.strategy, theta);
    let (a, _) = class.contractions(p);
    let sharp_coeff = 2f64.powi(2 - k as i32) * a.powi((k - 1) as i32) * s;
    if sharp_coeff.is_nan() || sharp_coeff <= 0.0 {
        return Ok(f64::INFINITY);
    }
    let deficit = -2.0 * ln_memory_term(class, k, theta, gammas, p).exp_m1();
    Ok((1.0 + epsilon) * deficit / sharp_coeff)
}

fn next_gamma(class: ScenarioClass, k: usize, theta: f64, epsilon: f64, gammas: &[f64], p: f64) -> SharpnessEntry {
    match required_sharpness(class, k, theta, epsilon, gammas, p) {
        Ok(g) if g.is_finite() && g <= 1.0 => SharpnessEntry::Finite(g.max(0.0)),
        _ => SharpnessEntry::Infeasible,
    }
}

/// `gamma_k = (1+epsilon)(2 - b^(k-1) C P_k 2^(2-k)) / (2^(2-k) a^(k-1) S)`, Infeasible once above 1.
///
/// For MS1 this starts at `(1+epsilon)(1 - cos theta)/sin theta`, for MS3/MS4 at
/// `(1+epsilon)(1/theta - 1)` and for MS5/MS6 at `(1+epsilon) tan(theta)/4`.
pub fn gamma_sequence(class: ScenarioClass, theta: f64, epsilon: f64, p: f64, n: usize) -> Result<SharpnessSequence> {
    class.check(theta, p)?;
    check_epsilon(epsilon)?;
    let mut finite = Vec::with_capacity(n);
    let mut entries = Vec::with_capacity(n);
    for k in 1..=n {
        let e = if finite.len() == k - 1 {
            next_gamma(class, k, theta, epsilon, &finite, p)
        } else {
            SharpnessEntry::Infeasible
        };
        if let SharpnessEntry::Finite(g) = e {
            finite.push(g);
        }
        entries.push(e);
    }
    Ok(SharpnessSequence { theta, epsilon, p, entries })
}

/// Upper-bound sequence for MS1 under phase flip:
/// `q_k = (1+epsilon) 2^k [1 - (1 - theta^2/2) prod_{j<k} (1 - q_j^2/2)] / (theta (2p-1)^(k-1))`.
pub fn q_sequence(theta: f64, epsilon: f64, p: f64, n: usize) -> Result<Vec<SharpnessEntry>> {
    StrategyTag::Ms1.check_theta(theta)?;
    check_epsilon(epsilon)?;
    if !(p > 0.5 && p <= 1.0) {
        return Err(Error::param("p", p, "the bound sequence needs 1/2 < p <= 1"));
    }
    let mut out = Vec::with_capacity(n);
    // ln of (1 - theta^2/2) prod (1 - q_j^2/2), so that 1 - prod keeps its digits
    let mut ln_prod = (-theta * theta / 2.0).ln_1p();
    let mut live = true;
    for k in 1..=n {
        if !live {
            out.push(SharpnessEntry::Infeasible);
            continue;
        }
        let deficit = -ln_prod.exp_m1();
        let q = (1.0 + epsilon) * 2f64.powi(k as i32) * deficit / (theta * (2.0 * p - 1.0).powi(k as i32 - 1));
        if q <= 1.0 {
            ln_prod += (-q * q / 2.0).ln_1p();
            out.push(SharpnessEntry::Finite(q));
        } else {
            live = false;
            out.push(SharpnessEntry::Infeasible);
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn class(s: StrategyTag, c: ChannelKind) -> ScenarioClass {
        ScenarioClass::new(s, c)
    }

    #[test]
    fn chsh_first_observer() {
        for ch in ChannelKind::ALL {
            let v = chsh_closed(class(StrategyTag::Ms1, ch), 1, 0.4, &[0.3], 0.8).unwrap();
            assert!((v - 2.0 * (0.3 * 0.4f64.sin() + 0.4f64.cos())).abs() < 1e-15);
        }
    }

    #[test]
    fn chsh_second_observer_phase_flip() {
        let (t, g1, g2, p) = (0.5f64, 0.3323, 1.0, 0.9);
        let v = chsh_closed(class(StrategyTag::Ms1, ChannelKind::PhaseFlip), 2, t, &[g1, g2], p).unwrap();
        let want = g2 * t.sin() * (2.0 * p - 1.0) + t.cos() * (1.0 + (1.0 - g1 * g1).sqrt());
        assert!((v - want).abs() < 1e-15);
    }

    #[test]
    fn ghz_values() {
        let c = class(StrategyTag::Ms3, ChannelKind::BitFlip);
        assert!((mermin_ghz_closed(c, 1, 0.7, &[0.2], 0.8).unwrap() - 2.0 * 0.7 * 1.2).abs() < 1e-15);
        let (g1, g2) = (0.4f64, 0.9);
        let want = 2.0 * 0.7 * (0.3 * g2 + 0.5 * (1.0 + (1.0 - g1 * g1).sqrt()));
        assert!((mermin_ghz_closed(c, 2, 0.7, &[g1, g2], 0.8).unwrap() - want).abs() < 1e-15);
        let top = mermin_ghz_closed(class(StrategyTag::Ms3, ChannelKind::Noiseless), 1, 1.0 - 1e-16, &[1.0], 1.0).unwrap();
        assert!((top - 4.0).abs() < 1e-10);
    }

    #[test]
    fn w_values() {
        let c = class(StrategyTag::Ms5, ChannelKind::PhaseFlip);
        let t = 0.6f64;
        let (s, co) = t.sin_cos();
        let want = 2.0 * (co * co + 2.0 * s * s / 3.0) + 2.0 * 0.5 * 4.0 * s * co / 3.0;
        assert!((mermin_w_closed(c, 1, t, &[0.5], 0.9).unwrap() - want).abs() < 1e-15);
        assert!((mermin_w_closed(c, 1, 0.0, &[1.0], 0.9).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn wrong_family_rejected() {
        let c = class(StrategyTag::Ms3, ChannelKind::BitFlip);
        assert!(chsh_closed(c, 1, 0.5, &[0.5], 0.9).is_err());
        assert!(mermin_w_closed(c, 1, 0.5, &[0.5], 0.9).is_err());
        let c = class(StrategyTag::Ms1, ChannelKind::BitFlip);
        assert!(chsh_closed(c, 1, 0.5, &[0.5], 0.5).is_err());
        assert!(chsh_closed(c, 2, 0.5, &[0.5], 0.9).is_err());
        assert!(chsh_closed(c, 0, 0.5, &[0.5], 0.9).is_err());
    }

    #[test]
    fn p_one_collapses_channels() {
        let g = [0.3, 0.6, 0.9];
        for s in StrategyTag::ALL {
            let theta = if s.theta_is_angle() { 0.3 } else { 0.9 };
            let base = witness_closed(class(s, ChannelKind::Noiseless), 3, theta, &g, 1.0).unwrap();
            for ch in ChannelKind::ALL {
                let v = witness_closed(class(s, ch), 3, theta, &g, 1.0).unwrap();
                assert!((v - base).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn first_gamma_branches() {
        let eps = 0.1;
        let seq = gamma_sequence(class(StrategyTag::Ms1, ChannelKind::PhaseFlip), 0.01, eps, 0.95, 1).unwrap();
        // (1 - cos t)/sin t = tan(t/2)
        let want = 1.1 * 0.005f64.tan();
        assert!((seq.entries[0].finite().unwrap() - want).abs() < 1e-16);
        assert!((want - 0.00550005).abs() < 1e-8);
        let seq = gamma_sequence(class(StrategyTag::Ms3, ChannelKind::BitFlip), 0.9, eps, 0.8, 1).unwrap();
        assert!((seq.entries[0].finite().unwrap() - 1.1 * (1.0 / 0.9 - 1.0)).abs() < 1e-14);
        let seq = gamma_sequence(class(StrategyTag::Ms5, ChannelKind::PhaseFlip), 0.3, eps, 0.9, 1).unwrap();
        assert!((seq.entries[0].finite().unwrap() - 1.1 * 0.3f64.tan() / 4.0).abs() < 1e-14);
    }

    #[test]
    fn second_gamma_ghz() {
        let (t, eps) = (0.9f64, 1.3385);
        let seq = gamma_sequence(class(StrategyTag::Ms3, ChannelKind::BitFlip), t, eps, 0.8, 2).unwrap();
        let g1 = seq.entries[0].finite().unwrap();
        let want = (1.0 + eps) / 0.3 * (1.0 / t - 0.5 * (1.0 + (1.0 - g1 * g1).sqrt()));
        assert!((seq.entries[1].finite().unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn constructed_sequences_violate() {
        for c in ScenarioClass::all() {
            let theta = match c.strategy {
                StrategyTag::Ms3 | StrategyTag::Ms4 => 0.999,
                _ => 0.01,
            };
            let seq = gamma_sequence(c, theta, 0.1, 0.9, 6).unwrap();
            let g = seq.feasible();
            assert!(!g.is_empty(), "{c}");
            for k in 1..=g.len() {
                assert!(violation_margin(c, k, theta, &g, 0.9).unwrap() > 0.0, "{c} k={k}");
                assert!(witness_closed(c, k, theta, &g, 0.9).unwrap() > 2.0, "{c} k={k}");
            }
        }
    }

    #[test]
    fn margin_matches_direct_difference() {
        let c = class(StrategyTag::Ms2, ChannelKind::Depolarizing);
        let g = [0.2, 0.5, 0.7];
        let m = violation_margin(c, 3, 0.6, &g, 0.9).unwrap();
        let w = chsh_closed(c, 3, 0.6, &g, 0.9).unwrap();
        assert!((m - (w - 2.0)).abs() < 1e-14);
    }

    #[test]
    fn q_bounds_gamma() {
        let (theta, eps, p) = (0.002, 0.1, 0.95);
        let q = q_sequence(theta, eps, p, 6).unwrap();
        assert!((q[0].finite().unwrap() - 1.1 * theta).abs() < 1e-15);
        let g = gamma_sequence(class(StrategyTag::Ms1, ChannelKind::PhaseFlip), theta, eps, p, 6).unwrap();
        let mut prev = 0.0;
        for (qk, gk) in q.iter().zip(&g.entries) {
            if let (Some(qv), Some(gv)) = (qk.finite(), gk.finite()) {
                assert!(qv >= gv);
                assert!(qv > prev);
                prev = qv;
            }
        }
    }

    #[test]
    fn class_names() {
        let c: ScenarioClass = "ms4/phase-flip".parse().unwrap();
        assert_eq!(c, class(StrategyTag::Ms4, ChannelKind::PhaseFlip));
        assert_eq!(c.to_string(), "ms4/phase-flip");
        assert!(c.is_immune());
        assert!(!c.swapped().is_immune());
    }
}
