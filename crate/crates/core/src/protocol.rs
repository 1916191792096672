//! Direct density-matrix simulation of the sequential protocol.
//!
//! Observer 1 measures the pristine shared state. Between observers k and
//! k+1 the sequential qubit (always the last tensor factor) goes through the
//! Lüders update averaged over inputs and outcomes and then through the channel.

use serde::Serialize;

use crate::channels::{apply_channel_qubit, NoisyChannel};
use crate::error::{Error, Result};
use crate::measurements::{observable_for, sqrt_effects_for_sequential, Role, Strategy};
use crate::qcore::{apply_local_hadamards, embed_on_qubit, kron, make_state, ComplexMatrix, DensityMatrix, StateFamily};

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    family: StateFamily,
    strategy: Strategy,
    channel: NoisyChannel,
    n_observers: usize,
}

fn family_fits(family: StateFamily, strategy: &Strategy) -> bool {
    use crate::measurements::StrategyTag::*;
    matches!(
        (family, strategy.tag()),
        (StateFamily::Bell, Ms1 | Ms2)
            | (StateFamily::Ghz | StateFamily::GhzPrime, Ms3 | Ms4)
            | (StateFamily::W | StateFamily::WPrime, Ms5 | Ms6)
    )
}

impl Scenario {
    pub fn new(family: StateFamily, strategy: Strategy, channel: NoisyChannel, n_observers: usize) -> Result<Self> {
        if !family_fits(family, &strategy) {
            return Err(Error::Incompatible(format!("state {family} cannot be used with strategy {}", strategy.tag())));
        }
        if n_observers == 0 {
            return Err(Error::param("n_observers", 0.0, "at least one sequential observer is needed"));
        }
        if strategy.gammas().len() < n_observers {
            return Err(Error::Incompatible(format!(
                "{} observers requested but only {} sharpness values given",
                n_observers,
                strategy.gammas().len()
            )));
        }
        Ok(Self { family, strategy, channel, n_observers })
    }

    pub fn family(&self) -> StateFamily {
        self.family
    }

    pub fn strategy(&self) -> &Strategy {
        &self.strategy
    }

    pub fn channel(&self) -> &NoisyChannel {
        &self.channel
    }

    pub fn n_observers(&self) -> usize {
        self.n_observers
    }

    /// The state shared before observer 1, after any local unitaries.
    pub fn initial_state(&self) -> DensityMatrix {
        let base = make_state(self.family);
        if self.strategy.applies_local_unitary() {
            apply_local_hadamards(&base).expect("three-qubit family")
        } else {
            base
        }
    }
}

/// Witness values between the fixed parties and observers 1..=n.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessTrace {
    pub values: Vec<f64>,
}

impl WitnessTrace {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

fn check_arity(rho: &DensityMatrix, strategy: &Strategy) -> Result<()> {
    let want = strategy.tag().arity();
    if rho.nqubits() != want {
        return Err(Error::ArityMismatch { expected: want, got: rho.nqubits() });
    }
    Ok(())
}

pub fn luders_step(rho: &DensityMatrix, strategy: &Strategy, observer_k: usize) -> Result<DensityMatrix> {
    check_arity(rho, strategy)?;
    let n = rho.nqubits();
    let roots = sqrt_effects_for_sequential(strategy, observer_k)?;
    let mut out = ComplexMatrix::zeros(rho.dim());
    for root in roots.iter().flatten() {
        let k = embed_on_qubit(root, n - 1, n)?;
        out = &out + &rho.matrix().conjugate_by(&k);
    }
    Ok(DensityMatrix::from_trusted(out.scale(0.5)))
}

pub fn advance(rho: &DensityMatrix, scenario: &Scenario, observer_k: usize) -> Result<DensityMatrix> {
    let measured = luders_step(rho, &scenario.strategy, observer_k)?;
    apply_channel_qubit(&measured, &scenario.channel, rho.nqubits() - 1)
}

pub fn witness(rho: &DensityMatrix, scenario: &Scenario, observer_k: usize) -> Result<f64> {
    let s = &scenario.strategy;
    check_arity(rho, s)?;
    let obs = |role: Role, input: usize| observable_for(s, role, observer_k, input);
    let x = [obs(Role::Alice, 0)?, obs(Role::Alice, 1)?];
    let y = [obs(Role::Bob, 0)?, obs(Role::Bob, 1)?];
    // (signed term, input pattern) pairs
    let value = if s.tag().arity() == 2 {
        [(1.0, 0, 0), (1.0, 1, 0), (1.0, 0, 1), (-1.0, 1, 1)]
            .iter()
            .map(|&(sign, a, b)| sign * rho.expectation(&kron(&x[a], &y[b])))
            .sum()
    } else {
        let z = [obs(Role::Charlie, 0)?, obs(Role::Charlie, 1)?];
        [(1.0, 1, 0, 0), (1.0, 0, 1, 0), (1.0, 0, 0, 1), (-1.0, 1, 1, 1)]
            .iter()
            .map(|&(sign, a, b, c)| sign * rho.expectation(&kron(&kron(&x[a], &y[b]), &z[c])))
            .sum()
    };
    Ok(value)
}

pub fn run_protocol(scenario: &Scenario) -> Result<WitnessTrace> {
    let mut rho = scenario.initial_state();
    let mut values = Vec::with_capacity(scenario.n_observers);
    for k in 1..=scenario.n_observers {
        values.push(witness(&rho, scenario, k)?);
        if k < scenario.n_observers {
            rho = advance(&rho, scenario, k)?;
        }
    }
    Ok(WitnessTrace { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channels::ChannelKind;
    use crate::measurements::StrategyTag;
    use std::f64::consts::{FRAC_PI_4, SQRT_2};

    fn scenario(family: StateFamily, tag: StrategyTag, theta: f64, gammas: Vec<f64>, kind: ChannelKind, p: f64) -> Scenario {
        let n = gammas.len();
        Scenario::new(
            family,
            Strategy::new(tag, theta, gammas).unwrap(),
            NoisyChannel::new(kind, p).unwrap(),
            n,
        )
        .unwrap()
    }

    #[test]
    fn tsirelson_point() {
        let sc = scenario(StateFamily::Bell, StrategyTag::Ms1, FRAC_PI_4, vec![1.0], ChannelKind::Noiseless, 1.0);
        let v = run_protocol(&sc).unwrap().values[0];
        assert!((v - 2.0 * SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn mermin_maximum() {
        let sc = scenario(StateFamily::Ghz, StrategyTag::Ms3, 1.0, vec![1.0], ChannelKind::Noiseless, 1.0);
        let v = run_protocol(&sc).unwrap().values[0];
        assert!((v - 4.0).abs() < 1e-10);
    }

    #[test]
    fn w_state_maximum() {
        let theta = 4f64.atan() / 2.0;
        let sc = scenario(StateFamily::W, StrategyTag::Ms5, theta, vec![1.0], ChannelKind::Noiseless, 1.0);
        let v = run_protocol(&sc).unwrap().values[0];
        assert!((v - (5.0 + 17f64.sqrt()) / 3.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_measurement_leaves_state() {
        let sc = scenario(StateFamily::Bell, StrategyTag::Ms1, 0.3, vec![0.0], ChannelKind::Noiseless, 1.0);
        let rho = sc.initial_state();
        let s = Strategy::new(StrategyTag::Ms1, 0.3, vec![0.0]).unwrap();
        // input 0 is sharp, so zero sharpness on input 1 only removes half the disturbance
        let after = luders_step(&rho, &s, 1).unwrap();
        let z = embed_on_qubit(&ComplexMatrix::sigma_z(), 1, 2).unwrap();
        let want = &rho.matrix().scale(0.75) + &rho.matrix().conjugate_by(&z).scale(0.25);
        assert!(after.matrix().approx_eq(&want, 1e-14));
    }

    #[test]
    fn bell_sharp_luders_coefficients() {
        let sc = scenario(StateFamily::Bell, StrategyTag::Ms1, 0.3, vec![1.0], ChannelKind::Noiseless, 1.0);
        let rho = sc.initial_state();
        let after = luders_step(&rho, sc.strategy(), 1).unwrap();
        let z = embed_on_qubit(&ComplexMatrix::sigma_z(), 1, 2).unwrap();
        let x = embed_on_qubit(&ComplexMatrix::sigma_x(), 1, 2).unwrap();
        let want = &(&rho.matrix().scale(0.5) + &rho.matrix().conjugate_by(&z).scale(0.25))
            + &rho.matrix().conjugate_by(&x).scale(0.25);
        assert!(after.matrix().approx_eq(&want, 1e-14));
    }

    #[test]
    fn noiseless_advance_is_luders() {
        let sc = scenario(StateFamily::W, StrategyTag::Ms5, 0.4, vec![0.3, 0.7], ChannelKind::Noiseless, 1.0);
        let rho = sc.initial_state();
        let a = advance(&rho, &sc, 1).unwrap();
        let b = luders_step(&rho, sc.strategy(), 1).unwrap();
        assert!(a.matrix().approx_eq(b.matrix(), 0.0));
    }

    #[test]
    fn table_one_row() {
        let sc = scenario(StateFamily::Bell, StrategyTag::Ms1, 0.5, vec![0.3323, 1.0], ChannelKind::PhaseFlip, 0.9);
        let v = run_protocol(&sc).unwrap().values;
        assert!((v[0] - 2.0738).abs() < 1e-3 && (v[1] - 2.0888).abs() < 1e-3);
        let sc = scenario(StateFamily::Bell, StrategyTag::Ms1, 0.5, vec![0.3323, 1.0], ChannelKind::BitFlip, 0.9);
        let v = run_protocol(&sc).unwrap().values;
        assert!((v[1] - 1.844).abs() < 1e-3);
    }

    #[test]
    fn local_unitary_equivalences() {
        let g = vec![0.2, 0.5, 0.9];
        let pairs = [
            (StateFamily::Ghz, StrategyTag::Ms4, ChannelKind::PhaseFlip, StrategyTag::Ms3, ChannelKind::BitFlip, 0.6),
            (StateFamily::W, StrategyTag::Ms6, ChannelKind::BitFlip, StrategyTag::Ms5, ChannelKind::PhaseFlip, 0.7),
            (StateFamily::Bell, StrategyTag::Ms2, ChannelKind::BitFlip, StrategyTag::Ms1, ChannelKind::PhaseFlip, 0.5),
        ];
        for (family, t1, c1, t2, c2, theta) in pairs {
            let a = run_protocol(&scenario(family, t1, theta, g.clone(), c1, 0.85)).unwrap();
            let b = run_protocol(&scenario(family, t2, theta, g.clone(), c2, 0.85)).unwrap();
            for (x, y) in a.values.iter().zip(&b.values) {
                assert!((x - y).abs() < 1e-12, "{t1} vs {t2}: {x} {y}");
            }
        }
    }

    #[test]
    fn intermediate_states_stay_physical() {
        let sc = scenario(StateFamily::Ghz, StrategyTag::Ms3, 0.8, vec![0.4, 0.6, 0.8, 1.0], ChannelKind::Depolarizing, 0.7);
        let mut rho = sc.initial_state();
        for k in 1..4 {
            rho = advance(&rho, &sc, k).unwrap();
            DensityMatrix::new(rho.matrix().clone()).unwrap();
        }
    }

    #[test]
    fn scenario_validation() {
        let s = Strategy::new(StrategyTag::Ms1, 0.3, vec![0.5]).unwrap();
        let ch = NoisyChannel::noiseless();
        assert!(matches!(Scenario::new(StateFamily::Ghz, s.clone(), ch, 1), Err(Error::Incompatible(_))));
        assert!(Scenario::new(StateFamily::Bell, s.clone(), ch, 2).is_err());
        assert!(Scenario::new(StateFamily::Bell, s.clone(), ch, 0).is_err());
        let ghz = make_state(StateFamily::Ghz);
        assert!(matches!(luders_step(&ghz, &s, 1), Err(Error::ArityMismatch { .. })));
    }

    #[test]
    fn local_unitary_state() {
        let sc = scenario(StateFamily::Ghz, StrategyTag::Ms4, 0.5, vec![0.5], ChannelKind::Noiseless, 1.0);
        assert!(sc.initial_state().matrix().approx_eq(make_state(StateFamily::GhzPrime).matrix(), 1e-15));
    }
}
