//! Sequential sharing of Bell-CHSH and Mermin nonlocality through noisy qubit channels.
//!
//! The crate offers two independent routes to every witness value: direct
//! density-matrix evolution ([`protocol`]) and closed-form expressions
//! ([`closedform`]). [`analysis`] builds observer counts, double-violation
//! solutions and sweeps on top of them.
//!
//! ```
//! use seqshare::analysis::solve_double_violation;
//! use seqshare::closedform::gamma_sequence;
//! use seqshare::{run_protocol, ChannelKind, NoisyChannel, Scenario, ScenarioClass, StateFamily, Strategy, StrategyTag};
//!
//! let class = ScenarioClass::new(StrategyTag::Ms1, ChannelKind::PhaseFlip);
//! let seq = gamma_sequence(class, 1e-6, 0.1, 0.95, 5)?;
//! let strategy = Strategy::new(StrategyTag::Ms1, 1e-6, seq.feasible())?;
//! let scenario = Scenario::new(StateFamily::Bell, strategy, NoisyChannel::new(ChannelKind::PhaseFlip, 0.95)?, 5)?;
//! let trace = run_protocol(&scenario)?;
//! assert!(trace.values.iter().all(|w| *w > 2.0));
//!
//! let solution = solve_double_violation(class, 0.5, 0.9)?;
//! assert!(solution.witness1 > 2.0 && solution.witness2 > 2.0);
//! # Ok::<(), seqshare::Error>(())
//! ```

pub mod analysis;
pub mod channels;
pub mod cli;
pub mod closedform;
pub mod error;
pub mod measurements;
pub mod protocol;
pub mod qcore;

pub use channels::{apply_channel_qubit, ChannelKind, NoisyChannel};
pub use closedform::{ScenarioClass, SharpnessEntry, SharpnessSequence};
pub use error::{Error, Result};
pub use measurements::{Effect, Role, Strategy, StrategyTag};
pub use protocol::{run_protocol, Scenario, WitnessTrace};
pub use qcore::{ComplexMatrix, DensityMatrix, StateFamily};
