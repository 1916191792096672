//! Kraus forms of the phase-flip, bit-flip and depolarizing channels.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{embed_on_qubit, ComplexMatrix, DensityMatrix};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ChannelKind {
    PhaseFlip,
    BitFlip,
    Depolarizing,
    Noiseless,
}

impl ChannelKind {
    pub const ALL: [ChannelKind; 4] =
        [ChannelKind::PhaseFlip, ChannelKind::BitFlip, ChannelKind::Depolarizing, ChannelKind::Noiseless];

    pub fn as_str(self) -> &'static str {
        match self {
            ChannelKind::PhaseFlip => "phase-flip",
            ChannelKind::BitFlip => "bit-flip",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::Noiseless => "noiseless",
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|k| k.as_str() == lower)
            .ok_or_else(|| Error::Unknown { kind: "channel", value: s.to_string() })
    }
}

/// A channel kind with its noise parameter `p` (probability that the qubit is left alone).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoisyChannel {
    kind: ChannelKind,
    p: f64,
}

impl NoisyChannel {
    pub fn new(kind: ChannelKind, p: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param("p", p, "noise parameter must lie in [0, 1]"));
        }
        let p = if kind == ChannelKind::Noiseless { 1.0 } else { p };
        Ok(Self { kind, p })
    }

    pub fn noiseless() -> Self {
        Self { kind: ChannelKind::Noiseless, p: 1.0 }
    }

    pub fn kind(&self) -> ChannelKind {
        self.kind
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    /// p = 1/2 for the flip channels and p = 0 for depolarizing wipe out
    /// the affected correlations completely.
    pub fn is_degenerate(&self) -> bool {
        match self.kind {
            ChannelKind::PhaseFlip | ChannelKind::BitFlip => self.p == 0.5,
            ChannelKind::Depolarizing => self.p == 0.0,
            ChannelKind::Noiseless => false,
        }
    }

    pub fn kraus_set(&self) -> Vec<ComplexMatrix> {
        kraus_set(self)
    }
}

pub fn kraus_set(ch: &NoisyChannel) -> Vec<ComplexMatrix> {
    let p = ch.p;
    let id = ComplexMatrix::identity(2);
    match ch.kind {
        ChannelKind::Noiseless => vec![id],
        ChannelKind::PhaseFlip => vec![id.scale(p.sqrt()), ComplexMatrix::sigma_z().scale((1.0 - p).sqrt())],
        ChannelKind::BitFlip => vec![id.scale(p.sqrt()), ComplexMatrix::sigma_x().scale((1.0 - p).sqrt())],
        ChannelKind::Depolarizing => {
            let w = (1.0 - p).sqrt() / 2.0;
            vec![
                id.scale(((1.0 + 3.0 * p) / 4.0).sqrt()),
                ComplexMatrix::sigma_x().scale(w),
                ComplexMatrix::sigma_y().scale(w),
                ComplexMatrix::sigma_z().scale(w),
            ]
        }
    }
}

/// `sum_m E_m rho E_m^dagger` with each `E_m` acting on `qubit_index`.
pub fn apply_channel_qubit(rho: &DensityMatrix, ch: &NoisyChannel, qubit_index: usize) -> Result<DensityMatrix> {
    let n = rho.nqubits();
    if qubit_index >= n {
        return Err(Error::QubitOutOfRange { index: qubit_index, nqubits: n });
    }
    if ch.kind == ChannelKind::Noiseless {
        return Ok(rho.clone());
    }
    let mut out = ComplexMatrix::zeros(rho.dim());
    for k in kraus_set(ch) {
        let e = embed_on_qubit(&k, qubit_index, n)?;
        out = &out + &rho.matrix().conjugate_by(&e);
    }
    Ok(DensityMatrix::from_trusted(out))
}
