//! Two-outcome POVMs for the six measurement strategies.
//!
//! Every effect used here has the form `E_0 = (I + n.sigma)/2` for some Bloch
//! vector `n` with `|n| <= 1`, and `E_1 = I - E_0`. The tables below store `n`
//! per strategy, role and input.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qcore::{ComplexMatrix, STRUCTURAL_TOL};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StrategyTag {
    Ms1,
    Ms2,
    Ms3,
    Ms4,
    Ms5,
    Ms6,
}

impl StrategyTag {
    pub const ALL: [StrategyTag; 6] =
        [StrategyTag::Ms1, StrategyTag::Ms2, StrategyTag::Ms3, StrategyTag::Ms4, StrategyTag::Ms5, StrategyTag::Ms6];

    pub fn as_str(self) -> &'static str {
        match self {
            StrategyTag::Ms1 => "ms1",
            StrategyTag::Ms2 => "ms2",
            StrategyTag::Ms3 => "ms3",
            StrategyTag::Ms4 => "ms4",
            StrategyTag::Ms5 => "ms5",
            StrategyTag::Ms6 => "ms6",
        }
    }

    /// Number of parties: 2 for the CHSH strategies, 3 for the Mermin ones.
    pub fn arity(self) -> usize {
        match self {
            StrategyTag::Ms1 | StrategyTag::Ms2 => 2,
            _ => 3,
        }
    }

    pub fn applies_local_unitary(self) -> bool {
        matches!(self, StrategyTag::Ms4 | StrategyTag::Ms6)
    }

    pub fn sequential_role(self) -> Role {
        if self.arity() == 2 {
            Role::Bob
        } else {
            Role::Charlie
        }
    }

    /// MS3/MS4 use theta as a sharpness in (0, 1]; the others as an angle.
    pub fn theta_is_angle(self) -> bool {
        !matches!(self, StrategyTag::Ms3 | StrategyTag::Ms4)
    }

    pub fn check_theta(self, theta: f64) -> Result<()> {
        let ok = match self {
            StrategyTag::Ms1 | StrategyTag::Ms2 => theta > 0.0 && theta <= FRAC_PI_4,
            StrategyTag::Ms3 | StrategyTag::Ms4 => theta > 0.0 && theta <= 1.0,
            StrategyTag::Ms5 | StrategyTag::Ms6 => (0.0..=FRAC_PI_2).contains(&theta),
        };
        if ok {
            Ok(())
        } else {
            let domain = match self {
                StrategyTag::Ms1 | StrategyTag::Ms2 => "(0, pi/4]",
                StrategyTag::Ms3 | StrategyTag::Ms4 => "(0, 1]",
                StrategyTag::Ms5 | StrategyTag::Ms6 => "[0, pi/2]",
            };
            Err(Error::param("theta", theta, format!("{} needs theta in {domain}", self.as_str())))
        }
    }
}

impl fmt::Display for StrategyTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StrategyTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|t| t.as_str() == lower)
            .ok_or_else(|| Error::Unknown { kind: "strategy", value: s.to_string() })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Role {
    Alice,
    Bob,
    Charlie,
}

pub fn check_gamma(gamma: f64) -> Result<()> {
    if (0.0..=1.0).contains(&gamma) {
        Ok(())
    } else {
        Err(Error::param("gamma", gamma, "sharpness must lie in [0, 1]"))
    }
}

/// A measurement strategy with its orientation/sharpness `theta` and the
/// sharpness of each sequential observer (`gammas[k-1]` for observer k).
#[derive(Debug, Clone, PartialEq)]
pub struct Strategy {
    tag: StrategyTag,
    theta: f64,
    gammas: Vec<f64>,
}

impl Strategy {
    pub fn new(tag: StrategyTag, theta: f64, gammas: Vec<f64>) -> Result<Self> {
        tag.check_theta(theta)?;
        for &g in &gammas {
            check_gamma(g)?;
        }
        Ok(Self { tag, theta, gammas })
    }

    pub fn tag(&self) -> StrategyTag {
        self.tag
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn gammas(&self) -> &[f64] {
        &self.gammas
    }

    pub fn applies_local_unitary(&self) -> bool {
        self.tag.applies_local_unitary()
    }

    pub fn gamma(&self, observer_k: usize) -> Result<f64> {
        if observer_k == 0 || observer_k > self.gammas.len() {
            return Err(Error::InvalidRole(format!(
                "observer {observer_k} has no sharpness (strategy lists {} observers)",
                self.gammas.len()
            )));
        }
        Ok(self.gammas[observer_k - 1])
    }

    /// Bloch vector of the outcome-0 effect.
    fn bloch(&self, role: Role, observer_k: usize, input: usize) -> Result<[f64; 3]> {
        if input > 1 {
            return Err(Error::InvalidRole(format!("input must be 0 or 1, got {input}")));
        }
        let arity = self.tag.arity();
        if arity == 2 && role == Role::Charlie {
            return Err(Error::InvalidRole(format!("{} has no Charlie", self.tag)));
        }
        let t = self.theta;
        let (s, c) = t.sin_cos();
        let sign = if input == 0 { 1.0 } else { -1.0 };
        let sequential = role == self.tag.sequential_role();
        let g = if sequential && input == 1 { self.gamma(observer_k)? } else { 1.0 };
        if sequential && input == 0 {
            // validate k even though the sharp input does not use it
            self.gamma(observer_k)?;
        }
        let n = match (self.tag, role) {
            (StrategyTag::Ms1, Role::Alice) => [sign * s, 0.0, c],
            (StrategyTag::Ms1, _) => [[0.0, 0.0, 1.0], [g, 0.0, 0.0]][input],
            (StrategyTag::Ms2, Role::Alice) => [c, 0.0, sign * s],
            (StrategyTag::Ms2, _) => [[1.0, 0.0, 0.0], [0.0, 0.0, g]][input],

            (StrategyTag::Ms3, Role::Alice) => [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]][input],
            (StrategyTag::Ms3, Role::Bob) => [[0.0, -t, 0.0], [t, 0.0, 0.0]][input],
            (StrategyTag::Ms3, Role::Charlie) => [[1.0, 0.0, 0.0], [0.0, g, 0.0]][input],
            (StrategyTag::Ms4, Role::Alice) => [[0.0, 0.0, 1.0], [0.0, -1.0, 0.0]][input],
            (StrategyTag::Ms4, Role::Bob) => [[0.0, t, 0.0], [0.0, 0.0, t]][input],
            (StrategyTag::Ms4, Role::Charlie) => [[0.0, 0.0, 1.0], [0.0, -g, 0.0]][input],

            (StrategyTag::Ms5, Role::Alice | Role::Bob) => [s, 0.0, sign * c],
            (StrategyTag::Ms5, Role::Charlie) => [[0.0, 0.0, 1.0], [g, 0.0, 0.0]][input],
            (StrategyTag::Ms6, Role::Alice | Role::Bob) => [sign * c, 0.0, s],
            (StrategyTag::Ms6, Role::Charlie) => [[1.0, 0.0, 0.0], [0.0, 0.0, g]][input],
        };
        Ok(n)
    }
}

/// A valid POVM element on one qubit.
#[derive(Debug, Clone, PartialEq)]
pub struct Effect {
    mat: ComplexMatrix,
}

impl Effect {
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        if mat.dim() != 2 {
            return Err(Error::DimensionMismatch { left: mat.dim(), right: 2 });
        }
        let eigs = mat.hermitian_eigenvalues()?;
        if eigs[0] < -STRUCTURAL_TOL || eigs[1] > 1.0 + STRUCTURAL_TOL {
            return Err(Error::param("effect eigenvalue", if eigs[0] < 0.0 { eigs[0] } else { eigs[1] }, "outside [0, 1]"));
        }
        Ok(Self { mat })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn complement(&self) -> Effect {
        Effect { mat: &ComplexMatrix::identity(2) - &self.mat }
    }
}

pub fn effect_for(strategy: &Strategy, role: Role, observer_k: usize, input: usize, outcome: usize) -> Result<Effect> {
    if outcome > 1 {
        return Err(Error::InvalidRole(format!("outcome must be 0 or 1, got {outcome}")));
    }
    let n = strategy.bloch(role, observer_k, input)?;
    let e0 = ComplexMatrix::pauli_combination(0.5, n.map(|x| 0.5 * x));
    let e0 = Effect { mat: e0 };
    Ok(if outcome == 0 { e0 } else { e0.complement() })
}

/// Dichotomic observable `E_0 - E_1 = 2 E_0 - I`.
pub fn observable_for(strategy: &Strategy, role: Role, observer_k: usize, input: usize) -> Result<ComplexMatrix> {
    let n = strategy.bloch(role, observer_k, input)?;
    Ok(ComplexMatrix::pauli_combination(0.0, n))
}

/// Square roots of the sequential observer's four effects, indexed `[input][outcome]`.
///
/// For `E = (I +- g n.sigma)/2` with unit `n` the root is `a I +- b n.sigma`,
/// `a = (sqrt(1+g) + sqrt(1-g)) / (2 sqrt 2)`, `b = (sqrt(1+g) - sqrt(1-g)) / (2 sqrt 2)`.
pub fn sqrt_effects_for_sequential(strategy: &Strategy, observer_k: usize) -> Result<[[ComplexMatrix; 2]; 2]> {
    let role = strategy.tag().sequential_role();
    let root = |input: usize| -> Result<[ComplexMatrix; 2]> {
        let n = strategy.bloch(role, observer_k, input)?;
        let g = (n[0] * n[0] + n[1] * n[1] + n[2] * n[2]).sqrt();
        let axis = if g > 0.0 { n.map(|x| x / g) } else { [0.0; 3] };
        let (up, down) = ((1.0 + g).sqrt(), (1.0 - g).max(0.0).sqrt());
        let a = (up + down) / (2.0 * std::f64::consts::SQRT_2);
        let b = (up - down) / (2.0 * std::f64::consts::SQRT_2);
        Ok([
            ComplexMatrix::pauli_combination(a, axis.map(|x| b * x)),
            ComplexMatrix::pauli_combination(a, axis.map(|x| -b * x)),
        ])
    };
    Ok([root(0)?, root(1)?])
}
