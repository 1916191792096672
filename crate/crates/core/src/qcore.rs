//! Small dense complex linear algebra and the canonical initial states.
//!
//! Matrices here are at most 8x8, so everything is stored dense and
//! row-major. Qubit 0 is the leftmost tensor factor: Alice, then Bob, then
//! Charlie when there are three parties.

use std::fmt;
use std::ops::{Add, Mul, Sub};
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Per-entry tolerance used for structural checks (Hermiticity, trace, equality).
pub const STRUCTURAL_TOL: f64 = 1e-12;
/// Eigenvalues down to this value still count as positive semidefinite.
pub const PSD_SLACK: f64 = -1e-10;
/// Off-diagonal Frobenius norm at which cyclic Jacobi stops.
const JACOBI_THRESHOLD: f64 = 1e-14;
const JACOBI_MAX_SWEEPS: usize = 100;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl ComplexMatrix {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::BadShape { dim, expected: dim * dim, got: entries.len() });
        }
        Ok(Self { dim, entries })
    }

    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Self { dim, entries: vec![ZERO; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.entries[i * dim + i] = ONE;
        }
        m
    }

    pub fn diag(values: &[f64]) -> Self {
        let mut m = Self::zeros(values.len());
        for (i, &v) in values.iter().enumerate() {
            m.entries[i * values.len() + i] = Complex64::new(v, 0.0);
        }
        m
    }

    pub fn sigma_x() -> Self {
        Self { dim: 2, entries: vec![ZERO, ONE, ONE, ZERO] }
    }

    pub fn sigma_y() -> Self {
        Self { dim: 2, entries: vec![ZERO, -I, I, ZERO] }
    }

    pub fn sigma_z() -> Self {
        Self { dim: 2, entries: vec![ONE, ZERO, ZERO, -ONE] }
    }

    pub fn hadamard() -> Self {
        let h = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        Self { dim: 2, entries: vec![h, h, h, -h] }
    }

    /// `(c0 I + nx X + ny Y + nz Z)` for a single qubit.
    pub fn pauli_combination(c0: f64, n: [f64; 3]) -> Self {
        let [nx, ny, nz] = n;
        Self {
            dim: 2,
            entries: vec![
                Complex64::new(c0 + nz, 0.0),
                Complex64::new(nx, -ny),
                Complex64::new(nx, ny),
                Complex64::new(c0 - nz, 0.0),
            ],
        }
    }

    /// Column vector outer product `|v><v|`.
    pub fn projector(amplitudes: &[Complex64]) -> Result<Self> {
        let n = amplitudes.len();
        let mut m = Self::zeros(n.max(1));
        if n == 0 {
            return Err(Error::BadShape { dim: 0, expected: 0, got: 0 });
        }
        for r in 0..n {
            for c in 0..n {
                m.entries[r * n + c] = amplitudes[r] * amplitudes[c].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    pub fn set(&mut self, row: usize, col: usize, value: Complex64) {
        self.entries[row * self.dim + col] = value;
    }

    pub fn scale(&self, factor: f64) -> Self {
        Self { dim: self.dim, entries: self.entries.iter().map(|z| z * factor).collect() }
    }

    pub fn adjoint(&self) -> Self {
        let n = self.dim;
        let mut out = Self::zeros(n);
        for r in 0..n {
            for c in 0..n {
                out.entries[c * n + r] = self.entries[r * n + c].conj();
            }
        }
        out
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    pub fn kron(&self, other: &Self) -> Self {
        let (n, m) = (self.dim, other.dim);
        let d = n * m;
        let mut out = Self::zeros(d);
        for ar in 0..n {
            for ac in 0..n {
                let a = self.entries[ar * n + ac];
                if a == ZERO {
                    continue;
                }
                for br in 0..m {
                    for bc in 0..m {
                        out.entries[(ar * m + br) * d + ac * m + bc] = a * other.entries[br * m + bc];
                    }
                }
            }
        }
        out
    }

    /// `u * self * u^dagger`
    pub fn conjugate_by(&self, u: &Self) -> Self {
        &(u * self) * &u.adjoint()
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim, "dimension mismatch");
        self.entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn approx_eq(&self, other: &Self, tol: f64) -> bool {
        self.dim == other.dim && self.max_abs_diff(other) <= tol
    }

    pub fn hermiticity_error(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.hermiticity_error() <= tol
    }

    /// Eigenvalues in ascending order. The matrix must be Hermitian.
    pub fn hermitian_eigenvalues(&self) -> Result<Vec<f64>> {
        self.check_hermitian()?;
        if self.dim == 2 {
            let (lo, hi) = eigenvalues_2x2(self);
            return Ok(vec![lo, hi]);
        }
        let (vals, _) = embedded_jacobi(self);
        // every eigenvalue appears twice in the real embedding
        Ok(vals.iter().step_by(2).copied().collect())
    }

    fn check_hermitian(&self) -> Result<()> {
        let deviation = self.hermiticity_error();
        if deviation > STRUCTURAL_TOL {
            return Err(Error::NotHermitian { deviation });
        }
        Ok(())
    }
}

impl Mul for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn mul(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        let n = self.dim;
        let mut out = ComplexMatrix::zeros(n);
        for r in 0..n {
            for k in 0..n {
                let a = self.entries[r * n + k];
                if a == ZERO {
                    continue;
                }
                for c in 0..n {
                    out.entries[r * n + c] += a * rhs.entries[k * n + c];
                }
            }
        }
        out
    }
}

impl Add for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn add(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &ComplexMatrix {
    type Output = ComplexMatrix;

    fn sub(self, rhs: &ComplexMatrix) -> ComplexMatrix {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        ComplexMatrix {
            dim: self.dim,
            entries: self.entries.iter().zip(&rhs.entries).map(|(a, b)| a - b).collect(),
        }
    }
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kron(b)
}

/// Places a single-qubit operator at `qubit_index` with identities elsewhere.
pub fn embed_on_qubit(op: &ComplexMatrix, qubit_index: usize, nqubits: usize) -> Result<ComplexMatrix> {
    if op.dim() != 2 {
        return Err(Error::DimensionMismatch { left: op.dim(), right: 2 });
    }
    if qubit_index >= nqubits {
        return Err(Error::QubitOutOfRange { index: qubit_index, nqubits });
    }
    let id = ComplexMatrix::identity(2);
    let mut out = ComplexMatrix::identity(1);
    for q in 0..nqubits {
        out = out.kron(if q == qubit_index { op } else { &id });
    }
    Ok(out)
}

fn eigenvalues_2x2(m: &ComplexMatrix) -> (f64, f64) {
    let a = m.get(0, 0).re;
    let d = m.get(1, 1).re;
    let b = m.get(0, 1);
    let mean = 0.5 * (a + d);
    let radius = (0.25 * (a - d) * (a - d) + b.norm_sqr()).sqrt();
    (mean - radius, mean + radius)
}

/// Cyclic Jacobi on the real symmetric embedding `[[Re, -Im], [Im, Re]]`.
/// Returns eigenvalues (ascending) and the matching real eigenvectors as columns.
fn embedded_jacobi(m: &ComplexMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.dim();
    let size = 2 * n;
    let mut a = vec![0.0; size * size];
    for r in 0..n {
        for c in 0..n {
            let z = m.get(r, c);
            a[r * size + c] = z.re;
            a[(r + n) * size + c + n] = z.re;
            a[r * size + c + n] = -z.im;
            a[(r + n) * size + c] = z.im;
        }
    }
    let mut v = vec![0.0; size * size];
    for i in 0..size {
        v[i * size + i] = 1.0;
    }

    for _ in 0..JACOBI_MAX_SWEEPS {
        let off: f64 = (0..size)
            .flat_map(|r| (0..size).filter(move |&c| c != r).map(move |c| (r, c)))
            .map(|(r, c)| a[r * size + c] * a[r * size + c])
            .sum();
        if off.sqrt() < JACOBI_THRESHOLD {
            break;
        }
        for p in 0..size {
            for q in (p + 1)..size {
                let apq = a[p * size + q];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (a[q * size + q] - a[p * size + p]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..size {
                    let akp = a[k * size + p];
                    let akq = a[k * size + q];
                    a[k * size + p] = c * akp - s * akq;
                    a[k * size + q] = s * akp + c * akq;
                }
                for k in 0..size {
                    let apk = a[p * size + k];
                    let aqk = a[q * size + k];
                    a[p * size + k] = c * apk - s * aqk;
                    a[q * size + k] = s * apk + c * aqk;
                }
                for k in 0..size {
                    let vkp = v[k * size + p];
                    let vkq = v[k * size + q];
                    v[k * size + p] = c * vkp - s * vkq;
                    v[k * size + q] = s * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..size).collect();
    order.sort_by(|&i, &j| a[i * size + i].total_cmp(&a[j * size + j]));
    let values = order.iter().map(|&i| a[i * size + i]).collect();
    let vectors = order.iter().map(|&i| (0..size).map(|k| v[k * size + i]).collect()).collect();
    (values, vectors)
}

/// Hermitian PSD square root.
///
/// 2x2 inputs use `sqrt(M) = (M + sqrt(det) I) / sqrt(tr + 2 sqrt(det))`;
/// larger ones go through the Jacobi eigendecomposition.
pub fn mat_sqrt_psd(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    m.check_hermitian()?;
    let n = m.dim();
    if n == 2 {
        let (lo, hi) = eigenvalues_2x2(m);
        if lo < PSD_SLACK {
            return Err(Error::NegativeEigenvalue { eigenvalue: lo });
        }
        let (lo, hi) = (lo.max(0.0), hi.max(0.0));
        let s = (lo * hi).sqrt();
        let t = (lo + hi + 2.0 * s).sqrt();
        if t == 0.0 {
            return Ok(ComplexMatrix::zeros(2));
        }
        let shifted = m + &ComplexMatrix::identity(2).scale(s);
        return Ok(shifted.scale(1.0 / t));
    }

    let (values, vectors) = embedded_jacobi(m);
    if let Some(&min) = values.first() {
        if min < PSD_SLACK {
            return Err(Error::NegativeEigenvalue { eigenvalue: min });
        }
    }
    // Each complex eigenvector shows up twice (as v and i*v) in the embedding,
    // so the sum over all real eigenvectors counts every projector twice.
    let mut out = ComplexMatrix::zeros(n);
    for (lambda, vec) in values.iter().zip(&vectors) {
        let root = lambda.max(0.0).sqrt();
        if root == 0.0 {
            continue;
        }
        let u: Vec<Complex64> = (0..n).map(|k| Complex64::new(vec[k], vec[k + n])).collect();
        for r in 0..n {
            for c in 0..n {
                out.entries[r * n + c] += 0.5 * root * u[r] * u[c].conj();
            }
        }
    }
    Ok(out)
}

/// A validated density operator on two or three qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    mat: ComplexMatrix,
    nqubits: usize,
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace and positivity.
    pub fn new(mat: ComplexMatrix) -> Result<Self> {
        let nqubits = qubit_count(mat.dim())?;
        let trace = mat.trace();
        if (trace.re - 1.0).abs() > STRUCTURAL_TOL || trace.im.abs() > STRUCTURAL_TOL {
            return Err(Error::BadTrace { trace: trace.re });
        }
        let eigs = mat.hermitian_eigenvalues()?;
        if eigs[0] < PSD_SLACK {
            return Err(Error::NegativeEigenvalue { eigenvalue: eigs[0] });
        }
        Ok(Self { mat, nqubits })
    }

    /// Skips validation; callers hold the invariants by construction
    /// (CPTP maps applied to a valid state).
    pub(crate) fn from_trusted(mat: ComplexMatrix) -> Self {
        let nqubits = mat.dim().trailing_zeros() as usize;
        Self { mat, nqubits }
    }

    pub fn pure(amplitudes: &[Complex64]) -> Result<Self> {
        Self::new(ComplexMatrix::projector(amplitudes)?)
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.mat
    }

    pub fn nqubits(&self) -> usize {
        self.nqubits
    }

    pub fn dim(&self) -> usize {
        self.mat.dim()
    }

    /// `Re tr(rho * op)`
    pub fn expectation(&self, op: &ComplexMatrix) -> f64 {
        assert_eq!(op.dim(), self.dim(), "operator dimension mismatch");
        let n = self.dim();
        let mut acc = ZERO;
        for r in 0..n {
            for c in 0..n {
                acc += self.mat.get(r, c) * op.get(c, r);
            }
        }
        acc.re
    }

    pub fn purity(&self) -> f64 {
        (&self.mat * &self.mat).trace().re
    }
}

fn qubit_count(dim: usize) -> Result<usize> {
    match dim {
        2 => Ok(1),
        4 => Ok(2),
        8 => Ok(3),
        _ => Err(Error::Incompatible(format!("dimension {dim} is not 2, 4 or 8"))),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateFamily {
    Bell,
    Ghz,
    W,
    /// Tetrahedral state, the Hadamard image of GHZ.
    GhzPrime,
    WPrime,
}

impl StateFamily {
    pub const ALL: [StateFamily; 5] =
        [StateFamily::Bell, StateFamily::Ghz, StateFamily::W, StateFamily::GhzPrime, StateFamily::WPrime];

    pub fn nqubits(self) -> usize {
        match self {
            StateFamily::Bell => 2,
            _ => 3,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            StateFamily::Bell => "bell",
            StateFamily::Ghz => "ghz",
            StateFamily::W => "w",
            StateFamily::GhzPrime => "ghz-prime",
            StateFamily::WPrime => "w-prime",
        }
    }
}

impl fmt::Display for StateFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for StateFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.to_ascii_lowercase();
        Self::ALL
            .into_iter()
            .find(|f| f.as_str() == lower)
            .ok_or_else(|| Error::Unknown { kind: "state", value: s.to_string() })
    }
}

fn real_amplitudes(values: &[f64]) -> Vec<Complex64> {
    values.iter().map(|&x| Complex64::new(x, 0.0)).collect()
}

pub fn make_state(family: StateFamily) -> DensityMatrix {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let t = 1.0 / 3f64.sqrt();
    let amps = match family {
        StateFamily::Bell => real_amplitudes(&[h, 0.0, 0.0, h]),
        StateFamily::Ghz => real_amplitudes(&[h, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, h]),
        StateFamily::W => real_amplitudes(&[0.0, t, t, 0.0, t, 0.0, 0.0, 0.0]),
        StateFamily::GhzPrime => return hadamard_all(&make_state(StateFamily::Ghz)),
        StateFamily::WPrime => return hadamard_all(&make_state(StateFamily::W)),
    };
    DensityMatrix::pure(&amps).expect("canonical states are valid")
}

fn hadamard_all(rho: &DensityMatrix) -> DensityMatrix {
    let h = ComplexMatrix::hadamard();
    let u = h.kron(&h).kron(&h);
    DensityMatrix::from_trusted(rho.matrix().conjugate_by(&u))
}

/// `(H x H x H) rho (H x H x H)` on a three-qubit state.
pub fn apply_local_hadamards(rho: &DensityMatrix) -> Result<DensityMatrix> {
    if rho.nqubits() != 3 {
        return Err(Error::ArityMismatch { expected: 3, got: rho.nqubits() });
    }
    Ok(hadamard_all(rho))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ket(nqubits: usize, index: usize) -> Vec<Complex64> {
        let mut v = vec![ZERO; 1 << nqubits];
        v[index] = ONE;
        v
    }

    fn apply(m: &ComplexMatrix, v: &[Complex64]) -> Vec<Complex64> {
        let n = m.dim();
        (0..n).map(|r| (0..n).map(|k| m.get(r, k) * v[k]).sum()).collect()
    }

    #[test]
    fn kron_identities_and_signs() {
        let id2 = ComplexMatrix::identity(2);
        assert!(kron(&id2, &id2).approx_eq(&ComplexMatrix::identity(4), 0.0));
        let zz = kron(&ComplexMatrix::sigma_z(), &ComplexMatrix::sigma_z());
        assert!(zz.approx_eq(&ComplexMatrix::diag(&[1.0, -1.0, -1.0, 1.0]), 0.0));
    }

    #[test]
    fn kron_x_on_first_qubit_flips_leftmost_bit() {
        // by hand: (X (x) I)|00> = |10>, index 2 in |00>,|01>,|10>,|11>
        let xi = kron(&ComplexMatrix::sigma_x(), &ComplexMatrix::identity(2));
        assert_eq!(apply(&xi, &ket(2, 0)), ket(2, 2));
    }

    #[test]
    fn embed_places_operator() {
        let z = ComplexMatrix::sigma_z();
        let e = embed_on_qubit(&z, 1, 2).unwrap();
        assert!(e.approx_eq(&kron(&ComplexMatrix::identity(2), &z), 0.0));
        let e = embed_on_qubit(&ComplexMatrix::identity(2), 0, 3).unwrap();
        assert!(e.approx_eq(&ComplexMatrix::identity(8), 0.0));
    }

    #[test]
    fn embed_x_on_last_of_three() {
        let x = embed_on_qubit(&ComplexMatrix::sigma_x(), 2, 3).unwrap();
        let p000 = ComplexMatrix::projector(&ket(3, 0)).unwrap();
        let p001 = ComplexMatrix::projector(&ket(3, 1)).unwrap();
        assert!(p000.conjugate_by(&x).approx_eq(&p001, 0.0));
    }

    #[test]
    fn embed_rejects_bad_index() {
        let err = embed_on_qubit(&ComplexMatrix::sigma_x(), 3, 3).unwrap_err();
        assert_eq!(err, Error::QubitOutOfRange { index: 3, nqubits: 3 });
        assert!(embed_on_qubit(&ComplexMatrix::identity(4), 0, 3).is_err());
    }

    #[test]
    fn sqrt_of_diagonal_and_identity() {
        let d = mat_sqrt_psd(&ComplexMatrix::diag(&[0.8, 0.2])).unwrap();
        assert!(d.approx_eq(&ComplexMatrix::diag(&[0.8f64.sqrt(), 0.2f64.sqrt()]), 1e-15));
        let id = mat_sqrt_psd(&ComplexMatrix::identity(2)).unwrap();
        assert!(id.approx_eq(&ComplexMatrix::identity(2), 1e-15));
    }

    #[test]
    fn sqrt_in_sigma_x_eigenbasis() {
        // (I + 0.6 X)/2 has eigenvalues 0.8 (|+>) and 0.2 (|->).
        let m = ComplexMatrix::pauli_combination(0.5, [0.3, 0.0, 0.0]);
        let alpha = (0.8f64.sqrt() + 0.2f64.sqrt()) / 2.0;
        let beta = (0.8f64.sqrt() - 0.2f64.sqrt()) / 2.0;
        let expected = ComplexMatrix::pauli_combination(alpha, [beta, 0.0, 0.0]);
        assert!(mat_sqrt_psd(&m).unwrap().approx_eq(&expected, 1e-15));
    }

    #[test]
    fn sqrt_rejects_bad_input() {
        assert!(matches!(
            mat_sqrt_psd(&ComplexMatrix::diag(&[1.0, -0.5])),
            Err(Error::NegativeEigenvalue { .. })
        ));
        let mut m = ComplexMatrix::identity(2);
        m.set(0, 1, c(0.3, 0.0));
        assert!(matches!(mat_sqrt_psd(&m), Err(Error::NotHermitian { .. })));
    }

    #[test]
    fn sqrt_of_larger_psd_matrix() {
        let rho = make_state(StateFamily::W).into_matrix();
        let mixed = &rho.scale(0.7) + &ComplexMatrix::identity(8).scale(0.3 / 8.0);
        let root = mat_sqrt_psd(&mixed).unwrap();
        assert!((&root * &root).approx_eq(&mixed, 1e-12));
        assert!(root.is_hermitian(1e-12));
    }

    #[test]
    fn jacobi_eigenvalues_of_known_spectrum() {
        let u = ComplexMatrix::hadamard().kron(&ComplexMatrix::hadamard());
        let d = ComplexMatrix::diag(&[0.1, 0.2, 0.3, 0.4]);
        let m = d.conjugate_by(&u);
        let eigs = m.hermitian_eigenvalues().unwrap();
        for (got, want) in eigs.iter().zip([0.1, 0.2, 0.3, 0.4]) {
            assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        }
    }

    #[test]
    fn canonical_states() {
        let bell = make_state(StateFamily::Bell);
        for r in 0..4 {
            for col in 0..4 {
                let want = if [0, 3].contains(&r) && [0, 3].contains(&col) { 0.5 } else { 0.0 };
                assert!((bell.matrix().get(r, col) - c(want, 0.0)).norm() < 1e-15);
            }
        }
        let w = make_state(StateFamily::W);
        let sym = [1usize, 2, 4];
        for r in 0..8 {
            for col in 0..8 {
                let want = if sym.contains(&r) && sym.contains(&col) { 1.0 / 3.0 } else { 0.0 };
                assert!((w.matrix().get(r, col).re - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn hadamard_images_match_literal_amplitudes() {
        let ghz_prime = apply_local_hadamards(&make_state(StateFamily::Ghz)).unwrap();
        let tetra = DensityMatrix::pure(&real_amplitudes(&[0.5, 0.0, 0.0, 0.5, 0.0, 0.5, 0.5, 0.0])).unwrap();
        assert!(ghz_prime.matrix().approx_eq(tetra.matrix(), 1e-15));
        assert!(make_state(StateFamily::GhzPrime).matrix().approx_eq(tetra.matrix(), 1e-15));

        let s = 1.0 / 24f64.sqrt();
        let coeffs = [3.0, 1.0, 1.0, -1.0, 1.0, -1.0, -1.0, -3.0].map(|x| x * s);
        let w_prime = DensityMatrix::pure(&real_amplitudes(&coeffs)).unwrap();
        let got = apply_local_hadamards(&make_state(StateFamily::W)).unwrap();
        assert!(got.matrix().approx_eq(w_prime.matrix(), 1e-15));
        assert!(make_state(StateFamily::WPrime).matrix().approx_eq(w_prime.matrix(), 1e-15));
    }

    #[test]
    fn hadamards_need_three_qubits() {
        let err = apply_local_hadamards(&make_state(StateFamily::Bell)).unwrap_err();
        assert_eq!(err, Error::ArityMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn canonical_states_are_pure_density_matrices() {
        for family in StateFamily::ALL {
            let rho = make_state(family);
            let revalidated = DensityMatrix::new(rho.matrix().clone()).unwrap();
            assert_eq!(revalidated.nqubits(), family.nqubits());
            let sq = rho.matrix() * rho.matrix();
            assert!(sq.approx_eq(rho.matrix(), 1e-12), "{family} not idempotent");
        }
    }

    #[test]
    fn density_matrix_validation() {
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::diag(&[0.5, 0.6, 0.0, 0.0])),
            Err(Error::BadTrace { .. })
        ));
        assert!(matches!(
            DensityMatrix::new(ComplexMatrix::diag(&[1.2, -0.2, 0.0, 0.0])),
            Err(Error::NegativeEigenvalue { .. })
        ));
        assert!(DensityMatrix::new(ComplexMatrix::identity(3)).is_err());
    }

    #[test]
    fn family_names_round_trip() {
        for family in StateFamily::ALL {
            assert_eq!(family.as_str().parse::<StateFamily>().unwrap(), family);
        }
        assert!("tetra".parse::<StateFamily>().is_err());
    }

    fn arb_2x2() -> impl Strategy<Value = ComplexMatrix> {
        prop::collection::vec(-1.0f64..1.0, 8).prop_map(|v| {
            ComplexMatrix::new(2, v.chunks(2).map(|p| c(p[0], p[1])).collect()).unwrap()
        })
    }

    fn arb_psd_2x2() -> impl Strategy<Value = ComplexMatrix> {
        arb_2x2().prop_map(|a| &a * &a.adjoint())
    }

    proptest! {
        #[test]
        fn kron_is_associative(a in arb_2x2(), b in arb_2x2(), c in arb_2x2()) {
            let left = kron(&kron(&a, &b), &c);
            let right = kron(&a, &kron(&b, &c));
            prop_assert!(left.approx_eq(&right, 1e-12));
        }

        #[test]
        fn sqrt_squares_back(m in arb_psd_2x2()) {
            let root = mat_sqrt_psd(&m).unwrap();
            prop_assert!((&root * &root).approx_eq(&m, 1e-12));
            prop_assert!(root.is_hermitian(1e-12));
            prop_assert!(root.hermitian_eigenvalues().unwrap()[0] >= -1e-12);
        }

        #[test]
        fn hadamards_are_involutive(a in arb_2x2(), b in arb_2x2(), c in arb_2x2()) {
            let m = kron(&kron(&a, &b), &c);
            let raw = &m * &m.adjoint();
            let tr = raw.trace().re;
            let rho = DensityMatrix::new(raw.scale(1.0 / tr)).unwrap();
            let twice = apply_local_hadamards(&apply_local_hadamards(&rho).unwrap()).unwrap();
            prop_assert!(twice.matrix().approx_eq(rho.matrix(), 1e-12));
        }
    }

    #[test]
    fn sqrt_squares_back_1000_draws() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for _ in 0..1000 {
            let entries = (0..4).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let a = ComplexMatrix::new(2, entries).unwrap();
            let m = &a * &a.adjoint();
            let root = mat_sqrt_psd(&m).unwrap();
            assert!((&root * &root).approx_eq(&m, 1e-12));
        }
    }
}
