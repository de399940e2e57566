//! Dense multiqubit states, Pauli expectation values and correlation tensors.
//!
//! Basis index `i` encodes the computational basis state whose bit `b` is the
//! Z-basis value of qubit `b`. Pure states are the primary representation;
//! density matrices exist for reduced states of at most [`MAX_DENSITY_QUBITS`]
//! qubits.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::{AnticommutingSet, Pauli, PauliString};

pub const MAX_STATE_QUBITS: usize = 20;
pub const MAX_DENSITY_QUBITS: usize = 8;
pub const MAX_RANDOM_QUBITS: usize = 14;

pub const NORM_TOLERANCE: f64 = 1e-10;
pub const PSD_SLACK: f64 = 1e-8;

/// Operations shared by pure and mixed states.
pub trait QuantumState {
    fn n_qubits(&self) -> usize;

    /// `Tr[rho P]` without the qubit-count check.
    fn expectation_unchecked(&self, p: &PauliString) -> f64;

    /// Partial trace onto `sites` (already validated); reduced qubit `r` is `sites[r]`.
    fn reduced_unchecked(&self, sites: &[usize]) -> DensityMatrix;

    fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.n_qubits() != self.n_qubits() {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits(),
                actual: p.n_qubits(),
            });
        }
        Ok(self.expectation_unchecked(p))
    }

    fn reduced(&self, sites: &[usize]) -> Result<DensityMatrix> {
        validate_sites(sites, self.n_qubits())?;
        if sites.len() > MAX_DENSITY_QUBITS {
            return Err(Error::OutOfRange(format!(
                "reduced state on {} qubits exceeds {MAX_DENSITY_QUBITS}",
                sites.len()
            )));
        }
        Ok(self.reduced_unchecked(sites))
    }
}

pub(crate) fn validate_sites(sites: &[usize], n: usize) -> Result<()> {
    if sites.is_empty() {
        return Err(Error::Empty("site list"));
    }
    let mut seen = vec![false; n];
    for &s in sites {
        if s >= n {
            return Err(Error::OutOfRange(format!("site {s} on {n} qubits")));
        }
        if seen[s] {
            return Err(Error::Duplicate(format!("site {s}")));
        }
        seen[s] = true;
    }
    Ok(())
}

/// Spreads the low bits of `value` onto the positions listed in `positions`.
fn deposit(value: usize, positions: &[usize]) -> usize {
    positions
        .iter()
        .enumerate()
        .fold(0, |acc, (r, &q)| acc | (((value >> r) & 1) << q))
}

fn embeddings(sites: &[usize], n: usize) -> (Vec<usize>, Vec<usize>) {
    let rest: Vec<usize> = (0..n).filter(|q| !sites.contains(q)).collect();
    let kept = (0..1usize << sites.len())
        .map(|a| deposit(a, sites))
        .collect();
    let traced = (0..1usize << rest.len())
        .map(|e| deposit(e, &rest))
        .collect();
    (kept, traced)
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    n: usize,
    amplitudes: Vec<Complex64>,
}

impl StateVector {
    /// Validates length and normalization (within [`NORM_TOLERANCE`]).
    pub fn new(n: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::check_shape(n, amplitudes.len())?;
        let norm_sqr: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!(
                "squared norm {norm_sqr} differs from 1"
            )));
        }
        Ok(Self { n, amplitudes })
    }

    /// Rescales `amplitudes` to unit norm.
    pub fn normalized(n: usize, mut amplitudes: Vec<Complex64>) -> Result<Self> {
        Self::check_shape(n, amplitudes.len())?;
        let norm = amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return Err(Error::InvalidState("zero or non-finite norm".into()));
        }
        amplitudes.iter_mut().for_each(|a| *a /= norm);
        Ok(Self { n, amplitudes })
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Self::check_shape(n, 1 << n.min(MAX_STATE_QUBITS))?;
        if index >= 1 << n {
            return Err(Error::OutOfRange(format!(
                "basis index {index} on {n} qubits"
            )));
        }
        let mut amplitudes = vec![Complex64::new(0.0, 0.0); 1 << n];
        amplitudes[index] = Complex64::new(1.0, 0.0);
        Ok(Self { n, amplitudes })
    }

    fn check_shape(n: usize, len: usize) -> Result<()> {
        if n == 0 || n > MAX_STATE_QUBITS {
            return Err(Error::OutOfRange(format!(
                "state qubit count {n} outside 1..={MAX_STATE_QUBITS}"
            )));
        }
        if len != 1 << n {
            return Err(Error::InvalidState(format!(
                "{len} amplitudes for {n} qubits, expected {}",
                1usize << n
            )));
        }
        Ok(())
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|a| a.norm_sqr()).sum()
    }

    /// `|psi><psi|`, limited to [`MAX_DENSITY_QUBITS`].
    pub fn to_density_matrix(&self) -> Result<DensityMatrix> {
        let all: Vec<usize> = (0..self.n).collect();
        self.reduced(&all)
    }

    /// Tensor product with `self` on the low qubits and `other` on the high ones.
    pub fn tensor(&self, other: &StateVector) -> Result<StateVector> {
        let n = self.n + other.n;
        Self::check_shape(n, 1 << n.min(MAX_STATE_QUBITS))?;
        let mut amplitudes = Vec::with_capacity(1 << n);
        for b in &other.amplitudes {
            for a in &self.amplitudes {
                amplitudes.push(a * b);
            }
        }
        Ok(StateVector { n, amplitudes })
    }

    pub fn to_file(&self) -> StateFile {
        StateFile {
            n: self.n,
            amplitudes: self.amplitudes.iter().map(|a| [a.re, a.im]).collect(),
        }
    }

    pub fn from_file(file: StateFile) -> Result<Self> {
        let amps = file
            .amplitudes
            .iter()
            .map(|&[re, im]| Complex64::new(re, im))
            .collect();
        Self::new(file.n, amps)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Self::from_file(serde_json::from_str(text)?)
    }

    pub fn read_json(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn write_json(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_json()?)?;
        Ok(())
    }
}

impl QuantumState for StateVector {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn expectation_unchecked(&self, p: &PauliString) -> f64 {
        // <psi|P|psi> = sum_i conj(psi[i ^ x]) phase(i) psi[i]
        let mut acc = Complex64::new(0.0, 0.0);
        for (i, amp) in self.amplitudes.iter().enumerate() {
            if amp.re == 0.0 && amp.im == 0.0 {
                continue;
            }
            let (j, phase) = p.act_on_basis(i);
            acc += self.amplitudes[j].conj() * phase * amp;
        }
        acc.re
    }

    fn reduced_unchecked(&self, sites: &[usize]) -> DensityMatrix {
        let k = sites.len();
        let dim = 1usize << k;
        let (kept, traced) = embeddings(sites, self.n);
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        let mut column = vec![Complex64::new(0.0, 0.0); dim];
        for &e in &traced {
            for (a, &ka) in kept.iter().enumerate() {
                column[a] = self.amplitudes[e | ka];
            }
            for a in 0..dim {
                if column[a] == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for b in 0..dim {
                    data[a * dim + b] += column[a] * column[b].conj();
                }
            }
        }
        DensityMatrix { n: k, data }
    }
}

/// On-disk state format: `{"n": int, "amplitudes": [[re, im], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct StateFile {
    pub n: usize,
    pub amplitudes: Vec<[f64; 2]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    /// Row-major `2^n x 2^n`.
    data: Vec<Complex64>,
}

impl DensityMatrix {
    /// Validates trace, Hermiticity (both within [`NORM_TOLERANCE`]) and
    /// positivity up to [`PSD_SLACK`].
    pub fn new(n: usize, data: Vec<Complex64>) -> Result<Self> {
        if n == 0 || n > MAX_DENSITY_QUBITS {
            return Err(Error::OutOfRange(format!(
                "density matrix on {n} qubits outside 1..={MAX_DENSITY_QUBITS}"
            )));
        }
        let dim = 1usize << n;
        if data.len() != dim * dim {
            return Err(Error::InvalidState(format!(
                "{} entries for a {dim}x{dim} matrix",
                data.len()
            )));
        }
        let trace: Complex64 = (0..dim).map(|i| data[i * dim + i]).sum();
        if (trace.re - 1.0).abs() > NORM_TOLERANCE || trace.im.abs() > NORM_TOLERANCE {
            return Err(Error::InvalidState(format!("trace {trace} differs from 1")));
        }
        for i in 0..dim {
            for j in i..dim {
                if (data[i * dim + j] - data[j * dim + i].conj()).norm() > NORM_TOLERANCE {
                    return Err(Error::InvalidState(format!("not Hermitian at ({i}, {j})")));
                }
            }
        }
        let matrix = DMatrix::from_fn(dim, dim, |i, j| data[i * dim + j]);
        let min_eigenvalue = matrix.symmetric_eigenvalues().min();
        if min_eigenvalue < -PSD_SLACK {
            return Err(Error::InvalidState(format!(
                "minimum eigenvalue {min_eigenvalue} below -{PSD_SLACK}"
            )));
        }
        Ok(Self { n, data })
    }

    /// Convex combination `sum_i w_i rho_i`; weights must be nonnegative and sum to 1.
    pub fn mixture(parts: &[(f64, &DensityMatrix)]) -> Result<Self> {
        let (_, first) = parts.first().ok_or(Error::Empty("mixture components"))?;
        let mut data = vec![Complex64::new(0.0, 0.0); first.data.len()];
        for (w, rho) in parts {
            if rho.n != first.n {
                return Err(Error::QubitMismatch {
                    expected: first.n,
                    actual: rho.n,
                });
            }
            if *w < 0.0 {
                return Err(Error::OutOfRange(format!("negative weight {w}")));
            }
            for (d, r) in data.iter_mut().zip(&rho.data) {
                *d += r * *w;
            }
        }
        Self::new(first.n, data)
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.entry(i, i)).sum()
    }
}

impl QuantumState for DensityMatrix {
    fn n_qubits(&self) -> usize {
        self.n
    }

    fn expectation_unchecked(&self, p: &PauliString) -> f64 {
        // Tr[rho P] = sum_i rho[i ^ x, i] phase(i)
        let dim = self.dim();
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            let (j, phase) = p.act_on_basis(i);
            acc += self.data[i * dim + j] * phase;
        }
        acc.re
    }

    fn reduced_unchecked(&self, sites: &[usize]) -> DensityMatrix {
        let dim = 1usize << sites.len();
        let full = self.dim();
        let (kept, traced) = embeddings(sites, self.n);
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for a in 0..dim {
            for b in 0..dim {
                data[a * dim + b] = traced
                    .iter()
                    .map(|&e| self.data[(e | kept[a]) * full + (e | kept[b])])
                    .sum();
            }
        }
        DensityMatrix {
            n: sites.len(),
            data,
        }
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in 0..self.dim() {
            for col in 0..self.dim() {
                let v = self.entry(row, col);
                write!(f, "{:>10.6}{:+.6}i ", v.re, v.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// Sparse correlation tensor. Keys are index tuples over `{0, x=1, y=2, z=3}`,
/// one per qubit.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorrelationTensor {
    n_qubits: usize,
    entries: BTreeMap<Vec<u8>, f64>,
}

impl CorrelationTensor {
    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn get(&self, index: &[u8]) -> Option<f64> {
        self.entries.get(index).copied()
    }

    /// Looks an entry up by its Pauli label, e.g. `"XYI"`.
    pub fn get_label(&self, label: &str) -> Option<f64> {
        let p: PauliString = label.parse().ok()?;
        self.get(&tensor_index(&p))
    }

    pub fn entries(&self) -> &BTreeMap<Vec<u8>, f64> {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn squared_sum(&self) -> f64 {
        self.entries.values().map(|v| v * v).sum()
    }

    /// Entries with `|T| > tolerance`, in index order.
    pub fn nonzero(&self, tolerance: f64) -> impl Iterator<Item = (&Vec<u8>, f64)> {
        self.entries
            .iter()
            .filter(move |(_, v)| v.abs() > tolerance)
            .map(|(k, v)| (k, *v))
    }
}

pub fn tensor_index(p: &PauliString) -> Vec<u8> {
    p.paulis().into_iter().map(Pauli::index).collect()
}

/// Renders an index tuple as `"x y 0"`-style text.
pub fn index_label(index: &[u8]) -> String {
    index
        .iter()
        .map(|mu| match mu {
            0 => '0',
            1 => 'x',
            2 => 'y',
            _ => 'z',
        })
        .collect()
}

/// Parses axis text such as `"xy"` or `"xyz"`.
pub fn parse_axes(text: &str) -> Result<Vec<Pauli>> {
    let mut axes = Vec::new();
    for c in text.trim().chars() {
        let p = match c.to_ascii_lowercase() {
            'x' => Pauli::X,
            'y' => Pauli::Y,
            'z' => Pauli::Z,
            _ => return Err(Error::Parse(format!("invalid axis {c:?} in {text:?}"))),
        };
        if axes.contains(&p) {
            return Err(Error::Duplicate(format!("axis {c}")));
        }
        axes.push(p);
    }
    if axes.is_empty() {
        return Err(Error::Empty("axis list"));
    }
    Ok(axes)
}

pub fn expectation<S: QuantumState + ?Sized>(state: &S, p: &PauliString) -> Result<f64> {
    state.expectation(p)
}

/// All components with an axis from `axes` on every site in `sites` and the
/// identity elsewhere.
pub fn correlation_components<S: QuantumState + ?Sized>(
    state: &S,
    sites: &[usize],
    axes: &[Pauli],
) -> Result<CorrelationTensor> {
    let n = state.n_qubits();
    validate_sites(sites, n)?;
    if axes.is_empty() {
        return Err(Error::Empty("axis list"));
    }
    if axes.contains(&Pauli::I) {
        return Err(Error::Parse("identity is not a local axis".into()));
    }
    let count = axes.len().pow(sites.len() as u32);
    let mut entries = BTreeMap::new();
    for mut code in 0..count {
        let mut p = PauliString::identity(n)?;
        for &site in sites.iter().rev() {
            p = p.with(site, axes[code % axes.len()]);
            code /= axes.len();
        }
        entries.insert(tensor_index(&p), state.expectation_unchecked(&p));
    }
    Ok(CorrelationTensor {
        n_qubits: n,
        entries,
    })
}

/// Euclidean norm of the expectation vector of a mutually anticommuting set.
/// Bounded by one in every state.
pub fn complementarity_norm<S: QuantumState + ?Sized>(
    state: &S,
    set: &AnticommutingSet,
) -> Result<f64> {
    if set.n_qubits() != state.n_qubits() {
        return Err(Error::QubitMismatch {
            expected: state.n_qubits(),
            actual: set.n_qubits(),
        });
    }
    // AnticommutingSet is validated on construction; recheck in case of
    // future deserialization paths.
    if let Some((a, b)) = crate::pauli::is_mutually_anticommuting(set.elements())? {
        return Err(Error::NotAnticommuting {
            first: a.to_string(),
            second: b.to_string(),
        });
    }
    Ok(set
        .elements()
        .iter()
        .map(|p| state.expectation_unchecked(p).powi(2))
        .sum::<f64>()
        .sqrt())
}

/// Tsallis-2 entropy of a dichotomic observable, `(1 - <A>^2) / 2`.
pub fn tsallis_2(expectation_value: f64) -> Result<f64> {
    if expectation_value.is_nan() || expectation_value.abs() > 1.0 + 1e-12 {
        return Err(Error::OutOfRange(format!(
            "expectation value {expectation_value} outside [-1, 1]"
        )));
    }
    Ok((1.0 - expectation_value * expectation_value) / 2.0)
}

/// Haar-random pure state from normalized complex Gaussian amplitudes.
pub fn random_pure_state(n_qubits: usize, seed: u64) -> Result<StateVector> {
    if !(1..=MAX_RANDOM_QUBITS).contains(&n_qubits) {
        return Err(Error::OutOfRange(format!(
            "random state qubit count {n_qubits} outside 1..={MAX_RANDOM_QUBITS}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1usize << n_qubits)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    StateVector::normalized(n_qubits, amps)
}

/// Dense `3^k` array of full correlations `T_{j_1..j_k}`, `j in {x, y, z}`,
/// on a party subset. Digit `r` (party `r` of the subset) is the `r`-th most
/// significant base-3 digit of the flat index.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalCorrelations {
    parties: usize,
    values: Vec<f64>,
}

impl LocalCorrelations {
    pub fn from_state<S: QuantumState + ?Sized>(state: &S, sites: &[usize]) -> Result<Self> {
        let reduced = state.reduced(sites)?;
        let k = sites.len();
        let count = 3usize.pow(k as u32);
        let axes = [Pauli::X, Pauli::Y, Pauli::Z];
        let values = (0..count)
            .map(|flat| {
                let mut p = PauliString::identity(k).expect("k >= 1");
                let mut code = flat;
                for r in (0..k).rev() {
                    p = p.with(r, axes[code % 3]);
                    code /= 3;
                }
                reduced.expectation_unchecked(&p)
            })
            .collect();
        Ok(Self { parties: k, values })
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Contracts every party with one direction, giving `sum_j T_j prod_r d_r[j_r]`.
    pub fn contract(&self, directions: &[[f64; 3]]) -> f64 {
        assert_eq!(directions.len(), self.parties);
        let mut layer = self.values.clone();
        for d in directions.iter().rev() {
            layer = layer
                .chunks_exact(3)
                .map(|c| c[0] * d[0] + c[1] * d[1] + c[2] * d[2])
                .collect();
        }
        layer[0]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ghz3() -> StateVector {
        let mut a = vec![c(0.0, 0.0); 8];
        a[0] = c(FRAC_1_SQRT_2, 0.0);
        a[7] = c(FRAC_1_SQRT_2, 0.0);
        StateVector::new(3, a).unwrap()
    }

    fn label(s: &str) -> PauliString {
        s.parse().unwrap()
    }

    #[test]
    fn eigenstate_expectations() {
        let zero = StateVector::basis(1, 0).unwrap();
        assert_eq!(zero.expectation(&label("Z")).unwrap(), 1.0);
        assert_eq!(zero.expectation(&label("X")).unwrap(), 0.0);
        let one = StateVector::basis(1, 1).unwrap();
        assert_eq!(one.expectation(&label("Z")).unwrap(), -1.0);
        assert!(zero.expectation(&label("ZZ")).is_err());
    }

    #[test]
    fn ghz_expectations() {
        let g = ghz3();
        assert!((g.expectation(&label("XXX")).unwrap() - 1.0).abs() < 1e-12);
        assert!((g.expectation(&label("XYY")).unwrap() + 1.0).abs() < 1e-12);
        assert!(g.expectation(&label("YYY")).unwrap().abs() < 1e-12);
        assert!((g.expectation(&label("ZZI")).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn state_validation() {
        assert!(StateVector::new(1, vec![c(1.0, 0.0), c(1.0, 0.0)]).is_err());
        assert!(StateVector::new(2, vec![c(1.0, 0.0), c(0.0, 0.0)]).is_err());
        assert!(StateVector::normalized(1, vec![c(0.0, 0.0); 2]).is_err());
        let s = StateVector::normalized(1, vec![c(3.0, 0.0), c(0.0, 4.0)]).unwrap();
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn density_matrix_validation() {
        let rho = ghz3().to_density_matrix().unwrap();
        assert!((rho.trace().re - 1.0).abs() < 1e-12);
        // diag(1.5, -0.5) has unit trace but is not positive
        let bad = vec![c(1.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.5, 0.0)];
        assert!(DensityMatrix::new(1, bad).is_err());
        let non_herm = vec![c(0.5, 0.0), c(0.1, 0.0), c(0.2, 0.0), c(0.5, 0.0)];
        assert!(DensityMatrix::new(1, non_herm).is_err());
        let bad_trace = vec![c(0.5, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.6, 0.0)];
        assert!(DensityMatrix::new(1, bad_trace).is_err());
    }

    #[test]
    fn partial_trace_of_ghz() {
        let rho = ghz3().reduced(&[0, 2]).unwrap();
        assert!((rho.entry(0, 0).re - 0.5).abs() < 1e-12);
        assert!((rho.entry(3, 3).re - 0.5).abs() < 1e-12);
        assert!(rho.entry(0, 3).norm() < 1e-12);
        assert!((rho.expectation(&label("ZZ")).unwrap() - 1.0).abs() < 1e-12);
        assert!(rho.expectation(&label("XX")).unwrap().abs() < 1e-12);
        assert!(ghz3().reduced(&[0, 0]).is_err());
        assert!(ghz3().reduced(&[3]).is_err());
    }

    #[test]
    fn correlation_components_of_ghz() {
        let t = correlation_components(&ghz3(), &[0, 1, 2], &[Pauli::X, Pauli::Y]).unwrap();
        assert_eq!(t.len(), 8);
        assert!((t.get_label("XXX").unwrap() - 1.0).abs() < 1e-12);
        for l in ["XYY", "YXY", "YYX"] {
            assert!((t.get_label(l).unwrap() + 1.0).abs() < 1e-12, "{l}");
        }
        for l in ["XXY", "XYX", "YXX", "YYY"] {
            assert!(t.get_label(l).unwrap().abs() < 1e-12, "{l}");
        }
        assert_eq!(t.nonzero(1e-9).count(), 4);
    }

    #[test]
    fn product_state_has_no_planar_correlations() {
        let zero = StateVector::basis(2, 0).unwrap();
        let t = correlation_components(&zero, &[0, 1], &[Pauli::X, Pauli::Y]).unwrap();
        assert_eq!(t.len(), 4);
        assert_eq!(t.nonzero(1e-12).count(), 0);
        assert!(correlation_components(&zero, &[], &[Pauli::X]).is_err());
    }

    #[test]
    fn complementarity_examples() {
        let xyz = AnticommutingSet::parse(&["X", "Y", "Z"]).unwrap();
        let zero = StateVector::basis(1, 0).unwrap();
        assert!((complementarity_norm(&zero, &xyz).unwrap() - 1.0).abs() < 1e-12);
        let plus = StateVector::new(1, vec![c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)]).unwrap();
        assert!((complementarity_norm(&plus, &xyz).unwrap() - 1.0).abs() < 1e-12);
        let tri = AnticommutingSet::parse(&["XXI", "XYI", "YIX", "YIY"]).unwrap();
        assert!(complementarity_norm(&ghz3(), &tri).unwrap() <= 1.0 + 1e-9);
        assert!(complementarity_norm(&zero, &tri).is_err());
    }

    #[test]
    fn tsallis_examples() {
        assert_eq!(tsallis_2(1.0).unwrap(), 0.0);
        assert_eq!(tsallis_2(0.0).unwrap(), 0.5);
        assert!((tsallis_2(0.6).unwrap() - 0.32).abs() < 1e-15);
        assert!(tsallis_2(1.5).is_err());
        assert!(tsallis_2(f64::NAN).is_err());
    }

    #[test]
    fn random_states_are_reproducible_and_normalized() {
        let a = random_pure_state(1, 7).unwrap();
        let b = random_pure_state(1, 7).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.amplitudes().len(), 2);
        for seed in 0..20 {
            let s = random_pure_state(3, seed).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
        }
        assert!(random_pure_state(0, 1).is_err());
        assert!(random_pure_state(15, 1).is_err());
    }

    #[test]
    fn haar_mean_of_z_vanishes() {
        let z = label("Z");
        let mean: f64 = (0..10_000u64)
            .map(|seed| random_pure_state(1, seed).unwrap().expectation(&z).unwrap())
            .sum::<f64>()
            / 10_000.0;
        assert!(mean.abs() < 0.05, "mean {mean}");
    }

    #[test]
    fn json_round_trip() {
        let g = ghz3();
        let back = StateVector::from_json(&g.to_json().unwrap()).unwrap();
        assert_eq!(g, back);
        assert!(StateVector::from_json(r#"{"n":1,"amplitudes":[[1,0],[1,0]]}"#).is_err());
        assert!(StateVector::from_json(r#"{"n":1,"amplitudes":[[1,0]]}"#).is_err());
    }

    #[test]
    fn local_correlations_contract_like_pauli_expectations() {
        let s = random_pure_state(3, 11).unwrap();
        let lc = LocalCorrelations::from_state(&s, &[2, 0]).unwrap();
        // T_{y on qubit 2, z on qubit 0}
        let direct = s.expectation(&label("ZIY")).unwrap();
        let contracted = lc.contract(&[[0.0, 1.0, 0.0], [0.0, 0.0, 1.0]]);
        assert!((direct - contracted).abs() < 1e-12);
        let theta = PI / 5.0;
        let d = [theta.cos(), theta.sin(), 0.0];
        let mixed = lc.contract(&[d, [1.0, 0.0, 0.0]]);
        let expected = theta.cos() * s.expectation(&label("XIX")).unwrap()
            + theta.sin() * s.expectation(&label("XIY")).unwrap();
        assert!((mixed - expected).abs() < 1e-12);
    }

    #[test]
    fn mixture_is_linear() {
        let a = random_pure_state(2, 1)
            .unwrap()
            .to_density_matrix()
            .unwrap();
        let b = random_pure_state(2, 2)
            .unwrap()
            .to_density_matrix()
            .unwrap();
        let m = DensityMatrix::mixture(&[(0.3, &a), (0.7, &b)]).unwrap();
        let p = label("XY");
        let lhs = m.expectation(&p).unwrap();
        let rhs = 0.3 * a.expectation(&p).unwrap() + 0.7 * b.expectation(&p).unwrap();
        assert!((lhs - rhs).abs() < 1e-12);
    }
}
