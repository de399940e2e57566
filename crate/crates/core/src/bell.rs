//! Two-setting correlation Bell functionals.
//!
//! Every party measures one of two dichotomic observables `a_k . sigma`,
//! `k in {1, 2}`. A [`CorrelationTable`] holds the `2^N` full correlation
//! functions `E_{k_1..k_N}` and the functionals here map it to a number:
//!
//! * the general functional `L`, the sum-of-absolute-values form that
//!   condenses the complete two-setting family into one expression with
//!   local-realistic bound 1;
//! * the three-party Mermin expression `E_112 + E_121 + E_211 - E_222`,
//!   local-realistic bound 2.

use std::collections::BTreeMap;
use std::fmt;

use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::qstate::{validate_sites, LocalCorrelations, QuantumState};
use crate::search::{self, Experiment, Score, SearchProblem};

pub const UNIT_TOLERANCE: f64 = 1e-10;
pub const TABLE_TOLERANCE: f64 = 1e-9;
pub const VIOLATION_MARGIN: f64 = 1e-9;
pub const MAX_LHV_PARTIES: usize = 5;

/// A unit vector on the Bloch sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Direction([f64; 3]);

impl Direction {
    pub const X: Direction = Direction([1.0, 0.0, 0.0]);
    pub const Y: Direction = Direction([0.0, 1.0, 0.0]);
    pub const Z: Direction = Direction([0.0, 0.0, 1.0]);

    pub fn new(v: [f64; 3]) -> Result<Self> {
        let norm = dot(&v, &v).sqrt();
        if (norm - 1.0).abs() > UNIT_TOLERANCE {
            return Err(Error::OutOfRange(format!(
                "direction {v:?} has norm {norm}"
            )));
        }
        Ok(Self(v))
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalize(v: [f64; 3]) -> Result<Self> {
        let norm = dot(&v, &v).sqrt();
        if norm.is_nan() || norm <= 1e-300 || norm.is_infinite() {
            return Err(Error::OutOfRange(format!("cannot normalize {v:?}")));
        }
        Ok(Self([v[0] / norm, v[1] / norm, v[2] / norm]))
    }

    /// Polar angle `theta` from +z, azimuth `phi` from +x.
    pub fn from_angles(theta: f64, phi: f64) -> Self {
        Self([
            theta.sin() * phi.cos(),
            theta.sin() * phi.sin(),
            theta.cos(),
        ])
    }

    /// In-plane direction `cos(angle) e1 + sin(angle) e2`.
    pub fn in_plane(plane: &Plane, angle: f64) -> Self {
        let (c, s) = (angle.cos(), angle.sin());
        let (a, b) = (plane.e1.0, plane.e2.0);
        Self([
            c * a[0] + s * b[0],
            c * a[1] + s * b[1],
            c * a[2] + s * b[2],
        ])
    }

    pub fn angles(&self) -> (f64, f64) {
        let [x, y, z] = self.0;
        (z.clamp(-1.0, 1.0).acos(), y.atan2(x))
    }

    pub fn vector(&self) -> [f64; 3] {
        self.0
    }

    pub fn rotate_z(&self, angle: f64) -> Self {
        let [x, y, z] = self.0;
        let (c, s) = (angle.cos(), angle.sin());
        Self([c * x - s * y, s * x + c * y, z])
    }

    pub fn dot(&self, other: &Direction) -> f64 {
        dot(&self.0, &other.0)
    }
}

impl Serialize for Direction {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let (theta, phi) = self.angles();
        [theta, phi].serialize(s)
    }
}

fn dot(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// An orthonormal pair spanning a party's measurement plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Plane {
    pub e1: Direction,
    pub e2: Direction,
}

impl Plane {
    pub const XY: Plane = Plane {
        e1: Direction::X,
        e2: Direction::Y,
    };

    pub fn new(e1: [f64; 3], e2: [f64; 3]) -> Result<Self> {
        let e1 = Direction::new(e1)?;
        let e2 = Direction::new(e2)?;
        if e1.dot(&e2).abs() > UNIT_TOLERANCE {
            return Err(Error::OutOfRange(format!(
                "plane vectors {:?} and {:?} are not orthogonal",
                e1.0, e2.0
            )));
        }
        Ok(Self { e1, e2 })
    }

    /// Plane through the two settings (Gram-Schmidt on `first`, `second`);
    /// parallel settings get an arbitrary orthogonal complement.
    pub fn spanned_by(first: &Direction, second: &Direction) -> Self {
        let e1 = *first;
        let proj = e1.dot(second);
        let rest = [
            second.0[0] - proj * e1.0[0],
            second.0[1] - proj * e1.0[1],
            second.0[2] - proj * e1.0[2],
        ];
        let e2 = if dot(&rest, &rest).sqrt() > 1e-9 {
            Direction::normalize(rest).expect("nonzero")
        } else {
            // any unit vector orthogonal to e1
            let helper = if e1.0[0].abs() < 0.9 {
                [1.0, 0.0, 0.0]
            } else {
                [0.0, 1.0, 0.0]
            };
            let h = helper;
            let p = dot(&h, &e1.0);
            Direction::normalize([h[0] - p * e1.0[0], h[1] - p * e1.0[1], h[2] - p * e1.0[2]])
                .expect("nonzero")
        };
        Self { e1, e2 }
    }

    pub fn rotate_z(&self, angle: f64) -> Self {
        Self {
            e1: self.e1.rotate_z(angle),
            e2: self.e2.rotate_z(angle),
        }
    }
}

/// The two measurement directions of one party.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SettingPair {
    pub first: Direction,
    pub second: Direction,
}

impl SettingPair {
    pub fn new(first: Direction, second: Direction) -> Self {
        Self { first, second }
    }

    pub fn canonical() -> Self {
        Self::new(Direction::X, Direction::Y)
    }

    pub fn plane(&self) -> Plane {
        Plane::spanned_by(&self.first, &self.second)
    }

    pub fn rotate_z(&self, angle: f64) -> Self {
        Self::new(self.first.rotate_z(angle), self.second.rotate_z(angle))
    }

    fn vectors(&self) -> [[f64; 3]; 2] {
        [self.first.0, self.second.0]
    }
}

/// Settings for an ordered list of parties.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PartySettings {
    pub parties: Vec<usize>,
    pub pairs: Vec<SettingPair>,
}

impl PartySettings {
    pub fn new(parties: Vec<usize>, pairs: Vec<SettingPair>) -> Result<Self> {
        if parties.len() != pairs.len() {
            return Err(Error::QubitMismatch {
                expected: parties.len(),
                actual: pairs.len(),
            });
        }
        Ok(Self { parties, pairs })
    }

    /// Same pair for every party.
    pub fn uniform(parties: &[usize], pair: SettingPair) -> Self {
        Self {
            parties: parties.to_vec(),
            pairs: vec![pair; parties.len()],
        }
    }

    pub fn pair_for(&self, party: usize) -> Option<&SettingPair> {
        self.parties
            .iter()
            .position(|&p| p == party)
            .map(|i| &self.pairs[i])
    }
}

/// `E_{k_1..k_N}` for `k_i in {1, 2}`, flat in lexicographic `k` order
/// (party 0 most significant; bit set means setting 2).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationTable {
    parties: usize,
    values: Vec<f64>,
}

impl CorrelationTable {
    pub fn new(parties: usize, values: Vec<f64>) -> Result<Self> {
        if parties == 0 || parties > 16 {
            return Err(Error::OutOfRange(format!("{parties} parties")));
        }
        if values.len() != 1 << parties {
            return Err(Error::OutOfRange(format!(
                "{} entries for {parties} parties",
                values.len()
            )));
        }
        if let Some(v) = values
            .iter()
            .find(|v| v.is_nan() || v.abs() > 1.0 + TABLE_TOLERANCE)
        {
            return Err(Error::OutOfRange(format!(
                "correlation {v} outside [-1, 1]"
            )));
        }
        Ok(Self { parties, values })
    }

    pub fn zeros(parties: usize) -> Result<Self> {
        Self::new(parties, vec![0.0; 1 << parties])
    }

    /// Table of a deterministic local strategy: `E_k = prod_i outcomes[i][k_i - 1]`.
    pub fn deterministic(outcomes: &[[i8; 2]]) -> Result<Self> {
        let n = outcomes.len();
        let values = (0..1usize << n)
            .map(|k| {
                (0..n)
                    .map(|i| outcomes[i][(k >> (n - 1 - i)) & 1] as f64)
                    .product()
            })
            .collect();
        Self::new(n, values)
    }

    pub fn parties(&self) -> usize {
        self.parties
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// `E_k` for a tuple like `[1, 2, 2]`.
    pub fn get(&self, k: &[u8]) -> Option<f64> {
        table_index(k, self.parties).map(|i| self.values[i])
    }
}

/// Flat index of a `k` tuple with entries in `{1, 2}`.
pub fn table_index(k: &[u8], parties: usize) -> Option<usize> {
    if k.len() != parties {
        return None;
    }
    k.iter().try_fold(0usize, |acc, &ki| match ki {
        1 => Some(acc << 1),
        2 => Some((acc << 1) | 1),
        _ => None,
    })
}

/// Contracts a dense local tensor with each party's two directions.
pub(crate) fn contract_table(local: &LocalCorrelations, pairs: &[[[f64; 3]; 2]]) -> Vec<f64> {
    let n = local.parties();
    debug_assert_eq!(pairs.len(), n);
    // layer shape: [3^remaining, 3, 2^done] -> [3^remaining, 2, 2^done]
    let mut layer = local.values().to_vec();
    let mut suffix = 1usize;
    for (r, pair) in pairs.iter().enumerate().rev() {
        let prefix = 3usize.pow(r as u32);
        let mut next = vec![0.0; prefix * 2 * suffix];
        for p in 0..prefix {
            for (k, d) in pair.iter().enumerate() {
                for s in 0..suffix {
                    let base = p * 3 * suffix + s;
                    next[(p * 2 + k) * suffix + s] = layer[base] * d[0]
                        + layer[base + suffix] * d[1]
                        + layer[base + 2 * suffix] * d[2];
                }
            }
        }
        layer = next;
        suffix *= 2;
    }
    layer
}

pub fn correlation_table<S: QuantumState + ?Sized>(
    state: &S,
    subset: &[usize],
    settings: &PartySettings,
) -> Result<CorrelationTable> {
    validate_sites(subset, state.n_qubits())?;
    let pairs = subset
        .iter()
        .map(|p| {
            settings
                .pair_for(*p)
                .map(SettingPair::vectors)
                .ok_or_else(|| Error::OutOfRange(format!("no settings for party {p}")))
        })
        .collect::<Result<Vec<_>>>()?;
    let local = LocalCorrelations::from_state(state, subset)?;
    CorrelationTable::new(subset.len(), contract_table(&local, &pairs))
}

/// In-place unnormalized Walsh-Hadamard transform.
pub(crate) fn walsh_hadamard(values: &mut [f64]) {
    let n = values.len();
    let mut h = 1;
    while h < n {
        for block in (0..n).step_by(2 * h) {
            for i in block..block + h {
                let (a, b) = (values[i], values[i + h]);
                values[i] = a + b;
                values[i + h] = a - b;
            }
        }
        h *= 2;
    }
}

/// `L(E) = 2^-N sum_s | sum_k prod_i s_i^(k_i - 1) E_k |`.
pub fn general_bell_value(table: &CorrelationTable) -> f64 {
    general_value_raw(&table.values)
}

pub(crate) fn general_value_raw(values: &[f64]) -> f64 {
    let mut s = values.to_vec();
    walsh_hadamard(&mut s);
    s.iter().map(|v| v.abs()).sum::<f64>() / values.len() as f64
}

pub const MERMIN_TERMS: [(usize, f64); 4] =
    [(0b001, 1.0), (0b010, 1.0), (0b100, 1.0), (0b111, -1.0)];

/// `E_112 + E_121 + E_211 - E_222`.
pub fn mermin_value(table: &CorrelationTable) -> Result<f64> {
    if table.parties != 3 {
        return Err(Error::OutOfRange(format!(
            "Mermin expression needs 3 parties, got {}",
            table.parties
        )));
    }
    Ok(mermin_value_raw(&table.values))
}

pub(crate) fn mermin_value_raw(values: &[f64]) -> f64 {
    MERMIN_TERMS.iter().map(|&(i, c)| c * values[i]).sum()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Functional {
    General,
    Mermin,
}

impl Functional {
    pub fn classical_bound(self) -> f64 {
        match self {
            Functional::General => 1.0,
            Functional::Mermin => 2.0,
        }
    }

    pub fn evaluate(self, table: &CorrelationTable) -> Result<f64> {
        match self {
            Functional::General => Ok(general_bell_value(table)),
            Functional::Mermin => mermin_value(table),
        }
    }

    pub(crate) fn check_parties(self, parties: usize) -> Result<()> {
        if self == Functional::Mermin && parties != 3 {
            return Err(Error::OutOfRange(format!(
                "Mermin expression needs 3 parties, got {parties}"
            )));
        }
        Ok(())
    }
}

impl std::str::FromStr for Functional {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "general" | "l" => Ok(Functional::General),
            "mermin" | "m" => Ok(Functional::Mermin),
            other => Err(Error::Parse(format!("unknown functional {other:?}"))),
        }
    }
}

impl fmt::Display for Functional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Functional::General => "general",
            Functional::Mermin => "mermin",
        })
    }
}

/// Square root of the summed squares of the full correlations with every
/// party's index restricted to its plane; upper-bounds `L` at any settings
/// lying in those planes.
pub fn eq3_upper_bound<S: QuantumState + ?Sized>(
    state: &S,
    subset: &[usize],
    planes: &[Plane],
) -> Result<f64> {
    validate_sites(subset, state.n_qubits())?;
    if planes.len() != subset.len() {
        return Err(Error::QubitMismatch {
            expected: subset.len(),
            actual: planes.len(),
        });
    }
    for p in planes {
        Plane::new(p.e1.0, p.e2.0)?;
    }
    let local = LocalCorrelations::from_state(state, subset)?;
    let pairs: Vec<_> = planes.iter().map(|p| [p.e1.0, p.e2.0]).collect();
    let rotated = contract_table(&local, &pairs);
    Ok(rotated.iter().map(|t| t * t).sum::<f64>().sqrt())
}

/// Exact local-realistic maximum of `sum_k c_k prod_i sigma_i(k_i)` over all
/// `2^(2N)` deterministic strategies.
pub fn lhv_bound_bruteforce(coefficients: &BTreeMap<Vec<u8>, f64>, parties: usize) -> Result<f64> {
    if parties == 0 || parties > MAX_LHV_PARTIES {
        return Err(Error::OutOfRange(format!(
            "enumeration supports 1..={MAX_LHV_PARTIES} parties, got {parties}"
        )));
    }
    let mut dense = vec![0.0; 1 << parties];
    for (k, c) in coefficients {
        let i = table_index(k, parties).ok_or_else(|| {
            Error::Parse(format!("bad setting tuple {k:?} for {parties} parties"))
        })?;
        dense[i] += c;
    }
    Ok(lhv_bound_dense(&dense, parties))
}

pub(crate) fn lhv_bound_dense(dense: &[f64], parties: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for strategy in 0u32..1 << (2 * parties) {
        // bit 2i: party i outcome for setting 1, bit 2i+1: for setting 2
        let total: f64 = dense
            .iter()
            .enumerate()
            .map(|(k, &c)| {
                let mut sign = 1.0;
                for i in 0..parties {
                    let setting = (k >> (parties - 1 - i)) & 1;
                    if (strategy >> (2 * i + setting)) & 1 == 1 {
                        sign = -sign;
                    }
                }
                c * sign
            })
            .sum();
        if total > best {
            best = total;
        }
    }
    best
}

pub fn chsh_coefficients() -> BTreeMap<Vec<u8>, f64> {
    BTreeMap::from([
        (vec![1, 1], 1.0),
        (vec![1, 2], 1.0),
        (vec![2, 1], 1.0),
        (vec![2, 2], -1.0),
    ])
}

pub fn mermin_coefficients() -> BTreeMap<Vec<u8>, f64> {
    BTreeMap::from([
        (vec![1, 1, 2], 1.0),
        (vec![1, 2, 1], 1.0),
        (vec![2, 1, 1], 1.0),
        (vec![2, 2, 2], -1.0),
    ])
}

/// Coefficients of the member of the two-setting family selected by the sign
/// function `signs` (one entry per `s in {+-1}^N`, bit set = `-1`):
/// `c_k = 2^-N sum_s signs(s) prod_i s_i^(k_i - 1)`.
pub fn family_coefficients(signs: &[f64]) -> Vec<f64> {
    let mut c = signs.to_vec();
    walsh_hadamard(&mut c);
    let scale = signs.len() as f64;
    c.iter_mut().for_each(|v| *v /= scale);
    c
}

/// Optimization effort for settings searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Budget {
    /// Points per spherical angle in the per-direction coarse grid.
    pub grid_resolution: usize,
    /// Grid-then-ascent rounds per start.
    pub refinement_passes: usize,
    /// Random starts in addition to the canonical one.
    pub restarts: usize,
    pub seed: u64,
    /// Cap on block-ascent sweeps per refinement round.
    pub max_sweeps: usize,
}

impl Default for Budget {
    fn default() -> Self {
        Self {
            grid_resolution: 24,
            refinement_passes: 3,
            restarts: 4,
            seed: 0,
            max_sweeps: 2000,
        }
    }
}

impl Budget {
    /// Cheaper budget for bulk random-state sampling.
    pub fn sampling() -> Self {
        Self {
            grid_resolution: 8,
            refinement_passes: 1,
            restarts: 1,
            seed: 0,
            max_sweeps: 300,
        }
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.grid_resolution < 2 || self.refinement_passes == 0 || self.max_sweeps == 0 {
            return Err(Error::OutOfRange(format!(
                "budget too small: grid {} passes {} sweeps {}",
                self.grid_resolution, self.refinement_passes, self.max_sweeps
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BellValueReport {
    pub functional: Functional,
    pub value: f64,
    pub settings: PartySettings,
    pub classical_bound: f64,
    pub violated: bool,
}

impl BellValueReport {
    pub fn new(functional: Functional, value: f64, settings: PartySettings) -> Self {
        let classical_bound = functional.classical_bound();
        Self {
            functional,
            value,
            settings,
            classical_bound,
            violated: value > classical_bound + VIOLATION_MARGIN,
        }
    }
}

impl Serialize for BellValueReport {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        #[derive(Serialize)]
        struct AngleSettings {
            party: usize,
            first: Direction,
            second: Direction,
        }
        let settings: Vec<_> = self
            .settings
            .parties
            .iter()
            .zip(&self.settings.pairs)
            .map(|(&party, pair)| AngleSettings {
                party,
                first: pair.first,
                second: pair.second,
            })
            .collect();
        let mut st = s.serialize_struct("BellValueReport", 5)?;
        st.serialize_field("functional", &self.functional)?;
        st.serialize_field("value", &self.value)?;
        st.serialize_field("classical_bound", &self.classical_bound)?;
        st.serialize_field("violated", &self.violated)?;
        st.serialize_field("settings", &settings)?;
        st.end()
    }
}

/// Numerical quantum value of `functional` on `subset`: a lower bound on the
/// true maximum over all settings.
pub fn maximize_bell<S: QuantumState + ?Sized>(
    state: &S,
    subset: &[usize],
    functional: Functional,
    budget: &Budget,
) -> Result<BellValueReport> {
    budget.validate()?;
    validate_sites(subset, state.n_qubits())?;
    functional.check_parties(subset.len())?;
    let local = LocalCorrelations::from_state(state, subset)?;
    let score = match functional {
        Functional::General => Score::General,
        Functional::Mermin => Score::Mermin,
    };
    let problem = SearchProblem::new(
        subset.len(),
        vec![Experiment::new((0..subset.len()).collect(), local)],
        score,
    );
    let result = search::maximize(&problem, budget);
    let pairs = result
        .settings
        .iter()
        .map(|[a, b]| SettingPair::new(Direction(*a), Direction(*b)))
        .collect();
    let settings = PartySettings::new(subset.to_vec(), pairs)?;
    Ok(BellValueReport::new(
        functional,
        result.per_experiment[0],
        settings,
    ))
}
