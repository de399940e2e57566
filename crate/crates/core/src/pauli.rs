//! Tensor products of single-qubit Pauli operators in symplectic bitmask form.
//!
//! A string on `n` qubits is stored as two `u64` masks. Qubit `q` carries
//! `X` when only bit `q` of `x` is set, `Z` when only bit `q` of `z` is set,
//! `Y` when both are set and the identity otherwise. The leftmost character of
//! a label is qubit 0. No global phase is tracked; products of strings are
//! not supported.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::error::{Error, Result};

pub const MAX_QUBITS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn from_char(c: char) -> Option<Self> {
        match c {
            'I' => Some(Pauli::I),
            'X' => Some(Pauli::X),
            'Y' => Some(Pauli::Y),
            'Z' => Some(Pauli::Z),
            _ => None,
        }
    }

    pub fn as_char(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }

    /// Correlation-tensor index: 0 for identity, 1..=3 for x, y, z.
    pub fn index(self) -> u8 {
        match self {
            Pauli::I => 0,
            Pauli::X => 1,
            Pauli::Y => 2,
            Pauli::Z => 3,
        }
    }

    pub fn from_index(mu: u8) -> Option<Self> {
        match mu {
            0 => Some(Pauli::I),
            1 => Some(Pauli::X),
            2 => Some(Pauli::Y),
            3 => Some(Pauli::Z),
            _ => None,
        }
    }

    fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PauliString {
    n: usize,
    x: u64,
    z: u64,
}

fn check_width(n: usize) -> Result<()> {
    if n == 0 || n > MAX_QUBITS {
        return Err(Error::OutOfRange(format!(
            "qubit count {n} outside 1..={MAX_QUBITS}"
        )));
    }
    Ok(())
}

fn width_mask(n: usize) -> u64 {
    if n == 64 {
        u64::MAX
    } else {
        (1u64 << n) - 1
    }
}

impl PauliString {
    pub fn identity(n: usize) -> Result<Self> {
        check_width(n)?;
        Ok(Self { n, x: 0, z: 0 })
    }

    pub fn from_masks(n: usize, x: u64, z: u64) -> Result<Self> {
        check_width(n)?;
        let mask = width_mask(n);
        if x & !mask != 0 || z & !mask != 0 {
            return Err(Error::OutOfRange(format!(
                "bitmask has bits beyond qubit {}",
                n - 1
            )));
        }
        Ok(Self { n, x, z })
    }

    pub fn from_paulis(paulis: &[Pauli]) -> Result<Self> {
        check_width(paulis.len())?;
        let mut s = Self {
            n: paulis.len(),
            x: 0,
            z: 0,
        };
        for (q, &p) in paulis.iter().enumerate() {
            s = s.with(q, p);
        }
        Ok(s)
    }

    /// Identity everywhere except the listed `(site, pauli)` pairs.
    pub fn from_sites(n: usize, sites: &[(usize, Pauli)]) -> Result<Self> {
        let mut s = Self::identity(n)?;
        for &(q, p) in sites {
            if q >= n {
                return Err(Error::OutOfRange(format!("site {q} on {n} qubits")));
            }
            s = s.with(q, p);
        }
        Ok(s)
    }

    pub fn n_qubits(&self) -> usize {
        self.n
    }

    pub fn x_mask(&self) -> u64 {
        self.x
    }

    pub fn z_mask(&self) -> u64 {
        self.z
    }

    pub fn get(&self, q: usize) -> Pauli {
        assert!(q < self.n, "qubit {q} out of range");
        match ((self.x >> q) & 1 == 1, (self.z >> q) & 1 == 1) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Copy of `self` with qubit `q` replaced by `p`.
    #[must_use]
    pub fn with(mut self, q: usize, p: Pauli) -> Self {
        assert!(q < self.n, "qubit {q} out of range");
        let bit = 1u64 << q;
        let (xb, zb) = p.bits();
        self.x = if xb { self.x | bit } else { self.x & !bit };
        self.z = if zb { self.z | bit } else { self.z & !bit };
        self
    }

    pub fn paulis(&self) -> Vec<Pauli> {
        (0..self.n).map(|q| self.get(q)).collect()
    }

    pub fn support_mask(&self) -> u64 {
        self.x | self.z
    }

    pub fn support(&self) -> Vec<usize> {
        (0..self.n)
            .filter(|&q| (self.support_mask() >> q) & 1 == 1)
            .collect()
    }

    pub fn weight(&self) -> usize {
        self.support_mask().count_ones() as usize
    }

    pub fn is_identity(&self) -> bool {
        self.x == 0 && self.z == 0
    }

    /// Number of `Y` factors.
    pub fn y_count(&self) -> u32 {
        (self.x & self.z).count_ones()
    }

    /// Exchanges `X` and `Y` on every qubit; `I` and `Z` are unchanged.
    #[must_use]
    pub fn swap_xy(&self) -> Self {
        Self {
            n: self.n,
            x: self.x,
            z: self.z ^ self.x,
        }
    }

    /// Relabels qubits: the factor on qubit `q` moves to qubit `perm[q]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                actual: perm.len(),
            });
        }
        let mut out = Self::identity(self.n)?;
        let mut seen = 0u64;
        for (q, &target) in perm.iter().enumerate() {
            if target >= self.n || (seen >> target) & 1 == 1 {
                return Err(Error::OutOfRange(format!("{perm:?} is not a permutation")));
            }
            seen |= 1 << target;
            out = out.with(target, self.get(q));
        }
        Ok(out)
    }

    /// Image of computational basis state `index` under this operator:
    /// `P|i> = phase |i ^ x>` with `phase = i^{#Y} (-1)^{popcount(i & z)}`.
    pub fn act_on_basis(&self, index: usize) -> (usize, Complex64) {
        let flipped = index ^ self.x as usize;
        let sign_flips = (index as u64 & self.z).count_ones();
        let exponent = (self.y_count() + 2 * sign_flips) % 4;
        (flipped, I_POWERS[exponent as usize])
    }

    pub fn anticommutes(&self, other: &PauliString) -> Result<bool> {
        if self.n != other.n {
            return Err(Error::QubitMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        Ok(self.anticommutes_unchecked(other))
    }

    pub(crate) fn anticommutes_unchecked(&self, other: &PauliString) -> bool {
        ((self.x & other.z) ^ (self.z & other.x)).count_ones() % 2 == 1
    }
}

const I_POWERS: [Complex64; 4] = [
    Complex64::new(1.0, 0.0),
    Complex64::new(0.0, 1.0),
    Complex64::new(-1.0, 0.0),
    Complex64::new(0.0, -1.0),
];

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for q in 0..self.n {
            write!(f, "{}", self.get(q).as_char())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        parse_label(text)
    }
}

/// Lexicographic order on labels, qubit 0 first (`I < X < Y < Z`).
impl Ord for PauliString {
    fn cmp(&self, other: &Self) -> Ordering {
        for q in 0..self.n.min(other.n) {
            match self.get(q).cmp(&other.get(q)) {
                Ordering::Equal => continue,
                unequal => return unequal,
            }
        }
        self.n.cmp(&other.n)
    }
}

impl PartialOrd for PauliString {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl serde::Serialize for PauliString {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> serde::Deserialize<'de> for PauliString {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        parse_label(&text).map_err(serde::de::Error::custom)
    }
}

pub fn parse_label(text: &str) -> Result<PauliString> {
    let text = text.trim();
    if text.is_empty() {
        return Err(Error::InvalidLabel {
            label: text.to_string(),
            reason: "empty label".into(),
        });
    }
    let paulis = text
        .chars()
        .map(|c| {
            Pauli::from_char(c).ok_or_else(|| Error::InvalidLabel {
                label: text.to_string(),
                reason: format!("invalid character {c:?}"),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    if paulis.len() > MAX_QUBITS {
        return Err(Error::InvalidLabel {
            label: text.to_string(),
            reason: format!("more than {MAX_QUBITS} qubits"),
        });
    }
    PauliString::from_paulis(&paulis)
}

pub fn anticommutes(p: &PauliString, q: &PauliString) -> Result<bool> {
    p.anticommutes(q)
}

/// Checks every unordered pair. `Ok(None)` means all pairs anticommute,
/// otherwise the first offending pair in index order is returned.
pub fn is_mutually_anticommuting(
    elements: &[PauliString],
) -> Result<Option<(PauliString, PauliString)>> {
    let first = elements.first().ok_or(Error::Empty("operator set"))?;
    for e in elements {
        if e.n_qubits() != first.n_qubits() {
            return Err(Error::QubitMismatch {
                expected: first.n_qubits(),
                actual: e.n_qubits(),
            });
        }
    }
    for (i, a) in elements.iter().enumerate() {
        for b in &elements[i + 1..] {
            if !a.anticommutes_unchecked(b) {
                return Ok(Some((*a, *b)));
            }
        }
    }
    Ok(None)
}

/// A nonempty set of distinct, pairwise anticommuting, non-identity strings.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct AnticommutingSet {
    n_qubits: usize,
    elements: Vec<PauliString>,
}

impl AnticommutingSet {
    pub fn new(elements: Vec<PauliString>) -> Result<Self> {
        if let Some((a, b)) = is_mutually_anticommuting(&elements)? {
            // Two equal strings commute, so duplicates land here as well.
            if a == b {
                return Err(Error::Duplicate(a.to_string()));
            }
            return Err(Error::NotAnticommuting {
                first: a.to_string(),
                second: b.to_string(),
            });
        }
        if let Some(id) = elements.iter().find(|e| e.is_identity()) {
            return Err(Error::IdentityElement(id.to_string()));
        }
        let n_qubits = elements[0].n_qubits();
        // At most 2n+1 Pauli strings on n qubits can pairwise anticommute.
        debug_assert!(elements.len() <= 2 * n_qubits + 1);
        Ok(Self { n_qubits, elements })
    }

    pub fn parse(labels: &[&str]) -> Result<Self> {
        Self::new(
            labels
                .iter()
                .map(|l| parse_label(l))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn elements(&self) -> &[PauliString] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn contains(&self, p: &PauliString) -> bool {
        self.elements.contains(p)
    }
}

impl fmt::Display for AnticommutingSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.elements.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{e}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> PauliString {
        parse_label(s).unwrap()
    }

    #[test]
    fn parse_simple_labels() {
        let xx = p("XX");
        assert_eq!(xx.n_qubits(), 2);
        assert_eq!(xx.paulis(), vec![Pauli::X, Pauli::X]);

        let s = p("XYIX");
        assert_eq!(s.n_qubits(), 4);
        assert_eq!(s.paulis(), vec![Pauli::X, Pauli::Y, Pauli::I, Pauli::X]);
        assert_eq!(s.x_mask(), 0b1011);
        assert_eq!(s.z_mask(), 0b0010);
        assert_eq!(s.to_string(), "XYIX");
    }

    #[test]
    fn parse_rejects_bad_input() {
        assert!(matches!(parse_label("AB"), Err(Error::InvalidLabel { .. })));
        assert!(matches!(parse_label(""), Err(Error::InvalidLabel { .. })));
        assert!(parse_label("xX").is_err());
        assert!(parse_label(&"X".repeat(65)).is_err());
        assert_eq!(parse_label(&"Z".repeat(64)).unwrap().n_qubits(), 64);
    }

    #[test]
    fn anticommutation_examples() {
        assert!(anticommutes(&p("XXI"), &p("XYI")).unwrap());
        assert!(anticommutes(&p("XXI"), &p("YIX")).unwrap());
        assert!(!anticommutes(&p("XXI"), &p("YYI")).unwrap());
        assert!(matches!(
            anticommutes(&p("XX"), &p("XXX")),
            Err(Error::QubitMismatch { .. })
        ));
    }

    #[test]
    fn mutual_anticommutation() {
        let tri: Vec<_> = ["XXI", "XYI", "YIX", "YIY"].iter().map(|s| p(s)).collect();
        assert_eq!(is_mutually_anticommuting(&tri).unwrap(), None);

        let four: Vec<_> = ["XXYI", "XYIX", "XIXY", "IYYY"]
            .iter()
            .map(|s| p(s))
            .collect();
        assert_eq!(is_mutually_anticommuting(&four).unwrap(), None);

        let bad = vec![p("XX"), p("YY")];
        assert_eq!(
            is_mutually_anticommuting(&bad).unwrap(),
            Some((p("XX"), p("YY")))
        );
        assert!(matches!(
            is_mutually_anticommuting(&[]),
            Err(Error::Empty(_))
        ));
    }

    #[test]
    fn anticommuting_set_validation() {
        assert!(AnticommutingSet::parse(&["X", "Y", "Z"]).is_ok());
        assert!(matches!(
            AnticommutingSet::parse(&["XX", "YY"]),
            Err(Error::NotAnticommuting { .. })
        ));
        assert!(matches!(
            AnticommutingSet::parse(&["X", "X"]),
            Err(Error::Duplicate(_))
        ));
        assert!(matches!(
            AnticommutingSet::parse(&["I"]),
            Err(Error::IdentityElement(_))
        ));
    }

    #[test]
    fn basis_action_of_y() {
        // Y|0> = i|1>, Y|1> = -i|0>
        let y = p("Y");
        assert_eq!(y.act_on_basis(0), (1, Complex64::new(0.0, 1.0)));
        assert_eq!(y.act_on_basis(1), (0, Complex64::new(0.0, -1.0)));
        let z = p("IZ");
        assert_eq!(z.act_on_basis(0b10), (0b10, Complex64::new(-1.0, 0.0)));
        assert_eq!(z.act_on_basis(0b01), (0b01, Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn ordering_is_lexicographic_by_label() {
        let mut v = [p("YX"), p("XY"), p("IZ"), p("XX")];
        v.sort();
        let labels: Vec<_> = v.iter().map(|s| s.to_string()).collect();
        assert_eq!(labels, ["IZ", "XX", "XY", "YX"]);
    }

    #[test]
    fn permute_and_swap() {
        let s = p("XYI");
        assert_eq!(s.permuted(&[2, 0, 1]).unwrap().to_string(), "YIX");
        assert!(s.permuted(&[0, 0, 1]).is_err());
        assert_eq!(p("XYZI").swap_xy().to_string(), "YXZI");
    }
}
