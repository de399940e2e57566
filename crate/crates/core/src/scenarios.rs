//! Witness states that saturate the monogamy bounds, with their closed-form
//! Bell values.
//!
//! Kets are written with party `A` (qubit 0) leftmost, so `|0001>` has only
//! the fourth party excited.

use std::collections::BTreeMap;
use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::monogamy::{experiment_label, tree_path, OverlapScenario};
use crate::qstate::{random_pure_state, StateVector, MAX_STATE_QUBITS};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// `(|0..0> + e^{i phase}|1..1>) / sqrt 2`.
pub fn ghz(n: usize, phase: f64) -> Result<StateVector> {
    if !(2..=MAX_STATE_QUBITS).contains(&n) {
        return Err(Error::OutOfRange(format!(
            "GHZ needs 2..={MAX_STATE_QUBITS} qubits, got {n}"
        )));
    }
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    amps[(1 << n) - 1] = Complex64::from_polar(FRAC_1_SQRT_2, phase);
    StateVector::new(n, amps)
}

fn check_group_size(m: usize) -> Result<()> {
    if m == 0 || 2 * m + 1 > MAX_STATE_QUBITS {
        return Err(Error::OutOfRange(format!("group size M = {m}")));
    }
    Ok(())
}

/// Star witness on `2M + 1` qubits ordered `A, B_1..B_M, C_1..C_M`:
/// `cos(alpha)/sqrt2 (|0 0 0> + |1 0 1>) + sin(alpha)/sqrt2 (|1 1 0> + |0 1 1>)`.
pub fn psi_mono(m: usize, alpha: f64) -> Result<StateVector> {
    check_group_size(m)?;
    let n = 2 * m + 1;
    let a = 1usize;
    let b = ((1usize << m) - 1) << 1;
    let c = ((1usize << m) - 1) << (m + 1);
    let mut amps = vec![ZERO; 1 << n];
    let cos = Complex64::new(alpha.cos() * FRAC_1_SQRT_2, 0.0);
    let sin = Complex64::new(alpha.sin() * FRAC_1_SQRT_2, 0.0);
    amps[0] += cos;
    amps[a | c] += cos;
    amps[a | b] += sin;
    amps[b | c] += sin;
    StateVector::new(n, amps)
}

/// Squared Bell values `(L^2_{AB}, L^2_{AC})` of [`psi_mono`].
pub fn tight_prediction(m: usize, alpha: f64) -> (f64, f64) {
    let scale = (2.0f64).powi(m as i32 - 1);
    let s = (2.0 * alpha).sin();
    let c = (2.0 * alpha).cos();
    (scale * s * s, scale * (1.0 + c * c))
}

fn check_tree(depth: usize) -> Result<()> {
    if depth < 2 || (1usize << depth) - 1 > MAX_STATE_QUBITS {
        return Err(Error::OutOfRange(format!("tree depth {depth}")));
    }
    Ok(())
}

fn check_paths(depth: usize, paths: &[usize]) -> Result<()> {
    if paths.is_empty() {
        return Err(Error::Empty("path list"));
    }
    let leaves = 1usize << (depth - 1);
    let mut seen = vec![false; leaves];
    for &p in paths {
        if p >= leaves {
            return Err(Error::OutOfRange(format!("path {p} of {leaves}")));
        }
        if seen[p] {
            return Err(Error::Duplicate(format!("path {p}")));
        }
        seen[p] = true;
    }
    Ok(())
}

/// `|0..0>/sqrt2 + sum_j |1 on path j>/sqrt(2m)` on the full tree of
/// `2^depth - 1` qubits; parties off the chosen paths stay in `|0>`.
pub fn tree_state(depth: usize, paths: &[usize]) -> Result<StateVector> {
    check_tree(depth)?;
    check_paths(depth, paths)?;
    let n = (1usize << depth) - 1;
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let branch = Complex64::new(1.0 / (2.0 * paths.len() as f64).sqrt(), 0.0);
    for &j in paths {
        let mask = tree_path(depth, j)
            .iter()
            .fold(0usize, |acc, q| acc | 1 << q);
        amps[mask] += branch;
    }
    StateVector::new(n, amps)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TreePrediction {
    pub depth: usize,
    pub chosen: usize,
    /// `L^2 = 2^(depth-1) / m` for every chosen path; unchosen paths get 0.
    pub chosen_squared: f64,
    pub violated: bool,
}

impl TreePrediction {
    /// Squared values for every path, in leaf order.
    pub fn per_path(&self, paths: &[usize]) -> Vec<f64> {
        (0..1usize << (self.depth - 1))
            .map(|j| {
                if paths.contains(&j) {
                    self.chosen_squared
                } else {
                    0.0
                }
            })
            .collect()
    }
}

pub fn tree_prediction(depth: usize, m: usize) -> Result<TreePrediction> {
    if !(2..=30).contains(&depth) {
        return Err(Error::OutOfRange(format!("tree depth {depth}")));
    }
    let paths = 1usize << (depth - 1);
    if m == 0 || m > paths {
        return Err(Error::OutOfRange(format!("{m} chosen paths of {paths}")));
    }
    let chosen_squared = paths as f64 / m as f64;
    Ok(TreePrediction {
        depth,
        chosen: m,
        chosen_squared,
        violated: chosen_squared > 1.0,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MerminVariant {
    TwoTriples,
    ThreeTriples,
}

impl std::str::FromStr for MerminVariant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "two_triples" | "two" => Ok(MerminVariant::TwoTriples),
            "three_triples" | "three" => Ok(MerminVariant::ThreeTriples),
            other => Err(Error::Parse(format!("unknown Mermin variant {other:?}"))),
        }
    }
}

/// Predicted Mermin quantum values per triple of `A, B, C, D`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MerminPrediction {
    pub triples: Vec<(Vec<usize>, f64)>,
}

impl MerminPrediction {
    pub fn value(&self, triple: &[usize]) -> Option<f64> {
        self.triples
            .iter()
            .find(|(t, _)| t == triple)
            .map(|(_, v)| *v)
    }

    pub fn squared_sum(&self) -> f64 {
        self.triples.iter().map(|(_, v)| v * v).sum()
    }
}

/// `(|0001> + |0010> + i sqrt2 |1111>)/2` or
/// `(|0001> + |0010> + |0100> + i sqrt3 |1111>)/sqrt6`.
pub fn mermin_example(variant: MerminVariant) -> Result<(StateVector, MerminPrediction)> {
    const A: usize = 1;
    const B: usize = 2;
    const C: usize = 4;
    const D: usize = 8;
    let mut amps = vec![ZERO; 16];
    let triples = OverlapScenario::four_party().experiments().to_vec();
    let values: [f64; 4] = match variant {
        MerminVariant::TwoTriples => {
            amps[D] = Complex64::new(0.5, 0.0);
            amps[C] = Complex64::new(0.5, 0.0);
            amps[A | B | C | D] = Complex64::new(0.0, 2f64.sqrt() / 2.0);
            [2.0 * 2f64.sqrt(), 2.0 * 2f64.sqrt(), 0.0, 0.0]
        }
        MerminVariant::ThreeTriples => {
            let w = 1.0 / 6f64.sqrt();
            amps[D] = Complex64::new(w, 0.0);
            amps[C] = Complex64::new(w, 0.0);
            amps[B] = Complex64::new(w, 0.0);
            amps[A | B | C | D] = Complex64::new(0.0, 3f64.sqrt() * w);
            let v = 4.0 / 3f64.sqrt();
            [v, v, v, 0.0]
        }
    };
    let state = StateVector::new(4, amps)?;
    Ok((
        state,
        MerminPrediction {
            triples: triples.into_iter().zip(values).collect(),
        },
    ))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum WitnessSource {
    StarCurve,
    TreeEqualSuperposition,
    MerminExample,
}

/// A state with its predicted squared Bell values per experiment.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WitnessPrediction {
    #[serde(skip)]
    pub state: StateVector,
    pub predicted_values: BTreeMap<String, f64>,
    pub bound: f64,
    pub source: WitnessSource,
}

impl WitnessPrediction {
    fn checked(self) -> Result<Self> {
        let sum: f64 = self.predicted_values.values().sum();
        if self.predicted_values.values().any(|v| *v < 0.0) || sum > self.bound + 1e-12 {
            return Err(Error::InvalidState(format!(
                "predicted squared values sum to {sum} above bound {}",
                self.bound
            )));
        }
        Ok(self)
    }
}

pub fn star_witness(m: usize, alpha: f64) -> Result<WitnessPrediction> {
    let scenario = OverlapScenario::star(m)?;
    let (ab, ac) = tight_prediction(m, alpha);
    let n = scenario.n_parties();
    let e = scenario.experiments();
    WitnessPrediction {
        state: psi_mono(m, alpha)?,
        predicted_values: BTreeMap::from([
            (experiment_label(&e[0], n), ab),
            (experiment_label(&e[1], n), ac),
        ]),
        bound: (1u64 << m) as f64,
        source: WitnessSource::StarCurve,
    }
    .checked()
}

pub fn tree_witness(depth: usize, paths: &[usize]) -> Result<WitnessPrediction> {
    let state = tree_state(depth, paths)?;
    let prediction = tree_prediction(depth, paths.len())?;
    let n = (1usize << depth) - 1;
    let predicted_values = prediction
        .per_path(paths)
        .into_iter()
        .enumerate()
        .map(|(j, v)| (experiment_label(&tree_path(depth, j), n), v))
        .collect();
    WitnessPrediction {
        state,
        predicted_values,
        bound: (1u64 << (depth - 1)) as f64,
        source: WitnessSource::TreeEqualSuperposition,
    }
    .checked()
}

pub fn mermin_witness(variant: MerminVariant) -> Result<WitnessPrediction> {
    let (state, prediction) = mermin_example(variant)?;
    WitnessPrediction {
        state,
        predicted_values: prediction
            .triples
            .iter()
            .map(|(t, v)| (experiment_label(t, 4), v * v))
            .collect(),
        bound: 16.0,
        source: WitnessSource::MerminExample,
    }
    .checked()
}

/// Splits `key=value` pairs on commas; bare tokens extend the previous value
/// so `paths=0,1,2` stays one entry.
fn parse_params(text: &str) -> Result<BTreeMap<String, String>> {
    let mut params: BTreeMap<String, String> = BTreeMap::new();
    let mut last: Option<String> = None;
    for token in text.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        match token.split_once('=') {
            Some((k, v)) => {
                let key = k.trim().to_string();
                if params.insert(key.clone(), v.trim().to_string()).is_some() {
                    return Err(Error::Parse(format!("repeated parameter {key}")));
                }
                last = Some(key);
            }
            None => {
                let key = last
                    .as_ref()
                    .ok_or_else(|| Error::Parse(format!("stray token {token:?}")))?;
                let entry = params.get_mut(key).expect("inserted");
                entry.push(',');
                entry.push_str(token);
            }
        }
    }
    Ok(params)
}

fn take<T: std::str::FromStr>(
    params: &mut BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>> {
    params
        .remove(key)
        .map(|v| {
            v.parse()
                .map_err(|_| Error::Parse(format!("invalid value {v:?} for {key}")))
        })
        .transpose()
}

fn require<T: std::str::FromStr>(params: &mut BTreeMap<String, String>, key: &str) -> Result<T> {
    take(params, key)?.ok_or_else(|| Error::Parse(format!("missing parameter {key}")))
}

/// Builds a state from `ghz:n=3,phi=1.5708`, `psimono:M=2,alpha=0.3`,
/// `tree:M=3,paths=0,1,2`, `mermin:variant=two_triples`,
/// `random:n=3,seed=7`, `basis:bits=0101`, `file:<path>` or a bare `*.json` path.
pub fn parse_state_spec(text: &str) -> Result<StateVector> {
    let text = text.trim();
    let Some((kind, rest)) = text.split_once(':') else {
        if text.ends_with(".json") {
            return StateVector::read_json(text);
        }
        return Err(Error::Parse(format!(
            "state spec {text:?} lacks a kind prefix"
        )));
    };
    if kind == "file" {
        return StateVector::read_json(rest);
    }
    let mut params = parse_params(rest)?;
    let state = match kind {
        "ghz" => ghz(
            require(&mut params, "n")?,
            take(&mut params, "phi")?.unwrap_or(0.0),
        )?,
        "psimono" => psi_mono(require(&mut params, "M")?, require(&mut params, "alpha")?)?,
        "tree" => {
            let depth = require(&mut params, "M")?;
            let paths: String = require(&mut params, "paths")?;
            let paths = paths
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse()
                        .map_err(|_| Error::Parse(format!("invalid path {p:?}")))
                })
                .collect::<Result<Vec<usize>>>()?;
            tree_state(depth, &paths)?
        }
        "mermin" => mermin_example(require(&mut params, "variant")?)?.0,
        "random" => random_pure_state(
            require(&mut params, "n")?,
            take(&mut params, "seed")?.unwrap_or(0),
        )?,
        "basis" => {
            let bits: String = require(&mut params, "bits")?;
            let index = bits
                .chars()
                .enumerate()
                .try_fold(0usize, |acc, (q, c)| match c {
                    '0' => Ok(acc),
                    '1' => Ok(acc | 1 << q),
                    _ => Err(Error::Parse(format!("invalid bit {c:?}"))),
                })?;
            StateVector::basis(bits.len(), index)?
        }
        other => return Err(Error::Parse(format!("unknown state kind {other:?}"))),
    };
    if let Some(extra) = params.keys().next() {
        return Err(Error::Parse(format!("unexpected parameter {extra:?}")));
    }
    Ok(state)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;
    use crate::qstate::QuantumState;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn amp(s: &StateVector, i: usize) -> Complex64 {
        s.amplitudes()[i]
    }

    #[test]
    fn ghz_amplitudes() {
        let g = ghz(2, 0.0).unwrap();
        assert!((amp(&g, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amp(&g, 3).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert_eq!(amp(&g, 1), ZERO);
        assert!(ghz(1, 0.0).is_err());
    }

    #[test]
    fn psi_mono_examples() {
        let s = psi_mono(1, 0.0).unwrap();
        // (|000> + |101>)/sqrt2, order A B C
        assert!((amp(&s, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amp(&s, 0b101).re - FRAC_1_SQRT_2).abs() < 1e-15);
        let q = psi_mono(1, FRAC_PI_4).unwrap();
        for i in [0b000, 0b101, 0b011, 0b110] {
            assert!((amp(&q, i).norm_sqr() - 0.25).abs() < 1e-15, "{i:03b}");
        }
        let big = psi_mono(2, 0.3).unwrap();
        assert_eq!(big.amplitudes().len(), 32);
        assert!((big.norm_sqr() - 1.0).abs() < 1e-12);
        assert!(psi_mono(0, 0.1).is_err());
    }

    #[test]
    fn tight_prediction_examples() {
        let (ab, ac) = tight_prediction(1, FRAC_PI_4);
        assert!((ab - 1.0).abs() < 1e-15 && (ac - 1.0).abs() < 1e-15);
        assert_eq!(tight_prediction(1, 0.0), (0.0, 2.0));
        let (ab, ac) = tight_prediction(3, FRAC_PI_8);
        assert!((ab - 2.0).abs() < 1e-12 && (ac - 6.0).abs() < 1e-12);
        for i in 0..20 {
            let (ab, ac) = tight_prediction(4, i as f64 * 0.1);
            assert!((ab + ac - 16.0).abs() < 1e-12);
        }
    }

    #[test]
    fn tree_state_examples() {
        let s = tree_state(2, &[0, 1]).unwrap();
        // qubits root, up, down: |000>/sqrt2 + (|110> + |101>)/2
        assert!((amp(&s, 0).re - FRAC_1_SQRT_2).abs() < 1e-15);
        assert!((amp(&s, 0b011).re - 0.5).abs() < 1e-15);
        assert!((amp(&s, 0b101).re - 0.5).abs() < 1e-15);
        for paths in [&[0][..], &[1, 3], &[0, 1, 2], &[0, 1, 2, 3]] {
            assert!((tree_state(3, paths).unwrap().norm_sqr() - 1.0).abs() < 1e-12);
        }
        assert!(tree_state(3, &[]).is_err());
        assert!(tree_state(3, &[1, 1]).is_err());
        assert!(tree_state(3, &[4]).is_err());
    }

    #[test]
    fn tree_prediction_examples() {
        let p = tree_prediction(3, 3).unwrap();
        assert!((p.chosen_squared - 4.0 / 3.0).abs() < 1e-15 && p.violated);
        let p = tree_prediction(3, 4).unwrap();
        assert_eq!(p.chosen_squared, 1.0);
        assert!(!p.violated);
        let p = tree_prediction(3, 1).unwrap();
        assert_eq!(p.per_path(&[2]), vec![0.0, 0.0, 4.0, 0.0]);
        assert!(tree_prediction(3, 0).is_err());
        assert!(tree_prediction(3, 5).is_err());
    }

    #[test]
    fn mermin_examples_are_normalized() {
        for v in [MerminVariant::TwoTriples, MerminVariant::ThreeTriples] {
            let (s, p) = mermin_example(v).unwrap();
            assert!((s.norm_sqr() - 1.0).abs() < 1e-12);
            assert!((p.squared_sum() - 16.0).abs() < 1e-12);
        }
        let (_, p) = mermin_example(MerminVariant::TwoTriples).unwrap();
        assert!((p.value(&[0, 1, 2]).unwrap() - 8f64.sqrt()).abs() < 1e-15);
        assert_eq!(p.value(&[1, 2, 3]), Some(0.0));
    }

    #[test]
    fn ket_convention_puts_party_a_leftmost() {
        let (s, _) = mermin_example(MerminVariant::TwoTriples).unwrap();
        // |0001>: only D excited, so <Z_D> picks up the -1 there
        let zd: PauliString = "IIIZ".parse().unwrap();
        let za: PauliString = "ZIII".parse().unwrap();
        // weights: |0001> 1/4, |0010> 1/4, |1111> 1/2
        assert!((s.expectation(&zd).unwrap() - (0.25 - 0.25 - 0.5)).abs() < 1e-12);
        assert!((s.expectation(&za).unwrap() - (0.25 + 0.25 - 0.5)).abs() < 1e-12);
    }

    #[test]
    fn witnesses_respect_bounds() {
        assert!(star_witness(2, 0.3).is_ok());
        assert!(tree_witness(3, &[0, 2]).is_ok());
        let w = mermin_witness(MerminVariant::ThreeTriples).unwrap();
        assert_eq!(w.predicted_values.len(), 4);
        assert!((w.predicted_values["ABC"] - 16.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn state_specs() {
        assert_eq!(
            parse_state_spec("ghz:n=3,phi=0").unwrap(),
            ghz(3, 0.0).unwrap()
        );
        assert_eq!(
            parse_state_spec("psimono:M=2,alpha=0.3").unwrap(),
            psi_mono(2, 0.3).unwrap()
        );
        assert_eq!(
            parse_state_spec("tree:M=3,paths=0,1,2").unwrap(),
            tree_state(3, &[0, 1, 2]).unwrap()
        );
        assert_eq!(
            parse_state_spec("mermin:variant=two_triples").unwrap(),
            mermin_example(MerminVariant::TwoTriples).unwrap().0
        );
        assert_eq!(
            parse_state_spec("basis:bits=01").unwrap(),
            StateVector::basis(2, 0b10).unwrap()
        );
        assert!(parse_state_spec("ghz").is_err());
        assert!(parse_state_spec("ghz:n=x").is_err());
        assert!(parse_state_spec("ghz:n=3,foo=1").is_err());
        assert!(parse_state_spec("blob:n=3").is_err());
        assert!(parse_state_spec("file:/nonexistent/state.json").is_err());
    }
}
