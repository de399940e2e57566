//! Anticommuting partitions of Bell-bound terms and the monogamy relations
//! they certify.
//!
//! Each experiment of an [`OverlapScenario`] is a party subset running a
//! two-setting correlation Bell test. With every party's plane fixed, the
//! squared Bell value of an experiment is bounded by the sum of squared
//! correlations over the `X`/`Y` strings supported on its parties. Covering
//! all those strings by `K` mutually anticommuting sets bounds the sum of
//! squared Bell values by `K`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use rayon::prelude::*;
use serde::Serialize;

use crate::bell::{Budget, Direction, Functional, PartySettings, SettingPair};
use crate::error::{Error, Result};
use crate::pauli::{is_mutually_anticommuting, AnticommutingSet, Pauli, PauliString, MAX_QUBITS};
use crate::qstate::{random_pure_state, LocalCorrelations, QuantumState};
use crate::search::{self, Experiment, Score, SearchProblem};

pub const SATURATION_TOLERANCE: f64 = 1e-6;
pub const MAX_EXACT_COVER_TERMS: usize = 16;

/// Parties plus the list of experiments (hyperedges) they take part in.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OverlapScenario {
    n_parties: usize,
    experiments: Vec<Vec<usize>>,
}

impl OverlapScenario {
    pub fn new(n_parties: usize, experiments: Vec<Vec<usize>>) -> Result<Self> {
        if n_parties == 0 || n_parties > MAX_QUBITS {
            return Err(Error::OutOfRange(format!("{n_parties} parties")));
        }
        if experiments.is_empty() {
            return Err(Error::Empty("experiment list"));
        }
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(experiments.len());
        for mut e in experiments {
            e.sort_unstable();
            if e.len() < 2 {
                return Err(Error::OutOfRange(format!(
                    "experiment {e:?} needs at least two parties"
                )));
            }
            if e.windows(2).any(|w| w[0] == w[1]) {
                return Err(Error::Duplicate(format!("party in experiment {e:?}")));
            }
            if let Some(p) = e.iter().find(|&&p| p >= n_parties) {
                return Err(Error::OutOfRange(format!("party {p} of {n_parties}")));
            }
            if !seen.insert(e.clone()) {
                return Err(Error::Duplicate(format!("experiment {e:?}")));
            }
            normalized.push(e);
        }
        Ok(Self {
            n_parties,
            experiments: normalized,
        })
    }

    /// `AB` and `AC` on three parties.
    pub fn triangle() -> Self {
        Self::new(3, vec![vec![0, 1], vec![0, 2]]).expect("valid")
    }

    /// The four triples of four parties, `ABC, ABD, ACD, BCD`.
    pub fn four_party() -> Self {
        Self::new(
            4,
            vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]],
        )
        .expect("valid")
    }

    /// Party 0 shared by two groups of `m` parties: `A B_1..B_m` and `A C_1..C_m`.
    pub fn star(m: usize) -> Result<Self> {
        if m == 0 || 2 * m + 1 > MAX_QUBITS {
            return Err(Error::OutOfRange(format!("star group size {m}")));
        }
        let b: Vec<usize> = std::iter::once(0).chain(1..=m).collect();
        let c: Vec<usize> = std::iter::once(0).chain(m + 1..=2 * m).collect();
        Self::new(2 * m + 1, vec![b, c])
    }

    /// Root-to-leaf paths of a complete binary tree with `depth` levels,
    /// nodes numbered breadth-first.
    pub fn tree(depth: usize) -> Result<Self> {
        check_tree_depth(depth)?;
        let paths = (0..1 << (depth - 1)).map(|j| tree_path(depth, j)).collect();
        Self::new((1 << depth) - 1, paths)
    }

    pub fn n_parties(&self) -> usize {
        self.n_parties
    }

    pub fn experiments(&self) -> &[Vec<usize>] {
        &self.experiments
    }

    /// `"AB"`-style names when parties fit in the alphabet, `"0-1"` otherwise.
    pub fn experiment_label(&self, index: usize) -> String {
        experiment_label(&self.experiments[index], self.n_parties)
    }
}

pub fn experiment_label(parties: &[usize], n_parties: usize) -> String {
    if n_parties <= 26 {
        parties.iter().map(|&p| (b'A' + p as u8) as char).collect()
    } else {
        parties
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join("-")
    }
}

fn check_tree_depth(depth: usize) -> Result<()> {
    if !(2..=6).contains(&depth) {
        return Err(Error::OutOfRange(format!(
            "tree depth {depth} outside 2..=6"
        )));
    }
    Ok(())
}

/// Qubits on the path from the root to leaf `j` (leaves in breadth-first order).
pub fn tree_path(depth: usize, leaf: usize) -> Vec<usize> {
    let mut node = (1 << (depth - 1)) - 1 + leaf;
    let mut path = vec![node];
    while node > 0 {
        node = (node - 1) / 2;
        path.push(node);
    }
    path.reverse();
    path
}

/// All strings with `X` or `Y` on every member of some experiment and the
/// identity elsewhere.
pub fn required_terms(scenario: &OverlapScenario) -> BTreeSet<PauliString> {
    let n = scenario.n_parties;
    let mut terms = BTreeSet::new();
    for e in &scenario.experiments {
        for code in 0..1usize << e.len() {
            let sites: Vec<(usize, Pauli)> = e
                .iter()
                .enumerate()
                .map(|(r, &q)| {
                    let bit = (code >> (e.len() - 1 - r)) & 1;
                    (q, if bit == 0 { Pauli::X } else { Pauli::Y })
                })
                .collect();
            terms.insert(PauliString::from_sites(n, &sites).expect("sites in range"));
        }
    }
    terms
}

/// Disjoint mutually anticommuting sets; the set count bounds the squared
/// Bell sum of any scenario whose required terms the partition covers exactly.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AnticommutingPartition {
    sets: Vec<AnticommutingSet>,
    covered_terms: BTreeSet<PauliString>,
}

impl AnticommutingPartition {
    pub fn new(sets: Vec<AnticommutingSet>) -> Result<Self> {
        let first = sets.first().ok_or(Error::Empty("partition"))?;
        let n = first.n_qubits();
        let mut covered_terms = BTreeSet::new();
        for s in &sets {
            if s.n_qubits() != n {
                return Err(Error::QubitMismatch {
                    expected: n,
                    actual: s.n_qubits(),
                });
            }
            for e in s.elements() {
                if !covered_terms.insert(*e) {
                    return Err(Error::Certification(format!(
                        "{e} appears in more than one set"
                    )));
                }
            }
        }
        Ok(Self {
            sets,
            covered_terms,
        })
    }

    pub fn from_labels(sets: &[&[&str]]) -> Result<Self> {
        Self::new(
            sets.iter()
                .map(|s| AnticommutingSet::parse(s))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    pub fn sets(&self) -> &[AnticommutingSet] {
        &self.sets
    }

    pub fn covered_terms(&self) -> &BTreeSet<PauliString> {
        &self.covered_terms
    }

    pub fn n_qubits(&self) -> usize {
        self.sets[0].n_qubits()
    }

    /// Number of sets, i.e. the monogamy bound on the sum of squared values.
    pub fn bound(&self) -> usize {
        self.sets.len()
    }

    /// Re-verifies every set pairwise, disjointness, and exact coverage of `required`.
    pub fn certify(&self, required: &BTreeSet<PauliString>) -> Result<()> {
        let mut union = BTreeSet::new();
        for (i, s) in self.sets.iter().enumerate() {
            if let Some((a, b)) = is_mutually_anticommuting(s.elements())? {
                return Err(Error::Certification(format!(
                    "set {i}: {a} and {b} commute"
                )));
            }
            for e in s.elements() {
                if !union.insert(*e) {
                    return Err(Error::Certification(format!("{e} is covered twice")));
                }
            }
        }
        if let Some(missing) = required.difference(&union).next() {
            return Err(Error::Certification(format!("{missing} is not covered")));
        }
        if let Some(extra) = union.difference(required).next() {
            return Err(Error::Certification(format!(
                "{extra} is not a required term"
            )));
        }
        Ok(())
    }

    pub fn certify_for(&self, scenario: &OverlapScenario) -> Result<()> {
        if self.n_qubits() != scenario.n_parties {
            return Err(Error::QubitMismatch {
                expected: scenario.n_parties,
                actual: self.n_qubits(),
            });
        }
        self.certify(&required_terms(scenario))
    }

    /// `sum_sets sum_{P in set} <P>^2`; each set contributes at most one.
    pub fn squared_expectation_sum<S: QuantumState + ?Sized>(&self, state: &S) -> Result<f64> {
        if state.n_qubits() != self.n_qubits() {
            return Err(Error::QubitMismatch {
                expected: self.n_qubits(),
                actual: state.n_qubits(),
            });
        }
        Ok(self
            .covered_terms
            .iter()
            .map(|p| state.expectation_unchecked(p).powi(2))
            .sum())
    }

    /// One set per line, labels separated by single spaces.
    pub fn to_text(&self) -> String {
        self.sets.iter().map(|s| format!("{s}\n")).collect()
    }

    pub fn parse_text(text: &str) -> Result<Self> {
        let sets = text
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty() && !l.starts_with('#'))
            .map(|l| AnticommutingSet::parse(&l.split_whitespace().collect::<Vec<_>>()))
            .collect::<Result<Vec<_>>>()?;
        Self::new(sets)
    }
}

impl fmt::Display for AnticommutingPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

fn labels(list: &[&str]) -> Vec<PauliString> {
    list.iter()
        .map(|l| l.parse().expect("valid literal label"))
        .collect()
}

pub fn triangle_partition() -> AnticommutingPartition {
    AnticommutingPartition::from_labels(&[
        &["XXI", "XYI", "YIX", "YIY"],
        &["YXI", "YYI", "XIX", "XIY"],
    ])
    .expect("valid construction")
}

pub fn four_party_partition() -> AnticommutingPartition {
    let listed: [[&str; 4]; 4] = [
        ["XXYI", "XYIX", "XIXY", "IYYY"],
        ["XYXI", "YYIY", "YIXX", "IXXY"],
        ["YXXI", "XXIY", "YIYY", "IXYX"],
        ["YYYI", "YXIX", "XIYX", "IYXX"],
    ];
    let sets = listed
        .iter()
        .map(|four| {
            let base = labels(four);
            let swapped: Vec<_> = base.iter().map(PauliString::swap_xy).collect();
            AnticommutingSet::new(base.into_iter().chain(swapped).collect())
        })
        .collect::<Result<Vec<_>>>()
        .expect("valid construction");
    AnticommutingPartition::new(sets).expect("disjoint")
}

/// `2^m` sets of four: for each word `S` over `{X, Y}` of length `m - 1`,
/// `{XXSI, XYSI, YIXS, YIYS}` and `{YXSI, YYSI, XIXS, XIYS}`.
pub fn star_partition(m: usize) -> Result<AnticommutingPartition> {
    let scenario = OverlapScenario::star(m)?;
    let n = scenario.n_parties();
    let b_first = 1;
    let c_first = m + 1;
    let mut sets = Vec::with_capacity(1 << m);
    for word in 0..1usize << (m - 1) {
        let tail = |first_of_group: usize| -> Vec<(usize, Pauli)> {
            (0..m - 1)
                .map(|i| {
                    let bit = (word >> (m - 2 - i)) & 1;
                    (
                        first_of_group + 1 + i,
                        if bit == 0 { Pauli::X } else { Pauli::Y },
                    )
                })
                .collect()
        };
        let make = |a: Pauli, group: usize, lead: Pauli| -> PauliString {
            let mut sites = vec![(0, a), (group, lead)];
            sites.extend(tail(group));
            PauliString::from_sites(n, &sites).expect("in range")
        };
        for (a_b, a_c) in [(Pauli::X, Pauli::Y), (Pauli::Y, Pauli::X)] {
            sets.push(AnticommutingSet::new(vec![
                make(a_b, b_first, Pauli::X),
                make(a_b, b_first, Pauli::Y),
                make(a_c, c_first, Pauli::X),
                make(a_c, c_first, Pauli::Y),
            ])?);
        }
    }
    AnticommutingPartition::new(sets)
}

/// The `2^depth` leaf operators produced by the recursive tree rule: the
/// root carries `X` and `Y`; stepping to the upper child extends the
/// operator with `X` at the current node by `X` or `Y`, stepping to the lower
/// child extends the one with `Y`.
pub fn tree_base_set(depth: usize) -> Result<Vec<PauliString>> {
    check_tree_depth(depth)?;
    let n = (1 << depth) - 1;
    let mut out = Vec::with_capacity(1 << depth);
    fn grow(
        node: usize,
        with_x: PauliString,
        with_y: PauliString,
        n: usize,
        out: &mut Vec<PauliString>,
    ) {
        let up = 2 * node + 1;
        let down = 2 * node + 2;
        if up >= n {
            out.push(with_x);
            out.push(with_y);
            return;
        }
        grow(
            up,
            with_x.with(up, Pauli::X),
            with_x.with(up, Pauli::Y),
            n,
            out,
        );
        grow(
            down,
            with_y.with(down, Pauli::X),
            with_y.with(down, Pauli::Y),
            n,
            out,
        );
    }
    let root = PauliString::identity(n)?;
    grow(
        0,
        root.with(0, Pauli::X),
        root.with(0, Pauli::Y),
        n,
        &mut out,
    );
    Ok(out)
}

/// Tree automorphism that swaps the two child subtrees of every node on the
/// levels flagged in `levels` (bit `l` = nodes at depth `l`).
fn level_swap_permutation(depth: usize, levels: usize) -> Vec<usize> {
    let n = (1usize << depth) - 1;
    (0..n)
        .map(|node| {
            let d = (usize::BITS - 1 - (node + 1).leading_zeros()) as usize;
            let code = node + 1 - (1 << d);
            let flip = (0..d)
                .filter(|l| (levels >> l) & 1 == 1)
                .fold(0, |acc, l| acc | 1 << (d - 1 - l));
            (1 << d) - 1 + (code ^ flip)
        })
        .collect()
}

/// `2^(depth-1)` sets of `2^depth` operators: the base set relabeled by every
/// combination of per-level child swaps.
pub fn tree_partition(depth: usize) -> Result<AnticommutingPartition> {
    let base = tree_base_set(depth)?;
    let sets = (0..1usize << (depth - 1))
        .map(|levels| {
            let perm = level_swap_permutation(depth, levels);
            let elements = base
                .iter()
                .map(|p| p.permuted(&perm))
                .collect::<Result<Vec<_>>>()?;
            AnticommutingSet::new(elements)
        })
        .collect::<Result<Vec<_>>>()?;
    AnticommutingPartition::new(sets)
}

fn check_common_width(terms: &BTreeSet<PauliString>) -> Result<Vec<PauliString>> {
    let first = terms.iter().next().ok_or(Error::Empty("term set"))?;
    if let Some(bad) = terms.iter().find(|t| t.n_qubits() != first.n_qubits()) {
        return Err(Error::QubitMismatch {
            expected: first.n_qubits(),
            actual: bad.n_qubits(),
        });
    }
    if let Some(id) = terms.iter().find(|t| t.is_identity()) {
        return Err(Error::IdentityElement(id.to_string()));
    }
    Ok(terms.iter().copied().collect())
}

/// Vertices in descending anticommutation degree, ties by label.
fn degree_order(terms: &[PauliString]) -> Vec<PauliString> {
    let mut with_degree: Vec<(usize, PauliString)> = terms
        .iter()
        .map(|t| {
            let deg = terms.iter().filter(|u| t.anticommutes_unchecked(u)).count();
            (deg, *t)
        })
        .collect();
    with_degree.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));
    with_degree.into_iter().map(|(_, t)| t).collect()
}

/// Largest-degree-first, first-fit clique cover of the anticommutation graph.
pub fn greedy_clique_cover(terms: &BTreeSet<PauliString>) -> Result<AnticommutingPartition> {
    let terms = check_common_width(terms)?;
    let mut cliques: Vec<Vec<PauliString>> = Vec::new();
    for t in degree_order(&terms) {
        match cliques
            .iter_mut()
            .find(|c| c.iter().all(|u| t.anticommutes_unchecked(u)))
        {
            Some(c) => c.push(t),
            None => cliques.push(vec![t]),
        }
    }
    AnticommutingPartition::new(
        cliques
            .into_iter()
            .map(AnticommutingSet::new)
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Minimum clique cover by branch and bound; at most
/// [`MAX_EXACT_COVER_TERMS`] terms.
pub fn exact_clique_cover(terms: &BTreeSet<PauliString>) -> Result<AnticommutingPartition> {
    if terms.len() > MAX_EXACT_COVER_TERMS {
        return Err(Error::OutOfRange(format!(
            "exact cover limited to {MAX_EXACT_COVER_TERMS} terms, got {}",
            terms.len()
        )));
    }
    let greedy = greedy_clique_cover(terms)?;
    let order = degree_order(&check_common_width(terms)?);

    struct Search<'a> {
        order: &'a [PauliString],
        current: Vec<Vec<PauliString>>,
        best: Option<Vec<Vec<PauliString>>>,
        best_len: usize,
    }

    impl Search<'_> {
        fn run(&mut self, i: usize) {
            if self.current.len() >= self.best_len {
                return;
            }
            if i == self.order.len() {
                self.best_len = self.current.len();
                self.best = Some(self.current.clone());
                return;
            }
            let t = self.order[i];
            for c in 0..self.current.len() {
                if self.current[c].iter().all(|u| t.anticommutes_unchecked(u)) {
                    self.current[c].push(t);
                    self.run(i + 1);
                    self.current[c].pop();
                }
            }
            self.current.push(vec![t]);
            self.run(i + 1);
            self.current.pop();
        }
    }

    let mut search = Search {
        order: &order,
        current: Vec::new(),
        best: None,
        best_len: greedy.bound(),
    };
    search.run(0);
    match search.best {
        Some(cliques) => AnticommutingPartition::new(
            cliques
                .into_iter()
                .map(AnticommutingSet::new)
                .collect::<Result<Vec<_>>>()?,
        ),
        None => Ok(greedy),
    }
}

/// Greedy cover, replaced by the exact one when it is small enough to search.
pub fn clique_cover(terms: &BTreeSet<PauliString>) -> Result<AnticommutingPartition> {
    if terms.len() <= MAX_EXACT_COVER_TERMS {
        exact_clique_cover(terms)
    } else {
        greedy_clique_cover(terms)
    }
}

/// Scenario names understood by [`parse_scenario_spec`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NamedScenario {
    Triangle,
    FourParty,
    Star(usize),
    Tree(usize),
}

impl NamedScenario {
    pub fn scenario(self) -> Result<OverlapScenario> {
        match self {
            NamedScenario::Triangle => Ok(OverlapScenario::triangle()),
            NamedScenario::FourParty => Ok(OverlapScenario::four_party()),
            NamedScenario::Star(m) => OverlapScenario::star(m),
            NamedScenario::Tree(m) => OverlapScenario::tree(m),
        }
    }

    pub fn partition(self) -> Result<AnticommutingPartition> {
        match self {
            NamedScenario::Triangle => Ok(triangle_partition()),
            NamedScenario::FourParty => Ok(four_party_partition()),
            NamedScenario::Star(m) => star_partition(m),
            NamedScenario::Tree(m) => tree_partition(m),
        }
    }
}

fn parse_param(text: &str, key: &str) -> Result<usize> {
    let (k, v) = text
        .split_once('=')
        .ok_or_else(|| Error::Parse(format!("expected {key}=<int>, got {text:?}")))?;
    if !k.trim().eq_ignore_ascii_case(key) {
        return Err(Error::Parse(format!("expected parameter {key}, got {k:?}")));
    }
    v.trim()
        .parse()
        .map_err(|_| Error::Parse(format!("invalid integer {v:?}")))
}

/// Parses `triangle`, `fourparty`, `star:M=<m>`, `tree:M=<m>` or an explicit
/// hyperedge list `edges:0-1,0-2` (optionally `edges:n=5;0-1,0-2`), and
/// returns the scenario with its partition. Explicit lists are covered by
/// [`clique_cover`].
pub fn parse_scenario_spec(text: &str) -> Result<(OverlapScenario, AnticommutingPartition)> {
    let text = text.trim();
    let (head, rest) = text.split_once(':').unwrap_or((text, ""));
    let named = match head.to_ascii_lowercase().as_str() {
        "triangle" => Some(NamedScenario::Triangle),
        "fourparty" | "four-party" => Some(NamedScenario::FourParty),
        "star" => Some(NamedScenario::Star(parse_param(rest, "M")?)),
        "tree" => Some(NamedScenario::Tree(parse_param(rest, "M")?)),
        "edges" => None,
        other => return Err(Error::Parse(format!("unknown scenario {other:?}"))),
    };
    if let Some(named) = named {
        return Ok((named.scenario()?, named.partition()?));
    }
    let (n_override, list) = match rest.split_once(';') {
        Some((n, list)) => (Some(parse_param(n, "n")?), list),
        None => (None, rest),
    };
    let experiments = list
        .split(',')
        .filter(|e| !e.trim().is_empty())
        .map(|e| {
            e.split('-')
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("invalid party {p:?}")))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let max_party = experiments.iter().flatten().copied().max().unwrap_or(0);
    let scenario = OverlapScenario::new(n_override.unwrap_or(max_party + 1), experiments)?;
    let partition = clique_cover(&required_terms(&scenario))?;
    Ok((scenario, partition))
}

/// What a party keeps fixed across the experiments it belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Sharing {
    /// One pair of settings used in every experiment.
    #[default]
    Settings,
    /// One measurement plane; the two settings within it may differ per
    /// experiment. The partition bound still applies, since it only depends
    /// on the planes.
    Plane,
}

impl std::str::FromStr for Sharing {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "settings" => Ok(Sharing::Settings),
            "plane" => Ok(Sharing::Plane),
            other => Err(Error::Parse(format!("unknown sharing mode {other:?}"))),
        }
    }
}

impl fmt::Display for Sharing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sharing::Settings => "settings",
            Sharing::Plane => "plane",
        })
    }
}

/// Result of a joint settings optimization over all experiments.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MonogamyReport {
    pub functional: Functional,
    pub sharing: Sharing,
    pub experiments: Vec<String>,
    pub per_experiment_values: Vec<f64>,
    pub squared_sum: f64,
    pub bound: f64,
    pub saturated: bool,
    /// Settings of each experiment's parties at the optimum.
    #[serde(skip)]
    pub settings: Vec<PartySettings>,
}

impl MonogamyReport {
    pub fn exceeds_bound(&self, tolerance: f64) -> bool {
        self.squared_sum > self.bound + tolerance
    }
}

fn party_settings(parties: &[usize], pairs: &[[[f64; 3]; 2]]) -> Result<PartySettings> {
    let pairs = pairs
        .iter()
        .map(|[a, b]| Ok(SettingPair::new(Direction::new(*a)?, Direction::new(*b)?)))
        .collect::<Result<Vec<_>>>()?;
    PartySettings::new(parties.to_vec(), pairs)
}

/// Jointly maximizes the sum of squared Bell values under `sharing`. The
/// bound is the partition size times the squared local-realistic bound of
/// `functional`.
pub fn check_state<S: QuantumState + ?Sized + Sync>(
    scenario: &OverlapScenario,
    state: &S,
    partition: &AnticommutingPartition,
    functional: Functional,
    sharing: Sharing,
    budget: &Budget,
) -> Result<MonogamyReport> {
    budget.validate()?;
    if state.n_qubits() != scenario.n_parties {
        return Err(Error::QubitMismatch {
            expected: scenario.n_parties,
            actual: state.n_qubits(),
        });
    }
    partition.certify_for(scenario)?;
    for e in &scenario.experiments {
        functional.check_parties(e.len())?;
    }
    let experiments = scenario
        .experiments
        .iter()
        .map(|e| {
            Ok(Experiment::new(
                e.clone(),
                LocalCorrelations::from_state(state, e)?,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let score = match functional {
        Functional::General => Score::GeneralSquared,
        Functional::Mermin => Score::MerminSquared,
    };
    let problem = SearchProblem::new(scenario.n_parties, experiments, score);
    let (per_experiment_values, settings) = match sharing {
        Sharing::Settings => {
            let result = search::maximize(&problem, budget);
            let settings = scenario
                .experiments
                .iter()
                .map(|e| {
                    let pairs: Vec<_> = e.iter().map(|&p| result.settings[p]).collect();
                    party_settings(e, &pairs)
                })
                .collect::<Result<Vec<_>>>()?;
            (result.per_experiment, settings)
        }
        Sharing::Plane => {
            let result = search::maximize_planar(&problem, budget);
            let settings = scenario
                .experiments
                .iter()
                .zip(&result.settings)
                .map(|(e, pairs)| party_settings(e, pairs))
                .collect::<Result<Vec<_>>>()?;
            (result.per_experiment, settings)
        }
    };

    let squared_sum = per_experiment_values.iter().map(|v| v * v).sum::<f64>();
    let bound = partition.bound() as f64 * functional.classical_bound().powi(2);
    Ok(MonogamyReport {
        functional,
        sharing,
        experiments: (0..scenario.experiments.len())
            .map(|i| scenario.experiment_label(i))
            .collect(),
        per_experiment_values,
        squared_sum,
        bound,
        saturated: (squared_sum - bound).abs() <= SATURATION_TOLERANCE,
        settings,
    })
}

/// Summary of [`check_state`] over seeded random pure states.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleSummary {
    pub samples: usize,
    pub bound: f64,
    pub max_squared_sum: f64,
    pub max_squared_sum_seed: u64,
    /// Largest `sum <P>^2` over the partition's terms.
    pub max_partition_sum: f64,
    pub violations: usize,
    pub tolerance: f64,
}

/// Checks `samples` random states (seeds `seed, seed+1, ...`) in parallel;
/// the summary does not depend on scheduling.
#[allow(clippy::too_many_arguments)]
pub fn sample_check(
    scenario: &OverlapScenario,
    partition: &AnticommutingPartition,
    functional: Functional,
    sharing: Sharing,
    samples: usize,
    seed: u64,
    budget: &Budget,
    tolerance: f64,
) -> Result<SampleSummary> {
    if samples == 0 {
        return Err(Error::OutOfRange("zero samples".into()));
    }
    partition.certify_for(scenario)?;
    let rows = (0..samples as u64)
        .into_par_iter()
        .map(|i| {
            let state = random_pure_state(scenario.n_parties, seed.wrapping_add(i))?;
            let report = check_state(scenario, &state, partition, functional, sharing, budget)?;
            let planar = partition.squared_expectation_sum(&state)?;
            Ok((
                seed.wrapping_add(i),
                report.squared_sum,
                report.bound,
                planar,
            ))
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = rows[0].2;
    let mut summary = SampleSummary {
        samples,
        bound,
        max_squared_sum: f64::NEG_INFINITY,
        max_squared_sum_seed: seed,
        max_partition_sum: f64::NEG_INFINITY,
        violations: 0,
        tolerance,
    };
    let set_bound = partition.bound() as f64;
    for (s, sum, _, planar) in rows {
        if sum > summary.max_squared_sum {
            summary.max_squared_sum = sum;
            summary.max_squared_sum_seed = s;
        }
        summary.max_partition_sum = summary.max_partition_sum.max(planar);
        if sum > bound + tolerance || planar > set_bound + tolerance {
            summary.violations += 1;
        }
    }
    Ok(summary)
}

/// Per-term expectation values of a partition, keyed by label (used by reports).
pub fn term_values<S: QuantumState + ?Sized>(
    partition: &AnticommutingPartition,
    state: &S,
) -> Result<BTreeMap<String, f64>> {
    partition
        .covered_terms()
        .iter()
        .map(|p| Ok((p.to_string(), state.expectation(p)?)))
        .collect()
}
