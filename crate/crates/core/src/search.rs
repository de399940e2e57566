//! Settings search for Bell functionals and their squared sums.
//!
//! The objective is a sum over experiments of a score of each experiment's
//! correlation table. Every table entry is linear in each single measurement
//! direction, and every score used here is convex in the table, so with all
//! other directions fixed the objective is a convex function `f(a)` of one
//! direction `a`. Replacing `a` by `grad f(a) / |grad f(a)|` therefore never
//! decreases it. A search round runs a coarse spherical grid on each
//! direction in turn and then cycles this block ascent until it stalls.
//!
//! The planar variant lets each experiment choose its own settings but pins
//! every party's directions, across all of its experiments, to one plane.
//! Directions are then in-plane angles, and a plane (an orthonormal frame)
//! is updated as a block by the polar factor of its gradient, which again
//! maximizes the linearization of a convex function.

use nalgebra::Matrix3x2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bell::{
    contract_table, general_value_raw, mermin_value_raw, walsh_hadamard, Budget, MERMIN_TERMS,
};
use crate::qstate::LocalCorrelations;

type Pair = [[f64; 3]; 2];

const ASCENT_TOLERANCE: f64 = 1e-14;
const INNER_ITERATIONS: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Score {
    General,
    Mermin,
    GeneralSquared,
    MerminSquared,
}

impl Score {
    /// Raw functional value (`L` or `M`) of a table.
    pub(crate) fn functional(self, table: &[f64]) -> f64 {
        match self {
            Score::General | Score::GeneralSquared => general_value_raw(table),
            Score::Mermin | Score::MerminSquared => mermin_value_raw(table),
        }
    }

    fn value(self, table: &[f64]) -> f64 {
        let f = self.functional(table);
        match self {
            Score::General | Score::Mermin => f,
            Score::GeneralSquared | Score::MerminSquared => f * f,
        }
    }

    /// A (sub)gradient of the score with respect to the table entries.
    fn gradient(self, table: &[f64]) -> Vec<f64> {
        let grad_functional = |t: &[f64]| -> Vec<f64> {
            match self {
                Score::General | Score::GeneralSquared => {
                    let mut s = t.to_vec();
                    walsh_hadamard(&mut s);
                    let mut signs: Vec<f64> = s
                        .iter()
                        .map(|v| if *v >= 0.0 { 1.0 } else { -1.0 })
                        .collect();
                    walsh_hadamard(&mut signs);
                    let scale = t.len() as f64;
                    signs.into_iter().map(|v| v / scale).collect()
                }
                Score::Mermin | Score::MerminSquared => {
                    let mut g = vec![0.0; t.len()];
                    for &(i, c) in &MERMIN_TERMS {
                        g[i] = c;
                    }
                    g
                }
            }
        };
        let mut g = grad_functional(table);
        if matches!(self, Score::GeneralSquared | Score::MerminSquared) {
            let f2 = 2.0 * self.functional(table);
            g.iter_mut().for_each(|v| *v *= f2);
        }
        g
    }
}

#[derive(Debug, Clone)]
pub(crate) struct Experiment {
    /// Indices into the problem's party list, in local-tensor order.
    parties: Vec<usize>,
    local: LocalCorrelations,
}

impl Experiment {
    pub(crate) fn new(parties: Vec<usize>, local: LocalCorrelations) -> Self {
        debug_assert_eq!(parties.len(), local.parties());
        Self { parties, local }
    }

    fn table(&self, settings: &[Pair]) -> Vec<f64> {
        let pairs: Vec<Pair> = self.parties.iter().map(|&p| settings[p]).collect();
        contract_table(&self.local, &pairs)
    }
}

#[derive(Debug, Clone)]
pub(crate) struct SearchProblem {
    n_parties: usize,
    experiments: Vec<Experiment>,
    score: Score,
    /// Parties that appear in at least one experiment.
    active: Vec<usize>,
}

#[derive(Debug, Clone)]
pub(crate) struct SearchResult {
    pub settings: Vec<Pair>,
    pub per_experiment: Vec<f64>,
}

/// Affine dependence of one experiment's table on one direction:
/// `table(a) = offset + sum_c a_c basis[c]`.
struct Slice {
    offset: Vec<f64>,
    basis: [Vec<f64>; 3],
}

impl Slice {
    fn table(&self, a: &[f64; 3]) -> Vec<f64> {
        self.offset
            .iter()
            .enumerate()
            .map(|(i, o)| {
                o + a[0] * self.basis[0][i] + a[1] * self.basis[1][i] + a[2] * self.basis[2][i]
            })
            .collect()
    }
}

/// Affine dependence of a table on direction `slot` of local party `pos`.
fn slice_of(local: &LocalCorrelations, pairs: &mut [Pair], pos: usize, slot: usize) -> Slice {
    let saved = pairs[pos][slot];
    pairs[pos][slot] = [0.0; 3];
    let offset = contract_table(local, pairs);
    let basis = [0, 1, 2].map(|c| {
        let mut unit = [0.0; 3];
        unit[c] = 1.0;
        pairs[pos][slot] = unit;
        let t = contract_table(local, pairs);
        t.iter()
            .zip(&offset)
            .map(|(a, b)| a - b)
            .collect::<Vec<_>>()
    });
    pairs[pos][slot] = saved;
    Slice { offset, basis }
}

impl SearchProblem {
    pub(crate) fn new(n_parties: usize, experiments: Vec<Experiment>, score: Score) -> Self {
        let mut active: Vec<usize> = experiments.iter().flat_map(|e| e.parties.clone()).collect();
        active.sort_unstable();
        active.dedup();
        Self {
            n_parties,
            experiments,
            score,
            active,
        }
    }

    pub(crate) fn evaluate(&self, settings: &[Pair]) -> (f64, Vec<f64>) {
        let mut total = 0.0;
        let per = self
            .experiments
            .iter()
            .map(|e| {
                let t = e.table(settings);
                total += self.score.value(&t);
                self.score.functional(&t)
            })
            .collect();
        (total, per)
    }

    /// Objective as a function of direction `slot` of `party`, all else fixed.
    fn block(&self, settings: &[Pair], party: usize, slot: usize) -> (f64, Vec<Slice>) {
        let mut constant = 0.0;
        let mut slices = Vec::new();
        for e in &self.experiments {
            match e.parties.iter().position(|&p| p == party) {
                None => constant += self.score.value(&e.table(settings)),
                Some(pos) => {
                    let mut pairs: Vec<Pair> = e.parties.iter().map(|&p| settings[p]).collect();
                    slices.push(slice_of(&e.local, &mut pairs, pos, slot));
                }
            }
        }
        (constant, slices)
    }

    fn block_value(&self, constant: f64, slices: &[Slice], a: &[f64; 3]) -> f64 {
        constant
            + slices
                .iter()
                .map(|s| self.score.value(&s.table(a)))
                .sum::<f64>()
    }

    fn block_gradient(&self, slices: &[Slice], a: &[f64; 3]) -> [f64; 3] {
        let mut g = [0.0; 3];
        for s in slices {
            let dt = self.score.gradient(&s.table(a));
            for (c, gc) in g.iter_mut().enumerate() {
                *gc += dot(&dt, &s.basis[c]);
            }
        }
        g
    }

    /// Best point of a `resolution x resolution` spherical grid for one
    /// direction; keeps the current direction unless a grid point is better.
    fn grid_block(&self, settings: &mut [Pair], party: usize, slot: usize, resolution: usize) {
        let (constant, slices) = self.block(settings, party, slot);
        let mut best = self.block_value(constant, &slices, &settings[party][slot]);
        let mut best_dir = settings[party][slot];
        for i in 0..resolution {
            let theta = std::f64::consts::PI * i as f64 / (resolution - 1) as f64;
            for j in 0..resolution {
                let phi = 2.0 * std::f64::consts::PI * j as f64 / resolution as f64;
                let a = [
                    theta.sin() * phi.cos(),
                    theta.sin() * phi.sin(),
                    theta.cos(),
                ];
                let v = self.block_value(constant, &slices, &a);
                if v > best + ASCENT_TOLERANCE {
                    best = v;
                    best_dir = a;
                }
            }
        }
        settings[party][slot] = best_dir;
    }

    /// Monotone ascent on one direction; returns the new block value.
    fn ascend_block(&self, settings: &mut [Pair], party: usize, slot: usize) -> f64 {
        let (constant, slices) = self.block(settings, party, slot);
        let mut a = settings[party][slot];
        let mut current = self.block_value(constant, &slices, &a);
        for _ in 0..INNER_ITERATIONS {
            let g = self.block_gradient(&slices, &a);
            let norm = (g[0] * g[0] + g[1] * g[1] + g[2] * g[2]).sqrt();
            if norm < 1e-14 {
                break;
            }
            let next = [g[0] / norm, g[1] / norm, g[2] / norm];
            let value = self.block_value(constant, &slices, &next);
            if value < current - 1e-15 {
                break;
            }
            let step = (0..3).map(|c| (next[c] - a[c]).abs()).fold(0.0, f64::max);
            a = next;
            current = value;
            if step < 1e-13 {
                break;
            }
        }
        settings[party][slot] = a;
        current
    }

    fn refine(&self, settings: &mut [Pair], budget: &Budget) -> f64 {
        let mut value = self.evaluate(settings).0;
        for _ in 0..budget.refinement_passes {
            for &p in &self.active {
                for slot in 0..2 {
                    self.grid_block(settings, p, slot, budget.grid_resolution);
                }
            }
            value = self.evaluate(settings).0;
            for _ in 0..budget.max_sweeps {
                let before = value;
                for &p in &self.active {
                    for slot in 0..2 {
                        value = self.ascend_block(settings, p, slot);
                    }
                }
                if value - before <= ASCENT_TOLERANCE * before.abs().max(1.0) {
                    break;
                }
            }
        }
        value
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn in_plane(frame: &Pair, theta: f64) -> [f64; 3] {
    let (s, c) = theta.sin_cos();
    [0, 1, 2].map(|i| c * frame[0][i] + s * frame[1][i])
}

/// Orthonormal frame whose plane contains both directions of `pair`, with
/// the in-plane angles that reproduce it.
fn frame_of(pair: &Pair) -> (Pair, [f64; 2]) {
    let [a, b] = *pair;
    let d = dot(&a, &b);
    let mut e2 = [0, 1, 2].map(|i| b[i] - d * a[i]);
    let mut norm = dot(&e2, &e2).sqrt();
    if norm < 1e-9 {
        // parallel settings: any plane through `a` will do
        let helper = if a[0].abs() < 0.9 {
            [1.0, 0.0, 0.0]
        } else {
            [0.0, 1.0, 0.0]
        };
        let h = dot(&helper, &a);
        e2 = [0, 1, 2].map(|i| helper[i] - h * a[i]);
        norm = dot(&e2, &e2).sqrt();
    }
    e2.iter_mut().for_each(|v| *v /= norm);
    let frame = [a, e2];
    (frame, [0.0, dot(&b, &e2).atan2(d)])
}

/// Planar search point: one frame per party, and per experiment and local
/// party a pair of in-plane angles.
#[derive(Debug, Clone)]
struct PlanarPoint {
    frames: Vec<Pair>,
    angles: Vec<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone)]
pub(crate) struct PlanarResult {
    /// Per experiment, the settings of its parties in local order.
    pub settings: Vec<Vec<Pair>>,
    pub per_experiment: Vec<f64>,
}

impl SearchProblem {
    fn planar_pairs(&self, point: &PlanarPoint, e: usize) -> Vec<Pair> {
        self.experiments[e]
            .parties
            .iter()
            .zip(&point.angles[e])
            .map(|(&p, [t1, t2])| {
                [
                    in_plane(&point.frames[p], *t1),
                    in_plane(&point.frames[p], *t2),
                ]
            })
            .collect()
    }

    fn planar_score(&self, point: &PlanarPoint, e: usize) -> f64 {
        self.score.value(&contract_table(
            &self.experiments[e].local,
            &self.planar_pairs(point, e),
        ))
    }

    fn planar_evaluate(&self, point: &PlanarPoint) -> (f64, Vec<f64>) {
        let mut total = 0.0;
        let per = (0..self.experiments.len())
            .map(|e| {
                let t = contract_table(&self.experiments[e].local, &self.planar_pairs(point, e));
                total += self.score.value(&t);
                self.score.functional(&t)
            })
            .collect();
        (total, per)
    }

    fn angle_slice(&self, point: &PlanarPoint, e: usize, pos: usize, slot: usize) -> Slice {
        let mut pairs = self.planar_pairs(point, e);
        slice_of(&self.experiments[e].local, &mut pairs, pos, slot)
    }

    fn grid_angle(
        &self,
        point: &mut PlanarPoint,
        e: usize,
        pos: usize,
        slot: usize,
        resolution: usize,
    ) {
        let slice = self.angle_slice(point, e, pos, slot);
        let frame = point.frames[self.experiments[e].parties[pos]];
        let value = |theta: f64| self.score.value(&slice.table(&in_plane(&frame, theta)));
        let mut best = value(point.angles[e][pos][slot]);
        for j in 0..resolution {
            let theta = std::f64::consts::TAU * j as f64 / resolution as f64;
            let v = value(theta);
            if v > best + ASCENT_TOLERANCE {
                best = v;
                point.angles[e][pos][slot] = theta;
            }
        }
    }

    fn ascend_angle(&self, point: &mut PlanarPoint, e: usize, pos: usize, slot: usize) {
        let slice = self.angle_slice(point, e, pos, slot);
        let frame = point.frames[self.experiments[e].parties[pos]];
        let mut theta = point.angles[e][pos][slot];
        let mut current = self.score.value(&slice.table(&in_plane(&frame, theta)));
        for _ in 0..INNER_ITERATIONS {
            let dt = self.score.gradient(&slice.table(&in_plane(&frame, theta)));
            let g = [0, 1, 2].map(|c| dot(&dt, &slice.basis[c]));
            let (g1, g2) = (dot(&g, &frame[0]), dot(&g, &frame[1]));
            if g1.hypot(g2) < 1e-14 {
                break;
            }
            let next = g2.atan2(g1);
            let value = self.score.value(&slice.table(&in_plane(&frame, next)));
            if value < current - 1e-15 {
                break;
            }
            let step = (next - theta).sin().abs();
            theta = next;
            current = value;
            if step < 1e-13 {
                break;
            }
        }
        point.angles[e][pos][slot] = theta;
    }

    /// Replaces the frame of `party` by the polar factor of the objective's
    /// gradient with respect to the frame, while that does not decrease it.
    fn ascend_frame(&self, point: &mut PlanarPoint, party: usize) {
        let involved: Vec<(usize, usize)> = self
            .experiments
            .iter()
            .enumerate()
            .filter_map(|(e, x)| {
                x.parties
                    .iter()
                    .position(|&p| p == party)
                    .map(|pos| (e, pos))
            })
            .collect();
        let part = |point: &PlanarPoint| {
            involved
                .iter()
                .map(|&(e, _)| self.planar_score(point, e))
                .sum::<f64>()
        };
        let mut current = part(point);
        for _ in 0..INNER_ITERATIONS {
            let mut grad = Matrix3x2::<f64>::zeros();
            for &(e, pos) in &involved {
                let table =
                    contract_table(&self.experiments[e].local, &self.planar_pairs(point, e));
                let dt = self.score.gradient(&table);
                for slot in 0..2 {
                    let slice = self.angle_slice(point, e, pos, slot);
                    let (s, c) = point.angles[e][pos][slot].sin_cos();
                    for i in 0..3 {
                        let g = dot(&dt, &slice.basis[i]);
                        grad[(i, 0)] += c * g;
                        grad[(i, 1)] += s * g;
                    }
                }
            }
            if grad.norm() < 1e-14 {
                break;
            }
            let svd = grad.svd(true, true);
            let polar: Matrix3x2<f64> =
                svd.u.expect("u requested") * svd.v_t.expect("v_t requested");
            let previous = point.frames[party];
            let next = [0, 1].map(|k| [0, 1, 2].map(|i| polar[(i, k)]));
            point.frames[party] = next;
            let value = part(point);
            if value < current - 1e-15 {
                point.frames[party] = previous;
                break;
            }
            let step = (0..2)
                .flat_map(|k| (0..3).map(move |i| (k, i)))
                .map(|(k, i)| (next[k][i] - previous[k][i]).abs())
                .fold(0.0, f64::max);
            current = value;
            if step < 1e-13 {
                break;
            }
        }
    }

    fn refine_planar(&self, point: &mut PlanarPoint, budget: &Budget) -> f64 {
        let slots: Vec<(usize, usize, usize)> = self
            .experiments
            .iter()
            .enumerate()
            .flat_map(|(e, x)| (0..x.parties.len()).flat_map(move |pos| [(e, pos, 0), (e, pos, 1)]))
            .collect();
        let mut value = self.planar_evaluate(point).0;
        for _ in 0..budget.refinement_passes {
            for &(e, pos, slot) in &slots {
                self.grid_angle(point, e, pos, slot, budget.grid_resolution);
            }
            value = self.planar_evaluate(point).0;
            for _ in 0..budget.max_sweeps {
                let before = value;
                for &p in &self.active {
                    self.ascend_frame(point, p);
                }
                for &(e, pos, slot) in &slots {
                    self.ascend_angle(point, e, pos, slot);
                }
                value = self.planar_evaluate(point).0;
                if value - before <= ASCENT_TOLERANCE * before.abs().max(1.0) {
                    break;
                }
            }
        }
        value
    }

    /// Planar point reproducing shared settings exactly.
    fn planar_from_settings(&self, settings: &[Pair]) -> PlanarPoint {
        let converted: Vec<(Pair, [f64; 2])> = settings.iter().map(frame_of).collect();
        PlanarPoint {
            frames: converted.iter().map(|(f, _)| *f).collect(),
            angles: self
                .experiments
                .iter()
                .map(|x| x.parties.iter().map(|&p| converted[p].1).collect())
                .collect(),
        }
    }
}

fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let r = (1.0 - z * z).max(0.0).sqrt();
    [r * phi.cos(), r * phi.sin(), z]
}

/// Start 0 puts every party at `(x, y)`; the others are seeded random.
fn start_settings(n_parties: usize, start: usize, seed: u64) -> Vec<Pair> {
    if start == 0 {
        return vec![[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]; n_parties];
    }
    let mut rng = ChaCha8Rng::seed_from_u64(
        seed.wrapping_add((start as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15)),
    );
    (0..n_parties)
        .map(|_| [random_direction(&mut rng), random_direction(&mut rng)])
        .collect()
}

/// Runs every start (in parallel) and keeps the first best result.
pub(crate) fn maximize(problem: &SearchProblem, budget: &Budget) -> SearchResult {
    let results: Vec<(f64, Vec<Pair>)> = (0..=budget.restarts)
        .into_par_iter()
        .map(|start| {
            let mut settings = start_settings(problem.n_parties, start, budget.seed);
            let value = problem.refine(&mut settings, budget);
            (value, settings)
        })
        .collect();
    let mut best = 0;
    for (i, (v, _)) in results.iter().enumerate() {
        if *v > results[best].0 + ASCENT_TOLERANCE {
            best = i;
        }
    }
    let settings = results[best].1.clone();
    let per_experiment = problem.evaluate(&settings).1;
    SearchResult {
        settings,
        per_experiment,
    }
}

/// Maximizes with shared planes. The starts are those of [`maximize`],
/// converted to planar points, plus the optimum of the shared-settings
/// search, so the result is never below it.
pub(crate) fn maximize_planar(problem: &SearchProblem, budget: &Budget) -> PlanarResult {
    let shared = maximize(problem, budget);
    let mut starts = vec![problem.planar_from_settings(&shared.settings)];
    starts.extend((0..=budget.restarts).map(|start| {
        problem.planar_from_settings(&start_settings(problem.n_parties, start, budget.seed))
    }));
    let results: Vec<(f64, PlanarPoint)> = starts
        .into_par_iter()
        .map(|mut point| {
            let value = problem.refine_planar(&mut point, budget);
            (value, point)
        })
        .collect();
    let mut best = 0;
    for (i, (v, _)) in results.iter().enumerate() {
        if *v > results[best].0 + ASCENT_TOLERANCE {
            best = i;
        }
    }
    let point = &results[best].1;
    PlanarResult {
        settings: (0..problem.experiments.len())
            .map(|e| problem.planar_pairs(point, e))
            .collect(),
        per_experiment: problem.planar_evaluate(point).1,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{random_pure_state, QuantumState};

    fn problem(score: Score, seed: u64) -> SearchProblem {
        let s = random_pure_state(3, seed).unwrap();
        let ab = LocalCorrelations::from_state(&s, &[0, 1]).unwrap();
        let ac = LocalCorrelations::from_state(&s, &[0, 2]).unwrap();
        SearchProblem::new(
            3,
            vec![
                Experiment::new(vec![0, 1], ab),
                Experiment::new(vec![0, 2], ac),
            ],
            score,
        )
    }

    #[test]
    fn block_ascent_never_decreases() {
        for seed in 0..5 {
            for score in [Score::GeneralSquared, Score::MerminSquared, Score::General] {
                let p = if score == Score::MerminSquared {
                    let s = random_pure_state(3, seed).unwrap();
                    let l = LocalCorrelations::from_state(&s, &[0, 1, 2]).unwrap();
                    SearchProblem::new(3, vec![Experiment::new(vec![0, 1, 2], l)], score)
                } else {
                    problem(score, seed)
                };
                let mut settings = start_settings(3, 1, seed);
                let mut value = p.evaluate(&settings).0;
                for _ in 0..5 {
                    for party in 0..3 {
                        for slot in 0..2 {
                            let next = p.ascend_block(&mut settings, party, slot);
                            assert!(next >= value - 1e-12, "{next} < {value}");
                            value = next;
                            assert!((p.evaluate(&settings).0 - value).abs() < 1e-12);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn subgradient_matches_finite_differences() {
        let s = random_pure_state(3, 42).unwrap();
        assert_eq!(s.n_qubits(), 3);
        let table: Vec<f64> = vec![0.3, -0.1, 0.25, 0.7, -0.4, 0.05, 0.2, -0.6];
        for score in [
            Score::General,
            Score::GeneralSquared,
            Score::Mermin,
            Score::MerminSquared,
        ] {
            let g = score.gradient(&table);
            for i in 0..table.len() {
                let h = 1e-7;
                let mut up = table.clone();
                up[i] += h;
                let mut down = table.clone();
                down[i] -= h;
                let fd = (score.value(&up) - score.value(&down)) / (2.0 * h);
                assert!((fd - g[i]).abs() < 1e-6, "{score:?} {i}: {fd} vs {}", g[i]);
            }
        }
    }

    #[test]
    fn planar_search_dominates_shared_settings() {
        for seed in 0..4 {
            let p = problem(Score::GeneralSquared, seed);
            let budget = Budget::sampling();
            let shared = maximize(&p, &budget);
            let planar = maximize_planar(&p, &budget);
            let total: f64 = planar.per_experiment.iter().map(|v| v * v).sum();
            let shared_total = p.evaluate(&shared.settings).0;
            assert!(total >= shared_total - 1e-12, "{total} < {shared_total}");
            // party 0 keeps one plane across both experiments
            let normal = |pair: &Pair| {
                let [a, b] = pair;
                [
                    a[1] * b[2] - a[2] * b[1],
                    a[2] * b[0] - a[0] * b[2],
                    a[0] * b[1] - a[1] * b[0],
                ]
            };
            let n1 = normal(&planar.settings[0][0]);
            let n2 = normal(&planar.settings[1][0]);
            let cross = normal(&[n1, n2]);
            assert!(dot(&cross, &cross).sqrt() < 1e-9 * dot(&n1, &n1).sqrt().max(1e-300) + 1e-9);
        }
    }

    #[test]
    fn frame_conversion_round_trips() {
        let pair = [[0.0, 0.6, 0.8], [1.0, 0.0, 0.0]];
        let (frame, [t1, t2]) = frame_of(&pair);
        for (k, t) in [t1, t2].into_iter().enumerate() {
            let d = in_plane(&frame, t);
            for i in 0..3 {
                assert!((d[i] - pair[k][i]).abs() < 1e-12);
            }
        }
        let (frame, _) = frame_of(&[[0.0, 0.0, 1.0], [0.0, 0.0, 1.0]]);
        assert!(dot(&frame[0], &frame[1]).abs() < 1e-12);
    }

    #[test]
    fn search_is_deterministic() {
        let p = problem(Score::GeneralSquared, 3);
        let budget = Budget::sampling();
        let a = maximize(&p, &budget);
        let b = maximize(&p, &budget);
        assert_eq!(a.settings, b.settings);
        assert_eq!(a.per_experiment, b.per_experiment);
    }
}
