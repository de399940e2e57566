//! Dense-matrix oracles shared by the integration tests. Nothing here calls
//! into the library's numerics; states come in as plain amplitude vectors.
#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type Matrix = Vec<Vec<Complex64>>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);
const I: Complex64 = Complex64::new(0.0, 1.0);

pub fn single(c: char) -> Matrix {
    match c {
        'I' => vec![vec![ONE, ZERO], vec![ZERO, ONE]],
        'X' => vec![vec![ZERO, ONE], vec![ONE, ZERO]],
        'Y' => vec![vec![ZERO, -I], vec![I, ZERO]],
        'Z' => vec![vec![ONE, ZERO], vec![ZERO, -ONE]],
        _ => panic!("bad Pauli {c}"),
    }
}

/// `a . sigma`.
pub fn direction_matrix(a: [f64; 3]) -> Matrix {
    let (x, y, z) = (single('X'), single('Y'), single('Z'));
    (0..2)
        .map(|r| {
            (0..2)
                .map(|c| x[r][c] * a[0] + y[r][c] * a[1] + z[r][c] * a[2])
                .collect()
        })
        .collect()
}

pub fn kron(a: &Matrix, b: &Matrix) -> Matrix {
    let (n, m) = (a.len(), b.len());
    let mut out = vec![vec![ZERO; n * m]; n * m];
    for i in 0..n {
        for j in 0..n {
            for k in 0..m {
                for l in 0..m {
                    out[i * m + k][j * m + l] = a[i][j] * b[k][l];
                }
            }
        }
    }
    out
}

/// Tensor product with qubit `q` on bit `q` of the basis index, i.e.
/// `factors[n-1] (x) ... (x) factors[0]`.
pub fn operator(factors: &[Matrix]) -> Matrix {
    let mut out = vec![vec![ONE]];
    for f in factors.iter().rev() {
        out = kron(&out, f);
    }
    out
}

/// Dense matrix of a label, leftmost character on qubit 0.
pub fn pauli_matrix(label: &str) -> Matrix {
    let factors: Vec<Matrix> = label.chars().map(single).collect();
    operator(&factors)
}

pub fn matmul(a: &Matrix, b: &Matrix) -> Matrix {
    let n = a.len();
    let mut out = vec![vec![ZERO; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] == ZERO {
                continue;
            }
            for j in 0..n {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}

pub fn is_zero(a: &Matrix) -> bool {
    a.iter().flatten().all(|z| z.norm() < 1e-12)
}

pub fn anticommute_dense(a: &str, b: &str) -> bool {
    let (p, q) = (pauli_matrix(a), pauli_matrix(b));
    let pq = matmul(&p, &q);
    let qp = matmul(&q, &p);
    let sum: Matrix = pq
        .iter()
        .zip(&qp)
        .map(|(r, s)| r.iter().zip(s).map(|(x, y)| x + y).collect())
        .collect();
    is_zero(&sum)
}

pub fn matvec(a: &Matrix, v: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .map(|row| row.iter().zip(v).map(|(x, y)| x * y).sum())
        .collect()
}

/// `<psi|A|psi>`, real part.
pub fn dense_expectation(psi: &[Complex64], a: &Matrix) -> f64 {
    psi.iter()
        .zip(matvec(a, psi))
        .map(|(x, y)| x.conj() * y)
        .sum::<Complex64>()
        .re
}

/// `Tr[rho A]` with `rho = |psi><psi|` built explicitly.
pub fn dense_trace(psi: &[Complex64], a: &Matrix) -> f64 {
    let n = psi.len();
    let mut t = ZERO;
    for i in 0..n {
        for j in 0..n {
            // rho[i][j] = psi_i conj(psi_j); Tr[rho A] = sum_ij rho_ij A_ji
            t += psi[i] * psi[j].conj() * a[j][i];
        }
    }
    t.re
}

/// Haar-random amplitudes from complex Gaussians, any qubit count.
pub fn random_amplitudes(n: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x05EE_D0F0_AC1E);
    let mut v: Vec<Complex64> = (0..1usize << n)
        .map(|_| Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)))
        .collect();
    let norm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|z| *z /= norm);
    v
}

pub fn random_unit(rng: &mut ChaCha8Rng) -> [f64; 3] {
    loop {
        let v: [f64; 3] = [
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
            rng.sample(StandardNormal),
        ];
        let n = (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt();
        if n > 1e-6 {
            return v.map(|c| c / n);
        }
    }
}

/// Full correlation `<(x)_i a_i . sigma>` with identity on parties off `sites`.
pub fn dense_correlation(psi: &[Complex64], n: usize, sites: &[usize], dirs: &[[f64; 3]]) -> f64 {
    let mut factors = vec![single('I'); n];
    for (s, d) in sites.iter().zip(dirs) {
        factors[*s] = direction_matrix(*d);
    }
    dense_expectation(psi, &operator(&factors))
}

/// Correlation table by definition: entry index bit `N-1-i` selects party
/// i's second setting.
pub fn dense_table(
    psi: &[Complex64],
    n: usize,
    sites: &[usize],
    pairs: &[[[f64; 3]; 2]],
) -> Vec<f64> {
    let parties = sites.len();
    (0..1usize << parties)
        .map(|k| {
            let dirs: Vec<[f64; 3]> = (0..parties)
                .map(|i| pairs[i][(k >> (parties - 1 - i)) & 1])
                .collect();
            dense_correlation(psi, n, sites, &dirs)
        })
        .collect()
}

/// `2^-N sum_s |sum_k E_k prod_i s_i^(k_i)|` written out with loops.
pub fn general_value_by_definition(table: &[f64], parties: usize) -> f64 {
    let mut total = 0.0;
    for s in 0..1usize << parties {
        let mut inner = 0.0;
        for (k, e) in table.iter().enumerate() {
            let flips = (s & k).count_ones();
            inner += if flips % 2 == 0 { *e } else { -*e };
        }
        total += f64::abs(inner);
    }
    total / (1usize << parties) as f64
}

/// Maximum of `sum_k c_k prod_i A_i(k_i)` over deterministic `A_i(k) = +-1`.
pub fn lhv_by_enumeration(coefficients: &[f64], parties: usize) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for strategy in 0u32..1 << (2 * parties) {
        let value: f64 = coefficients
            .iter()
            .enumerate()
            .map(|(k, c)| {
                let mut sign = 1.0;
                for i in 0..parties {
                    let setting = (k >> (parties - 1 - i)) & 1;
                    if strategy >> (2 * i + setting) & 1 == 1 {
                        sign = -sign;
                    }
                }
                c * sign
            })
            .sum();
        best = best.max(value);
    }
    best
}

/// Anticommutation by counting sites where both factors are non-identity
/// and differ.
pub fn anticommute_by_sites(a: &str, b: &str) -> bool {
    a.chars()
        .zip(b.chars())
        .filter(|(x, y)| *x != 'I' && *y != 'I' && x != y)
        .count()
        % 2
        == 1
}

/// Applies `exp(-i theta Z / 2)` on qubit `q`.
pub fn rotate_z(psi: &mut [Complex64], q: usize, theta: f64) {
    for (i, amp) in psi.iter_mut().enumerate() {
        let sign = if i >> q & 1 == 1 { 1.0 } else { -1.0 };
        *amp *= Complex64::from_polar(1.0, sign * theta / 2.0);
    }
}
