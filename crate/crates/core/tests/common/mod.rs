//! Independent reference implementations shared by the integration tests.
//! Nothing here calls the library's counting code.

#![allow(dead_code)]

use std::collections::{HashMap, HashSet};

use rand::Rng;
use sc_ldpc::code::{CirculantBlockCode, PartitionMatrix, ScCodeSpec};
use sc_ldpc::matrix::SparseBinaryMatrix;

/// Cycles-6 by closed walks: start at a column, leave through one row, come
/// back through another, and close through a third row. Each hexagon is seen
/// from 3 columns in 2 directions.
pub fn cycles6(h: &SparseBinaryMatrix) -> u64 {
    let mut walks = 0u64;
    for a in 0..h.cols() {
        let rows_a = h.col(a);
        for &r1 in rows_a {
            for &r2 in rows_a {
                if r1 == r2 {
                    continue;
                }
                for &b in h.row(r1) {
                    if b == a {
                        continue;
                    }
                    for &c in h.row(r2) {
                        if c == a || c == b {
                            continue;
                        }
                        walks += h
                            .col(b)
                            .iter()
                            .filter(|&&r3| r3 != r1 && r3 != r2 && h.get(r3, c))
                            .count() as u64;
                    }
                }
            }
        }
    }
    assert_eq!(walks % 6, 0);
    walks / 6
}

/// Cycles-4: every pair of columns sharing `s` rows closes `C(s, 2)` of them.
pub fn cycles4(h: &SparseBinaryMatrix) -> u64 {
    let mut n = 0u64;
    for a in 0..h.cols() {
        for b in a + 1..h.cols() {
            let s = h.col(a).iter().filter(|&&r| h.get(r, b)).count() as u64;
            n += s * s.saturating_sub(1) / 2;
        }
    }
    n
}

/// Number of columns whose pattern puts every stacked row `x·γ + i` of `rows`
/// in component `x` at position `i`.
pub fn direct_overlap(partition: &PartitionMatrix, rows: &[usize]) -> i64 {
    let g = partition.gamma();
    (0..partition.kappa())
        .filter(|&j| rows.iter().all(|&r| partition.component(r % g, j) == r / g))
        .count() as i64
}

/// Every connected VN set of size `a`, grown one neighbour at a time.
pub fn connected_sets(h: &SparseBinaryMatrix, a: usize) -> HashSet<Vec<usize>> {
    let neighbours: Vec<Vec<usize>> = (0..h.cols())
        .map(|v| {
            let mut n: Vec<usize> = h
                .col(v)
                .iter()
                .flat_map(|&r| h.row(r).iter().copied())
                .filter(|&u| u != v)
                .collect();
            n.sort_unstable();
            n.dedup();
            n
        })
        .collect();
    let mut level: HashSet<Vec<usize>> = (0..h.cols()).map(|v| vec![v]).collect();
    for _ in 1..a {
        let mut next = HashSet::with_capacity(level.len() * 8);
        for set in &level {
            for &v in set {
                for &u in &neighbours[v] {
                    if let Err(at) = set.binary_search(&u) {
                        let mut grown = set.clone();
                        grown.insert(at, u);
                        next.insert(grown);
                    }
                }
            }
        }
        level = next;
    }
    level
}

/// `(b, absorbing)` for a VN set: odd-degree CNs in the induced subgraph, and
/// whether each VN sees more even-degree than odd-degree CNs.
pub fn classify_oracle(h: &SparseBinaryMatrix, set: &[usize]) -> (usize, bool) {
    let mut deg: HashMap<usize, usize> = HashMap::new();
    for &v in set {
        for &r in h.col(v) {
            *deg.entry(r).or_default() += 1;
        }
    }
    let b = deg.values().filter(|&&d| d % 2 == 1).count();
    let absorbing = set.iter().all(|&v| {
        let odd = h.col(v).iter().filter(|r| deg[r] % 2 == 1).count();
        h.col(v).len() - odd > odd
    });
    (b, absorbing)
}

/// Connected `(a, b)` sets: `(all, absorbing only)`.
pub fn species_counts(h: &SparseBinaryMatrix, a: usize, b: usize) -> (u64, u64) {
    let mut counts = (0, 0);
    for set in connected_sets(h, a) {
        let (bb, absorbing) = classify_oracle(h, &set);
        if bb == b {
            counts.0 += 1;
            counts.1 += absorbing as u64;
        }
    }
    counts
}

/// A random spec with the given shape: uniform partition and powers.
pub fn random_spec(
    rng: &mut impl Rng,
    gamma: usize,
    kappa: usize,
    m: usize,
    p: usize,
    l: usize,
) -> ScCodeSpec {
    let assign = (0..gamma * kappa).map(|_| rng.gen_range(0..=m)).collect();
    let powers = (0..gamma * kappa).map(|_| rng.gen_range(0..p)).collect();
    ScCodeSpec::new(
        CirculantBlockCode::new(gamma, kappa, p, powers).unwrap(),
        PartitionMatrix::new(gamma, kappa, m, assign).unwrap(),
        l,
    )
    .unwrap()
}
