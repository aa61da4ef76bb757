//! Absorbing and trapping sets: classification of variable-node (VN) sets,
//! the replica span bound, and windowed enumeration over the lifted code.

use std::collections::VecDeque;
use std::fmt;

use crate::census::{CycleCensus, Scale};
use crate::code::ScCodeSpec;
use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;

/// Largest `a` accepted by [`enumerate_objects`].
pub const MAX_OBJECT_SIZE: usize = 6;
/// Largest lifted window (in columns) accepted by [`enumerate_objects`].
pub const MAX_WINDOW_COLUMNS: usize = 4000;

/// The subgraph induced by a VN set: how many edges each neighbouring
/// check node (CN) receives from the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InducedConfig {
    pub vn_set: Vec<usize>,
    /// `(row, edges into the set)`, sorted by row.
    pub cn_degrees: Vec<(usize, usize)>,
}

impl InducedConfig {
    pub fn new(matrix: &SparseBinaryMatrix, vn_set: &[usize]) -> Result<Self> {
        if vn_set.is_empty() {
            return Err(Error::EmptySet);
        }
        let mut set = vn_set.to_vec();
        set.sort_unstable();
        set.dedup();
        if let Some(&c) = set.iter().find(|&&c| c >= matrix.cols()) {
            return Err(Error::InvalidParameters(format!(
                "column {c} outside a matrix with {} columns",
                matrix.cols()
            )));
        }
        Ok(Self {
            cn_degrees: cn_degrees(matrix, &set),
            vn_set: set,
        })
    }

    pub fn a(&self) -> usize {
        self.vn_set.len()
    }

    /// Number of odd-degree CNs.
    pub fn b(&self) -> usize {
        self.cn_degrees.iter().filter(|(_, d)| d % 2 == 1).count()
    }
}

fn cn_degrees(matrix: &SparseBinaryMatrix, set: &[usize]) -> Vec<(usize, usize)> {
    let mut rows: Vec<usize> = set
        .iter()
        .flat_map(|&c| matrix.col(c).iter().copied())
        .collect();
    rows.sort_unstable();
    let mut out: Vec<(usize, usize)> = Vec::new();
    for r in rows {
        match out.last_mut() {
            Some((last, d)) if *last == r => *d += 1,
            _ => out.push((r, 1)),
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Classification {
    pub a: usize,
    pub b: usize,
    /// Every VN has strictly more even-degree than odd-degree CN neighbours.
    pub absorbing: bool,
}

/// Classifies `vn_set` as an `(a, b)` trapping set and tests the absorbing
/// condition.
pub fn classify(matrix: &SparseBinaryMatrix, vn_set: &[usize]) -> Result<Classification> {
    let cfg = InducedConfig::new(matrix, vn_set)?;
    Ok(classify_config(matrix, &cfg))
}

fn classify_config(matrix: &SparseBinaryMatrix, cfg: &InducedConfig) -> Classification {
    let odd = |r: usize| {
        let i = cfg
            .cn_degrees
            .binary_search_by_key(&r, |&(row, _)| row)
            .expect("neighbour row is in the profile");
        cfg.cn_degrees[i].1 % 2 == 1
    };
    let absorbing = cfg.vn_set.iter().all(|&c| {
        let n_odd = matrix.col(c).iter().filter(|&&r| odd(r)).count();
        matrix.col(c).len() - n_odd > n_odd
    });
    Classification {
        a: cfg.a(),
        b: cfg.b(),
        absorbing,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ObjectKind {
    Trapping,
    Absorbing,
}

impl ObjectKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ObjectKind::Trapping => "TS",
            ObjectKind::Absorbing => "AS",
        }
    }
}

/// A target `(a, b)` object class with its VN-path bound `λ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ObjectSpecies {
    pub a: usize,
    pub b: usize,
    pub kind: ObjectKind,
    pub lambda: usize,
}

impl ObjectSpecies {
    fn matches(&self, c: &Classification) -> bool {
        c.a == self.a && c.b == self.b && (self.kind == ObjectKind::Trapping || c.absorbing)
    }

    /// Replica span bound from `λ`.
    pub fn chi(&self, m: usize) -> usize {
        chi(self.lambda, m)
    }
}

impl fmt::Display for ObjectSpecies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}) {}", self.a, self.b, self.kind.as_str())
    }
}

/// A configuration given by its VN-adjacency edges (two VNs adjacent iff
/// they share a degree-2 CN).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Template {
    pub a: usize,
    pub b: usize,
    pub kind: ObjectKind,
    pub edges: Vec<(usize, usize)>,
}

impl Template {
    pub fn species(&self) -> Result<ObjectSpecies> {
        Ok(ObjectSpecies {
            a: self.a,
            b: self.b,
            kind: self.kind,
            lambda: compute_lambda(self.a, &self.edges)?,
        })
    }
}

/// `λ`: the largest number of VNs on a shortest path between two VNs of the
/// configuration.
pub fn compute_lambda(a: usize, edges: &[(usize, usize)]) -> Result<usize> {
    if a == 0 {
        return Err(Error::EmptySet);
    }
    let mut adj = vec![Vec::new(); a];
    for &(u, v) in edges {
        if u >= a || v >= a {
            return Err(Error::InvalidParameters(format!(
                "edge ({u}, {v}) outside {a} VNs"
            )));
        }
        adj[u].push(v);
        adj[v].push(u);
    }
    let mut lambda = 1;
    for s in 0..a {
        let mut dist = vec![usize::MAX; a];
        dist[s] = 0;
        let mut queue = VecDeque::from([s]);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        if dist.contains(&usize::MAX) {
            return Err(Error::Disconnected);
        }
        lambda = lambda.max(dist.iter().max().expect("a >= 1") + 1);
    }
    Ok(lambda)
}

/// `χ = (λ-1)m + 1`.
pub fn chi(lambda: usize, m: usize) -> usize {
    lambda.saturating_sub(1) * m + 1
}

/// Built-in templates of the dominant objects for column weight `gamma`
/// (3, 4 or 5; others get none).
pub fn species_templates(gamma: usize) -> Vec<Template> {
    use ObjectKind::Absorbing;
    let t = |a, b, edges: &[(usize, usize)]| Template {
        a,
        b,
        kind: Absorbing,
        edges: edges.to_vec(),
    };
    let k4 = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];
    match gamma {
        3 => vec![
            t(3, 3, &[(0, 1), (1, 2), (2, 0)]),
            t(4, 2, &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)]),
            t(5, 3, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0), (0, 2)]),
            t(5, 3, &[(0, 2), (0, 3), (0, 4), (1, 2), (1, 3), (1, 4)]),
        ],
        4 => vec![
            t(4, 4, &k4),
            t(
                6,
                4,
                &[
                    (4, 0),
                    (4, 1),
                    (4, 2),
                    (4, 3),
                    (5, 0),
                    (5, 1),
                    (5, 2),
                    (5, 3),
                    (0, 1),
                    (2, 3),
                ],
            ),
        ],
        5 => {
            // cube, its four long diagonals, and one face diagonal
            let mut cube: Vec<(usize, usize)> = (0..8usize)
                .flat_map(|u| (0..3).map(move |bit| (u, u ^ (1 << bit))))
                .filter(|(u, v)| u < v)
                .collect();
            cube.extend((0..4).map(|u| (u, 7 - u)));
            cube.push((0, 3));
            vec![t(4, 8, &k4), t(8, 6, &cube)]
        }
        _ => Vec::new(),
    }
}

/// Columns adjacent to each column (sharing a row), sorted.
fn vn_adjacency(matrix: &SparseBinaryMatrix) -> Vec<Vec<usize>> {
    (0..matrix.cols())
        .map(|c| {
            let mut n: Vec<usize> = matrix
                .col(c)
                .iter()
                .flat_map(|&r| matrix.row(r).iter().copied())
                .filter(|&x| x != c)
                .collect();
            n.sort_unstable();
            n.dedup();
            n
        })
        .collect()
}

/// Enumerates each connected VN set of size `a` whose smallest column is
/// one of `roots`, exactly once.
fn connected_subsets(
    adj: &[Vec<usize>],
    a: usize,
    roots: impl Iterator<Item = usize>,
    mut emit: impl FnMut(&[usize]),
) {
    // `mark[u]` counts set members equal or adjacent to `u`
    let mut mark = vec![0u32; adj.len()];
    let mut sub = Vec::with_capacity(a);

    fn extend(
        adj: &[Vec<usize>],
        a: usize,
        root: usize,
        sub: &mut Vec<usize>,
        ext: Vec<usize>,
        mark: &mut [u32],
        emit: &mut dyn FnMut(&[usize]),
    ) {
        if sub.len() == a {
            emit(sub);
            return;
        }
        let mut ext = ext;
        while let Some(w) = ext.pop() {
            let mut next = ext.clone();
            next.extend(adj[w].iter().copied().filter(|&u| u > root && mark[u] == 0));
            sub.push(w);
            mark[w] += 1;
            for &u in &adj[w] {
                mark[u] += 1;
            }
            extend(adj, a, root, sub, next, mark, emit);
            sub.pop();
            mark[w] -= 1;
            for &u in &adj[w] {
                mark[u] -= 1;
            }
        }
    }

    for v in roots {
        sub.clear();
        sub.push(v);
        mark[v] += 1;
        for &u in &adj[v] {
            mark[u] += 1;
        }
        let ext: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
        extend(adj, a, v, &mut sub, ext, &mut mark, &mut emit);
        mark[v] -= 1;
        for &u in &adj[v] {
            mark[u] -= 1;
        }
    }
}

/// Counts connected instances of `species` in the lifted code: every
/// instance whose lowest column lies in replica 1 is found in the lifted
/// window `Π_1^K`, tagged by its span, and the per-span counts are weighted
/// by `L-k+1`.
///
/// `K = min(L, (a-1)m+1)`: consecutive VNs of a connected set sit at most
/// `m` replicas apart, so this covers every instance whatever its shape.
pub fn enumerate_objects(spec: &ScCodeSpec, species: &ObjectSpecies) -> Result<CycleCensus> {
    let (m, l) = (spec.memory(), spec.coupling_length());
    if species.a == 0 {
        return Err(Error::EmptySet);
    }
    if species.a > MAX_OBJECT_SIZE {
        return Err(Error::CapExceeded(format!(
            "a = {} > {MAX_OBJECT_SIZE}; use the protograph cycle census for larger objects",
            species.a
        )));
    }
    let k = ((species.a - 1) * m + 1).min(l);
    let width = spec.kappa() * spec.p();
    if k * width > MAX_WINDOW_COLUMNS {
        return Err(Error::CapExceeded(format!(
            "lifted window has {} columns > {MAX_WINDOW_COLUMNS}; use the protograph cycle census",
            k * width
        )));
    }
    let window = spec.lifted_window(1, k)?;
    let mut per_k = vec![0u64; k];
    count_species(&window, species, 0..width, |set| {
        let span = set.iter().max().expect("non-empty") / width + 1;
        per_k[span - 1] += 1;
    });
    Ok(CycleCensus::from_per_k(Scale::Lifted, per_k, l, m))
}

/// Every connected instance of `species` in a matrix, over the whole matrix.
pub fn count_species_in(matrix: &SparseBinaryMatrix, species: &ObjectSpecies) -> u64 {
    let mut n = 0;
    count_species(matrix, species, 0..matrix.cols(), |_| n += 1);
    n
}

fn count_species(
    matrix: &SparseBinaryMatrix,
    species: &ObjectSpecies,
    roots: std::ops::Range<usize>,
    mut hit: impl FnMut(&[usize]),
) {
    let adj = vn_adjacency(matrix);
    connected_subsets(&adj, species.a, roots, |set| {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        let cfg = InducedConfig {
            cn_degrees: cn_degrees(matrix, &sorted),
            vn_set: sorted,
        };
        if cfg.b() == species.b && species.matches(&classify_config(matrix, &cfg)) {
            hit(&cfg.vn_set);
        }
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::code::{partition_from_cutting_vector, CirculantBlockCode};

    #[test]
    fn single_vn_gamma3() {
        let m = SparseBinaryMatrix::ones(3, 4);
        let c = classify(&m, &[2]).unwrap();
        assert_eq!((c.a, c.b, c.absorbing), (1, 3, false));
        assert_eq!(classify(&m, &[]), Err(Error::EmptySet));
    }

    #[test]
    fn cycle6_triples() {
        // the 3x3 cycle-6 with one extra private check per VN
        let mut d = vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]];
        d.extend([vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let m = SparseBinaryMatrix::from_dense(&d).unwrap();
        let c = classify(&m, &[0, 1, 2]).unwrap();
        assert_eq!((c.a, c.b, c.absorbing), (3, 3, true));
        // two private checks per VN: column weight 4
        d.extend([vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        let m = SparseBinaryMatrix::from_dense(&d).unwrap();
        let c = classify(&m, &[2, 0, 1]).unwrap();
        assert_eq!((c.a, c.b, c.absorbing), (3, 6, false));
    }

    #[test]
    fn lambda_values() {
        assert_eq!(compute_lambda(3, &[(0, 1), (1, 2), (2, 0)]), Ok(2));
        assert_eq!(compute_lambda(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]), Ok(3));
        assert_eq!(compute_lambda(3, &[(0, 1)]), Err(Error::Disconnected));
        for g in [3, 4, 5] {
            for t in species_templates(g) {
                let s = t.species().unwrap();
                assert!(s.lambda <= t.a / 2 + 1, "{s}");
                // every VN keeps γ CNs, the odd ones being the b private checks
                let mut deg = vec![0; t.a];
                for &(u, v) in &t.edges {
                    deg[u] += 1;
                    deg[v] += 1;
                }
                let odd: usize = deg.iter().map(|d| g - d).sum();
                assert_eq!(odd, t.b);
                assert!(deg.iter().all(|&d| d > g - d));
            }
        }
        let s64 = &species_templates(4)[1];
        assert_eq!(s64.species().unwrap().lambda, 3);
    }

    #[test]
    fn chi_values() {
        assert_eq!(chi(2, 1), 2);
        assert_eq!(chi(2, 2), 3);
        assert_eq!(chi(5, 0), 1);
    }

    #[test]
    fn subsets_counted_once() {
        // path 0-1-2-3: connected 2-sets 3, 3-sets 2
        let adj = vec![vec![1], vec![0, 2], vec![1, 3], vec![2]];
        for (a, want) in [(2, 3), (3, 2), (4, 1)] {
            let mut n = 0;
            connected_subsets(&adj, a, 0..4, |_| n += 1);
            assert_eq!(n, want);
        }
        // K4: all C(4,3) triples
        let k4: Vec<Vec<usize>> = (0..4)
            .map(|u| (0..4).filter(|&v| v != u).collect())
            .collect();
        let mut n = 0;
        connected_subsets(&k4, 3, 0..4, |_| n += 1);
        assert_eq!(n, 4);
    }

    #[test]
    fn cap_enforced() {
        let block = CirculantBlockCode::array_based(3, 17, 17).unwrap();
        let part = partition_from_cutting_vector(3, 17, &[4, 9, 13]).unwrap();
        let spec = ScCodeSpec::new(block, part, 30).unwrap();
        let big = ObjectSpecies {
            a: 7,
            b: 3,
            kind: ObjectKind::Absorbing,
            lambda: 3,
        };
        assert!(matches!(
            enumerate_objects(&spec, &big),
            Err(Error::CapExceeded(_))
        ));
        let block = CirculantBlockCode::array_based(3, 29, 29).unwrap();
        let part = partition_from_cutting_vector(3, 29, &[7, 15, 22]).unwrap();
        let spec = ScCodeSpec::new(block, part, 30).unwrap();
        let wide = ObjectSpecies { a: 6, ..big };
        assert!(matches!(
            enumerate_objects(&spec, &wide),
            Err(Error::CapExceeded(_))
        ));
    }

    #[test]
    fn short_chain_truncates() {
        let block = CirculantBlockCode::array_based(3, 5, 5).unwrap();
        let part = partition_from_cutting_vector(3, 5, &[1, 2, 4]).unwrap();
        let spec = ScCodeSpec::new(block, part, 1).unwrap();
        let s = species_templates(3)[0].species().unwrap();
        assert_eq!(enumerate_objects(&spec, &s).unwrap().per_k.len(), 1);
    }
}
