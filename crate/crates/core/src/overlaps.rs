//! Overlap parameters of a partition.
//!
//! Rows of the stacked protograph `[H_0^p; …; H_m^p]` are numbered
//! `0..(m+1)γ`; row `xγ + i` is row group `i` of component `x`. The overlap
//! `t_S` of a row set `S` is the number of columns in which every row of `S`
//! holds a 1. A set with two rows of equal residue mod `γ` always has a
//! zero overlap, as does any set of more than `γ` rows.
//!
//! The independent parameters are the overlaps of valid sets whose rows all
//! lie below `mγ`, listed degree-major and then lexicographically. Every
//! other overlap follows from them by inclusion–exclusion, and so do the
//! column *pattern counts* `n_v`, the number of columns whose circulants are
//! assigned to components `v = (v_0, …, v_{γ-1})`. A vector of independent
//! overlaps is realizable by some partition iff all pattern counts are
//! non-negative.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::code::PartitionMatrix;
use crate::error::{Error, Result};

/// A set of stacked-protograph rows, stored as a bit mask.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RowSet(u64);

impl RowSet {
    pub fn from_rows(rows: &[usize]) -> Self {
        RowSet(rows.iter().fold(0u64, |acc, &r| {
            assert!(r < 64, "row index {r} too large for a row set");
            acc | (1 << r)
        }))
    }

    pub fn bits(self) -> u64 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, row: usize) -> bool {
        row < 64 && self.0 & (1 << row) != 0
    }

    pub fn insert(self, row: usize) -> Self {
        RowSet(self.0 | (1 << row))
    }

    pub fn union(self, other: RowSet) -> Self {
        RowSet(self.0 | other.0)
    }

    /// Rows in ascending order.
    pub fn rows(self) -> impl Iterator<Item = usize> {
        let mut bits = self.0;
        std::iter::from_fn(move || {
            if bits == 0 {
                None
            } else {
                let r = bits.trailing_zeros() as usize;
                bits &= bits - 1;
                Some(r)
            }
        })
    }

    /// True if all rows have pairwise distinct residues mod `gamma`.
    pub fn has_distinct_residues(self, gamma: usize) -> bool {
        let mut seen = 0u64;
        for r in self.rows() {
            let bit = 1 << (r % gamma);
            if seen & bit != 0 {
                return false;
            }
            seen |= bit;
        }
        true
    }
}

impl Ord for RowSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len()
            .cmp(&other.len())
            .then_with(|| self.rows().cmp(other.rows()))
    }
}

impl PartialOrd for RowSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for RowSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rows: Vec<String> = self.rows().map(|r| r.to_string()).collect();
        write!(f, "t{{{}}}", rows.join(","))
    }
}

/// All sets of up to `gamma` rows drawn from components `0..components`
/// with pairwise distinct residues, in canonical order.
fn valid_sets(gamma: usize, components: usize) -> Vec<RowSet> {
    let mut out = Vec::new();
    // Each residue is either absent or taken from one of the components.
    let choices = components + 1;
    let total = choices.pow(gamma as u32);
    for code in 1..total {
        let mut c = code;
        let mut set = RowSet::default();
        for i in 0..gamma {
            let pick = c % choices;
            c /= choices;
            if pick > 0 {
                set = set.insert((pick - 1) * gamma + i);
            }
        }
        out.push(set);
    }
    out.sort();
    out
}

/// The independent overlap sets: valid sets over rows `[0, mγ)`, degree-major
/// then lexicographic. Empty for `m = 0`.
pub fn independent_set(gamma: usize, m: usize) -> Vec<RowSet> {
    if m == 0 {
        return Vec::new();
    }
    valid_sets(gamma, m)
}

/// Every possibly non-zero overlap set over rows `[0, (m+1)γ)`.
pub fn nonzero_set(gamma: usize, m: usize) -> Vec<RowSet> {
    valid_sets(gamma, m + 1)
}

/// `Σ_{d=1}^{γ} m^d·C(γ,d)`.
pub fn independent_count(gamma: usize, m: usize) -> usize {
    (1..=gamma)
        .map(|d| m.pow(d as u32) * binomial(gamma, d))
        .sum()
}

pub(crate) fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
}

/// Overlap counts for every possibly non-zero set of degree ≤ γ.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OverlapSet {
    gamma: usize,
    m: usize,
    kappa: usize,
    table: BTreeMap<RowSet, i64>,
}

impl OverlapSet {
    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn memory(&self) -> usize {
        self.m
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    /// `t_S`; zero for sets with repeated residues or more than `γ` rows.
    pub fn get(&self, set: RowSet) -> i64 {
        self.table.get(&set).copied().unwrap_or(0)
    }

    pub fn t(&self, rows: &[usize]) -> i64 {
        self.get(RowSet::from_rows(rows))
    }

    pub fn iter(&self) -> impl Iterator<Item = (RowSet, i64)> + '_ {
        self.table.iter().map(|(&s, &v)| (s, v))
    }

    /// Restriction to the independent parameters.
    pub fn independent(&self) -> IndependentOverlaps {
        let values = independent_set(self.gamma, self.m)
            .into_iter()
            .map(|s| self.get(s))
            .collect();
        IndependentOverlaps {
            gamma: self.gamma,
            m: self.m,
            kappa: self.kappa,
            values,
        }
    }

    /// True if `t_S ≥ t_{S∪{x}}` for every stored set and every valid extension.
    pub fn is_monotone(&self) -> bool {
        let n = (self.m + 1) * self.gamma;
        self.table.iter().all(|(&s, &v)| {
            (0..n)
                .filter(|&x| !s.contains(x))
                .all(|x| v >= self.get(s.insert(x)))
        })
    }
}

/// Directly counts the overlaps of a partition.
pub fn overlaps_from_partition(partition: &PartitionMatrix) -> OverlapSet {
    let gamma = partition.gamma();
    let m = partition.memory();
    let patterns: Vec<Vec<usize>> = (0..partition.kappa())
        .map(|j| partition.column_pattern(j))
        .collect();
    let table = nonzero_set(gamma, m)
        .into_iter()
        .map(|s| {
            let count = patterns
                .iter()
                .filter(|v| s.rows().all(|r| v[r % gamma] == r / gamma))
                .count();
            (s, count as i64)
        })
        .collect();
    OverlapSet {
        gamma,
        m,
        kappa: partition.kappa(),
        table,
    }
}

/// The independent overlap parameters, in canonical order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IndependentOverlaps {
    gamma: usize,
    m: usize,
    kappa: usize,
    values: Vec<i64>,
}

impl IndependentOverlaps {
    pub fn new(gamma: usize, m: usize, kappa: usize, values: Vec<i64>) -> Result<Self> {
        let expected = independent_count(gamma, m);
        if values.len() != expected {
            return Err(Error::InvalidParameters(format!(
                "expected {expected} independent overlaps for gamma={gamma}, m={m}; got {}",
                values.len()
            )));
        }
        Ok(Self {
            gamma,
            m,
            kappa,
            values,
        })
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn memory(&self) -> usize {
        self.m
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn values(&self) -> &[i64] {
        &self.values
    }

    pub fn sets(&self) -> Vec<RowSet> {
        independent_set(self.gamma, self.m)
    }

    pub fn get(&self, set: RowSet) -> i64 {
        let sets = self.sets();
        sets.binary_search(&set).map_or(0, |idx| self.values[idx])
    }

    fn lookup(&self) -> BTreeMap<RowSet, i64> {
        self.sets()
            .into_iter()
            .zip(self.values.iter().copied())
            .collect()
    }
}

/// Inclusion–exclusion for one valid set `S = I ∪ J`, `I` below `mγ` and `J`
/// in the last component:
/// `t_S = base + Σ_{α≥1} (-1)^α Σ_{J'⊆J, |J'|=α} Σ_{x∈{0..m-1}^α} t_{I ∪ {x_a γ + j̄'_a}}`
/// where `base` is `t_I`, or `κ` when `I` is empty.
fn complete_one(
    ind: &BTreeMap<RowSet, i64>,
    gamma: usize,
    m: usize,
    kappa: usize,
    set: RowSet,
) -> i64 {
    let boundary = m * gamma;
    let inner: Vec<usize> = set.rows().filter(|&r| r < boundary).collect();
    let outer: Vec<usize> = set
        .rows()
        .filter(|&r| r >= boundary)
        .map(|r| r % gamma)
        .collect();
    let i_set = RowSet::from_rows(&inner);
    let lookup = |s: RowSet| ind.get(&s).copied().unwrap_or(0);
    if outer.is_empty() {
        return lookup(i_set);
    }
    let mut total = if inner.is_empty() {
        kappa as i64
    } else {
        lookup(i_set)
    };
    for mask in 1u32..(1 << outer.len()) {
        let chosen: Vec<usize> = (0..outer.len())
            .filter(|b| mask & (1 << b) != 0)
            .map(|b| outer[b])
            .collect();
        let alpha = chosen.len();
        let sign = if alpha % 2 == 1 { -1 } else { 1 };
        // all component choices x ∈ {0..m-1}^α
        for code in 0..m.pow(alpha as u32) {
            let mut c = code;
            let mut s = i_set;
            for &res in &chosen {
                s = s.insert((c % m) * gamma + res);
                c /= m;
            }
            total += sign * lookup(s);
        }
    }
    total
}

/// Fills in every overlap of degree ≤ γ from the independent parameters.
pub fn complete_overlaps(ind: &IndependentOverlaps) -> OverlapSet {
    let lookup = ind.lookup();
    let table = nonzero_set(ind.gamma, ind.m)
        .into_iter()
        .map(|s| (s, complete_one(&lookup, ind.gamma, ind.m, ind.kappa, s)))
        .collect();
    OverlapSet {
        gamma: ind.gamma,
        m: ind.m,
        kappa: ind.kappa,
        table,
    }
}

/// Number of columns with each assignment pattern, indexed by the pattern's
/// base-`(m+1)` value with `v_0` most significant.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternCounts {
    gamma: usize,
    m: usize,
    counts: Vec<i64>,
}

impl PatternCounts {
    pub fn new(gamma: usize, m: usize, counts: Vec<i64>) -> Result<Self> {
        if counts.len() != (m + 1).pow(gamma as u32) {
            return Err(Error::InvalidParameters(format!(
                "expected {} pattern counts, got {}",
                (m + 1).pow(gamma as u32),
                counts.len()
            )));
        }
        Ok(Self { gamma, m, counts })
    }

    /// Histogram of a partition's column patterns.
    pub fn from_partition(partition: &PartitionMatrix) -> Self {
        let (gamma, m) = (partition.gamma(), partition.memory());
        let mut counts = vec![0; (m + 1).pow(gamma as u32)];
        for j in 0..partition.kappa() {
            counts[pattern_index(&partition.column_pattern(j), m)] += 1;
        }
        Self { gamma, m, counts }
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn memory(&self) -> usize {
        self.m
    }

    pub fn counts(&self) -> &[i64] {
        &self.counts
    }

    pub fn count(&self, pattern: &[usize]) -> i64 {
        self.counts[pattern_index(pattern, self.m)]
    }

    pub fn total(&self) -> i64 {
        self.counts.iter().sum()
    }

    /// `(pattern, n_v)` in lexicographic pattern order.
    pub fn iter(&self) -> impl Iterator<Item = (Vec<usize>, i64)> + '_ {
        self.counts
            .iter()
            .enumerate()
            .map(|(idx, &n)| (pattern_from_index(idx, self.gamma, self.m), n))
    }

    /// Forward map: `t_S = Σ n_v` over patterns consistent with `S`.
    pub fn to_independent(&self, kappa: usize) -> IndependentOverlaps {
        let patterns: Vec<(Vec<usize>, i64)> = self.iter().collect();
        let values = independent_set(self.gamma, self.m)
            .into_iter()
            .map(|s| {
                patterns
                    .iter()
                    .filter(|(v, _)| s.rows().all(|r| v[r % self.gamma] == r / self.gamma))
                    .map(|(_, n)| n)
                    .sum()
            })
            .collect();
        IndependentOverlaps {
            gamma: self.gamma,
            m: self.m,
            kappa,
            values,
        }
    }
}

pub fn pattern_index(pattern: &[usize], m: usize) -> usize {
    pattern.iter().fold(0, |acc, &x| acc * (m + 1) + x)
}

pub fn pattern_from_index(mut idx: usize, gamma: usize, m: usize) -> Vec<usize> {
    let mut v = vec![0; gamma];
    for slot in v.iter_mut().rev() {
        *slot = idx % (m + 1);
        idx /= m + 1;
    }
    v
}

/// Pattern counts implied by the independent overlaps: `n_v` is the
/// completed degree-γ overlap over rows `{v_j γ + j}`.
pub fn pattern_counts(ind: &IndependentOverlaps) -> PatternCounts {
    let lookup = ind.lookup();
    let (gamma, m) = (ind.gamma, ind.m);
    let counts = (0..(m + 1).pow(gamma as u32))
        .map(|idx| {
            let v = pattern_from_index(idx, gamma, m);
            let rows: Vec<usize> = v.iter().enumerate().map(|(j, &x)| x * gamma + j).collect();
            complete_one(&lookup, gamma, m, ind.kappa, RowSet::from_rows(&rows))
        })
        .collect();
    PatternCounts { gamma, m, counts }
}

/// Why an independent-overlap vector has no partition behind it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RealizabilityDiagnostic {
    /// Patterns with a negative implied column count.
    pub negative: Vec<(Vec<usize>, i64)>,
    /// Sum of all implied pattern counts.
    pub total: i64,
    pub kappa: usize,
}

impl fmt::Display for RealizabilityDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let neg: Vec<String> = self
            .negative
            .iter()
            .map(|(v, n)| format!("{v:?}={n}"))
            .collect();
        write!(
            f,
            "negative pattern counts [{}], pattern total {} (kappa {})",
            neg.join(", "),
            self.total,
            self.kappa
        )
    }
}

/// Ok iff all implied pattern counts are non-negative and sum to `κ`.
pub fn validate_realizable(
    ind: &IndependentOverlaps,
) -> std::result::Result<(), RealizabilityDiagnostic> {
    let pc = pattern_counts(ind);
    let negative: Vec<(Vec<usize>, i64)> = pc.iter().filter(|(_, n)| *n < 0).collect();
    let total = pc.total();
    if negative.is_empty() && total == ind.kappa as i64 {
        Ok(())
    } else {
        Err(RealizabilityDiagnostic {
            negative,
            total,
            kappa: ind.kappa,
        })
    }
}

/// Canonical partition with the given overlaps: columns are filled left to
/// right with `n_v` copies of each pattern `v`, patterns in lexicographic order.
pub fn partition_from_overlaps(ind: &IndependentOverlaps) -> Result<PartitionMatrix> {
    validate_realizable(ind).map_err(|d| Error::NotRealizable(d.to_string()))?;
    partition_from_pattern_counts(&pattern_counts(ind), ind.kappa)
}

pub fn partition_from_pattern_counts(pc: &PatternCounts, kappa: usize) -> Result<PartitionMatrix> {
    if pc.counts.iter().any(|&n| n < 0) || pc.total() != kappa as i64 {
        return Err(Error::NotRealizable(format!(
            "pattern counts {:?} do not sum to kappa {kappa}",
            pc.counts
        )));
    }
    let (gamma, m) = (pc.gamma, pc.m);
    let columns: Vec<Vec<usize>> = pc
        .iter()
        .flat_map(|(v, n)| std::iter::repeat_n(v, n as usize))
        .collect();
    let assign = (0..gamma)
        .flat_map(|i| columns.iter().map(move |v| v[i]))
        .collect();
    PartitionMatrix::new(gamma, kappa, m, assign)
}
