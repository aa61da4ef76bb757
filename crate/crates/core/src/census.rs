//! Cycle-6 census of SC codes.
//!
//! A cycle-6 is an unordered triple of rows `h_1, h_2, h_3` and columns
//! `l_1, l_2, l_3` with 1's at `(h1,l1) (h1,l2) (h2,l2) (h2,l3) (h3,l3) (h3,l1)`.
//! Counting convention: the 3×3 all-ones matrix has exactly 6 of them.
//!
//! The protograph count is available in closed form from the overlap
//! parameters (functions [`fn_a`], [`fn_b`], [`fn_c`] and
//! [`f1k_closed_form`]) and by brute force over any sparse matrix
//! ([`enumerate_cycles6`]). A protograph cycle lifts to exactly `p` cycles-6
//! when its alternating circulant-power sum vanishes mod `p`, and to none
//! otherwise; [`active_cycles6`] uses that to count the lifted code without
//! lifting it.

use std::collections::BTreeMap;

use rayon::prelude::*;

use crate::code::ScCodeSpec;
use crate::error::{Error, Result};
use crate::matrix::{intersect_sorted, SparseBinaryMatrix};
use crate::overlaps::{overlaps_from_partition, OverlapSet};

fn pos(x: i64) -> i64 {
    x.max(0)
}

/// Cycles-6 with all three variable nodes in one replica, for check rows
/// `i1, i2, i3` with overlaps `t123, t12, t13, t23`.
pub fn fn_a(t123: i64, t12: i64, t13: i64, t23: i64) -> i64 {
    t123 * pos(t123 - 1) * pos(t23 - 2)
        + t123 * (t13 - t123) * pos(t23 - 1)
        + (t12 - t123) * t123 * pos(t23 - 1)
        + (t12 - t123) * (t13 - t123) * t23
}

/// Cycles-6 with two variable nodes in one replica and the third (joining
/// rows `i2, i3`) in another; `t_other` is the overlap of the shifted pair.
pub fn fn_b(t123: i64, t12: i64, t13: i64, t_other: i64) -> i64 {
    t123 * pos(t13 - 1) * t_other + (t12 - t123) * t13 * t_other
}

/// Cycles-6 with the three variable nodes in three different replicas.
pub fn fn_c(t12: i64, t13_shift: i64, t23_shift: i64) -> i64 {
    t12 * t13_shift * t23_shift
}

/// Degree-2 and degree-3 overlap lookups over the stacked protograph rows.
/// Callers only pass rows with pairwise distinct residues.
pub trait OverlapLookup {
    fn gamma(&self) -> usize;
    fn memory(&self) -> usize;
    fn t2(&self, a: usize, b: usize) -> i64;
    fn t3(&self, a: usize, b: usize, c: usize) -> i64;
}

impl OverlapLookup for OverlapSet {
    fn gamma(&self) -> usize {
        OverlapSet::gamma(self)
    }
    fn memory(&self) -> usize {
        OverlapSet::memory(self)
    }
    fn t2(&self, a: usize, b: usize) -> i64 {
        self.t(&[a, b])
    }
    fn t3(&self, a: usize, b: usize, c: usize) -> i64 {
        self.t(&[a, b, c])
    }
}

/// Dense overlap tables for degrees 2 and 3, indexed by row tuples.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DenseOverlaps {
    gamma: usize,
    m: usize,
    n: usize,
    t2: Vec<i64>,
    t3: Vec<i64>,
}

impl DenseOverlaps {
    pub fn zeros(gamma: usize, m: usize) -> Self {
        let n = (m + 1) * gamma;
        Self {
            gamma,
            m,
            n,
            t2: vec![0; n * n],
            t3: vec![0; n * n * n],
        }
    }

    pub fn from_overlap_set(o: &OverlapSet) -> Self {
        let mut d = Self::zeros(o.gamma(), o.memory());
        let n = d.n;
        for a in 0..n {
            for b in 0..n {
                d.t2[a * n + b] = if a == b { 0 } else { o.t(&[a, b]) };
                for c in 0..n {
                    d.t3[(a * n + b) * n + c] = if a == b || b == c || a == c {
                        0
                    } else {
                        o.t(&[a, b, c])
                    };
                }
            }
        }
        d
    }

    /// Adds `delta` columns with assignment pattern `pattern` (component of
    /// each row group).
    pub fn add_column(&mut self, pattern: &[usize], delta: i64) {
        let rows: Vec<usize> = pattern
            .iter()
            .enumerate()
            .map(|(i, &x)| x * self.gamma + i)
            .collect();
        let n = self.n;
        for &a in &rows {
            for &b in &rows {
                if a == b {
                    continue;
                }
                self.t2[a * n + b] += delta;
                for &c in &rows {
                    if c != a && c != b {
                        self.t3[(a * n + b) * n + c] += delta;
                    }
                }
            }
        }
    }
}

impl OverlapLookup for DenseOverlaps {
    fn gamma(&self) -> usize {
        self.gamma
    }
    fn memory(&self) -> usize {
        self.m
    }
    #[inline]
    fn t2(&self, a: usize, b: usize) -> i64 {
        self.t2[a * self.n + b]
    }
    #[inline]
    fn t3(&self, a: usize, b: usize, c: usize) -> i64 {
        self.t3[(a * self.n + b) * self.n + c]
    }
}

/// `F_1^k` for any overlap source. `k` must be in `1..=m+1`.
pub fn f1k_with<O: OverlapLookup + ?Sized>(o: &O, k: usize) -> i64 {
    let g = o.gamma();
    let m = o.memory();
    let n = (m + 1) * g;
    let res = |x: usize| x % g;
    let distinct =
        |a: usize, b: usize, c: usize| res(a) != res(b) && res(a) != res(c) && res(b) != res(c);
    let mut total = 0i64;
    if k == 1 {
        for i1 in 0..n {
            for i2 in i1 + 1..n {
                if res(i1) == res(i2) {
                    continue;
                }
                for i3 in i2 + 1..n {
                    if !distinct(i1, i2, i3) {
                        continue;
                    }
                    total += fn_a(o.t3(i1, i2, i3), o.t2(i1, i2), o.t2(i1, i3), o.t2(i2, i3));
                }
            }
        }
        return total;
    }
    let shift = (k - 1) * g;
    // two VNs in replica 1, one in replica k
    for i2 in shift..n {
        for i3 in i2 + 1..n {
            if res(i2) == res(i3) {
                continue;
            }
            let other = o.t2(i2 - shift, i3 - shift);
            if other == 0 {
                continue;
            }
            for i1 in 0..n {
                if distinct(i1, i2, i3) {
                    total += fn_b(o.t3(i1, i2, i3), o.t2(i1, i2), o.t2(i1, i3), other);
                }
            }
        }
    }
    // one VN in replica 1, two in replica k
    let upper = (m + 2 - k) * g;
    for i2 in 0..upper {
        for i3 in i2 + 1..upper {
            if res(i2) == res(i3) {
                continue;
            }
            let other = o.t2(i2 + shift, i3 + shift);
            if other == 0 {
                continue;
            }
            for i1 in 0..n {
                if distinct(i1, i2, i3) {
                    total += fn_b(o.t3(i1, i2, i3), o.t2(i1, i2), o.t2(i1, i3), other);
                }
            }
        }
    }
    // one VN in each of replicas 1, q, k
    for q in 2..k {
        let qs = (q - 1) * g;
        for i1 in qs..n {
            for i2 in shift..n {
                if res(i1) == res(i2) {
                    continue;
                }
                let t12 = o.t2(i1, i2);
                if t12 == 0 {
                    continue;
                }
                for i3 in shift..(m + q) * g {
                    if distinct(i1, i2, i3) {
                        total += fn_c(t12, o.t2(i1 - qs, i3 - qs), o.t2(i2 - shift, i3 - shift));
                    }
                }
            }
        }
    }
    total
}

/// `F_1^k`: protograph cycles-6 starting in replica 1 and spanning exactly
/// `k` replicas.
pub fn f1k_closed_form(overlaps: &OverlapSet, k: usize) -> Result<u64> {
    let max = overlaps.memory() + 1;
    if k == 0 || k > max {
        return Err(Error::SpanTooLarge { k, max });
    }
    let v = f1k_with(overlaps, k);
    if v < 0 {
        return Err(Error::NotRealizable(format!("negative F_1^{k} = {v}")));
    }
    Ok(v as u64)
}

/// Whether a census counts protograph cycles or lifted cycles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    Protograph,
    Lifted,
}

impl Scale {
    pub fn as_str(self) -> &'static str {
        match self {
            Scale::Protograph => "protograph",
            Scale::Lifted => "lifted",
        }
    }
}

/// Per-span counts and their replica-weighted total.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleCensus {
    pub scale: Scale,
    /// `per_k[k-1]` objects start in replica 1 and span `k` replicas.
    pub per_k: Vec<u64>,
    pub total: u64,
    pub coupling_length: usize,
    pub memory: usize,
}

impl CycleCensus {
    /// Aggregates `Σ_k (L-k+1)·per_k[k]`, truncating spans beyond `L`.
    pub fn from_per_k(
        scale: Scale,
        per_k: Vec<u64>,
        coupling_length: usize,
        memory: usize,
    ) -> Self {
        let total = weighted_total(&per_k, coupling_length);
        Self {
            scale,
            per_k,
            total,
            coupling_length,
            memory,
        }
    }

    /// `(k, F_1^k, L-k+1, contribution)` rows.
    pub fn rows(&self) -> Vec<(usize, u64, u64, u64)> {
        self.per_k
            .iter()
            .enumerate()
            .map(|(idx, &f)| {
                let k = idx + 1;
                let w = (self.coupling_length + 1).saturating_sub(k) as u64;
                (k, f, w, w * f)
            })
            .collect()
    }
}

pub(crate) fn weighted_total(per_k: &[u64], coupling_length: usize) -> u64 {
    per_k
        .iter()
        .enumerate()
        .map(|(idx, &f)| (coupling_length + 1).saturating_sub(idx + 1) as u64 * f)
        .sum()
}

/// Closed-form protograph census from a completed overlap set.
pub fn census_protograph(overlaps: &OverlapSet, coupling_length: usize) -> CycleCensus {
    let m = overlaps.memory();
    let kmax = (m + 1).min(coupling_length);
    let per_k = (1..=kmax)
        .map(|k| f1k_closed_form(overlaps, k).expect("k within range"))
        .collect();
    CycleCensus::from_per_k(Scale::Protograph, per_k, coupling_length, m)
}

/// Closed-form protograph census of a spec.
pub fn census_spec(spec: &ScCodeSpec) -> CycleCensus {
    census_protograph(
        &overlaps_from_partition(spec.partition()),
        spec.coupling_length(),
    )
}

/// One cycle-6, with 1's at `(rows[0],cols[0]) (rows[0],cols[1])
/// (rows[1],cols[1]) (rows[1],cols[2]) (rows[2],cols[2]) (rows[2],cols[0])`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle6 {
    pub rows: [usize; 3],
    pub cols: [usize; 3],
}

impl Cycle6 {
    /// The six entries, alternating `+` and `-` positions of the power
    /// condition: `(h1,l1), (h2,l2), (h3,l3)` then `(h1,l2), (h2,l3), (h3,l1)`.
    pub fn entries(&self) -> [(usize, usize); 6] {
        let [h1, h2, h3] = self.rows;
        let [l1, l2, l3] = self.cols;
        [(h1, l1), (h2, l2), (h3, l3), (h1, l2), (h2, l3), (h3, l1)]
    }

    pub fn min_col(&self) -> usize {
        *self.cols.iter().min().expect("three columns")
    }

    pub fn max_col(&self) -> usize {
        *self.cols.iter().max().expect("three columns")
    }
}

/// One cycle-4 on rows `h1, h2` and columns `l1, l2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle4 {
    pub rows: [usize; 2],
    pub cols: [usize; 2],
}

impl Cycle4 {
    /// `(h1,l1), (h2,l2)` then `(h1,l2), (h2,l1)`.
    pub fn entries(&self) -> [(usize, usize); 4] {
        let [h1, h2] = self.rows;
        let [l1, l2] = self.cols;
        [(h1, l1), (h2, l2), (h1, l2), (h2, l1)]
    }
}

/// Rows after `h1` sharing at least one column with it, each with the shared
/// columns.
fn later_neighbours(matrix: &SparseBinaryMatrix, h1: usize) -> Vec<(usize, Vec<usize>)> {
    let mut pairs: Vec<(usize, usize)> = matrix
        .row(h1)
        .iter()
        .flat_map(|&c| {
            matrix
                .col(c)
                .iter()
                .filter(move |&&h| h > h1)
                .map(move |&h| (h, c))
        })
        .collect();
    pairs.sort_unstable();
    let mut out: Vec<(usize, Vec<usize>)> = Vec::new();
    for (h, c) in pairs {
        match out.last_mut() {
            Some((last, cols)) if *last == h => cols.push(c),
            _ => out.push((h, vec![c])),
        }
    }
    out
}

fn cycles6_from_row(matrix: &SparseBinaryMatrix, h1: usize, mut emit: impl FnMut(Cycle6)) {
    let nb = later_neighbours(matrix, h1);
    for (a, (h2, c12)) in nb.iter().enumerate() {
        for (h3, c13) in &nb[a + 1..] {
            let c23 = intersect_sorted(matrix.row(*h2), matrix.row(*h3));
            if c23.is_empty() {
                continue;
            }
            for &l2 in c12 {
                for &l1 in c13 {
                    if l1 == l2 {
                        continue;
                    }
                    for &l3 in &c23 {
                        if l3 != l1 && l3 != l2 {
                            emit(Cycle6 {
                                rows: [h1, *h2, *h3],
                                cols: [l1, l2, l3],
                            });
                        }
                    }
                }
            }
        }
    }
}

/// Every cycle-6 of `matrix`, each reported once, sorted.
pub fn enumerate_cycles6(matrix: &SparseBinaryMatrix) -> Vec<Cycle6> {
    let mut all: Vec<Cycle6> = (0..matrix.rows())
        .into_par_iter()
        .flat_map_iter(|h1| {
            let mut local = Vec::new();
            cycles6_from_row(matrix, h1, |c| local.push(c));
            local
        })
        .collect();
    all.sort_unstable();
    all
}

/// Number of cycles-6 by explicit enumeration.
pub fn brute_force_cycles6(matrix: &SparseBinaryMatrix) -> u64 {
    (0..matrix.rows())
        .into_par_iter()
        .map(|h1| {
            let mut n = 0u64;
            cycles6_from_row(matrix, h1, |_| n += 1);
            n
        })
        .sum()
}

/// Every cycle-4 of `matrix`, sorted.
pub fn enumerate_cycles4(matrix: &SparseBinaryMatrix) -> Vec<Cycle4> {
    let mut all: Vec<Cycle4> = (0..matrix.rows())
        .into_par_iter()
        .flat_map_iter(|h1| {
            let mut local = Vec::new();
            for (h2, shared) in later_neighbours(matrix, h1) {
                for (a, &l1) in shared.iter().enumerate() {
                    for &l2 in &shared[a + 1..] {
                        local.push(Cycle4 {
                            rows: [h1, h2],
                            cols: [l1, l2],
                        });
                    }
                }
            }
            local
        })
        .collect();
    all.sort_unstable();
    all
}

/// Number of cycles-4: `Σ` over row pairs of `C(shared, 2)`.
pub fn brute_force_cycles4(matrix: &SparseBinaryMatrix) -> u64 {
    (0..matrix.rows())
        .into_par_iter()
        .map(|h1| {
            later_neighbours(matrix, h1)
                .iter()
                .map(|(_, s)| (s.len() * s.len().saturating_sub(1) / 2) as u64)
                .sum::<u64>()
        })
        .sum()
}

/// Tally of protograph-scale cycles by `(start replica, span)`, both 1-based,
/// for a matrix whose replicas are `kappa` columns wide.
pub fn tally_by_replica(cycles: &[Cycle6], kappa: usize) -> BTreeMap<(usize, usize), u64> {
    let mut out = BTreeMap::new();
    for c in cycles {
        let start = c.min_col() / kappa;
        let end = c.max_col() / kappa;
        *out.entry((start + 1, end - start + 1)).or_insert(0) += 1;
    }
    out
}

/// True if the cycle lifts to `p` cycles-6: the power sum over its `+`
/// entries equals the sum over its `-` entries mod `p`.
pub fn is_active6(spec: &ScCodeSpec, cycle: &Cycle6) -> bool {
    let e = cycle.entries();
    let p = spec.p();
    let plus: usize = e[..3].iter().map(|&(h, l)| spec.power_at(h, l)).sum();
    let minus: usize = e[3..].iter().map(|&(h, l)| spec.power_at(h, l)).sum();
    plus % p == minus % p
}

/// True if the protograph cycle-4 lifts to `p` cycles-4.
pub fn is_active4(spec: &ScCodeSpec, cycle: &Cycle4) -> bool {
    let e = cycle.entries();
    let p = spec.p();
    let plus: usize = e[..2].iter().map(|&(h, l)| spec.power_at(h, l)).sum();
    let minus: usize = e[2..].iter().map(|&(h, l)| spec.power_at(h, l)).sum();
    plus % p == minus % p
}

/// A protograph cycle inside the window `Π_1^χ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowCycle6 {
    pub cycle: Cycle6,
    /// 1-based replica holding the cycle's lowest column.
    pub start: usize,
    /// Number of consecutive replicas spanned.
    pub span: usize,
    pub active: bool,
}

/// Classification of every protograph cycle-6 in `Π_1^χ`, `χ = min(m+1, L)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ActiveCensus {
    /// Window width in replicas.
    pub chi: usize,
    pub cycles: Vec<WindowCycle6>,
    /// `F_1^k`, all protograph cycles starting in replica 1.
    pub per_k: Vec<u64>,
    /// `F_1^{k,a}`, active cycles starting in replica 1.
    pub per_k_active: Vec<u64>,
    pub p: usize,
    pub coupling_length: usize,
    pub memory: usize,
}

impl ActiveCensus {
    /// `F_SC = p·Σ_k (L-k+1)·F_1^{k,a}`: cycles-6 of the lifted code.
    pub fn f_sc(&self) -> u64 {
        self.p as u64 * weighted_total(&self.per_k_active, self.coupling_length)
    }

    /// Protograph total `Σ_k (L-k+1)·F_1^k`.
    pub fn protograph_total(&self) -> u64 {
        weighted_total(&self.per_k, self.coupling_length)
    }

    pub fn protograph_census(&self) -> CycleCensus {
        CycleCensus::from_per_k(
            Scale::Protograph,
            self.per_k.clone(),
            self.coupling_length,
            self.memory,
        )
    }

    pub fn lifted_census(&self) -> CycleCensus {
        let per_k = self
            .per_k_active
            .iter()
            .map(|&f| f * self.p as u64)
            .collect();
        CycleCensus::from_per_k(Scale::Lifted, per_k, self.coupling_length, self.memory)
    }
}

/// `Π_1^χ` of the protograph, `χ = min(m+1, L)`.
pub fn cycle_window(spec: &ScCodeSpec) -> SparseBinaryMatrix {
    let chi = (spec.memory() + 1).min(spec.coupling_length());
    spec.window(1, chi).expect("window within range")
}

/// Enumerates protograph cycles-6 in `Π_1^χ` and classifies them as active
/// or not under the code's circulant powers.
pub fn active_cycles6(spec: &ScCodeSpec) -> ActiveCensus {
    let chi = (spec.memory() + 1).min(spec.coupling_length());
    let window = cycle_window(spec);
    let kappa = spec.kappa();
    let mut per_k = vec![0u64; chi];
    let mut per_k_active = vec![0u64; chi];
    let cycles: Vec<WindowCycle6> = enumerate_cycles6(&window)
        .into_iter()
        .map(|cycle| {
            let start = cycle.min_col() / kappa;
            let span = cycle.max_col() / kappa - start + 1;
            let active = is_active6(spec, &cycle);
            if start == 0 {
                per_k[span - 1] += 1;
                if active {
                    per_k_active[span - 1] += 1;
                }
            }
            WindowCycle6 {
                cycle,
                start: start + 1,
                span,
                active,
            }
        })
        .collect();
    ActiveCensus {
        chi,
        cycles,
        per_k,
        per_k_active,
        p: spec.p(),
        coupling_length: spec.coupling_length(),
        memory: spec.memory(),
    }
}

/// Protograph cycles-4 in `Π_1^χ` starting in replica 1 that lift to
/// cycles-4 under the code's powers.
pub fn active_cycles4(spec: &ScCodeSpec) -> Vec<Cycle4> {
    let window = cycle_window(spec);
    let kappa = spec.kappa();
    enumerate_cycles4(&window)
        .into_iter()
        .filter(|c| c.cols[0].min(c.cols[1]) < kappa && is_active4(spec, c))
        .collect()
}

/// Lifted cycle-4 count `p·Σ_k (L-k+1)·(active protograph cycles-4)`.
pub fn lifted_cycles4(spec: &ScCodeSpec) -> u64 {
    let kappa = spec.kappa();
    let chi = (spec.memory() + 1).min(spec.coupling_length());
    let mut per_k = vec![0u64; chi];
    for c in active_cycles4(spec) {
        let lo = c.cols[0].min(c.cols[1]) / kappa;
        let hi = c.cols[0].max(c.cols[1]) / kappa;
        per_k[hi - lo] += 1;
    }
    spec.p() as u64 * weighted_total(&per_k, spec.coupling_length())
}
