//! Optimal-overlap partitioning: minimize the protograph cycle-6 count over
//! all realizable, balanced independent-overlap vectors.
//!
//! Independent overlaps and column pattern counts determine each other, so
//! the search runs over pattern counts (compositions of `κ` into `(m+1)^γ`
//! parts) and reports the canonical overlap vector. Adding a column never
//! removes a cycle, so the cycle count of a partial composition is a valid
//! lower bound for every completion; the branch-and-bound strategy
//! strengthens it with the cheapest single-column increment times the number
//! of columns still to place.

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::census::{f1k_with, DenseOverlaps};
use crate::code::PartitionMatrix;
use crate::error::{Error, Result};
use crate::overlaps::{
    independent_set, overlaps_from_partition, partition_from_pattern_counts, pattern_from_index,
    IndependentOverlaps, PatternCounts,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Exhaustive,
    BranchAndBound,
    LocalSearch,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizerConfig {
    /// Extra circulants allowed above/below the even split per component.
    pub balance_tolerance: usize,
    pub strategy: Strategy,
    pub seed: u64,
    /// Wall-clock cap. An interrupted certified search reports its incumbent
    /// as heuristic.
    pub time_budget: Option<Duration>,
    /// Local-search restarts (also used to seed the branch-and-bound incumbent).
    pub restarts: usize,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        Self {
            balance_tolerance: 0,
            strategy: Strategy::BranchAndBound,
            seed: 0,
            time_budget: None,
            restarts: 32,
        }
    }
}

/// How `f_star` was established.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Proof {
    /// Every feasible vector was evaluated.
    Exhaustive,
    /// Certified optimal by a completed branch-and-bound search.
    Bounded,
    /// Best found; not certified.
    Heuristic,
}

impl Proof {
    pub fn as_str(self) -> &'static str {
        match self {
            Proof::Exhaustive => "exhaustive",
            Proof::Bounded => "bounded",
            Proof::Heuristic => "heuristic",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Optimum {
    pub t_star: IndependentOverlaps,
    pub f_star: u64,
    pub proof: Proof,
    pub pattern_counts: PatternCounts,
}

impl Optimum {
    /// The canonical partition realizing `t_star`.
    pub fn partition(&self) -> PartitionMatrix {
        partition_from_pattern_counts(&self.pattern_counts, self.t_star.kappa())
            .expect("optimum pattern counts are realizable")
    }
}

/// Allowed circulant count per component: `[⌊κγ/(m+1)⌋ - slack, ⌈κγ/(m+1)⌉ + slack]`.
pub fn balance_bounds(kappa: usize, gamma: usize, m: usize, slack: usize) -> (usize, usize) {
    let total = kappa * gamma;
    let parts = m + 1;
    let lo = (total / parts).saturating_sub(slack);
    let hi = total.div_ceil(parts) + slack;
    (lo, hi)
}

/// Protograph cycle-6 count `Σ_k (L-k+1) F_1^k` of a dense overlap table.
pub fn objective(dense: &DenseOverlaps, m: usize, coupling_length: usize) -> i64 {
    let kmax = (m + 1).min(coupling_length);
    (1..=kmax)
        .map(|k| (coupling_length + 1 - k) as i64 * f1k_with(dense, k))
        .sum()
}

fn check_family(kappa: usize, gamma: usize, m: usize, coupling_length: usize) -> Result<()> {
    if gamma < 2 || kappa < gamma {
        return Err(Error::InvalidParameters(format!(
            "need gamma >= 2 and kappa >= gamma, got gamma={gamma}, kappa={kappa}"
        )));
    }
    if coupling_length == 0 {
        return Err(Error::InvalidParameters(
            "coupling length must be >= 1".into(),
        ));
    }
    if (m + 1).pow(gamma as u32) > 1 << 12 {
        return Err(Error::InvalidParameters(format!(
            "(m+1)^gamma = {} patterns is too many",
            (m + 1).pow(gamma as u32)
        )));
    }
    Ok(())
}

/// Shared pattern tables.
struct Family {
    gamma: usize,
    m: usize,
    kappa: usize,
    coupling_length: usize,
    patterns: Vec<Vec<usize>>,
    /// `load[v][x]`: circulants pattern `v` puts in component `x`.
    load: Vec<Vec<usize>>,
    lo: usize,
    hi: usize,
    ind_sets: Vec<crate::overlaps::RowSet>,
}

impl Family {
    fn new(kappa: usize, gamma: usize, m: usize, coupling_length: usize, slack: usize) -> Self {
        let count = (m + 1).pow(gamma as u32);
        let patterns: Vec<Vec<usize>> = (0..count)
            .map(|i| pattern_from_index(i, gamma, m))
            .collect();
        let load = patterns
            .iter()
            .map(|v| {
                (0..=m)
                    .map(|x| v.iter().filter(|&&y| y == x).count())
                    .collect()
            })
            .collect();
        let (lo, hi) = balance_bounds(kappa, gamma, m, slack);
        Self {
            gamma,
            m,
            kappa,
            coupling_length,
            patterns,
            load,
            lo,
            hi,
            ind_sets: independent_set(gamma, m),
        }
    }

    fn balanced(&self, sizes: &[usize]) -> bool {
        sizes.iter().all(|&s| s >= self.lo && s <= self.hi)
    }

    fn sizes_of(&self, counts: &[i64]) -> Vec<usize> {
        let mut sizes = vec![0; self.m + 1];
        for (v, &n) in counts.iter().enumerate() {
            for (s, &load) in sizes.iter_mut().zip(&self.load[v]) {
                *s += load * n as usize;
            }
        }
        sizes
    }

    fn t_vector(&self, counts: &[i64]) -> Vec<i64> {
        let g = self.gamma;
        self.ind_sets
            .iter()
            .map(|s| {
                counts
                    .iter()
                    .enumerate()
                    .filter(|(_, &n)| n > 0)
                    .filter(|(v, _)| s.rows().all(|r| self.patterns[*v][r % g] == r / g))
                    .map(|(_, &n)| n)
                    .sum()
            })
            .collect()
    }

    fn objective(&self, dense: &DenseOverlaps) -> i64 {
        objective(dense, self.m, self.coupling_length)
    }

    fn optimum(&self, best: Incumbent, proof: Proof) -> Optimum {
        Optimum {
            t_star: IndependentOverlaps::new(self.gamma, self.m, self.kappa, best.t_vec)
                .expect("t-vector has canonical length"),
            f_star: best.f as u64,
            proof,
            pattern_counts: PatternCounts::new(self.gamma, self.m, best.counts)
                .expect("pattern count length"),
        }
    }
}

#[derive(Debug, Clone)]
struct Incumbent {
    f: i64,
    t_vec: Vec<i64>,
    counts: Vec<i64>,
}

impl Incumbent {
    /// Lower cycle count wins; ties go to the first t-vector in canonical order.
    fn beats(&self, other: &Option<Incumbent>) -> bool {
        match other {
            None => true,
            Some(o) => (self.f, &self.t_vec) < (o.f, &o.t_vec),
        }
    }
}

/// Minimizes the protograph cycle-6 count over balanced realizable overlap
/// vectors for the family `(κ, γ, m)` at coupling length `L`.
pub fn optimize(
    kappa: usize,
    gamma: usize,
    m: usize,
    coupling_length: usize,
    config: &OptimizerConfig,
) -> Result<Optimum> {
    check_family(kappa, gamma, m, coupling_length)?;
    let fam = Family::new(kappa, gamma, m, coupling_length, config.balance_tolerance);
    if !balance_feasible(&fam) {
        return Err(Error::Infeasible(format!(
            "{} circulants cannot be split into {} components of size {}..={}",
            kappa * gamma,
            m + 1,
            fam.lo,
            fam.hi
        )));
    }
    let deadline = config.time_budget.map(|d| Instant::now() + d);
    match config.strategy {
        Strategy::LocalSearch => {
            let best = local_search(&fam, config, deadline)?;
            Ok(fam.optimum(best, Proof::Heuristic))
        }
        Strategy::Exhaustive | Strategy::BranchAndBound => {
            let bound = config.strategy == Strategy::BranchAndBound;
            let seed = if bound {
                local_search(&fam, config, deadline).ok()
            } else {
                None
            };
            let mut search = TreeSearch::new(&fam, bound, deadline, seed);
            search.run();
            let proof = match (search.timed_out, bound) {
                (true, _) => Proof::Heuristic,
                (false, true) => Proof::Bounded,
                (false, false) => Proof::Exhaustive,
            };
            let best = search
                .best
                .ok_or_else(|| Error::Infeasible("no balanced partition found".into()))?;
            Ok(fam.optimum(best, proof))
        }
    }
}

/// Some integer split of `κγ` circulants into `m+1` sizes in `[lo, hi]`.
fn balance_feasible(fam: &Family) -> bool {
    let total = fam.kappa * fam.gamma;
    let parts = fam.m + 1;
    fam.lo <= fam.hi && fam.lo * parts <= total && total <= fam.hi * parts
}

struct TreeSearch<'a> {
    fam: &'a Family,
    bound: bool,
    deadline: Option<Instant>,
    counts: Vec<i64>,
    sizes: Vec<usize>,
    dense: DenseOverlaps,
    best: Option<Incumbent>,
    timed_out: bool,
    nodes: u64,
}

impl<'a> TreeSearch<'a> {
    fn new(
        fam: &'a Family,
        bound: bool,
        deadline: Option<Instant>,
        seed: Option<Incumbent>,
    ) -> Self {
        Self {
            fam,
            bound,
            deadline,
            counts: vec![0; fam.patterns.len()],
            sizes: vec![0; fam.m + 1],
            dense: DenseOverlaps::zeros(fam.gamma, fam.m),
            best: seed,
            timed_out: false,
            nodes: 0,
        }
    }

    fn run(&mut self) {
        let kappa = self.fam.kappa;
        self.dfs(0, kappa);
    }

    fn set(&mut self, v: usize, n: usize, sign: i64) {
        if n == 0 {
            return;
        }
        let fam = self.fam;
        self.dense.add_column(&fam.patterns[v], sign * n as i64);
        self.counts[v] += sign * n as i64;
        for x in 0..=fam.m {
            let delta = fam.load[v][x] * n;
            if sign > 0 {
                self.sizes[x] += delta;
            } else {
                self.sizes[x] -= delta;
            }
        }
    }

    /// Necessary condition for completing `remaining` columns from patterns
    /// `v..` within the balance window.
    fn balance_reachable(&self, v: usize, remaining: usize) -> bool {
        let fam = self.fam;
        (0..=fam.m).all(|x| {
            let (mut lo, mut hi) = (usize::MAX, 0);
            for load in &fam.load[v..] {
                lo = lo.min(load[x]);
                hi = hi.max(load[x]);
            }
            self.sizes[x] + lo * remaining <= fam.hi && self.sizes[x] + hi * remaining >= fam.lo
        })
    }

    fn lower_bound(&mut self, v: usize, remaining: usize) -> i64 {
        let fam = self.fam;
        let here = fam.objective(&self.dense);
        if !self.bound || remaining == 0 {
            return here;
        }
        let mut min_step = i64::MAX;
        for u in v..fam.patterns.len() {
            self.dense.add_column(&fam.patterns[u], 1);
            min_step = min_step.min(fam.objective(&self.dense) - here);
            self.dense.add_column(&fam.patterns[u], -1);
        }
        here + remaining as i64 * min_step
    }

    fn out_of_time(&mut self) -> bool {
        if self.timed_out {
            return true;
        }
        if self.nodes.is_multiple_of(1024) {
            if let Some(d) = self.deadline {
                if Instant::now() >= d {
                    self.timed_out = true;
                }
            }
        }
        self.timed_out
    }

    fn dfs(&mut self, v: usize, remaining: usize) {
        self.nodes += 1;
        if self.out_of_time() {
            return;
        }
        let last = self.fam.patterns.len() - 1;
        if v == last {
            self.set(v, remaining, 1);
            if self.fam.balanced(&self.sizes) {
                let f = self.fam.objective(&self.dense);
                if self.best.as_ref().is_none_or(|b| f <= b.f) {
                    let cand = Incumbent {
                        f,
                        t_vec: self.fam.t_vector(&self.counts),
                        counts: self.counts.clone(),
                    };
                    if cand.beats(&self.best) {
                        self.best = Some(cand);
                    }
                }
            }
            self.set(v, remaining, -1);
            return;
        }
        if !self.balance_reachable(v, remaining) {
            return;
        }
        if let Some(best) = self.best.as_ref().map(|b| b.f) {
            if self.lower_bound(v, remaining) > best {
                return;
            }
        }
        for n in (0..=remaining).rev() {
            self.set(v, n, 1);
            self.dfs(v + 1, remaining - n);
            self.set(v, n, -1);
            if self.timed_out {
                return;
            }
        }
    }
}

/// Seeded multi-restart hill climbing over partitions, using swaps of two
/// circulants in different components plus single reassignments when the
/// balance window allows them.
fn local_search(
    fam: &Family,
    config: &OptimizerConfig,
    deadline: Option<Instant>,
) -> Result<Incumbent> {
    let (gamma, kappa, m) = (fam.gamma, fam.kappa, fam.m);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut best: Option<Incumbent> = None;
    let restarts = config.restarts.max(1);
    for restart in 0..restarts {
        if restart > 0 && deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        let mut assign = random_balanced_assignment(fam, &mut rng);
        let mut dense = DenseOverlaps::zeros(gamma, m);
        for j in 0..kappa {
            dense.add_column(&column(&assign, gamma, kappa, j), 1);
        }
        let mut f = fam.objective(&dense);
        let cells = gamma * kappa;
        let mut moves: Vec<(usize, usize)> = (0..cells)
            .flat_map(|a| (a..cells).map(move |b| (a, b)))
            .collect();
        loop {
            moves.shuffle(&mut rng);
            let mut improved = false;
            for &(a, b) in &moves {
                let candidates: Vec<(usize, usize)> = if a == b {
                    (0..=m)
                        .filter(|&x| x != assign[a])
                        .map(|x| (x, assign[b]))
                        .collect()
                } else if assign[a] != assign[b] {
                    vec![(assign[b], assign[a])]
                } else {
                    continue;
                };
                for (xa, xb) in candidates {
                    let (old_a, old_b) = (assign[a], assign[b]);
                    let touched = touched_columns(a, b, kappa);
                    for &j in &touched {
                        dense.add_column(&column(&assign, gamma, kappa, j), -1);
                    }
                    assign[a] = xa;
                    if a != b {
                        assign[b] = xb;
                    }
                    for &j in &touched {
                        dense.add_column(&column(&assign, gamma, kappa, j), 1);
                    }
                    let nf = fam.objective(&dense);
                    let sizes = component_sizes(&assign, m);
                    if nf < f && fam.balanced(&sizes) {
                        f = nf;
                        improved = true;
                        break;
                    }
                    for &j in &touched {
                        dense.add_column(&column(&assign, gamma, kappa, j), -1);
                    }
                    assign[a] = old_a;
                    assign[b] = old_b;
                    for &j in &touched {
                        dense.add_column(&column(&assign, gamma, kappa, j), 1);
                    }
                }
            }
            if !improved {
                break;
            }
        }
        let part = PartitionMatrix::new(gamma, kappa, m, assign).expect("assignment in range");
        let counts = PatternCounts::from_partition(&part).counts().to_vec();
        let cand = Incumbent {
            f,
            t_vec: overlaps_from_partition(&part)
                .independent()
                .values()
                .to_vec(),
            counts,
        };
        if cand.beats(&best) {
            best = Some(cand);
        }
    }
    best.ok_or_else(|| Error::Infeasible("local search found no balanced partition".into()))
}

fn touched_columns(a: usize, b: usize, kappa: usize) -> Vec<usize> {
    let (ja, jb) = (a % kappa, b % kappa);
    if ja == jb {
        vec![ja]
    } else {
        vec![ja, jb]
    }
}

fn column(assign: &[usize], gamma: usize, kappa: usize, j: usize) -> Vec<usize> {
    (0..gamma).map(|i| assign[i * kappa + j]).collect()
}

fn component_sizes(assign: &[usize], m: usize) -> Vec<usize> {
    let mut s = vec![0; m + 1];
    for &x in assign {
        s[x] += 1;
    }
    s
}

/// Random assignment with component sizes as even as possible.
fn random_balanced_assignment(fam: &Family, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let cells = fam.gamma * fam.kappa;
    let parts = fam.m + 1;
    let mut labels: Vec<usize> = (0..cells).map(|c| c % parts).collect();
    // spread the remainder over random components
    let extra = cells % parts;
    if extra > 0 {
        let offset = rng.gen_range(0..parts);
        for (idx, label) in labels.iter_mut().rev().take(extra).enumerate() {
            *label = (offset + idx) % parts;
        }
    }
    labels.shuffle(rng);
    labels
}

/// Streams every realizable, balanced independent-overlap vector of the
/// family, in lexicographic order of the underlying pattern counts.
pub fn enumerate_feasible(
    kappa: usize,
    gamma: usize,
    m: usize,
    config: &OptimizerConfig,
) -> impl Iterator<Item = IndependentOverlaps> {
    let fam = Family::new(kappa, gamma, m, 1, config.balance_tolerance);
    let parts = fam.patterns.len();
    let mut state: Option<Vec<i64>> = None;
    let mut done = false;
    std::iter::from_fn(move || loop {
        if done {
            return None;
        }
        let next = match state.take() {
            None => {
                let mut c = vec![0i64; parts];
                c[0] = kappa as i64;
                Some(c)
            }
            Some(prev) => next_composition(prev),
        };
        match next {
            None => {
                done = true;
                return None;
            }
            Some(c) => {
                state = Some(c.clone());
                if fam.balanced(&fam.sizes_of(&c)) {
                    return Some(
                        IndependentOverlaps::new(gamma, m, kappa, fam.t_vector(&c))
                            .expect("canonical length"),
                    );
                }
            }
        }
    })
}

/// Next composition in reverse-lexicographic order of the count vector
/// (starting from `[κ, 0, …, 0]`, ending at `[0, …, 0, κ]`).
fn next_composition(mut c: Vec<i64>) -> Option<Vec<i64>> {
    let last = c.len() - 1;
    // rightmost non-zero entry before the last slot
    let tail = c[last];
    c[last] = 0;
    let pos = (0..last).rev().find(|&i| c[i] > 0)?;
    c[pos] -= 1;
    c[pos + 1] = tail + 1;
    Some(c)
}
