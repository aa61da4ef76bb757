//! Circulant power optimization: perturb the powers of a partitioned block
//! code to deactivate protograph cycles-6, never creating a lifted cycle-4.
//!
//! Every cycle of the window `Π_1^χ` is enumerated once and reduced to the
//! six base cells `(h mod γ, l mod κ)` its entries read powers from, so a move
//! only re-classifies the cycles through the cells it changes.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::seq::{index, SliceRandom};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::census::{
    active_cycles6, cycle_window, enumerate_cycles4, enumerate_cycles6, lifted_cycles4,
    ActiveCensus,
};
use crate::code::{ab_powers, CirculantBlockCode, PartitionMatrix, ScCodeSpec};
use crate::error::{Error, Result};

/// Candidate powers tried for each chosen circulant.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PowerCandidates {
    /// Every power in `[0, p)`.
    Exhaustive,
    /// A seeded random sample of this many distinct powers.
    Sample(usize),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpoConfig {
    pub seed: u64,
    /// Subset sizes tried per round, in order.
    pub subset_size_schedule: Vec<usize>,
    pub power_candidates: PowerCandidates,
    /// Stop as soon as `F_SC` is at or below this.
    pub target_f_sc: u64,
    /// Stop after this many consecutive rounds without an accepted move.
    pub max_stale_rounds: usize,
    /// Subsets of size ≥ 2 are drawn from this many top-θ circulants.
    pub top_pool: usize,
    /// Random subsets tried per size once the top-θ subsets are exhausted.
    pub random_subsets: usize,
    /// Joint assignments evaluated per subset; larger products are sampled.
    pub max_joint: usize,
    pub max_rounds: usize,
    pub time_budget: Option<Duration>,
}

impl Default for CpoConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            subset_size_schedule: vec![1, 2, 3],
            power_candidates: PowerCandidates::Exhaustive,
            target_f_sc: 0,
            max_stale_rounds: 8,
            top_pool: 12,
            random_subsets: 64,
            max_joint: 5000,
            max_rounds: 10_000,
            time_budget: None,
        }
    }
}

impl CpoConfig {
    fn validate(&self, p: usize) -> Result<()> {
        if self.subset_size_schedule.is_empty() || self.subset_size_schedule.contains(&0) {
            return Err(Error::InvalidParameters("subset sizes must be >= 1".into()));
        }
        if let PowerCandidates::Sample(s) = self.power_candidates {
            if s == 0 || s > p {
                return Err(Error::InvalidParameters(format!(
                    "power sample size {s} must be in 1..={p}"
                )));
            }
        }
        Ok(())
    }
}

/// One tried move.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceRow {
    pub round: usize,
    /// Changed circulants `(i, j)`.
    pub cells: Vec<(usize, usize)>,
    /// New power of each changed circulant.
    pub powers: Vec<usize>,
    pub f_before: u64,
    pub f_after: u64,
    pub accepted: bool,
}

/// Weighted per-entry active-cycle counts.
#[derive(Debug, Clone, PartialEq)]
pub struct Theta {
    /// Indexed by window position `(i', j')`.
    pub prime: Vec<Vec<f64>>,
    /// `θ_{i,j}`: `prime` folded by `(i' mod γ, j' mod κ)`.
    pub folded: Vec<Vec<f64>>,
}

impl Theta {
    pub fn total(&self) -> f64 {
        self.folded.iter().flatten().sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CpoState {
    /// Row-major `γ×κ` power matrix.
    pub powers: Vec<usize>,
    pub f_sc: u64,
    pub theta: Theta,
    pub trace: Vec<TraceRow>,
    pub rounds: usize,
}

/// `f_{i,j} = i·j mod p`, row-major.
pub fn init_ab_powers(gamma: usize, kappa: usize, p: usize) -> Vec<usize> {
    ab_powers(gamma, kappa, p)
}

/// `w_k = (m+1)/(m-k+2)`.
pub fn span_weight(m: usize, k: usize) -> f64 {
    (m + 1) as f64 / (m + 2 - k) as f64
}

/// θ' and θ from a classified window census: each active cycle adds `w_k`
/// to each of its six entries.
pub fn weighted_theta(spec: &ScCodeSpec, census: &ActiveCensus) -> Theta {
    let (g, kap) = (spec.gamma(), spec.kappa());
    let rows = (spec.memory() + census.chi) * g;
    let cols = census.chi * kap;
    let mut prime = vec![vec![0.0; cols]; rows];
    let mut folded = vec![vec![0.0; kap]; g];
    for wc in census.cycles.iter().filter(|c| c.active) {
        let w = span_weight(spec.memory(), wc.span);
        for (h, l) in wc.cycle.entries() {
            prime[h][l] += w;
            folded[h % g][l % kap] += w;
        }
    }
    Theta { prime, folded }
}

struct Cyc6 {
    cells: [u16; 6],
    pos: [(u16, u16); 6],
    /// Lifted cycles contributed when active: `p·(L-k+1)` for cycles
    /// starting in replica 1, else 0.
    weight: u64,
    w_theta: f64,
}

struct Cyc4 {
    cells: [u16; 4],
}

fn active6(c: &Cyc6, f: &[usize], p: usize) -> bool {
    let s = |k: usize| f[c.cells[k] as usize];
    (s(0) + s(1) + s(2) + 3 * p - s(3) - s(4) - s(5)).is_multiple_of(p)
}

fn active4(c: &Cyc4, f: &[usize], p: usize) -> bool {
    let s = |k: usize| f[c.cells[k] as usize];
    (s(0) + s(1) + 2 * p - s(2) - s(3)).is_multiple_of(p)
}

struct Engine {
    gamma: usize,
    kappa: usize,
    p: usize,
    rows: usize,
    cols: usize,
    cycles6: Vec<Cyc6>,
    cycles4: Vec<Cyc4>,
    by_cell6: Vec<Vec<u32>>,
    by_cell4: Vec<Vec<u32>>,
    powers: Vec<usize>,
    f_sc: u64,
}

impl Engine {
    fn new(spec: &ScCodeSpec) -> Self {
        let (g, kap, p, m, l) = (
            spec.gamma(),
            spec.kappa(),
            spec.p(),
            spec.memory(),
            spec.coupling_length(),
        );
        let window = cycle_window(spec);
        let cell = |h: usize, c: usize| ((h % g) * kap + c % kap) as u16;
        let cycles6: Vec<Cyc6> = enumerate_cycles6(&window)
            .into_iter()
            .map(|c| {
                let start = c.min_col() / kap;
                let span = c.max_col() / kap - start + 1;
                let e = c.entries();
                Cyc6 {
                    cells: e.map(|(h, c)| cell(h, c)),
                    pos: e.map(|(h, c)| (h as u16, c as u16)),
                    weight: if start == 0 {
                        (p * (l + 1 - span)) as u64
                    } else {
                        0
                    },
                    w_theta: span_weight(m, span),
                }
            })
            .collect();
        let cycles4: Vec<Cyc4> = enumerate_cycles4(&window)
            .into_iter()
            .map(|c| Cyc4 {
                cells: c.entries().map(|(h, c)| cell(h, c)),
            })
            .collect();
        let mut by_cell6 = vec![Vec::new(); g * kap];
        for (idx, c) in cycles6.iter().enumerate() {
            for &x in &c.cells {
                by_cell6[x as usize].push(idx as u32);
            }
        }
        let mut by_cell4 = vec![Vec::new(); g * kap];
        for (idx, c) in cycles4.iter().enumerate() {
            for &x in &c.cells {
                by_cell4[x as usize].push(idx as u32);
            }
        }
        for list in by_cell6.iter_mut().chain(by_cell4.iter_mut()) {
            list.dedup();
        }
        let mut e = Self {
            gamma: g,
            kappa: kap,
            p,
            rows: window.rows(),
            cols: window.cols(),
            cycles6,
            cycles4,
            by_cell6,
            by_cell4,
            powers: spec.block().powers().to_vec(),
            f_sc: 0,
        };
        e.f_sc = e.full_f_sc();
        e
    }

    fn full_f_sc(&self) -> u64 {
        self.cycles6
            .iter()
            .filter(|c| c.weight > 0 && active6(c, &self.powers, self.p))
            .map(|c| c.weight)
            .sum()
    }

    fn has_active_cycle4(&self) -> bool {
        self.cycles4
            .iter()
            .any(|c| active4(c, &self.powers, self.p))
    }

    fn theta(&self) -> Theta {
        let mut prime = vec![vec![0.0; self.cols]; self.rows];
        let mut folded = vec![vec![0.0; self.kappa]; self.gamma];
        for c in self
            .cycles6
            .iter()
            .filter(|c| active6(c, &self.powers, self.p))
        {
            for (k, &(h, l)) in c.pos.iter().enumerate() {
                prime[h as usize][l as usize] += c.w_theta;
                let x = c.cells[k] as usize;
                folded[x / self.kappa][x % self.kappa] += c.w_theta;
            }
        }
        Theta { prime, folded }
    }

    fn affected(&self, cells: &[usize]) -> (Vec<u32>, Vec<u32>) {
        let collect = |by: &Vec<Vec<u32>>| {
            let set: BTreeSet<u32> = cells.iter().flat_map(|&c| by[c].iter().copied()).collect();
            set.into_iter().collect::<Vec<_>>()
        };
        (collect(&self.by_cell6), collect(&self.by_cell4))
    }

    fn weight_of(&self, cycles: &[u32]) -> u64 {
        cycles
            .iter()
            .map(|&i| &self.cycles6[i as usize])
            .filter(|c| c.weight > 0 && active6(c, &self.powers, self.p))
            .map(|c| c.weight)
            .sum()
    }

    fn guard_ok(&self, cycles: &[u32]) -> bool {
        cycles
            .iter()
            .all(|&i| !active4(&self.cycles4[i as usize], &self.powers, self.p))
    }

    /// Best joint assignment of `combos` to `cells` that strictly lowers
    /// `F_SC` and keeps the lift free of cycles-4.
    fn best_move(&mut self, cells: &[usize], combos: &[Vec<usize>]) -> Option<(Vec<usize>, u64)> {
        let (aff6, aff4) = self.affected(cells);
        let local_before = self.weight_of(&aff6);
        let base = self.f_sc - local_before;
        let saved: Vec<usize> = cells.iter().map(|&c| self.powers[c]).collect();
        let mut best: Option<(Vec<usize>, u64)> = None;
        for combo in combos {
            if *combo == saved {
                continue;
            }
            for (&c, &f) in cells.iter().zip(combo) {
                self.powers[c] = f;
            }
            let after = base + self.weight_of(&aff6);
            let bar = best.as_ref().map_or(self.f_sc, |b| b.1);
            if after < bar && self.guard_ok(&aff4) {
                best = Some((combo.clone(), after));
            }
        }
        for (&c, &f) in cells.iter().zip(&saved) {
            self.powers[c] = f;
        }
        best
    }

    fn apply(&mut self, cells: &[usize], combo: &[usize], f_after: u64) {
        for (&c, &f) in cells.iter().zip(combo) {
            self.powers[c] = f;
        }
        self.f_sc = f_after;
    }
}

fn candidates(config: &CpoConfig, p: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    match config.power_candidates {
        PowerCandidates::Exhaustive => (0..p).collect(),
        PowerCandidates::Sample(s) => {
            let mut v = index::sample(rng, p, s).into_vec();
            v.sort_unstable();
            v
        }
    }
}

/// Joint assignments for `size` circulants: the full product when it fits
/// within `max_joint`, else a seeded sample of that many.
fn joint_combos(
    config: &CpoConfig,
    p: usize,
    size: usize,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<usize>> {
    let lists: Vec<Vec<usize>> = (0..size).map(|_| candidates(config, p, rng)).collect();
    let product: usize = lists.iter().map(Vec::len).product();
    if product <= config.max_joint.max(1) {
        let mut out = vec![Vec::new()];
        for list in &lists {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    list.iter().map(move |&f| {
                        let mut v = prefix.clone();
                        v.push(f);
                        v
                    })
                })
                .collect();
        }
        out
    } else {
        use rand::Rng;
        (0..config.max_joint)
            .map(|_| lists.iter().map(|l| l[rng.gen_range(0..l.len())]).collect())
            .collect()
    }
}

fn subsets(pool: &[usize], size: usize) -> Vec<Vec<usize>> {
    if size == 0 {
        return vec![Vec::new()];
    }
    if pool.len() < size {
        return Vec::new();
    }
    let mut out = Vec::new();
    for (i, &x) in pool.iter().enumerate() {
        for mut rest in subsets(&pool[i + 1..], size - 1) {
            rest.insert(0, x);
            out.push(rest);
        }
    }
    out
}

/// Circulants with `θ > 0`, highest first, ties by `(i, j)`.
fn ranked_cells(theta: &Theta) -> Vec<usize> {
    let mut cells: Vec<(usize, f64)> = theta
        .folded
        .iter()
        .flatten()
        .enumerate()
        .filter(|(_, &t)| t > 0.0)
        .map(|(c, &t)| (c, t))
        .collect();
    cells.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    cells.into_iter().map(|(c, _)| c).collect()
}

/// Runs the optimizer from the code's current powers.
pub fn run_cpo(spec: &ScCodeSpec, config: &CpoConfig) -> Result<CpoState> {
    config.validate(spec.p())?;
    let initial4 = lifted_cycles4(spec);
    if initial4 > 0 {
        return Err(Error::InitialCycle4(initial4 as usize));
    }
    let deadline = config.time_budget.map(|d| Instant::now() + d);
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut eng = Engine::new(spec);
    let mut trace = Vec::new();
    let mut stale = 0usize;
    let mut round = 0usize;
    let kappa = eng.kappa;
    let to_ij = |c: usize| (c / kappa, c % kappa);

    while eng.f_sc > config.target_f_sc
        && stale < config.max_stale_rounds
        && round < config.max_rounds
    {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            break;
        }
        round += 1;
        let ranked = ranked_cells(&eng.theta());
        let mut accepted: Option<(Vec<usize>, Vec<usize>, u64)> = None;

        // Top-θ subsets; only worth retrying after the state changed.
        if stale == 0 {
            'sizes: for &size in &config.subset_size_schedule {
                let pool: &[usize] = if size == 1 {
                    &ranked
                } else {
                    &ranked[..ranked.len().min(config.top_pool)]
                };
                for subset in subsets(pool, size) {
                    let combos = joint_combos(config, eng.p, size, &mut rng);
                    if let Some((combo, f)) = eng.best_move(&subset, &combos) {
                        accepted = Some((subset, combo, f));
                        break 'sizes;
                    }
                }
            }
        }
        if accepted.is_none() && !ranked.is_empty() {
            'random: for &size in &config.subset_size_schedule {
                let size = size.min(ranked.len());
                for _ in 0..config.random_subsets {
                    let mut subset: Vec<usize> =
                        ranked.choose_multiple(&mut rng, size).copied().collect();
                    subset.sort_unstable();
                    let combos = joint_combos(config, eng.p, size, &mut rng);
                    if let Some((combo, f)) = eng.best_move(&subset, &combos) {
                        accepted = Some((subset, combo, f));
                        break 'random;
                    }
                }
            }
        }

        match accepted {
            Some((cells, combo, f)) => {
                trace.push(TraceRow {
                    round,
                    cells: cells.iter().map(|&c| to_ij(c)).collect(),
                    powers: combo.clone(),
                    f_before: eng.f_sc,
                    f_after: f,
                    accepted: true,
                });
                eng.apply(&cells, &combo, f);
                stale = 0;
            }
            None => {
                trace.push(TraceRow {
                    round,
                    cells: Vec::new(),
                    powers: Vec::new(),
                    f_before: eng.f_sc,
                    f_after: eng.f_sc,
                    accepted: false,
                });
                stale += 1;
            }
        }
    }

    debug_assert_eq!(eng.f_sc, eng.full_f_sc());
    debug_assert!(!eng.has_active_cycle4());
    Ok(CpoState {
        theta: eng.theta(),
        powers: eng.powers,
        f_sc: eng.f_sc,
        trace,
        rounds: round,
    })
}

impl CpoState {
    /// A copy of the code carrying the optimized powers.
    pub fn apply_to(&self, spec: &ScCodeSpec) -> Result<ScCodeSpec> {
        spec.with_powers(self.powers.clone())
    }

    pub fn accepted_moves(&self) -> usize {
        self.trace.iter().filter(|t| t.accepted).count()
    }
}

/// `F_SC` recomputed from scratch for the given powers.
pub fn f_sc_of(spec: &ScCodeSpec) -> u64 {
    active_cycles6(spec).f_sc()
}

/// Reorders the columns of `partition` (each column keeps its component
/// pattern, so every overlap parameter is unchanged) to minimize `F_SC` under
/// the block's powers. Every distinct arrangement is scored when there are at
/// most `max_arrangements`; otherwise first-improvement column swaps run to a
/// local minimum. Ties keep the earlier arrangement.
pub fn arrange_columns(
    block: &CirculantBlockCode,
    partition: &PartitionMatrix,
    coupling_length: usize,
    max_arrangements: usize,
) -> Result<(PartitionMatrix, u64)> {
    let (g, kap, m) = (partition.gamma(), partition.kappa(), partition.memory());
    let pats: Vec<Vec<usize>> = (0..kap).map(|j| partition.column_pattern(j)).collect();
    let build = |order: &[Vec<usize>]| -> Result<PartitionMatrix> {
        let mut assign = vec![0; g * kap];
        for (j, col) in order.iter().enumerate() {
            for (i, &x) in col.iter().enumerate() {
                assign[i * kap + j] = x;
            }
        }
        PartitionMatrix::new(g, kap, m, assign)
    };
    let score = |order: &[Vec<usize>]| -> Result<u64> {
        let spec = ScCodeSpec::new(block.clone(), build(order)?, coupling_length)?;
        Ok(f_sc_of(&spec))
    };
    let mut order = pats.clone();
    order.sort();
    let mut best = (score(&order)?, order.clone());
    if arrangement_count(&order) <= max_arrangements as u128 {
        while next_permutation(&mut order) {
            let f = score(&order)?;
            if f < best.0 {
                best = (f, order.clone());
            }
        }
    } else {
        let mut cur = best.clone();
        loop {
            let mut improved = false;
            for a in 0..kap {
                for b in a + 1..kap {
                    if cur.1[a] == cur.1[b] {
                        continue;
                    }
                    cur.1.swap(a, b);
                    let f = score(&cur.1)?;
                    if f < cur.0 {
                        cur.0 = f;
                        improved = true;
                    } else {
                        cur.1.swap(a, b);
                    }
                }
            }
            if !improved {
                break;
            }
        }
        best = cur;
    }
    Ok((build(&best.1)?, best.0))
}

/// Distinct orderings of a sorted multiset.
fn arrangement_count<T: PartialEq>(sorted: &[T]) -> u128 {
    let mut total: u128 = 1;
    let mut run = 0u128;
    for (i, x) in sorted.iter().enumerate() {
        run = if i > 0 && sorted[i - 1] == *x {
            run + 1
        } else {
            1
        };
        total = total.saturating_mul(i as u128 + 1) / run;
    }
    total
}

fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    let Some(i) = (1..v.len()).rev().find(|&i| v[i - 1] < v[i]) else {
        return false;
    };
    let j = (i..v.len())
        .rev()
        .find(|&j| v[j] > v[i - 1])
        .expect("pivot has a successor");
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}
