//! Circulant-based block codes, their partitions into coupled components, the
//! SC protograph and the lifting to full parity-check matrices.
//!
//! Row and column indices are 0-based throughout; replica indices are
//! 1-based. The circulant `σ` is the `p×p` identity with its columns shifted
//! one position to the left, so `σ^f` has its 1 in row `a` at column
//! `(a - f) mod p`.

use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;

/// A `γ×κ` array of `p×p` circulant permutation matrices `σ^{f(i,j)}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CirculantBlockCode {
    gamma: usize,
    kappa: usize,
    p: usize,
    powers: Vec<usize>,
}

impl CirculantBlockCode {
    /// `powers` is row-major, `γ` rows of `κ` entries, each in `[0, p)`.
    pub fn new(gamma: usize, kappa: usize, p: usize, powers: Vec<usize>) -> Result<Self> {
        check_dims(gamma, kappa)?;
        if p == 0 {
            return Err(Error::InvalidParameters(
                "circulant size p must be >= 1".into(),
            ));
        }
        if powers.len() != gamma * kappa {
            return Err(Error::InvalidParameters(format!(
                "expected {} circulant powers, got {}",
                gamma * kappa,
                powers.len()
            )));
        }
        if let Some(&f) = powers.iter().find(|&&f| f >= p) {
            return Err(Error::InvalidParameters(format!(
                "circulant power {f} outside [0, {p})"
            )));
        }
        Ok(Self {
            gamma,
            kappa,
            p,
            powers,
        })
    }

    /// Array-based powers `f(i,j) = i·j mod p`.
    pub fn array_based(gamma: usize, kappa: usize, p: usize) -> Result<Self> {
        let powers = ab_powers(gamma, kappa, p);
        Self::new(gamma, kappa, p, powers)
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn power(&self, i: usize, j: usize) -> usize {
        self.powers[i * self.kappa + j]
    }

    /// Row-major power matrix.
    pub fn powers(&self) -> &[usize] {
        &self.powers
    }

    /// Same code with a different power matrix.
    pub fn with_powers(&self, powers: Vec<usize>) -> Result<Self> {
        Self::new(self.gamma, self.kappa, self.p, powers)
    }
}

/// Row-major `f(i,j) = i·j mod p`.
pub fn ab_powers(gamma: usize, kappa: usize, p: usize) -> Vec<usize> {
    (0..gamma)
        .flat_map(|i| (0..kappa).map(move |j| (i * j) % p.max(1)))
        .collect()
}

fn check_dims(gamma: usize, kappa: usize) -> Result<()> {
    if gamma < 2 {
        return Err(Error::InvalidParameters(format!("gamma = {gamma} < 2")));
    }
    if kappa < gamma {
        return Err(Error::InvalidParameters(format!(
            "kappa = {kappa} < gamma = {gamma}"
        )));
    }
    Ok(())
}

/// Assignment of each circulant of the block code to one of the components
/// `H_0, …, H_m`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PartitionMatrix {
    gamma: usize,
    kappa: usize,
    m: usize,
    assign: Vec<usize>,
}

impl PartitionMatrix {
    /// `assign` is row-major with entries in `0..=m`.
    pub fn new(gamma: usize, kappa: usize, m: usize, assign: Vec<usize>) -> Result<Self> {
        check_dims(gamma, kappa)?;
        if assign.len() != gamma * kappa {
            return Err(Error::InvalidPartition(format!(
                "expected {} entries, got {}",
                gamma * kappa,
                assign.len()
            )));
        }
        if let Some(&x) = assign.iter().find(|&&x| x > m) {
            return Err(Error::InvalidPartition(format!(
                "component {x} exceeds memory {m}"
            )));
        }
        Ok(Self {
            gamma,
            kappa,
            m,
            assign,
        })
    }

    /// Everything in `H_0`.
    pub fn uncoupled(gamma: usize, kappa: usize, m: usize) -> Result<Self> {
        Self::new(gamma, kappa, m, vec![0; gamma * kappa])
    }

    pub fn gamma(&self) -> usize {
        self.gamma
    }

    pub fn kappa(&self) -> usize {
        self.kappa
    }

    pub fn memory(&self) -> usize {
        self.m
    }

    pub fn component(&self, i: usize, j: usize) -> usize {
        self.assign[i * self.kappa + j]
    }

    pub fn assignments(&self) -> &[usize] {
        &self.assign
    }

    /// Column pattern: the component of each row group's circulant in column `j`.
    pub fn column_pattern(&self, j: usize) -> Vec<usize> {
        (0..self.gamma).map(|i| self.component(i, j)).collect()
    }

    /// Number of circulants assigned to each component.
    pub fn component_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.m + 1];
        for &x in &self.assign {
            sizes[x] += 1;
        }
        sizes
    }

    /// Protograph `H_x^p` of component `x` (a `γ×κ` 0/1 matrix).
    pub fn component_protograph(&self, x: usize) -> SparseBinaryMatrix {
        let entries = (0..self.gamma)
            .flat_map(|i| (0..self.kappa).map(move |j| (i, j)))
            .filter(|&(i, j)| self.component(i, j) == x);
        SparseBinaryMatrix::from_entries(self.gamma, self.kappa, entries)
            .expect("component entries are in range")
    }

    /// The stacked protograph `[H_0^p; …; H_m^p]` of size `(m+1)γ × κ`.
    pub fn stacked_protograph(&self) -> SparseBinaryMatrix {
        let entries = (0..self.gamma)
            .flat_map(|i| (0..self.kappa).map(move |j| (i, j)))
            .map(|(i, j)| (self.component(i, j) * self.gamma + i, j));
        SparseBinaryMatrix::from_entries((self.m + 1) * self.gamma, self.kappa, entries)
            .expect("stacked entries are in range")
    }
}

/// Cutting-vector partition with `m = 1`: circulant `(i, j)` goes to `H_0`
/// iff `j < ζ_i`.
pub fn partition_from_cutting_vector(
    gamma: usize,
    kappa: usize,
    zeta: &[usize],
) -> Result<PartitionMatrix> {
    partition_from_cutting_vectors(gamma, kappa, &[zeta.to_vec()])
}

/// Multi-vector generalization: with cutting vectors `ζ^1 ≤ … ≤ ζ^m`
/// (element-wise), circulant `(i, j)` goes to component
/// `|{c : j ≥ ζ^c_i}|`.
pub fn partition_from_cutting_vectors(
    gamma: usize,
    kappa: usize,
    zetas: &[Vec<usize>],
) -> Result<PartitionMatrix> {
    check_dims(gamma, kappa)?;
    if zetas.is_empty() {
        return Err(Error::InvalidCuttingVector("no cutting vectors".into()));
    }
    for zeta in zetas {
        if zeta.len() != gamma {
            return Err(Error::InvalidCuttingVector(format!(
                "length {} != gamma {gamma}",
                zeta.len()
            )));
        }
        if zeta.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidCuttingVector(format!(
                "{zeta:?} is not ascending"
            )));
        }
        if zeta.iter().any(|&z| z > kappa) {
            return Err(Error::InvalidCuttingVector(format!(
                "{zeta:?} exceeds kappa {kappa}"
            )));
        }
    }
    for pair in zetas.windows(2) {
        if pair[0].iter().zip(&pair[1]).any(|(a, b)| a > b) {
            return Err(Error::InvalidCuttingVector(format!(
                "{:?} is not element-wise below {:?}",
                pair[0], pair[1]
            )));
        }
    }
    let assign = (0..gamma)
        .flat_map(|i| (0..kappa).map(move |j| (i, j)))
        .map(|(i, j)| zetas.iter().filter(|z| j >= z[i]).count())
        .collect();
    PartitionMatrix::new(gamma, kappa, zetas.len(), assign)
}

/// Everything needed to materialize `H_SC` and its protograph.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ScCodeSpec {
    block: CirculantBlockCode,
    partition: PartitionMatrix,
    coupling_length: usize,
}

impl ScCodeSpec {
    pub fn new(
        block: CirculantBlockCode,
        partition: PartitionMatrix,
        coupling_length: usize,
    ) -> Result<Self> {
        if block.gamma() != partition.gamma() || block.kappa() != partition.kappa() {
            return Err(Error::InvalidParameters(format!(
                "block code is {}x{} but partition is {}x{}",
                block.gamma(),
                block.kappa(),
                partition.gamma(),
                partition.kappa()
            )));
        }
        if coupling_length == 0 {
            return Err(Error::InvalidParameters(
                "coupling length L must be >= 1".into(),
            ));
        }
        Ok(Self {
            block,
            partition,
            coupling_length,
        })
    }

    pub fn block(&self) -> &CirculantBlockCode {
        &self.block
    }

    pub fn partition(&self) -> &PartitionMatrix {
        &self.partition
    }

    pub fn gamma(&self) -> usize {
        self.block.gamma()
    }

    pub fn kappa(&self) -> usize {
        self.block.kappa()
    }

    pub fn p(&self) -> usize {
        self.block.p()
    }

    pub fn memory(&self) -> usize {
        self.partition.memory()
    }

    pub fn coupling_length(&self) -> usize {
        self.coupling_length
    }

    /// Same code with a different power matrix.
    pub fn with_powers(&self, powers: Vec<usize>) -> Result<Self> {
        Self::new(
            self.block.with_powers(powers)?,
            self.partition.clone(),
            self.coupling_length,
        )
    }

    /// Protograph dimensions `((L+m)γ, Lκ)`.
    pub fn protograph_dims(&self) -> (usize, usize) {
        (
            (self.coupling_length + self.memory()) * self.gamma(),
            self.coupling_length * self.kappa(),
        )
    }

    /// Lifted dimensions `((L+m)γp, Lκp)`.
    pub fn lifted_dims(&self) -> (usize, usize) {
        let (r, c) = self.protograph_dims();
        (r * self.p(), c * self.p())
    }

    /// Circulant power at protograph coordinate `(h, l)`.
    pub fn power_at(&self, h: usize, l: usize) -> usize {
        self.block.power(h % self.gamma(), l % self.kappa())
    }

    fn protograph_entries(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let (g, k) = (self.gamma(), self.kappa());
        (0..self.coupling_length).flat_map(move |r| {
            (0..g).flat_map(move |i| {
                (0..k).map(move |j| ((r + self.partition.component(i, j)) * g + i, r * k + j))
            })
        })
    }

    /// `H_SC^p`: replica `r` (1-based) occupies columns `[(r-1)κ, rκ)` with
    /// component `x` at row block `r-1+x`.
    pub fn protograph(&self) -> SparseBinaryMatrix {
        let (rows, cols) = self.protograph_dims();
        SparseBinaryMatrix::from_entries(rows, cols, self.protograph_entries())
            .expect("protograph entries are in range")
    }

    /// The lifted parity-check matrix `H_SC`.
    pub fn lift(&self) -> SparseBinaryMatrix {
        let (rows, cols) = self.lifted_dims();
        let p = self.p();
        let entries = self.protograph_entries().flat_map(move |(h, l)| {
            let f = self.power_at(h, l);
            (0..p).map(move |a| (h * p + a, l * p + (a + p - f) % p))
        });
        SparseBinaryMatrix::from_entries(rows, cols, entries).expect("lifted entries are in range")
    }

    fn window_ranges(
        &self,
        r: usize,
        k: usize,
    ) -> Result<(std::ops::Range<usize>, std::ops::Range<usize>)> {
        let l = self.coupling_length;
        if r == 0 || r > l || k == 0 || k > l + 1 - r {
            return Err(Error::WindowOutOfRange { r, k, l });
        }
        let (g, kp, m) = (self.gamma(), self.kappa(), self.memory());
        Ok((
            (r - 1) * g..(r + m + k - 1) * g,
            (r - 1) * kp..(r + k - 1) * kp,
        ))
    }

    /// Protograph-scale window `Π_r^k`: rows `[(r-1)γ, (r+m+k-1)γ)` and
    /// columns `[(r-1)κ, (r+k-1)κ)`.
    pub fn window(&self, r: usize, k: usize) -> Result<SparseBinaryMatrix> {
        let (rows, cols) = self.window_ranges(r, k)?;
        self.protograph().submatrix(rows, cols)
    }

    /// Lifted-scale window: the protograph ranges scaled by `p`.
    pub fn lifted_window(&self, r: usize, k: usize) -> Result<SparseBinaryMatrix> {
        let (rows, cols) = self.window_ranges(r, k)?;
        let p = self.p();
        self.lift()
            .submatrix(rows.start * p..rows.end * p, cols.start * p..cols.end * p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(gamma: usize, kappa: usize, p: usize, part: PartitionMatrix, l: usize) -> ScCodeSpec {
        ScCodeSpec::new(
            CirculantBlockCode::array_based(gamma, kappa, p).unwrap(),
            part,
            l,
        )
        .unwrap()
    }

    #[test]
    fn cutting_vector_counts() {
        let part = partition_from_cutting_vector(3, 17, &[4, 9, 13]).unwrap();
        assert_eq!(part.component_sizes(), vec![26, 25]);
        let all = partition_from_cutting_vector(3, 17, &[17, 17, 17]).unwrap();
        assert!(all.assignments().iter().all(|&x| x == 0));
        let g4 = partition_from_cutting_vector(4, 17, &[3, 7, 11, 15]).unwrap();
        assert_eq!(g4.memory(), 1);
        assert_eq!(g4.component_sizes(), vec![36, 32]);
    }

    #[test]
    fn cutting_vector_errors() {
        assert!(partition_from_cutting_vector(3, 17, &[9, 4, 13]).is_err());
        assert!(partition_from_cutting_vector(3, 17, &[4, 9, 18]).is_err());
        assert!(partition_from_cutting_vector(3, 17, &[4, 9]).is_err());
        assert!(partition_from_cutting_vectors(3, 17, &[vec![4, 9, 13], vec![3, 10, 14]]).is_err());
    }

    #[test]
    fn two_cutting_vectors() {
        let part = partition_from_cutting_vectors(3, 6, &[vec![1, 2, 3], vec![3, 4, 5]]).unwrap();
        assert_eq!(part.memory(), 2);
        assert_eq!(part.column_pattern(0), vec![0, 0, 0]);
        assert_eq!(part.column_pattern(2), vec![1, 1, 0]);
        assert_eq!(part.column_pattern(5), vec![2, 2, 2]);
    }

    #[test]
    fn code_validation() {
        assert!(CirculantBlockCode::new(1, 3, 3, vec![0; 3]).is_err());
        assert!(CirculantBlockCode::new(3, 2, 3, vec![0; 6]).is_err());
        assert!(CirculantBlockCode::new(2, 2, 3, vec![0, 1, 2, 3]).is_err());
        assert!(PartitionMatrix::new(2, 2, 1, vec![0, 1, 2, 0]).is_err());
        let ab = CirculantBlockCode::array_based(3, 7, 7).unwrap();
        assert_eq!(ab.power(2, 3), 6);
        assert!((0..7).all(|j| ab.power(0, j) == 0));
    }

    #[test]
    fn uncoupled_single_replica_is_all_ones() {
        let s = spec(3, 5, 1, PartitionMatrix::uncoupled(3, 5, 0).unwrap(), 1);
        assert_eq!(s.protograph(), SparseBinaryMatrix::ones(3, 5));
    }

    #[test]
    fn protograph_shape_and_column_sums() {
        let part = PartitionMatrix::new(3, 5, 2, vec![0, 1, 2, 0, 1, 1, 2, 0, 0, 2, 2, 0, 1, 1, 0])
            .unwrap();
        let s = spec(3, 5, 5, part.clone(), 3);
        let h = s.protograph();
        assert_eq!((h.rows(), h.cols()), (15, 15));
        assert!(h.col_weights().iter().all(|&w| w == 3));
        // window(1,1) is the stacked component protograph
        assert_eq!(s.window(1, 1).unwrap(), part.stacked_protograph());
        assert_eq!(s.window(1, 2).unwrap(), s.window(2, 2).unwrap());
        let w = s.window(1, 2).unwrap();
        assert_eq!((w.rows(), w.cols()), (12, 10));
        assert!(s.window(3, 2).is_err());
        assert!(s.window(0, 1).is_err());
    }

    #[test]
    fn window_dims_m1() {
        let part = partition_from_cutting_vector(3, 6, &[2, 3, 4]).unwrap();
        let s = spec(3, 6, 7, part, 4);
        let w = s.window(1, 2).unwrap();
        assert_eq!((w.rows(), w.cols()), (9, 12));
        let lw = s.lifted_window(2, 2).unwrap();
        assert_eq!((lw.rows(), lw.cols()), (63, 84));
        assert_eq!(lw, s.lifted_window(1, 2).unwrap());
    }

    #[test]
    fn components_sum_to_all_ones() {
        let part = PartitionMatrix::new(2, 3, 2, vec![0, 2, 1, 1, 0, 2]).unwrap();
        let mut total = vec![vec![0u8; 3]; 2];
        for x in 0..=2 {
            for (r, c) in part.component_protograph(x).entries() {
                total[r][c] += 1;
            }
        }
        assert_eq!(total, vec![vec![1; 3]; 2]);
    }

    #[test]
    fn lift_with_p1_is_identity_and_sigma_orientation() {
        let part = partition_from_cutting_vector(3, 4, &[1, 2, 3]).unwrap();
        let s = spec(3, 4, 1, part, 3);
        assert_eq!(s.lift(), s.protograph());

        // σ^1 of size 3: row a has its 1 in column a-1 mod 3.
        let block = CirculantBlockCode::new(2, 2, 3, vec![1, 0, 0, 0]).unwrap();
        let s = ScCodeSpec::new(block, PartitionMatrix::uncoupled(2, 2, 0).unwrap(), 1).unwrap();
        let h = s.lift();
        assert_eq!(h.row(0)[0], 2);
        assert_eq!(h.row(1)[0], 0);
        assert_eq!(h.row(2)[0], 1);
    }

    #[test]
    fn lifted_weights_and_periodicity() {
        let part = PartitionMatrix::new(3, 5, 1, vec![0, 1, 1, 0, 1, 1, 0, 0, 1, 0, 0, 1, 0, 1, 1])
            .unwrap();
        let s = spec(3, 5, 5, part, 4);
        let h = s.lift();
        let (p, g, k) = (5, 3, 5);
        assert_eq!((h.rows(), h.cols()), ((4 + 1) * g * p, 4 * k * p));
        assert!(h.col_weights().iter().all(|&w| w == 3));
        for (r, c) in h.entries() {
            if r + p * g < h.rows() && c + p * k < h.cols() {
                assert!(h.get(r + p * g, c + p * k));
            }
        }
    }
}
