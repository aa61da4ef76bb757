//! Text interchange formats: alist matrices, partition and power grids, and
//! CSV reports.

use std::fmt::Write as _;

use crate::census::CycleCensus;
use crate::code::PartitionMatrix;
use crate::cpo::TraceRow;
use crate::error::{Error, Result};
use crate::matrix::SparseBinaryMatrix;
use crate::objects::ObjectSpecies;
use crate::optimizer::Optimum;

fn join<T: ToString>(items: impl IntoIterator<Item = T>) -> String {
    items
        .into_iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(" ")
}

/// alist text: `N M`, max column/row degree, column degrees, row degrees,
/// then 1-based row lists per column and column lists per row, each padded
/// with zeros to the maximum degree.
pub fn to_alist(matrix: &SparseBinaryMatrix) -> String {
    let cw = matrix.col_weights();
    let rw = matrix.row_weights();
    let max_c = cw.iter().copied().max().unwrap_or(0);
    let max_r = rw.iter().copied().max().unwrap_or(0);
    let mut out = String::new();
    let padded = |list: &[usize], width: usize| {
        join(
            list.iter()
                .map(|x| x + 1)
                .chain(std::iter::repeat_n(0, width - list.len())),
        )
    };
    writeln!(out, "{} {}", matrix.cols(), matrix.rows()).unwrap();
    writeln!(out, "{max_c} {max_r}").unwrap();
    writeln!(out, "{}", join(&cw)).unwrap();
    writeln!(out, "{}", join(&rw)).unwrap();
    for c in 0..matrix.cols() {
        writeln!(out, "{}", padded(matrix.col(c), max_c)).unwrap();
    }
    for r in 0..matrix.rows() {
        writeln!(out, "{}", padded(matrix.row(r), max_r)).unwrap();
    }
    out
}

fn numbers(line: &str, what: &str) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse()
                .map_err(|_| Error::Parse(format!("{what}: bad integer {t:?}")))
        })
        .collect()
}

/// Parses alist text. Row lists must agree with the column lists.
pub fn from_alist(text: &str) -> Result<SparseBinaryMatrix> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let mut next = |what: &str| {
        lines
            .next()
            .ok_or_else(|| Error::Parse(format!("alist ended before {what}")))
            .and_then(|l| numbers(l, what))
    };
    let dims = next("dimensions")?;
    let [n, m] = dims[..] else {
        return Err(Error::Parse("first line must be `N M`".into()));
    };
    next("maximum degrees")?;
    let cw = next("column degrees")?;
    let rw = next("row degrees")?;
    if cw.len() != n || rw.len() != m {
        return Err(Error::Parse("degree lines do not match N and M".into()));
    }
    let mut entries = Vec::new();
    for (c, &w) in cw.iter().enumerate() {
        let list = next("column list")?;
        let rows: Vec<usize> = list.into_iter().filter(|&x| x != 0).collect();
        if rows.len() != w {
            return Err(Error::Parse(format!(
                "column {} lists {} rows, degree says {w}",
                c + 1,
                rows.len()
            )));
        }
        entries.extend(rows.into_iter().map(|r| (r - 1, c)));
    }
    let matrix = SparseBinaryMatrix::from_entries(m, n, entries)?;
    for (r, &w) in rw.iter().enumerate() {
        let cols: Vec<usize> = next("row list")?
            .into_iter()
            .filter(|&x| x != 0)
            .map(|x| x - 1)
            .collect();
        let mut sorted = cols.clone();
        sorted.sort_unstable();
        if sorted.len() != w || sorted != matrix.row(r) {
            return Err(Error::Parse(format!(
                "row {} disagrees with the column lists",
                r + 1
            )));
        }
    }
    Ok(matrix)
}

fn grid(rows: usize, cols: usize, at: impl Fn(usize, usize) -> usize) -> String {
    let mut out = String::new();
    for i in 0..rows {
        writeln!(out, "{}", join((0..cols).map(|j| at(i, j)))).unwrap();
    }
    out
}

fn parse_grid(text: &str) -> Result<(usize, usize, Vec<usize>)> {
    let rows: Vec<Vec<usize>> = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|l| numbers(l, "grid"))
        .collect::<Result<_>>()?;
    let cols = rows.first().map_or(0, Vec::len);
    if rows.is_empty() || cols == 0 || rows.iter().any(|r| r.len() != cols) {
        return Err(Error::Parse("grid must be a non-empty rectangle".into()));
    }
    Ok((rows.len(), cols, rows.concat()))
}

/// `γ` lines of `κ` component indices.
pub fn write_partition(partition: &PartitionMatrix) -> String {
    grid(partition.gamma(), partition.kappa(), |i, j| {
        partition.component(i, j)
    })
}

/// Reads a partition grid; the memory is the largest index unless given.
pub fn read_partition(text: &str, memory: Option<usize>) -> Result<PartitionMatrix> {
    let (g, k, assign) = parse_grid(text)?;
    let m = memory.unwrap_or_else(|| assign.iter().copied().max().unwrap_or(0));
    PartitionMatrix::new(g, k, m, assign)
}

/// `γ` lines of `κ` circulant powers from a row-major power matrix.
pub fn write_powers(powers: &[usize], gamma: usize, kappa: usize) -> String {
    grid(gamma, kappa, |i, j| powers[i * kappa + j])
}

/// Reads a power grid as `(γ, κ, row-major powers)`.
pub fn read_powers(text: &str) -> Result<(usize, usize, Vec<usize>)> {
    parse_grid(text)
}

/// `scale,k,F_1^k,weight,contribution` rows, each census closed by a total
/// row.
pub fn census_csv(censuses: &[CycleCensus]) -> String {
    let mut out = String::from("scale,k,f1k,weight,contribution\n");
    for census in censuses {
        let scale = census.scale.as_str();
        for (k, f, w, c) in census.rows() {
            writeln!(out, "{scale},{k},{f},{w},{c}").unwrap();
        }
        writeln!(out, "{scale},total,,,{}", census.total).unwrap();
    }
    out
}

/// `parameter,value` rows: the canonical `t*` entries, `f_star`, `proof`.
pub fn optimum_csv(opt: &Optimum) -> String {
    let mut out = String::from("parameter,value\n");
    for (set, v) in opt.t_star.sets().iter().zip(opt.t_star.values()) {
        writeln!(out, "{set},{v}").unwrap();
    }
    writeln!(out, "f_star,{}", opt.f_star).unwrap();
    writeln!(out, "proof,{}", opt.proof.as_str()).unwrap();
    out
}

/// Cells are written `i:j` and joined with `;`, as are powers.
pub fn trace_csv(trace: &[TraceRow]) -> String {
    let mut out = String::from("round,cells,powers,f_sc_before,f_sc_after,accepted\n");
    for t in trace {
        let cells = t
            .cells
            .iter()
            .map(|(i, j)| format!("{i}:{j}"))
            .collect::<Vec<_>>()
            .join(";");
        let powers = t
            .powers
            .iter()
            .map(|p| p.to_string())
            .collect::<Vec<_>>()
            .join(";");
        writeln!(
            out,
            "{},{cells},{powers},{},{},{}",
            t.round, t.f_before, t.f_after, t.accepted
        )
        .unwrap();
    }
    out
}

/// `a,b,kind,k,f1k,total` rows for each species census.
pub fn species_csv(rows: &[(ObjectSpecies, CycleCensus)]) -> String {
    let mut out = String::from("a,b,kind,k,f1k,total\n");
    for (s, c) in rows {
        for (k, f, _, _) in c.rows() {
            writeln!(
                out,
                "{},{},{},{k},{f},{}",
                s.a,
                s.b,
                s.kind.as_str(),
                c.total
            )
            .unwrap();
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_alist_lines() {
        let text = to_alist(&SparseBinaryMatrix::identity(2));
        assert_eq!(text, "2 2\n1 1\n1 1\n1 1\n1\n2\n1\n2\n");
        assert_eq!(from_alist(&text).unwrap(), SparseBinaryMatrix::identity(2));
    }

    #[test]
    fn alist_pads_and_round_trips() {
        let m = SparseBinaryMatrix::from_dense(&[vec![1, 1, 0], vec![0, 1, 1]]).unwrap();
        let text = to_alist(&m);
        assert_eq!(text, "3 2\n2 2\n1 2 1\n2 2\n1 0\n1 2\n2 0\n1 2\n2 3\n");
        assert_eq!(from_alist(&text).unwrap(), m);
    }

    #[test]
    fn alist_rejects_inconsistency() {
        assert!(from_alist("2 2\n1 1\n1 1\n1 1\n1\n2\n2\n1\n").is_err());
        assert!(from_alist("2 2\n1 1\n1 1\n").is_err());
        assert!(from_alist("x 2\n").is_err());
    }

    #[test]
    fn census_rows() {
        use crate::census::Scale;
        let c = CycleCensus::from_per_k(Scale::Protograph, vec![3, 2], 4, 1);
        assert_eq!(
            census_csv(&[c]),
            "scale,k,f1k,weight,contribution\nprotograph,1,3,4,12\nprotograph,2,2,3,6\nprotograph,total,,,18\n"
        );
    }

    #[test]
    fn grids_round_trip() {
        let p = PartitionMatrix::new(2, 3, 2, vec![0, 1, 2, 2, 1, 0]).unwrap();
        let text = write_partition(&p);
        assert_eq!(text, "0 1 2\n2 1 0\n");
        assert_eq!(read_partition(&text, None).unwrap(), p);
        assert_eq!(read_powers("0 0\n0 1\n").unwrap(), (2, 2, vec![0, 0, 0, 1]));
        assert!(read_powers("0 0\n1\n").is_err());
    }
}
