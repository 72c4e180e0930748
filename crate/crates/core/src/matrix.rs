//! Managed incidence matrices: nonnegative integer matrices whose columns
//! all sum to the ladder ratio `|F_{n+1}|/|F_n|`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ManagedMatrix {
    rows: usize,
    cols: usize,
    ratio: u64,
    entries: Vec<u64>,
}

/// Row-major on-disk form.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub ratio: u64,
    pub entries: Vec<u64>,
}

impl ManagedMatrix {
    pub fn new(rows: usize, cols: usize, ratio: u64, entries: Vec<u64>) -> Result<Self> {
        if rows < 2 || cols < 2 {
            return Err(Error::NotManaged(format!(
                "needs at least 2 rows and 2 columns, got {rows}x{cols}"
            )));
        }
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        let m = ManagedMatrix {
            rows,
            cols,
            ratio,
            entries,
        };
        for j in 0..cols {
            let sum: u64 = m.column(j).iter().sum();
            if sum != ratio {
                return Err(Error::NotManaged(format!(
                    "column {} sums to {sum}, expected {ratio}",
                    j + 1
                )));
            }
        }
        Ok(m)
    }

    /// Builds from rows, taking the ratio from the first column.
    pub fn from_rows(rows: &[Vec<u64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let ratio = rows.iter().map(|row| row.first().copied().unwrap_or(0)).sum();
        ManagedMatrix::new(r, c, ratio, rows.concat())
    }

    /// `ratio·I_k`.
    pub fn scalar(k: usize, ratio: u64) -> Result<Self> {
        let mut e = vec![0; k * k];
        for i in 0..k {
            e[i * k + i] = ratio;
        }
        ManagedMatrix::new(k, k, ratio, e)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn ratio(&self) -> u64 {
        self.ratio
    }

    /// Zero-based entry.
    pub fn get(&self, i: usize, j: usize) -> u64 {
        self.entries[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<u64> {
        (0..self.rows).map(|i| self.get(i, j)).collect()
    }

    pub fn entries(&self) -> &[u64] {
        &self.entries
    }

    pub fn min_entry(&self) -> u64 {
        self.entries.iter().copied().min().unwrap_or(0)
    }

    pub fn is_strictly_positive(&self) -> bool {
        self.min_entry() > 0
    }

    pub fn mul(&self, rhs: &ManagedMatrix) -> Result<ManagedMatrix> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let overflow = || Error::Domain("matrix product overflows u64".into());
        let mut e = vec![0u64; self.rows * rhs.cols];
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                let mut acc = 0u64;
                for t in 0..self.cols {
                    let p = self.get(i, t).checked_mul(rhs.get(t, j)).ok_or_else(overflow)?;
                    acc = acc.checked_add(p).ok_or_else(overflow)?;
                }
                e[i * rhs.cols + j] = acc;
            }
        }
        let ratio = self.ratio.checked_mul(rhs.ratio).ok_or_else(overflow)?;
        ManagedMatrix::new(self.rows, rhs.cols, ratio, e)
    }

    pub fn to_file(&self) -> MatrixFile {
        MatrixFile {
            rows: self.rows,
            cols: self.cols,
            ratio: self.ratio,
            entries: self.entries.clone(),
        }
    }

    pub fn from_file(f: &MatrixFile) -> Result<Self> {
        ManagedMatrix::new(f.rows, f.cols, f.ratio, f.entries.clone())
    }
}

impl fmt::Display for ManagedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

/// `M_0, M_1, …` with `M_n` of size `k_n × k_{n+1}` and scales `p_{n+1} = p_n·ratio_n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ManagedSequence {
    base_size: BigInt,
    matrices: Vec<ManagedMatrix>,
}

impl ManagedSequence {
    pub fn new(base_size: BigInt, matrices: Vec<ManagedMatrix>) -> Result<Self> {
        if base_size < BigInt::one() {
            return Err(Error::Scale("base size must be positive".into()));
        }
        for (n, w) in matrices.windows(2).enumerate() {
            if w[0].cols != w[1].rows {
                return Err(Error::Dimension(format!(
                    "M_{n} has {} columns but M_{} has {} rows",
                    w[0].cols,
                    n + 1,
                    w[1].rows
                )));
            }
        }
        Ok(ManagedSequence { base_size, matrices })
    }

    pub fn len(&self) -> usize {
        self.matrices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.matrices.is_empty()
    }

    pub fn matrices(&self) -> &[ManagedMatrix] {
        &self.matrices
    }

    pub fn matrix(&self, n: usize) -> Result<&ManagedMatrix> {
        self.matrices.get(n).ok_or(Error::LevelOutOfRange {
            level: n,
            depth: self.matrices.len(),
        })
    }

    pub fn base_size(&self) -> &BigInt {
        &self.base_size
    }

    /// `p_n = |F_n|`.
    pub fn scale(&self, n: usize) -> Result<BigInt> {
        if n > self.matrices.len() {
            return Err(Error::LevelOutOfRange {
                level: n,
                depth: self.matrices.len(),
            });
        }
        Ok(self.matrices[..n]
            .iter()
            .fold(self.base_size.clone(), |p, m| p * m.ratio))
    }

    /// `k_n`: rows of `M_n`, or columns of the last matrix at the top.
    pub fn dim(&self, n: usize) -> Result<usize> {
        match (self.matrices.get(n), n.checked_sub(1).and_then(|p| self.matrices.get(p))) {
            (Some(m), _) => Ok(m.rows),
            (None, Some(prev)) if n == self.matrices.len() => Ok(prev.cols),
            _ => Err(Error::LevelOutOfRange {
                level: n,
                depth: self.matrices.len(),
            }),
        }
    }

    /// `M_n ⋯ M_{m−1}`.
    pub fn product(&self, n: usize, m: usize) -> Result<ManagedMatrix> {
        if n >= m || m > self.matrices.len() {
            return Err(Error::LevelOutOfRange {
                level: m,
                depth: self.matrices.len(),
            });
        }
        let mut acc = self.matrices[n].clone();
        for next in &self.matrices[n + 1..m] {
            acc = acc.mul(next)?;
        }
        Ok(acc)
    }

    pub fn to_json(&self) -> String {
        let files: Vec<MatrixFile> = self.matrices.iter().map(|m| m.to_file()).collect();
        serde_json::to_string_pretty(&files).expect("matrices serialize")
    }

    pub fn from_json(s: &str, base_size: BigInt) -> Result<Self> {
        let files: Vec<MatrixFile> = serde_json::from_str(s)?;
        let ms = files.iter().map(ManagedMatrix::from_file).collect::<Result<Vec<_>>>()?;
        ManagedSequence::new(base_size, ms)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn managed_column_sums() {
        let m = ManagedMatrix::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        assert_eq!(m.ratio(), 3);
        assert!(matches!(
            ManagedMatrix::from_rows(&[vec![2, 1], vec![1, 3]]),
            Err(Error::NotManaged(_))
        ));
        assert!(matches!(
            ManagedMatrix::new(1, 2, 3, vec![3, 3]),
            Err(Error::NotManaged(_))
        ));
    }

    #[test]
    fn product_of_two() {
        let m = ManagedMatrix::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        let p = m.mul(&m).unwrap();
        assert_eq!(p, ManagedMatrix::from_rows(&[vec![5, 4], vec![4, 5]]).unwrap());
        assert_eq!(p.ratio(), 9);
    }

    #[test]
    fn sequence_scales_and_json() {
        let m = ManagedMatrix::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        let seq = ManagedSequence::new(BigInt::one(), vec![m.clone(); 3]).unwrap();
        assert_eq!(seq.scale(3).unwrap(), BigInt::from(27));
        assert_eq!(seq.dim(3).unwrap(), 2);
        let back = ManagedSequence::from_json(&seq.to_json(), BigInt::one()).unwrap();
        assert_eq!(back, seq);
        assert!(ManagedSequence::from_json(
            r#"[{"rows":2,"cols":2,"ratio":3,"entries":[2,1,1,3]}]"#,
            BigInt::one()
        )
        .is_err());
    }
}
