use std::collections::BTreeMap;
use std::fmt::{self, Debug, Display};
use std::str::FromStr;

use num_integer::Integer;
use num_traits::Signed;

use crate::error::{Error, Result};

/// Exact integer scalar: arbitrary precision in the crate aliases, fixed
/// width integers are accepted where overflow is known not to occur.
pub trait IntScalar:
    Integer + Signed + Clone + Debug + Display + FromStr + From<i32> + Send + Sync + 'static
{
}

impl<T> IntScalar for T where
    T: Integer + Signed + Clone + Debug + Display + FromStr + From<i32> + Send + Sync + 'static
{
}

/// Sparse matrix with only non-zero entries stored.
#[derive(Clone, PartialEq, Eq)]
pub struct SparseMatrix<T> {
    rows: usize,
    cols: usize,
    entries: BTreeMap<(usize, usize), T>,
}

impl<T: IntScalar> SparseMatrix<T> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatrix { rows, cols, entries: BTreeMap::new() }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, T::one());
        }
        m
    }

    pub fn from_dense(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone());
            }
        }
        m
    }

    pub fn from_i64_rows(rows: &[Vec<i64>]) -> Self
    where
        T: From<i64>,
    {
        let dense: Vec<Vec<T>> =
            rows.iter().map(|r| r.iter().map(|&v| T::from(v)).collect()).collect();
        Self::from_dense(&dense)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, r: usize, c: usize) -> T {
        self.entries.get(&(r, c)).cloned().unwrap_or_else(T::zero)
    }

    /// Store `v` at `(r, c)`; zero removes the entry.
    pub fn set(&mut self, r: usize, c: usize, v: T) {
        assert!(r < self.rows && c < self.cols, "index ({r}, {c}) out of bounds");
        if v.is_zero() {
            self.entries.remove(&(r, c));
        } else {
            self.entries.insert((r, c), v);
        }
    }

    pub fn add_to(&mut self, r: usize, c: usize, v: T) {
        let cur = self.get(r, c);
        self.set(r, c, cur + v);
    }

    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.entries.iter().map(|(&(r, c), v)| (r, c, v))
    }

    pub fn to_dense(&self) -> Vec<Vec<T>> {
        let mut d = vec![vec![T::zero(); self.cols]; self.rows];
        for (r, c, v) in self.entries() {
            d[r][c] = v.clone();
        }
        d
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (r, c, v) in self.entries() {
            t.set(c, r, v.clone());
        }
        t
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut by_row: BTreeMap<usize, Vec<(usize, &T)>> = BTreeMap::new();
        for (r, c, v) in other.entries() {
            by_row.entry(r).or_default().push((c, v));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for (r, k, a) in self.entries() {
            if let Some(row) = by_row.get(&k) {
                for &(c, b) in row {
                    out.add_to(r, c, a.clone() * b.clone());
                }
            }
        }
        Ok(out)
    }

    pub fn apply(&self, x: &[T]) -> Result<Vec<T>> {
        if x.len() != self.cols {
            return Err(Error::Dimension(format!("vector of length {} for {} columns", x.len(), self.cols)));
        }
        let mut y = vec![T::zero(); self.rows];
        for (r, c, v) in self.entries() {
            y[r] = y[r].clone() + v.clone() * x[c].clone();
        }
        Ok(y)
    }

    /// Keep the listed rows and columns, in the given order.
    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        let ri: BTreeMap<usize, usize> = rows.iter().enumerate().map(|(i, &r)| (r, i)).collect();
        let ci: BTreeMap<usize, usize> = cols.iter().enumerate().map(|(i, &c)| (c, i)).collect();
        let mut out = Self::zeros(rows.len(), cols.len());
        for (r, c, v) in self.entries() {
            if let (Some(&i), Some(&j)) = (ri.get(&r), ci.get(&c)) {
                out.set(i, j, v.clone());
            }
        }
        out
    }

    /// Coordinate triplet text: a `rows cols nnz` header, then one
    /// `r c v` line per entry, 0-based.
    pub fn to_triplets(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.nnz());
        for (r, c, v) in self.entries() {
            s.push_str(&format!("{r} {c} {v}\n"));
        }
        s
    }

    pub fn from_triplets(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let syntax = |line: usize, message: &str| Error::Syntax {
            line,
            column: 1,
            message: message.to_string(),
        };
        let (hl, header) = lines.next().ok_or_else(|| syntax(1, "missing header"))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| syntax(hl, "header must be `rows cols nnz`")))
            .collect::<Result<_>>()?;
        let [rows, cols, nnz] = nums[..] else {
            return Err(syntax(hl, "header must be `rows cols nnz`"));
        };
        let mut m = Self::zeros(rows, cols);
        let mut count = 0;
        for (ln, l) in lines {
            let toks: Vec<&str> = l.split_whitespace().collect();
            let [r, c, v] = toks[..] else {
                return Err(syntax(ln, "entry must be `r c v`"));
            };
            let r: usize = r.parse().map_err(|_| syntax(ln, "bad row index"))?;
            let c: usize = c.parse().map_err(|_| syntax(ln, "bad column index"))?;
            let v: T = v.parse().map_err(|_| syntax(ln, "bad value"))?;
            if r >= rows || c >= cols {
                return Err(syntax(ln, "index out of bounds"));
            }
            m.add_to(r, c, v);
            count += 1;
        }
        if count != nnz {
            return Err(syntax(hl, &format!("header announces {nnz} entries, found {count}")));
        }
        Ok(m)
    }
}

impl<T: IntScalar> Debug for SparseMatrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SparseMatrix {}x{} ", self.rows, self.cols)?;
        f.debug_list().entries(self.to_dense()).finish()
    }
}
