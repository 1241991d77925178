use std::fmt;

use super::{ExactError, Rat, RatFn};

/// Dense matrix of rational functions, row-major.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<RatFn>,
}

impl RatMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<RatFn>) -> Result<Self, ExactError> {
        if rows == 0 || cols == 0 || entries.len() != rows * cols {
            return Err(ExactError::Shape { rows, cols, len: entries.len() });
        }
        Ok(RatMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: Vec<Vec<RatFn>>) -> Result<Self, ExactError> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(ExactError::Shape { rows: r, cols: c, len: rows.iter().map(Vec::len).sum() });
        }
        RatMatrix::new(r, c, rows.into_iter().flatten().collect())
    }

    pub fn identity(n: usize) -> Self {
        let mut e = vec![RatFn::zero(); n * n];
        for i in 0..n {
            e[i * n + i] = RatFn::one();
        }
        RatMatrix { rows: n, cols: n, entries: e }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &RatFn {
        &self.entries[i * self.cols + j]
    }

    pub fn column(&self, j: usize) -> Vec<RatFn> {
        (0..self.rows).map(|i| self.get(i, j).clone()).collect()
    }

    pub fn mul(&self, rhs: &RatMatrix) -> Result<RatMatrix, ExactError> {
        if self.cols != rhs.rows {
            return Err(ExactError::Shape { rows: rhs.rows, cols: rhs.cols, len: self.cols });
        }
        let mut e = Vec::with_capacity(self.rows * rhs.cols);
        for i in 0..self.rows {
            for j in 0..rhs.cols {
                e.push((0..self.cols).map(|k| self.get(i, k) * rhs.get(k, j)).sum());
            }
        }
        Ok(RatMatrix { rows: self.rows, cols: rhs.cols, entries: e })
    }

    pub fn mul_vec(&self, v: &[RatFn]) -> Result<Vec<RatFn>, ExactError> {
        if v.len() != self.cols {
            return Err(ExactError::Shape { rows: self.rows, cols: self.cols, len: v.len() });
        }
        Ok((0..self.rows).map(|i| (0..self.cols).map(|k| self.get(i, k) * &v[k]).sum()).collect())
    }

    pub fn transpose(&self) -> RatMatrix {
        let mut e = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                e.push(self.get(i, j).clone());
            }
        }
        RatMatrix { rows: self.cols, cols: self.rows, entries: e }
    }

    /// Solves `self * X = B` for all right-hand columns by Gauss-Jordan elimination.
    fn eliminate(&self, rhs: &RatMatrix) -> Result<RatMatrix, ExactError> {
        if self.rows != self.cols || rhs.rows != self.rows {
            return Err(ExactError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let w = n + rhs.cols;
        let mut a: Vec<Vec<RatFn>> = (0..n)
            .map(|i| {
                let mut row: Vec<RatFn> = (0..n).map(|j| self.get(i, j).clone()).collect();
                row.extend((0..rhs.cols).map(|j| rhs.get(i, j).clone()));
                row
            })
            .collect();
        for col in 0..n {
            let pivot = (col..n).find(|&r| !a[r][col].is_zero()).ok_or(ExactError::Singular { column: col })?;
            a.swap(col, pivot);
            let inv = a[col][col].inv()?;
            for x in a[col].iter_mut() {
                *x = &*x * &inv;
            }
            for r in 0..n {
                if r == col || a[r][col].is_zero() {
                    continue;
                }
                let f = a[r][col].clone();
                for c in col..w {
                    let delta = &f * &a[col][c];
                    a[r][c] = &a[r][c] - &delta;
                }
            }
        }
        let entries = a.into_iter().flat_map(|row| row.into_iter().skip(n)).collect();
        RatMatrix::new(n, rhs.cols, entries)
    }

    pub fn inverse(&self) -> Result<RatMatrix, ExactError> {
        self.eliminate(&RatMatrix::identity(self.rows))
    }

    pub fn solve(&self, b: &[RatFn]) -> Result<Vec<RatFn>, ExactError> {
        let rhs = RatMatrix::new(b.len(), 1, b.to_vec())?;
        Ok(self.eliminate(&rhs)?.entries)
    }

    pub fn eval(&self, m0: &Rat) -> Result<Vec<Vec<Rat>>, ExactError> {
        (0..self.rows).map(|i| (0..self.cols).map(|j| self.get(i, j).eval(m0)).collect()).collect()
    }

    pub fn map(&self, f: impl Fn(&RatFn) -> RatFn) -> RatMatrix {
        RatMatrix { rows: self.rows, cols: self.cols, entries: self.entries.iter().map(f).collect() }
    }

    pub fn is_identity(&self) -> bool {
        *self == RatMatrix::identity(self.rows)
    }
}

impl fmt::Display for RatMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let cells: Vec<String> = self.entries.iter().map(RatFn::to_factored).collect();
        let width = cells.iter().map(String::len).max().unwrap_or(1);
        for i in 0..self.rows {
            f.write_str("[")?;
            for j in 0..self.cols {
                if j > 0 {
                    f.write_str("  ")?;
                }
                write!(f, "{:>width$}", cells[i * self.cols + j])?;
            }
            writeln!(f, "]")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m() -> RatFn {
        RatFn::m()
    }

    #[test]
    fn identity_solve_returns_rhs() {
        let b = vec![m(), RatFn::int(3), RatFn::one() / m()];
        assert_eq!(RatMatrix::identity(3).solve(&b).unwrap(), b);
    }

    #[test]
    fn triangular_helmholtz_system() {
        let a = RatMatrix::from_rows(vec![
            vec![-(RatFn::ratio(3, 2) + RatFn::one() / m()), RatFn::zero()],
            vec![RatFn::one() / m(), RatFn::ratio(1, 2)],
        ])
        .unwrap();
        let b = vec![m() * 2 - RatFn::one() / m() + RatFn::ratio(1, 2), RatFn::one() / m() - RatFn::ratio(3, 2)];
        let x = a.solve(&b).unwrap();
        let den = m() * 3 + RatFn::int(2);
        assert_eq!(x[0], -(m() * m() * 4 + m() - RatFn::int(2)) / &den);
        assert_eq!(x[1], -(m() - RatFn::int(2)) / &den);
    }

    #[test]
    fn singular_reports_pivot() {
        let a = RatMatrix::from_rows(vec![vec![m(), m()], vec![RatFn::one(), RatFn::one()]]).unwrap();
        assert_eq!(a.inverse(), Err(ExactError::Singular { column: 1 }));
    }

    #[test]
    fn inverse_product_is_identity() {
        let a = RatMatrix::from_rows(vec![vec![m(), RatFn::one()], vec![RatFn::int(2), m() + RatFn::one()]]).unwrap();
        let inv = a.inverse().unwrap();
        assert!(a.mul(&inv).unwrap().is_identity());
        assert!(inv.mul(&a).unwrap().is_identity());
    }
}
