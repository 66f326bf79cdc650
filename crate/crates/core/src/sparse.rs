use num_traits::Zero;
use rayon::prelude::*;
use std::ops::{AddAssign, Mul};

/// Coordinate-format accumulator; duplicates are summed on conversion.
#[derive(Clone, Debug, Default)]
pub struct Triplets {
    pub nrows: usize,
    pub ncols: usize,
    entries: Vec<(usize, usize, f64)>,
}

impl Triplets {
    pub fn new(nrows: usize, ncols: usize) -> Self {
        Self {
            nrows,
            ncols,
            entries: Vec::new(),
        }
    }

    pub fn push(&mut self, r: usize, c: usize, v: f64) {
        debug_assert!(
            r < self.nrows && c < self.ncols,
            "({r},{c}) out of {}x{}",
            self.nrows,
            self.ncols
        );
        if v != 0.0 {
            self.entries.push((r, c, v));
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn to_csr(mut self) -> Csr {
        self.entries.sort_unstable_by_key(|&(r, c, _)| (r, c));
        let mut indptr = vec![0usize; self.nrows + 1];
        let mut indices = Vec::with_capacity(self.entries.len());
        let mut values: Vec<f64> = Vec::with_capacity(self.entries.len());
        let mut last: Option<(usize, usize)> = None;
        for &(r, c, v) in &self.entries {
            if last == Some((r, c)) {
                *values.last_mut().unwrap() += v;
            } else {
                indices.push(c);
                values.push(v);
                indptr[r + 1] += 1;
                last = Some((r, c));
            }
        }
        for i in 0..self.nrows {
            indptr[i + 1] += indptr[i];
        }
        Csr {
            nrows: self.nrows,
            ncols: self.ncols,
            indptr,
            indices,
            values,
        }
    }
}

/// Real compressed-row matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct Csr {
    pub nrows: usize,
    pub ncols: usize,
    pub indptr: Vec<usize>,
    pub indices: Vec<usize>,
    pub values: Vec<f64>,
}

impl Csr {
    pub fn zeros(nrows: usize, ncols: usize) -> Self {
        Triplets::new(nrows, ncols).to_csr()
    }

    pub fn identity(n: usize) -> Self {
        let mut t = Triplets::new(n, n);
        for i in 0..n {
            t.push(i, i, 1.0);
        }
        t.to_csr()
    }

    pub fn from_dense(rows: &[Vec<f64>]) -> Self {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, |r| r.len());
        let mut t = Triplets::new(nrows, ncols);
        for (i, r) in rows.iter().enumerate() {
            for (j, &v) in r.iter().enumerate() {
                t.push(i, j, v);
            }
        }
        t.to_csr()
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        self.indices[a..b]
            .iter()
            .copied()
            .zip(self.values[a..b].iter().copied())
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.row(i).filter(|&(c, _)| c == j).map(|(_, v)| v).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<f64>> {
        let mut d = vec![vec![0.0; self.ncols]; self.nrows];
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                d[i][j] += v;
            }
        }
        d
    }

    pub fn transpose(&self) -> Csr {
        let mut t = Triplets::new(self.ncols, self.nrows);
        for i in 0..self.nrows {
            for (j, v) in self.row(i) {
                t.push(j, i, v);
            }
        }
        t.to_csr()
    }

    pub fn matmul(&self, other: &Csr) -> Csr {
        assert_eq!(self.ncols, other.nrows, "matmul dimension mismatch");
        let mut t = Triplets::new(self.nrows, other.ncols);
        for i in 0..self.nrows {
            for (k, a) in self.row(i) {
                for (j, b) in other.row(k) {
                    t.push(i, j, a * b);
                }
            }
        }
        t.to_csr()
    }

    pub fn scale_rows(&self, s: &[f64]) -> Csr {
        let mut out = self.clone();
        for i in 0..self.nrows {
            for v in &mut out.values[self.indptr[i]..self.indptr[i + 1]] {
                *v *= s[i];
            }
        }
        out
    }

    pub fn scale_cols(&self, s: &[f64]) -> Csr {
        let mut out = self.clone();
        for (v, &j) in out.values.iter_mut().zip(&self.indices) {
            *v *= s[j];
        }
        out
    }

    /// y = A x
    pub fn apply<T>(&self, x: &[T], y: &mut [T])
    where
        T: Copy + Zero + AddAssign + Mul<f64, Output = T> + Send + Sync,
    {
        assert_eq!(x.len(), self.ncols);
        assert_eq!(y.len(), self.nrows);
        let row = |(i, yi): (usize, &mut T)| {
            let mut acc = T::zero();
            for k in self.indptr[i]..self.indptr[i + 1] {
                acc += x[self.indices[k]] * self.values[k];
            }
            *yi = acc;
        };
        if self.nnz() > 200_000 {
            y.par_iter_mut()
                .with_min_len(4096)
                .enumerate()
                .for_each(row);
        } else {
            y.iter_mut().enumerate().for_each(row);
        }
    }

    pub fn mul_vec<T>(&self, x: &[T]) -> Vec<T>
    where
        T: Copy + Zero + AddAssign + Mul<f64, Output = T> + Send + Sync,
    {
        let mut y = vec![T::zero(); self.nrows];
        self.apply(x, &mut y);
        y
    }
}
