//! Dense complex matrices and the least-squares solver used by the
//! estimators.
//!
//! The matrix sizes in this problem family are small (hundreds of rows and
//! columns at most), so a straightforward row-major store with a
//! column-pivoted Householder QR covers every solve in the crate.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use num_complex::Complex;
#[allow(unused_imports)] // inherent std float methods shadow this in test builds
use num_traits::Float;

/// Double-precision complex scalar used throughout the crate.
pub type C64 = Complex<f64>;

/// Relative diagonal threshold below which QR declares rank deficiency.
const RANK_TOL: f64 = 1e-10;

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        CMat {
            rows,
            cols,
            data: vec![C64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        CMat { rows, cols, data }
    }

    /// Builds a matrix from row slices; all rows must have equal length.
    pub fn from_rows(rows: &[&[C64]]) -> Self {
        let nrows = rows.len();
        let ncols = if nrows == 0 { 0 } else { rows[0].len() };
        let mut data = Vec::with_capacity(nrows * ncols);
        for r in rows {
            assert_eq!(r.len(), ncols, "ragged rows");
            data.extend_from_slice(r);
        }
        CMat {
            rows: nrows,
            cols: ncols,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn row(&self, r: usize) -> &[C64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn col(&self, c: usize) -> Vec<C64> {
        (0..self.rows).map(|r| self[(r, c)]).collect()
    }

    pub fn set_col(&mut self, c: usize, v: &[C64]) {
        assert_eq!(v.len(), self.rows, "column length");
        for r in 0..self.rows {
            self[(r, c)] = v[r];
        }
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn transpose(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn conj(&self) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z.conj()).collect(),
        }
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> CMat {
        CMat::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn mul(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.cols, rhs.rows, "matmul shapes");
        let mut out = CMat::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                if a.norm_sqr() == 0.0 {
                    continue;
                }
                let rhs_row = rhs.row(k);
                let out_row = &mut out.data[r * rhs.cols..(r + 1) * rhs.cols];
                for (o, b) in out_row.iter_mut().zip(rhs_row) {
                    *o += a * b;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[C64]) -> Vec<C64> {
        assert_eq!(self.cols, v.len(), "matvec shapes");
        (0..self.rows)
            .map(|r| {
                self.row(r)
                    .iter()
                    .zip(v)
                    .map(|(a, x)| a * x)
                    .sum::<C64>()
            })
            .collect()
    }

    pub fn scale(&self, s: C64) -> CMat {
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|z| z * s).collect(),
        }
    }

    pub fn add(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "add shapes");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, rhs: &CMat) -> CMat {
        assert_eq!(self.shape(), rhs.shape(), "sub shapes");
        CMat {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&rhs.data)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    pub fn fro_norm_sqr(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn fro_norm(&self) -> f64 {
        self.fro_norm_sqr().sqrt()
    }

    /// Largest entry magnitude.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Right-multiplies by `diag(d)`, scaling column `j` by `d[j]`.
    pub fn mul_diag(&self, d: &[C64]) -> CMat {
        assert_eq!(self.cols, d.len(), "diag length");
        CMat::from_fn(self.rows, self.cols, |r, c| self[(r, c)] * d[c])
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = C64;

    fn index(&self, (r, c): (usize, usize)) -> &C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * self.cols + c]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut C64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * self.cols + c]
    }
}

/// `sum conj(a_i) * b_i`.
pub fn dot_conj(a: &[C64], b: &[C64]) -> C64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn vec_norm_sqr(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum()
}

pub fn vec_norm(v: &[C64]) -> f64 {
    vec_norm_sqr(v).sqrt()
}

pub fn vec_sub(a: &[C64], b: &[C64]) -> Vec<C64> {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Deviation of `U` from unitarity, `max |U^H U - I|`.
pub fn unitarity_deviation(u: &CMat) -> f64 {
    let gram = u.adjoint().mul(u);
    gram.sub(&CMat::identity(u.cols())).max_abs()
}

/// Minimum-norm least-squares failure: the stacked system lost column rank.
#[derive(Debug, Clone, PartialEq)]
pub struct RankDeficient {
    pub rank: usize,
    pub cols: usize,
}

/// Solves `min_x ||a x - b||` for full-column-rank `a` via column-pivoted
/// Householder QR.
///
/// Rank is judged against [`RANK_TOL`] relative to the largest pivot; a
/// deficient system is reported as an error rather than resolved by a
/// pseudo-inverse, since every caller in this crate treats deficiency as an
/// identifiability failure.
pub fn lstsq(a: &CMat, b: &[C64]) -> Result<Vec<C64>, RankDeficient> {
    let (m, n) = a.shape();
    assert_eq!(b.len(), m, "rhs length");
    if m < n {
        return Err(RankDeficient { rank: m, cols: n });
    }

    let mut r = a.clone();
    let mut rhs = b.to_vec();
    let mut perm: Vec<usize> = (0..n).collect();
    // Remaining squared column norms, updated as rows are eliminated.
    let mut col_norms: Vec<f64> = (0..n).map(|c| vec_norm_sqr(&r.col(c))).collect();

    let mut first_pivot = 0.0_f64;
    for k in 0..n {
        // Pivot: bring the largest remaining column to position k.
        let pivot = col_norms[k..]
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(core::cmp::Ordering::Equal))
            .map(|(i, _)| k + i)
            .unwrap();
        if pivot != k {
            for row in 0..m {
                let tmp = r[(row, k)];
                r[(row, k)] = r[(row, pivot)];
                r[(row, pivot)] = tmp;
            }
            col_norms.swap(k, pivot);
            perm.swap(k, pivot);
        }

        // The running norms accumulate cancellation error; the rank check and
        // the reflector both use the exact tail norm.
        let norm = norm_tail(&r, k, k).sqrt();
        if k == 0 {
            first_pivot = norm;
        }
        if norm <= RANK_TOL * first_pivot || norm == 0.0 {
            return Err(RankDeficient { rank: k, cols: n });
        }

        // Householder reflector annihilating column k below the diagonal.
        let x0 = r[(k, k)];
        let phase = if x0.norm() > 0.0 {
            x0 / x0.norm()
        } else {
            C64::new(1.0, 0.0)
        };
        let alpha = -phase * norm;
        let mut v: Vec<C64> = (k..m).map(|row| r[(row, k)]).collect();
        v[0] -= alpha;
        let beta = vec_norm_sqr(&v);
        if beta > 0.0 {
            // Apply H = I - 2 v v^H / beta to the trailing block and rhs.
            for c in k..n {
                let s: C64 = (k..m).map(|row| v[row - k].conj() * r[(row, c)]).sum();
                let s = s * (2.0 / beta);
                for row in k..m {
                    let delta = v[row - k] * s;
                    r[(row, c)] -= delta;
                }
            }
            let s: C64 = (k..m).map(|row| v[row - k].conj() * rhs[row]).sum();
            let s = s * (2.0 / beta);
            for row in k..m {
                rhs[row] -= v[row - k] * s;
            }
        }
        r[(k, k)] = alpha;
        for row in (k + 1)..m {
            r[(row, k)] = C64::new(0.0, 0.0);
        }

        // Downdate remaining column norms.
        for c in (k + 1)..n {
            col_norms[c] = (col_norms[c] - r[(k, c)].norm_sqr()).max(0.0);
        }
    }

    // Back substitution on the permuted system.
    let mut y = vec![C64::new(0.0, 0.0); n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for c in (k + 1)..n {
            s -= r[(k, c)] * y[c];
        }
        y[k] = s / r[(k, k)];
    }
    let mut x = vec![C64::new(0.0, 0.0); n];
    for k in 0..n {
        x[perm[k]] = y[k];
    }
    Ok(x)
}

/// Exact squared norm of column `c` from row `k` down.
fn norm_tail(r: &CMat, k: usize, c: usize) -> f64 {
    (k..r.rows()).map(|row| r[(row, c)].norm_sqr()).sum()
}
