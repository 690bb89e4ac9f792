//! Banded LU factorization with partial pivoting.
//!
//! Storage follows the classic band layout: a matrix with `kl` subdiagonals
//! and `ku` superdiagonals is kept column-major in `2*kl + ku + 1` band rows,
//! entry `(i, j)` living at band row `kl + ku + i - j`. The extra `kl` rows
//! absorb the fill-in produced by row pivoting (the factored upper triangle
//! has bandwidth up to `kl + ku`).

use crate::error::{Error, Result};

/// Column-major banded matrix with fixed bandwidths.
#[derive(Clone, Debug)]
pub struct BandMatrix {
    n: usize,
    kl: usize,
    ku: usize,
    /// `n * (2*kl + ku + 1)` entries, column-major.
    data: Vec<f64>,
}

impl BandMatrix {
    pub fn new(n: usize, kl: usize, ku: usize) -> Self {
        assert!(n > 0 && kl < n && ku < n, "degenerate band shape");
        Self { n, kl, ku, data: vec![0.0; n * (2 * kl + ku + 1)] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    fn ldab(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    /// Flat index of entry `(i, j)`; valid for `j - (kl + ku) <= i <= j + kl`.
    fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(i + self.kl + self.ku >= j && i <= j + self.kl, "({i},{j}) out of band");
        j * self.ldab() + self.kl + self.ku + i - j
    }

    /// Adds `v` to entry `(i, j)`; must lie within the declared band.
    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        debug_assert!(j <= i + self.ku, "({i},{j}) above declared band");
        let ix = self.idx(i, j);
        self.data[ix] += v;
    }

    /// Entry `(i, j)`, zero outside the declared band.
    pub fn get(&self, i: usize, j: usize) -> f64 {
        if j > i + self.ku || i > j + self.kl {
            0.0
        } else {
            self.data[self.idx(i, j)]
        }
    }

    /// `y = A x` using the declared band only.
    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.n);
        let mut y = vec![0.0; self.n];
        for (j, &xj) in x.iter().enumerate() {
            let lo = j.saturating_sub(self.ku);
            let hi = (j + self.kl).min(self.n - 1);
            // Entries of one column sit contiguously in the band storage.
            let base = self.idx(lo, j);
            let col = &self.data[base..=base + (hi - lo)];
            for (yi, &a) in y[lo..=hi].iter_mut().zip(col) {
                *yi += a * xj;
            }
        }
        y
    }

    /// LU factorization with partial pivoting (consumes the matrix; the
    /// factors overwrite the band storage).
    pub fn factor(mut self) -> Result<BandLu> {
        let n = self.n;
        let kl = self.kl;
        let kuf = self.kl + self.ku; // filled upper bandwidth
        let mut pivots = Vec::with_capacity(n);
        for j in 0..n {
            // Pivot search over the kl+1 candidate rows of column j.
            let imax = (j..=(j + kl).min(n - 1))
                .max_by(|&a, &b| {
                    let va = self.data[self.idx(a, j)].abs();
                    let vb = self.data[self.idx(b, j)].abs();
                    va.partial_cmp(&vb).expect("non-NaN pivot candidates")
                })
                .expect("non-empty pivot range");
            pivots.push(imax);
            let piv = self.data[self.idx(imax, j)];
            if piv == 0.0 || !piv.is_finite() {
                return Err(Error::SingularDiscreteSystem { column: j });
            }
            if imax != j {
                for c in j..=(j + kuf).min(n - 1) {
                    let (a, b) = (self.idx(j, c), self.idx(imax, c));
                    self.data.swap(a, b);
                }
            }
            let ajj = self.data[self.idx(j, j)];
            for i in (j + 1)..=(j + kl).min(n - 1) {
                let l = self.data[self.idx(i, j)] / ajj;
                let li = self.idx(i, j);
                self.data[li] = l;
                for c in (j + 1)..=(j + kuf).min(n - 1) {
                    let pivot_row = self.data[self.idx(j, c)];
                    let ic = self.idx(i, c);
                    self.data[ic] -= l * pivot_row;
                }
            }
        }
        Ok(BandLu { n, kl, ku: self.ku, data: self.data, pivots })
    }
}

/// Factored form produced by [`BandMatrix::factor`].
#[derive(Clone, Debug)]
pub struct BandLu {
    n: usize,
    kl: usize,
    ku: usize,
    data: Vec<f64>,
    pivots: Vec<usize>,
}

impl BandLu {
    fn ldab(&self) -> usize {
        2 * self.kl + self.ku + 1
    }

    fn idx(&self, i: usize, j: usize) -> usize {
        j * self.ldab() + self.kl + self.ku + i - j
    }

    /// Solves `A x = b` in place.
    pub fn solve_into(&self, b: &mut [f64]) {
        assert_eq!(b.len(), self.n);
        let n = self.n;
        let kuf = self.kl + self.ku;
        // Forward: apply permutation and L^{-1}.
        for j in 0..n {
            let p = self.pivots[j];
            if p != j {
                b.swap(j, p);
            }
            for i in (j + 1)..=(j + self.kl).min(n - 1) {
                b[i] -= self.data[self.idx(i, j)] * b[j];
            }
        }
        // Backward: U x = y with filled bandwidth kuf.
        for j in (0..n).rev() {
            b[j] /= self.data[self.idx(j, j)];
            let lo = j.saturating_sub(kuf);
            for i in lo..j {
                b[i] -= self.data[self.idx(i, j)] * b[j];
            }
        }
    }

    /// Solves `A x = b`, returning a fresh vector.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        let mut x = b.to_vec();
        self.solve_into(&mut x);
        x
    }
}
