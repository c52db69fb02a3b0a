//! Compressed-row operators used inside the Lindblad generator. Every
//! operator in the model has at most a few entries per row, so applying it
//! to a dense density matrix costs O(nnz * n) instead of O(n^3).

use num_complex::Complex;

use crate::hilbert::CMatrix;
use crate::scalar::Scalar;

#[derive(Debug, Clone)]
pub(crate) struct Csr<T> {
    n: usize,
    indptr: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<Complex<T>>,
}

impl<T: Scalar> Csr<T> {
    /// Keeps every entry that is not exactly zero.
    pub fn from_dense(m: &CMatrix<T>) -> Self {
        let n = m.nrows();
        let mut indptr = Vec::with_capacity(n + 1);
        let mut cols = Vec::new();
        let mut vals = Vec::new();
        indptr.push(0);
        for i in 0..n {
            for j in 0..m.ncols() {
                let z = m[[i, j]];
                if z.re != T::zero() || z.im != T::zero() {
                    cols.push(j);
                    vals.push(z);
                }
            }
            indptr.push(cols.len());
        }
        Self { n, indptr, cols, vals }
    }

    #[inline]
    fn row(&self, i: usize) -> (&[usize], &[Complex<T>]) {
        let (a, b) = (self.indptr[i], self.indptr[i + 1]);
        (&self.cols[a..b], &self.vals[a..b])
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// `out = self * b` for row-major `n x n` slices.
    pub fn mul_dense_into(&self, b: &[Complex<T>], out: &mut [Complex<T>]) {
        let n = self.n;
        let zero = Complex::new(T::zero(), T::zero());
        for (i, out_row) in out.chunks_exact_mut(n).enumerate() {
            out_row.fill(zero);
            let (cols, vals) = self.row(i);
            for (&k, &a) in cols.iter().zip(vals) {
                let b_row = &b[k * n..(k + 1) * n];
                for (o, &x) in out_row.iter_mut().zip(b_row) {
                    *o += a * x;
                }
            }
        }
    }

    /// `out += scale * self * b * self^dagger`.
    pub fn sandwich_add(&self, b: &[Complex<T>], scale: T, out: &mut [Complex<T>]) {
        let n = self.n;
        for (i, out_row) in out.chunks_exact_mut(n).enumerate() {
            let (cols_i, vals_i) = self.row(i);
            for (&k, &a) in cols_i.iter().zip(vals_i) {
                let a = a * scale;
                let b_row = &b[k * n..(k + 1) * n];
                for (j, o) in out_row.iter_mut().enumerate() {
                    let (cols_j, vals_j) = self.row(j);
                    for (&l, &c) in cols_j.iter().zip(vals_j) {
                        *o += a * c.conj() * b_row[l];
                    }
                }
            }
        }
    }
}
