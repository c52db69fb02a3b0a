//! The real scalar type the simulator is generic over.
//!
//! Everything numeric in the crate is written against [`Scalar`], which is
//! implemented for `f32` and `f64`. The Hermitian eigensolver is the one
//! piece that needs per-type code, so it lives on the trait.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use nalgebra::{DMatrix, SymmetricEigen};
use ndarray::Array2;
use num_complex::Complex;
use num_traits::{Float, FloatConst, FromPrimitive, NumAssign, ToPrimitive};

use crate::error::{Error, Result};

/// Floating point scalar: `f32` or `f64`.
pub trait Scalar:
    Float
    + FloatConst
    + FromPrimitive
    + ToPrimitive
    + NumAssign
    + Sum
    + Default
    + Debug
    + Display
    + LowerExp
    + Send
    + Sync
    + 'static
{
    /// Eigen-decomposition of a Hermitian matrix (only the lower triangle is
    /// read). Eigenvalues ascending, eigenvectors stored as columns.
    fn eigh(m: &Array2<Complex<Self>>) -> Result<(Vec<Self>, Array2<Complex<Self>>)>;

    /// Eigenvalues of a Hermitian matrix, ascending.
    fn eigvalsh(m: &Array2<Complex<Self>>) -> Result<Vec<Self>>;

    /// Converts an `f64` literal.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn from_usize_lossy(n: usize) -> Self {
        Self::from_usize(n).expect("usize representable in scalar type")
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }

    /// A tolerance that is `wanted` when the type can resolve it, otherwise a
    /// small multiple of the machine epsilon.
    #[inline]
    fn tol(wanted: f64) -> Self {
        Self::lit(wanted).max(Self::epsilon() * Self::lit(1.0e3))
    }
}

fn to_nalgebra<T: Scalar>(m: &Array2<Complex<T>>) -> Result<DMatrix<Complex<T>>> {
    let (r, c) = m.dim();
    if r != c {
        return Err(Error::DimensionMismatch { what: "eigensolver input", expected: r, found: c });
    }
    if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::Eigensolver);
    }
    // Entries far below working precision (e.g. subnormal thermal tails) are
    // flushed; they cannot move any eigenvalue by a representable amount.
    let scale = m.iter().fold(T::zero(), |acc, z| acc.max(z.norm()));
    let floor = scale * T::epsilon() * T::epsilon() * T::epsilon();
    let zero = Complex::new(T::zero(), T::zero());
    Ok(DMatrix::from_fn(r, c, |i, j| {
        let z = m[[i, j]];
        if z.norm() < floor {
            zero
        } else {
            z
        }
    }))
}

fn check_finite<T: Scalar>(vals: &[T]) -> Result<()> {
    if vals.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::Eigensolver)
    }
}

fn sorted_order<T: Scalar>(vals: &[T]) -> Vec<usize> {
    let mut order: Vec<usize> = (0..vals.len()).collect();
    order.sort_by(|&a, &b| vals[a].partial_cmp(&vals[b]).unwrap_or(std::cmp::Ordering::Equal));
    order
}

fn eigh_f64(m: &Array2<Complex<f64>>) -> Result<(Vec<f64>, Array2<Complex<f64>>)> {
    let a = to_nalgebra(m)?;
    let n = a.nrows();
    let eig = SymmetricEigen::try_new(a, f64::EPSILON, 0).ok_or(Error::Eigensolver)?;
    let vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    check_finite(&vals)?;
    let order = sorted_order(&vals);
    let sorted = order.iter().map(|&k| vals[k]).collect();
    let vecs = Array2::from_shape_fn((n, n), |(i, j)| eig.eigenvectors[(i, order[j])]);
    Ok((sorted, vecs))
}

fn eigvalsh_f64(m: &Array2<Complex<f64>>) -> Result<Vec<f64>> {
    let a = to_nalgebra(m)?;
    let mut vals: Vec<f64> = a.symmetric_eigenvalues().iter().copied().collect();
    check_finite(&vals)?;
    vals.sort_by(|a, b| a.total_cmp(b));
    Ok(vals)
}

impl Scalar for f64 {
    fn eigh(m: &Array2<Complex<f64>>) -> Result<(Vec<f64>, Array2<Complex<f64>>)> {
        eigh_f64(m)
    }

    fn eigvalsh(m: &Array2<Complex<f64>>) -> Result<Vec<f64>> {
        eigvalsh_f64(m)
    }
}

// The single-precision Hermitian QR iteration is fragile on nearly-diagonal
// inputs, so f32 matrices are decomposed in double precision.
impl Scalar for f32 {
    fn eigh(m: &Array2<Complex<f32>>) -> Result<(Vec<f32>, Array2<Complex<f32>>)> {
        let (vals, vecs) = eigh_f64(&m.mapv(|z| Complex::new(z.re as f64, z.im as f64)))?;
        Ok((vals.into_iter().map(|v| v as f32).collect(), vecs.mapv(|z| Complex::new(z.re as f32, z.im as f32))))
    }

    fn eigvalsh(m: &Array2<Complex<f32>>) -> Result<Vec<f32>> {
        let vals = eigvalsh_f64(&m.mapv(|z| Complex::new(z.re as f64, z.im as f64)))?;
        Ok(vals.into_iter().map(|v| v as f32).collect())
    }
}
