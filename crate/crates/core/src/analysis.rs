//! Diagnostics of prepared states: logarithmic negativity, pure-state
//! fidelity, cat size and the Wigner function on a phase-space grid.

use ndarray::{Array2, Axis};
use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::hilbert::{partial_transpose, CVector, DensityMatrix, Dims, Subsystem};
use crate::scalar::Scalar;

/// Eigenvalues of the partial transpose below `-NEGATIVITY_CUTOFF` count
/// toward the negativity.
pub const NEGATIVITY_CUTOFF: f64 = 1.0e-12;

/// `E_N = log2(2 N + 1)`, with `N` the summed magnitude of the negative
/// eigenvalues of the partial transpose on the transmon.
pub fn log_negativity<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    log_negativity_wrt(rho, Subsystem::Qubit)
}

pub fn log_negativity_wrt<T: Scalar>(rho: &DensityMatrix<T>, which: Subsystem) -> Result<T> {
    let pt = partial_transpose(rho, which)?;
    let cutoff = T::lit(NEGATIVITY_CUTOFF);
    let negativity: T = T::eigvalsh(&pt)?.into_iter().filter(|&l| l < -cutoff).map(|l| -l).sum();
    Ok((T::lit(2.0) * negativity + T::one()).log2())
}

/// `sqrt(<psi| rho |psi>)` for a unit-norm `psi`.
pub fn fidelity_pure<T: Scalar>(rho: &DensityMatrix<T>, psi: &CVector<T>) -> Result<T> {
    let n = rho.dims().total();
    if psi.len() != n {
        return Err(Error::DimensionMismatch { what: "fidelity target", expected: n, found: psi.len() });
    }
    let norm_sqr: T = psi.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sqr - T::one()).abs() > T::tol(1e-8) {
        return Err(invalid("psi", "target state must have unit norm"));
    }
    let m = rho.matrix();
    let mut acc = Complex::new(T::zero(), T::zero());
    for i in 0..n {
        let mut row = Complex::new(T::zero(), T::zero());
        for j in 0..n {
            row += m[[i, j]] * psi[j];
        }
        acc += psi[i].conj() * row;
    }
    Ok(acc.re.max(T::zero()).sqrt())
}

/// `S = |beta|^2`.
pub fn cat_size<T: Scalar>(beta: Complex<T>) -> T {
    beta.norm_sqr()
}

/// Rectangular phase-space window with inclusive end points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec<T> {
    pub re: (T, T),
    pub im: (T, T),
    pub n_re: usize,
    pub n_im: usize,
}

impl<T: Scalar> GridSpec<T> {
    pub fn square(half_width: T, n: usize) -> Self {
        Self { re: (-half_width, half_width), im: (-half_width, half_width), n_re: n, n_im: n }
    }

    /// `+-1.5 (|beta| + 2)` on 201 x 201 points.
    pub fn for_cat(beta: Complex<T>) -> Self {
        Self::square(T::lit(1.5) * (beta.norm() + T::lit(2.0)), 201)
    }

    fn axis(lo: T, hi: T, n: usize) -> Vec<T> {
        if n == 1 {
            return vec![lo];
        }
        let step = (hi - lo) / T::from_usize_lossy(n - 1);
        (0..n).map(|k| lo + step * T::from_usize_lossy(k)).collect()
    }

    fn validate(&self) -> Result<()> {
        if self.n_re < 2 || self.n_im < 2 {
            return Err(invalid("grid", "at least two points per axis"));
        }
        if !(self.re.0 < self.re.1 && self.im.0 < self.im.1) {
            return Err(invalid("grid", "ranges must be increasing"));
        }
        Ok(())
    }
}

/// `W(alpha)` sampled on a uniform grid. `values[[i, j]]` is at
/// `re_axis[j] + i im_axis[i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct WignerGrid<T> {
    pub re_axis: Vec<T>,
    pub im_axis: Vec<T>,
    pub values: Array2<T>,
    /// Propagated from the input state.
    pub truncation_suspect: bool,
}

impl<T: Scalar> WignerGrid<T> {
    pub fn min(&self) -> T {
        self.values.iter().copied().fold(T::infinity(), T::min)
    }

    pub fn max(&self) -> T {
        self.values.iter().copied().fold(T::neg_infinity(), T::max)
    }

    /// Position `(re, im)` of the maximum.
    pub fn argmax(&self) -> (T, T) {
        let mut best = (0, 0);
        for ((i, j), v) in self.values.indexed_iter() {
            if *v > self.values[best] {
                best = (i, j);
            }
        }
        (self.re_axis[best.1], self.im_axis[best.0])
    }

    pub fn cell_area(&self) -> T {
        let dr = self.re_axis[1] - self.re_axis[0];
        let di = self.im_axis[1] - self.im_axis[0];
        dr * di
    }

    /// `sum W * dA`, close to 1 when the grid covers the state.
    pub fn riemann_sum(&self) -> T {
        self.values.iter().copied().sum::<T>() * self.cell_area()
    }
}

/// Workspace for evaluating `tr[rho D(beta) P]` one point at a time.
///
/// Matrix elements of the displacement are `<n+k|D(beta)|n> = f_n^k e^{i k arg beta}`
/// and `<n|D(beta)|n+k> = (-1)^k f_n^k e^{-i k arg beta}` with the normalised
/// Laguerre functions `f_n^k = sqrt(n!/(n+k)!) x^{k/2} e^{-x/2} L_n^k(x)`,
/// `x = |beta|^2`. These are bounded by 1 and follow a forward recurrence in
/// `n`, run with a separate log-scale so that `e^{-x/2}` never underflows
/// before it is combined with the growing polynomial.
struct DisplacedParity<'a, T> {
    rho: &'a Array2<Complex<T>>,
    sqrt: Vec<T>,
    ln_factorial: Vec<T>,
}

const RESCALE: f64 = 1.0e100;

impl<'a, T: Scalar> DisplacedParity<'a, T> {
    fn new(rho: &'a Array2<Complex<T>>) -> Self {
        let n = rho.nrows();
        let sqrt = (0..=2 * n).map(|k| T::from_usize_lossy(k).sqrt()).collect();
        let mut ln_factorial = vec![T::zero(); n + 1];
        for k in 1..=n {
            ln_factorial[k] = ln_factorial[k - 1] + T::from_usize_lossy(k).ln();
        }
        Self { rho, sqrt, ln_factorial }
    }

    fn trace(&self, beta: Complex<T>, f: &mut Vec<T>) -> Complex<T> {
        let n = self.rho.nrows();
        let rho = self.rho;
        let x = beta.norm_sqr();
        let mut acc = Complex::new(T::zero(), T::zero());
        if x == T::zero() {
            for d in 0..n {
                acc = if d % 2 == 0 { acc + rho[[d, d]] } else { acc - rho[[d, d]] };
            }
            return acc;
        }
        let ln_x = x.ln();
        let unit = beta / beta.norm();
        let big = T::lit(RESCALE);
        let ln_big = big.ln();
        let mut phase = Complex::new(T::one(), T::zero());
        for k in 0..n {
            let len = n - k;
            f.clear();
            let kf = T::from_usize_lossy(k);
            let mut scale = kf / T::lit(2.0) * ln_x - x / T::lit(2.0) - self.ln_factorial[k] / T::lit(2.0);
            let mut prev = T::zero();
            let mut cur = T::one();
            f.push(scale.exp());
            for j in 1..len {
                // f_j = [(2j - 1 + k - x) f_{j-1} - sqrt((j-1)(j-1+k)) f_{j-2}] / sqrt(j (j+k))
                let jm = j - 1;
                let a = T::from_usize_lossy(2 * jm + 1 + k) - x;
                let next = (a * cur - self.sqrt[jm] * self.sqrt[jm + k] * prev) / (self.sqrt[j] * self.sqrt[j + k]);
                prev = cur;
                cur = next;
                if cur.abs() > big {
                    cur = cur / big;
                    prev = prev / big;
                    scale = scale + ln_big;
                }
                f.push(cur * scale.exp());
            }
            let mut upper = Complex::new(T::zero(), T::zero());
            let mut lower = Complex::new(T::zero(), T::zero());
            for (j, &fj) in f.iter().enumerate() {
                // upper: rho_{j, j+k} <j+k|D|j> (-1)^j
                // lower: rho_{j+k, j} <j|D|j+k> (-1)^{j+k}, the (-1)^k cancels
                let u = rho[[j, j + k]] * fj;
                let l = rho[[j + k, j]] * fj;
                if j % 2 == 0 {
                    upper += u;
                    lower += l;
                } else {
                    upper -= u;
                    lower -= l;
                }
            }
            if k == 0 {
                acc += upper;
            } else {
                acc += upper * phase + lower * phase.conj();
            }
            phase = phase * unit;
        }
        acc
    }
}

/// `W(alpha) = (2/pi) tr[D^dagger(alpha) rho D(alpha) e^{i pi m^dagger m}]` at one point.
pub fn wigner_point<T: Scalar>(rho_m: &DensityMatrix<T>, alpha: Complex<T>) -> Result<T> {
    let n = single_mode(rho_m)?;
    let dp = DisplacedParity::new(rho_m.matrix());
    let mut f = Vec::with_capacity(n);
    let w = dp.trace(alpha * T::lit(2.0), &mut f) * (T::lit(2.0) / T::PI());
    check_real(w)
}

fn single_mode<T: Scalar>(rho: &DensityMatrix<T>) -> Result<usize> {
    match rho.dims() {
        Dims::Single(n) => Ok(n),
        Dims::Composite(d) => Err(Error::DimensionMismatch {
            what: "Wigner function needs a single-mode state",
            expected: d.magnon,
            found: d.total(),
        }),
    }
}

fn check_real<T: Scalar>(w: Complex<T>) -> Result<T> {
    if w.im.abs() > T::tol(1e-8) * w.re.abs().max(T::one()) {
        return Err(Error::InvariantViolation {
            t_us: f64::NAN,
            what: format!("Wigner function has imaginary part {:e}", w.im.as_f64()),
        });
    }
    Ok(w.re)
}

/// Wigner function of a single-mode state on `spec`.
pub fn wigner<T: Scalar>(rho_m: &DensityMatrix<T>, spec: &GridSpec<T>) -> Result<WignerGrid<T>> {
    let n = single_mode(rho_m)?;
    spec.validate()?;
    let re_axis = GridSpec::axis(spec.re.0, spec.re.1, spec.n_re);
    let im_axis = GridSpec::axis(spec.im.0, spec.im.1, spec.n_im);
    let dp = DisplacedParity::new(rho_m.matrix());
    let norm = T::lit(2.0) / T::PI();
    let mut values = Array2::from_elem((spec.n_im, spec.n_re), T::zero());
    values
        .axis_iter_mut(Axis(0))
        .into_par_iter()
        .zip(im_axis.par_iter())
        .try_for_each(|(mut row, &y)| -> Result<()> {
            let mut f = Vec::with_capacity(n);
            for (slot, &x) in row.iter_mut().zip(&re_axis) {
                let beta = Complex::new(x, y) * T::lit(2.0);
                *slot = check_real(dp.trace(beta, &mut f) * norm)?;
            }
            Ok(())
        })?;
    Ok(WignerGrid { re_axis, im_axis, values, truncation_suspect: rho_m.truncation_suspect() })
}
