//! Truncated bosonic operator and state algebra on the composite
//! transmon (x) magnon space.
//!
//! Composite basis index is `q * dim_m + n` for transmon level `q` and magnon
//! level `n`: the transmon index varies slowest.

use ndarray::{Array1, Array2};
use num_complex::Complex;

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

pub type CMatrix<T> = Array2<Complex<T>>;
pub type CVector<T> = Array1<Complex<T>>;

/// Combined population of the two highest magnon levels above which a state
/// is flagged as truncation suspect.
pub const TRUNCATION_TAIL_LIMIT: f64 = 1.0e-4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SpaceDims {
    /// Transmon levels kept.
    pub qubit: usize,
    /// Magnon Fock levels kept.
    pub magnon: usize,
}

impl SpaceDims {
    pub fn new(qubit: usize, magnon: usize) -> Result<Self> {
        if qubit < 2 {
            return Err(invalid("dim_q", "at least two transmon levels are required"));
        }
        if magnon < 2 {
            return Err(invalid("dim_m", "at least two magnon levels are required"));
        }
        Ok(Self { qubit, magnon })
    }

    pub fn total(&self) -> usize {
        self.qubit * self.magnon
    }

    #[inline]
    pub fn index(&self, q: usize, n: usize) -> usize {
        q * self.magnon + n
    }
}

impl Default for SpaceDims {
    fn default() -> Self {
        Self { qubit: 3, magnon: 140 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    Qubit,
    Magnon,
}

/// Shape of the space a density matrix lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dims {
    /// One bosonic mode with this many levels.
    Single(usize),
    Composite(SpaceDims),
}

impl Dims {
    pub fn total(&self) -> usize {
        match self {
            Dims::Single(n) => *n,
            Dims::Composite(d) => d.total(),
        }
    }

    pub fn composite(&self) -> Result<SpaceDims> {
        match self {
            Dims::Composite(d) => Ok(*d),
            Dims::Single(n) => Err(Error::DimensionMismatch {
                what: "expected a composite transmon-magnon state",
                expected: 2,
                found: *n,
            }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ParitySign {
    Even,
    Odd,
}

impl ParitySign {
    pub fn sign<T: Scalar>(self) -> T {
        match self {
            ParitySign::Even => T::one(),
            ParitySign::Odd => -T::one(),
        }
    }
}

/// Hermitian, unit-trace operator with its dimension metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix<T> {
    dims: Dims,
    matrix: CMatrix<T>,
}

impl<T: Scalar> DensityMatrix<T> {
    /// Validated constructor: Hermitian to 1e-10, unit trace to 1e-8 and no
    /// eigenvalue below -1e-7.
    pub fn new(dims: Dims, matrix: CMatrix<T>) -> Result<Self> {
        let rho = Self::from_raw(dims, matrix)?;
        rho.validate()?;
        Ok(rho)
    }

    /// Shape-checked but otherwise unvalidated.
    pub fn from_raw(dims: Dims, matrix: CMatrix<T>) -> Result<Self> {
        let n = dims.total();
        if matrix.dim() != (n, n) {
            return Err(Error::DimensionMismatch { what: "density matrix", expected: n, found: matrix.nrows() });
        }
        Ok(Self { dims, matrix })
    }

    /// `|psi><psi|` for a ket, normalising it first.
    pub fn from_ket(dims: Dims, psi: &CVector<T>) -> Result<Self> {
        if psi.len() != dims.total() {
            return Err(Error::DimensionMismatch { what: "ket", expected: dims.total(), found: psi.len() });
        }
        let norm = vector_norm(psi);
        if norm <= T::epsilon() {
            return Err(Error::NullState("zero vector"));
        }
        let v = psi.mapv(|z| z / norm);
        Ok(Self { dims, matrix: outer(&v, &v) })
    }

    pub fn dims(&self) -> Dims {
        self.dims
    }

    pub fn matrix(&self) -> &CMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> CMatrix<T> {
        self.matrix
    }

    pub fn trace(&self) -> Complex<T> {
        self.matrix.diag().iter().copied().sum()
    }

    /// `max |rho - rho^dagger|`.
    pub fn hermiticity_error(&self) -> T {
        hermiticity_error(&self.matrix)
    }

    pub fn min_eigenvalue(&self) -> Result<T> {
        let vals = T::eigvalsh(&self.matrix)?;
        Ok(vals.first().copied().unwrap_or_else(T::zero))
    }

    pub fn validate(&self) -> Result<()> {
        let herm = self.hermiticity_error();
        if !(herm <= T::tol(1e-10)) {
            return Err(invalid("density matrix", format!("not Hermitian (error {herm:e})")));
        }
        let tr = self.trace();
        if !((tr.re - T::one()).abs() <= T::tol(1e-8) && tr.im.abs() <= T::tol(1e-8)) {
            return Err(invalid("density matrix", format!("trace {} + {}i is not 1", tr.re, tr.im)));
        }
        let min = self.min_eigenvalue()?;
        if min < -T::tol(1e-7) {
            return Err(invalid("density matrix", format!("negative eigenvalue {min:e}")));
        }
        Ok(())
    }

    /// `tr(rho A)`.
    pub fn expectation(&self, op: &CMatrix<T>) -> Result<Complex<T>> {
        let n = self.dims.total();
        if op.dim() != (n, n) {
            return Err(Error::DimensionMismatch { what: "observable", expected: n, found: op.nrows() });
        }
        let mut acc = Complex::new(T::zero(), T::zero());
        for i in 0..n {
            for k in 0..n {
                acc += self.matrix[[i, k]] * op[[k, i]];
            }
        }
        Ok(acc)
    }

    /// Diagonal of the reduced magnon state.
    pub fn magnon_populations(&self) -> Vec<T> {
        match self.dims {
            Dims::Single(n) => (0..n).map(|k| self.matrix[[k, k]].re).collect(),
            Dims::Composite(d) => (0..d.magnon)
                .map(|k| (0..d.qubit).map(|q| self.matrix[[d.index(q, k), d.index(q, k)]].re).sum())
                .collect(),
        }
    }

    /// Diagonal of the reduced transmon state.
    pub fn qubit_populations(&self) -> Result<Vec<T>> {
        let d = self.dims.composite()?;
        Ok((0..d.qubit)
            .map(|q| (0..d.magnon).map(|k| self.matrix[[d.index(q, k), d.index(q, k)]].re).sum())
            .collect())
    }

    /// Population in the two highest magnon levels.
    pub fn truncation_tail(&self) -> T {
        let pops = self.magnon_populations();
        pops.iter().rev().take(2).copied().sum()
    }

    pub fn truncation_suspect(&self) -> bool {
        self.truncation_tail() > T::lit(TRUNCATION_TAIL_LIMIT)
    }
}

pub fn hermiticity_error<T: Scalar>(m: &CMatrix<T>) -> T {
    let n = m.nrows();
    let mut worst = T::zero();
    for i in 0..n {
        for j in i..n {
            worst = worst.max((m[[i, j]] - m[[j, i]].conj()).norm());
        }
    }
    worst
}

pub fn dagger<T: Scalar>(m: &CMatrix<T>) -> CMatrix<T> {
    m.t().mapv(|z| z.conj())
}

/// `|a><b|`.
pub fn outer<T: Scalar>(a: &CVector<T>, b: &CVector<T>) -> CMatrix<T> {
    Array2::from_shape_fn((a.len(), b.len()), |(i, j)| a[i] * b[j].conj())
}

/// `<a|b>`.
pub fn inner<T: Scalar>(a: &CVector<T>, b: &CVector<T>) -> Complex<T> {
    a.iter().zip(b.iter()).map(|(x, y)| x.conj() * y).sum()
}

pub fn vector_norm<T: Scalar>(v: &CVector<T>) -> T {
    v.iter().map(|z| z.norm_sqr()).sum::<T>().sqrt()
}

pub fn basis<T: Scalar>(dim: usize, n: usize) -> CVector<T> {
    let mut v = Array1::from_elem(dim, Complex::new(T::zero(), T::zero()));
    v[n] = Complex::new(T::one(), T::zero());
    v
}

pub fn identity<T: Scalar>(dim: usize) -> CMatrix<T> {
    Array2::from_shape_fn((dim, dim), |(i, j)| if i == j { Complex::new(T::one(), T::zero()) } else { Complex::new(T::zero(), T::zero()) })
}

/// `a (x) b` for kets, transmon slowest when `a` is the transmon factor.
pub fn kron_vec<T: Scalar>(a: &CVector<T>, b: &CVector<T>) -> CVector<T> {
    let nb = b.len();
    Array1::from_shape_fn(a.len() * nb, |k| a[k / nb] * b[k % nb])
}

/// Kronecker product.
pub fn kron<T: Scalar>(a: &CMatrix<T>, b: &CMatrix<T>) -> CMatrix<T> {
    let (ar, ac) = a.dim();
    let (br, bc) = b.dim();
    Array2::from_shape_fn((ar * br, ac * bc), |(i, j)| a[[i / br, j / bc]] * b[[i % br, j % bc]])
}

/// Ladder, number, identity and parity operators of one truncated mode.
#[derive(Debug, Clone)]
pub struct ModeOperators<T> {
    pub annihilate: CMatrix<T>,
    pub number: CMatrix<T>,
    pub identity: CMatrix<T>,
    pub parity: CMatrix<T>,
}

pub fn mode_operators<T: Scalar>(dim: usize) -> Result<ModeOperators<T>> {
    if dim < 2 {
        return Err(invalid("dim", "a mode needs at least two levels"));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let real = |x: T| Complex::new(x, T::zero());
    let annihilate = Array2::from_shape_fn((dim, dim), |(i, j)| {
        if j == i + 1 { real(T::from_usize_lossy(j).sqrt()) } else { zero }
    });
    let number = Array2::from_shape_fn((dim, dim), |(i, j)| if i == j { real(T::from_usize_lossy(i)) } else { zero });
    let parity = Array2::from_shape_fn((dim, dim), |(i, j)| {
        if i != j {
            zero
        } else if i % 2 == 0 {
            real(T::one())
        } else {
            real(-T::one())
        }
    });
    Ok(ModeOperators { annihilate, number, identity: identity(dim), parity })
}

/// Untruncated coherent-state amplitudes `e^{-|a|^2/2} a^n / sqrt(n!)` for
/// `n < dim`, without renormalisation.
pub(crate) fn coherent_amplitudes<T: Scalar>(alpha: Complex<T>, dim: usize) -> CVector<T> {
    let mut v = Array1::from_elem(dim, Complex::new(T::zero(), T::zero()));
    v[0] = Complex::new((-alpha.norm_sqr() / T::lit(2.0)).exp(), T::zero());
    for n in 1..dim {
        v[n] = v[n - 1] * alpha / T::from_usize_lossy(n).sqrt();
    }
    v
}

/// `|alpha|^2 <= dim/4`: the truncated coherent state is trustworthy.
pub fn coherent_truncation_ok<T: Scalar>(alpha: Complex<T>, dim: usize) -> bool {
    alpha.norm_sqr() <= T::from_usize_lossy(dim) / T::lit(4.0)
}

/// Coherent state `|alpha>` truncated to `dim` levels and renormalised.
/// Check [`coherent_truncation_ok`] for the trust condition.
pub fn coherent_state<T: Scalar>(alpha: Complex<T>, dim: usize) -> CVector<T> {
    let v = coherent_amplitudes(alpha, dim);
    let norm = vector_norm(&v);
    v.mapv(|z| z / norm)
}

/// Normalised `|0> + s e^{i theta} |beta>` with `s = +1` (even) or `-1` (odd).
pub fn cat_state<T: Scalar>(beta: Complex<T>, theta: T, parity: ParitySign, dim: usize) -> Result<CVector<T>> {
    let phase = Complex::from_polar(parity.sign::<T>(), theta);
    let coherent = coherent_state(beta, dim);
    let mut v = coherent.mapv(|z| z * phase);
    v[0] += Complex::new(T::one(), T::zero());
    let norm = vector_norm(&v);
    if norm <= T::tol(1e-12) {
        return Err(Error::NullState("cat superposition cancels"));
    }
    Ok(v.mapv(|z| z / norm))
}

/// Thermal state with mean occupation `n_th`, renormalised over the truncation.
pub fn thermal_density<T: Scalar>(n_th: T, dim: usize) -> Result<DensityMatrix<T>> {
    if !(n_th.is_finite() && n_th >= T::zero()) {
        return Err(invalid("n_th", "must be finite and non-negative"));
    }
    if dim < 2 {
        return Err(invalid("dim", "a mode needs at least two levels"));
    }
    let q = n_th / (T::one() + n_th);
    let weights: Vec<T> = (0..dim).map(|n| q.powi(n as i32)).collect();
    let z: T = weights.iter().copied().sum();
    let mut m = Array2::from_elem((dim, dim), Complex::new(T::zero(), T::zero()));
    for (n, w) in weights.iter().enumerate() {
        m[[n, n]] = Complex::new(*w / z, T::zero());
    }
    Ok(DensityMatrix { dims: Dims::Single(dim), matrix: m })
}

/// Hermitian generator `i (alpha m^dagger - alpha^* m)`.
fn displacement_generator<T: Scalar>(alpha: Complex<T>, dim: usize) -> CMatrix<T> {
    let i = Complex::new(T::zero(), T::one());
    Array2::from_shape_fn((dim, dim), |(r, c)| {
        if r == c + 1 {
            // <c+1| m^dagger |c> = sqrt(c+1)
            i * alpha * T::from_usize_lossy(r).sqrt()
        } else if c == r + 1 {
            -(i * alpha.conj()) * T::from_usize_lossy(c).sqrt()
        } else {
            Complex::new(T::zero(), T::zero())
        }
    })
}

/// Displacement `exp(alpha m^dagger - alpha^* m)` of the truncated mode,
/// exponentiated through the Hermitian eigen-decomposition of its generator,
/// so the result is unitary by construction.
pub fn displacement_op<T: Scalar>(alpha: Complex<T>, dim: usize) -> Result<CMatrix<T>> {
    if dim < 2 {
        return Err(invalid("dim", "a mode needs at least two levels"));
    }
    let (vals, vecs) = T::eigh(&displacement_generator(alpha, dim))?;
    let phases: Vec<Complex<T>> = vals.iter().map(|&l| Complex::from_polar(T::one(), -l)).collect();
    Ok(Array2::from_shape_fn((dim, dim), |(r, c)| {
        (0..dim).map(|k| vecs[[r, k]] * phases[k] * vecs[[c, k]].conj()).sum()
    }))
}

fn require_square(m: &CMatrix<impl Scalar>, n: usize, what: &'static str) -> Result<()> {
    if m.dim() != (n, n) {
        return Err(Error::DimensionMismatch { what, expected: n, found: m.nrows() });
    }
    Ok(())
}

/// Partial trace of any operator on the composite space.
pub fn partial_trace_matrix<T: Scalar>(m: &CMatrix<T>, dims: SpaceDims, keep: Subsystem) -> Result<CMatrix<T>> {
    require_square(m, dims.total(), "partial trace input")?;
    let zero = Complex::new(T::zero(), T::zero());
    Ok(match keep {
        Subsystem::Magnon => Array2::from_shape_fn((dims.magnon, dims.magnon), |(a, b)| {
            (0..dims.qubit).fold(zero, |acc, q| acc + m[[dims.index(q, a), dims.index(q, b)]])
        }),
        Subsystem::Qubit => Array2::from_shape_fn((dims.qubit, dims.qubit), |(p, q)| {
            (0..dims.magnon).fold(zero, |acc, k| acc + m[[dims.index(p, k), dims.index(q, k)]])
        }),
    })
}

/// Reduced state of one subsystem.
pub fn partial_trace<T: Scalar>(rho: &DensityMatrix<T>, keep: Subsystem) -> Result<DensityMatrix<T>> {
    let dims = rho.dims.composite()?;
    let reduced = partial_trace_matrix(&rho.matrix, dims, keep)?;
    let single = match keep {
        Subsystem::Magnon => Dims::Single(dims.magnon),
        Subsystem::Qubit => Dims::Single(dims.qubit),
    };
    Ok(DensityMatrix { dims: single, matrix: reduced })
}

/// Partial transpose of a composite operator with respect to `which`.
pub fn partial_transpose_matrix<T: Scalar>(m: &CMatrix<T>, dims: SpaceDims, which: Subsystem) -> Result<CMatrix<T>> {
    require_square(m, dims.total(), "partial transpose input")?;
    let (dq, dm) = (dims.qubit, dims.magnon);
    Ok(Array2::from_shape_fn((dq * dm, dq * dm), |(r, c)| {
        let (p, a) = (r / dm, r % dm);
        let (q, b) = (c / dm, c % dm);
        match which {
            Subsystem::Qubit => m[[dims.index(q, a), dims.index(p, b)]],
            Subsystem::Magnon => m[[dims.index(p, b), dims.index(q, a)]],
        }
    }))
}

pub fn partial_transpose<T: Scalar>(rho: &DensityMatrix<T>, which: Subsystem) -> Result<CMatrix<T>> {
    partial_transpose_matrix(&rho.matrix, rho.dims.composite()?, which)
}

/// Whether a composite or single-mode ket puts more than the allowed weight
/// in its two highest magnon levels.
pub fn ket_truncation_suspect<T: Scalar>(psi: &CVector<T>, dim_m: usize) -> bool {
    let tail: T = psi
        .iter()
        .enumerate()
        .filter(|(k, _)| k % dim_m >= dim_m.saturating_sub(2))
        .map(|(_, z)| z.norm_sqr())
        .sum();
    tail > T::lit(TRUNCATION_TAIL_LIMIT)
}
