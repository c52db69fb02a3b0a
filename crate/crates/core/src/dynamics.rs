//! Rotating-frame Hamiltonian and fixed-step RK4 integration of the Lindblad
//! master equation on the full density matrix.
//!
//! Model parameters are in ordinary-frequency units (MHz, us). The engine
//! converts to angular rates internally: a coupling `g` in MHz becomes
//! `2 pi g` rad/us.

use std::collections::BTreeSet;

use ndarray::Array2;
use num_complex::Complex;

use crate::device::{thermal_occupation, DeviceParams};
use crate::error::{invalid, Error, Result};
use crate::hilbert::{dagger, kron, mode_operators, CMatrix, DensityMatrix, Dims, SpaceDims};
use crate::scalar::Scalar;
use crate::sparse::Csr;

/// Largest allowed `dt * max|H|` (angular units).
pub const MAX_STEP_PHASE: f64 = 0.05;

/// Largest tolerated drift of `tr rho` from 1 before a run is aborted.
pub const TRACE_DRIFT_LIMIT: f64 = 1.0e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Frame<T> {
    /// Co-rotating with the transmon at `omega_q`: only the anharmonicity remains.
    QubitRotating,
    /// Transmon energies kept in full, `omega_q` in GHz.
    LabTransmon { omega_q: T },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HamiltonianModel<T> {
    pub dims: SpaceDims,
    /// Magnon detuning from the drive, MHz.
    pub delta: T,
    /// Modulated radiation-pressure coupling, MHz.
    pub g_tilde: T,
    /// Anharmonicity magnitude `E_C / h`, MHz.
    pub ec: T,
    pub frame: Frame<T>,
    /// Optional constant magnon drive `f (m + m^dagger)`, MHz. Zero by default.
    pub magnon_drive: T,
}

impl<T: Scalar> HamiltonianModel<T> {
    pub fn new(dims: SpaceDims, delta: T, g_tilde: T, ec: T) -> Self {
        Self { dims, delta, g_tilde, ec, frame: Frame::QubitRotating, magnon_drive: T::zero() }
    }

    /// Energy of transmon level `k`, MHz.
    pub fn transmon_energy(&self, k: usize) -> T {
        let kf = T::from_usize_lossy(k);
        let kerr = -self.ec / T::lit(2.0) * kf * (kf - T::one());
        match self.frame {
            Frame::QubitRotating => kerr,
            Frame::LabTransmon { omega_q } => omega_q * T::lit(1.0e3) * kf + kerr,
        }
    }
}

/// `H/h` in MHz: for each transmon level `k` the magnon block is
/// `E_k + delta m^dagger m + (k g + f)(m + m^dagger)`.
pub fn build_hamiltonian<T: Scalar>(model: &HamiltonianModel<T>) -> CMatrix<T> {
    let dims = model.dims;
    let n = dims.total();
    let mut h = Array2::from_elem((n, n), Complex::new(T::zero(), T::zero()));
    for k in 0..dims.qubit {
        let energy = model.transmon_energy(k);
        let push = T::from_usize_lossy(k) * model.g_tilde + model.magnon_drive;
        for a in 0..dims.magnon {
            let i = dims.index(k, a);
            h[[i, i]] = Complex::new(energy + model.delta * T::from_usize_lossy(a), T::zero());
            if a + 1 < dims.magnon && push != T::zero() {
                let x = Complex::new(push * T::from_usize_lossy(a + 1).sqrt(), T::zero());
                h[[i, i + 1]] = x;
                h[[i + 1, i]] = x;
            }
        }
    }
    h
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dephasing {
    /// `(1/T2) L[c^dagger c]`.
    Literal,
    /// Pure dephasing inferred from a Ramsey time: rate `2 (1/T2 - 1/(2 T1))`.
    PureFromT2,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseConfig<T> {
    /// Magnon energy decay rate `f_m alpha_G`, MHz (ordinary frequency).
    pub kappa: T,
    pub n_th: T,
    /// Transmon relaxation time, us. Infinite disables the channel.
    pub t1: T,
    /// Transmon dephasing time, us. Infinite disables the channel.
    pub t2: T,
    pub dephasing: Dephasing,
}

impl<T: Scalar> NoiseConfig<T> {
    pub fn none() -> Self {
        Self { kappa: T::zero(), n_th: T::zero(), t1: T::infinity(), t2: T::infinity(), dephasing: Dephasing::Literal }
    }

    /// Noise of a device at temperature `temp` (K) with transmon times in us.
    pub fn from_device(p: &DeviceParams<T>, temp: T, t1: T, t2: T) -> Self {
        Self {
            kappa: p.f_m * p.alpha_g * T::lit(1.0e3),
            n_th: thermal_occupation(&p.constants, p.f_m, temp),
            t1,
            t2,
            dephasing: Dephasing::Literal,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |v: T| !v.is_nan() && v >= T::zero();
        if !(ok(self.kappa) && self.kappa.is_finite()) {
            return Err(invalid("kappa", "must be finite and non-negative"));
        }
        if !(ok(self.n_th) && self.n_th.is_finite()) {
            return Err(invalid("n_th", "must be finite and non-negative"));
        }
        if !(ok(self.t1) && self.t1 > T::zero()) {
            return Err(invalid("T1", "must be positive (use infinity to disable)"));
        }
        if !(ok(self.t2) && self.t2 > T::zero()) {
            return Err(invalid("T2", "must be positive (use infinity to disable)"));
        }
        Ok(())
    }

    /// Rate of the `L[c^dagger c]` channel, 1/us.
    pub fn dephasing_rate(&self) -> T {
        match self.dephasing {
            Dephasing::Literal => self.t2.recip(),
            Dephasing::PureFromT2 => {
                let r = self.t2.recip() - (T::lit(2.0) * self.t1).recip();
                T::lit(2.0) * r.max(T::zero())
            }
        }
    }
}

/// Collapse operators with their rates (1/us) on the composite space:
/// magnon loss and gain, transmon relaxation and dephasing.
pub fn collapse_operators<T: Scalar>(dims: SpaceDims, noise: &NoiseConfig<T>) -> Result<Vec<(T, CMatrix<T>)>> {
    noise.validate()?;
    let q = mode_operators::<T>(dims.qubit)?;
    let m = mode_operators::<T>(dims.magnon)?;
    let kappa = T::TAU() * noise.kappa;
    let mut ops = Vec::new();
    let mut push = |rate: T, op: CMatrix<T>| {
        if rate > T::zero() {
            ops.push((rate, op));
        }
    };
    push(kappa * (noise.n_th + T::one()), kron(&q.identity, &m.annihilate));
    push(kappa * noise.n_th, kron(&q.identity, &dagger(&m.annihilate)));
    push(noise.t1.recip(), kron(&q.annihilate, &m.identity));
    push(noise.dephasing_rate(), kron(&q.number, &m.identity));
    Ok(ops)
}

/// `d rho / dt` in 1/us, evaluated literally with dense products:
/// `i [rho, H] + sum_k r_k (L rho L^dagger - {L^dagger L, rho}/2)`.
/// `h` is in MHz.
pub fn lindblad_rhs<T: Scalar>(rho: &DensityMatrix<T>, h: &CMatrix<T>, noise: &NoiseConfig<T>) -> Result<CMatrix<T>> {
    let dims = rho.dims().composite()?;
    let n = dims.total();
    if h.dim() != (n, n) {
        return Err(Error::DimensionMismatch { what: "Hamiltonian", expected: n, found: h.nrows() });
    }
    let r = rho.matrix();
    let i = Complex::new(T::zero(), T::one());
    let w = T::TAU();
    let h_ang = h.mapv(|z| z * w);
    let mut out = (r.dot(&h_ang) - h_ang.dot(r)).mapv(|z| z * i);
    for (rate, l) in collapse_operators(dims, noise)? {
        let ld = dagger(&l);
        let ldl = ld.dot(&l);
        let term = l.dot(r).dot(&ld) - (ldl.dot(r) + r.dot(&ldl)).mapv(|z| z / T::lit(2.0));
        out.zip_mut_with(&term, |o, t| *o += *t * rate);
    }
    Ok(out)
}

/// Compiled Lindblad generator for fast repeated application to Hermitian
/// states. Holds `A = -i H_eff` with `H_eff = H - (i/2) sum r L^dagger L`,
/// so that `rho' = X + X^dagger` with `X = A rho + (1/2) sum r L rho L^dagger`.
/// The output is exactly Hermitian whenever the input is.
pub struct Generator<T> {
    n: usize,
    drift: Csr<T>,
    jumps: Vec<(T, Csr<T>)>,
}

impl<T: Scalar> Generator<T> {
    /// `h` in MHz.
    pub fn new(h: &CMatrix<T>, dims: SpaceDims, noise: &NoiseConfig<T>) -> Result<Self> {
        let n = dims.total();
        if h.dim() != (n, n) {
            return Err(Error::DimensionMismatch { what: "Hamiltonian", expected: n, found: h.nrows() });
        }
        let jumps = collapse_operators(dims, noise)?;
        let half = T::lit(0.5);
        let mut h_eff = h.mapv(|z| z * T::TAU());
        for (rate, l) in &jumps {
            let ldl = dagger(l).dot(l);
            h_eff.zip_mut_with(&ldl, |o, x| *o -= Complex::new(T::zero(), half * *rate) * *x);
        }
        let minus_i = Complex::new(T::zero(), -T::one());
        let drift = Csr::from_dense(&h_eff.mapv(|z| z * minus_i));
        let jumps = jumps.iter().map(|(r, l)| (*r, Csr::from_dense(l))).collect();
        Ok(Self { n, drift, jumps })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// Number of stored non-zeros across all operators.
    pub fn nnz(&self) -> usize {
        self.drift.nnz() + self.jumps.iter().map(|(_, l)| l.nnz()).sum::<usize>()
    }

    /// `out = L(rho)` for a Hermitian row-major `rho`. `scratch` is overwritten.
    pub fn apply(&self, rho: &[Complex<T>], scratch: &mut [Complex<T>], out: &mut [Complex<T>]) {
        let n = self.n;
        self.drift.mul_dense_into(rho, scratch);
        for (rate, l) in &self.jumps {
            l.sandwich_add(rho, *rate / T::lit(2.0), scratch);
        }
        for i in 0..n {
            for j in 0..n {
                out[i * n + j] = scratch[i * n + j] + scratch[j * n + i].conj();
            }
        }
    }
}

/// A scalar recorded along a trajectory.
pub trait Observable<T: Scalar> {
    fn name(&self) -> &str;
    fn observe(&self, t: T, rho: &DensityMatrix<T>) -> Result<T>;
}

/// Wraps a closure as an [`Observable`].
pub struct FnObservable<F> {
    name: String,
    f: F,
}

impl<F> FnObservable<F> {
    pub fn new(name: impl Into<String>, f: F) -> Self {
        Self { name: name.into(), f }
    }
}

impl<T, F> Observable<T> for FnObservable<F>
where
    T: Scalar,
    F: Fn(T, &DensityMatrix<T>) -> Result<T>,
{
    fn name(&self) -> &str {
        &self.name
    }

    fn observe(&self, t: T, rho: &DensityMatrix<T>) -> Result<T> {
        (self.f)(t, rho)
    }
}

/// `tr rho^2`.
pub fn purity<T: Scalar>(rho: &DensityMatrix<T>) -> T {
    // tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
    rho.matrix().iter().map(|z| z.norm_sqr()).sum()
}

pub struct Purity;

impl<T: Scalar> Observable<T> for Purity {
    fn name(&self) -> &str {
        "purity"
    }
    fn observe(&self, _t: T, rho: &DensityMatrix<T>) -> Result<T> {
        Ok(purity(rho))
    }
}

/// `<m^dagger m>`.
pub struct MagnonNumber;

impl<T: Scalar> Observable<T> for MagnonNumber {
    fn name(&self) -> &str {
        "n_magnon"
    }
    fn observe(&self, _t: T, rho: &DensityMatrix<T>) -> Result<T> {
        Ok(rho.magnon_populations().iter().enumerate().map(|(k, p)| T::from_usize_lossy(k) * *p).sum())
    }
}

/// `<c^dagger c>`.
pub struct QubitNumber;

impl<T: Scalar> Observable<T> for QubitNumber {
    fn name(&self) -> &str {
        "n_qubit"
    }
    fn observe(&self, _t: T, rho: &DensityMatrix<T>) -> Result<T> {
        Ok(rho.qubit_populations()?.iter().enumerate().map(|(k, p)| T::from_usize_lossy(k) * *p).sum())
    }
}

/// Population of one transmon level.
pub struct QubitLevel {
    pub level: usize,
    pub name: String,
}

impl<T: Scalar> Observable<T> for QubitLevel {
    fn name(&self) -> &str {
        &self.name
    }
    fn observe(&self, _t: T, rho: &DensityMatrix<T>) -> Result<T> {
        Ok(rho.qubit_populations()?.get(self.level).copied().unwrap_or_else(T::zero))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvolveOptions<T> {
    /// us
    pub t_final: T,
    /// us
    pub dt: T,
    /// Steps between recorded rows.
    pub record_every: usize,
    /// Times (us) at which the full state is stored; snapped to the step grid.
    pub snapshot_times: Vec<T>,
}

impl<T: Scalar> EvolveOptions<T> {
    pub fn new(t_final: T, dt: T) -> Self {
        Self { t_final, dt, record_every: 100, snapshot_times: Vec::new() }
    }

    fn n_steps(&self) -> Result<usize> {
        if !(self.dt.is_finite() && self.dt > T::zero()) {
            return Err(invalid("dt", "must be positive"));
        }
        if !(self.t_final.is_finite() && self.t_final >= T::zero()) {
            return Err(invalid("t_final", "must be non-negative"));
        }
        if self.record_every == 0 {
            return Err(invalid("record_every", "must be at least 1"));
        }
        (self.t_final / self.dt).round().to_usize().ok_or_else(|| invalid("t_final", "too many steps"))
    }
}

/// Recorded observables of one run.
#[derive(Debug, Clone)]
pub struct Trajectory<T> {
    /// us, strictly increasing.
    pub times: Vec<T>,
    pub names: Vec<String>,
    /// One row per recorded time, one entry per name.
    pub rows: Vec<Vec<T>>,
    /// Truncation-suspect flag per recorded time.
    pub truncation: Vec<bool>,
    pub snapshots: Vec<(T, DensityMatrix<T>)>,
    pub final_state: DensityMatrix<T>,
}

impl<T: Scalar> Trajectory<T> {
    pub fn column(&self, name: &str) -> Option<Vec<T>> {
        let k = self.names.iter().position(|n| n == name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn any_truncation_suspect(&self) -> bool {
        self.truncation.iter().any(|&b| b)
    }
}

/// Largest `|H_ij|` in rad/us, restricted to transmon levels that carry
/// population in `rho`. Nothing in the model pumps the transmon upward, so
/// empty levels stay empty and their (large) anharmonic energies never enter
/// the dynamics.
pub fn max_active_rate<T: Scalar>(h: &CMatrix<T>, dims: SpaceDims, rho: &DensityMatrix<T>) -> Result<T> {
    let pops = rho.qubit_populations()?;
    let active: Vec<bool> = pops.iter().map(|p| *p > T::zero()).collect();
    let n = dims.total();
    let mut worst = T::zero();
    for i in 0..n {
        if !active[i / dims.magnon] {
            continue;
        }
        for j in 0..n {
            if active[j / dims.magnon] {
                worst = worst.max(h[[i, j]].norm());
            }
        }
    }
    Ok(worst * T::TAU())
}

fn record<T: Scalar>(
    t: T,
    rho: &DensityMatrix<T>,
    observers: &[&dyn Observable<T>],
    traj_rows: &mut Vec<Vec<T>>,
) -> Result<()> {
    let tr = rho.trace();
    let drift = ((tr.re - T::one()).abs()).max(tr.im.abs());
    if !(drift <= T::tol(TRACE_DRIFT_LIMIT)) {
        return Err(Error::InvariantViolation { t_us: t.as_f64(), what: format!("trace drifted by {:e}", drift.as_f64()) });
    }
    let row = observers.iter().map(|o| o.observe(t, rho)).collect::<Result<Vec<T>>>()?;
    traj_rows.push(row);
    Ok(())
}

/// Integrates the master equation from `rho0` with classical RK4.
pub fn evolve<T: Scalar>(
    rho0: &DensityMatrix<T>,
    model: &HamiltonianModel<T>,
    noise: &NoiseConfig<T>,
    opts: &EvolveOptions<T>,
    observers: &[&dyn Observable<T>],
) -> Result<Trajectory<T>> {
    let dims = model.dims;
    if rho0.dims() != Dims::Composite(dims) {
        return Err(Error::DimensionMismatch { what: "initial state", expected: dims.total(), found: rho0.dims().total() });
    }
    rho0.validate()?;
    let n_steps = opts.n_steps()?;
    let h = build_hamiltonian(model);
    let rate = max_active_rate(&h, dims, rho0)?;
    let product = rate * opts.dt;
    if product > T::lit(MAX_STEP_PHASE) {
        return Err(Error::StepTooLarge { product: product.as_f64(), limit: MAX_STEP_PHASE });
    }
    let gen = Generator::new(&h, dims, noise)?;
    let n = dims.total();

    let symmetrised = (rho0.matrix() + &dagger(rho0.matrix())).mapv(|z| z / T::lit(2.0));
    let mut rho: Vec<Complex<T>> = symmetrised.iter().copied().collect();
    let zero = Complex::new(T::zero(), T::zero());
    let mut k = vec![zero; n * n];
    let mut stage = vec![zero; n * n];
    let mut acc = vec![zero; n * n];
    let mut scratch = vec![zero; n * n];

    let snapshot_steps: BTreeSet<usize> = opts
        .snapshot_times
        .iter()
        .filter_map(|t| (*t / opts.dt).round().to_usize())
        .map(|s| s.min(n_steps))
        .collect();

    let names = observers.iter().map(|o| o.name().to_string()).collect();
    let mut times = Vec::new();
    let mut rows = Vec::new();
    let mut truncation = Vec::new();
    let mut snapshots = Vec::new();

    let as_state = |v: &[Complex<T>]| -> Result<DensityMatrix<T>> {
        let m = Array2::from_shape_vec((n, n), v.to_vec()).expect("square buffer");
        DensityMatrix::from_raw(Dims::Composite(dims), m)
    };

    let dt = opts.dt;
    let half = dt / T::lit(2.0);
    let sixth = dt / T::lit(6.0);
    let third = dt / T::lit(3.0);

    for step in 0..=n_steps {
        let t = T::from_usize_lossy(step) * dt;
        let wants_record = step % opts.record_every == 0 || step == n_steps;
        let wants_snapshot = snapshot_steps.contains(&step);
        if wants_record || wants_snapshot {
            let state = as_state(&rho)?;
            if wants_record {
                record(t, &state, observers, &mut rows)?;
                times.push(t);
                truncation.push(state.truncation_suspect());
            }
            if wants_snapshot {
                let min = state.min_eigenvalue()?;
                if min < -T::tol(1e-7) {
                    return Err(Error::InvariantViolation {
                        t_us: t.as_f64(),
                        what: format!("negative eigenvalue {:e}", min.as_f64()),
                    });
                }
                snapshots.push((t, state));
            }
        }
        if step == n_steps {
            break;
        }

        gen.apply(&rho, &mut scratch, &mut k);
        for i in 0..n * n {
            acc[i] = rho[i] + k[i] * sixth;
            stage[i] = rho[i] + k[i] * half;
        }
        gen.apply(&stage, &mut scratch, &mut k);
        for i in 0..n * n {
            acc[i] += k[i] * third;
            stage[i] = rho[i] + k[i] * half;
        }
        gen.apply(&stage, &mut scratch, &mut k);
        for i in 0..n * n {
            acc[i] += k[i] * third;
            stage[i] = rho[i] + k[i] * dt;
        }
        gen.apply(&stage, &mut scratch, &mut k);
        for i in 0..n * n {
            acc[i] += k[i] * sixth;
        }
        std::mem::swap(&mut rho, &mut acc);
    }

    let final_state = as_state(&rho)?;
    Ok(Trajectory { times, names, rows, truncation, snapshots, final_state })
}
