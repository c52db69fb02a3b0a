//! The analog cat-state protocol: `R_y(pi/2)` on the transmon, evolution
//! under the modulated radiation-pressure Hamiltonian, a second `R_y(pi/2)`
//! and a projective transmon measurement. Also the closed-form
//! dissipationless solution used as its oracle.
//!
//! Gate convention: `R_y(a) = exp(-i a sigma_y / 2)` on the `{|0>, |1>}`
//! transmon subspace, identity on higher levels. With two `R_y(pi/2)` gates
//! the even cat `|0> + e^{i theta}|beta>` is heralded by outcome
//! [`EVEN_CAT_OUTCOME`] = 1 and the odd cat by outcome 0.

use ndarray::Array2;
use num_complex::Complex;

use crate::analysis::{fidelity_pure, log_negativity};
use crate::device::{modulated_grp, thermal_occupation, DeviceParams};
use crate::dynamics::{
    evolve, Dephasing, EvolveOptions, FnObservable, HamiltonianModel, MagnonNumber, NoiseConfig, Observable, Purity,
    QubitLevel, QubitNumber, Trajectory,
};
use crate::error::{invalid, Error, Result};
use crate::hilbert::{
    basis, cat_state, coherent_state, kron, kron_vec, outer, CVector, DensityMatrix, Dims, ParitySign, SpaceDims,
    thermal_density,
};
use crate::scalar::Scalar;

/// Transmon outcome that heralds the even cat.
pub const EVEN_CAT_OUTCOME: usize = 1;

/// Branches with less probability than this cannot be conditioned on.
pub const NULL_BRANCH_LIMIT: f64 = 1.0e-12;

/// Names of the columns recorded by [`run_protocol`], in order.
pub const TRAJECTORY_COLUMNS: [&str; 7] = ["E_N", "S", "F_even", "purity", "n_magnon", "n_qubit", "leak2"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Outcome {
    Project0,
    Project1,
    Both,
}

impl Outcome {
    fn levels(self) -> &'static [usize] {
        match self {
            Outcome::Project0 => &[0],
            Outcome::Project1 => &[1],
            Outcome::Both => &[0, 1],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProtocolConfig<T> {
    pub device: DeviceParams<T>,
    /// Reduced ac flux amplitude, radians.
    pub phi_ac: T,
    /// Magnon-drive detuning `f_m - f_ac`, MHz.
    pub delta: T,
    /// us
    pub t_final: T,
    /// us
    pub dt: T,
    pub record_every: usize,
    pub dims: SpaceDims,
    /// K
    pub temperature: T,
    /// us
    pub t1: T,
    /// us
    pub t2: T,
    pub dephasing: Dephasing,
    pub outcome: Outcome,
    /// Adds the constant magnon drive `-(g_rp / delta_zpf^2)(m + m^dagger)`.
    pub magnon_drive: bool,
    /// Overrides the coupling derived from `phi_ac` when set, MHz.
    pub g_tilde_override: Option<T>,
    /// Also record the fidelity to the ideal joint Bell-cat state (`F_bell`).
    pub track_bell_fidelity: bool,
    pub snapshot_times: Vec<T>,
}

impl<T: Scalar> ProtocolConfig<T> {
    /// Full-size run: 3 transmon and 140 magnon levels, 3 us at 1 ns steps,
    /// `phi_ac = pi/10` on resonance, 5 mK and `T1 = T2 = 20 us`.
    pub fn paper() -> Self {
        Self {
            device: DeviceParams::reference(),
            phi_ac: T::PI() / T::lit(10.0),
            delta: T::zero(),
            t_final: T::lit(3.0),
            dt: T::lit(1.0e-3),
            record_every: 100,
            dims: SpaceDims { qubit: 3, magnon: 140 },
            temperature: T::lit(5.0e-3),
            t1: T::lit(20.0),
            t2: T::lit(20.0),
            dephasing: Dephasing::Literal,
            outcome: Outcome::Both,
            magnon_drive: false,
            g_tilde_override: None,
            track_bell_fidelity: false,
            snapshot_times: Vec::new(),
        }
    }

    /// Reduced run: 60 magnon levels, 1.2 us.
    pub fn ci() -> Self {
        Self { dims: SpaceDims { qubit: 3, magnon: 60 }, t_final: T::lit(1.2), ..Self::paper() }
    }

    /// No magnon damping, zero temperature, no transmon decay.
    pub fn dissipationless(mut self) -> Self {
        self.device.alpha_g = T::zero();
        self.temperature = T::zero();
        self.t1 = T::infinity();
        self.t2 = T::infinity();
        self
    }

    pub fn g_tilde(&self) -> T {
        self.g_tilde_override.unwrap_or_else(|| modulated_grp(&self.device, self.phi_ac))
    }

    pub fn n_th(&self) -> T {
        thermal_occupation(&self.device.constants, self.device.f_m, self.temperature)
    }

    pub fn noise(&self) -> NoiseConfig<T> {
        let mut noise = NoiseConfig::from_device(&self.device, self.temperature, self.t1, self.t2);
        noise.dephasing = self.dephasing;
        noise
    }

    pub fn model(&self) -> Result<HamiltonianModel<T>> {
        let mut model = HamiltonianModel::new(self.dims, self.delta, self.g_tilde(), self.device.ec * T::lit(1.0e3));
        if self.magnon_drive {
            model.magnon_drive = crate::device::magnon_displacement_drive(&self.device)?;
        }
        Ok(model)
    }

    pub fn validate(&self) -> Result<()> {
        self.device.validate()?;
        SpaceDims::new(self.dims.qubit, self.dims.magnon)?;
        if !(self.temperature.is_finite() && self.temperature >= T::zero()) {
            return Err(invalid("T", "temperature must be non-negative"));
        }
        if !self.phi_ac.is_finite() || !self.delta.is_finite() {
            return Err(invalid("phi_ac/delta", "must be finite"));
        }
        self.noise().validate()
    }
}

/// Closed-form displacement and phase of the dissipationless evolution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalyticCat<T> {
    pub beta: Complex<T>,
    pub theta: T,
}

/// `beta(t) = (g/delta)(e^{-i delta t} - 1)`, `theta(t) = (g/delta)^2 (delta t - sin delta t)`
/// with `g`, `delta` in MHz (converted to rad/us) and `t` in us. Evaluated in
/// a form that is smooth through `delta = 0`, where `beta = -i g t`.
pub fn analytic_beta_theta<T: Scalar>(g_tilde: T, delta: T, t: T) -> AnalyticCat<T> {
    let g = T::TAU() * g_tilde;
    let x = T::TAU() * delta * t;
    let half = x / T::lit(2.0);
    // (e^{-ix} - 1)/x = -i e^{-ix/2} sinc(x/2)
    let sinc = if half.abs() < T::lit(1e-4) { T::one() - half * half / T::lit(6.0) } else { half.sin() / half };
    let beta = Complex::new(T::zero(), -g * t * sinc) * Complex::from_polar(T::one(), -half);
    // (x - sin x) / x^2
    let shape = if x.abs() < T::lit(1e-2) {
        let x2 = x * x;
        x / T::lit(6.0) * (T::one() - x2 / T::lit(20.0) + x2 * x2 / T::lit(840.0))
    } else {
        (x - x.sin()) / (x * x)
    };
    AnalyticCat { beta, theta: g * g * t * t * shape }
}

/// `R_y(angle)` on the transmon levels `{0, 1}` of a composite state.
pub fn qubit_rotation_y<T: Scalar>(rho: &DensityMatrix<T>, angle: T) -> Result<DensityMatrix<T>> {
    let dims = rho.dims().composite()?;
    let (dq, dm) = (dims.qubit, dims.magnon);
    let (s, c) = (angle / T::lit(2.0)).sin_cos();
    let mut u = Array2::from_elem((dq, dq), T::zero());
    for k in 2..dq {
        u[[k, k]] = T::one();
    }
    u[[0, 0]] = c;
    u[[0, 1]] = -s;
    u[[1, 0]] = s;
    u[[1, 1]] = c;
    let m = rho.matrix();
    let zero = Complex::new(T::zero(), T::zero());
    let mut out = Array2::from_elem((dims.total(), dims.total()), zero);
    for a in 0..dq {
        for d in 0..dq {
            for b in 0..dq {
                for cc in 0..dq {
                    let w = u[[a, b]] * u[[d, cc]];
                    if w == T::zero() {
                        continue;
                    }
                    for i in 0..dm {
                        for j in 0..dm {
                            out[[a * dm + i, d * dm + j]] += m[[b * dm + i, cc * dm + j]] * w;
                        }
                    }
                }
            }
        }
    }
    DensityMatrix::from_raw(Dims::Composite(dims), out)
}

/// `(|0>_q |0>_m + e^{i theta} |1>_q |beta>_m) / sqrt 2`, which equals
/// `[|+>(|0> + e^{i theta}|beta>) + |->(|0> - e^{i theta}|beta>)] / 2`.
pub fn ideal_bell_cat<T: Scalar>(cat: &AnalyticCat<T>, dims: SpaceDims) -> CVector<T> {
    let r = T::FRAC_1_SQRT_2();
    let coherent = coherent_state(cat.beta, dims.magnon);
    let phase = Complex::from_polar(r, cat.theta);
    let mut v = kron_vec(&basis(dims.qubit, 1), &coherent.mapv(|z| z * phase));
    v[dims.index(0, 0)] += Complex::new(r, T::zero());
    v
}

/// Target cat `|0> +- e^{i theta}|beta>` on the magnon space.
pub fn ideal_cat<T: Scalar>(cat: &AnalyticCat<T>, parity: ParitySign, dims: SpaceDims) -> Result<CVector<T>> {
    cat_state(cat.beta, cat.theta, parity, dims.magnon)
}

/// Probability of transmon outcome `outcome` and the normalised magnon state
/// left behind.
pub fn conditional_projection<T: Scalar>(rho: &DensityMatrix<T>, outcome: usize) -> Result<(T, DensityMatrix<T>)> {
    let dims = rho.dims().composite()?;
    if outcome >= dims.qubit {
        return Err(invalid("outcome", format!("transmon has only {} levels", dims.qubit)));
    }
    let dm = dims.magnon;
    let m = rho.matrix();
    let block = Array2::from_shape_fn((dm, dm), |(i, j)| m[[dims.index(outcome, i), dims.index(outcome, j)]]);
    let p: T = block.diag().iter().map(|z| z.re).sum();
    if !(p >= T::lit(NULL_BRANCH_LIMIT)) {
        return Err(Error::NullBranch { outcome, probability: p.as_f64() });
    }
    let state = DensityMatrix::from_raw(Dims::Single(dm), block.mapv(|z| z / p))?;
    Ok((p, state))
}

/// Population of each transmon level.
pub fn outcome_probabilities<T: Scalar>(rho: &DensityMatrix<T>) -> Result<Vec<T>> {
    rho.qubit_populations()
}

/// `|tr(rho_{m|1} m)|^2` of the magnon state conditioned on transmon `|1>`.
pub fn conditional_cat_size<T: Scalar>(rho: &DensityMatrix<T>) -> Result<T> {
    let dims = rho.dims().composite()?;
    let m = rho.matrix();
    let p: T = (0..dims.magnon).map(|k| m[[dims.index(1, k), dims.index(1, k)]].re).sum();
    if !(p >= T::lit(NULL_BRANCH_LIMIT)) {
        return Ok(T::zero());
    }
    // tr(rho m) = sum_k sqrt(k+1) rho_{k+1, k}
    let amp: Complex<T> = (0..dims.magnon - 1)
        .map(|k| m[[dims.index(1, k + 1), dims.index(1, k)]] * T::from_usize_lossy(k + 1).sqrt())
        .sum();
    Ok((amp / p).norm_sqr())
}

/// Fidelity of the even-cat branch heralded at time `t` if the protocol were
/// concluded then, against the analytic target of that time.
pub fn even_cat_fidelity<T: Scalar>(rho: &DensityMatrix<T>, cat: &AnalyticCat<T>) -> Result<T> {
    let dims = rho.dims().composite()?;
    let rotated = qubit_rotation_y(rho, T::FRAC_PI_2())?;
    match conditional_projection(&rotated, EVEN_CAT_OUTCOME) {
        Ok((_, magnon)) => fidelity_pure(&magnon, &ideal_cat(cat, ParitySign::Even, dims)?),
        Err(Error::NullBranch { .. }) => Ok(T::zero()),
        Err(e) => Err(e),
    }
}

#[derive(Debug, Clone)]
pub struct ConditionalState<T> {
    pub outcome: usize,
    pub probability: T,
    /// `None` when the branch has negligible probability.
    pub state: Option<DensityMatrix<T>>,
}

#[derive(Debug, Clone)]
pub struct ProtocolRun<T> {
    pub trajectory: Trajectory<T>,
    pub conditional: Vec<ConditionalState<T>>,
    /// Transmon level populations after the second gate; sums to 1.
    pub outcome_probabilities: Vec<T>,
    /// Analytic cat at the final time.
    pub target: AnalyticCat<T>,
    pub g_tilde: T,
    pub n_th: T,
}

impl<T: Scalar> ProtocolRun<T> {
    pub fn even_cat(&self) -> Option<&DensityMatrix<T>> {
        self.conditional.iter().find(|c| c.outcome == EVEN_CAT_OUTCOME).and_then(|c| c.state.as_ref())
    }
}

/// `|0><0|_q (x) thermal(n_th)`.
pub fn initial_state<T: Scalar>(dims: SpaceDims, n_th: T) -> Result<DensityMatrix<T>> {
    let thermal = thermal_density(n_th, dims.magnon)?;
    let ground = basis::<T>(dims.qubit, 0);
    let m = kron(&outer(&ground, &ground), thermal.matrix());
    DensityMatrix::from_raw(Dims::Composite(dims), m)
}

/// Runs the whole protocol, recording [`TRAJECTORY_COLUMNS`] along the
/// modulated evolution and returning the heralded magnon states.
pub fn run_protocol<T: Scalar>(config: &ProtocolConfig<T>) -> Result<ProtocolRun<T>> {
    config.validate()?;
    let dims = config.dims;
    let model = config.model()?;
    let noise = config.noise();
    let g_tilde = model.g_tilde;
    let delta = config.delta;

    let rho0 = qubit_rotation_y(&initial_state(dims, noise.n_th)?, T::FRAC_PI_2())?;

    let entanglement = FnObservable::new("E_N", |_t: T, rho: &DensityMatrix<T>| log_negativity(rho));
    let size = FnObservable::new("S", |_t: T, rho: &DensityMatrix<T>| conditional_cat_size(rho));
    let fidelity = FnObservable::new("F_even", move |t: T, rho: &DensityMatrix<T>| {
        even_cat_fidelity(rho, &analytic_beta_theta(g_tilde, delta, t))
    });
    let bell = FnObservable::new("F_bell", move |t: T, rho: &DensityMatrix<T>| {
        fidelity_pure(rho, &ideal_bell_cat(&analytic_beta_theta(g_tilde, delta, t), dims))
    });
    let leak = QubitLevel { level: 2, name: "leak2".into() };
    let mut observers: Vec<&dyn Observable<T>> =
        vec![&entanglement, &size, &fidelity, &Purity, &MagnonNumber, &QubitNumber, &leak];
    if config.track_bell_fidelity {
        observers.push(&bell);
    }

    let opts = EvolveOptions {
        t_final: config.t_final,
        dt: config.dt,
        record_every: config.record_every,
        snapshot_times: config.snapshot_times.clone(),
    };
    let trajectory = evolve(&rho0, &model, &noise, &opts, &observers)?;

    let measured = qubit_rotation_y(&trajectory.final_state, T::FRAC_PI_2())?;
    let probabilities = outcome_probabilities(&measured)?;
    let mut conditional = Vec::new();
    for &k in config.outcome.levels() {
        match conditional_projection(&measured, k) {
            Ok((p, state)) => conditional.push(ConditionalState { outcome: k, probability: p, state: Some(state) }),
            Err(Error::NullBranch { .. }) if config.outcome == Outcome::Both => {
                conditional.push(ConditionalState { outcome: k, probability: probabilities[k], state: None })
            }
            Err(e) => return Err(e),
        }
    }
    let t_end = trajectory.times.last().copied().unwrap_or_else(T::zero);
    Ok(ProtocolRun {
        trajectory,
        conditional,
        outcome_probabilities: probabilities,
        target: analytic_beta_theta(g_tilde, delta, t_end),
        g_tilde,
        n_th: noise.n_th,
    })
}
