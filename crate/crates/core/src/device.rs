//! Closed-form device physics: SQUID tuning, transmon frequency and
//! zero-point amplitudes, stray-flux transduction, the qubit-magnon
//! couplings and their higher-order corrections, the critical distance and
//! the thermal magnon occupation.
//!
//! Energies and rates use ordinary-frequency units: energies are `E/h` in GHz,
//! couplings are in MHz. Lengths are SI metres.

use crate::error::{invalid, Error, Result};
use crate::scalar::Scalar;

/// Minimum `E_J S / E_C` for the transmon (Duffing) expansion to be trusted.
pub const TRANSMON_REGIME_RATIO: f64 = 20.0;

/// Above this the flux per magnon quantum is no longer a small parameter.
pub const WEAK_FLUX_LIMIT: f64 = 1.0e-2;

/// Above this the drive amplitude `phi_ac` is no longer small.
pub const WEAK_DRIVE_LIMIT: f64 = 0.5;

/// `R_SQUID / d` needed for the large-loop (far-field) geometry factors.
pub const FAR_FIELD_RATIO: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants<T> {
    /// Vacuum permeability, T m / A.
    pub mu0: T,
    /// Magnetic flux quantum h / 2e, Wb.
    pub phi0: T,
    /// Reduced Planck constant, J s.
    pub hbar: T,
    /// Planck constant, J s. Always `2 pi hbar`.
    pub h: T,
    /// Boltzmann constant, J / K.
    pub kb: T,
    /// Modulus of the gyromagnetic ratio, rad / (s T).
    pub gamma0: T,
}

impl<T: Scalar> PhysicalConstants<T> {
    pub fn codata() -> Self {
        let hbar = T::lit(1.054_571_817e-34);
        let h = T::TAU() * hbar;
        let e = T::lit(1.602_176_634e-19);
        Self {
            mu0: T::lit(1.256_637_062_12e-6),
            phi0: h / (T::lit(2.0) * e),
            hbar,
            h,
            kb: T::lit(1.380_649e-23),
            gamma0: T::TAU() * T::lit(28.0e9),
        }
    }
}

impl<T: Scalar> Default for PhysicalConstants<T> {
    fn default() -> Self {
        Self::codata()
    }
}

/// Dimensionless stray-field integration factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeometryFactors<T> {
    pub ix: T,
    pub iy: T,
    pub iz: T,
}

impl<T: Scalar> Default for GeometryFactors<T> {
    /// Large loop, sphere edge at one radius: `I_x = I_z = -1`, `I_y = 0`.
    fn default() -> Self {
        Self { ix: -T::one(), iy: T::zero(), iz: -T::one() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeviceParams<T> {
    /// Maximum Josephson energy `E_J^max / h`, GHz.
    pub ej_max: T,
    /// Charging energy `E_C / h`, GHz.
    pub ec: T,
    /// SQUID asymmetry, in [0, 1].
    pub a_j: T,
    /// Reduced flux bias `pi Phi_b / Phi_0`, radians.
    pub phi_b: T,
    /// Junction capacitance asymmetry `C_delta / C_sigma`, in [-1, 1].
    pub cap_asym: T,
    /// YIG sphere radius, m.
    pub r_yig: T,
    /// In-plane distance from the sphere centre to the loop edge, m.
    pub d: T,
    /// SQUID loop radius, m. Only used for the far-field diagnostic.
    pub r_squid: T,
    /// Total number of spins.
    pub n_spins: T,
    pub geometry: GeometryFactors<T>,
    /// Kittel mode frequency, GHz.
    pub f_m: T,
    /// Gilbert damping.
    pub alpha_g: T,
    /// Anisotropy field, T.
    pub b_ani: T,
    pub constants: PhysicalConstants<T>,
}

impl<T: Scalar> DeviceParams<T> {
    /// The reference device: 50 GHz / 200 MHz transmon with `a_J = 0.6`
    /// biased at half a flux quantum, 3 um YIG sphere 3 um from the loop,
    /// 500 MHz Kittel mode.
    pub fn reference() -> Self {
        Self {
            ej_max: T::lit(50.0),
            ec: T::lit(0.2),
            a_j: T::lit(0.6),
            phi_b: T::FRAC_PI_2(),
            cap_asym: T::zero(),
            r_yig: T::lit(3.0e-6),
            d: T::lit(3.0e-6),
            r_squid: T::lit(10.0e-6),
            n_spins: T::lit(2.4e12),
            geometry: GeometryFactors::default(),
            f_m: T::lit(0.5),
            alpha_g: T::lit(1.0e-5),
            b_ani: T::lit(-2.5e-3),
            constants: PhysicalConstants::codata(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let nonneg = |v: T| v.is_finite() && v >= T::zero();
        if !(self.ej_max.is_finite() && self.ej_max > T::zero()) {
            return Err(invalid("EJ_max", "must be positive"));
        }
        if !(self.ec.is_finite() && self.ec > T::zero()) {
            return Err(invalid("EC", "must be positive"));
        }
        if !(nonneg(self.a_j) && self.a_j <= T::one()) {
            return Err(invalid("aJ", "must lie in [0, 1]"));
        }
        if !(self.cap_asym.is_finite() && self.cap_asym.abs() <= T::one()) {
            return Err(invalid("cap_asym", "must lie in [-1, 1]"));
        }
        if !self.phi_b.is_finite() {
            return Err(invalid("phi_b", "must be finite"));
        }
        if !(self.r_yig.is_finite() && self.r_yig > T::zero()) {
            return Err(invalid("R_yig", "must be positive"));
        }
        if !(self.d.is_finite() && self.d > T::zero()) {
            return Err(invalid("d", "must be positive"));
        }
        if !(self.n_spins.is_finite() && self.n_spins >= T::one()) {
            return Err(invalid("Ns", "must be at least 1"));
        }
        if !(self.f_m.is_finite() && self.f_m > T::zero()) {
            return Err(invalid("f_m", "must be positive"));
        }
        if !nonneg(self.alpha_g) {
            return Err(invalid("alphaG", "must be non-negative"));
        }
        Ok(())
    }

    /// Distance from the sphere centre to the nearest loop point.
    pub fn d_min(&self) -> T {
        self.r_yig.hypot(self.d)
    }

    pub fn squid_factor(&self) -> T {
        squid_factor(self.phi_b, self.a_j)
    }

    /// `E_J^max S(phi_b) / E_C`.
    pub fn regime_ratio(&self) -> T {
        self.ej_max * self.squid_factor() / self.ec
    }

    pub fn transmon_regime_ok(&self) -> bool {
        self.regime_ratio() >= T::lit(TRANSMON_REGIME_RATIO)
    }

    pub fn far_field_ok(&self) -> bool {
        self.r_squid >= T::lit(FAR_FIELD_RATIO) * self.d
    }

    /// Non-zero `S(phi_b)`, or the degenerate-SQUID error.
    fn checked_squid_factor(&self) -> Result<T> {
        let s = self.squid_factor();
        if s <= T::epsilon() * T::lit(16.0) {
            return Err(Error::DegenerateSquid(s.as_f64()));
        }
        Ok(s)
    }
}

/// `(sin x, cos x)` with exact zeros when `x` is a multiple of `pi/2` up to a
/// few ulps, so that analytically forced zeros stay exact.
pub fn sin_cos_snapped<T: Scalar>(x: T) -> (T, T) {
    let quarter = x / T::FRAC_PI_2();
    let nearest = quarter.round();
    let slack = T::epsilon() * T::lit(8.0) * nearest.abs().max(T::one());
    if (quarter - nearest).abs() <= slack {
        let k = nearest.to_i64().unwrap_or(0).rem_euclid(4);
        let (s, c) = match k {
            0 => (0.0, 1.0),
            1 => (1.0, 0.0),
            2 => (0.0, -1.0),
            _ => (-1.0, 0.0),
        };
        return (T::lit(s), T::lit(c));
    }
    x.sin_cos()
}

/// SQUID tuning factor `sqrt(cos^2 phi_b + a_J^2 sin^2 phi_b)`, in `[a_J, 1]`.
pub fn squid_factor<T: Scalar>(phi_b: T, a_j: T) -> T {
    let (s, c) = sin_cos_snapped(phi_b);
    (c * c + a_j * a_j * s * s).sqrt()
}

/// Transmon transition frequency `sqrt(8 E_C E_J S) - E_C`, GHz.
pub fn transmon_frequency<T: Scalar>(p: &DeviceParams<T>) -> Result<T> {
    let s = p.checked_squid_factor()?;
    Ok((T::lit(8.0) * p.ec * p.ej_max * s).sqrt() - p.ec)
}

/// Charge and phase zero-point amplitudes `(N_zpf, delta_zpf)`.
pub fn zpf_amplitudes<T: Scalar>(p: &DeviceParams<T>) -> Result<(T, T)> {
    let s = p.checked_squid_factor()?;
    let ej = p.ej_max * s;
    let n_zpf = (ej / (T::lit(32.0) * p.ec)).powf(T::lit(0.25));
    let delta_zpf = (T::lit(2.0) * p.ec / ej).powf(T::lit(0.25));
    Ok((n_zpf, delta_zpf))
}

/// Transverse magnetic-moment zero-point amplitude `hbar gamma0 sqrt(N_S/2)`, J/T.
pub fn mu_zpf<T: Scalar>(p: &DeviceParams<T>) -> T {
    let c = &p.constants;
    c.hbar * c.gamma0 * (p.n_spins / T::lit(2.0)).sqrt()
}

/// Magnitude of the reduced flux induced per unit of `(m + m^dagger)`.
pub fn flux_per_quantum<T: Scalar>(p: &DeviceParams<T>) -> T {
    let c = &p.constants;
    // mu0 * mu_zpf / phi0 first, keeps f32 away from underflow
    (c.mu0 * (mu_zpf(p) / c.phi0)) * p.geometry.ix.abs() / (T::lit(4.0) * p.d_min())
}

/// `sqrt(2 E_C / (E_J S)) / 2`, the relative size of both higher-order corrections.
fn correction_factor<T: Scalar>(p: &DeviceParams<T>, s: T) -> T {
    (T::lit(2.0) * p.ec / (p.ej_max * s)).sqrt() / T::lit(2.0)
}

/// Exchange coupling `J`, MHz. Includes the junction-capacitance asymmetry
/// and, optionally, the `J'` correction.
pub fn coupling_j<T: Scalar>(p: &DeviceParams<T>, include_correction: bool) -> Result<T> {
    let s = p.checked_squid_factor()?;
    let energy = (T::lit(2.0) * p.ec * p.ej_max.powi(3)).powf(T::lit(0.25));
    let asym = p.a_j - p.cap_asym * s * s;
    let j = flux_per_quantum(p) * asym * energy / s.powf(T::lit(1.25)) * T::lit(1.0e3);
    if include_correction {
        Ok(j * (T::one() - correction_factor(p, s)))
    } else {
        Ok(j)
    }
}

/// Radiation-pressure coupling `g_rp`, MHz, signed. Optionally with `g'_rp`.
pub fn coupling_grp<T: Scalar>(p: &DeviceParams<T>, include_correction: bool) -> Result<T> {
    let s = p.checked_squid_factor()?;
    let (sin_b, cos_b) = sin_cos_snapped(p.phi_b);
    let sin_2b = T::lit(2.0) * sin_b * cos_b;
    let plasma = (T::lit(8.0) * p.ej_max * p.ec).sqrt();
    let g = flux_per_quantum(p) / T::lit(4.0) * plasma * (T::one() - p.a_j * p.a_j) * sin_2b
        / s.powf(T::lit(1.5))
        * T::lit(1.0e3);
    if include_correction {
        Ok(g * (T::one() - correction_factor(p, s)))
    } else {
        Ok(g)
    }
}

/// Parametrically enhanced coupling under a weak ac flux drive of reduced
/// amplitude `phi_ac` around zero bias, MHz. Independent of `p.phi_b`.
pub fn modulated_grp<T: Scalar>(p: &DeviceParams<T>, phi_ac: T) -> T {
    let plasma = (T::lit(8.0) * p.ej_max * p.ec).sqrt();
    flux_per_quantum(p) / T::lit(4.0) * phi_ac * plasma * T::lit(1.0e3)
}

/// Coefficient of the constant magnon drive `-(g_rp / delta_zpf^2)(m + m^dagger)`, MHz.
pub fn magnon_displacement_drive<T: Scalar>(p: &DeviceParams<T>) -> Result<T> {
    let (_, delta_zpf) = zpf_amplitudes(p)?;
    Ok(-coupling_grp(p, false)? / (delta_zpf * delta_zpf))
}

/// Closest sphere-to-wire distance before the stray field at the wire
/// reaches the critical field `bc` (T). `ms` in A/m, lengths in m.
pub fn critical_distance<T: Scalar>(constants: &PhysicalConstants<T>, bc: T, ms: T, r_yig: T, d_w: T) -> T {
    let ratio = T::lit(2.0) * constants.mu0 * ms / (T::lit(3.0) * bc);
    d_w / T::lit(2.0) + ratio.cbrt() * r_yig
}

/// Bose-Einstein occupation of a mode at `f` GHz and temperature `temp` K.
pub fn thermal_occupation<T: Scalar>(constants: &PhysicalConstants<T>, f: T, temp: T) -> T {
    if temp <= T::zero() {
        return T::zero();
    }
    // h f / kB T with f in GHz: (h / kB) * 1e9 is ~0.048 K/GHz
    let x = (constants.h / constants.kb) * T::lit(1.0e9) * f / temp;
    let denom = x.exp_m1();
    if denom.is_infinite() {
        T::zero()
    } else {
        denom.recip()
    }
}

/// All derived rates for one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingSet<T> {
    /// MHz
    pub j: T,
    /// MHz
    pub j_prime: T,
    /// MHz
    pub g_rp: T,
    /// MHz
    pub g_rp_prime: T,
    /// MHz, for the drive amplitude given to [`CouplingSet::evaluate`].
    pub g_tilde: T,
    pub phi_zpf: T,
    /// J/T
    pub mu_zpf: T,
    /// GHz
    pub omega_q: T,
    pub delta_zpf: T,
    pub n_zpf: T,
    pub transmon_regime_ok: bool,
    pub weak_flux_ok: bool,
    pub weak_drive_ok: bool,
    pub far_field_ok: bool,
}

impl<T: Scalar> CouplingSet<T> {
    pub fn evaluate(p: &DeviceParams<T>, phi_ac: T) -> Result<Self> {
        p.validate()?;
        let s = p.checked_squid_factor()?;
        let (n_zpf, delta_zpf) = zpf_amplitudes(p)?;
        let j = coupling_j(p, false)?;
        let g_rp = coupling_grp(p, false)?;
        let corr = correction_factor(p, s);
        let phi_zpf = flux_per_quantum(p);
        Ok(Self {
            j,
            j_prime: -j * corr,
            g_rp,
            g_rp_prime: -g_rp * corr,
            g_tilde: modulated_grp(p, phi_ac),
            phi_zpf,
            mu_zpf: mu_zpf(p),
            omega_q: transmon_frequency(p)?,
            delta_zpf,
            n_zpf,
            transmon_regime_ok: p.transmon_regime_ok(),
            weak_flux_ok: phi_zpf <= T::lit(WEAK_FLUX_LIMIT),
            weak_drive_ok: phi_ac.abs() <= T::lit(WEAK_DRIVE_LIMIT),
            far_field_ok: p.far_field_ok(),
        })
    }

    pub fn all_valid(&self) -> bool {
        self.transmon_regime_ok && self.weak_flux_ok && self.weak_drive_ok && self.far_field_ok
    }
}

impl<T: Scalar> Default for DeviceParams<T> {
    fn default() -> Self {
        Self::reference()
    }
}
