//! Simulation library for a transmon qubit flux-coupled to the Kittel mode
//! of a YIG sphere.
//!
//! * [`device`]: coupling rates and other closed-form device quantities.
//! * [`hilbert`]: truncated bosonic operators, states, partial trace/transpose.
//! * [`dynamics`]: rotating-frame Hamiltonian and Lindblad RK4 integration.
//! * [`protocol`]: the analog cat-state preparation protocol.
//! * [`analysis`]: logarithmic negativity, fidelity, cat size, Wigner function.
//!
//! All numerics are generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the double-precision types used by the command line tool.

pub mod analysis;
pub mod device;
pub mod dynamics;
pub mod error;
pub mod hilbert;
pub mod protocol;
pub mod scalar;
mod sparse;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub use num_complex::Complex;

pub type C64 = Complex<f64>;
pub type C32 = Complex<f32>;

pub type DeviceParams = device::DeviceParams<f64>;
pub type CouplingSet = device::CouplingSet<f64>;
pub type DensityMatrix = hilbert::DensityMatrix<f64>;
pub type CMatrix = hilbert::CMatrix<f64>;
pub type CVector = hilbert::CVector<f64>;
pub type NoiseConfig = dynamics::NoiseConfig<f64>;
pub type HamiltonianModel = dynamics::HamiltonianModel<f64>;
pub type Trajectory = dynamics::Trajectory<f64>;
pub type ProtocolConfig = protocol::ProtocolConfig<f64>;
pub type ProtocolRun = protocol::ProtocolRun<f64>;
pub type AnalyticCat = protocol::AnalyticCat<f64>;
pub type WignerGrid = analysis::WignerGrid<f64>;
pub type GridSpec = analysis::GridSpec<f64>;

pub type DeviceParamsF32 = device::DeviceParams<f32>;
pub type DensityMatrixF32 = hilbert::DensityMatrix<f32>;
pub type ProtocolConfigF32 = protocol::ProtocolConfig<f32>;
