//! Pulse-level simulation, schedule compilation and device feasibility
//! analysis for cavity-mediated n-qubit controlled-U gates on Lambda-type
//! three-level systems.
//!
//! A single cavity photon, created through the first control system, acts
//! as a bus: control systems hand the photon down the line, the target
//! undergoes an arbitrary single-qubit rotation conditioned on the photon,
//! and the photon is retrieved so the cavity ends in vacuum. The crate
//! provides:
//!
//! - [`hilbert`]: states and operators on n qutrits (x) one truncated
//!   cavity mode;
//! - [`propagators`]: exact closed-form time evolutions for the three
//!   elementary interactions, plus a matrix-exponential oracle;
//! - [`schedule`] / [`compiler`]: compilation of a controlled-U gate into
//!   its 2n+11-step pulse schedule, with a text serialization;
//! - [`verifier`]: the ideal gate matrix and distance measures;
//! - [`device`]: coupling constants, timing budgets, gate-count
//!   comparisons and feasibility checks from device parameter files.
//!
//! ```
//! use cugate::prelude::*;
//!
//! let params = GateParams::new(std::f64::consts::FRAC_PI_2, 0.0, std::f64::consts::PI, std::f64::consts::PI);
//! let couplings = CouplingTable::uniform_squid(2, 5.8e9);
//! let report = verify_controlled_u(2, &params, &couplings, Mode::Squid, 2, 1e-9).unwrap();
//! assert!(report.pass);
//! ```

// Validation guards use `!(x > 0.0)` so NaN is rejected along with
// non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod compiler;
pub mod device;
pub mod error;
pub mod expm;
pub mod hilbert;
pub mod propagators;
pub mod schedule;
pub mod verifier;

pub use error::{Error, Result};

/// Commonly used items in one import.
pub mod prelude {
    pub use crate::compiler::{compile_controlled_u, replay_trace, step_matrices};
    pub use crate::device::{CavityParams, DeviceParams, TimingParams};
    pub use crate::error::{Error, Result};
    pub use crate::hilbert::{HilbertLayout, OperatorMatrix, Site, StateVector};
    pub use crate::propagators::{DispersiveSpec, DriveSpec, PulseSpec, ResonantSpec, Transition};
    pub use crate::schedule::{CouplingTable, DispersivePair, GateParams, Mode, PulseOp, Schedule};
    pub use crate::verifier::{
        gate_distance, ideal_controlled_u, single_qubit_u, verify_controlled_u, IdealGate,
    };
}
