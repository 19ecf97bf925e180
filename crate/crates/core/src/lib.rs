//! Secret-key-rate models for quantum key distribution.
//!
//! This crate collects the closed-form key-rate formulas used to compare the
//! main QKD platforms on equal footing, together with the channel and source
//! models that feed them:
//!
//! * [`math`] — entropies, Poisson statistics and loss models shared by all
//!   rate formulas.
//! * [`sources`] — photon-number statistics for single-photon, attenuated
//!   laser and heralded-pair sources, plus repetition-rate limits.
//! * [`channel`] — expected detection and error rates of the a-priori
//!   comparison channel (depolarization + dark counts).
//! * [`dv`] — BB84 secret-key rates: single photon, weak coherent pulses with
//!   and without decoy states, entanglement based, and the calibrated-device
//!   upper bounds; SARG04 error mapping.
//! * [`cv`] — Gaussian coherent-state homodyne protocol under individual and
//!   collective attacks, with a symplectic-eigenvalue cross-check.
//! * [`dpr`] — distributed-phase-reference protocols (DPS/COW):
//!   beam-splitting and two-pulse attack families.
//! * [`qubit`] — unconditional single-qubit bounds for BB84 and six-state
//!   from Bell-diagonal states.
//! * [`repeater`] — two-link quantum-repeater rate model and the linear
//!   network cost model.
//! * [`sim`] — Monte Carlo BB84 simulator with Toeplitz-hashing privacy
//!   amplification, used as an empirical oracle for the analytic rates.
//! * [`presets`] — the two device parameter sets used for the platform
//!   comparison plots.
//!
//! All rate functions are pure and safe for unrestricted concurrent use; the
//! Monte Carlo simulator takes an explicit 64-bit seed and is reproducible.

pub mod channel;
pub mod cv;
pub mod dpr;
pub mod dv;
mod error;
pub mod math;
pub mod optimize;
pub mod presets;
pub mod qubit;
pub mod rate;
pub mod repeater;
pub mod sim;
pub mod sources;

pub use channel::{ExpectedStats, LinkParams};
pub use cv::{CvCovariance, CvState};
pub use dpr::DprParams;
pub use error::{Error, Result};
pub use qubit::BellDiagonalState;
pub use rate::{csiszar_korner_rate, EcModel, RateResult};
pub use repeater::{NetworkSpec, RepeaterParams};
pub use sim::{SimConfig, SimOutcome};
pub use sources::{PhotonStatistics, RepetitionLimits};
