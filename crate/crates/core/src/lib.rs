//! Envelope propagation through a cascade of first-order all-pass delay
//! stages, the circuit analogue of slow and stopped light.
//!
//! The chain obeys the discretised envelope equation
//! `d/dt[(v_n + v_{n+1}) / 2] + (v_{n+1} - v_n) / T_n(t) = 0`, where the
//! per-stage delay `T` plays the role of `dx / v_g`. [`chain`] integrates it in
//! the time domain, [`oracle`] supplies analytic and spectral references,
//! [`metrics`] measures speeds and widths, [`scenarios`] holds the reference
//! experiments and [`config`]/[`run`] drive the command-line front end.

pub mod chain;
pub mod config;
pub mod error;
pub mod interp;
pub mod medium;
pub mod metrics;
pub mod oracle;
pub mod pulse;
pub mod run;
pub mod scenarios;
pub mod schedule;
pub mod signal;
pub mod spectrum;
pub mod transfer;
pub mod waveform;

pub use chain::{simulate_chain, step_stage, IntegratorConfig, StageState};
pub use error::{Error, Result};
pub use medium::{eit_velocity_estimate, group_velocity, polarization_envelope, MediumParams};
pub use pulse::{gaussian_input, PulseKind, PulseSpec, SampledWaveform};
pub use schedule::{delay_from_rc, Breakpoint, DelaySchedule};
pub use signal::{ChainRecord, StageSignal};
pub use transfer::{stage_group_delay, transfer_function};
