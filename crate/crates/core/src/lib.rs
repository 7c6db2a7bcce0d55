//! Classical capacity of a two-slot optical channel whose polarization noise
//! is correlated between consecutive temporal slots.
//!
//! Modules, bottom-up:
//! - [`qstate`]: dense complex matrices, density operators, entropy, Werner states.
//! - [`group`]: U(2) elements, Haar sampling, `D^0`, `D^{1/2}`, `D^1`.
//! - [`channel`]: the noise channel with analytic and Monte Carlo backends.
//! - [`capacity`]: per-block Holevo quantities and their optimal combination.
//! - [`measurement`]: singlet/triplet readout, mutual information, shot simulation.
//! - [`protocol`]: rate of the multi-slot train protocol.
//! - [`verify`]: self-check suites used by the `verify` command.

pub mod capacity;
pub mod channel;
pub mod error;
pub mod group;
pub mod info;
pub mod measurement;
pub mod protocol;
pub mod qstate;
pub mod verify;

pub use error::{Error, Result};
