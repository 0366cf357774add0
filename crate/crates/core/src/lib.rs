//! Vibronic wavepacket dynamics on a grid, computed two ways: a split-operator FFT
//! propagator and a gate-level circuit emulator, plus spectra, shot-budget scans and
//! closed-form circuit resource assays.

pub mod circuits;
pub mod model;
pub mod resources;
pub mod signals;
pub mod soft;

pub use model::{initial_state, load_model, Convention, GridSpec, TimeGrid, VibronicModel, Wavepacket, HBAR};
