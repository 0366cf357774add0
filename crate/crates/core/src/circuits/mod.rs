//! Gate-level circuits for the split-operator scheme and a statevector emulator.

pub mod algorithms;
pub mod builders;
mod circuit;
pub mod emulator;
mod gate;
mod layout;

pub use circuit::{commutes, count_kind, Circuit};
pub use gate::{decompose_ccrx, Control, Gate, GateKind};
pub use layout::QubitLayout;

use crate::model::{Basis, GridSpec, TimeGrid, VibronicModel, Wavepacket};
use crate::signals::AutocorrSeries;
use crate::soft::{boundary_probabilities, SplitOrder, Trajectory};
use emulator::{apply, check_budget, zero_state, EmulatorError};

/// Wavepacket view of the system register.
pub fn to_wavepacket(amps: &[num_complex::Complex64], n_modes: usize, n_qubits: usize) -> Wavepacket {
    Wavepacket { n_modes, n_qubits, amplitudes: amps.to_vec(), basis: Basis::Position }
}

/// Prepare the initial state with the state-preparation circuit and evolve it step by step
/// with the step circuit, recording the same observables as the reference propagator.
pub fn propagate(
    model: &VibronicModel,
    grid: &GridSpec,
    time: &TimeGrid,
    split: SplitOrder,
    budget_bytes: u128,
) -> Result<Trajectory, EmulatorError> {
    let layout = QubitLayout::system(model.n_modes(), grid.n_qubits);
    check_budget(layout.total(), budget_bytes)?;
    let mut v = zero_state(layout.total());
    apply(&builders::build_initial_state(model, grid, &layout), &mut v)?;
    let psi0 = to_wavepacket(&v, model.n_modes(), grid.n_qubits);
    let step = builders::build_timestep(model, grid, &layout, time.dt, split);
    let qft = builders::build_qft_all(&layout, false);
    let iqft = builders::build_qft_all(&layout, true);
    let momentum = split == SplitOrder::KineticFirst;
    if momentum {
        apply(&qft, &mut v)?;
    }
    let mut times = vec![];
    let mut values = vec![];
    let mut populations = vec![];
    let mut boundary = vec![];
    let to_position = |v: &[num_complex::Complex64]| -> Result<Wavepacket, EmulatorError> {
        let mut pos = v.to_vec();
        if momentum {
            apply(&iqft, &mut pos)?;
        }
        Ok(to_wavepacket(&pos, model.n_modes(), grid.n_qubits))
    };
    for k in 0..=time.n_steps {
        if k > 0 {
            apply(&step, &mut v)?;
        }
        if k % time.sample_stride == 0 {
            let psi = to_position(&v)?;
            times.push(k as f64 * time.dt);
            values.push(psi0.overlap(&psi));
            populations.push([psi.population(0), psi.population(1)]);
            boundary.push(boundary_probabilities(&psi));
        }
    }
    let last = to_position(&v)?;
    Ok(Trajectory { autocorr: AutocorrSeries { times, values }, populations, boundary, final_state: last })
}
