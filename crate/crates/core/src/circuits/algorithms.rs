//! Hadamard test and canonical phase estimation on top of the step circuits.

use super::builders::build_qft;
use super::circuit::Circuit;
use super::emulator::{self, apply, apply_controlled, check_budget, EmulatorError};
use super::gate::{Control, Gate};
use super::layout::QubitLayout;
use crate::signals::multinomial;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use std::f64::consts::PI;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Part {
    Real,
    Imag,
}

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum AlgorithmError {
    #[error("layout has no {0}")]
    Layout(&'static str),
    #[error("evolution circuit touches qubit {0} outside the system register")]
    NotSystemOnly(usize),
    #[error("shots must be positive")]
    NoShots,
    #[error("time register needs at least one qubit")]
    NoTimeQubits,
    #[error(transparent)]
    Emulator(#[from] EmulatorError),
}

fn check_system_only(evolution: &Circuit, layout: &QubitLayout) -> Result<(), AlgorithmError> {
    let sys = layout.system_qubits();
    match evolution.gates().flat_map(|g| g.qubits()).find(|&q| q >= sys) {
        Some(q) => Err(AlgorithmError::NotSystemOnly(q)),
        None => Ok(()),
    }
}

/// H on the ancilla, ancilla-controlled evolution, S (imaginary part only), H.
pub fn build_hadamard_test(evolution: &Circuit, layout: &QubitLayout, part: Part) -> Result<Circuit, AlgorithmError> {
    let anc = layout.ancilla().ok_or(AlgorithmError::Layout("ancilla"))?;
    check_system_only(evolution, layout)?;
    let mut c = Circuit::new(layout.total());
    c.push(Gate::h(anc));
    c.append(&evolution.widened(layout.total()).controlled(Control::one(anc)));
    if part == Part::Imag {
        c.push(Gate::s(anc));
    }
    c.push(Gate::h(anc));
    Ok(c)
}

/// Embed a system state with all extra qubits in |0>.
pub fn embed(system: &[Complex64], layout: &QubitLayout) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << layout.total()];
    v[..system.len()].copy_from_slice(system);
    v
}

/// Exact probability of reading 0 on the ancilla.
pub fn ancilla_p0(test: &Circuit, layout: &QubitLayout, system: &[Complex64]) -> Result<f64, AlgorithmError> {
    let anc = layout.ancilla().ok_or(AlgorithmError::Layout("ancilla"))?;
    let mut v = embed(system, layout);
    apply(test, &mut v)?;
    Ok(1.0 - emulator::probability_one(&v, anc))
}

/// Exact ancilla probabilities (P0 real circuit, P0 imaginary circuit) after 0, stride,
/// 2·stride, ... applications of `step`, sharing the controlled prefix between sample times.
pub fn hadamard_scan(
    step: &Circuit,
    layout: &QubitLayout,
    system: &[Complex64],
    n_steps: usize,
    stride: usize,
) -> Result<Vec<(f64, f64)>, AlgorithmError> {
    let anc = layout.ancilla().ok_or(AlgorithmError::Layout("ancilla"))?;
    check_system_only(step, layout)?;
    let step = step.widened(layout.total());
    let mut v = embed(system, layout);
    emulator::apply_gate(&mut v, &Gate::h(anc), &[]);
    let finish = |v: &[Complex64]| {
        let mut re = v.to_vec();
        emulator::apply_gate(&mut re, &Gate::h(anc), &[]);
        let mut im = v.to_vec();
        emulator::apply_gate(&mut im, &Gate::s(anc), &[]);
        emulator::apply_gate(&mut im, &Gate::h(anc), &[]);
        (1.0 - emulator::probability_one(&re, anc), 1.0 - emulator::probability_one(&im, anc))
    };
    let mut out = vec![finish(&v)];
    for k in 1..=n_steps {
        apply_controlled(&step, &mut v, Control::one(anc))?;
        if k % stride == 0 {
            out.push(finish(&v));
        }
    }
    Ok(out)
}

/// A = (2 P0_re - 1) + i (1 - 2 P0_im).
pub fn autocorr_from_probabilities(p0_real: f64, p0_imag: f64) -> Complex64 {
    Complex64::new(2.0 * p0_real - 1.0, 1.0 - 2.0 * p0_imag)
}

/// Shot-based estimate of <ψ|U|ψ> from the two Hadamard-test circuits.
pub fn estimate_autocorr(
    evolution: &Circuit,
    layout: &QubitLayout,
    system: &[Complex64],
    shots: u64,
    seed: u64,
) -> Result<Complex64, AlgorithmError> {
    if shots == 0 {
        return Err(AlgorithmError::NoShots);
    }
    let p_re = ancilla_p0(&build_hadamard_test(evolution, layout, Part::Real)?, layout, system)?;
    let p_im = ancilla_p0(&build_hadamard_test(evolution, layout, Part::Imag)?, layout, system)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let c0 = Binomial::new(shots, p_re.clamp(0.0, 1.0)).unwrap().sample(&mut rng) as f64;
    let c1 = Binomial::new(shots, (1.0 - p_im).clamp(0.0, 1.0)).unwrap().sample(&mut rng) as f64;
    let n = shots as f64;
    Ok(Complex64::new(2.0 * c0 / n - 1.0, 2.0 * c1 / n - 1.0))
}

/// Canonical QPE: H on the time register, time qubit j controls 2^j copies of `step`,
/// inverse QFT on the time register.
pub fn build_qpe(step: &Circuit, layout: &QubitLayout, budget_bytes: u128) -> Result<Circuit, AlgorithmError> {
    let m = layout.time_qubits;
    if m == 0 {
        return Err(AlgorithmError::NoTimeQubits);
    }
    check_budget(layout.total(), budget_bytes)?;
    check_system_only(step, layout)?;
    let nt = layout.total();
    let step = step.widened(nt);
    let mut c = Circuit::new(nt);
    c.push_column((0..m).map(|j| Gate::h(layout.time(j))).collect());
    for j in 0..m {
        let block = step.controlled(Control::one(layout.time(j)));
        for _ in 0..1usize << j {
            c.append(&block);
        }
    }
    // inverse QFT relabelled onto the time register
    let time: Vec<usize> = (0..m).map(|j| layout.time(j)).collect();
    let iqft = build_qft(m, true);
    for col in iqft.columns() {
        c.push_column(
            col.iter()
                .map(|g| {
                    Gate::new(
                        g.kind,
                        g.targets.iter().map(|&t| time[t]).collect(),
                        g.controls.iter().map(|x| Control { qubit: time[x.qubit], on_one: x.on_one }).collect(),
                    )
                })
                .collect(),
        );
    }
    Ok(c)
}

#[derive(Debug, Clone, PartialEq)]
pub struct QpeResult {
    /// Exact probability of each m-bit outcome k (phase k / 2^m).
    pub probabilities: Vec<f64>,
    pub counts: Vec<u64>,
}

pub fn run_qpe(
    circuit: &Circuit,
    layout: &QubitLayout,
    system: &[Complex64],
    shots: u64,
    seed: u64,
) -> Result<QpeResult, AlgorithmError> {
    if shots == 0 {
        return Err(AlgorithmError::NoShots);
    }
    let mut v = embed(system, layout);
    apply(circuit, &mut v)?;
    let time: Vec<usize> = (0..layout.time_qubits).map(|j| layout.time(j)).collect();
    let probabilities = emulator::register_distribution(&v, &time);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = multinomial(&probabilities, shots, &mut rng);
    Ok(QpeResult { probabilities, counts })
}

/// Energy for phase θ under U = exp(-iH dt/ħ), folded into [e_lo, e_lo + 2πħ/dt).
pub fn phase_to_energy(theta: f64, dt: f64, hbar: f64, e_lo: f64) -> f64 {
    let window = 2.0 * PI * hbar / dt;
    let e = -theta * window;
    e_lo + (e - e_lo).rem_euclid(window)
}

/// Phase θ in [0, 1) expected for energy E.
pub fn energy_to_phase(energy: f64, dt: f64, hbar: f64) -> f64 {
    (-energy * dt / (2.0 * PI * hbar)).rem_euclid(1.0)
}
