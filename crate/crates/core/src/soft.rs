//! Split-operator Fourier-transform propagator.

use crate::model::{Basis, GridSpec, ModelError, TimeGrid, VibronicModel, Wavepacket};
use crate::signals::AutocorrSeries;
use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};
use std::sync::Arc;

/// Upper bound on grid points per electronic sector accepted by the propagator.
pub const MAX_SECTOR_POINTS: usize = 1 << 26;

#[derive(Debug, thiserror::Error)]
pub enum SoftError {
    #[error("wavepacket must be in the position basis")]
    BasisMismatch,
    #[error("wavepacket shape ({0} modes, {1} qubits) does not match the plan")]
    ShapeMismatch(usize, usize),
    #[error("grid too large: {points} points per sector exceeds {max}")]
    TooLarge { points: usize, max: usize },
    #[error(transparent)]
    Model(#[from] ModelError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SplitOrder {
    /// V/2, K, V/2 with the half potential mirrored (diag, coupling | coupling, diag).
    #[default]
    PotentialFirst,
    /// K/2, V (diag then coupling), K/2.
    KineticFirst,
}

impl std::str::FromStr for SplitOrder {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "potential-first" => Ok(SplitOrder::PotentialFirst),
            "kinetic-first" => Ok(SplitOrder::KineticFirst),
            _ => Err(format!("unknown split order '{s}'")),
        }
    }
}

/// Unitary multidimensional FFT over the mode axes of both electronic sectors.
#[derive(Clone)]
pub struct GridFft {
    n_modes: usize,
    n_qubits: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl GridFft {
    pub fn new(n_modes: usize, n_qubits: usize) -> Self {
        let mut planner = FftPlanner::new();
        let n = 1 << n_qubits;
        GridFft { n_modes, n_qubits, forward: planner.plan_fft_forward(n), inverse: planner.plan_fft_inverse(n) }
    }

    pub fn forward(&self, amps: &mut [Complex64]) {
        self.run(amps, true)
    }

    pub fn inverse(&self, amps: &mut [Complex64]) {
        self.run(amps, false)
    }

    fn run(&self, amps: &mut [Complex64], forward: bool) {
        let fft = if forward { &self.forward } else { &self.inverse };
        let n = 1usize << self.n_qubits;
        let scale = 1.0 / (n as f64).sqrt();
        let mut lines = vec![Complex64::new(0.0, 0.0); amps.len()];
        for k in 0..self.n_modes {
            let stride = 1usize << ((self.n_modes - 1 - k) * self.n_qubits);
            let block = n * stride;
            // gather every line along axis k into contiguous rows
            lines.par_chunks_mut(n).enumerate().for_each(|(line, row)| {
                let base = (line / stride) * block + line % stride;
                for (t, x) in row.iter_mut().enumerate() {
                    *x = amps[base + t * stride];
                }
            });
            lines.par_chunks_mut(n * 64).for_each(|c| fft.process(c));
            amps.par_iter_mut().enumerate().for_each(|(flat, a)| {
                let hi = flat / block;
                let rem = flat % block;
                let (t, lo) = (rem / stride, rem % stride);
                *a = lines[(hi * stride + lo) * n + t] * scale;
            });
        }
    }
}

/// Precomputed phase tables for one time step.
#[derive(Clone)]
pub struct PropagatorPlan {
    pub model: VibronicModel,
    pub grid: GridSpec,
    pub dt: f64,
    pub split: SplitOrder,
    /// exp(-i V_s tau_v / hbar) over (s, grid point).
    pub potential_phase: Vec<Complex64>,
    /// (cos, sin) of the coupling angle per grid point.
    pub coupling: Vec<(f64, f64)>,
    /// exp(-i K tau_k / hbar) per momentum grid point in DFT order.
    pub kinetic_phase: Vec<Complex64>,
    fft: GridFft,
}

/// Coordinates of every grid point of one sector, mode-major.
fn coordinates(model: &VibronicModel, grid: &GridSpec, flat: usize) -> Vec<f64> {
    let d = model.n_modes();
    let n = grid.n_qubits;
    (0..d)
        .map(|k| grid.point((flat >> ((d - 1 - k) * n)) & ((1 << n) - 1)))
        .collect()
}

fn kinetic_energy(model: &VibronicModel, grid: &GridSpec, flat: usize, momenta: &[f64]) -> f64 {
    let d = model.n_modes();
    let n = grid.n_qubits;
    (0..d)
        .map(|k| {
            let p = momenta[(flat >> ((d - 1 - k) * n)) & ((1 << n) - 1)];
            0.5 * model.modes[k].omega * p * p
        })
        .sum()
}

fn check_size(model: &VibronicModel, grid: &GridSpec) -> Result<usize, SoftError> {
    let bits = model.n_modes() * grid.n_qubits;
    if bits > 26 || (1usize << bits) > MAX_SECTOR_POINTS {
        return Err(SoftError::TooLarge {
            points: 1usize.checked_shl(bits as u32).unwrap_or(usize::MAX),
            max: MAX_SECTOR_POINTS,
        });
    }
    Ok(1 << bits)
}

impl PropagatorPlan {
    pub fn new(model: &VibronicModel, grid: &GridSpec, dt: f64, split: SplitOrder) -> Result<Self, SoftError> {
        model.validate()?;
        grid.validate()?;
        let len = check_size(model, grid)?;
        let (tau_v, tau_k) = match split {
            SplitOrder::PotentialFirst => (0.5 * dt, dt),
            SplitOrder::KineticFirst => (dt, 0.5 * dt),
        };
        let hbar = model.hbar;
        let mut potential_phase = vec![Complex64::new(0.0, 0.0); 2 * len];
        let (p0, p1) = potential_phase.split_at_mut(len);
        let mut coupling = vec![(1.0, 0.0); len];
        p0.par_iter_mut()
            .zip(p1.par_iter_mut())
            .zip(coupling.par_iter_mut())
            .enumerate()
            .for_each(|(i, ((a, b), c))| {
                let q = coordinates(model, grid, i);
                *a = Complex64::from_polar(1.0, -model.diag_potential(0, &q) * tau_v / hbar);
                *b = Complex64::from_polar(1.0, -model.diag_potential(1, &q) * tau_v / hbar);
                let th = model.coupling(&q) * tau_v / hbar;
                *c = (th.cos(), th.sin());
            });
        let momenta = grid.momenta();
        let kinetic_phase = (0..len)
            .into_par_iter()
            .map(|i| Complex64::from_polar(1.0, -kinetic_energy(model, grid, i, &momenta) * tau_k / hbar))
            .collect();
        Ok(PropagatorPlan {
            model: model.clone(),
            grid: *grid,
            dt,
            split,
            potential_phase,
            coupling,
            kinetic_phase,
            fft: GridFft::new(model.n_modes(), grid.n_qubits),
        })
    }

    fn sector_len(&self) -> usize {
        self.coupling.len()
    }

    fn apply_diag(&self, amps: &mut [Complex64]) {
        amps.par_iter_mut().zip(self.potential_phase.par_iter()).for_each(|(a, p)| *a *= p);
    }

    fn apply_coupling(&self, amps: &mut [Complex64]) {
        let (s1, s2) = amps.split_at_mut(self.sector_len());
        s1.par_iter_mut()
            .zip(s2.par_iter_mut())
            .zip(self.coupling.par_iter())
            .for_each(|((a, b), &(c, s))| {
                let mis = Complex64::new(0.0, -s);
                let (x, y) = (*a, *b);
                *a = x * c + y * mis;
                *b = x * mis + y * c;
            });
    }

    fn apply_kinetic(&self, amps: &mut [Complex64]) {
        self.fft.forward(amps);
        let len = self.sector_len();
        amps.par_chunks_mut(len).for_each(|sector| {
            sector.iter_mut().zip(&self.kinetic_phase).for_each(|(a, p)| *a *= p);
        });
        self.fft.inverse(amps);
    }

    fn check(&self, psi: &Wavepacket) -> Result<(), SoftError> {
        if psi.basis != Basis::Position {
            return Err(SoftError::BasisMismatch);
        }
        if psi.n_modes != self.model.n_modes() || psi.n_qubits != self.grid.n_qubits {
            return Err(SoftError::ShapeMismatch(psi.n_modes, psi.n_qubits));
        }
        Ok(())
    }

    /// Advance `psi` by one time step in place.
    pub fn step(&self, psi: &mut Wavepacket) -> Result<(), SoftError> {
        self.check(psi)?;
        let a = &mut psi.amplitudes;
        match self.split {
            SplitOrder::PotentialFirst => {
                self.apply_diag(a);
                self.apply_coupling(a);
                self.apply_kinetic(a);
                self.apply_coupling(a);
                self.apply_diag(a);
            }
            SplitOrder::KineticFirst => {
                self.apply_kinetic(a);
                self.apply_diag(a);
                self.apply_coupling(a);
                self.apply_kinetic(a);
            }
        }
        Ok(())
    }

    pub fn stepped(&self, psi: &Wavepacket) -> Result<Wavepacket, SoftError> {
        let mut out = psi.clone();
        self.step(&mut out)?;
        Ok(out)
    }
}

/// Observables sampled along a trajectory.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub autocorr: AutocorrSeries,
    /// (P_S1, P_S2) per sample.
    pub populations: Vec<[f64; 2]>,
    /// Per sample, per mode: largest marginal probability on the two edge slices.
    pub boundary: Vec<Vec<f64>>,
    pub final_state: Wavepacket,
}

/// Per-mode maximum of the marginal probabilities at the first and last grid index.
pub fn boundary_probabilities(psi: &Wavepacket) -> Vec<f64> {
    let d = psi.n_modes;
    let n = psi.n_qubits;
    let last = (1usize << n) - 1;
    let mut lo = vec![0.0; d];
    let mut hi = vec![0.0; d];
    let len = psi.sector_len();
    for (flat, a) in psi.amplitudes.iter().enumerate() {
        let p = a.norm_sqr();
        if p == 0.0 {
            continue;
        }
        let i = flat % len;
        for k in 0..d {
            let idx = (i >> ((d - 1 - k) * n)) & last;
            if idx == 0 {
                lo[k] += p;
            } else if idx == last {
                hi[k] += p;
            }
        }
    }
    lo.iter().zip(&hi).map(|(a, b)| a.max(*b)).collect()
}

/// Propagate `psi0` over `time`, sampling every `sample_stride` steps including t = 0.
pub fn propagate(plan: &PropagatorPlan, psi0: &Wavepacket, time: &TimeGrid) -> Result<Trajectory, SoftError> {
    time.validate()?;
    let mut psi = psi0.clone();
    let mut times = Vec::with_capacity(time.n_samples());
    let mut values = Vec::with_capacity(time.n_samples());
    let mut populations = Vec::with_capacity(time.n_samples());
    let mut boundary = Vec::with_capacity(time.n_samples());
    let mut record = |step: usize, psi: &Wavepacket| {
        times.push(step as f64 * time.dt);
        values.push(psi0.overlap(psi));
        populations.push([psi.population(0), psi.population(1)]);
        boundary.push(boundary_probabilities(psi));
    };
    record(0, &psi);
    for step in 1..=time.n_steps {
        plan.step(&mut psi)?;
        if step % time.sample_stride == 0 {
            record(step, &psi);
        }
    }
    Ok(Trajectory { autocorr: AutocorrSeries { times, values }, populations, boundary, final_state: psi })
}

/// <psi| H |psi> for the full vibronic Hamiltonian.
pub fn energy(model: &VibronicModel, grid: &GridSpec, psi: &Wavepacket) -> f64 {
    let len = psi.sector_len();
    let mut v = 0.0;
    for i in 0..len {
        let q = coordinates(model, grid, i);
        let (a, b) = (psi.amplitudes[i], psi.amplitudes[len + i]);
        v += model.diag_potential(0, &q) * a.norm_sqr() + model.diag_potential(1, &q) * b.norm_sqr();
        v += 2.0 * model.coupling(&q) * (a.conj() * b).re;
    }
    v + kinetic_expectation(model, grid, psi)
}

fn kinetic_expectation(model: &VibronicModel, grid: &GridSpec, psi: &Wavepacket) -> f64 {
    let mut amps = psi.amplitudes.clone();
    GridFft::new(psi.n_modes, psi.n_qubits).forward(&mut amps);
    let len = psi.sector_len();
    let momenta = grid.momenta();
    amps.iter()
        .enumerate()
        .map(|(flat, a)| kinetic_energy(model, grid, flat % len, &momenta) * a.norm_sqr())
        .sum()
}

/// Zero-point energy of the ground vibrational state on the grid: <K> + <sum omega/2 Q^2>.
///
/// The electronic offset and the linear couplings of the excited state are not part of it.
/// The state is a product and this operator is separable, so it is summed mode by mode.
pub fn zpe(model: &VibronicModel, grid: &GridSpec) -> f64 {
    let g = crate::model::gaussian_amplitudes(grid);
    let q2: f64 = grid.points().iter().zip(&g).map(|(q, a)| q * q * a * a).sum();
    let mut amps: Vec<Complex64> = g.iter().map(|&a| Complex64::new(a, 0.0)).collect();
    GridFft::new(1, grid.n_qubits).forward(&mut amps);
    let p2: f64 = grid.momenta().iter().zip(&amps).map(|(p, a)| p * p * a.norm_sqr()).sum();
    model.modes.iter().map(|m| 0.5 * m.omega * (q2 + p2)).sum()
}
