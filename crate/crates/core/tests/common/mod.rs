#![allow(dead_code)]

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vibronic::model::{BilinearDiag, BilinearOff, ModeParams, Symmetry};
use vibronic::{Convention, GridSpec, VibronicModel, Wavepacket};

pub fn grid(n: usize) -> GridSpec {
    GridSpec::new(n, -5.0, 5.0, Convention::Endpoint).unwrap()
}

pub fn periodic(n: usize) -> GridSpec {
    GridSpec::new(n, -5.0, 5.0, Convention::Periodic).unwrap()
}

pub fn random_state(len: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut v: Vec<Complex64> = (0..len).map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)).collect();
    let n = v.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
    v.iter_mut().for_each(|a| *a /= n);
    v
}

pub fn wavepacket(amps: Vec<Complex64>, d: usize, n: usize) -> Wavepacket {
    Wavepacket { n_modes: d, n_qubits: n, amplitudes: amps, basis: vibronic::model::Basis::Position }
}

/// |<a|b>|^2
pub fn fidelity(a: &[Complex64], b: &[Complex64]) -> f64 {
    let o: Complex64 = a.iter().zip(b).map(|(x, y)| x.conj() * y).sum();
    o.norm_sqr()
}

pub fn max_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

fn mode(label: &str, omega: f64, kappa: Option<(f64, f64)>, symmetry: Symmetry) -> ModeParams {
    ModeParams { label: label.into(), omega, kappa1: kappa.map(|k| k.0), kappa2: kappa.map(|k| k.1), symmetry }
}

/// One-mode models: a tuning mode without inter-state coupling, or a coupling mode.
pub fn one_mode(coupling: bool) -> VibronicModel {
    let mut m = VibronicModel::pyrazine_4d();
    m.modes = if coupling {
        vec![mode("c", 0.0936, None, Symmetry::B1g)]
    } else {
        vec![mode("t", 0.1273, Some((0.047, 0.2012)), Symmetry::Ag)]
    };
    if !coupling {
        m.lambda = 0.0;
    }
    m
}

/// Three modes with same-symmetry and B1g-product bilinear terms, both branches differing.
pub fn bilinear_model() -> VibronicModel {
    let mut m = VibronicModel::pyrazine_4d();
    m.modes = vec![
        mode("a", 0.074, Some((-0.0964, 0.1194)), Symmetry::Ag),
        mode("b", 0.1273, Some((0.047, 0.2012)), Symmetry::Ag),
        mode("c", 0.0936, None, Symmetry::B1g),
    ];
    m.bilinear_diag = vec![BilinearDiag { l: "a".into(), m: "b".into(), gamma1: 0.011, gamma2: -0.017 }];
    m.bilinear_off = vec![BilinearOff { l: "b".into(), m: "c".into(), mu: 0.013 }];
    m.validate().unwrap();
    m
}
