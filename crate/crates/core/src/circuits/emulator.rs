//! Statevector kernels. Qubit q is bit q of the basis index.

use super::circuit::Circuit;
use super::gate::{Control, Gate, GateKind};
use num_complex::Complex64;
use rayon::prelude::*;

/// Default cap on statevector memory.
pub const DEFAULT_BUDGET_BYTES: u128 = 1 << 30;

const PAR_MIN: usize = 1 << 12;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum EmulatorError {
    #[error("state has {got} amplitudes, circuit needs {expected}")]
    Dimension { expected: usize, got: usize },
    #[error("{n_qubits} qubits need {required_bytes} bytes, budget is {budget_bytes}")]
    Budget { n_qubits: usize, required_bytes: u128, budget_bytes: u128 },
}

pub fn required_bytes(n_qubits: usize) -> u128 {
    (std::mem::size_of::<Complex64>() as u128) << n_qubits
}

pub fn check_budget(n_qubits: usize, budget_bytes: u128) -> Result<(), EmulatorError> {
    let required_bytes = required_bytes(n_qubits);
    if n_qubits >= 64 || required_bytes > budget_bytes {
        return Err(EmulatorError::Budget { n_qubits, required_bytes, budget_bytes });
    }
    Ok(())
}

pub fn zero_state(n_qubits: usize) -> Vec<Complex64> {
    let mut v = vec![Complex64::new(0.0, 0.0); 1 << n_qubits];
    v[0] = Complex64::new(1.0, 0.0);
    v
}

fn masks<'a>(controls: impl Iterator<Item = &'a Control>) -> (usize, usize) {
    controls.fold((0, 0), |(m, v), c| (m | 1 << c.qubit, if c.on_one { v | 1 << c.qubit } else { v }))
}

fn phase_sweep(amps: &mut [Complex64], mask: usize, val: usize, phase: Complex64) {
    let f = |(i, a): (usize, &mut Complex64)| {
        if i & mask == val {
            *a *= phase;
        }
    };
    if amps.len() >= PAR_MIN {
        amps.par_iter_mut().enumerate().for_each(f);
    } else {
        amps.iter_mut().enumerate().for_each(f);
    }
}

fn pair_kernel(amps: &mut [Complex64], target: usize, mask: usize, val: usize, m: [Complex64; 4]) {
    let stride = 1usize << target;
    let chunk_fn = |(ci, chunk): (usize, &mut [Complex64])| {
        let base = ci * 2 * stride;
        let (lo, hi) = chunk.split_at_mut(stride);
        let f = |(j, (a, b)): (usize, (&mut Complex64, &mut Complex64))| {
            if (base + j) & mask == val {
                let (x, y) = (*a, *b);
                *a = m[0] * x + m[1] * y;
                *b = m[2] * x + m[3] * y;
            }
        };
        if stride >= PAR_MIN {
            lo.par_iter_mut().zip(hi.par_iter_mut()).enumerate().for_each(f);
        } else {
            lo.iter_mut().zip(hi.iter_mut()).enumerate().for_each(f);
        }
    };
    if amps.len() >= PAR_MIN {
        amps.par_chunks_mut(2 * stride).enumerate().for_each(chunk_fn);
    } else {
        amps.chunks_mut(2 * stride).enumerate().for_each(chunk_fn);
    }
}

/// Apply one gate with optional extra controls.
pub fn apply_gate(amps: &mut [Complex64], gate: &Gate, extra: &[Control]) {
    debug_assert!(extra.iter().all(|c| !gate.touches(c.qubit)));
    let (mask, val) = masks(gate.controls.iter().chain(extra));
    match gate.kind {
        GateKind::Swap => {
            let (a, b) = (gate.targets[0], gate.targets[1]);
            let x = Gate::x(0).matrix().unwrap();
            pair_kernel(amps, a, 1 << b, 1 << b, x);
            pair_kernel(amps, b, mask | 1 << a, val | 1 << a, x);
            pair_kernel(amps, a, 1 << b, 1 << b, x);
        }
        GateKind::S | GateKind::U1(_) => {
            let t = 1 << gate.targets[0];
            let phase = gate.matrix().unwrap()[3];
            phase_sweep(amps, mask | t, val | t, phase);
        }
        _ => pair_kernel(amps, gate.targets[0], mask, val, gate.matrix().unwrap()),
    }
}

fn check_dim(circuit: &Circuit, amps: &[Complex64]) -> Result<(), EmulatorError> {
    let expected = 1usize << circuit.n_qubits();
    if amps.len() != expected {
        return Err(EmulatorError::Dimension { expected, got: amps.len() });
    }
    Ok(())
}

/// Apply every gate of `circuit` in order.
pub fn apply(circuit: &Circuit, amps: &mut [Complex64]) -> Result<(), EmulatorError> {
    check_dim(circuit, amps)?;
    for g in circuit.gates() {
        apply_gate(amps, g, &[]);
    }
    Ok(())
}

/// Apply `circuit` with every gate additionally conditioned on `control`.
pub fn apply_controlled(circuit: &Circuit, amps: &mut [Complex64], control: Control) -> Result<(), EmulatorError> {
    check_dim(circuit, amps)?;
    for g in circuit.gates() {
        apply_gate(amps, g, &[control]);
    }
    Ok(())
}

/// Probability that `qubit` reads 1.
pub fn probability_one(amps: &[Complex64], qubit: usize) -> f64 {
    let bit = 1 << qubit;
    amps.iter().enumerate().filter(|(i, _)| i & bit != 0).map(|(_, a)| a.norm_sqr()).sum()
}

pub fn norm_sqr(amps: &[Complex64]) -> f64 {
    amps.iter().map(|a| a.norm_sqr()).sum()
}

/// Probability of each value of the register made of `qubits` (first entry least significant).
pub fn register_distribution(amps: &[Complex64], qubits: &[usize]) -> Vec<f64> {
    let mut p = vec![0.0; 1 << qubits.len()];
    for (i, a) in amps.iter().enumerate() {
        let mut v = 0;
        for (b, &q) in qubits.iter().enumerate() {
            v |= ((i >> q) & 1) << b;
        }
        p[v] += a.norm_sqr();
    }
    p
}

/// Dense unitary, column j = circuit applied to |j>. Small circuits only.
pub fn unitary(circuit: &Circuit) -> Vec<Vec<Complex64>> {
    let n = circuit.n_qubits();
    assert!(n <= 12, "dense unitary limited to 12 qubits");
    (0..1usize << n)
        .map(|j| {
            let mut v = vec![Complex64::new(0.0, 0.0); 1 << n];
            v[j] = Complex64::new(1.0, 0.0);
            apply(circuit, &mut v).unwrap();
            v
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn close(a: &[Complex64], b: &[Complex64]) -> bool {
        a.iter().zip(b).all(|(x, y)| (x - y).norm() < 1e-12)
    }

    #[test]
    fn hadamard_and_phase() {
        let mut c = Circuit::new(1);
        c.push(Gate::h(0));
        let mut v = zero_state(1);
        apply(&c, &mut v).unwrap();
        let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
        assert!(close(&v, &[r, r]));
        let mut c = Circuit::new(1);
        c.push(Gate::u1(0, PI));
        apply(&c, &mut v).unwrap();
        assert!(close(&v, &[r, -r]));
    }

    #[test]
    fn s_gate_maps_one_to_i_one() {
        let mut c = Circuit::new(1);
        c.push(Gate::s(0));
        let mut v = vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)];
        apply(&c, &mut v).unwrap();
        assert!(close(&v, &[Complex64::new(0.0, 0.0), Complex64::new(0.0, 1.0)]));
    }

    #[test]
    fn swap_and_controls() {
        // |q0=1, q1=0> -> swap -> |q0=0, q1=1>
        let mut c = Circuit::new(3);
        c.push(Gate::swap(0, 1));
        let mut v = vec![Complex64::new(0.0, 0.0); 8];
        v[1] = Complex64::new(1.0, 0.0);
        apply(&c, &mut v).unwrap();
        assert_eq!(v[2], Complex64::new(1.0, 0.0));
        // zero-polarity control on q2 fires, one-polarity does not
        let mut c = Circuit::new(3);
        c.push(Gate::new(GateKind::X, vec![0], vec![Control::zero(2)]));
        c.push(Gate::new(GateKind::X, vec![1], vec![Control::one(2)]));
        apply(&c, &mut v).unwrap();
        assert_eq!(v[3], Complex64::new(1.0, 0.0));
    }

    #[test]
    fn dimension_and_budget_errors() {
        let c = Circuit::new(3);
        let mut v = zero_state(2);
        assert!(matches!(apply(&c, &mut v), Err(EmulatorError::Dimension { .. })));
        let err = check_budget(40, DEFAULT_BUDGET_BYTES).unwrap_err();
        assert_eq!(
            err,
            EmulatorError::Budget { n_qubits: 40, required_bytes: 16 << 40, budget_bytes: DEFAULT_BUDGET_BYTES }
        );
        assert!(check_budget(20, DEFAULT_BUDGET_BYTES).is_ok());
    }

    #[test]
    fn parallel_and_serial_kernels_agree() {
        // 14 qubits crosses the parallel threshold; compare against per-amplitude reference
        let n = 14;
        let mut v: Vec<Complex64> = (0..1 << n).map(|i| Complex64::new((i as f64).sin(), (i as f64 * 0.3).cos())).collect();
        let orig = v.clone();
        let g = Gate::new(GateKind::Ry(0.7), vec![13], vec![Control::one(2), Control::zero(5)]);
        apply_gate(&mut v, &g, &[]);
        let m = g.matrix().unwrap();
        for i in 0..1usize << n {
            let on = (i >> 2) & 1 == 1 && (i >> 5) & 1 == 0;
            let t = (i >> 13) & 1;
            let want = if !on {
                orig[i]
            } else if t == 0 {
                m[0] * orig[i] + m[1] * orig[i | 1 << 13]
            } else {
                m[2] * orig[i & !(1 << 13)] + m[3] * orig[i]
            };
            assert!((v[i] - want).norm() < 1e-14);
        }
    }
}
