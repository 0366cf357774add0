use num_complex::Complex64;
use std::f64::consts::FRAC_PI_2;
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GateKind {
    H,
    X,
    S,
    /// |1> -> e^{i theta}|1>
    U1(f64),
    Ry(f64),
    /// exp(-i theta X / 2)
    Rx(f64),
    Swap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Control {
    pub qubit: usize,
    /// Fires on |1> when true, on |0> when false.
    pub on_one: bool,
}

impl Control {
    pub fn one(qubit: usize) -> Self {
        Control { qubit, on_one: true }
    }
    pub fn zero(qubit: usize) -> Self {
        Control { qubit, on_one: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub targets: Vec<usize>,
    pub controls: Vec<Control>,
}

impl Gate {
    pub fn new(kind: GateKind, targets: Vec<usize>, controls: Vec<Control>) -> Self {
        let arity = if kind == GateKind::Swap { 2 } else { 1 };
        assert_eq!(targets.len(), arity, "{kind:?} takes {arity} target(s)");
        if let GateKind::U1(t) | GateKind::Ry(t) | GateKind::Rx(t) = kind {
            assert!(t.is_finite(), "non-finite angle");
        }
        let g = Gate { kind, targets, controls };
        let q = g.qubits();
        for (i, a) in q.iter().enumerate() {
            assert!(!q[..i].contains(a), "gate acts twice on qubit {a}");
        }
        g
    }

    pub fn h(t: usize) -> Self {
        Self::new(GateKind::H, vec![t], vec![])
    }
    pub fn x(t: usize) -> Self {
        Self::new(GateKind::X, vec![t], vec![])
    }
    pub fn s(t: usize) -> Self {
        Self::new(GateKind::S, vec![t], vec![])
    }
    pub fn u1(t: usize, theta: f64) -> Self {
        Self::new(GateKind::U1(theta), vec![t], vec![])
    }
    pub fn ry(t: usize, theta: f64) -> Self {
        Self::new(GateKind::Ry(theta), vec![t], vec![])
    }
    pub fn rx(t: usize, theta: f64) -> Self {
        Self::new(GateKind::Rx(theta), vec![t], vec![])
    }
    pub fn cnot(c: usize, t: usize) -> Self {
        Self::new(GateKind::X, vec![t], vec![Control::one(c)])
    }
    pub fn cu1(c: usize, t: usize, theta: f64) -> Self {
        Self::new(GateKind::U1(theta), vec![t], vec![Control::one(c)])
    }
    pub fn crx(c: usize, t: usize, theta: f64) -> Self {
        Self::new(GateKind::Rx(theta), vec![t], vec![Control::one(c)])
    }
    pub fn ccrx(c1: usize, c2: usize, t: usize, theta: f64) -> Self {
        Self::new(GateKind::Rx(theta), vec![t], vec![Control::one(c1), Control::one(c2)])
    }
    pub fn swap(a: usize, b: usize) -> Self {
        Self::new(GateKind::Swap, vec![a, b], vec![])
    }

    pub fn with_control(&self, c: Control) -> Self {
        let mut controls = self.controls.clone();
        controls.push(c);
        Self::new(self.kind, self.targets.clone(), controls)
    }

    /// Every qubit the gate touches, targets first.
    pub fn qubits(&self) -> Vec<usize> {
        self.targets.iter().copied().chain(self.controls.iter().map(|c| c.qubit)).collect()
    }

    pub fn touches(&self, q: usize) -> bool {
        self.targets.contains(&q) || self.controls.iter().any(|c| c.qubit == q)
    }

    /// Diagonal in the computational basis.
    pub fn is_diagonal(&self) -> bool {
        matches!(self.kind, GateKind::S | GateKind::U1(_))
    }

    pub fn inverse(&self) -> Self {
        let kind = match self.kind {
            GateKind::S => GateKind::U1(-FRAC_PI_2),
            GateKind::U1(t) => GateKind::U1(-t),
            GateKind::Ry(t) => GateKind::Ry(-t),
            GateKind::Rx(t) => GateKind::Rx(-t),
            k => k,
        };
        Gate { kind, targets: self.targets.clone(), controls: self.controls.clone() }
    }

    /// 2x2 matrix of single-target kinds, row-major.
    pub fn matrix(&self) -> Option<[Complex64; 4]> {
        let c = |re: f64, im: f64| Complex64::new(re, im);
        Some(match self.kind {
            GateKind::H => {
                let r = std::f64::consts::FRAC_1_SQRT_2;
                [c(r, 0.0), c(r, 0.0), c(r, 0.0), c(-r, 0.0)]
            }
            GateKind::X => [c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
            GateKind::S => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 1.0)],
            GateKind::U1(t) => [c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), Complex64::from_polar(1.0, t)],
            GateKind::Ry(t) => {
                let (s, co) = (0.5 * t).sin_cos();
                [c(co, 0.0), c(-s, 0.0), c(s, 0.0), c(co, 0.0)]
            }
            GateKind::Rx(t) => {
                let (s, co) = (0.5 * t).sin_cos();
                [c(co, 0.0), c(0.0, -s), c(0.0, -s), c(co, 0.0)]
            }
            GateKind::Swap => return None,
        })
    }

    /// Conventional name including control count, e.g. CNOT, CU1, CCRx.
    pub fn name(&self) -> String {
        let base = match self.kind {
            GateKind::H => "H",
            GateKind::X => "X",
            GateKind::S => "S",
            GateKind::U1(_) => "U1",
            GateKind::Ry(_) => "Ry",
            GateKind::Rx(_) => "Rx",
            GateKind::Swap => "SWAP",
        };
        match (self.kind, self.controls.len()) {
            (GateKind::X, 1) => "CNOT".to_string(),
            (_, 0) => base.to_string(),
            (_, k) => format!("{}{base}", "C".repeat(k)),
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match self.kind {
            GateKind::U1(t) | GateKind::Ry(t) | GateKind::Rx(t) => Some(t),
            _ => None,
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.name())?;
        match self.angle() {
            Some(t) => write!(f, " {t:.12e}")?,
            None => write!(f, " -")?,
        }
        let ctl: Vec<String> = self
            .controls
            .iter()
            .map(|c| if c.on_one { c.qubit.to_string() } else { format!("!{}", c.qubit) })
            .collect();
        let tgt: Vec<String> = self.targets.iter().map(|t| t.to_string()).collect();
        write!(f, " c={} t={}", ctl.join(","), tgt.join(","))
    }
}

/// Expand a doubly-controlled Rx into five two-qubit gates.
///
/// CRx(c2, θ/2), CNOT(c1→c2), CRx(c2, −θ/2), CNOT(c1→c2), CRx(c1, θ/2), using
/// ℓ1·ℓ2 = (ℓ1 + ℓ2 − ℓ1⊕ℓ2)/2 for control literals ℓ of either polarity.
pub fn decompose_ccrx(gate: &Gate) -> Option<Vec<Gate>> {
    let GateKind::Rx(theta) = gate.kind else { return None };
    if gate.controls.len() != 2 {
        return None;
    }
    let (a, b, t) = (gate.controls[0], gate.controls[1], gate.targets[0]);
    let rx = |c: Control, th: f64| Gate::new(GateKind::Rx(th), vec![t], vec![c]);
    let parity = Control { qubit: b.qubit, on_one: a.on_one == b.on_one };
    Some(vec![
        rx(b, 0.5 * theta),
        Gate::cnot(a.qubit, b.qubit),
        rx(parity, -0.5 * theta),
        Gate::cnot(a.qubit, b.qubit),
        rx(a, 0.5 * theta),
    ])
}
