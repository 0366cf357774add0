//! Closed-form gate-depth and qubit assays, and their cross-check against built circuits.

use crate::circuits::builders::{
    build_bilinear_offdiag, build_initial_state, build_offdiag_parts, build_qft, build_qft_all, build_timestep,
    build_udiag, build_uk, index_polynomial, pair_groups,
};
use crate::circuits::{Circuit, QubitLayout};
use crate::model::{BilinearDiag, BilinearOff, Convention, GridSpec, VibronicModel};
use crate::soft::SplitOrder;
use serde::Serialize;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum ResourceError {
    #[error("variant B needs a power-of-two number of time steps, got {0}")]
    NotPowerOfTwo(u64),
    #[error("d, n and n_t must be at least 1")]
    Zero,
    #[error("builder check limited to n <= 6 (4D) / n <= 5 (24D), got n = {0}")]
    TooLarge(u64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Variant {
    /// Statistical sampling with a Hadamard-test ancilla.
    A,
    /// Canonical QPE with a log2(n_t)-qubit time register.
    B,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelClass {
    Linear4D,
    Quadratic24D,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct AssayInput {
    pub d: u64,
    pub n: u64,
    pub n_t: u64,
    pub variant: Variant,
    pub model_class: ModelClass,
}

/// Scheduling assumptions behind the quadratic-model step depth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Schedule {
    /// Sequential groups of same-symmetry bilinear pairs.
    pub diag_groups: u64,
    /// Inter-state bilinear pairs, each a sequential n² CCRx network.
    pub offdiag_pairs: u64,
    /// Two-qubit gates per CCRx.
    pub ccrx_gates: u64,
}

impl Default for Schedule {
    fn default() -> Self {
        Schedule { diag_groups: 6, offdiag_pairs: 29, ccrx_gates: 5 }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub label: String,
    pub depth: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AssayReport {
    pub input: AssayInput,
    pub schedule: Option<Schedule>,
    pub m: Option<u64>,
    pub n_i: u64,
    pub n_p: u64,
    pub per_step: u64,
    pub n_t_depth: u64,
    pub n_m: Option<u64>,
    pub total: u64,
    pub qubits_state: u64,
    pub qubits_total: u64,
    /// Per-step depth by block.
    pub breakdown: Vec<Row>,
}

/// n²/2 + n, minus 1/2 for odd n.
pub fn half_square_plus(n: u64) -> u64 {
    (n * n + 2 * n - n % 2) / 2
}

pub fn state_prep_depth(n: u64) -> u64 {
    (1 << (n + 1)) - 3
}

fn row(label: &str, depth: u64) -> Row {
    Row { label: label.to_string(), depth }
}

/// Per-step blocks of the linear model (potential-first step).
pub fn linear_step_rows(n: u64) -> Vec<Row> {
    vec![
        row("U_diag x2", 2 * (n * n + 5)),
        row("U_c x2", 2 * n),
        row("QFT + inverse QFT", 2 * half_square_plus(n)),
        row("U_K", n * n),
    ]
}

/// Per-step blocks of the quadratic model (kinetic-first step).
pub fn quadratic_step_rows(n: u64, s: &Schedule) -> Vec<Row> {
    vec![
        row("U_K halves x2", 2 * n * n),
        row("QFT + inverse QFT", 2 * half_square_plus(n)),
        row("U_diag", n * n + 5),
        row("U_c", n),
        row(&format!("on-diagonal bilinear ({} groups)", s.diag_groups), s.diag_groups * n * n),
        row(
            &format!("off-diagonal bilinear ({} pairs x {} gates)", s.offdiag_pairs, s.ccrx_gates),
            s.offdiag_pairs * s.ccrx_gates * n * n,
        ),
    ]
}

pub fn assay(input: &AssayInput) -> Result<AssayReport, ResourceError> {
    assay_with(input, &Schedule::default())
}

pub fn assay_with(input: &AssayInput, schedule: &Schedule) -> Result<AssayReport, ResourceError> {
    let AssayInput { d, n, n_t, variant, model_class } = *input;
    if d == 0 || n == 0 || n_t == 0 {
        return Err(ResourceError::Zero);
    }
    let m = n_t.is_power_of_two().then(|| n_t.trailing_zeros() as u64);
    if variant == Variant::B && m.is_none() {
        return Err(ResourceError::NotPowerOfTwo(n_t));
    }
    let n_i = state_prep_depth(n);
    let n_p = half_square_plus(n);
    let (breakdown, prefix) = match model_class {
        ModelClass::Linear4D => (linear_step_rows(n), 0),
        ModelClass::Quadratic24D => (quadratic_step_rows(n, schedule), 2 * n_p),
    };
    let per_step: u64 = breakdown.iter().map(|r| r.depth).sum();
    let n_t_depth = prefix + per_step * (n_t - 1);
    let n_m = m.map(half_square_plus);
    let (total, extra_qubits) = match variant {
        Variant::A => (n_i + n_t_depth + 2, 1),
        Variant::B => (n_i + n_t_depth + n_m.unwrap(), m.unwrap()),
    };
    let qubits_state = d * n + 1;
    Ok(AssayReport {
        input: *input,
        schedule: (model_class == ModelClass::Quadratic24D).then_some(*schedule),
        m,
        n_i,
        n_p,
        per_step,
        n_t_depth,
        n_m,
        total,
        qubits_state,
        qubits_total: qubits_state + extra_qubits,
        breakdown,
    })
}

impl AssayReport {
    pub fn to_table(&self) -> String {
        let mut s = String::new();
        let i = &self.input;
        s += &format!(
            "model {:?}  d={} n={} n_t={} variant {:?}\n",
            i.model_class, i.d, i.n, i.n_t, i.variant
        );
        s += &format!("{:<44}{:>14}\n", "quantity", "value");
        let mut line = |k: &str, v: String| s += &format!("{k:<44}{v:>14}\n");
        line("N_i (state preparation)", self.n_i.to_string());
        line("N_p (QFT)", self.n_p.to_string());
        line("per-step depth", self.per_step.to_string());
        line("N_t (time evolution)", self.n_t_depth.to_string());
        line("N_m (inverse QFT on time register)", self.n_m.map_or("-".into(), |x| x.to_string()));
        line("total depth", self.total.to_string());
        line("qubits (system)", self.qubits_state.to_string());
        line("qubits (total)", self.qubits_total.to_string());
        for r in &self.breakdown {
            line(&format!("  step: {}", r.label), r.depth.to_string());
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct BlockCheck {
    pub label: String,
    pub built: u64,
    pub formula: u64,
}

impl BlockCheck {
    pub fn matches(&self) -> bool {
        self.built == self.formula
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Comparison {
    pub checks: Vec<BlockCheck>,
    /// Block label, first differing column and the gates found there when a block differs.
    pub mismatches: Vec<String>,
}

impl Comparison {
    pub fn all_match(&self) -> bool {
        self.checks.iter().all(BlockCheck::matches)
    }

    pub fn get(&self, label: &str) -> Option<&BlockCheck> {
        self.checks.iter().find(|c| c.label == label)
    }
}

fn check(label: &str, built: &Circuit, formula: u64, mismatches: &mut Vec<String>) -> BlockCheck {
    let b = built.depth() as u64;
    if b != formula {
        let col = (formula as usize).min(built.depth().saturating_sub(1));
        let gates: Vec<String> = built.columns().get(col).map_or(vec![], |c| c.iter().map(|g| g.to_string()).collect());
        mismatches.push(format!("{label}: built {b} vs formula {formula}; column {col}: [{}]", gates.join("; ")));
    }
    BlockCheck { label: label.to_string(), built: b, formula }
}

/// Placeholder quadratic model with every bilinear slot set to a small nonzero value so each
/// network is actually emitted.
fn quadratic_model() -> VibronicModel {
    let mut m = VibronicModel::preset("pyrazine-24d").expect("bundled preset");
    for b in &mut m.bilinear_diag {
        *b = BilinearDiag { gamma1: 1e-3, gamma2: 1e-3, ..b.clone() };
    }
    for b in &mut m.bilinear_off {
        *b = BilinearOff { mu: 1e-3, ..b.clone() };
    }
    m
}

/// Build the step circuit for `input` and compare per-block and per-step depths with the
/// closed forms. For the linear model with n_t <= 8 the full prep + evolution is built too.
pub fn verify_against_builder(input: &AssayInput) -> Result<Comparison, ResourceError> {
    let report = assay(input)?;
    let n = input.n as usize;
    let grid = |n| GridSpec::new(n, -5.0, 5.0, Convention::Endpoint).expect("valid grid");
    let dt = 0.1;
    let mut mm = vec![];
    let mut checks = vec![];
    match input.model_class {
        ModelClass::Linear4D => {
            if !(2..=6).contains(&n) {
                return Err(ResourceError::TooLarge(input.n));
            }
            let model = VibronicModel::pyrazine_truncated(input.d as usize);
            let g = grid(n);
            let layout = QubitLayout::system(model.n_modes(), n);
            let n2 = (n * n) as u64;
            checks.push(check("QFT", &build_qft(n, false), report.n_p, &mut mm));
            checks.push(check("U_diag", &build_udiag(&model, &g, &layout, dt / 2.0), n2 + 5, &mut mm));
            let (uc, _) = build_offdiag_parts(&model, &g, &layout, dt / 2.0, true);
            checks.push(check("U_c", &uc, n as u64, &mut mm));
            checks.push(check("U_K", &build_uk(&model, &g, &layout, dt), n2, &mut mm));
            let step = build_timestep(&model, &g, &layout, dt, SplitOrder::PotentialFirst);
            checks.push(check("time step", &step, report.per_step, &mut mm));
            let prep = build_initial_state(&model, &g, &layout);
            checks.push(check("state preparation", &prep, report.n_i, &mut mm));
            if input.n_t <= 8 && n <= 5 {
                let mut full = prep.clone();
                for _ in 1..input.n_t {
                    full.append(&step);
                }
                checks.push(check("N_i + N_t", &full, report.n_i + report.n_t_depth, &mut mm));
            }
        }
        ModelClass::Quadratic24D => {
            if !(2..=5).contains(&n) {
                return Err(ResourceError::TooLarge(input.n));
            }
            let model = quadratic_model();
            // centred grid: the inter-state bilinear terms need no affine gates
            let g = GridSpec::new(n, -5.0, 5.0, Convention::Periodic).expect("valid grid");
            let layout = QubitLayout::system(model.n_modes(), n);
            let n2 = (n * n) as u64;
            let s = Schedule::default();
            let mut plain = model.clone();
            plain.bilinear_diag.clear();
            plain.bilinear_off.clear();
            checks.push(check("U_K half", &build_uk(&model, &g, &layout, dt / 2.0), n2, &mut mm));
            checks.push(check("QFT (all registers)", &build_qft_all(&layout, false), report.n_p, &mut mm));
            checks.push(check("U_diag", &build_udiag(&plain, &g, &layout, dt), n2 + 5, &mut mm));
            let (uc, _) = build_offdiag_parts(&plain, &g, &layout, dt, true);
            checks.push(check("U_c", &uc, n as u64, &mut mm));
            let pairs: Vec<(usize, usize)> = index_polynomial(&model, &g).pairs.iter().map(|p| (p.0, p.1)).collect();
            let groups = pair_groups(&pairs).len() as u64;
            let full_diag = build_udiag(&model, &g, &layout, dt);
            let mut diag_only = Circuit::new(layout.total());
            for col in &full_diag.columns()[(n * n + 5)..] {
                diag_only.push_column(col.clone());
            }
            checks.push(check(
                &format!("on-diagonal bilinear ({groups} colour groups)"),
                &diag_only,
                s.diag_groups * n2,
                &mut mm,
            ));
            let mut off = Circuit::new(layout.total());
            for p in model.off_pairs() {
                off.append(&build_bilinear_offdiag(&g, &layout, p.l, p.m, p.coeff[0], dt, model.hbar, true));
            }
            checks.push(check(
                &format!("off-diagonal bilinear ({} pairs)", model.off_pairs().len()),
                &off,
                s.offdiag_pairs * s.ccrx_gates * n2,
                &mut mm,
            ));
            // the CRx network comes first in the off-diagonal block, the CCRx networks after it
            let (uc_full, _) = build_offdiag_parts(&model, &g, &layout, dt, true);
            let mut uc_affine = Circuit::new(layout.total());
            for col in &uc_full.columns()[..uc_full.depth() - off.depth()] {
                uc_affine.push_column(col.clone());
            }
            checks.push(check("U_c with bilinear terms present", &uc_affine, n as u64, &mut mm));
            let e = GridSpec::new(n, -5.0, 5.0, Convention::Endpoint).expect("valid grid");
            let (uc_e, _) = build_offdiag_parts(&model, &e, &layout, dt, true);
            let mut uc_affine = Circuit::new(layout.total());
            for col in &uc_e.columns()[..uc_e.depth() - off.depth()] {
                uc_affine.push_column(col.clone());
            }
            checks.push(check("U_c with bilinear affine terms (endpoint grid)", &uc_affine, n as u64, &mut mm));
            let step = build_timestep(&model, &g, &layout, dt, SplitOrder::KineticFirst);
            checks.push(check("time step", &step, report.per_step, &mut mm));
            let built_schedule = Schedule { diag_groups: groups, ..s };
            let per_step = assay_with(input, &built_schedule)?.per_step;
            checks.push(check("time step (formula with built grouping)", &step, per_step, &mut mm));
        }
    }
    Ok(Comparison { checks, mismatches: mm })
}
