//! Block builders for the split-operator circuit.
//!
//! Potential blocks phase by the register integer idx with Q = q_min + idx·ΔQ, so every
//! polynomial in Q is first rewritten as a polynomial in idx. All angles divide energies by
//! ħ; `tau` is the duration (fs) the block evolves for.

use super::circuit::Circuit;
use super::gate::{Control, Gate, GateKind};
use super::layout::QubitLayout;
use crate::model::{gaussian_amplitudes, GridSpec, VibronicModel};
use crate::soft::SplitOrder;
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum BuildError {
    #[error("expected {expected} amplitudes, got {got}")]
    Length { expected: usize, got: usize },
    #[error("amplitudes must be real, finite and nonnegative")]
    Negative,
    #[error("amplitudes are not normalized (norm^2 = {0})")]
    Unnormalized(f64),
}

/// Uniformly controlled Ry cascade preparing `amps` on `reg` (least significant first).
fn state_prep_on(reg: &[usize], amps: &[f64], n_total: usize) -> Circuit {
    let n = reg.len();
    let p: Vec<f64> = amps.iter().map(|a| a * a).collect();
    let mut c = Circuit::new(n_total);
    for j in 0..n {
        let i = n - 1 - j;
        let target = reg[i];
        let alpha: Vec<f64> = (0..1usize << j)
            .map(|w| {
                let num: f64 = p[(2 * w + 1) << i..(2 * w + 2) << i].iter().sum();
                let den: f64 = p[w << (i + 1)..(w + 1) << (i + 1)].iter().sum();
                if den > 0.0 {
                    2.0 * (num / den).clamp(0.0, 1.0).sqrt().asin()
                } else {
                    0.0
                }
            })
            .collect();
        if j == 0 {
            c.push(Gate::ry(target, alpha[0]));
            continue;
        }
        let k_max = 1usize << j;
        let gray = |k: usize| k ^ (k >> 1);
        for k in 0..k_max {
            let g = gray(k);
            let theta: f64 = alpha
                .iter()
                .enumerate()
                .map(|(w, a)| if (w & g).count_ones() % 2 == 0 { *a } else { -*a })
                .sum::<f64>()
                / k_max as f64;
            c.push(Gate::ry(target, theta));
            // control bit that flips between consecutive Gray codes, cyclically
            let flip = (g ^ gray((k + 1) % k_max)).trailing_zeros() as usize;
            c.push(Gate::cnot(reg[i + 1 + flip], target));
        }
    }
    c
}

/// State preparation on a bare n-qubit register; depth 2^{n+1} - 3.
pub fn build_state_prep(n: usize, amps: &[f64]) -> Result<Circuit, BuildError> {
    if amps.len() != 1 << n {
        return Err(BuildError::Length { expected: 1 << n, got: amps.len() });
    }
    if amps.iter().any(|a| !a.is_finite() || *a < 0.0) {
        return Err(BuildError::Negative);
    }
    let norm: f64 = amps.iter().map(|a| a * a).sum();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(BuildError::Unnormalized(norm));
    }
    let reg: Vec<usize> = (0..n).collect();
    Ok(state_prep_on(&reg, amps, n))
}

/// Gaussian product state on S2: per-register preparation in parallel plus X on the
/// electronic qubit.
pub fn build_initial_state(model: &VibronicModel, grid: &GridSpec, layout: &QubitLayout) -> Circuit {
    let amps = gaussian_amplitudes(grid);
    let mut parts: Vec<Circuit> =
        (0..model.n_modes()).map(|k| state_prep_on(&layout.register(k), &amps, layout.total())).collect();
    let mut e = Circuit::new(layout.total());
    e.push(Gate::x(layout.electronic()));
    parts.push(e);
    Circuit::parallel(layout.total(), &parts)
}

/// QFT |x> -> N^{-1/2} Σ_k e^{2πi xk/N} |k> on `reg`, one gate per column.
fn qft_on(reg: &[usize], n_total: usize, inverse: bool) -> Circuit {
    let n = reg.len();
    let mut c = Circuit::new(n_total);
    for j in (0..n).rev() {
        c.push(Gate::h(reg[j]));
        for k in (0..j).rev() {
            c.push(Gate::cu1(reg[k], reg[j], 2.0 * PI / (1u64 << (j - k + 1)) as f64));
        }
    }
    for i in 0..n / 2 {
        c.push(Gate::swap(reg[i], reg[n - 1 - i]));
    }
    if inverse {
        c.inverse()
    } else {
        c
    }
}

pub fn build_qft(n: usize, inverse: bool) -> Circuit {
    let reg: Vec<usize> = (0..n).collect();
    qft_on(&reg, n, inverse)
}

/// QFT on every mode register in parallel.
pub fn build_qft_all(layout: &QubitLayout, inverse: bool) -> Circuit {
    let parts: Vec<Circuit> =
        (0..layout.n_modes).map(|k| qft_on(&layout.register(k), layout.total(), inverse)).collect();
    Circuit::parallel(layout.total(), &parts)
}

/// Phase network for `coeff · (Σ_i w_i k_i)^2`: n diagonal U1 then n(n-1) ordered-pair CU1.
fn square_network(reg: &[usize], weights: &[f64], coeff: f64, n_total: usize) -> Circuit {
    let n = reg.len();
    let mut c = Circuit::new(n_total);
    for i in 0..n {
        let th = coeff * weights[i] * weights[i];
        if th != 0.0 {
            c.push(Gate::u1(reg[i], th));
        }
    }
    for i in 0..n {
        for j in 0..n {
            let th = coeff * weights[i] * weights[j];
            if i != j && th != 0.0 {
                c.push(Gate::cu1(reg[i], reg[j], th));
            }
        }
    }
    c
}

fn binary_weights(n: usize) -> Vec<f64> {
    (0..n).map(|i| (1u64 << i) as f64).collect()
}

/// Two's-complement weights: the top bit counts -2^{n-1}, giving the signed DFT index.
fn signed_weights(n: usize) -> Vec<f64> {
    let mut w = binary_weights(n);
    w[n - 1] = -w[n - 1];
    w
}

/// Grid symmetric about zero with Q = ΔQ·(idx − N/2), as for the periodic convention on [−a, a].
pub fn is_centered(grid: &GridSpec) -> bool {
    let h = grid.spacing();
    (grid.q_min + 0.5 * h * grid.n_points() as f64).abs() < 1e-12 * h.max(1.0)
}

/// Bit literals of idx − N/2: bits below the top count +2^i on |1>, the top bit −2^{n-1} on |0>.
fn centered_literals(reg: &[usize]) -> Vec<(Control, f64)> {
    let n = reg.len();
    reg.iter()
        .enumerate()
        .map(|(i, &q)| {
            if i + 1 == n {
                (Control::zero(q), -((1u64 << i) as f64))
            } else {
                (Control::one(q), (1u64 << i) as f64)
            }
        })
        .collect()
}

/// Kinetic phase exp(-i Σ ω/2 p² tau/ħ) in the momentum representation reached by the QFT.
pub fn build_uk(model: &VibronicModel, grid: &GridSpec, layout: &QubitLayout, tau: f64) -> Circuit {
    let n = grid.n_qubits;
    let scale = 2.0 * PI / (grid.n_points() as f64 * grid.spacing());
    let w = signed_weights(n);
    let parts: Vec<Circuit> = model
        .modes
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let coeff = -0.5 * m.omega * scale * scale * tau / model.hbar;
            square_network(&layout.register(k), &w, coeff, layout.total())
        })
        .collect();
    Circuit::parallel(layout.total(), &parts)
}

/// Diagonal potential rewritten in register integers, per electronic branch (eV).
#[derive(Debug, Clone, PartialEq)]
pub struct IndexPolynomial {
    pub constant: [f64; 2],
    pub linear: Vec<[f64; 2]>,
    pub square: Vec<f64>,
    pub pairs: Vec<(usize, usize, [f64; 2])>,
}

pub fn index_polynomial(model: &VibronicModel, grid: &GridSpec) -> IndexPolynomial {
    let (q0, h) = (grid.q_min, grid.spacing());
    let d = model.n_modes();
    let mut constant = [model.offset(0), model.offset(1)];
    let mut linear = vec![[0.0; 2]; d];
    let mut square = vec![0.0; d];
    for (k, m) in model.modes.iter().enumerate() {
        square[k] = 0.5 * m.omega * h * h;
        for s in 0..2 {
            constant[s] += 0.5 * m.omega * q0 * q0 + m.kappa(s) * q0;
            linear[k][s] += m.omega * q0 * h + m.kappa(s) * h;
        }
    }
    let mut pairs = vec![];
    for p in model.diag_pairs() {
        for s in 0..2 {
            let g = p.coeff[s];
            constant[s] += g * q0 * q0;
            linear[p.l][s] += g * q0 * h;
            linear[p.m][s] += g * q0 * h;
        }
        pairs.push((p.l, p.m, [p.coeff[0] * h * h, p.coeff[1] * h * h]));
    }
    IndexPolynomial { constant, linear, square, pairs }
}

/// Edge colouring of mode pairs with as few groups as a bounded backtracking search finds;
/// pairs in one group share no mode. Falls back to first-fit when the search gives up.
pub fn pair_groups(pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let greedy = first_fit(pairs);
    let n_modes = pairs.iter().map(|&(l, m)| l.max(m) + 1).max().unwrap_or(0);
    let mut degree = vec![0; n_modes];
    for &(l, m) in pairs {
        degree[l] += 1;
        degree[m] += 1;
    }
    let lower = degree.iter().copied().max().unwrap_or(0);
    for k in lower..greedy.len() {
        let mut colour = vec![usize::MAX; pairs.len()];
        let mut budget = 200_000usize;
        if colour_edges(pairs, 0, k, &mut colour, &mut budget) {
            let mut groups = vec![vec![]; k];
            for (idx, &c) in colour.iter().enumerate() {
                groups[c].push(idx);
            }
            return groups;
        }
    }
    greedy
}

fn first_fit(pairs: &[(usize, usize)]) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = vec![];
    for (idx, &(l, m)) in pairs.iter().enumerate() {
        let free = groups.iter().position(|g| g.iter().all(|&o| ![pairs[o].0, pairs[o].1].iter().any(|x| *x == l || *x == m)));
        match free {
            Some(g) => groups[g].push(idx),
            None => groups.push(vec![idx]),
        }
    }
    groups
}

fn colour_edges(pairs: &[(usize, usize)], at: usize, k: usize, colour: &mut [usize], budget: &mut usize) -> bool {
    if at == pairs.len() {
        return true;
    }
    if *budget == 0 {
        return false;
    }
    *budget -= 1;
    let (l, m) = pairs[at];
    let used_max = colour[..at].iter().copied().max().map_or(0, |c| c + 1);
    // colours above the highest one in use are interchangeable, so try only one of them
    for c in 0..k.min(used_max + 1) {
        let clash = (0..at).any(|o| colour[o] == c && [pairs[o].0, pairs[o].1].iter().any(|x| *x == l || *x == m));
        if !clash {
            colour[at] = c;
            if colour_edges(pairs, at + 1, k, colour, budget) {
                return true;
            }
        }
    }
    colour[at] = usize::MAX;
    false
}

/// Product phase coeff·idx_l·idx_m as n² CU1 between the two registers.
fn product_network(reg_l: &[usize], reg_m: &[usize], coeff: f64, n_total: usize) -> Circuit {
    let mut c = Circuit::new(n_total);
    for i in 0..reg_l.len() {
        for j in 0..reg_m.len() {
            let th = coeff * (1u64 << (i + j)) as f64;
            if th != 0.0 {
                c.push(Gate::cu1(reg_l[i], reg_m[j], th));
            }
        }
    }
    c
}

/// On-diagonal bilinear network exp(-i γ ΔQ² idx_l idx_m tau/ħ); the affine parts of
/// Q_l Q_m are carried by the constant and linear columns of [`build_udiag`].
pub fn build_bilinear_diag(
    grid: &GridSpec,
    layout: &QubitLayout,
    l: usize,
    m: usize,
    gamma: f64,
    tau: f64,
    hbar: f64,
) -> Circuit {
    assert_ne!(l, m);
    let h = grid.spacing();
    product_network(&layout.register(l), &layout.register(m), -gamma * h * h * tau / hbar, layout.total())
}

/// Common phase of one electronic branch at the pattern qubit: U1(a) X U1(a) X = e^{ia}.
fn global_phase_columns(q: usize, a: f64, n_total: usize) -> Circuit {
    let mut c = Circuit::new(n_total);
    c.push(Gate::u1(q, a));
    c.push(Gate::x(q));
    c.push(Gate::u1(q, a));
    c.push(Gate::x(q));
    c
}

fn pattern_qubit(model: &VibronicModel, layout: &QubitLayout) -> usize {
    let k = model.coupling_mode().unwrap_or(model.n_modes() - 1);
    layout.mode_qubit(k, 0)
}

/// Diagonal potential exp(-i V_s tau/ħ) for both branches at once.
///
/// Columns: four for the S1 constant (global phase pattern), one linear column (S1 linear
/// terms on every bit plus the S2-S1 constant on the electronic qubit), the squared-index
/// networks of all modes in parallel, then bilinear groups. Branch differences of the linear
/// and bilinear terms become electronic-controlled phases placed into free slots.
pub fn build_udiag(model: &VibronicModel, grid: &GridSpec, layout: &QubitLayout, tau: f64) -> Circuit {
    let poly = index_polynomial(model, grid);
    let nt = layout.total();
    let n = grid.n_qubits;
    let e = layout.electronic();
    let f = -tau / model.hbar;
    let bits = binary_weights(n);

    let mut c = global_phase_columns(pattern_qubit(model, layout), f * poly.constant[0], nt);
    let mut lin = vec![];
    for k in 0..model.n_modes() {
        for i in 0..n {
            let th = f * poly.linear[k][0] * bits[i];
            if th != 0.0 {
                lin.push(Gate::u1(layout.mode_qubit(k, i), th));
            }
        }
    }
    let dc = f * (poly.constant[1] - poly.constant[0]);
    if dc != 0.0 {
        lin.push(Gate::u1(e, dc));
    }
    c.push_column(lin);
    let squares: Vec<Circuit> =
        (0..model.n_modes()).map(|k| square_network(&layout.register(k), &bits, f * poly.square[k], nt)).collect();
    c.append(&Circuit::parallel(nt, &squares));

    let pair_list: Vec<(usize, usize)> = poly.pairs.iter().map(|p| (p.0, p.1)).collect();
    for group in pair_groups(&pair_list) {
        let nets: Vec<Circuit> = group
            .iter()
            .map(|&p| {
                let (l, m, g) = poly.pairs[p];
                product_network(&layout.register(l), &layout.register(m), f * g[0], nt)
            })
            .collect();
        c.append(&Circuit::parallel(nt, &nets));
    }

    // branch differences, applied when the electronic qubit is |1>
    for k in 0..model.n_modes() {
        let dl = poly.linear[k][1] - poly.linear[k][0];
        for i in 0..n {
            let th = f * dl * bits[i];
            if th != 0.0 {
                c.insert_earliest(Gate::cu1(e, layout.mode_qubit(k, i), th));
            }
        }
    }
    for &(l, m, g) in &poly.pairs {
        let dg = g[1] - g[0];
        if dg == 0.0 {
            continue;
        }
        for i in 0..n {
            for j in 0..n {
                let th = f * dg * (1u64 << (i + j)) as f64;
                let gate = Gate::new(
                    GateKind::U1(th),
                    vec![layout.mode_qubit(m, j)],
                    vec![Control::one(e), Control::one(layout.mode_qubit(l, i))],
                );
                c.insert_earliest(gate);
            }
        }
    }
    c
}

/// Diagonal potential of a single branch, every gate conditioned on the electronic qubit
/// (|0> for S1, |1> for S2). Gates share that control, so each sits in its own column.
pub fn build_udiag_branch(
    model: &VibronicModel,
    grid: &GridSpec,
    layout: &QubitLayout,
    tau: f64,
    branch: usize,
) -> Circuit {
    let poly = index_polynomial(model, grid);
    let nt = layout.total();
    let n = grid.n_qubits;
    let ctl = Control { qubit: layout.electronic(), on_one: branch == 1 };
    let f = -tau / model.hbar;
    let bits = binary_weights(n);
    let mut body = global_phase_columns(pattern_qubit(model, layout), f * poly.constant[branch], nt);
    for k in 0..model.n_modes() {
        let reg = layout.register(k);
        for i in 0..n {
            let th = f * poly.linear[k][branch] * bits[i];
            if th != 0.0 {
                body.push(Gate::u1(reg[i], th));
            }
        }
        body.append(&square_network(&reg, &bits, f * poly.square[k], nt));
    }
    for &(l, m, g) in &poly.pairs {
        body.append(&product_network(&layout.register(l), &layout.register(m), f * g[branch], nt));
    }
    body.controlled(ctl)
}

/// Off-diagonal block exp(-i c(Q) X tau/ħ) with c(Q) = λ Q_c + Σ μ Q_l Q_m.
///
/// Returns the controlled-Rx network and, separately, the uncontrolled Rx carrying the
/// constant part of c at idx = 0, which callers float into an earlier free slot.
pub fn build_offdiag_parts(
    model: &VibronicModel,
    grid: &GridSpec,
    layout: &QubitLayout,
    tau: f64,
    expand_ccrx: bool,
) -> (Circuit, Option<Gate>) {
    let (q0, h) = (grid.q_min, grid.spacing());
    let nt = layout.total();
    let n = grid.n_qubits;
    let e = layout.electronic();
    let f = 2.0 * tau / model.hbar;
    let mut offset = 0.0;
    // one Rx angle per controlling mode qubit, in register order
    let mut lin = vec![vec![0.0; n]; model.n_modes()];
    if let Some(k) = model.coupling_mode() {
        offset += model.lambda * q0;
        for (i, a) in lin[k].iter_mut().enumerate() {
            *a += model.lambda * h * (1u64 << i) as f64;
        }
    }
    let pairs = model.off_pairs();
    // on a centred grid Q_l Q_m is purely bilinear in bit literals
    let affine = if is_centered(grid) { &[][..] } else { &pairs[..] };
    for p in affine {
        let mu = p.coeff[0];
        offset += mu * q0 * q0;
        for i in 0..n {
            lin[p.l][i] += mu * q0 * h * (1u64 << i) as f64;
            lin[p.m][i] += mu * q0 * h * (1u64 << i) as f64;
        }
    }
    let mut c = Circuit::new(nt);
    for (k, angles) in lin.iter().enumerate() {
        for (i, a) in angles.iter().enumerate() {
            if *a != 0.0 {
                c.push(Gate::crx(layout.mode_qubit(k, i), e, f * a));
            }
        }
    }
    for p in &pairs {
        c.append(&build_bilinear_offdiag(grid, layout, p.l, p.m, p.coeff[0], tau, model.hbar, expand_ccrx));
    }
    let off = (offset != 0.0).then(|| Gate::rx(e, f * offset));
    (c, off)
}

/// Inter-state coupling block as a standalone circuit (offset Rx last).
pub fn build_uc(model: &VibronicModel, grid: &GridSpec, layout: &QubitLayout, tau: f64) -> Circuit {
    let (mut c, off) = build_offdiag_parts(model, grid, layout, tau, false);
    if let Some(g) = off {
        c.float_back(g);
    }
    c
}

/// Off-diagonal bilinear network: n² doubly-controlled Rx on the electronic qubit, optionally
/// expanded to five two-qubit gates each. On a centred grid it carries all of μ Q_l Q_m,
/// otherwise only the μ ΔQ² idx_l idx_m part.
#[allow(clippy::too_many_arguments)]
pub fn build_bilinear_offdiag(
    grid: &GridSpec,
    layout: &QubitLayout,
    l: usize,
    m: usize,
    mu: f64,
    tau: f64,
    hbar: f64,
    expand: bool,
) -> Circuit {
    assert_ne!(l, m);
    let h = grid.spacing();
    let e = layout.electronic();
    let literals = |k: usize| -> Vec<(Control, f64)> {
        if is_centered(grid) {
            centered_literals(&layout.register(k))
        } else {
            layout.register(k).iter().zip(binary_weights(grid.n_qubits)).map(|(&q, w)| (Control::one(q), w)).collect()
        }
    };
    let mut c = Circuit::new(layout.total());
    for (ci, wi) in literals(l) {
        for &(cj, wj) in &literals(m) {
            let th = 2.0 * mu * h * h * wi * wj * tau / hbar;
            if th != 0.0 {
                c.push(Gate::new(GateKind::Rx(th), vec![e], vec![ci, cj]));
            }
        }
    }
    if expand {
        c.expand_ccrx()
    } else {
        c
    }
}

fn append_offdiag(c: &mut Circuit, model: &VibronicModel, grid: &GridSpec, layout: &QubitLayout, tau: f64) {
    let (net, off) = build_offdiag_parts(model, grid, layout, tau, true);
    c.append(&net);
    if let Some(g) = off {
        c.float_back(g);
    }
}

/// One time step on the system registers.
///
/// Potential-first: U_diag(dt/2) U_c(dt/2) QFT U_K(dt) QFT⁻¹ U_c(dt/2) U_diag(dt/2), position
/// basis in and out. Kinetic-first: U_K(dt/2) QFT⁻¹ U_diag(dt) U_c(dt) QFT U_K(dt/2), with the
/// registers holding the momentum representation in and out.
pub fn build_timestep(
    model: &VibronicModel,
    grid: &GridSpec,
    layout: &QubitLayout,
    dt: f64,
    split: SplitOrder,
) -> Circuit {
    let mut c = Circuit::new(layout.total());
    match split {
        SplitOrder::PotentialFirst => {
            let half = 0.5 * dt;
            c.append(&build_udiag(model, grid, layout, half));
            append_offdiag(&mut c, model, grid, layout, half);
            c.append(&build_qft_all(layout, false));
            c.append(&build_uk(model, grid, layout, dt));
            c.append(&build_qft_all(layout, true));
            append_offdiag(&mut c, model, grid, layout, half);
            c.append(&build_udiag(model, grid, layout, half));
        }
        SplitOrder::KineticFirst => {
            let uk = build_uk(model, grid, layout, 0.5 * dt);
            c.append(&uk);
            c.append(&build_qft_all(layout, true));
            c.append(&build_udiag(model, grid, layout, dt));
            append_offdiag(&mut c, model, grid, layout, dt);
            c.append(&build_qft_all(layout, false));
            c.append(&uk);
        }
    }
    c
}

/// `n_steps` time steps, position basis in and out.
pub fn build_evolution(
    model: &VibronicModel,
    grid: &GridSpec,
    layout: &QubitLayout,
    dt: f64,
    split: SplitOrder,
    n_steps: usize,
) -> Circuit {
    let step = build_timestep(model, grid, layout, dt, split);
    let mut c = Circuit::new(layout.total());
    if split == SplitOrder::KineticFirst {
        c.append(&build_qft_all(layout, false));
    }
    for _ in 0..n_steps {
        c.append(&step);
    }
    if split == SplitOrder::KineticFirst {
        c.append(&build_qft_all(layout, true));
    }
    c
}
