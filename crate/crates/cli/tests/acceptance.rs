//! One test per acceptance criterion; each prints a single PASS/FAIL line before asserting.

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;
use std::path::PathBuf;
use vibronic::circuits::algorithms::{autocorr_from_probabilities, build_hadamard_test, hadamard_scan, Part};
use vibronic::circuits::builders::{build_evolution, build_initial_state, build_qft, build_state_prep, build_timestep};
use vibronic::circuits::emulator::{apply, zero_state};
use vibronic::circuits::{count_kind, GateKind, QubitLayout};
use vibronic::resources::{assay, verify_against_builder, AssayInput, ModelClass, Variant};
use vibronic::signals::{multinomial, spectrum, tvd, Damping, ScanMode};
use vibronic::soft::{energy, propagate, PropagatorPlan, SplitOrder};
use vibronic::{initial_state, Convention, GridSpec, TimeGrid, VibronicModel};
use vibronic_cli::commands::*;
use vibronic_cli::*;

fn report(id: u32, name: &str, pass: bool, detail: &str) {
    println!("criterion {id:>2} {name:<28} {} {detail}", if pass { "PASS" } else { "FAIL" });
}

fn out_dir() -> (tempfile::TempDir, OutArgs) {
    let d = tempfile::tempdir().unwrap();
    let out = OutArgs { out: PathBuf::from(d.path()) };
    (d, out)
}

fn model_args(modes: Option<usize>) -> ModelArgs {
    ModelArgs { model: "pyrazine-4d".into(), modes }
}

fn grid_args(n: usize) -> GridArgs {
    GridArgs { n, range: Range(-5.0, 5.0), convention: Convention::Endpoint }
}

fn time_args(nt: usize, total_fs: f64, stride: usize) -> TimeArgs {
    TimeArgs { nt: Some(nt), total_fs: Some(total_fs), stride: Some(stride), split: SplitOrder::PotentialFirst }
}

fn endpoint(n: usize) -> GridSpec {
    GridSpec::new(n, -5.0, 5.0, Convention::Endpoint).unwrap()
}

#[test]
fn criterion_01_zpe_tables() {
    let (_d, out) = out_dir();
    let rows = run_zpe_scan(&ZpeScanArgs { model: model_args(None), convention: Some(Convention::Endpoint), out }).unwrap();
    let expected = [
        ("fixed-range", 4, 0.6524371769),
        ("fixed-range", 8, 0.2340338987),
        ("fixed-range", 16, 0.2258500005),
        ("fixed-range", 32, 0.2258500000),
        ("fixed-range", 64, 0.2258500000),
        ("fixed-resolution", 8, 0.2254839449),
        ("fixed-resolution", 16, 0.2258500005),
        ("fixed-resolution", 32, 0.2258500001),
        ("fixed-resolution", 64, 0.2258500001),
    ];
    let mut worst = 0.0f64;
    for (table, n, want) in expected {
        let r = rows.iter().find(|r| r.table == table && r.n_points == n).unwrap();
        worst = worst.max((r.zpe - want).abs());
    }
    let dq8 = rows.iter().find(|r| r.table == "fixed-range" && r.n_points == 8).unwrap().dq;
    let pass = worst < 1e-8 && (dq8 - 1.43).abs() < 5e-3;
    report(1, "ZPE tables", pass, &format!("max |dE| = {worst:.2e} eV over 9 entries, dQ(N=8) = {dq8:.4}"));
    assert!(pass);
}

#[test]
fn criterion_02_gate_depth_tables() {
    let a = |d, n, n_t, variant, class| assay(&AssayInput { d, n, n_t, variant, model_class: class }).unwrap();
    let (l, q) = (ModelClass::Linear4D, ModelClass::Quadratic24D);
    let got = [
        a(4, 4, 512, Variant::A, l).n_i,
        a(4, 5, 1024, Variant::A, l).n_i,
        a(4, 4, 512, Variant::A, l).n_t_depth,
        a(4, 5, 1024, Variant::A, l).n_t_depth,
        a(4, 4, 512, Variant::B, l).n_m.unwrap(),
        a(4, 5, 1024, Variant::B, l).n_m.unwrap(),
        a(4, 4, 512, Variant::A, l).total,
        a(4, 5, 1024, Variant::A, l).total,
        a(4, 4, 512, Variant::B, l).total,
        a(4, 5, 1024, Variant::B, l).total,
        a(24, 4, 512, Variant::A, q).n_p,
        a(24, 5, 1024, Variant::A, q).n_p,
        a(24, 4, 512, Variant::A, q).n_t_depth,
        a(24, 5, 1024, Variant::A, q).n_t_depth,
        a(24, 4, 512, Variant::A, q).total,
        a(24, 5, 1024, Variant::A, q).total,
        a(24, 4, 512, Variant::B, q).total,
        a(24, 5, 1024, Variant::B, q).total,
        a(4, 4, 512, Variant::A, l).qubits_state,
        a(24, 4, 512, Variant::A, q).qubits_state,
        a(24, 4, 512, Variant::B, q).qubits_total,
        a(24, 5, 1024, Variant::B, q).qubits_total,
    ];
    let want = [
        29, 61, 45_990, 131_967, 49, 60, 46_021, 132_030, 46_068, 132_088, 12, 17, 1_275_991, 3_983_596, 1_276_022,
        3_983_659, 1_276_069, 3_983_717, 17, 97, 106, 131,
    ];
    let wrong: Vec<String> =
        got.iter().zip(&want).filter(|(g, w)| g != w).map(|(g, w)| format!("{g} != {w}")).collect();
    report(2, "gate-depth tables", wrong.is_empty(), &format!("{}/{} exact {wrong:?}", want.len() - wrong.len(), want.len()));
    assert!(wrong.is_empty());
}

#[test]
fn criterion_03_builder_formula_agreement() {
    let mut notes = vec![];
    let mut pass = true;
    for n in 2..=5u64 {
        let input = AssayInput { d: 4, n, n_t: 4, variant: Variant::A, model_class: ModelClass::Linear4D };
        let cmp = verify_against_builder(&input).unwrap();
        let m = VibronicModel::pyrazine_4d();
        let layout = QubitLayout::system(4, n as usize);
        let step = build_timestep(&m, &endpoint(n as usize), &layout, 0.1, SplitOrder::PotentialFirst).depth() as u64;
        let formula = assay(&input).unwrap().per_step;
        pass &= cmp.all_match() && step == formula;
        notes.push(format!("n={n}: step {step}/{formula}"));
    }
    for n in 2..=6u64 {
        let qft = build_qft(n as usize, false).depth() as u64;
        let n_p = assay(&AssayInput { d: 4, n, n_t: 4, variant: Variant::A, model_class: ModelClass::Linear4D }).unwrap().n_p;
        pass &= qft == n_p;
        notes.push(format!("QFT n={n}: {qft}/{n_p}"));
    }
    report(3, "builder vs formula", pass, &notes.join(", "));
    assert!(pass);
}

#[test]
fn criterion_04_oracle_equivalence() {
    let run = |modes, tol| {
        let (_d, out) = out_dir();
        let args = VerifyArgs {
            model: model_args(Some(modes)),
            grid: grid_args(4),
            time: time_args(512, 264.0 * 512.0 / 2048.0, 16),
            tolerance: tol,
            strict: false,
            budget_mib: 1024,
            out,
        };
        run_verify(&args).unwrap()
    };
    let small = run(2, 1e-8);
    let full = run(4, 1e-6);
    let pass = small.qubits == 9 && full.qubits == 17 && small.passed() && full.passed();
    report(
        4,
        "oracle equivalence",
        pass,
        &format!(
            "9 qubits: 1-F = {:.2e}; 17 qubits: 1-F = {:.2e}, max |dA| = {:.2e}",
            1.0 - small.fidelity,
            1.0 - full.fidelity,
            full.max_autocorr_diff
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_05_state_preparation() {
    let n = 4;
    let g = endpoint(n);
    let target = vibronic::model::gaussian_amplitudes(&g);
    let prep = build_state_prep(n, &target).unwrap();
    let depth = prep.depth();
    let mut v = zero_state(n);
    apply(&prep, &mut v).unwrap();
    let amp_err = v.iter().zip(&target).map(|(a, t)| (a - Complex64::new(*t, 0.0)).norm()).fold(0.0, f64::max);

    let probs: Vec<f64> = v.iter().map(|a| a.norm_sqr()).collect();
    let shots = 1_000_000;
    let counts = multinomial(&probs, shots, &mut ChaCha8Rng::seed_from_u64(7));
    let hist: Vec<f64> = counts.iter().map(|&c| c as f64 / shots as f64).collect();
    let ideal: Vec<f64> = target.iter().map(|t| t * t).collect();
    let d = tvd(&hist, &ideal).unwrap();

    // the full initial state on the 4D register uses the same per-mode circuit
    let m = VibronicModel::pyrazine_4d();
    let layout = QubitLayout::system(4, n);
    let mut full = zero_state(layout.total());
    apply(&build_initial_state(&m, &g, &layout), &mut full).unwrap();
    let oracle = initial_state(&m, &g);
    let full_err = full.iter().zip(&oracle.amplitudes).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);

    let pass = depth == 29 && amp_err < 1e-10 && full_err < 1e-10 && d < 0.015;
    report(
        5,
        "state preparation",
        pass,
        &format!("depth {depth}, amplitude err {amp_err:.1e} (4D {full_err:.1e}), 1e6-shot TVD {:.3}%", 100.0 * d),
    );
    assert!(pass);
}

#[test]
fn criterion_06_hadamard_test() {
    let m = VibronicModel::pyrazine_2d();
    let n = 4;
    let g = endpoint(n);
    let time = TimeGrid::from_total(264.0 * 512.0 / 2048.0, 512, 16).unwrap();
    let layout = QubitLayout::system(2, n).with_ancilla();
    let sys = QubitLayout::system(2, n);
    let mut psi = zero_state(sys.total());
    apply(&build_initial_state(&m, &g, &sys), &mut psi).unwrap();
    let step = build_timestep(&m, &g, &layout, time.dt, SplitOrder::PotentialFirst);
    let probs = hadamard_scan(&step, &layout, &psi, time.n_steps, time.sample_stride).unwrap();
    let plan = PropagatorPlan::new(&m, &g, time.dt, SplitOrder::PotentialFirst).unwrap();
    let oracle = propagate(&plan, &initial_state(&m, &g), &time).unwrap();
    let worst = probs
        .iter()
        .zip(&oracle.autocorr.values)
        .map(|((re, im), a)| (autocorr_from_probabilities(*re, *im) - a).norm())
        .fold(0.0, f64::max);

    let evo = build_evolution(&m, &g, &layout, time.dt, SplitOrder::PotentialFirst, 2);
    let re = build_hadamard_test(&evo, &layout, Part::Real).unwrap();
    let im = build_hadamard_test(&evo, &layout, Part::Imag).unwrap();
    let extra_s = count_kind(&im, |k| *k == GateKind::S) as i64 - count_kind(&re, |k| *k == GateKind::S) as i64;
    let extra = im.gate_count() as i64 - re.gate_count() as i64;

    let pass = probs.len() == oracle.autocorr.values.len() && worst < 1e-8 && extra_s == 1 && extra == 1;
    report(
        6,
        "Hadamard test",
        pass,
        &format!("{} samples, max |dA| = {worst:.2e}, imag circuit +{extra} gate (+{extra_s} S)", probs.len()),
    );
    assert!(pass);
}

#[test]
fn criterion_07_qpe_demo() {
    let (_d, out) = out_dir();
    let mut args = QpeDemoArgs {
        grid: grid_args(4),
        m: 6,
        dt: 1.0,
        omega: 0.074,
        shots: 10_000,
        seed: 3,
        eigenstate: false,
        budget_mib: 1024,
        out,
    };
    let gauss = run_qpe_demo(&args).unwrap();
    args.eigenstate = true;
    let eig = run_qpe_demo(&args).unwrap();
    let within = (gauss.dominant_energy - gauss.level).abs() <= gauss.bin_width;
    let pass = within && eig.dominant_mass >= 4.0 / (PI * PI);
    report(
        7,
        "QPE demo",
        pass,
        &format!(
            "bin {} -> {:.4} eV vs level {:.4} eV (width {:.4}); eigenstate peak mass {:.3}",
            gauss.dominant_bin, gauss.dominant_energy, gauss.level, gauss.bin_width, eig.dominant_mass
        ),
    );
    assert!(pass);
}

#[test]
fn criterion_08_spectrum_properties() {
    let run = |nt, stride| {
        let (_d, out) = out_dir();
        let args = PropagateArgs {
            model: model_args(None),
            grid: grid_args(4),
            time: time_args(nt, 264.0, stride),
            engine: Engine::Soft,
            budget_mib: 1024,
            out,
        };
        run_propagate(&args).unwrap()
    };
    let coarse = run(1024, 8);
    let fine = run(2048, 16);
    let damping = Damping::default();
    let s1 = spectrum(&coarse.autocorr, damping).unwrap();
    let s2 = spectrum(&fine.autocorr, damping).unwrap();
    let a0 = (fine.autocorr.values[0] - 1.0).norm();
    let sane = |s: &vibronic::signals::SpectrumSeries| {
        s.intensities.iter().all(|&x| x >= 0.0) && (s.intensities.iter().sum::<f64>() - 1.0).abs() < 1e-12
    };
    let same_grid = s1.energies.len() == s2.energies.len();
    let d = if same_grid { tvd(&s1.intensities, &s2.intensities).unwrap() } else { 1.0 };
    let pass = a0 < 1e-12 && sane(&s1) && sane(&s2) && d < 0.02;
    report(8, "spectrum properties", pass, &format!("|A(0)-1| = {a0:.1e}, TVD(1024 vs 2048 steps) = {:.3}%", 100.0 * d));
    assert!(pass);
}

#[test]
fn criterion_09_shot_budgets() {
    let (_d, out) = out_dir();
    let args = ShotsScanArgs {
        model: model_args(None),
        grid: grid_args(4),
        time: time_args(1024, 264.0, 1),
        damp: DampArgs { tau_fs: Some(Tau(None)), damp_d: false },
        mode: ModeChoice::Both,
        threshold: vec![4.0, 3.0, 2.0, 1.0],
        seeds: 11,
        seed: 0,
        step: 1000,
        max: 300_000,
        sustain: 5,
        window: Window(Some((0.0, 2.0))),
        out,
    };
    let r = run_shots_scan(&args).unwrap();
    let direct = r.medians(ScanMode::Direct).unwrap();
    let autoc = r.medians(ScanMode::Autocorr).unwrap();
    let in_band = |got: &[Option<u64>], want: [f64; 4]| {
        got.iter().zip(want).all(|(g, w)| g.is_some_and(|g| (g as f64 - w).abs() <= 0.5 * w))
    };
    let ordered = direct.iter().zip(autoc).all(|(d, a)| match (d, a) {
        (Some(d), Some(a)) => a >= d,
        (_, None) => true,
        (None, Some(_)) => false,
    });
    let pass = in_band(direct, [7e3, 15e3, 32e3, 134e3]) && in_band(autoc, [16e3, 22e3, 54e3, 214e3]) && ordered;
    report(9, "shot budgets", pass, &format!("direct {direct:?}, autocorr {autoc:?} (median of 11 seeds)"));
    assert!(pass);
}

#[test]
fn criterion_10_physics_properties() {
    let m = VibronicModel::pyrazine_4d();
    let g = endpoint(4);
    let psi0 = initial_state(&m, &g);

    // norm conservation per step
    let plan = PropagatorPlan::new(&m, &g, 264.0 / 2048.0, SplitOrder::PotentialFirst).unwrap();
    let mut psi = psi0.clone();
    let mut norm_err = 0.0f64;
    for _ in 0..64 {
        let before = psi.norm();
        plan.step(&mut psi).unwrap();
        norm_err = norm_err.max((psi.norm() - before).abs());
    }

    // energy drift over the same 66.56 fs at three step sizes
    let e0 = energy(&m, &g, &psi0);
    let drift = |dt: f64| {
        let plan = PropagatorPlan::new(&m, &g, dt, SplitOrder::PotentialFirst).unwrap();
        let mut p = psi0.clone();
        for _ in 0..(66.56 / dt).round() as usize {
            plan.step(&mut p).unwrap();
        }
        (energy(&m, &g, &p) - e0).abs()
    };
    let d = [0.52, 0.26, 0.13].map(drift);
    let ratios = [d[0] / d[1], d[1] / d[2]];
    let drift_ok = ratios.iter().all(|r| (3.0..=5.0).contains(r));

    // no inter-state coupling keeps everything on S2
    let mut uncoupled = m.clone();
    uncoupled.lambda = 0.0;
    let t = TimeGrid::from_total(264.0, 2048, 16).unwrap();
    let plan0 = PropagatorPlan::new(&uncoupled, &g, t.dt, SplitOrder::PotentialFirst).unwrap();
    let tr0 = propagate(&plan0, &psi0, &t).unwrap();
    let s2_err = tr0.populations.iter().map(|p| (p[1] - 1.0).abs().max(p[0])).fold(0.0, f64::max);

    // edge-slice probabilities over the production run
    let (_dir, out) = out_dir();
    let args = PropagateArgs {
        model: model_args(None),
        grid: grid_args(4),
        time: time_args(2048, 264.0, 16),
        engine: Engine::Soft,
        budget_mib: 1024,
        out,
    };
    let tr = run_propagate(&args).unwrap();
    let boundary = max_boundary(&tr);

    let checks = [
        ("norm", norm_err <= 1e-12, format!("max per-step norm change {norm_err:.1e}")),
        ("drift", drift_ok, format!("drift {:.2e}/{:.2e}/{:.2e} eV, ratios {:.2}, {:.2}", d[0], d[1], d[2], ratios[0], ratios[1])),
        ("lambda=0", s2_err < 1e-12, format!("max |P_S2 - 1| {s2_err:.1e}")),
        ("boundary", boundary < 1e-3, format!("max edge-slice probability {boundary:.3e}")),
    ];
    let pass = checks.iter().all(|c| c.1);
    let detail: Vec<String> =
        checks.iter().map(|(k, ok, s)| format!("{k} {} ({s})", if *ok { "ok" } else { "FAILED" })).collect();
    report(10, "physics properties", pass, &detail.join("; "));
    assert!(pass, "{}", detail.join("; "));
}
