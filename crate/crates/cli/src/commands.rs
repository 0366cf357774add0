use crate::*;
use nalgebra::{DMatrix, SymmetricEigen};
use std::f64::consts::PI;
use std::fmt::Write as _;
use vibronic::circuits::algorithms::{build_qpe, phase_to_energy, run_qpe};
use vibronic::circuits::builders::{build_initial_state, build_timestep};
use vibronic::circuits::emulator::{apply, unitary, zero_state};
use vibronic::circuits::QubitLayout;
use vibronic::model::{ModeParams, Symmetry};
use vibronic::resources::{assay, verify_against_builder, AssayInput, AssayReport, Comparison, ModelClass, Variant};
use vibronic::signals::{median_crossings, shot_grid, ScanMode, ScanResult, ScanTarget};

fn budget(mib: u64) -> u128 {
    (mib as u128) << 20
}

// ---- zpe-scan ----

#[derive(Args, Debug, Clone)]
pub struct ZpeScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    /// Grid convention; both are scanned when omitted.
    #[arg(long)]
    pub convention: Option<Convention>,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone, Serialize)]
pub struct ZpeRow {
    pub table: &'static str,
    pub convention: Convention,
    pub n_points: usize,
    pub q_min: f64,
    pub q_max: f64,
    pub dq: f64,
    pub zpe: f64,
}

/// (n_qubits, half range) for the fixed-range and fixed-resolution scans.
pub const FIXED_RANGE: [(usize, f64); 5] = [(2, 5.0), (3, 5.0), (4, 5.0), (5, 5.0), (6, 5.0)];
pub const FIXED_RESOLUTION: [(usize, f64); 4] = [(3, 2.5), (4, 5.0), (5, 10.0), (6, 20.0)];

pub fn zpe_rows(model: &VibronicModel, conventions: &[Convention]) -> Result<Vec<ZpeRow>> {
    let mut rows = vec![];
    for &convention in conventions {
        for (table, points) in [("fixed-range", &FIXED_RANGE[..]), ("fixed-resolution", &FIXED_RESOLUTION[..])] {
            for &(n, a) in points {
                let g = GridSpec::new(n, -a, a, convention)?;
                rows.push(ZpeRow {
                    table,
                    convention,
                    n_points: g.n_points(),
                    q_min: g.q_min,
                    q_max: g.q_max,
                    dq: g.spacing(),
                    zpe: vibronic::soft::zpe(model, &g),
                });
            }
        }
    }
    Ok(rows)
}

pub fn run_zpe_scan(args: &ZpeScanArgs) -> Result<Vec<ZpeRow>> {
    let model = args.model.load()?;
    let conventions = match args.convention {
        Some(c) => vec![c],
        None => vec![Convention::Endpoint, Convention::Periodic],
    };
    let rows = zpe_rows(&model, &conventions)?;
    write_csv(&args.out.path("zpe_scan.csv")?, &rows)?;
    Ok(rows)
}

pub fn zpe_scan(args: &ZpeScanArgs) -> Result<String> {
    let rows = run_zpe_scan(args)?;
    let mut s = format!("{:<18}{:<10}{:>6}{:>16}{:>10}{:>16}\n", "table", "grid", "N", "range", "dQ", "ZPE (eV)");
    for r in rows {
        let range = format!("[{}, {}]", r.q_min, r.q_max);
        let _ = writeln!(
            s,
            "{:<18}{:<10}{:>6}{:>16}{:>10.4}{:>16.10}",
            r.table, r.convention, r.n_points, range, r.dq, r.zpe
        );
    }
    Ok(s)
}

// ---- propagate ----

#[derive(Args, Debug, Clone)]
pub struct PropagateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    #[arg(long, value_enum, default_value = "soft")]
    pub engine: Engine,
    /// Statevector memory limit for the circuit engine, MiB.
    #[arg(long, default_value_t = DEFAULT_BUDGET_MIB)]
    pub budget_mib: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct PopulationRow {
    t_fs: f64,
    p_s1: f64,
    p_s2: f64,
}

pub fn run_propagate(args: &PropagateArgs) -> Result<Trajectory> {
    let model = args.model.load()?;
    let grid = args.grid.grid()?;
    let time = args.time.time(2048, 264.0, 16)?;
    let tr = run_engine(args.engine, &model, &grid, &time, args.time.split, budget(args.budget_mib))?;

    write_csv(&args.out.path("autocorr.csv")?, &autocorr_rows(&tr.autocorr))?;
    let pops: Vec<PopulationRow> = tr
        .autocorr
        .times
        .iter()
        .zip(&tr.populations)
        .map(|(&t_fs, p)| PopulationRow { t_fs, p_s1: p[0], p_s2: p[1] })
        .collect();
    write_csv(&args.out.path("populations.csv")?, &pops)?;

    let path = args.out.path("boundary.csv")?;
    let mut w = csv::Writer::from_path(&path).with_context(|| format!("writing {}", path.display()))?;
    let mut header = vec!["t_fs".to_string()];
    header.extend(model.modes.iter().map(|m| m.label.clone()));
    header.push("max".into());
    w.write_record(&header)?;
    for (t, b) in tr.autocorr.times.iter().zip(&tr.boundary) {
        let mut rec = vec![t.to_string()];
        rec.extend(b.iter().map(|x| x.to_string()));
        rec.push(b.iter().cloned().fold(0.0, f64::max).to_string());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(tr)
}

pub fn max_boundary(tr: &Trajectory) -> f64 {
    tr.boundary.iter().flatten().cloned().fold(0.0, f64::max)
}

pub fn propagate(args: &PropagateArgs) -> Result<String> {
    let tr = run_propagate(args)?;
    let last = tr.populations.last().expect("t = 0 is always recorded");
    Ok(format!(
        "samples {}\nfinal P_S1 {:.6}  P_S2 {:.6}\nfinal |A| {:.6}\nmax edge-slice probability {:.3e}\nwrote {}\n",
        tr.autocorr.times.len(),
        last[0],
        last[1],
        tr.autocorr.values.last().unwrap().norm(),
        max_boundary(&tr),
        args.out.out.display()
    ))
}

// ---- spectrum ----

#[derive(Args, Debug, Clone)]
pub struct SpectrumArgs {
    /// Autocorrelation CSV (t_fs,re,im,abs) instead of a fresh soft run.
    #[arg(long)]
    pub input: Option<PathBuf>,
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub time: TimeArgs,
    #[command(flatten)]
    pub damp: DampArgs,
    /// Energy window `lo:hi` in eV, or `full`.
    #[arg(long, default_value = "full", allow_hyphen_values = true)]
    pub window: Window,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Serialize)]
struct SpectrumRow {
    energy_ev: f64,
    intensity: f64,
}

pub fn run_spectrum(args: &SpectrumArgs) -> Result<vibronic::signals::SpectrumSeries> {
    let a = match &args.input {
        Some(p) => read_autocorr(p)?,
        None => {
            let model = args.model.load()?;
            let grid = args.grid.grid()?;
            let time = args.time.time(2048, 264.0, 16)?;
            run_engine(Engine::Soft, &model, &grid, &time, args.time.split, 0)?.autocorr
        }
    };
    let mut s = vibronic::signals::spectrum(&a, args.damp.damping(Some(30.0)))?;
    if let Some((lo, hi)) = args.window.0 {
        s = s.window(lo, hi);
    }
    if s.energies.len() < 2 {
        bail!("energy window holds {} bins; the grid spans {:.3} to {:.3} eV", s.energies.len(), grid_lo(&a)?, -grid_lo(&a)?);
    }
    let rows: Vec<SpectrumRow> =
        s.energies.iter().zip(&s.intensities).map(|(&energy_ev, &intensity)| SpectrumRow { energy_ev, intensity }).collect();
    write_csv(&args.out.path("spectrum.csv")?, &rows)?;
    Ok(s)
}

fn grid_lo(a: &AutocorrSeries) -> Result<f64> {
    Ok(-PI * vibronic::HBAR / a.interval()?)
}

pub fn spectrum(args: &SpectrumArgs) -> Result<String> {
    let s = run_spectrum(args)?;
    Ok(format!(
        "bins {}  spacing {:.5} eV\npeak {:.4} eV\nwrote {}\n",
        s.energies.len(),
        s.spacing(),
        s.peak(),
        args.out.out.display()
    ))
}

// ---- shots-scan ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeChoice {
    Direct,
    Autocorr,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct ShotsScanArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Defaults: 1024 steps over 264 fs, every step recorded.
    #[command(flatten)]
    pub time: TimeArgs,
    /// Defaults to no damping.
    #[command(flatten)]
    pub damp: DampArgs,
    #[arg(long, value_enum, default_value = "both")]
    pub mode: ModeChoice,
    /// TVD thresholds in percent.
    #[arg(long, value_delimiter = ',', default_values_t = [4.0, 3.0, 2.0, 1.0])]
    pub threshold: Vec<f64>,
    /// Number of seeds; seed k uses `--seed + k`.
    #[arg(long, default_value_t = 11)]
    pub seeds: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Shot-grid spacing.
    #[arg(long, default_value_t = 1000)]
    pub step: u64,
    /// Largest shot count.
    #[arg(long, default_value_t = 300_000)]
    pub max: u64,
    /// Consecutive grid points below a threshold that count as crossing it.
    #[arg(long, default_value_t = 5)]
    pub sustain: usize,
    /// Energy window `lo:hi` in eV, or `full`.
    #[arg(long, default_value = "0:2", allow_hyphen_values = true)]
    pub window: Window,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone)]
pub struct ShotsReport {
    pub thresholds_pct: Vec<f64>,
    /// Per mode: per-seed scans and the median crossing per threshold.
    pub modes: Vec<(ScanMode, Vec<ScanResult>, Vec<Option<u64>>)>,
}

impl ShotsReport {
    pub fn medians(&self, mode: ScanMode) -> Option<&[Option<u64>]> {
        self.modes.iter().find(|m| m.0 == mode).map(|m| m.2.as_slice())
    }
}

fn mode_name(m: ScanMode) -> &'static str {
    match m {
        ScanMode::Direct => "direct",
        ScanMode::Autocorr => "autocorr",
    }
}

#[derive(Serialize)]
struct TvdRow {
    mode: &'static str,
    seed: u64,
    shots: u64,
    tvd: f64,
}

#[derive(Serialize)]
struct CrossingRow {
    mode: &'static str,
    seed: String,
    threshold_pct: f64,
    shots: Option<u64>,
}

pub fn run_shots_scan(args: &ShotsScanArgs) -> Result<ShotsReport> {
    if args.seeds == 0 {
        bail!("--seeds must be at least 1");
    }
    if args.threshold.iter().any(|t| !(*t > 0.0 && *t < 100.0)) {
        bail!("thresholds must be percentages in (0, 100)");
    }
    let model = args.model.load()?;
    let grid = args.grid.grid()?;
    let time = args.time.time(1024, 264.0, 1)?;
    let autocorr = run_engine(Engine::Soft, &model, &grid, &time, args.time.split, 0)?.autocorr;
    let target = ScanTarget { autocorr, damping: args.damp.damping(None), window: args.window.0 };
    let shots = shot_grid(args.step.max(1), args.max);
    let thresholds: Vec<f64> = args.threshold.iter().map(|t| t / 100.0).collect();
    let modes = match args.mode {
        ModeChoice::Direct => vec![ScanMode::Direct],
        ModeChoice::Autocorr => vec![ScanMode::Autocorr],
        ModeChoice::Both => vec![ScanMode::Direct, ScanMode::Autocorr],
    };
    let mut out = vec![];
    let mut tvd_rows = vec![];
    let mut crossing_rows = vec![];
    for mode in modes {
        let mut results = vec![];
        for k in 0..args.seeds {
            let r = vibronic::signals::shots_scan(&target, mode, &shots, &thresholds, args.sustain, args.seed + k)?;
            for (&s, &v) in r.shots.iter().zip(&r.tvd) {
                tvd_rows.push(TvdRow { mode: mode_name(mode), seed: r.seed, shots: s, tvd: v });
            }
            for (t, c) in args.threshold.iter().zip(&r.crossings) {
                crossing_rows.push(CrossingRow { mode: mode_name(mode), seed: r.seed.to_string(), threshold_pct: *t, shots: *c });
            }
            results.push(r);
        }
        let med = median_crossings(&results);
        for (t, c) in args.threshold.iter().zip(&med) {
            crossing_rows.push(CrossingRow { mode: mode_name(mode), seed: "median".into(), threshold_pct: *t, shots: *c });
        }
        out.push((mode, results, med));
    }
    write_csv(&args.out.path("shots_tvd.csv")?, &tvd_rows)?;
    write_csv(&args.out.path("shots_crossings.csv")?, &crossing_rows)?;
    Ok(ShotsReport { thresholds_pct: args.threshold.clone(), modes: out })
}

pub fn shots_scan(args: &ShotsScanArgs) -> Result<String> {
    let r = run_shots_scan(args)?;
    let mut s = format!("median first sustained crossing over {} seeds\n{:<10}", args.seeds, "mode");
    for t in &r.thresholds_pct {
        let _ = write!(s, "{:>12}", format!("{t}%"));
    }
    s.push('\n');
    for (mode, _, med) in &r.modes {
        let _ = write!(s, "{:<10}", mode_name(*mode));
        for c in med {
            let _ = write!(s, "{:>12}", c.map_or("unmet".to_string(), |x| x.to_string()));
        }
        s.push('\n');
    }
    Ok(s)
}

// ---- resources ----

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantChoice {
    A,
    B,
    Both,
}

#[derive(Args, Debug, Clone)]
pub struct ResourcesArgs {
    /// pyrazine-4d (linear) or pyrazine-24d (quadratic).
    #[arg(long, default_value = "pyrazine-4d")]
    pub model: String,
    #[arg(long, default_value_t = 4)]
    pub n: u64,
    #[arg(long, default_value_t = 512)]
    pub nt: u64,
    #[arg(long, value_enum, ignore_case = true, default_value = "both")]
    pub variant: VariantChoice,
    /// Also build the circuits and compare block depths with the closed forms.
    #[arg(long)]
    pub verify: bool,
    /// Also write resources.json.
    #[arg(long)]
    pub json: bool,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone)]
pub struct ResourcesReport {
    pub reports: Vec<AssayReport>,
    pub comparison: Option<Comparison>,
}

#[derive(Serialize)]
struct ResourceRow<'a> {
    variant: String,
    quantity: &'a str,
    value: Option<u64>,
}

pub fn run_resources(args: &ResourcesArgs) -> Result<ResourcesReport> {
    let (d, model_class) = match args.model.as_str() {
        "pyrazine-4d" | "4d" => (4, ModelClass::Linear4D),
        "pyrazine-24d" | "24d" => (24, ModelClass::Quadratic24D),
        other => bail!("resource formulas exist for pyrazine-4d and pyrazine-24d, not '{other}'"),
    };
    let variants = match args.variant {
        VariantChoice::A => vec![Variant::A],
        VariantChoice::B => vec![Variant::B],
        VariantChoice::Both => vec![Variant::A, Variant::B],
    };
    let mut reports = vec![];
    let mut rows = vec![];
    for variant in variants {
        let r = assay(&AssayInput { d, n: args.n, n_t: args.nt, variant, model_class })?;
        let v = format!("{variant:?}");
        for (quantity, value) in [
            ("n_i", Some(r.n_i)),
            ("n_p", Some(r.n_p)),
            ("per_step", Some(r.per_step)),
            ("n_t_depth", Some(r.n_t_depth)),
            ("n_m", r.n_m),
            ("total", Some(r.total)),
            ("qubits_state", Some(r.qubits_state)),
            ("qubits_total", Some(r.qubits_total)),
        ] {
            rows.push(ResourceRow { variant: v.clone(), quantity, value });
        }
        reports.push(r);
    }
    write_csv(&args.out.path("resources.csv")?, &rows)?;
    if args.json {
        fs::write(args.out.path("resources.json")?, serde_json::to_string_pretty(&reports)?)?;
    }
    let comparison = if args.verify {
        let cmp = verify_against_builder(&AssayInput { d, n: args.n, n_t: args.nt, variant: Variant::A, model_class })?;
        write_csv(&args.out.path("resources_verify.csv")?, &cmp.checks)?;
        Some(cmp)
    } else {
        None
    };
    Ok(ResourcesReport { reports, comparison })
}

pub fn resources(args: &ResourcesArgs) -> Result<String> {
    let r = run_resources(args)?;
    let mut s: String = r.reports.iter().map(|x| x.to_table() + "\n").collect();
    if let Some(cmp) = &r.comparison {
        let _ = writeln!(s, "{:<44}{:>10}{:>10}", "built vs formula", "built", "formula");
        for c in &cmp.checks {
            let flag = if c.matches() { "" } else { "  differs" };
            let _ = writeln!(s, "{:<44}{:>10}{:>10}{flag}", c.label, c.built, c.formula);
        }
        for m in &cmp.mismatches {
            let _ = writeln!(s, "  {m}");
        }
    }
    Ok(s)
}

// ---- qpe-demo ----

#[derive(Args, Debug, Clone)]
pub struct QpeDemoArgs {
    #[command(flatten)]
    pub grid: GridArgs,
    /// Time-register qubits.
    #[arg(long, default_value_t = 6)]
    pub m: usize,
    /// Step length of the controlled unitary, fs.
    #[arg(long, default_value_t = 1.0)]
    pub dt: f64,
    /// Harmonic frequency of the mode, eV.
    #[arg(long, default_value_t = 0.074)]
    pub omega: f64,
    #[arg(long, default_value_t = 10_000)]
    pub shots: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Feed the step-unitary eigenvector closest to the Gaussian instead of the Gaussian.
    #[arg(long)]
    pub eigenstate: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET_MIB)]
    pub budget_mib: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone)]
pub struct QpeReport {
    /// Harmonic level on the excited state, offset + omega/2.
    pub level: f64,
    pub bin_width: f64,
    pub dominant_bin: usize,
    pub dominant_energy: f64,
    pub dominant_mass: f64,
    pub probabilities: Vec<f64>,
}

#[derive(Serialize)]
struct QpeRow {
    bin: usize,
    phase: f64,
    energy_ev: f64,
    probability: f64,
    counts: u64,
}

/// One tuning mode with no linear or inter-state coupling.
pub fn uncoupled_mode(omega: f64) -> VibronicModel {
    let mut m = VibronicModel::pyrazine_4d();
    m.name = Some("uncoupled-mode".into());
    m.modes = vec![ModeParams { label: "q".into(), omega, kappa1: Some(0.0), kappa2: Some(0.0), symmetry: Symmetry::Ag }];
    m.lambda = 0.0;
    m
}

/// Eigenvector of the step unitary with the largest overlap on `psi`.
fn step_eigenvector(u: &[Vec<Complex64>], psi: &[Complex64]) -> Vec<Complex64> {
    let dim = u.len();
    let um = DMatrix::from_fn(dim, dim, |r, c| u[r][c]);
    // U is normal, so this Hermitian combination shares its eigenvectors; the weight on the
    // anti-Hermitian part splits eigenphases that share a cosine
    let herm = (&um + um.adjoint()) * Complex64::new(0.5, 0.0) + (&um - um.adjoint()) * Complex64::new(0.0, -0.185);
    let eig = SymmetricEigen::new(herm);
    let overlap = |k: usize| (0..dim).map(|r| eig.eigenvectors[(r, k)].conj() * psi[r]).sum::<Complex64>().norm();
    let best = (0..dim).max_by(|&a, &b| overlap(a).total_cmp(&overlap(b))).unwrap_or(0);
    (0..dim).map(|r| eig.eigenvectors[(r, best)]).collect()
}

pub fn run_qpe_demo(args: &QpeDemoArgs) -> Result<QpeReport> {
    if args.m == 0 {
        bail!("--m must be at least 1");
    }
    let model = uncoupled_mode(args.omega);
    model.validate()?;
    let grid = args.grid.grid()?;
    let n = grid.n_qubits;
    let sys = QubitLayout::system(1, n);
    let layout = sys.with_time_register(args.m);
    let step = build_timestep(&model, &grid, &layout, args.dt, SplitOrder::PotentialFirst);
    let qpe = build_qpe(&step, &layout, budget(args.budget_mib))?;
    let mut psi = zero_state(sys.total());
    apply(&build_initial_state(&model, &grid, &sys), &mut psi)?;
    if args.eigenstate {
        if sys.total() > 10 {
            bail!("--eigenstate diagonalizes the step unitary and is limited to n <= 9");
        }
        let sys_step = build_timestep(&model, &grid, &sys, args.dt, SplitOrder::PotentialFirst);
        psi = step_eigenvector(&unitary(&sys_step), &psi);
    }
    let res = run_qpe(&qpe, &layout, &psi, args.shots.max(1), args.seed)?;

    let bins = 1usize << args.m;
    let window = 2.0 * PI * model.hbar / args.dt;
    let level = model.offset(1) + 0.5 * args.omega;
    let e_lo = level - 0.5 * window;
    let energy = |k: usize| phase_to_energy(k as f64 / bins as f64, args.dt, model.hbar, e_lo);
    let rows: Vec<QpeRow> = (0..bins)
        .map(|k| QpeRow {
            bin: k,
            phase: k as f64 / bins as f64,
            energy_ev: energy(k),
            probability: res.probabilities[k],
            counts: res.counts[k],
        })
        .collect();
    write_csv(&args.out.path("qpe.csv")?, &rows)?;
    let dominant_bin = (0..bins).max_by(|&a, &b| res.probabilities[a].total_cmp(&res.probabilities[b])).unwrap_or(0);
    Ok(QpeReport {
        level,
        bin_width: window / bins as f64,
        dominant_bin,
        dominant_energy: energy(dominant_bin),
        dominant_mass: res.probabilities[dominant_bin],
        probabilities: res.probabilities,
    })
}

pub fn qpe_demo(args: &QpeDemoArgs) -> Result<String> {
    let r = run_qpe_demo(args)?;
    Ok(format!(
        "analytic level {:.5} eV  bin width {:.5} eV\ndominant bin {} -> {:.5} eV (mass {:.4})\nwithin one bin: {}\n",
        r.level,
        r.bin_width,
        r.dominant_bin,
        r.dominant_energy,
        r.dominant_mass,
        (r.dominant_energy - r.level).abs() <= r.bin_width
    ))
}

// ---- verify ----

#[derive(Args, Debug, Clone)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub grid: GridArgs,
    /// Defaults: 512 steps of 264/2048 fs, recorded every 16.
    #[command(flatten)]
    pub time: TimeArgs,
    /// Required 1 - fidelity.
    #[arg(long, default_value_t = 1e-8)]
    pub tolerance: f64,
    /// Exit nonzero when the tolerance is not met.
    #[arg(long)]
    pub strict: bool,
    #[arg(long, default_value_t = DEFAULT_BUDGET_MIB)]
    pub budget_mib: u64,
    #[command(flatten)]
    pub out: OutArgs,
}

#[derive(Debug, Clone)]
pub struct VerifyReport {
    pub qubits: usize,
    pub fidelity: f64,
    pub max_autocorr_diff: f64,
    pub max_population_diff: f64,
    pub tolerance: f64,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.fidelity >= 1.0 - self.tolerance
    }
}

#[derive(Serialize)]
struct VerifyRow {
    t_fs: f64,
    soft_re: f64,
    soft_im: f64,
    circuit_re: f64,
    circuit_im: f64,
    autocorr_diff: f64,
    population_diff: f64,
}

pub fn run_verify(args: &VerifyArgs) -> Result<VerifyReport> {
    let model = args.model.load()?;
    let grid = args.grid.grid()?;
    let time = args.time.time(512, 264.0 * 512.0 / 2048.0, 16)?;
    let soft = run_engine(Engine::Soft, &model, &grid, &time, args.time.split, 0)?;
    let circ = run_engine(Engine::Circuit, &model, &grid, &time, args.time.split, budget(args.budget_mib))?;
    let rows: Vec<VerifyRow> = (0..soft.autocorr.times.len())
        .map(|k| {
            let (a, b) = (soft.autocorr.values[k], circ.autocorr.values[k]);
            VerifyRow {
                t_fs: soft.autocorr.times[k],
                soft_re: a.re,
                soft_im: a.im,
                circuit_re: b.re,
                circuit_im: b.im,
                autocorr_diff: (a - b).norm(),
                population_diff: (soft.populations[k][0] - circ.populations[k][0]).abs(),
            }
        })
        .collect();
    write_csv(&args.out.path("verify.csv")?, &rows)?;
    let overlap = soft.final_state.overlap(&circ.final_state);
    Ok(VerifyReport {
        qubits: model.n_modes() * grid.n_qubits + 1,
        fidelity: overlap.norm_sqr(),
        max_autocorr_diff: rows.iter().map(|r| r.autocorr_diff).fold(0.0, f64::max),
        max_population_diff: rows.iter().map(|r| r.population_diff).fold(0.0, f64::max),
        tolerance: args.tolerance,
    })
}

pub fn verify(args: &VerifyArgs) -> Result<String> {
    let r = run_verify(args)?;
    let s = format!(
        "{} qubits\nfinal-state fidelity {:.15}\nmax |A_soft - A_circuit| {:.3e}\nmax |dP_S1| {:.3e}\n{} (1 - fidelity {:.3e}, tolerance {:.1e})\n",
        r.qubits,
        r.fidelity,
        r.max_autocorr_diff,
        r.max_population_diff,
        if r.passed() { "PASS" } else { "FAIL" },
        1.0 - r.fidelity,
        r.tolerance
    );
    if args.strict && !r.passed() {
        bail!("{s}verification below tolerance");
    }
    Ok(s)
}
