//! Command-line front end: argument types and one function per subcommand.
//!
//! Every command writes its CSV artifacts into `--out` and returns a short text summary.

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::Serialize;
use std::fs;
use std::path::{Path, PathBuf};
use vibronic::circuits::emulator::DEFAULT_BUDGET_BYTES;
use vibronic::signals::{AutocorrSeries, Damping};
use vibronic::soft::{PropagatorPlan, SplitOrder, Trajectory};
use vibronic::{Convention, GridSpec, TimeGrid, VibronicModel};

pub mod commands;

#[derive(Parser, Debug)]
#[command(name = "vibronic", version, about = "Vibronic wavepacket dynamics on grids and gate-level circuits")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Zero-point energy convergence over grid range and resolution.
    ZpeScan(commands::ZpeScanArgs),
    /// Propagate the initial wavepacket and record A(t), populations and edge probabilities.
    Propagate(commands::PropagateArgs),
    /// Absorption spectrum from an autocorrelation CSV or a fresh run.
    Spectrum(commands::SpectrumArgs),
    /// Spectral TVD versus shot count for direct and autocorrelation sampling.
    ShotsScan(commands::ShotsScanArgs),
    /// Gate depth and qubit counts.
    Resources(commands::ResourcesArgs),
    /// Canonical phase estimation on a single uncoupled mode.
    QpeDemo(commands::QpeDemoArgs),
    /// Compare the circuit engine with the reference propagator.
    Verify(commands::VerifyArgs),
}

pub fn run(cli: Cli) -> Result<String> {
    match cli.command {
        Command::ZpeScan(a) => commands::zpe_scan(&a),
        Command::Propagate(a) => commands::propagate(&a),
        Command::Spectrum(a) => commands::spectrum(&a),
        Command::ShotsScan(a) => commands::shots_scan(&a),
        Command::Resources(a) => commands::resources(&a),
        Command::QpeDemo(a) => commands::qpe_demo(&a),
        Command::Verify(a) => commands::verify(&a),
    }
}

#[derive(Args, Debug, Clone)]
pub struct ModelArgs {
    /// Preset name (pyrazine-4d, pyrazine-2d, pyrazine-24d) or path to a JSON model file.
    #[arg(long, default_value = "pyrazine-4d")]
    pub model: String,
    /// Keep only the first modes-1 tuning modes plus the coupling mode of the four-mode model.
    #[arg(long)]
    pub modes: Option<usize>,
}

impl ModelArgs {
    pub fn load(&self) -> Result<VibronicModel> {
        if let Some(d) = self.modes {
            if !(1..=4).contains(&d) {
                bail!("--modes must be in 1..=4, got {d}");
            }
            return Ok(VibronicModel::pyrazine_truncated(d));
        }
        match VibronicModel::preset(&self.model) {
            Ok(m) => Ok(m),
            Err(_) if Path::new(&self.model).exists() => {
                let text = fs::read_to_string(&self.model).with_context(|| format!("reading {}", self.model))?;
                Ok(vibronic::load_model(&text)?)
            }
            Err(e) => Err(e.into()),
        }
    }
}

/// Coordinate range: a single number `a` for [-a, a], or `lo:hi`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Range(pub f64, pub f64);

impl std::str::FromStr for Range {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let num = |x: &str| x.trim().parse::<f64>().map_err(|e| format!("bad number '{x}': {e}"));
        match s.split_once(':') {
            Some((lo, hi)) => Ok(Range(num(lo)?, num(hi)?)),
            None => {
                let a = num(s)?;
                Ok(Range(-a.abs(), a.abs()))
            }
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct GridArgs {
    /// Qubits per mode (2^n grid points).
    #[arg(long, default_value_t = 4)]
    pub n: usize,
    /// Coordinate range, `a` for [-a, a] or `lo:hi`.
    #[arg(long, default_value = "5", allow_hyphen_values = true)]
    pub range: Range,
    #[arg(long, default_value = "endpoint")]
    pub convention: Convention,
}

impl GridArgs {
    pub fn grid(&self) -> Result<GridSpec> {
        Ok(GridSpec::new(self.n, self.range.0, self.range.1, self.convention)?)
    }
}

#[derive(Args, Debug, Clone)]
pub struct TimeArgs {
    /// Number of time steps.
    #[arg(long)]
    pub nt: Option<usize>,
    /// Total propagation time in fs.
    #[arg(long)]
    pub total_fs: Option<f64>,
    /// Record every `stride` steps.
    #[arg(long)]
    pub stride: Option<usize>,
    #[arg(long, default_value = "potential-first")]
    pub split: SplitOrder,
}

impl TimeArgs {
    pub fn time(&self, nt: usize, total_fs: f64, stride: usize) -> Result<TimeGrid> {
        Ok(TimeGrid::from_total(
            self.total_fs.unwrap_or(total_fs),
            self.nt.unwrap_or(nt),
            self.stride.unwrap_or(stride),
        )?)
    }
}

/// Damping time in fs, or `none`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tau(pub Option<f64>);

impl std::str::FromStr for Tau {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("none") {
            return Ok(Tau(None));
        }
        match s.parse::<f64>() {
            Ok(t) if t > 0.0 => Ok(Tau(Some(t))),
            _ => Err(format!("expected a positive number of fs or 'none', got '{s}'")),
        }
    }
}

#[derive(Args, Debug, Clone)]
pub struct DampArgs {
    /// Exponential damping time in fs, or `none`.
    #[arg(long)]
    pub tau_fs: Option<Tau>,
    /// Also apply the cos(pi t / 2T) window.
    #[arg(long)]
    pub damp_d: bool,
}

impl DampArgs {
    pub fn damping(&self, default_tau: Option<f64>) -> Damping {
        Damping { tau_fs: self.tau_fs.map_or(default_tau, |t| t.0), use_d: self.damp_d }
    }
}

/// Energy window `lo:hi` in eV, or `full`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Window(pub Option<(f64, f64)>);

impl std::str::FromStr for Window {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.eq_ignore_ascii_case("full") {
            return Ok(Window(None));
        }
        let r: Range = s.parse()?;
        if r.0 >= r.1 || !s.contains(':') {
            return Err(format!("expected lo:hi with lo < hi, got '{s}'"));
        }
        Ok(Window(Some((r.0, r.1))))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Soft,
    Circuit,
}

#[derive(Args, Debug, Clone)]
pub struct OutArgs {
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

impl OutArgs {
    pub fn path(&self, name: &str) -> Result<PathBuf> {
        fs::create_dir_all(&self.out).with_context(|| format!("creating {}", self.out.display()))?;
        Ok(self.out.join(name))
    }
}

pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path).with_context(|| format!("writing {}", path.display()))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Debug, Serialize, serde::Deserialize)]
pub struct AutocorrRow {
    pub t_fs: f64,
    pub re: f64,
    pub im: f64,
    pub abs: f64,
}

pub fn autocorr_rows(a: &AutocorrSeries) -> Vec<AutocorrRow> {
    a.times
        .iter()
        .zip(&a.values)
        .map(|(&t_fs, v)| AutocorrRow { t_fs, re: v.re, im: v.im, abs: v.norm() })
        .collect()
}

pub fn read_autocorr(path: &Path) -> Result<AutocorrSeries> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("reading {}", path.display()))?;
    let mut times = vec![];
    let mut values = vec![];
    for row in r.deserialize() {
        let row: AutocorrRow = row?;
        times.push(row.t_fs);
        values.push(Complex64::new(row.re, row.im));
    }
    Ok(AutocorrSeries { times, values })
}

/// Run either engine over `time` from the model's initial state.
pub fn run_engine(
    engine: Engine,
    model: &VibronicModel,
    grid: &GridSpec,
    time: &TimeGrid,
    split: SplitOrder,
    budget_bytes: u128,
) -> Result<Trajectory> {
    Ok(match engine {
        Engine::Soft => {
            let plan = PropagatorPlan::new(model, grid, time.dt, split)?;
            vibronic::soft::propagate(&plan, &vibronic::initial_state(model, grid), time)?
        }
        Engine::Circuit => vibronic::circuits::propagate(model, grid, time, split, budget_bytes)?,
    })
}

pub const DEFAULT_BUDGET_MIB: u64 = (DEFAULT_BUDGET_BYTES >> 20) as u64;
