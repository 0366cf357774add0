//! Spectra from autocorrelation functions, measurement sampling and shot budgets.

use crate::model::HBAR;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Binomial, Distribution};
use rayon::prelude::*;
use rustfft::FftPlanner;
use std::f64::consts::PI;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum SignalError {
    #[error("autocorrelation needs at least two uniformly spaced samples starting at t = 0")]
    NonUniform,
    #[error("grids differ: {0} vs {1} bins")]
    GridMismatch(usize, usize),
    #[error("shot grid must be non-empty and strictly increasing")]
    BadShotGrid,
    #[error("shots must be positive")]
    NoShots,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AutocorrSeries {
    pub times: Vec<f64>,
    pub values: Vec<Complex64>,
}

impl AutocorrSeries {
    /// Sampling interval, or an error if the times are not uniform from 0.
    pub fn interval(&self) -> Result<f64, SignalError> {
        if self.times.len() < 2 || self.times.len() != self.values.len() || self.times[0].abs() > 1e-12 {
            return Err(SignalError::NonUniform);
        }
        let dt = self.times[1] - self.times[0];
        if dt <= 0.0 {
            return Err(SignalError::NonUniform);
        }
        for (k, t) in self.times.iter().enumerate() {
            if (t - k as f64 * dt).abs() > 1e-9 * dt.max(1.0) * (k as f64 + 1.0) {
                return Err(SignalError::NonUniform);
            }
        }
        Ok(dt)
    }

    /// Every `every`-th sample.
    pub fn decimate(&self, every: usize) -> AutocorrSeries {
        AutocorrSeries {
            times: self.times.iter().step_by(every).copied().collect(),
            values: self.values.iter().step_by(every).copied().collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumSeries {
    pub energies: Vec<f64>,
    pub intensities: Vec<f64>,
    pub normalized: bool,
}

impl SpectrumSeries {
    pub fn spacing(&self) -> f64 {
        self.energies[1] - self.energies[0]
    }

    /// Restrict to [lo, hi] eV and renormalize.
    pub fn window(&self, lo: f64, hi: f64) -> SpectrumSeries {
        let (energies, intensities): (Vec<f64>, Vec<f64>) = self
            .energies
            .iter()
            .zip(&self.intensities)
            .filter(|(e, _)| **e >= lo && **e <= hi)
            .map(|(e, i)| (*e, *i))
            .unzip();
        let mut s = SpectrumSeries { energies, intensities, normalized: false };
        s.normalize();
        s
    }

    pub fn normalize(&mut self) {
        let total: f64 = self.intensities.iter().sum();
        if total > 0.0 {
            for x in &mut self.intensities {
                *x /= total;
            }
        }
        self.normalized = true;
    }

    /// Energy of the most intense bin.
    pub fn peak(&self) -> f64 {
        let (i, _) = self
            .intensities
            .iter()
            .enumerate()
            .fold((0, f64::MIN), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc });
        self.energies[i]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Damping {
    /// Exponential damping time in fs; `None` disables it.
    pub tau_fs: Option<f64>,
    /// Apply cos(pi t / 2T).
    pub use_d: bool,
}

impl Default for Damping {
    fn default() -> Self {
        Damping { tau_fs: Some(30.0), use_d: false }
    }
}

impl Damping {
    pub const NONE: Damping = Damping { tau_fs: None, use_d: false };
}

/// Absorption spectrum I(E) ∝ E · FT[A](E) over the full DFT energy grid, ascending in energy.
///
/// The signal is extended to negative times by A(-t) = A*(t) and the resulting real transform
/// A(0) + 2 Re Σ_{k>0} A(t_k) e^{iE t_k} is evaluated on the M-point grid E_j = 2πħ j/(Mδt).
pub fn spectrum(a: &AutocorrSeries, damping: Damping) -> Result<SpectrumSeries, SignalError> {
    let dt = a.interval()?;
    let m = a.values.len();
    let t_end = a.times[m - 1];
    let mut x = vec![Complex64::new(0.0, 0.0); m];
    for k in 0..m {
        let t = a.times[k];
        let mut v = a.values[k];
        if let Some(tau) = damping.tau_fs {
            v *= (-t / tau).exp();
        }
        if damping.use_d {
            v *= (PI * t / (2.0 * t_end)).cos();
        }
        x[k] = if k == 0 { 0.5 * v } else { v };
    }
    FftPlanner::new().plan_fft_inverse(m).process(&mut x);
    let de = 2.0 * PI * HBAR / (m as f64 * dt);
    let mut energies = Vec::with_capacity(m);
    let mut intensities = Vec::with_capacity(m);
    let m = m as i64;
    for j in -(m / 2)..=(m - 1) / 2 {
        let slot = j.rem_euclid(m) as usize;
        let e = j as f64 * de;
        energies.push(e);
        intensities.push((e / HBAR * 2.0 * x[slot].re * dt).max(0.0));
    }
    let mut s = SpectrumSeries { energies, intensities, normalized: false };
    s.normalize();
    Ok(s)
}

/// Total variation distance between two distributions on the same grid.
pub fn tvd(p: &[f64], q: &[f64]) -> Result<f64, SignalError> {
    if p.len() != q.len() {
        return Err(SignalError::GridMismatch(p.len(), q.len()));
    }
    Ok(0.5 * p.iter().zip(q).map(|(a, b)| (a - b).abs()).sum::<f64>())
}

fn binomial(rng: &mut ChaCha8Rng, n: u64, p: f64) -> u64 {
    let p = p.clamp(0.0, 1.0);
    Binomial::new(n, p).expect("valid binomial").sample(rng)
}

/// Hadamard-test shot noise on every point: Re from P(0) = (1+Re A)/2, Im from P(1) = (1+Im A)/2.
pub fn sample_autocorr(a: &AutocorrSeries, shots: u64, seed: u64) -> AutocorrSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = shots as f64;
    let values = a
        .values
        .iter()
        .map(|v| {
            let c0 = binomial(&mut rng, shots, 0.5 * (1.0 + v.re));
            let c1 = binomial(&mut rng, shots, 0.5 * (1.0 + v.im));
            Complex64::new(2.0 * c0 as f64 / n - 1.0, 2.0 * c1 as f64 / n - 1.0)
        })
        .collect();
    AutocorrSeries { times: a.times.clone(), values }
}

/// Multinomial draws over `probs`, as counts per bin.
pub fn multinomial(probs: &[f64], shots: u64, rng: &mut ChaCha8Rng) -> Vec<u64> {
    let mut left = shots;
    let mut mass = 1.0;
    let mut counts = vec![0; probs.len()];
    for (c, &p) in counts.iter_mut().zip(probs) {
        if left == 0 {
            break;
        }
        if p <= 0.0 {
            continue;
        }
        let k = if p >= mass { left } else { binomial(rng, left, p / mass) };
        *c = k;
        left -= k;
        mass -= p;
    }
    counts
}

/// Empirical spectrum from `shots` direct draws over the energy bins.
pub fn sample_spectrum_direct(spec: &SpectrumSeries, shots: u64, seed: u64) -> SpectrumSeries {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let counts = multinomial(&spec.intensities, shots, &mut rng);
    SpectrumSeries {
        energies: spec.energies.clone(),
        intensities: counts.iter().map(|&c| c as f64 / shots as f64).collect(),
        normalized: true,
    }
}

/// Populations from ancilla/electronic-qubit counts.
pub fn populations_from_counts(c0: u64, c1: u64) -> (f64, f64) {
    let total = (c0 + c1) as f64;
    let p1 = c0 as f64 / total;
    (p1, 1.0 - p1)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanMode {
    Autocorr,
    Direct,
}

/// What a shot scan samples from and compares against.
#[derive(Debug, Clone)]
pub struct ScanTarget {
    pub autocorr: AutocorrSeries,
    pub damping: Damping,
    /// Energy window (eV) over which spectra are compared.
    pub window: Option<(f64, f64)>,
}

impl ScanTarget {
    pub fn spectrum_of(&self, a: &AutocorrSeries) -> SpectrumSeries {
        let s = spectrum(a, self.damping).expect("uniform target series");
        match self.window {
            Some((lo, hi)) => s.window(lo, hi),
            None => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanResult {
    pub seed: u64,
    pub shots: Vec<u64>,
    pub tvd: Vec<f64>,
    /// First sustained crossing per threshold, `None` when unmet.
    pub crossings: Vec<Option<u64>>,
}

fn mix(seed: u64, shots: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ shots.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Smallest grid value after which `tvd < threshold` holds for `sustain` consecutive points.
pub fn first_sustained(shots: &[u64], tvd: &[f64], threshold: f64, sustain: usize) -> Option<u64> {
    let mut run = 0;
    for (i, &v) in tvd.iter().enumerate() {
        if v < threshold {
            run += 1;
            if run == sustain {
                return Some(shots[i + 1 - sustain]);
            }
        } else {
            run = 0;
        }
    }
    None
}

/// TVD versus shot count for one seed and the resulting threshold crossings.
pub fn shots_scan(
    target: &ScanTarget,
    mode: ScanMode,
    shot_grid: &[u64],
    thresholds: &[f64],
    sustain: usize,
    seed: u64,
) -> Result<ScanResult, SignalError> {
    if shot_grid.is_empty() || shot_grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(SignalError::BadShotGrid);
    }
    if shot_grid[0] == 0 {
        return Err(SignalError::NoShots);
    }
    target.autocorr.interval()?;
    let reference = target.spectrum_of(&target.autocorr);
    let tvd_values: Vec<f64> = shot_grid
        .par_iter()
        .map(|&shots| {
            let s = mix(seed, shots);
            let sampled = match mode {
                ScanMode::Autocorr => target.spectrum_of(&sample_autocorr(&target.autocorr, shots, s)),
                ScanMode::Direct => sample_spectrum_direct(&reference, shots, s),
            };
            tvd(&sampled.intensities, &reference.intensities).expect("same grid")
        })
        .collect();
    let crossings = thresholds
        .iter()
        .map(|&th| first_sustained(shot_grid, &tvd_values, th, sustain))
        .collect();
    Ok(ScanResult { seed, shots: shot_grid.to_vec(), tvd: tvd_values, crossings })
}

/// Median crossing per threshold across seeds; unmet runs count as +infinity.
pub fn median_crossings(results: &[ScanResult]) -> Vec<Option<u64>> {
    let n_th = results.first().map_or(0, |r| r.crossings.len());
    (0..n_th)
        .map(|t| {
            let mut v: Vec<u64> = results.iter().map(|r| r.crossings[t].unwrap_or(u64::MAX)).collect();
            v.sort_unstable();
            let mid = v.len() / 2;
            let med = if v.len() % 2 == 1 {
                v[mid]
            } else if v[mid] == u64::MAX || v[mid - 1] == u64::MAX {
                u64::MAX
            } else {
                (v[mid - 1] + v[mid]) / 2
            };
            (med != u64::MAX).then_some(med)
        })
        .collect()
}

/// Evenly spaced shot grid `step, 2*step, ..., max`.
pub fn shot_grid(step: u64, max: u64) -> Vec<u64> {
    (1..=max / step).map(|k| k * step).collect()
}
