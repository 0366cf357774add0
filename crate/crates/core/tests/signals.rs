use num_complex::Complex64;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use vibronic::signals::*;
use vibronic::HBAR;

fn decaying_phase(e0: f64, dt: f64, m: usize, tau: f64) -> AutocorrSeries {
    let times: Vec<f64> = (0..m).map(|k| k as f64 * dt).collect();
    let values = times.iter().map(|&t| Complex64::from_polar((-t / tau).exp(), -e0 * t / HBAR)).collect();
    AutocorrSeries { times, values }
}

#[test]
fn lorentzian_line_shape() {
    let (e0, tau) = (0.7, 30.0);
    // T = 1500 fs, far longer than the decay
    let a = decaying_phase(e0, 0.25, 6000, f64::INFINITY);
    let s = spectrum(&a, Damping { tau_fs: Some(tau), use_d: false }).unwrap();
    let gamma = HBAR / tau;
    // strip the E prefactor, then compare with the analytic Lorentzian shape near the line
    let shape: Vec<(f64, f64)> = s
        .energies
        .iter()
        .zip(&s.intensities)
        .filter(|(e, _)| (**e - e0).abs() < 5.0 * gamma)
        .map(|(e, i)| (*e, i / e))
        .collect();
    let lor = |e: f64| 1.0 / (1.0 + ((e - e0) / gamma).powi(2));
    let peak = shape.iter().map(|x| x.1).fold(0.0, f64::max);
    let top = shape.iter().find(|x| x.1 == peak).unwrap().0;
    assert!((top - e0).abs() <= s.spacing());
    // normalize the numerical shape at the analytic value of its peak bin
    let scale = lor(top) / peak;
    for (e, v) in &shape {
        assert!((v * scale - lor(*e)).abs() < 0.05, "E = {e}");
    }
    // half width at half maximum from the sampled curve
    let above: Vec<f64> = shape.iter().filter(|x| x.1 >= 0.5 * peak).map(|x| x.0).collect();
    let hwhm = 0.5 * (above.last().unwrap() - above.first().unwrap() + s.spacing());
    assert!((hwhm - gamma).abs() / gamma < 0.1, "hwhm {hwhm} vs {gamma}");
}

#[test]
fn autocorr_sampling_statistics() {
    let a = AutocorrSeries {
        times: vec![0.0, 1.0, 2.0],
        values: vec![Complex64::new(1.0, 0.0), Complex64::new(0.3, -0.5), Complex64::new(-0.8, 0.1)],
    };
    let shots = 500;
    let runs = 4000;
    let mut sum = vec![Complex64::new(0.0, 0.0); 3];
    let mut sq = vec![0.0; 3];
    for s in 0..runs {
        let x = sample_autocorr(&a, shots, s);
        assert_eq!(x.values[0].re, 1.0);
        for k in 0..3 {
            sum[k] += x.values[k];
            sq[k] += (x.values[k].re - a.values[k].re).powi(2);
        }
    }
    for k in 1..3 {
        let mean = sum[k] / runs as f64;
        let expected = (1.0 - a.values[k].re.powi(2)) / shots as f64;
        let se = (1.0 / (shots * runs) as f64).sqrt();
        assert!((mean - a.values[k]).norm() < 6.0 * se);
        let var = sq[k] / runs as f64;
        assert!((var / expected - 1.0).abs() < 0.1, "variance ratio {}", var / expected);
    }
}

#[test]
fn tvd_shrinks_with_shots() {
    let a = decaying_phase(0.5, 0.5, 400, 40.0);
    let target = ScanTarget { autocorr: a, damping: Damping::NONE, window: Some((0.0, 1.5)) };
    let reference = target.spectrum_of(&target.autocorr);
    let median = |shots: u64, mode: ScanMode| {
        let mut v: Vec<f64> = (0..21)
            .map(|s| {
                let est = match mode {
                    ScanMode::Direct => sample_spectrum_direct(&reference, shots, s),
                    ScanMode::Autocorr => target.spectrum_of(&sample_autocorr(&target.autocorr, shots, s)),
                };
                tvd(&est.intensities, &reference.intensities).unwrap()
            })
            .collect();
        v.sort_by(|x, y| x.partial_cmp(y).unwrap());
        v[10]
    };
    for mode in [ScanMode::Direct, ScanMode::Autocorr] {
        let m: Vec<f64> = [1_000, 4_000, 16_000, 64_000].iter().map(|&s| median(s, mode)).collect();
        assert!(m.windows(2).all(|w| w[1] < w[0]), "{mode:?}: {m:?}");
    }
}

#[test]
fn scan_is_deterministic_and_records_seed() {
    let a = decaying_phase(0.5, 0.5, 200, 40.0);
    let target = ScanTarget { autocorr: a, damping: Damping::default(), window: None };
    let grid = shot_grid(500, 5_000);
    let r1 = shots_scan(&target, ScanMode::Direct, &grid, &[0.05, 0.02], 3, 42).unwrap();
    let r2 = shots_scan(&target, ScanMode::Direct, &grid, &[0.05, 0.02], 3, 42).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(r1.seed, 42);
    assert_eq!(r1.tvd.len(), grid.len());
    assert_eq!(shots_scan(&target, ScanMode::Direct, &[10, 5], &[0.1], 1, 0).unwrap_err(), SignalError::BadShotGrid);
}

#[test]
fn median_of_crossings_treats_unmet_as_infinite() {
    let r = |c: Option<u64>| ScanResult { seed: 0, shots: vec![], tvd: vec![], crossings: vec![c] };
    assert_eq!(median_crossings(&[r(Some(3)), r(None), r(Some(1))]), vec![Some(3)]);
    assert_eq!(median_crossings(&[r(None), r(None), r(Some(1))]), vec![None]);
    assert_eq!(median_crossings(&[r(Some(2)), r(Some(4))]), vec![Some(3)]);
}

fn series() -> impl Strategy<Value = AutocorrSeries> {
    (2usize..200, 0.01f64..2.0, any::<u64>()).prop_map(|(m, dt, seed)| {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let times = (0..m).map(|k| k as f64 * dt).collect();
        let mut values: Vec<Complex64> =
            (0..m).map(|_| Complex64::new(rng.random::<f64>() * 2.0 - 1.0, rng.random::<f64>() * 2.0 - 1.0)).collect();
        values[0] = Complex64::new(1.0, 0.0);
        AutocorrSeries { times, values }
    })
}

proptest! {
    #[test]
    fn spectra_are_nonnegative_distributions(a in series(), tau in prop::option::of(1.0f64..100.0), d in any::<bool>()) {
        let s = spectrum(&a, Damping { tau_fs: tau, use_d: d }).unwrap();
        prop_assert_eq!(s.energies.len(), a.values.len());
        prop_assert!(s.intensities.iter().all(|&x| x >= 0.0));
        let total: f64 = s.intensities.iter().sum();
        prop_assert!(total == 0.0 || (total - 1.0).abs() < 1e-12);
        prop_assert!(s.energies.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn tvd_is_a_metric(p in prop::collection::vec(0.0f64..1.0, 1..50), seed in any::<u64>()) {
        use rand::Rng;
        let norm = |v: Vec<f64>| { let s: f64 = v.iter().sum(); v.iter().map(|x| x / s.max(1e-300)).collect::<Vec<_>>() };
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q: Vec<f64> = norm(p.iter().map(|_| rng.random::<f64>() + 1e-9).collect());
        let p = norm(p.iter().map(|x| x + 1e-9).collect());
        let d = tvd(&p, &q).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&d));
        prop_assert_eq!(d, tvd(&q, &p).unwrap());
        prop_assert_eq!(tvd(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn multinomial_counts_sum_to_shots(p in prop::collection::vec(0.0f64..1.0, 1..40), shots in 0u64..100_000, seed in any::<u64>()) {
        let s: f64 = p.iter().sum();
        prop_assume!(s > 0.0);
        let probs: Vec<f64> = p.iter().map(|x| x / s).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = multinomial(&probs, shots, &mut rng);
        prop_assert_eq!(c.iter().sum::<u64>(), shots);
        for (k, &x) in c.iter().enumerate() {
            prop_assert!(x == 0 || probs[k] > 0.0);
        }
    }
}
