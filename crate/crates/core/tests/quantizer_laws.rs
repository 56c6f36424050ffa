use std::f64::consts::{FRAC_PI_2, PI};

use rand::Rng;
use ris_core::channel::{draw_realization_with, PhaseLevels, RngStream, SystemConfig};
use ris_core::quantizer::{cascade_and_quantize, sample_phase_error, PhaseCodebook};
use ris_oracles::stats::{ks_pvalue, ks_statistic};

const N: usize = 1_000_000;

fn uniform_cdf(a: f64) -> impl Fn(f64) -> f64 {
    move |x| ((x + a) / (2.0 * a)).clamp(0.0, 1.0)
}

fn cascade_errors(levels: u32, n: usize, seed: u64) -> Vec<f64> {
    let cfg = SystemConfig::new(4, PhaseLevels::Discrete(levels));
    let mut rng = RngStream::new(seed, 0).rng();
    let mut out = Vec::with_capacity(n);
    while out.len() < n {
        let r = draw_realization_with(&cfg, &mut rng);
        out.extend(
            cascade_and_quantize(&cfg, &r)
                .unwrap()
                .iter()
                .map(|c| c.residual_phase),
        );
    }
    out.truncate(n);
    out
}

/// Two-sample Kolmogorov-Smirnov statistic; sorts both inputs.
fn ks_two_sample(a: &mut [f64], b: &mut [f64]) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / a.len() as f64 - j as f64 / b.len() as f64).abs());
    }
    d
}

#[test]
fn quantized_cascade_errors_are_uniform() {
    for (k, levels) in [2u32, 3, 4, 8].into_iter().enumerate() {
        let mut e = cascade_errors(levels, N, 100 + k as u64);
        let a = PI / levels as f64;
        assert!(e.iter().all(|t| t.abs() <= a + 1e-12));
        let d = ks_statistic(&mut e, uniform_cdf(a));
        assert!(ks_pvalue(d, N) > 0.01, "L = {levels}: D = {d}");
    }
}

#[test]
fn uniform_phase_on_circle_gives_uniform_error() {
    let mut rng = RngStream::new(3, 0).rng();
    for levels in [2u32, 3, 4, 8] {
        let book = PhaseCodebook::new(levels).unwrap();
        let mut e: Vec<f64> = (0..N)
            .map(|_| book.quantize(rng.random::<f64>() * 2.0 * PI).unwrap().theta)
            .collect();
        let d = ks_statistic(&mut e, uniform_cdf(PI / levels as f64));
        assert!(ks_pvalue(d, N) > 0.01, "L = {levels}: D = {d}");
    }
}

#[test]
fn both_paths_share_the_error_law() {
    for levels in [2u32, 3] {
        let mut full = cascade_errors(levels, N, 40 + levels as u64);
        let mut rng = RngStream::new(50 + levels as u64, 0).rng();
        let mut short: Vec<f64> = (0..N)
            .map(|_| sample_phase_error(levels, &mut rng).unwrap())
            .collect();
        let d = ks_two_sample(&mut full, &mut short);
        assert!(ks_pvalue(d, N / 2) > 0.01, "L = {levels}: D = {d}");
    }
}

#[test]
fn error_moments() {
    let mut rng = RngStream::new(12, 0).rng();
    let mean = (0..N)
        .map(|_| sample_phase_error(2, &mut rng).unwrap())
        .sum::<f64>()
        / N as f64;
    assert!(mean.abs() < 0.003);
    let var = (0..N)
        .map(|_| sample_phase_error(3, &mut rng).unwrap().powi(2))
        .sum::<f64>()
        / N as f64;
    let want = (PI / 3.0).powi(2) / 3.0;
    assert!((var / want - 1.0).abs() < 0.01);
    let mut e: Vec<f64> = (0..N)
        .map(|_| sample_phase_error(4, &mut rng).unwrap())
        .collect();
    assert!(ks_pvalue(ks_statistic(&mut e, uniform_cdf(PI / 4.0)), N) > 0.01);
}

#[test]
fn strip_mass_under_unconditional_law() {
    let mut rng = RngStream::new(13, 0).rng();
    let theta = 0.1;
    let hits = (0..N)
        .filter(|_| sample_phase_error(2, &mut rng).unwrap() <= -FRAC_PI_2 + theta)
        .count();
    let p = theta / PI;
    let sigma = (p * (1.0 - p) / N as f64).sqrt();
    assert!((hits as f64 / N as f64 - p).abs() < 3.0 * sigma);
}
