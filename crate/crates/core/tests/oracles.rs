//! Monte Carlo and brute-force oracles for the analytic paths.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use cyclic_wcl::channel::{gen_noise, realize_taps, Fading, TapProfile};
use cyclic_wcl::cyclo::{cac, ccc, confidence_halfwidth, fvc_from_values, select_m, CyclicKernel};
use cyclic_wcl::harness::{run_sweep, Algorithm, MSetting, SweepConfig, SweepValue, SweepVar};
use cyclic_wcl::localize::cyclic_wcl;
use cyclic_wcl::rng::seeded;
use cyclic_wcl::signals::{constellation, gen_symbols, generate, Pulse, SampleBuffer, SignalSpec};
use cyclic_wcl::theory::{
    build_power_vector, build_quadforms, cac_quadform_moments, fvc_per_cr, fvc_theoretical, optimal_threshold,
    rmse_theoretical, sample_stat_moments, theta_moments, CacMoments, ComponentMoments, ThetaStats, Vec12,
};
use cyclic_wcl::{Complex, Point};

const FS: f64 = 200e6;

fn sc(rate: f64) -> SignalSpec {
    SignalSpec::single_carrier(4, rate, 2.4e9)
}

#[test]
fn sixteen_qam_fourth_moment_by_simulation() {
    let exact: f64 = constellation(16).unwrap().iter().map(|c| c.norm_sqr().powi(2)).sum::<f64>() / 16.0;
    assert!((exact - 1.32).abs() < 1e-12);
    let s = gen_symbols(16, 100_000, &mut seeded(16)).unwrap();
    let emp = s.iter().map(|c| c.norm_sqr().powi(2)).sum::<f64>() / s.len() as f64;
    assert!((emp - 1.32).abs() < 0.02 * 1.32);
}

#[test]
fn symbol_rate_feature_dominates_off_harmonic() {
    let spec = sc(20e6);
    let (mut on, mut off) = (Complex::new(0.0, 0.0), Complex::new(0.0, 0.0));
    for s in 0..100 {
        let buf = generate(&spec, 500, FS, &mut seeded(s)).unwrap();
        on += cac(&buf, 20e6).unwrap().value;
        off += cac(&buf, 1.37 * 20e6).unwrap().value;
    }
    let db = 20.0 * (on.norm() / off.norm()).log10();
    assert!(db >= 20.0, "{db} dB");
}

#[test]
fn rayleigh_tap_powers_match_profile() {
    let profile = TapProfile::exponential(9, 50e-9, 3.0, Fading::RayleighPerTrial).unwrap();
    let trials = 10_000;
    let mut acc = [0.0; 9];
    let mut rng = seeded(139);
    for _ in 0..trials {
        let t = realize_taps(&profile, FS, &mut rng);
        for (a, g) in acc.iter_mut().zip(&t.gains) {
            *a += g.norm_sqr();
        }
    }
    for (a, p) in acc.iter().zip(profile.powers()) {
        assert!((a / trials as f64 - p).abs() < 0.05 * p, "{} vs {p}", a / trials as f64);
    }
}

#[test]
fn raised_cosine_power_line_geometric_sum() {
    let alpha = 20e6;
    let n = 1000;
    let samples: Vec<Complex> = (0..n)
        .map(|k| Complex::new((1.0 + (2.0 * std::f64::consts::PI * alpha * k as f64 / FS).cos()).sqrt(), 0.0))
        .collect();
    let v = cac(&SampleBuffer::new(samples, FS), alpha).unwrap().value;
    assert!((v.re - 0.5).abs() < 1e-6 && v.im.abs() < 1e-6);
}

#[test]
fn independent_ccc_decays_like_inverse_root_n() {
    let mut mags = Vec::new();
    for &n in &[100usize, 400, 1600] {
        let mut acc = 0.0;
        for s in 0..1000 {
            let mut rng = seeded(s * 7 + n as u64);
            let u = generate(&sc(20e6), n, FS, &mut rng).unwrap();
            let v = generate(&sc(25e6), n, FS, &mut rng).unwrap();
            acc += ccc(&u, &v, 20e6).unwrap().value.norm_sqr();
        }
        mags.push((acc / 1000.0).sqrt());
    }
    for w in mags.windows(2) {
        let ratio = w[0] / w[1];
        assert!((ratio - 2.0).abs() < 0.3, "{mags:?}");
    }
}

/// Simulated θ̂ rows for the given specs.
fn simulate_theta(st: &SignalSpec, si: &SignalSpec, n: usize, sigma: f64, trials: usize, seed: u64) -> Vec<Vec12> {
    let kernel = CyclicKernel::new(st.cyclic_frequency(), FS, n);
    let mut rng = seeded(seed);
    (0..trials)
        .map(|_| {
            let a = generate(st, n, FS, &mut rng).unwrap();
            let b = generate(si, n, FS, &mut rng).unwrap();
            let w = gen_noise(n, sigma, FS, &mut rng);
            let c = cyclic_wcl::cyclo::component_estimates_with(&kernel, &a, &b, &w).unwrap();
            Vec12::from_column_slice(&c.theta())
        })
        .collect()
}

fn check_moments(stats: &ThetaStats, rows: &[Vec12], z: f64) {
    let t = rows.len() as f64;
    let mean: Vec12 = rows.iter().fold(Vec12::zeros(), |a, r| a + r) / t;
    let floor = 1e-10 * stats.cov.diagonal().amax().max(1e-30);
    for i in 0..12 {
        let var = rows.iter().map(|r| (r[i] - mean[i]).powi(2)).sum::<f64>() / t;
        assert!((mean[i] - stats.mean[i]).abs() <= z * (var / t).sqrt() + floor.sqrt(), "mean {i}");
        for j in i..12 {
            let p: Vec<f64> = rows.iter().map(|r| (r[i] - mean[i]) * (r[j] - mean[j])).collect();
            let c = p.iter().sum::<f64>() / t;
            let v = p.iter().map(|x| (x - c).powi(2)).sum::<f64>() / t;
            assert!((c - stats.cov[(i, j)]).abs() <= z * (v / t).sqrt() + floor, "cov ({i}, {j}): {c} vs {}", stats.cov[(i, j)]);
        }
    }
}

#[test]
fn raised_cosine_moments_match_simulation() {
    let (st, si) = (sc(20e6), sc(25e6));
    let stats = theta_moments(&st, &si, 80, FS, 0.02).unwrap();
    check_moments(&stats, &simulate_theta(&st, &si, 80, 0.02, 40_000, 7), 4.5);
}

#[test]
fn ofdm_moments_match_simulation() {
    let fs_o = 20e6;
    let st = SignalSpec::ofdm(4, 16, fs_o / 16.0, 4.0 / fs_o, 0.0);
    let si = SignalSpec::ofdm(4, 32, fs_o / 32.0, 8.0 / fs_o, 0.0);
    let n = 60;
    let stats = theta_moments(&st, &si, n, fs_o, 0.05).unwrap();
    let kernel = CyclicKernel::new(st.cyclic_frequency(), fs_o, n);
    let mut rng = seeded(11);
    let rows: Vec<Vec12> = (0..40_000)
        .map(|_| {
            let a = generate(&st, n, fs_o, &mut rng).unwrap();
            let b = generate(&si, n, fs_o, &mut rng).unwrap();
            let w = gen_noise(n, 0.05, fs_o, &mut rng);
            Vec12::from_column_slice(&cyclic_wcl::cyclo::component_estimates_with(&kernel, &a, &b, &w).unwrap().theta())
        })
        .collect();
    check_moments(&stats, &rows, 4.5);
}

#[test]
fn quadratic_form_ratio_equals_centroid_k5() {
    let mut rng = seeded(416);
    let (st_s, si_s) = (sc(20e6), sc(25e6));
    let st = generate(&st_s, 200, FS, &mut rng).unwrap();
    let si = generate(&si_s, 200, FS, &mut rng).unwrap();
    let w = gen_noise(200, 1e-6, FS, &mut rng);
    let parts = cyclic_wcl::cyclo::component_estimates(&st, &si, &w, 20e6).unwrap();
    let locs: Vec<Point> = (0..5).map(|_| Point::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0))).collect();
    let p_t: Vec<f64> = (0..5).map(|_| rng.random_range(1e-6..1e-3)).collect();
    let p_i: Vec<f64> = (0..5).map(|_| rng.random_range(1e-6..1e-3)).collect();
    let strengths: Vec<f64> = (0..5).map(|k| parts.combine(p_t[k], p_i[k]).norm_sqr()).collect();
    let e = cyclic_wcl(&locs, &strengths).unwrap();
    let (x, y) = build_quadforms(&p_t, &p_i, &locs, &[true; 5])
        .unwrap()
        .ratio(&Vec12::from_column_slice(&parts.theta()))
        .unwrap();
    assert!((x - e.x).abs() <= 1e-10 * e.x.abs().max(1.0));
    assert!((y - e.y).abs() <= 1e-10 * e.y.abs().max(1.0));
}

/// Draws `M` realizations of `R̂ = θᵀp + jθ_iᵀp` with θ Gaussian.
fn gaussian_cac_realizations<R: Rng>(m: &CacMoments, count: usize, rng: &mut R) -> Vec<Complex> {
    let c = m.cov2;
    let l11 = c[0][0].sqrt();
    let l21 = if l11 > 0.0 { c[1][0] / l11 } else { 0.0 };
    let l22 = (c[1][1] - l21 * l21).max(0.0).sqrt();
    (0..count)
        .map(|_| {
            let z1: f64 = StandardNormal.sample(rng);
            let z2: f64 = StandardNormal.sample(rng);
            m.mean + Complex::new(l11 * z1, l21 * z1 + l22 * z2)
        })
        .collect()
}

#[test]
fn sample_statistic_moments_match_batches() {
    let stats = theta_moments(&sc(20e6), &sc(25e6), 500, FS, 1e-12).unwrap();
    let p = build_power_vector(1e-5, 2e-5).unwrap();
    let mom = cac_quadform_moments(&p, &stats);
    let m = 60;
    let batches = 10_000;
    let th = sample_stat_moments(&mom, m).unwrap();
    let mut rng = seeded(485);
    let (mut vs, mut es) = (Vec::new(), Vec::new());
    for _ in 0..batches {
        let r = fvc_from_values(&gaussian_cac_realizations(&mom, m, &mut rng)).unwrap();
        vs.push(r.v_s);
        es.push(r.e_s);
    }
    let b = batches as f64;
    let mv = vs.iter().sum::<f64>() / b;
    let me = es.iter().sum::<f64>() / b;
    let dv: Vec<f64> = vs.iter().map(|v| v - mv).collect();
    let de: Vec<f64> = es.iter().map(|e| e - me).collect();
    let var_v = dv.iter().map(|d| d * d).sum::<f64>() / b;
    let var_e = de.iter().map(|d| d * d).sum::<f64>() / b;
    let prods: Vec<f64> = dv.iter().zip(&de).map(|(a, c)| a * c).collect();
    let cov = prods.iter().sum::<f64>() / b;
    let se_cov = (prods.iter().map(|x| (x - cov).powi(2)).sum::<f64>() / b / b).sqrt();
    assert!((mv - th.mu_vs).abs() <= 3.0 * (var_v / b).sqrt());
    assert!((me - th.mu_es).abs() <= 3.0 * (var_e / b).sqrt());
    assert!((cov - th.sigma_vses).abs() <= 3.0 * se_cov, "{cov} vs {}", th.sigma_vses);
    assert!((var_v - th.sigma_vs2).abs() <= 0.05 * th.sigma_vs2, "{var_v} vs {}", th.sigma_vs2);
    assert!((var_e - th.sigma_es2).abs() <= 0.05 * th.sigma_es2, "{var_e} vs {}", th.sigma_es2);
}

/// The Gaussian-model `M` runs well past 60 here; the halfwidth it promises
/// is what simulation delivers.
#[test]
fn selected_m_delivers_its_confidence_halfwidth() {
    let stats = theta_moments(&sc(20e6), &sc(25e6), 500, FS, 1e-12).unwrap();
    let mom = cac_quadform_moments(&build_power_vector(1e-5, 1e-5).unwrap(), &stats);
    let m = select_m(&[mom], 0.9, 0.02).unwrap();
    assert!(m > 60);
    let h = confidence_halfwidth(&mom, m, 0.9).unwrap();
    assert!(h < 0.02);
    let mut rng = seeded(260);
    let phis: Vec<f64> = (0..400)
        .map(|_| fvc_from_values(&gaussian_cac_realizations(&mom, m, &mut rng)).unwrap().phi_hat)
        .collect();
    let within = phis.iter().filter(|p| (*p - mom.fvc()).abs() <= h).count();
    let frac = within as f64 / phis.len() as f64;
    assert!(frac > 0.85, "coverage {frac}");
}

#[test]
fn sample_fvc_tracks_theory_at_equal_powers() {
    let (st_s, si_s) = (sc(20e6), sc(25e6));
    let n = 500;
    let m = 60;
    let stats = theta_moments(&st_s, &si_s, n, FS, 0.0).unwrap();
    let theory = fvc_theoretical(1.0, &ComponentMoments::from_stats(&stats)).unwrap();
    let kernel = CyclicKernel::new(20e6, FS, n);
    let mut rng = seeded(241);
    let mut phis = Vec::new();
    for _ in 0..50 {
        let vals: Vec<Complex> = (0..m)
            .map(|_| {
                let a = generate(&st_s, n, FS, &mut rng).unwrap();
                let b = generate(&si_s, n, FS, &mut rng).unwrap();
                let r: Vec<f64> = a.samples.iter().zip(&b.samples).map(|(x, y)| (x + y).norm_sqr()).collect();
                kernel.apply(r)
            })
            .collect();
        phis.push(fvc_from_values(&vals).unwrap().phi_hat);
    }
    let mean = phis.iter().sum::<f64>() / phis.len() as f64;
    let sd = (phis.iter().map(|p| (p - mean).powi(2)).sum::<f64>() / (phis.len() - 1) as f64).sqrt();
    assert!((mean - theory).abs() <= 3.0 * sd / (phis.len() as f64).sqrt() + 0.01, "{mean} vs {theory}");
}

/// With no interferer every CR sees the same target CAC, so only noise moves
/// the estimate off the power-weighted centroid, and less so as N grows.
#[test]
fn rmse_settles_on_weighted_centroid_without_interference() {
    let grid = [Point::new(-12.0, 3.0), Point::new(8.0, 9.0), Point::new(14.0, -6.0), Point::new(-4.0, -11.0), Point::new(2.0, 16.0)];
    let p_t: Vec<f64> = grid.iter().map(|p| 1e-3 * p.norm_sq().sqrt().powf(-3.8)).collect();
    let p_i = vec![1e-15; grid.len()];
    let wsum: f64 = p_t.iter().map(|p| p * p).sum();
    let bx = grid.iter().zip(&p_t).map(|(g, p)| g.x * p * p).sum::<f64>() / wsum;
    let by = grid.iter().zip(&p_t).map(|(g, p)| g.y * p * p).sum::<f64>() / wsum;
    let bias = bx.hypot(by);
    let gap = |n: usize| {
        let stats = theta_moments(&sc(20e6), &sc(25e6), n, FS, 1e-8).unwrap();
        (rmse_theoretical(&p_t, &p_i, &grid, &[true; 5], &stats).unwrap().epsilon - bias).abs()
    };
    let (short, long) = (gap(200), gap(4000));
    assert!(long < 0.2 * short, "{short} {long}");
    assert!(long < 1e-3 * bias);
}

#[test]
fn without_interference_every_cr_helps() {
    let mut rng = seeded(465);
    let locs: Vec<Point> = (0..10).map(|_| Point::new(rng.random_range(-50.0..50.0), rng.random_range(-50.0..50.0))).collect();
    let p_t: Vec<f64> = locs.iter().map(|p| 1e-2 * p.norm_sq().sqrt().powf(-3.8)).collect();
    let p_i = vec![1e-20; locs.len()];
    let stats = theta_moments(&sc(20e6), &sc(25e6), 500, FS, 1e-15).unwrap();
    let fvc = fvc_per_cr(&p_t, &p_i, &stats).unwrap();
    let curve = optimal_threshold(&p_t, &p_i, &locs, &fvc, &stats).unwrap();
    let best_eps = curve.epsilon.iter().copied().fold(f64::INFINITY, f64::min);
    // Weak CRs carry almost no weight, so the tail of the curve is flat.
    assert!(*curve.epsilon.last().unwrap() <= best_eps * 1.005, "{:?}", curve.epsilon);
    assert!(curve.epsilon[0] > *curve.epsilon.last().unwrap());
}

#[test]
fn ordering_across_power_ratio_sweep() {
    let mut cfg = SweepConfig::default();
    cfg.sweep_var = Some(SweepVar::TransmitPowerRatioDb);
    cfg.sweep_values = vec![SweepValue::Num(10.0), SweepValue::Num(-10.0), SweepValue::Num(-40.0)];
    cfg.m = MSetting::Fixed(60);
    let r = run_sweep(&cfg).unwrap();
    let get = |a: Algorithm| r.find("-40", a.name()).unwrap().rmse_m;
    assert!(get(Algorithm::Wcl) > get(Algorithm::CyclicWcl));
    assert!(get(Algorithm::CyclicWcl) > get(Algorithm::ImprovedCyclicWcl));
}

#[test]
fn rectangular_interferer_leaks_little_at_min_samples() {
    let si = sc(25e6).with_pulse(Pulse::Rectangular);
    let n = cyclic_wcl::cyclo::min_samples(FS, 20e6, 25e6).unwrap();
    let kernel_t = CyclicKernel::new(20e6, FS, n);
    let mut acc = Complex::new(0.0, 0.0);
    for s in 0..200 {
        acc += kernel_t.cac(&generate(&si, n, FS, &mut seeded(s)).unwrap());
    }
    let leak = (acc / 200.0).norm_sqr();
    let own = cac(&generate(&sc(25e6), n, FS, &mut seeded(0)).unwrap(), 25e6).unwrap().value.norm_sqr();
    assert!(leak <= 1e-3 * own);
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let mut cfg = SweepConfig::default();
    cfg.trials = 6;
    cfg.theory = true;
    cfg.sweep_var = Some(SweepVar::TransmitPowerRatioDb);
    cfg.sweep_values = vec![SweepValue::Num(0.0), SweepValue::Num(-20.0)];
    let on = |threads: usize| {
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap().install(|| run_sweep(&cfg).unwrap())
    };
    assert_eq!(on(1), on(3));
}
