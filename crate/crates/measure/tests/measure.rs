use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use omlat_core::{
    build_ssh_chain, diagonalize, orthogonality_defect, participation, CouplingHamiltonian,
    ModeSet, SshCouplings,
};
use omlat_measure::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, Uniform};

const MECH_MHZ: [f64; 10] = [
    2.142, 2.165, 2.202, 2.238, 2.267, 2.315, 2.616, 2.405, 2.448, 2.506,
];
const GAMMA_M: [f64; 10] = [4.3, 4.2, 12.0, 11.0, 15.0, 12.0, 15.0, 8.0, 16.0, 10.6];
/// Linewidths of modes k = 10 down to 1.
const KAPPA_MHZ_DESC: [f64; 10] = [
    3.904, 4.556, 4.176, 4.668, 4.964, 7.09, 0.696, 0.384, 0.239, 0.080,
];

fn device_couplings() -> SshCouplings {
    SshCouplings {
        j: 470e6,
        jp: 700e6,
        j2: 100e6,
        j3: 27e6,
        j3p: 37e6,
    }
}

fn cfg() -> DampingConfig {
    DampingConfig {
        detuning: 2.2e6,
        kappa_tot: 4e6,
        kappa_1: 0.5e6,
        kappa_2: 0.5e6,
        drive_flux: 3e20,
        transmittance: 1e-6,
        gamma_m: 10.0,
        omega_m: 2.2e6,
        g0: 10.0,
    }
}

/// Ten-site device with the measured mechanical and microwave parameters and
/// `g₀ ∝ 1/√Ω_m` anchored at 12 Hz on site 6.
fn measured_device(h: CouplingHamiltonian) -> DeviceModel {
    let omega_m: Vec<f64> = MECH_MHZ.iter().map(|f| f * 1e6).collect();
    let g0 = omega_m
        .iter()
        .map(|w| 12.0 * (omega_m[5] / w).sqrt())
        .collect();
    let kappa: Vec<f64> = KAPPA_MHZ_DESC.iter().rev().map(|k| k * 1e6).collect();
    DeviceModel {
        hamiltonian: h,
        g0,
        omega_m,
        gamma_m: GAMMA_M.to_vec(),
        kappa_1: kappa.iter().map(|k| 0.25 * k).collect(),
        kappa_2: kappa.iter().map(|k| 0.25 * k).collect(),
        kappa_tot: kappa,
        transmittance: vec![1e-6; 10],
    }
}

fn noisy_sweep() -> SweepSettings {
    SweepSettings {
        drive_fluxes: (1..=10).map(|j| 1e22 * j as f64).collect(),
        noise: NoiseModel::Ringdown {
            snr: 100.0,
            decay_constants: 3.0,
            samples: 200,
            noise_floor: 0.05,
            transient_fraction: 0.1,
        },
    }
}

fn disordered_chain(sigma: f64, seed: u64) -> CouplingHamiltonian {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = Normal::new(0.0, sigma).unwrap();
    let freqs: Vec<f64> = (0..10)
        .map(|_| 7.12e9 * (1.0 + n.sample(&mut rng)))
        .collect();
    build_ssh_chain(5, &device_couplings(), &freqs).unwrap()
}

fn design_modes() -> ModeSet {
    diagonalize(&build_ssh_chain(5, &device_couplings(), &[7.12e9; 10]).unwrap()).unwrap()
}

fn random_orthogonal(n: usize, rng: &mut ChaCha8Rng) -> DMatrix<f64> {
    let g = Normal::new(0.0, 1.0).unwrap();
    DMatrix::from_fn(n, n, |_, _| g.sample(rng)).qr().q()
}

#[test]
fn photon_number_matches_complex_amplitude() {
    // steady state of dα/dt = −(κ/2 + iΔ)α + √(κ₁R ṅ_d)
    let c = cfg();
    let w = |f: f64| 2.0 * PI * f;
    let alpha = Complex64::new((w(c.kappa_1) * c.transmittance * c.drive_flux).sqrt(), 0.0)
        / Complex64::new(w(c.kappa_tot) / 2.0, w(c.detuning));
    let n_c = intracavity_photons(&c);
    assert!(
        (n_c / alpha.norm_sqr() - 1.0).abs() < 1e-12,
        "{n_c} vs {}",
        alpha.norm_sqr()
    );
}

#[test]
fn resolved_sideband_limit_matches_cooling_formula() {
    let c = DampingConfig {
        kappa_tot: 2e3,
        kappa_1: 0.5e3,
        kappa_2: 0.5e3,
        ..cfg()
    };
    let eta = 0.4;
    // Γ_eff − Γ_m = n_c·4(ηg₀)²/κ_tot, every factor of 2π cancelling to Hz
    let expected = intracavity_photons(&c) * 4.0 * (eta * c.g0).powi(2) / c.kappa_tot;
    let got = optomech_damping(&c, eta);
    assert!((got / expected - 1.0).abs() < 1e-4, "{got} vs {expected}");
}

#[test]
fn slope_is_largest_on_the_red_sideband() {
    // direct evaluation of the two-Lorentzian slope in angular units
    let oracle = |c: &DampingConfig, eta: f64| {
        let (d, wm, k, k1) = (
            2.0 * PI * c.detuning,
            2.0 * PI * c.omega_m,
            2.0 * PI * c.kappa_tot,
            2.0 * PI * c.kappa_1,
        );
        let g = 2.0 * PI * eta * c.g0;
        let asym = k / ((wm - d).powi(2) + k * k / 4.0) - k / ((wm + d).powi(2) + k * k / 4.0);
        k1 * c.transmittance * g * g * asym / (d * d + k * k / 4.0) / (2.0 * PI)
    };
    let on = cfg();
    let off = DampingConfig {
        detuning: 1.2 * on.omega_m,
        ..on
    };
    for c in [on, off] {
        assert!((damping_slope(&c, 0.3) / oracle(&c, 0.3) - 1.0).abs() < 1e-12);
    }
    assert!(damping_slope(&on, 0.3) > damping_slope(&off, 0.3));
}

#[test]
fn unnormalized_eta_round_trip() {
    let c = cfg();
    for eta in [1e-4, 0.05, 0.3, 1.0] {
        let got = unnormalized_eta(damping_slope(&c, eta), &c).unwrap();
        let expected = c.g0 * eta * (c.kappa_1 * c.transmittance).sqrt();
        assert!(
            (got / expected - 1.0).abs() < 1e-10,
            "{eta}: {got} vs {expected}"
        );
    }
}

#[test]
fn unnormalized_ratio_across_sites_cancels_mode_factors() {
    let a = cfg();
    let b = DampingConfig {
        g0: 13.0,
        omega_m: 2.5e6,
        detuning: 2.5e6,
        ..a
    };
    let (ea, eb) = (0.31, 0.07);
    let ra = unnormalized_eta(damping_slope(&a, ea), &a).unwrap();
    let rb = unnormalized_eta(damping_slope(&b, eb), &b).unwrap();
    assert!((ra / rb - (a.g0 * ea) / (b.g0 * eb)).abs() < 1e-10);
}

#[test]
fn ringdown_fits_cover_the_truth() {
    // 3 decay constants at SNR 100; 95% of fits within 2%, mean within 0.5%
    for gamma in [5.0, 80.0, 2.0e3] {
        let settings = RingdownSettings::for_rate(gamma, 3.0, 1000, 100.0, 0.05);
        let estimates: Vec<f64> = (0..1000)
            .map(|seed| {
                let t = simulate_ringdown(gamma, &settings, seed).unwrap();
                fit_ringdown(&t, &FitOptions::default()).unwrap().gamma
            })
            .collect();
        let within = estimates
            .iter()
            .filter(|g| (*g / gamma - 1.0).abs() < 0.02)
            .count();
        let mean = estimates.iter().sum::<f64>() / estimates.len() as f64;
        assert!(within >= 950, "Γ = {gamma}: {within}/1000 within 2%");
        assert!(
            (mean / gamma - 1.0).abs() < 0.005,
            "Γ = {gamma}: mean {mean}"
        );
    }
}

#[test]
fn ringdown_standard_error_is_calibrated() {
    let gamma = 40.0;
    let settings = RingdownSettings::for_rate(gamma, 3.0, 300, 100.0, 0.05);
    let fits: Vec<RingdownFit> = (0..400)
        .map(|seed| {
            fit_ringdown(
                &simulate_ringdown(gamma, &settings, seed).unwrap(),
                &FitOptions::default(),
            )
            .unwrap()
        })
        .collect();
    let mean = fits.iter().map(|f| f.gamma).sum::<f64>() / 400.0;
    let spread = (fits.iter().map(|f| (f.gamma - mean).powi(2)).sum::<f64>() / 399.0).sqrt();
    let reported = fits.iter().map(|f| f.std_error).sum::<f64>() / 400.0;
    assert!(
        (reported / spread - 1.0).abs() < 0.15,
        "reported {reported} vs spread {spread}"
    );
}

#[test]
fn sinkhorn_recovers_scaled_participations() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u = random_orthogonal(10, &mut rng);
    let eta = u.map(|x| x * x);
    let unit = Uniform::new(0.0f64, 1.0).unwrap();
    let c: Vec<f64> = (0..10).map(|_| unit.sample(&mut rng).max(1e-3)).collect();
    let d: Vec<f64> = (0..10).map(|_| unit.sample(&mut rng).max(1e-3)).collect();
    let tilde = DMatrix::from_fn(10, 10, |k, i| c[i] * d[k] * eta[(k, i)]);
    let opts = SinkhornOptions {
        tol: 1e-14,
        max_iter: 200,
        ..Default::default()
    };
    let mut errors = Vec::new();
    let r = sinkhorn_trace(&tilde, &opts, |_, m| {
        errors.push(relative_error(m, &eta).unwrap())
    })
    .unwrap();
    assert!(r.iterations <= 200);
    let eps = relative_error(r.eta.eta(), &eta).unwrap();
    assert!(eps < 1e-8, "ε = {eps:e} after {} steps", r.iterations);
    assert!(errors.first().unwrap() > errors.last().unwrap());
}

#[test]
fn sinkhorn_limit_of_a_permutation_is_the_permutation() {
    let p = DMatrix::from_fn(5, 5, |k, i| if (k + 2) % 5 == i { 0.7 } else { 0.0 });
    let r = sinkhorn_normalize(&p, &SinkhornOptions::default()).unwrap();
    let expected = p.map(|x| if x > 0.0 { 1.0 } else { 0.0 });
    assert!((r.eta.eta() - expected).amax() < 1e-12);
    assert_eq!(r.floored.len(), 20);
}

#[test]
fn orthogonalize_restores_a_perturbed_rotation() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let o = random_orthogonal(8, &mut rng);
    let g = Normal::new(0.0, 1.0).unwrap();
    let a = DMatrix::from_fn(8, 8, |_, _| g.sample(&mut rng));
    let s = &a + a.transpose();
    let s = s.scale(1e-3 / s.norm());
    let tilde = &o * (DMatrix::identity(8, 8) + s);
    let u = orthogonalize_gauged(&tilde).unwrap();
    assert!(orthogonality_defect(&u) < 1e-10);
    let dist = (&u - &o).norm();
    assert!(dist < 3e-3, "{dist:e}");
    assert!(orthogonality_defect(&tilde) > 1e-4);
}

#[test]
fn reflections_need_a_row_flip() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut o = random_orthogonal(6, &mut rng);
    if o.determinant() > 0.0 {
        o.row_mut(0).neg_mut();
    }
    assert!(orthogonalize(&o).is_err());
    let u = orthogonalize_gauged(&o).unwrap();
    assert!((u - o).amax() < 1e-10);
}

#[test]
fn noiseless_pipeline_reproduces_the_device_chain() {
    let h = build_ssh_chain(5, &device_couplings(), &[7.12e9; 10]).unwrap();
    let truth = diagonalize(&h).unwrap();
    let sweep = SweepSettings {
        drive_fluxes: (1..=10).map(|j| 1e22 * j as f64).collect(),
        noise: NoiseModel::Analytic {},
    };
    let ds = simulate_measurement(&measured_device(h.clone()), &sweep, 0, false).unwrap();
    let r = recover(&ds, &truth, &SinkhornOptions::default()).unwrap();
    let u_tilde = assign_signs(&r.eta_hat, &ds.eigenfreqs, &truth).unwrap();
    assert!((&u_tilde - truth.modeshapes()).amax() < 1e-8);
    let err = (r.h_hat.absolute() - h.matrix()).norm() / h.matrix().norm();
    assert!(err < 1e-8, "{err:e}");
    assert!(r.residuals.orthogonality_after < 1e-10);
}

#[test]
fn noisy_pipeline_resolves_the_coupling_pattern() {
    let reference = design_modes();
    for seed in 0..5 {
        let h = disordered_chain(0.003, seed);
        let ds =
            simulate_measurement(&measured_device(h.clone()), &noisy_sweep(), seed, false).unwrap();
        let r = recover(&ds, &reference, &SinkhornOptions::default()).unwrap();
        let got = r.h_hat.absolute();
        let m = h.matrix();
        for i in 0..9 {
            let rel = (got[(i, i + 1)] / m[(i, i + 1)] - 1.0).abs();
            assert!(rel < 0.05, "seed {seed} bond {i}: {rel}");
        }
        for i in 0..8 {
            // second neighbours (100 MHz) stand out of the noise
            let err = (got[(i, i + 2)] - m[(i, i + 2)]).abs();
            assert!(err < 0.5 * 100e6, "seed {seed} J2 at {i}: {err:e}");
        }
        assert!(r.residuals.orthogonality_before > r.residuals.orthogonality_after);
    }
}

#[test]
fn recovered_g0_follows_the_inverse_square_root_law() {
    let h = disordered_chain(0.003, 21);
    let device = measured_device(h);
    let ds = simulate_measurement(&device, &noisy_sweep(), 21, false).unwrap();
    let r = recover(&ds, &design_modes(), &SinkhornOptions::default()).unwrap();
    let total: f64 = device.g0.iter().sum();
    // the highest mode alone, which spreads over every site
    let top = relative_g0(&ds.eta_tilde(), &r.eta_hat, Some(&[9])).unwrap();
    for i in 0..10 {
        let expected = device.g0[i] / total;
        assert!(
            (top[i] / expected - 1.0).abs() < 0.02,
            "site {i}: {} vs {expected}",
            top[i]
        );
        // every mode, including weakly populated entries
        assert!(
            (r.g0_relative[i] / expected - 1.0).abs() < 0.07,
            "site {i}: {}",
            r.g0_relative[i]
        );
    }
    // log-log slope of ḡ₀ against Ω_m
    let pts: Vec<(f64, f64)> = device
        .omega_m
        .iter()
        .zip(&top)
        .map(|(w, g)| (w.ln(), g.ln()))
        .collect();
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / 10.0;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / 10.0;
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!((slope + 0.5).abs() < 0.15, "exponent {slope}");

    let absolute = anchor_g0(&top, 5, 12.0).unwrap();
    assert!((absolute[5] - 12.0).abs() < 1e-12);
    for (a, t) in absolute.iter().zip(&device.g0) {
        assert!((a / t - 1.0).abs() < 0.03);
    }
}

#[test]
fn single_mode_g0_matches_all_mode_average_without_noise() {
    let h = disordered_chain(0.003, 4);
    let device = measured_device(h);
    let sweep = SweepSettings {
        noise: NoiseModel::Analytic {},
        ..noisy_sweep()
    };
    let ds = simulate_measurement(&device, &sweep, 0, false).unwrap();
    let r = recover(&ds, &design_modes(), &SinkhornOptions::default()).unwrap();
    let top = relative_g0(&ds.eta_tilde(), &r.eta_hat, Some(&[9])).unwrap();
    for (a, b) in top.iter().zip(&r.g0_relative) {
        assert!((a - b).abs() < 1e-8);
    }
}

#[test]
fn sideband_thermometry_coverage() {
    let c = DampingConfig {
        detuning: 0.0,
        kappa_tot: 3.904e6,
        omega_m: 2.315e6,
        ..cfg()
    };
    let n_m: Vec<f64> = (1..=8).map(|j| 2e3 * j as f64).collect();
    let r = sideband_thermometry(&c, 2.2, &n_m, 0.0, 0).unwrap();
    assert!((r.eta_g0 - 2.2).abs() < 1e-12);
    let within = (0..1000)
        .filter(|&seed| {
            let r = sideband_thermometry(&c, 2.2, &n_m, 0.10, seed).unwrap();
            (r.eta_g0 / 2.2 - 1.0).abs() < 0.07
        })
        .count();
    assert!(within >= 950, "{within}/1000 within 7%");
}

#[test]
fn dataset_round_trips_through_disk() {
    let h = disordered_chain(0.003, 8);
    let sweep = SweepSettings {
        noise: NoiseModel::Ringdown {
            snr: 100.0,
            decay_constants: 3.0,
            samples: 40,
            noise_floor: 0.05,
            transient_fraction: 0.1,
        },
        ..noisy_sweep()
    };
    let ds = simulate_measurement(&measured_device(h), &sweep, 8, true).unwrap();
    let dir = tempfile::tempdir().unwrap();
    ds.save(dir.path()).unwrap();
    assert!(dir.path().join("traces/mode01_site01.csv").exists());
    let back = MeasurementDataset::load(dir.path()).unwrap();
    assert_eq!(back.points.len(), 100);
    let diff = (back.eta_tilde() - ds.eta_tilde()).amax() / ds.eta_tilde().amax();
    assert!(diff < 1e-9, "{diff:e}");
    assert_eq!(back.points[17].seeds, ds.points[17].seeds);

    let r = recover(&back, &design_modes(), &SinkhornOptions::default()).unwrap();
    let out = dir.path().join("recovery");
    r.save(&out).unwrap();
    let report: serde_json::Value =
        serde_json::from_reader(std::fs::File::open(out.join("report.json")).unwrap()).unwrap();
    assert_eq!(
        report["iterations_used"].as_u64().unwrap() as usize,
        r.iterations_used
    );
    assert!(
        std::fs::read_to_string(out.join("h_hat.csv"))
            .unwrap()
            .lines()
            .count()
            >= 10
    );
}

#[test]
fn simulation_is_deterministic() {
    let h = disordered_chain(0.003, 2);
    let a = simulate_measurement(&measured_device(h.clone()), &noisy_sweep(), 99, false).unwrap();
    let b = simulate_measurement(&measured_device(h), &noisy_sweep(), 99, false).unwrap();
    assert_eq!(a, b);
    let truth = participation(&design_modes());
    assert_eq!(truth.dim(), 10);
}
