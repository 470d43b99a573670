use std::sync::Arc;

use fnls_core::ensemble::{member_rng, smooth_random};
use fnls_core::propagator::{linear_propagate, TimeWindow};
use fnls_core::solver::{
    critical_index, evolve, homogeneous_sobolev_norm, mass, nonlinear_phase_step, picard_iterate, rescale, strang_step,
    write_diagnostics_csv, ScalingParams, SimulationConfig,
};
use fnls_core::spectral::{make_grid, Field, Grid, Sign, SymbolSpec};
use fnls_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn bump(g: &Arc<Grid>, amp: f64) -> Field {
    Field::from_fn(g, |x, y| c(amp * (-x * x).exp() * (1.0 + 0.5 * y.cos()), 0.0))
}

fn gaussian_plane(g: &Arc<Grid>, width: f64) -> Field {
    Field::from_fn(g, |x, y| c((-(x * x + y * y) / (2.0 * width * width)).exp(), 0.0))
}

#[test]
fn mass_of_constants() {
    let g = make_grid(16, 8, 3.0).unwrap();
    let u = Field::from_fn(&g, |_, _| c(0.3, 0.4));
    assert!((mass(&u) - 0.25 * 3.0 * 2.0 * std::f64::consts::PI).abs() < 1e-13);
    assert_eq!(mass(&Field::from_fn(&g, |_, _| c(0.0, 0.0))), 0.0);
}

#[test]
fn nonlinear_step_preserves_modulus() {
    let g = make_grid(32, 16, 5.0).unwrap();
    let u = smooth_random(&g, &mut member_rng(11, 0), 6.0, 4.0).to_physical();
    let v = nonlinear_phase_step(&u, 0.7, -3.0).unwrap();
    for (a, b) in u.data().iter().zip(v.data()) {
        assert!((a.norm() - b.norm()).abs() <= 1e-15 * a.norm().max(1e-300) + 1e-300);
    }
    assert!((v.norm_l2() / u.norm_l2() - 1.0).abs() < 1e-14);
    assert!(nonlinear_phase_step(&u.to_spectral(), 0.1, 1.0).is_err());
}

#[test]
fn linear_strang_step_is_the_group() {
    let g = make_grid(32, 16, 6.0).unwrap();
    let spec = SymbolSpec::hyperbolic(1.5).unwrap();
    let cfg = SimulationConfig::new(spec, g.clone(), 0.0, 0.05, 1.0).unwrap();
    let u = smooth_random(&g, &mut member_rng(2, 0), 5.0, 4.0).to_physical();
    let a = strang_step(&u, 0.05, &cfg);
    let b = linear_propagate(&u, 0.05, &spec);
    assert!(a.distance(&b).unwrap() < 1e-14);

    let tr = evolve(&u, &cfg).unwrap();
    let exact = linear_propagate(&u, 1.0, &spec);
    assert!(tr.final_state.distance(&exact).unwrap() <= 1e-10);
}

#[test]
fn plane_wave_closed_form() {
    // i∂ₜu = (ω + ν|a|²)u for u = a·e^{i(ξ₀x + n₀y)}·e^{−it(ω+ν|a|²)}.
    let g = make_grid(32, 16, 2.0 * std::f64::consts::PI).unwrap();
    let a = c(0.8, -0.3);
    let nu = 1.7;
    for sign in [Sign::Elliptic, Sign::Hyperbolic] {
        let spec = SymbolSpec::new(1.5, sign).unwrap();
        let phi = Field::plane_wave(&g, 3, -2, a).unwrap();
        let cfg = SimulationConfig::new(spec, g.clone(), nu, 0.01, 1.0).unwrap();
        let tr = evolve(&phi, &cfg).unwrap();
        let freq = spec.omega(3.0, -2.0) + nu * a.norm_sqr();
        let exact = phi.scaled(Complex64::from_polar(1.0, -freq));
        let err = tr.final_state.distance(&exact).unwrap() / exact.norm_l2();
        assert!(err <= 1e-8, "{sign}: {err:e}");
    }
}

#[test]
fn mass_drift_over_a_thousand_steps() {
    let g = make_grid(64, 32, 20.0).unwrap();
    for (k, &alpha) in [1.0, 1.5, 2.0].iter().enumerate() {
        for sign in [Sign::Elliptic, Sign::Hyperbolic] {
            for nu in [-1.0, 1.0] {
                let phi = smooth_random(&g, &mut member_rng(5, k as u64), 3.0, 2.0).scaled(c(3.0, 0.0));
                let spec = SymbolSpec::new(alpha, sign).unwrap();
                let cfg = SimulationConfig::new(spec, g.clone(), nu, 1e-3, 1.0).unwrap();
                let tr = evolve(&phi, &cfg).unwrap();
                assert_eq!(tr.diagnostics.len(), 1001);
                assert!(
                    tr.max_mass_drift() <= 1e-10,
                    "{alpha} {sign} {nu}: {:e}",
                    tr.max_mass_drift()
                );
            }
        }
    }
}

#[test]
fn strang_is_second_order() {
    let g = make_grid(128, 32, 20.0).unwrap();
    let spec = SymbolSpec::elliptic(1.5).unwrap();
    let phi = bump(&g, 1.0);
    let run = |dt: f64| {
        let cfg = SimulationConfig::new(spec, g.clone(), 1.0, dt, 0.5).unwrap();
        evolve(&phi, &cfg).unwrap().final_state
    };
    let reference = run(0.01 / 8.0);
    let e1 = run(0.01).distance(&reference).unwrap();
    let e2 = run(0.005).distance(&reference).unwrap();
    let ratio = e1 / e2;
    assert!((3.5..=4.5).contains(&ratio), "ratio {ratio}");
}

#[test]
fn snapshots_follow_the_stride() {
    let g = make_grid(16, 8, 4.0).unwrap();
    let spec = SymbolSpec::elliptic(1.0).unwrap();
    let cfg = SimulationConfig::new(spec, g.clone(), 1.0, 0.1, 1.0)
        .unwrap()
        .with_snapshot_stride(3);
    let tr = evolve(&bump(&g, 0.5), &cfg).unwrap();
    let times: Vec<f64> = tr.snapshots.iter().map(|s| s.time).collect();
    assert_eq!(times.len(), 5);
    assert!((times[1] - 0.3).abs() < 1e-12 && (times[4] - 1.0).abs() < 1e-12);

    let mut buf = Vec::new();
    write_diagnostics_csv(&mut buf, &tr.diagnostics).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("step,t,mass,mass_drift_rel,l4_space_norm\n"));
    assert_eq!(text.lines().count(), 12);
}

#[test]
fn picard_without_nonlinearity_stops_at_once() {
    let g = make_grid(32, 8, 10.0).unwrap();
    let spec = SymbolSpec::hyperbolic(2.0).unwrap();
    let cfg = SimulationConfig::new(spec, g.clone(), 0.0, 1e-3, 0.1).unwrap();
    let w = TimeWindow::symmetric(0.1, 21).unwrap();
    let out = picard_iterate(&bump(&g, 1.0), &cfg, &w, 10, 1e-12).unwrap();
    assert_eq!(out.report.distances, vec![0.0]);
    assert_eq!(out.report.iterations, 1);
    assert!(out.report.converged);
}

#[test]
fn picard_contracts_and_matches_split_step() {
    let g = make_grid(64, 16, 20.0).unwrap();
    let spec = SymbolSpec::elliptic(1.5).unwrap();
    let phi = bump(&g, 0.5);
    let cfg = SimulationConfig::new(spec, g.clone(), 1.0, 1e-3, 0.1)
        .unwrap()
        .with_snapshot_stride(1);
    let tol = 1e-12;
    let w = TimeWindow::new(0.0, 0.1, 101).unwrap();
    let out = picard_iterate(&phi, &cfg, &w, 40, tol).unwrap();
    let r = &out.report;
    assert!(r.converged);
    assert!(
        r.contraction_factors.iter().all(|&q| q < 1.0),
        "{:?}",
        r.contraction_factors
    );
    assert!(r.fitted_factor.unwrap() < 1.0);
    assert!(r.residual <= 10.0 * tol, "residual {:e}", r.residual);
    assert!((r.phi_norm - phi.norm_l2()).abs() < 1e-15);

    let tr = evolve(&phi, &cfg).unwrap();
    let sup = tr
        .snapshots
        .iter()
        .zip(&out.trajectory)
        .map(|(s, u)| s.field.distance(u).unwrap())
        .fold(0.0, f64::max);
    assert!(sup <= 1e-4, "sup distance {sup:e}");
}

#[test]
fn picard_reports_divergence() {
    let g = make_grid(32, 8, 10.0).unwrap();
    let spec = SymbolSpec::elliptic(1.0).unwrap();
    let cfg = SimulationConfig::new(spec, g.clone(), 50.0, 1e-2, 1.0).unwrap();
    let w = TimeWindow::new(0.0, 1.0, 41).unwrap();
    match picard_iterate(&bump(&g, 3.0), &cfg, &w, 50, 1e-12) {
        Err(Error::PicardDiverged { iteration, .. }) => assert!(iteration >= 4),
        other => panic!("expected divergence, got {:?}", other.map(|o| o.report)),
    }
}

#[test]
fn picard_window_must_hold_zero() {
    let g = make_grid(16, 8, 4.0).unwrap();
    let spec = SymbolSpec::elliptic(1.0).unwrap();
    let cfg = SimulationConfig::new(spec, g.clone(), 1.0, 0.1, 1.0).unwrap();
    let w = TimeWindow::new(0.5, 1.0, 11).unwrap();
    assert!(picard_iterate(&bump(&g, 0.1), &cfg, &w, 5, 1e-10).is_err());
}

#[test]
fn critical_index_values() {
    assert_eq!(critical_index(1.0), 0.0);
    assert_eq!(critical_index(2.0), -0.25);
    assert_eq!(critical_index(0.5), 0.25);
}

#[test]
fn rescale_norm_law() {
    let g = Grid::planar(256, 256, 64.0, 64.0).unwrap();
    let phi = gaussian_plane(&g, 4.0);
    for alpha in [1.0, 2.0] {
        let spec = SymbolSpec::elliptic(alpha).unwrap();
        let same = rescale(&phi, ScalingParams::new(1.0, 0.0).unwrap(), &spec).unwrap();
        assert_eq!(same.data(), phi.data());
        for lam in [2.0, 4.0, 8.0] {
            let u = rescale(&phi, ScalingParams::new(lam, 0.0).unwrap(), &spec).unwrap();
            let expect = lam.powf((1.0 - 1.0 / alpha) / 2.0);
            let got = u.norm_l2() / phi.norm_l2();
            assert!((got / expect - 1.0).abs() <= 1e-6, "alpha {alpha} lambda {lam}: {got}");
        }
    }
}

#[test]
fn rescale_pointwise_matches_closed_form() {
    let g = Grid::planar(128, 128, 40.0, 40.0).unwrap();
    let phi = gaussian_plane(&g, 3.0);
    let spec = SymbolSpec::elliptic(2.0).unwrap();
    let lam: f64 = 2.0;
    let u = rescale(&phi, ScalingParams::new(lam, 0.0).unwrap(), &spec).unwrap();
    let exact = Field::from_fn(&g, |x, y| {
        let (a, b) = (lam * x, lam.sqrt() * y);
        c(lam * (-(a * a + b * b) / 18.0).exp(), 0.0)
    });
    assert!(u.distance(&exact).unwrap() / exact.norm_l2() < 1e-10);
}

#[test]
fn spreading_rescale_keeps_the_norm_law() {
    let g = Grid::planar(256, 256, 64.0, 64.0).unwrap();
    let phi = gaussian_plane(&g, 2.0);
    let spec = SymbolSpec::elliptic(2.0).unwrap();
    let u = rescale(&phi, ScalingParams::new(0.5, 0.0).unwrap(), &spec).unwrap();
    let got = u.norm_l2() / phi.norm_l2();
    assert!((got / 0.5f64.powf(0.25) - 1.0).abs() <= 1e-6, "{got}");
}

#[test]
fn homogeneous_norm_scales_with_the_anisotropic_degree() {
    // ‖u_λ‖_{Ḣˢ} = λ^{s + (1 − 1/α)/2} ‖φ‖_{Ḣˢ}
    let g = Grid::planar(256, 256, 64.0, 64.0).unwrap();
    let phi = gaussian_plane(&g, 4.0);
    let alpha = 2.0;
    let spec = SymbolSpec::elliptic(alpha).unwrap();
    let s = 1.0;
    let base = homogeneous_sobolev_norm(&phi, s, alpha);
    assert!((homogeneous_sobolev_norm(&phi, 0.0, alpha) / phi.norm_l2() - 1.0).abs() < 1e-13);
    for lam in [2.0f64, 4.0] {
        let u = rescale(&phi, ScalingParams::new(lam, s).unwrap(), &spec).unwrap();
        let ratio = homogeneous_sobolev_norm(&u, s, alpha) / base;
        let expect = lam.powf(s + (1.0 - 1.0 / alpha) / 2.0);
        assert!((ratio / expect - 1.0).abs() < 1e-6, "lambda {lam}: {ratio} vs {expect}");
    }
}

#[test]
fn rescale_guards() {
    let g = Grid::planar(64, 64, 20.0, 20.0).unwrap();
    let spec = SymbolSpec::elliptic(1.0).unwrap();
    let wide = gaussian_plane(&g, 3.0);
    assert!(matches!(
        rescale(&wide, ScalingParams::new(0.25, 0.0).unwrap(), &spec),
        Err(Error::SupportEscapes(_))
    ));
    let narrow = gaussian_plane(&g, 0.5);
    assert!(matches!(
        rescale(&narrow, ScalingParams::new(8.0, 0.0).unwrap(), &spec),
        Err(Error::SupportEscapes(_))
    ));
    let torus = make_grid(16, 16, 20.0).unwrap();
    assert!(matches!(
        rescale(&bump(&torus, 1.0), ScalingParams::new(2.0, 0.0).unwrap(), &spec),
        Err(Error::Unsupported(_))
    ));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn mass_is_invariant_under_the_group(seed in 0u64..1000, t in -2.0f64..2.0, alpha in 0.5f64..2.5, hyper in any::<bool>()) {
        let g = make_grid(32, 16, 7.0).unwrap();
        let sign = if hyper { Sign::Hyperbolic } else { Sign::Elliptic };
        let spec = SymbolSpec::new(alpha, sign).unwrap();
        let phi = smooth_random(&g, &mut member_rng(seed, 0), 8.0, 5.0).to_physical();
        let m0 = mass(&phi);
        let m1 = mass(&linear_propagate(&phi, t, &spec));
        prop_assert!((m1 / m0 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn strang_step_preserves_mass(seed in 0u64..1000, dt in 1e-3f64..0.1, nu in -3.0f64..3.0) {
        let g = make_grid(32, 16, 7.0).unwrap();
        let spec = SymbolSpec::hyperbolic(1.5).unwrap();
        let cfg = SimulationConfig::new(spec, g.clone(), nu, dt, dt).unwrap()
            .with_dealias(fnls_core::spectral::DealiasRule::Off);
        let phi = smooth_random(&g, &mut member_rng(seed, 1), 6.0, 4.0).to_physical();
        let out = strang_step(&phi, dt, &cfg);
        prop_assert!((mass(&out) / mass(&phi) - 1.0).abs() < 1e-13);
    }
}
