use std::sync::Arc;

use fnls_core::ensemble::{member_rng, random_spectrum, smooth_random};
use fnls_core::propagator::{duhamel, duhamel_trajectory, linear_propagate, Propagator, Quadrature, TimeWindow};
use fnls_core::spectral::{make_grid, omega_table, DealiasRule, Field, Grid, Representation, Sign, SymbolSpec};
use fnls_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

fn grid() -> Arc<Grid> {
    make_grid(32, 16, 9.0).unwrap()
}

fn single_mode(g: &Arc<Grid>, j: i64, n: i64, a: Complex64) -> Field {
    let mut f = Field::zeros(g, Representation::Spectral);
    f.data_mut()[[g.index_of_mode_x(j).unwrap(), g.index_of_mode_y(n).unwrap()]] = a;
    f
}

#[test]
fn zero_time_is_identity_and_modes_rotate() {
    let g = grid();
    let spec = SymbolSpec::hyperbolic(1.5).unwrap();
    let phi = smooth_random(&g, &mut member_rng(1, 0), 6.0, 4.0).to_physical();
    assert_eq!(linear_propagate(&phi, 0.0, &spec).data(), phi.data());

    let a = Complex64::new(0.3, 0.7);
    let u = linear_propagate(&single_mode(&g, 5, -3, a), 1.7, &spec);
    let w = spec.omega(2.0 * std::f64::consts::PI * 5.0 / 9.0, -3.0);
    let expect = single_mode(&g, 5, -3, a * Complex64::from_polar(1.0, -1.7 * w));
    assert!(u.distance(&expect).unwrap() < 1e-15);
}

#[test]
fn duhamel_of_zero_is_zero() {
    let g = grid();
    let spec = SymbolSpec::elliptic(1.0).unwrap();
    let w = TimeWindow::symmetric(1.0, 21).unwrap();
    let f = vec![Field::zeros(&g, Representation::Physical); 21];
    let d = duhamel(&f, &w, 0.5, &spec, Quadrature::Trapezoid).unwrap();
    assert_eq!(d.representation(), Representation::Physical);
    assert!(d.data().iter().all(|c| *c == Complex64::default()));
}

#[test]
fn free_wave_forcing_gives_t_u_of_t() {
    let g = grid();
    let spec = SymbolSpec::hyperbolic(2.0).unwrap();
    let gdata = smooth_random(&g, &mut member_rng(2, 0), 6.0, 4.0);
    let w = TimeWindow::symmetric(1.0, 41).unwrap();
    let times = w.nodes().times();
    let forcing: Vec<Field> = times.iter().map(|&t| linear_propagate(&gdata, t, &spec)).collect();
    for rule in [Quadrature::Trapezoid, Quadrature::Simpson] {
        let all = duhamel_trajectory(&forcing, &w.nodes(), &spec, rule).unwrap();
        for (k, &t) in times.iter().enumerate() {
            let expect = linear_propagate(&gdata, t, &spec).scaled(Complex64::new(t, 0.0));
            assert!(all[k].distance(&expect).unwrap() < 1e-12, "{rule:?} t={t}");
        }
        let single = duhamel(&forcing, &w, -0.5, &spec, rule).unwrap();
        let expect = linear_propagate(&gdata, -0.5, &spec).scaled(Complex64::new(-0.5, 0.0));
        assert!(single.distance(&expect).unwrap() < 1e-12);
    }
}

fn constant_mode_error(nt: usize, rule: Quadrature) -> f64 {
    // f(t′) ≡ a·e_{(j,n)}: ∫₀ᵗ e^{−i(t−t′)ω} dt′ = (e^{−itω} − 1)/(−iω).
    let g = grid();
    let spec = SymbolSpec::elliptic(1.5).unwrap();
    let a = Complex64::new(1.0, -0.5);
    let (j, n) = (2, 3);
    let omega = spec.omega(2.0 * std::f64::consts::PI * j as f64 / 9.0, n as f64);
    let w = TimeWindow::new(0.0, 1.0, nt).unwrap();
    let f = vec![single_mode(&g, j, n, a); nt];
    let d = duhamel(&f, &w, 1.0, &spec, rule).unwrap();
    let i = Complex64::i();
    let exact = a * ((-i * omega).exp() - 1.0) / (-i * omega);
    (d.data()[[g.index_of_mode_x(j).unwrap(), g.index_of_mode_y(n).unwrap()]] - exact).norm()
}

#[test]
fn duhamel_trapezoid_is_second_order() {
    let e1 = constant_mode_error(101, Quadrature::Trapezoid);
    let e2 = constant_mode_error(201, Quadrature::Trapezoid);
    let order = (e1 / e2).log2();
    assert!((order - 2.0).abs() < 0.05, "order {order}");
}

#[test]
fn duhamel_simpson_is_fourth_order() {
    let e1 = constant_mode_error(41, Quadrature::Simpson);
    let e2 = constant_mode_error(81, Quadrature::Simpson);
    let order = (e1 / e2).log2();
    assert!((order - 4.0).abs() < 0.2, "order {order}");
}

#[test]
fn trajectory_recursion_matches_direct_weights() {
    let g = grid();
    let spec = SymbolSpec::hyperbolic(1.25).unwrap();
    let w = TimeWindow::symmetric(0.5, 17).unwrap();
    let forcing: Vec<Field> = (0..17)
        .map(|k| smooth_random(&g, &mut member_rng(30, k), 5.0, 3.0))
        .collect();
    let all = duhamel_trajectory(&forcing, &w.nodes(), &spec, Quadrature::Trapezoid).unwrap();
    for (k, &t) in w.nodes().times().iter().enumerate() {
        let d = duhamel(&forcing, &w, t, &spec, Quadrature::Trapezoid).unwrap();
        assert!(all[k].distance(&d).unwrap() < 1e-13);
    }
}

#[test]
fn duhamel_errors() {
    let g = grid();
    let spec = SymbolSpec::elliptic(1.0).unwrap();
    let w = TimeWindow::new(0.0, 1.0, 11).unwrap();
    let f = vec![Field::zeros(&g, Representation::Spectral); 11];
    assert!(matches!(
        duhamel(&f, &w, 1.5, &spec, Quadrature::Trapezoid),
        Err(Error::OutsideWindow { .. })
    ));
    assert!(matches!(
        duhamel(&f, &w, 0.55, &spec, Quadrature::Trapezoid),
        Err(Error::OffGrid { .. })
    ));
    assert!(TimeWindow::new(0.0, 1.0, 1).is_err());
    assert!(duhamel(&f[..5], &w, 0.5, &spec, Quadrature::Trapezoid).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn unitarity_and_group_law(seed in 0u64..1000, t in -2.0f64..2.0, s in -2.0f64..2.0, alpha in 0.5f64..2.5, hyper in any::<bool>()) {
        let g = grid();
        let sign = if hyper { Sign::Hyperbolic } else { Sign::Elliptic };
        let spec = SymbolSpec::new(alpha, sign).unwrap();
        let phi = random_spectrum(&g, &mut member_rng(seed, 0), |_, _| 1.0);
        let ut = linear_propagate(&phi, t, &spec);
        prop_assert!((ut.norm_l2() / phi.norm_l2() - 1.0).abs() < 1e-12);
        let a = linear_propagate(&ut, s, &spec);
        let b = linear_propagate(&phi, s + t, &spec);
        // Each phase e^{−itω} is rounded at its argument, so large |tω| costs
        // ~ε|tω| per coefficient.
        let w_max = omega_table(&g, &spec).iter().fold(0.0f64, |m, w| m.max(w.abs()));
        let tol = (1e-13 + 8.0 * f64::EPSILON * w_max * (t.abs() + s.abs() + (s + t).abs())) * phi.norm_l2();
        prop_assert!(a.distance(&b).unwrap() <= tol);
    }

    #[test]
    fn propagation_commutes_with_diagonal_operators(seed in 0u64..1000, t in -2.0f64..2.0) {
        let g = grid();
        let spec = SymbolSpec::elliptic(1.5).unwrap();
        let prop = Propagator::new(&g, &spec);
        let phi = random_spectrum(&g, &mut member_rng(seed, 0), |_, _| 1.0);
        let a = prop.apply(&phi.dealias(DealiasRule::TwoThirds).unwrap(), t);
        let b = prop.apply(&phi, t).dealias(DealiasRule::TwoThirds).unwrap();
        prop_assert!(a.distance(&b).unwrap() <= 1e-14 * phi.norm_l2());
        let m = |xi: f64, eta: f64| Complex64::new((1.0 + xi * xi + eta * eta).sqrt(), 0.3 * xi);
        let c = prop.apply(&phi.apply_multiplier(m).unwrap(), t);
        let d = prop.apply(&phi, t).apply_multiplier(m).unwrap();
        prop_assert!(c.distance(&d).unwrap() <= 1e-12 * c.norm_l2());
    }

    #[test]
    fn duhamel_is_linear(seed in 0u64..1000, a in -2.0f64..2.0, b in -2.0f64..2.0) {
        let g = grid();
        let spec = SymbolSpec::hyperbolic(1.5).unwrap();
        let w = TimeWindow::new(0.0, 0.5, 9).unwrap();
        let f1: Vec<Field> = (0..9).map(|k| random_spectrum(&g, &mut member_rng(seed, k), |_, _| 1.0)).collect();
        let f2: Vec<Field> = (0..9).map(|k| random_spectrum(&g, &mut member_rng(seed, 100 + k), |_, _| 1.0)).collect();
        let mix: Vec<Field> = f1.iter().zip(&f2)
            .map(|(x, y)| x.scaled(Complex64::new(a, 0.0)).axpy(Complex64::new(b, 0.0), y).unwrap())
            .collect();
        let d1 = duhamel(&f1, &w, 0.5, &spec, Quadrature::Trapezoid).unwrap();
        let d2 = duhamel(&f2, &w, 0.5, &spec, Quadrature::Trapezoid).unwrap();
        let dm = duhamel(&mix, &w, 0.5, &spec, Quadrature::Trapezoid).unwrap();
        let lin = d1.scaled(Complex64::new(a, 0.0)).axpy(Complex64::new(b, 0.0), &d2).unwrap();
        prop_assert!(dm.distance(&lin).unwrap() <= 1e-12 * (1.0 + dm.norm_l2()));
    }
}
