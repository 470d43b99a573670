use std::f64::consts::PI;

use fnls_core::ensemble::{gaussian_block, member_rng, random_spectrum};
use fnls_core::spectral::{
    dispersion, load_snapshot, make_grid, read_snapshot, save_snapshot, write_snapshot, DealiasRule, Field,
    Representation, Sign, SymbolSpec,
};
use fnls_core::Error;
use num_complex::Complex64;
use proptest::prelude::*;

#[test]
fn grid_examples() {
    let g = make_grid(4, 4, 2.0 * PI).unwrap();
    let mut xi: Vec<f64> = g.xi().to_vec();
    xi.sort_by(f64::total_cmp);
    assert_eq!(xi, vec![-2.0, -1.0, 0.0, 1.0]);
    let mut n: Vec<i64> = (0..4).map(|l| g.mode_y(l)).collect();
    n.sort();
    assert_eq!(n, vec![-2, -1, 0, 1]);

    let g = make_grid(8, 4, 16.0 * PI).unwrap();
    assert!((g.dx() - 2.0 * PI).abs() < 1e-15);
    assert!((g.dy() - PI / 2.0).abs() < 1e-15);

    assert!(matches!(make_grid(5, 4, 1.0), Err(Error::InvalidGrid(_))));
    assert!(make_grid(2, 4, 1.0).is_err());
    assert!(make_grid(4, 4, 0.0).is_err());
}

#[test]
fn dispersion_examples() {
    let e1 = SymbolSpec::elliptic(1.0).unwrap();
    assert_eq!(dispersion(&e1, 2.0, 3), 13.0);
    let h15 = SymbolSpec::hyperbolic(1.5).unwrap();
    assert!((dispersion(&h15, 0.0, 2) + 8.0).abs() < 1e-12);
    let h2 = SymbolSpec::hyperbolic(2.0).unwrap();
    assert_eq!(dispersion(&h2, 1.0, 2), -15.0);
}

#[test]
fn constant_and_plane_wave_transforms() {
    let g = make_grid(16, 8, 3.0).unwrap();
    let one = Field::from_fn(&g, |_, _| Complex64::new(1.0, 0.0)).forward().unwrap();
    let (i0, l0) = (g.index_of_mode_x(0).unwrap(), g.index_of_mode_y(0).unwrap());
    for ((i, l), c) in one.data().indexed_iter() {
        if (i, l) == (i0, l0) {
            assert!((c - 1.0).norm() < 1e-15);
        } else {
            assert!(c.norm() <= 1e-13);
        }
    }
    let xi0 = 2.0 * PI * 3.0 / 3.0;
    let u = Field::from_fn(&g, |x, y| Complex64::from_polar(1.0, xi0 * x - 2.0 * y));
    let uh = u.forward().unwrap();
    let (ia, la) = (g.index_of_mode_x(3).unwrap(), g.index_of_mode_y(-2).unwrap());
    for ((i, l), c) in uh.data().indexed_iter() {
        let expect = if (i, l) == (ia, la) { 1.0 } else { 0.0 };
        assert!((c - expect).norm() < 1e-13);
    }
}

#[test]
fn dealias_examples() {
    let g = make_grid(16, 16, 5.0).unwrap();
    let inside = random_spectrum(&g, &mut member_rng(4, 0), |j, n| {
        if j.abs() <= 4 && n.abs() <= 4 {
            1.0
        } else {
            0.0
        }
    });
    let kept = inside.dealias(DealiasRule::Half).unwrap();
    assert_eq!(kept.data(), inside.data());

    let mut top = Field::zeros(&g, Representation::Spectral);
    top.data_mut()[[g.index_of_mode_x(7).unwrap(), 0]] = Complex64::new(1.0, 0.0);
    let cut = top.dealias(DealiasRule::Half).unwrap();
    assert!(cut.data().iter().all(|c| *c == Complex64::default()));

    let full = random_spectrum(&g, &mut member_rng(4, 1), |_, _| 1.0);
    for rule in [DealiasRule::TwoThirds, DealiasRule::Half, DealiasRule::Off] {
        let once = full.dealias(rule).unwrap();
        assert_eq!(once.dealias(rule).unwrap().data(), once.data());
    }
}

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let g = make_grid(8, 4, 1.5).unwrap();
    let u = gaussian_block(&g, &mut member_rng(9, 0), 4, 2).inverse().unwrap();
    let mut buf = Vec::new();
    write_snapshot(&mut buf, &u, 0.125).unwrap();
    assert_eq!(&buf[..4], b"FNLS");
    assert_eq!(buf.len(), 4 + 4 + 4 + 4 + 8 + 8 + 1 + 8 * 4 * 16);
    let snap = read_snapshot(&mut buf.as_slice()).unwrap();
    assert_eq!(snap.time, 0.125);
    assert_eq!(snap.field.representation(), Representation::Physical);
    assert!(snap
        .field
        .data()
        .iter()
        .zip(u.data())
        .all(|(a, b)| a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()));

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("u.fnls");
    save_snapshot(&path, &u.forward().unwrap(), -1.0).unwrap();
    let back = load_snapshot(&path).unwrap();
    assert_eq!(back.field.representation(), Representation::Spectral);
    assert_eq!(back.time, -1.0);
}

proptest! {
    #[test]
    fn round_trip_and_plancherel(seed in 0u64..10_000, nx_pow in 4u32..9, ny_pow in 2u32..7, lx in 0.5f64..50.0) {
        let g = make_grid(1 << nx_pow, 1 << ny_pow, lx).unwrap();
        let u = random_spectrum(&g, &mut member_rng(seed, 0), |_, _| 1.0).inverse().unwrap();
        let uh = u.forward().unwrap();
        let back = uh.inverse().unwrap();
        prop_assert!(back.distance(&u).unwrap() <= 1e-12 * u.norm_l2());
        let phys: f64 = u.data().iter().map(|c| c.norm_sqr()).sum::<f64>() * g.cell_area();
        let spec: f64 = uh.data().iter().map(|c| c.norm_sqr()).sum::<f64>() * lx * 2.0 * PI;
        prop_assert!((phys - spec).abs() <= 1e-12 * phys);
    }

    #[test]
    fn symbol_symmetries(xi in -1e3f64..1e3, n in -1000i64..1000, alpha in 0.05f64..4.0, hyper in any::<bool>()) {
        let sign = if hyper { Sign::Hyperbolic } else { Sign::Elliptic };
        let spec = SymbolSpec::new(alpha, sign).unwrap();
        let w = dispersion(&spec, xi, n);
        prop_assert_eq!(w, dispersion(&spec, -xi, n));
        prop_assert_eq!(w, dispersion(&spec, xi, -n));
        prop_assert_eq!(w, dispersion(&spec, -xi, -n));
    }

    #[test]
    fn symbol_monotone_in_n(xi in -50f64..50.0, n in 0i64..500, alpha in 0.1f64..3.0) {
        let e = SymbolSpec::elliptic(alpha).unwrap();
        let h = SymbolSpec::hyperbolic(alpha).unwrap();
        prop_assert!(dispersion(&e, xi, n + 1) > dispersion(&e, xi, n));
        prop_assert!(dispersion(&h, xi, n + 1) < dispersion(&h, xi, n));
    }
}
