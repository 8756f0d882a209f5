use super::*;
use crate::specfun::{gamma_tilde_omega, ln_gamma_real};

fn s(a: f64, b: f64) -> ComplexPair {
    ComplexPair::real(a, b)
}

fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
    (a - b).norm() <= rel * a.norm().max(b.norm())
}

#[test]
fn zeta_one_dimensional_example() {
    let f = GaussianTestFn::new(1, 1, 1.0, 1.0);
    let z = zeta_integral(&f, s(1.0, 1.0), &EvalSpec::new(0, 0)).unwrap();
    assert!((z.value.re - 0.25 * PI.sqrt()).abs() < 1e-10);
    // Complex s against the product of 1-D Gamma integrals.
    let sc = ComplexPair::new(Complex64::new(0.5, 0.7), Complex64::new(0.3, -0.4));
    let z = zeta_integral(&f, sc, &EvalSpec::new(0, 0)).unwrap();
    let g = |a: Complex64| crate::specfun::gamma(a).unwrap();
    let exact = g((sc.s1 + 1.0) * 0.5) * 0.5 * g(sc.s2 + 0.5);
    assert!(close(z.value, exact, 1e-9), "{} vs {exact}", z.value);
}

#[test]
fn conservative_region_enforced() {
    let f = GaussianTestFn::new(1, 1, 1.0, 1.0);
    assert!(matches!(zeta_integral(&f, s(-0.5, 0.0), &EvalSpec::new(0, 0)), Err(Error::Convergence(_))));
    assert!(zeta_integral(&f, s(-0.5, 0.0), &EvalSpec::new(0, 0).extended()).is_ok());
    let f2 = GaussianTestFn::new(2, 1, 1.0, 1.0);
    assert!(zeta_integral(&f2, s(-0.3, 0.0), &EvalSpec::new(10, 0).extended()).is_err());
}

#[test]
fn orbit_pairings_fill_space() {
    let center = EnhancedPoint::from_coordinates(2, 1, &[0.3, 0.1, -0.2, 0.4, -0.1]);
    let f = GaussianTestFn::new(2, 1, 1.0, 1.5).with_center(&center);
    let pairs = orbit_pairings_direct(&f, s(0.0, 0.0), &EvalSpec::new(200_000, 5)).unwrap();
    assert_eq!(pairs.len(), 4);
    let total: Complex64 = pairs.iter().map(|(_, e)| e.value).sum();
    let se = pairs.iter().map(|(_, e)| e.stderr * e.stderr).sum::<f64>().sqrt();
    assert!((total.re - f.integral()).abs() < 4.0 * se.max(1e-3 * f.integral()));
    // n = 1 by quadrature.
    let f1 = GaussianTestFn::new(1, 1, 1.0, 1.0).with_center(&EnhancedPoint::from_coordinates(1, 1, &[0.4, 0.2]));
    let pairs = orbit_pairings_direct(&f1, s(0.0, 0.0), &EvalSpec::new(0, 0)).unwrap();
    let total: Complex64 = pairs.iter().map(|(_, e)| e.value).sum();
    assert!((total.re - f1.integral()).abs() < 1e-10);
}

#[test]
fn wishart_and_gaussian_proposals_agree() {
    let f = GaussianTestFn::new(2, 1, 1.0, 1.0);
    let spec = EvalSpec::new(400_000, 17);
    let a = zeta_integral(&f, s(1.0, 1.0), &spec).unwrap();
    let b = orbit_pairings_direct(&f, s(1.0, 1.0), &spec.substream(9)).unwrap().remove(0).1;
    assert!(a.z_score(&b) < 4.0, "{a:?} {b:?}");
    assert!(a.relative_stderr() < 0.01);
}

#[test]
fn zeta_stable_across_seeds() {
    let f = GaussianTestFn::new(2, 1, 1.0, 1.0);
    let runs: Vec<_> = (0..3).map(|k| zeta_integral(&f, s(1.0, 1.0), &EvalSpec::new(200_000, 100 + k)).unwrap()).collect();
    for i in 0..3 {
        for j in i + 1..3 {
            assert!(runs[i].z_score(&runs[j]) < 3.0);
        }
    }
}

#[test]
fn sign_flip_symmetry() {
    let c = [0.3, -0.2, 0.5, 0.2, -0.3];
    let f = GaussianTestFn::new(2, 1, 1.0, 1.0).with_center(&EnhancedPoint::from_coordinates(2, 1, &c));
    let flipped = [-0.3, 0.2, -0.5, 0.2, -0.3];
    let g = GaussianTestFn::new(2, 1, 1.0, 1.0).with_center(&EnhancedPoint::from_coordinates(2, 1, &flipped));
    let spec = EvalSpec::new(200_000, 3);
    let a = orbit_pairings_direct(&f, s(0.5, 0.5), &spec).unwrap();
    let b = orbit_pairings_direct(&g, s(0.5, 0.5), &spec.substream(1)).unwrap();
    for (rho, e) in &a {
        let other = &b.iter().find(|(r, _)| *r == rho.flipped()).unwrap().1;
        assert!(e.z_score(other) < 4.0, "{rho}");
    }
}

#[test]
fn gamma_constant_examples() {
    let cfg = McConfig::new(100_000, 1);
    let v = gamma_const_integral_mc(1, 1, 0.0, 0.0, &cfg).unwrap();
    assert!((v.value.re - 1.0).abs() < 1e-12);
    let v = gamma_const_integral_mc(1, 1, 1.0, 1.0, &cfg).unwrap();
    assert!((v.value.re - 2.0).abs() < 4.0 * v.stderr);
    let v = gamma_const_integral_mc(2, 1, 1.0, 0.0, &cfg).unwrap();
    assert!(v.stderr < 1e-10, "β = 0 makes the weight constant");
    let lebesgue = PI.sqrt() * ln_gamma_real(2.5).exp();
    assert!((v.value.re - lebesgue).abs() < 1e-10 * lebesgue);
    let check = gamma_const_check(2, 1, 1.0, 0.0, &cfg).unwrap();
    assert!(check.pass, "{}", check.summary());
}

#[test]
fn gamma_constant_measure_normalization() {
    // The closed form √(2π)Γ(α+β+3/2)Γ(α+1) matches the Lebesgue integral only
    // after the factor 2^{-1/2}.
    let cfg = McConfig::new(200_000, 2);
    let v = gamma_const_integral_mc(2, 1, 0.5, 0.7, &cfg).unwrap();
    let closed = gindikin_gamma(2, 1, Complex64::new(0.5, 0.0), Complex64::new(0.7, 0.0)).unwrap();
    assert!((v.value - closed * 2f64.powf(-0.5)).norm() < 4.0 * v.stderr);
    assert!((v.value - closed).norm() > 50.0 * v.stderr);
}

#[test]
fn phi_covariance_small() {
    let x = RectMatrix::from_rows(&[vec![1.0, 0.2], vec![0.3, 1.1], vec![-0.4, 0.5]]).unwrap();
    for r in phi_covariance_check(&x, 0.5, 0.75, &McConfig::new(100_000, 4)).unwrap() {
        assert!(r.pass, "{}", r.summary());
    }
}

#[test]
fn shift_relation_one_dimensional() {
    let f = GaussianTestFn::new(1, 1, 1.2, 0.8)
        .with_center(&EnhancedPoint::from_coordinates(1, 1, &[0.3, -0.2]))
        .to_modulated()
        .as_poly();
    for which in [Identity::First, Identity::Second] {
        for sp in [s(0.5, 0.25), s(1.5, 1.0)] {
            let r = shift_relation_check(&f, sp, which, &EvalSpec::new(0, 0)).unwrap();
            assert!(r.rel_err < 1e-8, "{}", r.summary());
        }
    }
}

#[test]
fn descent_matches_direct_on_every_orbit() {
    let f = GaussianTestFn::new(1, 1, 1.0, 1.3)
        .with_center(&EnhancedPoint::from_coordinates(1, 1, &[-0.2, 0.4]))
        .to_modulated()
        .as_poly();
    let desc = Descent::new(1, 1).unwrap();
    assert_eq!(desc.kappa, [1.0, 4.0]);
    let spec = EvalSpec::new(0, 0).extended();
    for sp in [s(0.3, 0.2), s(-0.4, -0.2), s(1.0, 0.5)] {
        let direct = orbit_pairings(&f, sp, &spec, None).unwrap();
        let desc_v = orbit_pairings(&f, sp, &spec, Some(&desc)).unwrap();
        for ((r, a), (_, b)) in direct.iter().zip(&desc_v) {
            assert!(close(a.value, b.value, 1e-8), "{r} at {sp:?}: {} vs {}", a.value, b.value);
        }
    }
}

#[test]
fn descent_factor_is_gamma_ratio() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for (n, d) in [(1, 1), (2, 1), (2, 2), (3, 1)] {
        let desc = Descent::new(n, d).unwrap();
        for _ in 0..5 {
            let sp = ComplexPair::new(
                Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0)),
                Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-1.0..1.0)),
            );
            let b = desc.b_first(sp) * desc.b_second(shift(sp, 1.0, 0.0));
            assert!(close(b, gamma_shift_ratio(n, d, sp), 1e-12));
        }
    }
}

#[test]
fn normalized_zeta_crosses_pole_lines() {
    let f = GaussianTestFn::new(1, 1, 1.0, 1.0).to_modulated().as_poly();
    let desc = Descent::new(1, 1).unwrap();
    let spec = EvalSpec::new(0, 0);
    for sp in [s(0.5, 0.5), s(0.2, 0.1)] {
        let direct = zeta_integral(&f, sp, &spec).unwrap().value / gamma_tilde_omega(1, 1, sp).unwrap();
        let v = normalized_zeta_descended(&f, sp, &spec, &desc).unwrap().value;
        assert!(close(direct, v, 1e-9));
    }
    // Centered Gaussian: Z/Γ_Ω̃ = Γ((s1+1)/2) / (2 Γ(s1+1) Γ(s2+1)).
    for sp in [s(-1.5, -0.5), s(-1.5, -1.25), s(-0.5, -1.0), s(-1.25, -0.75)] {
        let v = normalized_zeta_descended(&f, sp, &spec.extended(), &desc).unwrap().value;
        let exact = crate::specfun::gamma((sp.s1 + 1.0) * 0.5).unwrap()
            * 0.5
            * crate::specfun::recip_gamma(sp.s1 + 1.0)
            * crate::specfun::recip_gamma(sp.s2 + 1.0);
        assert!((v - exact).norm() < 1e-9, "{sp:?}: {v} vs {exact}");
    }
}

#[test]
fn clerc_one_dimensional() {
    for alpha in [-0.4, -0.25, -0.1] {
        let r = clerc_check(1, 1, alpha, PI, &[0.3], &McConfig::new(0, 0)).unwrap();
        assert!(r.pass && r.rel_err < 1e-8, "{}", r.summary());
    }
    assert!(clerc_check(1, 1, 0.2, PI, &[0.0], &McConfig::new(0, 0)).is_err());
}

#[test]
fn clerc_two_dimensional() {
    let r = clerc_check(2, 1, -0.5, PI, &[0.2, -0.1], &McConfig::new(200_000, 6)).unwrap();
    assert!(r.pass, "{}", r.summary());
}
