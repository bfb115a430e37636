mod common;

use std::f64::consts::PI;

use levynest::catalog::{self, FixtureCatalog};
use levynest::{Atom, Centering, LevyTriplet, PolarComponent, PolarLevyMeasure, RadialPart, StableTerm};
use num_complex::Complex64;

fn one_atom() -> LevyTriplet {
    LevyTriplet::new(
        vec![vec![0.0]],
        PolarLevyMeasure::new(vec![PolarComponent {
            xi: vec![1.0],
            radial: RadialPart::Atomic { atoms: vec![Atom { r: 1.0, m: 1.0 }] },
        }]),
        vec![0.0],
        Centering::Compensated,
    )
}

fn stable(beta: f64, c: f64) -> LevyTriplet {
    catalog::stable(beta, &[vec![1.0]], &[c]).unwrap()
}

#[test]
fn gaussian_and_drift_cumulants() {
    let g = LevyTriplet::gaussian(vec![vec![1.0]]);
    assert_eq!(g.cumulant(&[2.0]).unwrap(), Complex64::new(-2.0, 0.0));
    assert!((g.char_fn(&[1.0]).unwrap().re - (-0.5f64).exp()).abs() < 1e-15);
    let d = LevyTriplet::delta(vec![3.0]);
    assert_eq!(d.cumulant(&[1.0]).unwrap(), Complex64::new(0.0, 3.0));
}

#[test]
fn single_atom_at_pi() {
    let c = one_atom().cumulant(&[PI]).unwrap();
    assert!((c.re + 2.0).abs() < 1e-14 && (c.im + PI / 2.0).abs() < 1e-14, "{c}");
    let f = one_atom().char_fn(&[PI]).unwrap();
    let want = Complex64::new(-2.0, -PI / 2.0).exp();
    assert!((f - want).norm() < 1e-14);
}

#[test]
fn every_fixture_is_normalized_and_bounded() {
    for (name, t) in FixtureCatalog::standard().iter() {
        let zero = vec![0.0; t.d];
        assert_eq!(t.cumulant(&zero).unwrap(), Complex64::new(0.0, 0.0), "{name}");
        for z in levynest::config::z_grid(t.d, 16, 5.0) {
            assert!(t.char_fn(&z).unwrap().norm() <= 1.0 + 1e-12, "{name}");
        }
    }
}

#[test]
fn stable_coefficients_add_under_convolution() {
    let s = stable(1.5, 1.0).convolve(&stable(1.5, 2.0)).unwrap().nu.canonical();
    match &s.components[0].radial {
        RadialPart::StableMix { terms } => assert_eq!(terms, &vec![StableTerm { beta: 1.5, c: 3.0 }]),
        other => panic!("unexpected radial part {other:?}"),
    }
}

#[test]
fn half_convolution_twice_is_identity() {
    let mu = FixtureCatalog::standard().get("cp_gauss").unwrap().clone();
    let half = mu.t_convolution(0.5).unwrap();
    let back = half.convolve(&half).unwrap();
    for z in levynest::config::z_grid(1, 16, 5.0) {
        assert!((back.cumulant(&z).unwrap() - mu.cumulant(&z).unwrap()).norm() < 1e-12);
    }
}

#[test]
fn scaling_stable_and_gaussian() {
    let s = stable(0.5, 1.0).scale(3.0).unwrap();
    match &s.nu.components[0].radial {
        RadialPart::StableMix { terms } => assert!((terms[0].c - 3f64.sqrt()).abs() < 1e-14),
        other => panic!("unexpected radial part {other:?}"),
    }
    for z in levynest::config::z_grid(1, 16, 5.0) {
        let lhs = s.cumulant(&z).unwrap();
        let rhs = stable(0.5, 1.0).cumulant(&[3.0 * z[0]]).unwrap();
        assert!((lhs - rhs).norm() < 1e-8);
    }
    let g = LevyTriplet::gaussian(vec![vec![1.5]]).scale(2.0).unwrap();
    assert_eq!(g.a, vec![vec![6.0]]);
}

#[test]
fn mean_zero_form_of_one_atom() {
    // mean = ∫ x (1 − 1/(1+x²)) ν(dx) = 1/2 for the atom at 1
    let m = one_atom().to_mean_zero().unwrap();
    assert_eq!(m.centering, Centering::MeanZero);
    assert!((m.gamma[0] - 0.5).abs() < 1e-15);
    let d = LevyTriplet::delta(vec![2.0]).to_mean_zero().unwrap();
    assert_eq!(d.gamma, vec![2.0]);
}

#[test]
fn stable_cumulant_matches_closed_shape() {
    for beta in [0.5, 1.5] {
        let mu = stable(beta, 1.0);
        let g = common::gamma(-beta);
        let im1 = mu.cumulant(&[1.0]).unwrap().im;
        for z in [-3.0, -0.7, 0.4, 2.5] {
            let c = mu.cumulant(&[z]).unwrap();
            let az: f64 = f64::abs(z);
            let re = g * (PI * beta / 2.0).cos() * az.powf(beta);
            let im = -g * (PI * beta / 2.0).sin() * (z.signum() * az.powf(beta) - z);
            assert!((c.re - re).abs() <= 1e-6 * re.abs(), "β={beta} z={z}: {} vs {re}", c.re);
            assert!((c.im - z * im1 - im).abs() <= 1e-6 * im.abs().max(1e-3), "β={beta} z={z}");
        }
    }
}

#[test]
fn kgrid_cumulant_matches_brute_force() {
    // step_k: density r^{-1.5} on (0, 1); substitute r = s² to remove the endpoint singularity
    let mu = FixtureCatalog::standard().get("step_k").unwrap().clone();
    for w in [0.5, 2.0, -4.0] {
        let re = common::simpson(
            |s: f64| if s == 0.0 { 0.0 } else { 2.0 * ((w * s * s).cos() - 1.0) / (s * s) },
            0.0,
            1.0,
            4000,
        );
        let im = common::simpson(
            |s: f64| {
                if s == 0.0 {
                    0.0
                } else {
                    let r = s * s;
                    2.0 * ((w * r).sin() - w * r / (1.0 + r * r)) / (s * s)
                }
            },
            0.0,
            1.0,
            4000,
        );
        let c = mu.cumulant(&[w]).unwrap();
        assert!(common::close((c.re, c.im), (re, im)) < 1e-8, "w={w}: {c} vs {re}+{im}i");
    }
}
