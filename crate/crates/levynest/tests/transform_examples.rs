mod common;

use levynest::catalog::{self, FixtureCatalog};
use levynest::classes::{class_level, class_level_above, decompose_rho_b};
use levynest::polar::{default_beta_grid, extract_polar, fit_gamma, h_function, GammaAtom};
use levynest::radial::Centering;
use levynest::transform::{
    apply_phi, apply_phi_m, beta_identity_check, build_l_infty_member, c1_star_gamma_limit, domain_check, phi_kgrid,
    verify_range, MappingSpec,
};
use levynest::{LevyTriplet, RadialPart, RunConfig};
use num_complex::Complex64;

fn cfg() -> RunConfig {
    RunConfig::default()
}

fn stable(beta: f64, c: f64) -> LevyTriplet {
    catalog::stable(beta, &[vec![1.0]], &[c]).unwrap()
}

fn stable_c(t: &LevyTriplet) -> f64 {
    match &t.nu.components[0].radial {
        RadialPart::StableMix { terms } => terms[0].c,
        other => panic!("unexpected radial part {other:?}"),
    }
}

/// ∫_lo^1 C_μ(sz) s^{−α−1} ds by Simpson in log s.
fn phi_oracle(mu: &LevyTriplet, alpha: f64, z: f64, lo: f64) -> Complex64 {
    let f = |v: f64, part: usize| {
        let s = v.exp();
        let c = mu.cumulant(&[s * z]).unwrap() * s.powf(-alpha);
        if part == 0 {
            c.re
        } else {
            c.im
        }
    };
    let a = lo.ln();
    Complex64::new(common::simpson(|v| f(v, 0), a, 0.0, 20_000), common::simpson(|v| f(v, 1), a, 0.0, 20_000))
}

#[test]
fn domain_examples() {
    let c = cfg();
    let g = LevyTriplet::gaussian(vec![vec![1.0]]);
    for alpha in [-1.0, 0.0, 0.5, 1.5] {
        assert!(domain_check(&g, alpha, &c).unwrap().verdict);
    }
    assert!(!domain_check(&stable(0.5, 1.0), 0.7, &c).unwrap().verdict);
    for (_, t) in FixtureCatalog::standard().iter() {
        assert!(domain_check(t, -1.0, &c).unwrap().verdict);
    }
    let r = domain_check(&stable(1.5, 1.0), 2.5, &c).unwrap();
    assert!(!r.verdict && r.note.contains("{δ_0}, when α ≥ 2"));
}

#[test]
fn closed_form_images() {
    let c = cfg();
    let g = apply_phi(&LevyTriplet::gaussian(vec![vec![1.0]]), 0.0, &c).unwrap().output.unwrap();
    assert!((g.a[0][0] - 0.5).abs() < 1e-15);
    let s = apply_phi(&stable(1.5, 1.0), 0.5, &c).unwrap().output.unwrap();
    assert!((stable_c(&s) - 1.0).abs() < 1e-14);
    let g3 = apply_phi_m(&LevyTriplet::gaussian(vec![vec![1.0]]), 0.0, 3, &c).unwrap().output.unwrap();
    assert!((g3.a[0][0] - 0.125).abs() < 1e-15);
    let s2 = apply_phi_m(&stable(1.5, 1.0), 0.5, 2, &c).unwrap().output.unwrap();
    assert!((stable_c(&s2) - 1.0).abs() < 1e-14);
    let s2 = apply_phi_m(&stable(1.5, 1.0), 0.25, 2, &c).unwrap().output.unwrap();
    assert!((stable_c(&s2) - 1.0 / 1.25f64.powi(2)).abs() < 1e-14);
}

#[test]
fn atom_image_at_minus_one() {
    let c = cfg();
    let atom = catalog::atomic_cp(&[(1.0, 1.0)]).unwrap();
    let out = apply_phi(&atom, -1.0, &c).unwrap().output.unwrap();
    let k = match &out.nu.components[0].radial {
        RadialPart::KGrid(g) => g.clone(),
        other => panic!("unexpected radial part {other:?}"),
    };
    assert_eq!(k.k_at(0.5), 1.0);
    assert_eq!(k.k_at(0.01), 1.0);
    assert_eq!(k.k_at(1.5), 0.0);
    for z in [0.7, -2.0, 4.5] {
        let want = phi_oracle(&atom, -1.0, z, 1e-12);
        let got = out.cumulant(&[z]).unwrap();
        assert!((got - want).norm() < 1e-8, "z={z}: {got} vs {want}");
    }
}

#[test]
fn cumulant_identity_on_catalog() {
    let c = cfg();
    for (name, t) in FixtureCatalog::standard().iter() {
        for alpha in [-1.0, 0.0, 0.5, 1.2] {
            let r = apply_phi(t, alpha, &c).unwrap();
            if !r.domain_ok {
                continue;
            }
            // sampled k-grid images carry an O(h²) error in the log grid step
            let tol = if r.exact { 1e-10 } else { 5e-4 };
            assert!(r.identity_error <= tol, "{name} α={alpha}: {}", r.identity_error);
        }
    }
}

#[test]
fn kgrid_image_error_is_second_order() {
    let o = cfg().quad;
    let g = match &FixtureCatalog::standard().get("kgrid_exp").unwrap().nu.components[0].radial {
        RadialPart::KGrid(g) => g.clone(),
        other => panic!("unexpected radial part {other:?}"),
    };
    let reference = phi_kgrid(&g, -1.0, 10f64.powf(1.0 / 640.0));
    let err = |cells: f64| {
        let img = phi_kgrid(&g, -1.0, 10f64.powf(1.0 / cells));
        [0.5, 2.0, 5.0]
            .iter()
            .map(|&w| {
                let a = RadialPart::KGrid(img.clone()).cumulant(w, Centering::Compensated, &o).unwrap();
                let b = RadialPart::KGrid(reference.clone()).cumulant(w, Centering::Compensated, &o).unwrap();
                (a - b).norm()
            })
            .fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(40.0), err(80.0));
    assert!(coarse / fine > 3.0 && coarse / fine < 5.0, "{coarse} {fine}");
}

#[test]
fn images_land_in_the_range() {
    let c = cfg();
    for (name, t) in FixtureCatalog::standard().iter() {
        for alpha in [-1.0, 0.0, 0.5, 1.2] {
            let r = apply_phi(t, alpha, &c).unwrap();
            if !r.domain_ok {
                continue;
            }
            assert!(class_level(r.output.as_ref().unwrap(), alpha, 0, &c).unwrap().verdict, "{name} α={alpha}");
        }
    }
}

#[test]
fn iterated_images_land_in_higher_levels() {
    let c = cfg();
    for name in ["atomic_cp", "stable15", "kgrid_bump", "gaussian"] {
        let t = FixtureCatalog::standard().get(name).unwrap().clone();
        for alpha in [-1.0, 0.0, 0.5] {
            for m in 1..=4usize {
                let r = apply_phi_m(&t, alpha, m, &c).unwrap();
                let out = r.output.as_ref().unwrap();
                let lvl = match r.resolved_r_min {
                    Some(floor) => class_level_above(out, alpha, m as u32 - 1, floor, &c).unwrap(),
                    None => class_level(out, alpha, m as u32 - 1, &c).unwrap(),
                };
                assert!(lvl.verdict, "{name} α={alpha} m={m}: margin {}", lvl.margin);
            }
        }
    }
}

#[test]
fn verify_range_examples() {
    let c = cfg();
    let cp = FixtureCatalog::standard().get("atomic_cp").unwrap().clone();
    let once = apply_phi(&cp, 0.0, &c).unwrap();
    assert!(verify_range(&once, 0.0, &c).unwrap().iter().all(|r| r.verdict));
    let twice = apply_phi_m(&cp, 0.0, 2, &c).unwrap();
    let reps = verify_range(&twice, 0.0, &c).unwrap();
    assert_eq!(reps[0].class, "L<0>_1");
    assert!(reps[0].verdict);
    let s = apply_phi(&stable(1.5, 1.0), 0.5, &c).unwrap();
    let reps = verify_range(&s, 0.5, &c).unwrap();
    assert!(reps.iter().any(|r| r.class == "C_0.5" && r.verdict));
}

#[test]
fn rho_b_of_images_matches_window_integral() {
    let c = cfg();
    for (name, alpha) in [("stable15", 0.5), ("atomic_cp", 0.0), ("atomic_cp", -1.0), ("gaussian", 0.5)] {
        let mu = FixtureCatalog::standard().get(name).unwrap().clone();
        let img = apply_phi(&mu, alpha, &c).unwrap().output.unwrap();
        for b in [1.5, 2.0, 4.0] {
            let dec = decompose_rho_b(&img, alpha, b, &c).unwrap();
            assert!(dec.valid, "{name} α={alpha} b={b}");
            // t ∈ [0, (b^α − 1)/α] is s ∈ [1/b, 1]
            let spec = MappingSpec::new(alpha).unwrap();
            let t_end = if alpha == 0.0 { b.ln() } else { (b.powf(alpha) - 1.0) / alpha };
            assert!((spec.f(t_end) - 1.0 / b).abs() < 1e-12);
            for z in [0.6, -1.7, 3.2] {
                let want = phi_oracle(&mu, alpha, z, 1.0 / b);
                let got = dec.rho_b.cumulant(&[z]).unwrap();
                assert!((got - want).norm() < 1e-7, "{name} α={alpha} b={b} z={z}: {got} vs {want}");
            }
        }
    }
}

#[test]
fn beta_identity_examples() {
    let o = cfg().quad;
    let r = beta_identity_check(1.5, &o).unwrap();
    assert!((r.rhs - common::beta(0.75, 1.25)).abs() < 1e-12);
    assert!(r.abs_err < 1e-9);
    let near = beta_identity_check(1.01, &o).unwrap();
    assert!(near.lhs.is_finite() && near.abs_err < 1e-8);
    assert!(beta_identity_check(1.9, &o).unwrap().abs_err < 1e-9);
}

#[test]
fn c1_star_examples() {
    let c = cfg();
    let sym = catalog::stable(1.5, &[vec![1.0], vec![-1.0]], &[1.0, 1.0]).unwrap();
    let r = c1_star_gamma_limit(&sym, &[1e-2, 1e-4], &c).unwrap();
    assert!(r.limit[0].abs() < 1e-14);
    assert_eq!(r.verdict, sym.to_compensated().unwrap().gamma[0].abs() <= r.tolerance);
    let one = stable(1.5, 1.0);
    let r = c1_star_gamma_limit(&one, &[1e-1, 1e-2, 1e-3, 1e-4], &c).unwrap();
    assert!((r.limit[0] - common::beta(0.75, 1.25) / 0.5).abs() < 1e-10);
    assert!(r.values.windows(2).all(|w| w[1][0] > w[0][0]));
}

#[test]
fn l_infty_members() {
    let one =
        build_l_infty_member(&[GammaAtom { beta: 1.2, mass: 2.0, lambda_beta: vec![1.0] }], &[vec![1.0]]).unwrap();
    assert!((stable_c(&one) - 2.0).abs() < 1e-15);
    let two = build_l_infty_member(
        &[
            GammaAtom { beta: 0.8, mass: 1.0, lambda_beta: vec![1.0] },
            GammaAtom { beta: 1.5, mass: 0.5, lambda_beta: vec![1.0] },
        ],
        &[vec![1.0]],
    )
    .unwrap();
    let h = h_function(&extract_polar(&two.nu, 0.5).unwrap());
    let mut grid = default_beta_grid(0.5, 97);
    grid.extend([0.8, 1.5]);
    grid.sort_by(f64::total_cmp);
    assert!(fit_gamma(&h, &grid, 2000).unwrap().fit_residual < 1e-8);
    let empty = build_l_infty_member(&[], &[vec![1.0]]).unwrap();
    assert!(empty.nu.is_zero());
}
