mod common;

use levynest::catalog::{self, FixtureCatalog};
use levynest::config::z_grid;
use levynest::limits::{
    array_from_selfdec, array_variant_with_cn, convergence_report, normalization_null_check, partial_product,
    pooled_decay_slope, shift_c_n,
};
use levynest::mc::{
    choose_horizon, compare_cf, compare_cf_with, empirical_cf, simulate_integral, truncation_bound, SimSpec,
};
use levynest::transform::apply_phi;
use levynest::{Centering, LevyTriplet, PolarLevyMeasure, RadialPart, RunConfig};

fn cfg() -> RunConfig {
    RunConfig::default()
}

fn fixture(name: &str) -> LevyTriplet {
    FixtureCatalog::standard().get(name).unwrap().clone()
}

fn grid() -> Vec<Vec<f64>> {
    z_grid(1, 32, 5.0)
}

fn stable_coefficient(t: &LevyTriplet, beta: f64) -> f64 {
    t.nu.components
        .iter()
        .flat_map(|c| match &c.radial {
            RadialPart::StableMix { terms } => terms.iter().filter(|s| s.beta == beta).map(|s| s.c).collect(),
            _ => Vec::new(),
        })
        .sum()
}

#[test]
fn selfdec_array_telescopes_on_several_fixtures() {
    let c = cfg();
    for (name, alpha) in [("stable15", 0.5), ("stable2d", 0.5), ("gaussian2d", 0.0), ("stable_mix", 0.5)] {
        let mu = fixture(name);
        let arr = array_from_selfdec(&mu, alpha, &c).unwrap();
        let zs = z_grid(mu.d, 12, 5.0);
        for n in [2, 7, 50] {
            for z in &zs {
                let got = partial_product(&arr, n, z).unwrap();
                let want = mu.char_fn(z).unwrap();
                assert!((got - want).norm() < 1e-10, "{name} n={n}");
            }
        }
    }
}

#[test]
fn stable_components_carry_fractional_mass() {
    // ρ_b has coefficient c(1 − b^{α−β}); scaling by j multiplies by j^β, the power j^{−α} by j^{−α}
    let (beta, alpha) = (1.5, 0.5);
    let arr = array_from_selfdec(&fixture("stable15"), alpha, &cfg()).unwrap();
    for j in [2usize, 3, 10] {
        let b = j as f64 / (j as f64 - 1.0);
        let want = (1.0 - b.powf(alpha - beta)) * (j as f64).powf(beta - alpha);
        let got = stable_coefficient(&arr.component(j).unwrap(), beta);
        assert!((got - want).abs() < 1e-13 * want, "j={j}: {got} vs {want}");
    }
    assert_eq!(arr.component(1).unwrap(), fixture("stable15"));
}

#[test]
fn gaussian_components_sum_back_to_a() {
    // A_j = (1 − b^{α−2}) j^{2−α} A with b = j/(j−1); the normed sum telescopes to A
    let alpha = 0.0;
    let arr = array_from_selfdec(&fixture("gaussian"), alpha, &cfg()).unwrap();
    let n = 40usize;
    let mut total = 0.0;
    for j in 1..=n {
        let comp = arr.component(j).unwrap();
        assert!(comp.nu.is_zero());
        if j >= 2 {
            let b = j as f64 / (j as f64 - 1.0);
            let want = (1.0 - b.powf(alpha - 2.0)) * (j as f64).powf(2.0 - alpha);
            assert!((comp.a[0][0] - want).abs() < 1e-12 * want, "j={j}");
        }
        total += comp.a[0][0];
    }
    let normed = total * (n as f64).powf(alpha) / (n * n) as f64;
    assert!((normed - 1.0).abs() < 1e-12);
}

#[test]
fn delta_zero_array_is_all_delta_zero() {
    let arr = array_from_selfdec(&fixture("delta0"), 0.5, &cfg()).unwrap();
    for j in 1..6 {
        let comp = arr.component(j).unwrap();
        assert!(comp.nu.is_zero() && comp.gauss_is_zero());
        assert!(comp.gamma[0].abs() < 1e-15);
    }
}

#[test]
fn stable_array_at_its_own_index_uses_point_masses() {
    // α = β: ρ_b is degenerate, so every component after the first is a point mass
    let mu = fixture("stable15");
    let arr = array_from_selfdec(&mu, 1.5, &cfg()).unwrap();
    for j in 2..=20 {
        let comp = arr.component(j).unwrap();
        let nu_mass: f64 = comp.nu.components.iter().map(|c| c.radial.norm2()).sum();
        assert!(nu_mass <= 1e-12 && comp.gauss_is_zero(), "j={j}: {nu_mass}");
    }
    for z in grid() {
        for n in [5, 30] {
            assert!((partial_product(&arr, n, &z).unwrap() - mu.char_fn(&z).unwrap()).norm() < 1e-10);
        }
    }
}

#[test]
fn norming_sequences_settle() {
    let arr = array_from_selfdec(&fixture("stable15"), 0.5, &cfg()).unwrap();
    let (r1, r2) = arr.norming_check(&[2_000_000, 10_000_000]);
    assert!(r1 <= 1e-6 && r2 <= 1e-6, "{r1} {r2}");
    let (coarse, _) = arr.norming_check(&[10]);
    assert!((coarse - 0.1).abs() < 1e-15);
}

#[test]
fn shift_matches_power_integral_oracle() {
    // c_n = n^{α−β} c ∫_0^∞ s^{−β}[(1+s²)^{−1} − (1+n²s²)^{−1}] ds for a centred β-stable law
    let (beta, alpha) = (1.5, 0.5);
    let mu = fixture("stable15");
    for n in [3usize, 10, 100] {
        let nf = n as f64;
        let oracle = common::simpson(
            |u| {
                let s = u.exp();
                s.powf(1.0 - beta) * (1.0 / (1.0 + s * s) - 1.0 / (1.0 + nf * nf * s * s))
            },
            -40.0,
            40.0,
            40_000,
        ) * nf.powf(alpha - beta);
        let got = shift_c_n(&mu, alpha, n, &cfg()).unwrap()[0];
        assert!((got - oracle).abs() < 1e-9 * oracle.abs(), "n={n}: {got} vs {oracle}");
    }
}

#[test]
fn symmetric_law_has_zero_shift() {
    let mu = fixture("stable15_sym");
    for n in [2, 10, 1000] {
        assert!(shift_c_n(&mu, 0.5, n, &cfg()).unwrap()[0].abs() < 1e-14);
    }
    let arr = array_variant_with_cn(&mu, 0.5, &cfg()).unwrap();
    assert!(arr.c_n(50).unwrap()[0].abs() < 1e-14);
}

#[test]
fn variant_array_converges_and_wrong_target_does_not() {
    let c = cfg();
    let mu = fixture("stable15");
    let arr = array_variant_with_cn(&mu, 0.5, &c).unwrap();
    let zs = grid();
    let rep = convergence_report(&arr, &mu, &zs, &[10, 100, 1000], &c).unwrap();
    assert!(rep.monotone);
    assert!(rep.rows[2].sup_error < 1e-3, "{:?}", rep.rows);
    let wrong = catalog::stable(1.2, &[vec![1.0]], &[1.0]).unwrap();
    let bad = convergence_report(&arr, &wrong, &zs, &[10, 100, 1000], &c).unwrap();
    assert!(bad.rows.iter().all(|r| r.sup_error > 0.05), "{:?}", bad.rows);
}

#[test]
fn null_check_rates() {
    let c = cfg();
    let zs = grid();
    let ns = [10, 100, 1000];
    // Gaussian: the deviation is |exp(−n^{α−2}z²/2) − 1|, slope α − 2
    let rows = normalization_null_check(&fixture("gaussian"), 0.5, &ns, &zs, &c).unwrap();
    let slope = pooled_decay_slope(&rows).unwrap();
    assert!((slope + 1.5).abs() < 0.1, "{slope}");
    let want = 1.0 - (-0.5 * 25.0 * 1000f64.powf(-1.5) * (31.0 / 32.0f64).powi(2)).exp();
    assert!((rows[2].sup - want).abs() < 1e-12, "{} vs {want}", rows[2].sup);
    let zero = normalization_null_check(&fixture("delta0"), 0.5, &ns, &zs, &c).unwrap();
    assert!(zero.iter().all(|r| r.sup == 0.0));
    assert!(normalization_null_check(&fixture("stable05"), 0.5, &ns, &zs, &c).is_err());
}

fn spec(t: LevyTriplet, horizon: f64, n: usize, seed: u64) -> SimSpec {
    SimSpec { triplet: t, horizon, n_paths: n, seed }
}

#[test]
fn gaussian_integral_variance() {
    let x = simulate_integral(&spec(fixture("gaussian"), 20.0, 40_000, 11), 0.0).unwrap();
    let n = x.len() as f64;
    let mean = x.iter().map(|v| v[0]).sum::<f64>() / n;
    let var = x.iter().map(|v| (v[0] - mean).powi(2)).sum::<f64>() / (n - 1.0);
    let want = 0.5 * (1.0 - (-40f64).exp());
    assert!((var - want).abs() < 4.0 * want * (2.0 / n).sqrt(), "{var}");
    assert!(mean.abs() < 4.0 * (want / n).sqrt());
}

#[test]
fn drift_only_integral_is_exact() {
    // f_{−1}(t) = 1 − t on [0, 1], so the integral of γ dt is γ/2
    let x = simulate_integral(&spec(fixture("delta"), 0.0, 1000, 3), -1.0).unwrap();
    assert!(x.iter().all(|v| (v[0] - 1.5).abs() < 1e-15));
}

#[test]
fn empty_measure_leaves_the_drift_term() {
    let t = LevyTriplet::new(vec![vec![0.0]], PolarLevyMeasure::new(vec![]), vec![-2.0], Centering::Compensated);
    let x = simulate_integral(&spec(t, 4.0, 1000, 5), 0.0).unwrap();
    let want = -2.0 * (1.0 - (-4f64).exp());
    assert!(x.iter().all(|v| (v[0] - want).abs() < 1e-14));
}

#[test]
fn zero_frequency_matches_exactly() {
    let c = cfg();
    let mu = fixture("cp_gauss");
    let x = simulate_integral(&spec(mu.clone(), 15.0, 2000, 1), 0.0).unwrap();
    assert_eq!(empirical_cf(&x, &[0.0]), num_complex::Complex64::new(1.0, 0.0));
    let phi = apply_phi(&mu, 0.0, &c).unwrap();
    let rep = compare_cf(&x, &phi, &[vec![0.0]], &c).unwrap();
    assert!(rep.standardized[0] < 1e-12);
}

#[test]
fn cp_gauss_agrees_and_wrong_alpha_is_flagged() {
    let c = cfg();
    let mu = fixture("cp_gauss");
    let zs = grid();
    let x = simulate_integral(&spec(mu.clone(), 20.0, 20_000, 9), 0.0).unwrap();
    let good = compare_cf(&x, &apply_phi(&mu, 0.0, &c).unwrap(), &zs, &c).unwrap();
    assert!(good.flagged_fraction <= 0.05, "{:?}", good.standardized);
    assert!(good.empirical.iter().all(|e| e.norm() <= 1.0 + 1e-12));
    let wrong = compare_cf(&x, &apply_phi(&mu, -1.0, &c).unwrap(), &zs, &c).unwrap();
    assert!(wrong.flagged_fraction > 0.5, "{}", wrong.flagged_fraction);
}

#[test]
fn streams_are_reproducible_and_seed_dependent() {
    let s = spec(fixture("atomic_sym"), 3.0, 1000, 42);
    let a = simulate_integral(&s, 0.5).unwrap();
    let b = simulate_integral(&s, 0.5).unwrap();
    assert_eq!(a, b);
    let other = simulate_integral(&SimSpec { seed: 43, ..s }, 0.5).unwrap();
    assert_ne!(a, other);
}

#[test]
fn doubling_the_horizon_stays_within_noise() {
    let c = cfg();
    let mu = fixture("cp_gauss");
    let target = apply_phi(&mu, 0.0, &c).unwrap().output.unwrap();
    let zs = z_grid(1, 8, 2.0);
    let n = 20_000;
    let base = choose_horizon(&spec(mu.clone(), 1.0, n, 0), 0.0, 2.0).unwrap();
    let dev = |t: f64| {
        let x = simulate_integral(&spec(mu.clone(), t, n, 21), 0.0).unwrap();
        let r = compare_cf_with(&x, &target, &zs, &c).unwrap();
        r.standardized.iter().cloned().fold(0.0, f64::max)
    };
    let (d1, d2) = (dev(base), dev(2.0 * base));
    assert!((d1 - d2).abs() < 4.8, "{d1} {d2}");
}

#[test]
fn horizon_grows_like_log_n_at_alpha_zero() {
    // bound = K2 z² e^{−2T}/2 for a Gaussian, so T(N) moves by ln(N'/N)/4
    let g = fixture("gaussian");
    let t4 = choose_horizon(&spec(g.clone(), 1.0, 10_000, 0), 0.0, 5.0).unwrap();
    let t6 = choose_horizon(&spec(g, 1.0, 1_000_000, 0), 0.0, 5.0).unwrap();
    assert!((t6 - t4 - 100f64.ln() / 4.0).abs() < 1e-9, "{t4} {t6}");
}

#[test]
fn polynomial_tail_at_alpha_half() {
    // f(T) = (1 + T/2)^{−2}, so the K2 term decays like (1 + T/2)^{−3}
    let s = spec(fixture("atomic_sym"), 10.0, 1000, 0);
    let b10 = truncation_bound(&s, 0.5, 1.0).unwrap();
    let b30 = truncation_bound(&SimSpec { horizon: 30.0, ..s.clone() }, 0.5, 1.0).unwrap();
    assert!((b10 / b30 - (16.0f64 / 6.0).powi(3)).abs() < 1e-9);
    // K2 = ∫x²ν/2 = 1, ∫_T^∞ f² dt = f(T)^{1.5}/1.5
    assert!((b10 - 6f64.powf(-3.0) / 1.5).abs() < 1e-15);
}

#[test]
fn gaussian_tail_bound_is_the_exact_tail() {
    // ν = 0, γ = 0: |∫_T^∞ C(f(t)z) dt| = A z² ∫_T^∞ e^{−2t} dt / 2
    let s = spec(fixture("gaussian"), 3.0, 1000, 0);
    let got = truncation_bound(&s, 0.0, 2.0).unwrap();
    let exact = 0.5 * 4.0 * common::simpson(|t| (-2.0 * t).exp(), 3.0, 40.0, 20_000);
    assert!((got - exact).abs() < 1e-10 * exact);
}
