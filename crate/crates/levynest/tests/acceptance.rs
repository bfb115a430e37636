//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fails.

use std::time::{Duration, Instant};

use levynest::catalog::FixtureCatalog;
use levynest::classes::{
    class_level, decompose_rho_b, in_c_alpha, in_l_infty, rho_b_moment_bound, verify_selfdec_identity,
};
use levynest::cli::stable_coefficient;
use levynest::limits::{
    array_from_selfdec, convergence_report, normalization_null_check, pooled_decay_slope, sup_decay_slope,
};
use levynest::mc::{choose_horizon, compare_cf_with, simulate_integral, SimSpec};
use levynest::polar::{extract_polar, h_function};
use levynest::transform::{apply_phi, apply_phi_m, beta_identity_check};
use levynest::{LevyTriplet, RadialPart, Result, RunConfig};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn has_kgrid(t: &LevyTriplet) -> bool {
    t.nu.components.iter().any(|c| matches!(c.radial, RadialPart::KGrid(_)))
}

fn members(cat: &FixtureCatalog, alpha: f64, cfg: &RunConfig) -> Result<Vec<(String, LevyTriplet)>> {
    let mut out = Vec::new();
    for (name, t) in cat.iter() {
        if class_level(t, alpha, 0, cfg)?.verdict {
            out.push((name.to_string(), t.clone()));
        }
    }
    Ok(out)
}

fn c1_decomposition(cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let mut worst_closed = 0.0f64;
    let mut worst_grid = 0.0f64;
    let mut cases = 0;
    for alpha in [-1.0, 0.0, 0.5, 1.5] {
        for (name, t) in members(cat, alpha, cfg)? {
            let zs = cfg.z_grid(t.d);
            for b in [1.5, 2.0, 4.0] {
                let dec = decompose_rho_b(&t, alpha, b, cfg)?;
                if !dec.valid {
                    return Ok(outcome(false, format!("{name} at α={alpha}, b={b}: ρ_b invalid")));
                }
                let err = verify_selfdec_identity(&t, &dec.rho_b, alpha, b, &zs, cfg)?;
                if has_kgrid(&t) {
                    worst_grid = worst_grid.max(err);
                } else {
                    worst_closed = worst_closed.max(err);
                }
                cases += 1;
            }
        }
    }
    let pass = worst_closed <= 1e-10 && worst_grid <= 1e-6;
    Ok(outcome(
        pass,
        format!("{cases} cases; closed-form max {worst_closed:.2e} (≤1e-10), k-grid max {worst_grid:.2e} (≤1e-6)"),
    ))
}

fn c2_stable_eigen(cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let mu = cat.get("stable15_centered")?;
    let mut worst = 0.0f64;
    for alpha in [-1.0, 0.0, 0.5, 1.2] {
        let out = apply_phi(mu, alpha, cfg)?.output.expect("in domain");
        let ratio = stable_coefficient(&out, 1.5)? / stable_coefficient(mu, 1.5)?;
        worst = worst.max((ratio - 1.0 / (1.5 - alpha)).abs() * (1.5 - alpha));
    }
    Ok(outcome(worst <= 1e-10, format!("max relative error {worst:.2e} (≤1e-10)")))
}

fn c3_gaussian(cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for name in ["gaussian", "gaussian2d"] {
        let g = cat.get(name)?;
        for alpha in [-1.0, 0.0, 0.5] {
            for m in 1..=5 {
                let out = apply_phi_m(g, alpha, m, cfg)?.output.expect("in domain");
                let f = 1.0 / (2.0 - alpha).powi(m as i32);
                for (x, a) in out.a.iter().flatten().zip(g.a.iter().flatten()) {
                    worst = worst.max((x - f * a).abs());
                }
            }
        }
    }
    Ok(outcome(worst <= 1e-12, format!("max entry error {worst:.2e} (≤1e-12)")))
}

fn c4_range(cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let mu = cat.get("atomic_cp")?;
    let mut notes = Vec::new();
    let mut pass = true;
    for alpha in [-1.0, 0.0, 0.5] {
        let once = apply_phi(mu, alpha, cfg)?.output.expect("in domain");
        let l0 = class_level(&once, alpha, 0, cfg)?;
        let l1 = class_level(&once, alpha, 1, cfg)?;
        let h = h_function(&extract_polar(&once.nu, alpha)?);
        let height = h.h.iter().map(|row| row.iter().cloned().fold(0.0, f64::max)).fold(0.0, f64::max);
        let twice = apply_phi_m(mu, alpha, 2, cfg)?.output.expect("in domain");
        let l1_twice = class_level(&twice, alpha, 1, cfg)?;
        let ok = l0.verdict && !l1.verdict && l1.margin <= -0.5 * height && l1_twice.verdict;
        pass &= ok;
        notes.push(format!("α={alpha}: Δ² margin {:.3} vs step {:.3}", l1.margin, height));
    }
    Ok(outcome(pass, notes.join("; ")))
}

fn c5_telescoping(cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let ns: Vec<usize> = (2..=50).collect();
    let mut worst = 0.0f64;
    for (name, alpha) in [("stable15", 0.5), ("stable15_sym", 1.2), ("gaussian", 0.5), ("gaussian2d", -1.0)] {
        let mu = cat.get(name)?;
        let array = array_from_selfdec(mu, alpha, cfg)?;
        let rep = convergence_report(&array, mu, &cfg.z_grid(mu.d), &ns, cfg)?;
        worst = worst.max(rep.rows.iter().map(|r| r.sup_error).fold(0.0, f64::max));
    }
    Ok(outcome(worst <= 1e-10, format!("max |partial product − μ̂| over n∈[2,50] {worst:.2e} (≤1e-10)")))
}

fn c6_null(cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let mu = cat.get("stable15")?;
    let rows = normalization_null_check(mu, 0.5, &[10, 100, 1000], &cfg.z_grid(1), cfg)?;
    let sup = rows[2].sup;
    let decreasing = rows.windows(2).all(|w| w[1].sup < w[0].sup);
    let pooled = pooled_decay_slope(&rows).unwrap_or(f64::NAN);
    let sup_slope = sup_decay_slope(&rows).unwrap_or(f64::NAN);
    let pass = sup < 0.02 && decreasing && (pooled + 1.0).abs() <= 0.15;
    Ok(outcome(
        pass,
        format!("sup at n=1e3 {sup:.4} (<0.02); pooled slope {pooled:.3} (−1±0.15); sup-only slope {sup_slope:.3} (reported)"),
    ))
}

fn c7_beta(_cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let mut worst = 0.0f64;
    for beta in [1.1, 1.3, 1.5, 1.7, 1.9] {
        let r = beta_identity_check(beta, &cfg.quad)?;
        worst = worst.max(r.abs_err);
    }
    Ok(outcome(worst <= 1e-9, format!("max abs error {worst:.2e} (≤1e-9)")))
}

fn c8_l_infty(cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let mix = cat.get("stable_mix")?;
    let at_half = in_l_infty(mix, 0.5, cfg)?;
    let at_one = in_l_infty(mix, 1.0, cfg)?;
    let single = cat.get("stable05")?;
    let c = in_c_alpha(single, 0.5)?;
    let expected = 1.0 / 0.5;
    let rel = (c.margin - expected).abs() / expected;
    let pass = at_half.verdict
        && at_half.margin < 1e-6
        && !at_one.verdict
        && at_one.margin > 1e-2
        && !c.verdict
        && rel <= 0.01;
    Ok(outcome(
        pass,
        format!(
            "residual {:.2e} at α=0.5, {:.2e} at α=1; C_0.5 tail limit {:.4} vs c/α = {expected}",
            at_half.margin, at_one.margin, c.margin
        ),
    ))
}

fn c9_moment(cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let mut cases = 0;
    for alpha in [0.5, 1.5] {
        for (name, t) in members(cat, alpha, cfg)? {
            for b in [2.0, 4.0] {
                let m = rho_b_moment_bound(&t, alpha, b, cfg)?;
                if !m.holds {
                    return Ok(outcome(false, format!("{name} α={alpha} b={b}: {:.4e} > {:.4e}", m.lhs, m.rhs)));
                }
                cases += 1;
            }
        }
    }
    Ok(outcome(true, format!("{cases} cases hold")))
}

fn c10_monte_carlo(cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let n = 100_000;
    let mut notes = Vec::new();
    let mut pass = true;
    for (name, alpha) in [("gaussian", 0.0), ("delta", -1.0), ("cp_gauss", 0.0), ("atomic_sym", 0.5)] {
        let mu = cat.get(name)?;
        let zs = cfg.z_grid(mu.d);
        let z_max = zs.iter().map(|z| z.iter().map(|x| x * x).sum::<f64>().sqrt()).fold(0.0, f64::max);
        let mut spec = SimSpec { triplet: mu.clone(), horizon: 1.0, n_paths: n, seed: cfg.seed };
        spec.horizon = choose_horizon(&spec, alpha, z_max)?;
        let target = apply_phi(mu, alpha, cfg)?.output.expect("in domain");
        let samples = simulate_integral(&spec, alpha)?;
        let rep = compare_cf_with(&samples, &target, &zs, cfg)?;
        pass &= rep.flagged_fraction <= 0.05;
        notes.push(format!("{name}: {:.0}% flagged", 100.0 * rep.flagged_fraction));
    }
    let spec = SimSpec { triplet: cat.get("cp_gauss")?.clone(), horizon: 5.0, n_paths: 2000, seed: 11 };
    let a = simulate_integral(&spec, 0.0)?;
    let b = simulate_integral(&spec, 0.0)?;
    let same = a.iter().zip(&b).all(|(x, y)| x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits()));
    notes.push(format!("deterministic: {same}"));
    Ok(outcome(pass && same, notes.join("; ")))
}

fn c11_lattice(cat: &FixtureCatalog, cfg: &RunConfig) -> Result<Outcome> {
    let alphas = [-1.0, -0.5, 0.0, 0.25, 0.5, 0.8, 1.0, 1.2, 1.5, 1.9];
    let mut checks = 0;
    for (name, t) in cat.iter() {
        for m in 0..=3 {
            let verdicts: Vec<bool> =
                alphas.iter().map(|a| class_level(t, *a, m, cfg).map(|r| r.verdict)).collect::<Result<_>>()?;
            for j in 1..alphas.len() {
                for i in 0..j {
                    checks += 1;
                    if verdicts[j] && !verdicts[i] {
                        return Ok(outcome(
                            false,
                            format!("{name}: in L<{}>_{m} but not in L<{}>_{m}", alphas[j], alphas[i]),
                        ));
                    }
                }
            }
        }
    }
    Ok(outcome(true, format!("{checks} implications checked, none violated")))
}

type Check = fn(&FixtureCatalog, &RunConfig) -> Result<Outcome>;

fn main() {
    let cfg = RunConfig::default();
    let cat = FixtureCatalog::standard();
    let criteria: Vec<(&str, Option<Duration>, Check)> = vec![
        ("decomposition identity", Some(Duration::from_secs(10)), c1_decomposition),
        ("stable eigen-relation", None, c2_stable_eigen),
        ("Gaussian contraction", None, c3_gaussian),
        ("range theorem", Some(Duration::from_secs(30)), c4_range),
        ("telescoping limit", None, c5_telescoping),
        ("null normalization", None, c6_null),
        ("beta identity", None, c7_beta),
        ("L_inf fingerprint", None, c8_l_infty),
        ("moment bound", None, c9_moment),
        ("Monte Carlo", Some(Duration::from_secs(120)), c10_monte_carlo),
        ("class lattice", None, c11_lattice),
    ];
    let mut failed = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let res = run(&cat, &cfg);
        let took = start.elapsed();
        let (pass, detail) = match res {
            Ok(o) => (o.pass, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        let in_time = budget.is_none_or(|b| took <= b);
        let pass = pass && in_time;
        let budget_note = budget.map_or(String::new(), |b| format!(", budget {}s", b.as_secs()));
        println!(
            "{} {:>2}. {name}: {detail} [{:.2}s{budget_note}]",
            if pass { "PASS" } else { "FAIL" },
            i + 1,
            took.as_secs_f64()
        );
        if !pass {
            failed += 1;
        }
    }
    println!("acceptance: {} of {} criteria pass", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
