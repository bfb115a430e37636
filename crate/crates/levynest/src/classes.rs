//! Membership predicates for moment, tail and nested selfdecomposability classes,
//! and the residual laws ρ_b of the decomposition μ̂(z) = μ̂(z/b)^{b^α} ρ̂_b(z).

use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{LevyError, Result};
use crate::polar::{default_beta_grid, extract_polar, fit_gamma, h_function, monotone_profile};
use crate::radial::RadialPart;
use crate::triplet::{norm, same_direction, LevyTriplet, PolarComponent, PolarLevyMeasure};

/// Outcome of one class query.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipReport {
    pub class: String,
    pub verdict: bool,
    /// Numeric evidence: smallest Δ margin, tail limit, fit residual or moment value.
    pub margin: f64,
    pub tolerance: f64,
    /// False when no computable criterion exists for the input; `verdict` is then false.
    pub tested: bool,
    pub note: String,
}

impl MembershipReport {
    pub fn new(class: impl Into<String>, verdict: bool, margin: f64, tolerance: f64, note: impl Into<String>) -> Self {
        Self { class: class.into(), verdict, margin, tolerance, tested: true, note: note.into() }
    }

    pub fn untested(class: impl Into<String>, note: impl Into<String>) -> Self {
        Self { class: class.into(), verdict: false, margin: 0.0, tolerance: 0.0, tested: false, note: note.into() }
    }
}

/// ∫(log⁺|x|)^m μ(dx) < ∞, decided on the Lévy measure.
pub fn has_log_moment(mu: &LevyTriplet, m: u32, cfg: &RunConfig) -> Result<MembershipReport> {
    if m == 0 {
        return Err(LevyError::InvalidInput("log moment order must be at least 1".into()));
    }
    let mut total = 0.0;
    for c in &mu.nu.components {
        total += c.radial.log_moment(m, &cfg.quad)?;
    }
    Ok(MembershipReport::new(format!("I_log^{m}"), total.is_finite(), total, 0.0, "∫_{|x|>1}(log|x|)^m ν(dx)"))
}

/// ∫|x|^α μ(dx) < ∞, decided on the Lévy measure.
pub fn has_alpha_moment(mu: &LevyTriplet, alpha: f64) -> Result<MembershipReport> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(LevyError::InvalidInput(format!("alpha must lie in (0,2), got {alpha}")));
    }
    let total: f64 = mu.nu.components.iter().map(|c| c.radial.power_moment(alpha, 1.0, f64::INFINITY)).sum();
    let class = format!("I_{alpha}");
    if total.is_finite() {
        return Ok(MembershipReport::new(class, true, total, 0.0, "∫_{|x|>1}|x|^α ν(dx)"));
    }
    let gap = stable_exponents(&mu.nu).iter().map(|b| b - alpha).fold(f64::INFINITY, f64::min);
    Ok(MembershipReport::new(class, false, gap.min(0.0), 0.0, "divergent; margin is min(β − α)"))
}

fn stable_exponents(nu: &PolarLevyMeasure) -> Vec<f64> {
    nu.components
        .iter()
        .flat_map(|c| match &c.radial {
            RadialPart::StableMix { terms } => terms.iter().map(|t| t.beta).collect(),
            _ => Vec::new(),
        })
        .collect()
}

/// lim_{r→∞} r^α ν(|x| > r) = 0.
pub fn in_c_alpha(mu: &LevyTriplet, alpha: f64) -> Result<MembershipReport> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(LevyError::InvalidInput(format!("alpha must lie in (0,2), got {alpha}")));
    }
    let class = format!("C_{alpha}");
    let mut limit = 0.0;
    let mut heavier = false;
    // r^α tail at a large radius, reported when the limit is infinite
    let probe = 1e6f64;
    let mut probe_value = 0.0;
    for c in &mu.nu.components {
        if let RadialPart::StableMix { terms } = &c.radial {
            for t in terms {
                if (t.beta - alpha).abs() <= 1e-12 {
                    limit += t.c / alpha;
                } else if t.beta < alpha {
                    heavier = true;
                    probe_value += t.c / t.beta * probe.powf(alpha - t.beta);
                }
            }
        }
    }
    if heavier {
        return Ok(MembershipReport::new(
            class,
            false,
            probe_value,
            0.0,
            "tail limit diverges; margin is r^α ν(|x|>r) at r = 1e6",
        ));
    }
    Ok(MembershipReport::new(class, limit == 0.0, limit, 0.0, "tail limit Σ_{β=α} c/α"))
}

/// Mean vector is finite and zero within `tol_norm`.
pub fn is_mean_zero(mu: &LevyTriplet, cfg: &RunConfig) -> Result<MembershipReport> {
    match mu.mean_with(&cfg.quad) {
        Ok(m) => {
            let n = norm(&m);
            Ok(MembershipReport::new("I^0", n <= cfg.tol_norm, -n, cfg.tol_norm, "margin is −|mean|"))
        }
        Err(LevyError::InfiniteMoment(msg)) => Ok(MembershipReport::new("I^0", false, -1.0, cfg.tol_norm, msg)),
        Err(e) => Err(e),
    }
}

/// Existence of lim_T ∫_1^T t^{-1} dt ∫_{|x|>t} x ν(dx) for a mean-zero law.
///
/// With a finite mean the limit is ∫_{|x|>1} x log|x| ν(dx); its norm is the margin.
pub fn in_i1_star(mu: &LevyTriplet, cfg: &RunConfig) -> Result<MembershipReport> {
    let mean = mu.mean_with(&cfg.quad)?;
    let n = norm(&mean);
    if n > cfg.tol_norm {
        return Err(LevyError::NotMeanZero(n));
    }
    let mut limit = vec![0.0; mu.d];
    for c in &mu.nu.components {
        let v = match &c.radial {
            RadialPart::StableMix { terms } => terms.iter().map(|t| t.c / ((t.beta - 1.0) * (t.beta - 1.0))).sum(),
            RadialPart::Atomic { atoms } => atoms.iter().filter(|a| a.r > 1.0).map(|a| a.m * a.r * a.r.ln()).sum(),
            RadialPart::KGrid(g) => {
                if g.r_max <= 1.0 {
                    0.0
                } else {
                    let lo = g.r_min.max(1.0);
                    let mut pieces = Vec::new();
                    let radii = g.radii();
                    if g.r_min > 1.0 {
                        pieces.push((1.0, g.r_min));
                    }
                    for j in 0..g.len() - 1 {
                        if radii[j + 1] > lo {
                            pieces.push((radii[j].max(1.0), radii[j + 1]));
                        }
                    }
                    crate::quad::integrate_pieces(|_, r: f64| r * r.ln() * g.density(r), &pieces, &cfg.quad)?.value
                }
            }
        };
        for (l, x) in limit.iter_mut().zip(&c.xi) {
            *l += v * x;
        }
    }
    let mag = norm(&limit);
    Ok(MembershipReport::new("I_1^*", mag.is_finite(), mag, 0.0, "norm of the limit ∫_{|x|>1} x log|x| ν(dx)"))
}

/// L^⟨α⟩_m for α < 2: h_ξ monotone of order m+1 in every direction.
pub fn class_level(mu: &LevyTriplet, alpha: f64, m: u32, cfg: &RunConfig) -> Result<MembershipReport> {
    class_level_above(mu, alpha, m, 0.0, cfg)
}

/// `class_level` with the lattice restricted to radii r ≥ `r_floor`.
pub fn class_level_above(
    mu: &LevyTriplet,
    alpha: f64,
    m: u32,
    r_floor: f64,
    cfg: &RunConfig,
) -> Result<MembershipReport> {
    if !(alpha < 2.0) {
        return Err(LevyError::Domain(format!("alpha = {alpha} ≥ 2 is handled by class_level_high_alpha")));
    }
    let class = format!("L<{alpha}>_{m}");
    let tol = cfg.tol_mono;
    if mu.nu.is_zero() {
        return Ok(MembershipReport::new(class, true, 0.0, tol, "ν = 0"));
    }
    let pd = match extract_polar(&mu.nu, alpha) {
        Ok(pd) => pd,
        Err(LevyError::NotRepresentable(msg)) => {
            return Ok(MembershipReport::new(class, false, -1.0, tol, format!("not representable: {msg}")))
        }
        Err(e) => return Err(e),
    };
    let h = h_function(&pd);
    // u = −log r ascends, so the window is a prefix
    let keep = if r_floor > 0.0 { h.u.iter().take_while(|u| **u <= -r_floor.ln() + 1e-9).count() } else { h.u.len() };
    let need = m as usize + 1;
    let mut verdict = true;
    let mut margin = f64::INFINITY;
    let mut scale = 0.0f64;
    for (i, row) in h.h.iter().enumerate() {
        if pd.lambda[i] == 0.0 {
            continue;
        }
        let p = monotone_profile(&row[..keep], need, tol);
        verdict &= p.order >= need as i32;
        margin = margin.min(p.margin_up_to(need));
        scale = scale.max(p.scale);
    }
    Ok(MembershipReport::new(
        class,
        verdict,
        margin,
        tol * scale.max(1.0),
        if r_floor > 0.0 {
            format!("h monotone of order {need} on the lattice for r ≥ {r_floor:.3e}; margin is min Δ^n, n ≤ {need}")
        } else {
            format!("h monotone of order {need} on the lattice; margin is min Δ^n, n ≤ {need}")
        },
    ))
}

/// α = 2: Gaussian laws; α > 2: point masses.
pub fn class_level_high_alpha(mu: &LevyTriplet, alpha: f64) -> Result<MembershipReport> {
    if !(alpha >= 2.0) {
        return Err(LevyError::InvalidInput(format!("alpha must be ≥ 2, got {alpha}")));
    }
    let nu_mass = mu.nu.norm2();
    if alpha == 2.0 {
        return Ok(MembershipReport::new("L<2>", nu_mass == 0.0, -nu_mass, 0.0, "Gaussian iff ν = 0"));
    }
    let trace: f64 = (0..mu.d).map(|i| mu.a[i][i]).sum();
    let m = -(nu_mass + trace);
    Ok(MembershipReport::new(format!("L<{alpha}>"), m == 0.0, m, 0.0, "point mass iff ν = 0 and A = 0"))
}

/// L^⟨α⟩_∞: e^{αu} h_ξ(u) is a nonnegative mixture of e^{βu} with β ∈ [α, 2).
pub fn in_l_infty(mu: &LevyTriplet, alpha: f64, cfg: &RunConfig) -> Result<MembershipReport> {
    if !(alpha < 2.0) {
        return Err(LevyError::Domain(format!("alpha = {alpha} must be < 2")));
    }
    let class = format!("L<{alpha}>_inf");
    if mu.nu.is_zero() {
        return Ok(MembershipReport::new(class, true, 0.0, cfg.tol_gamma, "ν = 0"));
    }
    let pd = match extract_polar(&mu.nu, alpha) {
        Ok(pd) => pd,
        Err(LevyError::NotRepresentable(msg)) => {
            return Ok(MembershipReport::new(class, false, 1.0, cfg.tol_gamma, format!("not representable: {msg}")))
        }
        Err(e) => return Err(e),
    };
    let h = h_function(&pd);
    if h.h.iter().flatten().any(|v| *v < 0.0) {
        return Ok(MembershipReport::new(class, false, 1.0, cfg.tol_gamma, "h has negative samples"));
    }
    let grid = l_infty_beta_grid(alpha, &h.stable_exponents, cfg.beta_grid_points);
    let fit = fit_gamma(&h, &grid, cfg.nnls_max_iter)?;
    Ok(MembershipReport::new(
        class,
        fit.fit_residual <= cfg.tol_gamma,
        fit.fit_residual,
        cfg.tol_gamma,
        format!("relative RMS residual of the Γ fit; normalization gap {:.3e}", fit.normalization_gap),
    ))
}

/// Default β grid plus the input's own stable exponents that lie in [α, 2).
pub fn l_infty_beta_grid(alpha: f64, exponents: &[Vec<f64>], n: usize) -> Vec<f64> {
    let mut grid = default_beta_grid(alpha, n);
    for b in exponents.iter().flatten() {
        if *b >= alpha && *b < 2.0 && !grid.iter().any(|g| (g - b).abs() <= 1e-12) {
            grid.push(*b);
        }
    }
    grid.sort_by(f64::total_cmp);
    grid
}

/// ρ_b with its validity verdict.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RhoDecomposition {
    pub rho_b: LevyTriplet,
    pub valid: bool,
    /// Most negative signed mass or k-value found (0 when none).
    pub margin: f64,
    pub alpha: f64,
    pub b: f64,
}

/// A_b = (1 − b^{α−2})A, ν_b = ν − b^α ν(b·), γ_b from cumulant matching.
pub fn decompose_rho_b(mu: &LevyTriplet, alpha: f64, b: f64, cfg: &RunConfig) -> Result<RhoDecomposition> {
    if !(b > 1.0 && b.is_finite()) {
        return Err(LevyError::InvalidInput(format!("b must exceed 1, got {b}")));
    }
    let ba = b.powf(alpha);
    let fa = 1.0 - b.powf(alpha - 2.0);
    let a_b: Vec<Vec<f64>> = mu.a.iter().map(|r| r.iter().map(|x| fa * x).collect()).collect();
    let mut comps = mu.nu.components.clone();
    for c in &mu.nu.components {
        comps.push(PolarComponent { xi: c.xi.clone(), radial: c.radial.scaled(1.0 / b).times(-ba) });
    }
    let nu_b = PolarLevyMeasure::new(comps).canonical();
    let mut rho = LevyTriplet { d: mu.d, a: a_b, gamma: vec![0.0; mu.d], centering: mu.centering, nu: nu_b };
    // γ_b: least squares on the imaginary residual along the coordinate axes
    for k in 0..mu.d {
        let (mut num, mut den) = (0.0, 0.0);
        for t in [0.25, 0.5, 1.0] {
            let mut z = vec![0.0; mu.d];
            z[k] = t;
            let zb: Vec<f64> = z.iter().map(|x| x / b).collect();
            let target = mu.cumulant_with(&z, &cfg.quad)? - mu.cumulant_with(&zb, &cfg.quad)? * ba;
            let rest = rho.cumulant_with(&z, &cfg.quad)?;
            num += t * (target - rest).im;
            den += t * t;
        }
        rho.gamma[k] = num / den;
    }
    let (mut margin, scale) = signed_margin(&rho.nu, alpha);
    if fa < 0.0 && !mu.gauss_is_zero() {
        margin = margin.min(fa);
    }
    let valid = margin >= -cfg.tol_mono * scale.max(1.0);
    Ok(RhoDecomposition { rho_b: rho, valid, margin: margin.min(0.0), alpha, b })
}

/// Most negative atom mass or α-rebased k-value of a signed measure, with the k scale.
fn signed_margin(nu: &PolarLevyMeasure, alpha: f64) -> (f64, f64) {
    let mut margin = 0.0f64;
    let mut scale = 0.0f64;
    let mut dirs: Vec<Vec<f64>> = Vec::new();
    for c in &nu.components {
        if !dirs.iter().any(|d| same_direction(d, &c.xi)) {
            dirs.push(c.xi.clone());
        }
    }
    for xi in dirs {
        let parts: Vec<&RadialPart> =
            nu.components.iter().filter(|c| same_direction(&c.xi, &xi)).map(|c| &c.radial).collect();
        let mut points = Vec::new();
        for p in &parts {
            match p {
                RadialPart::Atomic { atoms } => {
                    for a in atoms {
                        margin = margin.min(a.m);
                    }
                }
                RadialPart::KGrid(g) => {
                    let radii = g.radii();
                    points.push(g.r_min / 10.0);
                    for w in radii.windows(2) {
                        points.push(w[0]);
                        points.push((w[0] * w[1]).sqrt());
                    }
                    points.push(g.r_max);
                }
                RadialPart::StableMix { .. } => {
                    points.extend((0..=120).map(|j| 10f64.powf(-3.0 + j as f64 * 0.05)));
                }
            }
        }
        for r in points {
            let k: f64 = parts
                .iter()
                .map(|p| match p {
                    RadialPart::KGrid(g) => r.powf(alpha - g.alpha_ref) * g.k_at(r),
                    RadialPart::StableMix { terms } => terms.iter().map(|t| t.c * r.powf(alpha - t.beta)).sum(),
                    RadialPart::Atomic { .. } => 0.0,
                })
                .sum();
            margin = margin.min(k);
            scale = scale.max(k.abs());
        }
    }
    (margin, scale)
}

/// max_z |C_μ(z) − b^α C_μ(z/b) − C_{ρ_b}(z)|.
pub fn verify_selfdec_identity(
    mu: &LevyTriplet,
    rho_b: &LevyTriplet,
    alpha: f64,
    b: f64,
    z_grid: &[Vec<f64>],
    cfg: &RunConfig,
) -> Result<f64> {
    let ba = b.powf(alpha);
    let mut worst = 0.0f64;
    for z in z_grid {
        let zb: Vec<f64> = z.iter().map(|x| x / b).collect();
        let lhs = mu.cumulant_with(z, &cfg.quad)? - mu.cumulant_with(&zb, &cfg.quad)? * ba;
        let err = (lhs - rho_b.cumulant_with(z, &cfg.quad)?).norm();
        worst = worst.max(err);
    }
    Ok(worst)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MomentBound {
    /// ∫_{|x|>1}|x|^α ν_b(dx).
    pub lhs: f64,
    /// b^α ν({1 < |x| ≤ b}).
    pub rhs: f64,
    pub holds: bool,
}

pub fn rho_b_moment_bound(mu: &LevyTriplet, alpha: f64, b: f64, cfg: &RunConfig) -> Result<MomentBound> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(LevyError::InvalidInput(format!("alpha must lie in (0,2), got {alpha}")));
    }
    let dec = decompose_rho_b(mu, alpha, b, cfg)?;
    let lhs: f64 = dec.rho_b.nu.components.iter().map(|c| c.radial.power_moment(alpha, 1.0, f64::INFINITY)).sum();
    let rhs = b.powf(alpha) * mu.nu.components.iter().map(|c| c.radial.mass(1.0, b)).sum::<f64>();
    let holds = lhs <= rhs + 1e-10 * rhs.abs().max(1.0);
    Ok(MomentBound { lhs, rhs, holds })
}
