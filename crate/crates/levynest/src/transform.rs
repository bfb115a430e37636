//! The mappings Φ_α acting on triplets through C ↦ ∫_0^1 C(s·) s^{−α−1} ds.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classes::{
    class_level, class_level_above, has_alpha_moment, has_log_moment, in_c_alpha, in_i1_star, is_mean_zero,
    MembershipReport,
};
use crate::config::{QuadOptions, RunConfig};
use crate::error::{LevyError, Result};
use crate::polar::GammaAtom;
use crate::quad::integrate;
use crate::radial::{Centering, KGrid, RadialPart, StableTerm};
use crate::special::{beta_fn, power_integral, stable_drift_const};
use crate::triplet::{norm, LevyTriplet, PolarComponent, PolarLevyMeasure};

/// Grid ratio of the k-grids produced from atoms.
pub const ATOM_GRID_RATIO: f64 = 1.122_018_454_301_963_4; // 10^{1/20}
const ATOM_GRID_POINTS: usize = 21;
/// Grid ratio of the images of k-grids.
pub const KGRID_OUT_RATIO: f64 = 1.014_495_208_068_736_2; // 10^{1/160}
const KGRID_TAIL_REL: f64 = 1e-9;
const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_9),
];

/// The integrand f_α(t) = (1+αt)^{−1/α} (e^{−t} at α = 0) and its horizon.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MappingSpec {
    pub alpha: f64,
}

impl MappingSpec {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(LevyError::NonFinite("alpha".into()));
        }
        Ok(Self { alpha })
    }

    pub fn f(&self, t: f64) -> f64 {
        let a = self.alpha;
        if a == 0.0 {
            (-t).exp()
        } else if a < 0.0 && t >= self.horizon() {
            0.0
        } else {
            ((a * t).ln_1p() * (-1.0 / a)).exp()
        }
    }

    /// −1/α for α < 0, +∞ otherwise.
    pub fn horizon(&self) -> f64 {
        if self.alpha < 0.0 {
            -1.0 / self.alpha
        } else {
            f64::INFINITY
        }
    }

    /// t with f_α(t) = s.
    pub fn t_of_s(&self, s: f64) -> f64 {
        let a = self.alpha;
        if a == 0.0 {
            -s.ln()
        } else {
            (s.powf(-a) - 1.0) / a
        }
    }

    /// ∫_0^T f_α(t) dt in closed form.
    pub fn integral_f(&self, t_end: f64) -> f64 {
        self.integral_power(1.0, t_end)
    }

    /// ∫_0^T f_α(t)² dt in closed form.
    pub fn integral_f2(&self, t_end: f64) -> f64 {
        self.integral_power(2.0, t_end)
    }

    // ∫_0^T f^p dt = ∫_{f(T)}^1 s^{p−α−1} ds
    fn integral_power(&self, p: f64, t_end: f64) -> f64 {
        let t = t_end.min(self.horizon());
        let s_end = self.f(t);
        power_integral(p - self.alpha, s_end, 1.0)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransformResult {
    pub alpha: f64,
    pub output: Option<LevyTriplet>,
    pub domain_ok: bool,
    pub domain: MembershipReport,
    /// Accumulated error estimate of the drift quadratures.
    pub quadrature_error: f64,
    /// max_z |C_out(z) − ∫_0^1 C_in(sz) s^{−α−1} ds| on the verification grid.
    pub identity_error: f64,
    /// False when a k-grid had to be discretized, so the output is approximate.
    pub exact: bool,
    pub iterations: usize,
    /// Index (1-based) of the iterate that left the domain, if any.
    pub failed_at: Option<usize>,
    pub range_report: Vec<MembershipReport>,
    /// Largest over the steps of the smallest input k-grid r_min. Below it an iterate reflects
    /// the flat continuation of an earlier grid, so order-m checks are restricted to r ≥ this radius.
    #[serde(default)]
    pub resolved_r_min: Option<f64>,
}

fn kgrid_floor(mu: &LevyTriplet) -> Option<f64> {
    mu.nu
        .components
        .iter()
        .filter_map(|c| match &c.radial {
            RadialPart::KGrid(g) => Some(g.r_min),
            _ => None,
        })
        .reduce(f64::min)
}

/// Domain of Φ_α for α < 2; α ≥ 2 admits only δ_0.
pub fn domain_check(mu: &LevyTriplet, alpha: f64, cfg: &RunConfig) -> Result<MembershipReport> {
    let class = format!("D(Phi_{alpha})");
    let mut rep = if alpha >= 2.0 {
        let zero = mu.nu.is_zero() && mu.gauss_is_zero() && mu.gamma.iter().all(|g| *g == 0.0);
        MembershipReport::new("", zero, if zero { 0.0 } else { -1.0 }, 0.0, "domain is {δ_0}, when α ≥ 2")
    } else if alpha < 0.0 {
        MembershipReport::new("", true, 0.0, 0.0, "every infinitely divisible law")
    } else if alpha == 0.0 {
        has_log_moment(mu, 1, cfg)?
    } else if alpha < 1.0 {
        has_alpha_moment(mu, alpha)?
    } else if alpha == 1.0 {
        let m = is_mean_zero(mu, cfg)?;
        if !m.verdict {
            m
        } else {
            in_i1_star(mu, cfg)?
        }
    } else {
        let r = has_alpha_moment(mu, alpha)?;
        if !r.verdict {
            r
        } else {
            is_mean_zero(mu, cfg)?
        }
    };
    rep.class = class;
    Ok(rep)
}

/// Φ_α(μ) with domain check and post-verification of the cumulant identity.
pub fn apply_phi(mu: &LevyTriplet, alpha: f64, cfg: &RunConfig) -> Result<TransformResult> {
    let domain = domain_check(mu, alpha, cfg)?;
    let mut res = TransformResult {
        alpha,
        output: None,
        domain_ok: domain.verdict,
        domain,
        quadrature_error: 0.0,
        identity_error: 0.0,
        exact: true,
        iterations: 0,
        failed_at: None,
        range_report: Vec::new(),
        resolved_r_min: kgrid_floor(mu),
    };
    if !res.domain_ok {
        res.failed_at = Some(1);
        return Ok(res);
    }
    res.iterations = 1;
    if alpha >= 2.0 {
        res.output = Some(mu.clone());
        return Ok(res);
    }
    let (out, qerr, exact) = phi_triplet(mu, alpha, &cfg.quad)?;
    res.quadrature_error = qerr;
    res.exact = exact;
    let grid = crate::config::z_grid(mu.d, 8, cfg.z_grid.radius);
    let mut worst = 0.0f64;
    for z in &grid {
        let lhs = out.cumulant_with(z, &cfg.quad)?;
        let rhs = phi_cumulant(mu, alpha, z, &cfg.quad)?;
        worst = worst.max((lhs - rhs).norm());
    }
    res.identity_error = worst;
    res.output = Some(out);
    Ok(res)
}

/// Φ_α^m, checking the domain before every step.
pub fn apply_phi_m(mu: &LevyTriplet, alpha: f64, m: usize, cfg: &RunConfig) -> Result<TransformResult> {
    if m == 0 {
        return Err(LevyError::InvalidInput("iteration count must be at least 1".into()));
    }
    let mut current = mu.clone();
    let mut total_q = 0.0;
    let mut exact = true;
    let mut last = None;
    let mut floor: Option<f64> = None;
    for step in 1..=m {
        let mut r = apply_phi(&current, alpha, cfg)?;
        floor = match (floor, r.resolved_r_min) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        };
        r.resolved_r_min = floor;
        total_q += r.quadrature_error;
        exact &= r.exact;
        if !r.domain_ok {
            r.failed_at = Some(step);
            r.iterations = step - 1;
            r.quadrature_error = total_q;
            return Ok(r);
        }
        current = r.output.clone().expect("domain ok implies output");
        last = Some(r);
    }
    let mut r = last.expect("m ≥ 1");
    r.iterations = m;
    r.quadrature_error = total_q;
    r.exact = exact;
    Ok(r)
}

/// The transform itself: output triplet, drift quadrature error, exactness flag.
fn phi_triplet(mu: &LevyTriplet, alpha: f64, opts: &QuadOptions) -> Result<(LevyTriplet, f64, bool)> {
    let mean_zero = alpha >= 1.0;
    let input = if mean_zero { mu.to_mean_zero_with(opts)? } else { mu.to_compensated_with(opts)? };
    let d = input.d;
    let a: Vec<Vec<f64>> = input.a.iter().map(|r| r.iter().map(|x| x / (2.0 - alpha)).collect()).collect();
    let mut gamma = if mean_zero {
        // the mean is zero on the domain; the image keeps mean zero
        vec![0.0; d]
    } else {
        input.gamma.iter().map(|g| g / (1.0 - alpha)).collect()
    };
    let mut comps = Vec::new();
    let mut qerr = 0.0;
    let mut exact = true;
    for c in &input.nu.components {
        let (parts, drift, e, is_exact) = phi_radial(&c.radial, alpha, mean_zero, opts)?;
        qerr += e;
        exact &= is_exact;
        for (g, x) in gamma.iter_mut().zip(&c.xi) {
            *g += drift * x;
        }
        comps.extend(parts.into_iter().map(|p| PolarComponent { xi: c.xi.clone(), radial: p }));
    }
    let centering = if mean_zero { Centering::MeanZero } else { Centering::Compensated };
    let nu = PolarLevyMeasure::new(comps).canonical();
    Ok((LevyTriplet { d, a, gamma, centering, nu }, qerr, exact))
}

/// Image of one radial part with its drift contribution along the direction.
fn phi_radial(
    part: &RadialPart,
    alpha: f64,
    mean_zero: bool,
    opts: &QuadOptions,
) -> Result<(Vec<RadialPart>, f64, f64, bool)> {
    match part {
        RadialPart::StableMix { terms } => {
            let mut out = Vec::with_capacity(terms.len());
            let mut drift = 0.0;
            for t in terms {
                if t.beta <= alpha {
                    return Err(LevyError::Domain(format!("stable exponent {} is not above alpha = {alpha}", t.beta)));
                }
                out.push(StableTerm { beta: t.beta, c: t.c / (t.beta - alpha) });
                if !mean_zero {
                    drift += if t.beta == 1.0 {
                        t.c / ((1.0 - alpha) * (1.0 - alpha))
                    } else {
                        t.c * stable_drift_const(t.beta) * (1.0 / (t.beta - alpha) - 1.0 / (1.0 - alpha))
                    };
                }
            }
            Ok((vec![RadialPart::StableMix { terms: out }], drift, 0.0, true))
        }
        RadialPart::Atomic { atoms } => {
            let mut out = Vec::with_capacity(atoms.len());
            let mut drift = 0.0;
            let mut err = 0.0;
            for at in atoms {
                let height = at.m * at.r.powf(alpha);
                let g = KGrid::from_fn(alpha, at.r, ATOM_GRID_RATIO, ATOM_GRID_POINTS, |r| {
                    if r < at.r * (1.0 - 1e-12) {
                        height
                    } else {
                        0.0
                    }
                });
                out.push(RadialPart::KGrid(g));
                if !mean_zero {
                    let (j, e) = drift_weight(alpha, at.r, opts)?;
                    drift += at.m * at.r * j;
                    err += at.m * at.r * e;
                }
            }
            Ok((out, drift, err, true))
        }
        RadialPart::KGrid(g) => {
            let out = phi_kgrid(g, alpha, KGRID_OUT_RATIO);
            let (drift, err) = if mean_zero {
                (0.0, 0.0)
            } else {
                let mut pieces = vec![(0.0, g.r_min)];
                let radii = g.radii();
                for w in radii.windows(2) {
                    pieces.push((w[0], w[1]));
                }
                let r = crate::quad::integrate_pieces(
                    |_, r: f64| {
                        let k = g.density(r);
                        if k == 0.0 {
                            return 0.0;
                        }
                        drift_weight(alpha, r, opts).map(|(j, _)| k * r * j).unwrap_or(f64::NAN)
                    },
                    &pieces,
                    opts,
                )?;
                if !r.value.is_finite() {
                    return Err(LevyError::Numerical("drift quadrature failed".into()));
                }
                (r.value, r.error)
            };
            Ok((vec![RadialPart::KGrid(out)], drift, err, false))
        }
    }
}

/// J(r) = ∫_0^1 s^{−α}[1/(1+s²r²) − 1/(1+r²)] ds for α < 1, with its error estimate.
fn drift_weight(alpha: f64, r: f64, opts: &QuadOptions) -> Result<(f64, f64)> {
    let r2 = r * r;
    // 1/(1+s²r²) − 1/(1+r²) = r²(1−s²)/((1+s²r²)(1+r²))
    let diff = |s: f64| r2 * (1.0 - s * s) / ((1.0 + s * s * r2) * (1.0 + r2));
    let breaks = |lo: f64| {
        let mut b = vec![lo];
        if r > 1.0 {
            let knee = 1.0 / r;
            if knee > lo && knee < 1.0 {
                b.push(knee);
            }
        }
        b.push(1.0);
        b
    };
    if alpha <= 0.0 {
        let res = crate::quad::integrate_breaks(|s: f64| s.powf(-alpha) * diff(s), &breaks(0.0), opts)?;
        Ok((res.value, res.error))
    } else {
        // s = t^p turns s^{−α} ds into p t^{p−1−αp} dt = dt/(1−α)
        let p = 1.0 / (1.0 - alpha);
        let mut b: Vec<f64> = breaks(0.0).iter().map(|s| s.powf(1.0 - alpha)).collect();
        b.dedup();
        let res = crate::quad::integrate_breaks(|t: f64| p * diff(t.powf(p)), &b, opts)?;
        Ok((res.value, res.error))
    }
}

/// k'(ρ) = ∫_ρ^∞ u^{α−a−1} k(u) du on a grid of the given ratio reaching at least one
/// decade below the input. Each cell holds the average of k' against the second-moment weight
/// ρ^{1−α}; the same weight on every cell keeps the signs of all differences of k' along the grid.
pub fn phi_kgrid(g: &KGrid, alpha: f64, ratio: f64) -> KGrid {
    let e = alpha - g.alpha_ref;
    let radii = g.radii();
    let n = g.len();
    // tail[j] = k'(r_j)
    let mut tail = vec![0.0; n];
    for j in (0..n - 1).rev() {
        tail[j] = tail[j + 1] + g.k_values[j] * power_integral(e, radii[j], radii[j + 1]);
    }
    let k_prime = |rho: f64| -> f64 {
        if rho >= g.r_max {
            return 0.0;
        }
        if rho < g.r_min {
            return tail[0] + g.k_values[0] * power_integral(e, rho, g.r_min);
        }
        let pos = ((rho / g.r_min).ln() / g.log_step()).floor().max(0.0) as usize;
        let j = pos.min(n - 2);
        tail[j + 1] + g.k_values[j] * power_integral(e, rho, radii[j + 1])
    };
    let h = ratio.ln();
    // below r_ext the flat extension loses at most k0 r_ext^{2−a}/((2−a)(2−α)) of second moment,
    // a fixed fraction of the k0 r_min^{2−a} scale; the depth does not depend on k0
    let r_ext = g.r_min * KGRID_TAIL_REL.powf(1.0 / (2.0 - g.alpha_ref)).clamp(1e-12, 0.1);
    let cells = ((g.r_max / r_ext).ln() / h).ceil() as usize;
    let r_min = g.r_max * (-(cells as f64) * h).exp();
    let mut values: Vec<f64> = (0..cells)
        .map(|i| {
            let (x, y) = (r_min * (i as f64 * h).exp(), r_min * ((i + 1) as f64 * h).exp());
            let mut cuts = vec![x];
            let from = radii.partition_point(|r| *r <= x);
            cuts.extend(radii[from..].iter().copied().take_while(|r| *r < y));
            cuts.push(y);
            let (mut num, mut den) = (0.0, 0.0);
            for w in cuts.windows(2) {
                let (u0, u1) = (w[0].ln(), w[1].ln());
                let (mid, half) = (0.5 * (u0 + u1), 0.5 * (u1 - u0));
                for (t, wt) in GL4 {
                    let rho = (mid + half * t).exp();
                    let weight = wt * half * rho.powf(2.0 - alpha);
                    num += weight * k_prime(rho);
                    den += weight;
                }
            }
            num / den
        })
        .collect();
    values.push(0.0);
    KGrid::new(alpha, r_min, g.r_max, values)
}

/// ∫_0^1 C_μ(sz) s^{−α−1} ds, computed as ∫_0^∞ C_μ(e^{−v}z) e^{αv} dv on unit pieces.
pub fn phi_cumulant(mu: &LevyTriplet, alpha: f64, z: &[f64], opts: &QuadOptions) -> Result<Complex64> {
    let mut total = Complex64::new(0.0, 0.0);
    let mut err: Option<LevyError> = None;
    let mut small_run = 0;
    for k in 0..2000 {
        let v0 = k as f64;
        let piece: Complex64 = {
            let mut f = |v: f64| -> Complex64 {
                let s = (-v).exp();
                let zs: Vec<f64> = z.iter().map(|x| x * s).collect();
                match mu.cumulant_with(&zs, opts) {
                    Ok(c) => c * (alpha * v).exp(),
                    Err(e) => {
                        err.get_or_insert(e);
                        Complex64::new(0.0, 0.0)
                    }
                }
            };
            integrate(&mut f, v0, v0 + 1.0, opts)?.value
        };
        if let Some(e) = err.take() {
            return Err(e);
        }
        total += piece;
        if piece.norm() <= 1e-15 * total.norm().max(1e-300) || piece.norm() < 1e-300 {
            small_run += 1;
            if small_run >= 3 {
                break;
            }
        } else {
            small_run = 0;
        }
    }
    Ok(total)
}

/// Range checks for a Φ_α^m image: L^⟨α⟩_{m−1} plus the tail and centering class.
pub fn verify_range(result: &TransformResult, alpha: f64, cfg: &RunConfig) -> Result<Vec<MembershipReport>> {
    let out = match (&result.output, result.domain_ok) {
        (Some(o), true) => o,
        _ => return Err(LevyError::Domain("no image to check".into())),
    };
    if alpha >= 2.0 {
        return Ok(vec![domain_check(out, alpha, cfg)?]);
    }
    let m = result.iterations.max(1) as u32;
    let mut reps = vec![match result.resolved_r_min {
        Some(floor) => class_level_above(out, alpha, m - 1, floor, cfg)?,
        None => class_level(out, alpha, m - 1, cfg)?,
    }];
    if alpha > 0.0 && alpha < 1.0 {
        reps.push(in_c_alpha(out, alpha)?);
    } else if alpha == 1.0 {
        reps.push(in_c_alpha(out, 1.0)?);
        reps.push(c1_star_report(out, cfg)?);
    } else if alpha > 1.0 {
        reps.push(in_c_alpha(out, alpha)?);
        let mut r = is_mean_zero(out, cfg)?;
        r.class = "I_1^0".into();
        reps.push(r);
    }
    Ok(reps)
}

fn c1_star_report(mu: &LevyTriplet, cfg: &RunConfig) -> Result<MembershipReport> {
    let stable_only = mu.nu.components.iter().all(|c| matches!(c.radial, RadialPart::StableMix { .. }));
    if !stable_only {
        return Ok(MembershipReport::untested("C_1^*", "untested: the criterion is computed only for stable mixtures"));
    }
    let r = c1_star_gamma_limit(mu, &[1e-2, 1e-4, 1e-6], cfg)?;
    Ok(MembershipReport {
        class: "C_1^*".into(),
        verdict: r.verdict,
        margin: -r.error,
        tolerance: r.tolerance,
        tested: true,
        note: "|limit + γ| with γ the compensated drift".into(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BetaIdentity {
    pub beta: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
}

/// (β−1)∫_0^∞ s^{2−β}/(1+s²) ds by quadrature against B((3−β)/2, (β+1)/2) via log-gamma.
pub fn beta_identity_check(beta: f64, opts: &QuadOptions) -> Result<BetaIdentity> {
    if !(beta > 1.0 && beta < 2.0) {
        return Err(LevyError::InvalidInput(format!("beta must lie in (1,2), got {beta}")));
    }
    // split at s = 1; the upper half maps to ∫_0^1 dt/(1+t^{2/(β−1)}) under s = t^{−1/(β−1)}
    let lower = integrate(|s: f64| s.powf(2.0 - beta) / (1.0 + s * s), 0.0, 1.0, opts)?;
    let q = 2.0 / (beta - 1.0);
    let upper = integrate(|t: f64| 1.0 / (1.0 + t.powf(q)), 0.0, 1.0, opts)?;
    let lhs = (beta - 1.0) * lower.value + upper.value;
    let rhs = beta_fn((3.0 - beta) / 2.0, (beta + 1.0) / 2.0);
    Ok(BetaIdentity { beta, lhs, rhs, abs_err: (lhs - rhs).abs() })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct C1StarLimit {
    pub eps: Vec<f64>,
    /// Closed-form value at each ε.
    pub values: Vec<Vec<f64>>,
    /// Value at ε = 0.
    pub limit: Vec<f64>,
    /// −γ with γ the compensated drift.
    pub target: Vec<f64>,
    pub error: f64,
    pub tolerance: f64,
    pub verdict: bool,
}

/// Σ B((3−β)/2,(β+1)/2)(1−ε^{β−1})/(β−1) Γ({β}) ∫ξ λ_β(dξ) for a stable mixture.
pub fn c1_star_gamma_limit(mu: &LevyTriplet, eps: &[f64], cfg: &RunConfig) -> Result<C1StarLimit> {
    let d = mu.d;
    let mut weights: Vec<(f64, f64, Vec<f64>)> = Vec::new();
    for c in &mu.nu.components {
        match &c.radial {
            RadialPart::StableMix { terms } => {
                for t in terms {
                    if !(t.beta > 1.0 && t.beta < 2.0) {
                        return Err(LevyError::Domain(format!("Γ has mass at β = {} outside (1,2)", t.beta)));
                    }
                    weights.push((t.beta, t.c, c.xi.clone()));
                }
            }
            _ => return Err(LevyError::Domain("the limit is computed for stable mixtures only".into())),
        }
    }
    let value_at = |e: f64| {
        let mut v = vec![0.0; d];
        for (beta, c, xi) in &weights {
            let bb = beta_fn((3.0 - beta) / 2.0, (beta + 1.0) / 2.0);
            let factor = if e == 0.0 { 1.0 } else { -((beta - 1.0) * e.ln()).exp_m1() };
            let w = bb * factor / (beta - 1.0) * c;
            for (vi, x) in v.iter_mut().zip(xi) {
                *vi += w * x;
            }
        }
        v
    };
    let values: Vec<Vec<f64>> = eps.iter().map(|e| value_at(*e)).collect();
    let limit = value_at(0.0);
    let comp = mu.to_compensated_with(&cfg.quad)?;
    let target: Vec<f64> = comp.gamma.iter().map(|g| -g).collect();
    let diff: Vec<f64> = limit.iter().zip(&target).map(|(a, b)| a - b).collect();
    let error = norm(&diff);
    let scale = norm(&limit).max(norm(&target)).max(1.0);
    let tolerance = cfg.tol_norm * scale;
    Ok(C1StarLimit { eps: eps.to_vec(), values, limit, target, error, tolerance, verdict: error <= tolerance })
}

/// Stable-mixture triplet with Lévy measure ∫Γ(dβ)∫λ_β(dξ) r^{−β−1}dr.
pub fn build_l_infty_member(atoms: &[GammaAtom], directions: &[Vec<f64>]) -> Result<LevyTriplet> {
    let d = directions.first().map(|x| x.len()).unwrap_or(1);
    let mut comps = Vec::new();
    for at in atoms {
        if !(at.beta > 0.0 && at.beta < 2.0) {
            return Err(LevyError::InvalidInput(format!("Γ atom at {} outside (0,2)", at.beta)));
        }
        if at.lambda_beta.len() != directions.len() {
            return Err(LevyError::Dimension { expected: directions.len(), got: at.lambda_beta.len() });
        }
        for (w, xi) in at.lambda_beta.iter().zip(directions) {
            if *w > 0.0 {
                comps.push(PolarComponent {
                    xi: xi.clone(),
                    radial: RadialPart::StableMix { terms: vec![StableTerm { beta: at.beta, c: at.mass * w }] },
                });
            }
        }
    }
    let nu = PolarLevyMeasure::new(comps).canonical();
    Ok(LevyTriplet { d, a: vec![vec![0.0; d]; d], gamma: vec![0.0; d], centering: Centering::Compensated, nu })
}
