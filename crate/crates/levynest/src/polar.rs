//! Polar decomposition ν = λ(dξ) r^{−α−1} k_ξ(r) dr, h-functions, difference
//! operators, monotonicity orders and Γ mixture fits.

use std::io::Write;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};
use crate::nnls::nnls;
use crate::radial::RadialPart;
use crate::triplet::PolarLevyMeasure;

/// Grid used when the measure has no k-grid part of its own.
pub const DEFAULT_R_MIN: f64 = 1e-2;
pub const DEFAULT_R_MAX: f64 = 1e2;
pub const DEFAULT_POINTS_PER_DECADE: usize = 20;
/// Grid points kept above the largest k-grid radius, where k vanishes.
const POINTS_ABOVE: usize = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarDecomposition {
    pub alpha: f64,
    pub directions: Vec<Vec<f64>>,
    /// Probability weights over `directions`.
    pub lambda: Vec<f64>,
    /// Shared geometric grid, increasing.
    pub radii: Vec<f64>,
    /// Normalized k_ξ sampled on `radii`, one row per direction.
    pub k: Vec<Vec<f64>>,
    /// Common value of ∫(r²∧1) r^{−α−1} k_ξ(r) dr.
    pub norm_const: f64,
    /// The same integral evaluated per direction.
    pub direction_norms: Vec<f64>,
    /// Stable exponents present in each direction (empty for k-grid parts).
    pub stable_exponents: Vec<Vec<f64>>,
}

impl PolarDecomposition {
    pub fn log_step(&self) -> f64 {
        if self.radii.len() < 2 {
            return 0.0;
        }
        (self.radii[1] / self.radii[0]).ln()
    }

    /// Largest deviation of a direction norm from the common constant.
    pub fn norm_spread(&self) -> f64 {
        self.direction_norms.iter().map(|n| (n - self.norm_const).abs()).fold(0.0, f64::max)
    }

    /// Multiplies every k_ξ by r^{α−α'}: the decomposition of the same measure at α'.
    ///
    /// λ and the norm constant are recomputed from the sampled values only through
    /// the rescaling of the raw k, so this is exact on the grid.
    pub fn rebased_samples(&self, alpha_new: f64) -> Vec<Vec<f64>> {
        self.k
            .iter()
            .map(|row| row.iter().zip(&self.radii).map(|(k, r)| k * r.powf(alpha_new - self.alpha)).collect())
            .collect()
    }
}

/// Samples of a function on a uniform grid `u0 + j·step`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SampledFn {
    pub u0: f64,
    pub step: f64,
    pub values: Vec<f64>,
}

impl SampledFn {
    pub fn u(&self, j: usize) -> f64 {
        self.u0 + j as f64 * self.step
    }

    fn index_of(&self, u: f64) -> Result<usize> {
        let pos = (u - self.u0) / self.step;
        let j = pos.round();
        if (pos - j).abs() > 1e-9 || j < 0.0 {
            return Err(LevyError::InvalidInput(format!("u = {u} is not a grid point")));
        }
        Ok(j as usize)
    }

    /// Δ_ε^n f(u) = Σ_{j=0}^n (−1)^{n−j} C(n,j) f(u + jε); `u` and `eps` must sit on the grid.
    pub fn difference(&self, u: f64, eps: f64, n: usize) -> Result<f64> {
        if !(eps > 0.0) {
            return Err(LevyError::InvalidInput(format!("eps must be positive, got {eps}")));
        }
        let ratio = eps / self.step;
        let e = ratio.round();
        if (ratio - e).abs() > 1e-9 || e < 1.0 {
            return Err(LevyError::InvalidInput(format!(
                "eps = {eps} is not a multiple of the grid step {}",
                self.step
            )));
        }
        let i = self.index_of(u)?;
        difference_op(&self.values, i, e as usize, n)
    }
}

/// Δ^n over sample indices: Σ_{j=0}^n (−1)^{n−j} C(n,j) f[i + j·e].
pub fn difference_op(f: &[f64], i: usize, e: usize, n: usize) -> Result<f64> {
    let last = i + n * e;
    if last >= f.len() {
        return Err(LevyError::InvalidInput(format!("difference reaches index {last} beyond {} samples", f.len())));
    }
    let mut sum = 0.0;
    let mut binom = 1.0;
    for j in 0..=n {
        let sign = if (n - j).is_multiple_of(2) { 1.0 } else { -1.0 };
        sum += sign * binom * f[i + j * e];
        binom = binom * (n - j) as f64 / (j + 1) as f64;
    }
    Ok(sum)
}

/// h_ξ(u) = k_ξ(e^{−u}) for every direction on the uniform grid u = −log r.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HFunction {
    pub alpha: f64,
    pub u: Vec<f64>,
    pub h: Vec<Vec<f64>>,
    pub directions: Vec<Vec<f64>>,
    pub lambda: Vec<f64>,
    pub norm_const: f64,
    pub stable_exponents: Vec<Vec<f64>>,
}

impl HFunction {
    pub fn step(&self) -> f64 {
        if self.u.len() < 2 {
            1.0
        } else {
            self.u[1] - self.u[0]
        }
    }

    pub fn direction(&self, i: usize) -> SampledFn {
        SampledFn { u0: self.u[0], step: self.step(), values: self.h[i].clone() }
    }
}

/// Canonical (λ, k_ξ) of the radial characterization at exponent `alpha`.
///
/// Atomic parts have no density and yield `NotRepresentable`.
pub fn extract_polar(nu: &PolarLevyMeasure, alpha: f64) -> Result<PolarDecomposition> {
    if !(alpha < 2.0) {
        return Err(LevyError::InvalidInput(format!("alpha must be < 2, got {alpha}")));
    }
    let canon = nu.canonical();
    let mut groups: Vec<(Vec<f64>, Vec<RadialPart>)> = Vec::new();
    for c in &canon.components {
        if let RadialPart::Atomic { .. } = c.radial {
            return Err(LevyError::NotRepresentable("atomic radial part has no density".into()));
        }
        match groups.iter_mut().find(|(xi, _)| crate::triplet::same_direction(xi, &c.xi)) {
            Some((_, parts)) => parts.push(c.radial.clone()),
            None => groups.push((c.xi.clone(), vec![c.radial.clone()])),
        }
    }
    let radii = shared_grid(&canon);
    let mut directions = Vec::new();
    let mut raw = Vec::new();
    let mut norms = Vec::new();
    let mut exps = Vec::new();
    for (xi, parts) in groups {
        let n: f64 = parts.iter().map(|p| p.norm2()).sum();
        if n == 0.0 {
            continue;
        }
        let row: Vec<f64> = radii.iter().map(|&r| raw_k(&parts, alpha, r)).collect();
        let mut e: Vec<f64> = parts
            .iter()
            .flat_map(|p| match p {
                RadialPart::StableMix { terms } => terms.iter().map(|t| t.beta).collect::<Vec<_>>(),
                _ => Vec::new(),
            })
            .collect();
        e.sort_by(f64::total_cmp);
        e.dedup();
        directions.push(xi);
        raw.push(row);
        norms.push(n);
        exps.push(e);
    }
    let total: f64 = norms.iter().sum();
    let lambda: Vec<f64> = norms.iter().map(|n| n / total).collect();
    let k = raw.iter().zip(&lambda).map(|(row, l)| row.iter().map(|v| v / l).collect()).collect();
    let direction_norms = norms.iter().zip(&lambda).map(|(n, l)| n / l).collect();
    Ok(PolarDecomposition {
        alpha,
        directions,
        lambda,
        radii,
        k,
        norm_const: total,
        direction_norms,
        stable_exponents: exps,
    })
}

/// r^{α+1} times the radial density of the pooled parts.
fn raw_k(parts: &[RadialPart], alpha: f64, r: f64) -> f64 {
    parts
        .iter()
        .map(|p| match p {
            RadialPart::KGrid(g) => r.powf(alpha - g.alpha_ref) * g.k_at(r),
            RadialPart::StableMix { terms } => terms.iter().map(|t| t.c * r.powf(alpha - t.beta)).sum(),
            RadialPart::Atomic { .. } => 0.0,
        })
        .sum()
}

fn shared_grid(nu: &PolarLevyMeasure) -> Vec<f64> {
    let grids: Vec<_> = nu
        .components
        .iter()
        .filter_map(|c| match &c.radial {
            RadialPart::KGrid(g) => Some(g),
            _ => None,
        })
        .collect();
    if grids.is_empty() {
        let h = std::f64::consts::LN_10 / DEFAULT_POINTS_PER_DECADE as f64;
        let n = ((DEFAULT_R_MAX / DEFAULT_R_MIN).ln() / h).round() as usize;
        return (0..=n).map(|j| DEFAULT_R_MIN * (j as f64 * h).exp()).collect();
    }
    let h = grids.iter().map(|g| g.log_step()).fold(f64::INFINITY, f64::min);
    let top = grids.iter().map(|g| g.r_max).fold(0.0, f64::max);
    let bottom = grids.iter().map(|g| g.r_min).fold(f64::INFINITY, f64::min);
    let below = ((top / bottom).ln() / h - 1e-9).ceil() as i64;
    (-below..=POINTS_ABOVE as i64).map(|j| top * (j as f64 * h).exp()).collect()
}

/// h_ξ(u) = k_ξ(e^{−u}); samples are reversed relative to the r-grid.
pub fn h_function(pd: &PolarDecomposition) -> HFunction {
    let u: Vec<f64> = pd.radii.iter().rev().map(|r| -r.ln()).collect();
    let h = pd.k.iter().map(|row| row.iter().rev().cloned().collect()).collect();
    HFunction {
        alpha: pd.alpha,
        u,
        h,
        directions: pd.directions.clone(),
        lambda: pd.lambda.clone(),
        norm_const: pd.norm_const,
        stable_exponents: pd.stable_exponents.clone(),
    }
}

/// Per-direction outcome of the difference lattice test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MonotoneProfile {
    /// Largest certified order (−1 when h has negative samples).
    pub order: i32,
    /// Smallest Δ^n over the lattice, for n = 0..=max_n (n = 0 is min h).
    pub min_by_order: Vec<f64>,
    /// Sup-norm of h, the unit in which `tol_mono` is applied.
    pub scale: f64,
}

impl MonotoneProfile {
    /// Smallest Δ^n over n ≤ m.
    pub fn margin_up_to(&self, m: usize) -> f64 {
        self.min_by_order.iter().take(m + 1).cloned().fold(f64::INFINITY, f64::min)
    }
}

/// Tests Δ_ε^n h(u) ≥ −tol·sup|h| for ε = step·2^k, all lattice u and n ≤ max_n.
pub fn monotone_profile(values: &[f64], max_n: usize, tol_mono: f64) -> MonotoneProfile {
    let scale = values.iter().fold(0.0f64, |s, v| s.max(v.abs()));
    let thr = -tol_mono * if scale > 0.0 { scale } else { 1.0 };
    let mut min_by_order = vec![f64::INFINITY; max_n + 1];
    min_by_order[0] = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let len = values.len();
    let mut e = 1usize;
    while e < len {
        let mut d: Vec<f64> = values.to_vec();
        for (n, slot) in min_by_order.iter_mut().enumerate().skip(1) {
            if n * e >= len {
                break;
            }
            let next: Vec<f64> = (0..d.len() - e).map(|i| d[i + e] - d[i]).collect();
            d = next;
            let m = d.iter().cloned().fold(f64::INFINITY, f64::min);
            if m < *slot {
                *slot = m;
            }
        }
        e *= 2;
    }
    let order = if min_by_order[0] < thr {
        -1
    } else {
        let mut o = max_n as i32;
        for (n, m) in min_by_order.iter().enumerate().skip(1) {
            if *m < thr {
                o = n as i32 - 1;
                break;
            }
        }
        o
    };
    for m in min_by_order.iter_mut() {
        if m.is_infinite() {
            *m = 0.0;
        }
    }
    MonotoneProfile { order, min_by_order, scale }
}

/// Largest m ≤ max_n with h monotone of order m on the lattice, minimized over directions.
pub fn monotone_order(h: &HFunction, max_n: usize, tol_mono: f64) -> i32 {
    h.h.iter().map(|row| monotone_profile(row, max_n, tol_mono).order).min().unwrap_or(max_n as i32)
}

/// Atoms of Γ with their spherical weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaAtom {
    pub beta: f64,
    pub mass: f64,
    /// Weights over the directions of the decomposition, summing to one.
    pub lambda_beta: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaRepresentation {
    pub atoms: Vec<GammaAtom>,
    pub directions: Vec<Vec<f64>>,
    /// Per-direction coefficients g_ξ,j on the dictionary.
    pub coefficients: Vec<Vec<f64>>,
    pub beta_grid: Vec<f64>,
    /// Largest per-direction relative RMS residual.
    pub fit_residual: f64,
    /// Largest relative gap |∫(1/β + 1/(2−β))Γ_ξ(dβ) − c| / c.
    pub normalization_gap: f64,
}

/// `n` points uniform on [max(α, 0.02), 1.98].
pub fn default_beta_grid(alpha: f64, n: usize) -> Vec<f64> {
    let lo = alpha.max(0.02);
    let hi = 1.98;
    if lo >= hi || n < 2 {
        return vec![lo.min(1.999)];
    }
    (0..n).map(|j| lo + (hi - lo) * j as f64 / (n - 1) as f64).collect()
}

/// Fits e^{αu} h_ξ(u) ≈ Σ_j g_j e^{β_j u} with g ≥ 0, per direction.
///
/// Rows are weighted by the reciprocal of the target so the residual is a relative
/// error across the whole u-range.
pub fn fit_gamma(h: &HFunction, beta_grid: &[f64], max_iter: usize) -> Result<GammaRepresentation> {
    if beta_grid.is_empty() {
        return Err(LevyError::InvalidInput("beta grid is empty".into()));
    }
    if beta_grid.iter().any(|b| !(*b > 0.0 && *b < 2.0)) {
        return Err(LevyError::InvalidInput("beta grid must lie in (0, 2)".into()));
    }
    let alpha = h.alpha;
    let m = h.u.len();
    let nb = beta_grid.len();
    let mut coefficients = Vec::new();
    let mut worst = 0.0f64;
    let mut gap = 0.0f64;
    for row in &h.h {
        if row.iter().any(|v| *v < 0.0) {
            return Err(LevyError::InvalidInput("h has negative samples".into()));
        }
        let y: Vec<f64> = h.u.iter().zip(row).map(|(u, v)| (alpha * u).exp() * v).collect();
        let ymax = y.iter().cloned().fold(0.0, f64::max);
        if ymax == 0.0 {
            coefficients.push(vec![0.0; nb]);
            continue;
        }
        let w: Vec<f64> = y.iter().map(|v| if *v > 0.0 { 1.0 / v } else { 1.0 / ymax }).collect();
        let mut a = DMatrix::<f64>::zeros(m, nb);
        for (j, beta) in beta_grid.iter().enumerate() {
            for i in 0..m {
                a[(i, j)] = w[i] * (beta * h.u[i]).exp();
            }
        }
        let col_norm: Vec<f64> = (0..nb).map(|j| a.column(j).norm()).collect();
        for (j, cn) in col_norm.iter().enumerate() {
            a.column_mut(j).scale_mut(1.0 / cn);
        }
        let b = DVector::from_iterator(m, y.iter().zip(&w).map(|(v, wi)| v * wi));
        let sol = nnls(&a, &b, max_iter)?;
        let g: Vec<f64> = sol.x.iter().zip(&col_norm).map(|(x, s)| x / s).collect();
        let rms_b = (b.norm_squared() / m as f64).sqrt();
        let rel = (sol.residual_norm / (m as f64).sqrt()) / rms_b;
        worst = worst.max(rel);
        let mass: f64 = g.iter().zip(beta_grid).map(|(gj, bj)| gj * (1.0 / bj + 1.0 / (2.0 - bj))).sum();
        if h.norm_const > 0.0 {
            gap = gap.max((mass - h.norm_const).abs() / h.norm_const);
        }
        coefficients.push(g);
    }
    let mut atoms = Vec::new();
    for (j, beta) in beta_grid.iter().enumerate() {
        let parts: Vec<f64> = coefficients.iter().zip(&h.lambda).map(|(g, l)| g[j] * l).collect();
        let mass: f64 = parts.iter().sum();
        if mass > 0.0 {
            atoms.push(GammaAtom { beta: *beta, mass, lambda_beta: parts.iter().map(|p| p / mass).collect() });
        }
    }
    Ok(GammaRepresentation {
        atoms,
        directions: h.directions.clone(),
        coefficients,
        beta_grid: beta_grid.to_vec(),
        fit_residual: worst,
        normalization_gap: gap,
    })
}

/// Writes `direction_index,u,h,min_delta_margin` rows; the margin is the smallest
/// Δ_ε^n h(u) with n ≤ max_n over lattice ε starting at u.
pub fn write_h_csv<W: Write>(h: &HFunction, max_n: usize, out: W) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(out);
    wtr.write_record(["direction_index", "u", "h", "min_delta_margin"])?;
    for (i, row) in h.h.iter().enumerate() {
        let margins = pointwise_margins(row, max_n);
        for (j, u) in h.u.iter().enumerate() {
            wtr.write_record([
                i.to_string(),
                crate::report::fmt_f64(*u),
                crate::report::fmt_f64(row[j]),
                crate::report::fmt_f64(margins[j]),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

fn pointwise_margins(values: &[f64], max_n: usize) -> Vec<f64> {
    let len = values.len();
    let mut out = vec![f64::INFINITY; len];
    for (i, o) in out.iter_mut().enumerate() {
        let mut e = 1;
        while i + e < len {
            for n in 1..=max_n {
                if let Ok(d) = difference_op(values, i, e, n) {
                    *o = o.min(d);
                }
            }
            e *= 2;
        }
        if o.is_infinite() {
            *o = 0.0;
        }
    }
    out
}
