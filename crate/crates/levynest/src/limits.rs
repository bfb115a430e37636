//! Triangular arrays whose normed, powered partial products converge to μ̂.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::classes::{class_level, decompose_rho_b, in_c_alpha};
use crate::config::RunConfig;
use crate::error::{LevyError, Result};
use crate::radial::Centering;
use crate::triplet::{dot, LevyTriplet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArrayKind {
    /// μ_1 = μ, μ̂_j(z) = ρ̂_{j/(j−1)}(jz)^{j^{−α}}; the partial products telescope to μ̂.
    Selfdec,
    /// μ̂_j(z) = ρ̂_{(j+1)/j}((j+1)z)^{(j+1)^{−α}} with the shift c_n.
    Variant,
}

/// Lazy array: components are rebuilt from their index on every request.
#[derive(Debug, Clone)]
pub struct TriangularArray {
    pub mu: LevyTriplet,
    pub alpha: f64,
    pub kind: ArrayKind,
    cfg: RunConfig,
}

impl TriangularArray {
    pub fn a_n(&self, n: usize) -> f64 {
        n as f64
    }

    pub fn p_n(&self, n: usize) -> f64 {
        (n as f64).powf(self.alpha)
    }

    /// Shift vector; zero except for the variant array with 0 < α < 2.
    pub fn c_n(&self, n: usize) -> Result<Vec<f64>> {
        if self.kind == ArrayKind::Selfdec || self.alpha <= 0.0 {
            return Ok(vec![0.0; self.mu.d]);
        }
        shift_c_n(&self.mu, self.alpha, n, &self.cfg)
    }

    /// Triplet of μ_j.
    pub fn component(&self, j: usize) -> Result<LevyTriplet> {
        if j == 0 {
            return Err(LevyError::InvalidInput("components are indexed from 1".into()));
        }
        let (b, s) = match self.kind {
            ArrayKind::Selfdec if j == 1 => return Ok(self.mu.clone()),
            ArrayKind::Selfdec => (j as f64 / (j as f64 - 1.0), j as f64),
            ArrayKind::Variant => ((j as f64 + 1.0) / j as f64, j as f64 + 1.0),
        };
        let dec = decompose_rho_b(&self.mu, self.alpha, b, &self.cfg)?;
        if !dec.valid {
            return Err(LevyError::Domain(format!("ρ_b is not a law at b = {b} (margin {:.3e})", dec.margin)));
        }
        dec.rho_b.scale_with(s, &self.cfg.quad)?.t_convolution(s.powf(-self.alpha))
    }

    /// Largest |a_{n+1}/a_n − 1| and |p_n/a_n^α − 1| over the sampled n.
    pub fn norming_check(&self, ns: &[usize]) -> (f64, f64) {
        let mut r1 = 0.0f64;
        let mut r2 = 0.0f64;
        for &n in ns {
            r1 = r1.max((self.a_n(n + 1) / self.a_n(n) - 1.0).abs());
            r2 = r2.max((self.p_n(n) / self.a_n(n).powf(self.alpha) - 1.0).abs());
        }
        (r1, r2)
    }
}

/// c_n = n^{α−1}γ + n^α ∫ x{(1+|x|²)^{−1} − (1+|nx|²)^{−1}} ν(n dx), with γ the compensated drift.
pub fn shift_c_n(mu: &LevyTriplet, alpha: f64, n: usize, cfg: &RunConfig) -> Result<Vec<f64>> {
    let comp = mu.to_compensated_with(&cfg.quad)?;
    let nf = n as f64;
    let mut c = comp.gamma.clone();
    if n > 1 {
        for part in &comp.nu.components {
            let k = part.radial.drift_kernel(nf, &cfg.quad)?;
            for (ci, xi) in c.iter_mut().zip(&part.xi) {
                *ci += k * xi;
            }
        }
    }
    let f = nf.powf(alpha - 1.0);
    Ok(c.iter().map(|x| x * f).collect())
}

pub fn array_from_selfdec(mu: &LevyTriplet, alpha: f64, cfg: &RunConfig) -> Result<TriangularArray> {
    check_member(mu, alpha, cfg)?;
    Ok(TriangularArray { mu: mu.clone(), alpha, kind: ArrayKind::Selfdec, cfg: cfg.clone() })
}

pub fn array_variant_with_cn(mu: &LevyTriplet, alpha: f64, cfg: &RunConfig) -> Result<TriangularArray> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(LevyError::InvalidInput(format!("alpha must lie in (0,2), got {alpha}")));
    }
    if !in_c_alpha(mu, alpha)?.verdict {
        return Err(LevyError::Domain(format!("μ is not in C_{alpha}")));
    }
    check_member(mu, alpha, cfg)?;
    let mu = if mu.centering == Centering::Compensated { mu.clone() } else { mu.to_compensated_with(&cfg.quad)? };
    Ok(TriangularArray { mu, alpha, kind: ArrayKind::Variant, cfg: cfg.clone() })
}

fn check_member(mu: &LevyTriplet, alpha: f64, cfg: &RunConfig) -> Result<()> {
    let rep = class_level(mu, alpha, 0, cfg)?;
    if !rep.verdict {
        return Err(LevyError::Domain(format!("μ is not in L<{alpha}> (margin {:.3e})", rep.margin)));
    }
    Ok(())
}

/// Σ_j p_n C_{μ_j}(z/a_n) + i⟨c_n, z⟩ for every z in the grid.
pub fn partial_log_products(array: &TriangularArray, n: usize, zs: &[Vec<f64>]) -> Result<Vec<Complex64>> {
    if n == 0 {
        return Err(LevyError::InvalidInput("n must be at least 1".into()));
    }
    let p = array.p_n(n);
    let a = array.a_n(n);
    let c = array.c_n(n)?;
    let mut out: Vec<Complex64> = zs.iter().map(|z| Complex64::new(0.0, dot(&c, z))).collect();
    for j in 1..=n {
        let comp = array.component(j)?;
        for (o, z) in out.iter_mut().zip(zs) {
            let za: Vec<f64> = z.iter().map(|x| x / a).collect();
            *o += comp.cumulant_with(&za, &array.cfg.quad)? * p;
        }
    }
    Ok(out)
}

/// ∏_{j≤n} μ̂_j(z/a_n)^{p_n} e^{i⟨c_n,z⟩}.
pub fn partial_product(array: &TriangularArray, n: usize, z: &[f64]) -> Result<Complex64> {
    Ok(partial_log_products(array, n, &[z.to_vec()])?[0].exp())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceRow {
    pub n: usize,
    pub sup_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub rows: Vec<ConvergenceRow>,
    /// True when sup_error never increases along `n_list`.
    pub monotone: bool,
}

pub fn convergence_report(
    array: &TriangularArray,
    target: &LevyTriplet,
    zs: &[Vec<f64>],
    n_list: &[usize],
    cfg: &RunConfig,
) -> Result<ConvergenceReport> {
    let truth: Vec<Complex64> = zs.iter().map(|z| target.char_fn_with(z, &cfg.quad)).collect::<Result<_>>()?;
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let logs = partial_log_products(array, n, zs)?;
        let sup = logs.iter().zip(&truth).map(|(l, t)| (l.exp() - t).norm()).fold(0.0, f64::max);
        rows.push(ConvergenceRow { n, sup_error: sup });
    }
    let monotone = rows.windows(2).all(|w| w[1].sup_error <= w[0].sup_error);
    Ok(ConvergenceReport { rows, monotone })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NullRow {
    pub n: usize,
    /// |μ̂(z/n)^{n^α} e^{−i⟨c_n,z⟩} − 1| per grid point.
    pub deviations: Vec<f64>,
    pub sup: f64,
}

pub fn normalization_null_check(
    mu: &LevyTriplet,
    alpha: f64,
    n_list: &[usize],
    zs: &[Vec<f64>],
    cfg: &RunConfig,
) -> Result<Vec<NullRow>> {
    if !(alpha > 0.0 && alpha < 2.0) {
        return Err(LevyError::InvalidInput(format!("alpha must lie in (0,2), got {alpha}")));
    }
    if !in_c_alpha(mu, alpha)?.verdict {
        return Err(LevyError::Domain(format!("μ is not in C_{alpha}")));
    }
    let mut rows = Vec::with_capacity(n_list.len());
    for &n in n_list {
        let nf = n as f64;
        let p = nf.powf(alpha);
        let c = shift_c_n(mu, alpha, n, cfg)?;
        let mut dev = Vec::with_capacity(zs.len());
        for z in zs {
            let zn: Vec<f64> = z.iter().map(|x| x / nf).collect();
            let l = mu.cumulant_with(&zn, &cfg.quad)? * p - Complex64::new(0.0, dot(&c, z));
            // e^l − 1 without cancellation for small l
            let e = Complex64::new(l.re.exp_m1(), 0.0) * Complex64::new(l.im.cos(), l.im.sin())
                + Complex64::new(l.im.cos() - 1.0, l.im.sin());
            dev.push(e.norm());
        }
        let sup = dev.iter().cloned().fold(0.0, f64::max);
        rows.push(NullRow { n, deviations: dev, sup });
    }
    Ok(rows)
}

/// Slope of log deviation against log n, pooled over grid points with one intercept each.
///
/// Points with zero deviation at any n are skipped.
pub fn pooled_decay_slope(rows: &[NullRow]) -> Option<f64> {
    let m = rows.first()?.deviations.len();
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for i in 0..m {
        if rows.iter().any(|r| !(r.deviations[i] > 0.0)) {
            continue;
        }
        let xs: Vec<f64> = rows.iter().map(|r| (r.n as f64).ln()).collect();
        let ys: Vec<f64> = rows.iter().map(|r| r.deviations[i].ln()).collect();
        let mx = xs.iter().sum::<f64>() / xs.len() as f64;
        let my = ys.iter().sum::<f64>() / ys.len() as f64;
        for (x, y) in xs.iter().zip(&ys) {
            sxy += (x - mx) * (y - my);
            sxx += (x - mx) * (x - mx);
        }
    }
    if sxx == 0.0 {
        None
    } else {
        Some(sxy / sxx)
    }
}

/// Least-squares slope of log sup-deviation against log n.
pub fn sup_decay_slope(rows: &[NullRow]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = rows.iter().filter(|r| r.sup > 0.0).map(|r| ((r.n as f64).ln(), r.sup.ln())).collect();
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / pts.len() as f64;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / pts.len() as f64;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum();
    Some(sxy / sxx)
}
