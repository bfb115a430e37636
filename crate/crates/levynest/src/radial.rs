//! Radial parts of a polar Lévy measure and their one-dimensional integrals.
//!
//! Every quantity here is an integral against the radial density `g(r)` of a single
//! part; the direction enters only through the projection `w = <z, xi>`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::QuadOptions;
use crate::error::{LevyError, Result};
use crate::quad::{gauss_legendre3, gauss_legendre6, integrate_pieces};
use crate::special::{power_integral, stable_drift_const, stable_unit_compensated, stable_unit_mean_zero};

/// Compensator convention of a triplet.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Centering {
    /// Compensator `i<z,x>/(1+|x|^2)`.
    Compensated,
    /// Compensator `i<z,x>`; the drift is the mean.
    MeanZero,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Atom {
    pub r: f64,
    pub m: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StableTerm {
    pub beta: f64,
    pub c: f64,
}

/// Density `r^{-alpha_ref-1} k(r)` with `k` piecewise constant on a geometric grid.
///
/// `k_values[j]` is `k` on `[r_j, r_{j+1})`; below `r_min` it equals `k_values[0]`
/// and above `r_max` it vanishes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KGrid {
    pub alpha_ref: f64,
    pub r_min: f64,
    pub r_max: f64,
    pub k_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type")]
pub enum RadialPart {
    #[serde(rename = "atomic")]
    Atomic { atoms: Vec<Atom> },
    #[serde(rename = "kgrid")]
    KGrid(KGrid),
    #[serde(rename = "stablemix")]
    StableMix { terms: Vec<StableTerm> },
}

impl KGrid {
    pub fn new(alpha_ref: f64, r_min: f64, r_max: f64, k_values: Vec<f64>) -> Self {
        Self { alpha_ref, r_min, r_max, k_values }
    }

    /// Grid with `n` points and ratio `q` ending at `r_max`, with `k = f(r_j)`.
    pub fn from_fn<F: Fn(f64) -> f64>(alpha_ref: f64, r_max: f64, q: f64, n: usize, f: F) -> Self {
        let r_min = r_max / q.powi(n as i32 - 1);
        let mut g = Self { alpha_ref, r_min, r_max, k_values: vec![0.0; n] };
        let vals: Vec<f64> = (0..n).map(|j| f(g.radius(j))).collect();
        g.k_values = vals;
        g
    }

    pub fn len(&self) -> usize {
        self.k_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k_values.is_empty()
    }

    /// Log of the grid ratio.
    pub fn log_step(&self) -> f64 {
        (self.r_max / self.r_min).ln() / (self.len() as f64 - 1.0)
    }

    pub fn radius(&self, j: usize) -> f64 {
        if j + 1 == self.len() {
            self.r_max
        } else if j == 0 {
            self.r_min
        } else {
            self.r_min * (j as f64 * self.log_step()).exp()
        }
    }

    pub fn radii(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.radius(j)).collect()
    }

    /// k(r) with the conventions of the type (right-continuous steps).
    pub fn k_at(&self, r: f64) -> f64 {
        if r > self.r_max * (1.0 + 1e-12) {
            return 0.0;
        }
        if r < self.r_min {
            return self.k_values[0];
        }
        let pos = (r / self.r_min).ln() / self.log_step();
        let j = (pos + 1e-9).floor().max(0.0) as usize;
        self.k_values[j.min(self.len() - 1)]
    }

    pub fn density(&self, r: f64) -> f64 {
        r.powf(-self.alpha_ref - 1.0) * self.k_at(r)
    }

    fn validate(&self) -> Result<()> {
        if self.len() < 2 {
            return Err(LevyError::InvalidInput("kgrid needs at least two grid points".into()));
        }
        if !(self.r_min > 0.0 && self.r_max > self.r_min && self.r_max.is_finite()) {
            return Err(LevyError::InvalidInput(format!(
                "kgrid radii must satisfy 0 < r_min < r_max < inf (got {}, {})",
                self.r_min, self.r_max
            )));
        }
        if !(self.alpha_ref < 2.0 && self.alpha_ref.is_finite()) {
            return Err(LevyError::InvalidInput(format!("kgrid alpha_ref must be < 2, got {}", self.alpha_ref)));
        }
        if self.k_values.iter().any(|k| !(k.is_finite() && *k >= 0.0)) {
            return Err(LevyError::InvalidInput("kgrid k_values must be finite and nonnegative".into()));
        }
        Ok(())
    }

    /// Integral pieces: `[lo, r_0]` carrying `k_0`, then the grid cells with nonzero `k`.
    fn pieces(&self, lo: f64) -> (Vec<(f64, f64)>, Vec<f64>) {
        let radii = self.radii();
        let mut pieces = Vec::with_capacity(self.len());
        let mut ks = Vec::with_capacity(self.len());
        if lo < radii[0] && self.k_values[0] != 0.0 {
            pieces.push((lo, radii[0]));
            ks.push(self.k_values[0]);
        }
        for j in 0..self.len() - 1 {
            let k = self.k_values[j];
            if k != 0.0 && radii[j + 1] > lo {
                pieces.push((radii[j].max(lo), radii[j + 1]));
                ks.push(k);
            }
        }
        (pieces, ks)
    }

    /// Σ k ∫ r^{-alpha_ref-1} f(r) dr over `(lo, r_max]` (including the flat part below `r_min`).
    fn integrate_real<F: Fn(f64) -> f64>(&self, f: F, lo: f64, opts: &QuadOptions) -> Result<(f64, f64)> {
        let (pieces, ks) = self.pieces(lo);
        if pieces.is_empty() {
            return Ok((0.0, 0.0));
        }
        let e = -self.alpha_ref - 1.0;
        let r = integrate_pieces(|i, r: f64| ks[i] * r.powf(e) * f(r), &pieces, opts)?;
        Ok((r.value, r.error))
    }

    /// ∫_lo^hi r^p g(r) dr in closed form.
    fn power_moment(&self, p: f64, lo: f64, hi: f64) -> f64 {
        let e = p - self.alpha_ref;
        let radii = self.radii();
        let mut total = 0.0;
        if self.k_values[0] != 0.0 && lo < radii[0] {
            total += self.k_values[0] * power_integral(e, lo, hi.min(radii[0]));
        }
        for j in 0..self.len() - 1 {
            let (a, b) = (radii[j].max(lo), radii[j + 1].min(hi));
            if self.k_values[j] != 0.0 && b > a {
                total += self.k_values[j] * power_integral(e, a, b);
            }
        }
        total
    }

    fn cumulant(&self, w: f64, centering: Centering, opts: &QuadOptions) -> Result<Complex64> {
        if w == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let a = self.alpha_ref;
        // cells below `cut` use the power series, the rest adaptive quadrature
        let cut = 0.5f64.min(0.5 / w.abs());
        let mut total = self.k_values[0] * near_zero_series(a, w, self.r_min.min(cut), centering);
        // nodes are r_min q^j, so r^{-a} advances by a factor q^{-a}
        let radii = self.radii();
        let step = (-a * self.log_step()).exp();
        let mut scale = self.r_min.powf(-a);
        let mut lower = series_over_power(a, w, radii[0], centering) * scale;
        for j in 0..self.len() - 1 {
            if radii[j] >= cut {
                break;
            }
            let upper = if radii[j + 1] < cut {
                scale = if j % 64 == 63 { radii[j + 1].powf(-a) } else { scale * step };
                series_over_power(a, w, radii[j + 1], centering) * scale
            } else {
                near_zero_series(a, w, cut, centering)
            };
            total += self.k_values[j] * (upper - lower);
            lower = upper;
        }
        let (pieces, ks) = self.pieces(cut);
        let e = -a - 1.0;
        // narrow cells with little phase change take a fixed rule, the rest go adaptive
        let (mut wide, mut wide_k) = (Vec::new(), Vec::new());
        for (&(x, y), &k) in pieces.iter().zip(&ks) {
            let phase = w.abs() * (y - x);
            if y <= 1.2 * x && phase <= 1.0 {
                let f = |r: f64| compensated_kernel(r, w, centering) * r.powf(e);
                total +=
                    k * if phase <= 0.1 && y <= 1.03 * x { gauss_legendre3(f, x, y) } else { gauss_legendre6(f, x, y) };
            } else {
                wide.push((x, y));
                wide_k.push(k);
            }
        }
        if !wide.is_empty() {
            let r = integrate_pieces(
                |i, r: f64| compensated_kernel(r, w, centering) * (wide_k[i] * r.powf(e)),
                &wide,
                opts,
            )?;
            total += r.value;
        }
        Ok(total)
    }
}

/// e^{irw} − 1 − irw·κ(r) with κ set by the centering.
pub fn compensated_kernel(r: f64, w: f64, centering: Centering) -> Complex64 {
    let x = r * w;
    let comp = match centering {
        Centering::Compensated => x / (1.0 + r * r),
        Centering::MeanZero => x,
    };
    // cos x − 1 computed without cancellation
    let s = (0.5 * x).sin();
    Complex64::new(-2.0 * s * s, x.sin() - comp)
}

/// ∫_0^eps (e^{irw} − 1 − irw·κ(r)) r^{-a-1} dr by term-wise integration, for |w|eps ≤ 1/2, eps ≤ 1/2.
fn near_zero_series(a: f64, w: f64, eps: f64, centering: Centering) -> Complex64 {
    series_over_power(a, w, eps, centering) * eps.powf(-a)
}

/// `near_zero_series` divided by eps^{-a}, so only integer powers of eps appear.
fn series_over_power(a: f64, w: f64, eps: f64, centering: Centering) -> Complex64 {
    let mut sum = Complex64::new(0.0, 0.0);
    let x = w * eps;
    // (i x)^n / n! / (n - a)
    let mut pow = Complex64::new(-0.5 * x * x, 0.0); // (ix)^2/2!
    for n in 2..200 {
        let term = pow / (n as f64 - a);
        sum += term;
        if term.norm_sqr() <= 1e-36 * sum.norm_sqr().max(1e-300) {
            break;
        }
        pow = pow * Complex64::new(0.0, x) / (n as f64 + 1.0);
    }
    if centering == Centering::Compensated {
        // i w Σ_{k≥1} (−1)^{k+1} eps^{2k+1}/(2k+1−a)
        let mut acc = 0.0;
        let e2 = eps * eps;
        let mut p = eps * e2;
        for k in 1..400 {
            let t = p / (2.0 * k as f64 + 1.0 - a);
            acc += if k % 2 == 1 { t } else { -t };
            if t <= 1e-18 * acc.abs().max(1e-300) {
                break;
            }
            p *= e2;
        }
        sum += Complex64::new(0.0, w * acc);
    }
    sum
}

/// (b² − 1) r³ / ((b² + r²)(1 + r²)), the change of compensator under x ↦ x/b.
pub fn drift_kernel_fn(b: f64, r: f64) -> f64 {
    let b2 = b * b;
    let r2 = r * r;
    (b2 - 1.0) * r2 * r / ((b2 + r2) * (1.0 + r2))
}

impl RadialPart {
    pub fn validate(&self) -> Result<()> {
        match self {
            RadialPart::Atomic { atoms } => {
                for a in atoms {
                    if !(a.r > 0.0 && a.r.is_finite() && a.m > 0.0 && a.m.is_finite()) {
                        return Err(LevyError::InvalidInput(format!(
                            "atoms need finite r > 0 and m > 0 (got r = {}, m = {})",
                            a.r, a.m
                        )));
                    }
                }
                Ok(())
            }
            RadialPart::KGrid(g) => g.validate(),
            RadialPart::StableMix { terms } => {
                for t in terms {
                    if !(t.beta > 0.0 && t.beta < 2.0 && t.c > 0.0 && t.c.is_finite()) {
                        return Err(LevyError::InvalidInput(format!(
                            "stable terms need beta in (0,2) and c > 0 (got beta = {}, c = {})",
                            t.beta, t.c
                        )));
                    }
                }
                Ok(())
            }
        }
    }

    /// True when the part carries no mass.
    pub fn is_null(&self) -> bool {
        match self {
            RadialPart::Atomic { atoms } => atoms.iter().all(|a| a.m == 0.0),
            RadialPart::KGrid(g) => g.k_values.iter().all(|k| *k == 0.0),
            RadialPart::StableMix { terms } => terms.iter().all(|t| t.c == 0.0),
        }
    }

    /// ∫(e^{irw} − 1 − irw·κ(r)) g(r) dr.
    pub fn cumulant(&self, w: f64, centering: Centering, opts: &QuadOptions) -> Result<Complex64> {
        match self {
            RadialPart::Atomic { atoms } => Ok(atoms.iter().map(|a| compensated_kernel(a.r, w, centering) * a.m).sum()),
            RadialPart::StableMix { terms } => {
                let mut s = Complex64::new(0.0, 0.0);
                for t in terms {
                    s += match centering {
                        Centering::Compensated => stable_unit_compensated(t.beta, w),
                        Centering::MeanZero => {
                            if t.beta <= 1.0 {
                                return Err(LevyError::InfiniteMoment(format!(
                                    "stable exponent {} has no first moment",
                                    t.beta
                                )));
                            }
                            stable_unit_mean_zero(t.beta, w)
                        }
                    } * t.c;
                }
                Ok(s)
            }
            RadialPart::KGrid(g) => {
                if centering == Centering::MeanZero && g.alpha_ref >= 2.0 {
                    return Err(LevyError::InvalidInput("alpha_ref must be < 2".into()));
                }
                g.cumulant(w, centering, opts)
            }
        }
    }

    /// ∫ (b²−1) r³/((b²+r²)(1+r²)) g(r) dr.
    pub fn drift_kernel(&self, b: f64, opts: &QuadOptions) -> Result<f64> {
        match self {
            RadialPart::Atomic { atoms } => Ok(atoms.iter().map(|a| a.m * drift_kernel_fn(b, a.r)).sum()),
            RadialPart::StableMix { terms } => Ok(terms
                .iter()
                .map(|t| {
                    if t.beta == 1.0 {
                        t.c * b.ln()
                    } else {
                        t.c * ((1.0 - t.beta) * b.ln()).exp_m1() * stable_drift_const(t.beta)
                    }
                })
                .sum()),
            RadialPart::KGrid(g) => Ok(g.integrate_real(|r| drift_kernel_fn(b, r), 0.0, opts)?.0),
        }
    }

    /// ∫ r³/(1+r²) g(r) dr: the shift from compensated drift to mean.
    pub fn mean_shift(&self, opts: &QuadOptions) -> Result<f64> {
        match self {
            RadialPart::Atomic { atoms } => Ok(atoms.iter().map(|a| a.m * a.r.powi(3) / (1.0 + a.r * a.r)).sum()),
            RadialPart::StableMix { terms } => {
                let mut s = 0.0;
                for t in terms {
                    if t.beta <= 1.0 {
                        return Err(LevyError::InfiniteMoment(format!(
                            "stable exponent {} has no first moment",
                            t.beta
                        )));
                    }
                    s -= t.c * stable_drift_const(t.beta);
                }
                Ok(s)
            }
            RadialPart::KGrid(g) => Ok(g.integrate_real(|r| r.powi(3) / (1.0 + r * r), 0.0, opts)?.0),
        }
    }

    /// ∫_{(lo, hi]} r^p g(r) dr; `hi` may be infinite, the result may be +∞.
    pub fn power_moment(&self, p: f64, lo: f64, hi: f64) -> f64 {
        match self {
            RadialPart::Atomic { atoms } => {
                atoms.iter().filter(|a| a.r > lo && a.r <= hi).map(|a| a.m * a.r.powf(p)).sum()
            }
            RadialPart::StableMix { terms } => terms.iter().map(|t| t.c * power_integral(p - t.beta, lo, hi)).sum(),
            RadialPart::KGrid(g) => g.power_moment(p, lo, hi),
        }
    }

    /// ν((lo, hi]) restricted to this part.
    pub fn mass(&self, lo: f64, hi: f64) -> f64 {
        self.power_moment(0.0, lo, hi)
    }

    /// ∫ (r² ∧ 1) g(r) dr.
    pub fn norm2(&self) -> f64 {
        self.power_moment(2.0, 0.0, 1.0) + self.power_moment(0.0, 1.0, f64::INFINITY)
    }

    /// ∫_1^∞ (ln r)^m g(r) dr.
    pub fn log_moment(&self, m: u32, opts: &QuadOptions) -> Result<f64> {
        match self {
            RadialPart::Atomic { atoms } => {
                Ok(atoms.iter().filter(|a| a.r > 1.0).map(|a| a.m * a.r.ln().powi(m as i32)).sum())
            }
            RadialPart::StableMix { terms } => {
                let fact: f64 = (1..=m).map(|k| k as f64).product();
                Ok(terms.iter().map(|t| t.c * fact / t.beta.powi(m as i32 + 1)).sum())
            }
            RadialPart::KGrid(g) => {
                if g.r_max <= 1.0 {
                    return Ok(0.0);
                }
                Ok(g.integrate_real(|r| r.ln().powi(m as i32), 1.0, opts)?.0)
            }
        }
    }

    /// Largest radius carrying mass, or +∞ for unbounded support.
    pub fn support_radius(&self) -> f64 {
        match self {
            RadialPart::Atomic { atoms } => atoms.iter().map(|a| a.r).fold(0.0, f64::max),
            RadialPart::KGrid(g) => g.r_max,
            RadialPart::StableMix { terms } => {
                if terms.is_empty() {
                    0.0
                } else {
                    f64::INFINITY
                }
            }
        }
    }

    /// Image under x ↦ a·x.
    pub fn scaled(&self, a: f64) -> RadialPart {
        match self {
            RadialPart::Atomic { atoms } => {
                RadialPart::Atomic { atoms: atoms.iter().map(|x| Atom { r: a * x.r, m: x.m }).collect() }
            }
            RadialPart::KGrid(g) => {
                let f = a.powf(g.alpha_ref);
                RadialPart::KGrid(KGrid {
                    alpha_ref: g.alpha_ref,
                    r_min: a * g.r_min,
                    r_max: a * g.r_max,
                    k_values: g.k_values.iter().map(|k| k * f).collect(),
                })
            }
            RadialPart::StableMix { terms } => RadialPart::StableMix {
                terms: terms.iter().map(|t| StableTerm { beta: t.beta, c: t.c * a.powf(t.beta) }).collect(),
            },
        }
    }

    /// The part multiplied by the scalar `t` (negative `t` yields a signed part).
    pub fn times(&self, t: f64) -> RadialPart {
        match self {
            RadialPart::Atomic { atoms } => {
                RadialPart::Atomic { atoms: atoms.iter().map(|x| Atom { r: x.r, m: x.m * t }).collect() }
            }
            RadialPart::KGrid(g) => {
                RadialPart::KGrid(KGrid { k_values: g.k_values.iter().map(|k| k * t).collect(), ..g.clone() })
            }
            RadialPart::StableMix { terms } => {
                RadialPart::StableMix { terms: terms.iter().map(|x| StableTerm { beta: x.beta, c: x.c * t }).collect() }
            }
        }
    }
}
