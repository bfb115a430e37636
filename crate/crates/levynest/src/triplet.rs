//! Lévy-Khintchine triplets: representation, cumulants and the convolution algebra.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{QuadOptions, RunConfig};
use crate::error::{LevyError, Result};
use crate::radial::{Atom, Centering, KGrid, RadialPart, StableTerm};

/// One direction of a polar Lévy measure with its radial part.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolarComponent {
    pub xi: Vec<f64>,
    pub radial: RadialPart,
}

/// Finite list of (direction, radial part) pairs; directions may repeat.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PolarLevyMeasure {
    pub components: Vec<PolarComponent>,
}

impl PolarLevyMeasure {
    pub fn new(components: Vec<PolarComponent>) -> Self {
        Self { components }
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|c| c.radial.is_null())
    }

    /// ∫(|x|² ∧ 1) ν(dx).
    pub fn norm2(&self) -> f64 {
        self.components.iter().map(|c| c.radial.norm2()).sum()
    }

    /// Merges components sharing a direction: atoms and stable terms are pooled,
    /// k-grids on identical grids are added, everything else is kept side by side.
    pub fn canonical(&self) -> PolarLevyMeasure {
        let mut groups: Vec<(Vec<f64>, Vec<RadialPart>)> = Vec::new();
        for c in &self.components {
            if c.radial.is_null() {
                continue;
            }
            match groups.iter_mut().find(|(xi, _)| same_direction(xi, &c.xi)) {
                Some((_, parts)) => parts.push(c.radial.clone()),
                None => groups.push((c.xi.clone(), vec![c.radial.clone()])),
            }
        }
        let mut out = Vec::new();
        for (xi, parts) in groups {
            let mut atoms: Vec<Atom> = Vec::new();
            let mut terms: Vec<StableTerm> = Vec::new();
            let mut grids: Vec<KGrid> = Vec::new();
            for p in parts {
                match p {
                    RadialPart::Atomic { atoms: a } => {
                        for x in a {
                            match atoms.iter_mut().find(|y| (y.r - x.r).abs() <= 1e-14 * x.r) {
                                Some(y) => y.m += x.m,
                                None => atoms.push(x),
                            }
                        }
                    }
                    RadialPart::StableMix { terms: t } => {
                        for x in t {
                            match terms.iter_mut().find(|y| y.beta == x.beta) {
                                Some(y) => y.c += x.c,
                                None => terms.push(x),
                            }
                        }
                    }
                    RadialPart::KGrid(g) => {
                        match grids.iter_mut().find(|h| {
                            h.alpha_ref == g.alpha_ref
                                && h.len() == g.len()
                                && (h.r_min - g.r_min).abs() <= 1e-14 * g.r_min
                                && (h.r_max - g.r_max).abs() <= 1e-14 * g.r_max
                        }) {
                            Some(h) => {
                                for (a, b) in h.k_values.iter_mut().zip(&g.k_values) {
                                    *a += b;
                                }
                            }
                            None => grids.push(g),
                        }
                    }
                }
            }
            atoms.retain(|a| a.m != 0.0);
            atoms.sort_by(|a, b| a.r.total_cmp(&b.r));
            terms.retain(|t| t.c != 0.0);
            terms.sort_by(|a, b| a.beta.total_cmp(&b.beta));
            if !atoms.is_empty() {
                out.push(PolarComponent { xi: xi.clone(), radial: RadialPart::Atomic { atoms } });
            }
            if !terms.is_empty() {
                out.push(PolarComponent { xi: xi.clone(), radial: RadialPart::StableMix { terms } });
            }
            for g in grids {
                let part = RadialPart::KGrid(g);
                if !part.is_null() {
                    out.push(PolarComponent { xi: xi.clone(), radial: part });
                }
            }
        }
        PolarLevyMeasure { components: out }
    }
}

pub(crate) fn same_direction(a: &[f64], b: &[f64]) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Lévy-Khintchine triplet (A, ν, γ) of an infinitely divisible law on R^d.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LevyTriplet {
    pub d: usize,
    #[serde(rename = "A")]
    pub a: Vec<Vec<f64>>,
    pub gamma: Vec<f64>,
    pub centering: Centering,
    pub nu: PolarLevyMeasure,
}

impl LevyTriplet {
    pub fn new(a: Vec<Vec<f64>>, nu: PolarLevyMeasure, gamma: Vec<f64>, centering: Centering) -> Self {
        Self { d: gamma.len(), a, gamma, centering, nu }
    }

    pub fn gaussian(a: Vec<Vec<f64>>) -> Self {
        let d = a.len();
        Self::new(a, PolarLevyMeasure::default(), vec![0.0; d], Centering::Compensated)
    }

    pub fn delta(gamma: Vec<f64>) -> Self {
        let d = gamma.len();
        Self::new(vec![vec![0.0; d]; d], PolarLevyMeasure::default(), gamma, Centering::Compensated)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let t: LevyTriplet = serde_json::from_str(text)?;
        t.validated(&RunConfig::default())
    }

    /// Checks every invariant and returns a copy with the Gaussian part clipped to psd.
    pub fn validated(&self, cfg: &RunConfig) -> Result<Self> {
        let d = self.d;
        if d == 0 {
            return Err(LevyError::InvalidInput("dimension must be at least 1".into()));
        }
        if self.gamma.len() != d {
            return Err(LevyError::Dimension { expected: d, got: self.gamma.len() });
        }
        if self.gamma.iter().any(|g| !g.is_finite()) {
            return Err(LevyError::NonFinite("gamma".into()));
        }
        let a = clip_psd(&self.a, d, cfg.tol_psd)?;
        for c in &self.nu.components {
            if c.xi.len() != d {
                return Err(LevyError::Dimension { expected: d, got: c.xi.len() });
            }
            if (norm(&c.xi) - 1.0).abs() > cfg.tol_unit {
                return Err(LevyError::InvalidInput(format!("direction {:?} is not a unit vector", c.xi)));
            }
            c.radial.validate()?;
            if !c.radial.norm2().is_finite() {
                return Err(LevyError::InvalidInput("radial part has infinite (r^2 ∧ 1)-mass".into()));
            }
        }
        if self.centering == Centering::MeanZero && !self.big_jump_first_moment().is_finite() {
            return Err(LevyError::InfiniteMoment("mean-zero centering needs ∫_{|x|>1}|x|ν(dx) < ∞".into()));
        }
        Ok(Self { a, ..self.clone() })
    }

    fn big_jump_first_moment(&self) -> f64 {
        self.nu.components.iter().map(|c| c.radial.power_moment(1.0, 1.0, f64::INFINITY)).sum()
    }

    pub fn is_gaussian(&self) -> bool {
        self.nu.is_zero()
    }

    pub fn gauss_is_zero(&self) -> bool {
        self.a.iter().flatten().all(|x| *x == 0.0)
    }

    fn check_z(&self, z: &[f64]) -> Result<()> {
        if z.len() != self.d {
            return Err(LevyError::Dimension { expected: self.d, got: z.len() });
        }
        if z.iter().any(|x| !x.is_finite()) {
            return Err(LevyError::NonFinite(format!("z = {z:?}")));
        }
        Ok(())
    }

    /// C_μ(z) with the default quadrature options.
    pub fn cumulant(&self, z: &[f64]) -> Result<Complex64> {
        self.cumulant_with(z, &QuadOptions::default())
    }

    pub fn cumulant_with(&self, z: &[f64], opts: &QuadOptions) -> Result<Complex64> {
        self.check_z(z)?;
        let mut quad = 0.0;
        for i in 0..self.d {
            for j in 0..self.d {
                quad += z[i] * self.a[i][j] * z[j];
            }
        }
        let mut c = Complex64::new(-0.5 * quad, dot(&self.gamma, z));
        for comp in &self.nu.components {
            let w = dot(z, &comp.xi);
            c += comp.radial.cumulant(w, self.centering, opts)?;
        }
        Ok(c)
    }

    pub fn char_fn(&self, z: &[f64]) -> Result<Complex64> {
        Ok(self.cumulant(z)?.exp())
    }

    pub fn char_fn_with(&self, z: &[f64], opts: &QuadOptions) -> Result<Complex64> {
        Ok(self.cumulant_with(z, opts)?.exp())
    }

    /// Mean vector, when the first moment is finite.
    pub fn mean(&self) -> Result<Vec<f64>> {
        self.mean_with(&QuadOptions::default())
    }

    pub fn mean_with(&self, opts: &QuadOptions) -> Result<Vec<f64>> {
        match self.centering {
            Centering::MeanZero => Ok(self.gamma.clone()),
            Centering::Compensated => {
                if !self.big_jump_first_moment().is_finite() {
                    return Err(LevyError::InfiniteMoment("∫_{|x|>1}|x|ν(dx) = ∞".into()));
                }
                let mut g = self.gamma.clone();
                for c in &self.nu.components {
                    let s = c.radial.mean_shift(opts)?;
                    for (gi, xi) in g.iter_mut().zip(&c.xi) {
                        *gi += s * xi;
                    }
                }
                Ok(g)
            }
        }
    }

    /// Same law written with the mean-zero compensator; the drift becomes the mean.
    pub fn to_mean_zero(&self) -> Result<Self> {
        self.to_mean_zero_with(&QuadOptions::default())
    }

    pub fn to_mean_zero_with(&self, opts: &QuadOptions) -> Result<Self> {
        let gamma = self.mean_with(opts)?;
        Ok(Self { gamma, centering: Centering::MeanZero, ..self.clone() })
    }

    /// Same law written with the compensator `1/(1+|x|²)`.
    pub fn to_compensated(&self) -> Result<Self> {
        self.to_compensated_with(&QuadOptions::default())
    }

    pub fn to_compensated_with(&self, opts: &QuadOptions) -> Result<Self> {
        if self.centering == Centering::Compensated {
            return Ok(self.clone());
        }
        let mut g = self.gamma.clone();
        for c in &self.nu.components {
            let s = c.radial.mean_shift(opts)?;
            for (gi, xi) in g.iter_mut().zip(&c.xi) {
                *gi -= s * xi;
            }
        }
        Ok(Self { gamma: g, centering: Centering::Compensated, ..self.clone() })
    }

    pub fn with_centering(&self, centering: Centering, opts: &QuadOptions) -> Result<Self> {
        match centering {
            Centering::Compensated => self.to_compensated_with(opts),
            Centering::MeanZero => self.to_mean_zero_with(opts),
        }
    }

    /// Triplet of μ1 * μ2. The result uses the centering of `self`.
    pub fn convolve(&self, other: &Self) -> Result<Self> {
        if self.d != other.d {
            return Err(LevyError::Dimension { expected: self.d, got: other.d });
        }
        let other = other.with_centering(self.centering, &QuadOptions::default())?;
        let a = (0..self.d).map(|i| (0..self.d).map(|j| self.a[i][j] + other.a[i][j]).collect()).collect();
        let gamma = self.gamma.iter().zip(&other.gamma).map(|(x, y)| x + y).collect();
        let mut comps = self.nu.components.clone();
        comps.extend(other.nu.components.iter().cloned());
        let nu = PolarLevyMeasure::new(comps).canonical();
        Ok(Self { d: self.d, a, gamma, centering: self.centering, nu })
    }

    /// Triplet of μ^{t*}: (tA, tν, tγ).
    pub fn t_convolution(&self, t: f64) -> Result<Self> {
        if !(t > 0.0 && t.is_finite()) {
            return Err(LevyError::InvalidInput(format!("t must be positive, got {t}")));
        }
        Ok(self.times(t))
    }

    /// Linear scaling without positivity checks; used for signed intermediate measures.
    pub(crate) fn times(&self, t: f64) -> Self {
        Self {
            d: self.d,
            a: self.a.iter().map(|r| r.iter().map(|x| x * t).collect()).collect(),
            gamma: self.gamma.iter().map(|x| x * t).collect(),
            centering: self.centering,
            nu: PolarLevyMeasure::new(
                self.nu
                    .components
                    .iter()
                    .map(|c| PolarComponent { xi: c.xi.clone(), radial: c.radial.times(t) })
                    .collect(),
            ),
        }
    }

    /// Triplet of the law of a·X for a > 0.
    pub fn scale(&self, a: f64) -> Result<Self> {
        self.scale_with(a, &QuadOptions::default())
    }

    pub fn scale_with(&self, a: f64, opts: &QuadOptions) -> Result<Self> {
        if !(a > 0.0 && a.is_finite()) {
            return Err(LevyError::InvalidInput(format!("scale must be positive, got {a}")));
        }
        let mut gamma: Vec<f64> = self.gamma.iter().map(|g| a * g).collect();
        if self.centering == Centering::Compensated && a != 1.0 {
            for c in &self.nu.components {
                let k = a * c.radial.drift_kernel(1.0 / a, opts)?;
                for (gi, xi) in gamma.iter_mut().zip(&c.xi) {
                    *gi += k * xi;
                }
            }
        }
        Ok(Self {
            d: self.d,
            a: self.a.iter().map(|r| r.iter().map(|x| x * a * a).collect()).collect(),
            gamma,
            centering: self.centering,
            nu: PolarLevyMeasure::new(
                self.nu
                    .components
                    .iter()
                    .map(|c| PolarComponent { xi: c.xi.clone(), radial: c.radial.scaled(a) })
                    .collect(),
            ),
        })
    }

    /// Triplet of the law of X + c.
    pub fn shift(&self, c: &[f64]) -> Result<Self> {
        if c.len() != self.d {
            return Err(LevyError::Dimension { expected: self.d, got: c.len() });
        }
        Ok(Self { gamma: self.gamma.iter().zip(c).map(|(g, x)| g + x).collect(), ..self.clone() })
    }
}

/// Symmetrizes, checks eigenvalues ≥ −tol and clips negative ones to zero.
pub fn clip_psd(a: &[Vec<f64>], d: usize, tol: f64) -> Result<Vec<Vec<f64>>> {
    if a.len() != d || a.iter().any(|r| r.len() != d) {
        return Err(LevyError::InvalidInput(format!("A must be {d}x{d}")));
    }
    let mut m = DMatrix::<f64>::zeros(d, d);
    for i in 0..d {
        for j in 0..d {
            let (x, y) = (a[i][j], a[j][i]);
            if !x.is_finite() {
                return Err(LevyError::NonFinite("A".into()));
            }
            if (x - y).abs() > tol * (1.0 + x.abs()) {
                return Err(LevyError::InvalidInput("A is not symmetric".into()));
            }
            m[(i, j)] = 0.5 * (x + y);
        }
    }
    let eig = SymmetricEigen::new(m.clone());
    let min = eig.eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
    if min < -tol {
        return Err(LevyError::InvalidInput(format!("A is not nonnegative-definite (eigenvalue {min:.3e})")));
    }
    if min >= 0.0 {
        return Ok((0..d).map(|i| (0..d).map(|j| m[(i, j)]).collect()).collect());
    }
    let clipped = eig.eigenvalues.map(|v| v.max(0.0));
    let r = &eig.eigenvectors * DMatrix::from_diagonal(&clipped) * eig.eigenvectors.transpose();
    Ok((0..d).map(|i| (0..d).map(|j| 0.5 * (r[(i, j)] + r[(j, i)])).collect()).collect())
}

/// Symmetric square root of a psd matrix.
pub fn psd_sqrt(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let d = a.len();
    let m = DMatrix::from_fn(d, d, |i, j| 0.5 * (a[i][j] + a[j][i]));
    let eig = SymmetricEigen::new(m);
    let s = eig.eigenvalues.map(|v| v.max(0.0).sqrt());
    let r = &eig.eigenvectors * DMatrix::from_diagonal(&s) * eig.eigenvectors.transpose();
    (0..d).map(|i| (0..d).map(|j| r[(i, j)]).collect()).collect()
}
