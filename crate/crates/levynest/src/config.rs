//! Run configuration: tolerances, quadrature caps, evaluation grids and the seed.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{LevyError, Result};

/// Environment variable consulted when no `--config` path is given.
pub const CONFIG_ENV: &str = "LEVYNEST_CONFIG";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QuadOptions {
    /// Absolute error target.
    pub abs_tol: f64,
    /// Relative error target; the effective target is the larger of the two.
    pub rel_tol: f64,
    /// Hard cap on the number of interval bisections.
    pub max_subdivisions: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        Self { abs_tol: 1e-10, rel_tol: 1e-12, max_subdivisions: 4000 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ZGridSpec {
    pub points: usize,
    pub radius: f64,
}

impl Default for ZGridSpec {
    fn default() -> Self {
        Self { points: 32, radius: 5.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    pub tol_psd: f64,
    pub tol_unit: f64,
    pub tol_cf: f64,
    pub tol_mono: f64,
    pub tol_gamma: f64,
    pub tol_norm: f64,
    pub quad: QuadOptions,
    pub z_grid: ZGridSpec,
    /// Number of points in the default β dictionary used by Γ fits.
    pub beta_grid_points: usize,
    /// Iteration cap of the nonnegative least-squares solver.
    pub nnls_max_iter: usize,
    /// Largest difference order examined by the monotonicity test.
    pub max_order: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            tol_psd: 1e-10,
            tol_unit: 1e-12,
            tol_cf: 1e-8,
            tol_mono: 1e-10,
            tol_gamma: 1e-6,
            tol_norm: 1e-8,
            quad: QuadOptions::default(),
            z_grid: ZGridSpec::default(),
            beta_grid_points: 97,
            nnls_max_iter: 2000,
            max_order: 8,
            seed: 0,
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        let tols = [
            ("tol_psd", self.tol_psd),
            ("tol_unit", self.tol_unit),
            ("tol_cf", self.tol_cf),
            ("tol_mono", self.tol_mono),
            ("tol_gamma", self.tol_gamma),
            ("tol_norm", self.tol_norm),
            ("quad.abs_tol", self.quad.abs_tol),
        ];
        for (name, v) in tols {
            if !(v > 0.0 && v.is_finite()) {
                return Err(LevyError::InvalidInput(format!("{name} must be positive, got {v}")));
            }
        }
        if self.quad.rel_tol < 0.0 || self.quad.max_subdivisions == 0 {
            return Err(LevyError::InvalidInput("invalid quadrature options".into()));
        }
        if self.z_grid.points == 0 || !(self.z_grid.radius > 0.0) {
            return Err(LevyError::InvalidInput("invalid z-grid specification".into()));
        }
        if self.beta_grid_points < 2 {
            return Err(LevyError::InvalidInput("beta_grid_points must be at least 2".into()));
        }
        Ok(())
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: RunConfig = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Loads from `path`, falling back to `$LEVYNEST_CONFIG`, then to defaults.
    pub fn load(path: Option<&Path>) -> Result<Self> {
        if let Some(p) = path {
            return Self::from_path(p);
        }
        match std::env::var_os(CONFIG_ENV) {
            Some(p) if !p.is_empty() => Self::from_path(Path::new(&p)),
            _ => Ok(Self::default()),
        }
    }

    pub fn z_grid(&self, d: usize) -> Vec<Vec<f64>> {
        z_grid(d, self.z_grid.points, self.z_grid.radius)
    }
}

/// Deterministic evaluation points inside the closed ball of radius `radius`.
///
/// In one dimension the points are cell midpoints of `[-radius, radius]`, so zero is
/// never included. In two dimensions they sit on a spiral. In higher dimensions the
/// directions come from a fixed low-discrepancy sequence.
pub fn z_grid(d: usize, points: usize, radius: f64) -> Vec<Vec<f64>> {
    let n = points.max(1);
    match d {
        0 => Vec::new(),
        1 => (0..n).map(|k| vec![-radius + 2.0 * radius * (k as f64 + 0.5) / n as f64]).collect(),
        2 => {
            let golden = std::f64::consts::PI * (3.0 - 5f64.sqrt());
            (0..n)
                .map(|k| {
                    let r = radius * ((k as f64 + 0.5) / n as f64).sqrt();
                    let th = golden * k as f64;
                    vec![r * th.cos(), r * th.sin()]
                })
                .collect()
        }
        _ => {
            let primes = [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53];
            (0..n)
                .map(|k| {
                    let mut v: Vec<f64> =
                        (0..d).map(|j| 2.0 * radical_inverse(k as u64 + 1, primes[j % primes.len()]) - 1.0).collect();
                    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-12);
                    let r = radius * (k as f64 + 0.5) / n as f64;
                    for x in v.iter_mut() {
                        *x *= r / norm;
                    }
                    v
                })
                .collect()
        }
    }
}

fn radical_inverse(mut i: u64, base: u64) -> f64 {
    let mut inv = 1.0 / base as f64;
    let mut out = 0.0;
    while i > 0 {
        out += (i % base) as f64 * inv;
        i /= base;
        inv /= base as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_stays_in_ball_and_avoids_origin() {
        for d in 1..5 {
            let g = z_grid(d, 32, 5.0);
            assert_eq!(g.len(), 32);
            for z in &g {
                let n = z.iter().map(|x| x * x).sum::<f64>().sqrt();
                assert!(n <= 5.0 + 1e-12 && n > 0.0);
            }
        }
    }

    #[test]
    fn defaults_validate() {
        RunConfig::default().validate().unwrap();
        let c = RunConfig { tol_cf: 0.0, ..RunConfig::default() };
        assert!(c.validate().is_err());
    }
}
