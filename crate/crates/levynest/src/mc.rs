//! Monte Carlo approximation of ∫_0^T f_α(t) dX_t for finite-activity Lévy processes.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::config::RunConfig;
use crate::error::{LevyError, Result};
use crate::radial::{Centering, RadialPart};
use crate::transform::{MappingSpec, TransformResult};
use crate::triplet::{norm, psd_sqrt, LevyTriplet};

/// Minimum number of paths accepted by the simulator.
pub const MIN_PATHS: usize = 1000;
/// Flagging threshold in units of 1/√N.
pub const FLAG_LEVEL: f64 = 4.8;
/// Cap on the expected number of simulated jumps over all paths.
pub const MAX_TOTAL_JUMPS: f64 = 2e8;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimSpec {
    pub triplet: LevyTriplet,
    /// Truncation horizon for α ≥ 0; replaced by −1/α when α < 0.
    pub horizon: f64,
    pub n_paths: usize,
    pub seed: u64,
}

/// Jump law of the compound Poisson part: total rate and (rate, jump vector) pairs.
struct JumpTable {
    rate: f64,
    cumulative: Vec<f64>,
    jumps: Vec<Vec<f64>>,
    /// ∫ x κ(|x|) ν(dx), removed from the drift.
    compensator: Vec<f64>,
}

fn jump_table(t: &LevyTriplet) -> Result<JumpTable> {
    let mut rate = 0.0;
    let mut cumulative = Vec::new();
    let mut jumps = Vec::new();
    let mut compensator = vec![0.0; t.d];
    for c in &t.nu.components {
        let atoms = match &c.radial {
            RadialPart::Atomic { atoms } => atoms,
            _ => return Err(LevyError::InvalidInput("simulation needs an atomic Lévy measure".into())),
        };
        for a in atoms {
            rate += a.m;
            cumulative.push(rate);
            jumps.push(c.xi.iter().map(|x| x * a.r).collect());
            let kappa = match t.centering {
                Centering::Compensated => 1.0 / (1.0 + a.r * a.r),
                Centering::MeanZero => 1.0,
            };
            for (k, x) in compensator.iter_mut().zip(&c.xi) {
                *k += a.m * a.r * kappa * x;
            }
        }
    }
    Ok(JumpTable { rate, cumulative, jumps, compensator })
}

impl SimSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_paths < MIN_PATHS {
            return Err(LevyError::InvalidInput(format!("need at least {MIN_PATHS} paths, got {}", self.n_paths)));
        }
        jump_table(&self.triplet).map(|_| ())
    }

    pub fn effective_horizon(&self, alpha: f64) -> Result<f64> {
        let spec = MappingSpec::new(alpha)?;
        if alpha < 0.0 {
            return Ok(spec.horizon());
        }
        if !(self.horizon > 0.0 && self.horizon.is_finite()) {
            return Err(LevyError::InvalidInput(format!("horizon must be positive and finite, got {}", self.horizon)));
        }
        Ok(self.horizon)
    }
}

/// One sample of ∫_0^T f_α(t) dX_t per path; path i uses stream i of the seeded generator.
pub fn simulate_integral(spec: &SimSpec, alpha: f64) -> Result<Vec<Vec<f64>>> {
    spec.validate()?;
    let map = MappingSpec::new(alpha)?;
    let t_end = spec.effective_horizon(alpha)?;
    let mu = &spec.triplet;
    let d = mu.d;
    let table = jump_table(mu)?;
    let int_f = map.integral_f(t_end);
    let int_f2 = map.integral_f2(t_end);
    let drift: Vec<f64> = mu.gamma.iter().zip(&table.compensator).map(|(g, k)| (g - k) * int_f).collect();
    let root = psd_sqrt(&mu.a);
    let sd = int_f2.sqrt();
    let gauss = !mu.gauss_is_zero();
    let mean_jumps = table.rate * t_end;
    if mean_jumps * spec.n_paths as f64 > MAX_TOTAL_JUMPS {
        return Err(LevyError::InvalidInput(format!(
            "{:.3e} expected jumps in total; shorten the horizon or use fewer paths",
            mean_jumps * spec.n_paths as f64
        )));
    }
    let poisson = if mean_jumps > 0.0 {
        Some(Poisson::new(mean_jumps).map_err(|e| LevyError::InvalidInput(e.to_string()))?)
    } else {
        None
    };
    let mut out = Vec::with_capacity(spec.n_paths);
    for path in 0..spec.n_paths {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(path as u64);
        let mut x = drift.clone();
        if gauss {
            let g: Vec<f64> = (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
            for i in 0..d {
                x[i] += sd * (0..d).map(|j| root[i][j] * g[j]).sum::<f64>();
            }
        }
        if let Some(p) = &poisson {
            let n = p.sample(&mut rng) as u64;
            for _ in 0..n {
                let tau = rng.random::<f64>() * t_end;
                let u = rng.random::<f64>() * table.rate;
                let k = table.cumulative.partition_point(|c| *c <= u).min(table.jumps.len() - 1);
                let w = map.f(tau);
                for (xi, j) in x.iter_mut().zip(&table.jumps[k]) {
                    *xi += w * j;
                }
            }
        }
        out.push(x);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub n_paths: usize,
    pub z_grid: Vec<Vec<f64>>,
    pub empirical: Vec<Complex64>,
    pub analytic: Vec<Complex64>,
    /// max(|Δ re|, |Δ im|)·√N per grid point.
    pub standardized: Vec<f64>,
    pub flagged: Vec<bool>,
    pub flagged_fraction: f64,
    /// Flag level in units of 1/√N.
    pub level: f64,
    pub truncation_bound: Option<f64>,
}

/// Compensated (Neumaier) sum.
#[derive(Default, Clone, Copy)]
struct KahanSum {
    sum: f64,
    c: f64,
}

impl KahanSum {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.c += (self.sum - t) + x;
        } else {
            self.c += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.c
    }
}

/// Empirical characteristic function (1/N)Σ e^{i⟨z, X_k⟩}.
pub fn empirical_cf(samples: &[Vec<f64>], z: &[f64]) -> Complex64 {
    let mut re = KahanSum::default();
    let mut im = KahanSum::default();
    for x in samples {
        let p: f64 = x.iter().zip(z).map(|(a, b)| a * b).sum();
        let (s, c) = p.sin_cos();
        re.add(c);
        im.add(s);
    }
    let n = samples.len() as f64;
    Complex64::new(re.value() / n, im.value() / n)
}

pub fn compare_cf(
    samples: &[Vec<f64>],
    analytic: &TransformResult,
    zs: &[Vec<f64>],
    cfg: &RunConfig,
) -> Result<SimReport> {
    let out = analytic
        .output
        .as_ref()
        .ok_or_else(|| LevyError::Domain("the transform has no output to compare with".into()))?;
    compare_cf_with(samples, out, zs, cfg)
}

/// Same as `compare_cf` against an explicit target law.
pub fn compare_cf_with(
    samples: &[Vec<f64>],
    target: &LevyTriplet,
    zs: &[Vec<f64>],
    cfg: &RunConfig,
) -> Result<SimReport> {
    if samples.is_empty() {
        return Err(LevyError::InvalidInput("no samples".into()));
    }
    let n = samples.len();
    let sqrt_n = (n as f64).sqrt();
    let mut empirical = Vec::with_capacity(zs.len());
    let mut ana = Vec::with_capacity(zs.len());
    let mut standardized = Vec::with_capacity(zs.len());
    let mut flagged = Vec::with_capacity(zs.len());
    for z in zs {
        let e = empirical_cf(samples, z);
        let a = target.char_fn_with(z, &cfg.quad)?;
        let s = (e.re - a.re).abs().max((e.im - a.im).abs()) * sqrt_n;
        empirical.push(e);
        ana.push(a);
        standardized.push(s);
        flagged.push(s > FLAG_LEVEL);
    }
    let flagged_fraction = flagged.iter().filter(|f| **f).count() as f64 / zs.len().max(1) as f64;
    Ok(SimReport {
        n_paths: n,
        z_grid: zs.to_vec(),
        empirical,
        analytic: ana,
        standardized,
        flagged,
        flagged_fraction,
        level: FLAG_LEVEL,
        truncation_bound: None,
    })
}

/// Bound on |∫_T^∞ C_μ(f_α(t)z) dt| from |C_μ(w)| ≤ K1|w| + K2|w|², at |z| = `z_max`.
///
/// K1 is the norm of the mean and K2 = (‖A‖ + ∫|x|²ν(dx))/2; the bound is infinite when
/// α ≥ 1 and the mean is not zero.
pub fn truncation_bound(spec: &SimSpec, alpha: f64, z_max: f64) -> Result<f64> {
    if alpha < 0.0 {
        return Ok(0.0);
    }
    let t = spec.effective_horizon(alpha)?;
    let (k1, k2) = growth_constants(&spec.triplet)?;
    let s = MappingSpec::new(alpha)?.f(t);
    let tail = |p: f64| if p > alpha { s.powf(p - alpha) / (p - alpha) } else { f64::INFINITY };
    let first = if k1 == 0.0 { 0.0 } else { k1 * z_max * tail(1.0) };
    Ok(first + k2 * z_max * z_max * tail(2.0))
}

fn growth_constants(mu: &LevyTriplet) -> Result<(f64, f64)> {
    let mean = mu.mean()?;
    let k1 = norm(&mean);
    let d = mu.d;
    let a = nalgebra::DMatrix::from_fn(d, d, |i, j| 0.5 * (mu.a[i][j] + mu.a[j][i]));
    let a_norm = a.symmetric_eigenvalues().iter().cloned().fold(0.0, f64::max);
    let second: f64 = mu.nu.components.iter().map(|c| c.radial.power_moment(2.0, 0.0, f64::INFINITY)).sum();
    Ok((k1, 0.5 * (a_norm + second)))
}

/// Smallest horizon whose truncation bound is below 0.1·4/√N at |z| = `z_max`.
pub fn choose_horizon(spec: &SimSpec, alpha: f64, z_max: f64) -> Result<f64> {
    let map = MappingSpec::new(alpha)?;
    if alpha < 0.0 {
        return Ok(map.horizon());
    }
    let target = 0.4 / (spec.n_paths as f64).sqrt();
    let (k1, k2) = growth_constants(&spec.triplet)?;
    if k1 > 0.0 && alpha >= 1.0 {
        return Err(LevyError::Domain("nonzero mean: the truncated integral does not settle for α ≥ 1".into()));
    }
    let bound_at = |s: f64| {
        let mut b = k2 * z_max * z_max * s.powf(2.0 - alpha) / (2.0 - alpha);
        if k1 > 0.0 {
            b += k1 * z_max * s.powf(1.0 - alpha) / (1.0 - alpha);
        }
        b
    };
    if bound_at(1.0) <= target {
        return Ok(0.0);
    }
    // bisection on s = f_α(T) in (0, 1)
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if bound_at(mid) <= target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    if lo == 0.0 {
        return Err(LevyError::Numerical("no finite horizon meets the truncation target".into()));
    }
    Ok(map.t_of_s(lo))
}
