//! Nonnegative least squares by the Lawson-Hanson active-set method.

use nalgebra::{DMatrix, DVector};

use crate::error::{LevyError, Result};

#[derive(Debug, Clone)]
pub struct NnlsSolution {
    pub x: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
}

/// Minimizes ‖A x − b‖₂ over x ≥ 0, starting from x = 0.
pub fn nnls(a: &DMatrix<f64>, b: &DVector<f64>, max_iter: usize) -> Result<NnlsSolution> {
    let (m, n) = a.shape();
    if m == 0 || n == 0 {
        return Err(LevyError::InvalidInput("nnls needs a non-empty matrix".into()));
    }
    if b.len() != m {
        return Err(LevyError::Dimension { expected: m, got: b.len() });
    }
    let mut x = DVector::<f64>::zeros(n);
    let mut passive = vec![false; n];
    let scale = a.iter().fold(0.0f64, |s, v| s.max(v.abs())) * b.norm().max(1e-300);
    let tol = 1e-13 * scale * (m.max(n) as f64);
    let mut iterations = 0;

    let solve_passive = |passive: &[bool]| -> DVector<f64> {
        let idx: Vec<usize> = (0..n).filter(|&j| passive[j]).collect();
        let mut z = DVector::<f64>::zeros(n);
        if idx.is_empty() {
            return z;
        }
        let sub = DMatrix::from_fn(m, idx.len(), |i, k| a[(i, idx[k])]);
        let svd = sub.svd(true, true);
        if let Ok(sol) = svd.solve(b, 1e-15) {
            for (k, &j) in idx.iter().enumerate() {
                z[j] = sol[k];
            }
        }
        z
    };

    let mut blocked = vec![false; n];
    loop {
        let resid = b - a * &x;
        let w = a.transpose() * resid;
        let cand = (0..n).filter(|&j| !passive[j] && !blocked[j]).max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let t = match cand {
            Some(t) if w[t] > tol => t,
            _ => break,
        };
        iterations += 1;
        if iterations > max_iter {
            break;
        }
        passive[t] = true;
        let mut z = solve_passive(&passive);
        if z[t] <= 0.0 {
            // the newly freed column does not help numerically; skip it this round
            passive[t] = false;
            blocked[t] = true;
            continue;
        }
        blocked.iter_mut().for_each(|v| *v = false);
        let mut inner = 0;
        while (0..n).any(|j| passive[j] && z[j] <= 0.0) {
            inner += 1;
            if inner > 3 * n {
                break;
            }
            let mut step = f64::INFINITY;
            for j in 0..n {
                if passive[j] && z[j] <= 0.0 {
                    let d = x[j] - z[j];
                    if d > 0.0 {
                        step = step.min(x[j] / d);
                    }
                }
            }
            if !step.is_finite() {
                step = 0.0;
            }
            for j in 0..n {
                if passive[j] {
                    x[j] += step * (z[j] - x[j]);
                    if x[j] <= 1e-300 {
                        x[j] = 0.0;
                        passive[j] = false;
                    }
                }
            }
            z = solve_passive(&passive);
        }
        for j in 0..n {
            x[j] = if passive[j] { z[j].max(0.0) } else { 0.0 };
        }
    }
    let residual_norm = (b - a * &x).norm();
    Ok(NnlsSolution { x: x.iter().cloned().collect(), residual_norm, iterations })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_nonnegative_solution() {
        let a = DMatrix::from_row_slice(4, 3, &[1.0, 0.0, 1.0, 0.0, 1.0, 1.0, 1.0, 1.0, 0.0, 2.0, 1.0, 0.5]);
        let truth = DVector::from_vec(vec![0.5, 0.0, 2.0]);
        let b = &a * &truth;
        let s = nnls(&a, &b, 100).unwrap();
        for (x, t) in s.x.iter().zip(truth.iter()) {
            assert!((x - t).abs() < 1e-12);
        }
        assert!(s.residual_norm < 1e-12);
    }

    #[test]
    fn clips_when_unconstrained_solution_is_negative() {
        // least squares optimum is x = -1; the constrained one is 0
        let a = DMatrix::from_row_slice(2, 1, &[1.0, 1.0]);
        let b = DVector::from_vec(vec![-1.0, -1.0]);
        let s = nnls(&a, &b, 10).unwrap();
        assert_eq!(s.x, vec![0.0]);
    }
}
