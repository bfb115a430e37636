//! Named fixture triplets used by the CLI, the tests and the acceptance suite.

use crate::error::{LevyError, Result};
use crate::radial::{Atom, Centering, KGrid, RadialPart, StableTerm};
use crate::transform::ATOM_GRID_RATIO;
use crate::triplet::{LevyTriplet, PolarComponent, PolarLevyMeasure};

pub fn gaussian(a: Vec<Vec<f64>>) -> LevyTriplet {
    LevyTriplet::gaussian(a)
}

pub fn delta(gamma: Vec<f64>) -> LevyTriplet {
    LevyTriplet::delta(gamma)
}

/// β-stable law with Lévy measure Σ_i w_i δ_{ξ_i}(dξ) r^{−β−1} dr and zero drift.
pub fn stable(beta: f64, directions: &[Vec<f64>], weights: &[f64]) -> Result<LevyTriplet> {
    if directions.len() != weights.len() || directions.is_empty() {
        return Err(LevyError::InvalidInput("need one weight per direction".into()));
    }
    from_parts(
        directions
            .iter()
            .zip(weights)
            .map(|(xi, w)| (xi.clone(), RadialPart::StableMix { terms: vec![StableTerm { beta, c: *w }] }))
            .collect(),
    )
}

/// One-direction mixture Σ c_j r^{−β_j−1} on ξ = (1).
pub fn stable_mix(atoms: &[(f64, f64)]) -> Result<LevyTriplet> {
    let terms = atoms.iter().map(|(beta, c)| StableTerm { beta: *beta, c: *c }).collect();
    from_parts(vec![(vec![1.0], RadialPart::StableMix { terms })])
}

/// Compound Poisson law in d = 1 from (signed jump, rate) pairs, zero drift.
pub fn atomic_cp(atoms: &[(f64, f64)]) -> Result<LevyTriplet> {
    let mut parts = Vec::new();
    for sign in [1.0, -1.0] {
        let a: Vec<Atom> =
            atoms.iter().filter(|(x, _)| x * sign > 0.0).map(|(x, m)| Atom { r: x.abs(), m: *m }).collect();
        if !a.is_empty() {
            parts.push((vec![sign], RadialPart::Atomic { atoms: a }));
        }
    }
    if parts.is_empty() {
        return Err(LevyError::InvalidInput("atoms must be nonzero".into()));
    }
    from_parts(parts)
}

/// k(r) = m for r < a and 0 beyond, on ξ = (1) with reference exponent α.
pub fn step_k(alpha: f64, a: f64, m: f64) -> Result<LevyTriplet> {
    let g = KGrid::from_fn(alpha, a, ATOM_GRID_RATIO, 21, |r| if r < a { m } else { 0.0 });
    from_parts(vec![(vec![1.0], RadialPart::KGrid(g))])
}

/// Sampled k-functions on ξ = (1).
pub fn kgrid_sample(name: &str) -> Result<LevyTriplet> {
    let g = match name {
        // smooth, decreasing
        "exp" => KGrid::from_fn(0.5, 10.0, ATOM_GRID_RATIO, 61, |r| (-r).exp()),
        // k increases on part of the grid, so not in L^<α>
        "bump" => KGrid::from_fn(0.5, 10.0, ATOM_GRID_RATIO, 41, |r| if r > 1.0 && r < 3.0 { 2.0 } else { 1.0 }),
        _ => return Err(LevyError::InvalidInput(format!("unknown k-grid sample '{name}'"))),
    };
    from_parts(vec![(vec![1.0], RadialPart::KGrid(g))])
}

/// Same Lévy measure and Gaussian part, mean-zero centering with zero mean.
pub fn mean_zero(t: LevyTriplet) -> LevyTriplet {
    LevyTriplet { gamma: vec![0.0; t.d], centering: Centering::MeanZero, ..t }
}

fn from_parts(parts: Vec<(Vec<f64>, RadialPart)>) -> Result<LevyTriplet> {
    let d = parts.first().map(|p| p.0.len()).unwrap_or(1);
    let comps = parts.into_iter().map(|(xi, radial)| PolarComponent { xi, radial }).collect();
    LevyTriplet::new(vec![vec![0.0; d]; d], PolarLevyMeasure::new(comps), vec![0.0; d], Centering::Compensated)
        .validated(&Default::default())
}

/// Named fixtures in a fixed order.
#[derive(Debug, Clone)]
pub struct FixtureCatalog {
    entries: Vec<(String, LevyTriplet)>,
}

impl FixtureCatalog {
    pub fn standard() -> Self {
        let s2 = std::f64::consts::FRAC_1_SQRT_2;
        let build = || -> Result<Vec<(&'static str, LevyTriplet)>> {
            Ok(vec![
                ("gaussian", gaussian(vec![vec![1.0]])),
                ("gaussian2d", gaussian(vec![vec![2.0, 0.5], vec![0.5, 1.0]])),
                ("delta", delta(vec![3.0])),
                ("delta0", delta(vec![0.0])),
                ("stable15", stable(1.5, &[vec![1.0]], &[1.0])?),
                ("stable15_centered", mean_zero(stable(1.5, &[vec![1.0]], &[1.0])?)),
                ("stable15_sym", stable(1.5, &[vec![1.0], vec![-1.0]], &[0.5, 0.5])?),
                ("stable05", stable(0.5, &[vec![1.0]], &[1.0])?),
                ("stable_mix", stable_mix(&[(0.8, 1.0), (1.5, 1.0)])?),
                ("stable2d", stable(1.2, &[vec![1.0, 0.0], vec![s2, s2]], &[1.0, 0.5])?),
                ("atomic_cp", atomic_cp(&[(1.0, 1.0), (-1.0, 0.5)])?),
                ("atomic_sym", atomic_cp(&[(1.0, 1.0), (-1.0, 1.0)])?),
                ("cp_gauss", LevyTriplet { a: vec![vec![1.0]], ..atomic_cp(&[(1.0, 1.0), (-1.0, 0.5)])? }),
                ("step_k", step_k(0.5, 1.0, 1.0)?),
                ("kgrid_exp", kgrid_sample("exp")?),
                ("kgrid_bump", kgrid_sample("bump")?),
            ])
        };
        let entries = build().expect("standard fixtures are valid");
        Self { entries: entries.into_iter().map(|(n, t)| (n.to_string(), t)).collect() }
    }

    pub fn names(&self) -> Vec<&str> {
        self.entries.iter().map(|(n, _)| n.as_str()).collect()
    }

    pub fn get(&self, name: &str) -> Result<&LevyTriplet> {
        self.entries
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, t)| t)
            .ok_or_else(|| LevyError::InvalidInput(format!("unknown fixture '{name}'")))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &LevyTriplet)> {
        self.entries.iter().map(|(n, t)| (n.as_str(), t))
    }
}
