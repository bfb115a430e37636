//! Special functions and the closed-form radial integrals of power densities.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use statrs::function::gamma::{gamma, ln_gamma};

/// Euler-Mascheroni constant.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_860_606_512_090_082_402;

/// Γ(−β) for β in (0, 2) \ {1}, via Γ(2−β) = β(β−1)Γ(−β).
pub fn gamma_neg(beta: f64) -> f64 {
    gamma(2.0 - beta) / (beta * (beta - 1.0))
}

pub fn ln_beta(a: f64, b: f64) -> f64 {
    ln_gamma(a) + ln_gamma(b) - ln_gamma(a + b)
}

pub fn beta_fn(a: f64, b: f64) -> f64 {
    ln_beta(a, b).exp()
}

/// D_β = ∫_0^∞ r^{−β}/(1+r²) dr continued analytically, equal to (π/2)/cos(πβ/2).
///
/// For β in (1, 2) this is minus the compensated-to-mean shift of r^{−β−1} dr.
pub fn stable_drift_const(beta: f64) -> f64 {
    FRAC_PI_2 / (FRAC_PI_2 * beta).cos()
}

/// ∫_0^∞ (e^{irw} − 1 − irw/(1+r²)) r^{−β−1} dr.
pub fn stable_unit_compensated(beta: f64, w: f64) -> Complex64 {
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    let aw = w.abs();
    if beta == 1.0 {
        return Complex64::new(-FRAC_PI_2 * aw, w * (1.0 - EULER_GAMMA - aw.ln()));
    }
    stable_unit_power(beta, w) - Complex64::new(0.0, w * stable_drift_const(beta))
}

/// ∫_0^∞ (e^{irw} − 1 − irw) r^{−β−1} dr for β in (1, 2).
pub fn stable_unit_mean_zero(beta: f64, w: f64) -> Complex64 {
    if w == 0.0 {
        return Complex64::new(0.0, 0.0);
    }
    stable_unit_power(beta, w)
}

// Γ(−β)(−iw)^β
fn stable_unit_power(beta: f64, w: f64) -> Complex64 {
    let aw = w.abs();
    let phase = -0.5 * PI * beta * w.signum();
    Complex64::from_polar(gamma_neg(beta) * aw.powf(beta), phase)
}

/// ∫_x^y r^{e−1} dr for 0 < x ≤ y ≤ ∞. Returns +∞ when divergent.
pub fn power_integral(e: f64, x: f64, y: f64) -> f64 {
    if y <= x {
        return 0.0;
    }
    if y.is_infinite() {
        if e < 0.0 {
            return -x.powf(e) / e;
        }
        return f64::INFINITY;
    }
    if x == 0.0 {
        if e > 0.0 {
            return y.powf(e) / e;
        }
        return f64::INFINITY;
    }
    let l = (y / x).ln();
    if (e * l).abs() < 1e-8 {
        // series of x^e (exp(e l) − 1)/e
        return x.powf(e) * l * (1.0 + 0.5 * e * l + e * e * l * l / 6.0);
    }
    x.powf(e) * (e * l).exp_m1() / e
}
