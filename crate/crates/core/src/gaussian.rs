//! Standard normal tail and the Mills-ratio sandwich.

use std::f64::consts::PI;

/// Upper tail `Q(x) = P(Z > x)` of the standard normal, via `erfc`.
pub fn gaussian_tail_q(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// `Φ(h, a) = Q(a·sqrt(2 ln(1/h)))`: the probability that a Brownian
/// increment over `h` exceeds `a·sqrt(2h ln(1/h))`.
pub fn phi(h: f64, a: f64) -> crate::Result<f64> {
    if !(h > 0.0 && h < 1.0) {
        return Err(crate::Error::Domain(format!("phi needs 0 < h < 1, got {h}")));
    }
    Ok(gaussian_tail_q(a * (2.0 * (1.0 / h).ln()).sqrt()))
}

/// Lower bound `h^{a²}·a·sqrt(ln(1/h)) / (sqrt(π)(2a² ln(1/h) + 1))` for [`phi`].
pub fn phi_lower_bound(h: f64, a: f64) -> f64 {
    let l = (1.0 / h).ln();
    h.powf(a * a) * a * l.sqrt() / (PI.sqrt() * (2.0 * a * a * l + 1.0))
}

/// `x/(x²+1)·e^{-x²/2}`, lower bound for `∫_x^∞ e^{-u²/2} du`.
pub fn mills_lower(x: f64) -> f64 {
    x / (x * x + 1.0) * (-0.5 * x * x).exp()
}

/// `e^{-x²/2}/x`, upper bound for `∫_x^∞ e^{-u²/2} du` (x > 0).
pub fn mills_upper(x: f64) -> f64 {
    (-0.5 * x * x).exp() / x
}

/// `∫_x^∞ e^{-u²/2} du = sqrt(2π)·Q(x)`.
pub fn gaussian_tail_integral(x: f64) -> f64 {
    (2.0 * PI).sqrt() * gaussian_tail_q(x)
}

/// `P(|N(0, var)| ≤ r)`.
pub fn prob_abs_normal_le(r: f64, var: f64) -> f64 {
    if var <= 0.0 {
        return if r >= 0.0 { 1.0 } else { 0.0 };
    }
    if r <= 0.0 {
        return 0.0;
    }
    1.0 - 2.0 * gaussian_tail_q(r / var.sqrt())
}
