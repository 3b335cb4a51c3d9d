//! Gaussian tail and chi-square survival functions.

use statrs::distribution::{ChiSquared, ContinuousCDF};
use statrs::function::erf::{erfc, erfc_inv};
use statrs::function::gamma::{gamma_ur, ln_gamma};

use crate::error::{Error, Result};

const SQRT_2: f64 = std::f64::consts::SQRT_2;
/// Relative Poisson-tail bound at which the noncentral series stops.
const SERIES_TOL: f64 = 1e-12;
const SERIES_MAX_TERMS: usize = 100_000;

/// Standard normal tail `Q(x) = P(Z > x)`.
pub fn q_function(x: f64) -> f64 {
    0.5 * erfc(x / SQRT_2)
}

/// Inverse of [`q_function`] on `(0, 1)`, polished by Newton steps.
pub fn q_inverse(p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p_fa", format!("must lie in (0, 1), got {p}")));
    }
    let mut x = SQRT_2 * erfc_inv(2.0 * p);
    for _ in 0..3 {
        let density = (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt();
        if density == 0.0 {
            break;
        }
        let step = (q_function(x) - p) / density;
        x += step;
        if step.abs() <= 1e-15 * x.abs().max(1.0) {
            break;
        }
    }
    Ok(x)
}

/// `P(X > x)` for `X ~ χ²(dof)`.
pub fn chi2_sf(dof: f64, x: f64) -> f64 {
    if x <= 0.0 {
        1.0
    } else {
        gamma_ur(dof / 2.0, x / 2.0)
    }
}

/// Threshold `x` with `P(X > x) = p` for `X ~ χ²(dof)`.
pub fn chi2_isf(dof: f64, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::invalid("p_fa", format!("must lie in (0, 1), got {p}")));
    }
    let dist = ChiSquared::new(dof).map_err(|e| Error::invalid("dof", e.to_string()))?;
    Ok(dist.inverse_cdf(1.0 - p))
}

/// `P(X > x)` for `X ~ χ′²(dof, noncentrality)`, as a Poisson mixture of
/// central tails summed outward from the largest weight.
pub fn noncentral_chi2_sf(dof: f64, noncentrality: f64, x: f64) -> Result<f64> {
    if !(noncentrality >= 0.0) || !noncentrality.is_finite() {
        return Err(Error::invalid("noncentrality", "must be finite and non-negative"));
    }
    if noncentrality == 0.0 {
        return Ok(chi2_sf(dof, x));
    }
    if x <= 0.0 {
        return Ok(1.0);
    }
    let half = noncentrality / 2.0;
    let weight = |j: usize| (-half + j as f64 * half.ln() - ln_gamma(j as f64 + 1.0)).exp();
    let term = |j: usize| weight(j) * chi2_sf(dof + 2.0 * j as f64, x);
    let mode = half.floor() as usize;

    let mut sum = term(mode);
    let mut mass = weight(mode);
    // Upward: the weights decay at least geometrically with ratio half/(j+1).
    let mut j = mode + 1;
    loop {
        let w = weight(j);
        mass += w;
        sum += w * chi2_sf(dof + 2.0 * j as f64, x);
        let ratio = half / (j as f64 + 1.0);
        if ratio < 1.0 && w * ratio / (1.0 - ratio) <= SERIES_TOL * mass.max(f64::MIN_POSITIVE) {
            break;
        }
        j += 1;
        if j - mode > SERIES_MAX_TERMS {
            return Err(Error::NonConvergent("noncentral chi-square series".into()));
        }
    }
    // Downward: below the mode the weights fall off at least as fast.
    for j in (0..mode).rev() {
        let w = weight(j);
        mass += w;
        sum += w * chi2_sf(dof + 2.0 * j as f64, x);
        if w * (j as f64) / half <= SERIES_TOL * mass {
            break;
        }
    }
    // Normalising by the summed weights cancels roundoff in the log-space
    // weights, which matters once the noncentrality is large.
    Ok((sum / mass).clamp(0.0, 1.0))
}
