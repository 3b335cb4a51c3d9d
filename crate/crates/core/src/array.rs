//! Array geometry, steering vectors and the cascaded target-RIS-BS channel.
//!
//! Steering vectors carry the `1/sqrt(N)` normalisation, so `|a(θ)|₂ = 1`.
//! The effective channel seen by the RIS weights is
//! `h̄(θ) = g(θ) ⊙ conj(h)` with `g = α a(θ)` and `h = β a(φ)`, and the received
//! power for weights `w` is `|h̄ᴴ w|²`.
//!
//! Planar arrays are stored with the z (elevation) index varying fastest:
//! element `iy * P + iz` carries `a_y[iy] * a_z[iz]`, which is `a_y ⊗ a_z`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ArrayKind {
    Ula,
    /// `rows` is P (elevation / z axis), `cols` is Q (azimuth / y axis).
    Upa { rows: usize, cols: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ArrayGeometry {
    pub kind: ArrayKind,
    pub n_elements: usize,
    /// Element spacing in carrier wavelengths.
    pub spacing: f64,
}

impl ArrayGeometry {
    pub fn ula(n: usize, spacing: f64) -> Result<Self> {
        let geom = ArrayGeometry {
            kind: ArrayKind::Ula,
            n_elements: n,
            spacing,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn upa(rows: usize, cols: usize, spacing: f64) -> Result<Self> {
        let geom = ArrayGeometry {
            kind: ArrayKind::Upa { rows, cols },
            n_elements: rows * cols,
            spacing,
        };
        geom.validate()?;
        Ok(geom)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_elements == 0 {
            return Err(Error::InvalidGeometry("array needs at least one element".into()));
        }
        if !(self.spacing > 0.0) || !self.spacing.is_finite() {
            return Err(Error::InvalidGeometry(format!(
                "spacing must be positive, got {}",
                self.spacing
            )));
        }
        if let ArrayKind::Upa { rows, cols } = self.kind {
            if rows == 0 || cols == 0 || rows * cols != self.n_elements {
                return Err(Error::InvalidGeometry(format!(
                    "planar array {rows}x{cols} does not have {} elements",
                    self.n_elements
                )));
            }
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.n_elements
    }

    pub fn is_empty(&self) -> bool {
        self.n_elements == 0
    }

    pub fn is_planar(&self) -> bool {
        matches!(self.kind, ArrayKind::Upa { .. })
    }

    /// Direction at array broadside for this geometry.
    pub fn broadside(&self) -> Angle {
        match self.kind {
            ArrayKind::Ula => Angle::Linear(0.0),
            ArrayKind::Upa { .. } => Angle::Planar { el: 0.0, az: 0.0 },
        }
    }
}

/// A direction in degrees. Linear arrays use a single angle from broadside,
/// planar arrays an (elevation, azimuth) pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Angle {
    Linear(f64),
    Planar { el: f64, az: f64 },
}

impl Angle {
    pub fn validate(&self) -> Result<()> {
        let ok = |a: f64| a.is_finite() && (-90.0..=90.0).contains(&a);
        let valid = match *self {
            Angle::Linear(t) => ok(t),
            Angle::Planar { el, az } => ok(el) && ok(az),
        };
        if valid {
            Ok(())
        } else {
            Err(Error::invalid("angle", format!("{self:?} outside [-90, 90] degrees")))
        }
    }

    /// The ULA angle, or the azimuth of a planar direction.
    pub fn theta(&self) -> f64 {
        match *self {
            Angle::Linear(t) => t,
            Angle::Planar { az, .. } => az,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelGains {
    /// Target to RIS gain.
    pub alpha: Complex64,
    /// RIS to BS gain.
    pub beta: Complex64,
    /// Direction of the BS seen from the RIS.
    pub bs_angle: Angle,
    pub noise_var: f64,
}

impl Default for ChannelGains {
    fn default() -> Self {
        ChannelGains {
            alpha: Complex64::new(1.0, 0.0),
            beta: Complex64::new(1.0, 0.0),
            bs_angle: Angle::Linear(0.0),
            noise_var: 1.0,
        }
    }
}

impl ChannelGains {
    /// Unit gains with the BS at broadside of `geom`.
    pub fn unit(geom: &ArrayGeometry) -> Self {
        ChannelGains {
            bs_angle: geom.broadside(),
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.noise_var > 0.0) {
            return Err(Error::invalid("noise_var", "must be positive"));
        }
        self.bs_angle.validate()
    }

    /// `|αβ|²`, the power of a fully coherent single-angle beam.
    pub fn coherent_power(&self) -> f64 {
        (self.alpha * self.beta).norm_sqr()
    }

    /// Gains whose SNR `|αβ|²/(N σ²)` equals `snr_db`, with `β = 1` and `α`
    /// real. This is the mean per-sample SNR `|h̄ᴴw|²/σ²` of a configuration
    /// with independent uniform phases, since `E|h̄ᴴw|² = ‖h̄‖² = |αβ|²/N`.
    pub fn with_snr(&self, n_elements: usize, snr_db: f64) -> Self {
        let n = n_elements as f64;
        let amplitude = (n * self.noise_var).sqrt() * 10f64.powf(snr_db / 20.0);
        ChannelGains {
            alpha: Complex64::new(amplitude, 0.0),
            beta: Complex64::new(1.0, 0.0),
            ..*self
        }
    }

    /// Inverse of [`ChannelGains::with_snr`].
    pub fn snr_db(&self, n_elements: usize) -> f64 {
        let n = n_elements as f64;
        to_db(self.coherent_power() / (n * self.noise_var))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EffectiveChannel {
    pub hbar: Vec<Complex64>,
}

impl EffectiveChannel {
    /// `|h̄ᴴ w|²`.
    pub fn power(&self, weights: &[Complex64]) -> f64 {
        inner(&self.hbar, weights).norm_sqr()
    }
}

/// `xᴴ y`.
pub fn inner(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    x.iter().zip(y).map(|(a, b)| a.conj() * b).sum()
}

fn ula_vector(n: usize, spacing: f64, sin_term: f64) -> Vec<Complex64> {
    let scale = 1.0 / (n as f64).sqrt();
    let step = 2.0 * PI * spacing * sin_term;
    (0..n)
        .map(|i| Complex64::from_polar(scale, step * i as f64))
        .collect()
}

pub fn steering(geom: &ArrayGeometry, angle: Angle) -> Result<Vec<Complex64>> {
    geom.validate()?;
    angle.validate()?;
    match (geom.kind, angle) {
        (ArrayKind::Ula, Angle::Linear(theta)) => Ok(ula_vector(
            geom.n_elements,
            geom.spacing,
            theta.to_radians().sin(),
        )),
        (ArrayKind::Upa { rows, cols }, Angle::Planar { el, az }) => {
            let el = el.to_radians();
            let psi = az.to_radians().sin() * el.cos();
            let a_y = ula_vector(cols, geom.spacing, psi);
            let a_z = ula_vector(rows, geom.spacing, el.sin());
            Ok(kron(&a_y, &a_z))
        }
        (_, angle) => Err(Error::invalid(
            "angle",
            format!("{angle:?} does not match a {:?} array", geom.kind),
        )),
    }
}

pub fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| x * y))
        .collect()
}

pub fn effective_channel(
    geom: &ArrayGeometry,
    gains: &ChannelGains,
    target: Angle,
) -> Result<EffectiveChannel> {
    gains.validate()?;
    let a_target = steering(geom, target)?;
    let a_bs = steering(geom, gains.bs_angle)?;
    let hbar = a_target
        .iter()
        .zip(&a_bs)
        .map(|(g, h)| (gains.alpha * g) * (gains.beta * h).conj())
        .collect();
    Ok(EffectiveChannel { hbar })
}

/// Geometry plus gains: everything needed to produce `h̄(θ)` for any angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Channel {
    pub geometry: ArrayGeometry,
    pub gains: ChannelGains,
}

impl Channel {
    pub fn new(geometry: ArrayGeometry, gains: ChannelGains) -> Result<Self> {
        geometry.validate()?;
        gains.validate()?;
        steering(&geometry, gains.bs_angle)?;
        Ok(Channel { geometry, gains })
    }

    /// Unit gains, BS at broadside.
    pub fn unit(geometry: ArrayGeometry) -> Self {
        Channel {
            geometry,
            gains: ChannelGains::unit(&geometry),
        }
    }

    pub fn hbar(&self, angle: Angle) -> Result<Vec<Complex64>> {
        Ok(effective_channel(&self.geometry, &self.gains, angle)?.hbar)
    }

    pub fn hbar_grid(&self, angles: &[Angle]) -> Result<Vec<Vec<Complex64>>> {
        angles.iter().map(|&a| self.hbar(a)).collect()
    }

    /// Mean per-element power `|h̄_i|²`, equal to `|αβ|²/N²` for every angle.
    pub fn element_power(&self) -> f64 {
        let n = self.geometry.n_elements as f64;
        self.gains.coherent_power() / (n * n)
    }
}

/// Per-angle `|h̄(θ)ᴴ w|²` in linear units.
pub fn beam_power(channel: &Channel, weights: &[Complex64], grid: &[Angle]) -> Result<Vec<f64>> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "evaluation grid is empty"));
    }
    if weights.len() != channel.geometry.n_elements {
        return Err(Error::DimensionMismatch {
            expected: channel.geometry.n_elements,
            actual: weights.len(),
        });
    }
    grid.iter()
        .map(|&a| Ok(inner(&channel.hbar(a)?, weights).norm_sqr()))
        .collect()
}

pub fn to_db(power: f64) -> f64 {
    10.0 * power.log10()
}

/// Array factor of an `n`-element half-wavelength ULA steered with
/// inter-element phase `delta_phi` (radians), at `theta_deg`.
pub fn array_factor(n: usize, theta_deg: f64, delta_phi: f64) -> f64 {
    array_factor_spaced(n, 0.5, theta_deg, delta_phi)
}

pub fn array_factor_spaced(n: usize, spacing: f64, theta_deg: f64, delta_phi: f64) -> f64 {
    let u = PI * spacing * theta_deg.to_radians().sin() - delta_phi / 2.0;
    dirichlet(n, u)
}

/// `sin(n u) / (n sin u)`, with the removable singularities at `u = kπ`
/// evaluated by their Taylor expansion.
fn dirichlet(n: usize, u: f64) -> f64 {
    let nf = n as f64;
    let k = (u / PI).round();
    let delta = u - k * PI;
    if delta.abs() < 1e-5 {
        let sign = if ((k as i64) * (n as i64 - 1)).rem_euclid(2) == 0 {
            1.0
        } else {
            -1.0
        };
        let d2 = delta * delta;
        return sign * (1.0 - (nf * nf - 1.0) * d2 / 6.0);
    }
    (nf * u).sin() / (nf * u.sin())
}

/// Full width (degrees) of the broadside main lobe of an `n`-element
/// half-wavelength ULA at `drop_db` below the peak.
pub fn beamwidth(n: usize, drop_db: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::invalid("n", "beamwidth needs at least two elements"));
    }
    if !(drop_db > 0.0) {
        return Err(Error::invalid("drop_db", "power drop must be positive"));
    }
    let target = 10f64.powf(-drop_db / 20.0);
    // |AF| falls monotonically from 1 to 0 between broadside and the first null.
    let mut lo = 0.0;
    let mut hi = (2.0 / n as f64).asin().to_degrees();
    while hi - lo > 1e-7 {
        let mid = 0.5 * (lo + hi);
        if array_factor(n, mid, 0.0).abs() > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn assert_vec_eq(a: &[Complex64], b: &[Complex64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).norm() < tol, "{a:?} != {b:?}");
        }
    }

    #[test]
    fn ula_broadside_is_flat() {
        let g = ArrayGeometry::ula(4, 0.5).unwrap();
        let a = steering(&g, Angle::Linear(0.0)).unwrap();
        assert_vec_eq(&a, &[c(0.5, 0.0); 4], 1e-15);
    }

    #[test]
    fn ula_endfire_alternates() {
        let g = ArrayGeometry::ula(2, 0.5).unwrap();
        let a = steering(&g, Angle::Linear(90.0)).unwrap();
        let s = 1.0 / 2f64.sqrt();
        assert_vec_eq(&a, &[c(s, 0.0), c(-s, 0.0)], 1e-15);
    }

    #[test]
    fn upa_is_kronecker_with_z_fastest() {
        let g = ArrayGeometry::upa(2, 2, 0.5).unwrap();
        let a = steering(&g, Angle::Planar { el: 0.0, az: 30.0 }).unwrap();
        // psi = 0.5: the y factor is [1, j]/√2 and the z factor is [1, 1]/√2.
        assert_vec_eq(&a, &[c(0.5, 0.0), c(0.5, 0.0), c(0.0, 0.5), c(0.0, 0.5)], 1e-15);
    }

    #[test]
    fn rejects_bad_geometry_and_angles() {
        assert!(ArrayGeometry::ula(0, 0.5).is_err());
        assert!(ArrayGeometry::ula(4, 0.0).is_err());
        assert!(ArrayGeometry::upa(0, 3, 0.5).is_err());
        let g = ArrayGeometry::ula(4, 0.5).unwrap();
        assert!(steering(&g, Angle::Linear(91.0)).is_err());
        assert!(steering(&g, Angle::Planar { el: 0.0, az: 0.0 }).is_err());
    }

    #[test]
    fn effective_channel_examples() {
        let g1 = ArrayGeometry::ula(1, 0.5).unwrap();
        let h = effective_channel(&g1, &ChannelGains::default(), Angle::Linear(37.0)).unwrap();
        assert_vec_eq(&h.hbar, &[c(1.0, 0.0)], 1e-15);

        let g2 = ArrayGeometry::ula(2, 0.5).unwrap();
        let h = effective_channel(&g2, &ChannelGains::default(), Angle::Linear(0.0)).unwrap();
        assert_vec_eq(&h.hbar, &[c(0.5, 0.0), c(0.5, 0.0)], 1e-15);
        let h = effective_channel(&g2, &ChannelGains::default(), Angle::Linear(90.0)).unwrap();
        assert_vec_eq(&h.hbar, &[c(0.5, 0.0), c(-0.5, 0.0)], 1e-15);
    }

    #[test]
    fn effective_channel_matches_elementwise_definition() {
        let g = ArrayGeometry::ula(5, 0.5).unwrap();
        let gains = ChannelGains {
            alpha: c(0.3, -1.2),
            beta: c(-0.7, 0.4),
            bs_angle: Angle::Linear(12.0),
            noise_var: 1.0,
        };
        let h = effective_channel(&g, &gains, Angle::Linear(-23.0)).unwrap();
        let a_t = steering(&g, Angle::Linear(-23.0)).unwrap();
        let a_b = steering(&g, Angle::Linear(12.0)).unwrap();
        for i in 0..5 {
            let want = gains.alpha * gains.beta.conj() * a_t[i] * a_b[i].conj();
            assert!((h.hbar[i] - want).norm() < 1e-15);
        }
    }

    #[test]
    fn beam_power_examples() {
        let ch = Channel::unit(ArrayGeometry::ula(1, 0.5).unwrap());
        let p = beam_power(&ch, &[c(1.0, 0.0)], &[Angle::Linear(10.0)]).unwrap();
        assert_abs_diff_eq!(p[0], 1.0, epsilon = 1e-15);

        let ch = Channel::unit(ArrayGeometry::ula(2, 0.5).unwrap());
        let w = [c(1.0, 0.0), c(1.0, 0.0)];
        let p = beam_power(&ch, &w, &[Angle::Linear(90.0)]).unwrap();
        assert_abs_diff_eq!(p[0], 0.0, epsilon = 1e-15);
        assert!(beam_power(&ch, &[c(1.0, 0.0)], &[Angle::Linear(0.0)]).is_err());
        assert!(beam_power(&ch, &w, &[]).is_err());
    }

    #[test]
    fn coherent_combining_gives_n_squared_gain() {
        for n in [4usize, 16, 64] {
            let ch = Channel::unit(ArrayGeometry::ula(n, 0.5).unwrap());
            let h = ch.hbar(Angle::Linear(17.0)).unwrap();
            let w: Vec<_> = h.iter().map(|x| x / x.norm()).collect();
            let p = beam_power(&ch, &w, &[Angle::Linear(17.0)]).unwrap()[0];
            assert_abs_diff_eq!(p, 1.0, epsilon = 1e-12);
            assert_abs_diff_eq!(p / ch.element_power(), (n * n) as f64, epsilon = 1e-6);
        }
    }

    #[test]
    fn array_factor_values() {
        assert_eq!(array_factor(64, 0.0, 0.0), 1.0);
        // First null of N = 128 where (N π / 2) sin θ = π.
        let null = (2.0f64 / 128.0).asin().to_degrees();
        assert_abs_diff_eq!(null, 0.895, epsilon = 1e-3);
        assert_abs_diff_eq!(array_factor(128, null, 0.0), 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(array_factor(64, 0.8, 0.0).abs(), 0.5f64.sqrt(), epsilon = 0.01);
    }

    #[test]
    fn array_factor_singularity_limit() {
        // u = π: grating lobe of an even array has sign (-1)^(N-1).
        assert_eq!(array_factor_spaced(4, 1.0, 90.0, 0.0), -1.0);
        assert_eq!(array_factor_spaced(5, 1.0, 90.0, 0.0), 1.0);
        // Continuous across the expansion threshold.
        let near = array_factor(16, 0.0, 2.0 * 1.0001e-5);
        let far = array_factor(16, 0.0, 2.0 * 0.9999e-5);
        assert!((near - far).abs() < 1e-9);
    }

    #[test]
    fn beamwidth_table_rows() {
        assert_abs_diff_eq!(beamwidth(64, 3.0).unwrap(), 1.6, epsilon = 0.05);
        assert_abs_diff_eq!(beamwidth(128, 1.0).unwrap(), 0.4682, epsilon = 0.05);
        assert_abs_diff_eq!(beamwidth(256, 0.5).unwrap(), 0.166, epsilon = 0.05);
        assert!(beamwidth(1, 3.0).is_err());
    }

    #[test]
    fn snr_gains_round_trip() {
        let g = ChannelGains {
            noise_var: 2.0,
            ..Default::default()
        };
        let at = g.with_snr(64, -15.0);
        assert_abs_diff_eq!(at.snr_db(64), -15.0, epsilon = 1e-12);
        assert_abs_diff_eq!(at.coherent_power(), 64.0 * 2.0 * 10f64.powf(-1.5), epsilon = 1e-9);
        let ch = Channel::new(ArrayGeometry::ula(64, 0.5).unwrap(), at).unwrap();
        assert_abs_diff_eq!(64.0 * ch.element_power() / at.noise_var, 10f64.powf(-1.5), epsilon = 1e-12);
    }
}
