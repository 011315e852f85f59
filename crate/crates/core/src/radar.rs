//! Doppler-style velocity readings from emitted/reflected frequency pairs.
//!
//! The measurement model is `v = k * (f_r - f_o) / f_o`: a dimensionless
//! frequency shift scaled into speed units by the calibration factor `k`.
//! The simulation inverse `f_r = f_o * (1 + v/k)` is exact by construction,
//! so a noise-free reflect/measure round trip recovers the true speed up to
//! floating-point rounding.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// One radar measurement: the frequency we emitted and the one that came back.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrequencyPair {
    /// Emitted frequency (hertz, must be positive).
    pub f_o: f64,
    /// Reflected frequency (hertz).
    pub f_r: f64,
}

/// Speed in paper units (km/h-equivalent).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Velocity(pub f64);

/// Change between two velocity readings, same units as [`Velocity`].
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct VelocityDelta(pub f64);

/// Scale factor and measurement-noise model for one radar unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadarCalibration {
    /// Frequency-ratio-to-speed scale factor (dimensionless shift times `k`).
    pub k: f64,
    /// Standard deviation of additive Gaussian noise on the reflected
    /// frequency, in hertz. Zero disables noise.
    pub noise_sigma: f64,
}

impl Default for RadarCalibration {
    fn default() -> Self {
        Self { k: 1.0, noise_sigma: 0.0 }
    }
}

impl RadarCalibration {
    pub fn new(k: f64, noise_sigma: f64) -> Result<Self> {
        let cal = Self { k, noise_sigma };
        cal.validate()?;
        Ok(cal)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.k.is_finite() || self.k <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "calibration factor k must be positive and finite, got {}",
                self.k
            )));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "noise sigma must be non-negative and finite, got {}",
                self.noise_sigma
            )));
        }
        Ok(())
    }
}

/// Speed from one frequency pair: `k * (f_r - f_o) / f_o`.
pub fn doppler_velocity(reading: FrequencyPair, cal: &RadarCalibration) -> Result<Velocity> {
    cal.validate()?;
    if !reading.f_o.is_finite() || reading.f_o <= 0.0 {
        return Err(Error::InvalidReading(format!(
            "emitted frequency must be positive and finite, got {}",
            reading.f_o
        )));
    }
    if !reading.f_r.is_finite() {
        return Err(Error::InvalidReading(format!(
            "reflected frequency must be finite, got {}",
            reading.f_r
        )));
    }
    Ok(Velocity(cal.k * (reading.f_r - reading.f_o) / reading.f_o))
}

/// Velocity change between two readings: `v2 - v1`.
pub fn velocity_delta(v1: Velocity, v2: Velocity) -> VelocityDelta {
    debug_assert!(v1.0.is_finite() && v2.0.is_finite());
    VelocityDelta(v2.0 - v1.0)
}

/// Simulate the reflected frequency for a target moving at `true_velocity`:
/// `f_r = f_o * (1 + v/k) + noise`. With `noise_sigma == 0` no rng draw is
/// consumed and the measurement round trip is exact.
pub fn reflect_frequency(
    true_velocity: Velocity,
    f_o: f64,
    cal: &RadarCalibration,
    rng: &mut SplitMix64,
) -> Result<FrequencyPair> {
    cal.validate()?;
    if !f_o.is_finite() || f_o <= 0.0 {
        return Err(Error::InvalidParameter(format!(
            "emitted frequency must be positive and finite, got {f_o}"
        )));
    }
    if !true_velocity.0.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "true velocity must be finite, got {}",
            true_velocity.0
        )));
    }
    let noise = if cal.noise_sigma > 0.0 {
        rng.gaussian(0.0, cal.noise_sigma)
    } else {
        0.0
    };
    Ok(FrequencyPair { f_o, f_r: f_o * (1.0 + true_velocity.0 / cal.k) + noise })
}
