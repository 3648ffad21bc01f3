//! Dipole-trap depth, harmonic frequencies, and the differential light shift
//! that sets the inhomogeneous dephasing time of a thermal ensemble.
//!
//! Depths use the rotating-wave two-level-per-line form with D2 and D1 line
//! strengths weighted 2/3 and 1/3 and a single shared natural linewidth.
//! The clock transition picks up a differential shift proportional to the
//! depth, scaled by the ratio of hyperfine splitting to effective detuning.
//!
//! A thermal atom of total energy `E` in a 3-D harmonic trap samples on
//! average a fraction `1 - kappa E / U` of the peak intensity, so its clock
//! detuning is `delta0 (1 - kappa E / U)`. With the thermal energy density
//! `rho(E) ~ E^2 exp(-E / k_B T)` the Ramsey contrast decays as
//! `[1 + (t / tau)^2]^(-3/2)` with `tau = U / (kappa delta0 k_B T)`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{C, HBAR, K_B, MICRO, NANO};
use crate::error::{Error, Result};

/// Minimum separation from either resonance line, in linewidths.
const MIN_DETUNING_LINEWIDTHS: f64 = 100.0;

/// Default kinetic-energy-to-depth sampling factor.
pub const DEFAULT_KAPPA: f64 = 0.5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AtomSpecies {
    /// kg.
    pub mass: f64,
    /// Metres.
    pub d1_wavelength: f64,
    /// Metres.
    pub d2_wavelength: f64,
    /// Natural linewidth, rad/s (shared by both lines).
    pub linewidth: f64,
    /// W/m^2.
    pub saturation_intensity: f64,
    /// Ground-state hyperfine splitting, rad/s.
    pub hyperfine_splitting: f64,
}

impl AtomSpecies {
    pub fn rubidium_85() -> Self {
        Self {
            mass: 1.4100e-25,
            d1_wavelength: 794.98 * NANO,
            d2_wavelength: 780.24 * NANO,
            linewidth: 2.0 * PI * 6.07e6,
            saturation_intensity: 16.7,
            hyperfine_splitting: 2.0 * PI * 3.036e9,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let all_positive = [
            self.mass,
            self.d1_wavelength,
            self.d2_wavelength,
            self.linewidth,
            self.saturation_intensity,
            self.hyperfine_splitting,
        ]
        .iter()
        .all(|&v| v > 0.0);
        if !all_positive {
            return Err(Error::domain("species", "all constants must be > 0"));
        }
        if self.d1_wavelength <= self.d2_wavelength {
            return Err(Error::domain("species", "D1 wavelength must exceed D2 wavelength"));
        }
        Ok(())
    }

    /// Angular detunings `(D2, D1)` of light at `wavelength`.
    fn detunings(&self, wavelength: f64) -> (f64, f64) {
        let d = |line: f64| 2.0 * PI * C * (1.0 / wavelength - 1.0 / line);
        (d(self.d2_wavelength), d(self.d1_wavelength))
    }

    /// Line-strength-weighted inverse detuning, rad^-1 s, after checking
    /// the light is red of both lines and far from resonance.
    fn weighted_inverse_detuning(&self, wavelength: f64) -> Result<f64> {
        self.validate()?;
        if !(wavelength > 0.0) {
            return Err(Error::domain("wavelength", "must be > 0"));
        }
        let (d2, d1) = self.detunings(wavelength);
        let guard = MIN_DETUNING_LINEWIDTHS * self.linewidth;
        if d1 >= 0.0 || d2 >= 0.0 {
            return Err(Error::ModelValidity(format!(
                "{:.2} nm is not red-detuned from both D lines",
                wavelength / NANO
            )));
        }
        if d1.abs() < guard || d2.abs() < guard {
            return Err(Error::ModelValidity(format!(
                "{:.3} nm lies within {MIN_DETUNING_LINEWIDTHS} linewidths of a D line",
                wavelength / NANO
            )));
        }
        Ok((2.0 / 3.0) / d2.abs() + (1.0 / 3.0) / d1.abs())
    }
}

/// Derived single-site trap quantities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapParameters {
    /// Joules.
    pub depth: f64,
    /// rad/s.
    pub radial_frequency: f64,
    /// rad/s.
    pub axial_frequency: f64,
    /// Differential light shift at the trap bottom, rad/s.
    pub differential_shift: f64,
    /// Seconds; infinite for a zero-temperature ensemble or an empty trap.
    pub dephasing_tau: f64,
}

impl TrapParameters {
    pub fn depth_microkelvin(&self) -> f64 {
        self.depth / K_B / MICRO
    }
}

/// Peak depth of the attractive potential, joules.
pub fn dipole_depth(power: f64, waist: f64, wavelength: f64, species: &AtomSpecies) -> Result<f64> {
    if !(power >= 0.0) {
        return Err(Error::domain("power", "must be >= 0"));
    }
    if !(waist > 0.0) {
        return Err(Error::domain("waist", "must be > 0"));
    }
    let inv_det = species.weighted_inverse_detuning(wavelength)?;
    let peak_intensity = 2.0 * power / (PI * waist * waist);
    let g = species.linewidth;
    Ok(HBAR * g * g / 8.0 * (peak_intensity / species.saturation_intensity) * inv_det)
}

pub fn rayleigh_range(waist: f64, wavelength: f64) -> f64 {
    PI * waist * waist / wavelength
}

/// Harmonic `(radial, axial)` angular frequencies at the trap bottom.
pub fn trap_frequencies(depth: f64, waist: f64, wavelength: f64, species: &AtomSpecies) -> Result<(f64, f64)> {
    if !(depth >= 0.0) {
        return Err(Error::domain("depth", "must be >= 0"));
    }
    if !(waist > 0.0 && wavelength > 0.0) {
        return Err(Error::domain("waist/wavelength", "must be > 0"));
    }
    let z_r = rayleigh_range(waist, wavelength);
    let radial = (4.0 * depth / (species.mass * waist * waist)).sqrt();
    let axial = (2.0 * depth / (species.mass * z_r * z_r)).sqrt();
    Ok((radial, axial))
}

/// Differential light shift of the clock transition at the trap bottom, rad/s.
pub fn differential_shift(depth: f64, wavelength: f64, species: &AtomSpecies) -> Result<f64> {
    if !(depth >= 0.0) {
        return Err(Error::domain("depth", "must be >= 0"));
    }
    // weights sum to one, so the weighted inverse detuning is 1/Delta_eff
    let inv_det = species.weighted_inverse_detuning(wavelength)?;
    Ok(depth / HBAR * species.hyperfine_splitting * inv_det)
}

/// Inhomogeneous dephasing time `U / (kappa delta0 k_B T)`.
pub fn dephasing_tau(depth: f64, temperature: f64, delta0: f64, kappa: f64) -> Result<f64> {
    if !(depth > 0.0) {
        return Err(Error::domain("depth", "must be > 0"));
    }
    if !(temperature >= 0.0) {
        return Err(Error::domain("temperature", "must be >= 0"));
    }
    if !(delta0 >= 0.0) {
        return Err(Error::domain("delta0", "must be >= 0"));
    }
    if !(kappa > 0.0 && kappa <= 1.0) {
        return Err(Error::domain("kappa", "must lie in (0, 1]"));
    }
    let rate = kappa * delta0 * K_B * temperature;
    if rate == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(depth / rate)
}

/// Ramsey contrast envelope `[1 + (t/tau)^2]^(-3/2)`.
pub fn ramsey_envelope(t: f64, tau: f64) -> f64 {
    if tau.is_infinite() {
        return 1.0;
    }
    let x = t / tau;
    (1.0 + x * x).powf(-1.5)
}

/// Default ensemble temperature: one tenth of the depth, kelvin.
pub fn default_temperature(depth: f64) -> f64 {
    depth / (10.0 * K_B)
}

/// All trap quantities for one site. `temperature` defaults to a tenth of
/// the depth when `None`.
pub fn trap_parameters(
    power: f64,
    waist: f64,
    wavelength: f64,
    species: &AtomSpecies,
    temperature: Option<f64>,
    kappa: f64,
) -> Result<TrapParameters> {
    let depth = dipole_depth(power, waist, wavelength, species)?;
    let (radial_frequency, axial_frequency) = trap_frequencies(depth, waist, wavelength, species)?;
    let differential_shift = differential_shift(depth, wavelength, species)?;
    let dephasing_tau = if depth > 0.0 {
        let t = temperature.unwrap_or_else(|| default_temperature(depth));
        dephasing_tau(depth, t, differential_shift, kappa)?
    } else {
        f64::INFINITY
    };
    Ok(TrapParameters { depth, radial_frequency, axial_frequency, differential_shift, dephasing_tau })
}
