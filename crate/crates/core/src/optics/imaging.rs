use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::mla::MicrolensArraySpec;
use crate::constants::{MICRO, MILLI};
use crate::error::{Error, Result};
use crate::LensIndex;

/// Relay telescope that re-images the microlens focal plane into the cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImagingTrainSpec {
    /// Metres.
    pub f_relay: f64,
    /// Metres.
    pub f_objective: f64,
    pub numerical_aperture: f64,
    /// Power transfer from lens aperture to trap plane. The default is
    /// calibrated so that the 137 mW illumination yields 1.23 mW in the
    /// central trap.
    pub throughput: f64,
}

impl Default for ImagingTrainSpec {
    fn default() -> Self {
        Self { f_relay: 80.0 * MILLI, f_objective: 35.5 * MILLI, numerical_aperture: 0.29, throughput: 0.885 }
    }
}

impl ImagingTrainSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.f_relay > 0.0 && self.f_objective > 0.0) {
            return Err(Error::domain("imaging.f_relay/f_objective", "must be > 0"));
        }
        if !(self.numerical_aperture > 0.0 && self.numerical_aperture < 1.0) {
            return Err(Error::domain("imaging.numerical_aperture", "must lie in (0, 1)"));
        }
        if !(self.throughput > 0.0 && self.throughput <= 1.0) {
            return Err(Error::domain("imaging.throughput", "must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn demagnification(&self) -> f64 {
        self.f_relay / self.f_objective
    }
}

/// One focal spot acting as a dipole trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrapSite {
    pub lens: LensIndex,
    /// Metres in the trap plane.
    pub position: [f64; 2],
    /// Watts.
    pub power: f64,
    /// 1/e^2 radius, metres.
    pub waist: f64,
    pub relative_transmission: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrapSiteArray {
    /// Site-to-site spacing in the trap plane, metres.
    pub pitch: f64,
    pub sites: Vec<TrapSite>,
}

impl TrapSiteArray {
    pub fn get(&self, lens: LensIndex) -> Option<&TrapSite> {
        self.sites.iter().find(|s| s.lens == lens)
    }
}

/// Power delivered to a lens together with its disk transmission.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LensPower {
    pub lens: LensIndex,
    pub power: f64,
    pub relative_transmission: f64,
}

pub fn project_focal_array(
    lens_powers: &[LensPower],
    imaging: &ImagingTrainSpec,
    mla: &MicrolensArraySpec,
    waist: f64,
) -> Result<TrapSiteArray> {
    imaging.validate()?;
    if !(waist > 0.0) {
        return Err(Error::domain("waist", "must be > 0"));
    }
    let demag = imaging.demagnification();
    let sites = lens_powers
        .iter()
        .map(|lp| {
            let c = mla.lens_center(lp.lens);
            TrapSite {
                lens: lp.lens,
                position: [c[0] / demag, c[1] / demag],
                power: lp.power * imaging.throughput,
                waist,
                relative_transmission: lp.relative_transmission,
            }
        })
        .collect();
    Ok(TrapSiteArray { pitch: mla.pitch / demag, sites })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiffractionLimits {
    /// Smallest resolvable structure, `lambda / (2 NA)`.
    pub min_structure: f64,
    /// Gaussian waist of a focus filling the aperture, `lambda / (pi NA)`.
    pub min_waist: f64,
}

pub fn diffraction_limits(wavelength: f64, na: f64) -> Result<DiffractionLimits> {
    if !(na > 0.0 && na < 1.0) {
        return Err(Error::domain("numerical_aperture", "must lie in (0, 1)"));
    }
    if !(wavelength > 0.0) {
        return Err(Error::domain("wavelength", "must be > 0"));
    }
    Ok(DiffractionLimits { min_structure: wavelength / (2.0 * na), min_waist: wavelength / (PI * na) })
}

/// Default measured focal waist.
pub const DEFAULT_WAIST: f64 = 3.7 * MICRO;
