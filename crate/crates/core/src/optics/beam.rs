use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::mla::LensAddressMap;
use super::quadrature::gauss_legendre;
use super::slm::{level_to_transmission, SlmMask};
use crate::constants::{MICRO, MILLI, NANO};
use crate::error::{Error, Result};
use crate::LensIndex;

const QUADRATURE_NODES: usize = 64;

/// Collimated Gaussian beam illuminating the microlens array.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IlluminationBeam {
    /// Watts.
    pub power: f64,
    /// 1/e^2 intensity radius, metres.
    pub waist_radius: f64,
    /// Offset of the beam axis from the optical axis in the array plane, metres.
    pub center: [f64; 2],
    /// Vacuum wavelength of the trap light, metres.
    pub wavelength: f64,
}

impl Default for IlluminationBeam {
    fn default() -> Self {
        Self { power: 137.0 * MILLI, waist_radius: 700.0 * MICRO, center: [0.0, 0.0], wavelength: 815.0 * NANO }
    }
}

impl IlluminationBeam {
    pub fn validate(&self) -> Result<()> {
        if !(self.power >= 0.0) {
            return Err(Error::domain("beam.power", "must be >= 0"));
        }
        if !(self.waist_radius > 0.0) {
            return Err(Error::domain("beam.waist_radius", "must be > 0"));
        }
        if !(self.wavelength > 0.0) {
            return Err(Error::domain("beam.wavelength", "must be > 0"));
        }
        Ok(())
    }
}

/// Fraction of a Gaussian beam's power (waist `w`) falling into a disk of
/// radius `a` whose centre is `offset` away from the beam axis.
pub fn aperture_fraction(offset: f64, a: f64, w: f64) -> f64 {
    if offset == 0.0 {
        -(-2.0 * a * a / (w * w)).exp_m1()
    } else {
        aperture_fraction_quadrature(offset, a, w)
    }
}

/// Fixed-order Gauss-Legendre quadrature of the displaced aperture integral
/// in polar coordinates about the disk centre.
pub fn aperture_fraction_quadrature(offset: f64, a: f64, w: f64) -> f64 {
    let (x, wt) = gauss_legendre(QUADRATURE_NODES);
    let norm = 2.0 / (PI * w * w);
    let inv_w2 = 2.0 / (w * w);
    let mut sum = 0.0;
    for (&xr, &wr) in x.iter().zip(&wt) {
        let r = 0.5 * a * (xr + 1.0);
        let mut ang = 0.0;
        // integrand is even in theta; integrate [0, pi] and double
        for (&xt, &wt_) in x.iter().zip(&wt) {
            let th = 0.5 * PI * (xt + 1.0);
            let d2 = r * r + offset * offset - 2.0 * r * offset * th.cos();
            ang += wt_ * (-inv_w2 * d2).exp();
        }
        sum += wr * r * ang * 0.5 * PI;
    }
    2.0 * norm * sum * 0.5 * a
}

/// Mean relative transmission over the pixels of a lens's disk.
pub fn disk_transmission(mask: &SlmMask, map: &LensAddressMap, lens: LensIndex) -> Result<f64> {
    let pixels = map.disk_pixels(lens)?;
    if pixels.is_empty() {
        return Err(Error::Addressing { lens, reason: "pixel disk contains no pixel centres".into() });
    }
    let mut table = [0.0; 256];
    for (level, t) in table.iter_mut().enumerate().take(map.slm().t_levels as usize) {
        *t = level_to_transmission(level as u32, map.slm())?;
    }
    let sum: f64 = pixels.iter().map(|&(c, r)| table[mask.get(c, r) as usize]).sum();
    Ok(sum / pixels.len() as f64)
}

/// Power entering `lens`: the Gaussian intensity integrated over the lens
/// aperture, times the mean transmission of its modulator disk.
///
/// Returns `(power in watts, mean relative transmission)`.
pub fn lens_input_power(
    mask: &SlmMask,
    beam: &IlluminationBeam,
    map: &LensAddressMap,
    lens: LensIndex,
) -> Result<(f64, f64)> {
    beam.validate()?;
    if !mask.matches(map.slm()) {
        return Err(Error::domain("mask", "dimensions differ from the modulator"));
    }
    let t = disk_transmission(mask, map, lens)?;
    let c = map.mla().lens_center(lens);
    let offset = (c[0] - beam.center[0]).hypot(c[1] - beam.center[1]);
    let frac = aperture_fraction(offset, map.mla().aperture_radius(), beam.waist_radius);
    Ok((beam.power * frac * t, t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{build_address_map, MicrolensArraySpec, SlmSpec};
    use crate::LensRect;

    /// Cartesian midpoint rule over the aperture; independent of the polar rule.
    fn midpoint_oracle(offset: f64, a: f64, w: f64, n: usize) -> f64 {
        let h = 2.0 * a / n as f64;
        let mut s = 0.0;
        for iy in 0..n {
            let y = -a + (iy as f64 + 0.5) * h;
            for ix in 0..n {
                let x = -a + (ix as f64 + 0.5) * h;
                if x * x + y * y <= a * a {
                    let d2 = (x + offset) * (x + offset) + y * y;
                    s += (-2.0 * d2 / (w * w)).exp();
                }
            }
        }
        s * h * h * 2.0 / (PI * w * w)
    }

    #[test]
    fn centred_closed_form_matches_quadrature() {
        for (a, w) in [(50e-6, 700e-6), (50e-6, 60e-6), (1.0, 0.3)] {
            let cf = aperture_fraction(0.0, a, w);
            let q = aperture_fraction_quadrature(0.0, a, w);
            assert!(((cf - q) / cf).abs() < 1e-6, "a={a} w={w} cf={cf} q={q}");
        }
    }

    #[test]
    fn displaced_quadrature_matches_midpoint_oracle() {
        let (a, w) = (50e-6, 700e-6);
        for d in [125e-6, 250e-6, 1000e-6] {
            let q = aperture_fraction_quadrature(d, a, w);
            let o = midpoint_oracle(d, a, w, 2000);
            assert!(((q - o) / o).abs() < 2e-4, "d={d}: {q} vs {o}");
        }
    }

    #[test]
    fn centre_and_neighbour_powers() {
        let slm = SlmSpec::default();
        let map = build_address_map(&slm, &MicrolensArraySpec::default(), 2.0, LensRect::new(24, 24, 3, 3)).unwrap();
        let mask = SlmMask::filled(&slm, 255);
        let beam = IlluminationBeam::default();
        let (p0, t0) = lens_input_power(&mask, &beam, &map, LensIndex::new(25, 25)).unwrap();
        assert_eq!(t0, 1.0);
        let closed = 137e-3 * (1.0 - (-2.0 * 50f64.powi(2) / 700f64.powi(2)).exp());
        assert!((p0 - closed).abs() < 1e-15);
        assert!((p0 * 1e3 - 1.39).abs() < 0.005, "{p0}");

        let (p1, _) = lens_input_power(&mask, &beam, &map, LensIndex::new(26, 25)).unwrap();
        let oracle = 137e-3 * midpoint_oracle(125e-6, 50e-6, 700e-6, 2000);
        assert!(((p1 - oracle) / oracle).abs() < 2e-4);
        assert!((p1 * 1e3 - 1.30).abs() < 0.01, "{p1}");
    }

    #[test]
    fn dark_mask_gives_floor_contrast() {
        let slm = SlmSpec::default();
        let map = build_address_map(&slm, &MicrolensArraySpec::default(), 2.0, LensRect::new(25, 25, 1, 1)).unwrap();
        let beam = IlluminationBeam::default();
        let lens = LensIndex::new(25, 25);
        let (bright, _) = lens_input_power(&SlmMask::filled(&slm, 255), &beam, &map, lens).unwrap();
        let (dark, _) = lens_input_power(&SlmMask::new(&slm), &beam, &map, lens).unwrap();
        assert!((dark / bright - 1.0 / 270.0).abs() < 1e-15);
        assert!((dark * 1e6 - 5.2).abs() < 0.05, "{dark}");
    }
}
