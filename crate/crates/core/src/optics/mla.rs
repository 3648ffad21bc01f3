use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::slm::SlmSpec;
use crate::constants::{MICRO, MILLI};
use crate::error::{Error, Result};
use crate::{LensIndex, LensRect};

/// Number of modulator pixels covering one lens aperture.
pub const DEFAULT_DISK_AREA_PX: f64 = 80.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MicrolensArraySpec {
    pub n_x: usize,
    pub n_y: usize,
    /// Metres.
    pub pitch: f64,
    /// Metres.
    pub lens_diameter: f64,
    /// Metres.
    pub focal_length: f64,
}

impl Default for MicrolensArraySpec {
    fn default() -> Self {
        Self { n_x: 50, n_y: 50, pitch: 125.0 * MICRO, lens_diameter: 100.0 * MICRO, focal_length: 1.0 * MILLI }
    }
}

impl MicrolensArraySpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_x == 0 || self.n_y == 0 {
            return Err(Error::domain("mla.n_x/n_y", "lens counts must be positive"));
        }
        if !(self.pitch > 0.0 && self.lens_diameter > 0.0 && self.focal_length > 0.0) {
            return Err(Error::domain("mla", "pitch, diameter and focal length must be > 0"));
        }
        if self.lens_diameter > self.pitch {
            return Err(Error::domain("mla.lens_diameter", "must not exceed the pitch"));
        }
        Ok(())
    }

    pub fn grid(&self) -> LensRect {
        LensRect::new(0, 0, self.n_x, self.n_y)
    }

    /// Lens index sitting on the optical axis.
    pub fn axis_lens(&self) -> LensIndex {
        LensIndex::new(self.n_x / 2, self.n_y / 2)
    }

    /// Lens centre in the array plane, metres from the optical axis.
    pub fn lens_center(&self, idx: LensIndex) -> [f64; 2] {
        let axis = self.axis_lens();
        [
            (idx.i as f64 - axis.i as f64) * self.pitch,
            (idx.j as f64 - axis.j as f64) * self.pitch,
        ]
    }

    pub fn aperture_radius(&self) -> f64 {
        0.5 * self.lens_diameter
    }
}

/// Image of one lens aperture on the modulator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelDisk {
    pub lens: LensIndex,
    /// Pixel coordinates relative to the modulator's optical axis
    /// (x along columns, y along rows).
    pub center_px: [f64; 2],
    pub radius_px: f64,
}

/// Which modulator pixels illuminate which lens.
#[derive(Debug, Clone, PartialEq)]
pub struct LensAddressMap {
    slm: SlmSpec,
    mla: MicrolensArraySpec,
    relay_demag: f64,
    subset: LensRect,
    disks: Vec<PixelDisk>,
}

/// Maps every lens in `used_subset` to a pixel disk whose area equals
/// [`DEFAULT_DISK_AREA_PX`].
pub fn build_address_map(
    slm: &SlmSpec,
    mla: &MicrolensArraySpec,
    relay_demag: f64,
    used_subset: LensRect,
) -> Result<LensAddressMap> {
    build_address_map_with_area(slm, mla, relay_demag, used_subset, DEFAULT_DISK_AREA_PX)
}

pub(crate) fn build_address_map_with_area(
    slm: &SlmSpec,
    mla: &MicrolensArraySpec,
    relay_demag: f64,
    used_subset: LensRect,
    disk_area_px: f64,
) -> Result<LensAddressMap> {
    slm.validate()?;
    mla.validate()?;
    if !(relay_demag > 0.0) {
        return Err(Error::domain("relay_demag", "must be > 0"));
    }
    if !(disk_area_px > 0.0) {
        return Err(Error::domain("disk_area_px", "must be > 0"));
    }
    let grid = mla.grid();
    let radius_px = (disk_area_px / PI).sqrt();
    let spacing_px = mla.pitch * relay_demag / slm.pixel_pitch;
    if used_subset.len() > 1 && spacing_px < 2.0 * radius_px {
        return Err(Error::domain(
            "disk_area_px",
            format!("disks of radius {radius_px:.3} px overlap at a lens spacing of {spacing_px:.3} px"),
        ));
    }
    let half = [slm.n_cols as f64 / 2.0, slm.n_rows as f64 / 2.0];
    let mut disks = Vec::with_capacity(used_subset.len());
    for lens in used_subset.iter() {
        if !grid.contains(lens) {
            return Err(Error::Addressing { lens, reason: "outside the microlens array".into() });
        }
        let c = mla.lens_center(lens);
        let center_px = [c[0] * relay_demag / slm.pixel_pitch, c[1] * relay_demag / slm.pixel_pitch];
        let inside = (0..2).all(|k| {
            let abs = center_px[k] + half[k];
            abs - radius_px >= 0.0 && abs + radius_px <= 2.0 * half[k]
        });
        if !inside {
            return Err(Error::Addressing {
                lens,
                reason: format!(
                    "pixel disk at ({:.2}, {:.2}) px leaves the {}x{} modulator",
                    center_px[0], center_px[1], slm.n_cols, slm.n_rows
                ),
            });
        }
        disks.push(PixelDisk { lens, center_px, radius_px });
    }
    Ok(LensAddressMap { slm: slm.clone(), mla: mla.clone(), relay_demag, subset: used_subset, disks })
}

impl LensAddressMap {
    pub fn slm(&self) -> &SlmSpec {
        &self.slm
    }

    pub fn mla(&self) -> &MicrolensArraySpec {
        &self.mla
    }

    pub fn relay_demag(&self) -> f64 {
        self.relay_demag
    }

    pub fn subset(&self) -> LensRect {
        self.subset
    }

    pub fn disks(&self) -> &[PixelDisk] {
        &self.disks
    }

    pub fn disk(&self, lens: LensIndex) -> Option<&PixelDisk> {
        if !self.subset.contains(lens) {
            return None;
        }
        let k = (lens.j - self.subset.j0) * self.subset.n_i + (lens.i - self.subset.i0);
        self.disks.get(k)
    }

    /// Disk centre in absolute pixel coordinates, where pixel `(c, r)`
    /// spans `[c, c+1) x [r, r+1)`.
    pub fn absolute_center(&self, disk: &PixelDisk) -> [f64; 2] {
        [
            disk.center_px[0] + self.slm.n_cols as f64 / 2.0,
            disk.center_px[1] + self.slm.n_rows as f64 / 2.0,
        ]
    }

    /// `(col, row)` of every pixel whose centre lies inside the lens's disk.
    pub fn disk_pixels(&self, lens: LensIndex) -> Result<Vec<(usize, usize)>> {
        let disk = self
            .disk(lens)
            .ok_or_else(|| Error::Addressing { lens, reason: "lens is outside the mapped subset".into() })?;
        let [cx, cy] = self.absolute_center(disk);
        let r = disk.radius_px;
        let r2 = r * r;
        let col_lo = (cx - r - 1.0).floor().max(0.0) as usize;
        let col_hi = ((cx + r + 1.0).ceil() as usize).min(self.slm.n_cols);
        let row_lo = (cy - r - 1.0).floor().max(0.0) as usize;
        let row_hi = ((cy + r + 1.0).ceil() as usize).min(self.slm.n_rows);
        let mut out = Vec::new();
        for row in row_lo..row_hi {
            let dy = row as f64 + 0.5 - cy;
            for col in col_lo..col_hi {
                let dx = col as f64 + 0.5 - cx;
                if dx * dx + dy * dy <= r2 {
                    out.push((col, row));
                }
            }
        }
        Ok(out)
    }
}
