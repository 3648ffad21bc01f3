use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::mla::LensAddressMap;
use crate::constants::{MICRO, MILLI};
use crate::error::{Error, Result};
use crate::LensIndex;

/// Liquid-crystal intensity modulator followed by a polarizer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SlmSpec {
    pub n_cols: usize,
    pub n_rows: usize,
    /// Pixel pitch in metres.
    pub pixel_pitch: f64,
    /// Minimum relative transmission (inverse extinction contrast).
    pub t_floor: f64,
    /// Number of drive levels; levels are `0..t_levels`.
    pub t_levels: u32,
    /// Seconds.
    pub rise_time: f64,
    /// Seconds.
    pub fall_time: f64,
    /// Fraction of incident power leaving the modulator in the zeroth order
    /// at full transmission.
    pub absolute_throughput: f64,
}

impl Default for SlmSpec {
    fn default() -> Self {
        Self {
            n_cols: 1024,
            n_rows: 768,
            pixel_pitch: 19.0 * MICRO,
            t_floor: 1.0 / 270.0,
            t_levels: 256,
            rise_time: 60.0 * MILLI,
            fall_time: 10.0 * MILLI,
            absolute_throughput: 0.059,
        }
    }
}

impl SlmSpec {
    pub fn validate(&self) -> Result<()> {
        if self.n_cols == 0 || self.n_rows == 0 {
            return Err(Error::domain("slm.n_cols/n_rows", "pixel counts must be positive"));
        }
        if !(self.pixel_pitch > 0.0) {
            return Err(Error::domain("slm.pixel_pitch", "must be > 0"));
        }
        if !(self.t_floor > 0.0 && self.t_floor < 1.0) {
            return Err(Error::domain("slm.t_floor", "must lie in (0, 1)"));
        }
        if !(2..=256).contains(&self.t_levels) {
            return Err(Error::domain("slm.t_levels", "must lie in [2, 256] (8-bit drive)"));
        }
        if !(self.rise_time > 0.0 && self.fall_time > 0.0) {
            return Err(Error::domain("slm.rise_time/fall_time", "must be > 0"));
        }
        if !(self.absolute_throughput > 0.0 && self.absolute_throughput <= 1.0) {
            return Err(Error::domain("slm.absolute_throughput", "must lie in (0, 1]"));
        }
        Ok(())
    }

    /// Active area in square metres.
    pub fn active_area(&self) -> f64 {
        self.n_cols as f64 * self.n_rows as f64 * self.pixel_pitch * self.pixel_pitch
    }

    pub fn max_level(&self) -> u8 {
        (self.t_levels - 1) as u8
    }

    /// Slowest pixel response; the minimum spacing between mask changes.
    pub fn settle_time(&self) -> f64 {
        self.rise_time.max(self.fall_time)
    }
}

/// Relative transmission of a drive level: linear between `t_floor` and 1.
pub fn level_to_transmission(level: u32, slm: &SlmSpec) -> Result<f64> {
    if level >= slm.t_levels {
        return Err(Error::domain("level", format!("{level} outside [0, {}]", slm.t_levels - 1)));
    }
    let x = level as f64 / (slm.t_levels - 1) as f64;
    Ok(slm.t_floor + (1.0 - slm.t_floor) * x)
}

/// Per-pixel drive levels, row-major from the top-left pixel.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SlmMask {
    n_cols: usize,
    n_rows: usize,
    levels: Vec<u8>,
}

impl SlmMask {
    pub fn new(slm: &SlmSpec) -> Self {
        Self::filled(slm, 0)
    }

    pub fn filled(slm: &SlmSpec, level: u8) -> Self {
        Self { n_cols: slm.n_cols, n_rows: slm.n_rows, levels: vec![level; slm.n_cols * slm.n_rows] }
    }

    /// Builds a mask from raw levels, checking dimensions and range against `slm`.
    pub fn from_levels(slm: &SlmSpec, levels: Vec<u8>) -> Result<Self> {
        if levels.len() != slm.n_cols * slm.n_rows {
            return Err(Error::domain(
                "mask",
                format!("{} levels for a {}x{} modulator", levels.len(), slm.n_cols, slm.n_rows),
            ));
        }
        if let Some(&bad) = levels.iter().find(|&&l| u32::from(l) >= slm.t_levels) {
            return Err(Error::domain("mask", format!("level {bad} exceeds {}", slm.t_levels - 1)));
        }
        Ok(Self { n_cols: slm.n_cols, n_rows: slm.n_rows, levels })
    }

    pub fn n_cols(&self) -> usize {
        self.n_cols
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn levels(&self) -> &[u8] {
        &self.levels
    }

    pub fn get(&self, col: usize, row: usize) -> u8 {
        self.levels[row * self.n_cols + col]
    }

    pub fn set(&mut self, col: usize, row: usize, level: u8) {
        self.levels[row * self.n_cols + col] = level;
    }

    pub fn matches(&self, slm: &SlmSpec) -> bool {
        self.n_cols == slm.n_cols && self.n_rows == slm.n_rows
    }
}

/// Inscribes transmitting disks for `on_lenses` and `off_level` disks for the
/// remaining mapped lenses on a dark (level 0) background.
pub fn rasterize_pattern(
    on_lenses: &BTreeSet<LensIndex>,
    on_level: u8,
    off_level: u8,
    map: &LensAddressMap,
    slm: &SlmSpec,
) -> Result<SlmMask> {
    for level in [on_level, off_level] {
        level_to_transmission(u32::from(level), slm)?;
    }
    if let Some(&lens) = on_lenses.iter().find(|l| map.disk(**l).is_none()) {
        return Err(Error::Addressing { lens, reason: "lens is outside the mapped subset".into() });
    }
    let mut mask = SlmMask::new(slm);
    for disk in map.disks() {
        let level = if on_lenses.contains(&disk.lens) { on_level } else { off_level };
        for (col, row) in map.disk_pixels(disk.lens)? {
            mask.set(col, row, level);
        }
    }
    Ok(mask)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::optics::{build_address_map, MicrolensArraySpec};
    use crate::LensRect;

    #[test]
    fn defaults_have_quoted_active_area() {
        let slm = SlmSpec::default();
        slm.validate().unwrap();
        // 1024 x 19 um = 19.46 mm, 768 x 19 um = 14.59 mm
        let area_mm2 = slm.active_area() * 1e6;
        assert!((area_mm2 - 20.0 * 15.0).abs() / 300.0 < 0.06, "{area_mm2}");
    }

    #[test]
    fn transmission_endpoints() {
        let slm = SlmSpec::default();
        assert_eq!(level_to_transmission(255, &slm).unwrap(), 1.0);
        let t0 = level_to_transmission(0, &slm).unwrap();
        assert_eq!(t0, 1.0 / 270.0);
        assert!((t0 - 0.0037).abs() < 1e-4);
        assert!(matches!(level_to_transmission(256, &slm), Err(Error::Domain { .. })));
    }

    #[test]
    fn transmission_linear_midpoint_without_floor() {
        // validation requires t_floor > 0, the formula itself does not
        let slm = SlmSpec { t_floor: 0.0, ..SlmSpec::default() };
        let t = level_to_transmission(127, &slm).unwrap();
        assert!((t - 127.0 / 255.0).abs() < 1e-15);
        assert!((t - 0.498).abs() < 1e-3);
    }

    #[test]
    fn transmission_is_monotone() {
        let slm = SlmSpec::default();
        let t: Vec<f64> = (0..256).map(|l| level_to_transmission(l, &slm).unwrap()).collect();
        assert!(t.windows(2).all(|w| w[1] > w[0]));
    }

    #[test]
    fn invalid_specs_rejected() {
        assert!(SlmSpec { t_floor: 1.0, ..SlmSpec::default() }.validate().is_err());
        assert!(SlmSpec { t_levels: 1, ..SlmSpec::default() }.validate().is_err());
        assert!(SlmSpec { pixel_pitch: 0.0, ..SlmSpec::default() }.validate().is_err());
    }

    #[test]
    fn mask_from_levels_checks_shape_and_range() {
        let slm = SlmSpec { n_cols: 4, n_rows: 2, t_levels: 4, ..SlmSpec::default() };
        assert!(SlmMask::from_levels(&slm, vec![0; 7]).is_err());
        assert!(SlmMask::from_levels(&slm, vec![0, 1, 2, 3, 4, 0, 0, 0]).is_err());
        let m = SlmMask::from_levels(&slm, vec![0, 1, 2, 3, 3, 2, 1, 0]).unwrap();
        assert_eq!(m.get(3, 0), 3);
        assert_eq!(m.get(0, 1), 3);
    }

    #[test]
    fn empty_pattern_is_dark() {
        let slm = SlmSpec::default();
        let map = build_address_map(&slm, &MicrolensArraySpec::default(), 2.0, LensRect::new(24, 24, 3, 3)).unwrap();
        let mask = rasterize_pattern(&BTreeSet::new(), 255, 0, &map, &slm).unwrap();
        assert!(mask.levels().iter().all(|&l| l == 0));
    }

    #[test]
    fn unmapped_lens_rejected() {
        let slm = SlmSpec::default();
        let map = build_address_map(&slm, &MicrolensArraySpec::default(), 2.0, LensRect::new(24, 24, 3, 3)).unwrap();
        let on = BTreeSet::from([LensIndex::new(0, 0)]);
        let err = rasterize_pattern(&on, 255, 0, &map, &slm).unwrap_err();
        assert!(matches!(err, Error::Addressing { lens, .. } if lens == LensIndex::new(0, 0)));
    }

    #[test]
    fn single_disk_matches_brute_force() {
        let slm = SlmSpec::default();
        let map = build_address_map(&slm, &MicrolensArraySpec::default(), 2.0, LensRect::new(25, 25, 1, 1)).unwrap();
        let lens = LensIndex::new(25, 25);
        let mask = rasterize_pattern(&BTreeSet::from([lens]), 255, 0, &map, &slm).unwrap();
        let disk = map.disk(lens).unwrap();
        let [cx, cy] = map.absolute_center(disk);
        let r2 = disk.radius_px * disk.radius_px;
        let mut expected = 0;
        for row in 0..slm.n_rows {
            for col in 0..slm.n_cols {
                let dx = col as f64 + 0.5 - cx;
                let dy = row as f64 + 0.5 - cy;
                let inside = dx * dx + dy * dy <= r2;
                assert_eq!(mask.get(col, row) == 255, inside, "pixel ({col},{row})");
                expected += inside as usize;
            }
        }
        // disk of area 80 px on a square grid
        assert!((70..=90).contains(&expected), "{expected}");
    }
}
