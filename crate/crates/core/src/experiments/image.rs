use rand_distr::{Distribution, Poisson};

use crate::constants::MICRO;
use crate::error::{Error, Result};
use crate::optics::TrapSiteArray;
use crate::spin::rng::{stream, StreamPurpose};
use crate::spin::NoiseModel;
use crate::LensIndex;

/// Camera and blob model for synthetic fluorescence frames.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ImageParams {
    /// Trap-plane length of one pixel, metres.
    pub pixel_size: f64,
    /// Blob standard deviation in units of the focal waist.
    pub sigma_factor: f64,
    /// Border around the outermost sites, in blob standard deviations.
    pub margin_sigmas: f64,
    /// Mean background counts per pixel and frame.
    pub background: f64,
    /// Peak counts per atom in `|0>` and frame.
    pub counts_per_atom: f64,
}

impl Default for ImageParams {
    fn default() -> Self {
        Self { pixel_size: 1.0 * MICRO, sigma_factor: 1.5, margin_sigmas: 4.0, background: 20.0, counts_per_atom: 2.0 }
    }
}

/// Grayscale intensity image in counts per pixel, row-major from the top-left.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageGray {
    pub width: usize,
    pub height: usize,
    /// Metres per pixel.
    pub pixel_size: f64,
    /// Trap-plane position of the centre of pixel (0, 0), metres.
    pub origin: [f64; 2],
    /// Blob standard deviation, metres.
    pub blob_sigma: f64,
    pub data: Vec<f64>,
}

impl ImageGray {
    pub fn get(&self, col: usize, row: usize) -> f64 {
        self.data[row * self.width + col]
    }

    /// Pixel nearest to a trap-plane position.
    pub fn pixel_of(&self, position: [f64; 2]) -> (usize, usize) {
        let c = ((position[0] - self.origin[0]) / self.pixel_size).round();
        let r = ((position[1] - self.origin[1]) / self.pixel_size).round();
        (c.clamp(0.0, (self.width - 1) as f64) as usize, r.clamp(0.0, (self.height - 1) as f64) as usize)
    }

    /// Linear map of `[0, max]` onto 0..=255.
    pub fn to_levels(&self) -> Vec<u8> {
        let max = self.data.iter().cloned().fold(0.0, f64::max);
        if max <= 0.0 {
            return vec![0; self.data.len()];
        }
        self.data.iter().map(|&v| (255.0 * v.max(0.0) / max).round() as u8).collect()
    }
}

/// Sum of Gaussian blobs at the trap sites over a uniform background.
///
/// With noise enabled each frame draws Poisson counts per pixel and the
/// result is the mean of `averages` frames; otherwise the expected image is
/// returned.
pub fn synth_fluorescence_image(
    sites: &TrapSiteArray,
    populations: &[(LensIndex, f64)],
    noise: &NoiseModel,
    averages: usize,
    params: &ImageParams,
) -> Result<ImageGray> {
    if averages < 1 {
        return Err(Error::domain("image.averages", "must be >= 1"));
    }
    if !(params.pixel_size > 0.0 && params.sigma_factor > 0.0 && params.background >= 0.0 && params.counts_per_atom >= 0.0)
    {
        return Err(Error::domain("image", "pixel size and blob width must be > 0, counts >= 0"));
    }
    if let Some((l, p)) = populations.iter().find(|(_, p)| !(0.0..=1.0).contains(p)) {
        return Err(Error::Domain { name: "image.population", constraint: format!("{p} at {l} outside [0, 1]") });
    }
    if sites.sites.is_empty() {
        return Err(Error::EmptySelection("no trap sites to image".into()));
    }
    let waist = sites.sites.iter().map(|s| s.waist).fold(0.0, f64::max);
    let sigma = params.sigma_factor * waist;
    let margin = params.margin_sigmas * sigma;
    let (mut lo, mut hi) = ([f64::MAX; 2], [f64::MIN; 2]);
    for s in &sites.sites {
        for k in 0..2 {
            lo[k] = lo[k].min(s.position[k] - margin);
            hi[k] = hi[k].max(s.position[k] + margin);
        }
    }
    let width = ((hi[0] - lo[0]) / params.pixel_size).ceil() as usize + 1;
    let height = ((hi[1] - lo[1]) / params.pixel_size).ceil() as usize + 1;
    if width > i32::MAX as usize || height > i32::MAX as usize || width.saturating_mul(height) > i32::MAX as usize {
        return Err(Error::Size { width, height });
    }

    let mean_atoms = 0.5 * (noise.atoms_per_site.min + noise.atoms_per_site.max) as f64;
    let blobs: Vec<([f64; 2], f64)> = sites
        .sites
        .iter()
        .map(|s| {
            let pop = populations.iter().find(|(l, _)| *l == s.lens).map_or(0.0, |&(_, p)| p);
            let atoms = if noise.enabled {
                noise.draw_atom_count(&mut stream(noise.rng_seed, StreamPurpose::AtomCount, s.lens, 0, 0)) as f64
            } else {
                mean_atoms
            };
            (s.position, params.counts_per_atom * atoms * pop)
        })
        .collect();

    let inv = 1.0 / (2.0 * sigma * sigma);
    let mut expected = vec![params.background; width * height];
    for r in 0..height {
        let y = lo[1] + r as f64 * params.pixel_size;
        for c in 0..width {
            let x = lo[0] + c as f64 * params.pixel_size;
            for &(p, amp) in &blobs {
                if amp > 0.0 {
                    let d2 = (x - p[0]).powi(2) + (y - p[1]).powi(2);
                    expected[r * width + c] += amp * (-d2 * inv).exp();
                }
            }
        }
    }

    let data = if noise.enabled {
        let mut acc = vec![0.0; width * height];
        for frame in 0..averages {
            let mut rng = stream(noise.rng_seed, StreamPurpose::Image, LensIndex::new(0, 0), 0, frame);
            for (a, &mu) in acc.iter_mut().zip(&expected) {
                if mu > 0.0 {
                    *a += Poisson::new(mu).expect("positive mean").sample(&mut rng);
                }
            }
        }
        acc.iter().map(|a| a / averages as f64).collect()
    } else {
        expected
    };
    Ok(ImageGray { width, height, pixel_size: params.pixel_size, origin: lo, blob_sigma: sigma, data })
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::experiments::Apparatus;
    use crate::LensRect;

    fn sites(grid: LensRect) -> TrapSiteArray {
        let all: BTreeSet<_> = grid.iter().collect();
        Apparatus::default().trap_sites(&all, grid).unwrap()
    }

    fn quiet() -> NoiseModel {
        NoiseModel { enabled: false, ..Default::default() }
    }

    #[test]
    fn zero_population_is_background_only() {
        let s = sites(LensRect::new(24, 24, 3, 3));
        let pops: Vec<_> = s.sites.iter().map(|t| (t.lens, 0.0)).collect();
        let img = synth_fluorescence_image(&s, &pops, &quiet(), 1, &ImageParams::default()).unwrap();
        assert!(img.data.iter().all(|&v| v == 20.0));
    }

    #[test]
    fn nine_blobs_on_site_pitch() {
        let s = sites(LensRect::new(24, 24, 3, 3));
        let pops: Vec<_> = s.sites.iter().map(|t| (t.lens, 1.0)).collect();
        let img = synth_fluorescence_image(&s, &pops, &quiet(), 1, &ImageParams::default()).unwrap();
        let mut maxima = 0;
        for r in 1..img.height - 1 {
            for c in 1..img.width - 1 {
                let v = img.get(c, r);
                let neighbours = [(c - 1, r), (c + 1, r), (c, r - 1), (c, r + 1)];
                if v > 21.0 && neighbours.iter().all(|&(cc, rr)| img.get(cc, rr) < v) {
                    maxima += 1;
                }
            }
        }
        assert_eq!(maxima, 9);
        for t in &s.sites {
            let (c, r) = img.pixel_of(t.position);
            assert!(img.get(c, r) > 100.0);
        }
        let a = img.pixel_of(s.sites[0].position);
        let b = img.pixel_of(s.sites[1].position);
        let pitch_um = (b.0 as f64 - a.0 as f64).abs() * img.pixel_size / MICRO;
        assert!((pitch_um - 55.47).abs() <= 1.0, "{pitch_um}");
    }

    #[test]
    fn averaging_reduces_pixel_noise() {
        let s = sites(LensRect::new(25, 25, 1, 1));
        let pops = vec![(LensIndex::new(25, 25), 0.0)];
        let params = ImageParams { pixel_size: 0.1 * MICRO, ..Default::default() };
        let noisy = NoiseModel { rng_seed: 17, ..Default::default() };
        let std = |n: usize| {
            let img = synth_fluorescence_image(&s, &pops, &noisy, n, &params).unwrap();
            let m = img.data.iter().sum::<f64>() / img.data.len() as f64;
            (img.data.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (img.data.len() - 1) as f64).sqrt()
        };
        let ratio = std(1) / std(20);
        assert!((ratio / 20f64.sqrt() - 1.0).abs() < 0.1, "{ratio}");
    }

    #[test]
    fn levels_normalised_to_full_scale() {
        let s = sites(LensRect::new(25, 25, 1, 1));
        let img = synth_fluorescence_image(&s, &[(LensIndex::new(25, 25), 1.0)], &quiet(), 1, &ImageParams::default()).unwrap();
        let lv = img.to_levels();
        assert_eq!(lv.iter().copied().max(), Some(255));
    }
}
