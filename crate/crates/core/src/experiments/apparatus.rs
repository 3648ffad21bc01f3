use std::collections::BTreeSet;

use crate::error::Result;
use crate::optics::{
    disk_transmission, lens_input_power, project_focal_array, rasterize_pattern, IlluminationBeam, ImagingTrainSpec,
    LensAddressMap, LensPower, MicrolensArraySpec, SlmMask, SlmSpec, TrapSiteArray, DEFAULT_DISK_AREA_PX,
    DEFAULT_WAIST,
};
use crate::optics::build_address_map_with_area;
use crate::spin::{InitialState, SiteEnsemble};
use crate::trap::{default_temperature, dipole_depth, trap_parameters, AtomSpecies, TrapParameters, DEFAULT_KAPPA};
use crate::{LensIndex, LensRect};

/// Every fixed physical parameter of the setup, from laser to atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Apparatus {
    pub slm: SlmSpec,
    pub beam: IlluminationBeam,
    pub mla: MicrolensArraySpec,
    pub relay_demag: f64,
    pub disk_area_px: f64,
    pub imaging: ImagingTrainSpec,
    /// Focal waist in the trap plane, metres.
    pub waist: f64,
    pub species: AtomSpecies,
    pub kappa: f64,
    /// Ensemble temperature in kelvin, shared by all sites; `None` uses a
    /// tenth of the deepest site's depth.
    pub temperature: Option<f64>,
}

impl Default for Apparatus {
    fn default() -> Self {
        Self {
            slm: SlmSpec::default(),
            beam: IlluminationBeam::default(),
            mla: MicrolensArraySpec::default(),
            relay_demag: 2.0,
            disk_area_px: DEFAULT_DISK_AREA_PX,
            imaging: ImagingTrainSpec::default(),
            waist: DEFAULT_WAIST,
            species: AtomSpecies::rubidium_85(),
            kappa: DEFAULT_KAPPA,
            temperature: None,
        }
    }
}

/// Optical and trap quantities of one site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteReport {
    pub lens: LensIndex,
    pub position: [f64; 2],
    pub power: f64,
    pub waist: f64,
    pub relative_transmission: f64,
    pub trap: TrapParameters,
    pub temperature: f64,
}

impl Apparatus {
    pub fn address_map(&self, grid: LensRect) -> Result<LensAddressMap> {
        build_address_map_with_area(&self.slm, &self.mla, self.relay_demag, grid, self.disk_area_px)
    }

    /// Full-transmission disks on `lenses`, dark elsewhere.
    pub fn pattern_mask(&self, lenses: &BTreeSet<LensIndex>, map: &LensAddressMap) -> Result<SlmMask> {
        rasterize_pattern(lenses, self.slm.max_level(), 0, map, &self.slm)
    }

    /// Mean disk transmission of every mapped lens under `mask`.
    pub fn lens_transmissions(&self, mask: &SlmMask, map: &LensAddressMap) -> Result<Vec<(LensIndex, f64)>> {
        map.subset().iter().map(|l| Ok((l, disk_transmission(mask, map, l)?))).collect()
    }

    /// Focal-spot array produced when `trap_lenses` are illuminated.
    pub fn trap_sites(&self, trap_lenses: &BTreeSet<LensIndex>, grid: LensRect) -> Result<TrapSiteArray> {
        let map = self.address_map(grid)?;
        let mask = self.pattern_mask(trap_lenses, &map)?;
        let powers = grid
            .iter()
            .map(|lens| {
                let (power, relative_transmission) = lens_input_power(&mask, &self.beam, &map, lens)?;
                Ok(LensPower { lens, power, relative_transmission })
            })
            .collect::<Result<Vec<_>>>()?;
        project_focal_array(&powers, &self.imaging, &self.mla, self.waist)
    }

    /// Sample temperature for `sites`: the configured value, or a tenth of
    /// the deepest trap.
    pub fn sample_temperature(&self, sites: &TrapSiteArray) -> Result<f64> {
        if let Some(t) = self.temperature {
            return Ok(t);
        }
        let mut deepest: f64 = 0.0;
        for s in &sites.sites {
            deepest = deepest.max(dipole_depth(s.power, s.waist, self.beam.wavelength, &self.species)?);
        }
        Ok(default_temperature(deepest))
    }

    pub fn site_reports(&self, sites: &TrapSiteArray) -> Result<Vec<SiteReport>> {
        let temperature = self.sample_temperature(sites)?;
        sites
            .sites
            .iter()
            .map(|s| {
                let trap =
                    trap_parameters(s.power, s.waist, self.beam.wavelength, &self.species, Some(temperature), self.kappa)?;
                Ok(SiteReport {
                    lens: s.lens,
                    position: s.position,
                    power: s.power,
                    waist: s.waist,
                    relative_transmission: s.relative_transmission,
                    trap,
                    temperature,
                })
            })
            .collect()
    }

    pub fn ensembles(&self, reports: &[SiteReport], initial: InitialState) -> Vec<SiteEnsemble> {
        reports
            .iter()
            .map(|r| SiteEnsemble {
                lens: r.lens,
                depth: r.trap.depth,
                temperature: r.temperature,
                delta0: r.trap.differential_shift,
                kappa: self.kappa,
                initial,
            })
            .collect()
    }
}
