//! JSON run configuration with unit-suffixed keys.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::constants::{MICRO, MILLI, NANO};
use crate::error::{Error, Result};
use crate::experiments::{
    Apparatus, Backend, ExperimentSpec, ImageParams, PatternKind, PatternSpec, Protocol, ScanRange,
};
use crate::optics::{IlluminationBeam, ImagingTrainSpec, MicrolensArraySpec, SlmSpec};
use crate::spin::{AtomsPerSite, NoiseModel};
use crate::trap::AtomSpecies;
use crate::LensRect;

pub const SCHEMA_VERSION: &str = "1";

fn schema_version() -> String {
    SCHEMA_VERSION.to_string()
}

/// Drops the last-bit noise of a unit conversion so defaults print cleanly.
fn clean(x: f64) -> f64 {
    format!("{x:.12e}").parse().expect("formatted float parses")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SlmConfig {
    pub n_cols: usize,
    pub n_rows: usize,
    pub pixel_pitch_um: f64,
    pub t_floor: f64,
    pub t_levels: u32,
    pub rise_time_ms: f64,
    pub fall_time_ms: f64,
    pub absolute_throughput: f64,
}

impl Default for SlmConfig {
    fn default() -> Self {
        let d = SlmSpec::default();
        Self {
            n_cols: d.n_cols,
            n_rows: d.n_rows,
            pixel_pitch_um: clean(d.pixel_pitch / MICRO),
            t_floor: d.t_floor,
            t_levels: d.t_levels,
            rise_time_ms: clean(d.rise_time / MILLI),
            fall_time_ms: clean(d.fall_time / MILLI),
            absolute_throughput: d.absolute_throughput,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BeamConfig {
    pub power_mw: f64,
    pub waist_radius_um: f64,
    pub center_um: [f64; 2],
    pub wavelength_nm: f64,
}

impl Default for BeamConfig {
    fn default() -> Self {
        let d = IlluminationBeam::default();
        Self {
            power_mw: clean(d.power / MILLI),
            waist_radius_um: clean(d.waist_radius / MICRO),
            center_um: [clean(d.center[0] / MICRO), clean(d.center[1] / MICRO)],
            wavelength_nm: clean(d.wavelength / NANO),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MlaConfig {
    pub n_x: usize,
    pub n_y: usize,
    pub pitch_um: f64,
    pub lens_diameter_um: f64,
    pub focal_length_mm: f64,
    pub relay_demag: f64,
    pub disk_area_px: f64,
}

impl Default for MlaConfig {
    fn default() -> Self {
        let d = MicrolensArraySpec::default();
        let a = Apparatus::default();
        Self {
            n_x: d.n_x,
            n_y: d.n_y,
            pitch_um: clean(d.pitch / MICRO),
            lens_diameter_um: clean(d.lens_diameter / MICRO),
            focal_length_mm: clean(d.focal_length / MILLI),
            relay_demag: a.relay_demag,
            disk_area_px: a.disk_area_px,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImagingConfig {
    pub f_relay_mm: f64,
    pub f_objective_mm: f64,
    pub numerical_aperture: f64,
    pub throughput: f64,
    pub waist_um: f64,
}

impl Default for ImagingConfig {
    fn default() -> Self {
        let d = ImagingTrainSpec::default();
        Self {
            f_relay_mm: clean(d.f_relay / MILLI),
            f_objective_mm: clean(d.f_objective / MILLI),
            numerical_aperture: d.numerical_aperture,
            throughput: d.throughput,
            waist_um: clean(Apparatus::default().waist / MICRO),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SpeciesConfig {
    pub mass_kg: f64,
    pub d1_wavelength_nm: f64,
    pub d2_wavelength_nm: f64,
    /// Natural linewidth divided by 2 pi.
    pub linewidth_mhz: f64,
    pub saturation_intensity_w_m2: f64,
    /// Hyperfine splitting divided by 2 pi.
    pub hyperfine_splitting_ghz: f64,
}

impl Default for SpeciesConfig {
    fn default() -> Self {
        let d = AtomSpecies::rubidium_85();
        Self {
            mass_kg: d.mass,
            d1_wavelength_nm: clean(d.d1_wavelength / NANO),
            d2_wavelength_nm: clean(d.d2_wavelength / NANO),
            linewidth_mhz: clean(d.linewidth / (2.0 * PI * 1e6)),
            saturation_intensity_w_m2: d.saturation_intensity,
            hyperfine_splitting_ghz: clean(d.hyperfine_splitting / (2.0 * PI * 1e9)),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnsembleConfig {
    /// `null` uses a tenth of the deepest trap.
    pub temperature_uk: Option<f64>,
    pub kappa: f64,
    /// Atoms per site in the Monte-Carlo backend.
    pub n_atoms: usize,
}

impl Default for EnsembleConfig {
    fn default() -> Self {
        let a = Apparatus::default();
        Self { temperature_uk: a.temperature.map(|t| clean(t / MICRO)), kappa: a.kappa, n_atoms: ExperimentSpec::default().mc_atoms }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseConfig {
    pub enabled: bool,
    pub atoms_per_site_min: u64,
    pub atoms_per_site_max: u64,
    pub shots_per_point: u32,
    pub rng_seed: u64,
    #[serde(rename = "irreversible_T2_ms")]
    pub irreversible_t2_ms: f64,
    /// `null` derives the leakage from the modulator contrast.
    pub crosstalk_epsilon: Option<f64>,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        let d = NoiseModel::default();
        Self {
            enabled: d.enabled,
            atoms_per_site_min: d.atoms_per_site.min,
            atoms_per_site_max: d.atoms_per_site.max,
            shots_per_point: d.shots_per_point,
            rng_seed: d.rng_seed,
            irreversible_t2_ms: clean(d.irreversible_t2 / MILLI),
            crosstalk_epsilon: d.crosstalk_epsilon,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub protocol: Protocol,
    pub backend: Backend,
    pub grid: LensRect,
    pub trap_pattern: PatternKind,
    pub addressed_pattern: PatternKind,
    pub scan_start_ms: f64,
    pub scan_stop_ms: f64,
    pub scan_steps: usize,
    pub t_pi_ms: f64,
    #[serde(rename = "T_pi_ms")]
    pub echo_t_pi_ms: f64,
    pub readout_phase_rad: f64,
    /// Ramsey detuning divided by 2 pi.
    pub ramsey_detuning_hz: f64,
    pub coupling_exponent: f64,
    pub image_averages: usize,
    pub image_pixel_um: f64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        let d = ExperimentSpec::default();
        Self {
            protocol: d.protocol,
            backend: d.backend,
            grid: d.grid,
            trap_pattern: d.trap_pattern,
            addressed_pattern: d.addressed_pattern,
            scan_start_ms: clean(d.scan.start / MILLI),
            scan_stop_ms: clean(d.scan.stop / MILLI),
            scan_steps: d.scan.steps,
            t_pi_ms: clean(d.pi_pulse_duration / MILLI),
            echo_t_pi_ms: clean(d.echo_t_pi / MILLI),
            readout_phase_rad: d.readout_phase,
            ramsey_detuning_hz: clean(d.ramsey_detuning / (2.0 * PI)),
            coupling_exponent: d.coupling_exponent,
            image_averages: 20,
            image_pixel_um: clean(ImageParams::default().pixel_size / MICRO),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub schema_version: String,
    pub slm: SlmConfig,
    pub beam: BeamConfig,
    pub mla: MlaConfig,
    pub imaging: ImagingConfig,
    pub species: SpeciesConfig,
    pub ensemble: EnsembleConfig,
    pub noise: NoiseConfig,
    pub experiment: ExperimentConfig,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            schema_version: schema_version(),
            slm: SlmConfig::default(),
            beam: BeamConfig::default(),
            mla: MlaConfig::default(),
            imaging: ImagingConfig::default(),
            species: SpeciesConfig::default(),
            ensemble: EnsembleConfig::default(),
            noise: NoiseConfig::default(),
            experiment: ExperimentConfig::default(),
        }
    }
}

/// Domain-level parameter names mapped to their configuration keys.
const FIELD_NAMES: &[(&str, &str)] = &[
    ("slm.pixel_pitch", "slm.pixel_pitch_um"),
    ("slm.rise_time/fall_time", "slm.rise_time_ms/fall_time_ms"),
    ("beam.power", "beam.power_mw"),
    ("beam.waist_radius", "beam.waist_radius_um"),
    ("beam.wavelength", "beam.wavelength_nm"),
    ("imaging.f_relay/f_objective", "imaging.f_relay_mm/f_objective_mm"),
    ("experiment.scan", "experiment.scan_start_ms/scan_stop_ms"),
    ("experiment.scan.steps", "experiment.scan_steps"),
    ("experiment.pi_pulse", "experiment.t_pi_ms"),
    ("ensemble.n_atoms", "ensemble.n_atoms"),
    ("noise.irreversible_t2", "noise.irreversible_T2_ms"),
];

fn config_error(err: Error) -> Error {
    match err {
        Error::Domain { name, constraint } => {
            let field = FIELD_NAMES.iter().find(|(d, _)| *d == name).map_or(name, |(_, c)| c).to_string();
            Error::Config { field, constraint }
        }
        other => other,
    }
}

fn check(ok: bool, field: &str, constraint: &str) -> Result<()> {
    if ok {
        Ok(())
    } else {
        Err(Error::Config { field: field.into(), constraint: constraint.into() })
    }
}

impl RunConfig {
    pub fn apparatus(&self) -> Apparatus {
        let (s, b, m, i, sp, e) = (&self.slm, &self.beam, &self.mla, &self.imaging, &self.species, &self.ensemble);
        Apparatus {
            slm: SlmSpec {
                n_cols: s.n_cols,
                n_rows: s.n_rows,
                pixel_pitch: s.pixel_pitch_um * MICRO,
                t_floor: s.t_floor,
                t_levels: s.t_levels,
                rise_time: s.rise_time_ms * MILLI,
                fall_time: s.fall_time_ms * MILLI,
                absolute_throughput: s.absolute_throughput,
            },
            beam: IlluminationBeam {
                power: b.power_mw * MILLI,
                waist_radius: b.waist_radius_um * MICRO,
                center: [b.center_um[0] * MICRO, b.center_um[1] * MICRO],
                wavelength: b.wavelength_nm * NANO,
            },
            mla: MicrolensArraySpec {
                n_x: m.n_x,
                n_y: m.n_y,
                pitch: m.pitch_um * MICRO,
                lens_diameter: m.lens_diameter_um * MICRO,
                focal_length: m.focal_length_mm * MILLI,
            },
            relay_demag: m.relay_demag,
            disk_area_px: m.disk_area_px,
            imaging: ImagingTrainSpec {
                f_relay: i.f_relay_mm * MILLI,
                f_objective: i.f_objective_mm * MILLI,
                numerical_aperture: i.numerical_aperture,
                throughput: i.throughput,
            },
            waist: i.waist_um * MICRO,
            species: AtomSpecies {
                mass: sp.mass_kg,
                d1_wavelength: sp.d1_wavelength_nm * NANO,
                d2_wavelength: sp.d2_wavelength_nm * NANO,
                linewidth: 2.0 * PI * sp.linewidth_mhz * 1e6,
                saturation_intensity: sp.saturation_intensity_w_m2,
                hyperfine_splitting: 2.0 * PI * sp.hyperfine_splitting_ghz * 1e9,
            },
            kappa: e.kappa,
            temperature: e.temperature_uk.map(|t| t * MICRO),
        }
    }

    pub fn noise_model(&self) -> NoiseModel {
        let n = &self.noise;
        NoiseModel {
            enabled: n.enabled,
            atoms_per_site: AtomsPerSite { min: n.atoms_per_site_min, max: n.atoms_per_site_max },
            shots_per_point: n.shots_per_point,
            rng_seed: n.rng_seed,
            irreversible_t2: n.irreversible_t2_ms * MILLI,
            crosstalk_epsilon: n.crosstalk_epsilon,
        }
    }

    pub fn experiment_spec(&self) -> ExperimentSpec {
        let x = &self.experiment;
        ExperimentSpec {
            protocol: x.protocol,
            grid: x.grid,
            trap_pattern: x.trap_pattern.clone(),
            addressed_pattern: x.addressed_pattern.clone(),
            scan: ScanRange { start: x.scan_start_ms * MILLI, stop: x.scan_stop_ms * MILLI, steps: x.scan_steps },
            pi_pulse_duration: x.t_pi_ms * MILLI,
            echo_t_pi: x.echo_t_pi_ms * MILLI,
            readout_phase: x.readout_phase_rad,
            ramsey_detuning: 2.0 * PI * x.ramsey_detuning_hz,
            coupling_exponent: x.coupling_exponent,
            apparatus: self.apparatus(),
            noise: self.noise_model(),
            backend: x.backend,
            mc_atoms: self.ensemble.n_atoms,
        }
    }

    pub fn image_params(&self) -> ImageParams {
        ImageParams { pixel_size: self.experiment.image_pixel_um * MICRO, ..ImageParams::default() }
    }

    /// Checks every module invariant; errors name the offending key.
    pub fn validate(&self) -> Result<()> {
        check(self.schema_version == SCHEMA_VERSION, "schema_version", &format!("must be \"{SCHEMA_VERSION}\""))?;
        let e = &self.ensemble;
        check(e.kappa > 0.0 && e.kappa.is_finite(), "ensemble.kappa", "must be > 0")?;
        check(e.temperature_uk.is_none_or(|t| t >= 0.0 && t.is_finite()), "ensemble.temperature_uk", "must be >= 0")?;
        check(self.imaging.waist_um > 0.0, "imaging.waist_um", "must be > 0")?;
        check(self.mla.relay_demag > 0.0, "mla.relay_demag", "must be > 0")?;
        check(self.mla.disk_area_px > 0.0, "mla.disk_area_px", "must be > 0")?;
        check(self.experiment.image_averages >= 1, "experiment.image_averages", "must be >= 1")?;
        check(self.experiment.image_pixel_um > 0.0, "experiment.image_pixel_um", "must be > 0")?;
        check(
            self.noise.crosstalk_epsilon.is_none_or(|x| (0.0..=1.0).contains(&x)),
            "noise.crosstalk_epsilon",
            "must lie in [0, 1]",
        )?;
        let x = &self.experiment;
        check(x.readout_phase_rad.is_finite(), "experiment.readout_phase_rad", "must be finite")?;
        check(x.ramsey_detuning_hz.is_finite(), "experiment.ramsey_detuning_hz", "must be finite")?;
        let grid = x.grid;
        check(
            !grid.is_empty() && grid.i0 + grid.n_i <= self.mla.n_x && grid.j0 + grid.n_j <= self.mla.n_y,
            "experiment.grid",
            "must be a non-empty rectangle inside the lens array",
        )?;

        let exp = self.experiment_spec();
        let app = &exp.apparatus;
        let steps: [&dyn Fn() -> Result<()>; 8] = [
            &|| app.slm.validate(),
            &|| app.beam.validate(),
            &|| app.mla.validate(),
            &|| app.imaging.validate(),
            &|| app.species.validate(),
            &|| PatternSpec::new(exp.trap_pattern.clone(), grid).validate(),
            &|| PatternSpec::new(exp.addressed_pattern.clone(), grid).validate(),
            &|| exp.validate(),
        ];
        for s in steps {
            s().map_err(config_error)?;
        }
        app.address_map(grid).map(|_| ()).map_err(config_error)
    }

    /// Canonical pretty-printed form; parses back to an equal config.
    pub fn to_canonical_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("config is serialisable");
        s.push('\n');
        s
    }
}

/// Parses and validates a configuration document.
pub fn parse_config(bytes: &[u8]) -> Result<RunConfig> {
    let text = std::str::from_utf8(bytes).map_err(|e| Error::ConfigSyntax {
        line: 0,
        column: e.valid_up_to(),
        msg: "document is not valid UTF-8".into(),
    })?;
    let de = &mut serde_json::Deserializer::from_str(text);
    let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        if inner.is_syntax() || inner.is_eof() {
            Error::ConfigSyntax { line: inner.line(), column: inner.column(), msg: inner.to_string() }
        } else {
            Error::Config { field: path, constraint: inner.to_string() }
        }
    })?;
    cfg.validate()?;
    Ok(cfg)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_document_is_full_default() {
        let cfg = parse_config(b"{}").unwrap();
        assert_eq!(cfg, RunConfig::default());
        assert_eq!(cfg.apparatus(), Apparatus::default());
        assert_eq!(cfg.noise_model(), NoiseModel::default());
        let d = ExperimentSpec::default();
        let e = cfg.experiment_spec();
        assert_eq!(e.grid, d.grid);
        assert_eq!(e.scan.steps, d.scan.steps);
        assert!((e.ramsey_detuning - d.ramsey_detuning).abs() < 1e-9);
    }

    #[test]
    fn numerical_aperture_bound_names_field() {
        match parse_config(br#"{"imaging":{"numerical_aperture":1.5}}"#) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "imaging.numerical_aperture"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn echo_document() {
        let cfg = parse_config(br#"{"experiment":{"protocol":"echo","T_pi_ms":4}}"#).unwrap();
        let e = cfg.experiment_spec();
        assert_eq!(e.protocol, Protocol::Echo);
        assert!((e.echo_t_pi - 4e-3).abs() < 1e-15);
    }

    #[test]
    fn unknown_key_rejected_with_path() {
        match parse_config(br#"{"beam":{"power_mw":137,"colour":"red"}}"#) {
            Err(Error::Config { field, constraint }) => {
                assert_eq!(field, "beam.colour");
                assert!(constraint.contains("colour"));
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse_config(br#"{"bogus":1}"#), Err(Error::Config { .. })));
    }

    #[test]
    fn syntax_error_has_position() {
        match parse_config(b"{\n  \"slm\": {\n    \"n_cols\": ,\n  }\n}") {
            Err(Error::ConfigSyntax { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn semantic_errors_name_unit_keys() {
        match parse_config(br#"{"beam":{"power_mw":-1}}"#) {
            Err(Error::Config { field, .. }) => assert_eq!(field, "beam.power_mw"),
            other => panic!("{other:?}"),
        }
        match parse_config(br#"{"experiment":{"protocol":"echo","T_pi_ms":12}}"#) {
            Err(Error::Sequence(_)) => {}
            other => panic!("{other:?}"),
        }
        assert!(parse_config(br#"{"schema_version":"0"}"#).is_err());
        assert!(parse_config(br#"{"experiment":{"grid":{"i0":48,"j0":0,"n_i":3,"n_j":3}}}"#).is_err());
    }

    #[test]
    fn canonical_form_round_trips() {
        let src = br#"{"experiment":{"protocol":"spin_texture_ramsey","addressed_pattern":{"kind":"ring","center":[25,25],"inner_r":0.5,"outer_r":1.2}},"noise":{"crosstalk_epsilon":null}}"#;
        let cfg = parse_config(src).unwrap();
        let canon = cfg.to_canonical_json();
        let again = parse_config(canon.as_bytes()).unwrap();
        assert_eq!(cfg, again);
        assert_eq!(canon, again.to_canonical_json());
    }
}
