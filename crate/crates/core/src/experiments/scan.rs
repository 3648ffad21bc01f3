use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::apparatus::Apparatus;
use super::pattern::{make_pattern, PatternKind, PatternSpec};
use crate::constants::MILLI;
use crate::error::{Error, Result};
use crate::spin::rng::{stream, StreamPurpose};
use crate::spin::{
    detect_shot, mc_site_signal, sequence_signal, summarize, Addressing, Dynamics, EnvelopeModel, InitialState,
    NoiseModel, PulseEvent, PulseSequence, SiteEnsemble, SiteTransmission,
};
use crate::{LensIndex, LensRect};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Protocol {
    /// Masked pi/2 - wait T - masked pi/2.
    Ramsey,
    /// Global pi/2, masked pi after `echo_t_pi`, global pi/2 after T.
    Echo,
    /// Masked pi on `|1>`, then a global Ramsey sequence.
    SpinTextureRamsey,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Backend {
    Analytic,
    #[serde(alias = "mc")]
    MonteCarlo,
}

impl Backend {
    pub fn as_str(self) -> &'static str {
        match self {
            Backend::Analytic => "analytic",
            Backend::MonteCarlo => "monte_carlo",
        }
    }
}

/// Free-evolution times `start..=stop` in `steps` equal increments, seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanRange {
    pub start: f64,
    pub stop: f64,
    pub steps: usize,
}

impl ScanRange {
    pub fn value(&self, k: usize) -> f64 {
        self.start + (self.stop - self.start) * k as f64 / (self.steps - 1) as f64
    }

    pub fn values(&self) -> Vec<f64> {
        (0..self.steps).map(|k| self.value(k)).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub protocol: Protocol,
    pub grid: LensRect,
    /// Lenses illuminated by trap light; only these sites hold atoms.
    pub trap_pattern: PatternKind,
    /// Lenses illuminated through the coupling-light modulator.
    pub addressed_pattern: PatternKind,
    pub scan: ScanRange,
    /// Duration of a full-transmission pi pulse, seconds.
    pub pi_pulse_duration: f64,
    /// Free evolution before the refocusing pulse, seconds.
    pub echo_t_pi: f64,
    /// Axis phase of the final pi/2 pulse, radians.
    pub readout_phase: f64,
    /// rad/s.
    pub ramsey_detuning: f64,
    pub coupling_exponent: f64,
    pub apparatus: Apparatus,
    pub noise: NoiseModel,
    pub backend: Backend,
    pub mc_atoms: usize,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        Self {
            protocol: Protocol::Ramsey,
            grid: LensRect::new(24, 24, 3, 3),
            trap_pattern: PatternKind::Full,
            addressed_pattern: PatternKind::Checkerboard { parity: 0 },
            scan: ScanRange { start: 0.0, stop: 10.0 * MILLI, steps: 41 },
            pi_pulse_duration: 0.2 * MILLI,
            echo_t_pi: 4.0 * MILLI,
            readout_phase: 0.0,
            ramsey_detuning: 2.0 * PI * 1e3,
            coupling_exponent: 1.0,
            apparatus: Apparatus::default(),
            noise: NoiseModel::default(),
            backend: Backend::Analytic,
            mc_atoms: 10_000,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResultRow {
    pub site: LensIndex,
    pub scan_ms: f64,
    pub p0_ideal: f64,
    pub p0_measured: f64,
    pub sem: f64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResultMetadata {
    pub seed: u64,
    pub backend: Backend,
    pub spec_hash: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
    pub metadata: ResultMetadata,
}

impl ResultTable {
    pub fn sites(&self) -> Vec<LensIndex> {
        let set: BTreeSet<LensIndex> = self.rows.iter().map(|r| r.site).collect();
        set.into_iter().collect()
    }

    pub fn site_rows(&self, site: LensIndex) -> impl Iterator<Item = &ResultRow> {
        self.rows.iter().filter(move |r| r.site == site)
    }
}

impl ExperimentSpec {
    pub fn validate(&self) -> Result<()> {
        let s = self.scan;
        if s.steps < 2 {
            return Err(Error::domain("experiment.scan.steps", "must be >= 2"));
        }
        if !(s.start >= 0.0 && s.stop > s.start) {
            return Err(Error::domain("experiment.scan", "need 0 <= start < stop"));
        }
        if !(self.pi_pulse_duration >= 0.0) {
            return Err(Error::domain("experiment.pi_pulse", "duration must be >= 0"));
        }
        if !(self.coupling_exponent > 0.0) {
            return Err(Error::domain("experiment.coupling_exponent", "must be > 0"));
        }
        if self.mc_atoms < 1 {
            return Err(Error::domain("ensemble.n_atoms", "must be >= 1"));
        }
        if self.protocol == Protocol::Echo && !(self.echo_t_pi > s.start && self.echo_t_pi < s.stop) {
            return Err(Error::Sequence(format!(
                "refocusing time {:.3} ms lies outside the scan range ({:.3}, {:.3}) ms",
                self.echo_t_pi / MILLI,
                s.start / MILLI,
                s.stop / MILLI
            )));
        }
        self.noise.validate()
    }

    fn masked(&self, addressing: &Addressing, start: f64, area: f64, phase: f64) -> PulseEvent {
        PulseEvent {
            start_time: start,
            duration: self.pi_pulse_duration * area / PI,
            pulse_area: area,
            axis_phase: phase,
            addressing: addressing.clone(),
            coupling_exponent: self.coupling_exponent,
            crosstalk_epsilon: self.noise.effective_crosstalk(),
        }
    }

    fn global(&self, start: f64, area: f64, phase: f64) -> PulseEvent {
        PulseEvent::global(start, self.pi_pulse_duration * area / PI, area, phase)
    }

    /// Pulse sequence of one shot with total free evolution `t`.
    pub fn sequence(&self, addressing: &Addressing, t: f64) -> PulseSequence {
        let half = 0.5 * self.pi_pulse_duration;
        let full = self.pi_pulse_duration;
        let ro = self.readout_phase;
        let pulses = match self.protocol {
            Protocol::Ramsey => vec![
                self.masked(addressing, 0.0, FRAC_PI_2, 0.0),
                self.masked(addressing, half + t, FRAC_PI_2, ro),
            ],
            Protocol::Echo if t > self.echo_t_pi => vec![
                self.global(0.0, FRAC_PI_2, 0.0),
                self.masked(addressing, half + self.echo_t_pi, PI, 0.0),
                self.global(half + full + t, FRAC_PI_2, ro),
            ],
            // the refocusing pulse has not happened yet
            Protocol::Echo => vec![self.global(0.0, FRAC_PI_2, 0.0), self.global(half + t, FRAC_PI_2, ro)],
            Protocol::SpinTextureRamsey => vec![
                self.masked(addressing, 0.0, PI, 0.0),
                self.global(full, FRAC_PI_2, 0.0),
                self.global(full + half + t, FRAC_PI_2, ro),
            ],
        };
        PulseSequence::new(pulses)
    }

    /// Deterministic digest of every parameter of the run.
    pub fn digest(&self) -> String {
        hex::encode(Sha256::digest(format!("{self:?}").as_bytes()))
    }
}

/// Loaded sites with their ensembles and the coupling-light addressing.
pub struct Register {
    pub ensembles: Vec<SiteEnsemble>,
    pub addressed: BTreeSet<LensIndex>,
    pub addressing: Addressing,
}

pub fn build_register(exp: &ExperimentSpec) -> Result<Register> {
    let app = &exp.apparatus;
    let trap = make_pattern(&PatternSpec::new(exp.trap_pattern.clone(), exp.grid))?.lenses;
    let addressed = make_pattern(&PatternSpec::new(exp.addressed_pattern.clone(), exp.grid))?.lenses;

    let sites = app.trap_sites(&trap, exp.grid)?;
    let mut loaded = sites.clone();
    loaded.sites.retain(|s| trap.contains(&s.lens));
    let reports = app.site_reports(&loaded)?;
    let ensembles = app.ensembles(&reports, InitialState::One);

    // the coupling array has the same specifications as the trap array
    let map = app.address_map(exp.grid)?;
    let mask = app.pattern_mask(&addressed, &map)?;
    let floor = app.slm.t_floor;
    let lit = app
        .lens_transmissions(&mask, &map)?
        .into_iter()
        .filter(|&(_, t)| t > floor * (1.0 + 1e-12))
        .collect();
    let addressing = Addressing::Masked(SiteTransmission { floor, sites: lit });
    Ok(Register { ensembles, addressed, addressing })
}

fn evaluate_point(
    exp: &ExperimentSpec,
    ens: &SiteEnsemble,
    seq: &PulseSequence,
    dynamics: &Dynamics,
    point: usize,
) -> Result<f64> {
    let seed = exp.noise.rng_seed;
    match exp.backend {
        Backend::Analytic => Ok(sequence_signal(seq, ens.lens, ens.initial, dynamics, ens.tau(), EnvelopeModel::Magnitude)),
        Backend::MonteCarlo => {
            let mut rng = stream(seed, StreamPurpose::Ensemble, ens.lens, point, 0);
            mc_site_signal(seq, ens, exp.mc_atoms, dynamics, &mut rng)
        }
    }
}

pub fn run_scan(exp: &ExperimentSpec) -> Result<ResultTable> {
    exp.validate()?;
    let register = build_register(exp)?;
    let settle = exp.apparatus.slm.settle_time();
    let times = exp.scan.values();
    let sequences: Vec<PulseSequence> = times.iter().map(|&t| exp.sequence(&register.addressing, t)).collect();
    for s in &sequences {
        s.validate(settle)?;
    }
    let dynamics = Dynamics { ramsey_detuning: exp.ramsey_detuning, t2_irreversible: exp.noise.irreversible_t2 };
    let seed = exp.noise.rng_seed;
    let n_points = times.len();

    let work: Vec<(usize, usize)> =
        (0..register.ensembles.len()).flat_map(|s| (0..n_points).map(move |p| (s, p))).collect();
    let mut rows = work
        .par_iter()
        .map(|&(s, p)| {
            let ens = &register.ensembles[s];
            let ideal = evaluate_point(exp, ens, &sequences[p], &dynamics, p)?;
            let (measured, sem) = if exp.noise.enabled {
                let atoms = exp.noise.draw_atom_count(&mut stream(seed, StreamPurpose::AtomCount, ens.lens, 0, 0));
                let fracs = (0..exp.noise.shots_per_point as usize)
                    .map(|shot| detect_shot(ideal, atoms, &mut stream(seed, StreamPurpose::Detection, ens.lens, p, shot)))
                    .collect::<Result<Vec<_>>>()?;
                let d = summarize(&fracs);
                (d.mean, d.sem)
            } else {
                (ideal, 0.0)
            };
            Ok(ResultRow { site: ens.lens, scan_ms: times[p] / MILLI, p0_ideal: ideal, p0_measured: measured, sem })
        })
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| (a.site.i, a.site.j).cmp(&(b.site.i, b.site.j)).then(a.scan_ms.total_cmp(&b.scan_ms)));

    Ok(ResultTable { rows, metadata: ResultMetadata { seed, backend: exp.backend, spec_hash: exp.digest() } })
}

/// Fringe contrast per site and scan point, from two noiseless readouts
/// in quadrature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContrastRow {
    pub site: LensIndex,
    pub scan_ms: f64,
    pub contrast: f64,
}

pub fn fringe_contrast(exp: &ExperimentSpec) -> Result<Vec<ContrastRow>> {
    let in_phase = run_scan(exp)?;
    let quad = run_scan(&ExperimentSpec { readout_phase: exp.readout_phase + FRAC_PI_2, ..exp.clone() })?;
    Ok(in_phase
        .rows
        .iter()
        .zip(&quad.rows)
        .map(|(a, b)| ContrastRow {
            site: a.site,
            scan_ms: a.scan_ms,
            contrast: (2.0 * a.p0_ideal - 1.0).hypot(2.0 * b.p0_ideal - 1.0),
        })
        .collect())
}
