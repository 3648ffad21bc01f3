//! Closed-form ensemble signals.
//!
//! [`sequence_signal`] propagates the ensemble-averaged density matrix
//! through an arbitrary sequence of instantaneous pulses. Each free
//! evolution splits the matrix into a population part and two coherence
//! parts tagged by the accumulated time weight `s` of the random detuning;
//! after the last pulse every part is weighted by the ensemble average of
//! `exp(i xi s)`. With a single coherence pathway this reduces to
//! [`ramsey_signal`] and [`echo_signal`].

use num_complex::Complex64;

use super::pulse::PulseSequence;
use super::rotation::{InitialState, Matrix2, Rotation};
use crate::error::{Error, Result};
use crate::trap::ramsey_envelope;
use crate::LensIndex;

/// How the thermal detuning spread weights a coherence pathway.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EnvelopeModel {
    /// Real envelope `[1 + (s/tau)^2]^(-3/2)`: fringes in the frame of the
    /// ensemble's mean phase.
    #[default]
    Magnitude,
    /// Full characteristic function `(1 + i s/tau)^(-3)` of the energy
    /// spread, including its phase lag. This is the `N -> inf` limit of
    /// the Monte-Carlo backend.
    Complex,
}

impl EnvelopeModel {
    pub fn weight(self, s: f64, tau: f64) -> Complex64 {
        if tau.is_infinite() || s == 0.0 {
            return Complex64::new(1.0, 0.0);
        }
        match self {
            EnvelopeModel::Magnitude => Complex64::new(ramsey_envelope(s, tau), 0.0),
            EnvelopeModel::Complex => Complex64::new(1.0, s / tau).powi(-3),
        }
    }
}

/// `|0>` population after a Ramsey sequence started in `|1>`.
pub fn ramsey_signal(t: f64, ramsey_detuning: f64, tau: f64, site_phase: f64) -> f64 {
    0.5 * (1.0 + ramsey_envelope(t, tau) * (ramsey_detuning * t + site_phase).cos())
}

/// `|0>` population after a spin-echo sequence with the refocusing pulse
/// after `t_pi` of a total free evolution `t`. Sites without the pulse see
/// a plain Ramsey signal.
#[allow(clippy::too_many_arguments)]
pub fn echo_signal(
    t: f64,
    t_pi: f64,
    tau: f64,
    t2_irreversible: f64,
    site_addressed: bool,
    ramsey_detuning: f64,
    site_phase: f64,
) -> Result<f64> {
    if !site_addressed {
        return Ok(ramsey_signal(t, ramsey_detuning, tau, site_phase));
    }
    if !(t_pi > 0.0 && t_pi < t) {
        return Err(Error::Sequence(format!("refocusing time {t_pi} s must lie in (0, {t}) s")));
    }
    let x = t - 2.0 * t_pi;
    let decay = (-t / t2_irreversible).exp();
    Ok(0.5 * (1.0 - ramsey_envelope(x.abs(), tau) * decay * (ramsey_detuning * x + site_phase).cos()))
}

/// Deterministic free-evolution parameters shared by all sites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dynamics {
    /// Detuning of the coupling light from the trap-bottom clock
    /// resonance, rad/s.
    pub ramsey_detuning: f64,
    /// Irreversible coherence decay time, seconds (may be infinite).
    pub t2_irreversible: f64,
}

struct Pathway {
    weight: f64,
    rho: Matrix2,
}

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const MERGE_TOLERANCE: f64 = 1e-15;

fn push_merged(terms: &mut Vec<Pathway>, weight: f64, rho: Matrix2) {
    if rho.iter().flatten().all(|c| *c == ZERO) {
        return;
    }
    if let Some(p) = terms.iter_mut().find(|p| (p.weight - weight).abs() <= MERGE_TOLERANCE) {
        for r in 0..2 {
            for c in 0..2 {
                p.rho[r][c] += rho[r][c];
            }
        }
    } else {
        terms.push(Pathway { weight, rho });
    }
}

/// Ensemble-averaged `|0>` population at one site after `sequence`.
pub fn sequence_signal(
    sequence: &PulseSequence,
    lens: LensIndex,
    initial: InitialState,
    dynamics: &Dynamics,
    tau: f64,
    model: EnvelopeModel,
) -> f64 {
    let mut terms = vec![Pathway { weight: 0.0, rho: initial.density() }];
    let gaps: Vec<f64> = sequence.gaps().collect();
    for (k, pulse) in sequence.pulses.iter().enumerate() {
        let r = Rotation::new(pulse.angle_at(lens), pulse.axis_phase);
        for p in &mut terms {
            p.rho = r.conjugate(&p.rho);
        }
        let Some(&gap) = gaps.get(k) else { continue };
        let decay = (-gap / dynamics.t2_irreversible).exp();
        let rot = Complex64::from_polar(decay, dynamics.ramsey_detuning * gap);
        let mut next = Vec::with_capacity(terms.len() * 3);
        for p in terms {
            let m = p.rho;
            push_merged(&mut next, p.weight, [[m[0][0], ZERO], [ZERO, m[1][1]]]);
            push_merged(&mut next, p.weight + gap, [[ZERO, m[0][1] * rot], [ZERO, ZERO]]);
            push_merged(&mut next, p.weight - gap, [[ZERO, ZERO], [m[1][0] * rot.conj(), ZERO]]);
        }
        terms = next;
    }
    let p0: Complex64 = terms.iter().map(|p| p.rho[0][0] * model.weight(p.weight, tau)).sum();
    p0.re.clamp(0.0, 1.0)
}
