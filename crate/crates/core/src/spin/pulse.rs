use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::LensIndex;

/// Per-site relative transmission of a modulator-addressed beam.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteTransmission {
    /// Transmission of sites not listed (the modulator's dark level).
    pub floor: f64,
    pub sites: BTreeMap<LensIndex, f64>,
}

impl SiteTransmission {
    pub fn get(&self, lens: LensIndex) -> f64 {
        self.sites.get(&lens).copied().unwrap_or(self.floor)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Addressing {
    Global,
    Masked(SiteTransmission),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PulseEvent {
    /// Seconds from the start of the shot.
    pub start_time: f64,
    /// Seconds; rotations act instantaneously, the duration only fixes the timeline.
    pub duration: f64,
    /// Rotation angle at full transmission, radians.
    pub pulse_area: f64,
    pub axis_phase: f64,
    pub addressing: Addressing,
    /// Rabi frequency scales as `transmission^coupling_exponent`.
    pub coupling_exponent: f64,
    /// Measured leakage rotation ratio at dark sites, replacing the
    /// transmission-derived value when set.
    pub crosstalk_epsilon: Option<f64>,
}

impl PulseEvent {
    pub fn global(start_time: f64, duration: f64, pulse_area: f64, axis_phase: f64) -> Self {
        Self {
            start_time,
            duration,
            pulse_area,
            axis_phase,
            addressing: Addressing::Global,
            coupling_exponent: 1.0,
            crosstalk_epsilon: None,
        }
    }

    pub fn end_time(&self) -> f64 {
        self.start_time + self.duration
    }

    pub fn transmission_at(&self, lens: LensIndex) -> f64 {
        match &self.addressing {
            Addressing::Global => 1.0,
            Addressing::Masked(m) => m.get(lens),
        }
    }

    pub fn angle_at(&self, lens: LensIndex) -> f64 {
        pulse_angle(self, self.transmission_at(lens))
    }
}

/// Rotation angle delivered to a site seeing `site_transmission`.
pub fn pulse_angle(event: &PulseEvent, site_transmission: f64) -> f64 {
    if let (Addressing::Masked(m), Some(eps)) = (&event.addressing, event.crosstalk_epsilon) {
        if site_transmission <= m.floor {
            return event.pulse_area * eps;
        }
    }
    event.pulse_area * site_transmission.powf(event.coupling_exponent)
}

/// Time-ordered pulses of one experimental shot.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PulseSequence {
    pub pulses: Vec<PulseEvent>,
}

impl PulseSequence {
    pub fn new(pulses: Vec<PulseEvent>) -> Self {
        Self { pulses }
    }

    /// Checks ordering, parameter ranges, and that the modulator pattern
    /// stays fixed unless `settle_time` separates two masked pulses.
    pub fn validate(&self, settle_time: f64) -> Result<()> {
        for p in &self.pulses {
            if !(p.pulse_area >= 0.0) {
                return Err(Error::Sequence(format!("negative pulse area {}", p.pulse_area)));
            }
            if !(p.duration >= 0.0 && p.start_time >= 0.0) {
                return Err(Error::Sequence("pulse times must be >= 0".into()));
            }
            if !(p.coupling_exponent > 0.0) {
                return Err(Error::Sequence("coupling exponent must be > 0".into()));
            }
            if let Some(eps) = p.crosstalk_epsilon {
                if !(0.0..=1.0).contains(&eps) {
                    return Err(Error::Sequence(format!("crosstalk epsilon {eps} outside [0, 1]")));
                }
            }
            if let Addressing::Masked(m) = &p.addressing {
                if !(m.floor > 0.0 && m.floor <= 1.0) {
                    return Err(Error::Sequence(format!("transmission floor {} outside (0, 1]", m.floor)));
                }
                if let Some((lens, t)) = m.sites.iter().find(|(_, &t)| !(t >= m.floor && t <= 1.0)) {
                    return Err(Error::Sequence(format!("site {lens} transmission {t} outside [floor, 1]")));
                }
            }
        }
        for w in self.pulses.windows(2) {
            if w[1].start_time < w[0].end_time() {
                return Err(Error::Sequence(format!(
                    "pulse at {:.6} s starts before the previous pulse ends at {:.6} s",
                    w[1].start_time,
                    w[0].end_time()
                )));
            }
        }
        let mut last_mask: Option<&PulseEvent> = None;
        for p in &self.pulses {
            let Addressing::Masked(m) = &p.addressing else { continue };
            if let Some(prev) = last_mask {
                let Addressing::Masked(pm) = &prev.addressing else { unreachable!() };
                let gap = p.start_time - prev.end_time();
                if pm != m && gap < settle_time {
                    return Err(Error::Timing(format!(
                        "modulator pattern changes within {:.3} ms but the rise time is {:.3} ms",
                        gap * 1e3,
                        settle_time * 1e3
                    )));
                }
            }
            last_mask = Some(p);
        }
        Ok(())
    }

    /// Free-evolution intervals between consecutive pulses.
    pub fn gaps(&self) -> impl Iterator<Item = f64> + '_ {
        self.pulses.windows(2).map(|w| w[1].start_time - w[0].end_time())
    }
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;

    fn masked(addressed: &[LensIndex], floor: f64) -> Addressing {
        Addressing::Masked(SiteTransmission { floor, sites: addressed.iter().map(|&l| (l, 1.0)).collect() })
    }

    #[test]
    fn angles_with_and_without_override() {
        let a = LensIndex::new(0, 0);
        let dark = LensIndex::new(1, 0);
        let mut ev = PulseEvent { addressing: masked(&[a], 1.0 / 270.0), ..PulseEvent::global(0.0, 2e-4, PI, 0.0) };
        assert_eq!(ev.angle_at(a), PI);
        let leak = ev.angle_at(dark) / PI;
        assert!((leak - 1.0 / 270.0).abs() < 1e-15);
        assert!((leak - 3.7e-3).abs() < 1e-4);
        ev.crosstalk_epsilon = Some(4.2e-3);
        assert!((ev.angle_at(dark) / PI - 4.2e-3).abs() < 1e-15);
        assert_eq!(ev.angle_at(a), PI);
        assert_eq!(pulse_angle(&PulseEvent::global(0.0, 0.0, PI, 0.0), 1.0), PI);
    }

    #[test]
    fn coupling_exponent_scales_leakage() {
        let ev = PulseEvent {
            addressing: masked(&[], 0.01),
            coupling_exponent: 2.0,
            ..PulseEvent::global(0.0, 0.0, PI, 0.0)
        };
        assert!((ev.angle_at(LensIndex::new(3, 3)) - PI * 1e-4).abs() < 1e-15);
    }

    #[test]
    fn overlapping_pulses_rejected() {
        let s = PulseSequence::new(vec![PulseEvent::global(0.0, 1e-4, PI / 2.0, 0.0), PulseEvent::global(5e-5, 1e-4, PI / 2.0, 0.0)]);
        assert!(matches!(s.validate(0.06), Err(Error::Sequence(_))));
    }

    #[test]
    fn fast_mask_change_rejected() {
        let a = masked(&[LensIndex::new(0, 0)], 0.01);
        let b = masked(&[LensIndex::new(1, 0)], 0.01);
        let p = |t: f64, addr: &Addressing| PulseEvent { addressing: addr.clone(), ..PulseEvent::global(t, 1e-4, PI, 0.0) };
        let same = PulseSequence::new(vec![p(0.0, &a), p(1e-3, &a)]);
        same.validate(0.06).unwrap();
        let fast = PulseSequence::new(vec![p(0.0, &a), p(1e-3, &b)]);
        let err = fast.validate(0.06).unwrap_err();
        assert!(matches!(err, Error::Timing(_)));
        assert!(err.to_string().contains("60.000 ms"));
        let slow = PulseSequence::new(vec![p(0.0, &a), p(0.1, &b)]);
        slow.validate(0.06).unwrap();
    }

    #[test]
    fn transmission_range_checked() {
        let bad = Addressing::Masked(SiteTransmission { floor: 0.01, sites: [(LensIndex::new(0, 0), 1.5)].into() });
        let s = PulseSequence::new(vec![PulseEvent { addressing: bad, ..PulseEvent::global(0.0, 0.0, PI, 0.0) }]);
        assert!(s.validate(0.06).is_err());
    }
}
