//! Monte-Carlo ensemble backend: explicit atoms with sampled motional
//! energies, each carrying its own two-level amplitudes.

use rand::Rng;
use rand_distr::{Cauchy, Distribution, Gamma};
use rayon::prelude::*;

use super::analytic::Dynamics;
use super::pulse::PulseSequence;
use super::rng::{stream, StreamPurpose};
use super::rotation::{precess, AtomState, InitialState, Rotation};
use crate::constants::K_B;
use crate::error::{Error, Result};
use crate::trap::dephasing_tau;
use crate::LensIndex;

/// Thermal ensemble held in one trap.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteEnsemble {
    pub lens: LensIndex,
    /// Trap depth, joules.
    pub depth: f64,
    /// Kelvin.
    pub temperature: f64,
    /// Differential light shift at the trap bottom, rad/s.
    pub delta0: f64,
    pub kappa: f64,
    pub initial: InitialState,
}

impl SiteEnsemble {
    pub fn tau(&self) -> f64 {
        if self.depth <= 0.0 {
            return f64::INFINITY;
        }
        dephasing_tau(self.depth, self.temperature, self.delta0, self.kappa).unwrap_or(f64::INFINITY)
    }

    /// Detuning of an atom of energy `energy` relative to the trap-bottom
    /// resonance, rad/s.
    pub fn detuning_offset(&self, energy: f64) -> f64 {
        if self.depth <= 0.0 {
            0.0
        } else {
            -self.kappa * self.delta0 * energy / self.depth
        }
    }

    /// Draws `n` atoms from `rho(E) ~ E^2 exp(-E / k_B T)`.
    pub fn sample_atoms<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Vec<AtomState> {
        let kt = K_B * self.temperature;
        let amplitudes = self.initial.spinor();
        let gamma = (kt > 0.0).then(|| Gamma::new(3.0, kt).expect("shape and scale are positive"));
        (0..n)
            .map(|_| AtomState { energy: gamma.map_or(0.0, |g| g.sample(rng)), phase: 0.0, amplitudes })
            .collect()
    }
}

/// Evolves `atoms` through `sequence` in place.
pub fn evolve_atoms<R: Rng + ?Sized>(
    atoms: &mut [AtomState],
    site: &SiteEnsemble,
    sequence: &PulseSequence,
    dynamics: &Dynamics,
    rng: &mut R,
) {
    let rotations: Vec<Rotation> =
        sequence.pulses.iter().map(|p| Rotation::new(p.angle_at(site.lens), p.axis_phase)).collect();
    let gaps: Vec<f64> = sequence.gaps().collect();
    let kicks: Vec<Option<Cauchy<f64>>> = gaps
        .iter()
        .map(|&g| {
            let scale = g / dynamics.t2_irreversible;
            (scale > 0.0).then(|| Cauchy::new(0.0, scale).expect("positive scale"))
        })
        .collect();
    for atom in atoms.iter_mut() {
        let detuning = dynamics.ramsey_detuning + site.detuning_offset(atom.energy);
        for (k, r) in rotations.iter().enumerate() {
            atom.amplitudes = r.apply(&atom.amplitudes);
            if let Some(&gap) = gaps.get(k) {
                // Cauchy phase kicks average to exp(-gap / T2) and do not refocus
                let kick = kicks[k].map_or(0.0, |c| c.sample(rng));
                let phase = detuning * gap + kick;
                atom.phase += phase;
                atom.amplitudes = precess(&atom.amplitudes, phase);
            }
        }
    }
}

/// Mean `|0>` population of `n_atoms` sampled atoms at one site.
pub fn mc_site_signal<R: Rng + ?Sized>(
    sequence: &PulseSequence,
    site: &SiteEnsemble,
    n_atoms: usize,
    dynamics: &Dynamics,
    rng: &mut R,
) -> Result<f64> {
    if n_atoms < 1 {
        return Err(Error::domain("n_atoms", "must be >= 1"));
    }
    let mut atoms = site.sample_atoms(n_atoms, rng);
    evolve_atoms(&mut atoms, site, sequence, dynamics, rng);
    Ok(atoms.iter().map(|a| a.amplitudes[0].norm_sqr()).sum::<f64>() / n_atoms as f64)
}

/// Monte-Carlo `|0>` population for every site, one independent stream per
/// `(site, point)`.
pub fn mc_ensemble_signal(
    sequence: &PulseSequence,
    sites: &[SiteEnsemble],
    n_atoms: usize,
    dynamics: &Dynamics,
    seed: u64,
    point: usize,
) -> Result<Vec<(LensIndex, f64)>> {
    sites
        .par_iter()
        .map(|s| {
            let mut rng = stream(seed, StreamPurpose::Ensemble, s.lens, point, 0);
            Ok((s.lens, mc_site_signal(sequence, s, n_atoms, dynamics, &mut rng)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use std::f64::consts::{FRAC_PI_2, PI};

    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::constants::MICRO;
    use crate::spin::analytic::{sequence_signal, EnvelopeModel};
    use crate::spin::pulse::PulseEvent;

    fn site() -> SiteEnsemble {
        let depth = 60.0 * MICRO * K_B;
        SiteEnsemble {
            lens: LensIndex::new(0, 0),
            depth,
            temperature: 6.0 * MICRO,
            delta0: 2.0 * PI * 280.0,
            kappa: 0.5,
            initial: InitialState::One,
        }
    }

    fn ramsey(t: f64) -> PulseSequence {
        PulseSequence::new(vec![PulseEvent::global(0.0, 1e-4, FRAC_PI_2, 0.0), PulseEvent::global(1e-4 + t, 1e-4, FRAC_PI_2, 0.0)])
    }

    #[test]
    fn single_zero_energy_atom_is_pure_cosine() {
        let s = SiteEnsemble { temperature: 0.0, ..site() };
        let d = Dynamics { ramsey_detuning: 2.0 * PI * 1e3, t2_irreversible: f64::INFINITY };
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for t in [0.0, 0.25e-3, 1.3e-3, 30e-3] {
            let p = mc_site_signal(&ramsey(t), &s, 1, &d, &mut rng).unwrap();
            assert!((p - 0.5 * (1.0 + (d.ramsey_detuning * t).cos())).abs() < 1e-12);
        }
    }

    #[test]
    fn fixed_seed_is_bit_identical() {
        let d = Dynamics { ramsey_detuning: 2.0 * PI * 1e3, t2_irreversible: 0.05 };
        let a = mc_ensemble_signal(&ramsey(3e-3), &[site()], 2000, &d, 11, 4).unwrap();
        let b = mc_ensemble_signal(&ramsey(3e-3), &[site()], 2000, &d, 11, 4).unwrap();
        assert_eq!(a[0].1.to_bits(), b[0].1.to_bits());
    }

    #[test]
    fn norms_preserved_per_atom() {
        let d = Dynamics { ramsey_detuning: 2.0 * PI * 1e3, t2_irreversible: 0.05 };
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut atoms = site().sample_atoms(500, &mut rng);
        evolve_atoms(&mut atoms, &site(), &ramsey(7e-3), &d, &mut rng);
        assert!(atoms.iter().all(|a| (a.norm_sqr() - 1.0).abs() < 1e-12));
    }

    #[test]
    fn converges_to_complex_envelope() {
        // 3 standard errors of a mean of populations in [0, 1]
        let d = Dynamics { ramsey_detuning: 2.0 * PI * 1e3, t2_irreversible: 0.05 };
        let s = site();
        let n = 100_000;
        for (k, t) in [0.0, 2e-3, 5e-3, 11e-3, 25e-3].into_iter().enumerate() {
            let mc = mc_ensemble_signal(&ramsey(t), &[s], n, &d, 99, k).unwrap()[0].1;
            let an = sequence_signal(&ramsey(t), s.lens, InitialState::One, &d, s.tau(), EnvelopeModel::Complex);
            let se = 0.5 / (n as f64).sqrt();
            assert!((mc - an).abs() < 3.0 * se, "t={t}: mc {mc} analytic {an}");
        }
    }
}
