use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::constants::MILLI;
use crate::error::{Error, Result};

/// Per-site atom number range (inclusive), drawn uniformly per site.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AtomsPerSite {
    pub min: u64,
    pub max: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Detection sampling and crosstalk leakage on or off.
    pub enabled: bool,
    pub atoms_per_site: AtomsPerSite,
    pub shots_per_point: u32,
    pub rng_seed: u64,
    /// Irreversible coherence decay time, seconds.
    pub irreversible_t2: f64,
    /// Leakage rotation ratio at dark sites; `None` derives it from the
    /// modulator contrast.
    pub crosstalk_epsilon: Option<f64>,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self {
            enabled: true,
            atoms_per_site: AtomsPerSite { min: 10, max: 100 },
            shots_per_point: 5,
            rng_seed: 0,
            irreversible_t2: 50.0 * MILLI,
            crosstalk_epsilon: Some(4.2e-3),
        }
    }
}

impl NoiseModel {
    pub fn validate(&self) -> Result<()> {
        let a = self.atoms_per_site;
        if a.min < 1 || a.max < a.min {
            return Err(Error::domain("noise.atoms_per_site", "need 1 <= min <= max"));
        }
        if self.shots_per_point < 1 {
            return Err(Error::domain("noise.shots_per_point", "must be >= 1"));
        }
        if !(self.irreversible_t2 > 0.0) {
            return Err(Error::domain("noise.irreversible_t2", "must be > 0"));
        }
        if let Some(eps) = self.crosstalk_epsilon {
            if !(0.0..=1.0).contains(&eps) {
                return Err(Error::domain("noise.crosstalk_epsilon", "must lie in [0, 1]"));
            }
        }
        Ok(())
    }

    /// Leakage ratio to put on masked pulses: zero when noise is disabled.
    pub fn effective_crosstalk(&self) -> Option<f64> {
        if self.enabled {
            self.crosstalk_epsilon
        } else {
            Some(0.0)
        }
    }

    pub fn draw_atom_count<R: Rng + ?Sized>(&self, rng: &mut R) -> u64 {
        rng.random_range(self.atoms_per_site.min..=self.atoms_per_site.max)
    }
}

/// Averaged detected fraction and its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Detection {
    pub mean: f64,
    pub sem: f64,
}

/// One detection shot: fraction of `atoms` found in `|0>`.
pub fn detect_shot<R: Rng + ?Sized>(p0_true: f64, atoms: u64, rng: &mut R) -> Result<f64> {
    if !(-1e-12..=1.0 + 1e-12).contains(&p0_true) {
        return Err(Error::domain("p0", format!("{p0_true} outside [0, 1]")));
    }
    if atoms < 1 {
        return Err(Error::domain("atoms", "must be >= 1"));
    }
    let binom = Binomial::new(atoms, p0_true.clamp(0.0, 1.0)).map_err(|e| Error::domain("p0", e.to_string()))?;
    Ok(binom.sample(rng) as f64 / atoms as f64)
}

/// Mean and standard error of per-shot fractions.
pub fn summarize(fractions: &[f64]) -> Detection {
    let n = fractions.len() as f64;
    let mean = fractions.iter().sum::<f64>() / n;
    let sem = if fractions.len() > 1 {
        (fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0) / n).sqrt()
    } else {
        0.0
    };
    Detection { mean, sem }
}

/// State-selective detection: each shot counts the `|0>` atoms out of
/// `atoms`; the result is the mean fraction over `shots`.
pub fn detect<R: Rng + ?Sized>(p0_true: f64, atoms: u64, shots: u32, rng: &mut R) -> Result<Detection> {
    if shots < 1 {
        return Err(Error::domain("shots", "must be >= 1"));
    }
    let fracs = (0..shots).map(|_| detect_shot(p0_true, atoms, rng)).collect::<Result<Vec<_>>>()?;
    Ok(summarize(&fracs))
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    use super::*;

    #[test]
    fn certain_outcomes_are_exact() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(detect(0.0, 57, 5, &mut rng).unwrap(), Detection { mean: 0.0, sem: 0.0 });
        assert_eq!(detect(1.0, 57, 5, &mut rng).unwrap(), Detection { mean: 1.0, sem: 0.0 });
    }

    #[test]
    fn binomial_spread_matches_formula() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let draws: Vec<f64> = (0..20_000).map(|_| detect(0.5, 100, 5, &mut rng).unwrap().mean).collect();
        let n = draws.len() as f64;
        let mean = draws.iter().sum::<f64>() / n;
        let std = (draws.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
        let expected = (0.25f64 / 500.0).sqrt();
        assert!((mean - 0.5).abs() < 1e-3, "{mean}");
        assert!((std - expected).abs() / expected < 0.03, "{std} vs {expected}");
        assert!((expected - 0.022).abs() < 5e-4);
    }

    #[test]
    fn out_of_range_probability_rejected() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(detect(1.5, 10, 1, &mut rng).is_err());
    }

    #[test]
    fn disabled_noise_zeroes_crosstalk() {
        let n = NoiseModel { enabled: false, ..Default::default() };
        assert_eq!(n.effective_crosstalk(), Some(0.0));
        assert_eq!(NoiseModel::default().effective_crosstalk(), Some(4.2e-3));
    }
}
