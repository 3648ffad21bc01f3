//! Configuration, file formats and run manifests.

mod config;
mod csv;
mod pgm;
mod svg;

use std::path::Path;

use serde::Serialize;
use sha2::{Digest, Sha256};

pub use config::{
    parse_config, BeamConfig, EnsembleConfig, ExperimentConfig, ImagingConfig, MlaConfig, NoiseConfig, RunConfig,
    SlmConfig, SpeciesConfig, SCHEMA_VERSION,
};
pub use csv::{fmt_sig9, results_csv, traps_csv, RESULTS_HEADER, TRAPS_HEADER};
pub use pgm::{decode_pgm, encode_pgm, image_to_pgm, mask_from_pgm, mask_to_pgm};
pub use svg::render_plot;

use crate::error::{Error, Result};

pub const TOOL_NAME: &str = env!("CARGO_PKG_NAME");
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Provenance record written next to every output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Manifest {
    pub tool: String,
    pub version: String,
    pub verb: String,
    pub seed: u64,
    /// SHA-256 of the canonical configuration bytes written alongside.
    pub config_sha256: String,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn new(verb: &str, seed: u64, canonical_config: &str, outputs: Vec<String>) -> Self {
        Self {
            tool: TOOL_NAME.into(),
            version: TOOL_VERSION.into(),
            verb: verb.into(),
            seed,
            config_sha256: hex::encode(Sha256::digest(canonical_config.as_bytes())),
            outputs,
        }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("manifest is serialisable");
        s.push('\n');
        s
    }
}

pub fn read_file(path: &Path) -> Result<Vec<u8>> {
    std::fs::read(path).map_err(|e| Error::io(path, e))
}

pub fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn manifest_hash_covers_config_bytes() {
        let a = Manifest::new("ramsey", 1, "{}\n", vec![]);
        let b = Manifest::new("ramsey", 1, "{ }\n", vec![]);
        assert_ne!(a.config_sha256, b.config_sha256);
        assert_eq!(a.config_sha256.len(), 64);
    }

    #[test]
    fn io_errors_carry_path() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.json");
        match read_file(&missing) {
            Err(e @ Error::Io { .. }) => {
                assert_eq!(e.exit_code(), 4);
                assert!(e.to_string().contains("nope.json"));
            }
            other => panic!("{other:?}"),
        }
    }
}
