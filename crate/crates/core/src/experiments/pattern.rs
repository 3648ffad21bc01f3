use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::{LensIndex, LensRect};

/// Named illumination patterns over a rectangle of lenses.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PatternKind {
    Full,
    /// Lenses with `(i + j) mod 2 == parity`.
    Checkerboard { parity: u8 },
    /// Blocks of `block_w x block_h` lenses separated by `gap` dark lenses,
    /// tiled from the grid origin.
    Plaquettes { block_w: usize, block_h: usize, gap: usize },
    /// Lenses whose centres lie in the annulus `inner_r <= r <= outer_r`
    /// around `center`, all in lens-pitch units of index space.
    Ring { center: [f64; 2], inner_r: f64, outer_r: f64 },
    Explicit { lenses: Vec<LensIndex> },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternSpec {
    pub kind: PatternKind,
    pub grid: LensRect,
}

/// Selected lenses plus a note when the selection is empty.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PatternSelection {
    pub lenses: BTreeSet<LensIndex>,
    pub warning: Option<String>,
}

impl PatternSpec {
    pub fn new(kind: PatternKind, grid: LensRect) -> Self {
        Self { kind, grid }
    }

    pub fn validate(&self) -> Result<()> {
        match &self.kind {
            PatternKind::Full => {}
            PatternKind::Checkerboard { parity } => {
                if *parity > 1 {
                    return Err(Error::domain("pattern.parity", "must be 0 or 1"));
                }
            }
            PatternKind::Plaquettes { block_w, block_h, .. } => {
                if *block_w == 0 || *block_h == 0 {
                    return Err(Error::domain("pattern.block", "block sizes must be >= 1"));
                }
            }
            PatternKind::Ring { center, inner_r, outer_r } => {
                if !(center.iter().all(|c| c.is_finite()) && *inner_r >= 0.0 && outer_r > inner_r) {
                    return Err(Error::domain("pattern.ring", "need 0 <= inner_r < outer_r and a finite centre"));
                }
            }
            PatternKind::Explicit { lenses } => {
                if let Some(l) = lenses.iter().find(|l| !self.grid.contains(**l)) {
                    return Err(Error::Addressing { lens: *l, reason: "explicit lens outside the pattern grid".into() });
                }
            }
        }
        Ok(())
    }
}

pub fn make_pattern(spec: &PatternSpec) -> Result<PatternSelection> {
    spec.validate()?;
    let g = spec.grid;
    let lenses: BTreeSet<LensIndex> = match &spec.kind {
        PatternKind::Full => g.iter().collect(),
        PatternKind::Checkerboard { parity } => g.iter().filter(|l| (l.i + l.j) % 2 == *parity as usize).collect(),
        PatternKind::Plaquettes { block_w, block_h, gap } => g
            .iter()
            .filter(|l| (l.i - g.i0) % (block_w + gap) < *block_w && (l.j - g.j0) % (block_h + gap) < *block_h)
            .collect(),
        PatternKind::Ring { center, inner_r, outer_r } => g
            .iter()
            .filter(|l| {
                let r = (l.i as f64 - center[0]).hypot(l.j as f64 - center[1]);
                r >= *inner_r && r <= *outer_r
            })
            .collect(),
        PatternKind::Explicit { lenses } => lenses.iter().copied().collect(),
    };
    let warning = lenses.is_empty().then(|| "pattern selects no lens; the array stays dark".to_string());
    Ok(PatternSelection { lenses, warning })
}
