//! Patterns, pulse protocols and scan orchestration over the whole
//! apparatus, plus synthetic fluorescence images.

mod apparatus;
mod image;
mod pattern;
mod scan;

pub use apparatus::{Apparatus, SiteReport};
pub use image::{synth_fluorescence_image, ImageGray, ImageParams};
pub use pattern::{make_pattern, PatternKind, PatternSelection, PatternSpec};
pub use scan::{
    build_register, fringe_contrast, run_scan, Backend, ContrastRow, ExperimentSpec, Protocol, Register, ResultMetadata,
    ResultRow, ResultTable, ScanRange,
};
