//! Clock-state qubit dynamics of thermal ensembles under pulse sequences.
//!
//! Two backends evaluate the same [`PulseSequence`]: the closed-form
//! pathway propagator in [`analytic`] and explicit atoms in [`ensemble`].
//! Populations are always those of `|0>` (the `F=2, m_F=0` clock state),
//! which is what state-selective detection measures.

pub mod analytic;
mod detect;
pub mod ensemble;
mod pulse;
pub mod rng;
mod rotation;

pub use analytic::{echo_signal, ramsey_signal, sequence_signal, Dynamics, EnvelopeModel};
pub use detect::{detect, detect_shot, summarize, AtomsPerSite, Detection, NoiseModel};
pub use ensemble::{mc_ensemble_signal, mc_site_signal, SiteEnsemble};
pub use pulse::{pulse_angle, Addressing, PulseEvent, PulseSequence, SiteTransmission};
pub use rotation::{apply_rotation, precess, AtomState, BlochVector, InitialState, Rotation, SiteRegisterState, Spinor};
