//! Desk-scale simulator and optimization toolkit for satellite-assisted
//! global entanglement distribution.
//!
//! The pipeline has three stages. Lightpath provisioning (`lpp`) selects
//! passive-optical satellite lightpaths over a dynamic LEO constellation by
//! LP relaxation plus randomized or deterministic rounding. Entanglement
//! distribution planning (`edt`) computes optimal generation ratios and
//! swapping rates over the augmented ground network. The slotted protocol
//! simulator (`protosim`) validates the planned expected rates by
//! Monte-Carlo execution.
//!
//! Supporting modules: `netmodel` (domain types), `orbits` (constellation
//! generation, propagation, visibility), `channel` (loss formulas),
//! `lpsolve` (embedded simplex), `scenario` (experiment assembly and the
//! end-to-end driver), `metrics` (cross-run statistics).

pub mod channel;
pub mod edt;
pub mod lpp;
pub mod lpsolve;
pub mod metrics;
pub mod netmodel;
pub mod orbits;
pub mod protosim;
pub mod rng;
pub mod scenario;
