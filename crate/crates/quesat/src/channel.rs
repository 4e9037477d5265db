//! Loss and success-probability models for all channel types: slotted
//! elementary-ebit generation over a lossy channel, fiber attenuation, and
//! end-to-end satellite lightpath survival.

use crate::netmodel::{Gsl, Satellite};

/// Parameters of the slotted generation protocol: a source of efficiency
/// `q_gen` fires `n_attempts` times per slot and keeps at most one ebit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenerationParams {
    /// Source generation efficiency, in (0, 1].
    pub q_gen: f64,
    /// Attempts per time slot, >= 1.
    pub n_attempts: u32,
}

impl GenerationParams {
    pub fn new(q_gen: f64, n_attempts: u32) -> Self {
        debug_assert!(q_gen > 0.0 && q_gen <= 1.0);
        debug_assert!(n_attempts >= 1);
        Self { q_gen, n_attempts }
    }
}

/// Fiber channel parameters: attenuation in dB/km and span length.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FiberParams {
    /// Attenuation coefficient, dB/km, > 0.
    pub gamma_db_per_km: f64,
    /// Fiber length in km, >= 0.
    pub length_km: f64,
}

/// Photon loss probability of a fiber span: `1 - 10^(-L*gamma/10)`.
///
/// This is the *loss* probability; the survival probability `1 - q_chan`
/// is what feeds the per-attempt success in [`link_success`].
pub fn fiber_loss(params: FiberParams) -> f64 {
    1.0 - 10f64.powf(-(params.length_km * params.gamma_db_per_km) / 10.0)
}

/// Per-slot elementary-ebit generation success over a lossy channel:
/// `1 - [1 - q_gen * (1 - q_chan)]^N`, evaluated through `ln_1p`/`exp_m1`
/// so probabilities far below machine epsilon survive instead of rounding
/// to zero.
pub fn link_success(gen: GenerationParams, q_chan: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&q_chan));
    let per_attempt = gen.q_gen * (1.0 - q_chan);
    if per_attempt >= 1.0 {
        return 1.0;
    }
    -((gen.n_attempts as f64) * (-per_attempt).ln_1p()).exp_m1()
}

/// End-to-end survival of a satellite lightpath: the product of both GSL
/// survivals and the lens survival of every satellite along the path.
pub fn lightpath_success(uplink: &Gsl, satellites: &[&Satellite], downlink: &Gsl) -> f64 {
    assert!(!satellites.is_empty(), "lightpath must traverse at least one satellite");
    uplink.survival
        * downlink.survival
        * satellites.iter().map(|s| s.lens_success).product::<f64>()
}
