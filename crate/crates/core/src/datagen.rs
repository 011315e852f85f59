//! Seeded generator for the dummy training/evaluation datasets.
//!
//! The generative story follows the pipeline's physics: turning vehicles
//! decelerate between the two radar reads (dv centered at -3, the turn-row
//! velocity difference of the sample table) and mostly carry a turn-history
//! mobility pattern, while straight-through vehicles hold speed. A small
//! label-noise rate keeps the classes from being perfectly separable. The
//! default distribution parameters were calibrated once (seed 42, doubled
//! counts, 50/50 split, depth-8 tree) so the held-out decision tree lands
//! at macro-F1 ~0.96, then frozen; the default class counts match the
//! evaluation supports (1491 straight, 1508 turn).

use crate::error::{Error, Result};
use crate::learn::{Dataset, Label, Sample};
use crate::rng::{shuffle, SplitMix64};

/// Seed committed for the calibration run and used as the flag default.
pub const DEFAULT_SEED: u64 = 42;

/// Full parameterization of [`generate`].
#[derive(Debug, Clone, PartialEq)]
pub struct GenConfig {
    pub n_straight: usize,
    pub n_turn: usize,
    pub mu_dv_straight: f64,
    pub sigma_dv_straight: f64,
    pub mu_dv_turn: f64,
    pub sigma_dv_turn: f64,
    /// P(mp = 1) for straight-labeled vehicles.
    pub p_mp_straight: f64,
    /// P(mp = 1) for turn-labeled vehicles.
    pub p_mp_turn: f64,
    /// Probability of flipping each label after sampling.
    pub label_noise: f64,
    pub seed: u64,
}

impl Default for GenConfig {
    fn default() -> Self {
        Self {
            n_straight: 1491,
            n_turn: 1508,
            mu_dv_straight: 0.0,
            sigma_dv_straight: 0.5,
            mu_dv_turn: -3.0,
            sigma_dv_turn: 1.0,
            p_mp_straight: 0.15,
            p_mp_turn: 0.85,
            label_noise: 0.01,
            seed: DEFAULT_SEED,
        }
    }
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        for (name, sigma) in [
            ("sigma-dv-straight", self.sigma_dv_straight),
            ("sigma-dv-turn", self.sigma_dv_turn),
        ] {
            if !sigma.is_finite() || sigma <= 0.0 {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be positive and finite, got {sigma}"
                )));
            }
        }
        for (name, mu) in [
            ("mu-dv-straight", self.mu_dv_straight),
            ("mu-dv-turn", self.mu_dv_turn),
        ] {
            if !mu.is_finite() {
                return Err(Error::InvalidParameter(format!("{name} must be finite, got {mu}")));
            }
        }
        for (name, p) in [
            ("p-mp-straight", self.p_mp_straight),
            ("p-mp-turn", self.p_mp_turn),
            ("label-noise", self.label_noise),
        ] {
            if !p.is_finite() || !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidParameter(format!(
                    "{name} must be a probability in [0, 1], got {p}"
                )));
            }
        }
        Ok(())
    }
}

/// Draw the configured samples (all straight rows first, then all turn
/// rows), apply label noise, then shuffle. Everything is driven by one
/// SplitMix64 stream seeded from the config, so the output is reproducible
/// byte-for-byte: per sample two uniform draws for dv (Box-Muller) and one
/// for mp, then one noise draw per sample, then the Fisher-Yates sweep.
pub fn generate(config: &GenConfig) -> Result<Dataset> {
    config.validate()?;
    let mut rng = SplitMix64::new(config.seed);
    let mut samples = Vec::with_capacity(config.n_straight + config.n_turn);
    let groups = [
        (
            config.n_straight,
            Label::Straight,
            config.mu_dv_straight,
            config.sigma_dv_straight,
            config.p_mp_straight,
        ),
        (config.n_turn, Label::Turn, config.mu_dv_turn, config.sigma_dv_turn, config.p_mp_turn),
    ];
    for (n, label, mu, sigma, p_mp) in groups {
        for _ in 0..n {
            let dv = rng.gaussian(mu, sigma);
            let mp = u8::from(rng.uniform01() <= p_mp);
            samples.push(Sample { dv, mp, label });
        }
    }
    for sample in &mut samples {
        if rng.uniform01() <= config.label_noise {
            sample.label = sample.label.flipped();
        }
    }
    shuffle(&mut rng, &mut samples);
    Ok(Dataset::from_samples(samples))
}
