//! Naive Bayes with a Gaussian model for dv and a Laplace-smoothed Bernoulli
//! model for mp, scored in log space. Priors come from class frequencies.

use crate::error::{Error, Result};
use crate::learn::dataset::{Dataset, Label};

/// Variance floor applied to the per-class dv variance so that constant
/// features cannot produce a degenerate density.
pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Per-class parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassParams {
    pub prior: f64,
    pub dv_mean: f64,
    pub dv_var: f64,
    /// Laplace-smoothed P(mp = 1 | class): (count + 1) / (n + 2).
    pub mp_p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NbModel {
    straight: ClassParams,
    turn: ClassParams,
}

fn class_params(dvs: &[f64], mp_ones: usize, n_total: usize) -> ClassParams {
    let n = dvs.len();
    let mean = dvs.iter().sum::<f64>() / n as f64;
    let var = dvs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n as f64;
    ClassParams {
        prior: n as f64 / n_total as f64,
        dv_mean: mean,
        dv_var: var.max(VARIANCE_FLOOR),
        mp_p: (mp_ones + 1) as f64 / (n + 2) as f64,
    }
}

fn log_gaussian(x: f64, mean: f64, var: f64) -> f64 {
    let d = x - mean;
    -0.5 * (d * d / var + (std::f64::consts::TAU * var).ln())
}

impl NbModel {
    pub fn fit(data: &Dataset) -> Result<Self> {
        let mut dvs = [Vec::new(), Vec::new()];
        let mut ones = [0usize; 2];
        for s in data.samples() {
            dvs[s.label.index()].push(s.dv);
            ones[s.label.index()] += s.mp as usize;
        }
        if dvs[0].is_empty() || dvs[1].is_empty() {
            return Err(Error::DegenerateDataset(
                "naive Bayes needs both classes present".into(),
            ));
        }
        Ok(Self {
            straight: class_params(&dvs[0], ones[0], data.len()),
            turn: class_params(&dvs[1], ones[1], data.len()),
        })
    }

    pub fn params(&self, label: Label) -> &ClassParams {
        match label {
            Label::Straight => &self.straight,
            Label::Turn => &self.turn,
        }
    }

    pub fn from_params(straight: ClassParams, turn: ClassParams) -> Self {
        Self { straight, turn }
    }

    /// Log posterior score (up to the shared evidence term).
    pub fn log_score(&self, label: Label, dv: f64, mp: u8) -> f64 {
        let p = self.params(label);
        let mp_term = if mp == 1 { p.mp_p.ln() } else { (1.0 - p.mp_p).ln() };
        p.prior.ln() + log_gaussian(dv, p.dv_mean, p.dv_var) + mp_term
    }

    /// Argmax of the class scores; an exact tie resolves to S.
    pub fn predict(&self, dv: f64, mp: u8) -> Label {
        if self.log_score(Label::Turn, dv, mp) > self.log_score(Label::Straight, dv, mp) {
            Label::Turn
        } else {
            Label::Straight
        }
    }
}

/// Test-only oracle: score classes by the direct density product without
/// logarithms and compare. Returns None when the products are within
/// `rel_tol` of each other (too close to call either way).
#[doc(hidden)]
pub fn density_product_predict(
    model: &NbModel,
    dv: f64,
    mp: u8,
    rel_tol: f64,
) -> Option<Label> {
    let score = |p: &ClassParams| {
        let d = dv - p.dv_mean;
        let gauss = (-0.5 * d * d / p.dv_var).exp()
            / (std::f64::consts::TAU * p.dv_var).sqrt();
        let bern = if mp == 1 { p.mp_p } else { 1.0 - p.mp_p };
        p.prior * gauss * bern
    };
    let s = score(model.params(Label::Straight));
    let t = score(model.params(Label::Turn));
    if (s - t).abs() <= rel_tol * s.abs().max(t.abs()) {
        return None;
    }
    Some(if t > s { Label::Turn } else { Label::Straight })
}
