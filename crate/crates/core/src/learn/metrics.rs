//! Precision/recall/F1 evaluation with per-class rows plus micro, macro and
//! weighted averages, mirroring the usual classification-report layout.

use crate::error::{Error, Result};
use crate::learn::dataset::Label;

/// One report row. Zero-denominator metrics are defined as 0.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub support: usize,
}

fn row(tp: usize, fp: usize, fn_: usize, support: usize) -> RowMetrics {
    let precision = if tp + fp == 0 { 0.0 } else { tp as f64 / (tp + fp) as f64 };
    let recall = if tp + fn_ == 0 { 0.0 } else { tp as f64 / (tp + fn_) as f64 };
    let f1 = if precision + recall == 0.0 {
        0.0
    } else {
        2.0 * precision * recall / (precision + recall)
    };
    RowMetrics { precision, recall, f1, support }
}

/// Evaluation report over the two route classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Report {
    pub straight: RowMetrics,
    pub turn: RowMetrics,
    pub micro_avg: RowMetrics,
    pub macro_avg: RowMetrics,
    pub weighted_avg: RowMetrics,
}

impl Report {
    pub fn class(&self, label: Label) -> &RowMetrics {
        match label {
            Label::Straight => &self.straight,
            Label::Turn => &self.turn,
        }
    }

    /// Total number of evaluated samples.
    pub fn total_support(&self) -> usize {
        self.straight.support + self.turn.support
    }

    /// Rows in fixed order: S, T, micro avg, macro avg, weighted avg.
    pub fn rows(&self) -> [(&'static str, &RowMetrics); 5] {
        [
            ("S", &self.straight),
            ("T", &self.turn),
            ("micro avg", &self.micro_avg),
            ("macro avg", &self.macro_avg),
            ("weighted avg", &self.weighted_avg),
        ]
    }

    /// Human-readable table in the layout of the usual evaluation report.
    pub fn to_table_string(&self) -> String {
        let mut out = format!(
            "{:>12} {:>10} {:>10} {:>10} {:>10}\n",
            "", "precision", "recall", "f1-score", "support"
        );
        for (name, m) in self.rows() {
            out.push_str(&format!(
                "{:>12} {:>10.3} {:>10.3} {:>10.3} {:>10}\n",
                name, m.precision, m.recall, m.f1, m.support
            ));
        }
        out
    }

    /// Machine-parsable TSV, stable across runs and platforms.
    pub fn to_tsv_string(&self) -> String {
        let mut out = String::from("class\tprecision\trecall\tf1\tsupport\n");
        for (name, m) in self.rows() {
            out.push_str(&format!(
                "{}\t{:.6}\t{:.6}\t{:.6}\t{}\n",
                name, m.precision, m.recall, m.f1, m.support
            ));
        }
        out
    }
}

/// Score predictions against ground truth. Per class: precision, recall, F1
/// and support (truth count). Micro pools the counts, macro averages the
/// classes unweighted, weighted averages them by support.
pub fn evaluate(predictions: &[Label], truths: &[Label]) -> Result<Report> {
    if predictions.len() != truths.len() {
        return Err(Error::InvalidInput(format!(
            "predictions ({}) and truths ({}) differ in length",
            predictions.len(),
            truths.len()
        )));
    }
    if predictions.is_empty() {
        return Err(Error::InvalidInput("nothing to evaluate".into()));
    }
    // tp/fp/fn per class, indexed by Label::index.
    let mut tp = [0usize; 2];
    let mut fp = [0usize; 2];
    let mut fn_ = [0usize; 2];
    for (&pred, &truth) in predictions.iter().zip(truths) {
        if pred == truth {
            tp[truth.index()] += 1;
        } else {
            fp[pred.index()] += 1;
            fn_[truth.index()] += 1;
        }
    }
    let support = [tp[0] + fn_[0], tp[1] + fn_[1]];
    let n = predictions.len();

    let straight = row(tp[0], fp[0], fn_[0], support[0]);
    let turn = row(tp[1], fp[1], fn_[1], support[1]);
    let micro_avg = row(tp[0] + tp[1], fp[0] + fp[1], fn_[0] + fn_[1], n);

    let macro_avg = RowMetrics {
        precision: (straight.precision + turn.precision) / 2.0,
        recall: (straight.recall + turn.recall) / 2.0,
        f1: (straight.f1 + turn.f1) / 2.0,
        support: n,
    };
    let w = |s: f64, t: f64| (s * support[0] as f64 + t * support[1] as f64) / n as f64;
    let weighted_avg = RowMetrics {
        precision: w(straight.precision, turn.precision),
        recall: w(straight.recall, turn.recall),
        f1: w(straight.f1, turn.f1),
        support: n,
    };
    Ok(Report { straight, turn, micro_avg, macro_avg, weighted_avg })
}

/// Test-only oracle: recompute every metric straight from an explicitly
/// assembled confusion matrix, one rule at a time.
#[doc(hidden)]
pub fn confusion_matrix_oracle(predictions: &[Label], truths: &[Label]) -> Report {
    let count = |p: Label, t: Label| {
        predictions
            .iter()
            .zip(truths)
            .filter(|(&pp, &tt)| pp == p && tt == t)
            .count()
    };
    use Label::{Straight as S, Turn as T};
    let (ss, st, ts, tt) = (count(S, S), count(S, T), count(T, S), count(T, T));
    let n = predictions.len();

    let safe = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
    let f1_of = |p: f64, r: f64| if p + r == 0.0 { 0.0 } else { 2.0 * p * r / (p + r) };

    let sp = safe(ss, ss + st);
    let sr = safe(ss, ss + ts);
    let tp_ = safe(tt, tt + ts);
    let tr = safe(tt, tt + st);
    let straight = RowMetrics { precision: sp, recall: sr, f1: f1_of(sp, sr), support: ss + ts };
    let turn = RowMetrics { precision: tp_, recall: tr, f1: f1_of(tp_, tr), support: tt + st };

    let micro_p = safe(ss + tt, ss + tt + st + ts);
    let micro_r = safe(ss + tt, ss + tt + ts + st);
    let micro = RowMetrics {
        precision: micro_p,
        recall: micro_r,
        f1: f1_of(micro_p, micro_r),
        support: n,
    };
    let macro_avg = RowMetrics {
        precision: (sp + tp_) / 2.0,
        recall: (sr + tr) / 2.0,
        f1: (straight.f1 + turn.f1) / 2.0,
        support: n,
    };
    let wf = |a: f64, b: f64| {
        (a * straight.support as f64 + b * turn.support as f64) / n as f64
    };
    let weighted = RowMetrics {
        precision: wf(sp, tp_),
        recall: wf(sr, tr),
        f1: wf(straight.f1, turn.f1),
        support: n,
    };
    Report { straight, turn, micro_avg: micro, macro_avg, weighted_avg: weighted }
}
