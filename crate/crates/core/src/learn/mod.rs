//! The three route classifiers, the dataset they share, and the evaluation
//! report. Each model serializes to a human-readable versioned text format
//! so trained models can be inspected, diffed, and reproduced byte-for-byte.

pub mod dataset;
pub mod knn;
pub mod metrics;
pub mod nb;
pub mod tree;

pub use dataset::{train_test_split, Dataset, Label, Sample};
pub use knn::KnnModel;
pub use metrics::{evaluate, Report, RowMetrics};
pub use nb::{ClassParams, NbModel};
pub use tree::{DtModel, Feature, Node, DEFAULT_MAX_DEPTH};

use std::path::Path;

use crate::error::{Error, Result};

pub const DEFAULT_KNN_K: usize = 5;

/// A fitted classifier with a uniform predict contract.
#[derive(Debug, Clone, PartialEq)]
pub enum TrainedModel {
    Knn(KnnModel),
    NaiveBayes(NbModel),
    DecisionTree(DtModel),
}

impl TrainedModel {
    pub fn predict(&self, dv: f64, mp: u8) -> Label {
        match self {
            TrainedModel::Knn(m) => m.predict(dv, mp),
            TrainedModel::NaiveBayes(m) => m.predict(dv, mp),
            TrainedModel::DecisionTree(m) => m.predict(dv, mp),
        }
    }

    pub fn algo(&self) -> &'static str {
        match self {
            TrainedModel::Knn(_) => "knn",
            TrainedModel::NaiveBayes(_) => "nb",
            TrainedModel::DecisionTree(_) => "dt",
        }
    }

    /// Fraction of `data` the model labels correctly.
    pub fn accuracy_on(&self, data: &Dataset) -> f64 {
        if data.is_empty() {
            return 0.0;
        }
        let hits = data
            .samples()
            .iter()
            .filter(|s| self.predict(s.dv, s.mp) == s.label)
            .count();
        hits as f64 / data.len() as f64
    }

    pub fn to_model_string(&self) -> String {
        let mut out = format!("model {} v1\n", self.algo());
        match self {
            TrainedModel::Knn(m) => {
                out.push_str(&format!("k {}\n", m.k()));
                out.push_str(&format!("samples {}\n", m.samples().len()));
                for s in m.samples() {
                    out.push_str(&format!("{} {} {}\n", s.dv, s.mp, s.label));
                }
            }
            TrainedModel::NaiveBayes(m) => {
                for label in [Label::Straight, Label::Turn] {
                    let p = m.params(label);
                    out.push_str(&format!("prior {label} {}\n", p.prior));
                    out.push_str(&format!("dv {label} {} {}\n", p.dv_mean, p.dv_var));
                    out.push_str(&format!("mp {label} {}\n", p.mp_p));
                }
            }
            TrainedModel::DecisionTree(m) => {
                out.push_str(&format!("max_depth {}\n", m.max_depth()));
                write_node(m.root(), &mut out);
            }
        }
        out
    }

    pub fn parse_model(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().peekable();
        let (_, header) = lines
            .next()
            .ok_or_else(|| Error::Parse { line: 1, msg: "empty model file".into() })?;
        let algo = match header.strip_suffix(" v1").and_then(|h| h.strip_prefix("model ")) {
            Some(algo) => algo,
            None => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected \"model <algo> v1\", got {header:?}"),
                })
            }
        };
        match algo {
            "knn" => parse_knn(&mut lines),
            "nb" => parse_nb(&mut lines),
            "dt" => parse_dt(&mut lines),
            other => Err(Error::Parse { line: 1, msg: format!("unknown model algo {other:?}") }),
        }
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse_model(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_model_string())?;
        Ok(())
    }
}

fn write_node(node: &Node, out: &mut String) {
    match node {
        Node::Leaf { label, counts } => {
            out.push_str(&format!("leaf {label} {} {}\n", counts.0, counts.1));
        }
        Node::Split { feature, threshold, left, right } => {
            let name = match feature {
                Feature::Dv => "dv",
                Feature::Mp => "mp",
            };
            out.push_str(&format!("split {name} {threshold}\n"));
            write_node(left, out);
            write_node(right, out);
        }
    }
}

type Lines<'a> = std::iter::Peekable<std::iter::Enumerate<std::str::Lines<'a>>>;

fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line: line + 1, msg: msg.into() }
}

fn next_line<'a>(lines: &mut Lines<'a>) -> Result<(usize, &'a str)> {
    lines
        .next()
        .ok_or_else(|| Error::Parse { line: 0, msg: "unexpected end of model file".into() })
}

fn parse_f64(token: &str, lineno: usize) -> Result<f64> {
    let value: f64 = token
        .parse()
        .map_err(|_| parse_err(lineno, format!("expected a real number, got {token:?}")))?;
    if !value.is_finite() {
        return Err(parse_err(lineno, format!("value must be finite, got {value}")));
    }
    Ok(value)
}

fn expect_field<'a>(lines: &mut Lines<'a>, key: &str) -> Result<(usize, Vec<&'a str>)> {
    let (lineno, line) = next_line(lines)?;
    let mut parts = line.split(' ');
    match parts.next() {
        Some(k) if k == key => Ok((lineno, parts.collect())),
        _ => Err(parse_err(lineno, format!("expected {key:?} field, got {line:?}"))),
    }
}

fn parse_knn(lines: &mut Lines) -> Result<TrainedModel> {
    let (lineno, k_parts) = expect_field(lines, "k")?;
    let k: usize = match k_parts.as_slice() {
        [v] => v.parse().map_err(|_| parse_err(lineno, "k must be an integer"))?,
        _ => return Err(parse_err(lineno, "expected \"k <int>\"")),
    };
    let (lineno, n_parts) = expect_field(lines, "samples")?;
    let n: usize = match n_parts.as_slice() {
        [v] => v.parse().map_err(|_| parse_err(lineno, "samples must be an integer"))?,
        _ => return Err(parse_err(lineno, "expected \"samples <int>\"")),
    };
    let mut samples = Vec::with_capacity(n);
    for _ in 0..n {
        let (lineno, line) = next_line(lines)?;
        let parts: Vec<&str> = line.split(' ').collect();
        let [dv, mp, label] = parts.as_slice() else {
            return Err(parse_err(lineno, format!("expected \"<dv> <mp> <label>\", got {line:?}")));
        };
        let dv = parse_f64(dv, lineno)?;
        let mp: u8 = match *mp {
            "0" => 0,
            "1" => 1,
            other => return Err(parse_err(lineno, format!("mp must be 0 or 1, got {other:?}"))),
        };
        let label: Label = label.parse().map_err(|_| parse_err(lineno, "label must be S or T"))?;
        samples.push(Sample::new(dv, mp, label).map_err(|e| parse_err(lineno, e.to_string()))?);
    }
    if let Some((lineno, line)) = lines.next() {
        return Err(parse_err(lineno, format!("trailing content {line:?}")));
    }
    let model = KnnModel::fit(&Dataset::from_samples(samples), k)?;
    Ok(TrainedModel::Knn(model))
}

fn parse_nb(lines: &mut Lines) -> Result<TrainedModel> {
    let read_class = |lines: &mut Lines, want: Label| -> Result<ClassParams> {
        let (lineno, parts) = expect_field(lines, "prior")?;
        let prior = match parts.as_slice() {
            [l, v] if *l == want.to_string() => parse_f64(v, lineno)?,
            _ => return Err(parse_err(lineno, format!("expected \"prior {want} <p>\""))),
        };
        let (lineno, parts) = expect_field(lines, "dv")?;
        let (dv_mean, dv_var) = match parts.as_slice() {
            [l, m, v] if *l == want.to_string() => (parse_f64(m, lineno)?, parse_f64(v, lineno)?),
            _ => return Err(parse_err(lineno, format!("expected \"dv {want} <mean> <var>\""))),
        };
        let (lineno, parts) = expect_field(lines, "mp")?;
        let mp_p = match parts.as_slice() {
            [l, v] if *l == want.to_string() => parse_f64(v, lineno)?,
            _ => return Err(parse_err(lineno, format!("expected \"mp {want} <p>\""))),
        };
        if !(0.0 < prior && prior < 1.0) || dv_var <= 0.0 || !(0.0 < mp_p && mp_p < 1.0) {
            return Err(parse_err(lineno, "class parameters out of range"));
        }
        Ok(ClassParams { prior, dv_mean, dv_var, mp_p })
    };
    let straight = read_class(lines, Label::Straight)?;
    let turn = read_class(lines, Label::Turn)?;
    if let Some((lineno, line)) = lines.next() {
        return Err(parse_err(lineno, format!("trailing content {line:?}")));
    }
    Ok(TrainedModel::NaiveBayes(NbModel::from_params(straight, turn)))
}

fn parse_dt(lines: &mut Lines) -> Result<TrainedModel> {
    let (lineno, parts) = expect_field(lines, "max_depth")?;
    let max_depth: usize = match parts.as_slice() {
        [v] => v.parse().map_err(|_| parse_err(lineno, "max_depth must be an integer"))?,
        _ => return Err(parse_err(lineno, "expected \"max_depth <int>\"")),
    };
    let root = parse_node(lines)?;
    if let Some((lineno, line)) = lines.next() {
        return Err(parse_err(lineno, format!("trailing content {line:?}")));
    }
    Ok(TrainedModel::DecisionTree(DtModel::from_parts(root, max_depth)))
}

fn parse_node(lines: &mut Lines) -> Result<Node> {
    let (lineno, line) = next_line(lines)?;
    let parts: Vec<&str> = line.split(' ').collect();
    match parts.as_slice() {
        ["leaf", label, straight, turn] => {
            let label: Label = label.parse().map_err(|_| parse_err(lineno, "label must be S or T"))?;
            let straight: usize =
                straight.parse().map_err(|_| parse_err(lineno, "leaf counts must be integers"))?;
            let turn: usize =
                turn.parse().map_err(|_| parse_err(lineno, "leaf counts must be integers"))?;
            Ok(Node::Leaf { label, counts: (straight, turn) })
        }
        ["split", feature, threshold] => {
            let feature = match *feature {
                "dv" => Feature::Dv,
                "mp" => Feature::Mp,
                other => return Err(parse_err(lineno, format!("unknown feature {other:?}"))),
            };
            let threshold = parse_f64(threshold, lineno)?;
            let left = Box::new(parse_node(lines)?);
            let right = Box::new(parse_node(lines)?);
            Ok(Node::Split { feature, threshold, left, right })
        }
        _ => Err(parse_err(lineno, format!("expected leaf or split node, got {line:?}"))),
    }
}
