//! The two-feature dataset the classifiers train on: velocity difference
//! (continuous) and mobility pattern (binary), labeled straight or turn.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::rng::{shuffle, SplitMix64};

const HEADER: &str = "dv,mp,label";

/// Route class: S (straight) or T (turn).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    Straight,
    Turn,
}

impl Label {
    pub fn flipped(self) -> Label {
        match self {
            Label::Straight => Label::Turn,
            Label::Turn => Label::Straight,
        }
    }

    /// Index used for count arrays: S = 0, T = 1.
    pub fn index(self) -> usize {
        match self {
            Label::Straight => 0,
            Label::Turn => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Label::Straight => "S",
            Label::Turn => "T",
        })
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "S" => Ok(Label::Straight),
            "T" => Ok(Label::Turn),
            other => Err(Error::InvalidInput(format!("label must be S or T, got {other:?}"))),
        }
    }
}

/// One labeled observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sample {
    /// Velocity difference between the two radar reads.
    pub dv: f64,
    /// Mobility pattern from the registry, 0 or 1.
    pub mp: u8,
    pub label: Label,
}

impl Sample {
    pub fn new(dv: f64, mp: u8, label: Label) -> Result<Self> {
        if !dv.is_finite() {
            return Err(Error::InvalidParameter(format!("dv must be finite, got {dv}")));
        }
        if mp > 1 {
            return Err(Error::InvalidParameter(format!("mp must be 0 or 1, got {mp}")));
        }
        Ok(Self { dv, mp, label })
    }
}

/// Ordered collection of samples. Emptiness and single-class degeneracy are
/// checked by the fit operations, not at construction.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Dataset {
    samples: Vec<Sample>,
}

impl Dataset {
    pub fn from_samples(samples: Vec<Sample>) -> Self {
        Self { samples }
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    /// (straight, turn) counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let turns = self.samples.iter().filter(|s| s.label == Label::Turn).count();
        (self.samples.len() - turns, turns)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate();
        match lines.next() {
            Some((_, HEADER)) => {}
            Some((_, other)) => {
                return Err(Error::Parse {
                    line: 1,
                    msg: format!("expected header {HEADER:?}, got {other:?}"),
                })
            }
            None => return Err(Error::Parse { line: 1, msg: "missing header".into() }),
        }
        let mut samples = Vec::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let mut parts = line.split(',');
            let (dv, mp, label) = match (parts.next(), parts.next(), parts.next(), parts.next()) {
                (Some(dv), Some(mp), Some(label), None) => (dv, mp, label),
                _ => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("expected DV,MP,LABEL, got {line:?}"),
                    })
                }
            };
            let dv: f64 = dv.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("dv must be a decimal real, got {dv:?}"),
            })?;
            if !dv.is_finite() {
                return Err(Error::Parse { line: lineno, msg: format!("dv must be finite, got {dv}") });
            }
            let mp = match mp {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("mp must be 0 or 1, got {other:?}"),
                    })
                }
            };
            let label = label.parse().map_err(|_| Error::Parse {
                line: lineno,
                msg: format!("label must be S or T, got {label:?}"),
            })?;
            samples.push(Sample { dv, mp, label });
        }
        Ok(Self { samples })
    }

    pub fn to_file_string(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for s in &self.samples {
            out.push_str(&format!("{},{},{}\n", s.dv, s.mp, s.label));
        }
        out
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_file_string())?;
        Ok(())
    }
}

/// Shuffle with Fisher-Yates, then cut: the first `floor(n * test_fraction)`
/// shuffled samples become the test set, the rest the training set.
/// Returns `(train, test)`.
pub fn train_test_split(
    data: &Dataset,
    test_fraction: f64,
    rng: &mut SplitMix64,
) -> Result<(Dataset, Dataset)> {
    if !test_fraction.is_finite() || test_fraction <= 0.0 || test_fraction >= 1.0 {
        return Err(Error::InvalidParameter(format!(
            "test fraction must be in (0, 1), got {test_fraction}"
        )));
    }
    let mut samples = data.samples.clone();
    shuffle(rng, &mut samples);
    let n_test = (samples.len() as f64 * test_fraction).floor() as usize;
    let train = samples.split_off(n_test);
    Ok((Dataset::from_samples(train), Dataset::from_samples(samples)))
}
