//! Plate-keyed store of registered vehicles and their mobility pattern.
//!
//! The registry gates the whole pipeline: an unrecognized plate terminates a
//! run before any radar operation. The on-disk format is a line-oriented
//! text file with header `plate,mp`; saves are sorted by plate so repeated
//! saves of the same registry are byte-identical.

use std::collections::BTreeMap;
use std::fmt;
use std::path::Path;

use crate::error::{Error, Result};
use crate::plate::PlateText;

const HEADER: &str = "plate,mp";

/// One registered vehicle. `mobility_pattern` is the binary digest of the
/// vehicle's history at this crossroad: 1 if it turned on the majority of
/// past trips, 0 if it went straight.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VehicleRecord {
    plate: PlateText,
    mobility_pattern: u8,
}

impl VehicleRecord {
    pub fn new(plate: PlateText, mobility_pattern: u8) -> Result<Self> {
        if mobility_pattern > 1 {
            return Err(Error::InvalidParameter(format!(
                "mobility pattern must be 0 or 1, got {mobility_pattern}"
            )));
        }
        Ok(Self { plate, mobility_pattern })
    }

    pub fn plate(&self) -> &PlateText {
        &self.plate
    }

    pub fn mobility_pattern(&self) -> u8 {
        self.mobility_pattern
    }
}

impl fmt::Display for VehicleRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{},{}", self.plate, self.mobility_pattern)
    }
}

/// The database repository: plate -> record, unique by construction.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Registry {
    records: BTreeMap<PlateText, VehicleRecord>,
}

impl Registry {
    pub fn new() -> Self {
        Self::default()
    }

    /// The stored record for `plate`, if the vehicle is registered. Absence
    /// is a normal outcome, not an error.
    pub fn lookup(&self, plate: &PlateText) -> Option<&VehicleRecord> {
        self.records.get(plate)
    }

    /// Insert or replace; last write wins.
    pub fn upsert(&mut self, record: VehicleRecord) {
        self.records.insert(record.plate.clone(), record);
    }

    /// Remove a plate. Returns whether it was present.
    pub fn remove(&mut self, plate: &PlateText) -> bool {
        self.records.remove(plate).is_some()
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in plate order.
    pub fn iter(&self) -> impl Iterator<Item = &VehicleRecord> {
        self.records.values()
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
        let mut registry = Registry::new();
        for (i, line) in lines {
            let lineno = i + 1;
            let (plate, mp) = line.split_once(',').ok_or_else(|| Error::Parse {
                line: lineno,
                msg: format!("expected PLATE,MP, got {line:?}"),
            })?;
            let plate = PlateText::new(plate).map_err(|e| Error::Parse {
                line: lineno,
                msg: e.to_string(),
            })?;
            let mp = match mp {
                "0" => 0,
                "1" => 1,
                other => {
                    return Err(Error::Parse {
                        line: lineno,
                        msg: format!("mobility pattern must be 0 or 1, got {other:?}"),
                    })
                }
            };
            if registry.records.contains_key(&plate) {
                return Err(Error::DuplicateKey(plate.to_string()));
            }
            registry.upsert(VehicleRecord::new(plate, mp)?);
        }
        Ok(registry)
    }

    /// Canonical serialization: header plus one `PLATE,D` line per record,
    /// sorted by plate, LF endings, no trailing whitespace.
    pub fn to_file_string(&self) -> String {
        let mut out = String::from(HEADER);
        out.push('\n');
        for record in self.records.values() {
            out.push_str(&record.to_string());
            out.push('\n');
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
