//! Count files: one measurement setting, the program it ran under, and the
//! detected events.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::combinatorics::ModeOccupation;
use crate::engine::Counts;
use crate::error::{Error, Result};
use crate::unitaries::Unitary;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Setting {
    Rev,
    #[serde(alias = "four")]
    Fourier,
    #[serde(alias = "cyc")]
    Cyclic,
    #[serde(alias = "2cor")]
    Twomode,
    #[serde(alias = "shom")]
    Hom,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountEvent {
    pub pattern: Vec<usize>,
    pub count: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CountFile {
    pub n: usize,
    pub m: usize,
    pub setting: Setting,
    pub unitary: Unitary<f64>,
    pub events: Vec<CountEvent>,
}

impl CountFile {
    pub fn from_counts(n: usize, setting: Setting, unitary: &Unitary<f64>, counts: &Counts) -> Self {
        Self {
            n,
            m: unitary.dim(),
            setting,
            unitary: unitary.clone(),
            events: counts
                .iter()
                .map(|(s, &count)| CountEvent {
                    pattern: s.counts().to_vec(),
                    count,
                })
                .collect(),
        }
    }

    /// Post-selects on `n` detected photons.
    pub fn ingest(self) -> Result<IngestedCounts> {
        if self.unitary.dim() != self.m {
            return Err(Error::Dimension(format!(
                "setting {:?}: unitary has {} modes, file declares {}",
                self.setting,
                self.unitary.dim(),
                self.m
            )));
        }
        let mut counts = Counts::new();
        let (mut raw, mut retained) = (0u64, 0u64);
        for e in &self.events {
            if e.pattern.len() != self.m {
                return Err(Error::Dimension(format!(
                    "setting {:?}: pattern {:?} has {} modes, file declares {}",
                    self.setting,
                    e.pattern,
                    e.pattern.len(),
                    self.m
                )));
            }
            raw += e.count;
            if e.pattern.iter().sum::<usize>() == self.n {
                retained += e.count;
                *counts.entry(ModeOccupation::new(e.pattern.clone())).or_insert(0) += e.count;
            }
        }
        if retained == 0 {
            return Err(Error::EmptyData { n: self.n });
        }
        counts.retain(|_, k| *k > 0);
        Ok(IngestedCounts {
            n: self.n,
            m: self.m,
            setting: self.setting,
            unitary: self.unitary,
            counts,
            raw_events: raw,
            retained,
            dropped: raw - retained,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IngestedCounts {
    pub n: usize,
    pub m: usize,
    pub setting: Setting,
    pub unitary: Unitary<f64>,
    pub counts: Counts,
    pub raw_events: u64,
    pub retained: u64,
    pub dropped: u64,
}

pub fn parse_counts(text: &str) -> Result<IngestedCounts> {
    let file: CountFile = serde_json::from_str(text).map_err(|e| Error::Malformed(format!("count file: {e}")))?;
    file.ingest()
}

pub fn ingest_counts(path: &Path) -> Result<IngestedCounts> {
    let text = std::fs::read_to_string(path)?;
    parse_counts(&text).map_err(|e| match e {
        Error::Malformed(msg) => Error::Malformed(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn export_counts(path: &Path, n: usize, setting: Setting, unitary: &Unitary<f64>, counts: &Counts) -> Result<()> {
    let file = CountFile::from_counts(n, setting, unitary, counts);
    std::fs::write(path, serde_json::to_string_pretty(&file)? + "\n")?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::distinguishability::{obb_model, InternalModel};
    use crate::engine::{sample_counts, ExperimentSpec};
    use crate::unitaries::fourier_unitary;

    fn file(events: &[(&[usize], u64)]) -> CountFile {
        CountFile {
            n: 3,
            m: 3,
            setting: Setting::Fourier,
            unitary: fourier_unitary(3).unwrap(),
            events: events
                .iter()
                .map(|(p, c)| CountEvent {
                    pattern: p.to_vec(),
                    count: *c,
                })
                .collect(),
        }
    }

    #[test]
    fn post_selection() {
        let all = file(&[(&[1, 1, 1], 5), (&[3, 0, 0], 2)]).ingest().unwrap();
        assert_eq!((all.raw_events, all.retained, all.dropped), (7, 7, 0));
        let mixed = file(&[(&[1, 1, 1], 5), (&[1, 1, 0], 4), (&[1, 1, 1], 1)]).ingest().unwrap();
        assert_eq!((mixed.raw_events, mixed.retained, mixed.dropped), (10, 6, 4));
        assert_eq!(mixed.counts.len(), 1);
        assert!(matches!(file(&[(&[1, 0, 0], 3)]).ingest(), Err(Error::EmptyData { n: 3 })));
        assert!(matches!(file(&[(&[1, 1, 1, 0], 3)]).ingest(), Err(Error::Dimension(_))));
        assert!(matches!(parse_counts("{\"n\": 3}"), Err(Error::Malformed(_))));
    }

    #[test]
    fn aliases() {
        let text = serde_json::to_string(&file(&[(&[1, 1, 1], 1)])).unwrap().replace("\"fourier\"", "\"four\"");
        assert_eq!(parse_counts(&text).unwrap().setting, Setting::Fourier);
    }

    #[test]
    fn export_then_ingest() {
        let u = fourier_unitary::<f64>(3).unwrap();
        let spec = ExperimentSpec::new(
            u.clone(),
            ModeOccupation::new(vec![1, 1, 1]),
            InternalModel::PartitionMixture(obb_model(3, 0.2).unwrap()),
        )
        .unwrap();
        let counts = sample_counts(&spec, 2000, 11).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("four.json");
        export_counts(&path, 3, Setting::Fourier, &u, &counts).unwrap();
        let back = ingest_counts(&path).unwrap();
        assert_eq!(back.counts, counts);
        assert_eq!(back.unitary, u);
        assert_eq!(back.retained, 2000);
    }
}
