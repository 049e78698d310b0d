//! `manifest.json` describing a labelled dataset of tensor files.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::ingest::pointcloud::NormStats;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Split {
    Train,
    Test,
}

impl std::str::FromStr for Split {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "train" => Ok(Split::Train),
            "test" => Ok(Split::Test),
            other => Err(Error::Parameter(format!("unknown split '{other}'"))),
        }
    }
}

impl std::fmt::Display for Split {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Split::Train => "train",
            Split::Test => "test",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestSample {
    /// Relative paths resolve against the manifest's directory.
    pub path: PathBuf,
    /// Class name; must appear in `classes`.
    pub label: String,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub classes: Vec<String>,
    pub samples: Vec<ManifestSample>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub norm_stats: Option<NormStats>,
    #[serde(default)]
    pub normalize: bool,
}

impl DatasetManifest {
    pub fn validate(&self) -> Result<()> {
        if self.classes.is_empty() {
            return Err(Error::Format("manifest declares no classes".into()));
        }
        for (i, c) in self.classes.iter().enumerate() {
            if self.classes[..i].contains(c) {
                return Err(Error::Format(format!("duplicate class '{c}'")));
            }
        }
        for s in &self.samples {
            if !self.classes.contains(&s.label) {
                return Err(Error::Format(format!(
                    "sample {} has undeclared label '{}'",
                    s.path.display(),
                    s.label
                )));
            }
        }
        if let Some(stats) = &self.norm_stats {
            if stats.mean.len() != stats.std.len() {
                return Err(Error::Format("norm_stats mean/std lengths differ".into()));
            }
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: Self = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn class_index(&self, label: &str) -> Option<usize> {
        self.classes.iter().position(|c| c == label)
    }

    /// Samples of one split with their class indices, in manifest order.
    pub fn split(&self, split: Split) -> Vec<(&ManifestSample, usize)> {
        self.samples
            .iter()
            .filter(|s| s.split == split)
            .map(|s| (s, self.class_index(&s.label).expect("validated label")))
            .collect()
    }

    /// Training samples for a DI computation. Any other split is refused.
    pub fn di_samples(&self, split: Split) -> Result<Vec<(&ManifestSample, usize)>> {
        if split != Split::Train {
            return Err(Error::Leakage(format!(
                "refusing to compute DI on the '{split}' split; use train"
            )));
        }
        let train = self.split(Split::Train);
        if train.is_empty() {
            return Err(Error::Format("manifest has no train samples".into()));
        }
        Ok(train)
    }
}

pub fn resolve(base: &Path, sample: &ManifestSample) -> PathBuf {
    if sample.path.is_absolute() {
        sample.path.clone()
    } else {
        base.join(&sample.path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const DOC: &str = r#"{
        "classes": ["walk", "sit"],
        "samples": [
            {"path": "a.dfma", "label": "walk", "split": "train"},
            {"path": "b.dfma", "label": "sit", "split": "train"},
            {"path": "c.dfma", "label": "sit", "split": "test"}
        ],
        "normalize": false
    }"#;

    #[test]
    fn parses_and_splits() {
        let m = DatasetManifest::from_json(DOC).unwrap();
        assert_eq!(m.split(Split::Train).len(), 2);
        assert_eq!(m.split(Split::Test)[0].1, 1);
        assert!(m.norm_stats.is_none());
        assert_eq!(resolve(Path::new("/d"), &m.samples[0]), PathBuf::from("/d/a.dfma"));
    }

    #[test]
    fn leakage_guard() {
        let m = DatasetManifest::from_json(DOC).unwrap();
        assert!(matches!(m.di_samples(Split::Test), Err(Error::Leakage(_))));
        assert_eq!(m.di_samples(Split::Train).unwrap().len(), 2);
    }

    #[test]
    fn rejects_unknown_label() {
        let bad = DOC.replace("\"label\": \"sit\", \"split\": \"test\"", "\"label\": \"run\", \"split\": \"test\"");
        assert!(matches!(DatasetManifest::from_json(&bad), Err(Error::Format(_))));
    }

    #[test]
    fn empty_train_split() {
        let only_test = r#"{"classes":["a"],"samples":[{"path":"x","label":"a","split":"test"}]}"#;
        let m = DatasetManifest::from_json(only_test).unwrap();
        assert!(m.di_samples(Split::Train).is_err());
    }
}
