//! Seeded synthetic datasets with class-specific temporal tones.

use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{param, Result};
use crate::ingest::manifest::{DatasetManifest, ManifestSample, Split};
use crate::ingest::tensor_file::write_tensor;
use crate::scalar::Real;
use crate::spectrum::SampleTensor;

/// Each class carries a cosine at its own DFT bin, with random phase and
/// gain, plus white noise on every tensor entry.
#[derive(Debug, Clone, PartialEq)]
pub struct ToneDataset {
    /// DFT length / frame count `L`.
    pub frames: usize,
    /// Spatial size of each frame as `(C, H, W)`.
    pub frame_shape: (usize, usize, usize),
    /// Tone bin per class.
    pub class_bins: Vec<usize>,
    pub samples_per_class: usize,
    pub amplitude: f64,
    pub noise_std: f64,
}

impl Default for ToneDataset {
    fn default() -> Self {
        Self {
            frames: 16,
            frame_shape: (1, 4, 4),
            class_bins: vec![1, 3],
            samples_per_class: 24,
            amplitude: 1.0,
            noise_std: 0.3,
        }
    }
}

impl ToneDataset {
    pub fn validate(&self) -> Result<()> {
        if self.frames < 2 {
            return Err(param("need at least 2 frames"));
        }
        let (c, h, w) = self.frame_shape;
        if c == 0 || h == 0 || w == 0 {
            return Err(param("frame shape must be positive"));
        }
        if let Some(&b) = self.class_bins.iter().find(|&&b| b == 0 || b > self.frames / 2) {
            return Err(param(format!(
                "tone bin {b} outside 1..={}",
                self.frames / 2
            )));
        }
        if self.class_bins.is_empty() || self.samples_per_class < 2 {
            return Err(param("need at least one class with two samples"));
        }
        if !(self.noise_std >= 0.0) {
            return Err(param("noise_std must be nonnegative"));
        }
        Ok(())
    }

    /// Samples in class-interleaved order with labels `0..classes`.
    pub fn generate<T: Real>(&self, seed: u64) -> Result<Vec<SampleTensor<T>>> {
        self.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let noise = Normal::new(0.0, self.noise_std).map_err(|e| param(e.to_string()))?;
        let (c, h, w) = self.frame_shape;
        let frame_size = c * h * w;
        let mut out = Vec::with_capacity(self.class_bins.len() * self.samples_per_class);
        for _ in 0..self.samples_per_class {
            for (label, &bin) in self.class_bins.iter().enumerate() {
                let phase = rng.random_range(0.0..std::f64::consts::TAU);
                let gain = self.amplitude * rng.random_range(0.8..1.2);
                let mut data = Vec::with_capacity(self.frames * frame_size);
                for l in 0..self.frames {
                    let angle = std::f64::consts::TAU * (bin * l) as f64 / self.frames as f64;
                    let tone = gain * (angle + phase).cos();
                    for _ in 0..frame_size {
                        data.push(T::lit(tone + noise.sample(&mut rng)));
                    }
                }
                out.push(SampleTensor::new([self.frames, c, h, w], data)?.with_label(label));
            }
        }
        Ok(out)
    }

    /// Writes `.dfma` files plus `manifest.json`; every `test_every`-th
    /// sample per class goes to the test split (0 = none).
    pub fn write(&self, dir: &Path, seed: u64, test_every: usize) -> Result<DatasetManifest> {
        let samples = self.generate::<f32>(seed)?;
        fs::create_dir_all(dir)?;
        let classes: Vec<String> = (0..self.class_bins.len()).map(|i| format!("class{i}")).collect();
        let mut entries = Vec::with_capacity(samples.len());
        let per_round = self.class_bins.len();
        for (i, s) in samples.iter().enumerate() {
            let name = format!("sample_{i:04}.dfma");
            write_tensor(s, &dir.join(&name))?;
            let round = i / per_round;
            let split = if test_every > 0 && round % test_every == test_every - 1 {
                Split::Test
            } else {
                Split::Train
            };
            entries.push(ManifestSample {
                path: name.into(),
                label: classes[s.label().expect("generated samples are labelled")].clone(),
                split,
            });
        }
        let manifest = DatasetManifest {
            classes,
            samples: entries,
            norm_stats: None,
            normalize: false,
        };
        fs::write(dir.join("manifest.json"), manifest.to_json()?)?;
        Ok(manifest)
    }
}
