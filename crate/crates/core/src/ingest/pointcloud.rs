//! mmWave point-cloud recordings to fixed-size tensors.
//!
//! A recording is a sequence of frames, each an ordered set of points with
//! channels `(x, y, z, v)`. Frames and points are brought to fixed budgets by
//! equally spaced subsampling (endpoints kept) or zero padding, optionally
//! normalized per channel, flattened point-major to 256 features per frame and
//! placed on a 64×64 map.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, shape, Error, Result};
use crate::scalar::Real;
use crate::spectrum::SampleTensor;

/// Channels per point: x, y, z, radial velocity.
pub const CHANNELS: usize = 4;
pub const MAP_SIDE: usize = 64;
pub const FEATURES: usize = 256;

pub type Point<T> = [T; CHANNELS];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessConfig {
    pub f_max: usize,
    pub p_max: usize,
}

impl Default for PreprocessConfig {
    fn default() -> Self {
        Self { f_max: 4, p_max: 64 }
    }
}

impl PreprocessConfig {
    pub fn validate(&self) -> Result<()> {
        if self.f_max == 0 || self.p_max == 0 {
            return Err(param(format!(
                "f_max and p_max must be at least 1, got {} and {}",
                self.f_max, self.p_max
            )));
        }
        Ok(())
    }
}

/// `round(i·(count − 1)/(target − 1))` for `i = 0..target`; requires `count > target`.
pub fn subsample_indices(count: usize, target: usize) -> Vec<usize> {
    if target == 1 {
        return vec![0];
    }
    let scale = (count - 1) as f64 / (target - 1) as f64;
    (0..target)
        .map(|i| (i as f64 * scale).round() as usize)
        .collect()
}

/// Keeps `f_max` equally spaced frames, or pads with empty frames.
pub fn align_frames<P: Clone>(frames: &[Vec<P>], f_max: usize) -> Vec<Vec<P>> {
    if frames.len() > f_max {
        subsample_indices(frames.len(), f_max)
            .into_iter()
            .map(|i| frames[i].clone())
            .collect()
    } else {
        let mut out = frames.to_vec();
        out.resize(f_max, Vec::new());
        out
    }
}

/// Keeps `p_max` equally spaced points, or pads with zero rows.
pub fn align_points<T: Real>(frame: &[Point<T>], p_max: usize) -> Vec<Point<T>> {
    if frame.len() > p_max {
        subsample_indices(frame.len(), p_max)
            .into_iter()
            .map(|i| frame[i])
            .collect()
    } else {
        let mut out = frame.to_vec();
        out.resize(p_max, [T::zero(); CHANNELS]);
        out
    }
}

/// Per-channel statistics from the training split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NormStats {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
}

impl NormStats {
    pub fn normalize<T: Real>(&self, p: &Point<T>) -> Point<T> {
        let mut out = *p;
        for (c, v) in out.iter_mut().enumerate() {
            if self.std[c] > 0.0 {
                *v = T::lit((v.as_f64() - self.mean[c]) / self.std[c]);
            }
        }
        out
    }

    pub fn denormalize<T: Real>(&self, p: &Point<T>) -> Point<T> {
        let mut out = *p;
        for (c, v) in out.iter_mut().enumerate() {
            if self.std[c] > 0.0 {
                *v = T::lit(v.as_f64() * self.std[c] + self.mean[c]);
            }
        }
        out
    }
}

/// Population mean and standard deviation of every channel over the real
/// points of the given recordings (padding excluded).
pub fn compute_norm_stats<T: Real>(recordings: &[Vec<Vec<Point<T>>>]) -> Result<NormStats> {
    let points = || recordings.iter().flatten().flatten();
    let n = points().count();
    if n == 0 {
        return Err(param("no training points to compute normalization statistics"));
    }
    let mut mean = vec![0.0; CHANNELS];
    for p in points() {
        for c in 0..CHANNELS {
            mean[c] += p[c].as_f64();
        }
    }
    mean.iter_mut().for_each(|m| *m /= n as f64);
    let mut var = vec![0.0; CHANNELS];
    for p in points() {
        for c in 0..CHANNELS {
            let d = p[c].as_f64() - mean[c];
            var[c] += d * d;
        }
    }
    let std = var.into_iter().map(|v| (v / n as f64).sqrt()).collect();
    Ok(NormStats { mean, std })
}

/// Placement of the 256 per-frame features on the 64×64 map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShapeMode {
    /// Front-filled 4096 vector reshaped row-major: rows 0..4 of width 64.
    #[default]
    RowMajor,
    /// Top-left 16×16 block, 16 features per row.
    Block16,
}

impl FromStr for ShapeMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "rowmajor" | "row-major" => Ok(ShapeMode::RowMajor),
            "block16" => Ok(ShapeMode::Block16),
            other => Err(param(format!("unknown shape mode '{other}'"))),
        }
    }
}

impl fmt::Display for ShapeMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ShapeMode::RowMajor => "rowmajor",
            ShapeMode::Block16 => "block16",
        })
    }
}

/// Point-major, channel-minor flattening of an aligned frame.
pub fn frame_features<T: Real>(points: &[Point<T>]) -> Vec<T> {
    points.iter().flat_map(|p| p.iter().copied()).collect()
}

/// 256 features onto a row-major 64×64 map; every other cell is zero.
pub fn shape_features<T: Real>(features: &[T], mode: ShapeMode) -> Result<Vec<T>> {
    if features.len() != FEATURES {
        return Err(shape(format!(
            "expected {FEATURES} features, got {}",
            features.len()
        )));
    }
    let mut map = vec![T::zero(); MAP_SIDE * MAP_SIDE];
    match mode {
        ShapeMode::RowMajor => map[..FEATURES].copy_from_slice(features),
        ShapeMode::Block16 => {
            for (row, chunk) in features.chunks_exact(16).enumerate() {
                map[row * MAP_SIDE..row * MAP_SIDE + 16].copy_from_slice(chunk);
            }
        }
    }
    Ok(map)
}

/// Output tensor arrangement for a preprocessed recording.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layout {
    /// `(f_max, 1, 64, 64)` feature maps; needs `p_max · 4 = 256`.
    Map(ShapeMode),
    /// `(f_max, 1, p_max, 4)` aligned point sets.
    Points,
}

impl Default for Layout {
    fn default() -> Self {
        Layout::Map(ShapeMode::default())
    }
}

/// Aligns, optionally normalizes, and lays out one recording.
pub fn recording_to_tensor<T: Real>(
    frames: &[Vec<Point<T>>],
    config: PreprocessConfig,
    stats: Option<&NormStats>,
    layout: Layout,
) -> Result<SampleTensor<T>> {
    config.validate()?;
    let aligned: Vec<Vec<Point<T>>> = align_frames(frames, config.f_max)
        .iter()
        .map(|f| {
            // Padding rows stay zero; only real points are normalized.
            let real: Vec<Point<T>> = match stats {
                Some(s) => f.iter().map(|p| s.normalize(p)).collect(),
                None => f.clone(),
            };
            align_points(&real, config.p_max)
        })
        .collect();
    match layout {
        Layout::Points => {
            let data = aligned.iter().flat_map(|f| frame_features(f)).collect();
            SampleTensor::new([config.f_max, 1, config.p_max, CHANNELS], data)
        }
        Layout::Map(mode) => {
            if config.p_max * CHANNELS != FEATURES {
                return Err(shape(format!(
                    "feature maps need p_max·4 = {FEATURES}, got p_max = {}",
                    config.p_max
                )));
            }
            let mut data = Vec::with_capacity(config.f_max * MAP_SIDE * MAP_SIDE);
            for f in &aligned {
                data.extend(shape_features(&frame_features(f), mode)?);
            }
            SampleTensor::new([config.f_max, 1, MAP_SIDE, MAP_SIDE], data)
        }
    }
}

/// Parses a recording CSV with header `frame,x,y,z,v`.
///
/// Frames are ordered by their index; point order within a frame follows the
/// file. Frame indices need not be contiguous.
pub fn parse_recording_csv<T: Real>(text: &str) -> Result<Vec<Vec<Point<T>>>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Format("empty recording CSV".into()))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    let idx = |name: &str| {
        cols.iter()
            .position(|c| c.eq_ignore_ascii_case(name))
            .ok_or_else(|| Error::Format(format!("recording CSV lacks a '{name}' column")))
    };
    let frame_col = idx("frame")?;
    let chan_cols = [idx("x")?, idx("y")?, idx("z")?, idx("v")?];
    let mut frames: BTreeMap<i64, Vec<Point<T>>> = BTreeMap::new();
    for (row, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        let bad = || Error::Format(format!("bad recording CSV row {}", row + 2));
        let frame: i64 = fields
            .get(frame_col)
            .and_then(|s| s.parse().ok())
            .ok_or_else(bad)?;
        let mut p = [T::zero(); CHANNELS];
        for (slot, &c) in p.iter_mut().zip(&chan_cols) {
            let v: f64 = fields.get(c).and_then(|s| s.parse().ok()).ok_or_else(bad)?;
            if !v.is_finite() {
                return Err(bad());
            }
            *slot = T::lit(v);
        }
        frames.entry(frame).or_default().push(p);
    }
    Ok(frames.into_values().collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(n: usize) -> Vec<Point<f64>> {
        (0..n).map(|i| [i as f64, 1.0, 2.0, 3.0]).collect()
    }

    #[test]
    fn frame_alignment() {
        let frames: Vec<Vec<usize>> = (0..10).map(|i| vec![i]).collect();
        let kept = align_frames(&frames, 4);
        assert_eq!(kept, vec![vec![0], vec![3], vec![6], vec![9]]);

        let short = vec![vec![1], vec![2]];
        let padded = align_frames(&short, 4);
        assert_eq!(padded, vec![vec![1], vec![2], vec![], vec![]]);

        let four: Vec<Vec<usize>> = (0..4).map(|i| vec![i]).collect();
        assert_eq!(align_frames(&four, 4), four);
    }

    #[test]
    fn point_alignment() {
        assert_eq!(align_points(&pts(64), 64), pts(64));
        let padded = align_points(&pts(10), 64);
        assert_eq!(padded.len(), 64);
        assert_eq!(&padded[..10], &pts(10)[..]);
        assert!(padded[10..].iter().all(|p| *p == [0.0; 4]));

        let many = align_points(&pts(100), 64);
        let want: Vec<f64> = (0..64).map(|i| (i as f64 * 99.0 / 63.0).round()).collect();
        let got: Vec<f64> = many.iter().map(|p| p[0]).collect();
        assert_eq!(got, want);
        assert_eq!(got[63], 99.0);
    }

    #[test]
    fn subsample_strictly_increasing() {
        for count in 2..200 {
            for target in 2..count {
                let idx = subsample_indices(count, target);
                assert_eq!(idx[0], 0);
                assert_eq!(*idx.last().unwrap(), count - 1);
                assert!(idx.windows(2).all(|w| w[0] < w[1]));
            }
        }
    }

    #[test]
    fn normalization() {
        let rec = vec![vec![vec![[1.0, 5.0, 0.0, 2.0], [3.0, 5.0, 0.0, 4.0]]]];
        let stats = compute_norm_stats(&rec).unwrap();
        assert_eq!(stats.mean, vec![2.0, 5.0, 0.0, 3.0]);
        assert_eq!(stats.std, vec![1.0, 0.0, 0.0, 1.0]);
        assert_eq!(stats.normalize(&rec[0][0][0]), [-1.0, 5.0, 0.0, -1.0]);
        assert_eq!(stats.normalize(&rec[0][0][1]), [1.0, 5.0, 0.0, 1.0]);
        let p: [f64; 4] = [0.3, -7.0, 2.5, 11.0];
        let back = stats.denormalize(&stats.normalize(&p));
        for (a, b) in back.iter().zip(&p) {
            assert!((a - b).abs() < 1e-6);
        }
        assert!(compute_norm_stats::<f64>(&[]).is_err());
        assert!(compute_norm_stats::<f64>(&[vec![vec![]]]).is_err());
    }

    #[test]
    fn feature_shaping() {
        let ramp: Vec<f64> = (0..256).map(|i| i as f64).collect();
        let m = shape_features(&ramp, ShapeMode::RowMajor).unwrap();
        assert_eq!(&m[..64], &ramp[..64]);
        assert_eq!(&m[64..128], &ramp[64..128]);
        assert_eq!(m[3 * 64 + 63], 255.0);
        assert!(m[256..].iter().all(|&v| v == 0.0));

        let b = shape_features(&ramp, ShapeMode::Block16).unwrap();
        assert_eq!(&b[..16], &ramp[..16]);
        assert_eq!(&b[64..80], &ramp[16..32]);
        for h in 0..64 {
            for w in 0..64 {
                if h >= 16 || w >= 16 {
                    assert_eq!(b[h * 64 + w], 0.0);
                }
            }
        }
        let zero = shape_features(&[0.0; 256], ShapeMode::Block16).unwrap();
        assert!(zero.iter().all(|&v| v == 0.0));
        assert!(shape_features(&[0.0; 255], ShapeMode::RowMajor).is_err());
    }

    #[test]
    fn recording_layouts() {
        let frames = vec![pts(3), pts(70)];
        let t = recording_to_tensor(&frames, PreprocessConfig::default(), None, Layout::default())
            .unwrap();
        assert_eq!(t.dims(), [4, 1, 64, 64]);
        // Frame 0, point 1 → features 4..8.
        assert_eq!(&t.frame(0)[4..8], &[1.0, 1.0, 2.0, 3.0]);
        assert!(t.frame(2).iter().all(|&v| v == 0.0));

        let p = recording_to_tensor(
            &frames,
            PreprocessConfig { f_max: 2, p_max: 8 },
            None,
            Layout::Points,
        )
        .unwrap();
        assert_eq!(p.dims(), [2, 1, 8, 4]);
        assert!(recording_to_tensor(
            &frames,
            PreprocessConfig { f_max: 2, p_max: 8 },
            None,
            Layout::default()
        )
        .is_err());
    }

    #[test]
    fn csv_grouping() {
        let text = "frame,x,y,z,v\n2,1,1,1,1\n0,0,0,0,0\n2,2,2,2,2\n0,9,9,9,9\n";
        let rec: Vec<Vec<Point<f64>>> = parse_recording_csv(text).unwrap();
        assert_eq!(rec.len(), 2);
        assert_eq!(rec[0], vec![[0.0; 4], [9.0; 4]]);
        assert_eq!(rec[1], vec![[1.0; 4], [2.0; 4]]);
        assert!(parse_recording_csv::<f64>("frame,x,y,z\n").is_err());
        assert!(parse_recording_csv::<f64>("frame,x,y,z,v\n0,1,2,3\n").is_err());
    }
}
