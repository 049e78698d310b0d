//! One-sided frequency grid and per-sample amplitude spectra.
//!
//! A sample tensor of shape `(L, C, H, W)` is first reduced to a scalar
//! series of length `L` by pooling every frame over its `C·H·W` entries.
//! The series is optionally de-meaned and windowed, and finally transformed
//! with an unnormalized DFT restricted to bins `k = 0..=floor(L/2)`. Only the
//! magnitudes are kept.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, shape, Error, Result};
use crate::scalar::Real;

/// Bins `ω_k = 2πk/L` for `k = 0..=floor(L/2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyGrid<T> {
    len: usize,
    omegas: Vec<T>,
}

impl<T: Real> FrequencyGrid<T> {
    pub fn new(len: usize) -> Result<Self> {
        build_grid(len)
    }

    /// DFT length `L` in frames; never below 2.
    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.len
    }

    /// Highest bin index `K = floor(L/2)`.
    pub fn max_bin(&self) -> usize {
        self.len / 2
    }

    pub fn num_bins(&self) -> usize {
        self.omegas.len()
    }

    pub fn omegas(&self) -> &[T] {
        &self.omegas
    }

    pub fn omega(&self, k: usize) -> T {
        self.omegas[k]
    }

    /// Spacing `2π/L` between neighbouring bins.
    pub fn spacing(&self) -> T {
        T::lit(2.0) * T::PI() / T::from_usize_lossy(self.len)
    }

    pub fn has_nyquist(&self) -> bool {
        self.len.is_multiple_of(2)
    }
}

pub fn build_grid<T: Real>(len: usize) -> Result<FrequencyGrid<T>> {
    if len < 2 {
        return Err(Error::InvalidLength(format!(
            "DFT length must be at least 2, got {len}"
        )));
    }
    let n = T::from_usize_lossy(len);
    // π·(2k/L) keeps the Nyquist bin at exactly π for even L.
    let omegas = (0..=len / 2)
        .map(|k| T::PI() * (T::from_usize_lossy(2 * k) / n))
        .collect();
    Ok(FrequencyGrid { len, omegas })
}

/// A single `(L, C, H, W)` sample stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleTensor<T> {
    dims: [usize; 4],
    data: Vec<T>,
    label: Option<usize>,
}

impl<T: Real> SampleTensor<T> {
    pub fn new(dims: [usize; 4], data: Vec<T>) -> Result<Self> {
        if dims.contains(&0) {
            return Err(shape(format!("all dims must be positive, got {dims:?}")));
        }
        let expected = dims
            .iter()
            .try_fold(1usize, |acc, &d| acc.checked_mul(d))
            .ok_or_else(|| shape(format!("dims {dims:?} overflow")))?;
        if data.len() != expected {
            return Err(shape(format!(
                "dims {dims:?} need {expected} values, got {}",
                data.len()
            )));
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::Format(format!("non-finite value at index {i}")));
        }
        Ok(Self {
            dims,
            data,
            label: None,
        })
    }

    pub fn with_label(mut self, label: usize) -> Self {
        self.label = Some(label);
        self
    }

    pub fn dims(&self) -> [usize; 4] {
        self.dims
    }

    /// Number of frames `L`.
    pub fn frames(&self) -> usize {
        self.dims[0]
    }

    /// Entries per frame, `C·H·W`.
    pub fn frame_size(&self) -> usize {
        self.dims[1] * self.dims[2] * self.dims[3]
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn into_data(self) -> Vec<T> {
        self.data
    }

    pub fn label(&self) -> Option<usize> {
        self.label
    }

    pub fn frame(&self, l: usize) -> &[T] {
        let n = self.frame_size();
        &self.data[l * n..(l + 1) * n]
    }
}

/// Length-`L` real series obtained from one sample.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSeries<T> {
    values: Vec<T>,
}

impl<T: Real> ScalarSeries<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Format(format!("non-finite value at index {i}")));
        }
        Ok(Self { values })
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Nonnegative DFT magnitudes on a one-sided grid.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeSpectrum<T> {
    grid: FrequencyGrid<T>,
    amps: Vec<T>,
}

impl<T: Real> AmplitudeSpectrum<T> {
    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn amps(&self) -> &[T] {
        &self.amps
    }

    /// Multiplies every amplitude by `alpha`; used for scale-behaviour checks.
    pub fn scaled(&self, alpha: T) -> Self {
        Self {
            grid: self.grid.clone(),
            amps: self.amps.iter().map(|&a| a * alpha.abs()).collect(),
        }
    }
}

/// Pooling applied over the non-temporal axes of each frame.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Reduce {
    #[default]
    Mean,
    Rms,
    L1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Preprocess {
    Raw,
    #[default]
    Demean,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Window {
    #[default]
    Rect,
    Hann,
}

macro_rules! text_enum {
    ($ty:ident, $what:literal, $($variant:ident => $name:literal),+) => {
        impl FromStr for $ty {
            type Err = Error;
            fn from_str(s: &str) -> Result<Self> {
                match s.to_ascii_lowercase().as_str() {
                    $($name => Ok($ty::$variant),)+
                    other => Err(param(format!(concat!("unknown ", $what, " '{}'"), other))),
                }
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str(match self { $($ty::$variant => $name,)+ })
            }
        }
    };
}

text_enum!(Reduce, "reduction", Mean => "mean", Rms => "rms", L1 => "l1");
text_enum!(Preprocess, "preprocessing mode", Raw => "raw", Demean => "demean");
text_enum!(Window, "window", Rect => "rect", Hann => "hann");

pub fn scalarize<T: Real>(sample: &SampleTensor<T>, reduce: Reduce) -> ScalarSeries<T> {
    let n = sample.frame_size() as f64;
    let values = (0..sample.frames())
        .map(|l| {
            let frame = sample.frame(l).iter().map(|v| v.as_f64());
            let pooled = match reduce {
                Reduce::Mean => frame.sum::<f64>() / n,
                Reduce::Rms => (frame.map(|v| v * v).sum::<f64>() / n).sqrt(),
                Reduce::L1 => frame.map(f64::abs).sum::<f64>() / n,
            };
            T::lit(pooled)
        })
        .collect();
    ScalarSeries { values }
}

pub fn preprocess_series<T: Real>(series: &ScalarSeries<T>, mode: Preprocess) -> ScalarSeries<T> {
    match mode {
        Preprocess::Raw => series.clone(),
        Preprocess::Demean => {
            if series.is_empty() {
                return series.clone();
            }
            let mean = series.values.iter().map(|v| v.as_f64()).sum::<f64>()
                / series.len() as f64;
            let mean = T::lit(mean);
            ScalarSeries {
                values: series.values.iter().map(|&v| v - mean).collect(),
            }
        }
    }
}

/// Symmetric Hann weight `½(1 − cos(2πl/(L−1)))`.
pub fn hann_weight<T: Real>(l: usize, len: usize) -> T {
    let phase = 2.0 * std::f64::consts::PI * l as f64 / (len - 1) as f64;
    T::lit(0.5 * (1.0 - phase.cos()))
}

pub fn apply_window<T: Real>(series: &ScalarSeries<T>, window: Window) -> Result<ScalarSeries<T>> {
    match window {
        Window::Rect => Ok(series.clone()),
        Window::Hann => {
            let len = series.len();
            if len < 2 {
                return Err(Error::InvalidLength(format!(
                    "Hann window needs at least 2 samples, got {len}"
                )));
            }
            let values = series
                .values
                .iter()
                .enumerate()
                .map(|(l, &v)| v * hann_weight::<T>(l, len))
                .collect();
            Ok(ScalarSeries { values })
        }
    }
}

/// Unnormalized DFT magnitudes `|Σ_l s[l]·e^{−jω_k l}|` on the one-sided grid.
pub fn one_sided_dft<T: Real>(
    series: &ScalarSeries<T>,
    grid: &FrequencyGrid<T>,
) -> Result<AmplitudeSpectrum<T>> {
    let len = grid.len();
    if series.len() != len {
        return Err(shape(format!(
            "series length {} does not match grid length {len}",
            series.len()
        )));
    }
    let step = 2.0 * std::f64::consts::PI / len as f64;
    let amps = (0..grid.num_bins())
        .map(|k| {
            let (mut re, mut im) = (0.0f64, 0.0f64);
            for (l, v) in series.values.iter().enumerate() {
                // Reduce k·l mod L so the phase stays in [0, 2π).
                let phase = step * ((k * l) % len) as f64;
                let v = v.as_f64();
                re += v * phase.cos();
                im -= v * phase.sin();
            }
            T::lit(re.hypot(im))
        })
        .collect();
    Ok(AmplitudeSpectrum {
        grid: grid.clone(),
        amps,
    })
}

/// Reduction, preprocessing and window settings for turning samples into spectra.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct SpectrumConfig {
    pub reduce: Reduce,
    pub preprocess: Preprocess,
    pub window: Window,
}

impl SpectrumConfig {
    /// scalarize → preprocess → window → one-sided DFT.
    pub fn amplitude<T: Real>(
        &self,
        sample: &SampleTensor<T>,
        grid: &FrequencyGrid<T>,
    ) -> Result<AmplitudeSpectrum<T>> {
        let series = scalarize(sample, self.reduce);
        let series = preprocess_series(&series, self.preprocess);
        let series = apply_window(&series, self.window)?;
        one_sided_dft(&series, grid)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn series(v: &[f64]) -> ScalarSeries<f64> {
        ScalarSeries::new(v.to_vec()).unwrap()
    }

    #[test]
    fn grid_even_length_has_nyquist() {
        let g = build_grid::<f64>(16).unwrap();
        assert_eq!(g.max_bin(), 8);
        assert_eq!(g.num_bins(), 9);
        assert_eq!(g.omega(8), PI);
        assert_relative_eq!(g.omega(1), PI / 8.0, epsilon = 1e-15);
        assert_eq!(g.omega(0), 0.0);
    }

    #[test]
    fn grid_odd_length_stops_below_nyquist() {
        let g = build_grid::<f64>(5).unwrap();
        assert_eq!(g.max_bin(), 2);
        assert_relative_eq!(g.omega(2), 4.0 * PI / 5.0);
        assert!(g.omega(2) < PI);
        assert!(!g.has_nyquist());
    }

    #[test]
    fn grid_nyquist_exact_for_awkward_lengths() {
        for len in (2..=64).step_by(2) {
            let g = build_grid::<f64>(len).unwrap();
            assert_eq!(*g.omegas().last().unwrap(), PI, "L={len}");
            assert!(g.omegas().windows(2).all(|w| w[0] < w[1]));
        }
        let g = build_grid::<f32>(6).unwrap();
        assert_eq!(g.omega(3), std::f32::consts::PI);
    }

    #[test]
    fn grid_rejects_short_length() {
        assert!(matches!(build_grid::<f64>(1), Err(Error::InvalidLength(_))));
        assert!(matches!(build_grid::<f64>(0), Err(Error::InvalidLength(_))));
    }

    #[test]
    fn scalarize_reductions() {
        let ones = SampleTensor::new([1, 2, 2, 1], vec![1.0; 4]).unwrap();
        assert_eq!(scalarize(&ones, Reduce::Mean).values(), &[1.0]);

        let t = SampleTensor::new([1, 2, 1, 1], vec![3.0, -4.0]).unwrap();
        assert_relative_eq!(
            scalarize(&t, Reduce::Rms).values()[0],
            (12.5f64).sqrt(),
            max_relative = 1e-15
        );
        assert_relative_eq!(scalarize(&t, Reduce::Rms).values()[0], 3.53553, epsilon = 1e-5);
        assert_eq!(scalarize(&t, Reduce::L1).values()[0], 3.5);
        assert_eq!(scalarize(&t, Reduce::Mean).values()[0], -0.5);
    }

    #[test]
    fn sample_tensor_validates() {
        assert!(SampleTensor::<f64>::new([2, 1, 1, 1], vec![1.0]).is_err());
        assert!(SampleTensor::<f64>::new([0, 1, 1, 1], vec![]).is_err());
        assert!(SampleTensor::new([1, 1, 1, 1], vec![f64::NAN]).is_err());
    }

    #[test]
    fn demean_and_raw() {
        let s = series(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(
            preprocess_series(&s, Preprocess::Demean).values(),
            &[-1.5, -0.5, 0.5, 1.5]
        );
        assert_eq!(preprocess_series(&s, Preprocess::Raw), s);
    }

    #[test]
    fn demeaned_series_has_zero_dc() {
        let s = series(&[0.3, -1.7, 2.2, 5.0, 0.1, 0.0, -3.3]);
        let d = preprocess_series(&s, Preprocess::Demean);
        let g = build_grid(7).unwrap();
        let spec = one_sided_dft(&d, &g).unwrap();
        assert!(spec.amps()[0] < 1e-14);
    }

    #[test]
    fn hann_weights() {
        let s = series(&[1.0; 4]);
        let w = apply_window(&s, Window::Hann).unwrap();
        let expect = [0.0, 0.75, 0.75, 0.0];
        for (a, b) in w.values().iter().zip(expect) {
            assert!((a - b).abs() < 1e-15);
        }
        let s5 = series(&[1.0; 5]);
        let w5 = apply_window(&s5, Window::Hann).unwrap();
        assert_eq!(w5.values()[0], 0.0);
        assert!(w5.values()[4].abs() < 1e-15);
        assert_eq!(w5.values()[2], 1.0);
        assert_eq!(apply_window(&s5, Window::Rect).unwrap(), s5);
        assert!(matches!(
            apply_window(&series(&[1.0]), Window::Hann),
            Err(Error::InvalidLength(_))
        ));
    }

    #[test]
    fn dft_constant_tone_and_zero() {
        let g = build_grid(12).unwrap();
        let c = series(&[-2.5; 12]);
        let spec = one_sided_dft(&c, &g).unwrap();
        assert_relative_eq!(spec.amps()[0], 30.0, max_relative = 1e-14);

        let m = 3;
        let tone: Vec<f64> = (0..12)
            .map(|l| (2.0 * PI * (l * m) as f64 / 12.0).cos())
            .collect();
        let spec = one_sided_dft(&series(&tone), &g).unwrap();
        assert_relative_eq!(spec.amps()[m], 6.0, max_relative = 1e-12);

        let z = one_sided_dft(&series(&[0.0; 12]), &g).unwrap();
        assert!(z.amps().iter().all(|&a| a == 0.0));
    }

    #[test]
    fn dft_length_mismatch() {
        let g = build_grid::<f64>(8).unwrap();
        assert!(matches!(
            one_sided_dft(&series(&[1.0; 7]), &g),
            Err(Error::Shape(_))
        ));
    }

    #[test]
    fn hann_of_raw_constant_leaks() {
        // Window applied after preprocessing: with raw mode the window itself
        // shows up in the non-DC bins; demeaning first would have zeroed them.
        let g = build_grid(16).unwrap();
        let s = series(&[2.0; 16]);
        let raw = SpectrumConfig {
            reduce: Reduce::Mean,
            preprocess: Preprocess::Raw,
            window: Window::Hann,
        };
        let sample = SampleTensor::new([16, 1, 1, 1], s.values().to_vec()).unwrap();
        let spec = raw.amplitude(&sample, &g).unwrap();
        assert!(spec.amps()[1] > 1.0);
        let demeaned = SpectrumConfig {
            preprocess: Preprocess::Demean,
            ..raw
        };
        let spec = demeaned.amplitude(&sample, &g).unwrap();
        assert!(spec.amps().iter().all(|&a| a < 1e-12));
    }

    #[test]
    fn text_enums_parse() {
        assert_eq!("RMS".parse::<Reduce>().unwrap(), Reduce::Rms);
        assert_eq!("demean".parse::<Preprocess>().unwrap(), Preprocess::Demean);
        assert_eq!(Window::Hann.to_string(), "hann");
        assert!("median".parse::<Reduce>().is_err());
    }

    fn ulp(v: f64) -> f64 {
        let bits = v.abs().to_bits();
        f64::from_bits(bits + 1) - v.abs()
    }

    fn naive_full_dft(x: &[f64]) -> Vec<f64> {
        let n = x.len();
        (0..n)
            .map(|k| {
                let (mut re, mut im) = (0.0, 0.0);
                for (l, v) in x.iter().enumerate() {
                    let a = -2.0 * PI * (k * l) as f64 / n as f64;
                    re += v * a.cos();
                    im += v * a.sin();
                }
                (re * re + im * im).sqrt()
            })
            .collect()
    }

    proptest! {
        #[test]
        fn one_sided_matches_full_dft(x in proptest::collection::vec(-10.0f64..10.0, 2..=64)) {
            let g = build_grid(x.len()).unwrap();
            let spec = one_sided_dft(&series(&x), &g).unwrap();
            let full = naive_full_dft(&x);
            let n = x.len();
            for k in 0..g.num_bins() {
                // Mirror bin L−k carries the same magnitude for real input.
                for reference in [full[k], full[(n - k) % n]] {
                    let scale = reference.abs().max(1e-9);
                    prop_assert!((spec.amps()[k] - reference).abs() / scale < 1e-9);
                }
            }
        }

        #[test]
        fn scalarize_mean_is_linear(
            x in proptest::collection::vec(0.1f64..100.0, 12),
            alpha in 0.01f64..50.0,
        ) {
            let t = SampleTensor::new([6, 2, 1, 1], x.clone()).unwrap();
            let ts = SampleTensor::new([6, 2, 1, 1], x.iter().map(|v| v * alpha).collect()).unwrap();
            let a = scalarize(&t, Reduce::Mean);
            let b = scalarize(&ts, Reduce::Mean);
            for (u, v) in a.values().iter().zip(b.values()) {
                let want = alpha * u;
                prop_assert!((want - v).abs() <= 4.0 * ulp(want), "{want} vs {v}");
            }
        }

        #[test]
        fn demean_sums_to_zero(x in proptest::collection::vec(-1e3f64..1e3, 1..64)) {
            let d = preprocess_series(&series(&x), Preprocess::Demean);
            let total: f64 = d.values().iter().sum();
            let scale: f64 = x.iter().map(|v| v.abs()).sum::<f64>().max(1.0);
            prop_assert!(total.abs() <= 8.0 * f64::EPSILON * scale);
        }
    }
}
