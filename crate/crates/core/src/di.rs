//! Per-bin discriminative index.
//!
//! For every one-sided bin the amplitudes of the training samples are split
//! by class; the Fisher-style ratio of between-class to within-class scatter
//! gives `DI[k] = S_B[k] / (S_W[k] + ε)`, which is then normalized into a
//! probability mass function over the grid.

use serde::{Deserialize, Serialize};

use crate::error::{param, shape, Error, Result};
use crate::scalar::Real;
use crate::spectrum::{AmplitudeSpectrum, FrequencyGrid, SampleTensor, SpectrumConfig};

/// Stabilizer added to the within-class scatter.
pub const DEFAULT_EPSILON: f64 = 1e-12;

/// Train-split class statistics per frequency bin.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassStats<T> {
    grid: FrequencyGrid<T>,
    counts: Vec<usize>,
    priors: Vec<T>,
    /// `mu[c][k]`
    mu: Vec<Vec<T>>,
    /// Unbiased (`N_c − 1`) variance, `var[c][k]`.
    var: Vec<Vec<T>>,
}

impl<T: Real> ClassStats<T> {
    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn num_classes(&self) -> usize {
        self.counts.len()
    }

    pub fn counts(&self) -> &[usize] {
        &self.counts
    }

    pub fn priors(&self) -> &[T] {
        &self.priors
    }

    pub fn mu(&self) -> &[Vec<T>] {
        &self.mu
    }

    pub fn var(&self) -> &[Vec<T>] {
        &self.var
    }

    /// Prior-weighted grand mean per bin.
    pub fn grand_mean(&self) -> Vec<T> {
        (0..self.grid.num_bins())
            .map(|k| {
                self.priors
                    .iter()
                    .zip(&self.mu)
                    .map(|(&p, m)| p * m[k])
                    .sum()
            })
            .collect()
    }
}

/// Empirical class frequencies `N_c / N` for labels `0..C` with `C = max + 1`.
pub fn class_priors<T: Real>(labels: &[usize]) -> Result<Vec<T>> {
    let counts = class_counts(labels)?;
    let total = T::from_usize_lossy(labels.len());
    Ok(counts
        .iter()
        .map(|&n| T::from_usize_lossy(n) / total)
        .collect())
}

fn class_counts(labels: &[usize]) -> Result<Vec<usize>> {
    let max = labels
        .iter()
        .copied()
        .max()
        .ok_or_else(|| param("no labelled samples"))?;
    let mut counts = vec![0usize; max + 1];
    for &y in labels {
        counts[y] += 1;
    }
    Ok(counts)
}

/// Per-class means and unbiased variances of each bin's amplitude.
///
/// Class ids are `0..C` where `C` is one more than the largest label; every
/// class in that range needs at least two samples.
pub fn class_statistics<T: Real>(
    spectra: &[AmplitudeSpectrum<T>],
    labels: &[usize],
) -> Result<ClassStats<T>> {
    if spectra.len() != labels.len() {
        return Err(shape(format!(
            "{} spectra but {} labels",
            spectra.len(),
            labels.len()
        )));
    }
    let first = spectra
        .first()
        .ok_or_else(|| param("no spectra supplied"))?;
    let grid = first.grid().clone();
    if let Some(i) = spectra.iter().position(|s| s.grid().len() != grid.len()) {
        return Err(shape(format!(
            "spectrum {i} has L={}, expected L={}",
            spectra[i].grid().len(),
            grid.len()
        )));
    }
    let counts = class_counts(labels)?;
    if let Some((class, &count)) = counts.iter().enumerate().find(|(_, &n)| n < 2) {
        return Err(Error::DegenerateClass { class, count });
    }

    let bins = grid.num_bins();
    let num_classes = counts.len();
    let mut sum = vec![vec![T::zero(); bins]; num_classes];
    for (s, &y) in spectra.iter().zip(labels) {
        for (acc, &a) in sum[y].iter_mut().zip(s.amps()) {
            *acc = *acc + a;
        }
    }
    let mu: Vec<Vec<T>> = sum
        .into_iter()
        .zip(&counts)
        .map(|(row, &n)| {
            let n = T::from_usize_lossy(n);
            row.into_iter().map(|v| v / n).collect()
        })
        .collect();

    let mut sq = vec![vec![T::zero(); bins]; num_classes];
    for (s, &y) in spectra.iter().zip(labels) {
        for ((acc, &a), &m) in sq[y].iter_mut().zip(s.amps()).zip(&mu[y]) {
            let d = a - m;
            *acc = *acc + d * d;
        }
    }
    let var = sq
        .into_iter()
        .zip(&counts)
        .map(|(row, &n)| {
            let dof = T::from_usize_lossy(n - 1);
            row.into_iter().map(|v| v / dof).collect()
        })
        .collect();

    let total = T::from_usize_lossy(labels.len());
    let priors = counts
        .iter()
        .map(|&n| T::from_usize_lossy(n) / total)
        .collect();

    Ok(ClassStats {
        grid,
        counts,
        priors,
        mu,
        var,
    })
}

/// Between-class (`sb`) and within-class (`sw`) scatter per bin.
pub fn scatters<T: Real>(stats: &ClassStats<T>) -> (Vec<T>, Vec<T>) {
    let grand = stats.grand_mean();
    let bins = stats.grid.num_bins();
    let mut sb = vec![T::zero(); bins];
    let mut sw = vec![T::zero(); bins];
    for ((&p, mu), var) in stats.priors.iter().zip(&stats.mu).zip(&stats.var) {
        for k in 0..bins {
            let d = mu[k] - grand[k];
            sb[k] = sb[k] + p * d * d;
            sw[k] = sw[k] + p * var[k];
        }
    }
    (sb, sw)
}

/// Raw and normalized discriminative index over a one-sided grid.
#[derive(Debug, Clone, PartialEq)]
pub struct DiSpectrum<T> {
    grid: FrequencyGrid<T>,
    di: Vec<T>,
    di_norm: Vec<T>,
    epsilon: T,
}

impl<T: Real> DiSpectrum<T> {
    /// Builds a spectrum from raw DI values, normalizing them into a PMF.
    pub fn from_raw(grid: FrequencyGrid<T>, di: Vec<T>, epsilon: T) -> Result<Self> {
        if !(epsilon > T::zero()) {
            return Err(param(format!("epsilon must be positive, got {epsilon}")));
        }
        if di.len() != grid.num_bins() {
            return Err(shape(format!(
                "{} DI values for a grid with {} bins",
                di.len(),
                grid.num_bins()
            )));
        }
        if let Some(v) = di.iter().find(|v| !(v.is_finite() && **v >= T::zero())) {
            return Err(param(format!("DI values must be finite and nonnegative, got {v}")));
        }
        let total: T = di.iter().copied().sum();
        if total <= T::zero() {
            return Err(Error::NoDiscrimination);
        }
        let di_norm = di.iter().map(|&v| v / total).collect();
        Ok(Self {
            grid,
            di,
            di_norm,
            epsilon,
        })
    }

    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn di(&self) -> &[T] {
        &self.di
    }

    pub fn di_norm(&self) -> &[T] {
        &self.di_norm
    }

    pub fn epsilon(&self) -> T {
        self.epsilon
    }

    /// Bin indices ordered by decreasing normalized DI (ties by lower bin).
    pub fn ranked_bins(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.di_norm.len()).collect();
        idx.sort_by(|&a, &b| {
            self.di_norm[b]
                .partial_cmp(&self.di_norm[a])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        idx
    }

    pub fn to_json(&self) -> Result<String> {
        let doc = DiDocument {
            len: self.grid.len(),
            epsilon: self.epsilon.as_f64(),
            di: self.di.iter().map(|v| v.as_f64()).collect(),
            di_norm: self.di_norm.iter().map(|v| v.as_f64()).collect(),
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    /// Parses the JSON document and re-validates the PMF.
    pub fn from_json(text: &str) -> Result<Self> {
        let doc: DiDocument = serde_json::from_str(text)?;
        let grid = FrequencyGrid::new(doc.len)?;
        if doc.di.len() != grid.num_bins() || doc.di_norm.len() != grid.num_bins() {
            return Err(shape(format!(
                "L={} needs {} bins, got di={} di_norm={}",
                doc.len,
                grid.num_bins(),
                doc.di.len(),
                doc.di_norm.len()
            )));
        }
        if !(doc.epsilon > 0.0) {
            return Err(param(format!("epsilon must be positive, got {}", doc.epsilon)));
        }
        let total: f64 = doc.di_norm.iter().sum();
        let tol = (4.0 * doc.di_norm.len() as f64 * T::epsilon().as_f64()).max(1e-9);
        if doc.di_norm.iter().any(|v| !(0.0..=1.0).contains(v)) || (total - 1.0).abs() > tol {
            return Err(Error::Format(format!(
                "di_norm is not a probability mass function (sum {total})"
            )));
        }
        Ok(Self {
            grid,
            di: doc.di.into_iter().map(T::lit).collect(),
            di_norm: doc.di_norm.into_iter().map(T::lit).collect(),
            epsilon: T::lit(doc.epsilon),
        })
    }
}

#[derive(Serialize, Deserialize)]
struct DiDocument {
    #[serde(rename = "L")]
    len: usize,
    epsilon: f64,
    di: Vec<f64>,
    di_norm: Vec<f64>,
}

pub fn di_spectrum<T: Real>(stats: &ClassStats<T>, epsilon: T) -> Result<DiSpectrum<T>> {
    if !(epsilon > T::zero()) {
        return Err(param(format!("epsilon must be positive, got {epsilon}")));
    }
    let (sb, sw) = scatters(stats);
    let di = sb
        .iter()
        .zip(&sw)
        .map(|(&b, &w)| b / (w + epsilon))
        .collect();
    DiSpectrum::from_raw(stats.grid.clone(), di, epsilon)
}

/// Full pipeline from labelled training samples to a DI spectrum.
pub fn di_from_samples<T: Real>(
    samples: &[SampleTensor<T>],
    labels: &[usize],
    config: SpectrumConfig,
    epsilon: T,
) -> Result<DiSpectrum<T>> {
    let spectra = spectra_for(samples, config)?;
    let stats = class_statistics(&spectra, labels)?;
    di_spectrum(&stats, epsilon)
}

/// Amplitude spectra for samples sharing one frame count.
pub fn spectra_for<T: Real>(
    samples: &[SampleTensor<T>],
    config: SpectrumConfig,
) -> Result<Vec<AmplitudeSpectrum<T>>> {
    let first = samples.first().ok_or_else(|| param("no samples supplied"))?;
    let grid = FrequencyGrid::new(first.frames())?;
    samples.iter().map(|s| config.amplitude(s, &grid)).collect()
}

/// Spearman rank correlation with average ranks for ties.
pub fn spearman(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return Err(shape(format!(
            "need two equal-length sequences of length ≥ 2, got {} and {}",
            a.len(),
            b.len()
        )));
    }
    let (ra, rb) = (average_ranks(a), average_ranks(b));
    Ok(pearson(&ra, &rb))
}

fn average_ranks(x: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..x.len()).collect();
    idx.sort_by(|&i, &j| x[i].total_cmp(&x[j]));
    let mut ranks = vec![0.0; x.len()];
    let mut start = 0;
    while start < idx.len() {
        let mut end = start + 1;
        while end < idx.len() && x[idx[end]] == x[idx[start]] {
            end += 1;
        }
        // 1-based ranks start+1..=end share their mean.
        let rank = (start + 1 + end) as f64 / 2.0;
        for &i in &idx[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let (mut cov, mut va, mut vb) = (0.0, 0.0, 0.0);
    for (x, y) in a.iter().zip(b) {
        cov += (x - ma) * (y - mb);
        va += (x - ma) * (x - ma);
        vb += (y - mb) * (y - mb);
    }
    if va == 0.0 || vb == 0.0 {
        return f64::NAN;
    }
    cov / (va * vb).sqrt()
}

/// Jensen–Shannon divergence in bits; `0·log 0 = 0`.
pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(shape(format!("PMFs of length {} and {}", p.len(), q.len())));
    }
    let kl = |x: &[f64], m: &[f64]| -> f64 {
        x.iter()
            .zip(m)
            .filter(|(&xi, _)| xi > 0.0)
            .map(|(&xi, &mi)| xi * (xi / mi).log2())
            .sum()
    };
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    Ok(0.5 * kl(p, &m) + 0.5 * kl(q, &m))
}
