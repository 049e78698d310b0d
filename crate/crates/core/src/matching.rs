//! Frequency-matching score and reference-boundary selection.
//!
//! `FMS(β) = Σ_k DI_norm[k]·H̃(ω_k; β)` is the share of discriminative
//! spectral mass that the LIF template passes at leak `β`. Sweeping an
//! ascending candidate set gives a non-increasing curve; the reference
//! boundary `β†` is the candidate whose normalized score deviates most from
//! the chord joining the curve's endpoints in `(log τ, FMS)` coordinates.

use std::fmt;

use serde::Serialize;

use crate::di::DiSpectrum;
use crate::error::{param, Error, Result};
use crate::lif_spectral::{check_beta, tau_from_beta, template_unchecked};
use crate::scalar::Real;

/// Default regime (i) threshold on β.
pub const DEFAULT_UNDER_THRESHOLD: f64 = 0.05;

pub fn fms_avg<T: Real>(di: &DiSpectrum<T>, beta: T) -> Result<T> {
    check_beta(beta)?;
    let score: T = di
        .di_norm()
        .iter()
        .zip(di.grid().omegas())
        .map(|(&p, &w)| p * template_unchecked(w, beta))
        .sum();
    Ok(score.max(T::zero()).min(T::one()))
}

/// Candidate set `{0.05, 0.10, …, 0.95}`.
pub fn default_candidates<T: Real>() -> Vec<T> {
    (1..=19).map(|i| T::lit(i as f64 / 20.0)).collect()
}

/// Parses `start:stop:step` into an inclusive ascending list.
///
/// `stop` is included when the step divides the span (to within 1e−9 of a
/// step); values are snapped to 12 decimals so `0.05:0.95:0.05` yields the
/// literal decimals.
pub fn parse_beta_range(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').map(str::trim).collect();
    let [start, stop, step] = parts.as_slice() else {
        return Err(param(format!("expected start:stop:step, got '{spec}'")));
    };
    let num = |s: &str| -> Result<f64> {
        s.parse::<f64>()
            .map_err(|_| param(format!("'{s}' is not a number in '{spec}'")))
    };
    let (start, stop, step) = (num(start)?, num(stop)?, num(step)?);
    if !(step > 0.0) || !step.is_finite() {
        return Err(param(format!("step must be positive, got {step}")));
    }
    if !(stop >= start) {
        return Err(param(format!("stop {stop} is below start {start}")));
    }
    let span = (stop - start) / step;
    let n = if (span - span.round()).abs() <= 1e-9 {
        span.round()
    } else {
        span.floor()
    } as usize;
    let values: Vec<f64> = (0..=n)
        .map(|i| ((start + i as f64 * step) * 1e12).round() / 1e12)
        .collect();
    for &b in &values {
        check_beta(b)?;
    }
    Ok(values)
}

/// FMS values over a strictly ascending candidate set.
#[derive(Debug, Clone, PartialEq)]
pub struct FmsCurve<T> {
    betas: Vec<T>,
    fms: Vec<T>,
}

impl<T: Real> FmsCurve<T> {
    pub fn new(betas: Vec<T>, fms: Vec<T>) -> Result<Self> {
        validate_candidates(&betas)?;
        if fms.len() != betas.len() {
            return Err(Error::Shape(format!(
                "{} betas but {} scores",
                betas.len(),
                fms.len()
            )));
        }
        if let Some(v) = fms
            .iter()
            .find(|v| !(**v >= T::zero() && **v <= T::one()))
        {
            return Err(param(format!("FMS values must lie in [0, 1], got {v}")));
        }
        Ok(Self { betas, fms })
    }

    pub fn betas(&self) -> &[T] {
        &self.betas
    }

    pub fn fms(&self) -> &[T] {
        &self.fms
    }

    pub fn len(&self) -> usize {
        self.betas.len()
    }

    pub fn is_empty(&self) -> bool {
        self.betas.is_empty()
    }

    /// CSV with header `beta,tau,fms`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("beta,tau,fms\n");
        for (&b, &f) in self.betas.iter().zip(&self.fms) {
            let tau = T::one() / (T::one() - b);
            out.push_str(&format!("{},{},{}\n", b.as_f64(), tau.as_f64(), f.as_f64()));
        }
        out
    }

    /// Reads the CSV written by [`FmsCurve::to_csv`]; the `tau` column is
    /// informational and recomputed from `beta`.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| Error::Format("empty FMS CSV".into()))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        let find = |name: &str| {
            cols.iter()
                .position(|c| *c == name)
                .ok_or_else(|| Error::Format(format!("FMS CSV lacks a '{name}' column")))
        };
        let (bi, fi) = (find("beta")?, find("fms")?);
        let mut betas = Vec::new();
        let mut fms = Vec::new();
        for (row, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            let get = |i: usize| -> Result<T> {
                fields
                    .get(i)
                    .and_then(|s| s.parse::<f64>().ok())
                    .map(T::lit)
                    .ok_or_else(|| Error::Format(format!("bad value in FMS CSV row {}", row + 2)))
            };
            betas.push(get(bi)?);
            fms.push(get(fi)?);
        }
        Self::new(betas, fms)
    }
}

fn validate_candidates<T: Real>(betas: &[T]) -> Result<()> {
    if betas.len() < 3 {
        return Err(Error::InsufficientCandidates(betas.len()));
    }
    for &b in betas {
        check_beta(b)?;
    }
    if let Some(w) = betas.windows(2).find(|w| !(w[0] < w[1])) {
        return Err(param(format!(
            "candidates must be strictly ascending ({} then {})",
            w[0], w[1]
        )));
    }
    Ok(())
}

pub fn fms_sweep<T: Real>(di: &DiSpectrum<T>, betas: &[T]) -> Result<FmsCurve<T>> {
    validate_candidates(betas)?;
    let fms = betas
        .iter()
        .map(|&b| fms_avg(di, b))
        .collect::<Result<Vec<_>>>()?;
    Ok(FmsCurve {
        betas: betas.to_vec(),
        fms,
    })
}

/// Outcome of the maximum-deviation rule.
#[derive(Debug, Clone, PartialEq)]
pub struct KneeResult<T> {
    pub beta_dagger: T,
    pub index: usize,
    /// Min-max normalized `log τ`.
    pub phis: Vec<T>,
    /// Min-max normalized FMS.
    pub psis: Vec<T>,
    pub deviations: Vec<T>,
    pub degenerate: bool,
}

impl<T: Real> KneeResult<T> {
    pub fn tau_dagger(&self) -> T {
        T::one() / (T::one() - self.beta_dagger)
    }

    /// `{"beta_dagger":…, "index":…, "deviations":[…], "degenerate":…}`.
    pub fn to_json(&self) -> Result<String> {
        #[derive(Serialize)]
        struct Doc {
            beta_dagger: f64,
            index: usize,
            deviations: Vec<f64>,
            degenerate: bool,
        }
        let doc = Doc {
            beta_dagger: self.beta_dagger.as_f64(),
            index: self.index,
            deviations: self.deviations.iter().map(|v| v.as_f64()).collect(),
            degenerate: self.degenerate,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

/// Min-max scaling; `None` when the range collapses.
fn min_max<T: Real>(values: &[T]) -> Option<Vec<T>> {
    let lo = values.iter().copied().fold(T::infinity(), T::min);
    let hi = values.iter().copied().fold(T::neg_infinity(), T::max);
    let range = hi - lo;
    (range > T::zero()).then(|| values.iter().map(|&v| (v - lo) / range).collect())
}

/// Maximum vertical deviation from the endpoint chord in normalized
/// `(log τ, FMS)` coordinates; ties go to the smallest β.
///
/// A collapsed coordinate range maps every coordinate to 0, flags the result
/// degenerate and returns the first candidate.
pub fn select_boundary<T: Real>(curve: &FmsCurve<T>) -> KneeResult<T> {
    let n = curve.len();
    let log_tau: Vec<T> = curve
        .betas
        .iter()
        .map(|&b| tau_from_beta(b).expect("validated candidate").ln())
        .collect();
    let (phis, psis) = match (min_max(&log_tau), min_max(&curve.fms)) {
        (Some(phis), Some(psis)) => (phis, psis),
        _ => {
            return KneeResult {
                beta_dagger: curve.betas[0],
                index: 0,
                phis: vec![T::zero(); n],
                psis: vec![T::zero(); n],
                deviations: vec![T::zero(); n],
                degenerate: true,
            }
        }
    };
    let (first, last) = (psis[0], psis[n - 1]);
    let deviations: Vec<T> = phis
        .iter()
        .zip(&psis)
        .map(|(&phi, &psi)| ((T::one() - phi) * first + phi * last - psi).abs())
        .collect();
    let mut index = 0;
    for (r, &d) in deviations.iter().enumerate() {
        if d > deviations[index] {
            index = r;
        }
    }
    KneeResult {
        beta_dagger: curve.betas[index],
        index,
        phis,
        psis,
        deviations,
        degenerate: false,
    }
}

/// Operating regime of a leak relative to the reference boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Regime {
    UnderFilter,
    StabilityWindow,
    OverLowPass,
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::UnderFilter => "under-filter",
            Regime::StabilityWindow => "stability-window",
            Regime::OverLowPass => "over-low-pass",
        })
    }
}

pub fn classify_regime<T: Real>(beta: T, beta_dagger: T, under_threshold: T) -> Regime {
    if beta >= beta_dagger {
        Regime::OverLowPass
    } else if beta < under_threshold {
        Regime::UnderFilter
    } else {
        Regime::StabilityWindow
    }
}
