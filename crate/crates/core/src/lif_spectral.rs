//! Closed-form frequency response of the subthreshold LIF recurrence.
//!
//! Below threshold the membrane obeys `u_t = β·u_{t−1} + α·I_t`, a one-pole
//! low-pass filter. Its squared gain normalized by the DC gain is
//!
//! ```text
//! H̃(ω; β) = (1 − β)² / ((1 − β)² + 2β(1 − cos ω))
//! ```
//!
//! which is independent of the input scaling `α`. The half-power point
//! `H̃ = ½` exists only for `β ≥ 3 − 2√2`; below that the template never drops
//! to one half on `[0, π]` and the effective bandwidth saturates at Nyquist.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::scalar::Real;
use crate::spectrum::FrequencyGrid;

/// Smallest leak with a half-power crossing on `[0, π]`.
pub fn existence_threshold<T: Real>() -> T {
    T::lit(3.0) - T::lit(2.0) * T::SQRT_2()
}

/// Discretization used to derive β from the membrane time constant (Δt = 1).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Scheme {
    /// `β = 1 − 1/τ`, valid for `τ ≥ 1`.
    #[default]
    Euler,
    /// `β = exp(−1/τ)`.
    Exponential,
}

impl FromStr for Scheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "euler" => Ok(Scheme::Euler),
            "exponential" | "exp" => Ok(Scheme::Exponential),
            other => Err(param(format!("unknown scheme '{other}'"))),
        }
    }
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Scheme::Euler => "euler",
            Scheme::Exponential => "exponential",
        })
    }
}

/// Membrane decay factor together with the time constant it came from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LeakParam<T> {
    beta: T,
    tau: T,
    scheme: Scheme,
}

impl<T: Real> LeakParam<T> {
    pub fn from_tau(tau: T, scheme: Scheme) -> Result<Self> {
        leak_from_tau(tau, scheme)
    }

    /// Inverse mapping: recovers the time constant of an existing β.
    pub fn from_beta(beta: T, scheme: Scheme) -> Result<Self> {
        check_beta(beta)?;
        let tau = match scheme {
            Scheme::Euler => tau_from_beta(beta)?,
            Scheme::Exponential => {
                if beta <= T::zero() {
                    return Err(param("exponential scheme needs β > 0"));
                }
                -T::one() / beta.ln()
            }
        };
        Ok(Self { beta, tau, scheme })
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    pub fn tau(&self) -> T {
        self.tau
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }
}

pub fn leak_from_tau<T: Real>(tau: T, scheme: Scheme) -> Result<LeakParam<T>> {
    if !tau.is_finite() {
        return Err(param(format!("τ must be finite, got {tau}")));
    }
    let beta = match scheme {
        Scheme::Euler => {
            if tau < T::one() {
                return Err(param(format!("euler scheme needs τ ≥ 1, got {tau}")));
            }
            T::one() - T::one() / tau
        }
        Scheme::Exponential => {
            if tau <= T::zero() {
                return Err(param(format!("τ must be positive, got {tau}")));
            }
            (-T::one() / tau).exp()
        }
    };
    Ok(LeakParam { beta, tau, scheme })
}

/// `τ = 1/(1 − β)`.
pub fn tau_from_beta<T: Real>(beta: T) -> Result<T> {
    check_beta(beta)?;
    Ok(T::one() / (T::one() - beta))
}

pub(crate) fn check_beta<T: Real>(beta: T) -> Result<()> {
    if beta >= T::zero() && beta < T::one() {
        Ok(())
    } else {
        Err(param(format!("β must lie in [0, 1), got {beta}")))
    }
}

/// DC-normalized power template `H̃(ω; β)`.
pub fn template_at<T: Real>(omega: T, beta: T) -> Result<T> {
    check_beta(beta)?;
    let slack = T::lit(1e-12);
    if !(omega >= -slack && omega <= T::PI() + slack) {
        return Err(param(format!("ω must lie in [0, π], got {omega}")));
    }
    Ok(template_unchecked(omega, beta))
}

#[inline]
pub(crate) fn template_unchecked<T: Real>(omega: T, beta: T) -> T {
    let pass = (T::one() - beta) * (T::one() - beta);
    pass / (pass + T::lit(2.0) * beta * (T::one() - omega.cos()))
}

/// `H̃` sampled on every bin of a one-sided grid.
#[derive(Debug, Clone, PartialEq)]
pub struct LifTemplate<T> {
    grid: FrequencyGrid<T>,
    values: Vec<T>,
    beta: T,
}

impl<T: Real> LifTemplate<T> {
    pub fn grid(&self) -> &FrequencyGrid<T> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn beta(&self) -> T {
        self.beta
    }

    /// CSV with header `omega,h_tilde`, one row per bin.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("omega,h_tilde\n");
        for (w, h) in self.grid.omegas().iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", w.as_f64(), h.as_f64()));
        }
        out
    }
}

pub fn sample_template<T: Real>(grid: &FrequencyGrid<T>, beta: T) -> Result<LifTemplate<T>> {
    check_beta(beta)?;
    let values = grid
        .omegas()
        .iter()
        .map(|&w| template_unchecked(w, beta))
        .collect();
    Ok(LifTemplate {
        grid: grid.clone(),
        values,
        beta,
    })
}

/// Half-power cutoff, or the marker that no crossing exists on `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cutoff<T> {
    Frequency(T),
    Saturated,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bandwidth<T> {
    pub beta: T,
    pub cutoff: Cutoff<T>,
    pub quantized_bin: Option<usize>,
}

impl<T: Real> Bandwidth<T> {
    /// Effective bandwidth: the cutoff, or π when saturated.
    pub fn effective(&self) -> T {
        match self.cutoff {
            Cutoff::Frequency(w) => w,
            Cutoff::Saturated => T::PI(),
        }
    }

    pub fn is_saturated(&self) -> bool {
        matches!(self.cutoff, Cutoff::Saturated)
    }

    pub fn with_bin(mut self, grid: &FrequencyGrid<T>) -> Self {
        self.quantized_bin = Some(quantize_cutoff(&self, grid));
        self
    }

    /// `{"beta":…, "cutoff":…, "bin":…}` or `{"beta":…, "saturated":true, "bin":…}`.
    pub fn to_json(&self) -> Result<String> {
        let doc = BandwidthDocument {
            beta: self.beta.as_f64(),
            cutoff: match self.cutoff {
                Cutoff::Frequency(w) => Some(w.as_f64()),
                Cutoff::Saturated => None,
            },
            saturated: self.is_saturated().then_some(true),
            bin: self.quantized_bin,
        };
        Ok(serde_json::to_string_pretty(&doc)?)
    }
}

#[derive(Serialize)]
struct BandwidthDocument {
    beta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    cutoff: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    saturated: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    bin: Option<usize>,
}

/// Closed-form half-power cutoff `ω_c = arccos((4β − 1 − β²)/(2β))`.
pub fn cutoff<T: Real>(beta: T) -> Result<Bandwidth<T>> {
    check_beta(beta)?;
    let cutoff = if beta < existence_threshold() {
        Cutoff::Saturated
    } else {
        let two = T::lit(2.0);
        let x = (T::lit(4.0) * beta - T::one() - beta * beta) / (two * beta);
        let tol = T::lit(1e-12);
        if x < -T::one() - tol || x > T::one() + tol {
            return Err(param(format!(
                "arccos argument {x} out of range for β = {beta}"
            )));
        }
        Cutoff::Frequency(x.max(-T::one()).min(T::one()).acos())
    };
    Ok(Bandwidth {
        beta,
        cutoff,
        quantized_bin: None,
    })
}

/// Nearest grid bin to the cutoff; ties resolve to the lower bin and a
/// saturated bandwidth maps to the top bin `K`.
pub fn quantize_cutoff<T: Real>(bw: &Bandwidth<T>, grid: &FrequencyGrid<T>) -> usize {
    let target = match bw.cutoff {
        Cutoff::Saturated => return grid.max_bin(),
        Cutoff::Frequency(w) => w,
    };
    let mut best = 0;
    let mut best_dist = (grid.omega(0) - target).abs();
    for (k, &w) in grid.omegas().iter().enumerate().skip(1) {
        let d = (w - target).abs();
        if d < best_dist {
            best = k;
            best_dist = d;
        }
    }
    best
}

/// Bins with `ω_k ≤ ω_c(β)`; every bin when saturated.
pub fn in_band_bins<T: Real>(beta: T, grid: &FrequencyGrid<T>) -> Result<Vec<usize>> {
    let bw = cutoff(beta)?;
    let limit = bw.effective();
    Ok(grid
        .omegas()
        .iter()
        .enumerate()
        .filter(|(_, &w)| w <= limit)
        .map(|(k, _)| k)
        .collect())
}
