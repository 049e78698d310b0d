//! Discrete-time LIF simulation and spike-rate diagnostics.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{param, shape, Error, Result};
use crate::lif_spectral::{LeakParam, Scheme};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ResetMode {
    /// Jump to `v_reset` after a spike.
    #[default]
    Hard,
    /// Subtract `v_th` after a spike.
    Soft,
}

impl FromStr for ResetMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "hard" => Ok(ResetMode::Hard),
            "soft" => Ok(ResetMode::Soft),
            other => Err(param(format!("unknown reset mode '{other}'"))),
        }
    }
}

impl fmt::Display for ResetMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ResetMode::Hard => "hard",
            ResetMode::Soft => "soft",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LifConfig<T> {
    pub leak: LeakParam<T>,
    /// Scale the input by `1/τ` instead of 1.
    pub decay_input: bool,
    /// Firing threshold; `+∞` disables spiking.
    pub v_th: T,
    pub v_reset: T,
    pub reset: ResetMode,
}

impl<T: Real> LifConfig<T> {
    pub fn new(leak: LeakParam<T>, decay_input: bool, v_th: T) -> Result<Self> {
        let config = Self {
            leak,
            decay_input,
            v_th,
            v_reset: T::zero(),
            reset: ResetMode::Hard,
        };
        config.validate()?;
        Ok(config)
    }

    /// Threshold disabled: the neuron is a pure one-pole filter.
    pub fn subthreshold(leak: LeakParam<T>, decay_input: bool) -> Self {
        Self {
            leak,
            decay_input,
            v_th: T::infinity(),
            v_reset: T::zero(),
            reset: ResetMode::Hard,
        }
    }

    pub fn with_reset(mut self, reset: ResetMode, v_reset: T) -> Result<Self> {
        self.reset = reset;
        self.v_reset = v_reset;
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_th > T::zero()) {
            return Err(param(format!("v_th must be positive, got {}", self.v_th)));
        }
        if !self.v_reset.is_finite() {
            return Err(param("v_reset must be finite"));
        }
        if self.reset == ResetMode::Hard && !(self.v_th > self.v_reset) {
            return Err(param(format!(
                "hard reset needs v_th > v_reset ({} ≤ {})",
                self.v_th, self.v_reset
            )));
        }
        if self.leak.scheme() == Scheme::Euler && self.leak.tau() < T::one() {
            return Err(param("euler scheme needs τ ≥ 1"));
        }
        Ok(())
    }

    pub fn beta(&self) -> T {
        self.leak.beta()
    }

    /// Input gain: `1/τ` with input decay, otherwise 1.
    pub fn alpha(&self) -> T {
        if self.decay_input {
            T::one() / self.leak.tau()
        } else {
            T::one()
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: LifConfigDocument = serde_json::from_str(text)?;
        doc.into_config()
    }
}

/// JSON form of [`LifConfig`]. Exactly one of `beta` / `tau` is given;
/// a missing or null `v_th` disables spiking.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LifConfigDocument {
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub tau: Option<f64>,
    #[serde(default)]
    pub scheme: Scheme,
    #[serde(default)]
    pub decay_input: bool,
    #[serde(default)]
    pub v_th: Option<f64>,
    #[serde(default)]
    pub v_reset: f64,
    #[serde(default)]
    pub reset: ResetMode,
}

impl LifConfigDocument {
    pub fn into_config<T: Real>(self) -> Result<LifConfig<T>> {
        let leak = match (self.beta, self.tau) {
            (Some(b), None) => LeakParam::from_beta(T::lit(b), self.scheme)?,
            (None, Some(t)) => LeakParam::from_tau(T::lit(t), self.scheme)?,
            _ => return Err(param("specify exactly one of 'beta' or 'tau'")),
        };
        let config = LifConfig {
            leak,
            decay_input: self.decay_input,
            v_th: self.v_th.map_or(T::infinity(), T::lit),
            v_reset: T::lit(self.v_reset),
            reset: self.reset,
        };
        config.validate()?;
        Ok(config)
    }
}

/// One update: `u = β·u_prev + α·I`, then threshold and reset.
///
/// Returns the pre-reset potential, the post-reset state and the spike bit.
#[inline]
pub fn step<T: Real>(config: &LifConfig<T>, u_prev: T, input: T) -> (T, T, bool) {
    let u = config.beta() * u_prev + config.alpha() * input;
    if u >= config.v_th {
        let next = match config.reset {
            ResetMode::Hard => config.v_reset,
            ResetMode::Soft => u - config.v_th,
        };
        (u, next, true)
    } else {
        (u, u, false)
    }
}

/// Stateful single neuron.
#[derive(Debug, Clone)]
pub struct Neuron<T> {
    config: LifConfig<T>,
    u: T,
}

impl<T: Real> Neuron<T> {
    pub fn new(config: LifConfig<T>, u0: T) -> Self {
        Self { config, u: u0 }
    }

    pub fn potential(&self) -> T {
        self.u
    }

    /// Advances one step and returns `(pre-reset potential, spike)`.
    pub fn advance(&mut self, input: T) -> (T, bool) {
        let (pre, next, spike) = step(&self.config, self.u, input);
        self.u = next;
        (pre, spike)
    }
}

/// Per-step membrane values and spikes of one neuron.
#[derive(Debug, Clone, PartialEq)]
pub struct SpikeTrace<T> {
    /// Pre-reset potential `u_t`; `spikes[t]` is set iff it reached `v_th`.
    pub potentials: Vec<T>,
    /// State carried into the next step.
    pub states: Vec<T>,
    pub spikes: Vec<bool>,
}

impl<T: Real> SpikeTrace<T> {
    pub fn len(&self) -> usize {
        self.spikes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spikes.is_empty()
    }

    pub fn spike_count(&self) -> usize {
        self.spikes.iter().filter(|&&s| s).count()
    }

    /// CSV with header `t,u,spike`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,u,spike\n");
        for (t, (u, s)) in self.potentials.iter().zip(&self.spikes).enumerate() {
            out.push_str(&format!("{t},{},{}\n", u.as_f64(), u8::from(*s)));
        }
        out
    }
}

pub fn run<T: Real>(config: &LifConfig<T>, inputs: &[T], steps: usize, u0: T) -> Result<SpikeTrace<T>> {
    if steps == 0 {
        return Err(param("T must be positive"));
    }
    if inputs.len() < steps {
        return Err(shape(format!(
            "{} inputs for {steps} timesteps",
            inputs.len()
        )));
    }
    let mut neuron = Neuron::new(*config, u0);
    let mut trace = SpikeTrace {
        potentials: Vec::with_capacity(steps),
        states: Vec::with_capacity(steps),
        spikes: Vec::with_capacity(steps),
    };
    for &i in &inputs[..steps] {
        let (pre, spike) = neuron.advance(i);
        trace.potentials.push(pre);
        trace.states.push(neuron.potential());
        trace.spikes.push(spike);
    }
    Ok(trace)
}

/// Mean spikes per neuron per timestep over a layer of traces.
pub fn mean_spike_rate<T: Real>(traces: &[SpikeTrace<T>]) -> Result<f64> {
    let first = traces.first().ok_or_else(|| param("no traces supplied"))?;
    let steps = first.len();
    if steps == 0 {
        return Err(param("traces are empty"));
    }
    if traces.iter().any(|t| t.len() != steps) {
        return Err(shape("traces have different lengths"));
    }
    let spikes: usize = traces.iter().map(SpikeTrace::spike_count).sum();
    Ok(spikes as f64 / (steps * traces.len()) as f64)
}

/// Bounds for the β-sweep validity flag.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValidityBounds {
    pub gamma_min: f64,
    pub gamma_max: f64,
    pub kappa: f64,
    pub eps: f64,
}

impl Default for ValidityBounds {
    fn default() -> Self {
        Self {
            gamma_min: 0.01,
            gamma_max: 0.99,
            kappa: 20.0,
            eps: 1e-9,
        }
    }
}

impl ValidityBounds {
    pub fn validate(&self) -> Result<()> {
        let Self {
            gamma_min,
            gamma_max,
            kappa,
            eps,
        } = *self;
        if !(0.0 < gamma_min && gamma_min < gamma_max && gamma_max < 1.0) {
            return Err(param(format!(
                "need 0 < gamma_min < gamma_max < 1, got ({gamma_min}, {gamma_max})"
            )));
        }
        if !(kappa > 1.0) {
            return Err(param(format!("kappa must exceed 1, got {kappa}")));
        }
        if !(eps > 0.0) {
            return Err(param(format!("eps must be positive, got {eps}")));
        }
        Ok(())
    }
}

/// Layer mean spike rates per candidate β, keyed by layer name.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RateReport {
    pub layers: BTreeMap<String, Vec<(f64, f64)>>,
}

impl RateReport {
    pub fn insert(&mut self, layer: &str, beta: f64, rate: f64) {
        let entry = self.layers.entry(layer.to_owned()).or_default();
        match entry.iter_mut().find(|(b, _)| *b == beta) {
            Some(slot) => slot.1 = rate,
            None => entry.push((beta, rate)),
        }
        entry.sort_by(|a, b| a.0.total_cmp(&b.0));
    }

    /// `{"layer": {"0.5": 0.3, …}, …}`.
    pub fn to_json(&self) -> Result<String> {
        let doc: BTreeMap<&str, serde_json::Map<String, serde_json::Value>> = self
            .layers
            .iter()
            .map(|(name, rates)| {
                let m = rates
                    .iter()
                    .map(|(b, r)| (b.to_string(), serde_json::Value::from(*r)))
                    .collect();
                (name.as_str(), m)
            })
            .collect();
        Ok(serde_json::to_string_pretty(&doc)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let doc: BTreeMap<String, BTreeMap<String, f64>> = serde_json::from_str(text)?;
        let mut report = RateReport::default();
        for (layer, rates) in doc {
            for (beta, rate) in rates {
                let b: f64 = beta
                    .parse()
                    .map_err(|_| Error::Format(format!("layer '{layer}': bad β key '{beta}'")))?;
                if !(0.0..=1.0).contains(&rate) {
                    return Err(Error::Format(format!(
                        "layer '{layer}': rate {rate} outside [0, 1]"
                    )));
                }
                report.insert(&layer, b, rate);
            }
        }
        Ok(report)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerDiagnosis {
    pub layer: String,
    /// `(β, Γ)` pairs above `gamma_max`.
    pub saturated: Vec<(f64, f64)>,
    /// `(β, Γ)` pairs below `gamma_min`.
    pub collapsed: Vec<(f64, f64)>,
    /// `max Γ / (min Γ + ε)` across the sweep.
    pub ratio: f64,
    pub ratio_exceeded: bool,
}

impl LayerDiagnosis {
    pub fn flagged(&self) -> bool {
        !self.saturated.is_empty() || !self.collapsed.is_empty() || self.ratio_exceeded
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    pub flagged: bool,
    pub bounds: ValidityBounds,
    pub layers: Vec<LayerDiagnosis>,
}

pub fn validity_flag(rates: &RateReport, bounds: ValidityBounds) -> Result<ValidityReport> {
    bounds.validate()?;
    let mut layers = Vec::with_capacity(rates.layers.len());
    for (name, sweep) in &rates.layers {
        if sweep.is_empty() {
            return Err(param(format!("layer '{name}' has no rates")));
        }
        let saturated = sweep
            .iter()
            .copied()
            .filter(|&(_, g)| g > bounds.gamma_max)
            .collect();
        let collapsed = sweep
            .iter()
            .copied()
            .filter(|&(_, g)| g < bounds.gamma_min)
            .collect();
        let max = sweep.iter().map(|p| p.1).fold(f64::NEG_INFINITY, f64::max);
        let min = sweep.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        let ratio = max / (min + bounds.eps);
        layers.push(LayerDiagnosis {
            layer: name.clone(),
            saturated,
            collapsed,
            ratio,
            ratio_exceeded: ratio > bounds.kappa,
        });
    }
    Ok(ValidityReport {
        flagged: layers.iter().any(LayerDiagnosis::flagged),
        bounds,
        layers,
    })
}

/// Measures the steady-state amplitude gain of the subthreshold neuron for a
/// unit cosine at `omega`.
///
/// The drive runs for a transient of `10/(1 − β)` steps before the output is
/// projected onto the in-phase and quadrature components of the tone over at
/// least `cycles` periods. `omega = 0` uses the settled response to a unit
/// step instead.
pub fn gain_probe<T: Real>(config: &LifConfig<T>, omega: T, cycles: usize) -> Result<T> {
    if config.v_th.is_finite() {
        return Err(param("gain probe needs the threshold disabled (v_th = +∞)"));
    }
    if cycles == 0 {
        return Err(param("cycles must be positive"));
    }
    let w = omega.as_f64();
    if !(0.0..=std::f64::consts::PI + 1e-12).contains(&w) {
        return Err(param(format!("ω must lie in [0, π], got {w}")));
    }
    let beta = config.beta().as_f64();
    let transient = (10.0 / (1.0 - beta)).ceil() as usize;
    let window = if w == 0.0 {
        cycles.max(1)
    } else {
        (cycles as f64 * 2.0 * std::f64::consts::PI / w).ceil() as usize
    };
    let total = transient + window;
    let drive: Vec<T> = (0..total)
        .map(|t| if w == 0.0 { T::one() } else { T::lit((w * t as f64).cos()) })
        .collect();
    let trace = run(config, &drive, total, T::zero())?;
    let out: Vec<f64> = trace.states[transient..].iter().map(|v| v.as_f64()).collect();
    let inp: Vec<f64> = drive[transient..].iter().map(|v| v.as_f64()).collect();

    if w == 0.0 {
        let mean = out.iter().sum::<f64>() / out.len() as f64;
        return Ok(T::lit(mean));
    }
    let start = transient as f64;
    let gain = tone_amplitude(&out, w, start) / tone_amplitude(&inp, w, start);
    Ok(T::lit(gain))
}

/// Least-squares amplitude of `a·cos(ωt) + b·sin(ωt)` fitted to `x`.
fn tone_amplitude(x: &[f64], w: f64, t0: f64) -> f64 {
    let (mut cc, mut ss, mut cs, mut xc, mut xs) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (i, &v) in x.iter().enumerate() {
        let t = t0 + i as f64;
        let (s, c) = (w * t).sin_cos();
        cc += c * c;
        ss += s * s;
        cs += c * s;
        xc += v * c;
        xs += v * s;
    }
    let det = cc * ss - cs * cs;
    // At ω = π the sine column vanishes and only the cosine fit remains.
    if det.abs() <= 1e-9 * cc * ss.max(1.0) {
        return (xc / cc).abs();
    }
    let a = (xc * ss - xs * cs) / det;
    let b = (xs * cc - xc * cs) / det;
    a.hypot(b)
}

/// Closed-form subthreshold gain `α / |1 − β e^{−jω}|`.
pub fn analytic_gain<T: Real>(config: &LifConfig<T>, omega: T) -> T {
    let beta = config.beta();
    let mag = (T::one() - T::lit(2.0) * beta * omega.cos() + beta * beta).sqrt();
    config.alpha() / mag
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lif_spectral::{leak_from_tau, template_at};
    use std::f64::consts::PI;

    fn leak(beta: f64) -> LeakParam<f64> {
        LeakParam::from_beta(beta, Scheme::Euler).unwrap()
    }

    fn spiking(beta: f64, decay_input: bool, v_th: f64, reset: ResetMode) -> LifConfig<f64> {
        LifConfig::new(leak(beta), decay_input, v_th)
            .unwrap()
            .with_reset(reset, 0.0)
            .unwrap()
    }

    #[test]
    fn memoryless_passthrough() {
        let cfg = LifConfig::subthreshold(leak_from_tau(1.0, Scheme::Euler).unwrap(), false);
        assert_eq!(cfg.beta(), 0.0);
        let (pre, next, spike) = step(&cfg, 3.0, 1.25);
        assert_eq!((pre, next, spike), (1.25, 1.25, false));
    }

    #[test]
    fn hand_step_hard_and_soft() {
        let hard = spiking(0.5, true, 1.0, ResetMode::Hard);
        assert_eq!(hard.alpha(), 0.5);
        assert_eq!(step(&hard, 0.0, 2.0), (1.0, 0.0, true));
        let soft = spiking(0.5, true, 1.0, ResetMode::Soft);
        assert_eq!(step(&soft, 0.0, 2.0), (1.0, 0.0, true));
        assert_eq!(step(&hard, 0.0, 3.0).1, 0.0);
        assert_eq!(step(&soft, 0.0, 3.0).1, 0.5);
        // ≥, not >.
        assert!(!step(&hard, 0.0, 1.999_999).2);
    }

    #[test]
    fn euler_input_decay_matches_main_text_form() {
        let cfg = LifConfig::subthreshold(leak(0.8), true);
        let (_, next, _) = step(&cfg, 0.4, 2.0);
        let want = 0.8 * 0.4 + (1.0 - 0.8) * 2.0;
        assert!((next - want).abs() < 1e-15);
    }

    #[test]
    fn constant_drive_fires_every_step() {
        let cfg = spiking(0.5, true, 1.0, ResetMode::Hard);
        let trace = run(&cfg, &[2.0; 16], 16, 0.0).unwrap();
        assert!(trace.spikes.iter().all(|&s| s));
        assert_eq!(mean_spike_rate(&[trace]).unwrap(), 1.0);
    }

    #[test]
    fn silent_input() {
        let cfg = spiking(0.9, false, 1.0, ResetMode::Hard);
        let trace = run(&cfg, &[0.0; 8], 8, 0.0).unwrap();
        assert_eq!(trace.spike_count(), 0);
        assert!(trace.potentials.iter().all(|&u| u == 0.0));
    }

    #[test]
    fn subthreshold_step_settles_at_input() {
        let cfg = LifConfig::subthreshold(leak(0.9), true);
        let trace = run(&cfg, &[0.7; 400], 400, 0.0).unwrap();
        assert!((trace.states[399] - 0.7).abs() < 1e-12);
    }

    #[test]
    fn spike_iff_pre_reset_reaches_threshold() {
        let cfg = spiking(0.7, false, 1.0, ResetMode::Soft);
        let inputs: Vec<f64> = (0..200).map(|t| 0.6 * ((t as f64) * 0.37).sin().abs()).collect();
        let trace = run(&cfg, &inputs, 200, 0.0).unwrap();
        for (u, s) in trace.potentials.iter().zip(&trace.spikes) {
            assert_eq!(*s, *u >= 1.0);
        }
        assert!(trace.spike_count() > 0);
    }

    #[test]
    fn run_errors() {
        let cfg = spiking(0.5, false, 1.0, ResetMode::Hard);
        assert!(matches!(run(&cfg, &[1.0; 3], 4, 0.0), Err(Error::Shape(_))));
        assert!(matches!(run(&cfg, &[1.0; 3], 0, 0.0), Err(Error::Parameter(_))));
    }

    #[test]
    fn config_validation() {
        assert!(LifConfig::new(leak(0.5), false, 0.0).is_err());
        assert!(LifConfig::new(leak(0.5), false, 1.0)
            .unwrap()
            .with_reset(ResetMode::Hard, 1.5)
            .is_err());
        assert!(LifConfig::new(leak(0.5), false, 1.0)
            .unwrap()
            .with_reset(ResetMode::Soft, 1.5)
            .is_ok());
    }

    #[test]
    fn config_json() {
        let cfg = LifConfig::<f64>::from_json(
            r#"{"tau": 2.0, "decay_input": true, "v_th": 1.0, "reset": "soft"}"#,
        )
        .unwrap();
        assert_eq!(cfg.beta(), 0.5);
        assert_eq!(cfg.reset, ResetMode::Soft);
        let sub = LifConfig::<f64>::from_json(r#"{"beta": 0.25}"#).unwrap();
        assert!(sub.v_th.is_infinite());
        assert!(LifConfig::<f64>::from_json(r#"{"beta": 0.25, "tau": 2}"#).is_err());
        assert!(LifConfig::<f64>::from_json(r#"{"beta": 1.0}"#).is_err());
        assert!(LifConfig::<f64>::from_json(r#"{"beta": 0.2, "vth": 1}"#).is_err());
    }

    #[test]
    fn spike_rates() {
        let t = |s: Vec<bool>| SpikeTrace {
            potentials: vec![0.0; s.len()],
            states: vec![0.0; s.len()],
            spikes: s,
        };
        assert_eq!(mean_spike_rate(&[t(vec![true; 4]), t(vec![true; 4])]).unwrap(), 1.0);
        assert_eq!(
            mean_spike_rate(&[t(vec![true, false]), t(vec![false, true])]).unwrap(),
            0.5
        );
        assert!(mean_spike_rate::<f64>(&[]).is_err());
        assert!(mean_spike_rate(&[t(vec![true]), t(vec![true, false])]).is_err());
    }

    fn report(pairs: &[(&str, f64, f64)]) -> RateReport {
        let mut r = RateReport::default();
        for &(layer, b, g) in pairs {
            r.insert(layer, b, g);
        }
        r
    }

    #[test]
    fn validity_examples() {
        let bounds = ValidityBounds {
            gamma_min: 0.01,
            gamma_max: 0.99,
            kappa: 10.0,
            eps: 1e-9,
        };
        let ok = report(&[("l1", 0.1, 0.3), ("l1", 0.5, 0.3), ("l2", 0.1, 0.3)]);
        assert!(!validity_flag(&ok, bounds).unwrap().flagged);

        let sat = report(&[("l1", 0.1, 0.5), ("l1", 0.9, 0.995)]);
        let r = validity_flag(&sat, bounds).unwrap();
        assert!(r.flagged);
        assert_eq!(r.layers[0].saturated, vec![(0.9, 0.995)]);
        assert!(!r.layers[0].ratio_exceeded);

        let spread = report(&[("l1", 0.1, 0.5), ("l1", 0.9, 0.02)]);
        let r = validity_flag(&spread, bounds).unwrap();
        assert!(r.flagged);
        assert_eq!(r.layers[0].ratio, 0.5 / (0.02 + 1e-9));
        assert!(r.layers[0].ratio_exceeded);
        assert!(r.layers[0].saturated.is_empty() && r.layers[0].collapsed.is_empty());
    }

    #[test]
    fn validity_bound_errors() {
        let r = report(&[("l1", 0.1, 0.3)]);
        for bad in [
            ValidityBounds { gamma_min: 0.0, ..Default::default() },
            ValidityBounds { gamma_min: 0.5, gamma_max: 0.4, ..Default::default() },
            ValidityBounds { gamma_max: 1.0, ..Default::default() },
            ValidityBounds { kappa: 1.0, ..Default::default() },
            ValidityBounds { eps: 0.0, ..Default::default() },
        ] {
            assert!(matches!(validity_flag(&r, bad), Err(Error::Parameter(_))));
        }
    }

    #[test]
    fn rate_report_json() {
        let r = report(&[("conv1", 0.5, 0.25), ("conv1", 0.1, 0.5), ("fc", 0.9, 0.0)]);
        let text = r.to_json().unwrap();
        let back = RateReport::from_json(&text).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.layers["conv1"][0], (0.1, 0.5));
        assert!(RateReport::from_json(r#"{"l": {"x": 0.1}}"#).is_err());
        assert!(RateReport::from_json(r#"{"l": {"0.1": 1.5}}"#).is_err());
    }

    #[test]
    fn gain_probe_identity_and_nyquist() {
        let id = LifConfig::subthreshold(leak(0.0), false);
        for w in [0.3, 1.0, PI] {
            assert!((gain_probe(&id, w, 4).unwrap() - 1.0).abs() < 1e-9);
        }
        let half = LifConfig::subthreshold(leak(0.5), false);
        let g = gain_probe(&half, PI, 8).unwrap();
        assert!((g - 2.0 / 3.0).abs() < 1e-3, "{g}");
    }

    #[test]
    fn gain_probe_dc_redirect() {
        let cfg = LifConfig::subthreshold(leak(0.8), false);
        let g = gain_probe(&cfg, 0.0, 16).unwrap();
        assert!((g - 5.0).abs() < 1e-3, "{g}");
    }

    #[test]
    fn squared_gain_ratio_matches_template() {
        for &(beta, w) in &[(0.5, PI / 4.0), (0.9, PI / 8.0), (0.2, 3.0 * PI / 4.0)] {
            let cfg = LifConfig::subthreshold(leak(beta), true);
            let g = gain_probe(&cfg, w, 8).unwrap();
            let g0 = gain_probe(&cfg, 0.0, 8).unwrap();
            let ratio = (g / g0).powi(2);
            let want = template_at(w, beta).unwrap();
            assert!((ratio - want).abs() < 1e-3, "β={beta} ω={w}: {ratio} vs {want}");
        }
    }

    #[test]
    fn gain_probe_requires_disabled_threshold() {
        let cfg = spiking(0.5, false, 1.0, ResetMode::Hard);
        assert!(gain_probe(&cfg, 1.0, 4).is_err());
    }

    #[test]
    fn bibo_bound() {
        let cfg = LifConfig::subthreshold(leak(0.95), false);
        let inputs: Vec<f64> = (0..500).map(|t| if t % 7 < 4 { 1.0 } else { -1.0 }).collect();
        let trace = run(&cfg, &inputs, 500, 0.3).unwrap();
        let bound = cfg.alpha() / (1.0 - cfg.beta()) + 0.3;
        assert!(trace.states.iter().all(|u| u.abs() <= bound + 1e-12));
    }
}
