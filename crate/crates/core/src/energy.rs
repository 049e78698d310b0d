//! Theoretical inference energy from operation counts.
//!
//! Dense layers cost one MAC per operation; spiking layers cost one AC per
//! synaptic operation, with `SOPs = T · γ · FLOPs` for presynaptic spike
//! rate `γ` over `T` timesteps. The first layer of a spiking network
//! receives real-valued input and is always charged as dense MACs.
//!
//! Op counts are in millions and constants in pJ, so `mops · pJ` is already
//! µJ (`10⁶ · pJ / 10⁶`); no conversion factor is applied.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{param, Error, Result};
use crate::scalar::Real;

/// Picojoules per operation (45 nm CMOS figures by default).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnergyConstants<T> {
    pub e_mac: T,
    pub e_ac: T,
}

impl<T: Real> Default for EnergyConstants<T> {
    fn default() -> Self {
        Self {
            e_mac: T::lit(4.6),
            e_ac: T::lit(0.9),
        }
    }
}

impl<T: Real> EnergyConstants<T> {
    pub fn new(e_mac: T, e_ac: T) -> Result<Self> {
        if !(e_mac > T::zero() && e_ac > T::zero()) {
            return Err(param(format!(
                "energy constants must be positive, got MAC {e_mac} pJ, AC {e_ac} pJ"
            )));
        }
        Ok(Self { e_mac, e_ac })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LayerKind {
    Dense,
    Spiking,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LayerOps<T> {
    pub name: String,
    pub kind: LayerKind,
    /// Dense forward-pass operations, in millions.
    pub base_ops: T,
    /// Presynaptic spike rate; spiking layers only.
    pub spike_rate: Option<T>,
    pub timesteps: usize,
}

impl<T: Real> LayerOps<T> {
    pub fn dense(name: &str, mops: T) -> Self {
        Self {
            name: name.to_owned(),
            kind: LayerKind::Dense,
            base_ops: mops,
            spike_rate: None,
            timesteps: 1,
        }
    }

    pub fn spiking(name: &str, mops: T, rate: T, timesteps: usize) -> Self {
        Self {
            name: name.to_owned(),
            kind: LayerKind::Spiking,
            base_ops: mops,
            spike_rate: Some(rate),
            timesteps,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.base_ops >= T::zero()) || !self.base_ops.is_finite() {
            return Err(param(format!(
                "layer '{}': op count must be finite and nonnegative",
                self.name
            )));
        }
        match (self.kind, self.spike_rate) {
            (LayerKind::Dense, None) => Ok(()),
            (LayerKind::Dense, Some(_)) => Err(Error::Kind(format!(
                "dense layer '{}' must not carry a spike rate",
                self.name
            ))),
            (LayerKind::Spiking, None) => Err(Error::Kind(format!(
                "spiking layer '{}' needs a spike rate",
                self.name
            ))),
            (LayerKind::Spiking, Some(r)) => {
                if !(r >= T::zero() && r <= T::one()) {
                    return Err(param(format!(
                        "layer '{}': spike rate {r} outside [0, 1]",
                        self.name
                    )));
                }
                if self.timesteps == 0 {
                    return Err(param(format!("layer '{}': T must be positive", self.name)));
                }
                Ok(())
            }
        }
    }
}

/// Synaptic operations of a spiking layer, in millions.
pub fn sops<T: Real>(layer: &LayerOps<T>) -> Result<T> {
    layer.validate()?;
    match layer.spike_rate {
        Some(rate) if layer.kind == LayerKind::Spiking => {
            Ok(T::from_usize_lossy(layer.timesteps) * rate * layer.base_ops)
        }
        _ => Err(Error::Kind(format!("layer '{}' is not spiking", layer.name))),
    }
}

/// Energy of an all-dense network in µJ.
pub fn ann_energy<T: Real>(layers: &[LayerOps<T>], constants: &EnergyConstants<T>) -> Result<T> {
    let mut total = T::zero();
    for l in layers {
        l.validate()?;
        if l.kind != LayerKind::Dense {
            return Err(Error::Kind(format!(
                "layer '{}' is spiking; ANN energy needs dense layers only",
                l.name
            )));
        }
        total = total + l.base_ops;
    }
    Ok(constants.e_mac * total)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SnnEnergy<T> {
    pub energy_uj: T,
    /// `FLOPs_1 + Σ SOPs`, millions.
    pub total_mops: T,
    pub first_layer_mops: T,
    pub sops: Vec<T>,
}

/// Dense first layer plus spiking layers, in µJ.
pub fn snn_energy<T: Real>(
    layers: &[LayerOps<T>],
    constants: &EnergyConstants<T>,
) -> Result<SnnEnergy<T>> {
    let (first, rest) = layers
        .split_first()
        .ok_or_else(|| param("network has no layers"))?;
    first.validate()?;
    if first.kind != LayerKind::Dense {
        return Err(Error::Kind(format!(
            "first layer '{}' must be dense (it sees real-valued input)",
            first.name
        )));
    }
    let mut per_layer = Vec::with_capacity(rest.len());
    for l in rest {
        l.validate()?;
        if l.kind != LayerKind::Spiking {
            return Err(Error::Kind(format!(
                "layer '{}' after the first must be spiking",
                l.name
            )));
        }
        per_layer.push(sops(l)?);
    }
    let total_sops: T = per_layer.iter().copied().sum();
    Ok(SnnEnergy {
        energy_uj: constants.e_mac * first.base_ops + constants.e_ac * total_sops,
        total_mops: first.base_ops + total_sops,
        first_layer_mops: first.base_ops,
        sops: per_layer,
    })
}

/// Architecture description read by the CLI.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArchitectureDoc {
    pub timesteps: usize,
    pub layers: Vec<LayerDoc>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerDoc {
    pub name: String,
    pub kind: LayerKind,
    pub mops: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rate: Option<f64>,
}

impl ArchitectureDoc {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn layers<T: Real>(&self) -> Vec<LayerOps<T>> {
        self.layers
            .iter()
            .map(|l| LayerOps {
                name: l.name.clone(),
                kind: l.kind,
                base_ops: T::lit(l.mops),
                spike_rate: l.rate.map(T::lit),
                timesteps: self.timesteps,
            })
            .collect()
    }

    pub fn is_spiking(&self) -> bool {
        self.layers.iter().any(|l| l.kind == LayerKind::Spiking)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LayerReport {
    pub name: String,
    pub kind: LayerKind,
    pub mops: f64,
    pub energy_uj: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub network: &'static str,
    pub e_mac_pj: f64,
    pub e_ac_pj: f64,
    pub total_mops: f64,
    pub energy_uj: f64,
    pub layers: Vec<LayerReport>,
}

impl EnergyReport {
    /// ANN when every layer is dense, otherwise dense-first SNN accounting.
    pub fn evaluate(arch: &ArchitectureDoc, constants: &EnergyConstants<f64>) -> Result<Self> {
        let layers = arch.layers::<f64>();
        let mut rows = Vec::with_capacity(layers.len());
        let (network, total_mops, energy_uj) = if arch.is_spiking() {
            let snn = snn_energy(&layers, constants)?;
            rows.push(LayerReport {
                name: layers[0].name.clone(),
                kind: LayerKind::Dense,
                mops: snn.first_layer_mops,
                energy_uj: constants.e_mac * snn.first_layer_mops,
            });
            for (l, &s) in layers[1..].iter().zip(&snn.sops) {
                rows.push(LayerReport {
                    name: l.name.clone(),
                    kind: LayerKind::Spiking,
                    mops: s,
                    energy_uj: constants.e_ac * s,
                });
            }
            ("snn", snn.total_mops, snn.energy_uj)
        } else {
            let energy = ann_energy(&layers, constants)?;
            for l in &layers {
                rows.push(LayerReport {
                    name: l.name.clone(),
                    kind: LayerKind::Dense,
                    mops: l.base_ops,
                    energy_uj: constants.e_mac * l.base_ops,
                });
            }
            ("ann", layers.iter().map(|l| l.base_ops).sum(), energy)
        };
        Ok(Self {
            network,
            e_mac_pj: constants.e_mac,
            e_ac_pj: constants.e_ac,
            total_mops,
            energy_uj,
            layers: rows,
        })
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Aligned text table with two-decimal figures.
    pub fn to_table(&self) -> String {
        let width = self
            .layers
            .iter()
            .map(|l| l.name.len())
            .chain(std::iter::once(5))
            .max()
            .unwrap_or(5);
        let mut out = String::new();
        let _ = writeln!(out, "{:<width$}  {:<7}  {:>10}  {:>12}", "layer", "kind", "#OPs (M)", "Energy (uJ)");
        for l in &self.layers {
            let kind = match l.kind {
                LayerKind::Dense => "dense",
                LayerKind::Spiking => "spiking",
            };
            let _ = writeln!(out, "{:<width$}  {:<7}  {:>10.2}  {:>12.2}", l.name, kind, l.mops, l.energy_uj);
        }
        let _ = writeln!(
            out,
            "{:<width$}  {:<7}  {:>10.2}  {:>12.2}",
            "total", self.network, self.total_mops, self.energy_uj
        );
        out
    }
}
