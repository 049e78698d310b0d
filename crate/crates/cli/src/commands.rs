use std::fs;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use dfma::di::{self, DiSpectrum};
use dfma::energy::{ArchitectureDoc, EnergyConstants, EnergyReport};
use dfma::ingest::manifest::{resolve, DatasetManifest, ManifestSample, Split};
use dfma::ingest::pointcloud::{
    compute_norm_stats, parse_recording_csv, recording_to_tensor, Layout, Point,
    PreprocessConfig, ShapeMode,
};
use dfma::ingest::tensor_file::{from_sample, read_tensor};
use dfma::ingest::RadialLowpass;
use dfma::lif_sim::{self, LifConfig, RateReport, ValidityBounds};
use dfma::lif_spectral::{self, Cutoff};
use dfma::matching::{self, FmsCurve};
use dfma::spectrum::{build_grid, Reduce, SampleTensor, SpectrumConfig};
use dfma::synth::ToneDataset;
use dfma::{Error, Result};

use crate::output::{write_atomic, Sink};
use crate::{DiArgs, PreprocessArgs, SynthArgs, ValidityArgs};

fn read_text(path: &Path) -> Result<String> {
    fs::read_to_string(path)
        .map_err(|e| Error::Format(format!("cannot read {}: {e}", path.display())))
}

fn require_out<'a>(sink: &'a Sink, what: &str) -> Result<&'a Path> {
    sink.out
        .as_deref()
        .ok_or_else(|| Error::Parameter(format!("{what} needs --out")))
}

fn manifest_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

fn load_samples(base: &Path, entries: &[(&ManifestSample, usize)]) -> Result<Vec<SampleTensor<f64>>> {
    entries
        .par_iter()
        .map(|(s, label)| Ok(read_tensor::<f64>(&resolve(base, s))?.with_label(*label)))
        .collect()
}

pub fn di(sink: &Sink, a: DiArgs) -> Result<()> {
    let split: Split = a.split.parse()?;
    if a.epsilon.is_nan() || a.epsilon <= 0.0 {
        return Err(Error::Parameter(format!("epsilon must be positive, got {}", a.epsilon)));
    }
    let manifest = DatasetManifest::read(&a.manifest)?;
    let entries = manifest.di_samples(split)?;
    let samples = load_samples(&manifest_dir(&a.manifest), &entries)?;
    let labels: Vec<usize> = entries.iter().map(|e| e.1).collect();
    let config = SpectrumConfig {
        reduce: a.reduce,
        preprocess: a.preproc,
        window: a.window,
    };
    let spectrum = di::di_from_samples(&samples, &labels, config, a.epsilon)?;
    sink.emit(&spectrum.to_json()?)?;

    let ranked = spectrum.ranked_bins();
    sink.note(&format!(
        "DI over {} samples, L = {}; top bins {:?}",
        samples.len(),
        spectrum.grid().len(),
        &ranked[..ranked.len().min(3)]
    ));
    if a.robustness {
        let variants = [Reduce::Mean, Reduce::Rms, Reduce::L1]
            .into_iter()
            .map(|reduce| {
                let c = SpectrumConfig { reduce, ..config };
                di::di_from_samples(&samples, &labels, c, a.epsilon).map(|d| (reduce, d))
            })
            .collect::<Result<Vec<(Reduce, DiSpectrum<f64>)>>>()?;
        for i in 0..variants.len() {
            for j in i + 1..variants.len() {
                let (p, q) = (variants[i].1.di_norm(), variants[j].1.di_norm());
                let rho = di::spearman(p, q)?;
                let js = di::js_divergence(p, q)?;
                sink.note(&format!(
                    "{} vs {}: spearman {rho:.4}, JS {js:.4} bits",
                    variants[i].0, variants[j].0
                ));
            }
        }
    }
    Ok(())
}

pub fn template(sink: &Sink, beta: f64, len: usize) -> Result<()> {
    let grid = build_grid::<f64>(len)?;
    let t = lif_spectral::sample_template(&grid, beta)?;
    sink.emit(&t.to_csv())
}

pub fn fms(sink: &Sink, di_path: &Path, betas: &str) -> Result<()> {
    let betas = matching::parse_beta_range(betas)?;
    let spectrum = DiSpectrum::<f64>::from_json(&read_text(di_path)?)?;
    let curve = matching::fms_sweep(&spectrum, &betas)?;
    sink.emit(&curve.to_csv())?;
    sink.note(&format!(
        "FMS over {} candidates: {:.4} at β = {} to {:.4} at β = {}",
        curve.len(),
        curve.fms()[0],
        curve.betas()[0],
        curve.fms()[curve.len() - 1],
        curve.betas()[curve.len() - 1]
    ));
    Ok(())
}

pub fn select_beta(sink: &Sink, fms_path: &Path, under_threshold: f64) -> Result<()> {
    if !(0.0..1.0).contains(&under_threshold) {
        return Err(Error::Parameter(format!(
            "under-threshold must lie in [0, 1), got {under_threshold}"
        )));
    }
    let curve = FmsCurve::<f64>::from_csv(&read_text(fms_path)?)?;
    let knee = matching::select_boundary(&curve);
    sink.emit(&knee.to_json()?)?;

    let mut table = format!(
        "β† = {}  τ† = {:.4}{}\n{:>8}  {:>10}  {:>8}  regime\n",
        knee.beta_dagger,
        knee.tau_dagger(),
        if knee.degenerate { "  (degenerate curve)" } else { "" },
        "beta",
        "tau",
        "fms"
    );
    for (&b, &f) in curve.betas().iter().zip(curve.fms()) {
        let regime = matching::classify_regime(b, knee.beta_dagger, under_threshold);
        table.push_str(&format!("{b:>8.4}  {:>10.4}  {f:>8.4}  {regime}\n", 1.0 / (1.0 - b)));
    }
    sink.note(table.trim_end());
    Ok(())
}

pub fn bandwidth(sink: &Sink, beta: f64, len: Option<usize>) -> Result<()> {
    let grid = len.map(build_grid::<f64>).transpose()?;
    let mut bw = lif_spectral::cutoff(beta)?;
    if let Some(g) = &grid {
        bw = bw.with_bin(g);
    }
    sink.emit(&bw.to_json()?)?;
    let line = match bw.cutoff {
        Cutoff::Frequency(w) => format!("ω_c = {w:.6}"),
        Cutoff::Saturated => "saturated, B_eff = π".to_string(),
    };
    let bin = bw.quantized_bin.map(|k| format!(", bin {k}")).unwrap_or_default();
    sink.note(&format!("{line}{bin}"));
    Ok(())
}

/// One value per row; a non-numeric first row is a header, and with several
/// columns the last one is the input.
fn parse_inputs(text: &str) -> Result<Vec<f64>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        let field = line.rsplit(',').next().unwrap_or(line).trim();
        match field.parse::<f64>() {
            Ok(v) if v.is_finite() => out.push(v),
            Ok(_) => return Err(Error::Format(format!("non-finite input on row {}", i + 1))),
            Err(_) if i == 0 => {}
            Err(_) => return Err(Error::Format(format!("bad input value '{field}' on row {}", i + 1))),
        }
    }
    Ok(out)
}

pub fn simulate(sink: &Sink, config: &Path, input: &Path, steps: usize, u0: f64) -> Result<()> {
    if steps == 0 {
        return Err(Error::Parameter("T must be positive".into()));
    }
    if !u0.is_finite() {
        return Err(Error::Parameter("u0 must be finite".into()));
    }
    let config = LifConfig::<f64>::from_json(&read_text(config)?)?;
    let inputs = parse_inputs(&read_text(input)?)?;
    let trace = lif_sim::run(&config, &inputs, steps, u0)?;
    sink.emit(&trace.to_csv())?;
    sink.note(&format!(
        "{} steps, β = {}, {} spikes",
        trace.len(),
        config.beta(),
        trace.spike_count()
    ));
    Ok(())
}

pub fn validity(sink: &Sink, a: ValidityArgs) -> Result<()> {
    let bounds = ValidityBounds {
        gamma_min: a.gamma_min,
        gamma_max: a.gamma_max,
        kappa: a.kappa,
        eps: a.eps,
    };
    bounds.validate()?;
    let rates = RateReport::from_json(&read_text(&a.rates)?)?;
    let report = lif_sim::validity_flag(&rates, bounds)?;
    sink.emit(&serde_json::to_string_pretty(&report)?)?;
    for l in &report.layers {
        sink.note(&format!(
            "{}: {} (ratio {:.3}, {} saturated, {} collapsed)",
            l.layer,
            if l.flagged() { "FLAGGED" } else { "ok" },
            l.ratio,
            l.saturated.len(),
            l.collapsed.len()
        ));
    }
    Ok(())
}

pub fn energy(sink: &Sink, arch: &Path, e_mac: f64, e_ac: f64) -> Result<()> {
    let constants = EnergyConstants::new(e_mac, e_ac)?;
    let arch = ArchitectureDoc::from_json(&read_text(arch)?)?;
    let report = EnergyReport::evaluate(&arch, &constants)?;
    sink.emit(&report.to_json()?)?;
    sink.note(report.to_table().trim_end());
    Ok(())
}

fn parse_layout(layout: &str, shape: &str) -> Result<Layout> {
    let mode: ShapeMode = shape.parse()?;
    match layout.to_ascii_lowercase().as_str() {
        "map" => Ok(Layout::Map(mode)),
        "points" => Ok(Layout::Points),
        other => Err(Error::Parameter(format!("unknown layout '{other}'"))),
    }
}

pub fn preprocess(sink: &Sink, a: PreprocessArgs) -> Result<()> {
    let out_dir = require_out(sink, "preprocess")?;
    let config = PreprocessConfig {
        f_max: a.fmax,
        p_max: a.pmax,
    };
    config.validate()?;
    let layout = parse_layout(&a.layout, &a.shape)?;
    if matches!(layout, Layout::Map(_)) && a.pmax * 4 != dfma::ingest::pointcloud::FEATURES {
        return Err(Error::Parameter(format!(
            "the map layout needs pmax = 64, got {}",
            a.pmax
        )));
    }

    let manifest_path = a.raw.join("manifest.json");
    let manifest = DatasetManifest::read(&manifest_path)?;
    let recordings: Vec<Vec<Vec<Point<f64>>>> = manifest
        .samples
        .par_iter()
        .map(|s| parse_recording_csv(&read_text(&resolve(&a.raw, s))?))
        .collect::<Result<_>>()?;

    let stats = if a.normalize {
        let train: Vec<_> = manifest
            .samples
            .iter()
            .zip(&recordings)
            .filter(|(s, _)| s.split == Split::Train)
            .map(|(_, r)| r.clone())
            .collect();
        Some(compute_norm_stats(&train)?)
    } else {
        None
    };

    let files = recordings
        .par_iter()
        .map(|r| from_sample(&recording_to_tensor(r, config, stats.as_ref(), layout)?))
        .collect::<Result<Vec<_>>>()?;

    fs::create_dir_all(out_dir)?;
    let mut samples = Vec::with_capacity(files.len());
    for (i, (entry, file)) in manifest.samples.iter().zip(&files).enumerate() {
        let stem = entry
            .path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| format!("sample_{i:04}"));
        let name = PathBuf::from(format!("{stem}.dfma"));
        write_atomic(&out_dir.join(&name), &file.encode())?;
        samples.push(ManifestSample {
            path: name,
            ..entry.clone()
        });
    }
    let out_manifest = DatasetManifest {
        classes: manifest.classes.clone(),
        samples,
        norm_stats: stats,
        normalize: a.normalize,
    };
    write_atomic(&out_dir.join("manifest.json"), out_manifest.to_json()?.as_bytes())?;
    sink.note(&format!(
        "{} recordings → {} ({} frames × {} points)",
        files.len(),
        out_dir.display(),
        config.f_max,
        config.p_max
    ));
    Ok(())
}

pub fn lowpass(sink: &Sink, input: &Path, nu: f64) -> Result<()> {
    let out = require_out(sink, "lowpass")?;
    if nu.is_nan() || nu < 0.0 {
        return Err(Error::Parameter(format!("nu must be nonnegative, got {nu}")));
    }
    let tensor = read_tensor::<f64>(input)?;
    let [_, _, h, w] = tensor.dims();
    let filter = RadialLowpass::<f64>::new(h, w, nu)?;
    let filtered = filter.apply_tensor(&tensor)?;
    write_atomic(out, &from_sample(&filtered)?.encode())?;
    sink.note(&format!(
        "ν = {nu}: kept {} of {} bins per {h}×{w} map",
        filter.mask().kept(),
        h * w
    ));
    Ok(())
}

pub fn synth(sink: &Sink, seed: u64, a: SynthArgs) -> Result<()> {
    let out_dir = require_out(sink, "synth")?;
    let spec = ToneDataset {
        frames: a.len,
        class_bins: a.bins,
        samples_per_class: a.per_class,
        noise_std: a.noise,
        ..ToneDataset::default()
    };
    let manifest = spec.write(out_dir, seed, a.test_every)?;
    sink.note(&format!(
        "{} samples in {} classes → {}",
        manifest.samples.len(),
        manifest.classes.len(),
        out_dir.display()
    ));
    Ok(())
}
