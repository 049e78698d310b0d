use dfma::di::{di_from_samples, DiSpectrum};
use dfma::ingest::tensor_file::{read_tensor, write_tensor};
use dfma::lif_spectral::{cutoff, quantize_cutoff, Cutoff};
use dfma::matching::{classify_regime, default_candidates, fms_sweep, select_boundary, FmsCurve, Regime};
use dfma::spectrum::{build_grid, SpectrumConfig};
use dfma::synth::ToneDataset;
use dfma::Real;

fn analyse<T: Real>(seed: u64) -> (Vec<usize>, FmsCurve<T>) {
    let spec = ToneDataset {
        class_bins: vec![2, 5],
        ..ToneDataset::default()
    };
    let samples = spec.generate::<T>(seed).unwrap();
    let labels: Vec<usize> = samples.iter().map(|s| s.label().unwrap()).collect();
    let di = di_from_samples(&samples, &labels, SpectrumConfig::default(), T::lit(1e-12)).unwrap();
    let curve = fms_sweep(&di, &default_candidates()).unwrap();
    (di.ranked_bins(), curve)
}

#[test]
fn planted_bins_found_in_both_precisions() {
    let (ranked64, curve64) = analyse::<f64>(21);
    let (ranked32, curve32) = analyse::<f32>(21);
    let mut top = ranked64[..2].to_vec();
    top.sort_unstable();
    assert_eq!(top, [2, 5]);
    assert_eq!(ranked32[..2], ranked64[..2]);
    for (a, b) in curve32.fms().iter().zip(curve64.fms()) {
        assert!((*a as f64 - b).abs() < 1e-4);
    }
    let knee = select_boundary(&curve64);
    assert!(!knee.degenerate);
    assert_eq!(classify_regime(0.01, knee.beta_dagger, 0.05), Regime::UnderFilter);
    assert_eq!(classify_regime(knee.beta_dagger, knee.beta_dagger, 0.05), Regime::OverLowPass);
}

#[test]
fn di_survives_disk_and_json() {
    let dir = tempfile::tempdir().unwrap();
    let samples = ToneDataset::default().generate::<f32>(5).unwrap();
    let labels: Vec<usize> = samples.iter().map(|s| s.label().unwrap()).collect();
    let reread: Vec<_> = samples
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let p = dir.path().join(format!("{i}.dfma"));
            write_tensor(s, &p).unwrap();
            read_tensor::<f32>(&p).unwrap()
        })
        .collect();
    let a = di_from_samples(&samples, &labels, SpectrumConfig::default(), 1e-12).unwrap();
    let b = di_from_samples(&reread, &labels, SpectrumConfig::default(), 1e-12).unwrap();
    assert_eq!(a, b);
    let json = a.to_json().unwrap();
    assert_eq!(DiSpectrum::<f32>::from_json(&json).unwrap(), a);
}

#[test]
fn staircase_across_grid() {
    let grid = build_grid::<f64>(16).unwrap();
    let mut last = grid.max_bin();
    for i in 0..=100 {
        let beta = 0.17 + 0.82 * i as f64 / 100.0;
        let bw = cutoff(beta).unwrap();
        let k = quantize_cutoff(&bw, &grid);
        assert!(k <= last);
        last = k;
        if let Cutoff::Frequency(w) = bw.cutoff {
            assert!((grid.omega(k) - w).abs() <= std::f64::consts::PI / 16.0);
        }
    }
}
