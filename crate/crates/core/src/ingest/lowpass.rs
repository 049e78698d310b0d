//! Hard radial low-pass mask applied per 2D map in the DFT domain.

use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::error::{param, shape, Result};
use crate::scalar::Real;
use crate::spectrum::SampleTensor;

/// `fftfreq(n)`: `k/n` for the first half, `(k − n)/n` after.
fn fftfreq(n: usize) -> Vec<f64> {
    (0..n)
        .map(|k| {
            let k = if k < n.div_ceil(2) { k as f64 } else { k as f64 - n as f64 };
            k / n as f64
        })
        .collect()
}

/// Keeps bins with normalized radius `√(ξ² + η²) ≤ ν`; 0.5 is Nyquist on
/// each axis, so every bin survives once `ν ≥ √2/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct RadialMask {
    height: usize,
    width: usize,
    nu: f64,
    /// Row-major over unshifted DFT indices.
    keep: Vec<bool>,
}

impl RadialMask {
    pub fn new(height: usize, width: usize, nu: f64) -> Result<Self> {
        if height < 2 || width < 2 {
            return Err(shape(format!("maps must be at least 2×2, got {height}×{width}")));
        }
        if !(nu >= 0.0) || nu.is_nan() {
            return Err(param(format!("cutoff radius must be nonnegative, got {nu}")));
        }
        let eta = fftfreq(height);
        let xi = fftfreq(width);
        let keep = eta
            .iter()
            .flat_map(|&e| xi.iter().map(move |&x| (x * x + e * e).sqrt() <= nu))
            .collect();
        Ok(Self {
            height,
            width,
            nu,
            keep,
        })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    pub fn kept(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }

    pub fn is_all_pass(&self) -> bool {
        self.keep.iter().all(|&k| k)
    }
}

/// 2D DFT over a row-major `height × width` buffer, via row then column passes.
struct Fft2<T: Real> {
    height: usize,
    width: usize,
    rows: Arc<dyn Fft<T>>,
    cols: Arc<dyn Fft<T>>,
    rows_inv: Arc<dyn Fft<T>>,
    cols_inv: Arc<dyn Fft<T>>,
}

impl<T: Real> Fft2<T> {
    fn new(height: usize, width: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            height,
            width,
            rows: planner.plan_fft_forward(width),
            cols: planner.plan_fft_forward(height),
            rows_inv: planner.plan_fft_inverse(width),
            cols_inv: planner.plan_fft_inverse(height),
        }
    }

    fn transform(&self, buf: &mut [Complex<T>], inverse: bool) {
        let (rows, cols) = if inverse {
            (&self.rows_inv, &self.cols_inv)
        } else {
            (&self.rows, &self.cols)
        };
        rows.process(buf);
        let mut column = vec![Complex::new(T::zero(), T::zero()); self.height];
        for c in 0..self.width {
            for r in 0..self.height {
                column[r] = buf[r * self.width + c];
            }
            cols.process(&mut column);
            for r in 0..self.height {
                buf[r * self.width + c] = column[r];
            }
        }
    }
}

/// Filters a batch of same-sized maps with one mask and one set of plans.
pub struct RadialLowpass<T: Real> {
    mask: RadialMask,
    fft: Fft2<T>,
}

impl<T: Real> RadialLowpass<T> {
    pub fn new(height: usize, width: usize, nu: f64) -> Result<Self> {
        Ok(Self {
            mask: RadialMask::new(height, width, nu)?,
            fft: Fft2::new(height, width),
        })
    }

    pub fn mask(&self) -> &RadialMask {
        &self.mask
    }

    /// `Re{ iDFT2( DFT2(map) ⊙ M ) }`.
    pub fn apply(&self, map: &[T]) -> Result<Vec<T>> {
        let n = self.mask.height * self.mask.width;
        if map.len() != n {
            return Err(shape(format!("map has {} values, mask expects {n}", map.len())));
        }
        let mut buf: Vec<Complex<T>> = map.iter().map(|&v| Complex::new(v, T::zero())).collect();
        self.fft.transform(&mut buf, false);
        for (z, &keep) in buf.iter_mut().zip(&self.mask.keep) {
            if !keep {
                *z = Complex::new(T::zero(), T::zero());
            }
        }
        self.fft.transform(&mut buf, true);
        let scale = T::from_usize_lossy(n);
        Ok(buf.into_iter().map(|z| z.re / scale).collect())
    }

    /// Filters every `(l, c)` slice of an `(L, C, H, W)` tensor independently.
    pub fn apply_tensor(&self, tensor: &SampleTensor<T>) -> Result<SampleTensor<T>> {
        let [frames, channels, h, w] = tensor.dims();
        if (h, w) != (self.mask.height, self.mask.width) {
            return Err(shape(format!(
                "tensor maps are {h}×{w}, mask is {}×{}",
                self.mask.height, self.mask.width
            )));
        }
        let mut out = Vec::with_capacity(tensor.data().len());
        for slice in tensor.data().chunks_exact(h * w) {
            out.extend(self.apply(slice)?);
        }
        debug_assert_eq!(out.len(), frames * channels * h * w);
        SampleTensor::new(tensor.dims(), out)
    }
}

pub fn radial_lowpass<T: Real>(map: &[T], height: usize, width: usize, nu: f64) -> Result<Vec<T>> {
    RadialLowpass::new(height, width, nu)?.apply(map)
}
