//! Separable 3D FFT on x-fastest data, built from 1D plans.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Forward/inverse 3D FFT plans for a fixed shape. Reentrant: scratch is
/// allocated per call.
pub struct Fft3 {
    dims: [usize; 3],
    fwd: [Arc<dyn Fft<f64>>; 3],
    inv: [Arc<dyn Fft<f64>>; 3],
}

impl Fft3 {
    pub fn new(dims: [usize; 3]) -> Self {
        let mut planner = FftPlanner::new();
        let fwd = dims.map(|n| planner.plan_fft_forward(n));
        let inv = dims.map(|n| planner.plan_fft_inverse(n));
        Fft3 { dims, fwd, inv }
    }

    pub fn len(&self) -> usize {
        self.dims.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// In-place forward transform (unnormalized).
    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &self.fwd);
    }

    /// In-place inverse transform, normalized by 1/n.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &self.inv);
        let scale = 1.0 / self.len() as f64;
        for v in data.iter_mut() {
            *v *= scale;
        }
    }

    fn transform(&self, data: &mut [Complex64], plans: &[Arc<dyn Fft<f64>>; 3]) {
        assert_eq!(data.len(), self.len(), "Fft3 shape mismatch");
        let [n1, n2, n3] = self.dims;

        // axis 0: contiguous lines
        if n1 > 1 {
            let plan = &plans[0];
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            for line in data.chunks_exact_mut(n1) {
                plan.process_with_scratch(line, &mut scratch);
            }
        }
        // axis 1: stride n1 within each x-z slab
        if n2 > 1 {
            let plan = &plans[1];
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            let mut line = vec![Complex64::default(); n2];
            for i3 in 0..n3 {
                for i1 in 0..n1 {
                    let base = i1 + n1 * n2 * i3;
                    for (k, v) in line.iter_mut().enumerate() {
                        *v = data[base + n1 * k];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (k, v) in line.iter().enumerate() {
                        data[base + n1 * k] = *v;
                    }
                }
            }
        }
        // axis 2: stride n1*n2
        if n3 > 1 {
            let plan = &plans[2];
            let mut scratch = vec![Complex64::default(); plan.get_inplace_scratch_len()];
            let mut line = vec![Complex64::default(); n3];
            let slab = n1 * n2;
            for i2 in 0..n2 {
                for i1 in 0..n1 {
                    let base = i1 + n1 * i2;
                    for (k, v) in line.iter_mut().enumerate() {
                        *v = data[base + slab * k];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (k, v) in line.iter().enumerate() {
                        data[base + slab * k] = *v;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forward_inverse_roundtrip() {
        let fft = Fft3::new([4, 6, 2]);
        let mut data: Vec<Complex64> =
            (0..48).map(|i| Complex64::new((i % 7) as f64, (i % 3) as f64 - 1.0)).collect();
        let orig = data.clone();
        fft.forward(&mut data);
        fft.inverse(&mut data);
        for (a, b) in data.iter().zip(&orig) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_of_single_mode_is_a_delta() {
        let dims = [8usize, 4, 2];
        let fft = Fft3::new(dims);
        let (k1, k2, k3) = (3usize, 1usize, 1usize);
        let n = 8 * 4 * 2;
        let mut data = vec![Complex64::default(); n];
        for i3 in 0..dims[2] {
            for i2 in 0..dims[1] {
                for i1 in 0..dims[0] {
                    let phase = 2.0
                        * std::f64::consts::PI
                        * (k1 as f64 * i1 as f64 / dims[0] as f64
                            + k2 as f64 * i2 as f64 / dims[1] as f64
                            + k3 as f64 * i3 as f64 / dims[2] as f64);
                    data[i1 + dims[0] * (i2 + dims[1] * i3)] = Complex64::cis(phase);
                }
            }
        }
        fft.forward(&mut data);
        // forward FFT uses exp(-2 pi i k x / N), so the mode lands on (k1,k2,k3)
        let hot = k1 + dims[0] * (k2 + dims[1] * k3);
        for (i, v) in data.iter().enumerate() {
            if i == hot {
                assert!((v - Complex64::new(n as f64, 0.0)).norm() < 1e-9);
            } else {
                assert!(v.norm() < 1e-9, "leak at {i}: {v}");
            }
        }
    }
}
