//! Lane-wise Fourier machinery for the periodic tangential directions:
//! applying diagonal spectral multipliers to real data, and full forward /
//! inverse tangential transforms used by the elliptic solvers.

use ndarray::{Array3, Axis};
use num_complex::Complex;
use rustfft::Fft;
use std::sync::Arc;

/// Signed integer mode for FFT bin `bin` of an `n`-point transform:
/// bins 0..=n/2 carry modes 0..=n/2, the rest carry negative modes.
pub(crate) fn mode_of_bin(bin: usize, n: usize) -> i64 {
    if bin <= n / 2 {
        bin as i64
    } else {
        bin as i64 - n as i64
    }
}

/// Apply a diagonal Fourier multiplier along one array axis of real data.
///
/// Each 1-D lane is transformed, multiplied bin-by-bin by `mult`, and
/// transformed back (the inverse transform is normalized here). The
/// multiplier must satisfy mult[-k] = conj(mult[k]) so real input stays
/// real; only the real part of the result is kept.
pub(crate) fn apply_multiplier_lanes(
    fwd: &Arc<dyn Fft<f64>>,
    inv: &Arc<dyn Fft<f64>>,
    data: &mut Array3<f64>,
    array_axis: usize,
    mult: &[Complex<f64>],
) {
    let n = mult.len();
    debug_assert_eq!(data.len_of(Axis(array_axis)), n);
    let inv_n = 1.0 / n as f64;
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let scratch_len = fwd
        .get_inplace_scratch_len()
        .max(inv.get_inplace_scratch_len());
    let mut scratch = vec![Complex::new(0.0, 0.0); scratch_len];
    for mut lane in data.lanes_mut(Axis(array_axis)) {
        for (b, &v) in buf.iter_mut().zip(lane.iter()) {
            *b = Complex::new(v, 0.0);
        }
        fwd.process_with_scratch(&mut buf, &mut scratch);
        for (b, m) in buf.iter_mut().zip(mult.iter()) {
            *b *= m;
        }
        inv.process_with_scratch(&mut buf, &mut scratch);
        for (v, b) in lane.iter_mut().zip(buf.iter()) {
            *v = b.re * inv_n;
        }
    }
}

/// In-place unnormalized transform of complex data along one array axis.
pub(crate) fn transform_lanes(
    plan: &Arc<dyn Fft<f64>>,
    data: &mut Array3<Complex<f64>>,
    array_axis: usize,
) {
    let n = data.len_of(Axis(array_axis));
    let mut buf = vec![Complex::new(0.0, 0.0); n];
    let mut scratch = vec![Complex::new(0.0, 0.0); plan.get_inplace_scratch_len()];
    for mut lane in data.lanes_mut(Axis(array_axis)) {
        for (b, v) in buf.iter_mut().zip(lane.iter()) {
            *b = *v;
        }
        plan.process_with_scratch(&mut buf, &mut scratch);
        for (v, b) in lane.iter_mut().zip(buf.iter()) {
            *v = *b;
        }
    }
}
