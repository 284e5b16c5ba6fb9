//! In-place 3D FFTs over an `n × n × n` array stored with the last axis
//! contiguous.

use num_complex::Complex64;
use rustfft::{FftDirection, FftPlanner};

pub(crate) fn fft3(data: &mut [Complex64], n: usize, direction: FftDirection) {
    debug_assert_eq!(data.len(), n * n * n);
    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft(n, direction);
    let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];

    // axis 2: contiguous lines
    fft.process_with_scratch(data, &mut scratch);

    let mut line = vec![Complex64::new(0.0, 0.0); n];
    // axis 1
    for i0 in 0..n {
        for i2 in 0..n {
            for (i1, slot) in line.iter_mut().enumerate() {
                *slot = data[(i0 * n + i1) * n + i2];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (i1, v) in line.iter().enumerate() {
                data[(i0 * n + i1) * n + i2] = *v;
            }
        }
    }
    // axis 0
    for i1 in 0..n {
        for i2 in 0..n {
            for (i0, slot) in line.iter_mut().enumerate() {
                *slot = data[(i0 * n + i1) * n + i2];
            }
            fft.process_with_scratch(&mut line, &mut scratch);
            for (i0, v) in line.iter().enumerate() {
                data[(i0 * n + i1) * n + i2] = *v;
            }
        }
    }
}
