//! Discrete Fourier transforms on cyclic groups with the `e(z) = e^{2πiz}`
//! character convention:
//!
//! * forward:  `f̂(ξ) = Σ_x f(x) e(xξ/N)`
//! * inverse:  `f(x) = N^{-1} Σ_ξ f̂(ξ) e(−xξ/N)`
//!
//! Frequencies are stored at index `ξ mod N`; balanced representatives run
//! through `{−⌊N/2⌋, …, ⌈N/2⌉−1}`.

use num_complex::Complex64;
use rustfft::FftPlanner;

/// Forward transform under the positive-character convention (unnormalized).
pub fn forward(values: &[Complex64]) -> Vec<Complex64> {
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::new();
    // rustfft's inverse kernel e^{+2πi xξ/N} matches our forward convention
    let fft = planner.plan_fft_inverse(buf.len());
    fft.process(&mut buf);
    buf
}

/// Inverse transform, normalized by `1/N`.
pub fn inverse(values: &[Complex64]) -> Vec<Complex64> {
    let n = values.len();
    let mut buf = values.to_vec();
    let mut planner = FftPlanner::new();
    let fft = planner.plan_fft_forward(n);
    fft.process(&mut buf);
    let scale = 1.0 / n as f64;
    for v in &mut buf {
        *v *= scale;
    }
    buf
}

/// Balanced frequency representative of storage index `j` in `ℤ_N`:
/// `0, 1, …, ⌈N/2⌉−1, −⌊N/2⌋, …, −1`.
pub fn balanced_frequency(j: usize, n: usize) -> i64 {
    if j < n.div_ceil(2) {
        j as i64
    } else {
        j as i64 - n as i64
    }
}

/// Applies a frequency multiplier `m(ξ)` given on storage indices.
pub fn apply_multiplier(values: &[Complex64], multiplier: &[Complex64]) -> Vec<Complex64> {
    let mut hat = forward(values);
    for (h, m) in hat.iter_mut().zip(multiplier) {
        *h *= m;
    }
    inverse(&hat)
}

/// Transform along one axis of a row-major d-dimensional array.
pub fn forward_axis(values: &mut [Complex64], shape: &[usize], axis: usize) {
    transform_axis(values, shape, axis, true);
}

pub fn inverse_axis(values: &mut [Complex64], shape: &[usize], axis: usize) {
    transform_axis(values, shape, axis, false);
}

fn transform_axis(values: &mut [Complex64], shape: &[usize], axis: usize, fwd: bool) {
    let n = shape[axis];
    let inner: usize = shape[axis + 1..].iter().product();
    let outer: usize = shape[..axis].iter().product();
    let mut planner = FftPlanner::new();
    let fft = if fwd {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    let mut line = vec![Complex64::default(); n];
    let scale = 1.0 / n as f64;
    for o in 0..outer {
        for i in 0..inner {
            let base = o * n * inner + i;
            for (k, l) in line.iter_mut().enumerate() {
                *l = values[base + k * inner];
            }
            fft.process(&mut line);
            for (k, l) in line.iter().enumerate() {
                values[base + k * inner] = if fwd { *l } else { *l * scale };
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn e(z: f64) -> Complex64 {
        Complex64::new(0.0, 2.0 * std::f64::consts::PI * z).exp()
    }

    #[test]
    fn delta_transforms_to_ones() {
        let mut f = vec![Complex64::default(); 8];
        f[0] = Complex64::new(1.0, 0.0);
        let hat = forward(&f);
        for h in hat {
            assert_relative_eq!(h.re, 1.0, epsilon = 1e-12);
            assert_relative_eq!(h.im, 0.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn convention_matches_direct_sum() {
        let n = 5;
        let f: Vec<Complex64> = (0..n)
            .map(|x| Complex64::new(x as f64 - 1.5, 0.3 * x as f64))
            .collect();
        let hat = forward(&f);
        for xi in 0..n {
            let direct: Complex64 = (0..n)
                .map(|x| f[x] * e(x as f64 * xi as f64 / n as f64))
                .sum();
            assert_relative_eq!(hat[xi].re, direct.re, epsilon = 1e-10);
            assert_relative_eq!(hat[xi].im, direct.im, epsilon = 1e-10);
        }
        let back = inverse(&hat);
        for x in 0..n {
            assert_relative_eq!(back[x].re, f[x].re, epsilon = 1e-12);
            assert_relative_eq!(back[x].im, f[x].im, epsilon = 1e-12);
        }
    }

    #[test]
    fn balanced_frequencies() {
        assert_eq!(
            (0..8).map(|j| balanced_frequency(j, 8)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, -4, -3, -2, -1]
        );
        assert_eq!(
            (0..7).map(|j| balanced_frequency(j, 7)).collect::<Vec<_>>(),
            vec![0, 1, 2, 3, -3, -2, -1]
        );
    }

    #[test]
    fn axis_transform_matches_full_1d() {
        let f: Vec<Complex64> = (0..6).map(|x| Complex64::new(x as f64, -(x as f64))).collect();
        let mut g = f.clone();
        forward_axis(&mut g, &[6], 0);
        let hat = forward(&f);
        for (a, b) in g.iter().zip(&hat) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-12);
        }
        inverse_axis(&mut g, &[6], 0);
        for (a, b) in g.iter().zip(&f) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-12);
        }
    }

    #[test]
    fn separable_2d_round_trip() {
        let shape = [4usize, 6usize];
        let mut f: Vec<Complex64> = (0..24)
            .map(|i| Complex64::new((i % 7) as f64, (i % 3) as f64 - 1.0))
            .collect();
        let orig = f.clone();
        forward_axis(&mut f, &shape, 0);
        forward_axis(&mut f, &shape, 1);
        inverse_axis(&mut f, &shape, 1);
        inverse_axis(&mut f, &shape, 0);
        for (a, b) in f.iter().zip(&orig) {
            assert_relative_eq!(a.re, b.re, epsilon = 1e-10);
            assert_relative_eq!(a.im, b.im, epsilon = 1e-10);
        }
    }
}
