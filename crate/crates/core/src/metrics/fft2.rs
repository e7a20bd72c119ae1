use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::imgcore::Plane;

/// Row-major 2-D spectrum of a plane (unnormalised forward DFT).
pub(crate) struct Spectrum {
    pub width: usize,
    pub height: usize,
    pub data: Vec<Complex64>,
}

fn transform(width: usize, height: usize, data: &mut [Complex64], inverse: bool) {
    let mut planner = FftPlanner::<f64>::new();
    let (row_fft, col_fft) = if inverse {
        (planner.plan_fft_inverse(width), planner.plan_fft_inverse(height))
    } else {
        (planner.plan_fft_forward(width), planner.plan_fft_forward(height))
    };
    for row in data.chunks_exact_mut(width) {
        row_fft.process(row);
    }
    let mut col = vec![Complex64::new(0.0, 0.0); height];
    for x in 0..width {
        for y in 0..height {
            col[y] = data[y * width + x];
        }
        col_fft.process(&mut col);
        for y in 0..height {
            data[y * width + x] = col[y];
        }
    }
}

pub(crate) fn forward(p: &Plane) -> Spectrum {
    let mut data: Vec<Complex64> = p.data().iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(p.width(), p.height(), &mut data, false);
    Spectrum {
        width: p.width(),
        height: p.height(),
        data,
    }
}

/// Inverse transform, returning the real part scaled by `1/(MN)`.
pub(crate) fn inverse_real(s: &Spectrum) -> Plane {
    let mut data = s.data.clone();
    transform(s.width, s.height, &mut data, true);
    let scale = 1.0 / (s.width * s.height) as f64;
    Plane::from_parts(
        s.width,
        s.height,
        data.into_iter().map(|c| c.re * scale).collect(),
    )
}

/// Signed DFT frequency of bin `k` out of `n`, in cycles per sample.
pub(crate) fn bin_frequency(k: usize, n: usize) -> f64 {
    let k = k as f64;
    let n_f = n as f64;
    if k <= n_f / 2.0 {
        k / n_f
    } else {
        (k - n_f) / n_f
    }
}

/// Radial frequency in cycles per pixel for every bin, row-major.
pub(crate) fn radial_frequencies(width: usize, height: usize) -> Vec<f64> {
    let fx: Vec<f64> = (0..width).map(|u| bin_frequency(u, width)).collect();
    let mut out = Vec::with_capacity(width * height);
    for v in 0..height {
        let fy = bin_frequency(v, height);
        out.extend(fx.iter().map(|&f| (f * f + fy * fy).sqrt()));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roundtrip_and_parseval() {
        let p = Plane::from_fn(12, 10, |x, y| ((x * 7 + y * 3) % 11) as f64 - 2.5).unwrap();
        let s = forward(&p);
        let back = inverse_real(&s);
        for (a, b) in p.data().iter().zip(back.data()) {
            assert!((a - b).abs() < 1e-10);
        }
        let spatial: f64 = p.data().iter().map(|v| v * v).sum();
        let freq: f64 = s.data.iter().map(|c| c.norm_sqr()).sum::<f64>() / 120.0;
        assert!((spatial - freq).abs() < 1e-9 * spatial);
    }

    #[test]
    fn frequencies_wrap() {
        assert_eq!(bin_frequency(0, 8), 0.0);
        assert_eq!(bin_frequency(4, 8), 0.5);
        assert_eq!(bin_frequency(5, 8), -0.375);
        let r = radial_frequencies(4, 4);
        assert_eq!(r[0], 0.0);
        assert!((r[5] - (2.0f64 * 0.0625).sqrt()).abs() < 1e-15);
    }
}
