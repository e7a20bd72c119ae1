//! Separable 2-D filtering helpers on [`Plane`]s.

use crate::imgcore::Plane;

/// Normalised 1-D Gaussian taps of length `size`.
pub(crate) fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let mut k: Vec<f64> = (0..size)
        .map(|i| {
            let d = i as f64 - c;
            (-d * d / (2.0 * sigma * sigma)).exp()
        })
        .collect();
    let s: f64 = k.iter().sum();
    k.iter_mut().for_each(|v| *v /= s);
    k
}

/// Correlates `p` with the separable kernel `k ⊗ k`, keeping only outputs
/// where the kernel fits entirely inside the plane ("valid" region).
pub(crate) fn filter_valid(p: &Plane, k: &[f64]) -> Plane {
    let n = k.len();
    let (w, h) = p.dimensions();
    assert!(n <= w && n <= h, "kernel larger than plane");
    let ow = w - n + 1;
    let oh = h - n + 1;
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        let row = p.row(y);
        for x in 0..ow {
            tmp[y * ow + x] = row[x..x + n].iter().zip(k).map(|(a, b)| a * b).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for (t, &kv) in k.iter().enumerate() {
            let src = &tmp[(y + t) * ow..(y + t + 1) * ow];
            let dst = &mut out[y * ow..(y + 1) * ow];
            dst.iter_mut().zip(src).for_each(|(d, s)| *d += kv * s);
        }
    }
    Plane::from_parts(ow, oh, out)
}

/// Keeps every second sample in both directions, starting at (0, 0).
pub(crate) fn decimate(p: &Plane) -> Plane {
    let (w, h) = p.dimensions();
    let ow = w.div_ceil(2);
    let oh = h.div_ceil(2);
    let mut out = Vec::with_capacity(ow * oh);
    for y in (0..h).step_by(2) {
        out.extend(p.row(y).iter().step_by(2));
    }
    Plane::from_parts(ow, oh, out)
}

/// 2×2 box average followed by decimation; odd trailing rows/columns are
/// dropped.
pub(crate) fn downsample_avg2(p: &Plane) -> Plane {
    let ow = p.width() / 2;
    let oh = p.height() / 2;
    let mut out = Vec::with_capacity(ow * oh);
    for y in 0..oh {
        let r0 = p.row(2 * y);
        let r1 = p.row(2 * y + 1);
        for x in 0..ow {
            out.push(0.25 * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]));
        }
    }
    Plane::from_parts(ow, oh, out)
}

pub(crate) fn map2(a: &Plane, b: &Plane, f: impl Fn(f64, f64) -> f64) -> Plane {
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect();
    Plane::from_parts(a.width(), a.height(), data)
}
