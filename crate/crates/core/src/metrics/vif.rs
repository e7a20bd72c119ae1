//! Pixel-domain visual information fidelity.

use super::filter::{decimate, filter_valid, gaussian_kernel, map2};
use super::{check_dims, HvsParams, MetricError, MetricId, MetricScore};
use crate::imgcore::{to_luma, Plane, RasterImage};

const SCALES: u32 = 4;
const EPS: f64 = 1e-10;

/// Gaussian window side at `scale` (1-based): `2^(5 - scale) + 1`.
fn window_side(scale: u32) -> usize {
    (1usize << (5 - scale)) + 1
}

/// Smallest square side that survives all four scales with a non-empty map.
fn min_side() -> usize {
    // Scale s > 1 sees ceil((prev - n_s + 1) / 2) samples and needs n_s of them.
    let mut need = window_side(SCALES);
    for scale in (2..=SCALES).rev() {
        need = (2 * need + window_side(scale) - 2).max(window_side(scale - 1));
    }
    need
}

/// (numerator, denominator) information sums of one scale.
fn scale_information(r: &Plane, d: &Plane, kernel: &[f64], noise_var: f64) -> (f64, f64) {
    let mu1 = filter_valid(r, kernel);
    let mu2 = filter_valid(d, kernel);
    let e11 = filter_valid(&map2(r, r, |a, b| a * b), kernel);
    let e22 = filter_valid(&map2(d, d, |a, b| a * b), kernel);
    let e12 = filter_valid(&map2(r, d, |a, b| a * b), kernel);
    let (mut num, mut den) = (0.0, 0.0);
    for i in 0..mu1.data().len() {
        let m1 = mu1.data()[i];
        let m2 = mu2.data()[i];
        let mut s1 = (e11.data()[i] - m1 * m1).max(0.0);
        let s2 = (e22.data()[i] - m2 * m2).max(0.0);
        let s12 = e12.data()[i] - m1 * m2;

        let mut g = s12 / (s1 + EPS);
        let mut sv = s2 - g * s12;
        if s1 < EPS {
            g = 0.0;
            sv = s2;
            s1 = 0.0;
        }
        if s2 < EPS {
            g = 0.0;
            sv = 0.0;
        }
        if g < 0.0 {
            sv = s2;
            g = 0.0;
        }
        let sv = sv.max(EPS);
        num += (1.0 + g * g * s1 / (sv + noise_var)).log10();
        den += (1.0 + s1 / noise_var).log10();
    }
    (num, den)
}

/// VIFP over four dyadic scales. A reference with no information at any
/// scale (flat image) scores 1.
pub fn vifp_plane(f: &Plane, g: &Plane, p: &HvsParams) -> Result<f64, MetricError> {
    check_dims(f, g)?;
    let need = min_side();
    if f.width() < need || f.height() < need {
        return Err(MetricError::TooSmall {
            width: f.width(),
            height: f.height(),
            needed: format!("at least {need}x{need} for {SCALES} scales"),
        });
    }
    let noise_var = p.vif_noise_variance;
    let mut r = f.clone();
    let mut d = g.clone();
    let (mut num, mut den) = (0.0, 0.0);
    for scale in 1..=SCALES {
        let n = window_side(scale);
        let kernel = gaussian_kernel(n, n as f64 / 5.0);
        if scale > 1 {
            r = decimate(&filter_valid(&r, &kernel));
            d = decimate(&filter_valid(&d, &kernel));
        }
        let (a, b) = scale_information(&r, &d, &kernel, noise_var);
        num += a;
        den += b;
    }
    if den == 0.0 {
        return Ok(1.0);
    }
    Ok(num / den)
}

pub fn vifp(
    reference: &RasterImage,
    distorted: &RasterImage,
    p: &HvsParams,
) -> Result<MetricScore, MetricError> {
    let v = vifp_plane(&to_luma(reference), &to_luma(distorted), p)?;
    Ok(MetricScore::finite(MetricId::Vifp, v))
}
