//! Wavelet-based visual signal-to-noise ratio.
//!
//! Stage one decides whether the distortion is visible at all by comparing
//! per-octave error contrast against masked contrast thresholds. Stage two
//! measures how far the error is from an ideal, threshold-proportional
//! allocation across octaves.

use super::csf::contrast_threshold;
use super::wavelet::dwt97_2d;
use super::{check_dims, HvsParams, MetricError, MetricId, MetricScore};
use crate::imgcore::{to_luma, Plane, RasterImage};

const LEVELS: usize = 5;
const BLACK_LEVEL: f64 = 0.0;
const GAIN: f64 = 0.02874;
const GAMMA: f64 = 2.2;
const MASKING_EXPONENT: f64 = 0.7;
/// Weight of perceived contrast against global precedence.
const ALPHA: f64 = 0.04;

fn luminance(v: f64) -> f64 {
    (BLACK_LEVEL + GAIN * v).powf(GAMMA)
}

/// Folds an out-of-range index back into `0..n` by half-sample mirroring.
fn mirror(i: usize, n: usize) -> usize {
    let period = 2 * n;
    let j = i % period;
    if j < n {
        j
    } else {
        period - 1 - j
    }
}

fn pad_symmetric(p: &Plane, unit: usize) -> Plane {
    let (w, h) = p.dimensions();
    let pw = w.div_ceil(unit) * unit;
    let ph = h.div_ceil(unit) * unit;
    if (pw, ph) == (w, h) {
        return p.clone();
    }
    let mut out = Vec::with_capacity(pw * ph);
    for y in 0..ph {
        let row = p.row(mirror(y, h));
        out.extend((0..pw).map(|x| row[mirror(x, w)]));
    }
    Plane::from_parts(pw, ph, out)
}

/// RMS amplitude of each octave, finest first, per pixel of the padded plane.
fn octave_rms(p: &Plane) -> [f64; LEVELS] {
    let bands = dwt97_2d(p, LEVELS);
    let area = p.data().len() as f64;
    let mut out = [0.0; LEVELS];
    for (m, level) in bands.details.iter().enumerate() {
        let energy: f64 = level
            .iter()
            .flat_map(|b| b.data())
            .map(|v| v * v)
            .sum();
        out[m] = (energy / area).sqrt();
    }
    out
}

fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

pub fn vsnr_plane(f: &Plane, g: &Plane, p: &HvsParams) -> Result<f64, MetricError> {
    check_dims(f, g)?;
    let lum_f: Vec<f64> = f.data().iter().map(|&v| luminance(v)).collect();
    let lum_g: Vec<f64> = g.data().iter().map(|&v| luminance(v)).collect();
    let err: Vec<f64> = lum_f.iter().zip(&lum_g).map(|(a, b)| b - a).collect();
    let (w, h) = f.dimensions();
    let (mu, sigma) = mean_std(&lum_f);

    let error_rms = (err.iter().map(|e| e * e).sum::<f64>() / err.len() as f64).sqrt();
    if error_rms == 0.0 {
        return Ok(f64::INFINITY);
    }
    if mu == 0.0 {
        return Err(MetricError::Degenerate(
            "reference has zero mean luminance".into(),
        ));
    }

    let unit = 1 << LEVELS;
    let ref_bands = octave_rms(&pad_symmetric(&Plane::from_parts(w, h, lum_f), unit));
    let err_bands = octave_rms(&pad_symmetric(&Plane::from_parts(w, h, err), unit));

    let mut thresholds = [0.0; LEVELS];
    let mut err_contrast = [0.0; LEVELS];
    let mut visible = false;
    for m in 0..LEVELS {
        let centre = p.pixels_per_degree / 2f64.powf(m as f64 + 1.5);
        let ct0 = contrast_threshold(centre);
        let ci = ref_bands[m] / mu;
        thresholds[m] = ct0 * (ci / ct0).max(1.0).powf(MASKING_EXPONENT);
        err_contrast[m] = err_bands[m] / mu;
        visible |= err_contrast[m] > thresholds[m];
    }
    if !visible {
        return Ok(f64::INFINITY);
    }

    let image_contrast = sigma / mu;
    if image_contrast == 0.0 {
        return Err(MetricError::Degenerate(
            "visible distortion on a constant reference".into(),
        ));
    }
    let total = error_rms / mu;
    let ct_norm = thresholds.iter().map(|t| t * t).sum::<f64>().sqrt();
    let d_gp = err_contrast
        .iter()
        .zip(&thresholds)
        .map(|(c, t)| (c - total * t / ct_norm).powi(2))
        .sum::<f64>()
        .sqrt();
    let distance = ALPHA * total + (1.0 - ALPHA) * d_gp / std::f64::consts::SQRT_2;
    if distance == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(20.0 * (image_contrast / distance).log10())
}

pub fn vsnr(
    reference: &RasterImage,
    distorted: &RasterImage,
    p: &HvsParams,
) -> Result<MetricScore, MetricError> {
    let v = vsnr_plane(&to_luma(reference), &to_luma(distorted), p)?;
    Ok(MetricScore::from_value(MetricId::Vsnr, v))
}
