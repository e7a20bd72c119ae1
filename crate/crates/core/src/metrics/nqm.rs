//! Noise quality measure over a Peli-style contrast pyramid.
//!
//! Both images are split into octave bands with raised-cosine filters in
//! log frequency. Each band is turned into local contrast against the
//! reference's lowpass luminance, sub-threshold content is discarded, and
//! distortion that stays within threshold of the reference is masked. The
//! restored images are then compared as a plain SNR.

use rustfft::num_complex::Complex64;

use super::csf::contrast_threshold;
use super::fft2::{self, Spectrum};
use super::{check_dims, HvsParams, MetricError, MetricId, MetricScore};
use crate::imgcore::{to_luma, Plane, RasterImage};

const BANDS: usize = 5;
/// Centre of the finest band in cycles per pixel.
const FINEST_CENTRE: f64 = 0.25;
/// Floor on local luminance so dark regions do not blow up contrast.
const MIN_LUMINANCE: f64 = 1.0;

fn band_gain(r: f64, centre: f64) -> f64 {
    if r == 0.0 {
        return 0.0;
    }
    let t = (r / centre).log2();
    if t.abs() <= 1.0 {
        0.5 * (1.0 + (std::f64::consts::PI * t).cos())
    } else {
        0.0
    }
}

/// Everything below the band centred at `centre`.
fn lowpass_gain(r: f64, centre: f64) -> f64 {
    if r <= centre / 2.0 {
        1.0
    } else if r < centre {
        1.0 - band_gain(r, centre)
    } else {
        0.0
    }
}

fn filtered(s: &Spectrum, gains: &[f64]) -> Vec<f64> {
    let data = s
        .data
        .iter()
        .zip(gains)
        .map(|(c, &g)| c * g)
        .collect::<Vec<Complex64>>();
    fft2::inverse_real(&Spectrum {
        width: s.width,
        height: s.height,
        data,
    })
    .into_data()
}

pub fn nqm_plane(f: &Plane, g: &Plane, p: &HvsParams) -> Result<f64, MetricError> {
    check_dims(f, g)?;
    let (w, h) = f.dimensions();
    let ppd = match p.nqm_viewing_angle {
        Some(angle) => w as f64 / angle,
        None => p.pixels_per_degree,
    };
    let sf = fft2::forward(f);
    let sg = fft2::forward(g);
    let radial = fft2::radial_frequencies(w, h);

    let coarsest = FINEST_CENTRE / 2f64.powi(BANDS as i32 - 1);
    let residual: Vec<f64> = radial.iter().map(|&r| lowpass_gain(r, coarsest)).collect();
    let mut restored_ref = filtered(&sf, &residual);
    let mut restored_dist = filtered(&sg, &residual);

    for k in 0..BANDS {
        let centre = FINEST_CENTRE / 2f64.powi(k as i32);
        let band: Vec<f64> = radial.iter().map(|&r| band_gain(r, centre)).collect();
        let low: Vec<f64> = radial.iter().map(|&r| lowpass_gain(r, centre)).collect();
        let a = filtered(&sf, &band);
        let ai = filtered(&sg, &band);
        let lum = filtered(&sf, &low);
        let ct = contrast_threshold(centre * ppd);
        for i in 0..a.len() {
            let l = lum[i].max(MIN_LUMINANCE);
            let c = a[i] / l;
            let ci = ai[i] / l;
            let ref_coeff = if c.abs() > ct { a[i] } else { 0.0 };
            let dist_coeff = if (ci - c).abs() <= ct {
                ref_coeff
            } else if ci.abs() > ct {
                ai[i]
            } else {
                0.0
            };
            restored_ref[i] += ref_coeff;
            restored_dist[i] += dist_coeff;
        }
    }

    let signal: f64 = restored_ref.iter().map(|v| v * v).sum();
    let noise: f64 = restored_ref
        .iter()
        .zip(&restored_dist)
        .map(|(a, b)| (a - b).powi(2))
        .sum();
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    if signal == 0.0 {
        return Err(MetricError::Degenerate(
            "reference has no visible content".into(),
        ));
    }
    Ok(10.0 * (signal / noise).log10())
}

pub fn nqm(
    reference: &RasterImage,
    distorted: &RasterImage,
    p: &HvsParams,
) -> Result<MetricScore, MetricError> {
    let v = nqm_plane(&to_luma(reference), &to_luma(distorted), p)?;
    Ok(MetricScore::from_value(MetricId::Nqm, v))
}
