//! CSF-weighted signal-to-noise ratio, evaluated in the DFT domain.

use super::{check_dims, fft2, HvsParams, MetricError, MetricId, MetricScore};
use crate::imgcore::{to_luma, Plane, RasterImage};

/// `(Σ|X·C|², Σ|(X−Y)·C|²)` divided by `(MN)²`, so that with a unit CSF the
/// pair equals the spatial mean powers of `f` and `f − g`.
pub(crate) fn weighted_powers(
    f: &Plane,
    g: &Plane,
    p: &HvsParams,
) -> Result<(f64, f64), MetricError> {
    check_dims(f, g)?;
    let (w, h) = f.dimensions();
    let x = fft2::forward(f);
    let y = fft2::forward(g);
    let radial = fft2::radial_frequencies(w, h);
    let (mut sig, mut noise) = (0.0, 0.0);
    for ((xv, yv), r) in x.data.iter().zip(&y.data).zip(&radial) {
        let c = p.csf.weight(r * p.pixels_per_degree);
        let c2 = c * c;
        sig += xv.norm_sqr() * c2;
        noise += (xv - yv).norm_sqr() * c2;
    }
    let n = (w * h) as f64;
    Ok((sig / (n * n), noise / (n * n)))
}

pub(crate) fn ratio_db(signal: f64, noise: f64) -> Result<f64, MetricError> {
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    if signal == 0.0 {
        return Err(MetricError::Degenerate(
            "reference has no weighted signal power".into(),
        ));
    }
    Ok(10.0 * (signal / noise).log10())
}

pub fn wsnr_plane(f: &Plane, g: &Plane, p: &HvsParams) -> Result<f64, MetricError> {
    let (s, n) = weighted_powers(f, g, p)?;
    ratio_db(s, n)
}

pub fn wsnr(
    reference: &RasterImage,
    distorted: &RasterImage,
    p: &HvsParams,
) -> Result<MetricScore, MetricError> {
    let v = wsnr_plane(&to_luma(reference), &to_luma(distorted), p)?;
    Ok(MetricScore::from_value(MetricId::Wsnr, v))
}
