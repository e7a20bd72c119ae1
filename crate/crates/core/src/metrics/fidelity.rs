use super::{check_dims, MetricError, MetricId, MetricScore};
use crate::imgcore::{to_luma, Plane, RasterImage, MAX_SAMPLE};

/// Mean squared difference of two planes.
pub fn mse(f: &Plane, g: &Plane) -> Result<f64, MetricError> {
    check_dims(f, g)?;
    let sum: f64 = f
        .data()
        .iter()
        .zip(g.data())
        .map(|(a, b)| (a - b) * (a - b))
        .sum();
    Ok(sum / f.data().len() as f64)
}

pub(crate) fn psnr_from_mse(mse: f64, peak: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        20.0 * (peak / mse.sqrt()).log10()
    }
}

/// PSNR in dB against a peak of `2^B - 1`; `+inf` for identical planes.
pub fn psnr_plane(f: &Plane, g: &Plane) -> Result<f64, MetricError> {
    Ok(psnr_from_mse(mse(f, g)?, MAX_SAMPLE))
}

/// PSNR of the luma planes.
pub fn psnr(reference: &RasterImage, distorted: &RasterImage) -> Result<MetricScore, MetricError> {
    let v = psnr_plane(&to_luma(reference), &to_luma(distorted))?;
    Ok(MetricScore::from_value(MetricId::Psnr, v))
}

/// Mean power of the reference and of the error signal.
pub(crate) fn signal_noise_power(f: &Plane, g: &Plane) -> Result<(f64, f64), MetricError> {
    check_dims(f, g)?;
    let n = f.data().len() as f64;
    let signal = f.data().iter().map(|v| v * v).sum::<f64>() / n;
    Ok((signal, mse(f, g)?))
}

pub(crate) fn snr_from_powers(signal: f64, noise: f64) -> Result<f64, MetricError> {
    if signal == 0.0 {
        return Err(MetricError::Degenerate(
            "reference has zero power, SNR undefined".into(),
        ));
    }
    if noise == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(10.0 * (signal / noise).log10())
}

/// `10 log10(P_f / P_e)` where `P_e` is the power of `f - g`.
pub fn snr_plane(f: &Plane, g: &Plane) -> Result<f64, MetricError> {
    let (s, n) = signal_noise_power(f, g)?;
    snr_from_powers(s, n)
}

pub fn snr(reference: &RasterImage, distorted: &RasterImage) -> Result<MetricScore, MetricError> {
    let v = snr_plane(&to_luma(reference), &to_luma(distorted))?;
    Ok(MetricScore::from_value(MetricId::Snr, v))
}
