//! Windowed structural similarity: SSIM map and its mean, multi-scale SSIM,
//! and the universal quality index.

use super::filter::{downsample_avg2, filter_valid, gaussian_kernel, map2};
use super::{check_dims, MetricError, MetricId, MetricScore, SsimParams};
use crate::imgcore::{to_luma, Plane, RasterImage};

/// Exponents of the five multi-scale SSIM levels, finest first.
pub const MS_SSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

const MS_SSIM_WINDOW: usize = 11;
const MS_SSIM_SIGMA: f64 = 1.5;

/// Stabiliser used by UQI when one of its denominators vanishes.
const UQI_EPS: f64 = 1e-12;

/// First and second moments of one window pair plus the three SSIM factors.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimComponents {
    pub mean_x: f64,
    pub mean_y: f64,
    pub var_x: f64,
    pub var_y: f64,
    pub cov: f64,
    /// `l(x, y)`
    pub luminance: f64,
    /// `c(x, y)`
    pub contrast: f64,
    /// `s(x, y)` with `c3 = c2 / 2`
    pub structure: f64,
    /// SSIM evaluated directly in its two-factor form.
    pub ssim: f64,
}

#[derive(Debug, Clone, Copy)]
struct Moments {
    mean_x: f64,
    mean_y: f64,
    var_x: f64,
    var_y: f64,
    cov: f64,
}

/// Two-pass population moments; constant windows get exactly zero variance.
fn moments(x: &[f64], y: &[f64]) -> Moments {
    let n = x.len() as f64;
    let const_x = x.iter().all(|&v| v == x[0]);
    let const_y = y.iter().all(|&v| v == y[0]);
    let mean_x = if const_x { x[0] } else { x.iter().sum::<f64>() / n };
    let mean_y = if const_y { y[0] } else { y.iter().sum::<f64>() / n };
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    if !(const_x && const_y) {
        for (&a, &b) in x.iter().zip(y) {
            let dx = a - mean_x;
            let dy = b - mean_y;
            sxx += dx * dx;
            syy += dy * dy;
            sxy += dx * dy;
        }
    }
    Moments {
        mean_x,
        mean_y,
        var_x: if const_x { 0.0 } else { sxx / n },
        var_y: if const_y { 0.0 } else { syy / n },
        cov: sxy / n,
    }
}

fn components_from(m: Moments, c1: f64, c2: f64) -> SsimComponents {
    let c3 = c2 / 2.0;
    let (sx, sy) = (m.var_x.sqrt(), m.var_y.sqrt());
    let mu2 = m.mean_x * m.mean_x + m.mean_y * m.mean_y;
    let var_sum = m.var_x + m.var_y;
    SsimComponents {
        mean_x: m.mean_x,
        mean_y: m.mean_y,
        var_x: m.var_x,
        var_y: m.var_y,
        cov: m.cov,
        luminance: (2.0 * m.mean_x * m.mean_y + c1) / (mu2 + c1),
        contrast: (2.0 * sx * sy + c2) / (var_sum + c2),
        structure: (m.cov + c3) / (sx * sy + c3),
        ssim: ((2.0 * m.mean_x * m.mean_y + c1) * (2.0 * m.cov + c2))
            / ((mu2 + c1) * (var_sum + c2)),
    }
}

/// SSIM factors of two equally sized sample windows.
pub fn ssim_components(x: &[f64], y: &[f64], c1: f64, c2: f64) -> SsimComponents {
    assert_eq!(x.len(), y.len(), "window sizes differ");
    assert!(!x.is_empty(), "empty window");
    components_from(moments(x, y), c1, c2)
}

fn check_window(p: &Plane, window: usize) -> Result<(), MetricError> {
    if window == 0 || p.width() < window || p.height() < window {
        return Err(MetricError::TooSmall {
            width: p.width(),
            height: p.height(),
            needed: format!("at least {window}x{window} for the sliding window"),
        });
    }
    Ok(())
}

/// Calls `f` with the gathered samples of every window position, row-major.
fn for_each_window(
    f_plane: &Plane,
    g_plane: &Plane,
    window: usize,
    mut f: impl FnMut(&[f64], &[f64]) -> f64,
) -> Plane {
    let ow = f_plane.width() - window + 1;
    let oh = f_plane.height() - window + 1;
    let mut xs = vec![0.0; window * window];
    let mut ys = vec![0.0; window * window];
    let mut out = Vec::with_capacity(ow * oh);
    for y0 in 0..oh {
        for x0 in 0..ow {
            for j in 0..window {
                let fr = &f_plane.row(y0 + j)[x0..x0 + window];
                let gr = &g_plane.row(y0 + j)[x0..x0 + window];
                xs[j * window..(j + 1) * window].copy_from_slice(fr);
                ys[j * window..(j + 1) * window].copy_from_slice(gr);
            }
            out.push(f(&xs, &ys));
        }
    }
    Plane::from_parts(ow, oh, out)
}

/// One SSIM value per position of the uniform sliding window (stride 1).
pub fn ssim_map_plane(f: &Plane, g: &Plane, p: &SsimParams) -> Result<Plane, MetricError> {
    p.validate()?;
    check_dims(f, g)?;
    check_window(f, p.window)?;
    let (c1, c2) = (p.c1(), p.c2());
    Ok(for_each_window(f, g, p.window, |x, y| {
        components_from(moments(x, y), c1, c2).ssim
    }))
}

pub fn ssim_map(
    reference: &RasterImage,
    distorted: &RasterImage,
    p: &SsimParams,
) -> Result<Plane, MetricError> {
    ssim_map_plane(&to_luma(reference), &to_luma(distorted), p)
}

/// Arithmetic mean of the SSIM map.
pub fn mssim_plane(f: &Plane, g: &Plane, p: &SsimParams) -> Result<f64, MetricError> {
    Ok(ssim_map_plane(f, g, p)?.mean())
}

/// The single-scale "SSIM" score: mean SSIM over the 8×8 sliding window.
pub fn mssim(
    reference: &RasterImage,
    distorted: &RasterImage,
    p: &SsimParams,
) -> Result<MetricScore, MetricError> {
    let v = mssim_plane(&to_luma(reference), &to_luma(distorted), p)?;
    Ok(MetricScore::finite(MetricId::Ssim, v))
}

/// Mean (c·s, l·c·s) over a Gaussian-weighted window at one scale.
fn gaussian_ssim_means(f: &Plane, g: &Plane, c1: f64, c2: f64) -> (f64, f64) {
    let side = MS_SSIM_WINDOW.min(f.width()).min(f.height());
    let k = gaussian_kernel(side, MS_SSIM_SIGMA);
    let mu_x = filter_valid(f, &k);
    let mu_y = filter_valid(g, &k);
    let exx = filter_valid(&map2(f, f, |a, b| a * b), &k);
    let eyy = filter_valid(&map2(g, g, |a, b| a * b), &k);
    let exy = filter_valid(&map2(f, g, |a, b| a * b), &k);
    let n = mu_x.data().len();
    let (mut cs_sum, mut ssim_sum) = (0.0, 0.0);
    for i in 0..n {
        let mx = mu_x.data()[i];
        let my = mu_y.data()[i];
        let vx = (exx.data()[i] - mx * mx).max(0.0);
        let vy = (eyy.data()[i] - my * my).max(0.0);
        let cxy = exy.data()[i] - mx * my;
        let cs = (2.0 * cxy + c2) / (vx + vy + c2);
        let l = (2.0 * mx * my + c1) / (mx * mx + my * my + c1);
        cs_sum += cs;
        ssim_sum += l * cs;
    }
    (cs_sum / n as f64, ssim_sum / n as f64)
}

/// Five-scale SSIM with the standard exponents.
pub fn ms_ssim_plane(f: &Plane, g: &Plane, p: &SsimParams) -> Result<f64, MetricError> {
    p.validate()?;
    check_dims(f, g)?;
    let levels = MS_SSIM_WEIGHTS.len();
    let min_side = 2usize << (levels - 1);
    if f.width() < min_side || f.height() < min_side {
        return Err(MetricError::TooSmall {
            width: f.width(),
            height: f.height(),
            needed: format!("at least {min_side}x{min_side} for {levels} scales"),
        });
    }
    let (c1, c2) = (p.c1(), p.c2());
    let mut x = f.clone();
    let mut y = g.clone();
    let mut product = 1.0;
    for (level, &w) in MS_SSIM_WEIGHTS.iter().enumerate() {
        let (cs, full) = gaussian_ssim_means(&x, &y, c1, c2);
        let term = if level + 1 == levels { full } else { cs };
        product *= term.max(0.0).powf(w);
        if level + 1 < levels {
            x = downsample_avg2(&x);
            y = downsample_avg2(&y);
        }
    }
    Ok(product)
}

/// The "MSSIM" score: multi-scale SSIM of the luma planes.
pub fn ms_ssim(
    reference: &RasterImage,
    distorted: &RasterImage,
    p: &SsimParams,
) -> Result<MetricScore, MetricError> {
    let v = ms_ssim_plane(&to_luma(reference), &to_luma(distorted), p)?;
    Ok(MetricScore::finite(MetricId::Mssim, v))
}

fn uqi_window(m: Moments) -> f64 {
    let mean_den = m.mean_x * m.mean_x + m.mean_y * m.mean_y;
    let var_den = m.var_x + m.var_y;
    if mean_den == 0.0 && var_den == 0.0 {
        return 1.0;
    }
    if mean_den == 0.0 || var_den == 0.0 {
        return components_from(m, UQI_EPS, UQI_EPS).ssim;
    }
    4.0 * m.cov * m.mean_x * m.mean_y / (mean_den * var_den)
}

/// Mean UQI over the sliding `window`×`window` positions.
pub fn uqi_plane(f: &Plane, g: &Plane, window: usize) -> Result<f64, MetricError> {
    check_dims(f, g)?;
    check_window(f, window)?;
    Ok(for_each_window(f, g, window, |x, y| uqi_window(moments(x, y))).mean())
}

pub fn uqi(reference: &RasterImage, distorted: &RasterImage) -> Result<MetricScore, MetricError> {
    let v = uqi_plane(
        &to_luma(reference),
        &to_luma(distorted),
        SsimParams::default().window,
    )?;
    Ok(MetricScore::finite(MetricId::Uqi, v))
}
