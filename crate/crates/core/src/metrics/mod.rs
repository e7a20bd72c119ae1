//! Full-reference quality measures.
//!
//! Every measure is a pure function of a (reference, distorted) pair. By
//! default the pair is reduced to BT.601 luma first; [`ChannelMode::PerChannel`]
//! evaluates R, G and B separately and pools the results instead.

mod csf;
mod fft2;
mod fidelity;
mod filter;
mod nqm;
mod ssim;
mod vif;
mod vsnr;
mod wavelet;
mod wsnr;

use std::fmt;
use std::str::FromStr;

use crate::imgcore::{self, Plane, RasterImage, MAX_SAMPLE};

pub use csf::{mannos_sakrison, CsfModel};
pub use fidelity::{mse, psnr, psnr_plane, snr, snr_plane};
pub use nqm::{nqm, nqm_plane};
pub use ssim::{
    ms_ssim, ms_ssim_plane, mssim, mssim_plane, ssim_components, ssim_map, ssim_map_plane, uqi,
    uqi_plane, SsimComponents, MS_SSIM_WEIGHTS,
};
pub use vif::{vifp, vifp_plane};
pub use vsnr::{vsnr, vsnr_plane};
pub use wavelet::{dwt97_2d, idwt97_2d, Subbands};
pub use wsnr::{wsnr, wsnr_plane};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("dimension mismatch: reference is {ref_w}x{ref_h}, distorted is {dist_w}x{dist_h}")]
    DimensionMismatch {
        ref_w: usize,
        ref_h: usize,
        dist_w: usize,
        dist_h: usize,
    },
    #[error("image {width}x{height} is too small: {needed}")]
    TooSmall {
        width: usize,
        height: usize,
        needed: String,
    },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("{metric}: {source}")]
    Tagged {
        metric: MetricId,
        #[source]
        source: Box<MetricError>,
    },
}

impl MetricError {
    fn tagged(self, metric: MetricId) -> Self {
        match self {
            e @ MetricError::Tagged { .. } => e,
            e => MetricError::Tagged {
                metric,
                source: Box::new(e),
            },
        }
    }
}

/// The nine measures, in the column order of the evaluation tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum MetricId {
    Psnr,
    Ssim,
    Mssim,
    Vsnr,
    Vifp,
    Uqi,
    Nqm,
    Wsnr,
    Snr,
}

impl MetricId {
    pub const ALL: [MetricId; 9] = [
        MetricId::Psnr,
        MetricId::Ssim,
        MetricId::Mssim,
        MetricId::Vsnr,
        MetricId::Vifp,
        MetricId::Uqi,
        MetricId::Nqm,
        MetricId::Wsnr,
        MetricId::Snr,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricId::Psnr => "PSNR",
            MetricId::Ssim => "SSIM",
            MetricId::Mssim => "MSSIM",
            MetricId::Vsnr => "VSNR",
            MetricId::Vifp => "VIFP",
            MetricId::Uqi => "UQI",
            MetricId::Nqm => "NQM",
            MetricId::Wsnr => "WSNR",
            MetricId::Snr => "SNR",
        }
    }

    /// Position in [`MetricId::ALL`].
    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for MetricId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        MetricId::ALL
            .into_iter()
            .find(|m| m.name().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| format!("unknown metric '{s}'"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricScore {
    pub metric: MetricId,
    pub value: f64,
    pub is_infinite: bool,
}

impl MetricScore {
    pub fn finite(metric: MetricId, value: f64) -> Self {
        debug_assert!(value.is_finite(), "{metric} produced {value}");
        Self {
            metric,
            value,
            is_infinite: false,
        }
    }

    pub fn infinite(metric: MetricId) -> Self {
        Self {
            metric,
            value: f64::INFINITY,
            is_infinite: true,
        }
    }

    /// Maps a raw value that may be `+inf` onto a score.
    pub(crate) fn from_value(metric: MetricId, value: f64) -> Self {
        if value == f64::INFINITY {
            Self::infinite(metric)
        } else {
            Self::finite(metric, value)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SsimParams {
    pub k1: f64,
    pub k2: f64,
    /// Dynamic range `L = 2^B - 1`.
    pub dynamic_range: f64,
    /// Side of the square uniform window.
    pub window: usize,
}

impl Default for SsimParams {
    fn default() -> Self {
        Self {
            k1: 0.01,
            k2: 0.03,
            dynamic_range: MAX_SAMPLE,
            window: 8,
        }
    }
}

impl SsimParams {
    pub fn c1(&self) -> f64 {
        (self.k1 * self.dynamic_range).powi(2)
    }

    pub fn c2(&self) -> f64 {
        (self.k2 * self.dynamic_range).powi(2)
    }

    pub fn validate(&self) -> Result<(), MetricError> {
        if !(self.k1 > 0.0 && self.k2 > 0.0 && self.dynamic_range > 0.0 && self.window > 0) {
            return Err(MetricError::InvalidParam(format!(
                "SSIM parameters must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Viewing and display model shared by the HVS-based measures.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HvsParams {
    /// Sampling density of the display in pixels per degree of visual angle.
    pub pixels_per_degree: f64,
    /// Visual angle spanned by the image width for NQM; derived from
    /// `pixels_per_degree` when `None`.
    pub nqm_viewing_angle: Option<f64>,
    /// VIFP HVS noise variance.
    pub vif_noise_variance: f64,
    pub csf: CsfModel,
}

impl Default for HvsParams {
    fn default() -> Self {
        Self {
            pixels_per_degree: 19.1,
            nqm_viewing_angle: None,
            vif_noise_variance: 2.0,
            csf: CsfModel::MannosSakrison,
        }
    }
}

impl HvsParams {
    pub fn validate(&self) -> Result<(), MetricError> {
        let angle_ok = self.nqm_viewing_angle.is_none_or(|a| a > 0.0 && a.is_finite());
        if !(self.pixels_per_degree > 0.0
            && self.pixels_per_degree.is_finite()
            && self.vif_noise_variance > 0.0
            && angle_ok)
        {
            return Err(MetricError::InvalidParam(format!(
                "HVS parameters must be positive: {self:?}"
            )));
        }
        Ok(())
    }
}

/// Which planes a measure is evaluated on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChannelMode {
    #[default]
    Luma,
    /// R, G and B individually. Error-power measures (PSNR, SNR, WSNR) pool
    /// signal and noise power over the three channels; the others average
    /// the per-channel scores.
    PerChannel,
}

pub(crate) fn check_dims(a: &Plane, b: &Plane) -> Result<(), MetricError> {
    if a.dimensions() != b.dimensions() {
        return Err(MetricError::DimensionMismatch {
            ref_w: a.width(),
            ref_h: a.height(),
            dist_w: b.width(),
            dist_h: b.height(),
        });
    }
    Ok(())
}

pub(crate) fn check_image_dims(a: &RasterImage, b: &RasterImage) -> Result<(), MetricError> {
    if a.dimensions() != b.dimensions() {
        return Err(MetricError::DimensionMismatch {
            ref_w: a.width(),
            ref_h: a.height(),
            dist_w: b.width(),
            dist_h: b.height(),
        });
    }
    Ok(())
}

fn rgb_planes(img: &RasterImage) -> [Plane; 3] {
    [0, 1, 2].map(|c| imgcore::channel(img, c).expect("channel index in range"))
}

/// Evaluates one measure under the given channel mode.
pub fn evaluate_metric(
    metric: MetricId,
    reference: &RasterImage,
    distorted: &RasterImage,
    ssim: &SsimParams,
    hvs: &HvsParams,
    mode: ChannelMode,
) -> Result<MetricScore, MetricError> {
    check_image_dims(reference, distorted).map_err(|e| e.tagged(metric))?;
    let planes = match mode {
        ChannelMode::Luma => vec![(imgcore::to_luma(reference), imgcore::to_luma(distorted))],
        ChannelMode::PerChannel => rgb_planes(reference)
            .into_iter()
            .zip(rgb_planes(distorted))
            .collect(),
    };
    let value = plane_metric(metric, &planes, ssim, hvs).map_err(|e| e.tagged(metric))?;
    Ok(MetricScore::from_value(metric, value))
}

fn plane_metric(
    metric: MetricId,
    planes: &[(Plane, Plane)],
    ssim: &SsimParams,
    hvs: &HvsParams,
) -> Result<f64, MetricError> {
    let mean_of = |f: &dyn Fn(&Plane, &Plane) -> Result<f64, MetricError>| {
        let mut acc = 0.0;
        for (r, d) in planes {
            acc += f(r, d)?;
        }
        Ok::<f64, MetricError>(acc / planes.len() as f64)
    };
    match metric {
        MetricId::Psnr => {
            let mut err = 0.0;
            for (r, d) in planes {
                err += mse(r, d)?;
            }
            Ok(fidelity::psnr_from_mse(err / planes.len() as f64, MAX_SAMPLE))
        }
        MetricId::Snr => {
            let (mut sig, mut noise) = (0.0, 0.0);
            for (r, d) in planes {
                let (s, n) = fidelity::signal_noise_power(r, d)?;
                sig += s;
                noise += n;
            }
            fidelity::snr_from_powers(sig, noise)
        }
        MetricId::Wsnr => {
            let (mut sig, mut noise) = (0.0, 0.0);
            for (r, d) in planes {
                let (s, n) = wsnr::weighted_powers(r, d, hvs)?;
                sig += s;
                noise += n;
            }
            wsnr::ratio_db(sig, noise)
        }
        MetricId::Ssim => mean_of(&|r, d| mssim_plane(r, d, ssim)),
        MetricId::Mssim => mean_of(&|r, d| ms_ssim_plane(r, d, ssim)),
        MetricId::Uqi => mean_of(&|r, d| uqi_plane(r, d, ssim.window)),
        MetricId::Vifp => mean_of(&|r, d| vifp_plane(r, d, hvs)),
        MetricId::Vsnr => mean_of(&|r, d| vsnr_plane(r, d, hvs)),
        MetricId::Nqm => mean_of(&|r, d| nqm_plane(r, d, hvs)),
    }
}

/// All nine measures on one pair, in table column order.
pub fn evaluate_all(
    reference: &RasterImage,
    distorted: &RasterImage,
    ssim: &SsimParams,
    hvs: &HvsParams,
) -> Result<Vec<MetricScore>, MetricError> {
    evaluate_all_with(reference, distorted, ssim, hvs, ChannelMode::Luma)
}

pub fn evaluate_all_with(
    reference: &RasterImage,
    distorted: &RasterImage,
    ssim: &SsimParams,
    hvs: &HvsParams,
    mode: ChannelMode,
) -> Result<Vec<MetricScore>, MetricError> {
    ssim.validate()?;
    hvs.validate()?;
    check_image_dims(reference, distorted)?;
    let planes = match mode {
        ChannelMode::Luma => vec![(imgcore::to_luma(reference), imgcore::to_luma(distorted))],
        ChannelMode::PerChannel => rgb_planes(reference)
            .into_iter()
            .zip(rgb_planes(distorted))
            .collect(),
    };
    MetricId::ALL
        .iter()
        .map(|&m| {
            plane_metric(m, &planes, ssim, hvs)
                .map(|v| MetricScore::from_value(m, v))
                .map_err(|e| e.tagged(m))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn textured(w: usize, h: usize, seed: u32) -> RasterImage {
        RasterImage::from_fn(w, h, |x, y| {
            let v = (x * 7 + y * 13 + seed as usize * 31) % 251;
            let g = ((x * x + y) as u32 ^ seed) % 256;
            [v as u8, g as u8, ((x + 2 * y) % 256) as u8]
        })
        .unwrap()
    }

    #[test]
    fn metric_order_and_names() {
        let names: Vec<_> = MetricId::ALL.iter().map(|m| m.name()).collect();
        assert_eq!(
            names,
            ["PSNR", "SSIM", "MSSIM", "VSNR", "VIFP", "UQI", "NQM", "WSNR", "SNR"]
        );
        for (i, m) in MetricId::ALL.iter().enumerate() {
            assert_eq!(m.index(), i);
            assert_eq!(m.name().parse::<MetricId>().unwrap(), *m);
        }
        assert!("XYZ".parse::<MetricId>().is_err());
    }

    #[test]
    fn evaluate_all_identity() {
        let img = textured(64, 64, 3);
        let scores = evaluate_all(&img, &img, &SsimParams::default(), &HvsParams::default())
            .unwrap();
        assert_eq!(scores.len(), 9);
        for (s, m) in scores.iter().zip(MetricId::ALL) {
            assert_eq!(s.metric, m);
            match m {
                MetricId::Psnr | MetricId::Snr | MetricId::Vsnr | MetricId::Wsnr | MetricId::Nqm => {
                    assert!(s.is_infinite, "{m} should be infinite")
                }
                MetricId::Vifp => assert!((s.value - 1.0).abs() < 1e-6),
                _ => assert!((s.value - 1.0).abs() < 1e-9, "{m} = {}", s.value),
            }
        }
    }

    #[test]
    fn dimension_mismatch_is_tagged() {
        let a = textured(64, 64, 1);
        let b = textured(64, 48, 1);
        for m in MetricId::ALL {
            let err = evaluate_metric(
                m,
                &a,
                &b,
                &SsimParams::default(),
                &HvsParams::default(),
                ChannelMode::Luma,
            )
            .unwrap_err();
            match err {
                MetricError::Tagged { metric, source } => {
                    assert_eq!(metric, m);
                    assert!(matches!(*source, MetricError::DimensionMismatch { .. }));
                }
                other => panic!("untagged error {other:?}"),
            }
        }
        assert!(matches!(
            evaluate_all(&a, &b, &SsimParams::default(), &HvsParams::default()),
            Err(MetricError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn per_channel_psnr_pools_mse() {
        let a = RasterImage::filled(16, 16, [100, 100, 100]).unwrap();
        let b = RasterImage::filled(16, 16, [101, 100, 100]).unwrap();
        let s = evaluate_metric(
            MetricId::Psnr,
            &a,
            &b,
            &SsimParams::default(),
            &HvsParams::default(),
            ChannelMode::PerChannel,
        )
        .unwrap();
        // MSE over three channels is 1/3.
        let expected = 20.0 * (255.0 / (1.0f64 / 3.0).sqrt()).log10();
        assert!((s.value - expected).abs() < 1e-9);
    }

    #[test]
    fn invalid_params_rejected() {
        let img = textured(64, 64, 1);
        let bad = SsimParams {
            k1: 0.0,
            ..SsimParams::default()
        };
        assert!(evaluate_all(&img, &img, &bad, &HvsParams::default()).is_err());
        let bad_hvs = HvsParams {
            pixels_per_degree: -1.0,
            ..HvsParams::default()
        };
        assert!(evaluate_all(&img, &img, &SsimParams::default(), &bad_hvs).is_err());
    }
}
