//! Color-quantization fixtures: per-channel uniform quantization and a
//! median-cut palette with Floyd–Steinberg error diffusion.

use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::imgcore::RasterImage;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DistortError {
    #[error("level count {0} out of range 2..=256")]
    LevelsOutOfRange(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DistortionKind {
    UniformQuantize,
    PaletteDither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DistortionSpec {
    pub kind: DistortionKind,
    /// Levels per channel for uniform quantization, palette size otherwise.
    pub levels: u32,
    pub seed: u64,
}

impl DistortionSpec {
    pub fn new(kind: DistortionKind, levels: u32, seed: u64) -> Result<Self, DistortError> {
        check_levels(levels)?;
        Ok(Self { kind, levels, seed })
    }

    pub fn apply(&self, img: &RasterImage) -> Result<RasterImage, DistortError> {
        match self.kind {
            DistortionKind::UniformQuantize => uniform_quantize(img, self.levels),
            DistortionKind::PaletteDither => palette_dither(img, self.levels, self.seed),
        }
    }
}

fn check_levels(levels: u32) -> Result<(), DistortError> {
    if (2..=256).contains(&levels) {
        Ok(())
    } else {
        Err(DistortError::LevelsOutOfRange(levels))
    }
}

/// Snaps one sample to the nearest of `levels` evenly spaced values on
/// `0..=255`.
pub fn quantize_sample(v: u8, levels: u32) -> u8 {
    let step = 255.0 / (levels - 1) as f64;
    let index = (v as f64 / step).round();
    (index * step).round().clamp(0.0, 255.0) as u8
}

pub fn uniform_quantize(img: &RasterImage, levels: u32) -> Result<RasterImage, DistortError> {
    check_levels(levels)?;
    let lut: Vec<u8> = (0..=255u8).map(|v| quantize_sample(v, levels)).collect();
    let data = img.as_raw().iter().map(|&v| lut[v as usize]).collect();
    Ok(RasterImage::new(img.width(), img.height(), data).expect("same shape as input"))
}

pub fn count_colors(img: &RasterImage) -> usize {
    img.pixels().collect::<HashSet<_>>().len()
}

struct ColorBox {
    colors: Vec<([u8; 3], u64)>,
}

impl ColorBox {
    fn population(&self) -> u64 {
        self.colors.iter().map(|c| c.1).sum()
    }

    /// (widest channel, its extent)
    fn widest(&self) -> (usize, u8) {
        (0..3)
            .map(|ch| {
                let lo = self.colors.iter().map(|c| c.0[ch]).min().unwrap_or(0);
                let hi = self.colors.iter().map(|c| c.0[ch]).max().unwrap_or(0);
                (ch, hi - lo)
            })
            .max_by_key(|&(ch, extent)| (extent, std::cmp::Reverse(ch)))
            .unwrap()
    }

    fn mean(&self) -> [u8; 3] {
        let total = self.population() as f64;
        let mut acc = [0.0f64; 3];
        for (c, n) in &self.colors {
            for ch in 0..3 {
                acc[ch] += c[ch] as f64 * *n as f64;
            }
        }
        acc.map(|s| (s / total).round().clamp(0.0, 255.0) as u8)
    }

    fn split(mut self) -> (ColorBox, ColorBox) {
        let (ch, _) = self.widest();
        self.colors.sort_unstable_by_key(|&(c, _)| (c[ch], c));
        let half = self.population().div_ceil(2);
        let mut acc = 0;
        let mut cut = 1;
        for (i, (_, n)) in self.colors.iter().enumerate() {
            acc += n;
            if acc >= half {
                cut = i + 1;
                break;
            }
        }
        let cut = cut.clamp(1, self.colors.len() - 1);
        let upper = self.colors.split_off(cut);
        (self, ColorBox { colors: upper })
    }
}

/// Median-cut palette of at most `colors` entries. Boxes with the widest
/// channel extent are split first; the seed only breaks exact ties.
pub fn median_cut_palette(
    img: &RasterImage,
    colors: u32,
    seed: u64,
) -> Result<Vec<[u8; 3]>, DistortError> {
    check_levels(colors)?;
    let mut hist: HashMap<[u8; 3], u64> = HashMap::new();
    for p in img.pixels() {
        *hist.entry(p).or_default() += 1;
    }
    let mut initial: Vec<_> = hist.into_iter().collect();
    initial.sort_unstable();
    let mut boxes = vec![ColorBox { colors: initial }];
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    while boxes.len() < colors as usize {
        let key = |b: &ColorBox| (b.widest().1, b.population());
        let best = boxes
            .iter()
            .filter(|b| b.colors.len() > 1)
            .map(key)
            .max();
        let Some(best) = best else { break };
        let tied: Vec<usize> = (0..boxes.len())
            .filter(|&i| boxes[i].colors.len() > 1 && key(&boxes[i]) == best)
            .collect();
        let pick = tied[rng.random_range(0..tied.len())];
        let (a, b) = boxes.swap_remove(pick).split();
        boxes.push(a);
        boxes.push(b);
    }
    let mut palette: Vec<[u8; 3]> = boxes.iter().map(ColorBox::mean).collect();
    palette.sort_unstable();
    palette.dedup();
    Ok(palette)
}

fn nearest(palette: &[[u8; 3]], v: [f64; 3]) -> [u8; 3] {
    let dist = |p: &[u8; 3]| -> f64 { (0..3).map(|c| (p[c] as f64 - v[c]).powi(2)).sum() };
    *palette
        .iter()
        .min_by(|a, b| dist(a).total_cmp(&dist(b)))
        .expect("non-empty palette")
}

/// Raster-order Floyd–Steinberg diffusion onto a fixed palette. Samples are
/// clamped to `[0, 255]` before lookup so accumulated error cannot run away.
pub fn floyd_steinberg(img: &RasterImage, palette: &[[u8; 3]]) -> RasterImage {
    assert!(!palette.is_empty(), "palette must not be empty");
    let (w, h) = img.dimensions();
    let mut buf: Vec<[f64; 3]> = img.pixels().map(|p| p.map(f64::from)).collect();
    let mut out = Vec::with_capacity(w * h * 3);
    for y in 0..h {
        for x in 0..w {
            let v = buf[y * w + x].map(|s| s.clamp(0.0, 255.0));
            let q = nearest(palette, v);
            out.extend_from_slice(&q);
            let err: [f64; 3] = std::array::from_fn(|c| v[c] - q[c] as f64);
            let mut push = |dx: isize, dy: usize, weight: f64| {
                let nx = x as isize + dx;
                let ny = y + dy;
                if nx >= 0 && (nx as usize) < w && ny < h {
                    let cell = &mut buf[ny * w + nx as usize];
                    for c in 0..3 {
                        cell[c] += err[c] * weight;
                    }
                }
            };
            push(1, 0, 7.0 / 16.0);
            push(-1, 1, 3.0 / 16.0);
            push(0, 1, 5.0 / 16.0);
            push(1, 1, 1.0 / 16.0);
        }
    }
    RasterImage::new(w, h, out).expect("same shape as input")
}

pub fn palette_dither(
    img: &RasterImage,
    colors: u32,
    seed: u64,
) -> Result<RasterImage, DistortError> {
    let palette = median_cut_palette(img, colors, seed)?;
    Ok(floyd_steinberg(img, &palette))
}

/// Human-readable form of [`synthetic_mos`], written into fixture manifests.
pub const SYNTHETIC_MOS_FORMULA: &str =
    "mos = clamp(9 * (1 - log2(256 / levels) / 7) + N(0, 0.3), 0, 9)";

/// Monotone severity-to-opinion map with seeded Gaussian jitter.
pub fn synthetic_mos<R: Rng + ?Sized>(levels: u32, rng: &mut R) -> f64 {
    let base = 9.0 * (1.0 - (256.0 / levels as f64).log2() / 7.0);
    let noise = Normal::new(0.0, 0.3).expect("valid sigma").sample(rng);
    (base + noise).clamp(0.0, 9.0)
}

/// Smooth colour gradients plus an oriented sinusoid and fine grain: a
/// stand-in for photographic content in fixtures.
pub fn synthetic_reference(width: usize, height: usize, seed: u64) -> RasterImage {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grain = Normal::new(0.0, 6.0).expect("valid sigma");
    let params: [[f64; 6]; 3] = std::array::from_fn(|_| {
        [
            rng.random_range(20.0..80.0),
            rng.random_range(40.0..120.0),
            rng.random_range(-60.0..60.0),
            rng.random_range(10.0..40.0),
            rng.random_range(2.0..9.0),
            rng.random_range(0.0..std::f64::consts::TAU),
        ]
    });
    let angle = rng.random_range(0.0..std::f64::consts::PI);
    let (ca, sa) = (angle.cos(), angle.sin());
    let mut data = Vec::with_capacity(width * height * 3);
    for y in 0..height {
        for x in 0..width {
            let (u, v) = (x as f64 / width as f64, y as f64 / height as f64);
            for [base, gx, gy, amp, freq, phase] in params {
                let wave = (std::f64::consts::TAU * freq * (u * ca + v * sa) + phase).sin();
                let s = base + gx * u + gy * v + 60.0 + amp * wave + grain.sample(&mut rng);
                data.push(s.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    RasterImage::new(width, height, data).expect("sized buffer")
}
