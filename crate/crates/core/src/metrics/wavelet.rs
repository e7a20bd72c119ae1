//! CDF 9/7 biorthogonal wavelet via lifting, with whole-sample symmetric
//! extension at the borders.

use crate::imgcore::Plane;

const ALPHA: f64 = -1.586_134_342_059_924;
const BETA: f64 = -0.052_980_118_572_961;
const GAMMA: f64 = 0.882_911_075_530_934;
const DELTA: f64 = 0.443_506_852_043_971;
const ZETA: f64 = 1.149_604_398_860_241;

/// Multi-level decomposition. `details[0]` is the finest level; each entry
/// holds the (horizontal-high, vertical-high, diagonal) bands.
#[derive(Debug, Clone)]
pub struct Subbands {
    pub approx: Plane,
    pub details: Vec<[Plane; 3]>,
}

/// In-place forward lift of an even-length signal into `[low.., high..]`.
fn forward_1d(x: &mut [f64], tmp: &mut Vec<f64>) {
    let n = x.len();
    debug_assert!(n >= 2 && n.is_multiple_of(2));
    let half = n / 2;
    let (mut s, mut d): (Vec<f64>, Vec<f64>) = (
        x.iter().step_by(2).copied().collect(),
        x.iter().skip(1).step_by(2).copied().collect(),
    );
    lift_d(&mut d, &s, ALPHA);
    lift_s(&mut s, &d, BETA);
    lift_d(&mut d, &s, GAMMA);
    lift_s(&mut s, &d, DELTA);
    tmp.clear();
    tmp.extend(s.iter().map(|v| v * ZETA));
    tmp.extend(d.iter().map(|v| v / ZETA));
    x[..half].copy_from_slice(&tmp[..half]);
    x[half..].copy_from_slice(&tmp[half..]);
}

fn inverse_1d(x: &mut [f64], tmp: &mut Vec<f64>) {
    let n = x.len();
    let half = n / 2;
    let mut s: Vec<f64> = x[..half].iter().map(|v| v / ZETA).collect();
    let mut d: Vec<f64> = x[half..].iter().map(|v| v * ZETA).collect();
    lift_s(&mut s, &d, -DELTA);
    lift_d(&mut d, &s, -GAMMA);
    lift_s(&mut s, &d, -BETA);
    lift_d(&mut d, &s, -ALPHA);
    tmp.clear();
    for i in 0..half {
        tmp.push(s[i]);
        tmp.push(d[i]);
    }
    x.copy_from_slice(tmp);
}

/// `d[i] += c (s[i] + s[i+1])`, mirroring `s[half] = s[half-1]`.
fn lift_d(d: &mut [f64], s: &[f64], c: f64) {
    let half = s.len();
    for i in 0..half {
        let right = if i + 1 < half { s[i + 1] } else { s[i] };
        d[i] += c * (s[i] + right);
    }
}

/// `s[i] += c (d[i-1] + d[i])`, mirroring `d[-1] = d[0]`.
fn lift_s(s: &mut [f64], d: &[f64], c: f64) {
    for i in 0..s.len() {
        let left = if i > 0 { d[i - 1] } else { d[0] };
        s[i] += c * (left + d[i]);
    }
}

fn transform_rows_cols(buf: &mut [f64], stride: usize, w: usize, h: usize, inverse: bool) {
    let mut line = Vec::with_capacity(w.max(h));
    let mut tmp = Vec::with_capacity(w.max(h));
    let step = |line: &mut Vec<f64>, tmp: &mut Vec<f64>| {
        if inverse {
            inverse_1d(line, tmp)
        } else {
            forward_1d(line, tmp)
        }
    };
    if inverse {
        for x in 0..w {
            line.clear();
            line.extend((0..h).map(|y| buf[y * stride + x]));
            step(&mut line, &mut tmp);
            for y in 0..h {
                buf[y * stride + x] = line[y];
            }
        }
        for y in 0..h {
            line.clear();
            line.extend_from_slice(&buf[y * stride..y * stride + w]);
            step(&mut line, &mut tmp);
            buf[y * stride..y * stride + w].copy_from_slice(&line);
        }
    } else {
        for y in 0..h {
            line.clear();
            line.extend_from_slice(&buf[y * stride..y * stride + w]);
            step(&mut line, &mut tmp);
            buf[y * stride..y * stride + w].copy_from_slice(&line);
        }
        for x in 0..w {
            line.clear();
            line.extend((0..h).map(|y| buf[y * stride + x]));
            step(&mut line, &mut tmp);
            for y in 0..h {
                buf[y * stride + x] = line[y];
            }
        }
    }
}

fn crop(buf: &[f64], stride: usize, x0: usize, y0: usize, w: usize, h: usize) -> Plane {
    let mut out = Vec::with_capacity(w * h);
    for y in y0..y0 + h {
        out.extend_from_slice(&buf[y * stride + x0..y * stride + x0 + w]);
    }
    Plane::from_parts(w, h, out)
}

/// Decomposes `p` into `levels` octaves. Both sides must be divisible by
/// `2^levels`.
pub fn dwt97_2d(p: &Plane, levels: usize) -> Subbands {
    let (w, h) = p.dimensions();
    let unit = 1usize << levels;
    assert!(
        levels > 0 && w % unit == 0 && h % unit == 0,
        "{w}x{h} not divisible by 2^{levels}"
    );
    let mut buf = p.data().to_vec();
    let mut details = Vec::with_capacity(levels);
    let (mut cw, mut ch) = (w, h);
    for _ in 0..levels {
        transform_rows_cols(&mut buf, w, cw, ch, false);
        let (hw, hh) = (cw / 2, ch / 2);
        details.push([
            crop(&buf, w, hw, 0, hw, hh),
            crop(&buf, w, 0, hh, hw, hh),
            crop(&buf, w, hw, hh, hw, hh),
        ]);
        cw = hw;
        ch = hh;
    }
    Subbands {
        approx: crop(&buf, w, 0, 0, cw, ch),
        details,
    }
}

pub fn idwt97_2d(bands: &Subbands) -> Plane {
    let levels = bands.details.len();
    let w = bands.approx.width() << levels;
    let h = bands.approx.height() << levels;
    let mut buf = vec![0.0; w * h];
    let paste = |buf: &mut [f64], p: &Plane, x0: usize, y0: usize| {
        for y in 0..p.height() {
            buf[(y0 + y) * w + x0..(y0 + y) * w + x0 + p.width()].copy_from_slice(p.row(y));
        }
    };
    paste(&mut buf, &bands.approx, 0, 0);
    for level in (0..levels).rev() {
        let [hl, lh, hh] = &bands.details[level];
        let (hw, hh_) = hl.dimensions();
        paste(&mut buf, hl, hw, 0);
        paste(&mut buf, lh, 0, hh_);
        paste(&mut buf, hh, hw, hh_);
        transform_rows_cols(&mut buf, w, 2 * hw, 2 * hh_, true);
    }
    Plane::from_parts(w, h, buf)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn perfect_reconstruction() {
        let p = Plane::from_fn(64, 32, |x, y| ((x * 13 + y * 7) % 29) as f64 + 0.5 * x as f64)
            .unwrap();
        let bands = dwt97_2d(&p, 5);
        assert_eq!(bands.approx.dimensions(), (2, 1));
        assert_eq!(bands.details[0][0].dimensions(), (32, 16));
        let back = idwt97_2d(&bands);
        for (a, b) in p.data().iter().zip(back.data()) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn constant_has_no_detail() {
        let p = Plane::new(32, 32, vec![42.0; 1024]).unwrap();
        let bands = dwt97_2d(&p, 3);
        for lvl in &bands.details {
            for b in lvl {
                assert!(b.data().iter().all(|v| v.abs() < 1e-9));
            }
        }
        // lowpass DC gain is sqrt(2) per dimension
        let expect = 42.0 * 2f64.powi(3);
        assert!(bands.approx.data().iter().all(|v| (v - expect).abs() < 1e-9));
    }

    #[test]
    fn linear_ramp_has_no_detail_inside() {
        // the analysis highpass has vanishing moments; the mirror only touches
        // the two outermost coefficients
        let mut x: Vec<f64> = (0..32).map(|i| 3.0 * i as f64 + 1.0).collect();
        let mut tmp = Vec::new();
        forward_1d(&mut x, &mut tmp);
        for v in &x[16 + 2..32 - 2] {
            assert!(v.abs() < 1e-9, "{v}");
        }
    }
}
