use super::FILL;
use crate::image::{luma, round_sample, Image};

pub(super) fn auto_contrast(img: &Image) -> Image {
    let c = img.channels() as usize;
    let mut out = img.clone();
    for ch in 0..c {
        let samples = img.data().iter().skip(ch).step_by(c);
        let (lo, hi) = samples.fold((255u8, 0u8), |(lo, hi), &v| (lo.min(v), hi.max(v)));
        if hi <= lo {
            continue;
        }
        let span = (hi - lo) as f64;
        for v in out.data_mut().iter_mut().skip(ch).step_by(c) {
            *v = round_sample((*v - lo) as f64 * 255.0 / span);
        }
    }
    out
}

/// Per-channel histogram equalization:
/// `lut[v] = round((cdf[v] − cdf_min) · 255 / (N − cdf_min))`.
pub(super) fn equalize(img: &Image) -> Image {
    let c = img.channels() as usize;
    let mut out = img.clone();
    for ch in 0..c {
        let mut hist = [0u64; 256];
        for &v in img.data().iter().skip(ch).step_by(c) {
            hist[v as usize] += 1;
        }
        let total: u64 = hist.iter().sum();
        let mut cdf = [0u64; 256];
        let mut run = 0;
        for (i, &h) in hist.iter().enumerate() {
            run += h;
            cdf[i] = run;
        }
        let cdf_min = cdf.iter().copied().find(|&v| v > 0).unwrap_or(0);
        if total == cdf_min {
            continue;
        }
        let denom = (total - cdf_min) as f64;
        let lut: Vec<u8> = cdf
            .iter()
            .map(|&v| round_sample(v.saturating_sub(cdf_min) as f64 * 255.0 / denom))
            .collect();
        for v in out.data_mut().iter_mut().skip(ch).step_by(c) {
            *v = lut[*v as usize];
        }
    }
    out
}

pub(super) fn solarize(img: &Image, threshold: f64) -> Image {
    let mut out = img.clone();
    for v in out.data_mut() {
        if *v as f64 >= threshold {
            *v = 255 - *v;
        }
    }
    out
}

pub(super) fn posterize(img: &Image, bits: u32) -> Image {
    let mask = (0xFFu32 << (8 - bits.min(8))) as u8;
    let mut out = img.clone();
    for v in out.data_mut() {
        *v &= mask;
    }
    out
}

/// `degenerate + factor · (img − degenerate)`, per sample.
fn blend_with(img: &Image, degenerate: impl Fn(usize) -> f64, factor: f64) -> Image {
    let mut out = img.clone();
    for (i, v) in out.data_mut().iter_mut().enumerate() {
        let d = degenerate(i);
        *v = round_sample(d + factor * (*v as f64 - d));
    }
    out
}

fn luma_plane(img: &Image) -> Vec<u8> {
    if img.channels() == 1 {
        img.data().to_vec()
    } else {
        img.data().chunks_exact(3).map(|p| luma(p[0], p[1], p[2])).collect()
    }
}

pub(super) fn color(img: &Image, factor: f64) -> Image {
    if img.channels() == 1 {
        return img.clone();
    }
    let gray = luma_plane(img);
    blend_with(img, |i| gray[i / 3] as f64, factor)
}

pub(super) fn contrast(img: &Image, factor: f64) -> Image {
    let gray = luma_plane(img);
    let mean = gray.iter().map(|&v| v as f64).sum::<f64>() / gray.len() as f64;
    blend_with(img, |_| mean, factor)
}

pub(super) fn brightness(img: &Image, factor: f64) -> Image {
    blend_with(img, |_| 0.0, factor)
}

/// Blends with a 3×3 smoothing (`[1 1 1; 1 5 1; 1 1 1] / 13`) of the image.
/// Border pixels have no full neighborhood and keep their values.
pub(super) fn sharpness(img: &Image, factor: f64) -> Image {
    let (w, h, c) = (img.width(), img.height(), img.channels() as usize);
    let mut smooth: Vec<f64> = img.data().iter().map(|&v| v as f64).collect();
    if w >= 3 && h >= 3 {
        for y in 1..h - 1 {
            for x in 1..w - 1 {
                for ch in 0..c {
                    let mut acc = 0.0;
                    for dy in 0..3 {
                        for dx in 0..3 {
                            let weight = if dx == 1 && dy == 1 { 5.0 } else { 1.0 };
                            acc += weight * img.pixel(x + dx - 1, y + dy - 1)[ch] as f64;
                        }
                    }
                    smooth[img.index(x, y) + ch] = acc / 13.0;
                }
            }
        }
    }
    blend_with(img, |i| smooth[i], factor)
}

/// Inverse-mapped warp: `map(x, y)` returns the source position (in pixel
/// index coordinates) for output pixel `(x, y)`. Bilinear; taps outside the
/// source read [`FILL`].
fn warp(img: &Image, map: impl Fn(f64, f64) -> (f64, f64)) -> Image {
    let (w, h, c) = (img.width() as i64, img.height() as i64, img.channels() as usize);
    let mut out = Vec::with_capacity(img.data().len());
    let tap = |x: i64, y: i64, ch: usize| -> f64 {
        if x < 0 || y < 0 || x >= w || y >= h {
            FILL as f64
        } else {
            img.data()[(y as usize * w as usize + x as usize) * c + ch] as f64
        }
    };
    for y in 0..h {
        for x in 0..w {
            let (sx, sy) = map(x as f64, y as f64);
            let fx0 = sx.floor();
            let fy0 = sy.floor();
            let (ax, ay) = (sx - fx0, sy - fy0);
            let (x0, y0) = (fx0 as i64, fy0 as i64);
            for ch in 0..c {
                let mut v = 0.0;
                for (dx, dy, wgt) in [
                    (0, 0, (1.0 - ax) * (1.0 - ay)),
                    (1, 0, ax * (1.0 - ay)),
                    (0, 1, (1.0 - ax) * ay),
                    (1, 1, ax * ay),
                ] {
                    if wgt != 0.0 {
                        v += wgt * tap(x0 + dx, y0 + dy, ch);
                    }
                }
                out.push(round_sample(v));
            }
        }
    }
    Image::from_raw(img.width(), img.height(), img.channels(), out).expect("same dimensions")
}

/// Rotates counter-clockwise (as displayed) by `degrees` about the image center.
pub(super) fn rotate(img: &Image, degrees: f64) -> Image {
    let (sin, cos) = degrees.to_radians().sin_cos();
    let cx = img.width() as f64 / 2.0;
    let cy = img.height() as f64 / 2.0;
    warp(img, |x, y| {
        let dx = x + 0.5 - cx;
        let dy = y + 0.5 - cy;
        let sx = cos * dx - sin * dy + cx - 0.5;
        let sy = sin * dx + cos * dy + cy - 0.5;
        (sx, sy)
    })
}

pub(super) fn shear(img: &Image, factor: f64, horizontal: bool) -> Image {
    let cx = img.width() as f64 / 2.0;
    let cy = img.height() as f64 / 2.0;
    if horizontal {
        warp(img, |x, y| (x + factor * (y + 0.5 - cy), y))
    } else {
        warp(img, |x, y| (x, y + factor * (x + 0.5 - cx)))
    }
}

pub(super) fn translate(img: &Image, dx: f64, dy: f64) -> Image {
    warp(img, |x, y| (x - dx, y - dy))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_contrast_stretches() {
        let img = Image::from_raw(3, 1, 1, vec![50, 100, 150]).unwrap();
        assert_eq!(auto_contrast(&img).data(), &[0, 128, 255]);
        let flat = Image::new(2, 2, 3, 9).unwrap();
        assert_eq!(auto_contrast(&flat), flat);
    }

    #[test]
    fn equalize_two_levels() {
        let img = Image::from_raw(4, 1, 1, vec![10, 10, 20, 20]).unwrap();
        // cdf = 2 at 10, 4 at 20; cdf_min = 2 -> 10 maps to 0, 20 to 255.
        assert_eq!(equalize(&img).data(), &[0, 0, 255, 255]);
    }

    #[test]
    fn brightness_and_contrast() {
        let img = Image::from_raw(2, 1, 1, vec![100, 200]).unwrap();
        assert_eq!(brightness(&img, 0.5).data(), &[50, 100]);
        // mean 150: 150 + 0.5 * (-50, 50)
        assert_eq!(contrast(&img, 0.5).data(), &[125, 175]);
        assert_eq!(brightness(&img, 1.9).data(), &[190, 255]);
    }

    #[test]
    fn translate_whole_pixels() {
        let img = Image::from_raw(4, 1, 1, vec![1, 2, 3, 4]).unwrap();
        assert_eq!(translate(&img, 1.0, 0.0).data(), &[FILL, 1, 2, 3]);
        assert_eq!(translate(&img, -2.0, 0.0).data(), &[3, 4, FILL, FILL]);
    }

    #[test]
    fn rotate_half_turn_flips() {
        let img = Image::from_raw(3, 2, 1, vec![1, 2, 3, 4, 5, 6]).unwrap();
        assert_eq!(rotate(&img, 180.0).data(), &[6, 5, 4, 3, 2, 1]);
    }

    #[test]
    fn sharpness_interior_only() {
        let mut img = Image::new(3, 3, 1, 0).unwrap();
        img.pixel_mut(1, 1)[0] = 130;
        // smooth center = 5*130/13 = 50; factor 2 -> 50 + 2*(80) = 210.
        let out = sharpness(&img, 2.0);
        assert_eq!(out.pixel(1, 1)[0], 210);
        assert_eq!(out.pixel(0, 0)[0], 0);
    }
}
