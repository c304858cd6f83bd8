use super::{IntegralTable, SaliencyMap};
use crate::config::SaliencyProvider;
use crate::image::{to_grayscale, Image};

/// Surround window radii of the center-surround provider.
pub const SURROUND_RADII: [u32; 3] = [2, 4, 8];

/// Center-surround contrast before normalization: for every pixel, the sum
/// over [`SURROUND_RADII`] of |luma − mean luma of the border-clipped
/// `(2r+1)²` window|.
pub fn center_surround_raw(img: &Image) -> Vec<f64> {
    let gray = to_grayscale(img);
    let (w, h) = (gray.width(), gray.height());
    let table = IntegralTable::from_values(w, h, gray.data().iter().map(|&v| v as f64));
    let mut out = Vec::with_capacity(gray.data().len());
    for y in 0..h {
        for x in 0..w {
            let center = gray.data()[(y * w + x) as usize] as f64;
            let mut acc = 0.0;
            for r in SURROUND_RADII {
                let x0 = x.saturating_sub(r);
                let y0 = y.saturating_sub(r);
                let x1 = (x + r + 1).min(w);
                let y1 = (y + r + 1).min(h);
                let count = ((x1 - x0) * (y1 - y0)) as f64;
                let mean = table.box_sum(x0, y0, x1, y1) / count;
                acc += (center - mean).abs();
            }
            out.push(acc);
        }
    }
    out
}

pub fn saliency_fine_grained(img: &Image) -> SaliencyMap {
    let raw = center_surround_raw(img);
    SaliencyMap::from_raw(img.width(), img.height(), &raw, SaliencyProvider::FineGrained)
}

/// 3×3 Sobel gradient magnitude with replicated borders, before normalization.
pub fn sobel_magnitude_raw(img: &Image) -> Vec<f64> {
    let gray = to_grayscale(img);
    let (w, h) = (gray.width() as i64, gray.height() as i64);
    let px = |x: i64, y: i64| -> f64 {
        let x = x.clamp(0, w - 1);
        let y = y.clamp(0, h - 1);
        gray.data()[(y * w + x) as usize] as f64
    };
    let mut out = Vec::with_capacity((w * h) as usize);
    for y in 0..h {
        for x in 0..w {
            let gx = (px(x + 1, y - 1) + 2.0 * px(x + 1, y) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x - 1, y) + px(x - 1, y + 1));
            let gy = (px(x - 1, y + 1) + 2.0 * px(x, y + 1) + px(x + 1, y + 1))
                - (px(x - 1, y - 1) + 2.0 * px(x, y - 1) + px(x + 1, y - 1));
            out.push((gx * gx + gy * gy).sqrt());
        }
    }
    out
}

pub fn saliency_gradient_magnitude(img: &Image) -> SaliencyMap {
    let raw = sobel_magnitude_raw(img);
    SaliencyMap::from_raw(img.width(), img.height(), &raw, SaliencyProvider::GradientMagnitude)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::RngStream;

    fn random_image(w: u32, h: u32, c: u8, seed: u64) -> Image {
        let mut rng = RngStream::new(seed, 0);
        let n = (w * h * c as u32) as usize;
        Image::from_raw(w, h, c, (0..n).map(|_| rng.below(256) as u8).collect()).unwrap()
    }

    /// Direct window loops; no integral table.
    fn naive_center_surround(img: &Image) -> Vec<f64> {
        let g = to_grayscale(img);
        let (w, h) = (g.width() as i64, g.height() as i64);
        let at = |x: i64, y: i64| g.data()[(y * w + x) as usize] as f64;
        let mut out = vec![];
        for y in 0..h {
            for x in 0..w {
                let mut acc = 0.0;
                for r in [2i64, 4, 8] {
                    let (mut s, mut n) = (0.0, 0.0);
                    for yy in y - r..=y + r {
                        for xx in x - r..=x + r {
                            if (0..w).contains(&xx) && (0..h).contains(&yy) {
                                s += at(xx, yy);
                                n += 1.0;
                            }
                        }
                    }
                    acc += (at(x, y) - s / n).abs();
                }
                out.push(acc);
            }
        }
        out
    }

    /// Convolution with explicit kernels and replicate padding.
    fn naive_sobel(img: &Image) -> Vec<f64> {
        let g = to_grayscale(img);
        let (w, h) = (g.width() as i64, g.height() as i64);
        let kx = [[-1.0, 0.0, 1.0], [-2.0, 0.0, 2.0], [-1.0, 0.0, 1.0]];
        let ky = [[-1.0, -2.0, -1.0], [0.0, 0.0, 0.0], [1.0, 2.0, 1.0]];
        let mut out = vec![];
        for y in 0..h {
            for x in 0..w {
                let (mut gx, mut gy) = (0.0, 0.0);
                for (j, (rx, ry)) in kx.iter().zip(ky.iter()).enumerate() {
                    for i in 0..3 {
                        let sx = (x + i as i64 - 1).clamp(0, w - 1);
                        let sy = (y + j as i64 - 1).clamp(0, h - 1);
                        let v = g.data()[(sy * w + sx) as usize] as f64;
                        gx += rx[i] * v;
                        gy += ry[i] * v;
                    }
                }
                out.push((gx * gx + gy * gy).sqrt());
            }
        }
        out
    }

    #[test]
    fn constant_image_gives_zero_map() {
        let img = Image::new(9, 7, 3, 77).unwrap();
        assert!(saliency_fine_grained(&img).values().iter().all(|&v| v == 0.0));
        assert!(saliency_gradient_magnitude(&img).values().iter().all(|&v| v == 0.0));
    }

    #[test]
    fn bright_pixel_is_argmax() {
        let mut img = Image::new(16, 16, 1, 0).unwrap();
        img.pixel_mut(11, 4)[0] = 255;
        let m = saliency_fine_grained(&img);
        assert_eq!(m.argmax(), (11, 4));
        assert_eq!(m.get(11, 4), 1.0);
    }

    #[test]
    fn center_surround_matches_naive() {
        for seed in 0..5 {
            let img = random_image(12, 12, 3, seed);
            let fast = center_surround_raw(&img);
            let slow = naive_center_surround(&img);
            for (a, b) in fast.iter().zip(&slow) {
                assert!((a - b).abs() <= 1e-6, "{a} vs {b}");
            }
        }
    }

    #[test]
    fn sobel_matches_naive() {
        for seed in 0..5 {
            let img = random_image(10, 10, 1, seed);
            for (a, b) in sobel_magnitude_raw(&img).iter().zip(&naive_sobel(&img)) {
                assert!((a - b).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn vertical_step_edge_maxima() {
        let mut img = Image::new(10, 6, 1, 0).unwrap();
        for y in 0..6 {
            for x in 5..10 {
                img.pixel_mut(x, y)[0] = 200;
            }
        }
        let m = saliency_gradient_magnitude(&img);
        for y in 0..6 {
            for x in 0..10 {
                let expected = if x == 4 || x == 5 { 1.0 } else { 0.0 };
                assert_eq!(m.get(x, y), expected, "({x},{y})");
            }
        }
    }

    #[test]
    fn normalized_extremes() {
        let img = random_image(13, 11, 3, 8);
        for m in [saliency_fine_grained(&img), saliency_gradient_magnitude(&img)] {
            let lo = m.values().iter().cloned().fold(f32::INFINITY, f32::min);
            let hi = m.values().iter().cloned().fold(f32::NEG_INFINITY, f32::max);
            assert_eq!((lo, hi), (0.0, 1.0));
        }
    }
}
