//! Seeded synthetic images for benchmarks and tests.

use crate::image::Image;
use crate::rng::RngStream;

/// Smooth two-color gradient with a textured object at a random position.
/// The object carries most of the contrast, so saliency has a clear peak.
/// Deterministic in `(seed, index)`.
pub fn synthetic_image(seed: u64, index: u64, width: u32, height: u32, channels: u8) -> Image {
    let mut rng = RngStream::new(seed, index);
    let base: Vec<f64> = (0..channels).map(|_| rng.uniform(40.0, 200.0)).collect();
    let slope: Vec<f64> = (0..channels).map(|_| rng.uniform(-1.0, 1.0)).collect();
    let ow = 1 + rng.below((width / 3).max(1) as u64) as u32;
    let oh = 1 + rng.below((height / 3).max(1) as u64) as u32;
    let ox = rng.below((width - ow + 1) as u64) as u32;
    let oy = rng.below((height - oh + 1) as u64) as u32;
    let mut data = Vec::with_capacity(width as usize * height as usize * channels as usize);
    for y in 0..height {
        for x in 0..width {
            let inside = x >= ox && x < ox + ow && y >= oy && y < oy + oh;
            for c in 0..channels as usize {
                let v = if inside {
                    rng.below(256) as f64
                } else {
                    base[c] + slope[c] * (x + y) as f64 * 32.0 / (width + height) as f64
                };
                data.push(v.round().clamp(0.0, 255.0) as u8);
            }
        }
    }
    Image::from_raw(width, height, channels, data).expect("dimensions are valid")
}

/// Image with uniformly random samples.
pub fn noise_image(seed: u64, index: u64, width: u32, height: u32, channels: u8) -> Image {
    let mut rng = RngStream::new(seed, index);
    let n = width as usize * height as usize * channels as usize;
    Image::from_raw(width, height, channels, (0..n).map(|_| rng.below(256) as u8).collect())
        .expect("dimensions are valid")
}
