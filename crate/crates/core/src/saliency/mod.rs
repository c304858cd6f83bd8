//! Saliency maps, region importance and salient-window search.

mod integral;
mod providers;
mod salm;
mod search;

pub use integral::{importance, IntegralTable};
pub use providers::{
    center_surround_raw, saliency_fine_grained, saliency_gradient_magnitude, sobel_magnitude_raw, SURROUND_RADII,
};
pub use salm::{decode_salm, encode_salm, load_external_saliency, read_salm, write_salm, SALM_MAGIC, SALM_VERSION};
pub use search::{best_window, find_salient_region, find_salient_region_in, window_dims, SalientRegion};

use crate::config::SaliencyProvider;
use crate::error::{Error, Result};
use crate::image::{round_sample, Image};

/// Row-major saliency scores in `[0, 1]`.
#[derive(Clone, Debug, PartialEq)]
pub struct SaliencyMap {
    width: u32,
    height: u32,
    values: Vec<f32>,
    provider: SaliencyProvider,
}

impl SaliencyMap {
    /// Wraps already-normalized values. Rejects non-finite or out-of-range scores.
    pub fn new(width: u32, height: u32, values: Vec<f32>, provider: SaliencyProvider) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::validation("saliency map", "dimensions must be at least 1"));
        }
        if values.len() != width as usize * height as usize {
            return Err(Error::validation(
                "saliency map",
                format!(
                    "expected {} values, got {}",
                    width as usize * height as usize,
                    values.len()
                ),
            ));
        }
        if let Some(i) = values.iter().position(|v| !(0.0..=1.0).contains(v)) {
            return Err(Error::validation(
                "saliency map",
                format!("value {} at index {i} outside [0, 1]", values[i]),
            ));
        }
        Ok(SaliencyMap {
            width,
            height,
            values,
            provider,
        })
    }

    /// Min-max normalizes raw scores. A constant input yields an all-zero map.
    pub fn from_raw(width: u32, height: u32, raw: &[f64], provider: SaliencyProvider) -> Self {
        assert_eq!(raw.len(), width as usize * height as usize);
        let (lo, hi) = raw.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        let values = if hi > lo {
            let span = hi - lo;
            raw.iter().map(|&v| ((v - lo) / span) as f32).collect()
        } else {
            vec![0.0; raw.len()]
        };
        SaliencyMap {
            width,
            height,
            values,
            provider,
        }
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn provider(&self) -> SaliencyProvider {
        self.provider
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> f32 {
        self.values[y as usize * self.width as usize + x as usize]
    }

    /// Index of the largest score (first one in row-major order on ties).
    pub fn argmax(&self) -> (u32, u32) {
        let mut best = 0;
        for (i, &v) in self.values.iter().enumerate() {
            if v > self.values[best] {
                best = i;
            }
        }
        (best as u32 % self.width, best as u32 / self.width)
    }

    /// 8-bit rendering, `round(value * 255)` per pixel.
    pub fn to_heatmap(&self) -> Image {
        let data = self.values.iter().map(|&v| round_sample(v as f64 * 255.0)).collect();
        Image::from_raw(self.width, self.height, 1, data).expect("map dimensions are valid")
    }
}

/// Runs a built-in provider. `External` maps are loaded from files, never computed.
pub fn compute_saliency(img: &Image, provider: SaliencyProvider) -> Result<SaliencyMap> {
    match provider {
        SaliencyProvider::FineGrained => Ok(saliency_fine_grained(img)),
        SaliencyProvider::GradientMagnitude => Ok(saliency_gradient_magnitude(img)),
        SaliencyProvider::External => Err(Error::validation(
            "saliency_provider",
            "external saliency must be supplied as a SALM sidecar",
        )),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalization_spans_unit_interval() {
        let m = SaliencyMap::from_raw(3, 1, &[2.0, 4.0, 3.0], SaliencyProvider::External);
        assert_eq!(m.values(), &[0.0, 1.0, 0.5]);
        let flat = SaliencyMap::from_raw(2, 1, &[7.0, 7.0], SaliencyProvider::External);
        assert_eq!(flat.values(), &[0.0, 0.0]);
    }

    #[test]
    fn new_rejects_out_of_range() {
        assert!(SaliencyMap::new(2, 1, vec![0.0, 1.5], SaliencyProvider::External).is_err());
        assert!(SaliencyMap::new(2, 1, vec![0.0, f32::NAN], SaliencyProvider::External).is_err());
        assert!(SaliencyMap::new(2, 2, vec![0.0], SaliencyProvider::External).is_err());
    }

    #[test]
    fn heatmap_quantizes() {
        let m = SaliencyMap::new(3, 1, vec![0.0, 0.5, 1.0], SaliencyProvider::External).unwrap();
        assert_eq!(m.to_heatmap().data(), &[0, 128, 255]);
    }
}
