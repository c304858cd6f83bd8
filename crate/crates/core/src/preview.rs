//! Contact sheets for visual inspection.
//!
//! Each row shows one input: original, saliency heatmap, the original with
//! the salient box (red) and destination cell (green) outlined, then one or
//! more augmented variants. Previews force `keep_prob = 0` so every variant
//! shows an augmentation. Variant 0 uses the image's regular stream; later
//! variants use streams keyed by `seed ^ mix64(k)`.

use crate::composer::{augment, AugmentPlan};
use crate::config::{PipelineConfig, SaliencyProvider};
use crate::error::{Error, Result};
use crate::image::{paste_in_place, Image, Rect};
use crate::rng::{mix64, RngStream};
use crate::saliency::{compute_saliency, SaliencyMap};

pub const GUTTER: u32 = 2;
pub const BACKGROUND: u8 = 255;
pub const BBOX_COLOR: [u8; 3] = [255, 0, 0];
pub const DEST_COLOR: [u8; 3] = [0, 255, 0];
/// Panels before the augmented variants.
pub const FIXED_PANELS: usize = 3;

pub struct PreviewEntry {
    pub index: u64,
    pub image: Image,
    /// Sidecar map, required when the provider is `external`.
    pub saliency: Option<SaliencyMap>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreviewRow {
    pub index: u64,
    pub plan: AugmentPlan,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PreviewLayout {
    pub rows: usize,
    pub cols: usize,
    pub cell_w: u32,
    pub cell_h: u32,
    pub sheet_w: u32,
    pub sheet_h: u32,
    /// One per filled row; rows past the end are blank.
    pub filled: Vec<PreviewRow>,
}

impl PreviewLayout {
    /// Top-left corner of a cell in sheet coordinates.
    pub fn cell_origin(&self, row: usize, col: usize) -> (u32, u32) {
        (
            GUTTER + col as u32 * (self.cell_w + GUTTER),
            GUTTER + row as u32 * (self.cell_h + GUTTER),
        )
    }
}

/// `rows` distinct corpus indices drawn from the seed, ascending; all of
/// them when the corpus is smaller.
pub fn sample_indices(count: usize, rows: usize, seed: u64) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..count).collect();
    if rows < count {
        let mut rng = RngStream::new(seed, u64::MAX);
        for i in 0..rows {
            let j = i + rng.below((count - i) as u64) as usize;
            idx.swap(i, j);
        }
        idx.truncate(rows);
        idx.sort_unstable();
    }
    idx
}

/// Pixels on the one-pixel border of `r`.
pub fn on_perimeter(r: Rect, x: u32, y: u32) -> bool {
    r.contains(x, y) && (x == r.x || y == r.y || x + 1 == r.right() || y + 1 == r.bottom())
}

fn outline(img: &mut Image, r: Rect, color: [u8; 3]) {
    for y in r.y..r.bottom() {
        for x in r.x..r.right() {
            if on_perimeter(r, x, y) {
                img.pixel_mut(x, y).copy_from_slice(&color);
            }
        }
    }
}

pub fn render_preview(
    entries: &[PreviewEntry],
    cfg: &PipelineConfig,
    rows: usize,
    cols: usize,
) -> Result<(Image, PreviewLayout)> {
    if rows == 0 || cols == 0 {
        return Err(Error::validation("grid", "rows and columns must be at least 1"));
    }
    let cfg = PipelineConfig {
        keep_prob: 0.0,
        ..cfg.clone()
    };
    let shown = &entries[..entries.len().min(rows)];
    let cell_w = shown.iter().map(|e| e.image.width()).max().unwrap_or(1);
    let cell_h = shown.iter().map(|e| e.image.height()).max().unwrap_or(1);
    let sheet_w = cols as u32 * (cell_w + GUTTER) + GUTTER;
    let sheet_h = rows as u32 * (cell_h + GUTTER) + GUTTER;
    let mut sheet = Image::new(sheet_w, sheet_h, 3, BACKGROUND)?;
    let mut layout = PreviewLayout {
        rows,
        cols,
        cell_w,
        cell_h,
        sheet_w,
        sheet_h,
        filled: Vec::new(),
    };

    for (r, e) in shown.iter().enumerate() {
        let original = e.image.to_rgb();
        let computed;
        let map = match cfg.saliency_provider {
            SaliencyProvider::External => e.saliency.as_ref().ok_or_else(|| {
                Error::validation(
                    "saliency_provider",
                    format!("image {} has no external saliency map", e.index),
                )
            })?,
            p => {
                computed = compute_saliency(&e.image, p)?;
                &computed
            }
        };
        let variants = cols.saturating_sub(FIXED_PANELS).max(1);
        let mut augmented = Vec::with_capacity(variants);
        let mut plan0 = None;
        for k in 0..variants {
            let mut rng = if k == 0 {
                RngStream::new(cfg.seed, e.index)
            } else {
                RngStream::new(cfg.seed ^ mix64(k as u64), e.index)
            };
            let (out, plan) = augment(&e.image, &cfg, &mut rng, e.saliency.as_ref())?;
            augmented.push(out.to_rgb());
            plan0.get_or_insert(plan);
        }
        let plan = plan0.expect("at least one variant");
        let mut outlined = original.clone();
        if let Some(b) = plan.salient_bbox {
            outline(&mut outlined, b, BBOX_COLOR);
        }
        if let Some(d) = plan.dest_cell {
            outline(&mut outlined, d, DEST_COLOR);
        }
        let panels = [original, map.to_heatmap().to_rgb(), outlined]
            .into_iter()
            .chain(augmented);
        for (c, panel) in panels.take(cols).enumerate() {
            let (x, y) = layout.cell_origin(r, c);
            paste_in_place(&mut sheet, &panel, Rect::new(x, y, panel.width(), panel.height()))?;
        }
        layout.filled.push(PreviewRow { index: e.index, plan });
    }
    Ok((sheet, layout))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::synthetic_image;

    fn entry(i: u64) -> PreviewEntry {
        PreviewEntry {
            index: i,
            image: synthetic_image(3, i, 32, 32, 3),
            saliency: None,
        }
    }

    #[test]
    fn single_row_layout() {
        let (sheet, layout) = render_preview(&[entry(0)], &PipelineConfig::default(), 1, 4).unwrap();
        assert_eq!(sheet.width(), 4 * 32 + 5 * GUTTER);
        assert_eq!(sheet.height(), 32 + 2 * GUTTER);
        assert_eq!(layout.filled.len(), 1);
        let (x, y) = layout.cell_origin(0, 0);
        assert_eq!(sheet.pixel(x, y), entry(0).image.pixel(0, 0));
    }

    #[test]
    fn deterministic() {
        let a = render_preview(&[entry(0), entry(1)], &PipelineConfig::default(), 2, 5).unwrap();
        let b = render_preview(&[entry(0), entry(1)], &PipelineConfig::default(), 2, 5).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn outlines_lie_on_perimeters() {
        for i in 0..5 {
            let e = entry(i);
            let (sheet, layout) = render_preview(std::slice::from_ref(&e), &PipelineConfig::default(), 1, 4).unwrap();
            let plan = &layout.filled[0].plan;
            let (bbox, dest) = (plan.salient_bbox.unwrap(), plan.dest_cell.unwrap());
            let (ox, oy) = layout.cell_origin(0, 2);
            for y in 0..32 {
                for x in 0..32 {
                    let got = sheet.pixel(ox + x, oy + y);
                    if on_perimeter(bbox, x, y) {
                        assert_eq!(got, BBOX_COLOR);
                    } else if on_perimeter(dest, x, y) {
                        assert_eq!(got, DEST_COLOR);
                    } else {
                        assert_eq!(got, e.image.pixel(x, y));
                    }
                }
            }
        }
    }

    #[test]
    fn blank_rows_and_sampling() {
        let (sheet, layout) = render_preview(&[entry(0)], &PipelineConfig::default(), 3, 4).unwrap();
        let (x, y) = layout.cell_origin(2, 0);
        assert!(crate::image::crop(&sheet, Rect::new(x, y, 32, 32))
            .unwrap()
            .data()
            .iter()
            .all(|&v| v == BACKGROUND));
        assert_eq!(sample_indices(3, 5, 0), vec![0, 1, 2]);
        let s = sample_indices(100, 4, 7);
        assert_eq!(s, sample_indices(100, 4, 7));
        assert_eq!(s.len(), 4);
        assert!(s.windows(2).all(|w| w[0] < w[1]));
    }
}
