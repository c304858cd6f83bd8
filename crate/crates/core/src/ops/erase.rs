//! Information-erasing baselines: Cutout, Random Erasing, GridMask and
//! Hide-and-Seek. All erasures write [`FILL`] except Random Erasing, which
//! writes uniformly random samples.

use super::FILL;
use crate::config::PipelineConfig;
use crate::error::{Error, Result};
use crate::image::{Image, Rect};
use crate::rng::RngStream;

const MAX_ATTEMPTS: u32 = 100;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandomErasingParams {
    /// Erased area as a fraction of the image, drawn uniformly from this range.
    pub area: (f64, f64),
    /// Height / width ratio, drawn uniformly from this range.
    pub aspect: (f64, f64),
}

impl RandomErasingParams {
    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.area;
        if !(lo > 0.0 && lo <= hi && hi < 1.0) {
            return Err(Error::validation(
                "erase area",
                format!("need 0 < lo <= hi < 1, got ({lo}, {hi})"),
            ));
        }
        let (lo, hi) = self.aspect;
        if !(lo > 0.0 && lo <= hi && hi.is_finite()) {
            return Err(Error::validation(
                "erase aspect",
                format!("need 0 < lo <= hi, got ({lo}, {hi})"),
            ));
        }
        Ok(())
    }
}

/// Parameter bundle for all erasing methods.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EraseParams {
    pub cutout_size: f64,
    pub random_erasing: RandomErasingParams,
    pub grid_unit: (u32, u32),
    pub grid_ratio: f64,
    pub hide_grid: u32,
    pub hide_prob: f64,
}

impl EraseParams {
    pub fn from_config(cfg: &PipelineConfig) -> Self {
        EraseParams {
            cutout_size: cfg.cutout_size,
            random_erasing: RandomErasingParams {
                area: (cfg.erase_area_min, cfg.erase_area_max),
                aspect: (cfg.erase_aspect_min, cfg.erase_aspect_max),
            },
            grid_unit: (cfg.grid_unit_min, cfg.grid_unit_max),
            grid_ratio: cfg.grid_ratio,
            hide_grid: cfg.hide_grid,
            hide_prob: cfg.hide_prob,
        }
    }
}

/// Clips the half-open span `[start, start + len)` (signed) to `[0, limit)`.
fn clip_span(start: i64, len: i64, limit: u32) -> Option<(u32, u32)> {
    let a = start.max(0);
    let b = (start + len).min(limit as i64);
    (b > a).then(|| (a as u32, (b - a) as u32))
}

/// Fills `mask` with [`FILL`] except where it overlaps `exclude`.
pub fn fill_excluding(img: &mut Image, mask: Rect, exclude: Option<Rect>) {
    match exclude.and_then(|ex| ex.intersection(&mask)) {
        None => img.fill_rect(mask, FILL),
        Some(ex) => {
            let c = img.channels() as usize;
            for y in mask.y..mask.bottom() {
                for x in mask.x..mask.right() {
                    if !ex.contains(x, y) {
                        let i = img.index(x, y);
                        img.data_mut()[i..i + c].fill(FILL);
                    }
                }
            }
        }
    }
}

/// Square of side `round(size_frac · min(W, H))` centered on a uniformly
/// drawn pixel and clipped to the image. With `exclude`, the center is
/// re-drawn up to 100 times until the square misses `exclude`; whatever
/// still overlaps is left untouched. Returns the (image-clipped) square.
pub fn cutout(img: &Image, size_frac: f64, rng: &mut RngStream, exclude: Option<Rect>) -> (Image, Option<Rect>) {
    let side = (size_frac * img.width().min(img.height()) as f64).round() as i64;
    if side <= 0 {
        return (img.clone(), None);
    }
    let mut draw = || {
        let cx = rng.below(img.width() as u64) as i64;
        let cy = rng.below(img.height() as u64) as i64;
        let (x, w) = clip_span(cx - side / 2, side, img.width()).expect("center lies inside");
        let (y, h) = clip_span(cy - side / 2, side, img.height()).expect("center lies inside");
        Rect::new(x, y, w, h)
    };
    let mut mask = draw();
    if let Some(ex) = exclude {
        let mut attempts = 1;
        while mask.intersects(&ex) && attempts < MAX_ATTEMPTS {
            mask = draw();
            attempts += 1;
        }
    }
    let mut out = img.clone();
    fill_excluding(&mut out, mask, exclude);
    (out, Some(mask))
}

/// Rectangle of uniformly drawn area fraction and aspect, at a uniformly
/// drawn position that keeps it inside the image, filled with random
/// samples. Gives up (no-op) after 100 draws that do not fit.
pub fn random_erasing(img: &Image, params: &RandomErasingParams, rng: &mut RngStream) -> (Image, Option<Rect>) {
    let (w, h) = (img.width(), img.height());
    let area = (w as f64) * (h as f64);
    for _ in 0..MAX_ATTEMPTS {
        let target = rng.uniform(params.area.0, params.area.1) * area;
        let aspect = rng.uniform(params.aspect.0, params.aspect.1);
        let eh = (target * aspect).sqrt().round() as u32;
        let ew = (target / aspect).sqrt().round() as u32;
        if ew == 0 || eh == 0 || ew > w || eh > h {
            continue;
        }
        let x = rng.below((w - ew + 1) as u64) as u32;
        let y = rng.below((h - eh + 1) as u64) as u32;
        let mask = Rect::new(x, y, ew, eh);
        let mut out = img.clone();
        let c = img.channels() as usize;
        for yy in mask.y..mask.bottom() {
            let start = out.index(mask.x, yy);
            for v in &mut out.data_mut()[start..start + ew as usize * c] {
                *v = rng.below(256) as u8;
            }
        }
        return (out, Some(mask));
    }
    (img.clone(), None)
}

/// Unit `d` drawn from `unit_range` (capped at the longer side), offsets
/// `(ox, oy)` drawn from `[0, d)`. Tiles start at `o + k·d`; the square of
/// side `round(ratio · d)` at each tile's top-left corner is erased.
pub fn gridmask(img: &Image, unit_range: (u32, u32), ratio: f64, rng: &mut RngStream) -> Image {
    let longest = img.width().max(img.height());
    let lo = unit_range.0.clamp(1, longest);
    let hi = unit_range.1.clamp(lo, longest);
    let d = rng.range_inclusive(lo, hi);
    let ox = rng.below(d as u64) as u32;
    let oy = rng.below(d as u64) as u32;
    let mut out = img.clone();
    for r in grid_squares(img.width(), img.height(), d, ox, oy, ratio) {
        out.fill_rect(r, FILL);
    }
    out
}

/// Erased squares of a grid (clipped to the image).
pub fn grid_squares(width: u32, height: u32, d: u32, ox: u32, oy: u32, ratio: f64) -> Vec<Rect> {
    let side = (ratio * d as f64).round() as i64;
    if side <= 0 {
        return Vec::new();
    }
    let starts = |offset: u32, limit: u32| {
        let mut s = offset as i64 - d as i64;
        let mut v = Vec::new();
        while s < limit as i64 {
            v.push(s);
            s += d as i64;
        }
        v
    };
    let mut out = Vec::new();
    for sy in starts(oy, height) {
        for sx in starts(ox, width) {
            if let (Some((x, w)), Some((y, h))) = (clip_span(sx, side, width), clip_span(sy, side, height)) {
                out.push(Rect::new(x, y, w, h));
            }
        }
    }
    out
}

/// Cells of a `grid_div`×`grid_div` partition; the last row and column absorb
/// the remainder. Row-major order.
pub fn hide_cells(width: u32, height: u32, grid_div: u32) -> Vec<Rect> {
    let cw = width / grid_div;
    let ch = height / grid_div;
    let mut cells = Vec::with_capacity((grid_div * grid_div) as usize);
    for j in 0..grid_div {
        for i in 0..grid_div {
            let w = if i + 1 == grid_div { width - cw * i } else { cw };
            let h = if j + 1 == grid_div { height - ch * j } else { ch };
            cells.push(Rect::new(i * cw, j * ch, w, h));
        }
    }
    cells
}

/// Erases each cell independently when a uniform draw falls below `hide_prob`.
pub fn hide_and_seek(img: &Image, grid_div: u32, hide_prob: f64, rng: &mut RngStream) -> Result<Image> {
    if grid_div == 0 || grid_div > img.width().min(img.height()) {
        return Err(Error::validation(
            "hide_grid",
            format!(
                "must be in [1, {}] for a {}x{} image, got {grid_div}",
                img.width().min(img.height()),
                img.width(),
                img.height()
            ),
        ));
    }
    let mut out = img.clone();
    for cell in hide_cells(img.width(), img.height(), grid_div) {
        if rng.next_f64() < hide_prob {
            out.fill_rect(cell, FILL);
        }
    }
    Ok(out)
}
