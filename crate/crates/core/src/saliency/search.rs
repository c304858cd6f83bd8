use super::{IntegralTable, SaliencyMap};
use crate::config::SaliencyProvider;
use crate::error::{Error, Result};
use crate::image::Rect;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SalientRegion {
    pub bbox: Rect,
    /// Raw saliency mass inside `bbox`.
    pub importance: f64,
    /// `importance` divided by the map's total mass.
    pub fraction: f64,
    pub provider: SaliencyProvider,
}

/// Window size for a side ratio: `max(1, round(ratio * side))`, capped at the side.
pub fn window_dims(ratio: f64, width: u32, height: u32) -> (u32, u32) {
    let side = |n: u32| ((ratio * n as f64).round() as u32).clamp(1, n);
    (side(width), side(height))
}

/// The `kw`×`kh` window with the largest mass. Ties keep the smallest `y`,
/// then the smallest `x`.
pub fn best_window(table: &IntegralTable, kw: u32, kh: u32) -> (Rect, f64) {
    let (w, h) = (table.width(), table.height());
    debug_assert!(kw >= 1 && kh >= 1 && kw <= w && kh <= h);
    let mut best = (Rect::new(0, 0, kw, kh), f64::NEG_INFINITY);
    for y in 0..=h - kh {
        for x in 0..=w - kw {
            let s = table.box_sum(x, y, x + kw, y + kh);
            if s > best.1 {
                best = (Rect::new(x, y, kw, kh), s);
            }
        }
    }
    best
}

fn check_params(window_ratio: f64, tau: f64, growth_step: f64) -> Result<()> {
    if !(window_ratio > 0.0 && window_ratio <= 1.0) {
        return Err(Error::validation(
            "window_ratio",
            format!("must be in (0, 1], got {window_ratio}"),
        ));
    }
    if !(tau > 0.0 && tau <= 1.0) {
        return Err(Error::validation("tau", format!("must be in (0, 1], got {tau}")));
    }
    if !(growth_step > 0.0 && growth_step.is_finite()) {
        return Err(Error::validation(
            "growth_step",
            format!("must be positive, got {growth_step}"),
        ));
    }
    Ok(())
}

/// Grows a fixed-aspect window from `window_ratio` in `growth_step`
/// increments until the best window holds at least `tau` of the total mass.
/// Returns `None` for maps with zero mass or when even the full image misses.
pub fn find_salient_region(
    map: &SaliencyMap,
    window_ratio: f64,
    tau: f64,
    growth_step: f64,
) -> Result<Option<SalientRegion>> {
    let table = IntegralTable::from_map(map);
    find_salient_region_in(&table, map.provider(), window_ratio, tau, growth_step)
}

pub fn find_salient_region_in(
    table: &IntegralTable,
    provider: SaliencyProvider,
    window_ratio: f64,
    tau: f64,
    growth_step: f64,
) -> Result<Option<SalientRegion>> {
    check_params(window_ratio, tau, growth_step)?;
    let total = table.total();
    if total.is_nan() || total <= 0.0 {
        return Ok(None);
    }
    let (w, h) = (table.width(), table.height());
    let mut step = 0u32;
    loop {
        let ratio = (window_ratio + step as f64 * growth_step).min(1.0);
        let (kw, kh) = window_dims(ratio, w, h);
        let (bbox, mass) = best_window(table, kw, kh);
        let fraction = (mass / total).clamp(0.0, 1.0);
        if fraction >= tau {
            return Ok(Some(SalientRegion {
                bbox,
                importance: mass,
                fraction,
                provider,
            }));
        }
        if kw == w && kh == h {
            return Ok(None);
        }
        step += 1;
    }
}
