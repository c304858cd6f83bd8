use crate::config::PlacementStrategy;
use crate::error::{Error, Result};
use crate::image::Rect;
use crate::rng::RngStream;

/// Cell names in partition order.
pub const CELL_NAMES: [&str; 8] = [
    "top_left",
    "top",
    "top_right",
    "left",
    "right",
    "bottom_left",
    "bottom",
    "bottom_right",
];

/// All eight non-center cells of the 3×3 partition induced by `bbox`'s row
/// and column bands, zero-area cells included, in row-major order.
pub fn partition_cells(dims: (u32, u32), bbox: Rect) -> Result<[Rect; 8]> {
    let (w, h) = dims;
    if bbox.is_empty() || !bbox.fits(w, h) {
        return Err(Error::Geometry(format!(
            "bbox {bbox:?} is not a valid rect in a {w}x{h} image"
        )));
    }
    let cols = [(0, bbox.x), (bbox.x, bbox.w), (bbox.right(), w - bbox.right())];
    let rows = [(0, bbox.y), (bbox.y, bbox.h), (bbox.bottom(), h - bbox.bottom())];
    let cell = |c: usize, r: usize| Rect::new(cols[c].0, rows[r].0, cols[c].1, rows[r].1);
    Ok([
        cell(0, 0),
        cell(1, 0),
        cell(2, 0),
        cell(0, 1),
        cell(2, 1),
        cell(0, 2),
        cell(1, 2),
        cell(2, 2),
    ])
}

/// Placement candidates around `bbox`: [`partition_cells`] without the
/// zero-area cells. Empty when `bbox` covers the whole image.
pub fn eight_regions(dims: (u32, u32), bbox: Rect) -> Result<Vec<Rect>> {
    Ok(partition_cells(dims, bbox)?
        .into_iter()
        .filter(|c| !c.is_empty())
        .collect())
}

/// Picks a destination cell. Area ties go to the earliest cell; `RandomArea`
/// draws one index uniformly.
pub fn choose_destination(cells: &[Rect], strategy: PlacementStrategy, rng: &mut RngStream) -> Result<Rect> {
    if cells.is_empty() {
        return Err(Error::NoPlacement);
    }
    let pick_by = |better: fn(u64, u64) -> bool| {
        let mut best = cells[0];
        for &c in &cells[1..] {
            if better(c.area(), best.area()) {
                best = c;
            }
        }
        best
    };
    Ok(match strategy {
        PlacementStrategy::MinArea => pick_by(|a, b| a < b),
        PlacementStrategy::MaxArea => pick_by(|a, b| a > b),
        PlacementStrategy::RandomArea => cells[rng.below(cells.len() as u64) as usize],
    })
}
