use super::SaliencyMap;
use crate::error::{Error, Result};
use crate::image::Rect;

/// Summed-area table with a zero first row and column:
/// `entry(x, y)` is the sum of all values at columns `< x` and rows `< y`.
#[derive(Clone, Debug)]
pub struct IntegralTable {
    width: u32,
    height: u32,
    sums: Vec<f64>,
}

impl IntegralTable {
    pub fn from_values<I>(width: u32, height: u32, values: I) -> Self
    where
        I: IntoIterator<Item = f64>,
    {
        let stride = width as usize + 1;
        let mut sums = vec![0.0; stride * (height as usize + 1)];
        let mut it = values.into_iter();
        for y in 0..height as usize {
            let mut row = 0.0;
            for x in 0..width as usize {
                row += it.next().expect("value count matches dimensions");
                sums[(y + 1) * stride + x + 1] = sums[y * stride + x + 1] + row;
            }
        }
        IntegralTable { width, height, sums }
    }

    pub fn from_map(map: &SaliencyMap) -> Self {
        Self::from_values(map.width(), map.height(), map.values().iter().map(|&v| v as f64))
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn entry(&self, x: u32, y: u32) -> f64 {
        self.sums[y as usize * (self.width as usize + 1) + x as usize]
    }

    pub fn total(&self) -> f64 {
        self.entry(self.width, self.height)
    }

    /// Sum over the half-open box `[x0, x1) × [y0, y1)`; callers guarantee bounds.
    #[inline]
    pub fn box_sum(&self, x0: u32, y0: u32, x1: u32, y1: u32) -> f64 {
        self.entry(x1, y1) - self.entry(x0, y1) - self.entry(x1, y0) + self.entry(x0, y0)
    }

    pub fn sum(&self, r: Rect) -> Result<f64> {
        if !r.fits(self.width, self.height) {
            return Err(Error::Geometry(format!(
                "rect {r:?} exceeds {}x{} map",
                self.width, self.height
            )));
        }
        Ok(self.box_sum(r.x, r.y, r.right(), r.bottom()))
    }
}

/// Total saliency inside `r`.
pub fn importance(table: &IntegralTable, r: Rect) -> Result<f64> {
    table.sum(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::SaliencyProvider;
    use crate::rng::RngStream;

    fn random_map(w: u32, h: u32, seed: u64) -> SaliencyMap {
        let mut rng = RngStream::new(seed, 0);
        let vals = (0..w * h).map(|_| rng.next_f64() as f32).collect();
        SaliencyMap::new(w, h, vals, SaliencyProvider::External).unwrap()
    }

    fn brute(map: &SaliencyMap, r: Rect) -> f64 {
        let mut s = 0.0;
        for y in r.y..r.bottom() {
            for x in r.x..r.right() {
                s += map.get(x, y) as f64;
            }
        }
        s
    }

    #[test]
    fn uniform_half() {
        let map = SaliencyMap::new(4, 4, vec![0.5; 16], SaliencyProvider::External).unwrap();
        let t = IntegralTable::from_map(&map);
        assert_eq!(importance(&t, Rect::new(1, 1, 2, 2)).unwrap(), 2.0);
    }

    #[test]
    fn borders_zero_and_total() {
        let map = random_map(6, 5, 1);
        let t = IntegralTable::from_map(&map);
        for x in 0..=6 {
            assert_eq!(t.entry(x, 0), 0.0);
        }
        for y in 0..=5 {
            assert_eq!(t.entry(0, y), 0.0);
        }
        let full = importance(&t, Rect::new(0, 0, 6, 5)).unwrap();
        assert_eq!(full, t.total());
        assert!((t.total() - brute(&map, Rect::new(0, 0, 6, 5))).abs() < 1e-9);
    }

    #[test]
    fn matches_brute_force_on_random_rects() {
        let map = random_map(8, 8, 2);
        let t = IntegralTable::from_map(&map);
        let mut rng = RngStream::new(2, 1);
        for _ in 0..50 {
            let x = rng.below(8) as u32;
            let y = rng.below(8) as u32;
            let w = 1 + rng.below((8 - x) as u64) as u32;
            let h = 1 + rng.below((8 - y) as u64) as u32;
            let r = Rect::new(x, y, w, h);
            assert!((importance(&t, r).unwrap() - brute(&map, r)).abs() <= 1e-9);
        }
    }

    #[test]
    fn additive_over_splits() {
        let map = random_map(10, 7, 3);
        let t = IntegralTable::from_map(&map);
        let whole = Rect::new(1, 2, 8, 5);
        for split in 1..8 {
            let a = Rect::new(1, 2, split, 5);
            let b = Rect::new(1 + split, 2, 8 - split, 5);
            let lhs = importance(&t, a).unwrap() + importance(&t, b).unwrap();
            assert!((lhs - importance(&t, whole).unwrap()).abs() <= 1e-9);
        }
    }

    #[test]
    fn out_of_bounds_errors() {
        let t = IntegralTable::from_map(&random_map(4, 4, 4));
        assert!(matches!(importance(&t, Rect::new(2, 2, 3, 1)), Err(Error::Geometry(_))));
    }
}
