//! Pixel buffers and integer rectangles.
//!
//! Every transform in the crate works on [`Image`]: an 8-bit, row-major,
//! channel-interleaved buffer with one (gray) or three (RGB) channels.
//! Arithmetic that produces non-integer samples goes through [`round_sample`]
//! so rounding is identical everywhere: nearest, ties away from zero, then
//! clamped to `[0, 255]`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// Rounds to nearest (ties away from zero) and clamps to the 8-bit range.
#[inline]
pub fn round_sample(v: f64) -> u8 {
    // f64::round rounds half away from zero; NaN casts to 0.
    v.round().clamp(0.0, 255.0) as u8
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Image {
    width: u32,
    height: u32,
    channels: u8,
    data: Vec<u8>,
}

impl std::fmt::Debug for Image {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Image")
            .field("width", &self.width)
            .field("height", &self.height)
            .field("channels", &self.channels)
            .finish_non_exhaustive()
    }
}

fn check_dims(width: u32, height: u32, channels: u8) -> Result<()> {
    if width == 0 {
        return Err(Error::validation("width", "must be at least 1"));
    }
    if height == 0 {
        return Err(Error::validation("height", "must be at least 1"));
    }
    if channels != 1 && channels != 3 {
        return Err(Error::validation("channels", format!("must be 1 or 3, got {channels}")));
    }
    Ok(())
}

impl Image {
    /// Creates an image with every sample set to `fill`.
    pub fn new(width: u32, height: u32, channels: u8, fill: u8) -> Result<Self> {
        check_dims(width, height, channels)?;
        let len = width as usize * height as usize * channels as usize;
        Ok(Image {
            width,
            height,
            channels,
            data: vec![fill; len],
        })
    }

    pub fn from_raw(width: u32, height: u32, channels: u8, data: Vec<u8>) -> Result<Self> {
        check_dims(width, height, channels)?;
        let expected = width as usize * height as usize * channels as usize;
        if data.len() != expected {
            return Err(Error::validation(
                "data",
                format!("expected {expected} samples, got {}", data.len()),
            ));
        }
        Ok(Image {
            width,
            height,
            channels,
            data,
        })
    }

    #[inline]
    pub fn width(&self) -> u32 {
        self.width
    }

    #[inline]
    pub fn height(&self) -> u32 {
        self.height
    }

    #[inline]
    pub fn channels(&self) -> u8 {
        self.channels
    }

    #[inline]
    pub fn data(&self) -> &[u8] {
        &self.data
    }

    #[inline]
    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    pub fn into_raw(self) -> Vec<u8> {
        self.data
    }

    /// Rect covering the whole image.
    pub fn bounds(&self) -> Rect {
        Rect::new(0, 0, self.width, self.height)
    }

    #[inline]
    pub fn index(&self, x: u32, y: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels as usize
    }

    #[inline]
    pub fn pixel(&self, x: u32, y: u32) -> &[u8] {
        let i = self.index(x, y);
        &self.data[i..i + self.channels as usize]
    }

    #[inline]
    pub fn pixel_mut(&mut self, x: u32, y: u32) -> &mut [u8] {
        let i = self.index(x, y);
        let c = self.channels as usize;
        &mut self.data[i..i + c]
    }

    /// Number of samples per row.
    #[inline]
    pub fn stride(&self) -> usize {
        self.width as usize * self.channels as usize
    }

    /// Sets every sample inside `r` to `value`. `r` is clipped to the image.
    pub fn fill_rect(&mut self, r: Rect, value: u8) {
        let Some(r) = r.intersection(&self.bounds()) else {
            return;
        };
        let c = self.channels as usize;
        for y in r.y..r.bottom() {
            let start = self.index(r.x, y);
            self.data[start..start + r.w as usize * c].fill(value);
        }
    }

    /// Copies a single-channel image into three identical channels; RGB is cloned.
    pub fn to_rgb(&self) -> Image {
        if self.channels == 3 {
            return self.clone();
        }
        let data = self.data.iter().flat_map(|&v| [v, v, v]).collect();
        Image {
            width: self.width,
            height: self.height,
            channels: 3,
            data,
        }
    }
}

/// Axis-aligned integer rectangle: columns `[x, x+w)`, rows `[y, y+h)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x: u32,
    pub y: u32,
    pub w: u32,
    pub h: u32,
}

impl Rect {
    pub const fn new(x: u32, y: u32, w: u32, h: u32) -> Self {
        Rect { x, y, w, h }
    }

    #[inline]
    pub fn right(&self) -> u32 {
        self.x + self.w
    }

    #[inline]
    pub fn bottom(&self) -> u32 {
        self.y + self.h
    }

    #[inline]
    pub fn area(&self) -> u64 {
        self.w as u64 * self.h as u64
    }

    pub fn is_empty(&self) -> bool {
        self.w == 0 || self.h == 0
    }

    #[inline]
    pub fn contains(&self, px: u32, py: u32) -> bool {
        px >= self.x && px < self.right() && py >= self.y && py < self.bottom()
    }

    /// True when the rect lies within a `width`×`height` image.
    pub fn fits(&self, width: u32, height: u32) -> bool {
        (self.x as u64 + self.w as u64) <= width as u64 && (self.y as u64 + self.h as u64) <= height as u64
    }

    pub fn intersection(&self, other: &Rect) -> Option<Rect> {
        let x0 = self.x.max(other.x);
        let y0 = self.y.max(other.y);
        let x1 = self.right().min(other.right());
        let y1 = self.bottom().min(other.bottom());
        (x1 > x0 && y1 > y0).then(|| Rect::new(x0, y0, x1 - x0, y1 - y0))
    }

    pub fn intersects(&self, other: &Rect) -> bool {
        self.intersection(other).is_some()
    }
}

impl Serialize for Rect {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        [self.x, self.y, self.w, self.h].serialize(s)
    }
}

impl<'de> Deserialize<'de> for Rect {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let [x, y, w, h] = <[u32; 4]>::deserialize(d)?;
        Ok(Rect::new(x, y, w, h))
    }
}

fn check_in_bounds(img: &Image, r: Rect, what: &str) -> Result<()> {
    if r.is_empty() {
        return Err(Error::Geometry(format!("{what} rect {r:?} has zero area")));
    }
    if !r.fits(img.width, img.height) {
        return Err(Error::Geometry(format!(
            "{what} rect {r:?} exceeds {}x{} image",
            img.width, img.height
        )));
    }
    Ok(())
}

pub fn new_image(width: u32, height: u32, channels: u8, fill: u8) -> Result<Image> {
    Image::new(width, height, channels, fill)
}

pub fn crop(img: &Image, r: Rect) -> Result<Image> {
    check_in_bounds(img, r, "crop")?;
    let row_len = r.w as usize * img.channels as usize;
    let mut data = Vec::with_capacity(row_len * r.h as usize);
    for y in r.y..r.bottom() {
        let start = img.index(r.x, y);
        data.extend_from_slice(&img.data[start..start + row_len]);
    }
    Image::from_raw(r.w, r.h, img.channels, data)
}

/// Returns a copy of `dst` with `src` written over the `at` rectangle.
pub fn paste(dst: &Image, src: &Image, at: Rect) -> Result<Image> {
    let mut out = dst.clone();
    paste_in_place(&mut out, src, at)?;
    Ok(out)
}

pub fn paste_in_place(dst: &mut Image, src: &Image, at: Rect) -> Result<()> {
    if at.w != src.width || at.h != src.height {
        return Err(Error::Geometry(format!(
            "paste target {at:?} does not match source size {}x{}",
            src.width, src.height
        )));
    }
    if dst.channels != src.channels {
        return Err(Error::Geometry(format!(
            "channel mismatch: destination has {}, source has {}",
            dst.channels, src.channels
        )));
    }
    check_in_bounds(dst, at, "paste")?;
    let row_len = src.stride();
    for row in 0..at.h {
        let d = dst.index(at.x, at.y + row);
        let s = row as usize * row_len;
        dst.data[d..d + row_len].copy_from_slice(&src.data[s..s + row_len]);
    }
    Ok(())
}

/// Bilinear resampling with half-pixel centers. Source coordinates are
/// clamped to the edge, so no fill value is involved.
pub fn resize_bilinear(img: &Image, new_w: u32, new_h: u32) -> Result<Image> {
    if new_w == 0 || new_h == 0 {
        return Err(Error::Geometry(format!(
            "resize target {new_w}x{new_h} has a zero dimension"
        )));
    }
    if new_w == img.width && new_h == img.height {
        return Ok(img.clone());
    }
    let taps_x = axis_taps(img.width, new_w);
    let taps_y = axis_taps(img.height, new_h);
    let c = img.channels as usize;
    let mut data = Vec::with_capacity(new_w as usize * new_h as usize * c);
    for &(y0, y1, fy) in &taps_y {
        for &(x0, x1, fx) in &taps_x {
            let p00 = img.pixel(x0, y0);
            let p10 = img.pixel(x1, y0);
            let p01 = img.pixel(x0, y1);
            let p11 = img.pixel(x1, y1);
            for ch in 0..c {
                let top = p00[ch] as f64 * (1.0 - fx) + p10[ch] as f64 * fx;
                let bottom = p01[ch] as f64 * (1.0 - fx) + p11[ch] as f64 * fx;
                data.push(round_sample(top * (1.0 - fy) + bottom * fy));
            }
        }
    }
    Image::from_raw(new_w, new_h, img.channels, data)
}

fn axis_taps(src_len: u32, dst_len: u32) -> Vec<(u32, u32, f64)> {
    let max = (src_len - 1) as f64;
    // (i + 0.5) * src / dst - 0.5 as one integer ratio, so it rounds once.
    let den = 2.0 * dst_len as f64;
    (0..dst_len)
        .map(|i| {
            let num = (2 * i as u64 + 1) as f64 * src_len as f64 - dst_len as f64;
            let s = (num / den).clamp(0.0, max);
            let i0 = s.floor() as u32;
            let i1 = (i0 + 1).min(src_len - 1);
            (i0, i1, s - i0 as f64)
        })
        .collect()
}

/// BT.601 luma weights used for every grayscale conversion.
pub const LUMA_WEIGHTS: [f64; 3] = [0.299, 0.587, 0.114];

#[inline]
pub fn luma(r: u8, g: u8, b: u8) -> u8 {
    round_sample(LUMA_WEIGHTS[0] * r as f64 + LUMA_WEIGHTS[1] * g as f64 + LUMA_WEIGHTS[2] * b as f64)
}

pub fn to_grayscale(img: &Image) -> Image {
    if img.channels == 1 {
        return img.clone();
    }
    let data = img.data.chunks_exact(3).map(|p| luma(p[0], p[1], p[2])).collect();
    Image {
        width: img.width,
        height: img.height,
        channels: 1,
        data,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn seq_image(w: u32, h: u32, c: u8) -> Image {
        let n = (w * h * c as u32) as usize;
        Image::from_raw(w, h, c, (0..n).map(|i| (i % 251) as u8).collect()).unwrap()
    }

    #[test]
    fn new_image_fills() {
        let img = new_image(2, 2, 1, 0).unwrap();
        assert_eq!(img.data(), &[0; 4]);
        let img = new_image(1, 1, 3, 255).unwrap();
        assert_eq!(img.data(), &[255; 3]);
    }

    #[test]
    fn new_image_rejects_bad_dims() {
        assert!(matches!(
            new_image(0, 4, 3, 0),
            Err(Error::Validation { field, .. }) if field == "width"
        ));
        assert!(new_image(4, 0, 1, 0).is_err());
        assert!(matches!(
            new_image(4, 4, 4, 0),
            Err(Error::Validation { field, .. }) if field == "channels"
        ));
    }

    #[test]
    fn crop_full_is_identity() {
        let img = seq_image(5, 3, 3);
        assert_eq!(crop(&img, img.bounds()).unwrap(), img);
    }

    #[test]
    fn crop_row_major() {
        let img = Image::from_raw(4, 4, 1, (0..16).collect()).unwrap();
        let c = crop(&img, Rect::new(1, 1, 2, 2)).unwrap();
        assert_eq!(c.data(), &[5, 6, 9, 10]);
    }

    #[test]
    fn crop_out_of_bounds() {
        let img = seq_image(4, 4, 1);
        assert!(matches!(crop(&img, Rect::new(3, 0, 2, 1)), Err(Error::Geometry(_))));
        assert!(matches!(crop(&img, Rect::new(0, 0, 0, 1)), Err(Error::Geometry(_))));
    }

    #[test]
    fn paste_full_replaces() {
        let dst = new_image(3, 2, 3, 9).unwrap();
        let src = seq_image(3, 2, 3);
        assert_eq!(paste(&dst, &src, dst.bounds()).unwrap(), src);
    }

    #[test]
    fn paste_single_pixel_changes_channel_samples() {
        let dst = new_image(3, 3, 3, 0).unwrap();
        let src = new_image(1, 1, 3, 200).unwrap();
        let out = paste(&dst, &src, Rect::new(1, 1, 1, 1)).unwrap();
        let changed = out.data().iter().zip(dst.data()).filter(|(a, b)| a != b).count();
        assert_eq!(changed, 3);
    }

    #[test]
    fn paste_mismatch_errors() {
        let dst = new_image(4, 4, 3, 0).unwrap();
        let gray = new_image(2, 2, 1, 0).unwrap();
        assert!(paste(&dst, &gray, Rect::new(0, 0, 2, 2)).is_err());
        let rgb = new_image(2, 2, 3, 0).unwrap();
        assert!(paste(&dst, &rgb, Rect::new(0, 0, 3, 2)).is_err());
        assert!(paste(&dst, &rgb, Rect::new(3, 3, 2, 2)).is_err());
    }

    #[test]
    fn resize_same_size_identity() {
        let img = seq_image(7, 5, 3);
        assert_eq!(resize_bilinear(&img, 7, 5).unwrap(), img);
    }

    #[test]
    fn resize_zero_target_errors() {
        let img = seq_image(2, 2, 1);
        assert!(matches!(resize_bilinear(&img, 0, 3), Err(Error::Geometry(_))));
    }

    #[test]
    fn resize_2x2_to_4x4_reference() {
        // Hand-derived with half-pixel centers: source coordinates per axis are
        // (-0.25 -> 0, 0.25, 0.75, 1.25 -> 1).
        let img = Image::from_raw(2, 2, 1, vec![0, 100, 100, 200]).unwrap();
        let out = resize_bilinear(&img, 4, 4).unwrap();
        #[rustfmt::skip]
        let expected = [
            0, 25, 75, 100,
            25, 50, 100, 125,
            75, 100, 150, 175,
            100, 125, 175, 200,
        ];
        assert_eq!(out.data(), &expected);
    }

    #[test]
    fn grayscale_examples() {
        let g = seq_image(3, 3, 1);
        assert_eq!(to_grayscale(&g), g);
        let white = new_image(1, 1, 3, 255).unwrap();
        assert_eq!(to_grayscale(&white).data(), &[255]);
        let red = Image::from_raw(1, 1, 3, vec![255, 0, 0]).unwrap();
        assert_eq!(to_grayscale(&red).data(), &[76]);
    }

    #[test]
    fn rounding_ties_away_from_zero() {
        assert_eq!(round_sample(2.5), 3);
        assert_eq!(round_sample(-0.5), 0);
        assert_eq!(round_sample(300.0), 255);
        assert_eq!(round_sample(f64::NAN), 0);
    }

    fn arb_image(max: u32) -> impl Strategy<Value = Image> {
        (1..=max, 1..=max, prop_oneof![Just(1u8), Just(3u8)]).prop_flat_map(|(w, h, c)| {
            proptest::collection::vec(any::<u8>(), (w * h * c as u32) as usize)
                .prop_map(move |data| Image::from_raw(w, h, c, data).unwrap())
        })
    }

    fn arb_rect_in(w: u32, h: u32) -> impl Strategy<Value = Rect> {
        (0..w, 0..h)
            .prop_flat_map(move |(x, y)| (1..=w - x, 1..=h - y).prop_map(move |(rw, rh)| Rect::new(x, y, rw, rh)))
    }

    proptest! {
        #[test]
        fn crop_matches_pixel_loop(
            (img, r) in arb_image(16).prop_flat_map(|img| {
                let rs = arb_rect_in(img.width(), img.height());
                (Just(img), rs)
            })
        ) {
            let out = crop(&img, r).unwrap();
            let c = img.channels() as usize;
            let mut expected = Vec::new();
            for j in 0..r.h {
                for i in 0..r.w {
                    let base = ((r.y + j) * img.width() + r.x + i) as usize * c;
                    expected.extend_from_slice(&img.data()[base..base + c]);
                }
            }
            prop_assert_eq!(out.data(), &expected[..]);
        }

        #[test]
        fn paste_matches_pixel_loop_and_round_trips(
            (dst, src, r) in arb_image(16).prop_flat_map(|dst| {
                let c = dst.channels();
                let rs = arb_rect_in(dst.width(), dst.height());
                (Just(dst), rs).prop_flat_map(move |(dst, r)| {
                    let src = proptest::collection::vec(any::<u8>(), (r.w * r.h * c as u32) as usize)
                        .prop_map(move |d| Image::from_raw(r.w, r.h, c, d).unwrap());
                    (Just(dst), src, Just(r))
                })
            })
        ) {
            let out = paste(&dst, &src, r).unwrap();
            let c = dst.channels() as usize;
            for y in 0..dst.height() {
                for x in 0..dst.width() {
                    let o = (y * dst.width() + x) as usize * c;
                    let want = if r.contains(x, y) {
                        let s = ((y - r.y) * r.w + (x - r.x)) as usize * c;
                        &src.data()[s..s + c]
                    } else {
                        &dst.data()[o..o + c]
                    };
                    prop_assert_eq!(&out.data()[o..o + c], want);
                }
            }
            prop_assert_eq!(crop(&out, r).unwrap(), src);
            let changed = out.data().iter().zip(dst.data()).filter(|(a, b)| a != b).count();
            prop_assert!(changed as u64 <= r.area() * c as u64);
        }

        #[test]
        fn resize_preserves_constant(v in any::<u8>(), w in 1u32..9, h in 1u32..9, nw in 1u32..20, nh in 1u32..20) {
            let img = new_image(w, h, 3, v).unwrap();
            let out = resize_bilinear(&img, nw, nh).unwrap();
            prop_assert!(out.data().iter().all(|&s| s == v));
            prop_assert_eq!((out.width(), out.height()), (nw, nh));
        }
    }
}
