//! PNG and JPEG files.
//!
//! Decoding keeps grayscale sources single-channel and converts everything
//! else to RGB. Alpha is dropped, palettes are expanded, and 16-bit samples
//! are scaled to 8 bits (`round(v / 257)`).

use std::io::Cursor;
use std::path::Path;
use std::str::FromStr;

use image::codecs::jpeg::JpegEncoder;
use image::codecs::png::PngEncoder;
use image::{DynamicImage, ExtendedColorType, ImageEncoder, ImageReader};

use crate::error::{Error, Result};
use crate::image::Image;

pub const JPEG_QUALITY: u8 = 95;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ImageFormat {
    Png,
    Jpeg,
}

impl ImageFormat {
    pub fn extension(self) -> &'static str {
        match self {
            ImageFormat::Png => "png",
            ImageFormat::Jpeg => "jpg",
        }
    }
}

impl FromStr for ImageFormat {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "png" => Ok(ImageFormat::Png),
            "jpg" | "jpeg" => Ok(ImageFormat::Jpeg),
            other => Err(format!("unsupported image format {other:?}")),
        }
    }
}

fn from_dynamic(img: DynamicImage) -> Result<Image> {
    let (w, h) = (img.width(), img.height());
    if img.color().has_color() {
        Image::from_raw(w, h, 3, img.into_rgb8().into_raw())
    } else {
        Image::from_raw(w, h, 1, img.into_luma8().into_raw())
    }
}

pub fn decode_image(bytes: &[u8], path: &Path) -> Result<Image> {
    let reader = ImageReader::new(Cursor::new(bytes))
        .with_guessed_format()
        .map_err(|e| Error::format(path, e.to_string()))?;
    let decoded = reader.decode().map_err(|e| Error::format(path, e.to_string()))?;
    from_dynamic(decoded).map_err(|e| Error::format(path, e.to_string()))
}

pub fn read_image_file(path: &Path) -> Result<Image> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_image(&bytes, path)
}

fn color_type(img: &Image) -> ExtendedColorType {
    if img.channels() == 1 {
        ExtendedColorType::L8
    } else {
        ExtendedColorType::Rgb8
    }
}

pub fn encode_image(img: &Image, format: ImageFormat) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    let res = match format {
        ImageFormat::Png => {
            PngEncoder::new(&mut out).write_image(img.data(), img.width(), img.height(), color_type(img))
        }
        ImageFormat::Jpeg => JpegEncoder::new_with_quality(&mut out, JPEG_QUALITY).write_image(
            img.data(),
            img.width(),
            img.height(),
            color_type(img),
        ),
    };
    res.map_err(|e| Error::validation("image", format!("encoding failed: {e}")))?;
    Ok(out)
}

pub fn write_image_file(img: &Image, path: &Path, format: ImageFormat) -> Result<()> {
    let bytes = encode_image(img, format)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::noise_image;

    #[test]
    fn png_round_trip_is_lossless() {
        let dir = tempfile::tempdir().unwrap();
        for c in [1, 3] {
            let img = noise_image(1, c as u64, 13, 9, c);
            let path = dir.path().join(format!("x{c}.png"));
            write_image_file(&img, &path, ImageFormat::Png).unwrap();
            assert_eq!(read_image_file(&path).unwrap(), img);
        }
    }

    #[test]
    fn jpeg_round_trip_is_close() {
        let img = Image::new(16, 16, 3, 100).unwrap();
        let bytes = encode_image(&img, ImageFormat::Jpeg).unwrap();
        let back = decode_image(&bytes, Path::new("x.jpg")).unwrap();
        assert!(back.data().iter().all(|&v| v.abs_diff(100) <= 2));
    }

    #[test]
    fn sixteen_bit_and_alpha_are_converted() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("g16.png");
        let buf = image::ImageBuffer::<image::Luma<u16>, _>::from_raw(2, 1, vec![0u16, 65535]).unwrap();
        buf.save(&path).unwrap();
        let img = read_image_file(&path).unwrap();
        assert_eq!((img.channels(), img.data()), (1, &[0u8, 255][..]));

        let path = dir.path().join("rgba.png");
        let buf = image::RgbaImage::from_raw(1, 1, vec![10, 20, 30, 0]).unwrap();
        buf.save(&path).unwrap();
        assert_eq!(read_image_file(&path).unwrap().data(), &[10, 20, 30]);
    }

    #[test]
    fn corrupt_file_names_path() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.png");
        std::fs::write(&path, b"\x89PNG\r\n\x1a\nnot really").unwrap();
        let err = read_image_file(&path).unwrap_err();
        assert!(matches!(err, Error::Format { .. }));
        assert!(err.to_string().contains("bad.png"), "{err}");
    }
}
