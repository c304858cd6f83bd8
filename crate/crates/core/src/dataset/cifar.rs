//! CIFAR binary batches.
//!
//! Each record is the label byte(s) followed by 3072 pixel bytes: the red,
//! green and blue planes in turn, each 32×32 row-major. CIFAR-100 records
//! carry a coarse then a fine label.

use std::path::Path;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::image::Image;

pub const CIFAR_SIDE: u32 = 32;
const PLANE: usize = 1024;
const PIXELS: usize = 3 * PLANE;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CifarVariant {
    C10,
    C100,
}

impl CifarVariant {
    pub fn label_bytes(self) -> usize {
        match self {
            CifarVariant::C10 => 1,
            CifarVariant::C100 => 2,
        }
    }

    pub fn record_size(self) -> usize {
        self.label_bytes() + PIXELS
    }

    pub fn classes(self) -> u16 {
        match self {
            CifarVariant::C10 => 10,
            CifarVariant::C100 => 100,
        }
    }

    pub fn coarse_classes(self) -> Option<u16> {
        match self {
            CifarVariant::C10 => None,
            CifarVariant::C100 => Some(20),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CifarVariant::C10 => "cifar10",
            CifarVariant::C100 => "cifar100",
        }
    }
}

impl FromStr for CifarVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "10" | "c10" | "cifar10" => Ok(CifarVariant::C10),
            "100" | "c100" | "cifar100" => Ok(CifarVariant::C100),
            other => Err(format!("unknown CIFAR variant {other:?}; expected 10 or 100")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CifarRecord {
    /// Class label (the fine label for CIFAR-100).
    pub label: u8,
    /// CIFAR-100 coarse label.
    pub coarse_label: Option<u8>,
    pub image: Image,
}

pub fn decode_cifar(bytes: &[u8], variant: CifarVariant, path: &Path) -> Result<Vec<CifarRecord>> {
    let size = variant.record_size();
    if !bytes.len().is_multiple_of(size) {
        let offset = bytes.len() - bytes.len() % size;
        return Err(Error::format(
            path,
            format!(
                "length {} is not a multiple of the {size}-byte {} record; truncated record at byte offset {offset}",
                bytes.len(),
                variant.as_str()
            ),
        ));
    }
    let check = |label: u8, limit: u16, offset: usize, what: &str| {
        if label as u16 >= limit {
            Err(Error::format(
                path,
                format!("{what} {label} at byte offset {offset} is not below {limit}"),
            ))
        } else {
            Ok(())
        }
    };
    let mut records = Vec::with_capacity(bytes.len() / size);
    for (i, rec) in bytes.chunks_exact(size).enumerate() {
        let offset = i * size;
        let (coarse_label, label) = match variant {
            CifarVariant::C10 => (None, rec[0]),
            CifarVariant::C100 => {
                check(rec[0], 20, offset, "coarse label")?;
                (Some(rec[0]), rec[1])
            }
        };
        check(label, variant.classes(), offset + variant.label_bytes() - 1, "label")?;
        let planes = &rec[variant.label_bytes()..];
        let mut data = Vec::with_capacity(PIXELS);
        for p in 0..PLANE {
            data.extend_from_slice(&[planes[p], planes[PLANE + p], planes[2 * PLANE + p]]);
        }
        records.push(CifarRecord {
            label,
            coarse_label,
            image: Image::from_raw(CIFAR_SIDE, CIFAR_SIDE, 3, data)?,
        });
    }
    Ok(records)
}

pub fn read_cifar_batch(path: &Path, variant: CifarVariant) -> Result<Vec<CifarRecord>> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_cifar(&bytes, variant, path)
}

pub fn encode_cifar(records: &[CifarRecord], variant: CifarVariant) -> Result<Vec<u8>> {
    let mut out = Vec::with_capacity(records.len() * variant.record_size());
    for (i, r) in records.iter().enumerate() {
        let img = &r.image;
        if (img.width(), img.height(), img.channels()) != (CIFAR_SIDE, CIFAR_SIDE, 3) {
            return Err(Error::validation(
                "image",
                format!(
                    "record {i} is {}x{}x{}, CIFAR needs 32x32x3",
                    img.width(),
                    img.height(),
                    img.channels()
                ),
            ));
        }
        if r.label as u16 >= variant.classes() {
            return Err(Error::validation(
                "label",
                format!("record {i} has label {} >= {}", r.label, variant.classes()),
            ));
        }
        match (variant, r.coarse_label) {
            (CifarVariant::C10, _) => {}
            (CifarVariant::C100, Some(c)) if c < 20 => out.push(c),
            (CifarVariant::C100, c) => {
                return Err(Error::validation(
                    "coarse_label",
                    format!("record {i} needs a coarse label below 20, got {c:?}"),
                ))
            }
        }
        out.push(r.label);
        for ch in 0..3 {
            out.extend(img.data().iter().skip(ch).step_by(3));
        }
    }
    Ok(out)
}

pub fn write_cifar_batch(records: &[CifarRecord], path: &Path, variant: CifarVariant) -> Result<()> {
    let bytes = encode_cifar(records, variant)?;
    std::fs::write(path, bytes).map_err(|e| Error::io(path, e))
}
