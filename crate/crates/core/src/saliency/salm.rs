//! SALM saliency-map files.
//!
//! Layout (little-endian, no padding, no trailer):
//!
//! | bytes | content                     |
//! |-------|-----------------------------|
//! | 0..4  | magic `SALM`                |
//! | 4..8  | format version `u32` = 1    |
//! | 8..12 | width `u32`                 |
//! | 12..16| height `u32`                |
//! | 16..  | width·height `f32`, row-major |

use std::path::Path;

use super::SaliencyMap;
use crate::config::SaliencyProvider;
use crate::error::{Error, Result};

pub const SALM_MAGIC: &[u8; 4] = b"SALM";
pub const SALM_VERSION: u32 = 1;
const HEADER_LEN: usize = 16;

pub fn encode_salm(map: &SaliencyMap) -> Vec<u8> {
    let mut out = Vec::with_capacity(HEADER_LEN + map.values().len() * 4);
    out.extend_from_slice(SALM_MAGIC);
    out.extend_from_slice(&SALM_VERSION.to_le_bytes());
    out.extend_from_slice(&map.width().to_le_bytes());
    out.extend_from_slice(&map.height().to_le_bytes());
    for v in map.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

/// Parses SALM bytes. Values are clamped to `[0, 1]`; non-finite values are rejected.
pub fn decode_salm(bytes: &[u8], path: &Path) -> Result<SaliencyMap> {
    let u32_at = |off: usize| u32::from_le_bytes(bytes[off..off + 4].try_into().unwrap());
    if bytes.len() < HEADER_LEN {
        return Err(Error::format(
            path,
            format!("file is {} bytes, header needs {HEADER_LEN}", bytes.len()),
        ));
    }
    if &bytes[0..4] != SALM_MAGIC {
        return Err(Error::format(path, format!("bad magic {:?}", &bytes[0..4])));
    }
    let version = u32_at(4);
    if version != SALM_VERSION {
        return Err(Error::format(path, format!("unsupported version {version}")));
    }
    let (width, height) = (u32_at(8), u32_at(12));
    if width == 0 || height == 0 {
        return Err(Error::format(path, format!("zero dimension {width}x{height}")));
    }
    let count = width as usize * height as usize;
    let expected = HEADER_LEN + count * 4;
    if bytes.len() != expected {
        return Err(Error::format(
            path,
            format!("{width}x{height} map needs {expected} bytes, file has {}", bytes.len()),
        ));
    }
    let mut values = Vec::with_capacity(count);
    for (i, chunk) in bytes[HEADER_LEN..].chunks_exact(4).enumerate() {
        let v = f32::from_le_bytes(chunk.try_into().unwrap());
        if !v.is_finite() {
            return Err(Error::format(
                path,
                format!("non-finite value {v} at index {i} (byte offset {})", HEADER_LEN + i * 4),
            ));
        }
        values.push(v.clamp(0.0, 1.0));
    }
    SaliencyMap::new(width, height, values, SaliencyProvider::External)
}

pub fn write_salm(map: &SaliencyMap, path: &Path) -> Result<()> {
    std::fs::write(path, encode_salm(map)).map_err(|e| Error::io(path, e))
}

pub fn read_salm(path: &Path) -> Result<SaliencyMap> {
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    decode_salm(&bytes, path)
}

/// Loads a sidecar map and checks it against the image dimensions.
pub fn load_external_saliency(path: &Path, expected_dims: (u32, u32)) -> Result<SaliencyMap> {
    let map = read_salm(path)?;
    if (map.width(), map.height()) != expected_dims {
        return Err(Error::format(
            path,
            format!(
                "dimension mismatch: map is {}x{}, image is {}x{}",
                map.width(),
                map.height(),
                expected_dims.0,
                expected_dims.1
            ),
        ));
    }
    Ok(map)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> SaliencyMap {
        SaliencyMap::new(3, 2, vec![0.0, 0.25, 1.0, 0.125, 0.5, 0.75], SaliencyProvider::External).unwrap()
    }

    #[test]
    fn exact_layout() {
        let bytes = encode_salm(&sample());
        assert_eq!(&bytes[..4], b"SALM");
        assert_eq!(&bytes[4..8], &[1, 0, 0, 0]);
        assert_eq!(&bytes[8..12], &[3, 0, 0, 0]);
        assert_eq!(&bytes[12..16], &[2, 0, 0, 0]);
        assert_eq!(bytes.len(), 16 + 6 * 4);
        assert_eq!(&bytes[20..24], &0.25f32.to_le_bytes());
    }

    #[test]
    fn file_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.salm");
        write_salm(&sample(), &path).unwrap();
        let back = load_external_saliency(&path, (3, 2)).unwrap();
        assert_eq!(back.values(), sample().values());
    }

    #[test]
    fn dimension_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("m.salm");
        write_salm(&sample(), &path).unwrap();
        let err = load_external_saliency(&path, (4, 2)).unwrap_err();
        assert!(err.to_string().contains("dimension mismatch"), "{err}");
    }

    #[test]
    fn nan_rejected() {
        let mut bytes = encode_salm(&sample());
        bytes[16..20].copy_from_slice(&f32::NAN.to_le_bytes());
        let err = decode_salm(&bytes, Path::new("x.salm")).unwrap_err();
        assert!(err.to_string().contains("non-finite"), "{err}");
    }

    #[test]
    fn bad_magic_truncation_and_missing() {
        let mut bytes = encode_salm(&sample());
        bytes[0] = b'X';
        assert!(decode_salm(&bytes, Path::new("x"))
            .unwrap_err()
            .to_string()
            .contains("magic"));
        let bytes = encode_salm(&sample());
        assert!(decode_salm(&bytes[..bytes.len() - 1], Path::new("x")).is_err());
        assert!(matches!(
            load_external_saliency(Path::new("/nonexistent/x.salm"), (1, 1)),
            Err(Error::Io { .. })
        ));
    }

    #[test]
    fn out_of_range_values_clamped() {
        let mut bytes = encode_salm(&sample());
        bytes[16..20].copy_from_slice(&1.5f32.to_le_bytes());
        bytes[20..24].copy_from_slice(&(-0.5f32).to_le_bytes());
        let m = decode_salm(&bytes, Path::new("x")).unwrap();
        assert_eq!(&m.values()[..2], &[1.0, 0.0]);
    }
}
