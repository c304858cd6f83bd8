//! Augmentation operations.
//!
//! [`rand_augment`] draws ops uniformly from the 14-kind vocabulary of
//! [`OpKind`] and applies them at a shared magnitude `m ∈ [0, 30]`. Every
//! parameter is linear in `m / 30`:
//!
//! | kind | parameter |
//! |------|-----------|
//! | rotate | ±(m/30)·30° about the image center |
//! | shear_x / shear_y | ±(m/30)·0.3, about the image center |
//! | translate_x / translate_y | ±(m/30)·0.33·side pixels |
//! | solarize | invert samples ≥ 255 − (m/30)·255 |
//! | posterize | keep 8 − round((m/30)·4) high bits |
//! | color / contrast / brightness / sharpness | blend factor 1 ± (m/30)·0.9 |
//! | identity / auto_contrast / equalize | magnitude ignored |
//!
//! Signed kinds draw their sign from the stream at apply time. Geometric ops
//! sample bilinearly and use [`FILL`] for area exposed outside the source.
//!
//! The erasing baselines live in [`erase`].

pub mod erase;
mod kernels;

use std::fmt;
use std::str::FromStr;

use serde::de::{self, SeqAccess, Visitor};
use serde::ser::SerializeTuple;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::image::Image;
use crate::rng::RngStream;

pub use erase::{cutout, gridmask, hide_and_seek, random_erasing, EraseParams, RandomErasingParams};

/// Sample value written into erased and exposed areas.
pub const FILL: u8 = 128;

pub const MAX_MAGNITUDE: f64 = 30.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OpKind {
    Identity,
    AutoContrast,
    Equalize,
    Rotate,
    Solarize,
    Color,
    Posterize,
    Contrast,
    Brightness,
    Sharpness,
    ShearX,
    ShearY,
    TranslateX,
    TranslateY,
}

impl OpKind {
    /// Draw order of [`rand_augment`]; indices are part of the replay contract.
    pub const ALL: [OpKind; 14] = [
        OpKind::Identity,
        OpKind::AutoContrast,
        OpKind::Equalize,
        OpKind::Rotate,
        OpKind::Solarize,
        OpKind::Color,
        OpKind::Posterize,
        OpKind::Contrast,
        OpKind::Brightness,
        OpKind::Sharpness,
        OpKind::ShearX,
        OpKind::ShearY,
        OpKind::TranslateX,
        OpKind::TranslateY,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            OpKind::Identity => "identity",
            OpKind::AutoContrast => "auto_contrast",
            OpKind::Equalize => "equalize",
            OpKind::Rotate => "rotate",
            OpKind::Solarize => "solarize",
            OpKind::Color => "color",
            OpKind::Posterize => "posterize",
            OpKind::Contrast => "contrast",
            OpKind::Brightness => "brightness",
            OpKind::Sharpness => "sharpness",
            OpKind::ShearX => "shear_x",
            OpKind::ShearY => "shear_y",
            OpKind::TranslateX => "translate_x",
            OpKind::TranslateY => "translate_y",
        }
    }

    /// Kinds whose direction is drawn from the stream.
    pub fn is_signed(self) -> bool {
        matches!(
            self,
            OpKind::Rotate
                | OpKind::ShearX
                | OpKind::ShearY
                | OpKind::TranslateX
                | OpKind::TranslateY
                | OpKind::Color
                | OpKind::Contrast
                | OpKind::Brightness
                | OpKind::Sharpness
        )
    }

    pub fn is_geometric(self) -> bool {
        matches!(
            self,
            OpKind::Rotate | OpKind::ShearX | OpKind::ShearY | OpKind::TranslateX | OpKind::TranslateY
        )
    }
}

impl FromStr for OpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        OpKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::validation("op kind", format!("unknown kind {s:?}")))
    }
}

impl fmt::Display for OpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl Serialize for OpKind {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.as_str())
    }
}

impl<'de> Deserialize<'de> for OpKind {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(de::Error::custom)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AugmentOp {
    pub kind: OpKind,
}

impl AugmentOp {
    pub fn new(kind: OpKind) -> Self {
        AugmentOp { kind }
    }

    pub fn signed(&self) -> bool {
        self.kind.is_signed()
    }
}

/// One entry of an op log: kind, magnitude and the drawn sign
/// (`±1` for signed kinds, `0` otherwise). Serialized as `[kind, m, sign]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AppliedOp {
    pub kind: OpKind,
    pub magnitude: f64,
    pub sign: i8,
}

impl Serialize for AppliedOp {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut t = s.serialize_tuple(3)?;
        t.serialize_element(&self.kind)?;
        t.serialize_element(&self.magnitude)?;
        t.serialize_element(&self.sign)?;
        t.end()
    }
}

impl<'de> Deserialize<'de> for AppliedOp {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = AppliedOp;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a [kind, magnitude, sign] triple")
            }
            fn visit_seq<A: SeqAccess<'de>>(self, mut seq: A) -> std::result::Result<AppliedOp, A::Error> {
                let kind = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(0, &self))?;
                let magnitude = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(1, &self))?;
                let sign = seq.next_element()?.ok_or_else(|| de::Error::invalid_length(2, &self))?;
                if seq.next_element::<de::IgnoredAny>()?.is_some() {
                    return Err(de::Error::invalid_length(4, &self));
                }
                Ok(AppliedOp { kind, magnitude, sign })
            }
        }
        d.deserialize_tuple(3, V)
    }
}

/// RandAugment policy: `n` ops per application at magnitude `m`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RandPolicy {
    pub n: u32,
    pub m: f64,
}

impl RandPolicy {
    pub fn new(n: u32, m: f64) -> Result<Self> {
        check_magnitude(m)?;
        Ok(RandPolicy { n, m })
    }
}

fn check_magnitude(m: f64) -> Result<()> {
    if (0.0..=MAX_MAGNITUDE).contains(&m) {
        Ok(())
    } else {
        Err(Error::validation("magnitude", format!("must be in [0, 30], got {m}")))
    }
}

/// Applies one op, drawing its sign from `rng` when the kind is signed.
pub fn apply_op(img: &Image, op: AugmentOp, m: f64, rng: &mut RngStream) -> Result<(Image, AppliedOp)> {
    check_magnitude(m)?;
    let sign = if op.signed() { rng.sign() } else { 0 };
    let applied = AppliedOp {
        kind: op.kind,
        magnitude: m,
        sign,
    };
    Ok((apply_logged(img, &applied), applied))
}

/// Deterministic application of an already-drawn op.
pub fn apply_logged(img: &Image, op: &AppliedOp) -> Image {
    let t = op.magnitude / MAX_MAGNITUDE;
    let s = if op.sign < 0 { -1.0 } else { 1.0 };
    let blend = 1.0 + s * t * 0.9;
    match op.kind {
        OpKind::Identity => img.clone(),
        OpKind::AutoContrast => kernels::auto_contrast(img),
        OpKind::Equalize => kernels::equalize(img),
        OpKind::Rotate => kernels::rotate(img, s * t * 30.0),
        OpKind::Solarize => kernels::solarize(img, 255.0 - t * 255.0),
        OpKind::Posterize => kernels::posterize(img, 8 - (t * 4.0).round() as u32),
        OpKind::Color => kernels::color(img, blend),
        OpKind::Contrast => kernels::contrast(img, blend),
        OpKind::Brightness => kernels::brightness(img, blend),
        OpKind::Sharpness => kernels::sharpness(img, blend),
        OpKind::ShearX => kernels::shear(img, s * t * 0.3, true),
        OpKind::ShearY => kernels::shear(img, s * t * 0.3, false),
        OpKind::TranslateX => kernels::translate(img, s * t * 0.33 * img.width() as f64, 0.0),
        OpKind::TranslateY => kernels::translate(img, 0.0, s * t * 0.33 * img.height() as f64),
    }
}

/// Replays an op log in order.
pub fn apply_log(img: &Image, log: &[AppliedOp]) -> Image {
    log.iter().fold(img.clone(), |acc, op| apply_logged(&acc, op))
}

/// Draws `policy.n` kinds uniformly with replacement and applies them in turn.
pub fn rand_augment(img: &Image, policy: RandPolicy, rng: &mut RngStream) -> (Image, Vec<AppliedOp>) {
    let mut out = img.clone();
    let mut log = Vec::with_capacity(policy.n as usize);
    for _ in 0..policy.n {
        let kind = OpKind::ALL[rng.below(OpKind::ALL.len() as u64) as usize];
        let sign = if kind.is_signed() { rng.sign() } else { 0 };
        let op = AppliedOp {
            kind,
            magnitude: policy.m,
            sign,
        };
        out = apply_logged(&out, &op);
        log.push(op);
    }
    (out, log)
}
