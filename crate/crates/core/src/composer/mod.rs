//! Salient-region relocation and the single-image baselines.
//!
//! Per image, in draw order: the keep gate `u < keep_prob` (every method),
//! then the destination cell (`random_area` only), then the whole-image
//! augmentation, then the salient-crop augmentation. Saliency is always
//! computed on the original image. When no salient window reaches `tau`, or
//! the window leaves no surrounding cell, the image gets plain RandAugment.

mod regions;
mod replay;

use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use crate::config::{AugTarget, Method, PipelineConfig, PlacementStrategy, SaliencyProvider};
use crate::error::{Error, Result};
use crate::image::{crop, paste_in_place, resize_bilinear, Image, Rect};
use crate::ops::{cutout, gridmask, hide_and_seek, rand_augment, random_erasing, AppliedOp, EraseParams, RandPolicy};
use crate::rng::RngStream;
use crate::saliency::{compute_saliency, find_salient_region_in, IntegralTable, SaliencyMap, SalientRegion};

pub use regions::{choose_destination, eight_regions, partition_cells, CELL_NAMES};
pub use replay::replay_plan;

/// Everything needed to reproduce one image's output. Field order is the
/// manifest column order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AugmentPlan {
    pub image_index: u64,
    /// Per-image stream key (see [`RngStream::from_key`]).
    pub seed: u64,
    /// False when the keep gate returned the original.
    pub applied: bool,
    pub method: Method,
    pub placement: PlacementStrategy,
    pub aug_target: AugTarget,
    pub salient_bbox: Option<Rect>,
    pub dest_cell: Option<Rect>,
    pub op_log_whole: Vec<AppliedOp>,
    pub op_log_salient: Vec<AppliedOp>,
    pub saliency_provider: SaliencyProvider,
    pub tau: f64,
    /// Mass fraction inside `salient_bbox`; 0 when no window was accepted.
    pub fraction_achieved: f64,
    /// Erased rectangle of cutout-style steps.
    pub erase_mask: Option<Rect>,
}

impl AugmentPlan {
    /// Plan of an image that was returned untouched.
    pub fn kept(cfg: &PipelineConfig, rng: &RngStream) -> Self {
        AugmentPlan {
            image_index: rng.index(),
            seed: rng.key(),
            applied: false,
            method: cfg.method,
            placement: cfg.placement,
            aug_target: cfg.aug_target,
            salient_bbox: None,
            dest_cell: None,
            op_log_whole: Vec::new(),
            op_log_salient: Vec::new(),
            saliency_provider: cfg.saliency_provider,
            tau: cfg.tau,
            fraction_achieved: 0.0,
            erase_mask: None,
        }
    }
}

/// Accumulated wall time per pipeline stage.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct StageTimings {
    pub saliency: Duration,
    pub search: Duration,
    pub ops: Duration,
    pub compose: Duration,
}

impl StageTimings {
    pub fn total(&self) -> Duration {
        self.saliency + self.search + self.ops + self.compose
    }
}

impl std::ops::AddAssign for StageTimings {
    fn add_assign(&mut self, o: Self) {
        self.saliency += o.saliency;
        self.search += o.search;
        self.ops += o.ops;
        self.compose += o.compose;
    }
}

fn timed<T>(slot: &mut Duration, f: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = f();
    *slot += start.elapsed();
    out
}

/// Runs `cfg.method` on one image. `external` is the sidecar map used when
/// the provider is `external`; it is ignored otherwise.
pub fn augment(
    img: &Image,
    cfg: &PipelineConfig,
    rng: &mut RngStream,
    external: Option<&SaliencyMap>,
) -> Result<(Image, AugmentPlan)> {
    augment_timed(img, cfg, rng, external, &mut StageTimings::default())
}

pub fn augment_timed(
    img: &Image,
    cfg: &PipelineConfig,
    rng: &mut RngStream,
    external: Option<&SaliencyMap>,
    t: &mut StageTimings,
) -> Result<(Image, AugmentPlan)> {
    let mut plan = AugmentPlan::kept(cfg, rng);
    if rng.next_f64() < cfg.keep_prob {
        return Ok((img.clone(), plan));
    }
    plan.applied = true;
    let mut run = Run {
        img,
        cfg,
        rng,
        external,
        t,
        plan: &mut plan,
    };
    let out = match cfg.method {
        Method::None => img.clone(),
        Method::KeepOriginal => run.relocate(false)?,
        Method::KeepOriginalCutout => run.relocate(true)?,
        Method::KeepAugment => run.keep_augment()?,
        Method::SalfMix => run.salfmix()?,
        Method::Cutout | Method::RandomErasing | Method::GridMask | Method::HideAndSeek => run.erase()?,
    };
    Ok((out, plan))
}

/// Proposed method with the configured placement and target strategies.
pub fn keep_original_augment(img: &Image, cfg: &PipelineConfig, rng: &mut RngStream) -> Result<(Image, AugmentPlan)> {
    with_method(img, cfg, rng, Method::KeepOriginal)
}

/// Proposed method with salient-excluding cutout as the whole-image step.
pub fn keep_original_cutout(img: &Image, cfg: &PipelineConfig, rng: &mut RngStream) -> Result<(Image, AugmentPlan)> {
    with_method(img, cfg, rng, Method::KeepOriginalCutout)
}

/// Whole-image RandAugment with the original salient crop restored in place.
pub fn keep_augment_baseline(img: &Image, cfg: &PipelineConfig, rng: &mut RngStream) -> Result<(Image, AugmentPlan)> {
    with_method(img, cfg, rng, Method::KeepAugment)
}

/// Original salient crop copied into the least salient surrounding cell.
/// An approximation of SalfMix: its exact destination rule is not reproduced.
pub fn salfmix_baseline(img: &Image, cfg: &PipelineConfig, rng: &mut RngStream) -> Result<(Image, AugmentPlan)> {
    with_method(img, cfg, rng, Method::SalfMix)
}

fn with_method(img: &Image, cfg: &PipelineConfig, rng: &mut RngStream, method: Method) -> Result<(Image, AugmentPlan)> {
    let cfg = PipelineConfig { method, ..cfg.clone() };
    augment(img, &cfg, rng, None)
}

struct Run<'a> {
    img: &'a Image,
    cfg: &'a PipelineConfig,
    rng: &'a mut RngStream,
    external: Option<&'a SaliencyMap>,
    t: &'a mut StageTimings,
    plan: &'a mut AugmentPlan,
}

impl Run<'_> {
    fn policy(&self) -> Result<RandPolicy> {
        RandPolicy::new(self.cfg.rand_n, self.cfg.rand_m)
    }

    fn locate(&mut self) -> Result<(Option<SalientRegion>, IntegralTable)> {
        let (w, h) = (self.img.width(), self.img.height());
        let computed;
        let map = match self.cfg.saliency_provider {
            SaliencyProvider::External => {
                let map = self.external.ok_or_else(|| {
                    Error::validation(
                        "saliency_provider",
                        "external provider selected but no saliency map supplied",
                    )
                })?;
                if (map.width(), map.height()) != (w, h) {
                    return Err(Error::Geometry(format!(
                        "external saliency map is {}x{}, image is {w}x{h}",
                        map.width(),
                        map.height()
                    )));
                }
                map
            }
            provider => {
                computed = timed(&mut self.t.saliency, || compute_saliency(self.img, provider))?;
                &computed
            }
        };
        let cfg = self.cfg;
        timed(&mut self.t.search, || {
            let table = IntegralTable::from_map(map);
            let found = find_salient_region_in(&table, map.provider(), cfg.window_ratio, cfg.tau, cfg.growth_step)?;
            Ok((found, table))
        })
    }

    fn record(&mut self, region: &SalientRegion) {
        self.plan.salient_bbox = Some(region.bbox);
        self.plan.fraction_achieved = region.fraction;
    }

    /// Plain RandAugment of the whole image.
    fn fallback(&mut self) -> Result<Image> {
        let policy = self.policy()?;
        let (out, log) = timed(&mut self.t.ops, || rand_augment(self.img, policy, self.rng));
        self.plan.op_log_whole = log;
        Ok(out)
    }

    fn relocate(&mut self, cutout_whole: bool) -> Result<Image> {
        let Some(region) = self.locate()?.0 else {
            return self.fallback();
        };
        self.record(&region);
        let bbox = region.bbox;
        let cells = eight_regions((self.img.width(), self.img.height()), bbox)?;
        let dest = match choose_destination(&cells, self.cfg.placement, self.rng) {
            Ok(d) => d,
            Err(Error::NoPlacement) => return self.fallback(),
            Err(e) => return Err(e),
        };
        self.plan.dest_cell = Some(dest);
        let img = self.img;
        let (original_crop, resized) = timed(&mut self.t.compose, || -> Result<_> {
            let c = crop(img, bbox)?;
            let r = resize_bilinear(&c, dest.w, dest.h)?;
            Ok((c, r))
        })?;

        let target = self.cfg.aug_target;
        let policy = self.policy()?;
        let mut canvas = if matches!(target, AugTarget::NonSalientOnly | AugTarget::Both) {
            if cutout_whole {
                let size = self.cfg.cutout_size;
                let (out, mask) = timed(&mut self.t.ops, || cutout(img, size, self.rng, Some(bbox)));
                self.plan.erase_mask = mask;
                out
            } else {
                let (out, log) = timed(&mut self.t.ops, || rand_augment(img, policy, self.rng));
                self.plan.op_log_whole = log;
                out
            }
        } else {
            img.clone()
        };
        let patch = if matches!(target, AugTarget::SalientOnly | AugTarget::Both) {
            let (out, log) = timed(&mut self.t.ops, || rand_augment(&resized, policy, self.rng));
            self.plan.op_log_salient = log;
            out
        } else {
            resized
        };
        let restore = target == AugTarget::NonSalientOnly && self.cfg.also_restore_bbox;
        timed(&mut self.t.compose, || -> Result<()> {
            if restore {
                paste_in_place(&mut canvas, &original_crop, bbox)?;
            }
            paste_in_place(&mut canvas, &patch, dest)
        })?;
        Ok(canvas)
    }

    fn keep_augment(&mut self) -> Result<Image> {
        let Some(region) = self.locate()?.0 else {
            return self.fallback();
        };
        self.record(&region);
        let mut canvas = self.fallback()?;
        let img = self.img;
        timed(&mut self.t.compose, || {
            paste_in_place(&mut canvas, &crop(img, region.bbox)?, region.bbox)
        })?;
        Ok(canvas)
    }

    fn salfmix(&mut self) -> Result<Image> {
        let (found, table) = self.locate()?;
        let Some(region) = found else {
            return self.fallback();
        };
        self.record(&region);
        let cells = eight_regions((self.img.width(), self.img.height()), region.bbox)?;
        let Some(dest) = least_salient(&table, &cells) else {
            return self.fallback();
        };
        self.plan.dest_cell = Some(dest);
        let img = self.img;
        timed(&mut self.t.compose, || -> Result<Image> {
            let patch = resize_bilinear(&crop(img, region.bbox)?, dest.w, dest.h)?;
            let mut canvas = img.clone();
            paste_in_place(&mut canvas, &patch, dest)?;
            Ok(canvas)
        })
    }

    fn erase(&mut self) -> Result<Image> {
        let p = EraseParams::from_config(self.cfg);
        let (img, rng) = (self.img, &mut *self.rng);
        let (out, mask) = timed(&mut self.t.ops, || -> Result<_> {
            Ok(match self.cfg.method {
                Method::Cutout => cutout(img, p.cutout_size, rng, None),
                Method::RandomErasing => random_erasing(img, &p.random_erasing, rng),
                Method::GridMask => (gridmask(img, p.grid_unit, p.grid_ratio, rng), None),
                Method::HideAndSeek => (hide_and_seek(img, p.hide_grid, p.hide_prob, rng)?, None),
                m => unreachable!("{m} is not an erasing method"),
            })
        })?;
        self.plan.erase_mask = mask;
        Ok(out)
    }
}

/// Cell with the smallest saliency mass; the earliest wins ties.
pub fn least_salient(table: &IntegralTable, cells: &[Rect]) -> Option<Rect> {
    let mut best: Option<(Rect, f64)> = None;
    for &c in cells {
        let m = table.box_sum(c.x, c.y, c.right(), c.bottom());
        if best.is_none_or(|(_, b)| m < b) {
            best = Some((c, m));
        }
    }
    best.map(|(c, _)| c)
}
