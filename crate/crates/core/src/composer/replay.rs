use super::AugmentPlan;
use crate::config::{AugTarget, Method, PipelineConfig};
use crate::error::Result;
use crate::image::{crop, paste_in_place, resize_bilinear, Image};
use crate::ops::erase::fill_excluding;
use crate::ops::{apply_log, gridmask, hide_and_seek, random_erasing, EraseParams};
use crate::rng::RngStream;

/// Rebuilds a plan's output from its recorded fields. Rects, op logs and
/// masks are applied verbatim; random erasing, GridMask and Hide-and-Seek
/// re-run their draws from the recorded stream key. `cfg` supplies the
/// method parameters that plans do not carry (erase settings,
/// `also_restore_bbox`).
pub fn replay_plan(img: &Image, plan: &AugmentPlan, cfg: &PipelineConfig) -> Result<Image> {
    if !plan.applied {
        return Ok(img.clone());
    }
    let whole = || apply_log(img, &plan.op_log_whole);
    match plan.method {
        Method::None => Ok(img.clone()),
        Method::KeepOriginal | Method::KeepOriginalCutout => {
            let (Some(bbox), Some(dest)) = (plan.salient_bbox, plan.dest_cell) else {
                return Ok(whole());
            };
            let original_crop = crop(img, bbox)?;
            let resized = resize_bilinear(&original_crop, dest.w, dest.h)?;
            let mut canvas = match plan.erase_mask {
                Some(mask) => {
                    let mut c = img.clone();
                    fill_excluding(&mut c, mask, Some(bbox));
                    c
                }
                None => whole(),
            };
            if plan.aug_target == AugTarget::NonSalientOnly && cfg.also_restore_bbox {
                paste_in_place(&mut canvas, &original_crop, bbox)?;
            }
            paste_in_place(&mut canvas, &apply_log(&resized, &plan.op_log_salient), dest)?;
            Ok(canvas)
        }
        Method::KeepAugment => {
            let mut canvas = whole();
            if let Some(bbox) = plan.salient_bbox {
                paste_in_place(&mut canvas, &crop(img, bbox)?, bbox)?;
            }
            Ok(canvas)
        }
        Method::SalfMix => {
            let (Some(bbox), Some(dest)) = (plan.salient_bbox, plan.dest_cell) else {
                return Ok(whole());
            };
            let mut canvas = img.clone();
            paste_in_place(&mut canvas, &resize_bilinear(&crop(img, bbox)?, dest.w, dest.h)?, dest)?;
            Ok(canvas)
        }
        Method::Cutout => {
            let mut canvas = img.clone();
            if let Some(mask) = plan.erase_mask {
                fill_excluding(&mut canvas, mask, None);
            }
            Ok(canvas)
        }
        Method::RandomErasing | Method::GridMask | Method::HideAndSeek => {
            let p = EraseParams::from_config(cfg);
            let mut rng = RngStream::from_key(plan.seed, plan.image_index);
            rng.next_f64(); // keep gate
            Ok(match plan.method {
                Method::RandomErasing => random_erasing(img, &p.random_erasing, &mut rng).0,
                Method::GridMask => gridmask(img, p.grid_unit, p.grid_ratio, &mut rng),
                _ => hide_and_seek(img, p.hide_grid, p.hide_prob, &mut rng)?,
            })
        }
    }
}
