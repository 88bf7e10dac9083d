//! Canonical image preprocessing: bilinear resize, center crop, normalize.
//!
//! The resize kernel is bilinear with half-pixel centers: a destination
//! pixel at index `d` samples the source at `(d + 0.5) * in/out - 0.5`,
//! clamped to the valid range. Interpolation weights are computed in f64
//! so the output is reproducible across platforms.

use alloc::vec::Vec;

use thiserror::Error;

use crate::benchmark::BenchmarkId;
use crate::tensor::{ImageTensor, TensorError};

/// Side length of the classification input after resize + crop.
pub const CLASSIFICATION_SIDE: u32 = 224;
/// Side length of the detection input (direct resize, no crop).
pub const DETECTION_SIDE: u32 = 300;
/// Side length of the segmentation input after resize + crop.
pub const SEGMENTATION_SIDE: u32 = 512;
/// Maximum token sequence length for question answering.
pub const MAX_TOKENS: usize = 384;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PreprocessError {
    #[error("crop {crop_h}x{crop_w} exceeds image {h}x{w}")]
    CropTooLarge { crop_h: u32, crop_w: u32, h: u32, w: u32 },
    #[error("mean/std must have one entry per channel ({channels})")]
    ChannelCountMismatch { channels: u32 },
    #[error("std component is zero for channel {channel}")]
    ZeroStd { channel: usize },
    #[error(transparent)]
    Tensor(#[from] TensorError),
}

/// Map a destination index to a clamped source coordinate under the
/// half-pixel-center convention.
#[inline]
fn source_coord(dst: u32, scale: f64, in_dim: u32) -> (u32, u32, f64) {
    let pos = (dst as f64 + 0.5) * scale - 0.5;
    let max = (in_dim - 1) as f64;
    let pos = if pos < 0.0 {
        0.0
    } else if pos > max {
        max
    } else {
        pos
    };
    // pos is nonnegative, so integer truncation is floor
    let lo = pos as u32;
    let hi = if lo + 1 < in_dim { lo + 1 } else { in_dim - 1 };
    (lo, hi, pos - lo as f64)
}

pub fn resize_bilinear(img: &ImageTensor, out_h: u32, out_w: u32) -> Result<ImageTensor, PreprocessError> {
    let mut out = ImageTensor::zeros(out_h, out_w, img.channels)?;
    let scale_y = img.height as f64 / out_h as f64;
    let scale_x = img.width as f64 / out_w as f64;
    for y in 0..out_h {
        let (y0, y1, wy) = source_coord(y, scale_y, img.height);
        for x in 0..out_w {
            let (x0, x1, wx) = source_coord(x, scale_x, img.width);
            for c in 0..img.channels {
                let v00 = img.get(y0, x0, c) as f64;
                let v01 = img.get(y0, x1, c) as f64;
                let v10 = img.get(y1, x0, c) as f64;
                let v11 = img.get(y1, x1, c) as f64;
                let top = v00 * (1.0 - wx) + v01 * wx;
                let bot = v10 * (1.0 - wx) + v11 * wx;
                out.set(y, x, c, (top * (1.0 - wy) + bot * wy) as f32);
            }
        }
    }
    Ok(out)
}

/// Crop a centered window. On odd margins the window shifts up/left, so
/// the extra pixel is dropped from the bottom/right.
pub fn center_crop(img: &ImageTensor, crop_h: u32, crop_w: u32) -> Result<ImageTensor, PreprocessError> {
    if crop_h > img.height || crop_w > img.width {
        return Err(PreprocessError::CropTooLarge {
            crop_h,
            crop_w,
            h: img.height,
            w: img.width,
        });
    }
    let off_y = (img.height - crop_h) / 2;
    let off_x = (img.width - crop_w) / 2;
    let mut out = ImageTensor::zeros(crop_h, crop_w, img.channels)?;
    for y in 0..crop_h {
        for x in 0..crop_w {
            for c in 0..img.channels {
                out.set(y, x, c, img.get(off_y + y, off_x + x, c));
            }
        }
    }
    Ok(out)
}

/// Channel-wise `(value - mean) / std`.
pub fn normalize(img: &ImageTensor, mean: &[f32], std: &[f32]) -> Result<ImageTensor, PreprocessError> {
    let channels = img.channels as usize;
    if mean.len() != channels || std.len() != channels {
        return Err(PreprocessError::ChannelCountMismatch { channels: img.channels });
    }
    if let Some(channel) = std.iter().position(|s| *s == 0.0) {
        return Err(PreprocessError::ZeroStd { channel });
    }
    let mut out = img.clone();
    for (i, v) in out.data.iter_mut().enumerate() {
        let c = i % channels;
        *v = (*v - mean[c]) / std[c];
    }
    Ok(out)
}

/// Scale so the shorter side equals `target`, preserving aspect ratio.
/// The longer side rounds half-up and never lands below `target`.
pub fn resize_shorter_side(img: &ImageTensor, target: u32) -> Result<ImageTensor, PreprocessError> {
    let (out_h, out_w) = if img.height <= img.width {
        (target, scaled_dim(img.width, target, img.height))
    } else {
        (scaled_dim(img.height, target, img.width), target)
    };
    resize_bilinear(img, out_h, out_w)
}

#[inline]
fn scaled_dim(longer: u32, target: u32, shorter: u32) -> u32 {
    let exact = longer as f64 * target as f64 / shorter as f64;
    // round half-up without std floor(): truncate exact + 0.5
    let rounded = (exact + 0.5) as u32;
    rounded.max(target)
}

/// Truncate a token sequence to the model's maximum length.
pub fn truncate_tokens(tokens: &[u32], max_len: usize) -> Vec<u32> {
    tokens[..tokens.len().min(max_len)].to_vec()
}

/// Apply the benchmark's canonical image pipeline (shape stage only;
/// normalization constants are the caller's concern):
/// classification resize-shorter-then-crop to 224, detection direct
/// resize to 300, segmentation resize-shorter-then-crop to 512.
pub fn canonical_image_pipeline(benchmark: BenchmarkId, img: &ImageTensor) -> Result<ImageTensor, PreprocessError> {
    match benchmark {
        BenchmarkId::ImageClassification => {
            let resized = resize_shorter_side(img, CLASSIFICATION_SIDE)?;
            center_crop(&resized, CLASSIFICATION_SIDE, CLASSIFICATION_SIDE)
        }
        BenchmarkId::ObjectDetection => resize_bilinear(img, DETECTION_SIDE, DETECTION_SIDE),
        BenchmarkId::Segmentation => {
            let resized = resize_shorter_side(img, SEGMENTATION_SIDE)?;
            center_crop(&resized, SEGMENTATION_SIDE, SEGMENTATION_SIDE)
        }
        BenchmarkId::QuestionAnswering => Ok(img.clone()),
    }
}
