//! Global pixel-shift diagnostics: the integer translation that maximizes
//! PSNR, per frame and tallied over a sequence.

use rayon::prelude::*;

use crate::error::Result;
use crate::frame::{Frame, FrameSequence};
use crate::metric::{ensure_matching_sequences, enumerate_shifts, Shift};
use crate::stats::quality::psnr_from_mse;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShiftEstimate {
    pub shift: Shift,
    pub psnr: f64,
}

/// Mean squared error between `gt(p)` and `dist(p - shift)` over the overlap.
fn overlap_mse(gt: &Frame, dist: &Frame, shift: Shift) -> Option<f64> {
    let (w, h, c) = (gt.width() as i64, gt.height() as i64, gt.channels());
    let (dx, dy) = (i64::from(shift.dx), i64::from(shift.dy));
    let (x0, x1) = (dx.max(0), (w + dx).min(w));
    let (y0, y1) = (dy.max(0), (h + dy).min(h));
    if x0 >= x1 || y0 >= y1 {
        return None;
    }
    let (a, b) = (gt.data(), dist.data());
    let row_len = (x1 - x0) as usize * c;
    let mut sum = 0.0;
    for y in y0..y1 {
        let pa = ((y * w + x0) as usize) * c;
        let pb = (((y - dy) * w + x0 - dx) as usize) * c;
        sum += a[pa..pa + row_len]
            .iter()
            .zip(&b[pb..pb + row_len])
            .map(|(u, v)| (u - v) * (u - v))
            .sum::<f64>();
    }
    Some(sum / ((y1 - y0) as usize * row_len) as f64)
}

/// Exhaustive search over the Euclidean disk of `radius` for the shift with
/// the highest overlap PSNR; ties go to the canonically smaller shift.
pub fn global_shift_psnr(gt: &Frame, dist: &Frame, radius: u32) -> Result<ShiftEstimate> {
    if !gt.same_shape(dist) {
        return Err(crate::error::Error::dims(gt.shape_string(), dist.shape_string()));
    }
    let mut best: Option<(Shift, f64)> = None;
    for shift in enumerate_shifts(radius) {
        let Some(m) = overlap_mse(gt, dist, shift) else {
            continue;
        };
        if best.is_none_or(|(_, b)| m < b) {
            best = Some((shift, m));
        }
    }
    let (shift, m) = best.unwrap_or((Shift::ZERO, f64::NAN));
    Ok(ShiftEstimate {
        shift,
        psnr: psnr_from_mse(m),
    })
}

/// Counts of per-frame best shifts on a `(2r+1) x (2r+1)` grid; `counts[dy + r][dx + r]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ShiftHistogram {
    pub radius: u32,
    pub counts: Vec<Vec<u64>>,
    pub per_frame: Vec<ShiftEstimate>,
}

impl ShiftHistogram {
    pub fn count(&self, shift: Shift) -> u64 {
        let r = self.radius as i32;
        if shift.dx.abs() > r || shift.dy.abs() > r {
            return 0;
        }
        self.counts[(shift.dy + r) as usize][(shift.dx + r) as usize]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }
}

pub fn shift_distribution(gt: &FrameSequence, dist: &FrameSequence, radius: u32) -> Result<ShiftHistogram> {
    ensure_matching_sequences(gt, dist)?;
    let per_frame = gt
        .frames()
        .par_iter()
        .zip(dist.frames().par_iter())
        .map(|(g, d)| global_shift_psnr(g, d, radius))
        .collect::<Result<Vec<_>>>()?;
    let side = 2 * radius as usize + 1;
    let mut counts = vec![vec![0u64; side]; side];
    let r = radius as i32;
    for e in &per_frame {
        counts[(e.shift.dy + r) as usize][(e.shift.dx + r) as usize] += 1;
    }
    Ok(ShiftHistogram {
        radius,
        counts,
        per_frame,
    })
}
