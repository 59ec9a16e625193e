//! Sequential-refinement edge restoration metric.
//!
//! Both frames are reduced to luma, differentiated, and outlier-filtered
//! independently. Every integer shift inside the search radius is scored by
//! the number of gradient pairs it matches; the best `N` shifts are then
//! applied in order, each one moving the pairs it matches into the true
//! positive mask and removing them from both fields. Whatever is left of the
//! reference field is the false negative mask, whatever is left of the input
//! field is the false positive mask, and the score is their F-beta.
//!
//! A shift `(dx, dy)` pairs reference pixel `p` with input pixel
//! `p - (dx, dy)`.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::{to_luma_with, Frame, FrameSequence, LumaWeights};
use crate::gradients::{compute_gradients, cosine_exceeds, percentile_filter, GradientConfig, GradientField};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Shift {
    pub dx: i32,
    pub dy: i32,
}

impl Shift {
    pub const ZERO: Shift = Shift { dx: 0, dy: 0 };

    pub fn new(dx: i32, dy: i32) -> Self {
        Shift { dx, dy }
    }

    pub fn norm_sq(self) -> i64 {
        i64::from(self.dx) * i64::from(self.dx) + i64::from(self.dy) * i64::from(self.dy)
    }

    /// Deterministic order: squared length, then `dy`, then `dx`.
    pub fn canonical_cmp(&self, other: &Shift) -> std::cmp::Ordering {
        (self.norm_sq(), self.dy, self.dx).cmp(&(other.norm_sq(), other.dy, other.dx))
    }
}

/// Shape of the shift search set.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftShape {
    /// `dx² + dy² <= r²`.
    Disk,
    /// `max(|dx|, |dy|) <= r`.
    Square,
}

impl ShiftShape {
    pub fn as_str(self) -> &'static str {
        match self {
            ShiftShape::Disk => "disk",
            ShiftShape::Square => "square",
        }
    }
}

impl std::str::FromStr for ShiftShape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "disk" => Ok(ShiftShape::Disk),
            "square" => Ok(ShiftShape::Square),
            other => Err(Error::InvalidConfig(format!("shift_shape must be disk or square, got `{other}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErqaConfig {
    pub shift_radius: u32,
    pub shift_shape: ShiftShape,
    /// Number of top-ranked shifts applied during refinement.
    pub refine_iterations: usize,
    pub beta: f64,
    /// Recompute the shift ranking on the reduced fields after every step.
    pub rerank: bool,
    pub gradient: GradientConfig,
    pub luma: LumaWeights,
}

impl Default for ErqaConfig {
    fn default() -> Self {
        ErqaConfig {
            shift_radius: 5,
            shift_shape: ShiftShape::Disk,
            refine_iterations: 35,
            beta: 0.5,
            rerank: false,
            gradient: GradientConfig::default(),
            luma: LumaWeights::default(),
        }
    }
}

impl ErqaConfig {
    pub fn shifts(&self) -> Vec<Shift> {
        enumerate_shifts_with(self.shift_radius, self.shift_shape)
    }

    pub fn validate(&self) -> Result<()> {
        self.gradient.validate()?;
        if self.refine_iterations == 0 {
            return Err(Error::InvalidConfig("refine_iterations must be at least 1".into()));
        }
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidConfig(format!("beta must be positive, got {}", self.beta)));
        }
        let available = self.shifts().len();
        if self.refine_iterations > available {
            return Err(Error::InvalidConfig(format!(
                "refine_iterations {} exceeds the {available} shifts within radius {}",
                self.refine_iterations, self.shift_radius
            )));
        }
        Ok(())
    }
}

/// Every shift in the Euclidean disk of `radius`, in canonical order.
pub fn enumerate_shifts(radius: u32) -> Vec<Shift> {
    enumerate_shifts_with(radius, ShiftShape::Disk)
}

pub fn enumerate_shifts_with(radius: u32, shape: ShiftShape) -> Vec<Shift> {
    let r = radius as i32;
    let r2 = i64::from(r) * i64::from(r);
    let mut shifts: Vec<Shift> = (-r..=r)
        .flat_map(|dy| (-r..=r).map(move |dx| Shift { dx, dy }))
        .filter(|s| shape == ShiftShape::Square || s.norm_sq() <= r2)
        .collect();
    shifts.sort_by(Shift::canonical_cmp);
    shifts
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ShiftCandidate {
    pub shift: Shift,
    /// Matching gradient pairs under this shift.
    pub similarity: u64,
}

/// Gradient field with cached magnitudes and a mutable validity mask.
struct Working<'a> {
    width: usize,
    height: usize,
    gx: &'a [f64],
    gy: &'a [f64],
    mag: Vec<f64>,
    valid: Vec<bool>,
}

impl<'a> Working<'a> {
    fn new(field: &'a GradientField) -> Self {
        Working {
            width: field.width(),
            height: field.height(),
            gx: field.gx(),
            gy: field.gy(),
            mag: field.magnitudes(),
            valid: field.valid().to_vec(),
        }
    }
}

/// Reference-pixel row/column ranges for which `p - shift` is in bounds.
fn overlap(w: usize, h: usize, shift: Shift) -> Option<(std::ops::Range<usize>, std::ops::Range<usize>)> {
    let (w, h) = (w as i64, h as i64);
    let (dx, dy) = (i64::from(shift.dx), i64::from(shift.dy));
    let xs = dx.max(0)..(w + dx).min(w);
    let ys = dy.max(0)..(h + dy).min(h);
    if xs.is_empty() || ys.is_empty() {
        return None;
    }
    Some((xs.start as usize..xs.end as usize, ys.start as usize..ys.end as usize))
}

fn count_matches(gt: &Working, inp: &Working, shift: Shift, tau: f64) -> u64 {
    let Some((xs, ys)) = overlap(gt.width, gt.height, shift) else {
        return 0;
    };
    let w = gt.width;
    let mut count = 0u64;
    for y in ys {
        let qy = (y as i64 - i64::from(shift.dy)) as usize;
        for x in xs.clone() {
            let p = y * w + x;
            if !gt.valid[p] {
                continue;
            }
            let q = qy * w + (x as i64 - i64::from(shift.dx)) as usize;
            if inp.valid[q] && cosine_exceeds(gt.gx[p], gt.gy[p], gt.mag[p], inp.gx[q], inp.gy[q], inp.mag[q], tau) {
                count += 1;
            }
        }
    }
    count
}

/// Moves every pair matched under `shift` into `tp`; returns how many.
fn apply_shift(gt: &mut Working, inp: &mut Working, tp: &mut [bool], shift: Shift, tau: f64) -> u64 {
    let Some((xs, ys)) = overlap(gt.width, gt.height, shift) else {
        return 0;
    };
    let w = gt.width;
    let mut added = 0u64;
    for y in ys {
        let qy = (y as i64 - i64::from(shift.dy)) as usize;
        for x in xs.clone() {
            let p = y * w + x;
            if !gt.valid[p] {
                continue;
            }
            let q = qy * w + (x as i64 - i64::from(shift.dx)) as usize;
            if inp.valid[q] && cosine_exceeds(gt.gx[p], gt.gy[p], gt.mag[p], inp.gx[q], inp.gy[q], inp.mag[q], tau) {
                tp[p] = true;
                gt.valid[p] = false;
                inp.valid[q] = false;
                added += 1;
            }
        }
    }
    added
}

/// Number of reference pixels whose shifted counterpart is a valid,
/// cosine-matching input gradient.
pub fn shift_similarity(gt: &GradientField, input: &GradientField, shift: Shift, tau: f64) -> Result<u64> {
    gt.ensure_same_size(input)?;
    Ok(count_matches(&Working::new(gt), &Working::new(input), shift, tau))
}

fn sort_candidates(candidates: &mut [ShiftCandidate]) {
    candidates.sort_by(|a, b| {
        b.similarity
            .cmp(&a.similarity)
            .then_with(|| a.shift.canonical_cmp(&b.shift))
    });
}

fn rank_working(gt: &Working, inp: &Working, shifts: &[Shift], tau: f64) -> Vec<ShiftCandidate> {
    let mut ranked: Vec<ShiftCandidate> = shifts
        .iter()
        .map(|&shift| ShiftCandidate {
            shift,
            similarity: count_matches(gt, inp, shift, tau),
        })
        .collect();
    sort_candidates(&mut ranked);
    ranked
}

/// All shifts of the configured search set, most similar first.
pub fn rank_shifts(gt: &GradientField, input: &GradientField, cfg: &ErqaConfig) -> Result<Vec<ShiftCandidate>> {
    gt.ensure_same_size(input)?;
    Ok(rank_working(
        &Working::new(gt),
        &Working::new(input),
        &cfg.shifts(),
        cfg.gradient.cosine_threshold,
    ))
}

/// Pixel masks produced by sequential matching. `true_positive` and
/// `false_negative` are in reference coordinates, `false_positive` in input
/// coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchMasks {
    pub width: usize,
    pub height: usize,
    pub true_positive: Vec<bool>,
    pub false_positive: Vec<bool>,
    pub false_negative: Vec<bool>,
}

fn popcount(mask: &[bool]) -> u64 {
    mask.iter().filter(|&&v| v).count() as u64
}

impl MatchMasks {
    pub fn tp_count(&self) -> u64 {
        popcount(&self.true_positive)
    }

    pub fn fp_count(&self) -> u64 {
        popcount(&self.false_positive)
    }

    pub fn fn_count(&self) -> u64 {
        popcount(&self.false_negative)
    }
}

/// One refinement step: the shift applied and how many pairs it added.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct RefinementStep {
    pub candidate: ShiftCandidate,
    pub matches_added: u64,
}

/// Sequential matching over the top-ranked shifts.
pub fn sequential_match(gt: &GradientField, input: &GradientField, cfg: &ErqaConfig) -> Result<MatchMasks> {
    sequential_match_traced(gt, input, cfg).map(|(masks, _)| masks)
}

/// Like [`sequential_match`], also returning the per-shift trace.
pub fn sequential_match_traced(
    gt: &GradientField,
    input: &GradientField,
    cfg: &ErqaConfig,
) -> Result<(MatchMasks, Vec<RefinementStep>)> {
    cfg.validate()?;
    gt.ensure_same_size(input)?;
    let tau = cfg.gradient.cosine_threshold;
    let mut g = Working::new(gt);
    let mut i = Working::new(input);
    let mut tp = vec![false; g.valid.len()];
    let mut trace = Vec::with_capacity(cfg.refine_iterations);

    let mut pending = rank_working(&g, &i, &cfg.shifts(), tau);
    for step in 0..cfg.refine_iterations {
        if cfg.rerank && step > 0 {
            for c in pending.iter_mut() {
                c.similarity = count_matches(&g, &i, c.shift, tau);
            }
            sort_candidates(&mut pending);
        }
        let candidate = pending.remove(0);
        let matches_added = apply_shift(&mut g, &mut i, &mut tp, candidate.shift, tau);
        trace.push(RefinementStep {
            candidate,
            matches_added,
        });
    }

    let masks = MatchMasks {
        width: g.width,
        height: g.height,
        true_positive: tp,
        false_positive: i.valid,
        false_negative: g.valid,
    };
    Ok((masks, trace))
}

/// F-beta score from match counts.
///
/// Both sides empty scores 1; no true positives with anything unmatched
/// scores 0.
pub fn f_beta(tp: u64, fp: u64, fn_: u64, beta: f64) -> Result<f64> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidConfig(format!("beta must be positive, got {beta}")));
    }
    if tp == 0 {
        return Ok(if fp == 0 && fn_ == 0 { 1.0 } else { 0.0 });
    }
    let b2 = beta * beta;
    let weighted_tp = (1.0 + b2) * tp as f64;
    Ok(weighted_tp / (weighted_tp + b2 * fn_ as f64 + fp as f64))
}

#[derive(Clone, Debug, PartialEq)]
pub struct ErqaScore {
    pub value: f64,
    pub masks: MatchMasks,
    pub trace: Vec<RefinementStep>,
}

/// Luma, gradients and percentile filter for one frame.
pub fn filtered_gradients(frame: &Frame, cfg: &ErqaConfig) -> Result<GradientField> {
    let luma = to_luma_with(frame, cfg.luma)?;
    percentile_filter(&compute_gradients(&luma)?, &cfg.gradient)
}

/// Scores `dist` against the reference `gt`.
pub fn erqa_score(gt: &Frame, dist: &Frame, cfg: &ErqaConfig) -> Result<ErqaScore> {
    cfg.validate()?;
    gt.ensure_same_size(dist)?;
    let g = filtered_gradients(gt, cfg)?;
    let i = filtered_gradients(dist, cfg)?;
    let (masks, trace) = sequential_match_traced(&g, &i, cfg)?;
    let value = f_beta(masks.tp_count(), masks.fp_count(), masks.fn_count(), cfg.beta)?;
    Ok(ErqaScore { value, masks, trace })
}

/// Per-frame values and their arithmetic mean.
#[derive(Clone, Debug, PartialEq)]
pub struct SequenceScore {
    pub per_frame: Vec<f64>,
    pub mean: f64,
}

impl SequenceScore {
    pub fn from_values(per_frame: Vec<f64>) -> Self {
        let mean = per_frame.iter().sum::<f64>() / per_frame.len() as f64;
        SequenceScore { per_frame, mean }
    }
}

pub(crate) fn ensure_matching_sequences(gt: &FrameSequence, dist: &FrameSequence) -> Result<()> {
    if gt.len() != dist.len() {
        return Err(Error::dims(
            format!("{} frames", gt.len()),
            format!("{} frames", dist.len()),
        ));
    }
    gt.frames()[0].ensure_same_size(&dist.frames()[0])
}

/// Scores every frame pair (in parallel on the current rayon pool) and
/// averages.
pub fn erqa_sequence(gt: &FrameSequence, dist: &FrameSequence, cfg: &ErqaConfig) -> Result<SequenceScore> {
    cfg.validate()?;
    ensure_matching_sequences(gt, dist)?;
    let values = gt
        .frames()
        .par_iter()
        .zip(dist.frames().par_iter())
        .map(|(g, d)| erqa_score(g, d, cfg).map(|s| s.value))
        .collect::<Result<Vec<f64>>>()?;
    Ok(SequenceScore::from_values(values))
}

/// Which masks are drawn by [`render_heatmap`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Overlay {
    /// True positives (green) and false negatives (red) over the reference.
    Reference,
    /// False positives (blue) over the distorted frame.
    Distorted,
}

pub const HEATMAP_DIM: f64 = 0.4;
pub const TP_COLOR: [f64; 3] = [0.0, 1.0, 0.0];
pub const FN_COLOR: [f64; 3] = [1.0, 0.0, 0.0];
pub const FP_COLOR: [f64; 3] = [0.0, 0.0, 1.0];

/// RGB artifact map: dimmed grayscale background with mask pixels colored.
pub fn render_heatmap(masks: &MatchMasks, background: &Frame, overlay: Overlay) -> Result<Frame> {
    if background.width() != masks.width || background.height() != masks.height {
        return Err(Error::dims(
            format!("{}x{}", masks.width, masks.height),
            format!("{}x{}", background.width(), background.height()),
        ));
    }
    let luma = to_luma_with(background, LumaWeights::default())?;
    let mut data = Vec::with_capacity(luma.data().len() * 3);
    for (p, &v) in luma.data().iter().enumerate() {
        let color = match overlay {
            Overlay::Reference if masks.false_negative[p] => Some(FN_COLOR),
            Overlay::Reference if masks.true_positive[p] => Some(TP_COLOR),
            Overlay::Distorted if masks.false_positive[p] => Some(FP_COLOR),
            _ => None,
        };
        match color {
            Some(c) => data.extend_from_slice(&c),
            None => data.extend_from_slice(&[v * HEATMAP_DIM; 3]),
        }
    }
    Ok(Frame::from_raw(masks.width, masks.height, 3, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square_frame(w: usize, h: usize, x0: usize, y0: usize, side: usize) -> Frame {
        Frame::from_fn(w, h, |x, y| {
            if (x0..x0 + side).contains(&x) && (y0..y0 + side).contains(&y) {
                0.9
            } else {
                0.1
            }
        })
        .unwrap()
    }

    /// `out(q) = f(q + d)`, replicate outside.
    fn translate(f: &Frame, d: Shift) -> Frame {
        let (w, h) = (f.width() as i64, f.height() as i64);
        Frame::from_fn(f.width(), f.height(), |x, y| {
            let sx = (x as i64 + i64::from(d.dx)).clamp(0, w - 1) as usize;
            let sy = (y as i64 + i64::from(d.dy)).clamp(0, h - 1) as usize;
            f.get(sx, sy, 0)
        })
        .unwrap()
    }

    #[test]
    fn shift_enumeration() {
        assert_eq!(enumerate_shifts(0), vec![Shift::ZERO]);
        let r1 = enumerate_shifts(1);
        assert_eq!(
            r1,
            vec![
                Shift::new(0, 0),
                Shift::new(0, -1),
                Shift::new(-1, 0),
                Shift::new(1, 0),
                Shift::new(0, 1)
            ]
        );
        // brute-force lattice count
        let brute = (-5i32..=5)
            .flat_map(|a| (-5i32..=5).map(move |b| a * a + b * b))
            .filter(|&n| n <= 25)
            .count();
        assert_eq!(brute, 81);
        assert_eq!(enumerate_shifts(5).len(), 81);
        assert_eq!(enumerate_shifts_with(5, ShiftShape::Square).len(), 121);
    }

    #[test]
    fn similarity_self_and_translation() {
        let cfg = ErqaConfig::default();
        let gt = square_frame(32, 32, 10, 10, 10);
        let g = filtered_gradients(&gt, &cfg).unwrap();
        assert_eq!(shift_similarity(&g, &g, Shift::ZERO, 0.85).unwrap(), g.valid_count() as u64);

        let d = Shift::new(3, -2);
        let moved = filtered_gradients(&translate(&gt, d), &cfg).unwrap();
        assert_eq!(shift_similarity(&g, &moved, d, 0.85).unwrap(), g.valid_count() as u64);
        let ranked = rank_shifts(&g, &moved, &cfg).unwrap();
        assert_eq!(ranked[0].shift, d);
        assert_eq!(ranked.len(), 81);
    }

    #[test]
    fn orthogonal_gratings_never_match() {
        let cfg = ErqaConfig::default();
        let horiz = Frame::from_fn(24, 24, |_, y| if (y / 3) % 2 == 0 { 0.2 } else { 0.8 }).unwrap();
        let vert = Frame::from_fn(24, 24, |x, _| if (x / 3) % 2 == 0 { 0.2 } else { 0.8 }).unwrap();
        let a = filtered_gradients(&horiz, &cfg).unwrap();
        let b = filtered_gradients(&vert, &cfg).unwrap();
        for c in rank_shifts(&a, &b, &cfg).unwrap() {
            assert_eq!(c.similarity, 0);
        }
    }

    #[test]
    fn zero_fields_rank_in_canonical_order() {
        let z = GradientField::new(8, 8, vec![0.0; 64], vec![0.0; 64], vec![true; 64]).unwrap();
        let ranked = rank_shifts(&z, &z, &ErqaConfig::default()).unwrap();
        let order: Vec<Shift> = ranked.iter().map(|c| c.shift).collect();
        assert_eq!(order, enumerate_shifts(5));
    }

    #[test]
    fn sequential_identity_translation_and_empty_input() {
        let cfg = ErqaConfig::default();
        let gt = square_frame(40, 40, 14, 12, 12);
        let g = filtered_gradients(&gt, &cfg).unwrap();

        let m = sequential_match(&g, &g, &cfg).unwrap();
        assert_eq!(m.tp_count(), g.valid_count() as u64);
        assert_eq!((m.fp_count(), m.fn_count()), (0, 0));

        let moved = filtered_gradients(&translate(&gt, Shift::new(2, 1)), &cfg).unwrap();
        let m = sequential_match(&g, &moved, &cfg).unwrap();
        assert_eq!(m.tp_count(), g.valid_count() as u64);
        assert_eq!((m.fp_count(), m.fn_count()), (0, 0));

        let flat = filtered_gradients(&Frame::filled(40, 40, 1, 0.5).unwrap(), &cfg).unwrap();
        let m = sequential_match(&g, &flat, &cfg).unwrap();
        assert_eq!(m.tp_count(), 0);
        assert_eq!(m.fp_count(), 0);
        assert_eq!(m.false_negative, g.valid().to_vec());
    }

    #[test]
    fn sequential_rejects_mismatch_and_bad_config() {
        let a = GradientField::new(4, 4, vec![0.0; 16], vec![0.0; 16], vec![true; 16]).unwrap();
        let b = GradientField::new(5, 4, vec![0.0; 20], vec![0.0; 20], vec![true; 20]).unwrap();
        assert!(matches!(
            sequential_match(&a, &b, &ErqaConfig::default()),
            Err(Error::DimensionMismatch { .. })
        ));
        let cfg = ErqaConfig {
            shift_radius: 3,
            ..Default::default()
        };
        // 29 shifts < 35 iterations
        assert!(matches!(sequential_match(&a, &a, &cfg), Err(Error::InvalidConfig(_))));
    }

    #[test]
    fn rerank_is_an_option() {
        let gt = square_frame(40, 40, 10, 10, 15);
        let dist = translate(&gt, Shift::new(1, 1));
        let cfg = ErqaConfig {
            rerank: true,
            ..Default::default()
        };
        let s = erqa_score(&gt, &dist, &cfg).unwrap();
        assert_eq!(s.value, 1.0);
        assert_eq!(s.trace[0].candidate.shift, Shift::new(1, 1));
    }

    #[test]
    fn f_beta_examples() {
        assert!((f_beta(80, 20, 20, 0.5).unwrap() - 0.8).abs() < 1e-15);
        assert_eq!(f_beta(0, 0, 0, 0.5).unwrap(), 1.0);
        assert_eq!(f_beta(0, 3, 0, 0.5).unwrap(), 0.0);
        assert_eq!(f_beta(0, 0, 3, 0.5).unwrap(), 0.0);
        assert!((f_beta(60, 40, 20, 0.5).unwrap() - 0.625).abs() < 1e-15);
        assert!(f_beta(1, 1, 1, 0.0).is_err());
    }

    #[test]
    fn score_identity_translation_and_blur() {
        let cfg = ErqaConfig::default();
        let gt = square_frame(48, 48, 16, 16, 16);
        assert_eq!(erqa_score(&gt, &gt, &cfg).unwrap().value, 1.0);
        let s = erqa_score(&gt, &translate(&gt, Shift::new(3, -2)), &cfg).unwrap();
        assert_eq!(s.value, 1.0);
        let sum: u64 = s.trace.iter().map(|t| t.matches_added).sum();
        assert_eq!(sum, s.masks.tp_count());

        let blurred = crate::degrade::gaussian_blur(&gt, 3.0).unwrap();
        assert!(erqa_score(&gt, &blurred, &cfg).unwrap().value < 1.0);

        let other = square_frame(40, 48, 16, 16, 16);
        assert!(matches!(erqa_score(&gt, &other, &cfg), Err(Error::DimensionMismatch { .. })));

        let flat = Frame::filled(10, 10, 1, 0.2).unwrap();
        assert_eq!(erqa_score(&flat, &flat, &cfg).unwrap().value, 1.0);
    }

    #[test]
    fn sequence_mean() {
        let cfg = ErqaConfig::default();
        let gt = square_frame(32, 32, 10, 10, 10);
        let flat = Frame::filled(32, 32, 1, 0.5).unwrap();
        let seq_gt = FrameSequence::new("gt", vec![gt.clone(), gt.clone()]).unwrap();
        let seq_d = FrameSequence::new("d", vec![gt.clone(), flat]).unwrap();
        let s = erqa_sequence(&seq_gt, &seq_d, &cfg).unwrap();
        assert_eq!(s.per_frame, vec![1.0, 0.0]);
        assert_eq!(s.mean, 0.5);

        let short = FrameSequence::new("d", vec![gt]).unwrap();
        assert!(erqa_sequence(&seq_gt, &short, &cfg).is_err());
    }

    #[test]
    fn heatmaps() {
        let cfg = ErqaConfig::default();
        let gt = square_frame(32, 32, 10, 10, 10);
        let g = filtered_gradients(&gt, &cfg).unwrap();

        let same = erqa_score(&gt, &gt, &cfg).unwrap();
        for overlay in [Overlay::Reference, Overlay::Distorted] {
            let map = render_heatmap(&same.masks, &gt, overlay).unwrap();
            assert!(map.data().chunks(3).all(|px| px != FN_COLOR && px != FP_COLOR));
        }

        let flat = Frame::filled(32, 32, 1, 0.5).unwrap();
        let miss = erqa_score(&gt, &flat, &cfg).unwrap();
        let map = render_heatmap(&miss.masks, &gt, Overlay::Reference).unwrap();
        for (p, px) in map.data().chunks(3).enumerate() {
            assert_eq!(px == FN_COLOR, g.valid()[p]);
        }

        let wrong = Frame::filled(8, 8, 1, 0.5).unwrap();
        assert!(render_heatmap(&miss.masks, &wrong, Overlay::Reference).is_err());
    }
}
