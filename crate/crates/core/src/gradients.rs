//! Central-difference gradient fields, the percentile outlier filter, and
//! the cosine matching primitive.

use crate::error::{Error, Result};
use crate::frame::Frame;

/// Which side of the percentile threshold is invalidated.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FilterDirection {
    /// Invalidate magnitudes strictly above the percentile.
    DropAbove,
    /// Invalidate magnitudes strictly below the percentile.
    DropBelow,
}

impl FilterDirection {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterDirection::DropAbove => "drop-above",
            FilterDirection::DropBelow => "drop-below",
        }
    }
}

impl std::str::FromStr for FilterDirection {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drop-above" => Ok(FilterDirection::DropAbove),
            "drop-below" => Ok(FilterDirection::DropBelow),
            other => Err(Error::InvalidConfig(format!(
                "filter_direction must be drop-above or drop-below, got `{other}`"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GradientConfig {
    /// Percentile used by the outlier filter, in `(0, 1]`.
    pub percentile_q: f64,
    pub filter_direction: FilterDirection,
    /// Invalidate zero-magnitude pixels before the percentile is taken.
    pub drop_zero_magnitude: bool,
    /// Cosine threshold for a match, in `(-1, 1]`; compared strictly.
    pub cosine_threshold: f64,
}

impl Default for GradientConfig {
    fn default() -> Self {
        GradientConfig {
            percentile_q: 0.85,
            filter_direction: FilterDirection::DropAbove,
            drop_zero_magnitude: true,
            cosine_threshold: 0.85,
        }
    }
}

impl GradientConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.percentile_q > 0.0 && self.percentile_q <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "percentile_q must be in (0, 1], got {}",
                self.percentile_q
            )));
        }
        if !(self.cosine_threshold > -1.0 && self.cosine_threshold <= 1.0) {
            return Err(Error::InvalidConfig(format!(
                "cosine_threshold must be in (-1, 1], got {}",
                self.cosine_threshold
            )));
        }
        Ok(())
    }
}

/// Per-pixel gradient vectors with a validity mask.
#[derive(Clone, Debug, PartialEq)]
pub struct GradientField {
    width: usize,
    height: usize,
    gx: Vec<f64>,
    gy: Vec<f64>,
    valid: Vec<bool>,
}

impl GradientField {
    pub fn new(width: usize, height: usize, gx: Vec<f64>, gy: Vec<f64>, valid: Vec<bool>) -> Result<Self> {
        let n = width * height;
        if gx.len() != n || gy.len() != n || valid.len() != n {
            return Err(Error::InvalidInput(format!(
                "gradient field buffers must have {n} entries for {width}x{height}"
            )));
        }
        Ok(GradientField {
            width,
            height,
            gx,
            gy,
            valid,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn gx(&self) -> &[f64] {
        &self.gx
    }

    pub fn gy(&self) -> &[f64] {
        &self.gy
    }

    pub fn valid(&self) -> &[bool] {
        &self.valid
    }

    pub fn valid_count(&self) -> usize {
        self.valid.iter().filter(|&&v| v).count()
    }

    #[inline]
    pub fn magnitude_at(&self, i: usize) -> f64 {
        self.gx[i].hypot(self.gy[i])
    }

    pub fn magnitudes(&self) -> Vec<f64> {
        (0..self.gx.len()).map(|i| self.magnitude_at(i)).collect()
    }

    pub(crate) fn ensure_same_size(&self, other: &GradientField) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::dims(
                format!("{}x{}", self.width, self.height),
                format!("{}x{}", other.width, other.height),
            ));
        }
        Ok(())
    }
}

/// Gradients with the `[-0.5, 0, 0.5]` kernel and its transpose, replicate border.
pub fn compute_gradients(luma: &Frame) -> Result<GradientField> {
    if luma.channels() != 1 {
        return Err(Error::UnsupportedChannels(luma.channels()));
    }
    let (w, h) = (luma.width(), luma.height());
    if w < 3 || h < 3 {
        return Err(Error::FrameTooSmall {
            width: w,
            height: h,
            min_width: 3,
            min_height: 3,
        });
    }
    let img = luma.data();
    let mut gx = vec![0.0; w * h];
    let mut gy = vec![0.0; w * h];
    for y in 0..h {
        let row = &img[y * w..(y + 1) * w];
        let up = &img[y.saturating_sub(1) * w..][..w];
        let down = &img[(y + 1).min(h - 1) * w..][..w];
        let out_x = &mut gx[y * w..(y + 1) * w];
        for x in 0..w {
            out_x[x] = 0.5 * (row[(x + 1).min(w - 1)] - row[x.saturating_sub(1)]);
        }
        let out_y = &mut gy[y * w..(y + 1) * w];
        for x in 0..w {
            out_y[x] = 0.5 * (down[x] - up[x]);
        }
    }
    Ok(GradientField {
        width: w,
        height: h,
        gx,
        gy,
        valid: vec![true; w * h],
    })
}

/// 1-based nearest-rank index of the `q` percentile among `n` sorted values.
pub fn nearest_rank(q: f64, n: usize) -> usize {
    // 0.85 * 100 is not exactly 85 in binary; absorb that noise.
    let r = (q * n as f64 - 1e-9).ceil();
    (r.max(1.0) as usize).min(n)
}

/// Invalidates outlier gradients relative to the field's own magnitude
/// distribution. Gradient values are left untouched.
pub fn percentile_filter(field: &GradientField, cfg: &GradientConfig) -> Result<GradientField> {
    cfg.validate()?;
    if !field.valid.iter().any(|&v| v) {
        return Err(Error::NoValidPixels);
    }
    let mut out = field.clone();
    let mags = field.magnitudes();
    if cfg.drop_zero_magnitude {
        for (v, &m) in out.valid.iter_mut().zip(&mags) {
            if m == 0.0 {
                *v = false;
            }
        }
    }
    let mut pool: Vec<f64> = mags
        .iter()
        .zip(&out.valid)
        .filter_map(|(&m, &v)| v.then_some(m))
        .collect();
    if pool.is_empty() {
        return Ok(out);
    }
    let k = nearest_rank(cfg.percentile_q, pool.len()) - 1;
    let (_, &mut threshold, _) = pool.select_nth_unstable_by(k, f64::total_cmp);
    for (v, &m) in out.valid.iter_mut().zip(&mags) {
        let drop = match cfg.filter_direction {
            FilterDirection::DropAbove => m > threshold,
            FilterDirection::DropBelow => m < threshold,
        };
        if drop {
            *v = false;
        }
    }
    Ok(out)
}

/// Cosine test on vectors with precomputed magnitudes.
#[inline]
pub(crate) fn cosine_exceeds(ax: f64, ay: f64, amag: f64, bx: f64, by: f64, bmag: f64, tau: f64) -> bool {
    amag > 0.0 && bmag > 0.0 && (ax * bx + ay * by) / (amag * bmag) > tau
}

/// Whether two gradient vectors point within the cosine threshold of each
/// other. Zero vectors never match.
pub fn cosine_match(g_ref: (f64, f64), g_in: (f64, f64), tau: f64) -> bool {
    cosine_exceeds(
        g_ref.0,
        g_ref.1,
        g_ref.0.hypot(g_ref.1),
        g_in.0,
        g_in.1,
        g_in.0.hypot(g_in.1),
        tau,
    )
}
