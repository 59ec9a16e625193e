//! Degradations used to build evaluation inputs: bicubic resampling,
//! blur-downsampling and signal-dependent sensor noise.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::frame::Frame;

pub const HR_WIDTH: usize = 1920;
pub const HR_HEIGHT: usize = 1080;
pub const LR_WIDTH: usize = 480;
pub const LR_HEIGHT: usize = 270;

/// Signal-dependent Gaussian noise: `var(L) = sigma_s * L + sigma_c^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub sigma_s: f64,
    pub sigma_c: f64,
    pub seed: u64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            sigma_s: 0.001,
            sigma_c: 0.035,
            seed: 0,
        }
    }
}

impl NoiseParams {
    pub fn std_at(&self, intensity: f64) -> f64 {
        (self.sigma_s * intensity + self.sigma_c * self.sigma_c).max(0.0).sqrt()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.sigma_s >= 0.0 && self.sigma_c >= 0.0) {
            return Err(Error::InvalidConfig(format!(
                "noise sigmas must be non-negative, got sigma_s={} sigma_c={}",
                self.sigma_s, self.sigma_c
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DegradeConfig {
    pub scale: usize,
    /// Gaussian std (pixels) applied before strided sampling.
    pub bd_sigma: f64,
    /// First sampled row/column.
    pub bd_offset: usize,
}

impl Default for DegradeConfig {
    fn default() -> Self {
        DegradeConfig {
            scale: 4,
            bd_sigma: 1.6,
            bd_offset: 0,
        }
    }
}

impl DegradeConfig {
    pub fn validate(&self) -> Result<()> {
        if self.scale < 2 {
            return Err(Error::InvalidConfig(format!("scale must be at least 2, got {}", self.scale)));
        }
        if !(self.bd_sigma > 0.0 && self.bd_sigma.is_finite()) {
            return Err(Error::InvalidConfig(format!("bd_sigma must be positive, got {}", self.bd_sigma)));
        }
        if self.bd_offset >= self.scale {
            return Err(Error::InvalidConfig(format!(
                "bd_offset {} must be smaller than scale {}",
                self.bd_offset, self.scale
            )));
        }
        Ok(())
    }
}

/// Keys cubic convolution kernel with `a = -0.5`.
pub fn cubic_kernel(x: f64) -> f64 {
    const A: f64 = -0.5;
    let x = x.abs();
    if x <= 1.0 {
        ((A + 2.0) * x - (A + 3.0)) * x * x + 1.0
    } else if x < 2.0 {
        ((A * x - 5.0 * A) * x + 8.0 * A) * x - 4.0 * A
    } else {
        0.0
    }
}

/// Source taps and weights along one axis.
struct AxisTaps {
    taps: usize,
    index: Vec<usize>,
    weight: Vec<f64>,
}

impl AxisTaps {
    fn bicubic(input: usize, output: usize) -> Self {
        let ratio = input as f64 / output as f64;
        let mut index = Vec::with_capacity(output * 4);
        let mut weight = Vec::with_capacity(output * 4);
        for i in 0..output {
            let src = (i as f64 + 0.5) * ratio - 0.5;
            let base = src.floor() as i64;
            for t in base - 1..=base + 2 {
                index.push(t.clamp(0, input as i64 - 1) as usize);
                weight.push(cubic_kernel(src - t as f64));
            }
        }
        AxisTaps { taps: 4, index, weight }
    }

    fn gaussian(len: usize, sigma: f64) -> Self {
        let kernel = gaussian_kernel(sigma);
        let r = (kernel.len() / 2) as i64;
        let mut index = Vec::with_capacity(len * kernel.len());
        let mut weight = Vec::with_capacity(len * kernel.len());
        for i in 0..len as i64 {
            for (k, &w) in kernel.iter().enumerate() {
                index.push((i + k as i64 - r).clamp(0, len as i64 - 1) as usize);
                weight.push(w);
            }
        }
        AxisTaps {
            taps: kernel.len(),
            index,
            weight,
        }
    }

    fn outputs(&self) -> usize {
        self.index.len() / self.taps
    }
}

/// Normalized Gaussian truncated at `ceil(4 sigma)`.
pub fn gaussian_kernel(sigma: f64) -> Vec<f64> {
    let r = (4.0 * sigma).ceil().max(1.0) as i64;
    let raw: Vec<f64> = (-r..=r)
        .map(|k| (-((k * k) as f64) / (2.0 * sigma * sigma)).exp())
        .collect();
    let sum: f64 = raw.iter().sum();
    raw.into_iter().map(|w| w / sum).collect()
}

/// Applies `cols` horizontally then `rows` vertically; no clamping.
fn separable(frame: &Frame, cols: &AxisTaps, rows: &AxisTaps) -> Vec<f64> {
    let (w, c) = (frame.width(), frame.channels());
    let (ow, oh) = (cols.outputs(), rows.outputs());
    let src = frame.data();

    let mut tmp = vec![0.0; frame.height() * ow * c];
    tmp.par_chunks_mut(ow * c).enumerate().for_each(|(y, out)| {
        let row = &src[y * w * c..(y + 1) * w * c];
        for x in 0..ow {
            let idx = &cols.index[x * cols.taps..(x + 1) * cols.taps];
            let wts = &cols.weight[x * cols.taps..(x + 1) * cols.taps];
            for ch in 0..c {
                out[x * c + ch] = idx.iter().zip(wts).map(|(&i, &wt)| wt * row[i * c + ch]).sum();
            }
        }
    });

    let mut out = vec![0.0; ow * oh * c];
    out.par_chunks_mut(ow * c).enumerate().for_each(|(y, line)| {
        let idx = &rows.index[y * rows.taps..(y + 1) * rows.taps];
        let wts = &rows.weight[y * rows.taps..(y + 1) * rows.taps];
        for (i, &wt) in idx.iter().zip(wts) {
            let src_line = &tmp[i * ow * c..(i + 1) * ow * c];
            for (o, &s) in line.iter_mut().zip(src_line) {
                *o += wt * s;
            }
        }
    });
    out
}

fn clamp_unit(mut data: Vec<f64>) -> Vec<f64> {
    for v in &mut data {
        *v = v.clamp(0.0, 1.0);
    }
    data
}

/// Separable bicubic resampling with pixel-center alignment and replicate
/// border; output is clamped to `[0, 1]`.
pub fn bicubic_resize(frame: &Frame, out_w: usize, out_h: usize) -> Result<Frame> {
    if out_w == 0 || out_h == 0 {
        return Err(Error::InvalidInput(format!("output size {out_w}x{out_h} must be non-zero")));
    }
    let cols = AxisTaps::bicubic(frame.width(), out_w);
    let rows = AxisTaps::bicubic(frame.height(), out_h);
    let data = clamp_unit(separable(frame, &cols, &rows));
    Ok(Frame::from_raw(out_w, out_h, frame.channels(), data))
}

/// Gaussian blur with replicate border.
pub fn gaussian_blur(frame: &Frame, sigma: f64) -> Result<Frame> {
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::InvalidConfig(format!("blur sigma must be positive, got {sigma}")));
    }
    let cols = AxisTaps::gaussian(frame.width(), sigma);
    let rows = AxisTaps::gaussian(frame.height(), sigma);
    let data = clamp_unit(separable(frame, &cols, &rows));
    Ok(Frame::from_raw(frame.width(), frame.height(), frame.channels(), data))
}

/// Output length of strided sampling: every `offset + k * scale < len`.
pub fn strided_len(len: usize, scale: usize, offset: usize) -> usize {
    (len - offset).div_ceil(scale)
}

/// Keeps pixels at `offset + k * scale` in both axes.
pub fn subsample(frame: &Frame, scale: usize, offset: usize) -> Frame {
    let (w, c) = (frame.width(), frame.channels());
    let ow = strided_len(w, scale, offset);
    let oh = strided_len(frame.height(), scale, offset);
    let mut data = Vec::with_capacity(ow * oh * c);
    for oy in 0..oh {
        let y = offset + oy * scale;
        for ox in 0..ow {
            let x = offset + ox * scale;
            data.extend_from_slice(&frame.data()[(y * w + x) * c..(y * w + x + 1) * c]);
        }
    }
    Frame::from_raw(ow, oh, c, data)
}

/// Blur-downsampling: Gaussian smoothing followed by strided sampling.
pub fn bd_downsample(frame: &Frame, cfg: &DegradeConfig) -> Result<Frame> {
    cfg.validate()?;
    if frame.width() < cfg.scale || frame.height() < cfg.scale {
        return Err(Error::FrameTooSmall {
            width: frame.width(),
            height: frame.height(),
            min_width: cfg.scale,
            min_height: cfg.scale,
        });
    }
    Ok(subsample(&gaussian_blur(frame, cfg.bd_sigma)?, cfg.scale, cfg.bd_offset))
}

/// Bicubic downscale by an integer factor (floor of the quotient).
pub fn bicubic_downscale(frame: &Frame, scale: usize) -> Result<Frame> {
    if scale == 0 || frame.width() < scale || frame.height() < scale {
        return Err(Error::FrameTooSmall {
            width: frame.width(),
            height: frame.height(),
            min_width: scale,
            min_height: scale,
        });
    }
    bicubic_resize(frame, frame.width() / scale, frame.height() / scale)
}

/// Adds signal-dependent Gaussian noise and clamps to `[0, 1]`.
///
/// Row `y` draws from ChaCha8 seeded with `params.seed` on stream `y`, one
/// standard normal per sample in channel-interleaved order, so the output
/// depends only on the seed and the pixel position.
pub fn add_noise(frame: &Frame, params: &NoiseParams) -> Result<Frame> {
    params.validate()?;
    let row_len = frame.width() * frame.channels();
    let mut data = frame.data().to_vec();
    data.par_chunks_mut(row_len).enumerate().for_each(|(y, row)| {
        let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
        rng.set_stream(y as u64);
        for v in row {
            let z: f64 = StandardNormal.sample(&mut rng);
            *v = (*v + z * params.std_at(*v)).clamp(0.0, 1.0);
        }
    });
    Ok(Frame::from_raw(frame.width(), frame.height(), frame.channels(), data))
}

/// Builds the ground-truth / low-resolution pair: bicubic to 1920x1080, then
/// bicubic 4x down to 480x270.
pub fn prepare_pair(source: &Frame) -> Result<(Frame, Frame)> {
    if source.width() < HR_WIDTH || source.height() < HR_HEIGHT {
        return Err(Error::FrameTooSmall {
            width: source.width(),
            height: source.height(),
            min_width: HR_WIDTH,
            min_height: HR_HEIGHT,
        });
    }
    let hr = bicubic_resize(source, HR_WIDTH, HR_HEIGHT)?;
    let lr = bicubic_resize(&hr, LR_WIDTH, LR_HEIGHT)?;
    Ok((hr, lr))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct 2-D bicubic evaluation, independent of the separable path.
    fn bicubic_oracle(f: &Frame, ow: usize, oh: usize) -> Vec<f64> {
        let (w, h) = (f.width() as i64, f.height() as i64);
        let mut out = Vec::new();
        for oy in 0..oh {
            let sy = (oy as f64 + 0.5) * h as f64 / oh as f64 - 0.5;
            for ox in 0..ow {
                let sx = (ox as f64 + 0.5) * w as f64 / ow as f64 - 0.5;
                let mut acc = 0.0;
                for ty in (sy.floor() as i64 - 1)..=(sy.floor() as i64 + 2) {
                    for tx in (sx.floor() as i64 - 1)..=(sx.floor() as i64 + 2) {
                        let v = f.get(tx.clamp(0, w - 1) as usize, ty.clamp(0, h - 1) as usize, 0);
                        acc += cubic_kernel(sx - tx as f64) * cubic_kernel(sy - ty as f64) * v;
                    }
                }
                out.push(acc.clamp(0.0, 1.0));
            }
        }
        out
    }

    /// Direct 2-D Gaussian blur followed by striding.
    fn bd_oracle(f: &Frame, sigma: f64, scale: usize, offset: usize) -> Vec<f64> {
        let (w, h) = (f.width() as i64, f.height() as i64);
        let r = (4.0 * sigma).ceil() as i64;
        let mut norm = 0.0;
        for ky in -r..=r {
            for kx in -r..=r {
                norm += (-((kx * kx + ky * ky) as f64) / (2.0 * sigma * sigma)).exp();
            }
        }
        let mut out = Vec::new();
        let mut y = offset as i64;
        while y < h {
            let mut x = offset as i64;
            while x < w {
                let mut acc = 0.0;
                for ky in -r..=r {
                    for kx in -r..=r {
                        let wt = (-((kx * kx + ky * ky) as f64) / (2.0 * sigma * sigma)).exp() / norm;
                        acc += wt * f.get((x + kx).clamp(0, w - 1) as usize, (y + ky).clamp(0, h - 1) as usize, 0);
                    }
                }
                out.push(acc);
                x += scale as i64;
            }
            y += scale as i64;
        }
        out
    }

    #[test]
    fn kernel_shape() {
        assert_eq!(cubic_kernel(0.0), 1.0);
        assert_eq!(cubic_kernel(1.0), 0.0);
        assert_eq!(cubic_kernel(2.0), 0.0);
        for k in 0..20 {
            let t = k as f64 / 20.0;
            let s: f64 = (-1..=2).map(|i| cubic_kernel(t - i as f64)).sum();
            assert!((s - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn resize_constant_and_identity() {
        let c = Frame::filled(7, 5, 3, 0.42).unwrap();
        for (w, h) in [(3, 2), (14, 11), (7, 5)] {
            let r = bicubic_resize(&c, w, h).unwrap();
            assert!(r.data().iter().all(|&v| (v - 0.42).abs() < 1e-12));
        }
        let f = Frame::from_fn(9, 6, |x, y| ((x * 7 + y * 3) % 11) as f64 / 10.0).unwrap();
        assert_eq!(bicubic_resize(&f, 9, 6).unwrap(), f);
        assert!(bicubic_resize(&f, 0, 3).is_err());
    }

    #[test]
    fn resize_matches_direct_oracle() {
        let ramp = Frame::from_fn(8, 8, |x, y| (x + 2 * y) as f64 / 21.0).unwrap();
        let got = bicubic_resize(&ramp, 4, 4).unwrap();
        for (a, b) in got.data().iter().zip(bicubic_oracle(&ramp, 4, 4)) {
            assert!((a - b).abs() < 1e-6);
        }
        let tex = Frame::from_fn(13, 9, |x, y| ((x * x + 3 * y) % 7) as f64 / 6.0).unwrap();
        let got = bicubic_resize(&tex, 20, 5).unwrap();
        for (a, b) in got.data().iter().zip(bicubic_oracle(&tex, 20, 5)) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn bd_constant_delta_and_impulse() {
        let cfg = DegradeConfig::default();
        let c = Frame::filled(16, 12, 1, 0.3).unwrap();
        let out = bd_downsample(&c, &cfg).unwrap();
        assert_eq!((out.width(), out.height()), (4, 3));
        assert!(out.data().iter().all(|&v| (v - 0.3).abs() < 1e-12));

        let f = Frame::from_fn(17, 10, |x, y| ((x * 5 + y * 11) % 13) as f64 / 12.0).unwrap();
        let sharp = DegradeConfig {
            bd_sigma: 1e-6,
            bd_offset: 1,
            ..cfg
        };
        let out = bd_downsample(&f, &sharp).unwrap();
        assert_eq!((out.width(), out.height()), (4, 3));
        assert_eq!(out, subsample(&f, 4, 1));

        let impulse = Frame::from_fn(21, 19, |x, y| if (x, y) == (9, 8) { 1.0 } else { 0.0 }).unwrap();
        let out = bd_downsample(&impulse, &cfg).unwrap();
        for (a, b) in out.data().iter().zip(bd_oracle(&impulse, 1.6, 4, 0)) {
            assert!((a - b).abs() < 1e-6);
        }
    }

    #[test]
    fn bd_errors() {
        let f = Frame::filled(3, 8, 1, 0.0).unwrap();
        assert!(matches!(
            bd_downsample(&f, &DegradeConfig::default()),
            Err(Error::FrameTooSmall { .. })
        ));
        let bad = DegradeConfig {
            scale: 1,
            ..Default::default()
        };
        assert!(bd_downsample(&Frame::filled(8, 8, 1, 0.0).unwrap(), &bad).is_err());
    }

    #[test]
    fn noise_identity_and_determinism() {
        let f = Frame::from_fn(30, 20, |x, y| (x * y) as f64 / 600.0).unwrap();
        let zero = NoiseParams {
            sigma_s: 0.0,
            sigma_c: 0.0,
            seed: 9,
        };
        assert_eq!(add_noise(&f, &zero).unwrap(), f);
        let p = NoiseParams {
            seed: 1234,
            ..Default::default()
        };
        let a = add_noise(&f, &p).unwrap();
        let b = add_noise(&f, &p).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, add_noise(&f, &NoiseParams { seed: 1235, ..p }).unwrap());
        assert!(a.data().iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn noise_is_mean_preserving() {
        let f = Frame::filled(200, 200, 1, 0.5).unwrap();
        let n = 40_000.0;
        let mut total = 0.0;
        for seed in 0..5 {
            let out = add_noise(&f, &NoiseParams { seed, ..Default::default() }).unwrap();
            total += out.data().iter().sum::<f64>();
        }
        let mean = total / (5.0 * n);
        let sigma = NoiseParams::default().std_at(0.5);
        assert!((mean - 0.5).abs() < 3.0 * sigma / (5.0 * n as f64).sqrt());
    }

    #[test]
    fn pair_dimensions() {
        let src = Frame::from_fn(1920, 1080, |x, y| ((x / 7 + y / 5) % 2) as f64).unwrap();
        let (hr, lr) = prepare_pair(&src).unwrap();
        assert_eq!(hr, src);
        assert_eq!((lr.width(), lr.height()), (480, 270));
        assert!(prepare_pair(&Frame::filled(1919, 1080, 1, 0.0).unwrap()).is_err());
    }
}
