//! PSNR and single-scale SSIM baselines on normalized intensities.

use crate::error::{Error, Result};
use crate::frame::{to_luma, Frame};

fn ensure_same_shape(gt: &Frame, dist: &Frame) -> Result<()> {
    if !gt.same_shape(dist) {
        return Err(Error::dims(gt.shape_string(), dist.shape_string()));
    }
    Ok(())
}

pub fn mse(gt: &Frame, dist: &Frame) -> Result<f64> {
    ensure_same_shape(gt, dist)?;
    let sum: f64 = gt.data().iter().zip(dist.data()).map(|(a, b)| (a - b) * (a - b)).sum();
    Ok(sum / gt.data().len() as f64)
}

/// PSNR from a mean squared error with peak 1; zero error is `+inf`.
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse == 0.0 {
        f64::INFINITY
    } else {
        -10.0 * mse.log10()
    }
}

/// Peak signal-to-noise ratio in dB over all channels, peak 1.0.
pub fn psnr(gt: &Frame, dist: &Frame) -> Result<f64> {
    mse(gt, dist).map(psnr_from_mse)
}

pub const SSIM_WINDOW: usize = 11;
pub const SSIM_SIGMA: f64 = 1.5;
pub const SSIM_K1: f64 = 0.01;
pub const SSIM_K2: f64 = 0.03;

/// Normalized 1-D Gaussian taps of the SSIM window.
pub fn ssim_taps() -> [f64; SSIM_WINDOW] {
    let mut taps = [0.0; SSIM_WINDOW];
    let r = (SSIM_WINDOW / 2) as f64;
    for (i, t) in taps.iter_mut().enumerate() {
        let d = i as f64 - r;
        *t = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
    }
    let s: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= s);
    taps
}

/// Valid-mode separable filtering with the SSIM window.
fn window_filter(src: &[f64], w: usize, h: usize, taps: &[f64; SSIM_WINDOW]) -> Vec<f64> {
    let (ow, oh) = (w - SSIM_WINDOW + 1, h - SSIM_WINDOW + 1);
    let mut tmp = vec![0.0; ow * h];
    for y in 0..h {
        let row = &src[y * w..(y + 1) * w];
        for x in 0..ow {
            tmp[y * ow + x] = taps.iter().zip(&row[x..x + SSIM_WINDOW]).map(|(t, v)| t * v).sum();
        }
    }
    let mut out = vec![0.0; ow * oh];
    for y in 0..oh {
        for (k, t) in taps.iter().enumerate() {
            let line = &tmp[(y + k) * ow..(y + k + 1) * ow];
            for (o, v) in out[y * ow..(y + 1) * ow].iter_mut().zip(line) {
                *o += t * v;
            }
        }
    }
    out
}

/// Mean SSIM over all valid 11x11 window positions, computed on luma.
pub fn ssim(gt: &Frame, dist: &Frame) -> Result<f64> {
    gt.ensure_same_size(dist)?;
    let (w, h) = (gt.width(), gt.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(Error::FrameTooSmall {
            width: w,
            height: h,
            min_width: SSIM_WINDOW,
            min_height: SSIM_WINDOW,
        });
    }
    let x = to_luma(gt)?;
    let y = to_luma(dist)?;
    let (x, y) = (x.data(), y.data());
    let taps = ssim_taps();
    let xx: Vec<f64> = x.iter().map(|v| v * v).collect();
    let yy: Vec<f64> = y.iter().map(|v| v * v).collect();
    let xy: Vec<f64> = x.iter().zip(y).map(|(a, b)| a * b).collect();
    let mu_x = window_filter(x, w, h, &taps);
    let mu_y = window_filter(y, w, h, &taps);
    let e_xx = window_filter(&xx, w, h, &taps);
    let e_yy = window_filter(&yy, w, h, &taps);
    let e_xy = window_filter(&xy, w, h, &taps);

    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let mut total = 0.0;
    for i in 0..mu_x.len() {
        let (mx, my) = (mu_x[i], mu_y[i]);
        let vx = e_xx[i] - mx * mx;
        let vy = e_yy[i] - my * my;
        let cov = e_xy[i] - mx * my;
        let num = (2.0 * mx * my + c1) * (2.0 * cov + c2);
        let den = (mx * mx + my * my + c1) * (vx + vy + c2);
        total += num / den;
    }
    Ok(total / mu_x.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Direct per-window statistics with explicit 2-D weights.
    fn ssim_oracle(a: &Frame, b: &Frame) -> f64 {
        let t = ssim_taps();
        let (w, h) = (a.width(), a.height());
        let c1 = 0.01f64.powi(2);
        let c2 = 0.03f64.powi(2);
        let mut total = 0.0;
        let mut count = 0;
        for y0 in 0..=h - 11 {
            for x0 in 0..=w - 11 {
                let (mut ma, mut mb) = (0.0, 0.0);
                for j in 0..11 {
                    for i in 0..11 {
                        ma += t[i] * t[j] * a.get(x0 + i, y0 + j, 0);
                        mb += t[i] * t[j] * b.get(x0 + i, y0 + j, 0);
                    }
                }
                let (mut va, mut vb, mut cab) = (0.0, 0.0, 0.0);
                for j in 0..11 {
                    for i in 0..11 {
                        let da = a.get(x0 + i, y0 + j, 0) - ma;
                        let db = b.get(x0 + i, y0 + j, 0) - mb;
                        va += t[i] * t[j] * da * da;
                        vb += t[i] * t[j] * db * db;
                        cab += t[i] * t[j] * da * db;
                    }
                }
                total += (2.0 * ma * mb + c1) * (2.0 * cab + c2) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
                count += 1;
            }
        }
        total / count as f64
    }

    fn texture(w: usize, h: usize) -> Frame {
        Frame::from_fn(w, h, |x, y| {
            0.5 + 0.3 * ((x as f64) * 0.7).sin() * ((y as f64) * 0.4).cos() + 0.1 * (((x * 31 + y * 17) % 7) as f64 / 7.0)
        })
        .unwrap()
    }

    #[test]
    fn psnr_examples() {
        let f = texture(16, 16);
        assert_eq!(psnr(&f, &f).unwrap(), f64::INFINITY);
        let base = Frame::filled(8, 8, 1, 0.25).unwrap();
        let off = Frame::filled(8, 8, 1, 0.25 + 16.0 / 255.0).unwrap();
        let expect = 20.0 * (255.0f64 / 16.0).log10();
        assert!((psnr(&base, &off).unwrap() - expect).abs() < 1e-9);
        assert!((expect - 24.05).abs() < 0.01);
        let cb = Frame::from_fn(8, 8, |x, y| ((x + y) % 2) as f64).unwrap();
        let inv = Frame::from_fn(8, 8, |x, y| ((x + y + 1) % 2) as f64).unwrap();
        assert_eq!(psnr(&cb, &inv).unwrap(), 0.0);
        assert!(psnr(&cb, &Frame::filled(8, 8, 3, 0.0).unwrap()).is_err());
    }

    #[test]
    fn ssim_identity_inverse_and_constants() {
        let f = texture(24, 20);
        assert_eq!(ssim(&f, &f).unwrap(), 1.0);
        let inv = Frame::new(24, 20, 1, f.data().iter().map(|v| 1.0 - v).collect()).unwrap();
        assert!((ssim(&f, &inv).unwrap() - ssim_oracle(&f, &inv)).abs() < 1e-9);
        let blurred = crate::degrade::gaussian_blur(&f, 1.2).unwrap();
        assert!((ssim(&f, &blurred).unwrap() - ssim_oracle(&f, &blurred)).abs() < 1e-9);

        let (c1v, c2v) = (0.3, 0.7);
        let a = Frame::filled(12, 12, 1, c1v).unwrap();
        let b = Frame::filled(12, 12, 1, c2v).unwrap();
        let k = 0.01f64.powi(2);
        let expect = (2.0 * c1v * c2v + k) / (c1v * c1v + c2v * c2v + k);
        assert!((ssim(&a, &b).unwrap() - expect).abs() < 1e-9);
        assert!(ssim(&Frame::filled(10, 12, 1, 0.0).unwrap(), &Frame::filled(10, 12, 1, 0.0).unwrap()).is_err());
    }
}
