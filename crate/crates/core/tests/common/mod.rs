#![allow(dead_code)]

use std::path::{Path, PathBuf};

use erqa::{Frame, Shift};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn data_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data")
}

/// Natural photographs shipped with the tests (160x160 crops).
pub fn natural_frames() -> Vec<(String, Frame)> {
    let dir = data_dir().join("natural");
    let mut out: Vec<(String, Frame)> = std::fs::read_dir(&dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "png"))
        .map(|p| {
            let name = p.file_stem().unwrap().to_string_lossy().into_owned();
            (name, erqa::load_frame(&p).unwrap())
        })
        .collect();
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out
}

/// `out(q) = f(q + d)` with replicate border: content moves by `-d`, so the
/// shift that realigns it with `f` is `d`.
pub fn translate(f: &Frame, d: Shift) -> Frame {
    let (w, h, c) = (f.width() as i64, f.height() as i64, f.channels());
    let mut data = Vec::with_capacity(f.data().len());
    for y in 0..h {
        for x in 0..w {
            let sx = (x + i64::from(d.dx)).clamp(0, w - 1) as usize;
            let sy = (y + i64::from(d.dy)).clamp(0, h - 1) as usize;
            for ch in 0..c {
                data.push(f.get(sx, sy, ch));
            }
        }
    }
    Frame::new(f.width(), f.height(), c, data).unwrap()
}

/// Random axis-aligned rectangles, discs and a diagonal bar on a flat
/// background, all kept at least `margin` pixels from the border.
pub fn shapes(w: usize, h: usize, margin: usize, seed: u64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bg = rng.random_range(0.1..0.3);
    let mut img = vec![bg; w * h];
    let (lo_x, hi_x) = (margin, w - margin);
    let (lo_y, hi_y) = (margin, h - margin);
    for _ in 0..rng.random_range(3..7) {
        let level: f64 = rng.random_range(0.4..0.95);
        let rw = rng.random_range(3..(hi_x - lo_x) / 2);
        let rh = rng.random_range(3..(hi_y - lo_y) / 2);
        let x0 = rng.random_range(lo_x..hi_x - rw);
        let y0 = rng.random_range(lo_y..hi_y - rh);
        if rng.random_bool(0.5) {
            for y in y0..y0 + rh {
                for x in x0..x0 + rw {
                    img[y * w + x] = level;
                }
            }
        } else {
            let r = (rw.min(rh) / 2) as f64;
            let (cx, cy) = (x0 as f64 + r, y0 as f64 + r);
            for y in y0..y0 + rh {
                for x in x0..x0 + rw {
                    if (x as f64 - cx).hypot(y as f64 - cy) <= r {
                        img[y * w + x] = level;
                    }
                }
            }
        }
    }
    Frame::new(w, h, 1, img).unwrap()
}

/// A mixed corpus of synthetic frames: shapes, gratings, checkerboards,
/// rings and text-like strokes.
pub fn synthetic_corpus(n: usize, w: usize, h: usize) -> Vec<Frame> {
    (0..n)
        .map(|i| {
            let seed = 1000 + i as u64;
            match i % 5 {
                0 => shapes(w, h, 8, seed),
                1 => {
                    let angle = 0.3 + i as f64 * 0.37;
                    let period = 5.0 + (i % 4) as f64 * 2.0;
                    Frame::from_fn(w, h, |x, y| {
                        let t = x as f64 * angle.cos() + y as f64 * angle.sin();
                        0.5 + 0.35 * (std::f64::consts::TAU * t / period).sin()
                    })
                    .unwrap()
                }
                2 => {
                    let cell = 3 + i;
                    Frame::from_fn(w, h, |x, y| if (x / cell + y / cell) % 2 == 0 { 0.15 } else { 0.85 }).unwrap()
                }
                3 => {
                    let (cx, cy) = (w as f64 / 2.0 + i as f64, h as f64 / 2.0);
                    Frame::from_fn(w, h, |x, y| {
                        let r = (x as f64 - cx).hypot(y as f64 - cy);
                        if (r / 4.0) as usize % 2 == 0 { 0.2 } else { 0.8 }
                    })
                    .unwrap()
                }
                _ => text_like(w, h, seed),
            }
        })
        .collect()
}

/// Thin dark strokes on a light page, loosely resembling glyphs.
pub fn text_like(w: usize, h: usize, seed: u64) -> Frame {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut img = vec![0.9; w * h];
    let mut y = 4;
    while y + 10 < h {
        let mut x = 3;
        while x + 7 < w {
            let glyph: u16 = rng.random();
            for k in 0..12 {
                if glyph >> k & 1 == 1 {
                    let (gx, gy) = (k % 3, k / 3);
                    for dy in 0..2 {
                        for dx in 0..2 {
                            img[(y + gy * 2 + dy) * w + x + gx * 2 + dx] = 0.1;
                        }
                    }
                }
            }
            x += 8;
        }
        y += 11;
    }
    Frame::new(w, h, 1, img).unwrap()
}
