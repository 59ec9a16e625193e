//! Frames and frame sequences: loading, saving and colour reduction.
//!
//! Intensities are stored as `f64` normalized to `[0, 1]`, row-major, with
//! interleaved channels. PNG is the only on-disk format; 8- and 16-bit
//! inputs are accepted, output is always 8-bit.

use std::fs;
use std::path::{Path, PathBuf};

use image::{DynamicImage, ExtendedColorType};

use crate::error::{Error, Result};

/// Row-major raster of normalized intensities with 1 or 3 channels.
#[derive(Clone, Debug, PartialEq)]
pub struct Frame {
    width: usize,
    height: usize,
    channels: usize,
    data: Vec<f64>,
}

impl Frame {
    pub fn new(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Result<Self> {
        if channels != 1 && channels != 3 {
            return Err(Error::UnsupportedChannels(channels));
        }
        if width == 0 || height == 0 {
            return Err(Error::InvalidFrame(format!("zero-sized frame {width}x{height}")));
        }
        if data.len() != width * height * channels {
            return Err(Error::InvalidFrame(format!(
                "data length {} does not match {width}x{height}x{channels}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|v| !(0.0..=1.0).contains(*v)) {
            return Err(Error::InvalidFrame(format!("intensity {bad} outside [0, 1]")));
        }
        Ok(Frame {
            width,
            height,
            channels,
            data,
        })
    }

    /// Constant frame.
    pub fn filled(width: usize, height: usize, channels: usize, value: f64) -> Result<Self> {
        Frame::new(width, height, channels, vec![value; width * height * channels])
    }

    /// Single-channel frame built from `f(x, y)`; values are clamped to `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, mut f: impl FnMut(usize, usize) -> f64) -> Result<Self> {
        let mut data = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                data.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Frame::new(width, height, 1, data)
    }

    pub(crate) fn from_raw(width: usize, height: usize, channels: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), width * height * channels);
        Frame {
            width,
            height,
            channels,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn channels(&self) -> usize {
        self.channels
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<f64> {
        self.data
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize, c: usize) -> f64 {
        self.data[(y * self.width + x) * self.channels + c]
    }

    pub fn same_shape(&self, other: &Frame) -> bool {
        self.width == other.width && self.height == other.height && self.channels == other.channels
    }

    pub fn shape_string(&self) -> String {
        format!("{}x{}x{}", self.width, self.height, self.channels)
    }

    pub(crate) fn ensure_same_size(&self, other: &Frame) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::dims(
                format!("{}x{}", self.width, self.height),
                format!("{}x{}", other.width, other.height),
            ));
        }
        Ok(())
    }
}

/// Weights used to reduce RGB to a single luma channel.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LumaWeights {
    pub r: f64,
    pub g: f64,
    pub b: f64,
}

impl Default for LumaWeights {
    /// ITU-R BT.601 weights.
    fn default() -> Self {
        LumaWeights {
            r: 0.299,
            g: 0.587,
            b: 0.114,
        }
    }
}

/// Luma of `frame` with the default BT.601 weights.
pub fn to_luma(frame: &Frame) -> Result<Frame> {
    to_luma_with(frame, LumaWeights::default())
}

pub fn to_luma_with(frame: &Frame, weights: LumaWeights) -> Result<Frame> {
    match frame.channels {
        1 => Ok(frame.clone()),
        3 => {
            let data = frame
                .data
                .chunks_exact(3)
                .map(|px| (weights.r * px[0] + weights.g * px[1] + weights.b * px[2]).clamp(0.0, 1.0))
                .collect();
            Ok(Frame::from_raw(frame.width, frame.height, 1, data))
        }
        n => Err(Error::UnsupportedChannels(n)),
    }
}

/// Loads a PNG (8 or 16 bit, gray/RGB, alpha dropped) into a normalized frame.
pub fn load_frame(path: impl AsRef<Path>) -> Result<Frame> {
    let path = path.as_ref();
    let img = image::open(path).map_err(|source| Error::Read {
        path: path.to_path_buf(),
        source,
    })?;
    let (width, height) = (img.width() as usize, img.height() as usize);
    if width == 0 || height == 0 {
        return Err(Error::EmptyImage(path.to_path_buf()));
    }
    let scale8 = |v: u8| f64::from(v) / 255.0;
    let scale16 = |v: u16| f64::from(v) / 65535.0;
    let (channels, data): (usize, Vec<f64>) = match img {
        DynamicImage::ImageLuma8(b) => (1, b.into_raw().into_iter().map(scale8).collect()),
        DynamicImage::ImageLumaA8(b) => (1, b.into_raw().chunks_exact(2).map(|p| scale8(p[0])).collect()),
        DynamicImage::ImageRgb8(b) => (3, b.into_raw().into_iter().map(scale8).collect()),
        DynamicImage::ImageRgba8(b) => (
            3,
            b.into_raw()
                .chunks_exact(4)
                .flat_map(|p| [scale8(p[0]), scale8(p[1]), scale8(p[2])])
                .collect(),
        ),
        DynamicImage::ImageLuma16(b) => (1, b.into_raw().into_iter().map(scale16).collect()),
        DynamicImage::ImageLumaA16(b) => (1, b.into_raw().chunks_exact(2).map(|p| scale16(p[0])).collect()),
        DynamicImage::ImageRgb16(b) => (3, b.into_raw().into_iter().map(scale16).collect()),
        DynamicImage::ImageRgba16(b) => (
            3,
            b.into_raw()
                .chunks_exact(4)
                .flat_map(|p| [scale16(p[0]), scale16(p[1]), scale16(p[2])])
                .collect(),
        ),
        other => {
            return Err(Error::UnsupportedFormat {
                path: path.to_path_buf(),
                detail: format!("{:?}", other.color()),
            })
        }
    };
    Ok(Frame::from_raw(width, height, channels, data))
}

/// Quantizes an intensity to an 8-bit code, rounding half up.
#[inline]
pub fn quantize_u8(v: f64) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0 + 0.5).floor() as u8
}

/// Writes `frame` as an 8-bit PNG.
pub fn save_frame(frame: &Frame, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let bytes: Vec<u8> = frame.data.iter().map(|&v| quantize_u8(v)).collect();
    let color = if frame.channels == 1 {
        ExtendedColorType::L8
    } else {
        ExtendedColorType::Rgb8
    };
    image::save_buffer_with_format(
        path,
        &bytes,
        frame.width as u32,
        frame.height as u32,
        color,
        image::ImageFormat::Png,
    )
    .map_err(|e| Error::Write {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

/// Ordered frames of identical shape.
#[derive(Clone, Debug)]
pub struct FrameSequence {
    name: String,
    frames: Vec<Frame>,
    file_names: Vec<String>,
}

impl FrameSequence {
    pub fn new(name: impl Into<String>, frames: Vec<Frame>) -> Result<Self> {
        let file_names = (0..frames.len()).map(|i| format!("{i:06}.png")).collect();
        Self::with_file_names(name, frames, file_names)
    }

    pub fn with_file_names(name: impl Into<String>, frames: Vec<Frame>, file_names: Vec<String>) -> Result<Self> {
        let first = frames
            .first()
            .ok_or_else(|| Error::InvalidInput("frame sequence is empty".into()))?;
        if file_names.len() != frames.len() {
            return Err(Error::InvalidInput("file name count does not match frame count".into()));
        }
        if let Some((i, f)) = frames.iter().enumerate().find(|(_, f)| !f.same_shape(first)) {
            return Err(Error::dims(
                first.shape_string(),
                format!("{} (frame {} `{}`)", f.shape_string(), i, file_names[i]),
            ));
        }
        Ok(FrameSequence {
            name: name.into(),
            frames,
            file_names,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames
    }

    pub fn file_names(&self) -> &[String] {
        &self.file_names
    }

    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }
}

fn is_supported(path: &Path) -> bool {
    path.is_file()
        && path
            .extension()
            .and_then(|e| e.to_str())
            .is_some_and(|e| e.eq_ignore_ascii_case("png"))
}

/// Lists the supported image files of `dir` in lexicographic file-name order.
pub fn list_frames(dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let entries = fs::read_dir(dir).map_err(|source| Error::Io {
        path: dir.to_path_buf(),
        source,
    })?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|source| Error::Io {
            path: dir.to_path_buf(),
            source,
        })?;
        let path = entry.path();
        if is_supported(&path) {
            paths.push(path);
        }
    }
    paths.sort_by(|a, b| a.file_name().cmp(&b.file_name()));
    if paths.is_empty() {
        return Err(Error::EmptyDirectory(dir.to_path_buf()));
    }
    Ok(paths)
}

/// Loads every PNG in `dir`, ordered by file name.
pub fn load_sequence(dir: impl AsRef<Path>) -> Result<FrameSequence> {
    let dir = dir.as_ref();
    let paths = list_frames(dir)?;
    let mut frames = Vec::with_capacity(paths.len());
    let mut names = Vec::with_capacity(paths.len());
    for path in &paths {
        frames.push(load_frame(path)?);
        names.push(path.file_name().unwrap_or_default().to_string_lossy().into_owned());
    }
    let name = dir
        .file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| dir.display().to_string());
    FrameSequence::with_file_names(name, frames, names)
}
