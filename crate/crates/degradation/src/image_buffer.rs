use std::path::Path;

use crate::error::{DegradationError, Result};

/// RGB image with floating-point values, HWC layout.
///
/// Values nominally live in `[0,1]` (8-bit files map linearly by `v/255`)
/// but are never clamped mid-pipeline; clamping and quantization happen only
/// in [`ImageBuffer::save_png`].
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    height: usize,
    width: usize,
    data: Vec<f32>,
}

impl ImageBuffer {
    pub const CHANNELS: usize = 3;

    pub fn new(height: usize, width: usize) -> Self {
        ImageBuffer {
            height,
            width,
            data: vec![0.0; height * width * Self::CHANNELS],
        }
    }

    pub fn from_data(height: usize, width: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != height * width * Self::CHANNELS {
            return Err(DegradationError::InvalidConfig(format!(
                "image data length {} != {height}x{width}x3",
                data.len()
            )));
        }
        Ok(ImageBuffer {
            height,
            width,
            data,
        })
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, y: usize, x: usize, c: usize) -> f32 {
        self.data[(y * self.width + x) * Self::CHANNELS + c]
    }

    #[inline]
    pub fn set(&mut self, y: usize, x: usize, c: usize, v: f32) {
        self.data[(y * self.width + x) * Self::CHANNELS + c] = v;
    }

    pub fn mean(&self) -> f64 {
        self.data.iter().map(|&v| v as f64).sum::<f64>() / self.data.len() as f64
    }

    pub fn crop(&self, y0: usize, x0: usize, h: usize, w: usize) -> Result<Self> {
        if y0 + h > self.height || x0 + w > self.width {
            return Err(DegradationError::InvalidConfig(format!(
                "crop {h}x{w}+{y0}+{x0} exceeds image {}x{}",
                self.height, self.width
            )));
        }
        let mut out = ImageBuffer::new(h, w);
        for y in 0..h {
            let src = &self.data[((y0 + y) * self.width + x0) * Self::CHANNELS..]
                [..w * Self::CHANNELS];
            out.data[y * w * Self::CHANNELS..][..w * Self::CHANNELS].copy_from_slice(src);
        }
        Ok(out)
    }

    /// Load an 8-bit PNG (any color type is converted to RGB), mapping
    /// values linearly by `v/255`.
    pub fn load_png(path: &Path) -> Result<Self> {
        let img = image::open(path)?.into_rgb8();
        let (w, h) = (img.width() as usize, img.height() as usize);
        let data = img
            .into_raw()
            .into_iter()
            .map(|v| v as f32 / 255.0)
            .collect();
        ImageBuffer::from_data(h, w, data)
    }

    /// Write an 8-bit RGB PNG. This is the only place values get clamped to
    /// `[0,1]` and quantized (round half up).
    pub fn save_png(&self, path: &Path) -> Result<()> {
        let bytes: Vec<u8> = self
            .data
            .iter()
            .map(|&v| (v.clamp(0.0, 1.0) * 255.0).round() as u8)
            .collect();
        let img = image::RgbImage::from_raw(self.width as u32, self.height as u32, bytes)
            .expect("raw buffer size matches dimensions");
        img.save_with_format(path, image::ImageFormat::Png)?;
        Ok(())
    }

    /// Copy with every value clamped to `[0,1]` (for metric computation on
    /// network output).
    pub fn clamped(&self) -> Self {
        ImageBuffer {
            height: self.height,
            width: self.width,
            data: self.data.iter().map(|v| v.clamp(0.0, 1.0)).collect(),
        }
    }
}
