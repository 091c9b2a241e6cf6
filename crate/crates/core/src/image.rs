//! RGB image model, plane handling, PNG I/O and the LSB primitive.

use std::fmt;
use std::fs;
use std::io::{self, Cursor};
use std::path::Path;

use image::{DynamicImage, ImageFormat, ImageReader};

use crate::bits::HEADER_BITS;
use crate::error::{Result, StegoError};

/// One of the three colour planes. Ordering is RED < GREEN < BLUE.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ChannelId {
    Red = 0,
    Green = 1,
    Blue = 2,
}

impl ChannelId {
    pub const ALL: [ChannelId; 3] = [ChannelId::Red, ChannelId::Green, ChannelId::Blue];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ChannelId::Red => "red",
            ChannelId::Green => "green",
            ChannelId::Blue => "blue",
        }
    }
}

impl fmt::Display for ChannelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A single M×N plane of 8-bit intensities, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Plane {
    width: u32,
    height: u32,
    samples: Vec<u8>,
}

impl Plane {
    pub fn new(width: u32, height: u32, samples: Vec<u8>) -> Result<Self> {
        check_dims(width, height)?;
        if samples.len() != width as usize * height as usize {
            return Err(StegoError::InvalidDimensions(width, height));
        }
        Ok(Self {
            width,
            height,
            samples,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn samples(&self) -> &[u8] {
        &self.samples
    }
}

fn check_dims(width: u32, height: u32) -> Result<()> {
    if width == 0 || height == 0 {
        return Err(StegoError::InvalidDimensions(width, height));
    }
    Ok(())
}

/// An 8-bit RGB image. Pixels are stored interleaved in row-major order
/// (top-left origin, left to right, top to bottom), which is also the
/// traversal order of every codec.
#[derive(Clone, PartialEq, Eq)]
pub struct RgbImage {
    width: u32,
    height: u32,
    pixels: Vec<[u8; 3]>,
}

impl fmt::Debug for RgbImage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RgbImage")
            .field("width", &self.width)
            .field("height", &self.height)
            .finish_non_exhaustive()
    }
}

impl RgbImage {
    pub fn from_pixels(width: u32, height: u32, pixels: Vec<[u8; 3]>) -> Result<Self> {
        check_dims(width, height)?;
        if pixels.len() != width as usize * height as usize {
            return Err(StegoError::InvalidDimensions(width, height));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// An image filled with a single colour.
    pub fn filled(width: u32, height: u32, rgb: [u8; 3]) -> Result<Self> {
        check_dims(width, height)?;
        Ok(Self {
            width,
            height,
            pixels: vec![rgb; width as usize * height as usize],
        })
    }

    pub fn from_fn(
        width: u32,
        height: u32,
        mut f: impl FnMut(u32, u32) -> [u8; 3],
    ) -> Result<Self> {
        check_dims(width, height)?;
        let pixels = (0..height)
            .flat_map(|y| (0..width).map(move |x| (x, y)))
            .map(|(x, y)| f(x, y))
            .collect();
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.pixels.len()
    }

    pub fn pixels(&self) -> &[[u8; 3]] {
        &self.pixels
    }

    pub(crate) fn pixels_mut(&mut self) -> &mut [[u8; 3]] {
        &mut self.pixels
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        self.pixels[y as usize * self.width as usize + x as usize]
    }

    pub fn same_dimensions(&self, other: &RgbImage) -> Result<()> {
        if self.width != other.width || self.height != other.height {
            return Err(StegoError::DimensionMismatch(
                self.width,
                self.height,
                other.width,
                other.height,
            ));
        }
        Ok(())
    }

    /// Largest sample value across all three planes.
    pub fn max_sample(&self) -> u8 {
        self.pixels
            .iter()
            .flat_map(|p| p.iter().copied())
            .max()
            .unwrap_or(0)
    }

    fn from_dynamic(img: DynamicImage) -> Result<Self> {
        let rgb = match img {
            DynamicImage::ImageRgb8(buf) => buf,
            DynamicImage::ImageRgba8(_)
            | DynamicImage::ImageLuma8(_)
            | DynamicImage::ImageLumaA8(_) => img.to_rgb8(),
            other => {
                return Err(StegoError::UnsupportedFormat(format!(
                    "{:?} samples, only 8-bit gray, RGB or RGBA is accepted",
                    other.color()
                )))
            }
        };
        let (width, height) = rgb.dimensions();
        let pixels = rgb.pixels().map(|p| p.0).collect();
        Self::from_pixels(width, height, pixels)
    }

    fn to_buffer(&self) -> image::RgbImage {
        let raw = self.pixels.iter().flat_map(|p| p.iter().copied()).collect();
        image::RgbImage::from_raw(self.width, self.height, raw)
            .expect("pixel buffer matches dimensions")
    }

    /// Decodes a PNG held in memory.
    pub fn decode_png(bytes: &[u8]) -> Result<Self> {
        let reader = ImageReader::with_format(Cursor::new(bytes), ImageFormat::Png);
        if image::guess_format(bytes).ok() != Some(ImageFormat::Png) {
            return Err(StegoError::UnsupportedFormat("not a PNG file".into()));
        }
        let img = reader
            .decode()
            .map_err(|e| StegoError::UnsupportedFormat(e.to_string()))?;
        Self::from_dynamic(img)
    }

    /// Encodes as an 8-bit RGB PNG.
    pub fn encode_png(&self) -> Result<Vec<u8>> {
        let mut out = Cursor::new(Vec::new());
        self.to_buffer()
            .write_to(&mut out, ImageFormat::Png)
            .map_err(|e| match e {
                image::ImageError::IoError(io) => StegoError::Io(io),
                other => StegoError::Io(io::Error::other(other)),
            })?;
        Ok(out.into_inner())
    }
}

pub fn load_image(path: impl AsRef<Path>) -> Result<RgbImage> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| match e.kind() {
        io::ErrorKind::NotFound => StegoError::FileNotFound(path.to_path_buf()),
        _ => StegoError::Io(e),
    })?;
    RgbImage::decode_png(&bytes)
}

pub fn save_image(image: &RgbImage, path: impl AsRef<Path>) -> Result<()> {
    let bytes = image.encode_png()?;
    fs::write(path, bytes)?;
    Ok(())
}

pub fn split_planes(image: &RgbImage) -> [Plane; 3] {
    ChannelId::ALL.map(|c| Plane {
        width: image.width,
        height: image.height,
        samples: image.pixels.iter().map(|p| p[c.index()]).collect(),
    })
}

pub fn merge_planes(red: &Plane, green: &Plane, blue: &Plane) -> Result<RgbImage> {
    for p in [green, blue] {
        if p.width != red.width || p.height != red.height {
            return Err(StegoError::DimensionMismatch(
                red.width, red.height, p.width, p.height,
            ));
        }
    }
    let pixels = red
        .samples
        .iter()
        .zip(&green.samples)
        .zip(&blue.samples)
        .map(|((&r, &g), &b)| [r, g, b])
        .collect();
    RgbImage::from_pixels(red.width, red.height, pixels)
}

#[inline]
pub fn replace_lsb(sample: u8, bit: u8) -> u8 {
    (sample & !1) | (bit & 1)
}

#[inline]
pub fn extract_lsb(sample: u8) -> u8 {
    sample & 1
}

/// One embeddable bit per pixel, for every method.
pub fn capacity_bits(image: &RgbImage) -> usize {
    image.pixel_count()
}

/// Bytes of message that fit once the 32-bit length header is accounted for.
pub fn payload_capacity_bytes(image: &RgbImage) -> usize {
    capacity_bits(image).saturating_sub(HEADER_BITS) / 8
}
