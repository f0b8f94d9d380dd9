//! Raster types flowing through the pipeline.
//!
//! All rasters are row-major with 8-bit samples. Frames carry RGB triples and
//! a monotonic timestamp; the single-channel rasters carry whatever the stage
//! that produced them computed.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::geometry::Point;

pub type Rgb = [u8; 3];

/// Magnitudes strictly above this value are edges.
pub const EDGE_THRESHOLD: u8 = 128;

fn check_dims(width: usize, height: usize, len: usize) -> Result<()> {
    if width < 3 || height < 3 {
        return Err(Error::TooSmall { width, height });
    }
    if len != width * height {
        return Err(Error::PixelCount {
            expected: width * height,
            actual: len,
        });
    }
    Ok(())
}

#[inline]
fn in_bounds(width: usize, height: usize, p: Point) -> bool {
    p.x >= 0 && p.y >= 0 && (p.x as usize) < width && (p.y as usize) < height
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Frame {
    width: usize,
    height: usize,
    pixels: Vec<Rgb>,
    /// Milliseconds, monotonic across a stream.
    pub timestamp_ms: u64,
}

impl Frame {
    pub fn new(width: usize, height: usize, pixels: Vec<Rgb>, timestamp_ms: u64) -> Result<Self> {
        check_dims(width, height, pixels.len())?;
        Ok(Self {
            width,
            height,
            pixels,
            timestamp_ms,
        })
    }

    pub fn filled(width: usize, height: usize, color: Rgb) -> Result<Self> {
        Self::new(width, height, vec![color; width * height], 0)
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> Rgb,
    ) -> Result<Self> {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y));
            }
        }
        Self::new(width, height, pixels, 0)
    }

    /// Builds a frame from packed `RGBRGB...` bytes.
    pub fn from_bytes(
        width: usize,
        height: usize,
        bytes: &[u8],
        timestamp_ms: u64,
    ) -> Result<Self> {
        if bytes.len() != width * height * 3 {
            return Err(Error::PixelCount {
                expected: width * height * 3,
                actual: bytes.len(),
            });
        }
        let pixels = bytes.chunks_exact(3).map(|c| [c[0], c[1], c[2]]).collect();
        Self::new(width, height, pixels, timestamp_ms)
    }

    pub fn with_timestamp(mut self, timestamp_ms: u64) -> Self {
        self.timestamp_ms = timestamp_ms;
        self
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.width, self.height)
    }

    pub fn pixels(&self) -> &[Rgb] {
        &self.pixels
    }

    pub fn pixels_mut(&mut self) -> &mut [Rgb] {
        &mut self.pixels
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        self.pixels.iter().flatten().copied().collect()
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> Rgb {
        self.pixels[y * self.width + x]
    }

    pub fn in_bounds(&self, p: Point) -> bool {
        in_bounds(self.width, self.height, p)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GrayImage {
    width: usize,
    height: usize,
    values: Vec<u8>,
}

impl GrayImage {
    pub fn new(width: usize, height: usize, values: Vec<u8>) -> Result<Self> {
        check_dims(width, height, values.len())?;
        Ok(Self {
            width,
            height,
            values,
        })
    }

    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> u8,
    ) -> Result<Self> {
        let mut values = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                values.push(f(x, y));
            }
        }
        Self::new(width, height, values)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.values[y * self.width + x]
    }
}

/// Gradient magnitude raster with a binary edge predicate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeImage {
    width: usize,
    height: usize,
    magnitudes: Vec<u8>,
    threshold: u8,
}

impl EdgeImage {
    pub fn new(width: usize, height: usize, magnitudes: Vec<u8>) -> Result<Self> {
        Self::with_threshold(width, height, magnitudes, EDGE_THRESHOLD)
    }

    pub fn with_threshold(
        width: usize,
        height: usize,
        magnitudes: Vec<u8>,
        threshold: u8,
    ) -> Result<Self> {
        check_dims(width, height, magnitudes.len())?;
        Ok(Self {
            width,
            height,
            magnitudes,
            threshold,
        })
    }

    /// Binary edge image: `true` cells get magnitude 255, the rest 0.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut is_edge: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self> {
        let mut magnitudes = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                magnitudes.push(if is_edge(x, y) { 255 } else { 0 });
            }
        }
        Self::new(width, height, magnitudes)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn threshold(&self) -> u8 {
        self.threshold
    }

    pub fn magnitudes(&self) -> &[u8] {
        &self.magnitudes
    }

    #[inline]
    pub fn magnitude(&self, x: usize, y: usize) -> u8 {
        self.magnitudes[y * self.width + x]
    }

    #[inline]
    pub fn in_bounds(&self, p: Point) -> bool {
        in_bounds(self.width, self.height, p)
    }

    /// Edge test for an in-bounds point.
    #[inline]
    pub fn is_edge(&self, p: Point) -> bool {
        self.magnitudes[p.y as usize * self.width + p.x as usize] > self.threshold
    }

    pub fn edge_count(&self) -> usize {
        self.magnitudes
            .iter()
            .filter(|&&m| m > self.threshold)
            .count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiffImage {
    width: usize,
    height: usize,
    values: Vec<u8>,
    compensation: u8,
}

impl DiffImage {
    pub fn new(width: usize, height: usize, values: Vec<u8>, compensation: u8) -> Result<Self> {
        check_dims(width, height, values.len())?;
        Ok(Self {
            width,
            height,
            values,
            compensation,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn values(&self) -> &[u8] {
        &self.values
    }

    /// Brightness compensation already subtracted from every value.
    pub fn compensation(&self) -> u8 {
        self.compensation
    }

    #[inline]
    pub fn get(&self, x: usize, y: usize) -> u8 {
        self.values[y * self.width + x]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_bad_dimensions() {
        assert_eq!(
            Frame::new(2, 5, vec![[0; 3]; 10], 0),
            Err(Error::TooSmall {
                width: 2,
                height: 5
            })
        );
        assert_eq!(
            GrayImage::new(4, 4, vec![0; 15]),
            Err(Error::PixelCount {
                expected: 16,
                actual: 15
            })
        );
    }

    #[test]
    fn edge_predicate_is_strict() {
        let img = EdgeImage::new(3, 3, vec![0, 128, 129, 255, 0, 0, 0, 0, 0]).unwrap();
        assert!(!img.is_edge(Point::new(1, 0)));
        assert!(img.is_edge(Point::new(2, 0)));
        assert!(img.is_edge(Point::new(0, 1)));
        assert_eq!(img.edge_count(), 2);
    }

    #[test]
    fn bytes_round_trip() {
        let f = Frame::from_fn(4, 3, |x, y| [x as u8, y as u8, 7]).unwrap();
        let g = Frame::from_bytes(4, 3, &f.to_bytes(), 0).unwrap();
        assert_eq!(f, g);
    }
}
