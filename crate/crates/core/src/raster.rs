//! In-memory page image: row-major 8-bit RGB.

use std::path::{Path, PathBuf};

/// A page image. `data` holds `width * height * 3` bytes, row-major,
/// channels interleaved R, G, B.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Raster {
    width: u32,
    height: u32,
    data: Vec<u8>,
}

#[derive(Debug, thiserror::Error)]
pub enum RasterError {
    #[error("{}: {source}", path.display())]
    Image {
        path: PathBuf,
        #[source]
        source: image::ImageError,
    },
    #[error("{width}x{height} raster needs {} bytes, got {len}", (*width as usize) * (*height as usize) * 3)]
    DimensionMismatch { width: u32, height: u32, len: usize },
    #[error("raster dimensions must be positive, got {width}x{height}")]
    EmptyDimensions { width: u32, height: u32 },
}

impl Raster {
    pub fn new(width: u32, height: u32, fill: [u8; 3]) -> Self {
        assert!(width > 0 && height > 0, "raster dimensions must be positive");
        let mut data = Vec::with_capacity(width as usize * height as usize * 3);
        for _ in 0..(width as usize * height as usize) {
            data.extend_from_slice(&fill);
        }
        Self {
            width,
            height,
            data,
        }
    }

    pub fn from_raw(width: u32, height: u32, data: Vec<u8>) -> Result<Self, RasterError> {
        if width == 0 || height == 0 {
            return Err(RasterError::EmptyDimensions { width, height });
        }
        if data.len() != width as usize * height as usize * 3 {
            return Err(RasterError::DimensionMismatch {
                width,
                height,
                len: data.len(),
            });
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn data(&self) -> &[u8] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [u8] {
        &mut self.data
    }

    #[inline]
    fn offset(&self, x: u32, y: u32) -> usize {
        debug_assert!(x < self.width && y < self.height);
        (y as usize * self.width as usize + x as usize) * 3
    }

    #[inline]
    pub fn get(&self, x: u32, y: u32) -> [u8; 3] {
        let o = self.offset(x, y);
        [self.data[o], self.data[o + 1], self.data[o + 2]]
    }

    #[inline]
    pub fn set(&mut self, x: u32, y: u32, px: [u8; 3]) {
        let o = self.offset(x, y);
        self.data[o..o + 3].copy_from_slice(&px);
    }

    /// Per-channel mean over all pixels.
    pub fn mean_rgb(&self) -> [f64; 3] {
        let mut sums = [0u64; 3];
        for chunk in self.data.chunks_exact(3) {
            sums[0] += chunk[0] as u64;
            sums[1] += chunk[1] as u64;
            sums[2] += chunk[2] as u64;
        }
        let n = (self.width as usize * self.height as usize) as f64;
        [
            sums[0] as f64 / n,
            sums[1] as f64 / n,
            sums[2] as f64 / n,
        ]
    }

    /// Mean absolute per-byte deviation from `other`. Panics if the
    /// dimensions differ.
    pub fn mean_abs_diff(&self, other: &Raster) -> f64 {
        assert_eq!(
            (self.width, self.height),
            (other.width, other.height),
            "mean_abs_diff requires equal dimensions"
        );
        let total: u64 = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a.abs_diff(*b) as u64)
            .sum();
        total as f64 / self.data.len() as f64
    }

    pub fn save_png(&self, path: &Path) -> Result<(), RasterError> {
        let img: image::RgbImage =
            image::ImageBuffer::from_raw(self.width, self.height, self.data.clone())
                .expect("raster invariant guarantees buffer size");
        img.save_with_format(path, image::ImageFormat::Png)
            .map_err(|source| RasterError::Image {
                path: path.to_path_buf(),
                source,
            })
    }

    pub fn load_png(path: &Path) -> Result<Self, RasterError> {
        let img = image::open(path)
            .map_err(|source| RasterError::Image {
                path: path.to_path_buf(),
                source,
            })?
            .to_rgb8();
        let (width, height) = img.dimensions();
        Ok(Self {
            width,
            height,
            data: img.into_raw(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn buffer_layout() {
        let mut r = Raster::new(4, 2, [255, 255, 255]);
        assert_eq!(r.data().len(), 4 * 2 * 3);
        r.set(3, 1, [1, 2, 3]);
        assert_eq!(r.get(3, 1), [1, 2, 3]);
        assert_eq!(r.get(0, 0), [255, 255, 255]);
        let offset = (4 + 3) * 3; // row 1 of width 4, column 3
        assert_eq!(&r.data()[offset..], &[1, 2, 3]);
    }

    #[test]
    fn from_raw_validates_length() {
        assert!(Raster::from_raw(2, 2, vec![0; 12]).is_ok());
        assert!(matches!(
            Raster::from_raw(2, 2, vec![0; 11]),
            Err(RasterError::DimensionMismatch { .. })
        ));
        assert!(matches!(
            Raster::from_raw(0, 2, vec![]),
            Err(RasterError::EmptyDimensions { .. })
        ));
    }

    #[test]
    fn png_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rt.png");
        let mut r = Raster::new(16, 9, [200, 100, 50]);
        r.set(5, 5, [0, 0, 0]);
        r.save_png(&path).unwrap();
        let loaded = Raster::load_png(&path).unwrap();
        assert_eq!(loaded, r);
    }

    #[test]
    fn png_encoding_deterministic() {
        let dir = tempfile::tempdir().unwrap();
        let a = dir.path().join("a.png");
        let b = dir.path().join("b.png");
        let r = Raster::new(32, 32, [128, 128, 128]);
        r.save_png(&a).unwrap();
        r.save_png(&b).unwrap();
        assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
    }

    #[test]
    fn mean_helpers() {
        let mut r = Raster::new(2, 1, [10, 20, 30]);
        r.set(1, 0, [20, 40, 60]);
        assert_eq!(r.mean_rgb(), [15.0, 30.0, 45.0]);
        let base = Raster::new(2, 1, [10, 20, 30]);
        // one pixel differs by (10, 20, 30) over 6 bytes total
        assert!((r.mean_abs_diff(&base) - 10.0).abs() < 1e-12);
    }
}
