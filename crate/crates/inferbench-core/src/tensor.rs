//! Dense HWC image tensors and their binary blob encoding.

use alloc::vec::Vec;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TensorError {
    #[error("data length {got} does not match {h}x{w}x{c}")]
    ShapeMismatch { h: u32, w: u32, c: u32, got: usize },
    #[error("tensor dimensions must be nonzero")]
    ZeroDimension,
    #[error("blob truncated: expected {expected} bytes, got {got}")]
    Truncated { expected: usize, got: usize },
}

/// Image tensor in height-major HWC layout, f32 elements.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageTensor {
    pub height: u32,
    pub width: u32,
    pub channels: u32,
    pub data: Vec<f32>,
}

impl ImageTensor {
    pub fn new(height: u32, width: u32, channels: u32, data: Vec<f32>) -> Result<Self, TensorError> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(TensorError::ZeroDimension);
        }
        let expected = height as usize * width as usize * channels as usize;
        if data.len() != expected {
            return Err(TensorError::ShapeMismatch {
                h: height,
                w: width,
                c: channels,
                got: data.len(),
            });
        }
        Ok(ImageTensor { height, width, channels, data })
    }

    pub fn zeros(height: u32, width: u32, channels: u32) -> Result<Self, TensorError> {
        if height == 0 || width == 0 || channels == 0 {
            return Err(TensorError::ZeroDimension);
        }
        let len = height as usize * width as usize * channels as usize;
        Ok(ImageTensor {
            height,
            width,
            channels,
            data: alloc::vec![0.0; len],
        })
    }

    #[inline]
    pub fn index(&self, y: u32, x: u32, c: u32) -> usize {
        (y as usize * self.width as usize + x as usize) * self.channels as usize + c as usize
    }

    #[inline]
    pub fn get(&self, y: u32, x: u32, c: u32) -> f32 {
        self.data[self.index(y, x, c)]
    }

    #[inline]
    pub fn set(&mut self, y: u32, x: u32, c: u32, v: f32) {
        let i = self.index(y, x, c);
        self.data[i] = v;
    }

    /// Encode as a little-endian blob: `h, w, c` as three u32 values,
    /// followed by `h*w*c` f32 values in HWC order. Bit-exact round trip.
    pub fn to_blob(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(12 + self.data.len() * 4);
        out.extend_from_slice(&self.height.to_le_bytes());
        out.extend_from_slice(&self.width.to_le_bytes());
        out.extend_from_slice(&self.channels.to_le_bytes());
        for v in &self.data {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_blob(blob: &[u8]) -> Result<Self, TensorError> {
        if blob.len() < 12 {
            return Err(TensorError::Truncated { expected: 12, got: blob.len() });
        }
        let h = u32::from_le_bytes(blob[0..4].try_into().unwrap());
        let w = u32::from_le_bytes(blob[4..8].try_into().unwrap());
        let c = u32::from_le_bytes(blob[8..12].try_into().unwrap());
        if h == 0 || w == 0 || c == 0 {
            return Err(TensorError::ZeroDimension);
        }
        let count = h as usize * w as usize * c as usize;
        let expected = 12 + count * 4;
        if blob.len() != expected {
            return Err(TensorError::Truncated { expected, got: blob.len() });
        }
        let mut data = Vec::with_capacity(count);
        for i in 0..count {
            let off = 12 + i * 4;
            data.push(f32::from_le_bytes(blob[off..off + 4].try_into().unwrap()));
        }
        Ok(ImageTensor { height: h, width: w, channels: c, data })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn blob_round_trip_is_bit_exact() {
        let data: Vec<f32> = vec![0.0, -1.5, 3.25, f32::MIN_POSITIVE, 1e10, -0.0];
        let t = ImageTensor::new(1, 2, 3, data).unwrap();
        let blob = t.to_blob();
        assert_eq!(blob.len(), 12 + 6 * 4);
        let back = ImageTensor::from_blob(&blob).unwrap();
        assert_eq!(back.height, 1);
        assert_eq!(back.width, 2);
        assert_eq!(back.channels, 3);
        for (a, b) in t.data.iter().zip(back.data.iter()) {
            assert_eq!(a.to_bits(), b.to_bits());
        }
    }

    #[test]
    fn blob_header_is_little_endian() {
        let t = ImageTensor::new(2, 1, 1, vec![0.5, 0.25]).unwrap();
        let blob = t.to_blob();
        assert_eq!(&blob[0..4], &[2, 0, 0, 0]);
        assert_eq!(&blob[4..8], &[1, 0, 0, 0]);
        assert_eq!(&blob[8..12], &[1, 0, 0, 0]);
        assert_eq!(&blob[12..16], &0.5f32.to_le_bytes());
    }

    #[test]
    fn truncated_and_oversized_blobs_are_rejected() {
        let t = ImageTensor::new(1, 1, 3, vec![1.0, 2.0, 3.0]).unwrap();
        let mut blob = t.to_blob();
        blob.pop();
        assert!(matches!(ImageTensor::from_blob(&blob), Err(TensorError::Truncated { .. })));
        let mut blob = t.to_blob();
        blob.push(0);
        assert!(matches!(ImageTensor::from_blob(&blob), Err(TensorError::Truncated { .. })));
        assert!(matches!(ImageTensor::from_blob(&[0, 0]), Err(TensorError::Truncated { .. })));
    }

    #[test]
    fn shape_validation() {
        assert!(matches!(
            ImageTensor::new(2, 2, 1, vec![0.0; 3]),
            Err(TensorError::ShapeMismatch { .. })
        ));
        assert!(matches!(ImageTensor::new(0, 2, 1, vec![]), Err(TensorError::ZeroDimension)));
        // zero dims encoded in a blob header are rejected too
        let mut blob = Vec::new();
        blob.extend_from_slice(&0u32.to_le_bytes());
        blob.extend_from_slice(&1u32.to_le_bytes());
        blob.extend_from_slice(&1u32.to_le_bytes());
        assert!(matches!(ImageTensor::from_blob(&blob), Err(TensorError::ZeroDimension)));
    }

    #[test]
    fn hwc_indexing() {
        let mut t = ImageTensor::zeros(2, 2, 2).unwrap();
        t.set(1, 0, 1, 9.0);
        // row 1, col 0, channel 1 -> ((1*2)+0)*2 + 1 = 5
        assert_eq!(t.data[5], 9.0);
        assert_eq!(t.get(1, 0, 1), 9.0);
    }
}
