use crate::error::{Error, Result};

use super::fixed::{check_bits, magnitude_code, FixedPointValue};

/// Tensor quantized with one symmetric scale, stored as signed
/// sign-magnitude codes (`sign * magnitude_code`).
#[derive(Debug, Clone, PartialEq)]
pub struct QuantizedTensor {
    shape: Vec<usize>,
    scale: f64,
    magnitude_bits: u32,
    codes: Vec<i32>,
}

impl QuantizedTensor {
    /// Per-tensor symmetric quantization with `scale = max |x|` (1.0 for an
    /// all-zero tensor).
    pub fn quantize(shape: &[usize], values: &[f64], magnitude_bits: u32) -> Result<Self> {
        check_bits(magnitude_bits)?;
        let expected: usize = shape.iter().product();
        if expected != values.len() {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} needs {expected} values, got {}",
                values.len()
            )));
        }
        let mut max_abs = 0.0f64;
        for &v in values {
            if !v.is_finite() {
                return Err(Error::NonFiniteInput);
            }
            max_abs = max_abs.max(v.abs());
        }
        let scale = if max_abs > 0.0 { max_abs } else { 1.0 };
        let codes = values
            .iter()
            .map(|&v| {
                let c = magnitude_code(v.abs() / scale, magnitude_bits) as i32;
                if v < 0.0 {
                    -c
                } else {
                    c
                }
            })
            .collect();
        Ok(QuantizedTensor {
            shape: shape.to_vec(),
            scale,
            magnitude_bits,
            codes,
        })
    }

    pub fn from_codes(
        shape: &[usize],
        codes: Vec<i32>,
        magnitude_bits: u32,
        scale: f64,
    ) -> Result<Self> {
        check_bits(magnitude_bits)?;
        if shape.iter().product::<usize>() != codes.len() {
            return Err(Error::ShapeMismatch(format!(
                "shape {shape:?} does not hold {} codes",
                codes.len()
            )));
        }
        let max = (1i64 << magnitude_bits) - 1;
        if codes.iter().any(|&c| i64::from(c).abs() > max) {
            return Err(Error::InvalidConfig(format!(
                "code outside {magnitude_bits}-bit magnitude range"
            )));
        }
        if !(scale.is_finite() && scale > 0.0) {
            return Err(Error::InvalidConfig(format!("invalid scale {scale}")));
        }
        Ok(QuantizedTensor {
            shape: shape.to_vec(),
            scale,
            magnitude_bits,
            codes,
        })
    }

    pub fn shape(&self) -> &[usize] {
        &self.shape
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn magnitude_bits(&self) -> u32 {
        self.magnitude_bits
    }

    pub fn codes(&self) -> &[i32] {
        &self.codes
    }

    pub fn get(&self, flat_index: usize) -> FixedPointValue {
        let c = self.codes[flat_index];
        FixedPointValue {
            sign: c < 0,
            magnitude_code: c.unsigned_abs(),
            magnitude_bits: self.magnitude_bits,
            scale: self.scale,
        }
    }

    /// Value of one code step in real units.
    pub fn step(&self) -> f64 {
        self.scale / f64::from(1u32 << self.magnitude_bits)
    }

    pub fn dequantize(&self) -> Vec<f64> {
        let step = self.step();
        self.codes.iter().map(|&c| f64::from(c) * step).collect()
    }
}
