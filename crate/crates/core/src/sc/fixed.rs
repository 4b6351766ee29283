use crate::error::{Error, Result};

/// Sign-magnitude fixed-point operand:
/// `(-1)^sign * (magnitude_code / 2^magnitude_bits) * scale`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedPointValue {
    pub sign: bool,
    pub magnitude_code: u32,
    pub magnitude_bits: u32,
    pub scale: f64,
}

impl FixedPointValue {
    pub fn new(sign: bool, magnitude_code: u32, magnitude_bits: u32, scale: f64) -> Result<Self> {
        check_bits(magnitude_bits)?;
        if magnitude_code > max_code(magnitude_bits) {
            return Err(Error::InvalidConfig(format!(
                "magnitude code {magnitude_code} exceeds {magnitude_bits}-bit range"
            )));
        }
        check_scale(scale)?;
        Ok(FixedPointValue {
            // negative zero normalizes to sign 0
            sign: sign && magnitude_code != 0,
            magnitude_code,
            magnitude_bits,
            scale,
        })
    }

    /// Builds from a signed code `±magnitude_code`.
    pub fn from_signed_code(code: i32, magnitude_bits: u32, scale: f64) -> Result<Self> {
        Self::new(code < 0, code.unsigned_abs(), magnitude_bits, scale)
    }

    pub fn signed_code(&self) -> i32 {
        let c = self.magnitude_code as i32;
        if self.sign {
            -c
        } else {
            c
        }
    }

    /// Magnitude in `[0, 1)` as seen by the comparator.
    pub fn magnitude(&self) -> f64 {
        f64::from(self.magnitude_code) / f64::from(1u32 << self.magnitude_bits)
    }

    pub fn value(&self) -> f64 {
        let m = self.magnitude() * self.scale;
        if self.sign {
            -m
        } else {
            m
        }
    }
}

pub(crate) fn max_code(bits: u32) -> u32 {
    (1u32 << bits) - 1
}

pub(crate) fn check_bits(bits: u32) -> Result<()> {
    if (1..=16).contains(&bits) {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "magnitude_bits must be in [1, 16], got {bits}"
        )))
    }
}

fn check_scale(scale: f64) -> Result<()> {
    if scale.is_finite() && scale > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidConfig(format!(
            "scale must be finite and positive, got {scale}"
        )))
    }
}

/// Rounds `|value| / scale` onto the `2^-bits` grid (ties to even),
/// saturating at the largest code.
pub fn quantize(value: f64, magnitude_bits: u32, scale: f64) -> Result<FixedPointValue> {
    if !value.is_finite() {
        return Err(Error::NonFiniteInput);
    }
    check_bits(magnitude_bits)?;
    check_scale(scale)?;
    let code = magnitude_code(value.abs() / scale, magnitude_bits);
    FixedPointValue::new(value.is_sign_negative(), code, magnitude_bits, scale)
}

#[inline]
pub(crate) fn magnitude_code(ratio: f64, bits: u32) -> u32 {
    let max = max_code(bits);
    let scaled = (ratio * f64::from(1u32 << bits)).round_ties_even();
    if scaled >= f64::from(max) {
        max
    } else {
        scaled as u32
    }
}
