use rug::{Complex, Float};

use crate::error::{Error, Result};

/// Smallest supported working precision.
pub const MIN_BITS: u32 = 64;
/// Largest supported precision. Error bounds are carried as `f64`, so
/// `2^-bits` has to stay a normal double.
pub const MAX_BITS: u32 = 960;

/// Binary precision and seed shared by every routine of one computation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    bits: u32,
    seed: u64,
}

impl PrecisionContext {
    pub fn new(bits: u32, seed: u64) -> Result<Self> {
        if !(MIN_BITS..=MAX_BITS).contains(&bits) {
            return Err(Error::Precision(format!(
                "bits must lie in [{MIN_BITS}, {MAX_BITS}], got {bits}"
            )));
        }
        Ok(Self { bits, seed })
    }

    pub fn bits(&self) -> u32 {
        self.bits
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self { bits: self.bits, seed }
    }

    pub fn with_bits(&self, bits: u32) -> Result<Self> {
        Self::new(bits, self.seed)
    }

    /// Unit roundoff `2^-bits` as a double.
    pub fn eps(&self) -> f64 {
        (-(self.bits as f64)).exp2()
    }

    /// `2^-(bits * num / den)`, the fractional-precision tolerances used by
    /// the cross-checks (`bits/2`, `bits/4`, ...).
    pub fn eps_frac(&self, num: u32, den: u32) -> f64 {
        (-(self.bits as f64) * num as f64 / den as f64).exp2()
    }

    pub fn float(&self, x: f64) -> Float {
        Float::with_val(self.bits, x)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.bits)
    }

    pub fn complex(&self, re: f64, im: f64) -> Complex {
        Complex::with_val(self.bits, (re, im))
    }

    pub fn complex_zero(&self) -> Complex {
        Complex::new(self.bits)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.bits, rug::float::Constant::Pi)
    }
}

impl Default for PrecisionContext {
    fn default() -> Self {
        Self { bits: 256, seed: 0 }
    }
}

/// Converts a multiprecision value to `f64`, saturating to 0 on underflow.
pub fn to_f64(x: &Float) -> f64 {
    x.to_f64()
}

/// Natural logarithm of a positive multiprecision value, as a double. Works
/// far below the `f64` underflow threshold.
pub fn ln_f64(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    Float::with_val(64, x.ln_ref()).to_f64()
}

/// Decimal significant digits that round-trip `bits` of binary precision.
pub fn decimal_digits(bits: u32) -> usize {
    (bits as f64 * 0.302).ceil() as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_low_precision() {
        assert!(PrecisionContext::new(32, 0).is_err());
        assert!(PrecisionContext::new(64, 0).is_ok());
        assert!(PrecisionContext::new(4096, 0).is_err());
    }

    #[test]
    fn ln_below_double_range() {
        let tiny = Float::with_val(128, Float::i_exp(1, -5000));
        let l = ln_f64(&tiny);
        assert!((l + 5000.0 * std::f64::consts::LN_2).abs() < 1e-9);
    }

    #[test]
    fn digits_for_common_precisions() {
        assert_eq!(decimal_digits(256), 78);
        assert_eq!(decimal_digits(512), 155);
    }
}
