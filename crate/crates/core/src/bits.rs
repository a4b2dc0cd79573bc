//! Fixed-width bit vectors used for circuit states and truth-table rows.
//!
//! Bit `i` corresponds to circuit line `i` (equivalently input `i` of a
//! Boolean function). The textual form is written like a binary literal:
//! the most significant line (highest index) comes first, so for a
//! three-line circuit over `x1 x2 x3` the string `001` means `x1 = 1`.

use std::fmt;
use std::str::FromStr;

/// Maximum supported width. Values are packed into a `u64`.
pub const MAX_WIDTH: u32 = 63;

/// A bit vector of fixed width, value packed into a `u64`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bits {
    value: u64,
    width: u32,
}

impl Bits {
    /// Builds a bit vector, masking `value` to `width` bits.
    pub fn new(value: u64, width: u32) -> Self {
        assert!(width <= MAX_WIDTH, "width {width} exceeds {MAX_WIDTH}");
        let mask = if width == 0 { 0 } else { (1u64 << width) - 1 };
        Bits {
            value: value & mask,
            width,
        }
    }

    pub fn zero(width: u32) -> Self {
        Bits::new(0, width)
    }

    /// Bit `i` of each slice element becomes line `i`.
    pub fn from_bools(bits: &[bool]) -> Self {
        let mut value = 0u64;
        for (i, &b) in bits.iter().enumerate() {
            if b {
                value |= 1 << i;
            }
        }
        Bits::new(value, bits.len() as u32)
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn bit(&self, line: u32) -> bool {
        debug_assert!(line < self.width);
        (self.value >> line) & 1 == 1
    }

    #[must_use]
    pub fn with_bit(&self, line: u32, bit: bool) -> Self {
        debug_assert!(line < self.width);
        let mut value = self.value;
        if bit {
            value |= 1 << line;
        } else {
            value &= !(1 << line);
        }
        Bits {
            value,
            width: self.width,
        }
    }

    #[must_use]
    pub fn flipped(&self, line: u32) -> Self {
        debug_assert!(line < self.width);
        Bits {
            value: self.value ^ (1 << line),
            width: self.width,
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.width).map(|i| self.bit(i))
    }

    /// All `2^width` values in ascending numeric order.
    pub fn all(width: u32) -> impl Iterator<Item = Bits> {
        assert!(width <= 20, "exhaustive sweep capped at 20 bits");
        (0u64..1 << width).map(move |v| Bits::new(v, width))
    }
}

impl fmt::Display for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in (0..self.width).rev() {
            write!(f, "{}", if self.bit(i) { '1' } else { '0' })?;
        }
        Ok(())
    }
}

impl fmt::Debug for Bits {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bits({self})")
    }
}

/// Error parsing a bit string.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("invalid bit string {text:?}: {reason}")]
pub struct ParseBitsError {
    pub text: String,
    pub reason: &'static str,
}

impl FromStr for Bits {
    type Err = ParseBitsError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s.is_empty() || s.len() > MAX_WIDTH as usize {
            return Err(ParseBitsError {
                text: s.to_string(),
                reason: "length must be between 1 and 63",
            });
        }
        let mut value = 0u64;
        let width = s.len() as u32;
        for (pos, c) in s.chars().enumerate() {
            let line = width - 1 - pos as u32;
            match c {
                '0' => {}
                '1' => value |= 1 << line,
                _ => {
                    return Err(ParseBitsError {
                        text: s.to_string(),
                        reason: "characters must be 0 or 1",
                    })
                }
            }
        }
        Ok(Bits::new(value, width))
    }
}
