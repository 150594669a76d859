use std::fmt;
use std::str::FromStr;

use bitvec::prelude::*;

use super::schema::FIELD_WIDTH;
use crate::error::Error;

/// The single STM bus: one bit per attribute line, bit `4f` being the
/// least significant bit of field `f`.
///
/// Text form lists fields in bus order, each nibble written MSB first, with
/// `_` between fields: field 0 = 11 and field 1 = 0 prints as `1011_0000`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Bus(BitVec<u64, Lsb0>);

impl Bus {
    pub fn zeros(width: usize) -> Self {
        Bus(bitvec![u64, Lsb0; 0; width])
    }

    pub fn from_bits(bits: impl IntoIterator<Item = bool>) -> Self {
        Bus(bits.into_iter().collect())
    }

    /// Builds a bus from the low `width` bits of `value`.
    pub fn from_u64(value: u64, width: usize) -> Self {
        assert!(width <= 64);
        Bus::from_bits((0..width).map(|i| value >> i & 1 == 1))
    }

    pub fn to_u64(&self) -> u64 {
        assert!(self.width() <= 64);
        self.0
            .iter()
            .by_vals()
            .enumerate()
            .fold(0, |acc, (i, b)| acc | (b as u64) << i)
    }

    pub fn width(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, bit: usize) -> bool {
        self.0[bit]
    }

    pub fn set(&mut self, bit: usize, value: bool) {
        self.0.set(bit, value);
    }

    pub fn flip(&mut self, bit: usize) {
        let v = self.0[bit];
        self.0.set(bit, !v);
    }

    pub fn count_ones(&self) -> usize {
        self.0.count_ones()
    }

    /// Reads the 4-bit group starting at `lsb`.
    pub fn nibble(&self, lsb: usize) -> u8 {
        (0..FIELD_WIDTH).fold(0, |acc, i| acc | (self.0[lsb + i] as u8) << i)
    }

    pub fn set_nibble(&mut self, lsb: usize, value: u8) {
        for i in 0..FIELD_WIDTH {
            self.0.set(lsb + i, value >> i & 1 == 1);
        }
    }
}

impl fmt::Display for Bus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let width = self.width();
        let mut start = 0;
        while start < width {
            if start > 0 {
                f.write_str("_")?;
            }
            let end = (start + FIELD_WIDTH).min(width);
            for bit in (start..end).rev() {
                f.write_str(if self.0[bit] { "1" } else { "0" })?;
            }
            start = end;
        }
        Ok(())
    }
}

impl fmt::Debug for Bus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Bus({self})")
    }
}

impl FromStr for Bus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let digits: Vec<char> = s
            .chars()
            .filter(|c| !matches!(c, '_' | ' ' | '\t'))
            .collect();
        if !digits.len().is_multiple_of(FIELD_WIDTH) {
            return Err(Error::parse(
                1,
                format!(
                    "bus string has {} bits, not a multiple of {FIELD_WIDTH}",
                    digits.len()
                ),
            ));
        }
        let mut bus = Bus::zeros(digits.len());
        for (group, chunk) in digits.chunks(FIELD_WIDTH).enumerate() {
            for (pos, c) in chunk.iter().enumerate() {
                let bit = group * FIELD_WIDTH + (FIELD_WIDTH - 1 - pos);
                match c {
                    '0' => {}
                    '1' => bus.set(bit, true),
                    other => return Err(Error::parse(1, format!("invalid bus digit `{other}`"))),
                }
            }
        }
        Ok(bus)
    }
}
