// SPDX-License-Identifier: Apache-2.0

//! Dual-rail codewords. A bit travels on two wires: `(1,0)` is 1, `(0,1)` is
//! 0, `(0,0)` is the spacer and `(1,1)` is illegal. Words are lsb first.

use thiserror::Error;

/// One dual-rail pair, written `(rail1, rail0)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RailPair {
    pub rail1: bool,
    pub rail0: bool,
}

impl RailPair {
    pub const SPACER: RailPair = RailPair {
        rail1: false,
        rail0: false,
    };

    pub fn from_bit(bit: bool) -> RailPair {
        RailPair {
            rail1: bit,
            rail0: !bit,
        }
    }

    pub fn is_spacer(self) -> bool {
        !self.rail1 && !self.rail0
    }

    pub fn is_illegal(self) -> bool {
        self.rail1 && self.rail0
    }

    /// The encoded bit, if this pair is a codeword.
    pub fn bit(self) -> Option<bool> {
        (self.rail1 != self.rail0).then_some(self.rail1)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decoded {
    Valid(u64),
    Spacer,
    /// Some pairs valid, the rest spacer.
    Partial,
    /// Position of the first `(1,1)` pair.
    Illegal(usize),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EncodeError {
    #[error("value {value} does not fit in {width} bits")]
    OutOfRange { value: u64, width: usize },
    #[error("width must be between 1 and 64, got {0}")]
    Width(usize),
}

pub fn encode_word(value: u64, width: usize) -> Result<Vec<RailPair>, EncodeError> {
    if width == 0 || width > 64 {
        return Err(EncodeError::Width(width));
    }
    if width < 64 && value >> width != 0 {
        return Err(EncodeError::OutOfRange { value, width });
    }
    Ok((0..width).map(|i| RailPair::from_bit(value >> i & 1 == 1)).collect())
}

pub fn decode_outputs(rails: &[RailPair]) -> Decoded {
    if let Some(pos) = rails.iter().position(|p| p.is_illegal()) {
        return Decoded::Illegal(pos);
    }
    if rails.iter().all(|p| p.is_spacer()) {
        return Decoded::Spacer;
    }
    let mut value = 0u64;
    for (i, pair) in rails.iter().enumerate() {
        match pair.bit() {
            Some(bit) => value |= u64::from(bit) << i,
            None => return Decoded::Partial,
        }
    }
    Decoded::Valid(value)
}
