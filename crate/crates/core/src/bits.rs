//! Conversion between secret bytes and the bit stream the codecs embed.
//!
//! Bits are stored MSB-first within each byte, so `b'B'` (0x42) becomes
//! `0,1,0,0,0,0,1,0`. A framed payload is a 32-bit big-endian byte count
//! followed by the body bits; the receiver reads the header first and then
//! knows exactly how many body bits to pull out of the image.

use std::ops::Deref;

use crate::error::{Result, StegoError};

/// Number of bits in the length header of a framed payload.
pub const HEADER_BITS: usize = 32;

/// An ordered sequence of bits, each stored as `0` or `1`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct BitSequence(Vec<u8>);

impl BitSequence {
    pub fn new() -> Self {
        Self(Vec::new())
    }

    pub fn with_capacity(n: usize) -> Self {
        Self(Vec::with_capacity(n))
    }

    /// Builds a sequence from arbitrary integers, keeping only the lowest bit of each.
    pub fn from_bits<I: IntoIterator<Item = u8>>(bits: I) -> Self {
        Self(bits.into_iter().map(|b| b & 1).collect())
    }

    pub fn push(&mut self, bit: u8) {
        self.0.push(bit & 1);
    }

    pub fn as_slice(&self) -> &[u8] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u8> {
        self.0
    }
}

impl Deref for BitSequence {
    type Target = [u8];

    fn deref(&self) -> &[u8] {
        &self.0
    }
}

impl FromIterator<u8> for BitSequence {
    fn from_iter<I: IntoIterator<Item = u8>>(iter: I) -> Self {
        Self::from_bits(iter)
    }
}

impl Extend<u8> for BitSequence {
    fn extend<I: IntoIterator<Item = u8>>(&mut self, iter: I) {
        self.0.extend(iter.into_iter().map(|b| b & 1));
    }
}

fn push_byte(out: &mut BitSequence, byte: u8) {
    out.extend((0..8).rev().map(|shift| (byte >> shift) & 1));
}

pub fn bytes_to_bits(data: &[u8]) -> BitSequence {
    let mut bits = BitSequence::with_capacity(data.len() * 8);
    for &byte in data {
        push_byte(&mut bits, byte);
    }
    bits
}

pub fn bits_to_bytes(bits: &[u8]) -> Result<Vec<u8>> {
    if !bits.len().is_multiple_of(8) {
        return Err(StegoError::NonOctetLength(bits.len()));
    }
    Ok(bits
        .chunks_exact(8)
        .map(|chunk| chunk.iter().fold(0u8, |acc, &b| (acc << 1) | (b & 1)))
        .collect())
}

/// Prepends the 32-bit big-endian byte count to the payload bits.
pub fn frame_payload(data: &[u8]) -> Result<BitSequence> {
    let len = u32::try_from(data.len()).map_err(|_| StegoError::PayloadTooLarge(data.len()))?;
    let mut bits = BitSequence::with_capacity(HEADER_BITS + data.len() * 8);
    for byte in len.to_be_bytes() {
        push_byte(&mut bits, byte);
    }
    for &byte in data {
        push_byte(&mut bits, byte);
    }
    Ok(bits)
}

/// Decodes only the 32-bit length header.
pub fn decode_header(bits: &[u8]) -> Result<u32> {
    if bits.len() < HEADER_BITS {
        return Err(StegoError::TruncatedHeader {
            available: bits.len(),
        });
    }
    Ok(bits[..HEADER_BITS]
        .iter()
        .fold(0u32, |acc, &b| (acc << 1) | u32::from(b & 1)))
}

/// Splits a framed bit stream into its announced byte length and exactly
/// that many body bits. Bits beyond the body are ignored.
pub fn parse_frame(bits: &[u8]) -> Result<(u32, &[u8])> {
    let len = decode_header(bits)?;
    let needed = u64::from(len) * 8;
    let rest = &bits[HEADER_BITS..];
    if (rest.len() as u64) < needed {
        return Err(StegoError::TruncatedBody {
            needed,
            available: rest.len(),
        });
    }
    Ok((len, &rest[..needed as usize]))
}
