//! The three embedding methods behind one interface.
//!
//! All methods hide one bit per pixel and walk pixels in row-major order.
//! They differ only in which channel of pixel `k` carries bit `k`:
//!
//! * [`MethodId::Cyclic`]: RED, GREEN, BLUE, RED, ... by pixel index.
//! * [`MethodId::ClassicLsb`]: always BLUE.
//! * [`MethodId::Karim`]: `LSB(RED_k) XOR key[k mod |key|]`; 0 selects GREEN,
//!   1 selects BLUE. RED is never written, so the receiver recomputes the
//!   same decision.

use std::fmt;
use std::str::FromStr;

use crate::bits::{
    bits_to_bytes, bytes_to_bits, decode_header, frame_payload, BitSequence, HEADER_BITS,
};
use crate::error::{Result, StegoError};
use crate::image::{capacity_bits, extract_lsb, replace_lsb, ChannelId, RgbImage};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MethodId {
    ClassicLsb,
    Karim,
    Cyclic,
}

impl MethodId {
    /// Table column order.
    pub const ALL: [MethodId; 3] = [MethodId::ClassicLsb, MethodId::Karim, MethodId::Cyclic];

    /// Name used on the command line and in CSV headers.
    pub fn as_str(self) -> &'static str {
        match self {
            MethodId::ClassicLsb => "lsb",
            MethodId::Karim => "karim",
            MethodId::Cyclic => "cyclic",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            MethodId::ClassicLsb => "LSB Method",
            MethodId::Karim => "Karim's Method",
            MethodId::Cyclic => "Cyclic Method",
        }
    }

    pub fn requires_key(self) -> bool {
        self == MethodId::Karim
    }
}

impl fmt::Display for MethodId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodId {
    type Err = StegoError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "lsb" | "classic" | "classic_lsb" => Ok(MethodId::ClassicLsb),
            "karim" => Ok(MethodId::Karim),
            "cyclic" => Ok(MethodId::Cyclic),
            _ => Err(StegoError::UnknownMethod(s.to_string())),
        }
    }
}

/// Non-empty key bit string, cycled over message positions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StegoKey(BitSequence);

impl StegoKey {
    pub fn from_bits(bits: BitSequence) -> Result<Self> {
        if bits.is_empty() {
            return Err(StegoError::InvalidKey(
                "key must contain at least one bit".into(),
            ));
        }
        Ok(Self(bits))
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        Self::from_bits(bytes_to_bits(bytes))
    }

    /// Parses a hexadecimal key; each hex digit contributes four bits, MSB first.
    pub fn from_hex(hex_key: &str) -> Result<Self> {
        let digits = hex_key.trim();
        let digits = digits
            .strip_prefix("0x")
            .or_else(|| digits.strip_prefix("0X"))
            .unwrap_or(digits);
        if digits.is_empty() {
            return Err(StegoError::InvalidKey("empty hex key".into()));
        }
        let mut bits = BitSequence::with_capacity(digits.len() * 4);
        for c in digits.chars() {
            let nibble = c
                .to_digit(16)
                .ok_or_else(|| StegoError::InvalidKey(format!("{c:?} is not a hex digit")))?;
            bits.extend((0..4).rev().map(|s| ((nibble >> s) & 1) as u8));
        }
        Self::from_bits(bits)
    }

    pub fn bits(&self) -> &[u8] {
        &self.0
    }

    #[inline]
    pub fn bit(&self, k: usize) -> u8 {
        self.0[k % self.0.len()]
    }
}

/// Channel carrying bit `i` in the cyclic method.
pub fn channel_for_index(i: usize) -> ChannelId {
    match i % 3 {
        0 => ChannelId::Red,
        1 => ChannelId::Green,
        _ => ChannelId::Blue,
    }
}

/// Stateful walk of the cyclic method: a channel flag that runs 1, 2, 3
/// and wraps back to 1 after BLUE, advancing once per bit together with
/// the row-major pixel index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChannelCursor {
    channel_flag: u8,
    pixel: usize,
}

impl Default for ChannelCursor {
    fn default() -> Self {
        Self::new()
    }
}

impl ChannelCursor {
    pub fn new() -> Self {
        Self {
            channel_flag: 1,
            pixel: 0,
        }
    }

    pub fn channel_flag(&self) -> u8 {
        self.channel_flag
    }

    pub fn pixel(&self) -> usize {
        self.pixel
    }

    pub fn channel(&self) -> ChannelId {
        match self.channel_flag {
            1 => ChannelId::Red,
            2 => ChannelId::Green,
            _ => ChannelId::Blue,
        }
    }
}

impl Iterator for ChannelCursor {
    type Item = (usize, ChannelId);

    fn next(&mut self) -> Option<Self::Item> {
        let item = (self.pixel, self.channel());
        self.pixel += 1;
        self.channel_flag += 1;
        if self.channel_flag > 3 {
            self.channel_flag = 1;
        }
        Some(item)
    }
}

/// Result of an embedding: the stego image plus change accounting.
#[derive(Clone, Debug)]
pub struct EmbedReport {
    pub stego: RgbImage,
    pub bits_embedded: usize,
    pub samples_changed: usize,
}

fn check_capacity(image: &RgbImage, nbits: usize, embedding: bool) -> Result<()> {
    let capacity = capacity_bits(image);
    if nbits > capacity {
        return Err(if embedding {
            StegoError::PayloadExceedsCapacity {
                requested: nbits,
                capacity,
            }
        } else {
            StegoError::RequestExceedsCapacity {
                requested: nbits,
                capacity,
            }
        });
    }
    Ok(())
}

/// Writes `payload[k]` into the channel chosen by `select(k, pixel)` of pixel `k`.
fn embed_with(
    cover: &RgbImage,
    payload: &[u8],
    mut select: impl FnMut(usize, &[u8; 3]) -> ChannelId,
) -> Result<EmbedReport> {
    check_capacity(cover, payload.len(), true)?;
    let mut stego = cover.clone();
    let mut changed = 0;
    for (k, (px, &bit)) in stego.pixels_mut().iter_mut().zip(payload).enumerate() {
        let c = select(k, px).index();
        let new = replace_lsb(px[c], bit);
        if new != px[c] {
            changed += 1;
            px[c] = new;
        }
    }
    Ok(EmbedReport {
        stego,
        bits_embedded: payload.len(),
        samples_changed: changed,
    })
}

fn extract_with(
    stego: &RgbImage,
    nbits: usize,
    mut select: impl FnMut(usize, &[u8; 3]) -> ChannelId,
) -> Result<BitSequence> {
    check_capacity(stego, nbits, false)?;
    Ok(stego.pixels()[..nbits]
        .iter()
        .enumerate()
        .map(|(k, px)| extract_lsb(px[select(k, px).index()]))
        .collect())
}

fn karim_channel(key: &StegoKey, k: usize, px: &[u8; 3]) -> ChannelId {
    if extract_lsb(px[ChannelId::Red.index()]) ^ key.bit(k) == 0 {
        ChannelId::Green
    } else {
        ChannelId::Blue
    }
}

pub fn embed_cyclic(cover: &RgbImage, payload: &[u8]) -> Result<EmbedReport> {
    let mut cursor = ChannelCursor::new();
    embed_with(cover, payload, |_, _| {
        cursor.next().map(|(_, c)| c).unwrap()
    })
}

pub fn extract_cyclic(stego: &RgbImage, nbits: usize) -> Result<BitSequence> {
    let mut cursor = ChannelCursor::new();
    extract_with(stego, nbits, |_, _| cursor.next().map(|(_, c)| c).unwrap())
}

pub fn embed_classic_lsb(cover: &RgbImage, payload: &[u8]) -> Result<EmbedReport> {
    embed_with(cover, payload, |_, _| ChannelId::Blue)
}

pub fn extract_classic_lsb(stego: &RgbImage, nbits: usize) -> Result<BitSequence> {
    extract_with(stego, nbits, |_, _| ChannelId::Blue)
}

pub fn embed_karim(cover: &RgbImage, payload: &[u8], key: &StegoKey) -> Result<EmbedReport> {
    embed_with(cover, payload, |k, px| karim_channel(key, k, px))
}

pub fn extract_karim(stego: &RgbImage, nbits: usize, key: &StegoKey) -> Result<BitSequence> {
    extract_with(stego, nbits, |k, px| karim_channel(key, k, px))
}

/// A method paired with its key, validated so the key is present iff the
/// method needs one.
#[derive(Clone, Debug)]
pub struct Codec<'k> {
    method: MethodId,
    key: Option<&'k StegoKey>,
}

impl<'k> Codec<'k> {
    pub fn new(method: MethodId, key: Option<&'k StegoKey>) -> Result<Self> {
        match (method.requires_key(), key.is_some()) {
            (true, false) => Err(StegoError::MissingKey(method.as_str())),
            (false, true) => Err(StegoError::UnexpectedKey(method.as_str())),
            _ => Ok(Self { method, key }),
        }
    }

    pub fn method(&self) -> MethodId {
        self.method
    }

    /// Embeds raw bits, without a length header.
    pub fn embed_bits(&self, cover: &RgbImage, payload: &[u8]) -> Result<EmbedReport> {
        match self.method {
            MethodId::Cyclic => embed_cyclic(cover, payload),
            MethodId::ClassicLsb => embed_classic_lsb(cover, payload),
            MethodId::Karim => embed_karim(cover, payload, self.key.expect("validated")),
        }
    }

    pub fn extract_bits(&self, stego: &RgbImage, nbits: usize) -> Result<BitSequence> {
        match self.method {
            MethodId::Cyclic => extract_cyclic(stego, nbits),
            MethodId::ClassicLsb => extract_classic_lsb(stego, nbits),
            MethodId::Karim => extract_karim(stego, nbits, self.key.expect("validated")),
        }
    }
}

/// Frames `data` with its length and embeds it with the chosen method.
pub fn embed_message(
    cover: &RgbImage,
    data: &[u8],
    method: MethodId,
    key: Option<&StegoKey>,
) -> Result<EmbedReport> {
    let codec = Codec::new(method, key)?;
    let framed = frame_payload(data)?;
    codec.embed_bits(cover, &framed)
}

/// Reads the length header and then exactly that many body bytes.
pub fn extract_message(
    stego: &RgbImage,
    method: MethodId,
    key: Option<&StegoKey>,
) -> Result<Vec<u8>> {
    let codec = Codec::new(method, key)?;
    let capacity = capacity_bits(stego);
    if capacity < HEADER_BITS {
        return Err(StegoError::TruncatedHeader {
            available: capacity,
        });
    }
    let header = codec.extract_bits(stego, HEADER_BITS)?;
    let len = decode_header(&header)?;
    let needed = u64::from(len) * 8;
    let available = capacity - HEADER_BITS;
    if needed > available as u64 {
        return Err(StegoError::TruncatedBody { needed, available });
    }
    let all = codec.extract_bits(stego, HEADER_BITS + needed as usize)?;
    bits_to_bytes(&all[HEADER_BITS..])
}

#[cfg(test)]
mod tests {
    use super::*;

    fn img2x2() -> RgbImage {
        RgbImage::from_pixels(
            2,
            2,
            vec![[10, 20, 30], [11, 21, 31], [12, 22, 32], [13, 23, 33]],
        )
        .unwrap()
    }

    #[test]
    fn channel_order() {
        assert_eq!(channel_for_index(0), ChannelId::Red);
        assert_eq!(channel_for_index(1), ChannelId::Green);
        assert_eq!(channel_for_index(2), ChannelId::Blue);
        assert_eq!(channel_for_index(3), ChannelId::Red);
        assert_eq!(channel_for_index(3_000_000), ChannelId::Red);
    }

    #[test]
    fn cursor_matches_closed_form() {
        for (i, (pixel, ch)) in ChannelCursor::new().take(1000).enumerate() {
            assert_eq!(pixel, i);
            assert_eq!(ch, channel_for_index(i));
        }
        let mut c = ChannelCursor::new();
        let flags: Vec<u8> = (0..7)
            .map(|_| {
                let f = c.channel_flag();
                c.next();
                f
            })
            .collect();
        assert_eq!(flags, vec![1, 2, 3, 1, 2, 3, 1]);
    }

    #[test]
    fn cyclic_2x2_example() {
        let cover = img2x2();
        let report = embed_cyclic(&cover, &[1, 0, 1, 1]).unwrap();
        let s = report.stego.pixels();
        // pixel0 red, pixel1 green, pixel2 blue, pixel3 red
        assert_eq!(s[0], [11, 20, 30]);
        assert_eq!(s[1], [11, 20, 31]);
        assert_eq!(s[2], [12, 22, 33]);
        assert_eq!(s[3], [13, 23, 33]);
        assert_eq!(report.samples_changed, 3);
        assert_eq!(
            extract_cyclic(&report.stego, 4).unwrap().as_slice(),
            &[1, 0, 1, 1]
        );
    }

    #[test]
    fn empty_payload_is_identity() {
        let cover = img2x2();
        let key = StegoKey::from_hex("a").unwrap();
        for r in [
            embed_cyclic(&cover, &[]).unwrap(),
            embed_classic_lsb(&cover, &[]).unwrap(),
            embed_karim(&cover, &[], &key).unwrap(),
        ] {
            assert_eq!(r.stego, cover);
            assert_eq!(r.samples_changed, 0);
        }
        assert!(extract_cyclic(&cover, 0).unwrap().is_empty());
        assert!(extract_classic_lsb(&cover, 0).unwrap().is_empty());
        assert!(extract_karim(&cover, 0, &key).unwrap().is_empty());
    }

    #[test]
    fn over_capacity() {
        let cover = img2x2();
        assert!(matches!(
            embed_cyclic(&cover, &[0; 5]),
            Err(StegoError::PayloadExceedsCapacity {
                requested: 5,
                capacity: 4
            })
        ));
        assert!(matches!(
            extract_classic_lsb(&cover, 5),
            Err(StegoError::RequestExceedsCapacity { .. })
        ));
    }

    #[test]
    fn classic_blue_143() {
        let cover = RgbImage::filled(1, 1, [7, 8, 143]).unwrap();
        let r = embed_classic_lsb(&cover, &[0]).unwrap();
        assert_eq!(r.stego.pixels()[0], [7, 8, 142]);
    }

    #[test]
    fn classic_reads_even_blue_as_zero() {
        let cover = RgbImage::from_fn(4, 4, |x, y| [1, 3, (2 * (x + y)) as u8]).unwrap();
        assert_eq!(
            extract_classic_lsb(&cover, 16).unwrap().as_slice(),
            &[0; 16]
        );
    }

    #[test]
    fn karim_decision_rule() {
        let key0 = StegoKey::from_bits(BitSequence::from_bits([0])).unwrap();
        // RED LSB 0 xor key 0 = 0 -> GREEN
        let cover = RgbImage::filled(1, 1, [142, 10, 10]).unwrap();
        let r = embed_karim(&cover, &[1], &key0).unwrap();
        assert_eq!(r.stego.pixels()[0], [142, 11, 10]);
        // RED LSB 1 xor key 0 = 1 -> BLUE
        let cover = RgbImage::filled(1, 1, [143, 10, 10]).unwrap();
        let r = embed_karim(&cover, &[1], &key0).unwrap();
        assert_eq!(r.stego.pixels()[0], [143, 10, 11]);
    }

    #[test]
    fn karim_wrong_key_reads_other_channel() {
        // GREEN LSB 0, BLUE LSB 1; the right key picks GREEN
        let stego = RgbImage::filled(1, 1, [142, 10, 11]).unwrap();
        let right = StegoKey::from_bits(BitSequence::from_bits([0])).unwrap();
        let wrong = StegoKey::from_bits(BitSequence::from_bits([1])).unwrap();
        assert_eq!(extract_karim(&stego, 1, &right).unwrap().as_slice(), &[0]);
        assert_eq!(extract_karim(&stego, 1, &wrong).unwrap().as_slice(), &[1]);
    }

    #[test]
    fn key_parsing() {
        let k = StegoKey::from_hex("0xA5").unwrap();
        assert_eq!(k.bits(), &[1, 0, 1, 0, 0, 1, 0, 1]);
        assert_eq!(k.bit(9), 0);
        assert_eq!(StegoKey::from_hex("f").unwrap().bits(), &[1, 1, 1, 1]);
        assert!(StegoKey::from_hex("").is_err());
        assert!(StegoKey::from_hex("xyz").is_err());
        assert!(StegoKey::from_bits(BitSequence::new()).is_err());
    }

    #[test]
    fn key_presence_checked() {
        let cover = RgbImage::filled(16, 16, [0; 3]).unwrap();
        let key = StegoKey::from_hex("1").unwrap();
        assert!(matches!(
            embed_message(&cover, b"x", MethodId::Karim, None),
            Err(StegoError::MissingKey("karim"))
        ));
        assert!(matches!(
            embed_message(&cover, b"x", MethodId::Cyclic, Some(&key)),
            Err(StegoError::UnexpectedKey("cyclic"))
        ));
        assert!(matches!(
            extract_message(&cover, MethodId::Karim, None),
            Err(StegoError::MissingKey(_))
        ));
    }

    #[test]
    fn message_round_trip_b() {
        let cover = RgbImage::from_fn(256, 256, |x, y| [x as u8, y as u8, (x ^ y) as u8]).unwrap();
        let key = StegoKey::from_hex("c0ffee").unwrap();
        for m in MethodId::ALL {
            let k = m.requires_key().then_some(&key);
            let r = embed_message(&cover, b"B", m, k).unwrap();
            assert_eq!(r.bits_embedded, 40);
            assert_eq!(extract_message(&r.stego, m, k).unwrap(), b"B");
            let r = embed_message(&cover, b"", m, k).unwrap();
            assert_eq!(r.bits_embedded, 32);
            assert!(extract_message(&r.stego, m, k).unwrap().is_empty());
        }
    }

    #[test]
    fn message_capacity_limit() {
        let cover = RgbImage::filled(256, 256, [5; 3]).unwrap();
        assert!(embed_message(&cover, &vec![0xAB; 8188], MethodId::Cyclic, None).is_ok());
        assert!(matches!(
            embed_message(&cover, &vec![0; 8189], MethodId::Cyclic, None),
            Err(StegoError::PayloadExceedsCapacity { .. })
        ));
        assert!(matches!(
            embed_message(&cover, &vec![0; 8193], MethodId::ClassicLsb, None),
            Err(StegoError::PayloadExceedsCapacity { .. })
        ));
    }

    #[test]
    fn oversized_header_is_truncated_body() {
        // all-odd samples decode to a header of 0xFFFFFFFF
        let stego = RgbImage::filled(16, 16, [1, 1, 1]).unwrap();
        assert!(matches!(
            extract_message(&stego, MethodId::Cyclic, None),
            Err(StegoError::TruncatedBody { .. })
        ));
        // all-even samples decode to length 0
        let stego = RgbImage::filled(16, 16, [2, 2, 2]).unwrap();
        assert!(extract_message(&stego, MethodId::ClassicLsb, None)
            .unwrap()
            .is_empty());
        // too small to hold a header at all
        let tiny = RgbImage::filled(4, 4, [0; 3]).unwrap();
        assert!(matches!(
            extract_message(&tiny, MethodId::Cyclic, None),
            Err(StegoError::TruncatedHeader { available: 16 })
        ));
    }

    #[test]
    fn header_crafted_past_capacity() {
        // 8x8 = 64 bits, 32 after the header: claim 5 bytes = 40 bits
        let cover = RgbImage::filled(8, 8, [0; 3]).unwrap();
        let mut bits = vec![0u8; 32];
        bits[29] = 1;
        bits[31] = 1;
        let stego = embed_cyclic(&cover, &bits).unwrap().stego;
        assert!(matches!(
            extract_message(&stego, MethodId::Cyclic, None),
            Err(StegoError::TruncatedBody {
                needed: 40,
                available: 32
            })
        ));
    }

    #[test]
    fn method_names() {
        for m in MethodId::ALL {
            assert_eq!(m.as_str().parse::<MethodId>().unwrap(), m);
        }
        assert!("nope".parse::<MethodId>().is_err());
    }
}
