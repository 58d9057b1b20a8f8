//! SMPTE ST 12-1 linear timecode: 80-bit word packing and timecode arithmetic.
//!
//! One LTC word is emitted per video frame. Bit index 0 is transmitted first
//! and BCD nibbles are LSB-first. The non-drop layout used here:
//!
//! ```text
//! bits  0..4   frame units        bits  4..8   binary group 1
//! bits  8..10  frame tens         bit  10      drop-frame flag
//! bit  11      color-frame flag   bits 12..16  binary group 2
//! bits 16..20  seconds units      bits 20..24  binary group 3
//! bits 24..27  seconds tens       bit  27      polarity (24/30 fps) / BGF0 (25 fps)
//! bits 28..32  binary group 4     bits 32..36  minutes units
//! bits 36..40  binary group 5     bits 40..43  minutes tens
//! bit  43      BGF0 (24/30 fps) / BGF2 (25 fps)
//! bits 44..48  binary group 6     bits 48..52  hours units
//! bits 52..56  binary group 7     bits 56..58  hours tens
//! bit  58      BGF1               bit  59      BGF2 (24/30 fps) / polarity (25 fps)
//! bits 60..64  binary group 8     bits 64..80  sync word
//! ```
//!
//! The polarity-correction bit is chosen so every word contains an even
//! number of zero bits, which keeps the biphase-mark level at each word
//! boundary constant from frame to frame.

use std::fmt;

use thiserror::Error;

use crate::gnss::UtcInstant;

/// Number of bits in one LTC word.
pub const WORD_BITS: usize = 80;

/// Sync pattern occupying bits 64..79, in transmission order (bit 64 first):
/// `0011 1111 1111 1101`.
pub const SYNC_PATTERN: [bool; 16] = [
    false, false, true, true, true, true, true, true, true, true, true, true, true, true, false,
    true,
];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum TimecodeError {
    #[error("timecode field out of range: {0}")]
    FieldOutOfRange(&'static str),
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WordError {
    #[error("sync pattern missing from bits 64..79")]
    MissingSync,
    #[error("malformed word: {0}")]
    MalformedWord(&'static str),
}

/// Video frame rate. Only the integer rates are supported; drop-frame
/// (29.97 fps) timecode is out of scope.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FrameRate {
    Fps24,
    Fps25,
    Fps30,
}

impl FrameRate {
    pub const ALL: [FrameRate; 3] = [FrameRate::Fps24, FrameRate::Fps25, FrameRate::Fps30];

    pub fn fps(self) -> u32 {
        match self {
            FrameRate::Fps24 => 24,
            FrameRate::Fps25 => 25,
            FrameRate::Fps30 => 30,
        }
    }

    pub fn from_fps(fps: u32) -> Option<Self> {
        match fps {
            24 => Some(FrameRate::Fps24),
            25 => Some(FrameRate::Fps25),
            30 => Some(FrameRate::Fps30),
            _ => None,
        }
    }

    /// Frame period in seconds (exactly 1/fps).
    pub fn frame_period_s(self) -> f64 {
        1.0 / f64::from(self.fps())
    }

    /// Half a frame period, the intrinsic LTC alignment bound.
    pub fn half_frame_s(self) -> f64 {
        0.5 / f64::from(self.fps())
    }

    /// LTC bit rate in bit/s (80 bits per frame).
    pub fn bit_rate(self) -> u32 {
        80 * self.fps()
    }

    /// Bit position of the biphase-mark polarity-correction bit.
    pub fn polarity_bit(self) -> usize {
        match self {
            FrameRate::Fps25 => 59,
            _ => 27,
        }
    }
}

impl fmt::Display for FrameRate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.fps())
    }
}

/// A time address `hours:minutes:seconds:frames` at a fixed frame rate.
///
/// Construction enforces the field ranges, so every value of this type is a
/// valid address; `total_frames` is a bijection onto `[0, 86400 * fps)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Timecode {
    hours: u8,
    minutes: u8,
    seconds: u8,
    frames: u8,
    rate: FrameRate,
}

impl Timecode {
    pub fn new(
        hours: u8,
        minutes: u8,
        seconds: u8,
        frames: u8,
        rate: FrameRate,
    ) -> Result<Self, TimecodeError> {
        if hours > 23 {
            return Err(TimecodeError::FieldOutOfRange("hours"));
        }
        if minutes > 59 {
            return Err(TimecodeError::FieldOutOfRange("minutes"));
        }
        if seconds > 59 {
            return Err(TimecodeError::FieldOutOfRange("seconds"));
        }
        if u32::from(frames) >= rate.fps() {
            return Err(TimecodeError::FieldOutOfRange("frames"));
        }
        Ok(Self {
            hours,
            minutes,
            seconds,
            frames,
            rate,
        })
    }

    /// Midnight, frame zero.
    pub fn zero(rate: FrameRate) -> Self {
        Self {
            hours: 0,
            minutes: 0,
            seconds: 0,
            frames: 0,
            rate,
        }
    }

    /// Parses `"hh:mm:ss:ff"`.
    pub fn parse(s: &str, rate: FrameRate) -> Result<Self, TimecodeError> {
        let parts: Vec<&str> = s.split(':').collect();
        if parts.len() != 4 {
            return Err(TimecodeError::FieldOutOfRange("expected hh:mm:ss:ff"));
        }
        let nums: Vec<u8> = parts
            .iter()
            .map(|p| p.parse().map_err(|_| TimecodeError::FieldOutOfRange("not a number")))
            .collect::<Result<_, _>>()?;
        Self::new(nums[0], nums[1], nums[2], nums[3], rate)
    }

    pub fn hours(&self) -> u8 {
        self.hours
    }
    pub fn minutes(&self) -> u8 {
        self.minutes
    }
    pub fn seconds(&self) -> u8 {
        self.seconds
    }
    pub fn frames(&self) -> u8 {
        self.frames
    }
    pub fn rate(&self) -> FrameRate {
        self.rate
    }

    /// Frame index since midnight, in `[0, 86400 * fps)`.
    pub fn total_frames(&self) -> u32 {
        ((u32::from(self.hours) * 60 + u32::from(self.minutes)) * 60 + u32::from(self.seconds))
            * self.rate.fps()
            + u32::from(self.frames)
    }

    /// Inverse of [`total_frames`](Self::total_frames); `n` is taken modulo a day.
    pub fn from_total_frames(n: u32, rate: FrameRate) -> Self {
        let fps = rate.fps();
        let n = n % (86_400 * fps);
        let frames = (n % fps) as u8;
        let secs = n / fps;
        Self {
            hours: (secs / 3600) as u8,
            minutes: (secs / 60 % 60) as u8,
            seconds: (secs % 60) as u8,
            frames,
            rate,
        }
    }

    /// The next frame address, wrapping at 24 h.
    #[must_use]
    pub fn increment(self) -> Self {
        Self::from_total_frames(self.total_frames() + 1, self.rate)
    }
}

impl fmt::Display for Timecode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:02}:{:02}:{:02}:{:02}",
            self.hours, self.minutes, self.seconds, self.frames
        )
    }
}

/// Derives the timecode for a wall-clock instant: time-of-day fields are
/// copied and the frame number is `floor(subsecond * fps)`, so `frames < fps`
/// holds at every instant.
pub fn timecode_from_utc(utc: &UtcInstant, rate: FrameRate) -> Timecode {
    let frames =
        (u64::from(utc.subsec_nanos()) * u64::from(rate.fps()) / 1_000_000_000) as u8;
    Timecode::new(utc.hours(), utc.minutes(), utc.seconds(), frames, rate)
        .expect("valid UTC time-of-day maps to a valid timecode")
}

/// The eight 4-bit binary groups (32 bits of user data).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct UserBits {
    groups: [u8; 8],
}

impl UserBits {
    pub fn new(groups: [u8; 8]) -> Result<Self, TimecodeError> {
        if groups.iter().any(|&g| g > 0xF) {
            return Err(TimecodeError::FieldOutOfRange("binary group"));
        }
        Ok(Self { groups })
    }

    /// Packs group 1 into the low nibble, group 8 into the high nibble.
    pub fn from_u32(value: u32) -> Self {
        let mut groups = [0u8; 8];
        for (i, g) in groups.iter_mut().enumerate() {
            *g = ((value >> (4 * i)) & 0xF) as u8;
        }
        Self { groups }
    }

    pub fn to_u32(self) -> u32 {
        self.groups
            .iter()
            .enumerate()
            .fold(0, |acc, (i, &g)| acc | (u32::from(g) << (4 * i)))
    }

    pub fn group(&self, index: usize) -> u8 {
        self.groups[index]
    }
}

/// Flag bits carried by a word, returned verbatim by [`decode_word`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct WordFlags {
    pub drop_frame: bool,
    pub color_frame: bool,
    pub polarity_correction: bool,
    pub bgf0: bool,
    pub bgf1: bool,
    pub bgf2: bool,
}

/// The 80-bit on-wire word, packed LSB-first into ten bytes
/// (bit `i` lives at byte `i / 8`, bit `i % 8`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LtcWord {
    bytes: [u8; 10],
}

impl LtcWord {
    /// Wraps raw wire bytes without validation; [`decode_word`] validates.
    pub fn from_bytes(bytes: [u8; 10]) -> Self {
        Self { bytes }
    }

    pub fn as_bytes(&self) -> &[u8; 10] {
        &self.bytes
    }

    pub fn bit(&self, index: usize) -> bool {
        debug_assert!(index < WORD_BITS);
        self.bytes[index / 8] >> (index % 8) & 1 == 1
    }

    fn set_bit(&mut self, index: usize, value: bool) {
        let mask = 1u8 << (index % 8);
        if value {
            self.bytes[index / 8] |= mask;
        } else {
            self.bytes[index / 8] &= !mask;
        }
    }

    /// Bits in transmission order.
    pub fn bits(&self) -> impl Iterator<Item = bool> + '_ {
        (0..WORD_BITS).map(move |i| self.bit(i))
    }

    pub fn count_ones(&self) -> u32 {
        self.bytes.iter().map(|b| b.count_ones()).sum()
    }

    pub fn count_zeros(&self) -> u32 {
        WORD_BITS as u32 - self.count_ones()
    }

    pub fn has_sync(&self) -> bool {
        SYNC_PATTERN
            .iter()
            .enumerate()
            .all(|(i, &b)| self.bit(64 + i) == b)
    }
}

fn set_field(word: &mut LtcWord, start: usize, len: usize, value: u8) {
    for i in 0..len {
        word.set_bit(start + i, value >> i & 1 == 1);
    }
}

fn get_field(word: &LtcWord, start: usize, len: usize) -> u8 {
    (0..len).fold(0, |acc, i| acc | (u8::from(word.bit(start + i)) << i))
}

const GROUP_POSITIONS: [usize; 8] = [4, 12, 20, 28, 36, 44, 52, 60];

/// Packs a timecode and user bits into an 80-bit word. Drop-frame and
/// color-frame flags are cleared; the polarity-correction bit is computed so
/// the word holds an even number of zeros.
pub fn encode_word(tc: Timecode, ub: UserBits) -> LtcWord {
    let mut w = LtcWord { bytes: [0; 10] };
    set_field(&mut w, 0, 4, tc.frames() % 10);
    set_field(&mut w, 8, 2, tc.frames() / 10);
    set_field(&mut w, 16, 4, tc.seconds() % 10);
    set_field(&mut w, 24, 3, tc.seconds() / 10);
    set_field(&mut w, 32, 4, tc.minutes() % 10);
    set_field(&mut w, 40, 3, tc.minutes() / 10);
    set_field(&mut w, 48, 4, tc.hours() % 10);
    set_field(&mut w, 56, 2, tc.hours() / 10);
    for (i, &pos) in GROUP_POSITIONS.iter().enumerate() {
        set_field(&mut w, pos, 4, ub.group(i));
    }
    for (i, &b) in SYNC_PATTERN.iter().enumerate() {
        w.set_bit(64 + i, b);
    }
    if w.count_zeros() % 2 == 1 {
        w.set_bit(tc.rate().polarity_bit(), true);
    }
    w
}

/// Unpacks a word. Inverse of [`encode_word`] on its image; flag bits are
/// returned verbatim.
pub fn decode_word(
    word: &LtcWord,
    rate: FrameRate,
) -> Result<(Timecode, UserBits, WordFlags), WordError> {
    if !word.has_sync() {
        return Err(WordError::MissingSync);
    }

    let frame_units = get_field(word, 0, 4);
    let frame_tens = get_field(word, 8, 2);
    let second_units = get_field(word, 16, 4);
    let second_tens = get_field(word, 24, 3);
    let minute_units = get_field(word, 32, 4);
    let minute_tens = get_field(word, 40, 3);
    let hour_units = get_field(word, 48, 4);
    let hour_tens = get_field(word, 56, 2);

    if frame_units > 9 {
        return Err(WordError::MalformedWord("frame units nibble exceeds 9"));
    }
    if frame_tens > 2 {
        return Err(WordError::MalformedWord("frame tens exceeds 2"));
    }
    if second_units > 9 {
        return Err(WordError::MalformedWord("seconds units nibble exceeds 9"));
    }
    if second_tens > 5 {
        return Err(WordError::MalformedWord("seconds tens exceeds 5"));
    }
    if minute_units > 9 {
        return Err(WordError::MalformedWord("minutes units nibble exceeds 9"));
    }
    if minute_tens > 5 {
        return Err(WordError::MalformedWord("minutes tens exceeds 5"));
    }
    if hour_units > 9 {
        return Err(WordError::MalformedWord("hours units nibble exceeds 9"));
    }
    // hour_tens is two bits; > 2 is representable and still illegal
    if hour_tens > 2 {
        return Err(WordError::MalformedWord("hours tens exceeds 2"));
    }

    let tc = Timecode::new(
        hour_tens * 10 + hour_units,
        minute_tens * 10 + minute_units,
        second_tens * 10 + second_units,
        frame_tens * 10 + frame_units,
        rate,
    )
    .map_err(|_| WordError::MalformedWord("time field out of range for rate"))?;

    let mut groups = [0u8; 8];
    for (i, &pos) in GROUP_POSITIONS.iter().enumerate() {
        groups[i] = get_field(word, pos, 4);
    }
    let ub = UserBits::new(groups).expect("4-bit fields");

    let (polarity_correction, bgf0, bgf2) = match rate {
        FrameRate::Fps25 => (word.bit(59), word.bit(27), word.bit(43)),
        _ => (word.bit(27), word.bit(43), word.bit(59)),
    };
    let flags = WordFlags {
        drop_frame: word.bit(10),
        color_frame: word.bit(11),
        polarity_correction,
        bgf0,
        bgf1: word.bit(58),
        bgf2,
    };

    Ok((tc, ub, flags))
}
