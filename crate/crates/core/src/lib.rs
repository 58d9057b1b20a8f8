//! GNSS-disciplined linear timecode toolkit.
//!
//! This crate reimplements, in software, the signal chain of a standalone
//! timecode generator that derives SMPTE linear timecode (LTC) from
//! GNSS time and injects it into a camera's microphone input:
//!
//! * [`ltc`] — 80-bit LTC word packing/unpacking and timecode arithmetic;
//! * [`bmc`] — biphase-mark modulation to audio and the matching demodulator,
//!   plus a linear model of the analog output stage and camera input;
//! * [`gnss`] — NMEA time-sentence parsing and timepulse schedules, standing
//!   in for the GNSS receiver;
//! * [`sim`] — cycle-accurate simulation of the frame/bit/half-bit timer
//!   hierarchy under oscillator drift;
//! * [`analysis`] — evaluation uncertainty, synchronization budgets,
//!   alignment metrics, and battery-runtime arithmetic;
//! * [`wav`] — RIFF/WAVE PCM16 reading and writing.
//!
//! A full trip through the audio path:
//!
//! ```
//! use ltcforge::bmc::{demodulate, modulate};
//! use ltcforge::ltc::{decode_word, encode_word, FrameRate, Timecode, UserBits};
//!
//! let rate = FrameRate::Fps25;
//! let mut tc = Timecode::parse("10:20:30:00", rate).unwrap();
//! let words: Vec<_> = (0..rate.fps())
//!     .map(|_| {
//!         let w = encode_word(tc, UserBits::default());
//!         tc = tc.increment();
//!         w
//!     })
//!     .collect();
//!
//! let audio = modulate(&words, rate, 48_000, 0.8).unwrap();
//! let frames = demodulate(&audio).unwrap();
//! assert_eq!(frames.len(), 25);
//! let (first, _, _) = decode_word(&frames[0].word, rate).unwrap();
//! assert_eq!(first.to_string(), "10:20:30:00");
//! ```

pub mod analysis;
pub mod bmc;
pub mod gnss;
pub mod ltc;
pub mod sim;
pub mod wav;

pub use bmc::Waveform;
pub use ltc::{FrameRate, Timecode, UserBits};
