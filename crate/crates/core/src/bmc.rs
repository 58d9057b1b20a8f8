//! Biphase-mark modulation of LTC words to audio, and recovery from
//! (possibly filtered, attenuated, noisy) recordings.
//!
//! Biphase mark is self-clocking: every bit boundary toggles the line, and a
//! logic 1 adds a second toggle at the bit midpoint. Information lives in the
//! transitions, not the levels, so decoding is insensitive to polarity.
//!
//! The demodulator needs no prior knowledge of the frame rate: it estimates
//! the bit period from transition-interval statistics, classifies intervals
//! against 0.75x the running estimate, and aligns words on the sync pattern.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

use crate::ltc::{FrameRate, LtcWord, Timecode, SYNC_PATTERN, WORD_BITS};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ModulateError {
    #[error("sample rate {sample_rate} Hz violates Nyquist for bit rate {bit_rate} bit/s")]
    UnsupportedSampleRate { sample_rate: u32, bit_rate: u32 },
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DemodError {
    #[error("no plausible transition stream found")]
    NoSignal,
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum AssignError {
    #[error("video frame {index} lies more than one frame period from any decoded word")]
    NoCoverage { index: usize },
}

/// Sampled audio, normalized to [-1, 1]. Stereo data is interleaved and the
/// LTC signal is carried on the left channel (channel 0).
#[derive(Debug, Clone, PartialEq)]
pub struct Waveform {
    pub samples: Vec<f32>,
    pub sample_rate: u32,
    pub channels: u16,
}

impl Waveform {
    pub fn mono(samples: Vec<f32>, sample_rate: u32) -> Self {
        Self {
            samples,
            sample_rate,
            channels: 1,
        }
    }

    /// Number of sample frames (samples per channel).
    pub fn frame_count(&self) -> usize {
        self.samples.len() / usize::from(self.channels.max(1))
    }

    pub fn duration_s(&self) -> f64 {
        self.frame_count() as f64 / f64::from(self.sample_rate)
    }

    /// Samples of one channel, deinterleaved.
    pub fn channel(&self, index: usize) -> Vec<f32> {
        let ch = usize::from(self.channels.max(1));
        self.samples.iter().copied().skip(index).step_by(ch).collect()
    }

    /// Expands a mono waveform to stereo with the signal on the left channel
    /// and a silent right channel.
    pub fn into_stereo_left(self) -> Waveform {
        assert_eq!(self.channels, 1, "into_stereo_left expects mono input");
        let mut samples = Vec::with_capacity(self.samples.len() * 2);
        for s in self.samples {
            samples.push(s);
            samples.push(0.0);
        }
        Waveform {
            samples,
            sample_rate: self.sample_rate,
            channels: 2,
        }
    }
}

/// Linear model of the analog output stage and camera input: first-order
/// high-pass (AC coupling into the camera's input impedance), attenuation to
/// microphone level, and additive Gaussian noise.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelModel {
    /// -3 dB corner of the high-pass, Hz. 0 disables the filter.
    pub highpass_corner_hz: f64,
    /// Output full scale as a fraction of input full scale.
    pub gain: f64,
    /// RMS of the additive noise, as a fraction of full scale.
    pub noise_rms: f64,
}

impl ChannelModel {
    pub fn new(highpass_corner_hz: f64, gain: f64, noise_rms: f64) -> Self {
        assert!(highpass_corner_hz >= 0.0);
        assert!(gain > 0.0 && gain <= 1.0);
        assert!(noise_rms >= 0.0);
        Self {
            highpass_corner_hz,
            gain,
            noise_rms,
        }
    }
}

impl Default for ChannelModel {
    /// 159 Hz corner, 50 mV output on a 1 V scale, no noise.
    fn default() -> Self {
        Self {
            highpass_corner_hz: 159.0,
            gain: 0.05,
            noise_rms: 0.0,
        }
    }
}

/// One LTC word recovered from audio, with its sample-accurate extent
/// (`start_sample` inclusive, `end_sample` exclusive, channel-0 indices).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DecodedFrame {
    pub word: LtcWord,
    pub start_sample: usize,
    pub end_sample: usize,
}

/// Modulates a raw bit stream as biphase mark. Transition times are ideal
/// instants quantized to the nearest sample; no band-limiting is applied,
/// matching a GPIO-generated square wave. The output starts low.
pub fn modulate_bits(
    bits: &[bool],
    bits_per_second: u32,
    sample_rate: u32,
    amplitude: f32,
) -> Result<Waveform, ModulateError> {
    assert!(amplitude > 0.0 && amplitude <= 1.0, "amplitude in (0, 1]");
    // The all-ones pattern toggles at twice the bit rate; demand > 2 samples
    // per toggle interval.
    if u64::from(sample_rate) <= 4 * u64::from(bits_per_second) {
        return Err(ModulateError::UnsupportedSampleRate {
            sample_rate,
            bit_rate: bits_per_second,
        });
    }

    let sr = u64::from(sample_rate);
    let bps = u64::from(bits_per_second);
    let n_bits = bits.len() as u64;
    // round(n_bits * sr / bps)
    let total = ((2 * n_bits * sr + bps) / (2 * bps)) as usize;
    let mut samples = vec![0.0f32; total];

    // half-bit index h covers instant h / (2 * bps)
    let edge_sample = |h: u64| -> usize { ((h * sr + bps) / (2 * bps)) as usize };

    let mut level = false;
    let mut cursor = 0usize;
    let place = |upto: usize, level: bool, samples: &mut [f32], cursor: &mut usize| {
        let upto = upto.min(samples.len());
        let v = if level { amplitude } else { -amplitude };
        for s in &mut samples[*cursor..upto] {
            *s = v;
        }
        *cursor = upto;
    };

    for (k, &bit) in bits.iter().enumerate() {
        let k = k as u64;
        place(edge_sample(2 * k), level, &mut samples, &mut cursor);
        level = !level;
        if bit {
            place(edge_sample(2 * k + 1), level, &mut samples, &mut cursor);
            level = !level;
        }
    }
    let v = if level { amplitude } else { -amplitude };
    for s in &mut samples[cursor..] {
        *s = v;
    }

    Ok(Waveform::mono(samples, sample_rate))
}

/// Modulates a sequence of words at `80 * fps` bit/s. Polarity is continuous
/// across word boundaries.
pub fn modulate(
    words: &[LtcWord],
    rate: FrameRate,
    sample_rate: u32,
    amplitude: f32,
) -> Result<Waveform, ModulateError> {
    assert!(!words.is_empty(), "modulate requires at least one word");
    let bits: Vec<bool> = words.iter().flat_map(|w| w.bits().collect::<Vec<_>>()).collect();
    modulate_bits(&bits, rate.bit_rate(), sample_rate, amplitude)
}

/// Applies the channel model: gain scaling, bilinear-discretized first-order
/// high-pass at the waveform's sample rate, then seeded Gaussian noise.
/// Bit-reproducible for a fixed seed.
pub fn apply_channel(w: &Waveform, ch: &ChannelModel, seed: u64) -> Waveform {
    let channels = usize::from(w.channels.max(1));
    let mut out = w.samples.clone();

    if ch.gain != 1.0 {
        for s in &mut out {
            *s = (f64::from(*s) * ch.gain) as f32;
        }
    }

    if ch.highpass_corner_hz > 0.0 {
        let a = std::f64::consts::PI * ch.highpass_corner_hz / f64::from(w.sample_rate);
        let b0 = 1.0 / (1.0 + a);
        let a1 = (1.0 - a) / (1.0 + a);
        for c in 0..channels {
            let mut x_prev = 0.0f64;
            let mut y_prev = 0.0f64;
            let mut i = c;
            while i < out.len() {
                let x = f64::from(out[i]);
                let y = b0 * (x - x_prev) + a1 * y_prev;
                out[i] = y as f32;
                x_prev = x;
                y_prev = y;
                i += channels;
            }
        }
    }

    if ch.noise_rms > 0.0 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Normal::new(0.0, ch.noise_rms).expect("finite rms");
        for s in &mut out {
            *s = (f64::from(*s) + dist.sample(&mut rng)) as f32;
        }
    }

    Waveform {
        samples: out,
        sample_rate: w.sample_rate,
        channels: w.channels,
    }
}

// Comparator thresholds sit at +-30% of the running peak estimate.
const HYSTERESIS_FRACTION: f32 = 0.30;
// Ignore the comparator until the peak estimate clears this floor.
const MIN_PEAK: f32 = 1e-4;
// Intervals shorter than this fraction of a bit period are half-bits.
const HALF_BIT_THRESHOLD: f64 = 0.75;
// Intervals longer than this fraction of a bit period are dropouts.
const DROPOUT_THRESHOLD: f64 = 1.75;
// Transition intervals buffered before the bit period is estimated.
const BOOTSTRAP_INTERVALS: usize = 200;
// Exponential smoothing factor for the bit-period estimate.
const PERIOD_ALPHA: f64 = 0.05;

#[derive(Debug, Clone, Copy)]
struct DecodedBit {
    value: bool,
    start: u64,
    len: u64,
}

/// Streaming biphase-mark decoder. Feed mono samples with [`push`], collect
/// remaining state with [`finish`]. One instance must not be shared across
/// threads; independent instances are fine.
///
/// [`push`]: Demodulator::push
/// [`finish`]: Demodulator::finish
#[derive(Debug)]
pub struct Demodulator {
    // comparator
    peak: f32,
    peak_decay: f32,
    state: Option<bool>,
    cursor: u64,
    last_transition: Option<u64>,
    transitions: u64,
    // interval -> bit
    bootstrap: Vec<(u64, u64)>,
    bit_period: Option<f64>,
    pending_half: Option<(u64, u64)>,
    bits: Vec<DecodedBit>,
    frames: Vec<DecodedFrame>,
}

impl Demodulator {
    pub fn new(sample_rate: u32) -> Self {
        // ~100 ms peak-tracking time constant
        let peak_decay = (-1.0 / (0.1 * f64::from(sample_rate))).exp() as f32;
        Self {
            peak: 0.0,
            peak_decay,
            state: None,
            cursor: 0,
            last_transition: None,
            transitions: 0,
            bootstrap: Vec::new(),
            bit_period: None,
            pending_half: None,
            bits: Vec::new(),
            frames: Vec::new(),
        }
    }

    /// Total transitions seen so far.
    pub fn transition_count(&self) -> u64 {
        self.transitions
    }

    /// Consumes mono samples; complete frames accumulate internally.
    pub fn push(&mut self, samples: &[f32]) {
        for &s in samples {
            let mag = s.abs();
            self.peak = if mag > self.peak {
                mag
            } else {
                self.peak * self.peak_decay
            };
            if self.peak >= MIN_PEAK {
                let hi = HYSTERESIS_FRACTION * self.peak;
                let flipped = match self.state {
                    None => {
                        if s > hi {
                            self.state = Some(true);
                            true
                        } else if s < -hi {
                            self.state = Some(false);
                            true
                        } else {
                            false
                        }
                    }
                    Some(true) if s < -hi => {
                        self.state = Some(false);
                        true
                    }
                    Some(false) if s > hi => {
                        self.state = Some(true);
                        true
                    }
                    _ => false,
                };
                if flipped {
                    self.on_transition(self.cursor);
                }
            }
            self.cursor += 1;
        }
    }

    /// Flushes a trailing word whose final mid-bit transition has no
    /// successor, then returns every frame decoded so far in order.
    pub fn finish(mut self) -> Vec<DecodedFrame> {
        if self.bit_period.is_none() && self.bootstrap.len() >= 24 {
            self.estimate_bit_period();
        }
        // A stream ending right after a 1-bit's mid transition leaves that
        // bit half-open; close it with the estimated period.
        if let (Some((start, len)), Some(bp)) = (self.pending_half.take(), self.bit_period) {
            let full = bp.round() as u64;
            self.emit_bit(true, start, full.max(len + 1));
        }
        self.frames
    }

    fn on_transition(&mut self, at: u64) {
        self.transitions += 1;
        if let Some(prev) = self.last_transition {
            let len = at - prev;
            if self.bit_period.is_none() {
                self.bootstrap.push((prev, len));
                if self.bootstrap.len() >= BOOTSTRAP_INTERVALS {
                    self.estimate_bit_period();
                }
            } else {
                self.classify(prev, len);
            }
        }
        self.last_transition = Some(at);
    }

    // The interval histogram is bimodal at T/2 and T. The median lands on one
    // of the modes; which one is decided by whether intervals about twice as
    // long exist.
    fn estimate_bit_period(&mut self) {
        let mut lens: Vec<u64> = self.bootstrap.iter().map(|&(_, l)| l).collect();
        lens.sort_unstable();
        let median = lens[lens.len() / 2] as f64;
        let max = *lens.last().expect("non-empty") as f64;
        let period = if max > 1.5 * median { 2.0 * median } else { median };
        self.bit_period = Some(period);
        let buffered: Vec<(u64, u64)> = std::mem::take(&mut self.bootstrap);
        for (start, len) in buffered {
            self.classify(start, len);
        }
    }

    fn classify(&mut self, start: u64, len: u64) {
        let bp = self.bit_period.expect("classify after bootstrap");
        let l = len as f64;
        if l < HALF_BIT_THRESHOLD * bp {
            match self.pending_half.take() {
                None => self.pending_half = Some((start, len)),
                Some((s0, l0)) => {
                    self.bit_period = Some(bp + PERIOD_ALPHA * ((l0 + len) as f64 - bp));
                    self.emit_bit(true, s0, l0 + len);
                }
            }
        } else if l < DROPOUT_THRESHOLD * bp {
            // An orphaned half interval before a full one is noise; drop it.
            self.pending_half = None;
            self.bit_period = Some(bp + PERIOD_ALPHA * (l - bp));
            self.emit_bit(false, start, len);
        } else {
            // dropout: lose bit sync, keep the transition clock running
            self.pending_half = None;
        }
    }

    fn emit_bit(&mut self, value: bool, start: u64, len: u64) {
        self.bits.push(DecodedBit { value, start, len });
        self.try_extract();
        if self.bits.len() > 4 * WORD_BITS {
            self.bits.drain(0..WORD_BITS);
        }
    }

    fn try_extract(&mut self) {
        let n = self.bits.len();
        if n < WORD_BITS {
            return;
        }
        let sync_ok = SYNC_PATTERN
            .iter()
            .enumerate()
            .all(|(i, &b)| self.bits[n - 16 + i].value == b);
        if !sync_ok {
            return;
        }
        let word_bits = &self.bits[n - WORD_BITS..];
        let mut bytes = [0u8; 10];
        for (i, b) in word_bits.iter().enumerate() {
            if b.value {
                bytes[i / 8] |= 1 << (i % 8);
            }
        }
        let last = word_bits[WORD_BITS - 1];
        self.frames.push(DecodedFrame {
            word: LtcWord::from_bytes(bytes),
            start_sample: word_bits[0].start as usize,
            end_sample: (last.start + last.len) as usize,
        });
        self.bits.clear();
    }
}

/// Demodulates a waveform into the LTC words it carries, in temporal order.
/// Stereo input is decoded from the left channel. Degraded stretches yield
/// partial results; a stream with fewer transitions than one word is
/// [`DemodError::NoSignal`].
pub fn demodulate(w: &Waveform) -> Result<Vec<DecodedFrame>, DemodError> {
    let mut dem = Demodulator::new(w.sample_rate);
    if w.channels <= 1 {
        dem.push(&w.samples);
    } else {
        dem.push(&w.channel(0));
    }
    let transitions = dem.transition_count();
    let frames = dem.finish();
    if transitions <= WORD_BITS as u64 {
        return Err(DemodError::NoSignal);
    }
    Ok(frames)
}

/// A video frame's assigned timecode, with the offset to the word start that
/// produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameAssignment {
    pub timecode: Timecode,
    /// Start of the assigned word on the recording timeline, seconds.
    pub word_time_s: f64,
    /// `word_time_s - video_time_s`; bounded by half a frame period when
    /// generator and camera are synchronized.
    pub offset_s: f64,
}

/// Assigns to each video capture instant the timecode of the temporally
/// nearest decoded word. Words that fail BCD validation are skipped. A video
/// frame further than one frame period from every word is an error.
pub fn assign_frames(
    decoded: &[DecodedFrame],
    sample_rate: u32,
    video_times_s: &[f64],
    rate: FrameRate,
) -> Result<Vec<FrameAssignment>, AssignError> {
    assert!(!decoded.is_empty(), "assign_frames requires decoded words");
    let sr = f64::from(sample_rate);
    let words: Vec<(f64, Timecode)> = decoded
        .iter()
        .filter_map(|f| {
            crate::ltc::decode_word(&f.word, rate)
                .ok()
                .map(|(tc, _, _)| (f.start_sample as f64 / sr, tc))
        })
        .collect();

    let mut out = Vec::with_capacity(video_times_s.len());
    for (index, &t) in video_times_s.iter().enumerate() {
        // word times are sorted; the nearest is adjacent to the insertion point
        let right = words.partition_point(|&(wt, _)| wt < t);
        let nearest = [right.wrapping_sub(1), right]
            .into_iter()
            .filter_map(|i| words.get(i))
            .map(|&(wt, tc)| (wt, tc, (wt - t).abs()))
            .min_by(|a, b| a.2.total_cmp(&b.2));
        match nearest {
            Some((wt, tc, dist)) if dist <= rate.frame_period_s() => out.push(FrameAssignment {
                timecode: tc,
                word_time_s: wt,
                offset_s: wt - t,
            }),
            _ => return Err(AssignError::NoCoverage { index }),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ltc::{encode_word, UserBits};

    fn words_from(start: Timecode, count: usize) -> Vec<LtcWord> {
        let mut tc = start;
        let mut out = Vec::with_capacity(count);
        for _ in 0..count {
            out.push(encode_word(tc, UserBits::default()));
            tc = tc.increment();
        }
        out
    }

    #[test]
    fn one_word_at_25fps_48k_is_1920_samples() {
        let w = modulate(
            &words_from(Timecode::zero(FrameRate::Fps25), 1),
            FrameRate::Fps25,
            48_000,
            0.8,
        )
        .unwrap();
        assert_eq!(w.samples.len(), 1920);
    }

    #[test]
    fn transition_count_is_self_clocking() {
        // 80 bit-boundary toggles plus one per 1-bit
        let word = encode_word(Timecode::zero(FrameRate::Fps30), UserBits::from_u32(0xDEAD));
        let ones = word.count_ones() as usize;
        let w = modulate(&[word], FrameRate::Fps30, 48_000, 0.5).unwrap();
        let mut transitions = 0;
        for pair in w.samples.windows(2) {
            if (pair[0] > 0.0) != (pair[1] > 0.0) {
                transitions += 1;
            }
        }
        // the first toggle lands on sample 0 and is not visible as a crossing
        assert_eq!(transitions, 80 + ones - 1);
    }

    #[test]
    fn nyquist_violation_is_rejected() {
        let words = words_from(Timecode::zero(FrameRate::Fps30), 1);
        assert_eq!(
            modulate(&words, FrameRate::Fps30, 8_000, 0.5),
            Err(ModulateError::UnsupportedSampleRate {
                sample_rate: 8_000,
                bit_rate: 2_400,
            })
        );
    }

    #[test]
    fn silence_is_no_signal() {
        let w = Waveform::mono(vec![0.0; 48_000], 48_000);
        assert_eq!(demodulate(&w), Err(DemodError::NoSignal));
    }

    #[test]
    fn one_second_at_30fps_recovers_29_or_30_frames() {
        let words = words_from(Timecode::zero(FrameRate::Fps30), 30);
        let w = modulate(&words, FrameRate::Fps30, 48_000, 0.8).unwrap();
        let frames = demodulate(&w).unwrap();
        assert!(
            (29..=30).contains(&frames.len()),
            "got {} frames",
            frames.len()
        );
        for (i, f) in frames.iter().enumerate() {
            let (tc, _, _) = crate::ltc::decode_word(&f.word, FrameRate::Fps30).unwrap();
            assert_eq!(tc.total_frames(), i as u32);
        }
    }

    #[test]
    fn decoded_frames_are_ordered_and_disjoint() {
        let words = words_from(Timecode::zero(FrameRate::Fps25), 10);
        let w = modulate(&words, FrameRate::Fps25, 44_100, 0.8).unwrap();
        let frames = demodulate(&w).unwrap();
        for f in &frames {
            assert!(f.start_sample < f.end_sample);
        }
        for pair in frames.windows(2) {
            assert!(pair[0].end_sample <= pair[1].start_sample);
        }
    }

    #[test]
    fn polarity_inversion_is_transparent() {
        let words = words_from(Timecode::zero(FrameRate::Fps24), 5);
        let w = modulate(&words, FrameRate::Fps24, 48_000, 0.6).unwrap();
        let inverted = Waveform::mono(w.samples.iter().map(|s| -s).collect(), 48_000);
        let a = demodulate(&w).unwrap();
        let b = demodulate(&inverted).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn stereo_left_channel_is_decoded() {
        let words = words_from(Timecode::zero(FrameRate::Fps30), 5);
        let stereo = modulate(&words, FrameRate::Fps30, 48_000, 0.8)
            .unwrap()
            .into_stereo_left();
        let frames = demodulate(&stereo).unwrap();
        assert_eq!(frames.len(), 5);
    }

    #[test]
    fn identity_channel_is_bit_exact() {
        let words = words_from(Timecode::zero(FrameRate::Fps25), 2);
        let w = modulate(&words, FrameRate::Fps25, 48_000, 0.7).unwrap();
        let out = apply_channel(&w, &ChannelModel::new(0.0, 1.0, 0.0), 1);
        assert_eq!(out.samples, w.samples);
    }

    #[test]
    fn highpass_removes_dc() {
        let w = Waveform::mono(vec![0.5; 48_000], 48_000);
        let out = apply_channel(&w, &ChannelModel::new(159.0, 1.0, 0.0), 0);
        let tail = &out.samples[47_000..];
        let mean: f64 = tail.iter().map(|&s| f64::from(s)).sum::<f64>() / tail.len() as f64;
        assert!(mean.abs() < 1e-3, "steady-state mean {mean}");
    }

    #[test]
    fn highpass_minus_3db_at_corner() {
        let sr = 48_000u32;
        let f = 159.0f64;
        let samples: Vec<f32> = (0..sr)
            .map(|n| (0.5 * (2.0 * std::f64::consts::PI * f * f64::from(n) / f64::from(sr)).sin()) as f32)
            .collect();
        let w = Waveform::mono(samples, sr);
        let out = apply_channel(&w, &ChannelModel::new(f, 1.0, 0.0), 0);
        let peak = out.samples[sr as usize / 2..]
            .iter()
            .fold(0.0f32, |m, &s| m.max(s.abs()));
        let ratio = f64::from(peak) / 0.5;
        let target = std::f64::consts::FRAC_1_SQRT_2;
        assert!(
            (ratio - target).abs() / target < 0.02,
            "corner attenuation {ratio}, want {target}"
        );
    }

    #[test]
    fn channel_application_is_deterministic() {
        let words = words_from(Timecode::zero(FrameRate::Fps30), 3);
        let w = modulate(&words, FrameRate::Fps30, 44_100, 0.8).unwrap();
        let ch = ChannelModel::new(159.0, 0.01, 0.001);
        let a = apply_channel(&w, &ch, 99);
        let b = apply_channel(&w, &ch, 99);
        assert_eq!(a.samples, b.samples);
        let c = apply_channel(&w, &ch, 100);
        assert_ne!(a.samples, c.samples);
    }

    #[test]
    fn default_channel_round_trip_matches_clean_decode() {
        let words = words_from(Timecode::zero(FrameRate::Fps30), 30);
        let clean = modulate(&words, FrameRate::Fps30, 48_000, 0.8).unwrap();
        let dirty = apply_channel(&clean, &ChannelModel::new(159.0, 0.05, 0.005), 7);
        let a: Vec<LtcWord> = demodulate(&clean).unwrap().iter().map(|f| f.word).collect();
        let b: Vec<LtcWord> = demodulate(&dirty).unwrap().iter().map(|f| f.word).collect();
        assert_eq!(a, b);
    }

    #[test]
    fn assign_nearest_word() {
        let words = words_from(Timecode::zero(FrameRate::Fps25), 25);
        let w = modulate(&words, FrameRate::Fps25, 48_000, 0.8).unwrap();
        let frames = demodulate(&w).unwrap();
        let period = FrameRate::Fps25.frame_period_s();
        let t0 = frames[0].start_sample as f64 / 48_000.0;

        // exactly at a word start
        let a = assign_frames(&frames, 48_000, &[t0 + 5.0 * period], FrameRate::Fps25).unwrap();
        assert_eq!(a[0].timecode.total_frames(), 5);
        assert!(a[0].offset_s.abs() < 1e-3);

        // 0.49 of a period later still maps to the same word
        let b = assign_frames(
            &frames,
            48_000,
            &[t0 + 5.0 * period + 0.49 * period],
            FrameRate::Fps25,
        )
        .unwrap();
        assert_eq!(b[0].timecode.total_frames(), 5);

        // two periods past the end of the decoded range
        let beyond = frames.last().unwrap().end_sample as f64 / 48_000.0 + 2.0 * period;
        assert_eq!(
            assign_frames(&frames, 48_000, &[beyond], FrameRate::Fps25),
            Err(AssignError::NoCoverage { index: 0 })
        );
    }
}
