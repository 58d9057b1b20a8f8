//! Cycle-accurate simulation of the generator's timer hierarchy.
//!
//! The firmware drives a GPIO from a 16 MHz timer: a frame timer starts each
//! LTC frame, a bit timer subdivides it into 80 bit slots, and half-bit
//! compare events produce the extra biphase-mark transition for 1-bits. While
//! GNSS is available, the timepulse marking each UTC second re-anchors the
//! frame schedule; afterwards the schedule free-runs on the drifting crystal.
//!
//! All event times are true-time nanoseconds. The oscillator model treats a
//! positive `ppm_error` as a fast crystal (true tick shorter than nominal),
//! so discretization shortfall and oscillator drift accumulate with the same
//! sign — the worst case the synchronization budget is written against.

use std::io::{self, Write};

use crate::bmc::Waveform;
use crate::gnss::{timepulse_schedule, UtcInstant};
use crate::ltc::{encode_word, FrameRate, Timecode, UserBits};

const NS_PER_SEC: f64 = 1e9;

/// Timer hardware configuration.
#[derive(Debug, Clone, Copy)]
pub struct TimerConfig {
    pub f_timer_hz: u64,
    pub rate: FrameRate,
}

impl TimerConfig {
    /// 16 MHz timer (62.5 ns per tick), the hardware maximum.
    pub fn new(rate: FrameRate) -> Self {
        Self {
            f_timer_hz: 16_000_000,
            rate,
        }
    }
}

/// Crystal oscillator frequency error. Positive values model a fast crystal:
/// the true duration of one tick is `1 / (f_timer * (1 + ppm_error * 1e-6))`.
#[derive(Debug, Clone, Copy, Default)]
pub struct OscillatorModel {
    pub ppm_error: f64,
}

impl OscillatorModel {
    pub fn new(ppm_error: f64) -> Self {
        Self { ppm_error }
    }

    /// True duration of one timer tick in nanoseconds.
    pub fn true_tick_ns(&self, f_timer_hz: u64) -> f64 {
        NS_PER_SEC / (f_timer_hz as f64 * (1.0 + self.ppm_error * 1e-6))
    }
}

/// Scenario configuration for one simulation run.
#[derive(Debug, Clone, Copy)]
pub struct SimConfig {
    /// True-time length of the run, seconds.
    pub duration_s: f64,
    /// Timepulses exist strictly before this instant; `0.0` free-runs from
    /// the start, `f64::INFINITY` keeps GNSS locked throughout.
    pub timepulse_until_s: f64,
    /// Fixed latency of computing a frame's bit sequence, seconds.
    pub t_calc_s: f64,
    /// When set, every frame accrues `t_calc_s`; otherwise the latency is
    /// applied once per anchor, matching a single subtraction from the error
    /// budget.
    pub t_calc_per_frame: bool,
    /// RMS of timepulse jitter in nanoseconds (0 = ideal pulses).
    pub timepulse_jitter_rms_ns: f64,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            duration_s: 1.0,
            timepulse_until_s: f64::INFINITY,
            t_calc_s: 37.5e-6,
            t_calc_per_frame: false,
            timepulse_jitter_rms_ns: 0.0,
            seed: 0,
        }
    }
}

/// One output transition: the instant and the level after it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub t_ns: f64,
    pub level: bool,
}

/// Actual start instant of an emitted frame and the timecode it carried.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameStart {
    pub t_ns: f64,
    pub timecode: Timecode,
}

/// Full record of a simulation run: every output transition plus the frame
/// starts, all in true-time nanoseconds.
#[derive(Debug, Clone, Default)]
pub struct EdgeTrace {
    pub edges: Vec<Edge>,
    pub frame_starts: Vec<FrameStart>,
    /// End of the last emitted frame (trace extent for resampling).
    pub end_ns: f64,
}

impl EdgeTrace {
    /// Writes `true_time_ns,level` rows.
    pub fn write_edges_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "true_time_ns,level")?;
        for e in &self.edges {
            writeln!(w, "{:.3},{}", e.t_ns, u8::from(e.level))?;
        }
        Ok(())
    }

    /// Writes `true_time_ns,timecode` rows.
    pub fn write_frame_starts_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "true_time_ns,timecode")?;
        for f in &self.frame_starts {
            writeln!(w, "{:.3},{}", f.t_ns, f.timecode)?;
        }
        Ok(())
    }
}

/// Frame-period discretization at a given timer frequency.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameTicks {
    /// Timer ticks per frame, `floor(f_timer / fps)`.
    pub ticks: u64,
    /// Realized frame period `ticks / f_timer`, seconds.
    pub t_frame_s: f64,
    /// Per-frame shortfall `1/fps - ticks/f_timer`, seconds (non-negative).
    pub residual_s: f64,
}

/// Computes the frame-timer compare value and the deterministic per-frame
/// deviation caused by truncating non-integer frame durations.
pub fn frame_ticks(rate: FrameRate, f_timer_hz: u64) -> FrameTicks {
    let fps = u64::from(rate.fps());
    let ticks = f_timer_hz / fps;
    let remainder = f_timer_hz % fps;
    FrameTicks {
        ticks,
        t_frame_s: ticks as f64 / f_timer_hz as f64,
        residual_s: remainder as f64 / (fps as f64 * f_timer_hz as f64),
    }
}

/// Runs the timer hierarchy from `start` and records every transition.
///
/// While timepulses are available, the frame whose nominal start lands on a
/// UTC second boundary is re-anchored to the pulse (quantized to the next
/// device tick, plus the computation latency); a frame already in flight
/// completes first. After GNSS loss the schedule advances by whole
/// frame-timer periods of drifting oscillator time.
pub fn simulate(
    tcfg: &TimerConfig,
    osc: &OscillatorModel,
    scfg: &SimConfig,
    start: Timecode,
) -> EdgeTrace {
    assert_eq!(
        tcfg.rate,
        start.rate(),
        "timer config and start timecode must agree on the frame rate"
    );
    assert!(scfg.duration_s > 0.0, "duration must be positive");
    assert!(scfg.t_calc_s >= 0.0);

    let fps = tcfg.rate.fps();
    let ft = frame_ticks(tcfg.rate, tcfg.f_timer_hz).ticks;
    let tick_ns = osc.true_tick_ns(tcfg.f_timer_hz);
    let frame_ns = ft as f64 * tick_ns;
    let t_calc_ns = scfg.t_calc_s * NS_PER_SEC;
    let duration_ns = scfg.duration_s * NS_PER_SEC;
    let until_ns = scfg.timepulse_until_s * NS_PER_SEC;

    // Bit slot k opens at tick floor(k * ft / 80); the half-bit compare event
    // sits at floor((k + 0.5) * ft / 80). The non-divisible remainder is
    // absorbed inside the frame, never moving the frame boundary.
    let bit_ticks: Vec<u64> = (0..80u64).map(|k| k * ft / 80).collect();
    let half_ticks: Vec<u64> = (0..80u64).map(|k| (2 * k + 1) * ft / 160).collect();

    // Jittered pulses come from the receiver stand-in; instants_ns[m] is the
    // m-th second boundary relative to the first one.
    let pulses = if scfg.timepulse_jitter_rms_ns > 0.0 && scfg.timepulse_until_s > 0.0 {
        let origin = UtcInstant::new(
            2000,
            1,
            1,
            start.hours(),
            start.minutes(),
            start.seconds(),
            0,
            true,
        )
        .expect("timecode time-of-day is calendar-valid");
        let count = scfg.duration_s.ceil() as usize + 2;
        Some(timepulse_schedule(&origin, count, scfg.timepulse_jitter_rms_ns, scfg.seed).instants_ns)
    } else {
        None
    };
    let mut boundary_index = 0usize;

    let frames_estimate = (scfg.duration_s * f64::from(fps)).ceil() as usize + 1;
    let mut trace = EdgeTrace {
        edges: Vec::with_capacity(frames_estimate * 110),
        frame_starts: Vec::with_capacity(frames_estimate),
        end_ns: 0.0,
    };

    let mut tc = start;
    let mut level = false;
    let mut t_start = if scfg.t_calc_per_frame { 0.0 } else { t_calc_ns };
    let mut frame_index: u64 = 0;

    while t_start < duration_ns {
        if frame_index > 0 && tc.frames() == 0 {
            // Nominal start of this frame is a UTC second boundary.
            let nominal_ns = frame_index as f64 * NS_PER_SEC / f64::from(fps);
            let pulse_ns = match &pulses {
                Some(instants) => {
                    let m = boundary_index;
                    boundary_index += 1;
                    match instants.get(m) {
                        Some(&t) => nominal_ns + (t - m as f64 * NS_PER_SEC),
                        None => nominal_ns,
                    }
                }
                None => nominal_ns,
            };
            if pulse_ns < until_ns {
                let anchor = (pulse_ns / tick_ns).ceil() * tick_ns + t_calc_ns;
                // Bits already in flight complete before the re-anchor takes
                // effect, so the anchor never rewinds the schedule.
                if anchor > t_start {
                    t_start = anchor;
                }
            }
            if t_start >= duration_ns {
                break;
            }
        }

        let word = encode_word(tc, UserBits::default());
        trace.frame_starts.push(FrameStart {
            t_ns: t_start,
            timecode: tc,
        });
        for k in 0..80 {
            level = !level;
            trace.edges.push(Edge {
                t_ns: t_start + bit_ticks[k] as f64 * tick_ns,
                level,
            });
            if word.bit(k) {
                level = !level;
                trace.edges.push(Edge {
                    t_ns: t_start + half_ticks[k] as f64 * tick_ns,
                    level,
                });
            }
        }
        trace.end_ns = t_start + frame_ns;

        t_start += frame_ns;
        if scfg.t_calc_per_frame {
            t_start += t_calc_ns;
        }
        tc = tc.increment();
        frame_index += 1;
    }

    trace
}

/// Per-frame start deviation from an ideal schedule, in nanoseconds:
/// `deviation[k] = frame_starts[k].t - (frame_starts[0].t + k / fps)`.
pub fn measure_frame_deviation(trace: &EdgeTrace, rate: FrameRate) -> Vec<f64> {
    let period_ns = NS_PER_SEC / f64::from(rate.fps());
    let t0 = match trace.frame_starts.first() {
        Some(f) => f.t_ns,
        None => return Vec::new(),
    };
    trace
        .frame_starts
        .iter()
        .enumerate()
        .map(|(k, f)| f.t_ns - (t0 + k as f64 * period_ns))
        .collect()
}

/// Samples the trace's square wave at `sample_rate`, quantizing each edge to
/// the nearest sample. An empty trace yields an empty waveform.
pub fn trace_to_waveform(trace: &EdgeTrace, sample_rate: u32, amplitude: f32) -> Waveform {
    if trace.edges.is_empty() {
        return Waveform::mono(Vec::new(), sample_rate);
    }
    let sr = f64::from(sample_rate);
    let total = (trace.end_ns * sr / NS_PER_SEC).round() as usize;
    let mut samples = vec![0.0f32; total];
    let mut cursor = 0usize;
    let mut level = !trace.edges[0].level;
    for e in &trace.edges {
        let at = ((e.t_ns * sr / NS_PER_SEC).round() as usize).min(total);
        let v = if level { amplitude } else { -amplitude };
        for s in &mut samples[cursor..at] {
            *s = v;
        }
        cursor = at;
        level = e.level;
    }
    let v = if level { amplitude } else { -amplitude };
    for s in &mut samples[cursor..] {
        *s = v;
    }
    Waveform::mono(samples, sample_rate)
}
