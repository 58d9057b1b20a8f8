//! Subcommand implementations.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::Args;

use ltcforge::analysis::{
    alignment_metrics, rms_uncertainty, sync_budget, EvalSetup, SyncBudgetInput,
};
use ltcforge::bmc::{assign_frames, demodulate, modulate, DecodedFrame, Waveform};
use ltcforge::gnss::UtcInstant;
use ltcforge::ltc::{encode_word, timecode_from_utc, FrameRate, Timecode, UserBits};
use ltcforge::sim::{
    frame_ticks, measure_frame_deviation, simulate, trace_to_waveform, OscillatorModel, SimConfig,
    TimerConfig,
};
use ltcforge::wav::{read_wav, write_wav, WavSpec};

use crate::config::{require, Config};
use crate::CliError;

fn parse_fps(fps: u32) -> Result<FrameRate, CliError> {
    FrameRate::from_fps(fps)
        .ok_or_else(|| CliError::Usage(format!("unsupported --fps {fps}; use 24, 25, or 30")))
}

fn parse_sample_rate(rate: u32) -> Result<u32, CliError> {
    match rate {
        44_100 | 48_000 => Ok(rate),
        other => Err(CliError::Usage(format!(
            "unsupported --sample-rate {other}; use 44100 or 48000"
        ))),
    }
}

fn parse_amplitude(a: f64) -> Result<f32, CliError> {
    if a > 0.0 && a <= 1.0 {
        Ok(a as f32)
    } else {
        Err(CliError::Usage(format!("--amplitude {a} outside (0, 1]")))
    }
}

fn parse_start(spec: &str, rate: FrameRate) -> Result<Timecode, CliError> {
    if spec == "now-utc" {
        let now = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map_err(|e| CliError::Io(format!("system clock: {e}")))?;
        let utc = UtcInstant::from_unix(now.as_secs() as i64, now.subsec_nanos());
        return Ok(timecode_from_utc(&utc, rate));
    }
    Timecode::parse(spec, rate)
        .map_err(|e| CliError::Usage(format!("--start `{spec}`: {e} (expected hh:mm:ss:ff or now-utc)")))
}

fn create(path: &Path) -> Result<BufWriter<File>, CliError> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|e| CliError::Io(format!("creating {}: {e}", path.display())))
}

#[derive(Args)]
pub struct EncodeArgs {
    /// Frame rate: 24, 25, or 30.
    #[arg(long)]
    fps: Option<u32>,
    /// First timecode, `hh:mm:ss:ff` or `now-utc`.
    #[arg(long)]
    start: Option<String>,
    /// Length of the run in seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Output sample rate: 44100 or 48000.
    #[arg(long = "sample-rate")]
    sample_rate: Option<u32>,
    /// Peak amplitude as a fraction of full scale, in (0, 1].
    #[arg(long)]
    amplitude: Option<f64>,
    /// Output WAV path.
    #[arg(long)]
    out: Option<PathBuf>,
}

pub fn run_encode(args: EncodeArgs, config: &Config) -> Result<(), CliError> {
    let rate = parse_fps(require(args.fps, config.u32("fps"), "fps")?)?;
    let duration = require(args.duration, config.f64("duration"), "duration")?;
    if duration.is_nan() || duration < 0.0 {
        return Err(CliError::Usage(format!("--duration {duration} must be >= 0")));
    }
    let sample_rate = parse_sample_rate(
        args.sample_rate
            .or(config.u32("sample-rate"))
            .unwrap_or(48_000),
    )?;
    let amplitude = parse_amplitude(args.amplitude.or(config.f64("amplitude")).unwrap_or(0.5))?;
    let start_spec = args
        .start
        .or(config.string("start"))
        .unwrap_or_else(|| "00:00:00:00".into());
    let out = require(args.out, config.string("out").map(PathBuf::from), "out")?;

    let start = parse_start(&start_spec, rate)?;
    let n_words = (duration * f64::from(rate.fps())).round() as usize;

    let wave = if n_words == 0 {
        Waveform::mono(Vec::new(), sample_rate)
    } else {
        let mut words = Vec::with_capacity(n_words);
        let mut tc = start;
        for _ in 0..n_words {
            words.push(encode_word(tc, UserBits::default()));
            tc = tc.increment();
        }
        modulate(&words, rate, sample_rate, amplitude)
            .map_err(|e| CliError::Usage(e.to_string()))?
    };

    write_wav(&wave, WavSpec::for_waveform(&wave), &out)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", out.display())))?;
    println!(
        "wrote {} frames from {} at {} fps to {} ({} Hz, {:.3} s)",
        n_words,
        start,
        rate,
        out.display(),
        sample_rate,
        wave.duration_s()
    );
    Ok(())
}

#[derive(Args)]
pub struct DecodeArgs {
    /// Input WAV path (stereo input is decoded from the left channel).
    #[arg(long = "in")]
    input: Option<PathBuf>,
    /// CSV of video capture instants in seconds (one per line, or the last
    /// comma-separated column). Alternative: --fps for a uniform grid.
    #[arg(long = "frame-times")]
    frame_times: Option<PathBuf>,
    /// Build a uniform capture grid at this frame rate instead of reading
    /// --frame-times.
    #[arg(long)]
    fps: Option<u32>,
    /// Output CSV path (`frame_index,video_time_s,timecode,error_ms`).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn read_frame_times(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let mut times = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let last = line.rsplit(',').next().unwrap_or(line).trim();
        if let Ok(t) = last.parse::<f64>() {
            times.push(t);
        }
    }
    if times.is_empty() {
        return Err(CliError::Usage(format!(
            "{} contains no frame times",
            path.display()
        )));
    }
    Ok(times)
}

fn infer_rate(frames: &[DecodedFrame], sample_rate: u32) -> FrameRate {
    let mut lengths: Vec<usize> = frames.iter().map(|f| f.end_sample - f.start_sample).collect();
    lengths.sort_unstable();
    let median = lengths[lengths.len() / 2] as f64;
    let fps_estimate = f64::from(sample_rate) / median;
    *FrameRate::ALL
        .iter()
        .min_by(|a, b| {
            (f64::from(a.fps()) - fps_estimate)
                .abs()
                .total_cmp(&(f64::from(b.fps()) - fps_estimate).abs())
        })
        .expect("non-empty rate list")
}

pub fn run_decode(args: DecodeArgs, config: &Config) -> Result<(), CliError> {
    let input = require(args.input, config.string("in").map(PathBuf::from), "in")?;
    let out = require(args.out, config.string("out").map(PathBuf::from), "out")?;
    let fps = args.fps.or(config.u32("fps"));
    let frame_times_path = args
        .frame_times
        .or(config.string("frame-times").map(PathBuf::from));
    if fps.is_none() && frame_times_path.is_none() {
        return Err(CliError::Usage(
            "provide --frame-times <csv> or --fps for a uniform grid".into(),
        ));
    }

    let (wave, spec) = read_wav(&input)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", input.display())))?;
    let frames = demodulate(&wave).map_err(|e| CliError::Signal(e.to_string()))?;
    if frames.is_empty() {
        return Err(CliError::Signal("no LTC words found in the input".into()));
    }

    let rate = match fps {
        Some(f) => parse_fps(f)?,
        None => infer_rate(&frames, spec.sample_rate),
    };

    let video_times = match &frame_times_path {
        Some(path) => read_frame_times(path)?,
        None => {
            let count = (wave.duration_s() * f64::from(rate.fps()) + 1e-9).floor() as usize;
            (0..count)
                .map(|k| k as f64 * rate.frame_period_s())
                .collect()
        }
    };

    let assignments = assign_frames(&frames, spec.sample_rate, &video_times, rate)
        .map_err(|e| CliError::Signal(e.to_string()))?;

    let mut w = create(&out)?;
    writeln!(w, "frame_index,video_time_s,timecode,error_ms")
        .map_err(|e| CliError::Io(e.to_string()))?;
    for (i, (t, a)) in video_times.iter().zip(&assignments).enumerate() {
        writeln!(w, "{},{:.6},{},{:.3}", i, t, a.timecode, a.offset_s * 1e3)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    println!(
        "decoded {} words at {} fps from {}; assigned {} video frames to {}",
        frames.len(),
        rate,
        input.display(),
        assignments.len(),
        out.display()
    );
    Ok(())
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Frame rate: 24, 25, or 30.
    #[arg(long)]
    fps: Option<u32>,
    /// Oscillator frequency error in ppm (positive = fast crystal).
    #[arg(long)]
    ppm: Option<f64>,
    /// Instant at which GNSS timepulses stop, seconds (0 = free-run from the
    /// start; omit to keep GNSS locked).
    #[arg(long = "gnss-loss-at")]
    gnss_loss_at: Option<f64>,
    /// Fixed per-frame computation latency, seconds.
    #[arg(long = "t-calc")]
    t_calc: Option<f64>,
    /// Accrue --t-calc on every frame instead of once per anchor.
    #[arg(long = "t-calc-per-frame", default_value_t = false)]
    t_calc_per_frame: bool,
    /// Simulated true-time duration, seconds.
    #[arg(long)]
    duration: Option<f64>,
    /// Timer frequency in Hz.
    #[arg(long = "f-timer")]
    f_timer: Option<u64>,
    /// First timecode, `hh:mm:ss:ff`.
    #[arg(long)]
    start: Option<String>,
    /// Timepulse jitter RMS in nanoseconds.
    #[arg(long = "timepulse-jitter-ns")]
    timepulse_jitter_ns: Option<f64>,
    /// Edge-trace CSV output (`true_time_ns,level`).
    #[arg(long = "trace-out")]
    trace_out: Option<PathBuf>,
    /// Frame-start CSV output (`true_time_ns,timecode`).
    #[arg(long = "frames-out")]
    frames_out: Option<PathBuf>,
    /// Optional WAV rendering of the simulated output pin.
    #[arg(long = "wav-out")]
    wav_out: Option<PathBuf>,
    /// Sample rate for --wav-out.
    #[arg(long = "sample-rate")]
    sample_rate: Option<u32>,
    /// Amplitude for --wav-out, in (0, 1].
    #[arg(long)]
    amplitude: Option<f64>,
}

pub fn run_simulate(args: SimulateArgs, config: &Config, seed: u64) -> Result<(), CliError> {
    let rate = parse_fps(require(args.fps, config.u32("fps"), "fps")?)?;
    let duration = require(args.duration, config.f64("duration"), "duration")?;
    if duration.is_nan() || duration <= 0.0 {
        return Err(CliError::Usage(format!("--duration {duration} must be > 0")));
    }
    let ppm = args.ppm.or(config.f64("ppm")).unwrap_or(0.0);
    let t_calc = args.t_calc.or(config.f64("t-calc")).unwrap_or(37.5e-6);
    if t_calc.is_nan() || t_calc < 0.0 || t_calc >= rate.half_frame_s() {
        return Err(CliError::Usage(format!(
            "--t-calc {t_calc} must be in [0, half frame period)"
        )));
    }
    let f_timer = args.f_timer.or(config.u64("f-timer")).unwrap_or(16_000_000);
    let gnss_loss_at = args
        .gnss_loss_at
        .or(config.f64("gnss-loss-at"))
        .unwrap_or(f64::INFINITY);
    let jitter = args
        .timepulse_jitter_ns
        .or(config.f64("timepulse-jitter-ns"))
        .unwrap_or(0.0);
    if jitter.is_nan() || !(0.0..0.4e9).contains(&jitter) {
        return Err(CliError::Usage(format!(
            "--timepulse-jitter-ns {jitter} must be in [0, 4e8)"
        )));
    }
    let start_spec = args
        .start
        .or(config.string("start"))
        .unwrap_or_else(|| "00:00:00:00".into());
    let start = parse_start(&start_spec, rate)?;
    let trace_out = require(
        args.trace_out,
        config.string("trace-out").map(PathBuf::from),
        "trace-out",
    )?;

    let tcfg = TimerConfig {
        f_timer_hz: f_timer,
        rate,
    };
    let scfg = SimConfig {
        duration_s: duration,
        timepulse_until_s: gnss_loss_at,
        t_calc_s: t_calc,
        t_calc_per_frame: args.t_calc_per_frame || config.bool("t-calc-per-frame").unwrap_or(false),
        timepulse_jitter_rms_ns: jitter,
        seed,
    };
    let trace = simulate(&tcfg, &OscillatorModel::new(ppm), &scfg, start);

    trace
        .write_edges_csv(create(&trace_out)?)
        .map_err(|e| CliError::Io(format!("writing {}: {e}", trace_out.display())))?;
    if let Some(path) = &args.frames_out {
        trace
            .write_frame_starts_csv(create(path)?)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    }
    if let Some(path) = &args.wav_out {
        let sample_rate = parse_sample_rate(
            args.sample_rate
                .or(config.u32("sample-rate"))
                .unwrap_or(48_000),
        )?;
        let amplitude =
            parse_amplitude(args.amplitude.or(config.f64("amplitude")).unwrap_or(0.5))?;
        let wave = trace_to_waveform(&trace, sample_rate, amplitude);
        write_wav(&wave, WavSpec::for_waveform(&wave), path)
            .map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))?;
    }

    let deviations = measure_frame_deviation(&trace, rate);
    let half_frame_ns = rate.half_frame_s() * 1e9;
    println!("frames: {}", trace.frame_starts.len());
    println!("edges: {}", trace.edges.len());
    if let Some(last) = deviations.last() {
        println!("final frame-start deviation: {:.3} us", last / 1e3);
    }
    match deviations.iter().position(|d| d.abs() > half_frame_ns) {
        Some(k) => println!(
            "first half-frame exceedance: {:.2} s (frame {k})",
            trace.frame_starts[k].t_ns / 1e9
        ),
        None => println!("first half-frame exceedance: none within {duration} s"),
    }
    Ok(())
}

#[derive(Args)]
pub struct BudgetArgs {
    /// Frame rate: 24, 25, or 30.
    #[arg(long)]
    fps: Option<u32>,
    /// Oscillator frequency error magnitude, ppm.
    #[arg(long)]
    ppm: Option<f64>,
    /// Fixed computation latency, seconds.
    #[arg(long = "t-calc")]
    t_calc: Option<f64>,
    /// Worst-case per-frame discretization deviation, seconds. Derived from
    /// --f-timer when omitted.
    #[arg(long = "eps-frame")]
    eps_frame: Option<f64>,
    /// Timer frequency in Hz, used to derive --eps-frame.
    #[arg(long = "f-timer")]
    f_timer: Option<u64>,
}

pub fn run_budget(args: BudgetArgs, config: &Config) -> Result<(), CliError> {
    let rate = parse_fps(require(args.fps, config.u32("fps"), "fps")?)?;
    let ppm = require(args.ppm, config.f64("ppm"), "ppm")?;
    if ppm.is_nan() || ppm < 0.0 {
        return Err(CliError::Usage("--ppm is a magnitude and must be >= 0".into()));
    }
    let t_calc = args.t_calc.or(config.f64("t-calc")).unwrap_or(37.5e-6);
    let f_timer = args.f_timer.or(config.u64("f-timer")).unwrap_or(16_000_000);
    let eps_frame = args
        .eps_frame
        .or(config.f64("eps-frame"))
        .unwrap_or_else(|| frame_ticks(rate, f_timer).residual_s);
    if t_calc.is_nan() || t_calc < 0.0 || t_calc >= rate.half_frame_s() {
        return Err(CliError::Usage(format!(
            "--t-calc {t_calc} must be in [0, half frame period)"
        )));
    }
    if eps_frame.is_nan() || eps_frame < 0.0 {
        return Err(CliError::Usage("--eps-frame must be >= 0".into()));
    }

    let t_max = sync_budget(&SyncBudgetInput {
        t_calc_s: t_calc,
        eps_frame_s: eps_frame,
        rate,
        delta_ppm: ppm,
    });
    if t_max.is_infinite() {
        println!("t_max: unbounded");
    } else {
        println!("t_max: {t_max:.2} s");
    }
    Ok(())
}

#[derive(Args)]
pub struct EvaluateArgs {
    /// CSV of `ltc_time_s,reference_time_s` pairs.
    #[arg(long)]
    pairs: Option<PathBuf>,
    /// Frame rate: 24, 25, or 30.
    #[arg(long)]
    fps: Option<u32>,
    /// Output JSON report path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Display refresh period of the reference setup, seconds.
    #[arg(long = "t-disp")]
    t_disp: Option<f64>,
    /// Camera exposure time of the reference setup, seconds.
    #[arg(long = "t-exp")]
    t_exp: Option<f64>,
}

fn read_pairs(path: &Path) -> Result<Vec<(f64, f64)>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))?;
    let mut pairs = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut cols = line.split(',');
        let (Some(a), Some(b)) = (cols.next(), cols.next()) else {
            continue;
        };
        if let (Ok(a), Ok(b)) = (a.trim().parse::<f64>(), b.trim().parse::<f64>()) {
            pairs.push((a, b));
        }
    }
    if pairs.is_empty() {
        return Err(CliError::Usage(format!(
            "{} contains no (ltc_time_s, reference_time_s) pairs",
            path.display()
        )));
    }
    Ok(pairs)
}

pub fn run_evaluate(args: EvaluateArgs, config: &Config) -> Result<(), CliError> {
    let rate = parse_fps(require(args.fps, config.u32("fps"), "fps")?)?;
    let pairs_path = require(args.pairs, config.string("pairs").map(PathBuf::from), "pairs")?;
    let out = require(args.out, config.string("out").map(PathBuf::from), "out")?;
    let t_disp = args.t_disp.or(config.f64("t-disp")).unwrap_or(1.0 / 60.0);
    let t_exp = args.t_exp.or(config.f64("t-exp")).unwrap_or(1.0 / 60.0);

    let pairs = read_pairs(&pairs_path)?;
    let report = alignment_metrics(&pairs, rate);
    std::fs::write(&out, report.to_json())
        .map_err(|e| CliError::Io(format!("writing {}: {e}", out.display())))?;

    let sigma = rms_uncertainty(&EvalSetup {
        t_disp_s: t_disp,
        t_exp_s: t_exp,
    });
    println!(
        "n {} | mean {:.3} ms | mae {:.3} ms | std {:.3} ms | max {:.3} ms | fsm {:.3} ms (half frame {:.3} ms)",
        report.n,
        report.mean_s * 1e3,
        report.mae_s * 1e3,
        report.std_s * 1e3,
        report.max_ae_s * 1e3,
        report.fsm_s * 1e3,
        report.half_frame_s * 1e3
    );
    println!(
        "setup rms uncertainty reference: {:.2} ms (t_disp {:.4} s, t_exp {:.4} s)",
        sigma * 1e3,
        t_disp,
        t_exp
    );
    Ok(())
}
