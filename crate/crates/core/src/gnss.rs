//! GNSS receiver stand-in: NMEA 0183 time sentences and timepulse schedules.
//!
//! The real device reads absolute UTC over UART and receives a hardware
//! timepulse marking the start of each UTC second. Here both are modeled:
//! [`parse_nmea`] understands the RMC and ZDA sentences (the minimal set
//! carrying full date + time), and [`timepulse_schedule`] produces the pulse
//! instants, optionally with seeded Gaussian jitter.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use thiserror::Error;

const NS_PER_SEC: f64 = 1e9;

/// Jitter samples are clamped here so schedules stay strictly increasing.
const JITTER_CLAMP_NS: f64 = 0.45e9;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NmeaError {
    #[error("checksum mismatch: sentence states {stated:02X}, computed {computed:02X}")]
    ChecksumMismatch { stated: u8, computed: u8 },
    #[error("unsupported sentence `{0}`")]
    UnsupportedSentence(String),
    #[error("malformed field: {0}")]
    MalformedField(String),
}

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid UTC instant: {0}")]
pub struct InvalidInstant(pub &'static str);

/// A calendar-valid UTC date and time with nanosecond subseconds.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct UtcInstant {
    year: i32,
    month: u8,
    day: u8,
    hours: u8,
    minutes: u8,
    seconds: u8,
    subsec_nanos: u32,
    valid: bool,
}

impl UtcInstant {
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        year: i32,
        month: u8,
        day: u8,
        hours: u8,
        minutes: u8,
        seconds: u8,
        subsec_nanos: u32,
        valid: bool,
    ) -> Result<Self, InvalidInstant> {
        if !(1..=12).contains(&month) {
            return Err(InvalidInstant("month"));
        }
        if day < 1 || day > days_in_month(year, month) {
            return Err(InvalidInstant("day"));
        }
        if hours > 23 {
            return Err(InvalidInstant("hours"));
        }
        if minutes > 59 {
            return Err(InvalidInstant("minutes"));
        }
        if seconds > 59 {
            return Err(InvalidInstant("seconds"));
        }
        if subsec_nanos >= 1_000_000_000 {
            return Err(InvalidInstant("subseconds"));
        }
        Ok(Self {
            year,
            month,
            day,
            hours,
            minutes,
            seconds,
            subsec_nanos,
            valid,
        })
    }

    /// Builds an instant from a Unix timestamp (seconds since 1970-01-01, UTC).
    pub fn from_unix(secs: i64, subsec_nanos: u32) -> Self {
        let days = secs.div_euclid(86_400);
        let sod = secs.rem_euclid(86_400);
        let (year, month, day) = civil_from_days(days);
        Self {
            year,
            month,
            day,
            hours: (sod / 3600) as u8,
            minutes: (sod / 60 % 60) as u8,
            seconds: (sod % 60) as u8,
            subsec_nanos: subsec_nanos % 1_000_000_000,
            valid: true,
        }
    }

    pub fn year(&self) -> i32 {
        self.year
    }
    pub fn month(&self) -> u8 {
        self.month
    }
    pub fn day(&self) -> u8 {
        self.day
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
    pub fn subsec_nanos(&self) -> u32 {
        self.subsec_nanos
    }
    /// Fix validity as reported by the receiver (RMC status field).
    pub fn is_valid(&self) -> bool {
        self.valid
    }

    pub fn seconds_of_day(&self) -> u32 {
        u32::from(self.hours) * 3600 + u32::from(self.minutes) * 60 + u32::from(self.seconds)
    }
}

fn is_leap_year(year: i32) -> bool {
    (year % 4 == 0 && year % 100 != 0) || year % 400 == 0
}

fn days_in_month(year: i32, month: u8) -> u8 {
    match month {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        2 if is_leap_year(year) => 29,
        2 => 28,
        _ => 0,
    }
}

// Door-number arithmetic for days-since-epoch -> (y, m, d), valid for any
// reasonable date. See Howard Hinnant's civil calendar algorithms.
fn civil_from_days(z: i64) -> (i32, u8, u8) {
    let z = z + 719_468;
    let era = if z >= 0 { z } else { z - 146_096 } / 146_097;
    let doe = (z - era * 146_097) as u64;
    let yoe = (doe - doe / 1460 + doe / 36_524 - doe / 146_096) / 365;
    let y = yoe as i64 + era * 400;
    let doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    let mp = (5 * doy + 2) / 153;
    let d = (doy - (153 * mp + 2) / 5 + 1) as u8;
    let m = if mp < 10 { mp + 3 } else { mp - 9 } as u8;
    let y = if m <= 2 { y + 1 } else { y };
    (y as i32, m, d)
}

/// XOR of all payload bytes between `$` and `*`.
pub fn nmea_checksum(payload: &str) -> u8 {
    payload.bytes().fold(0, |acc, b| acc ^ b)
}

/// Parses one NMEA 0183 sentence (`$...*hh`, optionally CRLF-terminated)
/// into a UTC instant. Only RMC and ZDA are understood; the checksum is
/// verified before any field is interpreted.
pub fn parse_nmea(line: &str) -> Result<UtcInstant, NmeaError> {
    let s = line.trim_end_matches(['\r', '\n']);
    let body = s
        .strip_prefix('$')
        .ok_or_else(|| NmeaError::MalformedField("missing leading `$`".into()))?;
    let (payload, stated_hex) = body
        .split_once('*')
        .ok_or_else(|| NmeaError::MalformedField("missing `*hh` checksum".into()))?;
    if stated_hex.len() != 2 {
        return Err(NmeaError::MalformedField("checksum must be two hex digits".into()));
    }
    let stated = u8::from_str_radix(stated_hex, 16)
        .map_err(|_| NmeaError::MalformedField("checksum not hexadecimal".into()))?;
    let computed = nmea_checksum(payload);
    if stated != computed {
        return Err(NmeaError::ChecksumMismatch { stated, computed });
    }

    let fields: Vec<&str> = payload.split(',').collect();
    let id = fields[0];
    if id.len() < 5 {
        return Err(NmeaError::UnsupportedSentence(id.to_string()));
    }
    match &id[id.len() - 3..] {
        "RMC" => parse_rmc(&fields),
        "ZDA" => parse_zda(&fields),
        _ => Err(NmeaError::UnsupportedSentence(id.to_string())),
    }
}

fn parse_rmc(fields: &[&str]) -> Result<UtcInstant, NmeaError> {
    if fields.len() < 10 {
        return Err(NmeaError::MalformedField(format!(
            "RMC needs at least 10 fields, got {}",
            fields.len()
        )));
    }
    let (h, m, s, ns) = parse_hms(fields[1])?;
    let valid = fields[2] == "A";
    let date = fields[9];
    if date.len() != 6 || !date.bytes().all(|b| b.is_ascii_digit()) {
        return Err(NmeaError::MalformedField(format!("RMC date `{date}`")));
    }
    let day: u8 = date[0..2].parse().unwrap();
    let month: u8 = date[2..4].parse().unwrap();
    let year: i32 = 2000 + date[4..6].parse::<i32>().unwrap();
    UtcInstant::new(year, month, day, h, m, s, ns, valid)
        .map_err(|e| NmeaError::MalformedField(e.to_string()))
}

fn parse_zda(fields: &[&str]) -> Result<UtcInstant, NmeaError> {
    if fields.len() < 5 {
        return Err(NmeaError::MalformedField(format!(
            "ZDA needs at least 5 fields, got {}",
            fields.len()
        )));
    }
    let (h, m, s, ns) = parse_hms(fields[1])?;
    let day: u8 = parse_num(fields[2], "ZDA day")?;
    let month: u8 = parse_num(fields[3], "ZDA month")?;
    let year: i32 = parse_num(fields[4], "ZDA year")?;
    UtcInstant::new(year, month, day, h, m, s, ns, true)
        .map_err(|e| NmeaError::MalformedField(e.to_string()))
}

fn parse_num<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, NmeaError> {
    s.parse()
        .map_err(|_| NmeaError::MalformedField(format!("{what} `{s}`")))
}

/// `HHMMSS[.fff]` -> (h, m, s, nanos).
fn parse_hms(s: &str) -> Result<(u8, u8, u8, u32), NmeaError> {
    let (int, frac) = match s.split_once('.') {
        Some((i, f)) => (i, f),
        None => (s, ""),
    };
    if int.len() != 6 || !int.bytes().all(|b| b.is_ascii_digit()) {
        return Err(NmeaError::MalformedField(format!("time `{s}`")));
    }
    if !frac.bytes().all(|b| b.is_ascii_digit()) {
        return Err(NmeaError::MalformedField(format!("time fraction `{s}`")));
    }
    let h: u8 = int[0..2].parse().unwrap();
    let m: u8 = int[2..4].parse().unwrap();
    let sec: u8 = int[4..6].parse().unwrap();
    let mut nanos: u32 = 0;
    let mut scale = 100_000_000;
    for b in frac.bytes().take(9) {
        nanos += u32::from(b - b'0') * scale;
        scale /= 10;
    }
    Ok((h, m, sec, nanos))
}

/// Formats a ZDA sentence (`$GPZDA,hhmmss.sss,dd,mm,yyyy,00,00*hh`) for `utc`.
pub fn encode_zda(utc: &UtcInstant) -> String {
    let payload = format!(
        "GPZDA,{:02}{:02}{:02}.{:03},{:02},{:02},{:04},00,00",
        utc.hours(),
        utc.minutes(),
        utc.seconds(),
        utc.subsec_nanos() / 1_000_000,
        utc.day(),
        utc.month(),
        utc.year()
    );
    format!("${}*{:02X}\r\n", payload, nmea_checksum(&payload))
}

/// Formats a minimal RMC sentence for `utc` (position fields left empty).
pub fn encode_rmc(utc: &UtcInstant) -> String {
    let payload = format!(
        "GPRMC,{:02}{:02}{:02}.{:03},{},,,,,,,{:02}{:02}{:02},,,A",
        utc.hours(),
        utc.minutes(),
        utc.seconds(),
        utc.subsec_nanos() / 1_000_000,
        if utc.is_valid() { "A" } else { "V" },
        utc.day(),
        utc.month(),
        utc.year().rem_euclid(100)
    );
    format!("${}*{:02X}\r\n", payload, nmea_checksum(&payload))
}

/// Timepulse instants in true-time nanoseconds, nominally one per second.
#[derive(Debug, Clone)]
pub struct TimepulseSchedule {
    pub start: UtcInstant,
    pub instants_ns: Vec<f64>,
    pub jitter_rms_ns: f64,
}

/// Generates `count` pulse instants at consecutive second boundaries starting
/// from `start`'s second, plus seeded Gaussian jitter. Deterministic per seed.
///
/// `jitter_rms_ns` must stay below 0.4 s so the schedule remains strictly
/// increasing (individual samples are additionally clamped to ±0.45 s).
pub fn timepulse_schedule(
    start: &UtcInstant,
    count: usize,
    jitter_rms_ns: f64,
    seed: u64,
) -> TimepulseSchedule {
    assert!(count >= 1, "timepulse schedule needs count >= 1");
    assert!(
        (0.0..0.4e9).contains(&jitter_rms_ns),
        "jitter_rms_ns must be in [0, 0.4e9)"
    );
    let instants_ns = if jitter_rms_ns == 0.0 {
        (0..count).map(|k| k as f64 * NS_PER_SEC).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let dist = Normal::new(0.0, jitter_rms_ns).expect("finite rms");
        (0..count)
            .map(|k| {
                let j = dist.sample(&mut rng).clamp(-JITTER_CLAMP_NS, JITTER_CLAMP_NS);
                k as f64 * NS_PER_SEC + j
            })
            .collect()
    };
    TimepulseSchedule {
        start: *start,
        instants_ns,
        jitter_rms_ns,
    }
}
