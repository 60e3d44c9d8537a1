//! Pitch-track representation, CSV ingestion, and pitch-space conversion.
//!
//! A pitch track is a time-ordered list of fundamental-frequency samples.
//! Unvoiced samples (silence, or frames where the tracker found no f0) are
//! kept in the track because they break note continuity downstream.
//!
//! The CSV format is `time_sec,f0_hz` with one sample per row; a blank or
//! zero `f0_hz` field marks an unvoiced sample.

use std::io::{Read, Write};

use crate::error::{Error, Result};

/// Reference frequency for the pitch scale: A440.
pub const CONCERT_A_HZ: f64 = 440.0;
/// Pitch number assigned to A440.
pub const CONCERT_A_PITCH: f64 = 69.0;

/// One sample of a monophonic pitch track.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchSample {
    /// Time in seconds from the start of the recording.
    pub t: f64,
    /// Fundamental frequency in Hz; `None` for unvoiced samples.
    pub f0: Option<f64>,
}

impl PitchSample {
    pub fn voiced(t: f64, f0: f64) -> Self {
        PitchSample { t, f0: Some(f0) }
    }

    pub fn unvoiced(t: f64) -> Self {
        PitchSample { t, f0: None }
    }

    pub fn is_voiced(&self) -> bool {
        self.f0.is_some()
    }
}

/// A validated, time-ordered pitch track.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack {
    samples: Vec<PitchSample>,
    duration: f64,
}

impl PitchTrack {
    /// Builds a track, checking sample ordering and value sanity.
    pub fn new(samples: Vec<PitchSample>, duration: f64) -> Result<Self> {
        let mut prev_t: Option<f64> = None;
        for (i, s) in samples.iter().enumerate() {
            if !s.t.is_finite() || s.t < 0.0 {
                return Err(Error::invalid(format!(
                    "sample {i}: time must be finite and non-negative"
                )));
            }
            if let Some(p) = prev_t {
                if s.t <= p {
                    return Err(Error::invalid(format!(
                        "sample {i}: time {} not increasing (previous {p})",
                        s.t
                    )));
                }
            }
            if let Some(f0) = s.f0 {
                if !f0.is_finite() || f0 <= 0.0 {
                    return Err(Error::invalid(format!(
                        "sample {i}: f0 must be finite and positive"
                    )));
                }
            }
            prev_t = Some(s.t);
        }
        if let Some(last) = prev_t {
            if duration < last {
                return Err(Error::invalid(format!(
                    "duration {duration} precedes last sample at {last}"
                )));
            }
        }
        Ok(PitchTrack { samples, duration })
    }

    pub fn samples(&self) -> &[PitchSample] {
        &self.samples
    }

    pub fn duration(&self) -> f64 {
        self.duration
    }

    /// Iterator over `(t, f0)` for the voiced samples only.
    pub fn voiced(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.samples.iter().filter_map(|s| s.f0.map(|f| (s.t, f)))
    }

    pub fn n_voiced(&self) -> usize {
        self.samples.iter().filter(|s| s.is_voiced()).count()
    }
}

/// A frequency converted into pitch space.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PitchValue {
    /// Real-valued pitch, semitone units, A440 = 69.
    pub midi_real: f64,
    /// Nearest integer pitch (round half up).
    pub midi_int: i32,
}

/// Converts a fundamental frequency to pitch space: `p = 69 + 12*log2(f/440)`.
pub fn to_midi(f0: f64) -> Result<PitchValue> {
    if !f0.is_finite() || f0 <= 0.0 {
        return Err(Error::invalid(format!("f0 must be positive, got {f0}")));
    }
    let midi_real = CONCERT_A_PITCH + 12.0 * (f0 / CONCERT_A_HZ).log2();
    Ok(PitchValue {
        midi_real,
        midi_int: round_half_up(midi_real),
    })
}

fn round_half_up(x: f64) -> i32 {
    (x + 0.5).floor() as i32
}

/// Pitch series of a track plus its integer-pitch extremes.
#[derive(Debug, Clone, PartialEq)]
pub struct PitchProfile {
    /// `(t, midi_real)` per voiced sample, in time order.
    pub points: Vec<(f64, f64)>,
    pub min_midi: i32,
    pub max_midi: i32,
}

/// Converts every voiced sample to pitch space.
///
/// Errors when the track has no voiced samples.
pub fn pitch_profile(track: &PitchTrack) -> Result<PitchProfile> {
    let mut points = Vec::new();
    let mut min_midi = i32::MAX;
    let mut max_midi = i32::MIN;
    for (t, f0) in track.voiced() {
        let pv = to_midi(f0)?;
        min_midi = min_midi.min(pv.midi_int);
        max_midi = max_midi.max(pv.midi_int);
        points.push((t, pv.midi_real));
    }
    if points.is_empty() {
        return Err(Error::invalid("track has no voiced samples"));
    }
    Ok(PitchProfile {
        points,
        min_midi,
        max_midi,
    })
}

const TRACK_HEADER: [&str; 2] = ["time_sec", "f0_hz"];

/// Parses the pitch-track CSV format.
///
/// Header must be exactly `time_sec,f0_hz`. Times must be strictly
/// increasing; a blank or `0` f0 field marks an unvoiced sample. Errors are
/// reported with the 1-based line number of the offending row.
pub fn parse_track<R: Read>(reader: R) -> Result<PitchTrack> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);

    {
        let headers = rdr
            .headers()
            .map_err(|e| csv_error(&e, "unreadable header"))?;
        if headers.len() != 2 || &headers[0] != TRACK_HEADER[0] || &headers[1] != TRACK_HEADER[1] {
            return Err(Error::parse(
                1,
                format!(
                    "expected header 'time_sec,f0_hz', got '{}'",
                    headers.iter().collect::<Vec<_>>().join(",")
                ),
            ));
        }
    }

    let mut samples = Vec::new();
    let mut prev_t: Option<f64> = None;
    for record in rdr.records() {
        let record = record.map_err(|e| csv_error(&e, "malformed row"))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 2 {
            return Err(Error::parse(
                line,
                format!("expected 2 columns, got {}", record.len()),
            ));
        }
        let t: f64 = record[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("non-numeric time '{}'", &record[0])))?;
        if !t.is_finite() {
            return Err(Error::parse(line, "time must be finite"));
        }
        if let Some(p) = prev_t {
            if t <= p {
                return Err(Error::parse(
                    line,
                    format!("non-increasing time {t} (previous {p})"),
                ));
            }
        }
        prev_t = Some(t);
        let f0_field = &record[1];
        let f0 = if f0_field.is_empty() {
            None
        } else {
            let v: f64 = f0_field
                .parse()
                .map_err(|_| Error::parse(line, format!("non-numeric f0 '{f0_field}'")))?;
            if v == 0.0 {
                None
            } else if !v.is_finite() || v < 0.0 {
                return Err(Error::parse(line, format!("negative or non-finite f0 {v}")));
            } else {
                Some(v)
            }
        };
        samples.push(PitchSample { t, f0 });
    }
    let duration = prev_t.unwrap_or(0.0);
    PitchTrack::new(samples, duration)
}

fn csv_error(e: &csv::Error, what: &str) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::parse(line, format!("{what}: {e}"))
}

/// Writes a track back out in the pitch-track CSV format.
///
/// Times and frequencies are emitted with six decimal places; unvoiced
/// samples get an empty f0 field.
pub fn write_track<W: Write>(track: &PitchTrack, mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::invalid(format!("write failed: {e}"));
    writeln!(w, "time_sec,f0_hz").map_err(io)?;
    for s in track.samples() {
        match s.f0 {
            Some(f0) => writeln!(w, "{:.6},{:.6}", s.t, f0).map_err(io)?,
            None => writeln!(w, "{:.6},", s.t).map_err(io)?,
        }
    }
    Ok(())
}
