//! Note calibration database, Chebyshev confidence bands, and note-event
//! detection over a pitch track.
//!
//! Each note is calibrated by the mean and standard deviation of its
//! fundamental frequency. Chebyshev's inequality guarantees that the
//! frequency lies inside `mean ± k*sd` with probability at least
//! `1 - 1/k^2` regardless of the underlying distribution, so with the
//! default `k = 6` a band captures a note with probability >= 35/36.
//! A frequency sample is attributed to the unique note whose band contains
//! it; stretches of same-note samples that last long enough become note
//! events, shorter stretches are treated as glides.

use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pitchdata::PitchTrack;

/// The twelve chromatic swar names of one octave.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SwarName {
    #[serde(rename = "Sa")]
    Sa,
    #[serde(rename = "Komal Re")]
    KomalRe,
    #[serde(rename = "Sudh Re")]
    SudhRe,
    #[serde(rename = "Komal Ga")]
    KomalGa,
    #[serde(rename = "Sudh Ga")]
    SudhGa,
    #[serde(rename = "Sudh Ma")]
    SudhMa,
    #[serde(rename = "Tibra Ma")]
    TibraMa,
    #[serde(rename = "Pa")]
    Pa,
    #[serde(rename = "Komal Dha")]
    KomalDha,
    #[serde(rename = "Sudh Dha")]
    SudhDha,
    #[serde(rename = "Komal Ni")]
    KomalNi,
    #[serde(rename = "Sudh Ni")]
    SudhNi,
}

impl SwarName {
    pub const ALL: [SwarName; 12] = [
        SwarName::Sa,
        SwarName::KomalRe,
        SwarName::SudhRe,
        SwarName::KomalGa,
        SwarName::SudhGa,
        SwarName::SudhMa,
        SwarName::TibraMa,
        SwarName::Pa,
        SwarName::KomalDha,
        SwarName::SudhDha,
        SwarName::KomalNi,
        SwarName::SudhNi,
    ];

    /// Position within the octave, 0 = Sa .. 11 = Sudh Ni.
    pub fn chroma(self) -> u8 {
        SwarName::ALL.iter().position(|&n| n == self).unwrap() as u8
    }

    pub fn as_str(self) -> &'static str {
        match self {
            SwarName::Sa => "Sa",
            SwarName::KomalRe => "Komal Re",
            SwarName::SudhRe => "Sudh Re",
            SwarName::KomalGa => "Komal Ga",
            SwarName::SudhGa => "Sudh Ga",
            SwarName::SudhMa => "Sudh Ma",
            SwarName::TibraMa => "Tibra Ma",
            SwarName::Pa => "Pa",
            SwarName::KomalDha => "Komal Dha",
            SwarName::SudhDha => "Sudh Dha",
            SwarName::KomalNi => "Komal Ni",
            SwarName::SudhNi => "Sudh Ni",
        }
    }
}

impl fmt::Display for SwarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SwarName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SwarName::ALL
            .iter()
            .copied()
            .find(|n| n.as_str() == s)
            .ok_or_else(|| Error::invalid(format!("unknown note name '{s}'")))
    }
}

/// A note identity: swar name plus octave (-1 lower, 0 middle, +1 upper).
///
/// Ordering follows scale order: octave first, then chroma.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct NoteLabel {
    pub name: SwarName,
    pub octave: i8,
}

impl NoteLabel {
    pub fn new(name: SwarName, octave: i8) -> Self {
        NoteLabel { name, octave }
    }

    pub fn middle(name: SwarName) -> Self {
        NoteLabel { name, octave: 0 }
    }
}

impl PartialOrd for NoteLabel {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for NoteLabel {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (self.octave, self.name.chroma()).cmp(&(other.octave, other.name.chroma()))
    }
}

impl fmt::Display for NoteLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.octave {
            0 => write!(f, "{}", self.name),
            o if o > 0 => write!(f, "{}(+{o})", self.name),
            o => write!(f, "{}({o})", self.name),
        }
    }
}

impl FromStr for NoteLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if let Some(open) = s.find('(') {
            let name = s[..open].trim().parse()?;
            let inner = s[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::invalid(format!("malformed note label '{s}'")))?;
            let octave: i8 = inner
                .parse()
                .map_err(|_| Error::invalid(format!("malformed octave in '{s}'")))?;
            Ok(NoteLabel { name, octave })
        } else {
            Ok(NoteLabel::middle(s.trim().parse()?))
        }
    }
}

impl Serialize for NoteLabel {
    fn serialize<S: serde::Serializer>(
        &self,
        serializer: S,
    ) -> std::result::Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for NoteLabel {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Calibration of one note in one octave.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoteSpec {
    pub name: SwarName,
    pub octave: i8,
    pub mean_hz: f64,
    pub sd_hz: f64,
}

impl NoteSpec {
    pub fn new(name: SwarName, octave: i8, mean_hz: f64, sd_hz: f64) -> Result<Self> {
        if !(-1..=1).contains(&octave) {
            return Err(Error::validation(format!(
                "octave must be -1, 0 or +1, got {octave}"
            )));
        }
        if !(mean_hz.is_finite() && mean_hz > 0.0) {
            return Err(Error::validation(format!(
                "{name}: mean_hz must be positive"
            )));
        }
        if !(sd_hz.is_finite() && sd_hz >= 0.0) {
            return Err(Error::validation(format!(
                "{name}: sd_hz must be non-negative"
            )));
        }
        Ok(NoteSpec {
            name,
            octave,
            mean_hz,
            sd_hz,
        })
    }

    pub fn label(&self) -> NoteLabel {
        NoteLabel {
            name: self.name,
            octave: self.octave,
        }
    }
}

/// Chebyshev confidence band `[mean - k*sd, mean + k*sd]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChebyshevBand {
    pub lo: f64,
    pub hi: f64,
    /// Lower bound on the probability of the band, `1 - 1/k^2`.
    pub min_prob: f64,
}

impl ChebyshevBand {
    pub fn contains(&self, f0: f64) -> bool {
        self.lo <= f0 && f0 <= self.hi
    }
}

/// Builds the Chebyshev band of a note for sigma multiplier `k`.
pub fn band(spec: &NoteSpec, k: f64) -> Result<ChebyshevBand> {
    if !(k.is_finite() && k > 0.0) {
        return Err(Error::invalid(format!("k must be positive, got {k}")));
    }
    Ok(ChebyshevBand {
        lo: spec.mean_hz - k * spec.sd_hz,
        hi: spec.mean_hz + k * spec.sd_hz,
        min_prob: 1.0 - 1.0 / (k * k),
    })
}

/// Expands middle-octave specs to all three octaves.
///
/// Lower-octave means are halved, upper-octave means doubled; standard
/// deviations carry over unchanged (they are nearly equal across octaves).
pub fn expand_octaves(middle: &[NoteSpec]) -> Result<Vec<NoteSpec>> {
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::with_capacity(middle.len() * 3);
    for spec in middle {
        if spec.octave != 0 {
            return Err(Error::validation(format!(
                "expand_octaves expects middle-octave specs only, got {} octave {}",
                spec.name, spec.octave
            )));
        }
        if !seen.insert(spec.name) {
            return Err(Error::validation(format!(
                "duplicate note name {}",
                spec.name
            )));
        }
        out.push(NoteSpec {
            octave: -1,
            mean_hz: spec.mean_hz / 2.0,
            ..*spec
        });
        out.push(*spec);
        out.push(NoteSpec {
            octave: 1,
            mean_hz: spec.mean_hz * 2.0,
            ..*spec
        });
    }
    Ok(out)
}

/// A validated note database: specs with pairwise-disjoint bands at its `k`.
#[derive(Debug, Clone)]
pub struct NoteDatabase {
    /// Specs sorted by band lower edge.
    specs: Vec<NoteSpec>,
    bands: Vec<ChebyshevBand>,
    k: f64,
}

pub const DEFAULT_K: f64 = 6.0;

const BUNDLED_MIDDLE_OCTAVE: &str = include_str!("../data/middle_octave.csv");

impl NoteDatabase {
    /// Builds and validates a database from explicit specs.
    ///
    /// Fails when two specs share a `(name, octave)` identity or when any
    /// two bands overlap at this `k`.
    pub fn new(specs: Vec<NoteSpec>, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::validation(format!("k must be positive, got {k}")));
        }
        let mut pairs: Vec<(NoteSpec, ChebyshevBand)> = Vec::with_capacity(specs.len());
        for spec in specs {
            pairs.push((spec, band(&spec, k)?));
        }
        pairs.sort_by(|a, b| a.1.lo.partial_cmp(&b.1.lo).unwrap());
        for w in pairs.windows(2) {
            let (a, ba) = &w[0];
            let (b, bb) = &w[1];
            if a.label() == b.label() {
                return Err(Error::validation(format!(
                    "duplicate database entry for {}",
                    a.label()
                )));
            }
            if bb.lo <= ba.hi {
                return Err(Error::validation(format!(
                    "bands overlap at k={k}: {} [{:.4}, {:.4}] and {} [{:.4}, {:.4}]",
                    a.label(),
                    ba.lo,
                    ba.hi,
                    b.label(),
                    bb.lo,
                    bb.hi
                )));
            }
        }
        // labels can collide even when bands don't touch in sorted order
        let mut labels: Vec<NoteLabel> = pairs.iter().map(|(s, _)| s.label()).collect();
        labels.sort();
        for w in labels.windows(2) {
            if w[0] == w[1] {
                return Err(Error::validation(format!(
                    "duplicate database entry for {}",
                    w[0]
                )));
            }
        }
        let (specs, bands) = pairs.into_iter().unzip();
        Ok(NoteDatabase { specs, bands, k })
    }

    /// Builds a three-octave database from middle-octave specs.
    pub fn from_middle_octave(middle: &[NoteSpec], k: f64) -> Result<Self> {
        NoteDatabase::new(expand_octaves(middle)?, k)
    }

    /// The built-in middle-octave calibration, expanded to three octaves.
    pub fn bundled(k: f64) -> Result<Self> {
        let specs = parse_note_specs(BUNDLED_MIDDLE_OCTAVE.as_bytes())?;
        NoteDatabase::from_middle_octave(&specs, k)
    }

    /// Loads a database from note-database CSV.
    ///
    /// A file containing only middle-octave rows is expanded to all three
    /// octaves; a file with explicit octave rows is used as-is.
    pub fn load_csv<R: Read>(reader: R, k: f64) -> Result<Self> {
        let specs = parse_note_specs(reader)?;
        if !specs.is_empty() && specs.iter().all(|s| s.octave == 0) {
            NoteDatabase::from_middle_octave(&specs, k)
        } else {
            NoteDatabase::new(specs, k)
        }
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    pub fn specs(&self) -> &[NoteSpec] {
        &self.specs
    }

    pub fn bands(&self) -> &[ChebyshevBand] {
        &self.bands
    }

    pub fn spec_of(&self, label: NoteLabel) -> Option<&NoteSpec> {
        self.specs.iter().find(|s| s.label() == label)
    }

    /// Returns the unique spec whose band contains `f0`, if any.
    pub fn classify(&self, f0: f64) -> Option<&NoteSpec> {
        // bands are sorted and disjoint: binary search on the lower edge
        let idx = self.bands.partition_point(|b| b.lo <= f0);
        if idx == 0 {
            return None;
        }
        let i = idx - 1;
        self.bands[i].contains(f0).then(|| &self.specs[i])
    }
}

/// Classifies one frequency sample against the database.
pub fn classify_sample(f0: f64, db: &NoteDatabase) -> Option<&NoteSpec> {
    db.classify(f0)
}

const NOTEDB_HEADER: [&str; 4] = ["note", "octave", "mean_hz", "sd_hz"];

/// Parses note-database CSV rows into specs.
pub fn parse_note_specs<R: Read>(reader: R) -> Result<Vec<NoteSpec>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    {
        let headers = rdr.headers().map_err(|e| csv_parse_error(&e))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != NOTEDB_HEADER {
            return Err(Error::parse(
                1,
                format!(
                    "expected header 'note,octave,mean_hz,sd_hz', got '{}'",
                    got.join(",")
                ),
            ));
        }
    }
    let mut specs = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_parse_error(&e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 4 {
            return Err(Error::parse(
                line,
                format!("expected 4 columns, got {}", record.len()),
            ));
        }
        let name: SwarName = record[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("unknown note name '{}'", &record[0])))?;
        let octave: i8 = record[1]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad octave '{}'", &record[1])))?;
        let mean_hz: f64 = record[2]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad mean_hz '{}'", &record[2])))?;
        let sd_hz: f64 = record[3]
            .parse()
            .map_err(|_| Error::parse(line, format!("bad sd_hz '{}'", &record[3])))?;
        specs.push(NoteSpec::new(name, octave, mean_hz, sd_hz)?);
    }
    Ok(specs)
}

fn csv_parse_error(e: &csv::Error) -> Error {
    let line = e.position().map(|p| p.line() as usize).unwrap_or(0);
    Error::parse(line, format!("malformed row: {e}"))
}

/// A detected stay on one note.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoteEvent {
    pub label: NoteLabel,
    /// Time of the first sample of the run, seconds.
    pub onset: f64,
    /// Time of the last sample of the run, seconds.
    pub offset: f64,
    pub n_samples: usize,
}

impl NoteEvent {
    pub fn duration(&self) -> f64 {
        self.offset - self.onset
    }
}

/// Detection output: events plus a tally of what was excluded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Detection {
    pub events: Vec<NoteEvent>,
    /// Voiced samples outside every note band (glide material).
    pub out_of_band_samples: usize,
    /// Voiced in-band samples whose run was shorter than the dwell.
    pub short_run_samples: usize,
    pub unvoiced_samples: usize,
}

/// Segments a track into note events.
///
/// A maximal run of consecutive voiced samples classified to the same note
/// becomes an event when it spans at least `min_dwell` seconds. Unvoiced
/// and out-of-band samples terminate a run; shorter runs count as glides.
pub fn detect_events(track: &PitchTrack, db: &NoteDatabase, min_dwell: f64) -> Result<Detection> {
    if !(min_dwell.is_finite() && min_dwell > 0.0) {
        return Err(Error::invalid(format!(
            "min_dwell must be positive, got {min_dwell}"
        )));
    }
    let mut det = Detection::default();
    // current run: (label, onset, last sample time, sample count)
    let mut run: Option<(NoteLabel, f64, f64, usize)> = None;

    let flush = |run: &mut Option<(NoteLabel, f64, f64, usize)>, det: &mut Detection| {
        if let Some((label, onset, offset, n)) = run.take() {
            if offset - onset >= min_dwell {
                det.events.push(NoteEvent {
                    label,
                    onset,
                    offset,
                    n_samples: n,
                });
            } else {
                det.short_run_samples += n;
            }
        }
    };

    for sample in track.samples() {
        match sample.f0 {
            None => {
                flush(&mut run, &mut det);
                det.unvoiced_samples += 1;
            }
            Some(f0) => match db.classify(f0) {
                None => {
                    flush(&mut run, &mut det);
                    det.out_of_band_samples += 1;
                }
                Some(spec) => {
                    let label = spec.label();
                    match &mut run {
                        Some((cur, _, offset, n)) if *cur == label => {
                            *offset = sample.t;
                            *n += 1;
                        }
                        _ => {
                            flush(&mut run, &mut det);
                            run = Some((label, sample.t, sample.t, 1));
                        }
                    }
                }
            },
        }
    }
    flush(&mut run, &mut det);
    Ok(det)
}

/// Ordinary least-squares line fit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

/// Long stays plus the linear fit of their onsets against rank.
#[derive(Debug, Clone, PartialEq)]
pub struct LongStayReport {
    pub stays: Vec<NoteEvent>,
    /// Absent when fewer than two long stays exist.
    pub fit: Option<LineFit>,
}

/// Filters events lasting at least `min_long` seconds and fits onset
/// against rank 1..m by ordinary least squares.
pub fn long_stays(events: &[NoteEvent], min_long: f64) -> Result<LongStayReport> {
    if !(min_long.is_finite() && min_long > 0.0) {
        return Err(Error::invalid(format!(
            "min_long must be positive, got {min_long}"
        )));
    }
    let stays: Vec<NoteEvent> = events
        .iter()
        .copied()
        .filter(|e| e.duration() >= min_long)
        .collect();
    let fit = fit_onsets(&stays.iter().map(|e| e.onset).collect::<Vec<_>>());
    Ok(LongStayReport { stays, fit })
}

/// OLS of values against their 1-based rank. `None` for fewer than 2 points.
pub fn fit_onsets(onsets: &[f64]) -> Option<LineFit> {
    let m = onsets.len();
    if m < 2 {
        return None;
    }
    let xs: Vec<f64> = (1..=m).map(|i| i as f64).collect();
    let mx = xs.iter().sum::<f64>() / m as f64;
    let my = onsets.iter().sum::<f64>() / m as f64;
    let sxy: f64 = xs
        .iter()
        .zip(onsets)
        .map(|(x, y)| (x - mx) * (y - my))
        .sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(onsets)
        .map(|(x, y)| {
            let r = y - (slope * x + intercept);
            r * r
        })
        .sum();
    let ss_tot: f64 = onsets.iter().map(|y| (y - my) * (y - my)).sum();
    let r2 = if ss_tot == 0.0 {
        if ss_res <= 1e-12 {
            1.0
        } else {
            0.0
        }
    } else {
        1.0 - ss_res / ss_tot
    };
    Some(LineFit {
        slope,
        intercept,
        r2,
    })
}

const EVENTS_HEADER: [&str; 5] = ["note", "octave", "onset_sec", "offset_sec", "n_samples"];

/// Writes events in the events CSV format.
pub fn write_events<W: Write>(events: &[NoteEvent], mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::invalid(format!("write failed: {e}"));
    writeln!(w, "note,octave,onset_sec,offset_sec,n_samples").map_err(io)?;
    for e in events {
        writeln!(
            w,
            "{},{},{:.6},{:.6},{}",
            e.label.name, e.label.octave, e.onset, e.offset, e.n_samples
        )
        .map_err(io)?;
    }
    Ok(())
}

/// Parses the events CSV format, checking time order and non-overlap.
pub fn parse_events<R: Read>(reader: R) -> Result<Vec<NoteEvent>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    {
        let headers = rdr.headers().map_err(|e| csv_parse_error(&e))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != EVENTS_HEADER {
            return Err(Error::parse(
                1,
                format!(
                    "expected header 'note,octave,onset_sec,offset_sec,n_samples', got '{}'",
                    got.join(",")
                ),
            ));
        }
    }
    let mut events: Vec<NoteEvent> = Vec::new();
    for record in rdr.records() {
        let record = record.map_err(|e| csv_parse_error(&e))?;
        let line = record.position().map(|p| p.line() as usize).unwrap_or(0);
        if record.len() != 5 {
            return Err(Error::parse(
                line,
                format!("expected 5 columns, got {}", record.len()),
            ));
        }
        let name: SwarName = record[0]
            .parse()
            .map_err(|_| Error::parse(line, format!("unknown note name '{}'", &record[0])))?;
        let octave: i8 = record[1]
            .parse()
            .map_err(|_| Error::parse(line, "bad octave"))?;
        let onset: f64 = record[2]
            .parse()
            .map_err(|_| Error::parse(line, "bad onset_sec"))?;
        let offset: f64 = record[3]
            .parse()
            .map_err(|_| Error::parse(line, "bad offset_sec"))?;
        let n_samples: usize = record[4]
            .parse()
            .map_err(|_| Error::parse(line, "bad n_samples"))?;
        if offset <= onset {
            return Err(Error::parse(
                line,
                format!("offset {offset} must exceed onset {onset}"),
            ));
        }
        if let Some(prev) = events.last() {
            if onset < prev.offset {
                return Err(Error::parse(
                    line,
                    format!("event at {onset} overlaps previous ending {}", prev.offset),
                ));
            }
        }
        events.push(NoteEvent {
            label: NoteLabel::new(name, octave),
            onset,
            offset,
            n_samples,
        });
    }
    Ok(events)
}
