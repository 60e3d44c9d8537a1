//! Frequency tables over note events, segment and windowed counting, and
//! table comparison.

use std::collections::BTreeSet;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::notedetect::{NoteEvent, NoteLabel};

/// A half-open time segment `[start, end)` in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SegmentSpec {
    pub start: f64,
    pub end: f64,
}

impl SegmentSpec {
    pub fn new(start: f64, end: f64) -> Result<Self> {
        if !(start.is_finite() && end.is_finite() && start >= 0.0 && end > start) {
            return Err(Error::invalid(format!(
                "segment must satisfy end > start >= 0, got {start}:{end}"
            )));
        }
        Ok(SegmentSpec { start, end })
    }

    pub fn contains(&self, t: f64) -> bool {
        self.start <= t && t < self.end
    }

    /// Parses `start:end[,start:end...]`, e.g. `0:30,20:50,30:60`.
    pub fn parse_list(s: &str) -> Result<Vec<SegmentSpec>> {
        s.split(',').map(|part| part.parse()).collect()
    }
}

impl FromStr for SegmentSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let (a, b) = s
            .split_once(':')
            .ok_or_else(|| Error::invalid(format!("segment '{s}' must be start:end")))?;
        let start: f64 = a
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad segment start '{a}'")))?;
        let end: f64 = b
            .trim()
            .parse()
            .map_err(|_| Error::invalid(format!("bad segment end '{b}'")))?;
        SegmentSpec::new(start, end)
    }
}

/// Counts per note label, labels kept in scale order.
#[derive(Debug, Clone, PartialEq)]
pub struct FrequencyTable {
    labels: Vec<NoteLabel>,
    counts: Vec<u64>,
    total: u64,
}

impl FrequencyTable {
    pub fn new(labels: Vec<NoteLabel>, counts: Vec<u64>) -> Result<Self> {
        if labels.len() != counts.len() {
            return Err(Error::invalid(format!(
                "label/count length mismatch: {} vs {}",
                labels.len(),
                counts.len()
            )));
        }
        let total = counts.iter().sum();
        Ok(FrequencyTable {
            labels,
            counts,
            total,
        })
    }

    pub fn labels(&self) -> &[NoteLabel] {
        &self.labels
    }

    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn count_of(&self, label: NoteLabel) -> Option<u64> {
        self.labels
            .iter()
            .position(|&l| l == label)
            .map(|i| self.counts[i])
    }
}

/// Counts events per note, optionally restricted to a segment.
///
/// The label set is always taken from the full event list so segment
/// tables stay comparable with the whole-track table.
pub fn count_notes(events: &[NoteEvent], segment: Option<&SegmentSpec>) -> FrequencyTable {
    let labels: Vec<NoteLabel> = events
        .iter()
        .map(|e| e.label)
        .collect::<BTreeSet<_>>()
        .into_iter()
        .collect();
    let mut counts = vec![0u64; labels.len()];
    for e in events {
        if segment.is_none_or(|s| s.contains(e.onset)) {
            let idx = labels.binary_search(&e.label).unwrap();
            counts[idx] += 1;
        }
    }
    let total = counts.iter().sum();
    FrequencyTable {
        labels,
        counts,
        total,
    }
}

/// Relative frequencies `count_i / total`. Errors when the table is empty.
pub fn relative(table: &FrequencyTable) -> Result<Vec<f64>> {
    if table.total == 0 {
        return Err(Error::invalid(
            "relative frequencies undefined for an empty table",
        ));
    }
    Ok(table
        .counts
        .iter()
        .map(|&c| c as f64 / table.total as f64)
        .collect())
}

/// Expected counts under the overall relative frequencies: `rel_i * n`.
pub fn expected_counts(overall_rel: &[f64], n_segment: u64) -> Vec<f64> {
    overall_rel.iter().map(|r| r * n_segment as f64).collect()
}

/// Per-window counts for one note plus the less-than-type cumulative.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowedCounts {
    pub label: NoteLabel,
    pub window: f64,
    pub start: f64,
    pub counts: Vec<u64>,
    /// `cumulative[i]` = events with onset below the i-th window's upper limit.
    pub cumulative: Vec<u64>,
}

impl WindowedCounts {
    /// Upper limit of each window, `start + (i+1)*window`.
    pub fn upper_limits(&self) -> Vec<f64> {
        (1..=self.counts.len())
            .map(|i| self.start + i as f64 * self.window)
            .collect()
    }
}

/// Counts one note's events in consecutive windows covering `span`.
pub fn windowed_counts(
    events: &[NoteEvent],
    label: NoteLabel,
    window: f64,
    span: &SegmentSpec,
) -> Result<WindowedCounts> {
    if !(window.is_finite() && window > 0.0) {
        return Err(Error::invalid(format!(
            "window must be positive, got {window}"
        )));
    }
    let n_windows = ((span.end - span.start) / window).ceil() as usize;
    let mut counts = vec![0u64; n_windows];
    for e in events.iter().filter(|e| e.label == label) {
        if span.contains(e.onset) {
            let idx = ((e.onset - span.start) / window) as usize;
            counts[idx.min(n_windows - 1)] += 1;
        }
    }
    let mut cumulative = Vec::with_capacity(n_windows);
    let mut acc = 0u64;
    for &c in &counts {
        acc += c;
        cumulative.push(acc);
    }
    Ok(WindowedCounts {
        label,
        window,
        start: span.start,
        counts,
        cumulative,
    })
}

/// Per-label relative-frequency differences between two tables.
#[derive(Debug, Clone, PartialEq)]
pub struct TableComparison {
    pub labels: Vec<NoteLabel>,
    /// `rel_a(i) - rel_b(i)` per label.
    pub deltas: Vec<f64>,
    /// Total-variation distance, half the L1 distance of the two
    /// relative-frequency vectors.
    pub tvd: f64,
    /// Paired raw counts `(count_a, count_b)` per label.
    pub pairs: Vec<(u64, u64)>,
}

/// Compares two tables over the same label set.
pub fn compare_tables(a: &FrequencyTable, b: &FrequencyTable) -> Result<TableComparison> {
    if a.labels != b.labels {
        return Err(Error::invalid(
            "compare_tables requires identical label sets",
        ));
    }
    let ra = relative(a)?;
    let rb = relative(b)?;
    let deltas: Vec<f64> = ra.iter().zip(&rb).map(|(x, y)| x - y).collect();
    let tvd = 0.5 * deltas.iter().map(|d| d.abs()).sum::<f64>();
    let pairs = a
        .counts
        .iter()
        .copied()
        .zip(b.counts.iter().copied())
        .collect();
    Ok(TableComparison {
        labels: a.labels.clone(),
        deltas,
        tvd,
        pairs,
    })
}
