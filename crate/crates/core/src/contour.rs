//! Pitch-contour segmentation and ornament classification.
//!
//! Between stays on notes, a performance moves through transitory pitch
//! figures: rising and falling transitions (convex, concave or linear in
//! shape), mixed movements, and hat/valley figures that leave and return
//! to the starting pitch. All geometry is computed in semitone space so
//! octave position does not bias shapes or extents.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::notedetect::{detect_events, NoteDatabase, NoteEvent};
use crate::pitchdata::{to_midi, PitchTrack};

/// Thresholds controlling contour classification, all in semitone or
/// normalized units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContourParams {
    /// Minimum pitch excursion that counts as a direction change.
    pub reversal_threshold: f64,
    /// Maximum |end - start| for a span to count as a hat or valley.
    pub return_tolerance: f64,
    /// Normalized curve-vs-chord area below which a transition is Linear.
    pub linear_tolerance: f64,
    /// Half-width of the Symmetric zone for hat/valley skew.
    pub skew_tolerance: f64,
    /// Extent below this is Low/Shallow.
    pub mag_lo: f64,
    /// Extent above this is High/Deep.
    pub mag_hi: f64,
    /// Coefficient-of-variation ceiling for calling onsets rhythmic.
    pub cv_threshold: f64,
}

impl Default for ContourParams {
    fn default() -> Self {
        ContourParams {
            reversal_threshold: 0.5,
            return_tolerance: 0.5,
            linear_tolerance: 0.05,
            skew_tolerance: 0.1,
            mag_lo: 1.0,
            mag_hi: 3.0,
            cv_threshold: 0.3,
        }
    }
}

impl ContourParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("reversal_threshold", self.reversal_threshold),
            ("return_tolerance", self.return_tolerance),
            ("linear_tolerance", self.linear_tolerance),
            ("skew_tolerance", self.skew_tolerance),
            ("mag_lo", self.mag_lo),
            ("mag_hi", self.mag_hi),
            ("cv_threshold", self.cv_threshold),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!(
                    "contour parameter {name} must be positive, got {v}"
                )));
            }
        }
        if self.mag_hi < self.mag_lo {
            return Err(Error::invalid("mag_hi must be >= mag_lo"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ContourKind {
    Stay,
    Rising,
    Falling,
    Mixed,
    Hat,
    Valley,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ShapeClass {
    Convex,
    Concave,
    Linear,
    NotApplicable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum SkewClass {
    Positive,
    Negative,
    Symmetric,
    NotApplicable,
}

/// For valleys read Low/Moderate/High as Shallow/Moderate/Deep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum MagnitudeClass {
    Low,
    Moderate,
    High,
    NotApplicable,
}

/// One classified span of the track.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContourSegment {
    pub kind: ContourKind,
    pub t0: f64,
    pub t1: f64,
    /// Only for Rising/Falling.
    pub shape: ShapeClass,
    /// Only for Hat/Valley.
    pub skew: SkewClass,
    /// Only for Hat/Valley.
    pub magnitude: MagnitudeClass,
    /// Stay: 0. Rising/Falling: |net change|. Mixed: max - min.
    /// Hat/Valley: |extremum - mean endpoint pitch|.
    pub extent_semitones: f64,
}

/// Classifies a span's overall direction from its semitone curve.
///
/// Hat and valley are checked first: the extremum must clear both
/// endpoints by the reversal threshold and the endpoints must agree within
/// the return tolerance. Otherwise a net move of at least the threshold
/// with no opposite excursion of the same size is Rising or Falling, and
/// anything else is Mixed.
pub fn classify_direction(semitones: &[f64], params: &ContourParams) -> ContourKind {
    debug_assert!(semitones.len() >= 2);
    let th = params.reversal_threshold;
    let start = semitones[0];
    let end = semitones[semitones.len() - 1];
    let max = semitones.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = semitones.iter().copied().fold(f64::INFINITY, f64::min);
    let returns = (end - start).abs() < params.return_tolerance;

    if returns && max - start >= th && max - end >= th {
        return ContourKind::Hat;
    }
    if returns && start - min >= th && end - min >= th {
        return ContourKind::Valley;
    }

    // largest excursion against the running extreme in each direction
    let mut running_max = f64::NEG_INFINITY;
    let mut max_drawdown = 0.0f64;
    let mut running_min = f64::INFINITY;
    let mut max_runup = 0.0f64;
    for &p in semitones {
        running_max = running_max.max(p);
        running_min = running_min.min(p);
        max_drawdown = max_drawdown.max(running_max - p);
        max_runup = max_runup.max(p - running_min);
    }

    let net = end - start;
    if net >= th && max_drawdown < th {
        ContourKind::Rising
    } else if net <= -th && max_runup < th {
        ContourKind::Falling
    } else {
        ContourKind::Mixed
    }
}

/// Classifies the shape of a rising or falling span.
///
/// The signed area between the pitch curve and the straight chord joining
/// the endpoints is integrated by the trapezoid rule and normalized by
/// span duration times |net change|. Negative area (curve below chord) is
/// Convex, positive is Concave, and anything inside the tolerance Linear.
pub fn classify_shape(ts: &[f64], semitones: &[f64], params: &ContourParams) -> Result<ShapeClass> {
    debug_assert_eq!(ts.len(), semitones.len());
    debug_assert!(ts.len() >= 2);
    let t0 = ts[0];
    let t1 = ts[ts.len() - 1];
    let p0 = semitones[0];
    let p1 = semitones[semitones.len() - 1];
    let net = p1 - p0;
    let duration = t1 - t0;
    if net == 0.0 || duration <= 0.0 {
        return Err(Error::numeric("shape undefined for zero net change"));
    }
    let chord = |t: f64| p0 + net * (t - t0) / duration;
    let mut area = 0.0;
    for i in 0..ts.len() - 1 {
        let da = semitones[i] - chord(ts[i]);
        let db = semitones[i + 1] - chord(ts[i + 1]);
        area += 0.5 * (da + db) * (ts[i + 1] - ts[i]);
    }
    let normalized = area / (duration * net.abs());
    Ok(if normalized < -params.linear_tolerance {
        ShapeClass::Convex
    } else if normalized > params.linear_tolerance {
        ShapeClass::Concave
    } else {
        ShapeClass::Linear
    })
}

/// Skew, magnitude, and extent of a hat or valley span.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HatValleyClass {
    pub skew: SkewClass,
    pub magnitude: MagnitudeClass,
    pub extent_semitones: f64,
}

/// Classifies a hat/valley span by extremum position and size.
///
/// With `r` the relative time of the extremum, skew is Positive for
/// `r <= 0.5 - tol` (peak early, long tail right), Negative for
/// `r >= 0.5 + tol`, else Symmetric. Extent is measured from the mean
/// endpoint pitch to the extremum.
pub fn classify_hat_valley(
    ts: &[f64],
    semitones: &[f64],
    is_hat: bool,
    params: &ContourParams,
) -> HatValleyClass {
    debug_assert_eq!(ts.len(), semitones.len());
    debug_assert!(ts.len() >= 2);
    let mut ext_idx = 0usize;
    for (i, &p) in semitones.iter().enumerate() {
        let better = if is_hat {
            p > semitones[ext_idx]
        } else {
            p < semitones[ext_idx]
        };
        if better {
            ext_idx = i;
        }
    }
    let t0 = ts[0];
    let t1 = ts[ts.len() - 1];
    let r = (ts[ext_idx] - t0) / (t1 - t0);
    let skew = if r <= 0.5 - params.skew_tolerance {
        SkewClass::Positive
    } else if r >= 0.5 + params.skew_tolerance {
        SkewClass::Negative
    } else {
        SkewClass::Symmetric
    };
    let endpoint_mean = 0.5 * (semitones[0] + semitones[semitones.len() - 1]);
    let extent = (semitones[ext_idx] - endpoint_mean).abs();
    let magnitude = if extent < params.mag_lo {
        MagnitudeClass::Low
    } else if extent > params.mag_hi {
        MagnitudeClass::High
    } else {
        MagnitudeClass::Moderate
    };
    HatValleyClass {
        skew,
        magnitude,
        extent_semitones: extent,
    }
}

/// Classifies one inter-stay span given its sample times and pitches.
pub fn classify_span(
    ts: &[f64],
    semitones: &[f64],
    params: &ContourParams,
) -> Result<ContourSegment> {
    let kind = classify_direction(semitones, params);
    let t0 = ts[0];
    let t1 = ts[ts.len() - 1];
    let start = semitones[0];
    let end = semitones[semitones.len() - 1];
    let seg = match kind {
        ContourKind::Rising | ContourKind::Falling => ContourSegment {
            kind,
            t0,
            t1,
            shape: classify_shape(ts, semitones, params)?,
            skew: SkewClass::NotApplicable,
            magnitude: MagnitudeClass::NotApplicable,
            extent_semitones: (end - start).abs(),
        },
        ContourKind::Hat | ContourKind::Valley => {
            let hv = classify_hat_valley(ts, semitones, kind == ContourKind::Hat, params);
            ContourSegment {
                kind,
                t0,
                t1,
                shape: ShapeClass::NotApplicable,
                skew: hv.skew,
                magnitude: hv.magnitude,
                extent_semitones: hv.extent_semitones,
            }
        }
        ContourKind::Mixed => {
            let max = semitones.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = semitones.iter().copied().fold(f64::INFINITY, f64::min);
            ContourSegment {
                kind,
                t0,
                t1,
                shape: ShapeClass::NotApplicable,
                skew: SkewClass::NotApplicable,
                magnitude: MagnitudeClass::NotApplicable,
                extent_semitones: max - min,
            }
        }
        ContourKind::Stay => unreachable!("classify_direction never yields Stay"),
    };
    Ok(seg)
}

/// Segments a track into stays and classified transition spans.
///
/// Stays are the detected note events. Each maximal run of voiced samples
/// between stays (split on unvoiced gaps) becomes exactly one classified
/// span; runs of fewer than two samples are dropped.
pub fn segment_contour(
    track: &PitchTrack,
    db: &NoteDatabase,
    min_dwell: f64,
    params: &ContourParams,
) -> Result<Vec<ContourSegment>> {
    params.validate()?;
    let detection = detect_events(track, db, min_dwell)?;
    let mut segments: Vec<ContourSegment> = Vec::new();
    for event in &detection.events {
        segments.push(ContourSegment {
            kind: ContourKind::Stay,
            t0: event.onset,
            t1: event.offset,
            shape: ShapeClass::NotApplicable,
            skew: SkewClass::NotApplicable,
            magnitude: MagnitudeClass::NotApplicable,
            extent_semitones: 0.0,
        });
    }

    let mut span_ts: Vec<f64> = Vec::new();
    let mut span_ps: Vec<f64> = Vec::new();
    let mut event_idx = 0usize;
    let events = &detection.events;
    let mut spans: Vec<ContourSegment> = Vec::new();
    let flush =
        |ts: &mut Vec<f64>, ps: &mut Vec<f64>, out: &mut Vec<ContourSegment>| -> Result<()> {
            if ts.len() >= 2 {
                out.push(classify_span(ts, ps, params)?);
            }
            ts.clear();
            ps.clear();
            Ok(())
        };

    for sample in track.samples() {
        // advance past stays ending before this sample
        while event_idx < events.len() && sample.t > events[event_idx].offset {
            event_idx += 1;
        }
        let in_stay = event_idx < events.len()
            && sample.t >= events[event_idx].onset
            && sample.t <= events[event_idx].offset;
        match sample.f0 {
            None => flush(&mut span_ts, &mut span_ps, &mut spans)?,
            Some(f0) => {
                if in_stay {
                    flush(&mut span_ts, &mut span_ps, &mut spans)?;
                } else {
                    span_ts.push(sample.t);
                    span_ps.push(to_midi(f0)?.midi_real);
                }
            }
        }
    }
    flush(&mut span_ts, &mut span_ps, &mut spans)?;

    segments.extend(spans);
    segments.sort_by(|a, b| a.t0.partial_cmp(&b.t0).unwrap());
    Ok(segments)
}

/// Counts per contour category.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DirectedCounts {
    pub total: u32,
    pub convex: u32,
    pub concave: u32,
    pub linear: u32,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ArchCounts {
    pub total: u32,
    pub skew_positive: u32,
    pub skew_negative: u32,
    pub skew_symmetric: u32,
    pub mag_low: u32,
    pub mag_moderate: u32,
    pub mag_high: u32,
}

/// Cross-tabulated contour counts; stays are the "no transition" class.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ContourSummary {
    pub no_transition: u32,
    pub rising: DirectedCounts,
    pub falling: DirectedCounts,
    pub mixed: u32,
    pub hats: ArchCounts,
    pub valleys: ArchCounts,
}

pub fn summarize(segments: &[ContourSegment]) -> ContourSummary {
    let mut summary = ContourSummary::default();
    let directed = |counts: &mut DirectedCounts, shape: ShapeClass| {
        counts.total += 1;
        match shape {
            ShapeClass::Convex => counts.convex += 1,
            ShapeClass::Concave => counts.concave += 1,
            ShapeClass::Linear => counts.linear += 1,
            ShapeClass::NotApplicable => {}
        }
    };
    let arch = |counts: &mut ArchCounts, seg: &ContourSegment| {
        counts.total += 1;
        match seg.skew {
            SkewClass::Positive => counts.skew_positive += 1,
            SkewClass::Negative => counts.skew_negative += 1,
            SkewClass::Symmetric => counts.skew_symmetric += 1,
            SkewClass::NotApplicable => {}
        }
        match seg.magnitude {
            MagnitudeClass::Low => counts.mag_low += 1,
            MagnitudeClass::Moderate => counts.mag_moderate += 1,
            MagnitudeClass::High => counts.mag_high += 1,
            MagnitudeClass::NotApplicable => {}
        }
    };
    for seg in segments {
        match seg.kind {
            ContourKind::Stay => summary.no_transition += 1,
            ContourKind::Rising => directed(&mut summary.rising, seg.shape),
            ContourKind::Falling => directed(&mut summary.falling, seg.shape),
            ContourKind::Mixed => summary.mixed += 1,
            ContourKind::Hat => arch(&mut summary.hats, seg),
            ContourKind::Valley => arch(&mut summary.valleys, seg),
        }
    }
    summary
}

/// Inter-onset intervals and the rhythm flag.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IOIReport {
    pub intervals: Vec<f64>,
    pub mean: f64,
    /// Coefficient of variation, population sd over mean.
    pub cv: f64,
    pub rhythmic: bool,
}

/// Intervals between successive onsets; rhythmic when cv stays below the
/// threshold.
pub fn ioi_report(events: &[NoteEvent], cv_threshold: f64) -> Result<IOIReport> {
    if events.len() < 2 {
        return Err(Error::invalid(format!(
            "IOI needs at least 2 events, got {}",
            events.len()
        )));
    }
    let intervals: Vec<f64> = events.windows(2).map(|w| w[1].onset - w[0].onset).collect();
    let mean = intervals.iter().sum::<f64>() / intervals.len() as f64;
    let var = intervals
        .iter()
        .map(|x| (x - mean) * (x - mean))
        .sum::<f64>()
        / intervals.len() as f64;
    let cv = if mean > 0.0 { var.sqrt() / mean } else { 0.0 };
    Ok(IOIReport {
        intervals,
        mean,
        cv,
        rhythmic: cv <= cv_threshold,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notedetect::{NoteLabel, SwarName};
    use crate::pitchdata::PitchSample;

    fn params() -> ContourParams {
        ContourParams::default()
    }

    fn span(semitones: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let ts: Vec<f64> = (0..semitones.len()).map(|i| i as f64 * 0.01).collect();
        (ts, semitones.to_vec())
    }

    #[test]
    fn direction_basics() {
        let (_, ps) = span(&[0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(classify_direction(&ps, &params()), ContourKind::Rising);

        let (_, ps) = span(&[2.0, 1.0, 0.0]);
        assert_eq!(classify_direction(&ps, &params()), ContourKind::Falling);

        // V shape dropping 3 semitones and returning
        let (_, ps) = span(&[0.0, -1.5, -3.0, -1.5, 0.0]);
        assert_eq!(classify_direction(&ps, &params()), ContourKind::Valley);

        // hat returning within tolerance
        let (_, ps) = span(&[0.0, 1.0, 2.0, 1.0, 0.1]);
        assert_eq!(classify_direction(&ps, &params()), ContourKind::Hat);

        // up 2, down 2, up 2 with shifted endpoint: endpoints differ by 2
        let (_, ps) = span(&[0.0, 1.0, 2.0, 1.0, 0.0, 1.0, 2.0]);
        assert_eq!(classify_direction(&ps, &params()), ContourKind::Mixed);
    }

    #[test]
    fn direction_invariance_under_shift_and_transposition() {
        let base = [0.0, 0.4, 1.1, 1.9, 2.4];
        let kind = classify_direction(&base, &params());
        for offset in [-12.0, -3.0, 5.0, 24.0] {
            let shifted: Vec<f64> = base.iter().map(|p| p + offset).collect();
            assert_eq!(classify_direction(&shifted, &params()), kind);
        }
    }

    #[test]
    fn shape_basics() {
        // exact straight ramp
        let (ts, ps) = span(&[0.0, 0.5, 1.0, 1.5, 2.0]);
        assert_eq!(
            classify_shape(&ts, &ps, &params()).unwrap(),
            ShapeClass::Linear
        );

        // quadratic rise t^2 scaled to 2 semitones: area below chord
        let n = 101;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ps: Vec<f64> = ts.iter().map(|t| 2.0 * t * t).collect();
        assert_eq!(
            classify_shape(&ts, &ps, &params()).unwrap(),
            ShapeClass::Convex
        );

        // square-root rise: area above chord
        let ps: Vec<f64> = ts.iter().map(|t| 2.0 * t.sqrt()).collect();
        assert_eq!(
            classify_shape(&ts, &ps, &params()).unwrap(),
            ShapeClass::Concave
        );
    }

    #[test]
    fn shape_flips_under_reflection_about_chord() {
        let n = 51;
        let ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        let ps: Vec<f64> = ts.iter().map(|t| 3.0 * t * t).collect();
        let chord = |t: f64| 3.0 * t;
        let reflected: Vec<f64> = ts
            .iter()
            .zip(&ps)
            .map(|(&t, &p)| 2.0 * chord(t) - p)
            .collect();
        let a = classify_shape(&ts, &ps, &params()).unwrap();
        let b = classify_shape(&ts, &reflected, &params()).unwrap();
        assert_eq!(a, ShapeClass::Convex);
        assert_eq!(b, ShapeClass::Concave);
    }

    #[test]
    fn hat_valley_classification() {
        // symmetric triangular hat, extent 0.5
        let ts: Vec<f64> = (0..11).map(|i| i as f64 * 0.01).collect();
        let ps: Vec<f64> = (0..11)
            .map(|i| 0.5 - 0.1 * (i as f64 - 5.0).abs())
            .collect();
        let hv = classify_hat_valley(&ts, &ps, true, &params());
        assert_eq!(hv.skew, SkewClass::Symmetric);
        assert_eq!(hv.magnitude, MagnitudeClass::Low);
        assert!((hv.extent_semitones - 0.5).abs() < 1e-9);

        // extremum at r = 0.2, extent 4 semitones
        let ts: Vec<f64> = (0..=10).map(|i| i as f64 * 0.1).collect();
        let ps: Vec<f64> = ts
            .iter()
            .map(|&t| {
                if t <= 0.2 {
                    4.0 * t / 0.2
                } else {
                    4.0 * (1.0 - t) / 0.8
                }
            })
            .collect();
        let hv = classify_hat_valley(&ts, &ps, true, &params());
        assert_eq!(hv.skew, SkewClass::Positive);
        assert_eq!(hv.magnitude, MagnitudeClass::High);

        // extremum exactly at r = 0.5 + skew_tolerance: Symmetric zone is open
        let ts = vec![0.0, 0.6, 1.0];
        let ps = vec![0.0, 2.0, 0.0];
        let hv = classify_hat_valley(&ts, &ps, true, &params());
        assert_eq!(hv.skew, SkewClass::Negative);
    }

    #[test]
    fn summary_cross_tab() {
        assert_eq!(summarize(&[]), ContourSummary::default());

        let seg = |kind, shape| ContourSegment {
            kind,
            t0: 0.0,
            t1: 1.0,
            shape,
            skew: SkewClass::NotApplicable,
            magnitude: MagnitudeClass::NotApplicable,
            extent_semitones: 1.0,
        };
        let segments = vec![
            seg(ContourKind::Rising, ShapeClass::Convex),
            seg(ContourKind::Rising, ShapeClass::Linear),
            seg(ContourKind::Rising, ShapeClass::Linear),
        ];
        let summary = summarize(&segments);
        assert_eq!(summary.rising.total, 3);
        assert_eq!(summary.rising.convex, 1);
        assert_eq!(summary.rising.linear, 2);
        assert_eq!(
            summary.rising.convex + summary.rising.concave + summary.rising.linear,
            summary.rising.total
        );
    }

    fn event(onset: f64) -> NoteEvent {
        NoteEvent {
            label: NoteLabel::middle(SwarName::Sa),
            onset,
            offset: onset + 0.2,
            n_samples: 21,
        }
    }

    #[test]
    fn ioi_examples() {
        let events: Vec<NoteEvent> = [1.0, 2.0, 3.0, 4.0].iter().map(|&t| event(t)).collect();
        let report = ioi_report(&events, 0.3).unwrap();
        assert_eq!(report.intervals, vec![1.0, 1.0, 1.0]);
        assert_eq!(report.cv, 0.0);
        assert!(report.rhythmic);

        let events: Vec<NoteEvent> = [0.0, 1.0, 5.0].iter().map(|&t| event(t)).collect();
        let report = ioi_report(&events, 0.3).unwrap();
        assert!(report.cv > 0.5);
        assert!(!report.rhythmic);

        assert!(ioi_report(&[event(0.0)], 0.3).is_err());
    }

    #[test]
    fn segment_contour_ramp_between_stays() {
        let db = NoteDatabase::bundled(6.0).unwrap();
        // Sa stay, linear Hz ramp, Komal Ga stay
        let mut samples = Vec::new();
        let mut t = 0.0;
        for _ in 0..30 {
            samples.push(PitchSample::voiced(t, 243.2661));
            t += 0.01;
        }
        for i in 1..8 {
            samples.push(PitchSample::voiced(
                t,
                243.2661 + (287.6051 - 243.2661) * i as f64 / 8.0,
            ));
            t += 0.01;
        }
        for _ in 0..30 {
            samples.push(PitchSample::voiced(t, 287.6051));
            t += 0.01;
        }
        let track = PitchTrack::new(samples, t).unwrap();
        let segments = segment_contour(&track, &db, 0.1, &params()).unwrap();
        let stays: Vec<_> = segments
            .iter()
            .filter(|s| s.kind == ContourKind::Stay)
            .collect();
        let rises: Vec<_> = segments
            .iter()
            .filter(|s| s.kind == ContourKind::Rising)
            .collect();
        assert_eq!(stays.len(), 2);
        assert_eq!(rises.len(), 1);
        // no overlaps, time ordered
        for w in segments.windows(2) {
            assert!(w[0].t1 <= w[1].t0 + 1e-9);
        }
    }

    #[test]
    fn segment_contour_hat_between_same_note_stays() {
        let db = NoteDatabase::bundled(6.0).unwrap();
        let sa_hz = 243.2661;
        let mut samples = Vec::new();
        let mut t = 0.0;
        for _ in 0..30 {
            samples.push(PitchSample::voiced(t, sa_hz));
            t += 0.01;
        }
        // bump up 2 semitones and return; stays out of other bands briefly
        let bump = 10;
        for i in 1..=bump {
            let phase = i as f64 / (bump + 1) as f64;
            let semis = 2.0 * (1.0 - (2.0 * phase - 1.0).abs());
            samples.push(PitchSample::voiced(t, sa_hz * (2.0f64).powf(semis / 12.0)));
            t += 0.01;
        }
        for _ in 0..30 {
            samples.push(PitchSample::voiced(t, sa_hz));
            t += 0.01;
        }
        let track = PitchTrack::new(samples, t).unwrap();
        let segments = segment_contour(&track, &db, 0.1, &params()).unwrap();
        let hats: Vec<_> = segments
            .iter()
            .filter(|s| s.kind == ContourKind::Hat)
            .collect();
        assert_eq!(hats.len(), 1);
        assert_eq!(hats[0].skew, SkewClass::Symmetric);
        assert_eq!(hats[0].magnitude, MagnitudeClass::Moderate);
    }

    #[test]
    fn all_stay_track_yields_only_stays() {
        let db = NoteDatabase::bundled(6.0).unwrap();
        let samples: Vec<PitchSample> = (0..50)
            .map(|i| PitchSample::voiced(i as f64 * 0.01, 243.2661))
            .collect();
        let track = PitchTrack::new(samples, 0.49).unwrap();
        let segments = segment_contour(&track, &db, 0.1, &params()).unwrap();
        assert_eq!(segments.len(), 1);
        assert!(segments.iter().all(|s| s.kind == ContourKind::Stay));
    }

    #[test]
    fn empty_track_yields_no_segments() {
        let db = NoteDatabase::bundled(6.0).unwrap();
        let track = PitchTrack::new(vec![], 0.0).unwrap();
        assert!(segment_contour(&track, &db, 0.1, &params())
            .unwrap()
            .is_empty());
    }
}
