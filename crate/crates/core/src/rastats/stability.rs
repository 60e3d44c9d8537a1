//! Vadi/samvadi candidate ranking by relative-frequency stability.
//!
//! The most significant notes of a raga are not necessarily the most
//! frequent: they are notes whose relative frequency is high and settles
//! quickly. Each note's instability score is its worst relative deviation
//! between segment and overall relative frequency; the two lowest-score
//! eligible notes are the vadi and samvadi candidates. Sa is always
//! excluded as the base note.

use super::freq::{relative, FrequencyTable};
use crate::error::{Error, Result};
use crate::notedetect::{NoteLabel, SwarName};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoteStability {
    pub label: NoteLabel,
    pub overall_rel: f64,
    /// `max over segments |rel_seg - rel_overall| / rel_overall`;
    /// infinite when the note never occurs overall.
    pub score: f64,
    pub eligible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StabilityReport {
    /// Minimum overall relative frequency for eligibility.
    pub floor: f64,
    pub notes: Vec<NoteStability>,
    /// Eligible notes sorted by ascending instability score.
    pub ranking: Vec<NoteLabel>,
    pub vadi_candidate: Option<NoteLabel>,
    pub samvadi_candidate: Option<NoteLabel>,
}

/// Scores every note's stability across segments and ranks candidates.
///
/// `eligibility_floor` defaults to `1/(2k)` where `k` is the number of
/// labels; importance requires high relative frequency, so rare notes are
/// never candidates. Fewer than two eligible notes leaves the candidate
/// slots empty (the unstable, quasi-multinomial regime).
pub fn stability_report(
    overall: &FrequencyTable,
    segments: &[FrequencyTable],
    eligibility_floor: Option<f64>,
) -> Result<StabilityReport> {
    if segments.len() < 2 {
        return Err(Error::invalid(format!(
            "need at least 2 segment tables, got {}",
            segments.len()
        )));
    }
    for seg in segments {
        if seg.labels() != overall.labels() {
            return Err(Error::invalid(
                "segment tables must share the overall label set",
            ));
        }
    }
    let k = overall.labels().len();
    let floor = eligibility_floor.unwrap_or(1.0 / (2.0 * k as f64));
    let overall_rel = relative(overall)?;
    let seg_rels: Vec<Vec<f64>> = segments.iter().map(relative).collect::<Result<_>>()?;

    let mut notes = Vec::with_capacity(k);
    for (i, &label) in overall.labels().iter().enumerate() {
        let ro = overall_rel[i];
        let score = if ro > 0.0 {
            seg_rels
                .iter()
                .map(|rel| (rel[i] - ro).abs() / ro)
                .fold(0.0f64, f64::max)
        } else {
            // absent overall: infinite whether or not a segment saw it
            f64::INFINITY
        };
        let eligible = ro >= floor && label.name != SwarName::Sa && score.is_finite();
        notes.push(NoteStability {
            label,
            overall_rel: ro,
            score,
            eligible,
        });
    }

    let mut ranking: Vec<&NoteStability> = notes.iter().filter(|n| n.eligible).collect();
    ranking.sort_by(|a, b| {
        a.score
            .partial_cmp(&b.score)
            .unwrap()
            .then(a.label.cmp(&b.label))
    });
    let ranking: Vec<NoteLabel> = ranking.into_iter().map(|n| n.label).collect();

    Ok(StabilityReport {
        floor,
        vadi_candidate: ranking.first().copied(),
        samvadi_candidate: ranking.get(1).copied(),
        notes,
        ranking,
    })
}
