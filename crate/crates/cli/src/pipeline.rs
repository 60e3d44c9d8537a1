//! Report assembly shared by the subcommands.
//!
//! Every command that emits JSON builds a `serde_json::Value` here and
//! serializes it through the canonical writer, so identical inputs always
//! produce byte-identical output. `analyze` is literally the composition
//! of the standalone sections.

use serde_json::{json, Map, Value};

use ragalab_core::contour::{
    ioi_report, segment_contour, summarize, ContourParams, ContourSegment,
};
use ragalab_core::error::{Error, Result};
use ragalab_core::notedetect::{
    detect_events, long_stays, Detection, NoteDatabase, NoteEvent, NoteLabel,
};
use ragalab_core::pitchdata::{pitch_profile, PitchTrack};
use ragalab_core::rastats::{
    auto_pool, chi_square_gof, compare_tables, count_notes, expected_counts, multinomial_moments,
    polyfit, relative, run_test, stability_report, windowed_counts, FrequencyTable,
    MultinomialModel, PoolingSpec, SegmentSpec, TiePolicy, WindowedCounts,
};

pub const SCHEMA_VERSION: u64 = 1;
pub const MIN_EXPECTED: f64 = 5.0;

/// Pooling request: automatic, or per-segment explicit block lists.
#[derive(Debug, Clone)]
pub enum PoolArg {
    Auto,
    Explicit(Vec<String>),
}

impl PoolArg {
    /// Parses `auto` or comma-separated per-segment block lists like
    /// `1;2;3;4-7,1;2;3;4;5;6;7`.
    pub fn parse(s: &str) -> PoolArg {
        if s.trim() == "auto" {
            PoolArg::Auto
        } else {
            PoolArg::Explicit(s.split(',').map(|p| p.trim().to_string()).collect())
        }
    }

    fn for_segment(
        &self,
        idx: usize,
        n_segments: usize,
        expected: &[f64],
    ) -> Result<(PoolingSpec, &'static str)> {
        match self {
            PoolArg::Auto => Ok((auto_pool(expected, MIN_EXPECTED)?, "auto")),
            PoolArg::Explicit(specs) => {
                let spec_str = if specs.len() == 1 {
                    &specs[0]
                } else if specs.len() == n_segments {
                    &specs[idx]
                } else {
                    return Err(Error::invalid(format!(
                        "{} pooling specs for {} segments",
                        specs.len(),
                        n_segments
                    )));
                };
                Ok((PoolingSpec::parse(spec_str, expected.len())?, "explicit"))
            }
        }
    }
}

impl std::fmt::Display for PoolArg {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PoolArg::Auto => f.write_str("auto"),
            PoolArg::Explicit(specs) => f.write_str(&specs.join(",")),
        }
    }
}

/// Maps a float into JSON, turning non-finite values into null.
pub fn num(x: f64) -> Value {
    serde_json::Number::from_f64(x)
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

fn nums(xs: &[f64]) -> Value {
    Value::Array(xs.iter().map(|&x| num(x)).collect())
}

fn label_str(l: NoteLabel) -> Value {
    Value::String(l.to_string())
}

pub fn detection_section(det: &Detection) -> Value {
    json!({
        "events": det.events.iter().map(|e| json!({
            "note": e.label.name.as_str(),
            "octave": e.label.octave,
            "onset_sec": num(e.onset),
            "offset_sec": num(e.offset),
            "n_samples": e.n_samples,
        })).collect::<Vec<_>>(),
        "n_events": det.events.len(),
        "glide_tally": {
            "out_of_band_samples": det.out_of_band_samples,
            "short_run_samples": det.short_run_samples,
            "unvoiced_samples": det.unvoiced_samples,
        },
    })
}

fn table_value(t: &FrequencyTable) -> Value {
    let rel = if t.total() > 0 {
        nums(&relative(t).expect("non-empty table"))
    } else {
        Value::Array(t.counts().iter().map(|_| Value::Null).collect())
    };
    json!({
        "counts": t.counts(),
        "total": t.total(),
        "relative": rel,
    })
}

fn windowed_value(wc: &WindowedCounts) -> Value {
    json!({
        "label": label_str(wc.label),
        "window_sec": num(wc.window),
        "start_sec": num(wc.start),
        "upper_sec": nums(&wc.upper_limits()),
        "counts": wc.counts,
        "cumulative": wc.cumulative,
    })
}

/// Builds the statistics section: per-segment tables, chi-square tests,
/// run test, stability ranking, moments, windowed counts and fits.
pub fn stats_section(
    events: &[NoteEvent],
    segments: &[SegmentSpec],
    pool: &PoolArg,
    window: f64,
    floor: Option<f64>,
) -> Result<Value> {
    if events.len() < 2 {
        return Err(Error::invalid(format!(
            "stats needs at least 2 events, got {}",
            events.len()
        )));
    }
    let overall = count_notes(events, None);
    let overall_rel = relative(&overall)?;
    let labels = overall.labels().to_vec();

    let mut segment_values = Vec::new();
    let mut segment_tables = Vec::new();
    for (i, seg) in segments.iter().enumerate() {
        let observed = count_notes(events, Some(seg));
        let expected = expected_counts(&overall_rel, observed.total());
        let (pooling, source) = pool.for_segment(i, segments.len(), &expected)?;
        let chi = chi_square_gof(&observed, &expected, &pooling)?;
        segment_values.push(json!({
            "start_sec": num(seg.start),
            "end_sec": num(seg.end),
            "observed": table_value(&observed),
            "expected": nums(&expected),
            "pooling": pooling.to_string(),
            "pooling_source": source,
            "chi_square": {
                "statistic": num(chi.statistic),
                "df": chi.df,
                "p_value": num(chi.p_value),
            },
        }));
        segment_tables.push(observed);
    }

    // run test over the arrival sequence, coded by scale position
    let codes: Vec<i64> = events
        .iter()
        .map(|e| {
            labels
                .binary_search(&e.label)
                .expect("event label in table") as i64
                + 1
        })
        .collect();
    let run = run_test(&codes, TiePolicy::AssignL)?;
    let run_value = json!({
        "n": run.n,
        "runs": run.runs,
        "expected_runs": num(run.expected_runs),
        "var_runs": num(run.var_runs),
        "z": num(run.z),
        "significant": run.significant,
    });

    let stability = if segment_tables.len() >= 2 {
        Some(stability_report(&overall, &segment_tables, floor)?)
    } else {
        None
    };
    let stability_value = match &stability {
        None => Value::Null,
        Some(rep) => json!({
            "floor": num(rep.floor),
            "notes": rep.notes.iter().map(|n| json!({
                "label": label_str(n.label),
                "overall_rel": num(n.overall_rel),
                "score": num(n.score),
                "eligible": n.eligible,
            })).collect::<Vec<_>>(),
            "ranking": rep.ranking.iter().map(|&l| label_str(l)).collect::<Vec<_>>(),
            "vadi_candidate": rep.vadi_candidate.map(label_str).unwrap_or(Value::Null),
            "samvadi_candidate": rep.samvadi_candidate.map(label_str).unwrap_or(Value::Null),
        }),
    };

    // moments of the fitted multinomial model
    let model = MultinomialModel::new(overall.total(), overall_rel.clone())?;
    let moments = multinomial_moments(&model);
    let candidates = stability
        .as_ref()
        .and_then(|r| r.vadi_candidate.zip(r.samvadi_candidate));
    let pair_value = match candidates {
        None => Value::Null,
        Some((vadi, samvadi)) => {
            let vi = labels.binary_search(&vadi).expect("vadi in table");
            let si = labels.binary_search(&samvadi).expect("samvadi in table");
            json!({
                "vadi": label_str(vadi),
                "samvadi": label_str(samvadi),
                "var_vadi": num(moments.variance[vi]),
                "var_samvadi": num(moments.variance[si]),
                "covariance": num(moments.covariance[vi][si]),
                "correlation": moments.correlation[vi][si].map(num).unwrap_or(Value::Null),
            })
        }
    };
    let moments_value = json!({
        "n": overall.total(),
        "expected": nums(&moments.expected),
        "variance": nums(&moments.variance),
        "covariance": moments.covariance.iter().map(|row| nums(row)).collect::<Vec<_>>(),
        "vadi_samvadi": pair_value,
    });

    // windowed counts and degree-4 fits for the candidate pair
    let mut windowed_values = Vec::new();
    let mut polyfit_values = Vec::new();
    if let Some((vadi, samvadi)) = candidates {
        let max_offset = events.iter().map(|e| e.offset).fold(0.0f64, f64::max);
        let max_end = segments.iter().map(|s| s.end).fold(0.0f64, f64::max);
        let span_end = (max_offset.max(max_end) / window).ceil() * window;
        let span = SegmentSpec::new(0.0, span_end)?;
        for label in [vadi, samvadi] {
            let wc = windowed_counts(events, label, window, &span)?;
            windowed_values.push(windowed_value(&wc));
            if wc.counts.len() >= 5 {
                let xs: Vec<f64> = (1..=wc.counts.len()).map(|i| i as f64).collect();
                for (series, values) in [
                    ("window_counts", &wc.counts),
                    ("cumulative", &wc.cumulative),
                ] {
                    let ys: Vec<f64> = values.iter().map(|&c| c as f64).collect();
                    let fit = polyfit(&xs, &ys, 4)?;
                    polyfit_values.push(json!({
                        "label": label_str(label),
                        "series": series,
                        "degree": fit.degree,
                        "coefficients": nums(&fit.coefficients),
                        "r2": num(fit.r2),
                    }));
                }
            }
        }
    }

    Ok(json!({
        "labels": labels.iter().map(|&l| label_str(l)).collect::<Vec<_>>(),
        "overall": table_value(&overall),
        "segments": segment_values,
        "run_test": run_value,
        "stability": stability_value,
        "moments": moments_value,
        "windowed": windowed_values,
        "polyfits": polyfit_values,
    }))
}

fn segment_value(seg: &ContourSegment) -> Value {
    json!({
        "kind": format!("{:?}", seg.kind),
        "t0_sec": num(seg.t0),
        "t1_sec": num(seg.t1),
        "shape": format!("{:?}", seg.shape),
        "skew": format!("{:?}", seg.skew),
        "magnitude": format!("{:?}", seg.magnitude),
        "extent_semitones": num(seg.extent_semitones),
    })
}

/// Builds the contour section and returns the raw segments for CSV output.
pub fn contour_section(
    track: &PitchTrack,
    db: &NoteDatabase,
    min_dwell: f64,
    params: &ContourParams,
) -> Result<(Value, Vec<ContourSegment>)> {
    let segments = segment_contour(track, db, min_dwell, params)?;
    let summary = summarize(&segments);
    let value = json!({
        "summary": serde_json::to_value(summary).map_err(|e| Error::invalid(e.to_string()))?,
        "segments": segments.iter().map(segment_value).collect::<Vec<_>>(),
    });
    Ok((value, segments))
}

/// Writes the contour segments CSV.
pub fn write_contour_csv<W: std::io::Write>(segments: &[ContourSegment], mut w: W) -> Result<()> {
    let io = |e: std::io::Error| Error::invalid(format!("write failed: {e}"));
    writeln!(w, "kind,t0,t1,shape,skew,magnitude,extent_semitones").map_err(io)?;
    for s in segments {
        writeln!(
            w,
            "{:?},{:.6},{:.6},{:?},{:?},{:?},{:.6}",
            s.kind, s.t0, s.t1, s.shape, s.skew, s.magnitude, s.extent_semitones
        )
        .map_err(io)?;
    }
    Ok(())
}

/// Builds the metrics section: pitch extremes and profile, inter-onset
/// intervals, and the long-stay linearity fit.
pub fn metrics_section(
    track: &PitchTrack,
    events: &[NoteEvent],
    min_long: f64,
    cv_threshold: f64,
) -> Result<Value> {
    let profile_value = match pitch_profile(track) {
        Ok(profile) => json!({
            "min_midi": profile.min_midi,
            "max_midi": profile.max_midi,
            "points": profile.points.iter().map(|&(t, p)| json!([num(t), num(p)])).collect::<Vec<_>>(),
        }),
        Err(_) => Value::Null, // unvoiced track still gets a report
    };
    let ioi_value = if events.len() >= 2 {
        let ioi = ioi_report(events, cv_threshold)?;
        json!({
            "intervals": nums(&ioi.intervals),
            "mean": num(ioi.mean),
            "cv": num(ioi.cv),
            "rhythmic": ioi.rhythmic,
        })
    } else {
        Value::Null
    };
    let stays = long_stays(events, min_long)?;
    let long_value = json!({
        "min_long_sec": num(min_long),
        "onsets": nums(&stays.stays.iter().map(|e| e.onset).collect::<Vec<_>>()),
        "fit": stays.fit.map(|f| json!({
            "slope": num(f.slope),
            "intercept": num(f.intercept),
            "r2": num(f.r2),
        })).unwrap_or(Value::Null),
    });
    Ok(json!({
        "pitch_profile": profile_value,
        "ioi": ioi_value,
        "long_stays": long_value,
    }))
}

/// Options for the one-shot analysis.
#[derive(Debug, Clone)]
pub struct AnalyzeOptions {
    pub min_dwell: f64,
    pub segments: Vec<SegmentSpec>,
    pub pool: PoolArg,
    pub window: f64,
    pub min_long: f64,
    pub floor: Option<f64>,
    pub contour: ContourParams,
}

/// Prefixes an error with the pipeline stage that produced it.
pub fn stage<T>(name: &str, result: Result<T>) -> Result<T> {
    result.map_err(|e| match e {
        Error::Parse { line, msg } => Error::Parse {
            line,
            msg: format!("stage {name}: {msg}"),
        },
        Error::InvalidInput(msg) => Error::InvalidInput(format!("stage {name}: {msg}")),
        Error::Validation(msg) => Error::Validation(format!("stage {name}: {msg}")),
        Error::Numeric(msg) => Error::Numeric(format!("stage {name}: {msg}")),
    })
}

/// Runs the full pipeline over a track and assembles the report.
pub fn analyze(
    track: &PitchTrack,
    db: &NoteDatabase,
    opts: &AnalyzeOptions,
    metadata: Map<String, Value>,
) -> Result<Value> {
    let detection = stage("detect", detect_events(track, db, opts.min_dwell))?;
    let stats = stage(
        "stats",
        stats_section(
            &detection.events,
            &opts.segments,
            &opts.pool,
            opts.window,
            opts.floor,
        ),
    )?;
    let (contour, _) = stage(
        "contour",
        contour_section(track, db, opts.min_dwell, &opts.contour),
    )?;
    let metrics = stage(
        "metrics",
        metrics_section(
            track,
            &detection.events,
            opts.min_long,
            opts.contour.cv_threshold,
        ),
    )?;
    Ok(json!({
        "schema_version": SCHEMA_VERSION,
        "metadata": Value::Object(metadata),
        "detection": detection_section(&detection),
        "stats": stats,
        "contour": contour,
        "metrics": metrics,
    }))
}

/// Builds the comparison section between two event lists.
pub fn comparison_section(events_a: &[NoteEvent], events_b: &[NoteEvent]) -> Result<Value> {
    // union label set so the two tables always align
    let mut labels: Vec<NoteLabel> = events_a.iter().chain(events_b).map(|e| e.label).collect();
    labels.sort();
    labels.dedup();
    let count_over = |events: &[NoteEvent]| -> Result<FrequencyTable> {
        let mut counts = vec![0u64; labels.len()];
        for e in events {
            let idx = labels.binary_search(&e.label).expect("label in union");
            counts[idx] += 1;
        }
        FrequencyTable::new(labels.clone(), counts)
    };
    let a = count_over(events_a)?;
    let b = count_over(events_b)?;
    let cmp = compare_tables(&a, &b)?;
    Ok(json!({
        "labels": cmp.labels.iter().map(|&l| label_str(l)).collect::<Vec<_>>(),
        "counts_a": cmp.pairs.iter().map(|p| p.0).collect::<Vec<_>>(),
        "counts_b": cmp.pairs.iter().map(|p| p.1).collect::<Vec<_>>(),
        "relative_a": nums(&relative(&a)?),
        "relative_b": nums(&relative(&b)?),
        "deltas": nums(&cmp.deltas),
        "tvd": num(cmp.tvd),
    }))
}
