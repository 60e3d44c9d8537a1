//! ragalab: analyze monophonic raga pitch tracks.
//!
//! Subcommands: `detect` (note events), `stats` (frequency tables,
//! chi-square, run test, stability), `contour` (ornament classification),
//! `synth` (seeded test-track generation), `compare` (two performances),
//! `analyze` (one-shot report), `plotdata` (figure series extraction).
//!
//! Exit codes: 0 success, 1 input error, 2 validation error, 3 internal
//! numeric failure.

mod pipeline;

use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde_json::{json, Map, Value};

use pipeline::{num, AnalyzeOptions, PoolArg, SCHEMA_VERSION};
use ragalab_core::contour::ContourParams;
use ragalab_core::error::{Error, Result};
use ragalab_core::notedetect::{
    detect_events, parse_events, write_events, NoteDatabase, NoteLabel,
};
use ragalab_core::pitchdata::{parse_track, write_track, PitchTrack};
use ragalab_core::rastats::SegmentSpec;
use ragalab_core::report::{format_float, to_canonical_json};
use ragalab_core::synth::{generate_sequence, render_track, GeneratorConfig, GENERATOR_ID};

const NOTEDB_ENV: &str = "RAGALAB_NOTEDB";
const DEFAULT_SEGMENTS: &str = "0:30,20:50,30:60";

#[derive(Parser)]
#[command(
    name = "ragalab",
    version,
    about = "Statistical analysis of monophonic raga pitch tracks"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct DbArgs {
    /// Note database CSV (default: $RAGALAB_NOTEDB, else the built-in calibration)
    #[arg(long)]
    notedb: Option<PathBuf>,
    /// Chebyshev sigma multiplier
    #[arg(long, default_value_t = 6.0)]
    k: f64,
}

impl DbArgs {
    /// Loads the database and reports where it came from.
    fn load(&self) -> Result<(NoteDatabase, String)> {
        let path = self
            .notedb
            .clone()
            .or_else(|| std::env::var_os(NOTEDB_ENV).map(PathBuf::from));
        match path {
            Some(p) => {
                let file = open_input(&p)?;
                Ok((
                    NoteDatabase::load_csv(file, self.k)?,
                    p.display().to_string(),
                ))
            }
            None => Ok((NoteDatabase::bundled(self.k)?, "bundled".to_string())),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Detect note events in a pitch track, emitting events CSV
    Detect {
        /// Pitch-track CSV (time_sec,f0_hz)
        #[arg(long)]
        track: PathBuf,
        #[command(flatten)]
        db: DbArgs,
        /// Minimum stay duration in seconds for a run to count as a note
        #[arg(long = "min-dwell", default_value_t = 0.1)]
        min_dwell: f64,
        /// Output path (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Frequency, hypothesis-test and stability statistics over an event list
    Stats {
        /// Events CSV as emitted by detect
        #[arg(long)]
        events: PathBuf,
        /// Analysis segments, start:end[,start:end...] in seconds
        #[arg(long, default_value = DEFAULT_SEGMENTS)]
        segments: String,
        /// `auto`, or per-segment explicit poolings like `1;2;3;4-7,...`
        #[arg(long, default_value = "auto")]
        pool: String,
        /// Window length in seconds for windowed counts
        #[arg(long, default_value_t = 10.0)]
        window: f64,
        /// Eligibility floor for stability ranking (default 1/(2k))
        #[arg(long)]
        floor: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Classify pitch-contour ornaments
    Contour {
        #[arg(long)]
        track: PathBuf,
        #[command(flatten)]
        db: DbArgs,
        #[arg(long = "min-dwell", default_value_t = 0.1)]
        min_dwell: f64,
        #[arg(long = "reversal-threshold")]
        reversal_threshold: Option<f64>,
        #[arg(long = "return-tolerance")]
        return_tolerance: Option<f64>,
        #[arg(long = "linear-tolerance")]
        linear_tolerance: Option<f64>,
        #[arg(long = "skew-tolerance")]
        skew_tolerance: Option<f64>,
        #[arg(long = "mag-lo")]
        mag_lo: Option<f64>,
        #[arg(long = "mag-hi")]
        mag_hi: Option<f64>,
        #[arg(long = "cv-threshold")]
        cv_threshold: Option<f64>,
        /// Summary JSON output (stdout when absent)
        #[arg(long)]
        out: Option<PathBuf>,
        /// Per-segment CSV output
        #[arg(long = "segments-out")]
        segments_out: Option<PathBuf>,
    },
    /// Generate a synthetic performance: track CSV plus truth sidecar JSON
    Synth {
        #[arg(long)]
        seed: u64,
        /// Number of notes to generate
        #[arg(long, default_value_t = 100)]
        n: usize,
        #[command(flatten)]
        db: DbArgs,
        /// Track CSV output path; the sidecar defaults to it with a .json extension
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        sidecar: Option<PathBuf>,
        /// Comma-separated note labels (default: the seven pilu notes)
        #[arg(long)]
        labels: Option<String>,
        /// Comma-separated probabilities aligned with labels
        #[arg(long)]
        probs: Option<String>,
        /// Comma-separated per-trial probability drift (quasi-multinomial)
        #[arg(long)]
        drift: Option<String>,
        #[arg(long = "stay-mean", default_value_t = 0.4)]
        stay_mean: f64,
        #[arg(long = "stay-jitter", default_value_t = 0.05)]
        stay_jitter: f64,
        #[arg(long, default_value_t = 0.05)]
        glide: f64,
        #[arg(long = "jitter-scale", default_value_t = 1.0)]
        jitter_scale: f64,
        #[arg(long = "sample-period", default_value_t = 0.01)]
        sample_period: f64,
    },
    /// Compare note usage between two event lists
    Compare {
        #[arg(long = "events-a")]
        events_a: PathBuf,
        #[arg(long = "events-b")]
        events_b: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full pipeline and emit one report JSON
    Analyze {
        #[arg(long)]
        track: PathBuf,
        #[command(flatten)]
        db: DbArgs,
        #[arg(long = "min-dwell")]
        min_dwell: Option<f64>,
        #[arg(long)]
        segments: Option<String>,
        #[arg(long)]
        pool: Option<String>,
        #[arg(long)]
        window: Option<f64>,
        /// Analysis config JSON; flags override config values
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Extract plot-ready CSV series from a report JSON
    Plotdata {
        #[arg(long)]
        report: PathBuf,
        /// One of: onsets, ioi, pitch_profile, note_frequencies, cumulative, compare_bars
        #[arg(long)]
        which: String,
        /// Note label for `cumulative` (default: the vadi candidate)
        #[arg(long)]
        note: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Analysis configuration file for `analyze`.
#[derive(Debug, Clone, serde::Deserialize, Default)]
#[serde(default, deny_unknown_fields)]
struct AnalyzeConfig {
    k: Option<f64>,
    min_dwell: Option<f64>,
    segments: Option<String>,
    pool: Option<String>,
    window_sec: Option<f64>,
    min_long_sec: Option<f64>,
    eligibility_floor: Option<f64>,
    contour: Option<ContourParams>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{e}");
                return ExitCode::SUCCESS;
            }
            eprint!("{e}");
            return ExitCode::from(1);
        }
    };
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("ragalab: {err}");
            ExitCode::from(match err {
                Error::Parse { .. } | Error::InvalidInput(_) => 1u8,
                Error::Validation(_) => 2,
                Error::Numeric(_) => 3,
            })
        }
    }
}

fn open_input(path: &Path) -> Result<BufReader<File>> {
    File::open(path)
        .map(BufReader::new)
        .map_err(|e| Error::invalid(format!("cannot open {}: {e}", path.display())))
}

fn read_to_string(path: &Path) -> Result<String> {
    let mut buf = String::new();
    open_input(path)?
        .read_to_string(&mut buf)
        .map_err(|e| Error::invalid(format!("cannot read {}: {e}", path.display())))?;
    Ok(buf)
}

fn write_output(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout
                .write_all(content.as_bytes())
                .and_then(|_| stdout.flush())
            {
                Ok(()) => Ok(()),
                // downstream closed the pipe early (e.g. `| head`)
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                Err(e) => Err(Error::invalid(format!("cannot write to stdout: {e}"))),
            }
        }
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| Error::invalid(format!("cannot create {}: {e}", path.display())))?;
            let mut w = BufWriter::new(file);
            w.write_all(content.as_bytes())
                .and_then(|_| w.flush())
                .map_err(|e| Error::invalid(format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn load_track(path: &Path) -> Result<PitchTrack> {
    parse_track(open_input(path)?)
}

fn base_metadata(k: f64, notedb: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), json!("ragalab"));
    m.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
    m.insert("notedb".into(), json!(notedb));
    m.insert("k".into(), num(k));
    m
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Detect {
            track,
            db,
            min_dwell,
            out,
        } => {
            let (database, _) = db.load()?;
            let track = load_track(&track)?;
            let detection = detect_events(&track, &database, min_dwell)?;
            if detection.events.is_empty() {
                eprintln!("ragalab: warning: no note events detected");
            }
            eprintln!(
                "ragalab: {} events; glides: {} out-of-band, {} short-run, {} unvoiced samples",
                detection.events.len(),
                detection.out_of_band_samples,
                detection.short_run_samples,
                detection.unvoiced_samples
            );
            let mut buf = Vec::new();
            write_events(&detection.events, &mut buf)?;
            write_output(
                out.as_deref(),
                &String::from_utf8(buf).expect("events CSV is UTF-8"),
            )
        }

        Command::Stats {
            events,
            segments,
            pool,
            window,
            floor,
            out,
        } => {
            let event_list = parse_events(open_input(&events)?)?;
            let segment_specs = SegmentSpec::parse_list(&segments)?;
            let pool_arg = PoolArg::parse(&pool);
            let stats =
                pipeline::stats_section(&event_list, &segment_specs, &pool_arg, window, floor)?;
            let mut metadata = Map::new();
            metadata.insert("tool".into(), json!("ragalab"));
            metadata.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
            metadata.insert("events".into(), json!(events.display().to_string()));
            metadata.insert("segments".into(), json!(segments));
            metadata.insert("pool".into(), json!(pool_arg.to_string()));
            metadata.insert("window_sec".into(), num(window));
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "metadata": Value::Object(metadata),
                "stats": stats,
            });
            write_output(out.as_deref(), &to_canonical_json(&report))
        }

        Command::Contour {
            track,
            db,
            min_dwell,
            reversal_threshold,
            return_tolerance,
            linear_tolerance,
            skew_tolerance,
            mag_lo,
            mag_hi,
            cv_threshold,
            out,
            segments_out,
        } => {
            let (database, notedb) = db.load()?;
            let track_data = load_track(&track)?;
            let mut params = ContourParams::default();
            if let Some(v) = reversal_threshold {
                params.reversal_threshold = v;
            }
            if let Some(v) = return_tolerance {
                params.return_tolerance = v;
            }
            if let Some(v) = linear_tolerance {
                params.linear_tolerance = v;
            }
            if let Some(v) = skew_tolerance {
                params.skew_tolerance = v;
            }
            if let Some(v) = mag_lo {
                params.mag_lo = v;
            }
            if let Some(v) = mag_hi {
                params.mag_hi = v;
            }
            if let Some(v) = cv_threshold {
                params.cv_threshold = v;
            }
            let (contour, segments) =
                pipeline::contour_section(&track_data, &database, min_dwell, &params)?;
            let mut metadata = base_metadata(db.k, &notedb);
            metadata.insert("track".into(), json!(track.display().to_string()));
            metadata.insert("min_dwell".into(), num(min_dwell));
            metadata.insert(
                "contour_params".into(),
                serde_json::to_value(params).map_err(|e| Error::invalid(e.to_string()))?,
            );
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "metadata": Value::Object(metadata),
                "contour": contour,
            });
            write_output(out.as_deref(), &to_canonical_json(&report))?;
            if let Some(path) = segments_out {
                let mut buf = Vec::new();
                pipeline::write_contour_csv(&segments, &mut buf)?;
                write_output(Some(&path), &String::from_utf8(buf).expect("CSV is UTF-8"))?;
            }
            Ok(())
        }

        Command::Synth {
            seed,
            n,
            db,
            out,
            sidecar,
            labels,
            probs,
            drift,
            stay_mean,
            stay_jitter,
            glide,
            jitter_scale,
            sample_period,
        } => {
            let (database, notedb) = db.load()?;
            let mut cfg = GeneratorConfig::pilu_default(seed);
            if let Some(spec) = labels {
                cfg.labels = spec
                    .split(',')
                    .map(|s| s.trim().parse::<NoteLabel>())
                    .collect::<Result<_>>()?;
                let k = cfg.labels.len();
                cfg.probabilities = vec![1.0 / k as f64; k];
                cfg.drift = vec![0.0; k];
            }
            if let Some(spec) = probs {
                cfg.probabilities = parse_floats(&spec)?;
            }
            if let Some(spec) = drift {
                cfg.drift = parse_floats(&spec)?;
            }
            cfg.stay_duration_mean = stay_mean;
            cfg.stay_duration_jitter = stay_jitter;
            cfg.glide_duration = glide;
            cfg.f0_jitter_scale = jitter_scale;
            cfg.sample_period = sample_period;

            let sequence = generate_sequence(&cfg, n)?;
            let track = render_track(&sequence, &database, &cfg)?;
            let mut buf = Vec::new();
            write_track(&track, &mut buf)?;
            write_output(
                Some(&out),
                &String::from_utf8(buf).expect("track CSV is UTF-8"),
            )?;

            let sidecar_path = sidecar.unwrap_or_else(|| out.with_extension("json"));
            let sidecar_value = json!({
                "generator": GENERATOR_ID,
                "seed": seed,
                "notedb": notedb,
                "config": serde_json::to_value(&cfg).map_err(|e| Error::invalid(e.to_string()))?,
                "sequence": sequence.iter().map(|l| l.to_string()).collect::<Vec<_>>(),
                "track": out.display().to_string(),
            });
            write_output(Some(&sidecar_path), &to_canonical_json(&sidecar_value))
        }

        Command::Compare {
            events_a,
            events_b,
            out,
        } => {
            let a = parse_events(open_input(&events_a)?)?;
            let b = parse_events(open_input(&events_b)?)?;
            let comparison = pipeline::comparison_section(&a, &b)?;
            let report = json!({
                "schema_version": SCHEMA_VERSION,
                "metadata": {
                    "tool": "ragalab",
                    "version": env!("CARGO_PKG_VERSION"),
                    "events_a": events_a.display().to_string(),
                    "events_b": events_b.display().to_string(),
                },
                "comparison": comparison,
            });
            write_output(out.as_deref(), &to_canonical_json(&report))
        }

        Command::Analyze {
            track,
            db,
            min_dwell,
            segments,
            pool,
            window,
            config,
            out,
        } => {
            let cfg: AnalyzeConfig = match &config {
                None => AnalyzeConfig::default(),
                Some(path) => serde_json::from_str(&read_to_string(path)?)
                    .map_err(|e| Error::invalid(format!("bad config {}: {e}", path.display())))?,
            };
            let k = cfg.k.unwrap_or(db.k);
            let database_args = DbArgs {
                notedb: db.notedb.clone(),
                k,
            };
            let (database, notedb) = pipeline::stage("detect", database_args.load())?;
            let segments_str = segments
                .or(cfg.segments)
                .unwrap_or_else(|| DEFAULT_SEGMENTS.to_string());
            let pool_str = pool.or(cfg.pool).unwrap_or_else(|| "auto".to_string());
            let opts = AnalyzeOptions {
                min_dwell: min_dwell.or(cfg.min_dwell).unwrap_or(0.1),
                segments: SegmentSpec::parse_list(&segments_str)?,
                pool: PoolArg::parse(&pool_str),
                window: window.or(cfg.window_sec).unwrap_or(10.0),
                min_long: cfg.min_long_sec.unwrap_or(1.0),
                floor: cfg.eligibility_floor,
                contour: cfg.contour.unwrap_or_default(),
            };
            opts.contour.validate()?;
            let track_data = pipeline::stage("detect", load_track(&track))?;

            let mut metadata = base_metadata(k, &notedb);
            metadata.insert("track".into(), json!(track.display().to_string()));
            metadata.insert("min_dwell".into(), num(opts.min_dwell));
            metadata.insert("segments".into(), json!(segments_str));
            metadata.insert("pool".into(), json!(opts.pool.to_string()));
            metadata.insert("window_sec".into(), num(opts.window));
            metadata.insert("min_long_sec".into(), num(opts.min_long));
            metadata.insert(
                "eligibility_floor".into(),
                opts.floor.map(num).unwrap_or(Value::Null),
            );
            metadata.insert(
                "contour_params".into(),
                serde_json::to_value(opts.contour).map_err(|e| Error::invalid(e.to_string()))?,
            );
            let report = pipeline::analyze(&track_data, &database, &opts, metadata)?;
            write_output(out.as_deref(), &to_canonical_json(&report))
        }

        Command::Plotdata {
            report,
            which,
            note,
            out,
        } => {
            let value: Value = serde_json::from_str(&read_to_string(&report)?)
                .map_err(|e| Error::invalid(format!("bad report {}: {e}", report.display())))?;
            let csv = plotdata(&value, &which, note.as_deref())?;
            write_output(out.as_deref(), &csv)
        }
    }
}

fn parse_floats(spec: &str) -> Result<Vec<f64>> {
    spec.split(',')
        .map(|s| {
            s.trim()
                .parse::<f64>()
                .map_err(|_| Error::invalid(format!("bad number '{s}'")))
        })
        .collect()
}

fn section<'v>(value: &'v Value, path: &[&str]) -> Result<&'v Value> {
    let mut current = value;
    for key in path {
        current = current.get(key).ok_or_else(|| {
            Error::invalid(format!(
                "report does not contain section '{}'",
                path.join(".")
            ))
        })?;
    }
    if current.is_null() {
        return Err(Error::invalid(format!(
            "report section '{}' is empty",
            path.join(".")
        )));
    }
    Ok(current)
}

fn fmt_value(v: &Value) -> String {
    match v {
        Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.to_string()
            } else if let Some(u) = n.as_u64() {
                u.to_string()
            } else {
                format_float(n.as_f64().unwrap_or(f64::NAN))
            }
        }
        Value::String(s) => s.clone(),
        other => other.to_string(),
    }
}

/// Extracts one figure's underlying series as CSV.
fn plotdata(report: &Value, which: &str, note: Option<&str>) -> Result<String> {
    let mut out = String::new();
    match which {
        "onsets" => {
            let events = section(report, &["detection", "events"])?
                .as_array()
                .ok_or_else(|| Error::invalid("detection.events is not a list"))?;
            out.push_str("rank,onset_sec\n");
            for (i, e) in events.iter().enumerate() {
                out.push_str(&format!("{},{}\n", i + 1, fmt_value(&e["onset_sec"])));
            }
        }
        "ioi" => {
            let intervals = section(report, &["metrics", "ioi", "intervals"])?
                .as_array()
                .ok_or_else(|| Error::invalid("metrics.ioi.intervals is not a list"))?;
            out.push_str("index,interval_sec\n");
            for (i, v) in intervals.iter().enumerate() {
                out.push_str(&format!("{},{}\n", i + 1, fmt_value(v)));
            }
        }
        "pitch_profile" => {
            let points = section(report, &["metrics", "pitch_profile", "points"])?
                .as_array()
                .ok_or_else(|| Error::invalid("metrics.pitch_profile.points is not a list"))?;
            out.push_str("t_sec,midi_real\n");
            for p in points {
                out.push_str(&format!("{},{}\n", fmt_value(&p[0]), fmt_value(&p[1])));
            }
        }
        "note_frequencies" => {
            let labels = section(report, &["stats", "labels"])?
                .as_array()
                .cloned()
                .ok_or_else(|| Error::invalid("stats.labels is not a list"))?;
            let counts = section(report, &["stats", "overall", "counts"])?
                .as_array()
                .cloned()
                .ok_or_else(|| Error::invalid("stats.overall.counts is not a list"))?;
            let relative = section(report, &["stats", "overall", "relative"])?
                .as_array()
                .cloned()
                .ok_or_else(|| Error::invalid("stats.overall.relative is not a list"))?;
            out.push_str("note,count,relative\n");
            for ((l, c), r) in labels.iter().zip(&counts).zip(&relative) {
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_value(l),
                    fmt_value(c),
                    fmt_value(r)
                ));
            }
        }
        "cumulative" => {
            let windowed = section(report, &["stats", "windowed"])?
                .as_array()
                .ok_or_else(|| Error::invalid("stats.windowed is not a list"))?;
            if windowed.is_empty() {
                return Err(Error::invalid("report has no windowed counts"));
            }
            let wanted: String = match note {
                Some(n) => n.to_string(),
                None => section(report, &["stats", "stability", "vadi_candidate"])?
                    .as_str()
                    .ok_or_else(|| Error::invalid("no vadi candidate; pass --note"))?
                    .to_string(),
            };
            let entry = windowed
                .iter()
                .find(|w| w["label"].as_str() == Some(wanted.as_str()))
                .ok_or_else(|| Error::invalid(format!("no windowed counts for note '{wanted}'")))?;
            let uppers = entry["upper_sec"]
                .as_array()
                .ok_or_else(|| Error::invalid("windowed entry lacks upper_sec"))?;
            let cumulative = entry["cumulative"]
                .as_array()
                .ok_or_else(|| Error::invalid("windowed entry lacks cumulative"))?;
            out.push_str("upper_sec,cumulative\n");
            for (u, c) in uppers.iter().zip(cumulative) {
                out.push_str(&format!("{},{}\n", fmt_value(u), fmt_value(c)));
            }
        }
        "compare_bars" => {
            let labels = section(report, &["comparison", "labels"])?
                .as_array()
                .cloned()
                .ok_or_else(|| Error::invalid("comparison.labels is not a list"))?;
            let a = section(report, &["comparison", "counts_a"])?
                .as_array()
                .cloned()
                .ok_or_else(|| Error::invalid("comparison.counts_a is not a list"))?;
            let b = section(report, &["comparison", "counts_b"])?
                .as_array()
                .cloned()
                .ok_or_else(|| Error::invalid("comparison.counts_b is not a list"))?;
            out.push_str("note,count_a,count_b\n");
            for ((l, ca), cb) in labels.iter().zip(&a).zip(&b) {
                out.push_str(&format!(
                    "{},{},{}\n",
                    fmt_value(l),
                    fmt_value(ca),
                    fmt_value(cb)
                ));
            }
        }
        other => {
            return Err(Error::invalid(format!(
                "unknown series '{other}'; expected onsets, ioi, pitch_profile, note_frequencies, cumulative or compare_bars"
            )));
        }
    }
    Ok(out)
}
