//! Seeded generation of symbolic note sequences and their rendering into
//! jittered pitch tracks — the verification oracle for the detection and
//! statistics pipeline.
//!
//! The random source is fixed so fixtures are portable across
//! implementations: a splitmix64 stream (Steele, Lea & Flood 2014)
//! produces 64-bit words; uniform doubles take the top 53 bits; Gaussian
//! deviates use the Box–Muller transform, consuming exactly two words per
//! deviate with no caching. The identifier below names this scheme in
//! sidecar metadata.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::notedetect::{NoteDatabase, NoteLabel, SwarName};
use crate::pitchdata::{PitchSample, PitchTrack};

/// Identifier of the random scheme used by this generator.
pub const GENERATOR_ID: &str = "splitmix64-boxmuller-v1";

/// splitmix64: state advances by the golden-ratio increment, output is the
/// finalized state. Tiny, seedable anywhere, and exactly reproducible.
#[derive(Debug, Clone)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        SplitMix64 { state: seed }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(0x9E37_79B9_7F4A_7C15);
        let mut z = self.state;
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }

    /// Uniform in [0, 1): the top 53 bits scaled by 2^-53.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Standard normal via Box–Muller; consumes two words per call.
    /// u1 is shifted into (0, 1] so the log never sees zero.
    pub fn next_gaussian(&mut self) -> f64 {
        let u1 = ((self.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
        let u2 = self.next_f64();
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    }
}

/// Parameters of the sequence generator and track renderer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorConfig {
    /// Note labels drawn from; probabilities index-align with these.
    pub labels: Vec<NoteLabel>,
    pub probabilities: Vec<f64>,
    /// Additive per-trial probability drift; all zeros = pure multinomial.
    pub drift: Vec<f64>,
    pub stay_duration_mean: f64,
    pub stay_duration_jitter: f64,
    pub glide_duration: f64,
    /// Multiplier on each note's calibration sd for f0 noise.
    pub f0_jitter_scale: f64,
    pub sample_period: f64,
    pub seed: u64,
}

impl GeneratorConfig {
    /// Default configuration over the seven pilu notes, weighted by the
    /// bundled one-minute performance counts.
    pub fn pilu_default(seed: u64) -> Self {
        let names = [
            SwarName::Sa,
            SwarName::SudhRe,
            SwarName::KomalGa,
            SwarName::SudhMa,
            SwarName::Pa,
            SwarName::KomalDha,
            SwarName::SudhNi,
        ];
        let counts = [30.0f64, 22.0, 21.0, 8.0, 11.0, 6.0, 17.0];
        let total: f64 = counts.iter().sum();
        GeneratorConfig {
            labels: names.into_iter().map(NoteLabel::middle).collect(),
            probabilities: counts.iter().map(|c| c / total).collect(),
            drift: vec![0.0; 7],
            stay_duration_mean: 0.4,
            stay_duration_jitter: 0.05,
            glide_duration: 0.05,
            f0_jitter_scale: 1.0,
            sample_period: 0.01,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.labels.is_empty() {
            return Err(Error::invalid("generator needs at least one label"));
        }
        if self.probabilities.len() != self.labels.len() {
            return Err(Error::invalid(format!(
                "{} probabilities for {} labels",
                self.probabilities.len(),
                self.labels.len()
            )));
        }
        if self.drift.len() != self.labels.len() {
            return Err(Error::invalid(format!(
                "{} drift entries for {} labels",
                self.drift.len(),
                self.labels.len()
            )));
        }
        let mut sum = 0.0;
        for &p in &self.probabilities {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::invalid(format!("probability {p} outside [0, 1]")));
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::invalid(format!(
                "probabilities sum to {sum}, expected 1"
            )));
        }
        if !(self.sample_period.is_finite() && self.sample_period > 0.0) {
            return Err(Error::invalid("sample_period must be positive"));
        }
        if !(self.stay_duration_jitter >= 0.0
            && self.stay_duration_mean > self.stay_duration_jitter)
        {
            return Err(Error::invalid(
                "stay duration must satisfy mean > jitter >= 0",
            ));
        }
        if !(self.glide_duration.is_finite() && self.glide_duration >= 0.0) {
            return Err(Error::invalid("glide_duration must be non-negative"));
        }
        if !(self.f0_jitter_scale.is_finite() && self.f0_jitter_scale >= 0.0) {
            return Err(Error::invalid("f0_jitter_scale must be non-negative"));
        }
        Ok(())
    }

    fn drift_is_zero(&self) -> bool {
        self.drift.iter().all(|&d| d == 0.0)
    }
}

/// Draws `n` labels: i.i.d. categorical under zero drift; with drift, the
/// probabilities shift and renormalize after each trial (quasi-multinomial).
pub fn generate_sequence(cfg: &GeneratorConfig, n: usize) -> Result<Vec<NoteLabel>> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed);
    let mut p = cfg.probabilities.clone();
    let mut out = Vec::with_capacity(n);
    let drifting = !cfg.drift_is_zero();
    for trial in 0..n {
        let u = rng.next_f64();
        let mut acc = 0.0;
        let mut idx = p.len() - 1;
        for (i, &pi) in p.iter().enumerate() {
            acc += pi;
            if u < acc {
                idx = i;
                break;
            }
        }
        out.push(cfg.labels[idx]);
        if drifting {
            let mut sum = 0.0;
            for (pi, &di) in p.iter_mut().zip(&cfg.drift) {
                *pi += di;
                if *pi < 0.0 {
                    return Err(Error::invalid(format!(
                        "drift drove a probability negative at trial {trial}"
                    )));
                }
                sum += *pi;
            }
            if sum <= 0.0 {
                return Err(Error::invalid("drift drove all probabilities to zero"));
            }
            for pi in p.iter_mut() {
                *pi /= sum;
            }
        }
    }
    Ok(out)
}

enum TimelinePiece {
    Stay {
        mean: f64,
        sd: f64,
        duration: f64,
    },
    Glide {
        from: f64,
        to: f64,
        duration: f64,
    },
    /// Unvoiced gap separating repeated symbols: a glide between equal
    /// means could not break note continuity.
    Gap {
        duration: f64,
    },
}

/// Renders a symbol sequence into a pitch track.
///
/// Each symbol becomes a stay at its note mean with Gaussian f0 jitter;
/// consecutive stays of different notes are joined by a linear-in-Hz
/// glide, and repeated symbols are separated by an unvoiced gap of the
/// same duration so detection can recover the sequence exactly.
pub fn render_track(
    sequence: &[NoteLabel],
    db: &NoteDatabase,
    cfg: &GeneratorConfig,
) -> Result<PitchTrack> {
    cfg.validate()?;
    let mut rng = SplitMix64::new(cfg.seed.wrapping_add(0x9E37_79B9));
    let mut pieces = Vec::with_capacity(sequence.len() * 2);
    for (i, &label) in sequence.iter().enumerate() {
        let spec = db
            .spec_of(label)
            .ok_or_else(|| Error::invalid(format!("label {label} not in database")))?;
        let jitter = (2.0 * rng.next_f64() - 1.0) * cfg.stay_duration_jitter;
        pieces.push(TimelinePiece::Stay {
            mean: spec.mean_hz,
            sd: spec.sd_hz,
            duration: cfg.stay_duration_mean + jitter,
        });
        if i + 1 < sequence.len() && cfg.glide_duration > 0.0 {
            let next = sequence[i + 1];
            if next == label {
                pieces.push(TimelinePiece::Gap {
                    duration: cfg.glide_duration,
                });
            } else {
                let next_spec = db
                    .spec_of(next)
                    .ok_or_else(|| Error::invalid(format!("label {next} not in database")))?;
                pieces.push(TimelinePiece::Glide {
                    from: spec.mean_hz,
                    to: next_spec.mean_hz,
                    duration: cfg.glide_duration,
                });
            }
        }
    }
    let total: f64 = pieces
        .iter()
        .map(|p| match p {
            TimelinePiece::Stay { duration, .. }
            | TimelinePiece::Glide { duration, .. }
            | TimelinePiece::Gap { duration } => *duration,
        })
        .sum();

    let mut samples = Vec::new();
    let mut piece_idx = 0usize;
    let mut piece_start = 0.0f64;
    let mut j = 0u64;
    loop {
        let t = j as f64 * cfg.sample_period;
        if t >= total || piece_idx >= pieces.len() {
            break;
        }
        // advance to the piece containing t
        loop {
            let duration = match &pieces[piece_idx] {
                TimelinePiece::Stay { duration, .. }
                | TimelinePiece::Glide { duration, .. }
                | TimelinePiece::Gap { duration } => *duration,
            };
            if t < piece_start + duration {
                break;
            }
            piece_start += duration;
            piece_idx += 1;
            if piece_idx >= pieces.len() {
                break;
            }
        }
        if piece_idx >= pieces.len() {
            break;
        }
        let sample = match &pieces[piece_idx] {
            TimelinePiece::Stay { mean, sd, .. } => {
                let noise = rng.next_gaussian() * cfg.f0_jitter_scale * sd;
                PitchSample::voiced(t, (mean + noise).max(f64::MIN_POSITIVE))
            }
            TimelinePiece::Glide { from, to, duration } => {
                let frac = (t - piece_start) / duration;
                PitchSample::voiced(t, from + (to - from) * frac)
            }
            TimelinePiece::Gap { .. } => PitchSample::unvoiced(t),
        };
        samples.push(sample);
        j += 1;
    }
    PitchTrack::new(samples, total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::notedetect::detect_events;

    #[test]
    fn splitmix64_reference_stream() {
        // published test vector for seed 0
        let mut rng = SplitMix64::new(0);
        assert_eq!(rng.next_u64(), 0xE220_A839_7B1D_CDAF);
        assert_eq!(rng.next_u64(), 0x6E78_9E6A_A1B9_65F4);
        assert_eq!(rng.next_u64(), 0x06C4_5D18_8009_454F);

        // frozen values for seed 1
        let mut rng = SplitMix64::new(1);
        assert_eq!(rng.next_u64(), 10451216379200822465);
        assert_eq!(rng.next_u64(), 13757245211066428519);
        assert_eq!(rng.next_u64(), 17911839290282890590);

        let mut rng = SplitMix64::new(1);
        assert!((rng.next_f64() - 0.5665615751722809).abs() < 1e-16);
        assert!((rng.next_f64() - 0.7457817572627011).abs() < 1e-16);

        let mut rng = SplitMix64::new(1);
        assert!((rng.next_gaussian() - (-0.028249746095854695)).abs() < 1e-15);
        assert!((rng.next_gaussian() - (-0.2279195228676347)).abs() < 1e-15);
    }

    #[test]
    fn degenerate_probability_constant_sequence() {
        let mut cfg = GeneratorConfig::pilu_default(3);
        cfg.probabilities = vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let seq = generate_sequence(&cfg, 50).unwrap();
        assert!(seq.iter().all(|&l| l == cfg.labels[0]));
    }

    #[test]
    fn uniform_frequencies_converge() {
        let mut cfg = GeneratorConfig::pilu_default(42);
        cfg.probabilities = vec![1.0 / 7.0; 7];
        let n = 70_000;
        let seq = generate_sequence(&cfg, n).unwrap();
        for label in &cfg.labels {
            let freq = seq.iter().filter(|&&l| l == *label).count() as f64 / n as f64;
            assert!((freq - 1.0 / 7.0).abs() < 0.01, "{label}: {freq}");
        }
    }

    #[test]
    fn zero_drift_equals_pure_multinomial_path() {
        let cfg = GeneratorConfig::pilu_default(7);
        let mut drifted = cfg.clone();
        drifted.drift = vec![0.0; 7];
        assert_eq!(
            generate_sequence(&cfg, 200).unwrap(),
            generate_sequence(&drifted, 200).unwrap()
        );
    }

    #[test]
    fn drift_shifts_frequencies() {
        let mut cfg = GeneratorConfig::pilu_default(5);
        cfg.probabilities = vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0];
        cfg.drift = vec![0.01, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        let seq = generate_sequence(&cfg, 400).unwrap();
        let late = &seq[300..];
        let first_label_share =
            late.iter().filter(|&&l| l == cfg.labels[0]).count() as f64 / late.len() as f64;
        assert!(first_label_share > 0.8, "{first_label_share}");
    }

    #[test]
    fn negative_drift_errors_when_probability_crosses_zero() {
        let mut cfg = GeneratorConfig::pilu_default(5);
        cfg.probabilities = vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0];
        cfg.drift = vec![-0.1, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0];
        assert!(generate_sequence(&cfg, 100).is_err());
    }

    #[test]
    fn determinism_across_runs() {
        let cfg = GeneratorConfig::pilu_default(11);
        let db = NoteDatabase::bundled(6.0).unwrap();
        let seq = generate_sequence(&cfg, 30).unwrap();
        let a = render_track(&seq, &db, &cfg).unwrap();
        let b = render_track(&seq, &db, &cfg).unwrap();
        assert_eq!(a, b);
        assert_ne!(
            generate_sequence(&GeneratorConfig::pilu_default(11), 30).unwrap(),
            generate_sequence(&GeneratorConfig::pilu_default(12), 30).unwrap()
        );
    }

    #[test]
    fn noise_free_single_note_is_constant() {
        let mut cfg = GeneratorConfig::pilu_default(1);
        cfg.f0_jitter_scale = 0.0;
        let db = NoteDatabase::bundled(6.0).unwrap();
        let track = render_track(&[NoteLabel::middle(SwarName::Sa)], &db, &cfg).unwrap();
        assert!(track.samples().len() > 30);
        for (_, f0) in track.voiced() {
            assert_eq!(f0, 243.2661);
        }
    }

    #[test]
    fn glide_joins_different_notes() {
        let mut cfg = GeneratorConfig::pilu_default(2);
        cfg.f0_jitter_scale = 0.0;
        let db = NoteDatabase::bundled(6.0).unwrap();
        let seq = [
            NoteLabel::middle(SwarName::Sa),
            NoteLabel::middle(SwarName::KomalGa),
        ];
        let track = render_track(&seq, &db, &cfg).unwrap();
        // strictly rising between the two stays, no unvoiced samples
        assert!(track.samples().iter().all(|s| s.is_voiced()));
        let freqs: Vec<f64> = track.voiced().map(|(_, f)| f).collect();
        let sa_end = freqs.iter().rposition(|&f| f == 243.2661).unwrap();
        let ga_start = freqs.iter().position(|&f| f == 287.6051).unwrap();
        assert!(sa_end < ga_start);
        for w in freqs[sa_end..=ga_start].windows(2) {
            assert!(w[1] >= w[0]);
        }
    }

    #[test]
    fn repeated_symbols_get_unvoiced_gap() {
        let mut cfg = GeneratorConfig::pilu_default(2);
        cfg.f0_jitter_scale = 0.0;
        let db = NoteDatabase::bundled(6.0).unwrap();
        let sa = NoteLabel::middle(SwarName::Sa);
        let track = render_track(&[sa, sa], &db, &cfg).unwrap();
        assert!(track.samples().iter().any(|s| !s.is_voiced()));
        let det = detect_events(&track, &db, 0.1).unwrap();
        assert_eq!(det.events.len(), 2);
    }

    #[test]
    fn round_trip_recovers_sequence() {
        let db = NoteDatabase::bundled(6.0).unwrap();
        for seed in 1..=10 {
            let cfg = GeneratorConfig::pilu_default(seed);
            let seq = generate_sequence(&cfg, 60).unwrap();
            let track = render_track(&seq, &db, &cfg).unwrap();
            let det = detect_events(&track, &db, 0.1).unwrap();
            let detected: Vec<NoteLabel> = det.events.iter().map(|e| e.label).collect();
            assert_eq!(detected, seq, "seed {seed}");
        }
    }
}
