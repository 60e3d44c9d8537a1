//! Benchmark helpers: canned inputs shared by the criterion targets.

use ragalab_core::notedetect::NoteDatabase;
use ragalab_core::pitchdata::PitchTrack;
use ragalab_core::synth::{generate_sequence, render_track, GeneratorConfig};

/// A deterministic one-minute-scale performance for benchmarking.
pub fn benchmark_track(seed: u64, notes: usize) -> (PitchTrack, NoteDatabase) {
    let db = NoteDatabase::bundled(6.0).expect("bundled database is valid");
    let cfg = GeneratorConfig::pilu_default(seed);
    let sequence = generate_sequence(&cfg, notes).expect("valid config");
    let track = render_track(&sequence, &db, &cfg).expect("render succeeds");
    (track, db)
}
