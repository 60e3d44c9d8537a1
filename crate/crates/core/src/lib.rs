//! Statistical analysis of monophonic raga performances from pre-extracted
//! pitch tracks.
//!
//! The pipeline runs in four stages:
//!
//! 1. [`pitchdata`] parses `(time, f0)` tracks and converts frequency into
//!    a logarithmic pitch space.
//! 2. [`notedetect`] holds per-note `(mean, sd)` calibrations, forms
//!    Chebyshev confidence bands, and segments a track into note events
//!    and glides.
//! 3. [`rastats`] models the note sequence: frequency tables over time
//!    segments, chi-square goodness of fit with class pooling, the run
//!    test for randomness, multinomial moments, windowed counts,
//!    polynomial fits, and vadi/samvadi ranking by relative-frequency
//!    stability.
//! 4. [`contour`] classifies the pitch movement between stays into the
//!    ornament taxonomy (rising/falling/mixed transitions, hats and
//!    valleys) and measures onset rhythm.
//!
//! [`synth`] closes the loop: a seeded generator produces note sequences
//! and renders them into jittered tracks, so every stage can be verified
//! round-trip against known ground truth.

pub mod contour;
pub mod error;
pub mod notedetect;
pub mod pitchdata;
pub mod rastats;
pub mod report;
pub mod synth;

pub use contour::{ContourKind, ContourParams, ContourSegment, ContourSummary, IOIReport};
pub use error::{Error, Result};
pub use notedetect::{
    Detection, NoteDatabase, NoteEvent, NoteLabel, NoteSpec, SwarName, DEFAULT_K,
};
pub use pitchdata::{PitchSample, PitchTrack, PitchValue};
pub use rastats::{
    ChiSquareResult, FrequencyTable, MultinomialModel, PoolingSpec, RunTestResult, SegmentSpec,
    StabilityReport, WindowedCounts,
};
pub use synth::GeneratorConfig;
