//! Frequency analysis, hypothesis tests, multinomial modeling, polynomial
//! fitting, and note-importance ranking for detected note sequences.

mod chisquare;
mod freq;
mod gamma;
mod multinomial;
mod polyfit;
mod pool;
mod runtest;
mod stability;

pub use chisquare::{chi_square_gof, chi_square_pvalue, ChiSquareResult};
pub use freq::{
    compare_tables, count_notes, expected_counts, relative, windowed_counts, FrequencyTable,
    SegmentSpec, TableComparison, WindowedCounts,
};
pub use multinomial::{
    compositions, multinomial_moments, multinomial_pmf, MultinomialModel, MultinomialMoments,
};
pub use polyfit::{polyfit, PolyFit};
pub use pool::{auto_pool, PoolingSpec};
pub use runtest::{count_runs, run_test, RunTestResult, TiePolicy};
pub use stability::{stability_report, NoteStability, StabilityReport};
