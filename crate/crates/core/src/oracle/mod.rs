//! Brute-force ground truth at tiny blocklengths: canonical encoders,
//! Neyman-Pearson decoders, best weighted objectives and the converse audit.

mod enumerate;
mod frontier;
mod search;

pub use enumerate::{canonical_encoders, raw_encoder_count, rgs, sample_encoders, EncoderPair, ENCODER_LIMIT};
pub use frontier::{
    best_under, cell_laws, lrt_candidates, lrt_frontier, np_frontier, test_errors, CellLaws, Frontier, OracleSource, TestPoint,
    MAX_TIE_GROUP,
};
pub use search::{
    exhaustive_search, AuditScope, AuditSummary, EncoderMode, FailureRecord, SearchOptions, SearchResult, FULL_DECODER_CELLS,
};
