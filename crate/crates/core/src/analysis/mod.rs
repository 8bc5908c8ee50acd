//! Reading a portrait: fiber labelings, stratified Euler characteristic,
//! cusp parity and Morse data of linear height functions.

mod chi;
mod labeling;
mod morse;
pub mod report;

use thiserror::Error;

pub use chi::{stratified_chi, thom_parity, ThomVerdict};
pub use labeling::{enumerate_labelings, propagate, Enumeration, Labeling, Provenance, DEFAULT_ENUMERATION_CAP};
pub use morse::{levine_morse_data, MorseDatum};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalysisError {
    #[error("operation needs a surface portrait (dim=2), got dim={0}")]
    NotSurface(u32),
    #[error("portrait is invalid: {0}")]
    Invalid(String),
    #[error("missing label on {0}")]
    MissingLabel(String),
    #[error("inconsistent labels around faces {}: {reason}", faces.join(" -> "))]
    Contradiction { faces: Vec<String>, reason: String },
    #[error("negative fiber count {count} on face {face}")]
    NegativeCount { face: String, count: i64 },
    #[error("labels do not determine face {face} (candidates {candidates:?})")]
    Underdetermined { face: String, candidates: Vec<i64> },
    #[error("portrait has no geometry on {0}")]
    MissingGeometry(String),
    #[error("direction is not generic at {element}: {detail}")]
    DegenerateDirection { element: String, detail: String },
}
