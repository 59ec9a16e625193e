//! Full-reference quality assessment for super-resolution output.
//!
//! The central metric ([`metric::erqa_score`]) measures how faithfully fine
//! detail is restored by matching gradient directions between a reference
//! and a restored frame under a ranked set of small global shifts. The
//! surrounding modules generate degraded inputs, compute PSNR/SSIM
//! baselines, fit Bradley-Terry scores from pairwise votes, correlate
//! metrics with subjective scores and pick representative methods by
//! k-medoids clustering.

pub mod cli;
pub mod degrade;
pub mod error;
pub mod frame;
pub mod gradients;
pub mod metric;
pub mod stats;

pub use error::{Error, Result};
pub use frame::{load_frame, load_sequence, save_frame, to_luma, Frame, FrameSequence};
pub use gradients::{compute_gradients, cosine_match, percentile_filter, GradientConfig, GradientField};
pub use metric::{erqa_score, erqa_sequence, ErqaConfig, ErqaScore, MatchMasks, Shift};
