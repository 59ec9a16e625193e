//! Subjective-score fitting, baseline metrics, correlation and clustering.

pub mod bradley_terry;
pub mod correlation;
pub mod kmedoids;
pub mod quality;
pub mod shift;

pub use bradley_terry::{bt_fit, bt_fit_with, bt_log_likelihood, AbilityVector, BtOptions, ComparisonRecord};
pub use correlation::{average_ranks, plcc, srcc};
pub use kmedoids::{kmedoids, pam, Clustering, FeatureMatrix};
pub use quality::{mse, psnr, ssim};
pub use shift::{global_shift_psnr, shift_distribution, ShiftEstimate, ShiftHistogram};
