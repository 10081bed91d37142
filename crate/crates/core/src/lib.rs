//! Laminate failure analysis and ply-orientation sabotage search.
//!
//! The crate is organised bottom-up:
//!
//! - [`clt`] and [`tsai_wu`]: classical laminate theory and the Tsai-Wu strength ratio;
//! - [`failure`]: progressive ply-failure ladders;
//! - [`attack`]: greedy orientation searches that lower the first-ply failure force;
//! - [`detect`]: stiffness and resonance-frequency shift of a modified laminate;
//! - [`design`], [`report`], [`units`]: design files, run reports and CSV export.

pub mod attack;
pub mod clt;
pub mod design;
pub mod detect;
pub mod error;
pub mod failure;
pub mod laminate;
pub mod material;
pub mod report;
pub mod tsai_wu;
pub mod units;

pub use error::{LaminateError, Result};
pub use laminate::{normalize_angle, ply_z_planes, Laminate, LoadCase, Ply};
pub use material::MaterialProperties;
