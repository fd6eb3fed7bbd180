//! Deterministic animat simulation driven by behavioural columns action
//! selection.

pub mod animat;
pub mod beca;
pub mod geometry;
pub mod world;
