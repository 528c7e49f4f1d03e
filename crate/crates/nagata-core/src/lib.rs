//! Word metrics on lattices, left-invariant metrics on nilpotent Lie groups,
//! subgroup distortion, and explicit covers certifying linear control of
//! Assouad-Nagata type.

pub mod catalog;
pub mod cover_engine;
pub mod group_models;
pub mod lie_algebra;
pub mod metric_lab;
