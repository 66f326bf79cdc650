pub mod adaptivity;
pub mod harness;
pub mod interpolation;
pub mod mesh;
pub mod sbp_core;
pub mod semidiscrete;
pub mod sparse;
pub mod stability;
pub mod timestepping;
