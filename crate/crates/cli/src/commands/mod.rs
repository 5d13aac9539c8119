pub mod ablate;
pub mod degrade;
pub mod eval;
pub mod infer;
pub mod params;
pub mod train;
