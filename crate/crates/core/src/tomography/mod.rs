//! Density-matrix reconstruction from homodyne data.

pub mod density;
pub mod oracle;
pub mod pattern;
pub mod reconstruct;
pub mod wavefunction;

pub use density::{DensityMatrix, ReconstructionMeta};
pub use oracle::{forward_map_fit, forward_map_oracle};
pub use pattern::{pattern_function, pattern_functions_at, PatternTable, MAX_PATTERN_MODES};
pub use reconstruct::{reconstruct, reconstruct_direct, synthetic_dataset};
pub use wavefunction::{irregular_wavefunction, regular_wavefunction};
