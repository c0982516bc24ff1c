#![no_std]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod complex;
pub mod error;
pub mod field;
pub mod homology;
pub mod splitter;
pub mod surgery;

pub use complex::{CellId, CellRecord, CellTable, Complex, Tag};
pub use error::{Error, Result};
pub use field::{GradientPath, MorseCounts, MorseFunction, VectorField};
pub use homology::BettiVector;
