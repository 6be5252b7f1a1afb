//! Perfect complexes over the local rings `Z/p²` and `F_p[X]/(X²)`:
//! minimal models, interval decompositions, and the cellular and acyclic
//! orders on them.

pub mod complex;
pub mod error;
pub mod format;
pub mod lattice;
pub mod linalg;
pub mod ops;
pub mod oracle;
pub mod random;
pub mod reduce;
pub mod ring;

pub use complex::{ChainComplex, ModuleDescriptor};
pub use error::{Error, Result};
pub use lattice::{is_acyclic_over, is_cellular, min_pair, Verdict};
pub use linalg::Matrix;
pub use ops::ChainMap;
pub use reduce::{decompose, minimize, Decomposition, Interval};
pub use ring::{CoeffRing, Field, Flavor, Residue, ResidueField, RingElement, RingSpec};

/// Matrices over the local ring `R`.
pub type MatrixR = Matrix<RingSpec>;
/// Matrices over the residue field `k`.
pub type MatrixK = Matrix<ResidueField>;
