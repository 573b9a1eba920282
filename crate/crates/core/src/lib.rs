//! Frames, g-frames and operator frames in Hilbert modules over finite-dimensional C*-algebras.
//!
//! Algebras are full matrix algebras `M_n` or diagonal algebras `D_n`; modules are the standard
//! modules `A^m`. Every frame inequality is decided on exact finite-dimensional data, either
//! spectrally (verdict `Proved` or `Falsified`) or by seeded sampling (`SampledPass`).

pub mod algebra;
pub mod catalog;
pub mod error;
pub mod frames;
pub mod gframes;
pub mod linalg;
pub mod module;
pub mod operators;
pub mod opframes;
pub mod properties;
pub mod random;
pub mod transport;

pub use algebra::{AlgebraDescriptor, AlgebraElement, AlgebraKind, Tolerance};
pub use error::{Error, Result};
pub use linalg::C64;
pub use module::{ModuleDescriptor, ModuleElement};
pub use operators::{AdjointableOp, ScalarRep};
