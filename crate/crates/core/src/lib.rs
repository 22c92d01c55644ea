//! Computational toolkit for additive combinatorics on finite abelian groups:
//! Fourier analysis, additive energies, spectra and Bohr sets, dense models
//! and counting of linear-equation solutions, with exact verifiers for the
//! inequalities relating them.

pub mod counting;
pub mod dense_model;
pub mod energy;
pub mod error;
pub mod functions;
pub mod groups;
pub mod report;
pub mod rng;
pub mod sets;
pub mod spectral;

pub use error::{Error, Result, Witness};
pub use functions::{Dfn, IntFn, Method, Tag};
pub use groups::{FieldCtx, GElem, GroupCtx, GroupKind};
pub use report::{Num, Status, VerificationReport};
pub use sets::SetA;
