//! Finite relational structures, ages given by forbidden substructures, and
//! the search procedures used to study their Fraïssé limits.

pub mod age;
mod budget;
mod canon;
pub mod combin;
pub mod derived;
pub mod equivalence;
mod error;
pub mod generic;
pub mod isolation;
pub mod morphism;
mod qftype;
mod signature;
mod structure;

pub use age::{AgeFile, AgeSpec, Convention, ForbiddenReason, Oracle};
pub use budget::{Budget, Meter};
pub use canon::{canonical_form, canonicalize, refine_partition, Canonical, CanonicalForm};
pub use error::{Error, Result};
pub use morphism::{find_embedding, find_injective_homomorphism, MapKind};
pub use qftype::QfType;
pub use signature::{Signature, Symbol};
pub use structure::FinStructure;
