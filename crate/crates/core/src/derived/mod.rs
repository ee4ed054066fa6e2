//! Example structures and structure-transforming constructions.

pub mod catalog;
pub mod mp;
pub mod tournament;
