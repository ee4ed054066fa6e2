//! Fixtures shared by the search benchmarks.

use fraisse_core::derived::catalog::{catalog, CatalogName};
use fraisse_core::derived::tournament::{random_tournament, tournament_reduct};
use fraisse_core::generic::{grow_generic, DEFAULT_DEMAND_BOUND};
use fraisse_core::{AgeSpec, FinStructure, MapKind, Signature};

/// Hypergraphs with no four vertices spanning all four hyperedges.
pub fn k4_free_age() -> AgeSpec {
    AgeSpec::new(Signature::hypergraph(), vec![catalog(CatalogName::K4)], MapKind::Embedding).expect("valid age")
}

/// Hypergraphs in which every four vertices span an even number of hyperedges.
pub fn parity_age() -> AgeSpec {
    AgeSpec::new(Signature::hypergraph(), vec![catalog(CatalogName::C1), catalog(CatalogName::C3)], MapKind::Embedding)
        .expect("valid age")
}

/// A generic approximation of the K4-free age with `steps` elements.
pub fn k4_free_approximation(steps: usize, seed: u64) -> FinStructure {
    grow_generic(&k4_free_age(), steps, seed, DEFAULT_DEMAND_BOUND).expect("K4-free growth never stalls").structure
}

/// The reversal-class reduct of a random tournament on `n` vertices.
pub fn random_reduct(n: usize, seed: u64) -> FinStructure {
    tournament_reduct(&random_tournament(n, seed)).expect("tournaments have reducts")
}
