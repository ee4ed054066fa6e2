//! Randomness of an age from its constraints, and the finitely checkable
//! hypotheses of the free-amalgamation and irreducible-constraint facts.

use serde::{Deserialize, Serialize};

use crate::morphism::{MapKind, Pattern};
use crate::signature::Signature;
use crate::structure::FinStructure;

/// The arity level a constraint belongs to: the largest arity among the
/// symbols it uses, or the smallest arity of the signature if it uses none.
pub fn constraint_level(c: &FinStructure) -> usize {
    let sig = c.signature();
    (0..sig.len())
        .filter(|&i| c.tuple_count(i) > 0)
        .map(|i| sig.symbol(i).arity)
        .max()
        .unwrap_or_else(|| sig.arities().first().copied().unwrap_or(0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RandomnessReport {
    pub random: bool,
    /// Indices of constraints larger than their level.
    pub oversized: Vec<usize>,
    /// Set when the signature mixes arities: each level is judged from the
    /// constraints of the full age, not from constraints of its reducts.
    pub mixed_arity_caveat: bool,
}

/// Whether the constraints (assumed complete up to the relevant sizes)
/// describe a random age: every constraint has at most as many elements
/// as its level.
pub fn is_random_age(constraints: &[FinStructure], signature: &Signature) -> RandomnessReport {
    let oversized: Vec<usize> =
        constraints.iter().enumerate().filter(|(_, c)| c.size() > constraint_level(c)).map(|(i, _)| i).collect();
    RandomnessReport { random: oversized.is_empty(), oversized, mixed_arity_caveat: signature.arities().len() > 1 }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Hypothesis {
    /// Every member 2-irreducible.
    PairIrreducible,
    /// Every member 3-irreducible; no injective homomorphism between two
    /// different members.
    TripleIrreducibleHomomorphism,
    /// Every member 3-irreducible; no embedding between two different
    /// members.
    TripleIrreducibleEmbedding,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "violation", rename_all = "kebab-case")]
pub enum Violation {
    /// Member `member` has the elements `uncovered` in no common relationship.
    NotIrreducible { member: usize, k: usize, uncovered: Vec<usize> },
    /// Member `from` maps into member `to` by `map`.
    MapsInto { from: usize, to: usize, kind: MapKind, map: Vec<usize> },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct HypothesisReport {
    pub hypothesis: Hypothesis,
    pub passed: bool,
    pub violations: Vec<Violation>,
}

/// Checks `hypothesis` on the member list, reporting every violation.
/// Members over different signatures are never related by a map.
pub fn check_fact_hypotheses(members: &[FinStructure], hypothesis: Hypothesis) -> HypothesisReport {
    let (k, kind) = match hypothesis {
        Hypothesis::PairIrreducible => (2, None),
        Hypothesis::TripleIrreducibleHomomorphism => (3, Some(MapKind::InjectiveHomomorphism)),
        Hypothesis::TripleIrreducibleEmbedding => (3, Some(MapKind::Embedding)),
    };
    let mut violations = Vec::new();
    for (member, f) in members.iter().enumerate() {
        if let Some(uncovered) = f.first_uncovered(k) {
            violations.push(Violation::NotIrreducible { member, k, uncovered });
        }
    }
    if let Some(kind) = kind {
        for (from, a) in members.iter().enumerate() {
            let pattern = Pattern::new(a, kind);
            for (to, b) in members.iter().enumerate() {
                if from == to || a.signature() != b.signature() {
                    continue;
                }
                if let Some(map) = pattern.find(b) {
                    violations.push(Violation::MapsInto { from, to, kind, map });
                }
            }
        }
    }
    HypothesisReport { hypothesis, passed: violations.is_empty(), violations }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derived::catalog::{build_h_n, catalog, graph, CatalogName};

    #[test]
    fn randomness_examples() {
        assert!(is_random_age(&[], &Signature::graph()).random);
        let k4 = is_random_age(&[catalog(CatalogName::K4)], &Signature::hypergraph());
        assert!(!k4.random);
        assert_eq!(k4.oversized, vec![0]);
        let pair = graph(2, &[]).unwrap();
        assert!(is_random_age(&[pair], &Signature::graph()).random);
        let triangle = graph(3, &[[0, 1], [1, 2], [0, 2]]).unwrap();
        assert!(!is_random_age(&[triangle], &Signature::graph()).random);
    }

    #[test]
    fn hypothesis_examples() {
        assert!(check_fact_hypotheses(&[catalog(CatalogName::K4)], Hypothesis::PairIrreducible).passed);
        let r = check_fact_hypotheses(
            &[catalog(CatalogName::K4Minus), catalog(CatalogName::K4)],
            Hypothesis::TripleIrreducibleHomomorphism,
        );
        assert!(!r.passed);
        assert!(r.violations.contains(&Violation::NotIrreducible { member: 0, k: 3, uncovered: vec![0, 1, 2] }));
        let hs: Vec<_> = (3..=6).map(|n| build_h_n(n).unwrap()).collect();
        assert!(check_fact_hypotheses(&hs, Hypothesis::TripleIrreducibleEmbedding).passed);
        // Mapping the smaller into the nonzero elements of the larger is an
        // injective homomorphism: every triple avoiding 0 is a relationship.
        let homomorphism_form = check_fact_hypotheses(&hs, Hypothesis::TripleIrreducibleHomomorphism);
        assert!(homomorphism_form.violations.iter().any(|v| matches!(v, Violation::MapsInto { from: 0, to: 1, .. })));
    }
}
