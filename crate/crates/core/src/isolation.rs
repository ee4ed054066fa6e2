//! Neighbours of a structure at a triple, and the isolation classes of
//! constraints.

use serde::{Deserialize, Serialize};

use crate::age::{AgeSpec, Convention, Layout};
use crate::combin::for_each_subset;
use crate::error::{Error, Result};
use crate::structure::FinStructure;

/// Every structure that differs from `c` at most on tuples whose entries
/// include all of `triple`, including `c` itself. Reassignments follow
/// the convention's options on the triple.
pub fn enumerate_neighbours(c: &FinStructure, triple: [usize; 3], convention: Convention) -> Result<Vec<FinStructure>> {
    let sig = c.signature();
    if sig.max_arity() > 3 {
        return Err(Error::Input("neighbours are defined here for signatures of arity at most 3".into()));
    }
    if !Layout::supports(sig, convention) {
        return Err(Error::Input(format!("convention {convention:?} does not fit the signature")));
    }
    for (i, &v) in triple.iter().enumerate() {
        if v >= c.size() {
            return Err(Error::OutOfRange { element: v, size: c.size() });
        }
        if triple[..i].contains(&v) {
            return Err(Error::Input(format!("element {v} repeated in the triple")));
        }
    }
    if !sig.arities().contains(&3) {
        return Ok(vec![c.clone()]);
    }
    let layout = Layout::new(sig, convention);
    let mut set = triple.to_vec();
    set.sort_unstable();
    Ok((0..layout.option_count(3))
        .map(|opt| {
            let mut n = c.clone();
            layout.apply(&mut n, &set, opt);
            n
        })
        .collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Isolation {
    /// At every triple, every other neighbour is permitted.
    Isolated,
    /// At every triple, some neighbour is permitted.
    WeaklyIsolated,
    NotWeaklyIsolated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleVerdict {
    pub triple: [usize; 3],
    /// Neighbours other than the constraint itself.
    pub neighbours: usize,
    pub permitted: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IsolationReport {
    pub class: Isolation,
    pub triples: Vec<TripleVerdict>,
    /// A triple at which every neighbour is forbidden.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<[usize; 3]>,
}

/// Classifies the constraint `c` of `age`. Triples are unordered, since
/// reordering a triple does not change its neighbours; `c` itself is
/// forbidden and is not counted among its own neighbours.
pub fn is_weakly_isolated(c: &FinStructure, age: &AgeSpec) -> Result<IsolationReport> {
    if age.is_permitted(c)? {
        return Err(Error::Input("structure is permitted, so it is not a constraint".into()));
    }
    if c.size() < 3 {
        return Err(Error::Input("isolation needs at least three elements".into()));
    }
    let mut triples = Vec::new();
    let mut err = None;
    for_each_subset(c.size(), 3, |t| {
        let triple = [t[0], t[1], t[2]];
        match enumerate_neighbours(c, triple, age.convention()) {
            Ok(ns) => {
                let others: Vec<&FinStructure> = ns.iter().filter(|n| *n != c).collect();
                let permitted = others.iter().filter(|n| age.why_forbidden(n).is_none()).count();
                triples.push(TripleVerdict { triple, neighbours: others.len(), permitted });
                true
            }
            Err(e) => {
                err = Some(e);
                false
            }
        }
    });
    if let Some(e) = err {
        return Err(e);
    }
    let witness = triples.iter().find(|t| t.permitted == 0).map(|t| t.triple);
    let class = if witness.is_some() {
        Isolation::NotWeaklyIsolated
    } else if triples.iter().all(|t| t.permitted == t.neighbours) {
        Isolation::Isolated
    } else {
        Isolation::WeaklyIsolated
    };
    Ok(IsolationReport { class, triples, witness })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derived::catalog::{catalog, hypergraph, CatalogName};
    use crate::morphism::MapKind;
    use crate::signature::Signature;

    #[test]
    fn neighbour_counts() {
        let c1 = catalog(CatalogName::C1);
        let ns = enumerate_neighbours(&c1, [0, 1, 2], Convention::Free).unwrap();
        assert_eq!(ns.len(), 2);
        assert!(ns.contains(&c1));
        assert!(ns.contains(&hypergraph(4, &[]).unwrap()));
        assert_eq!(enumerate_neighbours(&hypergraph(3, &[]).unwrap(), [2, 0, 1], Convention::Free).unwrap().len(), 2);
        assert!(enumerate_neighbours(&c1, [0, 0, 1], Convention::Free).is_err());
    }

    #[test]
    fn catalog_constraints_are_isolated() {
        let sig = Signature::hypergraph();
        let c = AgeSpec::new(sig.clone(), vec![catalog(CatalogName::C1), catalog(CatalogName::C3)], MapKind::Embedding)
            .unwrap();
        assert_eq!(is_weakly_isolated(&catalog(CatalogName::C1), &c).unwrap().class, Isolation::Isolated);
        assert_eq!(is_weakly_isolated(&catalog(CatalogName::C3), &c).unwrap().class, Isolation::Isolated);
        let k = AgeSpec::new(sig, vec![catalog(CatalogName::K4)], MapKind::Embedding).unwrap();
        assert_eq!(is_weakly_isolated(&catalog(CatalogName::K4), &k).unwrap().class, Isolation::Isolated);
        assert!(is_weakly_isolated(&catalog(CatalogName::K4Minus), &k).is_err());
    }
}
