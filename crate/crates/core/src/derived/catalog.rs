use std::sync::Arc;

use crate::combin::for_each_subset;
use crate::error::{Error, Result};
use crate::signature::Signature;
use crate::structure::FinStructure;

/// The named 4-vertex 3-hypergraphs.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum CatalogName {
    /// One hyperedge.
    C1,
    /// Three hyperedges.
    C3,
    /// All four hyperedges.
    K4,
    /// Four vertices, one hyperedge removed from the complete one.
    K4Minus,
}

impl std::str::FromStr for CatalogName {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "c1" => Ok(CatalogName::C1),
            "c3" => Ok(CatalogName::C3),
            "k4" => Ok(CatalogName::K4),
            "k4_minus" | "k4minus" => Ok(CatalogName::K4Minus),
            _ => Err(Error::Input(format!("unknown catalog structure {s}"))),
        }
    }
}

/// A 3-hypergraph on `n` vertices with the given hyperedges.
pub fn hypergraph(n: usize, edges: &[[usize; 3]]) -> Result<FinStructure> {
    FinStructure::from_relations(Signature::hypergraph(), n, [("R", edges.iter().map(|e| e.to_vec()).collect())])
}

pub fn catalog(name: CatalogName) -> FinStructure {
    let edges: &[[usize; 3]] = match name {
        CatalogName::C1 => &[[0, 1, 2]],
        CatalogName::C3 => &[[0, 1, 2], [0, 1, 3], [0, 2, 3]],
        CatalogName::K4 => &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]],
        CatalogName::K4Minus => &[[0, 1, 3], [0, 2, 3], [1, 2, 3]],
    };
    hypergraph(4, edges).expect("catalog structures are valid")
}

/// The complete 3-hypergraph on `n` vertices.
pub fn complete_hypergraph(n: usize) -> FinStructure {
    let mut s = FinStructure::new(Signature::hypergraph(), n).expect("fits");
    for_each_subset(n, 3, |t| {
        s.put_all_orders(0, t, true);
        true
    });
    s
}

/// Ternary signature with one non-symmetric symbol `R`.
pub fn ternary_signature() -> Signature {
    Signature::single("R", 3, false)
}

/// The structure on `{0, .., n}` where `R` holds on every ordered triple
/// of distinct elements except `(0, b, b + 1)` for `0 < b < n` and
/// `(0, n, 1)`.
pub fn build_h_n(n: usize) -> Result<FinStructure> {
    if n < 3 {
        return Err(Error::Construction(format!("H_n needs n >= 3, got {n}")));
    }
    let mut s = FinStructure::new(ternary_signature(), n + 1)?;
    for a in 0..=n {
        for b in 0..=n {
            for c in 0..=n {
                if a == b || b == c || a == c {
                    continue;
                }
                let missing = a == 0 && ((b < n && c == b + 1) || (b == n && c == 1));
                if !missing {
                    s.put(0, &[a, b, c], true);
                }
            }
        }
    }
    Ok(s)
}

/// The 3-hypergraph whose hyperedges are the triples spanning an odd
/// number of edges of the simple graph `g`.
pub fn build_parity_hypergraph(g: &FinStructure) -> Result<FinStructure> {
    let sig = g.signature();
    if sig.len() != 1 || sig.symbol(0).arity != 2 || !sig.symbol(0).symmetric {
        return Err(Error::Input("parity hypergraph needs a graph over one symmetric binary symbol".into()));
    }
    Ok(parity_of(g, Arc::new(Signature::hypergraph())))
}

pub(crate) fn parity_of(g: &FinStructure, hsig: Arc<Signature>) -> FinStructure {
    let n = g.size();
    let mut h = FinStructure::new(hsig, n).expect("fits");
    for_each_subset(n, 3, |t| {
        let e = g.holds(0, &[t[0], t[1]]) as u8 + g.holds(0, &[t[0], t[2]]) as u8 + g.holds(0, &[t[1], t[2]]) as u8;
        if e % 2 == 1 {
            h.put_all_orders(0, t, true);
        }
        true
    });
    h
}

/// A simple graph on `n` vertices with the given edges.
pub fn graph(n: usize, edges: &[[usize; 2]]) -> Result<FinStructure> {
    FinStructure::from_relations(Signature::graph(), n, [("E", edges.iter().map(|e| e.to_vec()).collect())])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_form;

    #[test]
    fn h3_non_relations() {
        let h = build_h_n(3).unwrap();
        let mut missing = Vec::new();
        crate::combin::for_each_injective(4, 3, |t| {
            if !h.holds(0, t) {
                missing.push(t.to_vec());
            }
            true
        });
        assert_eq!(missing, vec![vec![0, 1, 2], vec![0, 2, 3], vec![0, 3, 1]]);
        assert!(build_h_n(2).is_err());
        assert!(!h.is_symmetric());
    }

    #[test]
    fn catalog_counts() {
        assert_eq!(catalog(CatalogName::C1).representatives(0).len(), 1);
        assert_eq!(catalog(CatalogName::K4).representatives(0).len(), 4);
        assert_eq!(canonical_form(&catalog(CatalogName::K4Minus)), canonical_form(&catalog(CatalogName::C3)));
        assert_eq!(complete_hypergraph(4), catalog(CatalogName::K4));
        assert_eq!("k4-minus".parse::<CatalogName>().unwrap(), CatalogName::K4Minus);
    }

    #[test]
    fn parity_examples() {
        let k = graph(4, &[[0, 1], [0, 2], [0, 3], [1, 2], [1, 3], [2, 3]]).unwrap();
        assert_eq!(build_parity_hypergraph(&k).unwrap(), catalog(CatalogName::K4));
        let one = graph(3, &[[0, 1]]).unwrap();
        assert_eq!(build_parity_hypergraph(&one).unwrap(), hypergraph(3, &[[0, 1, 2]]).unwrap());
        assert!(build_parity_hypergraph(&catalog(CatalogName::C1)).is_err());
    }
}
