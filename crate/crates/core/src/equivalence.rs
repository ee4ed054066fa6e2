//! Finite search for equivalence relations built from quantifier-free
//! 2-types over parameters.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qftype::QfType;
use crate::structure::FinStructure;

/// Limits on the search.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EquivalenceLimits {
    pub max_params: usize,
    /// Largest number of realized 2-types whose unions are enumerated.
    pub max_types: usize,
}

impl Default for EquivalenceLimits {
    fn default() -> Self {
        EquivalenceLimits { max_params: 2, max_types: 20 }
    }
}

/// A union of 2-types that is an equivalence relation on the realizations
/// examined, with at least two classes and some class of size two or more.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Candidate {
    /// The 2-types over the parameters whose union, with equality, is the
    /// relation.
    pub types: Vec<QfType>,
    /// Its classes on the realizations, as elements of the structure.
    pub classes: Vec<Vec<usize>>,
    /// Always true: the relation is only known to be an equivalence on
    /// this finite structure.
    pub finite_evidence: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub params: Vec<usize>,
    pub realizations: Vec<usize>,
    /// Distinct 2-types of ordered pairs of distinct realizations.
    pub pair_types: Vec<QfType>,
    pub unions_examined: u64,
    pub candidates: Vec<Candidate>,
    pub finite_evidence: bool,
}

/// Enumerates every union of realized 2-types over `params` on the
/// realizations of `p` and keeps the nontrivial equivalence relations.
pub fn search_definable_equivalence(
    s: &FinStructure,
    params: &[usize],
    p: &QfType,
    limits: EquivalenceLimits,
) -> Result<EquivalenceReport> {
    if params.len() > limits.max_params {
        return Err(Error::Input(format!("at most {} parameters are allowed", limits.max_params)));
    }
    for (i, &a) in params.iter().enumerate() {
        if a >= s.size() {
            return Err(Error::OutOfRange { element: a, size: s.size() });
        }
        if params[..i].contains(&a) {
            return Err(Error::Input(format!("parameter {a} repeated")));
        }
    }
    let mut tuple = vec![0];
    tuple.extend_from_slice(params);
    let realizations: Vec<usize> = (0..s.size())
        .filter(|v| !params.contains(v))
        .filter(|&v| {
            tuple[0] = v;
            QfType::of(s, &tuple) == *p
        })
        .collect();
    if realizations.len() < 4 {
        return Err(Error::Input(format!("the type has {} realizations; at least 4 are needed", realizations.len())));
    }
    let r = realizations.len();
    let mut pair = vec![0, 0];
    pair.extend_from_slice(params);
    let mut pair_types: Vec<QfType> = Vec::new();
    // type_of[i * r + j]: index of the 2-type of (realizations[i], realizations[j]).
    let mut raw = vec![usize::MAX; r * r];
    let mut seen: Vec<QfType> = Vec::new();
    for i in 0..r {
        for j in 0..r {
            if i == j {
                continue;
            }
            pair[0] = realizations[i];
            pair[1] = realizations[j];
            let t = QfType::of(s, &pair);
            raw[i * r + j] = match seen.iter().position(|u| *u == t) {
                Some(k) => k,
                None => {
                    seen.push(t);
                    seen.len() - 1
                }
            };
        }
    }
    // Renumber in sorted order so the output does not depend on scan order.
    let mut order: Vec<usize> = (0..seen.len()).collect();
    order.sort_by(|&a, &b| seen[a].cmp(&seen[b]));
    let mut rank = vec![0; seen.len()];
    for (k, &o) in order.iter().enumerate() {
        rank[o] = k;
    }
    pair_types.extend(order.iter().map(|&o| seen[o].clone()));
    let type_of: Vec<usize> = raw.iter().map(|&k| if k == usize::MAX { k } else { rank[k] }).collect();
    let k = pair_types.len();
    if k > limits.max_types {
        return Err(Error::Input(format!("{k} pair types exceed the limit of {}", limits.max_types)));
    }
    let mut candidates = Vec::new();
    let mut unions_examined = 0u64;
    for mask in 0u64..(1u64 << k) {
        unions_examined += 1;
        let related = |i: usize, j: usize| i == j || mask >> type_of[i * r + j] & 1 == 1;
        if let Some(classes) = equivalence_classes(r, &related) {
            let nontrivial = classes.len() >= 2 && classes.iter().any(|c| c.len() >= 2);
            if nontrivial {
                candidates.push(Candidate {
                    types: (0..k).filter(|&t| mask >> t & 1 == 1).map(|t| pair_types[t].clone()).collect(),
                    classes: classes.iter().map(|c| c.iter().map(|&i| realizations[i]).collect()).collect(),
                    finite_evidence: true,
                });
            }
        }
    }
    Ok(EquivalenceReport {
        params: params.to_vec(),
        realizations,
        pair_types,
        unions_examined,
        candidates,
        finite_evidence: true,
    })
}

/// The classes of `related` on `0..n` if it is symmetric and transitive.
fn equivalence_classes(n: usize, related: &impl Fn(usize, usize) -> bool) -> Option<Vec<Vec<usize>>> {
    let mut class_of = vec![usize::MAX; n];
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if related(i, j) != related(j, i) {
                return None;
            }
        }
    }
    for i in 0..n {
        if class_of[i] != usize::MAX {
            continue;
        }
        let members: Vec<usize> = (0..n).filter(|&j| related(i, j)).collect();
        for &m in &members {
            if class_of[m] != usize::MAX {
                return None;
            }
            class_of[m] = classes.len();
        }
        classes.push(members);
    }
    // Each class must be a clique, and no relation may leave it.
    for c in &classes {
        for &a in c {
            for &b in c {
                if !related(a, b) {
                    return None;
                }
            }
        }
    }
    Some(classes)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derived::catalog::graph;

    #[test]
    fn two_cliques_give_a_candidate() {
        let g = graph(6, &[[0, 1], [1, 2], [0, 2], [3, 4], [4, 5], [3, 5]]).unwrap();
        let p = g.qf_type(&[0]).unwrap();
        let rep = search_definable_equivalence(&g, &[], &p, EquivalenceLimits::default()).unwrap();
        assert_eq!(rep.pair_types.len(), 2);
        assert_eq!(rep.candidates.len(), 1);
        assert_eq!(rep.candidates[0].classes, vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn single_pair_type_is_trivial() {
        let g = graph(5, &[]).unwrap();
        let p = g.qf_type(&[0]).unwrap();
        let rep = search_definable_equivalence(&g, &[], &p, EquivalenceLimits::default()).unwrap();
        assert_eq!(rep.pair_types.len(), 1);
        assert!(rep.candidates.is_empty());
        assert!(search_definable_equivalence(&graph(3, &[]).unwrap(), &[], &p, EquivalenceLimits::default()).is_err());
    }

    #[test]
    fn path_is_not_transitive() {
        let g = graph(5, &[[0, 1], [1, 2], [2, 3], [3, 4]]).unwrap();
        let rep =
            search_definable_equivalence(&g, &[], &g.qf_type(&[0]).unwrap(), EquivalenceLimits::default()).unwrap();
        assert!(rep.candidates.is_empty());
    }
}
