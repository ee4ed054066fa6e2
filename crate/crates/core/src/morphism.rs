//! Backtracking search for embeddings and injective homomorphisms.

use serde::{Deserialize, Serialize};

use crate::combin::{for_each_injective, for_each_subset};
use crate::error::{Error, Result};
use crate::structure::FinStructure;

/// Which maps count as copies of one structure inside another.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MapKind {
    /// Injective, preserving relations and non-relations.
    Embedding,
    /// Injective, preserving relations only.
    InjectiveHomomorphism,
}

#[derive(Clone, Debug)]
struct Check {
    sym: usize,
    depths: Vec<usize>,
    want: bool,
}

/// A compiled search plan for mapping one pattern structure into targets.
///
/// Pattern elements are placed in `order`; at depth `d` every atom whose
/// entries lie among the first `d + 1` placed elements and include the
/// `d`-th one is checked against the target.
#[derive(Clone, Debug)]
pub struct Pattern {
    kind: MapKind,
    order: Vec<usize>,
    checks: Vec<Vec<Check>>,
}

impl Pattern {
    pub fn new(a: &FinStructure, kind: MapKind) -> Self {
        Self::with_order(a, kind, (0..a.size()).collect())
    }

    /// A plan that places pattern elements in the given order. `order`
    /// must be a permutation of the pattern's elements.
    pub fn with_order(a: &FinStructure, kind: MapKind, order: Vec<usize>) -> Self {
        let mut checks = vec![Vec::new(); order.len()];
        let mut buf = Vec::new();
        for (sym, symbol) in a.signature().symbols().iter().enumerate() {
            let r = symbol.arity;
            for (d, slot) in checks.iter_mut().enumerate() {
                let mut push = |depths: &[usize]| {
                    buf.clear();
                    buf.extend(depths.iter().map(|&i| order[i]));
                    let want = a.holds(sym, &buf);
                    if want || kind == MapKind::Embedding {
                        slot.push(Check { sym, depths: depths.to_vec(), want });
                    }
                };
                if symbol.symmetric {
                    for_each_subset(d, r - 1, |idx| {
                        let mut t = idx.to_vec();
                        t.push(d);
                        push(&t);
                        true
                    });
                } else {
                    for p in 0..r {
                        for_each_injective(d, r - 1, |idx| {
                            let mut t = idx.to_vec();
                            t.insert(p, d);
                            push(&t);
                            true
                        });
                    }
                }
            }
        }
        Pattern { kind, order, checks }
    }

    pub fn kind(&self) -> MapKind {
        self.kind
    }

    pub fn size(&self) -> usize {
        self.order.len()
    }

    /// Enumerates maps into `target`. The first `fixed.len()` elements of
    /// the placement order are sent to `fixed`; the others only to elements
    /// with `allowed[v]` set (all elements when `allowed` is `None`). Each
    /// map is passed to `f`, indexed by pattern element; the search stops
    /// when `f` returns `false`. Returns `true` if it was stopped.
    pub fn search(
        &self,
        target: &FinStructure,
        allowed: Option<&[bool]>,
        fixed: &[usize],
        mut f: impl FnMut(&[usize]) -> bool,
    ) -> bool {
        let m = self.order.len();
        let n = target.size();
        if m > n || fixed.len() > m {
            return false;
        }
        let mut used = vec![false; n];
        let mut img = vec![usize::MAX; m];
        for (d, &v) in fixed.iter().enumerate() {
            if v >= n || used[v] {
                return false;
            }
            used[v] = true;
            img[d] = v;
            if !self.consistent(target, &img, d) {
                return false;
            }
        }
        let mut map = vec![0usize; m];
        let mut buf = Vec::new();
        self.extend(target, allowed, fixed.len(), &mut used, &mut img, &mut map, &mut buf, &mut f)
    }

    fn consistent(&self, target: &FinStructure, img: &[usize], d: usize) -> bool {
        let mut buf = Vec::with_capacity(4);
        self.checks[d].iter().all(|c| {
            buf.clear();
            buf.extend(c.depths.iter().map(|&i| img[i]));
            target.holds(c.sym, &buf) == c.want
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn extend(
        &self,
        target: &FinStructure,
        allowed: Option<&[bool]>,
        d: usize,
        used: &mut [bool],
        img: &mut [usize],
        map: &mut [usize],
        buf: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if d == self.order.len() {
            for (i, &p) in self.order.iter().enumerate() {
                map[p] = img[i];
            }
            return !f(map);
        }
        for v in 0..target.size() {
            if used[v] || allowed.is_some_and(|a| !a[v]) {
                continue;
            }
            img[d] = v;
            let ok = self.checks[d].iter().all(|c| {
                buf.clear();
                buf.extend(c.depths.iter().map(|&i| img[i]));
                target.holds(c.sym, buf) == c.want
            });
            if !ok {
                continue;
            }
            used[v] = true;
            let stop = self.extend(target, allowed, d + 1, used, img, map, buf, f);
            used[v] = false;
            if stop {
                return true;
            }
        }
        false
    }

    /// The first map found, if any.
    pub fn find(&self, target: &FinStructure) -> Option<Vec<usize>> {
        let mut out = None;
        self.search(target, None, &[], |m| {
            out = Some(m.to_vec());
            false
        });
        out
    }
}

fn same_signature(a: &FinStructure, b: &FinStructure) -> Result<()> {
    if a.signature() != b.signature() {
        return Err(Error::SignatureMismatch("structures have different signatures".into()));
    }
    Ok(())
}

/// The first map of the given kind from `a` into `b`, in lexicographic
/// order of images.
pub fn find_map(a: &FinStructure, b: &FinStructure, kind: MapKind) -> Result<Option<Vec<usize>>> {
    same_signature(a, b)?;
    Ok(Pattern::new(a, kind).find(b))
}

/// An injective map from `a` into `b` whose image induces a copy of `a`.
pub fn find_embedding(a: &FinStructure, b: &FinStructure) -> Result<Option<Vec<usize>>> {
    find_map(a, b, MapKind::Embedding)
}

/// An injective map from `a` into `b` sending relations to relations.
pub fn find_injective_homomorphism(a: &FinStructure, b: &FinStructure) -> Result<Option<Vec<usize>>> {
    find_map(a, b, MapKind::InjectiveHomomorphism)
}

/// Every map of the given kind from `a` into `b`.
pub fn all_maps(a: &FinStructure, b: &FinStructure, kind: MapKind) -> Result<Vec<Vec<usize>>> {
    same_signature(a, b)?;
    let mut out = Vec::new();
    Pattern::new(a, kind).search(b, None, &[], |m| {
        out.push(m.to_vec());
        true
    });
    Ok(out)
}

/// The full automorphism group, listed in lexicographic order.
pub fn automorphisms(a: &FinStructure) -> Vec<Vec<usize>> {
    all_maps(a, a, MapKind::Embedding).expect("same signature")
}

/// One representative of each orbit of injective `q`-tuples of `a`'s
/// elements under `group`: the lexicographically least member.
pub fn tuple_orbit_representatives(a: &FinStructure, q: usize, group: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut img = vec![0; q];
    for_each_injective(a.size(), q, |t| {
        let least = group.iter().all(|g| {
            for (k, &v) in t.iter().enumerate() {
                img[k] = g[v];
            }
            img.as_slice() >= t
        });
        if least {
            out.push(t.to_vec());
        }
        true
    });
    out
}

/// Whether `a` and `b` are isomorphic.
pub fn is_isomorphic(a: &FinStructure, b: &FinStructure) -> bool {
    a.signature() == b.signature() && a.size() == b.size() && {
        let ta = a.total_tuples();
        ta == b.total_tuples() && find_map(a, b, MapKind::Embedding).ok().flatten().is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;

    fn hyper(n: usize, edges: &[[usize; 3]]) -> FinStructure {
        FinStructure::from_relations(Signature::hypergraph(), n, [("R", edges.iter().map(|e| e.to_vec()).collect())])
            .unwrap()
    }

    #[test]
    fn embedding_is_induced() {
        let k4 = hyper(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]);
        let k4m = hyper(4, &[[0, 1, 3], [0, 2, 3], [1, 2, 3]]);
        assert!(find_embedding(&k4m, &k4).unwrap().is_none());
        let h = find_injective_homomorphism(&k4m, &k4).unwrap().unwrap();
        assert!(k4m.preserves(&k4, &h, false));
        let c1 = hyper(4, &[[0, 1, 2]]);
        assert!(find_injective_homomorphism(&c1, &hyper(4, &[])).unwrap().is_none());
    }

    #[test]
    fn automorphism_counts() {
        let k4 = hyper(4, &[[0, 1, 2], [0, 1, 3], [0, 2, 3], [1, 2, 3]]);
        assert_eq!(automorphisms(&k4).len(), 24);
        let c1 = hyper(4, &[[0, 1, 2]]);
        assert_eq!(automorphisms(&c1).len(), 6);
        let reps = tuple_orbit_representatives(&c1, 1, &automorphisms(&c1));
        assert_eq!(reps, vec![vec![0], vec![3]]);
    }

    #[test]
    fn fixed_images_and_mask() {
        let tri = hyper(3, &[[0, 1, 2]]);
        let big = hyper(5, &[[0, 1, 2], [2, 3, 4]]);
        let p = Pattern::new(&tri, MapKind::Embedding);
        let mut found = Vec::new();
        p.search(&big, Some(&[false, false, true, true, true]), &[], |m| {
            found.push(m.to_vec());
            true
        });
        assert_eq!(found.len(), 6);
        assert!(found.iter().all(|m| m.iter().all(|&v| v >= 2)));
        let mut hits = 0;
        p.search(&big, None, &[3], |_| {
            hits += 1;
            true
        });
        assert_eq!(hits, 2);
        assert!(find_embedding(&tri, &FinStructure::new(Signature::graph(), 3).unwrap()).is_err());
    }
}
