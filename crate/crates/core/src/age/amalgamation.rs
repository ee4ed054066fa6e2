//! Bounded checks of the free, disjoint and general amalgamation
//! properties.

use serde::{Deserialize, Serialize};

use crate::budget::{Budget, Meter};
use crate::error::{Error, Result};
use crate::structure::FinStructure;

use super::constraints::{labeled_extensions, permitted_representatives};
use super::convention::Convention;
use super::extend::{Extender, Visit};
use super::AgeSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AmalgamationKind {
    /// The free amalgam itself must be permitted.
    Free,
    /// Some permitted structure on the disjoint union over the overlap.
    Disjoint,
    /// Some permitted structure into which both embed over the overlap,
    /// possibly identifying further elements.
    General,
}

/// How a verdict was reached.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    /// For a forbidden set, free amalgamation fails within a bound iff some
    /// member within the bound has two elements in no common relationship.
    Irreducibility,
    /// Every pair of permitted structures over every permitted overlap.
    Exhaustive,
}

/// Two permitted structures over a shared part with no amalgam of the
/// requested kind.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Counterexample {
    pub a: FinStructure,
    pub b: FinStructure,
    /// Identified pairs `(element of a, element of b)`.
    pub overlap: Vec<(usize, usize)>,
    /// The forbidden free amalgam, for the free kind.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub amalgam: Option<FinStructure>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum AmalgamationVerdict {
    /// No counterexample with at most `verified_bound` elements in the union.
    Pass {
        verified_bound: usize,
    },
    Counterexample(Counterexample),
    /// The budget ran out; unions up to `verified_bound` were cleared.
    Truncated {
        verified_bound: usize,
    },
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmalgamationReport {
    pub kind: AmalgamationKind,
    pub max_size: usize,
    pub method: Method,
    #[serde(flatten)]
    pub verdict: AmalgamationVerdict,
    pub nodes: u64,
}

impl AmalgamationReport {
    pub fn passed(&self) -> bool {
        matches!(self.verdict, AmalgamationVerdict::Pass { .. })
    }

    pub fn counterexample(&self) -> Option<&Counterexample> {
        match &self.verdict {
            AmalgamationVerdict::Counterexample(c) => Some(c),
            _ => None,
        }
    }
}

/// Checks the amalgamation property of `kind` for all unions with at most
/// `max_size` elements.
///
/// Free amalgamation over a forbidden set is decided from the members
/// directly; everything else is searched exhaustively.
pub fn check_amalgamation(
    age: &AgeSpec,
    kind: AmalgamationKind,
    max_size: usize,
    budget: Budget,
) -> Result<AmalgamationReport> {
    if has_exact_shortcut(age, kind) {
        if max_size < 2 {
            return Err(Error::Input("amalgamation bound must be at least 2".into()));
        }
        return Ok(by_irreducibility(age, max_size));
    }
    check_amalgamation_exhaustive(age, kind, max_size, budget)
}

/// A member that is not 2-irreducible, with an uncovered pair `(a, b)`,
/// is the free amalgam of its deletions of `b` and of `a`, both permitted
/// because members receive no map from another member. Conversely, a copy
/// of a 2-irreducible member cannot meet both sides of a free amalgam.
fn by_irreducibility(age: &AgeSpec, max_size: usize) -> AmalgamationReport {
    let mut verdict = AmalgamationVerdict::Pass { verified_bound: max_size };
    let mut members: Vec<&FinStructure> = age.forbidden().iter().filter(|f| f.size() <= max_size).collect();
    members.sort_by_key(|f| f.size());
    for f in members {
        if let Some(pair) = f.first_uncovered(2) {
            let (x, y) = (pair[0], pair[1]);
            let mut rest: Vec<usize> = (0..f.size()).filter(|&v| v != x && v != y).collect();
            let z = rest.len();
            rest.push(x);
            let a = f.induced_ordered(&rest);
            rest[z] = y;
            let b = f.induced_ordered(&rest);
            let overlap: Vec<(usize, usize)> = (0..z).map(|i| (i, i)).collect();
            let amalgam = FinStructure::free_amalgam(&a, &b, &overlap).ok();
            verdict = AmalgamationVerdict::Counterexample(Counterexample { a, b, overlap, amalgam });
            break;
        }
    }
    AmalgamationReport { kind: AmalgamationKind::Free, max_size, method: Method::Irreducibility, verdict, nodes: 0 }
}

/// Exhaustive check: for every union size `m` up to `max_size`, every
/// permitted overlap `C` (up to isomorphism) and every pair of labeled
/// permitted extensions `A`, `B` of `C` with `|A ∪ B| = m`.
pub fn check_amalgamation_exhaustive(
    age: &AgeSpec,
    kind: AmalgamationKind,
    max_size: usize,
    budget: Budget,
) -> Result<AmalgamationReport> {
    if max_size < 2 {
        return Err(Error::Input("amalgamation bound must be at least 2".into()));
    }
    let mut meter = budget.meter();
    let mut report = AmalgamationReport {
        kind,
        max_size,
        method: Method::Exhaustive,
        verdict: AmalgamationVerdict::Pass { verified_bound: max_size },
        nodes: 0,
    };
    let mut verified = 1;
    match search(age, kind, max_size, &mut meter, &mut verified) {
        Ok(Some(c)) => report.verdict = AmalgamationVerdict::Counterexample(c),
        Ok(None) => {}
        Err(Error::Budget { .. }) => report.verdict = AmalgamationVerdict::Truncated { verified_bound: verified },
        Err(e) => return Err(e),
    }
    report.nodes = meter.nodes();
    Ok(report)
}

fn search(
    age: &AgeSpec,
    kind: AmalgamationKind,
    max_size: usize,
    meter: &mut Meter,
    verified: &mut usize,
) -> Result<Option<Counterexample>> {
    let levels = permitted_representatives(age, max_size - 2, meter)?;
    for m in 2..=max_size {
        for z in (0..=m - 2).rev() {
            for x in 1..=(m - z) / 2 {
                let y = m - z - x;
                for c in &levels[z] {
                    let first = labeled_extensions(age, c, x, meter)?;
                    let second = if x == y { None } else { Some(labeled_extensions(age, c, y, meter)?) };
                    let bs = second.as_ref().unwrap_or(&first);
                    for (i, a) in first.iter().enumerate() {
                        // Swapping the two sides gives the same problem.
                        let from = if second.is_none() { i } else { 0 };
                        for b in &bs[from..] {
                            if !meter.tick() {
                                return Err(Error::Budget { nodes: meter.nodes() });
                            }
                            if let Some(cx) = test_pair(age, kind, a, b, z, meter)? {
                                return Ok(Some(cx));
                            }
                        }
                    }
                }
            }
        }
        *verified = m;
    }
    Ok(None)
}

/// Tests one pair sharing its first `z` elements.
fn test_pair(
    age: &AgeSpec,
    kind: AmalgamationKind,
    a: &FinStructure,
    b: &FinStructure,
    z: usize,
    meter: &mut Meter,
) -> Result<Option<Counterexample>> {
    let overlap: Vec<(usize, usize)> = (0..z).map(|i| (i, i)).collect();
    let ok = match kind {
        AmalgamationKind::Free => {
            let amalgam = FinStructure::free_amalgam(a, b, &overlap)?;
            if age.why_forbidden(&amalgam).is_some() {
                return Ok(Some(Counterexample { a: a.clone(), b: b.clone(), overlap, amalgam: Some(amalgam) }));
            }
            true
        }
        AmalgamationKind::Disjoint => complete_disjoint(age, a, b, z, meter)?,
        AmalgamationKind::General => complete_general(age, a, b, z, meter)?,
    };
    Ok((!ok).then(|| Counterexample { a: a.clone(), b: b.clone(), overlap, amalgam: None }))
}

/// Whether some permitted structure on `a` plus the non-shared elements
/// of `b` restricts to `a` and to `b`. The first `z` elements are shared.
pub fn complete_disjoint(
    age: &AgeSpec,
    a: &FinStructure,
    b: &FinStructure,
    z: usize,
    meter: &mut Meter,
) -> Result<bool> {
    grow_side(age, a.clone(), a.size(), b, z, z, meter)
}

/// Adds element `j` of `b` (and then the rest) to `s`, forcing every set
/// that lies inside the shared part plus the `b` elements added so far.
fn grow_side(
    age: &AgeSpec,
    s: FinStructure,
    a_len: usize,
    b: &FinStructure,
    z: usize,
    j: usize,
    meter: &mut Meter,
) -> Result<bool> {
    if j == b.size() {
        return Ok(true);
    }
    let layout = age.layout();
    // Position in `b` of an element of `s`, if it has one.
    let to_b = |v: usize| {
        if v < z {
            Some(v)
        } else if v >= a_len {
            Some(z + v - a_len)
        } else {
            None
        }
    };
    let mut options = |set: &[usize], count: u64| -> Vec<u64> {
        let mapped: Option<Vec<usize>> = set.iter().map(|&v| to_b(v)).collect();
        match mapped {
            Some(t) => layout.read(b, &t).into_iter().collect(),
            None => (0..count).collect(),
        }
    };
    let ext = Extender::new(age, s.size(), None);
    let last = j + 1 == b.size();
    let mut leaves = Vec::new();
    let stopped = ext.run(&s, &mut options, false, meter, |t, _| {
        leaves.push(t.clone());
        if last {
            Visit::Stop
        } else {
            Visit::Continue
        }
    })?;
    if stopped {
        return Ok(true);
    }
    for t in leaves {
        if grow_side(age, t, a_len, b, z, j + 1, meter)? {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Tries every identification of non-shared elements of `a` with
/// non-shared elements of `b` that is consistent, then completes the rest
/// disjointly.
fn complete_general(age: &AgeSpec, a: &FinStructure, b: &FinStructure, z: usize, meter: &mut Meter) -> Result<bool> {
    let xs: Vec<usize> = (z..a.size()).collect();
    let ys: Vec<usize> = (z..b.size()).collect();
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    matchings(age, a, b, z, &xs, &ys, 0, &mut pairs, meter)
}

#[allow(clippy::too_many_arguments)]
fn matchings(
    age: &AgeSpec,
    a: &FinStructure,
    b: &FinStructure,
    z: usize,
    xs: &[usize],
    ys: &[usize],
    from: usize,
    pairs: &mut Vec<(usize, usize)>,
    meter: &mut Meter,
) -> Result<bool> {
    // Current matching: check consistency and complete.
    let shared_a: Vec<usize> = (0..z).chain(pairs.iter().map(|p| p.0)).collect();
    let shared_b: Vec<usize> = (0..z).chain(pairs.iter().map(|p| p.1)).collect();
    if a.induced_ordered(&shared_a) == b.induced_ordered(&shared_b) {
        let mut oa = shared_a.clone();
        oa.extend(xs.iter().filter(|v| !shared_a.contains(v)));
        let mut ob = shared_b.clone();
        ob.extend(ys.iter().filter(|v| !shared_b.contains(v)));
        let a2 = a.induced_ordered(&oa);
        let b2 = b.induced_ordered(&ob);
        if complete_disjoint(age, &a2, &b2, shared_a.len(), meter)? {
            return Ok(true);
        }
    } else {
        return Ok(false);
    }
    for (i, &x) in xs.iter().enumerate().skip(from) {
        for &y in ys {
            if pairs.iter().any(|p| p.1 == y) {
                continue;
            }
            pairs.push((x, y));
            let done = matchings(age, a, b, z, xs, ys, i + 1, pairs, meter)?;
            pairs.pop();
            if done {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Whether `kind` can use the exact shortcut for this age.
pub fn has_exact_shortcut(age: &AgeSpec, kind: AmalgamationKind) -> bool {
    kind == AmalgamationKind::Free && age.oracle().is_none() && age.convention() == Convention::Free
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_form;
    use crate::derived::catalog::{catalog, CatalogName};
    use crate::morphism::MapKind;
    use crate::signature::Signature;

    fn age(members: Vec<FinStructure>) -> AgeSpec {
        AgeSpec::new(Signature::hypergraph(), members, MapKind::Embedding).unwrap()
    }

    #[test]
    fn c1_c3_free_fails_with_c1() {
        let a = age(vec![catalog(CatalogName::C1), catalog(CatalogName::C3)]);
        for rep in [
            check_amalgamation(&a, AmalgamationKind::Free, 4, Budget::default()).unwrap(),
            check_amalgamation_exhaustive(&a, AmalgamationKind::Free, 4, Budget::default()).unwrap(),
        ] {
            let cx = rep.counterexample().expect("counterexample");
            assert_eq!(cx.overlap.len(), 2);
            assert_eq!(canonical_form(cx.amalgam.as_ref().unwrap()), canonical_form(&catalog(CatalogName::C1)));
        }
    }

    #[test]
    fn c1_c3_disjoint_passes() {
        let a = age(vec![catalog(CatalogName::C1), catalog(CatalogName::C3)]);
        let rep = check_amalgamation(&a, AmalgamationKind::Disjoint, 5, Budget::default()).unwrap();
        assert!(rep.passed(), "{:?}", rep.verdict);
    }

    #[test]
    fn k4_free_routes_agree() {
        let a = age(vec![catalog(CatalogName::K4)]);
        assert!(check_amalgamation(&a, AmalgamationKind::Free, 6, Budget::default()).unwrap().passed());
        assert!(check_amalgamation_exhaustive(&a, AmalgamationKind::Free, 5, Budget::default()).unwrap().passed());
    }

    #[test]
    fn general_passes_where_disjoint_does() {
        let a = age(vec![catalog(CatalogName::K4)]);
        assert!(check_amalgamation(&a, AmalgamationKind::General, 5, Budget::default()).unwrap().passed());
    }

    #[test]
    fn tournament_reducts_have_no_free_amalgams() {
        let a = AgeSpec::tournament_reducts();
        let rep = check_amalgamation(&a, AmalgamationKind::Free, 6, Budget::default()).unwrap();
        assert!(rep.counterexample().is_some());
    }

    #[test]
    fn truncation() {
        let a = age(vec![catalog(CatalogName::K4)]);
        let rep = check_amalgamation_exhaustive(&a, AmalgamationKind::Disjoint, 6, Budget::nodes(50)).unwrap();
        assert!(matches!(rep.verdict, AmalgamationVerdict::Truncated { .. }));
    }
}
