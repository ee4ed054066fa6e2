//! Minimal forbidden structures: enumeration, certification and greedy
//! minimization.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::budget::{Budget, Meter};
use crate::canon::{canonicalize, CanonicalForm};
use crate::derived::tournament::lift_to_tournament;
use crate::error::{Error, Result};
use crate::morphism::{MapKind, Pattern};
use crate::structure::FinStructure;

use super::extend::{Ascending, Extender, Leaf, Visit};
use super::{AgeSpec, ForbiddenReason, Oracle};

/// Evidence that deleting one element leaves a permitted structure.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeletionWitness {
    pub element: usize,
    pub permitted: bool,
    /// For tournament-reduct ages: a tournament whose reduct is the deletion.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tournament: Option<FinStructure>,
    /// For host ages: an embedding of the deletion into the host.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub host_embedding: Option<Vec<usize>>,
}

/// A forbidden structure all of whose one-element deletions are permitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstraintRecord {
    pub structure: FinStructure,
    pub form: CanonicalForm,
    pub reason: ForbiddenReason,
    pub witnesses: Vec<DeletionWitness>,
}

impl ConstraintRecord {
    /// Certifies `s` as a constraint of `age`, or explains why it is not.
    pub fn certify(age: &AgeSpec, s: FinStructure) -> Result<ConstraintRecord> {
        if s.signature() != age.signature() {
            return Err(Error::SignatureMismatch("structure and age use different signatures".into()));
        }
        let reason = age
            .why_forbidden(&s)
            .ok_or_else(|| Error::Input("structure is permitted, so it is not a constraint".into()))?;
        let witnesses = (0..s.size()).map(|v| deletion_witness(age, &s, v)).collect::<Vec<_>>();
        if let Some(w) = witnesses.iter().find(|w| !w.permitted) {
            return Err(Error::Input(format!("deleting element {} leaves a forbidden structure", w.element)));
        }
        let form = canonicalize(&s).form;
        Ok(ConstraintRecord { structure: s, form, reason, witnesses })
    }

    pub fn size(&self) -> usize {
        self.structure.size()
    }
}

fn without(n: usize, v: usize) -> Vec<usize> {
    (0..n).filter(|&u| u != v).collect()
}

fn deletion_witness(age: &AgeSpec, s: &FinStructure, v: usize) -> DeletionWitness {
    let sub = s.induced_ordered(&without(s.size(), v));
    let mut w = DeletionWitness { element: v, permitted: false, tournament: None, host_embedding: None };
    match age.oracle() {
        Some(Oracle::TournamentLift) => {
            w.tournament = lift_to_tournament(&sub);
            w.permitted = w.tournament.is_some();
        }
        Some(Oracle::Host(h)) => {
            w.host_embedding = Pattern::new(&sub, MapKind::Embedding).find(h);
            w.permitted = w.host_embedding.is_some();
        }
        None => w.permitted = age.why_forbidden(&sub).is_none(),
    }
    w
}

/// Outcome of a bounded constraint enumeration.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// Constraints found, ordered by canonical form (so by size first).
    pub constraints: Vec<ConstraintRecord>,
    /// Every constraint with at most this many elements is listed.
    pub complete_through: usize,
    /// Number of permitted isomorphism types per size, from 0 upwards.
    pub permitted_counts: Vec<usize>,
    pub nodes: u64,
}

/// The enumeration ran out of budget.
#[derive(Clone, Debug)]
pub struct Truncated {
    pub partial: ConstraintReport,
}

/// Enumerates all constraints with at most `max_size` elements, up to
/// isomorphism.
///
/// Level `n + 1` is generated by extending every permitted level-`n`
/// representative by one element. Permitted leaves are deduplicated by
/// canonical form to form the next level. Forbidden leaves are kept when
/// every one-element deletion is permitted.
pub fn enumerate_constraints(
    age: &AgeSpec,
    max_size: usize,
    budget: Budget,
) -> std::result::Result<ConstraintReport, Truncated> {
    let mut meter = budget.meter();
    let mut found: BTreeMap<CanonicalForm, ConstraintRecord> = BTreeMap::new();
    let empty = FinStructure::new(age.signature_arc().clone(), 0).expect("empty structure");
    let mut report =
        ConstraintReport { constraints: Vec::new(), complete_through: 0, permitted_counts: Vec::new(), nodes: 0 };
    if age.why_forbidden(&empty).is_some() {
        let rec = ConstraintRecord::certify(age, empty).expect("empty structure is a constraint");
        report.constraints.push(rec);
        report.complete_through = max_size;
        report.permitted_counts = vec![0];
        return Ok(report);
    }
    let mut level = vec![empty];
    report.permitted_counts.push(1);
    for n in 0..max_size {
        let ext = Extender::new(age, n, None);
        let mut next: BTreeMap<CanonicalForm, FinStructure> = BTreeMap::new();
        for base in &level {
            let run = ext.run(base, &mut Ascending, true, &mut meter, |s, leaf| {
                match leaf {
                    Leaf::Permitted => {
                        let c = canonicalize(s);
                        let rep = c.structure(s);
                        next.entry(c.form).or_insert(rep);
                    }
                    Leaf::Forbidden => {
                        let c = canonicalize(s);
                        // Relabel only unseen forms; the entry API would consume the form first.
                        #[allow(clippy::map_entry)]
                        if !found.contains_key(&c.form) {
                            let cs = c.structure(s);
                            if let Ok(rec) = ConstraintRecord::certify(age, cs) {
                                found.insert(c.form, rec);
                            }
                        }
                    }
                }
                Visit::Continue
            });
            if run.is_err() {
                report.constraints = found.into_values().collect();
                report.nodes = meter.nodes();
                return Err(Truncated { partial: report });
            }
        }
        level = next.into_values().collect();
        report.permitted_counts.push(level.len());
        report.complete_through = n + 1;
        if level.is_empty() {
            report.complete_through = max_size;
            break;
        }
    }
    report.constraints = found.into_values().collect();
    report.nodes = meter.nodes();
    Ok(report)
}

/// Canonical representatives of the permitted structures of each size
/// `0..=max_size`, ordered by canonical form within a size.
pub fn permitted_representatives(age: &AgeSpec, max_size: usize, meter: &mut Meter) -> Result<Vec<Vec<FinStructure>>> {
    let empty = FinStructure::new(age.signature_arc().clone(), 0)?;
    if age.why_forbidden(&empty).is_some() {
        return Ok(vec![Vec::new(); max_size + 1]);
    }
    let mut levels = vec![vec![empty]];
    for n in 0..max_size {
        let ext = Extender::new(age, n, None);
        let mut next: BTreeMap<CanonicalForm, FinStructure> = BTreeMap::new();
        for base in &levels[n] {
            ext.run(base, &mut Ascending, false, meter, |s, _| {
                let c = canonicalize(s);
                let rep = c.structure(s);
                next.entry(c.form).or_insert(rep);
                Visit::Continue
            })?;
        }
        levels.push(next.into_values().collect());
    }
    Ok(levels)
}

/// Every permitted structure obtained from `base` by appending `count`
/// elements, labeled: the new elements follow the old ones.
pub fn labeled_extensions(
    age: &AgeSpec,
    base: &FinStructure,
    count: usize,
    meter: &mut Meter,
) -> Result<Vec<FinStructure>> {
    let mut layer = vec![base.clone()];
    for i in 0..count {
        let ext = Extender::new(age, base.size() + i, None);
        let mut next = Vec::new();
        for s in &layer {
            ext.run(s, &mut Ascending, false, meter, |t, _| {
                next.push(t.clone());
                Visit::Continue
            })?;
        }
        layer = next;
    }
    Ok(layer)
}

/// Which case of the greedy minimization produced the constraint.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MinimizationCase {
    /// No unprotected element survived: the protected part is forbidden.
    ProtectedOnly,
    /// Some unprotected elements survived, each of them needed.
    WithUnprotected,
}

/// Result of [`minimize_forbidden`].
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Minimization {
    pub record: ConstraintRecord,
    /// Original indices of the surviving elements, ascending.
    pub kept: Vec<usize>,
    /// Unprotected elements that survived the first pass.
    pub kept_unprotected: Vec<usize>,
    /// Protected elements removed by the second pass.
    pub removed_protected: Vec<usize>,
    pub case: MinimizationCase,
}

/// Greedily shrinks the forbidden structure `s` to a constraint.
///
/// First pass: unprotected elements in increasing order are deleted
/// whenever the remainder stays forbidden. Second pass: the same over
/// protected elements, needed only when some protected deletion of the
/// remainder is still forbidden.
pub fn minimize_forbidden(age: &AgeSpec, s: &FinStructure, protected: &[usize]) -> Result<Minimization> {
    if !age.is_permitted(s).map(|p| !p)? {
        return Err(Error::Input("structure is permitted; nothing to minimize".into()));
    }
    if let Some(&v) = protected.iter().find(|&&v| v >= s.size()) {
        return Err(Error::OutOfRange { element: v, size: s.size() });
    }
    let forbidden = |elems: &[usize]| age.why_forbidden(&s.induced_ordered(elems)).is_some();
    let mut keep: Vec<usize> = (0..s.size()).collect();
    for v in 0..s.size() {
        if protected.contains(&v) {
            continue;
        }
        let rest: Vec<usize> = keep.iter().copied().filter(|&u| u != v).collect();
        if forbidden(&rest) {
            keep = rest;
        }
    }
    let kept_unprotected: Vec<usize> = keep.iter().copied().filter(|v| !protected.contains(v)).collect();
    let mut removed_protected = Vec::new();
    for v in 0..s.size() {
        if !protected.contains(&v) || !keep.contains(&v) {
            continue;
        }
        let rest: Vec<usize> = keep.iter().copied().filter(|&u| u != v).collect();
        if forbidden(&rest) {
            keep = rest;
            removed_protected.push(v);
        }
    }
    let record = ConstraintRecord::certify(age, s.induced_ordered(&keep))?;
    let case =
        if kept_unprotected.is_empty() { MinimizationCase::ProtectedOnly } else { MinimizationCase::WithUnprotected };
    Ok(Minimization { record, kept: keep, kept_unprotected, removed_protected, case })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::canonical_form;
    use crate::derived::catalog::{catalog, complete_hypergraph, hypergraph, CatalogName};
    use crate::signature::Signature;

    fn age(members: Vec<FinStructure>) -> AgeSpec {
        AgeSpec::new(Signature::hypergraph(), members, MapKind::Embedding).unwrap()
    }

    #[test]
    fn c1_c3_constraints() {
        let a = age(vec![catalog(CatalogName::C1), catalog(CatalogName::C3)]);
        let rep = enumerate_constraints(&a, 4, Budget::default()).unwrap();
        let forms: Vec<_> = rep.constraints.iter().map(|c| c.form.clone()).collect();
        let mut want = vec![canonical_form(&catalog(CatalogName::C1)), canonical_form(&catalog(CatalogName::C3))];
        want.sort();
        assert_eq!(forms, want);
        assert_eq!(rep.permitted_counts, vec![1, 1, 1, 2, 3]);
    }

    #[test]
    fn k4_constraints_and_empty_age() {
        let a = age(vec![catalog(CatalogName::K4)]);
        let rep = enumerate_constraints(&a, 5, Budget::default()).unwrap();
        assert_eq!(rep.constraints.len(), 1);
        assert_eq!(rep.constraints[0].form, canonical_form(&catalog(CatalogName::K4)));
        let free = AgeSpec::unconstrained(Signature::hypergraph());
        assert!(enumerate_constraints(&free, 4, Budget::default()).unwrap().constraints.is_empty());
    }

    #[test]
    fn truncation_reports_progress() {
        let a = age(vec![catalog(CatalogName::K4)]);
        let t = enumerate_constraints(&a, 6, Budget::nodes(200)).unwrap_err();
        assert!(t.partial.complete_through < 6);
    }

    #[test]
    fn greedy_minimization() {
        let a = age(vec![catalog(CatalogName::C1), catalog(CatalogName::C3)]);
        let c1_plus = hypergraph(5, &[[1, 2, 3]]).unwrap();
        let m = minimize_forbidden(&a, &c1_plus, &[]).unwrap();
        assert_eq!(m.record.form, canonical_form(&catalog(CatalogName::C1)));
        assert_eq!(m.kept, vec![1, 2, 3, 4]);
        let k = age(vec![catalog(CatalogName::K4)]);
        let m6 = minimize_forbidden(&k, &complete_hypergraph(6), &[]).unwrap();
        assert_eq!(m6.kept, vec![2, 3, 4, 5]);
        assert_eq!(m6.case, MinimizationCase::WithUnprotected);
        let mp = minimize_forbidden(&k, &complete_hypergraph(5), &[0, 1, 2, 3]).unwrap();
        assert_eq!(mp.case, MinimizationCase::ProtectedOnly);
        assert!(minimize_forbidden(&k, &catalog(CatalogName::K4Minus), &[]).is_err());
    }
}
