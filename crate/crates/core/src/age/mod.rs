//! Ages presented by forbidden substructures or by a permittedness oracle.

pub mod amalgamation;
pub mod classify;
pub mod constraints;
pub mod convention;
pub mod extend;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::canon::canonical_form;
use crate::combin::for_each_injective;
use crate::derived::tournament::{lift_to_tournament, reduct_signature};
use crate::error::{Error, Result};
use crate::morphism::{automorphisms, tuple_orbit_representatives, MapKind, Pattern};
use crate::qftype::QfType;
use crate::signature::Signature;
use crate::structure::FinStructure;

pub use convention::{Convention, Layout};

/// A permittedness test that replaces the forbidden set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Oracle {
    /// Permitted iff some tournament on the same universe has the
    /// structure as its reversal-class reduct.
    TournamentLift,
    /// Permitted iff the structure embeds into the given host.
    Host(FinStructure),
}

/// Search plans for one forbidden member. `by_required[q]` holds one
/// plan per orbit of injective `q`-tuples of the member's elements under
/// its automorphism group; the plan places that tuple first.
#[derive(Clone, Debug)]
struct MemberPlan {
    size: usize,
    whole: Pattern,
    by_required: Vec<Vec<Pattern>>,
}

impl MemberPlan {
    fn new(f: &FinStructure, kind: MapKind, max_required: usize) -> Self {
        let group = automorphisms(f);
        let by_required = (0..=max_required.min(f.size()))
            .map(|q| {
                tuple_orbit_representatives(f, q, &group)
                    .into_iter()
                    .map(|rep| {
                        let mut order = rep.clone();
                        order.extend((0..f.size()).filter(|v| !rep.contains(v)));
                        Pattern::with_order(f, kind, order)
                    })
                    .collect()
            })
            .collect();
        MemberPlan { size: f.size(), whole: Pattern::new(f, kind), by_required }
    }
}

/// An age: the finite structures over a signature that admit no copy of
/// any forbidden member, or that an oracle accepts.
///
/// The forbidden set is normalized on construction: isomorphic duplicates
/// and members receiving a copy of another member are dropped.
#[derive(Clone, Debug)]
pub struct AgeSpec {
    signature: Arc<Signature>,
    forbidden: Vec<FinStructure>,
    mode: MapKind,
    oracle: Option<Oracle>,
    convention: Convention,
    plans: Vec<MemberPlan>,
    /// For a host oracle: the types of the host's injective pairs and
    /// singletons. A structure with any other such type cannot embed.
    host_types: Option<Arc<BTreeSet<QfType>>>,
}

/// How a structure fails to be permitted.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ForbiddenReason {
    /// A copy of a forbidden member: its index and the map into the structure.
    Member { index: usize, map: Vec<usize> },
    /// The oracle rejects the structure.
    Oracle,
}

impl AgeSpec {
    pub fn new(signature: impl Into<Arc<Signature>>, forbidden: Vec<FinStructure>, mode: MapKind) -> Result<Self> {
        let signature = signature.into();
        for f in &forbidden {
            if f.signature() != &*signature {
                return Err(Error::SignatureMismatch("forbidden member over another signature".into()));
            }
        }
        let forbidden = normalize(forbidden, mode);
        let max_required = signature.max_arity().max(2);
        let plans = forbidden.iter().map(|f| MemberPlan::new(f, mode, max_required)).collect();
        Ok(AgeSpec { signature, forbidden, mode, oracle: None, convention: Convention::Free, plans, host_types: None })
    }

    /// The age of all structures over `signature`.
    pub fn unconstrained(signature: impl Into<Arc<Signature>>) -> Self {
        Self::new(signature, Vec::new(), MapKind::Embedding).expect("no members to check")
    }

    /// An age decided by `oracle`.
    pub fn with_oracle(signature: impl Into<Arc<Signature>>, oracle: Oracle, convention: Convention) -> Result<Self> {
        let signature = signature.into();
        match &oracle {
            Oracle::TournamentLift if *signature != reduct_signature() => {
                return Err(Error::SignatureMismatch("tournament lifting needs the reversal-class signature".into()))
            }
            Oracle::Host(h) if h.signature() != &*signature => {
                return Err(Error::SignatureMismatch("host over another signature".into()))
            }
            _ => {}
        }
        if !Layout::supports(&signature, convention) {
            return Err(Error::Input(format!("convention {convention:?} does not fit the signature")));
        }
        Ok(AgeSpec {
            signature,
            forbidden: Vec::new(),
            mode: MapKind::Embedding,
            convention,
            plans: Vec::new(),
            host_types: match &oracle {
                Oracle::Host(h) => Some(Arc::new(small_types(h))),
                Oracle::TournamentLift => None,
            },
            oracle: Some(oracle),
        })
    }

    /// The age of tournament reducts, enumerated by reversal classes.
    pub fn tournament_reducts() -> Self {
        Self::with_oracle(reduct_signature(), Oracle::TournamentLift, Convention::TripleClasses)
            .expect("matching signature")
    }

    /// The age of a finite host structure.
    pub fn age_of(host: FinStructure) -> Self {
        let sig = host.signature_arc().clone();
        Self::with_oracle(sig, Oracle::Host(host), Convention::Free).expect("matching signature")
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.signature
    }

    pub fn forbidden(&self) -> &[FinStructure] {
        &self.forbidden
    }

    pub fn mode(&self) -> MapKind {
        self.mode
    }

    pub fn oracle(&self) -> Option<&Oracle> {
        self.oracle.as_ref()
    }

    pub fn convention(&self) -> Convention {
        self.convention
    }

    pub fn layout(&self) -> Layout {
        Layout::new(&self.signature, self.convention)
    }

    fn check_signature(&self, s: &FinStructure) -> Result<()> {
        if s.signature() != &*self.signature {
            return Err(Error::SignatureMismatch("structure and age use different signatures".into()));
        }
        Ok(())
    }

    /// Whether `s` belongs to the age.
    pub fn is_permitted(&self, s: &FinStructure) -> Result<bool> {
        self.check_signature(s)?;
        Ok(self.why_forbidden(s).is_none())
    }

    /// A reason `s` is forbidden, or `None` when it is permitted.
    /// The signature must match.
    pub fn why_forbidden(&self, s: &FinStructure) -> Option<ForbiddenReason> {
        if let Some(o) = &self.oracle {
            return (!self.oracle_accepts(o, s)).then_some(ForbiddenReason::Oracle);
        }
        for (index, p) in self.plans.iter().enumerate() {
            if let Some(map) = p.whole.find(s) {
                return Some(ForbiddenReason::Member { index, map });
            }
        }
        None
    }

    /// Whether no forbidden copy lies inside the elements flagged in
    /// `allowed` while covering every element of `required`. Oracle ages
    /// judge the substructure induced on `allowed`.
    ///
    /// `required` entries must be distinct and allowed.
    pub fn is_permitted_within(&self, s: &FinStructure, allowed: &[bool], required: &[usize]) -> bool {
        if let Some(o) = &self.oracle {
            let elems: Vec<usize> = (0..s.size()).filter(|&v| allowed[v]).collect();
            return self.oracle_accepts(o, &s.induced_ordered(&elems));
        }
        let q = required.len();
        for p in &self.plans {
            if p.size < q {
                continue;
            }
            if q < p.by_required.len() {
                for plan in &p.by_required[q] {
                    if plan.search(s, Some(allowed), required, |_| false) {
                        return false;
                    }
                }
            } else {
                let hit = p.whole.search(s, Some(allowed), &[], |m| !required.iter().all(|r| m.contains(r)));
                if hit {
                    return false;
                }
            }
        }
        true
    }
}

impl AgeSpec {
    fn oracle_accepts(&self, o: &Oracle, s: &FinStructure) -> bool {
        match o {
            Oracle::TournamentLift => lift_to_tournament(s).is_some(),
            Oracle::Host(h) => {
                if let Some(known) = &self.host_types {
                    if !small_types(s).is_subset(known) {
                        return false;
                    }
                }
                Pattern::new(s, MapKind::Embedding).find(h).is_some()
            }
        }
    }
}

/// Types of all injective tuples of length 1 and 2.
fn small_types(s: &FinStructure) -> BTreeSet<QfType> {
    let mut out = BTreeSet::new();
    for r in 1..=2 {
        for_each_injective(s.size(), r, |t| {
            out.insert(QfType::of(s, t));
            true
        });
    }
    out
}

/// Drops isomorphic duplicates and members that receive a copy of a
/// smaller or earlier member. Survivors are ordered by size, then
/// canonical form.
fn normalize(members: Vec<FinStructure>, mode: MapKind) -> Vec<FinStructure> {
    let mut keyed: Vec<_> = members.into_iter().map(|f| (canonical_form(&f), f)).collect();
    keyed.sort_by(|a, b| a.0.cmp(&b.0));
    keyed.dedup_by(|a, b| a.0 == b.0);
    let mut kept: Vec<FinStructure> = Vec::new();
    for (_, f) in keyed {
        let redundant = kept.iter().any(|g| Pattern::new(g, mode).find(&f).is_some());
        if !redundant {
            kept.push(f);
        }
    }
    kept
}

/// Serialized form of an age.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AgeFile {
    pub signature: Signature,
    #[serde(default)]
    pub forbidden: Vec<FinStructure>,
    #[serde(default = "default_mode")]
    pub mode: MapKind,
    #[serde(default)]
    pub oracle: Option<Oracle>,
    #[serde(default)]
    pub convention: Convention,
}

fn default_mode() -> MapKind {
    MapKind::Embedding
}

impl AgeFile {
    pub fn into_age(self) -> Result<AgeSpec> {
        match self.oracle {
            Some(o) => {
                if !self.forbidden.is_empty() {
                    return Err(Error::Input("an age has either an oracle or a forbidden set".into()));
                }
                AgeSpec::with_oracle(self.signature, o, self.convention)
            }
            None => {
                if self.convention != Convention::Free {
                    return Err(Error::Input("forbidden-set ages use the free convention".into()));
                }
                AgeSpec::new(self.signature, self.forbidden, self.mode)
            }
        }
    }
}

impl From<&AgeSpec> for AgeFile {
    fn from(a: &AgeSpec) -> Self {
        AgeFile {
            signature: (*a.signature).clone(),
            forbidden: a.forbidden.clone(),
            mode: a.mode,
            oracle: a.oracle.clone(),
            convention: a.convention,
        }
    }
}
