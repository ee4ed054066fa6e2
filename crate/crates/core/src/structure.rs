use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use serde::de::{MapAccess, Visitor};
use serde::ser::SerializeMap;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::combin::{for_each_injective, for_each_subset, permutations};
use crate::error::{Error, Result};
use crate::qftype::QfType;
use crate::signature::{Signature, Symbol};

/// Upper bound on the bitset length of a single relation.
const MAX_RELATION_BITS: usize = 1 << 30;

/// A finite relational structure on `{0, .., size - 1}`.
///
/// Each relation is a dense bitset indexed by tuples written in base
/// `stride`. Relations of symmetric symbols are stored closed under
/// permutation, so lookups never need to sort. Tuples with a repeated
/// entry are never set.
#[derive(Clone)]
pub struct FinStructure {
    sig: Arc<Signature>,
    size: usize,
    stride: usize,
    rels: Vec<Vec<u64>>,
}

fn relation_words(stride: usize, arity: usize) -> Result<usize> {
    let bits = stride.checked_pow(arity as u32).filter(|&b| b <= MAX_RELATION_BITS).ok_or_else(|| {
        Error::Structure(format!("relation of arity {arity} over {stride} elements exceeds the dense storage limit"))
    })?;
    Ok(bits.div_ceil(64))
}

impl FinStructure {
    /// The structure on `size` elements with every relation empty.
    pub fn new(sig: impl Into<Arc<Signature>>, size: usize) -> Result<Self> {
        Self::with_capacity(sig, size, size)
    }

    /// Like [`FinStructure::new`] but reserving room for `capacity` elements.
    pub fn with_capacity(sig: impl Into<Arc<Signature>>, size: usize, capacity: usize) -> Result<Self> {
        let sig = sig.into();
        let stride = capacity.max(size).max(1);
        let rels = sig
            .symbols()
            .iter()
            .map(|s| relation_words(stride, s.arity).map(|w| vec![0u64; w]))
            .collect::<Result<Vec<_>>>()?;
        Ok(FinStructure { sig, size, stride, rels })
    }

    /// Builds a structure from named tuple lists. Tuples of symmetric
    /// symbols are closed under permutation.
    pub fn from_relations<'a, I>(sig: impl Into<Arc<Signature>>, size: usize, rels: I) -> Result<Self>
    where
        I: IntoIterator<Item = (&'a str, Vec<Vec<usize>>)>,
    {
        let mut s = Self::new(sig, size)?;
        for (name, tuples) in rels {
            let sym = s.sig.index_of(name).ok_or_else(|| Error::Structure(format!("unknown symbol {name}")))?;
            for t in tuples {
                s.set(sym, &t, true)?;
            }
        }
        Ok(s)
    }

    pub fn signature(&self) -> &Signature {
        &self.sig
    }

    pub fn signature_arc(&self) -> &Arc<Signature> {
        &self.sig
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    #[inline]
    fn index(&self, t: &[usize]) -> usize {
        t.iter().fold(0, |acc, &v| acc * self.stride + v)
    }

    /// Whether `t` belongs to relation `sym`. Entries must be in range.
    #[inline]
    pub fn holds(&self, sym: usize, t: &[usize]) -> bool {
        debug_assert!(t.iter().all(|&v| v < self.size));
        let i = self.index(t);
        self.rels[sym][i >> 6] >> (i & 63) & 1 == 1
    }

    /// Looks a symbol up by name and tests `t`.
    pub fn holds_named(&self, name: &str, t: &[usize]) -> Result<bool> {
        let sym = self.sig.index_of(name).ok_or_else(|| Error::Structure(format!("unknown symbol {name}")))?;
        self.check_tuple(sym, t, false)?;
        Ok(self.holds(sym, t))
    }

    fn check_tuple(&self, sym: usize, t: &[usize], distinct: bool) -> Result<()> {
        let arity = self.sig.symbol(sym).arity;
        if t.len() != arity {
            return Err(Error::Structure(format!(
                "tuple {t:?} has length {}, symbol {} has arity {arity}",
                t.len(),
                self.sig.symbol(sym).name
            )));
        }
        if let Some(&v) = t.iter().find(|&&v| v >= self.size) {
            return Err(Error::OutOfRange { element: v, size: self.size });
        }
        if distinct {
            for i in 0..t.len() {
                if t[..i].contains(&t[i]) {
                    return Err(Error::Structure(format!(
                        "tuple {t:?} for {} repeats an element",
                        self.sig.symbol(sym).name
                    )));
                }
            }
        }
        Ok(())
    }

    /// Sets or clears `t` in relation `sym`; symmetric symbols are updated
    /// on every permutation of `t`.
    pub fn set(&mut self, sym: usize, t: &[usize], value: bool) -> Result<()> {
        self.check_tuple(sym, t, value)?;
        if !value && (1..t.len()).any(|i| t[..i].contains(&t[i])) {
            return Ok(());
        }
        if self.sig.symbol(sym).symmetric {
            self.put_all_orders(sym, t, value);
        } else {
            self.put(sym, t, value);
        }
        Ok(())
    }

    /// Writes one bit without validation or symmetric closure.
    #[inline]
    pub(crate) fn put(&mut self, sym: usize, t: &[usize], value: bool) {
        let i = self.index(t);
        let w = &mut self.rels[sym][i >> 6];
        if value {
            *w |= 1 << (i & 63);
        } else {
            *w &= !(1 << (i & 63));
        }
    }

    /// Writes `value` on every ordering of the distinct tuple `t`.
    pub(crate) fn put_all_orders(&mut self, sym: usize, t: &[usize], value: bool) {
        let mut buf = t.to_vec();
        for_each_injective(t.len(), t.len(), |p| {
            for (k, &j) in p.iter().enumerate() {
                buf[k] = t[j];
            }
            let i = self.index(&buf);
            let w = &mut self.rels[sym][i >> 6];
            if value {
                *w |= 1 << (i & 63);
            } else {
                *w &= !(1 << (i & 63));
            }
            true
        });
    }

    /// Appends a fresh element with no relations and returns its index.
    pub fn add_vertex(&mut self) -> Result<usize> {
        if self.size == self.stride {
            let mut grown = Self::with_capacity(self.sig.clone(), self.size, self.stride * 2)?;
            for sym in 0..self.rels.len() {
                let mut tuples = Vec::new();
                self.for_each_tuple(sym, |t| tuples.push(t.to_vec()));
                for t in tuples {
                    grown.put(sym, &t, true);
                }
            }
            *self = grown;
        }
        self.size += 1;
        Ok(self.size - 1)
    }

    /// Calls `f` on every tuple of relation `sym`, in lexicographic order.
    pub fn for_each_tuple(&self, sym: usize, mut f: impl FnMut(&[usize])) {
        let arity = self.sig.symbol(sym).arity;
        let mut t = vec![0usize; arity];
        for (wi, &word) in self.rels[sym].iter().enumerate() {
            let mut w = word;
            while w != 0 {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                let mut idx = wi * 64 + b;
                for k in (0..arity).rev() {
                    t[k] = idx % self.stride;
                    idx /= self.stride;
                }
                f(&t);
            }
        }
    }

    /// Every tuple of relation `sym`, in lexicographic order.
    pub fn tuples(&self, sym: usize) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        self.for_each_tuple(sym, |t| out.push(t.to_vec()));
        out
    }

    /// One tuple per permutation orbit for symmetric symbols (the sorted
    /// one), every tuple otherwise.
    pub fn representatives(&self, sym: usize) -> Vec<Vec<usize>> {
        if !self.sig.symbol(sym).symmetric {
            return self.tuples(sym);
        }
        let mut out = Vec::new();
        self.for_each_tuple(sym, |t| {
            if t.windows(2).all(|w| w[0] < w[1]) {
                out.push(t.to_vec());
            }
        });
        out
    }

    /// Number of tuples in relation `sym`.
    pub fn tuple_count(&self, sym: usize) -> usize {
        self.rels[sym].iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Total number of tuples across all relations.
    pub fn total_tuples(&self) -> usize {
        (0..self.rels.len()).map(|s| self.tuple_count(s)).sum()
    }

    /// The substructure on `subset`, relabeled to `0..subset.len()` in
    /// increasing order of the original elements.
    pub fn induced_substructure(&self, subset: &[usize]) -> Result<FinStructure> {
        let mut elems = subset.to_vec();
        elems.sort_unstable();
        if let Some(&v) = elems.iter().find(|&&v| v >= self.size) {
            return Err(Error::OutOfRange { element: v, size: self.size });
        }
        if elems.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::Input(format!("subset {subset:?} repeats an element")));
        }
        Ok(self.induced_ordered(&elems))
    }

    /// The substructure on `elems` with `elems[i]` becoming element `i`.
    /// Entries must be distinct and in range.
    pub fn induced_ordered(&self, elems: &[usize]) -> FinStructure {
        let m = elems.len();
        let mut out = FinStructure::new(self.sig.clone(), m).expect("substructure fits");
        let mut pos = vec![usize::MAX; self.size];
        for (i, &v) in elems.iter().enumerate() {
            pos[v] = i;
        }
        let mut img = Vec::with_capacity(self.sig.max_arity());
        for sym in 0..self.rels.len() {
            let r = self.sig.symbol(sym).arity;
            let injective = (m as f64).powi(r as i32);
            let scan = self.rels[sym].len() as f64 * 2.0;
            if injective <= scan {
                for_each_injective(m, r, |t| {
                    img.clear();
                    img.extend(t.iter().map(|&i| elems[i]));
                    if self.holds(sym, &img) {
                        out.put(sym, t, true);
                    }
                    true
                });
            } else {
                let mut buf = vec![0usize; r];
                self.for_each_tuple(sym, |t| {
                    for (k, &v) in t.iter().enumerate() {
                        if pos[v] == usize::MAX {
                            return;
                        }
                        buf[k] = pos[v];
                    }
                    out.put(sym, &buf, true);
                });
            }
        }
        out
    }

    /// The isomorphic copy in which element `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<FinStructure> {
        if perm.len() != self.size {
            return Err(Error::Input(format!(
                "relabeling has length {}, structure has {} elements",
                perm.len(),
                self.size
            )));
        }
        let mut seen = vec![false; self.size];
        for &p in perm {
            if p >= self.size || std::mem::replace(&mut seen[p], true) {
                return Err(Error::Input(format!("{perm:?} is not a permutation")));
            }
        }
        let mut out = FinStructure::new(self.sig.clone(), self.size)?;
        let mut buf = Vec::new();
        for sym in 0..self.rels.len() {
            self.for_each_tuple(sym, |t| {
                buf.clear();
                buf.extend(t.iter().map(|&v| perm[v]));
                out.put(sym, &buf, true);
            });
        }
        Ok(out)
    }

    /// Restriction to the symbols `keep` (indices into this signature),
    /// re-expressed over `sig`, whose symbols must match them in order.
    pub fn reduct(&self, sig: impl Into<Arc<Signature>>, keep: &[usize]) -> Result<FinStructure> {
        let sig = sig.into();
        if sig.len() != keep.len()
            || keep.iter().enumerate().any(|(i, &k)| k >= self.sig.len() || sig.symbol(i) != self.sig.symbol(k))
        {
            return Err(Error::SignatureMismatch("reduct symbols do not match".into()));
        }
        let mut out = FinStructure::new(sig, self.size)?;
        for (i, &k) in keep.iter().enumerate() {
            self.for_each_tuple(k, |t| out.put(i, t, true));
        }
        Ok(out)
    }

    /// The quantifier-free type of `tuple`.
    pub fn qf_type(&self, tuple: &[usize]) -> Result<QfType> {
        if let Some(&v) = tuple.iter().find(|&&v| v >= self.size) {
            return Err(Error::OutOfRange { element: v, size: self.size });
        }
        Ok(QfType::of(self, tuple))
    }

    /// Whether every relation is closed under permutation of arguments.
    pub fn is_symmetric(&self) -> bool {
        let mut perms_by_arity: HashMap<usize, Vec<Vec<usize>>> = HashMap::new();
        let mut buf = Vec::new();
        for sym in 0..self.rels.len() {
            let r = self.sig.symbol(sym).arity;
            let perms = perms_by_arity.entry(r).or_insert_with(|| permutations(r));
            let mut ok = true;
            self.for_each_tuple(sym, |t| {
                if !ok {
                    return;
                }
                for p in perms.iter() {
                    buf.clear();
                    buf.extend(p.iter().map(|&j| t[j]));
                    if !self.holds(sym, &buf) {
                        ok = false;
                        return;
                    }
                }
            });
            if !ok {
                return false;
            }
        }
        true
    }

    /// Whether every `k` distinct elements occur together in some tuple of
    /// some relation. Vacuously true when fewer than `k` elements exist.
    pub fn k_irreducible(&self, k: usize) -> bool {
        self.first_uncovered(k).is_none()
    }

    /// The first `k`-set, in lexicographic order, that no tuple covers.
    pub fn first_uncovered(&self, k: usize) -> Option<Vec<usize>> {
        let mut covered = std::collections::HashSet::new();
        for sym in 0..self.rels.len() {
            if self.sig.symbol(sym).arity < k {
                continue;
            }
            self.for_each_tuple(sym, |t| {
                let mut sorted = t.to_vec();
                sorted.sort_unstable();
                for_each_subset(sorted.len(), k, |idx| {
                    covered.insert(idx.iter().map(|&i| sorted[i]).collect::<Vec<_>>());
                    true
                });
            });
        }
        let mut missing = None;
        for_each_subset(self.size, k, |s| {
            if covered.contains(s) {
                true
            } else {
                missing = Some(s.to_vec());
                false
            }
        });
        missing
    }

    /// The free amalgam of `a` and `b`, identifying `b`-element `y` with
    /// `a`-element `x` for each `(x, y)` in `overlap`.
    ///
    /// The universe lists `a`'s elements first, then the non-identified
    /// elements of `b` in increasing order.
    pub fn free_amalgam(a: &FinStructure, b: &FinStructure, overlap: &[(usize, usize)]) -> Result<FinStructure> {
        Ok(Self::free_amalgam_with_map(a, b, overlap)?.0)
    }

    /// [`FinStructure::free_amalgam`] together with the image of each
    /// element of `b` in the amalgam.
    pub fn free_amalgam_with_map(
        a: &FinStructure,
        b: &FinStructure,
        overlap: &[(usize, usize)],
    ) -> Result<(FinStructure, Vec<usize>)> {
        if a.sig != b.sig {
            return Err(Error::SignatureMismatch("amalgam of structures over different signatures".into()));
        }
        let mut bmap = vec![usize::MAX; b.size];
        let mut amark = vec![false; a.size];
        for &(x, y) in overlap {
            if x >= a.size {
                return Err(Error::OutOfRange { element: x, size: a.size });
            }
            if y >= b.size {
                return Err(Error::OutOfRange { element: y, size: b.size });
            }
            if amark[x] || bmap[y] != usize::MAX {
                return Err(Error::Input("overlap identifies an element twice".into()));
            }
            amark[x] = true;
            bmap[y] = x;
        }
        let xs: Vec<usize> = overlap.iter().map(|p| p.0).collect();
        let ys: Vec<usize> = overlap.iter().map(|p| p.1).collect();
        if a.induced_ordered(&xs) != b.induced_ordered(&ys) {
            return Err(Error::Input("overlap induces different substructures".into()));
        }
        let mut next = a.size;
        for m in bmap.iter_mut() {
            if *m == usize::MAX {
                *m = next;
                next += 1;
            }
        }
        let mut out = FinStructure::new(a.sig.clone(), next)?;
        let mut buf = Vec::new();
        for sym in 0..a.rels.len() {
            a.for_each_tuple(sym, |t| out.put(sym, t, true));
            b.for_each_tuple(sym, |t| {
                buf.clear();
                buf.extend(t.iter().map(|&v| bmap[v]));
                out.put(sym, &buf, true);
            });
        }
        Ok((out, bmap))
    }

    /// Whether `map` sends every tuple of `self` to a tuple of `other`, and
    /// additionally every non-tuple to a non-tuple when `induced` is set.
    pub fn preserves(&self, other: &FinStructure, map: &[usize], induced: bool) -> bool {
        if self.sig != other.sig || map.len() != self.size || map.iter().any(|&v| v >= other.size) {
            return false;
        }
        let mut seen = vec![false; other.size];
        for &v in map {
            if std::mem::replace(&mut seen[v], true) {
                return false;
            }
        }
        let mut buf = Vec::new();
        for sym in 0..self.rels.len() {
            let r = self.sig.symbol(sym).arity;
            let ok = for_each_injective(self.size, r, |t| {
                buf.clear();
                buf.extend(t.iter().map(|&v| map[v]));
                let here = self.holds(sym, t);
                let there = other.holds(sym, &buf);
                if induced {
                    here == there
                } else {
                    !here || there
                }
            });
            if !ok {
                return false;
            }
        }
        true
    }
}

impl PartialEq for FinStructure {
    fn eq(&self, other: &Self) -> bool {
        if self.sig != other.sig || self.size != other.size {
            return false;
        }
        if self.stride == other.stride {
            return self.rels == other.rels;
        }
        (0..self.rels.len()).all(|s| {
            self.tuple_count(s) == other.tuple_count(s) && {
                let mut ok = true;
                self.for_each_tuple(s, |t| ok &= other.holds(s, t));
                ok
            }
        })
    }
}

impl Eq for FinStructure {}

impl fmt::Debug for FinStructure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("FinStructure");
        d.field("size", &self.size);
        for (i, s) in self.sig.symbols().iter().enumerate() {
            d.field(&s.name, &self.representatives(i));
        }
        d.finish()
    }
}

struct RelationMap<'a>(&'a FinStructure);

impl Serialize for RelationMap<'_> {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        let s = self.0;
        let mut m = ser.serialize_map(Some(s.sig.len()))?;
        for (i, sym) in s.sig.symbols().iter().enumerate() {
            m.serialize_entry(&sym.name, &s.representatives(i))?;
        }
        m.end()
    }
}

#[derive(Serialize)]
struct StructureOut<'a> {
    signature: &'a [Symbol],
    size: usize,
    relations: RelationMap<'a>,
}

impl Serialize for FinStructure {
    fn serialize<S: Serializer>(&self, ser: S) -> std::result::Result<S::Ok, S::Error> {
        StructureOut { signature: self.sig.symbols(), size: self.size, relations: RelationMap(self) }.serialize(ser)
    }
}

struct RelationLists(Vec<(String, Vec<Vec<usize>>)>);

impl<'de> Deserialize<'de> for RelationLists {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = RelationLists;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a map from symbol names to tuple lists")
            }
            fn visit_map<A: MapAccess<'de>>(self, mut m: A) -> std::result::Result<RelationLists, A::Error> {
                let mut out = Vec::new();
                while let Some(e) = m.next_entry()? {
                    out.push(e);
                }
                Ok(RelationLists(out))
            }
        }
        de.deserialize_map(V)
    }
}

#[derive(Deserialize)]
struct StructureIn {
    signature: Signature,
    size: usize,
    #[serde(default)]
    relations: Option<RelationLists>,
}

impl<'de> Deserialize<'de> for FinStructure {
    fn deserialize<D: Deserializer<'de>>(de: D) -> std::result::Result<Self, D::Error> {
        let raw = StructureIn::deserialize(de)?;
        let rels = raw.relations.map(|r| r.0).unwrap_or_default();
        let mut seen = std::collections::HashSet::new();
        for (name, _) in &rels {
            if !seen.insert(name.clone()) {
                return Err(serde::de::Error::custom(format!("relation {name} listed twice")));
            }
        }
        FinStructure::from_relations(raw.signature, raw.size, rels.iter().map(|(n, t)| (n.as_str(), t.clone())))
            .map_err(serde::de::Error::custom)
    }
}

impl FinStructure {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("structure serializes")
    }

    pub fn from_json(s: &str) -> Result<FinStructure> {
        Ok(serde_json::from_str(s)?)
    }
}
