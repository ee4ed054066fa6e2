//! Canonical labeling by individualization and refinement.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::combin::{for_each_injective, for_each_subset};
use crate::structure::FinStructure;

/// A byte string that is equal for two structures over one signature
/// exactly when they are isomorphic. Ordered lexicographically.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct CanonicalForm(pub Vec<u8>);

impl CanonicalForm {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn to_hex(&self) -> String {
        self.0.iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// Result of a canonical labeling run.
#[derive(Clone, Debug)]
pub struct Canonical {
    pub form: CanonicalForm,
    /// `labeling[i]` is the element placed at canonical position `i`.
    pub labeling: Vec<usize>,
    /// Automorphisms found during the search, as maps `v -> gen[v]`.
    pub generators: Vec<Vec<usize>>,
}

impl Canonical {
    /// The structure relabeled into canonical position order.
    pub fn structure(&self, s: &FinStructure) -> FinStructure {
        s.induced_ordered(&self.labeling)
    }
}

pub fn canonical_form(s: &FinStructure) -> CanonicalForm {
    canonicalize(s).form
}

/// Canonical form, canonical labeling and automorphism generators.
pub fn canonicalize(s: &FinStructure) -> Canonical {
    let n = s.size();
    let mut search = Search::new(s);
    let mut part = Partition::unit(n);
    part.refine(s);
    if n > 0 {
        search.explore(&mut part, &mut Vec::new());
    }
    let (bits, labeling) = search.best.take().unwrap_or_default();
    let mut bytes = (n as u32).to_be_bytes().to_vec();
    bytes.extend(bits.bytes);
    Canonical { form: CanonicalForm(bytes), labeling, generators: search.generators }
}

/// The coarsest equitable ordered partition of the elements, as a list of
/// cells each sorted ascending. Cell order is an isomorphism invariant.
pub fn refine_partition(s: &FinStructure) -> Vec<Vec<usize>> {
    let mut part = Partition::unit(s.size());
    part.refine(s);
    part.cells()
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// An ordered partition: `order` lists elements cell by cell, and
/// `start[v]` is the position where `v`'s cell begins.
#[derive(Clone)]
struct Partition {
    order: Vec<usize>,
    start: Vec<usize>,
    end_at: Vec<usize>,
}

impl Partition {
    fn unit(n: usize) -> Self {
        Partition { order: (0..n).collect(), start: vec![0; n], end_at: vec![n; n] }
    }

    fn cells(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::new();
        let mut i = 0;
        while i < self.order.len() {
            let e = self.end_at[i];
            let mut c = self.order[i..e].to_vec();
            c.sort_unstable();
            out.push(c);
            i = e;
        }
        out
    }

    /// Length of the leading run of singleton cells.
    fn singleton_prefix(&self) -> usize {
        let mut i = 0;
        while i < self.order.len() && self.end_at[i] == i + 1 {
            i += 1;
        }
        i
    }

    /// Start of the first non-singleton cell.
    fn target_cell(&self) -> Option<usize> {
        let mut i = 0;
        while i < self.order.len() {
            let e = self.end_at[i];
            if e > i + 1 {
                return Some(i);
            }
            i = e;
        }
        None
    }

    /// Splits `v` off the front of its cell.
    fn individualize(&mut self, v: usize) {
        let s = self.start[v];
        let e = self.end_at[s];
        let p = self.order[s..e].iter().position(|&w| w == v).expect("v in its cell") + s;
        self.order.swap(s, p);
        self.end_at[s] = s + 1;
        self.end_at[s + 1] = e;
        for &w in &self.order[s + 1..e] {
            self.start[w] = s + 1;
        }
    }

    fn key(&self, s: &FinStructure, v: usize, scratch: &mut Vec<usize>) -> u64 {
        let n = s.size();
        let mut acc = 0u64;
        for (sym, symbol) in s.signature().symbols().iter().enumerate() {
            let r = symbol.arity;
            let others: Vec<usize> = (0..n).filter(|&w| w != v).collect();
            if symbol.symmetric {
                for_each_subset(others.len(), r - 1, |idx| {
                    scratch.clear();
                    scratch.push(v);
                    scratch.extend(idx.iter().map(|&i| others[i]));
                    if s.holds(sym, scratch) {
                        let mut cells: Vec<usize> = scratch[1..].iter().map(|&w| self.start[w]).collect();
                        cells.sort_unstable();
                        let mut h = mix(sym as u64 + 1);
                        for c in cells {
                            h = mix(h ^ c as u64);
                        }
                        acc = acc.wrapping_add(h);
                    }
                    true
                });
            } else {
                for p in 0..r {
                    for_each_injective(others.len(), r - 1, |idx| {
                        scratch.clear();
                        scratch.extend(idx.iter().map(|&i| others[i]));
                        scratch.insert(p, v);
                        if s.holds(sym, scratch) {
                            let mut h = mix(((sym as u64) << 8 | p as u64) + 1);
                            for (k, &w) in scratch.iter().enumerate() {
                                if k != p {
                                    h = mix(h ^ self.start[w] as u64);
                                }
                            }
                            acc = acc.wrapping_add(h);
                        }
                        true
                    });
                }
            }
        }
        acc
    }

    /// Refines to the coarsest equitable partition below the current one.
    fn refine(&mut self, s: &FinStructure) {
        let n = self.order.len();
        let mut scratch = Vec::new();
        loop {
            let mut keys = vec![0u64; n];
            let mut any_nonsingleton = false;
            let mut i = 0;
            while i < n {
                let e = self.end_at[i];
                if e > i + 1 {
                    any_nonsingleton = true;
                    for &v in &self.order[i..e] {
                        keys[v] = self.key(s, v, &mut scratch);
                    }
                }
                i = e;
            }
            if !any_nonsingleton {
                return;
            }
            let mut split = false;
            let mut i = 0;
            while i < n {
                let e = self.end_at[i];
                if e > i + 1 {
                    self.order[i..e].sort_by_key(|&v| (keys[v], v));
                    let mut a = i;
                    for b in i + 1..=e {
                        if b == e || keys[self.order[b]] != keys[self.order[a]] {
                            self.end_at[a] = b;
                            for &w in &self.order[a..b] {
                                self.start[w] = a;
                            }
                            if b < e {
                                split = true;
                            }
                            a = b;
                        }
                    }
                }
                i = e;
            }
            if !split {
                return;
            }
        }
    }
}

/// Bit string packed most significant bit first.
#[derive(Clone, Default, Debug, PartialEq, Eq)]
struct Bits {
    bytes: Vec<u8>,
    len: usize,
}

impl Bits {
    fn push(&mut self, b: bool) {
        if self.len.is_multiple_of(8) {
            self.bytes.push(0);
        }
        if b {
            *self.bytes.last_mut().expect("byte") |= 0x80 >> (self.len % 8);
        }
        self.len += 1;
    }

    /// Compares the first `len` bits of both strings.
    fn cmp_prefix(&self, other: &Bits, len: usize) -> Ordering {
        let full = len / 8;
        match self.bytes[..full].cmp(&other.bytes[..full]) {
            Ordering::Equal => {}
            o => return o,
        }
        let rem = len % 8;
        if rem == 0 {
            return Ordering::Equal;
        }
        let mask = !(0xffu8 >> rem);
        (self.bytes[full] & mask).cmp(&(other.bytes[full] & mask))
    }
}

/// Appends the bits contributed by canonical position `k`, given the
/// elements `lab[0..=k]` at positions up to `k`.
fn encode_position(s: &FinStructure, lab: &[usize], k: usize, out: &mut Bits, buf: &mut Vec<usize>) {
    for (sym, symbol) in s.signature().symbols().iter().enumerate() {
        let r = symbol.arity;
        if symbol.symmetric {
            for_each_subset(k, r - 1, |idx| {
                buf.clear();
                buf.extend(idx.iter().map(|&i| lab[i]));
                buf.push(lab[k]);
                out.push(s.holds(sym, buf));
                true
            });
        } else {
            for p in 0..r {
                for_each_injective(k, r - 1, |idx| {
                    buf.clear();
                    buf.extend(idx.iter().map(|&i| lab[i]));
                    buf.insert(p, lab[k]);
                    out.push(s.holds(sym, buf));
                    true
                });
            }
        }
    }
}

enum Flow {
    Continue,
    /// Unwind until the node at this depth, which moves to its next child.
    BackTo(usize),
}

struct Search<'a> {
    s: &'a FinStructure,
    best: Option<(Bits, Vec<usize>)>,
    best_path: Vec<usize>,
    first: Option<(Bits, Vec<usize>)>,
    first_path: Vec<usize>,
    generators: Vec<Vec<usize>>,
}

impl<'a> Search<'a> {
    fn new(s: &'a FinStructure) -> Self {
        Search { s, best: None, best_path: Vec::new(), first: None, first_path: Vec::new(), generators: Vec::new() }
    }

    fn encode_prefix(&self, lab: &[usize], upto: usize) -> Bits {
        let mut bits = Bits::default();
        let mut buf = Vec::new();
        for k in 0..upto {
            encode_position(self.s, lab, k, &mut bits, &mut buf);
        }
        bits
    }

    fn explore(&mut self, part: &mut Partition, path: &mut Vec<usize>) -> Flow {
        let depth = path.len();
        if let Some((best, _)) = &self.best {
            let j = part.singleton_prefix();
            if j > 0 {
                let prefix = self.encode_prefix(&part.order, j);
                if prefix.cmp_prefix(best, prefix.len) == Ordering::Less {
                    return Flow::Continue;
                }
            }
        }
        let Some(cell_start) = part.target_cell() else {
            return self.leaf(part, path);
        };
        let cell_end = part.end_at[cell_start];
        let mut cell: Vec<usize> = part.order[cell_start..cell_end].to_vec();
        cell.sort_unstable();
        let mut tried: Vec<usize> = Vec::new();
        for &v in &cell {
            // Children equivalent under known automorphisms fixing the path
            // have isomorphic subtrees.
            if self.same_orbit(v, &tried, path) {
                continue;
            }
            tried.push(v);
            let mut child = part.clone();
            child.individualize(v);
            child.refine(self.s);
            path.push(v);
            let flow = self.explore(&mut child, path);
            path.pop();
            if let Flow::BackTo(d) = flow {
                if d < depth {
                    return flow;
                }
            }
        }
        Flow::Continue
    }

    fn same_orbit(&self, v: usize, tried: &[usize], path: &[usize]) -> bool {
        if tried.is_empty() {
            return false;
        }
        let n = self.s.size();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for g in &self.generators {
            if path.iter().all(|&w| g[w] == w) {
                for (w, &gw) in g.iter().enumerate().take(n) {
                    let (a, b) = (find(&mut parent, w), find(&mut parent, gw));
                    if a != b {
                        parent[a.max(b)] = a.min(b);
                    }
                }
            }
        }
        let rv = find(&mut parent, v);
        tried.iter().any(|&t| find(&mut parent, t) == rv)
    }

    fn leaf(&mut self, part: &Partition, path: &[usize]) -> Flow {
        let n = self.s.size();
        let lab = part.order.clone();
        let bits = self.encode_prefix(&lab, n);
        let common = |a: &[usize], b: &[usize]| a.iter().zip(b).take_while(|(x, y)| x == y).count();
        if let Some((fbits, flab)) = &self.first {
            if *fbits == bits {
                let mut g = vec![0; n];
                for i in 0..n {
                    g[lab[i]] = flab[i];
                }
                let d = common(path, &self.first_path);
                self.generators.push(g);
                return Flow::BackTo(d);
            }
        } else {
            self.first = Some((bits.clone(), lab.clone()));
            self.first_path = path.to_vec();
        }
        match &self.best {
            Some((bbits, blab)) => match bits.cmp_prefix(bbits, bits.len) {
                Ordering::Greater => {
                    self.best = Some((bits, lab));
                    self.best_path = path.to_vec();
                }
                Ordering::Equal => {
                    let mut g = vec![0; n];
                    for i in 0..n {
                        g[lab[i]] = blab[i];
                    }
                    let d = common(path, &self.best_path);
                    if !self.generators.contains(&g) {
                        self.generators.push(g);
                    }
                    return Flow::BackTo(d);
                }
                Ordering::Less => {}
            },
            None => {
                self.best = Some((bits, lab));
                self.best_path = path.to_vec();
            }
        }
        Flow::Continue
    }
}
