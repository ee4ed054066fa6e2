//! How the relations on one vertex set are chosen during enumeration.
//!
//! Every generated structure is assembled set by set: for each set `S`
//! of elements whose size is an arity of the signature, one *option*
//! fixes all relations on tuples whose entries are exactly `S`.

use serde::{Deserialize, Serialize};

use crate::combin::permutations;
use crate::signature::Signature;
use crate::structure::FinStructure;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Convention {
    /// Every assignment compatible with the symmetry flags. Options on a
    /// `k`-set are bit strings with one bit per symmetric symbol of arity
    /// `k` and one bit per ordering for every other symbol of arity `k`.
    #[default]
    Free,
    /// Four non-symmetric ternary symbols encoding reversal classes of
    /// ordered triples: option 0 puts all six orderings in the first
    /// symbol; option `1 + m` marks position `m` of the sorted set as the
    /// middle element, and each ordering goes to symbol `1 + p` where `p`
    /// is the position of that element in the ordering.
    TripleClasses,
}

/// Precomputed option layout for one signature.
#[derive(Clone, Debug)]
pub struct Layout {
    pub convention: Convention,
    /// Distinct arities, ascending.
    pub arities: Vec<usize>,
    /// Per arity: the symbols of that arity.
    groups: Vec<Vec<usize>>,
    perms: Vec<Vec<Vec<usize>>>,
    options: Vec<u64>,
    symmetric: Vec<bool>,
}

impl Layout {
    pub fn new(sig: &Signature, convention: Convention) -> Self {
        let arities = sig.arities();
        let groups: Vec<Vec<usize>> =
            arities.iter().map(|&k| (0..sig.len()).filter(|&i| sig.symbol(i).arity == k).collect()).collect();
        let perms: Vec<Vec<Vec<usize>>> = arities.iter().map(|&k| permutations(k)).collect();
        let symmetric = (0..sig.len()).map(|i| sig.symbol(i).symmetric).collect();
        let options = match convention {
            Convention::Free => groups
                .iter()
                .zip(&perms)
                .map(|(g, p)| {
                    let bits: usize = g.iter().map(|&s| if sig.symbol(s).symmetric { 1 } else { p.len() }).sum();
                    1u64.checked_shl(bits as u32).unwrap_or(u64::MAX)
                })
                .collect(),
            Convention::TripleClasses => arities.iter().map(|_| 4).collect(),
        };
        Layout { convention, arities, groups, perms, options, symmetric }
    }

    /// Whether the convention can describe structures over `sig`.
    pub fn supports(sig: &Signature, convention: Convention) -> bool {
        match convention {
            Convention::Free => true,
            Convention::TripleClasses => sig.len() == 4 && sig.symbols().iter().all(|s| s.arity == 3 && !s.symmetric),
        }
    }

    fn group(&self, k: usize) -> usize {
        self.arities.iter().position(|&a| a == k).expect("arity of the signature")
    }

    /// Number of options on a `k`-set.
    pub fn option_count(&self, k: usize) -> u64 {
        self.options[self.group(k)]
    }

    /// Writes option `opt` on the sorted set `set`.
    pub fn apply(&self, s: &mut FinStructure, set: &[usize], opt: u64) {
        let g = self.group(set.len());
        let mut buf = vec![0usize; set.len()];
        match self.convention {
            Convention::Free => {
                let mut bit = 0;
                for &sym in &self.groups[g] {
                    if self.symmetric[sym] {
                        s.put_all_orders(sym, set, opt >> bit & 1 == 1);
                        bit += 1;
                    } else {
                        for p in &self.perms[g] {
                            for (i, &j) in p.iter().enumerate() {
                                buf[i] = set[j];
                            }
                            s.put(sym, &buf, opt >> bit & 1 == 1);
                            bit += 1;
                        }
                    }
                }
            }
            Convention::TripleClasses => {
                for p in &self.perms[g] {
                    for (i, &j) in p.iter().enumerate() {
                        buf[i] = set[j];
                    }
                    let target = if opt == 0 {
                        0
                    } else {
                        let middle = opt as usize - 1;
                        1 + p.iter().position(|&j| j == middle).expect("permutation")
                    };
                    for sym in 0..4 {
                        s.put(sym, &buf, sym == target);
                    }
                }
            }
        }
    }

    /// The option currently written on the sorted set `set`, if the
    /// relations there have the shape the convention produces.
    pub fn read(&self, s: &FinStructure, set: &[usize]) -> Option<u64> {
        let g = self.group(set.len());
        let mut buf = vec![0usize; set.len()];
        match self.convention {
            Convention::Free => {
                let mut opt = 0u64;
                let mut bit = 0;
                for &sym in &self.groups[g] {
                    if self.symmetric[sym] {
                        opt |= (s.holds(sym, set) as u64) << bit;
                        bit += 1;
                    } else {
                        for p in &self.perms[g] {
                            for (i, &j) in p.iter().enumerate() {
                                buf[i] = set[j];
                            }
                            opt |= (s.holds(sym, &buf) as u64) << bit;
                            bit += 1;
                        }
                    }
                }
                Some(opt)
            }
            Convention::TripleClasses => {
                let held: Vec<usize> = (0..4).filter(|&k| s.holds(k, set)).collect();
                let opt = match held.as_slice() {
                    [0] => 0,
                    [k] => *k as u64,
                    _ => return None,
                };
                let mut probe = s.clone();
                self.apply(&mut probe, set, opt);
                let same = self.perms[g].iter().all(|p| {
                    for (i, &j) in p.iter().enumerate() {
                        buf[i] = set[j];
                    }
                    (0..4).all(|k| s.holds(k, &buf) == probe.holds(k, &buf))
                });
                same.then_some(opt)
            }
        }
    }

    /// Whether every set of `s` carries a well-formed option.
    pub fn describes(&self, s: &FinStructure) -> bool {
        match self.convention {
            Convention::Free => true,
            Convention::TripleClasses => {
                let mut ok = true;
                crate::combin::for_each_subset(s.size(), 3, |t| {
                    ok = self.read(s, t).is_some();
                    ok
                });
                ok
            }
        }
    }
}
