//! Tournaments, the reversal equivalence on tuples, and the ternary reduct
//! recording the reversal class of every ordered triple.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::signature::{Signature, Symbol};
use crate::structure::FinStructure;

/// One non-symmetric binary symbol `E`.
pub fn tournament_signature() -> Signature {
    Signature::digraph()
}

/// Four non-symmetric ternary symbols `R1`..`R4`, one per reversal class
/// of ordered triples.
pub fn reduct_signature() -> Signature {
    Signature::new((1..=4).map(|i| Symbol::new(format!("R{i}"), 3, false)).collect()).expect("valid reduct signature")
}

/// Whether `t` is a tournament over a single binary symbol: exactly one
/// direction between every two distinct elements.
pub fn is_tournament(t: &FinStructure) -> bool {
    let sig = t.signature();
    if sig.len() != 1 || sig.symbol(0).arity != 2 || sig.symbol(0).symmetric {
        return false;
    }
    let n = t.size();
    (0..n).all(|i| (i + 1..n).all(|j| t.holds(0, &[i, j]) != t.holds(0, &[j, i])))
}

fn require_tournament(t: &FinStructure) -> Result<()> {
    if is_tournament(t) {
        Ok(())
    } else {
        Err(Error::Input("expected a tournament".into()))
    }
}

/// The tournament in which pair `(i, j)`, `i < j`, with colex rank `k`
/// points `i -> j` when bit `k` of `bits` is clear and `j -> i` otherwise.
pub fn tournament_from_bits(n: usize, bits: u64) -> FinStructure {
    let mut t = FinStructure::new(tournament_signature(), n).expect("fits");
    let mut k = 0;
    for j in 0..n {
        for i in 0..j {
            if bits >> k & 1 == 0 {
                t.put(0, &[i, j], true);
            } else {
                t.put(0, &[j, i], true);
            }
            k += 1;
        }
    }
    t
}

/// Every pair oriented uniformly at random from `seed`.
pub fn random_tournament(n: usize, seed: u64) -> FinStructure {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut t = FinStructure::new(tournament_signature(), n).expect("fits");
    for j in 0..n {
        for i in 0..j {
            if rng.gen::<bool>() {
                t.put(0, &[i, j], true);
            } else {
                t.put(0, &[j, i], true);
            }
        }
    }
    t
}

/// Whether `u` and `v` have the same equality pattern and the same edge
/// pattern, either directly or with every edge reversed.
pub fn approx_n_equal(t: &FinStructure, u: &[usize], v: &[usize]) -> Result<bool> {
    require_tournament(t)?;
    if u.len() != v.len() || u.len() < 2 {
        return Err(Error::Input(format!(
            "reversal equivalence needs two tuples of one length >= 2, got {} and {}",
            u.len(),
            v.len()
        )));
    }
    if let Some(&x) = u.iter().chain(v).find(|&&x| x >= t.size()) {
        return Err(Error::OutOfRange { element: x, size: t.size() });
    }
    Ok(reversal_equivalent(t, u, v))
}

/// [`approx_n_equal`] without validation.
pub fn reversal_equivalent(t: &FinStructure, u: &[usize], v: &[usize]) -> bool {
    let n = u.len();
    let mut direct = true;
    let mut reversed = true;
    for i in 0..n {
        for j in 0..n {
            if (u[i] == u[j]) != (v[i] == v[j]) {
                return false;
            }
            if u[i] == u[j] {
                continue;
            }
            let e = t.holds(0, &[u[i], u[j]]);
            direct &= e == t.holds(0, &[v[i], v[j]]);
            reversed &= e == t.holds(0, &[v[j], v[i]]);
        }
    }
    direct || reversed
}

/// Reversal class of the ordered triple `(a, b, c)` of distinct elements:
/// 0 when the triple is a directed cycle, otherwise `1 + p` where `p` is
/// the position of the element with one in-edge and one out-edge.
///
/// | class | symbol | triple shape                       |
/// |-------|--------|------------------------------------|
/// | 0     | `R1`   | directed 3-cycle                   |
/// | 1     | `R2`   | transitive, middle element first   |
/// | 2     | `R3`   | transitive, middle element second  |
/// | 3     | `R4`   | transitive, middle element third   |
pub fn triple_class(t: &FinStructure, a: usize, b: usize, c: usize) -> usize {
    let x = [a, b, c];
    let mut outdeg = [0u8; 3];
    for i in 0..3 {
        for j in 0..3 {
            if i != j && t.holds(0, &[x[i], x[j]]) {
                outdeg[i] += 1;
            }
        }
    }
    if outdeg == [1, 1, 1] {
        0
    } else {
        1 + outdeg.iter().position(|&d| d == 1).expect("transitive triple has a middle")
    }
}

/// The structure over [`reduct_signature`] on the same universe in which
/// each ordered triple of distinct elements satisfies the symbol of its
/// reversal class.
pub fn tournament_reduct(t: &FinStructure) -> Result<FinStructure> {
    require_tournament(t)?;
    if t.size() < 3 {
        return Err(Error::Input(format!("tournament reduct needs at least 3 elements, got {}", t.size())));
    }
    Ok(reduct_unchecked(t))
}

pub(crate) fn reduct_unchecked(t: &FinStructure) -> FinStructure {
    let n = t.size();
    let mut s = FinStructure::new(reduct_signature(), n).expect("fits");
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a != b && b != c && a != c {
                    s.put(triple_class(t, a, b, c), &[a, b, c], true);
                }
            }
        }
    }
    s
}

/// The class assigned to `(a, b, c)` by a structure over the reduct
/// signature, if exactly one symbol holds.
fn assigned_class(s: &FinStructure, t: [usize; 3]) -> Option<usize> {
    let mut found = None;
    for k in 0..4 {
        if s.holds(k, &t) {
            if found.is_some() {
                return None;
            }
            found = Some(k);
        }
    }
    found
}

/// Class of the ordering `(t[p[0]], t[p[1]], t[p[2]])` given the class of `t`.
fn permuted_class(class: usize, p: [usize; 3]) -> usize {
    if class == 0 {
        0
    } else {
        1 + p.iter().position(|&i| i == class - 1).expect("p is a permutation")
    }
}

const PERMS3: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

/// A tournament whose reduct is `s`, if one exists: the witness whose pair
/// orientations, read in colex pair order, are lexicographically least.
pub fn lift_to_tournament(s: &FinStructure) -> Option<FinStructure> {
    if s.signature() != &reduct_signature() {
        return None;
    }
    let n = s.size();
    // Class of each increasing triple, checked consistent over orderings.
    let mut class = vec![0u8; n * n * n];
    for c in 0..n {
        for b in 0..c {
            for a in 0..b {
                let base = assigned_class(s, [a, b, c])?;
                for p in PERMS3 {
                    let x = [a, b, c];
                    if assigned_class(s, [x[p[0]], x[p[1]], x[p[2]]]) != Some(permuted_class(base, p)) {
                        return None;
                    }
                }
                class[(a * n + b) * n + c] = base as u8;
            }
        }
    }
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    let mut orient = vec![false; n * n];
    let ok = lift_dfs(n, &pairs, 0, &class, &mut orient);
    if !ok {
        return None;
    }
    let mut t = FinStructure::new(tournament_signature(), n).expect("fits");
    for &(i, j) in &pairs {
        if orient[i * n + j] {
            t.put(0, &[j, i], true);
        } else {
            t.put(0, &[i, j], true);
        }
    }
    Some(t)
}

/// `orient[i * n + j]` for `i < j` is set when the edge points `j -> i`.
fn lift_dfs(n: usize, pairs: &[(usize, usize)], k: usize, class: &[u8], orient: &mut [bool]) -> bool {
    if k == pairs.len() {
        return true;
    }
    let (i, j) = pairs[k];
    // Reversing every edge preserves the reduct, so the first pair is fixed.
    let choices: &[bool] = if k == 0 { &[false] } else { &[false, true] };
    for &o in choices {
        orient[i * n + j] = o;
        let consistent = (0..i).all(|a| {
            let edge = |x: usize, y: usize| -> bool {
                // true when x -> y, for x != y.
                if x < y {
                    !orient[x * n + y]
                } else {
                    orient[y * n + x]
                }
            };
            let x = [a, i, j];
            let mut outdeg = [0u8; 3];
            for p in 0..3 {
                for q in 0..3 {
                    if p != q && edge(x[p], x[q]) {
                        outdeg[p] += 1;
                    }
                }
            }
            let got = if outdeg == [1, 1, 1] { 0 } else { 1 + outdeg.iter().position(|&d| d == 1).unwrap() };
            got as u8 == class[(a * n + i) * n + j]
        });
        if consistent && lift_dfs(n, pairs, k + 1, class, orient) {
            return true;
        }
    }
    false
}
