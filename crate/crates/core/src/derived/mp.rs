//! Expansion of the realization set of one-point types over parameters
//! by symbols that absorb the parameters into the base relations.

use std::sync::Arc;

use crate::combin::{for_each_injective, permutations};
use crate::error::{Error, Result};
use crate::qftype::QfType;
use crate::signature::{Signature, Symbol};
use crate::structure::FinStructure;

/// A parameter-absorbing symbol: `Q(b)` holds iff the base symbol holds on
/// the permutation `perm` applied to `b` followed by `params`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbsorbingSymbol {
    pub base: usize,
    pub params: Vec<usize>,
    pub perm: Vec<usize>,
}

/// The expanded structure together with its bookkeeping.
#[derive(Clone, Debug)]
pub struct MpStructure {
    /// Base symbols first, in base order, then one symbol per entry of
    /// `absorbing`.
    pub structure: FinStructure,
    /// `elements[i]` is the element of the ambient structure that became `i`.
    pub elements: Vec<usize>,
    pub params: Vec<usize>,
    pub base_len: usize,
    pub absorbing: Vec<AbsorbingSymbol>,
}

impl MpStructure {
    pub fn signature(&self) -> &Signature {
        self.structure.signature()
    }
}

/// The one-point type of `x` over `params`, taken as the type of the tuple
/// `x` followed by `params`.
pub fn one_point_type(m: &FinStructure, x: usize, params: &[usize]) -> Result<QfType> {
    let mut t = Vec::with_capacity(params.len() + 1);
    t.push(x);
    t.extend_from_slice(params);
    m.qf_type(&t)
}

/// Every tuple of length `k` over `pool`, repeats allowed, in
/// lexicographic order.
fn all_words(pool: &[usize], k: usize) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..k {
        out = out
            .into_iter()
            .flat_map(|w| {
                pool.iter().map(move |&a| {
                    let mut w2 = w.clone();
                    w2.push(a);
                    w2
                })
            })
            .collect();
    }
    out
}

fn join(v: &[usize]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")
}

/// Builds the expansion over `params` of the structure induced on the
/// realizations, outside `params`, of the one-point types `p_types`.
///
/// For every base symbol `R` of arity `r > 1`, every `0 < k < r`, every
/// `k`-tuple of parameters (repeats included) and every permutation of
/// `0..r`, a symbol of arity `r - k` named `Q[R|params|perm]` is added.
pub fn build_m_p(m: &FinStructure, params: &[usize], p_types: &[QfType]) -> Result<MpStructure> {
    if let Some(&v) = params.iter().find(|&&v| v >= m.size()) {
        return Err(Error::OutOfRange { element: v, size: m.size() });
    }
    if (1..params.len()).any(|i| params[..i].contains(&params[i])) {
        return Err(Error::Input("parameters must be distinct".into()));
    }
    if p_types.is_empty() {
        return Err(Error::Input("at least one type is required".into()));
    }
    let mut realized = vec![false; p_types.len()];
    let mut elements = Vec::new();
    for x in 0..m.size() {
        if params.contains(&x) {
            continue;
        }
        let tp = one_point_type(m, x, params)?;
        if let Some(i) = p_types.iter().position(|p| *p == tp) {
            realized[i] = true;
            elements.push(x);
        }
    }
    if let Some(i) = realized.iter().position(|r| !r) {
        return Err(Error::Input(format!("type {i} is not realized outside the parameters")));
    }

    let base = m.signature();
    let mut symbols: Vec<Symbol> = base.symbols().to_vec();
    let mut absorbing = Vec::new();
    for (bi, sym) in base.symbols().iter().enumerate() {
        let r = sym.arity;
        if r < 2 {
            continue;
        }
        let perms = permutations(r);
        for k in 1..r {
            for a in all_words(params, k) {
                for p in &perms {
                    symbols.push(Symbol::new(
                        format!("Q[{}|{}|{}]", sym.name, join(&a), join(p)),
                        r - k,
                        sym.symmetric,
                    ));
                    absorbing.push(AbsorbingSymbol { base: bi, params: a.clone(), perm: p.clone() });
                }
            }
        }
    }
    let sig = Signature::with_max_arity(symbols, base.max_arity().max(Signature::DEFAULT_MAX_ARITY))?;
    let n = elements.len();
    let mut s = FinStructure::new(Arc::new(sig), n)?;
    let base_len = base.len();
    let mut img = Vec::new();
    for bi in 0..base_len {
        let r = base.symbol(bi).arity;
        for_each_injective(n, r, |t| {
            img.clear();
            img.extend(t.iter().map(|&i| elements[i]));
            if m.holds(bi, &img) {
                s.put(bi, t, true);
            }
            true
        });
    }
    let mut c = Vec::new();
    for (qi, q) in absorbing.iter().enumerate() {
        let r = q.perm.len();
        let arity = r - q.params.len();
        for_each_injective(n, arity, |t| {
            c.clear();
            c.extend(t.iter().map(|&i| elements[i]));
            c.extend_from_slice(&q.params);
            img.clear();
            img.extend(q.perm.iter().map(|&j| c[j]));
            if m.holds(q.base, &img) {
                s.put(base_len + qi, t, true);
            }
            true
        });
    }
    Ok(MpStructure { structure: s, elements, params: params.to_vec(), base_len, absorbing })
}

/// The reduct of an expansion to its parameter-absorbing symbols.
pub fn reduct_m_p_minus(mp: &MpStructure) -> FinStructure {
    let sig = mp.structure.signature();
    let keep: Vec<usize> = (mp.base_len..sig.len()).collect();
    let symbols = keep.iter().map(|&i| sig.symbol(i).clone()).collect();
    let reduced = Signature::with_max_arity(symbols, sig.max_arity().max(Signature::DEFAULT_MAX_ARITY))
        .expect("subset of a valid signature");
    mp.structure.reduct(reduced, &keep).expect("matching symbols")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::derived::catalog::{build_h_n, complete_hypergraph};

    #[test]
    fn no_params_copies_structure() {
        let k = complete_hypergraph(5);
        let tp = one_point_type(&k, 0, &[]).unwrap();
        let mp = build_m_p(&k, &[], &[tp]).unwrap();
        assert_eq!(mp.structure, k);
        assert!(mp.absorbing.is_empty());
        assert_eq!(reduct_m_p_minus(&mp).signature().len(), 0);
    }

    #[test]
    fn absorbing_symbols_match_definition() {
        let h = build_h_n(4).unwrap();
        let params = [0];
        let tps: Vec<QfType> = (1..5).map(|x| one_point_type(&h, x, &params).unwrap()).collect();
        let mp = build_m_p(&h, &params, &tps[..1]).unwrap();
        assert_eq!(mp.elements, vec![1, 2, 3, 4]);
        // k = 1 and k = 2 with a repeated parameter, six permutations each.
        assert_eq!(mp.absorbing.len(), 12);
        let q = mp.signature().index_of("Q[R|0|1,2,0]").unwrap();
        // Q(b0, b1) iff R(b1, a, b0).
        for x in 0..4 {
            for y in 0..4 {
                if x != y {
                    let want = h.holds(0, &[mp.elements[y], 0, mp.elements[x]]);
                    assert_eq!(mp.structure.holds(q, &[x, y]), want);
                }
            }
        }
        let minus = reduct_m_p_minus(&mp);
        assert!(minus.signature().max_arity() <= 2);
        assert!(build_m_p(&h, &[0, 0], &tps).is_err());
    }
}
