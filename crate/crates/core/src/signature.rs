use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A relation symbol: name, arity and whether every interpretation is
/// closed under permutation of arguments.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Symbol {
    pub name: String,
    pub arity: usize,
    #[serde(default)]
    pub symmetric: bool,
}

impl Symbol {
    pub fn new(name: impl Into<String>, arity: usize, symmetric: bool) -> Self {
        Symbol { name: name.into(), arity, symmetric }
    }
}

/// An ordered, finite relational vocabulary.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<Symbol>", into = "Vec<Symbol>")]
pub struct Signature {
    symbols: Vec<Symbol>,
}

impl Signature {
    pub const DEFAULT_MAX_ARITY: usize = 4;

    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        Self::with_max_arity(symbols, Self::DEFAULT_MAX_ARITY)
    }

    pub fn with_max_arity(symbols: Vec<Symbol>, max_arity: usize) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &symbols {
            if s.arity == 0 || s.arity > max_arity {
                return Err(Error::Signature(format!(
                    "symbol {} has arity {}, allowed range is 1..={max_arity}",
                    s.name, s.arity
                )));
            }
            if !seen.insert(s.name.as_str()) {
                return Err(Error::Signature(format!("duplicate symbol name {}", s.name)));
            }
        }
        Ok(Signature { symbols })
    }

    /// The empty vocabulary.
    pub fn empty() -> Self {
        Signature { symbols: Vec::new() }
    }

    /// A vocabulary with a single symbol.
    pub fn single(name: &str, arity: usize, symmetric: bool) -> Self {
        Signature::new(vec![Symbol::new(name, arity, symmetric)]).expect("valid single symbol")
    }

    /// One symmetric ternary symbol `R`: 3-hypergraphs.
    pub fn hypergraph() -> Self {
        Self::single("R", 3, true)
    }

    /// One symmetric binary symbol `E`: simple graphs.
    pub fn graph() -> Self {
        Self::single("E", 2, true)
    }

    /// One non-symmetric binary symbol `E`: digraphs and tournaments.
    pub fn digraph() -> Self {
        Self::single("E", 2, false)
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbol(&self, idx: usize) -> &Symbol {
        &self.symbols[idx]
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s.name == name)
    }

    pub fn max_arity(&self) -> usize {
        self.symbols.iter().map(|s| s.arity).max().unwrap_or(0)
    }

    /// Distinct arities in increasing order.
    pub fn arities(&self) -> Vec<usize> {
        let mut a: Vec<usize> = self.symbols.iter().map(|s| s.arity).collect();
        a.sort_unstable();
        a.dedup();
        a
    }

    /// Sub-vocabulary of symbols with arity at most `k`, with the indices
    /// of the kept symbols in `self`.
    pub fn arity_reduct(&self, k: usize) -> (Signature, Vec<usize>) {
        let idx: Vec<usize> = (0..self.len()).filter(|&i| self.symbols[i].arity <= k).collect();
        let symbols = idx.iter().map(|&i| self.symbols[i].clone()).collect();
        (Signature { symbols }, idx)
    }
}

impl TryFrom<Vec<Symbol>> for Signature {
    type Error = Error;
    fn try_from(v: Vec<Symbol>) -> Result<Self> {
        Signature::new(v)
    }
}

impl From<Signature> for Vec<Symbol> {
    fn from(s: Signature) -> Self {
        s.symbols
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_duplicates_and_bad_arity() {
        assert!(Signature::new(vec![Symbol::new("R", 3, true), Symbol::new("R", 2, false)]).is_err());
        assert!(Signature::new(vec![Symbol::new("Z", 0, false)]).is_err());
        assert!(Signature::new(vec![Symbol::new("W", 5, false)]).is_err());
        assert!(Signature::with_max_arity(vec![Symbol::new("W", 5, false)], 5).is_ok());
    }

    #[test]
    fn arity_reduct_keeps_order() {
        let sig =
            Signature::new(vec![Symbol::new("A", 3, false), Symbol::new("B", 1, false), Symbol::new("C", 2, true)])
                .unwrap();
        let (r, idx) = sig.arity_reduct(2);
        assert_eq!(idx, vec![1, 2]);
        assert_eq!(r.symbols()[0].name, "B");
        assert_eq!(sig.arities(), vec![1, 2, 3]);
    }
}
