use serde::{Deserialize, Serialize};

use crate::combin::{for_each_injective, for_each_subset};
use crate::structure::FinStructure;

/// The quantifier-free type of a tuple: its equality pattern plus every
/// atomic relation holding among its distinct entries.
///
/// Entries are grouped into classes numbered by first occurrence;
/// `equality[i]` is the class of position `i`. Each atom is a symbol index
/// with a tuple of class numbers. Symmetric symbols contribute only their
/// increasing class tuples.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct QfType {
    pub arity: usize,
    pub equality: Vec<usize>,
    pub atoms: Vec<(usize, Vec<usize>)>,
}

impl QfType {
    /// The type of the empty tuple.
    pub fn empty() -> Self {
        QfType { arity: 0, equality: Vec::new(), atoms: Vec::new() }
    }

    pub(crate) fn of(s: &FinStructure, tuple: &[usize]) -> Self {
        let mut reps: Vec<usize> = Vec::new();
        let equality = tuple
            .iter()
            .map(|v| match reps.iter().position(|r| r == v) {
                Some(i) => i,
                None => {
                    reps.push(*v);
                    reps.len() - 1
                }
            })
            .collect();
        let mut atoms = Vec::new();
        let mut buf = Vec::new();
        for (sym, symbol) in s.signature().symbols().iter().enumerate() {
            let mut visit = |idx: &[usize]| {
                buf.clear();
                buf.extend(idx.iter().map(|&i| reps[i]));
                if s.holds(sym, &buf) {
                    atoms.push((sym, idx.to_vec()));
                }
                true
            };
            if symbol.symmetric {
                for_each_subset(reps.len(), symbol.arity, &mut visit);
            } else {
                for_each_injective(reps.len(), symbol.arity, &mut visit);
            }
        }
        QfType { arity: tuple.len(), equality, atoms }
    }

    /// Number of distinct entries in a realizing tuple.
    pub fn distinct(&self) -> usize {
        self.equality.iter().max().map_or(0, |m| m + 1)
    }

    /// Whether `tuple` realizes this type in `s`.
    pub fn realized_by(&self, s: &FinStructure, tuple: &[usize]) -> bool {
        tuple.len() == self.arity && tuple.iter().all(|&v| v < s.size()) && QfType::of(s, tuple) == *self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signature::Signature;

    #[test]
    fn equality_pattern_and_atoms() {
        let s = FinStructure::from_relations(Signature::digraph(), 3, [("E", vec![vec![0, 1], vec![1, 2]])]).unwrap();
        let t = s.qf_type(&[1, 1, 2]).unwrap();
        assert_eq!(t.equality, vec![0, 0, 1]);
        assert_eq!(t.atoms, vec![(0, vec![0, 1])]);
        assert_eq!(t.distinct(), 2);
        assert_eq!(s.qf_type(&[]).unwrap(), QfType::empty());
        assert_ne!(s.qf_type(&[0, 1]).unwrap(), s.qf_type(&[1, 0]).unwrap());
        assert_eq!(s.qf_type(&[0, 1]).unwrap(), s.qf_type(&[1, 2]).unwrap());
        assert!(t.realized_by(&s, &[1, 1, 2]));
        assert!(!t.realized_by(&s, &[0, 0, 2]));
    }
}
