//! Depth-first enumeration of the one-point extensions of a structure.
//!
//! The new element `x` is joined to the old elements set by set. After
//! each decision the search looks for forbidden copies that contain `x`
//! and lie in the part already decided, so failing branches are cut as
//! soon as they go wrong. The search keeps its own stack: the number of
//! decisions grows like `n^(r-1)` for arity `r`.

use crate::budget::Meter;
use crate::combin::for_each_subset;
use crate::error::{Error, Result};
use crate::structure::FinStructure;

use super::{AgeSpec, Layout};

/// Supplies the options to try on each set, in order.
pub trait OptionOrder {
    /// `set` is sorted and ends with the new element; `count` is the
    /// number of options the convention allows on it.
    fn options(&mut self, set: &[usize], count: u64) -> Vec<u64>;
}

/// Tries every option in increasing order.
pub struct Ascending;

impl OptionOrder for Ascending {
    fn options(&mut self, _set: &[usize], count: u64) -> Vec<u64> {
        (0..count).collect()
    }
}

impl<F: FnMut(&[usize], u64) -> Vec<u64>> OptionOrder for F {
    fn options(&mut self, set: &[usize], count: u64) -> Vec<u64> {
        self(set, count)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Leaf {
    Permitted,
    /// Forbidden, and every forbidden copy found meets every old element
    /// that could have been left out of it.
    Forbidden,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Visit {
    Continue,
    Stop,
}

struct Check {
    /// Old positions below this bound are allowed.
    below: usize,
    /// Old positions that must be covered, besides `x`.
    required: Vec<usize>,
    full: bool,
}

struct Decision {
    /// Old positions joined with `x`.
    positions: Vec<usize>,
    check: Option<Check>,
}

/// One-point extension search over a fixed base.
pub struct Extender<'a> {
    age: &'a AgeSpec,
    layout: Layout,
    order: Vec<usize>,
    decisions: Vec<Decision>,
    final_check: bool,
}

impl<'a> Extender<'a> {
    /// Plans the decisions for extending a structure with `n` elements,
    /// visiting old elements in `order` (a permutation of `0..n`), or in
    /// increasing order when `order` is `None`.
    pub fn new(age: &'a AgeSpec, n: usize, order: Option<Vec<usize>>) -> Self {
        let layout = age.layout();
        let order = order.unwrap_or_else(|| (0..n).collect());
        assert_eq!(order.len(), n, "order must list every old element");
        let arities = layout.arities.clone();
        let min_member = age.forbidden().iter().map(|f| f.size()).min().unwrap_or(usize::MAX);
        let oracle = age.oracle().is_some();
        let mut decisions = Vec::new();
        let final_check;
        if arities.len() == 1 {
            let k = arities[0];
            for_each_colex(n, k - 1, |t| {
                let below = t.first().copied().unwrap_or(0);
                let full = (below..n).all(|v| t.contains(&v));
                decisions
                    .push(Decision { positions: t.to_vec(), check: Some(Check { below, required: t.to_vec(), full }) });
            });
            final_check = decisions.is_empty() || !(oracle || min_member >= k);
        } else if !arities.is_empty() {
            let has_unary = arities[0] == 1;
            if has_unary {
                decisions.push(Decision {
                    positions: Vec::new(),
                    check: Some(Check { below: 0, required: Vec::new(), full: n == 0 }),
                });
            }
            for j in 0..n {
                let start = decisions.len();
                for &k in &arities {
                    if k < 2 || k - 2 > j {
                        continue;
                    }
                    for_each_subset(j, k - 2, |t| {
                        let mut p = t.to_vec();
                        p.push(j);
                        decisions.push(Decision { positions: p, check: None });
                        true
                    });
                }
                if let Some(last) = decisions[start..].last_mut() {
                    last.check = Some(Check { below: j + 1, required: vec![j], full: j + 1 == n });
                }
            }
            final_check = decisions.is_empty() || !(oracle || has_unary || min_member >= 2);
        } else {
            final_check = true;
        }
        Extender { age, layout, order, decisions, final_check }
    }

    /// Enumerates extensions of `base` by one element, calling `visit` on
    /// each permitted leaf and, when `report_forbidden` is set, on each
    /// forbidden leaf whose proper substructures were not already ruled out.
    /// Returns `true` if `visit` stopped the search.
    pub fn run(
        &self,
        base: &FinStructure,
        options: &mut dyn OptionOrder,
        report_forbidden: bool,
        meter: &mut Meter,
        mut visit: impl FnMut(&FinStructure, Leaf) -> Visit,
    ) -> Result<bool> {
        let mut s = base.clone();
        let x = s.add_vertex()?;
        let n = x;
        let mut mask = vec![false; n + 1];
        let mut required = Vec::new();
        let mut set = Vec::new();

        if self.decisions.is_empty() {
            if !meter.tick() {
                return Err(Error::Budget { nodes: meter.nodes() });
            }
            return Ok(self.leaf(&s, x, report_forbidden, &mut visit) == Visit::Stop);
        }

        let real_set = |d: &Decision, set: &mut Vec<usize>| {
            set.clear();
            set.extend(d.positions.iter().map(|&p| self.order[p]));
            set.sort_unstable();
            set.push(x);
        };

        let last = self.decisions.len() - 1;
        let mut stack: Vec<(Vec<u64>, usize)> = Vec::new();
        real_set(&self.decisions[0], &mut set);
        let count = self.layout.option_count(set.len());
        stack.push((options.options(&set, count), 0));
        while let Some((opts, next)) = stack.last_mut() {
            if *next == opts.len() {
                stack.pop();
                continue;
            }
            let opt = opts[*next];
            *next += 1;
            let d = stack.len() - 1;
            if !meter.tick() {
                return Err(Error::Budget { nodes: meter.nodes() });
            }
            let dec = &self.decisions[d];
            real_set(dec, &mut set);
            self.layout.apply(&mut s, &set, opt);
            if let Some(chk) = &dec.check {
                mask.iter_mut().for_each(|m| *m = false);
                for &v in &self.order[..chk.below] {
                    mask[v] = true;
                }
                required.clear();
                required.push(x);
                for &p in &chk.required {
                    mask[self.order[p]] = true;
                    required.push(self.order[p]);
                }
                mask[x] = true;
                if !self.age.is_permitted_within(&s, &mask, &required) {
                    if report_forbidden && chk.full && d == last && visit(&s, Leaf::Forbidden) == Visit::Stop {
                        return Ok(true);
                    }
                    continue;
                }
            }
            if d == last {
                if self.leaf(&s, x, report_forbidden, &mut visit) == Visit::Stop {
                    return Ok(true);
                }
                continue;
            }
            real_set(&self.decisions[d + 1], &mut set);
            let count = self.layout.option_count(set.len());
            stack.push((options.options(&set, count), 0));
        }
        Ok(false)
    }

    fn leaf(
        &self,
        s: &FinStructure,
        x: usize,
        report_forbidden: bool,
        visit: &mut impl FnMut(&FinStructure, Leaf) -> Visit,
    ) -> Visit {
        if self.final_check {
            let mask = vec![true; s.size()];
            if !self.age.is_permitted_within(s, &mask, &[x]) {
                return if report_forbidden { visit(s, Leaf::Forbidden) } else { Visit::Continue };
            }
        }
        visit(s, Leaf::Permitted)
    }
}

/// Visits the `r`-subsets of `0..n` in colex order.
fn for_each_colex(n: usize, r: usize, mut f: impl FnMut(&[usize])) {
    if r > n {
        return;
    }
    let mut t: Vec<usize> = (0..r).collect();
    loop {
        f(&t);
        // Colex successor: bump the first entry that has room below the next.
        let mut i = 0;
        while i < r && t[i] + 1 == if i + 1 < r { t[i + 1] } else { n } {
            i += 1;
        }
        if i == r {
            return;
        }
        t[i] += 1;
        for (j, v) in t.iter_mut().enumerate().take(i) {
            *v = j;
        }
    }
}

/// Every permitted one-point extension of `base`, in search order.
pub fn permitted_extensions(age: &AgeSpec, base: &FinStructure, meter: &mut Meter) -> Result<Vec<FinStructure>> {
    let ext = Extender::new(age, base.size(), None);
    let mut out = Vec::new();
    ext.run(base, &mut Ascending, false, meter, |s, _| {
        out.push(s.clone());
        Visit::Continue
    })?;
    Ok(out)
}
