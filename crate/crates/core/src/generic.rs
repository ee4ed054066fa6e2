//! Seeded finite approximations of the generic structure of an age.
//!
//! Each growth step adds one element realizing an extension demand: a
//! subset `S` of the current structure together with a one-point type over
//! `S` that the age permits. Unmet demands are preferred; the new element's
//! relations outside `S` are completed at random among permitted choices.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::age::extend::{Ascending, Extender, OptionOrder, Visit};
use crate::age::AgeSpec;
use crate::budget::Budget;
use crate::combin::{binomial, for_each_subset};
use crate::error::{Error, Result};
use crate::qftype::QfType;
use crate::structure::FinStructure;

/// Default largest demand subset.
pub const DEFAULT_DEMAND_BOUND: usize = 3;

/// Subsets examined per step before falling back to any demand.
const SUBSETS_PER_STEP: usize = 64;

/// One growth step: the element added realizes `extension` over `subset`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthStep {
    pub subset: Vec<usize>,
    pub extension: QfType,
    /// Whether the demand was unmet before this step.
    pub fresh: bool,
}

/// A growable approximation together with the log that rebuilds it.
#[derive(Clone, Debug)]
pub struct GenericApprox {
    pub structure: FinStructure,
    pub age: AgeSpec,
    pub seed: u64,
    pub demand_bound: usize,
    pub log: Vec<GrowthStep>,
}

/// Serialized growth log: enough to replay an approximation.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthLog {
    pub seed: u64,
    pub demand_bound: usize,
    pub steps: Vec<GrowthStep>,
}

impl GenericApprox {
    /// The empty approximation.
    pub fn new(age: AgeSpec, seed: u64, demand_bound: usize) -> Self {
        let structure = FinStructure::new(age.signature_arc().clone(), 0).expect("empty structure");
        GenericApprox { structure, age, seed, demand_bound, log: Vec::new() }
    }

    pub fn size(&self) -> usize {
        self.structure.size()
    }

    pub fn growth_log(&self) -> GrowthLog {
        GrowthLog { seed: self.seed, demand_bound: self.demand_bound, steps: self.log.clone() }
    }

    /// Adds one element.
    pub fn step(&mut self) -> Result<()> {
        let t = self.log.len() as u64;
        let mut pick = stream(self.seed, 2 * t);
        let n = self.structure.size();
        let d = (self.log.len() % (self.demand_bound + 1)).min(n);
        let mut fallback: Option<(Vec<usize>, Vec<QfType>)> = None;
        for sizes in [d, 0] {
            for subset in candidate_subsets(n, sizes, &mut pick) {
                let local = local_extensions(&self.age, &self.structure, &subset)?;
                if local.is_empty() {
                    continue;
                }
                let realized = realized_types(&self.structure, &subset);
                let mut unmet: Vec<&QfType> = local.iter().map(|(t, _)| t).filter(|t| !realized.contains(t)).collect();
                unmet.shuffle(&mut pick);
                for ty in unmet {
                    if let Some(next) = self.realize(&subset, ty, t)? {
                        self.structure = next;
                        self.log.push(GrowthStep { subset, extension: ty.clone(), fresh: true });
                        return Ok(());
                    }
                }
                if fallback.is_none() {
                    fallback = Some((subset, local.into_iter().map(|(t, _)| t).collect()));
                }
            }
            if fallback.is_some() {
                break;
            }
        }
        if let Some((subset, mut types)) = fallback {
            types.shuffle(&mut pick);
            for ty in &types {
                if let Some(next) = self.realize(&subset, ty, t)? {
                    self.structure = next;
                    self.log.push(GrowthStep { subset, extension: ty.clone(), fresh: false });
                    return Ok(());
                }
            }
        }
        Err(Error::Construction(format!("no permitted one-point extension at size {n}")))
    }

    fn realize(&self, subset: &[usize], ty: &QfType, t: u64) -> Result<Option<FinStructure>> {
        realize(&self.age, &self.structure, subset, ty, &mut stream(self.seed, 2 * t + 1))
    }

    /// Rebuilds an approximation from its log.
    pub fn replay(age: AgeSpec, log: &GrowthLog) -> Result<Self> {
        let mut g = GenericApprox::new(age, log.seed, log.demand_bound);
        for (t, step) in log.steps.iter().enumerate() {
            let next = g
                .realize(&step.subset, &step.extension, t as u64)?
                .ok_or_else(|| Error::Construction(format!("logged step {t} cannot be realized")))?;
            g.structure = next;
            g.log.push(step.clone());
        }
        Ok(g)
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

/// Grows an approximation by `steps` elements from the empty structure.
pub fn grow_generic(age: &AgeSpec, steps: usize, seed: u64, demand_bound: usize) -> Result<GenericApprox> {
    let mut g = GenericApprox::new(age.clone(), seed, demand_bound);
    for _ in 0..steps {
        g.step()?;
    }
    Ok(g)
}

/// Subsets of size `d` to try, in seeded order: all of them when few,
/// otherwise a sample.
fn candidate_subsets(n: usize, d: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    if binomial(n, d) <= SUBSETS_PER_STEP as u64 {
        let mut all = Vec::new();
        for_each_subset(n, d, |t| {
            all.push(t.to_vec());
            true
        });
        all.shuffle(rng);
        all
    } else {
        (0..SUBSETS_PER_STEP)
            .map(|_| {
                let mut s = rand::seq::index::sample(rng, n, d).into_vec();
                s.sort_unstable();
                s
            })
            .collect()
    }
}

/// The permitted one-point extensions of the substructure on `base`, each
/// with the type of the new element over `base` (in the listed order).
/// The new element is the last one of each structure.
fn local_extensions(age: &AgeSpec, s: &FinStructure, base: &[usize]) -> Result<Vec<(QfType, FinStructure)>> {
    let local = s.induced_ordered(base);
    let d = base.len();
    let ext = Extender::new(age, d, None);
    let mut out: Vec<(QfType, FinStructure)> = Vec::new();
    let mut meter = Budget::unlimited().meter();
    ext.run(&local, &mut Ascending, false, &mut meter, |t, _| {
        let mut tuple = vec![d];
        tuple.extend(0..d);
        out.push((QfType::of(t, &tuple), t.clone()));
        Visit::Continue
    })?;
    out.sort_by(|a, b| a.0.cmp(&b.0));
    out.dedup_by(|a, b| a.0 == b.0);
    Ok(out)
}

/// Types over `base` realized by elements outside it.
fn realized_types(s: &FinStructure, base: &[usize]) -> Vec<QfType> {
    let mut tuple = vec![0];
    tuple.extend_from_slice(base);
    let mut out: Vec<QfType> = (0..s.size())
        .filter(|v| !base.contains(v))
        .map(|v| {
            tuple[0] = v;
            QfType::of(s, &tuple)
        })
        .collect();
    out.sort();
    out.dedup();
    out
}

/// All one-point types over `base` that the age permits on `base` plus one
/// new element, ordered and deduplicated.
pub fn one_point_extensions(age: &AgeSpec, s: &FinStructure, base: &[usize]) -> Result<Vec<QfType>> {
    check_base(s, base)?;
    Ok(local_extensions(age, s, base)?.into_iter().map(|(t, _)| t).collect())
}

fn check_base(s: &FinStructure, base: &[usize]) -> Result<()> {
    for (i, &v) in base.iter().enumerate() {
        if v >= s.size() {
            return Err(Error::OutOfRange { element: v, size: s.size() });
        }
        if base[..i].contains(&v) {
            return Err(Error::Input(format!("element {v} repeated in the base")));
        }
    }
    Ok(())
}

/// Options forced on sets inside `base` plus the new element, random
/// elsewhere.
struct Completion<'a> {
    /// Local index of each element of the structure in `base`, if any.
    local_of: Vec<Option<usize>>,
    x: usize,
    pattern: &'a FinStructure,
    layout: crate::age::Layout,
    rng: &'a mut ChaCha8Rng,
}

impl OptionOrder for Completion<'_> {
    fn options(&mut self, set: &[usize], count: u64) -> Vec<u64> {
        let d = self.pattern.size() - 1;
        let local: Option<Vec<usize>> =
            set.iter().map(|&v| if v == self.x { Some(d) } else { self.local_of[v] }).collect();
        match local {
            Some(mut t) => {
                t.sort_unstable();
                self.layout.read(self.pattern, &t).into_iter().collect()
            }
            None => {
                let mut all: Vec<u64> = (0..count).collect();
                all.shuffle(self.rng);
                all
            }
        }
    }
}

/// Adds one element to `s` realizing `ty` over `base`, choosing its other
/// relations at random among permitted completions. `None` when no
/// permitted completion exists.
pub fn realize(
    age: &AgeSpec,
    s: &FinStructure,
    base: &[usize],
    ty: &QfType,
    rng: &mut ChaCha8Rng,
) -> Result<Option<FinStructure>> {
    check_base(s, base)?;
    let Some((_, pattern)) = local_extensions(age, s, base)?.into_iter().find(|(t, _)| t == ty) else {
        return Ok(None);
    };
    let n = s.size();
    let mut local_of = vec![None; n];
    for (i, &v) in base.iter().enumerate() {
        local_of[v] = Some(i);
    }
    let mut order = base.to_vec();
    order.extend((0..n).filter(|&v| local_of[v].is_none()));
    let ext = Extender::new(age, n, Some(order));
    let mut completion = Completion { local_of, x: n, pattern: &pattern, layout: age.layout(), rng };
    let mut found = None;
    let mut meter = Budget::unlimited().meter();
    ext.run(s, &mut completion, false, &mut meter, |t, _| {
        found = Some(t.clone());
        Visit::Stop
    })?;
    Ok(found)
}

/// How many sampled demands of one size are already realized.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionReport {
    pub demand_size: usize,
    pub subsets: usize,
    /// True when every subset of the demand size was examined.
    pub exhaustive: bool,
    pub demands: usize,
    pub realized: usize,
    pub ratio: f64,
    /// Up to ten unmet demands.
    pub unmet: Vec<GrowthStep>,
}

/// Samples subsets of `demand_size` elements (all of them when there are
/// at most `sample`) and reports the fraction of permitted one-point types
/// over them that some element of `s` realizes.
pub fn check_extension_property(
    age: &AgeSpec,
    s: &FinStructure,
    demand_size: usize,
    sample: usize,
    seed: u64,
) -> Result<ExtensionReport> {
    if demand_size > s.size() {
        return Err(Error::Input(format!("demand size {demand_size} exceeds the structure size {}", s.size())));
    }
    let mut rng = stream(seed, u64::MAX);
    let exhaustive = binomial(s.size(), demand_size) <= sample as u64;
    let subsets: Vec<Vec<usize>> = if exhaustive {
        let mut all = Vec::new();
        for_each_subset(s.size(), demand_size, |t| {
            all.push(t.to_vec());
            true
        });
        all
    } else {
        (0..sample)
            .map(|_| {
                let mut t = rand::seq::index::sample(&mut rng, s.size(), demand_size).into_vec();
                t.sort_unstable();
                t
            })
            .collect()
    };
    let mut report = ExtensionReport {
        demand_size,
        subsets: subsets.len(),
        exhaustive,
        demands: 0,
        realized: 0,
        ratio: 1.0,
        unmet: Vec::new(),
    };
    for subset in subsets {
        let realized = realized_types(s, &subset);
        for (ty, _) in local_extensions(age, s, &subset)? {
            report.demands += 1;
            if realized.binary_search(&ty).is_ok() {
                report.realized += 1;
            } else if report.unmet.len() < 10 {
                report.unmet.push(GrowthStep { subset: subset.clone(), extension: ty, fresh: true });
            }
        }
    }
    if report.demands > 0 {
        report.ratio = report.realized as f64 / report.demands as f64;
    }
    Ok(report)
}

impl GenericApprox {
    pub fn check_extension_property(&self, demand_size: usize, sample: usize) -> Result<ExtensionReport> {
        check_extension_property(&self.age, &self.structure, demand_size, sample, self.seed)
    }
}

/// Outcome of a relative extension check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "kebab-case")]
pub enum RelativeExtension {
    /// `witness` satisfies every demand.
    Pass {
        witness: Option<usize>,
    },
    Unmet,
}

/// Extension property relative to a partition, for one demand list: given
/// pairs `(a_i, b_i)` with every `b_i` in one class and `b_i != a_i`, is
/// there one element `b` with `tp(a_i, b) = tp(a_i, b_i)` for every `i`?
/// `classes[v]` names the class of `v`. The empty list passes vacuously.
pub fn check_extension_relative_to_classes(
    s: &FinStructure,
    classes: &[usize],
    demands: &[(usize, usize)],
) -> Result<RelativeExtension> {
    if s.signature().max_arity() > 2 {
        return Err(Error::Input("relative extension properties need a binary signature".into()));
    }
    if classes.len() != s.size() {
        return Err(Error::Input("the partition must label every element".into()));
    }
    for &(a, b) in demands {
        for v in [a, b] {
            if v >= s.size() {
                return Err(Error::OutOfRange { element: v, size: s.size() });
            }
        }
        if a == b {
            return Err(Error::Input(format!("demand ({a}, {b}) repeats an element")));
        }
        if classes[b] != classes[demands[0].1] {
            return Err(Error::Input("demanded elements lie in different classes".into()));
        }
    }
    if demands.is_empty() {
        return Ok(RelativeExtension::Pass { witness: None });
    }
    let wanted: Vec<QfType> = demands.iter().map(|&(a, b)| QfType::of(s, &[a, b])).collect();
    let witness =
        (0..s.size()).find(|&v| demands.iter().zip(&wanted).all(|(&(a, _), ty)| QfType::of(s, &[a, v]) == *ty));
    Ok(match witness {
        Some(w) => RelativeExtension::Pass { witness: Some(w) },
        None => RelativeExtension::Unmet,
    })
}
