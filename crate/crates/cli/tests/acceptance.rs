//! Acceptance gate: one line per criterion.
//!
//! Each criterion runs its registered check and then an oracle written
//! here from the definitions, sharing no search code with the library.
//! Two criteria are known not to hold; for those the gate requires the
//! failure to be exactly the analyzed one, confirmed by brute force.

// Adjacency matrices read most clearly with index loops.
#![allow(clippy::needless_range_loop)]

use std::collections::{BTreeSet, HashMap, HashSet};
use std::process::{Command, ExitCode};

use fraisse_cli::suites::{self, check, Ctx, EXTENSION_RATIO_FLOOR};
use fraisse_cli::{emit_report, CheckResult, Format, Status};
use fraisse_core::age::amalgamation::{check_amalgamation_exhaustive, AmalgamationKind};
use fraisse_core::derived::catalog::{build_h_n, catalog, ternary_signature, CatalogName};
use fraisse_core::derived::mp::{build_m_p, one_point_type, reduct_m_p_minus};
use fraisse_core::derived::tournament::approx_n_equal;
use fraisse_core::{AgeSpec, Budget, FinStructure, MapKind, QfType, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;

/// Seed of the acceptance run.
const SEED: u64 = 1;

enum Verdict {
    Pass(String),
    /// A criterion known not to hold, failing exactly as analyzed.
    KnownFailure(String),
    Fail(String),
}

type Oracle = fn(&CheckResult) -> Verdict;

fn main() -> ExitCode {
    let ctx = Ctx { seed: SEED, budget: Budget::default() };
    let oracles: [(u8, Oracle); 15] = [
        (1, h_n_oracle),
        (2, class_count_oracle),
        (3, triple_reduction_oracle),
        (4, constraint_size_oracle),
        (5, isolation_oracle),
        (6, reduct_amalgamation_oracle),
        (7, parity_identity_oracle),
        (8, parity_isolation_oracle),
        (9, free_amalgamation_oracle),
        (10, hypotheses_oracle),
        (11, randomness_oracle),
        (12, expansion_oracle),
        (13, equivalence_oracle),
        (14, binary_reduct_oracle),
        (15, determinism_oracle),
    ];
    let (mut passed, mut known, mut failed) = (0, 0, 0);
    for (k, oracle) in oracles {
        let c = check(k).expect("registered criterion");
        let result = c.run(&ctx);
        let verdict = oracle(&result);
        let (label, text) = match &verdict {
            Verdict::Pass(t) => {
                passed += 1;
                ("PASS", t)
            }
            Verdict::KnownFailure(t) => {
                known += 1;
                ("FAIL", t)
            }
            Verdict::Fail(t) => {
                failed += 1;
                ("FAIL", t)
            }
        };
        let tag = if matches!(verdict, Verdict::KnownFailure(_)) { " [known, analyzed]" } else { "" };
        println!("criterion {k:>2} {label}{tag} {}: {text}", c.name);
    }
    println!("acceptance: {passed} passed, {known} failed as analyzed, {failed} unexpected");
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

/// Passes when the check passed and the oracle agrees.
fn expect_pass(r: &CheckResult, oracle: Result<String, String>) -> Verdict {
    match (r.status, oracle) {
        (Status::Pass, Ok(t)) => Verdict::Pass(format!("{}; oracle: {t}", r.summary)),
        (Status::Pass, Err(e)) => Verdict::Fail(format!("check passed but oracle disagrees: {e}")),
        (s, _) => Verdict::Fail(format!("check {}: {}", s.label(), r.summary)),
    }
}

// ---- independent helpers ----

/// Calls `f` on every injective map from `0..k` into `0..n` until it
/// returns true.
fn any_injection(k: usize, n: usize, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    fn go(
        k: usize,
        n: usize,
        used: &mut Vec<bool>,
        map: &mut Vec<usize>,
        f: &mut impl FnMut(&[usize]) -> bool,
    ) -> bool {
        if map.len() == k {
            return f(map);
        }
        for v in 0..n {
            if !used[v] {
                used[v] = true;
                map.push(v);
                let hit = go(k, n, used, map, f);
                map.pop();
                used[v] = false;
                if hit {
                    return true;
                }
            }
        }
        false
    }
    go(k, n, &mut vec![false; n], &mut Vec::new(), f)
}

fn ordered_triples(n: usize) -> Vec<[usize; 3]> {
    let mut out = Vec::new();
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if a != b && b != c && a != c {
                    out.push([a, b, c]);
                }
            }
        }
    }
    out
}

fn increasing_triples(n: usize) -> Vec<[usize; 3]> {
    ordered_triples(n).into_iter().filter(|t| t[0] < t[1] && t[1] < t[2]).collect()
}

/// Whether the ternary structure `a` embeds into `b`, by trying every
/// injective map.
fn embeds_ternary(a: &FinStructure, b: &FinStructure) -> bool {
    let triples = ordered_triples(a.size());
    any_injection(a.size(), b.size(), &mut |m| {
        triples.iter().all(|t| a.holds(0, t) == b.holds(0, &[m[t[0]], m[t[1]], m[t[2]]]))
    })
}

/// H_n built from its definition: all ordered triples of distinct
/// elements of `0..=n` except `(0, b, b+1)` for `1 <= b < n` and `(0, n, 1)`.
fn h_n_by_definition(n: usize) -> FinStructure {
    let mut s = FinStructure::new(ternary_signature(), n + 1).unwrap();
    for [a, b, c] in ordered_triples(n + 1) {
        let gap = a == 0 && ((b >= 1 && b < n && c == b + 1) || (b == n && c == 1));
        if !gap {
            s.set(0, &[a, b, c], true).unwrap();
        }
    }
    s
}

/// A tournament as an out-adjacency matrix; pair `k` in colex order
/// points forward when bit `k` is clear.
fn tournament(n: usize, bits: u64) -> Vec<Vec<bool>> {
    let mut out = vec![vec![false; n]; n];
    let mut k = 0;
    for j in 0..n {
        for i in 0..j {
            if bits >> k & 1 == 0 {
                out[i][j] = true;
            } else {
                out[j][i] = true;
            }
            k += 1;
        }
    }
    out
}

/// Equality pattern plus edge pattern, normalized under global reversal.
/// Two tuples are reversal-equivalent iff their keys are equal.
fn reversal_key(out: &[Vec<bool>], u: &[usize]) -> (Vec<usize>, u64) {
    let pattern: Vec<usize> = u.iter().map(|x| u.iter().position(|y| y == x).unwrap()).collect();
    let (mut direct, mut reversed, mut k) = (0u64, 0u64, 0);
    for i in 0..u.len() {
        for j in i + 1..u.len() {
            if u[i] != u[j] {
                direct |= (out[u[i]][u[j]] as u64) << k;
                reversed |= (out[u[j]][u[i]] as u64) << k;
                k += 1;
            }
        }
    }
    (pattern, direct.min(reversed))
}

/// Reversal class of the ordered triple: 0 for a cycle, else 1 plus the
/// position of the element with one in-edge and one out-edge.
fn triple_class_of(out: &[Vec<bool>], t: [usize; 3]) -> u8 {
    let outdeg: Vec<usize> = (0..3).map(|i| (0..3).filter(|&j| j != i && out[t[i]][t[j]]).count()).collect();
    if outdeg.iter().all(|&d| d == 1) {
        0
    } else {
        1 + outdeg.iter().position(|&d| d == 1).unwrap() as u8
    }
}

/// Classes of the increasing triples of a tournament.
fn reduct_vector(out: &[Vec<bool>]) -> Vec<u8> {
    increasing_triples(out.len()).into_iter().map(|t| triple_class_of(out, t)).collect()
}

/// All reduct vectors of tournaments on `n` vertices.
fn liftable(n: usize) -> HashSet<Vec<u8>> {
    (0..1u64 << (n * (n - 1) / 2)).map(|b| reduct_vector(&tournament(n, b))).collect()
}

/// Class vector of a structure over the four class symbols; 255 marks an
/// increasing triple with no class or several.
fn vector_of(s: &FinStructure) -> Vec<u8> {
    increasing_triples(s.size())
        .into_iter()
        .map(|t| {
            let hits: Vec<u8> = (0..4u8).filter(|&k| s.holds(k as usize, &t)).collect();
            if hits.len() == 1 {
                hits[0]
            } else {
                255
            }
        })
        .collect()
}

/// Class of the ordered triple `(a, b, c)` in the structure with
/// increasing-triple vector `v`.
fn ordered_class(v: &[u8], n: usize, t: [usize; 3]) -> u8 {
    let mut sorted = t;
    sorted.sort_unstable();
    let idx = increasing_triples(n).iter().position(|x| *x == sorted).unwrap();
    let k = v[idx];
    if k == 0 {
        return 0;
    }
    let middle = sorted[k as usize - 1];
    1 + t.iter().position(|&x| x == middle).unwrap() as u8
}

/// Vector of the substructure on `keep`, relabeled in the given order.
fn sub_vector(v: &[u8], n: usize, keep: &[usize]) -> Vec<u8> {
    increasing_triples(keep.len())
        .into_iter()
        .map(|[a, b, c]| ordered_class(v, n, [keep[a], keep[b], keep[c]]))
        .collect()
}

/// Least relabeling of a vector; equal for isomorphic structures.
fn canonical_vector(v: &[u8], n: usize) -> Vec<u8> {
    let mut best: Option<Vec<u8>> = None;
    any_injection(n, n, &mut |p| {
        let w = sub_vector(v, n, p);
        if best.as_ref().is_none_or(|b| w < *b) {
            best = Some(w);
        }
        false
    });
    best.unwrap()
}

fn json_usize(v: &Value) -> usize {
    v.as_u64().expect("integer") as usize
}

// ---- criteria ----

fn h_n_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        for n in 3..=7 {
            if build_h_n(n).unwrap() != h_n_by_definition(n) {
                return Err(format!("H_{n} differs from its definition"));
            }
        }
        let hs: Vec<FinStructure> = (3..=7).map(h_n_by_definition).collect();
        for (i, a) in hs.iter().enumerate() {
            for (j, b) in hs.iter().enumerate() {
                if embeds_ternary(a, b) != (i == j) {
                    return Err(format!("brute force disagrees on H_{} -> H_{}", i + 3, j + 3));
                }
            }
        }
        Ok("every injective map tried for all 25 ordered pairs".to_string())
    })();
    expect_pass(r, oracle)
}

fn class_count_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        for n in 4..=6usize {
            let triples = ordered_triples(n);
            let mut qualifying = 0;
            for bits in 0..1u64 << (n * (n - 1) / 2) {
                let out = tournament(n, bits);
                let classes: Vec<u8> = triples.iter().map(|&t| triple_class_of(&out, t)).collect();
                if !(classes.contains(&0) && classes.iter().any(|&c| c != 0)) {
                    continue;
                }
                qualifying += 1;
                let keys: HashSet<_> = triples.iter().map(|t| reversal_key(&out, t)).collect();
                if keys.len() != 4 {
                    return Err(format!("{n}-vertex tournament {bits} has {} classes", keys.len()));
                }
            }
            if json_usize(&r.details["qualifying"][n.to_string()]) != qualifying {
                return Err(format!("qualifying count on {n} vertices differs"));
            }
        }
        Ok("edge-pattern keys give 4 classes on every qualifying tournament".to_string())
    })();
    expect_pass(r, oracle)
}

fn triple_reduction_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        let positions = ordered_triples(4);
        let tuples: Vec<Vec<usize>> = (0..625).map(|x| vec![x / 125, x / 25 % 5, x / 5 % 5, x % 5]).collect();
        for bits in 0..1024 {
            let out = tournament(5, bits);
            let mut forward: HashMap<_, Vec<_>> = HashMap::new();
            let mut backward: HashMap<Vec<_>, _> = HashMap::new();
            for u in &tuples {
                let whole = reversal_key(&out, u);
                let parts: Vec<_> =
                    positions.iter().map(|p| reversal_key(&out, &[u[p[0]], u[p[1]], u[p[2]]])).collect();
                if *forward.entry(whole.clone()).or_insert_with(|| parts.clone()) != parts
                    || *backward.entry(parts).or_insert_with(|| whole.clone()) != whole
                {
                    return Err(format!("keys disagree on tournament {bits} at {u:?}"));
                }
            }
        }
        // The library relation against the key on random pairs.
        let mut rng = ChaCha8Rng::seed_from_u64(SEED);
        for _ in 0..2000 {
            let n = rng.gen_range(2..=7);
            let out = tournament(n, rng.gen_range(0..1u64 << (n * (n - 1) / 2)));
            let mut t = FinStructure::new(Signature::digraph(), n).unwrap();
            for i in 0..n {
                for j in 0..n {
                    if out[i][j] {
                        t.set(0, &[i, j], true).unwrap();
                    }
                }
            }
            let len = rng.gen_range(2..=6);
            let u: Vec<usize> = (0..len).map(|_| rng.gen_range(0..n)).collect();
            let v: Vec<usize> = if rng.gen() {
                u.iter().map(|&x| (x + rng.gen_range(0..2)) % n).collect()
            } else {
                (0..len).map(|_| rng.gen_range(0..n)).collect()
            };
            if approx_n_equal(&t, &u, &v).unwrap() != (reversal_key(&out, &u) == reversal_key(&out, &v)) {
                return Err(format!("reversal equivalence disagrees with the key on {u:?} {v:?}"));
            }
        }
        Ok("key-based partitions agree on all 1024 tournaments; 2000 random pairs agree".to_string())
    })();
    expect_pass(r, oracle)
}

/// Labeled 4-vertex vectors that no tournament realizes.
fn forbidden_four() -> Vec<Vec<u8>> {
    let lift = liftable(4);
    (0..256u32)
        .map(|x| (0..4).map(|i| (x >> (2 * i) & 3) as u8).collect::<Vec<u8>>())
        .filter(|v| !lift.contains(v))
        .collect()
}

fn library_constraints() -> Vec<Vec<u8>> {
    let age = AgeSpec::tournament_reducts();
    let rep = fraisse_core::age::constraints::enumerate_constraints(&age, 5, Budget::default()).expect("within budget");
    rep.constraints.iter().map(|c| vector_of(&c.structure)).collect()
}

fn constraint_size_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        // Every single triple class is liftable, so each forbidden
        // 4-vertex vector is a constraint.
        if liftable(3).len() != 4 {
            return Err("some 3-element structure is not liftable".into());
        }
        let forbidden = forbidden_four();
        let classes: BTreeSet<Vec<u8>> = forbidden.iter().map(|v| canonical_vector(v, 4)).collect();
        let lift4 = liftable(4);
        let lift5 = liftable(5);
        let mut five = 0;
        for x in 0..1u64 << 20 {
            let v: Vec<u8> = (0..10).map(|i| (x >> (2 * i) & 3) as u8).collect();
            if lift5.contains(&v) {
                continue;
            }
            let minimal = (0..5).all(|d| {
                let keep: Vec<usize> = (0..5).filter(|&u| u != d).collect();
                lift4.contains(&sub_vector(&v, 5, &keep))
            });
            five += minimal as usize;
        }
        if five != 0 {
            return Err(format!("{five} labeled 5-element constraints exist"));
        }
        let found: BTreeSet<Vec<u8>> = library_constraints().iter().map(|v| canonical_vector(v, 4)).collect();
        if found != classes {
            return Err(format!("library lists {} classes, brute force {}", found.len(), classes.len()));
        }
        Ok(format!(
            "{} labeled forbidden 4-vectors in {} classes; no 5-element constraint",
            forbidden.len(),
            classes.len()
        ))
    })();
    expect_pass(r, oracle)
}

/// Index of `sorted` among the increasing triples of `0..n`.
fn triple_index(n: usize, sorted: [usize; 3]) -> usize {
    increasing_triples(n).iter().position(|x| *x == sorted).unwrap()
}

/// Increasing triples of a 4-vertex vector at which every other class
/// leaves a structure no tournament realizes.
fn blocked_triples(v: &[u8], lift: &HashSet<Vec<u8>>) -> Vec<[usize; 3]> {
    increasing_triples(4)
        .into_iter()
        .filter(|&t| {
            let i = triple_index(4, t);
            (0..4u8).filter(|&k| k != v[i]).all(|k| {
                let mut w = v.to_vec();
                w[i] = k;
                !lift.contains(&w)
            })
        })
        .collect()
}

fn isolation_oracle(r: &CheckResult) -> Verdict {
    let lift = liftable(4);
    let constraints = library_constraints();
    let every_blocked = constraints.iter().all(|v| !blocked_triples(v, &lift).is_empty());
    let witnesses_blocked = r.details["classes"].as_array().is_some_and(|rows| {
        rows.len() == constraints.len()
            && rows.iter().zip(&constraints).all(|(row, v)| {
                let t: Vec<usize> =
                    row["witness_triple"].as_array().map_or(Vec::new(), |a| a.iter().map(json_usize).collect());
                t.len() == 3 && blocked_triples(v, &lift).contains(&[t[0], t[1], t[2]])
            })
    });
    // The failure must be the analyzed one: every constraint fails, at a
    // triple confirmed blocked by brute force over all 64 tournaments.
    if r.status == Status::Fail && every_blocked && witnesses_blocked {
        Verdict::KnownFailure(format!(
            "{}; brute force confirms a triple with all 3 alternatives unliftable in each of the {} constraints",
            r.summary,
            constraints.len()
        ))
    } else if r.status == Status::Pass {
        Verdict::Fail("check passed, contradicting the brute-force analysis".into())
    } else {
        Verdict::Fail(format!("failure does not match the analysis: {}", r.summary))
    }
}

fn reduct_amalgamation_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        let w = r.witness.as_ref().ok_or("no witness")?;
        let cx = &w["counterexample"];
        let a: FinStructure = serde_json::from_value(cx["a"].clone()).map_err(|e| e.to_string())?;
        let b: FinStructure = serde_json::from_value(cx["b"].clone()).map_err(|e| e.to_string())?;
        let amalgam: FinStructure = serde_json::from_value(cx["amalgam"].clone()).map_err(|e| e.to_string())?;
        for s in [&a, &b] {
            if s.size() >= 3 && !liftable(s.size()).contains(&vector_of(s)) {
                return Err("a side of the counterexample is not liftable".into());
            }
        }
        if amalgam.size() > 6 {
            return Err("amalgam exceeds 6 elements".into());
        }
        if !vector_of(&amalgam).contains(&255) {
            return Err("every amalgam triple has exactly one class".into());
        }
        Ok(format!("sides lift to tournaments; {}-element amalgam has an unclassified triple", amalgam.size()))
    })();
    expect_pass(r, oracle)
}

/// Bit `i`: whether the `i`-th increasing triple is a hyperedge.
fn parity_images(n: usize) -> HashSet<u64> {
    let triples = increasing_triples(n);
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
    (0..1u64 << pairs.len())
        .map(|g| {
            let edge = |x: usize, y: usize| {
                let k = pairs.iter().position(|&p| p == (x.min(y), x.max(y))).unwrap();
                g >> k & 1
            };
            triples
                .iter()
                .enumerate()
                .fold(0, |acc, (i, t)| acc | ((edge(t[0], t[1]) + edge(t[0], t[2]) + edge(t[1], t[2])) & 1) << i)
        })
        .collect()
}

/// Whether every 4-set spans an even number of hyperedges.
fn even_on_quadruples(n: usize, h: u64) -> bool {
    let triples = increasing_triples(n);
    let on = |t: [usize; 3]| h >> triples.iter().position(|x| *x == t).unwrap() & 1;
    (0..n).all(|a| {
        (a + 1..n).all(|b| {
            (b + 1..n)
                .all(|c| (c + 1..n).all(|d| (on([a, b, c]) + on([a, b, d]) + on([a, c, d]) + on([b, c, d])) % 2 == 0))
        })
    })
}

fn parity_identity_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        for n in 0..=5usize {
            let images = parity_images(n);
            let m = increasing_triples(n).len();
            let even: HashSet<u64> = (0..1u64 << m).filter(|&h| even_on_quadruples(n, h)).collect();
            if even != images {
                return Err(format!("parity images and even hypergraphs differ on {n} vertices"));
            }
            if json_usize(&r.details["per_size"][n]["permitted"]) != images.len() {
                return Err(format!("permitted count on {n} vertices differs"));
            }
        }
        Ok("parity images are the hypergraphs with even 4-sets; counts 1,1,1,2,8,64 agree".to_string())
    })();
    expect_pass(r, oracle)
}

/// Hyperedge count of a 4-vertex 3-hypergraph.
fn hyperedges(s: &FinStructure) -> usize {
    increasing_triples(4).iter().filter(|t| s.holds(0, *t)).count()
}

fn parity_isolation_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        for name in [CatalogName::C1, CatalogName::C3] {
            let c = catalog(name);
            // Toggling one triple changes the count by one, so the
            // neighbour has an even count and omits C1 and C3.
            if hyperedges(&c) % 2 != 1 {
                return Err(format!("{name:?} is not odd"));
            }
        }
        let free = &r.details["free"]["verdict"];
        let amalgam: FinStructure = serde_json::from_value(free["amalgam"].clone()).map_err(|e| e.to_string())?;
        let m = increasing_triples(amalgam.size());
        let bits = m.iter().enumerate().fold(0u64, |acc, (i, t)| acc | (amalgam.holds(0, t) as u64) << i);
        if even_on_quadruples(amalgam.size(), bits) {
            return Err("free amalgam is not forbidden".into());
        }
        Ok("both constraints are odd 4-sets; the free amalgam has an odd 4-set".to_string())
    })();
    expect_pass(r, oracle)
}

/// Every two distinct elements lie in a common related triple.
fn two_irreducible(s: &FinStructure) -> bool {
    let triples = ordered_triples(s.size());
    (0..s.size()).all(|x| {
        (0..s.size()).all(|y| x == y || triples.iter().any(|t| t.contains(&x) && t.contains(&y) && s.holds(0, t)))
    })
}

fn free_amalgamation_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        let k4 = catalog(CatalogName::K4);
        let hs = [h_n_by_definition(3), h_n_by_definition(5)];
        if !two_irreducible(&k4) || !hs.iter().all(two_irreducible) {
            return Err("a member is not 2-irreducible".into());
        }
        // The exhaustive route, sharing nothing with the irreducibility
        // shortcut, must also clear every union it can reach: all 5-element
        // ternary structures are out of reach without symmetry.
        let ages = [
            (AgeSpec::new(Signature::hypergraph(), vec![k4], MapKind::Embedding).unwrap(), 6),
            (AgeSpec::new(ternary_signature(), hs.to_vec(), MapKind::Embedding).unwrap(), 4),
        ];
        for (age, bound) in ages {
            let rep = check_amalgamation_exhaustive(&age, AmalgamationKind::Free, bound, Budget::default())
                .map_err(|e| e.to_string())?;
            if !rep.passed() {
                return Err(format!("exhaustive search disagrees within {bound}"));
            }
        }
        Ok("members 2-irreducible by direct check; exhaustive free amalgamation agrees within 6 and 4".to_string())
    })();
    expect_pass(r, oracle)
}

fn hypotheses_oracle(r: &CheckResult) -> Verdict {
    let h3 = h_n_by_definition(3);
    let h4 = h_n_by_definition(4);
    // Shifting by one lands in the nonzero elements, where every triple
    // is related.
    let shift_is_homomorphism =
        ordered_triples(4).iter().all(|t| !h3.holds(0, t) || h4.holds(0, &[t[0] + 1, t[1] + 1, t[2] + 1]));
    let k4_minus = catalog(CatalogName::K4Minus);
    let uncovered = !ordered_triples(4).iter().any(|t| {
        let mut s = t.to_vec();
        s.sort_unstable();
        s == [0, 1, 2] && k4_minus.holds(0, t)
    });
    let d = &r.details;
    let analyzed = r.status == Status::Fail
        && shift_is_homomorphism
        && uncovered
        && d["h_n_injective_homomorphism_form"]["passed"] == Value::Bool(false)
        && d["h_n_embedding_form"]["passed"] == Value::Bool(true)
        && d["k4_minus_k4"]["k4_minus_not_3_irreducible"] == Value::Bool(true);
    if analyzed {
        Verdict::KnownFailure(format!(
            "{}; x -> x+1 is an injective homomorphism H_3 -> H_4 by direct check, the embedding form holds, \
             and K4- fails 3-irreducibility at {{0,1,2}} as required",
            r.summary
        ))
    } else {
        Verdict::Fail(format!("outcome does not match the analysis: {}", r.summary))
    }
}

/// Minimal forbidden structures up to `max` elements, by brute force over
/// every labeled structure of one symmetric symbol of arity `r`.
fn brute_constraint_sizes(r: usize, max: usize, forbidden: impl Fn(usize, &[Vec<usize>], u64) -> bool) -> Vec<usize> {
    let mut sizes = Vec::new();
    for n in 0..=max {
        let sets: Vec<Vec<usize>> = fraisse_core::combin::subsets(n, r);
        for bits in 0..1u64 << sets.len() {
            if !forbidden(n, &sets, bits) {
                continue;
            }
            let minimal = (0..n).all(|d| {
                let keep: Vec<usize> = (0..n).filter(|&u| u != d).collect();
                let sub_sets: Vec<Vec<usize>> = fraisse_core::combin::subsets(n - 1, r);
                let sub = sub_sets.iter().enumerate().fold(0u64, |acc, (i, s)| {
                    let orig: Vec<usize> = s.iter().map(|&x| keep[x]).collect();
                    acc | (bits >> sets.iter().position(|t| *t == orig).unwrap() & 1) << i
                });
                !forbidden(n - 1, &sub_sets, sub)
            });
            if minimal {
                sizes.push(n);
            }
        }
    }
    sizes
}

fn randomness_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        let none = brute_constraint_sizes(2, 4, |_, _, _| false);
        let edgeless = brute_constraint_sizes(2, 4, |_, _, b| b != 0);
        let k4_free = brute_constraint_sizes(3, 4, |n, _, b| n == 4 && b == 15);
        // Random iff no constraint is larger than its arity.
        let verdicts =
            [none.iter().all(|&s| s <= 2), edgeless.iter().all(|&s| s <= 2), k4_free.iter().all(|&s| s <= 3)];
        if verdicts != [true, true, false] {
            return Err(format!("brute-force verdicts {verdicts:?}"));
        }
        let rows = r.details["ages"].as_array().ok_or("no rows")?;
        let lib: Vec<bool> = rows.iter().map(|x| x["random"] == Value::Bool(true)).collect();
        if lib != [true, false, true] {
            return Err(format!("library verdicts {lib:?}"));
        }
        Ok(format!("brute-force constraint sizes {none:?}, {edgeless:?}, {k4_free:?}"))
    })();
    expect_pass(r, oracle)
}

/// Equality pattern and related triples of a tuple, read directly.
fn ambient_type(m: &FinStructure, t: &[usize]) -> (Vec<usize>, Vec<bool>) {
    let pattern = t.iter().map(|x| t.iter().position(|y| y == x).unwrap()).collect();
    let rel = ordered_triples(t.len())
        .iter()
        .map(|p| {
            let x = [t[p[0]], t[p[1]], t[p[2]]];
            x[0] != x[1] && x[1] != x[2] && x[0] != x[2] && m.holds(0, &x)
        })
        .collect();
    (pattern, rel)
}

fn expansion_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        let g = suites::parity_approximation(SEED).map_err(|e| e.to_string())?;
        let m = &g.structure;
        let mut rng = ChaCha8Rng::seed_from_u64(SEED ^ 0x5eed);
        let mut equal = 0;
        for _ in 0..20 {
            let k = rng.gen_range(1..=2);
            let params = rand::seq::index::sample(&mut rng, m.size(), k).into_vec();
            let types: BTreeSet<QfType> =
                (0..m.size()).filter(|x| !params.contains(x)).map(|x| one_point_type(m, x, &params).unwrap()).collect();
            let mp = build_m_p(m, &params, &types.into_iter().collect::<Vec<_>>()).map_err(|e| e.to_string())?;
            let n = mp.structure.size();
            let b: Vec<usize> = (0..2).map(|_| rng.gen_range(0..n)).collect();
            let full = |t: &[usize]| -> Vec<usize> {
                t.iter().map(|&i| mp.elements[i]).chain(params.iter().copied()).collect()
            };
            for x in 0..n {
                for y in 0..n {
                    let c = [x, y];
                    let inner = mp.structure.qf_type(&b).unwrap() == mp.structure.qf_type(&c).unwrap();
                    let outer = ambient_type(m, &full(&b)) == ambient_type(m, &full(&c));
                    equal += inner as usize;
                    if inner != outer {
                        return Err(format!("mismatch at {b:?} {c:?} over {params:?}"));
                    }
                }
            }
        }
        Ok(format!("direct ambient comparison agrees on 20 samples ({equal} equal pairs)"))
    })();
    expect_pass(r, oracle)
}

fn equivalence_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        let g = suites::k4_free_approximation(SEED).map_err(|e| e.to_string())?;
        let m = &g.structure;
        let n = m.size();
        // With no parameter every pair has one type. Over a parameter a,
        // the only candidate is the link relation R(a, x, y), which must
        // fail to be a nontrivial equivalence.
        for a in 0..n {
            let others: Vec<usize> = (0..n).filter(|&x| x != a).collect();
            let linked = |x: usize, y: usize| x == y || m.holds(0, &[a, x, y]);
            let transitive = others.iter().all(|&x| {
                others.iter().all(|&y| others.iter().all(|&z| !(linked(x, y) && linked(y, z)) || linked(x, z)))
            });
            let some_pair = others.iter().any(|&x| others.iter().any(|&y| x != y && linked(x, y)));
            let some_gap = others.iter().any(|&x| others.iter().any(|&y| !linked(x, y)));
            if transitive && some_pair && some_gap {
                return Err(format!("the link of {a} is a nontrivial equivalence"));
            }
        }
        if r.details["candidates"] != 0 || r.details["finite_evidence"] != true {
            return Err("report does not record zero candidates as finite evidence".into());
        }
        Ok(format!("no link relation among {n} parameters is a nontrivial equivalence"))
    })();
    expect_pass(r, oracle)
}

fn binary_reduct_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        let g = suites::parity_approximation(SEED).map_err(|e| e.to_string())?;
        let m = &g.structure;
        let p = one_point_type(m, 1, &[0]).unwrap();
        let mp = build_m_p(m, &[0], &[p]).map_err(|e| e.to_string())?;
        let minus = reduct_m_p_minus(&mp);
        let n = minus.size();
        // Every binary symbol is the link of the parameter and no unary
        // symbol holds, so the reduct is a graph in six agreeing copies.
        let link = |x: usize, y: usize| m.holds(0, &[mp.elements[x], mp.elements[y], 0]);
        for (k, sym) in minus.signature().symbols().iter().enumerate() {
            for x in 0..n {
                if sym.arity == 1 && minus.holds(k, &[x]) {
                    return Err(format!("unary symbol {} holds", sym.name));
                }
                for y in 0..n {
                    if sym.arity == 2 && x != y && minus.holds(k, &[x, y]) != link(x, y) {
                        return Err(format!("symbol {} is not the link", sym.name));
                    }
                }
            }
        }
        // A structure whose pairs are permitted is a graph in agreeing
        // copies; if every graph on up to 4 vertices embeds in the link,
        // no constraint has 3 or 4 elements.
        for size in 3..=4usize {
            let pairs: Vec<(usize, usize)> = (0..size).flat_map(|j| (0..j).map(move |i| (i, j))).collect();
            for bits in 0..1u64 << pairs.len() {
                let edge = |i: usize, j: usize| {
                    bits >> pairs.iter().position(|&q| q == (i.min(j), i.max(j))).unwrap() & 1 == 1
                };
                let found = any_injection(size, n, &mut |f| pairs.iter().all(|&(i, j)| edge(i, j) == link(f[i], f[j])));
                if !found {
                    return Err(format!("a {size}-vertex graph does not embed in the link"));
                }
            }
        }
        let ratios: Vec<f64> = r.details["extension"]
            .as_array()
            .ok_or("no ratios")?
            .iter()
            .map(|x| x["ratio"].as_f64().unwrap())
            .collect();
        if ratios.len() != 3 || ratios.iter().any(|&x| x < EXTENSION_RATIO_FLOOR) {
            return Err(format!("ratios {ratios:?} below {EXTENSION_RATIO_FLOOR}"));
        }
        Ok(format!("reduct is the link graph; every graph on 3 and 4 vertices embeds; ratios {ratios:?}"))
    })();
    expect_pass(r, oracle)
}

fn determinism_oracle(r: &CheckResult) -> Verdict {
    let oracle = (|| {
        let ctx = Ctx { seed: SEED, budget: Budget::default() };
        let first = emit_report(&suites::run_suite("tournament-reduct", &ctx).unwrap(), Format::Json);
        let second = emit_report(&suites::run_suite("tournament-reduct", &ctx).unwrap(), Format::Json);
        if first != second {
            return Err("in-process rerun differs".into());
        }
        let run = || {
            Command::new(env!("CARGO_BIN_EXE_fraisse"))
                .args(["verify", "parity-age", "--format", "json", "--seed", "7"])
                .output()
                .expect("binary runs")
                .stdout
        };
        let (a, b) = (run(), run());
        if a.is_empty() || a != b {
            return Err("binary rerun differs".into());
        }
        Ok("in-process and binary reruns are byte-identical".to_string())
    })();
    expect_pass(r, oracle)
}
