//! Command-line parsing and dispatch.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fraisse_core::age::amalgamation::{check_amalgamation, AmalgamationKind, AmalgamationVerdict};
use fraisse_core::age::classify::is_random_age;
use fraisse_core::age::constraints::enumerate_constraints;
use fraisse_core::derived::catalog::{build_h_n, build_parity_hypergraph, catalog, graph, CatalogName};
use fraisse_core::derived::mp::one_point_type;
use fraisse_core::derived::tournament::{random_tournament, tournament_reduct};
use fraisse_core::equivalence::{search_definable_equivalence, EquivalenceLimits};
use fraisse_core::generic::{check_extension_property, grow_generic, GenericApprox, GrowthLog, DEFAULT_DEMAND_BOUND};
use fraisse_core::isolation::is_weakly_isolated;
use fraisse_core::morphism::automorphisms;
use fraisse_core::{canonicalize, AgeFile, AgeSpec, Budget, FinStructure, MapKind, Signature};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::report::{emit_report, Format, Status, SCHEMA_VERSION};
use crate::suites::{self, Ctx};

/// Exit code for malformed invocations and unreadable inputs.
pub const USAGE_ERROR: i32 = 64;

#[derive(Debug, Parser)]
#[command(name = "fraisse", version, about = "Ages, constraints and generic structures of finite relational languages")]
pub struct Cli {
    /// Seed for every randomized step.
    #[arg(long, global = true, env = "FRAISSE_SEED", default_value_t = 1)]
    pub seed: u64,
    /// Largest number of search nodes per check.
    #[arg(long, global = true, env = "FRAISSE_BUDGET_NODES", default_value_t = Budget::DEFAULT_NODES)]
    pub budget_nodes: u64,
    /// Wall-clock limit in seconds per check. Results under a time limit
    /// may differ between runs.
    #[arg(long, global = true, env = "FRAISSE_BUDGET_SECS")]
    pub budget_secs: Option<f64>,
    #[arg(long, global = true, env = "FRAISSE_FORMAT", value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Inspect or canonicalize a structure file.
    #[command(subcommand)]
    Structure(StructureCmd),
    /// Constraints, amalgamation and randomness of an age.
    #[command(subcommand)]
    Age(AgeCmd),
    /// Grow and check generic approximations.
    #[command(subcommand)]
    Generic(GenericCmd),
    /// Build catalog structures.
    #[command(subcommand)]
    Examples(ExamplesCmd),
    /// Classify a constraint as isolated, weakly isolated or neither.
    Isolation {
        /// Structure file of the constraint.
        #[arg(long)]
        constraint: PathBuf,
        /// Age file the constraint is forbidden in.
        #[arg(long)]
        age: PathBuf,
    },
    /// Search for equivalence relations built from 2-types over parameters.
    Eqrel {
        /// Structure file, or the output of `generic grow`.
        #[arg(long)]
        approx: PathBuf,
        /// Comma-separated parameter elements, at most two.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        params: Vec<usize>,
        /// Only search the type of this element; every type with at least
        /// four realizations otherwise.
        #[arg(long)]
        element: Option<usize>,
    },
    /// Run a verification suite.
    Verify {
        /// Suite name; see --list.
        #[arg(required_unless_present = "list")]
        suite: Option<String>,
        /// List the suites and their checks.
        #[arg(long)]
        list: bool,
    },
}

#[derive(Debug, Subcommand)]
pub enum StructureCmd {
    /// Size, relation counts, canonical form and automorphism count.
    Inspect {
        /// Structure file.
        file: PathBuf,
    },
    /// The canonical relabeling of the structure.
    Canonicalize {
        /// Structure file.
        file: PathBuf,
    },
}

#[derive(Debug, Args)]
pub struct AgeArg {
    /// Age file: signature plus forbidden members or an oracle.
    #[arg(long)]
    pub age: PathBuf,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum KindArg {
    Free,
    Disjoint,
    General,
}

#[derive(Debug, Subcommand)]
pub enum AgeCmd {
    /// Enumerate constraints up to a size.
    Constraints {
        #[command(flatten)]
        age: AgeArg,
        /// Largest structure size examined.
        #[arg(long, default_value_t = 4)]
        max_size: usize,
    },
    /// Bounded amalgamation check.
    Amalgamation {
        #[command(flatten)]
        age: AgeArg,
        #[arg(long, value_enum, default_value_t = KindArg::Free)]
        kind: KindArg,
        /// Largest union size examined.
        #[arg(long, default_value_t = 5)]
        max_size: usize,
    },
    /// Classify the age as random from its constraints up to a size.
    Randomness {
        #[command(flatten)]
        age: AgeArg,
        /// Largest structure size examined.
        #[arg(long, default_value_t = 4)]
        max_size: usize,
    },
    /// Whether a structure belongs to the age.
    Permitted {
        #[command(flatten)]
        age: AgeArg,
        /// Structure file.
        #[arg(long)]
        structure: PathBuf,
    },
}

#[derive(Debug, Subcommand)]
pub enum GenericCmd {
    /// Grow an approximation by a number of elements.
    Grow {
        #[command(flatten)]
        age: AgeArg,
        /// Elements to add.
        #[arg(long)]
        steps: usize,
        /// Largest subset whose extension demands are scheduled.
        #[arg(long, default_value_t = DEFAULT_DEMAND_BOUND)]
        demand_bound: usize,
    },
    /// Fraction of extension demands of one size realized in a structure.
    ExtensionCheck {
        #[command(flatten)]
        age: AgeArg,
        /// Structure file, or the output of `generic grow`.
        #[arg(long)]
        approx: PathBuf,
        /// Size of the subsets whose one-point extensions are checked.
        #[arg(long)]
        demand_size: usize,
        /// Subsets sampled when there are more.
        #[arg(long, default_value_t = 1000)]
        sample: usize,
    },
    /// Rebuild an approximation from a growth log.
    Replay {
        #[command(flatten)]
        age: AgeArg,
        /// A growth log, or the output of `generic grow`.
        #[arg(long)]
        log: PathBuf,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum ExampleKind {
    /// H_n on n + 1 elements.
    #[value(name = "h_n")]
    HN,
    /// Parity hypergraph of a random graph on n vertices, or a generic
    /// approximation of the C1/C3-free age when --steps is given.
    Parity,
    /// Reversal-class reduct of a random tournament on n vertices.
    TournamentReduct,
    /// Generic approximation of the K4-free age.
    TetrahedronFree,
}

#[derive(Debug, Subcommand)]
pub enum ExamplesCmd {
    /// Build one example structure.
    Build {
        #[arg(value_enum)]
        kind: ExampleKind,
        /// Size parameter.
        #[arg(long)]
        n: Option<usize>,
        /// Growth steps for generic approximations.
        #[arg(long)]
        steps: Option<usize>,
    },
}

/// What a command printed and how it ended.
struct Reply {
    value: Value,
    status: Status,
    /// Output meant as input to later commands: JSON in every format.
    data: bool,
}

impl Reply {
    fn ok(value: Value) -> Self {
        Reply { value, status: Status::Pass, data: false }
    }

    fn data(value: Value) -> Self {
        Reply { value, status: Status::Pass, data: true }
    }
}

/// Parses `args`, runs the command, writes its output to `out` and returns
/// the exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { USAGE_ERROR } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { err.write_all(text.as_bytes()) } else { out.write_all(text.as_bytes()) };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        // A reader that stopped early, as with `| head`, is not an error.
        Err(e) if e.downcast_ref::<std::io::Error>().is_some_and(|io| io.kind() == std::io::ErrorKind::BrokenPipe) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            USAGE_ERROR
        }
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> anyhow::Result<i32> {
    let budget = Budget { max_nodes: cli.budget_nodes, max_secs: cli.budget_secs };
    if let Command::Verify { suite, list } = &cli.command {
        if *list {
            for name in suites::suite_names() {
                writeln!(out, "{name}")?;
            }
            return Ok(0);
        }
        let name = suite.as_deref().expect("required unless --list");
        let report = suites::run_suite(name, &Ctx { seed: cli.seed, budget })
            .ok_or_else(|| anyhow!("unknown suite {name}; known: {}", suites::suite_names().join(", ")))?;
        out.write_all(emit_report(&report, cli.format).as_bytes())?;
        return Ok(report.status.exit_code());
    }
    let reply = dispatch(cli, budget)?;
    let mut value = reply.value;
    if let Value::Object(map) = &mut value {
        // Versioned envelope, with the version first.
        let mut with_version = serde_json::Map::new();
        with_version.insert("schema_version".into(), json!(SCHEMA_VERSION));
        with_version.append(map);
        value = Value::Object(with_version);
    }
    match if reply.data { Format::Json } else { cli.format } {
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&value)?)?,
        Format::Text => out.write_all(render_text(&value).as_bytes())?,
    }
    Ok(reply.status.exit_code())
}

/// One `key: value` line per top-level field; nested values longer than
/// a line are summarized by their length.
fn render_text(v: &Value) -> String {
    const TEXT_INLINE_WIDTH: usize = 72;
    let Value::Object(map) = v else {
        return format!("{v}\n");
    };
    let mut s = String::new();
    for (k, x) in map {
        let compact = x.to_string();
        let shown = match x {
            Value::Array(_) | Value::Object(_) if compact.len() <= TEXT_INLINE_WIDTH => compact,
            Value::Array(a) => format!("[{} items]", a.len()),
            Value::Object(o) => format!("{{{} fields}}", o.len()),
            Value::String(t) => t.clone(),
            other => other.to_string(),
        };
        s.push_str(&format!("{k}: {shown}\n"));
    }
    s
}

fn read_json(path: &Path) -> anyhow::Result<Value> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

/// A structure file, or any JSON object holding one under `structure`.
fn read_structure(path: &Path) -> anyhow::Result<FinStructure> {
    let mut v = read_json(path)?;
    if let Some(inner) = v.get_mut("structure") {
        v = inner.take();
    }
    serde_json::from_value(v).with_context(|| format!("{} is not a structure", path.display()))
}

fn read_age(path: &Path) -> anyhow::Result<AgeSpec> {
    let file: AgeFile =
        serde_json::from_value(read_json(path)?).with_context(|| format!("{} is not an age", path.display()))?;
    Ok(file.into_age()?)
}

fn to_value<T: Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializes")
}

fn dispatch(cli: &Cli, budget: Budget) -> anyhow::Result<Reply> {
    Ok(match &cli.command {
        Command::Structure(StructureCmd::Inspect { file }) => {
            let s = read_structure(file)?;
            let c = canonicalize(&s);
            let relations: serde_json::Map<String, Value> = s
                .signature()
                .symbols()
                .iter()
                .enumerate()
                .map(|(i, sym)| (sym.name.clone(), json!(s.tuple_count(i))))
                .collect();
            Reply::ok(json!({
                "size": s.size(),
                "symbols": s.signature().len(),
                "tuples": relations,
                "canonical_form": c.form.to_hex(),
                "automorphisms": automorphisms(&s).len(),
            }))
        }
        Command::Structure(StructureCmd::Canonicalize { file }) => {
            let s = read_structure(file)?;
            let c = canonicalize(&s);
            Reply::data(json!({ "structure": c.structure(&s), "canonical_form": c.form.to_hex() }))
        }
        Command::Age(cmd) => age_command(cmd, budget)?,
        Command::Generic(cmd) => generic_command(cmd, cli.seed)?,
        Command::Examples(ExamplesCmd::Build { kind, n, steps }) => {
            Reply::data(json!({ "structure": build_example(*kind, *n, cli.seed, *steps)? }))
        }
        Command::Isolation { constraint, age } => {
            let c = read_structure(constraint)?;
            let age = read_age(age)?;
            Reply::ok(to_value(&is_weakly_isolated(&c, &age)?))
        }
        Command::Eqrel { approx, params, element } => {
            let s = read_structure(approx)?;
            let mut reports = Vec::new();
            let types = match element {
                Some(x) => vec![one_point_type(&s, *x, params)?],
                None => {
                    let mut counts = std::collections::BTreeMap::new();
                    for x in (0..s.size()).filter(|x| !params.contains(x)) {
                        *counts.entry(one_point_type(&s, x, params)?).or_insert(0usize) += 1;
                    }
                    counts.into_iter().filter(|(_, c)| *c >= 4).map(|(t, _)| t).collect()
                }
            };
            let mut found = 0;
            for p in &types {
                let r = search_definable_equivalence(&s, params, p, EquivalenceLimits::default())?;
                found += r.candidates.len();
                reports.push(r);
            }
            Reply::ok(
                json!({ "types_searched": types.len(), "candidates": found, "finite_evidence": true, "reports": reports }),
            )
        }
        Command::Verify { .. } => unreachable!("handled before dispatch"),
    })
}

fn age_command(cmd: &AgeCmd, budget: Budget) -> anyhow::Result<Reply> {
    Ok(match cmd {
        AgeCmd::Constraints { age, max_size } => {
            let age = read_age(&age.age)?;
            match enumerate_constraints(&age, *max_size, budget) {
                Ok(r) => Reply::ok(to_value(&r)),
                Err(t) => Reply {
                    value: json!({ "truncated": true, "partial": t.partial }),
                    status: Status::Truncated,
                    data: false,
                },
            }
        }
        AgeCmd::Amalgamation { age, kind, max_size } => {
            let age = read_age(&age.age)?;
            let kind = match kind {
                KindArg::Free => AmalgamationKind::Free,
                KindArg::Disjoint => AmalgamationKind::Disjoint,
                KindArg::General => AmalgamationKind::General,
            };
            let r = check_amalgamation(&age, kind, *max_size, budget)?;
            let status = match r.verdict {
                AmalgamationVerdict::Pass { .. } => Status::Pass,
                AmalgamationVerdict::Counterexample(_) => Status::Fail,
                AmalgamationVerdict::Truncated { .. } => Status::Truncated,
            };
            Reply { value: to_value(&r), status, data: false }
        }
        AgeCmd::Randomness { age, max_size } => {
            let age = read_age(&age.age)?;
            let r = enumerate_constraints(&age, *max_size, budget).map_err(|t| {
                anyhow!("constraint enumeration ran out of budget after {} elements", t.partial.complete_through)
            })?;
            let structures: Vec<FinStructure> = r.constraints.iter().map(|c| c.structure.clone()).collect();
            let verdict = is_random_age(&structures, age.signature());
            Reply::ok(
                json!({ "complete_through": r.complete_through, "constraints": structures.len(), "verdict": verdict }),
            )
        }
        AgeCmd::Permitted { age, structure } => {
            let age = read_age(&age.age)?;
            let s = read_structure(structure)?;
            let reason = age.why_forbidden(&s);
            Reply::ok(json!({ "permitted": reason.is_none(), "reason": reason }))
        }
    })
}

fn generic_command(cmd: &GenericCmd, seed: u64) -> anyhow::Result<Reply> {
    Ok(match cmd {
        GenericCmd::Grow { age, steps, demand_bound } => {
            let age = read_age(&age.age)?;
            let g = grow_generic(&age, *steps, seed, *demand_bound)?;
            Reply::data(json!({ "structure": g.structure, "log": g.growth_log() }))
        }
        GenericCmd::ExtensionCheck { age, approx, demand_size, sample } => {
            let age = read_age(&age.age)?;
            let s = read_structure(approx)?;
            Reply::ok(to_value(&check_extension_property(&age, &s, *demand_size, *sample, seed)?))
        }
        GenericCmd::Replay { age, log } => {
            let age = read_age(&age.age)?;
            let mut v = read_json(log)?;
            if let Some(inner) = v.get_mut("log") {
                v = inner.take();
            }
            let log: GrowthLog = serde_json::from_value(v).context("not a growth log")?;
            let g = GenericApprox::replay(age, &log)?;
            Reply::data(json!({ "structure": g.structure, "canonical_form": canonicalize(&g.structure).form.to_hex() }))
        }
    })
}

fn build_example(kind: ExampleKind, n: Option<usize>, seed: u64, steps: Option<usize>) -> anyhow::Result<FinStructure> {
    let need_n = || n.ok_or_else(|| anyhow!("--n is required for this example"));
    let hyper = || -> anyhow::Result<AgeSpec> {
        Ok(AgeSpec::new(
            Signature::hypergraph(),
            vec![catalog(CatalogName::C1), catalog(CatalogName::C3)],
            MapKind::Embedding,
        )?)
    };
    Ok(match kind {
        ExampleKind::HN => build_h_n(need_n()?)?,
        ExampleKind::Parity => match steps {
            Some(k) => grow_generic(&hyper()?, k, seed, DEFAULT_DEMAND_BOUND)?.structure,
            None => {
                let n = need_n()?;
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut edges = Vec::new();
                for j in 0..n {
                    for i in 0..j {
                        if rng.gen::<bool>() {
                            edges.push([i, j]);
                        }
                    }
                }
                build_parity_hypergraph(&graph(n, &edges)?)?
            }
        },
        ExampleKind::TournamentReduct => tournament_reduct(&random_tournament(need_n()?, seed))?,
        ExampleKind::TetrahedronFree => {
            let Some(k) = steps else { bail!("--steps is required for tetrahedron-free") };
            let age = AgeSpec::new(Signature::hypergraph(), vec![catalog(CatalogName::K4)], MapKind::Embedding)?;
            grow_generic(&age, k, seed, DEFAULT_DEMAND_BOUND)?.structure
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use clap::CommandFactory;

    #[test]
    fn command_definition_is_consistent() {
        Cli::command().debug_assert();
    }

    #[test]
    fn usage_errors_exit_64() {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        assert_eq!(run(["fraisse", "no-such-command"], &mut out, &mut err), USAGE_ERROR);
        assert_eq!(run(["fraisse", "verify", "no-such-suite"], &mut out, &mut err), USAGE_ERROR);
        assert_eq!(run(["fraisse", "--help"], &mut out, &mut err), 0);
    }
}
