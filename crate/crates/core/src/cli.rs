//! The `sse` command line tool: JSON in, JSON report out.
//!
//! Exit status is 0 when the report verifies, 1 when it refutes, 2 on input
//! errors and 3 when a resource bound is hit.

use std::path::PathBuf;
use std::sync::Arc;
use std::time::Instant;

use clap::{Parser, Subcommand};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Deserialize;
use serde_json::{Value, json};

use crate::cayley::FGGroupWindow;
use crate::code::BlockCode;
use crate::complex::{ExploreOptions, SSEPath, compose_path, explore, homotopic};
use crate::degenerate::{DegPath, normalize_path};
use crate::edge::{SSEEdge, code_between, code_from_edge, edge_from_code, triangle_equations};
use crate::error::{Error, Result};
use crate::freudenthal::{
    OrderedComplex, determinant_sign, enumerate_subdivision, homotopy_sides, subdivided_faces, subdivision_boundary,
};
use crate::gsft::{FiniteGroup, GroupRingMatrix, bar, hat};
use crate::matrix::NonnegMatrix;
use crate::refinement::{elementary_pool, verify_refinement_axioms};
use crate::shift::VertexShift;
use crate::williams::{MAX_STEPS, decompose_bounded};

/// Seed used by randomized commands when `--seed` is absent.
pub const DEFAULT_SEED: u64 = 1;

fn positive(s: &str) -> std::result::Result<usize, String> {
    match s.parse::<usize>() {
        Ok(0) => Err("must be positive".into()),
        Ok(n) => Ok(n),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Debug, Parser)]
#[command(name = "sse", version, about = "Strong shift equivalence toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Input JSON file; standard input when absent.
    #[arg(long, global = true)]
    pub input: Option<PathBuf>,
    /// Report file; standard output when absent.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Largest inner dimension of enumerated factorizations.
    #[arg(long, global = true, default_value_t = 6, value_parser = positive)]
    pub max_inner: usize,
    /// Largest matrix size admitted as a vertex.
    #[arg(long, global = true, default_value_t = 6, value_parser = positive)]
    pub max_size: usize,
    /// Seed of randomized checks.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Number of random trials.
    #[arg(long, global = true, default_value_t = 100, value_parser = positive)]
    pub trials: usize,
    /// Work bound: edges for explore and refine-axioms, steps for decompose.
    #[arg(long, global = true, value_parser = positive)]
    pub bound: Option<usize>,
    /// Rounds of edge enumeration for explore.
    #[arg(long, global = true, default_value_t = 1, value_parser = positive)]
    pub depth: usize,
    /// Add wall-clock time to the report.
    #[arg(long, global = true)]
    pub timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Check A = RS, B = SR for a candidate edge.
    VerifyEdge,
    /// Check the triangle equations of three edges.
    VerifyTriangle,
    /// Elementary conjugacy of an edge.
    Code,
    /// Edge of an elementary conjugacy.
    Extract,
    /// Path of elementary edges composing to a conjugacy.
    Decompose,
    /// Conjugacy of a path.
    ComposePath,
    /// Whether two paths with common ends are homotopic.
    Homotopic,
    /// A finite fragment of the complex around a matrix.
    Explore,
    /// Move a path with degenerate vertices onto cores.
    NormalizeDegenerate,
    /// Boolean block matrix of a matrix over a group ring.
    GsftBar,
    /// Group ring matrix of an invariant block matrix.
    GsftHat,
    /// Subdivision counts, chain map and homotopy identities.
    FreudenthalCheck,
    /// Refinement axioms on the elementary codes out of a matrix.
    RefineAxioms,
    /// Reduction schedule of a window in a Cayley graph.
    CayleySchedule,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::VerifyEdge => "verify-edge",
            Command::VerifyTriangle => "verify-triangle",
            Command::Code => "code",
            Command::Extract => "extract",
            Command::Decompose => "decompose",
            Command::ComposePath => "compose-path",
            Command::Homotopic => "homotopic",
            Command::Explore => "explore",
            Command::NormalizeDegenerate => "normalize-degenerate",
            Command::GsftBar => "gsft-bar",
            Command::GsftHat => "gsft-hat",
            Command::FreudenthalCheck => "freudenthal-check",
            Command::RefineAxioms => "refine-axioms",
            Command::CayleySchedule => "cayley-schedule",
        }
    }

    /// Commands that run without any input document.
    pub fn input_optional(self) -> bool {
        matches!(self, Command::FreudenthalCheck)
    }
}

/// A finished report and whether it verifies.
#[derive(Clone, Debug)]
pub struct Outcome {
    pub report: Value,
    pub verified: bool,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        if self.verified { 0 } else { 1 }
    }
}

fn to_value<T: serde::Serialize>(x: &T) -> Result<Value> {
    Ok(serde_json::to_value(x)?)
}

fn parse<T: for<'de> Deserialize<'de>>(input: &str) -> Result<T> {
    Ok(serde_json::from_str(input)?)
}

#[derive(Deserialize)]
struct RawEdge {
    #[serde(rename = "A")]
    a: Option<NonnegMatrix>,
    #[serde(rename = "B")]
    b: Option<NonnegMatrix>,
    #[serde(rename = "R")]
    r: NonnegMatrix,
    #[serde(rename = "S")]
    s: NonnegMatrix,
}

fn verify_edge(input: &str) -> Result<Outcome> {
    let raw: RawEdge = parse(input)?;
    let rs = raw.r.mul(&raw.s);
    let sr = raw.s.mul(&raw.r);
    let (rs, sr) = match (rs, sr) {
        (Ok(x), Ok(y)) => (x, y),
        (Err(e), _) | (_, Err(e)) => {
            return Ok(Outcome {
                report: json!({ "input": { "R": raw.r, "S": raw.s }, "valid": false, "reason": e.to_string() }),
                verified: false,
            });
        }
    };
    let a_ok = raw.a.as_ref().is_none_or(|a| *a == rs);
    let b_ok = raw.b.as_ref().is_none_or(|b| *b == sr);
    let factors_boolean = raw.r.is_boolean() && raw.s.is_boolean();
    let products_boolean = rs.is_boolean() && sr.is_boolean();
    let nondegenerate = rs.is_nondegenerate() && sr.is_nondegenerate();
    let valid = a_ok && b_ok && factors_boolean && products_boolean && nondegenerate;
    Ok(Outcome {
        report: json!({
            "input": { "A": raw.a, "B": raw.b, "R": raw.r, "S": raw.s },
            "checks": {
                "A_equals_RS": a_ok,
                "B_equals_SR": b_ok,
                "factors_boolean": factors_boolean,
                "products_boolean": products_boolean,
                "nondegenerate": nondegenerate,
            },
            "RS": rs,
            "SR": sr,
            "valid": valid,
        }),
        verified: valid,
    })
}

#[derive(Deserialize)]
struct RawTriangle {
    e1: RawEdge,
    e2: RawEdge,
    e3: RawEdge,
}

fn verify_triangle(input: &str) -> Result<Outcome> {
    let t: RawTriangle = parse(input)?;
    let eq = triangle_equations((&t.e1.r, &t.e1.s), (&t.e2.r, &t.e2.s), (&t.e3.r, &t.e3.s))?;
    let edges = [&t.e1, &t.e2, &t.e3].map(|e| SSEEdge::from_factors(e.r.clone(), e.s.clone()));
    let mut report = json!({
        "input": {
            "e1": { "R": t.e1.r, "S": t.e1.s },
            "e2": { "R": t.e2.r, "S": t.e2.s },
            "e3": { "R": t.e3.r, "S": t.e3.s },
        },
        "equations": eq,
    });
    if let [Ok(e1), Ok(e2), Ok(e3)] = &edges {
        let ends = e1.b() == e2.a() && e1.a() == e3.a() && e2.b() == e3.b();
        report["endpoints_match"] = json!(ends);
        if ends {
            let x = Arc::new(VertexShift::new(e1.a().clone())?);
            let y = Arc::new(VertexShift::new(e1.b().clone())?);
            let z = Arc::new(VertexShift::new(e2.b().clone())?);
            let composed = code_between(e1, x.clone(), y.clone())?.then(&code_between(e2, y, z.clone())?)?;
            let commutes = composed == code_between(e3, x, z)?;
            if commutes != eq.holds {
                return Err(Error::Invariant("triangle equations and code composition disagree".into()));
            }
            report["codes_commute"] = json!(commutes);
        }
    } else {
        report["endpoints_match"] = json!(false);
    }
    let verified = eq.holds && report["endpoints_match"] == json!(true);
    report["holds"] = json!(verified);
    Ok(Outcome { report, verified })
}

#[derive(Deserialize)]
struct PathPair {
    p: SSEPath,
    q: SSEPath,
}

#[derive(Deserialize)]
struct HatInput {
    group: FiniteGroup,
    matrix: NonnegMatrix,
}

#[derive(Deserialize, Default)]
struct FreudenthalInput {
    #[serde(default = "default_max_dim")]
    max_dim: usize,
}

fn default_max_dim() -> usize {
    4
}

fn freudenthal_check(input: &str, trials: usize, seed: u64) -> Result<Outcome> {
    let inp: FreudenthalInput = parse(input)?;
    if inp.max_dim == 0 || inp.max_dim > 6 {
        return Err(Error::InvalidChain("max_dim must lie in 1..=6".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut dims = Vec::new();
    let mut all = true;
    for n in 1..=inp.max_dim {
        let pieces = enumerate_subdivision(n);
        let vertices: std::collections::BTreeSet<Vec<u8>> = pieces.iter().flat_map(|p| p.vertices()).collect();
        let signs = pieces.iter().all(|p| determinant_sign(p) == p.sign);
        let chain_map = subdivision_boundary(n) == subdivided_faces(n)?;
        let k = OrderedComplex::simplex(n + 1);
        let mut failures = 0;
        for _ in 0..trials {
            let c = k.random_chain(&mut rng, n, 4, 5);
            let (lhs, rhs) = homotopy_sides(&c, &k)?;
            failures += usize::from(lhs != rhs);
        }
        let ok =
            pieces.len() == 1 << n && vertices.len() == (n + 1) * (n + 2) / 2 && signs && chain_map && failures == 0;
        all &= ok;
        dims.push(json!({
            "n": n,
            "pieces": pieces.len(),
            "vertices": vertices.len(),
            "signs_match_determinants": signs,
            "chain_map": chain_map,
            "homotopy_trials": trials,
            "homotopy_failures": failures,
            "passed": ok,
        }));
    }
    Ok(Outcome {
        report: json!({ "input": { "max_dim": inp.max_dim }, "seed": seed, "dimensions": dims, "passed": all }),
        verified: all,
    })
}

/// Runs one command on the text of its input document.
pub fn run(cli: &Cli, input: &str) -> Result<Outcome> {
    let cmd = cli.command;
    let start = Instant::now();
    let mut out = match cmd {
        Command::VerifyEdge => verify_edge(input)?,
        Command::VerifyTriangle => verify_triangle(input)?,
        Command::Code => {
            let e: SSEEdge = parse(input)?;
            let c = code_from_edge(&e)?;
            Outcome { report: json!({ "input": e, "code": c }), verified: true }
        }
        Command::Extract => {
            let c: BlockCode = parse(input)?;
            let mut report = json!({ "input": c, "elementary": c.is_elementary() });
            if c.is_elementary() {
                report["edge"] = to_value(&edge_from_code(&c)?)?;
            }
            Outcome { verified: c.is_elementary(), report }
        }
        Command::Decompose => {
            let c: BlockCode = parse(input)?;
            let d = decompose_bounded(&c, cli.bound.unwrap_or(MAX_STEPS))?;
            Outcome { report: json!({ "input": c, "decomposition": d, "recomposes": true }), verified: true }
        }
        Command::ComposePath => {
            let p: SSEPath = parse(input)?;
            let c = compose_path(&p)?;
            Outcome { report: json!({ "input": p, "is_loop": p.is_loop(), "composite": c }), verified: true }
        }
        Command::Homotopic => {
            let pq: PathPair = parse(input)?;
            let h = homotopic(&pq.p, &pq.q)?;
            Outcome { report: json!({ "input": { "p": pq.p, "q": pq.q }, "homotopic": h }), verified: h }
        }
        Command::Explore => {
            let a: NonnegMatrix = parse(input)?;
            let opts = ExploreOptions {
                max_inner: cli.max_inner,
                max_size: cli.max_size,
                depth: cli.depth,
                max_edges: cli.bound.unwrap_or(ExploreOptions::default().max_edges),
            };
            let f = explore(&a, &opts)?;
            Outcome { report: json!({ "input": a, "options": opts, "fragment": f }), verified: true }
        }
        Command::NormalizeDegenerate => {
            let p: DegPath = parse(input)?;
            let n = normalize_path(&p)?;
            let core = p.restrict_to_cores()?;
            let agree = match (core.to_sse_path(), n.to_sse_path()) {
                (Ok(a), Ok(b)) => Some(compose_path(&a)? == compose_path(&b)?),
                _ => None,
            };
            Outcome {
                verified: agree != Some(false) && n.is_nondegenerate(),
                report: json!({ "input": p, "normalized": n, "composites_agree": agree }),
            }
        }
        Command::GsftBar => {
            let a: GroupRingMatrix = parse(input)?;
            Outcome { report: json!({ "input": a, "bar": bar(&a) }), verified: true }
        }
        Command::GsftHat => {
            let h: HatInput = parse(input)?;
            let echo = json!({ "group": h.group, "matrix": h.matrix });
            match hat(&h.matrix, Arc::new(h.group)) {
                Ok(m) => Outcome { report: json!({ "input": echo, "invariant": true, "hat": m }), verified: true },
                Err(Error::NotInvariant(v)) => {
                    Outcome { report: json!({ "input": echo, "invariant": false, "violation": v }), verified: false }
                }
                Err(e) => return Err(e),
            }
        }
        Command::FreudenthalCheck => freudenthal_check(input, cli.trials, cli.seed)?,
        Command::RefineAxioms => {
            let a: NonnegMatrix = parse(input)?;
            let pool = elementary_pool(&a, cli.max_inner.min(3), cli.bound.unwrap_or(10_000))?;
            let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
            let r = verify_refinement_axioms(&pool, cli.trials, &mut rng)?;
            Outcome {
                verified: r.passed(),
                report: json!({ "input": a, "seed": cli.seed, "trials": cli.trials, "axioms": r, "passed": r.passed() }),
            }
        }
        Command::CayleySchedule => {
            let v: Value = parse(input)?;
            let w = FGGroupWindow::from_json(&v)?;
            let connected = w.is_connected();
            let mut report = json!({ "input": w.to_json(), "connected": connected });
            if connected && w.window().contains(&w.group().identity()) {
                let s = w.reduction_schedule()?;
                report["length"] = json!(s.len());
                report["schedule"] = w.schedule_json(&s);
            }
            Outcome { verified: report.get("schedule").is_some(), report }
        }
    };
    let mut full = json!({ "command": cmd.name() });
    if let (Value::Object(dst), Value::Object(src)) = (&mut full, std::mem::take(&mut out.report)) {
        dst.extend(src);
    }
    if cli.timing {
        full["elapsed_ms"] = json!(start.elapsed().as_secs_f64() * 1e3);
    }
    out.report = full;
    Ok(out)
}

/// The error report written when a command fails.
pub fn error_report(cmd: Command, e: &Error) -> Value {
    json!({ "command": cmd.name(), "error": e.to_string(), "exit_code": e.exit_code() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cli(cmd: &str) -> Cli {
        Cli::parse_from(["sse", cmd])
    }

    #[test]
    fn identity_triangle_verifies() {
        let i = json!({ "rows": 2, "cols": 2, "entries": [[1, 0], [0, 1]] });
        let a = json!({ "rows": 2, "cols": 2, "entries": [[1, 1], [1, 0]] });
        let e = json!({ "R": i, "S": a });
        let input = json!({ "e1": e, "e2": e, "e3": e }).to_string();
        let out = run(&cli("verify-triangle"), &input).unwrap();
        assert_eq!(out.exit_code(), 0);
        assert_eq!(out.report["codes_commute"], json!(true));
    }

    #[test]
    fn bad_edge_is_refuted() {
        let a = json!({ "rows": 2, "cols": 2, "entries": [[1, 1], [1, 0]] });
        let z = json!({ "rows": 2, "cols": 2, "entries": [[1, 0], [0, 0]] });
        let out = run(&cli("verify-edge"), &json!({ "R": a, "S": z }).to_string()).unwrap();
        assert_eq!(out.exit_code(), 1);
        assert_eq!(out.report["checks"]["nondegenerate"], json!(false));
    }

    #[test]
    fn reports_are_reproducible() {
        let a = json!({ "rows": 2, "cols": 2, "entries": [[1, 1], [1, 0]] }).to_string();
        let c = Cli::parse_from(["sse", "explore", "--max-inner", "3", "--max-size", "3"]);
        let x = run(&c, &a).unwrap().report.to_string();
        let y = run(&c, &a).unwrap().report.to_string();
        assert_eq!(x, y);
    }

    #[test]
    fn bounds_must_be_positive() {
        assert!(Cli::try_parse_from(["sse", "explore", "--max-inner", "0"]).is_err());
    }

    #[test]
    fn malformed_input_is_an_input_error() {
        let e = run(&cli("gsft-bar"), "{").unwrap_err();
        assert_eq!(e.exit_code(), 2);
    }
}
