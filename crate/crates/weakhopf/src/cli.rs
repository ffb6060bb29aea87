//! The `.wha` presentation format and the command-line surface.
//!
//! A presentation file carries an algebra by sparse structure constants and
//! a coproduct by the λ/ρ actions of each Δ(eᵢ) on the tensor square —
//! the lossless encoding of a multiplier-valued map. Serialization is
//! canonical (fixed field order, sorted sparse entries, exact fraction
//! scalars), so fixtures diff cleanly and reports are byte-stable.

use std::fmt::Write as _;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::algebra_core::{FinAlgebra, Functional, Multiplier};
use crate::coproduct::Coproduct;
use crate::error::{Error, Result};
use crate::exact_linalg::{Matrix, Scalar, SparseVec};
use crate::groupoids::{groupoid_algebra, FiniteGroupoid, SmallGroup};
use crate::integrals::IntegralSpace;
use crate::larson_sweedler::full_pipeline;
use crate::separability::SeparabilityStructure;

/// A parsed presentation: the validated domain objects plus the optional
/// extras the file may carry.
#[derive(Debug)]
pub struct Presentation {
    pub algebra: FinAlgebra,
    pub coproduct: Coproduct,
    pub counit: Option<Functional>,
    pub metadata: Vec<(String, String)>,
}

fn write_sparse_matrix(out: &mut String, m: &Matrix) {
    let mut entries = Vec::new();
    for j in 0..m.cols() {
        for (i, v) in m.col(j).iter() {
            entries.push((i, j, v.clone()));
        }
    }
    entries.sort_by_key(|(i, j, _)| (*i, *j));
    let _ = writeln!(out, "{}", entries.len());
    for (i, j, v) in entries {
        let _ = writeln!(out, "{i} {j} {}", v.to_canonical_string());
    }
}

/// Canonical text form of a presentation. Field order: dim, basis_names,
/// structure_constants, coproduct, counit?, involution?, metadata?.
pub fn serialize(p: &Presentation) -> String {
    let n = p.algebra.dim();
    let mut out = String::new();
    let _ = writeln!(out, "dim {n}");
    let _ = writeln!(out, "basis_names {}", p.algebra.basis_names().join(" "));
    let mut constants = Vec::new();
    for i in 0..n {
        for j in 0..n {
            for (k, v) in p.algebra.product_basis(i, j).iter() {
                constants.push((i, j, k, v.clone()));
            }
        }
    }
    let _ = writeln!(out, "structure_constants {}", constants.len());
    for (i, j, k, v) in constants {
        let _ = writeln!(out, "{i} {j} {k} {}", v.to_canonical_string());
    }
    for i in 0..n {
        let m = p.coproduct.delta_of(&SparseVec::unit(n, i));
        let _ = writeln!(out, "coproduct {i}");
        out.push_str("lambda ");
        write_sparse_matrix(&mut out, m.lambda());
        out.push_str("rho ");
        write_sparse_matrix(&mut out, m.rho());
    }
    if let Some(eps) = &p.counit {
        let values: Vec<String> = (0..n)
            .map(|k| eps.eval(&SparseVec::unit(n, k)).to_canonical_string())
            .collect();
        let _ = writeln!(out, "counit {}", values.join(" "));
    }
    if let Some(inv) = p.algebra.involution() {
        out.push_str("involution ");
        write_sparse_matrix(&mut out, inv);
    }
    if !p.metadata.is_empty() {
        let _ = writeln!(out, "metadata {}", p.metadata.len());
        for (k, v) in &p.metadata {
            let _ = writeln!(out, "{k} {v}");
        }
    }
    out
}

struct Lines<'a> {
    iter: std::iter::Enumerate<std::str::Lines<'a>>,
}

impl<'a> Lines<'a> {
    fn new(text: &'a str) -> Self {
        Lines {
            iter: text.lines().enumerate(),
        }
    }

    fn next(&mut self) -> Option<(usize, &'a str)> {
        for (idx, raw) in self.iter.by_ref() {
            let line = raw.trim();
            if !line.is_empty() && !line.starts_with('#') {
                return Some((idx + 1, line));
            }
        }
        None
    }

    fn expect(&mut self, what: &str) -> Result<(usize, &'a str)> {
        self.next().ok_or_else(|| Error::Parse {
            line: 0,
            message: format!("unexpected end of file, expected {what}"),
        })
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn parse_usize(line: usize, tok: &str, what: &str) -> Result<usize> {
    tok.parse()
        .map_err(|_| parse_err(line, format!("expected {what}, found `{tok}`")))
}

fn parse_sparse_matrix(
    lines: &mut Lines,
    count_tok: &str,
    line: usize,
    dim: usize,
) -> Result<Matrix> {
    let count = parse_usize(line, count_tok, "an entry count")?;
    let mut cols: Vec<Vec<(usize, Scalar)>> = vec![Vec::new(); dim];
    for _ in 0..count {
        let (ln, entry) = lines.expect("a matrix entry")?;
        let toks: Vec<&str> = entry.split_whitespace().collect();
        if toks.len() != 3 {
            return Err(parse_err(ln, "matrix entry must be `row col scalar`"));
        }
        let i = parse_usize(ln, toks[0], "a row index")?;
        let j = parse_usize(ln, toks[1], "a column index")?;
        if i >= dim || j >= dim {
            return Err(parse_err(ln, "matrix index out of range"));
        }
        cols[j].push((i, Scalar::from_str(toks[2])?));
    }
    Ok(Matrix::from_cols(
        dim,
        cols.into_iter()
            .map(|entries| SparseVec::from_entries(dim, entries))
            .collect(),
    ))
}

/// Parses the canonical text form, validating every algebra and coproduct
/// invariant on the way.
pub fn parse(text: &str) -> Result<Presentation> {
    let mut lines = Lines::new(text);
    let (ln, dim_line) = lines.expect("`dim`")?;
    let n = match dim_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["dim", v] => parse_usize(ln, v, "a dimension")?,
        _ => return Err(parse_err(ln, "expected `dim <n>`")),
    };
    if n == 0 {
        return Err(parse_err(ln, "dimension must be positive"));
    }
    let (ln, names_line) = lines.expect("`basis_names`")?;
    let names: Vec<String> = match names_line.strip_prefix("basis_names") {
        Some(rest) => rest.split_whitespace().map(str::to_string).collect(),
        None => return Err(parse_err(ln, "expected `basis_names ...`")),
    };
    if names.len() != n {
        return Err(parse_err(ln, format!("expected {n} basis names")));
    }
    let (ln, sc_line) = lines.expect("`structure_constants`")?;
    let count = match sc_line.split_whitespace().collect::<Vec<_>>().as_slice() {
        ["structure_constants", v] => parse_usize(ln, v, "a count")?,
        _ => return Err(parse_err(ln, "expected `structure_constants <count>`")),
    };
    let mut constants = Vec::with_capacity(count);
    for _ in 0..count {
        let (ln, entry) = lines.expect("a structure constant")?;
        let toks: Vec<&str> = entry.split_whitespace().collect();
        if toks.len() != 4 {
            return Err(parse_err(ln, "structure constant must be `i j k scalar`"));
        }
        let i = parse_usize(ln, toks[0], "an index")?;
        let j = parse_usize(ln, toks[1], "an index")?;
        let k = parse_usize(ln, toks[2], "an index")?;
        if i >= n || j >= n || k >= n {
            return Err(parse_err(ln, "structure constant index out of range"));
        }
        constants.push((i, j, k, Scalar::from_str(toks[3])?));
    }
    let mut delta: Vec<Option<Multiplier>> = vec![None; n];
    let mut counit = None;
    let mut involution = None;
    let mut metadata = Vec::new();
    while let Some((ln, line)) = lines.next() {
        let toks: Vec<&str> = line.split_whitespace().collect();
        match toks.as_slice() {
            ["coproduct", v] => {
                let i = parse_usize(ln, v, "a basis index")?;
                if i >= n {
                    return Err(parse_err(ln, "coproduct index out of range"));
                }
                let (lln, lam_line) = lines.expect("`lambda`")?;
                let lam_count = lam_line
                    .strip_prefix("lambda")
                    .map(str::trim)
                    .ok_or_else(|| parse_err(lln, "expected `lambda <count>`"))?;
                let lambda = parse_sparse_matrix(&mut lines, lam_count, lln, n * n)?;
                let (rln, rho_line) = lines.expect("`rho`")?;
                let rho_count = rho_line
                    .strip_prefix("rho")
                    .map(str::trim)
                    .ok_or_else(|| parse_err(rln, "expected `rho <count>`"))?;
                let rho = parse_sparse_matrix(&mut lines, rho_count, rln, n * n)?;
                delta[i] = Some(Multiplier::new(lambda, rho));
            }
            ["counit", ..] => {
                let values = &toks[1..];
                if values.len() != n {
                    return Err(parse_err(ln, format!("expected {n} counit values")));
                }
                let coeffs: Result<Vec<Scalar>> =
                    values.iter().map(|v| Scalar::from_str(v)).collect();
                counit = Some(Functional::new(SparseVec::from_dense(&coeffs?)));
            }
            ["involution", v] => {
                involution = Some(parse_sparse_matrix(&mut lines, v, ln, n)?);
            }
            ["metadata", v] => {
                let count = parse_usize(ln, v, "a count")?;
                for _ in 0..count {
                    let (mln, entry) = lines.expect("a metadata line")?;
                    let (key, value) = entry
                        .split_once(' ')
                        .ok_or_else(|| parse_err(mln, "metadata line must be `key value`"))?;
                    metadata.push((key.to_string(), value.trim().to_string()));
                }
            }
            _ => return Err(parse_err(ln, format!("unrecognized section `{}`", toks[0]))),
        }
    }
    let algebra = FinAlgebra::from_structure_constants(names, constants, involution);
    if let Some((i, j, k)) = algebra.associativity_witness() {
        return Err(Error::InvariantViolation {
            law: "associativity".into(),
            witness: vec![i, j, k],
        });
    }
    let delta: Result<Vec<Multiplier>> = delta
        .into_iter()
        .enumerate()
        .map(|(i, m)| {
            m.ok_or_else(|| parse_err(0, format!("missing coproduct block for basis element {i}")))
        })
        .collect();
    let coproduct = Coproduct::new(algebra.clone(), delta?)?;
    Ok(Presentation {
        algebra,
        coproduct,
        counit,
        metadata,
    })
}

#[derive(Parser)]
#[command(name = "weakhopf", disable_help_subcommand = true)]
#[command(about = "Exact verification of weak multiplier bialgebra presentations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the full verification pipeline on a presentation file
    Check {
        file: String,
        /// Write the report to a file instead of stdout
        #[arg(long)]
        report: Option<String>,
        /// Emit the report as JSON
        #[arg(long)]
        json: bool,
    },
    /// Solve the invariance conditions and report dimensions/faithfulness
    Integrals { file: String },
    /// Construct the counit and antipode and write them to a result file
    Construct {
        file: String,
        #[arg(long)]
        out: String,
    },
    /// Generate presentation fixtures
    Gen {
        #[command(subcommand)]
        what: GenCommand,
    },
}

#[derive(Subcommand)]
enum GenCommand {
    /// A groupoid algebra with group-like coproduct
    Groupoid(GenGroupoid),
    /// The function algebra dual of a groupoid-algebra fixture
    Dual {
        file: String,
        #[arg(long)]
        out: String,
    },
}

#[derive(Args)]
struct GenGroupoid {
    /// Number of objects of the transitive part
    #[arg(long)]
    objects: usize,
    /// Isotropy group: C1, C2, C3, C4 or V4
    #[arg(long)]
    group: String,
    /// Use a seeded random disjoint union instead of a single component
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: String,
}

#[derive(Serialize)]
struct StageDoc {
    name: String,
    passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
}

#[derive(Serialize)]
struct ReportDoc {
    verdict: String,
    hopf_special_case: bool,
    stages: Vec<StageDoc>,
}

fn parse_group(name: &str) -> Result<SmallGroup> {
    match name {
        "C1" => Ok(SmallGroup::C1),
        "C2" => Ok(SmallGroup::C2),
        "C3" => Ok(SmallGroup::C3),
        "C4" => Ok(SmallGroup::C4),
        "V4" => Ok(SmallGroup::V4),
        _ => Err(Error::Unsupported(format!("unknown group `{name}`"))),
    }
}

fn load(path: &str) -> Result<Presentation> {
    let text = std::fs::read_to_string(path)?;
    parse(&text)
}

fn groupoid_presentation(g: &FiniteGroupoid, meta: Vec<(String, String)>) -> Result<Presentation> {
    let model = groupoid_algebra(g)?;
    Ok(Presentation {
        algebra: model.algebra,
        coproduct: model.coproduct,
        counit: Some(model.expected_counit),
        metadata: meta,
    })
}

/// Rebuilds the composition table of a groupoid-algebra fixture (every
/// basis product is a basis element or zero) and emits its function-algebra
/// dual.
fn dual_presentation(p: &Presentation) -> Result<Presentation> {
    let alg = &p.algebra;
    let n = alg.dim();
    let mut compose = vec![vec![None; n]; n];
    for i in 0..n {
        for j in 0..n {
            let prod = alg.product_basis(i, j);
            let mut it = prod.iter();
            match (it.next(), it.next()) {
                (None, _) => {}
                (Some((k, v)), None) if *v == Scalar::one() => compose[i][j] = Some(k),
                _ => {
                    return Err(Error::Unsupported(
                        "dual generation needs a groupoid-algebra fixture \
                         (all basis products must be basis elements or zero)"
                            .into(),
                    ))
                }
            }
        }
    }
    let names = alg.basis_names().iter().map(|s| format!("d_{s}")).collect();
    let constants = (0..n).map(|i| (i, i, i, Scalar::one()));
    let dual_alg =
        FinAlgebra::from_structure_constants(names, constants, Some(Matrix::identity(n)));
    let sq = crate::algebra_core::tensor_square(&dual_alg);
    let mut delta_elems: Vec<SparseVec> = vec![SparseVec::zero(n * n); n];
    for (h, row) in compose.iter().enumerate() {
        for (k, target) in row.iter().enumerate() {
            if let Some(hk) = target {
                delta_elems[*hk] = delta_elems[*hk].add(&SparseVec::unit(n * n, h * n + k));
            }
        }
    }
    let delta = delta_elems
        .iter()
        .map(|x| crate::algebra_core::embed(&sq, x))
        .collect();
    let coproduct = Coproduct::new(dual_alg.clone(), delta)?;
    // units of the groupoid = basis summands of the algebra unit
    let mut counit = SparseVec::zero(n);
    if let Some(u) = alg.unit() {
        for (k, _) in u.iter() {
            counit = counit.add(&SparseVec::unit(n, k));
        }
    }
    let mut metadata = p.metadata.clone();
    metadata.push(("derived".into(), "function-algebra dual".into()));
    Ok(Presentation {
        algebra: dual_alg,
        coproduct,
        counit: Some(Functional::new(counit)),
        metadata,
    })
}

fn render_report(doc: &ReportDoc, json: bool) -> String {
    if json {
        let mut s = serde_json::to_string_pretty(doc).expect("report serialization");
        s.push('\n');
        return s;
    }
    let mut out = String::new();
    for stage in &doc.stages {
        let status = if stage.passed { "PASS" } else { "FAIL" };
        let _ = writeln!(out, "[check] {}: {status}", stage.name);
        if let Some(w) = &stage.witness {
            let _ = writeln!(out, "        witness: {w}");
        }
    }
    let _ = writeln!(out, "verdict: {}", doc.verdict);
    out
}

fn emit(text: &str, target: &Option<String>) -> Result<()> {
    match target {
        Some(path) => std::fs::write(path, text).map_err(Error::from),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_command(cmd: Command) -> Result<i32> {
    match cmd {
        Command::Check { file, report, json } => {
            let p = load(&file)?;
            match full_pipeline(&p.algebra, &p.coproduct) {
                Ok(result) => {
                    let doc = ReportDoc {
                        verdict: if result.hopf_special_case {
                            "regular weak multiplier Hopf algebra (Hopf special case)".into()
                        } else {
                            "regular weak multiplier Hopf algebra".into()
                        },
                        hopf_special_case: result.hopf_special_case,
                        stages: result
                            .report
                            .entries
                            .iter()
                            .map(|e| StageDoc {
                                name: e.name.clone(),
                                passed: e.passed,
                                witness: e.witness.clone(),
                            })
                            .collect(),
                    };
                    emit(&render_report(&doc, json), &report)?;
                    Ok(0)
                }
                Err(err) => {
                    let doc = ReportDoc {
                        verdict: format!("negative: {err}"),
                        hopf_special_case: false,
                        stages: vec![StageDoc {
                            name: "aborted".into(),
                            passed: false,
                            witness: Some(err.to_string()),
                        }],
                    };
                    emit(&render_report(&doc, json), &report)?;
                    Ok(2)
                }
            }
        }
        Command::Integrals { file } => {
            let p = load(&file)?;
            let e = p.coproduct.find_canonical_idempotent()?;
            let sep = SeparabilityStructure::from_idempotent(&p.coproduct, &e)?;
            let space = IntegralSpace::solve(&p.coproduct, &sep)?;
            println!("left integral space dimension: {}", space.left().dim());
            println!("right integral space dimension: {}", space.right().dim());
            println!("left set faithful: {}", space.left_faithful());
            println!("right set faithful: {}", space.right_faithful());
            Ok(0)
        }
        Command::Construct { file, out } => {
            let p = load(&file)?;
            match full_pipeline(&p.algebra, &p.coproduct) {
                Ok(result) => {
                    let n = p.algebra.dim();
                    let mut text = String::new();
                    let values: Vec<String> = (0..n)
                        .map(|k| {
                            result
                                .epsilon
                                .eval(&SparseVec::unit(n, k))
                                .to_canonical_string()
                        })
                        .collect();
                    let _ = writeln!(text, "counit {}", values.join(" "));
                    text.push_str("antipode ");
                    write_sparse_matrix(&mut text, &result.s);
                    std::fs::write(&out, text)?;
                    Ok(0)
                }
                Err(err) => {
                    eprintln!("construction failed: {err}");
                    Ok(2)
                }
            }
        }
        Command::Gen { what } => match what {
            GenCommand::Groupoid(args) => {
                let group = parse_group(&args.group)?;
                let (g, meta) = match args.seed {
                    None => (
                        FiniteGroupoid::transitive(args.objects, group),
                        vec![(
                            "origin".to_string(),
                            format!("groupoid objects={} group={}", args.objects, group.name()),
                        )],
                    ),
                    Some(seed) => (
                        crate::groupoids::random_groupoid(seed, args.objects, &[group]),
                        vec![(
                            "origin".to_string(),
                            format!(
                                "random groupoid seed={seed} max_objects={} pool={}",
                                args.objects,
                                group.name()
                            ),
                        )],
                    ),
                };
                let p = groupoid_presentation(&g, meta)?;
                std::fs::write(&args.out, serialize(&p))?;
                Ok(0)
            }
            GenCommand::Dual { file, out } => {
                let p = load(&file)?;
                let dual = dual_presentation(&p)?;
                std::fs::write(&out, serialize(&dual))?;
                Ok(0)
            }
        },
    }
}

/// Entry point with the documented exit codes: 0 success or positive
/// verdict, 1 usage error, 2 negative mathematical verdict, 3 parse or
/// invariant error.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            // help/version are successful exits
            use clap::error::ErrorKind;
            let code = match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 1,
            };
            let _ = err.print();
            return code;
        }
    };
    match run_command(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                Error::Parse { .. }
                | Error::ScalarParse(_)
                | Error::InvariantViolation { .. }
                | Error::DimensionMismatch(_)
                | Error::Io(_) => 3,
                _ => 2,
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::groupoids::{FiniteGroupoid, SmallGroup};

    fn pair_groupoid_text() -> String {
        let g = FiniteGroupoid::transitive(2, SmallGroup::C1);
        serialize(&groupoid_presentation(&g, vec![("origin".into(), "test".into())]).unwrap())
    }

    #[test]
    fn roundtrip_is_identity() {
        let text = pair_groupoid_text();
        let p = parse(&text).unwrap();
        assert_eq!(serialize(&p), text);
    }

    #[test]
    fn roundtrip_c2_group() {
        let g = FiniteGroupoid::transitive(1, SmallGroup::C2);
        let text = serialize(&groupoid_presentation(&g, vec![]).unwrap());
        let p = parse(&text).unwrap();
        assert_eq!(serialize(&p), text);
        assert_eq!(p.algebra.dim(), 2);
    }

    #[test]
    fn associativity_violation_is_reported_with_triple() {
        let text = "dim 2\nbasis_names a b\nstructure_constants 3\n\
                    0 0 0 1/1\n0 1 1 1/1\n1 1 0 1/1\n\
                    coproduct 0\nlambda 0\nrho 0\ncoproduct 1\nlambda 0\nrho 0\n";
        let err = parse(text).unwrap_err();
        match err {
            Error::InvariantViolation { law, witness } => {
                assert_eq!(law, "associativity");
                assert_eq!(witness.len(), 3);
            }
            other => panic!("expected invariant violation, got {other}"),
        }
    }

    #[test]
    fn malformed_scalar_is_a_parse_error() {
        let text = "dim 1\nbasis_names e\nstructure_constants 1\n0 0 0 1/0\n";
        assert!(matches!(parse(text), Err(Error::ScalarParse(_))));
    }

    #[test]
    fn dual_of_pair_groupoid_is_commutative() {
        let p = parse(&pair_groupoid_text()).unwrap();
        let dual = dual_presentation(&p).unwrap();
        assert_eq!(dual.algebra.dim(), 4);
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(
                    dual.algebra.product_basis(i, j),
                    dual.algebra.product_basis(j, i)
                );
            }
        }
        let text = serialize(&dual);
        let again = parse(&text).unwrap();
        assert_eq!(serialize(&again), text);
    }

    #[test]
    fn check_command_reports_deterministically() {
        let dir = std::env::temp_dir().join("weakhopf-cli-test");
        std::fs::create_dir_all(&dir).unwrap();
        let fixture = dir.join("pair2.wha");
        std::fs::write(&fixture, pair_groupoid_text()).unwrap();
        let r1 = dir.join("r1.txt");
        let r2 = dir.join("r2.txt");
        for out in [&r1, &r2] {
            let code = run([
                "weakhopf",
                "check",
                fixture.to_str().unwrap(),
                "--report",
                out.to_str().unwrap(),
            ]);
            assert_eq!(code, 0);
        }
        let a = std::fs::read(&r1).unwrap();
        let b = std::fs::read(&r2).unwrap();
        assert!(!a.is_empty());
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("verdict: regular weak multiplier Hopf algebra"));
    }

    #[test]
    fn usage_error_exits_one() {
        assert_eq!(run(["weakhopf", "no-such-command"]), 1);
        assert_eq!(run(["weakhopf", "--help"]), 0);
    }
}
