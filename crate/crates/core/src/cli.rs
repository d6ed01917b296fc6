//! The `hamsuper` command-line front end.
//!
//! Exit codes: 0 on success, 1 when a check fails, 2 on usage or parameter errors.

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::bidersolve::{self, AlgebraSummary, Method};
use crate::error::{Error, Result};
use crate::fpexact::Subspace;
use crate::lsa::StructureAlgebra;
use crate::superspace::{Params, Parity};
use crate::weights::{self, WeightFamily};
use crate::wittham::{build_h, GradingInfo, Hamiltonian};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Parser, Debug)]
#[command(
    name = "hamsuper",
    version,
    about = "Hamiltonian Lie superalgebras over F_p and their biderivations"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build Λ, H̄ and H, print their dimensions, optionally write H as JSON.
    Build {
        #[command(flatten)]
        params: ParamArgs,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run structural checks on H.
    Verify {
        #[command(flatten)]
        params: ParamArgs,
        /// Checks to run (repeatable); all of them when omitted.
        #[arg(long, value_enum)]
        check: Vec<CheckKind>,
    },
    /// Solve for derivations or skew-symmetric biderivations and write a JSON report.
    Solve {
        #[command(flatten)]
        params: ParamArgs,
        /// Solve on an algebra read from JSON instead of building H.
        #[arg(long)]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Target::Bider)]
        target: Target,
        #[arg(long, default_value = "direct")]
        method: String,
        /// Parity of the derivations (`--target der`).
        #[arg(long, default_value = "even")]
        parity: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Import an algebra JSON file, re-export it, and compare.
    Roundtrip {
        input: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args, Debug, Clone)]
struct ParamArgs {
    #[arg(long, default_value_t = 3)]
    p: u32,
    #[arg(long, default_value_t = 2)]
    m: usize,
    #[arg(long, default_value_t = 2)]
    n: usize,
    /// Truncation heights, comma separated.
    #[arg(long, value_delimiter = ',', default_values_t = vec![1u32, 1])]
    t: Vec<u32>,
}

impl ParamArgs {
    fn params(&self) -> Result<Params> {
        Params::new(self.p, self.m, self.n, self.t.clone())
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Target {
    Bider,
    Der,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckKind {
    Jacobi,
    Perfect,
    Center,
    Grading,
    Weights,
    Families,
}

impl fmt::Display for CheckKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(
            self.to_possible_value()
                .expect("no skipped variants")
                .get_name(),
        )
    }
}

pub fn parse_parity(s: &str) -> Result<Parity> {
    match s {
        "even" | "0" => Ok(Parity::Even),
        "odd" | "1" => Ok(Parity::Odd),
        _ => Err(Error::UnknownValue {
            what: "parity",
            value: s.into(),
        }),
    }
}

/// Outcome of one `verify` check.
#[derive(Clone, Debug, Serialize)]
pub struct CheckLine {
    pub check: CheckKind,
    pub pass: bool,
    pub detail: String,
}

impl fmt::Display for CheckLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.pass { "pass" } else { "FAIL" };
        write!(f, "check {}: {} ({})", self.check, verdict, self.detail)
    }
}

/// First nonzero constant `[e_i, e_j] -> e_k` whose degrees do not add up.
pub fn grading_violation(alg: &StructureAlgebra) -> Option<(usize, usize, usize)> {
    let z = alg.zdegrees()?;
    alg.constants()
        .map(|(i, j, k, _)| (i, j, k))
        .find(|&(i, j, k)| z[k] != z[i] + z[j])
}

/// Span of the basis elements of degree `r`.
pub fn degree_component(alg: &StructureAlgebra, r: i64) -> Subspace {
    let d = alg.dim();
    let z = alg.zdegrees().unwrap_or(&[]);
    Subspace::span(
        alg.field(),
        d,
        (0..d)
            .filter(|&i| z[i] == r)
            .map(|i| crate::fpexact::unit(d, i)),
    )
}

pub fn check_jacobi(h: &Hamiltonian) -> CheckLine {
    let report = h.algebra.jacobi_check();
    CheckLine {
        check: CheckKind::Jacobi,
        pass: report.passed(),
        detail: report.to_string(),
    }
}

pub fn check_perfect(h: &Hamiltonian) -> CheckLine {
    let derived = h.algebra.derived_span().dim();
    CheckLine {
        check: CheckKind::Perfect,
        pass: derived == h.dim(),
        detail: format!("dim [H,H] = {derived}, dim H = {}", h.dim()),
    }
}

pub fn check_center(h: &Hamiltonian) -> CheckLine {
    let center = h.algebra.center();
    CheckLine {
        check: CheckKind::Center,
        pass: center.dim() == 0,
        detail: format!("dim Z(H) = {}", center.dim()),
    }
}

/// Degree additivity of the bracket, the degree range, and `C_H(H_-1) = H_-1`.
pub fn check_grading(h: &Hamiltonian) -> CheckLine {
    let alg = &h.algebra;
    let mut problems = Vec::new();
    if alg.zdegrees().is_none() {
        problems.push("basis is not Z-homogeneous".to_string());
    } else {
        if let Some((i, j, k)) = grading_violation(alg) {
            problems.push(format!(
                "[e{}, e{}] has a component on e{} of the wrong degree",
                i + 1,
                j + 1,
                k + 1
            ));
        }
        let (lo, hi) = h.grading.h_range();
        if let Some(z) = alg.zdegrees().unwrap().iter().find(|&&z| z < lo || z > hi) {
            problems.push(format!("degree {z} outside [{lo}, {hi}]"));
        }
        let minus_one = degree_component(alg, -1);
        let centralizer = alg.centralizer(minus_one.basis());
        if centralizer != minus_one {
            problems.push(format!(
                "centralizer of H_-1 has dim {} but dim H_-1 = {}",
                centralizer.dim(),
                minus_one.dim()
            ));
        }
    }
    let table: Vec<String> = h
        .grading_table()
        .iter()
        .map(|(r, d)| format!("{r}:{d}"))
        .collect();
    CheckLine {
        check: CheckKind::Grading,
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "[H_a, H_b] in H_(a+b); C_H(H_-1) = H_-1; dims {}",
                table.join(" ")
            )
        } else {
            problems.join("; ")
        },
    }
}

/// Torus shape and commutativity, direct-sum decomposition, parity homogeneity,
/// and agreement of every monomial weight with the closed formula.
pub fn check_weights(h: &Hamiltonian) -> CheckLine {
    let alg = &h.algebra;
    let geo = h.geometry();
    let mut problems = Vec::new();
    let (Some(torus), Some(_)) = (alg.torus(), alg.weights()) else {
        return CheckLine {
            check: CheckKind::Weights,
            pass: false,
            detail: "algebra carries no torus".into(),
        };
    };
    if torus.len() != geo.k + geo.r {
        problems.push(format!(
            "torus has {} elements, expected {}",
            torus.len(),
            geo.k + geo.r
        ));
    }
    if torus.iter().any(|a| {
        torus
            .iter()
            .any(|b| alg.bracket(a, b).iter().any(|&c| c != 0))
    }) {
        problems.push("torus is not abelian".into());
    }
    let mut total = 0;
    match weights::decompose(alg, torus) {
        Ok(dec) => {
            total = dec.spaces.values().map(Vec::len).sum();
            if total != h.dim() {
                problems.push(format!("weight spaces sum to {total}"));
            }
            if !weights::weight_spaces_are_homogeneous(alg, &dec) {
                problems.push("a weight space mixes parities".into());
            }
        }
        Err(e) => problems.push(e.to_string()),
    }
    let mut checked = 0;
    for (b, mono) in h.monomials.iter().enumerate() {
        if let Some(mono) = mono {
            checked += 1;
            let formula = weights::closed_form_weight(&geo, mono, h.field());
            if formula.0 != alg.weights().unwrap()[b] {
                problems.push(format!(
                    "weight of {} differs from the closed formula",
                    alg.labels()[b]
                ));
            }
        }
    }
    CheckLine {
        check: CheckKind::Weights,
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!(
                "direct sum of {} weight spaces, total dim {total}; {checked} monomial weights match the formula",
                alg.weights().map(|w| w.iter().collect::<std::collections::BTreeSet<_>>().len()).unwrap_or(0)
            )
        } else {
            problems.join("; ")
        },
    }
}

/// Compares every `eps_i`, `<j>` and `eps_i + <j>` weight space with its
/// displayed monomial spanning set.
pub fn check_families(h: &Hamiltonian) -> CheckLine {
    let geo = h.geometry();
    let mut reports = Vec::new();
    for i in 1..=geo.m {
        reports.push(weights::family_space(h, WeightFamily::EpsI, Some(i), None));
    }
    for j in geo.m + 1..=geo.s {
        reports.push(weights::family_space(h, WeightFamily::OddJ, None, Some(j)));
        for i in 1..=geo.m {
            reports.push(weights::family_space(
                h,
                WeightFamily::EpsIPlusJ,
                Some(i),
                Some(j),
            ));
        }
    }
    let mut failures = Vec::new();
    for r in &reports {
        match r {
            Ok(rep) if rep.agrees => {}
            Ok(rep) => failures.push(format!(
                "{:?} i={:?} j={:?}: eigenspace {:?} vs shape {:?}",
                rep.family, rep.i, rep.j, rep.space, rep.displayed
            )),
            Err(e) => failures.push(e.to_string()),
        }
    }
    CheckLine {
        check: CheckKind::Families,
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{} weight spaces match their monomial shape", reports.len())
        } else {
            failures.join("; ")
        },
    }
}

pub fn run_check(h: &Hamiltonian, kind: CheckKind) -> CheckLine {
    match kind {
        CheckKind::Jacobi => check_jacobi(h),
        CheckKind::Perfect => check_perfect(h),
        CheckKind::Center => check_center(h),
        CheckKind::Grading => check_grading(h),
        CheckKind::Weights => check_weights(h),
        CheckKind::Families => check_families(h),
    }
}

/// Derivation report for `solve --target der`.
#[derive(Clone, Debug, Serialize)]
pub struct DerivationReport {
    pub algebra: AlgebraSummary,
    pub parity: Parity,
    pub dim_der: usize,
    /// Dimension of the span of `ad(e_i)` for homogeneous `e_i` of this parity.
    pub dim_inner: usize,
    pub inner_contained: bool,
}

pub fn derivation_report(alg: &StructureAlgebra, parity: Parity) -> DerivationReport {
    let d = alg.dim();
    let f = alg.field();
    let ders = bidersolve::solve_derivations(alg, parity);
    let flat = |m: &bidersolve::LinearMapMatrix| -> Vec<u32> {
        (0..d)
            .flat_map(|k| (0..d).map(move |i| (k, i)))
            .map(|(k, i)| m.entry(k, i))
            .collect()
    };
    let space = Subspace::span(f, d * d, ders.iter().map(flat));
    let inner: Vec<Vec<u32>> = (0..d)
        .filter(|&x| alg.parity(x) == parity)
        .map(|x| {
            let ad = alg.adjoint_matrix(&crate::fpexact::unit(d, x));
            (0..d)
                .flat_map(|k| (0..d).map(move |i| (k, i)))
                .map(|(k, i)| ad.get(k, i))
                .collect()
        })
        .collect();
    let inner_space = Subspace::span(f, d * d, inner);
    DerivationReport {
        algebra: AlgebraSummary::of(alg),
        parity,
        dim_der: ders.len(),
        dim_inner: inner_space.dim(),
        inner_contained: inner_space.is_subspace_of(&space),
    }
}

/// The method used to cross-check `method` in `solve`.
pub fn cross_method(method: Method) -> Method {
    match method {
        Method::Direct => Method::Reduced,
        Method::Reduced | Method::WeightBlocked => Method::Direct,
    }
}

enum Failure {
    Usage(String),
    Check(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

fn write_file(path: &PathBuf, text: &str) -> std::result::Result<(), Failure> {
    std::fs::write(path, text)
        .map_err(|e| Failure::Usage(format!("cannot write {}: {e}", path.display())))
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

/// Entry point used by the binary; prints to the process streams.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_with<'a, I, T>(args: I, out: &'a mut dyn Write, err: &'a mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let sink: &mut dyn Write = if e.use_stderr() { err } else { out };
            let _ = write!(sink, "{}", e.render());
            return code;
        }
    };
    match dispatch(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            let _ = writeln!(err, "error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Check(msg)) => {
            let _ = writeln!(err, "{msg}");
            EXIT_CHECK_FAILED
        }
    }
}

fn dispatch(command: Command, out: &mut dyn Write) -> std::result::Result<(), Failure> {
    match command {
        Command::Build { params, out: path } => cmd_build(&params, path.as_ref(), out),
        Command::Verify { params, check } => cmd_verify(&params, &check, out),
        Command::Solve {
            params,
            input,
            target,
            method,
            parity,
            out: path,
        } => {
            let method = Method::from_str(&method)?;
            let parity = parse_parity(&parity)?;
            let params = params.params()?;
            let alg = match input {
                Some(file) => {
                    let text = std::fs::read_to_string(&file).map_err(|e| {
                        Failure::Usage(format!("cannot read {}: {e}", file.display()))
                    })?;
                    StructureAlgebra::from_json(&text)?
                }
                None => build_h(params)?.algebra,
            };
            cmd_solve(&alg, target, method, parity, path.as_ref(), out)
        }
        Command::Roundtrip { input, out: path } => cmd_roundtrip(&input, path.as_ref(), out),
    }
}

fn cmd_build(
    args: &ParamArgs,
    path: Option<&PathBuf>,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let params = args.params()?;
    let h = build_h(params.clone())?;
    let _ = writeln!(out, "H(m,n;t) at {params}");
    let _ = writeln!(out, "dim Lambda = {}", params.lambda_dim());
    let _ = writeln!(out, "dim W = {}", params.lambda_dim() * params.s());
    let _ = writeln!(out, "dim Hbar = {}", h.hbar.algebra.dim());
    let _ = writeln!(out, "dim H = {}", h.dim());
    let _ = writeln!(out, "dim T_H = {}", h.algebra.torus().map_or(0, <[_]>::len));
    let (lo, hi) = h.grading.h_range();
    let _ = writeln!(
        out,
        "grading (xi = {}, degrees {lo}..={hi}):",
        GradingInfo::new(&params).xi
    );
    for (r, d) in h.grading_table() {
        let _ = writeln!(out, "  H_{r}: {d}");
    }
    if let Some(path) = path {
        write_file(path, &h.algebra.to_json())?;
        let _ = writeln!(out, "wrote {}", path.display());
    }
    Ok(())
}

fn cmd_verify(
    args: &ParamArgs,
    checks: &[CheckKind],
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let h = build_h(args.params()?)?;
    let mut kinds: Vec<CheckKind> = if checks.is_empty() {
        CheckKind::value_variants().to_vec()
    } else {
        checks.to_vec()
    };
    kinds.sort();
    kinds.dedup();
    let mut failed = Vec::new();
    for kind in kinds {
        let line = run_check(&h, kind);
        let _ = writeln!(out, "{line}");
        if !line.pass {
            failed.push(line.to_string());
        }
    }
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Check(failed.join("\n")))
    }
}

fn cmd_solve(
    alg: &StructureAlgebra,
    target: Target,
    method: Method,
    parity: Parity,
    path: Option<&PathBuf>,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let (text, pass) = match target {
        Target::Der => {
            let report = derivation_report(alg, parity);
            (to_json(&report), report.inner_contained)
        }
        Target::Bider => {
            let report = bidersolve::verify_theorem(alg, method, Some(cross_method(method)))?;
            (to_json(&report), report.pass)
        }
    };
    let _ = out.write_all(text.as_bytes());
    if let Some(path) = path {
        write_file(path, &text)?;
    }
    if pass {
        Ok(())
    } else {
        Err(Failure::Check("solver report did not pass".into()))
    }
}

fn cmd_roundtrip(
    input: &PathBuf,
    path: Option<&PathBuf>,
    out: &mut dyn Write,
) -> std::result::Result<(), Failure> {
    let text = std::fs::read_to_string(input)
        .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", input.display())))?;
    let first = StructureAlgebra::from_json(&text).map_err(|e| Failure::Check(e.to_string()))?;
    let exported = first.to_json();
    let second =
        StructureAlgebra::from_json(&exported).map_err(|e| Failure::Check(e.to_string()))?;
    let same_constants = first.constants().eq(second.constants());
    let same_text = second.to_json() == exported;
    if let Some(path) = path {
        write_file(path, &exported)?;
    }
    if same_constants && same_text {
        let _ = writeln!(out, "roundtrip: identical ({} basis elements)", first.dim());
        Ok(())
    } else {
        Err(Failure::Check(
            "roundtrip: re-exported algebra differs".into(),
        ))
    }
}
