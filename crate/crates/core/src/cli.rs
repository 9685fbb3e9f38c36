//! The `girale` command line.
//!
//! Exit codes: 0 success or a true judgment, 1 a false judgment (with its
//! countermodel or witness), 2 usage or input errors, 3 capacity errors.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::algebra::{
    check_class, congruence_set, enumerate_homs, lukasiewicz_chain, AlgebraError, ClassTag, FiniteAlgebra, Signature,
};
use crate::amalgam::{amalgamate, span_catalog, verify_amalgam, AmalgamError, Span};
use crate::construct::{build_r, member_k, ConstructError, KClassQuery, Membership};
use crate::formula::{Formula, Notation, ParseError};
use crate::group::{abelian_catalog, make_group, FiniteGroup, GroupError, GroupHom, GroupJson, PrimeSet};
use crate::limits::Limits;
use crate::proofs::{
    check_derivation, extract_craig, prove_sequent, sequent_catalog, sequent_countermodel, validate_proof, Derivation,
    HilbertSystem, ProofError, Rules, Sequent,
};
use crate::semantics::{consequence, eval, interpolant_search, Assignment, InterpolantOutcome, InterpolationMode, SearchOptions, SemanticsError, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FALSE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CAPACITY: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "girale", version, about = "Finite models of residuated lattices, A-algebras and girales")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Worker threads for batch commands.
    #[arg(long, global = true, default_value_t = 1)]
    jobs: usize,
    /// Formula notation for inputs and text output.
    #[arg(long, global = true, default_value = "substructural", value_parser = parse_notation)]
    notation: Notation,
    #[command(subcommand)]
    command: Command,
}

fn parse_notation(s: &str) -> Result<Notation, String> {
    match s {
        "substructural" | "sub" => Ok(Notation::Substructural),
        "girard" => Ok(Notation::Girard),
        other => Err(format!("unknown notation `{other}`")),
    }
}

fn parse_signature(s: &str) -> Result<Signature, String> {
    s.parse::<Signature>().map_err(|e| e.to_string())
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse a formula and print its syntax tree.
    Parse { formula: String },
    /// Build R^S(G).
    Build {
        /// Invariant factors such as `3` or `2x2`, or a group JSON file.
        #[arg(long)]
        group: String,
        #[arg(long, default_value = "full", value_parser = parse_signature)]
        sig: Signature,
    },
    /// Check the laws of a class.
    CheckClass {
        #[arg(long)]
        algebra: String,
        /// Defaults to the strongest class for the algebra's signature.
        #[arg(long)]
        class: Option<ClassTag>,
    },
    /// Decide membership in K^S_P.
    MemberK {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        primes: PrimeSet,
        /// Defaults to the algebra's signature.
        #[arg(long, value_parser = parse_signature)]
        sig: Option<Signature>,
    },
    /// List the congruences.
    Congruences {
        #[arg(long)]
        algebra: String,
    },
    /// Enumerate homomorphisms.
    Homs {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
        #[arg(long)]
        injective: bool,
    },
    /// Amalgamate a span of lifted group embeddings.
    Amalgamate(AmalgamateArgs),
    /// Evaluate a formula under an assignment.
    Eval {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        formula: String,
        /// `x=a,y=1`
        #[arg(long, default_value = "")]
        assign: String,
    },
    /// Decide a consequence over a list of algebras.
    #[command(alias = "check")]
    Consequence {
        /// Repeatable, or comma separated.
        #[arg(long, required = true, value_delimiter = ',')]
        algebras: Vec<String>,
        #[arg(long)]
        premises: Vec<String>,
        #[arg(long)]
        conclusion: String,
    },
    /// Search for an interpolant.
    Interpolate {
        #[arg(long, required = true, value_delimiter = ',')]
        algebras: Vec<String>,
        #[arg(long)]
        phi: String,
        #[arg(long)]
        psi: String,
        #[arg(long, default_value = "craig")]
        mode: InterpolationMode,
        #[arg(long, default_value_t = 3)]
        depth: usize,
        /// Guarded variant `!φ → δ`, `!δ → ψ`.
        #[arg(long)]
        variant: bool,
        #[arg(long, default_value_t = 2_000_000)]
        max_candidates: usize,
    },
    /// Search for a cut-free sequent proof.
    Prove {
        #[arg(long)]
        sequent: String,
        #[arg(long, default_value_t = 8)]
        bound: usize,
        /// Keep antecedents ordered; `->` is read as the left residual.
        #[arg(long)]
        no_exchange: bool,
        /// Antecedent positions of the left part; extracts a Craig interpolant.
        #[arg(long, value_delimiter = ',')]
        craig_left: Option<Vec<usize>>,
    },
    /// Check a Hilbert derivation.
    CheckProof {
        #[arg(long)]
        file: String,
        #[arg(long, default_value = "LL")]
        system: String,
        #[arg(long)]
        premises: Vec<String>,
        /// Extra scheme `NAME=formula`.
        #[arg(long)]
        axiom: Vec<String>,
    },
    /// Batch runs over the R^S(G) catalog.
    Catalog {
        #[arg(long, default_value_t = 6)]
        max_order: u64,
        #[arg(long)]
        primes: Option<PrimeSet>,
        /// A signature, or `all` for every subset.
        #[arg(long, default_value = "all")]
        sig: String,
        /// Run the exhaustive amalgamation suite instead.
        #[arg(long)]
        spans: bool,
    },
}

#[derive(Args, Debug)]
struct AmalgamateArgs {
    /// Invariant factors of the common group.
    #[arg(long)]
    a: String,
    #[arg(long)]
    b: String,
    #[arg(long)]
    c: String,
    /// Index of the embedding A → B in enumeration order.
    #[arg(long, default_value_t = 0)]
    f_index: usize,
    #[arg(long, default_value_t = 0)]
    g_index: usize,
    #[arg(long, default_value = "full", value_parser = parse_signature)]
    sig: Signature,
    /// Prime set of the class; defaults to primes dividing no group order.
    #[arg(long)]
    primes: Option<PrimeSet>,
}

/// Result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Capacity(String),
}

trait CapacityError: std::fmt::Display {
    fn is_capacity(&self) -> bool;
}

impl CapacityError for GroupError {
    fn is_capacity(&self) -> bool {
        matches!(self, GroupError::Capacity { .. })
    }
}

impl CapacityError for AlgebraError {
    fn is_capacity(&self) -> bool {
        match self {
            AlgebraError::Capacity { .. } => true,
            AlgebraError::Group(g) => g.is_capacity(),
            _ => false,
        }
    }
}

impl CapacityError for ConstructError {
    fn is_capacity(&self) -> bool {
        match self {
            ConstructError::Algebra(a) => a.is_capacity(),
            ConstructError::Group(g) => g.is_capacity(),
            _ => false,
        }
    }
}

impl CapacityError for AmalgamError {
    fn is_capacity(&self) -> bool {
        match self {
            AmalgamError::Construct(c) => c.is_capacity(),
            AmalgamError::Group(g) => g.is_capacity(),
            AmalgamError::Precondition(_) => false,
        }
    }
}

impl CapacityError for SemanticsError {
    fn is_capacity(&self) -> bool {
        false
    }
}

impl CapacityError for ProofError {
    fn is_capacity(&self) -> bool {
        false
    }
}

impl CapacityError for ParseError {
    fn is_capacity(&self) -> bool {
        false
    }
}

macro_rules! from_error {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                if e.is_capacity() {
                    CliError::Capacity(e.to_string())
                } else {
                    CliError::Usage(e.to_string())
                }
            }
        }
    )*};
}

from_error!(GroupError, AlgebraError, ConstructError, AmalgamError, SemanticsError, ProofError, ParseError);

/// What a command reports: a JSON body, a text rendering and the exit code.
struct Report {
    code: i32,
    body: Value,
    text: String,
}

impl Report {
    fn new(code: i32, body: Value, text: String) -> Report {
        Report { code, body, text }
    }
}

struct Ctx {
    notation: Notation,
    limits: Limits,
    jobs: usize,
    /// Every input read, for the report hash.
    inputs: Vec<String>,
}

impl Ctx {
    fn formula(&self, text: &str) -> Result<Formula, CliError> {
        Ok(Formula::parse(text, self.notation)?)
    }

    fn render(&self, f: &Formula) -> String {
        f.render(self.notation)
    }

    fn read(&mut self, path: &str) -> Result<String, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("cannot read {path}: {e}")))?;
        self.inputs.push(text.clone());
        Ok(text)
    }

    fn group(&mut self, spec: &str) -> Result<FiniteGroup, CliError> {
        if std::path::Path::new(spec).is_file() {
            let text = self.read(spec)?;
            let j: GroupJson = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
            return Ok(j.build(&self.limits)?);
        }
        let factors = parse_factors(spec)?;
        Ok(make_group(&factors, &self.limits)?)
    }

    /// A JSON file, `R:<factors>[:<signature>]` or `L:<n>`.
    fn algebra(&mut self, spec: &str) -> Result<FiniteAlgebra, CliError> {
        if let Some(rest) = spec.strip_prefix("R:") {
            let (factors, sig) = match rest.split_once(':') {
                Some((f, s)) => (f, parse_signature(s).map_err(CliError::Usage)?),
                None => (rest, Signature::FULL),
            };
            let g = make_group(&parse_factors(factors)?, &self.limits)?;
            return Ok(build_r(&g, sig, &self.limits)?.into_algebra());
        }
        if let Some(n) = spec.strip_prefix("L:") {
            let n: usize = n.parse().map_err(|_| CliError::Usage(format!("bad chain length `{n}`")))?;
            if n < 2 {
                return Err(CliError::Usage("a chain needs at least two elements".into()));
            }
            if n > self.limits.max_algebra {
                return Err(CliError::Capacity(format!(
                    "capacity exceeded: chain has {n} elements, limit is {}",
                    self.limits.max_algebra
                )));
            }
            return Ok(lukasiewicz_chain(n));
        }
        let text = self.read(spec)?;
        let value: Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
        let body = value.get("algebra").cloned().unwrap_or(value);
        let a: FiniteAlgebra = serde_json::from_value(body).map_err(|e| CliError::Usage(format!("{spec}: {e}")))?;
        if a.size() > self.limits.max_group + 2 && a.size() > self.limits.max_algebra {
            return Err(CliError::Capacity(format!("capacity exceeded: algebra has {} elements", a.size())));
        }
        Ok(a)
    }

    fn pool(&self) -> Result<rayon::ThreadPool, CliError> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.jobs.max(1))
            .build()
            .map_err(|e| CliError::Usage(e.to_string()))
    }
}

fn parse_factors(spec: &str) -> Result<Vec<u64>, CliError> {
    let parts: Result<Vec<u64>, _> = spec
        .split(['x', ','])
        .map(|t| t.trim().parse::<u64>())
        .collect();
    let parts = parts.map_err(|_| CliError::Usage(format!("bad group `{spec}`: use invariant factors such as 2x4")))?;
    Ok(parts.into_iter().filter(|&d| d != 1).collect())
}

fn hash_inputs(inputs: &[String]) -> String {
    let mut h = Sha256::new();
    for i in inputs {
        h.update((i.len() as u64).to_le_bytes());
        h.update(i.as_bytes());
    }
    h.finalize().iter().fold(String::new(), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}

/// Runs the command line; `argv` includes the program name.
pub fn run<I, T>(argv: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            return if code == EXIT_OK {
                Outcome {
                    code,
                    stdout: rendered,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: rendered,
                }
            };
        }
    };
    let mut ctx = Ctx {
        notation: cli.notation,
        limits: Limits::from_env(),
        jobs: cli.jobs,
        inputs: argv.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect(),
    };
    let result = std::panic::catch_unwind(std::panic::AssertUnwindSafe(|| dispatch(&cli.command, &mut ctx)));
    let result = match result {
        Ok(r) => r,
        Err(_) => Err(CliError::Usage("internal error".into())),
    };
    match result {
        Ok(report) => {
            let stdout = if cli.json {
                let mut body = report.body;
                if let Value::Object(map) = &mut body {
                    map.insert(
                        "meta".into(),
                        json!({
                            "version": env!("CARGO_PKG_VERSION"),
                            "inputs_sha256": hash_inputs(&ctx.inputs),
                        }),
                    );
                }
                serde_json::to_string_pretty(&body).expect("json") + "\n"
            } else {
                report.text
            };
            Outcome {
                code: report.code,
                stdout,
                stderr: String::new(),
            }
        }
        Err(e) => {
            let (code, msg) = match e {
                CliError::Usage(m) => (EXIT_USAGE, m),
                CliError::Capacity(m) => (EXIT_CAPACITY, m),
            };
            let stdout = if cli.json {
                serde_json::to_string_pretty(&json!({"error": msg, "exit": code})).expect("json") + "\n"
            } else {
                String::new()
            };
            Outcome {
                code,
                stdout,
                stderr: format!("error: {msg}\n"),
            }
        }
    }
}

fn dispatch(cmd: &Command, ctx: &mut Ctx) -> Result<Report, CliError> {
    match cmd {
        Command::Parse { formula } => cmd_parse(ctx, formula),
        Command::Build { group, sig } => cmd_build(ctx, group, *sig),
        Command::CheckClass { algebra, class } => cmd_check_class(ctx, algebra, *class),
        Command::MemberK { algebra, primes, sig } => cmd_member_k(ctx, algebra, primes, *sig),
        Command::Congruences { algebra } => cmd_congruences(ctx, algebra),
        Command::Homs { from, to, injective } => cmd_homs(ctx, from, to, *injective),
        Command::Amalgamate(args) => cmd_amalgamate(ctx, args),
        Command::Eval {
            algebra,
            formula,
            assign,
        } => cmd_eval(ctx, algebra, formula, assign),
        Command::Consequence {
            algebras,
            premises,
            conclusion,
        } => cmd_consequence(ctx, algebras, premises, conclusion),
        Command::Interpolate {
            algebras,
            phi,
            psi,
            mode,
            depth,
            variant,
            max_candidates,
        } => cmd_interpolate(ctx, algebras, phi, psi, *mode, *depth, *variant, *max_candidates),
        Command::Prove {
            sequent,
            bound,
            no_exchange,
            craig_left,
        } => cmd_prove(ctx, sequent, *bound, !*no_exchange, craig_left.as_deref()),
        Command::CheckProof {
            file,
            system,
            premises,
            axiom,
        } => cmd_check_proof(ctx, file, system, premises, axiom),
        Command::Catalog {
            max_order,
            primes,
            sig,
            spans,
        } => cmd_catalog(ctx, *max_order, primes.as_ref(), sig, *spans),
    }
}

fn table_text(a: &FiniteAlgebra, name: &str, cell: impl Fn(usize, usize) -> usize) -> String {
    let names: Vec<String> = a.elements().map(|x| a.element_name(x)).collect();
    let w = names.iter().map(String::len).max().unwrap_or(1).max(name.len());
    let mut out = format!("{name:>w$} |");
    for n in &names {
        let _ = write!(out, " {n:>w$}");
    }
    out.push('\n');
    for x in a.elements() {
        let _ = write!(out, "{:>w$} |", names[x]);
        for y in a.elements() {
            let _ = write!(out, " {:>w$}", names[cell(x, y)]);
        }
        out.push('\n');
    }
    out
}

fn algebra_text(a: &FiniteAlgebra) -> String {
    let mut out = format!("{} elements, signature {}\n", a.size(), a.signature());
    let names: Vec<String> = a.elements().map(|x| a.element_name(x)).collect();
    let _ = writeln!(out, "elements: {}", names.join(" "));
    let _ = writeln!(out, "1 = {}", a.element_name(a.one()));
    for (label, c) in [("0", a.zero()), ("bot", a.bot()), ("top", a.top())] {
        if let Some(c) = c {
            let _ = writeln!(out, "{label} = {}", a.element_name(c));
        }
    }
    out.push_str(&table_text(a, "*", |x, y| a.mult(x, y)));
    out.push_str(&table_text(a, "->", |x, y| a.imp(x, y)));
    if let Some(b) = a.bang_table() {
        let _ = writeln!(
            out,
            "!: {}",
            a.elements()
                .map(|x| format!("{}->{}", names[x], names[b[x]]))
                .collect::<Vec<_>>()
                .join(" ")
        );
    }
    out
}

fn cmd_parse(ctx: &mut Ctx, text: &str) -> Result<Report, CliError> {
    let f = ctx.formula(text)?;
    let body = json!({
        "ast": f,
        "substructural": f.render(Notation::Substructural),
        "girard": f.render(Notation::Girard),
        "size": f.size(),
        "height": f.height(),
        "variables": f.free_variables(),
    });
    Ok(Report::new(EXIT_OK, body, format!("{}\n", ctx.render(&f))))
}

fn cmd_build(ctx: &mut Ctx, group: &str, sig: Signature) -> Result<Report, CliError> {
    let g = ctx.group(group)?;
    let r = build_r(&g, sig, &ctx.limits)?;
    let class = ClassTag::strongest_for(sig);
    let body = json!({
        "group": GroupJson::from_group(&g),
        "invariant_factors": g.invariant_factors(),
        "signature": sig,
        "class": class.name(),
        "algebra": r.algebra(),
    });
    let text = format!(
        "R^{sig}(G) for G with invariant factors {:?}, class {}\n{}",
        g.invariant_factors(),
        class.name(),
        algebra_text(r.algebra())
    );
    Ok(Report::new(EXIT_OK, body, text))
}

fn cmd_check_class(ctx: &mut Ctx, spec: &str, class: Option<ClassTag>) -> Result<Report, CliError> {
    let a = ctx.algebra(spec)?;
    let tag = class.unwrap_or_else(|| ClassTag::strongest_for(a.signature()));
    let report = check_class(&a, tag)?;
    let code = if report.passed() { EXIT_OK } else { EXIT_FALSE };
    let mut text = format!("{}: {}\n", tag.name(), if report.passed() { "pass" } else { "fail" });
    for v in &report.violations {
        let w: Vec<String> = v.witness.iter().map(|&x| a.element_name(x)).collect();
        let _ = writeln!(text, "  {} fails at ({})", v.law, w.join(", "));
    }
    let body = json!({"class": tag.name(), "passed": report.passed(), "report": report});
    Ok(Report::new(code, body, text))
}

fn cmd_member_k(ctx: &mut Ctx, spec: &str, primes: &PrimeSet, sig: Option<Signature>) -> Result<Report, CliError> {
    let a = ctx.algebra(spec)?;
    let q = KClassQuery::new(primes.clone(), sig.unwrap_or_else(|| a.signature()))?;
    let m = member_k(&a, &q, &ctx.limits)?;
    let body = m.to_json(&a);
    let text = match &m {
        Membership::Yes { r, .. } => format!("member: R(G) with G of invariant factors {:?}\n", r.group().invariant_factors()),
        Membership::YesTrivial => "member: trivial algebra\n".to_string(),
        Membership::No { sentence, witness, prime } => {
            let w: Vec<String> = witness.iter().map(|&x| a.element_name(x)).collect();
            let p = prime.map(|p| format!(" (p = {p})")).unwrap_or_default();
            format!("not a member: {} fails at ({}){p}\n", sentence.label(), w.join(", "))
        }
    };
    Ok(Report::new(if m.is_member() { EXIT_OK } else { EXIT_FALSE }, body, text))
}

fn cmd_congruences(ctx: &mut Ctx, spec: &str) -> Result<Report, CliError> {
    let a = ctx.algebra(spec)?;
    let cs = congruence_set(&a, &ctx.limits)?;
    let blocks: Vec<Vec<Vec<String>>> = cs
        .partitions()
        .iter()
        .map(|p| {
            p.blocks()
                .into_iter()
                .map(|b| b.into_iter().map(|x| a.element_name(x)).collect())
                .collect()
        })
        .collect();
    let mut text = format!("{} congruences; simple: {}; fsi: {}\n", cs.len(), cs.is_simple(), cs.is_fsi());
    for b in &blocks {
        let parts: Vec<String> = b.iter().map(|blk| format!("{{{}}}", blk.join(","))).collect();
        let _ = writeln!(text, "  {}", parts.join(" "));
    }
    let body = json!({"count": cs.len(), "simple": cs.is_simple(), "fsi": cs.is_fsi(), "congruences": blocks});
    Ok(Report::new(EXIT_OK, body, text))
}

fn cmd_homs(ctx: &mut Ctx, from: &str, to: &str, injective: bool) -> Result<Report, CliError> {
    let a = ctx.algebra(from)?;
    let b = ctx.algebra(to)?;
    let homs = enumerate_homs(&a, &b, injective, &ctx.limits)?;
    let named: Vec<BTreeMap<String, String>> = homs
        .iter()
        .map(|h| a.elements().map(|x| (a.element_name(x), b.element_name(h.apply(x)))).collect())
        .collect();
    let mut text = format!("{} homomorphisms\n", homs.len());
    for m in &named {
        let parts: Vec<String> = m.iter().map(|(k, v)| format!("{k}->{v}")).collect();
        let _ = writeln!(text, "  {}", parts.join(" "));
    }
    let body = json!({"count": homs.len(), "maps": homs.iter().map(|h| h.map().to_vec()).collect::<Vec<_>>(), "named": named});
    Ok(Report::new(EXIT_OK, body, text))
}

fn amalgam_json(span: &Span, am: &crate::amalgam::Amalgam, report: &crate::amalgam::AmalgamReport) -> Value {
    json!({
        "d_size": am.d.size(),
        "d": am.d,
        "psi1": am.psi1.map(),
        "psi2": am.psi2.map(),
        "b_size": span.b.size(),
        "c_size": span.c.size(),
        "is_amalgam": report.is_amalgam(),
        "strong": report.strong(),
        "checks": report.checks,
    })
}

fn default_primes(groups: &[&FiniteGroup]) -> Result<PrimeSet, CliError> {
    let divides = |p: u64| groups.iter().any(|g| (g.size() as u64).is_multiple_of(p));
    let p = (2u64..)
        .filter(|&p| crate::group::is_prime(p))
        .find(|&p| !divides(p))
        .expect("infinitely many primes");
    Ok(PrimeSet::new([p])?)
}

fn cmd_amalgamate(ctx: &mut Ctx, args: &AmalgamateArgs) -> Result<Report, CliError> {
    let a = ctx.group(&args.a)?;
    let b = ctx.group(&args.b)?;
    let c = ctx.group(&args.c)?;
    let fs = GroupHom::enumerate(&a, &b, true);
    let gs = GroupHom::enumerate(&a, &c, true);
    let pick = |v: &[GroupHom], i: usize, what: &str| -> Result<GroupHom, CliError> {
        v.get(i)
            .cloned()
            .ok_or_else(|| CliError::Usage(format!("{what}: index {i} but only {} embeddings", v.len())))
    };
    let f = pick(&fs, args.f_index, "A -> B")?;
    let g = pick(&gs, args.g_index, "A -> C")?;
    let primes = match &args.primes {
        Some(p) => p.clone(),
        None => default_primes(&[&a, &b, &c])?,
    };
    let q = KClassQuery::new(primes, args.sig)?;
    let span = Span::from_groups(&a, &b, &c, &f, &g, args.sig, &ctx.limits)?;
    let am = amalgamate(&span, &q, &ctx.limits)?;
    let report = verify_amalgam(&span, &am, true);
    let code = if report.is_amalgam() { EXIT_OK } else { EXIT_FALSE };
    let mut text = format!(
        "D has {} elements; amalgam: {}; strong: {}\n",
        am.d.size(),
        report.is_amalgam(),
        report.strong().unwrap_or(false)
    );
    for ch in report.failures() {
        let _ = writeln!(text, "  {} failed {:?}", ch.name, ch.witness);
    }
    Ok(Report::new(code, amalgam_json(&span, &am, &report), text))
}

fn parse_assignment(a: &FiniteAlgebra, text: &str) -> Result<Assignment, CliError> {
    let mut h = Assignment::new();
    for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let (var, val) = part
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("bad assignment `{part}`, expected var=element")))?;
        let x = a
            .find_element(val.trim())
            .ok_or_else(|| CliError::Usage(format!("no element `{}`", val.trim())))?;
        h.insert(var.trim().to_string(), x);
    }
    Ok(h)
}

fn cmd_eval(ctx: &mut Ctx, spec: &str, formula: &str, assign: &str) -> Result<Report, CliError> {
    let a = ctx.algebra(spec)?;
    let f = ctx.formula(formula)?;
    let h = parse_assignment(&a, assign)?;
    let v = eval(&a, &f, &h)?;
    let body = json!({"value": a.element_name(v), "index": v, "designated": a.designated(v)});
    Ok(Report::new(EXIT_OK, body, format!("{}\n", a.element_name(v))))
}

fn verdict_report(v: &Verdict, names: &[String]) -> Report {
    match v {
        Verdict::Holds => Report::new(EXIT_OK, json!({"result": "holds"}), "holds\n".into()),
        Verdict::Fails(c) => {
            let parts: Vec<String> = c.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
            let text = format!("fails in {}: {}\n", names[c.algebra], parts.join(", "));
            Report::new(
                EXIT_FALSE,
                json!({"result": "fails", "algebra": names[c.algebra], "countermodel": c}),
                text,
            )
        }
    }
}

fn cmd_consequence(ctx: &mut Ctx, specs: &[String], premises: &[String], conclusion: &str) -> Result<Report, CliError> {
    let algebras = specs.iter().map(|s| ctx.algebra(s)).collect::<Result<Vec<_>, _>>()?;
    let gamma = premises.iter().map(|p| ctx.formula(p)).collect::<Result<Vec<_>, _>>()?;
    let phi = ctx.formula(conclusion)?;
    let v = consequence(&algebras, &gamma, &phi)?;
    Ok(verdict_report(&v, specs))
}

#[allow(clippy::too_many_arguments)]
fn cmd_interpolate(
    ctx: &mut Ctx,
    specs: &[String],
    phi: &str,
    psi: &str,
    mode: InterpolationMode,
    depth: usize,
    variant: bool,
    max_candidates: usize,
) -> Result<Report, CliError> {
    let algebras = specs.iter().map(|s| ctx.algebra(s)).collect::<Result<Vec<_>, _>>()?;
    let (phi, psi) = (ctx.formula(phi)?, ctx.formula(psi)?);
    let opts = SearchOptions {
        guarded_variant: variant,
        max_candidates,
    };
    match interpolant_search(&algebras, &phi, &psi, mode, depth, &opts) {
        Ok(InterpolantOutcome::Found {
            delta,
            certificate,
            examined,
        }) => {
            let text = format!("interpolant: {} ({examined} candidates examined)\n", ctx.render(&delta));
            let body = json!({"result": "found", "delta": delta.to_string(), "ast": delta, "certificate": certificate, "examined": examined});
            Ok(Report::new(EXIT_OK, body, text))
        }
        Ok(out @ InterpolantOutcome::Exhausted { .. }) => {
            let text = "no interpolant within the bound (search exhausted, not a refutation)\n".to_string();
            Ok(Report::new(EXIT_OK, serde_json::to_value(&out).expect("json"), text))
        }
        Err(SemanticsError::NotEntailed(c)) => Ok(verdict_report(&Verdict::Fails(*c), specs)),
        Err(e) => Err(e.into()),
    }
}

fn cmd_prove(ctx: &mut Ctx, text: &str, bound: usize, exchange: bool, craig_left: Option<&[usize]>) -> Result<Report, CliError> {
    if bound == 0 {
        return Err(CliError::Usage("bound must be at least 1".into()));
    }
    let s = Sequent::parse(text, ctx.notation)?;
    match prove_sequent(&s, bound, exchange)? {
        Some(proof) => {
            validate_proof(&proof, exchange)?;
            let mut body = json!({"result": "proved", "sequent": s.to_string(), "height": proof.height(), "proof": proof});
            let mut out = format!("proved (height {})\n", proof.height());
            if let Some(left) = craig_left {
                if !exchange {
                    return Err(CliError::Usage("interpolant extraction needs exchange".into()));
                }
                let c = extract_craig(&proof, left)?;
                let _ = writeln!(out, "interpolant: {}", ctx.render(&c.delta));
                body["craig"] = json!({
                    "delta": c.delta.to_string(),
                    "left": c.left,
                    "right": c.right,
                    "shared": c.shared,
                });
            }
            Ok(Report::new(EXIT_OK, body, out))
        }
        None => {
            let catalog = sequent_catalog();
            let cm = sequent_countermodel(&s, &catalog)?;
            let (status, text) = match &cm {
                Some(c) => {
                    let parts: Vec<String> = c.assignment.iter().map(|(k, v)| format!("{k}={v}")).collect();
                    (
                        "refuted",
                        format!("no proof; countermodel in catalog algebra {}: {}\n", c.algebra, parts.join(", ")),
                    )
                }
                None => ("unknown", format!("no proof of height <= {bound}; status unknown\n")),
            };
            let body = json!({"result": status, "sequent": s.to_string(), "bound": bound, "countermodel": cm});
            Ok(Report::new(EXIT_FALSE, body, text))
        }
    }
}

fn cmd_check_proof(ctx: &mut Ctx, file: &str, system: &str, premises: &[String], axioms: &[String]) -> Result<Report, CliError> {
    let text = ctx.read(file)?;
    let d = Derivation::from_json(&text, ctx.notation)?;
    let mut sys = match system {
        "no-nec" | "no-adj" => HilbertSystem::new(
            system,
            Signature::FULL,
            HilbertSystem::preset("MALL")?
                .axiom_names()
                .map(|n| (n.to_string(), crate::proofs::scheme(n).expect("scheme")))
                .collect(),
            Rules {
                mp: true,
                adj: system != "no-adj",
                nec: false,
            },
        )?,
        other => HilbertSystem::preset(other)?,
    };
    for ax in axioms {
        let (name, f) = ax
            .split_once('=')
            .ok_or_else(|| CliError::Usage(format!("bad axiom `{ax}`, expected NAME=formula")))?;
        sys = sys.with_axiom(name.trim(), ctx.formula(f)?)?;
    }
    let gamma = premises.iter().map(|p| ctx.formula(p)).collect::<Result<Vec<_>, _>>()?;
    let rep = check_derivation(&d, &sys, &gamma);
    let out = match (&rep.step, &rep.reason) {
        (Some(k), Some(r)) => format!("invalid at step {k}: {r}\n"),
        _ => format!("valid ({} steps)\n", d.steps.len()),
    };
    let body = serde_json::to_value(&rep).expect("json");
    Ok(Report::new(if rep.valid { EXIT_OK } else { EXIT_FALSE }, body, out))
}

#[derive(Serialize)]
struct CatalogRow {
    invariant_factors: Vec<u64>,
    signature: Signature,
    size: usize,
    class: &'static str,
    passed: bool,
    simple: Option<bool>,
}

#[derive(Serialize)]
struct SpanRow {
    label: String,
    signature: Signature,
    d_size: usize,
    is_amalgam: bool,
    strong: Option<bool>,
    error: Option<String>,
}

fn cmd_catalog(ctx: &mut Ctx, max_order: u64, primes: Option<&PrimeSet>, sig: &str, spans: bool) -> Result<Report, CliError> {
    let sigs: Vec<Signature> = if sig == "all" {
        Signature::all().to_vec()
    } else {
        vec![parse_signature(sig).map_err(CliError::Usage)?]
    };
    let limits = ctx.limits;
    let pool = ctx.pool()?;
    if spans {
        let primes = primes
            .cloned()
            .ok_or_else(|| CliError::Usage("--spans needs --primes".into()))?;
        let mut all = Vec::new();
        for s in &sigs {
            all.extend(span_catalog(&primes, *s, max_order, &limits)?);
        }
        let rows: Vec<SpanRow> = pool.install(|| {
            all.par_iter()
                .map(|cs| {
                    let sig = cs.query.signature();
                    match amalgamate(&cs.span, &cs.query, &limits) {
                        Ok(am) => {
                            let rep = verify_amalgam(&cs.span, &am, true);
                            SpanRow {
                                label: cs.label.clone(),
                                signature: sig,
                                d_size: am.d.size(),
                                is_amalgam: rep.is_amalgam(),
                                strong: rep.strong(),
                                error: None,
                            }
                        }
                        Err(e) => SpanRow {
                            label: cs.label.clone(),
                            signature: sig,
                            d_size: 0,
                            is_amalgam: false,
                            strong: None,
                            error: Some(e.to_string()),
                        },
                    }
                })
                .collect()
        });
        let ok = rows.iter().all(|r| r.is_amalgam);
        let strong = rows.iter().filter(|r| r.strong == Some(true)).count();
        let mut text = format!("{} spans; all amalgamated: {ok}; strong: {strong}\n", rows.len());
        for r in rows.iter().filter(|r| !r.is_amalgam) {
            let _ = writeln!(text, "  FAILED {} over {}: {}", r.label, r.signature, r.error.as_deref().unwrap_or("checks failed"));
        }
        let body = json!({"spans": rows.len(), "all_amalgamated": ok, "strong": strong, "rows": rows});
        return Ok(Report::new(if ok { EXIT_OK } else { EXIT_FALSE }, body, text));
    }
    let groups: Vec<FiniteGroup> = abelian_catalog(max_order, &limits)?
        .into_iter()
        .filter(|g| primes.is_none_or(|p| crate::group::check_sigma(g, p).passed()))
        .collect();
    let jobs: Vec<(&FiniteGroup, Signature)> = groups.iter().flat_map(|g| sigs.iter().map(move |s| (g, *s))).collect();
    let rows: Result<Vec<CatalogRow>, CliError> = pool.install(|| {
        jobs.par_iter()
            .map(|(g, s)| {
                let r = build_r(g, *s, &limits)?;
                let tag = ClassTag::strongest_for(*s);
                let rep = check_class(r.algebra(), tag)?;
                let simple = congruence_set(r.algebra(), &limits).ok().map(|c| c.is_simple());
                Ok(CatalogRow {
                    invariant_factors: g.invariant_factors(),
                    signature: *s,
                    size: r.algebra().size(),
                    class: tag.name(),
                    passed: rep.passed(),
                    simple,
                })
            })
            .collect()
    });
    let rows = rows?;
    let ok = rows.iter().all(|r| r.passed);
    let mut text = format!("{} algebras; all pass their class: {ok}\n", rows.len());
    for r in &rows {
        let _ = writeln!(
            text,
            "  {:?} {} size {} {} {}",
            r.invariant_factors,
            r.signature,
            r.size,
            r.class,
            if r.passed { "pass" } else { "FAIL" }
        );
    }
    let body = json!({"algebras": rows.len(), "all_pass": ok, "rows": rows});
    Ok(Report::new(if ok { EXIT_OK } else { EXIT_FALSE }, body, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn go(args: &[&str]) -> Outcome {
        run(std::iter::once("girale").chain(args.iter().copied()))
    }

    #[test]
    fn build_z3_full() {
        let o = go(&["--json", "build", "--group", "3", "--sig", "full"]);
        assert_eq!(o.code, 0, "{}", o.stderr);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["algebra"]["size"], 5);
        assert_eq!(v["class"], "girale");
        assert!(v["meta"]["inputs_sha256"].as_str().unwrap().len() == 64);
    }

    #[test]
    fn parse_girard() {
        let o = go(&["--json", "--notation", "girard", "parse", "x -o x"]);
        assert_eq!(o.code, 0);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["substructural"], "x -> x");
    }

    #[test]
    fn usage_and_capacity_codes() {
        assert_eq!(go(&["bogus"]).code, EXIT_USAGE);
        assert_eq!(go(&["parse", "x ->"]).code, EXIT_USAGE);
        assert_eq!(go(&["build", "--group", "abc"]).code, EXIT_USAGE);
        assert_eq!(go(&["build", "--group", "1000"]).code, EXIT_CAPACITY);
        assert_eq!(go(&["congruences", "--algebra", "R:7x7:none"]).code, EXIT_CAPACITY);
    }

    #[test]
    fn consequence_countermodel() {
        let o = go(&["--json", "consequence", "--algebras", "R:2:none", "--premises", "x*y", "--conclusion", "x"]);
        assert_eq!(o.code, EXIT_FALSE);
        let v: Value = serde_json::from_str(&o.stdout).unwrap();
        assert_eq!(v["countermodel"]["assignment"]["x"], "a");
        assert_eq!(v["countermodel"]["assignment"]["y"], "a");
    }

    #[test]
    fn prove_and_refute() {
        assert_eq!(go(&["prove", "--sequent", "x, x -> y => y"]).code, 0);
        let o = go(&["--json", "prove", "--sequent", "x => x * x", "--bound", "12"]);
        assert_eq!(o.code, EXIT_FALSE);
        assert!(o.stdout.contains("refuted"));
    }
}
