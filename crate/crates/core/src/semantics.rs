//! Evaluation of formulas in finite algebras and the judgments built on it:
//! validity (`x ∧ 1 = 1`), consequence over an explicit list of algebras,
//! deduction-theorem checks and bounded interpolant search.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;
use thiserror::Error;

use crate::algebra::FiniteAlgebra;
use crate::formula::{BinOp, Constant, Formula};

pub type Assignment = BTreeMap<String, usize>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SemanticsError {
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("`{symbol}` is not in the signature of algebra {algebra}")]
    NotInSignature { symbol: String, algebra: usize },
    #[error("the algebra list is empty")]
    NoAlgebras,
    #[error("assignment value {value} for `{var}` is out of range")]
    OutOfRange { var: String, value: usize },
    #[error("the entailment does not hold; countermodel in algebra {}", .0.algebra)]
    NotEntailed(Box<Countermodel>),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// An assignment refuting a judgment.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Countermodel {
    /// Position of the algebra in the list the judgment ranged over.
    pub algebra: usize,
    /// Element names.
    pub assignment: BTreeMap<String, String>,
    /// Element indices.
    pub indices: BTreeMap<String, usize>,
}

impl Countermodel {
    fn new(algebra: usize, a: &FiniteAlgebra, vars: &[String], env: &[usize]) -> Countermodel {
        Countermodel {
            algebra,
            assignment: vars.iter().zip(env).map(|(v, &x)| (v.clone(), a.element_name(x))).collect(),
            indices: vars.iter().cloned().zip(env.iter().copied()).collect(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", content = "countermodel", rename_all = "lowercase")]
pub enum Verdict {
    Holds,
    Fails(Countermodel),
}

impl Verdict {
    pub fn holds(&self) -> bool {
        matches!(self, Verdict::Holds)
    }

    pub fn countermodel(&self) -> Option<&Countermodel> {
        match self {
            Verdict::Holds => None,
            Verdict::Fails(c) => Some(c),
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Instr {
    Var(usize),
    Elem(usize),
    Bang,
    Bin(BinOp),
}

/// A formula compiled against one algebra and a fixed variable order.
#[derive(Debug, Clone)]
struct Program {
    code: Vec<Instr>,
}

impl Program {
    fn compile(a: &FiniteAlgebra, algebra: usize, f: &Formula, vars: &[String]) -> Result<Program, SemanticsError> {
        let mut code = Vec::with_capacity(f.size());
        Self::emit(a, algebra, f, vars, &mut code)?;
        Ok(Program { code })
    }

    fn emit(a: &FiniteAlgebra, algebra: usize, f: &Formula, vars: &[String], code: &mut Vec<Instr>) -> Result<(), SemanticsError> {
        match f {
            Formula::Var(v) => {
                let i = vars
                    .iter()
                    .position(|w| w == v)
                    .ok_or_else(|| SemanticsError::UnboundVariable(v.clone()))?;
                code.push(Instr::Var(i));
            }
            Formula::Const(c) => {
                let x = a.constant(*c).ok_or_else(|| SemanticsError::NotInSignature {
                    symbol: constant_symbol(*c).into(),
                    algebra,
                })?;
                code.push(Instr::Elem(x));
            }
            Formula::Bang(g) => {
                if a.bang_table().is_none() {
                    return Err(SemanticsError::NotInSignature {
                        symbol: "!".into(),
                        algebra,
                    });
                }
                Self::emit(a, algebra, g, vars, code)?;
                code.push(Instr::Bang);
            }
            Formula::Binary(op, l, r) => {
                Self::emit(a, algebra, l, vars, code)?;
                Self::emit(a, algebra, r, vars, code)?;
                code.push(Instr::Bin(*op));
            }
        }
        Ok(())
    }

    fn run(&self, a: &FiniteAlgebra, env: &[usize], stack: &mut Vec<usize>) -> usize {
        stack.clear();
        for ins in &self.code {
            match *ins {
                Instr::Var(i) => stack.push(env[i]),
                Instr::Elem(x) => stack.push(x),
                Instr::Bang => {
                    let x = stack.pop().expect("operand");
                    stack.push(a.bang(x).expect("checked at compile time"));
                }
                Instr::Bin(op) => {
                    let r = stack.pop().expect("operand");
                    let l = stack.pop().expect("operand");
                    stack.push(apply(a, op, l, r));
                }
            }
        }
        stack.pop().expect("result")
    }
}

fn constant_symbol(c: Constant) -> &'static str {
    match c {
        Constant::One => "1",
        Constant::Zero => "0",
        Constant::Bot => "bot",
        Constant::Top => "top",
    }
}

#[inline]
fn apply(a: &FiniteAlgebra, op: BinOp, l: usize, r: usize) -> usize {
    match op {
        BinOp::Meet => a.meet(l, r),
        BinOp::Join => a.join(l, r),
        BinOp::Mul => a.mult(l, r),
        BinOp::Imp => a.imp(l, r),
    }
}

/// Visits every assignment of `k` variables into `0..n` in lexicographic
/// order (first variable slowest). Stops early when `f` returns `false`.
fn for_each_assignment(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) {
    let mut env = vec![0; k];
    loop {
        if !f(&env) {
            return;
        }
        let mut i = k;
        loop {
            if i == 0 {
                return;
            }
            i -= 1;
            env[i] += 1;
            if env[i] < n {
                break;
            }
            env[i] = 0;
        }
    }
}

fn sorted_vars<'a>(formulas: impl IntoIterator<Item = &'a Formula>) -> Vec<String> {
    let mut set = BTreeSet::new();
    for f in formulas {
        set.extend(f.free_variables());
    }
    set.into_iter().collect()
}

/// Value of `f` under `h`.
pub fn eval(a: &FiniteAlgebra, f: &Formula, h: &Assignment) -> Result<usize, SemanticsError> {
    let vars: Vec<String> = f.free_variables().into_iter().collect();
    let env = vars
        .iter()
        .map(|v| {
            let x = *h.get(v).ok_or_else(|| SemanticsError::UnboundVariable(v.clone()))?;
            if x >= a.size() {
                return Err(SemanticsError::OutOfRange { var: v.clone(), value: x });
            }
            Ok(x)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let p = Program::compile(a, 0, f, &vars)?;
    Ok(p.run(a, &env, &mut Vec::new()))
}

/// `f` is designated under every assignment; the countermodel is the first
/// refuting assignment in lexicographic order of sorted variable names.
pub fn valid(a: &FiniteAlgebra, f: &Formula) -> Result<Verdict, SemanticsError> {
    consequence(std::slice::from_ref(a), &[], f)
}

/// `Γ ⊨ φ` over every algebra of the list.
pub fn consequence(algebras: &[FiniteAlgebra], premises: &[Formula], conclusion: &Formula) -> Result<Verdict, SemanticsError> {
    if algebras.is_empty() {
        return Err(SemanticsError::NoAlgebras);
    }
    let vars = sorted_vars(premises.iter().chain(std::iter::once(conclusion)));
    let mut stack = Vec::new();
    for (k, a) in algebras.iter().enumerate() {
        let prem = premises
            .iter()
            .map(|p| Program::compile(a, k, p, &vars))
            .collect::<Result<Vec<_>, _>>()?;
        let concl = Program::compile(a, k, conclusion, &vars)?;
        let mut refuted = None;
        for_each_assignment(a.size(), vars.len(), |env| {
            if prem.iter().all(|p| a.designated(p.run(a, env, &mut stack)))
                && !a.designated(concl.run(a, env, &mut stack))
            {
                refuted = Some(env.to_vec());
                return false;
            }
            true
        });
        if let Some(env) = refuted {
            return Ok(Verdict::Fails(Countermodel::new(k, a, &vars, &env)));
        }
    }
    Ok(Verdict::Holds)
}

/// The three judgments of the deduction theorems for `!`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DeductionReport {
    /// `Γ, φ ⊨ ψ`
    pub with_premise: Verdict,
    /// `Γ ⊨ !φ → ψ`
    pub avron: Verdict,
    /// `Γ ⊨ !φ → !ψ`
    pub ddp: Verdict,
}

impl DeductionReport {
    pub fn agree(&self) -> bool {
        let h = self.with_premise.holds();
        self.avron.holds() == h && self.ddp.holds() == h
    }
}

pub fn deduction_check(algebras: &[FiniteAlgebra], gamma: &[Formula], phi: &Formula, psi: &Formula) -> Result<DeductionReport, SemanticsError> {
    if let Some(k) = algebras.iter().position(|a| a.bang_table().is_none()) {
        return Err(SemanticsError::NotInSignature {
            symbol: "!".into(),
            algebra: k,
        });
    }
    let mut extended = gamma.to_vec();
    extended.push(phi.clone());
    let bphi = Formula::bang(phi.clone());
    Ok(DeductionReport {
        with_premise: consequence(algebras, &extended, psi)?,
        avron: consequence(algebras, gamma, &Formula::imp(bphi.clone(), psi.clone()))?,
        ddp: consequence(algebras, gamma, &Formula::imp(bphi, Formula::bang(psi.clone())))?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum InterpolationMode {
    /// `φ ⊨ δ` and `δ ⊨ ψ`.
    Deductive,
    /// `⊨ φ → δ` and `⊨ δ → ψ`.
    Craig,
    /// `⊨ !φ → !δ` and `⊨ !δ → !ψ`.
    Guarded,
}

impl std::str::FromStr for InterpolationMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "deductive" => Ok(InterpolationMode::Deductive),
            "craig" => Ok(InterpolationMode::Craig),
            "guarded" => Ok(InterpolationMode::Guarded),
            other => Err(format!("unknown interpolation mode `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchOptions {
    /// In guarded mode, look for `⊨ !φ → δ` and `⊨ !δ → ψ` instead.
    pub guarded_variant: bool,
    /// Upper bound on generated candidates (duplicates included).
    pub max_candidates: usize,
}

impl Default for SearchOptions {
    fn default() -> Self {
        SearchOptions {
            guarded_variant: false,
            max_candidates: 2_000_000,
        }
    }
}

/// One judgment `premises ⊨ conclusion` (validity when there are no premises).
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Judgment {
    pub premises: Vec<Formula>,
    pub conclusion: Formula,
    pub holds: bool,
}

impl Judgment {
    fn check(algebras: &[FiniteAlgebra], premises: Vec<Formula>, conclusion: Formula) -> Result<Judgment, SemanticsError> {
        let holds = consequence(algebras, &premises, &conclusion)?.holds();
        Ok(Judgment {
            premises,
            conclusion,
            holds,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Certificate {
    pub mode: InterpolationMode,
    pub guarded_variant: bool,
    pub judgments: Vec<Judgment>,
}

impl Certificate {
    /// Recomputes every judgment from scratch.
    pub fn verify(&self, algebras: &[FiniteAlgebra]) -> Result<bool, SemanticsError> {
        for j in &self.judgments {
            if consequence(algebras, &j.premises, &j.conclusion)?.holds() != j.holds || !j.holds {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum InterpolantOutcome {
    Found {
        delta: Formula,
        certificate: Certificate,
        examined: usize,
    },
    /// No candidate up to the depth bound works. Not a refutation.
    Exhausted {
        depth: usize,
        examined: usize,
        /// The candidate cap stopped the search before the depth bound did.
        capped: bool,
    },
}

/// The two sides of a judgment as formulas, for each mode.
struct Shape {
    mode: InterpolationMode,
    variant: bool,
}

impl Shape {
    fn wrap_left(&self, f: &Formula) -> Formula {
        match self.mode {
            InterpolationMode::Guarded => Formula::bang(f.clone()),
            _ => f.clone(),
        }
    }

    fn wrap_right(&self, f: &Formula) -> Formula {
        match self.mode {
            InterpolationMode::Guarded if !self.variant => Formula::bang(f.clone()),
            _ => f.clone(),
        }
    }

    /// `lhs` entails `rhs` in the sense of the mode.
    fn judgment(&self, algebras: &[FiniteAlgebra], lhs: &Formula, rhs: &Formula) -> Result<Judgment, SemanticsError> {
        match self.mode {
            InterpolationMode::Deductive => Judgment::check(algebras, vec![lhs.clone()], rhs.clone()),
            _ => Judgment::check(algebras, vec![], Formula::imp(self.wrap_left(lhs), self.wrap_right(rhs))),
        }
    }

    /// Pointwise form of the judgment on element values.
    #[inline]
    fn holds_at(&self, a: &FiniteAlgebra, lhs: usize, rhs: usize) -> bool {
        match self.mode {
            InterpolationMode::Deductive => !a.designated(lhs) || a.designated(rhs),
            InterpolationMode::Craig => a.designated(a.imp(lhs, rhs)),
            InterpolationMode::Guarded => {
                let l = a.bang(lhs).expect("bang checked");
                let r = if self.variant { rhs } else { a.bang(rhs).expect("bang checked") };
                a.designated(a.imp(l, r))
            }
        }
    }
}

struct Candidate {
    formula: Formula,
    height: usize,
    /// Values over the shared-variable assignment space, per algebra.
    values: Vec<Vec<usize>>,
}

/// Searches for an interpolant of `φ` and `ψ` over `var(φ) ∩ var(ψ)` and the
/// constants of the common signature.
///
/// Candidates are generated by size; within a size by connective in the order
/// `∧ < ∨ < · < → < !`, then by the enumeration order of the subformulas.
/// Candidates taking the same values on every algebra as an earlier one are
/// skipped, and only trees of height at most `depth` are built from the kept
/// ones.
pub fn interpolant_search(
    algebras: &[FiniteAlgebra],
    phi: &Formula,
    psi: &Formula,
    mode: InterpolationMode,
    depth: usize,
    opts: &SearchOptions,
) -> Result<InterpolantOutcome, SemanticsError> {
    if algebras.is_empty() {
        return Err(SemanticsError::NoAlgebras);
    }
    let has_bang = algebras.iter().all(|a| a.bang_table().is_some());
    if mode == InterpolationMode::Guarded && !has_bang {
        return Err(SemanticsError::Precondition("guarded interpolation needs ! in the signature".into()));
    }
    let shape = Shape {
        mode,
        variant: opts.guarded_variant,
    };
    let entailment = shape.judgment(algebras, phi, psi)?;
    if !entailment.holds {
        let f = Formula::imp(shape.wrap_left(phi), shape.wrap_right(psi));
        let verdict = match mode {
            InterpolationMode::Deductive => consequence(algebras, std::slice::from_ref(phi), psi)?,
            _ => consequence(algebras, &[], &f)?,
        };
        if let Verdict::Fails(c) = verdict {
            return Err(SemanticsError::NotEntailed(Box::new(c)));
        }
    }

    let all_vars = sorted_vars([phi, psi]);
    let pv = phi.free_variables();
    let qv = psi.free_variables();
    let shared: Vec<String> = pv.intersection(&qv).cloned().collect();
    let shared_pos: Vec<usize> = shared
        .iter()
        .map(|v| all_vars.iter().position(|w| w == v).expect("shared var"))
        .collect();

    // φ and ψ on the full space, and the projection onto the shared space.
    struct Space {
        phi: Vec<usize>,
        psi: Vec<usize>,
        project: Vec<usize>,
    }
    let mut stack = Vec::new();
    let mut spaces = Vec::with_capacity(algebras.len());
    for (k, a) in algebras.iter().enumerate() {
        let p = Program::compile(a, k, phi, &all_vars)?;
        let q = Program::compile(a, k, psi, &all_vars)?;
        let mut sp = Space {
            phi: Vec::new(),
            psi: Vec::new(),
            project: Vec::new(),
        };
        for_each_assignment(a.size(), all_vars.len(), |env| {
            sp.phi.push(p.run(a, env, &mut stack));
            sp.psi.push(q.run(a, env, &mut stack));
            sp.project.push(shared_pos.iter().fold(0, |acc, &i| acc * a.size() + env[i]));
            true
        });
        spaces.push(sp);
    }

    let passes = |values: &[Vec<usize>]| {
        algebras.iter().zip(&spaces).zip(values).all(|((a, sp), dv)| {
            (0..sp.phi.len()).all(|i| {
                let d = dv[sp.project[i]];
                shape.holds_at(a, sp.phi[i], d) && shape.holds_at(a, d, sp.psi[i])
            })
        })
    };

    // Atoms: shared variables, then the constants every algebra has.
    let mut atoms: Vec<Formula> = shared.iter().map(|v| Formula::var(v)).collect();
    for c in [Constant::One, Constant::Zero, Constant::Bot, Constant::Top] {
        if algebras.iter().all(|a| a.constant(c).is_some()) {
            atoms.push(Formula::constant(c));
        }
    }

    let mut reps: Vec<Candidate> = Vec::new();
    let mut by_size: Vec<Vec<usize>> = vec![Vec::new()];
    let mut seen: HashSet<Vec<usize>> = HashSet::new();
    let mut examined = 0usize;

    let shared_len = |a: &FiniteAlgebra| a.size().pow(shared.len() as u32);
    let max_size = (1usize << (depth.min(20) + 1)) - 1;

    // Registers a candidate; returns the outcome when it is an interpolant.
    let mut offer = |cand: Candidate, reps: &mut Vec<Candidate>, level: &mut Vec<usize>, examined: &mut usize| -> Option<Formula> {
        *examined += 1;
        let key: Vec<usize> = cand.values.concat();
        if !seen.insert(key) {
            return None;
        }
        let found = passes(&cand.values).then(|| cand.formula.clone());
        level.push(reps.len());
        reps.push(cand);
        found
    };

    let mut found: Option<Formula> = None;
    let mut capped = false;
    'sizes: for size in 1..=max_size {
        let mut level = Vec::new();
        if size == 1 {
            for f in &atoms {
                let values = algebras
                    .iter()
                    .enumerate()
                    .map(|(k, a)| {
                        let p = Program::compile(a, k, f, &shared).expect("atom compiles");
                        let mut vals = Vec::with_capacity(shared_len(a));
                        for_each_assignment(a.size(), shared.len(), |env| {
                            vals.push(p.run(a, env, &mut stack));
                            true
                        });
                        vals
                    })
                    .collect();
                let cand = Candidate {
                    formula: f.clone(),
                    height: 0,
                    values,
                };
                if let Some(f) = offer(cand, &mut reps, &mut level, &mut examined) {
                    found = Some(f);
                    break 'sizes;
                }
            }
        } else {
            for op in BinOp::ALL {
                for ls in 1..size.saturating_sub(1) {
                    let rs = size - 1 - ls;
                    for li in 0..by_size[ls].len() {
                        for ri in 0..by_size[rs].len() {
                            let (l, r) = (&reps[by_size[ls][li]], &reps[by_size[rs][ri]]);
                            let height = 1 + l.height.max(r.height);
                            if height > depth {
                                continue;
                            }
                            if examined >= opts.max_candidates {
                                capped = true;
                                break 'sizes;
                            }
                            let values = algebras
                                .iter()
                                .zip(l.values.iter().zip(&r.values))
                                .map(|(a, (lv, rv))| lv.iter().zip(rv).map(|(&x, &y)| apply(a, op, x, y)).collect())
                                .collect();
                            let cand = Candidate {
                                formula: Formula::binary(op, l.formula.clone(), r.formula.clone()),
                                height,
                                values,
                            };
                            if let Some(f) = offer(cand, &mut reps, &mut level, &mut examined) {
                                found = Some(f);
                                break 'sizes;
                            }
                        }
                    }
                }
            }
            if has_bang {
                for ci in 0..by_size[size - 1].len() {
                    let c = &reps[by_size[size - 1][ci]];
                    if c.height + 1 > depth {
                        continue;
                    }
                    if examined >= opts.max_candidates {
                        capped = true;
                        break 'sizes;
                    }
                    let values = algebras
                        .iter()
                        .zip(&c.values)
                        .map(|(a, cv)| cv.iter().map(|&x| a.bang(x).expect("bang")).collect())
                        .collect();
                    let cand = Candidate {
                        formula: Formula::bang(c.formula.clone()),
                        height: c.height + 1,
                        values,
                    };
                    if let Some(f) = offer(cand, &mut reps, &mut level, &mut examined) {
                        found = Some(f);
                        break 'sizes;
                    }
                }
            }
        }
        by_size.push(level);
    }

    match found {
        Some(delta) => {
            let certificate = Certificate {
                mode,
                guarded_variant: opts.guarded_variant,
                judgments: vec![
                    shape.judgment(algebras, phi, &delta)?,
                    shape.judgment(algebras, &delta, psi)?,
                ],
            };
            if !certificate.judgments.iter().all(|j| j.holds) {
                return Err(SemanticsError::Precondition(format!(
                    "candidate {delta} failed re-verification"
                )));
            }
            Ok(InterpolantOutcome::Found {
                delta,
                certificate,
                examined,
            })
        }
        None => Ok(InterpolantOutcome::Exhausted { depth, examined, capped }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::Signature;
    use crate::construct::build_r;
    use crate::formula::Notation;
    use crate::group::make_group;
    use crate::limits::Limits;

    fn r(f: &[u64], sig: Signature) -> FiniteAlgebra {
        build_r(&make_group(f, &Limits::default()).unwrap(), sig, &Limits::default())
            .unwrap()
            .into_algebra()
    }

    fn p(s: &str) -> Formula {
        Formula::parse(s, Notation::Substructural).unwrap()
    }

    fn h(pairs: &[(&str, usize)]) -> Assignment {
        pairs.iter().map(|(v, x)| (v.to_string(), *x)).collect()
    }

    // R(Z_3) layout: ⊥=0, 1=1, a=2, a²=3, ⊤=4.

    #[test]
    fn eval_examples() {
        let a0 = r(&[3], Signature { zero: true, ..Signature::EMPTY });
        assert_eq!(eval(&a0, &p("~~x -> x"), &h(&[("x", 2)])).unwrap(), 1);
        assert_eq!(eval(&a0, &p("~x"), &h(&[("x", 2)])).unwrap(), 3);
        assert_eq!(eval(&a0, &p("1"), &h(&[])).unwrap(), 1);
        let ab = r(&[3], Signature { bang: true, ..Signature::EMPTY });
        assert_eq!(eval(&ab, &p("!x"), &h(&[("x", 2)])).unwrap(), 0);
    }

    #[test]
    fn eval_errors() {
        let a = r(&[3], Signature::EMPTY);
        assert_eq!(
            eval(&a, &p("x -> y"), &h(&[("x", 1)])),
            Err(SemanticsError::UnboundVariable("y".into()))
        );
        assert!(matches!(eval(&a, &p("!x"), &h(&[("x", 1)])), Err(SemanticsError::NotInSignature { .. })));
        assert!(matches!(eval(&a, &p("0"), &h(&[])), Err(SemanticsError::NotInSignature { .. })));
    }

    #[test]
    fn distributivity_fails_in_r_z3() {
        let a = r(&[3], Signature::EMPTY);
        let f = p("(x /\\ (y \\/ z)) -> ((x /\\ y) \\/ (x /\\ z))");
        let v = valid(&a, &f).unwrap();
        let cm = v.countermodel().unwrap();
        assert!(!a.designated(eval(&a, &f, &cm.indices).unwrap()));
        // The assignment x=a, y=1, z=a² refutes it as well.
        assert_eq!(eval(&a, &f, &h(&[("x", 2), ("y", 1), ("z", 3)])).unwrap(), 0);
        assert!(valid(&a, &p("x -> x")).unwrap().holds());
    }

    #[test]
    fn consequence_examples() {
        let r2 = r(&[2], Signature::EMPTY);
        let v = consequence(std::slice::from_ref(&r2), &[p("x * y")], &p("x")).unwrap();
        let cm = v.countermodel().unwrap();
        assert_eq!(cm.assignment.get("x").map(String::as_str), Some("a"));
        assert_eq!(cm.assignment.get("y").map(String::as_str), Some("a"));
        assert!(consequence(std::slice::from_ref(&r2), &[p("x * y")], &p("x * y")).unwrap().holds());
        let g3 = r(&[3], Signature::FULL);
        assert!(consequence(&[g3], &[p("x")], &p("!x")).unwrap().holds());
    }

    #[test]
    fn why_not_is_derived() {
        let g3 = r(&[3], Signature::FULL);
        // ?x = ~!~x; on a: ~a = a², !a² = ⊥, ~⊥ = ⊤
        assert_eq!(eval(&g3, &p("?x"), &h(&[("x", 2)])).unwrap(), 4);
    }

    #[test]
    fn deduction_examples() {
        let g3 = r(&[3], Signature::FULL);
        let k = std::slice::from_ref(&g3);
        let rep = deduction_check(k, &[], &p("x"), &p("x")).unwrap();
        assert!(rep.agree() && rep.with_premise.holds());
        let rep = deduction_check(k, &[p("x")], &p("y"), &p("x * y")).unwrap();
        assert!(rep.agree() && rep.with_premise.holds());
        let t = FiniteAlgebra::trivial(Signature::FULL);
        let rep = deduction_check(&[t], &[], &p("x"), &p("0")).unwrap();
        assert!(rep.agree() && rep.with_premise.holds());
        let plain = r(&[3], Signature::EMPTY);
        assert!(deduction_check(&[plain], &[], &p("x"), &p("x")).is_err());
    }

    fn found(o: InterpolantOutcome) -> (Formula, Certificate) {
        match o {
            InterpolantOutcome::Found { delta, certificate, .. } => (delta, certificate),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn interpolation_examples() {
        let r2 = r(&[2], Signature::EMPTY);
        let k = std::slice::from_ref(&r2);
        let (d, cert) = found(
            interpolant_search(k, &p("x * (x -> y)"), &p("y \\/ z"), InterpolationMode::Deductive, 3, &SearchOptions::default()).unwrap(),
        );
        assert_eq!(d, p("y"));
        assert!(cert.verify(k).unwrap());
        for mode in [InterpolationMode::Deductive, InterpolationMode::Craig] {
            let (d, _) = found(interpolant_search(k, &p("x"), &p("x"), mode, 2, &SearchOptions::default()).unwrap());
            assert_eq!(d, p("x"));
        }
        let g3 = r(&[3], Signature::FULL);
        let k = std::slice::from_ref(&g3);
        let (d, cert) = found(
            interpolant_search(k, &p("x /\\ y"), &p("x \\/ z"), InterpolationMode::Guarded, 3, &SearchOptions::default()).unwrap(),
        );
        assert_eq!(d, p("x"));
        assert!(cert.verify(k).unwrap());
    }

    #[test]
    fn interpolation_refuses_non_entailment() {
        let r2 = r(&[2], Signature::EMPTY);
        let e = interpolant_search(&[r2], &p("x"), &p("x * x"), InterpolationMode::Craig, 2, &SearchOptions::default());
        assert!(matches!(e, Err(SemanticsError::NotEntailed(_))));
    }

    #[test]
    fn exhaustion_is_distinct() {
        // No atom over {x, y} interpolates, x * y itself needs height 1.
        let r2 = r(&[2], Signature::EMPTY);
        let k = std::slice::from_ref(&r2);
        let o = interpolant_search(k, &p("x * y"), &p("(x * y) \\/ z"), InterpolationMode::Craig, 0, &SearchOptions::default()).unwrap();
        assert!(matches!(o, InterpolantOutcome::Exhausted { capped: false, .. }));
        let (d, _) = found(
            interpolant_search(k, &p("x * y"), &p("(x * y) \\/ z"), InterpolationMode::Craig, 1, &SearchOptions::default()).unwrap(),
        );
        assert_eq!(d, p("x * y"));
    }
}

#[cfg(test)]
mod props {
    use super::*;
    use crate::algebra::Signature;
    use crate::construct::build_r;
    use crate::group::make_group;
    use crate::limits::Limits;
    use proptest::prelude::*;

    fn small_formula() -> impl Strategy<Value = Formula> {
        let leaf = prop_oneof![
            Just(Formula::var("x")),
            Just(Formula::var("y")),
            Just(Formula::var("z")),
            Just(Formula::one()),
        ];
        leaf.prop_recursive(3, 12, 2, |inner| {
            prop_oneof![
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::meet(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::join(a, b)),
                (inner.clone(), inner.clone()).prop_map(|(a, b)| Formula::mul(a, b)),
                (inner.clone(), inner).prop_map(|(a, b)| Formula::imp(a, b)),
            ]
        })
    }

    fn k() -> Vec<FiniteAlgebra> {
        [&[2u64][..], &[3]]
            .iter()
            .map(|f| {
                build_r(&make_group(f, &Limits::default()).unwrap(), Signature::EMPTY, &Limits::default())
                    .unwrap()
                    .into_algebra()
            })
            .collect()
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn monotone(g in small_formula(), extra in small_formula(), phi in small_formula()) {
            let k = k();
            if consequence(&k, std::slice::from_ref(&g), &phi).unwrap().holds() {
                prop_assert!(consequence(&k, &[g, extra], &phi).unwrap().holds());
            }
        }

        #[test]
        fn conjunctive(g1 in small_formula(), g2 in small_formula(), phi in small_formula()) {
            let k = k();
            let split = consequence(&k, &[g1.clone(), g2.clone()], &phi).unwrap().holds();
            let joined = consequence(&k, &[Formula::meet(g1, g2)], &phi).unwrap().holds();
            prop_assert_eq!(split, joined);
        }

        #[test]
        fn renaming_invariant(g in small_formula(), phi in small_formula()) {
            let k = k();
            let s: crate::formula::Substitution = [("x", "u"), ("y", "v"), ("z", "w")]
                .iter()
                .map(|(a, b)| (a.to_string(), Formula::var(b)))
                .collect();
            let before = consequence(&k, std::slice::from_ref(&g), &phi).unwrap().holds();
            let after = consequence(&k, &[g.substitute(&s)], &phi.substitute(&s)).unwrap().holds();
            prop_assert_eq!(before, after);
        }

        #[test]
        fn found_interpolants_reverify(phi in small_formula(), psi in small_formula()) {
            let k = k();
            let opts = SearchOptions { max_candidates: 20_000, ..SearchOptions::default() };
            if let Ok(InterpolantOutcome::Found { delta, certificate, .. }) =
                interpolant_search(&k, &phi, &psi, InterpolationMode::Craig, 2, &opts)
            {
                prop_assert!(certificate.verify(&k).unwrap());
                let shared: BTreeSet<_> = phi.free_variables().intersection(&psi.free_variables()).cloned().collect();
                prop_assert!(delta.free_variables().is_subset(&shared));
            }
        }
    }
}
