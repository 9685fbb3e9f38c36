//! Proof objects: Hilbert-style derivations checked against axiom schemes and
//! rules, and a cut-free sequent calculus for the exchange fragment with
//! bounded backward search and Craig interpolant extraction.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algebra::{lukasiewicz_chain, FiniteAlgebra, Signature};
use crate::construct::build_r;
use crate::formula::{BinOp, Constant, Formula, Notation, ParseError, Substitution};
use crate::group::make_group;
use crate::limits::Limits;
use crate::semantics::{consequence, Countermodel, SemanticsError, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProofError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("malformed input: {0}")]
    Malformed(String),
    #[error("`{0}` is outside the sequent fragment (no !, bot, top)")]
    Fragment(String),
    #[error("unknown system `{0}`")]
    UnknownSystem(String),
    #[error("invalid proof node at {path:?}: {reason}")]
    InvalidNode { path: Vec<usize>, reason: String },
    #[error("unsplittable partition: {0}")]
    Partition(String),
    #[error("interpolant failed re-verification: {0}")]
    Verification(String),
    #[error(transparent)]
    Semantics(#[from] SemanticsError),
}

fn p(text: &str) -> Formula {
    Formula::parse(text, Notation::Substructural).expect("built-in scheme parses")
}

/// The axiom schemes, with `a`, `b`, `c` as metavariables.
pub const SCHEMES: [(&str, &str); 24] = [
    ("A1", "a -> a"),
    ("A2", "a /\\ b -> a"),
    ("A3", "a /\\ b -> b"),
    ("A4", "a -> a \\/ b"),
    ("A5", "b -> a \\/ b"),
    ("A6", "(a -> b) -> ((b -> c) -> (a -> c))"),
    ("A7", "(a -> (b -> c)) -> (b -> (a -> c))"),
    ("A8", "(a -> b) /\\ (a -> c) -> (a -> b /\\ c)"),
    ("A9", "(a -> c) /\\ (b -> c) -> (a \\/ b -> c)"),
    ("A10", "a -> (b -> a * b)"),
    ("A11", "(a -> (b -> c)) -> (a * b -> c)"),
    ("A12", "1"),
    ("A13", "1 -> (a -> a)"),
    ("Abot", "a -> top"),
    ("Atop", "bot -> a"),
    ("A0", "~0"),
    ("NC", "a -> (~a -> 0)"),
    ("DN", "~~a -> a"),
    ("Con", "(a -> ~b) -> (b -> ~a)"),
    ("!w", "b -> (!a -> b)"),
    ("!i", "(!a -> (!a -> b)) -> (!a -> b)"),
    ("!K", "!(a -> b) -> (!a -> !b)"),
    ("!T", "!a -> a"),
    ("!4", "!a -> !!a"),
];

const CORE: &[&str] = &["A1", "A2", "A3", "A4", "A5", "A6", "A7", "A8", "A9", "A10", "A11", "A12", "A13"];
const BOUNDS: &[&str] = &["Abot", "Atop"];
const INVOLUTIVE: &[&str] = &["A0", "NC", "DN", "Con"];
const EXPONENTIAL: &[&str] = &["!w", "!i", "!K", "!T", "!4"];

/// Canonical scheme name for the accepted spellings.
pub fn canonical_scheme_name(name: &str) -> &str {
    match name {
        "A⊥" | "A_bot" => "Abot",
        "A⊤" | "A_top" => "Atop",
        "!W" => "!w",
        "!I" => "!i",
        "!k" => "!K",
        "!t" => "!T",
        other => other,
    }
}

pub fn scheme(name: &str) -> Option<Formula> {
    let name = canonical_scheme_name(name);
    SCHEMES.iter().find(|(n, _)| *n == name).map(|(_, t)| p(t))
}

/// One-sided matching: a substitution `σ` on the variables of `scheme` with
/// `σ(scheme) = f`.
pub fn match_axiom(f: &Formula, scheme: &Formula) -> Option<Substitution> {
    let mut sigma = Substitution::new();
    matches_into(f, scheme, &mut sigma).then_some(sigma)
}

fn matches_into(f: &Formula, s: &Formula, sigma: &mut Substitution) -> bool {
    match (s, f) {
        (Formula::Var(m), _) => match sigma.get(m) {
            Some(bound) => bound == f,
            None => {
                sigma.insert(m.clone(), f.clone());
                true
            }
        },
        (Formula::Const(c), Formula::Const(d)) => c == d,
        (Formula::Bang(s1), Formula::Bang(f1)) => matches_into(f1, s1, sigma),
        (Formula::Binary(o1, sl, sr), Formula::Binary(o2, fl, fr)) => {
            o1 == o2 && matches_into(fl, sl, sigma) && matches_into(fr, sr, sigma)
        }
        _ => false,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Rules {
    pub mp: bool,
    pub adj: bool,
    pub nec: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HilbertSystem {
    name: String,
    signature: Signature,
    axioms: Vec<(String, Formula)>,
    rules: Rules,
}

impl HilbertSystem {
    /// `RLe`, `FLe`, `FLe-bounded`, `MALL` or `LL`.
    pub fn preset(name: &str) -> Result<HilbertSystem, ProofError> {
        let (sig, groups): (Signature, Vec<&[&str]>) = match name {
            "RLe" => (Signature::EMPTY, vec![CORE]),
            "FLe" => (
                Signature {
                    zero: true,
                    ..Signature::EMPTY
                },
                vec![CORE],
            ),
            "FLe-bounded" | "bFLe" => (Signature::MALL, vec![CORE, BOUNDS]),
            "MALL" => (Signature::MALL, vec![CORE, BOUNDS, INVOLUTIVE]),
            "LL" => (Signature::FULL, vec![CORE, BOUNDS, INVOLUTIVE, EXPONENTIAL]),
            other => return Err(ProofError::UnknownSystem(other.into())),
        };
        let axioms = groups
            .concat()
            .into_iter()
            .map(|n| (n.to_string(), scheme(n).expect("known scheme")))
            .collect();
        HilbertSystem::new(
            name,
            sig,
            axioms,
            Rules {
                mp: true,
                adj: true,
                nec: sig.bang,
            },
        )
    }

    /// A system from explicit schemes; `nec` must be present exactly when an
    /// exponential scheme is.
    pub fn new(name: &str, signature: Signature, axioms: Vec<(String, Formula)>, rules: Rules) -> Result<HilbertSystem, ProofError> {
        let exponential = axioms.iter().any(|(n, _)| EXPONENTIAL.contains(&n.as_str()));
        if exponential != rules.nec {
            return Err(ProofError::Malformed(
                "nec must be present exactly when the exponential schemes are".into(),
            ));
        }
        for (n, f) in &axioms {
            if let Some(sym) = outside_signature(f, signature) {
                return Err(ProofError::Malformed(format!("scheme {n} uses `{sym}` outside the signature")));
            }
        }
        Ok(HilbertSystem {
            name: name.to_string(),
            signature,
            axioms,
            rules,
        })
    }

    /// Adds a user scheme (an axiomatic extension); its variables are
    /// metavariables, so the extension is closed under substitution.
    pub fn with_axiom(mut self, name: &str, f: Formula) -> Result<HilbertSystem, ProofError> {
        if let Some(sym) = outside_signature(&f, self.signature) {
            return Err(ProofError::Malformed(format!("scheme {name} uses `{sym}` outside the signature")));
        }
        self.axioms.push((name.to_string(), f));
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn rules(&self) -> Rules {
        self.rules
    }

    pub fn axiom(&self, name: &str) -> Option<&Formula> {
        let name = canonical_scheme_name(name);
        self.axioms.iter().find(|(n, _)| n == name).map(|(_, f)| f)
    }

    pub fn axiom_names(&self) -> impl Iterator<Item = &str> {
        self.axioms.iter().map(|(n, _)| n.as_str())
    }
}

/// First symbol of `f` missing from `sig`, if any.
fn outside_signature(f: &Formula, sig: Signature) -> Option<String> {
    for c in f.constants() {
        if !sig.has_constant(c) {
            return Some(match c {
                Constant::One => "1",
                Constant::Zero => "0",
                Constant::Bot => "bot",
                Constant::Top => "top",
            }
            .into());
        }
    }
    (f.contains_bang() && !sig.bang).then(|| "!".into())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Justification {
    /// Scheme name and, optionally, the claimed substitution.
    Axiom { name: String, substitution: Option<Substitution> },
    /// From `α` (first) and `α → β` (second), 1-based step numbers.
    Mp(usize, usize),
    /// From `α` and `β`, conclude `α ∧ β`.
    Adj(usize, usize),
    /// From `α`, conclude `!α`.
    Nec(usize),
    /// The k-th premise, 0-based.
    Premise(usize),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub formula: Formula,
    pub justification: Justification,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Derivation {
    pub steps: Vec<Step>,
}

/// Why a step is rejected.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Reason {
    OutsideSignature { symbol: String },
    UnknownAxiom { name: String },
    NoMatchingSubstitution,
    SubstitutionMismatch,
    RuleNotInSystem { rule: String },
    BadReference { index: usize },
    MpMismatch,
    AdjMismatch,
    NecMismatch,
    PremiseOutOfRange { index: usize },
    PremiseMismatch,
}

impl Reason {
    pub fn kind(&self) -> &'static str {
        match self {
            Reason::OutsideSignature { .. } => "outside-signature",
            Reason::UnknownAxiom { .. } => "unknown-axiom",
            Reason::NoMatchingSubstitution => "no-matching-substitution",
            Reason::SubstitutionMismatch => "substitution-mismatch",
            Reason::RuleNotInSystem { .. } => "rule-not-in-system",
            Reason::BadReference { .. } => "bad-reference",
            Reason::MpMismatch => "mp-mismatch",
            Reason::AdjMismatch => "adj-mismatch",
            Reason::NecMismatch => "nec-mismatch",
            Reason::PremiseOutOfRange { .. } => "premise-out-of-range",
            Reason::PremiseMismatch => "premise-mismatch",
        }
    }
}

impl fmt::Display for Reason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reason::OutsideSignature { symbol } => write!(f, "`{symbol}` is outside the system's signature"),
            Reason::UnknownAxiom { name } => write!(f, "no axiom scheme `{name}` in the system"),
            Reason::NoMatchingSubstitution => f.write_str("no matching substitution"),
            Reason::SubstitutionMismatch => f.write_str("the given substitution does not produce the formula"),
            Reason::RuleNotInSystem { rule } => write!(f, "rule {rule} is not in the system"),
            Reason::BadReference { index } => write!(f, "reference {index} is not an earlier step"),
            Reason::MpMismatch => f.write_str("mp: second reference is not first -> formula"),
            Reason::AdjMismatch => f.write_str("adj: formula is not the conjunction of the references"),
            Reason::NecMismatch => f.write_str("nec: formula is not ! of the reference"),
            Reason::PremiseOutOfRange { index } => write!(f, "premise {index} does not exist"),
            Reason::PremiseMismatch => f.write_str("formula differs from the premise"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DerivationReport {
    pub valid: bool,
    /// 1-based.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub step: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<Reason>,
}

pub fn check_derivation(d: &Derivation, sys: &HilbertSystem, premises: &[Formula]) -> DerivationReport {
    for (i, step) in d.steps.iter().enumerate() {
        if let Err(reason) = check_step(d, i, step, sys, premises) {
            return DerivationReport {
                valid: false,
                step: Some(i + 1),
                reason: Some(reason),
            };
        }
    }
    DerivationReport {
        valid: true,
        step: None,
        reason: None,
    }
}

fn check_step(d: &Derivation, i: usize, step: &Step, sys: &HilbertSystem, premises: &[Formula]) -> Result<(), Reason> {
    if let Some(symbol) = outside_signature(&step.formula, sys.signature()) {
        return Err(Reason::OutsideSignature { symbol });
    }
    let earlier = |k: usize| -> Result<&Formula, Reason> {
        if k == 0 || k > i {
            return Err(Reason::BadReference { index: k });
        }
        Ok(&d.steps[k - 1].formula)
    };
    let rules = sys.rules();
    match &step.justification {
        Justification::Axiom { name, substitution } => {
            let s = sys.axiom(name).ok_or_else(|| Reason::UnknownAxiom { name: name.clone() })?;
            match substitution {
                Some(sigma) => {
                    if s.substitute(sigma) != step.formula {
                        return Err(Reason::SubstitutionMismatch);
                    }
                }
                None => {
                    match_axiom(&step.formula, s).ok_or(Reason::NoMatchingSubstitution)?;
                }
            }
        }
        Justification::Mp(a, b) => {
            if !rules.mp {
                return Err(Reason::RuleNotInSystem { rule: "mp".into() });
            }
            let (fa, fb) = (earlier(*a)?, earlier(*b)?);
            if fb != &Formula::imp(fa.clone(), step.formula.clone()) {
                return Err(Reason::MpMismatch);
            }
        }
        Justification::Adj(a, b) => {
            if !rules.adj {
                return Err(Reason::RuleNotInSystem { rule: "adj".into() });
            }
            let (fa, fb) = (earlier(*a)?, earlier(*b)?);
            if step.formula != Formula::meet(fa.clone(), fb.clone()) {
                return Err(Reason::AdjMismatch);
            }
        }
        Justification::Nec(a) => {
            if !rules.nec {
                return Err(Reason::RuleNotInSystem { rule: "nec".into() });
            }
            if step.formula != Formula::bang(earlier(*a)?.clone()) {
                return Err(Reason::NecMismatch);
            }
        }
        Justification::Premise(k) => {
            let f = premises.get(*k).ok_or(Reason::PremiseOutOfRange { index: *k })?;
            if f != &step.formula {
                return Err(Reason::PremiseMismatch);
            }
        }
    }
    Ok(())
}

/// One step of the JSON derivation format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepJson {
    pub formula: String,
    pub rule: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub refs: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub premise: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub substitution: Option<BTreeMap<String, String>>,
}

impl Derivation {
    pub fn from_json_steps(steps: &[StepJson], notation: Notation) -> Result<Derivation, ProofError> {
        let mut out = Vec::with_capacity(steps.len());
        for (i, s) in steps.iter().enumerate() {
            let formula = Formula::parse(&s.formula, notation)?;
            let refs = |n: usize| -> Result<Vec<usize>, ProofError> {
                if s.refs.len() != n {
                    return Err(ProofError::Malformed(format!(
                        "step {}: rule {} takes {n} references",
                        i + 1,
                        s.rule
                    )));
                }
                Ok(s.refs.clone())
            };
            let justification = match s.rule.as_str() {
                "mp" => {
                    let r = refs(2)?;
                    Justification::Mp(r[0], r[1])
                }
                "adj" => {
                    let r = refs(2)?;
                    Justification::Adj(r[0], r[1])
                }
                "nec" => Justification::Nec(refs(1)?[0]),
                "premise" => Justification::Premise(
                    s.premise
                        .ok_or_else(|| ProofError::Malformed(format!("step {}: premise index missing", i + 1)))?,
                ),
                name => Justification::Axiom {
                    name: canonical_scheme_name(name).to_string(),
                    substitution: s
                        .substitution
                        .as_ref()
                        .map(|m| {
                            m.iter()
                                .map(|(k, v)| Ok((k.clone(), Formula::parse(v, notation)?)))
                                .collect::<Result<Substitution, ProofError>>()
                        })
                        .transpose()?,
                },
            };
            out.push(Step { formula, justification });
        }
        Ok(Derivation { steps: out })
    }

    pub fn from_json(text: &str, notation: Notation) -> Result<Derivation, ProofError> {
        let steps: Vec<StepJson> = serde_json::from_str(text).map_err(|e| ProofError::Malformed(e.to_string()))?;
        Derivation::from_json_steps(&steps, notation)
    }

    pub fn to_json_steps(&self) -> Vec<StepJson> {
        self.steps
            .iter()
            .map(|s| {
                let formula = s.formula.to_string();
                let base = |rule: &str, refs: Vec<usize>| StepJson {
                    formula: formula.clone(),
                    rule: rule.into(),
                    refs,
                    premise: None,
                    substitution: None,
                };
                match &s.justification {
                    Justification::Axiom { name, substitution } => StepJson {
                        substitution: substitution
                            .as_ref()
                            .map(|m| m.iter().map(|(k, v)| (k.clone(), v.to_string())).collect()),
                        ..base(name, vec![])
                    },
                    Justification::Mp(a, b) => base("mp", vec![*a, *b]),
                    Justification::Adj(a, b) => base("adj", vec![*a, *b]),
                    Justification::Nec(a) => base("nec", vec![*a]),
                    Justification::Premise(k) => StepJson {
                        premise: Some(*k),
                        ..base("premise", vec![])
                    },
                }
            })
            .collect()
    }

    pub fn conclusion(&self) -> Option<&Formula> {
        self.steps.last().map(|s| &s.formula)
    }
}

/// `Γ ⇒ Π` with `Π` empty or a single formula.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Sequent {
    pub antecedent: Vec<Formula>,
    pub succedent: Option<Formula>,
}

impl Sequent {
    pub fn new(antecedent: Vec<Formula>, succedent: Option<Formula>) -> Sequent {
        Sequent { antecedent, succedent }
    }

    /// Parses `"x, x -> y => y"`; either side may be empty.
    pub fn parse(text: &str, notation: Notation) -> Result<Sequent, ProofError> {
        let (lhs, rhs) = text
            .split_once("=>")
            .ok_or_else(|| ProofError::Malformed("a sequent needs `=>`".into()))?;
        if rhs.contains("=>") {
            return Err(ProofError::Malformed("more than one `=>`".into()));
        }
        let mut antecedent = Vec::new();
        let mut depth = 0i32;
        let mut start = 0;
        let bytes: Vec<char> = lhs.chars().collect();
        let mut parts = Vec::new();
        for (i, &ch) in bytes.iter().enumerate() {
            match ch {
                '(' => depth += 1,
                ')' => depth -= 1,
                ',' if depth == 0 => {
                    parts.push(bytes[start..i].iter().collect::<String>());
                    start = i + 1;
                }
                _ => {}
            }
        }
        parts.push(bytes[start..].iter().collect::<String>());
        if !(parts.len() == 1 && parts[0].trim().is_empty()) {
            for part in parts {
                antecedent.push(Formula::parse(&part, notation)?);
            }
        }
        let succedent = if rhs.trim().is_empty() {
            None
        } else {
            Some(Formula::parse(rhs, notation)?)
        };
        Ok(Sequent { antecedent, succedent })
    }

    pub fn size(&self) -> usize {
        self.antecedent.iter().map(Formula::size).sum::<usize>() + self.succedent.as_ref().map_or(0, Formula::size)
    }

    pub fn free_variables(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        for f in self.antecedent.iter().chain(self.succedent.iter()) {
            out.extend(f.free_variables());
        }
        out
    }

    /// `γ1·…·γk → π`, with `1` for an empty antecedent and `0` for an empty
    /// succedent.
    pub fn as_formula(&self) -> Formula {
        let lhs = self
            .antecedent
            .iter()
            .cloned()
            .reduce(Formula::mul)
            .unwrap_or_else(Formula::one);
        let rhs = self.succedent.clone().unwrap_or_else(Formula::zero);
        Formula::imp(lhs, rhs)
    }

    fn check_fragment(&self) -> Result<(), ProofError> {
        for f in self.antecedent.iter().chain(self.succedent.iter()) {
            if f.contains_bang() {
                return Err(ProofError::Fragment("!".into()));
            }
            for c in f.constants() {
                if matches!(c, Constant::Bot | Constant::Top) {
                    return Err(ProofError::Fragment(if c == Constant::Bot { "bot" } else { "top" }.into()));
                }
            }
        }
        Ok(())
    }

    fn key(&self, exchange: bool) -> (Vec<Formula>, Option<Formula>) {
        let mut ant = self.antecedent.clone();
        if exchange {
            ant.sort();
        }
        (ant, self.succedent.clone())
    }
}

impl fmt::Display for Sequent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let ant: Vec<String> = self.antecedent.iter().map(|a| a.to_string()).collect();
        write!(f, "{}", ant.join(", "))?;
        if !ant.is_empty() {
            f.write_str(" ")?;
        }
        f.write_str("=>")?;
        if let Some(s) = &self.succedent {
            write!(f, " {s}")?;
        }
        Ok(())
    }
}

impl Serialize for Sequent {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SequentRule {
    Id,
    OneR,
    OneL,
    MulL,
    MulR,
    ImpL,
    ImpR,
    ZeroL,
    ZeroR,
    JoinL,
    JoinR1,
    JoinR2,
    MeetL1,
    MeetL2,
    MeetR,
}

impl SequentRule {
    pub fn name(self) -> &'static str {
        match self {
            SequentRule::Id => "id",
            SequentRule::OneR => "1r",
            SequentRule::OneL => "1l",
            SequentRule::MulL => "*l",
            SequentRule::MulR => "*r",
            SequentRule::ImpL => "->l",
            SequentRule::ImpR => "->r",
            SequentRule::ZeroL => "0l",
            SequentRule::ZeroR => "0r",
            SequentRule::JoinL => "or-l",
            SequentRule::JoinR1 => "or-r1",
            SequentRule::JoinR2 => "or-r2",
            SequentRule::MeetL1 => "and-l1",
            SequentRule::MeetL2 => "and-l2",
            SequentRule::MeetR => "and-r",
        }
    }
}

impl Serialize for SequentRule {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

/// A cut-free proof tree. Left rules record the antecedent position of their
/// principal formula.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SequentProof {
    pub sequent: Sequent,
    pub rule: SequentRule,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub principal: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<SequentProof>,
}

impl SequentProof {
    pub fn height(&self) -> usize {
        1 + self.premises.iter().map(SequentProof::height).max().unwrap_or(0)
    }

    pub fn node_count(&self) -> usize {
        1 + self.premises.iter().map(SequentProof::node_count).sum::<usize>()
    }
}

fn remove_one(v: &mut Vec<Formula>, f: &Formula) -> bool {
    match v.iter().position(|g| g == f) {
        Some(i) => {
            v.remove(i);
            true
        }
        None => false,
    }
}

fn same_multiset(a: &[Formula], b: &[Formula]) -> bool {
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort();
    y.sort();
    x == y
}

fn split_binary(f: &Formula, op: BinOp) -> Option<(&Formula, &Formula)> {
    match f {
        Formula::Binary(o, l, r) if *o == op => Some((l, r)),
        _ => None,
    }
}

/// Sub-multisets of `items` as (chosen, rest), without duplicates.
fn splits(items: &[Formula]) -> Vec<(Vec<Formula>, Vec<Formula>)> {
    let n = items.len();
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        for (i, f) in items.iter().enumerate() {
            if mask & (1 << i) != 0 {
                a.push(f.clone());
            } else {
                b.push(f.clone());
            }
        }
        let mut key = a.clone();
        key.sort();
        if seen.insert(key) {
            out.push((a, b));
        }
    }
    out
}

struct Search {
    exchange: bool,
    memo: HashMap<(Vec<Formula>, Option<Formula>), Memo>,
}

#[derive(Default)]
struct Memo {
    proof: Option<SequentProof>,
    failed_with: usize,
}

impl Search {
    fn prove(&mut self, s: &Sequent, budget: usize) -> Option<SequentProof> {
        if budget == 0 {
            return None;
        }
        let key = s.key(self.exchange);
        if let Some(m) = self.memo.get(&key) {
            if let Some(p) = &m.proof {
                if p.height() <= budget {
                    return Some(self.reorder(p, s));
                }
            }
            if m.failed_with >= budget {
                return None;
            }
        }
        let found = self.expand(s, budget);
        let entry = self.memo.entry(key).or_default();
        match &found {
            Some(p) => {
                if entry.proof.as_ref().is_none_or(|q| p.height() < q.height()) {
                    entry.proof = Some(p.clone());
                }
            }
            None => entry.failed_with = entry.failed_with.max(budget),
        }
        found
    }

    /// A memoized proof of a permuted antecedent, rewritten for `s`.
    fn reorder(&self, p: &SequentProof, s: &Sequent) -> SequentProof {
        if p.sequent == *s {
            return p.clone();
        }
        let mut q = p.clone();
        if let Some(i) = p.principal {
            let f = &p.sequent.antecedent[i];
            q.principal = s.antecedent.iter().position(|g| g == f);
        }
        q.sequent = s.clone();
        q
    }

    fn leaf(s: &Sequent, rule: SequentRule) -> SequentProof {
        SequentProof {
            sequent: s.clone(),
            rule,
            principal: None,
            premises: vec![],
        }
    }

    fn node(s: &Sequent, rule: SequentRule, principal: Option<usize>, premises: Vec<SequentProof>) -> SequentProof {
        SequentProof {
            sequent: s.clone(),
            rule,
            principal,
            premises,
        }
    }

    fn expand(&mut self, s: &Sequent, budget: usize) -> Option<SequentProof> {
        let ant = &s.antecedent;
        let b = budget - 1;
        // Axioms.
        match (&ant[..], &s.succedent) {
            ([a], Some(c)) if a == c => return Some(Self::leaf(s, SequentRule::Id)),
            ([], Some(Formula::Const(Constant::One))) => return Some(Self::leaf(s, SequentRule::OneR)),
            ([Formula::Const(Constant::Zero)], None) => return Some(Self::leaf(s, SequentRule::ZeroR)),
            _ => {}
        }
        // Left rules with a single premise first.
        for i in 0..ant.len() {
            if self.exchange && i > 0 && ant[..i].contains(&ant[i]) {
                continue;
            }
            let rest = |replacement: &[Formula]| {
                let mut v = ant[..i].to_vec();
                v.extend_from_slice(replacement);
                v.extend_from_slice(&ant[i + 1..]);
                Sequent::new(v, s.succedent.clone())
            };
            match &ant[i] {
                Formula::Const(Constant::One) => {
                    if let Some(q) = self.prove(&rest(&[]), b) {
                        return Some(Self::node(s, SequentRule::OneL, Some(i), vec![q]));
                    }
                }
                Formula::Binary(BinOp::Mul, l, r) => {
                    if let Some(q) = self.prove(&rest(&[(**l).clone(), (**r).clone()]), b) {
                        return Some(Self::node(s, SequentRule::MulL, Some(i), vec![q]));
                    }
                }
                Formula::Binary(BinOp::Join, l, r) => {
                    if let Some(q1) = self.prove(&rest(&[(**l).clone()]), b) {
                        if let Some(q2) = self.prove(&rest(&[(**r).clone()]), b) {
                            return Some(Self::node(s, SequentRule::JoinL, Some(i), vec![q1, q2]));
                        }
                    }
                }
                _ => {}
            }
        }
        // Right rules.
        if let Some(c) = &s.succedent {
            match c {
                Formula::Binary(BinOp::Imp, l, r) => {
                    let mut v = vec![(**l).clone()];
                    v.extend_from_slice(ant);
                    if let Some(q) = self.prove(&Sequent::new(v, Some((**r).clone())), b) {
                        return Some(Self::node(s, SequentRule::ImpR, None, vec![q]));
                    }
                }
                Formula::Binary(BinOp::Meet, l, r) => {
                    if let Some(q1) = self.prove(&Sequent::new(ant.clone(), Some((**l).clone())), b) {
                        if let Some(q2) = self.prove(&Sequent::new(ant.clone(), Some((**r).clone())), b) {
                            return Some(Self::node(s, SequentRule::MeetR, None, vec![q1, q2]));
                        }
                    }
                }
                Formula::Binary(BinOp::Join, l, r) => {
                    if let Some(q) = self.prove(&Sequent::new(ant.clone(), Some((**l).clone())), b) {
                        return Some(Self::node(s, SequentRule::JoinR1, None, vec![q]));
                    }
                    if let Some(q) = self.prove(&Sequent::new(ant.clone(), Some((**r).clone())), b) {
                        return Some(Self::node(s, SequentRule::JoinR2, None, vec![q]));
                    }
                }
                Formula::Binary(BinOp::Mul, l, r) => {
                    let parts: Vec<(Vec<Formula>, Vec<Formula>)> = if self.exchange {
                        splits(ant)
                    } else {
                        (0..=ant.len()).map(|k| (ant[..k].to_vec(), ant[k..].to_vec())).collect()
                    };
                    for (g1, g2) in parts {
                        if let Some(q1) = self.prove(&Sequent::new(g1, Some((**l).clone())), b) {
                            if let Some(q2) = self.prove(&Sequent::new(g2, Some((**r).clone())), b) {
                                return Some(Self::node(s, SequentRule::MulR, None, vec![q1, q2]));
                            }
                        }
                    }
                }
                Formula::Const(Constant::Zero) => {
                    if let Some(q) = self.prove(&Sequent::new(ant.clone(), None), b) {
                        return Some(Self::node(s, SequentRule::ZeroL, None, vec![q]));
                    }
                }
                _ => {}
            }
        }
        // Left rules that choose a branch or a split.
        for i in 0..ant.len() {
            if self.exchange && i > 0 && ant[..i].contains(&ant[i]) {
                continue;
            }
            let rest = |replacement: &[Formula]| {
                let mut v = ant[..i].to_vec();
                v.extend_from_slice(replacement);
                v.extend_from_slice(&ant[i + 1..]);
                Sequent::new(v, s.succedent.clone())
            };
            match &ant[i] {
                Formula::Binary(BinOp::Meet, l, r) => {
                    if let Some(q) = self.prove(&rest(&[(**l).clone()]), b) {
                        return Some(Self::node(s, SequentRule::MeetL1, Some(i), vec![q]));
                    }
                    if let Some(q) = self.prove(&rest(&[(**r).clone()]), b) {
                        return Some(Self::node(s, SequentRule::MeetL2, Some(i), vec![q]));
                    }
                }
                Formula::Binary(BinOp::Imp, l, r) => {
                    let beta = (**r).clone();
                    if self.exchange {
                        let mut others = ant.clone();
                        others.remove(i);
                        for (sigma, mut gamma) in splits(&others) {
                            if let Some(q1) = self.prove(&Sequent::new(sigma, Some((**l).clone())), b) {
                                gamma.push(beta.clone());
                                if let Some(q2) = self.prove(&Sequent::new(gamma, s.succedent.clone()), b) {
                                    return Some(Self::node(s, SequentRule::ImpL, Some(i), vec![q1, q2]));
                                }
                            }
                        }
                    } else {
                        // Γ, Σ, α\β, Δ with Σ immediately left of the principal formula.
                        for k in 0..=i {
                            let sigma = ant[k..i].to_vec();
                            if let Some(q1) = self.prove(&Sequent::new(sigma, Some((**l).clone())), b) {
                                let mut v = ant[..k].to_vec();
                                v.push(beta.clone());
                                v.extend_from_slice(&ant[i + 1..]);
                                if let Some(q2) = self.prove(&Sequent::new(v, s.succedent.clone()), b) {
                                    return Some(Self::node(s, SequentRule::ImpL, Some(i), vec![q1, q2]));
                                }
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        None
    }
}

/// Backward cut-free search for a proof of height at most `bound`.
///
/// Every rule strictly shrinks the sequent, so a bound of at least
/// [`Sequent::size`] makes the search complete; below that, `None` means
/// "unknown".
pub fn prove_sequent(s: &Sequent, bound: usize, with_exchange: bool) -> Result<Option<SequentProof>, ProofError> {
    s.check_fragment()?;
    let mut search = Search {
        exchange: with_exchange,
        memo: HashMap::new(),
    };
    Ok(search.prove(s, bound))
}

/// Checks that every node is an instance of its rule.
pub fn validate_proof(p: &SequentProof, with_exchange: bool) -> Result<(), ProofError> {
    fn go(p: &SequentProof, ex: bool, path: &mut Vec<usize>) -> Result<(), ProofError> {
        if let Err(reason) = check_node(p, ex) {
            return Err(ProofError::InvalidNode {
                path: path.clone(),
                reason,
            });
        }
        for (i, q) in p.premises.iter().enumerate() {
            path.push(i);
            go(q, ex, path)?;
            path.pop();
        }
        Ok(())
    }
    go(p, with_exchange, &mut Vec::new())
}

fn check_node(p: &SequentProof, ex: bool) -> Result<(), String> {
    use SequentRule as R;
    let s = &p.sequent;
    let ant = &s.antecedent;
    let kids: Vec<&Sequent> = p.premises.iter().map(|q| &q.sequent).collect();
    let arity = match p.rule {
        R::Id | R::OneR | R::ZeroR => 0,
        R::MulR | R::ImpL | R::JoinL | R::MeetR => 2,
        _ => 1,
    };
    if kids.len() != arity {
        return Err(format!("{} takes {arity} premises", p.rule.name()));
    }
    let eq_ant = |a: &[Formula], b: &[Formula]| if ex { same_multiset(a, b) } else { a == b };
    let principal = || -> Result<(usize, &Formula), String> {
        let i = p.principal.ok_or("left rule without principal formula")?;
        ant.get(i).map(|f| (i, f)).ok_or_else(|| "principal out of range".to_string())
    };
    let replaced = |i: usize, with: &[Formula]| {
        let mut v = ant[..i].to_vec();
        v.extend_from_slice(with);
        v.extend_from_slice(&ant[i + 1..]);
        v
    };
    let same_succ = |k: &Sequent| k.succedent == s.succedent;
    let ok = match p.rule {
        R::Id => ant.len() == 1 && s.succedent.as_ref() == Some(&ant[0]),
        R::OneR => ant.is_empty() && s.succedent == Some(Formula::one()),
        R::ZeroR => ant.len() == 1 && ant[0] == Formula::zero() && s.succedent.is_none(),
        R::ZeroL => s.succedent == Some(Formula::zero()) && kids[0].succedent.is_none() && eq_ant(&kids[0].antecedent, ant),
        R::OneL => {
            let (i, f) = principal()?;
            *f == Formula::one() && same_succ(kids[0]) && eq_ant(&kids[0].antecedent, &replaced(i, &[]))
        }
        R::MulL => {
            let (i, f) = principal()?;
            let (l, r) = split_binary(f, BinOp::Mul).ok_or("principal is not a product")?;
            same_succ(kids[0]) && eq_ant(&kids[0].antecedent, &replaced(i, &[l.clone(), r.clone()]))
        }
        R::MeetL1 | R::MeetL2 => {
            let (i, f) = principal()?;
            let (l, r) = split_binary(f, BinOp::Meet).ok_or("principal is not a meet")?;
            let pick = if p.rule == R::MeetL1 { l } else { r };
            same_succ(kids[0]) && eq_ant(&kids[0].antecedent, &replaced(i, std::slice::from_ref(pick)))
        }
        R::JoinL => {
            let (i, f) = principal()?;
            let (l, r) = split_binary(f, BinOp::Join).ok_or("principal is not a join")?;
            same_succ(kids[0])
                && same_succ(kids[1])
                && eq_ant(&kids[0].antecedent, &replaced(i, std::slice::from_ref(l)))
                && eq_ant(&kids[1].antecedent, &replaced(i, std::slice::from_ref(r)))
        }
        R::ImpL => {
            let (i, f) = principal()?;
            let (l, r) = split_binary(f, BinOp::Imp).ok_or("principal is not an implication")?;
            let (k1, k2) = (kids[0], kids[1]);
            if k1.succedent.as_ref() != Some(l) || !same_succ(k2) {
                false
            } else if ex {
                let mut rest = k2.antecedent.clone();
                if !remove_one(&mut rest, r) {
                    return Err("right premise lacks the consequent".into());
                }
                let mut all = rest;
                all.extend(k1.antecedent.iter().cloned());
                all.push(f.clone());
                same_multiset(&all, ant)
            } else {
                let n = k1.antecedent.len();
                n <= i && ant[i - n..i] == k1.antecedent[..] && {
                    let mut v = ant[..i - n].to_vec();
                    v.push(r.clone());
                    v.extend_from_slice(&ant[i + 1..]);
                    v == k2.antecedent
                }
            }
        }
        R::ImpR => {
            let c = s.succedent.as_ref().ok_or("->r needs a succedent")?;
            let (l, r) = split_binary(c, BinOp::Imp).ok_or("succedent is not an implication")?;
            let mut v = vec![l.clone()];
            v.extend_from_slice(ant);
            kids[0].succedent.as_ref() == Some(r) && eq_ant(&kids[0].antecedent, &v)
        }
        R::MulR => {
            let c = s.succedent.as_ref().ok_or("*r needs a succedent")?;
            let (l, r) = split_binary(c, BinOp::Mul).ok_or("succedent is not a product")?;
            let mut v = kids[0].antecedent.clone();
            v.extend(kids[1].antecedent.iter().cloned());
            kids[0].succedent.as_ref() == Some(l) && kids[1].succedent.as_ref() == Some(r) && eq_ant(&v, ant)
        }
        R::MeetR => {
            let c = s.succedent.as_ref().ok_or("and-r needs a succedent")?;
            let (l, r) = split_binary(c, BinOp::Meet).ok_or("succedent is not a meet")?;
            kids[0].succedent.as_ref() == Some(l)
                && kids[1].succedent.as_ref() == Some(r)
                && eq_ant(&kids[0].antecedent, ant)
                && eq_ant(&kids[1].antecedent, ant)
        }
        R::JoinR1 | R::JoinR2 => {
            let c = s.succedent.as_ref().ok_or("or-r needs a succedent")?;
            let (l, r) = split_binary(c, BinOp::Join).ok_or("succedent is not a join")?;
            let pick = if p.rule == R::JoinR1 { l } else { r };
            kids[0].succedent.as_ref() == Some(pick) && eq_ant(&kids[0].antecedent, ant)
        }
    };
    if ok {
        Ok(())
    } else {
        Err(format!("not an instance of {}", p.rule.name()))
    }
}

/// Algebras used to read sequents semantically: `R^{0}(G)` for small `G` and
/// the Łukasiewicz chains with two to four elements.
pub fn sequent_catalog() -> Vec<FiniteAlgebra> {
    let limits = Limits::default();
    let zero = Signature {
        zero: true,
        ..Signature::EMPTY
    };
    let mut out: Vec<FiniteAlgebra> = [&[][..], &[2], &[3], &[4], &[2, 2], &[5]]
        .iter()
        .map(|f| {
            build_r(&make_group(f, &limits).expect("small group"), zero, &limits)
                .expect("small algebra")
                .into_algebra()
        })
        .collect();
    for n in 2..=4 {
        out.push(lukasiewicz_chain(n).reduct(zero).expect("has zero"));
    }
    out
}

/// Semantic reading of a sequent over a list of algebras.
pub fn sequent_valid(s: &Sequent, algebras: &[FiniteAlgebra]) -> Result<Verdict, ProofError> {
    Ok(consequence(algebras, &[], &s.as_formula())?)
}

/// First countermodel to a sequent in the list, if any.
pub fn sequent_countermodel(s: &Sequent, algebras: &[FiniteAlgebra]) -> Result<Option<Countermodel>, ProofError> {
    Ok(sequent_valid(s, algebras)?.countermodel().cloned())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CraigInterpolant {
    pub delta: Formula,
    /// `L ⇒ δ`
    pub left: Sequent,
    /// `δ, R ⇒ Π`
    pub right: Sequent,
    pub shared: BTreeSet<String>,
    pub left_proof: SequentProof,
    pub right_proof: SequentProof,
}

/// Maehara-style interpolant for the split `L; R ⇒ Π` of the end sequent,
/// with `L` the antecedent positions in `left`. The succedent belongs to the
/// right part.
pub fn extract_craig(proof: &SequentProof, left: &[usize]) -> Result<CraigInterpolant, ProofError> {
    validate_proof(proof, true)?;
    let end = &proof.sequent;
    end.check_fragment()?;
    let mut l = Vec::new();
    let mut r = Vec::new();
    let picked: BTreeSet<usize> = left.iter().copied().collect();
    if picked.len() != left.len() {
        return Err(ProofError::Partition("repeated antecedent position".into()));
    }
    if let Some(&bad) = picked.iter().find(|&&i| i >= end.antecedent.len()) {
        return Err(ProofError::Partition(format!("position {bad} is not in the antecedent")));
    }
    for (i, f) in end.antecedent.iter().enumerate() {
        if picked.contains(&i) {
            l.push(f.clone());
        } else {
            r.push(f.clone());
        }
    }
    let delta = craig(proof, l.clone(), r.clone())?;
    let mut shared = BTreeSet::new();
    for f in &l {
        shared.extend(f.free_variables());
    }
    let right_vars = Sequent::new(r.clone(), end.succedent.clone()).free_variables();
    shared.retain(|v| right_vars.contains(v));
    if !delta.free_variables().is_subset(&shared) {
        return Err(ProofError::Verification(format!("{delta} uses variables outside {shared:?}")));
    }
    let left_seq = Sequent::new(l, Some(delta.clone()));
    let mut rv = vec![delta.clone()];
    rv.extend(r);
    let right_seq = Sequent::new(rv, end.succedent.clone());
    let catalog = sequent_catalog();
    let mut proofs = Vec::new();
    for s in [&left_seq, &right_seq] {
        let q = prove_sequent(s, s.size().max(1), true)?
            .ok_or_else(|| ProofError::Verification(format!("{s} is not provable")))?;
        validate_proof(&q, true)?;
        if let Verdict::Fails(c) = sequent_valid(s, &catalog)? {
            return Err(ProofError::Verification(format!("{s} fails semantically at {:?}", c.assignment)));
        }
        proofs.push(q);
    }
    let right_proof = proofs.pop().expect("two proofs");
    let left_proof = proofs.pop().expect("two proofs");
    Ok(CraigInterpolant {
        delta,
        left: left_seq,
        right: right_seq,
        shared,
        left_proof,
        right_proof,
    })
}

fn mul_simplified(a: Formula, b: Formula) -> Formula {
    match (&a, &b) {
        (Formula::Const(Constant::One), _) => b,
        (_, Formula::Const(Constant::One)) => a,
        _ => Formula::mul(a, b),
    }
}

/// Distributes the context of `node` (split as `l`, `r`) over a premise
/// antecedent; `active` are the premise's new formulas, which go to the side
/// given by `active_left`.
fn take(pool_l: &mut Vec<Formula>, pool_r: &mut Vec<Formula>, items: &[Formula]) -> Result<(Vec<Formula>, Vec<Formula>), ProofError> {
    let (mut l, mut r) = (Vec::new(), Vec::new());
    for f in items {
        if remove_one(pool_l, f) {
            l.push(f.clone());
        } else if remove_one(pool_r, f) {
            r.push(f.clone());
        } else {
            return Err(ProofError::Partition(format!("{f} is not in the context")));
        }
    }
    Ok((l, r))
}

fn craig(node: &SequentProof, mut l: Vec<Formula>, mut r: Vec<Formula>) -> Result<Formula, ProofError> {
    use SequentRule as R;
    let s = &node.sequent;
    match node.rule {
        R::Id => Ok(if l.len() == 1 { l[0].clone() } else { Formula::one() }),
        R::OneR => Ok(Formula::one()),
        R::ZeroR => Ok(if l.len() == 1 { Formula::zero() } else { Formula::one() }),
        R::ZeroL | R::JoinR1 | R::JoinR2 => craig(&node.premises[0], l, r),
        R::MeetR => {
            let d1 = craig(&node.premises[0], l.clone(), r.clone())?;
            let d2 = craig(&node.premises[1], l, r)?;
            Ok(Formula::meet(d1, d2))
        }
        R::ImpR => {
            let (a, _) = split_binary(s.succedent.as_ref().expect("checked"), BinOp::Imp).expect("checked");
            r.push(a.clone());
            craig(&node.premises[0], l, r)
        }
        R::MulR => {
            let (mut pl, mut pr) = (l, r);
            let (l1, r1) = take(&mut pl, &mut pr, &node.premises[0].sequent.antecedent)?;
            let (l2, r2) = take(&mut pl, &mut pr, &node.premises[1].sequent.antecedent)?;
            let d1 = craig(&node.premises[0], l1, r1)?;
            let d2 = craig(&node.premises[1], l2, r2)?;
            Ok(mul_simplified(d1, d2))
        }
        R::OneL | R::MulL | R::MeetL1 | R::MeetL2 | R::JoinL | R::ImpL => {
            let f = s.antecedent[node.principal.expect("checked")].clone();
            let in_left = remove_one(&mut l, &f);
            if !in_left && !remove_one(&mut r, &f) {
                return Err(ProofError::Partition(format!("{f} is not in the antecedent")));
            }
            // Context after removing the principal formula, then the active
            // formulas of each premise placed on the principal's side.
            let place = |kid: &Sequent, active: &[Formula], l: &[Formula], r: &[Formula]| -> Result<(Vec<Formula>, Vec<Formula>), ProofError> {
                let mut rest = kid.antecedent.clone();
                for a in active {
                    if !remove_one(&mut rest, a) {
                        return Err(ProofError::Partition(format!("{a} missing from premise")));
                    }
                }
                let (mut pl, mut pr) = (l.to_vec(), r.to_vec());
                let (mut kl, mut kr) = take(&mut pl, &mut pr, &rest)?;
                if in_left {
                    kl.extend_from_slice(active);
                } else {
                    kr.extend_from_slice(active);
                }
                Ok((kl, kr))
            };
            match node.rule {
                R::OneL => {
                    let (kl, kr) = place(&node.premises[0].sequent, &[], &l, &r)?;
                    craig(&node.premises[0], kl, kr)
                }
                R::MulL => {
                    let (a, b) = split_binary(&f, BinOp::Mul).expect("checked");
                    let (kl, kr) = place(&node.premises[0].sequent, &[a.clone(), b.clone()], &l, &r)?;
                    craig(&node.premises[0], kl, kr)
                }
                R::MeetL1 | R::MeetL2 => {
                    let (a, b) = split_binary(&f, BinOp::Meet).expect("checked");
                    let pick = if node.rule == R::MeetL1 { a } else { b };
                    let (kl, kr) = place(&node.premises[0].sequent, std::slice::from_ref(pick), &l, &r)?;
                    craig(&node.premises[0], kl, kr)
                }
                R::JoinL => {
                    let (a, b) = split_binary(&f, BinOp::Join).expect("checked");
                    let (l1, r1) = place(&node.premises[0].sequent, std::slice::from_ref(a), &l, &r)?;
                    let (l2, r2) = place(&node.premises[1].sequent, std::slice::from_ref(b), &l, &r)?;
                    let d1 = craig(&node.premises[0], l1, r1)?;
                    let d2 = craig(&node.premises[1], l2, r2)?;
                    Ok(if in_left { Formula::join(d1, d2) } else { Formula::meet(d1, d2) })
                }
                R::ImpL => {
                    let (_, b) = split_binary(&f, BinOp::Imp).expect("checked");
                    let (mut pl, mut pr) = (l, r);
                    let (sl, sr) = take(&mut pl, &mut pr, &node.premises[0].sequent.antecedent)?;
                    let (kl, kr) = place(&node.premises[1].sequent, std::slice::from_ref(b), &pl, &pr)?;
                    if in_left {
                        // The left premise is split the other way round.
                        let d1 = craig(&node.premises[0], sr, sl)?;
                        let d2 = craig(&node.premises[1], kl, kr)?;
                        Ok(Formula::imp(d1, d2))
                    } else {
                        let d1 = craig(&node.premises[0], sl, sr)?;
                        let d2 = craig(&node.premises[1], kl, kr)?;
                        Ok(mul_simplified(d1, d2))
                    }
                }
                _ => unreachable!(),
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::semantics::valid;

    fn f(s: &str) -> Formula {
        Formula::parse(s, Notation::Substructural).unwrap()
    }

    fn seq(s: &str) -> Sequent {
        Sequent::parse(s, Notation::Substructural).unwrap()
    }

    #[test]
    fn match_axiom_examples() {
        let s = match_axiom(&f("(y*z) -> (y*z)"), &scheme("A1").unwrap()).unwrap();
        assert_eq!(s.get("a"), Some(&f("y*z")));
        assert!(match_axiom(&f("x -> y"), &scheme("A1").unwrap()).is_none());
        let s = match_axiom(&f("!(x->y) -> (!x -> !y)"), &scheme("!K").unwrap()).unwrap();
        assert_eq!(s.get("a"), Some(&f("x")));
        assert_eq!(s.get("b"), Some(&f("y")));
    }

    #[test]
    fn schemes_are_valid_in_r_girales() {
        for factors in [&[][..], &[2], &[3], &[2, 2]] {
            let g = build_r(&make_group(factors, &Limits::default()).unwrap(), Signature::FULL, &Limits::default())
                .unwrap()
                .into_algebra();
            for (name, _) in SCHEMES {
                let inst = scheme(name).unwrap();
                assert!(valid(&g, &inst).unwrap().holds(), "{name} on {factors:?}");
            }
        }
    }

    #[test]
    fn derivation_examples() {
        let fle = HilbertSystem::preset("FLe").unwrap();
        let d = Derivation::from_json(
            r#"[{"formula":"1","rule":"A12"},{"formula":"1 -> (x -> x)","rule":"A13"},{"formula":"x -> x","rule":"mp","refs":[1,2]}]"#,
            Notation::Substructural,
        )
        .unwrap();
        assert!(check_derivation(&d, &fle, &[]).valid);
        let ll = HilbertSystem::preset("LL").unwrap();
        let d = Derivation::from_json(
            r#"[{"formula":"x","rule":"premise","premise":0},{"formula":"!x","rule":"nec","refs":[1]}]"#,
            Notation::Substructural,
        )
        .unwrap();
        assert!(check_derivation(&d, &ll, &[f("x")]).valid);
        let bad = Derivation::from_json(r#"[{"formula":"x -> y","rule":"A1"}]"#, Notation::Substructural).unwrap();
        let rep = check_derivation(&bad, &fle, &[]);
        assert_eq!(rep.step, Some(1));
        assert_eq!(rep.reason, Some(Reason::NoMatchingSubstitution));
    }

    #[test]
    fn system_coherence() {
        let core: Vec<(String, Formula)> = vec![("A1".into(), scheme("A1").unwrap())];
        assert!(HilbertSystem::new("x", Signature::EMPTY, core.clone(), Rules { mp: true, adj: true, nec: true }).is_err());
        let bang = vec![("!T".into(), scheme("!T").unwrap())];
        assert!(HilbertSystem::new("x", Signature::FULL, bang, Rules { mp: true, adj: true, nec: false }).is_err());
        assert!(HilbertSystem::preset("RLe").unwrap().with_axiom("X", f("0")).is_err());
        assert!(HilbertSystem::preset("nope").is_err());
    }

    #[test]
    fn json_round_trip() {
        let text = r#"[{"formula":"1","rule":"A12"},{"formula":"1 -> (x -> x)","rule":"A13","substitution":{"a":"x"}},{"formula":"x -> x","rule":"mp","refs":[1,2]}]"#;
        let d = Derivation::from_json(text, Notation::Substructural).unwrap();
        let back = Derivation::from_json_steps(&d.to_json_steps(), Notation::Substructural).unwrap();
        assert_eq!(d, back);
    }

    #[test]
    fn sequent_parse_and_print() {
        let s = seq("x, x -> y => y");
        assert_eq!(s.antecedent.len(), 2);
        assert_eq!(s.to_string(), "x, x -> y => y");
        assert_eq!(seq("=> 1").antecedent.len(), 0);
        assert!(seq("0 =>").succedent.is_none());
        assert_eq!(seq("(x -> y) -> z, x => z").antecedent.len(), 2);
        assert!(Sequent::parse("x", Notation::Substructural).is_err());
    }

    #[test]
    fn basic_proofs() {
        let p = prove_sequent(&seq("x => x"), 1, true).unwrap().unwrap();
        assert_eq!(p.rule, SequentRule::Id);
        let p = prove_sequent(&seq("x, y => x * y"), 2, true).unwrap().unwrap();
        assert_eq!(p.rule, SequentRule::MulR);
        assert!(p.premises.iter().all(|q| q.rule == SequentRule::Id));
        validate_proof(&p, true).unwrap();
        for b in 1..=12 {
            assert!(prove_sequent(&seq("x => x * x"), b, true).unwrap().is_none());
        }
        let cm = sequent_countermodel(&seq("x => x * x"), &sequent_catalog()).unwrap();
        assert!(cm.is_some());
    }

    #[test]
    fn exchange_matters() {
        let s = seq("y, x, x -> (y -> z) => z");
        assert!(prove_sequent(&s, 10, true).unwrap().is_some());
        // Without exchange -> reads as \, and the antecedent order blocks it.
        let s2 = seq("x * y => y * x");
        assert!(prove_sequent(&s2, 10, true).unwrap().is_some());
        assert!(prove_sequent(&s2, 10, false).unwrap().is_none());
    }

    #[test]
    fn fragment_is_enforced() {
        assert!(matches!(prove_sequent(&seq("!x => x"), 5, true), Err(ProofError::Fragment(_))));
        assert!(matches!(prove_sequent(&seq("bot => x"), 5, true), Err(ProofError::Fragment(_))));
    }

    #[test]
    fn corrupted_proof_is_rejected() {
        let mut p = prove_sequent(&seq("x, y => x * y"), 3, true).unwrap().unwrap();
        p.premises.swap(0, 1);
        p.premises[0].sequent.succedent = Some(f("z"));
        assert!(matches!(validate_proof(&p, true), Err(ProofError::InvalidNode { .. })));
    }

    #[test]
    fn craig_examples() {
        let p = prove_sequent(&seq("x, x -> y => y"), 6, true).unwrap().unwrap();
        let c = extract_craig(&p, &[0]).unwrap();
        assert_eq!(c.delta, f("x"));
        let p = prove_sequent(&seq("x => x"), 1, true).unwrap().unwrap();
        assert_eq!(extract_craig(&p, &[0]).unwrap().delta, f("x"));
        let p = prove_sequent(&seq("x, y => x * y"), 3, true).unwrap().unwrap();
        let c = extract_craig(&p, &[0]).unwrap();
        assert!(c.delta.free_variables().is_subset(&c.shared));
        assert_eq!(c.delta, f("x"));
        assert!(extract_craig(&p, &[5]).is_err());
        assert!(extract_craig(&p, &[0, 0]).is_err());
    }

    #[test]
    fn craig_with_principal_implication_on_the_left() {
        let p = prove_sequent(&seq("x -> y, x, y -> z => z"), 10, true).unwrap().unwrap();
        for left in [vec![0], vec![0, 1], vec![2], vec![1, 2], vec![]] {
            let c = extract_craig(&p, &left).unwrap();
            assert!(c.delta.free_variables().is_subset(&c.shared), "{left:?}");
        }
    }
}
