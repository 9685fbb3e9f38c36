//! Fixed fixtures: Hilbert derivations (valid and mutated), sequents and
//! interpolation problems.

use serde::{Deserialize, Serialize};

use crate::formula::{Formula, Notation};
use crate::proofs::{scheme, Derivation, Justification, Step, StepJson};

fn f(text: &str) -> Formula {
    Formula::parse(text, Notation::Substructural).expect("fixture parses")
}

/// A derivation with the system it is meant for.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusEntry {
    pub name: String,
    pub system: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub premises: Vec<String>,
    pub steps: Vec<StepJson>,
}

impl CorpusEntry {
    pub fn derivation(&self) -> Derivation {
        Derivation::from_json_steps(&self.steps, Notation::Substructural).expect("corpus entry parses")
    }

    pub fn premise_formulas(&self) -> Vec<Formula> {
        self.premises.iter().map(|p| f(p)).collect()
    }
}

#[derive(Default)]
struct Builder {
    steps: Vec<Step>,
}

fn imp_parts(g: &Formula) -> (Formula, Formula) {
    match g {
        Formula::Binary(crate::formula::BinOp::Imp, l, r) => ((**l).clone(), (**r).clone()),
        other => panic!("{other} is not an implication"),
    }
}

impl Builder {
    fn push(&mut self, formula: Formula, justification: Justification) -> usize {
        self.steps.push(Step { formula, justification });
        self.steps.len()
    }

    fn at(&self, i: usize) -> &Formula {
        &self.steps[i - 1].formula
    }

    fn ax(&mut self, name: &str, subst: &[(&str, Formula)]) -> usize {
        let sigma = subst.iter().map(|(k, v)| (k.to_string(), v.clone())).collect();
        let formula = scheme(name).expect("known scheme").substitute(&sigma);
        self.push(
            formula,
            Justification::Axiom {
                name: name.into(),
                substitution: None,
            },
        )
    }

    fn mp(&mut self, minor: usize, major: usize) -> usize {
        let (a, b) = imp_parts(self.at(major));
        assert_eq!(&a, self.at(minor), "mp antecedent");
        self.push(b, Justification::Mp(minor, major))
    }

    fn adj(&mut self, i: usize, j: usize) -> usize {
        let g = Formula::meet(self.at(i).clone(), self.at(j).clone());
        self.push(g, Justification::Adj(i, j))
    }

    fn nec(&mut self, i: usize) -> usize {
        let g = Formula::bang(self.at(i).clone());
        self.push(g, Justification::Nec(i))
    }

    fn premise(&mut self, k: usize, g: Formula) -> usize {
        self.push(g, Justification::Premise(k))
    }

    /// `t → t` from the unit axioms.
    fn identity(&mut self, t: Formula) -> usize {
        let one = self.ax("A12", &[]);
        let unit = self.ax("A13", &[("a", t)]);
        self.mp(one, unit)
    }

    /// From `α → β` and `β → γ`, `α → γ`.
    fn syllogism(&mut self, i: usize, j: usize) -> usize {
        let (a, b) = imp_parts(self.at(i));
        let (_, c) = imp_parts(self.at(j));
        let s = self.ax("A6", &[("a", a), ("b", b), ("c", c)]);
        let k = self.mp(i, s);
        self.mp(j, k)
    }

    /// From `α → (β → γ)`, `β → (α → γ)`.
    fn permute(&mut self, i: usize) -> usize {
        let (a, bc) = imp_parts(self.at(i));
        let (b, c) = imp_parts(&bc);
        let s = self.ax("A7", &[("a", a), ("b", b), ("c", c)]);
        self.mp(i, s)
    }

    /// From `α → β` and `α → γ`, `α → β ∧ γ`.
    fn meet_intro(&mut self, i: usize, j: usize) -> usize {
        let (a, b) = imp_parts(self.at(i));
        let (_, c) = imp_parts(self.at(j));
        let both = self.adj(i, j);
        let s = self.ax("A8", &[("a", a), ("b", b), ("c", c)]);
        self.mp(both, s)
    }

    /// From `α → γ` and `β → γ`, `α ∨ β → γ`.
    fn join_elim(&mut self, i: usize, j: usize) -> usize {
        let (a, c) = imp_parts(self.at(i));
        let (b, _) = imp_parts(self.at(j));
        let both = self.adj(i, j);
        let s = self.ax("A9", &[("a", a), ("b", b), ("c", c)]);
        self.mp(both, s)
    }

    /// From `α → (β → γ)`, `α·β → γ`.
    fn uncurry(&mut self, i: usize) -> usize {
        let (a, bc) = imp_parts(self.at(i));
        let (b, c) = imp_parts(&bc);
        let s = self.ax("A11", &[("a", a), ("b", b), ("c", c)]);
        self.mp(i, s)
    }

    fn finish(self, name: &str, system: &str, premises: &[&str]) -> CorpusEntry {
        CorpusEntry {
            name: name.into(),
            system: system.into(),
            premises: premises.iter().map(|s| s.to_string()).collect(),
            steps: Derivation { steps: self.steps }.to_json_steps(),
        }
    }
}

/// Weakest preset containing a scheme.
fn home_system(name: &str) -> &'static str {
    match name {
        "Abot" | "Atop" => "FLe-bounded",
        "A0" | "NC" | "DN" | "Con" => "MALL",
        n if n.starts_with('!') => "LL",
        _ => "RLe",
    }
}

/// The valid derivations. Entries without premises derive theorems.
pub fn hilbert_corpus() -> Vec<CorpusEntry> {
    let mut out = Vec::new();
    let sample = [
        ("a", f("x")),
        ("b", f("y -> z")),
        ("c", f("x /\\ y")),
    ];
    for (name, _) in crate::proofs::SCHEMES {
        let mut b = Builder::default();
        b.ax(name, &sample);
        out.push(b.finish(&format!("instance {name}"), home_system(name), &[]));
    }
    for t in ["x", "x * y", "x /\\ y", "x -> y", "y \\/ 1", "(x -> y) * z"] {
        let mut b = Builder::default();
        b.identity(f(t));
        out.push(b.finish(&format!("identity via unit for {t}"), "RLe", &[]));
    }
    for (x, y, z) in [("x", "y", "z"), ("x * y", "z", "x"), ("x -> y", "y", "1")] {
        let mut b = Builder::default();
        let xy = Formula::meet(f(x), f(y));
        let i = b.ax("A2", &[("a", xy.clone()), ("b", f(z))]);
        let j = b.ax("A2", &[("a", f(x)), ("b", f(y))]);
        b.syllogism(i, j);
        out.push(b.finish(&format!("meet projection for {x}, {y}, {z}"), "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("A4", &[("a", f("x")), ("b", f("y"))]);
        let j = b.ax("A4", &[("a", f("x \\/ y")), ("b", f("z"))]);
        b.syllogism(i, j);
        out.push(b.finish("join injection chain", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("A3", &[("a", f("x")), ("b", f("y"))]);
        let j = b.ax("A2", &[("a", f("x")), ("b", f("y"))]);
        b.meet_intro(i, j);
        out.push(b.finish("meet commutes", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("A5", &[("a", f("y")), ("b", f("x"))]);
        let j = b.ax("A4", &[("a", f("y")), ("b", f("x"))]);
        b.join_elim(i, j);
        out.push(b.finish("join commutes", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("A10", &[("a", f("y")), ("b", f("x"))]);
        let j = b.permute(i);
        b.uncurry(j);
        out.push(b.finish("product commutes", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.identity(f("x"));
        let j = b.identity(f("y"));
        b.adj(i, j);
        out.push(b.finish("adjunction of identities", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.identity(f("x"));
        b.nec(i);
        out.push(b.finish("necessitation of identity", "LL", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.identity(f("x"));
        let n = b.nec(i);
        let k = b.ax("!K", &[("a", f("x")), ("b", f("x"))]);
        b.mp(n, k);
        out.push(b.finish("bang identity through K", "LL", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("!T", &[("a", f("x"))]);
        let j = b.ax("A4", &[("a", f("x")), ("b", f("y"))]);
        b.syllogism(i, j);
        out.push(b.finish("dereliction then injection", "LL", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("!4", &[("a", f("x"))]);
        let j = b.ax("!T", &[("a", f("!x"))]);
        b.syllogism(i, j);
        out.push(b.finish("promotion then dereliction", "LL", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.identity(f("x"));
        let w = b.ax("!w", &[("a", f("y")), ("b", f("x -> x"))]);
        b.mp(i, w);
        out.push(b.finish("weakening by a banged formula", "LL", &[]));
    }
    {
        let mut b = Builder::default();
        let t = b.ax("!T", &[("a", f("x"))]);
        let w = b.ax("!w", &[("a", f("x")), ("b", f("!x -> x"))]);
        let d = b.mp(t, w);
        let c = b.ax("!i", &[("a", f("x")), ("b", f("x"))]);
        b.mp(d, c);
        out.push(b.finish("contraction of banged hypotheses", "LL", &[]));
    }
    {
        let mut b = Builder::default();
        let nc = b.ax("NC", &[("a", f("x"))]);
        let con = b.ax("Con", &[("a", f("x")), ("b", f("~x"))]);
        b.mp(nc, con);
        out.push(b.finish("contraposition of double negation", "MALL", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("Atop", &[("a", f("x"))]);
        let j = b.ax("A4", &[("a", f("x")), ("b", f("y"))]);
        b.syllogism(i, j);
        out.push(b.finish("bottom below a join", "FLe-bounded", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("A2", &[("a", f("x")), ("b", f("y"))]);
        let j = b.ax("Abot", &[("a", f("x"))]);
        b.syllogism(i, j);
        out.push(b.finish("meet below top", "FLe-bounded", &[]));
    }
    {
        let mut b = Builder::default();
        let one = b.ax("A12", &[]);
        let pair = b.ax("A10", &[("a", f("1")), ("b", f("1"))]);
        let k = b.mp(one, pair);
        b.mp(one, k);
        out.push(b.finish("unit squared", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("A10", &[("a", f("x")), ("b", f("y"))]);
        b.uncurry(i);
        out.push(b.finish("product identity", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("A10", &[("a", f("x")), ("b", f("y"))]);
        b.permute(i);
        out.push(b.finish("pairing permuted", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("A1", &[("a", f("x"))]);
        let j = b.ax("A1", &[("a", f("x"))]);
        b.join_elim(i, j);
        out.push(b.finish("join idempotent", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("A1", &[("a", f("x"))]);
        let j = b.ax("A1", &[("a", f("x"))]);
        b.meet_intro(i, j);
        out.push(b.finish("meet idempotent", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("A6", &[("a", f("x")), ("b", f("y")), ("c", f("z"))]);
        b.permute(i);
        out.push(b.finish("prefixing", "RLe", &[]));
    }
    {
        let mut b = Builder::default();
        let a0 = b.ax("A0", &[]);
        let i = b.identity(f("0"));
        b.adj(a0, i);
        out.push(b.finish("negated zero with identity", "MALL", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.ax("DN", &[("a", f("x"))]);
        let j = b.ax("A4", &[("a", f("x")), ("b", f("0"))]);
        b.syllogism(i, j);
        out.push(b.finish("double negation then injection", "MALL", &[]));
    }
    {
        let mut b = Builder::default();
        let i = b.premise(0, f("x"));
        let j = b.premise(1, f("x -> y"));
        b.mp(i, j);
        out.push(b.finish("modus ponens from premises", "RLe", &["x", "x -> y"]));
    }
    {
        let mut b = Builder::default();
        let i = b.premise(0, f("x"));
        let j = b.premise(1, f("y"));
        b.adj(i, j);
        out.push(b.finish("adjunction from premises", "RLe", &["x", "y"]));
    }
    {
        let mut b = Builder::default();
        let i = b.premise(0, f("x"));
        b.nec(i);
        out.push(b.finish("necessitation from a premise", "LL", &["x"]));
    }
    out
}

/// A derivation that must be rejected at `step` for `reason`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Mutation {
    pub name: &'static str,
    /// A preset name, or `"no-nec"`/`"no-adj"` for a full-signature system
    /// lacking that rule.
    pub system: &'static str,
    pub premises: &'static [&'static str],
    pub steps: &'static str,
    pub step: usize,
    pub reason: &'static str,
}

pub const MUTATIONS: &[Mutation] = &[
    Mutation {
        name: "wrong scheme name",
        system: "FLe",
        premises: &[],
        steps: r#"[{"formula":"1","rule":"A12"},{"formula":"1 -> (x -> x)","rule":"A1"},{"formula":"x -> x","rule":"mp","refs":[1,2]}]"#,
        step: 2,
        reason: "no-matching-substitution",
    },
    Mutation {
        name: "mp references swapped",
        system: "FLe",
        premises: &[],
        steps: r#"[{"formula":"1","rule":"A12"},{"formula":"1 -> (x -> x)","rule":"A13"},{"formula":"x -> x","rule":"mp","refs":[2,1]}]"#,
        step: 3,
        reason: "mp-mismatch",
    },
    Mutation {
        name: "mp forward reference",
        system: "FLe",
        premises: &[],
        steps: r#"[{"formula":"1","rule":"A12"},{"formula":"x -> x","rule":"mp","refs":[1,3]},{"formula":"1 -> (x -> x)","rule":"A13"}]"#,
        step: 2,
        reason: "bad-reference",
    },
    Mutation {
        name: "mp zero reference",
        system: "RLe",
        premises: &[],
        steps: r#"[{"formula":"1","rule":"A12"},{"formula":"1 -> (x -> x)","rule":"A13"},{"formula":"x -> x","rule":"mp","refs":[0,2]}]"#,
        step: 3,
        reason: "bad-reference",
    },
    Mutation {
        name: "mp self reference",
        system: "RLe",
        premises: &[],
        steps: r#"[{"formula":"1","rule":"A12"},{"formula":"x -> x","rule":"mp","refs":[1,2]}]"#,
        step: 2,
        reason: "bad-reference",
    },
    Mutation {
        name: "mp conclusion altered",
        system: "FLe",
        premises: &[],
        steps: r#"[{"formula":"1","rule":"A12"},{"formula":"1 -> (x -> x)","rule":"A13"},{"formula":"y -> y","rule":"mp","refs":[1,2]}]"#,
        step: 3,
        reason: "mp-mismatch",
    },
    Mutation {
        name: "unknown scheme",
        system: "LL",
        premises: &[],
        steps: r#"[{"formula":"x -> x","rule":"A99"}]"#,
        step: 1,
        reason: "unknown-axiom",
    },
    Mutation {
        name: "involutive scheme in FLe",
        system: "FLe",
        premises: &[],
        steps: r#"[{"formula":"1","rule":"A12"},{"formula":"~~x -> x","rule":"DN"}]"#,
        step: 2,
        reason: "unknown-axiom",
    },
    Mutation {
        name: "zero in RLe",
        system: "RLe",
        premises: &[],
        steps: r#"[{"formula":"~0","rule":"A0"}]"#,
        step: 1,
        reason: "outside-signature",
    },
    Mutation {
        name: "bang in MALL",
        system: "MALL",
        premises: &[],
        steps: r#"[{"formula":"1","rule":"A12"},{"formula":"!x -> x","rule":"!T"}]"#,
        step: 2,
        reason: "outside-signature",
    },
    Mutation {
        name: "top in FLe",
        system: "FLe",
        premises: &[],
        steps: r#"[{"formula":"x -> top","rule":"Abot"}]"#,
        step: 1,
        reason: "outside-signature",
    },
    Mutation {
        name: "nec without the rule",
        system: "no-nec",
        premises: &["x"],
        steps: r#"[{"formula":"x","rule":"premise","premise":0},{"formula":"!x","rule":"nec","refs":[1]}]"#,
        step: 2,
        reason: "rule-not-in-system",
    },
    Mutation {
        name: "adj without the rule",
        system: "no-adj",
        premises: &["x", "y"],
        steps: r#"[{"formula":"x","rule":"premise","premise":0},{"formula":"y","rule":"premise","premise":1},{"formula":"x /\\ y","rule":"adj","refs":[1,2]}]"#,
        step: 3,
        reason: "rule-not-in-system",
    },
    Mutation {
        name: "adj conjuncts reversed",
        system: "RLe",
        premises: &["x", "y"],
        steps: r#"[{"formula":"x","rule":"premise","premise":0},{"formula":"y","rule":"premise","premise":1},{"formula":"y /\\ x","rule":"adj","refs":[1,2]}]"#,
        step: 3,
        reason: "adj-mismatch",
    },
    Mutation {
        name: "nec applied twice at once",
        system: "LL",
        premises: &["x"],
        steps: r#"[{"formula":"x","rule":"premise","premise":0},{"formula":"!!x","rule":"nec","refs":[1]}]"#,
        step: 2,
        reason: "nec-mismatch",
    },
    Mutation {
        name: "premise index out of range",
        system: "RLe",
        premises: &["x"],
        steps: r#"[{"formula":"x","rule":"premise","premise":1}]"#,
        step: 1,
        reason: "premise-out-of-range",
    },
    Mutation {
        name: "premise formula altered",
        system: "RLe",
        premises: &["x"],
        steps: r#"[{"formula":"y","rule":"premise","premise":0}]"#,
        step: 1,
        reason: "premise-mismatch",
    },
    Mutation {
        name: "explicit substitution disagrees",
        system: "RLe",
        premises: &[],
        steps: r#"[{"formula":"1","rule":"A12"},{"formula":"1 -> (x -> x)","rule":"A13","substitution":{"a":"y"}}]"#,
        step: 2,
        reason: "substitution-mismatch",
    },
    Mutation {
        name: "syllogism scheme with a broken metavariable",
        system: "RLe",
        premises: &[],
        steps: r#"[{"formula":"x /\\ y -> x","rule":"A2"},{"formula":"(x /\\ y -> x) -> ((x -> z) -> (x /\\ y -> y))","rule":"A6"}]"#,
        step: 2,
        reason: "no-matching-substitution",
    },
    Mutation {
        name: "right projection labelled left",
        system: "RLe",
        premises: &[],
        steps: r#"[{"formula":"x /\\ y -> y","rule":"A2"}]"#,
        step: 1,
        reason: "no-matching-substitution",
    },
    Mutation {
        name: "unit axiom with zero",
        system: "FLe",
        premises: &[],
        steps: r#"[{"formula":"0","rule":"A12"}]"#,
        step: 1,
        reason: "no-matching-substitution",
    },
    Mutation {
        name: "bounds swapped",
        system: "FLe-bounded",
        premises: &[],
        steps: r#"[{"formula":"x -> top","rule":"Atop"}]"#,
        step: 1,
        reason: "no-matching-substitution",
    },
    Mutation {
        name: "K with swapped consequent",
        system: "LL",
        premises: &[],
        steps: r#"[{"formula":"!(x -> y) -> (!y -> !x)","rule":"!K"}]"#,
        step: 1,
        reason: "no-matching-substitution",
    },
    Mutation {
        name: "adj where mp belongs",
        system: "RLe",
        premises: &["x", "x -> y"],
        steps: r#"[{"formula":"x","rule":"premise","premise":0},{"formula":"x -> y","rule":"premise","premise":1},{"formula":"y","rule":"adj","refs":[1,2]}]"#,
        step: 3,
        reason: "adj-mismatch",
    },
];

/// Sequents provable in the exchange calculus.
pub const PROVABLE_SEQUENTS: &[&str] = &[
    "x => x",
    "x, y => x * y",
    "y, x => x * y",
    "x * y => y * x",
    "x, x -> y => y",
    "x -> y, x => y",
    "x -> (y -> z) => y -> (x -> z)",
    "x -> (y -> z) => x * y -> z",
    "x * y -> z => x -> (y -> z)",
    "=> x -> x",
    "=> 1",
    "1 => 1",
    "x /\\ y => x",
    "x /\\ y => y /\\ x",
    "x => x \\/ y",
    "x \\/ y => y \\/ x",
    "x -> y, y -> z => x -> z",
    "y -> z, x, x -> y => z",
    "(x * y) * z => x * (y * z)",
    "x * (y \\/ z) => x * y \\/ x * z",
    "(x -> y) /\\ (x -> z) => x -> y /\\ z",
    "x => (x -> y) -> y",
    "x, ~x => 0",
    "x => ~~x",
    "0 =>",
    "x, ~x =>",
    "x /\\ y, z => x * z",
    "1, x => x",
    "x * 1 => x",
    "(x -> z) /\\ (y -> z), x \\/ y => z",
];

/// Sequents that need weakening or contraction, with no proof at any bound.
pub const UNPROVABLE_SEQUENTS: &[&str] = &[
    "x => x * x",
    "x, y => x",
    "x => 1",
    "x -> (x -> y) => x -> y",
    "x /\\ y => x * y",
    "=> x \\/ ~x",
    "0 => x",
];

/// Entailments `φ ⊢ ψ` whose implication is valid on girales, with shared
/// variables.
pub const INTERPOLATION_FIXTURES: &[(&str, &str)] = &[
    ("x /\\ y", "x \\/ z"),
    ("x /\\ (y -> z)", "x \\/ w"),
    ("x * (x -> y)", "y \\/ z"),
    ("y /\\ x", "x \\/ z /\\ y"),
    ("x", "x \\/ y"),
    ("x /\\ y", "y"),
    ("x /\\ 1", "x \\/ z"),
    ("x * y", "y * x \\/ z"),
    ("x /\\ (y \\/ z)", "x \\/ w"),
    ("(x \\/ y) /\\ x", "x \\/ z"),
    ("x * y /\\ z", "x * y \\/ w"),
    ("(x -> y) /\\ z", "(x -> y) \\/ w"),
    ("x /\\ y /\\ z", "y \\/ x"),
    ("x * (x -> y)", "y"),
    ("!x /\\ y", "!x \\/ z"),
    ("x /\\ y", "x \\/ 0"),
    ("(x \\/ y) /\\ (x \\/ z)", "x \\/ y \\/ w"),
    ("x * 1 /\\ y", "x \\/ y"),
    ("(x /\\ z) * y", "x * y \\/ w"),
    ("!(x /\\ y)", "!x \\/ z"),
];

#[cfg(test)]
mod tests {
    use super::*;
    use crate::proofs::{check_derivation, HilbertSystem};

    #[test]
    fn corpus_checks_in_its_system() {
        let corpus = hilbert_corpus();
        assert!(corpus.iter().filter(|e| e.premises.is_empty()).count() >= 50);
        for e in &corpus {
            let sys = HilbertSystem::preset(&e.system).unwrap();
            let rep = check_derivation(&e.derivation(), &sys, &e.premise_formulas());
            assert!(rep.valid, "{}: {rep:?}", e.name);
        }
    }

    #[test]
    fn shipped_json_matches_the_builder() {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/data/hilbert_corpus.json");
        let fresh = serde_json::to_string_pretty(&hilbert_corpus()).unwrap() + "\n";
        if std::env::var_os("GIRALE_REGENERATE").is_some() {
            std::fs::write(path, &fresh).unwrap();
        }
        let shipped = std::fs::read_to_string(path).unwrap();
        assert_eq!(shipped, fresh, "run with GIRALE_REGENERATE=1 to refresh");
    }
}
