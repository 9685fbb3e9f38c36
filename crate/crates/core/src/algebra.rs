//! Finite algebras in the residuated-lattice signatures, given by operation
//! tables over the element indices `0..n`.
//!
//! The base signature `{∧, ∨, ·, →, 1}` is always present. The optional
//! symbols `0`, `⊥`, `⊤` and `!` are stored as explicit constant positions and
//! a unary table, so taking a reduct never needs to recompute anything.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::formula::Constant;
use crate::group::GroupError;
use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("malformed algebra: {0}")]
    Shape(String),
    #[error("signature mismatch: {0}")]
    SignatureMismatch(String),
    #[error("operation is not residuated at ({a},{c}); maximal candidates {maximal:?}")]
    NotResiduated { a: usize, c: usize, maximal: Vec<usize> },
    #[error("capacity exceeded: {what} has {needed} elements, limit is {limit}")]
    Capacity {
        what: &'static str,
        needed: usize,
        limit: usize,
    },
    #[error("precondition violated: {law} fails at {witness:?}")]
    Precondition { law: String, witness: Vec<usize> },
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// Square operation table.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Table {
    n: usize,
    data: Vec<usize>,
}

impl Table {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> usize) -> Table {
        let mut data = Vec::with_capacity(n * n);
        for a in 0..n {
            for b in 0..n {
                data.push(f(a, b));
            }
        }
        Table { n, data }
    }

    pub fn from_rows(rows: Vec<Vec<usize>>, n: usize, name: &str) -> Result<Table, AlgebraError> {
        if rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(AlgebraError::Shape(format!("{name} table is not {n}x{n}")));
        }
        let data: Vec<usize> = rows.into_iter().flatten().collect();
        if let Some(bad) = data.iter().find(|&&x| x >= n) {
            return Err(AlgebraError::Shape(format!("{name} entry {bad} out of range")));
        }
        Ok(Table { n, data })
    }

    #[inline]
    pub fn get(&self, a: usize, b: usize) -> usize {
        self.data[a * self.n + b]
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> Vec<Vec<usize>> {
        if self.n == 0 {
            return Vec::new();
        }
        self.data.chunks(self.n).map(|r| r.to_vec()).collect()
    }
}

/// Optional symbols on top of `{∧, ∨, ·, →, 1}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, PartialOrd, Ord)]
pub struct Signature {
    pub zero: bool,
    pub bot: bool,
    pub top: bool,
    pub bang: bool,
}

impl Signature {
    pub const EMPTY: Signature = Signature {
        zero: false,
        bot: false,
        top: false,
        bang: false,
    };
    pub const BOUNDED: Signature = Signature {
        zero: false,
        bot: true,
        top: true,
        bang: false,
    };
    pub const MALL: Signature = Signature {
        zero: true,
        bot: true,
        top: true,
        bang: false,
    };
    pub const FULL: Signature = Signature {
        zero: true,
        bot: true,
        top: true,
        bang: true,
    };

    /// All sixteen subsets of `{0, ⊥, ⊤, !}`.
    pub fn all() -> Vec<Signature> {
        (0u8..16)
            .map(|m| Signature {
                zero: m & 1 != 0,
                bot: m & 2 != 0,
                top: m & 4 != 0,
                bang: m & 8 != 0,
            })
            .collect()
    }

    pub fn symbols(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.zero {
            out.push("0");
        }
        if self.bot {
            out.push("bot");
        }
        if self.top {
            out.push("top");
        }
        if self.bang {
            out.push("bang");
        }
        out
    }

    pub fn from_symbols<S: AsRef<str>>(symbols: &[S]) -> Result<Signature, String> {
        let mut sig = Signature::EMPTY;
        for s in symbols {
            match s.as_ref().trim() {
                "0" | "zero" => sig.zero = true,
                "bot" => sig.bot = true,
                "top" => sig.top = true,
                "bang" | "!" => sig.bang = true,
                "" => {}
                other => return Err(format!("unknown signature symbol `{other}`")),
            }
        }
        Ok(sig)
    }

    pub fn is_subset_of(&self, other: &Signature) -> bool {
        (!self.zero || other.zero)
            && (!self.bot || other.bot)
            && (!self.top || other.top)
            && (!self.bang || other.bang)
    }

    pub fn intersect(&self, other: &Signature) -> Signature {
        Signature {
            zero: self.zero && other.zero,
            bot: self.bot && other.bot,
            top: self.top && other.top,
            bang: self.bang && other.bang,
        }
    }

    pub fn has_constant(&self, c: Constant) -> bool {
        match c {
            Constant::One => true,
            Constant::Zero => self.zero,
            Constant::Bot => self.bot,
            Constant::Top => self.top,
        }
    }

    /// Whether a bound symbol is present.
    pub fn has_bounds(&self) -> bool {
        self.bot || self.top
    }
}

impl std::str::FromStr for Signature {
    type Err = String;

    /// `full`, `none`/`empty`, or a comma list such as `0,bot,top,bang`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "full" | "all" => Ok(Signature::FULL),
            "none" | "empty" | "" => Ok(Signature::EMPTY),
            list => Signature::from_symbols(&list.split(',').collect::<Vec<_>>()),
        }
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.symbols().join(","))
    }
}

impl Serialize for Signature {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.symbols().serialize(s)
    }
}

impl<'de> Deserialize<'de> for Signature {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v: Vec<String> = Vec::deserialize(d)?;
        Signature::from_symbols(&v).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteAlgebra {
    meet: Table,
    join: Table,
    mult: Table,
    imp: Table,
    one: usize,
    zero: Option<usize>,
    bot: Option<usize>,
    top: Option<usize>,
    bang: Option<Vec<usize>>,
    names: Option<Vec<String>>,
}

impl FiniteAlgebra {
    /// Base-signature algebra; only dimensions and index ranges are validated
    /// here, the equational laws are the business of [`check_class`].
    pub fn new(meet: Table, join: Table, mult: Table, imp: Table, one: usize) -> Result<Self, AlgebraError> {
        let n = meet.size();
        if n == 0 {
            return Err(AlgebraError::Shape("empty universe".into()));
        }
        if [&join, &mult, &imp].iter().any(|t| t.size() != n) {
            return Err(AlgebraError::Shape("tables differ in size".into()));
        }
        if one >= n {
            return Err(AlgebraError::Shape(format!("unit {one} out of range")));
        }
        Ok(FiniteAlgebra {
            meet,
            join,
            mult,
            imp,
            one,
            zero: None,
            bot: None,
            top: None,
            bang: None,
            names: None,
        })
    }

    fn check_index(&self, i: usize, what: &str) -> Result<(), AlgebraError> {
        if i >= self.size() {
            return Err(AlgebraError::Shape(format!("{what} index {i} out of range")));
        }
        Ok(())
    }

    pub fn with_zero(mut self, zero: usize) -> Result<Self, AlgebraError> {
        self.check_index(zero, "zero")?;
        self.zero = Some(zero);
        Ok(self)
    }

    pub fn with_bot(mut self, bot: usize) -> Result<Self, AlgebraError> {
        self.check_index(bot, "bot")?;
        self.bot = Some(bot);
        Ok(self)
    }

    pub fn with_top(mut self, top: usize) -> Result<Self, AlgebraError> {
        self.check_index(top, "top")?;
        self.top = Some(top);
        Ok(self)
    }

    pub fn with_bang(mut self, bang: Vec<usize>) -> Result<Self, AlgebraError> {
        if bang.len() != self.size() {
            return Err(AlgebraError::Shape("bang table has wrong length".into()));
        }
        if let Some(bad) = bang.iter().find(|&&x| x >= self.size()) {
            return Err(AlgebraError::Shape(format!("bang entry {bad} out of range")));
        }
        self.bang = Some(bang);
        Ok(self)
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<Self, AlgebraError> {
        if names.len() != self.size() {
            return Err(AlgebraError::Shape("names have wrong length".into()));
        }
        self.names = Some(names);
        Ok(self)
    }

    /// One-element algebra in the given signature.
    pub fn trivial(sig: Signature) -> FiniteAlgebra {
        let t = Table::from_fn(1, |_, _| 0);
        FiniteAlgebra {
            meet: t.clone(),
            join: t.clone(),
            mult: t.clone(),
            imp: t,
            one: 0,
            zero: sig.zero.then_some(0),
            bot: sig.bot.then_some(0),
            top: sig.top.then_some(0),
            bang: sig.bang.then(|| vec![0]),
            names: Some(vec!["1".into()]),
        }
    }

    /// The reduct to a smaller signature.
    pub fn reduct(&self, sig: Signature) -> Result<FiniteAlgebra, AlgebraError> {
        if !sig.is_subset_of(&self.signature()) {
            return Err(AlgebraError::SignatureMismatch(format!(
                "cannot take {sig} reduct of an algebra in signature {}",
                self.signature()
            )));
        }
        let mut out = self.clone();
        if !sig.zero {
            out.zero = None;
        }
        if !sig.bot {
            out.bot = None;
        }
        if !sig.top {
            out.top = None;
        }
        if !sig.bang {
            out.bang = None;
        }
        Ok(out)
    }

    pub fn size(&self) -> usize {
        self.meet.size()
    }

    pub fn is_trivial(&self) -> bool {
        self.size() == 1
    }

    pub fn signature(&self) -> Signature {
        Signature {
            zero: self.zero.is_some(),
            bot: self.bot.is_some(),
            top: self.top.is_some(),
            bang: self.bang.is_some(),
        }
    }

    #[inline]
    pub fn meet(&self, a: usize, b: usize) -> usize {
        self.meet.get(a, b)
    }

    #[inline]
    pub fn join(&self, a: usize, b: usize) -> usize {
        self.join.get(a, b)
    }

    #[inline]
    pub fn mult(&self, a: usize, b: usize) -> usize {
        self.mult.get(a, b)
    }

    #[inline]
    pub fn imp(&self, a: usize, b: usize) -> usize {
        self.imp.get(a, b)
    }

    pub fn bang(&self, a: usize) -> Option<usize> {
        self.bang.as_ref().map(|t| t[a])
    }

    pub fn bang_table(&self) -> Option<&[usize]> {
        self.bang.as_deref()
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn zero(&self) -> Option<usize> {
        self.zero
    }

    pub fn bot(&self) -> Option<usize> {
        self.bot
    }

    pub fn top(&self) -> Option<usize> {
        self.top
    }

    pub fn constant(&self, c: Constant) -> Option<usize> {
        match c {
            Constant::One => Some(self.one),
            Constant::Zero => self.zero,
            Constant::Bot => self.bot,
            Constant::Top => self.top,
        }
    }

    pub fn meet_table(&self) -> &Table {
        &self.meet
    }

    pub fn join_table(&self) -> &Table {
        &self.join
    }

    pub fn mult_table(&self) -> &Table {
        &self.mult
    }

    pub fn imp_table(&self) -> &Table {
        &self.imp
    }

    #[inline]
    pub fn leq(&self, a: usize, b: usize) -> bool {
        self.meet(a, b) == a
    }

    /// `a ∧ 1 = 1`, the designated elements of the defining equation.
    #[inline]
    pub fn designated(&self, a: usize) -> bool {
        self.meet(a, self.one) == self.one
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.size()
    }

    pub fn names(&self) -> Option<&[String]> {
        self.names.as_deref()
    }

    pub fn element_name(&self, a: usize) -> String {
        match &self.names {
            Some(n) => n[a].clone(),
            None => a.to_string(),
        }
    }

    /// Looks an element up by name, or by decimal index.
    pub fn find_element(&self, name: &str) -> Option<usize> {
        if let Some(names) = &self.names {
            if let Some(i) = names.iter().position(|n| n == name) {
                return Some(i);
            }
        }
        name.parse::<usize>().ok().filter(|&i| i < self.size())
    }

    /// Least element, located by `∀y. x ∧ y = x`.
    pub fn least(&self) -> Option<usize> {
        self.elements().find(|&x| self.elements().all(|y| self.meet(x, y) == x))
    }

    /// Greatest element, located by `∀y. x ∨ y = x`.
    pub fn greatest(&self) -> Option<usize> {
        self.elements().find(|&x| self.elements().all(|y| self.join(x, y) == x))
    }

    /// Direct product; `(a, b)` sits at index `a * |other| + b`.
    pub fn product(&self, other: &FiniteAlgebra, limits: &Limits) -> Result<FiniteAlgebra, AlgebraError> {
        if self.signature() != other.signature() {
            return Err(AlgebraError::SignatureMismatch("factors differ in signature".into()));
        }
        let (n, m) = (self.size(), other.size());
        limits.check_product(n * m)?;
        let pair = |t1: &Table, t2: &Table| {
            Table::from_fn(n * m, |x, y| t1.get(x / m, y / m) * m + t2.get(x % m, y % m))
        };
        let c = |a: Option<usize>, b: Option<usize>| a.zip(b).map(|(a, b)| a * m + b);
        Ok(FiniteAlgebra {
            meet: pair(&self.meet, &other.meet),
            join: pair(&self.join, &other.join),
            mult: pair(&self.mult, &other.mult),
            imp: pair(&self.imp, &other.imp),
            one: self.one * m + other.one,
            zero: c(self.zero, other.zero),
            bot: c(self.bot, other.bot),
            top: c(self.top, other.top),
            bang: match (&self.bang, &other.bang) {
                (Some(b1), Some(b2)) => Some((0..n * m).map(|x| b1[x / m] * m + b2[x % m]).collect()),
                _ => None,
            },
            names: Some(
                (0..n * m)
                    .map(|x| format!("({},{})", self.element_name(x / m), other.element_name(x % m)))
                    .collect(),
            ),
        })
    }

    /// Binary tables together with a flag telling whether they are commutative
    /// by construction (used to halve congruence generation work).
    fn binary_ops(&self) -> [(&Table, bool); 4] {
        [(&self.meet, true), (&self.join, true), (&self.mult, true), (&self.imp, false)]
    }
}

/// Varieties this kernel knows how to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ClassTag {
    #[serde(rename = "CRL")]
    Crl,
    #[serde(rename = "PRL")]
    Prl,
    #[serde(rename = "boundedPRL")]
    BoundedPrl,
    #[serde(rename = "A-algebra")]
    AAlgebra,
    #[serde(rename = "girale")]
    Girale,
}

impl ClassTag {
    pub const ALL: [ClassTag; 5] = [
        ClassTag::Crl,
        ClassTag::Prl,
        ClassTag::BoundedPrl,
        ClassTag::AAlgebra,
        ClassTag::Girale,
    ];

    pub fn required_signature(self) -> Signature {
        match self {
            ClassTag::Crl => Signature::EMPTY,
            ClassTag::Prl => Signature {
                zero: true,
                ..Signature::EMPTY
            },
            ClassTag::BoundedPrl | ClassTag::AAlgebra => Signature::MALL,
            ClassTag::Girale => Signature::FULL,
        }
    }

    pub fn law_families(self) -> Vec<LawFamily> {
        let mut fams = vec![LawFamily::Lattice, LawFamily::Monoid, LawFamily::Residuation];
        if matches!(self, ClassTag::BoundedPrl | ClassTag::AAlgebra | ClassTag::Girale) {
            fams.push(LawFamily::Bounds);
        }
        if matches!(self, ClassTag::AAlgebra | ClassTag::Girale) {
            fams.push(LawFamily::Negation);
        }
        if self == ClassTag::Girale {
            fams.push(LawFamily::Bang);
        }
        fams
    }

    /// Strongest class whose signature is contained in `sig`.
    pub fn strongest_for(sig: Signature) -> ClassTag {
        if Signature::FULL.is_subset_of(&sig) {
            ClassTag::Girale
        } else if Signature::MALL.is_subset_of(&sig) {
            ClassTag::AAlgebra
        } else if sig.zero {
            ClassTag::Prl
        } else {
            ClassTag::Crl
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ClassTag::Crl => "CRL",
            ClassTag::Prl => "PRL",
            ClassTag::BoundedPrl => "boundedPRL",
            ClassTag::AAlgebra => "A-algebra",
            ClassTag::Girale => "girale",
        }
    }
}

impl std::str::FromStr for ClassTag {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "CRL" | "crl" => Ok(ClassTag::Crl),
            "PRL" | "prl" => Ok(ClassTag::Prl),
            "boundedPRL" | "bounded-prl" => Ok(ClassTag::BoundedPrl),
            "A-algebra" | "a-algebra" | "A" => Ok(ClassTag::AAlgebra),
            "girale" | "G" => Ok(ClassTag::Girale),
            other => Err(format!("unknown class `{other}`")),
        }
    }
}

/// Groups of laws checked together.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum LawFamily {
    Lattice,
    Monoid,
    Residuation,
    /// `⊥ ≤ a` and `a ≤ ⊤` for whichever bounds are present.
    Bounds,
    /// `(a → 0) → 0 = a` and `a → ¬b = b → ¬a`.
    Negation,
    /// (G1)–(G4).
    Bang,
}

impl LawFamily {
    /// Law families meaningful for the symbols present in `sig`.
    pub fn for_signature(sig: Signature) -> Vec<LawFamily> {
        let mut fams = vec![LawFamily::Lattice, LawFamily::Monoid, LawFamily::Residuation];
        if sig.has_bounds() {
            fams.push(LawFamily::Bounds);
        }
        if sig.zero {
            fams.push(LawFamily::Negation);
        }
        if sig.bang {
            fams.push(LawFamily::Bang);
        }
        fams
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Law {
    MeetIdempotent,
    MeetCommutative,
    MeetAssociative,
    JoinIdempotent,
    JoinCommutative,
    JoinAssociative,
    AbsorptionMeetJoin,
    AbsorptionJoinMeet,
    MultCommutative,
    MultAssociative,
    MultUnit,
    Residuation,
    BotLeast,
    TopGreatest,
    NegationConstant,
    Contraposition,
    G1,
    G2,
    G3,
    G4,
}

impl fmt::Display for Law {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Law::MeetIdempotent => "a∧a = a",
            Law::MeetCommutative => "a∧b = b∧a",
            Law::MeetAssociative => "(a∧b)∧c = a∧(b∧c)",
            Law::JoinIdempotent => "a∨a = a",
            Law::JoinCommutative => "a∨b = b∨a",
            Law::JoinAssociative => "(a∨b)∨c = a∨(b∨c)",
            Law::AbsorptionMeetJoin => "a∧(a∨b) = a",
            Law::AbsorptionJoinMeet => "a∨(a∧b) = a",
            Law::MultCommutative => "a·b = b·a",
            Law::MultAssociative => "(a·b)·c = a·(b·c)",
            Law::MultUnit => "a·1 = a",
            Law::Residuation => "a·b ≤ c iff a ≤ b→c",
            Law::BotLeast => "⊥ ≤ a",
            Law::TopGreatest => "a ≤ ⊤",
            Law::NegationConstant => "(a→0)→0 = a",
            Law::Contraposition => "a→¬b = b→¬a",
            Law::G1 => "(G1) !1 = 1",
            Law::G2 => "(G2) !a ≤ a∧1",
            Law::G3 => "(G3) !a·!b = !(a∧b)",
            Law::G4 => "(G4) !!a = !a",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Violation {
    pub law: Law,
    pub witness: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassReport {
    pub families: Vec<LawFamily>,
    pub violations: Vec<Violation>,
}

impl ClassReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violated(&self, law: Law) -> Option<&Violation> {
        self.violations.iter().find(|v| v.law == law)
    }
}

pub fn check_class(a: &FiniteAlgebra, tag: ClassTag) -> Result<ClassReport, AlgebraError> {
    let needed = tag.required_signature();
    if !needed.is_subset_of(&a.signature()) {
        return Err(AlgebraError::SignatureMismatch(format!(
            "class {} needs {needed}, algebra has {}",
            tag.name(),
            a.signature()
        )));
    }
    check_laws(a, &tag.law_families())
}

/// Checks every law of the given families on every tuple, reporting all
/// violations.
pub fn check_laws(a: &FiniteAlgebra, families: &[LawFamily]) -> Result<ClassReport, AlgebraError> {
    let mut v = Vec::new();
    let mut fail = |law: Law, witness: &[usize]| {
        v.push(Violation {
            law,
            witness: witness.to_vec(),
        })
    };
    let els = a.elements();
    for fam in families {
        match fam {
            LawFamily::Lattice => {
                for x in els.clone() {
                    if a.meet(x, x) != x {
                        fail(Law::MeetIdempotent, &[x]);
                    }
                    if a.join(x, x) != x {
                        fail(Law::JoinIdempotent, &[x]);
                    }
                    for y in els.clone() {
                        if a.meet(x, y) != a.meet(y, x) {
                            fail(Law::MeetCommutative, &[x, y]);
                        }
                        if a.join(x, y) != a.join(y, x) {
                            fail(Law::JoinCommutative, &[x, y]);
                        }
                        if a.meet(x, a.join(x, y)) != x {
                            fail(Law::AbsorptionMeetJoin, &[x, y]);
                        }
                        if a.join(x, a.meet(x, y)) != x {
                            fail(Law::AbsorptionJoinMeet, &[x, y]);
                        }
                        for z in els.clone() {
                            if a.meet(a.meet(x, y), z) != a.meet(x, a.meet(y, z)) {
                                fail(Law::MeetAssociative, &[x, y, z]);
                            }
                            if a.join(a.join(x, y), z) != a.join(x, a.join(y, z)) {
                                fail(Law::JoinAssociative, &[x, y, z]);
                            }
                        }
                    }
                }
            }
            LawFamily::Monoid => {
                for x in els.clone() {
                    if a.mult(x, a.one()) != x {
                        fail(Law::MultUnit, &[x]);
                    }
                    for y in els.clone() {
                        if a.mult(x, y) != a.mult(y, x) {
                            fail(Law::MultCommutative, &[x, y]);
                        }
                        for z in els.clone() {
                            if a.mult(a.mult(x, y), z) != a.mult(x, a.mult(y, z)) {
                                fail(Law::MultAssociative, &[x, y, z]);
                            }
                        }
                    }
                }
            }
            LawFamily::Residuation => {
                for x in els.clone() {
                    for y in els.clone() {
                        for z in els.clone() {
                            if a.leq(a.mult(x, y), z) != a.leq(x, a.imp(y, z)) {
                                fail(Law::Residuation, &[x, y, z]);
                            }
                        }
                    }
                }
            }
            LawFamily::Bounds => {
                for x in els.clone() {
                    if let Some(b) = a.bot() {
                        if !a.leq(b, x) {
                            fail(Law::BotLeast, &[x]);
                        }
                    }
                    if let Some(t) = a.top() {
                        if !a.leq(x, t) {
                            fail(Law::TopGreatest, &[x]);
                        }
                    }
                }
            }
            LawFamily::Negation => {
                let zero = a.zero().ok_or_else(|| {
                    AlgebraError::SignatureMismatch("negation laws need the constant 0".into())
                })?;
                let neg = |x: usize| a.imp(x, zero);
                for x in els.clone() {
                    if neg(neg(x)) != x {
                        fail(Law::NegationConstant, &[x]);
                    }
                    for y in els.clone() {
                        if a.imp(x, neg(y)) != a.imp(y, neg(x)) {
                            fail(Law::Contraposition, &[x, y]);
                        }
                    }
                }
            }
            LawFamily::Bang => {
                let bang = a.bang_table().ok_or_else(|| {
                    AlgebraError::SignatureMismatch("(G1)-(G4) need the operation !".into())
                })?;
                if bang[a.one()] != a.one() {
                    fail(Law::G1, &[a.one()]);
                }
                for x in els.clone() {
                    if !a.leq(bang[x], a.meet(x, a.one())) {
                        fail(Law::G2, &[x]);
                    }
                    if bang[bang[x]] != bang[x] {
                        fail(Law::G4, &[x]);
                    }
                    for y in els.clone() {
                        if a.mult(bang[x], bang[y]) != bang[a.meet(x, y)] {
                            fail(Law::G3, &[x, y]);
                        }
                    }
                }
            }
        }
    }
    Ok(ClassReport {
        families: families.to_vec(),
        violations: v,
    })
}

/// `a → c = max {b : a·b ≤ c}` for every pair, or the first pair where the
/// maximum does not exist.
pub fn residuals_from_mult(meet: &Table, mult: &Table) -> Result<Table, AlgebraError> {
    let n = meet.size();
    let leq = |x: usize, y: usize| meet.get(x, y) == x;
    let mut data = Vec::with_capacity(n * n);
    for a in 0..n {
        for c in 0..n {
            let candidates: Vec<usize> = (0..n).filter(|&b| leq(mult.get(a, b), c)).collect();
            match candidates.iter().find(|&&m| candidates.iter().all(|&b| leq(b, m))) {
                Some(&m) => data.push(m),
                None => {
                    let maximal = candidates
                        .iter()
                        .copied()
                        .filter(|&m| !candidates.iter().any(|&b| b != m && leq(m, b)))
                        .collect();
                    return Err(AlgebraError::NotResiduated { a, c, maximal });
                }
            }
        }
    }
    Ok(Table { n, data })
}

/// Expands an A-algebra whose elements below 1 are multiplicatively idempotent
/// by `!a = a ∧ 1`.
pub fn girale_expand(a: &FiniteAlgebra) -> Result<FiniteAlgebra, AlgebraError> {
    let report = check_class(a, ClassTag::AAlgebra)?;
    if let Some(v) = report.violations.first() {
        return Err(AlgebraError::Precondition {
            law: v.law.to_string(),
            witness: v.witness.clone(),
        });
    }
    let one = a.one();
    if let Some(x) = a.elements().find(|&x| {
        let m = a.meet(x, one);
        a.mult(m, m) != m
    }) {
        return Err(AlgebraError::Precondition {
            law: "(a∧1)² = a∧1".into(),
            witness: vec![x],
        });
    }
    let bang = a.elements().map(|x| a.meet(x, one)).collect();
    a.clone().with_bang(bang)
}

/// The negative cone `{a : a ≤ 1}` with residual `(a → b) ∧ 1`, as a CRL.
pub fn negative_cone(a: &FiniteAlgebra) -> Result<FiniteAlgebra, AlgebraError> {
    let report = check_class(a, ClassTag::Crl)?;
    if let Some(v) = report.violations.first() {
        return Err(AlgebraError::Precondition {
            law: v.law.to_string(),
            witness: v.witness.clone(),
        });
    }
    let one = a.one();
    let universe: Vec<usize> = a.elements().filter(|&x| a.leq(x, one)).collect();
    let mut index = vec![usize::MAX; a.size()];
    for (i, &x) in universe.iter().enumerate() {
        index[x] = i;
    }
    let k = universe.len();
    let lift = |f: &dyn Fn(usize, usize) -> usize| {
        Table::from_fn(k, |i, j| index[f(universe[i], universe[j])])
    };
    let meet = lift(&|x, y| a.meet(x, y));
    let join = lift(&|x, y| a.join(x, y));
    let mult = lift(&|x, y| a.mult(x, y));
    let imp = lift(&|x, y| a.meet(a.imp(x, y), one));
    let names = universe.iter().map(|&x| a.element_name(x)).collect();
    FiniteAlgebra::new(meet, join, mult, imp, index[one])?.with_names(names)
}

/// An equivalence relation on `0..n`, stored as canonical block labels
/// (blocks numbered in order of their least element).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Partition(Vec<usize>);

impl Partition {
    pub fn discrete(n: usize) -> Partition {
        Partition((0..n).collect())
    }

    pub fn total(n: usize) -> Partition {
        Partition(vec![0; n])
    }

    /// Partition from arbitrary block labels.
    pub fn from_labels(labels: &[usize]) -> Partition {
        let mut renumber = BTreeMap::new();
        Partition(
            labels
                .iter()
                .map(|l| {
                    let next = renumber.len();
                    *renumber.entry(*l).or_insert(next)
                })
                .collect(),
        )
    }

    pub fn labels(&self) -> &[usize] {
        &self.0
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.0[a] == self.0[b]
    }

    pub fn block_count(&self) -> usize {
        self.0.iter().max().map(|m| m + 1).unwrap_or(0)
    }

    pub fn blocks(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.block_count()];
        for (x, &l) in self.0.iter().enumerate() {
            out[l].push(x);
        }
        out
    }

    pub fn is_discrete(&self) -> bool {
        self.block_count() == self.0.len()
    }

    pub fn is_total(&self) -> bool {
        self.block_count() <= 1
    }

    pub fn meet(&self, other: &Partition) -> Partition {
        let pairs: Vec<(usize, usize)> = self.0.iter().copied().zip(other.0.iter().copied()).collect();
        let mut ids = BTreeMap::new();
        let labels: Vec<usize> = pairs
            .iter()
            .map(|p| {
                let next = ids.len();
                *ids.entry(*p).or_insert(next)
            })
            .collect();
        Partition::from_labels(&labels)
    }

    pub fn join(&self, other: &Partition) -> Partition {
        let mut uf = UnionFind::new(self.0.len());
        for p in [self, other] {
            let mut first = BTreeMap::new();
            for (x, &l) in p.0.iter().enumerate() {
                let r = *first.entry(l).or_insert(x);
                uf.union(r, x);
            }
        }
        uf.partition()
    }

    /// Whether `self` refines `other`.
    pub fn leq(&self, other: &Partition) -> bool {
        self.0.iter().enumerate().all(|(x, _)| {
            self.0
                .iter()
                .enumerate()
                .skip(x + 1)
                .all(|(y, _)| !self.related(x, y) || other.related(x, y))
        })
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        true
    }

    fn partition(&mut self) -> Partition {
        let n = self.parent.len();
        let labels: Vec<usize> = (0..n).map(|x| self.find(x)).collect();
        Partition::from_labels(&labels)
    }
}

/// Congruence generated by a set of pairs.
///
/// Every pair that merges two blocks is pushed through all basic unary
/// translations; pairs inside an existing block follow by transitivity.
pub fn generate_congruence(a: &FiniteAlgebra, pairs: &[(usize, usize)]) -> Partition {
    let n = a.size();
    let mut uf = UnionFind::new(n);
    let mut work: Vec<(usize, usize)> = pairs.to_vec();
    let ops = a.binary_ops();
    while let Some((x, y)) = work.pop() {
        if !uf.union(x, y) {
            continue;
        }
        for (t, commutative) in ops {
            for z in 0..n {
                work.push((t.get(x, z), t.get(y, z)));
                if !commutative {
                    work.push((t.get(z, x), t.get(z, y)));
                }
            }
        }
        if let Some(b) = a.bang_table() {
            work.push((b[x], b[y]));
        }
    }
    uf.partition()
}

/// Nontrivial with no congruences besides Δ and ∇. Exits at the first
/// principal congruence that is not total.
pub fn is_simple(a: &FiniteAlgebra) -> bool {
    if a.is_trivial() {
        return false;
    }
    let n = a.size();
    // Every principal congruence must be ∇; Cg(x,y) ⊆ Cg(x,z) ∨ Cg(z,y), so
    // checking pairs against a fixed element suffices.
    (1..n).all(|y| generate_congruence(a, &[(0, y)]).is_total())
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceSet {
    size: usize,
    partitions: Vec<Partition>,
}

impl CongruenceSet {
    pub fn partitions(&self) -> &[Partition] {
        &self.partitions
    }

    pub fn len(&self) -> usize {
        self.partitions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.partitions.is_empty()
    }

    pub fn is_simple(&self) -> bool {
        self.size > 1 && self.partitions.len() == 2
    }

    /// Δ is meet-irreducible. The trivial algebra counts as FSI.
    pub fn is_fsi(&self) -> bool {
        if self.size <= 1 {
            return true;
        }
        let proper: Vec<&Partition> = self.partitions.iter().filter(|p| !p.is_discrete()).collect();
        proper.iter().enumerate().all(|(i, p)| {
            proper[i + 1..]
                .iter()
                .all(|q| !p.meet(q).is_discrete())
        })
    }

    pub fn contains(&self, p: &Partition) -> bool {
        self.partitions.contains(p)
    }
}

/// All congruences, as the join-closure of the principal congruences together
/// with Δ. Ordered by decreasing block count (Δ first, ∇ last).
pub fn congruence_set(a: &FiniteAlgebra, limits: &Limits) -> Result<CongruenceSet, AlgebraError> {
    let n = a.size();
    if n > limits.max_algebra {
        return Err(AlgebraError::Capacity {
            what: "algebra",
            needed: n,
            limit: limits.max_algebra,
        });
    }
    let mut set: BTreeSet<Partition> = BTreeSet::new();
    set.insert(Partition::discrete(n));
    let mut principals = BTreeSet::new();
    for x in 0..n {
        for y in x + 1..n {
            principals.insert(generate_congruence(a, &[(x, y)]));
        }
    }
    let principals: Vec<Partition> = principals.into_iter().collect();
    let mut frontier: Vec<Partition> = principals.clone();
    set.extend(principals.iter().cloned());
    while let Some(p) = frontier.pop() {
        for q in &principals {
            let j = p.join(q);
            if set.insert(j.clone()) {
                frontier.push(j);
            }
        }
    }
    let mut partitions: Vec<Partition> = set.into_iter().collect();
    partitions.sort_by(|p, q| q.block_count().cmp(&p.block_count()).then(p.cmp(q)));
    Ok(CongruenceSet { size: n, partitions })
}

/// Whether a partition is compatible with every operation.
pub fn is_congruence(a: &FiniteAlgebra, p: &Partition) -> bool {
    let n = a.size();
    for x in 0..n {
        for y in 0..n {
            if !p.related(x, y) {
                continue;
            }
            for (t, _) in a.binary_ops() {
                for z in 0..n {
                    if !p.related(t.get(x, z), t.get(y, z)) || !p.related(t.get(z, x), t.get(z, y)) {
                        return false;
                    }
                }
            }
            if let Some(b) = a.bang_table() {
                if !p.related(b[x], b[y]) {
                    return false;
                }
            }
        }
    }
    true
}

/// A map between algebras; validity is checked against a concrete pair of
/// algebras with [`AlgHom::validate`].
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AlgHom {
    map: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, Error)]
#[error("{operation} not preserved at {witness:?}")]
pub struct HomViolation {
    pub operation: String,
    pub witness: Vec<usize>,
}

impl AlgHom {
    pub fn from_map(map: Vec<usize>) -> AlgHom {
        AlgHom { map }
    }

    pub fn identity(n: usize) -> AlgHom {
        AlgHom { map: (0..n).collect() }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, x: usize) -> usize {
        self.map[x]
    }

    pub fn is_injective(&self) -> bool {
        let s: HashSet<_> = self.map.iter().collect();
        s.len() == self.map.len()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &AlgHom) -> AlgHom {
        AlgHom {
            map: self.map.iter().map(|&x| other.apply(x)).collect(),
        }
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.map.iter().copied().collect()
    }

    /// Preservation of every operation and constant in the common signature.
    pub fn validate(&self, src: &FiniteAlgebra, tgt: &FiniteAlgebra) -> Result<(), HomViolation> {
        if self.map.len() != src.size() {
            return Err(HomViolation {
                operation: format!("domain size ({} != {})", self.map.len(), src.size()),
                witness: vec![],
            });
        }
        if let Some(x) = self.map.iter().position(|&y| y >= tgt.size()) {
            return Err(HomViolation {
                operation: "range".into(),
                witness: vec![x],
            });
        }
        let h = |x: usize| self.map[x];
        let common = src.signature().intersect(&tgt.signature());
        for c in [Constant::One, Constant::Zero, Constant::Bot, Constant::Top] {
            if !common.has_constant(c) {
                continue;
            }
            let (s, t) = (src.constant(c).expect("in signature"), tgt.constant(c).expect("in signature"));
            if h(s) != t {
                return Err(HomViolation {
                    operation: format!("constant {c:?}"),
                    witness: vec![s],
                });
            }
        }
        let binary: [(&str, &Table, &Table); 4] = [
            ("meet", &src.meet, &tgt.meet),
            ("join", &src.join, &tgt.join),
            ("mult", &src.mult, &tgt.mult),
            ("imp", &src.imp, &tgt.imp),
        ];
        for x in src.elements() {
            for y in src.elements() {
                for (name, s, t) in &binary {
                    if h(s.get(x, y)) != t.get(h(x), h(y)) {
                        return Err(HomViolation {
                            operation: (*name).to_string(),
                            witness: vec![x, y],
                        });
                    }
                }
            }
            if common.bang {
                let (sb, tb) = (src.bang_table().expect("bang"), tgt.bang_table().expect("bang"));
                if h(sb[x]) != tb[h(x)] {
                    return Err(HomViolation {
                        operation: "bang".into(),
                        witness: vec![x],
                    });
                }
            }
        }
        Ok(())
    }
}

/// All homomorphisms `a → b` (optionally only embeddings), in lexicographic
/// order of their maps.
pub fn enumerate_homs(
    a: &FiniteAlgebra,
    b: &FiniteAlgebra,
    injective_only: bool,
    limits: &Limits,
) -> Result<Vec<AlgHom>, AlgebraError> {
    if a.signature() != b.signature() {
        return Err(AlgebraError::SignatureMismatch(format!(
            "{} vs {}",
            a.signature(),
            b.signature()
        )));
    }
    for (what, n) in [("source algebra", a.size()), ("target algebra", b.size())] {
        if n > limits.max_algebra {
            return Err(AlgebraError::Capacity {
                what,
                needed: n,
                limit: limits.max_algebra,
            });
        }
    }
    let mut partial = vec![None; a.size()];
    let mut forced = vec![(a.one(), b.one())];
    for c in [Constant::Zero, Constant::Bot, Constant::Top] {
        if let (Some(s), Some(t)) = (a.constant(c), b.constant(c)) {
            forced.push((s, t));
        }
    }
    let mut out = Vec::new();
    let search = HomSearch { a, b, injective_only };
    if let Some(p) = search.assign(&mut partial, &forced) {
        search.search(p, &mut out);
    }
    out.sort();
    Ok(out)
}

struct HomSearch<'a> {
    a: &'a FiniteAlgebra,
    b: &'a FiniteAlgebra,
    injective_only: bool,
}

impl HomSearch<'_> {
    /// Adds the assignments and everything they force; `None` on conflict.
    fn assign(&self, partial: &mut [Option<usize>], new: &[(usize, usize)]) -> Option<Vec<Option<usize>>> {
        let mut h = partial.to_vec();
        let mut used: Vec<bool> = vec![false; self.b.size()];
        for v in h.iter().flatten() {
            used[*v] = true;
        }
        let mut work: Vec<(usize, usize)> = new.to_vec();
        let mut assigned: Vec<usize> = (0..h.len()).filter(|&x| h[x].is_some()).collect();
        let ops_a = self.a.binary_ops();
        let ops_b = self.b.binary_ops();
        while let Some((x, v)) = work.pop() {
            match h[x] {
                Some(w) if w == v => continue,
                Some(_) => return None,
                None => {}
            }
            if self.injective_only && used[v] {
                return None;
            }
            h[x] = Some(v);
            used[v] = true;
            assigned.push(x);
            if let (Some(ba), Some(bb)) = (self.a.bang_table(), self.b.bang_table()) {
                work.push((ba[x], bb[v]));
            }
            for &y in &assigned {
                let w = h[y].expect("assigned");
                for ((ta, _), (tb, _)) in ops_a.iter().zip(ops_b.iter()) {
                    work.push((ta.get(x, y), tb.get(v, w)));
                    work.push((ta.get(y, x), tb.get(w, v)));
                }
            }
        }
        Some(h)
    }

    fn search(&self, h: Vec<Option<usize>>, out: &mut Vec<AlgHom>) {
        match h.iter().position(|v| v.is_none()) {
            None => out.push(AlgHom {
                map: h.into_iter().map(|v| v.expect("complete")).collect(),
            }),
            Some(x) => {
                for v in self.b.elements() {
                    let mut base = h.clone();
                    if let Some(next) = self.assign(&mut base, &[(x, v)]) {
                        self.search(next, out);
                    }
                }
            }
        }
    }
}

/// JSON algebra format.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraJson {
    pub size: usize,
    #[serde(default)]
    pub signature: Vec<String>,
    pub meet: Vec<Vec<usize>>,
    pub join: Vec<Vec<usize>>,
    pub mult: Vec<Vec<usize>>,
    pub imp: Vec<Vec<usize>>,
    pub one: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub zero: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub top: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bang: Option<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub names: Option<Vec<String>>,
}

impl From<&FiniteAlgebra> for AlgebraJson {
    fn from(a: &FiniteAlgebra) -> Self {
        AlgebraJson {
            size: a.size(),
            signature: a.signature().symbols().into_iter().map(String::from).collect(),
            meet: a.meet.rows(),
            join: a.join.rows(),
            mult: a.mult.rows(),
            imp: a.imp.rows(),
            one: a.one,
            zero: a.zero,
            bot: a.bot,
            top: a.top,
            bang: a.bang.clone(),
            names: a.names.clone(),
        }
    }
}

impl TryFrom<AlgebraJson> for FiniteAlgebra {
    type Error = AlgebraError;

    fn try_from(j: AlgebraJson) -> Result<Self, Self::Error> {
        let sig = Signature::from_symbols(&j.signature).map_err(AlgebraError::Shape)?;
        let present = Signature {
            zero: j.zero.is_some(),
            bot: j.bot.is_some(),
            top: j.top.is_some(),
            bang: j.bang.is_some(),
        };
        if sig != present {
            return Err(AlgebraError::SignatureMismatch(format!(
                "declared signature {sig} but fields present for {present}"
            )));
        }
        let n = j.size;
        let mut a = FiniteAlgebra::new(
            Table::from_rows(j.meet, n, "meet")?,
            Table::from_rows(j.join, n, "join")?,
            Table::from_rows(j.mult, n, "mult")?,
            Table::from_rows(j.imp, n, "imp")?,
            j.one,
        )?;
        if let Some(z) = j.zero {
            a = a.with_zero(z)?;
        }
        if let Some(b) = j.bot {
            a = a.with_bot(b)?;
        }
        if let Some(t) = j.top {
            a = a.with_top(t)?;
        }
        if let Some(b) = j.bang {
            a = a.with_bang(b)?;
        }
        if let Some(names) = j.names {
            a = a.with_names(names)?;
        }
        Ok(a)
    }
}

impl Serialize for FiniteAlgebra {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        AlgebraJson::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for FiniteAlgebra {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let j = AlgebraJson::deserialize(d)?;
        FiniteAlgebra::try_from(j).map_err(serde::de::Error::custom)
    }
}

/// Łukasiewicz chain with `n` elements `0 < 1/(n-1) < ... < 1`, as an
/// A-algebra (0 is the bottom, the unit is the top).
pub fn lukasiewicz_chain(n: usize) -> FiniteAlgebra {
    assert!(n >= 2, "chain needs at least two elements");
    let top = n - 1;
    let meet = Table::from_fn(n, |a, b| a.min(b));
    let join = Table::from_fn(n, |a, b| a.max(b));
    let mult = Table::from_fn(n, |a, b| (a + b).saturating_sub(top));
    let imp = Table::from_fn(n, |a, b| (top - a + b).min(top));
    FiniteAlgebra::new(meet, join, mult, imp, top)
        .and_then(|x| x.with_zero(0))
        .and_then(|x| x.with_bot(0))
        .and_then(|x| x.with_top(top))
        .and_then(|x| x.with_names((0..n).map(|i| format!("{i}/{top}")).collect()))
        .expect("well-formed chain")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lim() -> Limits {
        Limits::default()
    }

    /// Two-element chain ⊥ < 1 with multiplication = meet (Boolean algebra).
    fn two_chain() -> FiniteAlgebra {
        let meet = Table::from_fn(2, |a, b| a.min(b));
        let join = Table::from_fn(2, |a, b| a.max(b));
        let imp = residuals_from_mult(&meet, &meet).unwrap();
        FiniteAlgebra::new(meet.clone(), join, meet, imp, 1).unwrap()
    }

    #[test]
    fn two_chain_residual_by_brute_force() {
        // max {b : ⊥·b ≤ ⊥} over the two candidates is 1.
        let a = two_chain();
        assert_eq!(a.imp(0, 0), 1);
        assert_eq!(a.imp(1, 0), 0);
        assert!(check_class(&a, ClassTag::Crl).unwrap().passed());
    }

    #[test]
    fn not_residuated_reports_candidates() {
        // Diamond ⊥ < p, q < ⊤ with a multiplication whose candidate set for
        // (⊤, ⊥) is {p, q} plus ⊥: no maximum.
        let order = |a: usize, b: usize| a == b || a == 0 || b == 3;
        let meet = Table::from_fn(4, |a, b| {
            if order(a, b) {
                a
            } else if order(b, a) {
                b
            } else {
                0
            }
        });
        // x·y = ⊤ except when a factor is ⊥, or one factor is ⊤ and the other p/q.
        let mult = Table::from_fn(4, |a, b| match (a, b) {
            (0, _) | (_, 0) => 0,
            (3, 1) | (1, 3) | (3, 2) | (2, 3) => 0,
            _ => 3,
        });
        match residuals_from_mult(&meet, &mult) {
            Err(AlgebraError::NotResiduated { maximal, .. }) => assert_eq!(maximal, vec![1, 2]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn trivial_algebra_passes_every_class() {
        let t = FiniteAlgebra::trivial(Signature::FULL);
        for tag in ClassTag::ALL {
            assert!(check_class(&t, tag).unwrap().passed());
        }
        let cs = congruence_set(&t, &lim()).unwrap();
        assert_eq!(cs.len(), 1);
        assert!(cs.is_fsi());
        assert!(!cs.is_simple());
        assert!(!is_simple(&t));
    }

    #[test]
    fn signature_mismatch_is_an_error() {
        let a = two_chain();
        assert!(matches!(
            check_class(&a, ClassTag::Girale),
            Err(AlgebraError::SignatureMismatch(_))
        ));
    }

    #[test]
    fn lukasiewicz_chain_is_not_girale_expandable() {
        let l4 = lukasiewicz_chain(4);
        assert!(check_class(&l4, ClassTag::AAlgebra).unwrap().passed());
        // 1/3 · 1/3 = 0 ≠ 1/3.
        match girale_expand(&l4) {
            Err(AlgebraError::Precondition { witness, .. }) => assert_eq!(witness, vec![1]),
            other => panic!("{other:?}"),
        }
        let l2 = lukasiewicz_chain(2);
        let g = girale_expand(&l2).unwrap();
        assert!(check_class(&g, ClassTag::Girale).unwrap().passed());
    }

    #[test]
    fn product_of_two_chains_is_not_simple() {
        let a = two_chain();
        let p = a.product(&a, &lim()).unwrap();
        assert!(check_class(&p, ClassTag::Crl).unwrap().passed());
        let cs = congruence_set(&p, &lim()).unwrap();
        assert_eq!(cs.len(), 4);
        assert!(!cs.is_fsi());
        assert!(!is_simple(&p));
        assert!(is_simple(&a));
    }

    #[test]
    fn congruence_capacity() {
        let a = two_chain();
        let small = Limits {
            max_algebra: 3,
            ..Limits::default()
        };
        let p = a.product(&a, &lim()).unwrap();
        assert!(matches!(congruence_set(&p, &small), Err(AlgebraError::Capacity { .. })));
    }

    #[test]
    fn partition_lattice_operations() {
        let p = Partition::from_labels(&[0, 0, 1, 1]);
        let q = Partition::from_labels(&[0, 1, 1, 2]);
        assert_eq!(p.join(&q), Partition::total(4));
        assert_eq!(p.meet(&q), Partition::discrete(4));
        assert!(Partition::discrete(4).leq(&p));
        assert!(!p.leq(&q));
    }

    #[test]
    fn json_round_trip_and_rejections() {
        let a = lukasiewicz_chain(3);
        let text = serde_json::to_string(&a).unwrap();
        let back: FiniteAlgebra = serde_json::from_str(&text).unwrap();
        assert_eq!(a, back);
        let mut j = AlgebraJson::from(&a);
        j.signature.pop();
        assert!(FiniteAlgebra::try_from(j).is_err());
        let mut j = AlgebraJson::from(&a);
        j.meet[0][0] = 9;
        assert!(FiniteAlgebra::try_from(j).is_err());
    }
}
