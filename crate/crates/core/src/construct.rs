//! The algebras `R^S(G)` built from finite abelian groups, the transport of
//! embeddings between them, and membership in the classes `K^S_P`.

use serde::Serialize;
use serde_json::{json, Value};
use thiserror::Error;

use crate::algebra::{check_class, residuals_from_mult, AlgHom, AlgebraError, ClassTag, FiniteAlgebra, LawFamily, Signature, Table};
use crate::group::{check_sigma, FiniteGroup, GroupError, GroupHom, GroupJson, PrimeSet, SigmaResult};
use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent embedding: element {element} of the group part maps to a bound")]
    Inconsistent { element: usize },
}

/// `R^S(G)` together with the group it was built from.
///
/// Layout: `⊥` is index 0, group element `g` is index `g + 1`, `⊤` is index
/// `|G| + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RAlgebra {
    group: FiniteGroup,
    signature: Signature,
    algebra: FiniteAlgebra,
}

impl RAlgebra {
    pub const BOT: usize = 0;

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn algebra(&self) -> &FiniteAlgebra {
        &self.algebra
    }

    pub fn into_algebra(self) -> FiniteAlgebra {
        self.algebra
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn top(&self) -> usize {
        self.group.size() + 1
    }

    /// Algebra index of a group element.
    pub fn element(&self, g: usize) -> usize {
        g + 1
    }

    /// Group element at an algebra index, if it is not a bound.
    pub fn group_element(&self, x: usize) -> Option<usize> {
        (x >= 1 && x <= self.group.size()).then(|| x - 1)
    }
}

/// Builds `R^S(G)`: flat order with new bounds, `⊤` absorbing on `G ∪ {⊤}`,
/// `⊥` absorbing on everything, and `→` obtained as the maximum of
/// `{b : ab ≤ c}`.
pub fn build_r(group: &FiniteGroup, sig: Signature, limits: &Limits) -> Result<RAlgebra, ConstructError> {
    limits.check_group(group.size())?;
    let n = group.size();
    let (bot, top) = (0, n + 1);
    let size = n + 2;
    let meet = Table::from_fn(size, |a, b| match () {
        _ if a == b => a,
        _ if a == top => b,
        _ if b == top => a,
        _ => bot,
    });
    let join = Table::from_fn(size, |a, b| match () {
        _ if a == b => a,
        _ if a == bot => b,
        _ if b == bot => a,
        _ => top,
    });
    let mult = Table::from_fn(size, |a, b| match () {
        _ if a == bot || b == bot => bot,
        _ if a == top || b == top => top,
        _ => group.op(a - 1, b - 1) + 1,
    });
    let imp = residuals_from_mult(&meet, &mult)?;
    let one = group.identity() + 1;
    let mut names = vec!["bot".to_string()];
    names.extend(group.names().iter().cloned());
    names.push("top".into());
    let mut alg = FiniteAlgebra::new(meet, join, mult, imp, one)?.with_names(names)?;
    if sig.zero {
        alg = alg.with_zero(one)?;
    }
    if sig.bot {
        alg = alg.with_bot(bot)?;
    }
    if sig.top {
        alg = alg.with_top(top)?;
    }
    if sig.bang {
        let bang = (0..size).map(|a| alg.meet(a, one)).collect();
        alg = alg.with_bang(bang)?;
    }
    Ok(RAlgebra {
        group: group.clone(),
        signature: sig,
        algebra: alg,
    })
}

/// The unique extension of an injective group hom `G → H` to an embedding
/// `R^S(G) → R^S(H)`. The map does not depend on `S`.
pub fn lift_embedding(alpha: &GroupHom) -> Result<AlgHom, ConstructError> {
    if !alpha.is_injective() {
        return Err(ConstructError::Precondition("group hom is not injective".into()));
    }
    let mut map = vec![RAlgebra::BOT];
    map.extend(alpha.map().iter().map(|&h| h + 1));
    map.push(alpha.target_size() + 1);
    Ok(AlgHom::from_map(map))
}

/// Restricts an embedding `R^S(G) → R^S(H)` to the group parts.
pub fn restrict_embedding(beta: &AlgHom, src: &RAlgebra, tgt: &RAlgebra) -> Result<GroupHom, ConstructError> {
    beta.validate(src.algebra(), tgt.algebra())
        .map_err(|v| ConstructError::Precondition(format!("not a homomorphism: {v}")))?;
    if !beta.is_injective() {
        return Err(ConstructError::Precondition("homomorphism is not injective".into()));
    }
    let map = src
        .group()
        .elements()
        .map(|g| {
            tgt.group_element(beta.apply(src.element(g)))
                .ok_or(ConstructError::Inconsistent { element: g })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GroupHom::new(src.group(), tgt.group(), map)?)
}

/// A class `K^S_P`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct KClassQuery {
    primes: PrimeSet,
    signature: Signature,
}

impl KClassQuery {
    pub fn new(primes: PrimeSet, signature: Signature) -> Result<KClassQuery, ConstructError> {
        if primes.is_empty() {
            return Err(ConstructError::Precondition("the prime set must be nonempty".into()));
        }
        Ok(KClassQuery { primes, signature })
    }

    pub fn primes(&self) -> &PrimeSet {
        &self.primes
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }
}

/// Which defining sentence of `K^S_P` an algebra fails.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sentence {
    /// The equational laws of the class for `S`.
    Class,
    /// A least or greatest element is missing.
    Bounds,
    /// `1 ∉ {⊥, ⊤}`.
    Unit,
    /// `x ≠ ⊥, ⊤ ⟹ x(x→1) = 1`.
    Invertible,
    /// `x, y ≠ ⊥, x ≠ y ⟹ x ∨ y = ⊤`.
    JoinFlat,
    /// `x, y ≠ ⊤, x ≠ y ⟹ x ∧ y = ⊥`.
    MeetFlat,
    /// `x ≠ ⊥ ⟹ x·⊤ = ⊤`.
    TopAbsorbs,
    /// `0 = 1`.
    ZeroIsOne,
    /// `!x = x ∧ 1`.
    BangIsMeetOne,
    /// `x^p = 1 ⟹ x = 1` for `p ∈ P`.
    Sigma,
}

impl Sentence {
    pub fn label(self) -> &'static str {
        match self {
            Sentence::Class => "class laws",
            Sentence::Bounds => "bounds exist",
            Sentence::Unit => "1 is not a bound",
            Sentence::Invertible => "(1) x(x->1) = 1",
            Sentence::JoinFlat => "(2) x v y = top",
            Sentence::MeetFlat => "(3) x ^ y = bot",
            Sentence::TopAbsorbs => "(4) x*top = top",
            Sentence::ZeroIsOne => "0 = 1",
            Sentence::BangIsMeetOne => "!x = x ^ 1",
            Sentence::Sigma => "Sigma_P",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Membership {
    /// Isomorphic to `R^S(G)`; `iso` maps the input onto [`build_r`]'s layout.
    Yes { r: RAlgebra, iso: AlgHom },
    YesTrivial,
    No {
        sentence: Sentence,
        witness: Vec<usize>,
        prime: Option<u64>,
    },
}

impl Membership {
    pub fn is_member(&self) -> bool {
        !matches!(self, Membership::No { .. })
    }

    pub fn to_json(&self, input: &FiniteAlgebra) -> Value {
        match self {
            Membership::Yes { r, iso } => json!({
                "member": true,
                "group": GroupJson::from_group(r.group()),
                "invariant_factors": r.group().invariant_factors(),
                "iso": iso.map(),
            }),
            Membership::YesTrivial => json!({"member": true, "trivial": true}),
            Membership::No { sentence, witness, prime } => json!({
                "member": false,
                "sentence": sentence,
                "label": sentence.label(),
                "witness": witness.iter().map(|&w| input.element_name(w)).collect::<Vec<_>>(),
                "prime": prime,
            }),
        }
    }
}

fn no(sentence: Sentence, witness: Vec<usize>) -> Result<Membership, ConstructError> {
    Ok(Membership::No {
        sentence,
        witness,
        prime: None,
    })
}

/// Decides `A ∈ K^S_P` by the universal sentences (1)–(4) and `Σ_P`,
/// reconstructing the group part and the isomorphism on success.
///
/// Besides (1)–(4) the unit is required to differ from both bounds: without
/// that condition the two-element Boolean algebra would satisfy (1)–(4)
/// vacuously while having no group part.
pub fn member_k(a: &FiniteAlgebra, q: &KClassQuery, limits: &Limits) -> Result<Membership, ConstructError> {
    let sig = q.signature();
    if a.signature() != sig {
        return Err(AlgebraError::SignatureMismatch(format!(
            "algebra has signature {}, query asks for {sig}",
            a.signature()
        ))
        .into());
    }
    let report = crate::algebra::check_laws(a, &LawFamily::for_signature(sig))?;
    if let Some(v) = report.violations.first() {
        return no(Sentence::Class, v.witness.clone());
    }
    if a.is_trivial() {
        return Ok(Membership::YesTrivial);
    }
    let (Some(bot), Some(top)) = (a.least(), a.greatest()) else {
        return no(Sentence::Bounds, vec![]);
    };
    let one = a.one();
    if one == bot || one == top {
        return no(Sentence::Unit, vec![one]);
    }
    if let Some(z) = a.zero() {
        if z != one {
            return no(Sentence::ZeroIsOne, vec![z]);
        }
    }
    if let Some(b) = a.bang_table() {
        if let Some(x) = a.elements().find(|&x| b[x] != a.meet(x, one)) {
            return no(Sentence::BangIsMeetOne, vec![x]);
        }
    }
    let inner: Vec<usize> = a.elements().filter(|&x| x != bot && x != top).collect();
    for &x in &inner {
        if a.mult(x, a.imp(x, one)) != one {
            return no(Sentence::Invertible, vec![x]);
        }
    }
    for x in a.elements() {
        for y in a.elements() {
            if x == y {
                continue;
            }
            if x != bot && y != bot && a.join(x, y) != top {
                return no(Sentence::JoinFlat, vec![x, y]);
            }
            if x != top && y != top && a.meet(x, y) != bot {
                return no(Sentence::MeetFlat, vec![x, y]);
            }
        }
        if x != bot && a.mult(x, top) != top {
            return no(Sentence::TopAbsorbs, vec![x]);
        }
    }

    // Group part: the elements other than the bounds, with inverse x → 1.
    let mut index = vec![usize::MAX; a.size()];
    for (i, &x) in inner.iter().enumerate() {
        index[x] = i;
    }
    let mut table = Vec::with_capacity(inner.len());
    for &x in &inner {
        let mut row = Vec::with_capacity(inner.len());
        for &y in &inner {
            let p = a.mult(x, y);
            if index[p] == usize::MAX {
                return Err(ConstructError::Precondition(format!(
                    "group part not closed at ({x},{y}) although (1)-(4) hold"
                )));
            }
            row.push(index[p]);
        }
        table.push(row);
    }
    let group = FiniteGroup::from_table(table, index[one], limits)?.with_names(
        inner.iter().map(|&x| a.element_name(x)).collect(),
    )?;
    if let SigmaResult::Fail { witness, prime } = check_sigma(&group, q.primes()) {
        return Ok(Membership::No {
            sentence: Sentence::Sigma,
            witness: vec![inner[witness]],
            prime: Some(prime),
        });
    }
    let r = build_r(&group, sig, limits)?;
    let map = a
        .elements()
        .map(|x| match () {
            _ if x == bot => RAlgebra::BOT,
            _ if x == top => r.top(),
            _ => r.element(index[x]),
        })
        .collect();
    let iso = AlgHom::from_map(map);
    iso.validate(a, r.algebra()).map_err(|v| {
        ConstructError::Precondition(format!("reconstructed isomorphism fails: {v}"))
    })?;
    Ok(Membership::Yes { r, iso })
}

/// Whether `build_r(G, S)` passes the checks of the strongest class its
/// signature supports, plus the law families of the remaining symbols.
pub fn r_class_report(r: &RAlgebra) -> Result<crate::algebra::ClassReport, ConstructError> {
    let tag = ClassTag::strongest_for(r.signature());
    let mut report = check_class(r.algebra(), tag)?;
    let extra = crate::algebra::check_laws(r.algebra(), &LawFamily::for_signature(r.signature()))?;
    report.violations.extend(extra.violations);
    Ok(report)
}
