//! Spans and amalgams in `K^S_P`.
//!
//! Amalgams are computed on the group parts: restrict the span to the groups,
//! take the pushout of abelian groups, and lift the legs back.

use std::collections::BTreeSet;

use serde::Serialize;
use thiserror::Error;

use crate::algebra::{AlgHom, FiniteAlgebra, Signature};
use crate::construct::{build_r, lift_embedding, member_k, restrict_embedding, ConstructError, KClassQuery, Membership, RAlgebra};
use crate::group::{abelian_catalog, check_sigma, make_group, pushout, FiniteGroup, GroupError, GroupHom, PrimeSet};
use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AmalgamError {
    #[error(transparent)]
    Construct(#[from] ConstructError),
    #[error(transparent)]
    Group(#[from] GroupError),
    #[error("precondition violated: {0}")]
    Precondition(String),
}

/// Two embeddings `φ1: A → B`, `φ2: A → C`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub a: FiniteAlgebra,
    pub b: FiniteAlgebra,
    pub c: FiniteAlgebra,
    pub phi1: AlgHom,
    pub phi2: AlgHom,
}

/// Two embeddings `ψ1: B → D`, `ψ2: C → D` closing a span.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Amalgam {
    pub d: FiniteAlgebra,
    pub psi1: AlgHom,
    pub psi2: AlgHom,
}

impl Span {
    /// Checks that both legs are embeddings over one signature.
    pub fn validate(&self) -> Result<(), AmalgamError> {
        let sig = self.a.signature();
        if self.b.signature() != sig || self.c.signature() != sig {
            return Err(AmalgamError::Precondition("span algebras differ in signature".into()));
        }
        for (name, h, tgt) in [("phi1", &self.phi1, &self.b), ("phi2", &self.phi2, &self.c)] {
            h.validate(&self.a, tgt)
                .map_err(|v| AmalgamError::Precondition(format!("{name} is not a homomorphism: {v}")))?;
            if !h.is_injective() {
                return Err(AmalgamError::Precondition(format!("{name} is not injective")));
            }
        }
        Ok(())
    }

    /// The span `R^S(A) → R^S(B), R^S(C)` lifted from group embeddings.
    pub fn from_groups(
        a: &FiniteGroup,
        b: &FiniteGroup,
        c: &FiniteGroup,
        f: &GroupHom,
        g: &GroupHom,
        sig: Signature,
        limits: &Limits,
    ) -> Result<Span, AmalgamError> {
        Ok(Span {
            a: build_r(a, sig, limits)?.into_algebra(),
            b: build_r(b, sig, limits)?.into_algebra(),
            c: build_r(c, sig, limits)?.into_algebra(),
            phi1: lift_embedding(f)?,
            phi2: lift_embedding(g)?,
        })
    }
}

/// A span member brought into `R` form: its group, the algebra `R^S(G)` and
/// an embedding of the member into it (an isomorphism unless the member is
/// trivial and replaced by `R^S(1)`).
struct Normalized {
    r: RAlgebra,
    into_r: AlgHom,
}

fn normalize(x: &FiniteAlgebra, q: &KClassQuery, name: &str, limits: &Limits) -> Result<Normalized, AmalgamError> {
    match member_k(x, q, limits)? {
        Membership::Yes { r, iso } => Ok(Normalized { r, into_r: iso }),
        Membership::YesTrivial => {
            let r = build_r(&make_group(&[], limits)?, q.signature(), limits)?;
            let one = r.algebra().one();
            Ok(Normalized {
                r,
                into_r: AlgHom::from_map(vec![one]),
            })
        }
        Membership::No { sentence, witness, .. } => Err(AmalgamError::Precondition(format!(
            "{name} is not in the class: {} fails at {witness:?}",
            sentence.label()
        ))),
    }
}

/// Group hom between the group parts induced by `φ: X → Y`.
fn induced(phi: &AlgHom, x: &FiniteAlgebra, nx: &Normalized, ny: &Normalized) -> Result<GroupHom, AmalgamError> {
    if x.is_trivial() {
        return Ok(GroupHom::new(nx.r.group(), ny.r.group(), vec![ny.r.group().identity()])?);
    }
    // ι_Y ∘ φ ∘ ι_X⁻¹ is an embedding between R-algebras.
    let mut inverse = vec![0; nx.r.algebra().size()];
    for (i, &t) in nx.into_r.map().iter().enumerate() {
        inverse[t] = i;
    }
    let beta = AlgHom::from_map(inverse).then(phi).then(&ny.into_r);
    Ok(restrict_embedding(&beta, &nx.r, &ny.r)?)
}

/// Amalgamates a span in `K^S_P`.
///
/// Trivial members are replaced by `R^S(1)`. When `S` contains a bound the
/// trivial algebra only embeds into trivial algebras, so a span with trivial
/// ends is closed by the trivial algebra itself.
pub fn amalgamate(span: &Span, q: &KClassQuery, limits: &Limits) -> Result<Amalgam, AmalgamError> {
    span.validate()?;
    if span.a.signature() != q.signature() {
        return Err(AmalgamError::Precondition(format!(
            "span signature {} differs from the class signature {}",
            span.a.signature(),
            q.signature()
        )));
    }
    let na = normalize(&span.a, q, "A", limits)?;
    let nb = normalize(&span.b, q, "B", limits)?;
    let nc = normalize(&span.c, q, "C", limits)?;
    if span.b.is_trivial() && span.c.is_trivial() {
        return Ok(Amalgam {
            d: span.b.clone(),
            psi1: AlgHom::from_map(vec![0]),
            psi2: AlgHom::from_map(vec![0]),
        });
    }
    let f = induced(&span.phi1, &span.a, &na, &nb)?;
    let g = induced(&span.phi2, &span.a, &na, &nc)?;
    let po = pushout(na.r.group(), nb.r.group(), nc.r.group(), &f, &g, limits)?;
    let d = build_r(&po.group, q.signature(), limits)?;
    let psi1 = nb.into_r.then(&lift_embedding(&po.into_left)?);
    let psi2 = nc.into_r.then(&lift_embedding(&po.into_right)?);
    let amalgam = Amalgam {
        d: d.into_algebra(),
        psi1,
        psi2,
    };
    if !member_k(&amalgam.d, q, limits)?.is_member() {
        return Err(AmalgamError::Precondition(
            "pushout group fails the class sentences".into(),
        ));
    }
    Ok(amalgam)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: &'static str,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AmalgamReport {
    pub checks: Vec<Check>,
}

impl AmalgamReport {
    /// Every check except strength passed.
    pub fn is_amalgam(&self) -> bool {
        self.checks.iter().filter(|c| c.name != "strong").all(|c| c.passed)
    }

    /// Result of the strong check, when it was requested.
    pub fn strong(&self) -> Option<bool> {
        self.checks.iter().find(|c| c.name == "strong").map(|c| c.passed)
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Checks the amalgam conditions one by one; with `strong` also checks
/// `ψ1φ1[A] = ψ1[B] ∩ ψ2[C]`.
pub fn verify_amalgam(span: &Span, am: &Amalgam, strong: bool) -> AmalgamReport {
    let mut checks = Vec::new();
    let mut homs_ok = true;
    for (name, h, src) in [("psi1 homomorphism", &am.psi1, &span.b), ("psi2 homomorphism", &am.psi2, &span.c)] {
        let r = h.validate(src, &am.d);
        homs_ok &= r.is_ok();
        checks.push(match r {
            Ok(()) => Check {
                name,
                passed: true,
                witness: None,
                detail: None,
            },
            Err(v) => Check {
                name,
                passed: false,
                witness: Some(v.witness.clone()),
                detail: Some(v.operation.clone()),
            },
        });
    }
    for (name, h) in [("psi1 injective", &am.psi1), ("psi2 injective", &am.psi2)] {
        let mut seen = vec![None; am.d.size()];
        let mut witness = None;
        if h.map().iter().all(|&y| y < am.d.size()) {
            for (x, &y) in h.map().iter().enumerate() {
                match seen[y] {
                    Some(x0) => {
                        witness = Some(vec![x0, x]);
                        break;
                    }
                    None => seen[y] = Some(x),
                }
            }
        }
        checks.push(Check {
            name,
            passed: witness.is_none() && homs_ok,
            witness,
            detail: None,
        });
    }
    let commute_witness = if homs_ok {
        span.a
            .elements()
            .find(|&x| am.psi1.apply(span.phi1.apply(x)) != am.psi2.apply(span.phi2.apply(x)))
            .map(|x| vec![x])
    } else {
        None
    };
    checks.push(Check {
        name: "commutes",
        passed: homs_ok && commute_witness.is_none(),
        witness: commute_witness,
        detail: None,
    });
    if strong {
        let (w, detail) = if homs_ok {
            let common: BTreeSet<usize> = span.a.elements().map(|x| am.psi1.apply(span.phi1.apply(x))).collect();
            let meet: BTreeSet<usize> = am.psi1.image().intersection(&am.psi2.image()).copied().collect();
            match meet.symmetric_difference(&common).next() {
                Some(&d) => (Some(vec![d]), Some(format!("{} in exactly one of the two sets", am.d.element_name(d)))),
                None => (None, None),
            }
        } else {
            (None, Some("homomorphism checks failed".to_string()))
        };
        checks.push(Check {
            name: "strong",
            passed: homs_ok && w.is_none() && detail.is_none(),
            witness: w,
            detail,
        });
    }
    AmalgamReport { checks }
}

/// One span of the exhaustive catalog, with the data it was generated from.
#[derive(Debug, Clone)]
pub struct CatalogSpan {
    pub label: String,
    pub span: Span,
    pub query: KClassQuery,
}

/// All spans in `K^S_P` whose group parts have order at most `max_order`:
/// every pair of group embeddings out of every catalog group, lifted to
/// `R^S`, plus (for bound-free `S`) the spans starting at the trivial algebra.
pub fn span_catalog(primes: &PrimeSet, sig: Signature, max_order: u64, limits: &Limits) -> Result<Vec<CatalogSpan>, AmalgamError> {
    let q = KClassQuery::new(primes.clone(), sig)?;
    let groups: Vec<FiniteGroup> = abelian_catalog(max_order, limits)?
        .into_iter()
        .filter(|g| check_sigma(g, primes).passed())
        .collect();
    let label = |g: &FiniteGroup| format!("{:?}", g.invariant_factors());
    let mut out = Vec::new();
    for a in &groups {
        for b in &groups {
            let fs = GroupHom::enumerate(a, b, true);
            if fs.is_empty() {
                continue;
            }
            for c in &groups {
                let gs = GroupHom::enumerate(a, c, true);
                for (i, f) in fs.iter().enumerate() {
                    for (j, g) in gs.iter().enumerate() {
                        out.push(CatalogSpan {
                            label: format!("R{} <- R{} -> R{} [{i},{j}] S={sig}", label(b), label(a), label(c)),
                            span: Span::from_groups(a, b, c, f, g, sig, limits)?,
                            query: q.clone(),
                        });
                    }
                }
            }
        }
    }
    if !sig.has_bounds() {
        let t = FiniteAlgebra::trivial(sig);
        let ends: Vec<(String, FiniteAlgebra)> = std::iter::once(("T".to_string(), t.clone()))
            .chain(groups.iter().map(|g| {
                let r = build_r(g, sig, limits).expect("catalog group within bounds");
                (format!("R{}", label(g)), r.into_algebra())
            }))
            .collect();
        let into = |x: &FiniteAlgebra| AlgHom::from_map(vec![x.one()]);
        for (lb, b) in &ends {
            for (lc, c) in &ends {
                out.push(CatalogSpan {
                    label: format!("{lb} <- T -> {lc} S={sig}"),
                    span: Span {
                        a: t.clone(),
                        b: b.clone(),
                        c: c.clone(),
                        phi1: into(b),
                        phi2: into(c),
                    },
                    query: q.clone(),
                });
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::enumerate_homs;

    fn lim() -> Limits {
        Limits::default()
    }

    fn grp(f: &[u64]) -> FiniteGroup {
        make_group(f, &lim()).unwrap()
    }

    fn query(p: &[u64], sig: Signature) -> KClassQuery {
        KClassQuery::new(PrimeSet::new(p.iter().copied()).unwrap(), sig).unwrap()
    }

    fn group_part(d: &FiniteAlgebra, q: &KClassQuery) -> Vec<u64> {
        match member_k(d, q, &lim()).unwrap() {
            Membership::Yes { r, .. } => r.group().invariant_factors(),
            Membership::YesTrivial => vec![0],
            Membership::No { .. } => panic!("not a member"),
        }
    }

    #[test]
    fn z3_and_z5_over_trivial() {
        let (t, z3, z5) = (grp(&[]), grp(&[3]), grp(&[5]));
        let f = GroupHom::new(&t, &z3, vec![0]).unwrap();
        let g = GroupHom::new(&t, &z5, vec![0]).unwrap();
        let q = query(&[2], Signature::FULL);
        let span = Span::from_groups(&t, &z3, &z5, &f, &g, Signature::FULL, &lim()).unwrap();
        let am = amalgamate(&span, &q, &lim()).unwrap();
        assert_eq!(am.d.size(), 17);
        assert_eq!(group_part(&am.d, &q), vec![15]);
        let report = verify_amalgam(&span, &am, true);
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.strong(), Some(true));
    }

    #[test]
    fn identity_span() {
        let z3 = grp(&[3]);
        let id = GroupHom::identity(&z3);
        let q = query(&[2], Signature::EMPTY);
        let span = Span::from_groups(&z3, &z3, &z3, &id, &id, Signature::EMPTY, &lim()).unwrap();
        let am = amalgamate(&span, &q, &lim()).unwrap();
        assert_eq!(am.d.size(), 5);
        assert_eq!(am.psi1, AlgHom::identity(5));
        assert_eq!(am.psi2, AlgHom::identity(5));
        assert!(verify_amalgam(&span, &am, true).passed());
    }

    #[test]
    fn z3_into_z9() {
        let (z3, z9) = (grp(&[3]), grp(&[9]));
        let id = GroupHom::identity(&z3);
        let times3 = GroupHom::new(&z3, &z9, vec![0, 3, 6]).unwrap();
        let q = query(&[2], Signature::MALL);
        let span = Span::from_groups(&z3, &z3, &z9, &id, &times3, Signature::MALL, &lim()).unwrap();
        let am = amalgamate(&span, &q, &lim()).unwrap();
        assert_eq!(group_part(&am.d, &q), vec![9]);
        assert!(verify_amalgam(&span, &am, true).passed());
    }

    #[test]
    fn corrupted_leg_is_reported() {
        let (t, z3, z5) = (grp(&[]), grp(&[3]), grp(&[5]));
        let f = GroupHom::new(&t, &z3, vec![0]).unwrap();
        let g = GroupHom::new(&t, &z5, vec![0]).unwrap();
        let q = query(&[2], Signature::EMPTY);
        let span = Span::from_groups(&t, &z3, &z5, &f, &g, Signature::EMPTY, &lim()).unwrap();
        let mut am = amalgamate(&span, &q, &lim()).unwrap();
        let mut map = am.psi1.map().to_vec();
        // ⊥ and a; no constant is involved, so a table entry must break.
        map.swap(0, 2);
        am.psi1 = AlgHom::from_map(map);
        let report = verify_amalgam(&span, &am, true);
        let failure = report.failures().next().unwrap();
        assert_eq!(failure.name, "psi1 homomorphism");
        assert_eq!(failure.witness.as_ref().map(|w| w.len()), Some(2));
        assert!(!report.is_amalgam());
    }

    #[test]
    fn trivial_spans_without_bounds() {
        let q = query(&[2], Signature::EMPTY);
        let t = FiniteAlgebra::trivial(Signature::EMPTY);
        let r3 = build_r(&grp(&[3]), Signature::EMPTY, &lim()).unwrap().into_algebra();
        let span = Span {
            a: t.clone(),
            b: r3.clone(),
            c: t.clone(),
            phi1: AlgHom::from_map(vec![r3.one()]),
            phi2: AlgHom::from_map(vec![0]),
        };
        let am = amalgamate(&span, &q, &lim()).unwrap();
        assert_eq!(group_part(&am.d, &q), vec![3]);
        assert_eq!(verify_amalgam(&span, &am, true).strong(), Some(true));
        let span = Span {
            c: r3.clone(),
            phi2: AlgHom::from_map(vec![r3.one()]),
            ..span
        };
        let am = amalgamate(&span, &q, &lim()).unwrap();
        assert_eq!(group_part(&am.d, &q), vec![3, 3]);
        let report = verify_amalgam(&span, &am, true);
        assert!(report.is_amalgam());
        // {1} is the common image, but both legs also hit the bounds.
        assert_eq!(report.strong(), Some(false));
    }

    #[test]
    fn trivial_embeds_only_into_trivial_with_bounds() {
        let t = FiniteAlgebra::trivial(Signature::BOUNDED);
        let r3 = build_r(&grp(&[3]), Signature::BOUNDED, &lim()).unwrap().into_algebra();
        assert!(enumerate_homs(&t, &r3, true, &lim()).unwrap().is_empty());
        let span = Span {
            a: t.clone(),
            b: r3.clone(),
            c: t,
            phi1: AlgHom::from_map(vec![r3.one()]),
            phi2: AlgHom::from_map(vec![0]),
        };
        assert!(matches!(
            amalgamate(&span, &query(&[2], Signature::BOUNDED), &lim()),
            Err(AmalgamError::Precondition(_))
        ));
    }

    #[test]
    fn amalgam_is_symmetric_in_b_and_c() {
        let (z2, z4, k) = (grp(&[2]), grp(&[4]), grp(&[2, 2]));
        let q = query(&[5], Signature::EMPTY);
        for f in GroupHom::enumerate(&z2, &z4, true) {
            for g in GroupHom::enumerate(&z2, &k, true) {
                let s1 = Span::from_groups(&z2, &z4, &k, &f, &g, Signature::EMPTY, &lim()).unwrap();
                let s2 = Span::from_groups(&z2, &k, &z4, &g, &f, Signature::EMPTY, &lim()).unwrap();
                let d1 = amalgamate(&s1, &q, &lim()).unwrap().d;
                let d2 = amalgamate(&s2, &q, &lim()).unwrap().d;
                assert_eq!(group_part(&d1, &q), group_part(&d2, &q));
                assert_eq!(group_part(&d1, &q), vec![2, 4]);
            }
        }
    }

    #[test]
    fn small_catalog_amalgamates() {
        let p = PrimeSet::new([2]).unwrap();
        for sig in [Signature::EMPTY, Signature::FULL] {
            let spans = span_catalog(&p, sig, 5, &lim()).unwrap();
            assert!(!spans.is_empty());
            for cs in &spans {
                let am = amalgamate(&cs.span, &cs.query, &lim()).unwrap();
                assert!(verify_amalgam(&cs.span, &am, true).is_amalgam(), "{}", cs.label);
            }
        }
    }
}
