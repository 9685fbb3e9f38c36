//! Acceptance suite. Runs every criterion, prints one PASS/FAIL line each and
//! exits non-zero if any fails.

use std::collections::BTreeSet;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

use girale_core::algebra::{
    check_class, check_laws, congruence_set, enumerate_homs, is_congruence, residuals_from_mult, ClassTag, FiniteAlgebra,
    LawFamily, Partition, Signature,
};
use girale_core::amalgam::{amalgamate, span_catalog, verify_amalgam};
use girale_core::construct::{build_r, lift_embedding, member_k, restrict_embedding, KClassQuery, Membership, RAlgebra};
use girale_core::corpus::{hilbert_corpus, INTERPOLATION_FIXTURES, MUTATIONS, PROVABLE_SEQUENTS, UNPROVABLE_SEQUENTS};
use girale_core::formula::{Constant, Formula, Notation};
use girale_core::group::{abelian_catalog, check_sigma, make_group, FiniteGroup, GroupHom, PrimeSet};
use girale_core::limits::Limits;
use girale_core::proofs::{
    check_derivation, prove_sequent, scheme, sequent_catalog, sequent_countermodel, sequent_valid, validate_proof,
    Derivation, HilbertSystem, Justification, Rules, Sequent, SCHEMES,
};
use girale_core::semantics::{
    consequence, deduction_check, interpolant_search, valid, InterpolantOutcome, InterpolationMode, SearchOptions,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

macro_rules! ensure {
    ($cond:expr, $($msg:tt)*) => {
        if !$cond {
            return Err(format!($($msg)*));
        }
    };
}

fn f(text: &str) -> Formula {
    Formula::parse(text, Notation::Substructural).unwrap()
}

fn groups(max_order: u64) -> Vec<FiniteGroup> {
    abelian_catalog(max_order, &Limits::default()).unwrap()
}

fn r(g: &FiniteGroup, s: Signature) -> RAlgebra {
    build_r(g, s, &Limits::default()).unwrap()
}

fn girales(max_order: u64) -> Vec<FiniteAlgebra> {
    groups(max_order).iter().map(|g| r(g, Signature::FULL).into_algebra()).collect()
}

fn construction_fidelity() -> Outcome {
    let start = Instant::now();
    let mut count = 0;
    for g in groups(12) {
        for s in Signature::all() {
            let a = r(&g, s);
            let tag = ClassTag::strongest_for(s);
            let rep = check_class(a.algebra(), tag).map_err(|e| e.to_string())?;
            ensure!(rep.passed(), "{:?} over {s}: {:?}", g.invariant_factors(), rep.violations);
            let rep = check_laws(a.algebra(), &LawFamily::for_signature(s)).map_err(|e| e.to_string())?;
            ensure!(rep.passed(), "{:?} over {s}: {:?}", g.invariant_factors(), rep.violations);
            if s == Signature::FULL {
                let a = a.algebra();
                let bang = a.bang_table().unwrap();
                for x in a.elements() {
                    for y in a.elements() {
                        let lhs = a.mult(bang[x], bang[y]);
                        ensure!(lhs == bang[a.meet(x, y)], "!a*!b = !(a/\\b) fails at {x},{y}");
                    }
                }
            }
            count += 1;
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed <= Duration::from_secs(60), "took {elapsed:?}");
    Ok(format!("{count} algebras in {:.2?}", elapsed))
}

fn closed_forms() -> Outcome {
    let mut entries = 0usize;
    for g in groups(12) {
        for s in Signature::all() {
            let ra = r(&g, s);
            let a = ra.algebra();
            let generic = residuals_from_mult(a.meet_table(), a.mult_table()).map_err(|e| e.to_string())?;
            let top = ra.top();
            for x in a.elements() {
                for y in a.elements() {
                    let expected = if x == RAlgebra::BOT || y == top {
                        top
                    } else if x == top || y == RAlgebra::BOT {
                        RAlgebra::BOT
                    } else {
                        let (gx, gy) = (ra.group_element(x).unwrap(), ra.group_element(y).unwrap());
                        ra.element(g.op(g.inv(gx), gy))
                    };
                    ensure!(generic.get(x, y) == expected, "generic residual differs at ({x},{y})");
                    ensure!(a.imp(x, y) == expected, "stored residual differs at ({x},{y})");
                    entries += 1;
                }
            }
        }
    }
    Ok(format!("{entries} entries match"))
}

fn kernel(left: usize, right: usize) -> Partition {
    Partition::from_labels(&(0..left * right).map(|i| i / right).collect::<Vec<_>>())
}

fn simplicity() -> Outcome {
    let limits = Limits::default();
    let gs = groups(12);
    let mut algebras = 0;
    for g in &gs {
        for s in Signature::all() {
            let a = r(g, s).into_algebra();
            let cs = congruence_set(&a, &limits).map_err(|e| e.to_string())?;
            ensure!(cs.len() == 2, "{:?} over {s} has {} congruences", g.invariant_factors(), cs.len());
            algebras += 1;
        }
    }
    let big = Limits {
        max_product: 1 << 16,
        ..limits
    };
    let (mut products, mut exact) = (0, 0);
    for s in Signature::all() {
        let members: Vec<FiniteAlgebra> = gs.iter().map(|g| r(g, s).into_algebra()).collect();
        for a in &members {
            for b in &members {
                let p = a.product(b, &big).map_err(|e| e.to_string())?;
                let k = kernel(a.size(), b.size());
                ensure!(is_congruence(&p, &k), "projection kernel is not a congruence");
                ensure!(!k.is_discrete() && !k.is_total(), "projection kernel is trivial");
                if p.size() <= limits.max_algebra {
                    let cs = congruence_set(&p, &limits).map_err(|e| e.to_string())?;
                    ensure!(cs.len() == 4, "product of sizes {}x{} has {} congruences", a.size(), b.size(), cs.len());
                    exact += 1;
                }
                products += 1;
            }
        }
    }
    Ok(format!(
        "{algebras} algebras with 2 congruences; {products} products non-simple ({exact} with exactly 4 congruences)"
    ))
}

fn membership() -> Outcome {
    let limits = Limits::default();
    let z3 = make_group(&[3], &limits).unwrap();
    for s in Signature::all() {
        let a = r(&z3, s).into_algebra();
        let yes = member_k(&a, &KClassQuery::new("2".parse().unwrap(), s).unwrap(), &limits).map_err(|e| e.to_string())?;
        ensure!(matches!(yes, Membership::Yes { .. }), "R(Z3) not in K_2 over {s}");
        let no = member_k(&a, &KClassQuery::new("3".parse().unwrap(), s).unwrap(), &limits).map_err(|e| e.to_string())?;
        match no {
            Membership::No { witness, prime, .. } => {
                ensure!(!witness.is_empty() && prime == Some(3), "bad witness over {s}");
            }
            other => return Err(format!("R(Z3) in K_3 over {s}: {other:?}")),
        }
    }
    let sets = ["2", "3", "5", "7", "11", "2,3"];
    let gs = groups(12);
    let mut catalogs: Vec<BTreeSet<Vec<u64>>> = Vec::new();
    for p in sets {
        let ps: PrimeSet = p.parse().unwrap();
        let q = KClassQuery::new(ps.clone(), Signature::FULL).unwrap();
        let mut cat = BTreeSet::new();
        for g in &gs {
            let a = r(g, Signature::FULL).into_algebra();
            let m = member_k(&a, &q, &limits).map_err(|e| e.to_string())?.is_member();
            ensure!(m == check_sigma(g, &ps).passed(), "member_k and sigma disagree on {:?}", g.invariant_factors());
            if m {
                cat.insert(g.invariant_factors());
            }
        }
        catalogs.push(cat);
    }
    for i in 0..catalogs.len() {
        for j in i + 1..catalogs.len() {
            ensure!(catalogs[i] != catalogs[j], "catalogs for {} and {} coincide", sets[i], sets[j]);
        }
    }
    Ok(format!("separation for all 16 S; {} prime sets give pairwise distinct catalogs", sets.len()))
}

fn amalgamation() -> Outcome {
    let start = Instant::now();
    let limits = Limits::default();
    let (mut total, mut strong, mut trivial_spans) = (0, 0, 0);
    for p in ["2", "5", "2,5"] {
        let ps: PrimeSet = p.parse().unwrap();
        for s in Signature::all() {
            for cs in span_catalog(&ps, s, 7, &limits).map_err(|e| e.to_string())? {
                let am = amalgamate(&cs.span, &cs.query, &limits).map_err(|e| format!("{}: {e}", cs.label))?;
                let rep = verify_amalgam(&cs.span, &am, true);
                ensure!(rep.is_amalgam(), "{} over {s}: {:?}", cs.label, rep.failures().collect::<Vec<_>>());
                if cs.span.a.is_trivial() {
                    trivial_spans += 1;
                } else {
                    ensure!(rep.strong() == Some(true), "{} over {s} is not strong", cs.label);
                }
                if rep.strong() == Some(true) {
                    strong += 1;
                }
                total += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    ensure!(elapsed <= Duration::from_secs(300), "took {elapsed:?}");
    ensure!(trivial_spans > 0, "no trivial-algebra spans were generated");
    Ok(format!(
        "{total} spans amalgamated ({strong} strong, {trivial_spans} over the trivial algebra) in {elapsed:.2?}"
    ))
}

fn transport() -> Outcome {
    let limits = Limits::default();
    let gs = groups(12);
    let mut checked = 0;
    for g in &gs {
        for h in &gs {
            let homs = GroupHom::enumerate(g, h, true);
            if homs.is_empty() {
                continue;
            }
            let small = g.size() <= 6 && h.size() <= 6;
            let sigs: Vec<Signature> = if small { Signature::all() } else { vec![Signature::EMPTY, Signature::FULL] };
            for s in sigs {
                let (rg, rh) = (r(g, s), r(h, s));
                let mut lifts = BTreeSet::new();
                for alpha in &homs {
                    let beta = lift_embedding(alpha).map_err(|e| e.to_string())?;
                    beta.validate(rg.algebra(), rh.algebra()).map_err(|v| format!("lift is not a hom: {v}"))?;
                    ensure!(beta.is_injective(), "lift is not injective");
                    let back = restrict_embedding(&beta, &rg, &rh).map_err(|e| e.to_string())?;
                    ensure!(&back == alpha, "restrict(lift(a)) differs from a");
                    lifts.insert(beta);
                    checked += 1;
                }
                if small {
                    let all: BTreeSet<_> = enumerate_homs(rg.algebra(), rh.algebra(), true, &limits)
                        .map_err(|e| e.to_string())?
                        .into_iter()
                        .collect();
                    ensure!(
                        all == lifts,
                        "{:?} -> {:?} over {s}: {} embeddings but {} lifts",
                        g.invariant_factors(),
                        h.invariant_factors(),
                        all.len(),
                        lifts.len()
                    );
                }
            }
        }
    }
    Ok(format!("{checked} lifted embeddings round-trip; embeddings are exactly the lifts for |G|,|H| <= 6"))
}

fn system_for(name: &str) -> HilbertSystem {
    match name {
        "no-nec" | "no-adj" => {
            let axioms = SCHEMES
                .iter()
                .filter(|(n, _)| !n.starts_with('!'))
                .map(|(n, _)| (n.to_string(), scheme(n).unwrap()))
                .collect();
            HilbertSystem::new(
                name,
                Signature::FULL,
                axioms,
                Rules {
                    mp: true,
                    adj: name != "no-adj",
                    nec: false,
                },
            )
            .unwrap()
        }
        other => HilbertSystem::preset(other).unwrap(),
    }
}

fn hilbert_soundness() -> Outcome {
    let corpus = hilbert_corpus();
    let full = HilbertSystem::preset("LL").unwrap();
    let models = girales(6);
    let mut schemes_used = BTreeSet::new();
    let (mut mp, mut adj, mut nec) = (false, false, false);
    let mut theorems = 0;
    for e in &corpus {
        let d = e.derivation();
        let premises = e.premise_formulas();
        for sys in [&system_for(&e.system), &full] {
            let rep = check_derivation(&d, sys, &premises);
            ensure!(rep.valid, "{} rejected in {}: {rep:?}", e.name, sys.name());
        }
        for s in &d.steps {
            match &s.justification {
                Justification::Axiom { name, .. } => {
                    schemes_used.insert(name.clone());
                }
                Justification::Mp(..) => mp = true,
                Justification::Adj(..) => adj = true,
                Justification::Nec(..) => nec = true,
                Justification::Premise(_) => {}
            }
        }
        if premises.is_empty() {
            theorems += 1;
            for s in &d.steps {
                for (k, a) in models.iter().enumerate() {
                    ensure!(valid(a, &s.formula).unwrap().holds(), "{}: {} fails in girale {k}", e.name, s.formula);
                }
            }
        } else {
            let v = consequence(&models, &premises, d.conclusion().unwrap()).unwrap();
            ensure!(v.holds(), "{}: conclusion does not follow semantically", e.name);
        }
    }
    ensure!(theorems >= 50, "only {theorems} theorem derivations");
    for (name, _) in SCHEMES {
        ensure!(schemes_used.contains(name), "scheme {name} unused");
    }
    ensure!(mp && adj && nec, "not every rule is used");
    for m in MUTATIONS {
        let d = Derivation::from_json(m.steps, Notation::Substructural).map_err(|e| format!("{}: {e}", m.name))?;
        let premises: Vec<Formula> = m.premises.iter().map(|p| f(p)).collect();
        let rep = check_derivation(&d, &system_for(m.system), &premises);
        ensure!(!rep.valid, "mutation `{}` accepted", m.name);
        ensure!(rep.step == Some(m.step), "mutation `{}` rejected at {:?}, expected {}", m.name, rep.step, m.step);
        let kind = rep.reason.as_ref().map(|r| r.kind());
        ensure!(kind == Some(m.reason), "mutation `{}` rejected for {kind:?}, expected {}", m.name, m.reason);
    }
    ensure!(MUTATIONS.len() >= 20, "only {} mutations", MUTATIONS.len());
    Ok(format!(
        "{} derivations ({theorems} theorems, all {} schemes, mp/adj/nec) sound on {} girales; {} mutations rejected",
        corpus.len(),
        SCHEMES.len(),
        models.len(),
        MUTATIONS.len()
    ))
}

fn random_formula(rng: &mut ChaCha8Rng, height: usize) -> Formula {
    let vars = ["x", "y", "z"];
    if height == 0 || rng.gen_bool(0.25) {
        return if rng.gen_bool(0.8) {
            Formula::var(vars[rng.gen_range(0..vars.len())])
        } else {
            Formula::constant([Constant::One, Constant::Zero, Constant::Bot, Constant::Top][rng.gen_range(0..4)])
        };
    }
    let a = random_formula(rng, height - 1);
    match rng.gen_range(0..5) {
        0 => Formula::bang(a),
        1 => Formula::meet(a, random_formula(rng, height - 1)),
        2 => Formula::join(a, random_formula(rng, height - 1)),
        3 => Formula::mul(a, random_formula(rng, height - 1)),
        _ => Formula::imp(a, random_formula(rng, height - 1)),
    }
}

fn deduction_agreement() -> Outcome {
    let models = girales(4);
    let mut rng = ChaCha8Rng::seed_from_u64(20_261_015);
    let (mut holds, mut fails) = (0, 0);
    for i in 0..1000 {
        let gamma: Vec<Formula> = (0..rng.gen_range(0..=2)).map(|_| random_formula(&mut rng, 4)).collect();
        let phi = random_formula(&mut rng, 4);
        let psi = random_formula(&mut rng, 4);
        let rep = deduction_check(&models, &gamma, &phi, &psi).map_err(|e| e.to_string())?;
        ensure!(rep.agree(), "instance {i} disagrees: gamma {gamma:?}, phi {phi}, psi {psi}");
        if rep.with_premise.holds() {
            holds += 1;
        } else {
            fails += 1;
        }
    }
    Ok(format!("1000 instances agree on {} girales ({holds} hold, {fails} fail)", models.len()))
}

fn sequent_search() -> Outcome {
    let catalog = sequent_catalog();
    ensure!(PROVABLE_SEQUENTS.len() >= 30, "only {} provable fixtures", PROVABLE_SEQUENTS.len());
    let mut max_height = 0;
    for text in PROVABLE_SEQUENTS {
        let s = Sequent::parse(text, Notation::Substructural).unwrap();
        let p = prove_sequent(&s, 10, true)
            .map_err(|e| e.to_string())?
            .ok_or_else(|| format!("no proof of {text} at bound 10"))?;
        validate_proof(&p, true).map_err(|e| format!("{text}: {e}"))?;
        ensure!(sequent_valid(&s, &catalog).unwrap().holds(), "{text} fails semantically");
        max_height = max_height.max(p.height());
    }
    let needs_exchange = ["y, x => x * y", "x * y => y * x", "x -> y, x => y"];
    for text in needs_exchange {
        let s = Sequent::parse(text, Notation::Substructural).unwrap();
        ensure!(prove_sequent(&s, 10, false).unwrap().is_none(), "{text} provable without exchange");
    }
    for text in UNPROVABLE_SEQUENTS {
        let s = Sequent::parse(text, Notation::Substructural).unwrap();
        for b in 1..=12 {
            ensure!(prove_sequent(&s, b, true).unwrap().is_none(), "{text} proved at bound {b}");
        }
        ensure!(sequent_countermodel(&s, &catalog).unwrap().is_some(), "{text} has no countermodel");
    }
    Ok(format!(
        "{} sequents proved (max height {max_height}); {} refuted with countermodels",
        PROVABLE_SEQUENTS.len(),
        UNPROVABLE_SEQUENTS.len()
    ))
}

fn interpolation() -> Outcome {
    let models = girales(3);
    let opts = SearchOptions::default();
    let (mut found, mut exhausted) = (0, Vec::new());
    for (phi, psi) in INTERPOLATION_FIXTURES {
        let (phi, psi) = (f(phi), f(psi));
        let shared: BTreeSet<String> = phi.free_variables().intersection(&psi.free_variables()).cloned().collect();
        ensure!(!shared.is_empty(), "{phi} / {psi} share no variables");
        let guard = Formula::imp(Formula::bang(phi.clone()), Formula::bang(psi.clone()));
        ensure!(consequence(&models, &[], &guard).unwrap().holds(), "!phi -> !psi fails for {phi} / {psi}");
        for mode in [InterpolationMode::Deductive, InterpolationMode::Craig, InterpolationMode::Guarded] {
            match interpolant_search(&models, &phi, &psi, mode, 4, &opts).map_err(|e| format!("{phi} / {psi}: {e}"))? {
                InterpolantOutcome::Found { delta, certificate, .. } => {
                    ensure!(delta.free_variables().is_subset(&shared), "{delta} leaves the shared variables");
                    ensure!(certificate.verify(&models).unwrap(), "certificate for {delta} does not re-verify");
                    found += 1;
                }
                InterpolantOutcome::Exhausted { capped, .. } => exhausted.push(format!("{phi} / {psi} {mode:?} capped={capped}")),
            }
        }
    }
    ensure!(exhausted.is_empty(), "search exhausted (not refuted) on {exhausted:?}");
    Ok(format!("{found} interpolants found and re-verified over {} girales", models.len()))
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("construction fidelity", construction_fidelity),
        ("closed-form residuals", closed_forms),
        ("simplicity", simplicity),
        ("K-membership and separation", membership),
        ("amalgamation", amalgamation),
        ("embedding transport", transport),
        ("Hilbert soundness", hilbert_soundness),
        ("deduction-theorem agreement", deduction_agreement),
        ("sequent search", sequent_search),
        ("interpolation", interpolation),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(msg)
        });
        match result {
            Ok(detail) => println!("criterion {:>2} {name}: PASS ({detail})", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} {name}: FAIL ({why})", i + 1);
            }
        }
    }
    if failed > 0 {
        std::process::exit(1);
    }
}
