use girale_core::algebra::Signature;
use girale_core::construct::{build_r, member_k, KClassQuery, Membership};
use girale_core::corpus::hilbert_corpus;
use girale_core::formula::{Constant, Formula, Notation};
use girale_core::group::{check_sigma, make_group, PrimeSet};
use girale_core::limits::Limits;
use girale_core::proofs::{extract_craig, prove_sequent, sequent_catalog, sequent_valid, validate_proof, Sequent};
use proptest::prelude::*;

fn fl_formula() -> impl Strategy<Value = Formula> {
    let leaf = prop_oneof![
        4 => prop_oneof![Just("x"), Just("y"), Just("z")].prop_map(Formula::var),
        1 => Just(Formula::one()),
        1 => Just(Formula::zero()),
    ];
    leaf.prop_recursive(2, 8, 2, |inner| {
        (0..4usize, inner.clone(), inner).prop_map(|(op, a, b)| match op {
            0 => Formula::meet(a, b),
            1 => Formula::join(a, b),
            2 => Formula::mul(a, b),
            _ => Formula::imp(a, b),
        })
    })
}

fn sequent() -> impl Strategy<Value = Sequent> {
    (proptest::collection::vec(fl_formula(), 0..3), proptest::option::weighted(0.9, fl_formula()))
        .prop_map(|(a, s)| Sequent::new(a, s))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn found_proofs_validate_and_are_sound(s in sequent()) {
        let catalog = sequent_catalog();
        if let Some(p) = prove_sequent(&s, s.size().max(1), true).unwrap() {
            prop_assert!(validate_proof(&p, true).is_ok());
            prop_assert!(p.height() <= s.size().max(1));
            prop_assert!(sequent_valid(&s, &catalog).unwrap().holds(), "{} proved but refuted", s);
        }
    }

    #[test]
    fn ordered_proofs_are_exchange_proofs(s in sequent()) {
        if let Some(p) = prove_sequent(&s, s.size().max(1), false).unwrap() {
            prop_assert!(validate_proof(&p, false).is_ok());
            prop_assert!(prove_sequent(&s, s.size().max(1), true).unwrap().is_some());
        }
    }

    #[test]
    fn craig_interpolants_reverify(s in sequent(), mask in 0u8..8) {
        if let Some(p) = prove_sequent(&s, s.size().max(1), true).unwrap() {
            let left: Vec<usize> = (0..s.antecedent.len()).filter(|i| mask & (1 << i) != 0).collect();
            let c = extract_craig(&p, &left).unwrap();
            prop_assert!(c.delta.free_variables().is_subset(&c.shared));
        }
    }

    #[test]
    fn member_k_recovers_the_group(factors in prop_oneof![
        Just(vec![]), Just(vec![2]), Just(vec![3]), Just(vec![4]), Just(vec![2, 2]), Just(vec![6]),
        Just(vec![2, 4]), Just(vec![3, 3]), Just(vec![5]), Just(vec![7]),
    ], sig_bits in 0u8..16, p in prop_oneof![Just(2u64), Just(3), Just(5), Just(7)]) {
        let limits = Limits::default();
        let sig = Signature::all()[sig_bits as usize];
        let g = make_group(&factors, &limits).unwrap();
        let a = build_r(&g, sig, &limits).unwrap().into_algebra();
        let primes = PrimeSet::new([p]).unwrap();
        let m = member_k(&a, &KClassQuery::new(primes.clone(), sig).unwrap(), &limits).unwrap();
        prop_assert_eq!(m.is_member(), check_sigma(&g, &primes).passed());
        if let Membership::Yes { r, iso } = m {
            prop_assert_eq!(r.group().invariant_factors(), g.invariant_factors());
            prop_assert!(iso.validate(&a, r.algebra()).is_ok());
        }
    }
}

/// Theorems of the Hilbert corpus derived in RLe or FLe have cut-free proofs,
/// and both agree with the semantics.
#[test]
fn hilbert_sequent_semantic_agreement() {
    let catalog = sequent_catalog();
    let mut checked = 0;
    let intuitionistic = |e: &&girale_core::corpus::CorpusEntry| e.premises.is_empty() && (e.system == "RLe" || e.system == "FLe");
    for e in hilbert_corpus().iter().filter(intuitionistic) {
        let phi = e.derivation().conclusion().unwrap().clone();
        assert!(!phi.contains_bang() && !phi.constants().iter().any(|c| matches!(c, Constant::Bot | Constant::Top)));
        let s = Sequent::new(vec![], Some(phi.clone()));
        let p = prove_sequent(&s, s.size(), true).unwrap();
        assert!(p.is_some(), "{}: no cut-free proof of {phi}", e.name);
        assert!(sequent_valid(&s, &catalog).unwrap().holds(), "{}: {phi} refuted", e.name);
        checked += 1;
    }
    assert!(checked >= 30, "only {checked} fragment theorems");
}

#[test]
fn girard_and_substructural_notation_agree_on_sequents() {
    let a = Sequent::parse("x, x -o y => y", Notation::Girard).unwrap();
    let b = Sequent::parse("x, x -> y => y", Notation::Substructural).unwrap();
    assert_eq!(a, b);
}
