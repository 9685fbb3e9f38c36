//! Browser bindings for the demo page.
//!
//! Each export takes plain strings and returns a JSON string; failures come
//! back as `{"error": "..."}` so the page never has to catch exceptions. The
//! `*_json` functions hold the logic and are ordinary Rust.

use girale_core::algebra::{check_class, ClassTag, FiniteAlgebra, Signature};
use girale_core::amalgam::{amalgamate, verify_amalgam, Span};
use girale_core::construct::{build_r, KClassQuery};
use girale_core::formula::{Formula, Notation};
use girale_core::group::{is_prime, make_group, GroupHom, PrimeSet};
use girale_core::limits::Limits;
use girale_core::semantics::{valid, Verdict};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

/// Browser pages get a smaller budget than the command line.
fn limits() -> Limits {
    Limits {
        max_group: 24,
        max_algebra: 26,
        max_product: 1024,
    }
}

fn factors(text: &str) -> Result<Vec<u64>, String> {
    text.split(['x', ',', ' '])
        .filter(|t| !t.is_empty())
        .map(|t| match t.parse::<u64>() {
            Ok(d) if d > 0 => Ok(d),
            _ => Err(format!("`{t}` is not a positive number")),
        })
        .filter(|r| r != &Ok(1))
        .collect()
}

fn algebra(group: &str, sig: &str) -> Result<FiniteAlgebra, String> {
    let sig: Signature = sig.parse()?;
    let g = make_group(&factors(group)?, &limits()).map_err(|e| e.to_string())?;
    Ok(build_r(&g, sig, &limits()).map_err(|e| e.to_string())?.into_algebra())
}

/// Covering pairs of the lattice order and a rank per element (length of the
/// longest chain down to the least element), enough to draw a Hasse diagram.
pub fn hasse(a: &FiniteAlgebra) -> (Vec<usize>, Vec<(usize, usize)>) {
    let n = a.size();
    let lt = |x: usize, y: usize| x != y && a.leq(x, y);
    let mut edges = Vec::new();
    for x in 0..n {
        for y in 0..n {
            if lt(x, y) && !(0..n).any(|z| lt(x, z) && lt(z, y)) {
                edges.push((x, y));
            }
        }
    }
    let mut rank = vec![0; n];
    // Ranks settle after at most n rounds.
    for _ in 0..n {
        for &(x, y) in &edges {
            rank[y] = rank[y].max(rank[x] + 1);
        }
    }
    (rank, edges)
}

pub fn build_algebra_json(group: &str, sig: &str) -> Result<Value, String> {
    let a = algebra(group, sig)?;
    let (rank, edges) = hasse(&a);
    let class = ClassTag::strongest_for(a.signature());
    let passed = check_class(&a, class).map_err(|e| e.to_string())?.passed();
    Ok(json!({
        "names": a.elements().map(|x| a.element_name(x)).collect::<Vec<_>>(),
        "rank": rank,
        "edges": edges,
        "class": class.name(),
        "class_passed": passed,
        "algebra": a,
    }))
}

pub fn check_formula_json(group: &str, sig: &str, formula: &str) -> Result<Value, String> {
    let a = algebra(group, sig)?;
    let f = Formula::parse(formula, Notation::Substructural).map_err(|e| e.to_string())?;
    Ok(match valid(&a, &f).map_err(|e| e.to_string())? {
        Verdict::Holds => json!({"formula": f.to_string(), "valid": true}),
        Verdict::Fails(c) => json!({"formula": f.to_string(), "valid": false, "countermodel": c.assignment}),
    })
}

/// Amalgamates `Z_b ← Z_a → Z_c` along the first embeddings.
pub fn amalgamate_cyclic_json(a: u64, b: u64, c: u64, sig: &str) -> Result<Value, String> {
    let sig: Signature = sig.parse()?;
    let l = limits();
    let group = |n: u64| make_group(if n <= 1 { &[][..] } else { std::slice::from_ref(&n) }, &l).map_err(|e| e.to_string());
    let (ga, gb, gc) = (group(a)?, group(b)?, group(c)?);
    let f = GroupHom::enumerate(&ga, &gb, true)
        .into_iter()
        .next()
        .ok_or_else(|| format!("Z_{a} does not embed in Z_{b}"))?;
    let g = GroupHom::enumerate(&ga, &gc, true)
        .into_iter()
        .next()
        .ok_or_else(|| format!("Z_{a} does not embed in Z_{c}"))?;
    let p = (2u64..).find(|&p| is_prime(p) && !b.is_multiple_of(p) && !c.is_multiple_of(p)).expect("a prime exists");
    let q = KClassQuery::new(PrimeSet::new([p]).map_err(|e| e.to_string())?, sig).map_err(|e| e.to_string())?;
    let span = Span::from_groups(&ga, &gb, &gc, &f, &g, sig, &l).map_err(|e| e.to_string())?;
    let am = amalgamate(&span, &q, &l).map_err(|e| e.to_string())?;
    let report = verify_amalgam(&span, &am, true);
    let (rank, edges) = hasse(&am.d);
    Ok(json!({
        "d_size": am.d.size(),
        "names": am.d.elements().map(|x| am.d.element_name(x)).collect::<Vec<_>>(),
        "rank": rank,
        "edges": edges,
        "psi1": am.psi1.map().iter().map(|&x| am.d.element_name(x)).collect::<Vec<_>>(),
        "psi2": am.psi2.map().iter().map(|&x| am.d.element_name(x)).collect::<Vec<_>>(),
        "is_amalgam": report.is_amalgam(),
        "strong": report.strong(),
        "prime": p,
    }))
}

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

#[wasm_bindgen]
pub fn build_algebra(group: &str, sig: &str) -> String {
    respond(build_algebra_json(group, sig))
}

#[wasm_bindgen]
pub fn check_formula(group: &str, sig: &str, formula: &str) -> String {
    respond(check_formula_json(group, sig, formula))
}

#[wasm_bindgen]
pub fn amalgamate_cyclic(a: u32, b: u32, c: u32, sig: &str) -> String {
    respond(amalgamate_cyclic_json(a.into(), b.into(), c.into(), sig))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn z2_hasse_is_flat() {
        let v = build_algebra_json("2", "full").unwrap();
        assert_eq!(v["names"], json!(["bot", "1", "a", "top"]));
        assert_eq!(v["rank"], json!([0, 1, 1, 2]));
        assert_eq!(v["edges"].as_array().unwrap().len(), 4);
        assert_eq!(v["class"], "girale");
        assert_eq!(v["class_passed"], true);
    }

    #[test]
    fn formula_check() {
        let v = check_formula_json("2", "none", "x -> x").unwrap();
        assert_eq!(v["valid"], true);
        let v = check_formula_json("2", "none", "x -> x * x").unwrap();
        assert_eq!(v["valid"], false);
        assert_eq!(v["countermodel"]["x"], "a");
    }

    #[test]
    fn cyclic_amalgam() {
        let v = amalgamate_cyclic_json(1, 3, 5, "full").unwrap();
        assert_eq!(v["d_size"], 17);
        assert_eq!(v["is_amalgam"], true);
        assert_eq!(v["strong"], true);
    }

    #[test]
    fn errors_are_json() {
        let s = build_algebra("abc", "full");
        assert!(s.contains("error"));
        let s = amalgamate_cyclic(2, 3, 4, "full");
        assert!(s.contains("does not embed"));
        let s = check_formula("2", "full", "x ->");
        assert!(s.contains("error"));
        assert!(build_algebra("100", "full").contains("capacity"));
    }
}
