//! Finite abelian groups given by Cayley tables.
//!
//! Besides construction and validation this module holds the finite-scale
//! amalgamation machinery for abelian groups: pushouts of injective spans,
//! subgroup enumeration and the essential-subgroup test, and the quasi-equations
//! `x^p ≈ 1 ⇒ x ≈ 1` for a finite set of primes.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::limits::Limits;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("capacity exceeded: {what} needs {needed} elements, limit is {limit}")]
    Capacity {
        what: &'static str,
        needed: usize,
        limit: usize,
    },
    #[error("invalid group: {0}")]
    Invalid(String),
    #[error("invalid homomorphism: {0}")]
    InvalidHom(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("{0} is not prime")]
    NotPrime(u64),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FiniteGroup {
    size: usize,
    table: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
    factors: Option<Vec<u64>>,
    names: Vec<String>,
}

impl FiniteGroup {
    /// Validates a Cayley table: closure, associativity, commutativity,
    /// identity and inverses.
    pub fn from_table(
        table: Vec<Vec<usize>>,
        identity: usize,
        limits: &Limits,
    ) -> Result<FiniteGroup, GroupError> {
        let n = table.len();
        if n == 0 {
            return Err(GroupError::Invalid("empty table".into()));
        }
        limits.check_group(n)?;
        if table.iter().any(|row| row.len() != n) {
            return Err(GroupError::Invalid("table is not square".into()));
        }
        if identity >= n {
            return Err(GroupError::Invalid(format!("identity {identity} out of range")));
        }
        let flat: Vec<usize> = table.into_iter().flatten().collect();
        if let Some(bad) = flat.iter().find(|&&x| x >= n) {
            return Err(GroupError::Invalid(format!("entry {bad} out of range")));
        }
        let op = |a: usize, b: usize| flat[a * n + b];
        for a in 0..n {
            if op(identity, a) != a {
                return Err(GroupError::Invalid(format!("identity law fails at {a}")));
            }
            for b in 0..n {
                if op(a, b) != op(b, a) {
                    return Err(GroupError::Invalid(format!("not commutative at ({a},{b})")));
                }
                for c in 0..n {
                    if op(op(a, b), c) != op(a, op(b, c)) {
                        return Err(GroupError::Invalid(format!(
                            "not associative at ({a},{b},{c})"
                        )));
                    }
                }
            }
        }
        let mut inverse = vec![0; n];
        for (a, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..n)
                .find(|&b| op(a, b) == identity)
                .ok_or_else(|| GroupError::Invalid(format!("{a} has no inverse")))?;
        }
        Ok(FiniteGroup {
            size: n,
            table: flat,
            identity,
            inverse,
            factors: None,
            names: (0..n).map(|i| format!("g{i}")).collect(),
        })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn op(&self, a: usize, b: usize) -> usize {
        self.table[a * self.size + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn pow(&self, a: usize, k: u64) -> usize {
        let mut acc = self.identity;
        for _ in 0..k {
            acc = self.op(acc, a);
        }
        acc
    }

    pub fn order_of(&self, a: usize) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != self.identity {
            x = self.op(x, a);
            k += 1;
        }
        k
    }

    /// Invariant factors as supplied at construction, if any.
    pub fn declared_factors(&self) -> Option<&[u64]> {
        self.factors.as_deref()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, a: usize) -> &str {
        &self.names[a]
    }

    pub fn with_names(mut self, names: Vec<String>) -> Result<FiniteGroup, GroupError> {
        if names.len() != self.size {
            return Err(GroupError::Invalid("names have wrong length".into()));
        }
        self.names = names;
        Ok(self)
    }

    pub fn elements(&self) -> impl Iterator<Item = usize> {
        0..self.size
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.size).map(|r| r.to_vec()).collect()
    }

    /// Canonical invariant factors `d1 | d2 | ... | dk`, all greater than one.
    ///
    /// Computed from the number of elements of each prime-power order, which
    /// determines a finite abelian group up to isomorphism.
    pub fn invariant_factors(&self) -> Vec<u64> {
        let n = self.size as u64;
        let orders: Vec<u64> = self.elements().map(|a| self.order_of(a)).collect();
        // For each prime p | n, the exponents e_1 >= e_2 >= ... of the p-part.
        let mut p_parts: Vec<(u64, Vec<u32>)> = Vec::new();
        for p in prime_factors(n) {
            let mut counts = Vec::new(); // counts[k-1] = |{a : a^(p^k) = 1}|
            let mut k = 1u32;
            loop {
                let pk = p.pow(k);
                let c = orders.iter().filter(|&&o| pk % o == 0).count() as u64;
                counts.push(c);
                if k > 1 && counts[k as usize - 1] == counts[k as usize - 2] {
                    counts.pop();
                    break;
                }
                k += 1;
            }
            // log_p(counts[k]) - log_p(counts[k-1]) = number of cyclic factors with exponent > k-1.
            let logs: Vec<u32> = std::iter::once(0)
                .chain(counts.iter().map(|&c| log_base(c, p)))
                .collect();
            let at_least: Vec<u32> = logs.windows(2).map(|w| w[1] - w[0]).collect();
            let mut exps = Vec::new();
            for (i, &m) in at_least.iter().enumerate() {
                let next = at_least.get(i + 1).copied().unwrap_or(0);
                for _ in 0..(m - next) {
                    exps.push(i as u32 + 1);
                }
            }
            exps.sort_unstable_by(|a, b| b.cmp(a));
            p_parts.push((p, exps));
        }
        let len = p_parts.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
        let mut factors = vec![1u64; len];
        for (p, exps) in &p_parts {
            for (i, e) in exps.iter().enumerate() {
                factors[len - 1 - i] *= p.pow(*e);
            }
        }
        factors
    }

    pub fn is_isomorphic(&self, other: &FiniteGroup) -> bool {
        self.size == other.size && self.invariant_factors() == other.invariant_factors()
    }

    /// Subgroup generated by `gens`, as a sorted element list.
    pub fn generated(&self, gens: &[usize]) -> Vec<usize> {
        let mut set: BTreeSet<usize> = BTreeSet::new();
        set.insert(self.identity);
        let mut frontier: Vec<usize> = vec![self.identity];
        while let Some(x) = frontier.pop() {
            for &g in gens {
                let y = self.op(x, g);
                if set.insert(y) {
                    frontier.push(y);
                }
            }
        }
        set.into_iter().collect()
    }

    /// All subgroups, each as a sorted element list, by closure of generated sets.
    pub fn subgroups(&self) -> Vec<Vec<usize>> {
        let trivial = vec![self.identity];
        let mut seen: HashSet<Vec<usize>> = HashSet::new();
        seen.insert(trivial.clone());
        let mut queue = vec![trivial];
        let mut out = Vec::new();
        while let Some(s) = queue.pop() {
            for g in self.elements() {
                if s.binary_search(&g).is_ok() {
                    continue;
                }
                let mut gens = s.clone();
                gens.push(g);
                let t = self.generated(&gens);
                if seen.insert(t.clone()) {
                    queue.push(t);
                }
            }
            out.push(s);
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    /// A small generating set, chosen greedily.
    pub fn generators(&self) -> Vec<usize> {
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        // Prefer elements of large order so cyclic groups get one generator.
        let mut candidates: Vec<usize> = self.elements().collect();
        candidates.sort_by_key(|&a| (std::cmp::Reverse(self.order_of(a)), a));
        for a in candidates {
            if span.binary_search(&a).is_err() {
                gens.push(a);
                span = self.generated(&gens);
            }
        }
        gens
    }

    /// Direct product, element `(b, c)` at index `b * |other| + c`.
    pub fn product(&self, other: &FiniteGroup, limits: &Limits) -> Result<FiniteGroup, GroupError> {
        let (n, m) = (self.size, other.size);
        limits.check_product(n * m)?;
        let mut table = Vec::with_capacity(n * m * n * m);
        for x in 0..n * m {
            for y in 0..n * m {
                let (b1, c1) = (x / m, x % m);
                let (b2, c2) = (y / m, y % m);
                table.push(self.op(b1, b2) * m + other.op(c1, c2));
            }
        }
        let inverse = (0..n * m)
            .map(|x| self.inv(x / m) * m + other.inv(x % m))
            .collect();
        let names = (0..n * m)
            .map(|x| format!("({},{})", self.name(x / m), other.name(x % m)))
            .collect();
        Ok(FiniteGroup {
            size: n * m,
            table,
            identity: self.identity * m + other.identity,
            inverse,
            factors: None,
            names,
        })
    }
}

fn log_base(mut c: u64, p: u64) -> u32 {
    let mut k = 0;
    while c > 1 {
        c /= p;
        k += 1;
    }
    k
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

pub fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            out.push(d);
            while n.is_multiple_of(d) {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

const GENERATOR_LETTERS: &[&str] = &["a", "b", "c", "d", "e", "f"];

fn element_name(digits: &[u64]) -> String {
    let parts: Vec<String> = digits
        .iter()
        .enumerate()
        .filter(|(_, &k)| k != 0)
        .map(|(i, &k)| {
            let letter = GENERATOR_LETTERS
                .get(i)
                .map(|s| s.to_string())
                .unwrap_or_else(|| format!("g{i}_"));
            if k == 1 {
                letter
            } else {
                format!("{letter}^{k}")
            }
        })
        .collect();
    if parts.is_empty() {
        "1".to_string()
    } else {
        parts.join(" ")
    }
}

/// Direct product of cyclic groups `Z_{d1} × ... × Z_{dk}`.
///
/// Element `(k1, ..., kk)` sits at the mixed-radix index with the last
/// factor varying fastest; the identity is index 0. Elements are named
/// multiplicatively (`1`, `a`, `a^2`, `a b`, ...).
pub fn make_group(invariant_factors: &[u64], limits: &Limits) -> Result<FiniteGroup, GroupError> {
    if let Some(bad) = invariant_factors.iter().find(|&&d| d < 1) {
        return Err(GroupError::Invalid(format!("factor {bad} must be at least 1")));
    }
    let n: u64 = invariant_factors
        .iter()
        .try_fold(1u64, |acc, &d| acc.checked_mul(d))
        .unwrap_or(u64::MAX);
    if n > limits.max_group as u64 {
        return Err(GroupError::Capacity {
            what: "group",
            needed: n.min(usize::MAX as u64) as usize,
            limit: limits.max_group,
        });
    }
    let n = n as usize;
    let digits_of = |mut x: usize| -> Vec<u64> {
        let mut d = vec![0u64; invariant_factors.len()];
        for (i, &m) in invariant_factors.iter().enumerate().rev() {
            d[i] = (x as u64) % m;
            x /= m as usize;
        }
        d
    };
    let index_of = |d: &[u64]| -> usize {
        d.iter()
            .zip(invariant_factors)
            .fold(0usize, |acc, (&k, &m)| acc * m as usize + k as usize)
    };
    let all: Vec<Vec<u64>> = (0..n).map(digits_of).collect();
    let mut table = Vec::with_capacity(n * n);
    for x in &all {
        for y in &all {
            let sum: Vec<u64> = x
                .iter()
                .zip(y)
                .zip(invariant_factors)
                .map(|((a, b), m)| (a + b) % m)
                .collect();
            table.push(index_of(&sum));
        }
    }
    let inverse = all
        .iter()
        .map(|x| {
            let neg: Vec<u64> = x
                .iter()
                .zip(invariant_factors)
                .map(|(a, m)| (m - a) % m)
                .collect();
            index_of(&neg)
        })
        .collect();
    Ok(FiniteGroup {
        size: n,
        table,
        identity: 0,
        inverse,
        factors: Some(invariant_factors.to_vec()),
        names: all.iter().map(|d| element_name(d)).collect(),
    })
}

/// All abelian groups of order at most `max_order`, one per isomorphism type,
/// listed by order and then by invariant factors. Includes the trivial group.
pub fn abelian_catalog(max_order: u64, limits: &Limits) -> Result<Vec<FiniteGroup>, GroupError> {
    let mut chains = Vec::new();
    fn extend(chain: &mut Vec<u64>, product: u64, max: u64, out: &mut Vec<Vec<u64>>) {
        out.push(chain.clone());
        // Next factor is a multiple of the previous one.
        let last = chain.last().copied().unwrap_or(1);
        let mut d = if chain.is_empty() { 2 } else { last };
        while product * d <= max {
            if d % last == 0 {
                chain.push(d);
                extend(chain, product * d, max, out);
                chain.pop();
            }
            d += 1;
        }
    }
    extend(&mut Vec::new(), 1, max_order, &mut chains);
    chains.sort_by_key(|c| (c.iter().product::<u64>(), c.clone()));
    chains
        .into_iter()
        .map(|c| {
            if c.is_empty() {
                make_group(&[1], limits)
            } else {
                make_group(&c, limits)
            }
        })
        .collect()
}

/// A group homomorphism stored as its element map.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GroupHom {
    map: Vec<usize>,
    target_size: usize,
}

impl GroupHom {
    pub fn new(
        source: &FiniteGroup,
        target: &FiniteGroup,
        map: Vec<usize>,
    ) -> Result<GroupHom, GroupError> {
        if map.len() != source.size() {
            return Err(GroupError::InvalidHom(format!(
                "map has length {}, source has {} elements",
                map.len(),
                source.size()
            )));
        }
        if let Some(bad) = map.iter().find(|&&x| x >= target.size()) {
            return Err(GroupError::InvalidHom(format!("image {bad} out of range")));
        }
        for a in source.elements() {
            for b in source.elements() {
                if map[source.op(a, b)] != target.op(map[a], map[b]) {
                    return Err(GroupError::InvalidHom(format!(
                        "not multiplicative at ({a},{b})"
                    )));
                }
            }
        }
        Ok(GroupHom {
            map,
            target_size: target.size(),
        })
    }

    pub fn identity(g: &FiniteGroup) -> GroupHom {
        GroupHom {
            map: g.elements().collect(),
            target_size: g.size(),
        }
    }

    pub fn apply(&self, a: usize) -> usize {
        self.map[a]
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    pub fn source_size(&self) -> usize {
        self.map.len()
    }

    pub fn target_size(&self) -> usize {
        self.target_size
    }

    pub fn is_injective(&self) -> bool {
        let set: HashSet<_> = self.map.iter().collect();
        set.len() == self.map.len()
    }

    /// `other ∘ self`.
    pub fn then(&self, other: &GroupHom) -> GroupHom {
        GroupHom {
            map: self.map.iter().map(|&x| other.apply(x)).collect(),
            target_size: other.target_size,
        }
    }

    pub fn image(&self) -> BTreeSet<usize> {
        self.map.iter().copied().collect()
    }

    /// All homomorphisms `source → target`, optionally only the injective ones.
    ///
    /// Images are chosen for a generating set and propagated through the
    /// Cayley table; inconsistent choices are discarded.
    pub fn enumerate(
        source: &FiniteGroup,
        target: &FiniteGroup,
        injective_only: bool,
    ) -> Vec<GroupHom> {
        let gens = source.generators();
        let mut out = Vec::new();
        let mut choice = vec![0usize; gens.len()];
        loop {
            if let Some(map) = extend_from_generators(source, target, &gens, &choice) {
                let hom = GroupHom {
                    map,
                    target_size: target.size(),
                };
                if !injective_only || hom.is_injective() {
                    out.push(hom);
                }
            }
            // Odometer over target^|gens|.
            let mut i = 0;
            loop {
                if i == choice.len() {
                    out.sort_by(|a, b| a.map.cmp(&b.map));
                    return out;
                }
                choice[i] += 1;
                if choice[i] < target.size() {
                    break;
                }
                choice[i] = 0;
                i += 1;
            }
        }
    }
}

fn extend_from_generators(
    source: &FiniteGroup,
    target: &FiniteGroup,
    gens: &[usize],
    images: &[usize],
) -> Option<Vec<usize>> {
    let mut map: Vec<Option<usize>> = vec![None; source.size()];
    map[source.identity()] = Some(target.identity());
    let mut frontier = vec![source.identity()];
    while let Some(x) = frontier.pop() {
        let hx = map[x].expect("assigned");
        for (&g, &hg) in gens.iter().zip(images) {
            let y = source.op(x, g);
            let hy = target.op(hx, hg);
            match map[y] {
                None => {
                    map[y] = Some(hy);
                    frontier.push(y);
                }
                Some(v) if v != hy => return None,
                Some(_) => {}
            }
        }
    }
    Some(map.into_iter().map(|m| m.expect("generators span")).collect())
}

/// A finite set of primes.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct PrimeSet(BTreeSet<u64>);

impl PrimeSet {
    pub fn new<I: IntoIterator<Item = u64>>(primes: I) -> Result<PrimeSet, GroupError> {
        let set: BTreeSet<u64> = primes.into_iter().collect();
        if let Some(&bad) = set.iter().find(|&&p| !is_prime(p)) {
            return Err(GroupError::NotPrime(bad));
        }
        Ok(PrimeSet(set))
    }

    pub fn iter(&self) -> impl Iterator<Item = u64> + '_ {
        self.0.iter().copied()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn contains(&self, p: u64) -> bool {
        self.0.contains(&p)
    }
}

impl TryFrom<Vec<u64>> for PrimeSet {
    type Error = GroupError;
    fn try_from(v: Vec<u64>) -> Result<Self, Self::Error> {
        PrimeSet::new(v)
    }
}

impl From<PrimeSet> for Vec<u64> {
    fn from(p: PrimeSet) -> Self {
        p.0.into_iter().collect()
    }
}

impl std::str::FromStr for PrimeSet {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let nums = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|e| format!("bad prime `{t}`: {e}")))
            .collect::<Result<Vec<_>, _>>()?;
        PrimeSet::new(nums).map_err(|e| e.to_string())
    }
}

/// Outcome of checking `x^p ≈ 1 ⇒ x ≈ 1` for every `p` in a prime set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "lowercase")]
pub enum SigmaResult {
    Pass,
    Fail { witness: usize, prime: u64 },
}

impl SigmaResult {
    pub fn passed(&self) -> bool {
        matches!(self, SigmaResult::Pass)
    }
}

pub fn check_sigma(g: &FiniteGroup, primes: &PrimeSet) -> SigmaResult {
    for p in primes.iter() {
        // Only the order matters: g^p = 1 with g ≠ 1 iff g has order p.
        if let Some(witness) = g
            .elements()
            .find(|&a| a != g.identity() && g.pow(a, p) == g.identity())
        {
            return SigmaResult::Fail { witness, prime: p };
        }
    }
    SigmaResult::Pass
}

/// Pushout of an injective span together with its two legs.
#[derive(Debug, Clone)]
pub struct Pushout {
    pub group: FiniteGroup,
    pub into_left: GroupHom,
    pub into_right: GroupHom,
}

/// Pushout `(B × C) / N` of `f: A → B` and `g: A → C`, where `N` is generated by
/// `{(f(a), g(a)⁻¹)}`.
///
/// Cosets are numbered by their least representative in `B × C`, so the
/// identity of the result is index 0 whenever `B` and `C` have identity 0.
pub fn pushout(
    a: &FiniteGroup,
    b: &FiniteGroup,
    c: &FiniteGroup,
    f: &GroupHom,
    g: &GroupHom,
    limits: &Limits,
) -> Result<Pushout, GroupError> {
    if f.source_size() != a.size() || g.source_size() != a.size() {
        return Err(GroupError::Precondition("legs do not start at A".into()));
    }
    if f.target_size() != b.size() || g.target_size() != c.size() {
        return Err(GroupError::Precondition("legs do not land in B and C".into()));
    }
    if !f.is_injective() || !g.is_injective() {
        return Err(GroupError::Precondition("span legs must be injective".into()));
    }
    let bc = b.product(c, limits)?;
    let m = c.size();
    let gens: Vec<usize> = a
        .elements()
        .map(|x| f.apply(x) * m + c.inv(g.apply(x)))
        .collect();
    let normal = bc.generated(&gens);
    // Coset labels: least element of each coset, renumbered densely.
    let mut rep_of = vec![usize::MAX; bc.size()];
    let mut reps = Vec::new();
    for x in bc.elements() {
        if rep_of[x] != usize::MAX {
            continue;
        }
        let id = reps.len();
        reps.push(x);
        for &nn in &normal {
            rep_of[bc.op(x, nn)] = id;
        }
    }
    let k = reps.len();
    limits.check_group(k)?;
    let table: Vec<Vec<usize>> = reps
        .iter()
        .map(|&x| reps.iter().map(|&y| rep_of[bc.op(x, y)]).collect())
        .collect();
    let identity = rep_of[bc.identity()];
    let mut d = FiniteGroup::from_table(table, identity, limits)?;
    d.names = reps.iter().map(|&x| bc.name(x).to_string()).collect();
    let into_left = GroupHom::new(
        b,
        &d,
        b.elements().map(|x| rep_of[x * m + c.identity()]).collect(),
    )?;
    let into_right = GroupHom::new(
        c,
        &d,
        c.elements().map(|y| rep_of[b.identity() * m + y]).collect(),
    )?;
    // Commutativity and injectivity are checked, not assumed.
    for x in a.elements() {
        if into_left.apply(f.apply(x)) != into_right.apply(g.apply(x)) {
            return Err(GroupError::Precondition(format!("square fails to commute at {x}")));
        }
    }
    if !into_left.is_injective() || !into_right.is_injective() {
        return Err(GroupError::Precondition("pushout leg is not injective".into()));
    }
    Ok(Pushout {
        group: d,
        into_left,
        into_right,
    })
}

/// Whether the image of an embedding `G → H` meets every nontrivial subgroup
/// of `H` nontrivially.
pub fn is_essential(h: &FiniteGroup, e: &GroupHom) -> Result<bool, GroupError> {
    if !e.is_injective() {
        return Err(GroupError::Precondition("embedding must be injective".into()));
    }
    let image = e.image();
    Ok(h.subgroups()
        .iter()
        .filter(|s| s.len() > 1)
        .all(|s| s.iter().any(|x| *x != h.identity() && image.contains(x))))
}

/// JSON group format: either `{"invariant_factors": [...]}` or
/// `{"size": n, "table": [[...]], "identity": i}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GroupJson {
    Factors {
        invariant_factors: Vec<u64>,
    },
    Table {
        size: usize,
        table: Vec<Vec<usize>>,
        identity: usize,
    },
}

impl GroupJson {
    pub fn build(&self, limits: &Limits) -> Result<FiniteGroup, GroupError> {
        match self {
            GroupJson::Factors { invariant_factors } => make_group(invariant_factors, limits),
            GroupJson::Table {
                size,
                table,
                identity,
            } => {
                if table.len() != *size {
                    return Err(GroupError::Invalid(format!(
                        "size {size} does not match table with {} rows",
                        table.len()
                    )));
                }
                FiniteGroup::from_table(table.clone(), *identity, limits)
            }
        }
    }

    pub fn from_group(g: &FiniteGroup) -> GroupJson {
        match g.declared_factors() {
            Some(f) => GroupJson::Factors {
                invariant_factors: f.to_vec(),
            },
            None => GroupJson::Table {
                size: g.size(),
                table: g.table_rows(),
                identity: g.identity(),
            },
        }
    }
}

/// Number of elements of each order; a complete isomorphism invariant for
/// finite abelian groups.
pub fn order_profile(g: &FiniteGroup) -> BTreeMap<u64, usize> {
    let mut out = BTreeMap::new();
    for a in g.elements() {
        *out.entry(g.order_of(a)).or_insert(0) += 1;
    }
    out
}
