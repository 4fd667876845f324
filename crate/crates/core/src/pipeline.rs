//! Assembly of a ucycle on 4-subsets of `a + b + 2` symbols from smaller
//! ucycles, a 2-subset analogue small enough to run end to end, and the
//! induction schedule reaching every `n ≡ 2 (mod 8)`.
//!
//! Symbols are laid out as `𝒜 = 0..a`, `ℬ = a..a+b`, `α = a+b` and
//! `β = a+b+1`.

use std::collections::HashSet;

use itertools::Itertools;

use crate::benign::reduced_product;
use crate::builders::{pair_ucycle, plain_pair_ucycle, relabel, singleton_ucycle, singleton_ucycle_with_prefix};
use crate::cycle::{product, Cycle, KSetFamily, Multiset, Symbol, SymbolMultiset};
use crate::error::{Error, Result};
use crate::sum::CyclePool;
use crate::verify::{is_ucycle, BenignWitness};
use crate::weave::{product_family, WeaveSpec};

/// Symbol layout for a composition with `|𝒜| = a` and `|ℬ| = b`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    pub a: usize,
    pub b: usize,
}

impl Layout {
    pub fn new(a: usize, b: usize) -> Self {
        Layout { a, b }
    }

    pub fn a_symbols(&self) -> Vec<Symbol> {
        (0..self.a as u32).map(Symbol).collect()
    }

    pub fn b_symbols(&self) -> Vec<Symbol> {
        (self.a as u32..(self.a + self.b) as u32).map(Symbol).collect()
    }

    pub fn alpha(&self) -> Symbol {
        Symbol((self.a + self.b) as u32)
    }

    pub fn beta(&self) -> Symbol {
        Symbol((self.a + self.b + 1) as u32)
    }

    /// Size of the full 4-subset alphabet `𝒜 ∪ ℬ ∪ {α, β}`.
    pub fn n(&self) -> usize {
        self.a + self.b + 2
    }

    fn with(&self, base: Vec<Symbol>, extra: &[Symbol]) -> Vec<Symbol> {
        let mut v = base;
        v.extend_from_slice(extra);
        v
    }
}

fn k_sets(symbols: &[Symbol], k: usize) -> Vec<SymbolMultiset> {
    symbols.iter().copied().combinations(k).map(|c| c.into_iter().collect()).collect()
}

/// The five target families `M_0 … M_4`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DecompositionPlan {
    pub layout: Layout,
}

impl DecompositionPlan {
    pub fn new(a: usize, b: usize) -> Self {
        DecompositionPlan { layout: Layout::new(a, b) }
    }

    /// `M_i` as a family of 4-sets.
    pub fn family(&self, i: usize) -> KSetFamily {
        let l = &self.layout;
        let (al, be) = (l.alpha(), l.beta());
        let sets = |syms: Vec<Symbol>, k: usize| -> KSetFamily { k_sets(&syms, k).into_iter().collect() };
        match i {
            0 => sets(l.with(l.a_symbols(), &[al, be]), 4),
            1 => product(&sets(l.with(l.a_symbols(), &[al]), 3), &sets(l.b_symbols(), 1)),
            2 => product(&sets(l.with(l.a_symbols(), &[al]), 2), &sets(l.with(l.b_symbols(), &[be]), 2)),
            3 => product(&sets(l.a_symbols(), 1), &sets(l.with(l.b_symbols(), &[be]), 3)),
            4 => sets(l.with(l.b_symbols(), &[al, be]), 4),
            _ => panic!("family index {i} out of range"),
        }
    }

    /// Checks that the five families are sets, pairwise disjoint, and cover
    /// every 4-subset of the alphabet; returns the number of 4-sets.
    pub fn check_disjoint_cover(&self) -> Result<usize> {
        let all: HashSet<SymbolMultiset> = k_sets(&(0..self.layout.n() as u32).map(Symbol).collect::<Vec<_>>(), 4).into_iter().collect();
        let mut seen: HashSet<SymbolMultiset> = HashSet::with_capacity(all.len());
        for i in 0..5 {
            for set in self.family(i) {
                if set.len() != 4 || !set.is_set() {
                    return Err(Error::ContractViolation(format!("M_{i} contains the multiset {set}")));
                }
                if !all.contains(&set) {
                    return Err(Error::ContractViolation(format!("M_{i} contains the foreign set {set}")));
                }
                if !seen.insert(set.clone()) {
                    return Err(Error::ContractViolation(format!("{set} lies in two families")));
                }
            }
        }
        if seen.len() != all.len() {
            return Err(Error::ContractViolation(format!("families cover {} of {} 4-sets", seen.len(), all.len())));
        }
        Ok(seen.len())
    }
}

/// Component cycles `C(0..3)`, `D(1..4)` on the layout's symbols.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentSet {
    pub layout: Layout,
    pub c0: Cycle,
    pub c1: Cycle,
    pub c2: Cycle,
    pub c3: Cycle,
    pub d1: Cycle,
    pub d2: Cycle,
    pub d3: Cycle,
    pub d4: Cycle,
    /// `(2,4)`-benign witness of `c2`.
    pub c2_witness: BenignWitness,
}

fn check_ab(a: usize, b: usize) -> Result<()> {
    for (name, v) in [("a", a), ("b", b)] {
        if v == 0 || v % 8 != 0 || (v + 1) % 3 == 0 {
            return Err(Error::PreconditionViolated(format!("{name} = {v} must be a positive multiple of 8 with {name} + 1 not divisible by 3")));
        }
    }
    Ok(())
}

fn require_ucycle(c: &Cycle, n: usize, k: usize) -> Result<()> {
    match is_ucycle(c, n, k).failure {
        None => Ok(()),
        Some(f) => Err(Error::VerificationFailed(f)),
    }
}

/// Builds the components from verified base ucycles: `base_a`, `base_b` on
/// the 4-subsets of `a+2` and `b+2` symbols, `k3_a`, `k3_b` on the 3-subsets
/// of `a+1` and `b+1` symbols. All inputs use symbols `0..m`.
pub fn build_components(a: usize, b: usize, base_a: &Cycle, base_b: &Cycle, k3_a: &Cycle, k3_b: &Cycle) -> Result<ComponentSet> {
    check_ab(a, b)?;
    require_ucycle(base_a, a + 2, 4)?;
    require_ucycle(base_b, b + 2, 4)?;
    require_ucycle(k3_a, a + 1, 3)?;
    require_ucycle(k3_b, b + 1, 3)?;
    build_components_unchecked(a, b, base_a, base_b, k3_a, k3_b)
}

/// As [`build_components`] without verifying the four inputs, so that
/// stand-in cycles can exercise the construction. Inputs still need the
/// right number of symbols and distinct symbols in the relabelled windows.
pub fn build_components_unchecked(a: usize, b: usize, base_a: &Cycle, base_b: &Cycle, k3_a: &Cycle, k3_b: &Cycle) -> Result<ComponentSet> {
    check_ab(a, b)?;
    let l = Layout::new(a, b);
    let (alpha, beta) = (l.alpha(), l.beta());
    let a_alpha = l.with(l.a_symbols(), &[alpha]);
    let b_beta = l.with(l.b_symbols(), &[beta]);

    // C(2), D(2): benign pair ucycles with α ∉ C(2)[1..4) and β ∉ D(2)[-2..1)
    let pa = pair_ucycle(a + 1, 4)?;
    let c2 = relabel(&pa.cycle, &l.a_symbols()[..4], 0, &a_alpha)?;
    let pb = pair_ucycle(b + 1, 4)?;
    let d2 = relabel(&pb.cycle, &l.b_symbols()[..3], -2, &b_beta)?;

    // C(3), D(1): singleton ucycles opening with prescribed symbols
    let c3 = singleton_ucycle_with_prefix(&l.a_symbols(), &[c2.at(3), c2.at(1), c2.at(2)])?;
    let d1 = singleton_ucycle_with_prefix(&l.b_symbols(), &[d2.at(0), d2.at(-2), d2.at(-1)])?;

    // C(1), D(3): 3-subset ucycles sharing a window with C(2), D(2)
    let c1 = relabel(k3_a, &c2.window(0, 4), -2, &a_alpha)?;
    let d3 = relabel(k3_b, &d2.window(-1, 3), -2, &b_beta)?;

    // C(0), D(4): 4-subset ucycles sharing a window with C(1), D(3)
    let c0 = relabel(base_a, &c1.window(-1, 4), -1, &l.with(l.a_symbols(), &[alpha, beta]))?;
    let d4 = relabel(base_b, &d3.window(-1, 4), 0, &l.with(l.b_symbols(), &[alpha, beta]))?;

    let set = ComponentSet { layout: l, c0, c1, c2, c3, d1, d2, d3, d4, c2_witness: pa.witness };
    set.check_constraints()?;
    Ok(set)
}

impl ComponentSet {
    /// The fourteen window equations linking the components, by number.
    pub fn constraint_holds(&self, id: u8) -> bool {
        let (c0, c1, c2, c3) = (&self.c0, &self.c1, &self.c2, &self.c3);
        let (d1, d2, d3, d4) = (&self.d1, &self.d2, &self.d3, &self.d4);
        match id {
            1 => c3.at(0) == c2.at(3),
            2 => c3.at(1) == c2.at(1),
            3 => c3.at(2) == c2.at(2),
            4 => c1.window(-2, 2) == c2.window(0, 2),
            5 => c1.window(-1, 2) == c2.window(1, 2),
            6 => c0.window(-1, 3) == c1.window(-1, 3),
            7 => c0.window(0, 3) == c1.window(0, 3),
            8 => d1.at(0) == d2.at(0),
            9 => d1.at(1) == d2.at(-2),
            10 => d1.at(2) == d2.at(-1),
            11 => d3.window(-2, 2) == d2.window(-1, 2),
            12 => d3.window(-1, 2) == d2.window(0, 2),
            13 => d4.window(0, 3) == d3.window(-1, 3),
            14 => d4.window(1, 3) == d3.window(0, 3),
            _ => false,
        }
    }

    /// Checks equations 1 to 14 plus the side conditions on `C(2)`, `D(2)`
    /// and the component lengths.
    pub fn check_constraints(&self) -> Result<()> {
        if let Some(id) = (1..=14).find(|&id| !self.constraint_holds(id)) {
            return Err(Error::ConstraintUnsatisfied(id));
        }
        if !self.c2_witness.holds(&self.c2, 2, 4) {
            return Err(Error::ContractViolation("C(2) is not (2,4)-benign with its witness".into()));
        }
        if self.c2.window(1, 3).contains(&self.layout.alpha()) {
            return Err(Error::ContractViolation("α occurs in C(2)[1..4)".into()));
        }
        if self.d2.window(-2, 3).contains(&self.layout.beta()) {
            return Err(Error::ContractViolation("β occurs in D(2)[-2..1)".into()));
        }
        for (name, c) in [("C(1)", &self.c1), ("C(2)", &self.c2), ("C(3)", &self.c3), ("D(1)", &self.d1), ("D(2)", &self.d2), ("D(3)", &self.d3)] {
            if c.len() % 4 != 0 {
                return Err(Error::ContractViolation(format!("|{name}| = {} is not a multiple of 4", c.len())));
            }
        }
        Ok(())
    }

    /// `E_i(1) = WEAVE(D(1)^1, C(1)^3)` for `i in 0..3`.
    pub fn h1(&self) -> Result<Vec<Cycle>> {
        weaves(&self.d1, 1, &self.c1, 3, 3)
    }

    /// `E_i(2) = WEAVE(C(2)^2, D(2)^2)` for `i in 0..2`.
    pub fn h2(&self) -> Result<Vec<Cycle>> {
        weaves(&self.c2, 2, &self.d2, 2, 2)
    }

    /// `E_i(3) = WEAVE(C(3)^1, D(3)^3)` for `i in 0..3`.
    pub fn h3(&self) -> Result<Vec<Cycle>> {
        weaves(&self.c3, 1, &self.d3, 3, 3)
    }

    /// The shared 3-windows that make `{C(0), D(4)} ∪ ℋ(1) ∪ ℋ(2) ∪ ℋ(3)`
    /// 4-summable, as `(description, holds)`.
    pub fn fit_links(&self) -> Result<Vec<(&'static str, bool)>> {
        let (h1, h2, h3) = (self.h1()?, self.h2()?, self.h3()?);
        let w = |c: &Cycle, x: i64| c.window(x, 3);
        Ok(vec![
            ("C(0)[-1] = E_1(1)[1]", w(&self.c0, -1) == w(&h1[1], 1)),
            ("C(0)[0] = E_0(1)[1]", w(&self.c0, 0) == w(&h1[0], 1)),
            ("E_0(1)[-2] = E_0(2)[0]", w(&h1[0], -2) == w(&h2[0], 0)),
            ("E_2(1)[0] = E_0(2)[-1]", w(&h1[2], 0) == w(&h2[0], -1)),
            ("E_1(1)[0] = E_1(2)[-1]", w(&h1[1], 0) == w(&h2[1], -1)),
            ("E_0(3)[-2] = E_1(2)[2]", w(&h3[0], -2) == w(&h2[1], 2)),
            ("E_2(3)[0] = E_1(2)[1]", w(&h3[2], 0) == w(&h2[1], 1)),
            ("E_1(3)[0] = E_0(2)[1]", w(&h3[1], 0) == w(&h2[0], 1)),
            ("D(4)[1] = E_0(3)[1]", w(&self.d4, 1) == w(&h3[0], 1)),
        ])
    }

    /// `{C(0), D(4)} ∪ ℋ(1) ∪ ℋ(2) ∪ ℋ(3)`.
    pub fn fit_pool(&self) -> Result<CyclePool> {
        let mut members = vec![self.c0.clone(), self.d4.clone()];
        members.extend(self.h1()?);
        members.extend(self.h2()?);
        members.extend(self.h3()?);
        CyclePool::new(members, 4)
    }
}

fn weaves(c: &Cycle, t: usize, d: &Cycle, u: usize, count: i64) -> Result<Vec<Cycle>> {
    (0..count).map(|i| Ok(WeaveSpec::new(c.clone(), t, d.clone(), u, i, -i)?.weave())).collect()
}

/// Final summation pool and its members before summing.
#[derive(Clone, Debug)]
pub struct Assembly {
    /// `𝒞(1)`, `𝒞(2)`, `𝒞(3)`: one summed cycle per benign class.
    pub reduced: [Vec<Cycle>; 3],
    pub cycle: Cycle,
}

/// Sums `{C(0), D(4)} ∪ 𝒞(1) ∪ 𝒞(2) ∪ 𝒞(3)` without checking the result.
pub fn compose_k4_unverified(cs: &ComponentSet) -> Result<Assembly> {
    cs.check_constraints()?;
    if !cs.fit_pool()?.is_summable() {
        return Err(Error::NotSummable { k: 4 });
    }
    let trivial = BenignWitness::TRIVIAL;
    let (r1, r2, r3) = std::thread::scope(|scope| {
        let r1 = scope.spawn(|| reduced_product(&cs.d1, 1, &cs.c1, 3, &trivial));
        let r2 = scope.spawn(|| reduced_product(&cs.c2, 2, &cs.d2, 2, &cs.c2_witness));
        let r3 = reduced_product(&cs.c3, 1, &cs.d3, 3, &trivial);
        (r1.join().expect("weave worker panicked"), r2.join().expect("weave worker panicked"), r3)
    });
    let reduced = [r1?, r2?, r3?];
    let mut members = vec![cs.c0.clone(), cs.d4.clone()];
    members.extend(reduced.iter().flatten().cloned());
    let pool = CyclePool::new(members, 4)?;
    if !pool.is_summable() {
        return Err(Error::NotSummable { k: 4 });
    }
    let (cycle, _) = pool.summate()?;
    Ok(Assembly { reduced, cycle })
}

/// A ucycle on the 4-subsets of `a + b + 2` symbols.
pub fn compose_k4(cs: &ComponentSet) -> Result<Cycle> {
    let out = compose_k4_unverified(cs)?.cycle;
    require_ucycle(&out, cs.layout.n(), 4)?;
    Ok(out)
}

/// A ucycle on the 2-subsets of `a + b + 1` symbols assembled from pair
/// ucycles on `𝒜 ∪ {α}` and `ℬ ∪ {α}` and the weaves of two singleton
/// ucycles on `𝒜` and `ℬ`.
pub fn compose_k2(a: usize, b: usize) -> Result<Cycle> {
    if a < 4 || b < 4 || !a.is_multiple_of(2) || !b.is_multiple_of(2) {
        return Err(Error::PreconditionViolated(format!("a and b must be even and at least 4, got a = {a}, b = {b}")));
    }
    let l = Layout::new(a, b);
    let alpha = l.alpha();
    let pair = |m: usize| -> Result<Cycle> {
        if m >= 7 {
            Ok(pair_ucycle(m, 4)?.cycle)
        } else {
            plain_pair_ucycle(m)
        }
    };
    let pa = relabel(&pair(a + 1)?, &[], 0, &l.with(l.a_symbols(), &[alpha]))?;
    let pb = relabel(&pair(b + 1)?, &[], 0, &l.with(l.b_symbols(), &[alpha]))?;
    let sa = singleton_ucycle(&l.a_symbols())?;
    let sb = singleton_ucycle(&l.b_symbols())?;
    debug_assert_eq!(product_family(&sa, 1, &sb, 1)?.len(), num_integer::gcd(a, b) / 2);
    let cross = reduced_product(&sa, 1, &sb, 1, &BenignWitness::TRIVIAL)?;

    let mut members = vec![pa, pb];
    members.extend(cross);
    let pool = CyclePool::new(members, 2)?;
    if !pool.is_summable() {
        return Err(Error::NotSummable { k: 2 });
    }
    let (out, _) = pool.summate()?;
    require_ucycle(&out, a + b + 1, 2)?;
    Ok(out)
}

/// Composition steps `(a, b)`, each giving `[a+b+2, 4]` from `[a+2, 4]`
/// and `[b+2, 4]`, that reach `[n, 4]` from `[18, 4]` and `[26, 4]`.
/// Steps are listed once each, every step after the ones it depends on.
pub fn corollary_schedule(n: usize) -> Result<Vec<(usize, usize)>> {
    if n < 18 || n % 8 != 2 {
        return Err(Error::PreconditionViolated(format!("n = {n} must be at least 18 and ≡ 2 (mod 8)")));
    }
    let mut steps = Vec::new();
    plan(n, &mut steps)?;
    Ok(steps)
}

fn plan(n: usize, steps: &mut Vec<(usize, usize)>) -> Result<()> {
    if n == 18 || n == 26 || steps.iter().any(|&(a, b)| a + b + 2 == n) {
        return Ok(());
    }
    let step = match (n - 2) / 8 {
        4 => (16, 16),
        i => {
            let x = i - 1;
            if x % 3 == 2 {
                (8 * (x - 2), 24)
            } else {
                (8 * (x - 1), 16)
            }
        }
    };
    check_ab(step.0, step.1).map_err(|e| Error::ContractViolation(format!("step {step:?}: {e}")))?;
    plan(step.0 + 2, steps)?;
    plan(step.1 + 2, steps)?;
    steps.push(step);
    Ok(())
}

/// Union of `Γ(R^4(·))` over `cycles`.
pub fn gamma_union(cycles: &[Cycle], k: usize) -> KSetFamily {
    cycles.iter().fold(Multiset::new(), |acc, c| acc.union(c.gamma_range(k)))
}
