//! Independent checks: the universal-cycle predicate, the divisibility
//! necessary condition and detection of benign windows.
//!
//! Nothing in here constructs cycles; these functions are the ground truth
//! the constructive modules are tested against.

use std::collections::HashMap;
use std::fmt;

use itertools::Itertools;
use num_bigint::BigUint;
use num_integer::Integer;

use crate::cycle::{Cycle, Symbol, SymbolMultiset};

/// First violated condition of the universal-cycle predicate.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Failure {
    /// `|C|` differs from `C(n, k)`.
    WrongLength { expected: BigUint, actual: usize },
    /// The window starting at this index repeats a symbol.
    RepeatedSymbolInWindow(usize),
    /// Windows at both indices have the same symbol set.
    DuplicateKSet(usize, usize),
    /// Lexicographically least k-subset of `[n]` never covered.
    MissingKSet(SymbolMultiset),
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Failure::WrongLength { expected, actual } => {
                write!(f, "length {actual}, expected {expected}")
            }
            Failure::RepeatedSymbolInWindow(i) => write!(f, "window at index {i} repeats a symbol"),
            Failure::DuplicateKSet(a, b) => write!(f, "windows at {a} and {b} have the same symbol set"),
            Failure::MissingKSet(m) => write!(f, "k-set {m} is never covered"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub failure: Option<Failure>,
}

impl VerificationReport {
    pub fn ok(&self) -> bool {
        self.failure.is_none()
    }
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Checks that `c` is a universal cycle on the `k`-subsets of `[n]`.
///
/// Conditions are checked in a fixed order (length, then windows in index
/// order, then coverage) and the first failure found is reported.
pub fn is_ucycle(c: &Cycle, n: usize, k: usize) -> VerificationReport {
    let fail = |f| VerificationReport { failure: Some(f) };
    let expected = binomial(n as u64, k as u64);
    if expected != BigUint::from(c.len()) {
        return fail(Failure::WrongLength { expected, actual: c.len() });
    }

    let mut seen: HashMap<Vec<Symbol>, usize> = HashMap::with_capacity(c.len());
    for x in 0..c.len() {
        let mut key: Vec<Symbol> = c.window_iter(x as i64, k).collect();
        key.sort_unstable();
        if key.windows(2).any(|w| w[0] == w[1]) {
            return fail(Failure::RepeatedSymbolInWindow(x));
        }
        if let Some(&first) = seen.get(&key) {
            return fail(Failure::DuplicateKSet(first, x));
        }
        seen.insert(key, x);
    }

    // |C| = C(n,k) distinct k-sets: any foreign symbol forces a gap.
    for combo in (0..n as u32).map(Symbol).combinations(k) {
        if !seen.contains_key(&combo) {
            return fail(Failure::MissingKSet(combo.into_iter().collect()));
        }
    }
    VerificationReport { failure: None }
}

/// `k | C(n-1, k-1)`.
pub fn necessary_condition(n: usize, k: usize) -> bool {
    if k == 0 || n == 0 {
        return false;
    }
    binomial(n as u64 - 1, k as u64 - 1).is_multiple_of(&BigUint::from(k))
}

/// Positions of two equal `(t-1)`-windows a multiple `k·delta` apart.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct BenignWitness {
    pub delta: i64,
    pub i: i64,
}

impl BenignWitness {
    /// The witness every cycle has when `t = 1`.
    pub const TRIVIAL: BenignWitness = BenignWitness { delta: 1, i: 0 };

    pub fn holds(&self, c: &Cycle, t: usize, k: usize) -> bool {
        t >= 1
            && self.delta.gcd(&(c.len() as i64)) == 1
            && c.window(self.i, t - 1) == c.window(self.i + k as i64 * self.delta, t - 1)
    }
}

/// Searches `i` ascending in `[0, |C|)`, then `delta` ascending in
/// `[1, |C|)`, for a `(t,k)`-benign witness.
pub fn find_benign_witness(c: &Cycle, t: usize, k: usize) -> Option<BenignWitness> {
    if t == 0 {
        return None;
    }
    let len = c.len() as i64;
    // For |C| = 1 the only unit is 1 itself.
    let deltas: Vec<i64> = (1..len.max(2)).filter(|d| d.gcd(&len) == 1).collect();
    for i in 0..len {
        let w = c.window(i, t - 1);
        for &delta in &deltas {
            if c.window(i + k as i64 * delta, t - 1) == w {
                return Some(BenignWitness { delta, i });
            }
        }
    }
    None
}
