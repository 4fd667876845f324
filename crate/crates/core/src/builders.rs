//! Explicit constructions: arithmetic-progression cycles, the benign pair
//! ucycle, singleton ucycles and relabeling of ucycles.

use std::collections::HashSet;

use num_integer::Integer;

use crate::cycle::{Cycle, Symbol};
use crate::error::{Error, Result};
use crate::sum::CyclePool;
use crate::verify::BenignWitness;

/// `D_w(x)`: start at `x` and keep adding `w` modulo `n` until back at `x`.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct DCycleSpec {
    pub n: usize,
    pub w: usize,
    pub x: usize,
}

impl DCycleSpec {
    pub fn new(n: usize, w: usize, x: usize) -> Result<Self> {
        if n < 2 || w == 0 || w >= n || x >= n {
            return Err(Error::PreconditionViolated(format!("D cycle needs 1 <= w < n and x < n, got n={n}, w={w}, x={x}")));
        }
        Ok(DCycleSpec { n, w, x })
    }

    pub fn len(&self) -> usize {
        self.n / self.w.gcd(&self.n)
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

pub fn d_cycle(spec: DCycleSpec) -> Cycle {
    let DCycleSpec { n, w, x } = spec;
    Cycle::from_ids((0..spec.len()).map(|i| ((x + i * w) % n) as u32)).expect("length is at least 1")
}

/// `D = ⋃_{w=1}^{(n-1)/2} {D_w(x) : 0 <= x < gcd(w, n)}`, in `(w, x)` order.
fn difference_cycles(n: usize) -> Vec<(usize, usize, Cycle)> {
    let mut out = Vec::new();
    for w in 1..=(n - 1) / 2 {
        for x in 0..w.gcd(&n) {
            out.push((w, x, d_cycle(DCycleSpec { n, w, x })));
        }
    }
    out
}

fn rotate_to_symbol(c: &Cycle, s: Symbol) -> Cycle {
    let p = c.symbols().iter().position(|&x| x == s).expect("symbol occurs in cycle");
    c.rotate(p as i64)
}

/// A ucycle on the 2-subsets of `[n]` for odd `n >= 3`, obtained by
/// 2-summing every `D_w(x)`. No benign guarantee.
pub fn plain_pair_ucycle(n: usize) -> Result<Cycle> {
    if n < 3 || n.is_multiple_of(2) {
        return Err(Error::PreconditionViolated(format!("pair ucycle needs odd n >= 3, got {n}")));
    }
    let members: Vec<Cycle> = difference_cycles(n).into_iter().map(|(_, _, c)| c).collect();
    let (e, _) = CyclePool::new(members, 2)?.summate()?;
    Ok(rotate_to_symbol(&e, Symbol(0)))
}

/// Pair ucycle together with the `(2,k)`-benign witness built into it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairUcycle {
    pub cycle: Cycle,
    pub witness: BenignWitness,
    pub k: usize,
}

/// `(2,k)`-benign ucycle on the 2-subsets of `[n]`, for `k > 3` and odd
/// `n >= 2k-1`.
///
/// Sums all `D_w(x)` except `D_{k-1}(0)` and `D_1(0)` into `E` (rotated to
/// start at 0), then prepends `D_{k-1}(0)` and the reversed cycle
/// `D_{n-1}(0)`, each joined at the shared symbol 0. The symbol `k-1` then
/// sits at positions `n-(k-1)` and `n+1`, exactly `k` apart.
pub fn pair_ucycle(n: usize, k: usize) -> Result<PairUcycle> {
    if k <= 3 || n.is_multiple_of(2) || n < 2 * k - 1 {
        return Err(Error::PreconditionViolated(format!("benign pair ucycle needs k > 3 and odd n >= 2k-1, got n={n}, k={k}")));
    }
    let rest: Vec<Cycle> = difference_cycles(n)
        .into_iter()
        .filter(|&(w, x, _)| !(x == 0 && (w == 1 || w == k - 1)))
        .map(|(_, _, c)| c)
        .collect();
    let (e, _) = CyclePool::new(rest, 2)?.summate()?;
    let e = rotate_to_symbol(&e, Symbol(0));

    let step = d_cycle(DCycleSpec { n, w: k - 1, x: 0 });
    let reversed = d_cycle(DCycleSpec { n, w: n - 1, x: 0 });
    // both joins share the length-1 string "0" at rotation offset 0
    let inner = join_at_start(&step, &e)?;
    let cycle = join_at_start(&reversed, &inner)?;

    let witness = BenignWitness { delta: 1, i: (n - (k - 1)) as i64 };
    if !witness.holds(&cycle, 2, k) {
        return Err(Error::ContractViolation("constructed pair ucycle lost its benign window".into()));
    }
    Ok(PairUcycle { cycle, witness, k })
}

/// 2-sum `left · right` of two cycles that already start with the same symbol.
fn join_at_start(left: &Cycle, right: &Cycle) -> Result<Cycle> {
    if left.at(0) != right.at(0) {
        return Err(Error::NoCommonWindow { len: 1 });
    }
    Ok(left.concat(right))
}

/// The ucycle on 1-subsets that lists `symbols` in the given order.
pub fn singleton_ucycle(symbols: &[Symbol]) -> Result<Cycle> {
    let mut seen = HashSet::new();
    if let Some(dup) = symbols.iter().find(|s| !seen.insert(**s)) {
        return Err(Error::AlphabetMismatch(format!("symbol {} listed twice", dup.0)));
    }
    Cycle::new(symbols.to_vec())
}

/// Singleton ucycle on `symbols` that starts with `prefix`; the other
/// symbols follow in ascending order.
pub fn singleton_ucycle_with_prefix(symbols: &[Symbol], prefix: &[Symbol]) -> Result<Cycle> {
    let all: HashSet<Symbol> = symbols.iter().copied().collect();
    if let Some(s) = prefix.iter().find(|s| !all.contains(s)) {
        return Err(Error::AlphabetMismatch(format!("prefix symbol {} is not in the set", s.0)));
    }
    let mut rest: Vec<Symbol> = symbols.iter().copied().filter(|s| !prefix.contains(s)).collect();
    rest.sort_unstable();
    let mut order = prefix.to_vec();
    order.extend(rest);
    singleton_ucycle(&order)
}

/// Applies a bijection from the symbols of `c` onto `target` that sends
/// `C_{x+i}` to `prescribed[i]`; the remaining source symbols are paired
/// with the remaining targets in ascending order.
///
/// Window positions are untouched, so ucycle and benign properties carry
/// over to the result.
pub fn relabel(c: &Cycle, prescribed: &[Symbol], x: i64, target: &[Symbol]) -> Result<Cycle> {
    let source = c.support();
    let mut target_sorted = target.to_vec();
    target_sorted.sort_unstable();
    target_sorted.dedup();
    if target_sorted.len() != target.len() {
        return Err(Error::AlphabetMismatch("target symbols are not distinct".into()));
    }
    if source.len() != target.len() {
        return Err(Error::AlphabetMismatch(format!(
            "cycle uses {} symbols but the target alphabet has {}",
            source.len(),
            target.len()
        )));
    }
    let window = c.window(x, prescribed.len());
    let distinct: HashSet<Symbol> = window.iter().copied().collect();
    if distinct.len() != window.len() {
        return Err(Error::PreconditionViolated(format!("window of length {} at {x} repeats a symbol", window.len())));
    }
    let wanted: HashSet<Symbol> = prescribed.iter().copied().collect();
    if wanted.len() != prescribed.len() {
        return Err(Error::PreconditionViolated("prescribed symbols are not distinct".into()));
    }
    if let Some(s) = prescribed.iter().find(|s| target_sorted.binary_search(s).is_err()) {
        return Err(Error::AlphabetMismatch(format!("prescribed symbol {} is not a target symbol", s.0)));
    }

    let max = source.last().map_or(0, |s| s.index());
    let mut map: Vec<Option<Symbol>> = vec![None; max + 1];
    for (&from, &to) in window.iter().zip(prescribed) {
        map[from.index()] = Some(to);
    }
    let free_sources = source.iter().filter(|s| map[s.index()].is_none());
    let mut free_targets = target_sorted.iter().filter(|s| !wanted.contains(s));
    for &s in free_sources.collect::<Vec<_>>() {
        map[s.index()] = free_targets.next().copied();
    }
    Ok(c.map_symbols(|s| map[s.index()].expect("every source symbol is mapped")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::verify::{find_benign_witness, is_ucycle};

    fn ids(c: &Cycle) -> Vec<u32> {
        c.symbols().iter().map(|s| s.0).collect()
    }

    fn syms(v: &[u32]) -> Vec<Symbol> {
        v.iter().copied().map(Symbol).collect()
    }

    #[test]
    fn d_cycle_examples() {
        assert_eq!(ids(&d_cycle(DCycleSpec::new(9, 3, 0).unwrap())), [0, 3, 6]);
        assert_eq!(ids(&d_cycle(DCycleSpec::new(9, 2, 0).unwrap())), [0, 2, 4, 6, 8, 1, 3, 5, 7]);
        assert_eq!(ids(&d_cycle(DCycleSpec::new(7, 6, 0).unwrap())), [0, 6, 5, 4, 3, 2, 1]);
        assert!(DCycleSpec::new(9, 9, 0).is_err());
        assert!(DCycleSpec::new(9, 1, 9).is_err());
    }

    #[test]
    fn d_cycle_symbols_form_a_residue_class() {
        for n in [9usize, 12, 15] {
            for w in 1..n {
                for x in 0..n {
                    let spec = DCycleSpec::new(n, w, x).unwrap();
                    let g = w.gcd(&n);
                    let mut got = ids(&d_cycle(spec));
                    got.sort_unstable();
                    let expected: Vec<u32> = (0..n as u32).filter(|v| *v as usize % g == x % g).collect();
                    assert_eq!(got, expected);
                }
            }
        }
    }

    #[test]
    fn difference_classes_cover_each_step() {
        let n = 15;
        for w in 1..=(n - 1) / 2 {
            let mut pairs: Vec<(u32, u32)> = (0..w.gcd(&n))
                .flat_map(|x| d_cycle(DCycleSpec { n, w, x }).k_range(2))
                .map(|s| (s[0].0, s[1].0))
                .collect();
            pairs.sort_unstable();
            let expected: Vec<(u32, u32)> = (0..n as u32).map(|i| (i, ((i as usize + w) % n) as u32)).collect();
            assert_eq!(pairs, expected);
        }
    }

    #[test]
    fn pair_ucycle_nine_four() {
        let p = pair_ucycle(9, 4).unwrap();
        assert_eq!(p.cycle.len(), 36);
        assert!(is_ucycle(&p.cycle, 9, 2).ok());
        assert_eq!(p.witness, BenignWitness { delta: 1, i: 6 });
        assert_eq!(p.cycle.at(6), Symbol(3));
        assert_eq!(p.cycle.at(10), Symbol(3));
        assert!(find_benign_witness(&p.cycle, 2, 4).is_some());
        assert_eq!(ids(&p.cycle)[..4], [0, 8, 7, 6]);
    }

    #[test]
    fn pair_ucycle_sizes() {
        for (n, k) in [(7, 4), (11, 4), (13, 4), (9, 5), (15, 5), (13, 7)] {
            let p = pair_ucycle(n, k).unwrap();
            assert_eq!(p.cycle.len(), n * (n - 1) / 2);
            assert!(is_ucycle(&p.cycle, n, 2).ok(), "n={n} k={k}");
            assert!(p.witness.holds(&p.cycle, 2, k));
        }
        assert!(pair_ucycle(8, 4).is_err());
        assert!(pair_ucycle(5, 4).is_err());
        assert!(pair_ucycle(9, 3).is_err());
    }

    #[test]
    fn plain_pair_ucycles() {
        for n in [3usize, 5, 7, 9, 21] {
            let c = plain_pair_ucycle(n).unwrap();
            assert!(is_ucycle(&c, n, 2).ok());
            assert_eq!(c.at(0), Symbol(0));
        }
        assert!(plain_pair_ucycle(4).is_err());
    }

    #[test]
    fn singleton_examples() {
        assert_eq!(ids(&singleton_ucycle(&syms(&[0, 1, 2])).unwrap()), [0, 1, 2]);
        assert_eq!(ids(&singleton_ucycle(&syms(&[4])).unwrap()), [4]);
        assert!(matches!(singleton_ucycle(&syms(&[1, 2, 1])), Err(Error::AlphabetMismatch(_))));
        let c = singleton_ucycle_with_prefix(&syms(&[0, 1, 2, 3, 4, 5]), &syms(&[3, 1, 2])).unwrap();
        assert_eq!(ids(&c), [3, 1, 2, 0, 4, 5]);
        assert!(is_ucycle(&c, 6, 1).ok());
    }

    #[test]
    fn relabel_identity_and_prefix() {
        let p = pair_ucycle(9, 4).unwrap();
        let c = &p.cycle;
        let all: Vec<Symbol> = (0..9).map(Symbol).collect();
        let same = relabel(c, &c.window(5, 3), 5, &all).unwrap();
        assert_eq!(&same, c);

        let target: Vec<Symbol> = (20..29).map(Symbol).collect();
        let want = syms(&[27, 21, 24]);
        let d = relabel(c, &want, 0, &target).unwrap();
        assert_eq!(d.window(0, 3).into_vec(), want);
        let back: Cycle = d.map_symbols(|s| Symbol(s.0 - 20));
        let fwd_ranges: Vec<_> = c.k_range(2);
        // relabeling commutes with taking windows
        let mut map = std::collections::HashMap::new();
        for (a, b) in c.symbols().iter().zip(d.symbols()) {
            assert_eq!(*map.entry(*a).or_insert(*b), *b);
        }
        for (w, v) in fwd_ranges.iter().zip(d.k_range(2)) {
            let mapped: Vec<Symbol> = w.iter().map(|s| map[s]).collect();
            assert_eq!(mapped, v.into_vec());
        }
        assert!(is_ucycle(&back, 9, 2).ok());
        assert!(p.witness.holds(&d, 2, 4));
    }

    #[test]
    fn relabel_rejects_bad_input() {
        let c = Cycle::from_ids([0, 1, 0, 2]).unwrap();
        let t = syms(&[5, 6, 7]);
        assert!(matches!(relabel(&c, &syms(&[5, 6, 7]), 0, &t), Err(Error::PreconditionViolated(_))));
        assert!(matches!(relabel(&c, &syms(&[5]), 0, &syms(&[5, 6])), Err(Error::AlphabetMismatch(_))));
        assert!(matches!(relabel(&c, &syms(&[9]), 0, &t), Err(Error::AlphabetMismatch(_))));
    }
}
