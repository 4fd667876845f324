//! Cycle addition: k-sums of two cycles and k-summations of pools.
//!
//! A k-sum of `C` and `D` is `C'·D'` where `C'`, `D'` are rotations of `C`
//! and `D` that begin with the same `(k-1)`-string. Its k-range is the
//! multiset union of the operands' k-ranges, and the same holds one level
//! down, so a pool can be merged greedily as long as its `(k-1)`-range
//! intersection graph is connected.

use std::collections::{HashMap, HashSet};

use crate::cycle::{Cycle, KString};
use crate::error::{Error, Result};

/// Rotation offsets `(p, q)` such that `C.rotate(p)` and `D.rotate(q)`
/// start with the same `(k-1)`-string, in ascending `(p, q)` order.
pub fn k_sum_offsets(c: &Cycle, d: &Cycle, k: usize) -> Vec<(usize, usize)> {
    let w = k.saturating_sub(1);
    let mut by_window: HashMap<KString, Vec<usize>> = HashMap::new();
    for q in 0..d.len() {
        by_window.entry(d.window(q as i64, w)).or_default().push(q);
    }
    let mut out = Vec::new();
    for p in 0..c.len() {
        if let Some(qs) = by_window.get(&c.window(p as i64, w)) {
            out.extend(qs.iter().map(|&q| (p, q)));
        }
    }
    out
}

/// Every k-sum of `c` and `d`, one per matching offset pair.
///
/// Empty exactly when the `(k-1)`-ranges are disjoint.
pub fn k_sums(c: &Cycle, d: &Cycle, k: usize) -> Vec<Cycle> {
    k_sum_offsets(c, d, k)
        .into_iter()
        .map(|(p, q)| c.rotate(p as i64).concat(&d.rotate(q as i64)))
        .collect()
}

/// Least offset pair of [`k_sum_offsets`], without enumerating the rest.
pub fn first_k_sum_offsets(c: &Cycle, d: &Cycle, k: usize) -> Option<(usize, usize)> {
    let w = k.saturating_sub(1);
    let mut first_q: HashMap<KString, usize> = HashMap::new();
    for q in 0..d.len() {
        first_q.entry(d.window(q as i64, w)).or_insert(q);
    }
    (0..c.len()).find_map(|p| first_q.get(&c.window(p as i64, w)).map(|&q| (p, q)))
}

/// The first k-sum in `(p, q)` order.
pub fn k_sum_first(c: &Cycle, d: &Cycle, k: usize) -> Result<Cycle> {
    let (p, q) = first_k_sum_offsets(c, d, k).ok_or(Error::NoCommonWindow { len: k.saturating_sub(1) })?;
    Ok(c.rotate(p as i64).concat(&d.rotate(q as i64)))
}

/// One merge performed by [`CyclePool::summate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MergeRecord {
    /// Pool index of the member that currently holds the running sum.
    pub left: usize,
    /// Pool index of the member merged into it.
    pub right: usize,
    pub shared: KString,
    pub left_offset: usize,
    pub right_offset: usize,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SumTrace {
    pub merges: Vec<MergeRecord>,
}

impl SumTrace {
    /// Re-applies the recorded merges to the original pool members.
    pub fn replay(&self, members: &[Cycle]) -> Option<Cycle> {
        let first = self.merges.first().map_or(0, |m| m.left);
        let mut acc = members.get(first)?.clone();
        for m in &self.merges {
            let right = members.get(m.right)?;
            let (l, r) = (acc.rotate(m.left_offset as i64), right.rotate(m.right_offset as i64));
            if l.window(0, m.shared.len()) != m.shared || r.window(0, m.shared.len()) != m.shared {
                return None;
            }
            acc = l.concat(&r);
        }
        Some(acc)
    }
}

/// A multiset of cycles to be combined by k-sums.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CyclePool {
    members: Vec<Cycle>,
    k: usize,
}

impl CyclePool {
    pub fn new(members: Vec<Cycle>, k: usize) -> Result<Self> {
        if k < 2 {
            return Err(Error::PreconditionViolated(format!("summation order must be at least 2, got {k}")));
        }
        if members.is_empty() {
            return Err(Error::PreconditionViolated("pool has no members".into()));
        }
        Ok(CyclePool { members, k })
    }

    pub fn members(&self) -> &[Cycle] {
        &self.members
    }

    pub fn k(&self) -> usize {
        self.k
    }

    /// Connectivity of the graph joining members with intersecting
    /// `(k-1)`-ranges.
    pub fn is_summable(&self) -> bool {
        let mut parent: Vec<usize> = (0..self.members.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        let mut owner: HashMap<KString, usize> = HashMap::new();
        for (idx, c) in self.members.iter().enumerate() {
            for x in 0..c.len() {
                let w = c.window(x as i64, self.k - 1);
                match owner.get(&w) {
                    Some(&o) => {
                        let (a, b) = (find(&mut parent, o), find(&mut parent, idx));
                        parent[a] = b;
                    }
                    None => {
                        owner.insert(w, idx);
                    }
                }
            }
        }
        let root = find(&mut parent, 0);
        (0..self.members.len()).all(|i| find(&mut parent, i) == root)
    }

    /// Merges the pool into one cycle.
    ///
    /// The lowest index pair that admits a k-sum is always `(0, j)` for the
    /// least such `j`: member 0 keeps the running sum, whose `(k-1)`-range
    /// is the union of everything merged so far.
    pub fn summate(&self) -> Result<(Cycle, SumTrace)> {
        if !self.is_summable() {
            return Err(Error::NotSummable { k: self.k });
        }
        let w = self.k - 1;
        let mut acc = self.members[0].clone();
        let mut acc_windows: HashSet<KString> = (0..acc.len()).map(|x| acc.window(x as i64, w)).collect();
        let mut remaining: Vec<usize> = (1..self.members.len()).collect();
        let mut trace = SumTrace::default();

        while !remaining.is_empty() {
            let pos = remaining
                .iter()
                .position(|&j| {
                    let c = &self.members[j];
                    (0..c.len()).any(|x| acc_windows.contains(&c.window(x as i64, w)))
                })
                .ok_or(Error::NotSummable { k: self.k })?;
            let j = remaining.remove(pos);
            let right = &self.members[j];
            let (p, q) = first_k_sum_offsets(&acc, right, self.k)
                .ok_or_else(|| Error::ContractViolation("intersecting ranges without a k-sum".into()))?;
            trace.merges.push(MergeRecord {
                left: 0,
                right: j,
                shared: acc.window(p as i64, w),
                left_offset: p,
                right_offset: q,
            });
            acc_windows.extend((0..right.len()).map(|x| right.window(x as i64, w)));
            acc = acc.rotate(p as i64).concat(&right.rotate(q as i64));
        }
        Ok((acc, trace))
    }
}

pub fn is_summable(members: &[Cycle], k: usize) -> bool {
    CyclePool::new(members.to_vec(), k).map(|p| p.is_summable()).unwrap_or(false)
}

pub fn summate(members: &[Cycle], k: usize) -> Result<(Cycle, SumTrace)> {
    CyclePool::new(members.to_vec(), k)?.summate()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::{Alphabet, Multiset};
    use proptest::prelude::*;

    fn latin() -> Alphabet {
        Alphabet::from_chars("abcdefghijklmnopqrstuvwxyz").unwrap()
    }

    fn render(al: &Alphabet, cs: &[Cycle]) -> Vec<String> {
        cs.iter().map(|c| al.render(c.symbols())).collect()
    }

    #[test]
    fn three_sums_of_abc_and_bcdab() {
        let al = latin();
        let (c, d) = (al.cycle("abc").unwrap(), al.cycle("bcdab").unwrap());
        assert_eq!(render(&al, &k_sums(&c, &d, 3)), ["abcabbcd", "bcabcdab"]);
        assert_eq!(k_sum_offsets(&c, &d, 3), [(0, 3), (1, 0)]);
        assert_eq!(al.render(k_sum_first(&c, &d, 3).unwrap().symbols()), "abcabbcd");
    }

    #[test]
    fn sum_with_bcde_and_range_union() {
        let al = latin();
        let (c, d) = (al.cycle("abc").unwrap(), al.cycle("bcde").unwrap());
        let sums = k_sums(&c, &d, 3);
        assert!(render(&al, &sums).contains(&"bcabcde".to_string()));
        let e = al.cycle("bcabcde").unwrap();
        let r: Vec<String> = e.k_range(3).iter().map(|w| al.render(w)).collect();
        assert_eq!(r, ["bca", "cab", "abc", "bcd", "cde", "deb", "ebc"]);
        assert_eq!(e.range_multiset(3), c.range_multiset(3).union(d.range_multiset(3)));
    }

    #[test]
    fn disjoint_cycles_have_no_sum() {
        let al = latin();
        let (c, d) = (al.cycle("ab").unwrap(), al.cycle("cd").unwrap());
        assert!(k_sums(&c, &d, 3).is_empty());
        assert_eq!(k_sum_first(&c, &d, 3), Err(Error::NoCommonWindow { len: 2 }));
        assert!(!is_summable(&[c.clone(), d.clone()], 3));
        assert_eq!(summate(&[c, d], 3).unwrap_err(), Error::NotSummable { k: 3 });
    }

    #[test]
    fn self_sum_doubles() {
        let al = latin();
        let c = al.cycle("abcab").unwrap();
        assert_eq!(k_sum_first(&c, &c, 3).unwrap(), c.concat(&c));
    }

    #[test]
    fn pool_summation() {
        let al = latin();
        let (c, d) = (al.cycle("abc").unwrap(), al.cycle("bcdab").unwrap());
        let (e, trace) = summate(&[c.clone(), d.clone()], 3).unwrap();
        assert_eq!(al.render(e.symbols()), "abcabbcd");
        assert_eq!(trace.merges.len(), 1);
        assert_eq!(trace.replay(&[c.clone(), d]).unwrap(), e);
        let (single, trace) = summate(std::slice::from_ref(&c), 3).unwrap();
        assert_eq!(single, c);
        assert!(trace.merges.is_empty());
        assert!(CyclePool::new(vec![], 3).is_err());
        assert!(CyclePool::new(vec![c], 1).is_err());
    }

    /// Exhaustive merge-order search; merged members are represented by
    /// their `(k-1)`-window sets, which is all that decides later merges.
    fn exhaustive_summable(sets: Vec<HashSet<KString>>) -> bool {
        if sets.len() <= 1 {
            return true;
        }
        for i in 0..sets.len() {
            for j in i + 1..sets.len() {
                if sets[i].is_disjoint(&sets[j]) {
                    continue;
                }
                let mut next = sets.clone();
                let right = next.remove(j);
                next[i].extend(right);
                if exhaustive_summable(next) {
                    return true;
                }
            }
        }
        false
    }

    fn arb_cycle(max_len: usize) -> impl Strategy<Value = Cycle> {
        prop::collection::vec(0u32..4, 1..max_len).prop_map(|v| Cycle::from_ids(v).unwrap())
    }

    proptest! {
        #[test]
        fn k_sums_preserve_ranges(c in arb_cycle(12), d in arb_cycle(12), k in 2usize..5) {
            for e in k_sums(&c, &d, k) {
                prop_assert_eq!(e.range_multiset(k), c.range_multiset(k).union(d.range_multiset(k)));
                prop_assert_eq!(e.range_multiset(k - 1), c.range_multiset(k - 1).union(d.range_multiset(k - 1)));
            }
        }

        #[test]
        fn greedy_merge_matches_exhaustive(pool in prop::collection::vec(arb_cycle(6), 1..8), k in 2usize..4) {
            let sets: Vec<HashSet<KString>> = pool.iter().map(|c| c.k_range(k - 1).into_iter().collect()).collect();
            let expected = exhaustive_summable(sets);
            prop_assert_eq!(is_summable(&pool, k), expected);
            match summate(&pool, k) {
                Ok((e, trace)) => {
                    prop_assert!(expected);
                    prop_assert_eq!(trace.replay(&pool), Some(e.clone()));
                    let union = pool.iter().fold(Multiset::new(), |acc, c| acc.union(c.range_multiset(k)));
                    prop_assert_eq!(e.range_multiset(k), union);
                }
                Err(err) => {
                    prop_assert!(!expected);
                    prop_assert_eq!(err, Error::NotSummable { k });
                }
            }
        }
    }
}
