//! Stitching a product family into few summable classes.
//!
//! When `C` has two equal `(t-1)`-windows `k·Δ` apart, the weaves `W_a` and
//! `W_{a+uΔ}` share a `(k-1)`-window, so the `s` weaves of a product family
//! fall into `gcd(u, s)` classes that can each be k-summed into one cycle.

use num_integer::Integer;

use crate::cycle::Cycle;
use crate::error::{Error, Result};
use crate::sum::CyclePool;
use crate::verify::BenignWitness;
use crate::weave::{loop_shift, product_family, weave_s, WeaveSpec};

fn weave_at(c: &Cycle, t: usize, d: &Cycle, u: usize, a: i64) -> Result<Cycle> {
    Ok(WeaveSpec::new(c.clone(), t, d.clone(), u, a, -a)?.weave())
}

/// Index `j` of a `(k-1)`-window of `WEAVE_{a,-a}` whose `C` symbols are
/// exactly `C_i ... C_{i+t-2}`: the window starts at `nk + m` with
/// `1 <= m <= t` and `a + nt + m ≡ i (mod |C|)`.
fn aligned_window_start(len_c: usize, t: usize, u: usize, a: i64, i: i64) -> i64 {
    let (t, k) = (t as i64, (t + u) as i64);
    let v = (i - a - 1).rem_euclid(len_c as i64) + 1;
    let n = (v - 1) / t;
    let m = v - n * t;
    n * k + m
}

fn check_witness(c: &Cycle, t: usize, k: usize, w: &BenignWitness) -> Result<()> {
    if w.holds(c, t, k) {
        Ok(())
    } else {
        Err(Error::NoCommonWindow { len: k - 1 })
    }
}

/// Rotation offsets `(j, j + kΔ)` at which `WEAVE_{a,-a}` and
/// `WEAVE_{a+uΔ,-a-uΔ}` start with the same `(k-1)`-string.
pub fn benign_join_offsets(
    c: &Cycle,
    t: usize,
    u: usize,
    witness: &BenignWitness,
    a: i64,
) -> (i64, i64) {
    let j = aligned_window_start(c.len(), t, u, a, witness.i);
    (j, j + (t + u) as i64 * witness.delta)
}

/// A k-sum of `WEAVE_{a,-a}(C^t, D^u)` and `WEAVE_{a+uΔ,-a-uΔ}(C^t, D^u)`.
pub fn benign_pair_sum(
    c: &Cycle,
    t: usize,
    d: &Cycle,
    u: usize,
    witness: &BenignWitness,
    a: i64,
) -> Result<Cycle> {
    let k = t + u;
    check_witness(c, t, k, witness)?;
    let left = weave_at(c, t, d, u, a)?;
    let right = weave_at(c, t, d, u, a + u as i64 * witness.delta)?;
    let (p, q) = benign_join_offsets(c, t, u, witness, a);
    if left.window(p, k - 1) != right.window(q, k - 1) {
        return Err(Error::ContractViolation(format!("weaves {a} and {} share no aligned window", a + u as i64 * witness.delta)));
    }
    Ok(left.rotate(p).concat(&right.rotate(q)))
}

/// Replaces `Δ` by `Δ + m|C|` (same witness, since only `kΔ mod |C|`
/// matters) so that it is also a unit modulo `s`.
///
/// `s` need not divide `|C|` (e.g. `|C| = 4`, `|D| = 12`, `t = 1`, `u = 3`
/// gives `s = 3`), in which case a coprime-to-`|C|` `Δ` can still share a
/// factor with `s`.
pub fn lift_delta(witness: &BenignWitness, len_c: usize, s: usize) -> BenignWitness {
    let (len, s) = (len_c as i64, s as i64);
    let delta = (0..)
        .map(|m| witness.delta + m * len)
        .find(|d| d.gcd(&s) == 1)
        .expect("a unit modulo both lengths exists");
    BenignWitness { delta, i: witness.i }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenignPartition {
    /// `classes[i]` holds `W_a` for every `a in [s]` with `a ≡ i (mod gcd(u, s))`.
    pub classes: Vec<Vec<Cycle>>,
    /// `residue_map[a]` is the class index of `W_a`.
    pub residue_map: Vec<usize>,
    pub k: usize,
    pub s: usize,
    /// Witness actually used for the class chains.
    pub witness: BenignWitness,
}

impl BenignPartition {
    pub fn class_count(&self) -> usize {
        self.classes.len()
    }

    pub fn pools(&self) -> Result<Vec<CyclePool>> {
        self.classes.iter().map(|c| CyclePool::new(c.clone(), self.k)).collect()
    }
}

pub fn benign_partition(
    c: &Cycle,
    t: usize,
    d: &Cycle,
    u: usize,
    witness: &BenignWitness,
) -> Result<BenignPartition> {
    let k = t + u;
    check_witness(c, t, k, witness)?;
    let family = product_family(c, t, d, u)?;
    let s = family.len();
    debug_assert_eq!(s, weave_s(c.len(), d.len(), t, u)?);
    let classes_n = u.gcd(&s);
    let witness = lift_delta(witness, c.len(), s);
    let shift = loop_shift(c.len(), d.len(), t, u)? as i64;

    // Chain W_a -> W_{a + uΔ}: the literal successor is a rotation of the
    // family member W_b with b = (a + uΔ) mod s.
    let step = u as i64 * witness.delta;
    for a in 0..s as i64 {
        let next = a + step;
        let b = next.rem_euclid(s as i64);
        let laps = (next - b) / s as i64;
        let (p, q) = benign_join_offsets(c, t, u, &witness, a);
        let q = q + laps * shift;
        if family[a as usize].window(p, k - 1) != family[b as usize].window(q, k - 1) {
            return Err(Error::ContractViolation(format!("no k-sum between weaves {a} and {b}")));
        }
    }

    let residue_map: Vec<usize> = (0..s).map(|a| a % classes_n).collect();
    let mut classes = vec![Vec::new(); classes_n];
    for (a, w) in family.into_iter().enumerate() {
        classes[residue_map[a]].push(w);
    }
    for (i, class) in classes.iter().enumerate() {
        if !CyclePool::new(class.clone(), k)?.is_summable() {
            return Err(Error::ContractViolation(format!("class {i} is not {k}-summable")));
        }
    }
    Ok(BenignPartition { classes, residue_map, k, s, witness })
}

/// One summed cycle per class of [`benign_partition`]; at most `u` cycles
/// whose windows jointly cover `Γ(R^t(C)) × Γ(R^u(D))`.
pub fn reduced_product(
    c: &Cycle,
    t: usize,
    d: &Cycle,
    u: usize,
    witness: &BenignWitness,
) -> Result<Vec<Cycle>> {
    benign_partition(c, t, d, u, witness)?
        .pools()?
        .iter()
        .map(|pool| pool.summate().map(|(cycle, _)| cycle))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::{product, Alphabet, KSetFamily, Multiset};
    use crate::verify::find_benign_witness;

    fn gamma_union(cs: &[Cycle], k: usize) -> KSetFamily {
        cs.iter().fold(Multiset::new(), |acc, c| acc.union(c.gamma_range(k)))
    }

    #[test]
    fn trivial_witness_sums_for_every_offset() {
        let c = Cycle::from_ids(0..8).unwrap();
        let d = Cycle::from_ids([10, 11, 12, 13, 10, 12, 11, 13]).unwrap();
        for a in -3..6 {
            let e = benign_pair_sum(&c, 1, &d, 3, &BenignWitness::TRIVIAL, a).unwrap();
            let wa = weave_at(&c, 1, &d, 3, a).unwrap();
            let wb = weave_at(&c, 1, &d, 3, a + 3).unwrap();
            assert_eq!(e.range_multiset(4), wa.range_multiset(4).union(wb.range_multiset(4)));
        }
    }

    #[test]
    fn three_four_benign_example() {
        let al = Alphabet::from_chars("abcdewxyz").unwrap();
        let c = al.cycle("abcdaeed").unwrap();
        let d = al.cycle("wxyzwyxz").unwrap();
        let w = find_benign_witness(&c, 3, 4).unwrap();
        for a in 0..4 {
            benign_pair_sum(&c, 3, &d, 1, &w, a).unwrap();
        }
        let part = benign_partition(&c, 3, &d, 1, &w).unwrap();
        assert_eq!(part.class_count(), 1);
        let out = reduced_product(&c, 3, &d, 1, &w).unwrap();
        assert_eq!(out.len(), 1);
        assert_eq!(gamma_union(&out, 4), product(&c.gamma_range(3), &d.gamma_range(1)));
    }

    #[test]
    fn invalid_witness_is_rejected() {
        let c = Cycle::from_ids(0..8).unwrap();
        let d = Cycle::from_ids(10..14).unwrap();
        let bogus = BenignWitness { delta: 1, i: 0 };
        assert_eq!(benign_pair_sum(&c, 2, &d, 2, &bogus, 0), Err(Error::NoCommonWindow { len: 3 }));
        assert!(benign_partition(&c, 2, &d, 2, &bogus).is_err());
    }

    #[test]
    fn lifted_delta_is_coprime_to_s() {
        // |C| = 4, |D| = 12, t = 1, u = 3 gives s = 3, which does not divide |C|.
        let w = lift_delta(&BenignWitness { delta: 3, i: 0 }, 4, 3);
        assert_eq!(w.delta, 7);
        let c = Cycle::from_ids([0, 1, 2, 3]).unwrap();
        let d = Cycle::from_ids([4, 5, 6, 7, 4, 6, 5, 7, 4, 5, 7, 6]).unwrap();
        let part = benign_partition(&c, 1, &d, 3, &BenignWitness { delta: 3, i: 0 }).unwrap();
        assert_eq!(part.s, 3);
        assert_eq!(part.class_count(), 3);
        assert_eq!(part.residue_map, [0, 1, 2]);
    }

    #[test]
    fn single_weave_family() {
        let al = Alphabet::from_chars("12345abcde").unwrap();
        let (c, d) = (al.cycle("12345").unwrap(), al.cycle("abcde").unwrap());
        // k = |C| = 5, so every window is k·1 away from itself
        let w = find_benign_witness(&c, 3, 5).unwrap();
        assert_eq!(w, BenignWitness { delta: 1, i: 0 });
        let part = benign_partition(&c, 3, &d, 2, &w).unwrap();
        assert_eq!(part.s, 1);
        assert_eq!(part.class_count(), 1);
        assert_eq!(part.classes[0].len(), 1);
    }
}
