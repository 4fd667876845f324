//! Cycle multiplication.
//!
//! `WEAVE_{c,d}(C^t, D^u)` alternates `t` symbols of `C` with `u` symbols of
//! `D` until both cycles return to their starting offsets, i.e. `r` rounds
//! with `r = lcm(|C|u, |D|t) / (tu)`. The `s` weaves `WEAVE_{a,-a}` for
//! `a in [s]` together cover `Γ(R^t(C)) × Γ(R^u(D))` exactly.
//!
//! The index functions `F`, `G` and the pair set `H` describe which
//! windows of `C` and `D` each window of a weave is made of; they are
//! exposed so the covering argument can be checked directly.

use std::collections::HashSet;

use num_integer::Integer;

use crate::cycle::Cycle;
use crate::error::{Error, Result};

/// Parameters of one weave.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeaveSpec {
    pub c: Cycle,
    pub t: usize,
    pub d: Cycle,
    pub u: usize,
    pub c_offset: i64,
    pub d_offset: i64,
}

/// `(F(i), G(i))`-style pair of offsets into `C` and `D`.
#[derive(Copy, Clone, Debug, PartialEq, Eq, Hash)]
pub struct IndexPair {
    pub f: i64,
    pub g: i64,
}

impl IndexPair {
    /// Representative with both coordinates reduced.
    pub fn reduce(self, len_c: usize, len_d: usize) -> IndexPair {
        IndexPair { f: self.f.rem_euclid(len_c as i64), g: self.g.rem_euclid(len_d as i64) }
    }

    /// Coordinatewise congruence modulo `len_c` and `len_d`.
    pub fn similar(self, other: IndexPair, len_c: usize, len_d: usize) -> bool {
        self.reduce(len_c, len_d) == other.reduce(len_c, len_d)
    }

    pub fn shift(self, a: i64) -> IndexPair {
        IndexPair { f: self.f + a, g: self.g - a }
    }
}

fn check_lengths(len_c: usize, len_d: usize, t: usize, u: usize) -> Result<usize> {
    if t == 0 || u == 0 {
        return Err(Error::PreconditionViolated(format!("block sizes must be positive, got t={t}, u={u}")));
    }
    let k = t + u;
    if len_c == 0 || len_d == 0 || !len_c.is_multiple_of(k) || !len_d.is_multiple_of(k) {
        return Err(Error::LengthNotDivisible { len_c, len_d, k });
    }
    Ok(k)
}

/// Number of rounds `lcm(|C|u, |D|t) / (tu)`.
pub fn weave_r(len_c: usize, len_d: usize, t: usize, u: usize) -> Result<usize> {
    check_lengths(len_c, len_d, t, u)?;
    Ok((len_c * u).lcm(&(len_d * t)) / (t * u))
}

/// Number of weaves in a product family, `gcd(|C|u, |D|t) / (t+u)`.
pub fn weave_s(len_c: usize, len_d: usize, t: usize, u: usize) -> Result<usize> {
    let k = check_lengths(len_c, len_d, t, u)?;
    let s = (len_c * u).gcd(&(len_d * t)) / k;
    if cfg!(debug_assertions) {
        let brute = minimal_shift(len_c, len_d, t, u);
        assert_eq!(s, brute, "closed-form s disagrees with the minimal shift");
    }
    Ok(s)
}

/// `F(i)` and `G(i)` with `i = nk + m`, `0 <= m < k`, floor division for
/// negative `i`.
pub fn f_g(i: i64, t: usize, u: usize) -> IndexPair {
    let (t, u) = (t as i64, u as i64);
    let k = t + u;
    let (n, m) = (i.div_euclid(k), i.rem_euclid(k));
    if m < t {
        IndexPair { f: n * t + m, g: n * u }
    } else {
        IndexPair { f: (n + 1) * t, g: n * u + (m - t) }
    }
}

/// `H = {(F(i), G(i)) : 0 <= i < rk}` in index order.
pub fn h_pairs(len_c: usize, len_d: usize, t: usize, u: usize) -> Result<Vec<IndexPair>> {
    let rk = weave_r(len_c, len_d, t, u)? * (t + u);
    Ok((0..rk as i64).map(|i| f_g(i, t, u)).collect())
}

/// Smallest positive `s` such that some `(f2, g2) ∈ H` is similar to
/// `(f1 + s, g1 - s)` for some `(f1, g1) ∈ H`, found by trying shifts in
/// order. Panics on lengths the weave is not defined for.
pub fn minimal_shift(len_c: usize, len_d: usize, t: usize, u: usize) -> usize {
    let h = h_pairs(len_c, len_d, t, u).expect("valid weave lengths");
    let reduced: HashSet<IndexPair> = h.iter().map(|p| p.reduce(len_c, len_d)).collect();
    let bound = len_c.lcm(&len_d);
    (1..=bound)
        .find(|&s| h.iter().any(|p| reduced.contains(&p.shift(s as i64).reduce(len_c, len_d))))
        .expect("a common multiple of both lengths is always a valid shift")
}

/// Index offset `nk` with `W_{a+s}_i = W_a_{i+nk}` for every `a` and `i`.
pub fn loop_shift(len_c: usize, len_d: usize, t: usize, u: usize) -> Result<usize> {
    let r = weave_r(len_c, len_d, t, u)?;
    let s = weave_s(len_c, len_d, t, u)? as i64;
    let (lc, ld) = (len_c as i64, len_d as i64);
    let n = (0..r as i64)
        .find(|&n| (n * t as i64 - s).rem_euclid(lc) == 0 && (n * u as i64 + s).rem_euclid(ld) == 0)
        .ok_or_else(|| Error::ContractViolation("no n with (nt, nu) ~ (s, -s)".into()))?;
    Ok(n as usize * (t + u))
}

impl WeaveSpec {
    pub fn new(c: Cycle, t: usize, d: Cycle, u: usize, c_offset: i64, d_offset: i64) -> Result<Self> {
        check_lengths(c.len(), d.len(), t, u)?;
        Ok(WeaveSpec { c, t, d, u, c_offset, d_offset })
    }

    pub fn k(&self) -> usize {
        self.t + self.u
    }

    pub fn r(&self) -> usize {
        weave_r(self.c.len(), self.d.len(), self.t, self.u).expect("checked on construction")
    }

    pub fn weave(&self) -> Cycle {
        let r = self.r() as i64;
        let (t, u) = (self.t as i64, self.u as i64);
        let mut out = Vec::with_capacity(self.r() * self.k());
        for n in 0..r {
            out.extend(self.c.window_iter(self.c_offset + n * t, self.t));
            out.extend(self.d.window_iter(self.d_offset + n * u, self.u));
        }
        Cycle::new(out).expect("r >= 1 and t + u >= 2")
    }
}

pub fn weave(spec: &WeaveSpec) -> Cycle {
    spec.weave()
}

/// The `s` cycles `WEAVE_{a,-a}(C^t, D^u)` for `a in [s]`.
pub fn product_family(c: &Cycle, t: usize, d: &Cycle, u: usize) -> Result<Vec<Cycle>> {
    let s = weave_s(c.len(), d.len(), t, u)?;
    (0..s as i64)
        .map(|a| Ok(WeaveSpec::new(c.clone(), t, d.clone(), u, a, -a)?.weave()))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cycle::{product, Alphabet, KSetFamily, Multiset};
    use proptest::prelude::*;

    fn digits_and_letters() -> Alphabet {
        Alphabet::from_chars("12345abcde").unwrap()
    }

    #[test]
    fn weave_example() {
        let al = digits_and_letters();
        let spec = WeaveSpec::new(al.cycle("12345").unwrap(), 3, al.cycle("abcde").unwrap(), 2, 0, 0).unwrap();
        let w = spec.weave();
        assert_eq!(al.render(w.symbols()), "123ab451cd234ea512bc345de");
        assert_eq!(w.len(), spec.r() * spec.k());
        for n in -7..12i64 {
            let mut expected = spec.c.window(n * 3, 3).into_vec();
            expected.extend(spec.d.window(n * 2, 2).into_vec());
            assert_eq!(w.window(n * 5, 5).into_vec(), expected);
        }
    }

    #[test]
    fn r_and_s_values() {
        assert_eq!(weave_r(5, 5, 3, 2).unwrap(), 5);
        assert_eq!(weave_r(8, 8, 2, 2).unwrap(), 4);
        assert_eq!(weave_r(4, 4, 1, 3).unwrap(), 4);
        assert_eq!(weave_s(5, 5, 3, 2).unwrap(), 1);
        assert_eq!(weave_s(8, 8, 2, 2).unwrap(), 4);
        assert_eq!(weave_s(4, 4, 1, 3).unwrap(), 1);
        for &(lc, ld, t, u, s) in &[(5, 5, 3, 2, 1), (8, 8, 2, 2, 4), (4, 4, 1, 3, 1), (4, 12, 1, 3, 3)] {
            assert_eq!(minimal_shift(lc, ld, t, u), s);
        }
        assert_eq!(weave_r(6, 5, 3, 2), Err(Error::LengthNotDivisible { len_c: 6, len_d: 5, k: 5 }));
        assert!(weave_s(4, 4, 0, 4).is_err());
    }

    #[test]
    fn f_g_basics() {
        assert_eq!(f_g(0, 3, 2), IndexPair { f: 0, g: 0 });
        for i in -30..30 {
            let p = f_g(i, 3, 2);
            assert_eq!(p.f + p.g, i);
            let q = f_g(i + 5, 3, 2);
            assert_eq!((q.f, q.g), (p.f + 3, p.g + 2));
        }
    }

    #[test]
    fn loop_shift_rotates() {
        let c = Cycle::from_ids(0..8).unwrap();
        let d = Cycle::from_ids(10..18).unwrap();
        let fam = product_family(&c, 2, &d, 2).unwrap();
        let s = fam.len() as i64;
        let shift = loop_shift(8, 8, 2, 2).unwrap() as i64;
        for a in 0..s {
            let next = WeaveSpec::new(c.clone(), 2, d.clone(), 2, a + s, -a - s).unwrap().weave();
            assert_eq!(next, fam[a as usize].rotate(shift));
        }
    }

    fn family_gamma(fam: &[Cycle], k: usize) -> KSetFamily {
        fam.iter().fold(Multiset::new(), |acc, w| acc.union(w.gamma_range(k)))
    }

    #[test]
    fn single_weave_covers_product_when_s_is_one() {
        let al = digits_and_letters();
        let (c, d) = (al.cycle("12345").unwrap(), al.cycle("abcde").unwrap());
        let fam = product_family(&c, 3, &d, 2).unwrap();
        assert_eq!(fam.len(), 1);
        let expected = product(&c.gamma_range(3), &d.gamma_range(2));
        assert_eq!(expected.len(), 25);
        assert_eq!(family_gamma(&fam, 5), expected);
    }

    fn arb_spec() -> impl Strategy<Value = (Cycle, usize, Cycle, usize)> {
        (2usize..6).prop_flat_map(|k| {
            (1..k, 1usize..4, 1usize..4).prop_flat_map(move |(t, mc, md)| {
                (
                    prop::collection::vec(0u32..5, k * mc),
                    prop::collection::vec(5u32..9, k * md),
                )
                    .prop_map(move |(cv, dv)| (Cycle::from_ids(cv).unwrap(), t, Cycle::from_ids(dv).unwrap(), k - t))
            })
        })
    }

    proptest! {
        #[test]
        fn window_gamma_matches_index_functions((c, t, d, u) in arb_spec(), off in -6i64..6) {
            let spec = WeaveSpec::new(c.clone(), t, d.clone(), u, off, -2 * off).unwrap();
            let w = spec.weave();
            let k = t + u;
            for i in 0..w.len() as i64 {
                let p = f_g(i, t, u);
                let expected = c.window(off + p.f, t).gamma().union(d.window(-2 * off + p.g, u).gamma());
                prop_assert_eq!(w.window(i, k).gamma(), expected);
            }
        }

        #[test]
        fn product_theorem((c, t, d, u) in arb_spec()) {
            let fam = product_family(&c, t, &d, u).unwrap();
            let expected = product(&c.gamma_range(t), &d.gamma_range(u));
            prop_assert_eq!(family_gamma(&fam, t + u), expected);
            let r = weave_r(c.len(), d.len(), t, u).unwrap();
            prop_assert_eq!(c.len() * d.len(), fam.len() * r * (t + u));
        }
    }
}
