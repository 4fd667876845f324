//! Symbols, strings, cycles and the multisets built from them.
//!
//! All algebra runs on dense integer symbol ids. An [`Alphabet`] only maps
//! ids to display tokens, so composing cycles over disjoint alphabets is a
//! matter of offsetting ids.
//!
//! Multisets are stored in canonical (sorted) form, so equality of two
//! [`Multiset`] values is multiset equality and never set equality.

use std::collections::HashMap;
use std::fmt;
use std::ops::Deref;

use crate::error::{Error, Result};

/// Index into an [`Alphabet`].
#[derive(Copy, Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub u32);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl From<u32> for Symbol {
    fn from(id: u32) -> Self {
        Symbol(id)
    }
}

/// Ordered table of distinct display tokens.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    labels: Vec<String>,
    lookup: HashMap<String, Symbol>,
}

impl Alphabet {
    pub fn new<I, S>(labels: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.is_empty() {
            return Err(Error::AlphabetMismatch("alphabet is empty".into()));
        }
        let mut lookup = HashMap::with_capacity(labels.len());
        for (id, label) in labels.iter().enumerate() {
            if label.is_empty() || label.chars().any(char::is_whitespace) || label.contains('#') {
                return Err(Error::AlphabetMismatch(format!("invalid token {label:?}")));
            }
            if lookup.insert(label.clone(), Symbol(id as u32)).is_some() {
                return Err(Error::AlphabetMismatch(format!("duplicate token {label:?}")));
            }
        }
        Ok(Alphabet { labels, lookup })
    }

    /// One token per character of `chars`.
    pub fn from_chars(chars: &str) -> Result<Self> {
        Alphabet::new(chars.chars().map(String::from))
    }

    /// Tokens `0`, `1`, ..., `n-1`, so that symbol `i` displays as `i`.
    pub fn numeric(n: usize) -> Self {
        Alphabet::new((0..n).map(|i| i.to_string())).expect("numeric tokens are distinct")
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.labels.len() as u32).map(Symbol)
    }

    pub fn label(&self, s: Symbol) -> Option<&str> {
        self.labels.get(s.index()).map(String::as_str)
    }

    pub fn symbol(&self, token: &str) -> Result<Symbol> {
        self.lookup
            .get(token)
            .copied()
            .ok_or_else(|| Error::AlphabetMismatch(format!("token {token:?} is not in the alphabet")))
    }

    pub fn contains(&self, s: Symbol) -> bool {
        s.index() < self.labels.len()
    }

    /// Parses a string whose symbols are single characters, e.g. `"abcbc"`.
    pub fn word(&self, text: &str) -> Result<Vec<Symbol>> {
        let mut buf = [0u8; 4];
        text.chars().map(|c| self.symbol(c.encode_utf8(&mut buf))).collect()
    }

    /// Parses whitespace-separated tokens.
    pub fn tokens(&self, text: &str) -> Result<Vec<Symbol>> {
        text.split_whitespace().map(|t| self.symbol(t)).collect()
    }

    /// Convenience for `Cycle::new(self.word(text)?)`.
    pub fn cycle(&self, text: &str) -> Result<Cycle> {
        Cycle::new(self.word(text)?)
    }

    fn compact(&self) -> bool {
        self.labels.iter().all(|l| l.chars().count() == 1)
    }

    /// Renders symbols back to text. Single-character alphabets render
    /// without separators, anything else is space-separated.
    pub fn render(&self, symbols: &[Symbol]) -> String {
        let sep = if self.compact() { "" } else { " " };
        symbols
            .iter()
            .map(|&s| self.label(s).map(str::to_owned).unwrap_or_else(|| format!("?{}", s.0)))
            .collect::<Vec<_>>()
            .join(sep)
    }
}

/// A finite string of exactly the requested length, e.g. a window `C_x^k`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct KString(Vec<Symbol>);

impl KString {
    pub fn new(symbols: Vec<Symbol>) -> Self {
        KString(symbols)
    }

    pub fn into_vec(self) -> Vec<Symbol> {
        self.0
    }

    pub fn gamma(&self) -> SymbolMultiset {
        gamma(&self.0)
    }
}

impl Deref for KString {
    type Target = [Symbol];

    fn deref(&self) -> &[Symbol] {
        &self.0
    }
}

impl From<Vec<Symbol>> for KString {
    fn from(v: Vec<Symbol>) -> Self {
        KString(v)
    }
}

/// Non-empty sequence of symbols read cyclically.
///
/// Every integer index is valid: index `x` resolves to position
/// `x mod len` (with a non-negative remainder).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Cycle(Vec<Symbol>);

impl Cycle {
    pub fn new(symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::EmptyCycle);
        }
        Ok(Cycle(symbols))
    }

    pub fn from_ids<I: IntoIterator<Item = u32>>(ids: I) -> Result<Self> {
        Cycle::new(ids.into_iter().map(Symbol).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Always false; present for API symmetry with `len`.
    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.0
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.0
    }

    /// Position of integer index `x` after modular reduction.
    pub fn pos(&self, x: i64) -> usize {
        x.rem_euclid(self.0.len() as i64) as usize
    }

    pub fn at(&self, x: i64) -> Symbol {
        self.0[self.pos(x)]
    }

    /// `C_x C_{x+1} ... C_{x+k-1}`; windows longer than the cycle wrap
    /// around repeatedly.
    pub fn window(&self, x: i64, k: usize) -> KString {
        KString(self.window_iter(x, k).collect())
    }

    pub(crate) fn window_iter(&self, x: i64, k: usize) -> impl Iterator<Item = Symbol> + '_ {
        let len = self.0.len();
        let start = self.pos(x);
        (0..k).map(move |j| self.0[(start + j) % len])
    }

    /// The `len()` windows of length `k`, in index order.
    pub fn k_range(&self, k: usize) -> Vec<KString> {
        (0..self.0.len() as i64).map(|x| self.window(x, k)).collect()
    }

    /// `R^k(C)` as a canonical multiset.
    pub fn range_multiset(&self, k: usize) -> Multiset<KString> {
        self.k_range(k).into_iter().collect()
    }

    /// `Γ(R^k(C))`: the multiset of window symbol-multisets.
    pub fn gamma_range(&self, k: usize) -> KSetFamily {
        (0..self.0.len() as i64)
            .map(|x| gamma_iter(self.window_iter(x, k)))
            .collect()
    }

    /// `C_x C_{x+1} ... C_{x+|C|-1}`.
    pub fn rotate(&self, x: i64) -> Cycle {
        let p = self.pos(x);
        let mut v = Vec::with_capacity(self.0.len());
        v.extend_from_slice(&self.0[p..]);
        v.extend_from_slice(&self.0[..p]);
        Cycle(v)
    }

    /// All `len()` rotations in offset order (duplicates kept).
    pub fn rotations(&self) -> Vec<Cycle> {
        (0..self.0.len() as i64).map(|x| self.rotate(x)).collect()
    }

    /// `C · D` as a new cycle.
    pub fn concat(&self, other: &Cycle) -> Cycle {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Cycle(v)
    }

    /// Applies a symbol map to every position.
    pub fn map_symbols<F: FnMut(Symbol) -> Symbol>(&self, f: F) -> Cycle {
        Cycle(self.0.iter().copied().map(f).collect())
    }

    /// Sorted distinct symbols occurring in the cycle.
    pub fn support(&self) -> Vec<Symbol> {
        let mut v = self.0.clone();
        v.sort_unstable();
        v.dedup();
        v
    }

    pub fn is_rotation_of(&self, other: &Cycle) -> bool {
        self.rotation_offset_to(other).is_some()
    }

    /// Smallest `x` with `self.rotate(x) == *other`.
    pub fn rotation_offset_to(&self, other: &Cycle) -> Option<usize> {
        if self.len() != other.len() {
            return None;
        }
        (0..self.len()).find(|&x| {
            let (head, tail) = self.0.split_at(x);
            other.0[..tail.len()] == *tail && other.0[tail.len()..] == *head
        })
    }
}

/// Multiset with a canonical sorted representation.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Multiset<T: Ord>(Vec<T>);

impl<T: Ord> Default for Multiset<T> {
    fn default() -> Self {
        Multiset(Vec::new())
    }
}

impl<T: Ord> Multiset<T> {
    pub fn new() -> Self {
        Multiset::default()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, T> {
        self.0.iter()
    }

    pub fn as_slice(&self) -> &[T] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<T> {
        self.0
    }

    pub fn count(&self, item: &T) -> usize {
        let lo = self.0.partition_point(|x| x < item);
        let hi = self.0.partition_point(|x| x <= item);
        hi - lo
    }

    pub fn contains(&self, item: &T) -> bool {
        self.0.binary_search(item).is_ok()
    }

    /// Multiset union: multiplicities add.
    pub fn union(mut self, other: Multiset<T>) -> Multiset<T> {
        self.0.extend(other.0);
        self.0.sort();
        self
    }

    /// True when no element occurs more than once.
    pub fn is_set(&self) -> bool {
        self.0.windows(2).all(|w| w[0] != w[1])
    }

    /// Pairs of (element, multiplicity) in ascending order.
    pub fn counts(&self) -> Vec<(&T, usize)> {
        let mut out: Vec<(&T, usize)> = Vec::new();
        for x in &self.0 {
            match out.last_mut() {
                Some((last, c)) if *last == x => *c += 1,
                _ => out.push((x, 1)),
            }
        }
        out
    }
}

impl<T: Ord> FromIterator<T> for Multiset<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut v: Vec<T> = iter.into_iter().collect();
        v.sort();
        Multiset(v)
    }
}

impl<T: Ord> IntoIterator for Multiset<T> {
    type Item = T;
    type IntoIter = std::vec::IntoIter<T>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.into_iter()
    }
}

impl<'a, T: Ord> IntoIterator for &'a Multiset<T> {
    type Item = &'a T;
    type IntoIter = std::slice::Iter<'a, T>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// `Γ(S)` for a string `S`.
pub type SymbolMultiset = Multiset<Symbol>;

/// A multiset of symbol multisets, e.g. `Γ(R^k(C))` or a product family.
pub type KSetFamily = Multiset<SymbolMultiset>;

impl fmt::Display for Multiset<Symbol> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", s.0)?;
        }
        write!(f, "}}")
    }
}

pub fn gamma(s: &[Symbol]) -> SymbolMultiset {
    s.iter().copied().collect()
}

pub(crate) fn gamma_iter<I: Iterator<Item = Symbol>>(it: I) -> SymbolMultiset {
    it.collect()
}

/// `SUB^k(S)`: the `|S|-k+1` contiguous windows of `S`, without wrapping.
pub fn substrings(s: &[Symbol], k: usize) -> Result<Vec<KString>> {
    if k == 0 || k > s.len() {
        return Err(Error::EmptyWindowSet { len: s.len(), k });
    }
    Ok(s.windows(k).map(|w| KString(w.to_vec())).collect())
}

/// `M × N = {A ∪ B : A ∈ M, B ∈ N}`.
pub fn product(left: &KSetFamily, right: &KSetFamily) -> KSetFamily {
    left.iter()
        .flat_map(|a| right.iter().map(move |b| a.clone().union(b.clone())))
        .collect()
}
