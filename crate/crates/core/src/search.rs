//! Backtracking search for small universal cycles.
//!
//! A partial sequence is extended one symbol at a time. Every completed
//! window must be duplicate-free and name an unused k-set, and each symbol
//! may occur at most `C(n-1, k-1) / k` times. The `k - 1` wrap-around
//! windows are checked when the last symbol is placed.
//!
//! When `gcd(n, k) = 1` the search first looks for cycles of the form
//! `A, A+1, ..., A+n-1` (mod n), one window of `A` per translation orbit of
//! k-sets, and only then falls back to the unrestricted space.

use std::collections::HashSet;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;
use std::time::{Duration, Instant};

use itertools::Itertools;
use num_integer::Integer;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::builders::relabel;
use crate::cycle::{Cycle, Symbol};
use crate::error::{Error, Result};
use crate::verify::{is_ucycle, necessary_condition};

/// Largest cycle length the searcher accepts.
pub const MAX_LENGTH: u64 = 1 << 22;

/// Value ordering at each node.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Heuristic {
    /// Ascending symbols, no restarts.
    Lexicographic,
    /// Seeded random order, restarted with growing node limits.
    RandomRestart,
    /// Symbols leaving the fewest continuations first, ties broken by the seed.
    FewestExtensions,
}

impl std::str::FromStr for Heuristic {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "lexicographic" => Ok(Heuristic::Lexicographic),
            "random_restart" | "random-restart" => Ok(Heuristic::RandomRestart),
            "fewest_extensions" | "fewest-extensions" => Ok(Heuristic::FewestExtensions),
            other => Err(Error::PreconditionViolated(format!("unknown heuristic {other:?}"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchConfig {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub budget_ms: u64,
    pub heuristic: Heuristic,
    /// Independent seeded workers; 0 and 1 both mean a single serial run.
    pub workers: usize,
}

impl SearchConfig {
    /// Fewest-extensions search with seed 0, a 60 s budget and the worker
    /// count taken from `UCYCLE_THREADS`.
    pub fn new(n: usize, k: usize) -> Self {
        SearchConfig {
            n,
            k,
            seed: 0,
            budget_ms: 60_000,
            heuristic: Heuristic::FewestExtensions,
            workers: workers_from_env(),
        }
    }
}

/// Reads `UCYCLE_THREADS`; unset or unparsable means serial.
pub fn workers_from_env() -> usize {
    std::env::var("UCYCLE_THREADS").ok().and_then(|v| v.trim().parse().ok()).unwrap_or(0)
}

/// Searches for a ucycle on the k-subsets of `[n]`.
///
/// `Ok(None)` means the whole space was exhausted without a solution;
/// running out of time is `BudgetExceeded`.
pub fn search_ucycle(cfg: &SearchConfig) -> Result<Option<Cycle>> {
    search_constrained(cfg, &[])
}

/// As [`search_ucycle`], but the result starts with `prefix`.
///
/// Any ucycle can be rotated and relabelled to start with a given string of
/// distinct symbols, so the prefix is applied after an unconstrained search.
pub fn search_constrained(cfg: &SearchConfig, prefix: &[Symbol]) -> Result<Option<Cycle>> {
    let (n, k) = (cfg.n, cfg.k);
    if k == 0 || k > n {
        return Err(Error::PreconditionViolated(format!("need 1 <= k <= n, got n = {n}, k = {k}")));
    }
    if !necessary_condition(n, k) {
        return Err(Error::NecessaryConditionFails { n, k });
    }
    if n > 64 {
        return Err(Error::PreconditionViolated(format!("n = {n} exceeds 64 symbols")));
    }
    if prefix.len() > k + 1 {
        return Err(Error::PreconditionViolated(format!("prefix of length {} exceeds k + 1 = {}", prefix.len(), k + 1)));
    }
    if let Some(s) = prefix.iter().find(|s| s.index() >= n) {
        return Err(Error::PreconditionViolated(format!("prefix symbol {} is outside [{n}]", s.0)));
    }
    if prefix.iter().collect::<HashSet<_>>().len() != prefix.len() {
        return Err(Error::PreconditionViolated("prefix symbols are not distinct".into()));
    }
    let table = Binomials::new(n);
    let len = table.get(n, k);
    if len > MAX_LENGTH {
        return Err(Error::PreconditionViolated(format!("C({n}, {k}) = {len} is too long to search")));
    }

    let Some(cycle) = search_any(cfg, &table)? else {
        return Ok(None);
    };
    let cycle = fit_prefix(&cycle, n, prefix)?;
    if let Some(f) = is_ucycle(&cycle, n, k).failure {
        return Err(Error::VerificationFailed(f));
    }
    Ok(Some(cycle))
}

/// Rotates and relabels `c` so that it starts with `prefix`.
fn fit_prefix(c: &Cycle, n: usize, prefix: &[Symbol]) -> Result<Cycle> {
    if prefix.is_empty() {
        return Ok(c.clone());
    }
    let x = (0..c.len() as i64)
        .find(|&x| c.window(x, prefix.len()).iter().collect::<HashSet<_>>().len() == prefix.len())
        .ok_or_else(|| Error::PreconditionViolated(format!("no {} consecutive distinct symbols", prefix.len())))?;
    let all: Vec<Symbol> = (0..n as u32).map(Symbol).collect();
    Ok(relabel(c, prefix, x, &all)?.rotate(x))
}

fn search_any(cfg: &SearchConfig, table: &Binomials) -> Result<Option<Cycle>> {
    let (n, k) = (cfg.n, cfg.k);
    let started = Instant::now();
    let deadline = started + Duration::from_millis(cfg.budget_ms);
    // translation-invariant cycles need every orbit of k-sets to be full
    let orbits = (n.gcd(&k) == 1 && k < n).then(|| Orbits::new(n, k, table));
    let phases: Vec<(Option<&Orbits>, Instant)> = match &orbits {
        Some(o) => vec![(Some(o), started + Duration::from_millis(cfg.budget_ms / 2)), (None, deadline)],
        None => vec![(None, deadline)],
    };

    let mut timed_out = false;
    for (orbits, phase_deadline) in phases {
        match run_workers(cfg, table, orbits, phase_deadline) {
            Outcome::Found(symbols) => return Ok(Some(expand(&symbols, n, orbits.is_some())?)),
            Outcome::Exhausted => {}
            Outcome::OutOfTime => timed_out = true,
        }
    }
    if timed_out {
        Err(Error::BudgetExceeded { budget_ms: cfg.budget_ms })
    } else {
        Ok(None)
    }
}

/// Unrolls a block `A` of a translation-invariant cycle into
/// `A, A+1, ..., A+n-1`.
fn expand(symbols: &[u8], n: usize, symmetric: bool) -> Result<Cycle> {
    let blocks = if symmetric { n } else { 1 };
    Cycle::from_ids((0..blocks).flat_map(|i| symbols.iter().map(move |&s| ((s as usize + i) % n) as u32)))
}

fn run_workers(cfg: &SearchConfig, table: &Binomials, orbits: Option<&Orbits>, deadline: Instant) -> Outcome {
    let stop = AtomicBool::new(false);
    let workers = cfg.workers.max(1);
    if workers == 1 {
        return Worker::new(cfg, table, orbits, cfg.seed).run(deadline, &stop);
    }
    let found: Mutex<Option<Vec<u8>>> = Mutex::new(None);
    let exhausted = AtomicBool::new(false);
    std::thread::scope(|scope| {
        for w in 0..workers as u64 {
            let (found, exhausted, stop) = (&found, &exhausted, &stop);
            let seed = cfg.seed.wrapping_add(w.wrapping_mul(0x9e37_79b9_7f4a_7c15));
            scope.spawn(move || match Worker::new(cfg, table, orbits, seed).run(deadline, stop) {
                Outcome::Found(c) => {
                    found.lock().expect("result slot poisoned").get_or_insert(c);
                    stop.store(true, Ordering::Relaxed);
                }
                Outcome::Exhausted => {
                    exhausted.store(true, Ordering::Relaxed);
                    stop.store(true, Ordering::Relaxed);
                }
                Outcome::OutOfTime => {}
            });
        }
    });
    match found.into_inner().expect("result slot poisoned") {
        Some(c) => Outcome::Found(c),
        None if exhausted.load(Ordering::Relaxed) => Outcome::Exhausted,
        None => Outcome::OutOfTime,
    }
}

struct Binomials {
    rows: Vec<Vec<u64>>,
}

impl Binomials {
    fn new(n: usize) -> Self {
        let mut rows = vec![vec![0u64; n + 2]; n + 1];
        for i in 0..=n {
            rows[i][0] = 1;
            for j in 1..=i {
                rows[i][j] = rows[i - 1][j - 1].saturating_add(if j < i { rows[i - 1][j] } else { 0 });
            }
        }
        Binomials { rows }
    }

    fn get(&self, n: usize, k: usize) -> u64 {
        if k > n {
            0
        } else {
            self.rows[n][k]
        }
    }

    /// Colex rank of a k-set given as a bitmask.
    fn rank(&self, mut mask: u64) -> usize {
        let mut r = 0;
        let mut j = 1;
        while mask != 0 {
            let b = mask.trailing_zeros() as usize;
            r += self.get(b, j);
            j += 1;
            mask &= mask - 1;
        }
        r as usize
    }
}

/// Orbits of k-subsets of `[n]` under `x -> x + 1 (mod n)`.
struct Orbits {
    /// Orbit index of each colex rank.
    of_rank: Vec<u32>,
    count: usize,
}

impl Orbits {
    fn new(n: usize, k: usize, table: &Binomials) -> Self {
        let full = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
        let turn = |m: u64| ((m << 1) | (m >> (n - 1))) & full;
        let mut of_rank = vec![u32::MAX; table.get(n, k) as usize];
        let mut count = 0;
        for combo in (0..n).combinations(k) {
            let mask = combo.iter().fold(0u64, |m, &b| m | 1 << b);
            if of_rank[table.rank(mask)] != u32::MAX {
                continue;
            }
            let mut m = mask;
            for _ in 0..n {
                of_rank[table.rank(m)] = count as u32;
                m = turn(m);
            }
            count += 1;
        }
        Orbits { of_rank, count }
    }
}

enum Outcome {
    Found(Vec<u8>),
    Exhausted,
    OutOfTime,
}

/// One backtracking run. In symmetric mode the sequence is a block `A` of
/// length `C(n,k)/n`, position `j + len` reads as `A_j + 1`, and used
/// windows are tracked per orbit.
struct Worker<'a> {
    n: usize,
    k: usize,
    len: usize,
    quota: usize,
    shift: u8,
    heuristic: Heuristic,
    table: &'a Binomials,
    orbits: Option<&'a Orbits>,
    seq: Vec<u8>,
    counts: Vec<usize>,
    used: Vec<bool>,
    rng: ChaCha8Rng,
}

impl<'a> Worker<'a> {
    fn new(cfg: &SearchConfig, table: &'a Binomials, orbits: Option<&'a Orbits>, seed: u64) -> Self {
        let total = table.get(cfg.n, cfg.k) as usize;
        let quota = (table.get(cfg.n - 1, cfg.k - 1) / cfg.k as u64) as usize;
        let (len, shift, quota, slots) = match orbits {
            // the block length C(n,k)/n equals the per-symbol quota
            Some(o) => (quota, 1, usize::MAX, o.count),
            None => (total, 0, quota, total),
        };
        Worker {
            n: cfg.n,
            k: cfg.k,
            len,
            quota,
            shift,
            heuristic: cfg.heuristic,
            table,
            orbits,
            seq: Vec::with_capacity(len),
            counts: vec![0; cfg.n],
            used: vec![false; slots],
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Fixed opening: `0, 1, ..., k-1`, which loses nothing since symbols are
    /// interchangeable; only `0` in symmetric mode, where translation is the
    /// remaining freedom.
    fn start(&self) -> Vec<u8> {
        let m = if self.orbits.is_some() { 1 } else { self.k };
        (0..m.min(self.len) as u8).collect()
    }

    fn slot(&self, mask: u64) -> usize {
        let r = self.table.rank(mask);
        match self.orbits {
            Some(o) => o.of_rank[r] as usize,
            None => r,
        }
    }

    fn run(&mut self, deadline: Instant, stop: &AtomicBool) -> Outcome {
        let mut limit = match self.heuristic {
            Heuristic::Lexicographic => u64::MAX,
            _ => 8 * self.len as u64,
        };
        loop {
            match self.attempt(limit, deadline, stop) {
                Attempt::Found => return Outcome::Found(self.seq.clone()),
                Attempt::Exhausted => return Outcome::Exhausted,
                Attempt::Interrupted => return Outcome::OutOfTime,
                Attempt::NodeLimit => limit = limit.saturating_mul(2),
            }
        }
    }

    fn reset(&mut self) {
        self.seq.clear();
        self.counts.iter_mut().for_each(|c| *c = 0);
        self.used.iter_mut().for_each(|u| *u = false);
        for s in self.start() {
            self.push(s);
        }
    }

    /// Symbol at position `j < 2·len`, reading past the end as the next block.
    fn at(&self, j: usize) -> u8 {
        if j < self.len {
            self.seq[j]
        } else {
            ((self.seq[j - self.len] as usize + self.shift as usize) % self.n) as u8
        }
    }

    fn mask(&self, from: usize, count: usize) -> u64 {
        (from..from + count).fold(0, |m, j| m | 1 << self.at(j))
    }

    /// Appends `s`, marking the window it completes.
    fn push(&mut self, s: u8) {
        self.seq.push(s);
        if self.seq.len() >= self.k {
            let slot = self.slot(self.mask(self.seq.len() - self.k, self.k));
            self.used[slot] = true;
        }
        self.counts[s as usize] += 1;
    }

    fn pop(&mut self) {
        if self.seq.len() >= self.k {
            let slot = self.slot(self.mask(self.seq.len() - self.k, self.k));
            self.used[slot] = false;
        }
        let s = self.seq.pop().expect("pop past the start");
        self.counts[s as usize] -= 1;
    }

    /// Symbols that may be appended next.
    fn options(&self) -> Vec<u8> {
        let p = self.seq.len();
        let back = p.min(self.k - 1);
        let tail = self.mask(p - back, back);
        // late positions share a wrap window with the first p+k-L symbols
        let wrap = (p + self.k).saturating_sub(self.len).min(p);
        let front = (0..wrap).fold(0u64, |m, j| m | 1 << self.at(self.len + j));
        let complete = back + 1 == self.k;
        (0..self.n as u8)
            .filter(|&v| {
                let bit = 1u64 << v;
                tail & bit == 0
                    && front & bit == 0
                    && self.counts[v as usize] < self.quota
                    && !(complete && self.used[self.slot(tail | bit)])
            })
            .collect()
    }

    /// The wrap-around windows of a complete sequence are fresh and distinct.
    fn closes(&self) -> bool {
        let mut slots = Vec::with_capacity(self.k);
        for s in (self.len + 1).saturating_sub(self.k)..self.len {
            let mask = self.mask(s, self.k);
            if mask.count_ones() as usize != self.k {
                return false;
            }
            let slot = self.slot(mask);
            if self.used[slot] || slots.contains(&slot) {
                return false;
            }
            slots.push(slot);
        }
        true
    }

    fn ordered_options(&mut self) -> Vec<u8> {
        let mut opts = self.options();
        match self.heuristic {
            Heuristic::Lexicographic => {}
            Heuristic::RandomRestart => opts.shuffle(&mut self.rng),
            Heuristic::FewestExtensions => {
                let last = self.seq.len() + 1 == self.len;
                let mut scored: Vec<(usize, u32, u8)> = Vec::with_capacity(opts.len());
                for v in opts {
                    let score = if last {
                        0
                    } else {
                        self.push(v);
                        let s = self.options().len();
                        self.pop();
                        if s == 0 {
                            continue;
                        }
                        s
                    };
                    scored.push((score, self.rng.gen(), v));
                }
                scored.sort_unstable();
                opts = scored.into_iter().map(|(_, _, v)| v).collect();
            }
        }
        opts
    }

    fn attempt(&mut self, limit: u64, deadline: Instant, stop: &AtomicBool) -> Attempt {
        self.reset();
        if self.seq.len() == self.len {
            return if self.closes() { Attempt::Found } else { Attempt::Exhausted };
        }
        let base = self.seq.len();
        let mut frames: Vec<(Vec<u8>, usize)> = vec![(self.ordered_options(), 0)];
        let mut nodes = 0u64;
        while let Some(frame) = frames.last_mut() {
            if frame.1 == frame.0.len() {
                frames.pop();
                if self.seq.len() > base {
                    self.pop();
                }
                continue;
            }
            let v = frame.0[frame.1];
            frame.1 += 1;

            nodes += 1;
            if nodes % 1024 == 1 && (stop.load(Ordering::Relaxed) || Instant::now() >= deadline) {
                return Attempt::Interrupted;
            }
            if nodes > limit {
                return Attempt::NodeLimit;
            }

            self.push(v);
            if self.seq.len() == self.len {
                if self.closes() {
                    return Attempt::Found;
                }
                self.pop();
                continue;
            }
            let next = self.ordered_options();
            frames.push((next, 0));
        }
        Attempt::Exhausted
    }
}

enum Attempt {
    Found,
    Exhausted,
    NodeLimit,
    Interrupted,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(n: usize, k: usize, heuristic: Heuristic) -> SearchConfig {
        SearchConfig { n, k, seed: 1, budget_ms: 30_000, heuristic, workers: 1 }
    }

    #[test]
    fn colex_rank_is_a_bijection() {
        let t = Binomials::new(9);
        let mut seen = [false; 126];
        for mask in 0u64..1 << 9 {
            if mask.count_ones() == 4 {
                let r = t.rank(mask);
                assert!(!seen[r]);
                seen[r] = true;
            }
        }
        assert!(seen.iter().all(|&b| b));
    }

    #[test]
    fn small_cases_for_every_heuristic() {
        for h in [Heuristic::Lexicographic, Heuristic::RandomRestart, Heuristic::FewestExtensions] {
            for (n, k) in [(3, 2), (5, 2), (7, 2), (4, 1), (8, 3)] {
                let c = search_ucycle(&cfg(n, k, h)).unwrap().unwrap();
                assert!(is_ucycle(&c, n, k).ok(), "{h:?} ({n},{k})");
            }
        }
    }

    #[test]
    fn refuses_impossible_parameters() {
        assert_eq!(search_ucycle(&cfg(9, 3, Heuristic::FewestExtensions)), Err(Error::NecessaryConditionFails { n: 9, k: 3 }));
        assert_eq!(search_ucycle(&cfg(4, 2, Heuristic::Lexicographic)), Err(Error::NecessaryConditionFails { n: 4, k: 2 }));
        assert!(matches!(search_ucycle(&cfg(3, 4, Heuristic::Lexicographic)), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn prefix_is_respected() {
        let prefix: Vec<Symbol> = [0, 1, 2].map(Symbol).to_vec();
        let c = search_constrained(&cfg(8, 3, Heuristic::FewestExtensions), &prefix).unwrap().unwrap();
        assert_eq!(&c.window(0, 3)[..], &prefix[..]);
        let prefix: Vec<Symbol> = [5, 2, 7, 0].map(Symbol).to_vec();
        let c = search_constrained(&cfg(8, 3, Heuristic::FewestExtensions), &prefix).unwrap().unwrap();
        assert_eq!(&c.window(0, 4)[..], &prefix[..]);
        let long: Vec<Symbol> = (0..5).map(Symbol).collect();
        assert!(matches!(search_constrained(&cfg(8, 3, Heuristic::Lexicographic), &long), Err(Error::PreconditionViolated(_))));
        let dup = [Symbol(1), Symbol(1)];
        assert!(matches!(search_constrained(&cfg(8, 3, Heuristic::Lexicographic), &dup), Err(Error::PreconditionViolated(_))));
    }

    #[test]
    fn empty_prefix_matches_plain_search() {
        let c = cfg(7, 3, Heuristic::FewestExtensions);
        assert_eq!(search_ucycle(&c), search_constrained(&c, &[]));
    }

    #[test]
    fn deterministic_for_a_fixed_seed() {
        let c = cfg(10, 3, Heuristic::FewestExtensions);
        assert_eq!(search_ucycle(&c).unwrap(), search_ucycle(&c).unwrap());
    }

    #[test]
    fn tiny_budget_reports_exhaustion() {
        let c = SearchConfig { budget_ms: 0, ..cfg(13, 4, Heuristic::Lexicographic) };
        assert_eq!(search_ucycle(&c), Err(Error::BudgetExceeded { budget_ms: 0 }));
    }

    #[test]
    fn concurrent_workers_agree_on_status() {
        let c = SearchConfig { workers: 3, ..cfg(8, 3, Heuristic::RandomRestart) };
        let found = search_ucycle(&c).unwrap().unwrap();
        assert!(is_ucycle(&found, 8, 3).ok());
    }
}
