//! Plain-text cycle files.
//!
//! ```text
//! ucycle-file v1
//! alphabet: a b c d
//! cycle left: a b c
//! cycle right: b c d a b
//! meta right: k=3 ucycle=false witness=1,0
//! ```
//!
//! The first two lines are fixed. Later lines are `cycle` or `meta` records,
//! blank lines, or `#` comments; a `#` also starts a trailing comment.

use std::fmt::Write as _;

use crate::cycle::{Alphabet, Cycle};
use crate::error::{Error, Result};
use crate::verify::BenignWitness;

pub const HEADER: &str = "ucycle-file v1";

/// Advisory annotations; consumers re-verify anything they rely on.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct CycleMeta {
    pub k: Option<usize>,
    pub ucycle: Option<bool>,
    pub witness: Option<BenignWitness>,
}

impl CycleMeta {
    pub fn is_empty(&self) -> bool {
        self.k.is_none() && self.ucycle.is_none() && self.witness.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedCycle {
    pub name: String,
    pub cycle: Cycle,
    pub meta: CycleMeta,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleFile {
    pub alphabet: Alphabet,
    pub cycles: Vec<NamedCycle>,
}

impl CycleFile {
    pub fn new(alphabet: Alphabet) -> Self {
        CycleFile { alphabet, cycles: Vec::new() }
    }

    /// Appends a cycle; names must be unique and symbols must be in the alphabet.
    pub fn push(&mut self, name: &str, cycle: Cycle, meta: CycleMeta) -> Result<()> {
        check_name(name).map_err(Error::PreconditionViolated)?;
        if self.get(name).is_some() {
            return Err(Error::PreconditionViolated(format!("duplicate cycle name {name:?}")));
        }
        if let Some(s) = cycle.symbols().iter().find(|&&s| !self.alphabet.contains(s)) {
            return Err(Error::AlphabetMismatch(format!("symbol {} of {name:?} is not in the alphabet", s.0)));
        }
        self.cycles.push(NamedCycle { name: name.to_owned(), cycle, meta });
        Ok(())
    }

    pub fn with(mut self, name: &str, cycle: Cycle, meta: CycleMeta) -> Result<Self> {
        self.push(name, cycle, meta)?;
        Ok(self)
    }

    pub fn get(&self, name: &str) -> Option<&NamedCycle> {
        self.cycles.iter().find(|c| c.name == name)
    }
}

fn check_name(name: &str) -> std::result::Result<(), String> {
    if name.is_empty() || name.chars().any(|c| c.is_whitespace() || c == ':' || c == '#') {
        Err(format!("invalid cycle name {name:?}"))
    } else {
        Ok(())
    }
}

pub fn serialize(file: &CycleFile) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "{HEADER}").unwrap();
    writeln!(out, "alphabet: {}", file.alphabet.labels().join(" ")).unwrap();
    for nc in &file.cycles {
        check_name(&nc.name).map_err(Error::PreconditionViolated)?;
        let tokens = nc
            .cycle
            .symbols()
            .iter()
            .map(|&s| {
                file.alphabet
                    .label(s)
                    .ok_or_else(|| Error::AlphabetMismatch(format!("symbol {} of {:?} is not in the alphabet", s.0, nc.name)))
            })
            .collect::<Result<Vec<_>>>()?;
        writeln!(out, "cycle {}: {}", nc.name, tokens.join(" ")).unwrap();
        if !nc.meta.is_empty() {
            let mut fields = Vec::new();
            if let Some(k) = nc.meta.k {
                fields.push(format!("k={k}"));
            }
            if let Some(u) = nc.meta.ucycle {
                fields.push(format!("ucycle={u}"));
            }
            if let Some(w) = nc.meta.witness {
                fields.push(format!("witness={},{}", w.delta, w.i));
            }
            writeln!(out, "meta {}: {}", nc.name, fields.join(" ")).unwrap();
        }
    }
    Ok(out)
}

pub fn parse(text: &str) -> Result<CycleFile> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let err = |line: usize, reason: String| Error::Parse { line, reason };

    match lines.next() {
        Some((_, l)) if strip_comment(l).trim() == HEADER => {}
        Some((n, l)) => return Err(err(n, format!("expected {HEADER:?}, found {:?}", l.trim()))),
        None => return Err(err(1, "empty file".into())),
    }
    let alphabet = match lines.next() {
        Some((n, l)) => {
            let body = strip_comment(l);
            let rest = body.trim().strip_prefix("alphabet:").ok_or_else(|| err(n, "expected an alphabet line".into()))?;
            Alphabet::new(rest.split_whitespace()).map_err(|e| match e {
                Error::AlphabetMismatch(reason) => err(n, reason),
                other => other,
            })?
        }
        None => return Err(err(2, "missing alphabet line".into())),
    };

    let mut file = CycleFile::new(alphabet);
    for (n, raw) in lines {
        let line = strip_comment(raw).trim();
        if line.is_empty() {
            continue;
        }
        let (kind, rest) = line.split_once(char::is_whitespace).ok_or_else(|| err(n, format!("unrecognised line {line:?}")))?;
        let (name, body) = rest.split_once(':').ok_or_else(|| err(n, "missing ':' after the name".into()))?;
        let name = name.trim();
        check_name(name).map_err(|r| err(n, r))?;
        match kind {
            "cycle" => {
                if file.get(name).is_some() {
                    return Err(err(n, format!("duplicate cycle name {name:?}")));
                }
                let symbols = file.alphabet.tokens(body)?;
                if symbols.is_empty() {
                    return Err(err(n, format!("cycle {name:?} is empty")));
                }
                file.cycles.push(NamedCycle { name: name.to_owned(), cycle: Cycle::new(symbols)?, meta: CycleMeta::default() });
            }
            "meta" => {
                let meta = parse_meta(body).map_err(|r| err(n, r))?;
                let target = file
                    .cycles
                    .iter_mut()
                    .find(|c| c.name == name)
                    .ok_or_else(|| err(n, format!("meta for unknown cycle {name:?}")))?;
                if !target.meta.is_empty() {
                    return Err(err(n, format!("second meta line for {name:?}")));
                }
                target.meta = meta;
            }
            other => return Err(err(n, format!("unknown record {other:?}"))),
        }
    }
    Ok(file)
}

fn strip_comment(line: &str) -> &str {
    line.split_once('#').map_or(line, |(head, _)| head)
}

fn parse_meta(body: &str) -> std::result::Result<CycleMeta, String> {
    let mut meta = CycleMeta::default();
    for field in body.split_whitespace() {
        let (key, value) = field.split_once('=').ok_or_else(|| format!("expected key=value, found {field:?}"))?;
        let bad = || format!("bad value {value:?} for {key}");
        match key {
            "k" if meta.k.is_none() => meta.k = Some(value.parse().map_err(|_| bad())?),
            "ucycle" if meta.ucycle.is_none() => meta.ucycle = Some(value.parse().map_err(|_| bad())?),
            "witness" if meta.witness.is_none() => {
                let (d, i) = value.split_once(',').ok_or_else(bad)?;
                meta.witness = Some(BenignWitness { delta: d.parse().map_err(|_| bad())?, i: i.parse().map_err(|_| bad())? });
            }
            "k" | "ucycle" | "witness" => return Err(format!("repeated key {key}")),
            _ => return Err(format!("unknown key {key:?}")),
        }
    }
    Ok(meta)
}
