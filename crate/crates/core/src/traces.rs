//! Finite traces, lassos and trace-file parsing.

use std::fmt;

use crate::error::{Error, Result};

/// An ordered set of observation labels.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<String>,
}

impl Alphabet {
    pub fn new<S: Into<String>>(symbols: impl IntoIterator<Item = S>) -> Result<Self> {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(Error::InvalidAlphabet("alphabet is empty".into()));
        }
        for (i, s) in symbols.iter().enumerate() {
            if s.is_empty() || s.chars().any(|c| c.is_whitespace() || c == ';' || c == '#') {
                return Err(Error::InvalidAlphabet(format!("bad symbol label {s:?}")));
            }
            if symbols[..i].contains(s) {
                return Err(Error::InvalidAlphabet(format!("duplicate symbol {s:?}")));
            }
        }
        Ok(Alphabet { symbols })
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[String] {
        &self.symbols
    }

    pub fn label(&self, i: usize) -> &str {
        &self.symbols[i]
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        self.symbols.iter().position(|s| s == label)
    }

    /// Index of `label`, reporting it as unknown at `position` otherwise.
    pub fn lookup(&self, label: &str, position: usize) -> Result<usize> {
        self.index(label)
            .ok_or_else(|| Error::UnknownSymbol { label: label.to_string(), position })
    }

    /// Parses a whitespace-separated list of labels.
    pub fn word(&self, text: &str) -> Result<Vec<usize>> {
        text.split_whitespace()
            .enumerate()
            .map(|(i, t)| self.lookup(t, i + 1))
            .collect()
    }

    pub fn render(&self, word: &[usize]) -> String {
        word.iter().map(|&i| self.label(i)).collect::<Vec<_>>().join(" ")
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", self.symbols.join(","))
    }
}

/// A finite sequence of alphabet indices.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FiniteTrace(pub Vec<usize>);

impl FiniteTrace {
    pub fn new(symbols: Vec<usize>) -> Self {
        FiniteTrace(symbols)
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        match parse_trace(text, alphabet)? {
            Trace::Finite(t) => Ok(t),
            Trace::Lasso(_) => Err(Error::Parse("expected a finite trace, found ';'".into())),
        }
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn symbols(&self) -> &[usize] {
        &self.0
    }

    /// Number of occurrences of `sym`.
    pub fn count(&self, sym: &str, alphabet: &Alphabet) -> Result<usize> {
        let a = alphabet.lookup(sym, 0)?;
        Ok(self.0.iter().filter(|&&x| x == a).count())
    }

    pub fn is_prefix_of(&self, other: &FiniteTrace) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn push(&mut self, sym: usize) {
        self.0.push(sym);
    }

    pub fn concat(&self, other: &[usize]) -> FiniteTrace {
        let mut v = self.0.clone();
        v.extend_from_slice(other);
        FiniteTrace(v)
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        alphabet.render(&self.0)
    }
}

impl From<Vec<usize>> for FiniteTrace {
    fn from(v: Vec<usize>) -> Self {
        FiniteTrace(v)
    }
}

/// The ultimately periodic infinite trace `stem · cycle^ω`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Lasso {
    stem: Vec<usize>,
    cycle: Vec<usize>,
}

impl Lasso {
    pub fn new(stem: Vec<usize>, cycle: Vec<usize>) -> Result<Self> {
        if cycle.is_empty() {
            return Err(Error::EmptyCycle);
        }
        Ok(Lasso { stem, cycle })
    }

    pub fn parse(text: &str, alphabet: &Alphabet) -> Result<Self> {
        match parse_trace(text, alphabet)? {
            Trace::Lasso(l) => Ok(l),
            Trace::Finite(_) => Err(Error::Parse("expected a lasso 'stem ; cycle'".into())),
        }
    }

    pub fn stem(&self) -> &[usize] {
        &self.stem
    }

    pub fn cycle(&self) -> &[usize] {
        &self.cycle
    }

    /// Symbol at position `i` of the infinite trace.
    pub fn at(&self, i: usize) -> usize {
        if i < self.stem.len() {
            self.stem[i]
        } else {
            self.cycle[(i - self.stem.len()) % self.cycle.len()]
        }
    }

    /// The first `n` symbols.
    pub fn unroll(&self, n: usize) -> FiniteTrace {
        FiniteTrace((0..n).map(|i| self.at(i)).collect())
    }

    /// Canonical representative: the cycle is reduced to its primitive root and
    /// the stem is absorbed into the cycle as far as possible.
    pub fn normalize(&self) -> Lasso {
        let mut cycle = primitive_root(&self.cycle).to_vec();
        let mut stem = self.stem.clone();
        while stem.last().is_some_and(|s| Some(s) == cycle.last()) {
            stem.pop();
            cycle.rotate_right(1);
        }
        Lasso { stem, cycle }
    }

    pub fn is_normalized(&self) -> bool {
        *self == self.normalize()
    }

    /// `prefix · self`.
    pub fn prepend(&self, prefix: &[usize]) -> Lasso {
        let mut stem = prefix.to_vec();
        stem.extend_from_slice(&self.stem);
        Lasso { stem, cycle: self.cycle.clone() }
    }

    pub fn render(&self, alphabet: &Alphabet) -> String {
        let stem = alphabet.render(&self.stem);
        let cycle = alphabet.render(&self.cycle);
        if stem.is_empty() {
            format!("; {cycle}")
        } else {
            format!("{stem} ; {cycle}")
        }
    }
}

fn primitive_root(w: &[usize]) -> &[usize] {
    let n = w.len();
    for p in 1..n {
        if n.is_multiple_of(p) && (p..n).all(|i| w[i] == w[i - p]) {
            return &w[..p];
        }
    }
    w
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Trace {
    Finite(FiniteTrace),
    Lasso(Lasso),
}

/// Parses whitespace-separated labels with `#` line comments and an optional
/// single `;` between stem and cycle. Positions in errors count symbols from 1.
pub fn parse_trace(text: &str, alphabet: &Alphabet) -> Result<Trace> {
    let mut stem = Vec::new();
    let mut cycle: Option<Vec<usize>> = None;
    let mut position = 0;
    for line in text.lines() {
        let line = line.split('#').next().unwrap_or("");
        for token in line.replace(';', " ; ").split_whitespace() {
            if token == ";" {
                if cycle.is_some() {
                    return Err(Error::ExtraSeparator(position));
                }
                cycle = Some(Vec::new());
                continue;
            }
            position += 1;
            let sym = alphabet.lookup(token, position)?;
            match cycle.as_mut() {
                Some(c) => c.push(sym),
                None => stem.push(sym),
            }
        }
    }
    match cycle {
        None => Ok(Trace::Finite(FiniteTrace(stem))),
        Some(c) if c.is_empty() => Err(Error::EmptyCycle),
        Some(c) => Ok(Trace::Lasso(Lasso { stem, cycle: c })),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(["a", "b"]).unwrap()
    }

    fn resp() -> Alphabet {
        Alphabet::new(["rq", "gr", "tk", "oo"]).unwrap()
    }

    #[test]
    fn parses_lasso_and_finite() {
        let a = resp();
        let t = parse_trace("rq tk gr ; rq gr", &a).unwrap();
        assert_eq!(t, Trace::Lasso(Lasso::new(vec![0, 2, 1], vec![0, 1]).unwrap()));
        assert_eq!(parse_trace("a a b", &ab()).unwrap(), Trace::Finite(FiniteTrace(vec![0, 0, 1])));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(
            parse_trace("a c", &ab()).unwrap_err(),
            Error::UnknownSymbol { label: "c".into(), position: 2 }
        );
        assert_eq!(parse_trace("a b ;", &ab()).unwrap_err(), Error::EmptyCycle);
        assert_eq!(parse_trace("a ; b ; a", &ab()).unwrap_err(), Error::ExtraSeparator(2));
    }

    #[test]
    fn comments_and_newlines() {
        let t = parse_trace("a # first\nb;a # loop\n", &ab()).unwrap();
        assert_eq!(t, Trace::Lasso(Lasso::new(vec![0, 1], vec![0]).unwrap()));
    }

    #[test]
    fn normalize_examples() {
        let l = Lasso::new(vec![], vec![0, 1, 0, 1]).unwrap();
        assert_eq!(l.normalize(), Lasso::new(vec![], vec![0, 1]).unwrap());
        let l = Lasso::new(vec![0], vec![0]).unwrap();
        assert_eq!(l.normalize(), Lasso::new(vec![], vec![0]).unwrap());
        let l = Lasso::new(vec![1], vec![0]).unwrap();
        assert_eq!(l.normalize(), l);
        let l = Lasso::new(vec![1, 0, 1], vec![0, 1]).unwrap();
        assert_eq!(l.normalize(), Lasso::new(vec![], vec![1, 0]).unwrap());
        let l = Lasso::new(vec![0, 0, 1], vec![0, 1, 0, 1]).unwrap();
        assert_eq!(l.normalize(), Lasso::new(vec![0], vec![0, 1]).unwrap());
    }

    #[test]
    fn count_examples() {
        let a = resp();
        let w = FiniteTrace::parse("rq tk gr tk", &a).unwrap();
        assert_eq!(w.count("tk", &a).unwrap(), 2);
        assert_eq!(FiniteTrace::default().count("rq", &a).unwrap(), 0);
        let w = FiniteTrace(vec![0, 0, 0]);
        assert_eq!(w.count("b", &ab()).unwrap(), 0);
        assert!(w.count("z", &ab()).is_err());
    }

    #[test]
    fn alphabet_validation() {
        assert!(Alphabet::new(Vec::<String>::new()).is_err());
        assert!(Alphabet::new(["a", "a"]).is_err());
        assert!(Alphabet::new(["a;"]).is_err());
    }
}
