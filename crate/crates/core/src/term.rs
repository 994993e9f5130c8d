//! Terms over a signature, with named variables split into two families.
//!
//! Variables are `x1, x2, …` and `y1, y2, …`. The two families carry the
//! slot partition used by ideal terms: `x`-variables range over the whole
//! universe, `y`-variables over the candidate ideal. Plain (non-ideal)
//! multi-argument terms use `x1..xk` for their argument slots.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    X(u32),
    Y(u32),
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Var::X(i) => write!(f, "x{}", i),
            Var::Y(i) => write!(f, "y{}", i),
        }
    }
}

pub fn x(i: u32) -> Var {
    Var::X(i)
}

pub fn y(i: u32) -> Var {
    Var::Y(i)
}

/// Abstract syntax tree of a term. Constants are nullary applications.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Var(Var),
    App(String, Vec<Term>),
}

impl Term {
    pub fn var(v: Var) -> Self {
        Term::Var(v)
    }

    pub fn constant(symbol: impl Into<String>) -> Self {
        Term::App(symbol.into(), Vec::new())
    }

    pub fn app(symbol: impl Into<String>, args: Vec<Term>) -> Self {
        Term::App(symbol.into(), args)
    }

    pub fn depth(&self) -> usize {
        match self {
            Term::Var(_) => 0,
            Term::App(_, args) => {
                if args.is_empty() {
                    0
                } else {
                    1 + args.iter().map(Term::depth).max().unwrap()
                }
            }
        }
    }

    pub fn free_vars(&self) -> BTreeSet<Var> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<Var>) {
        match self {
            Term::Var(v) => {
                out.insert(*v);
            }
            Term::App(_, args) => {
                for a in args {
                    a.collect_vars(out);
                }
            }
        }
    }

    /// Simultaneous substitution; variables missing from the map are kept.
    pub fn substitute(&self, map: &BTreeMap<Var, Term>) -> Term {
        match self {
            Term::Var(v) => map.get(v).cloned().unwrap_or_else(|| self.clone()),
            Term::App(sym, args) => Term::App(
                sym.clone(),
                args.iter().map(|a| a.substitute(map)).collect(),
            ),
        }
    }

    /// Instantiates a k-ary term whose slots are `x1..xk`.
    pub fn instantiate(&self, args: &[Term]) -> Term {
        let map: BTreeMap<Var, Term> = args
            .iter()
            .enumerate()
            .map(|(i, t)| (Var::X(i as u32 + 1), t.clone()))
            .collect();
        self.substitute(&map)
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Var(v) => write!(f, "{}", v),
            Term::App(sym, args) => {
                if args.is_empty() {
                    write!(f, "{}", sym)
                } else {
                    write!(f, "{}(", sym)?;
                    for (i, a) in args.iter().enumerate() {
                        if i > 0 {
                            write!(f, ",")?;
                        }
                        write!(f, "{}", a)?;
                    }
                    write!(f, ")")
                }
            }
        }
    }
}

fn parse_var(atom: &str) -> Option<Var> {
    let (head, tail) = atom.split_at(1);
    if tail.is_empty() || !tail.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    let idx: u32 = tail.parse().ok()?;
    match head {
        "x" => Some(Var::X(idx)),
        "y" => Some(Var::Y(idx)),
        _ => None,
    }
}

struct Parser<'a> {
    input: &'a str,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn skip_ws(&mut self) {
        while self.pos < self.input.len() && self.input.as_bytes()[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.input.as_bytes().get(self.pos).copied()
    }

    fn atom(&mut self) -> Result<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while let Some(b) = self.peek() {
            if b == b'(' || b == b')' || b == b',' || b.is_ascii_whitespace() {
                break;
            }
            self.pos += 1;
        }
        if self.pos == start {
            return Err(Error::Parse(format!(
                "expected a symbol or variable at byte {}",
                self.pos
            )));
        }
        Ok(&self.input[start..self.pos])
    }

    fn term(&mut self) -> Result<Term> {
        let atom = self.atom()?;
        self.skip_ws();
        if self.peek() == Some(b'(') {
            if parse_var(atom).is_some() {
                return Err(Error::Parse(format!(
                    "variable `{}` cannot take arguments",
                    atom
                )));
            }
            self.pos += 1; // '('
            let mut args = Vec::new();
            loop {
                args.push(self.term()?);
                self.skip_ws();
                match self.peek() {
                    Some(b',') => {
                        self.pos += 1;
                    }
                    Some(b')') => {
                        self.pos += 1;
                        break;
                    }
                    _ => {
                        return Err(Error::Parse(format!(
                            "expected `,` or `)` at byte {}",
                            self.pos
                        )))
                    }
                }
            }
            Ok(Term::App(atom.to_string(), args))
        } else if let Some(v) = parse_var(atom) {
            Ok(Term::Var(v))
        } else {
            Ok(Term::constant(atom))
        }
    }
}

impl FromStr for Term {
    type Err = Error;

    fn from_str(s: &str) -> Result<Term> {
        let mut p = Parser { input: s, pos: 0 };
        let t = p.term()?;
        p.skip_ws();
        if p.pos != s.len() {
            return Err(Error::Parse(format!(
                "trailing input at byte {}: `{}`",
                p.pos,
                &s[p.pos..]
            )));
        }
        Ok(t)
    }
}

/// Total map from variables to universe elements.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Assignment {
    map: BTreeMap<Var, usize>,
}

impl Assignment {
    pub fn new() -> Self {
        Assignment::default()
    }

    pub fn bind(mut self, v: Var, e: usize) -> Self {
        self.map.insert(v, e);
        self
    }

    pub fn set(&mut self, v: Var, e: usize) {
        self.map.insert(v, e);
    }

    pub fn get(&self, v: Var) -> Option<usize> {
        self.map.get(&v).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Var, usize)> + '_ {
        self.map.iter().map(|(v, e)| (*v, *e))
    }

    /// Assignment of `values[i]` to `vars[i]`.
    pub fn from_tuple(vars: &[Var], values: &[usize]) -> Self {
        let mut a = Assignment::new();
        for (v, e) in vars.iter().zip(values) {
            a.set(*v, *e);
        }
        a
    }
}

impl fmt::Display for Assignment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, (v, e)) in self.map.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{}={}", v, e)?;
        }
        write!(f, "}}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_print_roundtrip() {
        for s in [
            "x1",
            "y12",
            "0",
            "->(x1,y1)",
            "*(->(y1,0),x1)",
            "^(x1,^(x2,x3))",
        ] {
            let t: Term = s.parse().unwrap();
            assert_eq!(t.to_string(), s);
        }
    }

    #[test]
    fn parse_whitespace_and_errors() {
        let t: Term = " v( x1 , 0 ) ".parse().unwrap();
        assert_eq!(
            t,
            Term::app("v", vec![Term::var(x(1)), Term::constant("0")])
        );
        assert!("x1(y1)".parse::<Term>().is_err());
        assert!("f(x1".parse::<Term>().is_err());
        assert!("".parse::<Term>().is_err());
        assert!("f(x1) y".parse::<Term>().is_err());
    }

    #[test]
    fn depth_counts_applications() {
        let t: Term = "->(->(->(x1,0),0),x1)".parse().unwrap();
        assert_eq!(t.depth(), 3);
        assert_eq!(Term::var(x(1)).depth(), 0);
        assert_eq!(Term::constant("0").depth(), 0);
    }

    #[test]
    fn substitution_replaces_slots() {
        let d: Term = "->(x1,x2)".parse().unwrap();
        let p: Term = "->(->(x1,0),0)".parse().unwrap();
        let q: Term = "x1".parse().unwrap();
        let t = d.instantiate(&[p, q]);
        assert_eq!(t.to_string(), "->(->(->(x1,0),0),x1)");
    }
}
