//! Text syntax for group descriptors.
//!
//! ```text
//! group    := term ("+" term)*
//! term     := atom ("^" mult)?
//! atom     := "0" | "Z" | "Q" | "Z(" p "^" n ")" | "Z(" p "^inf)" | "Q_(" p ")"
//!           | "R(" chardesc ")" | "tower(" p ")"
//!           | "sum{p}" "[" template ("^" mult)? "]" ("\" "{" p ("," p)* "}")?
//! template := "Z(p^" n ")" | "Z(p^inf)" | "tower(p)"
//! mult     := integer >= 1 | "omega"
//! chardesc := ("0" | "inf") (";" p ":" (n | "inf"))*
//! ```
//!
//! Whitespace is ignored between tokens. The exclusion backslash may be
//! doubled (`\\{2}`) for shells that need it escaped.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::characteristic::{Characteristic, Height};
use crate::group::{CanonicalGroup, FamilyTemplate, Multiplicity, PrimaryProfile, UniformAtom};
use crate::primes::is_prime;

/// A parsed but not yet canonicalized sum of terms.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct GroupDescriptor {
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Term {
    pub summand: Summand,
    pub multiplicity: Multiplicity,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Summand {
    Zero,
    Atom(UniformAtom),
    /// `Z(p) + Z(p^2) + ...` at a single prime.
    Tower(u64),
    Family {
        template: FamilyTemplate,
        excluded: BTreeSet<u64>,
    },
}

impl GroupDescriptor {
    pub fn single(summand: Summand, multiplicity: Multiplicity) -> Self {
        GroupDescriptor {
            terms: vec![Term {
                summand,
                multiplicity,
            }],
        }
    }

    pub fn push(&mut self, summand: Summand, multiplicity: Multiplicity) {
        self.terms.push(Term {
            summand,
            multiplicity,
        });
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("at position {position}: {kind}")]
pub struct ParseError {
    /// Byte offset into the input.
    pub position: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("expected {expected}, found {found:?}")]
    Unexpected { expected: String, found: char },
    #[error("expected {expected}, found end of input")]
    UnexpectedEnd { expected: String },
    #[error("integer literal too large")]
    Overflow,
    #[error("{0} is not a prime (write prime powers as Z(p^n))")]
    NotPrime(u64),
    #[error("exponent must be at least 1")]
    ZeroExponent,
    #[error("multiplicity must be at least 1")]
    ZeroMultiplicity,
    #[error("prime {0} listed twice")]
    DuplicatePrime(u64),
}

pub fn parse(text: &str) -> Result<GroupDescriptor, ParseError> {
    let mut parser = Parser { text, pos: 0 };
    let descriptor = parser.group()?;
    parser.skip_ws();
    if let Some(c) = parser.peek() {
        return Err(parser.error(ParseErrorKind::Unexpected {
            expected: "'+' or end of input".into(),
            found: c,
        }));
    }
    Ok(descriptor)
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn error(&self, kind: ParseErrorKind) -> ParseError {
        ParseError {
            position: self.pos,
            kind,
        }
    }

    fn skip_ws(&mut self) {
        while let Some(c) = self.peek_raw() {
            if !c.is_whitespace() {
                break;
            }
            self.pos += c.len_utf8();
        }
    }

    fn peek_raw(&self) -> Option<char> {
        self.text[self.pos..].chars().next()
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_raw()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek()?;
        self.pos += c.len_utf8();
        Some(c)
    }

    fn unexpected(&mut self, expected: &str) -> ParseError {
        match self.peek() {
            Some(found) => self.error(ParseErrorKind::Unexpected {
                expected: expected.into(),
                found,
            }),
            None => self.error(ParseErrorKind::UnexpectedEnd {
                expected: expected.into(),
            }),
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{c}'")))
        }
    }

    /// Consumes `word` (letters possibly separated by whitespace) if present.
    fn eat_word(&mut self, word: &str) -> bool {
        let start = self.pos;
        for c in word.chars() {
            if !self.eat(c) {
                self.pos = start;
                return false;
            }
        }
        true
    }

    fn expect_word(&mut self, word: &str) -> Result<(), ParseError> {
        if self.eat_word(word) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("'{word}'")))
        }
    }

    fn number(&mut self) -> Result<u64, ParseError> {
        if !self.peek().is_some_and(|c| c.is_ascii_digit()) {
            return Err(self.unexpected("integer"));
        }
        let start = self.pos;
        let mut value: u64 = 0;
        while let Some(c) = self.peek_raw().filter(char::is_ascii_digit) {
            value = value
                .checked_mul(10)
                .and_then(|v| v.checked_add(u64::from(c as u8 - b'0')))
                .ok_or(ParseError {
                    position: start,
                    kind: ParseErrorKind::Overflow,
                })?;
            self.pos += 1;
        }
        Ok(value)
    }

    fn prime(&mut self) -> Result<u64, ParseError> {
        let start = self.pos;
        let p = self.number()?;
        if !is_prime(p) {
            return Err(ParseError {
                position: start,
                kind: ParseErrorKind::NotPrime(p),
            });
        }
        Ok(p)
    }

    fn exponent(&mut self) -> Result<u32, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let n = self.number()?;
        let n = u32::try_from(n).map_err(|_| ParseError {
            position: start,
            kind: ParseErrorKind::Overflow,
        })?;
        if n == 0 {
            return Err(ParseError {
                position: start,
                kind: ParseErrorKind::ZeroExponent,
            });
        }
        Ok(n)
    }

    fn multiplicity(&mut self) -> Result<Multiplicity, ParseError> {
        if self.eat_word("omega") {
            return Ok(Multiplicity::Omega);
        }
        self.skip_ws();
        let start = self.pos;
        let n = self.number()?;
        Multiplicity::finite(n).ok_or(ParseError {
            position: start,
            kind: ParseErrorKind::ZeroMultiplicity,
        })
    }

    fn optional_power(&mut self) -> Result<Multiplicity, ParseError> {
        if self.eat('^') {
            self.multiplicity()
        } else {
            Ok(Multiplicity::ONE)
        }
    }

    fn group(&mut self) -> Result<GroupDescriptor, ParseError> {
        let mut terms = vec![self.term()?];
        while self.eat('+') {
            terms.push(self.term()?);
        }
        Ok(GroupDescriptor { terms })
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let (summand, inner) = self.atom()?;
        let outer = self.optional_power()?;
        Ok(Term {
            summand,
            multiplicity: inner * outer,
        })
    }

    fn atom(&mut self) -> Result<(Summand, Multiplicity), ParseError> {
        let one = Multiplicity::ONE;
        match self.peek() {
            Some('0') => {
                self.bump();
                Ok((Summand::Zero, one))
            }
            Some('Z') => {
                self.bump();
                if !self.eat('(') {
                    return Ok((Summand::Atom(UniformAtom::Rational(Characteristic::integers())), one));
                }
                let p = self.prime()?;
                self.expect('^')?;
                let atom = if self.eat_word("inf") {
                    UniformAtom::Prufer { p }
                } else {
                    UniformAtom::Cyclic {
                        p,
                        n: self.exponent()?,
                    }
                };
                self.expect(')')?;
                Ok((Summand::Atom(atom), one))
            }
            Some('Q') => {
                self.bump();
                if !self.eat('_') {
                    return Ok((Summand::Atom(UniformAtom::Rational(Characteristic::rationals())), one));
                }
                self.expect('(')?;
                let p = self.prime()?;
                self.expect(')')?;
                let chi = Characteristic::localization(p).expect("p checked prime");
                Ok((Summand::Atom(UniformAtom::Rational(chi)), one))
            }
            Some('R') => {
                self.bump();
                self.expect('(')?;
                let chi = self.chardesc()?;
                self.expect(')')?;
                Ok((Summand::Atom(UniformAtom::Rational(chi)), one))
            }
            Some('t') => {
                self.expect_word("tower")?;
                self.expect('(')?;
                let p = self.prime()?;
                self.expect(')')?;
                Ok((Summand::Tower(p), one))
            }
            Some('s') => self.family(),
            _ => Err(self.unexpected("a group atom")),
        }
    }

    fn family(&mut self) -> Result<(Summand, Multiplicity), ParseError> {
        self.expect_word("sum{p}")?;
        self.expect('[')?;
        let template = if self.eat_word("tower(p)") {
            FamilyTemplate::UnboundedTower
        } else {
            self.expect_word("Z(p^")?;
            let t = if self.eat_word("inf") {
                FamilyTemplate::PruferAll
            } else {
                FamilyTemplate::FixedExponent(self.exponent()?)
            };
            self.expect(')')?;
            t
        };
        let multiplicity = self.optional_power()?;
        self.expect(']')?;

        let mut excluded = BTreeSet::new();
        if self.eat('\\') {
            self.eat('\\');
            self.expect('{')?;
            loop {
                self.skip_ws();
                let start = self.pos;
                let p = self.prime()?;
                if !excluded.insert(p) {
                    return Err(ParseError {
                        position: start,
                        kind: ParseErrorKind::DuplicatePrime(p),
                    });
                }
                if !self.eat(',') {
                    break;
                }
            }
            self.expect('}')?;
        }
        Ok((Summand::Family { template, excluded }, multiplicity))
    }

    fn height(&mut self) -> Result<Height, ParseError> {
        if self.eat_word("inf") {
            return Ok(Height::Infinite);
        }
        self.skip_ws();
        let start = self.pos;
        let k = self.number()?;
        u32::try_from(k).map(Height::Finite).map_err(|_| ParseError {
            position: start,
            kind: ParseErrorKind::Overflow,
        })
    }

    fn chardesc(&mut self) -> Result<Characteristic, ParseError> {
        let default = if self.eat_word("inf") {
            Height::Infinite
        } else if self.eat('0') {
            Height::ZERO
        } else {
            return Err(self.unexpected("'0' or 'inf'"));
        };
        let mut seen = BTreeSet::new();
        let mut exceptions = Vec::new();
        while self.eat(';') {
            self.skip_ws();
            let start = self.pos;
            let p = self.prime()?;
            if !seen.insert(p) {
                return Err(ParseError {
                    position: start,
                    kind: ParseErrorKind::DuplicatePrime(p),
                });
            }
            self.expect(':')?;
            exceptions.push((p, self.height()?));
        }
        Ok(Characteristic::new(default, exceptions).expect("default and primes validated"))
    }
}

fn render_power(out: &mut String, m: Multiplicity) {
    if m != Multiplicity::ONE {
        out.push('^');
        out.push_str(&m.to_string());
    }
}

/// Renders a characteristic in the `R(...)` argument syntax.
pub fn render_chardesc(chi: &Characteristic) -> String {
    let mut out = chi.default_height().to_string();
    for (p, h) in chi.exceptions() {
        out.push_str(&format!(";{p}:{h}"));
    }
    out
}

fn render_rational(chi: &Characteristic) -> String {
    if *chi == Characteristic::integers() {
        return "Z".into();
    }
    if chi.is_divisible() {
        return "Q".into();
    }
    if chi.default_height() == Height::Infinite {
        if let [(&p, &Height::Finite(0))] = chi.exceptions().iter().collect::<Vec<_>>()[..] {
            return format!("Q_({p})");
        }
    }
    format!("R({})", render_chardesc(chi))
}

fn render_local(terms: &mut Vec<String>, p: u64, prof: &PrimaryProfile) {
    for (&n, &m) in prof.cyclic_summands() {
        let mut t = format!("Z({p}^{n})");
        render_power(&mut t, m);
        terms.push(t);
    }
    if let Some(m) = prof.prufer_multiplicity() {
        let mut t = format!("Z({p}^inf)");
        render_power(&mut t, m);
        terms.push(t);
    }
    if let Some(m) = prof.tower_multiplicity() {
        let mut t = format!("tower({p})");
        render_power(&mut t, m);
        terms.push(t);
    }
}

/// Deterministic text form; parsing it and canonicalizing gives back `group`.
pub fn render(group: &CanonicalGroup) -> String {
    let mut terms = Vec::new();
    for family in group.families() {
        let mut t = String::from("sum{p}[");
        t.push_str(&match family.template {
            FamilyTemplate::FixedExponent(e) => format!("Z(p^{e})"),
            FamilyTemplate::PruferAll => "Z(p^inf)".into(),
            FamilyTemplate::UnboundedTower => "tower(p)".into(),
        });
        render_power(&mut t, family.multiplicity);
        t.push(']');
        if !family.excluded.is_empty() {
            let list: Vec<String> = family.excluded.iter().map(u64::to_string).collect();
            t.push_str(&format!("\\{{{}}}", list.join(",")));
        }
        terms.push(t);
    }
    for (&p, prof) in group.overrides() {
        render_local(&mut terms, p, prof);
    }
    for (chi, m) in group.rational_atoms() {
        let mut t = render_rational(chi);
        render_power(&mut t, m);
        terms.push(t);
    }
    if terms.is_empty() {
        return "0".into();
    }
    terms.join(" + ")
}
