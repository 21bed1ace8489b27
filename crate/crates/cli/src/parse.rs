//! Recursive-descent parser for the expression language.
//!
//! ```text
//! expr     := sum
//! sum      := ('+'|'-')? term (('+'|'-') term)*
//! term     := rational? factor*          (at least one of the two)
//! factor   := atom | 'd^' nat factor | ':' factor+ ':' | 'circ(' int ',' expr ',' expr ')' | '(' expr ')'
//! atom     := 'a{'nat'}' | 'w{'nat','nat'}' | 'j{'nat'}' | 'Om{'nat','nat'}' | 'J{'nat'}' | 'vac'
//! rational := nat ('/' nat)?
//! ```
//!
//! Inside `:…:` a colon always closes the product, so nested Wick products are
//! written in parentheses. `#` starts a comment that runs to the end of the line.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use thiserror::Error;
use voaforge::Q;

use crate::expr::{Atom, Context, Expr, Term};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ParseError {
    #[error("{line}:{col}: syntax error: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("{line}:{col}: {found} mixes contexts: the expression already uses {expected} atoms")]
    MixedContext { line: usize, col: usize, found: String, expected: &'static str },
    #[error("{line}:{col}: malformed rational: {msg}")]
    Rational { line: usize, col: usize, msg: String },
}

pub fn parse(text: &str) -> Result<Expr, ParseError> {
    let mut p = Parser { chars: text.chars().collect(), pos: 0, context: None };
    let e = p.sum()?;
    p.skip_ws();
    if p.pos < p.chars.len() {
        return Err(p.syntax(format!("unexpected '{}'", p.chars[p.pos])));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
    context: Option<(Context, &'static str)>,
}

fn context_name(c: Context) -> &'static str {
    match c {
        Context::Fock => "state (a, w, j)",
        Context::NoPoly => "normally ordered (Om, J)",
    }
}

impl Parser {
    fn line_col(&self, pos: usize) -> (usize, usize) {
        let mut line = 1;
        let mut col = 1;
        for &c in &self.chars[..pos.min(self.chars.len())] {
            if c == '\n' {
                line += 1;
                col = 1;
            } else {
                col += 1;
            }
        }
        (line, col)
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.syntax_at(self.pos, msg)
    }

    fn syntax_at(&self, pos: usize, msg: impl Into<String>) -> ParseError {
        let (line, col) = self.line_col(pos);
        ParseError::Syntax { line, col, msg: msg.into() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.chars.len() {
            let c = self.chars[self.pos];
            if c.is_whitespace() {
                self.pos += 1;
            } else if c == '#' {
                while self.pos < self.chars.len() && self.chars[self.pos] != '\n' {
                    self.pos += 1;
                }
            } else {
                break;
            }
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn looking_at(&mut self, s: &str) -> bool {
        self.skip_ws();
        let n = s.chars().count();
        self.pos + n <= self.chars.len() && self.chars[self.pos..self.pos + n].iter().copied().eq(s.chars())
    }

    fn eat(&mut self, s: &str) -> bool {
        if self.looking_at(s) {
            self.pos += s.chars().count();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, s: &str) -> Result<(), ParseError> {
        if self.eat(s) {
            Ok(())
        } else {
            let found = self.peek().map(|c| format!("'{c}'")).unwrap_or_else(|| "end of input".into());
            Err(self.syntax(format!("expected '{s}', found {found}")))
        }
    }

    fn digits(&mut self) -> Option<String> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.chars.len() && self.chars[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| self.chars[start..self.pos].iter().collect())
    }

    fn nat(&mut self) -> Result<u32, ParseError> {
        let at = self.pos;
        let d = self.digits().ok_or_else(|| self.syntax("expected a natural number"))?;
        d.parse().map_err(|_| self.syntax_at(at, format!("number {d} is too large")))
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        let neg = self.eat("-");
        let at = self.pos;
        let d = self.digits().ok_or_else(|| self.syntax("expected an integer"))?;
        let v: i64 = d.parse().map_err(|_| self.syntax_at(at, format!("number {d} is too large")))?;
        Ok(if neg { -v } else { v })
    }

    fn rational(&mut self) -> Result<Option<Q>, ParseError> {
        let at = self.pos;
        let Some(num) = self.digits() else { return Ok(None) };
        let num: BigInt = num.parse().expect("digits");
        if !self.eat("/") {
            return Ok(Some(Q::from_integer(num)));
        }
        let den_at = self.pos;
        let Some(den) = self.digits() else {
            let (line, col) = self.line_col(den_at);
            return Err(ParseError::Rational { line, col, msg: "missing denominator after '/'".into() });
        };
        let den: BigInt = den.parse().expect("digits");
        if den.is_zero() {
            let (line, col) = self.line_col(at);
            return Err(ParseError::Rational { line, col, msg: format!("zero denominator in {num}/0") });
        }
        Ok(Some(Q::new(num, den)))
    }

    fn sum(&mut self) -> Result<Expr, ParseError> {
        let mut terms = Vec::new();
        let mut neg = if self.eat("+") {
            false
        } else {
            self.eat("-")
        };
        loop {
            let mut t = self.term()?;
            if neg {
                t.coeff = -t.coeff;
            }
            terms.push(t);
            if self.eat("+") {
                neg = false;
            } else if self.eat("-") {
                neg = true;
            } else {
                break;
            }
        }
        if terms.len() == 1 && terms[0].is_trivial() {
            return Ok(terms.pop().unwrap().factors.pop().unwrap());
        }
        Ok(Expr::Sum(terms))
    }

    fn starts_factor(&mut self) -> bool {
        ["a{", "w{", "j{", "Om{", "J{", "vac", "d^", ":", "circ(", "("].iter().any(|s| self.looking_at(s))
    }

    fn term(&mut self) -> Result<Term, ParseError> {
        let coeff = self.rational()?;
        let mut factors = Vec::new();
        while self.starts_factor() {
            factors.push(self.factor()?);
        }
        if coeff.is_none() && factors.is_empty() {
            let found = self.peek().map(|c| format!("'{c}'")).unwrap_or_else(|| "end of input".into());
            return Err(self.syntax(format!("expected a term, found {found}")));
        }
        Ok(Term::new(coeff.unwrap_or_else(Q::one), factors))
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        self.skip_ws();
        if self.eat("d^") {
            let k = self.nat()?;
            if !self.starts_factor() {
                return Err(self.syntax("expected a factor after d^k"));
            }
            return Ok(Expr::Deriv(k, Box::new(self.factor()?)));
        }
        if self.eat(":") {
            let mut v = Vec::new();
            while !self.looking_at(":") {
                if !self.starts_factor() {
                    let found = self.peek().map(|c| format!("'{c}'")).unwrap_or_else(|| "end of input".into());
                    return Err(self.syntax(format!("expected a factor or ':' inside a Wick product, found {found}")));
                }
                v.push(self.factor()?);
            }
            self.expect(":")?;
            if v.is_empty() {
                return Err(self.syntax("empty Wick product"));
            }
            return Ok(Expr::Wick(v));
        }
        if self.eat("circ(") {
            let m = self.int()?;
            self.expect(",")?;
            let a = self.sum()?;
            self.expect(",")?;
            let b = self.sum()?;
            self.expect(")")?;
            return Ok(Expr::Circ(m, Box::new(a), Box::new(b)));
        }
        if self.eat("(") {
            let e = self.sum()?;
            self.expect(")")?;
            return Ok(e);
        }
        self.atom().map(Expr::Atom)
    }

    fn atom(&mut self) -> Result<Atom, ParseError> {
        self.skip_ws();
        let start = self.pos;
        let atom = if self.eat("Om{") {
            let a = self.nat()?;
            self.expect(",")?;
            let b = self.nat()?;
            self.expect("}")?;
            Atom::Om(a, b)
        } else if self.eat("J{") {
            Atom::JSym(self.even_index(start)?)
        } else if self.eat("a{") {
            let i = self.nat()?;
            self.expect("}")?;
            if i == 0 {
                return Err(self.syntax_at(start, "generators are numbered from 1"));
            }
            Atom::Alpha(i)
        } else if self.eat("w{") {
            let a = self.nat()?;
            self.expect(",")?;
            let b = self.nat()?;
            self.expect("}")?;
            Atom::W(a, b)
        } else if self.eat("j{") {
            Atom::JState(self.even_index(start)?)
        } else if self.eat("vac") {
            Atom::Vac
        } else {
            return Err(self.syntax("expected an atom"));
        };
        if let Some(c) = atom.context() {
            match self.context {
                None => self.context = Some((c, context_name(c))),
                Some((seen, name)) if seen != c => {
                    let (line, col) = self.line_col(start);
                    return Err(ParseError::MixedContext { line, col, found: atom.to_string(), expected: name });
                }
                _ => {}
            }
        }
        Ok(atom)
    }

    /// The `2m` in `J{2m}` / `j{2m}`, returned as `m`.
    fn even_index(&mut self, start: usize) -> Result<u32, ParseError> {
        let v = self.nat()?;
        self.expect("}")?;
        if v % 2 == 1 {
            return Err(self.syntax_at(start, format!("index {v} must be even")));
        }
        Ok(v / 2)
    }
}
