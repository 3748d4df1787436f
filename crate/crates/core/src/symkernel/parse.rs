//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('+' | '-') unary | power
//! power   := primary ('^' unary)?
//! primary := integer | ident | ident '(' args ')' | ident '[' ints ']' '(' args ')' | '(' expr ')'
//! ```
//!
//! Exponents must normalize to integer constants.

use num_bigint::BigInt;

use super::atom::{ElemKind, JetVar, DEPENDENT, EPS, MAX_JET_ORDER};
use super::coeff::Coeff;
use super::expr::Expr;
use super::SymError;

/// Lowercase names accepted as abstract (reduced) functions.
pub const REDUCED_FUNCTIONS: [&str; 4] = ["zeta", "phi", "beta", "rho"];

fn is_abstract_name(name: &str) -> bool {
    name.starts_with(|c: char| c.is_ascii_uppercase()) || REDUCED_FUNCTIONS.contains(&name)
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Punct(char),
    End,
}

struct Lexer<'a> {
    src: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn tokens(src: &'a str) -> Result<Vec<(Tok, usize)>, SymError> {
        let mut lx = Lexer { src, pos: 0 };
        let mut out = Vec::new();
        loop {
            let t = lx.next()?;
            let done = t.0 == Tok::End;
            out.push(t);
            if done {
                return Ok(out);
            }
        }
    }

    fn next(&mut self) -> Result<(Tok, usize), SymError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        let start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            return Ok((Tok::End, start));
        };
        if c.is_ascii_digit() {
            while self.pos < bytes.len() && bytes[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if bytes.get(self.pos) == Some(&b'.') {
                return Err(SymError::Syntax {
                    pos: self.pos,
                    msg: "decimal literals are not supported; write a fraction".into(),
                });
            }
            let n: BigInt = self.src[start..self.pos].parse().expect("digits");
            return Ok((Tok::Int(n), start));
        }
        if c.is_ascii_alphabetic() {
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            return Ok((Tok::Ident(self.src[start..self.pos].to_string()), start));
        }
        if "+-*/^()[],".contains(c as char) {
            self.pos += 1;
            return Ok((Tok::Punct(c as char), start));
        }
        let ch = self.src[start..].chars().next().expect("non-empty");
        Err(SymError::Syntax {
            pos: start,
            msg: format!("unexpected character `{ch}`"),
        })
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    i: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.i].0
    }

    fn pos(&self) -> usize {
        self.toks[self.i].1
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.i].0.clone();
        if self.i + 1 < self.toks.len() {
            self.i += 1;
        }
        t
    }

    fn eat(&mut self, c: char) -> bool {
        if *self.peek() == Tok::Punct(c) {
            self.bump();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<(), SymError> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.unexpected(&format!("expected `{c}`")))
        }
    }

    fn unexpected(&self, what: &str) -> SymError {
        let found = match self.peek() {
            Tok::Int(n) => format!("`{n}`"),
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Punct(c) => format!("`{c}`"),
            Tok::End => "end of input".to_string(),
        };
        SymError::Syntax {
            pos: self.pos(),
            msg: format!("{what}, found {found}"),
        }
    }

    fn expr(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.term()?;
        loop {
            if self.eat('+') {
                acc = acc.add(&self.term()?);
            } else if self.eat('-') {
                acc = acc.sub(&self.term()?);
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, SymError> {
        let mut acc = self.unary()?;
        loop {
            if self.eat('*') {
                acc = acc.mul(&self.unary()?);
            } else if *self.peek() == Tok::Punct('/') {
                let pos = self.pos();
                self.bump();
                let d = self.unary()?;
                acc = acc.div(&d).map_err(|_| SymError::Syntax {
                    pos,
                    msg: "division by zero".into(),
                })?;
            } else {
                return Ok(acc);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, SymError> {
        if self.eat('-') {
            return Ok(self.unary()?.neg());
        }
        if self.eat('+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, SymError> {
        let base = self.primary()?;
        if *self.peek() != Tok::Punct('^') {
            return Ok(base);
        }
        self.bump();
        let pos = self.pos();
        let exp = self.unary()?;
        let k = exp
            .as_constant()
            .filter(Coeff::is_integer)
            .and_then(|c| c.to_i64())
            .and_then(|k| i32::try_from(k).ok())
            .ok_or(SymError::NonIntegerExponent { pos })?;
        base.pow(k).map_err(|_| SymError::Syntax {
            pos,
            msg: "negative power of zero".into(),
        })
    }

    fn int_list(&mut self) -> Result<Vec<u32>, SymError> {
        let mut out = Vec::new();
        loop {
            match self.peek().clone() {
                Tok::Int(n) => {
                    let pos = self.pos();
                    self.bump();
                    let k = u32::try_from(n).map_err(|_| SymError::Syntax {
                        pos,
                        msg: "derivative index too large".into(),
                    })?;
                    out.push(k);
                }
                _ => return Err(self.unexpected("expected a derivative order")),
            }
            if !self.eat(',') {
                break;
            }
        }
        self.expect(']')?;
        Ok(out)
    }

    fn args(&mut self) -> Result<Vec<Expr>, SymError> {
        let mut out = vec![self.expr()?];
        while self.eat(',') {
            out.push(self.expr()?);
        }
        self.expect(')')?;
        Ok(out)
    }

    fn primary(&mut self) -> Result<Expr, SymError> {
        let pos = self.pos();
        match self.bump() {
            Tok::Int(n) => Ok(Expr::constant(Coeff::from_bigint(n))),
            Tok::Punct('(') => {
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.ident(name, pos),
            _ => {
                self.i -= 1;
                Err(self.unexpected("expected an operand"))
            }
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<Expr, SymError> {
        let bracket = *self.peek() == Tok::Punct('[');
        let paren = *self.peek() == Tok::Punct('(');
        if bracket || paren {
            if let Some(kind) = ElemKind::from_name(&name) {
                if bracket {
                    return Err(SymError::Syntax {
                        pos: self.pos(),
                        msg: format!("`{name}` does not take derivative indices"),
                    });
                }
                self.bump();
                let args = self.args()?;
                if args.len() != 1 {
                    return Err(SymError::Syntax {
                        pos,
                        msg: format!("`{name}` takes one argument"),
                    });
                }
                return Ok(Expr::elem(kind, args.into_iter().next().expect("one arg")));
            }
            if !is_abstract_name(&name) {
                return Err(SymError::UnknownFunction { name, pos });
            }
            let derivs = if bracket {
                self.bump();
                Some(self.int_list()?)
            } else {
                None
            };
            self.expect('(')?;
            let args = self.args()?;
            let derivs = derivs.unwrap_or_else(|| vec![0; args.len()]);
            if derivs.len() != args.len() {
                return Err(SymError::Syntax {
                    pos,
                    msg: format!(
                        "`{name}` has {} derivative indices for {} arguments",
                        derivs.len(),
                        args.len()
                    ),
                });
            }
            return Expr::func(&name, derivs, args);
        }
        if name == DEPENDENT {
            return Ok(Expr::u());
        }
        if let Some(suffix) = name.strip_prefix("u_") {
            let j = JetVar::from_suffix(suffix).ok_or_else(|| SymError::Syntax {
                pos,
                msg: format!("invalid jet coordinate `{name}`"),
            })?;
            if j.order() > MAX_JET_ORDER {
                return Err(SymError::JetOrderExceeded(j.to_string()));
            }
            return Ok(Expr::jet(j));
        }
        if name == EPS {
            return Ok(Expr::eps());
        }
        Ok(Expr::sym(&name))
    }
}

/// Parses and normalizes an expression.
pub fn parse(text: &str) -> Result<Expr, SymError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0 };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.unexpected("expected an operator or end of input"));
    }
    Ok(e)
}

/// Parses a comma-separated list of expressions at the top level.
pub fn parse_list(text: &str) -> Result<Vec<Expr>, SymError> {
    let toks = Lexer::tokens(text)?;
    let mut p = Parser { toks, i: 0 };
    let mut out = vec![p.expr()?];
    while p.eat(',') {
        out.push(p.expr()?);
    }
    if *p.peek() != Tok::End {
        return Err(p.unexpected("expected `,` or end of input"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symkernel::atom::Atom;

    #[test]
    fn parses_sum_of_three_terms() {
        let e = parse("eps*t^2 + x^2 + y^2").unwrap();
        assert_eq!(e.num().len(), 3);
        assert_eq!(e.to_string(), "eps*t^2 + x^2 + y^2");
    }

    #[test]
    fn parses_derivative_form() {
        let e = parse("V[1,0](x/t, y/t)").unwrap();
        let a = e.as_atom().and_then(Atom::as_func).unwrap();
        assert_eq!(a.derivs, vec![1, 0]);
        assert_eq!(e.to_string(), "V[1,0](x/t, y/t)");
    }

    #[test]
    fn jet_letters_commute() {
        assert!(parse("u_tx - u_xt").unwrap().is_literal_zero());
    }

    #[test]
    fn errors_carry_positions() {
        assert_eq!(parse("x + * y"), Err(SymError::Syntax { pos: 4, msg: "expected an operand, found `*`".into() }));
        assert_eq!(parse("foo(x)"), Err(SymError::UnknownFunction { name: "foo".into(), pos: 0 }));
        assert_eq!(parse("x^(1/2)"), Err(SymError::NonIntegerExponent { pos: 2 }));
        assert!(matches!(parse("x/(y-y)"), Err(SymError::Syntax { pos: 1, .. })));
    }

    #[test]
    fn print_parse_round_trip() {
        for s in [
            "(x + y)/t^2",
            "-3/2*eps*x*V[0,1](x, y)",
            "exp(kappa1*x)*zeta(t, y)",
            "sqrt(x)*u/(t^2 + 1)",
            "arctan(x/y) - u_tt",
        ] {
            let e = parse(s).unwrap();
            assert_eq!(parse(&e.to_string()).unwrap(), e, "{s} -> {e}");
        }
    }
}
