//! Reader for the text forms produced by [`RatFn::to_factored`] and
//! [`RatFn::to_expanded`]: integers, the symbol `m`, `+ - * / ^`,
//! parentheses, and implicit multiplication by juxtaposition (`4m(m+1)`).

use super::{ExactError, RatFn};

pub fn parse_ratfn(s: &str) -> Result<RatFn, ExactError> {
    let toks: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    let mut p = Parser { toks: &toks, pos: 0, src: s };
    let v = p.expr()?;
    if p.pos != toks.len() {
        return Err(p.err("trailing input"));
    }
    Ok(v)
}

struct Parser<'a> {
    toks: &'a [char],
    pos: usize,
    src: &'a str,
}

impl Parser<'_> {
    fn err(&self, what: &str) -> ExactError {
        ExactError::Parse { input: self.src.to_string(), reason: format!("{what} at offset {}", self.pos) }
    }

    fn peek(&self) -> Option<char> {
        self.toks.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<RatFn, ExactError> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = acc + self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = acc - self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<RatFn, ExactError> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = acc * self.unary()?;
                }
                Some('/') => {
                    self.pos += 1;
                    let d = self.unary()?;
                    if d.is_zero() {
                        return Err(ExactError::DivisionByZero);
                    }
                    acc = acc / d;
                }
                Some(c) if c == '(' || c == 'm' || c.is_ascii_digit() => {
                    acc = acc * self.power()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<RatFn, ExactError> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<RatFn, ExactError> {
        let base = self.atom()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.err("exponent too large"))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<RatFn, ExactError> {
        match self.peek() {
            Some('m') => {
                self.pos += 1;
                Ok(RatFn::m())
            }
            Some('(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let n = self.integer()?;
                Ok(RatFn::constant(super::Rat::from_integer(n.into())))
            }
            _ => Err(self.err("expected number, 'm' or '('")),
        }
    }

    fn integer(&mut self) -> Result<i64, ExactError> {
        let start = self.pos;
        while self.peek().is_some_and(|c| c.is_ascii_digit()) {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected digits"));
        }
        let digits: String = self.toks[start..self.pos].iter().collect();
        digits.parse::<i64>().map_err(|_| self.err("integer out of range"))
    }
}

#[cfg(test)]
mod tests {
    use num_traits::Zero;

    use super::*;

    #[test]
    fn reads_factored_total() {
        let s = "-24(m-1)(4m^3-m^2+m+2)/((m+1)(2m+1)(2m+3)(3m+2))";
        let v = parse_ratfn(s).unwrap();
        assert_eq!(v.to_factored(), s);
        assert_eq!(v.eval_int(2).unwrap(), super::super::Rat::new((-32).into(), 35.into()));
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_ratfn("m+").is_err());
        assert!(parse_ratfn("(m").is_err());
        assert!(parse_ratfn("1/0").is_err());
        assert!(parse_ratfn("x").is_err());
    }

    #[test]
    fn reads_zero() {
        assert!(parse_ratfn("0").unwrap().numer().coeff(0).is_zero());
    }
}
