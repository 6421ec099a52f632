use super::{NCPoly, PolyError};
use crate::matcore::C64;

/// Parses the polynomial grammar described in the module docs.
pub fn parse(text: &str, num_vars: u32) -> Result<NCPoly, PolyError> {
    let mut p = Parser {
        src: text.as_bytes(),
        pos: 0,
        num_vars,
    };
    let poly = p.expr()?;
    p.skip_ws();
    if p.pos < p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    Ok(poly)
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    num_vars: u32,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> PolyError {
        PolyError::Syntax {
            offset: self.pos,
            message: message.to_string(),
        }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<NCPoly, PolyError> {
        let mut negate = false;
        match self.peek() {
            Some(b'-') => {
                negate = true;
                self.pos += 1;
            }
            Some(b'+') => self.pos += 1,
            _ => {}
        }
        let first = self.term()?;
        let mut acc = if negate { first.neg() } else { first };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = acc.add(&self.term()?);
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = acc.sub(&self.term()?);
                }
                _ => break,
            }
        }
        Ok(acc.with_num_vars(self.num_vars).expect("indices are checked while parsing"))
    }

    fn term(&mut self) -> Result<NCPoly, PolyError> {
        let (mut acc, mut was_number) = self.factor()?;
        loop {
            match self.peek() {
                Some(b'*') => {
                    self.pos += 1;
                    let (f, num) = self.factor()?;
                    acc = acc.mul(&f);
                    was_number = num;
                }
                // Juxtaposed coefficient: `2X1`, `3i(X1+X2)`.
                Some(b'X') | Some(b'(') if was_number => {
                    let (f, num) = self.factor()?;
                    acc = acc.mul(&f);
                    was_number = num;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    /// Returns the factor and whether it was a bare numeric literal.
    fn factor(&mut self) -> Result<(NCPoly, bool), PolyError> {
        let (mut poly, mut is_number) = self.primary()?;
        while self.peek() == Some(b'\'') {
            self.pos += 1;
            poly = poly.adjoint();
            is_number = false;
        }
        Ok((poly, is_number))
    }

    fn primary(&mut self) -> Result<(NCPoly, bool), PolyError> {
        let n = self.num_vars;
        match self.peek() {
            Some(b'X') => {
                let start = self.pos;
                self.pos += 1;
                let digits = self.digits();
                if digits.is_empty() {
                    return Err(self.error("expected variable index after 'X'"));
                }
                let index: u32 = digits
                    .parse()
                    .map_err(|_| PolyError::Syntax {
                        offset: start,
                        message: "variable index too large".into(),
                    })?;
                if index == 0 {
                    return Err(PolyError::Syntax {
                        offset: start,
                        message: "variable indices start at 1".into(),
                    });
                }
                if index > n {
                    return Err(PolyError::VarOutOfRange {
                        index,
                        num_vars: n,
                        offset: start,
                    });
                }
                Ok((NCPoly::var(n, index), false))
            }
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok((inner, false))
            }
            Some(b'i') => {
                self.pos += 1;
                Ok((NCPoly::constant(n, C64::new(0.0, 1.0)), true))
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.pos;
                let value = self.number()?;
                if !value.is_finite() {
                    return Err(PolyError::Syntax {
                        offset: start,
                        message: "coefficient overflows".into(),
                    });
                }
                let c = if self.src.get(self.pos) == Some(&b'i') {
                    self.pos += 1;
                    C64::new(0.0, value)
                } else {
                    C64::new(value, 0.0)
                };
                Ok((NCPoly::constant(n, c), true))
            }
            Some(_) => Err(self.error("expected a variable, number or '('")),
            None => Err(self.error("unexpected end of input")),
        }
    }

    fn digits(&mut self) -> &str {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits")
    }

    fn number(&mut self) -> Result<f64, PolyError> {
        let start = self.pos;
        self.digits();
        if self.src.get(self.pos) == Some(&b'.') {
            self.pos += 1;
            self.digits();
        }
        if matches!(self.src.get(self.pos), Some(b'e') | Some(b'E')) {
            let save = self.pos;
            self.pos += 1;
            if matches!(self.src.get(self.pos), Some(b'+') | Some(b'-')) {
                self.pos += 1;
            }
            if self.digits().is_empty() {
                self.pos = save;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii number");
        text.parse::<f64>().map_err(|_| PolyError::Syntax {
            offset: start,
            message: format!("malformed number '{text}'"),
        })
    }
}
