//! Parser for polynomial expressions in `x1..x{2n}`, `i`, rational
//! numbers and the formal parameter `lam`, e.g. `"1/2*x1^2 - i*lam*x2"`.

use num_bigint::BigInt;
use num_rational::BigRational;

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::ComplexRational;

/// Highest λ-power an expression may produce.
pub const MAX_LAMBDA_POWER: usize = 64;

/// Parse into coefficients of λ^0, λ^1, …; trailing zero powers dropped,
/// at least one entry.
pub fn parse_series(src: &str, nvars: usize) -> Result<Vec<Poly>> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        nvars,
    };
    p.skip_ws();
    if p.pos == p.src.len() {
        return Err(p.error("empty expression"));
    }
    let mut v = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return Err(p.error("unexpected trailing input"));
    }
    while v.len() > 1 && v.last().is_some_and(Poly::is_zero) {
        v.pop();
    }
    Ok(v)
}

/// Parse an expression that must not contain `lam`.
pub fn parse_poly(src: &str, nvars: usize) -> Result<Poly> {
    let mut v = parse_series(src, nvars)?;
    if v.len() > 1 {
        return Err(Error::Parse {
            line: 1,
            column: 1,
            message: format!("'lam' not allowed here: {src}"),
        });
    }
    Ok(v.remove(0))
}

/// Parse a constant (no variables, no `lam`).
pub fn parse_constant(src: &str) -> Result<ComplexRational> {
    let p = parse_poly(src, 0)?;
    Ok(p.constant_term())
}

type Series = Vec<Poly>;

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    nvars: usize,
}

impl Parser<'_> {
    fn error(&self, message: &str) -> Error {
        Error::Parse {
            line: 1,
            column: self.pos + 1,
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

    fn constant(&self, c: ComplexRational) -> Series {
        vec![Poly::constant(self.nvars, c)]
    }

    fn expr(&mut self) -> Result<Series> {
        let mut acc = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            acc = combine(&acc, &rhs, if c == b'+' { 1 } else { -1 });
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<Series> {
        let mut acc = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            let at = self.pos;
            let rhs = self.unary()?;
            if c == b'*' {
                acc = self.multiply(&acc, &rhs)?;
            } else {
                let divisor = (rhs.len() == 1 && rhs[0].is_constant())
                    .then(|| rhs[0].constant_term())
                    .and_then(|d| d.inv())
                    .ok_or_else(|| Error::Parse {
                        line: 1,
                        column: at + 1,
                        message: "division only by a nonzero constant".into(),
                    })?;
                acc = acc.iter().map(|p| p.scale(&divisor)).collect();
            }
        }
        Ok(acc)
    }

    fn unary(&mut self) -> Result<Series> {
        match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Ok(self.unary()?.iter().map(|p| -p).collect())
            }
            Some(b'+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Series> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            self.skip_ws();
            let e = self.integer()?;
            let e: u32 = e.try_into().map_err(|_| self.error("exponent too large"))?;
            let mut acc = self.constant(ComplexRational::from_int(1));
            for _ in 0..e {
                acc = self.multiply(&acc, &base)?;
            }
            return Ok(acc);
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<BigInt> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.error("expected an integer"));
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii digits");
        Ok(s.parse().expect("digits parse"))
    }

    fn atom(&mut self) -> Result<Series> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let v = self.expr()?;
                if self.peek() != Some(b')') {
                    return Err(self.error("expected ')'"));
                }
                self.pos += 1;
                Ok(v)
            }
            Some(c) if c.is_ascii_digit() => {
                let int = self.integer()?;
                let mut q = BigRational::from_integer(int);
                if self.src.get(self.pos) == Some(&b'.') {
                    self.pos += 1;
                    let start = self.pos;
                    let frac = self.integer()?;
                    let scale = BigInt::from(10).pow((self.pos - start) as u32);
                    q += BigRational::new(frac, scale);
                }
                Ok(self.constant(ComplexRational::real(q)))
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = std::str::from_utf8(&self.src[start..self.pos]).expect("ascii");
                match word {
                    "i" => Ok(self.constant(ComplexRational::i())),
                    "lam" | "lambda" => {
                        let z = Poly::zero(self.nvars);
                        Ok(vec![z, Poly::one(self.nvars)])
                    }
                    w if w.starts_with('x') && w.len() > 1 && w[1..].bytes().all(|b| b.is_ascii_digit()) => {
                        let k: usize = w[1..].parse().map_err(|_| self.error("bad variable index"))?;
                        if k == 0 || k > self.nvars {
                            self.pos = start;
                            return Err(Error::Parse {
                                line: 1,
                                column: start + 1,
                                message: format!("variable {w} out of range x1..x{}", self.nvars),
                            });
                        }
                        Ok(vec![Poly::var(self.nvars, k - 1)])
                    }
                    _ => {
                        self.pos = start;
                        Err(self.error(&format!("unknown identifier '{word}'")))
                    }
                }
            }
            Some(_) => Err(self.error("unexpected character")),
            None => Err(self.error("unexpected end of expression")),
        }
    }

    fn multiply(&self, a: &Series, b: &Series) -> Result<Series> {
        let len = a.len() + b.len() - 1;
        if len > MAX_LAMBDA_POWER + 1 {
            return Err(self.error("power of lam too large"));
        }
        let mut out = vec![Poly::zero(self.nvars); len];
        for (i, p) in a.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            for (j, q) in b.iter().enumerate() {
                if !q.is_zero() {
                    out[i + j] += &(p * q);
                }
            }
        }
        Ok(out)
    }
}

fn combine(a: &Series, b: &Series, sign: i64) -> Series {
    let nvars = a[0].nvars();
    let mut out = a.clone();
    out.resize(a.len().max(b.len()), Poly::zero(nvars));
    let c = ComplexRational::from_int(sign);
    for (o, q) in out.iter_mut().zip(b) {
        o.add_scaled(q, &c);
    }
    out
}

/// True when `s` parses to the zero polynomial.
pub fn is_zero_expression(s: &str, nvars: usize) -> bool {
    parse_series(s, nvars).is_ok_and(|v| v.iter().all(Poly::is_zero))
}

impl std::str::FromStr for ComplexRational {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_constant(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips_display() {
        for s in ["x1^2 + 1/2*x1 + x2 - 3*i", "(1/2+3*i)*x1*x2^3", "-i*x2", "0", "7/3"] {
            let p = parse_poly(s, 2).unwrap();
            assert_eq!(parse_poly(&p.to_string(), 2).unwrap(), p);
        }
        assert_eq!(parse_poly("x1^2 + 1/2*x1 + x2 - 3*i", 2).unwrap().to_string(), "x1^2 + 1/2*x1 + x2 - 3*i");
    }

    #[test]
    fn lambda_powers() {
        let v = parse_series("x1 + lam*(x2 - 1) + lam^2/4", 2).unwrap();
        assert_eq!(v.len(), 3);
        assert_eq!(v[1], &Poly::var(2, 1) - &Poly::one(2));
        assert_eq!(v[2], Poly::constant(2, ComplexRational::from_frac(1, 4)));
        assert!(parse_poly("lam", 2).is_err());
    }

    #[test]
    fn decimals_and_errors() {
        assert_eq!(parse_constant("1.25").unwrap(), ComplexRational::from_frac(5, 4));
        assert!(matches!(parse_poly("x3", 2), Err(Error::Parse { column: 1, .. })));
        assert!(parse_poly("x1/x2", 2).is_err());
        assert!(parse_poly("(x1", 2).is_err());
        assert!(parse_poly("x1 +", 2).is_err());
        assert!(parse_poly("", 2).is_err());
    }
}
