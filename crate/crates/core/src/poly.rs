//! Sparse multivariate polynomials over [`ComplexRational`] in the chart
//! coordinates `x1..x{2n}`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_traits::{One, Zero};
use smallvec::SmallVec;

use crate::scalar::ComplexRational;

/// Exponent vector of a monomial, one entry per coordinate.
pub type Exponents = SmallVec<[u16; 8]>;

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    nvars: usize,
    terms: BTreeMap<Exponents, ComplexRational>,
}

impl Poly {
    pub fn zero(nvars: usize) -> Self {
        Self {
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(nvars: usize, c: ComplexRational) -> Self {
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(SmallVec::from_elem(0, nvars), c);
        }
        p
    }

    pub fn one(nvars: usize) -> Self {
        Self::constant(nvars, ComplexRational::one())
    }

    pub fn from_int(nvars: usize, k: i64) -> Self {
        Self::constant(nvars, ComplexRational::from_int(k))
    }

    /// The coordinate `x_{k+1}` (zero-based `k`).
    pub fn var(nvars: usize, k: usize) -> Self {
        assert!(k < nvars, "coordinate index {k} out of range");
        Self::monomial(nvars, unit_exponents(nvars, k), ComplexRational::one())
    }

    pub fn monomial(nvars: usize, exps: Exponents, c: ComplexRational) -> Self {
        assert_eq!(exps.len(), nvars);
        let mut p = Self::zero(nvars);
        if !c.is_zero() {
            p.terms.insert(exps, c);
        }
        p
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &ComplexRational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u16]) -> ComplexRational {
        self.terms.get(exps).cloned().unwrap_or_default()
    }

    /// Constant term.
    pub fn constant_term(&self) -> ComplexRational {
        self.coeff(&SmallVec::<[u16; 8]>::from_elem(0, self.nvars))
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e.iter().all(|&x| x == 0))
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms
            .keys()
            .map(|e| e.iter().map(|&x| x as u32).sum())
            .max()
    }

    pub fn add_term(&mut self, exps: Exponents, c: &ComplexRational) {
        if c.is_zero() {
            return;
        }
        debug_assert_eq!(exps.len(), self.nvars);
        match self.terms.entry(exps) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c.clone());
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c * other`
    pub fn add_scaled(&mut self, other: &Poly, c: &ComplexRational) {
        assert_eq!(self.nvars, other.nvars, "polynomial ring mismatch");
        if c.is_zero() {
            return;
        }
        let unit = c.is_one();
        for (e, v) in &other.terms {
            if unit {
                self.add_term(e.clone(), v);
            } else {
                self.add_term(e.clone(), &(v * c));
            }
        }
    }

    pub fn scale(&self, c: &ComplexRational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.nvars);
        }
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v * c)).collect(),
        }
    }

    /// Partial derivative with respect to the zero-based coordinate `k`.
    pub fn derivative(&self, k: usize) -> Poly {
        assert!(k < self.nvars, "coordinate index {k} out of range");
        let mut out = Poly::zero(self.nvars);
        for (e, v) in &self.terms {
            if e[k] == 0 {
                continue;
            }
            let mut e2 = e.clone();
            e2[k] -= 1;
            out.terms.insert(e2, v.scale_int(e[k] as i64));
        }
        out
    }

    /// Complex conjugate of every coefficient (coordinates are real).
    pub fn conj(&self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), v.conj())).collect(),
        }
    }

    pub fn is_real(&self) -> bool {
        self.terms.values().all(ComplexRational::is_real)
    }

    /// Evaluate at a point with rational (complex) coordinates.
    pub fn eval(&self, point: &[ComplexRational]) -> ComplexRational {
        assert_eq!(point.len(), self.nvars);
        let mut acc = ComplexRational::zero();
        for (e, v) in &self.terms {
            let mut t = v.clone();
            for (k, &p) in e.iter().enumerate() {
                for _ in 0..p {
                    t = &t * &point[k];
                }
            }
            acc += &t;
        }
        acc
    }
}

pub(crate) fn unit_exponents(nvars: usize, k: usize) -> Exponents {
    let mut e: Exponents = SmallVec::from_elem(0, nvars);
    e[k] = 1;
    e
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        for (e, v) in &rhs.terms {
            self.add_term(e.clone(), v);
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        for (e, v) in &rhs.terms {
            self.add_term(e.clone(), &-v);
        }
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            nvars: self.nvars,
            terms: self.terms.iter().map(|(e, v)| (e.clone(), -v)).collect(),
        }
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.nvars, rhs.nvars, "polynomial ring mismatch");
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero(self.nvars);
        }
        let mut prods: Vec<(Exponents, ComplexRational)> = Vec::with_capacity(self.len() * rhs.len());
        for (ea, va) in &self.terms {
            for (eb, vb) in &rhs.terms {
                let e: Exponents = ea.iter().zip(eb.iter()).map(|(a, b)| a + b).collect();
                prods.push((e, va * vb));
            }
        }
        prods.sort_unstable_by(|a, b| a.0.cmp(&b.0));
        let mut merged: Vec<(Exponents, ComplexRational)> = Vec::with_capacity(prods.len());
        for (e, v) in prods {
            match merged.last_mut() {
                Some((last, acc)) if *last == e => *acc += &v,
                _ => merged.push((e, v)),
            }
        }
        Poly {
            nvars: self.nvars,
            terms: merged.into_iter().filter(|(_, v)| !v.is_zero()).collect(),
        }
    }
}

impl fmt::Display for Poly {
    /// Terms in descending lexicographic order of exponent vectors.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (idx, (e, c)) in self.terms.iter().rev().enumerate() {
            let term = format_term(e, c);
            if idx == 0 {
                write!(f, "{term}")?;
            } else if let Some(rest) = term.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {term}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({self})")
    }
}

fn format_term(e: &[u16], c: &ComplexRational) -> String {
    let mono: Vec<String> = e
        .iter()
        .enumerate()
        .filter(|(_, &p)| p > 0)
        .map(|(k, &p)| {
            if p == 1 {
                format!("x{}", k + 1)
            } else {
                format!("x{}^{}", k + 1, p)
            }
        })
        .collect();
    if mono.is_empty() {
        return c.to_string();
    }
    let mono = mono.join("*");
    if c.is_one() {
        mono
    } else if *c == -ComplexRational::one() {
        format!("-{mono}")
    } else {
        format!("{c}*{mono}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn product_and_derivative() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let p = &(&x + &y) * &(&x - &y);
        assert_eq!(p.to_string(), "x1^2 - x2^2");
        assert_eq!(p.derivative(0).to_string(), "2*x1");
        assert_eq!(p.derivative(1).to_string(), "-2*x2");
        assert!((&p - &p).is_zero());
    }

    #[test]
    fn display_is_descending_lex() {
        let x = Poly::var(2, 0);
        let y = Poly::var(2, 1);
        let mut p = &(&x * &x) + &y;
        p += &Poly::constant(2, ComplexRational::imag_int(-3));
        p += &x.scale(&ComplexRational::from_frac(1, 2));
        assert_eq!(p.to_string(), "x1^2 + 1/2*x1 + x2 - 3*i");
    }
}
