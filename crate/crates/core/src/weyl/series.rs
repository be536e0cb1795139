//! Formal power series in λ with fiber-valued coefficients: the symbols
//! that graded elements project to, and the inputs of the Taylor maps.

use std::fmt;

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::parse_poly;
use crate::poly::Poly;
use crate::scalar::ComplexRational;
use crate::weyl::fiber::{EndMatrix, Fiber, FiberVector, Scalar};

/// `Σ_k λ^k c_k`, truncated after λ^order.
#[derive(Clone, PartialEq, Debug)]
pub struct FormalSeries<F: Fiber> {
    n: usize,
    rank: usize,
    coeffs: Vec<F>,
}

pub type FormalFunction = FormalSeries<Scalar>;
pub type FormalEndo = FormalSeries<EndMatrix>;
pub type FormalSection = FormalSeries<FiberVector>;

impl<F: Fiber> FormalSeries<F> {
    pub fn zero(n: usize, rank: usize, order: usize) -> Self {
        Self {
            n,
            rank,
            coeffs: vec![F::zero(2 * n, rank); order + 1],
        }
    }

    /// A series with a single classical term.
    pub fn classical(n: usize, rank: usize, order: usize, value: F) -> Self {
        let mut s = Self::zero(n, rank, order);
        s.coeffs[0] = value;
        s
    }

    pub fn from_coeffs(n: usize, rank: usize, coeffs: Vec<F>) -> Self {
        assert!(!coeffs.is_empty(), "a formal series needs at least one coefficient");
        Self { n, rank, coeffs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Highest stored λ-power.
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[F] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> &F {
        &self.coeffs[k]
    }

    pub fn set_coeff(&mut self, k: usize, value: F) {
        self.coeffs[k] = value;
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(F::is_zero)
    }

    /// Drop (or zero-pad up to) λ-powers beyond `order`.
    pub fn with_order(&self, order: usize) -> Self {
        let mut coeffs = self.coeffs.clone();
        coeffs.resize(order + 1, F::zero(2 * self.n, self.rank));
        Self {
            n: self.n,
            rank: self.rank,
            coeffs,
        }
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        self.map(|p| p.scale(c))
    }

    /// Apply `f` to every polynomial entry of every coefficient.
    pub fn map(&self, mut f: impl FnMut(&Poly) -> Poly) -> Self {
        Self {
            n: self.n,
            rank: self.rank,
            coeffs: self.coeffs.iter().map(|c| c.map_entries(&mut f)).collect(),
        }
    }

    pub fn conj(&self) -> Self {
        self.map(Poly::conj)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.combine(other, &ComplexRational::from_int(1))
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.combine(other, &ComplexRational::from_int(-1))
    }

    fn combine(&self, other: &Self, c: &ComplexRational) -> Self {
        let order = self.order().min(other.order());
        let mut out = self.with_order(order);
        for (a, b) in out.coeffs.iter_mut().zip(&other.coeffs) {
            a.add_scaled(b, c);
        }
        out
    }
}

impl<F: Fiber> FormalSeries<F> {
    pub fn to_json(&self) -> Value {
        let mut terms = vec![];
        for (k, c) in self.coeffs.iter().enumerate() {
            for (idx, p) in c.entries().iter().enumerate() {
                let mut t = json!({"lambda": k, "poly": p.to_string()});
                let label = F::KIND.entry_label(self.rank, idx);
                if !label.is_empty() {
                    t["entry"] = json!(label);
                }
                terms.push(t);
            }
        }
        json!({"kind": F::KIND.name(), "n": self.n, "rank": self.rank, "order": self.order(), "terms": terms})
    }

    /// Inverse of the `Display` form. Missing lines are zero; the order is
    /// the highest λ-power present.
    pub fn from_text(text: &str, n: usize, rank: usize) -> Result<Self> {
        let d = 2 * n;
        let mut rows: Vec<(usize, usize, Poly)> = vec![];
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let bad = |m: &str| Error::Parse {
                line: i + 1,
                column: 1,
                message: format!("{m}: '{line}'"),
            };
            let (head, poly) = line.split_once(':').ok_or_else(|| bad("expected 'lambda^k: poly'"))?;
            let head = head.strip_prefix("lambda^").ok_or_else(|| bad("expected 'lambda^k'"))?;
            let (k, label) = match head.split_once(' ') {
                Some((k, l)) => (k, Some(l.trim())),
                None => (head, None),
            };
            let k: usize = k.trim().parse().map_err(|_| bad("bad λ-power"))?;
            let idx: Vec<usize> = match label {
                None => vec![],
                Some(l) => l
                    .strip_prefix('[')
                    .and_then(|l| l.strip_suffix(']'))
                    .ok_or_else(|| bad("bad entry label"))?
                    .split(',')
                    .map(|t| t.trim().parse::<usize>().map_err(|_| bad("bad entry label")))
                    .collect::<Result<_>>()?,
            };
            let slot = match (F::KIND, idx.as_slice()) {
                (crate::weyl::FiberKind::Scalar, []) => 0,
                (crate::weyl::FiberKind::FiberVector, [a]) if (1..=rank).contains(a) => a - 1,
                (crate::weyl::FiberKind::EndMatrix, [a, b]) if (1..=rank).contains(a) && (1..=rank).contains(b) => {
                    (a - 1) * rank + (b - 1)
                }
                _ => return Err(bad("entry label does not fit the fiber")),
            };
            let p = parse_poly(poly.trim(), d).map_err(|e| match e {
                Error::Parse { message, .. } => bad(&message),
                other => other,
            })?;
            rows.push((k, slot, p));
        }
        let order = rows.iter().map(|r| r.0).max().unwrap_or(0);
        let mut out = Self::zero(n, rank, order);
        for (k, slot, p) in rows {
            out.coeffs[k].entries_mut()[slot] = p;
        }
        Ok(out)
    }
}

impl FormalFunction {
    pub fn from_polys(n: usize, coeffs: Vec<Poly>) -> Self {
        Self::from_coeffs(n, 1, coeffs.into_iter().map(Scalar).collect())
    }

    pub fn poly(&self, k: usize) -> &Poly {
        &self.coeffs[k].0
    }
}

impl<F: Fiber> fmt::Display for FormalSeries<F> {
    /// One line per λ-order (and per fiber entry for non-scalar fibers).
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, c) in self.coeffs.iter().enumerate() {
            for (idx, p) in c.entries().iter().enumerate() {
                let label = F::KIND.entry_label(self.rank, idx);
                if label.is_empty() {
                    writeln!(f, "lambda^{k}: {p}")?;
                } else {
                    let l: Vec<String> = label.iter().map(|x| x.to_string()).collect();
                    writeln!(f, "lambda^{k} [{}]: {p}", l.join(","))?;
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_round_trip() {
        let mut m = EndMatrix::zero(2, 2);
        m.set(0, 1, Poly::var(2, 0));
        m.set(1, 1, Poly::constant(2, ComplexRational::i()));
        let s = FormalEndo::from_coeffs(1, 2, vec![m.clone(), m]);
        let text = s.to_string();
        assert_eq!(FormalEndo::from_text(&text, 1, 2).unwrap(), s);
        assert_eq!(FormalEndo::from_text(&text, 1, 2).unwrap().to_string(), text);
        assert!(FormalFunction::from_text(&text, 1, 1).is_err());
        let f = FormalFunction::from_polys(1, vec![Poly::one(2), Poly::zero(2)]);
        assert_eq!(FormalFunction::from_text(&f.to_string(), 1, 1).unwrap(), f);
        assert_eq!(f.to_json()["terms"][0]["poly"], "1");
    }
}
