//! Seeded generators for polynomials, graded elements and formal series.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::poly::{Exponents, Poly};
use crate::scalar::ComplexRational;
use crate::weyl::{Fiber, FormalEndo, FormalFunction, FormalSection, FormalSeries, GradedElement, GradedKey, TruncationOrder};

/// Bounds and counts for random inputs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RandomSpec {
    pub seed: u64,
    /// Highest coordinate degree of coefficient polynomials.
    pub max_poly_degree: u32,
    pub max_poly_terms: usize,
    /// Highest λ-power in random formal series and elements.
    pub max_lambda_order: usize,
    pub max_sym_degree: u32,
    pub max_asym_degree: u32,
    /// Terms per random element.
    pub max_terms: usize,
    /// Trials per property.
    pub count: usize,
}

impl Default for RandomSpec {
    fn default() -> Self {
        Self {
            seed: 1,
            max_poly_degree: 3,
            max_poly_terms: 3,
            max_lambda_order: 1,
            max_sym_degree: 3,
            max_asym_degree: 2,
            max_terms: 4,
            count: 100,
        }
    }
}

/// A deterministic stream of random inputs for one chart and rank.
pub struct Sampler {
    rng: ChaCha8Rng,
    spec: RandomSpec,
    n: usize,
    rank: usize,
}

impl Sampler {
    pub fn new(spec: &RandomSpec, n: usize, rank: usize) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(spec.seed),
            spec: spec.clone(),
            n,
            rank,
        }
    }

    /// A sampler for a sub-stream, so that suites do not shift each
    /// other's inputs.
    pub fn fork(&self, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(self.spec.seed);
        rng.set_stream(stream);
        Self {
            rng,
            spec: self.spec.clone(),
            n: self.n,
            rank: self.rank,
        }
    }

    pub fn spec(&self) -> &RandomSpec {
        &self.spec
    }

    pub fn count(&self) -> usize {
        self.spec.count
    }

    fn coefficient(&mut self) -> ComplexRational {
        let num = loop {
            let k = self.rng.gen_range(-3i64..=3);
            if k != 0 {
                break k;
            }
        };
        let den = *[1i64, 1, 1, 2, 3].choose(&mut self.rng).expect("nonempty");
        let c = ComplexRational::from_frac(num, den);
        match self.rng.gen_range(0..6) {
            0 => c.mul_i_pow(1),
            1 => &c + &ComplexRational::i(),
            _ => c,
        }
    }

    /// Random polynomial with at least one term.
    pub fn poly(&mut self) -> Poly {
        let dim = 2 * self.n;
        let mut p = Poly::zero(dim);
        let terms = self.rng.gen_range(1..=self.spec.max_poly_terms.max(1));
        for _ in 0..terms {
            let deg = self.rng.gen_range(0..=self.spec.max_poly_degree);
            let mut e: Exponents = smallvec::SmallVec::from_elem(0, dim);
            for _ in 0..deg {
                e[self.rng.gen_range(0..dim)] += 1;
            }
            let c = self.coefficient();
            p.add_term(e, &c);
        }
        if p.is_zero() {
            Poly::one(dim)
        } else {
            p
        }
    }

    /// Random real polynomial.
    pub fn real_poly(&mut self) -> Poly {
        let p = self.poly();
        let re = &p + &p.conj();
        if re.is_zero() {
            Poly::one(2 * self.n)
        } else {
            re
        }
    }

    pub fn fiber<F: Fiber>(&mut self) -> F {
        let len = F::KIND.len(self.rank);
        let entries = (0..len)
            .map(|_| if self.rng.gen_bool(0.7) { self.poly() } else { Poly::zero(2 * self.n) })
            .collect();
        let f = F::from_entries(self.rank, entries);
        if f.is_zero() {
            let mut entries = vec![Poly::zero(2 * self.n); len];
            entries[0] = self.poly();
            F::from_entries(self.rank, entries)
        } else {
            f
        }
    }

    fn key(&mut self, trunc: TruncationOrder, asym_degree: Option<u32>) -> GradedKey {
        let dim = 2 * self.n;
        let top = trunc.get().max(0) as u32;
        let max_lam = (self.spec.max_lambda_order as u32).min(top / 2);
        let lam = self.rng.gen_range(0..=max_lam);
        let sym_room = (top - 2 * lam).min(self.spec.max_sym_degree);
        let sym_deg = self.rng.gen_range(0..=sym_room);
        let sym: Vec<usize> = (0..sym_deg).map(|_| self.rng.gen_range(0..dim)).collect();
        let adeg = asym_degree
            .unwrap_or_else(|| self.rng.gen_range(0..=self.spec.max_asym_degree))
            .min(dim as u32);
        let mut idx: Vec<usize> = (0..dim).collect();
        idx.shuffle(&mut self.rng);
        idx.truncate(adeg as usize);
        GradedKey::from_indices(dim, lam as i32, &sym, &idx).expect("distinct indices").0
    }

    /// Random element with terms of total degree `≤ trunc`.
    pub fn element<F: Fiber>(&mut self, trunc: TruncationOrder) -> GradedElement<F> {
        self.element_graded(trunc, None)
    }

    /// Random element of fixed antisymmetric degree (if given).
    pub fn element_graded<F: Fiber>(&mut self, trunc: TruncationOrder, asym_degree: Option<u32>) -> GradedElement<F> {
        let mut out = GradedElement::zero(self.n, self.rank, trunc);
        let terms = self.rng.gen_range(1..=self.spec.max_terms.max(1));
        for _ in 0..terms {
            let key = self.key(trunc, asym_degree);
            let v: F = self.fiber();
            out.add_owned(key, v);
        }
        out
    }

    /// Random series `Σ_{k≤order} λ^k c_k`; higher coefficients are zero
    /// with increasing probability.
    pub fn series<F: Fiber>(&mut self, order: usize) -> FormalSeries<F> {
        let top = order.min(self.spec.max_lambda_order);
        let mut s = FormalSeries::zero(self.n, self.rank, order);
        for k in 0..=top {
            if k == 0 || self.rng.gen_bool(0.5) {
                let v: F = self.fiber();
                s.set_coeff(k, v);
            }
        }
        s
    }

    pub fn function(&mut self, order: usize) -> FormalFunction {
        self.series(order)
    }

    pub fn endo(&mut self, order: usize) -> FormalEndo {
        self.series(order)
    }

    pub fn section(&mut self, order: usize) -> FormalSection {
        self.series(order)
    }

    pub fn gen_bool(&mut self, p: f64) -> bool {
        self.rng.gen_bool(p)
    }

    pub fn gen_index(&mut self, len: usize) -> usize {
        self.rng.gen_range(0..len)
    }
}

/// One random element from a fresh sampler.
pub fn random_element<F: Fiber>(spec: &RandomSpec, n: usize, rank: usize, trunc: TruncationOrder) -> GradedElement<F> {
    Sampler::new(spec, n, rank).element(trunc)
}

pub fn random_function(spec: &RandomSpec, n: usize, order: usize) -> FormalFunction {
    Sampler::new(spec, n, 1).function(order)
}

pub fn random_endo(spec: &RandomSpec, n: usize, rank: usize, order: usize) -> FormalEndo {
    Sampler::new(spec, n, rank).endo(order)
}

pub fn random_section(spec: &RandomSpec, n: usize, rank: usize, order: usize) -> FormalSection {
    Sampler::new(spec, n, rank).section(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::{EndMatrix, Scalar};

    #[test]
    fn same_seed_same_element() {
        let spec = RandomSpec::default();
        let t = TruncationOrder(6);
        let a: GradedElement<EndMatrix> = random_element(&spec, 1, 2, t);
        let b: GradedElement<EndMatrix> = random_element(&spec, 1, 2, t);
        assert_eq!(a, b);
        let other = RandomSpec { seed: 2, ..spec };
        let c: GradedElement<EndMatrix> = random_element(&other, 1, 2, t);
        assert_ne!(a, c);
    }

    #[test]
    fn degrees_within_bounds() {
        let spec = RandomSpec::default();
        let mut s = Sampler::new(&spec, 2, 1);
        for _ in 0..50 {
            let a: GradedElement<Scalar> = s.element(TruncationOrder(5));
            for (k, v) in a.terms() {
                assert!(k.total_degree() <= 5);
                assert!(k.sym_degree() <= spec.max_sym_degree);
                assert!(k.asym_degree() <= spec.max_asym_degree);
                assert!(k.lam as usize <= spec.max_lambda_order);
                assert!(v.0.degree().unwrap_or(0) <= spec.max_poly_degree);
            }
        }
    }

    #[test]
    fn draws_are_nonzero() {
        let mut s = Sampler::new(&RandomSpec::default(), 1, 2);
        for _ in 0..100 {
            assert!(!s.element::<EndMatrix>(TruncationOrder(4)).is_zero());
            assert!(!s.endo(2).is_zero());
        }
    }
}
