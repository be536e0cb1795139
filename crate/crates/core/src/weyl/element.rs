use std::collections::BTreeMap;
use std::ops::{Add, Neg, Sub};

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::poly::{Exponents, Poly};
use crate::scalar::ComplexRational;
use crate::weyl::fiber::{EndMatrix, Fiber, FiberMul, FiberVector, Scalar};
use crate::weyl::key::{wedge, GradedKey};
use crate::weyl::series::FormalSeries;

/// Cutoff on the total degree `Deg = deg_s + 2·deg_λ`. A star product
/// modulo λ^(K+1) needs `N ≥ 2K`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TruncationOrder(pub u32);

impl TruncationOrder {
    pub fn for_lambda_order(k: usize) -> Self {
        TruncationOrder(2 * k as u32)
    }

    /// Largest λ-power whose symbol is fully determined below the cutoff.
    pub fn lambda_order(self) -> usize {
        (self.0 / 2) as usize
    }

    pub fn get(self) -> i32 {
        self.0 as i32
    }

    pub fn plus(self, extra: u32) -> Self {
        TruncationOrder(self.0 + extra)
    }
}

/// A truncated element of `W ⊗ Λ ⊗ F` on a chart of dimension `2n`.
///
/// Terms with total degree above the cutoff are never stored and zero
/// entries are pruned eagerly, so structural equality is equality of
/// truncated series.
#[derive(Clone, PartialEq, Debug)]
pub struct GradedElement<F: Fiber> {
    n: usize,
    rank: usize,
    trunc: TruncationOrder,
    terms: BTreeMap<GradedKey, F>,
}

impl<F: Fiber> GradedElement<F> {
    pub fn zero(n: usize, rank: usize, trunc: TruncationOrder) -> Self {
        Self {
            n,
            rank,
            trunc,
            terms: BTreeMap::new(),
        }
    }

    /// A single term `value ⊗ key`.
    pub fn from_term(n: usize, rank: usize, trunc: TruncationOrder, key: GradedKey, value: F) -> Self {
        let mut out = Self::zero(n, rank, trunc);
        out.add_owned(key, value);
        out
    }

    /// A fiber value with no forms and no λ.
    pub fn classical(n: usize, rank: usize, trunc: TruncationOrder, value: F) -> Self {
        Self::from_term(n, rank, trunc, GradedKey::unit(2 * n), value)
    }

    /// `Σ_k λ^k c_k` placed in symmetric and antisymmetric degree zero.
    pub fn from_symbol(series: &FormalSeries<F>, trunc: TruncationOrder) -> Self {
        let mut out = Self::zero(series.n(), series.rank(), trunc);
        for (k, c) in series.coeffs().iter().enumerate() {
            let mut key = GradedKey::unit(2 * series.n());
            key.lam = k as i32;
            out.add_owned(key, c.clone());
        }
        out
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Chart dimension `2n`.
    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn trunc(&self) -> TruncationOrder {
        self.trunc
    }

    pub fn terms(&self) -> impl Iterator<Item = (&GradedKey, &F)> {
        self.terms.iter()
    }

    pub fn get(&self, key: &GradedKey) -> Option<&F> {
        self.terms.get(key)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    /// `self += c · value ⊗ key`, respecting the cutoff.
    pub fn add_term(&mut self, key: GradedKey, value: &F, c: &ComplexRational) {
        if key.total_degree() > self.trunc.get() || c.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                let mut f = F::zero(2 * self.n, self.rank);
                f.add_scaled(value, c);
                if !f.is_zero() {
                    v.insert(f);
                }
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_scaled(value, c);
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_owned(&mut self, key: GradedKey, value: F) {
        if key.total_degree() > self.trunc.get() || value.is_zero() {
            return;
        }
        match self.terms.entry(key) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(value);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                o.get_mut().add_scaled(&value, &ComplexRational::one());
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    /// `self += c · other`, keeping the cutoff of `self`; `other` may carry
    /// a different truncation order.
    pub fn accumulate(&mut self, other: &Self, c: &ComplexRational) {
        assert_eq!((self.n, self.rank), (other.n, other.rank), "chart dimension or rank mismatch");
        for (k, v) in &other.terms {
            self.add_term(k.clone(), v, c);
        }
    }

    pub fn check_compatible<G: Fiber>(&self, other: &GradedElement<G>) -> Result<()> {
        if self.n != other.n || self.rank != other.rank {
            return Err(Error::Dimension(format!(
                "(n={}, rank={}) vs (n={}, rank={})",
                self.n, self.rank, other.n, other.rank
            )));
        }
        if self.trunc != other.trunc {
            return Err(Error::Dimension(format!(
                "truncation {} vs {}",
                self.trunc.0, other.trunc.0
            )));
        }
        Ok(())
    }

    pub(crate) fn assert_compatible<G: Fiber>(&self, other: &GradedElement<G>) {
        if let Err(e) = self.check_compatible(other) {
            panic!("{e}");
        }
    }

    fn check_index(&self, k: usize) -> Result<()> {
        if k >= self.dim() {
            return Err(Error::IndexOutOfRange {
                index: k + 1,
                dim: self.dim(),
            });
        }
        Ok(())
    }

    /// Same terms under a different cutoff (drops terms above it).
    pub fn with_trunc(&self, trunc: TruncationOrder) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| k.total_degree() <= trunc.get())
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Self {
            n: self.n,
            rank: self.rank,
            trunc,
            terms,
        }
    }

    pub fn filter(&self, mut keep: impl FnMut(&GradedKey) -> bool) -> Self {
        let terms = self
            .terms
            .iter()
            .filter(|(k, _)| keep(k))
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect();
        Self {
            n: self.n,
            rank: self.rank,
            trunc: self.trunc,
            terms,
        }
    }

    pub fn map_fiber<G: Fiber>(&self, mut f: impl FnMut(&F) -> G) -> GradedElement<G> {
        let mut out = GradedElement::zero(self.n, self.rank, self.trunc);
        for (k, v) in &self.terms {
            out.add_owned(k.clone(), f(v));
        }
        out
    }

    /// Apply `f` to every polynomial entry.
    pub fn map_polys(&self, mut f: impl FnMut(&Poly) -> Poly) -> Self {
        self.map_fiber(|v| v.map_entries(&mut f))
    }

    pub fn scale(&self, c: &ComplexRational) -> Self {
        if c.is_zero() {
            return Self::zero(self.n, self.rank, self.trunc);
        }
        self.map_polys(|p| p.scale(c))
    }

    /// Multiply by `λ^k` (negative `k` allowed).
    pub fn mul_lambda_pow(&self, k: i32) -> Self {
        let mut out = Self::zero(self.n, self.rank, self.trunc);
        for (key, v) in &self.terms {
            let mut key = key.clone();
            key.lam += k;
            out.add_owned(key, v.clone());
        }
        out
    }

    pub fn min_lambda(&self) -> Option<i32> {
        self.terms.keys().map(|k| k.lam).min()
    }

    pub fn min_total_degree(&self) -> Option<i32> {
        self.terms.keys().map(GradedKey::total_degree).min()
    }

    pub fn max_total_degree(&self) -> Option<i32> {
        self.terms.keys().map(GradedKey::total_degree).max()
    }

    /// Homogeneous part of total degree `d`.
    pub fn total_degree_part(&self, d: i32) -> Self {
        self.filter(|k| k.total_degree() == d)
    }

    /// Homogeneous components keyed by `(Deg, deg_s, deg_a, deg_λ)`; their
    /// sum is `self`.
    pub fn homogeneous_components(&self) -> BTreeMap<(i32, u32, u32, i32), Self> {
        let mut out: BTreeMap<(i32, u32, u32, i32), Self> = BTreeMap::new();
        for (k, v) in &self.terms {
            out.entry((k.total_degree(), k.sym_degree(), k.asym_degree(), k.lam))
                .or_insert_with(|| Self::zero(self.n, self.rank, self.trunc))
                .add_owned(k.clone(), v.clone());
        }
        out
    }

    pub fn asym_even_part(&self) -> Self {
        self.filter(|k| k.asym_degree() % 2 == 0)
    }

    pub fn asym_odd_part(&self) -> Self {
        self.filter(|k| k.asym_degree() % 2 == 1)
    }

    /// Homogeneous antisymmetric degree, if there is one.
    pub fn asym_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(GradedKey::asym_degree);
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// `(-1)^{deg_a}` applied termwise.
    pub fn parity_twist(&self) -> Self {
        let mut out = self.clone();
        for (k, v) in out.terms.iter_mut() {
            if k.asym_degree() % 2 == 1 {
                *v = v.map_entries(|p| -p);
            }
        }
        out
    }

    /// Symmetric insertion `i_s(∂_k)`, a derivation of the symmetric factor.
    pub fn insert_sym(&self, k: usize) -> Result<Self> {
        self.check_index(k)?;
        let mut out = Self::zero(self.n, self.rank, self.trunc);
        for (key, v) in &self.terms {
            let m = key.sym[k];
            if m == 0 {
                continue;
            }
            let mut nk = key.clone();
            nk.sym[k] -= 1;
            out.add_term(nk, v, &ComplexRational::from_int(m as i64));
        }
        Ok(out)
    }

    /// Antisymmetric insertion `i_a(∂_k)`, a graded derivation of the wedge
    /// factor.
    pub fn insert_asym(&self, k: usize) -> Result<Self> {
        self.check_index(k)?;
        let bit = 1u32 << k;
        let mut out = Self::zero(self.n, self.rank, self.trunc);
        for (key, v) in &self.terms {
            if key.asym & bit == 0 {
                continue;
            }
            let pos = (key.asym & (bit - 1)).count_ones();
            let mut nk = key.clone();
            nk.asym ^= bit;
            let sign = if pos % 2 == 0 { 1 } else { -1 };
            out.add_term(nk, v, &ComplexRational::from_int(sign));
        }
        Ok(out)
    }

    /// `δ = (1⊗dx^i) i_s(∂_i)`.
    pub fn delta(&self) -> Self {
        let mut out = Self::zero(self.n, self.rank, self.trunc);
        for (key, v) in &self.terms {
            for i in 0..self.dim() {
                let m = key.sym[i];
                if m == 0 {
                    continue;
                }
                let Some((asym, sign)) = wedge(1 << i, key.asym) else {
                    continue;
                };
                let mut nk = key.clone();
                nk.sym[i] -= 1;
                nk.asym = asym;
                out.add_term(nk, v, &ComplexRational::from_int(sign as i64 * m as i64));
            }
        }
        out
    }

    /// `δ* = (dx^i⊗1) i_a(∂_i)`.
    pub fn delta_star(&self) -> Self {
        self.delta_star_weighted(false)
    }

    /// `δ⁻¹`: `δ*/(k+l)` on terms of symmetric degree `k` and antisymmetric
    /// degree `l`, zero when `k + l = 0`.
    pub fn delta_inv(&self) -> Self {
        self.delta_star_weighted(true)
    }

    fn delta_star_weighted(&self, normalize: bool) -> Self {
        let mut out = Self::zero(self.n, self.rank, self.trunc);
        for (key, v) in &self.terms {
            let weight = key.sym_degree() + key.asym_degree();
            if weight == 0 {
                continue;
            }
            for i in 0..self.dim() {
                let bit = 1u32 << i;
                if key.asym & bit == 0 {
                    continue;
                }
                let pos = (key.asym & (bit - 1)).count_ones();
                let mut nk = key.clone();
                nk.asym ^= bit;
                nk.sym[i] += 1;
                let sign = if pos % 2 == 0 { 1 } else { -1 };
                let c = if normalize {
                    ComplexRational::from_frac(sign, weight as i64)
                } else {
                    ComplexRational::from_int(sign)
                };
                out.add_term(nk, v, &c);
            }
        }
        out
    }

    /// Projection onto symmetric and antisymmetric degree zero, as an element.
    pub fn sigma_part(&self) -> Self {
        self.filter(GradedKey::is_symbol)
    }

    /// The symbol `σ(self)` as a formal series up to `λ^(N/2)`.
    pub fn symbol(&self) -> Result<FormalSeries<F>> {
        let order = self.trunc.lambda_order();
        let mut out = FormalSeries::zero(self.n, self.rank, order);
        for (k, v) in &self.terms {
            if !k.is_symbol() {
                continue;
            }
            if k.lam < 0 {
                return Err(Error::NegativeLambda("symbol".into()));
            }
            out.set_coeff(k.lam as usize, v.clone());
        }
        Ok(out)
    }

    /// Undeformed fiberwise product: symmetric factors multiply, wedge
    /// factors wedge, λ-powers add, fibers multiply.
    pub fn sym_mul<G>(&self, other: &GradedElement<G>) -> GradedElement<F::Output>
    where
        F: FiberMul<G>,
        G: Fiber,
    {
        self.assert_compatible(other);
        let mut out = GradedElement::zero(self.n, F::output_rank(self.rank), self.trunc);
        for (ka, va) in &self.terms {
            for (kb, vb) in &other.terms {
                if ka.total_degree() + kb.total_degree() > self.trunc.get() {
                    continue;
                }
                let Some((asym, sign)) = wedge(ka.asym, kb.asym) else {
                    continue;
                };
                let sym: Exponents = ka.sym.iter().zip(&kb.sym).map(|(a, b)| a + b).collect();
                let key = GradedKey::new(ka.lam + kb.lam, sym, asym);
                out.add_term(key, &va.fiber_mul(vb), &ComplexRational::from_int(sign as i64));
            }
        }
        out
    }

    /// `(deg_s + deg_a)` applied termwise.
    pub fn sym_plus_asym_degree(&self) -> Self {
        let mut out = self.clone();
        for (k, v) in out.terms.iter_mut() {
            let w = (k.sym_degree() + k.asym_degree()) as i64;
            *v = v.map_entries(|p| p.scale(&ComplexRational::from_int(w)));
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    /// `Deg` applied termwise (for the derivation property checks).
    pub fn apply_total_degree(&self) -> Self {
        self.apply_weight(|k| k.total_degree() as i64)
    }

    /// `deg_a` applied termwise.
    pub fn apply_asym_degree(&self) -> Self {
        self.apply_weight(|k| k.asym_degree() as i64)
    }

    fn apply_weight(&self, w: impl Fn(&GradedKey) -> i64) -> Self {
        let mut out = Self::zero(self.n, self.rank, self.trunc);
        for (k, v) in &self.terms {
            out.add_term(k.clone(), v, &ComplexRational::from_int(w(k)));
        }
        out
    }
}

impl GradedElement<Scalar> {
    pub fn one(n: usize, rank: usize, trunc: TruncationOrder) -> Self {
        Self::classical(n, rank, trunc, Scalar(Poly::one(2 * n)))
    }

    /// `dx^k ⊗ 1` (0-based `k`).
    pub fn sym_generator(n: usize, rank: usize, trunc: TruncationOrder, k: usize) -> Self {
        let (key, _) = GradedKey::from_indices(2 * n, 0, &[k], &[]).expect("valid index");
        Self::from_term(n, rank, trunc, key, Scalar(Poly::one(2 * n)))
    }

    /// `1 ⊗ dx^k` (0-based `k`).
    pub fn asym_generator(n: usize, rank: usize, trunc: TruncationOrder, k: usize) -> Self {
        let (key, _) = GradedKey::from_indices(2 * n, 0, &[], &[k]).expect("valid index");
        Self::from_term(n, rank, trunc, key, Scalar(Poly::one(2 * n)))
    }

    /// `λ^k · 1`.
    pub fn lambda_pow(n: usize, rank: usize, trunc: TruncationOrder, k: i32) -> Self {
        let mut key = GradedKey::unit(2 * n);
        key.lam = k;
        Self::from_term(n, rank, trunc, key, Scalar(Poly::one(2 * n)))
    }

    /// Embed as multiples of the identity endomorphism.
    pub fn to_end(&self) -> GradedElement<EndMatrix> {
        let rank = self.rank;
        self.map_fiber(|s| EndMatrix::scalar(&s.0, rank))
    }
}

impl GradedElement<EndMatrix> {
    pub fn identity(n: usize, rank: usize, trunc: TruncationOrder) -> Self {
        Self::classical(n, rank, trunc, EndMatrix::identity(2 * n, rank))
    }

    /// `Some(s)` if every fiber value is a multiple of the identity.
    pub fn as_scalar(&self) -> Option<GradedElement<Scalar>> {
        let mut out = GradedElement::zero(self.n, self.rank, self.trunc);
        for (k, v) in &self.terms {
            out.add_owned(k.clone(), Scalar(v.as_scalar()?));
        }
        Some(out)
    }
}

impl GradedElement<FiberVector> {
    /// The `a`-th fiber component as a scalar element.
    pub fn component(&self, a: usize) -> GradedElement<Scalar> {
        self.map_fiber(|v| Scalar(v.get(a).clone()))
    }
}

fn combine<F: Fiber>(a: &GradedElement<F>, b: &GradedElement<F>, c: &ComplexRational) -> GradedElement<F> {
    a.assert_compatible(b);
    let mut out = a.clone();
    for (k, v) in &b.terms {
        out.add_term(k.clone(), v, c);
    }
    out
}

impl<F: Fiber> Add for &GradedElement<F> {
    type Output = GradedElement<F>;
    fn add(self, rhs: &GradedElement<F>) -> GradedElement<F> {
        combine(self, rhs, &ComplexRational::one())
    }
}

impl<F: Fiber> Sub for &GradedElement<F> {
    type Output = GradedElement<F>;
    fn sub(self, rhs: &GradedElement<F>) -> GradedElement<F> {
        combine(self, rhs, &ComplexRational::from_int(-1))
    }
}

impl<F: Fiber> Neg for &GradedElement<F> {
    type Output = GradedElement<F>;
    fn neg(self) -> GradedElement<F> {
        self.scale(&ComplexRational::from_int(-1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const N8: TruncationOrder = TruncationOrder(8);

    fn dx_sym(k: usize) -> GradedElement<Scalar> {
        GradedElement::sym_generator(1, 1, N8, k)
    }
    fn dx_asym(k: usize) -> GradedElement<Scalar> {
        GradedElement::asym_generator(1, 1, N8, k)
    }

    #[test]
    fn symmetric_square() {
        let sq = dx_sym(0).sym_mul(&dx_sym(0));
        let (key, _) = GradedKey::from_indices(2, 0, &[0, 0], &[]).unwrap();
        assert_eq!(sq.len(), 1);
        assert_eq!(sq.get(&key).unwrap().0, Poly::one(2));
    }

    #[test]
    fn wedge_nilpotent_and_antisymmetric() {
        assert!(dx_asym(0).sym_mul(&dx_asym(0)).is_zero());
        let a = dx_asym(0).sym_mul(&dx_asym(1));
        let b = dx_asym(1).sym_mul(&dx_asym(0));
        assert_eq!(a, -&b);
    }

    #[test]
    fn symmetric_insertion() {
        let sq = dx_sym(0).sym_mul(&dx_sym(0));
        assert_eq!(sq.insert_sym(0).unwrap(), dx_sym(0).scale(&ComplexRational::from_int(2)));
        assert!(dx_sym(1).insert_sym(0).unwrap().is_zero());
        let mixed = dx_sym(0).sym_mul(&dx_asym(1));
        assert_eq!(mixed.insert_sym(0).unwrap(), dx_asym(1));
        assert!(matches!(sq.insert_sym(2), Err(Error::IndexOutOfRange { index: 3, dim: 2 })));
    }

    #[test]
    fn antisymmetric_insertion() {
        let form = dx_asym(0).sym_mul(&dx_asym(1));
        assert_eq!(form.insert_asym(0).unwrap(), dx_asym(1));
        assert_eq!(form.insert_asym(1).unwrap(), -&dx_asym(0));
        assert!(dx_sym(0).insert_asym(0).unwrap().is_zero());
        assert!(form.insert_asym(5).is_err());
    }

    #[test]
    fn delta_on_generators() {
        assert_eq!(dx_sym(0).delta(), dx_asym(0));
        assert_eq!(dx_asym(0).delta_inv(), dx_sym(0));
        assert_eq!(dx_asym(0).delta_star(), dx_sym(0));
        let one = GradedElement::one(1, 1, N8);
        assert!(one.delta_inv().is_zero());
        assert_eq!(one.sigma_part(), one);
    }

    #[test]
    fn truncation_drops_high_degree() {
        let lam4 = GradedElement::lambda_pow(1, 1, N8, 4);
        assert_eq!(lam4.len(), 1);
        let lam5 = GradedElement::lambda_pow(1, 1, N8, 5);
        assert!(lam5.is_zero());
        assert_eq!(lam4.min_total_degree(), Some(8));
        assert!(lam4.with_trunc(TruncationOrder(7)).is_zero());
    }
}
