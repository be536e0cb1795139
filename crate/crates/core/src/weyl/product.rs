//! The fiberwise Weyl product
//! `a ∘ b = μ ∘ exp((iλ/2) Λ^{kl} i_s(∂_k) ⊗ i_s(∂_l)) (a ⊗ b)`
//! on the standard Darboux chart, where `Λ^{q_i p_i} = 1 = −Λ^{p_i q_i}`
//! for `q_i = x^i`, `p_i = x^{n+i}`.

use std::collections::HashMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::error::Result;
use crate::poly::Exponents;
use crate::scalar::ComplexRational;
use crate::weyl::element::{GradedElement, TruncationOrder};
use crate::weyl::fiber::{Fiber, FiberMul};
use crate::weyl::key::{wedge, GradedKey};

/// One way of contracting two symmetric monomials: the resulting
/// monomial, the number of contractions (= added λ-power) and the
/// coefficient including `(i/2)^t`.
type Pattern = (Exponents, i32, ComplexRational);

fn falling(a: u16, j: u16) -> BigInt {
    (0..j).fold(BigInt::one(), |acc, m| acc * BigInt::from(a - m))
}

fn factorial(j: u16) -> BigInt {
    falling(j, j)
}

/// All contraction patterns between symmetric monomials `sa` and `sb`.
///
/// The exponential factorizes over the commuting pairs
/// `∂_{q_i}⊗∂_{p_i}` and `−∂_{p_i}⊗∂_{q_i}`, so each pair `i` contributes
/// an independent choice `(j, j')` of contraction counts.
fn contraction_patterns(n: usize, sa: &Exponents, sb: &Exponents) -> Vec<Pattern> {
    let mut partial: Vec<(Exponents, u32, BigInt, BigInt)> = vec![(
        sa.iter().zip(sb.iter()).map(|(a, b)| a + b).collect(),
        0,
        BigInt::one(),
        BigInt::one(),
    )];
    for i in 0..n {
        let (q, p) = (i, n + i);
        let jmax = sa[q].min(sb[p]);
        let jpmax = sa[p].min(sb[q]);
        let mut next = Vec::with_capacity(partial.len() * (jmax as usize + 1) * (jpmax as usize + 1));
        for (sym, t, num, den) in &partial {
            for j in 0..=jmax {
                for jp in 0..=jpmax {
                    let mut s = sym.clone();
                    s[q] -= j + jp;
                    s[p] -= j + jp;
                    let mut nnum = num * falling(sa[q], j) * falling(sb[p], j) * falling(sa[p], jp) * falling(sb[q], jp);
                    if jp % 2 == 1 {
                        nnum = -nnum;
                    }
                    let nden = den * factorial(j) * factorial(jp);
                    next.push((s, t + (j + jp) as u32, nnum, nden));
                }
            }
        }
        partial = next;
    }
    partial
        .into_iter()
        .map(|(sym, t, num, den)| {
            let den = den * (BigInt::one() << t as usize);
            let c = ComplexRational::real(BigRational::new(num, den)).mul_i_pow(t);
            (sym, t as i32, c)
        })
        .collect()
}

/// `a ∘ b`, keeping all terms of total degree `≤ cutoff`; the result
/// carries `cutoff` as its truncation order.
pub fn weyl_mul_cutoff<A, B>(a: &GradedElement<A>, b: &GradedElement<B>, cutoff: TruncationOrder) -> GradedElement<A::Output>
where
    A: FiberMul<B>,
    B: Fiber,
{
    assert_eq!((a.n(), a.rank()), (b.n(), b.rank()), "chart dimension or rank mismatch");
    let n = a.n();
    let limit = cutoff.get();
    let mut out = GradedElement::zero(n, A::output_rank(a.rank()), cutoff);
    if a.is_zero() || b.is_zero() {
        return out;
    }

    let mut b_terms: Vec<(i32, &GradedKey, &B)> = b.terms().map(|(k, v)| (k.total_degree(), k, v)).collect();
    b_terms.sort_by_key(|t| t.0);

    let mut cache: HashMap<(Exponents, Exponents), Vec<Pattern>> = HashMap::new();
    for (ka, va) in a.terms() {
        let da = ka.total_degree();
        for &(db, kb, vb) in &b_terms {
            if da + db > limit {
                break;
            }
            let Some((asym, sign)) = wedge(ka.asym, kb.asym) else {
                continue;
            };
            let patterns = cache
                .entry((ka.sym.clone(), kb.sym.clone()))
                .or_insert_with(|| contraction_patterns(n, &ka.sym, &kb.sym));
            let prod = va.fiber_mul(vb);
            if prod.is_zero() {
                continue;
            }
            for (sym, t, c) in patterns.iter() {
                let key = GradedKey::new(ka.lam + kb.lam + t, sym.clone(), asym);
                let c = if sign < 0 { -c } else { c.clone() };
                out.add_term(key, &prod, &c);
            }
        }
    }
    out
}

/// The part of `a ∘ b` with no fiber variables and form degree zero, up
/// to `cutoff`: exactly the terms read by [`GradedElement::symbol`].
///
/// Only pairs whose symmetric parts contract completely contribute, so
/// this skips almost all of the full product.
pub fn weyl_mul_symbol_part<A, B>(a: &GradedElement<A>, b: &GradedElement<B>, cutoff: TruncationOrder) -> GradedElement<A::Output>
where
    A: FiberMul<B>,
    B: Fiber,
{
    assert_eq!((a.n(), a.rank()), (b.n(), b.rank()), "chart dimension or rank mismatch");
    let n = a.n();
    let limit = cutoff.get();
    let mut out = GradedElement::zero(n, A::output_rank(a.rank()), cutoff);
    let mut by_sym: HashMap<&Exponents, Vec<(&GradedKey, &B)>> = HashMap::new();
    for (kb, vb) in b.terms() {
        if kb.asym == 0 {
            by_sym.entry(&kb.sym).or_default().push((kb, vb));
        }
    }
    for (ka, va) in a.terms() {
        if ka.asym != 0 {
            continue;
        }
        // b must carry p_i wherever a carries q_i and vice versa
        let dual: Exponents = (0..2 * n).map(|k| ka.sym[(k + n) % (2 * n)]).collect();
        let Some(partners) = by_sym.get(&dual) else {
            continue;
        };
        for &(kb, vb) in partners {
            if ka.total_degree() + kb.total_degree() > limit {
                continue;
            }
            let prod = va.fiber_mul(vb);
            if prod.is_zero() {
                continue;
            }
            for (sym, t, c) in contraction_patterns(n, &ka.sym, &kb.sym) {
                if sym.iter().all(|&e| e == 0) {
                    out.add_term(GradedKey::new(ka.lam + kb.lam + t, sym, 0), &prod, &c);
                }
            }
        }
    }
    out
}

/// `a ∘ b` truncated at the common cutoff.
pub fn weyl_mul<A, B>(a: &GradedElement<A>, b: &GradedElement<B>) -> GradedElement<A::Output>
where
    A: FiberMul<B>,
    B: Fiber,
{
    a.assert_compatible(b);
    weyl_mul_cutoff(a, b, a.trunc())
}

/// Checked variant of [`weyl_mul`].
pub fn try_weyl_mul<A, B>(a: &GradedElement<A>, b: &GradedElement<B>) -> Result<GradedElement<A::Output>>
where
    A: FiberMul<B>,
    B: Fiber,
{
    a.check_compatible(b)?;
    Ok(weyl_mul_cutoff(a, b, a.trunc()))
}

/// Super-commutator `ad(a)b = a∘b − (−1)^{deg_a a · deg_a b} b∘a`, keeping
/// terms up to `cutoff`.
pub fn ad_cutoff<A, B>(a: &GradedElement<A>, b: &GradedElement<B>, cutoff: TruncationOrder) -> GradedElement<B>
where
    A: FiberMul<B, Output = B>,
    B: FiberMul<A, Output = B>,
{
    let left = weyl_mul_cutoff(a, b, cutoff);
    let a_even = a.asym_even_part();
    let a_odd = a.asym_odd_part();
    let b_even = b.asym_even_part();
    let b_odd = b.asym_odd_part();
    // b∘a_even + b_even∘a_odd − b_odd∘a_odd
    let mut right = weyl_mul_cutoff(b, &a_even, cutoff);
    if !a_odd.is_zero() {
        right = &right + &weyl_mul_cutoff(&b_even, &a_odd, cutoff);
        right = &right - &weyl_mul_cutoff(&b_odd, &a_odd, cutoff);
    }
    &left - &right
}

/// Super-commutator at the common cutoff.
pub fn ad<A, B>(a: &GradedElement<A>, b: &GradedElement<B>) -> GradedElement<B>
where
    A: FiberMul<B, Output = B>,
    B: FiberMul<A, Output = B>,
{
    a.assert_compatible(b);
    ad_cutoff(a, b, b.trunc())
}

/// `(i/λ) ad(a) b`. The commutator is formed two total degrees above the
/// cutoff so that nothing below the cutoff is lost by the division by λ.
pub fn scaled_ad<A, B>(a: &GradedElement<A>, b: &GradedElement<B>) -> GradedElement<B>
where
    A: FiberMul<B, Output = B>,
    B: FiberMul<A, Output = B>,
{
    a.assert_compatible(b);
    scaled_ad_cutoff(a, b, b.trunc())
}

/// [`scaled_ad`] with an explicit cutoff; the operands may carry any
/// truncation orders.
pub fn scaled_ad_cutoff<A, B>(a: &GradedElement<A>, b: &GradedElement<B>, cutoff: TruncationOrder) -> GradedElement<B>
where
    A: FiberMul<B, Output = B>,
    B: FiberMul<A, Output = B>,
{
    ad_cutoff(a, b, cutoff.plus(2))
        .mul_lambda_pow(-1)
        .with_trunc(cutoff)
        .scale(&ComplexRational::i())
}

/// `(i/λ) a∘b`, formed like [`scaled_ad`].
pub fn scaled_mul<A, B>(a: &GradedElement<A>, b: &GradedElement<B>) -> GradedElement<A::Output>
where
    A: FiberMul<B>,
    B: Fiber,
{
    a.assert_compatible(b);
    scaled_mul_cutoff(a, b, a.trunc())
}

pub fn scaled_mul_cutoff<A, B>(a: &GradedElement<A>, b: &GradedElement<B>, cutoff: TruncationOrder) -> GradedElement<A::Output>
where
    A: FiberMul<B>,
    B: Fiber,
{
    weyl_mul_cutoff(a, b, cutoff.plus(2))
        .mul_lambda_pow(-1)
        .with_trunc(cutoff)
        .scale(&ComplexRational::i())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weyl::fiber::Scalar;

    const N6: TruncationOrder = TruncationOrder(6);

    fn y(k: usize) -> GradedElement<Scalar> {
        GradedElement::sym_generator(1, 1, N6, k)
    }

    #[test]
    fn symbol_part_matches_full_product() {
        use crate::testkit::{RandomSpec, Sampler};
        use crate::weyl::fiber::EndMatrix;
        let spec = RandomSpec {
            max_sym_degree: 4,
            max_terms: 8,
            ..RandomSpec::default()
        };
        let mut s = Sampler::new(&spec, 1, 2);
        for _ in 0..30 {
            let a: GradedElement<EndMatrix> = s.element(N6);
            let b: GradedElement<EndMatrix> = s.element(N6);
            let full = weyl_mul(&a, &b);
            let part = weyl_mul_symbol_part(&a, &b, N6);
            assert_eq!(full.symbol().unwrap(), part.symbol().unwrap());
            assert!(part.terms().all(|(k, _)| k.is_symbol()));
        }
    }

    #[test]
    fn unit_laws() {
        let one = GradedElement::one(1, 1, N6);
        let a = &weyl_mul(&y(0), &y(1)) + &y(0);
        assert_eq!(weyl_mul(&a, &one), a);
        assert_eq!(weyl_mul(&one, &a), a);
    }

    #[test]
    fn canonical_commutator() {
        // y1∘y2 − y2∘y1 = (iλ/2)(Λ^{12} − Λ^{21}) = iλ
        let c = &weyl_mul(&y(0), &y(1)) - &weyl_mul(&y(1), &y(0));
        let expected = GradedElement::lambda_pow(1, 1, N6, 1).scale(&ComplexRational::i());
        assert_eq!(c, expected);
    }

    #[test]
    fn square_has_no_correction() {
        let sq = weyl_mul(&y(0), &y(0));
        assert_eq!(sq, y(0).sym_mul(&y(0)));
        let mixed = weyl_mul(&y(0), &y(1));
        let expected = &y(0).sym_mul(&y(1))
            + &GradedElement::lambda_pow(1, 1, N6, 1).scale(&ComplexRational::from_frac(1, 2).mul_i_pow(1));
        assert_eq!(mixed, expected);
    }

    #[test]
    fn scaled_commutator_has_no_negative_lambda() {
        let a = &weyl_mul(&y(0), &y(0)) + &y(1);
        let b = &weyl_mul(&y(1), &y(1)) + &y(0).scale(&ComplexRational::imag_int(3));
        let s = scaled_ad(&a, &b);
        assert!(s.min_lambda().unwrap_or(0) >= 0);
    }
}
