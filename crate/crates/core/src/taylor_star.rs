//! Fedosov–Taylor series and the products they induce:
//! `f ⋆ g = σ(τ(f)∘τ(g))`, `A ⋆′ B = σ(τ′(A)∘τ′(B))`,
//! `A •′ s = σ(τ′(A)∘τ^E(s))`, `s • f = σ(τ^E(s)∘τ(f))`.
//!
//! Each Taylor series is the fixed point `τ = a + δ⁻¹(Lτ)` solved degree
//! by degree, `τ^(m) = a^(m) + δ⁻¹((Lτ)^(m−1))`, where `a^(2j) = λ^j a_j`
//! and `L` is the non-`δ` part of the relevant Fedosov derivative. Only
//! lower components of `τ` enter `(Lτ)^(m−1)`; in particular the primed
//! recursion includes the term `(i/λ)ad(r′^(m+1)) τ′^(0)`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::fedosov::{by_degree, FedosovSolution};
use crate::geometry::ConnectionAction;
use crate::scalar::ComplexRational;
use crate::weyl::{
    scaled_ad_cutoff, weyl_mul_cutoff, weyl_mul_symbol_part, EndMatrix, Fiber, FiberMul, FiberVector, FormalEndo, FormalFunction,
    FormalSection, FormalSeries, GradedElement, Scalar, TruncationOrder,
};

fn check_input<F: Fiber>(sol: &FedosovSolution, a: &FormalSeries<F>, cutoff: TruncationOrder) -> Result<()> {
    let rank_matters = F::KIND != crate::weyl::FiberKind::Scalar;
    if a.n() != sol.n() || (rank_matters && a.rank() != sol.rank()) {
        return Err(Error::Dimension(format!(
            "input has (n={}, rank={}), geometry has (n={}, rank={})",
            a.n(),
            a.rank(),
            sol.n(),
            sol.rank()
        )));
    }
    let available = cutoff.lambda_order();
    if let Some(top) = (0..=a.order()).rev().find(|&k| !a.coeff(k).is_zero()) {
        if top > available {
            return Err(Error::OrderExceeded {
                requested: top,
                available,
            });
        }
    }
    let max = sol.trunc().plus(1);
    if cutoff > max {
        return Err(Error::OrderExceeded {
            requested: cutoff.lambda_order(),
            available: sol.lambda_order(),
        });
    }
    Ok(())
}

/// The generic recursion; `step(parts, m)` returns `(Lτ)^(m−1)` from the
/// already known components `parts[0..m]`.
fn taylor_recursion<F: Fiber>(
    a: &FormalSeries<F>,
    cutoff: TruncationOrder,
    mut step: impl FnMut(&[GradedElement<F>], usize) -> GradedElement<F>,
) -> GradedElement<F> {
    let (n, rank) = (a.n(), a.rank());
    let top = cutoff.get() as usize;
    let mut parts: Vec<GradedElement<F>> = Vec::with_capacity(top + 1);
    for m in 0..=top {
        let mut part = GradedElement::zero(n, rank, cutoff);
        if m % 2 == 0 && m / 2 <= a.order() {
            let mut key = crate::weyl::GradedKey::unit(2 * n);
            key.lam = (m / 2) as i32;
            part.add_owned(key, a.coeff(m / 2).clone());
        }
        if m > 0 {
            part.accumulate(&step(&parts, m).with_trunc(cutoff).delta_inv(), &ComplexRational::one());
        }
        parts.push(part);
    }
    let mut out = GradedElement::zero(n, rank, cutoff);
    for p in &parts {
        out.accumulate(p, &ComplexRational::one());
    }
    out
}

/// `(D τ)^(m−1) + Σ_j (i/λ) ad(r^(j)) τ^(m+1−j)` for an adjoint action by
/// the homogeneous parts `r_parts` (index = Deg).
fn inner_step<A, F>(sol: &FedosovSolution, r_parts: &[GradedElement<A>], parts: &[GradedElement<F>], m: usize) -> GradedElement<F>
where
    A: FiberMul<F, Output = F>,
    F: ConnectionAction + FiberMul<A, Output = F>,
{
    let cutoff = TruncationOrder(m as u32 - 1);
    let mut acc = sol.geometry().cov_d(&parts[m - 1]).with_trunc(cutoff);
    for (j, rj) in r_parts.iter().enumerate().skip(3) {
        if j > m + 1 {
            break;
        }
        let t = &parts[m + 1 - j];
        if rj.is_zero() || t.is_zero() {
            continue;
        }
        acc.accumulate(&scaled_ad_cutoff(rj, t, cutoff), &ComplexRational::one());
    }
    acc
}

/// `τ(f)` at cutoff `N`.
pub fn taylor(sol: &FedosovSolution, f: &FormalFunction) -> Result<GradedElement<Scalar>> {
    taylor_at(sol, f, sol.trunc())
}

/// `τ(f)` at an explicit cutoff `≤ N + 1`.
pub fn taylor_at(sol: &FedosovSolution, f: &FormalFunction, cutoff: TruncationOrder) -> Result<GradedElement<Scalar>> {
    check_input(sol, f, cutoff)?;
    // functions carry no bundle data; adopt the geometry's rank
    let f = &FormalFunction::from_coeffs(f.n(), sol.rank(), f.coeffs().to_vec());
    let r_parts = by_degree(sol.r_full());
    Ok(taylor_recursion(f, cutoff, |parts, m| inner_step(sol, &r_parts, parts, m)))
}

/// `τ′(A)` at cutoff `N`.
pub fn taylor_prime(sol: &FedosovSolution, a: &FormalEndo) -> Result<GradedElement<EndMatrix>> {
    taylor_prime_at(sol, a, sol.trunc())
}

pub fn taylor_prime_at(sol: &FedosovSolution, a: &FormalEndo, cutoff: TruncationOrder) -> Result<GradedElement<EndMatrix>> {
    check_input(sol, a, cutoff)?;
    let r_parts = by_degree(sol.r_prime_full());
    Ok(taylor_recursion(a, cutoff, |parts, m| inner_step(sol, &r_parts, parts, m)))
}

/// `τ^E(s)` at cutoff `N`.
pub fn taylor_e(sol: &FedosovSolution, s: &FormalSection) -> Result<GradedElement<FiberVector>> {
    taylor_e_at(sol, s, sol.trunc())
}

pub fn taylor_e_at(sol: &FedosovSolution, s: &FormalSection, cutoff: TruncationOrder) -> Result<GradedElement<FiberVector>> {
    check_input(sol, s, cutoff)?;
    let r_parts = by_degree(sol.r_full());
    let re_parts = by_degree(sol.r_e_full());
    Ok(taylor_recursion(s, cutoff, |parts, m| {
        let mut acc = inner_step(sol, &r_parts, parts, m);
        let c = TruncationOrder(m as u32 - 1);
        for (j, rej) in re_parts.iter().enumerate().skip(1) {
            if j > m - 1 {
                break;
            }
            let t = &parts[m - 1 - j];
            if !rej.is_zero() && !t.is_zero() {
                acc.accumulate(&weyl_mul_cutoff(rej, t, c), &ComplexRational::one());
            }
        }
        acc
    }))
}

/// `σ(a∘b)` for two flat sections; products of flat sections are flat,
/// so this is the symbol of the deformed product.
pub fn product_symbol<A, B>(a: &GradedElement<A>, b: &GradedElement<B>) -> Result<FormalSeries<A::Output>>
where
    A: FiberMul<B>,
    B: Fiber,
{
    a.check_compatible(b)?;
    weyl_mul_symbol_part(a, b, a.trunc()).symbol()
}

/// `f ⋆ g` modulo `λ^(K+1)`.
pub fn star(sol: &FedosovSolution, f: &FormalFunction, g: &FormalFunction) -> Result<FormalFunction> {
    product_symbol(&taylor(sol, f)?, &taylor(sol, g)?)
}

/// `A ⋆′ B` modulo `λ^(K+1)`.
pub fn star_prime(sol: &FedosovSolution, a: &FormalEndo, b: &FormalEndo) -> Result<FormalEndo> {
    product_symbol(&taylor_prime(sol, a)?, &taylor_prime(sol, b)?)
}

/// `A •′ s`.
pub fn act_left(sol: &FedosovSolution, a: &FormalEndo, s: &FormalSection) -> Result<FormalSection> {
    product_symbol(&taylor_prime(sol, a)?, &taylor_e(sol, s)?)
}

/// `s • f`.
pub fn act_right(sol: &FedosovSolution, s: &FormalSection, f: &FormalFunction) -> Result<FormalSection> {
    product_symbol(&taylor_e(sol, s)?, &taylor(sol, f)?)
}

/// `a` as an element of the product of its Taylor series, i.e. the
/// flatness residual `𝒟τ(f)` through `Deg N` (zero when correct).
pub fn taylor_residual(sol: &FedosovSolution, f: &FormalFunction) -> Result<GradedElement<Scalar>> {
    let t = taylor_at(sol, f, sol.trunc().plus(1))?;
    Ok(sol.fedosov_d(&t).with_trunc(sol.trunc()))
}

pub fn taylor_prime_residual(sol: &FedosovSolution, a: &FormalEndo) -> Result<GradedElement<EndMatrix>> {
    let t = taylor_prime_at(sol, a, sol.trunc().plus(1))?;
    Ok(sol.fedosov_d_prime(&t).with_trunc(sol.trunc()))
}

pub fn taylor_e_residual(sol: &FedosovSolution, s: &FormalSection) -> Result<GradedElement<FiberVector>> {
    let t = taylor_e_at(sol, s, sol.trunc().plus(1))?;
    Ok(sol.fedosov_d_e(&t).with_trunc(sol.trunc()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometryInput;
    use crate::poly::Poly;

    fn x(k: usize) -> Poly {
        Poly::var(2, k)
    }

    fn flat(order: usize) -> FedosovSolution {
        FedosovSolution::for_lambda_order(GeometryInput::flat(1, 1).build().unwrap(), order).unwrap()
    }

    fn curved(rank: usize, order: usize) -> FedosovSolution {
        let mut g = GeometryInput::flat(1, rank);
        g.set_gamma_symmetric(0, 0, 0, x(1));
        g.set_gamma_symmetric(0, 1, 1, &x(0) * &x(0));
        let mut a = EndMatrix::zero(2, rank);
        a.set(0, 0, x(0).scale(&ComplexRational::i()));
        if rank > 1 {
            a.set(0, 1, x(1));
            a.set(1, 0, -&x(1));
        }
        g.set_conn(1, a);
        FedosovSolution::for_lambda_order(g.build().unwrap(), order).unwrap()
    }

    fn fun(p: Poly, order: usize) -> FormalFunction {
        FormalFunction::classical(1, 1, order, Scalar(p))
    }

    #[test]
    fn unit_is_flat() {
        let sol = curved(1, 3);
        let one = fun(Poly::one(2), 3);
        assert_eq!(taylor(&sol, &one).unwrap(), GradedElement::one(1, 1, sol.trunc()));
        let id = FormalEndo::classical(1, 1, 3, EndMatrix::identity(2, 1));
        assert_eq!(taylor_prime(&sol, &id).unwrap(), GradedElement::identity(1, 1, sol.trunc()));
    }

    #[test]
    fn flat_taylor_is_symmetrized_expansion() {
        // τ(x1^2 x2) = Σ 1/α! ∂^α f y^α
        let sol = flat(2);
        let f = &(&x(0) * &x(0)) * &x(1);
        let t = taylor(&sol, &fun(f.clone(), 2)).unwrap();
        let tr = sol.trunc();
        let mut expected = GradedElement::<Scalar>::zero(1, 1, tr);
        for a in 0..=2u16 {
            for b in 0..=1u16 {
                let mut p = f.clone();
                for _ in 0..a {
                    p = p.derivative(0);
                }
                for _ in 0..b {
                    p = p.derivative(1);
                }
                let fact = (1..=a as i64).product::<i64>().max(1) * (1..=b as i64).product::<i64>().max(1);
                let mut sym = vec![0usize; a as usize];
                sym.extend(vec![1usize; b as usize]);
                let (key, _) = crate::weyl::GradedKey::from_indices(2, 0, &sym, &[]).unwrap();
                expected.add_term(key, &Scalar(p), &ComplexRational::from_frac(1, fact));
            }
        }
        assert_eq!(t, expected);
    }

    #[test]
    fn canonical_commutator_and_units() {
        let sol = flat(3);
        let f = fun(x(0), 3);
        let g = fun(x(1), 3);
        let c = star(&sol, &f, &g).unwrap().sub(&star(&sol, &g, &f).unwrap());
        let mut expected = FormalFunction::zero(1, 1, 3);
        expected.set_coeff(1, Scalar(Poly::constant(2, ComplexRational::i())));
        assert_eq!(c, expected);
        assert_eq!(star(&sol, &f, &fun(Poly::one(2), 3)).unwrap(), f);
    }

    #[test]
    fn curved_flatness_of_all_taylor_maps() {
        let sol = curved(2, 2);
        let f = fun(&x(0) * &x(1), 2);
        assert!(taylor_residual(&sol, &f).unwrap().is_zero());
        let mut m = EndMatrix::zero(2, 2);
        m.set(0, 1, x(0));
        m.set(1, 1, &x(1) * &x(1));
        let a = FormalEndo::classical(1, 2, 2, m);
        assert!(taylor_prime_residual(&sol, &a).unwrap().is_zero());
        let s = FormalSection::classical(1, 2, 2, FiberVector::new(vec![x(1), &x(0) * &x(0)]));
        assert!(taylor_e_residual(&sol, &s).unwrap().is_zero());
        assert_eq!(taylor_e(&sol, &s).unwrap().symbol().unwrap(), s);
    }

    #[test]
    fn curved_associativity() {
        let sol = curved(1, 2);
        let f = fun(&x(0) * &x(0), 2);
        let g = fun(&x(1) + &x(0), 2);
        let h = fun(&x(1) * &x(1), 2);
        let l = star(&sol, &star(&sol, &f, &g).unwrap(), &h).unwrap();
        let r = star(&sol, &f, &star(&sol, &g, &h).unwrap()).unwrap();
        assert_eq!(l, r);
    }

    #[test]
    fn order_beyond_cutoff_is_rejected() {
        let sol = flat(1);
        let mut f = FormalFunction::zero(1, 1, 3);
        f.set_coeff(3, Scalar(Poly::one(2)));
        assert!(matches!(taylor(&sol, &f), Err(Error::OrderExceeded { requested: 3, available: 1 })));
    }
}
