//! Complex conjugation and adjoints as super-involutions, the fiberwise
//! metric `H`, the deformed metric `h(s, s′) = σ(H(τ^E(s), τ^E(s′)))` and
//! their identities.
//!
//! `λ` is real, forms are real, coefficients are conjugated and matrices
//! are adjoined with respect to the constant fiber metric `h₀`:
//! `M* = h₀⁻¹ M† h₀`. With these conventions
//! `(a∘b)* = (−1)^{deg_a a · deg_a b} b*∘a*`, and the metric identities
//! acquire the same super-sign when both arguments are odd.

use num_traits::One;

use crate::error::{Error, Result};
use crate::fedosov::FedosovSolution;
use crate::geometry::{const_mul, metric_inverse, Geometry};
use crate::poly::Poly;
use crate::report::Report;
use crate::scalar::ComplexRational;
use crate::taylor_star::{act_left, act_right, star, star_prime, taylor, taylor_e, taylor_prime};
use crate::testkit::{check_all, Sampler};
use crate::weyl::serial::to_canonical_text;
use crate::weyl::{
    weyl_mul, weyl_mul_cutoff, EndMatrix, FiberVector, FormalEndo, FormalFunction, FormalSection, GradedElement,
    Scalar,
};

/// The constant Hermitian fiber metric and its inverse.
#[derive(Clone, Debug, PartialEq)]
pub struct FiberMetric {
    rank: usize,
    h: Vec<ComplexRational>,
    h_inv: Vec<ComplexRational>,
}

impl FiberMetric {
    pub fn from_geometry(geo: &Geometry) -> Self {
        Self {
            rank: geo.rank(),
            h: geo.fiber_metric(),
            h_inv: metric_inverse(geo),
        }
    }

    pub fn get(&self, a: usize, b: usize) -> &ComplexRational {
        &self.h[a * self.rank + b]
    }

    /// `h₀⁻¹ M† h₀`.
    pub fn adjoint(&self, m: &EndMatrix) -> EndMatrix {
        let mh = const_mul(&m.dagger(), &self.h, false);
        const_mul(&mh, &self.h_inv, true)
    }

    /// Pointwise `h₀(s, s′) = Σ conj(s_a) h_{ab} s′_b`.
    pub fn pointwise(&self, s: &FiberVector, t: &FiberVector) -> Poly {
        let dim = s.get(0).nvars();
        let mut out = Poly::zero(dim);
        for a in 0..self.rank {
            for b in 0..self.rank {
                let c = self.get(a, b);
                if !num_traits::Zero::is_zero(c) {
                    out.add_scaled(&(&s.get(a).conj() * t.get(b)), c);
                }
            }
        }
        out
    }
}

/// Complex conjugation of a scalar element.
pub fn conj(b: &GradedElement<Scalar>) -> GradedElement<Scalar> {
    b.map_polys(Poly::conj)
}

/// Adjoint of an End-valued element.
pub fn adj(a: &GradedElement<EndMatrix>, metric: &FiberMetric) -> GradedElement<EndMatrix> {
    a.map_fiber(|m| metric.adjoint(m))
}

/// Coefficientwise adjoint of a formal endomorphism series.
pub fn adj_series(a: &FormalEndo, metric: &FiberMetric) -> FormalEndo {
    FormalEndo::from_coeffs(a.n(), a.rank(), a.coeffs().iter().map(|m| metric.adjoint(m)).collect())
}

/// `H(Ψ, Ψ′) = Σ_{ab} conj(Ψ_a) ∘ h_{ab} Ψ′_b`, at the cutoff of `Ψ′`.
pub fn fiber_h(
    psi: &GradedElement<FiberVector>,
    psi2: &GradedElement<FiberVector>,
    metric: &FiberMetric,
) -> GradedElement<Scalar> {
    let cutoff = psi2.trunc();
    let rank = psi.rank();
    let mut out = GradedElement::zero(psi.n(), rank, cutoff);
    for a in 0..rank {
        let left = conj(&psi.component(a));
        if left.is_zero() {
            continue;
        }
        for b in 0..rank {
            let c = metric.get(a, b);
            if num_traits::Zero::is_zero(c) {
                continue;
            }
            let right = psi2.component(b);
            out.accumulate(&weyl_mul_cutoff(&left, &right, cutoff), c);
        }
    }
    out
}

fn require_hermitian(geo: &Geometry) -> Result<()> {
    if !geo.input().hermitian {
        return Err(Error::Unsupported("the geometry is not declared hermitian".into()));
    }
    Ok(())
}

/// `h(s, s′) = σ(H(τ^E(s), τ^E(s′)))` modulo `λ^(K+1)`.
pub fn deformed_h(sol: &FedosovSolution, s: &FormalSection, s2: &FormalSection) -> Result<FormalFunction> {
    require_hermitian(sol.geometry())?;
    let metric = FiberMetric::from_geometry(sol.geometry());
    fiber_h(&taylor_e(sol, s)?, &taylor_e(sol, s2)?, &metric).symbol()
}

fn conj_series(f: &FormalFunction) -> FormalFunction {
    f.conj()
}

/// Reality of `r, r′, r^E` and of the Taylor maps and products.
pub fn reality_suite(sol: &FedosovSolution, sampler: &mut Sampler) -> Result<Report> {
    require_hermitian(sol.geometry())?;
    let metric = FiberMetric::from_geometry(sol.geometry());
    let k = sol.lambda_order();
    let count = sampler.count();
    let mut rep = Report::new("reality");

    let r = sol.r();
    let diff = &conj(&r) - &r;
    rep.record("r-real", "conj(r) = r", 1, (!diff.is_zero()).then(|| to_canonical_text(&diff)));
    let rp = sol.r_prime();
    let diff = &adj(&rp, &metric) - &rp;
    rep.record("r-prime-selfadjoint", "(r′)* = r′", 1, (!diff.is_zero()).then(|| to_canonical_text(&diff)));
    let re = sol.r_e();
    let diff = &adj(&re, &metric) + &re;
    rep.record("rE-antiselfadjoint", "(r^E)* = −r^E", 1, (!diff.is_zero()).then(|| to_canonical_text(&diff)));

    let fs: Vec<(FormalFunction,)> = (0..count).map(|_| (sampler.function(k),)).collect();
    check_all(&mut rep, "taylor-conj", "τ(conj f) = conj τ(f)", fs, |(f,)| {
        match (taylor(sol, &conj_series(f)), taylor(sol, f)) {
            (Ok(a), Ok(b)) => a == conj(&b),
            _ => false,
        }
    });
    let as_: Vec<(FormalEndo,)> = (0..count).map(|_| (sampler.endo(k),)).collect();
    check_all(&mut rep, "taylor-prime-adjoint", "τ′(A*) = τ′(A)*", as_, |(a,)| {
        match (taylor_prime(sol, &adj_series(a, &metric)), taylor_prime(sol, a)) {
            (Ok(x), Ok(y)) => x == adj(&y, &metric),
            _ => false,
        }
    });
    let pairs: Vec<(FormalEndo, FormalEndo)> = (0..count).map(|_| (sampler.endo(k), sampler.endo(k))).collect();
    check_all(&mut rep, "star-prime-adjoint", "(A ⋆′ B)* = B* ⋆′ A*", pairs, |(a, b)| {
        let l = star_prime(sol, a, b).map(|x| adj_series(&x, &metric));
        let r = star_prime(sol, &adj_series(b, &metric), &adj_series(a, &metric));
        matches!((l, r), (Ok(l), Ok(r)) if l == r)
    });
    let pairs: Vec<(FormalFunction, FormalFunction)> =
        (0..count).map(|_| (sampler.function(k), sampler.function(k))).collect();
    check_all(&mut rep, "star-conj", "conj(f ⋆ g) = conj(g) ⋆ conj(f)", pairs, |(f, g)| {
        let l = star(sol, f, g).map(|x| conj_series(&x));
        let r = star(sol, &conj_series(g), &conj_series(f));
        matches!((l, r), (Ok(l), Ok(r)) if l == r)
    });
    Ok(rep)
}

/// Identities of the fiberwise metric `H` on random elements.
pub fn fiber_metric_suite(sol: &FedosovSolution, sampler: &mut Sampler) -> Result<Report> {
    require_hermitian(sol.geometry())?;
    let metric = FiberMetric::from_geometry(sol.geometry());
    let n_cut = sol.trunc();
    let up = n_cut.plus(1);
    let count = sampler.count();
    let mut rep = Report::new("fiber metric");
    let lift = |e: GradedElement<FiberVector>| e.with_trunc(up);

    let pairs: Vec<_> = (0..count)
        .map(|_| (sampler.element::<FiberVector>(n_cut), sampler.element::<FiberVector>(n_cut)))
        .collect();
    check_all(
        &mut rep,
        "H-hermitian",
        "H(Ψ,Ψ′) = (−1)^{deg_a Ψ · deg_a Ψ′} conj H(Ψ′,Ψ) (homogeneous parts)",
        pairs,
        |(p, q)| {
            let lhs = fiber_h(p, q, &metric);
            let mut rhs = GradedElement::zero(p.n(), p.rank(), n_cut);
            for pa in [p.asym_even_part(), p.asym_odd_part()] {
                for qa in [q.asym_even_part(), q.asym_odd_part()] {
                    let odd = pa.terms().any(|(k, _)| k.asym_degree() % 2 == 1)
                        && qa.terms().any(|(k, _)| k.asym_degree() % 2 == 1);
                    let c = conj(&fiber_h(&qa, &pa, &metric));
                    let c = if odd { -&c } else { c };
                    rhs.accumulate(&c, &ComplexRational::one());
                }
            }
            lhs == rhs
        },
    );

    let triples: Vec<_> = (0..count)
        .map(|_| {
            (
                sampler.element::<EndMatrix>(n_cut),
                sampler.element::<FiberVector>(n_cut),
                sampler.element::<FiberVector>(n_cut),
            )
        })
        .collect();
    check_all(
        &mut rep,
        "H-left-linear",
        "H(a∘Ψ,Ψ′) = (−1)^{deg_a a · deg_a Ψ} H(Ψ, a*∘Ψ′)",
        triples,
        |(a, p, q)| {
            let mut rhs = GradedElement::zero(p.n(), p.rank(), n_cut);
            let mut lhs = GradedElement::zero(p.n(), p.rank(), n_cut);
            for aa in [a.asym_even_part(), a.asym_odd_part()] {
                for pp in [p.asym_even_part(), p.asym_odd_part()] {
                    let odd = aa.terms().any(|(k, _)| k.asym_degree() % 2 == 1)
                        && pp.terms().any(|(k, _)| k.asym_degree() % 2 == 1);
                    lhs.accumulate(&fiber_h(&weyl_mul(&aa, &pp), q, &metric), &ComplexRational::one());
                    let t = fiber_h(&pp, &weyl_mul(&adj(&aa, &metric), q), &metric);
                    rhs.accumulate(&t, &ComplexRational::from_int(if odd { -1 } else { 1 }));
                }
            }
            lhs == rhs
        },
    );

    let triples: Vec<_> = (0..count)
        .map(|_| {
            (
                sampler.element::<FiberVector>(n_cut),
                sampler.element::<FiberVector>(n_cut),
                sampler.element::<Scalar>(n_cut),
            )
        })
        .collect();
    check_all(&mut rep, "H-right-linear", "H(Ψ,Ψ′∘b) = H(Ψ,Ψ′)∘b", triples, |(p, q, b)| {
        fiber_h(p, &weyl_mul(q, b), &metric) == weyl_mul(&fiber_h(p, q, &metric), b)
    });

    let pairs: Vec<_> = (0..count)
        .map(|_| (lift(sampler.element::<FiberVector>(n_cut)), lift(sampler.element::<FiberVector>(n_cut))))
        .collect();
    check_all(
        &mut rep,
        "H-fedosov-compatible",
        "𝒟 H(Ψ,Ψ′) = H(𝒟^EΨ,Ψ′) + (−1)^{deg_a Ψ} H(Ψ,𝒟^EΨ′)",
        pairs,
        |(p, q)| {
            let lhs = sol.fedosov_d(&fiber_h(p, q, &metric)).with_trunc(n_cut);
            let mut rhs = fiber_h(&sol.fedosov_d_e(p), q, &metric);
            rhs.accumulate(&fiber_h(&p.parity_twist(), &sol.fedosov_d_e(q), &metric), &ComplexRational::one());
            lhs == rhs.with_trunc(n_cut)
        },
    );

    let singles: Vec<_> = (0..count.min(20)).map(|_| (sampler.section(0),)).collect();
    check_all(&mut rep, "H-classical", "σ(H(Ψ,Ψ)) at λ⁰ is the pointwise metric", singles, |(s,)| {
        let t = GradedElement::from_symbol(s, n_cut);
        let h = fiber_h(&t, &t, &metric);
        let sym = h.symbol().expect("no negative powers");
        sym.poly(0) == &metric.pointwise(s.coeff(0), s.coeff(0))
    });
    Ok(rep)
}

/// Identities of the deformed metric `h`.
pub fn deformed_metric_suite(sol: &FedosovSolution, sampler: &mut Sampler) -> Result<Report> {
    require_hermitian(sol.geometry())?;
    let metric = FiberMetric::from_geometry(sol.geometry());
    let k = sol.lambda_order();
    let count = sampler.count();
    let mut rep = Report::new("deformed metric");

    let pairs: Vec<_> = (0..count).map(|_| (sampler.section(k), sampler.section(k))).collect();
    check_all(&mut rep, "h-hermitian", "h(s,s′) = conj h(s′,s)", pairs, |(s, t)| {
        matches!((deformed_h(sol, s, t), deformed_h(sol, t, s)), (Ok(a), Ok(b)) if a == b.conj())
    });
    let triples: Vec<_> = (0..count)
        .map(|_| (sampler.section(k), sampler.section(k), sampler.function(k)))
        .collect();
    check_all(&mut rep, "h-right-linear", "h(s, s′•f) = h(s,s′) ⋆ f", triples, |(s, t, f)| {
        let l = act_right(sol, t, f).and_then(|tf| deformed_h(sol, s, &tf));
        let r = deformed_h(sol, s, t).and_then(|h| star(sol, &h, f));
        matches!((l, r), (Ok(l), Ok(r)) if l == r)
    });
    let triples: Vec<_> = (0..count)
        .map(|_| (sampler.endo(k), sampler.section(k), sampler.section(k)))
        .collect();
    check_all(&mut rep, "h-adjoint", "h(A•′s, s′) = h(s, A*•′s′)", triples, |(a, s, t)| {
        let l = act_left(sol, a, s).and_then(|as_| deformed_h(sol, &as_, t));
        let r = act_left(sol, &adj_series(a, &metric), t).and_then(|at| deformed_h(sol, s, &at));
        matches!((l, r), (Ok(l), Ok(r)) if l == r)
    });
    let singles: Vec<_> = (0..count.min(20)).map(|_| (sampler.section(k),)).collect();
    check_all(&mut rep, "h-classical", "h(s,s) at λ⁰ is the pointwise metric", singles, |(s,)| {
        deformed_h(sol, s, s).is_ok_and(|h| h.poly(0) == &metric.pointwise(s.coeff(0), s.coeff(0)))
    });
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::GeometryInput;
    use crate::testkit::RandomSpec;
    use crate::weyl::{Fiber, TruncationOrder};

    fn hermitian_curved(rank: usize) -> FedosovSolution {
        let mut g = GeometryInput::flat(1, rank);
        g.hermitian = true;
        g.set_gamma_symmetric(0, 0, 0, Poly::var(2, 1));
        let mut a = EndMatrix::zero(2, rank);
        a.set(0, 0, Poly::var(2, 0).scale(&ComplexRational::i()));
        if rank > 1 {
            a.set(0, 1, Poly::var(2, 1));
            a.set(1, 0, -&Poly::var(2, 1));
        }
        g.set_conn(1, a);
        FedosovSolution::for_lambda_order(g.build().unwrap(), 2).unwrap()
    }

    #[test]
    fn involutions() {
        let spec = RandomSpec::default();
        let mut s = Sampler::new(&spec, 1, 2);
        let sol = hermitian_curved(2);
        let metric = FiberMetric::from_geometry(sol.geometry());
        let t = TruncationOrder(4);
        let b: GradedElement<Scalar> = s.element(t);
        assert_eq!(conj(&conj(&b)), b);
        let id = GradedElement::identity(1, 2, t);
        assert_eq!(adj(&id, &metric), id);
        let a: GradedElement<EndMatrix> = s.element_graded(t, Some(1));
        let c: GradedElement<EndMatrix> = s.element_graded(t, Some(1));
        // odd × odd: (a∘c)* = −c*∘a*
        assert_eq!(adj(&weyl_mul(&a, &c), &metric), -&weyl_mul(&adj(&c, &metric), &adj(&a, &metric)));
    }

    #[test]
    fn small_suites_pass() {
        let spec = RandomSpec {
            count: 4,
            ..RandomSpec::default()
        };
        let sol = hermitian_curved(2);
        let mut s = Sampler::new(&spec, 1, 2);
        for rep in [
            reality_suite(&sol, &mut s).unwrap(),
            fiber_metric_suite(&sol, &mut s).unwrap(),
            deformed_metric_suite(&sol, &mut s).unwrap(),
        ] {
            assert!(rep.all_passed(), "{rep}");
        }
    }

    #[test]
    fn non_hermitian_geometry_is_refused() {
        let sol = FedosovSolution::for_lambda_order(GeometryInput::flat(1, 1).build().unwrap(), 1).unwrap();
        let s = FormalSection::classical(1, 1, 1, FiberVector::new(vec![Poly::one(2)]));
        assert!(matches!(deformed_h(&sol, &s, &s), Err(Error::Unsupported(_))));
    }
}
