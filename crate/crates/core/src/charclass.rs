//! Weyl curvatures of the abelian connections and the relation between
//! their classes for a line bundle.
//!
//! `W = ω + δr − R − Dr − (i/λ) r∘r`, which equals `ω + Ω` once `r` solves
//! its equation. For a line bundle the primed curvature is built the same
//! way from `r′`, `D′` and `R⊗1`, and `W′ − W = c·λ·R^L` with `c = −i`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::fedosov::FedosovSolution;
use crate::geometry::{Geometry, GeometryInput, TwoForm};
use crate::poly::Poly;
use crate::report::Report;
use crate::scalar::ComplexRational;
use crate::weyl::{scaled_mul_cutoff, EndMatrix, Fiber, GradedElement, Scalar};

/// `Σ_m λ^m W_m`, each `W_m` a two-form on the base.
#[derive(Clone, Debug, PartialEq)]
pub struct FormalTwoForm {
    pub coeffs: Vec<TwoForm>,
}

impl FormalTwoForm {
    pub fn order(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn coeff(&self, m: usize) -> &TwoForm {
        &self.coeffs[m]
    }

    pub fn is_closed(&self) -> bool {
        self.coeffs.iter().all(|f| f.closedness_defects().is_empty())
    }

    fn from_central(el: &GradedElement<Scalar>, order: usize) -> Self {
        Self {
            coeffs: (0..=order).map(|m| TwoForm::from_element(el, m as i32)).collect(),
        }
    }
}

impl std::fmt::Display for FormalTwoForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut any = false;
        for (m, form) in self.coeffs.iter().enumerate() {
            let d = form.dim();
            for i in 0..d {
                for j in i + 1..d {
                    let p = form.get(i, j);
                    if p.is_zero() {
                        continue;
                    }
                    writeln!(f, "lambda^{m} | dx{}^dx{} | {p}", i + 1, j + 1)?;
                    any = true;
                }
            }
        }
        if !any {
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// The Weyl curvature and its structural properties.
#[derive(Clone, Debug)]
pub struct WeylCurvature {
    pub form: FormalTwoForm,
    /// No fiber variables and, in the primed case, scalar-valued.
    pub central: bool,
    pub closed: bool,
}

fn central_scalar(el: &GradedElement<Scalar>) -> bool {
    el.terms().all(|(k, _)| k.sym_degree() == 0)
}

/// `W` (or `W′` when `primed`; the primed curvature needs a line bundle).
pub fn weyl_curvature(sol: &FedosovSolution, primed: bool) -> Result<WeylCurvature> {
    let geo = sol.geometry();
    let n = sol.trunc();
    let order = sol.lambda_order();
    let neg = -ComplexRational::one();
    if !primed {
        let r = sol.r_full();
        let mut w = geo.symplectic_form(n);
        w.accumulate(&r.delta(), &ComplexRational::one());
        w.accumulate(&geo.curvature_r(n), &neg);
        w.accumulate(&geo.cov_d(r), &neg);
        w.accumulate(&scaled_mul_cutoff(r, r, n), &neg);
        let closed = geo.cov_d(&w).is_zero();
        return Ok(WeylCurvature {
            central: central_scalar(&w),
            closed,
            form: FormalTwoForm::from_central(&w, order),
        });
    }
    if sol.rank() != 1 {
        return Err(Error::Unsupported(format!(
            "the primed curvature is central only for line bundles (rank {})",
            sol.rank()
        )));
    }
    let rp = sol.r_prime_full();
    let mut w: GradedElement<EndMatrix> = geo.symplectic_form(n).to_end();
    w.accumulate(&rp.delta(), &ComplexRational::one());
    w.accumulate(&geo.curvature_r(n).to_end(), &neg);
    w.accumulate(&geo.cov_d(rp), &neg);
    w.accumulate(&scaled_mul_cutoff(rp, rp, n), &neg);
    let scalar = w.as_scalar().ok_or_else(|| Error::Inconsistency("rank-1 curvature not scalar".into()))?;
    let closed = geo.cov_d(&scalar).is_zero();
    Ok(WeylCurvature {
        central: central_scalar(&scalar),
        closed,
        form: FormalTwoForm::from_central(&scalar, order),
    })
}

/// The outcome of comparing `W′ − W` with `λ R^L`.
#[derive(Clone, Debug)]
pub struct ClassRelation {
    pub curvature: WeylCurvature,
    pub curvature_prime: WeylCurvature,
    /// `c` with `W′ − W = c·λ·R^L`, if such a constant exists.
    pub factor: Option<ComplexRational>,
    /// `W = ω + Ω` holds coefficientwise.
    pub matches_omega: bool,
}

fn ratio(num: &Poly, den: &Poly) -> Option<ComplexRational> {
    let (exps, c) = den.terms().next()?;
    let q = &num.coeff(exps) / c;
    (den.scale(&q) == *num).then_some(q)
}

/// Computes both curvatures of a line-bundle solution and the constant
/// relating their difference to the bundle curvature.
pub fn class_relation(sol: &FedosovSolution) -> Result<ClassRelation> {
    let geo = sol.geometry();
    let w = weyl_curvature(sol, false)?;
    let wp = weyl_curvature(sol, true)?;
    let dim = geo.dim();

    let mut expected = vec![omega_form(geo)];
    for m in 1..=sol.lambda_order() {
        expected.push(geo.omega_coefficient(m).cloned().unwrap_or_else(|| TwoForm::zero(dim)));
    }
    let matches_omega = w.form.coeffs == expected;

    // W′ − W must be λ times a multiple of R^L, with nothing at other orders.
    let mut factor: Option<ComplexRational> = None;
    let mut consistent = true;
    for m in 0..=sol.lambda_order() {
        for i in 0..dim {
            for j in i + 1..dim {
                let diff = wp.form.coeff(m).get(i, j) - w.form.coeff(m).get(i, j);
                let rl = geo.bundle_curvature(i, j).get(0, 0);
                if m != 1 {
                    consistent &= diff.is_zero();
                    continue;
                }
                if rl.is_zero() {
                    consistent &= diff.is_zero();
                    continue;
                }
                match (ratio(&diff, rl), &factor) {
                    (Some(q), None) => factor = Some(q),
                    (Some(q), Some(f)) => consistent &= q == *f,
                    (None, _) => consistent = false,
                }
            }
        }
    }
    Ok(ClassRelation {
        curvature: w,
        curvature_prime: wp,
        factor: if consistent { factor } else { None },
        matches_omega,
    })
}

fn omega_form(geo: &Geometry) -> TwoForm {
    let d = geo.dim();
    let n = geo.n();
    let mut f = TwoForm::zero(d);
    for i in 0..n {
        f.set_antisymmetric(i, n + i, Poly::one(d));
    }
    f
}

/// Line bundles with nonzero curvature over `R^2` and `R^4`, each paired
/// with two choices of `Ω`.
pub fn standard_line_bundles() -> Vec<(String, GeometryInput)> {
    let mut out = vec![];
    let i = ComplexRational::i();
    let mut bases = vec![];

    let mut g = GeometryInput::flat(1, 1);
    let mut a = EndMatrix::zero(2, 1);
    a.set(0, 0, Poly::var(2, 0).scale(&i));
    g.set_conn(1, a);
    bases.push(("flat base, constant field".to_string(), g));

    let mut g = GeometryInput::flat(1, 1);
    g.set_gamma_symmetric(0, 0, 0, Poly::var(2, 1));
    g.set_gamma_symmetric(0, 1, 1, Poly::var(2, 0));
    let mut a = EndMatrix::zero(2, 1);
    a.set(0, 0, (&Poly::var(2, 1) * &Poly::var(2, 1)).scale(&i));
    g.set_conn(0, a);
    bases.push(("curved base, quadratic potential".to_string(), g));

    let mut g = GeometryInput::flat(2, 1);
    g.set_gamma_symmetric(0, 1, 2, Poly::var(4, 3));
    let mut a = EndMatrix::zero(4, 1);
    a.set(0, 0, Poly::var(4, 2).scale(&i));
    g.set_conn(3, a);
    let mut b = EndMatrix::zero(4, 1);
    b.set(0, 0, Poly::var(4, 0).scale(&ComplexRational::from_int(2)));
    g.set_conn(1, b);
    bases.push(("four-dimensional base".to_string(), g));

    for (name, base) in bases {
        let d = base.dim();
        out.push((format!("{name}, Ω = 0"), base.clone()));
        let mut g = base;
        let mut om = TwoForm::zero(d);
        om.set_antisymmetric(0, d / 2, Poly::var(d, 0).scale(&ComplexRational::from_int(3)));
        if d > 2 {
            om.set_antisymmetric(1, 3, Poly::one(d));
        }
        g.set_omega(1, om);
        out.push((format!("{name}, Ω = λΩ₁"), g));
    }
    out
}

/// Centrality, closedness, `W = ω + Ω` and a common factor `c = −i` across
/// all given line bundles.
pub fn class_relation_suite(cases: &[(String, GeometryInput)], order: usize) -> Report {
    let mut rep = Report::new("characteristic classes");
    let expected = -ComplexRational::i();
    let mut factors = vec![];
    for (name, input) in cases {
        let outcome = input
            .clone()
            .build()
            .and_then(|g| FedosovSolution::for_lambda_order(g, order))
            .and_then(|sol| class_relation(&sol));
        match outcome {
            Err(e) => rep.record(&format!("class[{name}]"), "curvatures computable", 1, Some(e.to_string())),
            Ok(rel) => {
                let structural = rel.curvature.central
                    && rel.curvature.closed
                    && rel.curvature_prime.central
                    && rel.curvature_prime.closed;
                rep.record(
                    &format!("weyl-curvature-central-closed[{name}]"),
                    "W and W′ central and closed",
                    1,
                    (!structural).then(|| format!("W:\n{}W′:\n{}", rel.curvature.form, rel.curvature_prime.form)),
                );
                rep.record(
                    &format!("weyl-curvature-value[{name}]"),
                    "W = ω + Ω",
                    1,
                    (!rel.matches_omega).then(|| rel.curvature.form.to_string()),
                );
                rep.record(
                    &format!("class-factor[{name}]"),
                    "W′ − W = −iλR^L",
                    1,
                    (rel.factor.as_ref() != Some(&expected))
                        .then(|| format!("factor {:?}", rel.factor.as_ref().map(|c| c.to_string()))),
                );
                factors.push(rel.factor);
            }
        }
    }
    let same = factors.windows(2).all(|w| w[0] == w[1]) && factors.iter().all(Option::is_some);
    rep.record(
        "class-factor-universal",
        "the same factor for every geometry and Ω",
        cases.len(),
        (!same).then(|| format!("{:?}", factors.iter().map(|f| f.as_ref().map(|c| c.to_string())).collect::<Vec<_>>())),
    );
    rep
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_weyl_curvature_is_omega() {
        let sol = FedosovSolution::for_lambda_order(GeometryInput::flat(1, 1).build().unwrap(), 2).unwrap();
        let rel = class_relation(&sol).unwrap();
        assert!(rel.matches_omega);
        assert_eq!(rel.curvature.form, rel.curvature_prime.form);
        assert!(rel.factor.is_none());
    }

    #[test]
    fn primed_curvature_needs_rank_one() {
        let sol = FedosovSolution::for_lambda_order(GeometryInput::flat(1, 2).build().unwrap(), 1).unwrap();
        assert!(matches!(weyl_curvature(&sol, true), Err(Error::Unsupported(_))));
    }

    #[test]
    fn first_line_bundle_factor() {
        let cases = standard_line_bundles();
        let g = cases[0].1.clone().build().unwrap();
        let sol = FedosovSolution::for_lambda_order(g, 2).unwrap();
        let rel = class_relation(&sol).unwrap();
        assert_eq!(rel.factor, Some(-ComplexRational::i()));
        assert!(rel.curvature_prime.central && rel.curvature_prime.closed);
    }
}
