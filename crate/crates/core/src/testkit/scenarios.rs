//! Named geometries on the two-dimensional chart used by the suites and
//! the `selftest` command.

use crate::geometry::{GeometryInput, TwoForm};
use crate::poly::Poly;
use crate::scalar::ComplexRational;
use crate::weyl::{EndMatrix, Fiber};

fn x(k: usize) -> Poly {
    Poly::var(2, k)
}

fn i_times(p: Poly) -> Poly {
    p.scale(&ComplexRational::i())
}

/// Flat Γ, trivial connection, `Ω = 0`.
pub fn flat(rank: usize) -> GeometryInput {
    GeometryInput::flat(1, rank)
}

/// `Γ_111 = x2`, `Γ_122 = x1`, trivial line bundle.
pub fn curved_gamma() -> GeometryInput {
    let mut g = GeometryInput::flat(1, 1);
    g.set_gamma_symmetric(0, 0, 0, x(1));
    g.set_gamma_symmetric(0, 1, 1, x(0));
    g
}

/// Flat Γ, line bundle with `A_2 = i·x1`, i.e. constant curvature.
pub fn line_bundle() -> GeometryInput {
    let mut g = GeometryInput::flat(1, 1);
    let mut a = EndMatrix::zero(2, 1);
    a.set(0, 0, i_times(x(0)));
    g.set_conn(1, a);
    g
}

/// Curved Γ and a non-abelian rank-2 connection, `Ω = λ·x1 dx1∧dx2`.
pub fn curved_rank2() -> GeometryInput {
    let mut g = GeometryInput::flat(1, 2);
    g.set_gamma_symmetric(0, 0, 1, x(0));
    g.set_gamma_symmetric(1, 1, 1, x(0));
    let mut a1 = EndMatrix::zero(2, 2);
    a1.set(0, 1, x(1));
    a1.set(1, 0, -&x(1));
    g.set_conn(0, a1);
    let mut a2 = EndMatrix::zero(2, 2);
    a2.set(0, 0, i_times(x(0)));
    a2.set(1, 1, i_times(-&x(0)));
    g.set_conn(1, a2);
    let mut om = TwoForm::zero(2);
    om.set_antisymmetric(0, 1, x(0));
    g.set_omega(1, om);
    g
}

/// [`curved_rank2`] declared Hermitian; its connection is anti-Hermitian
/// and `Ω`, `Γ` are real.
pub fn hermitian_rank2() -> GeometryInput {
    let mut g = curved_rank2();
    g.hermitian = true;
    g
}

/// Curved Γ with a curved Hermitian line bundle and real `Ω`.
pub fn hermitian_line() -> GeometryInput {
    let mut g = curved_gamma();
    g.hermitian = true;
    let mut a = EndMatrix::zero(2, 1);
    a.set(0, 0, i_times(&x(0) * &x(1)));
    g.set_conn(1, a);
    let mut om = TwoForm::zero(2);
    om.set_antisymmetric(0, 1, Poly::from_int(2, 2));
    g.set_omega(1, om);
    g
}

/// Constant `Γ` and a constant non-abelian Hermitian connection. Both
/// curvatures are nonzero through their quadratic terms, while the
/// coefficient polynomials stay small under the recursions.
pub fn constant_curved() -> GeometryInput {
    let mut g = GeometryInput::flat(1, 2);
    g.hermitian = true;
    g.set_gamma_symmetric(0, 0, 0, Poly::one(2));
    g.set_gamma_symmetric(0, 1, 1, Poly::from_int(2, 2));
    let mut a1 = EndMatrix::zero(2, 2);
    a1.set(0, 1, Poly::one(2));
    a1.set(1, 0, Poly::from_int(2, -1));
    g.set_conn(0, a1);
    let mut a2 = EndMatrix::zero(2, 2);
    a2.set(0, 0, i_times(Poly::one(2)));
    a2.set(1, 1, i_times(Poly::from_int(2, -1)));
    g.set_conn(1, a2);
    let mut om = TwoForm::zero(2);
    om.set_antisymmetric(0, 1, Poly::one(2));
    g.set_omega(1, om);
    g
}

/// All named scenarios in a fixed order.
pub fn all() -> Vec<(&'static str, GeometryInput)> {
    vec![
        ("flat", flat(1)),
        ("flat-rank2", flat(2)),
        ("curved-gamma", curved_gamma()),
        ("line-bundle", line_bundle()),
        ("curved-rank2", curved_rank2()),
        ("hermitian-rank2", hermitian_rank2()),
        ("hermitian-line", hermitian_line()),
        ("constant-curved", constant_curved()),
    ]
}

pub fn by_name(name: &str) -> Option<GeometryInput> {
    all().into_iter().find(|(n, _)| *n == name).map(|(_, g)| g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_scenario_validates() {
        for (name, g) in all() {
            assert!(g.validate().is_ok(), "{name}: {}", g.validate());
        }
        assert!(by_name("line-bundle").is_some());
        let geo = constant_curved().build().unwrap();
        assert!(!geo.curvature_r(crate::weyl::TruncationOrder(4)).is_zero());
        assert!(!geo.bundle_curvature(0, 1).is_zero());
        assert!(by_name("nope").is_none());
    }
}
