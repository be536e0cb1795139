//! The Fedosov recursions for `r`, `r′`, `r^E` and the flat derivatives
//! `𝒟 = −δ + D + (i/λ)ad(r)`, `𝒟′ = −δ + D′ + (i/λ)ad(r′)` and
//! `𝒟^E = −δ + D^E + (i/λ)ad(r) + r^E∘`.
//!
//! Solutions are stored three total degrees above the requested cutoff
//! `N`: `δ` lowers `Deg` by one and `(i/λ)` by two, so derived quantities
//! (Taylor series, residuals, `𝒟²`) are then exact through `Deg N`.

use num_traits::One;

use crate::error::{Error, Result};
use crate::geometry::{ConnectionAction, Geometry};
use crate::report::Report;
use crate::scalar::ComplexRational;
use crate::weyl::serial::to_canonical_text;
use crate::weyl::{
    scaled_ad_cutoff, scaled_mul_cutoff, weyl_mul_cutoff, EndMatrix, Fiber, FiberMul, FiberVector, GradedElement,
    GradedKey, Scalar, TruncationOrder,
};

/// Extra total degree carried by stored solutions.
pub const HEADROOM: u32 = 3;

fn minus_i() -> ComplexRational {
    -ComplexRational::i()
}

/// Split into homogeneous `Deg` components `0..=trunc` (index = Deg).
pub(crate) fn by_degree<F: Fiber>(a: &GradedElement<F>) -> Vec<GradedElement<F>> {
    let top = a.trunc().get().max(0) as usize;
    let mut parts = vec![GradedElement::zero(a.n(), a.rank(), a.trunc()); top + 1];
    for (k, v) in a.terms() {
        let d = k.total_degree();
        if d >= 0 {
            parts[d as usize].add_owned(k.clone(), v.clone());
        }
    }
    parts
}

/// Degree-by-degree solution of
/// `x^(3) = δ⁻¹ s^(2)`,
/// `x^(m) = δ⁻¹(D x^(m−1) + (i/λ) Σ_{a+b=m+1} x^(a)∘x^(b) + s^(m−1))`
/// at cutoff `work`, where `s` is the source term.
fn solve_recursion<F>(geo: &Geometry, source: &GradedElement<F>, work: TruncationOrder) -> GradedElement<F>
where
    F: ConnectionAction + FiberMul<F, Output = F>,
{
    let w = work.get() as usize;
    let src = by_degree(&source.with_trunc(work));
    let mut parts: Vec<GradedElement<F>> = vec![GradedElement::zero(source.n(), source.rank(), work); w + 1];
    for m in 3..=w {
        let mut rhs = src[m - 1].clone();
        if m > 3 {
            rhs.accumulate(&geo.cov_d(&parts[m - 1]), &ComplexRational::one());
            let cutoff = TruncationOrder(m as u32 - 1);
            for a in 3..=m - 2 {
                let b = m + 1 - a;
                rhs.accumulate(&scaled_mul_cutoff(&parts[a], &parts[b], cutoff), &ComplexRational::one());
            }
        }
        parts[m] = rhs.delta_inv();
    }
    let mut out = GradedElement::zero(source.n(), source.rank(), work);
    for p in &parts {
        out.accumulate(p, &ComplexRational::one());
    }
    out
}

/// `Ω` plus the curvature source at `Deg 2`.
fn scalar_source(geo: &Geometry, work: TruncationOrder) -> GradedElement<Scalar> {
    &geo.curvature_r(work) + &geo.omega_element(work)
}

/// The unique `r` with `δr = R + Dr + (i/λ) r∘r + Ω`, `δ⁻¹r = 0`, all
/// terms of `Deg ≥ 3`, computed through `Deg ≤ trunc`.
pub fn solve_r(geo: &Geometry, trunc: TruncationOrder) -> GradedElement<Scalar> {
    solve_recursion(geo, &scalar_source(geo, trunc), trunc)
}

/// The unique `r′` with `δr′ = R − iλR^E + D′r′ + (i/λ) r′∘r′ + Ω`,
/// `δ⁻¹r′ = 0`, through `Deg ≤ trunc`.
pub fn solve_r_prime(geo: &Geometry, trunc: TruncationOrder) -> Result<GradedElement<EndMatrix>> {
    let mut source = scalar_source(geo, trunc).to_end();
    source.accumulate(&geo.curvature_re(trunc).mul_lambda_pow(1), &minus_i());
    let r_prime = solve_recursion(geo, &source, trunc);
    if r_prime.min_lambda().unwrap_or(0) < 0 {
        return Err(Error::Inconsistency("negative power of λ in r′".into()));
    }
    Ok(r_prime)
}

/// `r^E = (i/λ)(r′ − r)`, exact through `Deg ≤ trunc − 2`.
pub fn compute_re(r: &GradedElement<Scalar>, r_prime: &GradedElement<EndMatrix>) -> Result<GradedElement<EndMatrix>> {
    r.check_compatible(r_prime)?;
    let diff = r_prime - &r.to_end();
    if diff.terms().any(|(k, _)| k.lam == 0) {
        return Err(Error::Inconsistency("classical limits of r and r′ differ".into()));
    }
    let trunc = TruncationOrder(r.trunc().0.saturating_sub(2));
    Ok(diff.mul_lambda_pow(-1).with_trunc(trunc).scale(&ComplexRational::i()))
}

/// The solved connection data for one geometry and cutoff.
#[derive(Clone, Debug)]
pub struct FedosovSolution {
    geometry: Geometry,
    trunc: TruncationOrder,
    r: GradedElement<Scalar>,
    r_prime: GradedElement<EndMatrix>,
    r_e: GradedElement<EndMatrix>,
}

impl FedosovSolution {
    /// Solve for star products modulo `λ^(order+1)`, i.e. cutoff `N = 2·order`.
    pub fn for_lambda_order(geometry: Geometry, order: usize) -> Result<Self> {
        Self::solve(geometry, TruncationOrder::for_lambda_order(order))
    }

    pub fn solve(geometry: Geometry, trunc: TruncationOrder) -> Result<Self> {
        let work = trunc.plus(HEADROOM);
        let r = solve_r(&geometry, work);
        let r_prime = solve_r_prime(&geometry, work)?;
        let r_e = compute_re(&r, &r_prime)?;
        if r_e.min_lambda().unwrap_or(0) < 0 {
            return Err(Error::Inconsistency("negative power of λ in r^E".into()));
        }
        Ok(Self {
            geometry,
            trunc,
            r,
            r_prime,
            r_e,
        })
    }

    pub fn geometry(&self) -> &Geometry {
        &self.geometry
    }

    pub fn n(&self) -> usize {
        self.geometry.n()
    }

    pub fn rank(&self) -> usize {
        self.geometry.rank()
    }

    /// The cutoff `N` through which all derived quantities are exact.
    pub fn trunc(&self) -> TruncationOrder {
        self.trunc
    }

    /// Largest λ-order `K` with `2K ≤ N`.
    pub fn lambda_order(&self) -> usize {
        self.trunc.lambda_order()
    }

    /// Cutoff of the stored `r`, `r′`.
    pub fn work_trunc(&self) -> TruncationOrder {
        self.r.trunc()
    }

    /// `r` truncated at `N`.
    pub fn r(&self) -> GradedElement<Scalar> {
        self.r.with_trunc(self.trunc)
    }

    pub fn r_prime(&self) -> GradedElement<EndMatrix> {
        self.r_prime.with_trunc(self.trunc)
    }

    pub fn r_e(&self) -> GradedElement<EndMatrix> {
        self.r_e.with_trunc(self.trunc)
    }

    pub(crate) fn r_full(&self) -> &GradedElement<Scalar> {
        &self.r
    }

    pub(crate) fn r_prime_full(&self) -> &GradedElement<EndMatrix> {
        &self.r_prime
    }

    pub(crate) fn r_e_full(&self) -> &GradedElement<EndMatrix> {
        &self.r_e
    }

    /// `𝒟x = −δx + Dx + (i/λ)ad(r)x` at the cutoff of `x`. The top degree
    /// is exact only if `x` is known one degree beyond its cutoff.
    pub fn fedosov_d(&self, x: &GradedElement<Scalar>) -> GradedElement<Scalar> {
        let mut out = self.geometry.cov_d(x);
        out.accumulate(&x.delta(), &-ComplexRational::one());
        out.accumulate(&scaled_ad_cutoff(&self.r, x, x.trunc()), &ComplexRational::one());
        out
    }

    /// `𝒟′a = −δa + D′a + (i/λ)ad(r′)a`.
    pub fn fedosov_d_prime(&self, a: &GradedElement<EndMatrix>) -> GradedElement<EndMatrix> {
        let mut out = self.geometry.cov_d(a);
        out.accumulate(&a.delta(), &-ComplexRational::one());
        out.accumulate(&scaled_ad_cutoff(&self.r_prime, a, a.trunc()), &ComplexRational::one());
        out
    }

    /// `𝒟^EΨ = −δΨ + D^EΨ + (i/λ)ad(r)Ψ + r^E∘Ψ`.
    pub fn fedosov_d_e(&self, psi: &GradedElement<FiberVector>) -> GradedElement<FiberVector> {
        let mut out = self.geometry.cov_d(psi);
        out.accumulate(&psi.delta(), &-ComplexRational::one());
        out.accumulate(&scaled_ad_cutoff(&self.r, psi, psi.trunc()), &ComplexRational::one());
        out.accumulate(&weyl_mul_cutoff(&self.r_e, psi, psi.trunc()), &ComplexRational::one());
        out
    }

    /// `δr − Dr − (i/λ)r∘r − Ω − R` through `Deg N` (zero when solved).
    pub fn residual_r(&self) -> GradedElement<Scalar> {
        let n = self.trunc;
        let r = &self.r;
        let mut res = r.delta().with_trunc(n);
        res.accumulate(&self.geometry.cov_d(r), &-ComplexRational::one());
        res.accumulate(&scaled_mul_cutoff(r, r, n), &-ComplexRational::one());
        res.accumulate(&scalar_source(&self.geometry, n), &-ComplexRational::one());
        res
    }

    /// `δr′ − D′r′ − (i/λ)r′∘r′ − Ω − R + iλR^E` through `Deg N`.
    pub fn residual_r_prime(&self) -> GradedElement<EndMatrix> {
        let n = self.trunc;
        let rp = &self.r_prime;
        let mut res = rp.delta().with_trunc(n);
        res.accumulate(&self.geometry.cov_d(rp), &-ComplexRational::one());
        res.accumulate(&scaled_mul_cutoff(rp, rp, n), &-ComplexRational::one());
        res.accumulate(&scalar_source(&self.geometry, n).to_end(), &-ComplexRational::one());
        res.accumulate(&self.geometry.curvature_re(n).mul_lambda_pow(1), &ComplexRational::i());
        res
    }

    /// `δr^E − R^E − D′r^E − (i/λ)ad(r)r^E − r^E∘r^E` through `Deg N`.
    pub fn residual_r_e(&self) -> GradedElement<EndMatrix> {
        let n = self.trunc;
        let re = &self.r_e;
        let mut res = re.delta().with_trunc(n);
        res.accumulate(&self.geometry.curvature_re(n), &-ComplexRational::one());
        res.accumulate(&self.geometry.cov_d(re), &-ComplexRational::one());
        res.accumulate(&scaled_ad_cutoff(&self.r, re, n), &-ComplexRational::one());
        res.accumulate(&weyl_mul_cutoff(re, re, n), &-ComplexRational::one());
        res
    }

    /// All residual and normalization checks of the solution.
    pub fn verify(&self) -> Report {
        let mut report = Report::new("fedosov solution");
        let witness = |ok: bool, text: String| if ok { None } else { Some(text) };

        let res = self.residual_r();
        report.record(
            "r-equation",
            "δr = R + Dr + (i/λ) r∘r + Ω",
            1,
            witness(res.is_zero(), to_canonical_text(&res)),
        );
        let res = self.residual_r_prime();
        report.record(
            "r-prime-equation",
            "δr′ = R − iλR^E + D′r′ + (i/λ) r′∘r′ + Ω",
            1,
            witness(res.is_zero(), to_canonical_text(&res)),
        );
        let res = self.residual_r_e();
        report.record(
            "rE-equation",
            "δr^E = R^E + D′r^E + (i/λ)ad(r)r^E + r^E∘r^E",
            1,
            witness(res.is_zero(), to_canonical_text(&res)),
        );

        let r = self.r();
        let rp = self.r_prime();
        let re = self.r_e();
        let norm = [r.delta_inv().is_zero(), rp.delta_inv().is_zero(), re.delta_inv().is_zero()];
        report.record(
            "normalization",
            "δ⁻¹r = δ⁻¹r′ = δ⁻¹r^E = 0",
            1,
            witness(norm.iter().all(|b| *b), format!("r: {}, r′: {}, r^E: {}", norm[0], norm[1], norm[2])),
        );
        let lam_ok = [&r.min_lambda(), &rp.min_lambda(), &re.min_lambda()]
            .iter()
            .all(|m| m.unwrap_or(0) >= 0);
        report.record("no-negative-lambda", "r, r′, r^E contain no negative powers of λ", 1, witness(lam_ok, String::new()));

        let grading = |k: &GradedKey, min_deg: i32| k.asym_degree() == 1 && k.total_degree() >= min_deg;
        let graded = r.terms().all(|(k, _)| grading(k, 3))
            && rp.terms().all(|(k, _)| grading(k, 3))
            && re.terms().all(|(k, _)| grading(k, 1));
        report.record(
            "degrees",
            "deg_a = 1; Deg ≥ 3 for r, r′ and Deg ≥ 1 for r^E",
            1,
            witness(graded, String::new()),
        );
        let diff = &rp - &r.to_end();
        let classical = diff.terms().all(|(k, _)| k.lam > 0);
        report.record(
            "classical-limit",
            "r′ − r ≡ 0 mod λ",
            1,
            witness(classical, to_canonical_text(&diff.filter(|k| k.lam == 0))),
        );
        report
    }

    /// Header for serialized solutions.
    pub fn header(&self, checks: Option<&Report>) -> String {
        let mut s = format!(
            "# geometry {}\n# N = {}\n",
            self.geometry.input().digest(),
            self.trunc.get()
        );
        match checks {
            Some(rep) => {
                let passed: Vec<&str> = rep.records.iter().filter(|r| r.passed()).map(|r| r.name.as_str()).collect();
                s.push_str(&format!("# checks passed: {}\n", passed.join(", ")));
            }
            None => s.push_str("# checks passed: (not run)\n"),
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{GeometryInput, TwoForm};
    use crate::poly::Poly;

    fn curved(rank: usize) -> Geometry {
        let mut g = GeometryInput::flat(1, rank);
        g.set_gamma_symmetric(0, 0, 0, Poly::var(2, 1));
        let mut a = EndMatrix::zero(2, rank);
        a.set(0, 0, Poly::var(2, 0).scale(&ComplexRational::i()));
        g.set_conn(1, a);
        g.build().unwrap()
    }

    #[test]
    fn flat_solution_is_zero() {
        let sol = FedosovSolution::solve(GeometryInput::flat(1, 1).build().unwrap(), TruncationOrder(6)).unwrap();
        assert!(sol.r().is_zero() && sol.r_prime().is_zero() && sol.r_e().is_zero());
        assert!(sol.verify().all_passed());
    }

    #[test]
    fn constant_omega_leading_term() {
        let mut g = GeometryInput::flat(1, 1);
        let mut w = TwoForm::zero(2);
        w.set_antisymmetric(0, 1, Poly::from_int(2, 3));
        g.set_omega(1, w);
        let geo = g.build().unwrap();
        let t = TruncationOrder(8);
        let r = solve_r(&geo, t);
        // leading term λδ⁻¹Ω₁, then the correction forced by (i/λ) r∘r
        let r3 = geo.omega_element(t).delta_inv();
        assert_eq!(r.total_degree_part(3), r3);
        let r5 = scaled_mul_cutoff(&r3, &r3, t).delta_inv();
        assert!(!r5.is_zero());
        assert_eq!(r.total_degree_part(5), r5);
        assert!(r.total_degree_part(4).is_zero());
        let sol = FedosovSolution::solve(geo, t).unwrap();
        assert!(sol.residual_r().is_zero());
    }

    #[test]
    fn curved_residuals_vanish() {
        let sol = FedosovSolution::solve(curved(1), TruncationOrder(6)).unwrap();
        assert!(!sol.r().is_zero());
        assert!(!sol.r_e().is_zero());
        let rep = sol.verify();
        assert!(rep.all_passed(), "{rep}");
    }

    #[test]
    fn lowest_re_term_is_delta_inverse_of_curvature() {
        let sol = FedosovSolution::solve(curved(1), TruncationOrder(4)).unwrap();
        let t = sol.trunc();
        let low = sol.r_e().filter(|k| k.total_degree() == 1);
        assert_eq!(low, sol.geometry().curvature_re(t).delta_inv());
    }
}
