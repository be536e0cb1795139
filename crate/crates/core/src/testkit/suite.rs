//! Randomized identity suites over a geometry, grouped as the library's
//! acceptance gates.

use num_traits::One;
use serde::Serialize;

use crate::charclass::{class_relation_suite, standard_line_bundles};
use crate::fedosov::FedosovSolution;
use crate::geometry::{Geometry, GeometryInput};
use crate::hermitian::{deformed_metric_suite, fiber_metric_suite, reality_suite};
use crate::poly::Poly;
use crate::report::Report;
use crate::scalar::ComplexRational;
use crate::taylor_star::{
    act_left, act_right, product_symbol, star, taylor, taylor_at, taylor_e, taylor_e_residual, taylor_prime,
    taylor_prime_at, taylor_prime_residual, taylor_residual,
};
use crate::testkit::oracle::{moyal_oracle, poisson_bracket};
use crate::testkit::random::{RandomSpec, Sampler};
use crate::testkit::shrink::check_all;
use crate::weyl::{
    ad_cutoff, scaled_ad_cutoff, weyl_mul, EndMatrix, FiberMul, FiberVector, FormalEndo, FormalFunction,
    FormalSection, GradedElement, Scalar, TruncationOrder,
};

/// Trial counts per group of properties.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trials {
    pub structural: usize,
    pub geometry: usize,
    pub flatness: usize,
    pub star: usize,
    pub moyal: usize,
    pub bimodule: usize,
    pub hermitian: usize,
}

impl Trials {
    /// The counts of the acceptance gates.
    pub fn acceptance() -> Self {
        Self {
            structural: 200,
            geometry: 100,
            flatness: 100,
            star: 50,
            moyal: 100,
            bimodule: 50,
            hermitian: 20,
        }
    }

    /// Small counts for smoke tests.
    pub fn quick() -> Self {
        Self {
            structural: 10,
            geometry: 5,
            flatness: 5,
            star: 3,
            moyal: 5,
            bimodule: 3,
            hermitian: 2,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteOptions {
    pub spec: RandomSpec,
    /// λ-order `K` of the star products (cutoff `N = 2K`).
    pub order: usize,
    /// Total degree cutoff of random fiber elements.
    pub element_trunc: u32,
    pub trials: Trials,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        Self {
            spec: RandomSpec::default(),
            order: 4,
            element_trunc: 6,
            trials: Trials::acceptance(),
        }
    }
}

impl SuiteOptions {
    pub fn quick(seed: u64) -> Self {
        Self {
            spec: RandomSpec {
                seed,
                ..RandomSpec::default()
            },
            order: 2,
            element_trunc: 5,
            trials: Trials::quick(),
        }
    }

    fn sampler(&self, n: usize, rank: usize, stream: u64) -> Sampler {
        Sampler::new(&self.spec, n, rank).fork(stream)
    }

    fn trunc(&self) -> TruncationOrder {
        TruncationOrder(self.element_trunc)
    }
}

fn one() -> ComplexRational {
    ComplexRational::one()
}

macro_rules! assoc {
    ($a:expr, $b:expr, $c:expr) => {
        weyl_mul(&weyl_mul($a, $b), $c) == weyl_mul($a, &weyl_mul($b, $c))
    };
}

/// Identities of `δ`, `δ*`, `δ⁻¹`, `σ` and the fiberwise product.
pub fn structural_suite(n: usize, rank: usize, opts: &SuiteOptions) -> Report {
    let mut rep = Report::new("structural operators");
    let t = opts.trunc();
    let count = opts.trials.structural;
    let mut s = opts.sampler(n, rank, 1);

    let singles: Vec<(GradedElement<Scalar>,)> = (0..count).map(|_| (s.element(t),)).collect();
    check_all(&mut rep, "delta-squared", "δ² = 0", singles.clone(), |(a,)| a.delta().delta().is_zero());
    check_all(&mut rep, "delta-star-squared", "(δ*)² = 0", singles.clone(), |(a,)| {
        a.delta_star().delta_star().is_zero()
    });
    check_all(&mut rep, "delta-laplacian", "δδ* + δ*δ = deg_s + deg_a", singles.clone(), |(a,)| {
        let lifted = a.with_trunc(t.plus(1)).delta_star().delta().with_trunc(t);
        &lifted + &a.delta().delta_star() == a.sym_plus_asym_degree()
    });
    check_all(&mut rep, "hodge", "δδ⁻¹ + δ⁻¹δ + σ = id", singles.clone(), |(a,)| {
        let mut x = a.with_trunc(t.plus(1)).delta_inv().delta().with_trunc(t);
        x.accumulate(&a.delta().delta_inv(), &one());
        x.accumulate(&a.sigma_part(), &one());
        x == *a
    });
    let omega_tilde = crate::geometry::omega_tilde(n, rank, t.plus(2));
    check_all(&mut rep, "delta-is-inner", "−δ = (i/λ) ad(ω̃)", singles.clone(), |(a,)| {
        scaled_ad_cutoff(&omega_tilde, a, t) == -&a.delta()
    });

    let ends: Vec<(GradedElement<EndMatrix>,)> = (0..count).map(|_| (s.element(t),)).collect();
    check_all(&mut rep, "delta-squared-end", "δ² = 0 on End-valued elements", ends.clone(), |(a,)| {
        a.delta().delta().is_zero()
    });
    check_all(&mut rep, "hodge-end", "δδ⁻¹ + δ⁻¹δ + σ = id on End-valued elements", ends, |(a,)| {
        let mut x = a.with_trunc(t.plus(1)).delta_inv().delta().with_trunc(t);
        x.accumulate(&a.delta().delta_inv(), &one());
        x.accumulate(&a.sigma_part(), &one());
        x == *a
    });

    let trip: Vec<_> = (0..count).map(|_| (s.element::<Scalar>(t), s.element::<Scalar>(t), s.element::<Scalar>(t))).collect();
    check_all(&mut rep, "associativity-scalar", "(a∘b)∘c = a∘(b∘c)", trip.clone(), |(a, b, c)| assoc!(a, b, c));
    check_all(&mut rep, "asym-degree-derivation", "deg_a is a derivation of ∘", trip.clone(), |(a, b, _)| {
        let lhs = weyl_mul(a, b).apply_asym_degree();
        let mut rhs = weyl_mul(&a.apply_asym_degree(), b);
        rhs.accumulate(&weyl_mul(a, &b.apply_asym_degree()), &one());
        lhs == rhs
    });
    check_all(&mut rep, "total-degree-derivation", "Deg is a derivation of ∘", trip.clone(), |(a, b, _)| {
        let lhs = weyl_mul(a, b).apply_total_degree();
        let mut rhs = weyl_mul(&a.apply_total_degree(), b);
        rhs.accumulate(&weyl_mul(a, &b.apply_total_degree()), &one());
        lhs == rhs
    });
    check_all(&mut rep, "truncation-consistency", "truncating before or after ∘ agrees", trip, |(a, b, _)| {
        let lower = TruncationOrder(t.0.saturating_sub(2));
        weyl_mul(a, b).with_trunc(lower) == weyl_mul(&a.with_trunc(lower), &b.with_trunc(lower))
    });

    let trip: Vec<_> = (0..count)
        .map(|_| (s.element::<EndMatrix>(t), s.element::<EndMatrix>(t), s.element::<EndMatrix>(t)))
        .collect();
    check_all(&mut rep, "associativity-end", "(A∘B)∘C = A∘(B∘C)", trip, |(a, b, c)| assoc!(a, b, c));
    let trip: Vec<_> = (0..count)
        .map(|_| (s.element::<EndMatrix>(t), s.element::<EndMatrix>(t), s.element::<FiberVector>(t)))
        .collect();
    check_all(&mut rep, "associativity-left-module", "(A∘B)∘Ψ = A∘(B∘Ψ)", trip, |(a, b, c)| assoc!(a, b, c));
    let trip: Vec<_> = (0..count)
        .map(|_| (s.element::<FiberVector>(t), s.element::<Scalar>(t), s.element::<Scalar>(t)))
        .collect();
    check_all(&mut rep, "associativity-right-module", "(Ψ∘a)∘b = Ψ∘(a∘b)", trip, |(a, b, c)| assoc!(a, b, c));
    let trip: Vec<_> = (0..count)
        .map(|_| (s.element::<EndMatrix>(t), s.element::<FiberVector>(t), s.element::<Scalar>(t)))
        .collect();
    check_all(&mut rep, "actions-commute", "(A∘Ψ)∘b = A∘(Ψ∘b)", trip, |(a, b, c)| assoc!(a, b, c));
    let trip: Vec<_> = (0..count)
        .map(|_| (s.element::<Scalar>(t), s.element::<EndMatrix>(t), s.element::<FiberVector>(t)))
        .collect();
    check_all(&mut rep, "associativity-mixed", "(a∘B)∘Ψ = a∘(B∘Ψ)", trip, |(a, b, c)| assoc!(a, b, c));

    let units: Vec<_> = (0..count)
        .map(|_| (s.element::<Scalar>(t), s.element::<EndMatrix>(t), s.element::<FiberVector>(t)))
        .collect();
    check_all(&mut rep, "units", "1∘a = a∘1 = a, 1∘A = A∘1 = A, 1∘Ψ = Ψ∘1 = Ψ", units, |(a, b, c)| {
        let one_s = GradedElement::<Scalar>::one(n, rank, t);
        let id = GradedElement::<EndMatrix>::identity(n, rank, t);
        weyl_mul(&one_s, a) == *a
            && weyl_mul(a, &one_s) == *a
            && weyl_mul(&id, b) == *b
            && weyl_mul(b, &id) == *b
            && weyl_mul(&id, c) == *c
            && weyl_mul(c, &one_s) == *c
    });
    rep
}

fn d_anticommutes_with_delta<F: crate::geometry::ConnectionAction>(geo: &Geometry, a: &GradedElement<F>) -> bool {
    let mut x = geo.cov_d(&a.delta());
    x.accumulate(&geo.cov_d(a).delta(), &one());
    x.is_zero()
}

/// `[δ, D] = 0`, the squares of the covariant derivatives, the Bianchi
/// identities and the (module) derivation laws of `D`, on random elements.
pub fn verify_geometry_identities(geo: &Geometry, opts: &SuiteOptions) -> Report {
    let (n, rank) = (geo.n(), geo.rank());
    let mut rep = Report::new("geometry identities");
    let t = opts.trunc();
    let count = opts.trials.geometry;
    let mut s = opts.sampler(n, rank, 2);
    let r = geo.curvature_r(t.plus(2));
    let re = geo.curvature_re(t.plus(2));

    let scal: Vec<(GradedElement<Scalar>,)> = (0..count).map(|_| (s.element(t),)).collect();
    let ends: Vec<(GradedElement<EndMatrix>,)> = (0..count).map(|_| (s.element(t),)).collect();
    let vecs: Vec<(GradedElement<FiberVector>,)> = (0..count).map(|_| (s.element(t),)).collect();

    check_all(&mut rep, "delta-D", "δD + Dδ = 0", scal.clone(), |(a,)| d_anticommutes_with_delta(geo, a));
    check_all(&mut rep, "delta-D-prime", "δD′ + D′δ = 0", ends.clone(), |(a,)| d_anticommutes_with_delta(geo, a));
    check_all(&mut rep, "delta-D-E", "δD^E + D^Eδ = 0", vecs.clone(), |(a,)| d_anticommutes_with_delta(geo, a));

    check_all(&mut rep, "D-squared", "D² = (i/λ) ad(R)", scal.clone(), |(a,)| {
        geo.cov_d(&geo.cov_d(a)) == scaled_ad_cutoff(&r, a, t)
    });
    let r_end = r.to_end();
    check_all(&mut rep, "D-prime-squared", "(D′)² = (i/λ) ad(R) + ad(R^E)", ends, |(a,)| {
        let mut rhs = scaled_ad_cutoff(&r_end, a, t);
        rhs.accumulate(&ad_cutoff(&re, a, t), &one());
        geo.cov_d(&geo.cov_d(a)) == rhs
    });
    check_all(&mut rep, "D-E-squared", "(D^E)² = (i/λ) ad(R) + R^E∘", vecs, |(a,)| {
        let mut rhs = scaled_ad_cutoff(&r, a, t);
        rhs.accumulate(&crate::weyl::weyl_mul_cutoff(&re, a, t), &one());
        geo.cov_d(&geo.cov_d(a)) == rhs
    });

    let bianchi = r.delta().is_zero() && geo.cov_d(&r).is_zero();
    rep.record("bianchi-R", "δR = 0, DR = 0", 1, (!bianchi).then(|| crate::weyl::serial::to_canonical_text(&r)));
    let bianchi_e = re.delta().is_zero() && geo.cov_d(&re).is_zero();
    rep.record(
        "bianchi-RE",
        "δR^E = 0, D′R^E = 0",
        1,
        (!bianchi_e).then(|| crate::weyl::serial::to_canonical_text(&re)),
    );

    let pairs: Vec<_> = (0..count).map(|_| (s.element::<Scalar>(t), s.element::<Scalar>(t))).collect();
    check_all(&mut rep, "D-derivation", "D(a∘b) = Da∘b + (−1)^{deg_a a} a∘Db", pairs, |(a, b)| {
        leibniz(geo, a, b)
    });
    let pairs: Vec<_> = (0..count).map(|_| (s.element::<EndMatrix>(t), s.element::<EndMatrix>(t))).collect();
    check_all(&mut rep, "D-prime-derivation", "D′(A∘B) = D′A∘B + (−1)^{deg_a A} A∘D′B", pairs, |(a, b)| {
        leibniz(geo, a, b)
    });
    let pairs: Vec<_> = (0..count).map(|_| (s.element::<EndMatrix>(t), s.element::<FiberVector>(t))).collect();
    check_all(&mut rep, "D-E-left-module", "D^E(A∘Ψ) = D′A∘Ψ + (−1)^{deg_a A} A∘D^EΨ", pairs, |(a, b)| {
        leibniz(geo, a, b)
    });
    let pairs: Vec<_> = (0..count).map(|_| (s.element::<FiberVector>(t), s.element::<Scalar>(t))).collect();
    check_all(&mut rep, "D-E-right-module", "D^E(Ψ∘b) = D^EΨ∘b + (−1)^{deg_a Ψ} Ψ∘Db", pairs, |(a, b)| {
        leibniz(geo, a, b)
    });
    rep
}

fn leibniz<A, B>(geo: &Geometry, a: &GradedElement<A>, b: &GradedElement<B>) -> bool
where
    A: FiberMul<B> + crate::geometry::ConnectionAction,
    B: crate::geometry::ConnectionAction,
    A::Output: crate::geometry::ConnectionAction,
{
    let lhs = geo.cov_d(&weyl_mul(a, b));
    let mut rhs = weyl_mul(&geo.cov_d(a), b);
    rhs.accumulate(&weyl_mul(&a.parity_twist(), &geo.cov_d(b)), &one());
    lhs == rhs
}

/// Residuals and normalizations of the solution, flatness of the Fedosov
/// derivatives and the module derivation laws of `𝒟^E`.
pub fn fedosov_suite(sol: &FedosovSolution, opts: &SuiteOptions) -> Report {
    let (n, rank) = (sol.n(), sol.rank());
    let mut rep = sol.verify();
    let count = opts.trials.flatness;
    let mut s = opts.sampler(n, rank, 3);
    let cut = sol.trunc();
    let up = cut.plus(1);

    let scal: Vec<(GradedElement<Scalar>,)> = (0..count).map(|_| (s.element(up),)).collect();
    check_all(&mut rep, "fedosov-flat", "𝒟² = 0", scal, |(a,)| {
        sol.fedosov_d(&sol.fedosov_d(a)).with_trunc(cut).is_zero()
    });
    let ends: Vec<(GradedElement<EndMatrix>,)> = (0..count).map(|_| (s.element(up),)).collect();
    check_all(&mut rep, "fedosov-prime-flat", "(𝒟′)² = 0", ends, |(a,)| {
        sol.fedosov_d_prime(&sol.fedosov_d_prime(a)).with_trunc(cut).is_zero()
    });
    let vecs: Vec<(GradedElement<FiberVector>,)> = (0..count).map(|_| (s.element(up),)).collect();
    check_all(&mut rep, "fedosov-E-flat", "(𝒟^E)² = 0", vecs, |(a,)| {
        sol.fedosov_d_e(&sol.fedosov_d_e(a)).with_trunc(cut).is_zero()
    });

    let pairs: Vec<_> = (0..count).map(|_| (s.element::<EndMatrix>(up), s.element::<FiberVector>(up))).collect();
    check_all(&mut rep, "fedosov-E-left", "𝒟^E(A∘Ψ) = 𝒟′A∘Ψ + (−1)^{deg_a A} A∘𝒟^EΨ", pairs, |(a, p)| {
        let lhs = sol.fedosov_d_e(&weyl_mul(a, p)).with_trunc(cut);
        let mut rhs = weyl_mul(&sol.fedosov_d_prime(a), p);
        rhs.accumulate(&weyl_mul(&a.parity_twist(), &sol.fedosov_d_e(p)), &one());
        lhs == rhs.with_trunc(cut)
    });
    let pairs: Vec<_> = (0..count).map(|_| (s.element::<FiberVector>(up), s.element::<Scalar>(up))).collect();
    check_all(&mut rep, "fedosov-E-right", "𝒟^E(Ψ∘b) = 𝒟^EΨ∘b + (−1)^{deg_a Ψ} Ψ∘𝒟b", pairs, |(p, b)| {
        let lhs = sol.fedosov_d_e(&weyl_mul(p, b)).with_trunc(cut);
        let mut rhs = weyl_mul(&sol.fedosov_d_e(p), b);
        rhs.accumulate(&weyl_mul(&p.parity_twist(), &sol.fedosov_d(b)), &one());
        lhs == rhs.with_trunc(cut)
    });
    rep
}

/// Flatness of the Taylor series, associativity, classical limit and
/// first-order commutator of `⋆` and `⋆′`, and `σ∘τ = id`.
pub fn star_suite(sol: &FedosovSolution, opts: &SuiteOptions) -> Report {
    let (n, rank) = (sol.n(), sol.rank());
    let k = sol.lambda_order();
    let mut rep = Report::new("star products");
    let count = opts.trials.star;
    let mut s = opts.sampler(n, rank, 4);

    let fs: Vec<(FormalFunction,)> = (0..count).map(|_| (s.function(k),)).collect();
    check_all(&mut rep, "taylor-flat", "𝒟τ(f) = 0", fs.clone(), |(f,)| {
        taylor_residual(sol, f).is_ok_and(|r| r.is_zero())
    });
    check_all(&mut rep, "symbol-of-taylor", "σ(τ(f)) = f", fs.clone(), |(f,)| {
        taylor(sol, f).and_then(|t| t.symbol()).is_ok_and(|g| g == *f)
    });
    check_all(&mut rep, "taylor-truncation", "τ at a lower cutoff is the truncation of τ", fs, |(f,)| {
        let low = TruncationOrder(sol.trunc().0 - 2);
        let f_low = f.with_order(k - 1);
        match (taylor_at(sol, &f_low, low), taylor(sol, &f_low)) {
            (Ok(a), Ok(b)) => a == b.with_trunc(low),
            _ => false,
        }
    });
    let es: Vec<(FormalEndo,)> = (0..count).map(|_| (s.endo(k),)).collect();
    check_all(&mut rep, "taylor-prime-flat", "𝒟′τ′(A) = 0", es, |(a,)| {
        taylor_prime_residual(sol, a).is_ok_and(|r| r.is_zero())
    });
    let ss: Vec<(FormalSection,)> = (0..count).map(|_| (s.section(k),)).collect();
    check_all(&mut rep, "taylor-E-flat", "𝒟^Eτ^E(s) = 0", ss, |(x,)| {
        taylor_e_residual(sol, x).is_ok_and(|r| r.is_zero())
    });

    // Each side reuses the Taylor series of the three factors.
    let trip: Vec<_> = (0..count).map(|_| (s.function(k), s.function(k), s.function(k))).collect();
    check_all(&mut rep, "star-associative", "(f⋆g)⋆h = f⋆(g⋆h)", trip, |(f, g, h)| {
        let sides = || -> crate::Result<bool> {
            let (tf, tg, th) = (taylor(sol, f)?, taylor(sol, g)?, taylor(sol, h)?);
            let l = product_symbol(&taylor(sol, &product_symbol(&tf, &tg)?)?, &th)?;
            let r = product_symbol(&tf, &taylor(sol, &product_symbol(&tg, &th)?)?)?;
            Ok(l == r)
        };
        sides().unwrap_or(false)
    });
    let trip: Vec<_> = (0..count).map(|_| (s.endo(k), s.endo(k), s.endo(k))).collect();
    check_all(&mut rep, "star-prime-associative", "(A⋆′B)⋆′C = A⋆′(B⋆′C)", trip, |(a, b, c)| {
        let sides = || -> crate::Result<bool> {
            let (ta, tb, tc) = (taylor_prime(sol, a)?, taylor_prime(sol, b)?, taylor_prime(sol, c)?);
            let l = product_symbol(&taylor_prime(sol, &product_symbol(&ta, &tb)?)?, &tc)?;
            let r = product_symbol(&ta, &taylor_prime(sol, &product_symbol(&tb, &tc)?)?)?;
            Ok(l == r)
        };
        sides().unwrap_or(false)
    });

    // The first two orders only need the Taylor series up to λ¹.
    let low = TruncationOrder(2);
    let pairs: Vec<_> = (0..count).map(|_| (s.function(k), s.function(k))).collect();
    check_all(
        &mut rep,
        "classical-limit-and-bracket",
        "f⋆g = fg + O(λ), f⋆g − g⋆f = iλ{f,g} + O(λ²)",
        pairs,
        |(f, g)| {
            let low_star = |x: &FormalFunction, y: &FormalFunction| -> crate::Result<FormalFunction> {
                product_symbol(&taylor_at(sol, &x.with_order(1), low)?, &taylor_at(sol, &y.with_order(1), low)?)
            };
            let (Ok(fg), Ok(gf)) = (low_star(f, g), low_star(g, f)) else {
                return false;
            };
            let classical = *fg.poly(0) == f.poly(0) * g.poly(0);
            let bracket = poisson_bracket(f.poly(0), g.poly(0), n).scale(&ComplexRational::i());
            classical && &(fg.poly(1) - gf.poly(1)) == &bracket
        },
    );
    let pairs: Vec<_> = (0..count).map(|_| (s.endo(k), s.endo(k))).collect();
    check_all(&mut rep, "star-prime-classical-limit", "A⋆′B = AB + O(λ)", pairs, |(a, b)| {
        let lifted = |x: &FormalEndo| taylor_prime_at(sol, &x.with_order(1), low);
        let ab = lifted(a).and_then(|ta| product_symbol(&ta, &lifted(b)?));
        ab.is_ok_and(|ab| *ab.coeff(0) == a.coeff(0).fiber_mul(b.coeff(0)))
    });
    rep
}

/// The flat star product against the independent Moyal oracle.
pub fn moyal_suite(n: usize, opts: &SuiteOptions) -> Report {
    let mut rep = Report::new("moyal comparison");
    let geo = match GeometryInput::flat(n, 1).build() {
        Ok(g) => g,
        Err(e) => {
            rep.record("flat-geometry", "flat data builds", 1, Some(e.to_string()));
            return rep;
        }
    };
    let sol = match FedosovSolution::for_lambda_order(geo, opts.order) {
        Ok(s) => s,
        Err(e) => {
            rep.record("flat-solution", "flat solution exists", 1, Some(e.to_string()));
            return rep;
        }
    };
    let k = opts.order;
    let mut s = opts.sampler(n, 1, 5);
    let pairs: Vec<_> = (0..opts.trials.moyal).map(|_| (s.function(k), s.function(k))).collect();
    check_all(&mut rep, "flat-star-is-moyal", "flat ⋆ equals the Moyal product", pairs, |(f, g)| {
        star(&sol, f, g).is_ok_and(|x| x == moyal_oracle(f, g, k))
    });
    rep
}

/// The five bimodule laws for `•′` and `•`.
pub fn bimodule_suite(sol: &FedosovSolution, opts: &SuiteOptions) -> Report {
    let (n, rank) = (sol.n(), sol.rank());
    let k = sol.lambda_order();
    let mut rep = Report::new("bimodule");
    let mut s = opts.sampler(n, rank, 6);
    let tuples: Vec<_> = (0..opts.trials.bimodule)
        .map(|_| (s.endo(k), s.endo(k), s.section(k), s.function(k), s.function(k)))
        .collect();
    let unit_f = FormalFunction::classical(n, rank, k, Scalar(Poly::one(2 * n)));
    let unit_a = FormalEndo::classical(n, rank, k, EndMatrix::identity(2 * n, rank));

    check_all(&mut rep, "left-module", "(A⋆′B)•′s = A•′(B•′s)", tuples.clone(), |(a, b, x, _, _)| {
        let sides = || -> crate::Result<bool> {
            let (ta, tb, tx) = (taylor_prime(sol, a)?, taylor_prime(sol, b)?, taylor_e(sol, x)?);
            let l = product_symbol(&taylor_prime(sol, &product_symbol(&ta, &tb)?)?, &tx)?;
            let r = product_symbol(&ta, &taylor_e(sol, &product_symbol(&tb, &tx)?)?)?;
            Ok(l == r)
        };
        sides().unwrap_or(false)
    });
    check_all(&mut rep, "right-module", "s•(f⋆g) = (s•f)•g", tuples.clone(), |(_, _, x, f, g)| {
        let sides = || -> crate::Result<bool> {
            let (tx, tf, tg) = (taylor_e(sol, x)?, taylor(sol, f)?, taylor(sol, g)?);
            let l = product_symbol(&tx, &taylor(sol, &product_symbol(&tf, &tg)?)?)?;
            let r = product_symbol(&taylor_e(sol, &product_symbol(&tx, &tf)?)?, &tg)?;
            Ok(l == r)
        };
        sides().unwrap_or(false)
    });
    check_all(&mut rep, "actions-commute", "(A•′s)•f = A•′(s•f)", tuples.clone(), |(a, _, x, f, _)| {
        let sides = || -> crate::Result<bool> {
            let (ta, tx, tf) = (taylor_prime(sol, a)?, taylor_e(sol, x)?, taylor(sol, f)?);
            let l = product_symbol(&taylor_e(sol, &product_symbol(&ta, &tx)?)?, &tf)?;
            let r = product_symbol(&ta, &taylor_e(sol, &product_symbol(&tx, &tf)?)?)?;
            Ok(l == r)
        };
        sides().unwrap_or(false)
    });
    check_all(&mut rep, "left-unit", "1•′s = s", tuples.clone(), |(_, _, x, _, _)| {
        act_left(sol, &unit_a, x).is_ok_and(|y| y == *x)
    });
    check_all(&mut rep, "right-unit", "s•1 = s", tuples, |(_, _, x, _, _)| {
        act_right(sol, x, &unit_f).is_ok_and(|y| y == *x)
    });
    rep
}

/// Everything that applies to one geometry: validation, structural
/// operators, geometry identities, the solver, star products, the
/// bimodule and, for Hermitian data, the metric identities.
pub fn run_property_suite(input: &GeometryInput, opts: &SuiteOptions) -> Report {
    let mut rep = Report::new(format!("property suite (K = {})", opts.order));
    let validation = input.validate();
    rep.record(
        "geometry-valid",
        "input data validates",
        1,
        (!validation.is_ok()).then(|| validation.to_string()),
    );
    if !validation.is_ok() {
        return rep;
    }
    let geo = match input.clone().build() {
        Ok(g) => g,
        Err(e) => {
            rep.record("geometry-build", "geometry builds", 1, Some(e.to_string()));
            return rep;
        }
    };
    rep.extend(structural_suite(geo.n(), geo.rank(), opts));
    rep.extend(verify_geometry_identities(&geo, opts));
    let sol = match FedosovSolution::for_lambda_order(geo, opts.order) {
        Ok(s) => s,
        Err(e) => {
            rep.record("fedosov-solution", "r, r′, r^E exist", 1, Some(e.to_string()));
            return rep;
        }
    };
    rep.extend(fedosov_suite(&sol, opts));
    rep.extend(star_suite(&sol, opts));
    rep.extend(bimodule_suite(&sol, opts));
    if input.hermitian {
        let spec = RandomSpec {
            count: opts.trials.hermitian,
            ..opts.spec.clone()
        };
        let mut s = Sampler::new(&spec, sol.n(), sol.rank()).fork(7);
        for suite in [reality_suite, fiber_metric_suite, deformed_metric_suite] {
            match suite(&sol, &mut s) {
                Ok(r) => rep.extend(r),
                Err(e) => rep.record("hermitian", "metric identities", 1, Some(e.to_string())),
            }
        }
    }
    if sol.rank() == 1 && !sol.geometry().is_flat_bundle() {
        let case = vec![("input".to_string(), input.clone())];
        rep.extend(class_relation_suite(&case, opts.order));
    }
    rep
}

/// The standard line bundles through [`class_relation_suite`].
pub fn class_suite(order: usize) -> Report {
    class_relation_suite(&standard_line_bundles(), order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ComplexRational;
    use crate::weyl::Fiber;

    fn curved(rank: usize, hermitian: bool) -> GeometryInput {
        let mut g = GeometryInput::flat(1, rank);
        g.hermitian = hermitian;
        g.set_gamma_symmetric(0, 0, 1, Poly::var(2, 0));
        let mut a = EndMatrix::zero(2, rank);
        a.set(0, 0, Poly::var(2, 1).scale(&ComplexRational::i()));
        g.set_conn(0, a);
        g
    }

    #[test]
    fn quick_suite_on_curved_rank_one() {
        let rep = run_property_suite(&curved(1, true), &SuiteOptions::quick(3));
        assert!(rep.all_passed(), "{rep}");
        assert!(rep.records.iter().any(|r| r.name.starts_with("class-factor")));
        assert!(rep.records.iter().any(|r| r.name == "h-adjoint"));
    }

    #[test]
    fn invalid_geometry_stops_early() {
        let mut g = GeometryInput::flat(1, 1);
        g.set_gamma(0, 0, 1, Poly::var(2, 0));
        let rep = run_property_suite(&g, &SuiteOptions::quick(1));
        assert_eq!(rep.records.len(), 1);
        assert!(!rep.all_passed());
    }

    #[test]
    fn moyal_and_class_suites() {
        let opts = SuiteOptions::quick(5);
        let rep = moyal_suite(1, &opts);
        assert!(rep.all_passed(), "{rep}");
        let rep = class_suite(1);
        assert!(rep.all_passed(), "{rep}");
    }
}
