//! Closed-form Moyal product of polynomial functions, computed by direct
//! symbolic differentiation against the Poisson tensor.

use crate::geometry::poisson;
use crate::poly::Poly;
use crate::scalar::ComplexRational;
use crate::weyl::{FormalFunction, Scalar};

fn nth_derivative(p: &Poly, idx: &[usize]) -> Poly {
    idx.iter().fold(p.clone(), |acc, &k| acc.derivative(k))
}

/// `Σ_t (1/t!) (iλ/2)^t Λ^{k₁l₁}⋯Λ^{k_t l_t} (∂_{k₁⋯k_t} f)(∂_{l₁⋯l_t} g)`
/// modulo `λ^(order+1)`.
pub fn moyal_oracle(f: &FormalFunction, g: &FormalFunction, order: usize) -> FormalFunction {
    let n = f.n();
    let dim = 2 * n;
    let pairs: Vec<(usize, usize, i64)> = (0..dim)
        .flat_map(|k| (0..dim).map(move |l| (k, l, poisson(n, k, l))))
        .filter(|p| p.2 != 0)
        .collect();
    let mut out = vec![Poly::zero(dim); order + 1];
    for a in 0..=f.order().min(order) {
        for b in 0..=g.order().min(order - a) {
            let (fa, gb) = (f.poly(a), g.poly(b));
            if fa.is_zero() || gb.is_zero() {
                continue;
            }
            for t in 0..=(order - a - b) {
                // all t-sequences of Poisson pairs
                let mut seqs: Vec<(Vec<usize>, Vec<usize>, i64)> = vec![(vec![], vec![], 1)];
                for _ in 0..t {
                    seqs = seqs
                        .into_iter()
                        .flat_map(|(ks, ls, w)| {
                            pairs.iter().map(move |&(k, l, c)| {
                                let mut ks = ks.clone();
                                let mut ls = ls.clone();
                                ks.push(k);
                                ls.push(l);
                                (ks, ls, w * c)
                            })
                        })
                        .collect();
                }
                let fact: i64 = (1..=t as i64).product();
                let pow2: i64 = 1 << t;
                let c = ComplexRational::from_frac(1, fact * pow2).mul_i_pow(t as u32);
                for (ks, ls, w) in seqs {
                    let term = &nth_derivative(fa, &ks) * &nth_derivative(gb, &ls);
                    out[a + b + t].add_scaled(&term, &c.scale_int(w));
                }
            }
        }
    }
    FormalFunction::from_coeffs(n, f.rank(), out.into_iter().map(Scalar).collect())
}

/// Poisson bracket `{f, g} = Λ^{kl} ∂_k f ∂_l g`.
pub fn poisson_bracket(f: &Poly, g: &Poly, n: usize) -> Poly {
    let dim = 2 * n;
    let mut out = Poly::zero(dim);
    for k in 0..dim {
        for l in 0..dim {
            let c = poisson(n, k, l);
            if c != 0 {
                out.add_scaled(&(&f.derivative(k) * &g.derivative(l)), &ComplexRational::from_int(c));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::random::{RandomSpec, Sampler};

    fn fun(p: Poly, order: usize) -> FormalFunction {
        FormalFunction::classical(1, 1, order, Scalar(p))
    }

    #[test]
    fn unit_and_square() {
        let x1 = Poly::var(2, 0);
        let f = fun(&x1 * &Poly::var(2, 1), 3);
        assert_eq!(moyal_oracle(&f, &fun(Poly::one(2), 3), 3), f);
        let sq = moyal_oracle(&fun(x1.clone(), 3), &fun(x1.clone(), 3), 3);
        assert_eq!(sq, fun(&x1 * &x1, 3));
    }

    #[test]
    fn oracle_is_associative() {
        let spec = RandomSpec {
            max_poly_degree: 3,
            ..RandomSpec::default()
        };
        let mut s = Sampler::new(&spec, 1, 1);
        for _ in 0..20 {
            let (f, g, h) = (s.function(3), s.function(3), s.function(3));
            let l = moyal_oracle(&moyal_oracle(&f, &g, 3), &h, 3);
            let r = moyal_oracle(&f, &moyal_oracle(&g, &h, 3), 3);
            assert_eq!(l, r);
        }
    }
}
