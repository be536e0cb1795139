//! Greedy witness shrinking and the property runner.

use crate::report::Report;
use crate::weyl::serial::to_canonical_text;
use crate::weyl::{Fiber, FormalSeries, GradedElement};

/// Inputs that can be made smaller while a property keeps failing.
pub trait Shrinkable: Clone {
    /// Strictly smaller candidates.
    fn shrink_candidates(&self) -> Vec<Self>;
    fn describe(&self) -> String;
}

impl<F: Fiber> Shrinkable for GradedElement<F> {
    fn shrink_candidates(&self) -> Vec<Self> {
        let mut out = vec![];
        // drop the top total degree first, then single terms
        if let (Some(lo), Some(hi)) = (self.min_total_degree(), self.max_total_degree()) {
            if lo < hi {
                out.push(self.filter(|k| k.total_degree() < hi));
            }
        }
        if self.len() > 1 {
            for (key, _) in self.terms() {
                out.push(self.filter(|k| k != key));
            }
        }
        out
    }

    fn describe(&self) -> String {
        to_canonical_text(self)
    }
}

impl<F: Fiber> Shrinkable for FormalSeries<F> {
    fn shrink_candidates(&self) -> Vec<Self> {
        let mut out = vec![];
        for k in (0..=self.order()).rev() {
            if !self.coeff(k).is_zero() && self.coeffs().iter().filter(|c| !c.is_zero()).count() > 1 {
                let mut s = self.clone();
                s.set_coeff(k, F::zero(2 * self.n(), self.rank()));
                out.push(s);
            }
        }
        // lower the polynomial degree of each coefficient entry
        for k in 0..=self.order() {
            for (idx, p) in self.coeff(k).entries().iter().enumerate() {
                if p.len() > 1 {
                    for (e, _) in p.terms() {
                        let mut c = self.coeff(k).clone();
                        let mut q = p.clone();
                        q.add_term(e.clone(), &-p.coeff(e));
                        c.entries_mut()[idx] = q;
                        let mut s = self.clone();
                        s.set_coeff(k, c);
                        out.push(s);
                    }
                }
            }
        }
        out
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}

macro_rules! tuple_shrinkable {
    ($($t:ident $i:tt),+) => {
        impl<$($t: Shrinkable),+> Shrinkable for ($($t,)+) {
            fn shrink_candidates(&self) -> Vec<Self> {
                let mut out = vec![];
                $(
                    for c in self.$i.shrink_candidates() {
                        let mut s = self.clone();
                        s.$i = c;
                        out.push(s);
                    }
                )+
                out
            }

            fn describe(&self) -> String {
                let mut parts = vec![];
                $( parts.push(format!("arg{}:\n{}", $i, self.$i.describe().trim_end())); )+
                parts.join("\n")
            }
        }
    };
}

tuple_shrinkable!(A 0);
tuple_shrinkable!(A 0, B 1);
tuple_shrinkable!(A 0, B 1, C 2);
tuple_shrinkable!(A 0, B 1, C 2, D 3);
tuple_shrinkable!(A 0, B 1, C 2, D 3, E 4);

/// Upper bound on property evaluations spent shrinking one witness.
const SHRINK_BUDGET: usize = 400;

/// Shrink `input` greedily while `holds` stays false.
pub fn shrink<T: Shrinkable>(input: T, holds: &impl Fn(&T) -> bool) -> T {
    let mut current = input;
    let mut budget = SHRINK_BUDGET;
    'outer: loop {
        for cand in current.shrink_candidates() {
            if budget == 0 {
                break 'outer;
            }
            budget -= 1;
            if !holds(&cand) {
                current = cand;
                continue 'outer;
            }
        }
        break;
    }
    current
}

/// Evaluate `holds` on every case; on the first failure record a shrunk
/// witness.
pub fn check_all<T: Shrinkable>(report: &mut Report, name: &str, reference: &str, cases: Vec<T>, holds: impl Fn(&T) -> bool) {
    let trials = cases.len();
    let failure = cases
        .into_iter()
        .find(|c| !holds(c))
        .map(|c| shrink(c, &holds).describe());
    report.record(name, reference, trials, failure);
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testkit::random::{RandomSpec, Sampler};
    use crate::weyl::{Scalar, TruncationOrder};

    #[test]
    fn shrinking_preserves_failure() {
        let spec = RandomSpec {
            max_terms: 6,
            ..RandomSpec::default()
        };
        let mut s = Sampler::new(&spec, 1, 1);
        // fails whenever some term has symmetric degree ≥ 2
        let holds = |a: &GradedElement<Scalar>| a.terms().all(|(k, _)| k.sym_degree() < 2);
        for _ in 0..30 {
            let a: GradedElement<Scalar> = s.element(TruncationOrder(6));
            if holds(&a) {
                continue;
            }
            let w = shrink(a.clone(), &holds);
            assert!(!holds(&w));
            assert!(w.len() <= a.len());
            assert_eq!(w.len(), 1);
        }
    }

    #[test]
    fn report_records_witness() {
        let mut rep = Report::new("t");
        let mut s = Sampler::new(&RandomSpec::default(), 1, 1);
        let cases: Vec<(GradedElement<Scalar>,)> = (0..5).map(|_| (s.element(TruncationOrder(4)),)).collect();
        check_all(&mut rep, "never", "always fails", cases, |_| false);
        assert!(!rep.all_passed());
        assert!(rep.records[0].witness.as_deref().unwrap().contains("arg0"));
    }
}
