//! Canonical text and JSON forms of graded elements.
//!
//! One line per (term, nonzero fiber entry):
//! `lambda^k | sym=[i,..] | asym=[j,..] | poly=<p>`, indices 1-based,
//! with ` | entry=[a,b]` (or `entry=[a]`) before `poly` for matrix and
//! vector fibers. Lines are ordered by total degree, λ-power, symmetric
//! and antisymmetric index lists. The zero element prints as `0`.

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::expr::parse_poly;
use crate::weyl::element::{GradedElement, TruncationOrder};
use crate::weyl::fiber::Fiber;
use crate::weyl::key::GradedKey;

fn index_list(idx: &[usize]) -> String {
    let v: Vec<String> = idx.iter().map(|k| (k + 1).to_string()).collect();
    format!("[{}]", v.join(","))
}

fn sorted_terms<F: Fiber>(a: &GradedElement<F>) -> Vec<(&GradedKey, &F)> {
    let mut terms: Vec<_> = a.terms().collect();
    terms.sort_by(|x, y| x.0.canonical_cmp(y.0));
    terms
}

pub fn to_canonical_text<F: Fiber>(a: &GradedElement<F>) -> String {
    if a.is_zero() {
        return "0\n".to_string();
    }
    let mut out = String::new();
    for (key, value) in sorted_terms(a) {
        let head = format!(
            "lambda^{} | sym={} | asym={}",
            key.lam,
            index_list(&key.sym_indices()),
            index_list(&key.asym_indices())
        );
        for (idx, p) in value.entries().iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let label = F::KIND.entry_label(a.rank(), idx);
            if label.is_empty() {
                out.push_str(&format!("{head} | poly={p}\n"));
            } else {
                let l: Vec<String> = label.iter().map(|x| x.to_string()).collect();
                out.push_str(&format!("{head} | entry=[{}] | poly={p}\n", l.join(",")));
            }
        }
    }
    out
}

pub fn to_json<F: Fiber>(a: &GradedElement<F>) -> Value {
    let mut terms = vec![];
    for (key, value) in sorted_terms(a) {
        for (idx, p) in value.entries().iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let sym: Vec<usize> = key.sym_indices().iter().map(|k| k + 1).collect();
            let asym: Vec<usize> = key.asym_indices().iter().map(|k| k + 1).collect();
            let mut t = json!({"lambda": key.lam, "sym": sym, "asym": asym, "poly": p.to_string()});
            let label = F::KIND.entry_label(a.rank(), idx);
            if !label.is_empty() {
                t["entry"] = json!(label);
            }
            terms.push(t);
        }
    }
    json!({
        "kind": F::KIND.name(),
        "n": a.n(),
        "rank": a.rank(),
        "trunc": a.trunc().get(),
        "terms": terms,
    })
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        column: 1,
        message: message.into(),
    }
}

fn parse_indices(line: usize, s: &str, dim: usize) -> Result<Vec<usize>> {
    let inner = s
        .strip_prefix('[')
        .and_then(|s| s.strip_suffix(']'))
        .ok_or_else(|| parse_err(line, format!("expected [..], got '{s}'")))?;
    if inner.trim().is_empty() {
        return Ok(vec![]);
    }
    inner
        .split(',')
        .map(|t| {
            let k: usize = t.trim().parse().map_err(|_| parse_err(line, format!("bad index '{t}'")))?;
            if k == 0 || k > dim {
                return Err(Error::IndexOutOfRange { index: k, dim });
            }
            Ok(k - 1)
        })
        .collect()
}

/// Inverse of [`to_canonical_text`].
pub fn from_canonical_text<F: Fiber>(text: &str, n: usize, rank: usize, trunc: TruncationOrder) -> Result<GradedElement<F>> {
    let dim = 2 * n;
    let mut out = GradedElement::<F>::zero(n, rank, trunc);
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let ln = lineno + 1;
        if line.is_empty() || line == "0" || line.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = line.split(" | ").map(str::trim).collect();
        let mut lam = None;
        let mut sym = None;
        let mut asym = None;
        let mut entry = None;
        let mut poly = None;
        for f in fields {
            if let Some(v) = f.strip_prefix("lambda^") {
                lam = Some(v.parse::<i32>().map_err(|_| parse_err(ln, format!("bad lambda power '{v}'")))?);
            } else if let Some(v) = f.strip_prefix("sym=") {
                sym = Some(parse_indices(ln, v, dim)?);
            } else if let Some(v) = f.strip_prefix("asym=") {
                asym = Some(parse_indices(ln, v, dim)?);
            } else if let Some(v) = f.strip_prefix("entry=") {
                entry = Some(parse_indices(ln, v, rank)?);
            } else if let Some(v) = f.strip_prefix("poly=") {
                poly = Some(parse_poly(v, dim).map_err(|e| match e {
                    Error::Parse { message, .. } => parse_err(ln, message),
                    other => other,
                })?);
            } else {
                return Err(parse_err(ln, format!("unknown field '{f}'")));
            }
        }
        let (Some(lam), Some(sym), Some(asym), Some(poly)) = (lam, sym, asym, poly) else {
            return Err(parse_err(ln, "missing lambda, sym, asym or poly field"));
        };
        let (key, sign) = GradedKey::from_indices(dim, lam, &sym, &asym)
            .ok_or_else(|| parse_err(ln, "repeated antisymmetric index"))?;
        let slot = match (F::KIND.len(rank), entry.as_deref()) {
            (1, None) if F::KIND == crate::weyl::FiberKind::Scalar => 0,
            (_, Some([a])) if F::KIND == crate::weyl::FiberKind::FiberVector => *a,
            (_, Some([a, b])) if F::KIND == crate::weyl::FiberKind::EndMatrix => a * rank + b,
            _ => return Err(parse_err(ln, format!("entry label does not match a {} fiber", F::KIND.name()))),
        };
        let mut entries = vec![crate::poly::Poly::zero(dim); F::KIND.len(rank)];
        entries[slot] = if sign < 0 { -&poly } else { poly };
        out.add_owned(key, F::from_entries(rank, entries));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::poly::Poly;
    use crate::scalar::ComplexRational;
    use crate::weyl::fiber::{EndMatrix, Scalar};
    use crate::weyl::product::weyl_mul;

    #[test]
    fn scalar_round_trip_and_order() {
        let t = TruncationOrder(6);
        let y = |k| GradedElement::<Scalar>::sym_generator(1, 1, t, k);
        let a = &weyl_mul(&y(0), &y(1)) + &GradedElement::asym_generator(1, 1, t, 1);
        let text = to_canonical_text(&a);
        assert_eq!(
            text,
            "lambda^0 | sym=[] | asym=[2] | poly=1\n\
             lambda^0 | sym=[1,2] | asym=[] | poly=1\n\
             lambda^1 | sym=[] | asym=[] | poly=1/2*i\n"
        );
        assert_eq!(from_canonical_text::<Scalar>(&text, 1, 1, t).unwrap(), a);
    }

    #[test]
    fn matrix_round_trip() {
        let t = TruncationOrder(4);
        let mut m = EndMatrix::zero(2, 2);
        m.set(0, 1, Poly::var(2, 0));
        m.set(1, 0, Poly::constant(2, ComplexRational::i()));
        let (key, _) = GradedKey::from_indices(2, 1, &[1], &[0]).unwrap();
        let a = GradedElement::from_term(1, 2, t, key, m);
        let text = to_canonical_text(&a);
        assert!(text.contains("entry=[1,2] | poly=x1"));
        assert_eq!(from_canonical_text::<EndMatrix>(&text, 1, 2, t).unwrap(), a);
        assert!(from_canonical_text::<Scalar>(&text, 1, 2, t).is_err());
    }

    #[test]
    fn zero_and_errors() {
        let t = TruncationOrder(4);
        let z = GradedElement::<Scalar>::zero(1, 1, t);
        assert_eq!(to_canonical_text(&z), "0\n");
        assert!(from_canonical_text::<Scalar>("0\n", 1, 1, t).unwrap().is_zero());
        assert!(matches!(
            from_canonical_text::<Scalar>("lambda^0 | sym=[3] | asym=[] | poly=1", 1, 1, t),
            Err(Error::IndexOutOfRange { index: 3, dim: 2 })
        ));
        assert!(from_canonical_text::<Scalar>("lambda^0 | sym=[] | poly=1", 1, 1, t).is_err());
    }
}
