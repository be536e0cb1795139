//! Geometric input data on a Darboux chart and the covariant derivatives
//! `D`, `D′`, `D^E` together with the curvature elements `R`, `R^E`.

use std::fmt;

use num_traits::{One, Zero};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::scalar::ComplexRational;
use crate::weyl::key::wedge;
use crate::weyl::{EndMatrix, Fiber, FiberMul, FiberVector, GradedElement, GradedKey, Scalar, TruncationOrder};

/// Components `ω_{ij}` of the standard symplectic form
/// (`ω_{i,n+i} = 1 = −ω_{n+i,i}`), 0-based indices.
pub fn omega_lower(n: usize, i: usize, j: usize) -> i64 {
    if j == i + n && i < n {
        1
    } else if i == j + n && j < n {
        -1
    } else {
        0
    }
}

/// Components `ω^{ij}` of the inverse matrix, `ω^{ij} ω_{jk} = δ^i_k`.
pub fn omega_upper(n: usize, i: usize, j: usize) -> i64 {
    -omega_lower(n, i, j)
}

/// Poisson tensor `Λ^{kl} = −ω^{kl}`.
pub fn poisson(n: usize, k: usize, l: usize) -> i64 {
    -omega_upper(n, k, l)
}

/// An antisymmetric two-form `½ Ω_{ij} dx^i∧dx^j`, stored as its full
/// coefficient matrix (row-major, `2n × 2n`).
#[derive(Clone, Debug, PartialEq)]
pub struct TwoForm {
    dim: usize,
    entries: Vec<Poly>,
}

impl TwoForm {
    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Poly::zero(dim); dim * dim],
        }
    }

    pub fn from_matrix(dim: usize, entries: Vec<Poly>) -> Self {
        assert_eq!(entries.len(), dim * dim);
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> &Poly {
        &self.entries[i * self.dim + j]
    }

    /// Sets `Ω_{ij} = p` and `Ω_{ji} = −p`.
    pub fn set_antisymmetric(&mut self, i: usize, j: usize, p: Poly) {
        self.entries[j * self.dim + i] = -&p;
        self.entries[i * self.dim + j] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(Poly::is_zero)
    }

    pub fn is_real(&self) -> bool {
        self.entries.iter().all(Poly::is_real)
    }

    /// Components of `dΩ` that fail to vanish, as `(i, j, k)` with `i<j<k`.
    pub fn closedness_defects(&self) -> Vec<(usize, usize, usize)> {
        let d = self.dim;
        let mut out = vec![];
        for i in 0..d {
            for j in i + 1..d {
                for k in j + 1..d {
                    let mut s = self.get(j, k).derivative(i);
                    s += &self.get(k, i).derivative(j);
                    s += &self.get(i, j).derivative(k);
                    if !s.is_zero() {
                        out.push((i, j, k));
                    }
                }
            }
        }
        out
    }

    pub fn antisymmetry_defects(&self) -> Vec<(usize, usize)> {
        let d = self.dim;
        let mut out = vec![];
        for i in 0..d {
            for j in i..d {
                if *self.get(i, j) != -self.get(j, i) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// As a graded element `λ^lam · ½ Ω_{ij} (1⊗dx^i∧dx^j)`.
    pub fn to_element(&self, n: usize, rank: usize, trunc: TruncationOrder, lam: i32) -> GradedElement<Scalar> {
        let mut out = GradedElement::zero(n, rank, trunc);
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let p = self.get(i, j);
                if p.is_zero() {
                    continue;
                }
                let (key, _) = GradedKey::from_indices(self.dim, lam, &[], &[i, j]).expect("distinct");
                out.add_owned(key, Scalar(p.clone()));
            }
        }
        out
    }

    /// Read back a pure λ^lam two-form component from an element.
    pub fn from_element(el: &GradedElement<Scalar>, lam: i32) -> Self {
        let dim = el.dim();
        let mut out = Self::zero(dim);
        for (k, v) in el.terms() {
            if k.lam != lam || k.sym_degree() != 0 || k.asym_degree() != 2 {
                continue;
            }
            let idx = k.asym_indices();
            out.set_antisymmetric(idx[0], idx[1], v.0.clone());
        }
        out
    }
}

/// Raw geometric data: a totally symmetric `Γ_{ijk}` (lowered symplectic
/// Christoffel symbols), connection matrices `A_i` of `∇^E`, a formal
/// series of closed two-forms `Ω = Σ λ^m Ω_m` and the Hermitian flag.
#[derive(Clone, Debug, PartialEq)]
pub struct GeometryInput {
    pub n: usize,
    pub rank: usize,
    /// `Γ_{ijk}` at index `(i·d + j)·d + k`, `d = 2n`.
    pub gamma: Vec<Poly>,
    pub conn: Vec<EndMatrix>,
    /// `omega_series[m-1] = Ω_m`.
    pub omega_series: Vec<TwoForm>,
    pub hermitian: bool,
    /// Constant Hermitian fiber metric; `None` means the identity.
    pub fiber_metric: Option<Vec<ComplexRational>>,
}

impl GeometryInput {
    /// Flat data: `Γ = 0`, `A = 0`, `Ω = 0`.
    pub fn flat(n: usize, rank: usize) -> Self {
        let d = 2 * n;
        Self {
            n,
            rank,
            gamma: vec![Poly::zero(d); d * d * d],
            conn: vec![EndMatrix::zero(d, rank); d],
            omega_series: vec![],
            hermitian: false,
            fiber_metric: None,
        }
    }

    pub fn dim(&self) -> usize {
        2 * self.n
    }

    pub fn gamma(&self, i: usize, j: usize, k: usize) -> &Poly {
        let d = self.dim();
        &self.gamma[(i * d + j) * d + k]
    }

    pub fn set_gamma(&mut self, i: usize, j: usize, k: usize, p: Poly) {
        let d = self.dim();
        self.gamma[(i * d + j) * d + k] = p;
    }

    /// Sets `Γ_{σ(ijk)} = p` for every permutation σ.
    pub fn set_gamma_symmetric(&mut self, i: usize, j: usize, k: usize, p: Poly) {
        for (a, b, c) in [(i, j, k), (i, k, j), (j, i, k), (j, k, i), (k, i, j), (k, j, i)] {
            self.set_gamma(a, b, c, p.clone());
        }
    }

    pub fn set_conn(&mut self, i: usize, a: EndMatrix) {
        self.conn[i] = a;
    }

    /// Sets `Ω_m` (`m ≥ 1`), growing the series with zeros as needed.
    pub fn set_omega(&mut self, m: usize, form: TwoForm) {
        assert!(m >= 1, "Ω starts at λ^1");
        while self.omega_series.len() < m {
            self.omega_series.push(TwoForm::zero(self.dim()));
        }
        self.omega_series[m - 1] = form;
    }

    pub fn metric_matrix(&self) -> Vec<ComplexRational> {
        self.fiber_metric.clone().unwrap_or_else(|| {
            let r = self.rank;
            (0..r * r)
                .map(|idx| {
                    if idx / r == idx % r {
                        ComplexRational::one()
                    } else {
                        ComplexRational::zero()
                    }
                })
                .collect()
        })
    }

    pub fn validate(&self) -> ValidationReport {
        let d = self.dim();
        let mut issues = vec![];
        if self.n == 0 || self.rank == 0 {
            issues.push(ValidationIssue::Shape(format!("n = {}, rank = {} must be positive", self.n, self.rank)));
            return ValidationReport { issues };
        }
        if d > 32 {
            issues.push(ValidationIssue::Shape(format!("chart dimension {d} exceeds 32")));
        }
        let polys_ok = self.gamma.len() == d * d * d
            && self.conn.len() == d
            && self.conn.iter().all(|a| a.rank() == self.rank)
            && self.omega_series.iter().all(|w| w.dim() == d)
            && self.gamma.iter().all(|p| p.nvars() == d)
            && self.conn.iter().all(|a| a.entries().iter().all(|p| p.nvars() == d));
        if !polys_ok {
            issues.push(ValidationIssue::Shape("array sizes do not match n and rank".into()));
            return ValidationReport { issues };
        }

        for i in 0..d {
            for j in 0..d {
                for k in 0..d {
                    let g = self.gamma(i, j, k);
                    for (a, b, c) in [(i, k, j), (j, i, k)] {
                        if self.gamma(a, b, c) != g && (i, j, k) < (a, b, c) {
                            issues.push(ValidationIssue::GammaNotSymmetric {
                                index: [i + 1, j + 1, k + 1],
                                permuted: [a + 1, b + 1, c + 1],
                            });
                        }
                    }
                }
            }
        }

        for (m, form) in self.omega_series.iter().enumerate() {
            for (i, j) in form.antisymmetry_defects() {
                issues.push(ValidationIssue::OmegaNotAntisymmetric {
                    order: m + 1,
                    index: [i + 1, j + 1],
                });
            }
            for (i, j, k) in form.closedness_defects() {
                issues.push(ValidationIssue::OmegaNotClosed {
                    order: m + 1,
                    index: [i + 1, j + 1, k + 1],
                });
            }
        }

        if let Some(h) = &self.fiber_metric {
            if h.len() != self.rank * self.rank {
                issues.push(ValidationIssue::Shape("fiber metric has the wrong size".into()));
                return ValidationReport { issues };
            }
            if !is_hermitian_positive(h, self.rank) {
                issues.push(ValidationIssue::MetricNotPositive);
            }
        }

        if self.hermitian {
            let h = self.metric_matrix();
            for (i, a) in self.conn.iter().enumerate() {
                // A† h + h A = 0
                let lhs = const_mul(&a.dagger(), &h, false);
                let rhs = const_mul(a, &h, true);
                for (idx, (x, y)) in lhs.entries().iter().zip(rhs.entries()).enumerate() {
                    if x + y != Poly::zero(d) {
                        issues.push(ValidationIssue::ConnectionNotAntiHermitian {
                            index: i + 1,
                            entry: [idx / self.rank + 1, idx % self.rank + 1],
                        });
                    }
                }
            }
            if !self.gamma.iter().all(Poly::is_real) {
                issues.push(ValidationIssue::GammaNotReal);
            }
            for (m, form) in self.omega_series.iter().enumerate() {
                if !form.is_real() {
                    issues.push(ValidationIssue::OmegaNotReal { order: m + 1 });
                }
            }
        }
        ValidationReport { issues }
    }

    /// Validate and precompute the covariant-derivative data.
    pub fn build(self) -> Result<Geometry> {
        let report = self.validate();
        if !report.is_ok() {
            return Err(Error::Geometry(report.to_string()));
        }
        Ok(Geometry::new(self))
    }

    /// Stable digest of the input data.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(format!("n={};rank={};hermitian={}\n", self.n, self.rank, self.hermitian));
        for (idx, p) in self.gamma.iter().enumerate() {
            if !p.is_zero() {
                h.update(format!("gamma{idx}={p}\n"));
            }
        }
        for (i, a) in self.conn.iter().enumerate() {
            for (idx, p) in a.entries().iter().enumerate() {
                if !p.is_zero() {
                    h.update(format!("conn{i}.{idx}={p}\n"));
                }
            }
        }
        for (m, w) in self.omega_series.iter().enumerate() {
            for (idx, p) in w.entries.iter().enumerate() {
                if !p.is_zero() {
                    h.update(format!("omega{m}.{idx}={p}\n"));
                }
            }
        }
        if let Some(metric) = &self.fiber_metric {
            for c in metric {
                h.update(format!("h={c}\n"));
            }
        }
        h.finalize().iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// `M h` (or `h M` when `left`) for a polynomial matrix `M` and a constant matrix `h`.
pub(crate) fn const_mul(m: &EndMatrix, h: &[ComplexRational], left: bool) -> EndMatrix {
    let r = m.rank();
    let d = m.get(0, 0).nvars();
    let mut out = EndMatrix::zero(d, r);
    for a in 0..r {
        for b in 0..r {
            let mut acc = Poly::zero(d);
            for c in 0..r {
                if left {
                    acc.add_scaled(m.get(c, b), &h[a * r + c]);
                } else {
                    acc.add_scaled(m.get(a, c), &h[c * r + b]);
                }
            }
            out.set(a, b, acc);
        }
    }
    out
}

/// Exact determinant by fraction-based Gaussian elimination.
pub(crate) fn determinant(m: &[ComplexRational], r: usize) -> ComplexRational {
    let mut a = m.to_vec();
    let mut det = ComplexRational::one();
    for col in 0..r {
        let Some(pivot) = (col..r).find(|&row| !a[row * r + col].is_zero()) else {
            return ComplexRational::zero();
        };
        if pivot != col {
            for k in 0..r {
                a.swap(pivot * r + k, col * r + k);
            }
            det = -det;
        }
        let p = a[col * r + col].clone();
        det = &det * &p;
        let pinv = p.inv().expect("nonzero pivot");
        for row in col + 1..r {
            let f = &a[row * r + col] * &pinv;
            if f.is_zero() {
                continue;
            }
            for k in col..r {
                let t = &f * &a[col * r + k];
                a[row * r + k] -= &t;
            }
        }
    }
    det
}

/// Exact inverse of a constant matrix, `None` if singular.
pub(crate) fn inverse(m: &[ComplexRational], r: usize) -> Option<Vec<ComplexRational>> {
    let mut a = m.to_vec();
    let mut inv: Vec<ComplexRational> = (0..r * r)
        .map(|idx| if idx / r == idx % r { ComplexRational::one() } else { ComplexRational::zero() })
        .collect();
    for col in 0..r {
        let pivot = (col..r).find(|&row| !a[row * r + col].is_zero())?;
        for k in 0..r {
            a.swap(pivot * r + k, col * r + k);
            inv.swap(pivot * r + k, col * r + k);
        }
        let pinv = a[col * r + col].inv()?;
        for k in 0..r {
            a[col * r + k] = &a[col * r + k] * &pinv;
            inv[col * r + k] = &inv[col * r + k] * &pinv;
        }
        for row in 0..r {
            if row == col {
                continue;
            }
            let f = a[row * r + col].clone();
            if f.is_zero() {
                continue;
            }
            for k in 0..r {
                let t = &f * &a[col * r + k];
                a[row * r + k] -= &t;
                let t = &f * &inv[col * r + k];
                inv[row * r + k] -= &t;
            }
        }
    }
    Some(inv)
}

fn is_hermitian_positive(h: &[ComplexRational], r: usize) -> bool {
    for a in 0..r {
        for b in 0..r {
            if h[a * r + b] != h[b * r + a].conj() {
                return false;
            }
        }
    }
    // Sylvester: all leading principal minors positive.
    (1..=r).all(|k| {
        let minor: Vec<ComplexRational> = (0..k * k).map(|idx| h[(idx / k) * r + idx % k].clone()).collect();
        let det = determinant(&minor, k);
        det.is_real() && det.re.is_positive()
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum ValidationIssue {
    Shape(String),
    GammaNotSymmetric { index: [usize; 3], permuted: [usize; 3] },
    OmegaNotAntisymmetric { order: usize, index: [usize; 2] },
    OmegaNotClosed { order: usize, index: [usize; 3] },
    OmegaNotReal { order: usize },
    GammaNotReal,
    ConnectionNotAntiHermitian { index: usize, entry: [usize; 2] },
    MetricNotPositive,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::Shape(s) => write!(f, "shape: {s}"),
            ValidationIssue::GammaNotSymmetric { index, permuted } => write!(
                f,
                "gamma not totally symmetric: gamma{index:?} != gamma{permuted:?}"
            ),
            ValidationIssue::OmegaNotAntisymmetric { order, index } => {
                write!(f, "omega[{order}] not antisymmetric at {index:?}")
            }
            ValidationIssue::OmegaNotClosed { order, index } => {
                write!(f, "omega[{order}] not closed: (d omega){index:?} != 0")
            }
            ValidationIssue::OmegaNotReal { order } => write!(f, "omega[{order}] not real"),
            ValidationIssue::GammaNotReal => write!(f, "gamma not real"),
            ValidationIssue::ConnectionNotAntiHermitian { index, entry } => write!(
                f,
                "conn[{index}] not compatible with the fiber metric at entry {entry:?}"
            ),
            ValidationIssue::MetricNotPositive => write!(f, "fiber metric not Hermitian positive definite"),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.issues.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.issues.is_empty() {
            return writeln!(f, "geometry: ok");
        }
        for issue in &self.issues {
            writeln!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// How the bundle connection acts on a fiber type inside `D`.
pub trait ConnectionAction: Fiber {
    /// The `A_i`-part of `∇_{∂_i}` on a fiber value, if any.
    fn connection_term(a: &EndMatrix, value: &Self) -> Option<Self>;
}

impl ConnectionAction for Scalar {
    fn connection_term(_a: &EndMatrix, _value: &Self) -> Option<Self> {
        None
    }
}

impl ConnectionAction for EndMatrix {
    fn connection_term(a: &EndMatrix, value: &Self) -> Option<Self> {
        let mut c = a.fiber_mul(value);
        c.add_scaled(&value.fiber_mul(a), &ComplexRational::from_int(-1));
        Some(c)
    }
}

impl ConnectionAction for FiberVector {
    fn connection_term(a: &EndMatrix, value: &Self) -> Option<Self> {
        Some(a.fiber_mul(value))
    }
}

/// Validated geometry with precomputed `Γ^k_{ij}` and curvature data.
#[derive(Clone, Debug)]
pub struct Geometry {
    input: GeometryInput,
    /// `Γ^k_{ij}` at `(k·d + i)·d + j`.
    gamma_up: Vec<Poly>,
    /// `R^m_{kij}` at `((m·d + k)·d + i)·d + j`.
    riemann: Vec<Poly>,
    /// `R^E_{ij}` at `i·d + j`.
    bundle_curvature: Vec<EndMatrix>,
    conn_is_zero: bool,
}

impl Geometry {
    fn new(input: GeometryInput) -> Self {
        let n = input.n;
        let d = input.dim();
        let mut gamma_up = vec![Poly::zero(d); d * d * d];
        for k in 0..d {
            for i in 0..d {
                for j in 0..d {
                    let mut acc = Poly::zero(d);
                    for l in 0..d {
                        let w = omega_upper(n, k, l);
                        if w != 0 {
                            acc.add_scaled(input.gamma(l, i, j), &ComplexRational::from_int(w));
                        }
                    }
                    gamma_up[(k * d + i) * d + j] = acc;
                }
            }
        }
        let gu = |k: usize, i: usize, j: usize| &gamma_up[(k * d + i) * d + j];
        let mut riemann = vec![Poly::zero(d); d * d * d * d];
        for m in 0..d {
            for k in 0..d {
                for i in 0..d {
                    for j in 0..d {
                        let mut acc = gu(m, j, k).derivative(i);
                        acc -= &gu(m, i, k).derivative(j);
                        for l in 0..d {
                            acc += &(gu(m, i, l) * gu(l, j, k));
                            acc -= &(gu(m, j, l) * gu(l, i, k));
                        }
                        riemann[((m * d + k) * d + i) * d + j] = acc;
                    }
                }
            }
        }
        let mut bundle_curvature = vec![EndMatrix::zero(d, input.rank); d * d];
        for i in 0..d {
            for j in 0..d {
                let ai = &input.conn[i];
                let aj = &input.conn[j];
                let mut c = aj.map_entries(|p| p.derivative(i));
                c.add_scaled(&ai.map_entries(|p| p.derivative(j)), &ComplexRational::from_int(-1));
                c.add_scaled(&ai.fiber_mul(aj), &ComplexRational::one());
                c.add_scaled(&aj.fiber_mul(ai), &ComplexRational::from_int(-1));
                bundle_curvature[i * d + j] = c;
            }
        }
        let conn_is_zero = input.conn.iter().all(Fiber::is_zero);
        Self {
            input,
            gamma_up,
            riemann,
            bundle_curvature,
            conn_is_zero,
        }
    }

    pub fn input(&self) -> &GeometryInput {
        &self.input
    }

    pub fn n(&self) -> usize {
        self.input.n
    }

    pub fn rank(&self) -> usize {
        self.input.rank
    }

    pub fn dim(&self) -> usize {
        self.input.dim()
    }

    pub fn is_flat_bundle(&self) -> bool {
        self.bundle_curvature.iter().all(Fiber::is_zero)
    }

    pub fn gamma_up(&self, k: usize, i: usize, j: usize) -> &Poly {
        let d = self.dim();
        &self.gamma_up[(k * d + i) * d + j]
    }

    /// `R^m_{kij}`.
    pub fn riemann(&self, m: usize, k: usize, i: usize, j: usize) -> &Poly {
        let d = self.dim();
        &self.riemann[((m * d + k) * d + i) * d + j]
    }

    /// `R^E_{ij}`.
    pub fn bundle_curvature(&self, i: usize, j: usize) -> &EndMatrix {
        &self.bundle_curvature[i * self.dim() + j]
    }

    /// Covariant derivative `D = (1⊗dx^i) ∧ ∇_{∂_i}`: coefficients are
    /// differentiated, symmetric slots carry `−Γ^k_{ij} (dx^j⊗1) i_s(∂_k)`
    /// and the fiber carries the connection action. Serves as `D`, `D′` or
    /// `D^E` depending on the fiber type.
    pub fn cov_d<F: ConnectionAction>(&self, a: &GradedElement<F>) -> GradedElement<F> {
        let d = self.dim();
        let mut out = GradedElement::zero(a.n(), a.rank(), a.trunc());
        for (key, v) in a.terms() {
            for i in 0..d {
                let Some((asym, sign)) = wedge(1 << i, key.asym) else {
                    continue;
                };
                let sign_c = ComplexRational::from_int(sign as i64);
                let mut dv = v.map_entries(|p| p.derivative(i));
                if !self.conn_is_zero {
                    if let Some(c) = F::connection_term(&self.input.conn[i], v) {
                        dv.add_scaled(&c, &ComplexRational::one());
                    }
                }
                let base = GradedKey::new(key.lam, key.sym.clone(), asym);
                out.add_term(base, &dv, &sign_c);
                for k in 0..d {
                    let mult = key.sym[k];
                    if mult == 0 {
                        continue;
                    }
                    for j in 0..d {
                        let g = self.gamma_up(k, i, j);
                        if g.is_zero() {
                            continue;
                        }
                        let mut sym = key.sym.clone();
                        sym[k] -= 1;
                        sym[j] += 1;
                        let nk = GradedKey::new(key.lam, sym, asym);
                        let gv = v.map_entries(|p| g * p);
                        let c = ComplexRational::from_int(-(sign as i64) * mult as i64);
                        out.add_term(nk, &gv, &c);
                    }
                }
            }
        }
        out
    }

    /// `R = ¼ ω_{lm} R^m_{kij} dx^l∨dx^k ⊗ dx^i∧dx^j`.
    pub fn curvature_r(&self, trunc: TruncationOrder) -> GradedElement<Scalar> {
        let (n, d) = (self.n(), self.dim());
        let mut out = GradedElement::zero(n, self.rank(), trunc);
        let quarter = ComplexRational::from_frac(1, 4);
        for l in 0..d {
            for m in 0..d {
                let w = omega_lower(n, l, m);
                if w == 0 {
                    continue;
                }
                for k in 0..d {
                    for i in 0..d {
                        for j in 0..d {
                            if i == j {
                                continue;
                            }
                            let r = self.riemann(m, k, i, j);
                            if r.is_zero() {
                                continue;
                            }
                            let (key, sign) = GradedKey::from_indices(d, 0, &[l, k], &[i, j]).expect("i != j");
                            let c = quarter.scale_int(w * sign as i64);
                            out.add_term(key, &Scalar(r.clone()), &c);
                        }
                    }
                }
            }
        }
        out
    }

    /// `R^E = ½ dx^i∧dx^j ⊗ R^E_{ij}`.
    pub fn curvature_re(&self, trunc: TruncationOrder) -> GradedElement<EndMatrix> {
        let d = self.dim();
        let mut out = GradedElement::zero(self.n(), self.rank(), trunc);
        for i in 0..d {
            for j in i + 1..d {
                let (key, _) = GradedKey::from_indices(d, 0, &[], &[i, j]).expect("i != j");
                out.add_owned(key, self.bundle_curvature(i, j).clone());
            }
        }
        out
    }

    /// The symplectic form `ω = ½ ω_{ij} dx^i∧dx^j` as an element.
    pub fn symplectic_form(&self, trunc: TruncationOrder) -> GradedElement<Scalar> {
        symplectic_form(self.n(), self.rank(), trunc)
    }

    /// `ω̃ = ω_{ij} dx^i ⊗ dx^j` (symmetric degree 1, antisymmetric degree 1).
    pub fn omega_tilde(&self, trunc: TruncationOrder) -> GradedElement<Scalar> {
        omega_tilde(self.n(), self.rank(), trunc)
    }

    /// `Ω = Σ_m λ^m Ω_m` as an element.
    pub fn omega_element(&self, trunc: TruncationOrder) -> GradedElement<Scalar> {
        let mut out = GradedElement::zero(self.n(), self.rank(), trunc);
        for (m, form) in self.input.omega_series.iter().enumerate() {
            out = &out + &form.to_element(self.n(), self.rank(), trunc, m as i32 + 1);
        }
        out
    }

    /// `Ω_m` (zero beyond the given series).
    pub fn omega_coefficient(&self, m: usize) -> Option<&TwoForm> {
        if m == 0 {
            return None;
        }
        self.input.omega_series.get(m - 1)
    }

    pub fn fiber_metric(&self) -> Vec<ComplexRational> {
        self.input.metric_matrix()
    }
}

pub fn symplectic_form(n: usize, rank: usize, trunc: TruncationOrder) -> GradedElement<Scalar> {
    let d = 2 * n;
    let mut out = GradedElement::zero(n, rank, trunc);
    for i in 0..n {
        let (key, _) = GradedKey::from_indices(d, 0, &[], &[i, n + i]).expect("distinct");
        out.add_owned(key, Scalar(Poly::one(d)));
    }
    out
}

pub fn omega_tilde(n: usize, rank: usize, trunc: TruncationOrder) -> GradedElement<Scalar> {
    let d = 2 * n;
    let mut out = GradedElement::zero(n, rank, trunc);
    for i in 0..d {
        for j in 0..d {
            let w = omega_lower(n, i, j);
            if w == 0 {
                continue;
            }
            let (key, _) = GradedKey::from_indices(d, 0, &[i], &[j]).expect("single index");
            out.add_owned(key, Scalar(Poly::from_int(d, w)));
        }
    }
    out
}

pub(crate) fn metric_inverse(g: &Geometry) -> Vec<ComplexRational> {
    inverse(&g.fiber_metric(), g.rank()).expect("validated metric is invertible")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn flat_data_validates() {
        assert!(GeometryInput::flat(1, 1).validate().is_ok());
        assert!(GeometryInput::flat(2, 2).validate().is_ok());
    }

    #[test]
    fn asymmetric_gamma_is_rejected_with_witness() {
        let mut g = GeometryInput::flat(1, 1);
        g.set_gamma(0, 0, 1, Poly::var(2, 0));
        let report = g.validate();
        assert!(!report.is_ok());
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::GammaNotSymmetric { index: [1, 1, 2], .. })));
        assert!(matches!(g.build(), Err(Error::Geometry(_))));
    }

    #[test]
    fn top_degree_two_form_is_closed() {
        let mut g = GeometryInput::flat(1, 1);
        let mut w = TwoForm::zero(2);
        w.set_antisymmetric(0, 1, Poly::var(2, 0));
        g.set_omega(1, w);
        assert!(g.validate().is_ok());
    }

    #[test]
    fn non_closed_form_rejected() {
        let mut g = GeometryInput::flat(2, 1);
        let mut w = TwoForm::zero(4);
        w.set_antisymmetric(0, 1, Poly::var(4, 2));
        g.set_omega(1, w);
        let report = g.validate();
        assert!(report
            .issues
            .iter()
            .any(|i| matches!(i, ValidationIssue::OmegaNotClosed { order: 1, index: [1, 2, 3] })));
    }

    #[test]
    fn hermitian_connection_check() {
        let mut g = GeometryInput::flat(1, 1);
        g.hermitian = true;
        g.set_conn(1, EndMatrix::scalar(&Poly::var(2, 0).scale(&ComplexRational::i()), 1));
        assert!(g.validate().is_ok());
        g.set_conn(0, EndMatrix::scalar(&Poly::var(2, 1), 1));
        assert!(!g.validate().is_ok());
    }

    #[test]
    fn metric_positivity() {
        let mut g = GeometryInput::flat(1, 2);
        let c = |k| ComplexRational::from_int(k);
        g.fiber_metric = Some(vec![c(2), ComplexRational::i(), -ComplexRational::i(), c(1)]);
        assert!(g.validate().is_ok());
        g.fiber_metric = Some(vec![c(1), c(2), c(2), c(1)]);
        assert!(!g.validate().is_ok());
    }

    #[test]
    fn line_bundle_curvature() {
        // A_2 = i x1 gives R^E = i dx1∧dx2
        let mut g = GeometryInput::flat(1, 1);
        g.set_conn(1, EndMatrix::scalar(&Poly::var(2, 0).scale(&ComplexRational::i()), 1));
        let geo = g.build().unwrap();
        let re = geo.curvature_re(TruncationOrder(4));
        let (key, _) = GradedKey::from_indices(2, 0, &[], &[0, 1]).unwrap();
        assert_eq!(re.len(), 1);
        assert_eq!(re.get(&key).unwrap().get(0, 0), &Poly::constant(2, ComplexRational::i()));
    }

    #[test]
    fn inverse_round_trip() {
        let c = |k| ComplexRational::from_int(k);
        let m = vec![c(2), ComplexRational::i(), -ComplexRational::i(), c(3)];
        let inv = inverse(&m, 2).unwrap();
        let det = determinant(&m, 2);
        assert_eq!(det, c(5));
        // m · inv = 1
        for a in 0..2 {
            for b in 0..2 {
                let mut acc = ComplexRational::zero();
                for k in 0..2 {
                    acc += &(&m[a * 2 + k] * &inv[k * 2 + b]);
                }
                assert_eq!(acc, if a == b { c(1) } else { c(0) });
            }
        }
    }
}

#[cfg(test)]
mod curvature_tests {
    use super::*;
    use crate::weyl::{scaled_ad, weyl_mul};

    fn curved() -> Geometry {
        let mut g = GeometryInput::flat(1, 1);
        g.set_gamma_symmetric(0, 0, 0, Poly::var(2, 1));
        g.set_gamma_symmetric(0, 1, 1, &Poly::var(2, 0) * &Poly::var(2, 0));
        g.build().unwrap()
    }

    #[test]
    fn d_squared_is_curvature_commutator() {
        let geo = curved();
        let t = TruncationOrder(6);
        let y = |k| GradedElement::<Scalar>::sym_generator(1, 1, t, k);
        let x1 = GradedElement::classical(1, 1, t, Scalar(Poly::var(2, 0)));
        let a = &(&weyl_mul(&y(0), &y(1)) + &y(0).sym_mul(&x1)) + &weyl_mul(&y(1), &weyl_mul(&y(1), &y(1)));
        let r = geo.curvature_r(t);
        assert!(!r.is_zero());
        assert_eq!(geo.cov_d(&geo.cov_d(&a)), scaled_ad(&r, &a));
    }
}
