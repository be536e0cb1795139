//! Fiber types of graded elements: scalars, endomorphisms of `E` and
//! sections of `E`, all with polynomial entries.

use std::fmt::Debug;

use crate::poly::Poly;
use crate::scalar::ComplexRational;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FiberKind {
    Scalar,
    EndMatrix,
    FiberVector,
}

impl FiberKind {
    pub fn name(self) -> &'static str {
        match self {
            FiberKind::Scalar => "scalar",
            FiberKind::EndMatrix => "end",
            FiberKind::FiberVector => "vector",
        }
    }

    /// Number of polynomial entries for a bundle of the given rank.
    pub fn len(self, rank: usize) -> usize {
        match self {
            FiberKind::Scalar => 1,
            FiberKind::EndMatrix => rank * rank,
            FiberKind::FiberVector => rank,
        }
    }

    /// 1-based index labels of the `idx`-th entry.
    pub fn entry_label(self, rank: usize, idx: usize) -> Vec<usize> {
        match self {
            FiberKind::Scalar => vec![],
            FiberKind::EndMatrix => vec![idx / rank + 1, idx % rank + 1],
            FiberKind::FiberVector => vec![idx + 1],
        }
    }
}

/// A fiber value: a fixed-shape array of polynomials.
pub trait Fiber: Clone + PartialEq + Debug + Send + Sync {
    const KIND: FiberKind;

    fn from_entries(rank: usize, entries: Vec<Poly>) -> Self;
    fn entries(&self) -> &[Poly];
    fn entries_mut(&mut self) -> &mut [Poly];

    fn zero(nvars: usize, rank: usize) -> Self {
        Self::from_entries(rank, vec![Poly::zero(nvars); Self::KIND.len(rank)])
    }

    fn is_zero(&self) -> bool {
        self.entries().iter().all(Poly::is_zero)
    }

    fn add_scaled(&mut self, other: &Self, c: &ComplexRational) {
        for (a, b) in self.entries_mut().iter_mut().zip(other.entries()) {
            a.add_scaled(b, c);
        }
    }

    fn map_entries(&self, f: impl FnMut(&Poly) -> Poly) -> Self {
        Self::from_entries(self.rank(), self.entries().iter().map(f).collect())
    }

    fn rank(&self) -> usize;
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Scalar(pub Poly);

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct EndMatrix {
    rank: usize,
    /// row-major
    entries: Vec<Poly>,
}

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct FiberVector {
    entries: Vec<Poly>,
}

impl Fiber for Scalar {
    const KIND: FiberKind = FiberKind::Scalar;

    fn from_entries(_rank: usize, mut entries: Vec<Poly>) -> Self {
        assert_eq!(entries.len(), 1);
        Scalar(entries.pop().unwrap())
    }
    fn entries(&self) -> &[Poly] {
        std::slice::from_ref(&self.0)
    }
    fn entries_mut(&mut self) -> &mut [Poly] {
        std::slice::from_mut(&mut self.0)
    }
    fn rank(&self) -> usize {
        1
    }
}

impl Fiber for EndMatrix {
    const KIND: FiberKind = FiberKind::EndMatrix;

    fn from_entries(rank: usize, entries: Vec<Poly>) -> Self {
        assert_eq!(entries.len(), rank * rank);
        EndMatrix { rank, entries }
    }
    fn entries(&self) -> &[Poly] {
        &self.entries
    }
    fn entries_mut(&mut self) -> &mut [Poly] {
        &mut self.entries
    }
    fn rank(&self) -> usize {
        self.rank
    }
}

impl Fiber for FiberVector {
    const KIND: FiberKind = FiberKind::FiberVector;

    fn from_entries(_rank: usize, entries: Vec<Poly>) -> Self {
        FiberVector { entries }
    }
    fn entries(&self) -> &[Poly] {
        &self.entries
    }
    fn entries_mut(&mut self) -> &mut [Poly] {
        &mut self.entries
    }
    fn rank(&self) -> usize {
        self.entries.len()
    }
}

impl EndMatrix {
    pub fn identity(nvars: usize, rank: usize) -> Self {
        let mut m = Self::zero(nvars, rank);
        for a in 0..rank {
            m.entries[a * rank + a] = Poly::one(nvars);
        }
        m
    }

    /// Scalar multiple of the identity.
    pub fn scalar(p: &Poly, rank: usize) -> Self {
        let mut m = Self::zero(p.nvars(), rank);
        for a in 0..rank {
            m.entries[a * rank + a] = p.clone();
        }
        m
    }

    pub fn get(&self, row: usize, col: usize) -> &Poly {
        &self.entries[row * self.rank + col]
    }

    pub fn set(&mut self, row: usize, col: usize, p: Poly) {
        self.entries[row * self.rank + col] = p;
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        let r = self.rank;
        let mut out = self.clone();
        for a in 0..r {
            for b in 0..r {
                out.entries[a * r + b] = self.entries[b * r + a].conj();
            }
        }
        out
    }

    /// `Some(p)` if the matrix is `p` times the identity.
    pub fn as_scalar(&self) -> Option<Poly> {
        let r = self.rank;
        let p = self.entries[0].clone();
        for a in 0..r {
            for b in 0..r {
                let e = &self.entries[a * r + b];
                if a == b {
                    if *e != p {
                        return None;
                    }
                } else if !e.is_zero() {
                    return None;
                }
            }
        }
        Some(p)
    }
}

impl FiberVector {
    pub fn new(entries: Vec<Poly>) -> Self {
        FiberVector { entries }
    }

    pub fn get(&self, a: usize) -> &Poly {
        &self.entries[a]
    }
}

/// Pointwise fiber multiplication `Self × Rhs → Output`.
pub trait FiberMul<Rhs: Fiber>: Fiber {
    type Output: Fiber;
    fn fiber_mul(&self, rhs: &Rhs) -> Self::Output;
    /// Rank of the output fiber given the operands' rank.
    fn output_rank(rank: usize) -> usize {
        rank
    }
}

fn scale_all<F: Fiber>(p: &Poly, f: &F) -> F {
    f.map_entries(|e| p * e)
}

impl FiberMul<Scalar> for Scalar {
    type Output = Scalar;
    fn fiber_mul(&self, rhs: &Scalar) -> Scalar {
        Scalar(&self.0 * &rhs.0)
    }
}

impl FiberMul<EndMatrix> for Scalar {
    type Output = EndMatrix;
    fn fiber_mul(&self, rhs: &EndMatrix) -> EndMatrix {
        scale_all(&self.0, rhs)
    }
}

impl FiberMul<FiberVector> for Scalar {
    type Output = FiberVector;
    fn fiber_mul(&self, rhs: &FiberVector) -> FiberVector {
        scale_all(&self.0, rhs)
    }
}

impl FiberMul<Scalar> for EndMatrix {
    type Output = EndMatrix;
    fn fiber_mul(&self, rhs: &Scalar) -> EndMatrix {
        self.map_entries(|e| e * &rhs.0)
    }
}

impl FiberMul<Scalar> for FiberVector {
    type Output = FiberVector;
    fn fiber_mul(&self, rhs: &Scalar) -> FiberVector {
        self.map_entries(|e| e * &rhs.0)
    }
}

impl FiberMul<EndMatrix> for EndMatrix {
    type Output = EndMatrix;
    fn fiber_mul(&self, rhs: &EndMatrix) -> EndMatrix {
        let r = self.rank;
        assert_eq!(r, rhs.rank, "fiber rank mismatch");
        let nvars = self.entries[0].nvars();
        let mut out = EndMatrix::zero(nvars, r);
        for a in 0..r {
            for c in 0..r {
                let lhs = &self.entries[a * r + c];
                if lhs.is_zero() {
                    continue;
                }
                for b in 0..r {
                    let rhs_e = &rhs.entries[c * r + b];
                    if !rhs_e.is_zero() {
                        out.entries[a * r + b] += &(lhs * rhs_e);
                    }
                }
            }
        }
        out
    }
}

impl FiberMul<FiberVector> for EndMatrix {
    type Output = FiberVector;
    fn fiber_mul(&self, rhs: &FiberVector) -> FiberVector {
        let r = self.rank;
        assert_eq!(r, rhs.entries.len(), "fiber rank mismatch");
        let nvars = self.entries[0].nvars();
        let mut out = FiberVector::zero(nvars, r);
        for a in 0..r {
            for c in 0..r {
                let lhs = &self.entries[a * r + c];
                if !lhs.is_zero() && !rhs.entries[c].is_zero() {
                    out.entries[a] += &(lhs * &rhs.entries[c]);
                }
            }
        }
        out
    }
}
