use std::cmp::Ordering;

use smallvec::SmallVec;

use crate::poly::Exponents;

/// Index of a homogeneous basis term: a power of λ, a monomial in the
/// symmetric generators `dx^k ⊗ 1`, and a wedge monomial in the
/// antisymmetric generators `1 ⊗ dx^k`.
///
/// `sym` stores multiplicities (one slot per coordinate) and `asym` is a
/// bitmask of the wedge factors in increasing index order.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct GradedKey {
    pub lam: i32,
    pub sym: Exponents,
    pub asym: u32,
}

impl GradedKey {
    pub fn new(lam: i32, sym: Exponents, asym: u32) -> Self {
        Self { lam, sym, asym }
    }

    /// `λ^0`, no forms.
    pub fn unit(dim: usize) -> Self {
        Self::new(0, SmallVec::from_elem(0, dim), 0)
    }

    /// Build from 0-based index lists. Returns `None` if `asym` repeats an
    /// index; the wedge sign of sorting `asym` is returned alongside.
    pub fn from_indices(dim: usize, lam: i32, sym: &[usize], asym: &[usize]) -> Option<(Self, i32)> {
        let mut s: Exponents = SmallVec::from_elem(0, dim);
        for &k in sym {
            s[k] += 1;
        }
        let mut mask = 0u32;
        let mut sign = 1;
        for &k in asym {
            let bit = 1u32 << k;
            if mask & bit != 0 {
                return None;
            }
            // moving dx^k past the already placed larger indices
            if (mask >> (k + 1)).count_ones() % 2 == 1 {
                sign = -sign;
            }
            mask |= bit;
        }
        Some((Self::new(lam, s, mask), sign))
    }

    pub fn dim(&self) -> usize {
        self.sym.len()
    }

    pub fn sym_degree(&self) -> u32 {
        self.sym.iter().map(|&m| m as u32).sum()
    }

    pub fn asym_degree(&self) -> u32 {
        self.asym.count_ones()
    }

    /// `Deg = deg_s + 2·deg_λ`.
    pub fn total_degree(&self) -> i32 {
        self.sym_degree() as i32 + 2 * self.lam
    }

    pub fn is_symbol(&self) -> bool {
        self.asym == 0 && self.sym.iter().all(|&m| m == 0)
    }

    /// Sorted 0-based multiset of symmetric indices.
    pub fn sym_indices(&self) -> Vec<usize> {
        self.sym
            .iter()
            .enumerate()
            .flat_map(|(k, &m)| std::iter::repeat(k).take(m as usize))
            .collect()
    }

    /// Sorted 0-based antisymmetric indices.
    pub fn asym_indices(&self) -> Vec<usize> {
        (0..32).filter(|k| self.asym & (1 << k) != 0).collect()
    }

    /// Canonical serialization order: (Deg, lam, sym, asym).
    pub fn canonical_cmp(&self, other: &Self) -> Ordering {
        self.total_degree()
            .cmp(&other.total_degree())
            .then(self.lam.cmp(&other.lam))
            .then_with(|| self.sym_indices().cmp(&other.sym_indices()))
            .then_with(|| self.asym_indices().cmp(&other.asym_indices()))
    }
}

/// Wedge of two antisymmetric monomials: `None` if they share a factor,
/// otherwise the merged mask and the sign of the reordering.
pub fn wedge(a: u32, b: u32) -> Option<(u32, i32)> {
    if a & b != 0 {
        return None;
    }
    let mut swaps = 0u32;
    let mut rest = b;
    while rest != 0 {
        let j = rest.trailing_zeros();
        swaps += (a >> (j + 1)).count_ones();
        rest &= rest - 1;
    }
    Some((a | b, if swaps % 2 == 0 { 1 } else { -1 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wedge_signs() {
        assert_eq!(wedge(0b01, 0b10), Some((0b11, 1)));
        assert_eq!(wedge(0b10, 0b01), Some((0b11, -1)));
        assert_eq!(wedge(0b01, 0b01), None);
        // dx2∧dx3 ∧ dx1 = dx1∧dx2∧dx3 (two transpositions)
        assert_eq!(wedge(0b110, 0b001), Some((0b111, 1)));
    }

    #[test]
    fn degrees() {
        let (k, s) = GradedKey::from_indices(2, 1, &[0, 0], &[1, 0]).unwrap();
        assert_eq!(s, -1);
        assert_eq!(k.sym_degree(), 2);
        assert_eq!(k.asym_degree(), 2);
        assert_eq!(k.total_degree(), 4);
        assert!(GradedKey::from_indices(2, 0, &[], &[1, 1]).is_none());
    }
}
