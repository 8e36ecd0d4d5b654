use std::cmp::Ordering;
use std::fmt;

use super::C64;

/// Exponent vector `m` of a monomial `w^m = w_1^{m_1} ... w_d^{m_d}`.
///
/// Ordering is graded-lexicographic: lower total degree first, and within a
/// degree the exponent of `w_1` decreases first, so `(2,0) < (1,1) < (0,2)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct MultiIndex(Vec<u32>);

impl MultiIndex {
    pub fn new(entries: Vec<u32>) -> Self {
        assert!(!entries.is_empty(), "multi-index needs at least one entry");
        MultiIndex(entries)
    }

    pub fn zero(dim: usize) -> Self {
        MultiIndex::new(vec![0; dim])
    }

    /// The unit exponent `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut entries = vec![0; dim];
        entries[i] = 1;
        MultiIndex::new(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn degree(&self) -> usize {
        self.0.iter().map(|&e| e as usize).sum()
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn get(&self, i: usize) -> u32 {
        self.0[i]
    }

    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim(), other.dim());
        MultiIndex(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// `self - e_i`, or `None` when the `i`-th exponent is zero.
    pub fn lower(&self, i: usize) -> Option<MultiIndex> {
        if self.0[i] == 0 {
            return None;
        }
        let mut entries = self.0.clone();
        entries[i] -= 1;
        Some(MultiIndex(entries))
    }

    pub fn raise(&self, i: usize) -> MultiIndex {
        let mut entries = self.0.clone();
        entries[i] += 1;
        MultiIndex(entries)
    }

    /// `m . values`
    pub fn dot(&self, values: &[C64]) -> C64 {
        self.0.iter().zip(values).map(|(&e, &v)| v * e as f64).sum()
    }

    /// Evaluates the monomial `w^m`.
    pub fn monomial(&self, w: &[C64]) -> C64 {
        self.0
            .iter()
            .zip(w)
            .fold(C64::new(1.0, 0.0), |acc, (&e, &v)| acc * v.powu(e))
    }
}

impl Ord for MultiIndex {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

/// All multi-indices of length `dim` and total degree `degree`, in
/// graded-lex order.
pub fn enumerate_multi_indices(dim: usize, degree: usize) -> Vec<MultiIndex> {
    assert!(dim >= 1, "dimension must be positive");
    let mut out = Vec::with_capacity(multi_index_count(dim, degree));
    let mut prefix = Vec::with_capacity(dim);
    fill(dim, degree, &mut prefix, &mut out);
    out
}

fn fill(remaining: usize, degree: usize, prefix: &mut Vec<u32>, out: &mut Vec<MultiIndex>) {
    if remaining == 1 {
        prefix.push(degree as u32);
        out.push(MultiIndex(prefix.clone()));
        prefix.pop();
        return;
    }
    for first in (0..=degree).rev() {
        prefix.push(first as u32);
        fill(remaining - 1, degree - first, prefix, out);
        prefix.pop();
    }
}

/// `C(degree + dim - 1, dim - 1)`
pub fn multi_index_count(dim: usize, degree: usize) -> usize {
    let k = dim - 1;
    let mut acc: usize = 1;
    for i in 0..k {
        acc = acc * (degree + k - i) / (i + 1);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(e: &[u32]) -> MultiIndex {
        MultiIndex::new(e.to_vec())
    }

    #[test]
    fn small_enumerations() {
        assert_eq!(
            enumerate_multi_indices(2, 2),
            vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]
        );
        assert_eq!(enumerate_multi_indices(1, 5), vec![mi(&[5])]);
        assert_eq!(enumerate_multi_indices(3, 4).len(), 15);
        assert_eq!(enumerate_multi_indices(3, 0), vec![mi(&[0, 0, 0])]);
    }

    #[test]
    fn enumeration_is_sorted_and_counts_match() {
        for d in 1..=5 {
            for n in 0..=8 {
                let list = enumerate_multi_indices(d, n);
                assert_eq!(list.len(), multi_index_count(d, n));
                assert!(list.windows(2).all(|w| w[0] < w[1]));
                assert!(list.iter().all(|m| m.degree() == n && m.dim() == d));
            }
        }
    }

    #[test]
    fn order_is_graded_first() {
        assert!(mi(&[0, 2]) < mi(&[3, 0]));
        assert!(mi(&[1, 0, 1]) < mi(&[0, 2, 0]));
    }

    #[test]
    fn lower_and_raise() {
        let m = mi(&[1, 0]);
        assert_eq!(m.lower(0), Some(mi(&[0, 0])));
        assert_eq!(m.lower(1), None);
        assert_eq!(m.raise(1), mi(&[1, 1]));
        assert_eq!(m.to_string(), "(1,0)");
    }
}
