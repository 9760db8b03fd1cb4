//! Multi-indices and graded-lexicographic enumeration.
//!
//! A multi-index `j = (j1, ..., jn)` is an exponent vector; its degree is
//! `|j| = j1 + ... + jn`. Every coefficient table in this crate is keyed by
//! multi-indices in one canonical order: ascending total degree, and within
//! a degree the lexicographic order that starts at `(m, 0, ..., 0)` and ends
//! at `(0, ..., 0, m)`. All determinism guarantees rest on this order.

use std::fmt;

/// Largest supported state-space dimension.
pub const MAX_DIM: usize = 6;
/// Largest supported truncation degree.
pub const MAX_DEGREE: usize = 60;

/// Exponent vector with degree `|j| = sum of entries`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct MultiIndex {
    dim: u8,
    exp: [u8; MAX_DIM],
}

impl MultiIndex {
    /// Builds a multi-index from explicit exponents.
    ///
    /// Panics if `exponents` is empty, longer than [`MAX_DIM`], or any entry
    /// exceeds 255.
    pub fn new(exponents: &[usize]) -> Self {
        assert!(
            !exponents.is_empty() && exponents.len() <= MAX_DIM,
            "dimension must be in 1..={MAX_DIM}"
        );
        let mut exp = [0u8; MAX_DIM];
        for (slot, &e) in exp.iter_mut().zip(exponents) {
            assert!(e <= u8::MAX as usize, "exponent {e} too large");
            *slot = e as u8;
        }
        MultiIndex {
            dim: exponents.len() as u8,
            exp,
        }
    }

    /// The zero index of the given dimension.
    pub fn zero(dim: usize) -> Self {
        assert!(dim >= 1 && dim <= MAX_DIM);
        MultiIndex {
            dim: dim as u8,
            exp: [0; MAX_DIM],
        }
    }

    /// The unit index `e_i`.
    pub fn unit(dim: usize, i: usize) -> Self {
        let mut j = Self::zero(dim);
        j.exp[i] = 1;
        j
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn degree(&self) -> usize {
        self.exp[..self.dim()].iter().map(|&e| e as usize).sum()
    }

    pub fn exponent(&self, i: usize) -> usize {
        assert!(i < self.dim());
        self.exp[i] as usize
    }

    pub fn exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.exp[..self.dim()].iter().map(|&e| e as usize)
    }

    /// `self + other`, componentwise.
    pub fn add(&self, other: &MultiIndex) -> MultiIndex {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim() {
            out.exp[i] += other.exp[i];
        }
        out
    }

    /// `self - other` if every component stays non-negative.
    pub fn checked_sub(&self, other: &MultiIndex) -> Option<MultiIndex> {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = *self;
        for i in 0..self.dim() {
            out.exp[i] = out.exp[i].checked_sub(other.exp[i])?;
        }
        Some(out)
    }

    /// `self + e_i`.
    pub fn bumped(&self, i: usize) -> MultiIndex {
        let mut out = *self;
        out.exp[i] += 1;
        out
    }

    /// Componentwise `self <= other`.
    pub fn le(&self, other: &MultiIndex) -> bool {
        debug_assert_eq!(self.dim, other.dim);
        (0..self.dim()).all(|i| self.exp[i] <= other.exp[i])
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.exponents().collect()
    }
}

impl Ord for MultiIndex {
    /// Canonical enumeration order: ascending degree, then descending
    /// lexicographic within a degree, so `(2,0) < (1,1) < (0,2)`.
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        debug_assert_eq!(self.dim, other.dim);
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exp[..other.dim()].cmp(&self.exp[..self.dim()]))
    }
}

impl PartialOrd for MultiIndex {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Debug for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.exponents().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Binomial coefficient `C(a, b)`, exact in `usize` (panics on overflow).
pub fn binomial(a: usize, b: usize) -> usize {
    if b > a {
        return 0;
    }
    let b = b.min(a - b);
    let mut acc: u128 = 1;
    for i in 0..b {
        acc = acc * (a - i) as u128 / (i + 1) as u128;
    }
    usize::try_from(acc).expect("binomial overflow")
}

/// Number of multi-indices of dimension `n` and degree exactly `m`.
pub fn block_len(n: usize, m: usize) -> usize {
    binomial(n + m - 1, n - 1)
}

/// Number of multi-indices of dimension `n` and degree at most `p`,
/// i.e. `C(n + p, n)`. This bounds coefficient storage.
pub fn series_len(n: usize, p: usize) -> usize {
    binomial(n + p, n)
}

/// All multi-indices of dimension `n` and degree exactly `m`, in canonical
/// order. The result has exactly `block_len(n, m)` entries.
pub fn enumerate_multiindices(n: usize, m: usize) -> Vec<MultiIndex> {
    assert!(n >= 1 && n <= MAX_DIM, "dimension out of range");
    assert!(m <= u8::MAX as usize, "degree out of range");
    let mut out = Vec::with_capacity(block_len(n, m));
    let mut exp = [0u8; MAX_DIM];
    fill(&mut out, &mut exp, n, 0, m);
    out
}

fn fill(out: &mut Vec<MultiIndex>, exp: &mut [u8; MAX_DIM], n: usize, slot: usize, rem: usize) {
    if slot == n - 1 {
        exp[slot] = rem as u8;
        out.push(MultiIndex {
            dim: n as u8,
            exp: *exp,
        });
        return;
    }
    for t in (0..=rem).rev() {
        exp[slot] = t as u8;
        fill(out, exp, n, slot + 1, rem - t);
    }
}

/// Position of `j` within the canonical enumeration of its own degree block.
///
/// Closed form: at slot `i` with remaining degree `r`, the entries that come
/// earlier all have a larger exponent there, and there are
/// `C(r - j_i + n - i - 2, n - i - 1)` of them by the hockey-stick identity.
pub fn block_rank(j: &MultiIndex) -> usize {
    let n = j.dim();
    let mut r = j.degree();
    let mut rank = 0;
    for i in 0..n.saturating_sub(1) {
        let ji = j.exponent(i);
        let slots_after = n - i - 1;
        rank += binomial(r - ji + slots_after - 1, slots_after);
        r -= ji;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(e: &[usize]) -> MultiIndex {
        MultiIndex::new(e)
    }

    #[test]
    fn enumeration_small_cases() {
        assert_eq!(
            enumerate_multiindices(2, 2),
            vec![mi(&[2, 0]), mi(&[1, 1]), mi(&[0, 2])]
        );
        assert_eq!(enumerate_multiindices(3, 2).len(), 6);
        assert_eq!(enumerate_multiindices(1, 5), vec![mi(&[5])]);
        assert_eq!(enumerate_multiindices(2, 0), vec![mi(&[0, 0])]);
    }

    #[test]
    fn enumeration_counts_match_binomial() {
        for n in 1..=MAX_DIM {
            for m in 0..=50 {
                assert_eq!(
                    enumerate_multiindices(n, m).len(),
                    block_len(n, m),
                    "n={n} m={m}"
                );
            }
        }
    }

    #[test]
    fn enumeration_is_sorted_and_unique() {
        for n in 1..=4 {
            for m in 0..=8 {
                let list = enumerate_multiindices(n, m);
                for w in list.windows(2) {
                    assert!(w[0] < w[1]);
                }
            }
        }
    }

    #[test]
    fn rank_matches_position() {
        for n in 1..=4 {
            for m in 0..=12 {
                for (pos, j) in enumerate_multiindices(n, m).iter().enumerate() {
                    assert_eq!(block_rank(j), pos, "n={n} m={m} j={j:?}");
                }
            }
        }
    }

    #[test]
    fn index_arithmetic() {
        let a = mi(&[2, 1, 0]);
        let b = mi(&[1, 1, 0]);
        assert_eq!(a.checked_sub(&b), Some(mi(&[1, 0, 0])));
        assert_eq!(b.checked_sub(&a), None);
        assert_eq!(a.add(&b), mi(&[3, 2, 0]));
        assert_eq!(a.bumped(2), mi(&[2, 1, 1]));
        assert!(b.le(&a));
        assert!(!a.le(&b));
        assert_eq!(a.degree(), 3);
    }

    #[test]
    fn series_len_values() {
        assert_eq!(series_len(2, 50), 1326);
        assert_eq!(series_len(3, 30), 5456);
        assert_eq!(series_len(6, 60), 90_858_768);
    }
}
