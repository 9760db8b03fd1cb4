//! Truncated multivariate power series over the complex numbers.
//!
//! Coefficients are stored densely, one contiguous block per total degree,
//! with each block ordered canonically (see [`crate::index`]). The dense
//! layout suits the coefficient recurrence, which touches nearly every index
//! up to the truncation degree.

use num_complex::Complex64;

use crate::index::{block_len, block_rank, enumerate_multiindices, MultiIndex};

/// A polynomial `sum_j c_j (z - center)^j` truncated at total degree
/// `maxdeg`; every index with `|j| <= maxdeg` has a (possibly zero) slot.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexSeries {
    dim: usize,
    center: Vec<Complex64>,
    maxdeg: usize,
    blocks: Vec<Vec<Complex64>>,
}

impl ComplexSeries {
    pub fn zeros(dim: usize, maxdeg: usize, center: Vec<Complex64>) -> Self {
        assert_eq!(center.len(), dim);
        let blocks = (0..=maxdeg)
            .map(|m| vec![Complex64::ZERO; block_len(dim, m)])
            .collect();
        ComplexSeries {
            dim,
            center,
            maxdeg,
            blocks,
        }
    }

    pub fn from_terms<I>(dim: usize, maxdeg: usize, center: Vec<Complex64>, terms: I) -> Self
    where
        I: IntoIterator<Item = (MultiIndex, Complex64)>,
    {
        let mut s = Self::zeros(dim, maxdeg, center);
        for (j, c) in terms {
            s.add_to(&j, c);
        }
        s
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn maxdeg(&self) -> usize {
        self.maxdeg
    }

    pub fn center(&self) -> &[Complex64] {
        &self.center
    }

    /// Coefficient of `(z - center)^j`; zero above the truncation degree.
    pub fn coeff(&self, j: &MultiIndex) -> Complex64 {
        let m = j.degree();
        if m > self.maxdeg {
            return Complex64::ZERO;
        }
        self.blocks[m][block_rank(j)]
    }

    pub fn set(&mut self, j: &MultiIndex, c: Complex64) {
        let m = j.degree();
        assert!(m <= self.maxdeg);
        self.blocks[m][block_rank(j)] = c;
    }

    pub fn add_to(&mut self, j: &MultiIndex, c: Complex64) {
        let m = j.degree();
        assert!(m <= self.maxdeg);
        self.blocks[m][block_rank(j)] += c;
    }

    /// Raw degree-`m` block in canonical order.
    pub fn block(&self, m: usize) -> &[Complex64] {
        &self.blocks[m]
    }

    pub(crate) fn block_mut(&mut self, m: usize) -> &mut [Complex64] {
        &mut self.blocks[m]
    }

    /// All stored terms in canonical order, zeros included.
    pub fn terms(&self) -> Vec<(MultiIndex, Complex64)> {
        let mut out = Vec::new();
        for m in 0..=self.maxdeg {
            for (j, &c) in enumerate_multiindices(self.dim, m)
                .iter()
                .zip(&self.blocks[m])
            {
                out.push((*j, c));
            }
        }
        out
    }

    /// Nonzero terms in canonical order.
    pub fn support(&self) -> Vec<(MultiIndex, Complex64)> {
        self.terms()
            .into_iter()
            .filter(|(_, c)| *c != Complex64::ZERO)
            .collect()
    }

    pub fn max_coeff_modulus(&self) -> f64 {
        self.blocks
            .iter()
            .flatten()
            .map(|c| c.norm())
            .fold(0.0, f64::max)
    }

    /// Evaluates the series at `z`, summing blocks in ascending degree and
    /// each block in canonical order (fixed order for reproducibility).
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        debug_assert_eq!(z.len(), self.dim);
        let delta: Vec<Complex64> = z
            .iter()
            .zip(&self.center)
            .map(|(zi, ci)| zi - ci)
            .collect();
        let powers = power_table(&delta, self.maxdeg);
        let mut total = Complex64::ZERO;
        for m in 0..=self.maxdeg {
            let mut block_sum = Complex64::ZERO;
            for (j, &c) in enumerate_multiindices(self.dim, m)
                .iter()
                .zip(&self.blocks[m])
            {
                if c == Complex64::ZERO {
                    continue;
                }
                let mut term = c;
                for (l, e) in j.exponents().enumerate() {
                    term *= powers[l][e];
                }
                block_sum += term;
            }
            total += block_sum;
        }
        total
    }

    /// Partial derivative with respect to variable `i`.
    pub fn derivative(&self, i: usize) -> ComplexSeries {
        assert!(i < self.dim);
        let maxdeg = self.maxdeg.saturating_sub(1);
        let mut out = ComplexSeries::zeros(self.dim, maxdeg, self.center.clone());
        for m in 1..=self.maxdeg {
            for (j, &c) in enumerate_multiindices(self.dim, m)
                .iter()
                .zip(&self.blocks[m])
            {
                let e = j.exponent(i);
                if e == 0 || c == Complex64::ZERO {
                    continue;
                }
                let mut dj = *j;
                dj = dj
                    .checked_sub(&MultiIndex::unit(self.dim, i))
                    .expect("exponent checked above");
                out.add_to(&dj, c * e as f64);
            }
        }
        out
    }

    /// Adds `scale * z^k * src` to `self`, dropping terms beyond `maxdeg`.
    /// Both series must share dimension and center.
    pub fn add_monomial_product(&mut self, src: &ComplexSeries, k: &MultiIndex, scale: Complex64) {
        debug_assert_eq!(self.dim, src.dim);
        let kd = k.degree();
        for m in 0..=src.maxdeg {
            if m + kd > self.maxdeg {
                break;
            }
            for (j, &c) in enumerate_multiindices(self.dim, m)
                .iter()
                .zip(&src.blocks[m])
            {
                if c == Complex64::ZERO {
                    continue;
                }
                let tgt = j.add(k);
                self.blocks[m + kd][block_rank(&tgt)] += scale * c;
            }
        }
    }

    /// Exact product of two polynomials sharing a center; the result keeps
    /// every term (its degree is the sum of the operands' degrees).
    pub fn mul(&self, other: &ComplexSeries) -> ComplexSeries {
        debug_assert_eq!(self.dim, other.dim);
        let mut out = ComplexSeries::zeros(self.dim, self.maxdeg + other.maxdeg, self.center.clone());
        for ma in 0..=self.maxdeg {
            let idx_a = enumerate_multiindices(self.dim, ma);
            for (ja, &ca) in idx_a.iter().zip(&self.blocks[ma]) {
                if ca == Complex64::ZERO {
                    continue;
                }
                for mb in 0..=other.maxdeg {
                    for (jb, &cb) in enumerate_multiindices(self.dim, mb)
                        .iter()
                        .zip(&other.blocks[mb])
                    {
                        if cb == Complex64::ZERO {
                            continue;
                        }
                        out.blocks[ma + mb][block_rank(&ja.add(jb))] += ca * cb;
                    }
                }
            }
        }
        out
    }

    pub fn scale(&mut self, s: Complex64) {
        for block in &mut self.blocks {
            for c in block {
                *c *= s;
            }
        }
    }

    pub fn add_assign_scaled(&mut self, other: &ComplexSeries, s: Complex64) {
        debug_assert_eq!(self.dim, other.dim);
        debug_assert!(other.maxdeg <= self.maxdeg);
        for m in 0..=other.maxdeg {
            for (dst, &src) in self.blocks[m].iter_mut().zip(&other.blocks[m]) {
                *dst += s * src;
            }
        }
    }

    /// Re-expands the same polynomial around `new_center` by iterated exact
    /// univariate shifts (synthetic division), one variable at a time. The
    /// total degree is preserved and the polynomial is pointwise unchanged.
    pub fn recenter(&self, new_center: &[Complex64]) -> ComplexSeries {
        assert_eq!(new_center.len(), self.dim);
        // Work on a flat map from "exponents of the other variables" to a
        // dense univariate coefficient vector in the active variable.
        let mut terms: Vec<(MultiIndex, Complex64)> = self.terms();
        for v in 0..self.dim {
            let shift = new_center[v] - self.center[v];
            if shift == Complex64::ZERO {
                continue;
            }
            let mut groups: std::collections::BTreeMap<MultiIndex, Vec<Complex64>> =
                std::collections::BTreeMap::new();
            for (j, c) in &terms {
                if *c == Complex64::ZERO {
                    continue;
                }
                let e = j.exponent(v);
                let key = j
                    .checked_sub(&scaled_unit(self.dim, v, e))
                    .expect("removing own exponent");
                let slot = groups
                    .entry(key)
                    .or_insert_with(|| vec![Complex64::ZERO; self.maxdeg + 1]);
                slot[e] += *c;
            }
            terms.clear();
            for (key, mut coeffs) in groups {
                univariate_shift(&mut coeffs, shift);
                for (e, c) in coeffs.into_iter().enumerate() {
                    if c == Complex64::ZERO {
                        continue;
                    }
                    let j = key.add(&scaled_unit(self.dim, v, e));
                    if j.degree() <= self.maxdeg {
                        terms.push((j, c));
                    }
                }
            }
        }
        ComplexSeries::from_terms(self.dim, self.maxdeg, new_center.to_vec(), terms)
    }
}

fn scaled_unit(dim: usize, i: usize, e: usize) -> MultiIndex {
    let mut v = vec![0usize; dim];
    v[i] = e;
    MultiIndex::new(&v)
}

/// Coefficients of `p(u + a)` from coefficients of `p(u)` (ascending powers),
/// in place, by repeated synthetic division.
fn univariate_shift(coeffs: &mut [Complex64], a: Complex64) {
    let d = coeffs.len() - 1;
    for i in 0..d {
        for j in (i..d).rev() {
            let next = coeffs[j + 1];
            coeffs[j] += a * next;
        }
    }
}

/// `powers[l][t] = delta_l^t` for `t` up to `maxdeg`.
pub(crate) fn power_table(delta: &[Complex64], maxdeg: usize) -> Vec<Vec<Complex64>> {
    delta
        .iter()
        .map(|&d| {
            let mut row = Vec::with_capacity(maxdeg + 1);
            let mut acc = Complex64::ONE;
            for _ in 0..=maxdeg {
                row.push(acc);
                acc *= d;
            }
            row
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mi(e: &[usize]) -> MultiIndex {
        MultiIndex::new(e)
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn origin(n: usize) -> Vec<Complex64> {
        vec![Complex64::ZERO; n]
    }

    #[test]
    fn empty_series_evaluates_to_zero() {
        let s = ComplexSeries::zeros(2, 4, origin(2));
        assert_eq!(s.eval(&[c(1.3), c(-2.0)]), Complex64::ZERO);
    }

    #[test]
    fn single_term_evaluation() {
        let s = ComplexSeries::from_terms(2, 2, origin(2), [(mi(&[2, 0]), c(1.0))]);
        assert_eq!(s.eval(&[c(3.0), c(5.0)]), c(9.0));
    }

    #[test]
    fn example1_component_at_one_one() {
        // -3*x1 - 2*x1^2 + x1^3 + x1*x2^2 at (1,1) = -3 - 2 + 1 + 1 = -3
        let s = ComplexSeries::from_terms(
            2,
            3,
            origin(2),
            [
                (mi(&[1, 0]), c(-3.0)),
                (mi(&[2, 0]), c(-2.0)),
                (mi(&[3, 0]), c(1.0)),
                (mi(&[1, 2]), c(1.0)),
            ],
        );
        let v = s.eval(&[c(1.0), c(1.0)]);
        assert!((v - c(-3.0)).norm() < 1e-14);
    }

    #[test]
    fn derivative_drops_degree() {
        let s = ComplexSeries::from_terms(2, 3, origin(2), [(mi(&[2, 1]), c(1.0))]);
        let d = s.derivative(0);
        assert_eq!(d.coeff(&mi(&[1, 1])), c(2.0));
        assert_eq!(d.maxdeg(), 2);
    }

    #[test]
    fn product_of_linear_factors() {
        let a = ComplexSeries::from_terms(
            2,
            1,
            origin(2),
            [(mi(&[0, 0]), c(1.0)), (mi(&[1, 0]), c(1.0))],
        );
        let b = ComplexSeries::from_terms(
            2,
            1,
            origin(2),
            [(mi(&[0, 0]), c(1.0)), (mi(&[1, 0]), c(-1.0))],
        );
        let p = a.mul(&b);
        assert_eq!(p.coeff(&mi(&[0, 0])), c(1.0));
        assert_eq!(p.coeff(&mi(&[1, 0])), Complex64::ZERO);
        assert_eq!(p.coeff(&mi(&[2, 0])), c(-1.0));
    }

    #[test]
    fn recenter_univariate_square() {
        // W = z^2 shifted to 1: (z-1)^2 + 2(z-1) + 1
        let s = ComplexSeries::from_terms(1, 2, origin(1), [(mi(&[2]), c(1.0))]);
        let t = s.recenter(&[c(1.0)]);
        assert_eq!(t.coeff(&mi(&[0])), c(1.0));
        assert_eq!(t.coeff(&mi(&[1])), c(2.0));
        assert_eq!(t.coeff(&mi(&[2])), c(1.0));
    }

    #[test]
    fn recenter_identity_when_center_unchanged() {
        let s = ComplexSeries::from_terms(
            2,
            3,
            origin(2),
            [(mi(&[2, 1]), c(0.25)), (mi(&[1, 0]), c(-1.5))],
        );
        assert_eq!(s.recenter(&[Complex64::ZERO, Complex64::ZERO]), s);
    }

    #[test]
    fn recenter_pointwise_equality() {
        let s = ComplexSeries::from_terms(
            2,
            4,
            origin(2),
            [
                (mi(&[2, 0]), c(1.0 / 6.0)),
                (mi(&[0, 2]), c(1.0 / 6.0)),
                (mi(&[3, 1]), c(-0.37)),
                (mi(&[0, 4]), Complex64::new(0.05, 0.2)),
            ],
        );
        let z0 = [Complex64::new(0.4, -0.1), Complex64::new(-0.7, 0.3)];
        let t = s.recenter(&z0);
        for k in 0..20 {
            let z = [
                Complex64::new(0.3 * (k as f64).sin(), 0.1 * (k as f64).cos()),
                Complex64::new(-0.2 * (k as f64 * 0.7).cos(), 0.15),
            ];
            let a = s.eval(&z);
            let b = t.eval(&z);
            assert!((a - b).norm() <= 1e-12 * (1.0 + a.norm()), "k={k}");
        }
    }
}
