//! Dense complex vectors and matrices, just enough for the RLS recursion.

use std::ops::{Index, IndexMut};

use num_complex::Complex64;

use crate::error::{MrlsError, Result};

/// A scalar signal value (input sample, desired sample, noise, error, `T[n]`).
pub type ComplexSample = Complex64;

/// Fixed-length complex column vector.
#[derive(Debug, Clone, PartialEq)]
pub struct CVec(Vec<Complex64>);

impl CVec {
    pub fn zeros(len: usize) -> Self {
        CVec(vec![Complex64::new(0.0, 0.0); len])
    }

    pub fn from_vec(entries: Vec<Complex64>) -> Self {
        CVec(entries)
    }

    pub fn from_real(entries: &[f64]) -> Self {
        CVec(entries.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    /// Unit basis vector `e_index` of length `len`.
    pub fn basis(len: usize, index: usize) -> Self {
        let mut v = CVec::zeros(len);
        v.0[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.0
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.0
    }

    pub fn into_vec(self) -> Vec<Complex64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Complex64> {
        self.0.iter()
    }

    pub fn norm_sqr(&self) -> f64 {
        self.0.iter().map(|v| v.norm_sqr()).sum()
    }

    /// `‖self − other‖²`.
    pub fn dist_sqr(&self, other: &CVec) -> f64 {
        debug_assert_eq!(self.len(), other.len());
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum()
    }

    pub fn fill_zero(&mut self) {
        self.0.fill(Complex64::new(0.0, 0.0));
    }

    pub fn copy_from(&mut self, other: &CVec) {
        self.0.copy_from_slice(&other.0);
    }

    pub fn add_assign(&mut self, other: &CVec) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += b;
        }
    }

    pub fn sub_assign(&mut self, other: &CVec) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a -= b;
        }
    }

    /// `self += alpha * other`.
    pub fn axpy(&mut self, alpha: Complex64, other: &CVec) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += alpha * b;
        }
    }

    pub fn scale(&mut self, alpha: Complex64) {
        for a in self.0.iter_mut() {
            *a *= alpha;
        }
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Index<usize> for CVec {
    type Output = Complex64;

    fn index(&self, i: usize) -> &Complex64 {
        &self.0[i]
    }
}

impl IndexMut<usize> for CVec {
    fn index_mut(&mut self, i: usize) -> &mut Complex64 {
        &mut self.0[i]
    }
}

impl FromIterator<Complex64> for CVec {
    fn from_iter<I: IntoIterator<Item = Complex64>>(iter: I) -> Self {
        CVec(iter.into_iter().collect())
    }
}

/// Square complex matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct CMat {
    dim: usize,
    data: Vec<Complex64>,
}

impl CMat {
    pub fn zeros(dim: usize) -> Self {
        CMat {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    /// `scale · I`.
    pub fn scaled_identity(dim: usize, scale: f64) -> Self {
        let mut m = CMat::zeros(dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::new(scale, 0.0);
        }
        m
    }

    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let dim = rows.len();
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(MrlsError::Dimension {
                    expected: dim,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        Ok(CMat { dim, data })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self[(i, i)]).collect()
    }

    /// `self · v`.
    pub fn mul_vec(&self, v: &CVec) -> Result<CVec> {
        check_len(self.dim, v.len())?;
        Ok(self
            .data
            .chunks_exact(self.dim)
            .map(|row| row.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
            .collect())
    }

    /// `self · other`.
    pub fn mul_mat(&self, other: &CMat) -> Result<CMat> {
        check_len(self.dim, other.dim)?;
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self[(i, k)];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                let src = other.row(k);
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, s) in dst.iter_mut().zip(src) {
                    *d += a * s;
                }
            }
        }
        Ok(out)
    }

    pub fn conj_transpose(&self) -> CMat {
        let n = self.dim;
        let mut out = CMat::zeros(n);
        for i in 0..n {
            for j in 0..n {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    /// `max |P_ij − conj(P_ji)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.dim;
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;

    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.dim + j]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.dim + j]
    }
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(MrlsError::Dimension { expected, found });
    }
    Ok(())
}

/// `aᴴb = Σ conj(aᵢ)·bᵢ`.
pub fn herm_dot(a: &CVec, b: &CVec) -> Result<Complex64> {
    check_len(a.len(), b.len())?;
    Ok(herm_dot_unchecked(a.as_slice(), b.as_slice()))
}

#[inline]
pub(crate) fn herm_dot_unchecked(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Result of one rank-one gain update.
#[derive(Debug, Clone)]
pub struct GainUpdate {
    pub k: CVec,
    pub p_next: CMat,
    pub t: Complex64,
}

/// One step of the RLS gain recursion:
///
/// `k = Px / (λ + xᴴPx)`, `P' = λ⁻¹(I − kxᴴ)P` (re-symmetrized), `T = 1 − kᴴx`.
pub fn rank1_gain_update(p: &CMat, x: &CVec, lambda: f64) -> Result<GainUpdate> {
    let mut k = CVec::zeros(x.len());
    let mut p_next = p.clone();
    let mut scratch = CVec::zeros(x.len());
    let t = rank1_gain_update_in_place(&mut p_next, x, lambda, &mut k, &mut scratch)?;
    Ok(GainUpdate { k, p_next, t })
}

/// In-place variant used by the estimators: overwrites `p` with `P[n]` and `k`
/// with `k[n]`; `scratch` receives `P[n−1]x`. Returns `T[n]`.
///
/// On error `p` and `k` are left untouched.
pub(crate) fn rank1_gain_update_in_place(
    p: &mut CMat,
    x: &CVec,
    lambda: f64,
    k: &mut CVec,
    scratch: &mut CVec,
) -> Result<Complex64> {
    let n = p.dim();
    check_len(n, x.len())?;
    check_len(n, k.len())?;

    // u = P x
    let xs = x.as_slice();
    for (i, u) in scratch.as_mut_slice().iter_mut().enumerate() {
        *u = p.row(i).iter().zip(xs).map(|(a, b)| a * b).sum();
    }
    let denom = lambda + herm_dot_unchecked(xs, scratch.as_slice()).re;
    if !(denom.is_finite() && denom > 0.0) {
        return Err(MrlsError::NumericalBreakdown { denominator: denom });
    }
    let inv = 1.0 / denom;
    for (ki, ui) in k.as_mut_slice().iter_mut().zip(scratch.iter()) {
        *ki = ui * inv;
    }

    // P is Hermitian so xᴴP = uᴴ and (I − kxᴴ)P = P − k uᴴ. Both triangles are
    // formed and averaged, which is the (P + Pᴴ)/2 re-symmetrization.
    let inv_lambda = 1.0 / lambda;
    let ks = k.as_slice();
    let us = scratch.as_slice();
    for i in 0..n {
        let ki = ks[i];
        let ui_c = us[i].conj();
        {
            let d = p[(i, i)] - ki * us[i].conj();
            p[(i, i)] = Complex64::new(d.re * inv_lambda, 0.0);
        }
        for j in (i + 1)..n {
            let upper = p[(i, j)] - ki * us[j].conj();
            let lower = p[(j, i)] - ks[j] * ui_c;
            let avg = (upper + lower.conj()) * (0.5 * inv_lambda);
            p[(i, j)] = avg;
            p[(j, i)] = avg.conj();
        }
    }

    Ok(Complex64::new(1.0, 0.0) - herm_dot_unchecked(ks, xs))
}
