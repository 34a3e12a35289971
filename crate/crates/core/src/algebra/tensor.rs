// SPDX-License-Identifier: Apache-2.0

//! Dense multi-leg arrays over a [`Semiring`].
//!
//! A [`SemiTensor`] denotes a morphism `A_1 ⊗ … ⊗ A_n → B_1 ⊗ … ⊗ B_m`.
//! Entries are stored row-major with all output legs before all input legs,
//! leftmost leg most significant, so the tensor is also a `rows × cols`
//! matrix with `rows = Π out_dims` and `cols = Π in_dims`.

use super::semiring::{Semiring, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SemiTensor {
    semiring: Semiring,
    out_dims: Vec<usize>,
    in_dims: Vec<usize>,
    data: Vec<C64>,
}

/// Outcome of a scale-invariant proportionality test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Proportionality {
    /// `s` with `f ≈ s·g`, measured on the raw tensors.
    pub scalar: Option<C64>,
    /// Max-norm of `f̂ − ŝ·ĝ` where `f̂`, `ĝ` are rescaled to unit max-norm.
    pub residual: f64,
}

impl Proportionality {
    pub fn holds(&self, tol: f64) -> bool {
        self.scalar.is_some() && self.residual <= tol
    }
}

fn product(dims: &[usize]) -> usize {
    dims.iter().product()
}

impl SemiTensor {
    pub fn new(
        semiring: Semiring,
        out_dims: Vec<usize>,
        in_dims: Vec<usize>,
        data: Vec<C64>,
    ) -> Result<Self> {
        if out_dims.iter().chain(&in_dims).any(|&d| d == 0) {
            return Err(Error::InvalidTensor("leg dimensions must be positive".into()));
        }
        let expected = product(&out_dims) * product(&in_dims);
        if data.len() != expected {
            return Err(Error::InvalidTensor(format!(
                "expected {expected} entries, got {}",
                data.len()
            )));
        }
        if let Some(bad) = data.iter().find(|x| !semiring.is_valid_entry(**x)) {
            return Err(Error::InvalidTensor(format!(
                "entry {bad} is not valid for {semiring:?}"
            )));
        }
        Ok(Self { semiring, out_dims, in_dims, data })
    }

    pub fn zeros(semiring: Semiring, out_dims: Vec<usize>, in_dims: Vec<usize>) -> Self {
        let n = product(&out_dims) * product(&in_dims);
        Self { semiring, out_dims, in_dims, data: vec![C64::new(0.0, 0.0); n] }
    }

    /// Builds a tensor entrywise from output and input multi-indices.
    pub fn from_fn<F>(semiring: Semiring, out_dims: Vec<usize>, in_dims: Vec<usize>, mut f: F) -> Self
    where
        F: FnMut(&[usize], &[usize]) -> C64,
    {
        let mut t = Self::zeros(semiring, out_dims, in_dims);
        let cols = t.cols();
        let mut out_idx = vec![0; t.out_dims.len()];
        let mut in_idx = vec![0; t.in_dims.len()];
        for r in 0..t.rows() {
            unravel(r, &t.out_dims, &mut out_idx);
            for c in 0..cols {
                unravel(c, &t.in_dims, &mut in_idx);
                t.data[r * cols + c] = semiring.normalize(f(&out_idx, &in_idx));
            }
        }
        t
    }

    pub fn identity(semiring: Semiring, d: usize) -> Self {
        Self::from_fn(semiring, vec![d], vec![d], |o, i| delta(o[0] == i[0]))
    }

    /// Identity on `X_1 ⊗ … ⊗ X_k`.
    pub fn identity_on(semiring: Semiring, dims: &[usize]) -> Self {
        Self::from_fn(semiring, dims.to_vec(), dims.to_vec(), |o, i| delta(o == i))
    }

    /// The symmetry `σ : X ⊗ Y → Y ⊗ X`.
    pub fn swap(semiring: Semiring, dx: usize, dy: usize) -> Self {
        Self::from_fn(semiring, vec![dy, dx], vec![dx, dy], |o, i| delta(o[0] == i[1] && o[1] == i[0]))
    }

    /// A 0-leg tensor.
    pub fn scalar(semiring: Semiring, s: C64) -> Self {
        Self { semiring, out_dims: vec![], in_dims: vec![], data: vec![semiring.normalize(s)] }
    }

    /// A state `I → X` with the given coefficients.
    pub fn column(semiring: Semiring, entries: Vec<C64>) -> Result<Self> {
        let n = entries.len();
        Self::new(semiring, vec![n], vec![], entries)
    }

    /// A state on `X^{⊗k}` given as a flat coefficient vector.
    pub fn state(semiring: Semiring, dims: Vec<usize>, entries: Vec<C64>) -> Result<Self> {
        Self::new(semiring, dims, vec![], entries)
    }

    pub fn semiring(&self) -> Semiring {
        self.semiring
    }

    pub fn out_dims(&self) -> &[usize] {
        &self.out_dims
    }

    pub fn in_dims(&self) -> &[usize] {
        &self.in_dims
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<C64> {
        self.data
    }

    pub fn rows(&self) -> usize {
        product(&self.out_dims)
    }

    pub fn cols(&self) -> usize {
        product(&self.in_dims)
    }

    pub fn entry(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.cols() + col]
    }

    pub fn get(&self, out_idx: &[usize], in_idx: &[usize]) -> C64 {
        self.entry(ravel(out_idx, &self.out_dims), ravel(in_idx, &self.in_dims))
    }

    /// Whether this is a scalar (no legs).
    pub fn is_scalar(&self) -> bool {
        self.out_dims.is_empty() && self.in_dims.is_empty()
    }

    fn same_semiring(&self, other: &Self) -> Result<()> {
        if self.semiring != other.semiring {
            return Err(Error::SemiringMismatch(self.semiring, other.semiring));
        }
        Ok(())
    }

    fn same_shape(&self, other: &Self) -> Result<()> {
        self.same_semiring(other)?;
        if self.out_dims != other.out_dims || self.in_dims != other.in_dims {
            return Err(Error::DimensionMismatch(format!(
                "{:?}←{:?} vs {:?}←{:?}",
                self.out_dims, self.in_dims, other.out_dims, other.in_dims
            )));
        }
        Ok(())
    }

    /// Sequential composition `self ∘ g` (apply `g` first).
    pub fn compose(&self, g: &Self) -> Result<Self> {
        self.same_semiring(g)?;
        if self.in_dims != g.out_dims {
            return Err(Error::DimensionMismatch(format!(
                "cannot compose: inputs {:?} vs outputs {:?}",
                self.in_dims, g.out_dims
            )));
        }
        let (rows, inner, cols) = (self.rows(), self.cols(), g.cols());
        let mut data = vec![C64::new(0.0, 0.0); rows * cols];
        for i in 0..rows {
            let out_row = &mut data[i * cols..(i + 1) * cols];
            for k in 0..inner {
                let a = self.data[i * inner + k];
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                let g_row = &g.data[k * cols..(k + 1) * cols];
                for (o, &b) in out_row.iter_mut().zip(g_row) {
                    *o += a * b;
                }
            }
        }
        if self.semiring.is_boolean() {
            data.iter_mut().for_each(|x| *x = self.semiring.normalize(*x));
        }
        Ok(Self {
            semiring: self.semiring,
            out_dims: self.out_dims.clone(),
            in_dims: g.in_dims.clone(),
            data,
        })
    }

    /// Monoidal product `self ⊗ g`: output legs are `self.out ++ g.out`, input
    /// legs `self.in ++ g.in`.
    pub fn tensor(&self, g: &Self) -> Result<Self> {
        self.same_semiring(g)?;
        let (r1, c1, r2, c2) = (self.rows(), self.cols(), g.rows(), g.cols());
        let cols = c1 * c2;
        let mut data = vec![C64::new(0.0, 0.0); r1 * r2 * cols];
        for a in 0..r1 {
            for b in 0..c1 {
                let x = self.data[a * c1 + b];
                if x.re == 0.0 && x.im == 0.0 {
                    continue;
                }
                for c in 0..r2 {
                    let row = a * r2 + c;
                    for d in 0..c2 {
                        data[row * cols + b * c2 + d] = x * g.data[c * c2 + d];
                    }
                }
            }
        }
        let mut out_dims = self.out_dims.clone();
        out_dims.extend_from_slice(&g.out_dims);
        let mut in_dims = self.in_dims.clone();
        in_dims.extend_from_slice(&g.in_dims);
        Ok(Self { semiring: self.semiring, out_dims, in_dims, data })
    }

    /// Tensor product of a sequence; the empty product is the scalar one.
    pub fn tensor_all<'a, I>(semiring: Semiring, factors: I) -> Result<Self>
    where
        I: IntoIterator<Item = &'a SemiTensor>,
    {
        let mut acc = Self::scalar(semiring, semiring.one());
        for f in factors {
            acc = acc.tensor(f)?;
        }
        Ok(acc)
    }

    /// Conjugate transpose (plain transpose over the booleans).
    pub fn dagger(&self) -> Self {
        let (rows, cols) = (self.rows(), self.cols());
        let mut data = vec![C64::new(0.0, 0.0); rows * cols];
        for r in 0..rows {
            for c in 0..cols {
                data[c * rows + r] = self.semiring.conj(self.data[r * cols + c]);
            }
        }
        Self {
            semiring: self.semiring,
            out_dims: self.in_dims.clone(),
            in_dims: self.out_dims.clone(),
            data,
        }
    }

    /// Entrywise conjugate in the computational basis.
    pub fn conj(&self) -> Self {
        let mut t = self.clone();
        t.data.iter_mut().for_each(|x| *x = self.semiring.conj(*x));
        t
    }

    pub fn scale(&self, s: C64) -> Self {
        let mut t = self.clone();
        t.data.iter_mut().for_each(|x| *x = self.semiring.normalize(*x * s));
        t
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.same_shape(other)?;
        let mut t = self.clone();
        for (x, y) in t.data.iter_mut().zip(&other.data) {
            *x = self.semiring.add(*x, *y);
        }
        Ok(t)
    }

    /// Max-norm of the entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> Result<f64> {
        self.same_shape(other)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.norm()).fold(0.0, f64::max)
    }

    /// Euclidean norm of the flattened entries.
    pub fn norm(&self) -> f64 {
        self.data.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Reinterprets the flat data under a new leg partition of the same total
    /// size. Since storage is row-major over `out ++ in`, moving trailing
    /// output legs to the front of the inputs (or merging adjacent legs) is
    /// a pure regrouping.
    pub fn reshape(&self, out_dims: Vec<usize>, in_dims: Vec<usize>) -> Result<Self> {
        if product(&out_dims) * product(&in_dims) != self.data.len() || out_dims.iter().chain(&in_dims).any(|&d| d == 0) {
            return Err(Error::DimensionMismatch(format!(
                "cannot reshape {:?}←{:?} into {out_dims:?}←{in_dims:?}",
                self.out_dims, self.in_dims
            )));
        }
        Ok(Self { semiring: self.semiring, out_dims, in_dims, data: self.data.clone() })
    }

    /// Applies a map with a single input leg to output leg `leg`; the leg is
    /// replaced by the map's output legs.
    pub fn apply_to_output(&self, leg: usize, matrix: &SemiTensor) -> Result<Self> {
        self.same_semiring(matrix)?;
        if leg >= self.out_dims.len()
            || matrix.in_dims != [self.out_dims[leg]]
        {
            return Err(Error::DimensionMismatch(format!(
                "cannot apply {:?}←{:?} to output leg {leg} of {:?}",
                matrix.out_dims, matrix.in_dims, self.out_dims
            )));
        }
        let d_in = self.out_dims[leg];
        let d_out = matrix.rows();
        let outer: usize = self.out_dims[..leg].iter().product();
        let inner: usize = self.out_dims[leg + 1..].iter().product::<usize>() * self.cols();
        let mut data = vec![C64::new(0.0, 0.0); outer * d_out * inner];
        for a in 0..outer {
            for j in 0..d_out {
                for i in 0..d_in {
                    let m = matrix.data[j * d_in + i];
                    if m.re == 0.0 && m.im == 0.0 {
                        continue;
                    }
                    let src = &self.data[(a * d_in + i) * inner..(a * d_in + i + 1) * inner];
                    let dst = &mut data[(a * d_out + j) * inner..(a * d_out + j + 1) * inner];
                    for (o, &x) in dst.iter_mut().zip(src) {
                        *o += m * x;
                    }
                }
            }
        }
        if self.semiring.is_boolean() {
            data.iter_mut().for_each(|x| *x = self.semiring.normalize(*x));
        }
        let mut out_dims = self.out_dims[..leg].to_vec();
        out_dims.extend_from_slice(&matrix.out_dims);
        out_dims.extend_from_slice(&self.out_dims[leg + 1..]);
        Ok(Self { semiring: self.semiring, out_dims, in_dims: self.in_dims.clone(), data })
    }

    /// Returns `s` with `max|f − s·g| ≤ tol`, choosing `s` from the entry of
    /// `g` of largest modulus. Over the booleans only exact equality with
    /// `s = 1` is accepted.
    pub fn equal_up_to_scalar(f: &Self, g: &Self, tol: f64) -> Result<Option<C64>> {
        f.same_shape(g)?;
        if f.semiring.is_boolean() {
            return Ok((f.data == g.data).then_some(C64::new(1.0, 0.0)));
        }
        let Some(k) = argmax_modulus(&g.data) else {
            return Ok((f.max_abs() <= tol).then_some(C64::new(1.0, 0.0)));
        };
        if g.data[k].norm() == 0.0 {
            return Ok((f.max_abs() <= tol).then_some(C64::new(1.0, 0.0)));
        }
        let s = f.data[k] / g.data[k];
        if s.norm() == 0.0 {
            return Ok(None);
        }
        let residual = f
            .data
            .iter()
            .zip(&g.data)
            .map(|(a, b)| (a - s * b).norm())
            .fold(0.0, f64::max);
        Ok((residual <= tol).then_some(s))
    }

    /// Scale-invariant version of [`SemiTensor::equal_up_to_scalar`] used in
    /// verification reports: both sides are rescaled to unit max-norm before
    /// the residual is measured, so residuals of unrelated tensors are O(1).
    pub fn proportionality(f: &Self, g: &Self) -> Result<Proportionality> {
        f.same_shape(g)?;
        let (fm, gm) = (f.max_abs(), g.max_abs());
        if f.semiring.is_boolean() {
            let equal = f.data == g.data;
            return Ok(Proportionality {
                scalar: equal.then_some(C64::new(1.0, 0.0)),
                residual: if equal { 0.0 } else { 1.0 },
            });
        }
        if fm == 0.0 && gm == 0.0 {
            return Ok(Proportionality { scalar: Some(C64::new(1.0, 0.0)), residual: 0.0 });
        }
        if fm == 0.0 || gm == 0.0 {
            return Ok(Proportionality { scalar: None, residual: 1.0 });
        }
        let k = argmax_modulus(&g.data).expect("non-empty");
        let s_hat = (f.data[k] / fm) / (g.data[k] / gm);
        let residual = f
            .data
            .iter()
            .zip(&g.data)
            .map(|(a, b)| (a / fm - s_hat * b / gm).norm())
            .fold(0.0, f64::max);
        let s = s_hat * fm / gm;
        Ok(Proportionality { scalar: (s.norm() > 0.0).then_some(s), residual })
    }
}

fn argmax_modulus(data: &[C64]) -> Option<usize> {
    let mut best: Option<(usize, f64)> = None;
    for (i, x) in data.iter().enumerate() {
        let n = x.norm();
        if best.is_none_or(|(_, b)| n > b) {
            best = Some((i, n));
        }
    }
    best.map(|(i, _)| i)
}

#[inline]
fn delta(b: bool) -> C64 {
    if b {
        C64::new(1.0, 0.0)
    } else {
        C64::new(0.0, 0.0)
    }
}

/// Row-major multi-index of `flat` over `dims`.
pub(crate) fn unravel(mut flat: usize, dims: &[usize], out: &mut [usize]) {
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = flat % d;
        flat /= d;
    }
}

pub(crate) fn ravel(idx: &[usize], dims: &[usize]) -> usize {
    idx.iter().zip(dims).fold(0, |acc, (&i, &d)| acc * d + i)
}
