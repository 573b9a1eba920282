//! Finite-dimensional C*-algebras: full matrix algebras M_n and diagonal algebras D_n.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AlgebraKind {
    Full,
    Diagonal,
}

/// Which algebra an element lives in: `M_n` (Full) or `D_n` (Diagonal).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct AlgebraDescriptor {
    pub kind: AlgebraKind,
    pub n: usize,
}

impl AlgebraDescriptor {
    pub fn full(n: usize) -> Self {
        assert!(n >= 1, "algebra dimension must be at least 1");
        Self {
            kind: AlgebraKind::Full,
            n,
        }
    }

    pub fn diagonal(n: usize) -> Self {
        assert!(n >= 1, "algebra dimension must be at least 1");
        Self {
            kind: AlgebraKind::Diagonal,
            n,
        }
    }

    /// Number of independent matrix blocks an operator over this algebra splits into.
    pub fn blocks(&self) -> usize {
        match self.kind {
            AlgebraKind::Full => 1,
            AlgebraKind::Diagonal => self.n,
        }
    }

    /// Block acting on row `r` of a module element.
    pub(crate) fn block_of_row(&self, r: usize) -> usize {
        match self.kind {
            AlgebraKind::Full => 0,
            AlgebraKind::Diagonal => r,
        }
    }

    /// Length of one row of a module element of rank `rank`.
    pub fn block_dim(&self, rank: usize) -> usize {
        match self.kind {
            AlgebraKind::Full => self.n * rank,
            AlgebraKind::Diagonal => rank,
        }
    }

    /// Complex dimension of the algebra.
    pub fn scalar_dim(&self) -> usize {
        match self.kind {
            AlgebraKind::Full => self.n * self.n,
            AlgebraKind::Diagonal => self.n,
        }
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::AlgebraMismatch(format!("{self} vs {other}")))
        }
    }
}

impl fmt::Display for AlgebraDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            AlgebraKind::Full => write!(f, "M_{}", self.n),
            AlgebraKind::Diagonal => write!(f, "D_{}", self.n),
        }
    }
}

/// Numerical tolerances for positivity, rank and reconstruction decisions.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub psd_rel: f64,
    pub rank_rel: f64,
    pub recon_rel: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            psd_rel: 1e-9,
            rank_rel: 1e-10,
            recon_rel: 1e-10,
        }
    }
}

impl Tolerance {
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            psd_rel: self.psd_rel * factor,
            rank_rel: self.rank_rel * factor,
            recon_rel: self.recon_rel * factor,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Storage {
    Full(CMat),
    Diagonal(DVector<C64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    algebra: AlgebraDescriptor,
    data: Storage,
}

impl AlgebraElement {
    /// Element of `M_n` from a square matrix. Panics if `m` is not square.
    pub fn full(m: CMat) -> Self {
        assert_eq!(m.nrows(), m.ncols(), "full algebra elements are square");
        Self {
            algebra: AlgebraDescriptor::full(m.nrows()),
            data: Storage::Full(m),
        }
    }

    pub fn diagonal(entries: Vec<C64>) -> Self {
        Self {
            algebra: AlgebraDescriptor::diagonal(entries.len()),
            data: Storage::Diagonal(DVector::from_vec(entries)),
        }
    }

    pub fn diagonal_real(entries: &[f64]) -> Self {
        Self::diagonal(entries.iter().map(|&x| C64::new(x, 0.0)).collect())
    }

    pub fn full_from_rows(n: usize, entries: &[C64]) -> Self {
        Self::full(DMatrix::from_row_slice(n, n, entries))
    }

    /// Element of `algebra` from an n×n matrix; for Diagonal only the diagonal is kept.
    pub fn from_matrix(algebra: AlgebraDescriptor, m: &CMat) -> Self {
        assert_eq!(m.nrows(), algebra.n);
        match algebra.kind {
            AlgebraKind::Full => Self::full(m.clone()),
            AlgebraKind::Diagonal => Self::diagonal((0..algebra.n).map(|i| m[(i, i)]).collect()),
        }
    }

    pub fn zero(algebra: AlgebraDescriptor) -> Self {
        Self::scalar(algebra, C64::new(0.0, 0.0))
    }

    pub fn identity(algebra: AlgebraDescriptor) -> Self {
        Self::scalar(algebra, C64::new(1.0, 0.0))
    }

    pub fn scalar(algebra: AlgebraDescriptor, c: C64) -> Self {
        let n = algebra.n;
        let data = match algebra.kind {
            AlgebraKind::Full => Storage::Full(CMat::identity(n, n).scale(1.0) * c),
            AlgebraKind::Diagonal => Storage::Diagonal(DVector::from_element(n, c)),
        };
        Self { algebra, data }
    }

    pub fn algebra(&self) -> AlgebraDescriptor {
        self.algebra
    }

    /// Dense n×n matrix (diagonal elements are embedded).
    pub fn to_matrix(&self) -> CMat {
        match &self.data {
            Storage::Full(m) => m.clone(),
            Storage::Diagonal(d) => CMat::from_diagonal(d),
        }
    }

    /// Diagonal entries (for Full elements, the matrix diagonal).
    pub fn diagonal_entries(&self) -> Vec<C64> {
        match &self.data {
            Storage::Full(m) => (0..m.nrows()).map(|i| m[(i, i)]).collect(),
            Storage::Diagonal(d) => d.iter().copied().collect(),
        }
    }

    /// Entry (i, j) of the matrix picture.
    pub fn entry(&self, i: usize, j: usize) -> C64 {
        match &self.data {
            Storage::Full(m) => m[(i, j)],
            Storage::Diagonal(d) => {
                if i == j {
                    d[i]
                } else {
                    C64::new(0.0, 0.0)
                }
            }
        }
    }

    /// Entries in canonical order: row-major for Full, the diagonal for Diagonal.
    pub fn raw_entries(&self) -> Vec<C64> {
        match &self.data {
            Storage::Full(m) => {
                let n = m.nrows();
                (0..n * n).map(|k| m[(k / n, k % n)]).collect()
            }
            Storage::Diagonal(d) => d.iter().copied().collect(),
        }
    }

    pub fn from_raw_entries(algebra: AlgebraDescriptor, entries: &[C64]) -> Result<Self> {
        if entries.len() != algebra.scalar_dim() {
            return Err(Error::Shape(format!(
                "{} entries for {algebra}, expected {}",
                entries.len(),
                algebra.scalar_dim()
            )));
        }
        Ok(match algebra.kind {
            AlgebraKind::Full => Self::full_from_rows(algebra.n, entries),
            AlgebraKind::Diagonal => Self::diagonal(entries.to_vec()),
        })
    }

    pub fn adjoint(&self) -> Self {
        let data = match &self.data {
            Storage::Full(m) => Storage::Full(m.adjoint()),
            Storage::Diagonal(d) => Storage::Diagonal(d.map(|z| z.conj())),
        };
        Self {
            algebra: self.algebra,
            data,
        }
    }

    pub fn scale(&self, c: C64) -> Self {
        let data = match &self.data {
            Storage::Full(m) => Storage::Full(m * c),
            Storage::Diagonal(d) => Storage::Diagonal(d * c),
        };
        Self {
            algebra: self.algebra,
            data,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.algebra.check_same(&other.algebra)?;
        Ok(self.zip(other, |a, b| a + b, |a, b| a + b))
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.algebra.check_same(&other.algebra)?;
        Ok(self.zip(other, |a, b| a - b, |a, b| a - b))
    }

    pub fn checked_mul(&self, other: &Self) -> Result<Self> {
        self.algebra.check_same(&other.algebra)?;
        Ok(self.zip(other, |a, b| a * b, |a, b| a.component_mul(b)))
    }

    fn zip(
        &self,
        other: &Self,
        full: impl Fn(&CMat, &CMat) -> CMat,
        diag: impl Fn(&DVector<C64>, &DVector<C64>) -> DVector<C64>,
    ) -> Self {
        let data = match (&self.data, &other.data) {
            (Storage::Full(a), Storage::Full(b)) => Storage::Full(full(a, b)),
            (Storage::Diagonal(a), Storage::Diagonal(b)) => Storage::Diagonal(diag(a, b)),
            _ => unreachable!("descriptors already compared"),
        };
        Self {
            algebra: self.algebra,
            data,
        }
    }

    /// C*-norm, the largest singular value.
    pub fn op_norm(&self) -> f64 {
        match &self.data {
            Storage::Full(m) => linalg::spectral_norm(m),
            Storage::Diagonal(d) => d.iter().fold(0.0, |acc, z| acc.max(z.norm())),
        }
    }

    /// Largest entrywise modulus of `self - other`.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.algebra, other.algebra, "algebra mismatch");
        self.raw_entries()
            .iter()
            .zip(other.raw_entries())
            .fold(0.0, |acc, (a, b)| acc.max((a - b).norm()))
    }

    pub fn max_abs(&self) -> f64 {
        self.raw_entries().iter().fold(0.0, |acc, z| acc.max(z.norm()))
    }

    pub fn trace(&self) -> C64 {
        self.diagonal_entries().iter().sum()
    }

    pub fn is_hermitian(&self, tol: &Tolerance) -> bool {
        self.max_abs_diff(&self.adjoint()) <= tol.psd_rel * self.op_norm().max(1.0)
    }

    /// Positive (self-adjoint with non-negative spectrum) up to `psd_rel * max(1, |a|)`.
    pub fn is_positive(&self, tol: &Tolerance) -> bool {
        self.positivity_defect() <= tol.psd_rel * self.op_norm().max(1.0)
    }

    /// max(hermitian defect, -smallest eigenvalue of the Hermitian part), clipped at 0.
    pub fn positivity_defect(&self) -> f64 {
        let skew = self.max_abs_diff(&self.adjoint());
        let low = self.hermitian_part_eigenvalues().first().copied().unwrap_or(0.0);
        skew.max(-low).max(0.0)
    }

    fn hermitian_part_eigenvalues(&self) -> Vec<f64> {
        match &self.data {
            Storage::Full(m) => linalg::herm_eigenvalues(m),
            Storage::Diagonal(d) => {
                let mut v: Vec<f64> = d.iter().map(|z| z.re).collect();
                v.sort_by(f64::total_cmp);
                v
            }
        }
    }

    pub fn loewner_leq(&self, other: &Self, tol: &Tolerance) -> Result<bool> {
        Ok(other.checked_sub(self)?.is_positive(tol))
    }

    /// Positive square root; negative eigenvalues within tolerance are clamped to zero.
    pub fn sqrt_psd(&self, tol: &Tolerance) -> Result<Self> {
        if !self.is_positive(tol) {
            return Err(Error::NotPositive);
        }
        let data = match &self.data {
            Storage::Full(m) => Storage::Full(linalg::psd_sqrt(m)),
            Storage::Diagonal(d) => Storage::Diagonal(d.map(|z| C64::new(z.re.max(0.0).sqrt(), 0.0))),
        };
        Ok(Self {
            algebra: self.algebra,
            data,
        })
    }

    /// Inverse; fails when the smallest singular value is at most `rank_rel * |a|`.
    pub fn invert(&self, tol: &Tolerance) -> Result<Self> {
        let norm = self.op_norm();
        let data = match &self.data {
            Storage::Full(m) => {
                let sv = linalg::singular_values(m);
                let smin = sv.last().copied().unwrap_or(0.0);
                if norm == 0.0 || smin <= tol.rank_rel * norm {
                    return Err(Error::NotInvertible);
                }
                Storage::Full(linalg::pinv(m, 0.0))
            }
            Storage::Diagonal(d) => {
                let smin = d.iter().fold(f64::INFINITY, |acc, z| acc.min(z.norm()));
                if norm == 0.0 || smin <= tol.rank_rel * norm {
                    return Err(Error::NotInvertible);
                }
                Storage::Diagonal(d.map(|z| C64::new(1.0, 0.0) / z))
            }
        };
        Ok(Self {
            algebra: self.algebra,
            data,
        })
    }

    pub fn is_invertible(&self, tol: &Tolerance) -> bool {
        self.invert(tol).is_ok()
    }

    /// Ascending spectrum of a self-adjoint element.
    pub fn hermitian_spectrum(&self) -> Result<Vec<f64>> {
        if !self.is_hermitian(&Tolerance::default()) {
            return Err(Error::NotHermitian);
        }
        Ok(self.hermitian_part_eigenvalues())
    }

    /// True when the element is a scalar multiple of the identity, up to `rel * max(1, |a|)`.
    pub fn is_central(&self, rel: f64) -> bool {
        match &self.data {
            Storage::Diagonal(_) => true,
            Storage::Full(m) => {
                let n = m.nrows();
                let c = m.trace() / n as f64;
                let mut dev = m.clone();
                for i in 0..n {
                    dev[(i, i)] -= c;
                }
                linalg::max_abs(&dev) <= rel * self.op_norm().max(1.0)
            }
        }
    }

    /// Tensor product, realised in the full algebra of dimension n_A n_B.
    pub fn kron(&self, other: &Self) -> Self {
        Self::full(linalg::kron(&self.to_matrix(), &other.to_matrix()))
    }

    /// Embed into the full algebra of the same size.
    pub fn to_full(&self) -> Self {
        Self::full(self.to_matrix())
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        self.checked_add(rhs).expect("algebra mismatch")
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        self.checked_sub(rhs).expect("algebra mismatch")
    }
}

impl Mul for &AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: Self) -> AlgebraElement {
        self.checked_mul(rhs).expect("algebra mismatch")
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn adjoint_of_full_and_diagonal() {
        let a = AlgebraElement::full_from_rows(2, &[c(1.0), C64::new(0.0, 1.0), c(0.0), c(2.0)]);
        let b = a.adjoint();
        assert_eq!(b.entry(1, 0), C64::new(0.0, -1.0));
        assert_eq!(b.entry(0, 1), c(0.0));
        let d = AlgebraElement::diagonal(vec![C64::new(1.0, 2.0), c(-3.0)]);
        assert_eq!(d.adjoint().diagonal_entries(), vec![C64::new(1.0, -2.0), c(-3.0)]);
        assert_eq!(d.adjoint().adjoint(), d);
    }

    #[test]
    fn norms() {
        assert!((AlgebraElement::diagonal_real(&[2.0, -3.0]).op_norm() - 3.0).abs() < 1e-15);
        let nil = AlgebraElement::full_from_rows(2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert!((nil.op_norm() - 1.0).abs() < 1e-12);
        assert_eq!(AlgebraElement::zero(AlgebraDescriptor::full(3)).op_norm(), 0.0);
    }

    #[test]
    fn positivity_examples() {
        assert!(AlgebraElement::diagonal_real(&[1.0, 0.0]).is_positive(&tol()));
        assert!(!AlgebraElement::diagonal_real(&[1.0, -1e-3]).is_positive(&tol()));
        assert!(AlgebraElement::diagonal_real(&[1.0, -1e-12]).is_positive(&tol()));
        let non_herm = AlgebraElement::full_from_rows(2, &[c(1.0), c(1.0), c(0.0), c(1.0)]);
        assert!(!non_herm.is_positive(&tol()));
        let psd = AlgebraElement::full_from_rows(2, &[c(2.0), c(1.0), c(1.0), c(2.0)]);
        assert!(psd.is_positive(&tol()));
    }

    #[test]
    fn loewner_examples() {
        let a = AlgebraElement::diagonal_real(&[1.0, 2.0]);
        let b = AlgebraElement::diagonal_real(&[1.5, 2.0]);
        assert!(a.loewner_leq(&b, &tol()).unwrap());
        assert!(!b.loewner_leq(&a, &tol()).unwrap());
        let f = AlgebraElement::identity(AlgebraDescriptor::full(2));
        assert!(matches!(a.loewner_leq(&f, &tol()), Err(Error::AlgebraMismatch(_))));
    }

    #[test]
    fn sqrt_and_inverse() {
        let a = AlgebraElement::full_from_rows(2, &[c(2.0), c(1.0), c(1.0), c(2.0)]);
        let r = a.sqrt_psd(&tol()).unwrap();
        assert!((&r * &r).max_abs_diff(&a) < 1e-12);
        let inv = a.invert(&tol()).unwrap();
        let id = AlgebraElement::identity(a.algebra());
        assert!((&a * &inv).max_abs_diff(&id) < 1e-12);
        let neg = AlgebraElement::diagonal_real(&[1.0, -1.0]);
        assert_eq!(neg.sqrt_psd(&tol()), Err(Error::NotPositive));
        let sing = AlgebraElement::diagonal_real(&[1.0, 0.0]);
        assert_eq!(sing.invert(&tol()), Err(Error::NotInvertible));
        let d = AlgebraElement::diagonal_real(&[4.0, 0.25]);
        assert_eq!(d.sqrt_psd(&tol()).unwrap().diagonal_entries(), vec![c(2.0), c(0.5)]);
    }

    #[test]
    fn spectra() {
        let d = AlgebraElement::diagonal_real(&[3.0, 1.0, 2.0]);
        assert_eq!(d.hermitian_spectrum().unwrap(), vec![1.0, 2.0, 3.0]);
        let a = AlgebraElement::full_from_rows(2, &[c(2.0), c(1.0), c(1.0), c(2.0)]);
        let s = a.hermitian_spectrum().unwrap();
        // roots of t^2 - 4t + 3
        assert!((s[0] - 1.0).abs() < 1e-12 && (s[1] - 3.0).abs() < 1e-12);
        let z = AlgebraElement::zero(AlgebraDescriptor::full(3))
            .hermitian_spectrum()
            .unwrap();
        assert_eq!(z, vec![0.0; 3]);
        let skew = AlgebraElement::full_from_rows(2, &[c(0.0), c(1.0), c(0.0), c(0.0)]);
        assert_eq!(skew.hermitian_spectrum(), Err(Error::NotHermitian));
    }

    #[test]
    fn centrality() {
        assert!(AlgebraElement::scalar(AlgebraDescriptor::full(3), c(2.5)).is_central(1e-12));
        assert!(!AlgebraElement::full_from_rows(2, &[c(1.0), c(0.0), c(0.0), c(2.0)]).is_central(1e-12));
    }
}
