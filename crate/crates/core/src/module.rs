//! Standard Hilbert modules A^m with the inner product ⟨x, y⟩ = Σ_k x_k y_k*.

use std::fmt;

use nalgebra::DVector;

use crate::algebra::{AlgebraDescriptor, AlgebraElement, AlgebraKind, Tolerance};
use crate::error::{Error, Result};
use crate::linalg::{CMat, C64};
use crate::random;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct ModuleDescriptor {
    pub algebra: AlgebraDescriptor,
    pub rank: usize,
}

impl ModuleDescriptor {
    pub fn new(algebra: AlgebraDescriptor, rank: usize) -> Self {
        assert!(rank >= 1, "module rank must be at least 1");
        Self { algebra, rank }
    }

    /// Length of one row of an element (see [`ModuleElement::rows`]).
    pub fn block_dim(&self) -> usize {
        self.algebra.block_dim(self.rank)
    }

    /// Length of `vectorize` output.
    pub fn scalar_dim(&self) -> usize {
        self.rank * self.algebra.scalar_dim()
    }

    pub(crate) fn check_same(&self, other: &Self) -> Result<()> {
        self.algebra.check_same(&other.algebra)?;
        if self.rank != other.rank {
            return Err(Error::ModuleMismatch(format!("{self} vs {other}")));
        }
        Ok(())
    }
}

impl fmt::Display for ModuleDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}^{}", self.algebra, self.rank)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModuleElement {
    module: ModuleDescriptor,
    components: Vec<AlgebraElement>,
}

impl ModuleElement {
    pub fn new(module: ModuleDescriptor, components: Vec<AlgebraElement>) -> Result<Self> {
        if components.len() != module.rank {
            return Err(Error::ModuleMismatch(format!(
                "{} components for {module}",
                components.len()
            )));
        }
        for c in &components {
            module.algebra.check_same(&c.algebra())?;
        }
        Ok(Self { module, components })
    }

    pub fn zero(module: ModuleDescriptor) -> Self {
        let components = vec![AlgebraElement::zero(module.algebra); module.rank];
        Self { module, components }
    }

    /// The element with the identity in component `k` and zero elsewhere.
    pub fn basis(module: ModuleDescriptor, k: usize) -> Self {
        let mut x = Self::zero(module);
        x.components[k] = AlgebraElement::identity(module.algebra);
        x
    }

    pub fn module(&self) -> ModuleDescriptor {
        self.module
    }

    pub fn components(&self) -> &[AlgebraElement] {
        &self.components
    }

    pub fn component(&self, k: usize) -> &AlgebraElement {
        &self.components[k]
    }

    /// Rows of the element as column vectors of length `block_dim`.
    ///
    /// Full: row r has entry x_k[r, l] at index k·n + l. Diagonal: row s has x_k[s] at index k.
    /// An operator acts on every row by its block matrix.
    pub fn rows(&self) -> Vec<DVector<C64>> {
        let alg = self.module.algebra;
        let n = alg.n;
        let m = self.module.rank;
        match alg.kind {
            AlgebraKind::Full => {
                let mats: Vec<CMat> = self.components.iter().map(|c| c.to_matrix()).collect();
                (0..n)
                    .map(|r| DVector::from_fn(n * m, |i, _| mats[i / n][(r, i % n)]))
                    .collect()
            }
            AlgebraKind::Diagonal => {
                let diags: Vec<Vec<C64>> = self.components.iter().map(|c| c.diagonal_entries()).collect();
                (0..n).map(|s| DVector::from_fn(m, |k, _| diags[k][s])).collect()
            }
        }
    }

    pub fn from_rows(module: ModuleDescriptor, rows: &[DVector<C64>]) -> Self {
        let alg = module.algebra;
        let n = alg.n;
        let m = module.rank;
        assert_eq!(rows.len(), n);
        let components = match alg.kind {
            AlgebraKind::Full => (0..m)
                .map(|k| AlgebraElement::full(CMat::from_fn(n, n, |r, l| rows[r][k * n + l])))
                .collect(),
            AlgebraKind::Diagonal => (0..m)
                .map(|k| AlgebraElement::diagonal((0..n).map(|s| rows[s][k]).collect()))
                .collect(),
        };
        Self { module, components }
    }

    /// A-valued inner product ⟨self, y⟩ = Σ_k self_k y_k*.
    pub fn inner(&self, y: &Self) -> Result<AlgebraElement> {
        self.module.check_same(&y.module)?;
        Ok(inner_rows(self.module.algebra, &self.rows(), &y.rows()))
    }

    /// Left action a·x, componentwise.
    pub fn act(&self, a: &AlgebraElement) -> Result<Self> {
        self.module.algebra.check_same(&a.algebra())?;
        let components = self.components.iter().map(|c| a * c).collect();
        Ok(Self {
            module: self.module,
            components,
        })
    }

    /// ∥⟨x,x⟩∥^{1/2}.
    pub fn norm(&self) -> f64 {
        self.inner(self).expect("same module").op_norm().sqrt()
    }

    /// |x| = ⟨x,x⟩^{1/2}.
    pub fn avalued_abs(&self) -> AlgebraElement {
        self.inner(self)
            .expect("same module")
            .sqrt_psd(&Tolerance::default().scaled(1e3))
            .expect("inner products are positive")
    }

    /// Component-major, then row-major within each component (the diagonal for D_n).
    pub fn vectorize(&self) -> DVector<C64> {
        let entries: Vec<C64> = self.components.iter().flat_map(|c| c.raw_entries()).collect();
        DVector::from_vec(entries)
    }

    pub fn from_vector(module: ModuleDescriptor, v: &DVector<C64>) -> Result<Self> {
        let d = module.algebra.scalar_dim();
        if v.len() != module.rank * d {
            return Err(Error::Shape(format!("vector of length {} for {module}", v.len())));
        }
        let components = (0..module.rank)
            .map(|k| AlgebraElement::from_raw_entries(module.algebra, &v.as_slice()[k * d..(k + 1) * d]))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { module, components })
    }

    pub fn add(&self, y: &Self) -> Result<Self> {
        self.module.check_same(&y.module)?;
        let components = self.components.iter().zip(&y.components).map(|(a, b)| a + b).collect();
        Ok(Self {
            module: self.module,
            components,
        })
    }

    pub fn sub(&self, y: &Self) -> Result<Self> {
        self.module.check_same(&y.module)?;
        let components = self.components.iter().zip(&y.components).map(|(a, b)| a - b).collect();
        Ok(Self {
            module: self.module,
            components,
        })
    }

    pub fn scale(&self, c: C64) -> Self {
        let components = self.components.iter().map(|a| a.scale(c)).collect();
        Self {
            module: self.module,
            components,
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    pub fn max_abs_diff(&self, y: &Self) -> f64 {
        self.components
            .iter()
            .zip(&y.components)
            .fold(0.0, |acc, (a, b)| acc.max(a.max_abs_diff(b)))
    }

    /// Seeded element with i.i.d. standard complex Gaussian entries.
    pub fn random(module: ModuleDescriptor, seed: u64) -> Self {
        random::gaussian_module_element(&mut random::rng(seed), &module)
    }
}

pub(crate) fn inner_rows(alg: AlgebraDescriptor, x: &[DVector<C64>], y: &[DVector<C64>]) -> AlgebraElement {
    let n = alg.n;
    match alg.kind {
        AlgebraKind::Full => AlgebraElement::full(CMat::from_fn(n, n, |r, rp| y[rp].dotc(&x[r]))),
        AlgebraKind::Diagonal => AlgebraElement::diagonal((0..n).map(|s| y[s].dotc(&x[s])).collect()),
    }
}

/// Free-function form of [`ModuleElement::inner`].
pub fn inner(x: &ModuleElement, y: &ModuleElement) -> Result<AlgebraElement> {
    x.inner(y)
}

pub fn random_element(module: ModuleDescriptor, seed: u64) -> ModuleElement {
    ModuleElement::random(module, seed)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    #[test]
    fn inner_of_basis_vectors() {
        let m = ModuleDescriptor::new(AlgebraDescriptor::full(1), 2);
        let e1 = ModuleElement::basis(m, 0);
        let e2 = ModuleElement::basis(m, 1);
        assert_eq!(e1.inner(&e1).unwrap().entry(0, 0), c(1.0));
        assert_eq!(e1.inner(&e2).unwrap().entry(0, 0), c(0.0));
    }

    #[test]
    fn inner_in_diagonal_module() {
        let alg = AlgebraDescriptor::diagonal(2);
        let m = ModuleDescriptor::new(alg, 1);
        let x = ModuleElement::new(m, vec![AlgebraElement::diagonal(vec![c(2.0), C64::new(0.0, 1.0)])]).unwrap();
        let y = ModuleElement::new(m, vec![AlgebraElement::diagonal(vec![c(3.0), c(1.0)])]).unwrap();
        let ip = x.inner(&y).unwrap();
        assert_eq!(ip.diagonal_entries(), vec![c(6.0), C64::new(0.0, 1.0)]);
    }

    #[test]
    fn inner_is_sum_of_products() {
        let alg = AlgebraDescriptor::full(2);
        let m = ModuleDescriptor::new(alg, 3);
        let x = ModuleElement::random(m, 1);
        let y = ModuleElement::random(m, 2);
        let mut direct = AlgebraElement::zero(alg);
        for k in 0..3 {
            direct = &direct + &(x.component(k) * &y.component(k).adjoint());
        }
        assert!(x.inner(&y).unwrap().max_abs_diff(&direct) < 1e-12);
    }

    #[test]
    fn mismatch_errors() {
        let a = ModuleDescriptor::new(AlgebraDescriptor::full(2), 1);
        let b = ModuleDescriptor::new(AlgebraDescriptor::diagonal(2), 1);
        let r = ModuleElement::zero(a).inner(&ModuleElement::zero(b));
        assert!(matches!(r, Err(Error::AlgebraMismatch(_))));
        let wrong = ModuleElement::zero(a).act(&AlgebraElement::identity(AlgebraDescriptor::diagonal(2)));
        assert!(matches!(wrong, Err(Error::AlgebraMismatch(_))));
    }

    #[test]
    fn action_and_norm() {
        let alg = AlgebraDescriptor::diagonal(2);
        let m = ModuleDescriptor::new(alg, 2);
        let x = ModuleElement::random(m, 5);
        let two = AlgebraElement::scalar(alg, c(2.0));
        assert!((x.act(&two).unwrap().norm() - 2.0 * x.norm()).abs() < 1e-12);
        let e = ModuleElement::basis(ModuleDescriptor::new(AlgebraDescriptor::full(1), 2), 0);
        assert!((e.norm() - 1.0).abs() < 1e-15);
        assert_eq!(ModuleElement::zero(m).norm(), 0.0);
    }

    #[test]
    fn avalued_abs_examples() {
        let alg = AlgebraDescriptor::diagonal(2);
        let m = ModuleDescriptor::new(alg, 1);
        let x = ModuleElement::new(m, vec![AlgebraElement::diagonal(vec![c(-3.0), C64::new(0.0, 4.0)])]).unwrap();
        let a = x.avalued_abs();
        assert!(a.max_abs_diff(&AlgebraElement::diagonal_real(&[3.0, 4.0])) < 1e-12);
        let y = ModuleElement::random(ModuleDescriptor::new(AlgebraDescriptor::full(3), 2), 9);
        let r = y.avalued_abs();
        assert!((&r * &r).max_abs_diff(&y.inner(&y).unwrap()) < 1e-10);
    }

    #[test]
    fn vectorize_round_trip_and_trace_identity() {
        for (alg, seed) in [(AlgebraDescriptor::full(2), 3), (AlgebraDescriptor::diagonal(3), 4)] {
            let m = ModuleDescriptor::new(alg, 2);
            let x = ModuleElement::random(m, seed);
            let y = ModuleElement::random(m, seed + 100);
            let vx = x.vectorize();
            assert_eq!(vx.len(), m.scalar_dim());
            assert_eq!(ModuleElement::from_vector(m, &vx).unwrap(), x);
            let tr = x.inner(&y).unwrap().trace();
            assert!((tr - y.vectorize().dotc(&vx)).norm() < 1e-12);
        }
    }

    #[test]
    fn rows_round_trip() {
        for alg in [AlgebraDescriptor::full(3), AlgebraDescriptor::diagonal(3)] {
            let m = ModuleDescriptor::new(alg, 2);
            let x = ModuleElement::random(m, 11);
            assert_eq!(ModuleElement::from_rows(m, &x.rows()), x);
        }
    }

    #[test]
    fn random_is_seeded() {
        let m = ModuleDescriptor::new(AlgebraDescriptor::full(2), 2);
        assert_eq!(ModuleElement::random(m, 7), ModuleElement::random(m, 7));
        assert_ne!(ModuleElement::random(m, 7), ModuleElement::random(m, 8));
        for seed in 0..100 {
            assert!(ModuleElement::random(m, seed).norm() > 0.0);
        }
    }
}
