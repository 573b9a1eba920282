//! Adjointable operators between standard modules.
//!
//! An operator A^m → A^p is a matrix of coefficients c_kj ∈ A acting from the right,
//! (Tx)_j = Σ_k x_k c_kj. Internally it is kept as block matrices acting on the rows of
//! an element (see [`ModuleElement::rows`]): one (n·p)×(n·m) block for M_n, and one p×m
//! block per slot for D_n. The two pictures carry the same data.

use nalgebra::DVector;

use crate::algebra::{AlgebraDescriptor, AlgebraElement, AlgebraKind, Tolerance};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat, C64};
use crate::module::{ModuleDescriptor, ModuleElement};

#[derive(Clone, Debug, PartialEq)]
pub struct AdjointableOp {
    domain: ModuleDescriptor,
    codomain: ModuleDescriptor,
    blocks: Vec<CMat>,
}

/// Matrix of an operator on `vectorize` coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarRep {
    pub matrix: CMat,
}

impl ScalarRep {
    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::herm_eigenvalues(&self.matrix)
    }

    pub fn singular_values(&self) -> Vec<f64> {
        linalg::singular_values(&self.matrix)
    }

    /// Hermitian and positive semidefinite at `psd_rel * max(1, ∥M∥)`.
    pub fn is_psd(&self, tol: &Tolerance) -> bool {
        let scale = tol.psd_rel * linalg::spectral_norm(&self.matrix).max(1.0);
        let low = self.eigenvalues().first().copied().unwrap_or(0.0);
        linalg::hermitian_defect(&self.matrix) <= scale && low >= -scale
    }
}

impl AdjointableOp {
    pub fn from_blocks(domain: ModuleDescriptor, codomain: ModuleDescriptor, blocks: Vec<CMat>) -> Result<Self> {
        domain.algebra.check_same(&codomain.algebra)?;
        if blocks.len() != domain.algebra.blocks() {
            return Err(Error::Shape(format!("{} blocks for {}", blocks.len(), domain.algebra)));
        }
        for b in &blocks {
            if b.shape() != (codomain.block_dim(), domain.block_dim()) {
                return Err(Error::Shape(format!("block {:?} for {domain} → {codomain}", b.shape())));
            }
        }
        Ok(Self {
            domain,
            codomain,
            blocks,
        })
    }

    /// Operator from its m×p coefficient matrix (rows indexed by domain components).
    pub fn from_coeffs(
        domain: ModuleDescriptor,
        codomain: ModuleDescriptor,
        coeffs: &[Vec<AlgebraElement>],
    ) -> Result<Self> {
        let alg = domain.algebra;
        alg.check_same(&codomain.algebra)?;
        let (m, p) = (domain.rank, codomain.rank);
        if coeffs.len() != m || coeffs.iter().any(|row| row.len() != p) {
            return Err(Error::Shape(format!("coefficient matrix for {domain} → {codomain}")));
        }
        for c in coeffs.iter().flatten() {
            alg.check_same(&c.algebra())?;
        }
        let n = alg.n;
        let blocks = match alg.kind {
            AlgebraKind::Full => {
                let mut b = CMat::zeros(n * p, n * m);
                for (k, row) in coeffs.iter().enumerate() {
                    for (j, c) in row.iter().enumerate() {
                        let cm = c.to_matrix();
                        for l in 0..n {
                            for col in 0..n {
                                b[(j * n + col, k * n + l)] = cm[(l, col)];
                            }
                        }
                    }
                }
                vec![b]
            }
            AlgebraKind::Diagonal => {
                let diags: Vec<Vec<Vec<C64>>> = coeffs
                    .iter()
                    .map(|row| row.iter().map(|c| c.diagonal_entries()).collect())
                    .collect();
                (0..n).map(|s| CMat::from_fn(p, m, |j, k| diags[k][j][s])).collect()
            }
        };
        Ok(Self {
            domain,
            codomain,
            blocks,
        })
    }

    /// Coefficient c_kj.
    pub fn coeff(&self, k: usize, j: usize) -> AlgebraElement {
        let alg = self.domain.algebra;
        let n = alg.n;
        match alg.kind {
            AlgebraKind::Full => {
                let b = &self.blocks[0];
                AlgebraElement::full(CMat::from_fn(n, n, |l, col| b[(j * n + col, k * n + l)]))
            }
            AlgebraKind::Diagonal => AlgebraElement::diagonal((0..n).map(|s| self.blocks[s][(j, k)]).collect()),
        }
    }

    pub fn coeffs(&self) -> Vec<Vec<AlgebraElement>> {
        (0..self.domain.rank)
            .map(|k| (0..self.codomain.rank).map(|j| self.coeff(k, j)).collect())
            .collect()
    }

    pub fn identity(module: ModuleDescriptor) -> Self {
        Self::scalar(module, C64::new(1.0, 0.0))
    }

    pub fn zero(domain: ModuleDescriptor, codomain: ModuleDescriptor) -> Self {
        let blocks = vec![CMat::zeros(codomain.block_dim(), domain.block_dim()); domain.algebra.blocks()];
        Self {
            domain,
            codomain,
            blocks,
        }
    }

    pub fn scalar(module: ModuleDescriptor, c: C64) -> Self {
        let d = module.block_dim();
        let blocks = vec![CMat::identity(d, d) * c; module.algebra.blocks()];
        Self {
            domain: module,
            codomain: module,
            blocks,
        }
    }

    /// x ↦ (x_1 a_1, …, x_m a_m).
    pub fn diagonal_coeffs(module: ModuleDescriptor, diag: &[AlgebraElement]) -> Result<Self> {
        if diag.len() != module.rank {
            return Err(Error::Shape("diagonal coefficient count".into()));
        }
        let zero = AlgebraElement::zero(module.algebra);
        let coeffs: Vec<Vec<AlgebraElement>> = (0..module.rank)
            .map(|k| {
                (0..module.rank)
                    .map(|j| if k == j { diag[k].clone() } else { zero.clone() })
                    .collect()
            })
            .collect();
        Self::from_coeffs(module, module, &coeffs)
    }

    /// Right multiplication x ↦ x·a on A^m (every component).
    pub fn right_multiplication(module: ModuleDescriptor, a: &AlgebraElement) -> Result<Self> {
        Self::diagonal_coeffs(module, &vec![a.clone(); module.rank])
    }

    pub fn domain(&self) -> ModuleDescriptor {
        self.domain
    }

    pub fn codomain(&self) -> ModuleDescriptor {
        self.codomain
    }

    pub fn algebra(&self) -> AlgebraDescriptor {
        self.domain.algebra
    }

    pub fn blocks(&self) -> &[CMat] {
        &self.blocks
    }

    pub fn is_endomorphism(&self) -> bool {
        self.domain == self.codomain
    }

    pub fn apply(&self, x: &ModuleElement) -> Result<ModuleElement> {
        self.domain.check_same(&x.module())?;
        let alg = self.domain.algebra;
        let rows: Vec<DVector<C64>> = x
            .rows()
            .iter()
            .enumerate()
            .map(|(r, v)| &self.blocks[alg.block_of_row(r)] * v)
            .collect();
        Ok(ModuleElement::from_rows(self.codomain, &rows))
    }

    pub fn adjoint(&self) -> Self {
        Self {
            domain: self.codomain,
            codomain: self.domain,
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    /// self ∘ inner.
    pub fn compose(&self, inner: &Self) -> Result<Self> {
        inner.codomain.check_same(&self.domain)?;
        let blocks = self.blocks.iter().zip(&inner.blocks).map(|(a, b)| a * b).collect();
        Ok(Self {
            domain: inner.domain,
            codomain: self.codomain,
            blocks,
        })
    }

    fn check_same_shape(&self, other: &Self) -> Result<()> {
        self.domain.check_same(&other.domain)?;
        self.codomain.check_same(&other.codomain)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a + b).collect();
        Ok(Self { blocks, ..self.clone() })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same_shape(other)?;
        let blocks = self.blocks.iter().zip(&other.blocks).map(|(a, b)| a - b).collect();
        Ok(Self { blocks, ..self.clone() })
    }

    pub fn scale(&self, c: C64) -> Self {
        Self {
            blocks: self.blocks.iter().map(|b| b * c).collect(),
            ..self.clone()
        }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(C64::new(c, 0.0))
    }

    /// Multiply the block of slot s by `weights[s]` (Diagonal algebras).
    pub fn slot_weighted(&self, weights: &[f64]) -> Result<Self> {
        if self.algebra().kind != AlgebraKind::Diagonal || weights.len() != self.blocks.len() {
            return Err(Error::Shape(
                "slot weights need a diagonal algebra with one weight per slot".into(),
            ));
        }
        let blocks = self
            .blocks
            .iter()
            .zip(weights)
            .map(|(b, &w)| b * C64::new(w, 0.0))
            .collect();
        Ok(Self { blocks, ..self.clone() })
    }

    /// Sum of a non-empty list of operators of the same shape.
    pub fn sum<'a>(ops: impl IntoIterator<Item = &'a Self>) -> Result<Self> {
        let mut it = ops.into_iter();
        let first = it
            .next()
            .ok_or_else(|| Error::Shape("empty operator sum".into()))?
            .clone();
        it.try_fold(first, |acc, op| acc.add(op))
    }

    /// Stack operators H → V_i into one operator H → ⊕V_i.
    pub fn stack(ops: &[Self]) -> Result<Self> {
        let first = ops.first().ok_or_else(|| Error::Shape("empty stack".into()))?;
        let domain = first.domain;
        let mut rank = 0;
        for op in ops {
            op.domain.check_same(&domain)?;
            rank += op.codomain.rank;
        }
        let codomain = ModuleDescriptor::new(domain.algebra, rank);
        let blocks = (0..domain.algebra.blocks())
            .map(|b| {
                let mut out = CMat::zeros(codomain.block_dim(), domain.block_dim());
                let mut row = 0;
                for op in ops {
                    let blk = &op.blocks[b];
                    out.view_mut((row, 0), blk.shape()).copy_from(blk);
                    row += blk.nrows();
                }
                out
            })
            .collect();
        Ok(Self {
            domain,
            codomain,
            blocks,
        })
    }

    /// Extract the part landing in components `offset..offset + rank` of the codomain.
    pub fn codomain_slice(&self, offset: usize, rank: usize) -> Result<Self> {
        if offset + rank > self.codomain.rank {
            return Err(Error::Shape("codomain slice out of range".into()));
        }
        let codomain = ModuleDescriptor::new(self.algebra(), rank);
        let per = self.algebra().block_dim(1);
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.rows(offset * per, rank * per).into_owned())
            .collect();
        Ok(Self {
            domain: self.domain,
            codomain,
            blocks,
        })
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.blocks.len(), other.blocks.len(), "operator shape mismatch");
        self.blocks
            .iter()
            .zip(&other.blocks)
            .fold(0.0, |acc, (a, b)| acc.max(linalg::max_abs(&(a - b))))
    }

    pub fn scalar_rep(&self) -> ScalarRep {
        let alg = self.algebra();
        let n = alg.n;
        let (m, p) = (self.domain.rank, self.codomain.rank);
        let matrix = match alg.kind {
            AlgebraKind::Full => {
                let b = &self.blocks[0];
                let mut out = CMat::zeros(p * n * n, m * n * n);
                for r in 0..n {
                    for j in 0..p {
                        for c in 0..n {
                            for k in 0..m {
                                for l in 0..n {
                                    out[(j * n * n + r * n + c, k * n * n + r * n + l)] = b[(j * n + c, k * n + l)];
                                }
                            }
                        }
                    }
                }
                out
            }
            AlgebraKind::Diagonal => {
                let mut out = CMat::zeros(p * n, m * n);
                for (s, b) in self.blocks.iter().enumerate() {
                    for j in 0..p {
                        for k in 0..m {
                            out[(j * n + s, k * n + s)] = b[(j, k)];
                        }
                    }
                }
                out
            }
        };
        ScalarRep { matrix }
    }

    /// Operator norm, the largest singular value of the scalar representation.
    pub fn op_norm(&self) -> f64 {
        self.blocks.iter().fold(0.0, |acc, b| acc.max(linalg::spectral_norm(b)))
    }

    /// Largest m with ∥Tx∥ ≥ m∥x∥ for all x.
    pub fn bounded_below_margin(&self) -> f64 {
        self.blocks
            .iter()
            .fold(f64::INFINITY, |acc, b| acc.min(linalg::lower_margin(b)))
    }

    pub fn is_injective(&self, tol: &Tolerance) -> bool {
        let norm = self.op_norm();
        norm > 0.0 && self.bounded_below_margin() > tol.rank_rel * norm
    }

    pub fn is_surjective(&self, tol: &Tolerance) -> bool {
        self.adjoint().is_injective(tol)
    }

    pub fn hermitian_defect(&self) -> f64 {
        self.blocks
            .iter()
            .fold(0.0, |acc, b| acc.max(linalg::hermitian_defect(b)))
    }

    pub fn is_self_adjoint(&self, tol: &Tolerance) -> bool {
        self.is_endomorphism() && self.hermitian_defect() <= tol.psd_rel * self.op_norm().max(1.0)
    }

    /// Ascending spectrum of the Hermitian part (distinct blocks merged; Full multiplicities not repeated).
    pub fn spectrum(&self) -> Vec<f64> {
        let mut all: Vec<f64> = self.blocks.iter().flat_map(linalg::herm_eigenvalues).collect();
        all.sort_by(f64::total_cmp);
        all
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.spectrum().first().copied().unwrap_or(0.0)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        self.spectrum().last().copied().unwrap_or(0.0)
    }

    /// Positivity decided on every block at `psd_rel * scale`.
    pub fn is_positive_scaled(&self, tol: &Tolerance, scale: f64) -> bool {
        if !self.is_endomorphism() {
            return false;
        }
        let eps = tol.psd_rel * scale.max(1.0);
        self.hermitian_defect() <= eps && self.min_eigenvalue() >= -eps
    }

    /// ⟨Tx, x⟩ ≥ 0 for every x, decided spectrally.
    pub fn is_positive_op(&self, tol: &Tolerance) -> bool {
        self.is_positive_scaled(tol, self.op_norm())
    }

    pub fn loewner_leq_op(&self, other: &Self, tol: &Tolerance) -> Result<bool> {
        Ok(other.sub(self)?.is_positive_op(tol))
    }

    /// Smallest eigenvalue of the Hermitian part together with an element x whose
    /// ⟨Tx, x⟩ has that eigenvalue on its diagonal.
    pub fn lowest_direction(&self) -> (f64, ModuleElement) {
        assert!(self.is_endomorphism(), "lowest_direction needs an endomorphism");
        let alg = self.algebra();
        let mut best: Option<(f64, usize, DVector<C64>)> = None;
        for (b, blk) in self.blocks.iter().enumerate() {
            let (vals, vecs) = linalg::herm_eig(blk);
            if let Some(&v) = vals.first() {
                if best.as_ref().is_none_or(|(bv, _, _)| v < *bv) {
                    best = Some((v, b, vecs.column(0).into_owned()));
                }
            }
        }
        let (value, block, vec) = best.expect("non-empty operator");
        let d = self.domain.block_dim();
        let row = match alg.kind {
            AlgebraKind::Full => 0,
            AlgebraKind::Diagonal => block,
        };
        let rows: Vec<DVector<C64>> = (0..alg.n)
            .map(|r| if r == row { vec.clone() } else { DVector::zeros(d) })
            .collect();
        (value, ModuleElement::from_rows(self.domain, &rows))
    }

    pub fn invert(&self, tol: &Tolerance) -> Result<Self> {
        if self.domain.block_dim() != self.codomain.block_dim() {
            return Err(Error::NotInvertible);
        }
        let norm = self.op_norm();
        if norm == 0.0 || self.bounded_below_margin() <= tol.rank_rel * norm {
            return Err(Error::NotInvertible);
        }
        let blocks = self
            .blocks
            .iter()
            .map(|b| b.clone().try_inverse().ok_or(Error::NotInvertible))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            domain: self.codomain,
            codomain: self.domain,
            blocks,
        })
    }

    /// Moore-Penrose inverse with singular values below `rank_rel * σ_max` dropped,
    /// certified by ∥T T† T − T∥ ≤ 1e-9·max(1, ∥T∥).
    pub fn pseudo_inverse(&self, tol: &Tolerance) -> Result<Self> {
        let cutoff = tol.rank_rel * self.op_norm();
        let blocks = self.blocks.iter().map(|b| linalg::pinv(b, cutoff)).collect();
        let pinv = Self {
            domain: self.codomain,
            codomain: self.domain,
            blocks,
        };
        let residual = self.compose(&pinv)?.compose(self)?.sub(self)?.op_norm();
        if residual > 1e-9 * self.op_norm().max(1.0) {
            return Err(Error::Hypothesis(format!(
                "pseudo-inverse certification failed, residual {residual:e}"
            )));
        }
        Ok(pinv)
    }

    /// Orthogonal projection onto the range.
    pub fn range_projection(&self, tol: &Tolerance) -> Self {
        let cutoff = tol.rank_rel * self.op_norm();
        let blocks = self
            .blocks
            .iter()
            .map(|b| {
                let u = linalg::range_basis(b, cutoff);
                &u * u.adjoint()
            })
            .collect();
        Self {
            domain: self.codomain,
            codomain: self.codomain,
            blocks,
        }
    }

    /// Rank of the scalar representation.
    pub fn scalar_rank(&self, tol: &Tolerance) -> usize {
        let cutoff = tol.rank_rel * self.op_norm();
        let per_block: usize = self
            .blocks
            .iter()
            .map(|b| linalg::singular_values(b).iter().filter(|&&s| s > cutoff).count())
            .sum();
        match self.algebra().kind {
            AlgebraKind::Full => per_block * self.algebra().n,
            AlgebraKind::Diagonal => per_block,
        }
    }

    /// Positive square root of a positive operator.
    pub fn sqrt_psd(&self, tol: &Tolerance) -> Result<Self> {
        if !self.is_positive_op(tol) {
            return Err(Error::NotPositive);
        }
        Ok(Self {
            blocks: self.blocks.iter().map(linalg::psd_sqrt).collect(),
            ..self.clone()
        })
    }

    /// Inverse square root of a positive invertible operator.
    pub fn inv_sqrt_psd(&self, tol: &Tolerance) -> Result<Self> {
        if !self.is_positive_op(tol) {
            return Err(Error::NotPositive);
        }
        if self.min_eigenvalue() <= tol.rank_rel * self.op_norm() {
            return Err(Error::NotInvertible);
        }
        Ok(Self {
            blocks: self.blocks.iter().map(|b| linalg::psd_pinv_sqrt(b, 0.0)).collect(),
            ..self.clone()
        })
    }
}

/// Minimal α with T T* ≤ α² K K*, when ran T ⊆ ran K; `None` otherwise.
///
/// α = ∥(KK*)^{†/2} T∥, with the range test ∥(I − P_K) T∥ ≤ psd_rel·max(1, ∥T∥).
pub fn range_inclusion(t: &AdjointableOp, k: &AdjointableOp, tol: &Tolerance) -> Result<Option<f64>> {
    t.codomain.check_same(&k.codomain)?;
    let cutoff = tol.rank_rel * k.op_norm();
    let t_norm = t.op_norm();
    let mut alpha: f64 = 0.0;
    for (tb, kb) in t.blocks.iter().zip(&k.blocks) {
        let (r, c) = kb.shape();
        let (u, s) = if r == 0 || c == 0 || k.op_norm() == 0.0 {
            (CMat::zeros(r, 0), Vec::new())
        } else {
            let svd = kb.clone().svd(true, false);
            let u_all = svd.u.expect("svd u");
            let keep: Vec<usize> = (0..svd.singular_values.len())
                .filter(|&i| svd.singular_values[i] > cutoff)
                .collect();
            let mut u = CMat::zeros(r, keep.len());
            for (dst, &i) in keep.iter().enumerate() {
                u.set_column(dst, &u_all.column(i));
            }
            (u, keep.iter().map(|&i| svd.singular_values[i]).collect::<Vec<f64>>())
        };
        let coords = u.adjoint() * tb;
        let outside = tb - &u * &coords;
        if linalg::spectral_norm(&outside) > tol.psd_rel * t_norm.max(1.0) {
            return Ok(None);
        }
        let mut scaled = coords;
        for (i, &si) in s.iter().enumerate() {
            let mut row = scaled.row_mut(i);
            row /= C64::new(si, 0.0);
        }
        alpha = alpha.max(linalg::spectral_norm(&scaled));
    }
    Ok(Some(alpha))
}

/// Tensor product module H ⊗ K over the full algebra of dimension n_A·n_B.
pub fn tensor_module(h: &ModuleDescriptor, k: &ModuleDescriptor) -> ModuleDescriptor {
    ModuleDescriptor::new(AlgebraDescriptor::full(h.algebra.n * k.algebra.n), h.rank * k.rank)
}

/// T ⊗ U with coefficients c_{(k1,k2),(j1,j2)} = t_{k1 j1} ⊗ u_{k2 j2}.
pub fn kron(t: &AdjointableOp, u: &AdjointableOp) -> AdjointableOp {
    let domain = tensor_module(&t.domain, &u.domain);
    let codomain = tensor_module(&t.codomain, &u.codomain);
    let tc = t.coeffs();
    let uc = u.coeffs();
    let (m2, p2) = (u.domain.rank, u.codomain.rank);
    let coeffs: Vec<Vec<AlgebraElement>> = (0..domain.rank)
        .map(|k| {
            (0..codomain.rank)
                .map(|j| tc[k / m2][j / p2].kron(&uc[k % m2][j % p2]))
                .collect()
        })
        .collect();
    AdjointableOp::from_coeffs(domain, codomain, &coeffs).expect("tensor shapes agree")
}

/// x ⊗ y with components (x ⊗ y)_{(k1,k2)} = x_{k1} ⊗ y_{k2}.
pub fn elementary_tensor(x: &ModuleElement, y: &ModuleElement) -> ModuleElement {
    let module = tensor_module(&x.module(), &y.module());
    let comps = x
        .components()
        .iter()
        .flat_map(|a| y.components().iter().map(move |b| a.kron(b)))
        .collect();
    ModuleElement::new(module, comps).expect("tensor components match")
}
