//! Frames {x_i} in a standard module: analysis, frame operator, bounds, duals.

mod gabor;
pub mod verify;

use std::sync::OnceLock;

pub use gabor::{gabor_frame, periodic_gaussian};
pub use verify::{
    optimal_bounds_of, optimal_k_lower_bound, optimal_star_bounds_diagonal, verify_bessel, verify_norm_sampled,
    verify_operator, verify_operator_on, witness_violates, Bound, BoundSide, BoundsMode, BoundsSpec, NormReport,
    Sampling, ScalarBounds, Verdict, VerificationReport,
};

use crate::algebra::{AlgebraElement, Tolerance};
use crate::error::{Error, Result};
use crate::module::{ModuleDescriptor, ModuleElement};
use crate::operators::AdjointableOp;

#[derive(Clone, Debug)]
pub struct FrameSystem {
    module: ModuleDescriptor,
    vectors: Vec<ModuleElement>,
    operator: OnceLock<AdjointableOp>,
}

impl PartialEq for FrameSystem {
    fn eq(&self, other: &Self) -> bool {
        self.module == other.module && self.vectors == other.vectors
    }
}

impl FrameSystem {
    pub fn new(module: ModuleDescriptor, vectors: Vec<ModuleElement>) -> Result<Self> {
        if vectors.is_empty() {
            return Err(Error::Shape("a frame system needs at least one vector".into()));
        }
        for v in &vectors {
            module.check_same(&v.module())?;
        }
        Ok(Self {
            module,
            vectors,
            operator: OnceLock::new(),
        })
    }

    pub fn module(&self) -> ModuleDescriptor {
        self.module
    }

    pub fn vectors(&self) -> &[ModuleElement] {
        &self.vectors
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// Analysis operator H → A^N, (Tx)_i = ⟨x, x_i⟩.
    pub fn analysis(&self) -> AdjointableOp {
        let alg = self.module.algebra;
        let codomain = ModuleDescriptor::new(alg, self.vectors.len());
        let coeffs: Vec<Vec<AlgebraElement>> = (0..self.module.rank)
            .map(|k| self.vectors.iter().map(|v| v.component(k).adjoint()).collect())
            .collect();
        AdjointableOp::from_coeffs(self.module, codomain, &coeffs).expect("analysis shape")
    }

    /// S = T*T, computed once.
    pub fn frame_operator(&self) -> &AdjointableOp {
        self.operator.get_or_init(|| {
            let t = self.analysis();
            t.adjoint().compose(&t).expect("analysis composes with its adjoint")
        })
    }

    /// (λ_min, λ_max) of S; lower is 0 with `is_frame = false` when S is singular.
    pub fn optimal_scalar_bounds(&self, tol: &Tolerance) -> ScalarBounds {
        optimal_bounds_of(self.frame_operator(), tol)
    }

    pub fn verify_bounds(
        &self,
        spec: &BoundsSpec,
        tol: &Tolerance,
        samples: usize,
        seed: u64,
    ) -> Result<VerificationReport> {
        verify_operator(self.frame_operator(), spec, tol, samples, seed)
    }

    fn inverse_operator(&self, tol: &Tolerance) -> Result<AdjointableOp> {
        let s = self.frame_operator();
        if !optimal_bounds_of(s, tol).is_frame {
            return Err(Error::NotAFrame);
        }
        s.invert(tol).map_err(|_| Error::NotAFrame)
    }

    /// {S⁻¹x_i}.
    pub fn canonical_dual(&self, tol: &Tolerance) -> Result<Self> {
        let inv = self.inverse_operator(tol)?;
        let vectors = self.vectors.iter().map(|v| inv.apply(v)).collect::<Result<Vec<_>>>()?;
        Self::new(self.module, vectors)
    }

    /// {S^{-1/2}x_i}.
    pub fn canonical_parseval(&self, tol: &Tolerance) -> Result<Self> {
        self.inverse_operator(tol)?;
        let root = self.frame_operator().inv_sqrt_psd(tol).map_err(|_| Error::NotAFrame)?;
        let vectors = self.vectors.iter().map(|v| root.apply(v)).collect::<Result<Vec<_>>>()?;
        Self::new(self.module, vectors)
    }

    /// Σ⟨x, S⁻¹x_i⟩x_i.
    pub fn reconstruct(&self, x: &ModuleElement, tol: &Tolerance) -> Result<ModuleElement> {
        let dual = self.canonical_dual(tol)?;
        let mut acc = ModuleElement::zero(self.module);
        for (v, d) in self.vectors.iter().zip(dual.vectors()) {
            acc = acc.add(&v.act(&x.inner(d)?)?)?;
        }
        Ok(acc)
    }

    /// Σ⟨x, x_i⟩⟨x_i, x⟩ evaluated directly from the vectors.
    pub fn quadratic_form(&self, x: &ModuleElement) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::zero(self.module.algebra);
        for v in &self.vectors {
            let c = x.inner(v)?;
            acc = &acc + &(&c * &c.adjoint());
        }
        Ok(acc)
    }

    /// Sampled check of A∥x∥² ≤ ∥Σ⟨x,x_i⟩⟨x_i,x⟩∥ ≤ B∥x∥².
    pub fn verify_norm_frame(&self, a: f64, b: f64, tol: &Tolerance, samples: usize, seed: u64) -> Result<NormReport> {
        verify_norm_sampled(&self.module, |x| self.quadratic_form(x), a, b, tol, samples, seed)
    }
}
