//! Unital *-homomorphisms φ between finite-dimensional algebras and the induced module maps.
//!
//! The module map θ applies an algebra map componentwise, so ⟨θx, θy⟩ = φ(⟨x, y⟩) when θ
//! and φ agree. Operators move across by θ∘T∘θ⁻¹, which on coefficients is c ↦ φ(c).

use crate::algebra::{AlgebraDescriptor, AlgebraElement, AlgebraKind};
use crate::error::{Error, Result};
use crate::linalg::{self, CMat};
use crate::module::{ModuleDescriptor, ModuleElement};
use crate::operators::AdjointableOp;
use crate::random;

#[derive(Clone, Debug, PartialEq)]
pub enum AlgebraMap {
    Identity,
    /// φ(a)_s = a_{σ(s)} on D_n.
    SlotPermutation(Vec<usize>),
    /// φ(a) = u a u* on M_n.
    UnitaryConjugation(CMat),
}

impl AlgebraMap {
    /// Check that the map is a unital *-automorphism of `algebra`.
    pub fn validate(&self, algebra: &AlgebraDescriptor) -> Result<()> {
        match self {
            AlgebraMap::Identity => Ok(()),
            AlgebraMap::SlotPermutation(sigma) => {
                if algebra.kind != AlgebraKind::Diagonal || sigma.len() != algebra.n {
                    return Err(Error::Hypothesis(format!(
                        "slot permutation of length {} on {algebra}",
                        sigma.len()
                    )));
                }
                let mut seen = vec![false; sigma.len()];
                for &s in sigma {
                    if s >= sigma.len() || seen[s] {
                        return Err(Error::Hypothesis(
                            "θ not surjective: slot map is not a permutation".into(),
                        ));
                    }
                    seen[s] = true;
                }
                Ok(())
            }
            AlgebraMap::UnitaryConjugation(u) => {
                if algebra.kind != AlgebraKind::Full || u.nrows() != algebra.n || u.ncols() != algebra.n {
                    return Err(Error::Hypothesis(format!(
                        "conjugation matrix {:?} on {algebra}",
                        u.shape()
                    )));
                }
                let defect = linalg::max_abs(&(u.adjoint() * u - CMat::identity(algebra.n, algebra.n)));
                if defect > 1e-10 {
                    return Err(Error::Hypothesis(format!(
                        "φ not a *-homomorphism: u*u − 1 = {defect:e}"
                    )));
                }
                Ok(())
            }
        }
    }

    pub fn apply(&self, a: &AlgebraElement) -> AlgebraElement {
        match self {
            AlgebraMap::Identity => a.clone(),
            AlgebraMap::SlotPermutation(sigma) => {
                let d = a.diagonal_entries();
                AlgebraElement::diagonal(sigma.iter().map(|&s| d[s]).collect())
            }
            AlgebraMap::UnitaryConjugation(u) => AlgebraElement::full(u * a.to_matrix() * u.adjoint()),
        }
    }

    /// θ(x) = (φ(x_1), …, φ(x_m)).
    pub fn apply_module(&self, x: &ModuleElement) -> ModuleElement {
        let comps = x.components().iter().map(|c| self.apply(c)).collect();
        ModuleElement::new(x.module(), comps).expect("same module")
    }

    /// θ∘T∘θ⁻¹.
    pub fn transport_op(&self, t: &AdjointableOp) -> AdjointableOp {
        let coeffs: Vec<Vec<AlgebraElement>> = t
            .coeffs()
            .iter()
            .map(|row| row.iter().map(|c| self.apply(c)).collect())
            .collect();
        AdjointableOp::from_coeffs(t.domain(), t.codomain(), &coeffs).expect("same shape")
    }
}

/// Residuals of the transport hypotheses, measured on random pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransportResiduals {
    /// max ∥⟨θx,θy⟩ − φ(⟨x,y⟩)∥.
    pub compatibility: f64,
    /// max ∥θ(T_i x) − T_i'(θx)∥ over the transported operators.
    pub intertwining: f64,
}

/// Check φ, θ and the intertwining of each operator with its transport; errors name the
/// failing hypothesis.
pub fn check_transport(
    module: &ModuleDescriptor,
    phi: &AlgebraMap,
    theta: &AlgebraMap,
    ops: &[AdjointableOp],
    transported: &[AdjointableOp],
    samples: usize,
    seed: u64,
) -> Result<TransportResiduals> {
    phi.validate(&module.algebra)?;
    theta.validate(&module.algebra)?;
    let mut rng = random::rng(seed);
    let mut compat: f64 = 0.0;
    let mut inter: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let x = random::gaussian_module_element(&mut rng, module);
        let y = random::gaussian_module_element(&mut rng, module);
        let lhs = theta.apply_module(&x).inner(&theta.apply_module(&y))?;
        let rhs = phi.apply(&x.inner(&y)?);
        compat = compat.max(lhs.max_abs_diff(&rhs) / (1.0 + rhs.max_abs()));
        for (t, tb) in ops.iter().zip(transported) {
            let a = theta.apply_module(&t.apply(&x)?);
            let b = tb.apply(&theta.apply_module(&x))?;
            inter = inter.max(a.max_abs_diff(&b) / (1.0 + a.norm()));
        }
    }
    if compat > 1e-9 {
        return Err(Error::Hypothesis(format!(
            "⟨θx,θy⟩ = φ(⟨x,y⟩) fails, residual {compat:e}"
        )));
    }
    if inter > 1e-9 {
        return Err(Error::Hypothesis(format!(
            "θ does not intertwine the operators, residual {inter:e}"
        )));
    }
    Ok(TransportResiduals {
        compatibility: compat,
        intertwining: inter,
    })
}

/// max over random pairs of ∥⟨S'θx, θy⟩ − φ(⟨Sx, y⟩)∥, relative.
pub fn intertwining_residual(
    module: &ModuleDescriptor,
    phi: &AlgebraMap,
    theta: &AlgebraMap,
    s: &AdjointableOp,
    s_transported: &AdjointableOp,
    samples: usize,
    seed: u64,
) -> Result<f64> {
    let mut rng = random::rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let x = random::gaussian_module_element(&mut rng, module);
        let y = random::gaussian_module_element(&mut rng, module);
        let lhs = s_transported
            .apply(&theta.apply_module(&x))?
            .inner(&theta.apply_module(&y))?;
        let rhs = phi.apply(&s.apply(&x)?.inner(&y)?);
        worst = worst.max(lhs.max_abs_diff(&rhs) / (1.0 + rhs.max_abs()));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::C64;

    #[test]
    fn permutation_moves_slots() {
        let phi = AlgebraMap::SlotPermutation(vec![2, 0, 1]);
        let a = AlgebraElement::diagonal_real(&[1.0, 2.0, 3.0]);
        assert_eq!(phi.apply(&a), AlgebraElement::diagonal_real(&[3.0, 1.0, 2.0]));
        assert!(phi.validate(&AlgebraDescriptor::diagonal(3)).is_ok());
        let bad = AlgebraMap::SlotPermutation(vec![0, 0, 1]);
        assert!(matches!(
            bad.validate(&AlgebraDescriptor::diagonal(3)),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn conjugation_needs_unitary() {
        let alg = AlgebraDescriptor::full(2);
        let u = random::unitary_matrix(&mut random::rng(1), 2);
        assert!(AlgebraMap::UnitaryConjugation(u.clone()).validate(&alg).is_ok());
        let v = u * C64::new(2.0, 0.0);
        assert!(matches!(
            AlgebraMap::UnitaryConjugation(v).validate(&alg),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn transported_operator_intertwines() {
        let alg = AlgebraDescriptor::full(2);
        let m = ModuleDescriptor::new(alg, 2);
        let mut rng = random::rng(3);
        let t = random::gaussian_op(&mut rng, &m, &m);
        let phi = AlgebraMap::UnitaryConjugation(random::unitary_matrix(&mut rng, 2));
        let tb = phi.transport_op(&t);
        let r = check_transport(&m, &phi, &phi, &[t], &[tb], 10, 4).unwrap();
        assert!(r.compatibility < 1e-12 && r.intertwining < 1e-12);
    }

    #[test]
    fn mismatched_theta_is_rejected() {
        let alg = AlgebraDescriptor::diagonal(3);
        let m = ModuleDescriptor::new(alg, 1);
        let phi = AlgebraMap::SlotPermutation(vec![1, 2, 0]);
        let theta = AlgebraMap::SlotPermutation(vec![2, 0, 1]);
        let r = check_transport(&m, &phi, &theta, &[], &[], 5, 1);
        assert!(matches!(r, Err(Error::Hypothesis(_))));
    }
}
