//! Generalized frames {Λ_i : H → V_i}: operator, duals, synthesis, and the constructions that
//! produce new g-frames, K-g-frames and *-K-g-frames from old ones.
//!
//! Every construction re-verifies its predicted bounds instead of trusting them.

use std::sync::OnceLock;

use crate::algebra::{AlgebraElement, Tolerance};
use crate::error::{Error, Result};
use crate::frames::{
    optimal_bounds_of, optimal_k_lower_bound, verify_bessel, verify_operator, verify_operator_on, BoundsSpec,
    FrameSystem, Sampling, ScalarBounds, VerificationReport,
};
use crate::linalg::{self, CMat};
use crate::module::{ModuleDescriptor, ModuleElement};
use crate::operators::{range_inclusion, AdjointableOp};
use crate::transport::{check_transport, intertwining_residual, AlgebraMap, TransportResiduals};

#[derive(Clone, Debug)]
pub struct GFrameSystem {
    domain: ModuleDescriptor,
    ops: Vec<AdjointableOp>,
    operator: OnceLock<AdjointableOp>,
}

impl PartialEq for GFrameSystem {
    fn eq(&self, other: &Self) -> bool {
        self.domain == other.domain && self.ops == other.ops
    }
}

impl GFrameSystem {
    pub fn new(domain: ModuleDescriptor, ops: Vec<AdjointableOp>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::Shape("a g-frame system needs at least one operator".into()));
        }
        for op in &ops {
            domain.check_same(&op.domain())?;
        }
        Ok(Self {
            domain,
            ops,
            operator: OnceLock::new(),
        })
    }

    /// Λ_i x = ⟨x, x_i⟩ into A¹.
    pub fn from_frame(frame: &FrameSystem) -> Self {
        let t = frame.analysis();
        let ops = (0..frame.len())
            .map(|i| t.codomain_slice(i, 1).expect("in range"))
            .collect();
        Self::new(frame.module(), ops).expect("frame is non-empty")
    }

    pub fn domain(&self) -> ModuleDescriptor {
        self.domain
    }

    pub fn ops(&self) -> &[AdjointableOp] {
        &self.ops
    }

    pub fn targets(&self) -> Vec<ModuleDescriptor> {
        self.ops.iter().map(|op| op.codomain()).collect()
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Component offset of each V_i inside ⊕V_i.
    pub fn offsets(&self) -> Vec<usize> {
        self.ops
            .iter()
            .scan(0, |acc, op| {
                let start = *acc;
                *acc += op.codomain().rank;
                Some(start)
            })
            .collect()
    }

    /// S = Σ Λ_i*Λ_i, computed once.
    pub fn gframe_operator(&self) -> &AdjointableOp {
        self.operator.get_or_init(|| {
            let terms: Vec<AdjointableOp> = self
                .ops
                .iter()
                .map(|op| op.adjoint().compose(op).expect("Λ*Λ composes"))
                .collect();
            AdjointableOp::sum(&terms).expect("non-empty")
        })
    }

    pub fn optimal_scalar_bounds(&self, tol: &Tolerance) -> ScalarBounds {
        optimal_bounds_of(self.gframe_operator(), tol)
    }

    pub fn verify_gbounds(
        &self,
        spec: &BoundsSpec,
        tol: &Tolerance,
        samples: usize,
        seed: u64,
    ) -> Result<VerificationReport> {
        verify_operator(self.gframe_operator(), spec, tol, samples, seed)
    }

    /// x ↦ {Λ_i x} into ⊕V_i.
    pub fn analysis(&self) -> AdjointableOp {
        AdjointableOp::stack(&self.ops).expect("shared domain")
    }

    /// Q{g_i} = Σ Λ_i* g_i.
    pub fn synthesis_q(&self) -> AdjointableOp {
        self.analysis().adjoint()
    }

    /// (∥Q†∥⁻², ∥Q∥²) when Q is surjective.
    pub fn synthesis_bounds(&self, tol: &Tolerance) -> Result<Option<(f64, f64)>> {
        let q = self.synthesis_q();
        if !q.is_surjective(tol) {
            return Ok(None);
        }
        let pinv_norm = q.pseudo_inverse(tol)?.op_norm();
        let norm = q.op_norm();
        Ok(Some((1.0 / (pinv_norm * pinv_norm), norm * norm)))
    }

    /// *-bounds (∥(Q*|ran)⁻¹∥⁻¹·1, ∥Q∥·1) of a system with surjective synthesis operator.
    pub fn synthesis_star_bounds(&self, tol: &Tolerance) -> Option<BoundsSpec> {
        let q = self.synthesis_q();
        if !q.is_surjective(tol) {
            return None;
        }
        let alg = self.domain.algebra;
        let lower = AlgebraElement::identity(alg).scale_real(q.adjoint().bounded_below_margin());
        let upper = AlgebraElement::identity(alg).scale_real(q.op_norm());
        Some(BoundsSpec::star(lower, upper))
    }

    fn inverse_operator(&self, tol: &Tolerance) -> Result<AdjointableOp> {
        let s = self.gframe_operator();
        if !optimal_bounds_of(s, tol).is_frame {
            return Err(Error::NotAGFrame);
        }
        s.invert(tol).map_err(|_| Error::NotAGFrame)
    }

    /// {Λ_i S⁻¹}.
    pub fn canonical_dual_gframe(&self, tol: &Tolerance) -> Result<Self> {
        let inv = self.inverse_operator(tol)?;
        self.right_compose(&inv)
    }

    /// P = Q* S⁻¹ Q, the orthogonal projection of ⊕V_i onto ran Q*.
    pub fn range_projection_p(&self, tol: &Tolerance) -> Result<AdjointableOp> {
        let inv = self.inverse_operator(tol)?;
        let t = self.analysis();
        t.compose(&inv)?.compose(&t.adjoint())
    }

    /// {Λ_i ∘ u} for u : H' → H.
    pub fn right_compose(&self, u: &AdjointableOp) -> Result<Self> {
        let ops = self.ops.iter().map(|op| op.compose(u)).collect::<Result<Vec<_>>>()?;
        Self::new(u.domain(), ops)
    }

    /// x = Σ Λ_i* Λ̃_i x with the canonical dual.
    pub fn reconstruct(&self, x: &ModuleElement, tol: &Tolerance) -> Result<ModuleElement> {
        let dual = self.canonical_dual_gframe(tol)?;
        let mut acc = ModuleElement::zero(self.domain);
        for (op, d) in self.ops.iter().zip(dual.ops()) {
            acc = acc.add(&op.adjoint().apply(&d.apply(x)?)?)?;
        }
        Ok(acc)
    }

    /// Σ⟨Λ_i x, Λ_i x⟩.
    pub fn quadratic_form(&self, x: &ModuleElement) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::zero(self.domain.algebra);
        for op in &self.ops {
            let y = op.apply(x)?;
            acc = &acc + &y.inner(&y)?;
        }
        Ok(acc)
    }
}

/// Σ Γ_i* Λ_i for systems on a common domain with matching targets.
pub fn mixed_operator(lambda: &GFrameSystem, gamma: &GFrameSystem) -> Result<AdjointableOp> {
    check_parallel(lambda, gamma)?;
    let terms = lambda
        .ops()
        .iter()
        .zip(gamma.ops())
        .map(|(l, g)| g.adjoint().compose(l))
        .collect::<Result<Vec<_>>>()?;
    AdjointableOp::sum(&terms)
}

fn check_parallel(a: &GFrameSystem, b: &GFrameSystem) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("{} blocks against {}", a.len(), b.len())));
    }
    for (x, y) in a.ops().iter().zip(b.ops()) {
        x.codomain().check_same(&y.codomain())?;
    }
    Ok(())
}

/// When Σ Γ_i*Λ_i is surjective, Γ's synthesis operator is surjective too and its
/// *-bounds follow from [`GFrameSystem::synthesis_star_bounds`].
pub fn star_bounds_from_mixed(
    lambda: &GFrameSystem,
    gamma: &GFrameSystem,
    tol: &Tolerance,
) -> Result<Option<BoundsSpec>> {
    if !mixed_operator(lambda, gamma)?.is_surjective(tol) {
        return Ok(None);
    }
    Ok(gamma.synthesis_star_bounds(tol))
}

/// A system built from others, its predicted bounds and their verification.
#[derive(Clone, Debug, PartialEq)]
pub struct DerivedGFrame {
    pub system: GFrameSystem,
    pub bounds: BoundsSpec,
    pub report: VerificationReport,
}

/// {Λ_i* Γ_i} : U₂ → U₁ with Bessel bounds B₁ (of Λ) and B₂ (of Γ).
#[derive(Clone, Debug, PartialEq)]
pub struct BesselComposition {
    pub system: GFrameSystem,
    /// B₁·B₂, checked exactly.
    pub bound: f64,
    /// ∥B₁∥²·B₂, the looser estimate; only valid as stated when B₁ ≥ 1.
    pub squared_bound: f64,
    pub report: VerificationReport,
}

pub fn compose_bessel(lambda: &GFrameSystem, gamma: &GFrameSystem, tol: &Tolerance) -> Result<BesselComposition> {
    check_parallel(lambda, gamma)?;
    let ops = lambda
        .ops()
        .iter()
        .zip(gamma.ops())
        .map(|(l, g)| l.adjoint().compose(g))
        .collect::<Result<Vec<_>>>()?;
    let system = GFrameSystem::new(gamma.domain(), ops)?;
    let b1 = lambda.gframe_operator().max_eigenvalue().max(0.0);
    let b2 = gamma.gframe_operator().max_eigenvalue().max(0.0);
    let bound = b1 * b2;
    let report = verify_bessel(system.gframe_operator(), bound, tol)?;
    Ok(BesselComposition {
        system,
        bound,
        squared_bound: b1 * b1 * b2,
        report,
    })
}

/// Scale a Plain or Star spec by the lower and upper factors m and M: scalar bounds pick up
/// (m², M²), element bounds (m·A, M·B).
fn scaled_spec(spec: &BoundsSpec, m: f64, big_m: f64) -> Result<BoundsSpec> {
    use crate::frames::Bound;
    Ok(match (&spec.lower, &spec.upper, spec.mode.uses_k()) {
        (_, _, true) => return Err(Error::InvalidBounds("expected Plain or Star bounds".into())),
        (Bound::Scalar(a), Bound::Scalar(b), _) => BoundsSpec::plain(m * m * a, big_m * big_m * b),
        (Bound::Element(a), Bound::Element(b), _) => BoundsSpec::star(a.scale_real(m), b.scale_real(big_m)),
        _ => return Err(Error::InvalidBounds("mixed bound kinds".into())),
    })
}

/// {θ Λ_i} for V_i = H and θ injective with closed range; bounds scale by
/// (∥θ⁻¹∥⁻¹, ∥θ∥).
pub fn left_compose(
    theta: &AdjointableOp,
    g: &GFrameSystem,
    bounds: &BoundsSpec,
    tol: &Tolerance,
    sampling: Sampling,
) -> Result<DerivedGFrame> {
    let h = g.domain();
    if !theta.is_endomorphism() || theta.domain() != h {
        return Err(Error::Shape(format!("θ must act on {h}")));
    }
    if g.targets().iter().any(|v| *v != h) {
        return Err(Error::Hypothesis("θΛ_i needs every V_i = H".into()));
    }
    if !theta.is_injective(tol) {
        return Err(Error::Hypothesis("θ not injective with closed range".into()));
    }
    let ops = g.ops().iter().map(|op| theta.compose(op)).collect::<Result<Vec<_>>>()?;
    let system = GFrameSystem::new(h, ops)?;
    let spec = scaled_spec(bounds, theta.bounded_below_margin(), theta.op_norm())?;
    let report = system.verify_gbounds(&spec, tol, sampling.samples, sampling.seed)?;
    Ok(DerivedGFrame {
        system,
        bounds: spec,
        report,
    })
}

/// The system moved to the other module structure, with its transported bounds.
#[derive(Clone, Debug, PartialEq)]
pub struct TransportedGFrame {
    pub system: GFrameSystem,
    pub bounds: BoundsSpec,
    pub report: VerificationReport,
    pub residuals: TransportResiduals,
    /// max ∥⟨S'θx, θy⟩ − φ(⟨Sx, y⟩)∥ on random pairs.
    pub operator_residual: f64,
}

/// Move G across a unital *-automorphism φ with module map θ; `bounds` (Plain or Star)
/// become (φ(A), φ(B)).
pub fn transport_gframe(
    g: &GFrameSystem,
    bounds: &BoundsSpec,
    phi: &AlgebraMap,
    theta: &AlgebraMap,
    tol: &Tolerance,
    sampling: Sampling,
) -> Result<TransportedGFrame> {
    let transported: Vec<AdjointableOp> = g.ops().iter().map(|op| phi.transport_op(op)).collect();
    let residuals = check_transport(
        &g.domain(),
        phi,
        theta,
        g.ops(),
        &transported,
        sampling.samples,
        sampling.seed,
    )?;
    let system = GFrameSystem::new(g.domain(), transported)?;
    let operator_residual = intertwining_residual(
        &g.domain(),
        phi,
        theta,
        g.gframe_operator(),
        system.gframe_operator(),
        sampling.samples,
        sampling.seed ^ 0x5eed,
    )?;
    let spec = transport_spec(bounds, phi)?;
    let report = system.verify_gbounds(&spec, tol, sampling.samples, sampling.seed)?;
    Ok(TransportedGFrame {
        system,
        bounds: spec,
        report,
        residuals,
        operator_residual,
    })
}

pub(crate) fn transport_spec(bounds: &BoundsSpec, phi: &AlgebraMap) -> Result<BoundsSpec> {
    use crate::frames::Bound;
    let map = |b: &Bound| match b {
        Bound::Scalar(v) => Bound::Scalar(*v),
        Bound::Element(e) => Bound::Element(phi.apply(e)),
    };
    Ok(BoundsSpec {
        mode: bounds.mode,
        lower: map(&bounds.lower),
        upper: map(&bounds.upper),
        k_op: bounds.k_op.as_ref().map(|k| phi.transport_op(k)),
    })
}

/// G is a T-g-frame with lower bound C/α² whenever it is a K-g-frame with lower bound C and
/// TT* ≤ α²KK*.
pub fn kg_transfer(
    g: &GFrameSystem,
    k: &AdjointableOp,
    t: &AdjointableOp,
    c_lower: f64,
    tol: &Tolerance,
) -> Result<VerificationReport> {
    let s = g.gframe_operator();
    let upper = s.max_eigenvalue().max(0.0);
    let given = verify_operator(s, &BoundsSpec::k(c_lower, upper, k.clone()), tol, 0, 0)?;
    if !given.passed() {
        return Err(Error::Hypothesis(format!("not a K-g-frame with lower bound {c_lower}")));
    }
    let alpha = range_inclusion(t, k, tol)?.ok_or(Error::RangeNotIncluded)?;
    // α = 0 means T = 0, where any lower bound holds.
    let lower = if alpha > 0.0 {
        c_lower / (alpha * alpha)
    } else {
        c_lower
    };
    verify_operator(s, &BoundsSpec::k(lower, upper, t.clone()), tol, 0, 0)
}

/// {Λ_i T*} as a K-g-frame on ran T.
#[derive(Clone, Debug, PartialEq)]
pub struct RestrictedGFrame {
    pub system: GFrameSystem,
    /// Largest δ with ∥T*x∥ ≥ δ∥K*x∥ on ran T; infinite when K* vanishes there.
    pub delta: f64,
    pub lower: f64,
    pub upper: f64,
    pub report: VerificationReport,
}

pub fn kg_restrict(
    g: &GFrameSystem,
    k: &AdjointableOp,
    t: &AdjointableOp,
    tol: &Tolerance,
) -> Result<RestrictedGFrame> {
    let h = g.domain();
    for (name, op) in [("K", k), ("T", t)] {
        if !op.is_endomorphism() || op.domain() != h {
            return Err(Error::Shape(format!("{name} must act on {h}")));
        }
    }
    if range_inclusion(&t.adjoint(), k, tol)?.is_none() {
        return Err(Error::Hypothesis("ran T* is not contained in ran K".into()));
    }
    let s = g.gframe_operator();
    let e = match optimal_k_lower_bound(s, k, tol)? {
        Some(e) if e.is_finite() && e > 0.0 => e,
        _ => return Err(Error::Hypothesis("G is not a K-g-frame".into())),
    };
    let f = s.max_eigenvalue().max(0.0);
    let delta = restriction_delta(t, k, tol)?;
    let k_pinv = k.pseudo_inverse(tol)?.op_norm();
    let delta_sq = if delta.is_finite() { delta * delta } else { 1.0 };
    let lower = e * delta_sq / (k_pinv * k_pinv);
    let t_norm = t.op_norm();
    let upper = f * t_norm * t_norm;
    let system = g.right_compose(&t.adjoint())?;
    let projection = t.range_projection(tol);
    let report = verify_operator_on(
        system.gframe_operator(),
        &BoundsSpec::k(lower, upper, k.clone()),
        tol,
        0,
        0,
        Some(&projection),
    )?;
    Ok(RestrictedGFrame {
        system,
        delta,
        lower,
        upper,
        report,
    })
}

/// δ = min over x ∈ ran T of ∥T*x∥/∥K*x∥, as 1/√λ_max of the compressed pencil (KK*, TT*).
pub fn restriction_delta(t: &AdjointableOp, k: &AdjointableOp, tol: &Tolerance) -> Result<f64> {
    let cutoff = tol.rank_rel * t.op_norm();
    let mut lam_max: f64 = 0.0;
    let mut any = false;
    for (tb, kb) in t.blocks().iter().zip(k.blocks()) {
        let u: CMat = linalg::range_basis(tb, cutoff);
        if u.ncols() == 0 {
            continue;
        }
        any = true;
        let a = u.adjoint() * tb * tb.adjoint() * &u;
        let b = u.adjoint() * kb * kb.adjoint() * &u;
        let r = linalg::psd_pinv_sqrt(&a, 0.0);
        let ev = linalg::herm_eigenvalues(&(&r * b * &r));
        lam_max = lam_max.max(ev.last().copied().unwrap_or(0.0));
    }
    if !any {
        return Err(Error::DeltaZero);
    }
    let scale = k.op_norm().powi(2) / t.op_norm().powi(2);
    if lam_max <= tol.rank_rel * scale.max(f64::MIN_POSITIVE) {
        return Ok(f64::INFINITY);
    }
    Ok(1.0 / lam_max.sqrt())
}

/// {Λ_i T*} for a co-isometry T commuting with K, verified at (A₁, B₁∥T∥²).
pub fn kg_coisometry(g: &GFrameSystem, k: &AdjointableOp, t: &AdjointableOp, tol: &Tolerance) -> Result<DerivedGFrame> {
    let h = g.domain();
    let id = AdjointableOp::identity(h);
    let co = t.compose(&t.adjoint())?.sub(&id)?.op_norm();
    if co > 1e-9 {
        return Err(Error::Hypothesis(format!("T is not a co-isometry, ∥TT* − I∥ = {co:e}")));
    }
    let comm = t.compose(k)?.sub(&k.compose(t)?)?.op_norm();
    if comm > 1e-9 * (t.op_norm() * k.op_norm()).max(1.0) {
        return Err(Error::Hypothesis(format!(
            "T does not commute with K, residual {comm:e}"
        )));
    }
    let s = g.gframe_operator();
    let a1 = match optimal_k_lower_bound(s, k, tol)? {
        Some(a) if a.is_finite() && a > 0.0 => a,
        _ => return Err(Error::Hypothesis("G is not a K-g-frame".into())),
    };
    let b1 = s.max_eigenvalue().max(0.0);
    let system = g.right_compose(&t.adjoint())?;
    let spec = BoundsSpec::k(a1, b1 * t.op_norm().powi(2), k.clone());
    let report = system.verify_gbounds(&spec, tol, 0, 0)?;
    Ok(DerivedGFrame {
        system,
        bounds: spec,
        report,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FactorizationReport {
    /// ∥Σ Θ_i*Λ_i − K*∥.
    pub residual: f64,
    /// Λ in K mode at (1/B_Θ, B_Λ).
    pub lambda: VerificationReport,
    /// Θ in K mode with K* at (1/B_Λ, B_Θ).
    pub theta: VerificationReport,
    pub lambda_bounds: (f64, f64),
    pub theta_bounds: (f64, f64),
}

/// Λ and Θ with T_Θ T_Λ* = K* are K- and K*-g-frames.
pub fn kg_from_factorization(
    lambda: &GFrameSystem,
    theta: &GFrameSystem,
    k: &AdjointableOp,
    tol: &Tolerance,
) -> Result<FactorizationReport> {
    let k_star = k.adjoint();
    let residual = mixed_operator(lambda, theta)?.sub(&k_star)?.op_norm();
    if residual > 1e-9 * k.op_norm().max(1.0) {
        return Err(Error::Hypothesis(format!("T_Θ T_Λ* ≠ K*, residual {residual:e}")));
    }
    let b_lambda = lambda.gframe_operator().max_eigenvalue();
    let b_theta = theta.gframe_operator().max_eigenvalue();
    if b_lambda <= 0.0 || b_theta <= 0.0 {
        return Err(Error::Hypothesis("a zero system has no K-g-frame lower bound".into()));
    }
    let lambda_bounds = (1.0 / b_theta, b_lambda);
    let theta_bounds = (1.0 / b_lambda, b_theta);
    let lambda_report =
        lambda.verify_gbounds(&BoundsSpec::k(lambda_bounds.0, lambda_bounds.1, k.clone()), tol, 0, 0)?;
    let theta_report = theta.verify_gbounds(&BoundsSpec::k(theta_bounds.0, theta_bounds.1, k_star), tol, 0, 0)?;
    Ok(FactorizationReport {
        residual,
        lambda: lambda_report,
        theta: theta_report,
        lambda_bounds,
        theta_bounds,
    })
}

/// {Λ_i K} and its operator K*SK.
pub fn star_kg_from_gframe(g: &GFrameSystem, k: &AdjointableOp) -> Result<(GFrameSystem, AdjointableOp)> {
    let system = g.right_compose(k)?;
    let op = k.adjoint().compose(g.gframe_operator())?.compose(k)?;
    Ok((system, op))
}

/// Bounds of {Λ_i K} given *-bounds (A, B) of G: lower A against ⟨Kx, Kx⟩, upper ∥K∥B.
pub fn star_kg_bounds(lower: &AlgebraElement, upper: &AlgebraElement, k: &AdjointableOp) -> BoundsSpec {
    BoundsSpec::star_k(lower.clone(), upper.scale_real(k.op_norm()), k.adjoint())
}

/// {Λ_i S⁻¹ K}, verified against the canonical dual's scalar *-bounds.
pub fn star_kg_corollary(
    g: &GFrameSystem,
    k: &AdjointableOp,
    tol: &Tolerance,
    sampling: Sampling,
) -> Result<DerivedGFrame> {
    let dual = g.canonical_dual_gframe(tol)?;
    let b = g.optimal_scalar_bounds(tol);
    let alg = g.domain().algebra;
    let lower = AlgebraElement::identity(alg).scale_real(1.0 / b.upper.sqrt());
    let upper = AlgebraElement::identity(alg).scale_real(1.0 / b.lower.sqrt());
    let (system, _) = star_kg_from_gframe(&dual, k)?;
    let spec = star_kg_bounds(&lower, &upper, k);
    let report = system.verify_gbounds(&spec, tol, sampling.samples, sampling.seed)?;
    Ok(DerivedGFrame {
        system,
        bounds: spec,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraDescriptor;
    use crate::frames::Verdict;
    use crate::random;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn h2() -> ModuleDescriptor {
        ModuleDescriptor::new(AlgebraDescriptor::full(2), 2)
    }

    fn random_gframe(seed: u64, blocks: usize) -> GFrameSystem {
        let mut rng = random::rng(seed);
        let h = h2();
        let ops = (0..blocks)
            .map(|i| {
                let v = ModuleDescriptor::new(h.algebra, 1 + i % 2);
                random::gaussian_op(&mut rng, &h, &v)
            })
            .collect();
        GFrameSystem::new(h, ops).unwrap()
    }

    #[test]
    fn identity_block() {
        let g = GFrameSystem::new(h2(), vec![AdjointableOp::identity(h2())]).unwrap();
        assert!(g.gframe_operator().max_abs_diff(&AdjointableOp::identity(h2())) < 1e-15);
        assert!(g.synthesis_q().max_abs_diff(&AdjointableOp::identity(h2())) < 1e-15);
        assert!(
            g.range_projection_p(&tol())
                .unwrap()
                .max_abs_diff(&AdjointableOp::identity(h2()))
                < 1e-12
        );
        assert_eq!(
            g.verify_gbounds(&BoundsSpec::plain(1.0, 1.0), &tol(), 0, 0)
                .unwrap()
                .verdict,
            Verdict::Proved
        );
        assert_eq!(
            g.verify_gbounds(&BoundsSpec::plain(1.1, 1.1), &tol(), 0, 0)
                .unwrap()
                .verdict,
            Verdict::Falsified
        );
        assert_eq!(g.canonical_dual_gframe(&tol()).unwrap(), g);
    }

    #[test]
    fn dual_resolves_identity() {
        let g = random_gframe(7, 3);
        let dual = g.canonical_dual_gframe(&tol()).unwrap();
        let res = mixed_operator(&dual, &g).unwrap();
        assert!(res.max_abs_diff(&AdjointableOp::identity(h2())) < 1e-10);
        let inv = g.gframe_operator().invert(&tol()).unwrap();
        assert!(dual.gframe_operator().max_abs_diff(&inv) < 1e-10);
        let x = ModuleElement::random(h2(), 5);
        assert!(g.reconstruct(&x, &tol()).unwrap().max_abs_diff(&x) < 1e-10);
    }

    #[test]
    fn synthesis_bounds_match_spectrum() {
        let g = random_gframe(11, 3);
        let b = g.optimal_scalar_bounds(&tol());
        let (lo, hi) = g.synthesis_bounds(&tol()).unwrap().unwrap();
        assert!((lo - b.lower).abs() < 1e-9 * b.upper && (hi - b.upper).abs() < 1e-9 * b.upper);
        let p = g.range_projection_p(&tol()).unwrap();
        assert!(p.compose(&p).unwrap().max_abs_diff(&p) < 1e-10);
        assert!(p.adjoint().max_abs_diff(&p) < 1e-10);
        let spec = g.synthesis_star_bounds(&tol()).unwrap();
        assert_eq!(g.verify_gbounds(&spec, &tol(), 10, 1).unwrap().verdict, Verdict::Proved);
    }

    #[test]
    fn singular_operator_has_no_dual() {
        let h = h2();
        let g = GFrameSystem::new(h, vec![AdjointableOp::zero(h, h)]).unwrap();
        assert_eq!(g.canonical_dual_gframe(&tol()), Err(Error::NotAGFrame));
        assert_eq!(g.range_projection_p(&tol()), Err(Error::NotAGFrame));
    }

    #[test]
    fn from_frame_agrees_with_frame_operator() {
        let m = ModuleDescriptor::new(AlgebraDescriptor::diagonal(2), 2);
        let vs = (0..3).map(|i| ModuleElement::random(m, i)).collect();
        let f = FrameSystem::new(m, vs).unwrap();
        let g = GFrameSystem::from_frame(&f);
        assert!(g.gframe_operator().max_abs_diff(f.frame_operator()) < 1e-12);
    }

    #[test]
    fn bessel_composition_bound() {
        let lambda = random_gframe(1, 3);
        let gamma = random_gframe(2, 3);
        let c = compose_bessel(&lambda, &gamma, &tol()).unwrap();
        assert!(c.report.passed());
        let zero = GFrameSystem::new(
            h2(),
            lambda
                .ops()
                .iter()
                .map(|op| AdjointableOp::zero(h2(), op.codomain()))
                .collect(),
        )
        .unwrap();
        let z = compose_bessel(&zero, &gamma, &tol()).unwrap();
        assert_eq!(z.bound, 0.0);
        assert!(z.report.passed());
    }

    #[test]
    fn left_compose_scales_bounds() {
        let h = h2();
        let g = GFrameSystem::new(h, vec![AdjointableOp::identity(h)]).unwrap();
        let d = left_compose(
            &AdjointableOp::scalar(h, 2.0.into()),
            &g,
            &BoundsSpec::plain(1.0, 1.0),
            &tol(),
            Sampling::default(),
        )
        .unwrap();
        assert_eq!(d.bounds, BoundsSpec::plain(4.0, 4.0));
        assert_eq!(d.report.verdict, Verdict::Proved);
        let sing = AdjointableOp::zero(h, h);
        assert!(matches!(
            left_compose(&sing, &g, &BoundsSpec::plain(1.0, 1.0), &tol(), Sampling::default()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn transfer_and_restrict() {
        let h = h2();
        let g = random_gframe(5, 3);
        let k = random::gaussian_op(&mut random::rng(9), &h, &h);
        let c = optimal_k_lower_bound(g.gframe_operator(), &k, &tol()).unwrap().unwrap() * 0.999;
        let half = k.scale_real(0.5);
        let r = kg_transfer(&g, &k, &half, c, &tol()).unwrap();
        assert_eq!(r.verdict, Verdict::Proved);
        let r = kg_restrict(&g, &k, &k, &tol()).unwrap();
        assert!((r.delta - 1.0).abs() < 1e-9);
        assert_eq!(r.report.verdict, Verdict::Proved);
        assert_eq!(
            kg_restrict(&g, &k, &AdjointableOp::zero(h, h), &tol()).unwrap_err(),
            Error::DeltaZero
        );
    }

    #[test]
    fn factorization_through_dual() {
        let g = random_gframe(21, 3);
        let h = h2();
        let k = random::gaussian_op(&mut random::rng(4), &h, &h);
        // Θ_i = Λ_i S⁻¹ K* gives Σ Θ_i*Λ_i = K S⁻¹ S = K, so factor K* with the adjoint.
        let theta = g.canonical_dual_gframe(&tol()).unwrap().right_compose(&k).unwrap();
        let rep = kg_from_factorization(&g, &theta, &k, &tol()).unwrap();
        assert!(rep.lambda.passed() && rep.theta.passed());
        assert!(matches!(
            kg_from_factorization(&g, &g, &k, &tol()),
            Err(Error::Hypothesis(_))
        ));
    }

    #[test]
    fn star_kg_operator() {
        let g = random_gframe(8, 2);
        let h = h2();
        let k = random::gaussian_op(&mut random::rng(3), &h, &h);
        let (sys, op) = star_kg_from_gframe(&g, &k).unwrap();
        assert!(sys.gframe_operator().max_abs_diff(&op) < 1e-12);
        let d = star_kg_corollary(&g, &k, &tol(), Sampling::default()).unwrap();
        assert!(d.report.passed());
    }

    #[test]
    fn coisometry_identity() {
        let g = random_gframe(12, 3);
        let h = h2();
        let id = AdjointableOp::identity(h);
        let d = kg_coisometry(&g, &id, &id, &tol()).unwrap();
        assert_eq!(d.system, g);
        assert_eq!(d.report.verdict, Verdict::Proved);
        let bad = id.scale_real(2.0);
        assert!(matches!(
            kg_coisometry(&g, &id, &bad, &tol()),
            Err(Error::Hypothesis(_))
        ));
    }
}
