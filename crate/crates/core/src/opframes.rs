//! Operator frames {T_i ∈ End*(H)}: plain, K, * and *-K variants, perturbation and
//! combination results, tensor products, transport and duals of K-operator frames.

use std::sync::OnceLock;

use crate::algebra::{AlgebraElement, Tolerance};
use crate::error::{Error, Result};
use crate::frames::{
    optimal_bounds_of, optimal_k_lower_bound, verify_norm_sampled, verify_operator, BoundsSpec, NormReport, Sampling,
    ScalarBounds, VerificationReport,
};
use crate::gframes::{transport_spec, GFrameSystem};
use crate::module::{ModuleDescriptor, ModuleElement};
use crate::operators::{kron, AdjointableOp};
use crate::random;
use crate::transport::{check_transport, intertwining_residual, AlgebraMap, TransportResiduals};

#[derive(Clone, Debug)]
pub struct OperatorFrameSystem {
    module: ModuleDescriptor,
    ops: Vec<AdjointableOp>,
    operator: OnceLock<AdjointableOp>,
}

impl PartialEq for OperatorFrameSystem {
    fn eq(&self, other: &Self) -> bool {
        self.module == other.module && self.ops == other.ops
    }
}

impl OperatorFrameSystem {
    pub fn new(module: ModuleDescriptor, ops: Vec<AdjointableOp>) -> Result<Self> {
        if ops.is_empty() {
            return Err(Error::Shape("an operator frame needs at least one operator".into()));
        }
        for op in &ops {
            module.check_same(&op.domain())?;
            module.check_same(&op.codomain())?;
        }
        Ok(Self {
            module,
            ops,
            operator: OnceLock::new(),
        })
    }

    pub fn module(&self) -> ModuleDescriptor {
        self.module
    }

    pub fn ops(&self) -> &[AdjointableOp] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    /// Σ T_i*T_i, computed once.
    pub fn opframe_operator(&self) -> &AdjointableOp {
        self.operator.get_or_init(|| {
            let terms: Vec<AdjointableOp> = self
                .ops
                .iter()
                .map(|op| op.adjoint().compose(op).expect("endomorphisms"))
                .collect();
            AdjointableOp::sum(&terms).expect("non-empty")
        })
    }

    pub fn optimal_scalar_bounds(&self, tol: &Tolerance) -> ScalarBounds {
        optimal_bounds_of(self.opframe_operator(), tol)
    }

    pub fn verify_opframe(
        &self,
        spec: &BoundsSpec,
        tol: &Tolerance,
        samples: usize,
        seed: u64,
    ) -> Result<VerificationReport> {
        verify_operator(self.opframe_operator(), spec, tol, samples, seed)
    }

    /// The same operators viewed as g-frame blocks with V_i = H.
    pub fn as_gframe(&self) -> GFrameSystem {
        GFrameSystem::new(self.module, self.ops.clone()).expect("non-empty")
    }

    /// Σ⟨T_i x, T_i x⟩.
    pub fn quadratic_form(&self, x: &ModuleElement) -> Result<AlgebraElement> {
        let mut acc = AlgebraElement::zero(self.module.algebra);
        for op in &self.ops {
            let y = op.apply(x)?;
            acc = &acc + &y.inner(&y)?;
        }
        Ok(acc)
    }

    pub fn verify_norm(&self, a: f64, b: f64, tol: &Tolerance, sampling: Sampling) -> Result<NormReport> {
        verify_norm_sampled(
            &self.module,
            |x| self.quadratic_form(x),
            a,
            b,
            tol,
            sampling.samples,
            sampling.seed,
        )
    }

    /// {T_i ∘ u}.
    pub fn right_compose(&self, u: &AdjointableOp) -> Result<Self> {
        let ops = self.ops.iter().map(|op| op.compose(u)).collect::<Result<Vec<_>>>()?;
        Self::new(self.module, ops)
    }

    pub fn scale_real(&self, c: f64) -> Self {
        Self::new(self.module, self.ops.iter().map(|op| op.scale_real(c)).collect()).expect("same shape")
    }

    fn combine(&self, other: &Self, sign: f64) -> Result<Self> {
        if self.len() != other.len() {
            return Err(Error::Shape(format!(
                "{} operators against {}",
                self.len(),
                other.len()
            )));
        }
        let ops = self
            .ops
            .iter()
            .zip(&other.ops)
            .map(|(t, r)| t.add(&r.scale_real(sign)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(self.module, ops)
    }

    /// {T_i + R_i}.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.combine(other, 1.0)
    }

    /// {T_i − R_i}.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.combine(other, -1.0)
    }
}

/// {T_i ± R_i} with predicted bounds ((√ν − √ξ)², (√δ + √ξ)²).
#[derive(Clone, Debug, PartialEq)]
pub struct Perturbation {
    pub plus: OperatorFrameSystem,
    pub minus: OperatorFrameSystem,
    /// (ν, δ) of the frame and the Bessel bound ξ of the perturbation.
    pub nu: f64,
    pub delta: f64,
    pub xi: f64,
    pub lower: f64,
    pub upper: f64,
    pub plus_report: NormReport,
    pub minus_report: NormReport,
}

pub fn perturb_sum(
    of: &OperatorFrameSystem,
    r: &OperatorFrameSystem,
    tol: &Tolerance,
    sampling: Sampling,
) -> Result<Perturbation> {
    let b = of.optimal_scalar_bounds(tol);
    if !b.is_frame {
        return Err(Error::NotAFrame);
    }
    let (nu, delta) = (b.lower, b.upper);
    let xi = r.opframe_operator().max_eigenvalue().max(0.0);
    if xi >= nu {
        return Err(Error::BesselBoundTooLarge { xi, nu });
    }
    let lower = (nu.sqrt() - xi.sqrt()).powi(2);
    let upper = (delta.sqrt() + xi.sqrt()).powi(2);
    let plus = of.add(r)?;
    let minus = of.sub(r)?;
    let plus_report = plus.verify_norm(lower, upper, tol, sampling)?;
    let minus_report = minus.verify_norm(
        lower,
        upper,
        tol,
        Sampling {
            seed: sampling.seed ^ 1,
            ..sampling
        },
    )?;
    Ok(Perturbation {
        plus,
        minus,
        nu,
        delta,
        xi,
        lower,
        upper,
        plus_report,
        minus_report,
    })
}

/// Outcome of the ξ-equivalence between "R is an operator frame" and
/// ∥Σ⟨(T_i − R_i)x, ·⟩∥ ≤ ξ·min(∥Σ⟨T_i x, ·⟩∥, ∥Σ⟨R_i x, ·⟩∥).
#[derive(Clone, Debug, PartialEq)]
pub struct XiReport {
    /// min(1 + √(δ/η), 1 + √(ρ/ν)), the unsquared constant.
    pub formula_xi: Option<f64>,
    /// max((1 + √(δ/η))², (1 + √(ρ/ν))²), which the triangle inequality guarantees.
    pub xi: Option<f64>,
    /// Largest observed ratio of the two sides over the samples.
    pub observed: f64,
    /// The inequality held on every sample at `xi`.
    pub certified: bool,
    /// The inequality held on every sample at `formula_xi`.
    pub formula_certified: bool,
    /// R checked at (ν/(1 + √ξ)², δ(1 + √ξ)²) when certified.
    pub converse: Option<NormReport>,
}

pub fn xi_equivalence(
    of: &OperatorFrameSystem,
    r: &OperatorFrameSystem,
    tol: &Tolerance,
    sampling: Sampling,
) -> Result<XiReport> {
    let b = of.optimal_scalar_bounds(tol);
    if !b.is_frame {
        return Err(Error::NotAFrame);
    }
    let (nu, delta) = (b.lower, b.upper);
    let diff = of.sub(r)?;
    let observed = xi_ratio(of, r, &diff, sampling)?;
    let rb = r.optimal_scalar_bounds(tol);
    if !rb.is_frame {
        return Ok(XiReport {
            formula_xi: None,
            xi: None,
            observed,
            certified: false,
            formula_certified: false,
            converse: None,
        });
    }
    let (eta, rho) = (rb.lower, rb.upper);
    let c1 = 1.0 + (delta / eta).sqrt();
    let c2 = 1.0 + (rho / nu).sqrt();
    let formula_xi = c1.min(c2);
    let xi = (c1 * c1).max(c2 * c2);
    let slack = 1.0 + tol.psd_rel.max(1e-9);
    let certified = observed <= xi * slack;
    let converse = if certified {
        let k = (1.0 + xi.sqrt()).powi(2);
        Some(r.verify_norm(nu / k, delta * k, tol, sampling)?)
    } else {
        None
    };
    Ok(XiReport {
        formula_xi: Some(formula_xi),
        xi: Some(xi),
        observed,
        certified,
        formula_certified: observed <= formula_xi * slack,
        converse,
    })
}

fn xi_ratio(
    of: &OperatorFrameSystem,
    r: &OperatorFrameSystem,
    diff: &OperatorFrameSystem,
    sampling: Sampling,
) -> Result<f64> {
    let mut rng = random::rng(sampling.seed);
    let mut worst: f64 = 0.0;
    for _ in 0..sampling.samples.max(1) {
        let x = random::gaussian_module_element(&mut rng, &of.module());
        let d = diff.quadratic_form(&x)?.op_norm();
        let m = of.quadratic_form(&x)?.op_norm().min(r.quadratic_form(&x)?.op_norm());
        if d == 0.0 {
            continue;
        }
        worst = worst.max(if m > 0.0 { d / m } else { f64::INFINITY });
    }
    Ok(worst)
}

/// {Σ_k R_{k,i}} checked against (A_p/∥L∥², ((1 + √λ)Σ_k √B_k)²).
#[derive(Clone, Debug, PartialEq)]
pub struct CombineReport {
    pub system: OperatorFrameSystem,
    pub lower: f64,
    pub upper: f64,
    /// ∥L ∘ (stacked Σ_k R_k) − (stacked T_p)∥.
    pub l_residual: f64,
    /// Largest observed ∥Σ⟨(T_k − R_k)x, ·⟩∥ / ∥Σ⟨T_k x, ·⟩∥.
    pub closeness: f64,
    pub report: NormReport,
}

pub fn combine_families(
    families: &[OperatorFrameSystem],
    perturbed: &[OperatorFrameSystem],
    l: &AdjointableOp,
    p: usize,
    lambda: f64,
    tol: &Tolerance,
    sampling: Sampling,
) -> Result<CombineReport> {
    if families.is_empty() || families.len() != perturbed.len() {
        return Err(Error::Shape("need one perturbed family per frame".into()));
    }
    if p >= families.len() {
        return Err(Error::InvalidParameter(format!("p = {p} out of range")));
    }
    let h = families[0].module();
    let n = families[0].len();
    for f in families.iter().chain(perturbed) {
        h.check_same(&f.module())?;
        if f.len() != n {
            return Err(Error::Shape("families must share their index set".into()));
        }
    }
    let summed: Vec<AdjointableOp> = (0..n)
        .map(|i| AdjointableOp::sum(perturbed.iter().map(|r| &r.ops()[i])))
        .collect::<Result<_>>()?;
    let system = OperatorFrameSystem::new(h, summed)?;
    let w = AdjointableOp::stack(system.ops())?;
    let tp = AdjointableOp::stack(families[p].ops())?;
    let l_residual = l.compose(&w)?.sub(&tp)?.op_norm();
    if l_residual > 1e-9 * tp.op_norm().max(1.0) {
        return Err(Error::Hypothesis(format!(
            "L(Σ_k R_k x) ≠ T_p x, residual {l_residual:e}"
        )));
    }
    let mut closeness: f64 = 0.0;
    let mut rng = random::rng(sampling.seed ^ 0xc0);
    for (t, r) in families.iter().zip(perturbed) {
        let diff = t.sub(r)?;
        for _ in 0..sampling.samples.max(1) {
            let x = random::gaussian_module_element(&mut rng, &h);
            let d = diff.quadratic_form(&x)?.op_norm();
            let m = t.quadratic_form(&x)?.op_norm();
            if d > 0.0 {
                closeness = closeness.max(if m > 0.0 { d / m } else { f64::INFINITY });
            }
        }
    }
    if closeness > lambda * (1.0 + 1e-9) + 1e-12 {
        return Err(Error::Hypothesis(format!(
            "closeness {closeness:e} exceeds λ = {lambda}"
        )));
    }
    let bounds: Vec<ScalarBounds> = families.iter().map(|f| f.optimal_scalar_bounds(tol)).collect();
    if !bounds[p].is_frame {
        return Err(Error::NotAFrame);
    }
    let l_norm = l.op_norm();
    let lower = bounds[p].lower / (l_norm * l_norm);
    let upper = ((1.0 + lambda.sqrt()) * bounds.iter().map(|b| b.upper.sqrt()).sum::<f64>()).powi(2);
    let report = system.verify_norm(lower, upper, tol, sampling)?;
    Ok(CombineReport {
        system,
        lower,
        upper,
        l_residual,
        closeness,
        report,
    })
}

/// {Λ_i ⊗ Γ_j}, i-major.
pub fn tensor_opframes(lambda: &OperatorFrameSystem, gamma: &OperatorFrameSystem) -> Result<OperatorFrameSystem> {
    let ops: Vec<AdjointableOp> = lambda
        .ops()
        .iter()
        .flat_map(|l| gamma.ops().iter().map(move |g| kron(l, g)))
        .collect();
    let module = ops[0].domain();
    OperatorFrameSystem::new(module, ops)
}

/// The tensor system with its (AC, BD) bounds for K₁ ⊗ K₂.
#[derive(Clone, Debug, PartialEq)]
pub struct TensorReport {
    pub system: OperatorFrameSystem,
    pub lower: f64,
    pub upper: f64,
    /// ∥S_{Λ⊗Γ} − S_Λ ⊗ S_Γ∥ entrywise.
    pub operator_residual: f64,
    pub report: VerificationReport,
}

pub fn verify_tensor_k(
    lambda: &OperatorFrameSystem,
    k1: &AdjointableOp,
    gamma: &OperatorFrameSystem,
    k2: &AdjointableOp,
    tol: &Tolerance,
) -> Result<TensorReport> {
    let lower_of = |f: &OperatorFrameSystem, k: &AdjointableOp| -> Result<f64> {
        match optimal_k_lower_bound(f.opframe_operator(), k, tol)? {
            Some(a) if a.is_finite() && a > 0.0 => Ok(a),
            _ => Err(Error::Hypothesis("factor is not a K-operator frame".into())),
        }
    };
    let (a, c) = (lower_of(lambda, k1)?, lower_of(gamma, k2)?);
    let b = lambda.opframe_operator().max_eigenvalue();
    let d = gamma.opframe_operator().max_eigenvalue();
    let system = tensor_opframes(lambda, gamma)?;
    let direct = kron(lambda.opframe_operator(), gamma.opframe_operator());
    let operator_residual = system.opframe_operator().max_abs_diff(&direct);
    // Guard the lower bound against rounding in the product of two optimal constants.
    let lower = a * c * (1.0 - 1e-12);
    let report = system.verify_opframe(&BoundsSpec::k(lower, b * d, kron(k1, k2)), tol, 0, 0)?;
    Ok(TensorReport {
        system,
        lower,
        upper: b * d,
        operator_residual,
        report,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TensorSide {
    /// Q ⊗ I.
    Left,
    /// I ⊗ Q.
    Right,
}

/// {Λ_i(Q* ⊗ I)} (or I ⊗ Q*) of a K-operator frame on H ⊗ K'.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjugatedOpFrame {
    pub system: OperatorFrameSystem,
    pub lower: f64,
    pub upper: f64,
    /// ∥S' − (Q⊗I)S(Q*⊗I)∥ entrywise.
    pub operator_residual: f64,
    pub report: VerificationReport,
}

pub fn conjugate_qxi(
    of: &OperatorFrameSystem,
    k: &AdjointableOp,
    q: &AdjointableOp,
    other: ModuleDescriptor,
    side: TensorSide,
    tol: &Tolerance,
) -> Result<ConjugatedOpFrame> {
    if !q.is_endomorphism() {
        return Err(Error::Shape("Q must be an endomorphism".into()));
    }
    let id = AdjointableOp::identity(other);
    let lifted = match side {
        TensorSide::Left => kron(q, &id),
        TensorSide::Right => kron(&id, q),
    };
    of.module().check_same(&lifted.domain())?;
    q.invert(tol)
        .map_err(|_| Error::Hypothesis("Q is not invertible".into()))?;
    let comm = k.compose(&lifted)?.sub(&lifted.compose(k)?)?.op_norm();
    if comm > 1e-9 * (k.op_norm() * lifted.op_norm()).max(1.0) {
        return Err(Error::Hypothesis(format!(
            "K does not commute with the lifted Q, residual {comm:e}"
        )));
    }
    let s = of.opframe_operator();
    let a = match optimal_k_lower_bound(s, k, tol)? {
        Some(a) if a.is_finite() && a > 0.0 => a,
        _ => return Err(Error::Hypothesis("not a K-operator frame".into())),
    };
    let b = s.max_eigenvalue();
    let system = of.right_compose(&lifted.adjoint())?;
    let expected = lifted.compose(s)?.compose(&lifted.adjoint())?;
    let operator_residual = system.opframe_operator().max_abs_diff(&expected);
    let margin = q.bounded_below_margin();
    let lower = margin * margin * a * (1.0 - 1e-12);
    let upper = q.op_norm().powi(2) * b;
    let report = system.verify_opframe(&BoundsSpec::k(lower, upper, k.clone()), tol, 0, 0)?;
    Ok(ConjugatedOpFrame {
        system,
        lower,
        upper,
        operator_residual,
        report,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct TransportedOpFrame {
    pub system: OperatorFrameSystem,
    pub bounds: BoundsSpec,
    pub report: VerificationReport,
    pub residuals: TransportResiduals,
    pub operator_residual: f64,
}

/// Move a K-operator frame across φ; the hypotheses θT_i = T_iθ, θT_i* = T_i*θ and
/// θK* = K*θ are sampled.
pub fn transport_opframe(
    of: &OperatorFrameSystem,
    bounds: &BoundsSpec,
    phi: &AlgebraMap,
    theta: &AlgebraMap,
    tol: &Tolerance,
    sampling: Sampling,
) -> Result<TransportedOpFrame> {
    let mut ops: Vec<AdjointableOp> = of.ops().to_vec();
    ops.extend(of.ops().iter().map(|op| op.adjoint()));
    if let Some(k) = &bounds.k_op {
        ops.push(k.adjoint());
    }
    let moved: Vec<AdjointableOp> = ops.iter().map(|op| phi.transport_op(op)).collect();
    let residuals = check_transport(&of.module(), phi, theta, &ops, &moved, sampling.samples, sampling.seed)?;
    let system = OperatorFrameSystem::new(of.module(), moved[..of.len()].to_vec())?;
    let operator_residual = intertwining_residual(
        &of.module(),
        phi,
        theta,
        of.opframe_operator(),
        system.opframe_operator(),
        sampling.samples,
        sampling.seed ^ 0x5eed,
    )?;
    let spec = transport_spec(bounds, phi)?;
    let report = system.verify_opframe(&spec, tol, sampling.samples, sampling.seed)?;
    Ok(TransportedOpFrame {
        system,
        bounds: spec,
        report,
        residuals,
        operator_residual,
    })
}

/// ∥K − Σ Λ_i*Γ_i∥.
pub fn dual_residual(lambda: &OperatorFrameSystem, gamma: &OperatorFrameSystem, k: &AdjointableOp) -> Result<f64> {
    if lambda.len() != gamma.len() {
        return Err(Error::Shape(format!(
            "{} operators against {}",
            lambda.len(),
            gamma.len()
        )));
    }
    let terms = lambda
        .ops()
        .iter()
        .zip(gamma.ops())
        .map(|(l, g)| l.adjoint().compose(g))
        .collect::<Result<Vec<_>>>()?;
    Ok(k.sub(&AdjointableOp::sum(&terms)?)?.op_norm())
}

/// Kx = Σ Λ_i*Γ_i x to 1e-9·max(1, ∥K∥).
pub fn is_dual_k_opframe(lambda: &OperatorFrameSystem, gamma: &OperatorFrameSystem, k: &AdjointableOp) -> Result<bool> {
    Ok(dual_residual(lambda, gamma, k)? <= 1e-9 * k.op_norm().max(1.0))
}

/// {Λ_i S⁻¹ K}.
pub fn canonical_dual_k_opframe(
    lambda: &OperatorFrameSystem,
    k: &AdjointableOp,
    tol: &Tolerance,
) -> Result<OperatorFrameSystem> {
    if !k.is_surjective(tol) {
        return Err(Error::Hypothesis("K is not surjective".into()));
    }
    let s = lambda.opframe_operator();
    if !optimal_bounds_of(s, tol).is_frame {
        return Err(Error::NotAFrame);
    }
    let inv = s.invert(tol).map_err(|_| Error::NotAFrame)?;
    lambda.right_compose(&inv.compose(k)?)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TensorDualReport {
    pub is_dual: bool,
    pub residual: f64,
}

/// Whether {Λ̃_i ⊗ Γ̃_j} is a dual of {Λ_i ⊗ Γ_j} for K ⊗ L.
pub fn tensor_duals(
    lambda: &OperatorFrameSystem,
    lambda_dual: &OperatorFrameSystem,
    gamma: &OperatorFrameSystem,
    gamma_dual: &OperatorFrameSystem,
    k: &AdjointableOp,
    l: &AdjointableOp,
) -> Result<TensorDualReport> {
    if !is_dual_k_opframe(lambda, lambda_dual, k)? {
        return Err(Error::Hypothesis("first factor is not a dual pair for K".into()));
    }
    if !is_dual_k_opframe(gamma, gamma_dual, l)? {
        return Err(Error::Hypothesis("second factor is not a dual pair for L".into()));
    }
    tensor_dual_residual(lambda, lambda_dual, gamma, gamma_dual, k, l)
}

/// Residual of the tensor duality without checking the factors first.
pub fn tensor_dual_residual(
    lambda: &OperatorFrameSystem,
    lambda_dual: &OperatorFrameSystem,
    gamma: &OperatorFrameSystem,
    gamma_dual: &OperatorFrameSystem,
    k: &AdjointableOp,
    l: &AdjointableOp,
) -> Result<TensorDualReport> {
    let big = tensor_opframes(lambda, gamma)?;
    let big_dual = tensor_opframes(lambda_dual, gamma_dual)?;
    let kl = kron(k, l);
    let residual = dual_residual(&big, &big_dual, &kl)?;
    Ok(TensorDualReport {
        is_dual: residual <= 1e-9 * kl.op_norm().max(1.0),
        residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::AlgebraDescriptor;
    use crate::frames::Verdict;
    use crate::linalg::C64;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    fn h() -> ModuleDescriptor {
        ModuleDescriptor::new(AlgebraDescriptor::full(2), 2)
    }

    fn random_opframe(module: ModuleDescriptor, seed: u64, n: usize) -> OperatorFrameSystem {
        let mut rng = random::rng(seed);
        let ops = (0..n)
            .map(|_| random::gaussian_op(&mut rng, &module, &module))
            .collect();
        OperatorFrameSystem::new(module, ops).unwrap()
    }

    #[test]
    fn scalar_multiples_of_identity() {
        let m = h();
        let ops = (1..=4)
            .map(|i| AdjointableOp::scalar(m, C64::new(1.0 / i as f64, 0.0)))
            .collect();
        let of = OperatorFrameSystem::new(m, ops).unwrap();
        let total: f64 = (1..=4).map(|i| 1.0 / (i * i) as f64).sum();
        let b = of.optimal_scalar_bounds(&tol());
        assert!(b.tight && (b.lower - total).abs() < 1e-12);
        assert!(of.as_gframe().gframe_operator().max_abs_diff(of.opframe_operator()) < 1e-12);
    }

    #[test]
    fn perturbation_bounds() {
        let of = random_opframe(h(), 1, 3);
        let nu = of.optimal_scalar_bounds(&tol()).lower;
        let r = random_opframe(h(), 2, 3);
        let scale = (nu / 4.0 / r.opframe_operator().max_eigenvalue()).sqrt();
        let r = r.scale_real(scale);
        let p = perturb_sum(&of, &r, &tol(), Sampling::default()).unwrap();
        assert!(p.plus_report.report.passed() && p.minus_report.report.passed());
        for sys in [&p.plus, &p.minus] {
            let b = sys.optimal_scalar_bounds(&tol());
            assert!(b.lower >= p.lower * (1.0 - 1e-9) && b.upper <= p.upper * (1.0 + 1e-9));
        }
        let big = r.scale_real(10.0);
        assert!(matches!(
            perturb_sum(&of, &big, &tol(), Sampling::default()),
            Err(Error::BesselBoundTooLarge { .. })
        ));
    }

    #[test]
    fn xi_for_self_and_scaled() {
        let of = random_opframe(h(), 3, 3);
        let same = xi_equivalence(&of, &of, &tol(), Sampling::default()).unwrap();
        assert!(same.certified && same.observed == 0.0);
        let twice = xi_equivalence(&of, &of.scale_real(2.0), &tol(), Sampling::default()).unwrap();
        assert!(twice.certified && twice.converse.unwrap().report.passed());
        let m = h();
        let zero = OperatorFrameSystem::new(m, vec![AdjointableOp::zero(m, m); 3]).unwrap();
        assert_eq!(
            xi_equivalence(&of, &zero, &tol(), Sampling::default()).unwrap().xi,
            None
        );
    }

    #[test]
    fn combining_padded_families() {
        let m = h();
        let a = random_opframe(m, 4, 2);
        let b = random_opframe(m, 5, 2);
        let z = AdjointableOp::zero(m, m);
        let t1 =
            OperatorFrameSystem::new(m, vec![a.ops()[0].clone(), a.ops()[1].clone(), z.clone(), z.clone()]).unwrap();
        let t2 = OperatorFrameSystem::new(m, vec![z.clone(), z, b.ops()[0].clone(), b.ops()[1].clone()]).unwrap();
        let big = ModuleDescriptor::new(m.algebra, 4 * m.rank);
        let keep: Vec<AlgebraElement> = (0..big.rank)
            .map(|c| {
                if c < 2 * m.rank {
                    AlgebraElement::identity(m.algebra)
                } else {
                    AlgebraElement::zero(m.algebra)
                }
            })
            .collect();
        let l = AdjointableOp::diagonal_coeffs(big, &keep).unwrap();
        let rep = combine_families(
            &[t1.clone(), t2.clone()],
            &[t1, t2],
            &l,
            0,
            0.0,
            &tol(),
            Sampling::default(),
        )
        .unwrap();
        assert!(rep.report.report.passed());
    }

    #[test]
    fn tensor_operator_is_kronecker() {
        let a = random_opframe(h(), 6, 2);
        let m2 = ModuleDescriptor::new(AlgebraDescriptor::diagonal(2), 1);
        let b = random_opframe(m2, 7, 2);
        let ida = AdjointableOp::identity(a.module());
        let idb = AdjointableOp::identity(b.module());
        let rep = verify_tensor_k(&a, &ida, &b, &idb, &tol()).unwrap();
        assert!(rep.operator_residual < 1e-12);
        assert_eq!(rep.report.verdict, Verdict::Proved);
    }

    #[test]
    fn conjugation_by_two() {
        let a = random_opframe(h(), 8, 2);
        let m2 = ModuleDescriptor::new(AlgebraDescriptor::full(1), 2);
        let b = random_opframe(m2, 9, 2);
        let of = tensor_opframes(&a, &b).unwrap();
        let k = AdjointableOp::identity(of.module());
        let q = AdjointableOp::scalar(h(), C64::new(2.0, 0.0));
        {
            let rep = conjugate_qxi(&of, &k, &q, m2, TensorSide::Left, &tol()).unwrap();
            assert!(rep.operator_residual < 1e-12);
            assert!(
                rep.system
                    .opframe_operator()
                    .max_abs_diff(&of.opframe_operator().scale_real(4.0))
                    < 1e-12
            );
            assert_eq!(rep.report.verdict, Verdict::Proved);
        }
    }

    #[test]
    fn canonical_k_dual() {
        let of = random_opframe(h(), 10, 3);
        let mut rng = random::rng(11);
        let k = random::gaussian_op(&mut rng, &h(), &h());
        let dual = canonical_dual_k_opframe(&of, &k, &tol()).unwrap();
        assert!(is_dual_k_opframe(&of, &dual, &k).unwrap());
        let zero = OperatorFrameSystem::new(h(), vec![AdjointableOp::zero(h(), h()); 3]).unwrap();
        assert!(!is_dual_k_opframe(&of, &zero, &k).unwrap());
        let s = of.opframe_operator().clone();
        assert!(is_dual_k_opframe(&of, &of, &s).unwrap());
    }

    #[test]
    fn tensor_of_canonical_duals() {
        let a = random_opframe(h(), 12, 2);
        let m2 = ModuleDescriptor::new(AlgebraDescriptor::diagonal(2), 2);
        let b = random_opframe(m2, 13, 2);
        let ka = AdjointableOp::identity(a.module());
        let kb = AdjointableOp::identity(b.module());
        let da = canonical_dual_k_opframe(&a, &ka, &tol()).unwrap();
        let db = canonical_dual_k_opframe(&b, &kb, &tol()).unwrap();
        assert!(tensor_duals(&a, &da, &b, &db, &ka, &kb).unwrap().is_dual);
        let bad = tensor_dual_residual(&a, &da, &b, &b, &ka, &kb).unwrap();
        assert!(!bad.is_dual && bad.residual > 1e-6);
    }
}
