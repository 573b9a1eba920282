//! Decision procedures for frame inequalities Σ⟨Λ_i x, Λ_i x⟩ = ⟨Sx, x⟩ against bounds.

use nalgebra::DVector;
use rand::Rng;

use crate::algebra::{AlgebraElement, AlgebraKind, Tolerance};
use crate::error::{Error, Result};
use crate::linalg::{self, C64};
use crate::module::{ModuleDescriptor, ModuleElement};
use crate::operators::AdjointableOp;
use crate::random;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundsMode {
    /// A⟨x,x⟩ ≤ ⟨Sx,x⟩ ≤ B⟨x,x⟩ with real A, B.
    Plain,
    /// A⟨x,x⟩A* ≤ ⟨Sx,x⟩ ≤ B⟨x,x⟩B* with algebra elements A, B.
    Star,
    /// A⟨K*x,K*x⟩ ≤ ⟨Sx,x⟩ ≤ B⟨x,x⟩ with real A, B.
    K,
    /// A⟨K*x,K*x⟩A* ≤ ⟨Sx,x⟩ ≤ B⟨x,x⟩B* with algebra elements A, B.
    StarK,
}

impl BoundsMode {
    pub fn is_star(self) -> bool {
        matches!(self, BoundsMode::Star | BoundsMode::StarK)
    }

    pub fn uses_k(self) -> bool {
        matches!(self, BoundsMode::K | BoundsMode::StarK)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Scalar(f64),
    Element(AlgebraElement),
}

impl Bound {
    pub fn as_scalar(&self) -> Option<f64> {
        match self {
            Bound::Scalar(c) => Some(*c),
            Bound::Element(_) => None,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundsSpec {
    pub mode: BoundsMode,
    pub lower: Bound,
    pub upper: Bound,
    pub k_op: Option<AdjointableOp>,
}

impl BoundsSpec {
    pub fn plain(lower: f64, upper: f64) -> Self {
        Self {
            mode: BoundsMode::Plain,
            lower: Bound::Scalar(lower),
            upper: Bound::Scalar(upper),
            k_op: None,
        }
    }

    pub fn k(lower: f64, upper: f64, k_op: AdjointableOp) -> Self {
        Self {
            mode: BoundsMode::K,
            lower: Bound::Scalar(lower),
            upper: Bound::Scalar(upper),
            k_op: Some(k_op),
        }
    }

    pub fn star(lower: AlgebraElement, upper: AlgebraElement) -> Self {
        Self {
            mode: BoundsMode::Star,
            lower: Bound::Element(lower),
            upper: Bound::Element(upper),
            k_op: None,
        }
    }

    pub fn star_k(lower: AlgebraElement, upper: AlgebraElement, k_op: AdjointableOp) -> Self {
        Self {
            mode: BoundsMode::StarK,
            lower: Bound::Element(lower),
            upper: Bound::Element(upper),
            k_op: Some(k_op),
        }
    }

    /// Check the spec against the module it will be applied to.
    pub fn validate(&self, module: &ModuleDescriptor, tol: &Tolerance) -> Result<()> {
        match (&self.lower, &self.upper) {
            (Bound::Scalar(a), Bound::Scalar(b)) if !self.mode.is_star() => {
                if !(a.is_finite() && b.is_finite() && *a > 0.0 && *b > 0.0) {
                    return Err(Error::InvalidBounds(format!(
                        "bounds must be positive reals, got ({a}, {b})"
                    )));
                }
            }
            (Bound::Element(a), Bound::Element(b)) if self.mode.is_star() => {
                module.algebra.check_same(&a.algebra())?;
                module.algebra.check_same(&b.algebra())?;
                if !a.is_invertible(tol) || !b.is_invertible(tol) {
                    return Err(Error::BoundNotStrictlyNonzero);
                }
            }
            _ => {
                return Err(Error::InvalidBounds(format!(
                    "{:?} mode needs {} bounds",
                    self.mode,
                    if self.mode.is_star() { "algebra-element" } else { "real" }
                )))
            }
        }
        match (&self.k_op, self.mode.uses_k()) {
            (Some(k), true) => {
                if k.domain() != *module || k.codomain() != *module {
                    return Err(Error::ModuleMismatch(format!(
                        "K maps {} → {}, expected an operator on {module}",
                        k.domain(),
                        k.codomain()
                    )));
                }
            }
            (None, true) => return Err(Error::InvalidBounds(format!("{:?} mode needs k_op", self.mode))),
            (Some(_), false) => return Err(Error::InvalidBounds(format!("{:?} mode takes no k_op", self.mode))),
            (None, false) => {}
        }
        Ok(())
    }
}

/// Sample budget and seed for the sampled verification paths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Sampling {
    pub samples: usize,
    pub seed: u64,
}

impl Default for Sampling {
    fn default() -> Self {
        Self { samples: 200, seed: 0 }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Proved,
    SampledPass,
    Falsified,
}

impl Verdict {
    pub fn passed(self) -> bool {
        !matches!(self, Verdict::Falsified)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BoundSide {
    Lower,
    Upper,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub verdict: Verdict,
    /// Least eigenvalue of the two difference operators (or sampled elements), divided by the scale.
    pub margin: f64,
    pub witness: Option<ModuleElement>,
    /// Which inequality failed, when Falsified.
    pub failed_side: Option<BoundSide>,
    pub samples_used: usize,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.verdict.passed()
    }
}

/// Optimal scalar bounds from the spectrum of a positive operator.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarBounds {
    pub lower: f64,
    pub upper: f64,
    pub is_frame: bool,
    pub tight: bool,
}

pub fn optimal_bounds_of(s: &AdjointableOp, tol: &Tolerance) -> ScalarBounds {
    let spec = s.spectrum();
    let lo = spec.first().copied().unwrap_or(0.0);
    let hi = spec.last().copied().unwrap_or(0.0).max(0.0);
    let is_frame = hi > 0.0 && lo > tol.rank_rel * hi;
    let lower = if is_frame { lo } else { 0.0 };
    ScalarBounds {
        lower,
        upper: hi,
        is_frame,
        tight: is_frame && (hi - lo).abs() <= 1e-9 * hi,
    }
}

/// Per-slot optimal *-bounds of a positive operator over D_n: slot s gets (√λ_min, √λ_max).
pub fn optimal_star_bounds_diagonal(s: &AdjointableOp) -> Result<(AlgebraElement, AlgebraElement)> {
    if s.algebra().kind != AlgebraKind::Diagonal {
        return Err(Error::InvalidBounds("per-slot bounds need a diagonal algebra".into()));
    }
    let (mut lo, mut hi) = (Vec::new(), Vec::new());
    for b in s.blocks() {
        let ev = linalg::herm_eigenvalues(b);
        lo.push(ev.first().copied().unwrap_or(0.0).max(0.0).sqrt());
        hi.push(ev.last().copied().unwrap_or(0.0).max(0.0).sqrt());
    }
    Ok((AlgebraElement::diagonal_real(&lo), AlgebraElement::diagonal_real(&hi)))
}

/// Largest C with C·KK* ≤ S, i.e. 1/α² for the minimal α with KK* ≤ α²S.
pub fn optimal_k_lower_bound(s: &AdjointableOp, k: &AdjointableOp, tol: &Tolerance) -> Result<Option<f64>> {
    let root = s.sqrt_psd(tol)?;
    Ok(crate::operators::range_inclusion(k, &root, tol)?.map(|alpha| {
        if alpha == 0.0 {
            f64::INFINITY
        } else {
            1.0 / (alpha * alpha)
        }
    }))
}

/// Decide `spec` for the positive operator `s` (the frame, g-frame or operator-frame operator).
pub fn verify_operator(
    s: &AdjointableOp,
    spec: &BoundsSpec,
    tol: &Tolerance,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    verify_operator_on(s, spec, tol, samples, seed, None)
}

/// As [`verify_operator`], restricted to x in the range of the orthogonal projection `compression`.
pub fn verify_operator_on(
    s: &AdjointableOp,
    spec: &BoundsSpec,
    tol: &Tolerance,
    samples: usize,
    seed: u64,
    compression: Option<&AdjointableOp>,
) -> Result<VerificationReport> {
    let module = s.domain();
    if !s.is_endomorphism() {
        return Err(Error::Shape("frame operator must be an endomorphism".into()));
    }
    spec.validate(&module, tol)?;
    let gram = match &spec.k_op {
        Some(k) => k.compose(&k.adjoint())?,
        None => AdjointableOp::identity(module),
    };
    let id = AdjointableOp::identity(module);
    match (&spec.lower, &spec.upper) {
        (Bound::Scalar(a), Bound::Scalar(b)) => {
            exact_check(s, &gram.scale_real(*a), &id.scale_real(*b), tol, compression)
        }
        (Bound::Element(a), Bound::Element(b)) => match module.algebra.kind {
            AlgebraKind::Diagonal => {
                let wa: Vec<f64> = a.diagonal_entries().iter().map(|z| z.norm_sqr()).collect();
                let wb: Vec<f64> = b.diagonal_entries().iter().map(|z| z.norm_sqr()).collect();
                exact_check(s, &gram.slot_weighted(&wa)?, &id.slot_weighted(&wb)?, tol, compression)
            }
            AlgebraKind::Full => {
                let central = 1e-12;
                if a.is_central(central) && b.is_central(central) {
                    let ca = (a.trace() / a.algebra().n as f64).norm_sqr();
                    let cb = (b.trace() / b.algebra().n as f64).norm_sqr();
                    exact_check(s, &gram.scale_real(ca), &id.scale_real(cb), tol, compression)
                } else {
                    if compression.is_some() {
                        return Err(Error::InvalidBounds("compressed checks take real bounds".into()));
                    }
                    sampled_star_check(s, a, b, spec.k_op.as_ref(), &gram, tol, samples, seed)
                }
            }
        },
        _ => unreachable!("validated"),
    }
}

fn exact_check(
    s: &AdjointableOp,
    lower: &AdjointableOp,
    upper: &AdjointableOp,
    tol: &Tolerance,
    compression: Option<&AdjointableOp>,
) -> Result<VerificationReport> {
    let mut d_low = s.sub(lower)?;
    let mut d_up = upper.sub(s)?;
    if let Some(p) = compression {
        d_low = p.compose(&d_low)?.compose(p)?;
        d_up = p.compose(&d_up)?.compose(p)?;
    }
    let scale = 1f64.max(s.op_norm()).max(lower.op_norm()).max(upper.op_norm());
    let (low_val, low_dir) = d_low.lowest_direction();
    let (up_val, up_dir) = d_up.lowest_direction();
    let margin = low_val.min(up_val) / scale;
    let eps = tol.psd_rel * scale;
    let skew_ok = d_low.hermitian_defect() <= eps && d_up.hermitian_defect() <= eps;
    let (verdict, witness, side) = if low_val < -eps || !skew_ok && low_val <= up_val {
        (Verdict::Falsified, Some(low_dir), Some(BoundSide::Lower))
    } else if up_val < -eps || !skew_ok {
        (Verdict::Falsified, Some(up_dir), Some(BoundSide::Upper))
    } else {
        (Verdict::Proved, None, None)
    };
    Ok(VerificationReport {
        verdict,
        margin,
        witness,
        failed_side: side,
        samples_used: 0,
    })
}

/// Sampled check of A⟨G x⟩A* ≤ ⟨Sx,x⟩ ≤ B⟨x,x⟩B* over a full matrix algebra.
#[allow(clippy::too_many_arguments)]
fn sampled_star_check(
    s: &AdjointableOp,
    a: &AlgebraElement,
    b: &AlgebraElement,
    k_op: Option<&AdjointableOp>,
    gram: &AdjointableOp,
    tol: &Tolerance,
    samples: usize,
    seed: u64,
) -> Result<VerificationReport> {
    let module = s.domain();
    let mut candidates = structured_candidates(&module, s, gram);
    let mut rng = random::rng(seed);
    for _ in 0..samples {
        candidates.push(random::gaussian_module_element(&mut rng, &module));
    }
    let mut margin = f64::INFINITY;
    for (used, x) in candidates.iter().enumerate() {
        let (low_gap, up_gap, scale) = star_gaps(s, a, b, k_op, x)?;
        let eps = tol.psd_rel * scale;
        margin = margin.min(low_gap.min(up_gap) / scale);
        if low_gap < -eps || up_gap < -eps {
            let side = if low_gap <= up_gap {
                BoundSide::Lower
            } else {
                BoundSide::Upper
            };
            return Ok(VerificationReport {
                verdict: Verdict::Falsified,
                margin,
                witness: Some(x.clone()),
                failed_side: Some(side),
                samples_used: used + 1,
            });
        }
    }
    Ok(VerificationReport {
        verdict: Verdict::SampledPass,
        margin,
        witness: None,
        failed_side: None,
        samples_used: candidates.len(),
    })
}

/// Smallest eigenvalues of ⟨Sx,x⟩ − A g A* and B⟨x,x⟩B* − ⟨Sx,x⟩, plus the comparison scale.
fn star_gaps(
    s: &AdjointableOp,
    a: &AlgebraElement,
    b: &AlgebraElement,
    k_op: Option<&AdjointableOp>,
    x: &ModuleElement,
) -> Result<(f64, f64, f64)> {
    let mid = s.apply(x)?.inner(x)?;
    let g = match k_op {
        Some(k) => {
            let y = k.adjoint().apply(x)?;
            y.inner(&y)?
        }
        None => x.inner(x)?,
    };
    let low = &(a * &g) * &a.adjoint();
    let up = &(b * &x.inner(x)?) * &b.adjoint();
    let scale = 1f64.max(mid.op_norm()).max(low.op_norm()).max(up.op_norm());
    let low_gap = positivity_gap(&(&mid - &low));
    let up_gap = positivity_gap(&(&up - &mid));
    Ok((low_gap, up_gap, scale))
}

/// min(λ_min of the Hermitian part, −∥e − e*∥): negative exactly when e fails to be positive.
fn positivity_gap(e: &AlgebraElement) -> f64 {
    let skew = e.max_abs_diff(&e.adjoint());
    let low = linalg::herm_eigenvalues(&e.to_matrix()).first().copied().unwrap_or(0.0);
    low.min(-skew)
}

/// Rank-one elements x with rows w_r·z: they expose non-central bounds, since then
/// ⟨x,x⟩ = |z|² w w* while A⟨x,x⟩A* is supported on Aw.
fn structured_candidates(module: &ModuleDescriptor, s: &AdjointableOp, gram: &AdjointableOp) -> Vec<ModuleElement> {
    let n = module.algebra.n;
    let mut ws: Vec<DVector<C64>> = Vec::new();
    for r in 0..n {
        ws.push(DVector::from_fn(n, |i, _| {
            if i == r {
                C64::new(1.0, 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }));
    }
    for r in 0..n {
        for q in r + 1..n {
            ws.push(DVector::from_fn(n, |i, _| match i {
                i if i == r => C64::new(1.0, 0.0),
                i if i == q => C64::new(1.0, 0.0),
                _ => C64::new(0.0, 0.0),
            }));
            ws.push(DVector::from_fn(n, |i, _| match i {
                i if i == r => C64::new(1.0, 0.0),
                i if i == q => C64::new(0.0, 1.0),
                _ => C64::new(0.0, 0.0),
            }));
        }
    }
    let mut zs: Vec<DVector<C64>> = Vec::new();
    for op in [s, gram] {
        let (vals, vecs) = linalg::herm_eig(&op.blocks()[0]);
        if !vals.is_empty() {
            zs.push(vecs.column(vals.len() - 1).into_owned());
        }
    }
    let mut out = Vec::new();
    for z in &zs {
        for w in &ws {
            let rows: Vec<DVector<C64>> = (0..n).map(|r| z * w[r]).collect();
            out.push(ModuleElement::from_rows(*module, &rows));
        }
    }
    out
}

/// True when the inequality named by `spec` fails at `x` by more than the tolerance.
pub fn witness_violates(s: &AdjointableOp, spec: &BoundsSpec, x: &ModuleElement, tol: &Tolerance) -> Result<bool> {
    let module = s.domain();
    let one = |m: &ModuleDescriptor| AlgebraElement::identity(m.algebra);
    let (a, b) = match (&spec.lower, &spec.upper) {
        (Bound::Scalar(a), Bound::Scalar(b)) => (one(&module).scale_real(a.sqrt()), one(&module).scale_real(b.sqrt())),
        (Bound::Element(a), Bound::Element(b)) => (a.clone(), b.clone()),
        _ => return Err(Error::InvalidBounds("mixed bound kinds".into())),
    };
    let (low_gap, up_gap, scale) = star_gaps(s, &a, &b, spec.k_op.as_ref(), x)?;
    let eps = tol.psd_rel * scale;
    Ok(low_gap < -eps || up_gap < -eps)
}

/// Exact check ⟨Sx,x⟩ ≤ B⟨x,x⟩ (Bessel condition) with B ≥ 0.
pub fn verify_bessel(s: &AdjointableOp, upper: f64, tol: &Tolerance) -> Result<VerificationReport> {
    if !(upper.is_finite() && upper >= 0.0) {
        return Err(Error::InvalidBounds(format!(
            "Bessel bound must be a non-negative real, got {upper}"
        )));
    }
    let id = AdjointableOp::identity(s.domain());
    let d = id.scale_real(upper).sub(s)?;
    let scale = 1f64.max(s.op_norm()).max(upper);
    let (val, dir) = d.lowest_direction();
    let eps = tol.psd_rel * scale;
    let ok = val >= -eps && d.hermitian_defect() <= eps;
    Ok(VerificationReport {
        verdict: if ok { Verdict::Proved } else { Verdict::Falsified },
        margin: val / scale,
        witness: if ok { None } else { Some(dir) },
        failed_side: if ok { None } else { Some(BoundSide::Upper) },
        samples_used: 0,
    })
}

/// Outcome of a sampled norm-form check A∥x∥² ≤ ∥q(x)∥ ≤ B∥x∥².
#[derive(Clone, Debug, PartialEq)]
pub struct NormReport {
    pub report: VerificationReport,
    pub min_ratio: f64,
    pub max_ratio: f64,
}

/// Sample the norm inequality for the quadratic map `q` (typically x ↦ Σ⟨Λ_i x, Λ_i x⟩).
pub fn verify_norm_sampled(
    module: &ModuleDescriptor,
    q: impl Fn(&ModuleElement) -> Result<AlgebraElement>,
    a: f64,
    b: f64,
    tol: &Tolerance,
    samples: usize,
    seed: u64,
) -> Result<NormReport> {
    if !(a.is_finite() && b.is_finite() && a >= 0.0 && b > 0.0) {
        return Err(Error::InvalidBounds(format!(
            "norm bounds must be positive reals, got ({a}, {b})"
        )));
    }
    let mut rng = random::rng(seed);
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    let mut margin = f64::INFINITY;
    let scale = b.max(1.0);
    for used in 0..samples {
        let mut x = random::gaussian_module_element(&mut rng, module);
        // vary the profile of ⟨x,x⟩ so that small-norm rows are explored too
        if used % 2 == 1 {
            let weights: Vec<C64> = (0..module.algebra.n)
                .map(|_| C64::new(rng.random_range(0.0..1.0f64).powi(3), 0.0))
                .collect();
            let rows: Vec<DVector<C64>> = x.rows().iter().zip(&weights).map(|(r, w)| r * *w).collect();
            x = ModuleElement::from_rows(*module, &rows);
        }
        let nx = x.norm();
        if nx == 0.0 {
            continue;
        }
        let ratio = q(&x)?.op_norm() / (nx * nx);
        lo = lo.min(ratio);
        hi = hi.max(ratio);
        margin = margin.min((ratio - a).min(b - ratio) / scale);
        if ratio < a - tol.psd_rel * scale || ratio > b + tol.psd_rel * scale {
            let side = if ratio < a { BoundSide::Lower } else { BoundSide::Upper };
            return Ok(NormReport {
                report: VerificationReport {
                    verdict: Verdict::Falsified,
                    margin,
                    witness: Some(x),
                    failed_side: Some(side),
                    samples_used: used + 1,
                },
                min_ratio: lo,
                max_ratio: hi,
            });
        }
    }
    Ok(NormReport {
        report: VerificationReport {
            verdict: Verdict::SampledPass,
            margin,
            witness: None,
            failed_side: None,
            samples_used: samples,
        },
        min_ratio: lo,
        max_ratio: hi,
    })
}
