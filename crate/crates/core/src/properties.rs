//! Executable property suite: every structural identity and inequality, run on
//! seeded random instances. Shared by the integration tests, the acceptance runner and the
//! command-line self test.

use nalgebra::DMatrix;
use rand::Rng;

use crate::algebra::{AlgebraDescriptor, AlgebraElement, AlgebraKind, Tolerance};
use crate::error::Result;
use crate::frames::{optimal_k_lower_bound, optimal_star_bounds_diagonal, BoundsSpec, Sampling, Verdict};
use crate::gframes::{
    compose_bessel, kg_coisometry, kg_from_factorization, kg_restrict, kg_transfer, left_compose, mixed_operator,
    star_bounds_from_mixed, star_kg_corollary, star_kg_from_gframe, transport_gframe, GFrameSystem,
};
use crate::linalg::{CMat, C64};
use crate::module::{ModuleDescriptor, ModuleElement};
use crate::operators::{kron, AdjointableOp};
use crate::opframes::{
    canonical_dual_k_opframe, combine_families, conjugate_qxi, is_dual_k_opframe, perturb_sum, tensor_duals,
    tensor_opframes, transport_opframe, verify_tensor_k, xi_equivalence, OperatorFrameSystem, TensorSide,
};
use crate::random::{self, Rng64};
use crate::transport::AlgebraMap;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Config {
    pub seed: u64,
    /// Run about a tenth of the cases.
    pub quick: bool,
}

impl Config {
    pub fn count(&self, full: usize) -> usize {
        if self.quick {
            (full / 10).max(3)
        } else {
            full
        }
    }

    fn rng(&self, salt: u64) -> Rng64 {
        random::rng(self.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
    }
}

/// Running count of cases, failures and the largest observed residual.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Tally {
    pub cases: usize,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub worst: f64,
}

impl Tally {
    fn case(&mut self, ok: bool, msg: impl FnOnce() -> String) {
        self.cases += 1;
        if !ok {
            self.failures += 1;
            if self.first_failure.is_none() {
                self.first_failure = Some(msg());
            }
        }
    }

    fn observe(&mut self, v: f64) {
        if v.is_nan() {
            self.worst = f64::NAN;
        } else if !self.worst.is_nan() {
            self.worst = self.worst.max(v);
        }
    }

    /// Record a residual and fail the case when it exceeds `limit`.
    fn bound(&mut self, residual: f64, limit: f64, what: &str) {
        self.observe(residual);
        self.case(residual <= limit, || format!("{what}: {residual:e} > {limit:e}"));
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub name: &'static str,
    pub area: &'static str,
    pub passed: bool,
    pub cases: usize,
    pub worst: f64,
    pub detail: String,
}

pub struct Property {
    pub name: &'static str,
    pub area: &'static str,
    pub run: fn(&Config) -> Result<Tally>,
}

impl Property {
    pub fn check(&self, cfg: &Config) -> Outcome {
        match (self.run)(cfg) {
            Ok(t) => Outcome {
                name: self.name,
                area: self.area,
                passed: t.failures == 0 && t.cases > 0,
                cases: t.cases,
                worst: t.worst,
                detail: t.first_failure.unwrap_or_default(),
            },
            Err(e) => Outcome {
                name: self.name,
                area: self.area,
                passed: false,
                cases: 0,
                worst: f64::NAN,
                detail: format!("error: {e}"),
            },
        }
    }
}

macro_rules! props {
    ($( $area:literal, $name:literal => $f:ident ),* $(,)?) => {
        vec![$( Property { name: $name, area: $area, run: $f } ),*]
    };
}

pub fn all() -> Vec<Property> {
    props![
        "algebra", "c-star identity" => c_star_identity,
        "algebra", "involution laws" => involution_laws,
        "algebra", "loewner transitivity" => loewner_transitivity,
        "algebra", "square root round trip" => sqrt_round_trip,
        "module", "cauchy-schwarz" => cauchy_schwarz,
        "module", "inner product positivity" => inner_positivity,
        "module", "scalarization faithfulness" => scalarization,
        "operators", "paschke bound" => paschke_bound,
        "operators", "bounded-below sandwich" => bounded_below_sandwich,
        "operators", "surjectivity equivalence" => surjectivity_equivalence,
        "operators", "positivity oracle" => positivity_oracle,
        "operators", "penrose identities" => penrose_identities,
        "frames", "analysis norm bound" => analysis_norm_bound,
        "frames", "optimal bound tightness" => optimal_bound_tightness,
        "frames", "dual reciprocity" => frame_dual_reciprocity,
        "frames", "reconstruction" => frame_reconstruction,
        "frames", "star containment" => frame_star_containment,
        "frames", "k-frame surjectivity" => k_frame_surjectivity,
        "frames", "norm characterization" => norm_characterization,
        "gframes", "dual bounds" => gframe_dual_bounds,
        "gframes", "synthesis characterization" => synthesis_characterization,
        "gframes", "range projection" => range_projection,
        "gframes", "surjective synthesis star bounds" => surjective_synthesis,
        "gframes", "mixed operator star bounds" => mixed_operator_bounds,
        "gframes", "k-g invertibility" => kg_invertibility,
        "gframes", "star-k specialization" => star_k_specialization,
        "gframes", "bessel composition" => bessel_composition,
        "gframes", "left composition" => left_composition,
        "gframes", "transport" => gframe_transport,
        "gframes", "k-g transfer" => kg_transfer_property,
        "gframes", "k-g restriction" => kg_restriction,
        "gframes", "co-isometry" => coisometry,
        "gframes", "factorization" => factorization,
        "gframes", "star-k-g operator" => star_kg_operator,
        "opframes", "star containment" => opframe_star_containment,
        "opframes", "operator frames are k-frames" => opframe_k_remark,
        "opframes", "tensor operator identity" => tensor_identity,
        "opframes", "tensor k bounds" => tensor_k_bounds,
        "opframes", "perturbation soundness" => perturbation_soundness,
        "opframes", "xi equivalence" => xi_property,
        "opframes", "family combination" => family_combination,
        "opframes", "tensor conjugation" => tensor_conjugation,
        "opframes", "transport" => opframe_transport,
        "opframes", "k-dual composition" => k_dual_composition,
        "opframes", "tensor duals" => tensor_dual_property,
    ]
}

/// Look a property up by `area/name` or bare name.
pub fn find(key: &str) -> Option<Property> {
    all()
        .into_iter()
        .find(|p| key == p.name || key == format!("{}/{}", p.area, p.name))
}

pub fn run_all(cfg: &Config) -> Vec<Outcome> {
    all().iter().map(|p| p.check(cfg)).collect()
}

fn tol() -> Tolerance {
    Tolerance::default()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1.0)
}

fn small_module(rng: &mut Rng64) -> ModuleDescriptor {
    random::random_module(rng, 3)
}

/// Module with algebra dimension ≤ 2 and rank ≤ 2, for tensor products.
fn tiny_module(rng: &mut Rng64) -> ModuleDescriptor {
    let n = rng.random_range(1..=2);
    let alg = if rng.random_bool(0.5) {
        AlgebraDescriptor::full(n)
    } else {
        AlgebraDescriptor::diagonal(n)
    };
    ModuleDescriptor::new(alg, rng.random_range(1..=2))
}

fn invertible_op(rng: &mut Rng64, module: &ModuleDescriptor) -> AdjointableOp {
    // A Gaussian shifted away from singularity.
    let g = random::gaussian_op(rng, module, module);
    let shift = g.op_norm() + 0.5;
    g.add(&AdjointableOp::scalar(*module, C64::new(shift, 0.0)))
        .expect("same module")
}

// ---------------------------------------------------------------- algebra

fn c_star_identity(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(1);
    let mut t = Tally::default();
    for _ in 0..cfg.count(200) {
        let alg = random::random_algebra(&mut rng);
        let a = random::gaussian_element(&mut rng, alg);
        let n = a.op_norm();
        t.bound(
            ((&a.adjoint() * &a).op_norm() - n * n).abs(),
            1e-9 * n * n,
            "∥a*a∥ − ∥a∥²",
        );
    }
    Ok(t)
}

fn involution_laws(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(2);
    let mut t = Tally::default();
    for _ in 0..cfg.count(200) {
        let alg = random::random_algebra(&mut rng);
        let a = random::gaussian_element(&mut rng, alg);
        let b = random::gaussian_element(&mut rng, alg);
        let alpha = random::complex_gaussian(&mut rng);
        let d1 = (&a * &b).adjoint().max_abs_diff(&(&b.adjoint() * &a.adjoint()));
        let lhs = (&a.scale(alpha) + &b).adjoint();
        let rhs = &a.adjoint().scale(alpha.conj()) + &b.adjoint();
        t.bound(d1.max(lhs.max_abs_diff(&rhs)), 1e-12, "involution");
    }
    Ok(t)
}

fn loewner_transitivity(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(3);
    let mut t = Tally::default();
    let wide = tol().scaled(2.0);
    for i in 0..cfg.count(200) {
        let alg = random::random_algebra(&mut rng);
        let (a, b, c) = if i % 2 == 0 {
            let a = random::gaussian_psd_element(&mut rng, alg);
            let b = &a + &random::gaussian_psd_element(&mut rng, alg);
            let c = &b + &random::gaussian_psd_element(&mut rng, alg);
            (a, b, c)
        } else {
            let h = |rng: &mut Rng64| {
                let g = random::gaussian_element(rng, alg);
                (&g + &g.adjoint()).scale_real(0.5)
            };
            (h(&mut rng), h(&mut rng), h(&mut rng))
        };
        let premise = a.loewner_leq(&b, &tol())? && b.loewner_leq(&c, &tol())?;
        let ok = !premise || a.loewner_leq(&c, &wide)?;
        t.case(ok, || "a ≤ b ≤ c but not a ≤ c".into());
    }
    Ok(t)
}

fn sqrt_round_trip(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(4);
    let mut t = Tally::default();
    for _ in 0..cfg.count(100) {
        let alg = random::random_algebra(&mut rng);
        let a = random::gaussian_psd_element(&mut rng, alg);
        let s = a.sqrt_psd(&tol())?;
        t.bound((&s * &s).max_abs_diff(&a), 1e-9 * a.op_norm().max(1.0), "√a² − a");
    }
    Ok(t)
}

// ---------------------------------------------------------------- module

fn cauchy_schwarz(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(5);
    let mut t = Tally::default();
    for _ in 0..cfg.count(200) {
        let m = small_module(&mut rng);
        let x = random::gaussian_module_element(&mut rng, &m);
        let y = random::gaussian_module_element(&mut rng, &m);
        let excess = x.inner(&y)?.op_norm() - x.norm() * y.norm();
        t.bound(excess, 1e-9, "∥⟨x,y⟩∥ − ∥x∥∥y∥");
    }
    Ok(t)
}

fn inner_positivity(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(6);
    let mut t = Tally::default();
    for _ in 0..cfg.count(200) {
        let m = small_module(&mut rng);
        let x = random::gaussian_module_element(&mut rng, &m);
        t.case(x.inner(&x)?.is_positive(&tol()), || "⟨x,x⟩ not positive".into());
    }
    Ok(t)
}

fn scalarization(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(7);
    let mut t = Tally::default();
    for _ in 0..cfg.count(100) {
        let m = small_module(&mut rng);
        let x = random::gaussian_module_element(&mut rng, &m);
        let gram = x.inner(&x)?.to_matrix();
        let n = m.algebra.n;
        let directions: Vec<nalgebra::DVector<C64>> = match m.algebra.kind {
            AlgebraKind::Diagonal => (0..n)
                .map(|s| nalgebra::DVector::from_fn(n, |i, _| C64::new(if i == s { 1.0 } else { 0.0 }, 0.0)))
                .collect(),
            AlgebraKind::Full => {
                let v = nalgebra::DVector::from_fn(n, |_, _| random::complex_gaussian(&mut rng));
                let v = &v / C64::new(v.norm(), 0.0);
                vec![v]
            }
        };
        for xi in directions {
            let p = AlgebraElement::from_matrix(m.algebra, &(&xi * xi.adjoint()));
            let xp = x.act(&p)?;
            let lhs = xp.inner(&xp)?.trace();
            let rhs = (xi.adjoint() * &gram * &xi)[(0, 0)];
            t.bound((lhs - rhs).norm(), 1e-10 * gram.norm().max(1.0), "tr⟨xp,xp⟩ − ξ*⟨x,x⟩ξ");
        }
    }
    Ok(t)
}

// ---------------------------------------------------------------- operators

fn paschke_bound(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(8);
    let mut t = Tally::default();
    for _ in 0..cfg.count(200) {
        let h = small_module(&mut rng);
        let v = ModuleDescriptor::new(h.algebra, rng.random_range(1..=3));
        let op = random::gaussian_op(&mut rng, &h, &v);
        let x = random::gaussian_module_element(&mut rng, &h);
        let tx = op.apply(&x)?;
        let n = op.op_norm();
        let ok = tx.inner(&tx)?.loewner_leq(&x.inner(&x)?.scale_real(n * n), &tol())?;
        t.case(ok, || "⟨Tx,Tx⟩ ≰ ∥T∥²⟨x,x⟩".into());
    }
    Ok(t)
}

fn bounded_below_sandwich(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(9);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let h = small_module(&mut rng);
        let v = ModuleDescriptor::new(h.algebra, h.rank + rng.random_range(0..=2));
        let op = random::gaussian_op(&mut rng, &h, &v);
        if !op.is_injective(&tol()) {
            continue;
        }
        let tt = op.adjoint().compose(&op)?;
        let inv_norm = tt.invert(&tol())?.op_norm();
        let id = AdjointableOp::identity(h);
        let lower = id.scale_real(1.0 / inv_norm).loewner_leq_op(&tt, &tol())?;
        let upper = tt.loewner_leq_op(&id.scale_real(op.op_norm().powi(2)), &tol())?;
        t.case(lower && upper, || {
            format!("sandwich fails (lower {lower}, upper {upper})")
        });
    }
    Ok(t)
}

fn scalar_rank(op: &AdjointableOp, tol: &Tolerance) -> usize {
    let m = op.scalar_rep().matrix;
    let svd = m.svd(false, false);
    let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    svd.singular_values.iter().filter(|&&s| s > tol.rank_rel * top).count()
}

fn surjectivity_equivalence(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(10);
    let mut t = Tally::default();
    for i in 0..cfg.count(100) {
        let h = small_module(&mut rng);
        let v = ModuleDescriptor::new(h.algebra, rng.random_range(1..=3));
        let op = if i % 3 == 2 {
            let w = ModuleDescriptor::new(h.algebra, 1);
            random::gaussian_op(&mut rng, &w, &v).compose(&random::gaussian_op(&mut rng, &h, &w))?
        } else {
            random::gaussian_op(&mut rng, &h, &v)
        };
        let surj = op.is_surjective(&tol());
        let margin = op.adjoint().bounded_below_margin() > tol().rank_rel * op.op_norm();
        let full_rank = scalar_rank(&op, &tol()) == v.scalar_dim();
        t.case(surj == margin && surj == full_rank, || {
            format!("surjective {surj}, adjoint bounded below {margin}, full rank {full_rank}")
        });
    }
    Ok(t)
}

fn positivity_oracle(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(11);
    let mut t = Tally::default();
    let samples = cfg.count(500);
    for _ in 0..cfg.count(100) {
        let h = random::random_module(&mut rng, 2);
        let s = random::gaussian_self_adjoint(&mut rng, &h);
        let offset = if rng.random_bool(0.5) { -0.1 } else { 0.1 } * s.op_norm();
        let op = s.sub(&AdjointableOp::identity(h).scale_real(s.min_eigenvalue() + offset))?;
        let spectral = op.is_positive_op(&tol());
        let mut contradiction = false;
        for _ in 0..samples {
            let x = random::gaussian_module_element(&mut rng, &h);
            let q = op.apply(&x)?.inner(&x)?;
            if spectral && !q.is_positive(&tol()) {
                contradiction = true;
            }
        }
        if !spectral {
            let (_, w) = op.lowest_direction();
            if op.apply(&w)?.inner(&w)?.is_positive(&tol()) {
                contradiction = true;
            }
        }
        t.case(!contradiction, || {
            format!("spectral decision {spectral} contradicted by sampling")
        });
    }
    Ok(t)
}

fn penrose_identities(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(12);
    let mut t = Tally::default();
    for i in 0..cfg.count(100) {
        let h = small_module(&mut rng);
        let v = ModuleDescriptor::new(h.algebra, rng.random_range(1..=3));
        let op = if i % 2 == 1 {
            let w = ModuleDescriptor::new(h.algebra, 1);
            random::gaussian_op(&mut rng, &w, &v).compose(&random::gaussian_op(&mut rng, &h, &w))?
        } else {
            random::gaussian_op(&mut rng, &h, &v)
        };
        let p = op.pseudo_inverse(&tol())?;
        let s1 = op.compose(&p)?.compose(&op)?.sub(&op)?.op_norm() / op.op_norm().max(1.0);
        let s2 = p.compose(&op)?.compose(&p)?.sub(&p)?.op_norm() / p.op_norm().max(1.0);
        let tp = op.compose(&p)?;
        let pt = p.compose(&op)?;
        let s3 = tp.adjoint().sub(&tp)?.op_norm();
        let s4 = pt.adjoint().sub(&pt)?.op_norm();
        t.bound(s1.max(s2).max(s3).max(s4), 1e-9, "Penrose residual");
    }
    Ok(t)
}

// ---------------------------------------------------------------- frames

fn analysis_norm_bound(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(13);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let m = small_module(&mut rng);
        let extra = rng.random_range(0..=2);
        let f = random::random_frame(&mut rng, &m, extra);
        let b = f.optimal_scalar_bounds(&tol());
        let proved = f
            .verify_bounds(&BoundsSpec::plain(b.lower.max(1e-300), b.upper), &tol(), 0, 0)?
            .verdict;
        if proved != Verdict::Proved {
            t.case(false, || "optimal bounds not proved".into());
            continue;
        }
        t.bound(f.analysis().op_norm() - b.upper.sqrt(), 1e-9, "∥T∥ − √B");
    }
    Ok(t)
}

fn optimal_bound_tightness(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(14);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let m = small_module(&mut rng);
        let f = random::random_frame(&mut rng, &m, 1);
        let b = f.optimal_scalar_bounds(&tol());
        let eps = 1e-4 * b.upper;
        let v = |lo: f64, hi: f64| {
            f.verify_bounds(&BoundsSpec::plain(lo, hi), &tol(), 0, 0)
                .map(|r| r.verdict)
        };
        let at = v(b.lower, b.upper)?;
        let low = v(b.lower + eps, b.upper.max(b.lower + eps))?;
        let high = v(b.lower, b.upper - eps)?;
        t.case(
            at == Verdict::Proved
                && low == Verdict::Falsified
                && (b.upper - eps < b.lower || high == Verdict::Falsified),
            || format!("verdicts {at:?} {low:?} {high:?}"),
        );
    }
    Ok(t)
}

fn frame_dual_reciprocity(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(15);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let m = small_module(&mut rng);
        let f = random::random_frame(&mut rng, &m, 1);
        let b = f.optimal_scalar_bounds(&tol());
        let d = f.canonical_dual(&tol())?.optimal_scalar_bounds(&tol());
        t.bound(
            rel(d.lower, 1.0 / b.upper).max(rel(d.upper, 1.0 / b.lower)),
            1e-9,
            "dual bounds",
        );
    }
    Ok(t)
}

fn frame_reconstruction(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(16);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let m = small_module(&mut rng);
        let f = random::random_frame(&mut rng, &m, 1);
        for _ in 0..cfg.count(100) {
            let x = random::gaussian_module_element(&mut rng, &m);
            let y = f.reconstruct(&x, &tol())?;
            t.bound(y.sub(&x)?.norm() / x.norm(), 1e-10, "reconstruction");
        }
    }
    Ok(t)
}

fn star_of_plain(alg: AlgebraDescriptor, a: f64, b: f64) -> BoundsSpec {
    BoundsSpec::star(
        AlgebraElement::identity(alg).scale_real(a.sqrt()),
        AlgebraElement::identity(alg).scale_real(b.sqrt()),
    )
}

fn frame_star_containment(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(17);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let m = small_module(&mut rng);
        let f = random::random_frame(&mut rng, &m, 1);
        let b = f.optimal_scalar_bounds(&tol());
        let spec = star_of_plain(m.algebra, b.lower, b.upper);
        let r = f.verify_bounds(&spec, &tol(), 50, cfg.seed)?;
        t.case(r.passed(), || "star bounds from plain bounds falsified".into());
    }
    Ok(t)
}

fn k_frame_surjectivity(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(18);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let m = small_module(&mut rng);
        let f = random::random_frame(&mut rng, &m, 1);
        let k = invertible_op(&mut rng, &m);
        let s = f.frame_operator();
        let c = optimal_k_lower_bound(s, &k, &tol())?.unwrap_or(0.0) * (1.0 - 1e-9);
        if c <= 0.0 || !k.is_surjective(&tol()) {
            continue;
        }
        let r = f.verify_bounds(&BoundsSpec::k(c, s.max_eigenvalue(), k), &tol(), 0, 0)?;
        if r.verdict == Verdict::Proved {
            t.case(f.optimal_scalar_bounds(&tol()).lower > 0.0, || {
                "K-frame with surjective K has λ_min = 0".into()
            });
        }
    }
    Ok(t)
}

fn norm_characterization(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(19);
    let mut t = Tally::default();
    for _ in 0..cfg.count(30) {
        let m = small_module(&mut rng);
        let f = random::random_frame(&mut rng, &m, 1);
        let b = f.optimal_scalar_bounds(&tol());
        let r = f.verify_norm_frame(b.lower, b.upper, &tol(), 40, cfg.seed)?;
        t.case(r.report.passed(), || "norm form falsified at spectral bounds".into());
    }
    Ok(t)
}

// ---------------------------------------------------------------- g-frames

fn random_g(rng: &mut Rng64) -> GFrameSystem {
    let m = small_module(rng);
    let blocks = rng.random_range(1..=4);
    random::random_gframe(rng, &m, blocks)
}

fn gframe_dual_bounds(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(20);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let g = random_g(&mut rng);
        let b = g.optimal_scalar_bounds(&tol());
        if !b.is_frame {
            continue;
        }
        let dual = g.canonical_dual_gframe(&tol())?;
        let d = dual.optimal_scalar_bounds(&tol());
        t.bound(
            rel(d.lower, 1.0 / b.upper).max(rel(d.upper, 1.0 / b.lower)),
            1e-9,
            "g-dual bounds",
        );
        let id = AdjointableOp::identity(g.domain());
        t.bound(mixed_operator(&g, &dual)?.sub(&id)?.op_norm(), 1e-10, "Σ Λ̃*Λ − I");
        for _ in 0..cfg.count(100) {
            let x = random::gaussian_module_element(&mut rng, &g.domain());
            let y = g.reconstruct(&x, &tol())?;
            t.bound(y.sub(&x)?.norm() / x.norm(), 1e-10, "g-frame reconstruction");
        }
    }
    Ok(t)
}

fn synthesis_characterization(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(21);
    let mut t = Tally::default();
    for i in 0..cfg.count(50) {
        let g = if i % 5 == 4 {
            // deficient: one rank-one block on a module of rank two
            let m = ModuleDescriptor::new(random::random_algebra(&mut rng), 2);
            let v = ModuleDescriptor::new(m.algebra, 1);
            GFrameSystem::new(m, vec![random::gaussian_op(&mut rng, &m, &v)])?
        } else {
            random_g(&mut rng)
        };
        let b = g.optimal_scalar_bounds(&tol());
        let surj = g.synthesis_q().is_surjective(&tol());
        t.case(b.is_frame == surj, || {
            format!("g-frame {} but Q surjective {surj}", b.is_frame)
        });
        if let Some((lo, hi)) = g.synthesis_bounds(&tol())? {
            t.bound(
                ((lo - b.lower).abs()).max((hi - b.upper).abs()) / b.upper.max(1.0),
                1e-9,
                "Q bounds",
            );
        }
    }
    Ok(t)
}

fn independent_projection(g: &GFrameSystem) -> AdjointableOp {
    let q = g.synthesis_q();
    let blocks: Vec<CMat> = q
        .blocks()
        .iter()
        .map(|b| {
            let gram: DMatrix<C64> = b * b.adjoint();
            let eps = 1e-12 * gram.norm().max(1.0);
            let pinv = gram.pseudo_inverse(eps).expect("pseudo-inverse");
            b.adjoint() * pinv * b
        })
        .collect();
    AdjointableOp::from_blocks(q.domain(), q.domain(), blocks).expect("shape")
}

fn range_projection(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(22);
    let mut t = Tally::default();
    for _ in 0..cfg.count(25) {
        let g = random_g(&mut rng);
        if !g.optimal_scalar_bounds(&tol()).is_frame {
            continue;
        }
        let p = g.range_projection_p(&tol())?;
        t.bound(p.compose(&p)?.sub(&p)?.op_norm(), 1e-10, "P² − P");
        t.bound(p.adjoint().sub(&p)?.op_norm(), 1e-10, "P* − P");
        t.bound(p.sub(&independent_projection(&g))?.op_norm(), 1e-9, "P − Q*(QQ*)†Q");
        let qs = g.analysis();
        t.bound(
            p.compose(&qs)?.sub(&qs)?.op_norm() / qs.op_norm().max(1.0),
            1e-10,
            "PQ* − Q*",
        );
    }
    Ok(t)
}

fn surjective_synthesis(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(23);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let g = random_g(&mut rng);
        if let Some(spec) = g.synthesis_star_bounds(&tol()) {
            let r = g.verify_gbounds(&spec, &tol(), 50, cfg.seed)?;
            t.case(r.passed(), || "surjective synthesis bounds falsified".into());
        }
    }
    Ok(t)
}

fn mixed_operator_bounds(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(24);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let lambda = random_g(&mut rng);
        let h = lambda.domain();
        let gamma_ops = lambda
            .targets()
            .iter()
            .map(|v| random::gaussian_op(&mut rng, &h, v))
            .collect();
        let gamma = GFrameSystem::new(h, gamma_ops)?;
        if let Some(spec) = star_bounds_from_mixed(&lambda, &gamma, &tol())? {
            let r = gamma.verify_gbounds(&spec, &tol(), 50, cfg.seed)?;
            t.case(r.verdict != Verdict::Falsified, || {
                "Γ falsified although F is surjective".into()
            });
        }
    }
    Ok(t)
}

fn kg_invertibility(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(25);
    let mut t = Tally::default();
    for i in 0..cfg.count(30) {
        let g = random_g(&mut rng);
        let h = g.domain();
        let k = invertible_op(&mut rng, &h);
        let op = if i % 4 == 3 {
            let w = ModuleDescriptor::new(h.algebra, 1);
            random::gaussian_op(&mut rng, &w, &h).compose(&random::gaussian_op(&mut rng, &h, &w))?
        } else {
            random::gaussian_op(&mut rng, &h, &h)
        };
        let proved = |sys: &GFrameSystem| -> Result<bool> {
            let s = sys.gframe_operator();
            let Some(c) = optimal_k_lower_bound(s, &k, &tol())? else {
                return Ok(false);
            };
            if !(c.is_finite() && c > 0.0) {
                return Ok(false);
            }
            let spec = BoundsSpec::k(c * (1.0 - 1e-9), s.max_eigenvalue(), k.clone());
            Ok(sys.verify_gbounds(&spec, &tol(), 0, 0)?.verdict == Verdict::Proved)
        };
        let both = proved(&g.right_compose(&op.adjoint())?)? && proved(&g.right_compose(&op)?)?;
        if both {
            t.case(op.invert(&tol()).is_ok(), || "T not invertible".into());
        } else {
            t.case(
                op.invert(&tol()).is_err() || !g.optimal_scalar_bounds(&tol()).is_frame,
                || "invertible T on a g-frame failed the K-g check".into(),
            );
        }
    }
    Ok(t)
}

fn star_k_specialization(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(26);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let g = random_g(&mut rng);
        let b = g.optimal_scalar_bounds(&tol());
        let lo = b.lower * rng.random_range(0.8..1.2);
        let hi = b.upper * rng.random_range(0.8..1.2);
        if lo <= 0.0 {
            continue;
        }
        let alg = g.domain().algebra;
        let id = AdjointableOp::identity(g.domain());
        let plain = g.verify_gbounds(&BoundsSpec::plain(lo, hi), &tol(), 0, 0)?.verdict;
        let star_k = BoundsSpec::star_k(
            AlgebraElement::identity(alg).scale_real(lo.sqrt()),
            AlgebraElement::identity(alg).scale_real(hi.sqrt()),
            id,
        );
        let sk = g.verify_gbounds(&star_k, &tol(), 20, cfg.seed)?.verdict;
        t.case(plain == sk, || format!("plain {plain:?} against star-K {sk:?}"));
    }
    Ok(t)
}

fn bessel_composition(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(27);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let lambda = random_g(&mut rng);
        let u2 = ModuleDescriptor::new(lambda.domain().algebra, rng.random_range(1..=3));
        let gamma_ops = lambda
            .targets()
            .iter()
            .map(|v| random::gaussian_op(&mut rng, &u2, v))
            .collect();
        let gamma = GFrameSystem::new(u2, gamma_ops)?;
        let c = compose_bessel(&lambda, &gamma, &tol())?;
        t.case(c.report.passed(), || format!("Bessel bound {} falsified", c.bound));
    }
    Ok(t)
}

fn left_composition(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(28);
    let mut t = Tally::default();
    for i in 0..cfg.count(30) {
        let h = small_module(&mut rng);
        let ops = (0..rng.random_range(1..=3))
            .map(|_| random::gaussian_op(&mut rng, &h, &h))
            .collect();
        let g = GFrameSystem::new(h, ops)?;
        let b = g.optimal_scalar_bounds(&tol());
        if !b.is_frame {
            continue;
        }
        let unitary = i % 2 == 0;
        let theta = if unitary {
            random::random_unitary(&mut rng, &h)
        } else {
            invertible_op(&mut rng, &h)
        };
        let spec = BoundsSpec::plain(b.lower * (1.0 - 1e-9), b.upper * (1.0 + 1e-9));
        let d = left_compose(&theta, &g, &spec, &tol(), Sampling::default())?;
        t.case(d.report.passed(), || "θΛ bounds falsified".into());
        if unitary {
            let nb = d.system.optimal_scalar_bounds(&tol());
            t.bound(
                rel(nb.lower, b.lower).max(rel(nb.upper, b.upper)),
                1e-9,
                "unitary θ changed bounds",
            );
        }
    }
    Ok(t)
}

/// Optimal *-bounds: per slot over D_n, central scalars over M_n.
fn optimal_star_spec(s: &AdjointableOp, alg: AlgebraDescriptor) -> Result<BoundsSpec> {
    match alg.kind {
        AlgebraKind::Diagonal => {
            let (a, b) = optimal_star_bounds_diagonal(s)?;
            Ok(BoundsSpec::star(a, b))
        }
        AlgebraKind::Full => Ok(star_of_plain(alg, s.min_eigenvalue().max(0.0), s.max_eigenvalue())),
    }
}

fn random_map(rng: &mut Rng64, alg: AlgebraDescriptor) -> AlgebraMap {
    match alg.kind {
        AlgebraKind::Diagonal => {
            let mut sigma: Vec<usize> = (0..alg.n).collect();
            for i in (1..sigma.len()).rev() {
                let j = rng.random_range(0..=i);
                sigma.swap(i, j);
            }
            AlgebraMap::SlotPermutation(sigma)
        }
        AlgebraKind::Full => AlgebraMap::UnitaryConjugation(random::unitary_matrix(rng, alg.n)),
    }
}

fn gframe_transport(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(29);
    let mut t = Tally::default();
    for _ in 0..cfg.count(30) {
        let g = random_g(&mut rng);
        if !g.optimal_scalar_bounds(&tol()).is_frame {
            continue;
        }
        let alg = g.domain().algebra;
        let spec = optimal_star_spec(g.gframe_operator(), alg)?;
        let phi = random_map(&mut rng, alg);
        let moved = transport_gframe(
            &g,
            &spec,
            &phi,
            &phi,
            &tol(),
            Sampling {
                samples: 20,
                seed: cfg.seed,
            },
        )?;
        t.case(moved.report.passed(), || "transported bounds falsified".into());
        t.bound(moved.operator_residual, 1e-10, "⟨S'θx,θy⟩ − φ⟨Sx,y⟩");
    }
    Ok(t)
}

fn kg_transfer_property(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(30);
    let mut t = Tally::default();
    for _ in 0..cfg.count(30) {
        let g = random_g(&mut rng);
        let h = g.domain();
        let k = random::gaussian_op(&mut rng, &h, &h);
        let m = random::gaussian_op(&mut rng, &h, &h);
        let m = m.scale_real(0.9 / m.op_norm());
        let op = k.compose(&m)?;
        let Some(c) = optimal_k_lower_bound(g.gframe_operator(), &k, &tol())? else {
            continue;
        };
        if !(c.is_finite() && c > 0.0) {
            continue;
        }
        let r = kg_transfer(&g, &k, &op, c * (1.0 - 1e-9), &tol())?;
        t.case(r.verdict == Verdict::Proved, || "T-g-frame bound falsified".into());
    }
    Ok(t)
}

fn kg_restriction(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(31);
    let mut t = Tally::default();
    for i in 0..cfg.count(30) {
        let g = random_g(&mut rng);
        let h = g.domain();
        if !g.optimal_scalar_bounds(&tol()).is_frame {
            continue;
        }
        let k = invertible_op(&mut rng, &h);
        let op = if i % 3 == 0 {
            k.clone()
        } else {
            random::gaussian_op(&mut rng, &h, &h)
        };
        let r = kg_restrict(&g, &k, &op, &tol())?;
        t.case(r.report.passed(), || {
            format!("restricted bounds falsified (δ = {})", r.delta)
        });
        if i % 3 == 0 {
            t.bound((r.delta - 1.0).abs(), 1e-9, "δ for T = K");
        }
    }
    Ok(t)
}

fn coisometry(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(32);
    let mut t = Tally::default();
    for _ in 0..cfg.count(30) {
        let g = random_g(&mut rng);
        let h = g.domain();
        if !g.optimal_scalar_bounds(&tol()).is_frame {
            continue;
        }
        let u = random::random_unitary(&mut rng, &h);
        let (a, b, c): (f64, f64, f64) = (
            rng.random_range(0.5..2.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let k = AdjointableOp::identity(h)
            .scale_real(a)
            .add(&u.scale_real(b))?
            .add(&u.compose(&u)?.scale_real(c))?;
        let d = kg_coisometry(&g, &k, &u, &tol())?;
        t.case(d.report.verdict == Verdict::Proved, || {
            "co-isometry bounds falsified".into()
        });
    }
    Ok(t)
}

fn factorization(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(33);
    let mut t = Tally::default();
    for _ in 0..cfg.count(30) {
        let g = random_g(&mut rng);
        if !g.optimal_scalar_bounds(&tol()).is_frame {
            continue;
        }
        let h = g.domain();
        let k = random::gaussian_op(&mut rng, &h, &h);
        let theta = g.canonical_dual_gframe(&tol())?.right_compose(&k)?;
        let r = kg_from_factorization(&g, &theta, &k, &tol())?;
        t.case(
            r.lambda.verdict == Verdict::Proved && r.theta.verdict == Verdict::Proved,
            || format!("factorization verdicts {:?} {:?}", r.lambda.verdict, r.theta.verdict),
        );
    }
    Ok(t)
}

fn star_kg_operator(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(34);
    let mut t = Tally::default();
    for _ in 0..cfg.count(30) {
        let g = random_g(&mut rng);
        if !g.optimal_scalar_bounds(&tol()).is_frame {
            continue;
        }
        let h = g.domain();
        let k = random::gaussian_op(&mut rng, &h, &h);
        let (sys, op) = star_kg_from_gframe(&g, &k)?;
        t.bound(
            sys.gframe_operator().max_abs_diff(&op),
            1e-12 * op.op_norm().max(1.0),
            "K*SK",
        );
        let d = star_kg_corollary(
            &g,
            &k,
            &tol(),
            Sampling {
                samples: 30,
                seed: cfg.seed,
            },
        )?;
        t.case(d.report.passed(), || "corollary bounds falsified".into());
    }
    Ok(t)
}

// ---------------------------------------------------------------- operator frames

fn random_of(rng: &mut Rng64) -> OperatorFrameSystem {
    let m = small_module(rng);
    let count = rng.random_range(1..=3);
    random::random_opframe(rng, &m, count)
}

fn opframe_star_containment(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(35);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let of = random_of(&mut rng);
        let b = of.optimal_scalar_bounds(&tol());
        if !b.is_frame {
            continue;
        }
        let spec = star_of_plain(of.module().algebra, b.lower, b.upper);
        let r = of.verify_opframe(&spec, &tol(), 30, cfg.seed)?;
        t.case(r.passed(), || "star bounds from plain bounds falsified".into());
    }
    Ok(t)
}

fn opframe_k_remark(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(36);
    let mut t = Tally::default();
    let of = random_of(&mut rng);
    let b = of.optimal_scalar_bounds(&tol());
    for _ in 0..cfg.count(20) {
        let k = random::gaussian_op(&mut rng, &of.module(), &of.module());
        let lower = b.lower / k.op_norm().powi(2);
        let r = of.verify_opframe(&BoundsSpec::k(lower, b.upper, k), &tol(), 0, 0)?;
        t.case(r.verdict == Verdict::Proved, || "A∥K∥⁻² not a K-bound".into());
    }
    Ok(t)
}

fn tiny_of(rng: &mut Rng64) -> OperatorFrameSystem {
    let m = tiny_module(rng);
    let count = rng.random_range(1..=2);
    random::random_opframe(rng, &m, count)
}

fn tensor_identity(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(37);
    let mut t = Tally::default();
    for _ in 0..cfg.count(25) {
        let a = tiny_of(&mut rng);
        let b = tiny_of(&mut rng);
        let big = tensor_opframes(&a, &b)?;
        let direct = kron(a.opframe_operator(), b.opframe_operator());
        t.bound(big.opframe_operator().max_abs_diff(&direct), 1e-12, "S_⊗ − S_Λ ⊗ S_Γ");
    }
    Ok(t)
}

fn tensor_k_bounds(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(38);
    let mut t = Tally::default();
    for _ in 0..cfg.count(25) {
        let a = tiny_of(&mut rng);
        let b = tiny_of(&mut rng);
        let k1 = random::gaussian_op(&mut rng, &a.module(), &a.module());
        let k2 = random::gaussian_op(&mut rng, &b.module(), &b.module());
        let r = verify_tensor_k(&a, &k1, &b, &k2, &tol())?;
        t.bound(r.operator_residual, 1e-12, "S_⊗ − S_Λ ⊗ S_Γ");
        t.case(r.report.verdict == Verdict::Proved, || {
            "tensor K bounds falsified".into()
        });
    }
    Ok(t)
}

fn perturbation_soundness(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(39);
    let mut t = Tally::default();
    for _ in 0..cfg.count(100) {
        let of = random_of(&mut rng);
        let b = of.optimal_scalar_bounds(&tol());
        if !b.is_frame {
            continue;
        }
        let r = random::random_opframe(&mut rng, &of.module(), of.len());
        let target = b.lower * rng.random_range(0.02..0.95);
        let r = r.scale_real((target / r.opframe_operator().max_eigenvalue()).sqrt());
        let p = perturb_sum(
            &of,
            &r,
            &tol(),
            Sampling {
                samples: 10,
                seed: cfg.seed,
            },
        )?;
        for sys in [&p.plus, &p.minus] {
            let sb = sys.opframe_operator().spectrum();
            let (lo, hi) = (sb[0], *sb.last().expect("non-empty"));
            let slack = 1e-9 * p.upper.max(1.0);
            t.observe((p.lower - lo).max(hi - p.upper));
            t.case(lo >= p.lower - slack && hi <= p.upper + slack, || {
                format!("spectrum [{lo}, {hi}] outside [{}, {}]", p.lower, p.upper)
            });
        }
        t.case(p.plus_report.report.passed() && p.minus_report.report.passed(), || {
            "norm check failed".into()
        });
    }
    Ok(t)
}

fn xi_property(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(40);
    let mut t = Tally::default();
    for _ in 0..cfg.count(30) {
        let of = random_of(&mut rng);
        if !of.optimal_scalar_bounds(&tol()).is_frame {
            continue;
        }
        let e = random::random_opframe(&mut rng, &of.module(), of.len());
        let r = of.add(&e.scale_real(rng.random_range(0.01..0.5)))?;
        let rep = xi_equivalence(
            &of,
            &r,
            &tol(),
            Sampling {
                samples: 40,
                seed: cfg.seed,
            },
        )?;
        if rep.xi.is_none() {
            continue;
        }
        t.case(rep.certified, || {
            format!("observed ratio {} above ξ = {:?}", rep.observed, rep.xi)
        });
        if let Some(c) = rep.converse {
            t.case(c.report.passed(), || "converse bounds falsified".into());
        }
    }
    Ok(t)
}

fn family_combination(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(41);
    let mut t = Tally::default();
    for _ in 0..cfg.count(20) {
        let m = small_module(&mut rng);
        let n = rng.random_range(1..=3);
        let count = rng.random_range(1..=3);
        let families: Vec<OperatorFrameSystem> = (0..n).map(|_| random::random_opframe(&mut rng, &m, count)).collect();
        let eps = rng.random_range(0.0..0.2);
        let perturbed = families
            .iter()
            .map(|f| f.add(&random::random_opframe(&mut rng, &m, count).scale_real(eps)))
            .collect::<Result<Vec<_>>>()?;
        let summed: Vec<AdjointableOp> = (0..count)
            .map(|i| AdjointableOp::sum(perturbed.iter().map(|r| &r.ops()[i])))
            .collect::<Result<_>>()?;
        let w = AdjointableOp::stack(&summed)?;
        if !w.is_injective(&tol()) {
            continue;
        }
        let p = rng.random_range(0..n);
        let tp = AdjointableOp::stack(families[p].ops())?;
        let l = tp.compose(&w.pseudo_inverse(&tol())?)?;
        let mut lambda: f64 = 0.0;
        for (f, r) in families.iter().zip(&perturbed) {
            let diff = f.sub(r)?.opframe_operator().max_eigenvalue();
            lambda = lambda.max(diff / f.opframe_operator().min_eigenvalue());
        }
        let rep = combine_families(
            &families,
            &perturbed,
            &l,
            p,
            lambda * (1.0 + 1e-6),
            &tol(),
            Sampling {
                samples: 40,
                seed: cfg.seed,
            },
        )?;
        t.case(rep.report.report.passed(), || "combined bounds falsified".into());
    }
    Ok(t)
}

fn tensor_conjugation(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(42);
    let mut t = Tally::default();
    for i in 0..cfg.count(20) {
        let a = tiny_of(&mut rng);
        let b = tiny_of(&mut rng);
        let of = tensor_opframes(&a, &b)?;
        let left = i % 2 == 0;
        let (qmod, other) = if left {
            (a.module(), b.module())
        } else {
            (b.module(), a.module())
        };
        let q = if i % 4 < 2 {
            random::random_unitary(&mut rng, &qmod)
        } else {
            invertible_op(&mut rng, &qmod)
        };
        let (k, side) = if left {
            let p = AdjointableOp::identity(qmod).add(&q.scale_real(0.5))?;
            (kron(&p, &AdjointableOp::identity(other)), TensorSide::Left)
        } else {
            (AdjointableOp::identity(of.module()), TensorSide::Right)
        };
        let rep = conjugate_qxi(&of, &k, &q, other, side, &tol())?;
        t.bound(
            rep.operator_residual,
            1e-12 * of.opframe_operator().op_norm().max(1.0) * q.op_norm().powi(2),
            "(Q⊗I)S(Q*⊗I)",
        );
        t.case(rep.report.verdict == Verdict::Proved, || {
            "conjugated bounds falsified".into()
        });
    }
    Ok(t)
}

fn opframe_transport(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(43);
    let mut t = Tally::default();
    for _ in 0..cfg.count(30) {
        let of = random_of(&mut rng);
        let h = of.module();
        let k = random::gaussian_op(&mut rng, &h, &h);
        let s = of.opframe_operator();
        let Some(c) = optimal_k_lower_bound(s, &k, &tol())? else {
            continue;
        };
        if !(c.is_finite() && c > 0.0) {
            continue;
        }
        let spec = BoundsSpec::k(c * (1.0 - 1e-9), s.max_eigenvalue(), k);
        let phi = random_map(&mut rng, h.algebra);
        let moved = transport_opframe(
            &of,
            &spec,
            &phi,
            &phi,
            &tol(),
            Sampling {
                samples: 20,
                seed: cfg.seed,
            },
        )?;
        t.case(moved.report.verdict == Verdict::Proved, || {
            "transported K bounds falsified".into()
        });
        t.bound(moved.operator_residual, 1e-10, "⟨S'θx,θy⟩ − φ⟨Sx,y⟩");
    }
    Ok(t)
}

fn k_dual_composition(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(44);
    let mut t = Tally::default();
    for _ in 0..cfg.count(50) {
        let of = random_of(&mut rng);
        if !of.optimal_scalar_bounds(&tol()).is_frame {
            continue;
        }
        let k = invertible_op(&mut rng, &of.module());
        let dual = canonical_dual_k_opframe(&of, &k, &tol())?;
        t.case(is_dual_k_opframe(&of, &dual, &k)?, || {
            "canonical K-dual is not a dual".into()
        });
    }
    Ok(t)
}

fn tensor_dual_property(cfg: &Config) -> Result<Tally> {
    let mut rng = cfg.rng(45);
    let mut t = Tally::default();
    for _ in 0..cfg.count(20) {
        let a = tiny_of(&mut rng);
        let b = tiny_of(&mut rng);
        if !a.optimal_scalar_bounds(&tol()).is_frame || !b.optimal_scalar_bounds(&tol()).is_frame {
            continue;
        }
        let ka = invertible_op(&mut rng, &a.module());
        let kb = invertible_op(&mut rng, &b.module());
        let da = canonical_dual_k_opframe(&a, &ka, &tol())?;
        let db = canonical_dual_k_opframe(&b, &kb, &tol())?;
        let r = tensor_duals(&a, &da, &b, &db, &ka, &kb)?;
        t.observe(r.residual);
        t.case(r.is_dual, || format!("tensor dual residual {:e}", r.residual));
    }
    Ok(t)
}

/// A module element that is zero except for one unit component; handy for witnesses.
pub fn unit(module: ModuleDescriptor, k: usize) -> ModuleElement {
    ModuleElement::basis(module, k)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let cfg = Config { seed: 1, quick: true };
        for o in run_all(&cfg) {
            assert!(o.passed, "{}/{}: {} ({} cases)", o.area, o.name, o.detail, o.cases);
        }
    }

    #[test]
    fn lookup_by_key() {
        assert!(find("gframes/dual bounds").is_some());
        assert!(find("penrose identities").is_some());
        assert!(find("nope").is_none());
    }
}
