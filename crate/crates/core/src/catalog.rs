//! Finite truncations of the standard worked examples, each with the bounds it should satisfy.

use crate::algebra::{AlgebraDescriptor, AlgebraElement, Tolerance};
use crate::error::{Error, Result};
use crate::frames::{gabor_frame, periodic_gaussian, BoundsSpec, FrameSystem, Sampling, VerificationReport};
use crate::gframes::GFrameSystem;
use crate::linalg::C64;
use crate::module::{ModuleDescriptor, ModuleElement};
use crate::operators::AdjointableOp;
use crate::opframes::OperatorFrameSystem;

#[derive(Clone, Debug, PartialEq)]
pub enum Payload {
    Frame(FrameSystem),
    GFrame(GFrameSystem),
    OpFrame(OperatorFrameSystem),
}

impl Payload {
    pub fn module(&self) -> ModuleDescriptor {
        match self {
            Payload::Frame(f) => f.module(),
            Payload::GFrame(g) => g.domain(),
            Payload::OpFrame(o) => o.module(),
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Payload::Frame(_) => "frame",
            Payload::GFrame(_) => "gframe",
            Payload::OpFrame(_) => "opframe",
        }
    }

    /// The frame, g-frame or operator-frame operator.
    pub fn operator(&self) -> &AdjointableOp {
        match self {
            Payload::Frame(f) => f.frame_operator(),
            Payload::GFrame(g) => g.gframe_operator(),
            Payload::OpFrame(o) => o.opframe_operator(),
        }
    }

    pub fn verify(&self, spec: &BoundsSpec, tol: &Tolerance, sampling: Sampling) -> Result<VerificationReport> {
        crate::frames::verify_operator(self.operator(), spec, tol, sampling.samples, sampling.seed)
    }

    pub fn len(&self) -> usize {
        match self {
            Payload::Frame(f) => f.len(),
            Payload::GFrame(g) => g.len(),
            Payload::OpFrame(o) => o.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Example {
    pub name: String,
    pub payload: Payload,
    pub bounds: BoundsSpec,
    /// Human-readable truncation parameters.
    pub truncation: String,
}

/// {A_i = diag(2^{-i}, 3^{-i})}_{i≤M} in D_2 over itself; tight with per-slot bound
/// (√((1 − 4^{-M})/3), √((1 − 9^{-M})/8)).
pub fn star_diag(m: usize) -> Result<Example> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let module = ModuleDescriptor::new(AlgebraDescriptor::diagonal(2), 1);
    let vectors = (1..=m)
        .map(|i| {
            let a = AlgebraElement::diagonal_real(&[2f64.powi(-(i as i32)), 3f64.powi(-(i as i32))]);
            ModuleElement::new(module, vec![a])
        })
        .collect::<Result<Vec<_>>>()?;
    let bound = star_diag_bound(m);
    Ok(Example {
        name: "star-diag".into(),
        payload: Payload::Frame(FrameSystem::new(module, vectors)?),
        bounds: BoundsSpec::star(bound.clone(), bound),
        truncation: format!("M = {m}"),
    })
}

pub fn star_diag_bound(m: usize) -> AlgebraElement {
    let m = m as i32;
    AlgebraElement::diagonal_real(&[
        ((1.0 - 4f64.powi(-m)) / 3.0).sqrt(),
        ((1.0 - 9f64.powi(-m)) / 8.0).sqrt(),
    ])
}

/// Λ_i(z₁, z₂) = (a_i z₁, b_i z₂) on D_2 over itself, bounds (min, max) of (Σ|a_i|², Σ|b_i|²).
pub fn gframe_ab(a: &[f64], b: &[f64]) -> Result<Example> {
    if a.is_empty() || a.len() != b.len() {
        return Err(Error::InvalidParameter("a and b need the same nonzero length".into()));
    }
    let module = ModuleDescriptor::new(AlgebraDescriptor::diagonal(2), 1);
    let ops = a
        .iter()
        .zip(b)
        .map(|(&x, &y)| AdjointableOp::right_multiplication(module, &AlgebraElement::diagonal_real(&[x, y])))
        .collect::<Result<Vec<_>>>()?;
    let sa: f64 = a.iter().map(|v| v * v).sum();
    let sb: f64 = b.iter().map(|v| v * v).sum();
    Ok(Example {
        name: "gframe-ab".into(),
        payload: Payload::GFrame(GFrameSystem::new(module, ops)?),
        bounds: BoundsSpec::plain(sa.min(sb), sa.max(sb)),
        truncation: format!("{} terms", a.len()),
    })
}

fn coordinate_ops(d: usize) -> (ModuleDescriptor, Vec<AdjointableOp>) {
    let module = ModuleDescriptor::new(AlgebraDescriptor::diagonal(d), 1);
    let ops = (0..d)
        .map(|j| {
            let mut e = vec![0.0; d];
            e[j] = 1.0;
            AdjointableOp::right_multiplication(module, &AlgebraElement::diagonal_real(&e)).expect("same algebra")
        })
        .collect();
    (module, ops)
}

/// K e_j = j e_j for j ≤ N, 0 beyond, on the sequence module D_d.
pub fn coordinate_k(d: usize, n: usize) -> Result<AdjointableOp> {
    let module = ModuleDescriptor::new(AlgebraDescriptor::diagonal(d), 1);
    let k: Vec<f64> = (1..=d).map(|j| if j <= n { j as f64 } else { 0.0 }).collect();
    AdjointableOp::right_multiplication(module, &AlgebraElement::diagonal_real(&k))
}

fn check_nd(n: usize, d: usize) -> Result<()> {
    if d == 0 || n == 0 || n > d {
        return Err(Error::InvalidParameter(format!("need 1 ≤ N ≤ d, got N = {n}, d = {d}")));
    }
    Ok(())
}

/// Λ_j x = ⟨x, e_j⟩e_j on D_d, a K-g-frame with bounds (1/N², 1).
pub fn kg_example(n: usize, d: usize) -> Result<Example> {
    check_nd(n, d)?;
    let (module, ops) = coordinate_ops(d);
    let nn = (n * n) as f64;
    Ok(Example {
        name: "kg-example".into(),
        payload: Payload::GFrame(GFrameSystem::new(module, ops)?),
        bounds: BoundsSpec::k(1.0 / nn, 1.0, coordinate_k(d, n)?),
        truncation: format!("N = {n}, d = {d}"),
    })
}

/// The same coordinate operators as a K-operator frame.
pub fn k_op_example(n: usize, d: usize) -> Result<Example> {
    check_nd(n, d)?;
    let (module, ops) = coordinate_ops(d);
    let nn = (n * n) as f64;
    Ok(Example {
        name: "k-op-example".into(),
        payload: Payload::OpFrame(OperatorFrameSystem::new(module, ops)?),
        bounds: BoundsSpec::k(1.0 / nn, 1.0, coordinate_k(d, n)?),
        truncation: format!("N = {n}, d = {d}"),
    })
}

/// T_j x = x·(1/2 + 1/j)e_j on D_d with K x = (x_i/i); *-K bounds (1, (1/2 + 1/i)_i).
pub fn star_k_op(d: usize) -> Result<Example> {
    if d == 0 {
        return Err(Error::InvalidParameter("d must be at least 1".into()));
    }
    let alg = AlgebraDescriptor::diagonal(d);
    let module = ModuleDescriptor::new(alg, 1);
    let weights: Vec<f64> = (1..=d).map(|i| 0.5 + 1.0 / i as f64).collect();
    let ops = (0..d)
        .map(|j| {
            let mut e = vec![0.0; d];
            e[j] = weights[j];
            AdjointableOp::right_multiplication(module, &AlgebraElement::diagonal_real(&e))
        })
        .collect::<Result<Vec<_>>>()?;
    let k_entries: Vec<f64> = (1..=d).map(|i| 1.0 / i as f64).collect();
    let k = AdjointableOp::right_multiplication(module, &AlgebraElement::diagonal_real(&k_entries))?;
    Ok(Example {
        name: "star-k-op".into(),
        payload: Payload::OpFrame(OperatorFrameSystem::new(module, ops)?),
        bounds: BoundsSpec::star_k(
            AlgebraElement::identity(alg),
            AlgebraElement::diagonal_real(&weights),
            k,
        ),
        truncation: format!("d = {d}"),
    })
}

/// T_i = a_i·Id with a_i = 1/i, i ≤ M, on M_2², tight at Σ 1/i².
pub fn op_tight(m: usize) -> Result<Example> {
    if m == 0 {
        return Err(Error::InvalidParameter("M must be at least 1".into()));
    }
    let module = ModuleDescriptor::new(AlgebraDescriptor::full(2), 2);
    let ops = (1..=m)
        .map(|i| AdjointableOp::scalar(module, C64::new(1.0 / i as f64, 0.0)))
        .collect();
    let total: f64 = (1..=m).map(|i| 1.0 / (i * i) as f64).sum();
    Ok(Example {
        name: "op-tight".into(),
        payload: Payload::OpFrame(OperatorFrameSystem::new(module, ops)?),
        bounds: BoundsSpec::plain(total, total),
        truncation: format!("M = {m}"),
    })
}

/// Discrete Gabor system with the periodic Gaussian window, checked at its optimal bounds.
pub fn gabor(l: usize, a: usize, b: usize) -> Result<Example> {
    if l == 0 {
        return Err(Error::InvalidLattice("L must be positive".into()));
    }
    let frame = gabor_frame(&periodic_gaussian(l), a, b)?;
    let opt = frame.optimal_scalar_bounds(&Tolerance::default());
    if !opt.is_frame {
        return Err(Error::NotAFrame);
    }
    Ok(Example {
        name: "gabor".into(),
        payload: Payload::Frame(frame),
        bounds: BoundsSpec::plain(opt.lower, opt.upper),
        truncation: format!("L = {l}, a = {a}, b = {b}"),
    })
}
