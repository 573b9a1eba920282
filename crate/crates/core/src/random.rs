//! Seeded random instances: Gaussian elements, operators and frame systems.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::algebra::{AlgebraDescriptor, AlgebraElement, AlgebraKind};
use crate::linalg::{CMat, C64};
use crate::module::{ModuleDescriptor, ModuleElement};
use crate::operators::AdjointableOp;

pub type Rng64 = ChaCha8Rng;

pub fn rng(seed: u64) -> Rng64 {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Standard complex Gaussian: independent real and imaginary parts of variance 1/2.
pub fn complex_gaussian(rng: &mut Rng64) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

pub fn gaussian_matrix(rng: &mut Rng64, rows: usize, cols: usize) -> CMat {
    CMat::from_fn(rows, cols, |_, _| complex_gaussian(rng))
}

pub fn gaussian_element(rng: &mut Rng64, algebra: AlgebraDescriptor) -> AlgebraElement {
    let entries: Vec<C64> = (0..algebra.scalar_dim()).map(|_| complex_gaussian(rng)).collect();
    AlgebraElement::from_raw_entries(algebra, &entries).expect("entry count matches")
}

/// g* g for a Gaussian g.
pub fn gaussian_psd_element(rng: &mut Rng64, algebra: AlgebraDescriptor) -> AlgebraElement {
    let g = gaussian_element(rng, algebra);
    &g.adjoint() * &g
}

pub fn gaussian_module_element(rng: &mut Rng64, module: &ModuleDescriptor) -> ModuleElement {
    let comps = (0..module.rank)
        .map(|_| gaussian_element(rng, module.algebra))
        .collect();
    ModuleElement::new(*module, comps).expect("components match module")
}

/// Operator with i.i.d. Gaussian coefficients.
pub fn gaussian_op(rng: &mut Rng64, domain: &ModuleDescriptor, codomain: &ModuleDescriptor) -> AdjointableOp {
    let blocks = (0..domain.algebra.blocks())
        .map(|_| gaussian_matrix(rng, codomain.block_dim(), domain.block_dim()))
        .collect();
    AdjointableOp::from_blocks(*domain, *codomain, blocks).expect("block shapes match")
}

pub fn gaussian_self_adjoint(rng: &mut Rng64, module: &ModuleDescriptor) -> AdjointableOp {
    let g = gaussian_op(rng, module, module);
    g.add(&g.adjoint()).expect("same module").scale_real(0.5)
}

/// Unitary operator: Q factor of a Gaussian matrix in every block.
pub fn random_unitary(rng: &mut Rng64, module: &ModuleDescriptor) -> AdjointableOp {
    let d = module.block_dim();
    let blocks = (0..module.algebra.blocks()).map(|_| unitary_matrix(rng, d)).collect();
    AdjointableOp::from_blocks(*module, *module, blocks).expect("block shapes match")
}

pub fn unitary_matrix(rng: &mut Rng64, d: usize) -> CMat {
    let g = gaussian_matrix(rng, d, d);
    g.qr().q()
}

/// A random algebra: Full or Diagonal with dimension in 1..=3.
pub fn random_algebra(rng: &mut Rng64) -> AlgebraDescriptor {
    let n = rng.random_range(1..=3);
    if rng.random_bool(0.5) {
        AlgebraDescriptor::full(n)
    } else {
        AlgebraDescriptor::diagonal(n)
    }
}

pub fn random_module(rng: &mut Rng64, max_rank: usize) -> ModuleDescriptor {
    let algebra = random_algebra(rng);
    let rank = rng.random_range(1..=max_rank);
    ModuleDescriptor::new(algebra, rank)
}

/// Diagonal algebra element with real entries drawn uniformly from [lo, hi].
pub fn uniform_diagonal(rng: &mut Rng64, n: usize, lo: f64, hi: f64) -> AlgebraElement {
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(lo..=hi)).collect();
    AlgebraElement::diagonal_real(&v)
}

pub fn is_full(algebra: &AlgebraDescriptor) -> bool {
    algebra.kind == AlgebraKind::Full
}

/// Gaussian frame with `rank + extra` vectors; a frame almost surely.
pub fn random_frame(rng: &mut Rng64, module: &ModuleDescriptor, extra: usize) -> crate::frames::FrameSystem {
    let vectors = (0..module.rank + extra)
        .map(|_| gaussian_module_element(rng, module))
        .collect();
    crate::frames::FrameSystem::new(*module, vectors).expect("non-empty")
}

/// Gaussian g-frame whose targets have rank 1 or 2 and total rank at least that of `module`.
pub fn random_gframe(rng: &mut Rng64, module: &ModuleDescriptor, blocks: usize) -> crate::gframes::GFrameSystem {
    let mut ops = Vec::new();
    let mut total = 0;
    while ops.len() < blocks.max(1) || total < module.rank {
        let v = ModuleDescriptor::new(module.algebra, rng.random_range(1..=2));
        total += v.rank;
        ops.push(gaussian_op(rng, module, &v));
    }
    crate::gframes::GFrameSystem::new(*module, ops).expect("non-empty")
}

/// Gaussian operator frame with `count` endomorphisms.
pub fn random_opframe(
    rng: &mut Rng64,
    module: &ModuleDescriptor,
    count: usize,
) -> crate::opframes::OperatorFrameSystem {
    let ops = (0..count.max(1)).map(|_| gaussian_op(rng, module, module)).collect();
    crate::opframes::OperatorFrameSystem::new(*module, ops).expect("non-empty")
}
