use std::f64::consts::PI;

use nalgebra::DVector;

use crate::algebra::AlgebraDescriptor;
use crate::error::{Error, Result};
use crate::linalg::C64;
use crate::module::{ModuleDescriptor, ModuleElement};

use super::FrameSystem;

/// Discrete Gabor system {M_{mb} T_{na} g} in ℂ^L, n-major ordering.
///
/// (T_{na} g)[x] = g[(x − na) mod L] and (M_{mb} g)[x] = e^{2πi·mb·x/L} g[x].
pub fn gabor_frame(g: &[C64], a: usize, b: usize) -> Result<FrameSystem> {
    let l = g.len();
    if l == 0 || a == 0 || b == 0 || !l.is_multiple_of(a) || !l.is_multiple_of(b) {
        return Err(Error::InvalidLattice(format!("a = {a}, b = {b} must divide L = {l}")));
    }
    if g.iter().all(|z| z.norm() == 0.0) {
        return Err(Error::InvalidParameter("window must be nonzero".into()));
    }
    let module = ModuleDescriptor::new(AlgebraDescriptor::full(1), l);
    let mut vectors = Vec::with_capacity((l / a) * (l / b));
    for n in 0..l / a {
        for m in 0..l / b {
            let v = DVector::from_fn(l, |x, _| {
                let phase = 2.0 * PI * ((m * b * x) % l) as f64 / l as f64;
                C64::from_polar(1.0, phase) * g[(x + l - (n * a) % l) % l]
            });
            vectors.push(ModuleElement::from_vector(module, &v)?);
        }
    }
    FrameSystem::new(module, vectors)
}

/// exp(−π d(x)²/L) with d the periodic distance to 0, normalised to unit ℓ² norm.
pub fn periodic_gaussian(l: usize) -> Vec<C64> {
    let raw: Vec<f64> = (0..l)
        .map(|x| {
            let d = x.min(l - x) as f64;
            (-PI * d * d / l as f64).exp()
        })
        .collect();
    let norm = raw.iter().map(|v| v * v).sum::<f64>().sqrt();
    raw.iter().map(|v| C64::new(v / norm, 0.0)).collect()
}
