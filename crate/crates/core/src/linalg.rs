//! Dense complex matrix kernels shared by the algebra and operator layers.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;

pub fn hermitian_part(m: &CMat) -> CMat {
    (m + m.adjoint()).scale(0.5)
}

pub fn max_abs(m: &CMat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

pub fn hermitian_defect(m: &CMat) -> f64 {
    max_abs(&(m - m.adjoint()))
}

/// Eigen-decomposition of the Hermitian part, eigenvalues ascending.
pub fn herm_eig(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = CMat::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

pub fn herm_eigenvalues(m: &CMat) -> Vec<f64> {
    herm_eig(m).0
}

/// Singular values, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s: Vec<f64> = m.clone().svd(false, false).singular_values.iter().copied().collect();
    s.sort_by(|a, b| b.total_cmp(a));
    s
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Largest c with |m v| >= c |v| for every v in the domain.
pub fn lower_margin(m: &CMat) -> f64 {
    if m.ncols() == 0 {
        return f64::INFINITY;
    }
    if m.ncols() > m.nrows() {
        return 0.0;
    }
    singular_values(m).last().copied().unwrap_or(0.0)
}

/// Moore-Penrose inverse, singular values at or below `cutoff` treated as zero.
pub fn pinv(m: &CMat, cutoff: f64) -> CMat {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return CMat::zeros(c, r);
    }
    let svd = m.clone().svd(true, true);
    let u = svd.u.expect("svd u");
    let v_t = svd.v_t.expect("svd v_t");
    let mut out = CMat::zeros(c, r);
    for (k, &s) in svd.singular_values.iter().enumerate() {
        if s > cutoff {
            let vk = v_t.row(k).adjoint();
            let uk = u.column(k).adjoint();
            out += (vk * uk).scale(1.0 / s);
        }
    }
    out
}

/// Apply a real function to the spectrum of the Hermitian part.
pub fn herm_fn(m: &CMat, f: impl Fn(f64) -> f64) -> CMat {
    let (vals, vecs) = herm_eig(m);
    let n = vals.len();
    let mut d = CMat::zeros(n, n);
    for (i, &v) in vals.iter().enumerate() {
        d[(i, i)] = C64::new(f(v), 0.0);
    }
    &vecs * d * vecs.adjoint()
}

pub fn psd_sqrt(m: &CMat) -> CMat {
    herm_fn(m, |v| v.max(0.0).sqrt())
}

/// (m)^{†/2} for positive semidefinite m.
pub fn psd_pinv_sqrt(m: &CMat, cutoff: f64) -> CMat {
    herm_fn(m, |v| if v > cutoff { 1.0 / v.sqrt() } else { 0.0 })
}

/// Orthonormal basis of the column space, as columns.
pub fn range_basis(m: &CMat, cutoff: f64) -> CMat {
    let (r, c) = m.shape();
    if r == 0 || c == 0 {
        return CMat::zeros(r, 0);
    }
    let svd = m.clone().svd(true, false);
    let u = svd.u.expect("svd u");
    let keep: Vec<usize> = (0..svd.singular_values.len())
        .filter(|&k| svd.singular_values[k] > cutoff)
        .collect();
    let mut out = CMat::zeros(r, keep.len());
    for (dst, &k) in keep.iter().enumerate() {
        out.set_column(dst, &u.column(k));
    }
    out
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}
