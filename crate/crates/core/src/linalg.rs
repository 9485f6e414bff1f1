//! Dense complex linear algebra helpers shared by every module.
//!
//! All matrices are `nalgebra::DMatrix<Complex64>`. Rank decisions follow a
//! single policy: an eigenvalue (or singular value) counts as zero when it is
//! below [`RANK_EPS`] times the largest one.

use nalgebra::DMatrix;
use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat = DMatrix<C64>;

/// Relative threshold used for every rank decision.
pub const RANK_EPS: f64 = 1e-10;

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

#[inline]
pub fn zero() -> C64 {
    C64::new(0.0, 0.0)
}

#[inline]
pub fn one() -> C64 {
    C64::new(1.0, 0.0)
}

pub fn identity(n: usize) -> Mat {
    Mat::identity(n, n)
}

pub fn zeros(r: usize, c: usize) -> Mat {
    Mat::zeros(r, c)
}

/// Largest singular value; zero for empty matrices.
pub fn op_norm(m: &Mat) -> f64 {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0.0;
    }
    m.clone().singular_values().max()
}

pub fn max_abs(m: &Mat) -> f64 {
    m.iter().fold(0.0, |acc, z| acc.max(z.norm()))
}

/// Operator-norm defect of `u` from being an isometry (`u* u = 1`).
pub fn isometry_defect(u: &Mat) -> f64 {
    op_norm(&(u.adjoint() * u - identity(u.ncols())))
}

/// Operator-norm defect of `u` from being unitary.
pub fn unitary_defect(u: &Mat) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    isometry_defect(u).max(op_norm(&(u * u.adjoint() - identity(u.nrows()))))
}

pub fn hermitian_part(m: &Mat) -> Mat {
    (m + m.adjoint()) * c(0.5, 0.0)
}

/// Makes the first significant coordinate of `v` real and positive.
pub fn fix_phase(v: &mut [C64]) {
    let scale = v.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
    if scale == 0.0 {
        return;
    }
    if let Some(first) = v.iter().find(|z| z.norm() > 1e-8 * scale) {
        let phase = first.conj() / first.norm();
        for z in v.iter_mut() {
            *z *= phase;
        }
    }
}

/// Hermitian eigendecomposition with eigenvalues sorted in descending order
/// and eigenvector phases fixed by [`fix_phase`].
pub fn herm_eigen(m: &Mat) -> (Vec<f64>, Mat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), zeros(0, 0));
    }
    let h = to_faer(&hermitian_part(m));
    // The self-adjoint solver only fails on non-finite input.
    let eig = h.self_adjoint_eigen(faer::Side::Lower).expect("finite Hermitian matrix");
    let (s, u) = (eig.S(), eig.U());
    let vals: Vec<f64> = s.column_vector().iter().map(|z| z.re).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| vals[b].total_cmp(&vals[a]).then(a.cmp(&b)));
    let mut vecs = zeros(n, n);
    let mut sorted = Vec::with_capacity(n);
    for (dst, &src) in order.iter().enumerate() {
        sorted.push(vals[src]);
        let mut col: Vec<C64> = (0..n).map(|r| u[(r, src)]).collect();
        fix_phase(&mut col);
        vecs.column_mut(dst).copy_from_slice(&col);
    }
    (sorted, vecs)
}

fn to_faer(m: &Mat) -> faer::Mat<C64> {
    faer::Mat::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Threshold below which eigenvalues of a PSD matrix are treated as zero.
pub fn rank_cutoff(vals: &[f64]) -> f64 {
    let top = vals.iter().fold(0.0f64, |acc, &v| acc.max(v.abs()));
    RANK_EPS * top
}

/// Number of eigenvalues above the rank cutoff.
pub fn psd_rank(m: &Mat) -> usize {
    let (vals, _) = herm_eigen(m);
    let cut = rank_cutoff(&vals);
    vals.iter().filter(|&&v| v > cut && v > 0.0).count()
}

/// Applies `f` to the eigenvalues of a Hermitian matrix; eigenvalues below the
/// rank cutoff are mapped to zero.
pub fn psd_function(m: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    let (vals, vecs) = herm_eigen(m);
    let cut = rank_cutoff(&vals);
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let w = if v > cut && v > 0.0 { f(v) } else { 0.0 };
        scaled.column_mut(j).scale_mut(w);
    }
    scaled * vecs.adjoint()
}

pub fn psd_sqrt(m: &Mat) -> Mat {
    psd_function(m, f64::sqrt)
}

/// `m^{-1/2}` on the support of `m`.
pub fn psd_inv_sqrt(m: &Mat) -> Mat {
    psd_function(m, |v| 1.0 / v.sqrt())
}

/// Orthonormal basis (as columns) of the range of an orthogonal projection.
pub fn projection_range(p: &Mat) -> Mat {
    let (vals, vecs) = herm_eigen(p);
    let keep = vals.iter().take_while(|&&v| v > 0.5).count();
    vecs.columns(0, keep).into_owned()
}

/// Orthonormal basis of the range of a PSD matrix (eigenvalues above cutoff).
pub fn psd_range(m: &Mat) -> Mat {
    let (vals, vecs) = herm_eigen(m);
    let cut = rank_cutoff(&vals);
    let keep = vals.iter().take_while(|&&v| v > cut && v > 0.0).count();
    vecs.columns(0, keep).into_owned()
}

/// Orthonormal basis of the null space of `a`, via singular-value thresholding.
pub fn null_space(a: &Mat) -> Mat {
    null_space_at_scale(a, 0.0)
}

/// [`null_space`] with the cutoff taken relative to `max(σ_max, scale)`.
///
/// Systems whose coefficients have a known natural size (intertwiner
/// equations built from norm-one matrix units) pass it here, so that a system
/// that vanishes up to rounding is recognised as zero.
pub fn null_space_at_scale(a: &Mat, scale: f64) -> Mat {
    let n = a.ncols();
    if n == 0 {
        return zeros(0, 0);
    }
    if a.nrows() == 0 {
        return identity(n);
    }
    // The full SVD supplies all n right singular vectors; those past the
    // last singular value span part of the kernel as well.
    let svd = to_faer(a).svd().expect("finite matrix");
    let (sv, v) = (svd.S().column_vector(), svd.V());
    let top = sv.iter().fold(scale, |acc, z| acc.max(z.re));
    let cut = RANK_EPS * top;
    let mut cols = Vec::new();
    for i in 0..n {
        let s = if i < sv.nrows() { sv[i].re } else { 0.0 };
        if top == 0.0 || s <= cut {
            let mut col: Vec<C64> = (0..n).map(|r| v[(r, i)]).collect();
            fix_phase(&mut col);
            cols.push(col);
        }
    }
    let mut out = zeros(n, cols.len());
    for (j, col) in cols.into_iter().enumerate() {
        for (i, z) in col.into_iter().enumerate() {
            out[(i, j)] = z;
        }
    }
    out
}

/// Kronecker product with row-major composite indices `(i, k) -> i * dim_b + k`.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    a.kronecker(b)
}

/// Computes `q * (a ⊗ b)` without forming the Kronecker product.
///
/// `q` has `a.nrows() * b.nrows()` columns.
pub fn apply_kron_right(q: &Mat, a: &Mat, b: &Mat) -> Mat {
    let (p, m) = a.shape();
    let (s, n) = b.shape();
    assert_eq!(q.ncols(), p * s, "apply_kron_right: column count");
    let a_t = a.transpose();
    let mut out = zeros(q.nrows(), m * n);
    for r in 0..q.nrows() {
        let reshaped = Mat::from_fn(p, s, |i, k| q[(r, i * s + k)]);
        let prod = &a_t * reshaped * b;
        for j in 0..m {
            for t in 0..n {
                out[(r, j * n + t)] = prod[(j, t)];
            }
        }
    }
    out
}

/// Computes `(1_p ⊗ a) (b ⊗ 1_q)` without forming either Kronecker product.
///
/// `a` maps `C^m ⊗ C^q -> C^r` and `b` maps `C^n -> C^p ⊗ C^m`; the result maps
/// `C^n ⊗ C^q -> C^p ⊗ C^r`.
pub fn kron_mix(p: usize, a: &Mat, b: &Mat, q: usize) -> Mat {
    let r = a.nrows();
    let n = b.ncols();
    assert_eq!(b.nrows() % p.max(1), 0, "kron_mix: row count of b");
    let m = if p == 0 { 0 } else { b.nrows() / p };
    assert_eq!(a.ncols(), m * q, "kron_mix: column count of a");
    let mut out = zeros(p * r, n * q);
    for s in 0..q {
        // a_s[t, k] = a[t, (k, s)]
        let a_s = Mat::from_fn(r, m, |t, k| a[(t, k * q + s)]);
        for i in 0..p {
            let b_i = b.rows(i * m, m);
            let blk = &a_s * b_i;
            for t in 0..r {
                for j in 0..n {
                    out[(i * r + t, j * q + s)] = blk[(t, j)];
                }
            }
        }
    }
    out
}

/// Right inverse `e* (e e*)^{-1}` of a matrix with full row rank.
pub fn right_inverse(e: &Mat) -> Option<Mat> {
    if e.nrows() == 0 {
        return Some(zeros(e.ncols(), 0));
    }
    let gram = e * e.adjoint();
    let inv = gram.try_inverse()?;
    Some(e.adjoint() * inv)
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[Mat]) -> Mat {
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let cols: usize = blocks.iter().map(|b| b.ncols()).sum();
    let mut out = zeros(rows, cols);
    let (mut r, mut c0) = (0, 0);
    for b in blocks {
        out.view_mut((r, c0), b.shape()).copy_from(b);
        r += b.nrows();
        c0 += b.ncols();
    }
    out
}

/// `exp(i * eps * h)` for a Hermitian `h`.
pub fn unitary_rotation(h: &Mat, eps: f64) -> Mat {
    let (vals, vecs) = herm_eigen(h);
    let mut scaled = vecs.clone();
    for (j, &v) in vals.iter().enumerate() {
        let phase = C64::from_polar(1.0, eps * v);
        for i in 0..scaled.nrows() {
            scaled[(i, j)] *= phase;
        }
    }
    scaled * vecs.adjoint()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample(r: usize, cc: usize, seed: u64) -> Mat {
        Mat::from_fn(r, cc, |i, j| {
            let t = (seed as f64 + 1.0) * 0.37 + i as f64 * 1.3 + j as f64 * 0.71;
            c(t.sin(), (1.7 * t).cos())
        })
    }

    #[test]
    fn apply_kron_matches_dense() {
        let a = sample(3, 2, 1);
        let b = sample(2, 4, 2);
        let q = sample(5, 6, 3);
        let dense = &q * kron(&a, &b);
        assert!(max_abs(&(dense - apply_kron_right(&q, &a, &b))) < 1e-12);
    }

    #[test]
    fn kron_mix_matches_dense() {
        let (p, m, q, r, n) = (2, 3, 2, 4, 5);
        let a = sample(r, m * q, 4);
        let b = sample(p * m, n, 5);
        let dense = kron(&identity(p), &a) * kron(&b, &identity(q));
        assert!(max_abs(&(dense - kron_mix(p, &a, &b, q))) < 1e-12);
    }

    #[test]
    fn null_space_of_rank_deficient() {
        let a = sample(2, 4, 6);
        let ns = null_space(&a);
        assert_eq!(ns.ncols(), 2);
        assert!(max_abs(&(&a * &ns)) < 1e-12);
        assert!(isometry_defect(&ns) < 1e-12);
    }

    #[test]
    fn rounding_noise_is_zero_at_unit_scale() {
        let noise = identity(3) * c(1e-17, 0.0);
        assert_eq!(null_space(&noise).ncols(), 0);
        assert_eq!(null_space_at_scale(&noise, 1.0).ncols(), 3);
    }

    #[test]
    fn eigen_sorted_descending_and_phase_fixed() {
        let s = sample(4, 4, 7);
        let h = &s * s.adjoint();
        let (vals, vecs) = herm_eigen(&h);
        assert!(vals.windows(2).all(|w| w[0] >= w[1]));
        for j in 0..4 {
            let col: Vec<C64> = vecs.column(j).iter().copied().collect();
            let first = col.iter().find(|z| z.norm() > 1e-8).unwrap();
            assert!(first.im.abs() < 1e-12 && first.re > 0.0);
        }
    }

    #[test]
    fn sqrt_squares_back() {
        let s = sample(3, 3, 8);
        let h = &s * s.adjoint();
        let r = psd_sqrt(&h);
        assert!(max_abs(&(&r * &r - &h)) < 1e-10);
        let ri = psd_inv_sqrt(&h);
        assert!(max_abs(&(&ri * &h * &ri - identity(3))) < 1e-8);
    }

    #[test]
    fn rotation_is_unitary_and_close() {
        let s = sample(3, 3, 9);
        let h = hermitian_part(&s);
        let u = unitary_rotation(&h, 1e-3);
        assert!(unitary_defect(&u) < 1e-12);
        assert!(op_norm(&(u - identity(3))) < 1e-2);
    }
}
