//! The relative tensor products `X ⋋ Y = XB(-1/2) ⊗_B Y` and
//! `X ⋌ Y = X ⊗_B B(-1/2)Y`, and the structural maps between them.
//!
//! Both products are quotients of a spanning family indexed by
//! `(a, s) ↦ a·dim Y + s`. For `⋋` the family is `x_a ⊗ e_s` with
//! `x_a = R(c_B)^{-1/2} e_a` the Hilbert-Schmidt orthonormal bounded vectors
//! of `X`; for `⋌` it is `e_a ⊗ y_s` with `y_s = L(c_B)^{-1/2} e_s`. The
//! families' normalizations are stored as `left_norm`/`right_norm`.
//!
//! The Gram matrix of either family factors isometrically through the fusion
//! space `K = ⊕_l X f^l_00 ⊗ f^l_00 Y` via
//! `Φ(ξ ⊗ η) = Σ_i ξ f^l_{i0} ⊗ f^l_{0i} η`, so the quotient coordinates are
//! `Q = W* Φ'` for the eigenbasis `W` of `Φ'Φ'*`; this gives `Q* Q = Gram`
//! without forming the Gram matrix itself.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::algebra::{standard_form, MultiMatrixAlgebra};
use crate::bimodule::{matrix_extension, Bimodule, Morphism, ACTION_TOL};
use crate::bounded::{self, LeftRealization, RightRealization};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TensorKind {
    /// `X ⋋ Y`: bounded vectors taken from the left factor.
    Left,
    /// `X ⋌ Y`: bounded vectors taken from the right factor.
    Right,
}

impl TensorKind {
    pub fn as_str(self) -> &'static str {
        match self {
            TensorKind::Left => "left",
            TensorKind::Right => "right",
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            TensorKind::Left => "⋋",
            TensorKind::Right => "⋌",
        }
    }
}

#[derive(Clone, Debug)]
pub struct TensorProduct {
    kind: TensorKind,
    left: Arc<Bimodule>,
    right: Arc<Bimodule>,
    left_norm: Mat,
    left_norm_inv: Mat,
    right_norm: Mat,
    right_norm_inv: Mat,
    /// `r × (dim X · dim Y)`, with `Q* Q` the Gram matrix of the family.
    quotient: Mat,
    /// `Q* Λ^{-1}`, a right inverse of `Q`.
    pinv: Mat,
    eigenvalues: Vec<f64>,
    /// Isometry from quotient coordinates into the fusion space.
    fusion: Mat,
    fusion_dim: usize,
    result: Arc<Bimodule>,
}

fn require_composable(x: &Bimodule, y: &Bimodule) -> Result<()> {
    if x.right_algebra() != y.left_algebra() {
        return Err(Error::AlgebraMismatch(format!(
            "right algebra {:?} of the left factor differs from left algebra {:?} of the right factor",
            x.right_algebra().blocks(),
            y.left_algebra().blocks()
        )));
    }
    Ok(())
}

/// Orthonormal bases of `X f^l_00` for every block `l` of the right algebra.
fn right_corner_ranges(x: &Bimodule) -> Vec<Mat> {
    (0..x.right_algebra().num_blocks())
        .map(|l| linalg::projection_range(&linalg::hermitian_part(x.right_unit_at(l, 0, 0))))
        .collect()
}

/// Orthonormal bases of `f^l_00 Y` for every block `l` of the left algebra.
fn left_corner_ranges(y: &Bimodule) -> Vec<Mat> {
    (0..y.left_algebra().num_blocks())
        .map(|l| linalg::projection_range(&linalg::hermitian_part(y.left_unit_at(l, 0, 0))))
        .collect()
}

pub fn tensor(kind: TensorKind, x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<TensorProduct> {
    require_composable(x, y)?;
    let b = x.right_algebra().clone();
    let (dx, dy) = (x.dim(), y.dim());
    let (left_norm, left_norm_inv, right_norm, right_norm_inv) = match kind {
        TensorKind::Left => {
            (x.right_size_power(-0.5), x.right_size_power(0.5), linalg::identity(dy), linalg::identity(dy))
        }
        TensorKind::Right => {
            (linalg::identity(dx), linalg::identity(dx), y.left_size_power(-0.5), y.left_size_power(0.5))
        }
    };

    let vx = right_corner_ranges(x);
    let vy = left_corner_ranges(y);
    let fusion_dim: usize = vx.iter().zip(&vy).map(|(p, q)| p.ncols() * q.ncols()).sum();
    let mut phi = linalg::zeros(fusion_dim, dx * dy);
    let mut row = 0;
    for (l, &m) in b.blocks().iter().enumerate() {
        let (p, q) = (&vx[l], &vy[l]);
        let rows = p.ncols() * q.ncols();
        if rows == 0 {
            continue;
        }
        let mut block = linalg::zeros(rows, dx * dy);
        for i in 0..m {
            let a = p.adjoint() * x.right_unit_at(l, i, 0) * &left_norm;
            let c = q.adjoint() * y.left_unit_at(l, 0, i) * &right_norm;
            block += linalg::kron(&a, &c);
        }
        phi.rows_mut(row, rows).copy_from(&block);
        row += rows;
    }

    let (vals, mut w) = linalg::herm_eigen(&(&phi * phi.adjoint()));
    let cut = linalg::rank_cutoff(&vals);
    let rank = vals.iter().take_while(|&&v| v > cut && v > 0.0).count();
    let eigenvalues: Vec<f64> = vals[..rank].to_vec();
    let mut quotient = linalg::zeros(rank, dx * dy);
    for k in 0..rank {
        let mut qrow = w.column(k).adjoint() * &phi;
        // Fix the phase of the Gram eigenvector Q_k* / √λ_k.
        let scale = qrow.iter().fold(0.0f64, |acc, z| acc.max(z.norm()));
        if let Some(first) = qrow.iter().find(|z| z.norm() > 1e-8 * scale) {
            let theta = *first / first.norm();
            qrow *= theta.conj();
            let col = w.column(k) * theta;
            w.column_mut(k).copy_from(&col);
        }
        quotient.row_mut(k).copy_from(&qrow);
    }
    let fusion = w.columns(0, rank).into_owned();
    let mut pinv = quotient.adjoint();
    for (k, &v) in eigenvalues.iter().enumerate() {
        pinv.column_mut(k).scale_mut(1.0 / v);
    }

    // Actions on the fusion space, transported to quotient coordinates.
    let left_on_fusion = |m: &Mat| -> Mat {
        let blocks: Vec<Mat> =
            vx.iter().zip(&vy).map(|(p, q)| linalg::kron(&(p.adjoint() * m * p), &linalg::identity(q.ncols()))).collect();
        linalg::direct_sum(&blocks)
    };
    let right_on_fusion = |m: &Mat| -> Mat {
        let blocks: Vec<Mat> =
            vx.iter().zip(&vy).map(|(p, q)| linalg::kron(&linalg::identity(p.ncols()), &(q.adjoint() * m * q))).collect();
        linalg::direct_sum(&blocks)
    };
    let fa = fusion.adjoint();
    let left_action: Vec<Mat> = x.left_actions().iter().map(|m| &fa * left_on_fusion(m) * &fusion).collect();
    let right_action: Vec<Mat> = y.right_actions().iter().map(|m| &fa * right_on_fusion(m) * &fusion).collect();
    let result = Bimodule::from_actions_unchecked(
        x.left_algebra().clone(),
        y.right_algebra().clone(),
        rank,
        left_action,
        right_action,
    )?;

    Ok(TensorProduct {
        kind,
        left: x.clone(),
        right: y.clone(),
        left_norm,
        left_norm_inv,
        right_norm,
        right_norm_inv,
        quotient,
        pinv,
        eigenvalues,
        fusion,
        fusion_dim,
        result: Arc::new(result),
    })
}

/// `X ⋋ Y`.
pub fn tensor_left(x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<TensorProduct> {
    tensor(TensorKind::Left, x, y)
}

/// `X ⋌ Y`.
pub fn tensor_right(x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<TensorProduct> {
    tensor(TensorKind::Right, x, y)
}

impl TensorProduct {
    pub fn kind(&self) -> TensorKind {
        self.kind
    }

    pub fn left(&self) -> &Arc<Bimodule> {
        &self.left
    }

    pub fn right(&self) -> &Arc<Bimodule> {
        &self.right
    }

    pub fn middle_algebra(&self) -> &MultiMatrixAlgebra {
        self.left.right_algebra()
    }

    pub fn result(&self) -> &Arc<Bimodule> {
        &self.result
    }

    pub fn dim(&self) -> usize {
        self.result.dim()
    }

    pub fn gram_rank(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn quotient(&self) -> &Mat {
        &self.quotient
    }

    pub fn quotient_pinv(&self) -> &Mat {
        &self.pinv
    }

    /// Normalization of the left factor in the spanning family.
    pub fn left_norm(&self) -> &Mat {
        &self.left_norm
    }

    pub fn right_norm(&self) -> &Mat {
        &self.right_norm
    }

    pub fn left_norm_inv(&self) -> &Mat {
        &self.left_norm_inv
    }

    pub fn right_norm_inv(&self) -> &Mat {
        &self.right_norm_inv
    }

    /// Isometry from quotient coordinates into the fusion space.
    pub fn fusion(&self) -> &Mat {
        &self.fusion
    }

    pub fn fusion_dim(&self) -> usize {
        self.fusion_dim
    }

    /// The Gram matrix `Q* Q` of the spanning family.
    pub fn gram(&self) -> Mat {
        self.quotient.adjoint() * &self.quotient
    }

    /// Quotient coordinates of the family element `(a, s)`.
    pub fn family_column(&self, a: usize, s: usize) -> Mat {
        self.quotient.columns(a * self.right.dim() + s, 1).into_owned()
    }

    /// Largest relative violation of `L_res Q = Q (L ⊗ 1)` and
    /// `R_res Q = Q (1 ⊗ R)` over matrix units.
    pub fn action_defect(&self) -> f64 {
        let (dx, dy) = (self.left.dim(), self.right.dim());
        let scale = self.quotient.norm().max(1.0);
        let mut d = 0.0f64;
        for (l, lr) in self.left.left_actions().iter().zip(self.result.left_actions()) {
            let lhs = linalg::apply_kron_right(&self.quotient, l, &linalg::identity(dy));
            d = d.max((lhs - lr * &self.quotient).norm() / scale);
        }
        for (r, rr) in self.right.right_actions().iter().zip(self.result.right_actions()) {
            let lhs = linalg::apply_kron_right(&self.quotient, &linalg::identity(dx), r);
            d = d.max((lhs - rr * &self.quotient).norm() / scale);
        }
        d
    }

    /// `‖Q Q⁺ − 1‖`.
    pub fn quotient_defect(&self) -> f64 {
        let r = self.quotient.nrows();
        linalg::op_norm(&(&self.quotient * &self.pinv - linalg::identity(r)))
    }

    /// Solves `T Q = family` for a map defined on the spanning family,
    /// asserting that `family` vanishes on the null space of the Gram matrix.
    pub(crate) fn extend_from_family(&self, family: &Mat, context: &str) -> Result<Mat> {
        let t = family * &self.pinv;
        let defect = (&t * &self.quotient - family).norm();
        if defect > ACTION_TOL * family.norm().max(1.0) {
            return Err(Error::NotWellDefined { context: context.into(), defect });
        }
        Ok(t)
    }
}

/// The Gram matrix of the spanning family computed entrywise from the
/// operator-valued inner products of bounded vectors:
/// `(x⊗η | x'⊗η') = (η | [x,x']_B η')` and `(ξ⊗y | ξ'⊗y') = (ξ | ξ'·_B[y',y])`.
///
/// Quadratic in the family size; the direct route for [`TensorProduct::gram`].
pub fn gram_matrix(kind: TensorKind, x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Mat> {
    require_composable(x, y)?;
    let (dx, dy) = (x.dim(), y.dim());
    let mut g = linalg::zeros(dx * dy, dx * dy);
    match kind {
        TensorKind::Left => {
            let basis = bounded::right_bounded_basis(x);
            for a in 0..dx {
                for b in 0..dx {
                    let ip = bounded::right_inner(&basis[a], &basis[b])?;
                    let l = y.act_left_flat(&ip.to_flat());
                    g.view_mut((a * dy, b * dy), (dy, dy)).copy_from(&l);
                }
            }
        }
        TensorKind::Right => {
            let basis = bounded::left_bounded_basis(y);
            for s in 0..dy {
                for t in 0..dy {
                    let ip = bounded::left_inner(&basis[t], &basis[s])?;
                    let r = x.act_right_flat(&ip.to_flat());
                    for a in 0..dx {
                        for b in 0..dx {
                            g[(a * dy + s, b * dy + t)] = r[(a, b)];
                        }
                    }
                }
            }
        }
    }
    Ok(g)
}

/// `f ⊙ g` as a matrix between quotient coordinates, without the
/// well-definedness assertion. Also returns the well-definedness defect
/// `‖Q'(F ⊗ G) − T Q‖`, relative to `‖Q'(F ⊗ G)‖`.
pub fn tensor_morphism_matrix(f: &Mat, g: &Mat, source: &TensorProduct, target: &TensorProduct) -> (Mat, f64) {
    // Coefficients of the image of a family element in the target family.
    let f2 = &target.left_norm_inv * f * &source.left_norm;
    let g2 = &target.right_norm_inv * g * &source.right_norm;
    let lifted = linalg::apply_kron_right(&target.quotient, &f2, &g2);
    let t = &lifted * &source.pinv;
    let defect = (&t * &source.quotient - &lifted).norm() / lifted.norm().max(1.0);
    (t, defect)
}

/// `f ⊙ g: X ⊙ Y → X' ⊙ Y'` for `f: X → X'` and `g: Y → Y'`.
pub fn tensor_morphisms(
    f: &Morphism,
    g: &Morphism,
    source: &TensorProduct,
    target: &TensorProduct,
) -> Result<Morphism> {
    if source.kind != target.kind {
        return Err(Error::AlgebraMismatch("tensor products of different kinds".into()));
    }
    let shapes = [
        (f.matrix().ncols(), source.left.dim()),
        (f.matrix().nrows(), target.left.dim()),
        (g.matrix().ncols(), source.right.dim()),
        (g.matrix().nrows(), target.right.dim()),
    ];
    if shapes.iter().any(|(a, b)| a != b) {
        return Err(Error::DimensionMismatch("morphisms do not match the tensor factors".into()));
    }
    let (t, defect) = tensor_morphism_matrix(f.matrix(), g.matrix(), source, target);
    if defect > ACTION_TOL {
        return Err(Error::NotWellDefined { context: "tensor of morphisms".into(), defect });
    }
    Morphism::new_unchecked(source.result.clone(), target.result.clone(), t)
}

/// Builds `X ⊙ Y`, `X' ⊙ Y'` and `f ⊙ g`.
pub fn tensor_morphisms_of(kind: TensorKind, f: &Morphism, g: &Morphism) -> Result<Morphism> {
    let source = tensor(kind, f.source(), g.source())?;
    let target = tensor(kind, f.target(), g.target())?;
    tensor_morphisms(f, g, &source, &target)
}

/// `l_X: L²(A) ⊙ X → X`, `α ⊗ ξ ↦ αξ`, on a product whose left factor is the
/// standard form of the left algebra of `X`.
pub fn left_unitor(product: &TensorProduct) -> Result<Morphism> {
    let x = product.right.clone();
    let a = x.left_algebra();
    if product.left.left_algebra() != a || product.left.dim() != a.dim() {
        return Err(Error::AlgebraMismatch("left factor is not the standard form".into()));
    }
    let d = x.dim();
    let mut family = linalg::zeros(d, a.dim() * d);
    for u in 0..a.dim() {
        let alpha: Vec<C64> = product.left_norm.column(u).iter().copied().collect();
        let block = x.act_left_flat(&alpha) * &product.right_norm;
        family.columns_mut(u * d, d).copy_from(&block);
    }
    let t = product.extend_from_family(&family, "left unit isomorphism")?;
    Morphism::new_unchecked(product.result.clone(), x, t)
}

/// `r_X: X ⊙ L²(B) → X`, `ξ ⊗ β ↦ ξβ`.
pub fn right_unitor(product: &TensorProduct) -> Result<Morphism> {
    let x = product.left.clone();
    let b = x.right_algebra();
    if product.right.right_algebra() != b || product.right.dim() != b.dim() {
        return Err(Error::AlgebraMismatch("right factor is not the standard form".into()));
    }
    let (d, db) = (x.dim(), b.dim());
    let mut family = linalg::zeros(d, d * db);
    for u in 0..db {
        let beta: Vec<C64> = product.right_norm.column(u).iter().copied().collect();
        let img = x.act_right_flat(&beta) * &product.left_norm;
        for a in 0..d {
            family.column_mut(a * db + u).copy_from(&img.column(a));
        }
    }
    let t = product.extend_from_family(&family, "right unit isomorphism")?;
    Morphism::new_unchecked(product.result.clone(), x, t)
}

/// The unit isomorphisms `(l_X, r_X)` of the given kind.
pub fn unit_isos(kind: TensorKind, x: &Arc<Bimodule>) -> Result<(Morphism, Morphism)> {
    let la = standard_form(x.left_algebra()).bimodule().clone();
    let lb = standard_form(x.right_algebra()).bimodule().clone();
    let l = left_unitor(&tensor(kind, &la, x)?)?;
    let r = right_unitor(&tensor(kind, x, &lb)?)?;
    Ok((l, r))
}

/// `a: (X ⊙ Y) ⊙ Z → X ⊙ (Y ⊙ Z)` from prebuilt products.
///
/// On the spanning family `(x ⊗ y) ⊗ ζ` (for `⋋`, with `x ⊗ y` embedded into
/// `(X ⋋ Y) C(-1/2)` as `γ ↦ x ⊗ yγ`) and `ξ ⊗ (y ⊗ z)` (for `⋌`), the two
/// sides are `Q_S (E ⊗ 1)` and `Q_T (1 ⊗ F)`; `E` has full row rank, so
/// `a = Q_T (1 ⊗ F)(E⁺ ⊗ 1) Q_S⁺`.
pub fn associator_from(
    xy: &TensorProduct,
    yz: &TensorProduct,
    source: &TensorProduct,
    target: &TensorProduct,
) -> Result<Morphism> {
    let kind = xy.kind;
    if [yz.kind, source.kind, target.kind].iter().any(|&k| k != kind) {
        return Err(Error::AlgebraMismatch("associator over products of different kinds".into()));
    }
    let (dx, dy, dz) = (xy.left.dim(), xy.right.dim(), yz.right.dim());
    if source.left.dim() != xy.dim()
        || target.right.dim() != yz.dim()
        || source.right.dim() != dz
        || target.left.dim() != dx
        || yz.left.dim() != dy
    {
        return Err(Error::DimensionMismatch("associator factors do not match".into()));
    }
    let (e, f) = match kind {
        TensorKind::Left => {
            // Value of γ ↦ x_a ⊗ y_s γ at 1, in the family coordinates of the source.
            let e = &source.left_norm_inv * linalg::apply_kron_right(&xy.quotient, &linalg::identity(dx), &yz.left_norm);
            (e, yz.quotient.clone())
        }
        TensorKind::Right => {
            let f = &target.right_norm_inv * linalg::apply_kron_right(&yz.quotient, &xy.right_norm, &linalg::identity(dz));
            (xy.quotient.clone(), f)
        }
    };
    let e_pinv = linalg::right_inverse(&e)
        .ok_or_else(|| Error::NotWellDefined { context: "associator embedding".into(), defect: f64::INFINITY })?;
    let mid = linalg::kron_mix(dx, &f, &e_pinv, dz);
    let a = &target.quotient * mid * &source.pinv;

    // a Q_S (E ⊗ 1) = Q_T (1 ⊗ F), checked one left index at a time.
    let ryz = yz.dim();
    let mut defect = 0.0f64;
    let mut scale = 1.0f64;
    for i in 0..dx {
        let e_i = e.columns(i * dy, dy).into_owned();
        let lhs = &a * linalg::apply_kron_right(&source.quotient, &e_i, &linalg::identity(dz));
        let rhs = target.quotient.columns(i * ryz, ryz) * &f;
        scale = scale.max(rhs.norm());
        defect = defect.max((lhs - rhs).norm());
    }
    if defect > ACTION_TOL * scale {
        return Err(Error::NotWellDefined { context: "associator".into(), defect });
    }
    Morphism::new_unchecked(source.result.clone(), target.result.clone(), a)
}

/// `a_{X,Y,Z}` of the given kind, building all intermediate products.
pub fn associator(kind: TensorKind, x: &Arc<Bimodule>, y: &Arc<Bimodule>, z: &Arc<Bimodule>) -> Result<Morphism> {
    let xy = tensor(kind, x, y)?;
    let yz = tensor(kind, y, z)?;
    let source = tensor(kind, xy.result(), z)?;
    let target = tensor(kind, x, yz.result())?;
    associator_from(&xy, &yz, &source, &target)
}

/// The identification `(^I X) ⊙ (Y^J) ≅ ^I(X ⊙ Y)^J`, entrywise on arrays.
pub fn tensor_matrix_extension_iso(
    x: &Arc<Bimodule>,
    y: &Arc<Bimodule>,
    n_i: usize,
    n_j: usize,
    kind: TensorKind,
) -> Result<Morphism> {
    if n_i == 0 || n_j == 0 {
        return Err(Error::InvalidAlgebra("matrix extension indices must be positive".into()));
    }
    let bx = Arc::new(matrix_extension(x, n_i, 1)?);
    let by = Arc::new(matrix_extension(y, 1, n_j)?);
    let big = tensor(kind, &bx, &by)?;
    let small = tensor(kind, x, y)?;
    let target = Arc::new(matrix_extension(small.result(), n_i, n_j)?);
    let (dx, dy, r) = (x.dim(), y.dim(), small.dim());
    let mut family = linalg::zeros(target.dim(), bx.dim() * by.dim());
    for i in 0..n_i {
        let mx = &small.left_norm_inv * big.left_norm.view((i * dx, i * dx), (dx, dx));
        for j in 0..n_j {
            let my = &small.right_norm_inv * big.right_norm.view((j * dy, j * dy), (dy, dy));
            let img = linalg::apply_kron_right(&small.quotient, &mx, &my);
            let row = (i * n_j + j) * r;
            for a in 0..dx {
                for s in 0..dy {
                    let col = (i * dx + a) * (n_j * dy) + j * dy + s;
                    family.view_mut((row, col), (r, 1)).copy_from(&img.column(a * dy + s));
                }
            }
        }
    }
    let t = big.extend_from_family(&family, "matrix extension identification")?;
    Morphism::new_unchecked(big.result.clone(), target, t)
}

/// `^I m^J: (^I L²(B)) ⋋ (L²(B)^J) → (^I L²(B)) ⋌ (L²(B)^J)`, assembled from
/// the matrix-extension identifications and the entrywise unit
/// isomorphisms of `L²(B) ⊙ L²(B)`.
pub fn m_standard(b: &MultiMatrixAlgebra, n_i: usize, n_j: usize) -> Result<Morphism> {
    let l2 = standard_form(b).bimodule().clone();
    let mut halves = Vec::new();
    for kind in [TensorKind::Left, TensorKind::Right] {
        let ext = tensor_matrix_extension_iso(&l2, &l2, n_i, n_j, kind)?;
        let unit = left_unitor(&tensor(kind, &l2, &l2)?)?;
        let entrywise = linalg::kron(&linalg::identity(n_i * n_j), unit.matrix());
        halves.push((ext.source().clone(), entrywise * ext.matrix()));
    }
    let (src, m_left) = &halves[0];
    let (tgt, m_right) = &halves[1];
    Morphism::new_unchecked(src.clone(), tgt.clone(), m_right.adjoint() * m_left)
}

/// `B`-valued arrays `(U n e_a)_i` for a realization matrix `U` stacked over
/// frame indices, grouped per block: element `[l]` is the matrix whose
/// `(a, i)` block (each `m_l × m_l`) is the `l`-th block of `(U n e_a)_i`.
fn block_arrays(b: &MultiMatrixAlgebra, u: &Mat, n: &Mat) -> Vec<Vec<Vec<Mat>>> {
    let db = b.dim();
    let frames = if db == 0 { 0 } else { u.nrows() / db };
    let un = u * n;
    (0..b.num_blocks())
        .map(|l| {
            let m = b.blocks()[l];
            let o = b.offset(l);
            (0..un.ncols())
                .map(|a| (0..frames).map(|i| Mat::from_fn(m, m, |p, q| un[(i * db + o + p * m + q, a)])).collect())
                .collect()
        })
        .collect()
}

/// `m_{X,Y}: X ⋋ Y → X ⋌ Y` through the given projective realizations.
///
/// With `u: X_B → p ^IL²(B)` and `v: _BY → L²(B)^J q`, both products embed
/// isometrically into `^IL²(B)^J`: `x ⊗ η ↦ ((u∘x)_i (vη)_j)_{ij}` and
/// `ξ ⊗ y ↦ ((uξ)_i (v∘y)_j)_{ij}`. Calling these `K_⋋` and `K_⋌`,
/// `m = K_⋌* K_⋋`; the Gram matrix between the two families is contracted
/// blockwise so the array space is never formed.
pub fn m_iso_from(
    left: &TensorProduct,
    right: &TensorProduct,
    rx: &RightRealization,
    ly: &LeftRealization,
) -> Result<Morphism> {
    if left.kind != TensorKind::Left || right.kind != TensorKind::Right {
        return Err(Error::AlgebraMismatch("m expects a ⋋ product and a ⋌ product".into()));
    }
    let b = left.middle_algebra().clone();
    let (dx, dy) = (left.left.dim(), left.right.dim());
    if rx.u.ncols() != dx || ly.v.ncols() != dy {
        return Err(Error::DimensionMismatch("realizations do not match the factors".into()));
    }
    // u∘x_a and uξ_a, v η_s and v∘y_s.
    let bl = block_arrays(&b, &rx.u, &left.left_norm);
    let br = block_arrays(&b, &rx.u, &right.left_norm);
    let vl = block_arrays(&b, &ly.v, &left.right_norm);
    let vr = block_arrays(&b, &ly.v, &right.right_norm);

    // G[(a',s'),(a,s)] = Σ_l tr(P_l(a',a) R_l(s,s')) with
    // P(a',a) = Σ_i b'_i(a')* b_i(a) and R(s,s') = Σ_j v_j(s) v'_j(s')*.
    let n = dx * dy;
    let mut g = linalg::zeros(n, n);
    for l in 0..b.num_blocks() {
        let m = b.blocks()[l];
        let mm = m * m;
        let mut p = linalg::zeros(dx * dx, mm);
        for a2 in 0..dx {
            for a in 0..dx {
                let mut acc = linalg::zeros(m, m);
                for (x2, x1) in br[l][a2].iter().zip(&bl[l][a]) {
                    acc += x2.adjoint() * x1;
                }
                for pp in 0..m {
                    for qq in 0..m {
                        p[(a2 * dx + a, pp * m + qq)] = acc[(pp, qq)];
                    }
                }
            }
        }
        let mut r = linalg::zeros(mm, dy * dy);
        for s in 0..dy {
            for s2 in 0..dy {
                let mut acc = linalg::zeros(m, m);
                for (y1, y2) in vl[l][s].iter().zip(&vr[l][s2]) {
                    acc += y1 * y2.adjoint();
                }
                for pp in 0..m {
                    for qq in 0..m {
                        // tr(P R) = Σ P[p,q] R[q,p]
                        r[(pp * m + qq, s * dy + s2)] = acc[(qq, pp)];
                    }
                }
            }
        }
        let pr = p * r;
        for a2 in 0..dx {
            for a in 0..dx {
                for s in 0..dy {
                    for s2 in 0..dy {
                        g[(a2 * dy + s2, a * dy + s)] += pr[(a2 * dx + a, s * dy + s2)];
                    }
                }
            }
        }
    }
    let m = right.pinv.adjoint() * g * &left.pinv;
    Morphism::new_unchecked(left.result.clone(), right.result.clone(), m)
}

/// `m_{X,Y}` using the Hilbert-Schmidt bases as frames.
pub fn m_iso(x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Morphism> {
    let left = tensor_left(x, y)?;
    let right = tensor_right(x, y)?;
    let rx = bounded::right_projective_realization(x)?;
    let ly = bounded::left_projective_realization(y)?;
    m_iso_from(&left, &right, &rx, &ly)
}

/// The identification of `X ⋋ Y` and `X ⋌ Y` through their common fusion
/// space; agrees with `m_{X,Y}` and serves as an independent route to it.
pub fn m_fusion(left: &TensorProduct, right: &TensorProduct) -> Result<Morphism> {
    if left.fusion.nrows() != right.fusion.nrows() {
        return Err(Error::DimensionMismatch("products over different factors".into()));
    }
    Morphism::new_unchecked(left.result.clone(), right.result.clone(), right.fusion.adjoint() * &left.fusion)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c1() -> MultiMatrixAlgebra {
        MultiMatrixAlgebra::complex()
    }

    fn m2() -> MultiMatrixAlgebra {
        MultiMatrixAlgebra::full_matrix(2).unwrap()
    }

    fn canon(a: &MultiMatrixAlgebra, b: &MultiMatrixAlgebra, mu: &[Vec<usize>]) -> Arc<Bimodule> {
        Arc::new(Bimodule::from_multiplicities(a, b, mu).unwrap())
    }

    fn sample() -> (Arc<Bimodule>, Arc<Bimodule>) {
        let a = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let b = MultiMatrixAlgebra::new(vec![2, 1]).unwrap();
        let c = MultiMatrixAlgebra::new(vec![2]).unwrap();
        let x = canon(&a, &b, &[vec![1, 0], vec![1, 2]]);
        let y = canon(&b, &c, &[vec![1], vec![2]]);
        (x, y)
    }

    #[test]
    fn row_times_column_is_one_dimensional() {
        let row = canon(&c1(), &m2(), &[vec![1]]);
        let col = canon(&m2(), &c1(), &[vec![1]]);
        for kind in [TensorKind::Left, TensorKind::Right] {
            let t = tensor(kind, &row, &col).unwrap();
            assert_eq!(t.dim(), 1);
            assert_eq!(linalg::psd_rank(&gram_matrix(kind, &row, &col).unwrap()), 1);
        }
    }

    #[test]
    fn mismatched_middle_algebra() {
        let row = canon(&c1(), &m2(), &[vec![1]]);
        assert!(matches!(tensor_left(&row, &row), Err(Error::AlgebraMismatch(_))));
    }

    #[test]
    fn quotient_reproduces_gram() {
        let (x, y) = sample();
        for kind in [TensorKind::Left, TensorKind::Right] {
            let t = tensor(kind, &x, &y).unwrap();
            let g = gram_matrix(kind, &x, &y).unwrap();
            assert!(linalg::max_abs(&(t.gram() - &g)) < 1e-10, "{kind:?}");
            assert_eq!(t.gram_rank(), linalg::psd_rank(&g));
            assert!(t.quotient_defect() < 1e-10);
            assert!(t.action_defect() < 1e-10);
            assert!(t.result().axiom_defects().max() < 1e-10);
        }
    }

    #[test]
    fn multiplicities_multiply() {
        let (x, y) = sample();
        let t = tensor_left(&x, &y).unwrap();
        let mx = x.multiplicities();
        let my = y.multiplicities();
        let expected: Vec<Vec<usize>> = (0..mx.len())
            .map(|k| (0..my[0].len()).map(|l| (0..my.len()).map(|j| mx[k][j] * my[j][l]).sum()).collect())
            .collect();
        assert_eq!(t.result().multiplicities(), expected);
    }

    #[test]
    fn unit_isos_are_unitary_and_agree_on_standard_form() {
        let (x, _) = sample();
        for kind in [TensorKind::Left, TensorKind::Right] {
            let (l, r) = unit_isos(kind, &x).unwrap();
            assert!(l.unitary_defect() < 1e-10);
            assert!(r.unitary_defect() < 1e-10);
            assert!(l.intertwiner_defect() < 1e-10);
            assert!(r.intertwiner_defect() < 1e-10);
        }
        let b = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let l2 = standard_form(&b).bimodule().clone();
        let (l, r) = unit_isos(TensorKind::Left, &l2).unwrap();
        assert!(l.distance(&r) < 1e-10);
    }

    #[test]
    fn trivial_unit_iso_is_one() {
        let x = canon(&c1(), &c1(), &[vec![1]]);
        for kind in [TensorKind::Left, TensorKind::Right] {
            let (l, r) = unit_isos(kind, &x).unwrap();
            assert!((l.matrix()[(0, 0)] - linalg::one()).norm() < 1e-14);
            assert!((r.matrix()[(0, 0)] - linalg::one()).norm() < 1e-14);
        }
    }

    #[test]
    fn associator_is_unitary_intertwiner() {
        let (x, y) = sample();
        let c = y.right_algebra().clone();
        let z = canon(&c, &c1(), &[vec![1]]);
        for kind in [TensorKind::Left, TensorKind::Right] {
            let a = associator(kind, &x, &y, &z).unwrap();
            assert!(a.unitary_defect() < 1e-10, "{kind:?} {}", a.unitary_defect());
            assert!(a.intertwiner_defect() < 1e-10);
        }
    }

    #[test]
    fn morphism_tensor_of_identities() {
        let (x, y) = sample();
        for kind in [TensorKind::Left, TensorKind::Right] {
            let f = tensor_morphisms_of(kind, &Morphism::identity(&x), &Morphism::identity(&y)).unwrap();
            assert!(linalg::max_abs(&(f.matrix() - linalg::identity(f.matrix().nrows()))) < 1e-10);
        }
    }

    #[test]
    fn matrix_extension_iso_is_unitary() {
        let (x, y) = sample();
        for kind in [TensorKind::Left, TensorKind::Right] {
            let t = tensor_matrix_extension_iso(&x, &y, 2, 1, kind).unwrap();
            assert_eq!(t.matrix().nrows(), 2 * tensor(kind, &x, &y).unwrap().dim());
            assert!(t.unitary_defect() < 1e-10);
            assert!(t.intertwiner_defect() < 1e-10);
        }
    }

    #[test]
    fn m_standard_trivial_and_unitary() {
        let m = m_standard(&c1(), 1, 1).unwrap();
        assert!((m.matrix()[(0, 0)] - linalg::one()).norm() < 1e-14);
        let b = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let m = m_standard(&b, 2, 1).unwrap();
        assert!(m.unitary_defect() < 1e-10);
        assert!(m.intertwiner_defect() < 1e-10);
    }

    #[test]
    fn m_iso_matches_fusion_identification() {
        let (x, y) = sample();
        let m = m_iso(&x, &y).unwrap();
        let f = m_fusion(&tensor_left(&x, &y).unwrap(), &tensor_right(&x, &y).unwrap()).unwrap();
        assert!(m.unitary_defect() < 1e-10);
        assert!(m.intertwiner_defect() < 1e-10);
        assert!(m.distance(&f) < 1e-10);
    }

    #[test]
    fn m_iso_on_extended_standard_forms_is_m_standard() {
        let b = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let l2 = standard_form(&b).bimodule().clone();
        let x = Arc::new(matrix_extension(&l2, 2, 1).unwrap());
        let y = Arc::new(matrix_extension(&l2, 1, 2).unwrap());
        let m = m_iso(&x, &y).unwrap();
        let s = m_standard(&b, 2, 2).unwrap();
        assert!(m.distance(&s) < 1e-10);
    }
}
