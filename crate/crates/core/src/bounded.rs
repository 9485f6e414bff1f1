//! Bounded vectors `X B(-1/2) = Hom(L²(B)_B, X_B)` and
//! `A(-1/2) X = Hom(_A L²(A), _A X)°`, their operator-valued inner products,
//! the star map into the dual, and projective-module realizations.
//!
//! A bounded vector is stored as the matrix of its map out of the standard
//! form. A right-linear map `g` is determined by `g(1_B)`: `g(β) = g(1)·β`,
//! and likewise a left-linear `f` satisfies `f(α) = α·f(1)`.

use std::sync::Arc;

use crate::algebra::{self, standard_form, AlgebraElement, MultiMatrixAlgebra};
use crate::bimodule::{dual_bimodule, Bimodule, ACTION_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C64};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Element of `X B(-1/2)`, right-`B`-linear out of `L²(B)`.
    Right,
    /// Element of `A(-1/2) X`, left-`A`-linear out of `L²(A)`.
    Left,
}

#[derive(Clone, Debug)]
pub struct BoundedVector {
    side: Side,
    bimodule: Arc<Bimodule>,
    map: Mat,
}

fn flat_to_col(v: &[C64]) -> nalgebra::DVector<C64> {
    nalgebra::DVector::from_column_slice(v)
}

impl BoundedVector {
    /// Wraps a map out of the standard form; the one-sided linearity is not
    /// checked here (see [`BoundedVector::intertwining_defect`]).
    pub fn from_map(side: Side, bimodule: Arc<Bimodule>, map: Mat) -> Result<Self> {
        let alg_dim = match side {
            Side::Right => bimodule.right_algebra().dim(),
            Side::Left => bimodule.left_algebra().dim(),
        };
        if map.shape() != (bimodule.dim(), alg_dim) {
            return Err(Error::DimensionMismatch(format!(
                "bounded vector map is {}x{}, expected {}x{}",
                map.nrows(),
                map.ncols(),
                bimodule.dim(),
                alg_dim
            )));
        }
        Ok(Self { side, bimodule, map })
    }

    /// `β ↦ ξ·β`.
    pub fn right_from_vector(x: &Arc<Bimodule>, xi: &[C64]) -> Self {
        let v = flat_to_col(xi);
        let mut map = linalg::zeros(x.dim(), x.right_algebra().dim());
        for (u, r) in x.right_actions().iter().enumerate() {
            map.column_mut(u).copy_from(&(r * &v));
        }
        Self { side: Side::Right, bimodule: x.clone(), map }
    }

    /// `α ↦ α·ξ`.
    pub fn left_from_vector(x: &Arc<Bimodule>, xi: &[C64]) -> Self {
        let v = flat_to_col(xi);
        let mut map = linalg::zeros(x.dim(), x.left_algebra().dim());
        for (u, l) in x.left_actions().iter().enumerate() {
            map.column_mut(u).copy_from(&(l * &v));
        }
        Self { side: Side::Left, bimodule: x.clone(), map }
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn bimodule(&self) -> &Arc<Bimodule> {
        &self.bimodule
    }

    pub fn map(&self) -> &Mat {
        &self.map
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        match self.side {
            Side::Right => self.bimodule.right_algebra(),
            Side::Left => self.bimodule.left_algebra(),
        }
    }

    /// The generating vector `g(1)` in the bimodule.
    pub fn value_at_identity(&self) -> Vec<C64> {
        let one = flat_to_col(&self.algebra().identity_flat());
        (&self.map * one).iter().copied().collect()
    }

    /// Largest Frobenius violation of the one-sided linearity.
    pub fn intertwining_defect(&self) -> f64 {
        let alg = self.algebra().clone();
        let mut d = 0.0f64;
        for u in alg.units() {
            let idx = alg.unit_index(u.block, u.row, u.col);
            let diff = match self.side {
                Side::Right => {
                    &self.map * algebra::right_mult_unit(&alg, u) - self.bimodule.right_unit(idx) * &self.map
                }
                Side::Left => {
                    &self.map * algebra::left_mult_unit(&alg, u) - self.bimodule.left_unit(idx) * &self.map
                }
            };
            d = d.max(diff.norm());
        }
        d
    }

    /// Module action of the outer algebras: for right bounded vectors
    /// `(a g b)β = a(g(bβ))`, for left ones `α(a f b) = ((αa) f) b`.
    pub fn act(&self, a: &[C64], b: &[C64]) -> Self {
        let map = match self.side {
            Side::Right => {
                let l2 = standard_form(self.bimodule.right_algebra());
                self.bimodule.act_left_flat(a) * &self.map * l2.bimodule().act_left_flat(b)
            }
            Side::Left => {
                let l2 = standard_form(self.bimodule.left_algebra());
                self.bimodule.act_right_flat(b) * &self.map * l2.bimodule().act_right_flat(a)
            }
        };
        Self { side: self.side, bimodule: self.bimodule.clone(), map }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self { side: self.side, bimodule: self.bimodule.clone(), map: &self.map * z }
    }

    /// Hilbert-Schmidt norm of the underlying map.
    pub fn hs_norm(&self) -> f64 {
        self.map.norm()
    }
}

/// Hilbert-Schmidt orthonormal basis of `X B(-1/2)`.
///
/// The vectors `R(c)^{-1/2} e_a` with `c = Σ_l m_l 1_l` generate it: the
/// Hilbert-Schmidt inner product of `β ↦ ξβ` and `β ↦ ηβ` is `⟨ξ, R(c) η⟩`.
pub fn right_bounded_basis(x: &Arc<Bimodule>) -> Vec<BoundedVector> {
    let norm = x.right_size_power(-0.5);
    (0..x.dim())
        .map(|a| {
            let v: Vec<C64> = norm.column(a).iter().copied().collect();
            BoundedVector::right_from_vector(x, &v)
        })
        .collect()
}

/// Hilbert-Schmidt orthonormal basis of `A(-1/2) X`.
pub fn left_bounded_basis(x: &Arc<Bimodule>) -> Vec<BoundedVector> {
    let norm = x.left_size_power(-0.5);
    (0..x.dim())
        .map(|a| {
            let v: Vec<C64> = norm.column(a).iter().copied().collect();
            BoundedVector::left_from_vector(x, &v)
        })
        .collect()
}

/// Orthonormal basis of the one-sided intertwiner space by null-space
/// computation; the direct route for [`right_bounded_basis`] and
/// [`left_bounded_basis`].
pub fn bounded_basis_nullspace(x: &Arc<Bimodule>, side: Side) -> Vec<BoundedVector> {
    let (alg, acts): (MultiMatrixAlgebra, &[Mat]) = match side {
        Side::Right => (x.right_algebra().clone(), x.right_actions()),
        Side::Left => (x.left_algebra().clone(), x.left_actions()),
    };
    let std_acts: Vec<Mat> = alg
        .units()
        .map(|u| match side {
            Side::Right => algebra::right_mult_unit(&alg, u),
            Side::Left => algebra::left_mult_unit(&alg, u),
        })
        .collect();
    let (da, dx) = (alg.dim(), x.dim());
    let sys = crate::bimodule::intertwiner_system(std_acts.iter().zip(acts.iter()), da, dx);
    let ns = linalg::null_space_at_scale(&sys, 1.0);
    (0..ns.ncols())
        .map(|j| BoundedVector {
            side,
            bimodule: x.clone(),
            map: Mat::from_fn(dx, da, |r, c| ns[(r * da + c, j)]),
        })
        .collect()
}

fn require_side(v: &BoundedVector, side: Side) -> Result<()> {
    if v.side != side {
        return Err(Error::DimensionMismatch(format!("expected a {side:?} bounded vector")));
    }
    Ok(())
}

/// `[g, g']_B`, the element `b` with `([g, g']_B) β = g*(g' β)`.
///
/// Extracted as `(g* g')(1_B)` and verified against the full composite.
pub fn right_inner(g: &BoundedVector, g2: &BoundedVector) -> Result<AlgebraElement> {
    require_side(g, Side::Right)?;
    require_side(g2, Side::Right)?;
    let alg = g.algebra().clone();
    let composite = g.map.adjoint() * &g2.map;
    let b = extract(&alg, &composite, Side::Right, "right inner product")?;
    Ok(AlgebraElement::from_flat(&alg, &b))
}

/// `_A[f', f]`, the element `a` with `α(_A[f', f]) = (α f') f*`.
///
/// Extracted as `(f* f')(1_A)` and verified against the full composite.
pub fn left_inner(f2: &BoundedVector, f: &BoundedVector) -> Result<AlgebraElement> {
    require_side(f, Side::Left)?;
    require_side(f2, Side::Left)?;
    let alg = f.algebra().clone();
    let composite = f.map.adjoint() * &f2.map;
    let a = extract(&alg, &composite, Side::Left, "left inner product")?;
    Ok(AlgebraElement::from_flat(&alg, &a))
}

/// Recovers the algebra element implementing a one-sided endomorphism of
/// `L²`: left multiplication for right-linear maps, right multiplication for
/// left-linear ones.
fn extract(alg: &MultiMatrixAlgebra, composite: &Mat, side: Side, what: &str) -> Result<Vec<C64>> {
    let one = flat_to_col(&alg.identity_flat());
    let b: Vec<C64> = (composite * one).iter().copied().collect();
    let l2 = standard_form(alg);
    let rebuilt = match side {
        Side::Right => l2.bimodule().act_left_flat(&b),
        Side::Left => l2.bimodule().act_right_flat(&b),
    };
    let defect = (&rebuilt - composite).norm();
    if defect > ACTION_TOL * composite.norm().max(1.0) {
        return Err(Error::Extraction { context: what.into(), defect });
    }
    Ok(b)
}

/// `x ↦ x⋆ ∈ B(-1/2) X*` with `x̄(β) = (x(β♮))*`.
pub fn star_bounded(x: &BoundedVector) -> Result<BoundedVector> {
    let dual = Arc::new(dual_bimodule(&x.bimodule));
    star_bounded_into(x, &dual)
}

/// [`star_bounded`] with the dual bimodule supplied by the caller.
pub fn star_bounded_into(x: &BoundedVector, dual: &Arc<Bimodule>) -> Result<BoundedVector> {
    require_side(x, Side::Right)?;
    // ♮β = P conj(β), so x⋆(β) = conj(x P conj(β)) = conj(x P) β.
    let p = algebra::natural_star_permutation(x.algebra());
    let map = (&x.map * p).map(|z| z.conj());
    BoundedVector::from_map(Side::Left, dual.clone(), map)
}

/// A realization `u: X_B → p ^nL²(B)_B` of a right module as a corner of a
/// free module.
#[derive(Clone, Debug)]
pub struct RightRealization {
    /// Normalized frame `g_i = S^{-1/2} f_i` with `Σ g_i g_i* = 1_X`.
    pub frame: Vec<BoundedVector>,
    /// `u(ξ) = (g_i* ξ)_i` into `^nL²(B)`, coordinates `(i, β) ↦ i·dim B + β`.
    /// A right `B`-module map; the free module is never materialized.
    pub u: Mat,
    /// `p = ([g_i, g_j]_B)_{ij} ∈ M_n(B)`.
    pub p: AlgebraElement,
    algebra: MultiMatrixAlgebra,
}

/// A realization `v: _B Y → _B L²(B)^n q` of a left module.
#[derive(Clone, Debug)]
pub struct LeftRealization {
    pub frame: Vec<BoundedVector>,
    /// `v(η) = (f_j* η)_j` into `L²(B)^n`, coordinates `(j, β) ↦ j·dim B + β`.
    pub v: Mat,
    /// `q = (_B[f_i, f_j])_{ij} ∈ M_n(B)`.
    pub q: AlgebraElement,
    algebra: MultiMatrixAlgebra,
}

fn normalize_frame(x: &Arc<Bimodule>, basis: &[BoundedVector]) -> Result<Vec<BoundedVector>> {
    let mut s = linalg::zeros(x.dim(), x.dim());
    for f in basis {
        s += &f.map * f.map.adjoint();
    }
    if x.dim() > 0 {
        let (vals, _) = linalg::herm_eigen(&s);
        let top = vals[0];
        let bottom = *vals.last().expect("nonempty");
        if top <= 0.0 || bottom <= linalg::RANK_EPS * top {
            return Err(Error::SingularFrame);
        }
    }
    let s_inv_half = linalg::psd_inv_sqrt(&s);
    Ok(basis
        .iter()
        .map(|f| BoundedVector { side: f.side, bimodule: f.bimodule.clone(), map: &s_inv_half * &f.map })
        .collect())
}

/// Assembles `(c_ij)` with `c_ij ∈ B` into an element of `M_n(B)`.
fn assemble_matrix_element(b: &MultiMatrixAlgebra, n: usize, entries: &[Vec<Vec<C64>>]) -> AlgebraElement {
    let big = b.amplify(n.max(1)).expect("n >= 1");
    let mut flat = vec![linalg::zero(); big.dim()];
    for (i, row) in entries.iter().enumerate() {
        for (j, e) in row.iter().enumerate() {
            for u in b.units() {
                let src = b.unit_index(u.block, u.row, u.col);
                flat[b.amplified_unit_index(n, i, j, u)] = e[src];
            }
        }
    }
    AlgebraElement::from_flat(&big, &flat)
}

/// Action of `c ∈ M_n(B)` on `^nL²(B)` by left multiplication, or on
/// `L²(B)^n` by right multiplication: block `(i, j)` is `L(c_ij)`, block
/// `(j, i)` is `R(c_ij)`.
fn amplified_action(b: &MultiMatrixAlgebra, n: usize, c: &AlgebraElement, right: bool) -> Mat {
    let db = b.dim();
    let flat = c.to_flat();
    let mut out = linalg::zeros(n * db, n * db);
    for i in 0..n {
        for j in 0..n {
            let mut block = linalg::zeros(db, db);
            for u in b.units() {
                let z = flat[b.amplified_unit_index(n, i, j, u)];
                if z != linalg::zero() {
                    let unit = if right { algebra::right_mult_unit(b, u) } else { algebra::left_mult_unit(b, u) };
                    block += unit * z;
                }
            }
            let (r, col) = if right { (j, i) } else { (i, j) };
            out.view_mut((r * db, col * db), (db, db)).copy_from(&block);
        }
    }
    out
}

/// Dixmier realization of `X_B` using the full Hilbert-Schmidt basis of
/// `X B(-1/2)` as frame.
pub fn right_projective_realization(x: &Arc<Bimodule>) -> Result<RightRealization> {
    right_projective_realization_with_basis(x, &right_bounded_basis(x))
}

/// Dixmier realization of `X_B` from an arbitrary spanning family of
/// `X B(-1/2)`.
pub fn right_projective_realization_with_basis(
    x: &Arc<Bimodule>,
    basis: &[BoundedVector],
) -> Result<RightRealization> {
    for f in basis {
        require_side(f, Side::Right)?;
    }
    let b = x.right_algebra().clone();
    let n = basis.len();
    let frame = normalize_frame(x, basis)?;
    let db = b.dim();
    let mut u = linalg::zeros(n * db, x.dim());
    for (i, g) in frame.iter().enumerate() {
        u.rows_mut(i * db, db).copy_from(&g.map.adjoint());
    }
    let entries: Vec<Vec<Vec<C64>>> = frame
        .iter()
        .map(|gi| frame.iter().map(|gj| right_inner(gi, gj).map(|e| e.to_flat())).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let p = assemble_matrix_element(&b, n, &entries);
    Ok(RightRealization { frame, u, p, algebra: b })
}

impl RightRealization {
    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    /// `‖u* u − 1‖`.
    pub fn isometry_defect(&self) -> f64 {
        linalg::isometry_defect(&self.u)
    }

    /// `‖u u* − L(p)‖` on `^nL²(B)`.
    pub fn range_defect(&self) -> f64 {
        let lp = amplified_action(&self.algebra, self.len(), &self.p, false);
        linalg::op_norm(&(&self.u * self.u.adjoint() - lp))
    }

    /// `max(‖p² − p‖, ‖p* − p‖)`.
    pub fn projection_defect(&self) -> f64 {
        (&(&self.p * &self.p) - &self.p).norm().max(self.p.adjoint().distance(&self.p))
    }
}

/// Mirror of [`right_projective_realization`] for `_B Y`.
pub fn left_projective_realization(y: &Arc<Bimodule>) -> Result<LeftRealization> {
    left_projective_realization_with_basis(y, &left_bounded_basis(y))
}

pub fn left_projective_realization_with_basis(
    y: &Arc<Bimodule>,
    basis: &[BoundedVector],
) -> Result<LeftRealization> {
    for f in basis {
        require_side(f, Side::Left)?;
    }
    let b = y.left_algebra().clone();
    let n = basis.len();
    let frame = normalize_frame(y, basis)?;
    let db = b.dim();
    let mut v = linalg::zeros(n * db, y.dim());
    for (j, f) in frame.iter().enumerate() {
        v.rows_mut(j * db, db).copy_from(&f.map.adjoint());
    }
    let entries: Vec<Vec<Vec<C64>>> = frame
        .iter()
        .map(|fi| frame.iter().map(|fj| left_inner(fi, fj).map(|e| e.to_flat())).collect::<Result<Vec<_>>>())
        .collect::<Result<_>>()?;
    let q = assemble_matrix_element(&b, n, &entries);
    Ok(LeftRealization { frame, v, q, algebra: b })
}

impl LeftRealization {
    pub fn len(&self) -> usize {
        self.frame.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frame.is_empty()
    }

    pub fn isometry_defect(&self) -> f64 {
        linalg::isometry_defect(&self.v)
    }

    /// `‖v v* − R(q)‖` on `L²(B)^n`.
    pub fn range_defect(&self) -> f64 {
        let rq = amplified_action(&self.algebra, self.len(), &self.q, true);
        linalg::op_norm(&(&self.v * self.v.adjoint() - rq))
    }

    pub fn projection_defect(&self) -> f64 {
        (&(&self.q * &self.q) - &self.q).norm().max(self.q.adjoint().distance(&self.q))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m2() -> MultiMatrixAlgebra {
        MultiMatrixAlgebra::full_matrix(2).unwrap()
    }

    #[test]
    fn standard_form_bounded_vectors_are_left_multiplications() {
        let b = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let l2 = standard_form(&b).bimodule().clone();
        let basis = right_bounded_basis(&l2);
        assert_eq!(basis.len(), b.dim());
        for g in &basis {
            assert!(g.intertwining_defect() < 1e-13);
            let v = g.value_at_identity();
            let lm = l2.act_left_flat(&v);
            assert!(linalg::max_abs(&(lm - g.map())) < 1e-13);
        }
        let left = left_bounded_basis(&l2);
        for f in &left {
            let v = f.value_at_identity();
            assert!(linalg::max_abs(&(l2.act_right_flat(&v) - f.map())) < 1e-13);
        }
    }

    #[test]
    fn zero_module_has_empty_bases() {
        let z = Arc::new(Bimodule::zero(&m2(), &m2()));
        assert!(right_bounded_basis(&z).is_empty());
        assert!(left_bounded_basis(&z).is_empty());
    }

    #[test]
    fn row_and_column_modules() {
        let c1 = MultiMatrixAlgebra::complex();
        let row = Arc::new(Bimodule::from_multiplicities(&c1, &m2(), &[vec![1]]).unwrap());
        assert_eq!(right_bounded_basis(&row).len(), 2);
        assert_eq!(bounded_basis_nullspace(&row, Side::Right).len(), 2);
        let col = Arc::new(Bimodule::from_multiplicities(&m2(), &c1, &[vec![1]]).unwrap());
        assert_eq!(left_bounded_basis(&col).len(), 2);
        assert_eq!(bounded_basis_nullspace(&col, Side::Left).len(), 2);
    }

    #[test]
    fn basis_is_hilbert_schmidt_orthonormal() {
        let b = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let x = Arc::new(Bimodule::from_multiplicities(&m2(), &b, &[vec![1, 2]]).unwrap());
        let basis = right_bounded_basis(&x);
        for (i, g) in basis.iter().enumerate() {
            for (j, h) in basis.iter().enumerate() {
                let ip = g.map().adjoint() * h.map();
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((ip.trace() - linalg::c(expected, 0.0)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn inner_product_of_identity() {
        let b = MultiMatrixAlgebra::new(vec![2]).unwrap();
        let l2 = standard_form(&b).bimodule().clone();
        let g = BoundedVector::right_from_vector(&l2, &b.identity_flat());
        let ip = right_inner(&g, &g).unwrap();
        assert!(ip.distance(&AlgebraElement::identity(&b)) < 1e-14);
        let f = BoundedVector::left_from_vector(&l2, &b.identity_flat());
        let ip = left_inner(&f, &f).unwrap();
        assert!(ip.distance(&AlgebraElement::identity(&b)) < 1e-14);
    }

    #[test]
    fn extraction_rejects_non_intertwiners() {
        let b = m2();
        let l2 = standard_form(&b).bimodule().clone();
        let mut map = linalg::zeros(4, 4);
        map[(0, 1)] = linalg::one();
        let bad = BoundedVector::from_map(Side::Right, l2.clone(), map).unwrap();
        assert!(matches!(right_inner(&bad, &bad), Err(Error::Extraction { .. })));
    }

    #[test]
    fn realization_of_trivial_module() {
        let c1 = MultiMatrixAlgebra::complex();
        let x = Arc::new(Bimodule::from_multiplicities(&c1, &c1, &[vec![1]]).unwrap());
        let r = right_projective_realization(&x).unwrap();
        assert_eq!(r.len(), 1);
        assert!((r.p.to_flat()[0] - linalg::one()).norm() < 1e-14);
        assert!((r.u[(0, 0)] - linalg::one()).norm() < 1e-14);
    }

    #[test]
    fn realization_of_standard_form() {
        let b = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let l2 = standard_form(&b).bimodule().clone();
        let r = right_projective_realization(&l2).unwrap();
        assert_eq!(r.len(), b.dim());
        assert!(r.isometry_defect() < 1e-12);
        assert!(r.range_defect() < 1e-12);
        assert!(r.projection_defect() < 1e-12);
        let l = left_projective_realization(&l2).unwrap();
        assert!(l.isometry_defect() < 1e-12);
        assert!(l.range_defect() < 1e-12);
        assert!(l.projection_defect() < 1e-12);
    }

    #[test]
    fn amplified_action_matches_matrix_extension() {
        use crate::bimodule::matrix_extension;
        let b = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let n = 2;
        let big = b.amplify(n).unwrap();
        let flat: Vec<C64> = (0..big.dim()).map(|k| linalg::c((k as f64 * 0.7).sin(), (k as f64 * 1.3).cos())).collect();
        let c = AlgebraElement::from_flat(&big, &flat);
        let l2 = standard_form(&b);
        let col = matrix_extension(l2.bimodule(), n, 1).unwrap();
        let row = matrix_extension(l2.bimodule(), 1, n).unwrap();
        assert!(linalg::max_abs(&(amplified_action(&b, n, &c, false) - col.act_left_flat(&flat))) < 1e-13);
        assert!(linalg::max_abs(&(amplified_action(&b, n, &c, true) - row.act_right_flat(&flat))) < 1e-13);
    }
}
