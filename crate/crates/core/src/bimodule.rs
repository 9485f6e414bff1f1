//! Bimodules over multi-matrix algebras and the intertwiners between them.
//!
//! A bimodule `_A X_B` is a coordinate space `C^d` with a left action of `A`
//! and a right action of `B`, each stored as its values on matrix units. The
//! right action is stored as operators `R(b): ξ ↦ ξ·b`, so `R` reverses
//! products: `R(b b') = R(b') R(b)`.

use std::sync::Arc;

use crate::algebra::{MatrixUnit, MultiMatrixAlgebra};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};

/// Tolerance used when validating action axioms and intertwiner equations.
pub const ACTION_TOL: f64 = 1e-8;

#[derive(Clone, Debug)]
pub struct Bimodule {
    left: MultiMatrixAlgebra,
    right: MultiMatrixAlgebra,
    dim: usize,
    left_action: Vec<Mat>,
    right_action: Vec<Mat>,
}

/// Largest violations of the action axioms, measured in Frobenius norm over
/// all matrix units (or pairs of them).
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct ActionDefects {
    pub left_hom: f64,
    pub left_star: f64,
    pub left_unit: f64,
    pub right_hom: f64,
    pub right_star: f64,
    pub right_unit: f64,
    pub commute: f64,
}

impl ActionDefects {
    pub fn max(&self) -> f64 {
        [
            self.left_hom,
            self.left_star,
            self.left_unit,
            self.right_hom,
            self.right_star,
            self.right_unit,
            self.commute,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn unit_product(a: &MultiMatrixAlgebra, u: MatrixUnit, v: MatrixUnit) -> Option<usize> {
    (u.block == v.block && u.col == v.row).then(|| a.unit_index(u.block, u.row, v.col))
}

impl Bimodule {
    /// Builds a bimodule and rejects it unless both actions are unital
    /// *-representations that commute.
    pub fn from_actions(
        left: MultiMatrixAlgebra,
        right: MultiMatrixAlgebra,
        dim: usize,
        left_action: Vec<Mat>,
        right_action: Vec<Mat>,
    ) -> Result<Self> {
        let b = Self::from_actions_unchecked(left, right, dim, left_action, right_action)?;
        let d = b.axiom_defects();
        if d.max() > ACTION_TOL * (dim.max(1) as f64) {
            return Err(Error::InvalidBimodule(format!("action axioms violated: {d:?}")));
        }
        Ok(b)
    }

    /// Builds a bimodule checking only shapes. Used for loading instances
    /// whose axioms are reported rather than enforced.
    pub fn from_actions_unchecked(
        left: MultiMatrixAlgebra,
        right: MultiMatrixAlgebra,
        dim: usize,
        left_action: Vec<Mat>,
        right_action: Vec<Mat>,
    ) -> Result<Self> {
        if left_action.len() != left.dim() || right_action.len() != right.dim() {
            return Err(Error::InvalidBimodule(format!(
                "expected {} left and {} right unit actions, got {} and {}",
                left.dim(),
                right.dim(),
                left_action.len(),
                right_action.len()
            )));
        }
        if let Some(m) = left_action.iter().chain(&right_action).find(|m| m.shape() != (dim, dim)) {
            return Err(Error::InvalidBimodule(format!(
                "action matrix has shape {}x{}, expected {dim}x{dim}",
                m.nrows(),
                m.ncols()
            )));
        }
        Ok(Self { left, right, dim, left_action, right_action })
    }

    /// The canonical model `⊕_{k,l} C^{n_k} ⊗ C^{μ_kl} ⊗ C^{m_l}`.
    pub fn from_multiplicities(
        left: &MultiMatrixAlgebra,
        right: &MultiMatrixAlgebra,
        mu: &[Vec<usize>],
    ) -> Result<Self> {
        if mu.len() != left.num_blocks() || mu.iter().any(|row| row.len() != right.num_blocks()) {
            return Err(Error::InvalidBimodule(format!(
                "multiplicity matrix must be {}x{}",
                left.num_blocks(),
                right.num_blocks()
            )));
        }
        let mut offsets = vec![vec![0; right.num_blocks()]; left.num_blocks()];
        let mut dim = 0;
        for (k, &n) in left.blocks().iter().enumerate() {
            for (l, &m) in right.blocks().iter().enumerate() {
                offsets[k][l] = dim;
                dim += n * mu[k][l] * m;
            }
        }
        let mut left_action = vec![linalg::zeros(dim, dim); left.dim()];
        let mut right_action = vec![linalg::zeros(dim, dim); right.dim()];
        for (k, &n) in left.blocks().iter().enumerate() {
            for (l, &m) in right.blocks().iter().enumerate() {
                let mult = mu[k][l];
                let o = offsets[k][l];
                let idx = |i: usize, r: usize, j: usize| o + (i * mult + r) * m + j;
                for r in 0..mult {
                    for j in 0..m {
                        for p in 0..n {
                            for q in 0..n {
                                let u = left.unit_index(k, p, q);
                                left_action[u][(idx(p, r, j), idx(q, r, j))] = linalg::one();
                            }
                        }
                    }
                    for i in 0..n {
                        for p in 0..m {
                            for q in 0..m {
                                // ξ · f_pq acts on the last factor by f_pq^T.
                                let u = right.unit_index(l, p, q);
                                right_action[u][(idx(i, r, q), idx(i, r, p))] = linalg::one();
                            }
                        }
                    }
                }
            }
        }
        Self::from_actions_unchecked(left.clone(), right.clone(), dim, left_action, right_action)
    }

    pub fn zero(left: &MultiMatrixAlgebra, right: &MultiMatrixAlgebra) -> Self {
        let mu = vec![vec![0; right.num_blocks()]; left.num_blocks()];
        Self::from_multiplicities(left, right, &mu).expect("shape is consistent")
    }

    pub fn left_algebra(&self) -> &MultiMatrixAlgebra {
        &self.left
    }

    pub fn right_algebra(&self) -> &MultiMatrixAlgebra {
        &self.right
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn left_actions(&self) -> &[Mat] {
        &self.left_action
    }

    pub fn right_actions(&self) -> &[Mat] {
        &self.right_action
    }

    pub fn left_unit(&self, u: usize) -> &Mat {
        &self.left_action[u]
    }

    pub fn right_unit(&self, u: usize) -> &Mat {
        &self.right_action[u]
    }

    pub fn left_unit_at(&self, k: usize, i: usize, j: usize) -> &Mat {
        &self.left_action[self.left.unit_index(k, i, j)]
    }

    pub fn right_unit_at(&self, k: usize, i: usize, j: usize) -> &Mat {
        &self.right_action[self.right.unit_index(k, i, j)]
    }

    /// Left action of an element given in flat coordinates.
    pub fn act_left_flat(&self, a: &[linalg::C64]) -> Mat {
        combine(&self.left_action, a, self.dim)
    }

    /// Right action `ξ ↦ ξ·b` of an element given in flat coordinates.
    pub fn act_right_flat(&self, b: &[linalg::C64]) -> Mat {
        combine(&self.right_action, b, self.dim)
    }

    /// Left action of the central element with weight `w[k]` on block `k`.
    pub fn left_central(&self, w: &[f64]) -> Mat {
        self.act_left_flat(&self.left.central_flat(w))
    }

    pub fn right_central(&self, w: &[f64]) -> Mat {
        self.act_right_flat(&self.right.central_flat(w))
    }

    /// `R(Σ_l m_l^{p} 1_l)`: used with `p = ±1/2` to normalize bounded vectors.
    pub fn right_size_power(&self, p: f64) -> Mat {
        let w: Vec<f64> = self.right.size_weights().iter().map(|n| n.powf(p)).collect();
        self.right_central(&w)
    }

    pub fn left_size_power(&self, p: f64) -> Mat {
        let w: Vec<f64> = self.left.size_weights().iter().map(|n| n.powf(p)).collect();
        self.left_central(&w)
    }

    pub fn axiom_defects(&self) -> ActionDefects {
        let mut d = ActionDefects::default();
        let id = linalg::identity(self.dim);
        let units_l: Vec<MatrixUnit> = self.left.units().collect();
        let units_r: Vec<MatrixUnit> = self.right.units().collect();
        for (iu, &u) in units_l.iter().enumerate() {
            for (iv, &v) in units_l.iter().enumerate() {
                let prod = &self.left_action[iu] * &self.left_action[iv];
                let expected = unit_product(&self.left, u, v).map(|w| &self.left_action[w]);
                let diff = match expected {
                    Some(e) => (prod - e).norm(),
                    None => prod.norm(),
                };
                d.left_hom = d.left_hom.max(diff);
            }
            let star = self.left.unit_index(u.block, u.col, u.row);
            d.left_star = d.left_star.max((self.left_action[iu].adjoint() - &self.left_action[star]).norm());
        }
        for (iu, &u) in units_r.iter().enumerate() {
            for (iv, &v) in units_r.iter().enumerate() {
                // R(f_u) R(f_v) = R(f_v f_u)
                let prod = &self.right_action[iu] * &self.right_action[iv];
                let expected = unit_product(&self.right, v, u).map(|w| &self.right_action[w]);
                let diff = match expected {
                    Some(e) => (prod - e).norm(),
                    None => prod.norm(),
                };
                d.right_hom = d.right_hom.max(diff);
            }
            let star = self.right.unit_index(u.block, u.col, u.row);
            d.right_star = d.right_star.max((self.right_action[iu].adjoint() - &self.right_action[star]).norm());
        }
        d.left_unit = (self.act_left_flat(&self.left.identity_flat()) - &id).norm();
        d.right_unit = (self.act_right_flat(&self.right.identity_flat()) - &id).norm();
        for l in &self.left_action {
            for r in &self.right_action {
                d.commute = d.commute.max((l * r - r * l).norm());
            }
        }
        d
    }

    /// Multiplicity matrix `μ_kl = rank(L(e^k_00) R(f^l_00))`.
    pub fn multiplicities(&self) -> Vec<Vec<usize>> {
        (0..self.left.num_blocks())
            .map(|k| {
                (0..self.right.num_blocks())
                    .map(|l| {
                        let p = self.left_unit_at(k, 0, 0) * self.right_unit_at(l, 0, 0);
                        p.trace().re.round().max(0.0) as usize
                    })
                    .collect()
            })
            .collect()
    }

    /// Orthonormal basis of the multiplicity space `L(e^k_00) R(f^l_00) X`.
    pub fn multiplicity_space(&self, k: usize, l: usize) -> Mat {
        let p = self.left_unit_at(k, 0, 0) * self.right_unit_at(l, 0, 0);
        linalg::projection_range(&linalg::hermitian_part(&p))
    }

    /// The same space as a right `B`-module (left algebra replaced by `C`).
    pub fn right_module(&self) -> Self {
        Self {
            left: MultiMatrixAlgebra::complex(),
            right: self.right.clone(),
            dim: self.dim,
            left_action: vec![linalg::identity(self.dim)],
            right_action: self.right_action.clone(),
        }
    }

    /// The same space as a left `A`-module (right algebra replaced by `C`).
    pub fn left_module(&self) -> Self {
        Self {
            left: self.left.clone(),
            right: MultiMatrixAlgebra::complex(),
            dim: self.dim,
            left_action: self.left_action.clone(),
            right_action: vec![linalg::identity(self.dim)],
        }
    }

    /// Transports both actions along a unitary `u`: `a ↦ u L(a) u*`.
    pub fn conjugate(&self, u: &Mat) -> Self {
        let ua = u.adjoint();
        Self {
            left: self.left.clone(),
            right: self.right.clone(),
            dim: self.dim,
            left_action: self.left_action.iter().map(|m| u * m * &ua).collect(),
            right_action: self.right_action.iter().map(|m| u * m * &ua).collect(),
        }
    }

    pub fn same_algebras(&self, other: &Self) -> bool {
        self.left == other.left && self.right == other.right
    }

    /// Replaces a single left-action matrix; for fault injection in tests.
    pub fn with_left_unit_replaced(&self, u: usize, m: Mat) -> Self {
        let mut b = self.clone();
        b.left_action[u] = m;
        b
    }
}

fn combine(units: &[Mat], coeffs: &[linalg::C64], dim: usize) -> Mat {
    let mut out = linalg::zeros(dim, dim);
    for (m, &z) in units.iter().zip(coeffs) {
        if z != linalg::zero() {
            out += m * z;
        }
    }
    out
}

/// A linear map between bimodules, expected to intertwine both actions.
#[derive(Clone, Debug)]
pub struct Morphism {
    source: Arc<Bimodule>,
    target: Arc<Bimodule>,
    matrix: Mat,
}

impl Morphism {
    /// Builds a morphism, rejecting matrices that fail to intertwine.
    pub fn new(source: Arc<Bimodule>, target: Arc<Bimodule>, matrix: Mat) -> Result<Self> {
        let m = Self::new_unchecked(source, target, matrix)?;
        let defect = m.intertwiner_defect();
        if defect > ACTION_TOL * linalg::max_abs(&m.matrix).max(1.0) * (m.matrix.nrows().max(1) as f64) {
            return Err(Error::InvalidBimodule(format!("not an intertwiner (defect {defect:e})")));
        }
        Ok(m)
    }

    pub fn new_unchecked(source: Arc<Bimodule>, target: Arc<Bimodule>, matrix: Mat) -> Result<Self> {
        if matrix.shape() != (target.dim(), source.dim()) {
            return Err(Error::DimensionMismatch(format!(
                "morphism matrix is {}x{}, expected {}x{}",
                matrix.nrows(),
                matrix.ncols(),
                target.dim(),
                source.dim()
            )));
        }
        Ok(Self { source, target, matrix })
    }

    pub fn identity(x: &Arc<Bimodule>) -> Self {
        Self { source: x.clone(), target: x.clone(), matrix: linalg::identity(x.dim()) }
    }

    pub fn zero(source: &Arc<Bimodule>, target: &Arc<Bimodule>) -> Self {
        Self { source: source.clone(), target: target.clone(), matrix: linalg::zeros(target.dim(), source.dim()) }
    }

    pub fn source(&self) -> &Arc<Bimodule> {
        &self.source
    }

    pub fn target(&self) -> &Arc<Bimodule> {
        &self.target
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat {
        self.matrix
    }

    /// Largest Frobenius-norm violation of `T L_a = L'_a T` and `T R_b = R'_b T`
    /// over matrix units.
    pub fn intertwiner_defect(&self) -> f64 {
        let mut d = 0.0f64;
        if self.source.left_algebra() == self.target.left_algebra() {
            for (l, lt) in self.source.left_actions().iter().zip(self.target.left_actions()) {
                d = d.max((&self.matrix * l - lt * &self.matrix).norm());
            }
        } else {
            d = f64::INFINITY;
        }
        if self.source.right_algebra() == self.target.right_algebra() {
            for (r, rt) in self.source.right_actions().iter().zip(self.target.right_actions()) {
                d = d.max((&self.matrix * r - rt * &self.matrix).norm());
            }
        } else {
            d = f64::INFINITY;
        }
        d
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Morphism) -> Morphism {
        assert_eq!(
            other.target.dim(),
            self.source.dim(),
            "composing morphisms with mismatched dimensions"
        );
        Morphism { source: other.source.clone(), target: self.target.clone(), matrix: &self.matrix * &other.matrix }
    }

    /// Hilbert-space adjoint, a morphism `target → source`.
    pub fn adjoint(&self) -> Morphism {
        Morphism { source: self.target.clone(), target: self.source.clone(), matrix: self.matrix.adjoint() }
    }

    pub fn scale(&self, z: linalg::C64) -> Morphism {
        Morphism { source: self.source.clone(), target: self.target.clone(), matrix: &self.matrix * z }
    }

    pub fn unitary_defect(&self) -> f64 {
        linalg::unitary_defect(&self.matrix)
    }

    /// Operator-norm distance between two parallel morphisms.
    pub fn distance(&self, other: &Morphism) -> f64 {
        linalg::op_norm(&(&self.matrix - &other.matrix))
    }

    pub fn with_matrix(&self, matrix: Mat) -> Morphism {
        Morphism { source: self.source.clone(), target: self.target.clone(), matrix }
    }

    /// The transpose `^t f: Y* → X*`, `^t f(η*) = (f* η)*`.
    pub fn transpose(&self) -> Morphism {
        transpose(self)
    }
}

fn require_same_algebras(x: &Bimodule, y: &Bimodule) -> Result<()> {
    if !x.same_algebras(y) {
        return Err(Error::AlgebraMismatch(format!(
            "bimodules over ({:?}, {:?}) and ({:?}, {:?})",
            x.left_algebra().blocks(),
            x.right_algebra().blocks(),
            y.left_algebra().blocks(),
            y.right_algebra().blocks()
        )));
    }
    Ok(())
}

/// Hilbert-Schmidt orthonormal basis of `Hom(X, Y)`.
///
/// The basis is assembled from orthonormal bases of the multiplicity spaces
/// `L(e^k_00) R(f^l_00) X`: every intertwiner is determined by its
/// restriction to them. [`hom_basis_nullspace`] solves the intertwiner
/// equations directly and spans the same space.
pub fn hom_basis(x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Vec<Morphism>> {
    require_same_algebras(x, y)?;
    let a = x.left_algebra();
    let b = x.right_algebra();
    let mut out = Vec::new();
    for (k, &n) in a.blocks().iter().enumerate() {
        for (l, &m) in b.blocks().iter().enumerate() {
            let mx = x.multiplicity_space(k, l);
            let my = y.multiplicity_space(k, l);
            if mx.ncols() == 0 || my.ncols() == 0 {
                continue;
            }
            // Isometric embeddings C^n ⊗ M ⊗ C^m -> X, one column per (i, j).
            let spread = |z: &Bimodule, v: &Mat, s: usize| -> Mat {
                let mut cols = linalg::zeros(z.dim(), n * m);
                for i in 0..n {
                    for j in 0..m {
                        let col = z.left_unit_at(k, i, 0) * z.right_unit_at(l, 0, j) * v.column(s);
                        cols.column_mut(i * m + j).copy_from(&col);
                    }
                }
                cols
            };
            let norm = linalg::c(1.0 / ((n * m) as f64).sqrt(), 0.0);
            for s in 0..my.ncols() {
                let ys = spread(y, &my, s);
                for t in 0..mx.ncols() {
                    let xt = spread(x, &mx, t);
                    let matrix = &ys * xt.adjoint() * norm;
                    out.push(Morphism { source: x.clone(), target: y.clone(), matrix });
                }
            }
        }
    }
    Ok(out)
}

/// Orthonormal basis of `Hom(X, Y)` from the null space of the stacked system
/// `{T L_a − L'_a T, T R_b − R'_b T}` over all matrix units.
///
/// The system has `dim X · dim Y` unknowns; intended for small instances.
pub fn hom_basis_nullspace(x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Vec<Morphism>> {
    require_same_algebras(x, y)?;
    let (dx, dy) = (x.dim(), y.dim());
    let eqs = intertwiner_system(
        x.left_actions().iter().zip(y.left_actions()).chain(x.right_actions().iter().zip(y.right_actions())),
        dx,
        dy,
    );
    let ns = linalg::null_space_at_scale(&eqs, 1.0);
    Ok((0..ns.ncols())
        .map(|j| Morphism {
            source: x.clone(),
            target: y.clone(),
            matrix: Mat::from_fn(dy, dx, |r, c| ns[(r * dx + c, j)]),
        })
        .collect())
}

/// Stacked linear system for `T S = S' T` in row-major `vec(T)` coordinates.
pub(crate) fn intertwiner_system<'a>(
    pairs: impl Iterator<Item = (&'a Mat, &'a Mat)>,
    dx: usize,
    dy: usize,
) -> Mat {
    let blocks: Vec<Mat> = pairs
        .map(|(s, t)| linalg::kron(&linalg::identity(dy), &s.transpose()) - linalg::kron(t, &linalg::identity(dx)))
        .collect();
    let rows: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = linalg::zeros(rows, dx * dy);
    let mut r = 0;
    for b in blocks {
        out.rows_mut(r, b.nrows()).copy_from(&b);
        r += b.nrows();
    }
    out
}

/// The dual bimodule `_B X*_A` on conjugate coordinates.
///
/// The star map `ξ ↦ ξ*` is coordinatewise complex conjugation, and the
/// actions are fixed by `b·ξ*·a = (a* ξ b*)*`, giving `L*(b) = R(b)^T` and
/// `R*(a) = L(a)^T`.
pub fn dual_bimodule(x: &Bimodule) -> Bimodule {
    Bimodule {
        left: x.right.clone(),
        right: x.left.clone(),
        dim: x.dim,
        left_action: x.right_action.iter().map(|m| m.transpose()).collect(),
        right_action: x.left_action.iter().map(|m| m.transpose()).collect(),
    }
}

/// The antiunitary star map `X → X*` in coordinates.
pub fn star_vector(v: &[linalg::C64]) -> Vec<linalg::C64> {
    v.iter().map(|z| z.conj()).collect()
}

/// `^t f: Y* → X*` with `^t f(η*) = (f* η)*`, which is `f^T` in conjugate
/// coordinates.
pub fn transpose(f: &Morphism) -> Morphism {
    Morphism {
        source: Arc::new(dual_bimodule(&f.target)),
        target: Arc::new(dual_bimodule(&f.source)),
        matrix: f.matrix.transpose(),
    }
}

/// Transpose with explicitly supplied dual bimodules.
pub fn transpose_between(f: &Morphism, target_dual: &Arc<Bimodule>, source_dual: &Arc<Bimodule>) -> Morphism {
    Morphism { source: target_dual.clone(), target: source_dual.clone(), matrix: f.matrix.transpose() }
}

/// `d_X: X → X**`, `ξ ↦ (ξ*)*`.
pub fn double_dual_iso(x: &Arc<Bimodule>) -> Morphism {
    let xx = Arc::new(dual_bimodule(&dual_bimodule(x)));
    double_dual_iso_into(x, &xx)
}

pub fn double_dual_iso_into(x: &Arc<Bimodule>, double_dual: &Arc<Bimodule>) -> Morphism {
    // Conjugating twice is the identity on coordinates.
    Morphism { source: x.clone(), target: double_dual.clone(), matrix: linalg::identity(x.dim()) }
}

/// The Hilbert-Schmidt extension `^I X^J` of `nI × nJ` arrays over `X`, an
/// `M_{nI}(A)`-`M_{nJ}(B)` bimodule.
///
/// Coordinates are ordered `(i, j, s) ↦ (i·nJ + j)·dim X + s`.
pub fn matrix_extension(x: &Bimodule, n_i: usize, n_j: usize) -> Result<Bimodule> {
    let big_a = x.left.amplify(n_i)?;
    let big_b = x.right.amplify(n_j)?;
    let d = x.dim;
    let dim = n_i * n_j * d;
    let unit = |n: usize, i: usize, j: usize| {
        let mut e = linalg::zeros(n, n);
        e[(i, j)] = linalg::one();
        e
    };
    let mut left_action = vec![linalg::zeros(dim, dim); big_a.dim()];
    for u in x.left.units() {
        let lu = &x.left_action[x.left.unit_index(u.block, u.row, u.col)];
        for i in 0..n_i {
            for j in 0..n_i {
                let idx = x.left.amplified_unit_index(n_i, i, j, u);
                left_action[idx] = linalg::kron(&linalg::kron(&unit(n_i, i, j), &linalg::identity(n_j)), lu);
            }
        }
    }
    let mut right_action = vec![linalg::zeros(dim, dim); big_b.dim()];
    for u in x.right.units() {
        let ru = &x.right_action[x.right.unit_index(u.block, u.row, u.col)];
        for i in 0..n_j {
            for j in 0..n_j {
                // Column j of ξ·(E_ij ⊗ b) is ξ_{·,i}·b.
                let idx = x.right.amplified_unit_index(n_j, i, j, u);
                right_action[idx] = linalg::kron(&linalg::kron(&linalg::identity(n_i), &unit(n_j, j, i)), ru);
            }
        }
    }
    Bimodule::from_actions_unchecked(big_a, big_b, dim, left_action, right_action)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::standard_form;

    fn m2() -> MultiMatrixAlgebra {
        MultiMatrixAlgebra::full_matrix(2).unwrap()
    }

    fn c1() -> MultiMatrixAlgebra {
        MultiMatrixAlgebra::complex()
    }

    #[test]
    fn canonical_model_is_valid() {
        let a = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let b = MultiMatrixAlgebra::new(vec![2, 3]).unwrap();
        let x = Bimodule::from_multiplicities(&a, &b, &[vec![1, 0], vec![2, 1]]).unwrap();
        assert_eq!(x.dim(), 2 + 2 * 2 * 2 + 2 * 3);
        assert!(x.axiom_defects().max() < 1e-14);
        assert_eq!(x.multiplicities(), vec![vec![1, 0], vec![2, 1]]);
    }

    #[test]
    fn non_unital_action_rejected() {
        let x = Bimodule::from_multiplicities(&m2(), &c1(), &[vec![1]]).unwrap();
        let mut left = x.left_actions().to_vec();
        left[0] = linalg::zeros(2, 2);
        let r = Bimodule::from_actions(m2(), c1(), 2, left, x.right_actions().to_vec());
        assert!(matches!(r, Err(Error::InvalidBimodule(_))));
    }

    #[test]
    fn hom_examples() {
        let l2 = standard_form(&m2()).bimodule().clone();
        assert_eq!(hom_basis(&l2, &l2).unwrap().len(), 1);
        assert_eq!(hom_basis_nullspace(&l2, &l2).unwrap().len(), 1);

        let col = Arc::new(Bimodule::from_multiplicities(&m2(), &c1(), &[vec![1]]).unwrap());
        let l2_left = Arc::new(Bimodule::from_multiplicities(&m2(), &c1(), &[vec![2]]).unwrap());
        assert_eq!(hom_basis(&col, &l2_left).unwrap().len(), 2);
        assert_eq!(hom_basis_nullspace(&col, &l2_left).unwrap().len(), 2);

        let cc = MultiMatrixAlgebra::new(vec![1, 1]).unwrap();
        let p = Arc::new(Bimodule::from_multiplicities(&cc, &c1(), &[vec![1], vec![0]]).unwrap());
        let q = Arc::new(Bimodule::from_multiplicities(&cc, &c1(), &[vec![0], vec![1]]).unwrap());
        assert!(hom_basis(&p, &q).unwrap().is_empty());
        assert!(hom_basis_nullspace(&p, &q).unwrap().is_empty());
    }

    #[test]
    fn hom_mismatched_algebras() {
        let x = Arc::new(Bimodule::from_multiplicities(&m2(), &c1(), &[vec![1]]).unwrap());
        let y = Arc::new(Bimodule::from_multiplicities(&c1(), &c1(), &[vec![1]]).unwrap());
        assert!(matches!(hom_basis(&x, &y), Err(Error::AlgebraMismatch(_))));
    }

    #[test]
    fn dual_is_valid_and_same_dim() {
        let a = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let x = Bimodule::from_multiplicities(&a, &m2(), &[vec![1], vec![2]]).unwrap();
        let xd = dual_bimodule(&x);
        assert_eq!(xd.dim(), x.dim());
        assert_eq!(xd.left_algebra(), x.right_algebra());
        assert!(xd.axiom_defects().max() < 1e-14);
    }

    #[test]
    fn double_dual_has_same_actions() {
        let x = Bimodule::from_multiplicities(&m2(), &m2(), &[vec![2]]).unwrap();
        let xx = dual_bimodule(&dual_bimodule(&x));
        for (a, b) in x.left_actions().iter().zip(xx.left_actions()) {
            assert_eq!(a, b);
        }
    }

    #[test]
    fn transpose_of_identity() {
        let x = Arc::new(Bimodule::from_multiplicities(&m2(), &c1(), &[vec![1]]).unwrap());
        let t = transpose(&Morphism::identity(&x));
        assert!(linalg::max_abs(&(t.matrix() - linalg::identity(2))) == 0.0);
        assert!(t.intertwiner_defect() < 1e-14);
    }

    #[test]
    fn matrix_extension_shapes() {
        let x = Bimodule::from_multiplicities(&m2(), &c1(), &[vec![1]]).unwrap();
        let e = matrix_extension(&x, 2, 3).unwrap();
        assert_eq!(e.dim(), 12);
        assert_eq!(e.left_algebra().blocks(), &[4]);
        assert_eq!(e.right_algebra().blocks(), &[3]);
        assert!(e.axiom_defects().max() < 1e-13);
        let same = matrix_extension(&x, 1, 1).unwrap();
        assert_eq!(same.dim(), x.dim());
        for (a, b) in same.left_actions().iter().zip(x.left_actions()) {
            assert_eq!(a, b);
        }
    }
}
