//! Finite-dimensional W*-algebras `⊕_k M_{n_k}(C)`, their elements, normal
//! functionals and the standard form `L²(A)`.
//!
//! Elements are stored block by block. The flat coordinate of the matrix unit
//! `e^k_{ij}` is `offset(k) + i * n_k + j`; these coordinates are orthonormal
//! for the trace inner product and are the coordinates of `L²(A)`.

use std::ops::{Add, Mul, Sub};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::bimodule::Bimodule;
use crate::error::{Error, Result};
use crate::linalg::{self, c, Mat, C64};

/// A multi-matrix algebra given by its block sizes.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr", into = "AlgebraRepr")]
pub struct MultiMatrixAlgebra {
    blocks: Vec<usize>,
    offsets: Vec<usize>,
}

#[derive(Serialize, Deserialize)]
struct AlgebraRepr {
    blocks: Vec<usize>,
}

impl TryFrom<AlgebraRepr> for MultiMatrixAlgebra {
    type Error = Error;
    fn try_from(r: AlgebraRepr) -> Result<Self> {
        MultiMatrixAlgebra::new(r.blocks)
    }
}

impl From<MultiMatrixAlgebra> for AlgebraRepr {
    fn from(a: MultiMatrixAlgebra) -> Self {
        AlgebraRepr { blocks: a.blocks }
    }
}

/// Matrix unit `e^k_{ij}` of a multi-matrix algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct MatrixUnit {
    pub block: usize,
    pub row: usize,
    pub col: usize,
}

impl MultiMatrixAlgebra {
    pub fn new(blocks: Vec<usize>) -> Result<Self> {
        if blocks.is_empty() {
            return Err(Error::InvalidAlgebra("at least one block is required".into()));
        }
        if let Some(k) = blocks.iter().position(|&n| n == 0) {
            return Err(Error::InvalidAlgebra(format!("block {k} has size 0")));
        }
        let mut offsets = Vec::with_capacity(blocks.len());
        let mut acc = 0;
        for &n in &blocks {
            offsets.push(acc);
            acc += n * n;
        }
        Ok(Self { blocks, offsets })
    }

    /// The one-dimensional algebra `C`.
    pub fn complex() -> Self {
        Self::new(vec![1]).expect("valid")
    }

    pub fn full_matrix(n: usize) -> Result<Self> {
        Self::new(vec![n])
    }

    pub fn blocks(&self) -> &[usize] {
        &self.blocks
    }

    pub fn num_blocks(&self) -> usize {
        self.blocks.len()
    }

    /// Vector-space dimension `Σ n_k²`, also the Hilbert dimension of `L²(A)`.
    pub fn dim(&self) -> usize {
        self.blocks.iter().map(|n| n * n).sum()
    }

    /// Total matrix size `N = Σ n_k`.
    pub fn matrix_size(&self) -> usize {
        self.blocks.iter().sum()
    }

    pub fn offset(&self, block: usize) -> usize {
        self.offsets[block]
    }

    pub fn unit_index(&self, block: usize, row: usize, col: usize) -> usize {
        self.offsets[block] + row * self.blocks[block] + col
    }

    pub fn unit(&self, index: usize) -> MatrixUnit {
        let block = match self.offsets.binary_search(&index) {
            Ok(k) => k,
            Err(k) => k - 1,
        };
        let n = self.blocks[block];
        let local = index - self.offsets[block];
        MatrixUnit { block, row: local / n, col: local % n }
    }

    pub fn units(&self) -> impl Iterator<Item = MatrixUnit> + '_ {
        self.blocks.iter().enumerate().flat_map(|(k, &n)| {
            (0..n).flat_map(move |i| (0..n).map(move |j| MatrixUnit { block: k, row: i, col: j }))
        })
    }

    /// Flat coordinates of the central element with value `weights[k]` on block `k`.
    pub fn central_flat(&self, weights: &[f64]) -> Vec<C64> {
        let mut v = vec![linalg::zero(); self.dim()];
        for (k, &n) in self.blocks.iter().enumerate() {
            for i in 0..n {
                v[self.unit_index(k, i, i)] = c(weights[k], 0.0);
            }
        }
        v
    }

    pub fn identity_flat(&self) -> Vec<C64> {
        self.central_flat(&vec![1.0; self.num_blocks()])
    }

    /// Weights `n_k` of the central element `Σ_k n_k 1_k`, which normalizes
    /// the Hilbert-Schmidt norm of one-sided module maps out of `L²(A)`.
    pub fn size_weights(&self) -> Vec<f64> {
        self.blocks.iter().map(|&n| n as f64).collect()
    }

    /// Product of two elements given in flat coordinates.
    pub fn mul_flat(&self, x: &[C64], y: &[C64]) -> Vec<C64> {
        let mut out = vec![linalg::zero(); self.dim()];
        for (k, &n) in self.blocks.iter().enumerate() {
            let o = self.offsets[k];
            for i in 0..n {
                for l in 0..n {
                    let xil = x[o + i * n + l];
                    if xil == linalg::zero() {
                        continue;
                    }
                    for j in 0..n {
                        out[o + i * n + j] += xil * y[o + l * n + j];
                    }
                }
            }
        }
        out
    }

    /// Adjoint of an element given in flat coordinates.
    pub fn star_flat(&self, x: &[C64]) -> Vec<C64> {
        let mut out = vec![linalg::zero(); self.dim()];
        for (k, &n) in self.blocks.iter().enumerate() {
            let o = self.offsets[k];
            for i in 0..n {
                for j in 0..n {
                    out[o + i * n + j] = x[o + j * n + i].conj();
                }
            }
        }
        out
    }

    /// The matrix algebra `M_n(A)` with blocks `[n·n_1, …, n·n_K]`.
    pub fn amplify(&self, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidAlgebra("amplification index must be positive".into()));
        }
        Self::new(self.blocks.iter().map(|&b| b * n).collect())
    }

    /// Index of the matrix unit `E_{ij} ⊗ e^k_{pq}` in `M_n(A)`.
    ///
    /// Outer entry `(i, j)` occupies rows `i·n_k..(i+1)·n_k` and columns
    /// `j·n_k..(j+1)·n_k` within block `k`.
    pub fn amplified_unit_index(&self, n: usize, i: usize, j: usize, unit: MatrixUnit) -> usize {
        let nk = self.blocks[unit.block];
        let big = n * nk;
        let o: usize = self.blocks[..unit.block].iter().map(|&b| (b * n) * (b * n)).sum();
        o + (i * nk + unit.row) * big + (j * nk + unit.col)
    }
}

/// An element of a multi-matrix algebra, one square matrix per block.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    algebra: MultiMatrixAlgebra,
    blocks: Vec<Mat>,
}

impl AlgebraElement {
    pub fn new(algebra: &MultiMatrixAlgebra, blocks: Vec<Mat>) -> Result<Self> {
        if blocks.len() != algebra.num_blocks() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} blocks, got {}",
                algebra.num_blocks(),
                blocks.len()
            )));
        }
        for (k, (b, &n)) in blocks.iter().zip(algebra.blocks()).enumerate() {
            if b.shape() != (n, n) {
                return Err(Error::DimensionMismatch(format!(
                    "block {k}: expected {n}x{n}, got {}x{}",
                    b.nrows(),
                    b.ncols()
                )));
            }
        }
        Ok(Self { algebra: algebra.clone(), blocks })
    }

    pub fn zero(algebra: &MultiMatrixAlgebra) -> Self {
        let blocks = algebra.blocks().iter().map(|&n| linalg::zeros(n, n)).collect();
        Self { algebra: algebra.clone(), blocks }
    }

    pub fn identity(algebra: &MultiMatrixAlgebra) -> Self {
        let blocks = algebra.blocks().iter().map(|&n| linalg::identity(n)).collect();
        Self { algebra: algebra.clone(), blocks }
    }

    pub fn unit(algebra: &MultiMatrixAlgebra, u: MatrixUnit) -> Self {
        let mut e = Self::zero(algebra);
        e.blocks[u.block][(u.row, u.col)] = linalg::one();
        e
    }

    pub fn from_flat(algebra: &MultiMatrixAlgebra, flat: &[C64]) -> Self {
        assert_eq!(flat.len(), algebra.dim(), "flat length");
        let blocks = algebra
            .blocks()
            .iter()
            .enumerate()
            .map(|(k, &n)| {
                let o = algebra.offset(k);
                Mat::from_fn(n, n, |i, j| flat[o + i * n + j])
            })
            .collect();
        Self { algebra: algebra.clone(), blocks }
    }

    pub fn to_flat(&self) -> Vec<C64> {
        let mut out = Vec::with_capacity(self.algebra.dim());
        for b in &self.blocks {
            for i in 0..b.nrows() {
                for j in 0..b.ncols() {
                    out.push(b[(i, j)]);
                }
            }
        }
        out
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn blocks(&self) -> &[Mat] {
        &self.blocks
    }

    pub fn adjoint(&self) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b.adjoint()).collect(),
        }
    }

    pub fn scale(&self, z: C64) -> Self {
        Self {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().map(|b| b * z).collect(),
        }
    }

    /// `Σ_k Tr(x_k)`.
    pub fn block_trace(&self) -> C64 {
        self.blocks.iter().map(|b| b.trace()).sum()
    }

    /// C*-norm: the largest operator norm over blocks.
    pub fn norm(&self) -> f64 {
        self.blocks.iter().map(linalg::op_norm).fold(0.0, f64::max)
    }

    pub fn distance(&self, other: &Self) -> f64 {
        (self - other).norm()
    }

    /// Smallest eigenvalue of the Hermitian part over all blocks.
    pub fn min_eigenvalue(&self) -> f64 {
        self.blocks
            .iter()
            .flat_map(|b| linalg::herm_eigen(b).0)
            .fold(f64::INFINITY, f64::min)
    }

    pub fn map_blocks(&self, f: impl Fn(&Mat) -> Mat) -> Self {
        Self { algebra: self.algebra.clone(), blocks: self.blocks.iter().map(f).collect() }
    }
}

impl<'a> Mul for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn mul(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        assert_eq!(self.algebra, rhs.algebra, "product across algebras");
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a * b).collect(),
        }
    }
}

impl<'a> Add for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        assert_eq!(self.algebra, rhs.algebra, "sum across algebras");
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a + b).collect(),
        }
    }
}

impl<'a> Sub for &'a AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: &'a AlgebraElement) -> AlgebraElement {
        assert_eq!(self.algebra, rhs.algebra, "difference across algebras");
        AlgebraElement {
            algebra: self.algebra.clone(),
            blocks: self.blocks.iter().zip(&rhs.blocks).map(|(a, b)| a - b).collect(),
        }
    }
}

/// A normal positive functional `φ(a) = Σ_k Tr(ρ_k a_k)` given by its density.
#[derive(Clone, Debug)]
pub struct NormalFunctional {
    density: AlgebraElement,
}

impl NormalFunctional {
    /// Accepts a Hermitian density; positivity is checked by the operations
    /// that need it.
    pub fn new(density: AlgebraElement) -> Result<Self> {
        let herm = density.distance(&density.adjoint());
        if herm > 1e-10 * density.norm().max(1.0) {
            return Err(Error::InvalidAlgebra(format!("density is not Hermitian (defect {herm:e})")));
        }
        Ok(Self { density })
    }

    pub fn density(&self) -> &AlgebraElement {
        &self.density
    }

    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        self.density.algebra()
    }

    pub fn evaluate(&self, a: &AlgebraElement) -> C64 {
        (&self.density * a).block_trace()
    }

    fn check_positive(&self) -> Result<()> {
        let min = self.density.min_eigenvalue();
        let scale = self.density.norm().max(1.0);
        if min < -1e-10 * scale {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    /// The vector `φ^{1/2} = ρ^{1/2}` of `L²(A)`.
    pub fn gns_vector(&self) -> Result<AlgebraElement> {
        self.check_positive()?;
        Ok(self.density.map_blocks(linalg::psd_sqrt))
    }

    /// Support projection `[φ]`, the range projection of `ρ`.
    pub fn support_projection(&self) -> Result<AlgebraElement> {
        self.check_positive()?;
        let top = self.density.norm();
        Ok(self.density.map_blocks(|b| {
            let (vals, vecs) = linalg::herm_eigen(b);
            let keep = vals.iter().take_while(|&&v| v > linalg::RANK_EPS * top && v > 0.0).count();
            let range = vecs.columns(0, keep);
            &range * range.adjoint()
        }))
    }
}

/// The standard form `L²(A)` together with its canonical `♮` operation.
#[derive(Clone, Debug)]
pub struct StandardForm {
    algebra: MultiMatrixAlgebra,
    bimodule: Arc<Bimodule>,
}

impl StandardForm {
    pub fn algebra(&self) -> &MultiMatrixAlgebra {
        &self.algebra
    }

    pub fn bimodule(&self) -> &Arc<Bimodule> {
        &self.bimodule
    }

    /// `♮x = x*`, antilinear and involutive.
    pub fn natural_star(&self, x: &[C64]) -> Vec<C64> {
        self.algebra.star_flat(x)
    }

    /// Real permutation `P` with `♮x = P · conj(x)`.
    pub fn natural_star_permutation(&self) -> Mat {
        natural_star_permutation(&self.algebra)
    }
}

pub(crate) fn natural_star_permutation(a: &MultiMatrixAlgebra) -> Mat {
    let d = a.dim();
    let mut p = linalg::zeros(d, d);
    for u in a.units() {
        let from = a.unit_index(u.block, u.col, u.row);
        let to = a.unit_index(u.block, u.row, u.col);
        p[(to, from)] = linalg::one();
    }
    p
}

/// Left multiplication by the matrix unit `u` on `L²(A)`.
pub(crate) fn left_mult_unit(a: &MultiMatrixAlgebra, u: MatrixUnit) -> Mat {
    let d = a.dim();
    let n = a.blocks()[u.block];
    let mut m = linalg::zeros(d, d);
    for q in 0..n {
        m[(a.unit_index(u.block, u.row, q), a.unit_index(u.block, u.col, q))] = linalg::one();
    }
    m
}

/// Right multiplication by the matrix unit `u` on `L²(A)`.
pub(crate) fn right_mult_unit(a: &MultiMatrixAlgebra, u: MatrixUnit) -> Mat {
    let d = a.dim();
    let n = a.blocks()[u.block];
    let mut m = linalg::zeros(d, d);
    for p in 0..n {
        m[(a.unit_index(u.block, p, u.col), a.unit_index(u.block, p, u.row))] = linalg::one();
    }
    m
}

/// `L²(A)` as an `A`-`A` bimodule acting by left and right multiplication.
pub fn standard_form(a: &MultiMatrixAlgebra) -> StandardForm {
    let left = a.units().map(|u| left_mult_unit(a, u)).collect();
    let right = a.units().map(|u| right_mult_unit(a, u)).collect();
    let bimodule = Bimodule::from_actions_unchecked(a.clone(), a.clone(), a.dim(), left, right)
        .expect("standard form shapes are consistent");
    StandardForm { algebra: a.clone(), bimodule: Arc::new(bimodule) }
}

/// `M_n(A)`.
pub fn amplify_algebra(a: &MultiMatrixAlgebra, n: usize) -> Result<MultiMatrixAlgebra> {
    a.amplify(n)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag2(x: f64, y: f64) -> AlgebraElement {
        let a = MultiMatrixAlgebra::full_matrix(2).unwrap();
        AlgebraElement::new(&a, vec![Mat::from_diagonal(&nalgebra::DVector::from_vec(vec![c(x, 0.0), c(y, 0.0)]))])
            .unwrap()
    }

    #[test]
    fn rejects_empty_and_zero_blocks() {
        assert!(MultiMatrixAlgebra::new(vec![]).is_err());
        assert!(MultiMatrixAlgebra::new(vec![2, 0]).is_err());
    }

    #[test]
    fn standard_form_dimensions() {
        assert_eq!(standard_form(&MultiMatrixAlgebra::complex()).bimodule().dim(), 1);
        assert_eq!(standard_form(&MultiMatrixAlgebra::new(vec![2]).unwrap()).bimodule().dim(), 4);
        assert_eq!(standard_form(&MultiMatrixAlgebra::new(vec![1, 2]).unwrap()).bimodule().dim(), 5);
    }

    #[test]
    fn standard_form_of_c_is_scalar() {
        let l2 = standard_form(&MultiMatrixAlgebra::complex());
        let b = l2.bimodule();
        assert_eq!(b.left_unit(0)[(0, 0)], linalg::one());
        assert_eq!(b.right_unit(0)[(0, 0)], linalg::one());
    }

    #[test]
    fn standard_form_actions_commute_and_are_valid() {
        let a = MultiMatrixAlgebra::new(vec![1, 2, 3]).unwrap();
        let l2 = standard_form(&a);
        let d = l2.bimodule().axiom_defects();
        assert!(d.max() < 1e-14, "{d:?}");
    }

    #[test]
    fn gns_vector_examples() {
        let f = NormalFunctional::new(diag2(1.0, 0.0)).unwrap();
        assert!(f.gns_vector().unwrap().distance(&diag2(1.0, 0.0)) < 1e-14);
        let f = NormalFunctional::new(diag2(0.64, 0.36)).unwrap();
        assert!(f.gns_vector().unwrap().distance(&diag2(0.8, 0.6)) < 1e-14);
    }

    #[test]
    fn gns_vector_reproduces_functional() {
        let a = MultiMatrixAlgebra::full_matrix(2).unwrap();
        let f = NormalFunctional::new(diag2(0.5, 0.5)).unwrap();
        let v = f.gns_vector().unwrap();
        let e11 = AlgebraElement::unit(&a, MatrixUnit { block: 0, row: 0, col: 0 });
        let av = &e11 * &v;
        let ip: C64 = v.to_flat().iter().zip(av.to_flat()).map(|(x, y)| x.conj() * y).sum();
        assert!((ip - c(0.5, 0.0)).norm() < 1e-14);
        assert!((f.evaluate(&e11) - c(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn support_projection_examples() {
        let p = NormalFunctional::new(diag2(1.0, 0.0)).unwrap().support_projection().unwrap();
        assert!(p.distance(&diag2(1.0, 0.0)) < 1e-14);
        let p = NormalFunctional::new(diag2(0.5, 0.5)).unwrap().support_projection().unwrap();
        assert!(p.distance(&diag2(1.0, 1.0)) < 1e-12);
        let p = NormalFunctional::new(diag2(0.0, 0.0)).unwrap().support_projection().unwrap();
        assert!(p.norm() < 1e-14);
    }

    #[test]
    fn negative_density_rejected() {
        let f = NormalFunctional::new(diag2(1.0, -0.5)).unwrap();
        assert!(matches!(f.gns_vector(), Err(Error::NotPositive(_))));
        assert!(f.support_projection().is_err());
    }

    #[test]
    fn amplify_examples() {
        let c1 = MultiMatrixAlgebra::complex();
        assert_eq!(amplify_algebra(&c1, 3).unwrap().blocks(), &[3]);
        let m2 = MultiMatrixAlgebra::full_matrix(2).unwrap();
        assert_eq!(amplify_algebra(&m2, 2).unwrap().blocks(), &[4]);
        let cc = MultiMatrixAlgebra::new(vec![1, 1]).unwrap();
        assert_eq!(amplify_algebra(&cc, 2).unwrap().blocks(), &[2, 2]);
    }

    #[test]
    fn amplified_unit_layout() {
        let a = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let big = a.amplify(2).unwrap();
        // E_{10} ⊗ e^1_{01} sits at row 1*2+0, column 0*2+1 of the second block.
        let idx = a.amplified_unit_index(2, 1, 0, MatrixUnit { block: 1, row: 0, col: 1 });
        assert_eq!(big.unit(idx), MatrixUnit { block: 1, row: 2, col: 1 });
    }

    #[test]
    fn unit_index_round_trip() {
        let a = MultiMatrixAlgebra::new(vec![2, 1, 3]).unwrap();
        for (idx, u) in a.units().enumerate() {
            assert_eq!(a.unit_index(u.block, u.row, u.col), idx);
            assert_eq!(a.unit(idx), u);
        }
    }

    #[test]
    fn serde_form() {
        let a = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert_eq!(s, r#"{"blocks":[1,2]}"#);
        let back: MultiMatrixAlgebra = serde_json::from_str(&s).unwrap();
        assert_eq!(back, a);
        assert!(serde_json::from_str::<MultiMatrixAlgebra>(r#"{"blocks":[]}"#).is_err());
    }
}
