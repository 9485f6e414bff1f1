//! Anti-multiplicativity isomorphisms between duals of tensor products.
//!
//! `c_{X,Y}: Y* ⋌ X* → (X ⋋ Y)*` is fixed on spanning vectors by
//! `η* ⊗ x⋆ ↦ (x ⊗ η)*`; the one-kind versions are
//! `c⋌ = (^t m_{X,Y})^{-1} c` and `c⋋ = c m_{Y*,X*}`.

use std::sync::Arc;

use crate::bimodule::{dual_bimodule, Bimodule, Morphism};
use crate::bounded::{star_bounded_into, BoundedVector};
use crate::error::{Error, Result};
use crate::linalg;
use crate::tensor::{self, TensorKind, TensorProduct};

/// `c_{X,Y}` from prebuilt products `Y* ⋌ X*` and `X ⋋ Y`, with the dual of
/// `X ⋋ Y` supplied as target.
pub fn c_mixed_from(duals: &TensorProduct, product: &TensorProduct, target: &Arc<Bimodule>) -> Result<Morphism> {
    if duals.kind() != TensorKind::Right || product.kind() != TensorKind::Left {
        return Err(Error::AlgebraMismatch("c expects Y* ⋌ X* and X ⋋ Y".into()));
    }
    let x = product.left();
    let xd = duals.right();
    let (dx, dy) = (x.dim(), product.right().dim());
    if xd.dim() != dx || duals.left().dim() != dy || target.dim() != product.dim() {
        return Err(Error::DimensionMismatch("duals do not match the factors".into()));
    }

    // x_a⋆ in the family coordinates of B(-1/2)X*.
    let mut coef = linalg::zeros(dx, dx);
    for a in 0..dx {
        let v: Vec<_> = product.left_norm().column(a).iter().copied().collect();
        let star = star_bounded_into(&BoundedVector::right_from_vector(x, &v), xd)?;
        let value = nalgebra::DVector::from_vec(star.value_at_identity());
        coef.column_mut(a).copy_from(&(duals.right_norm_inv() * value));
    }
    let coef_inv = coef
        .try_inverse()
        .ok_or_else(|| Error::NotWellDefined { context: "starred bounded vectors".into(), defect: f64::INFINITY })?;

    // (x_a ⊗ e_s)* in conjugate coordinates, indexed by (s, a).
    let images = linalg::apply_kron_right(product.quotient(), &linalg::identity(dx), product.right_norm_inv());
    let mut family = linalg::zeros(product.dim(), dy * dx);
    for a in 0..dx {
        for s in 0..dy {
            let col = images.column(a * dy + s).map(|z| z.conj());
            family.column_mut(s * dx + a).copy_from(&col);
        }
    }
    // Family of Y* ⋌ X* is (e_s, x_a⋆) = (left_norm⁻¹ e_s) ⊗ (coef e_a).
    let family = linalg::apply_kron_right(&family, duals.left_norm(), &coef_inv);
    let c = duals.extend_from_family(&family, "anti-multiplicativity isomorphism")?;
    Morphism::new_unchecked(duals.result().clone(), target.clone(), c)
}

/// `c_{X,Y}: Y* ⋌ X* → (X ⋋ Y)*`.
pub fn c_mixed(x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Morphism> {
    let xd = Arc::new(dual_bimodule(x));
    let yd = Arc::new(dual_bimodule(y));
    let duals = tensor::tensor_right(&yd, &xd)?;
    let product = tensor::tensor_left(x, y)?;
    let target = Arc::new(dual_bimodule(product.result()));
    c_mixed_from(&duals, &product, &target)
}

/// `c⋌ = (^t m)^{-1} c`, with `m: X ⋋ Y → X ⋌ Y` and the dual of `X ⋌ Y`
/// supplied as target.
pub fn c_right_from(c: &Morphism, m: &Morphism, target: &Arc<Bimodule>) -> Result<Morphism> {
    let tm_inv = m
        .matrix()
        .transpose()
        .try_inverse()
        .ok_or_else(|| Error::NotWellDefined { context: "transpose of m".into(), defect: f64::INFINITY })?;
    Morphism::new_unchecked(c.source().clone(), target.clone(), tm_inv * c.matrix())
}

/// `c⋋ = c m_{Y*,X*}`.
pub fn c_left_from(c: &Morphism, m_duals: &Morphism) -> Result<Morphism> {
    if m_duals.matrix().nrows() != c.matrix().ncols() {
        return Err(Error::DimensionMismatch("m_{Y*,X*} does not match c".into()));
    }
    Morphism::new_unchecked(m_duals.source().clone(), c.target().clone(), c.matrix() * m_duals.matrix())
}

/// `c⋌_{X,Y}: Y* ⋌ X* → (X ⋌ Y)*`.
pub fn c_right(x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Morphism> {
    let c = c_mixed(x, y)?;
    let m = tensor::m_iso(x, y)?;
    let target = Arc::new(dual_bimodule(m.target()));
    c_right_from(&c, &m, &target)
}

/// `c⋋_{X,Y}: Y* ⋋ X* → (X ⋋ Y)*`.
pub fn c_left(x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Morphism> {
    let c = c_mixed(x, y)?;
    let xd = Arc::new(dual_bimodule(x));
    let yd = Arc::new(dual_bimodule(y));
    let m = tensor::m_iso(&yd, &xd)?;
    c_left_from(&c, &m)
}

/// The involution isomorphism of the given kind: `c⋋` or `c⋌`.
pub fn c_of_kind(kind: TensorKind, x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Morphism> {
    match kind {
        TensorKind::Left => c_left(x, y),
        TensorKind::Right => c_right(x, y),
    }
}

/// `‖c* c − 1‖`, `‖c c* − 1‖` together with the intertwiner defect.
pub fn defects(c: &Morphism) -> (f64, f64) {
    (c.unitary_defect(), c.intertwiner_defect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::MultiMatrixAlgebra;

    fn canon(a: &MultiMatrixAlgebra, b: &MultiMatrixAlgebra, mu: &[Vec<usize>]) -> Arc<Bimodule> {
        Arc::new(Bimodule::from_multiplicities(a, b, mu).unwrap())
    }

    #[test]
    fn one_dimensional_case_is_one() {
        let c1 = MultiMatrixAlgebra::complex();
        let x = canon(&c1, &c1, &[vec![1]]);
        for c in [c_mixed(&x, &x).unwrap(), c_right(&x, &x).unwrap(), c_left(&x, &x).unwrap()] {
            assert_eq!(c.matrix().shape(), (1, 1));
            assert!((c.matrix()[(0, 0)] - linalg::one()).norm() < 1e-14);
        }
    }

    #[test]
    fn unitary_intertwiners() {
        let a = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let b = MultiMatrixAlgebra::new(vec![2, 1]).unwrap();
        let c = MultiMatrixAlgebra::new(vec![2]).unwrap();
        let x = canon(&a, &b, &[vec![1, 0], vec![1, 2]]);
        let y = canon(&b, &c, &[vec![1], vec![2]]);
        for (name, m) in [("mixed", c_mixed(&x, &y)), ("right", c_right(&x, &y)), ("left", c_left(&x, &y))] {
            let m = m.unwrap();
            let (u, i) = defects(&m);
            assert!(u < 1e-10, "{name}: unitary defect {u}");
            assert!(i < 1e-10, "{name}: intertwiner defect {i}");
        }
    }
}
