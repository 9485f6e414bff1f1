//! The diagrams. Each function returns the two composite paths of one
//! diagram, factors listed in the order they are applied.

use std::sync::Arc;

use crate::bimodule::{Bimodule, Morphism};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat};
use crate::tensor::TensorKind;

use super::context::{CVariant, Context};

#[derive(Clone, Debug)]
pub struct Paths {
    pub first: Vec<Mat>,
    pub second: Vec<Mat>,
}

impl Paths {
    fn new(first: Vec<Mat>, second: Vec<Mat>) -> Self {
        Self { first, second }
    }
}

/// What a check measures: either two paths around a diagram or a single
/// defect against a scale.
#[derive(Clone, Debug)]
pub enum Outcome {
    Paths(Paths),
    Defect { defect: f64, scale: f64, degenerate: bool },
}

fn owned(m: Arc<Mat>) -> Mat {
    Arc::unwrap_or_clone(m)
}

/// `(X ⊙ L²(B)) ⊙ Y → X ⊙ (L²(B) ⊙ Y) → X ⊙ Y` against `r_X ⊙ 1`.
pub fn triangle(ctx: &Context, kind: TensorKind, x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Paths> {
    let i = ctx.standard(x.right_algebra());
    let a = ctx.associator(kind, x, &i, y)?;
    let iy = ctx.obj(kind, &i, y)?;
    let l = ctx.left_unitor(kind, y)?;
    let one_l = ctx.tensor_right_map(kind, x, (&l, &iy, y))?;
    let xi = ctx.obj(kind, x, &i)?;
    let r = ctx.right_unitor(kind, x)?;
    let r_one = ctx.tensor_left_map(kind, (&r, &xi, x), y)?;
    Ok(Paths::new(vec![owned(a), one_l], vec![r_one]))
}

/// `a_{W⊙X,Y,Z}` then `a_{W,X,Y⊙Z}` against `a_{W,X,Y} ⊙ 1`, `a_{W,X⊙Y,Z}`,
/// `1 ⊙ a_{X,Y,Z}`.
pub fn pentagon(
    ctx: &Context,
    kind: TensorKind,
    w: &Arc<Bimodule>,
    x: &Arc<Bimodule>,
    y: &Arc<Bimodule>,
    z: &Arc<Bimodule>,
) -> Result<Paths> {
    let wx = ctx.obj(kind, w, x)?;
    let xy = ctx.obj(kind, x, y)?;
    let yz = ctx.obj(kind, y, z)?;
    let wx_y = ctx.obj(kind, &wx, y)?;
    let w_xy = ctx.obj(kind, w, &xy)?;
    let xy_z = ctx.obj(kind, &xy, z)?;
    let x_yz = ctx.obj(kind, x, &yz)?;

    let first = vec![owned(ctx.associator(kind, &wx, y, z)?), owned(ctx.associator(kind, w, x, &yz)?)];
    let a_wxy = ctx.associator(kind, w, x, y)?;
    let step1 = ctx.tensor_left_map(kind, (&a_wxy, &wx_y, &w_xy), z)?;
    let step2 = owned(ctx.associator(kind, w, &xy, z)?);
    let a_xyz = ctx.associator(kind, x, y, z)?;
    let step3 = ctx.tensor_right_map(kind, w, (&a_xyz, &xy_z, &x_yz))?;
    Ok(Paths::new(first, vec![step1, step2, step3]))
}

/// `l⋌ ∘ m_{L²(A),X}` against `l⋋`.
pub fn m_unit_left(ctx: &Context, x: &Arc<Bimodule>) -> Result<Paths> {
    let la = ctx.standard(x.left_algebra());
    let m = ctx.m(&la, x)?;
    let lr = ctx.left_unitor(TensorKind::Right, x)?;
    let ll = ctx.left_unitor(TensorKind::Left, x)?;
    Ok(Paths::new(vec![owned(m), owned(lr)], vec![owned(ll)]))
}

/// `r⋌ ∘ m_{X,L²(B)}` against `r⋋`.
pub fn m_unit_right(ctx: &Context, x: &Arc<Bimodule>) -> Result<Paths> {
    let lb = ctx.standard(x.right_algebra());
    let m = ctx.m(x, &lb)?;
    let rr = ctx.right_unitor(TensorKind::Right, x)?;
    let rl = ctx.right_unitor(TensorKind::Left, x)?;
    Ok(Paths::new(vec![owned(m), owned(rr)], vec![owned(rl)]))
}

/// `a⋌ ∘ m_{X⋌Y,Z} ∘ (m_{X,Y} ⋋ 1)` against `m_{X,Y⋌Z} ∘ (1 ⋋ m_{Y,Z}) ∘ a⋋`.
pub fn m_assoc(ctx: &Context, x: &Arc<Bimodule>, y: &Arc<Bimodule>, z: &Arc<Bimodule>) -> Result<Paths> {
    use TensorKind::{Left, Right};
    let xy_l = ctx.obj(Left, x, y)?;
    let xy_r = ctx.obj(Right, x, y)?;
    let yz_l = ctx.obj(Left, y, z)?;
    let yz_r = ctx.obj(Right, y, z)?;

    let m_xy = ctx.m(x, y)?;
    let first = vec![
        ctx.tensor_left_map(Left, (&m_xy, &xy_l, &xy_r), z)?,
        owned(ctx.m(&xy_r, z)?),
        owned(ctx.associator(Right, x, y, z)?),
    ];
    let m_yz = ctx.m(y, z)?;
    let second = vec![
        owned(ctx.associator(Left, x, y, z)?),
        ctx.tensor_right_map(Left, x, (&m_yz, &yz_l, &yz_r))?,
        owned(ctx.m(x, &yz_r)?),
    ];
    Ok(Paths::new(first, second))
}

/// Anti-multiplicativity hexagon from `(Z* ⊙ Y*) ⊙ X*` to
/// `((X ⊙ Y) ⊙ Z)*`:
/// `^ta_{X,Y,Z} ∘ c_{X,Y⊙Z} ∘ (c_{Y,Z} ⊙ 1)` against
/// `c_{X⊙Y,Z} ∘ (1 ⊙ c_{X,Y}) ∘ a_{Z*,Y*,X*}`.
pub fn hexagon(
    ctx: &Context,
    variant: CVariant,
    x: &Arc<Bimodule>,
    y: &Arc<Bimodule>,
    z: &Arc<Bimodule>,
) -> Result<Paths> {
    let (dk, ok) = (variant.dual_kind(), variant.kind());
    let (xd, yd, zd) = (ctx.dual(x), ctx.dual(y), ctx.dual(z));
    let xy = ctx.obj(ok, x, y)?;
    let yz = ctx.obj(ok, y, z)?;

    let zy_d = ctx.obj(dk, &zd, &yd)?;
    let yz_d = ctx.dual(&yz);
    let c_yz = ctx.c(variant, y, z)?;
    let first = vec![
        ctx.tensor_left_map(dk, (&c_yz, &zy_d, &yz_d), &xd)?,
        owned(ctx.c(variant, x, &yz)?),
        ctx.associator(ok, x, y, z)?.transpose(),
    ];

    let yx_d = ctx.obj(dk, &yd, &xd)?;
    let xy_d = ctx.dual(&xy);
    let c_xy = ctx.c(variant, x, y)?;
    let second = vec![
        owned(ctx.associator(dk, &zd, &yd, &xd)?),
        ctx.tensor_right_map(dk, &zd, (&c_xy, &yx_d, &xy_d))?,
        owned(ctx.c(variant, &xy, z)?),
    ];
    Ok(Paths::new(first, second))
}

/// `c_{Y*,X*} ∘ (d_X ⊙ d_Y)` against `^tc_{X,Y} ∘ d_{X⊙Y}`, both from `X ⊙ Y`
/// to `(Y* ⊙ X*)*`.
pub fn duality_square(ctx: &Context, kind: TensorKind, x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Paths> {
    let variant = match kind {
        TensorKind::Left => CVariant::Left,
        TensorKind::Right => CVariant::Right,
    };
    let (xd, yd) = (ctx.dual(x), ctx.dual(y));
    let (xdd, ydd) = (ctx.dual(&xd), ctx.dual(&yd));
    let (dx, dy) = (ctx.d(x)?, ctx.d(y)?);
    let first = vec![
        ctx.tensor_maps(kind, (&dx, x, &xdd), (&dy, y, &ydd))?,
        owned(ctx.c(variant, &yd, &xd)?),
    ];
    let xy = ctx.obj(kind, x, y)?;
    let second = vec![owned(ctx.d(&xy)?), ctx.c(variant, x, y)?.transpose()];
    Ok(Paths::new(first, second))
}

/// `^td_X ∘ d_{X*}` against the identity of `X*`.
pub fn transpose_d(ctx: &Context, x: &Arc<Bimodule>) -> Result<Paths> {
    let xd = ctx.dual(x);
    let first = vec![owned(ctx.d(&xd)?), ctx.d(x)?.transpose()];
    Ok(Paths::new(first, vec![linalg::identity(xd.dim())]))
}

/// `^t(f*)` against `(^tf)*`.
pub fn transpose_adjoint(f: &Morphism) -> Paths {
    Paths::new(vec![f.adjoint().transpose().into_matrix()], vec![f.transpose().adjoint().into_matrix()])
}

/// `^tm_{X,Y} ∘ c⋌_{X,Y} ∘ m_{Y*,X*}` against `c⋋_{X,Y}`.
pub fn involution_equivalence(ctx: &Context, x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Paths> {
    let (xd, yd) = (ctx.dual(x), ctx.dual(y));
    let first = vec![
        owned(ctx.m(&yd, &xd)?),
        owned(ctx.c(CVariant::Right, x, y)?),
        ctx.m(x, y)?.transpose(),
    ];
    Ok(Paths::new(first, vec![owned(ctx.c(CVariant::Left, x, y)?)]))
}

fn ends(f: &Morphism) -> (&Mat, &Arc<Bimodule>, &Arc<Bimodule>) {
    (f.matrix(), f.source(), f.target())
}

/// `l_{X'} ∘ (1 ⊙ f)` against `f ∘ l_X`.
pub fn naturality_l(ctx: &Context, kind: TensorKind, f: &Morphism) -> Result<Paths> {
    let la = ctx.standard(f.source().left_algebra());
    let first = vec![ctx.tensor_right_map(kind, &la, ends(f))?, owned(ctx.left_unitor(kind, f.target())?)];
    let second = vec![owned(ctx.left_unitor(kind, f.source())?), f.matrix().clone()];
    Ok(Paths::new(first, second))
}

/// `r_{X'} ∘ (f ⊙ 1)` against `f ∘ r_X`.
pub fn naturality_r(ctx: &Context, kind: TensorKind, f: &Morphism) -> Result<Paths> {
    let lb = ctx.standard(f.source().right_algebra());
    let first = vec![ctx.tensor_left_map(kind, ends(f), &lb)?, owned(ctx.right_unitor(kind, f.target())?)];
    let second = vec![owned(ctx.right_unitor(kind, f.source())?), f.matrix().clone()];
    Ok(Paths::new(first, second))
}

/// `a' ∘ ((f ⊙ g) ⊙ h)` against `(f ⊙ (g ⊙ h)) ∘ a`.
pub fn naturality_a(ctx: &Context, kind: TensorKind, f: &Morphism, g: &Morphism, h: &Morphism) -> Result<Paths> {
    let (x, y, z) = (f.source(), g.source(), h.source());
    let (x2, y2, z2) = (f.target(), g.target(), h.target());
    let fg = ctx.tensor_maps(kind, ends(f), ends(g))?;
    let (xy, xy2) = (ctx.obj(kind, x, y)?, ctx.obj(kind, x2, y2)?);
    let first = vec![
        ctx.tensor_maps(kind, (&fg, &xy, &xy2), ends(h))?,
        owned(ctx.associator(kind, x2, y2, z2)?),
    ];
    let gh = ctx.tensor_maps(kind, ends(g), ends(h))?;
    let (yz, yz2) = (ctx.obj(kind, y, z)?, ctx.obj(kind, y2, z2)?);
    let second = vec![
        owned(ctx.associator(kind, x, y, z)?),
        ctx.tensor_maps(kind, ends(f), (&gh, &yz, &yz2))?,
    ];
    Ok(Paths::new(first, second))
}

/// `m_{X',Y'} ∘ (f ⋋ g)` against `(f ⋌ g) ∘ m_{X,Y}`.
pub fn naturality_m(ctx: &Context, f: &Morphism, g: &Morphism) -> Result<Paths> {
    let first = vec![
        ctx.tensor_maps(TensorKind::Left, ends(f), ends(g))?,
        owned(ctx.m(f.target(), g.target())?),
    ];
    let second = vec![
        owned(ctx.m(f.source(), g.source())?),
        ctx.tensor_maps(TensorKind::Right, ends(f), ends(g))?,
    ];
    Ok(Paths::new(first, second))
}

/// `^t(f ⊙ g) ∘ c_{X',Y'}` against `c_{X,Y} ∘ (^tg ⊙ ^tf)`.
pub fn naturality_c(ctx: &Context, variant: CVariant, f: &Morphism, g: &Morphism) -> Result<Paths> {
    let (dk, ok) = (variant.dual_kind(), variant.kind());
    let fg = ctx.tensor_maps(ok, ends(f), ends(g))?;
    let first = vec![owned(ctx.c(variant, f.target(), g.target())?), fg.transpose()];
    let (xd, yd) = (ctx.dual(f.source()), ctx.dual(g.source()));
    let (xd2, yd2) = (ctx.dual(f.target()), ctx.dual(g.target()));
    let (gt, ft) = (g.matrix().transpose(), f.matrix().transpose());
    let second = vec![
        ctx.tensor_maps(dk, (&gt, &yd2, &yd), (&ft, &xd2, &xd))?,
        owned(ctx.c(variant, f.source(), g.source())?),
    ];
    Ok(Paths::new(first, second))
}

/// Largest operator-norm violation of the bimodule axioms; the scale is 1
/// because matrix units act with norm at most one.
pub fn bimodule_axioms(x: &Bimodule) -> Outcome {
    let d = x.dim();
    if d == 0 {
        return Outcome::Defect { defect: 0.0, scale: 1.0, degenerate: true };
    }
    let mut defect = 0.0f64;
    let (a, b) = (x.left_algebra(), x.right_algebra());
    let check_rep = |actions: &[Mat], alg: &crate::algebra::MultiMatrixAlgebra, defect: &mut f64, transpose_order: bool| {
        for u in alg.units() {
            let eu = &actions[alg.unit_index(u.block, u.row, u.col)];
            let star = &actions[alg.unit_index(u.block, u.col, u.row)];
            *defect = defect.max(linalg::op_norm(&(eu.adjoint() - star)));
            for v in alg.units().filter(|v| v.block == u.block) {
                let ev = &actions[alg.unit_index(v.block, v.row, v.col)];
                // e_u e_v = δ e_{u.row, v.col}; right actions reverse the order.
                let expected = if u.col == v.row {
                    actions[alg.unit_index(u.block, u.row, v.col)].clone()
                } else {
                    linalg::zeros(d, d)
                };
                let product = if transpose_order { ev * eu } else { eu * ev };
                *defect = defect.max(linalg::op_norm(&(product - expected)));
            }
        }
        let mut unit = linalg::zeros(d, d);
        for k in 0..alg.num_blocks() {
            for i in 0..alg.blocks()[k] {
                unit += &actions[alg.unit_index(k, i, i)];
            }
        }
        *defect = defect.max(linalg::op_norm(&(unit - linalg::identity(d))));
    };
    check_rep(x.left_actions(), a, &mut defect, false);
    check_rep(x.right_actions(), b, &mut defect, true);
    for l in x.left_actions() {
        for r in x.right_actions() {
            defect = defect.max(linalg::op_norm(&(l * r - r * l)));
        }
    }
    Outcome::Defect { defect, scale: 1.0, degenerate: false }
}

/// Largest operator-norm violation of `T L(e) = L'(e) T` and
/// `T R(e) = R'(e) T`, against `‖T‖`.
pub fn morphism_intertwines(f: &Morphism) -> Result<Outcome> {
    let (x, y) = (f.source(), f.target());
    if !x.same_algebras(y) {
        return Err(Error::AlgebraMismatch("morphism between bimodules over different algebras".into()));
    }
    let t = f.matrix();
    if x.dim() == 0 || y.dim() == 0 {
        return Ok(Outcome::Defect { defect: 0.0, scale: 1.0, degenerate: true });
    }
    let mut defect = 0.0f64;
    for (l, l2) in x.left_actions().iter().zip(y.left_actions()) {
        defect = defect.max(linalg::op_norm(&(t * l - l2 * t)));
    }
    for (r, r2) in x.right_actions().iter().zip(y.right_actions()) {
        defect = defect.max(linalg::op_norm(&(t * r - r2 * t)));
    }
    Ok(Outcome::Defect { defect, scale: linalg::op_norm(t), degenerate: false })
}
