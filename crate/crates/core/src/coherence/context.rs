//! Shared constructions for one suite run.
//!
//! Products, duals and structural maps are built once and reused by every
//! check. Cache keys use `Arc` addresses; the cached values hold the input
//! `Arc`s, so an address cannot be recycled while its entry is alive.
//! Construction is deterministic, so two threads racing on the same key
//! produce identical matrices and the first insert wins.

use std::collections::HashMap;
use std::hash::Hash;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};

use crate::algebra::{standard_form, MultiMatrixAlgebra};
use crate::bimodule::{dual_bimodule, Bimodule};
use crate::error::{Error, Result};
use crate::instance::{random_hermitian, rng_for, Stream};
use crate::involution;
use crate::linalg::{self, Mat};
use crate::tensor::{self, TensorKind, TensorProduct};

/// Which anti-multiplicativity map: `c` itself (duals multiplied by `⋌`,
/// factors by `⋋`) or one of the single-kind versions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CVariant {
    Mixed,
    Left,
    Right,
}

impl CVariant {
    pub const ALL: [CVariant; 3] = [CVariant::Left, CVariant::Right, CVariant::Mixed];

    /// Kind used between duals.
    pub fn dual_kind(self) -> TensorKind {
        match self {
            CVariant::Left => TensorKind::Left,
            CVariant::Right | CVariant::Mixed => TensorKind::Right,
        }
    }

    /// Kind used between the factors.
    pub fn kind(self) -> TensorKind {
        match self {
            CVariant::Right => TensorKind::Right,
            CVariant::Left | CVariant::Mixed => TensorKind::Left,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            CVariant::Mixed => "mixed",
            CVariant::Left => "left",
            CVariant::Right => "right",
        }
    }
}

/// Structural map families that a mutation can target.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Family {
    /// Left unit isomorphisms.
    L,
    /// Right unit isomorphisms.
    R,
    /// Associators.
    A,
    /// `m_{X,Y}`.
    M,
    /// Anti-multiplicativity maps (the mixed one; the others are derived).
    C,
    /// Double-dual identifications.
    D,
}

impl Family {
    pub const ALL: [Family; 6] = [Family::L, Family::R, Family::A, Family::M, Family::C, Family::D];

    pub fn as_str(self) -> &'static str {
        match self {
            Family::L => "l",
            Family::R => "r",
            Family::A => "a",
            Family::M => "m",
            Family::C => "c",
            Family::D => "d",
        }
    }
}

/// Replace every map of one family (optionally of one kind) by `U·T` with
/// `U = exp(iεH)`, `‖H‖ = 1`. `H` depends only on the seed, the family, the
/// kind and the shape of `T`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mutation {
    pub family: Family,
    pub kind: Option<TensorKind>,
    pub eps: f64,
    pub seed: u64,
}

impl Mutation {
    fn applies(&self, family: Family, kind: Option<TensorKind>) -> bool {
        self.family == family && (self.kind.is_none() || kind.is_none() || self.kind == kind)
    }

    fn rotation(&self, kind: Option<TensorKind>, n: usize, cols: usize) -> Mat {
        let kind_code = match kind {
            None => 0u64,
            Some(TensorKind::Left) => 1,
            Some(TensorKind::Right) => 2,
        };
        let index = (self.family as u64)
            .wrapping_mul(3)
            .wrapping_add(kind_code)
            .wrapping_mul(1 << 20)
            .wrapping_add((n as u64) << 10)
            .wrapping_add(cols as u64);
        let mut h = random_hermitian(&mut rng_for(self.seed, Stream::Mutation, index), n);
        let norm = linalg::op_norm(&h);
        if norm > 0.0 {
            h /= linalg::c(norm, 0.0);
        }
        linalg::unitary_rotation(&h, self.eps)
    }
}

type Key = (u8, u8, [usize; 3]);

fn kind_code(kind: TensorKind) -> u8 {
    match kind {
        TensorKind::Left => 0,
        TensorKind::Right => 1,
    }
}

fn addr(x: &Arc<Bimodule>) -> usize {
    Arc::as_ptr(x) as usize
}

struct Cache<K, V>(Mutex<HashMap<K, V>>);

impl<K: Eq + Hash, V: Clone> Cache<K, V> {
    fn new() -> Self {
        Self(Mutex::new(HashMap::new()))
    }

    fn get_or_try(&self, key: K, build: impl FnOnce() -> Result<V>) -> Result<V> {
        if let Some(v) = self.0.lock().expect("cache lock").get(&key) {
            return Ok(v.clone());
        }
        let v = build()?;
        Ok(self.0.lock().expect("cache lock").entry(key).or_insert(v).clone())
    }
}

/// A structural map together with the bimodules that keep its cache key
/// alive.
#[derive(Clone)]
struct MapEntry {
    _inputs: Vec<Arc<Bimodule>>,
    matrix: Arc<Mat>,
}

pub struct Context {
    mutation: Option<Mutation>,
    products: Cache<Key, Arc<TensorProduct>>,
    duals: Cache<usize, (Arc<Bimodule>, Arc<Bimodule>)>,
    standard: Cache<Vec<usize>, Arc<Bimodule>>,
    maps: Cache<Key, MapEntry>,
}

impl Default for Context {
    fn default() -> Self {
        Self::new(None)
    }
}

impl Context {
    pub fn new(mutation: Option<Mutation>) -> Self {
        Self {
            mutation,
            products: Cache::new(),
            duals: Cache::new(),
            standard: Cache::new(),
            maps: Cache::new(),
        }
    }

    pub fn mutation(&self) -> Option<&Mutation> {
        self.mutation.as_ref()
    }

    pub fn product(&self, kind: TensorKind, x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Arc<TensorProduct>> {
        self.products
            .get_or_try((0, kind_code(kind), [addr(x), addr(y), 0]), || Ok(Arc::new(tensor::tensor(kind, x, y)?)))
    }

    /// `X ⊙ Y` as a bimodule.
    pub fn obj(&self, kind: TensorKind, x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Arc<Bimodule>> {
        Ok(self.product(kind, x, y)?.result().clone())
    }

    pub fn dual(&self, x: &Arc<Bimodule>) -> Arc<Bimodule> {
        self.duals
            .get_or_try(addr(x), || Ok((x.clone(), Arc::new(dual_bimodule(x)))))
            .expect("dual construction is infallible")
            .1
    }

    pub fn standard(&self, a: &MultiMatrixAlgebra) -> Arc<Bimodule> {
        self.standard
            .get_or_try(a.blocks().to_vec(), || Ok(standard_form(a).bimodule().clone()))
            .expect("standard form construction is infallible")
    }

    fn structural(
        &self,
        family: Family,
        kind: Option<TensorKind>,
        inputs: &[&Arc<Bimodule>],
        build: impl FnOnce() -> Result<Mat>,
    ) -> Result<Arc<Mat>> {
        let mut ids = [0usize; 3];
        for (slot, x) in ids.iter_mut().zip(inputs) {
            *slot = addr(x);
        }
        let code = kind.map_or(2, kind_code);
        let entry = self.maps.get_or_try((family as u8 + 1, code, ids), || {
            let mut m = build()?;
            if let Some(mu) = &self.mutation {
                if mu.applies(family, kind) {
                    m = mu.rotation(kind, m.nrows(), m.ncols()) * m;
                }
            }
            Ok(MapEntry { _inputs: inputs.iter().map(|x| (*x).clone()).collect(), matrix: Arc::new(m) })
        })?;
        Ok(entry.matrix)
    }

    /// `l_X: L²(A) ⊙ X → X`.
    pub fn left_unitor(&self, kind: TensorKind, x: &Arc<Bimodule>) -> Result<Arc<Mat>> {
        self.structural(Family::L, Some(kind), &[x], || {
            let la = self.standard(x.left_algebra());
            Ok(tensor::left_unitor(self.product(kind, &la, x)?.as_ref())?.into_matrix())
        })
    }

    /// `r_X: X ⊙ L²(B) → X`.
    pub fn right_unitor(&self, kind: TensorKind, x: &Arc<Bimodule>) -> Result<Arc<Mat>> {
        self.structural(Family::R, Some(kind), &[x], || {
            let lb = self.standard(x.right_algebra());
            Ok(tensor::right_unitor(self.product(kind, x, &lb)?.as_ref())?.into_matrix())
        })
    }

    /// `a_{X,Y,Z}: (X ⊙ Y) ⊙ Z → X ⊙ (Y ⊙ Z)`.
    pub fn associator(
        &self,
        kind: TensorKind,
        x: &Arc<Bimodule>,
        y: &Arc<Bimodule>,
        z: &Arc<Bimodule>,
    ) -> Result<Arc<Mat>> {
        self.structural(Family::A, Some(kind), &[x, y, z], || {
            let xy = self.product(kind, x, y)?;
            let yz = self.product(kind, y, z)?;
            let source = self.product(kind, xy.result(), z)?;
            let target = self.product(kind, x, yz.result())?;
            Ok(tensor::associator_from(&xy, &yz, &source, &target)?.into_matrix())
        })
    }

    /// `m_{X,Y}: X ⋋ Y → X ⋌ Y`.
    pub fn m(&self, x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Arc<Mat>> {
        self.structural(Family::M, None, &[x, y], || {
            let left = self.product(TensorKind::Left, x, y)?;
            let right = self.product(TensorKind::Right, x, y)?;
            let rx = crate::bounded::right_projective_realization(x)?;
            let ly = crate::bounded::left_projective_realization(y)?;
            Ok(tensor::m_iso_from(&left, &right, &rx, &ly)?.into_matrix())
        })
    }

    /// `c_{X,Y}` of the given variant, from `Y* ⊙ X*` to `(X ⊙ Y)*`.
    pub fn c(&self, variant: CVariant, x: &Arc<Bimodule>, y: &Arc<Bimodule>) -> Result<Arc<Mat>> {
        match variant {
            CVariant::Mixed => self.structural(Family::C, None, &[x, y], || {
                let (xd, yd) = (self.dual(x), self.dual(y));
                let duals = self.product(TensorKind::Right, &yd, &xd)?;
                let product = self.product(TensorKind::Left, x, y)?;
                let target = self.dual(product.result());
                Ok(involution::c_mixed_from(&duals, &product, &target)?.into_matrix())
            }),
            // Derived maps are cached under a separate tag so they are not
            // mutated a second time.
            CVariant::Right => self.derived(1, x, y, || {
                let c = self.c(CVariant::Mixed, x, y)?;
                let m = self.m(x, y)?;
                let inv = m.transpose().try_inverse().ok_or_else(|| Error::NotWellDefined {
                    context: "transpose of m".into(),
                    defect: f64::INFINITY,
                })?;
                Ok(inv * c.as_ref())
            }),
            CVariant::Left => self.derived(2, x, y, || {
                let c = self.c(CVariant::Mixed, x, y)?;
                let m = self.m(&self.dual(y), &self.dual(x))?;
                Ok(c.as_ref() * m.as_ref())
            }),
        }
    }

    fn derived(&self, tag: u8, x: &Arc<Bimodule>, y: &Arc<Bimodule>, build: impl FnOnce() -> Result<Mat>) -> Result<Arc<Mat>> {
        let entry = self.maps.get_or_try((100 + tag, 2, [addr(x), addr(y), 0]), || {
            Ok(MapEntry { _inputs: vec![x.clone(), y.clone()], matrix: Arc::new(build()?) })
        })?;
        Ok(entry.matrix)
    }

    /// `d_X: X → X**`.
    pub fn d(&self, x: &Arc<Bimodule>) -> Result<Arc<Mat>> {
        self.structural(Family::D, None, &[x], || Ok(linalg::identity(x.dim())))
    }

    /// `f ⊙ g` for `f: X → X'` and `g: Y → Y'`, without asserting that the
    /// result is well defined: a map that is not an intertwiner yields the
    /// least-squares extension, whose error surfaces in the enclosing check.
    pub fn tensor_maps(
        &self,
        kind: TensorKind,
        f: (&Mat, &Arc<Bimodule>, &Arc<Bimodule>),
        g: (&Mat, &Arc<Bimodule>, &Arc<Bimodule>),
    ) -> Result<Mat> {
        let source = self.product(kind, f.1, g.1)?;
        let target = self.product(kind, f.2, g.2)?;
        if f.0.shape() != (f.2.dim(), f.1.dim()) || g.0.shape() != (g.2.dim(), g.1.dim()) {
            return Err(Error::DimensionMismatch("tensored maps do not match their bimodules".into()));
        }
        Ok(tensor::tensor_morphism_matrix(f.0, g.0, &source, &target).0)
    }

    /// `f ⊙ 1_Y`.
    pub fn tensor_left_map(&self, kind: TensorKind, f: (&Mat, &Arc<Bimodule>, &Arc<Bimodule>), y: &Arc<Bimodule>) -> Result<Mat> {
        let id = linalg::identity(y.dim());
        self.tensor_maps(kind, f, (&id, y, y))
    }

    /// `1_X ⊙ g`.
    pub fn tensor_right_map(&self, kind: TensorKind, x: &Arc<Bimodule>, g: (&Mat, &Arc<Bimodule>, &Arc<Bimodule>)) -> Result<Mat> {
        let id = linalg::identity(x.dim());
        self.tensor_maps(kind, (&id, x, x), g)
    }
}
