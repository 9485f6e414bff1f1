//! Seeded random instances and their JSON form.
//!
//! Every generated object draws from its own ChaCha8 stream
//! (`seed_from_u64(seed)` followed by `set_stream(kind << 32 | index)`), so
//! adding or removing one object leaves the others unchanged.

use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::algebra::MultiMatrixAlgebra;
use crate::bimodule::{hom_basis, Bimodule, Morphism};
use crate::error::{Error, Result};
use crate::linalg::{self, Mat, C64};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct Limits {
    pub max_blocks: usize,
    pub max_block_size: usize,
    pub max_multiplicity: usize,
    /// Bound on the dimension of every bimodule in a generated chain and of
    /// every product of consecutive chain members.
    pub max_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Self { max_blocks: 3, max_block_size: 3, max_multiplicity: 2, max_dim: 40 }
    }
}

impl Limits {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("maxBlocks", self.max_blocks),
            ("maxBlockSize", self.max_block_size),
            ("maxMultiplicity", self.max_multiplicity),
            ("maxDim", self.max_dim),
        ] {
            if v == 0 {
                return Err(Error::Instance(format!("limit {name} must be positive")));
            }
        }
        Ok(())
    }
}

/// Stream families; the stream id is `family << 32 | index`.
#[derive(Clone, Copy, Debug)]
#[repr(u64)]
pub enum Stream {
    Structure = 0,
    Algebra = 1,
    Multiplicity = 2,
    Basis = 3,
    Morphism = 4,
    Mutation = 5,
    Test = 6,
}

pub fn rng_for(seed: u64, stream: Stream, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((stream as u64) << 32) | (index & 0xffff_ffff));
    rng
}

pub fn random_complex(rng: &mut impl Rng) -> C64 {
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    linalg::c(re, im)
}

pub fn random_matrix(rng: &mut impl Rng, rows: usize, cols: usize) -> Mat {
    let mut m = linalg::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = random_complex(rng);
        }
    }
    m
}

pub fn random_hermitian(rng: &mut impl Rng, n: usize) -> Mat {
    linalg::hermitian_part(&random_matrix(rng, n, n))
}

/// Haar-distributed unitary: QR of a complex Gaussian matrix with the
/// diagonal of `R` made positive.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> Mat {
    if n == 0 {
        return linalg::zeros(0, 0);
    }
    let qr = random_matrix(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        if d.norm() > 0.0 {
            let phase = d / d.norm();
            let col = q.column(j) * phase;
            q.column_mut(j).copy_from(&col);
        }
    }
    q
}

/// Flat coordinates of a random element with Gaussian entries.
pub fn random_element(rng: &mut impl Rng, a: &MultiMatrixAlgebra) -> Vec<C64> {
    (0..a.dim()).map(|_| random_complex(rng)).collect()
}

pub fn random_algebra(rng: &mut impl Rng, limits: &Limits) -> MultiMatrixAlgebra {
    let k = rng.random_range(1..=limits.max_blocks.max(1));
    let blocks = (0..k).map(|_| rng.random_range(1..=limits.max_block_size.max(1))).collect();
    MultiMatrixAlgebra::new(blocks).expect("block sizes are positive")
}

/// A multiplicity matrix in `[0, max]^{K×L}` with no zero row or column, so
/// that both actions are faithful.
pub fn random_multiplicities(rng: &mut impl Rng, k: usize, l: usize, max: usize) -> Vec<Vec<usize>> {
    loop {
        let mu: Vec<Vec<usize>> = (0..k).map(|_| (0..l).map(|_| rng.random_range(0..=max)).collect()).collect();
        let rows_ok = mu.iter().all(|row| row.iter().any(|&v| v > 0));
        let cols_ok = (0..l).all(|j| mu.iter().any(|row| row[j] > 0));
        if rows_ok && cols_ok {
            return mu;
        }
    }
}

/// `dim = Σ n_k μ_kl m_l`.
pub fn canonical_dim(a: &MultiMatrixAlgebra, b: &MultiMatrixAlgebra, mu: &[Vec<usize>]) -> usize {
    let mut d = 0;
    for (k, &n) in a.blocks().iter().enumerate() {
        for (l, &m) in b.blocks().iter().enumerate() {
            d += n * mu[k][l] * m;
        }
    }
    d
}

pub fn multiply_multiplicities(x: &[Vec<usize>], y: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let cols = y.first().map_or(0, |r| r.len());
    x.iter()
        .map(|row| (0..cols).map(|l| row.iter().zip(y).map(|(&a, yr)| a * yr[l]).sum()).collect())
        .collect()
}

/// A canonical model with random faithful multiplicities, conjugated by a
/// random unitary. Returns the bimodule with its multiplicities and basis.
pub fn random_bimodule(
    a: &MultiMatrixAlgebra,
    b: &MultiMatrixAlgebra,
    rng: &mut impl Rng,
    limits: &Limits,
) -> Result<(Bimodule, Vec<Vec<usize>>, Mat)> {
    let mu = random_multiplicities(rng, a.num_blocks(), b.num_blocks(), limits.max_multiplicity);
    let canon = Bimodule::from_multiplicities(a, b, &mu)?;
    let u = random_unitary(rng, canon.dim());
    Ok((canon.conjugate(&u), mu, u))
}

/// A random complex combination of `hom_basis(X, Y)`; the zero map when the
/// hom space is trivial.
pub fn random_morphism(x: &Arc<Bimodule>, y: &Arc<Bimodule>, rng: &mut impl Rng) -> Result<(Morphism, Vec<C64>)> {
    let basis = hom_basis(x, y)?;
    let coefficients: Vec<C64> = basis.iter().map(|_| random_complex(rng)).collect();
    Ok((combine_basis(x, y, &basis, &coefficients)?, coefficients))
}

/// The unitary part of a random morphism between isomorphic bimodules.
pub fn random_unitary_morphism(
    x: &Arc<Bimodule>,
    y: &Arc<Bimodule>,
    rng: &mut impl Rng,
) -> Result<(Morphism, Vec<C64>)> {
    let basis = hom_basis(x, y)?;
    let (f, _) = random_morphism(x, y, rng)?;
    let polar = f.matrix() * linalg::psd_inv_sqrt(&(f.matrix().adjoint() * f.matrix()));
    // The basis is Hilbert-Schmidt orthonormal.
    let coefficients: Vec<C64> = basis.iter().map(|b| (b.matrix().adjoint() * &polar).trace()).collect();
    Ok((combine_basis(x, y, &basis, &coefficients)?, coefficients))
}

fn combine_basis(x: &Arc<Bimodule>, y: &Arc<Bimodule>, basis: &[Morphism], coefficients: &[C64]) -> Result<Morphism> {
    let mut m = linalg::zeros(y.dim(), x.dim());
    for (b, &z) in basis.iter().zip(coefficients) {
        m += b.matrix() * z;
    }
    Morphism::new_unchecked(x.clone(), y.clone(), m)
}

/// Complex matrix as rows of `[re, im]` pairs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ComplexMatrix(pub Vec<Vec<[f64; 2]>>);

impl ComplexMatrix {
    pub fn from_mat(m: &Mat) -> Self {
        Self((0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect())
    }

    pub fn to_mat(&self, rows: usize, cols: usize, path: &str) -> Result<Mat> {
        if self.0.len() != rows || self.0.iter().any(|r| r.len() != cols) {
            return Err(Error::Schema { path: path.into(), message: format!("expected a {rows}x{cols} matrix") });
        }
        Ok(Mat::from_fn(rows, cols, |i, j| linalg::c(self.0[i][j][0], self.0[i][j][1])))
    }
}

pub fn complex_pairs(v: &[C64]) -> Vec<[f64; 2]> {
    v.iter().map(|z| [z.re, z.im]).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct BimoduleSpec {
    pub label: String,
    /// Index into `algebras`.
    pub left: usize,
    pub right: usize,
    /// Canonical model; optionally conjugated by `basis`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub multiplicities: Option<Vec<Vec<usize>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basis: Option<ComplexMatrix>,
    /// Explicit actions on matrix units, in flat unit order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub left_action: Option<Vec<ComplexMatrix>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub right_action: Option<Vec<ComplexMatrix>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct MorphismSpec {
    pub source: String,
    pub target: String,
    /// Coefficients over `hom_basis(source, target)`.
    pub coefficients: Vec<[f64; 2]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase", deny_unknown_fields)]
pub struct InstanceSpec {
    pub version: u32,
    pub seed: u64,
    #[serde(default)]
    pub limits: Limits,
    pub algebras: Vec<MultiMatrixAlgebra>,
    pub bimodules: Vec<BimoduleSpec>,
    #[serde(default)]
    pub morphisms: Vec<MorphismSpec>,
    /// Labels of a composable chain `X1, X2, …` to run the suite on.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<String>>,
}

impl InstanceSpec {
    pub fn empty(seed: u64) -> Self {
        Self {
            version: FORMAT_VERSION,
            seed,
            limits: Limits::default(),
            algebras: Vec::new(),
            bimodules: Vec::new(),
            morphisms: Vec::new(),
            chain: None,
        }
    }
}

pub fn save(spec: &InstanceSpec) -> Result<String> {
    Ok(serde_json::to_string_pretty(spec)?)
}

pub fn load(bytes: &[u8]) -> Result<InstanceSpec> {
    let value: serde_json::Value = serde_json::from_slice(bytes)
        .map_err(|e| Error::Schema { path: "$".into(), message: e.to_string() })?;
    match value.get("version") {
        None => {
            return Err(Error::Schema { path: "version".into(), message: "missing field `version`".into() });
        }
        Some(v) if v.as_u64() != Some(FORMAT_VERSION as u64) => {
            return Err(Error::Schema {
                path: "version".into(),
                message: format!("unsupported version {v}, expected {FORMAT_VERSION}"),
            });
        }
        _ => {}
    }
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        Error::Schema { path, message: e.into_inner().to_string() }
    })
}

/// An instance with every reference resolved.
#[derive(Clone, Debug)]
pub struct Instance {
    pub spec: InstanceSpec,
    pub bimodules: Vec<Arc<Bimodule>>,
    pub morphisms: Vec<Morphism>,
    /// Indices into `bimodules`.
    pub morphism_ends: Vec<(usize, usize)>,
    pub chain: Vec<usize>,
}

impl Instance {
    pub fn from_spec(spec: InstanceSpec) -> Result<Self> {
        spec.limits.validate()?;
        let algebra = |idx: usize, path: String| -> Result<&MultiMatrixAlgebra> {
            spec.algebras
                .get(idx)
                .ok_or_else(|| Error::Schema { path, message: format!("no algebra with index {idx}") })
        };
        let mut bimodules = Vec::with_capacity(spec.bimodules.len());
        for (i, b) in spec.bimodules.iter().enumerate() {
            let at = |field: &str| format!("bimodules[{i}].{field}");
            if spec.bimodules[..i].iter().any(|o| o.label == b.label) {
                return Err(Error::Schema { path: at("label"), message: format!("duplicate label {:?}", b.label) });
            }
            let a = algebra(b.left, at("left"))?;
            let c = algebra(b.right, at("right"))?;
            let bimodule = match (&b.multiplicities, &b.left_action, &b.right_action) {
                (Some(mu), None, None) => {
                    let canon = Bimodule::from_multiplicities(a, c, mu)
                        .map_err(|e| Error::Schema { path: at("multiplicities"), message: e.to_string() })?;
                    match &b.basis {
                        Some(u) => canon.conjugate(&u.to_mat(canon.dim(), canon.dim(), &at("basis"))?),
                        None => canon,
                    }
                }
                (None, Some(la), Some(ra)) => {
                    let d = b.dim.ok_or_else(|| Error::Schema { path: at("dim"), message: "missing field `dim`".into() })?;
                    if la.len() != a.dim() || ra.len() != c.dim() {
                        return Err(Error::Schema {
                            path: at("leftAction"),
                            message: format!("expected {} left and {} right action matrices", a.dim(), c.dim()),
                        });
                    }
                    let left = la
                        .iter()
                        .enumerate()
                        .map(|(u, m)| m.to_mat(d, d, &format!("{}[{u}]", at("leftAction"))))
                        .collect::<Result<Vec<_>>>()?;
                    let right = ra
                        .iter()
                        .enumerate()
                        .map(|(u, m)| m.to_mat(d, d, &format!("{}[{u}]", at("rightAction"))))
                        .collect::<Result<Vec<_>>>()?;
                    Bimodule::from_actions_unchecked(a.clone(), c.clone(), d, left, right)?
                }
                _ => {
                    return Err(Error::Schema {
                        path: format!("bimodules[{i}]"),
                        message: "expected either `multiplicities` or `dim`, `leftAction` and `rightAction`".into(),
                    })
                }
            };
            bimodules.push(Arc::new(bimodule));
        }
        let find = |label: &str, path: String| -> Result<usize> {
            spec.bimodules
                .iter()
                .position(|b| b.label == label)
                .ok_or_else(|| Error::Schema { path, message: format!("unknown bimodule {label:?}") })
        };
        let mut morphisms = Vec::new();
        let mut morphism_ends = Vec::new();
        for (i, m) in spec.morphisms.iter().enumerate() {
            let s = find(&m.source, format!("morphisms[{i}].source"))?;
            let t = find(&m.target, format!("morphisms[{i}].target"))?;
            let basis = hom_basis(&bimodules[s], &bimodules[t])
                .map_err(|e| Error::Schema { path: format!("morphisms[{i}]"), message: e.to_string() })?;
            if basis.len() != m.coefficients.len() {
                return Err(Error::Schema {
                    path: format!("morphisms[{i}].coefficients"),
                    message: format!("expected {} coefficients, found {}", basis.len(), m.coefficients.len()),
                });
            }
            let coeffs: Vec<C64> = m.coefficients.iter().map(|p| linalg::c(p[0], p[1])).collect();
            morphisms.push(combine_basis(&bimodules[s], &bimodules[t], &basis, &coeffs)?);
            morphism_ends.push((s, t));
        }
        let chain = match &spec.chain {
            Some(labels) => {
                let idx = labels
                    .iter()
                    .enumerate()
                    .map(|(i, l)| find(l, format!("chain[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                for (i, w) in idx.windows(2).enumerate() {
                    if bimodules[w[0]].right_algebra() != bimodules[w[1]].left_algebra() {
                        return Err(Error::Schema {
                            path: format!("chain[{}]", i + 1),
                            message: "chain members are not composable".into(),
                        });
                    }
                }
                idx
            }
            None => {
                // Longest composable prefix of the declared bimodules.
                let mut idx: Vec<usize> = Vec::new();
                for (i, b) in bimodules.iter().enumerate() {
                    if let Some(&last) = idx.last() {
                        if bimodules[last].right_algebra() != b.left_algebra() {
                            break;
                        }
                    }
                    idx.push(i);
                }
                idx
            }
        };
        Ok(Self { spec, bimodules, morphisms, morphism_ends, chain })
    }

    pub fn label(&self, idx: usize) -> &str {
        &self.spec.bimodules[idx].label
    }

    pub fn find(&self, label: &str) -> Option<usize> {
        self.spec.bimodules.iter().position(|b| b.label == label)
    }

    pub fn chain_bimodules(&self) -> Vec<Arc<Bimodule>> {
        self.chain.iter().map(|&i| self.bimodules[i].clone()).collect()
    }

    /// The `k`-th declared morphism out of each chain member, if any.
    pub fn chain_morphisms(&self, k: usize) -> Vec<Option<&Morphism>> {
        self.chain
            .iter()
            .map(|&c| {
                self.morphisms.iter().zip(&self.morphism_ends).filter(|(_, (s, _))| *s == c).map(|(m, _)| m).nth(k)
            })
            .collect()
    }
}

/// Draws the algebras and multiplicities of a composable chain of the given
/// length whose members and consecutive products all have dimension in
/// `[1, max_dim]`.
pub fn random_chain_shape(
    rng: &mut impl Rng,
    len: usize,
    limits: &Limits,
) -> (Vec<MultiMatrixAlgebra>, Vec<Vec<Vec<usize>>>) {
    for _ in 0..100_000 {
        let algebras: Vec<MultiMatrixAlgebra> = (0..=len).map(|_| random_algebra(rng, limits)).collect();
        let mus: Vec<Vec<Vec<usize>>> = (0..len)
            .map(|i| {
                random_multiplicities(rng, algebras[i].num_blocks(), algebras[i + 1].num_blocks(), limits.max_multiplicity)
            })
            .collect();
        let mut ok = true;
        'outer: for i in 0..len {
            let mut mu = mus[i].clone();
            for j in i..len {
                if j > i {
                    mu = multiply_multiplicities(&mu, &mus[j]);
                }
                let d = canonical_dim(&algebras[i], &algebras[j + 1], &mu);
                if d == 0 || d > limits.max_dim {
                    ok = false;
                    break 'outer;
                }
            }
        }
        if ok {
            return (algebras, mus);
        }
    }
    let c = MultiMatrixAlgebra::complex();
    (vec![c; len + 1], vec![vec![vec![1]]; len])
}

/// The default suite instance: a composable chain `X1…X4`, a twin `Xi'` of
/// each member in a different random basis, a random intertwiner
/// `Xi → Xi'` and a unitary one.
pub fn generate_suite_instance(seed: u64, limits: &Limits) -> Result<InstanceSpec> {
    generate_chain_instance(seed, limits, 4)
}

pub fn generate_chain_instance(seed: u64, limits: &Limits, len: usize) -> Result<InstanceSpec> {
    limits.validate()?;
    let mut rng = rng_for(seed, Stream::Structure, 0);
    let (algebras, mus) = random_chain_shape(&mut rng, len, limits);
    let mut spec = InstanceSpec::empty(seed);
    spec.limits = *limits;
    spec.algebras = algebras.clone();
    let mut built = Vec::new();
    for (i, mu) in mus.iter().enumerate() {
        let canon = Bimodule::from_multiplicities(&algebras[i], &algebras[i + 1], mu)?;
        for twin in 0..2u64 {
            let label = if twin == 0 { format!("X{}", i + 1) } else { format!("X{}'", i + 1) };
            let u = random_unitary(&mut rng_for(seed, Stream::Basis, 2 * i as u64 + twin), canon.dim());
            built.push(Arc::new(canon.conjugate(&u)));
            spec.bimodules.push(BimoduleSpec {
                label,
                left: i,
                right: i + 1,
                multiplicities: Some(mu.clone()),
                basis: Some(ComplexMatrix::from_mat(&u)),
                dim: None,
                left_action: None,
                right_action: None,
            });
        }
    }
    for i in 0..len {
        let (x, twin) = (&built[2 * i], &built[2 * i + 1]);
        let (_, f) = random_morphism(x, twin, &mut rng_for(seed, Stream::Morphism, 2 * i as u64))?;
        let (_, u) = random_unitary_morphism(x, twin, &mut rng_for(seed, Stream::Morphism, 2 * i as u64 + 1))?;
        for coefficients in [f, u] {
            spec.morphisms.push(MorphismSpec {
                source: format!("X{}", i + 1),
                target: format!("X{}'", i + 1),
                coefficients: complex_pairs(&coefficients),
            });
        }
    }
    spec.chain = Some((1..=len).map(|i| format!("X{i}")).collect());
    Ok(spec)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_limits_give_complex_numbers() {
        let limits = Limits { max_blocks: 1, max_block_size: 1, max_multiplicity: 1, max_dim: 40 };
        let mut rng = rng_for(3, Stream::Test, 0);
        for _ in 0..20 {
            assert_eq!(random_algebra(&mut rng, &limits), MultiMatrixAlgebra::complex());
        }
    }

    #[test]
    fn seed_reproduces_algebra() {
        let limits = Limits::default();
        let a = random_algebra(&mut rng_for(9, Stream::Algebra, 0), &limits);
        let b = random_algebra(&mut rng_for(9, Stream::Algebra, 0), &limits);
        assert_eq!(a, b);
    }

    #[test]
    fn random_unitary_is_unitary() {
        let u = random_unitary(&mut rng_for(1, Stream::Test, 0), 7);
        assert!(linalg::unitary_defect(&u) < 1e-12);
    }

    #[test]
    fn random_bimodule_is_valid() {
        let limits = Limits::default();
        let mut rng = rng_for(5, Stream::Test, 1);
        let a = random_algebra(&mut rng, &limits);
        let b = random_algebra(&mut rng, &limits);
        let (x, mu, _) = random_bimodule(&a, &b, &mut rng, &limits).unwrap();
        assert_eq!(x.dim(), canonical_dim(&a, &b, &mu));
        assert!(x.axiom_defects().max() < 1e-10);
        assert_eq!(x.multiplicities(), mu);
    }

    #[test]
    fn empty_hom_gives_zero_map() {
        let c = MultiMatrixAlgebra::complex();
        let m2 = MultiMatrixAlgebra::full_matrix(2).unwrap();
        let ab = MultiMatrixAlgebra::new(vec![1, 2]).unwrap();
        let x = Arc::new(Bimodule::from_multiplicities(&ab, &c, &[vec![1], vec![0]]).unwrap());
        let y = Arc::new(Bimodule::from_multiplicities(&ab, &c, &[vec![0], vec![1]]).unwrap());
        let (f, coeffs) = random_morphism(&x, &y, &mut rng_for(0, Stream::Test, 0)).unwrap();
        assert!(coeffs.is_empty());
        assert_eq!(linalg::max_abs(f.matrix()), 0.0);
        let _ = m2;
    }

    #[test]
    fn generated_instance_round_trips() {
        let spec = generate_suite_instance(42, &Limits { max_dim: 12, ..Limits::default() }).unwrap();
        let text = save(&spec).unwrap();
        assert_eq!(load(text.as_bytes()).unwrap(), spec);
        let inst = Instance::from_spec(spec).unwrap();
        assert_eq!(inst.chain.len(), 4);
        for (m, &(s, t)) in inst.morphisms.iter().zip(&inst.morphism_ends) {
            assert_eq!(m.source().dim(), inst.bimodules[s].dim());
            assert!(m.intertwiner_defect() < 1e-9);
            let _ = t;
        }
        for b in &inst.bimodules {
            assert!(b.dim() <= 12);
        }
    }

    #[test]
    fn schema_errors_name_the_field() {
        let err = load(br#"{"version":1,"seed":0,"algebras":[]}"#).unwrap_err();
        assert!(err.to_string().contains("bimodules"), "{err}");
        let err = load(br#"{"version":2,"seed":0,"algebras":[],"bimodules":[]}"#).unwrap_err();
        assert!(matches!(err, Error::Schema { ref path, .. } if path == "version"), "{err}");
        let err = load(br#"{"version":1,"seed":0,"algebras":[{"blocks":[0]}],"bimodules":[]}"#).unwrap_err();
        assert!(err.to_string().contains("algebras[0]"), "{err}");
    }

    #[test]
    fn zero_limit_rejected() {
        let limits = Limits { max_dim: 0, ..Limits::default() };
        assert!(generate_suite_instance(1, &limits).is_err());
    }
}
