//! Directed systems of full matrix algebras.
//!
//! A [`DirectedSystem`] attaches a matrix algebra `M_{n_α}` to every index of
//! a finite directed poset and an injective Schwarz map `j_{βα}` to every
//! covering pair `α ⋖ β`. Maps between non-adjacent indices are composed
//! eagerly along a canonical path when the system is built, so the
//! composition law holds by construction for systems given by their
//! covering edges. Adversarial systems can still violate the other axioms
//! (contractivity, positivity, injectivity) and [`verify_axioms`] reports it.

mod generate;
mod poset;
mod verify;

use std::collections::BTreeMap;

use nalgebra::DVector;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use generate::{generate_compression_system, generate_unitary_system, SystemShape};
pub use poset::{IndexId, IndexPoset};
pub use verify::{check_r1, check_r2, verify_axioms, R1Verdict, R2Edge};

use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix, MatrixJson};
use crate::report;

/// Singular values below this count as zero when deciding injectivity.
pub const RANK_THRESHOLD: f64 = 1e-10;

/// A linear map `M_{source} → M_{target}`.
#[derive(Debug, Clone, PartialEq)]
pub enum Embedding {
    /// `x ↦ W* x W` with `W` of shape `source × target`.
    Compression { witness: ComplexMatrix },
    /// Arbitrary linear map acting on column-major `vec(x)`.
    Superoperator {
        source_dim: usize,
        target_dim: usize,
        matrix: ComplexMatrix,
    },
}

impl Embedding {
    pub fn compression(witness: ComplexMatrix) -> Self {
        Embedding::Compression { witness }
    }

    pub fn identity(n: usize) -> Self {
        Embedding::Compression {
            witness: numerics::identity(n),
        }
    }

    pub fn superoperator(source_dim: usize, target_dim: usize, matrix: ComplexMatrix) -> Result<Self> {
        if matrix.shape() != (target_dim * target_dim, source_dim * source_dim) {
            return Err(Error::BadShape(format!(
                "superoperator must be {}x{}, got {:?}",
                target_dim * target_dim,
                source_dim * source_dim,
                matrix.shape()
            )));
        }
        Ok(Embedding::Superoperator {
            source_dim,
            target_dim,
            matrix,
        })
    }

    /// Superoperator of `x ↦ f(x)` for an arbitrary linear `f`, built from
    /// its action on matrix units.
    pub fn from_linear_map(source_dim: usize, target_dim: usize, f: impl Fn(&ComplexMatrix) -> ComplexMatrix) -> Self {
        let mut matrix = ComplexMatrix::zeros(target_dim * target_dim, source_dim * source_dim);
        for col in 0..source_dim * source_dim {
            let mut e = numerics::zeros(source_dim);
            e[(col % source_dim, col / source_dim)] = numerics::ONE;
            let image = f(&e);
            matrix.set_column(col, &numerics::vectorize(&image));
        }
        Embedding::Superoperator {
            source_dim,
            target_dim,
            matrix,
        }
    }

    pub fn source_dim(&self) -> usize {
        match self {
            Embedding::Compression { witness } => witness.nrows(),
            Embedding::Superoperator { source_dim, .. } => *source_dim,
        }
    }

    pub fn target_dim(&self) -> usize {
        match self {
            Embedding::Compression { witness } => witness.ncols(),
            Embedding::Superoperator { target_dim, .. } => *target_dim,
        }
    }

    pub fn witness(&self) -> Option<&ComplexMatrix> {
        match self {
            Embedding::Compression { witness } => Some(witness),
            Embedding::Superoperator { .. } => None,
        }
    }

    pub fn apply(&self, x: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Embedding::Compression { witness } => witness.adjoint() * x * witness,
            Embedding::Superoperator { target_dim, matrix, .. } => {
                numerics::unvectorize(&(matrix * numerics::vectorize(x)), *target_dim)
            }
        }
    }

    /// Action on `vec(x)`; for a compression `W^T ⊗ W*`.
    pub fn superoperator_matrix(&self) -> ComplexMatrix {
        match self {
            Embedding::Compression { witness } => witness.transpose().kronecker(&witness.adjoint()),
            Embedding::Superoperator { matrix, .. } => matrix.clone(),
        }
    }

    /// `next ∘ self`.
    pub fn then(&self, next: &Embedding) -> Embedding {
        match (self, next) {
            (Embedding::Compression { witness: a }, Embedding::Compression { witness: b }) => {
                Embedding::Compression { witness: a * b }
            }
            _ => Embedding::Superoperator {
                source_dim: self.source_dim(),
                target_dim: next.target_dim(),
                matrix: next.superoperator_matrix() * self.superoperator_matrix(),
            },
        }
    }

    /// Density of `x ↦ tr(ρ j(x))` on the source algebra.
    pub fn dual(&self, rho: &ComplexMatrix) -> ComplexMatrix {
        match self {
            Embedding::Compression { witness } => witness * rho * witness.adjoint(),
            Embedding::Superoperator { source_dim, matrix, .. } => {
                let v = matrix.transpose() * numerics::vectorize(&rho.transpose());
                numerics::unvectorize(&v, *source_dim).transpose()
            }
        }
    }

    /// Smallest singular value of the superoperator; zero iff not injective.
    pub fn injectivity_margin(&self) -> f64 {
        match self {
            // singular values of W^T ⊗ W* are the products σ_i σ_j
            Embedding::Compression { witness } => {
                if witness.nrows() == 0 {
                    return f64::INFINITY;
                }
                let sv = numerics::singular_values(witness);
                let min = if witness.nrows() <= witness.ncols() {
                    sv.iter().copied().fold(f64::INFINITY, f64::min)
                } else {
                    0.0
                };
                min * min
            }
            Embedding::Superoperator { matrix, .. } => {
                if matrix.nrows() < matrix.ncols() {
                    0.0
                } else {
                    numerics::min_singular_value(matrix)
                }
            }
        }
    }

    /// Least-squares preimage `y` of `b` and the residual `‖j(y) − b‖_max`.
    pub fn preimage(&self, b: &ComplexMatrix) -> (ComplexMatrix, f64) {
        let y = match self {
            Embedding::Compression { witness } => {
                let gram = witness * witness.adjoint();
                match gram.clone().cholesky() {
                    Some(ch) if numerics::min_singular_value(&gram) > RANK_THRESHOLD => {
                        let inv = ch.inverse();
                        &inv * witness * b * witness.adjoint() * &inv
                    }
                    _ => self.generic_preimage(b),
                }
            }
            Embedding::Superoperator { .. } => self.generic_preimage(b),
        };
        let residual = numerics::max_abs_diff(&self.apply(&y), b);
        (y, residual)
    }

    fn generic_preimage(&self, b: &ComplexMatrix) -> ComplexMatrix {
        let s = self.superoperator_matrix();
        let n = self.source_dim();
        let svd = s.svd(true, true);
        let cutoff = svd.singular_values.iter().copied().fold(0.0, f64::max) * 1e-12;
        let rhs = numerics::vectorize(b);
        let y: DVector<Complex64> = svd
            .solve(&rhs, cutoff.max(f64::MIN_POSITIVE))
            .expect("SVD computed with both factors");
        numerics::unvectorize(&y, n)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct EdgeJson {
    src: String,
    dst: String,
    #[serde(rename = "W", skip_serializing_if = "Option::is_none", default)]
    w: Option<MatrixJson>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    superop: Option<MatrixJson>,
}

/// File form: `{indices, leq_pairs, dims, edges: [{src, dst, W | superop}]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
struct SystemJson {
    indices: Vec<String>,
    leq_pairs: Vec<(String, String)>,
    dims: BTreeMap<String, usize>,
    edges: Vec<EdgeJson>,
}

#[derive(Debug, Clone)]
pub struct DirectedSystem {
    id: String,
    poset: IndexPoset,
    dims: Vec<usize>,
    edges: BTreeMap<(IndexId, IndexId), Embedding>,
    maps: Vec<Vec<Option<Embedding>>>,
}

impl DirectedSystem {
    /// `edges` must hold exactly one embedding per covering pair.
    pub fn new(poset: IndexPoset, dims: Vec<usize>, edges: BTreeMap<(IndexId, IndexId), Embedding>) -> Result<Self> {
        if dims.len() != poset.len() {
            return Err(Error::BadShape("one dimension per index required".into()));
        }
        if dims.contains(&0) {
            return Err(Error::BadShape("dimensions must be positive".into()));
        }
        for &(a, b) in poset.covers() {
            if dims[a.0] > dims[b.0] {
                return Err(Error::BadShape(format!(
                    "dims not monotone: dim({}) = {} > dim({}) = {}",
                    poset.label(a),
                    dims[a.0],
                    poset.label(b),
                    dims[b.0]
                )));
            }
            let e = edges
                .get(&(a, b))
                .ok_or_else(|| Error::BadShape(format!("missing edge {} -> {}", poset.label(a), poset.label(b))))?;
            if e.source_dim() != dims[a.0] || e.target_dim() != dims[b.0] {
                return Err(Error::BadShape(format!(
                    "edge {} -> {} maps M_{} to M_{}, expected M_{} to M_{}",
                    poset.label(a),
                    poset.label(b),
                    e.source_dim(),
                    e.target_dim(),
                    dims[a.0],
                    dims[b.0]
                )));
            }
        }
        if edges.len() != poset.covers().len() {
            return Err(Error::BadShape("edges given for non-covering pairs".into()));
        }
        let n = poset.len();
        let mut maps: Vec<Vec<Option<Embedding>>> = vec![vec![None; n]; n];
        let mut order = poset.bottom_up();
        order.reverse();
        for &a in &order {
            maps[a.0][a.0] = Some(Embedding::identity(dims[a.0]));
            for b in poset.ids().filter(|&b| poset.lt(a, b)) {
                let s = poset
                    .covering_successors(a)
                    .find(|&s| poset.leq(s, b))
                    .expect("a < b implies a covering successor below b");
                let rest = maps[s.0][b.0].clone().expect("computed for higher rank first");
                maps[a.0][b.0] = Some(edges[&(a, s)].then(&rest));
            }
        }
        let mut sys = Self {
            id: String::new(),
            poset,
            dims,
            edges,
            maps,
        };
        sys.id = report::fingerprint(&sys.to_value())[..16].to_string();
        Ok(sys)
    }

    /// Compression system from label-keyed witnesses.
    pub fn from_compressions(
        poset: IndexPoset,
        dims: Vec<usize>,
        witnesses: Vec<((&str, &str), ComplexMatrix)>,
    ) -> Result<Self> {
        let mut edges = BTreeMap::new();
        for ((a, b), w) in witnesses {
            edges.insert((poset.id(a)?, poset.id(b)?), Embedding::compression(w));
        }
        Self::new(poset, dims, edges)
    }

    /// Chain `i0 ≤ … ≤ i{len-1}` of `M_dim` with identity embeddings.
    pub fn identity_chain(len: usize, dim: usize) -> Self {
        let labels: Vec<String> = (0..len).map(|i| format!("i{i}")).collect();
        let poset = IndexPoset::chain(&labels).expect("chain is a directed poset");
        let edges = poset.covers().iter().map(|&c| (c, Embedding::identity(dim))).collect();
        Self::new(poset, vec![dim; len], edges).expect("identity chain is well formed")
    }

    /// Fingerprint of the canonical file form.
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn poset(&self) -> &IndexPoset {
        &self.poset
    }

    pub fn dim(&self, a: IndexId) -> usize {
        self.dims[a.0]
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn top(&self) -> IndexId {
        self.poset.top()
    }

    pub fn index(&self, label: &str) -> Result<IndexId> {
        self.poset.id(label)
    }

    pub fn label(&self, a: IndexId) -> &str {
        self.poset.label(a)
    }

    pub fn edges(&self) -> impl Iterator<Item = ((IndexId, IndexId), &Embedding)> {
        self.edges.iter().map(|(&k, v)| (k, v))
    }

    pub fn edge(&self, a: IndexId, b: IndexId) -> Option<&Embedding> {
        self.edges.get(&(a, b))
    }

    /// `j_{ba}` for `a ≤ b`.
    pub fn map(&self, a: IndexId, b: IndexId) -> Option<&Embedding> {
        self.maps[a.0][b.0].as_ref()
    }

    /// `j_{ba}(x)`; panics unless `a ≤ b`.
    pub fn push(&self, a: IndexId, b: IndexId, x: &ComplexMatrix) -> ComplexMatrix {
        self.map(a, b)
            .unwrap_or_else(|| panic!("{} is not below {}", self.label(a), self.label(b)))
            .apply(x)
    }

    pub fn has_compression_witnesses(&self) -> bool {
        self.edges.values().all(|e| e.witness().is_some())
    }

    /// Copy of the system with one covering edge replaced.
    pub fn with_edge(&self, a: IndexId, b: IndexId, e: Embedding) -> Result<Self> {
        let mut edges = self.edges.clone();
        if !edges.contains_key(&(a, b)) {
            return Err(Error::BadShape("not a covering edge".into()));
        }
        edges.insert((a, b), e);
        Self::new(self.poset.clone(), self.dims.clone(), edges)
    }

    pub fn to_value(&self) -> Value {
        let j = SystemJson {
            indices: self.poset.labels().to_vec(),
            leq_pairs: self.poset.cover_labels(),
            dims: self
                .poset
                .ids()
                .map(|a| (self.label(a).to_string(), self.dim(a)))
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|(&(a, b), e)| {
                    let (w, superop) = match e {
                        Embedding::Compression { witness } => (Some(MatrixJson::from(witness)), None),
                        Embedding::Superoperator { matrix, .. } => (None, Some(MatrixJson::from(matrix))),
                    };
                    EdgeJson {
                        src: self.label(a).to_string(),
                        dst: self.label(b).to_string(),
                        w,
                        superop,
                    }
                })
                .collect(),
        };
        serde_json::to_value(j).expect("system serializes")
    }

    pub fn to_canonical_json(&self) -> String {
        report::canonical_json(&self.to_value())
    }

    pub fn from_value(v: Value) -> Result<Self> {
        let j: SystemJson = serde_json::from_value(v)?;
        let poset = IndexPoset::new(&j.indices, &j.leq_pairs)?;
        let dims = poset
            .labels()
            .iter()
            .map(|l| j.dims.get(l).copied().ok_or_else(|| Error::UnknownIndex(l.clone())))
            .collect::<Result<Vec<_>>>()?;
        let mut edges = BTreeMap::new();
        for e in j.edges {
            let (a, b) = (poset.id(&e.src)?, poset.id(&e.dst)?);
            let emb = match (e.w, e.superop) {
                (Some(w), None) => Embedding::compression(ComplexMatrix::try_from(w)?),
                (None, Some(s)) => Embedding::superoperator(dims[a.0], dims[b.0], ComplexMatrix::try_from(s)?)?,
                _ => {
                    return Err(Error::BadShape(format!(
                        "edge {} -> {} needs exactly one of W, superop",
                        e.src, e.dst
                    )))
                }
            };
            edges.insert((a, b), emb);
        }
        Self::new(poset, dims, edges)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_value(serde_json::from_str(s)?)
    }
}
