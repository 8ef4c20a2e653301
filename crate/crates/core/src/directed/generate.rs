use std::collections::BTreeMap;

use rand::Rng;

use super::{DirectedSystem, Embedding, IndexId, IndexPoset};
use crate::error::{Error, Result};
use crate::numerics::{self, ComplexMatrix};
use crate::sampling::{random_contraction, random_unitary, seeded};

/// Index labels with dimensions plus covering relations `(lower, upper)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemShape {
    pub indices: Vec<(String, usize)>,
    pub order: Vec<(String, String)>,
}

impl SystemShape {
    pub fn new<S: Into<String>>(indices: Vec<(S, usize)>, order: Vec<(S, S)>) -> Self {
        Self {
            indices: indices.into_iter().map(|(l, d)| (l.into(), d)).collect(),
            order: order.into_iter().map(|(a, b)| (a.into(), b.into())).collect(),
        }
    }

    /// `i0 ≤ i1 ≤ …` with the given dimensions.
    pub fn chain(dims: &[usize]) -> Self {
        let indices = dims.iter().enumerate().map(|(i, &d)| (format!("i{i}"), d)).collect();
        let order = (1..dims.len())
            .map(|i| (format!("i{}", i - 1), format!("i{i}")))
            .collect();
        Self { indices, order }
    }

    /// Two minimal indices `l`, `r` below a top `t`.
    pub fn vee(left: usize, right: usize, top: usize) -> Self {
        Self::new(
            vec![("l", left), ("r", right), ("t", top)],
            vec![("l", "t"), ("r", "t")],
        )
    }

    /// `b ≤ l, r ≤ t`.
    pub fn diamond(bottom: usize, left: usize, right: usize, top: usize) -> Self {
        Self::new(
            vec![("b", bottom), ("l", left), ("r", right), ("t", top)],
            vec![("b", "l"), ("b", "r"), ("l", "t"), ("r", "t")],
        )
    }

    pub fn poset(&self) -> Result<IndexPoset> {
        let labels: Vec<&str> = self.indices.iter().map(|(l, _)| l.as_str()).collect();
        let pairs: Vec<(&str, &str)> = self.order.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect();
        IndexPoset::new(&labels, &pairs)
    }

    fn dims_for(&self, poset: &IndexPoset) -> Vec<usize> {
        let by_label: BTreeMap<&str, usize> = self.indices.iter().map(|(l, d)| (l.as_str(), *d)).collect();
        poset.labels().iter().map(|l| by_label[l.as_str()]).collect()
    }
}

fn checked_poset(shape: &SystemShape) -> Result<(IndexPoset, Vec<usize>)> {
    let poset = shape.poset()?;
    let dims = shape.dims_for(&poset);
    for &(a, b) in poset.covers() {
        if dims[a.0] > dims[b.0] {
            return Err(Error::BadShape(format!(
                "dims not monotone along {} -> {}",
                poset.label(a),
                poset.label(b)
            )));
        }
    }
    Ok((poset, dims))
}

/// Random compression system `j_{βα}(x) = W* x W`.
///
/// When every non-top index has a single covering successor each edge gets
/// an independent random contraction. Otherwise distinct paths must compose
/// to the same map, and the witnesses are built as
/// `W_{αβ} = U_α* C_α E_{αβ} C_β⁻¹ U_β` from per-index unitaries `U`,
/// coordinate inclusions `E` and diagonal scales `C` that shrink with depth.
pub fn generate_compression_system(shape: &SystemShape, seed: u64) -> Result<DirectedSystem> {
    let (poset, dims) = checked_poset(shape)?;
    let mut rng = seeded(seed);
    let tree_like = poset.ids().all(|a| poset.covering_successors(a).count() <= 1);
    let edges = if tree_like {
        poset
            .covers()
            .iter()
            .map(|&(a, b)| {
                (
                    (a, b),
                    Embedding::compression(random_contraction(dims[a.0], dims[b.0], &mut rng)),
                )
            })
            .collect()
    } else {
        layered_witnesses(&poset, &dims, &mut rng)
    };
    DirectedSystem::new(poset, dims, edges)
}

fn layered_witnesses<R: Rng + ?Sized>(
    poset: &IndexPoset,
    dims: &[usize],
    rng: &mut R,
) -> BTreeMap<(IndexId, IndexId), Embedding> {
    let top = poset.top();
    let n = dims[top.0];
    let depth_of = |a: IndexId| (poset.rank(top) - poset.rank(a)) as i32;
    let rates: Vec<f64> = (0..n).map(|_| rng.random_range(0.5..1.0)).collect();
    let unitaries: Vec<ComplexMatrix> = poset.ids().map(|a| random_unitary(dims[a.0], rng)).collect();
    let scales: Vec<Vec<f64>> = poset
        .ids()
        .map(|a| (0..dims[a.0]).map(|i| rates[i].powi(depth_of(a))).collect())
        .collect();
    poset
        .covers()
        .iter()
        .map(|&(a, b)| {
            let mut core = ComplexMatrix::zeros(dims[a.0], dims[b.0]);
            for i in 0..dims[a.0] {
                core[(i, i)] = numerics::ONE * (scales[a.0][i] / scales[b.0][i]);
            }
            let w = unitaries[a.0].adjoint() * core * &unitaries[b.0];
            ((a, b), Embedding::compression(w))
        })
        .collect()
}

/// System of equal dimensions whose edges are unitary conjugations
/// `W_{αβ} = U_α* U_β`, so every map is a *-automorphism.
pub fn generate_unitary_system(shape: &SystemShape, seed: u64) -> Result<DirectedSystem> {
    let (poset, dims) = checked_poset(shape)?;
    if dims.iter().any(|&d| d != dims[0]) {
        return Err(Error::BadShape("unitary systems need equal dimensions".into()));
    }
    let mut rng = seeded(seed);
    let unitaries: Vec<ComplexMatrix> = poset.ids().map(|_| random_unitary(dims[0], &mut rng)).collect();
    let edges = poset
        .covers()
        .iter()
        .map(|&(a, b)| {
            (
                (a, b),
                Embedding::compression(unitaries[a.0].adjoint() * &unitaries[b.0]),
            )
        })
        .collect();
    DirectedSystem::new(poset, dims, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::{max_abs_diff, operator_norm};
    use crate::sampling::gaussian_matrix;

    #[test]
    fn same_seed_same_system() {
        let shape = SystemShape::chain(&[1, 2, 4]);
        let a = generate_compression_system(&shape, 7).unwrap();
        let b = generate_compression_system(&shape, 7).unwrap();
        assert_eq!(a.to_canonical_json(), b.to_canonical_json());
        let c = generate_compression_system(&shape, 8).unwrap();
        assert_ne!(a.id(), c.id());
    }

    #[test]
    fn diamond_paths_agree() {
        let sys = generate_compression_system(&SystemShape::diamond(2, 3, 3, 4), 11).unwrap();
        let p = sys.poset();
        let (b, l, r, t) = (
            sys.index("b").unwrap(),
            sys.index("l").unwrap(),
            sys.index("r").unwrap(),
            sys.index("t").unwrap(),
        );
        let x = gaussian_matrix(2, 2, &mut seeded(1));
        let via_l = sys.push(l, t, &sys.push(b, l, &x));
        let via_r = sys.push(r, t, &sys.push(b, r, &x));
        assert!(max_abs_diff(&via_l, &via_r) < 1e-12);
        for &(a, c) in p.covers() {
            assert!(operator_norm(sys.edge(a, c).unwrap().witness().unwrap()) <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn rejects_decreasing_dims() {
        assert!(matches!(
            generate_compression_system(&SystemShape::chain(&[3, 2]), 1),
            Err(Error::BadShape(_))
        ));
        assert!(generate_unitary_system(&SystemShape::chain(&[2, 3]), 1).is_err());
    }

    #[test]
    fn unitary_system_maps_identity_to_identity() {
        let sys = generate_unitary_system(&SystemShape::vee(3, 3, 3), 2).unwrap();
        for ((a, b), _) in sys.edges() {
            let img = sys.push(a, b, &numerics::identity(3));
            assert!(max_abs_diff(&img, &numerics::identity(3)) < 1e-12);
        }
    }
}
