//! Cartesian products of paths ("grids") and the canonical vertex indexing
//! used throughout: coordinates are 1-based tuples, vertex ids enumerate the
//! tuples lexicographically with the last coordinate varying fastest.

use crate::error::{Error, Result};
use crate::graph::Graph;
use serde::{Deserialize, Serialize};

/// Dimensions of a grid graph. `dims = [n1, .., nd]` describes the product
/// of paths with those lengths; an empty list is the single vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "GridSpecData", into = "GridSpecData")]
pub struct GridSpec {
    dims: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct GridSpecData {
    dims: Vec<usize>,
}

impl TryFrom<GridSpecData> for GridSpec {
    type Error = Error;
    fn try_from(d: GridSpecData) -> Result<GridSpec> {
        GridSpec::new(d.dims)
    }
}

impl From<GridSpec> for GridSpecData {
    fn from(s: GridSpec) -> GridSpecData {
        GridSpecData { dims: s.dims }
    }
}

impl GridSpec {
    /// Accepts any list of factors `>= 1`. Factors are kept in the order
    /// given; algorithms that need a particular factor first permute the
    /// axes themselves and record the permutation.
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.iter().any(|&n| n == 0) {
            return Err(Error::BadDims(format!("zero factor in {dims:?}")));
        }
        if dims.len() > 16 {
            return Err(Error::BadDims(format!("{} factors is past desk scale", dims.len())));
        }
        let spec = GridSpec { dims };
        if spec.vertex_count() > 5_000_000 {
            return Err(Error::BadDims(format!(
                "{:?} has {} vertices, past desk scale",
                spec.dims,
                spec.vertex_count()
            )));
        }
        Ok(spec)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.dims.len()
    }

    pub fn vertex_count(&self) -> usize {
        self.dims.iter().product()
    }

    /// Drops factors equal to one. The result can have zero factors (a
    /// single vertex); its dimension is the "true" dimension of the graph.
    pub fn normalized(&self) -> GridSpec {
        GridSpec { dims: self.dims.iter().copied().filter(|&n| n > 1).collect() }
    }

    /// Vertex id of a 1-based coordinate tuple.
    pub fn index_of(&self, coord: &[usize]) -> usize {
        debug_assert_eq!(coord.len(), self.dims.len());
        let mut id = 0;
        for (i, &c) in coord.iter().enumerate() {
            debug_assert!(c >= 1 && c <= self.dims[i]);
            id = id * self.dims[i] + (c - 1);
        }
        id
    }

    /// 1-based coordinate tuple of a vertex id.
    pub fn coord_of(&self, mut id: usize) -> Vec<usize> {
        let mut coord = vec![0; self.dims.len()];
        for i in (0..self.dims.len()).rev() {
            coord[i] = id % self.dims[i] + 1;
            id /= self.dims[i];
        }
        debug_assert_eq!(id, 0);
        coord
    }

    /// The grid graph itself: vertices are all coordinate tuples, edges join
    /// tuples differing by exactly one in exactly one coordinate.
    pub fn build(&self) -> Graph {
        let n = self.vertex_count();
        let mut edges = Vec::new();
        let mut stride = vec![1usize; self.dims.len()];
        for i in (0..self.dims.len().saturating_sub(1)).rev() {
            stride[i] = stride[i + 1] * self.dims[i + 1];
        }
        for id in 0..n {
            let coord = self.coord_of(id);
            for (i, &c) in coord.iter().enumerate() {
                if c < self.dims[i] {
                    edges.push((id, id + stride[i]));
                }
            }
        }
        Graph::from_edges(n, &edges).expect("grid edges are simple by construction")
    }

    /// Expected edge count: sum over axes of (n_i - 1) * prod_{j != i} n_j.
    pub fn edge_count(&self) -> usize {
        let total: usize = self.vertex_count();
        self.dims
            .iter()
            .map(|&ni| if ni > 0 { (ni - 1) * (total / ni) } else { 0 })
            .sum()
    }

    /// Maximum degree of the grid: interior coordinates contribute two,
    /// length-two factors one.
    pub fn max_degree(&self) -> usize {
        self.dims.iter().map(|&n| if n >= 3 { 2 } else if n == 2 { 1 } else { 0 }).sum()
    }

    /// Applies an axis permutation: factor `i` of the result is factor
    /// `perm[i]` of `self`. Returns the permuted spec plus a map from the
    /// permuted vertex ids back to ids of `self`.
    pub fn permute_axes(&self, perm: &[usize]) -> (GridSpec, Vec<usize>) {
        debug_assert_eq!(perm.len(), self.dims.len());
        let dims: Vec<usize> = perm.iter().map(|&i| self.dims[i]).collect();
        let permuted = GridSpec { dims };
        let mut back = vec![0usize; self.vertex_count()];
        let mut coord = vec![0usize; self.dims.len()];
        for (id, slot) in back.iter_mut().enumerate() {
            let pc = permuted.coord_of(id);
            for (j, &axis) in perm.iter().enumerate() {
                coord[axis] = pc[j];
            }
            *slot = self.index_of(&coord);
        }
        (permuted, back)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_ids_enumerate_last_coordinate_fastest() {
        let spec = GridSpec::new(vec![2, 3]).unwrap();
        let coords: Vec<Vec<usize>> = (0..6).map(|id| spec.coord_of(id)).collect();
        assert_eq!(
            coords,
            vec![
                vec![1, 1],
                vec![1, 2],
                vec![1, 3],
                vec![2, 1],
                vec![2, 2],
                vec![2, 3]
            ]
        );
        for id in 0..6 {
            assert_eq!(spec.index_of(&spec.coord_of(id)), id);
        }
    }

    #[test]
    fn edge_counts_match_independent_enumeration() {
        // Oracle: count coordinate pairs at Hamming-style distance one
        // directly, without the stride bookkeeping used by build().
        for dims in [vec![2, 2], vec![5, 3, 2], vec![2, 2, 2, 2], vec![4, 1, 3], vec![7]] {
            let spec = GridSpec::new(dims).unwrap();
            let g = spec.build();
            let n = spec.vertex_count();
            let mut expected = 0;
            for a in 0..n {
                for b in (a + 1)..n {
                    let (ca, cb) = (spec.coord_of(a), spec.coord_of(b));
                    let diffs: Vec<usize> =
                        (0..ca.len()).filter(|&i| ca[i] != cb[i]).collect();
                    if diffs.len() == 1 {
                        let i = diffs[0];
                        if ca[i].abs_diff(cb[i]) == 1 {
                            expected += 1;
                            assert!(g.has_edge(a, b));
                        }
                    }
                }
            }
            assert_eq!(g.m(), expected);
            assert_eq!(spec.edge_count(), expected);
        }
    }

    #[test]
    fn five_three_two_grid_sizes() {
        let spec = GridSpec::new(vec![5, 3, 2]).unwrap();
        let g = spec.build();
        assert_eq!(g.n(), 30);
        assert_eq!(g.m(), 59);
    }

    #[test]
    fn normalization_drops_unit_factors() {
        let spec = GridSpec::new(vec![1, 4, 1, 2]).unwrap();
        assert_eq!(spec.normalized().dims(), &[4, 2]);
        let k1 = GridSpec::new(vec![1, 1]).unwrap();
        assert_eq!(k1.normalized().dim(), 0);
        assert_eq!(k1.normalized().vertex_count(), 1);
        assert_eq!(k1.build().n(), 1);
    }

    #[test]
    fn empty_dims_is_a_single_vertex() {
        let spec = GridSpec::new(vec![]).unwrap();
        assert_eq!(spec.vertex_count(), 1);
        let g = spec.build();
        assert_eq!((g.n(), g.m()), (1, 0));
    }

    #[test]
    fn hypercube_degeneracy() {
        let spec = GridSpec::new(vec![2, 2, 2, 2]).unwrap();
        let (d, _) = spec.build().degeneracy_order();
        assert_eq!(d, 4);
    }

    #[test]
    fn grid_max_degree() {
        assert_eq!(GridSpec::new(vec![5, 3, 2]).unwrap().max_degree(), 5);
        assert_eq!(GridSpec::new(vec![2, 2]).unwrap().max_degree(), 2);
        assert_eq!(GridSpec::new(vec![3, 3]).unwrap().max_degree(), 4);
    }

    #[test]
    fn axis_permutation_round_trip() {
        let spec = GridSpec::new(vec![4, 2, 3]).unwrap();
        let (p, back) = spec.permute_axes(&[1, 2, 0]);
        assert_eq!(p.dims(), &[2, 3, 4]);
        let g = spec.build();
        let pg = p.build();
        assert_eq!(g.m(), pg.m());
        // Every permuted edge maps to an edge of the original graph.
        for (u, v) in pg.edges() {
            assert!(g.has_edge(back[u], back[v]));
        }
    }

    #[test]
    fn grid_cycles_small_cases() {
        let c4 = GridSpec::new(vec![2, 2]).unwrap().build();
        assert_eq!(c4.enumerate_cycles(40).unwrap().len(), 1);
        let p23 = GridSpec::new(vec![2, 3]).unwrap().build();
        assert_eq!(p23.enumerate_cycles(40).unwrap().len(), 3);
    }
}
