//! Graph representation, normalized Laplacian spectra, padding,
//! post-processing of generated matrices, and structural statistics.

mod io;
mod laplacian;
mod planarity;
mod stats;

pub use io::{read_graphs, write_graphs};
pub use laplacian::{
    normalized_laplacian, reconstruct_laplacian, truncated_spectrum, SpectralData,
};
pub use planarity::is_planar;
pub use stats::{graph_statistics, is_connected, GraphStatistics, ORBIT_COUNT};

use crate::error::{Result, SfmgError};
use crate::numerics::Matrix;

/// Undirected graph with a symmetric zero-diagonal adjacency matrix.
/// Entries are 0/1 for plain graphs or 0..=3 for bond-weighted graphs.
#[derive(Clone, Debug, PartialEq)]
pub struct Graph {
    n: usize,
    adjacency: Matrix,
    features: Option<Matrix>,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adjacency: Matrix::zeros(n, n),
            features: None,
        }
    }

    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let weighted: Vec<(usize, usize, u8)> = edges.iter().map(|&(i, j)| (i, j, 1)).collect();
        Graph::from_weighted_edges(n, &weighted)
    }

    pub fn from_weighted_edges(n: usize, edges: &[(usize, usize, u8)]) -> Result<Self> {
        let mut adjacency = Matrix::zeros(n, n);
        for &(i, j, w) in edges {
            if i >= n || j >= n {
                return Err(SfmgError::Invalid(format!(
                    "edge ({i},{j}) out of range for n={n}"
                )));
            }
            if i == j {
                return Err(SfmgError::Invalid(format!("self-loop at node {i}")));
            }
            if w == 0 || w > 3 {
                return Err(SfmgError::Invalid(format!(
                    "edge weight {w} outside the bond alphabet 1..=3"
                )));
            }
            adjacency[(i, j)] = w as f64;
            adjacency[(j, i)] = w as f64;
        }
        Ok(Graph {
            n,
            adjacency,
            features: None,
        })
    }

    /// Validate and wrap an adjacency matrix.
    pub fn from_adjacency(adjacency: Matrix) -> Result<Self> {
        if !adjacency.is_square() {
            return Err(SfmgError::Shape("adjacency must be square".into()));
        }
        let n = adjacency.rows();
        for i in 0..n {
            if adjacency[(i, i)] != 0.0 {
                return Err(SfmgError::Invalid(format!("nonzero diagonal at {i}")));
            }
            for j in 0..n {
                let w = adjacency[(i, j)];
                if w != adjacency[(j, i)] {
                    return Err(SfmgError::Invalid(format!("asymmetric entry ({i},{j})")));
                }
                if ![0.0, 1.0, 2.0, 3.0].contains(&w) {
                    return Err(SfmgError::Invalid(format!(
                        "entry {w} at ({i},{j}) outside the alphabet {{0,1,2,3}}"
                    )));
                }
            }
        }
        Ok(Graph {
            n,
            adjacency,
            features: None,
        })
    }

    pub fn with_features(mut self, features: Matrix) -> Result<Self> {
        if features.rows() != self.n {
            return Err(SfmgError::Shape(format!(
                "features have {} rows for a graph with {} nodes",
                features.rows(),
                self.n
            )));
        }
        self.features = Some(features);
        Ok(self)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn adjacency(&self) -> &Matrix {
        &self.adjacency
    }

    pub fn features(&self) -> Option<&Matrix> {
        self.features.as_ref()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[(i, j)] != 0.0
    }

    /// Weighted degree: sum of incident edge weights.
    pub fn degree(&self, i: usize) -> f64 {
        self.adjacency.row(i).iter().sum()
    }

    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n).filter(|&j| self.has_edge(i, j)).collect()
    }

    /// Edges with i < j, paired with their integer weight.
    pub fn edges(&self) -> Vec<(usize, usize, u8)> {
        let mut out = Vec::new();
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                let w = self.adjacency[(i, j)];
                if w != 0.0 {
                    out.push((i, j, w as u8));
                }
            }
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.edges().len()
    }

    pub fn is_binary(&self) -> bool {
        self.adjacency.data().iter().all(|&w| w == 0.0 || w == 1.0)
    }

    /// Remove all degree-0 nodes, relabeling the rest in order.
    pub fn strip_isolated(&self) -> Graph {
        let keep: Vec<usize> = (0..self.n).filter(|&i| self.degree(i) > 0.0).collect();
        let mut adjacency = Matrix::zeros(keep.len(), keep.len());
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                adjacency[(a, b)] = self.adjacency[(i, j)];
            }
        }
        let features = self.features.as_ref().map(|f| {
            let mut out = Matrix::zeros(keep.len(), f.cols());
            for (a, &i) in keep.iter().enumerate() {
                for c in 0..f.cols() {
                    out[(a, c)] = f[(i, c)];
                }
            }
            out
        });
        Graph {
            n: keep.len(),
            adjacency,
            features,
        }
    }
}

/// Zero-pad a graph to `n_max` nodes; the added nodes are isolated.
pub fn pad_graph(g: &Graph, n_max: usize) -> Result<Graph> {
    if g.n > n_max {
        return Err(SfmgError::Invalid(format!(
            "cannot pad a {}-node graph down to {n_max}",
            g.n
        )));
    }
    if g.n == n_max {
        return Ok(g.clone());
    }
    let mut adjacency = Matrix::zeros(n_max, n_max);
    adjacency.set_block(0, 0, &g.adjacency);
    let features = g.features.as_ref().map(|f| {
        let mut out = Matrix::zeros(n_max, f.cols());
        out.set_block(0, 0, f);
        out
    });
    Ok(Graph {
        n: n_max,
        adjacency,
        features,
    })
}

/// Symmetrize, threshold at 0.5, and zero the diagonal: the binary-graph
/// finalization rule for generated matrices.
pub fn finalize_binary(m: &Matrix) -> Graph {
    assert!(m.is_square(), "finalize_binary requires a square matrix");
    let n = m.rows();
    let mut adjacency = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mean = 0.5 * (m[(i, j)] + m[(j, i)]);
            if mean >= 0.5 {
                adjacency[(i, j)] = 1.0;
                adjacency[(j, i)] = 1.0;
            }
        }
    }
    Graph {
        n,
        adjacency,
        features: None,
    }
}

/// Symmetrize and quantize into bond types:
/// <0.5 -> 0, [0.5,1.5) -> 1, [1.5,2.5) -> 2, >=2.5 -> 3.
pub fn finalize_bonds(m: &Matrix) -> Graph {
    assert!(m.is_square(), "finalize_bonds requires a square matrix");
    let n = m.rows();
    let mut adjacency = Matrix::zeros(n, n);
    for i in 0..n {
        for j in (i + 1)..n {
            let mean = 0.5 * (m[(i, j)] + m[(j, i)]);
            let bond = if mean < 0.5 {
                0.0
            } else if mean < 1.5 {
                1.0
            } else if mean < 2.5 {
                2.0
            } else {
                3.0
            };
            adjacency[(i, j)] = bond;
            adjacency[(j, i)] = bond;
        }
    }
    Graph {
        n,
        adjacency,
        features: None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pad_preserves_edges_and_isolates_new_nodes() {
        let k2 = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let padded = pad_graph(&k2, 4).unwrap();
        assert_eq!(padded.n(), 4);
        assert_eq!(padded.edges(), vec![(0, 1, 1)]);
        assert_eq!(padded.degree(2), 0.0);
        assert_eq!(padded.degree(3), 0.0);
        // same size is a no-op
        let same = pad_graph(&k2, 2).unwrap();
        assert_eq!(same, k2);
        assert!(pad_graph(&padded, 2).is_err());
    }

    #[test]
    fn finalize_binary_rules() {
        let mut m = Matrix::zeros(3, 3);
        m[(0, 1)] = 0.6;
        m[(1, 0)] = 0.7; // mean 0.65 -> edge
        m[(0, 2)] = 0.49;
        m[(2, 0)] = 0.49; // below threshold
        m[(1, 1)] = 5.0; // diagonal forced to zero
        let g = finalize_binary(&m);
        assert!(g.has_edge(0, 1));
        assert!(!g.has_edge(0, 2));
        assert_eq!(g.adjacency()[(1, 1)], 0.0);
        // symmetry of the rule
        let gt = finalize_binary(&m.transpose());
        assert_eq!(g, gt);
    }

    #[test]
    fn finalize_binary_idempotent_on_binary_input() {
        let g = Graph::from_edges(4, &[(0, 1), (2, 3), (1, 2)]).unwrap();
        let again = finalize_binary(g.adjacency());
        assert_eq!(again, g);
    }

    #[test]
    fn finalize_bonds_bin_boundaries() {
        let vals = [(1.4, 1.0), (1.5, 2.0), (2.5, 3.0), (0.0, 0.0), (0.75, 1.0)];
        for &(x, want) in &vals {
            let mut m = Matrix::zeros(2, 2);
            m[(0, 1)] = x;
            m[(1, 0)] = x;
            let g = finalize_bonds(&m);
            assert_eq!(g.adjacency()[(0, 1)], want, "value {x}");
        }
    }

    #[test]
    fn strip_isolated_relabels() {
        let g = Graph::from_edges(5, &[(1, 3)]).unwrap();
        let s = g.strip_isolated();
        assert_eq!(s.n(), 2);
        assert!(s.has_edge(0, 1));
    }

    #[test]
    fn from_adjacency_validates() {
        let mut bad = Matrix::zeros(2, 2);
        bad[(0, 1)] = 1.0;
        assert!(Graph::from_adjacency(bad).is_err()); // asymmetric
        let mut loops = Matrix::zeros(2, 2);
        loops[(0, 0)] = 1.0;
        assert!(Graph::from_adjacency(loops).is_err());
    }
}
