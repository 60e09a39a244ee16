//! Deterministic synthetic benchmark families and dataset file I/O.
//!
//! Five families mirror the standard graph-generation benchmarks:
//! ego-small, community-small, planar (Delaunay triangulations), sbm, and
//! grid. Generation is reproducible per seed, with one derived RNG stream
//! per graph so parallel and serial generation agree.

mod families;

pub use families::{DatasetSpec, Family};

use crate::error::{Result, SfmgError};
use crate::graph::Graph;
use crate::numerics::RngState;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use std::path::Path;

/// Generate `spec.count` graphs of the requested family.
pub fn generate(spec: &DatasetSpec) -> Result<Vec<Graph>> {
    let root = RngState::new(spec.seed);
    let host = families::build_shared_host(spec, &root);
    (0..spec.count)
        .into_par_iter()
        .map(|i| {
            let mut rng = root.derive(i as u64);
            families::generate_one(spec, host.as_ref(), &mut rng)
        })
        .collect()
}

/// Deterministic shuffled split into train and test index sets; the test
/// side always keeps at least one graph.
pub fn split_indices(len: usize, train_fraction: f64, seed: u64) -> (Vec<usize>, Vec<usize>) {
    assert!(len > 0, "split of an empty dataset");
    assert!((0.0..1.0).contains(&train_fraction) || train_fraction == 0.0 || train_fraction < 1.0);
    let mut order: Vec<usize> = (0..len).collect();
    let mut rng = RngState::new(seed);
    rng.shuffle(&mut order);
    let mut n_train = (len as f64 * train_fraction).floor() as usize;
    if n_train >= len {
        n_train = len - 1;
    }
    let train = order[..n_train].to_vec();
    let test = order[n_train..].to_vec();
    (train, test)
}

/// 80/20-style split of the graphs themselves.
pub fn split(dataset: &[Graph], train_fraction: f64, seed: u64) -> (Vec<Graph>, Vec<Graph>) {
    let (ti, si) = split_indices(dataset.len(), train_fraction, seed);
    let train = ti.iter().map(|&i| dataset[i].clone()).collect();
    let test = si.iter().map(|&i| dataset[i].clone()).collect();
    (train, test)
}

pub fn save<P: AsRef<Path>>(path: P, dataset: &[Graph]) -> Result<()> {
    crate::graph::write_graphs(path, dataset)
}

pub fn load<P: AsRef<Path>>(path: P) -> Result<Vec<Graph>> {
    crate::graph::read_graphs(path)
}

/// Sidecar metadata written next to generated dataset files.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DatasetMetadata {
    pub family: String,
    pub count: usize,
    pub seed: u64,
    pub train_fraction: f64,
    pub train_indices: Vec<usize>,
    pub test_indices: Vec<usize>,
    /// Fixed generator parameters of the family, for the record.
    pub parameters: serde_json::Value,
}

impl DatasetMetadata {
    pub fn write<P: AsRef<Path>>(&self, path: P) -> Result<()> {
        let json = serde_json::to_vec_pretty(self)?;
        std::fs::write(path, json)?;
        Ok(())
    }

    pub fn read<P: AsRef<Path>>(path: P) -> Result<Self> {
        let bytes = std::fs::read(path.as_ref())?;
        serde_json::from_slice(&bytes).map_err(|e| SfmgError::Parse {
            path: path.as_ref().display().to_string(),
            line: 0,
            msg: e.to_string(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{graph_statistics, is_connected, is_planar};

    fn spec(family: Family, count: usize, seed: u64) -> DatasetSpec {
        DatasetSpec {
            family,
            count,
            seed,
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let s = spec(Family::CommunitySmall, 6, 42);
        let a = generate(&s).unwrap();
        let b = generate(&s).unwrap();
        assert_eq!(a, b);
        let c = generate(&spec(Family::CommunitySmall, 6, 43)).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn community_small_ranges() {
        let graphs = generate(&spec(Family::CommunitySmall, 10, 7)).unwrap();
        for g in &graphs {
            assert!(g.n() >= 12 && g.n() <= 20);
            assert_eq!(g.n() % 2, 0, "node count must be even");
            assert!(is_connected(g));
        }
    }

    #[test]
    fn ego_small_ranges() {
        let graphs = generate(&spec(Family::EgoSmall, 12, 3)).unwrap();
        for g in &graphs {
            assert!(g.n() >= 4 && g.n() <= 18, "n = {}", g.n());
            assert!(is_connected(g));
        }
    }

    #[test]
    fn planar_family_is_planar_and_connected() {
        let graphs = generate(&spec(Family::Planar, 5, 11)).unwrap();
        for g in &graphs {
            assert_eq!(g.n(), 64);
            assert!(is_connected(g));
            assert!(is_planar(g));
        }
    }

    #[test]
    fn sbm_ranges() {
        let graphs = generate(&spec(Family::Sbm, 4, 19)).unwrap();
        for g in &graphs {
            assert!(g.n() >= 44 && g.n() <= 192, "n = {}", g.n());
            assert!(is_connected(g));
        }
    }

    #[test]
    fn grid_family_shape() {
        let graphs = generate(&spec(Family::Grid, 4, 23)).unwrap();
        for g in &graphs {
            assert!(g.n() >= 100 && g.n() <= 400);
            assert!(is_connected(g));
            // lattices are triangle-free: all clustering coefficients zero
            let stats = graph_statistics(g).unwrap();
            assert_eq!(stats.clustering_hist[0], g.n() as f64);
            // degrees in {2, 3, 4}
            for (d, &c) in stats.degree_hist.iter().enumerate() {
                if c > 0.0 {
                    assert!((2..=4).contains(&d), "degree {d}");
                }
            }
        }
    }

    #[test]
    fn split_sizes_and_determinism() {
        let graphs = generate(&spec(Family::CommunitySmall, 10, 5)).unwrap();
        let (train, test) = split(&graphs, 0.8, 1);
        assert_eq!(train.len(), 8);
        assert_eq!(test.len(), 2);
        let (train2, test2) = split(&graphs, 0.8, 1);
        assert_eq!(train, train2);
        assert_eq!(test, test2);
        // tiny dataset keeps a test graph
        let (t5, s5) = split_indices(5, 0.8, 2);
        assert_eq!((t5.len(), s5.len()), (4, 1));
        let (t1, s1) = split_indices(1, 0.8, 2);
        assert_eq!((t1.len(), s1.len()), (0, 1));
    }

    #[test]
    fn save_load_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("ds.jsonl");
        let graphs = generate(&spec(Family::CommunitySmall, 5, 9)).unwrap();
        save(&path, &graphs).unwrap();
        let back = load(&path).unwrap();
        assert_eq!(graphs, back);
    }
}
