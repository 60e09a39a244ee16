//! The five synthetic family generators.
//!
//! Conventions fixed here (the benchmark lineage leaves them implicit):
//! - community-small: n uniform even in [12,20], two communities of n/2,
//!   intra-community edge probability 0.7, ceil(0.05 n) inter edges,
//!   connected samples only.
//! - ego-small: radius-1 ego networks of a 400-node preferential-attachment
//!   host (attachment degree 2), sizes in [4,18].
//! - planar: Delaunay triangulation of 64 uniform points in the unit square.
//! - sbm: 2-5 communities of 20-40 nodes, p_intra 0.3, p_inter 0.005,
//!   total size clipped to [44,192], connected samples only.
//! - grid: w x h lattices with w, h uniform in [10,20].
//!
//! Rejection sampling is capped at 1000 attempts per graph.

use crate::error::{Result, SfmgError};
use crate::graph::{is_connected, Graph};
use crate::numerics::RngState;

const MAX_ATTEMPTS: usize = 1000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    EgoSmall,
    CommunitySmall,
    Planar,
    Sbm,
    Grid,
}

impl Family {
    pub fn name(&self) -> &'static str {
        match self {
            Family::EgoSmall => "ego-small",
            Family::CommunitySmall => "community-small",
            Family::Planar => "planar",
            Family::Sbm => "sbm",
            Family::Grid => "grid",
        }
    }

    /// Inclusive node-count range of the family.
    pub fn node_range(&self) -> (usize, usize) {
        match self {
            Family::EgoSmall => (4, 18),
            Family::CommunitySmall => (12, 20),
            Family::Planar => (64, 64),
            Family::Sbm => (44, 192),
            Family::Grid => (100, 400),
        }
    }

    /// Truncation order used by the spectral-fidelity benchmarks.
    pub fn default_k(&self) -> usize {
        match self {
            Family::EgoSmall | Family::CommunitySmall | Family::Planar => 2,
            Family::Sbm => 4,
            Family::Grid => 16,
        }
    }

    pub fn parameters_json(&self) -> serde_json::Value {
        match self {
            Family::EgoSmall => serde_json::json!({
                "host_nodes": 400, "attachment_degree": 2, "radius": 1
            }),
            Family::CommunitySmall => serde_json::json!({
                "communities": 2, "p_intra": 0.7, "inter_fraction": 0.05
            }),
            Family::Planar => serde_json::json!({ "points": 64, "jitter": 1e-9 }),
            Family::Sbm => serde_json::json!({
                "communities": [2, 5], "community_size": [20, 40],
                "p_intra": 0.3, "p_inter": 0.005
            }),
            Family::Grid => serde_json::json!({ "side": [10, 20] }),
        }
    }
}

impl std::str::FromStr for Family {
    type Err = SfmgError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ego-small" => Ok(Family::EgoSmall),
            "community-small" => Ok(Family::CommunitySmall),
            "planar" => Ok(Family::Planar),
            "sbm" => Ok(Family::Sbm),
            "grid" => Ok(Family::Grid),
            other => Err(SfmgError::Invalid(format!(
                "unknown family '{other}' (expected ego-small, community-small, planar, sbm, or grid)"
            ))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct DatasetSpec {
    pub family: Family,
    pub count: usize,
    pub seed: u64,
}

/// Structure shared by all graphs of a dataset; only ego-small uses one
/// (its preferential-attachment host).
pub(crate) fn build_shared_host(spec: &DatasetSpec, root: &RngState) -> Option<Graph> {
    match spec.family {
        Family::EgoSmall => {
            // stream far outside the per-graph range 0..count
            let mut rng = root.derive(1_000_000_007);
            Some(preferential_attachment(400, 2, &mut rng))
        }
        _ => None,
    }
}

pub(crate) fn generate_one(
    spec: &DatasetSpec,
    host: Option<&Graph>,
    rng: &mut RngState,
) -> Result<Graph> {
    match spec.family {
        Family::EgoSmall => ego_small(host.expect("ego host"), rng),
        Family::CommunitySmall => community_small(rng),
        Family::Planar => planar_delaunay(rng),
        Family::Sbm => sbm(rng),
        Family::Grid => grid(rng),
    }
}

fn reject_loop<F>(family: Family, mut attempt: F) -> Result<Graph>
where
    F: FnMut() -> Result<Option<Graph>>,
{
    for _ in 0..MAX_ATTEMPTS {
        if let Some(g) = attempt()? {
            return Ok(g);
        }
    }
    Err(SfmgError::RejectionExhausted {
        family: family.name().into(),
        attempts: MAX_ATTEMPTS,
    })
}

fn community_small(rng: &mut RngState) -> Result<Graph> {
    reject_loop(Family::CommunitySmall, || {
        let half = rng.uniform_int(6, 10);
        let n = 2 * half;
        let mut edges = Vec::new();
        for block in 0..2 {
            let base = block * half;
            for i in 0..half {
                for j in (i + 1)..half {
                    if rng.uniform() < 0.7 {
                        edges.push((base + i, base + j));
                    }
                }
            }
        }
        // ceil(0.05 n) distinct inter-community edges
        let wanted = (0.05 * n as f64).ceil() as usize;
        let mut cross: Vec<(usize, usize)> = Vec::with_capacity(half * half);
        for i in 0..half {
            for j in 0..half {
                cross.push((i, half + j));
            }
        }
        rng.shuffle(&mut cross);
        edges.extend(cross.into_iter().take(wanted));
        let g = Graph::from_edges(n, &edges)?;
        Ok(is_connected(&g).then_some(g))
    })
}

fn ego_small(host: &Graph, rng: &mut RngState) -> Result<Graph> {
    reject_loop(Family::EgoSmall, || {
        let center = rng.uniform_int(0, host.n() - 1);
        let mut nodes = vec![center];
        nodes.extend(host.neighbors(center));
        if !(4..=18).contains(&nodes.len()) {
            return Ok(None);
        }
        nodes.sort_unstable();
        let index_of = |v: usize| nodes.binary_search(&v).unwrap();
        let mut edges = Vec::new();
        for (a_pos, &a) in nodes.iter().enumerate() {
            for &b in &nodes[a_pos + 1..] {
                if host.has_edge(a, b) {
                    edges.push((index_of(a), index_of(b)));
                }
            }
        }
        let g = Graph::from_edges(nodes.len(), &edges)?;
        Ok(Some(g))
    })
}

/// Barabasi-Albert style growth: a triangle seed, then each new node
/// attaches to `m` distinct existing nodes chosen proportionally to degree.
fn preferential_attachment(n: usize, m: usize, rng: &mut RngState) -> Graph {
    assert!(n >= 3 && m >= 1);
    let mut edges: Vec<(usize, usize)> = vec![(0, 1), (1, 2), (0, 2)];
    // endpoint multiset: each edge contributes both ends
    let mut endpoints: Vec<usize> = vec![0, 1, 1, 2, 0, 2];
    for v in 3..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        while chosen.len() < m {
            let pick = endpoints[rng.uniform_int(0, endpoints.len() - 1)];
            if !chosen.contains(&pick) {
                chosen.push(pick);
            }
        }
        for &u in &chosen {
            edges.push((u.min(v), u.max(v)));
            endpoints.push(u);
            endpoints.push(v);
        }
    }
    Graph::from_edges(n, &edges).expect("growth produces valid edges")
}

fn sbm(rng: &mut RngState) -> Result<Graph> {
    reject_loop(Family::Sbm, || {
        let communities = rng.uniform_int(2, 5);
        let sizes: Vec<usize> = (0..communities).map(|_| rng.uniform_int(20, 40)).collect();
        let n: usize = sizes.iter().sum();
        if !(44..=192).contains(&n) {
            return Ok(None);
        }
        let mut membership = Vec::with_capacity(n);
        for (c, &s) in sizes.iter().enumerate() {
            membership.extend(std::iter::repeat(c).take(s));
        }
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                let p = if membership[i] == membership[j] {
                    0.3
                } else {
                    0.005
                };
                if rng.uniform() < p {
                    edges.push((i, j));
                }
            }
        }
        let g = Graph::from_edges(n, &edges)?;
        Ok(is_connected(&g).then_some(g))
    })
}

fn grid(rng: &mut RngState) -> Result<Graph> {
    reject_loop(Family::Grid, || {
        let w = rng.uniform_int(10, 20);
        let h = rng.uniform_int(10, 20);
        if !(100..=400).contains(&(w * h)) {
            return Ok(None);
        }
        let id = |x: usize, y: usize| y * w + x;
        let mut edges = Vec::new();
        for y in 0..h {
            for x in 0..w {
                if x + 1 < w {
                    edges.push((id(x, y), id(x + 1, y)));
                }
                if y + 1 < h {
                    edges.push((id(x, y), id(x, y + 1)));
                }
            }
        }
        Ok(Some(Graph::from_edges(w * h, &edges)?))
    })
}

fn planar_delaunay(rng: &mut RngState) -> Result<Graph> {
    let n = 64;
    // uniform points with a deterministic jitter against degeneracies
    let points: Vec<(f64, f64)> = (0..n)
        .map(|_| {
            (
                rng.uniform() + rng.uniform_range(-1e-9, 1e-9),
                rng.uniform() + rng.uniform_range(-1e-9, 1e-9),
            )
        })
        .collect();
    let edges = delaunay_edges(&points);
    Graph::from_edges(n, &edges)
}

/// Bowyer-Watson incremental Delaunay triangulation with a super-triangle.
/// Returns the unique edges between input points.
fn delaunay_edges(points: &[(f64, f64)]) -> Vec<(usize, usize)> {
    let n = points.len();
    let mut pts = points.to_vec();
    // super-triangle well outside the unit square
    pts.push((-30.0, -30.0));
    pts.push((30.0, -30.0));
    pts.push((0.0, 60.0));
    let (s0, s1, s2) = (n, n + 1, n + 2);
    let mut triangles: Vec<[usize; 3]> = vec![[s0, s1, s2]];

    for p in 0..n {
        let mut bad = Vec::new();
        for (idx, tri) in triangles.iter().enumerate() {
            if in_circumcircle(pts[tri[0]], pts[tri[1]], pts[tri[2]], pts[p]) {
                bad.push(idx);
            }
        }
        // boundary of the cavity: edges used by exactly one bad triangle
        let mut boundary: Vec<(usize, usize)> = Vec::new();
        for &bi in &bad {
            let t = triangles[bi];
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (e.0.min(e.1), e.0.max(e.1));
                if let Some(pos) = boundary.iter().position(|&b| b == key) {
                    boundary.remove(pos);
                } else {
                    boundary.push(key);
                }
            }
        }
        for i in bad.into_iter().rev() {
            triangles.swap_remove(i);
        }
        for (a, b) in boundary {
            triangles.push([a, b, p]);
        }
    }

    let mut edges = std::collections::BTreeSet::new();
    for tri in &triangles {
        for e in [(tri[0], tri[1]), (tri[1], tri[2]), (tri[2], tri[0])] {
            let (a, b) = (e.0.min(e.1), e.0.max(e.1));
            if b < n {
                edges.insert((a, b));
            }
        }
    }
    edges.into_iter().collect()
}

fn in_circumcircle(a: (f64, f64), b: (f64, f64), c: (f64, f64), p: (f64, f64)) -> bool {
    // orient the triangle counterclockwise first
    let orient = (b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0);
    let (b, c) = if orient < 0.0 { (c, b) } else { (b, c) };
    let ax = a.0 - p.0;
    let ay = a.1 - p.1;
    let bx = b.0 - p.0;
    let by = b.1 - p.1;
    let cx = c.0 - p.0;
    let cy = c.1 - p.1;
    let det = (ax * ax + ay * ay) * (bx * cy - cx * by)
        - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay);
    det > 0.0
}
