//! Structural statistics: degree and clustering histograms, graphlet orbit
//! counts, and the Laplacian eigenvalue histogram.

use crate::error::Result;
use crate::graph::laplacian::normalized_laplacian;
use crate::graph::Graph;
use crate::numerics::sym_eig;

/// Orbits of connected graphlets on up to 4 nodes (edge, path, triangle,
/// 4-path, claw, 4-cycle, paw, diamond, K4), in the standard numbering.
pub const ORBIT_COUNT: usize = 15;

pub const CLUSTERING_BINS: usize = 100;
pub const SPECTRUM_BINS: usize = 200;

#[derive(Clone, Debug, PartialEq)]
pub struct GraphStatistics {
    /// Node count of the underlying graph.
    pub n: usize,
    /// Degree counts indexed by degree, 0..=max_degree.
    pub degree_hist: Vec<f64>,
    /// Local clustering coefficients binned into 100 bins on [0, 1].
    pub clustering_hist: Vec<f64>,
    /// Per-node orbit counts summed over the graph.
    pub orbit_counts: [f64; ORBIT_COUNT],
    /// Normalized-Laplacian eigenvalues binned into 200 bins on [0, 2].
    pub spectrum_hist: Vec<f64>,
}

pub fn graph_statistics(g: &Graph) -> Result<GraphStatistics> {
    let n = g.n();
    let adj = adjacency_lists(g);

    let mut degree_hist = vec![0.0; 1];
    for i in 0..n {
        let d = adj[i].len();
        if d >= degree_hist.len() {
            degree_hist.resize(d + 1, 0.0);
        }
        degree_hist[d] += 1.0;
    }

    let triangles = triangles_per_node(g, &adj);
    let mut clustering_hist = vec![0.0; CLUSTERING_BINS];
    for i in 0..n {
        let d = adj[i].len();
        let c = if d >= 2 {
            2.0 * triangles[i] as f64 / (d as f64 * (d - 1) as f64)
        } else {
            0.0
        };
        let bin = ((c * CLUSTERING_BINS as f64) as usize).min(CLUSTERING_BINS - 1);
        clustering_hist[bin] += 1.0;
    }

    let per_node = orbit_counts_per_node(g, &adj, &triangles);
    let mut orbit_counts = [0.0; ORBIT_COUNT];
    for counts in &per_node {
        for (o, c) in counts.iter().enumerate() {
            orbit_counts[o] += *c as f64;
        }
    }

    let (vals, _) = sym_eig(&normalized_laplacian(g))?;
    let mut spectrum_hist = vec![0.0; SPECTRUM_BINS];
    for v in vals {
        let clamped = v.clamp(0.0, 2.0);
        let bin = ((clamped / 2.0 * SPECTRUM_BINS as f64) as usize).min(SPECTRUM_BINS - 1);
        spectrum_hist[bin] += 1.0;
    }

    Ok(GraphStatistics {
        n,
        degree_hist,
        clustering_hist,
        orbit_counts,
        spectrum_hist,
    })
}

pub fn is_connected(g: &Graph) -> bool {
    let n = g.n();
    if n == 0 {
        return true;
    }
    let adj = adjacency_lists(g);
    let mut seen = vec![false; n];
    let mut queue = std::collections::VecDeque::new();
    seen[0] = true;
    queue.push_back(0);
    let mut count = 1;
    while let Some(v) = queue.pop_front() {
        for &w in &adj[v] {
            if !seen[w] {
                seen[w] = true;
                count += 1;
                queue.push_back(w);
            }
        }
    }
    count == n
}

fn adjacency_lists(g: &Graph) -> Vec<Vec<usize>> {
    (0..g.n()).map(|i| g.neighbors(i)).collect()
}

fn triangles_per_node(g: &Graph, adj: &[Vec<usize>]) -> Vec<usize> {
    let n = g.n();
    let mut t = vec![0usize; n];
    for i in 0..n {
        for (a_idx, &a) in adj[i].iter().enumerate() {
            for &b in &adj[i][a_idx + 1..] {
                if g.has_edge(a, b) {
                    t[i] += 1;
                }
            }
        }
    }
    t
}

/// Per-node orbit counts for the 15 orbits of connected graphlets on 2-4
/// nodes. Orbits 0-3 come from closed-form degree/path/triangle counts; the
/// 4-node orbits come from enumerating connected induced 4-node subgraphs
/// with the ESU scheme and classifying each by edge count and degrees.
pub fn orbit_counts_per_node(
    g: &Graph,
    adj: &[Vec<usize>],
    triangles: &[usize],
) -> Vec<[u64; ORBIT_COUNT]> {
    let n = g.n();
    let mut counts = vec![[0u64; ORBIT_COUNT]; n];

    for i in 0..n {
        let d = adj[i].len() as u64;
        counts[i][0] = d;
        // orbit 2: middle of an induced 2-path = non-adjacent neighbor pairs
        counts[i][2] = d * d.saturating_sub(1) / 2 - triangles[i] as u64;
        // orbit 1: end of an induced 2-path
        let walk2: u64 = adj[i].iter().map(|&j| (adj[j].len() - 1) as u64).sum();
        counts[i][1] = walk2 - 2 * triangles[i] as u64;
        counts[i][3] = triangles[i] as u64;
    }

    // ESU enumeration of connected induced subgraphs on exactly 4 nodes.
    let mut in_sub = vec![false; n];
    let mut in_closed = vec![false; n]; // sub nodes and their neighbors
    for v in 0..n {
        let mut sub = vec![v];
        in_sub[v] = true;
        in_closed[v] = true;
        let mut touched = vec![v];
        for &u in &adj[v] {
            if !in_closed[u] {
                in_closed[u] = true;
                touched.push(u);
            }
        }
        let ext: Vec<usize> = adj[v].iter().copied().filter(|&u| u > v).collect();
        extend_subgraph(
            g,
            adj,
            v,
            &mut sub,
            ext,
            &mut in_sub,
            &mut in_closed,
            &mut touched,
            &mut counts,
        );
        in_sub[v] = false;
        for &u in &touched {
            in_closed[u] = false;
        }
    }
    counts
}

#[allow(clippy::too_many_arguments)]
fn extend_subgraph(
    g: &Graph,
    adj: &[Vec<usize>],
    root: usize,
    sub: &mut Vec<usize>,
    ext: Vec<usize>,
    in_sub: &mut [bool],
    in_closed: &mut [bool],
    touched: &mut Vec<usize>,
    counts: &mut [[u64; ORBIT_COUNT]],
) {
    if sub.len() == 4 {
        classify_quad(g, sub, counts);
        return;
    }
    let mut remaining = ext;
    while let Some(w) = remaining.pop() {
        let mut next_ext = remaining.clone();
        let before = touched.len();
        // exclusive neighborhood: new nodes beyond the closed neighborhood
        for &u in &adj[w] {
            if u > root && !in_closed[u] {
                next_ext.push(u);
                in_closed[u] = true;
                touched.push(u);
            }
        }
        sub.push(w);
        in_sub[w] = true;
        extend_subgraph(
            g, adj, root, sub, next_ext, in_sub, in_closed, touched, counts,
        );
        in_sub[w] = false;
        sub.pop();
        // roll back the closed-neighborhood marks added for w's extension
        for &u in &touched[before..] {
            in_closed[u] = false;
        }
        touched.truncate(before);
    }
}

fn classify_quad(g: &Graph, nodes: &[usize], counts: &mut [[u64; ORBIT_COUNT]]) {
    debug_assert_eq!(nodes.len(), 4);
    let mut deg = [0usize; 4];
    let mut edges = 0usize;
    for a in 0..4 {
        for b in (a + 1)..4 {
            if g.has_edge(nodes[a], nodes[b]) {
                deg[a] += 1;
                deg[b] += 1;
                edges += 1;
            }
        }
    }
    match edges {
        3 => {
            if deg.contains(&3) {
                // claw: leaves orbit 6, center orbit 7
                for a in 0..4 {
                    counts[nodes[a]][if deg[a] == 3 { 7 } else { 6 }] += 1;
                }
            } else {
                // 4-path: ends orbit 4, middles orbit 5
                for a in 0..4 {
                    counts[nodes[a]][if deg[a] == 1 { 4 } else { 5 }] += 1;
                }
            }
        }
        4 => {
            if deg.contains(&3) {
                // paw: tail orbit 9, far triangle nodes orbit 10, junction 11
                for a in 0..4 {
                    let orbit = match deg[a] {
                        1 => 9,
                        2 => 10,
                        _ => 11,
                    };
                    counts[nodes[a]][orbit] += 1;
                }
            } else {
                // 4-cycle
                for a in 0..4 {
                    counts[nodes[a]][8] += 1;
                }
            }
        }
        5 => {
            // diamond: degree-2 nodes orbit 12, degree-3 nodes orbit 13
            for a in 0..4 {
                counts[nodes[a]][if deg[a] == 2 { 12 } else { 13 }] += 1;
            }
        }
        6 => {
            for a in 0..4 {
                counts[nodes[a]][14] += 1;
            }
        }
        _ => {} // disconnected 4-sets never reach here via ESU
    }
}
