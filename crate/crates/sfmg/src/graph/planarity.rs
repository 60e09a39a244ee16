//! Exact planarity testing by the left-right criterion.
//!
//! Two DFS passes: the first orients the graph and computes lowpoints and
//! nesting depths; the second walks edges in nesting order and maintains a
//! stack of conflict pairs of return-edge intervals. The graph is planar
//! iff no two return edges are forced onto the same side in conflict.

use crate::graph::Graph;

type EdgeId = usize;

#[derive(Clone, Copy, Default, PartialEq)]
struct Interval {
    low: Option<EdgeId>,
    high: Option<EdgeId>,
}

impl Interval {
    fn is_empty(&self) -> bool {
        self.low.is_none() && self.high.is_none()
    }
}

#[derive(Clone, Copy, Default)]
struct ConflictPair {
    l: Interval,
    r: Interval,
}

impl ConflictPair {
    fn swap(&mut self) {
        std::mem::swap(&mut self.l, &mut self.r);
    }
}

struct LrState {
    /// head and tail of each oriented edge (one orientation per undirected edge)
    dir: Vec<(usize, usize)>,
    oriented: Vec<bool>,
    out_edges: Vec<Vec<EdgeId>>,
    height: Vec<Option<usize>>,
    parent_edge: Vec<Option<EdgeId>>,
    lowpt: Vec<usize>,
    lowpt2: Vec<usize>,
    nesting_depth: Vec<i64>,
    refs: Vec<Option<EdgeId>>,
    lowpt_edge: Vec<Option<EdgeId>>,
    stack_bottom: Vec<usize>,
    stack: Vec<ConflictPair>,
    /// undirected edge id lookup by (min, max) endpoints
    edge_index: std::collections::HashMap<(usize, usize), EdgeId>,
    adj: Vec<Vec<usize>>,
}

pub fn is_planar(g: &Graph) -> bool {
    let n = g.n();
    if n < 5 {
        return true;
    }
    let edges: Vec<(usize, usize)> = g.edges().iter().map(|&(i, j, _)| (i, j)).collect();
    let m = edges.len();
    if m > 3 * n - 6 {
        return false;
    }

    let mut edge_index = std::collections::HashMap::new();
    for (id, &(i, j)) in edges.iter().enumerate() {
        edge_index.insert((i, j), id);
    }
    let mut state = LrState {
        dir: vec![(0, 0); m],
        oriented: vec![false; m],
        out_edges: vec![Vec::new(); n],
        height: vec![None; n],
        parent_edge: vec![None; n],
        lowpt: vec![0; m],
        lowpt2: vec![0; m],
        nesting_depth: vec![0; m],
        refs: vec![None; m],
        lowpt_edge: vec![None; m],
        stack_bottom: vec![0; m],
        stack: Vec::new(),
        edge_index,
        adj: (0..n).map(|i| g.neighbors(i)).collect(),
    };

    let mut roots = Vec::new();
    for v in 0..n {
        if state.height[v].is_none() {
            state.height[v] = Some(0);
            roots.push(v);
            state.dfs_orientation(v);
        }
    }
    for v in 0..n {
        state.out_edges[v].sort_by_key(|&e| state.nesting_depth[e]);
    }
    for &root in &roots {
        if !state.dfs_testing(root) {
            return false;
        }
    }
    true
}

impl LrState {
    fn edge_id(&self, u: usize, v: usize) -> EdgeId {
        self.edge_index[&(u.min(v), u.max(v))]
    }

    fn dfs_orientation(&mut self, v: usize) {
        let parent = self.parent_edge[v];
        let hv = self.height[v].unwrap();
        for idx in 0..self.adj[v].len() {
            let w = self.adj[v][idx];
            let e = self.edge_id(v, w);
            if self.oriented[e] {
                continue;
            }
            self.oriented[e] = true;
            self.dir[e] = (v, w);
            self.out_edges[v].push(e);
            self.lowpt[e] = hv;
            self.lowpt2[e] = hv;
            if self.height[w].is_none() {
                self.parent_edge[w] = Some(e);
                self.height[w] = Some(hv + 1);
                self.dfs_orientation(w);
            } else {
                self.lowpt[e] = self.height[w].unwrap();
            }
            self.nesting_depth[e] = 2 * self.lowpt[e] as i64;
            if self.lowpt2[e] < hv {
                self.nesting_depth[e] += 1; // chordal adjustment
            }
            if let Some(pe) = parent {
                if self.lowpt[e] < self.lowpt[pe] {
                    self.lowpt2[pe] = self.lowpt[pe].min(self.lowpt2[e]);
                    self.lowpt[pe] = self.lowpt[e];
                } else if self.lowpt[e] > self.lowpt[pe] {
                    self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt[e]);
                } else {
                    self.lowpt2[pe] = self.lowpt2[pe].min(self.lowpt2[e]);
                }
            }
        }
    }

    fn dfs_testing(&mut self, v: usize) -> bool {
        let parent = self.parent_edge[v];
        let hv = self.height[v].unwrap();
        let ordered = self.out_edges[v].clone();
        for (pos, &e) in ordered.iter().enumerate() {
            self.stack_bottom[e] = self.stack.len();
            let w = self.dir[e].1;
            if self.parent_edge[w] == Some(e) {
                if !self.dfs_testing(w) {
                    return false;
                }
            } else {
                self.lowpt_edge[e] = Some(e);
                self.stack.push(ConflictPair {
                    l: Interval::default(),
                    r: Interval {
                        low: Some(e),
                        high: Some(e),
                    },
                });
            }
            if self.lowpt[e] < hv {
                // e has a return edge
                if pos == 0 {
                    self.lowpt_edge[parent.expect("first edge with parent")] = self.lowpt_edge[e];
                } else if !self.add_constraints(e, parent.expect("non-root has parent")) {
                    return false;
                }
            }
        }
        if let Some(e) = parent {
            let u = self.dir[e].0;
            self.trim_back_edges(u);
            // side of e is the side of a highest return edge
            if self.lowpt[e] < self.height[u].unwrap() {
                if let Some(top) = self.stack.last() {
                    let hl = top.l.high;
                    let hr = top.r.high;
                    self.refs[e] = match (hl, hr) {
                        (Some(l), Some(r)) => {
                            if self.lowpt[l] > self.lowpt[r] {
                                Some(l)
                            } else {
                                Some(r)
                            }
                        }
                        (Some(l), None) => Some(l),
                        _ => hr,
                    };
                }
            }
        }
        true
    }

    fn conflicting(&self, interval: &Interval, e: EdgeId) -> bool {
        match interval.high {
            Some(h) => self.lowpt[h] > self.lowpt[e],
            None => false,
        }
    }

    fn add_constraints(&mut self, ei: EdgeId, e: EdgeId) -> bool {
        let mut p = ConflictPair::default();
        // merge return edges of ei into p.r
        loop {
            let mut q = self.stack.pop().expect("stack bottom marker guarantees depth");
            if !q.l.is_empty() {
                q.swap();
            }
            if !q.l.is_empty() {
                return false; // not planar
            }
            let q_low = q.r.low.expect("stacked pairs carry a return edge");
            if self.lowpt[q_low] > self.lowpt[e] {
                // merge into the interval
                if p.r.is_empty() {
                    p.r.high = q.r.high;
                } else {
                    self.refs[p.r.low.unwrap()] = q.r.high;
                }
                p.r.low = q.r.low;
            } else {
                // align under the lowpoint edge of the parent
                self.refs[q_low] = self.lowpt_edge[e];
            }
            if self.stack.len() == self.stack_bottom[ei] {
                break;
            }
        }
        // merge conflicting return edges of earlier siblings into p.l
        loop {
            let conflicts = match self.stack.last() {
                Some(top) => self.conflicting(&top.l, ei) || self.conflicting(&top.r, ei),
                None => false,
            };
            if !conflicts {
                break;
            }
            let mut q = self.stack.pop().unwrap();
            if self.conflicting(&q.r, ei) {
                q.swap();
            }
            if self.conflicting(&q.r, ei) {
                return false; // not planar
            }
            // merge the interval below lowpt(ei) into p.r
            if let Some(prl) = p.r.low {
                self.refs[prl] = q.r.high;
            }
            if q.r.low.is_some() {
                p.r.low = q.r.low;
            }
            if p.l.is_empty() {
                p.l.high = q.l.high;
            } else {
                self.refs[p.l.low.unwrap()] = q.l.high;
            }
            p.l.low = q.l.low;
        }
        if !(p.l.is_empty() && p.r.is_empty()) {
            self.stack.push(p);
        }
        true
    }

    fn lowest(&self, p: &ConflictPair) -> usize {
        match (p.l.low, p.r.low) {
            (Some(l), Some(r)) => self.lowpt[l].min(self.lowpt[r]),
            (Some(l), None) => self.lowpt[l],
            (None, Some(r)) => self.lowpt[r],
            (None, None) => usize::MAX,
        }
    }

    fn trim_back_edges(&mut self, u: usize) {
        let hu = self.height[u].unwrap();
        // drop entire conflict pairs returning to u
        while let Some(top) = self.stack.last() {
            if self.lowest(top) == hu {
                self.stack.pop();
            } else {
                break;
            }
        }
        // trim one more conflict pair
        if let Some(mut p) = self.stack.pop() {
            while let Some(h) = p.l.high {
                if self.dir[h].1 == u {
                    p.l.high = self.refs[h];
                } else {
                    break;
                }
            }
            if p.l.high.is_none() {
                if let Some(pll) = p.l.low {
                    self.refs[pll] = p.r.low;
                    p.l.low = None;
                }
            }
            while let Some(h) = p.r.high {
                if self.dir[h].1 == u {
                    p.r.high = self.refs[h];
                } else {
                    break;
                }
            }
            if p.r.high.is_none() {
                if let Some(prl) = p.r.low {
                    self.refs[prl] = p.l.low;
                    p.r.low = None;
                }
            }
            self.stack.push(p);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Result;
    use crate::graph::is_connected;
    use crate::numerics::RngState;

    fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    fn grid(w: usize, h: usize) -> Graph {
        let mut edges = Vec::new();
        let id = |x: usize, y: usize| y * w + x;
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
        Graph::from_edges(w * h, &edges).unwrap()
    }

    fn bipartite_complete(a: usize, b: usize) -> Graph {
        let mut edges = Vec::new();
        for i in 0..a {
            for j in 0..b {
                edges.push((i, a + j));
            }
        }
        Graph::from_edges(a + b, &edges).unwrap()
    }

    #[test]
    fn small_graphs_are_planar() {
        assert!(is_planar(&complete(4)));
        assert!(is_planar(&Graph::empty(3)));
        assert!(is_planar(&Graph::from_edges(4, &[(0, 1), (2, 3)]).unwrap()));
    }

    #[test]
    fn k5_and_k33_are_not_planar() {
        assert!(!is_planar(&complete(5)));
        assert!(!is_planar(&bipartite_complete(3, 3)));
    }

    #[test]
    fn k5_subdivision_is_not_planar() {
        // subdivide every edge of K5: 5 + 10 nodes, edge density is low so
        // the edge-count shortcut cannot decide
        let k5_edges: Vec<(usize, usize)> = complete(5)
            .edges()
            .iter()
            .map(|&(i, j, _)| (i, j))
            .collect();
        let mut edges = Vec::new();
        for (mid, &(i, j)) in k5_edges.iter().enumerate() {
            let m = 5 + mid;
            edges.push((i, m));
            edges.push((m, j));
        }
        let g = Graph::from_edges(15, &edges).unwrap();
        assert!(!is_planar(&g));
        assert!(is_connected(&g));
    }

    #[test]
    fn grids_and_wheels_are_planar() {
        assert!(is_planar(&grid(5, 7)));
        assert!(is_planar(&grid(10, 10)));
        // wheel: cycle plus hub
        let mut edges = Vec::new();
        for i in 0..8 {
            edges.push((i, (i + 1) % 8));
            edges.push((i, 8));
        }
        assert!(is_planar(&Graph::from_edges(9, &edges).unwrap()));
    }

    #[test]
    fn petersen_graph_is_not_planar() {
        let outer = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
        let spokes = [(0, 5), (1, 6), (2, 7), (3, 8), (4, 9)];
        let inner = [(5, 7), (7, 9), (9, 6), (6, 8), (8, 5)];
        let edges: Vec<(usize, usize)> = outer
            .iter()
            .chain(&spokes)
            .chain(&inner)
            .copied()
            .collect();
        assert!(!is_planar(&Graph::from_edges(10, &edges).unwrap()));
    }

    #[test]
    fn disjoint_union_of_planar_pieces_is_planar() {
        // two 4-cycles plus isolated nodes
        let edges = [(0, 1), (1, 2), (2, 3), (3, 0), (4, 5), (5, 6), (6, 7), (7, 4)];
        let g = Graph::from_edges(10, &edges).unwrap();
        assert!(is_planar(&g));
        assert!(!is_connected(&g));
    }

    #[test]
    fn k5_with_attached_path_is_not_planar() {
        let mut edges: Vec<(usize, usize)> = complete(5)
            .edges()
            .iter()
            .map(|&(i, j, _)| (i, j))
            .collect();
        edges.push((4, 5));
        edges.push((5, 6));
        assert!(!is_planar(&Graph::from_edges(7, &edges).unwrap()));
    }

    #[test]
    fn removing_edges_from_planar_stays_planar() -> Result<()> {
        // subgraphs of a planar graph are planar
        let g = grid(6, 6);
        let mut rng = RngState::new(21);
        let all = g.edges();
        for _ in 0..10 {
            let keep: Vec<(usize, usize)> = all
                .iter()
                .filter(|_| rng.uniform() < 0.7)
                .map(|&(i, j, _)| (i, j))
                .collect();
            let h = Graph::from_edges(g.n(), &keep)?;
            assert!(is_planar(&h));
        }
        Ok(())
    }

    #[test]
    fn dense_planar_triangulation_is_planar() {
        // maximal planar graph on 7 nodes: fan triangulation of a hexagon
        // with both "poles" 0 and 1 joined to the 5-cycle 2..6
        let mut edges = vec![(0, 1)];
        for i in 2..7 {
            edges.push((0, i));
            edges.push((1, i));
        }
        for i in 2..6 {
            edges.push((i, i + 1));
        }
        let g = Graph::from_edges(7, &edges).unwrap();
        // 15 = 3*7 - 6 edges: a maximal planar graph
        assert_eq!(g.edge_count(), 15);
        assert!(is_planar(&g));
    }
}
