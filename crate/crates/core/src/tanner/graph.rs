use std::collections::HashSet;

use super::BinaryMatrix;

/// One Tanner-graph edge, i.e. one NZ entry of the parity-check matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub cn: usize,
    pub vn: usize,
    pub entry: usize,
}

/// Bipartite CN/VN graph.
///
/// Node and entry ids are those of the source matrix, also for subgraphs, so a
/// subgraph can be related back to its host without translation tables.
#[derive(Debug, Clone)]
pub struct TannerGraph {
    n_cns: usize,
    n_vns: usize,
    cns: Vec<usize>,
    vns: Vec<usize>,
    edges: Vec<Edge>,
    cn_adj: Vec<Vec<usize>>,
    vn_adj: Vec<Vec<usize>>,
}

/// Tanner graph of `m`, one edge per NZ entry.
pub fn build_graph(m: &BinaryMatrix) -> TannerGraph {
    let edges = m
        .entries()
        .iter()
        .enumerate()
        .map(|(entry, &(cn, vn))| Edge { cn, vn, entry })
        .collect();
    TannerGraph::from_parts(
        m.n_rows(),
        m.n_cols(),
        (0..m.n_rows()).collect(),
        (0..m.n_cols()).collect(),
        edges,
    )
}

impl TannerGraph {
    fn from_parts(
        n_cns: usize,
        n_vns: usize,
        cns: Vec<usize>,
        vns: Vec<usize>,
        mut edges: Vec<Edge>,
    ) -> Self {
        edges.sort_unstable_by_key(|e| e.entry);
        let mut cn_adj = vec![Vec::new(); n_cns];
        let mut vn_adj = vec![Vec::new(); n_vns];
        for (i, e) in edges.iter().enumerate() {
            cn_adj[e.cn].push(i);
            vn_adj[e.vn].push(i);
        }
        Self {
            n_cns,
            n_vns,
            cns,
            vns,
            edges,
            cn_adj,
            vn_adj,
        }
    }

    /// Subgraph holding the edges accepted by `keep` and the nodes they touch.
    pub fn subgraph(&self, keep: impl Fn(&Edge) -> bool) -> TannerGraph {
        let edges: Vec<Edge> = self.edges.iter().copied().filter(|e| keep(e)).collect();
        let mut cns: Vec<usize> = edges.iter().map(|e| e.cn).collect();
        let mut vns: Vec<usize> = edges.iter().map(|e| e.vn).collect();
        cns.sort_unstable();
        cns.dedup();
        vns.sort_unstable();
        vns.dedup();
        Self::from_parts(self.n_cns, self.n_vns, cns, vns, edges)
    }

    /// Number of CN ids in the host matrix (rows).
    pub fn cn_bound(&self) -> usize {
        self.n_cns
    }

    /// Number of VN ids in the host matrix (columns).
    pub fn vn_bound(&self) -> usize {
        self.n_vns
    }

    pub fn cns(&self) -> &[usize] {
        &self.cns
    }

    pub fn vns(&self) -> &[usize] {
        &self.vns
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edge_by_entry(&self, entry: usize) -> Option<&Edge> {
        self.edges
            .binary_search_by_key(&entry, |e| e.entry)
            .ok()
            .map(|i| &self.edges[i])
    }

    /// Edges at a CN.
    pub fn cn_edges(&self, cn: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.cn_adj[cn].iter().map(move |&i| &self.edges[i])
    }

    /// Edges at a VN.
    pub fn vn_edges(&self, vn: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.vn_adj[vn].iter().map(move |&i| &self.edges[i])
    }

    pub fn cn_degree(&self, cn: usize) -> usize {
        self.cn_adj[cn].len()
    }

    pub fn vn_degree(&self, vn: usize) -> usize {
        self.vn_adj[vn].len()
    }

    /// Matrix with this graph's edges, in the host dimensions.
    pub fn to_matrix(&self) -> BinaryMatrix {
        BinaryMatrix::new(
            self.n_cns,
            self.n_vns,
            self.edges.iter().map(|e| (e.cn, e.vn)),
        )
        .expect("graph edges are distinct positions")
    }

    /// Whether the edges connect every present node.
    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.vns.first() else {
            return true;
        };
        let mut seen_vn = vec![false; self.n_vns];
        let mut seen_cn = vec![false; self.n_cns];
        let mut stack = vec![start];
        seen_vn[start] = true;
        let mut reached = 1;
        while let Some(v) = stack.pop() {
            for e in self.vn_edges(v) {
                if seen_cn[e.cn] {
                    continue;
                }
                seen_cn[e.cn] = true;
                for f in self.cn_edges(e.cn) {
                    if !seen_vn[f.vn] {
                        seen_vn[f.vn] = true;
                        reached += 1;
                        stack.push(f.vn);
                    }
                }
            }
        }
        reached == self.vns.len() && self.cns.iter().all(|&c| seen_cn[c])
    }
}

/// True iff no two distinct CNs share two or more VNs.
pub fn check_no_4cycles(g: &TannerGraph) -> bool {
    let mut pairs = HashSet::new();
    for &v in g.vns() {
        let cns: Vec<usize> = g.vn_edges(v).map(|e| e.cn).collect();
        for (i, &a) in cns.iter().enumerate() {
            for &b in &cns[i + 1..] {
                if !pairs.insert((a.min(b), a.max(b))) {
                    return false;
                }
            }
        }
    }
    true
}
