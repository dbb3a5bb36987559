//! Multigraph data model: loops and parallel edges allowed, per-edge
//! orientation given by the stored `(tail, head)` order, deterministic
//! spanning trees, cycle rank, and the named graph families used in
//! experiments.

use std::collections::VecDeque;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Dense 0-based vertex index.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct VertexId(pub usize);

/// Dense 0-based edge index. The index order is stable: serialization
/// round-trips preserve edge ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct EdgeId(pub usize);

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl fmt::Display for EdgeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// An undirected multigraph with an orientation bookkeeping convention:
/// each edge is stored as `(tail, head)` and that stored order is the
/// chosen orientation. Traversing an edge against its orientation is an
/// explicit direction flag elsewhere, never a second edge.
///
/// Immutable after construction; safe to share across trial workers.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MultiGraph {
    vertex_count: usize,
    edges: Vec<(VertexId, VertexId)>,
}

impl MultiGraph {
    /// Builds a multigraph from raw endpoint pairs, validating vertex
    /// indices.
    pub fn new(vertex_count: usize, edges: Vec<(usize, usize)>) -> Result<Self> {
        if vertex_count == 0 {
            return Err(Error::InvalidParameter(
                "a multigraph needs at least one vertex".into(),
            ));
        }
        for &(t, h) in &edges {
            if t >= vertex_count || h >= vertex_count {
                return Err(Error::OutOfRange {
                    point: t.max(h),
                    bound: vertex_count,
                });
            }
        }
        Ok(MultiGraph {
            vertex_count,
            edges: edges
                .into_iter()
                .map(|(t, h)| (VertexId(t), VertexId(h)))
                .collect(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (EdgeId, VertexId, VertexId)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, &(t, h))| (EdgeId(i), t, h))
    }

    /// `(tail, head)` of an edge in stored orientation.
    pub fn endpoints(&self, e: EdgeId) -> (VertexId, VertexId) {
        self.edges[e.0]
    }

    pub fn is_loop(&self, e: EdgeId) -> bool {
        let (t, h) = self.edges[e.0];
        t == h
    }

    /// Vertex degree; a loop contributes 2 (it counts as incoming and
    /// outgoing).
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|&(t, h)| (t == v) as usize + (h == v) as usize)
            .sum()
    }

    pub fn min_degree(&self) -> usize {
        (0..self.vertex_count)
            .map(|v| self.degree(VertexId(v)))
            .min()
            .unwrap_or(0)
    }

    /// Incidence lists: for each vertex, the incident `(edge, other
    /// endpoint)` pairs in increasing edge id order. A loop appears once.
    pub fn incidence(&self) -> Vec<Vec<(EdgeId, VertexId)>> {
        let mut inc = vec![Vec::new(); self.vertex_count];
        for (i, &(t, h)) in self.edges.iter().enumerate() {
            inc[t.0].push((EdgeId(i), h));
            if t != h {
                inc[h.0].push((EdgeId(i), t));
            }
        }
        inc
    }

    /// True iff the graph has a single connected component. A one-vertex
    /// graph counts as connected.
    pub fn is_connected(&self) -> bool {
        let inc = self.incidence();
        let mut seen = vec![false; self.vertex_count];
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        let mut reached = 1;
        while let Some(u) = queue.pop_front() {
            for &(_, w) in &inc[u] {
                if !seen[w.0] {
                    seen[w.0] = true;
                    reached += 1;
                    queue.push_back(w.0);
                }
            }
        }
        reached == self.vertex_count
    }

    /// Connected components as sorted vertex lists, ordered by smallest
    /// member.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let inc = self.incidence();
        let mut seen = vec![false; self.vertex_count];
        let mut comps = Vec::new();
        for start in 0..self.vertex_count {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(u) = queue.pop_front() {
                for &(_, w) in &inc[u] {
                    if !seen[w.0] {
                        seen[w.0] = true;
                        comp.push(w.0);
                        queue.push_back(w.0);
                    }
                }
            }
            comp.sort_unstable();
            comps.push(comp);
        }
        comps
    }

    /// Serializes to the edge-list file format: first line `V E`, then one
    /// `tail head` line per edge in id order.
    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.vertex_count, self.edges.len());
        for &(t, h) in &self.edges {
            out.push_str(&format!("{} {}\n", t.0, h.0));
        }
        out
    }

    /// Parses the edge-list file format produced by [`to_edge_list`].
    ///
    /// [`to_edge_list`]: MultiGraph::to_edge_list
    pub fn from_edge_list(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("empty graph file".into()))?;
        let mut it = header.split_whitespace();
        let v: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad header: expected `V E`".into()))?;
        let e: usize = it
            .next()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| Error::Parse("bad header: expected `V E`".into()))?;
        let mut edges = Vec::with_capacity(e);
        for line in lines {
            let mut it = line.split_whitespace();
            let t: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
            let h: usize = it
                .next()
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("bad edge line: {line:?}")))?;
            edges.push((t, h));
        }
        if edges.len() != e {
            return Err(Error::Parse(format!(
                "edge count mismatch: header says {e}, found {}",
                edges.len()
            )));
        }
        MultiGraph::new(v, edges)
    }
}

/// A rooted spanning tree of a connected multigraph. Tree edges are the
/// edges forced flat (labeled with the identity) in lift assignments.
#[derive(Debug, Clone)]
pub struct SpanningTree {
    in_tree: Vec<bool>,
    tree_edges: Vec<EdgeId>,
    /// `parent[v] = (parent vertex, connecting edge)`; the root (vertex 0)
    /// has none.
    parent: Vec<Option<(VertexId, EdgeId)>>,
}

impl SpanningTree {
    pub fn contains(&self, e: EdgeId) -> bool {
        self.in_tree[e.0]
    }

    /// Tree edges in increasing id order.
    pub fn tree_edges(&self) -> &[EdgeId] {
        &self.tree_edges
    }

    pub fn parent(&self, v: VertexId) -> Option<(VertexId, EdgeId)> {
        self.parent[v.0]
    }

    /// Non-tree edges of `g` in increasing id order.
    pub fn non_tree_edges(&self, g: &MultiGraph) -> Vec<EdgeId> {
        (0..g.edge_count())
            .map(EdgeId)
            .filter(|e| !self.contains(*e))
            .collect()
    }
}

/// Deterministic spanning tree: grow from vertex 0, always attaching the
/// lowest-indexed edge that reaches a new vertex. Loops never enter the
/// tree. Repeated calls on the same graph return the same tree.
pub fn spanning_tree(g: &MultiGraph) -> Result<SpanningTree> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.vertex_count();
    let mut visited = vec![false; n];
    visited[0] = true;
    let mut in_tree = vec![false; g.edge_count()];
    let mut parent: Vec<Option<(VertexId, EdgeId)>> = vec![None; n];
    let mut tree_edges = Vec::with_capacity(n.saturating_sub(1));
    let mut reached = 1;
    while reached < n {
        // Lowest-id edge with exactly one visited endpoint.
        let mut chosen = None;
        for (i, &(t, h)) in g.edges.iter().enumerate() {
            match (visited[t.0], visited[h.0]) {
                (true, false) => {
                    chosen = Some((EdgeId(i), t, h));
                    break;
                }
                (false, true) => {
                    chosen = Some((EdgeId(i), h, t));
                    break;
                }
                _ => {}
            }
        }
        let (e, old, new) = chosen.expect("connected graph always has a crossing edge");
        visited[new.0] = true;
        in_tree[e.0] = true;
        parent[new.0] = Some((old, e));
        tree_edges.push(e);
        reached += 1;
    }
    tree_edges.sort_unstable();
    Ok(SpanningTree {
        in_tree,
        tree_edges,
        parent,
    })
}

/// Cycle rank `|E| - |V| + 1` of a connected multigraph: the number of
/// edges outside any spanning tree, and the homotopy invariant that
/// governs random lift behavior.
pub fn betti_number(g: &MultiGraph) -> Result<usize> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    Ok(g.edge_count() + 1 - g.vertex_count())
}

/// A single vertex with `d` loops. Its n-lifts are the random 2d-regular
/// multigraphs (unions of d permutations).
pub fn bouquet(d: usize) -> Result<MultiGraph> {
    if d == 0 {
        return Err(Error::InvalidParameter("bouquet needs d >= 1".into()));
    }
    MultiGraph::new(1, vec![(0, 0); d])
}

/// Two (k+1)-cliques joined by a single bridge edge. Vertices 0..=k form
/// the first clique, k+1..=2k+1 the second; clique edges come first in
/// lexicographic order, the bridge `(0, k+1)` is last.
pub fn barbell(k: usize) -> Result<MultiGraph> {
    if k < 2 {
        return Err(Error::InvalidParameter("barbell needs k >= 2".into()));
    }
    let m = k + 1;
    let mut edges = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            edges.push((i, j));
        }
    }
    for i in 0..m {
        for j in (i + 1)..m {
            edges.push((m + i, m + j));
        }
    }
    edges.push((0, m));
    MultiGraph::new(2 * m, edges)
}

/// Cycle on `m` vertices, edges `(i, i+1 mod m)` in order.
pub fn cycle(m: usize) -> Result<MultiGraph> {
    if m < 3 {
        return Err(Error::InvalidParameter("cycle needs m >= 3".into()));
    }
    MultiGraph::new(m, (0..m).map(|i| (i, (i + 1) % m)).collect())
}

/// Complete graph on `m` vertices, edges in lexicographic order.
pub fn complete(m: usize) -> Result<MultiGraph> {
    if m < 2 {
        return Err(Error::InvalidParameter("complete needs m >= 2".into()));
    }
    let mut edges = Vec::new();
    for i in 0..m {
        for j in (i + 1)..m {
            edges.push((i, j));
        }
    }
    MultiGraph::new(m, edges)
}

/// Two vertices joined by three parallel edges.
pub fn theta() -> MultiGraph {
    MultiGraph::new(2, vec![(0, 1); 3]).expect("static graph")
}

/// Two loops joined by a bridge: edges `(0,0)`, `(0,1)`, `(1,1)`.
pub fn dumbbell() -> MultiGraph {
    MultiGraph::new(2, vec![(0, 0), (0, 1), (1, 1)]).expect("static graph")
}

/// Path on `m` vertices (a tree; cycle rank 0).
pub fn path(m: usize) -> Result<MultiGraph> {
    if m < 2 {
        return Err(Error::InvalidParameter("path needs m >= 2".into()));
    }
    MultiGraph::new(m, (0..m - 1).map(|i| (i, i + 1)).collect())
}

/// Builds a named family member. Families are addressable by name string
/// in CLI configs: `bouquet(d)`, `barbell(k)`, `cycle(m)`, `complete(m)`,
/// `path(m)`, `theta`, `dumbbell`.
pub fn make_family(name: &str, params: &[usize]) -> Result<MultiGraph> {
    let want = |k: usize| -> Result<()> {
        if params.len() == k {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!(
                "family {name:?} takes {k} parameter(s), got {}",
                params.len()
            )))
        }
    };
    match name {
        "bouquet" => {
            want(1)?;
            bouquet(params[0])
        }
        "barbell" => {
            want(1)?;
            barbell(params[0])
        }
        "cycle" => {
            want(1)?;
            cycle(params[0])
        }
        "complete" => {
            want(1)?;
            complete(params[0])
        }
        "path" => {
            want(1)?;
            path(params[0])
        }
        "theta" => {
            want(0)?;
            Ok(theta())
        }
        "dumbbell" => {
            want(0)?;
            Ok(dumbbell())
        }
        other => Err(Error::InvalidParameter(format!("unknown family {other:?}"))),
    }
}

/// Parses a `name` or `name:p1,p2` family spec as used by the CLI.
pub fn parse_family(spec: &str) -> Result<MultiGraph> {
    let (name, params) = match spec.split_once(':') {
        None => (spec, Vec::new()),
        Some((name, rest)) => {
            let params = rest
                .split(',')
                .map(|p| {
                    p.trim()
                        .parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad family parameter {p:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            (name, params)
        }
    };
    make_family(name.trim(), &params)
}
