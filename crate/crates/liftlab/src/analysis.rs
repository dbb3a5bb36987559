//! Graph measurements on lifts: connectivity, global edge connectivity
//! (minimum edge cut over the multigraph, parallel edges counted with
//! multiplicity), and exact edge expansion by subset enumeration.
//!
//! All operations are pure functions of immutable graphs.

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::graph::{MultiGraph, VertexId};
use crate::{Error, Result};

/// Largest vertex count accepted by [`edge_expansion_exact`].
pub const MAX_EXPANSION_VERTICES: usize = 24;

/// Global minimum edge cut and a witness bipartition side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CutReport {
    /// Minimum number of edges whose removal disconnects the graph;
    /// `usize::MAX` for a single-vertex graph (no bipartition exists).
    pub edge_connectivity: usize,
    /// One side of a minimum cut, as a sorted vertex list.
    pub witness: Vec<usize>,
}

/// Exact edge expansion `min E(S, S^c) / |S|` over nonempty subsets with
/// `|S| <= |V|/2`, with a minimizing witness set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExpansionReport {
    pub expansion: Ratio<u64>,
    /// Lexicographically smallest minimizing set, sorted.
    pub witness: Vec<usize>,
}

/// Connectivity of any multigraph (lifted or base).
pub fn is_connected(g: &MultiGraph) -> bool {
    g.is_connected()
}

/// Minimum vertex degree; loops count twice.
pub fn min_degree(g: &MultiGraph) -> usize {
    g.min_degree()
}

/// Global minimum edge cut via the deterministic Stoer–Wagner procedure
/// on the collapsed weight matrix (parallel edges add multiplicity, loops
/// never cross a cut). Disconnected graphs report cut 0 with a component
/// as witness.
pub fn edge_connectivity(g: &MultiGraph) -> CutReport {
    let n = g.vertex_count();
    if n == 1 {
        return CutReport {
            edge_connectivity: usize::MAX,
            witness: Vec::new(),
        };
    }
    if !g.is_connected() {
        return CutReport {
            edge_connectivity: 0,
            witness: g.components().remove(0),
        };
    }
    let mut weight = vec![vec![0u64; n]; n];
    for (_, t, h) in g.edges() {
        if t != h {
            weight[t.0][h.0] += 1;
            weight[h.0][t.0] += 1;
        }
    }

    let mut active: Vec<usize> = (0..n).collect();
    let mut merged: Vec<Vec<usize>> = (0..n).map(|v| vec![v]).collect();
    let mut best_cut = u64::MAX;
    let mut best_side: Vec<usize> = Vec::new();

    while active.len() > 1 {
        // Maximum adjacency search from the first active vertex; ties go
        // to the smallest vertex index for determinism.
        let mut in_a = vec![false; n];
        let start = active[0];
        in_a[start] = true;
        let mut w_to_a: Vec<u64> = (0..n).map(|v| weight[start][v]).collect();
        let mut last = start;
        let mut second_last = start;
        let mut cut_of_phase = 0;
        for _ in 1..active.len() {
            let mut pick = None;
            let mut pick_w = 0u64;
            for &v in &active {
                if !in_a[v] && (pick.is_none() || w_to_a[v] > pick_w) {
                    pick = Some(v);
                    pick_w = w_to_a[v];
                }
            }
            let v = pick.expect("an unvisited active vertex remains");
            second_last = last;
            last = v;
            cut_of_phase = w_to_a[v];
            in_a[v] = true;
            for &u in &active {
                if !in_a[u] {
                    w_to_a[u] += weight[v][u];
                }
            }
        }
        if cut_of_phase < best_cut {
            best_cut = cut_of_phase;
            best_side = merged[last].clone();
        }
        // Merge `last` into `second_last`.
        let absorbed = std::mem::take(&mut merged[last]);
        merged[second_last].extend(absorbed);
        let absorbed_row = weight[last].clone();
        for (v, w) in absorbed_row.iter().enumerate() {
            weight[second_last][v] += w;
        }
        for row in weight.iter_mut() {
            row[second_last] += row[last];
        }
        weight[second_last][second_last] = 0;
        active.retain(|&v| v != last);
    }

    best_side.sort_unstable();
    CutReport {
        edge_connectivity: best_cut as usize,
        witness: best_side,
    }
}

/// Exact edge expansion by Gray-code subset enumeration with incremental
/// boundary updates. Among minimizing sets the lexicographically smallest
/// sorted vertex list wins. Errors above [`MAX_EXPANSION_VERTICES`].
pub fn edge_expansion_exact(g: &MultiGraph) -> Result<ExpansionReport> {
    let n = g.vertex_count();
    if n > MAX_EXPANSION_VERTICES {
        return Err(Error::SizeLimit {
            size: n,
            limit: MAX_EXPANSION_VERTICES,
        });
    }
    if n < 2 {
        return Err(Error::SizeLimit { size: n, limit: 2 });
    }
    // Neighbor multiplicities, loops excluded (they never cross a cut).
    let mut mult = vec![Vec::<(usize, u64)>::new(); n];
    let mut nonloop_degree = vec![0u64; n];
    {
        let mut table = vec![vec![0u64; n]; n];
        for (_, t, h) in g.edges() {
            if t != h {
                table[t.0][h.0] += 1;
                table[h.0][t.0] += 1;
                nonloop_degree[t.0] += 1;
                nonloop_degree[h.0] += 1;
            }
        }
        for (v, row) in table.iter().enumerate() {
            for (u, &m) in row.iter().enumerate() {
                if m > 0 {
                    mult[v].push((u, m));
                }
            }
        }
    }

    let mut in_set = vec![false; n];
    let mut to_set = vec![0i64; n]; // edge multiplicity from v into S
    let mut size = 0usize;
    let mut boundary = 0i64;
    let mut best: Option<(Ratio<u64>, Vec<usize>)> = None;

    let total: u64 = 1u64 << n;
    for step in 1..total {
        // Reflected Gray code: flip the lowest set bit of the step count.
        let v = step.trailing_zeros() as usize;
        if in_set[v] {
            in_set[v] = false;
            size -= 1;
            boundary -= nonloop_degree[v] as i64 - 2 * to_set[v];
            for &(u, m) in &mult[v] {
                to_set[u] -= m as i64;
            }
        } else {
            in_set[v] = true;
            size += 1;
            boundary += nonloop_degree[v] as i64 - 2 * to_set[v];
            for &(u, m) in &mult[v] {
                to_set[u] += m as i64;
            }
        }
        if size == 0 || 2 * size > n {
            continue;
        }
        let ratio = Ratio::new(boundary as u64, size as u64);
        let better = match &best {
            None => true,
            Some((b, w)) => ratio < *b || (ratio == *b && lex_smaller(&in_set, w)),
        };
        if better {
            let witness: Vec<usize> = (0..n).filter(|&u| in_set[u]).collect();
            best = Some((ratio, witness));
        }
    }
    let (expansion, witness) = best.expect("n >= 2 always yields candidate subsets");
    Ok(ExpansionReport { expansion, witness })
}

/// Compares the current membership bitmap against a sorted witness list
/// lexicographically (as sorted vertex sequences).
fn lex_smaller(in_set: &[bool], witness: &[usize]) -> bool {
    let current = in_set
        .iter()
        .enumerate()
        .filter(|(_, &b)| b)
        .map(|(i, _)| i);
    current.lt(witness.iter().copied())
}

/// Removes the boundary edges of `side` and counts components; used to
/// check cut witnesses.
pub fn components_after_cut(g: &MultiGraph, side: &[usize]) -> usize {
    let n = g.vertex_count();
    let mut in_side = vec![false; n];
    for &v in side {
        in_side[v] = true;
    }
    let edges: Vec<(usize, usize)> = g
        .edges()
        .filter(|&(_, t, h)| in_side[t.0] == in_side[h.0])
        .map(|(_, t, h)| (t.0, h.0))
        .collect();
    let kept = MultiGraph::new(n, edges).expect("same vertex set");
    kept.components().len()
}

/// Boundary size of a vertex set: edges with exactly one endpoint inside,
/// counted with multiplicity.
pub fn boundary_size(g: &MultiGraph, side: &[usize]) -> usize {
    let mut in_side = vec![false; g.vertex_count()];
    for &v in side {
        in_side[v] = true;
    }
    g.edges()
        .filter(|&(_, t, h)| in_side[t.0] != in_side[h.0])
        .count()
}

/// Degree of a vertex given as raw index.
pub fn degree_of(g: &MultiGraph, v: usize) -> usize {
    g.degree(VertexId(v))
}
