//! Random lifts and iterated random lifts.
//!
//! A lift assignment labels every edge of a connected base multigraph with
//! a permutation (or wreath element, for iterated lifts). Spanning-tree
//! flattening is always applied when sampling: tree edges carry the
//! identity, which collapses the sample space from `(n!)^|E|` to `(n!)^l`
//! with `l` the cycle rank, without changing the probability of any
//! graphical property. The walk-subgroup of a flattened assignment is the
//! subgroup generated by the non-tree labels.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use rand::Rng;

use crate::graph::{spanning_tree, EdgeId, MultiGraph, VertexId};
use crate::group::GroupHandle;
use crate::perm::Permutation;
use crate::wreath::WreathElement;
use crate::{Error, Result};

/// Traversal direction of an edge relative to its stored orientation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Direction {
    Forward,
    Backward,
}

/// A walk on a multigraph: a start vertex and a sequence of directed edge
/// steps where consecutive steps share endpoints. Loops are traversed with
/// an explicit direction flag, never a sign convention.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Walk {
    start: VertexId,
    steps: Vec<(EdgeId, Direction)>,
    end: VertexId,
}

impl Walk {
    /// Validates the step sequence against `g`: each step must depart from
    /// the current vertex.
    pub fn new(g: &MultiGraph, start: VertexId, steps: Vec<(EdgeId, Direction)>) -> Result<Walk> {
        if start.0 >= g.vertex_count() {
            return Err(Error::OutOfRange {
                point: start.0,
                bound: g.vertex_count(),
            });
        }
        let mut at = start;
        for (i, &(e, dir)) in steps.iter().enumerate() {
            if e.0 >= g.edge_count() {
                return Err(Error::InvalidWalk(format!("step {i}: no edge {e}")));
            }
            let (tail, head) = g.endpoints(e);
            let (from, to) = match dir {
                Direction::Forward => (tail, head),
                Direction::Backward => (head, tail),
            };
            if from != at {
                return Err(Error::InvalidWalk(format!(
                    "step {i}: edge {e} departs from {from}, walk is at {at}"
                )));
            }
            at = to;
        }
        Ok(Walk {
            start,
            steps,
            end: at,
        })
    }

    pub fn start(&self) -> VertexId {
        self.start
    }

    pub fn end(&self) -> VertexId {
        self.end
    }

    pub fn steps(&self) -> &[(EdgeId, Direction)] {
        &self.steps
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// A degree-`n` lift assignment: one permutation label per base edge, with
/// a recorded acyclic flat set guaranteed to carry the identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LiftAssignment {
    base: MultiGraph,
    degree: usize,
    labels: Vec<Permutation>,
    flat: Vec<bool>,
}

impl LiftAssignment {
    /// Samples a uniform flattened assignment: spanning-tree edges carry
    /// the identity, every non-tree edge an independent uniform
    /// permutation.
    pub fn random<R: Rng + ?Sized>(g: &MultiGraph, n: usize, rng: &mut R) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter("lift degree must be >= 1".into()));
        }
        let tree = spanning_tree(g)?;
        let labels = (0..g.edge_count())
            .map(|e| {
                if tree.contains(EdgeId(e)) {
                    Permutation::identity(n)
                } else {
                    Permutation::random(n, rng)
                }
            })
            .collect();
        let flat = (0..g.edge_count())
            .map(|e| tree.contains(EdgeId(e)))
            .collect();
        Ok(LiftAssignment {
            base: g.clone(),
            degree: n,
            labels,
            flat,
        })
    }

    /// Builds an assignment from explicit labels. Flat edges must carry
    /// the identity and must not contain a cycle.
    pub fn from_labels(
        g: &MultiGraph,
        n: usize,
        labels: Vec<Permutation>,
        flat_set: &[EdgeId],
    ) -> Result<Self> {
        if labels.len() != g.edge_count() {
            return Err(Error::InvalidParameter(format!(
                "expected {} labels, got {}",
                g.edge_count(),
                labels.len()
            )));
        }
        for p in &labels {
            if p.degree() != n {
                return Err(Error::DegreeMismatch {
                    left: n,
                    right: p.degree(),
                });
            }
        }
        let mut flat = vec![false; g.edge_count()];
        for e in flat_set {
            if e.0 >= g.edge_count() {
                return Err(Error::OutOfRange {
                    point: e.0,
                    bound: g.edge_count(),
                });
            }
            if !labels[e.0].is_identity() {
                return Err(Error::InvalidParameter(format!(
                    "flat edge {e} does not carry the identity"
                )));
            }
            flat[e.0] = true;
        }
        if flat_set_has_cycle(g, &flat) {
            return Err(Error::InvalidParameter(
                "flat edge set contains a cycle".into(),
            ));
        }
        Ok(LiftAssignment {
            base: g.clone(),
            degree: n,
            labels,
            flat,
        })
    }

    pub fn base(&self) -> &MultiGraph {
        &self.base
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn label(&self, e: EdgeId) -> &Permutation {
        &self.labels[e.0]
    }

    pub fn is_flat(&self, e: EdgeId) -> bool {
        self.flat[e.0]
    }

    pub fn flat_edges(&self) -> Vec<EdgeId> {
        (0..self.base.edge_count())
            .map(EdgeId)
            .filter(|e| self.flat[e.0])
            .collect()
    }

    /// Materializes the lifted graph: vertex `(v, i)` is flattened to
    /// `v*n + i`, and each base edge `(u, v)` with label `π` contributes
    /// the fiber edges `((u, i), (v, π(i)))` in fiber-index order. Loops
    /// are handled identically.
    pub fn build(&self) -> LiftedGraph {
        let n = self.degree;
        let mut edges = Vec::with_capacity(self.base.edge_count() * n);
        let mut base_edge = Vec::with_capacity(self.base.edge_count() * n);
        for (e, u, v) in self.base.edges() {
            let pi = &self.labels[e.0];
            for i in 0..n {
                edges.push((u.0 * n + i, v.0 * n + pi.apply(i)));
                base_edge.push(e);
            }
        }
        let graph = MultiGraph::new(self.base.vertex_count() * n, edges)
            .expect("lift vertices are in range by construction");
        LiftedGraph {
            graph,
            base_vertex_count: self.base.vertex_count(),
            fiber_size: n,
            base_edge,
        }
    }

    /// Walk product of `w`: the composite of edge labels along the walk,
    /// newest step composed on the left, inverse labels for backward
    /// steps. Lifting `w` from `(start, i)` ends at `(end, σ(i))` where σ
    /// is the returned permutation.
    pub fn walk_product(&self, w: &Walk) -> Result<Permutation> {
        self.check_walk(w)?;
        let mut acc = Permutation::identity(self.degree);
        for &(e, dir) in w.steps() {
            let label = &self.labels[e.0];
            acc = match dir {
                Direction::Forward => label.compose(&acc)?,
                Direction::Backward => label.inverse().compose(&acc)?,
            };
        }
        Ok(acc)
    }

    /// The walk-subgroup generators under spanning-tree flattening: the
    /// cycle-rank many non-tree labels. Errors unless the flat set is
    /// exactly a spanning tree edge set.
    pub fn walk_subgroup(&self) -> Result<GroupHandle> {
        let flat_count = self.flat.iter().filter(|&&f| f).count();
        if flat_count != self.base.vertex_count() - 1 {
            return Err(Error::NotSpanningTreeFlat(format!(
                "{} flat edges for {} vertices",
                flat_count,
                self.base.vertex_count()
            )));
        }
        if !flat_spans(&self.base, &self.flat) {
            return Err(Error::NotSpanningTreeFlat(
                "flat edges do not span the base".into(),
            ));
        }
        let gens = (0..self.base.edge_count())
            .filter(|&e| !self.flat[e])
            .map(|e| self.labels[e].clone())
            .collect();
        GroupHandle::new(self.degree, gens)
    }

    /// Closure of all walk products from every start vertex: BFS over
    /// `(current vertex, accumulated permutation)` states. Includes the
    /// identity (the empty walk).
    pub fn enumerate_walk_subset(&self, budget: u128) -> Result<Vec<Permutation>> {
        let mut seen: HashSet<(usize, Permutation)> = HashSet::new();
        let mut queue = VecDeque::new();
        for v in 0..self.base.vertex_count() {
            let state = (v, Permutation::identity(self.degree));
            if seen.insert(state.clone()) {
                queue.push_back(state);
            }
        }
        let push = |seen: &mut HashSet<(usize, Permutation)>,
                    queue: &mut VecDeque<(usize, Permutation)>,
                    next: (usize, Permutation)|
         -> Result<()> {
            if !seen.contains(&next) {
                if seen.len() as u128 >= budget {
                    return Err(Error::BudgetExceeded {
                        needed: seen.len() as u128 + 1,
                        budget,
                    });
                }
                seen.insert(next.clone());
                queue.push_back(next);
            }
            Ok(())
        };
        while let Some((v, acc)) = queue.pop_front() {
            for (e, t, h) in self.base.edges() {
                let label = &self.labels[e.0];
                if t.0 == v {
                    push(&mut seen, &mut queue, (h.0, label.compose(&acc)?))?;
                }
                if h.0 == v {
                    push(&mut seen, &mut queue, (t.0, label.inverse().compose(&acc)?))?;
                }
            }
        }
        let mut products: Vec<Permutation> = seen
            .into_iter()
            .map(|(_, p)| p)
            .collect::<HashSet<_>>()
            .into_iter()
            .collect();
        products.sort();
        Ok(products)
    }

    /// The unique preimage of `w` starting at fiber index `start_index`,
    /// as a walk on the built lift. Flat walks stay inside their section.
    pub fn lift_walk(&self, w: &Walk, start_index: usize) -> Result<Walk> {
        self.check_walk(w)?;
        if start_index >= self.degree {
            return Err(Error::OutOfRange {
                point: start_index,
                bound: self.degree,
            });
        }
        let n = self.degree;
        let mut idx = start_index;
        let mut steps = Vec::with_capacity(w.len());
        for &(e, dir) in w.steps() {
            let label = &self.labels[e.0];
            let member = match dir {
                Direction::Forward => idx,
                Direction::Backward => label.inverse().apply(idx),
            };
            steps.push((EdgeId(e.0 * n + member), dir));
            idx = match dir {
                Direction::Forward => label.apply(idx),
                Direction::Backward => member,
            };
        }
        let lifted = self.build();
        Walk::new(
            lifted.graph(),
            VertexId(w.start().0 * n + start_index),
            steps,
        )
    }

    /// Dump format: a base graph reference line, the degree, the flat
    /// edge ids, then one label line per edge. Sufficient to replay any
    /// experiment instance.
    pub fn write_dump(&self, base_ref: &str) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "base {base_ref}");
        let _ = writeln!(out, "degree {}", self.degree);
        let flats: Vec<String> = self.flat_edges().iter().map(|e| e.0.to_string()).collect();
        let _ = writeln!(out, "flat {}", flats.join(" "));
        for (e, p) in self.labels.iter().enumerate() {
            let _ = writeln!(out, "{e} {p}");
        }
        out
    }

    /// Parses [`write_dump`] output against a resolved base graph.
    /// Returns the base reference string and the assignment.
    ///
    /// [`write_dump`]: LiftAssignment::write_dump
    pub fn read_dump(text: &str, base: &MultiGraph) -> Result<(String, LiftAssignment)> {
        let mut lines = text.lines();
        let base_ref = lines
            .next()
            .and_then(|l| l.strip_prefix("base "))
            .ok_or_else(|| Error::Parse("missing `base` line".into()))?
            .to_string();
        let degree: usize = lines
            .next()
            .and_then(|l| l.strip_prefix("degree "))
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse("missing `degree` line".into()))?;
        let flat_line = lines
            .next()
            .and_then(|l| l.strip_prefix("flat "))
            .ok_or_else(|| Error::Parse("missing `flat` line".into()))?;
        let flat_set = flat_line
            .split_whitespace()
            .map(|s| {
                s.parse::<usize>()
                    .map(EdgeId)
                    .map_err(|_| Error::Parse(format!("bad flat edge id {s:?}")))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut labels = vec![None; base.edge_count()];
        for line in lines {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let (idx, rest) = line
                .split_once(' ')
                .ok_or_else(|| Error::Parse(format!("bad label line {line:?}")))?;
            let e: usize = idx
                .parse()
                .map_err(|_| Error::Parse(format!("bad edge id {idx:?}")))?;
            let images = rest
                .trim()
                .trim_start_matches('[')
                .trim_end_matches(']')
                .split_whitespace()
                .map(|s| {
                    s.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad image {s:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            if e >= base.edge_count() {
                return Err(Error::OutOfRange {
                    point: e,
                    bound: base.edge_count(),
                });
            }
            labels[e] = Some(Permutation::from_images(images)?);
        }
        let labels = labels
            .into_iter()
            .enumerate()
            .map(|(e, p)| p.ok_or_else(|| Error::Parse(format!("missing label for edge {e}"))))
            .collect::<Result<Vec<_>>>()?;
        let assignment = LiftAssignment::from_labels(base, degree, labels, &flat_set)?;
        Ok((base_ref, assignment))
    }

    fn check_walk(&self, w: &Walk) -> Result<()> {
        // Re-validate against our own base; a Walk from a different graph
        // is rejected rather than silently reinterpreted.
        Walk::new(&self.base, w.start(), w.steps().to_vec()).map(|_| ())
    }
}

/// A built lift. Vertices are `(base vertex, fiber index)` pairs flattened
/// to `v * fiber_size + i`; each lifted edge knows its base edge.
#[derive(Debug, Clone)]
pub struct LiftedGraph {
    graph: MultiGraph,
    base_vertex_count: usize,
    fiber_size: usize,
    base_edge: Vec<EdgeId>,
}

impl LiftedGraph {
    pub fn graph(&self) -> &MultiGraph {
        &self.graph
    }

    pub fn fiber_size(&self) -> usize {
        self.fiber_size
    }

    pub fn base_vertex_count(&self) -> usize {
        self.base_vertex_count
    }

    pub fn lifted_vertex(&self, v: VertexId, fiber_index: usize) -> VertexId {
        VertexId(v.0 * self.fiber_size + fiber_index)
    }

    /// `(base vertex, fiber index)` of a lifted vertex.
    pub fn project_vertex(&self, v: VertexId) -> (VertexId, usize) {
        (VertexId(v.0 / self.fiber_size), v.0 % self.fiber_size)
    }

    pub fn base_edge(&self, e: EdgeId) -> EdgeId {
        self.base_edge[e.0]
    }

    /// The lifted vertices over a base vertex.
    pub fn vertex_fiber(&self, v: VertexId) -> Vec<VertexId> {
        (0..self.fiber_size)
            .map(|i| self.lifted_vertex(v, i))
            .collect()
    }

    /// The lifted edges over a base edge.
    pub fn edge_fiber(&self, e: EdgeId) -> Vec<EdgeId> {
        (0..self.graph.edge_count())
            .map(EdgeId)
            .filter(|&le| self.base_edge[le.0] == e)
            .collect()
    }
}

/// An iterated lift assignment: one wreath element per base edge over a
/// degree signature `(n_1, …, n_k)`, flat edges carrying the identity.
/// Stored in the canonical per-edge form; stage-by-stage composition is a
/// derived, tested equivalence rather than the representation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IteratedLiftAssignment {
    base: MultiGraph,
    signature: Vec<usize>,
    labels: Vec<WreathElement>,
    flat: Vec<bool>,
}

impl IteratedLiftAssignment {
    /// Samples a uniform flattened iterated assignment.
    pub fn random<R: Rng + ?Sized>(
        g: &MultiGraph,
        signature: &[usize],
        rng: &mut R,
    ) -> Result<Self> {
        let tree = spanning_tree(g)?;
        let identity = WreathElement::identity(signature)?;
        let labels = (0..g.edge_count())
            .map(|e| {
                if tree.contains(EdgeId(e)) {
                    Ok(identity.clone())
                } else {
                    WreathElement::random(signature, rng)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        let flat = (0..g.edge_count())
            .map(|e| tree.contains(EdgeId(e)))
            .collect();
        Ok(IteratedLiftAssignment {
            base: g.clone(),
            signature: signature.to_vec(),
            labels,
            flat,
        })
    }

    /// Builds an assignment from explicit wreath labels with the spanning
    /// tree flat.
    pub fn from_labels(
        g: &MultiGraph,
        signature: &[usize],
        labels: Vec<WreathElement>,
    ) -> Result<Self> {
        if labels.len() != g.edge_count() {
            return Err(Error::InvalidParameter(format!(
                "expected {} labels, got {}",
                g.edge_count(),
                labels.len()
            )));
        }
        let tree = spanning_tree(g)?;
        for (e, w) in labels.iter().enumerate() {
            if w.signature() != signature {
                return Err(Error::SignatureMismatch {
                    left: signature.to_vec(),
                    right: w.signature(),
                });
            }
            if tree.contains(EdgeId(e)) && !w.is_identity() {
                return Err(Error::InvalidParameter(format!(
                    "flat edge {e} does not carry the identity"
                )));
            }
        }
        let flat = (0..g.edge_count())
            .map(|e| tree.contains(EdgeId(e)))
            .collect();
        Ok(IteratedLiftAssignment {
            base: g.clone(),
            signature: signature.to_vec(),
            labels,
            flat,
        })
    }

    pub fn base(&self) -> &MultiGraph {
        &self.base
    }

    pub fn signature(&self) -> &[usize] {
        &self.signature
    }

    pub fn label(&self, e: EdgeId) -> &WreathElement {
        &self.labels[e.0]
    }

    /// Total fiber size `n_1 ⋯ n_k`.
    pub fn total_degree(&self) -> usize {
        self.signature.iter().product()
    }

    /// The plain assignment over the flattened product domain induced by
    /// the faithful wreath action.
    pub fn to_flat_assignment(&self) -> LiftAssignment {
        let n = self.total_degree();
        let labels: Vec<Permutation> = self.labels.iter().map(|w| w.to_permutation()).collect();
        let flat_set: Vec<EdgeId> = (0..self.base.edge_count())
            .map(EdgeId)
            .filter(|e| self.flat[e.0])
            .collect();
        LiftAssignment::from_labels(&self.base, n, labels, &flat_set)
            .expect("wreath labels induce a valid assignment")
    }

    /// Builds the iterated lift: `(u, p)` connects to `(v, w(p))` for each
    /// base edge with label `w` and each product-domain point `p`.
    pub fn build(&self) -> LiftedGraph {
        self.to_flat_assignment().build()
    }

    /// Walk-subgroup generators as permutations of the product domain.
    pub fn walk_subgroup(&self) -> Result<GroupHandle> {
        self.to_flat_assignment().walk_subgroup()
    }
}

fn flat_set_has_cycle(g: &MultiGraph, flat: &[bool]) -> bool {
    let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    for (e, t, h) in g.edges() {
        if !flat[e.0] {
            continue;
        }
        let (a, b) = (find(&mut parent, t.0), find(&mut parent, h.0));
        if a == b {
            return true;
        }
        parent[a] = b;
    }
    false
}

fn flat_spans(g: &MultiGraph, flat: &[bool]) -> bool {
    let mut parent: Vec<usize> = (0..g.vertex_count()).collect();
    fn find(parent: &mut [usize], mut x: usize) -> usize {
        while parent[x] != x {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        x
    }
    let mut merges = 0;
    for (e, t, h) in g.edges() {
        if !flat[e.0] {
            continue;
        }
        let (a, b) = (find(&mut parent, t.0), find(&mut parent, h.0));
        if a != b {
            parent[a] = b;
            merges += 1;
        }
    }
    merges == g.vertex_count() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{bouquet, cycle, path, theta};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    #[test]
    fn tree_base_lift_is_disjoint_copies() {
        let g = path(4).unwrap();
        let a = LiftAssignment::random(&g, 3, &mut rng(0)).unwrap();
        assert!((0..g.edge_count()).all(|e| a.label(EdgeId(e)).is_identity()));
        let lifted = a.build();
        assert_eq!(lifted.graph().components().len(), 3);
        assert_eq!(lifted.graph().vertex_count(), 12);
    }

    #[test]
    fn bouquet_with_cycle_label_lifts_to_cycle() {
        let g = bouquet(1).unwrap();
        let n = 5;
        let shift = Permutation::from_images((0..n).map(|i| (i + 1) % n).collect()).unwrap();
        let a = LiftAssignment::from_labels(&g, n, vec![shift], &[]).unwrap();
        let lifted = a.build();
        assert!(lifted.graph().is_connected());
        assert_eq!(lifted.graph().edge_count(), n);
        assert!((0..n).all(|v| lifted.graph().degree(VertexId(v)) == 2));
    }

    #[test]
    fn label_distribution_is_uniform() {
        // Cycle base has one non-tree edge; at n = 3 each of the 6 labels
        // should appear with frequency 1/6 within 3 sigma over 1e5 draws.
        let g = cycle(3).unwrap();
        let mut r = rng(17);
        let all = crate::perm::all_permutations(3, 1 << 20).unwrap();
        let mut counts = vec![0u64; all.len()];
        let trials = 100_000;
        for _ in 0..trials {
            let a = LiftAssignment::random(&g, 3, &mut r).unwrap();
            let label = a.label(EdgeId(2));
            let idx = all.iter().position(|p| p == label).unwrap();
            counts[idx] += 1;
        }
        let p = 1.0 / 6.0;
        let sigma = (trials as f64 * p * (1.0 - p)).sqrt();
        for &c in &counts {
            assert!((c as f64 - trials as f64 * p).abs() < 3.0 * sigma);
        }
    }

    #[test]
    fn covering_property_on_random_instances() {
        let mut r = rng(23);
        let bases = [
            cycle(4).unwrap(),
            theta(),
            bouquet(2).unwrap(),
            path(3).unwrap(),
        ];
        for trial in 0..100 {
            let g = &bases[trial % bases.len()];
            let n = 1 + (trial % 6);
            let a = LiftAssignment::random(g, n, &mut r).unwrap();
            let lifted = a.build();
            for v in 0..g.vertex_count() {
                assert_eq!(lifted.vertex_fiber(VertexId(v)).len(), n);
                for i in 0..n {
                    let lv = lifted.lifted_vertex(VertexId(v), i);
                    assert_eq!(
                        lifted.graph().degree(lv),
                        g.degree(VertexId(v)),
                        "degree preserved"
                    );
                }
            }
            for e in 0..g.edge_count() {
                let fiber = lifted.edge_fiber(EdgeId(e));
                assert_eq!(fiber.len(), n);
                for le in fiber {
                    assert_eq!(lifted.base_edge(le), EdgeId(e));
                }
            }
        }
    }

    #[test]
    fn degree_one_lift_is_the_base() {
        let g = theta();
        let a = LiftAssignment::random(&g, 1, &mut rng(4)).unwrap();
        let lifted = a.build();
        assert_eq!(lifted.graph().vertex_count(), g.vertex_count());
        assert_eq!(lifted.graph().edge_count(), g.edge_count());
        assert!(lifted.graph().is_connected());
    }

    #[test]
    fn walk_product_of_flat_walk_is_identity() {
        let g = path(4).unwrap();
        let a = LiftAssignment::random(&g, 4, &mut rng(1)).unwrap();
        let w = Walk::new(
            &g,
            VertexId(0),
            vec![
                (EdgeId(0), Direction::Forward),
                (EdgeId(1), Direction::Forward),
                (EdgeId(2), Direction::Forward),
                (EdgeId(2), Direction::Backward),
            ],
        )
        .unwrap();
        assert!(a.walk_product(&w).unwrap().is_identity());
    }

    #[test]
    fn forward_then_backward_cancels() {
        let g = cycle(3).unwrap();
        let a = LiftAssignment::random(&g, 5, &mut rng(2)).unwrap();
        let w = Walk::new(
            &g,
            VertexId(2),
            vec![
                (EdgeId(2), Direction::Forward),
                (EdgeId(2), Direction::Backward),
            ],
        )
        .unwrap();
        assert!(a.walk_product(&w).unwrap().is_identity());
    }

    #[test]
    fn walk_validation_rejects_broken_chains() {
        let g = cycle(3).unwrap();
        assert!(Walk::new(&g, VertexId(0), vec![(EdgeId(1), Direction::Forward)]).is_err());
        assert!(Walk::new(&g, VertexId(9), vec![]).is_err());
    }

    #[test]
    fn lift_walk_endpoint_matches_walk_product() {
        // Random walks on the bouquet of two loops: the endpoint fiber
        // index of the lifted walk must equal the walk product image.
        let g = bouquet(2).unwrap();
        let mut r = rng(31);
        for _ in 0..1_000 {
            let n = 2 + (r.random_range(0..5usize));
            let a = LiftAssignment::random(&g, n, &mut r).unwrap();
            let len = r.random_range(1..8usize);
            let steps: Vec<(EdgeId, Direction)> = (0..len)
                .map(|_| {
                    let e = EdgeId(r.random_range(0..2usize));
                    let dir = if r.random_range(0..2u8) == 0 {
                        Direction::Forward
                    } else {
                        Direction::Backward
                    };
                    (e, dir)
                })
                .collect();
            let w = Walk::new(&g, VertexId(0), steps).unwrap();
            let sigma = a.walk_product(&w).unwrap();
            let start = r.random_range(0..n);
            let lifted_walk = a.lift_walk(&w, start).unwrap();
            let lifted = a.build();
            assert_eq!(
                lifted_walk.start(),
                lifted.lifted_vertex(VertexId(0), start)
            );
            let (bv, idx) = lifted.project_vertex(lifted_walk.end());
            assert_eq!(bv, w.end());
            assert_eq!(idx, sigma.apply(start));
        }
    }

    #[test]
    fn flat_walks_stay_in_their_section() {
        let g = path(4).unwrap();
        let a = LiftAssignment::random(&g, 3, &mut rng(5)).unwrap();
        let w = Walk::new(
            &g,
            VertexId(0),
            vec![
                (EdgeId(0), Direction::Forward),
                (EdgeId(1), Direction::Forward),
            ],
        )
        .unwrap();
        for i in 0..3 {
            let lw = a.lift_walk(&w, i).unwrap();
            let lifted = a.build();
            let (_, end_idx) = lifted.project_vertex(lw.end());
            assert_eq!(end_idx, i, "flat walk leaves section {i}");
        }
    }

    #[test]
    fn flat_sublift_is_disjoint_tree_copies() {
        // Keeping only lifted edges over flat base edges leaves n
        // components, one spanning tree per section.
        let mut r = rng(15);
        for g in [crate::graph::barbell(3).unwrap(), theta(), cycle(4).unwrap()] {
            for n in 2..=4 {
                let a = LiftAssignment::random(&g, n, &mut r).unwrap();
                let lifted = a.build();
                let flat_edges: Vec<(usize, usize)> = (0..lifted.graph().edge_count())
                    .map(EdgeId)
                    .filter(|&le| a.is_flat(lifted.base_edge(le)))
                    .map(|le| {
                        let (t, h) = lifted.graph().endpoints(le);
                        (t.0, h.0)
                    })
                    .collect();
                assert_eq!(flat_edges.len(), n * (g.vertex_count() - 1));
                let sublift =
                    MultiGraph::new(lifted.graph().vertex_count(), flat_edges).unwrap();
                let comps = sublift.components();
                assert_eq!(comps.len(), n);
                for comp in comps {
                    assert_eq!(comp.len(), g.vertex_count());
                    // Every vertex of the component shares one fiber index.
                    let (_, idx) = lifted.project_vertex(VertexId(comp[0]));
                    assert!(comp
                        .iter()
                        .all(|&v| lifted.project_vertex(VertexId(v)).1 == idx));
                }
            }
        }
    }

    #[test]
    fn trail_lifts_are_pairwise_edge_disjoint() {
        // A walk that repeats no base edge lifts to n pairwise
        // edge-disjoint walks.
        let g = theta();
        let mut r = rng(6);
        for n in 2..=6 {
            let a = LiftAssignment::random(&g, n, &mut r).unwrap();
            let w = Walk::new(
                &g,
                VertexId(0),
                vec![
                    (EdgeId(0), Direction::Forward),
                    (EdgeId(1), Direction::Backward),
                    (EdgeId(2), Direction::Forward),
                ],
            )
            .unwrap();
            let mut edge_sets: Vec<HashSet<EdgeId>> = Vec::new();
            for i in 0..n {
                let lw = a.lift_walk(&w, i).unwrap();
                edge_sets.push(lw.steps().iter().map(|&(e, _)| e).collect());
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    assert!(
                        edge_sets[i].is_disjoint(&edge_sets[j]),
                        "lifts {i} and {j} share an edge"
                    );
                }
            }
        }
    }

    #[test]
    fn walk_subgroup_generators_are_non_tree_labels() {
        let mut r = rng(7);

        let tree = path(5).unwrap();
        let a = LiftAssignment::random(&tree, 4, &mut r).unwrap();
        assert!(a.walk_subgroup().unwrap().generators().is_empty());

        let g = bouquet(3).unwrap();
        let a = LiftAssignment::random(&g, 4, &mut r).unwrap();
        let h = a.walk_subgroup().unwrap();
        assert_eq!(h.generators().len(), 3);
        for e in 0..3 {
            assert!(h.generators().contains(a.label(EdgeId(e))));
        }

        let c = cycle(4).unwrap();
        let a = LiftAssignment::random(&c, 4, &mut r).unwrap();
        let h = a.walk_subgroup().unwrap();
        assert_eq!(h.generators().len(), 1);
        assert_eq!(&h.generators()[0], a.label(EdgeId(3)));
    }

    #[test]
    fn walk_subgroup_requires_spanning_tree_flat() {
        let g = theta();
        let labels = vec![
            Permutation::identity(2),
            Permutation::identity(2),
            Permutation::identity(2),
        ];
        // No flat edges at all: not a spanning tree edge set.
        let a = LiftAssignment::from_labels(&g, 2, labels, &[]).unwrap();
        assert!(matches!(
            a.walk_subgroup(),
            Err(Error::NotSpanningTreeFlat(_))
        ));
    }

    #[test]
    fn walk_subset_of_identity_assignment_is_trivial() {
        let g = theta();
        let labels = vec![Permutation::identity(3); 3];
        let a = LiftAssignment::from_labels(&g, 3, labels, &[EdgeId(0)]).unwrap();
        let subset = a.enumerate_walk_subset(1 << 20).unwrap();
        assert_eq!(subset, vec![Permutation::identity(3)]);
    }

    #[test]
    fn walk_subset_closure_equals_generated_subgroup() {
        // Under spanning-tree flattening the walk-subset is the whole
        // generated subgroup; compare with exhaustive closure at n <= 5.
        use std::collections::HashSet;
        let mut r = rng(8);
        for g in [
            theta(),
            cycle(3).unwrap(),
            bouquet(2).unwrap(),
            dumbbell_graph(),
        ] {
            for n in 2..=4 {
                let a = LiftAssignment::random(&g, n, &mut r).unwrap();
                let subset: HashSet<Permutation> = a
                    .enumerate_walk_subset(1 << 22)
                    .unwrap()
                    .into_iter()
                    .collect();
                let closure = subgroup_closure(a.walk_subgroup().unwrap().generators(), n);
                assert_eq!(subset, closure);
            }
        }
    }

    fn dumbbell_graph() -> MultiGraph {
        crate::graph::dumbbell()
    }

    fn subgroup_closure(gens: &[Permutation], n: usize) -> HashSet<Permutation> {
        let mut set = HashSet::new();
        set.insert(Permutation::identity(n));
        let mut frontier = vec![Permutation::identity(n)];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = g.compose(&x).unwrap();
                if set.insert(y.clone()) {
                    frontier.push(y);
                }
            }
        }
        set
    }

    #[test]
    fn walk_subset_of_labeled_path_is_contiguous_products() {
        // Path with arbitrary labels g_1..g_m (no flattening): the walk
        // subset is exactly the contiguous products, their inverses, and
        // the identity.
        let g = path(4).unwrap();
        let mut r = rng(9);
        let labels: Vec<Permutation> = (0..3).map(|_| Permutation::random(3, &mut r)).collect();
        let a = LiftAssignment::from_labels(&g, 3, labels.clone(), &[]).unwrap();
        let got: HashSet<Permutation> = a
            .enumerate_walk_subset(1 << 20)
            .unwrap()
            .into_iter()
            .collect();

        let mut expect: HashSet<Permutation> = HashSet::new();
        expect.insert(Permutation::identity(3));
        for lo in 0..3 {
            for hi in lo..3 {
                // Walk forward over edges lo..=hi: newest step on the left.
                let mut prod = Permutation::identity(3);
                for label in &labels[lo..=hi] {
                    prod = label.compose(&prod).unwrap();
                }
                expect.insert(prod.inverse());
                expect.insert(prod);
            }
        }
        assert_eq!(got, expect);
    }

    #[test]
    fn walk_subset_budget() {
        let g = bouquet(2).unwrap();
        let mut r = rng(10);
        let a = LiftAssignment::random(&g, 5, &mut r).unwrap();
        assert!(matches!(
            a.enumerate_walk_subset(3),
            Err(Error::BudgetExceeded { .. })
        ));
    }

    #[test]
    fn iterated_lift_fiber_sizes() {
        let g = cycle(3).unwrap();
        let a = IteratedLiftAssignment::random(&g, &[2, 3], &mut rng(11)).unwrap();
        assert_eq!(a.total_degree(), 6);
        let lifted = a.build();
        assert_eq!(lifted.graph().vertex_count(), 18);
        assert_eq!(lifted.fiber_size(), 6);
        for v in 0..3 {
            assert_eq!(lifted.vertex_fiber(VertexId(v)).len(), 6);
        }
    }

    #[test]
    fn iterated_depth_one_matches_plain_lift() {
        // Signature (n) of length 1 is a plain lift; with the same RNG
        // stream both constructions yield the same labels.
        let g = cycle(3).unwrap();
        let plain = LiftAssignment::random(&g, 4, &mut rng(12)).unwrap();
        let iter = IteratedLiftAssignment::random(&g, &[4], &mut rng(12)).unwrap();
        let flat = iter.to_flat_assignment();
        assert_eq!(plain, flat);
    }

    #[test]
    fn dump_round_trips() {
        let g = theta();
        let a = LiftAssignment::random(&g, 3, &mut rng(13)).unwrap();
        let text = a.write_dump("theta");
        let (base_ref, back) = LiftAssignment::read_dump(&text, &g).unwrap();
        assert_eq!(base_ref, "theta");
        assert_eq!(a, back);
    }

    #[test]
    fn from_labels_validates_flat_set() {
        let g = cycle(3).unwrap();
        let labels = vec![Permutation::identity(2); 3];
        // All three edges flat would contain the cycle.
        assert!(LiftAssignment::from_labels(
            &g,
            2,
            labels.clone(),
            &[EdgeId(0), EdgeId(1), EdgeId(2)]
        )
        .is_err());
        // Non-identity on a flat edge.
        let mut bad = labels.clone();
        bad[0] = Permutation::from_cycles(2, &[&[0, 1]]).unwrap();
        assert!(LiftAssignment::from_labels(&g, 2, bad, &[EdgeId(0)]).is_err());
        assert!(LiftAssignment::from_labels(&g, 2, labels, &[EdgeId(0), EdgeId(1)]).is_ok());
    }

    #[test]
    fn betti_zero_base_gives_degree_many_components() {
        let g = path(3).unwrap();
        assert_eq!(crate::graph::betti_number(&g).unwrap(), 0);
        for n in 2..=4 {
            let a = LiftAssignment::random(&g, n, &mut rng(14)).unwrap();
            assert_eq!(a.build().graph().components().len(), n);
        }
    }
}
