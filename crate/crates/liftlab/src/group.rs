//! Generated permutation groups: orbit partitions, transitivity, ordered
//! k-tuple orbits, exact group order via a stabilizer chain, and symmetric
//! or alternating group detection.

use std::collections::VecDeque;
use std::sync::OnceLock;

use num_bigint::BigUint;

use crate::perm::Permutation;
use crate::{Error, Result};

/// Largest degree for which we build stabilizer chains.
pub const MAX_CHAIN_DEGREE: usize = 64;

/// Default ceiling on the number of ordered k-tuples explored by
/// [`GroupHandle::is_k_transitive`].
pub const DEFAULT_TUPLE_BUDGET: u128 = 5_000_000;

/// Result of an ordered k-tuple orbit count.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TupleOrbitReport {
    pub k: usize,
    pub transitive_on_k_tuples: bool,
    pub orbit_count: usize,
}

/// A subgroup of S_n given by generators, with a lazily built stabilizer
/// chain for order queries. All queries after construction are read-only;
/// the handle is safe to share across threads.
#[derive(Debug)]
pub struct GroupHandle {
    degree: usize,
    generators: Vec<Permutation>,
    chain: OnceLock<StabilizerChain>,
}

impl GroupHandle {
    pub fn new(degree: usize, generators: Vec<Permutation>) -> Result<Self> {
        for g in &generators {
            if g.degree() != degree {
                return Err(Error::DegreeMismatch {
                    left: degree,
                    right: g.degree(),
                });
            }
        }
        Ok(GroupHandle {
            degree,
            generators,
            chain: OnceLock::new(),
        })
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn generators(&self) -> &[Permutation] {
        &self.generators
    }

    /// Orbit partition of `{0, …, n-1}` under the generated group, as
    /// sorted classes ordered by smallest member. Forward closure under
    /// the generators suffices: on a finite domain every generator maps
    /// each closed set onto itself.
    pub fn orbits(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.degree];
        let mut classes = Vec::new();
        for start in 0..self.degree {
            if seen[start] {
                continue;
            }
            let mut class = vec![start];
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(p) = queue.pop_front() {
                for g in &self.generators {
                    let q = g.apply(p);
                    if !seen[q] {
                        seen[q] = true;
                        class.push(q);
                        queue.push_back(q);
                    }
                }
            }
            class.sort_unstable();
            classes.push(class);
        }
        classes
    }

    /// True iff the orbit partition has exactly one class. Degree 0 and 1
    /// groups are trivially transitive.
    pub fn is_transitive(&self) -> bool {
        if self.degree <= 1 {
            return true;
        }
        let mut seen = vec![false; self.degree];
        seen[0] = true;
        let mut reached = 1;
        let mut stack = vec![0usize];
        while let Some(p) = stack.pop() {
            for g in &self.generators {
                let q = g.apply(p);
                if !seen[q] {
                    seen[q] = true;
                    reached += 1;
                    if reached == self.degree {
                        return true;
                    }
                    stack.push(q);
                }
            }
        }
        false
    }

    /// Orbit census on ordered k-tuples of distinct points, by explicit
    /// BFS with the default tuple budget.
    pub fn is_k_transitive(&self, k: usize) -> Result<TupleOrbitReport> {
        self.is_k_transitive_with_budget(k, DEFAULT_TUPLE_BUDGET)
    }

    /// As [`is_k_transitive`] with an explicit budget on the tuple domain
    /// size `n!/(n-k)!`.
    ///
    /// [`is_k_transitive`]: GroupHandle::is_k_transitive
    pub fn is_k_transitive_with_budget(&self, k: usize, budget: u128) -> Result<TupleOrbitReport> {
        let n = self.degree;
        if k == 0 || k > n {
            return Err(Error::InvalidParameter(format!(
                "k must satisfy 1 <= k <= degree; got k = {k}, degree = {n}"
            )));
        }
        let domain = falling_factorial(n, k);
        if domain > budget {
            return Err(Error::BudgetExceeded {
                needed: domain,
                budget,
            });
        }
        let domain = domain as usize;
        let mut seen = vec![false; domain];
        let mut orbit_count = 0;
        let mut tuple = vec![0usize; k];
        let mut image = vec![0usize; k];
        for start in 0..domain {
            if seen[start] {
                continue;
            }
            orbit_count += 1;
            seen[start] = true;
            let mut queue = VecDeque::from([start]);
            while let Some(code) = queue.pop_front() {
                decode_tuple(code, n, k, &mut tuple);
                for g in &self.generators {
                    for (slot, &p) in tuple.iter().enumerate() {
                        image[slot] = g.apply(p);
                    }
                    let next = encode_tuple(&image, n);
                    if !seen[next] {
                        seen[next] = true;
                        queue.push_back(next);
                    }
                }
            }
        }
        Ok(TupleOrbitReport {
            k,
            transitive_on_k_tuples: orbit_count == 1,
            orbit_count,
        })
    }

    /// Exact group order from the stabilizer chain.
    pub fn order(&self) -> BigUint {
        self.chain().order()
    }

    /// True iff the generated group is the full symmetric or alternating
    /// group: order in `{n!, n!/2}` and transitive. For degree <= 2 the
    /// order comparison alone decides (n!/2 degenerates there).
    pub fn is_sym_or_alt(&self) -> bool {
        let full = factorial_big(self.degree);
        let order = self.order();
        if self.degree <= 2 {
            return order == full;
        }
        (order == full || order == (&full / 2u32)) && self.is_transitive()
    }

    fn chain(&self) -> &StabilizerChain {
        self.chain.get_or_init(|| {
            assert!(
                self.degree <= MAX_CHAIN_DEGREE,
                "stabilizer chain limited to degree {MAX_CHAIN_DEGREE}"
            );
            StabilizerChain::build(self.degree, &self.generators)
        })
    }
}

pub fn factorial_big(n: usize) -> BigUint {
    (1..=n as u64).map(BigUint::from).product()
}

fn falling_factorial(n: usize, k: usize) -> u128 {
    let mut out: u128 = 1;
    for i in 0..k {
        out = out.saturating_mul((n - i) as u128);
    }
    out
}

/// Mixed-radix rank of an ordered tuple of distinct points: position j
/// contributes its rank among the points not used by positions < j.
fn encode_tuple(tuple: &[usize], n: usize) -> usize {
    let mut code = 0usize;
    for (j, &p) in tuple.iter().enumerate() {
        let rank = p - tuple[..j].iter().filter(|&&q| q < p).count();
        code = code * (n - j) + rank;
    }
    code
}

fn decode_tuple(mut code: usize, n: usize, k: usize, out: &mut [usize]) {
    let mut ranks = vec![0usize; k];
    for j in (0..k).rev() {
        ranks[j] = code % (n - j);
        code /= n - j;
    }
    let mut free: Vec<usize> = (0..n).collect();
    for j in 0..k {
        out[j] = free.remove(ranks[j]);
    }
}

/// Stabilizer chain (base, orbits, transversals) built by the classic
/// deterministic Schreier–Sims procedure: sift every Schreier generator,
/// insert nontrivial residues as strong generators, and repeat until all
/// levels verify.
#[derive(Debug)]
struct StabilizerChain {
    degree: usize,
    base: Vec<usize>,
    strong_gens: Vec<Permutation>,
    levels: Vec<Level>,
}

#[derive(Debug)]
struct Level {
    base_point: usize,
    /// Indices into `strong_gens` of generators fixing all earlier base
    /// points.
    gen_idx: Vec<usize>,
    /// `transversal[p]`, when present, maps the base point to `p`.
    transversal: Vec<Option<Permutation>>,
    orbit: Vec<usize>,
}

impl StabilizerChain {
    fn build(degree: usize, generators: &[Permutation]) -> StabilizerChain {
        let mut chain = StabilizerChain {
            degree,
            base: Vec::new(),
            strong_gens: Vec::new(),
            levels: Vec::new(),
        };
        for g in generators {
            if !g.is_identity() {
                chain.insert_strong_generator(g.clone());
            }
        }
        chain.rebuild_levels(0);
        // Verify levels deepest-first; every nontrivial sifted residue
        // becomes a strong generator and re-opens the levels it touches.
        let mut level = chain.levels.len();
        while level > 0 {
            level -= 1;
            if !chain.verify_level(level) {
                // A residue was inserted; deeper levels were rebuilt.
                // Restart verification from the deepest level.
                level = chain.levels.len();
            }
        }
        chain
    }

    fn order(&self) -> BigUint {
        self.levels
            .iter()
            .map(|lvl| BigUint::from(lvl.orbit.len()))
            .product()
    }

    /// Adds `g` to the strong generating set, extending the base so that
    /// no strong generator fixes every base point.
    fn insert_strong_generator(&mut self, g: Permutation) {
        if self.base.iter().all(|&b| g.apply(b) == b) {
            let moved = g
                .smallest_moved_point()
                .expect("identity is never inserted");
            self.base.push(moved);
        }
        self.strong_gens.push(g);
    }

    /// Recomputes generator assignment, orbits, and transversals for all
    /// levels at depth >= `from`.
    fn rebuild_levels(&mut self, from: usize) {
        self.levels.truncate(from);
        for depth in from..self.base.len() {
            let b = self.base[depth];
            let gen_idx: Vec<usize> = self
                .strong_gens
                .iter()
                .enumerate()
                .filter(|(_, g)| self.base[..depth].iter().all(|&p| g.apply(p) == p))
                .map(|(i, _)| i)
                .collect();
            let mut transversal: Vec<Option<Permutation>> = vec![None; self.degree];
            transversal[b] = Some(Permutation::identity(self.degree));
            let mut orbit = vec![b];
            let mut queue = VecDeque::from([b]);
            while let Some(p) = queue.pop_front() {
                for &gi in &gen_idx {
                    let g = &self.strong_gens[gi];
                    let q = g.apply(p);
                    if transversal[q].is_none() {
                        let rep = g
                            .compose(transversal[p].as_ref().unwrap())
                            .expect("equal degrees");
                        transversal[q] = Some(rep);
                        orbit.push(q);
                        queue.push_back(q);
                    }
                }
            }
            self.levels.push(Level {
                base_point: b,
                gen_idx,
                transversal,
                orbit,
            });
        }
    }

    /// Sifts every Schreier generator of `level` through the deeper
    /// levels. Returns true when all residues are trivial; otherwise
    /// inserts the first nontrivial residue and rebuilds from the level it
    /// extends.
    fn verify_level(&mut self, level: usize) -> bool {
        let orbit = self.levels[level].orbit.clone();
        let gen_idx = self.levels[level].gen_idx.clone();
        for &p in &orbit {
            for &gi in &gen_idx {
                let g = self.strong_gens[gi].clone();
                let t_p = self.levels[level].transversal[p]
                    .clone()
                    .expect("orbit point has a transversal");
                let q = g.apply(p);
                let t_q = self.levels[level].transversal[q]
                    .clone()
                    .expect("orbit is generator-closed");
                let schreier = t_q
                    .inverse()
                    .compose(&g.compose(&t_p).expect("equal degrees"))
                    .expect("equal degrees");
                if schreier.is_identity() {
                    continue;
                }
                let (_stuck, residue) = self.sift(level + 1, schreier);
                if !residue.is_identity() {
                    self.insert_strong_generator(residue);
                    // Rebuild everything so each level's generator list is
                    // exactly the strong generators fixing its prefix.
                    self.rebuild_levels(0);
                    return false;
                }
            }
        }
        true
    }

    /// Strips `h` through levels `from..`, multiplying by transversal
    /// inverses. Returns the level where stripping stalled together with
    /// the residue (identity iff fully stripped).
    fn sift(&self, from: usize, mut h: Permutation) -> (usize, Permutation) {
        for depth in from..self.levels.len() {
            if h.is_identity() {
                return (depth, h);
            }
            let lvl = &self.levels[depth];
            let p = h.apply(lvl.base_point);
            match &lvl.transversal[p] {
                None => return (depth, h),
                Some(t) => {
                    h = t.inverse().compose(&h).expect("equal degrees");
                }
            }
        }
        (self.levels.len(), h)
    }
}
