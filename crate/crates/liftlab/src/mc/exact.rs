//! Exact small-case probabilities by exhaustive enumeration and by the
//! orbit-of-a-point recursion, plus enumeration drivers over all flattened
//! lift assignments.
//!
//! The two routes to the transitive-generation probability are independent
//! and must agree wherever both run; tests and the acceptance suite hold
//! them to that.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::graph::{spanning_tree, EdgeId, MultiGraph};
use crate::group::GroupHandle;
use crate::lift::{IteratedLiftAssignment, LiftAssignment};
use crate::perm::{all_permutations, factorial, Permutation};
use crate::wreath::{enumerate_all, wreath_orbit_transitive, wreath_order, WreathElement};
use crate::{Error, Result};

/// Ceiling on `(n!)^l` for the exhaustive tuple enumeration route.
pub const ENUMERATION_BUDGET: u128 = 10_000_000;

/// Largest degree served by the orbit recursion route.
pub const RECURSION_MAX_DEGREE: usize = 8;

/// Probability that `l` independent uniform permutations of degree `n`
/// generate a transitive subgroup. Routes to the recursion for `n <= 8`
/// and otherwise to exhaustive enumeration when `(n!)^l` fits the budget.
pub fn exact_transitive_probability(n: usize, l: usize) -> Result<BigRational> {
    if n == 0 {
        return Err(Error::InvalidParameter("degree must be >= 1".into()));
    }
    if n <= RECURSION_MAX_DEGREE {
        return Ok(exact_transitive_probability_recursive(n, l));
    }
    exact_transitive_probability_enumeration(n, l)
}

/// Recursion over the orbit of point 0: conditioning on the orbit having
/// size r splits each generator into an r-block acting transitively and an
/// unconstrained complement block.
pub fn exact_transitive_probability_recursive(n: usize, l: usize) -> BigRational {
    let mut memo: Vec<Option<BigRational>> = vec![None; n + 1];
    p_transitive(n, l, &mut memo)
}

fn p_transitive(n: usize, l: usize, memo: &mut Vec<Option<BigRational>>) -> BigRational {
    if let Some(p) = &memo[n] {
        return p.clone();
    }
    let result = if n == 1 {
        BigRational::one()
    } else if l == 0 {
        // No generators: the trivial group is transitive only on a point.
        BigRational::zero()
    } else {
        let total = big_factorial(n).pow(l as u32);
        let mut sum = BigRational::zero();
        for r in 1..n {
            let ways = binomial(n - 1, r - 1);
            let blocks = (big_factorial(r) * big_factorial(n - r)).pow(l as u32);
            let weight = BigRational::new(ways * blocks, total.clone());
            sum += weight * p_transitive(r, l, memo);
        }
        BigRational::one() - sum
    };
    memo[n] = Some(result.clone());
    result
}

/// Exhaustive route: scan all `(n!)^l` generator tuples and count the
/// transitive ones.
pub fn exact_transitive_probability_enumeration(n: usize, l: usize) -> Result<BigRational> {
    let space = factorial(n).checked_pow(l as u32).unwrap_or(u128::MAX);
    if space > ENUMERATION_BUDGET {
        return Err(Error::BudgetExceeded {
            needed: space,
            budget: ENUMERATION_BUDGET,
        });
    }
    let perms = all_permutations(n, ENUMERATION_BUDGET)?;
    let mut transitive: u64 = 0;
    let mut total: u64 = 0;
    for_each_tuple(perms.len(), l, |picks| {
        total += 1;
        let gens: Vec<Permutation> = picks.iter().map(|&i| perms[i].clone()).collect();
        let h = GroupHandle::new(n, gens).expect("equal degrees");
        if h.is_transitive() {
            transitive += 1;
        }
    });
    Ok(BigRational::new(
        BigInt::from(transitive),
        BigInt::from(total),
    ))
}

/// Upper bound `sum over 1 <= r <= n/2 of C(n, r)^(1-l)` on the
/// probability that `l` random permutations fail to generate a transitive
/// subgroup.
pub fn transitivity_failure_upper_bound(n: usize, l: usize) -> BigRational {
    assert!(l >= 1, "the bound needs at least one generator");
    let mut sum = BigRational::zero();
    for r in 1..=(n / 2) {
        let c = binomial(n, r);
        sum += BigRational::new(BigInt::one(), c.pow((l - 1) as u32));
    }
    sum
}

/// Calls `body` with every flattened assignment of degree-`n` labels to
/// the non-tree edges of `g` (tree edges identity). The number of
/// assignments is `(n!)^betti`, checked against `budget`.
pub fn for_each_assignment<F>(g: &MultiGraph, n: usize, budget: u128, mut body: F) -> Result<u64>
where
    F: FnMut(&LiftAssignment),
{
    let tree = spanning_tree(g)?;
    let free: Vec<EdgeId> = tree.non_tree_edges(g);
    let l = free.len();
    let space = factorial(n).checked_pow(l as u32).unwrap_or(u128::MAX);
    if space > budget {
        return Err(Error::BudgetExceeded {
            needed: space,
            budget,
        });
    }
    let perms = all_permutations(n, budget)?;
    let flat_set: Vec<EdgeId> = tree.tree_edges().to_vec();
    let mut count = 0u64;
    for_each_tuple(perms.len(), l, |picks| {
        let mut labels = vec![Permutation::identity(n); g.edge_count()];
        for (slot, &pi) in picks.iter().enumerate() {
            labels[free[slot].0] = perms[pi].clone();
        }
        let a = LiftAssignment::from_labels(g, n, labels, &flat_set)
            .expect("enumerated labels are valid");
        body(&a);
        count += 1;
    });
    Ok(count)
}

/// Calls `body` with every flattened iterated assignment over `signature`.
pub fn for_each_iterated_assignment<F>(
    g: &MultiGraph,
    signature: &[usize],
    budget: u128,
    mut body: F,
) -> Result<u64>
where
    F: FnMut(&IteratedLiftAssignment),
{
    let tree = spanning_tree(g)?;
    let free: Vec<EdgeId> = tree.non_tree_edges(g);
    let l = free.len();
    let order = wreath_order(signature);
    let space = order.checked_pow(l as u32).unwrap_or(u128::MAX);
    if space > budget {
        return Err(Error::BudgetExceeded {
            needed: space,
            budget,
        });
    }
    let elements = enumerate_all(signature, budget)?;
    let identity = WreathElement::identity(signature)?;
    let mut count = 0u64;
    for_each_tuple(elements.len(), l, |picks| {
        let mut labels = vec![identity.clone(); g.edge_count()];
        for (slot, &wi) in picks.iter().enumerate() {
            labels[free[slot].0] = elements[wi].clone();
        }
        let a = IteratedLiftAssignment::from_labels(g, signature, labels)
            .expect("enumerated labels are valid");
        body(&a);
        count += 1;
    });
    Ok(count)
}

/// Exact probability that a flattened random `n`-lift of `g` is connected,
/// by building every assignment. This is the graph-side route; it never
/// consults the walk-subgroup.
pub fn exact_lift_connectivity_probability(
    g: &MultiGraph,
    n: usize,
    budget: u128,
) -> Result<BigRational> {
    let mut connected = 0u64;
    let total = for_each_assignment(g, n, budget, |a| {
        if a.build().graph().is_connected() {
            connected += 1;
        }
    })?;
    Ok(BigRational::new(
        BigInt::from(connected),
        BigInt::from(total),
    ))
}

/// Exact probability that a flattened iterated random lift of `g` over
/// `signature` is connected.
pub fn exact_iterated_connectivity_probability(
    g: &MultiGraph,
    signature: &[usize],
    budget: u128,
) -> Result<BigRational> {
    let mut connected = 0u64;
    let total = for_each_iterated_assignment(g, signature, budget, |a| {
        if a.build().graph().is_connected() {
            connected += 1;
        }
    })?;
    Ok(BigRational::new(
        BigInt::from(connected),
        BigInt::from(total),
    ))
}

/// Exact probability that `l` uniform wreath elements over `signature` act
/// transitively on the product domain, by scanning all `|W|^l` tuples.
pub fn exact_wreath_transitive_probability(
    signature: &[usize],
    l: usize,
    budget: u128,
) -> Result<BigRational> {
    let order = wreath_order(signature);
    let space = order.checked_pow(l as u32).unwrap_or(u128::MAX);
    if space > budget {
        return Err(Error::BudgetExceeded {
            needed: space,
            budget,
        });
    }
    let elements = enumerate_all(signature, budget)?;
    let mut transitive = 0u64;
    let mut total = 0u64;
    let mut err = None;
    for_each_tuple(elements.len(), l, |picks| {
        if err.is_some() {
            return;
        }
        let gens: Vec<WreathElement> = picks.iter().map(|&i| elements[i].clone()).collect();
        match wreath_orbit_transitive(&gens, budget) {
            Ok(true) => transitive += 1,
            Ok(false) => {}
            Err(e) => err = Some(e),
        }
        total += 1;
    });
    if let Some(e) = err {
        return Err(e);
    }
    Ok(BigRational::new(
        BigInt::from(transitive),
        BigInt::from(total),
    ))
}

/// Stagewise product law for iterated transitivity: stage i of an
/// l-generator signature `(n_1, …, n_k)` contributes the exact transitive
/// probability at degree `n_i` with `(l-1) * n_1⋯n_{i-1} + 1` generators.
pub fn stagewise_transitive_product(signature: &[usize], l: usize) -> Result<BigRational> {
    if l == 0 {
        return Err(Error::InvalidParameter(
            "stagewise product needs l >= 1".into(),
        ));
    }
    let mut product = BigRational::one();
    let mut carried: usize = 1;
    for &n_i in signature {
        let stage_l = (l - 1) * carried + 1;
        product *= exact_transitive_probability(n_i, stage_l)?;
        carried *= n_i;
    }
    Ok(product)
}

fn big_factorial(n: usize) -> BigInt {
    (1..=n as u64).map(BigInt::from).product()
}

fn binomial(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let mut out = BigInt::one();
    for i in 0..k {
        out = out * BigInt::from((n - i) as u64) / BigInt::from((i + 1) as u64);
    }
    out
}

/// Odometer over `slots` positions each ranging over `0..choices`.
/// Calls `body` exactly `choices^slots` times (once with the empty pick
/// when `slots == 0`).
fn for_each_tuple<F>(choices: usize, slots: usize, mut body: F)
where
    F: FnMut(&[usize]),
{
    let mut picks = vec![0usize; slots];
    loop {
        body(&picks);
        let mut slot = slots;
        loop {
            if slot == 0 {
                return;
            }
            slot -= 1;
            picks[slot] += 1;
            if picks[slot] < choices {
                break;
            }
            picks[slot] = 0;
        }
    }
}
