//! Seeded Monte Carlo harness.
//!
//! Every trial draws from its own RNG stream, keyed by the trial index off
//! the master seed (ChaCha streams), and reductions are order-independent
//! counts, so parallel execution is bitwise identical to serial and worker
//! count never alters results.

pub mod exact;
pub mod experiments;
pub mod formulas;
pub mod stats;

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::ToPrimitive;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::graph::{betti_number, MultiGraph};
use crate::group::{GroupHandle, DEFAULT_TUPLE_BUDGET};
use crate::lift::{IteratedLiftAssignment, LiftAssignment};
use crate::perm::{factorial, Permutation};
use crate::wreath::{wreath_orbit_transitive, WreathElement};
use crate::{Error, Result};

use formulas::FormulaBand;
use stats::{wilson_interval, Z_99};

/// RNG for one trial: the master seed keys the cipher, the trial index
/// selects the stream.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Runs `trials` Bernoulli trials and counts successes. Parallel when the
/// `parallel` feature is on; the result is identical either way.
pub fn run_trials<F>(trials: u64, seed: u64, event: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    #[cfg(feature = "parallel")]
    {
        run_trials_parallel(trials, seed, &event)
    }
    #[cfg(not(feature = "parallel"))]
    {
        run_trials_serial(trials, seed, &event)
    }
}

/// Sequential driver; always available, used by the fallback build and as
/// the reference side of the parallel-equivalence tests and benches.
pub fn run_trials_serial<F>(trials: u64, seed: u64, mut event: F) -> u64
where
    F: FnMut(&mut ChaCha8Rng) -> bool,
{
    let template = ChaCha8Rng::seed_from_u64(seed);
    let mut successes = 0;
    for t in 0..trials {
        let mut rng = template.clone();
        rng.set_stream(t);
        if event(&mut rng) {
            successes += 1;
        }
    }
    successes
}

/// Data-parallel driver over per-trial streams.
#[cfg(feature = "parallel")]
pub fn run_trials_parallel<F>(trials: u64, seed: u64, event: F) -> u64
where
    F: Fn(&mut ChaCha8Rng) -> bool + Sync,
{
    let template = ChaCha8Rng::seed_from_u64(seed);
    (0..trials)
        .into_par_iter()
        .map(|t| {
            let mut rng = template.clone();
            rng.set_stream(t);
            event(&mut rng) as u64
        })
        .sum()
}

/// Runs `trials` trials producing an ordered key each, and tallies counts.
/// Merging count maps is commutative, so the tally is order-independent.
pub fn run_trials_tally<K, F>(trials: u64, seed: u64, f: F) -> BTreeMap<K, u64>
where
    K: Ord + Send,
    F: Fn(&mut ChaCha8Rng) -> K + Sync,
{
    let template = ChaCha8Rng::seed_from_u64(seed);
    #[cfg(feature = "parallel")]
    {
        (0..trials)
            .into_par_iter()
            .fold(BTreeMap::new, |mut acc, t| {
                let mut rng = template.clone();
                rng.set_stream(t);
                *acc.entry(f(&mut rng)).or_insert(0) += 1;
                acc
            })
            .reduce(BTreeMap::new, |mut a, b| {
                for (k, v) in b {
                    *a.entry(k).or_insert(0) += v;
                }
                a
            })
    }
    #[cfg(not(feature = "parallel"))]
    {
        let mut acc = BTreeMap::new();
        for t in 0..trials {
            let mut rng = template.clone();
            rng.set_stream(t);
            *acc.entry(f(&mut rng)).or_insert(0) += 1;
        }
        acc
    }
}

/// Exact rational attached to an estimate, with a float rendering.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExactValue {
    pub numer: String,
    pub denom: String,
    pub value: f64,
}

impl ExactValue {
    pub fn from_rational(r: &BigRational) -> Self {
        ExactValue {
            numer: r.numer().to_string(),
            denom: r.denom().to_string(),
            value: r.to_f64().unwrap_or(f64::NAN),
        }
    }
}

/// A Monte Carlo estimate with its 99% Wilson interval and, when
/// available, the closed-form comparison value and the exact rational from
/// an enumeration oracle.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateResult {
    pub event: String,
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub formula: Option<FormulaBand>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactValue>,
}

impl EstimateResult {
    pub fn new(event: String, trials: u64, successes: u64) -> Self {
        let (ci_low, ci_high) = wilson_interval(successes, trials, Z_99);
        EstimateResult {
            event,
            trials,
            successes,
            p_hat: successes as f64 / trials as f64,
            ci_low,
            ci_high,
            formula: None,
            exact: None,
        }
    }

    pub fn with_formula(mut self, band: FormulaBand) -> Self {
        self.formula = Some(band);
        self
    }

    pub fn with_exact(mut self, exact: ExactValue) -> Self {
        self.exact = Some(exact);
        self
    }

    /// True when the Wilson interval contains `p`.
    pub fn ci_contains(&self, p: f64) -> bool {
        self.ci_low <= p && p <= self.ci_high
    }
}

/// Bernoulli event samplers: one sample per call from fresh randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "event", rename_all = "kebab-case")]
pub enum EventKind {
    /// A flattened random n-lift of the base graph is connected (graph
    /// route: build and BFS; never consults the walk-subgroup).
    LiftConnected { base: MultiGraph, n: usize },
    /// `l` uniform permutations of degree n generate a transitive group.
    Transitive { n: usize, l: usize },
    /// `l` uniform permutations generate the symmetric or alternating
    /// group.
    SymOrAlt { n: usize, l: usize },
    /// `l` uniform permutations generate a k-transitive group.
    KTransitive { n: usize, l: usize, k: usize },
    /// A flattened iterated random lift over the signature is connected.
    IteratedLiftConnected {
        base: MultiGraph,
        signature: Vec<usize>,
    },
    /// `l` uniform wreath elements act transitively on the product domain.
    WreathTransitive { signature: Vec<usize>, l: usize },
    /// A uniform permutation of degree n is odd (a fair coin at n = 2).
    OddParity { n: usize },
}

impl EventKind {
    pub fn name(&self) -> String {
        match self {
            EventKind::LiftConnected { n, .. } => format!("lift-connected(n={n})"),
            EventKind::Transitive { n, l } => format!("transitive(n={n},l={l})"),
            EventKind::SymOrAlt { n, l } => format!("sym-or-alt(n={n},l={l})"),
            EventKind::KTransitive { n, l, k } => {
                format!("k-transitive(n={n},l={l},k={k})")
            }
            EventKind::IteratedLiftConnected { signature, .. } => {
                format!("iterated-lift-connected(signature={signature:?})")
            }
            EventKind::WreathTransitive { signature, l } => {
                format!("wreath-transitive(signature={signature:?},l={l})")
            }
            EventKind::OddParity { n } => format!("odd-parity(n={n})"),
        }
    }

    /// Validates parameters and budgets up front so that sampling itself
    /// is infallible.
    pub fn validate(&self) -> Result<()> {
        match self {
            EventKind::LiftConnected { base, n } => {
                if *n == 0 {
                    return Err(Error::InvalidParameter("degree must be >= 1".into()));
                }
                betti_number(base).map(|_| ())
            }
            EventKind::Transitive { n, .. } | EventKind::SymOrAlt { n, .. } => {
                if *n == 0 {
                    return Err(Error::InvalidParameter("degree must be >= 1".into()));
                }
                Ok(())
            }
            EventKind::KTransitive { n, k, .. } => {
                if *n == 0 || *k == 0 || k > n {
                    return Err(Error::InvalidParameter(format!(
                        "need 1 <= k <= n; got k = {k}, n = {n}"
                    )));
                }
                let mut domain: u128 = 1;
                for i in 0..*k {
                    domain = domain.saturating_mul((*n - i) as u128);
                }
                if domain > DEFAULT_TUPLE_BUDGET {
                    return Err(Error::BudgetExceeded {
                        needed: domain,
                        budget: DEFAULT_TUPLE_BUDGET,
                    });
                }
                Ok(())
            }
            EventKind::IteratedLiftConnected { base, signature } => {
                if signature.is_empty() || signature.contains(&0) {
                    return Err(Error::InvalidParameter("bad signature".into()));
                }
                betti_number(base).map(|_| ())
            }
            EventKind::WreathTransitive { signature, l } => {
                if signature.is_empty() || signature.contains(&0) {
                    return Err(Error::InvalidParameter("bad signature".into()));
                }
                if *l == 0 {
                    return Err(Error::InvalidParameter("need l >= 1".into()));
                }
                let domain: u128 = signature.iter().map(|&x| x as u128).product();
                if domain > DEFAULT_TUPLE_BUDGET {
                    return Err(Error::BudgetExceeded {
                        needed: domain,
                        budget: DEFAULT_TUPLE_BUDGET,
                    });
                }
                Ok(())
            }
            EventKind::OddParity { n } => {
                if *n < 2 {
                    return Err(Error::InvalidParameter("parity needs n >= 2".into()));
                }
                Ok(())
            }
        }
    }

    /// Draws one Bernoulli sample. Call [`validate`] first; sampling
    /// assumes parameters are in budget.
    ///
    /// [`validate`]: EventKind::validate
    pub fn sample(&self, rng: &mut ChaCha8Rng) -> bool {
        match self {
            EventKind::LiftConnected { base, n } => {
                let a = LiftAssignment::random(base, *n, rng).expect("validated");
                a.build().graph().is_connected()
            }
            EventKind::Transitive { n, l } => {
                let gens: Vec<Permutation> =
                    (0..*l).map(|_| Permutation::random(*n, rng)).collect();
                GroupHandle::new(*n, gens)
                    .expect("equal degrees")
                    .is_transitive()
            }
            EventKind::SymOrAlt { n, l } => {
                let gens: Vec<Permutation> =
                    (0..*l).map(|_| Permutation::random(*n, rng)).collect();
                GroupHandle::new(*n, gens)
                    .expect("equal degrees")
                    .is_sym_or_alt()
            }
            EventKind::KTransitive { n, l, k } => {
                let gens: Vec<Permutation> =
                    (0..*l).map(|_| Permutation::random(*n, rng)).collect();
                GroupHandle::new(*n, gens)
                    .expect("equal degrees")
                    .is_k_transitive(*k)
                    .expect("budget validated")
                    .transitive_on_k_tuples
            }
            EventKind::IteratedLiftConnected { base, signature } => {
                let a = IteratedLiftAssignment::random(base, signature, rng).expect("validated");
                a.build().graph().is_connected()
            }
            EventKind::WreathTransitive { signature, l } => {
                let gens: Vec<WreathElement> = (0..*l)
                    .map(|_| WreathElement::random(signature, rng).expect("validated"))
                    .collect();
                wreath_orbit_transitive(&gens, DEFAULT_TUPLE_BUDGET).expect("budget validated")
            }
            EventKind::OddParity { n } => Permutation::random(*n, rng).is_odd(),
        }
    }
}

/// Estimates the event probability over `trials` seeded trials.
pub fn estimate(event: &EventKind, trials: u64, seed: u64) -> Result<EstimateResult> {
    if trials == 0 {
        return Err(Error::InvalidConfig("trials must be >= 1".into()));
    }
    event.validate()?;
    let successes = run_trials(trials, seed, |rng| event.sample(rng));
    Ok(EstimateResult::new(event.name(), trials, successes))
}

/// Attaches the exact transitive-probability oracle when the parameters
/// are in enumeration range; omits it otherwise.
pub fn try_exact_transitive(n: usize, l: usize) -> Option<ExactValue> {
    if n <= exact::RECURSION_MAX_DEGREE
        || factorial(n)
            .checked_pow(l as u32)
            .is_some_and(|s| s <= exact::ENUMERATION_BUDGET)
    {
        exact::exact_transitive_probability(n, l)
            .ok()
            .map(|r| ExactValue::from_rational(&r))
    } else {
        None
    }
}
