//! Experiment drivers: each runs seeded trials (or an exhaustive scan),
//! compares against closed forms and enumeration oracles where available,
//! and reports a machine-checkable consistency verdict.

use std::collections::BTreeMap;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::analysis::{edge_connectivity, edge_expansion_exact, min_degree};
use crate::graph::{barbell, betti_number, bouquet, MultiGraph};
use crate::lift::LiftAssignment;
use crate::mc::exact::{
    exact_lift_connectivity_probability, exact_wreath_transitive_probability, for_each_assignment,
    stagewise_transitive_product,
};
use crate::mc::formulas::Formula;
use crate::mc::stats::{least_squares_slope, two_proportion_z, Z_ALPHA_001};
use crate::mc::{
    estimate, run_trials_tally, try_exact_transitive, EstimateResult, EventKind, ExactValue,
};
use crate::{Error, Result};

/// Per-point seed derivation for parameter sweeps.
fn sweep_seed(master: u64, point: u64) -> u64 {
    master.wrapping_add(point.wrapping_mul(0x9E37_79B9_7F4A_7C15))
}

/// Dual-route check: one sampled assignment per trial, connectivity read
/// off the built graph versus transitivity of the walk-subgroup. The two
/// are equivalent, so any mismatch is a defect.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AgreementReport {
    pub n: usize,
    pub trials: u64,
    pub connected: u64,
    pub mismatches: u64,
}

pub fn connectivity_transitivity_agreement(
    g: &MultiGraph,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<AgreementReport> {
    betti_number(g)?;
    let g = g.clone();
    let tally = run_trials_tally(trials, seed, |rng| {
        let a = LiftAssignment::random(&g, n, rng).expect("connected base");
        let connected = a.build().graph().is_connected();
        let transitive = a.walk_subgroup().expect("tree-flattened").is_transitive();
        (connected, connected == transitive)
    });
    let connected = tally
        .iter()
        .filter(|((c, _), _)| *c)
        .map(|(_, count)| count)
        .sum();
    let mismatches = tally
        .iter()
        .filter(|((_, agree), _)| !*agree)
        .map(|(_, count)| count)
        .sum();
    Ok(AgreementReport {
        n,
        trials,
        connected,
        mismatches,
    })
}

/// Negative control: lifts of the barbell graph cannot beat the bridge
/// fiber, so every sampled cut is at most n.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarbellReport {
    pub k: usize,
    pub n: usize,
    pub trials: u64,
    pub exhaustive: bool,
    pub cut_histogram: BTreeMap<usize, u64>,
    pub max_cut: usize,
    pub bound: usize,
    pub within_bound: bool,
}

pub fn experiment_barbell(k: usize, n: usize, trials: u64, seed: u64) -> Result<BarbellReport> {
    if n >= k {
        return Err(Error::InvalidConfig(format!(
            "the bridge-fiber bound needs n < k; got n = {n}, k = {k}"
        )));
    }
    let g = barbell(k)?;
    let cut_histogram = run_trials_tally(trials, seed, |rng| {
        let lifted = LiftAssignment::random(&g, n, rng)
            .expect("barbell is connected")
            .build();
        edge_connectivity(lifted.graph()).edge_connectivity
    });
    Ok(summarize_barbell(k, n, trials, false, cut_histogram))
}

/// Exhaustive variant over every flattened assignment; feasible when
/// `(n!)^betti` fits the budget (barbell(3) at n = 2 has 64 assignments).
pub fn experiment_barbell_exhaustive(k: usize, n: usize, budget: u128) -> Result<BarbellReport> {
    if n >= k {
        return Err(Error::InvalidConfig(format!(
            "the bridge-fiber bound needs n < k; got n = {n}, k = {k}"
        )));
    }
    let g = barbell(k)?;
    let mut cut_histogram = BTreeMap::new();
    let total = for_each_assignment(&g, n, budget, |a| {
        let cut = edge_connectivity(a.build().graph()).edge_connectivity;
        *cut_histogram.entry(cut).or_insert(0) += 1;
    })?;
    Ok(summarize_barbell(k, n, total, true, cut_histogram))
}

fn summarize_barbell(
    k: usize,
    n: usize,
    trials: u64,
    exhaustive: bool,
    cut_histogram: BTreeMap<usize, u64>,
) -> BarbellReport {
    let max_cut = cut_histogram.keys().copied().max().unwrap_or(0);
    BarbellReport {
        k,
        n,
        trials,
        exhaustive,
        max_cut,
        bound: n,
        within_bound: max_cut <= n,
        cut_histogram,
    }
}

/// Frequency with which a random lift reaches edge connectivity at least
/// the base minimum degree. The closed-form regime needs
/// `n > (delta-1)^6 |V|^5`, far beyond desk scale, so the report records
/// whether the threshold holds and leaves interpretation to sweeps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DeltaConnectivityReport {
    pub n: usize,
    pub delta: usize,
    pub trials: u64,
    pub successes: u64,
    pub success_frequency: f64,
    pub failure_frequency: f64,
    pub regime_threshold: u128,
    pub threshold_met: bool,
}

pub fn experiment_delta_connectivity(
    g: &MultiGraph,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<DeltaConnectivityReport> {
    betti_number(g)?;
    let delta = min_degree(g);
    if delta < 3 {
        return Err(Error::InvalidConfig(format!(
            "delta-connectivity experiments need minimum degree >= 3, got {delta}"
        )));
    }
    let base = g.clone();
    let tally = run_trials_tally(trials, seed, |rng| {
        let lifted = LiftAssignment::random(&base, n, rng)
            .expect("connected base")
            .build();
        edge_connectivity(lifted.graph()).edge_connectivity >= delta
    });
    let successes = tally.get(&true).copied().unwrap_or(0);
    let threshold = ((delta as u128 - 1).pow(6)).saturating_mul((g.vertex_count() as u128).pow(5));
    Ok(DeltaConnectivityReport {
        n,
        delta,
        trials,
        successes,
        success_frequency: successes as f64 / trials as f64,
        failure_frequency: (trials - successes) as f64 / trials as f64,
        regime_threshold: threshold,
        threshold_met: (n as u128) > threshold,
    })
}

/// Connectivity probabilities of lifts compared across two bases: equal
/// exactly when the cycle ranks agree.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HomotopyReport {
    pub betti_a: usize,
    pub betti_b: usize,
    pub same_homotopy_type: bool,
    pub estimate_a: EstimateResult,
    pub estimate_b: EstimateResult,
    pub z_statistic: f64,
    pub reject_equality: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_a: Option<ExactValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_b: Option<ExactValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact_equal: Option<bool>,
    pub consistent: bool,
}

pub fn experiment_homotopy(
    a: &MultiGraph,
    b: &MultiGraph,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<HomotopyReport> {
    let betti_a = betti_number(a)?;
    let betti_b = betti_number(b)?;
    let est_a = estimate(
        &EventKind::LiftConnected { base: a.clone(), n },
        trials,
        seed,
    )?;
    let est_b = estimate(
        &EventKind::LiftConnected { base: b.clone(), n },
        trials,
        sweep_seed(seed, 1),
    )?;
    let z = two_proportion_z(est_a.successes, trials, est_b.successes, trials);
    let reject = z.abs() > Z_ALPHA_001;

    // Exact rationals by exhaustive enumeration at small degree.
    let (exact_a, exact_b) = if n <= 3 {
        let budget = 1 << 22;
        let ra = exact_lift_connectivity_probability(a, n, budget).ok();
        let rb = exact_lift_connectivity_probability(b, n, budget).ok();
        (
            ra.as_ref().map(ExactValue::from_rational),
            rb.as_ref().map(ExactValue::from_rational),
        )
    } else {
        (None, None)
    };
    let exact_equal = match (&exact_a, &exact_b) {
        (Some(x), Some(y)) => Some(x.numer == y.numer && x.denom == y.denom),
        _ => None,
    };

    let same = betti_a == betti_b;
    let consistent = if same {
        !reject && exact_equal != Some(false)
    } else {
        exact_equal != Some(true)
    };
    Ok(HomotopyReport {
        betti_a,
        betti_b,
        same_homotopy_type: same,
        estimate_a: est_a,
        estimate_b: est_b,
        z_statistic: z,
        reject_equality: reject,
        exact_a,
        exact_b,
        exact_equal,
        consistent,
    })
}

/// Wreath transitivity frequency against the product law: the closed-form
/// band, the stagewise exact product, and the exhaustive exact value where
/// budgets allow.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WreathTransitivityReport {
    pub signature: Vec<usize>,
    pub l: usize,
    pub estimate: EstimateResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stage_product: Option<ExactValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<ExactValue>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub product_matches_exhaustive: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ci_contains_exact: Option<bool>,
    pub consistent: bool,
}

pub fn experiment_wreath(
    signature: &[usize],
    l: usize,
    trials: u64,
    seed: u64,
) -> Result<WreathTransitivityReport> {
    let event = EventKind::WreathTransitive {
        signature: signature.to_vec(),
        l,
    };
    let formula = Formula::WreathTransitivity {
        signature: signature.iter().map(|&x| x as u64).collect(),
        l: l as u32,
    }
    .evaluate()?;
    let est = estimate(&event, trials, seed)?.with_formula(formula);

    let stage_product = stagewise_transitive_product(signature, l)
        .ok()
        .map(|r| ExactValue::from_rational(&r));
    let exhaustive = exact_wreath_transitive_probability(signature, l, 1 << 20)
        .ok()
        .map(|r| ExactValue::from_rational(&r));
    let product_matches_exhaustive = match (&stage_product, &exhaustive) {
        (Some(p), Some(e)) => Some(p.numer == e.numer && p.denom == e.denom),
        _ => None,
    };
    let exact = exhaustive.as_ref().or(stage_product.as_ref());
    let ci_contains_exact = exact.map(|e| est.ci_contains(e.value));
    let consistent = product_matches_exhaustive != Some(false) && ci_contains_exact != Some(false);
    let est = match exact {
        Some(e) => est.with_exact(e.clone()),
        None => est,
    };
    Ok(WreathTransitivityReport {
        signature: signature.to_vec(),
        l,
        estimate: est,
        stage_product,
        exhaustive,
        product_matches_exhaustive,
        ci_contains_exact,
        consistent,
    })
}

/// Iterated lift connectivity against the product law, with the exhaustive
/// oracle when in budget.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct IteratedLiftReport {
    pub signature: Vec<usize>,
    pub betti: usize,
    pub estimate: EstimateResult,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exhaustive: Option<ExactValue>,
    pub consistent: bool,
}

pub fn experiment_iterated(
    g: &MultiGraph,
    signature: &[usize],
    trials: u64,
    seed: u64,
) -> Result<IteratedLiftReport> {
    let betti = betti_number(g)?;
    let event = EventKind::IteratedLiftConnected {
        base: g.clone(),
        signature: signature.to_vec(),
    };
    let mut est = estimate(&event, trials, seed)?;
    if betti >= 1 {
        let formula = Formula::IteratedConnectivity {
            signature: signature.iter().map(|&x| x as u64).collect(),
            l: betti as u32,
        }
        .evaluate()?;
        est = est.with_formula(formula);
    }
    let exhaustive =
        crate::mc::exact::exact_iterated_connectivity_probability(g, signature, 1 << 20)
            .ok()
            .map(|r| ExactValue::from_rational(&r));
    let consistent = exhaustive
        .as_ref()
        .map(|e| est.ci_contains(e.value))
        .unwrap_or(true);
    let est = match &exhaustive {
        Some(e) => est.with_exact(e.clone()),
        None => est,
    };
    Ok(IteratedLiftReport {
        signature: signature.to_vec(),
        betti,
        estimate: est,
        exhaustive,
        consistent,
    })
}

/// Random 2d-regular multigraphs (lifts of the d-loop bouquet):
/// connectivity frequency against the closed form, and, at expansion
/// scale, the guarantee that a symmetric-or-alternating walk-subgroup
/// forces edge expansion at least 1.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegularMultigraphReport {
    pub d: usize,
    pub n: usize,
    pub trials: u64,
    pub estimate: EstimateResult,
    pub expansion_checked: bool,
    pub sym_or_alt_trials: u64,
    pub expansion_ge_one: u64,
    pub all_sym_or_alt_expand: bool,
    pub consistent: bool,
}

/// Walk-subgroup state per trial for the regular-multigraph experiment.
const REG_UNCHECKED: u8 = 0;
const REG_NOT_SYM_ALT: u8 = 1;
const REG_SYM_ALT_EXPANDS: u8 = 2;
const REG_SYM_ALT_NARROW: u8 = 3;

pub fn experiment_regular(
    d: usize,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<RegularMultigraphReport> {
    let g = bouquet(d)?;
    if n == 0 {
        return Err(Error::InvalidParameter("degree must be >= 1".into()));
    }
    let check_expansion = (2..=12).contains(&n);
    let base = g.clone();
    let tally = run_trials_tally(trials, seed, |rng| {
        let a = LiftAssignment::random(&base, n, rng).expect("bouquet is connected");
        let lifted = a.build();
        let connected = lifted.graph().is_connected();
        let state = if !check_expansion {
            REG_UNCHECKED
        } else {
            let h = a.walk_subgroup().expect("tree-flattened");
            if !h.is_sym_or_alt() {
                REG_NOT_SYM_ALT
            } else {
                let rep = edge_expansion_exact(lifted.graph()).expect("expansion scale checked");
                if rep.expansion >= Ratio::new(1, 1) {
                    REG_SYM_ALT_EXPANDS
                } else {
                    REG_SYM_ALT_NARROW
                }
            }
        };
        (connected, state)
    });
    let count = |pred: &dyn Fn(&(bool, u8)) -> bool| {
        tally
            .iter()
            .filter(|(k, _)| pred(k))
            .map(|(_, v)| v)
            .sum::<u64>()
    };
    let connected = count(&|k| k.0);
    let sym_or_alt_trials = count(&|k| k.1 == REG_SYM_ALT_EXPANDS || k.1 == REG_SYM_ALT_NARROW);
    let expansion_ge_one = count(&|k| k.1 == REG_SYM_ALT_EXPANDS);
    let all_expand = sym_or_alt_trials == expansion_ge_one;

    let mut est = EstimateResult::new(
        format!("regular-multigraph-connected(d={d},n={n})"),
        trials,
        connected,
    );
    if n >= 1 && d >= 1 {
        est = est.with_formula(
            Formula::RegularConnectivity {
                n: n as u64,
                d: d as u32,
            }
            .evaluate()?,
        );
    }
    if let Some(exact) = try_exact_transitive(n, d) {
        est = est.with_exact(exact);
    }
    let consistent = all_expand
        && est
            .exact
            .as_ref()
            .map(|e| est.ci_contains(e.value))
            .unwrap_or(true);
    Ok(RegularMultigraphReport {
        d,
        n,
        trials,
        estimate: est,
        expansion_checked: check_expansion,
        sym_or_alt_trials,
        expansion_ge_one,
        all_sym_or_alt_expand: all_expand,
        consistent,
    })
}

/// Exact-expansion experiment at enumeration scale: frequency of expansion
/// at least `xi = 1/(5 |V(base)|)`, the frequency of a symmetric-or-
/// alternating walk-subgroup it must dominate, and the trial-by-trial
/// containment under the tuple-transitivity hypothesis `k >= n/3`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExpansionExperimentReport {
    pub n: usize,
    pub trials: u64,
    pub xi: f64,
    pub xi_numer: u64,
    pub xi_denom: u64,
    pub expansion_ge_xi: u64,
    pub sym_or_alt: u64,
    pub k_hypothesis: usize,
    pub k_transitive: u64,
    pub containment_violations: u64,
    pub frequency_dominates: bool,
    pub consistent: bool,
}

pub fn experiment_expansion(
    g: &MultiGraph,
    n: usize,
    trials: u64,
    seed: u64,
) -> Result<ExpansionExperimentReport> {
    betti_number(g)?;
    let lift_vertices = n * g.vertex_count();
    if lift_vertices > crate::analysis::MAX_EXPANSION_VERTICES {
        return Err(Error::SizeLimit {
            size: lift_vertices,
            limit: crate::analysis::MAX_EXPANSION_VERTICES,
        });
    }
    if n < 2 {
        return Err(Error::InvalidParameter(
            "expansion experiment needs degree >= 2".into(),
        ));
    }
    let xi = Ratio::new(1u64, 5 * g.vertex_count() as u64);
    let k_hypothesis = n.div_ceil(3);
    let base = g.clone();
    let tally = run_trials_tally(trials, seed, |rng| {
        let a = LiftAssignment::random(&base, n, rng).expect("connected base");
        let lifted = a.build();
        let expansion = edge_expansion_exact(lifted.graph())
            .expect("size checked")
            .expansion;
        let ge_xi = expansion >= xi;
        let h = a.walk_subgroup().expect("tree-flattened");
        let sym = h.is_sym_or_alt();
        let ktrans = h
            .is_k_transitive(k_hypothesis)
            .expect("tuple domain is tiny at this scale")
            .transitive_on_k_tuples;
        (ge_xi, sym, ktrans)
    });
    let count = |pred: &dyn Fn(&(bool, bool, bool)) -> bool| {
        tally
            .iter()
            .filter(|(k, _)| pred(k))
            .map(|(_, v)| v)
            .sum::<u64>()
    };
    let expansion_ge_xi = count(&|k| k.0);
    let sym_or_alt = count(&|k| k.1);
    let k_transitive = count(&|k| k.2);
    let containment_violations = count(&|k| k.2 && !k.0);
    let frequency_dominates = expansion_ge_xi >= sym_or_alt;
    Ok(ExpansionExperimentReport {
        n,
        trials,
        xi: *xi.numer() as f64 / *xi.denom() as f64,
        xi_numer: *xi.numer(),
        xi_denom: *xi.denom(),
        expansion_ge_xi,
        sym_or_alt,
        k_hypothesis,
        k_transitive,
        containment_violations,
        frequency_dominates,
        consistent: containment_violations == 0 && frequency_dominates,
    })
}

/// One sweep point of a slope fit.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopePoint {
    pub n: usize,
    pub estimate: EstimateResult,
}

/// Log-log slope of the transitivity failure rate (or success rate for a
/// single generator) against the lift degree; the asymptotic exponent is
/// `-(l-1)` for failures and `-1` for the single-generator success law.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SlopeReport {
    pub l: usize,
    pub trials_per_point: u64,
    pub fit_on: String,
    pub points: Vec<SlopePoint>,
    pub slope: f64,
    pub expected_slope: f64,
}

pub fn slope_fit_transitive(
    l: usize,
    n_values: &[usize],
    trials: u64,
    seed: u64,
) -> Result<SlopeReport> {
    if n_values.len() < 4 {
        return Err(Error::InvalidConfig(
            "slope fits need at least 4 degree values".into(),
        ));
    }
    if l == 0 {
        return Err(Error::InvalidConfig("slope fits need l >= 1".into()));
    }
    let fit_failures = l >= 2;
    let mut points = Vec::with_capacity(n_values.len());
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for (i, &n) in n_values.iter().enumerate() {
        let mut est = estimate(
            &EventKind::Transitive { n, l },
            trials,
            sweep_seed(seed, i as u64),
        )?;
        if let Some(exact) = try_exact_transitive(n, l) {
            est = est.with_exact(exact);
        }
        est = est.with_formula(
            Formula::LiftConnectivity {
                n: n as u64,
                l: l as u32,
            }
            .evaluate()?,
        );
        let value = if fit_failures {
            let failures = est.trials - est.successes;
            if failures == 0 {
                return Err(Error::InsufficientFailures { n: n as u64 });
            }
            failures as f64 / est.trials as f64
        } else {
            if est.successes == 0 {
                return Err(Error::InsufficientFailures { n: n as u64 });
            }
            est.p_hat
        };
        xs.push((n as f64).ln());
        ys.push(value.ln());
        points.push(SlopePoint { n, estimate: est });
    }
    let slope = least_squares_slope(&xs, &ys);
    let expected_slope = if fit_failures {
        -((l as f64) - 1.0)
    } else {
        -1.0
    };
    Ok(SlopeReport {
        l,
        trials_per_point: trials,
        fit_on: if fit_failures {
            "log-failure-rate".into()
        } else {
            "log-success-rate".into()
        },
        points,
        slope,
        expected_slope,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{complete, cycle, dumbbell, path, theta};
    use num_rational::Ratio;

    #[test]
    fn agreement_has_no_mismatches_at_small_scale() {
        for g in [cycle(3).unwrap(), theta(), dumbbell()] {
            let rep = connectivity_transitivity_agreement(&g, 4, 500, 1).unwrap();
            assert_eq!(rep.mismatches, 0);
            assert_eq!(rep.trials, 500);
        }
    }

    #[test]
    fn barbell_sampled_and_exhaustive() {
        let rep = experiment_barbell(5, 2, 50, 3).unwrap();
        assert!(rep.within_bound, "cuts: {:?}", rep.cut_histogram);
        assert_eq!(rep.trials, 50);

        let rep = experiment_barbell_exhaustive(3, 2, 1 << 20).unwrap();
        assert!(rep.exhaustive);
        assert_eq!(rep.trials, 64, "(2!)^6 assignments");
        assert!(rep.within_bound);
        assert!(rep.max_cut <= 2);

        assert!(experiment_barbell(3, 3, 10, 0).is_err(), "needs n < k");
    }

    #[test]
    fn delta_connectivity_on_tiny_complete_graph() {
        let g = complete(4).unwrap();
        let rep = experiment_delta_connectivity(&g, 3, 40, 5).unwrap();
        assert_eq!(rep.delta, 3);
        assert_eq!(
            rep.successes + (rep.failure_frequency * 40.0).round() as u64,
            40
        );
        assert!(!rep.threshold_met, "desk scale is far below the regime");
        let p = path(3).unwrap();
        assert!(experiment_delta_connectivity(&p, 2, 10, 0).is_err());
    }

    #[test]
    fn homotopy_consistency_small() {
        let rep = experiment_homotopy(&theta(), &dumbbell(), 3, 4_000, 7).unwrap();
        assert!(rep.same_homotopy_type);
        assert_eq!(rep.exact_equal, Some(true));
        assert!(rep.consistent, "z = {}", rep.z_statistic);

        let rep =
            experiment_homotopy(&bouquet(1).unwrap(), &bouquet(2).unwrap(), 3, 4_000, 7).unwrap();
        assert!(!rep.same_homotopy_type);
        assert_eq!(rep.exact_equal, Some(false));
        assert!(rep.consistent);
    }

    #[test]
    fn wreath_experiment_consistency() {
        let rep = experiment_wreath(&[2, 2], 2, 20_000, 11).unwrap();
        assert_eq!(rep.product_matches_exhaustive, Some(true));
        assert_eq!(rep.ci_contains_exact, Some(true));
        assert!(rep.consistent);
        let exact = rep.exhaustive.unwrap();
        assert_eq!((exact.numer.as_str(), exact.denom.as_str()), ("21", "32"));
    }

    #[test]
    fn wreath_experiment_taller_signature() {
        // Stage product p(3,2) * p(2,4) = 13/18 * 15/16 = 65/96; the
        // estimate sits inside the closed-form band and the exhaustive
        // scan over 48^2 pairs agrees with the product.
        let rep = experiment_wreath(&[3, 2], 2, 20_000, 37).unwrap();
        let staged = rep.stage_product.as_ref().unwrap();
        assert_eq!((staged.numer.as_str(), staged.denom.as_str()), ("65", "96"));
        assert_eq!(rep.product_matches_exhaustive, Some(true));
        assert_eq!(rep.ci_contains_exact, Some(true));
        let band = rep.estimate.formula.unwrap();
        assert!(band.contains(rep.estimate.p_hat));
    }

    #[test]
    fn iterated_experiment_on_cycle() {
        let rep = experiment_iterated(&cycle(3).unwrap(), &[2, 2], 20_000, 13).unwrap();
        assert_eq!(rep.betti, 1);
        let exact = rep.exhaustive.as_ref().unwrap();
        assert_eq!((exact.numer.as_str(), exact.denom.as_str()), ("1", "4"));
        assert!(rep.consistent);
    }

    #[test]
    fn regular_experiment_small() {
        let rep = experiment_regular(2, 6, 300, 17).unwrap();
        assert!(rep.expansion_checked);
        assert!(rep.sym_or_alt_trials > 0, "S_n/A_n dominates at this scale");
        // A full symmetric walk-subgroup does not force expansion >= 1 at
        // this scale (loop-heavy generators leave sparse cuts); the report
        // counts both sides instead of assuming the implication.
        assert!(rep.expansion_ge_one <= rep.sym_or_alt_trials);
        let est = &rep.estimate;
        let exact = est.exact.as_ref().expect("exact value in range");
        assert!(est.ci_contains(exact.value));
    }

    #[test]
    fn regular_expansion_counterexample_is_real() {
        // (5 6) and a 7-cycle generate all of S_8, yet the union graph has
        // a 4-set with boundary 2.
        use crate::analysis::{boundary_size, edge_expansion_exact};
        use crate::perm::Permutation;
        let g = bouquet(2).unwrap();
        let s1 = Permutation::from_images(vec![0, 1, 2, 3, 4, 6, 5, 7]).unwrap();
        let s2 = Permutation::from_images(vec![6, 2, 4, 0, 3, 5, 7, 1]).unwrap();
        let a = LiftAssignment::from_labels(&g, 8, vec![s1, s2], &[]).unwrap();
        assert!(a.walk_subgroup().unwrap().is_sym_or_alt());
        let lifted = a.build();
        assert!(lifted.graph().is_connected());
        assert_eq!(boundary_size(lifted.graph(), &[0, 2, 3, 4]), 2);
        let rep = edge_expansion_exact(lifted.graph()).unwrap();
        assert_eq!(rep.expansion, Ratio::new(1, 2));
    }

    #[test]
    fn expansion_experiment_on_theta() {
        let rep = experiment_expansion(&theta(), 3, 400, 19).unwrap();
        assert_eq!(rep.k_hypothesis, 1);
        assert_eq!(rep.containment_violations, 0);
        assert!(rep.frequency_dominates);
        assert!(rep.consistent);
        assert!((rep.xi - 0.1).abs() < 1e-12);
    }

    #[test]
    fn expansion_experiment_on_tree_base_is_always_narrow() {
        let rep = experiment_expansion(&path(3).unwrap(), 2, 100, 23).unwrap();
        assert_eq!(rep.expansion_ge_xi, 0, "disconnected lifts never expand");
        assert_eq!(rep.sym_or_alt, 0);
        assert!(rep.consistent);
    }

    #[test]
    fn expansion_size_limit() {
        let g = complete(5).unwrap();
        assert!(matches!(
            experiment_expansion(&g, 6, 10, 0),
            Err(Error::SizeLimit { .. })
        ));
    }

    #[test]
    fn slope_fit_smoke() {
        // Cheap smoke run; the acceptance suite runs the full version.
        let rep = slope_fit_transitive(2, &[6, 8, 10, 12], 20_000, 29).unwrap();
        assert_eq!(rep.points.len(), 4);
        assert!(
            (rep.slope - rep.expected_slope).abs() < 0.5,
            "slope {} vs {}",
            rep.slope,
            rep.expected_slope
        );
        assert!(slope_fit_transitive(2, &[10, 20], 100, 0).is_err());
    }

    #[test]
    fn slope_fit_single_generator_uses_success_rate() {
        // One generator is transitive exactly when it is a full cycle, so
        // the success rate itself follows the 1/n law.
        let rep = slope_fit_transitive(1, &[5, 10, 20, 40], 40_000, 31).unwrap();
        assert_eq!(rep.fit_on, "log-success-rate");
        assert_eq!(rep.expected_slope, -1.0);
        assert!(
            (rep.slope + 1.0).abs() < 0.2,
            "slope {} should be near -1",
            rep.slope
        );
    }
}
