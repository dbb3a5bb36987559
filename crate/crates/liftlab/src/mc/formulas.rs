//! Closed-form comparison values for the estimated probabilities.
//!
//! The asymptotic correction terms are operationalized as a band of width
//! `C / n^(e+1)` around the leading-order value (default `C = 10`); the
//! unknowable constants are never asserted, only the leading order and the
//! band.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Default band constant for the correction term.
pub const DEFAULT_BAND_CONSTANT: f64 = 10.0;

/// Leading-order formula value with an uncertainty band.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FormulaBand {
    pub value: f64,
    pub low: f64,
    pub high: f64,
}

impl FormulaBand {
    pub fn contains(&self, p: f64) -> bool {
        self.low <= p && p <= self.high
    }
}

/// Closed-form evaluators keyed by the law they compute. Each is a pure
/// function of its parameters.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "formula", rename_all = "kebab-case")]
pub enum Formula {
    /// Probability that a random n-lift of a connected base with cycle
    /// rank `l` is connected: `1 - 1/n^(l-1)` to leading order.
    LiftConnectivity { n: u64, l: u32 },
    /// Probability that `l` random permutations generate the symmetric or
    /// alternating group: same leading order as connectivity.
    SymOrAltGeneration { n: u64, l: u32 },
    /// Probability that a random 2d-regular multigraph on n vertices is
    /// connected: `1 - 1/n^(d-1)` to leading order.
    RegularConnectivity { n: u64, d: u32 },
    /// Probability that an iterated random lift over the signature is
    /// connected: product over stages with exponents `(l-1) * n_1⋯n_{i-1}`.
    IteratedConnectivity { signature: Vec<u64>, l: u32 },
    /// Probability that `l` random wreath elements act transitively on the
    /// product domain: the same product law.
    WreathTransitivity { signature: Vec<u64>, l: u32 },
    /// Upper bound on the transitivity failure probability:
    /// `sum over 1 <= r <= n/2 of C(n, r)^(1-l)`.
    TransitivityFailureBound { n: u64, l: u32 },
}

impl Formula {
    pub fn evaluate(&self) -> Result<FormulaBand> {
        self.evaluate_with_band(DEFAULT_BAND_CONSTANT)
    }

    pub fn evaluate_with_band(&self, c: f64) -> Result<FormulaBand> {
        match self {
            Formula::LiftConnectivity { n, l } | Formula::SymOrAltGeneration { n, l } => {
                leading_band(*n, *l, c)
            }
            Formula::RegularConnectivity { n, d } => leading_band(*n, *d, c),
            Formula::IteratedConnectivity { signature, l }
            | Formula::WreathTransitivity { signature, l } => product_band(signature, *l, c),
            Formula::TransitivityFailureBound { n, l } => {
                if *n == 0 || *l == 0 {
                    return Err(Error::InvalidParameter(
                        "failure bound needs n >= 1 and l >= 1".into(),
                    ));
                }
                let mut sum = 0.0f64;
                for r in 1..=(*n / 2) {
                    sum += binomial_f64(*n, r).powi(1 - *l as i32);
                }
                Ok(FormulaBand {
                    value: sum,
                    low: sum,
                    high: sum,
                })
            }
        }
    }

    /// Parses a formula id string (kebab-case as serialized).
    pub fn parse(id: &str, n: Option<u64>, l: Option<u32>, signature: &[u64]) -> Result<Formula> {
        let need_n = || n.ok_or_else(|| Error::InvalidConfig(format!("{id} needs --n")));
        let need_l = || l.ok_or_else(|| Error::InvalidConfig(format!("{id} needs --l")));
        let need_sig = || {
            if signature.is_empty() {
                Err(Error::InvalidConfig(format!("{id} needs --signature")))
            } else {
                Ok(signature.to_vec())
            }
        };
        match id {
            "lift-connectivity" => Ok(Formula::LiftConnectivity {
                n: need_n()?,
                l: need_l()?,
            }),
            "sym-or-alt" => Ok(Formula::SymOrAltGeneration {
                n: need_n()?,
                l: need_l()?,
            }),
            "regular-connectivity" => Ok(Formula::RegularConnectivity {
                n: need_n()?,
                d: need_l()?,
            }),
            "iterated-connectivity" => Ok(Formula::IteratedConnectivity {
                signature: need_sig()?,
                l: need_l()?,
            }),
            "wreath-transitivity" => Ok(Formula::WreathTransitivity {
                signature: need_sig()?,
                l: need_l()?,
            }),
            "transitivity-failure-bound" => Ok(Formula::TransitivityFailureBound {
                n: need_n()?,
                l: need_l()?,
            }),
            other => Err(Error::UnknownFormula(other.to_string())),
        }
    }
}

/// `1 - 1/n^(e-1)` with band `± c/n^e`, clamped to [0, 1].
fn leading_band(n: u64, e: u32, c: f64) -> Result<FormulaBand> {
    if n == 0 || e == 0 {
        return Err(Error::InvalidParameter(
            "leading-order formula needs n >= 1 and exponent >= 1".into(),
        ));
    }
    let nf = n as f64;
    let value = 1.0 - nf.powi(-((e - 1) as i32));
    let width = c * nf.powi(-(e as i32));
    Ok(FormulaBand {
        value,
        low: (value - width).max(0.0),
        high: (value + width).min(1.0),
    })
}

/// Product over stages; factor bands multiply with clamping, which keeps
/// the band monotone in each factor.
fn product_band(signature: &[u64], l: u32, c: f64) -> Result<FormulaBand> {
    if signature.is_empty() || l == 0 {
        return Err(Error::InvalidParameter(
            "product formula needs a nonempty signature and l >= 1".into(),
        ));
    }
    let mut value = 1.0f64;
    let mut low = 1.0f64;
    let mut high = 1.0f64;
    let mut carried: u64 = 1;
    for &n_i in signature {
        let exponent = (l as u64 - 1).saturating_mul(carried) as u32;
        let factor = leading_band(n_i, exponent + 1, c)?;
        value *= factor.value;
        low *= factor.low;
        high *= factor.high;
        carried = carried.saturating_mul(n_i);
    }
    Ok(FormulaBand {
        value,
        low: low.max(0.0),
        high: high.min(1.0),
    })
}

fn binomial_f64(n: u64, k: u64) -> f64 {
    let mut out = 1.0f64;
    for i in 0..k {
        out = out * (n - i) as f64 / (i + 1) as f64;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn connectivity_leading_order() {
        let band = Formula::LiftConnectivity { n: 100, l: 2 }
            .evaluate()
            .unwrap();
        assert!((band.value - 0.99).abs() < 1e-12);
        assert!((band.high - band.low - 2.0 * 10.0 / 10_000.0).abs() < 1e-12);
        assert!(band.contains(0.99));
    }

    #[test]
    fn regular_multigraph_value() {
        let band = Formula::RegularConnectivity { n: 50, d: 2 }
            .evaluate()
            .unwrap();
        assert!((band.value - 0.98).abs() < 1e-12);
    }

    #[test]
    fn single_stage_product_reduces_to_leading_order() {
        let product = Formula::IteratedConnectivity {
            signature: vec![10],
            l: 2,
        }
        .evaluate()
        .unwrap();
        let plain = Formula::LiftConnectivity { n: 10, l: 2 }
            .evaluate()
            .unwrap();
        assert_eq!(product, plain);
    }

    #[test]
    fn iterated_exponents_grow_with_carried_product() {
        // Signature (2, 2), l = 2: factors 1 - 1/2 and 1 - 1/4.
        let band = Formula::IteratedConnectivity {
            signature: vec![2, 2],
            l: 2,
        }
        .evaluate_with_band(0.0)
        .unwrap();
        assert!((band.value - 0.5 * 0.75).abs() < 1e-12);
    }

    #[test]
    fn failure_bound_is_exact_sum() {
        // n = 3, l = 2: only r = 1 contributes C(3,1)^(-1) = 1/3.
        let band = Formula::TransitivityFailureBound { n: 3, l: 2 }
            .evaluate()
            .unwrap();
        assert!((band.value - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn parse_and_reject() {
        let f = Formula::parse("lift-connectivity", Some(10), Some(2), &[]).unwrap();
        assert_eq!(f, Formula::LiftConnectivity { n: 10, l: 2 });
        assert!(matches!(
            Formula::parse("no-such-law", Some(1), Some(1), &[]),
            Err(Error::UnknownFormula(_))
        ));
        assert!(Formula::parse("wreath-transitivity", None, Some(2), &[]).is_err());
    }

    #[test]
    fn l_equals_one_degenerates_to_zero() {
        // With one generator the leading term vanishes; only the band
        // carries information.
        let band = Formula::LiftConnectivity { n: 10, l: 1 }
            .evaluate()
            .unwrap();
        assert_eq!(band.value, 0.0);
        assert!(band.high > 0.0);
    }
}
