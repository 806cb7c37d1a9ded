//! Extraction of quantified procedural-knowledge rules from the known
//! causal dependencies.
//!
//! A rule states: when quality `q_j` is observed inside the condition range
//! `[l, u]`, adjust parameter `p_k` by the quantified amount ρ̂. The
//! quantification samples the inverse dependency over the condition range
//! and averages the per-unit parameter differences; by telescoping this
//! equals `(f⁻¹(l) − f⁻¹(u)) / (width(d_q) − 1)`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::space::{DependencyFunction, PQSpace, Quality, SpaceError, ValueRange};

#[derive(Debug, Error)]
pub enum RuleError {
    #[error("condition range [{lower}, {upper}] invalid for quality domain [{min}, {max}]")]
    Domain {
        lower: f64,
        upper: f64,
        min: f64,
        max: f64,
    },
    #[error("condition estimator: {0}")]
    Estimator(String),
    #[error(transparent)]
    Space(#[from] SpaceError),
}

/// One quantified procedural-knowledge unit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rule {
    /// Quality id `j` whose observation triggers the rule.
    pub quality: usize,
    /// Parameter id `k` to adjust.
    pub parameter: usize,
    /// Condition range `[l, u]` over the quality domain.
    pub condition_range: ValueRange,
    /// Quantified adjustment ρ̂.
    pub quantified_adjustment: f64,
}

/// How condition ranges are derived from a quality domain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionStrategy {
    /// Partition the domain into this many equal-width ranges.
    FixedCount(usize),
    /// Bin width `2·IQR·m^(−1/3)` over observed quality values.
    FreedmanDiaconis,
}

/// Result of condition quantification for one quality.
#[derive(Debug, Clone, PartialEq)]
pub struct Binning {
    pub ranges: Vec<ValueRange>,
    /// True when the estimator degenerated (zero IQR) and a single bin was
    /// used instead.
    pub estimator_fallback: bool,
}

/// Quantify the parameter adjustment for a condition range `[l, u]` of the
/// dependency's target domain, per the sampled-difference formula.
///
/// Integer-valued bounds at least one unit apart are sampled on the integer
/// grid; any other range is sampled at `ceil(u − l) + 1` evenly spaced
/// points. The denominator is always `width(d_q) − 1`, independent of the
/// range.
pub fn quantify_parameter(f: &DependencyFunction, l: f64, u: f64) -> Result<f64, RuleError> {
    let domain = f.target_domain;
    if !(l < u) || !domain.contains(l) || !domain.contains(u) {
        return Err(RuleError::Domain {
            lower: l,
            upper: u,
            min: domain.min,
            max: domain.max,
        });
    }
    let denominator = domain.width() - 1.0;
    if denominator <= 0.0 {
        return Err(RuleError::Domain {
            lower: l,
            upper: u,
            min: domain.min,
            max: domain.max,
        });
    }

    let integer_grid = l.fract() == 0.0 && u.fract() == 0.0 && u - l >= 1.0;
    let steps = if integer_grid {
        (u - l) as usize
    } else {
        ((u - l).ceil() as usize).max(1)
    };
    let mut sum = 0.0;
    for i in 0..steps {
        let s0 = l + (u - l) * i as f64 / steps as f64;
        let s1 = l + (u - l) * (i + 1) as f64 / steps as f64;
        sum += f.inverse(s0)? - f.inverse(s1)?;
    }
    Ok(sum / denominator)
}

/// The telescoped closed form of [`quantify_parameter`]; kept separate so
/// the two routes can be checked against each other.
pub fn quantify_parameter_closed_form(
    f: &DependencyFunction,
    l: f64,
    u: f64,
) -> Result<f64, RuleError> {
    let domain = f.target_domain;
    if !(l < u) || !domain.contains(l) || !domain.contains(u) || domain.width() <= 1.0 {
        return Err(RuleError::Domain {
            lower: l,
            upper: u,
            min: domain.min,
            max: domain.max,
        });
    }
    Ok((f.inverse(l)? - f.inverse(u)?) / (domain.width() - 1.0))
}

/// Partition a domain into `n` contiguous equal-width ranges.
pub fn equal_width_bins(domain: ValueRange, n: usize) -> Result<Vec<ValueRange>, RuleError> {
    if n == 0 {
        return Err(RuleError::Estimator("fixed_count needs at least 1 bin".into()));
    }
    let mut bounds: Vec<f64> = (0..=n)
        .map(|i| domain.min + domain.width() * i as f64 / n as f64)
        .collect();
    bounds[n] = domain.max;
    Ok(bounds
        .windows(2)
        .map(|w| ValueRange { min: w[0], max: w[1] })
        .collect())
}

/// Quartile with linear interpolation between order statistics.
fn quartile(sorted: &[f64], p: f64) -> f64 {
    let pos = (sorted.len() - 1) as f64 * p;
    let lo = pos.floor() as usize;
    let frac = pos - lo as f64;
    if lo + 1 < sorted.len() {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    } else {
        sorted[lo]
    }
}

/// Partition the quality domain into condition ranges.
///
/// `observations` is only consulted by the Freedman-Diaconis strategy; a
/// zero interquartile range falls back to a single bin with the
/// `estimator_fallback` flag set.
pub fn quantify_conditions(
    quality: &Quality,
    strategy: &ConditionStrategy,
    observations: &[f64],
) -> Result<Binning, RuleError> {
    match strategy {
        ConditionStrategy::FixedCount(n) => Ok(Binning {
            ranges: equal_width_bins(quality.domain, *n)?,
            estimator_fallback: false,
        }),
        ConditionStrategy::FreedmanDiaconis => {
            if observations.len() < 2 {
                return Err(RuleError::Estimator(format!(
                    "freedman_diaconis needs at least 2 observations for quality {}, got {}",
                    quality.id,
                    observations.len()
                )));
            }
            let mut sorted = observations.to_vec();
            sorted.sort_by(f64::total_cmp);
            let iqr = quartile(&sorted, 0.75) - quartile(&sorted, 0.25);
            if iqr <= 0.0 {
                return Ok(Binning {
                    ranges: vec![quality.domain],
                    estimator_fallback: true,
                });
            }
            let h = 2.0 * iqr * (observations.len() as f64).powf(-1.0 / 3.0);
            let count = ((quality.domain.width() / h).ceil() as usize).max(1);
            Ok(Binning {
                ranges: equal_width_bins(quality.domain, count)?,
                estimator_fallback: false,
            })
        }
    }
}

/// Rules plus extraction diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct RuleExtraction {
    pub rules: Vec<Rule>,
    /// Qualities whose condition estimator fell back to a single bin.
    pub estimator_fallbacks: Vec<usize>,
}

/// Extract one rule per known dependency and condition range.
///
/// `observations` holds the observed values per quality id and is only
/// required for the Freedman-Diaconis strategy; pass `&[]` otherwise.
pub fn extract_rules(
    space: &PQSpace,
    strategy: &ConditionStrategy,
    observations: &[Vec<f64>],
) -> Result<RuleExtraction, RuleError> {
    if matches!(strategy, ConditionStrategy::FreedmanDiaconis)
        && observations.len() != space.qualities().len()
    {
        return Err(RuleError::Estimator(format!(
            "freedman_diaconis needs observations for all {} qualities, got {}",
            space.qualities().len(),
            observations.len()
        )));
    }

    let mut binnings: Vec<Option<Binning>> = vec![None; space.qualities().len()];
    let mut rules = Vec::new();
    let mut fallbacks = Vec::new();
    for &(k, j) in space.known() {
        if binnings[j].is_none() {
            let obs = observations.get(j).map(Vec::as_slice).unwrap_or(&[]);
            let binning = quantify_conditions(&space.qualities()[j], strategy, obs)?;
            if binning.estimator_fallback {
                fallbacks.push(j);
            }
            binnings[j] = Some(binning);
        }
        let f = space.dependency(k, j).expect("known dependency");
        for range in &binnings[j].as_ref().unwrap().ranges {
            rules.push(Rule {
                quality: j,
                parameter: k,
                condition_range: *range,
                quantified_adjustment: quantify_parameter(f, range.min, range.max)?,
            });
        }
    }
    Ok(RuleExtraction {
        rules,
        estimator_fallbacks: fallbacks,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GeneratorConfig;
    use crate::random::substream;
    use crate::space::{build_pq_space, DependencyFunction, FunctionKind};

    fn range(min: f64, max: f64) -> ValueRange {
        ValueRange::new(min, max).unwrap()
    }

    #[test]
    fn quantify_linear_full_range() {
        let f = DependencyFunction::linear(2.0, 0.0, range(0.0, 5.0), range(0.0, 10.0));
        // f⁻¹(s) = s/2 telescopes to (0 − 5) / 9.
        let value = quantify_parameter(&f, 0.0, 10.0).unwrap();
        assert!((value - (-5.0 / 9.0)).abs() < 1e-12);
    }

    #[test]
    fn quantify_identity_full_range() {
        let d = range(0.0, 10.0);
        let f = DependencyFunction::linear(1.0, 0.0, d, d);
        let value = quantify_parameter(&f, 0.0, 10.0).unwrap();
        assert!((value - (-10.0 / 9.0)).abs() < 1e-12);
    }

    #[test]
    fn quantify_single_step_equals_closed_form() {
        let f = DependencyFunction::quadratic(1.0, 0.0, 0.0, range(0.0, 3.0), range(0.0, 9.0));
        let summed = quantify_parameter(&f, 4.0, 5.0).unwrap();
        let closed = quantify_parameter_closed_form(&f, 4.0, 5.0).unwrap();
        assert!((summed - closed).abs() < 1e-12);
        assert!((summed - (2.0 - 5.0f64.sqrt()) / 8.0).abs() < 1e-12);
    }

    #[test]
    fn quantify_rejects_invalid_ranges() {
        let d = range(0.0, 10.0);
        let f = DependencyFunction::linear(1.0, 0.0, d, d);
        assert!(quantify_parameter(&f, 5.0, 5.0).is_err());
        assert!(quantify_parameter(&f, -1.0, 5.0).is_err());
        assert!(quantify_parameter(&f, 5.0, 11.0).is_err());
    }

    #[test]
    fn telescoping_holds_for_random_functions_and_ranges() {
        let mut rng = substream(21, "telescope");
        use rand::Rng;
        for i in 0..300 {
            let kind = FunctionKind::ALL[i % 3];
            let f = DependencyFunction::fitted(
                kind,
                rng.random_bool(0.5),
                rng.random_bool(0.5),
                rng.random_range(0.05..=0.6),
                range(-3.0, 4.0),
                range(2.0, 14.0),
            );
            let l = rng.random_range(2.0..13.0);
            let u = rng.random_range(l + 0.01..=14.0);
            let summed = quantify_parameter(&f, l, u).unwrap();
            let closed = quantify_parameter_closed_form(&f, l, u).unwrap();
            let scale = closed.abs().max(1e-9);
            assert!(
                ((summed - closed) / scale).abs() < 1e-9,
                "telescoping broke for {kind:?} on [{l}, {u}]: {summed} vs {closed}"
            );
        }
    }

    #[test]
    fn fixed_count_bins_partition_the_domain() {
        let d = range(0.0, 10.0);
        let quality = Quality {
            id: 0,
            name: "q_0".into(),
            domain: d,
        };
        let one = quantify_conditions(&quality, &ConditionStrategy::FixedCount(1), &[]).unwrap();
        assert_eq!(one.ranges, vec![d]);
        let two = quantify_conditions(&quality, &ConditionStrategy::FixedCount(2), &[]).unwrap();
        assert_eq!(two.ranges, vec![range(0.0, 5.0), range(5.0, 10.0)]);
    }

    #[test]
    fn freedman_diaconis_bin_count() {
        let quality = Quality {
            id: 0,
            name: "q_0".into(),
            domain: range(0.0, 10.0),
        };
        let samples: Vec<f64> = (1..=8).map(|v| v as f64).collect();
        // IQR = 3.5 under linear interpolation, width = 2·3.5·8^(−1/3) = 3.5,
        // so ceil(10 / 3.5) = 3 bins.
        let binning =
            quantify_conditions(&quality, &ConditionStrategy::FreedmanDiaconis, &samples).unwrap();
        assert_eq!(binning.ranges.len(), 3);
        assert!(!binning.estimator_fallback);
    }

    #[test]
    fn freedman_diaconis_zero_iqr_falls_back() {
        let quality = Quality {
            id: 0,
            name: "q_0".into(),
            domain: range(0.0, 10.0),
        };
        let binning = quantify_conditions(
            &quality,
            &ConditionStrategy::FreedmanDiaconis,
            &[4.0, 4.0, 4.0, 4.0],
        )
        .unwrap();
        assert_eq!(binning.ranges, vec![range(0.0, 10.0)]);
        assert!(binning.estimator_fallback);
    }

    #[test]
    fn freedman_diaconis_needs_two_samples() {
        let quality = Quality {
            id: 0,
            name: "q_0".into(),
            domain: range(0.0, 10.0),
        };
        assert!(matches!(
            quantify_conditions(&quality, &ConditionStrategy::FreedmanDiaconis, &[1.0]),
            Err(RuleError::Estimator(_))
        ));
    }

    #[test]
    fn rule_count_is_known_pairs_times_bins() {
        let config = GeneratorConfig {
            p_count: 6,
            q_count: 3,
            pq_causal_share: 0.5,
            pq_known_share: 1.0,
            fanout_min: 1,
            fanout_max: 3,
            ..GeneratorConfig::default()
        };
        let space = build_pq_space(&config, &mut substream(5, "space")).unwrap();
        let known = space.known().len();
        let one = extract_rules(&space, &ConditionStrategy::FixedCount(1), &[]).unwrap();
        assert_eq!(one.rules.len(), known);
        let two = extract_rules(&space, &ConditionStrategy::FixedCount(2), &[]).unwrap();
        assert_eq!(two.rules.len(), known * 2);
    }

    #[test]
    fn no_known_pairs_no_rules() {
        let config = GeneratorConfig {
            p_count: 4,
            q_count: 2,
            pq_causal_share: 0.5,
            pq_known_share: 0.0,
            fanout_min: 1,
            fanout_max: 2,
            ..GeneratorConfig::default()
        };
        let space = build_pq_space(&config, &mut substream(6, "space")).unwrap();
        let extraction = extract_rules(&space, &ConditionStrategy::FixedCount(1), &[]).unwrap();
        assert!(extraction.rules.is_empty());
    }

    #[test]
    fn increasing_dependency_quantifies_negative() {
        let f = DependencyFunction::linear(2.0, 0.0, range(0.0, 5.0), range(0.0, 10.0));
        for (l, u) in [(0.0, 10.0), (2.0, 4.0), (7.0, 8.0)] {
            assert!(quantify_parameter(&f, l, u).unwrap() < 0.0);
        }
    }
}
