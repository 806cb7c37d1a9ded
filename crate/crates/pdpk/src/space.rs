//! The parameter-quality space: bounded process parameters, bounded quality
//! characteristics, and the causal dependency functions linking them.
//!
//! Each dependency is a strictly monotone function from a parameter domain
//! onto a quality domain, so its inverse and the derivative of that inverse
//! are well defined everywhere. A subset of the dependencies is flagged as
//! known to the simulated expert; only those feed the knowledge graphs and
//! the exploitative mitigation strategy.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, GeneratorConfig};
use crate::random::SeededRng;
use rand::Rng;

/// Relative slack applied to domain membership checks so that values which
/// are in-range up to floating-point roundoff are not rejected.
const DOMAIN_TOL: f64 = 1e-9;

/// Forward slopes below this magnitude make the inverse derivative blow up.
const SINGULARITY_EPS: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum SpaceError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("value {value} outside domain [{min}, {max}]")]
    Domain { value: f64, min: f64, max: f64 },
    #[error("inverse derivative undefined at q = {q}: forward slope below {SINGULARITY_EPS:e}")]
    Singularity { q: f64 },
}

/// A closed interval of admissible values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ValueRange {
    pub min: f64,
    pub max: f64,
}

impl ValueRange {
    pub fn new(min: f64, max: f64) -> Result<Self, ConfigError> {
        if !(min < max) || !min.is_finite() || !max.is_finite() {
            return Err(ConfigError::invalid(
                "range",
                format!("requires finite min < max, got [{min}, {max}]"),
            ));
        }
        Ok(Self { min, max })
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }

    /// Membership check with a small relative tolerance for roundoff.
    pub fn contains(&self, value: f64) -> bool {
        let tol = DOMAIN_TOL * self.width();
        value >= self.min - tol && value <= self.max + tol
    }

    pub fn clamp(&self, value: f64) -> f64 {
        value.clamp(self.min, self.max)
    }

    /// Position of `value` inside the range, 0 at `min`, 1 at `max`.
    pub fn relative(&self, value: f64) -> f64 {
        (value - self.min) / self.width()
    }

    fn check(&self, value: f64) -> Result<(), SpaceError> {
        if self.contains(value) {
            Ok(())
        } else {
            Err(SpaceError::Domain {
                value,
                min: self.min,
                max: self.max,
            })
        }
    }
}

/// An adjustable process parameter with a bounded domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Parameter {
    pub id: usize,
    pub name: String,
    pub domain: ValueRange,
}

/// An observable quality characteristic with a bounded domain.
///
/// By convention `domain.min` is the defect-free optimum; larger values are
/// worse.
#[derive(Debug, Clone, PartialEq)]
pub struct Quality {
    pub id: usize,
    pub name: String,
    pub domain: ValueRange,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionKind {
    Linear,
    Quadratic,
    Logarithmic,
}

impl FunctionKind {
    pub const ALL: [FunctionKind; 3] = [
        FunctionKind::Linear,
        FunctionKind::Quadratic,
        FunctionKind::Logarithmic,
    ];
}

/// A strictly monotone function from a parameter domain onto a quality
/// domain, stored with the coefficients of its analytic form.
///
/// Coefficient layout per kind:
/// - linear `[a, b]`: `f(p) = a·p + b`
/// - quadratic `[a, v, c]`: `f(p) = a·(p − v)² + c`, vertex `v` at or outside
///   an endpoint of the source domain so a single monotone branch covers it
/// - logarithmic `[a, s, b]`: `f(p) = a·ln(p − s) + b` with `s < source.min`
#[derive(Debug, Clone, PartialEq)]
pub struct DependencyFunction {
    pub kind: FunctionKind,
    pub coefficients: Vec<f64>,
    pub source_domain: ValueRange,
    pub target_domain: ValueRange,
}

impl DependencyFunction {
    pub fn linear(a: f64, b: f64, source: ValueRange, target: ValueRange) -> Self {
        Self {
            kind: FunctionKind::Linear,
            coefficients: vec![a, b],
            source_domain: source,
            target_domain: target,
        }
    }

    pub fn quadratic(a: f64, v: f64, c: f64, source: ValueRange, target: ValueRange) -> Self {
        Self {
            kind: FunctionKind::Quadratic,
            coefficients: vec![a, v, c],
            source_domain: source,
            target_domain: target,
        }
    }

    pub fn logarithmic(a: f64, s: f64, b: f64, source: ValueRange, target: ValueRange) -> Self {
        Self {
            kind: FunctionKind::Logarithmic,
            coefficients: vec![a, s, b],
            source_domain: source,
            target_domain: target,
        }
    }

    /// Fit a function of the given kind so that the source endpoints map
    /// exactly onto the target endpoints (swapped when `increasing` is
    /// false). `shape` controls curvature: for quadratics it is the vertex
    /// offset beyond the chosen endpoint in units of the source width, for
    /// logarithms the shift below `source.min` in the same units. A strictly
    /// positive offset keeps the forward slope bounded away from zero, so
    /// the inverse derivative stays finite over the whole quality domain.
    pub fn fitted(
        kind: FunctionKind,
        increasing: bool,
        vertex_left: bool,
        shape: f64,
        source: ValueRange,
        target: ValueRange,
    ) -> Self {
        let w = source.width();
        let (t0, t1) = if increasing {
            (target.min, target.max)
        } else {
            (target.max, target.min)
        };
        match kind {
            FunctionKind::Linear => {
                let a = (t1 - t0) / w;
                let b = t0 - a * source.min;
                Self::linear(a, b, source, target)
            }
            FunctionKind::Quadratic => {
                let v = if vertex_left {
                    source.min - shape * w
                } else {
                    source.max + shape * w
                };
                let u0 = (source.min - v).powi(2);
                let u1 = (source.max - v).powi(2);
                let a = (t1 - t0) / (u1 - u0);
                let c = t0 - a * u0;
                Self::quadratic(a, v, c, source, target)
            }
            FunctionKind::Logarithmic => {
                let s = source.min - shape * w;
                let u0 = (source.min - s).ln();
                let u1 = (source.max - s).ln();
                let a = (t1 - t0) / (u1 - u0);
                let b = t0 - a * u0;
                Self::logarithmic(a, s, b, source, target)
            }
        }
    }

    /// Evaluate the function at a parameter value.
    pub fn forward(&self, p_value: f64) -> Result<f64, SpaceError> {
        self.source_domain.check(p_value)?;
        Ok(self.forward_unchecked(p_value))
    }

    fn forward_unchecked(&self, p: f64) -> f64 {
        match self.kind {
            FunctionKind::Linear => self.coefficients[0] * p + self.coefficients[1],
            FunctionKind::Quadratic => {
                let [a, v, c] = [
                    self.coefficients[0],
                    self.coefficients[1],
                    self.coefficients[2],
                ];
                a * (p - v).powi(2) + c
            }
            FunctionKind::Logarithmic => {
                let [a, s, b] = [
                    self.coefficients[0],
                    self.coefficients[1],
                    self.coefficients[2],
                ];
                a * (p - s).ln() + b
            }
        }
    }

    /// Evaluate the inverse at a quality value.
    pub fn inverse(&self, q_value: f64) -> Result<f64, SpaceError> {
        self.target_domain.check(q_value)?;
        Ok(match self.kind {
            FunctionKind::Linear => (q_value - self.coefficients[1]) / self.coefficients[0],
            FunctionKind::Quadratic => {
                let [a, v, c] = [
                    self.coefficients[0],
                    self.coefficients[1],
                    self.coefficients[2],
                ];
                // Roundoff at the vertex-side endpoint can push the radicand
                // marginally below zero.
                let radicand = ((q_value - c) / a).max(0.0);
                let root = radicand.sqrt();
                if v <= self.source_domain.min {
                    v + root
                } else {
                    v - root
                }
            }
            FunctionKind::Logarithmic => {
                let [a, s, b] = [
                    self.coefficients[0],
                    self.coefficients[1],
                    self.coefficients[2],
                ];
                s + ((q_value - b) / a).exp()
            }
        })
    }

    /// Slope of the forward function at a parameter value.
    pub fn forward_derivative(&self, p: f64) -> f64 {
        match self.kind {
            FunctionKind::Linear => self.coefficients[0],
            FunctionKind::Quadratic => {
                2.0 * self.coefficients[0] * (p - self.coefficients[1])
            }
            FunctionKind::Logarithmic => self.coefficients[0] / (p - self.coefficients[1]),
        }
    }

    /// Derivative of the inverse, `d/dq f⁻¹(q) = 1 / f′(f⁻¹(q))`.
    pub fn inverse_derivative(&self, q_value: f64) -> Result<f64, SpaceError> {
        let p = self.inverse(q_value)?;
        let slope = self.forward_derivative(p);
        if slope.abs() < SINGULARITY_EPS {
            return Err(SpaceError::Singularity { q: q_value });
        }
        Ok(1.0 / slope)
    }

    /// Checks strict monotonicity on an `n`-point grid over the source domain.
    pub fn is_strictly_monotone(&self, n: usize) -> bool {
        let w = self.source_domain.width();
        let values: Vec<f64> = (0..n)
            .map(|i| {
                let p = self.source_domain.min + w * i as f64 / (n - 1) as f64;
                self.forward_unchecked(p)
            })
            .collect();
        let increasing = values.windows(2).all(|w| w[0] < w[1]);
        let decreasing = values.windows(2).all(|w| w[0] > w[1]);
        increasing || decreasing
    }
}

/// The ground truth of the simulation: parameters, qualities, the causal
/// dependency map and the subset of dependencies known to the expert.
#[derive(Debug, Clone, PartialEq)]
pub struct PQSpace {
    parameters: Vec<Parameter>,
    qualities: Vec<Quality>,
    dependencies: BTreeMap<(usize, usize), DependencyFunction>,
    known: BTreeSet<(usize, usize)>,
}

impl PQSpace {
    pub fn new(
        parameters: Vec<Parameter>,
        qualities: Vec<Quality>,
        dependencies: BTreeMap<(usize, usize), DependencyFunction>,
        known: BTreeSet<(usize, usize)>,
    ) -> Self {
        debug_assert!(known.iter().all(|pair| dependencies.contains_key(pair)));
        Self {
            parameters,
            qualities,
            dependencies,
            known,
        }
    }

    pub fn parameters(&self) -> &[Parameter] {
        &self.parameters
    }

    pub fn qualities(&self) -> &[Quality] {
        &self.qualities
    }

    pub fn dependencies(&self) -> &BTreeMap<(usize, usize), DependencyFunction> {
        &self.dependencies
    }

    pub fn dependency(&self, parameter: usize, quality: usize) -> Option<&DependencyFunction> {
        self.dependencies.get(&(parameter, quality))
    }

    pub fn known(&self) -> &BTreeSet<(usize, usize)> {
        &self.known
    }

    pub fn is_known(&self, parameter: usize, quality: usize) -> bool {
        self.known.contains(&(parameter, quality))
    }

    /// `P_{q_j}`: ids of the parameters with a causal influence on `quality`.
    pub fn params_affecting(&self, quality: usize) -> Vec<usize> {
        self.dependencies
            .keys()
            .filter(|(_, j)| *j == quality)
            .map(|(k, _)| *k)
            .collect()
    }

    /// Ids of the qualities affected by `parameter`.
    pub fn qualities_affected_by(&self, parameter: usize) -> Vec<usize> {
        self.dependencies
            .range((parameter, 0)..=(parameter, usize::MAX))
            .map(|((_, j), _)| *j)
            .collect()
    }

    /// Parameters that influence at least one quality, ascending by id.
    pub fn adjustable_parameters(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.dependencies.keys().map(|(k, _)| *k).collect();
        ids.dedup();
        ids.sort_unstable();
        ids.dedup();
        ids
    }

    /// Qualities influenced by at least one parameter, ascending by id.
    pub fn affected_qualities(&self) -> Vec<usize> {
        let mut ids: Vec<usize> = self.dependencies.keys().map(|(_, j)| *j).collect();
        ids.sort_unstable();
        ids.dedup();
        ids
    }
}

/// Draw `n` distinct values from `0..limit`, order as sampled.
fn sample_distinct(rng: &mut SeededRng, n: usize, limit: usize) -> Vec<usize> {
    debug_assert!(n <= limit);
    let mut pool: Vec<usize> = (0..limit).collect();
    for i in 0..n {
        let j = rng.random_range(i..limit);
        pool.swap(i, j);
    }
    pool.truncate(n);
    pool
}

/// Draw per-parameter fan-outs and repair them toward the global target
/// count. Trimming and padding stay within the per-parameter bounds; when
/// the bounds and the target conflict, the achieved total is allowed to
/// miss the target (it is recorded in the manifest). A parameter may end
/// up with no dependencies at all, which removes it from the bounds.
fn sample_fanouts(
    rng: &mut SeededRng,
    p_count: usize,
    target: usize,
    fanout_min: usize,
    fanout_max: usize,
) -> Vec<usize> {
    let mut fanouts: Vec<usize> = (0..p_count)
        .map(|_| rng.random_range(fanout_min..=fanout_max))
        .collect();
    let mut total: usize = fanouts.iter().sum();

    while total > target {
        let above: Vec<usize> = (0..p_count)
            .filter(|&k| fanouts[k] > fanout_min)
            .collect();
        if let Some(&k) = pick(rng, &above) {
            fanouts[k] -= 1;
            total -= 1;
            continue;
        }
        // Everyone sits at the lower bound; dropping a parameter entirely is
        // the only remaining move. Take it only while it gets us closer.
        let at_min: Vec<usize> = (0..p_count)
            .filter(|&k| fanouts[k] == fanout_min && fanout_min > 0)
            .collect();
        if 2 * (total - target) > fanout_min {
            if let Some(&k) = pick(rng, &at_min) {
                total -= fanouts[k];
                fanouts[k] = 0;
                continue;
            }
        }
        break;
    }

    while total < target {
        let below: Vec<usize> = (0..p_count)
            .filter(|&k| fanouts[k] >= fanout_min && fanouts[k] < fanout_max)
            .collect();
        if let Some(&k) = pick(rng, &below) {
            fanouts[k] += 1;
            total += 1;
            continue;
        }
        let dropped: Vec<usize> = (0..p_count).filter(|&k| fanouts[k] == 0).collect();
        if fanout_min > 0 && 2 * (target - total) > fanout_min {
            if let Some(&k) = pick(rng, &dropped) {
                fanouts[k] = fanout_min;
                total += fanout_min;
                continue;
            }
        }
        break;
    }

    fanouts
}

fn pick<'a>(rng: &mut SeededRng, candidates: &'a [usize]) -> Option<&'a usize> {
    if candidates.is_empty() {
        None
    } else {
        Some(&candidates[rng.random_range(0..candidates.len())])
    }
}

/// Construct a [`PQSpace`] from the configuration. Deterministic for a
/// fixed RNG state.
pub fn build_pq_space(config: &GeneratorConfig, rng: &mut SeededRng) -> Result<PQSpace, SpaceError> {
    let p_count = config.p_count;
    let q_count = config.q_count;

    let parameters: Vec<Parameter> = (0..p_count)
        .map(|k| Parameter {
            id: k,
            name: format!("p_{k}"),
            domain: config.parameter_domain(k),
        })
        .collect();
    let qualities: Vec<Quality> = (0..q_count)
        .map(|j| Quality {
            id: j,
            name: format!("q_{j}"),
            domain: config.quality_domain(j),
        })
        .collect();

    if config.fanout_min > q_count {
        return Err(ConfigError::invalid(
            "fanout_min",
            format!("fan-out lower bound {} exceeds quality count {q_count}", config.fanout_min),
        )
        .into());
    }
    let fanout_max = config.fanout_max.min(q_count);
    let target = (config.pq_causal_share * (p_count * q_count) as f64).round() as usize;
    if target > p_count * fanout_max {
        return Err(ConfigError::invalid(
            "pq_causal_share",
            format!(
                "requested {target} causal pairs but the fan-out bounds admit at most {}",
                p_count * fanout_max
            ),
        )
        .into());
    }
    if config.function_kinds.is_empty() {
        return Err(ConfigError::invalid("function_kinds", "must enable at least one kind").into());
    }

    let mut dependencies = BTreeMap::new();
    let mut known = BTreeSet::new();

    if target > 0 {
        let fanouts = sample_fanouts(rng, p_count, target, config.fanout_min, fanout_max);
        let kinds: Vec<FunctionKind> = config.function_kinds.iter().copied().collect();
        for (k, &fanout) in fanouts.iter().enumerate() {
            let affected = sample_distinct(rng, fanout, q_count);
            for j in affected {
                let kind = kinds[rng.random_range(0..kinds.len())];
                let increasing = rng.random_bool(0.5);
                let vertex_left = rng.random_bool(0.5);
                let shape = match kind {
                    FunctionKind::Linear => 0.0,
                    FunctionKind::Quadratic => rng.random_range(0.1..=0.6),
                    FunctionKind::Logarithmic => rng.random_range(0.05..=0.5),
                };
                let f = DependencyFunction::fitted(
                    kind,
                    increasing,
                    vertex_left,
                    shape,
                    parameters[k].domain,
                    qualities[j].domain,
                );
                debug_assert!(f.is_strictly_monotone(100));
                dependencies.insert((k, j), f);
            }
        }

        let keys: Vec<(usize, usize)> = dependencies.keys().copied().collect();
        let known_count = (config.pq_known_share * keys.len() as f64).round() as usize;
        for idx in sample_distinct(rng, known_count, keys.len()) {
            known.insert(keys[idx]);
        }
    }

    Ok(PQSpace::new(parameters, qualities, dependencies, known))
}
