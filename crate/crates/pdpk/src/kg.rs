//! Knowledge graphs over the extracted rules, in four representation
//! patterns.
//!
//! Each rule links a quality condition to a quantified parameter
//! adjustment. The patterns differ in how the ternary structure is encoded:
//!
//! - `ch_e`: chained binary relations through an adjustment entity,
//!   `q —hasCondition→ adj —adjusts→ p`.
//! - `ch_e_eta`: the chain plus the unquantified high-level edge
//!   `q —implies→ p`; the condition edge reuses the `implies` relation.
//! - `ch_l_eta`: only `q —implies→ p` between domain entities; the
//!   quantification lives in numeric literals attached to a per-rule anchor
//!   entity. The anchor layer and its relations are counted separately from
//!   the entity graph.
//! - `rei_e`: a reified statement entity with `hasCondition`,
//!   `hasAdjustment` and `onParameter` edges; the adjustment value is
//!   carried by a per-rule quantification entity.
//!
//! Quantification values that are not representable in-graph (every pattern
//! except `ch_l_eta`) are kept in the entity registry as annotations and
//! exported through the dataset manifest.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::rules::Rule;
use crate::space::ValueRange;

pub const VOCAB_NS: &str = "http://purl.org/pdpk/vocab#";
pub const ENTITY_NS: &str = "http://purl.org/pdpk/entity#";

#[derive(Debug, Error)]
pub enum KgError {
    #[error("cannot build a knowledge graph from an empty rule set")]
    EmptyRuleSet,
    #[error("entity {0} is not a recognised graph entity")]
    MalformedEntity(String),
    #[error("no quantification value available for {0} (annotations missing and no space given)")]
    MissingQuantification(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Representation {
    ChE,
    ChEEta,
    ChLEta,
    ReiE,
}

impl Representation {
    pub const ALL: [Representation; 4] = [
        Representation::ChE,
        Representation::ChEEta,
        Representation::ChLEta,
        Representation::ReiE,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            Representation::ChE => "ch_e",
            Representation::ChEEta => "ch_e_eta",
            Representation::ChLEta => "ch_l_eta",
            Representation::ReiE => "rei_e",
        }
    }

    pub fn from_str(s: &str) -> Option<Representation> {
        Representation::ALL.into_iter().find(|r| r.as_str() == s)
    }

    /// Hops needed to reach the parameter layer from a quality entity: one
    /// where the high-level implies edge links them directly, two where the
    /// path runs through an adjustment or statement node.
    pub fn default_propagation_steps(&self) -> usize {
        match self {
            Representation::ChEEta | Representation::ChLEta => 1,
            Representation::ChE | Representation::ReiE => 2,
        }
    }
}

impl std::fmt::Display for Representation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EntityId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct RelationId(pub usize);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntityKind {
    Parameter(usize),
    Quality(usize),
    /// Chained adjustment node (`adj_…`).
    Adjustment,
    /// Reified statement node (`st_…`).
    Statement,
    /// Per-rule quantification entity (`rho_…`).
    Quantification,
    /// Per-rule anchor carrying the literal attachments (`lit_…`).
    LiteralAnchor,
}

impl EntityKind {
    /// Recover the kind from an entity IRI's local name.
    pub fn from_local_name(local: &str) -> Result<EntityKind, KgError> {
        let mut parts = local.splitn(2, '_');
        let prefix = parts.next().unwrap_or_default();
        let rest = parts.next();
        let index = || -> Result<usize, KgError> {
            rest.and_then(|r| r.parse().ok())
                .ok_or_else(|| KgError::MalformedEntity(local.to_string()))
        };
        match prefix {
            "p" => Ok(EntityKind::Parameter(index()?)),
            "q" => Ok(EntityKind::Quality(index()?)),
            "adj" => Ok(EntityKind::Adjustment),
            "st" => Ok(EntityKind::Statement),
            "rho" => Ok(EntityKind::Quantification),
            "lit" => Ok(EntityKind::LiteralAnchor),
            _ => Err(KgError::MalformedEntity(local.to_string())),
        }
    }
}

/// Whether a relation belongs to the entity graph proper or to the literal
/// annotation layer, which Table-style statistics count separately.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RelationRole {
    Structural,
    Annotation,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EntityInfo {
    pub iri: String,
    pub kind: EntityKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RelationInfo {
    pub iri: String,
    pub role: RelationRole,
}

/// A typed numeric literal (`xsd:double`). Negative zero is normalised so
/// value equality and lexical equality coincide.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Literal(f64);

impl Literal {
    pub fn double(value: f64) -> Literal {
        Literal(if value == 0.0 { 0.0 } else { value })
    }

    pub fn value(&self) -> f64 {
        self.0
    }

    pub fn lexical(&self) -> String {
        format_double(self.0)
    }
}

impl Eq for Literal {}

impl Ord for Literal {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

impl PartialOrd for Literal {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

/// Canonical, shortest round-tripping decimal form of a double.
pub fn format_double(value: f64) -> String {
    format!("{value}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum TripleTail {
    Entity(EntityId),
    Literal(Literal),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Triple {
    pub head: EntityId,
    pub relation: RelationId,
    pub tail: TripleTail,
}

/// The (j, k, [l, u], ρ̂) tuple carried by quantification-bearing entities.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RuleAnnotation {
    pub quality: usize,
    pub parameter: usize,
    pub lower: f64,
    pub upper: f64,
    pub adjustment: f64,
}

/// A set of triples under one representation pattern, with entity and
/// relation registries.
#[derive(Debug, Clone, PartialEq)]
pub struct KnowledgeGraph {
    representation: Representation,
    entities: Vec<EntityInfo>,
    entity_index: BTreeMap<String, EntityId>,
    relations: Vec<RelationInfo>,
    relation_index: BTreeMap<String, RelationId>,
    triples: BTreeSet<Triple>,
    annotations: BTreeMap<EntityId, RuleAnnotation>,
}

impl KnowledgeGraph {
    pub fn new(representation: Representation) -> Self {
        KnowledgeGraph {
            representation,
            entities: Vec::new(),
            entity_index: BTreeMap::new(),
            relations: Vec::new(),
            relation_index: BTreeMap::new(),
            triples: BTreeSet::new(),
            annotations: BTreeMap::new(),
        }
    }

    pub fn representation(&self) -> Representation {
        self.representation
    }

    pub fn add_entity(&mut self, iri: String, kind: EntityKind) -> EntityId {
        if let Some(&id) = self.entity_index.get(&iri) {
            return id;
        }
        let id = EntityId(self.entities.len());
        self.entity_index.insert(iri.clone(), id);
        self.entities.push(EntityInfo { iri, kind });
        id
    }

    pub fn add_relation(&mut self, iri: String, role: RelationRole) -> RelationId {
        if let Some(&id) = self.relation_index.get(&iri) {
            return id;
        }
        let id = RelationId(self.relations.len());
        self.relation_index.insert(iri.clone(), id);
        self.relations.push(RelationInfo { iri, role });
        id
    }

    pub fn insert(&mut self, head: EntityId, relation: RelationId, tail: TripleTail) {
        self.triples.insert(Triple { head, relation, tail });
    }

    pub fn annotate(&mut self, entity: EntityId, annotation: RuleAnnotation) {
        self.annotations.insert(entity, annotation);
    }

    pub fn entities(&self) -> &[EntityInfo] {
        &self.entities
    }

    pub fn relations(&self) -> &[RelationInfo] {
        &self.relations
    }

    pub fn entity(&self, id: EntityId) -> &EntityInfo {
        &self.entities[id.0]
    }

    pub fn relation(&self, id: RelationId) -> &RelationInfo {
        &self.relations[id.0]
    }

    pub fn entity_id(&self, iri: &str) -> Option<EntityId> {
        self.entity_index.get(iri).copied()
    }

    pub fn relation_id(&self, iri: &str) -> Option<RelationId> {
        self.relation_index.get(iri).copied()
    }

    pub fn triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter()
    }

    pub fn triple_count(&self) -> usize {
        self.triples.len()
    }

    pub fn contains(&self, triple: &Triple) -> bool {
        self.triples.contains(triple)
    }

    pub fn annotations(&self) -> &BTreeMap<EntityId, RuleAnnotation> {
        &self.annotations
    }

    fn is_structural(&self, relation: RelationId) -> bool {
        self.relations[relation.0].role == RelationRole::Structural
    }

    /// Triples of the entity graph proper: structural relations only.
    pub fn structural_triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples.iter().filter(|t| self.is_structural(t.relation))
    }

    /// All triples whose tail is an entity, including annotation-layer
    /// links. This is the triple universe link-prediction models train on.
    pub fn entity_triples(&self) -> impl Iterator<Item = &Triple> {
        self.triples
            .iter()
            .filter(|t| matches!(t.tail, TripleTail::Entity(_)))
    }

    /// Number of structural edges (what the statistics report as edges).
    pub fn edge_count(&self) -> usize {
        self.structural_triples().count()
    }

    /// Entities participating in the structural graph.
    pub fn structural_entities(&self) -> BTreeSet<EntityId> {
        let mut out = BTreeSet::new();
        for t in self.structural_triples() {
            out.insert(t.head);
            if let TripleTail::Entity(e) = t.tail {
                out.insert(e);
            }
        }
        out
    }

    pub fn vertex_count(&self) -> usize {
        self.structural_entities().len()
    }

    /// Number of structural relation types.
    pub fn relation_count(&self) -> usize {
        self.relations
            .iter()
            .filter(|r| r.role == RelationRole::Structural)
            .count()
    }

    /// Remove the given triples; registries are left untouched.
    pub fn without_triples(&self, remove: &BTreeSet<Triple>) -> KnowledgeGraph {
        let mut out = self.clone();
        out.triples = self.triples.difference(remove).copied().collect();
        out
    }

    /// Ids of the quality entities, ascending by quality index.
    pub fn quality_entities(&self) -> Vec<(usize, EntityId)> {
        let mut out: Vec<(usize, EntityId)> = self
            .entities
            .iter()
            .enumerate()
            .filter_map(|(i, e)| match e.kind {
                EntityKind::Quality(j) => Some((j, EntityId(i))),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out
    }
}

fn vocab(local: &str) -> String {
    format!("{VOCAB_NS}{local}")
}

fn entity(local: String) -> String {
    format!("{ENTITY_NS}{local}")
}

fn rule_key(rule: &Rule) -> String {
    format!(
        "{}_{}_{}_{}",
        rule.quality,
        rule.parameter,
        format_double(rule.condition_range.min),
        format_double(rule.condition_range.max)
    )
}

fn annotation(rule: &Rule) -> RuleAnnotation {
    RuleAnnotation {
        quality: rule.quality,
        parameter: rule.parameter,
        lower: rule.condition_range.min,
        upper: rule.condition_range.max,
        adjustment: rule.quantified_adjustment,
    }
}

/// Render a rule list as a knowledge graph under the given representation.
/// Duplicate rules collapse under set semantics.
pub fn build_kg(rules: &[Rule], representation: Representation) -> Result<KnowledgeGraph, KgError> {
    if rules.is_empty() {
        return Err(KgError::EmptyRuleSet);
    }
    let mut kg = KnowledgeGraph::new(representation);

    match representation {
        Representation::ChE => {
            let has_condition = kg.add_relation(vocab("hasCondition"), RelationRole::Structural);
            let adjusts = kg.add_relation(vocab("adjusts"), RelationRole::Structural);
            for rule in rules {
                let q = kg.add_entity(
                    entity(format!("q_{}", rule.quality)),
                    EntityKind::Quality(rule.quality),
                );
                let p = kg.add_entity(
                    entity(format!("p_{}", rule.parameter)),
                    EntityKind::Parameter(rule.parameter),
                );
                let adj = kg.add_entity(
                    entity(format!("adj_{}", rule_key(rule))),
                    EntityKind::Adjustment,
                );
                kg.annotate(adj, annotation(rule));
                kg.insert(q, has_condition, TripleTail::Entity(adj));
                kg.insert(adj, adjusts, TripleTail::Entity(p));
            }
        }
        Representation::ChEEta => {
            let implies = kg.add_relation(vocab("implies"), RelationRole::Structural);
            let adjusts = kg.add_relation(vocab("adjusts"), RelationRole::Structural);
            for rule in rules {
                let q = kg.add_entity(
                    entity(format!("q_{}", rule.quality)),
                    EntityKind::Quality(rule.quality),
                );
                let p = kg.add_entity(
                    entity(format!("p_{}", rule.parameter)),
                    EntityKind::Parameter(rule.parameter),
                );
                let adj = kg.add_entity(
                    entity(format!("adj_{}", rule_key(rule))),
                    EntityKind::Adjustment,
                );
                kg.annotate(adj, annotation(rule));
                kg.insert(q, implies, TripleTail::Entity(adj));
                kg.insert(adj, adjusts, TripleTail::Entity(p));
                kg.insert(q, implies, TripleTail::Entity(p));
            }
        }
        Representation::ChLEta => {
            let implies = kg.add_relation(vocab("implies"), RelationRole::Structural);
            let has_adjustment = kg.add_relation(vocab("hasAdjustment"), RelationRole::Annotation);
            let value = kg.add_relation(vocab("adjustmentValue"), RelationRole::Annotation);
            let lower = kg.add_relation(vocab("conditionLower"), RelationRole::Annotation);
            let upper = kg.add_relation(vocab("conditionUpper"), RelationRole::Annotation);
            for rule in rules {
                let q = kg.add_entity(
                    entity(format!("q_{}", rule.quality)),
                    EntityKind::Quality(rule.quality),
                );
                let p = kg.add_entity(
                    entity(format!("p_{}", rule.parameter)),
                    EntityKind::Parameter(rule.parameter),
                );
                let anchor = kg.add_entity(
                    entity(format!("lit_{}", rule_key(rule))),
                    EntityKind::LiteralAnchor,
                );
                kg.insert(q, implies, TripleTail::Entity(p));
                kg.insert(q, has_adjustment, TripleTail::Entity(anchor));
                kg.insert(
                    anchor,
                    value,
                    TripleTail::Literal(Literal::double(rule.quantified_adjustment)),
                );
                kg.insert(
                    anchor,
                    lower,
                    TripleTail::Literal(Literal::double(rule.condition_range.min)),
                );
                kg.insert(
                    anchor,
                    upper,
                    TripleTail::Literal(Literal::double(rule.condition_range.max)),
                );
            }
        }
        Representation::ReiE => {
            let has_condition = kg.add_relation(vocab("hasCondition"), RelationRole::Structural);
            let has_adjustment = kg.add_relation(vocab("hasAdjustment"), RelationRole::Structural);
            let on_parameter = kg.add_relation(vocab("onParameter"), RelationRole::Structural);
            for rule in rules {
                let q = kg.add_entity(
                    entity(format!("q_{}", rule.quality)),
                    EntityKind::Quality(rule.quality),
                );
                let p = kg.add_entity(
                    entity(format!("p_{}", rule.parameter)),
                    EntityKind::Parameter(rule.parameter),
                );
                let st = kg.add_entity(
                    entity(format!("st_{}", rule_key(rule))),
                    EntityKind::Statement,
                );
                let quant = kg.add_entity(
                    entity(format!("rho_{}", rule_key(rule))),
                    EntityKind::Quantification,
                );
                kg.annotate(quant, annotation(rule));
                kg.insert(st, has_condition, TripleTail::Entity(q));
                kg.insert(st, has_adjustment, TripleTail::Entity(quant));
                kg.insert(st, on_parameter, TripleTail::Entity(p));
            }
        }
    }
    Ok(kg)
}

fn parse_rule_key(local: &str) -> Result<(usize, usize, f64, f64), KgError> {
    let err = || KgError::MalformedEntity(local.to_string());
    let parts: Vec<&str> = local.split('_').collect();
    if parts.len() != 5 {
        return Err(err());
    }
    Ok((
        parts[1].parse().map_err(|_| err())?,
        parts[2].parse().map_err(|_| err())?,
        parts[3].parse().map_err(|_| err())?,
        parts[4].parse().map_err(|_| err())?,
    ))
}

/// Recover the rule list from a knowledge graph.
///
/// `ch_l_eta` carries the quantification values in-graph; the entity-only
/// representations keep them in registry annotations (exported via the
/// manifest). For a graph freshly parsed from Turtle those annotations are
/// absent, in which case the values are recomputed from `space`.
pub fn rules_from_kg(
    kg: &KnowledgeGraph,
    space: Option<&crate::space::PQSpace>,
) -> Result<Vec<Rule>, KgError> {
    let mut rules = Vec::new();
    match kg.representation() {
        Representation::ChE | Representation::ChEEta | Representation::ReiE => {
            let carrier = if kg.representation() == Representation::ReiE {
                EntityKind::Quantification
            } else {
                EntityKind::Adjustment
            };
            for (idx, info) in kg.entities.iter().enumerate() {
                if info.kind != carrier {
                    continue;
                }
                let local = info.iri.strip_prefix(ENTITY_NS).unwrap_or(&info.iri);
                let (quality, parameter, lower, upper) = parse_rule_key(local)?;
                let adjustment = match kg.annotations.get(&EntityId(idx)) {
                    Some(a) => a.adjustment,
                    None => {
                        let f = space
                            .and_then(|s| s.dependency(parameter, quality))
                            .ok_or_else(|| KgError::MissingQuantification(info.iri.clone()))?;
                        crate::rules::quantify_parameter(f, lower, upper)
                            .map_err(|_| KgError::MissingQuantification(info.iri.clone()))?
                    }
                };
                rules.push(Rule {
                    quality,
                    parameter,
                    condition_range: ValueRange { min: lower, max: upper },
                    quantified_adjustment: adjustment,
                });
            }
        }
        Representation::ChLEta => {
            let value_rel = kg.relation_id(&vocab("adjustmentValue"));
            for (idx, info) in kg.entities.iter().enumerate() {
                if info.kind != EntityKind::LiteralAnchor {
                    continue;
                }
                let local = info.iri.strip_prefix(ENTITY_NS).unwrap_or(&info.iri);
                let (quality, parameter, lower, upper) = parse_rule_key(local)?;
                let adjustment = kg
                    .triples
                    .iter()
                    .find_map(|t| match (t.head, Some(t.relation) == value_rel, t.tail) {
                        (h, true, TripleTail::Literal(lit)) if h == EntityId(idx) => {
                            Some(lit.value())
                        }
                        _ => None,
                    })
                    .ok_or_else(|| KgError::MissingQuantification(info.iri.clone()))?;
                rules.push(Rule {
                    quality,
                    parameter,
                    condition_range: ValueRange { min: lower, max: upper },
                    quantified_adjustment: adjustment,
                });
            }
        }
    }
    rules.sort_by(|a, b| {
        (a.quality, a.parameter)
            .cmp(&(b.quality, b.parameter))
            .then(a.condition_range.min.total_cmp(&b.condition_range.min))
    });
    Ok(rules)
}
