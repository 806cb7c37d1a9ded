//! Turtle serialization of knowledge graphs, plus the minimal parser needed
//! to read the files back.
//!
//! Output is canonical: prefix declarations first, then one triple per
//! line, sorted by (head IRI, relation IRI, serialized tail), LF endings,
//! numeric literals typed as `xsd:double` in their shortest round-tripping
//! form. Serializing a parsed graph reproduces the file byte for byte.

use std::io::Write;

use thiserror::Error;

use crate::kg::{
    EntityKind, KgError, KnowledgeGraph, Literal, RelationRole, Representation, TripleTail,
    ENTITY_NS, VOCAB_NS,
};

pub const XSD_NS: &str = "http://www.w3.org/2001/XMLSchema#";

#[derive(Debug, Error)]
pub enum TurtleError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("turtle parse error at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error(transparent)]
    Kg(#[from] KgError),
}

fn token_for_iri(iri: &str) -> String {
    if let Some(local) = iri.strip_prefix(ENTITY_NS) {
        format!("ent:{local}")
    } else if let Some(local) = iri.strip_prefix(VOCAB_NS) {
        format!("pdpk:{local}")
    } else {
        format!("<{iri}>")
    }
}

fn token_for_literal(lit: &Literal) -> String {
    format!("\"{}\"^^xsd:double", lit.lexical())
}

/// Serialize a knowledge graph as canonical Turtle.
pub fn write_turtle(kg: &KnowledgeGraph, sink: &mut impl Write) -> std::io::Result<()> {
    sink.write_all(turtle_string(kg).as_bytes())
}

/// The canonical Turtle document for a knowledge graph.
pub fn turtle_string(kg: &KnowledgeGraph) -> String {
    let has_literals = kg
        .triples()
        .any(|t| matches!(t.tail, TripleTail::Literal(_)));

    let mut statements: Vec<(String, String, String)> = kg
        .triples()
        .map(|t| {
            let head = kg.entity(t.head).iri.clone();
            let relation = kg.relation(t.relation).iri.clone();
            let tail = match &t.tail {
                TripleTail::Entity(e) => token_for_iri(&kg.entity(*e).iri),
                TripleTail::Literal(lit) => token_for_literal(lit),
            };
            (head, relation, tail)
        })
        .collect();
    statements.sort();

    let mut out = String::new();
    out.push_str(&format!("@prefix ent: <{ENTITY_NS}> .\n"));
    out.push_str(&format!("@prefix pdpk: <{VOCAB_NS}> .\n"));
    if has_literals {
        out.push_str(&format!("@prefix xsd: <{XSD_NS}> .\n"));
    }
    out.push('\n');
    for (head, relation, tail) in statements {
        out.push_str(&format!(
            "{} {} {} .\n",
            token_for_iri(&head),
            token_for_iri(&relation),
            tail
        ));
    }
    out
}

struct Tokenizer<'a> {
    rest: &'a str,
}

impl<'a> Tokenizer<'a> {
    fn new(line: &'a str) -> Self {
        Tokenizer { rest: line.trim() }
    }

    fn next(&mut self) -> Option<&'a str> {
        self.rest = self.rest.trim_start();
        if self.rest.is_empty() {
            return None;
        }
        let end = if self.rest.starts_with('"') {
            // Quoted literal with optional ^^type suffix; our values never
            // contain escaped quotes.
            let close = self.rest[1..].find('"')? + 1;
            self.rest[close + 1..]
                .find(char::is_whitespace)
                .map(|i| close + 1 + i)
                .unwrap_or(self.rest.len())
        } else {
            self.rest
                .find(char::is_whitespace)
                .unwrap_or(self.rest.len())
        };
        let token = &self.rest[..end];
        self.rest = &self.rest[end..];
        Some(token)
    }
}

fn expand<'a>(
    token: &'a str,
    prefixes: &[(String, String)],
    line: usize,
) -> Result<String, TurtleError> {
    if let Some(stripped) = token.strip_prefix('<') {
        let iri = stripped.strip_suffix('>').ok_or(TurtleError::Parse {
            line,
            message: format!("unterminated IRI {token}"),
        })?;
        return Ok(iri.to_string());
    }
    for (prefix, ns) in prefixes {
        if let Some(local) = token.strip_prefix(prefix.as_str()) {
            return Ok(format!("{ns}{local}"));
        }
    }
    Err(TurtleError::Parse {
        line,
        message: format!("unknown prefix in token {token}"),
    })
}

/// Relation roles per representation; parsing re-derives what `build_kg`
/// assigned.
fn relation_role(representation: Representation, local: &str) -> Option<RelationRole> {
    use RelationRole::{Annotation, Structural};
    match (representation, local) {
        (Representation::ChE, "hasCondition" | "adjusts") => Some(Structural),
        (Representation::ChEEta, "implies" | "adjusts") => Some(Structural),
        (Representation::ChLEta, "implies") => Some(Structural),
        (
            Representation::ChLEta,
            "hasAdjustment" | "adjustmentValue" | "conditionLower" | "conditionUpper",
        ) => Some(Annotation),
        (Representation::ReiE, "hasCondition" | "hasAdjustment" | "onParameter") => {
            Some(Structural)
        }
        _ => None,
    }
}

/// Parse a canonical Turtle document back into a knowledge graph.
pub fn parse_turtle(text: &str, representation: Representation) -> Result<KnowledgeGraph, TurtleError> {
    let mut kg = KnowledgeGraph::new(representation);
    let mut prefixes: Vec<(String, String)> = Vec::new();

    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut tokens = Tokenizer::new(line);
        let first = tokens.next().unwrap_or_default();
        if first == "@prefix" {
            let name = tokens.next().ok_or(TurtleError::Parse {
                line: line_no,
                message: "missing prefix name".into(),
            })?;
            let iri = tokens.next().ok_or(TurtleError::Parse {
                line: line_no,
                message: "missing prefix IRI".into(),
            })?;
            let ns = expand(iri, &[], line_no)?;
            prefixes.push((name.to_string(), ns));
            continue;
        }

        let rel_token = tokens.next().ok_or(TurtleError::Parse {
            line: line_no,
            message: "missing relation".into(),
        })?;
        let tail_token = tokens.next().ok_or(TurtleError::Parse {
            line: line_no,
            message: "missing object".into(),
        })?;
        match tokens.next() {
            Some(".") => {}
            other => {
                return Err(TurtleError::Parse {
                    line: line_no,
                    message: format!("expected terminating '.', got {other:?}"),
                })
            }
        }

        let head_iri = expand(first, &prefixes, line_no)?;
        let rel_iri = expand(rel_token, &prefixes, line_no)?;

        let head_local = head_iri.strip_prefix(ENTITY_NS).ok_or(TurtleError::Parse {
            line: line_no,
            message: format!("subject {head_iri} outside the entity namespace"),
        })?;
        let head_kind = EntityKind::from_local_name(head_local)?;
        let head = kg.add_entity(head_iri.clone(), head_kind);

        let rel_local = rel_iri.strip_prefix(VOCAB_NS).ok_or(TurtleError::Parse {
            line: line_no,
            message: format!("relation {rel_iri} outside the vocab namespace"),
        })?;
        let role = relation_role(representation, rel_local).ok_or(TurtleError::Parse {
            line: line_no,
            message: format!("relation {rel_local} not part of representation {representation}"),
        })?;
        let relation = kg.add_relation(rel_iri, role);

        let tail = if let Some(rest) = tail_token.strip_prefix('"') {
            let close = rest.find('"').ok_or(TurtleError::Parse {
                line: line_no,
                message: "unterminated literal".into(),
            })?;
            let lexical = &rest[..close];
            let value: f64 = lexical.parse().map_err(|_| TurtleError::Parse {
                line: line_no,
                message: format!("invalid double literal {lexical}"),
            })?;
            TripleTail::Literal(Literal::double(value))
        } else {
            let iri = expand(tail_token, &prefixes, line_no)?;
            let local = iri.strip_prefix(ENTITY_NS).ok_or(TurtleError::Parse {
                line: line_no,
                message: format!("object {iri} outside the entity namespace"),
            })?;
            let kind = EntityKind::from_local_name(local)?;
            TripleTail::Entity(kg.add_entity(iri, kind))
        };

        kg.insert(head, relation, tail);
    }
    Ok(kg)
}
