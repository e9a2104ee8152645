//! The JSON certificate encoding.
//!
//! Keys appear in a fixed order and the canonical form sorts every array whose
//! order carries no meaning (blocks within a class, leaves of a star, groups,
//! hole, missing points). Class order and provenance order are preserved.

use std::path::Path;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::model::{Block, BlockClass, BlockKind, Certificate, Claimed, Coverage, TargetGraph, TargetShape};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported format version {0}")]
    Version(u32),
    #[error("{0}")]
    Schema(String),
}

#[derive(Debug, thiserror::Error)]
pub enum LoadError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CertificateWire {
    version: u32,
    target: TargetWire,
    classes: Vec<ClassWire>,
    claimed: ClaimedWire,
    provenance: Vec<String>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct TargetWire {
    variant: String,
    v: u32,
    lambda: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    groups: Option<Vec<Vec<u32>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    hole: Option<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClassWire {
    kind: String,
    coverage: CoverageWire,
    blocks: Vec<Vec<u32>>,
}

#[derive(Serialize, Deserialize)]
#[serde(untagged)]
enum CoverageWire {
    Tag(String),
    Partial(MissingWire),
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MissingWire {
    missing: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ClaimedWire {
    r: u32,
    s: u32,
    partial_r: u32,
    partial_s: u32,
}

fn to_wire(c: &Certificate) -> CertificateWire {
    let (variant, groups, hole) = match &c.target.shape {
        TargetShape::Complete { .. } => ("complete", None, None),
        TargetShape::Multipartite { groups } => ("multipartite", Some(groups.clone()), None),
        TargetShape::CompleteMinusHole { hole, .. } => ("complete_minus_hole", None, Some(hole.clone())),
    };
    CertificateWire {
        version: FORMAT_VERSION,
        target: TargetWire {
            variant: variant.to_string(),
            v: c.target.point_count(),
            lambda: c.target.lambda,
            groups,
            hole,
        },
        classes: c
            .classes
            .iter()
            .map(|class| ClassWire {
                kind: class.kind.tag().to_string(),
                coverage: match &class.coverage {
                    Coverage::Full => CoverageWire::Tag("full".to_string()),
                    Coverage::Partial { missing } => CoverageWire::Partial(MissingWire { missing: missing.clone() }),
                },
                blocks: class.blocks.iter().map(|b| b.points.clone()).collect(),
            })
            .collect(),
        claimed: ClaimedWire {
            r: c.claimed.r,
            s: c.claimed.s,
            partial_r: c.claimed.partial_r,
            partial_s: c.claimed.partial_s,
        },
        provenance: c.provenance.clone(),
    }
}

fn from_wire(w: CertificateWire) -> Result<Certificate, ParseError> {
    if w.version != FORMAT_VERSION {
        return Err(ParseError::Version(w.version));
    }
    let t = w.target;
    let shape = match (t.variant.as_str(), t.groups, t.hole) {
        ("complete", None, None) => TargetShape::Complete { v: t.v },
        ("multipartite", Some(groups), None) => {
            let n: u64 = groups.iter().map(|g| g.len() as u64).sum();
            if n != t.v as u64 {
                return Err(ParseError::Schema(format!(
                    "target v = {} but groups hold {n} points",
                    t.v
                )));
            }
            TargetShape::Multipartite { groups }
        }
        ("complete_minus_hole", None, Some(hole)) => TargetShape::CompleteMinusHole { v: t.v, hole },
        (variant, _, _) => {
            return Err(ParseError::Schema(format!("bad target descriptor for variant {variant:?}")));
        }
    };
    let target = TargetGraph { shape, lambda: t.lambda };
    let mut classes = Vec::with_capacity(w.classes.len());
    for (i, class) in w.classes.into_iter().enumerate() {
        let kind = BlockKind::from_tag(&class.kind)
            .ok_or_else(|| ParseError::Schema(format!("class {i}: unknown kind {:?}", class.kind)))?;
        let coverage = match class.coverage {
            CoverageWire::Tag(tag) if tag == "full" => Coverage::Full,
            CoverageWire::Tag(tag) => {
                return Err(ParseError::Schema(format!("class {i}: unknown coverage {tag:?}")));
            }
            CoverageWire::Partial(m) => Coverage::Partial { missing: m.missing },
        };
        let blocks = class.blocks.into_iter().map(|points| Block { kind, points }).collect();
        classes.push(BlockClass { kind, coverage, blocks });
    }
    let c = w.claimed;
    Ok(Certificate {
        target,
        classes,
        claimed: Claimed { r: c.r, s: c.s, partial_r: c.partial_r, partial_s: c.partial_s },
        provenance: w.provenance,
    })
}

/// Compact encoding of the certificate exactly as given.
pub fn encode(c: &Certificate) -> String {
    serde_json::to_string(&to_wire(c)).expect("certificate encodes")
}

/// Compact encoding of the canonical form.
pub fn encode_canonical(c: &Certificate) -> String {
    encode(&c.canonical())
}

/// Parses a certificate. Combinatorial validity is left to the verifier.
pub fn decode(text: &str) -> Result<Certificate, ParseError> {
    let wire: CertificateWire = serde_json::from_str(text)?;
    from_wire(wire)
}

/// SHA-256 of the canonical encoding, as lowercase hex.
pub fn content_hash(c: &Certificate) -> String {
    hex::encode(Sha256::digest(encode_canonical(c).as_bytes()))
}

pub fn load(path: &Path) -> Result<Certificate, LoadError> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| LoadError::Io { path: path.display().to_string(), source })?;
    decode(&text).map_err(|source| LoadError::Parse { path: path.display().to_string(), source })
}

/// Writes the canonical encoding followed by a newline.
pub fn save(path: &Path, c: &Certificate) -> std::io::Result<()> {
    let mut text = encode_canonical(c);
    text.push('\n');
    std::fs::write(path, text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Certificate {
        Certificate::new(
            TargetGraph::complete(4, 2),
            vec![
                BlockClass::full(BlockKind::Cycle4, vec![Block::cycle([0, 1, 2, 3])]),
                BlockClass::full(BlockKind::Cycle4, vec![Block::cycle([0, 2, 3, 1])]),
                BlockClass::full(BlockKind::Cycle4, vec![Block::cycle([0, 2, 1, 3])]),
            ],
            vec!["sample".into()],
        )
    }

    #[test]
    fn key_order_is_fixed() {
        let text = encode(&sample());
        assert!(text.starts_with(r#"{"version":1,"target":{"variant":"complete","v":4,"lambda":2},"classes":[{"kind":"C4","coverage":"full","blocks":[[0,1,2,3]]}"#));
        assert!(text.ends_with(r#""claimed":{"r":3,"s":0,"partial_r":0,"partial_s":0},"provenance":["sample"]}"#));
    }

    #[test]
    fn partial_and_hole_encoding() {
        let c = Certificate::new(
            TargetGraph::minus_hole(5, vec![4], 1),
            vec![BlockClass::partial(BlockKind::Star3, vec![Block::star(0, [3, 1, 2])], vec![4])],
            vec![],
        );
        let text = encode_canonical(&c);
        assert!(text.contains(r#""hole":[4]"#));
        assert!(text.contains(r#"{"kind":"K13","coverage":{"missing":[4]},"blocks":[[0,1,2,3]]}"#));
        assert_eq!(decode(&text).unwrap(), c.canonical());
    }

    #[test]
    fn round_trip_is_byte_identical() {
        let text = encode_canonical(&sample());
        let again = encode(&decode(&text).unwrap());
        assert_eq!(text, again);
    }

    #[test]
    fn parse_errors_are_distinct() {
        assert!(matches!(decode(""), Err(ParseError::Json(_))));
        let text = encode(&sample()).replace("\"C4\"", "\"C5\"");
        assert!(matches!(decode(&text), Err(ParseError::Schema(_))));
        let text = encode(&sample()).replace("\"version\":1", "\"version\":9");
        assert!(matches!(decode(&text), Err(ParseError::Version(9))));
        let text = encode(&sample()).replace("\"full\"", "\"most\"");
        assert!(matches!(decode(&text), Err(ParseError::Schema(_))));
    }

    #[test]
    fn hash_ignores_free_order() {
        let mut shuffled = sample();
        shuffled.classes[0].blocks[0] = Block::cycle([3, 2, 1, 0]);
        assert_eq!(content_hash(&shuffled), content_hash(&sample()));
        assert_eq!(content_hash(&sample()).len(), 64);
    }
}
