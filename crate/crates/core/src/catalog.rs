//! Designs given by explicit class lists or base blocks, transcribed once and
//! checked by the verifier.
//!
//! Every transcription keeps the text as printed. Where the printed text needs
//! a repair to verify, the repair is applied by an explicit substitution or an
//! explicit extra class, and it is listed in the certificate provenance and in
//! [`errata`].

use std::fmt;
use std::str::FromStr;

use crate::model::{Block, BlockClass, BlockKind, Certificate, Coverage, Point, TargetGraph};
use crate::spectrum::ClassPair;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CatalogError {
    #[error("unknown designator {0}")]
    Unknown(String),
    #[error("base blocks do not form a parallel class on Z_{0}")]
    BaseNotParallel(u32),
    #[error("cannot parse designator {0:?}")]
    BadDesignator(String),
}

/// A starter class over `Z_m`, developed by `+1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaseBlockOrbit {
    pub base: Vec<Block>,
    pub modulus: u32,
}

pub fn develop(orbit: &BaseBlockOrbit) -> Result<Vec<BlockClass>, CatalogError> {
    let m = orbit.modulus;
    let mut seen = vec![false; m as usize];
    let kind = orbit.base.first().map(|b| b.kind);
    for b in &orbit.base {
        if b.check().is_err() || Some(b.kind) != kind {
            return Err(CatalogError::BaseNotParallel(m));
        }
        for &p in &b.points {
            if p >= m || seen[p as usize] {
                return Err(CatalogError::BaseNotParallel(m));
            }
            seen[p as usize] = true;
        }
    }
    if seen.iter().any(|s| !s) {
        return Err(CatalogError::BaseNotParallel(m));
    }
    let kind = kind.expect("nonempty base");
    Ok((0..m)
        .map(|i| BlockClass::full(kind, orbit.base.iter().map(|b| b.relabel(|p| (p + i) % m)).collect()))
        .collect())
}

/// Names a catalog design.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Designator {
    /// `URD(v;r,s)` on `2K_v`.
    Urd { v: u32, profile: ClassPair },
    /// `URGDD(12^2;r,s)` on `2K_{12,12}`.
    Urgdd12Squared { profile: ClassPair },
    /// `IURD(20-8;r,s;R,S)`: partial profile `(r,s)` missing the hole
    /// `{0..7}`, full profile `(R,S)`.
    Iurd20 { partial: ClassPair, full: ClassPair },
}

impl fmt::Display for Designator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Designator::Urd { v, profile: p } => write!(f, "URD({v};{},{})", p.r, p.s),
            Designator::Urgdd12Squared { profile: p } => write!(f, "URGDD(12^2;{},{})", p.r, p.s),
            Designator::Iurd20 { partial: p, full: q } => {
                write!(f, "IURD(20-8;{},{};{},{})", p.r, p.s, q.r, q.s)
            }
        }
    }
}

impl FromStr for Designator {
    type Err = CatalogError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || CatalogError::BadDesignator(s.to_string());
        let t: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        let (head, rest) = t.split_once('(').ok_or_else(bad)?;
        let inner = rest.strip_suffix(')').ok_or_else(bad)?;
        let fields: Vec<&str> = inner.split(';').collect();
        let pair = |x: &str| -> Result<ClassPair, CatalogError> {
            let (r, s) = x.split_once(',').ok_or_else(bad)?;
            Ok(ClassPair::new(r.parse().map_err(|_| bad())?, s.parse().map_err(|_| bad())?))
        };
        match (head.to_ascii_uppercase().as_str(), fields.as_slice()) {
            ("URD", [v, p]) => Ok(Designator::Urd { v: v.parse().map_err(|_| bad())?, profile: pair(p)? }),
            ("URGDD", ["12^2", p]) => Ok(Designator::Urgdd12Squared { profile: pair(p)? }),
            ("IURD", ["20-8", p, q]) => Ok(Designator::Iurd20 { partial: pair(p)?, full: pair(q)? }),
            _ => Err(bad()),
        }
    }
}

const fn cp(r: u32, s: u32) -> ClassPair {
    ClassPair::new(r, s)
}

pub const IURD20_PARTIALS: [ClassPair; 3] = [cp(7, 0), cp(4, 4), cp(1, 8)];
pub const IURD20_FULLS: [ClassPair; 5] = [cp(12, 0), cp(9, 4), cp(6, 8), cp(3, 12), cp(0, 16)];
pub const URGDD12_PROFILES: [ClassPair; 3] = [cp(12, 0), cp(6, 8), cp(0, 16)];

/// How a catalog design is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    /// Class lists or base blocks written out in full.
    Explicit,
    /// Built from an auxiliary design by replacing groups with a smaller
    /// design; needs the ingredient provider.
    Composed,
}

/// Every designator the catalog answers, explicit ones first.
pub fn designators() -> Vec<(Designator, Source)> {
    use Designator::*;
    let mut out = vec![
        (Urd { v: 4, profile: cp(3, 0) }, Source::Explicit),
        (Urd { v: 4, profile: cp(0, 4) }, Source::Explicit),
        (Urd { v: 8, profile: cp(1, 8) }, Source::Explicit),
        (Urd { v: 12, profile: cp(5, 8) }, Source::Explicit),
        (Urd { v: 12, profile: cp(2, 12) }, Source::Explicit),
        (Urgdd12Squared { profile: cp(6, 8) }, Source::Explicit),
        (Urgdd12Squared { profile: cp(0, 16) }, Source::Explicit),
    ];
    for partial in IURD20_PARTIALS {
        for full in IURD20_FULLS {
            out.push((Iurd20 { partial, full }, Source::Explicit));
        }
    }
    out.extend([
        (Urd { v: 8, profile: cp(7, 0) }, Source::Composed),
        (Urd { v: 8, profile: cp(4, 4) }, Source::Composed),
        (Urd { v: 12, profile: cp(11, 0) }, Source::Composed),
        (Urd { v: 12, profile: cp(8, 4) }, Source::Composed),
        (Urgdd12Squared { profile: cp(12, 0) }, Source::Composed),
    ]);
    out
}

/// A discrepancy between a printed design and a verifying one.
#[derive(Debug, Clone)]
pub struct Erratum {
    pub designator: Designator,
    pub note: &'static str,
    /// The design read literally, when that reading is a complete certificate.
    pub as_printed: Option<Certificate>,
}

/// Parses `"(0;1,2,3),(4,5,6,7)"`-style block lists. A block with a `;` is a
/// star written center first; otherwise a cycle in cyclic order.
fn parse_blocks(text: &str, label: &dyn Fn(&str) -> Point) -> Vec<Block> {
    let mut blocks = Vec::new();
    let mut rest = text;
    while let Some(open) = rest.find('(') {
        let close = rest[open..].find(')').expect("unbalanced transcript") + open;
        let body = &rest[open + 1..close];
        let block = match body.split_once(';') {
            Some((center, leaves)) => {
                let mut points = vec![label(center.trim())];
                points.extend(leaves.split(',').map(|x| label(x.trim())));
                Block::new(BlockKind::Star3, points)
            }
            None => Block::new(BlockKind::Cycle4, body.split(',').map(|x| label(x.trim())).collect()),
        };
        blocks.push(block.unwrap_or_else(|e| panic!("transcript block ({body}): {e}")));
        rest = &rest[close + 1..];
    }
    blocks
}

fn int_label(s: &str) -> Point {
    s.parse().unwrap_or_else(|_| panic!("bad point label {s:?}"))
}

/// `a_j -> j-1`, `b_j -> 12 + (j-1)`, subscripts read modulo 12 in `1..=12`.
fn ab_label(s: &str) -> Point {
    let (side, j) = s.split_at(1);
    let j: i64 = j.parse().unwrap_or_else(|_| panic!("bad point label {s:?}"));
    let base = match side {
        "a" => 0,
        "b" => 12,
        _ => panic!("bad point label {s:?}"),
    };
    base + (j - 1).rem_euclid(12) as Point
}

fn class(text: &str) -> BlockClass {
    class_with(text, &int_label)
}

fn class_with(text: &str, label: &dyn Fn(&str) -> Point) -> BlockClass {
    let blocks = parse_blocks(text, label);
    let kind = blocks[0].kind;
    assert!(blocks.iter().all(|b| b.kind == kind), "mixed class in transcript: {text}");
    BlockClass::full(kind, blocks)
}

fn classes(texts: &[&str]) -> Vec<BlockClass> {
    texts.iter().map(|t| class(t)).collect()
}

fn urd(v: u32, classes: Vec<BlockClass>, provenance: Vec<String>) -> Certificate {
    Certificate::new(TargetGraph::complete(v, 2), classes, provenance)
}

fn urd4_cycles() -> Certificate {
    urd(
        4,
        classes(&["(0,1,2,3)", "(0,2,3,1)", "(0,2,1,3)"]),
        vec!["URD(4;3,0): explicit class list on Z_4".into()],
    )
}

fn urd4_stars() -> Certificate {
    let orbit = BaseBlockOrbit { base: vec![Block::star(0, [1, 2, 3])], modulus: 4 };
    urd(
        4,
        develop(&orbit).expect("base class"),
        vec!["URD(4;0,4): base block (0;1,2,3) developed mod 4".into()],
    )
}

const URD8_1_8_PRINTED: [&str; 7] = [
    "(0;2,4,6),(1;3,5,7)",
    "(2;4,1,6),(3;5,0,7)",
    "(5;2,0,7),(4;1,3,6)",
    "(0;2,1,3),(4;6,5,7)",
    "(2;4,1,3),(6;5,0,7)",
    "(5;2,0,7),(1;4,3,6)",
    "(1,5,4,0),(2,6,7,3)",
];

/// Two star classes absent from the printed list of eight; together they
/// cover exactly the pairs the printed seven classes leave uncovered.
pub const URD8_1_8_SUPPLEMENT: [&str; 2] = ["(7;0,2,4),(6;1,3,5)", "(7;0,1,2),(3;4,5,6)"];

fn urd8_1_8_printed() -> Certificate {
    urd(8, classes(&URD8_1_8_PRINTED), vec!["URD(8;1,8): printed class list, read literally".into()])
}

fn urd8_1_8() -> Certificate {
    let mut cs = classes(&URD8_1_8_PRINTED);
    cs.extend(classes(&URD8_1_8_SUPPLEMENT));
    urd(
        8,
        cs,
        vec![
            "URD(8;1,8): explicit class list on Z_8".into(),
            "repair: the printed list has 6 of the 8 star classes; added {(7;0,2,4),(6;1,3,5)} and {(7;0,1,2),(3;4,5,6)}, which cover exactly the residual pairs".into(),
        ],
    )
}

fn urd12_5_8() -> Certificate {
    urd(
        12,
        classes(&[
            "(0,1,4,7),(2,3,6,5),(8,11,9,10)",
            "(0,11,10,3),(1,2,9,8),(4,6,7,5)",
            "(3,1,4,8),(2,0,6,10),(7,11,9,5)",
            "(3,11,5,0),(1,2,9,7),(4,6,8,10)",
            "(1,3,2,0),(4,8,11,7),(6,10,9,5)",
            "(0;4,5,6),(7;8,9,10),(11;1,2,3)",
            "(1;5,6,7),(4;9,10,11),(8;0,2,3)",
            "(2;4,6,7),(5;8,10,11),(9;0,1,3)",
            "(3;4,5,7),(6;8,9,11),(10;0,1,2)",
            "(3;4,10,6),(8;7,9,5),(11;1,2,0)",
            "(1;10,6,8),(4;9,5,11),(7;0,2,3)",
            "(2;4,6,8),(10;7,5,11),(9;0,1,3)",
            "(0;4,10,8),(6;7,9,11),(5;3,1,2)",
        ]),
        vec!["URD(12;5,8): explicit class list on Z_12".into()],
    )
}

fn urd12_2_12() -> Certificate {
    let mut cs = classes(&["(0,5,6,1),(2,7,8,3),(4,9,10,11)", "(0,7,6,11),(1,8,9,2),(3,4,5,10)"]);
    let base = class("(4;10,1,6),(9;2,5,7),(11;3,8,0)").blocks;
    cs.extend(develop(&BaseBlockOrbit { base, modulus: 12 }).expect("base class"));
    urd(
        12,
        cs,
        vec!["URD(12;2,12): two explicit cycle classes and base blocks {(4;10,1,6),(9;2,5,7),(11;3,8,0)} developed mod 12".into()],
    )
}

/// The sixteen star classes on `2K_{12,12}` from the template with base
/// subscripts `i0, i0+3, i0+6, i0+9`, listed `i`-major, four classes per `i`.
pub fn urgdd12_star_template(i0: i64) -> Vec<BlockClass> {
    let a = |j: i64| ab_label(&format!("a{j}"));
    let b = |j: i64| ab_label(&format!("b{j}"));
    let star = |c: Point, l: [Point; 3]| Block::star(c, l);
    let ta = |j: i64| [a(j), a(j + 1), a(j + 2)];
    let tb = |j: i64| [b(j), b(j + 1), b(j + 2)];
    let mut out = Vec::new();
    for step in 0..4 {
        let i = i0 + 3 * step;
        // row k: a_i, a_{i+1}, a_{i+2} take b-triples starting at 3k, 3k+3,
        // 3k+6; the b centers for the a-triples at i+3, i+6, i+9 are listed
        // per row below.
        let b_centers = [[i + 9, i + 10, i + 11], [i, i + 1, i + 2], [i + 3, i + 4, i + 5], [i + 6, i + 7, i + 8]];
        for (k, centers) in b_centers.iter().enumerate() {
            let k = k as i64;
            out.push(BlockClass::full(
                BlockKind::Star3,
                vec![
                    star(a(i), tb(i + 3 * k)),
                    star(a(i + 1), tb(i + 3 * k + 3)),
                    star(a(i + 2), tb(i + 3 * k + 6)),
                    star(b(centers[0]), ta(i + 3)),
                    star(b(centers[1]), ta(i + 6)),
                    star(b(centers[2]), ta(i + 9)),
                ],
            ));
        }
    }
    out
}

const URGDD12_6_8_CYCLES: [&str; 6] = [
    "(a12,b12,a5,b1),(a1,b2,a7,b3),(a2,b4,a8,b5),(a3,b7,a4,b8),(a6,b9,a9,b10),(a10,b6,a11,b11)",
    "(a12,b2,a8,b3),(a1,b4,a3,b5),(a2,b6,a11,b7),(a4,b8,a6,b11),(a5,b9,a7,b10),(a9,b12,a10,b1)",
    "(a12,b2,a2,b7),(a1,b4,a9,b6),(a3,b5,a4,b9),(a5,b12,a7,b10),(a6,b8,a8,b11),(a10,b1,a11,b3)",
    "(a12,b4,a10,b5),(a1,b6,a6,b7),(a2,b9,a4,b10),(a3,b3,a11,b8),(a5,b2,a9,b11),(a7,b12,a8,b1)",
    "(a12,b4,a11,b5),(a1,b7,a5,b9),(a2,b8,a7,b11),(a3,b12,a4,b6),(a6,b1,a8,b10),(a9,b2,a10,b3)",
    "(a12,b6,a2,b9),(a1,b5,a5,b8),(a3,b7,a4,b10),(a6,b12,a8,b3),(a7,b1,a9,b11),(a10,b2,a11,b4)",
];

const URGDD12_LABELS: &str = "points a_j -> j-1 and b_j -> 11+j, subscripts mod 12 in 1..12";

fn urgdd12(classes: Vec<BlockClass>, provenance: Vec<String>) -> Certificate {
    Certificate::new(TargetGraph::uniform_multipartite(12, 2, 2), classes, provenance)
}

fn urgdd12_0_16() -> Certificate {
    urgdd12(
        urgdd12_star_template(1),
        vec![
            "URGDD(12^2;0,16): star template over i = 1,4,7,10".into(),
            URGDD12_LABELS.into(),
        ],
    )
}

fn urgdd12_6_8_cycles() -> Vec<BlockClass> {
    URGDD12_6_8_CYCLES.iter().map(|t| class_with(t, &ab_label)).collect()
}

fn urgdd12_6_8_printed() -> Certificate {
    let mut cs = urgdd12_6_8_cycles();
    cs.extend(urgdd12_star_template(1).into_iter().skip(8));
    urgdd12(
        cs,
        vec!["URGDD(12^2;6,8): printed cycle classes plus the last 8 template classes, read literally".into()],
    )
}

fn urgdd12_6_8() -> Certificate {
    let mut cs = urgdd12_6_8_cycles();
    cs.extend(
        urgdd12_star_template(0)
            .into_iter()
            .enumerate()
            .filter(|(j, _)| j % 4 >= 2)
            .map(|(_, c)| c),
    );
    urgdd12(
        cs,
        vec![
            "URGDD(12^2;6,8): six explicit cycle classes".into(),
            URGDD12_LABELS.into(),
            "repair: the cycle classes trade with template rows 0,1 only when the template is read over i = 0,3,6,9; the star classes are rows 2,3 of that reading".into(),
        ],
    )
}

const IURD20_PARTIAL_7_0: [&str; 7] = [
    "(8,9,11,10),(12,13,15,14),(16,17,19,18)",
    "(8,11,15,12),(9,10,19,16),(13,14,18,17)",
    "(8,13,10,15),(9,18,11,19),(12,16,14,17)",
    "(8,14,16,10),(12,18,15,9),(11,17,19,13)",
    "(8,16,15,12),(14,10,19,11),(18,9,13,17)",
    "(8,18,10,15),(14,13,16,19),(12,11,9,17)",
    "(8,9,15,14),(10,11,17,16),(12,13,19,18)",
];

const IURD20_PARTIAL_4_4_STARS: [&str; 4] = [
    "(8;9,10,11),(14;12,13,15),(19;16,17,18)",
    "(9;10,11,19),(15;8,12,13),(17;14,16,18)",
    "(10;11,15,19),(12;8,13,17),(18;9,14,16)",
    "(11;15,18,19),(13;8,10,17),(16;9,12,14)",
];

const IURD20_PARTIAL_1_8_STARS: [&str; 8] = [
    "(8;9,10,11),(12;13,14,15),(16;17,18,19)",
    "(8;10,12,13),(9;11,15,16),(14;17,18,19)",
    "(9;10,11,12),(13;14,17,19),(15;8,16,18)",
    "(10;11,13,19),(14;8,15,16), (17;9,12,18)",
    "(10;14,15,16),(17;11,12,13),(18;8,9,19)",
    "(11;12,14,18),(15;8,10,13),(19;9,16,17)",
    "(11;13,15,19),(16;8,12,14),(18;9,10,17)",
    "(12;8,15,18),(13;9,14,16),(19;10,11,17)",
];

const IURD20_FULL_12_0: [&str; 12] = [
    "(0,8,1,9),(2,10,3,11),(4,12,5,13),(6,14,18,16),(7,17,15,19)",
    "(0,8,1,9),(2,10,3,11),(4,12,5,13),(6,16,7,18),(14,17,15,19)",
    "(0,10,1,11),(2,8,3,9),(4,14,12,16),(5,15,13,18),(6,17,7,19)",
    "(0,10,1 11),(2,8,3,9),(4,17,5,19),(6,12,7,14),(13,16,15,18)",
    "(0,12,1,13),(2,14,3,15),(4,8,16,9),(5,17,6,19),(7,10,18,11)",
    "(0,12,1,13),(2,14,11,16),(3,15,4,17),(5,8,19,9),(6,10,7,18)",
    "(0,14,1,15),(2,18,3,19),(4,9,7,16),(5,8,17,10),(6,12,11,13)",
    "(0,14,1,15),(2,13,8,17),(3,16,5,18),(4,10,12,19),(6,9,7,11)",
    "(0,16,1,17),(2,15,4,18),(3,13,10,14),(5,9,6,11),(7,8,19,12)",
    "(0,16,1,17),(2,12,3,19),(4,11,8,18),(5,10,9,14),(6,13,7,15)",
    "(0,18,1,19),(2,13,3,16),(4,11,5,14),(6,8,7,15),(9,12,10,17)",
    "(0,18,1,19),(2,12,3,17),(4,8,6,10),(5,15,11,16),(7,13,9,14)",
];

/// `C_1..C_9`.
const IURD20_C: [&str; 9] = [
    "(0,10,1,11),(2,8,3,9),(4,17,5,19),(6,12,7,14),(13,16,15,18)",
    "(0,12,1,13),(2,14,3,15),(4,8,16,9),(5,17,6,19),(7,10,18,11)",
    "(0,14,1,15),(2,12,11,16),(3,13,6,18),(4,17,8,19),(5,9,7,10)",
    "(0,10,1,11),(2,8,3,9),(4,14,12,16),(5,15,13,18),(6,17,7,19)",
    "(0,18,1,19),(2,13,3,17),(4,8,11,16),(5,10,6,15),(7,12,9,14)",
    "(0,8,1,9),(2,10,3,11),(4,12,5,13),(6,14,18,16),(7,17,15,19)",
    "(0,8,1,9),(2,10,3,11),(4,12,5,13),(6,16,7,18),(14,17,15,19)",
    "(0,12,1,13),(2,14,3,15),(4,10,6,11),(5,16,7,18),(8,17,9,19)",
    "(0,14,4,18),(1,16,2,19),(3,12,10,17),(5,8,13,11),(6,9,7,15)",
];

/// `S_1..S_12`.
const IURD20_S: [&str; 12] = [
    "(0;15,16,17),(7;8,11,13),(12;6,10,19),(14;1,5,9),(18;2,3,4)",
    "(1;16,17,18),(4;9,10,15),(5;8,11,14),(13;2,6,7),(19;0,3 12)",
    "(2;12,18,19),(6;8,9,11),(10;13,14,17),(15;1,4,7),(16;0,3,5)",
    "(3;12,16,19),(8;6,7,18),(9;5,10,13),(11;4,14,15),(17;0,1,2)",
    "(0;9,14,18),(5;11,12,13),(10;3,4,17),(16;1,2,6),(19;7,8,15)",
    "(1;8,9,19),(7;15,16,18),(11;2,3,13),(12;0,5,10),(14;4,6,17)",
    "(2;10,14,19),(4;11,12,13),(6;9,16,18),(8;0,1,5),(17;3,7,15)",
    "(3;10,11,12),(9;1,7,19),(13;0,5,8),(15;2,6,17),(18;4,14,16)",
    "(0;9,10,18),(1;11,12,13),(4;8,14,16),(15;3,5,19),(17;2,6,7)",
    "(2;9,10,11),(3;8,13,17),(5;15,16,18),(12;4,7,14),(19;0,1,6)",
    "(6;10,11,15),(8;0,2,17),(14;3,9,19),(16;4,7,12),(18;1,5,13)",
    "(7;14,18,19),(9;3,12,17),(10;1,5,6),(11;0,8,16),(13;2,4,15)",
];

const IURD20_EXTRA_CYCLE: &str = "(0,8,17,9),(1,12,4,13),(2,10,6,11),(3,14,19,15),(5,16,7,18)";

const IURD20_EXTRA_STARS: [&str; 5] = [
    "(0;10,11,17),(2;8,12,15),(13;7,16,18),(14;1,3,9),(19;4,5,6)",
    "(0;13,15,16),(5;14,17,19),(7;8,9,10),(12;1,6,11),(18;2,3,4)",
    "(1;10,13,14),(12;0,7,19),(16;2,8,9),(17;4,5,6),(18;3,11,15)",
    "(3;8,13,15),(4;9,17,19),(10;5,12,18),(11;1,7,16),(14;0,2,6)",
    "(6;12,13,18),(7;10,11,14),(8;4,17,19),(9;2,3,5),(15;0,1,16)",
];

/// Printed typos repaired before parsing: missing commas.
const IURD20_FIXES: [(&str, &str); 2] = [("(0,10,1 11)", "(0,10,1,11)"), ("(19;0,3 12)", "(19;0,3,12)")];

fn fixed(text: &str) -> String {
    IURD20_FIXES.iter().fold(text.to_string(), |t, (from, to)| t.replace(from, to))
}

fn fixed_classes(texts: &[&str]) -> Vec<BlockClass> {
    texts.iter().map(|t| class(&fixed(t))).collect()
}

pub const IURD20_HOLE: [Point; 8] = [0, 1, 2, 3, 4, 5, 6, 7];

/// Partial classes on `{8..19}` missing the hole, for a partial profile.
pub fn iurd20_partial(profile: ClassPair) -> Option<Vec<BlockClass>> {
    let p70 = classes(&IURD20_PARTIAL_7_0);
    let mut out = match (profile.r, profile.s) {
        (7, 0) => p70,
        (4, 4) => {
            let mut v = p70[3..].to_vec();
            v.extend(classes(&IURD20_PARTIAL_4_4_STARS));
            v
        }
        (1, 8) => {
            let mut v = p70[6..].to_vec();
            v.extend(classes(&IURD20_PARTIAL_1_8_STARS));
            v
        }
        _ => return None,
    };
    for c in &mut out {
        c.coverage = Coverage::partial(IURD20_HOLE.to_vec());
    }
    Some(out)
}

/// Full classes on all 20 points, for a full profile.
pub fn iurd20_full(profile: ClassPair) -> Option<Vec<BlockClass>> {
    let c = fixed_classes(&IURD20_C);
    let s = fixed_classes(&IURD20_S);
    Some(match (profile.r, profile.s) {
        (12, 0) => fixed_classes(&IURD20_FULL_12_0),
        (9, 4) => [&c[..], &s[..4]].concat(),
        (6, 8) => [&c[..5], &[class(IURD20_EXTRA_CYCLE)], &s[..8]].concat(),
        (3, 12) => [&c[..3], &s[..]].concat(),
        (0, 16) => [&s[1..], &classes(&IURD20_EXTRA_STARS)[..]].concat(),
        _ => return None,
    })
}

fn iurd20(partial: ClassPair, full: ClassPair) -> Option<Certificate> {
    let mut cs = iurd20_partial(partial)?;
    cs.extend(iurd20_full(full)?);
    Some(Certificate::new(
        TargetGraph::minus_hole(20, IURD20_HOLE.to_vec(), 2),
        cs,
        vec![
            format!("IURD(20-8;{},{};{},{}): explicit classes on Z_20, hole {{0..7}}", partial.r, partial.s, full.r, full.s),
            "repair: missing commas in (0,10,1 11) and (19;0,3 12)".into(),
        ],
    ))
}

/// The explicit designs; `None` for composed or unknown designators.
pub fn explicit(d: &Designator) -> Option<Certificate> {
    match *d {
        Designator::Urd { v: 4, profile } if profile == cp(3, 0) => Some(urd4_cycles()),
        Designator::Urd { v: 4, profile } if profile == cp(0, 4) => Some(urd4_stars()),
        Designator::Urd { v: 8, profile } if profile == cp(1, 8) => Some(urd8_1_8()),
        Designator::Urd { v: 12, profile } if profile == cp(5, 8) => Some(urd12_5_8()),
        Designator::Urd { v: 12, profile } if profile == cp(2, 12) => Some(urd12_2_12()),
        Designator::Urgdd12Squared { profile } if profile == cp(6, 8) => Some(urgdd12_6_8()),
        Designator::Urgdd12Squared { profile } if profile == cp(0, 16) => Some(urgdd12_0_16()),
        Designator::Iurd20 { partial, full } => iurd20(partial, full),
        _ => None,
    }
}

/// Any catalog design. Composed designs replace the groups of an auxiliary
/// multipartite design with copies of a small explicit design.
pub fn lookup(d: &Designator, provider: &mut crate::ingredients::Provider) -> Result<Certificate, crate::constructor::ConstructError> {
    use crate::constructor::{fill_groups, ConstructError};
    use crate::ingredients::IngredientKey;
    if let Some(c) = explicit(d) {
        return Ok(c);
    }
    let unknown = || ConstructError::Catalog(CatalogError::Unknown(d.to_string()));
    match *d {
        Designator::Urd { v: v @ (8 | 12), profile } => {
            let u = v / 4;
            let gdd = provider.provide(&IngredientKey::urgdd(4, u, 2, cp(4 * (u - 1), 0)))?;
            let fill_profile = ClassPair::new(profile.r.checked_sub(4 * (u - 1)).ok_or_else(unknown)?, profile.s);
            let fill = match (fill_profile.r, fill_profile.s) {
                (3, 0) => urd4_cycles(),
                (0, 4) => urd4_stars(),
                _ => return Err(unknown()),
            };
            let mut c = fill_groups(&gdd, &fill)?;
            c.provenance.insert(0, format!("{d}: groups of a URGDD(4^{u}) filled with URD(4;{},{})", fill_profile.r, fill_profile.s));
            Ok(c)
        }
        Designator::Urgdd12Squared { profile } if profile == cp(12, 0) => {
            Ok(provider.provide(&IngredientKey::urgdd(12, 2, 2, profile))?)
        }
        _ => Err(unknown()),
    }
}

/// Printed designs that needed more than a typo fix to verify.
pub fn errata() -> Vec<Erratum> {
    vec![
        Erratum {
            designator: Designator::Urd { v: 8, profile: cp(1, 8) },
            note: "printed list announces 8 star classes but gives 6; two classes supplied",
            as_printed: Some(urd8_1_8_printed()),
        },
        Erratum {
            designator: Designator::Urgdd12Squared { profile: cp(6, 8) },
            note: "cycle classes are consistent with the star template only under a subscript shift of 1; star classes taken as rows 2,3 of the shifted template",
            as_printed: Some(urgdd12_6_8_printed()),
        },
        Erratum {
            designator: Designator::Urgdd12Squared { profile: cp(0, 16) },
            note: "heading says 12 classes of 4-cycles; the template gives 16 classes of 3-stars",
            as_printed: None,
        },
        Erratum {
            designator: Designator::Urd { v: 4, profile: cp(0, 4) },
            note: "statement lists (4,0); the construction gives (0,4)",
            as_printed: None,
        },
    ]
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::EdgeMultiset;
    use crate::verifier::{verify, verify_equal_partial_coverage};

    #[test]
    fn designator_round_trip() {
        for (d, _) in designators() {
            assert_eq!(d.to_string().parse::<Designator>(), Ok(d));
        }
        assert!("URD(8,1,8)".parse::<Designator>().is_err());
        assert_eq!("urd( 8 ; 1 , 8 )".parse::<Designator>(), Ok(Designator::Urd { v: 8, profile: cp(1, 8) }));
    }

    #[test]
    fn every_explicit_entry_verifies() {
        for (d, src) in designators() {
            if src == Source::Explicit {
                let c = explicit(&d).unwrap();
                let r = verify(&c);
                assert!(r.passed(), "{d}: {r}");
            }
        }
    }

    #[test]
    fn develop_generates_distinct_classes() {
        let orbit = BaseBlockOrbit { base: class("(4;10,1,6),(9;2,5,7),(11;3,8,0)").blocks, modulus: 12 };
        let cs = develop(&orbit).unwrap();
        assert_eq!(cs.len(), 12);
        let canon: std::collections::BTreeSet<_> = cs.iter().map(|c| c.canonical().blocks).collect();
        assert_eq!(canon.len(), 12);
        let bad = BaseBlockOrbit { base: vec![Block::star(0, [1, 2, 3])], modulus: 8 };
        assert_eq!(develop(&bad), Err(CatalogError::BaseNotParallel(8)));
    }

    #[test]
    fn supplement_covers_printed_residual() {
        let printed = urd8_1_8_printed();
        let mut residual = TargetGraph::complete(8, 2).edge_multiset();
        for b in printed.classes.iter().flat_map(|c| &c.blocks) {
            for e in b.edges() {
                assert!(residual.remove(e));
            }
        }
        let supplement = classes(&URD8_1_8_SUPPLEMENT);
        let extra = EdgeMultiset::from_blocks(8, supplement.iter().flat_map(|c| &c.blocks));
        assert_eq!(residual, extra);
        assert!(!verify(&printed).passed());
    }

    #[test]
    fn literal_reading_of_mixed_urgdd_fails() {
        assert!(!verify(&urgdd12_6_8_printed()).passed());
    }

    #[test]
    fn partial_resolutions_cover_the_same_edges() {
        for full in IURD20_FULLS {
            let cs: Vec<_> = IURD20_PARTIALS.iter().map(|&p| iurd20(p, full).unwrap()).collect();
            assert_eq!(verify_equal_partial_coverage(&cs), Ok(true));
        }
    }

    #[test]
    fn urgdd_blocks_cross_groups() {
        for p in [cp(6, 8), cp(0, 16)] {
            let c = explicit(&Designator::Urgdd12Squared { profile: p }).unwrap();
            for b in c.classes.iter().flat_map(|c| &c.blocks) {
                for e in b.edges() {
                    assert!(e.lo() < 12 && e.hi() >= 12, "{e} inside a group");
                }
            }
        }
    }

    #[test]
    fn label_wrap() {
        assert_eq!(ab_label("a1"), 0);
        assert_eq!(ab_label("a12"), 11);
        assert_eq!(ab_label("a13"), 0);
        assert_eq!(ab_label("b0"), 23);
        assert_eq!(ab_label("b21"), 20);
    }
}
