//! Independent certificate checking.
//!
//! Nothing here trusts the constructor: every certificate is checked from its
//! blocks and target descriptor alone. Checks run in a fixed order and the
//! first failure is reported:
//!
//! 0. the target descriptor is well-formed
//! 1. every block has the right number of distinct in-range points
//! 2. every block has its class's kind
//! 3. every class is a (partial) parallel class on the points it claims
//! 4. the blocks' edge multiset equals the target's exactly
//! 5. the claimed class counts equal the tallies
//! 6. partial classes have the shape the target requires (none for complete
//!    targets, miss exactly the hole for holed targets, frame rules for
//!    multipartite targets)

use std::fmt;

use serde::Serialize;

use crate::model::{BlockKind, Certificate, Claimed, EdgeMultiset, Point, TargetShape};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Target,
    BlockShape,
    Uniformity,
    Resolvability,
    EdgeCoverage,
    ClaimedCounts,
    PartialStructure,
}

impl Check {
    pub fn number(self) -> u8 {
        self as u8
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Check::Target => "target descriptor",
            Check::BlockShape => "block well-formedness",
            Check::Uniformity => "class uniformity",
            Check::Resolvability => "class resolvability",
            Check::EdgeCoverage => "edge coverage",
            Check::ClaimedCounts => "claimed counts",
            Check::PartialStructure => "partial class structure",
        };
        write!(f, "check {} ({name})", self.number())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub check: Check,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub class: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub block: Option<usize>,
    pub detail: String,
}

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} failed", self.check)?;
        if let Some(c) = self.class {
            write!(f, " at class {c}")?;
            if let Some(b) = self.block {
                write!(f, ", block {b}")?;
            }
        }
        write!(f, ": {}", self.detail)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub points: u32,
    pub lambda: u32,
    pub classes: usize,
    pub tally: Claimed,
    pub failure: Option<Failure>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }

    pub fn failed_check(&self) -> Option<Check> {
        self.failure.as_ref().map(|f| f.check)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report encodes")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t = &self.tally;
        write!(
            f,
            "{} points, index {}, {} classes (r={}, s={}, partial r={}, partial s={}): ",
            self.points, self.lambda, self.classes, t.r, t.s, t.partial_r, t.partial_s
        )?;
        match &self.failure {
            None => f.write_str("PASS"),
            Some(fail) => write!(f, "FAIL, {fail}"),
        }
    }
}

fn fail(check: Check, class: Option<usize>, block: Option<usize>, detail: String) -> Failure {
    Failure { check, class, block, detail }
}

pub fn verify(c: &Certificate) -> VerificationReport {
    let tally = Claimed::tally(&c.classes);
    VerificationReport {
        points: c.target.point_count(),
        lambda: c.target.lambda,
        classes: c.classes.len(),
        tally,
        failure: first_failure(c, tally).err(),
    }
}

fn first_failure(c: &Certificate, tally: Claimed) -> Result<(), Failure> {
    c.target
        .check()
        .map_err(|d| fail(Check::Target, None, None, d.to_string()))?;
    let n = c.target.point_count();

    for (ci, class) in c.classes.iter().enumerate() {
        for (bi, block) in class.blocks.iter().enumerate() {
            block
                .check()
                .map_err(|e| fail(Check::BlockShape, Some(ci), Some(bi), e.to_string()))?;
            if let Some(p) = block.points.iter().find(|&&p| p >= n) {
                return Err(fail(Check::BlockShape, Some(ci), Some(bi), format!("point {p} out of range 0..{n}")));
            }
        }
    }

    for (ci, class) in c.classes.iter().enumerate() {
        if let Some(bi) = class.blocks.iter().position(|b| b.kind != class.kind) {
            return Err(fail(
                Check::Uniformity,
                Some(ci),
                Some(bi),
                format!("{} block in a {} class", class.blocks[bi].kind, class.kind),
            ));
        }
    }

    for (ci, class) in c.classes.iter().enumerate() {
        let mut seen = vec![false; n as usize];
        for &m in class.coverage.missing() {
            if m >= n || seen[m as usize] {
                return Err(fail(Check::Resolvability, Some(ci), None, format!("bad missing point {m}")));
            }
            seen[m as usize] = true;
        }
        for (bi, block) in class.blocks.iter().enumerate() {
            for &p in &block.points {
                if seen[p as usize] {
                    return Err(fail(
                        Check::Resolvability,
                        Some(ci),
                        Some(bi),
                        format!("point {p} covered twice or listed as missing"),
                    ));
                }
                seen[p as usize] = true;
            }
        }
        if let Some(p) = seen.iter().position(|&s| !s) {
            return Err(fail(Check::Resolvability, Some(ci), None, format!("point {p} not covered")));
        }
    }

    let expected = c.target.edge_multiset();
    let found = c.edge_multiset();
    let diffs = expected.differences(&found);
    if let Some(&(e, want, got)) = diffs.first() {
        let under = diffs.iter().filter(|d| d.2 < d.1).count();
        let over = diffs.len() - under;
        let missing: u32 = diffs.iter().map(|d| d.1.saturating_sub(d.2)).sum();
        let extra: u32 = diffs.iter().map(|d| d.2.saturating_sub(d.1)).sum();
        return Err(fail(
            Check::EdgeCoverage,
            None,
            None,
            format!(
                "pair {e} covered {got} times, expected {want}; {under} pairs under-covered \
                 ({missing} edges uncovered), {over} pairs over-covered ({extra} extra edges)"
            ),
        ));
    }

    if c.claimed != tally {
        return Err(fail(
            Check::ClaimedCounts,
            None,
            None,
            format!("claimed {:?}, found {:?}", c.claimed, tally),
        ));
    }

    check_partial_structure(c)
}

fn check_partial_structure(c: &Certificate) -> Result<(), Failure> {
    let partial: Vec<(usize, &[Point])> = c
        .classes
        .iter()
        .enumerate()
        .filter(|(_, cl)| !cl.coverage.is_full())
        .map(|(i, cl)| (i, cl.coverage.missing()))
        .collect();
    match &c.target.shape {
        TargetShape::Complete { .. } => match partial.first() {
            Some(&(i, _)) => Err(fail(
                Check::PartialStructure,
                Some(i),
                None,
                "partial class in a design on a complete graph".into(),
            )),
            None => Ok(()),
        },
        TargetShape::CompleteMinusHole { hole, .. } => {
            let mut hole = hole.clone();
            hole.sort_unstable();
            match partial.iter().find(|(_, m)| *m != hole.as_slice()) {
                Some(&(i, _)) => Err(fail(
                    Check::PartialStructure,
                    Some(i),
                    None,
                    "partial class does not miss exactly the hole".into(),
                )),
                None => Ok(()),
            }
        }
        TargetShape::Multipartite { groups } => {
            if partial.is_empty() {
                return Ok(());
            }
            if partial.len() != c.classes.len() {
                let i = c.classes.iter().position(|cl| cl.coverage.is_full()).unwrap_or(0);
                return Err(fail(
                    Check::PartialStructure,
                    Some(i),
                    None,
                    "frame mixes full and partial classes".into(),
                ));
            }
            let kind = c.classes[0].kind;
            if let Some(i) = c.classes.iter().position(|cl| cl.kind.arity() != kind.arity()) {
                return Err(fail(
                    Check::PartialStructure,
                    Some(i),
                    None,
                    "frame classes use blocks of different sizes".into(),
                ));
            }
            let sorted: Vec<Vec<Point>> = groups
                .iter()
                .map(|g| {
                    let mut g = g.clone();
                    g.sort_unstable();
                    g
                })
                .collect();
            let mut per_group = vec![0usize; groups.len()];
            for &(i, missing) in &partial {
                match sorted.iter().position(|g| g.as_slice() == missing) {
                    Some(gi) => per_group[gi] += 1,
                    None => {
                        return Err(fail(
                            Check::PartialStructure,
                            Some(i),
                            None,
                            "partial class does not miss exactly one whole group".into(),
                        ))
                    }
                }
            }
            let k = kind.arity() - 1;
            for (gi, g) in sorted.iter().enumerate() {
                if g.len() % k != 0 || per_group[gi] != g.len() / k {
                    return Err(fail(
                        Check::PartialStructure,
                        None,
                        None,
                        format!(
                            "group {gi} of size {} is missed by {} classes, expected |G|/{k}",
                            g.len(),
                            per_group[gi]
                        ),
                    ));
                }
            }
            Ok(())
        }
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum CoverageComparisonError {
    #[error("certificates are on different targets")]
    TargetMismatch,
    #[error("a block is malformed or out of range")]
    MalformedBlock,
}

/// Whether the partial classes of every certificate cover the same edge
/// multiset. An empty list compares equal.
pub fn verify_equal_partial_coverage(cs: &[Certificate]) -> Result<bool, CoverageComparisonError> {
    let Some(first) = cs.first() else {
        return Ok(true);
    };
    if cs.iter().any(|c| c.target != first.target) {
        return Err(CoverageComparisonError::TargetMismatch);
    }
    let n = first.target.point_count();
    let mut reference: Option<EdgeMultiset> = None;
    for c in cs {
        let blocks: Vec<_> = c.partial_classes().flat_map(|cl| &cl.blocks).collect();
        if blocks.iter().any(|b| b.check().is_err() || b.points.iter().any(|&p| p >= n)) {
            return Err(CoverageComparisonError::MalformedBlock);
        }
        let m = EdgeMultiset::from_blocks(n, blocks);
        match &reference {
            None => reference = Some(m),
            Some(r) if *r != m => return Ok(false),
            Some(_) => {}
        }
    }
    Ok(true)
}

/// Convenience for the common "pass or explain" use.
pub fn ensure_valid(c: &Certificate) -> Result<(), Failure> {
    match verify(c).failure {
        None => Ok(()),
        Some(f) => Err(f),
    }
}

/// Number of classes a frame needs to miss each group, for a given block kind.
pub fn frame_classes_per_group(group_size: usize, kind: BlockKind) -> Option<usize> {
    let k = kind.arity() - 1;
    (group_size % k == 0).then_some(group_size / k)
}
