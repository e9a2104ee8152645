//! Points, edges, blocks, classes, target graphs and certificates.
//!
//! Points are dense integer labels `0..n`. Group and hole structure lives in
//! [`TargetGraph`], never in point naming.

use std::fmt;

use crate::spectrum::ClassPair;

pub type Point = u32;

/// An unordered pair of distinct points, stored with the smaller label first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge(Point, Point);

impl Edge {
    pub fn new(a: Point, b: Point) -> Option<Edge> {
        match a.cmp(&b) {
            std::cmp::Ordering::Less => Some(Edge(a, b)),
            std::cmp::Ordering::Greater => Some(Edge(b, a)),
            std::cmp::Ordering::Equal => None,
        }
    }

    pub fn lo(&self) -> Point {
        self.0
    }

    pub fn hi(&self) -> Point {
        self.1
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{},{}}}", self.0, self.1)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BlockKind {
    /// `(a1,a2,a3,a4)`: edges a1a2, a2a3, a3a4, a4a1.
    Cycle4,
    /// `(c;l1,l2,l3)`: edges c-l1, c-l2, c-l3.
    Star3,
    /// Complete graph on four points; blocks of 4-RGDD ingredients.
    Complete4,
    /// A single edge; blocks of 1-factorizations and 2-frames.
    Pair,
}

impl BlockKind {
    pub fn arity(self) -> usize {
        match self {
            BlockKind::Pair => 2,
            _ => 4,
        }
    }

    pub fn edge_count(self) -> usize {
        match self {
            BlockKind::Cycle4 => 4,
            BlockKind::Star3 => 3,
            BlockKind::Complete4 => 6,
            BlockKind::Pair => 1,
        }
    }

    pub fn tag(self) -> &'static str {
        match self {
            BlockKind::Cycle4 => "C4",
            BlockKind::Star3 => "K13",
            BlockKind::Complete4 => "K4",
            BlockKind::Pair => "K2",
        }
    }

    pub fn from_tag(tag: &str) -> Option<BlockKind> {
        Some(match tag {
            "C4" => BlockKind::Cycle4,
            "K13" => BlockKind::Star3,
            "K4" => BlockKind::Complete4,
            "K2" => BlockKind::Pair,
            _ => return None,
        })
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MalformedBlock {
    WrongArity { expected: usize, found: usize },
    RepeatedPoint(Point),
}

impl fmt::Display for MalformedBlock {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MalformedBlock::WrongArity { expected, found } => {
                write!(f, "expected {expected} points, found {found}")
            }
            MalformedBlock::RepeatedPoint(p) => write!(f, "point {p} repeated"),
        }
    }
}

/// A block as written: cycle order for `Cycle4`, center first for `Star3`.
///
/// Fields are public so that unchecked input can be represented and handed to
/// the verifier; use [`Block::new`] for checked construction.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Block {
    pub kind: BlockKind,
    pub points: Vec<Point>,
}

impl Block {
    pub fn new(kind: BlockKind, points: Vec<Point>) -> Result<Block, MalformedBlock> {
        let b = Block { kind, points };
        b.check()?;
        Ok(b)
    }

    pub fn cycle(points: [Point; 4]) -> Block {
        Block::new(BlockKind::Cycle4, points.to_vec()).expect("well-formed cycle")
    }

    pub fn star(center: Point, leaves: [Point; 3]) -> Block {
        Block::new(BlockKind::Star3, vec![center, leaves[0], leaves[1], leaves[2]])
            .expect("well-formed star")
    }

    pub fn quad(points: [Point; 4]) -> Block {
        Block::new(BlockKind::Complete4, points.to_vec()).expect("well-formed K4")
    }

    pub fn pair(a: Point, b: Point) -> Block {
        Block::new(BlockKind::Pair, vec![a, b]).expect("well-formed pair")
    }

    pub fn check(&self) -> Result<(), MalformedBlock> {
        let expected = self.kind.arity();
        if self.points.len() != expected {
            return Err(MalformedBlock::WrongArity { expected, found: self.points.len() });
        }
        for (i, p) in self.points.iter().enumerate() {
            if self.points[..i].contains(p) {
                return Err(MalformedBlock::RepeatedPoint(*p));
            }
        }
        Ok(())
    }

    /// The block's edge multiset. Assumes a well-formed block.
    pub fn edges(&self) -> Vec<Edge> {
        let p = &self.points;
        let e = |a: usize, b: usize| Edge::new(p[a], p[b]).expect("distinct points");
        match self.kind {
            BlockKind::Cycle4 => vec![e(0, 1), e(1, 2), e(2, 3), e(3, 0)],
            BlockKind::Star3 => vec![e(0, 1), e(0, 2), e(0, 3)],
            BlockKind::Complete4 => vec![e(0, 1), e(0, 2), e(0, 3), e(1, 2), e(1, 3), e(2, 3)],
            BlockKind::Pair => vec![e(0, 1)],
        }
    }

    /// Representative under cycle rotation and reflection, leaf order, or
    /// point order, depending on the kind. Idempotent.
    pub fn canonical(&self) -> Block {
        let mut points = self.points.clone();
        match self.kind {
            BlockKind::Cycle4 if points.len() == 4 => {
                let start = (0..4).min_by_key(|&i| points[i]).unwrap_or(0);
                points.rotate_left(start);
                if points[3] < points[1] {
                    points.swap(1, 3);
                }
            }
            BlockKind::Star3 if !points.is_empty() => points[1..].sort_unstable(),
            BlockKind::Complete4 | BlockKind::Pair => points.sort_unstable(),
            _ => {}
        }
        Block { kind: self.kind, points }
    }

    pub fn relabel(&self, map: impl Fn(Point) -> Point) -> Block {
        Block { kind: self.kind, points: self.points.iter().map(|&p| map(p)).collect() }
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.points;
        match self.kind {
            BlockKind::Star3 if p.len() == 4 => write!(f, "({};{},{},{})", p[0], p[1], p[2], p[3]),
            _ => {
                f.write_str("(")?;
                for (i, x) in p.iter().enumerate() {
                    if i > 0 {
                        f.write_str(",")?;
                    }
                    write!(f, "{x}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Coverage {
    Full,
    /// Covers every point except `missing` (kept sorted).
    Partial { missing: Vec<Point> },
}

impl Coverage {
    pub fn partial(mut missing: Vec<Point>) -> Coverage {
        missing.sort_unstable();
        missing.dedup();
        Coverage::Partial { missing }
    }

    pub fn is_full(&self) -> bool {
        matches!(self, Coverage::Full)
    }

    pub fn missing(&self) -> &[Point] {
        match self {
            Coverage::Full => &[],
            Coverage::Partial { missing } => missing,
        }
    }
}

/// A (full or partial) parallel class whose blocks all share one kind.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BlockClass {
    pub kind: BlockKind,
    pub coverage: Coverage,
    pub blocks: Vec<Block>,
}

impl BlockClass {
    pub fn full(kind: BlockKind, blocks: Vec<Block>) -> BlockClass {
        BlockClass { kind, coverage: Coverage::Full, blocks }
    }

    pub fn partial(kind: BlockKind, blocks: Vec<Block>, missing: Vec<Point>) -> BlockClass {
        BlockClass { kind, coverage: Coverage::partial(missing), blocks }
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.blocks.iter().flat_map(|b| b.points.iter().copied())
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.blocks.iter().flat_map(|b| b.edges())
    }

    /// Relabels the blocks; `missing` is relabeled too but the caller decides
    /// the new coverage when embedding into a larger point set.
    pub fn relabel(&self, map: impl Fn(Point) -> Point + Copy) -> BlockClass {
        let coverage = match &self.coverage {
            Coverage::Full => Coverage::Full,
            Coverage::Partial { missing } => {
                Coverage::partial(missing.iter().map(|&p| map(p)).collect())
            }
        };
        BlockClass {
            kind: self.kind,
            coverage,
            blocks: self.blocks.iter().map(|b| b.relabel(map)).collect(),
        }
    }

    pub fn canonical(&self) -> BlockClass {
        let mut blocks: Vec<Block> = self.blocks.iter().map(Block::canonical).collect();
        blocks.sort();
        BlockClass { kind: self.kind, coverage: self.coverage.clone(), blocks }
    }
}

/// Underlying simple graph of a target; edges are taken `lambda` times.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum TargetShape {
    Complete { v: u32 },
    Multipartite { groups: Vec<Vec<Point>> },
    CompleteMinusHole { v: u32, hole: Vec<Point> },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct TargetGraph {
    pub shape: TargetShape,
    pub lambda: u32,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TargetDefect {
    BadIndex(u32),
    GroupsNotPartition,
    HoleOutOfRange(Point),
    HoleNotProper,
}

impl fmt::Display for TargetDefect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TargetDefect::BadIndex(l) => write!(f, "index {l} is not 1 or 2"),
            TargetDefect::GroupsNotPartition => f.write_str("groups do not partition 0..n"),
            TargetDefect::HoleOutOfRange(p) => write!(f, "hole point {p} out of range"),
            TargetDefect::HoleNotProper => f.write_str("hole must be a proper subset with distinct points"),
        }
    }
}

impl TargetGraph {
    pub fn complete(v: u32, lambda: u32) -> TargetGraph {
        TargetGraph { shape: TargetShape::Complete { v }, lambda }
    }

    pub fn multipartite(groups: Vec<Vec<Point>>, lambda: u32) -> TargetGraph {
        TargetGraph { shape: TargetShape::Multipartite { groups }, lambda }
    }

    /// `u` groups of size `g` on points `0..gu`, group `i` = `ig..(i+1)g`.
    pub fn uniform_multipartite(g: u32, u: u32, lambda: u32) -> TargetGraph {
        let groups = (0..u).map(|i| (i * g..(i + 1) * g).collect()).collect();
        TargetGraph::multipartite(groups, lambda)
    }

    pub fn minus_hole(v: u32, hole: Vec<Point>, lambda: u32) -> TargetGraph {
        let mut hole = hole;
        hole.sort_unstable();
        TargetGraph { shape: TargetShape::CompleteMinusHole { v, hole }, lambda }
    }

    pub fn point_count(&self) -> u32 {
        match &self.shape {
            TargetShape::Complete { v } | TargetShape::CompleteMinusHole { v, .. } => *v,
            TargetShape::Multipartite { groups } => groups.iter().map(|g| g.len() as u32).sum(),
        }
    }

    pub fn check(&self) -> Result<(), TargetDefect> {
        if !(1..=2).contains(&self.lambda) {
            return Err(TargetDefect::BadIndex(self.lambda));
        }
        match &self.shape {
            TargetShape::Complete { .. } => Ok(()),
            TargetShape::Multipartite { groups } => {
                let n = self.point_count() as usize;
                let mut seen = vec![false; n];
                for p in groups.iter().flatten() {
                    let i = *p as usize;
                    if i >= n || seen[i] {
                        return Err(TargetDefect::GroupsNotPartition);
                    }
                    seen[i] = true;
                }
                if groups.iter().any(|g| g.is_empty()) {
                    return Err(TargetDefect::GroupsNotPartition);
                }
                Ok(())
            }
            TargetShape::CompleteMinusHole { v, hole } => {
                if let Some(p) = hole.iter().find(|&&p| p >= *v) {
                    return Err(TargetDefect::HoleOutOfRange(*p));
                }
                let mut h = hole.clone();
                h.sort_unstable();
                h.dedup();
                if h.len() != hole.len() || h.len() >= *v as usize {
                    return Err(TargetDefect::HoleNotProper);
                }
                Ok(())
            }
        }
    }

    /// Group index of every point (multipartite) or hole membership as group
    /// `1` versus `0` (hole targets); `None` for complete graphs.
    fn part_of(&self) -> Option<Vec<u32>> {
        let n = self.point_count() as usize;
        match &self.shape {
            TargetShape::Complete { .. } => None,
            TargetShape::Multipartite { groups } => {
                let mut part = vec![0; n];
                for (gi, g) in groups.iter().enumerate() {
                    for &p in g {
                        part[p as usize] = gi as u32;
                    }
                }
                Some(part)
            }
            TargetShape::CompleteMinusHole { hole, .. } => {
                let mut part = vec![0; n];
                for &p in hole {
                    part[p as usize] = 1;
                }
                Some(part)
            }
        }
    }

    /// Whether the underlying simple graph contains the pair `{a, b}`.
    pub fn has_edge(&self, a: Point, b: Point) -> bool {
        a != b && self.edge_filter()(a, b)
    }

    fn edge_filter(&self) -> impl Fn(Point, Point) -> bool {
        let part = self.part_of();
        let hole_target = matches!(self.shape, TargetShape::CompleteMinusHole { .. });
        move |a, b| match &part {
            None => true,
            Some(part) if hole_target => !(part[a as usize] == 1 && part[b as usize] == 1),
            Some(part) => part[a as usize] != part[b as usize],
        }
    }

    /// `lambda` copies of every edge of the underlying simple graph.
    pub fn edge_multiset(&self) -> EdgeMultiset {
        let n = self.point_count();
        let mut m = EdgeMultiset::new(n);
        let keep = self.edge_filter();
        for a in 0..n {
            for b in a + 1..n {
                if keep(a, b) {
                    m.add(Edge(a, b), self.lambda);
                }
            }
        }
        m
    }
}

/// Edge multiplicities over points `0..n`, stored densely.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeMultiset {
    n: u32,
    counts: Vec<u32>,
}

impl EdgeMultiset {
    pub fn new(n: u32) -> EdgeMultiset {
        let n64 = n as usize;
        EdgeMultiset { n, counts: vec![0; n64 * n64.saturating_sub(1) / 2] }
    }

    pub fn point_count(&self) -> u32 {
        self.n
    }

    fn index(&self, e: Edge) -> usize {
        let (a, b) = (e.0 as usize, e.1 as usize);
        let n = self.n as usize;
        debug_assert!(b < n);
        a * (2 * n - a - 1) / 2 + (b - a - 1)
    }

    pub fn get(&self, e: Edge) -> u32 {
        self.counts[self.index(e)]
    }

    pub fn add(&mut self, e: Edge, k: u32) {
        let i = self.index(e);
        self.counts[i] += k;
    }

    /// Removes one copy; returns `false` (and leaves the count at zero) if
    /// there was none.
    pub fn remove(&mut self, e: Edge) -> bool {
        let i = self.index(e);
        if self.counts[i] == 0 {
            return false;
        }
        self.counts[i] -= 1;
        true
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().map(|&c| c as u64).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = (Edge, u32)> + '_ {
        let n = self.n;
        (0..n)
            .flat_map(move |a| (a + 1..n).map(move |b| Edge(a, b)))
            .map(|e| (e, self.get(e)))
            .filter(|&(_, c)| c > 0)
    }

    pub fn degree(&self, p: Point) -> u32 {
        (0..self.n).filter(|&q| q != p).map(|q| self.get(Edge::new(p, q).unwrap())).sum()
    }

    pub fn from_blocks<'a>(n: u32, blocks: impl IntoIterator<Item = &'a Block>) -> EdgeMultiset {
        let mut m = EdgeMultiset::new(n);
        for b in blocks {
            for e in b.edges() {
                m.add(e, 1);
            }
        }
        m
    }

    /// Pairs whose multiplicities differ, as `(edge, self, other)`.
    pub fn differences(&self, other: &EdgeMultiset) -> Vec<(Edge, u32, u32)> {
        assert_eq!(self.n, other.n);
        let n = self.n;
        (0..n)
            .flat_map(move |a| (a + 1..n).map(move |b| Edge(a, b)))
            .filter_map(|e| {
                let (x, y) = (self.get(e), other.get(e));
                (x != y).then_some((e, x, y))
            })
            .collect()
    }
}

/// Class tallies a certificate claims for itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize)]
pub struct Claimed {
    pub r: u32,
    pub s: u32,
    pub partial_r: u32,
    pub partial_s: u32,
}

impl Claimed {
    pub fn tally(classes: &[BlockClass]) -> Claimed {
        let mut c = Claimed::default();
        for class in classes {
            match (class.kind, class.coverage.is_full()) {
                (BlockKind::Cycle4, true) => c.r += 1,
                (BlockKind::Star3, true) => c.s += 1,
                (BlockKind::Cycle4, false) => c.partial_r += 1,
                (BlockKind::Star3, false) => c.partial_s += 1,
                _ => {}
            }
        }
        c
    }

    pub fn full(&self) -> ClassPair {
        ClassPair::new(self.r, self.s)
    }

    pub fn partial(&self) -> ClassPair {
        ClassPair::new(self.partial_r, self.partial_s)
    }
}

/// A complete decomposition together with what it claims to be.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub target: TargetGraph,
    pub classes: Vec<BlockClass>,
    pub claimed: Claimed,
    pub provenance: Vec<String>,
}

impl Certificate {
    /// Builds a certificate whose claimed counts are tallied from `classes`.
    pub fn new(target: TargetGraph, classes: Vec<BlockClass>, provenance: Vec<String>) -> Certificate {
        let claimed = Claimed::tally(&classes);
        Certificate { target, classes, claimed, provenance }
    }

    pub fn profile(&self) -> ClassPair {
        self.claimed.full()
    }

    pub fn partial_profile(&self) -> ClassPair {
        self.claimed.partial()
    }

    pub fn full_classes(&self) -> impl Iterator<Item = &BlockClass> {
        self.classes.iter().filter(|c| c.coverage.is_full())
    }

    pub fn partial_classes(&self) -> impl Iterator<Item = &BlockClass> {
        self.classes.iter().filter(|c| !c.coverage.is_full())
    }

    /// Union edge multiset of all blocks; requires in-range labels.
    pub fn edge_multiset(&self) -> EdgeMultiset {
        EdgeMultiset::from_blocks(self.target.point_count(), self.classes.iter().flat_map(|c| &c.blocks))
    }

    /// Canonical blocks, blocks sorted within classes. Class order is kept.
    pub fn canonical(&self) -> Certificate {
        let target = match &self.target.shape {
            TargetShape::Multipartite { groups } => {
                let mut groups: Vec<Vec<Point>> = groups
                    .iter()
                    .map(|g| {
                        let mut g = g.clone();
                        g.sort_unstable();
                        g
                    })
                    .collect();
                groups.sort();
                TargetGraph::multipartite(groups, self.target.lambda)
            }
            TargetShape::CompleteMinusHole { v, hole } => {
                TargetGraph::minus_hole(*v, hole.clone(), self.target.lambda)
            }
            TargetShape::Complete { .. } => self.target.clone(),
        };
        Certificate {
            target,
            classes: self.classes.iter().map(BlockClass::canonical).collect(),
            claimed: self.claimed,
            provenance: self.provenance.clone(),
        }
    }
}
