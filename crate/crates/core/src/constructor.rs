//! Builds a URD(v; r, s) for every admissible `(v, (r, s))`, `v ≡ 0 (mod 4)`.
//!
//! Small orders come from the catalog. Larger ones combine ingredients:
//!
//! * `v = 20`: an incomplete design on 20 points with a hole of size 8,
//!   the hole filled with a URD(8).
//! * `v = 24, 36`: a URGDD of type `12^2` or `12^3` with each group filled by
//!   a URD(12).
//! * `v ≡ 0, 4 (mod 12)` and `v ≡ 8 (mod 24)` from 16 on: a 4-RGDD of type
//!   `g^u` with every block blown up to a URD(4) and every group filled by a
//!   URD(g).
//! * `v ≡ 20 (mod 24)` from 44 on: a frame expansion over a near-one-
//!   factorization of `K_n`, `n = (v-8)/12`, with a common hole of size 8.
//!
//! The result is always run through the verifier before it is returned.

use std::fmt;

use crate::catalog::{self, CatalogError, Designator};
use crate::ingredients::{IngredientError, IngredientKey, Provider};
use crate::model::{BlockClass, BlockKind, Certificate, Coverage, Point, TargetGraph, TargetShape};
use crate::spectrum::{admissible, max_star_index, ClassPair};
use crate::verifier::verify;

#[derive(Debug, thiserror::Error)]
pub enum ConstructError {
    #[error("{profile} is not an admissible profile for v = {v}")]
    Inadmissible { v: u32, profile: ClassPair },
    #[error("ingredient {key} not available: {reason}")]
    IngredientNotAvailable { key: String, reason: String },
    #[error(transparent)]
    Ingredient(IngredientError),
    #[error(transparent)]
    Catalog(#[from] CatalogError),
    #[error("expected profile {expected}, assembled {found}")]
    ProfileMismatch { expected: ClassPair, found: ClassPair },
    #[error("cannot assemble: {0}")]
    Assembly(String),
    #[error("assembled design failed verification: {0}")]
    Verification(String),
}

impl From<IngredientError> for ConstructError {
    fn from(e: IngredientError) -> Self {
        match e {
            IngredientError::NotAvailable { key, reason } => {
                ConstructError::IngredientNotAvailable { key: key.to_string(), reason }
            }
            e => ConstructError::Ingredient(e),
        }
    }
}

/// Which construction produces a given design.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Route {
    Catalog(Designator),
    /// IURD(20-8; partial; full) with the hole filled by URD(8; partial).
    HoleFill { partial: ClassPair, full: ClassPair },
    /// URGDD of type `12^u`, index 2, with groups filled by URD(12; fill).
    /// Alternatives are tried in order.
    Groups12 { u: u32, options: Vec<(ClassPair, ClassPair)> },
    /// 4-RGDD of type `g^u`; the first `cycle_classes` classes are blown
    /// up with URD(4;3,0), the rest with URD(4;0,4); groups get URD(g; fill).
    GroupFill { g: u32, u: u32, cycle_classes: u32, fill: ClassPair },
    /// Frame expansion on `8 + 12n` points; `fulls[i]` is the full profile
    /// used for point `i` of the near-one-factorization.
    FrameExpand { n: u32, partial: ClassPair, fulls: Vec<ClassPair> },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Plan {
    pub v: u32,
    pub profile: ClassPair,
    pub route: Route,
}

impl fmt::Display for Plan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "URD({};{},{}) ", self.v, self.profile.r, self.profile.s)?;
        match &self.route {
            Route::Catalog(d) => write!(f, "from the catalog entry {d}"),
            Route::HoleFill { partial, full } => write!(
                f,
                "by filling the hole of IURD(20-8;{},{};{},{}) with URD(8;{},{})",
                partial.r, partial.s, full.r, full.s, partial.r, partial.s
            ),
            Route::Groups12 { u, options } => {
                let (gdd, fill) = options[0];
                write!(f, "from URGDD(12^{u};{},{}) with groups filled by URD(12;{},{})", gdd.r, gdd.s, fill.r, fill.s)
            }
            Route::GroupFill { g, u, cycle_classes, fill } => write!(
                f,
                "from a 4-RGDD of type {g}^{u}, {cycle_classes} classes inflated to cycles, groups filled by URD({g};{},{})",
                fill.r, fill.s
            ),
            Route::FrameExpand { n, partial, fulls } => {
                write!(f, "by frame expansion over K_{n} with hole URD(8;{},{}), fulls", partial.r, partial.s)?;
                for p in fulls {
                    write!(f, " {p}")?;
                }
                Ok(())
            }
        }
    }
}

fn cp(r: u32, s: u32) -> ClassPair {
    ClassPair::new(r, s)
}

/// Chooses a route; does not touch any ingredient.
pub fn plan(v: u32, profile: ClassPair) -> Result<Plan, ConstructError> {
    if !admissible(v, profile) {
        return Err(ConstructError::Inadmissible { v, profile });
    }
    let x = profile.s / 4;
    let route = match v {
        4 | 8 | 12 => Route::Catalog(Designator::Urd { v, profile }),
        20 => {
            let x1 = x.saturating_sub(4);
            Route::HoleFill { partial: ClassPair::from_index(8, x1), full: cp(12 - 3 * (x - x1), 4 * (x - x1)) }
        }
        24 => {
            if x < 4 {
                Route::Groups12 { u: 2, options: vec![(cp(12, 0), ClassPair::from_index(12, x))] }
            } else {
                Route::Groups12 { u: 2, options: vec![(cp(0, 16), ClassPair::from_index(12, x - 4))] }
            }
        }
        36 => {
            let options = (0..=4u32)
                .filter(|&y| 2 * y <= x && x - 2 * y <= 3)
                .map(|y| (cp(24 - 6 * y, 8 * y), ClassPair::from_index(12, x - 2 * y)))
                .collect();
            Route::Groups12 { u: 3, options }
        }
        _ => {
            let (g, u) = match v % 24 {
                0 | 12 => (12, v / 12),
                4 | 16 => (4, v / 4),
                8 => (8, v / 8),
                20 => return Ok(Plan { v, profile, route: frame_plan(v, x) }),
                _ => unreachable!("admissible orders are multiples of 4"),
            };
            let t = g * (u - 1) / 3;
            let y = x.saturating_sub(t);
            debug_assert!(y <= max_star_index(g).unwrap_or(0));
            Route::GroupFill { g, u, cycle_classes: y + t - x, fill: ClassPair::from_index(g, y) }
        }
    };
    Ok(Plan { v, profile, route })
}

fn frame_plan(v: u32, x: u32) -> Route {
    let n = (v - 8) / 12;
    let x1 = (0..=2).find(|&x1| x1 <= x && (x - x1) % 2 == 0 && x - x1 <= 4 * n).expect("x is at most 4n+2");
    // later points take the stars
    let mut left = (x - x1) / 2;
    let mut ys = vec![0; n as usize];
    for y in ys.iter_mut().rev() {
        *y = left.min(2);
        left -= *y;
    }
    Route::FrameExpand {
        n,
        partial: ClassPair::from_index(8, x1),
        fulls: ys.into_iter().map(|y| cp(12 - 6 * y, 8 * y)).collect(),
    }
}

fn sorted_by_kind(mut classes: Vec<BlockClass>) -> Vec<BlockClass> {
    classes.sort_by_key(|c| c.kind);
    classes
}

fn groups_of(c: &Certificate) -> Result<&[Vec<Point>], ConstructError> {
    match &c.target.shape {
        TargetShape::Multipartite { groups } => Ok(groups),
        _ => Err(ConstructError::Assembly("expected a multipartite design".into())),
    }
}

/// Fills every group of `gdd` with a copy of `fill` (a design on `2K_g`,
/// `g` the group size), class `m` of every copy going into one class.
pub fn fill_groups(gdd: &Certificate, fill: &Certificate) -> Result<Certificate, ConstructError> {
    let groups = groups_of(gdd)?;
    let g = fill.target.point_count();
    if !matches!(fill.target.shape, TargetShape::Complete { .. }) || fill.target.lambda != gdd.target.lambda {
        return Err(ConstructError::Assembly("group fill must be a complete design of the same index".into()));
    }
    if groups.iter().any(|gr| gr.len() as u32 != g) {
        return Err(ConstructError::Assembly(format!("groups are not all of size {g}")));
    }
    if fill.classes.iter().any(|c| !c.coverage.is_full()) {
        return Err(ConstructError::Assembly("group fill has partial classes".into()));
    }
    let mut classes = gdd.classes.clone();
    for class in &fill.classes {
        let mut blocks = Vec::new();
        for gr in groups {
            blocks.extend(class.blocks.iter().map(|b| b.relabel(|p| gr[p as usize])));
        }
        classes.push(BlockClass::full(class.kind, blocks));
    }
    let mut provenance = gdd.provenance.clone();
    provenance.extend(fill.provenance.iter().map(|p| format!("group fill: {p}")));
    Ok(Certificate::new(
        TargetGraph::complete(gdd.target.point_count(), gdd.target.lambda),
        sorted_by_kind(classes),
        provenance,
    ))
}

/// Replaces every block of class `i` of a 4-RGDD by a copy of `fills[i]`
/// (a design on `2K_4`), merging class `m` of the copies within a class.
/// The blocks' points, sorted, play the role of `0..4`.
pub fn inflate_rgdd(rgdd: &Certificate, fills: &[&Certificate]) -> Result<Certificate, ConstructError> {
    groups_of(rgdd)?;
    if fills.len() != rgdd.classes.len() {
        return Err(ConstructError::Assembly(format!(
            "{} classes but {} fills",
            rgdd.classes.len(),
            fills.len()
        )));
    }
    let lambda = fills.first().map_or(2, |f| f.target.lambda);
    let mut classes = Vec::new();
    for (class, fill) in rgdd.classes.iter().zip(fills) {
        if class.kind != BlockKind::Complete4 || fill.target != TargetGraph::complete(4, lambda) {
            return Err(ConstructError::Assembly("inflation needs K4 blocks and designs on 4 points".into()));
        }
        for fc in &fill.classes {
            let mut blocks = Vec::new();
            for b in &class.blocks {
                let mut pts = b.points.clone();
                pts.sort_unstable();
                blocks.extend(fc.blocks.iter().map(|x| x.relabel(|p| pts[p as usize])));
            }
            classes.push(BlockClass::full(fc.kind, blocks));
        }
    }
    Ok(Certificate::new(
        TargetGraph { shape: rgdd.target.shape.clone(), lambda: lambda * rgdd.target.lambda },
        sorted_by_kind(classes),
        rgdd.provenance.clone(),
    ))
}

/// Fills the hole of `holed` (partial classes missing the hole) with
/// `fill`, a design on the hole: partial class `m` gains class `m` of `fill`.
pub fn fill_hole(holed: &Certificate, fill: &Certificate) -> Result<Certificate, ConstructError> {
    let TargetShape::CompleteMinusHole { v, hole } = &holed.target.shape else {
        return Err(ConstructError::Assembly("expected a design with a hole".into()));
    };
    let partial: Vec<&BlockClass> = sorted_refs(holed.partial_classes());
    let fills: Vec<&BlockClass> = sorted_refs(fill.classes.iter());
    if fill.target != TargetGraph::complete(hole.len() as u32, holed.target.lambda) || partial.len() != fills.len() {
        return Err(ConstructError::Assembly(format!(
            "hole of size {} with {} partial classes cannot take this fill",
            hole.len(),
            partial.len()
        )));
    }
    let mut classes: Vec<BlockClass> = holed.full_classes().cloned().collect();
    for (p, f) in partial.iter().zip(&fills) {
        if p.kind != f.kind {
            return Err(ConstructError::Assembly("partial classes and hole fill differ in kinds".into()));
        }
        let mut blocks = p.blocks.clone();
        blocks.extend(f.blocks.iter().map(|b| b.relabel(|x| hole[x as usize])));
        classes.push(BlockClass::full(p.kind, blocks));
    }
    let mut provenance = holed.provenance.clone();
    provenance.extend(fill.provenance.iter().map(|p| format!("hole fill: {p}")));
    Ok(Certificate::new(TargetGraph::complete(*v, holed.target.lambda), sorted_by_kind(classes), provenance))
}

fn sorted_refs<'a>(it: impl Iterator<Item = &'a BlockClass>) -> Vec<&'a BlockClass> {
    let mut v: Vec<&BlockClass> = it.collect();
    v.sort_by_key(|c| c.kind);
    v
}

/// Frame expansion on `8 + 12n` points. `hole` is a design on 8 points;
/// `holed[i]` a design on 20 points with hole `0..8` whose partial profile
/// matches `hole`; `urgdds[i]` a design on `2K_{12,12}` whose profile and
/// kinds match the full classes of `holed[i]`.
pub fn frame_expand(hole: &Certificate, holed: &[Certificate], urgdds: &[Certificate]) -> Result<Certificate, ConstructError> {
    let n = holed.len() as u32;
    if n % 2 == 0 || urgdds.len() != holed.len() {
        return Err(ConstructError::Assembly("frame expansion needs an odd number of points".into()));
    }
    let v = 8 + 12 * n;
    let lambda = hole.target.lambda;
    let frame = crate::ingredients::near_one_factorization(n);
    let group = |i: u32, p: Point| 8 + 12 * i + p;
    // point p of a 20-point holed design placed on H ∪ G_i
    let lift = |i: u32| move |p: Point| if p < 8 { p } else { group(i, p - 8) };
    let hole_classes = sorted_refs(hole.classes.iter());
    let mut partial: Vec<BlockClass> = hole_classes
        .iter()
        .map(|c| BlockClass::full(c.kind, c.blocks.clone()))
        .collect();
    let mut classes = Vec::new();
    for i in 0..n {
        let d = &holed[i as usize];
        if d.target != TargetGraph::minus_hole(20, (0..8).collect(), lambda) {
            return Err(ConstructError::Assembly("holed designs must be on 20 points with hole 0..8".into()));
        }
        let d_partial = sorted_refs(d.partial_classes());
        if d_partial.len() != partial.len() || d_partial.iter().zip(&partial).any(|(a, b)| a.kind != b.kind) {
            return Err(ConstructError::Assembly(format!("holed design {i} does not match the hole fill")));
        }
        for (acc, c) in partial.iter_mut().zip(&d_partial) {
            acc.blocks.extend(c.blocks.iter().map(|b| b.relabel(lift(i))));
        }
        let d_full = sorted_refs(d.full_classes());
        let gdd = &urgdds[i as usize];
        let gdd_classes = sorted_refs(gdd.classes.iter());
        if gdd.target != TargetGraph::uniform_multipartite(12, 2, lambda)
            || gdd_classes.len() != d_full.len()
            || gdd_classes.iter().zip(&d_full).any(|(a, b)| a.kind != b.kind)
        {
            return Err(ConstructError::Assembly(format!("URGDD for point {i} does not match its holed design")));
        }
        let edges = &frame.classes[i as usize].blocks;
        for (fc, gc) in d_full.iter().zip(&gdd_classes) {
            let mut blocks: Vec<_> = fc.blocks.iter().map(|b| b.relabel(lift(i))).collect();
            for e in edges {
                let (j, k) = (e.points[0], e.points[1]);
                blocks.extend(gc.blocks.iter().map(|b| b.relabel(|p| if p < 12 { group(j, p) } else { group(k, p - 12) })));
            }
            classes.push(BlockClass::full(fc.kind, blocks));
        }
    }
    for c in &mut partial {
        c.coverage = Coverage::Full;
    }
    classes.extend(partial);
    let mut provenance = vec![format!("frame expansion over a near-one-factorization of K_{n}")];
    provenance.extend(hole.provenance.iter().map(|p| format!("hole: {p}")));
    for (i, (d, g)) in holed.iter().zip(urgdds).enumerate() {
        provenance.extend(d.provenance.iter().map(|p| format!("point {i}: {p}")));
        provenance.extend(g.provenance.iter().map(|p| format!("point {i}: {p}")));
    }
    Ok(Certificate::new(TargetGraph::complete(v, lambda), sorted_by_kind(classes), provenance))
}

/// Builds and verifies a URD(v; profile).
pub fn construct_urd(v: u32, profile: ClassPair, provider: &mut Provider) -> Result<Certificate, ConstructError> {
    let plan = plan(v, profile)?;
    let mut c = solve_plan(&plan, provider)?;
    c.provenance.insert(0, plan.to_string());
    if c.profile() != profile {
        return Err(ConstructError::ProfileMismatch { expected: profile, found: c.profile() });
    }
    let report = verify(&c);
    if !report.passed() {
        return Err(ConstructError::Verification(report.to_string()));
    }
    Ok(c)
}

fn urd(v: u32, profile: ClassPair, provider: &mut Provider) -> Result<Certificate, ConstructError> {
    catalog::lookup(&Designator::Urd { v, profile }, provider)
}

pub fn solve_plan(plan: &Plan, provider: &mut Provider) -> Result<Certificate, ConstructError> {
    match &plan.route {
        Route::Catalog(d) => catalog::lookup(d, provider),
        Route::HoleFill { partial, full } => {
            let holed = catalog::lookup(&Designator::Iurd20 { partial: *partial, full: *full }, provider)?;
            let hole = urd(8, *partial, provider)?;
            fill_hole(&holed, &hole)
        }
        Route::Groups12 { u, options } => {
            // smallest available star count first; search only once no
            // option is available directly or from the store
            let mut missing = Vec::new();
            for searching in [false, true] {
                if searching && !provider.search {
                    break;
                }
                missing.clear();
                for &(gdd_profile, fill) in options {
                    let key = IngredientKey::urgdd(12, *u, 2, gdd_profile);
                    let got = if searching { provider.provide(&key) } else { provider.provide_stored(&key) };
                    match got {
                        Ok(gdd) => {
                            let fill = urd(12, fill, provider)?;
                            return fill_groups(&gdd, &fill);
                        }
                        Err(IngredientError::NotAvailable { key, reason }) => missing.push(format!("{key} ({reason})")),
                        Err(e) => return Err(e.into()),
                    }
                }
            }
            Err(ConstructError::IngredientNotAvailable {
                key: missing.first().cloned().unwrap_or_default(),
                reason: format!(
                    "no URGDD of type 12^{u} with a usable profile is available; tried {}",
                    missing.join(", ")
                ),
            })
        }
        Route::GroupFill { g, u, cycle_classes, fill } => {
            let rgdd = provider.provide(&IngredientKey::rgdd4(*g, *u))?;
            let cyc = urd(4, cp(3, 0), provider)?;
            let star = urd(4, cp(0, 4), provider)?;
            let fills: Vec<&Certificate> = (0..rgdd.classes.len() as u32)
                .map(|i| if i < *cycle_classes { &cyc } else { &star })
                .collect();
            let inflated = inflate_rgdd(&rgdd, &fills)?;
            let fill = if *g == 4 { urd(4, *fill, provider)? } else { construct_urd(*g, *fill, provider)? };
            fill_groups(&inflated, &fill)
        }
        Route::FrameExpand { partial, fulls, .. } => {
            let hole = urd(8, *partial, provider)?;
            let mut holed = Vec::new();
            let mut gdds = Vec::new();
            for &full in fulls {
                holed.push(catalog::lookup(&Designator::Iurd20 { partial: *partial, full }, provider)?);
                gdds.push(catalog::lookup(&Designator::Urgdd12Squared { profile: full }, provider)?);
            }
            frame_expand(&hole, &holed, &gdds)
        }
    }
}
