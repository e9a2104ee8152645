//! Backtracking and exact-cover search for small auxiliary designs.
//!
//! Three strategies are available:
//!
//! * a plain class-by-class search that builds each class as an exact cover
//!   of the point set, branching on the lowest uncovered point and tracking
//!   remaining pair capacities (works for any index and block kind);
//! * a difference-matrix search for resolvable transversal designs, i.e.
//!   4-RGDDs of type `g^4`;
//! * an orbit search that looks for base classes under a prescribed point
//!   action and solves the resulting exact cover with dancing links.
//!
//! Every design returned has already passed the verifier.

pub mod dlx;

use std::time::{Duration, Instant};

use rand::seq::SliceRandom;
use rand::SeedableRng;

use crate::model::{Block, BlockClass, BlockKind, Certificate, Point, TargetGraph, TargetShape};
use crate::verifier::verify;
use dlx::{ExactCover, Outcome};

/// Largest point count the searches accept.
pub const POINT_CAP: u32 = 48;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Budget {
    pub nodes: u64,
    pub time: Option<Duration>,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { nodes: 20_000_000, time: None }
    }
}

impl Budget {
    pub fn nodes(nodes: u64) -> Budget {
        Budget { nodes, time: None }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
pub enum SearchError {
    #[error("nothing found within the budget ({nodes} nodes)")]
    OutOfBudget { nodes: u64 },
    #[error("search space exhausted without a solution ({nodes} nodes); this rules out only the restricted form searched")]
    Exhausted { nodes: u64 },
    #[error("{points} points exceeds the search cap of {cap}")]
    TooLarge { points: u32, cap: u32 },
    #[error("impossible parameters: {0}")]
    Impossible(String),
}

/// How to look for a 4-RGDD.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GddStrategy {
    /// Pick a strategy from the parameters.
    Auto,
    Plain { seed: u64 },
    /// Type `g^4` only.
    DifferenceMatrix,
    /// Type `4^u`, `u` prime: rotate the groups, one class fixed per
    /// leftover.
    RotateGroups,
    /// Type `4^u`: a resolvable design on `4u` points with blocks of size 4,
    /// one class of which becomes the groups. The design is taken
    /// 1-rotational: `Z_m` with `m = (4u-1)/3` acting on `Z_m x 3` plus a
    /// fixed point, all classes in the orbit of one base class.
    OneRotational,
}

struct Clock {
    start: Instant,
    budget: Budget,
    nodes: u64,
}

impl Clock {
    fn new(budget: Budget) -> Clock {
        Clock { start: Instant::now(), budget, nodes: 0 }
    }

    /// Counts a node; `false` once the budget is spent.
    fn tick(&mut self) -> bool {
        self.nodes += 1;
        if self.nodes > self.budget.nodes {
            return false;
        }
        match self.budget.time {
            Some(limit) if self.nodes % 4096 == 0 => self.start.elapsed() <= limit,
            _ => true,
        }
    }
}

/// A finite abelian group `Z_{m_1} x ... x Z_{m_k}`, elements numbered in
/// mixed radix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AbelianGroup {
    moduli: Vec<u32>,
    add: Vec<u32>,
    sub: Vec<u32>,
    order: u32,
}

impl AbelianGroup {
    pub fn new(moduli: Vec<u32>) -> AbelianGroup {
        assert!(moduli.iter().all(|&m| m >= 1));
        let order: u32 = moduli.iter().product();
        let digits = |mut x: u32| -> Vec<u32> {
            moduli
                .iter()
                .map(|&m| {
                    let d = x % m;
                    x /= m;
                    d
                })
                .collect()
        };
        let undigits = |d: &[u32]| -> u32 { d.iter().zip(&moduli).rev().fold(0, |acc, (&x, &m)| acc * m + x) };
        let n = order as usize;
        let mut add = vec![0; n * n];
        let mut sub = vec![0; n * n];
        for a in 0..order {
            let da = digits(a);
            for b in 0..order {
                let db = digits(b);
                let s: Vec<u32> = da.iter().zip(&db).zip(&moduli).map(|((x, y), m)| (x + y) % m).collect();
                let d: Vec<u32> = da.iter().zip(&db).zip(&moduli).map(|((x, y), m)| (x + m - y) % m).collect();
                add[(a * order + b) as usize] = undigits(&s);
                sub[(a * order + b) as usize] = undigits(&d);
            }
        }
        AbelianGroup { moduli, add, sub, order }
    }

    /// A group of order `n` whose Sylow 2-subgroup is non-cyclic when
    /// `4 | n`: `Z_2^(k-1) x Z_(2m)` for `n = 2^k m`, `m` odd.
    pub fn for_order(n: u32) -> AbelianGroup {
        assert!(n >= 1);
        let k = n.trailing_zeros();
        let m = n >> k;
        if k >= 2 {
            let mut moduli = vec![2; (k - 1) as usize];
            moduli.push(2 * m);
            AbelianGroup::new(moduli)
        } else {
            AbelianGroup::new(vec![n])
        }
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn moduli(&self) -> &[u32] {
        &self.moduli
    }

    pub fn add(&self, a: u32, b: u32) -> u32 {
        self.add[(a * self.order + b) as usize]
    }

    pub fn sub(&self, a: u32, b: u32) -> u32 {
        self.sub[(a * self.order + b) as usize]
    }
}

/// A `(g, rows, 1)` difference matrix over `group`: for any two rows the
/// entrywise differences run over the group exactly once. Row 0 is zero and
/// row 1 lists the elements in order.
pub fn find_difference_matrix(group: &AbelianGroup, rows: usize, budget: Budget) -> Result<Vec<Vec<u32>>, SearchError> {
    let g = group.order() as usize;
    if rows < 2 {
        return Err(SearchError::Impossible("a difference matrix needs two rows".into()));
    }
    let mut m = vec![vec![0u32; g]; rows];
    m[1] = (0..g as u32).collect();
    if rows == 2 {
        return Ok(m);
    }
    // used[i][j][d]: difference d between rows j < i already used
    let mut used = vec![vec![vec![false; g]; rows]; rows];
    for c in 0..g {
        used[1][0][c] = true;
    }
    let cells: Vec<(usize, usize)> = (0..g).flat_map(|c| (2..rows).map(move |i| (i, c))).collect();
    let mut clock = Clock::new(budget);
    let mut choice = vec![0u32; cells.len()];
    let mut depth = 0usize;
    let mut next = 0u32;
    loop {
        if depth == cells.len() {
            return Ok(m);
        }
        let (i, c) = cells[depth];
        let mut placed = false;
        for v in next..g as u32 {
            let ok = (0..i).all(|j| !used[i][j][group.sub(v, m[j][c]) as usize]);
            if ok {
                if !clock.tick() {
                    return Err(SearchError::OutOfBudget { nodes: clock.nodes });
                }
                for j in 0..i {
                    let d = group.sub(v, m[j][c]) as usize;
                    used[i][j][d] = true;
                }
                m[i][c] = v;
                choice[depth] = v;
                depth += 1;
                next = 0;
                placed = true;
                break;
            }
        }
        if !placed {
            if depth == 0 {
                return Err(SearchError::Exhausted { nodes: clock.nodes });
            }
            depth -= 1;
            let (i, c) = cells[depth];
            let v = choice[depth];
            for j in 0..i {
                let d = group.sub(v, m[j][c]) as usize;
                used[i][j][d] = false;
            }
            next = v + 1;
        }
    }
}

/// Develops a 4-row difference matrix into a 4-RGDD of type `g^4`: group `i`
/// is `ig..(i+1)g`, and column `c` gives the class of blocks
/// `{i*g + M[i][c] + h}` for `h` in the group.
pub fn rgdd_from_difference_matrix(group: &AbelianGroup, m: &[Vec<u32>]) -> Vec<BlockClass> {
    let g = group.order();
    assert_eq!(m.len(), 4);
    (0..g as usize)
        .map(|c| {
            let blocks = (0..g)
                .map(|h| {
                    let p: Vec<Point> = (0..4).map(|i| i as u32 * g + group.add(m[i][c], h)).collect();
                    Block::quad([p[0], p[1], p[2], p[3]])
                })
                .collect();
            BlockClass::full(BlockKind::Complete4, blocks)
        })
        .collect()
}

/// Parameters of an orbit search for a 4-RGDD on a uniform multipartite
/// graph. `action` lists every element of the acting group as a permutation
/// of the points; it must preserve the groups.
pub struct OrbitSpec {
    pub group_size: u32,
    pub groups: u32,
    pub action: Vec<Vec<Point>>,
    /// Base classes whose orbits are `|action|` distinct classes.
    pub regular_slots: usize,
    /// Classes that are single block orbits.
    pub fixed_slots: usize,
}

impl OrbitSpec {
    /// `Z_u` acting on group indices of type `4^u` (`u` prime).
    pub fn rotate_groups(u: u32) -> OrbitSpec {
        let n = 4 * u;
        let action = (0..u)
            .map(|k| (0..n).map(|p| ((p / 4 + k) % u) * 4 + p % 4).collect())
            .collect();
        let t = 4 * (u - 1) / 3;
        OrbitSpec {
            group_size: 4,
            groups: u,
            action,
            regular_slots: (t / u) as usize,
            fixed_slots: (t % u) as usize,
        }
    }
}

fn image(perm: &[Point], b: &[Point; 4]) -> [Point; 4] {
    let mut x = [perm[b[0] as usize], perm[b[1] as usize], perm[b[2] as usize], perm[b[3] as usize]];
    x.sort_unstable();
    x
}

pub fn orbit_search(spec: &OrbitSpec, budget: Budget) -> Result<Vec<BlockClass>, SearchError> {
    let g = spec.group_size;
    let u = spec.groups;
    let n = g * u;
    let order = spec.action.len();
    let group_of = |p: Point| p / g;
    // pair orbits on cross-group pairs
    let idx = |a: Point, b: Point| (a.min(b) * n + a.max(b)) as usize;
    let mut orbit_id = vec![usize::MAX; (n * n) as usize];
    let mut orbits = 0usize;
    for a in 0..n {
        for b in a + 1..n {
            if group_of(a) == group_of(b) || orbit_id[idx(a, b)] != usize::MAX {
                continue;
            }
            let mut size = 0;
            for perm in &spec.action {
                let (x, y) = (perm[a as usize], perm[b as usize]);
                if group_of(x) == group_of(y) {
                    return Err(SearchError::Impossible("action does not preserve groups".into()));
                }
                if orbit_id[idx(x, y)] != orbits {
                    orbit_id[idx(x, y)] = orbits;
                    size += 1;
                }
            }
            if size != order {
                return Err(SearchError::Impossible("action is not free on cross-group pairs".into()));
            }
            orbits += 1;
        }
    }
    let slot_pairs = spec.regular_slots * (n as usize / 4) * 6 + spec.fixed_slots * 6;
    if slot_pairs != orbits || (spec.fixed_slots > 0 && order * 4 != n as usize) {
        return Err(SearchError::Impossible(format!(
            "slots cover {slot_pairs} pair orbits but there are {orbits}"
        )));
    }

    let regular_cols = spec.regular_slots * n as usize;
    let fixed_base = regular_cols;
    let orbit_base = fixed_base + spec.fixed_slots;
    let mut ec = ExactCover::new(orbit_base + orbits, 0);
    let mut rows: Vec<(usize, [Point; 4])> = Vec::new();

    let mut blocks: Vec<[Point; 4]> = Vec::new();
    let gs: Vec<u32> = (0..u).collect();
    for a in 0..u {
        for b in a + 1..u {
            for c in b + 1..u {
                for d in c + 1..u {
                    let _ = &gs;
                    for code in 0..g.pow(4) {
                        let x = [code % g, code / g % g, code / (g * g) % g, code / (g * g * g)];
                        blocks.push([a * g + x[0], b * g + x[1], c * g + x[2], d * g + x[3]]);
                    }
                }
            }
        }
    }
    let pair_orbits = |b: &[Point; 4]| -> Option<Vec<usize>> {
        let mut ids = Vec::with_capacity(6);
        for i in 0..4 {
            for j in i + 1..4 {
                let id = orbit_id[idx(b[i], b[j])];
                if ids.contains(&id) {
                    return None;
                }
                ids.push(id);
            }
        }
        Some(ids)
    };
    for b in &blocks {
        let Some(ids) = pair_orbits(b) else { continue };
        for s in 0..spec.regular_slots {
            let mut cols: Vec<usize> = b.iter().map(|&p| s * n as usize + p as usize).collect();
            cols.extend(ids.iter().map(|&i| orbit_base + i));
            ec.add_row(&cols);
            rows.push((s, *b));
        }
        if spec.fixed_slots > 0 {
            let imgs: Vec<[Point; 4]> = spec.action.iter().map(|perm| image(perm, b)).collect();
            if imgs.iter().any(|x| x < b) {
                continue;
            }
            let mut seen = vec![false; n as usize];
            let partition = imgs.iter().flatten().all(|&p| !std::mem::replace(&mut seen[p as usize], true));
            if !partition {
                continue;
            }
            for f in 0..spec.fixed_slots {
                let mut cols = vec![fixed_base + f];
                cols.extend(ids.iter().map(|&i| orbit_base + i));
                ec.add_row(&cols);
                rows.push((spec.regular_slots + f, *b));
            }
        }
    }

    let (outcome, nodes) = ec.solve(budget.nodes);
    let chosen = match outcome {
        Outcome::Found(r) => r,
        Outcome::Exhausted => return Err(SearchError::Exhausted { nodes }),
        Outcome::OutOfBudget => return Err(SearchError::OutOfBudget { nodes }),
    };
    let mut classes = Vec::new();
    for s in 0..spec.regular_slots + spec.fixed_slots {
        let base: Vec<[Point; 4]> = chosen.iter().map(|&r| rows[r]).filter(|(slot, _)| *slot == s).map(|(_, b)| b).collect();
        if s < spec.regular_slots {
            for perm in &spec.action {
                classes.push(BlockClass::full(
                    BlockKind::Complete4,
                    base.iter().map(|b| Block::quad(image(perm, b))).collect(),
                ));
            }
        } else {
            let b = base[0];
            classes.push(BlockClass::full(
                BlockKind::Complete4,
                spec.action.iter().map(|perm| Block::quad(image(perm, &b))).collect(),
            ));
        }
    }
    Ok(classes)
}

/// A resolvable design with blocks of size 4 on `3m + 1` points, `m` odd:
/// points `(x, i) = 3x + i` for `x` in `Z_m`, `i < 3`, and `3m`. The base
/// class contains `{3m, (0,0), (0,1), (0,2)}` and is invariant under
/// `(x, i) -> (alpha x, i + 1)`, `alpha^3 = 1`; its `m` translates are the
/// classes. Each multiplier is tried in turn.
pub fn one_rotational_design(m: u32, budget: Budget) -> Result<(Vec<BlockClass>, u32), SearchError> {
    if m % 2 == 0 || m < 3 {
        return Err(SearchError::Impossible(format!("Z_{m} needs odd order at least 3")));
    }
    let n = 3 * m + 1;
    if n > POINT_CAP {
        return Err(SearchError::TooLarge { points: n, cap: POINT_CAP });
    }
    let inf = 3 * m;
    let mut nodes = 0;
    let mut out_of_budget = false;
    let mut alphas: Vec<u32> = (2..m).filter(|a| a * a % m * a % m == 1).collect();
    alphas.push(1);
    for alpha in alphas {
        let mul = |p: Point| if p == inf { p } else { 3 * (alpha * (p / 3) % m) + (p % 3 + 1) % 3 };
        let m1: Vec<Point> = (0..n).map(mul).collect();
        let m2: Vec<Point> = (0..n).map(|p| mul(mul(p))).collect();
        // Z_m orbit of a pair: difference and the two coordinates
        let orbit = |a: Point, b: Point| -> usize {
            let (a, b) = if a == inf || (b != inf && a > b) { (b, a) } else { (a, b) };
            if b == inf {
                return (a % 3) as usize;
            }
            let (xa, ia, xb, ib) = (a / 3, a % 3, b / 3, b % 3);
            let (i, j, d) = if ia <= ib { (ia, ib, (xb + m - xa) % m) } else { (ib, ia, (xa + m - xb) % m) };
            let d = if i == j { d.min(m - d) } else { d };
            3 + ((i * 3 + j) * m + d) as usize
        };
        let cols = 3 + 9 * m as usize;
        let fixed = [inf, 0, 1, 2];
        let mut pre = vec![false; cols];
        for (k, &a) in fixed.iter().enumerate() {
            for &b in &fixed[k + 1..] {
                pre[orbit(a, b)] = true;
            }
        }
        // exact cover: points 3..3m, then pair orbits not already used
        let orbit_col: Vec<Option<usize>> = {
            let mut next = n as usize - 4;
            (0..cols)
                .map(|c| {
                    let real = c >= 3 && {
                        let r = (c - 3) as u32;
                        let (ij, d) = (r / m, r % m);
                        let (i, j) = (ij / 3, ij % 3);
                        i <= j && !(i == j && (d == 0 || d > m / 2))
                    };
                    ((c < 3 || real) && !pre[c]).then(|| {
                        next += 1;
                        next - 1
                    })
                })
                .collect()
        };
        let total = n as usize - 4 + orbit_col.iter().flatten().count();
        let mut ec = ExactCover::new(total, 0);
        let mut rows: Vec<[[Point; 4]; 3]> = Vec::new();
        for a in 3..inf {
            for b in a + 1..inf {
                for c in b + 1..inf {
                    for d in c + 1..inf {
                        let b0 = [a, b, c, d];
                        let b1 = image(&m1, &b0);
                        let b2 = image(&m2, &b0);
                        if b1 < b0 || b2 < b0 {
                            continue;
                        }
                        let mut points: Vec<Point> = [b0, b1, b2].iter().flatten().copied().collect();
                        points.sort_unstable();
                        if points.windows(2).any(|w| w[0] == w[1]) {
                            continue;
                        }
                        let mut ids = Vec::with_capacity(18);
                        let mut ok = true;
                        for blk in [b0, b1, b2] {
                            for i in 0..4 {
                                for j in i + 1..4 {
                                    match orbit_col[orbit(blk[i], blk[j])] {
                                        Some(col) if !ids.contains(&col) => ids.push(col),
                                        _ => ok = false,
                                    }
                                }
                            }
                        }
                        if !ok {
                            continue;
                        }
                        let mut row: Vec<usize> = points.iter().map(|&p| p as usize - 3).collect();
                        row.extend(ids);
                        ec.add_row(&row);
                        rows.push([b0, b1, b2]);
                    }
                }
            }
        }
        let (outcome, used) = ec.solve(budget.nodes.saturating_sub(nodes));
        nodes += used;
        match outcome {
            Outcome::Found(chosen) => {
                let mut base = vec![Block::quad(fixed)];
                for r in chosen {
                    base.extend(rows[r].iter().map(|b| Block::quad(*b)));
                }
                let classes = (0..m)
                    .map(|k| {
                        let shift = |p: Point| if p == inf { p } else { 3 * ((p / 3 + k) % m) + p % 3 };
                        BlockClass::full(BlockKind::Complete4, base.iter().map(|b| b.relabel(shift)).collect())
                    })
                    .collect();
                return Ok((classes, alpha));
            }
            Outcome::Exhausted => {}
            Outcome::OutOfBudget => {
                out_of_budget = true;
                break;
            }
        }
    }
    if out_of_budget {
        Err(SearchError::OutOfBudget { nodes })
    } else {
        Err(SearchError::Exhausted { nodes })
    }
}

/// Relabels a resolvable design with blocks of size 4 so that the blocks of
/// its first class become the groups `4i..4i+4`, and drops that class.
fn groups_from_class(design: &[BlockClass]) -> Vec<BlockClass> {
    let n: usize = design[0].blocks.len() * 4;
    let mut label = vec![0; n];
    for (i, b) in design[0].blocks.iter().enumerate() {
        for (j, &p) in b.points.iter().enumerate() {
            label[p as usize] = (4 * i + j) as Point;
        }
    }
    design[1..].iter().map(|c| c.relabel(|p| label[p as usize])).collect()
}

/// Options for the class-by-class search.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PlainOptions {
    /// Degree feasibility checks between classes and ordering of
    /// interchangeable classes. Turning this off never changes whether a
    /// solution exists, only how long it takes to decide.
    pub prune: bool,
    /// Shuffles candidate order within each branching step.
    pub seed: Option<u64>,
}

impl Default for PlainOptions {
    fn default() -> Self {
        PlainOptions { prune: true, seed: None }
    }
}

struct Plain<'a> {
    n: usize,
    cap: Vec<u8>,
    kinds: &'a [BlockKind],
    opts: PlainOptions,
    rng: Option<rand::rngs::StdRng>,
    clock: Clock,
    classes: Vec<Vec<[Point; 4]>>,
    first: Vec<[Point; 4]>,
}

enum Step {
    Done,
    Dead,
    Stop,
}

impl Plain<'_> {
    fn cap(&self, a: Point, b: Point) -> u8 {
        self.cap[a as usize * self.n + b as usize]
    }

    fn bump(&mut self, a: Point, b: Point, delta: i8) {
        let n = self.n;
        for (x, y) in [(a, b), (b, a)] {
            let c = &mut self.cap[x as usize * n + y as usize];
            *c = (*c as i8 + delta) as u8;
        }
    }

    fn pairs(kind: BlockKind, b: &[Point; 4]) -> Vec<(Point, Point)> {
        match kind {
            BlockKind::Cycle4 => vec![(b[0], b[1]), (b[1], b[2]), (b[2], b[3]), (b[3], b[0])],
            BlockKind::Star3 => vec![(b[0], b[1]), (b[0], b[2]), (b[0], b[3])],
            BlockKind::Complete4 => vec![(b[0], b[1]), (b[0], b[2]), (b[0], b[3]), (b[1], b[2]), (b[1], b[3]), (b[2], b[3])],
            BlockKind::Pair => vec![(b[0], b[1])],
        }
    }

    /// Blocks of `kind` through `p` on uncovered points above `p`.
    fn candidates(&self, kind: BlockKind, p: Point, covered: u64) -> Vec<[Point; 4]> {
        let free: Vec<Point> = (p + 1..self.n as Point).filter(|&x| covered >> x & 1 == 0).collect();
        let mut out = Vec::new();
        match kind {
            BlockKind::Cycle4 => {
                for (i, &a) in free.iter().enumerate() {
                    if self.cap(p, a) == 0 {
                        continue;
                    }
                    for &c in &free[i + 1..] {
                        if self.cap(p, c) == 0 {
                            continue;
                        }
                        for &b in &free {
                            if b != a && b != c && self.cap(a, b) > 0 && self.cap(b, c) > 0 {
                                out.push([p, a, b, c]);
                            }
                        }
                    }
                }
            }
            BlockKind::Star3 => {
                let near: Vec<Point> = free.iter().copied().filter(|&x| self.cap(p, x) > 0).collect();
                for (i, &a) in near.iter().enumerate() {
                    for (j, &b) in near.iter().enumerate().skip(i + 1) {
                        for &c in &near[j + 1..] {
                            out.push([p, a, b, c]);
                        }
                    }
                }
                for &q in &near {
                    let leaves: Vec<Point> = free.iter().copied().filter(|&x| x != q && self.cap(q, x) > 0).collect();
                    for (i, &a) in leaves.iter().enumerate() {
                        for &b in &leaves[i + 1..] {
                            out.push([q, p, a, b]);
                        }
                    }
                }
            }
            BlockKind::Complete4 => {
                let near: Vec<Point> = free.iter().copied().filter(|&x| self.cap(p, x) > 0).collect();
                for (i, &a) in near.iter().enumerate() {
                    for (j, &b) in near.iter().enumerate().skip(i + 1) {
                        if self.cap(a, b) == 0 {
                            continue;
                        }
                        for &c in &near[j + 1..] {
                            if self.cap(a, c) > 0 && self.cap(b, c) > 0 {
                                out.push([p, a, b, c]);
                            }
                        }
                    }
                }
            }
            BlockKind::Pair => {}
        }
        out
    }

    fn degrees_feasible(&self, from: usize) -> bool {
        let rest = &self.kinds[from..];
        let kc = rest.iter().filter(|&&k| k == BlockKind::Cycle4).count() as i64;
        let ks = rest.iter().filter(|&&k| k == BlockKind::Star3).count() as i64;
        let kk = rest.iter().filter(|&&k| k == BlockKind::Complete4).count() as i64;
        (0..self.n).all(|p| {
            let d: i64 = self.cap[p * self.n..(p + 1) * self.n].iter().map(|&c| c as i64).sum();
            let star = d - 2 * kc - 3 * kk;
            star >= ks && star <= 3 * ks && (star - ks) % 2 == 0
        })
    }

    fn class(&mut self, k: usize) -> Step {
        if k == self.kinds.len() {
            return Step::Done;
        }
        if self.opts.prune && !self.degrees_feasible(k) {
            return Step::Dead;
        }
        self.classes.push(Vec::new());
        let step = self.place(k, 0);
        if !matches!(step, Step::Done) {
            self.classes.pop();
        }
        step
    }

    fn place(&mut self, k: usize, covered: u64) -> Step {
        let full = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        if covered == full {
            return self.class(k + 1);
        }
        let p = covered.trailing_ones();
        let kind = self.kinds[k];
        let mut cands = self.candidates(kind, p, covered);
        if let Some(rng) = self.rng.as_mut() {
            cands.shuffle(rng);
        }
        // Interchangeable classes: the block through point 0 must not
        // precede that of the previous class of the same kind.
        let floor = if self.opts.prune && p == 0 {
            self.kinds[..k].iter().rposition(|&x| x == kind).map(|j| self.first[j])
        } else {
            None
        };
        for b in cands {
            if let Some(f) = floor {
                if b < f {
                    continue;
                }
            }
            if !self.clock.tick() {
                return Step::Stop;
            }
            for (x, y) in Self::pairs(kind, &b) {
                self.bump(x, y, -1);
            }
            if p == 0 {
                if self.first.len() <= k {
                    self.first.push(b);
                } else {
                    self.first[k] = b;
                }
            }
            self.classes[k].push(b);
            let mask = b.iter().fold(covered, |m, &x| m | 1 << x);
            match self.place(k, mask) {
                Step::Done => return Step::Done,
                Step::Stop => return Step::Stop,
                Step::Dead => {}
            }
            self.classes[k].pop();
            for (x, y) in Self::pairs(kind, &b) {
                self.bump(x, y, 1);
            }
        }
        if p == 0 {
            self.first.truncate(k);
        }
        Step::Dead
    }
}

/// Searches for full classes of the given kinds, in order, decomposing
/// `target` exactly.
pub fn plain_search(
    target: &TargetGraph,
    kinds: &[BlockKind],
    budget: Budget,
    opts: PlainOptions,
) -> Result<Vec<BlockClass>, SearchError> {
    let n = target.point_count();
    if n > POINT_CAP {
        return Err(SearchError::TooLarge { points: n, cap: POINT_CAP });
    }
    if n % 4 != 0 {
        return Err(SearchError::Impossible(format!("{n} points cannot be split into blocks of 4")));
    }
    if let Some(k) = kinds.iter().find(|k| k.arity() != 4) {
        return Err(SearchError::Impossible(format!("{k} blocks are not searched")));
    }
    let per_class = |k: &BlockKind| k.edge_count() as u64 * n as u64 / 4;
    let need = target.edge_multiset().total();
    let have: u64 = kinds.iter().map(per_class).sum();
    if need != have {
        return Err(SearchError::Impossible(format!(
            "classes would cover {have} edges but the target has {need}"
        )));
    }
    let mut cap = vec![0u8; (n * n) as usize];
    for (e, c) in target.edge_multiset().iter() {
        cap[(e.lo() * n + e.hi()) as usize] = c as u8;
        cap[(e.hi() * n + e.lo()) as usize] = c as u8;
    }
    let mut s = Plain {
        n: n as usize,
        cap,
        kinds,
        opts,
        rng: opts.seed.map(rand::rngs::StdRng::seed_from_u64),
        clock: Clock::new(budget),
        classes: Vec::new(),
        first: Vec::new(),
    };
    match s.class(0) {
        Step::Done => Ok(s
            .classes
            .iter()
            .zip(kinds)
            .map(|(blocks, &kind)| {
                BlockClass::full(
                    kind,
                    blocks
                        .iter()
                        .map(|b| Block::new(kind, b.to_vec()).expect("search blocks are well-formed"))
                        .collect(),
                )
            })
            .collect()),
        Step::Dead => Err(SearchError::Exhausted { nodes: s.clock.nodes }),
        Step::Stop => Err(SearchError::OutOfBudget { nodes: s.clock.nodes }),
    }
}

fn checked(c: Certificate) -> Certificate {
    let report = verify(&c);
    assert!(report.passed(), "search produced an invalid design: {report}");
    c
}

/// A 4-RGDD of type `g^u` and index `lambda`.
pub fn find_resolvable_gdd(
    g: u32,
    u: u32,
    lambda: u32,
    budget: Budget,
    strategy: GddStrategy,
) -> Result<Certificate, SearchError> {
    if u < 4 {
        return Err(SearchError::Impossible(format!("a block of 4 needs 4 groups, type {g}^{u} has {u}")));
    }
    if (lambda * g * (u - 1)) % 3 != 0 || (g * u) % 4 != 0 {
        return Err(SearchError::Impossible(format!("type {g}^{u} fails the divisibility conditions")));
    }
    let n = g * u;
    if n > POINT_CAP {
        return Err(SearchError::TooLarge { points: n, cap: POINT_CAP });
    }
    let t = (lambda * g * (u - 1) / 3) as usize;
    let strategy = match strategy {
        GddStrategy::Auto if lambda == 1 && u == 4 => GddStrategy::DifferenceMatrix,
        GddStrategy::Auto if lambda == 1 && g == 4 => GddStrategy::OneRotational,
        GddStrategy::Auto => GddStrategy::Plain { seed: 0 },
        s => s,
    };
    let target = TargetGraph::uniform_multipartite(g, u, lambda);
    let (classes, how) = match strategy {
        GddStrategy::DifferenceMatrix => {
            if u != 4 || lambda != 1 {
                return Err(SearchError::Impossible("difference matrices give index 1, type g^4 only".into()));
            }
            let group = AbelianGroup::for_order(g);
            let m = find_difference_matrix(&group, 4, budget)?;
            (
                rgdd_from_difference_matrix(&group, &m),
                format!("difference matrix over Z_{:?}: {m:?}", group.moduli()),
            )
        }
        GddStrategy::RotateGroups | GddStrategy::OneRotational if g != 4 || lambda != 1 => {
            return Err(SearchError::Impossible("orbit strategies cover index 1, type 4^u only".into()));
        }
        GddStrategy::RotateGroups => {
            if !(2..u).all(|d| u % d != 0) {
                return Err(SearchError::Impossible(format!("rotating {u} groups needs a prime count")));
            }
            (orbit_search(&OrbitSpec::rotate_groups(u), budget)?, "orbit search, Z_u on the groups".to_string())
        }
        GddStrategy::OneRotational => {
            let m = (4 * u - 1) / 3;
            let (design, alpha) = one_rotational_design(m, budget)?;
            (
                groups_from_class(&design),
                format!("1-rotational resolvable design on Z_{m} x 3 + 1 with multiplier {alpha}, first class as groups"),
            )
        }
        GddStrategy::Plain { seed } => {
            let kinds = vec![BlockKind::Complete4; t];
            let opts = PlainOptions { prune: true, seed: (seed != 0).then_some(seed) };
            (plain_search(&target, &kinds, budget, opts)?, format!("class-by-class search, seed {seed}"))
        }
        GddStrategy::Auto => unreachable!(),
    };
    assert_eq!(classes.len(), t, "a 4-RGDD of type {g}^{u} has {t} classes");
    Ok(checked(Certificate::new(
        target,
        classes,
        vec![format!("4-RGDD of type {g}^{u}, index {lambda}: {how}")],
    )))
}

/// A resolvable decomposition of `target` whose `i`-th class has kind
/// `kinds[i]`.
pub fn find_uniform_factorization(
    target: &TargetGraph,
    kinds: &[BlockKind],
    budget: Budget,
    seed: Option<u64>,
) -> Result<Certificate, SearchError> {
    if let TargetShape::CompleteMinusHole { .. } = target.shape {
        return Err(SearchError::Impossible("holed targets need partial classes".into()));
    }
    let classes = plain_search(target, kinds, budget, PlainOptions { prune: true, seed })?;
    Ok(checked(Certificate::new(
        target.clone(),
        classes,
        vec![format!("class-by-class search, seed {}", seed.unwrap_or(0))],
    )))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_tables() {
        let g = AbelianGroup::for_order(12);
        assert_eq!(g.moduli(), &[2, 6]);
        assert_eq!(AbelianGroup::for_order(8).moduli(), &[2, 2, 2]);
        assert_eq!(AbelianGroup::for_order(6).moduli(), &[6]);
        for a in 0..12 {
            for b in 0..12 {
                assert_eq!(g.add(g.sub(a, b), b), a);
            }
        }
    }

    #[test]
    fn difference_matrices() {
        for n in [4, 8, 12] {
            let g = AbelianGroup::for_order(n);
            let m = find_difference_matrix(&g, 4, Budget::default()).unwrap();
            for i in 0..4 {
                for j in 0..i {
                    let mut d: Vec<u32> = (0..n as usize).map(|c| g.sub(m[i][c], m[j][c])).collect();
                    d.sort();
                    assert_eq!(d, (0..n).collect::<Vec<_>>());
                }
            }
        }
        // cyclic groups of even order have no complete mapping
        let z4 = AbelianGroup::new(vec![4]);
        assert!(matches!(find_difference_matrix(&z4, 3, Budget::default()), Err(SearchError::Exhausted { .. })));
    }

    #[test]
    fn small_gdd_searches() {
        let c = find_resolvable_gdd(4, 4, 1, Budget::default(), GddStrategy::Plain { seed: 0 }).unwrap();
        assert_eq!(c.classes.len(), 4);
        let c = find_resolvable_gdd(4, 4, 1, Budget::default(), GddStrategy::Auto).unwrap();
        assert_eq!(c.classes.len(), 4);
        assert!(matches!(
            find_resolvable_gdd(4, 3, 1, Budget::default(), GddStrategy::Auto),
            Err(SearchError::Impossible(_))
        ));
    }

    #[test]
    fn orbit_strategies() {
        let c = find_resolvable_gdd(4, 7, 1, Budget::default(), GddStrategy::RotateGroups).unwrap();
        assert_eq!(c.classes.len(), 8);
        let c = find_resolvable_gdd(4, 7, 1, Budget::default(), GddStrategy::OneRotational).unwrap();
        assert_eq!(c.classes.len(), 8);
        let (design, _) = one_rotational_design(5, Budget::default()).unwrap();
        let full = Certificate::new(TargetGraph::complete(16, 1), design, vec![]);
        assert!(verify(&full).passed(), "{}", verify(&full));
        assert!(matches!(
            find_resolvable_gdd(4, 10, 1, Budget::default(), GddStrategy::RotateGroups),
            Err(SearchError::Impossible(_))
        ));
        assert!(matches!(
            find_resolvable_gdd(4, 13, 1, Budget::default(), GddStrategy::Auto),
            Err(SearchError::TooLarge { points: 52, cap: 48 })
        ));
    }

    #[test]
    fn uniform_factorizations() {
        let t = TargetGraph::uniform_multipartite(4, 3, 1);
        let c = find_uniform_factorization(&t, &[BlockKind::Cycle4; 4], Budget::default(), None).unwrap();
        assert!(verify(&c).passed());
        let t = TargetGraph::uniform_multipartite(4, 2, 2);
        let c = find_uniform_factorization(&t, &[BlockKind::Cycle4; 4], Budget::default(), None).unwrap();
        assert_eq!(c.claimed.r, 4);
        let t = TargetGraph::complete(4, 2);
        let kinds = [BlockKind::Cycle4, BlockKind::Cycle4];
        assert!(matches!(
            find_uniform_factorization(&t, &kinds, Budget::default(), None),
            Err(SearchError::Impossible(_))
        ));
    }

    #[test]
    fn pruning_does_not_change_outcomes() {
        let cases: Vec<(TargetGraph, Vec<BlockKind>)> = vec![
            (TargetGraph::complete(4, 2), vec![BlockKind::Cycle4; 3]),
            (TargetGraph::complete(4, 2), vec![BlockKind::Star3; 4]),
            (TargetGraph::complete(8, 2), vec![BlockKind::Cycle4, BlockKind::Star3, BlockKind::Star3, BlockKind::Star3, BlockKind::Star3, BlockKind::Star3, BlockKind::Star3, BlockKind::Star3, BlockKind::Star3]),
            (TargetGraph::uniform_multipartite(2, 2, 2), vec![BlockKind::Cycle4; 2]),
            (TargetGraph::uniform_multipartite(2, 2, 2), vec![BlockKind::Star3; 2]),
        ];
        for (t, kinds) in cases {
            let with = plain_search(&t, &kinds, Budget::default(), PlainOptions { prune: true, seed: None });
            let without = plain_search(&t, &kinds, Budget::default(), PlainOptions { prune: false, seed: None });
            assert_eq!(with.is_ok(), without.is_ok(), "{t:?} {kinds:?}");
        }
    }

    #[test]
    fn seeded_search_is_deterministic() {
        let t = TargetGraph::uniform_multipartite(4, 3, 1);
        let kinds = [BlockKind::Cycle4; 4];
        let a = find_uniform_factorization(&t, &kinds, Budget::default(), Some(5)).unwrap();
        let b = find_uniform_factorization(&t, &kinds, Budget::default(), Some(5)).unwrap();
        assert_eq!(a, b);
    }
}
