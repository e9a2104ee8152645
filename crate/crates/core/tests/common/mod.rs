//! A second, deliberately naive checker used as a test oracle. It shares no
//! code with the library verifier: edges are counted in a hash map straight
//! from the block point lists.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use urd_core::model::{BlockKind, Certificate, TargetShape};

fn pairs_of(kind: BlockKind, p: &[u32]) -> Option<Vec<(u32, u32)>> {
    let raw: Vec<(u32, u32)> = match (kind, p.len()) {
        (BlockKind::Cycle4, 4) => vec![(p[0], p[1]), (p[1], p[2]), (p[2], p[3]), (p[3], p[0])],
        (BlockKind::Star3, 4) => vec![(p[0], p[1]), (p[0], p[2]), (p[0], p[3])],
        (BlockKind::Complete4, 4) => {
            let mut v = Vec::new();
            for i in 0..4 {
                for j in i + 1..4 {
                    v.push((p[i], p[j]));
                }
            }
            v
        }
        (BlockKind::Pair, 2) => vec![(p[0], p[1])],
        _ => return None,
    };
    let distinct: BTreeSet<u32> = p.iter().copied().collect();
    if distinct.len() != p.len() {
        return None;
    }
    Some(raw.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect())
}

/// Whether the certificate is a valid resolvable decomposition of its
/// target, with truthful claimed counts.
pub fn oracle_accepts(c: &Certificate) -> bool {
    let lambda = c.target.lambda;
    if lambda != 1 && lambda != 2 {
        return false;
    }
    let (n, allowed): (u32, Box<dyn Fn(u32, u32) -> bool>) = match &c.target.shape {
        TargetShape::Complete { v } => (*v, Box::new(|_, _| true)),
        TargetShape::CompleteMinusHole { v, hole } => {
            let h: BTreeSet<u32> = hole.iter().copied().collect();
            if h.len() != hole.len() || h.len() >= *v as usize || h.iter().any(|&p| p >= *v) {
                return false;
            }
            (*v, Box::new(move |a, b| !(h.contains(&a) && h.contains(&b))))
        }
        TargetShape::Multipartite { groups } => {
            let n: u32 = groups.iter().map(|g| g.len() as u32).sum();
            let mut part = HashMap::new();
            for (i, g) in groups.iter().enumerate() {
                if g.is_empty() {
                    return false;
                }
                for &p in g {
                    if p >= n || part.insert(p, i).is_some() {
                        return false;
                    }
                }
            }
            (n, Box::new(move |a, b| part[&a] != part[&b]))
        }
    };
    let all: BTreeSet<u32> = (0..n).collect();
    let mut count: HashMap<(u32, u32), u32> = HashMap::new();
    let (mut r, mut s, mut pr, mut ps) = (0, 0, 0, 0);
    let mut missed_by: HashMap<Vec<u32>, usize> = HashMap::new();
    let mut partial_arity = BTreeSet::new();
    for class in &c.classes {
        let mut seen = BTreeSet::new();
        for b in &class.blocks {
            if b.kind != class.kind || b.points.iter().any(|&p| p >= n) {
                return false;
            }
            let Some(pairs) = pairs_of(b.kind, &b.points) else { return false };
            for q in pairs {
                *count.entry(q).or_insert(0) += 1;
            }
            for &p in &b.points {
                if !seen.insert(p) {
                    return false;
                }
            }
        }
        let missing: BTreeSet<u32> = class.coverage.missing().iter().copied().collect();
        let expected: BTreeSet<u32> = all.difference(&missing).copied().collect();
        if seen != expected || missing.iter().any(|&p| p >= n) {
            return false;
        }
        let full = class.coverage.is_full();
        if !full {
            *missed_by.entry(missing.iter().copied().collect()).or_insert(0) += 1;
            partial_arity.insert(class.kind);
        }
        match (class.kind, full) {
            (BlockKind::Cycle4, true) => r += 1,
            (BlockKind::Star3, true) => s += 1,
            (BlockKind::Cycle4, false) => pr += 1,
            (BlockKind::Star3, false) => ps += 1,
            _ => {}
        }
    }
    for a in 0..n {
        for b in a + 1..n {
            let want = if allowed(a, b) { lambda } else { 0 };
            if count.remove(&(a, b)).unwrap_or(0) != want {
                return false;
            }
        }
    }
    if !count.is_empty() {
        return false;
    }
    let cl = &c.claimed;
    if (cl.r, cl.s, cl.partial_r, cl.partial_s) != (r, s, pr, ps) {
        return false;
    }
    let partials: usize = missed_by.values().sum();
    match &c.target.shape {
        TargetShape::Complete { .. } => partials == 0,
        TargetShape::CompleteMinusHole { hole, .. } => {
            let h: Vec<u32> = hole.iter().copied().collect::<BTreeSet<_>>().into_iter().collect();
            missed_by.keys().all(|m| *m == h)
        }
        TargetShape::Multipartite { groups } => {
            if partials == 0 {
                return true;
            }
            if partials != c.classes.len() || partial_arity.len() != 1 {
                return false;
            }
            let k = match partial_arity.iter().next().unwrap() {
                BlockKind::Pair => 1,
                BlockKind::Star3 | BlockKind::Cycle4 | BlockKind::Complete4 => 3,
            };
            let mut sorted: Vec<Vec<u32>> = groups
                .iter()
                .map(|g| g.iter().copied().collect::<BTreeSet<_>>().into_iter().collect())
                .collect();
            sorted.sort();
            missed_by.keys().all(|m| sorted.contains(m))
                && sorted.iter().all(|g| g.len() % k == 0 && missed_by.get(g).copied().unwrap_or(0) == g.len() / k)
        }
    }
}

/// `|I(v)|` from the closed forms: `x` runs from 0 to `(v-3)/3`,
/// `(v-1)/3`, `(v-2)/3` for `v ≡ 0, 4, 8 (mod 12)`.
pub fn spectrum_size(v: u32) -> usize {
    if v % 4 != 0 || v == 0 {
        return 0;
    }
    let top = match v % 12 {
        0 => (v - 3) / 3,
        4 => (v - 1) / 3,
        _ => (v - 2) / 3,
    };
    top as usize + 1
}

/// Membership in `I(v)` from the definition.
pub fn in_spectrum(v: u32, r: u32, s: u32) -> bool {
    if v % 4 != 0 || v == 0 || s % 4 != 0 {
        return false;
    }
    let x = s / 4;
    x < spectrum_size(v) as u32 && r + 3 * x == v - 1
}
