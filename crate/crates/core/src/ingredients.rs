//! Auxiliary designs used by the recursive constructions: 4-RGDDs,
//! uniformly resolvable GDDs into cycles and stars, and near-one-
//! factorizations. Each is addressed by an [`IngredientKey`] and obtained
//! from a direct construction, a certificate store, or a search.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::catalog::{self, Designator};
use crate::format;
use crate::model::{Block, BlockClass, BlockKind, Certificate, Point, TargetGraph};
use crate::search::{self, Budget, GddStrategy, SearchError};
use crate::spectrum::ClassPair;
use crate::verifier::verify;

/// Environment variable naming the ingredient store directory.
pub const STORE_ENV: &str = "URD_STORE";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    /// 4-RGDD: resolvable, blocks `K4`, index 1.
    Rgdd4,
    /// Uniformly resolvable GDD into 4-cycle and 3-star classes.
    Urgdd,
    /// Frame with blocks of size 2 and groups of size 1, i.e. a near-one-
    /// factorization.
    Frame2,
}

impl Family {
    fn tag(self) -> &'static str {
        match self {
            Family::Rgdd4 => "rgdd4",
            Family::Urgdd => "urgdd",
            Family::Frame2 => "frame2",
        }
    }
}

/// Identifies an ingredient: family, type `g^u`, index, and for URGDDs the
/// class profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct IngredientKey {
    pub family: Family,
    pub g: u32,
    pub u: u32,
    pub lambda: u32,
    pub profile: ClassPair,
}

impl IngredientKey {
    pub fn urgdd(g: u32, u: u32, lambda: u32, profile: ClassPair) -> IngredientKey {
        IngredientKey { family: Family::Urgdd, g, u, lambda, profile }
    }

    pub fn rgdd4(g: u32, u: u32) -> IngredientKey {
        IngredientKey { family: Family::Rgdd4, g, u, lambda: 1, profile: ClassPair::new(0, 0) }
    }

    pub fn frame2(n: u32) -> IngredientKey {
        IngredientKey { family: Family::Frame2, g: 1, u: n, lambda: 1, profile: ClassPair::new(0, 0) }
    }

    pub fn target(&self) -> TargetGraph {
        TargetGraph::uniform_multipartite(self.g, self.u, self.lambda)
    }

    pub fn point_count(&self) -> u32 {
        self.g * self.u
    }

    /// Whether `c` is a design of this kind: target, block kinds, class
    /// counts. Does not run the verifier.
    pub fn matches(&self, c: &Certificate) -> bool {
        if c.target != self.target() {
            return false;
        }
        match self.family {
            Family::Rgdd4 => {
                let t = self.lambda * self.g * (self.u - 1);
                t % 3 == 0
                    && c.classes.len() == (t / 3) as usize
                    && c.classes.iter().all(|k| k.kind == BlockKind::Complete4 && k.coverage.is_full())
            }
            Family::Urgdd => {
                c.classes.iter().all(|k| k.coverage.is_full())
                    && c.classes.iter().all(|k| matches!(k.kind, BlockKind::Cycle4 | BlockKind::Star3))
                    && c.profile() == self.profile
            }
            Family::Frame2 => c.classes.iter().all(|k| k.kind == BlockKind::Pair && !k.coverage.is_full()),
        }
    }
}

impl fmt::Display for IngredientKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}_{}^{}_l{}", self.family.tag(), self.g, self.u, self.lambda)?;
        if self.family == Family::Urgdd {
            write!(f, "_r{}s{}", self.profile.r, self.profile.s)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq, Eq)]
#[error("bad ingredient signature {0:?}")]
pub struct BadSignature(pub String);

impl FromStr for IngredientKey {
    type Err = BadSignature;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || BadSignature(s.to_string());
        let parts: Vec<&str> = s.split('_').collect();
        let family = match parts.first() {
            Some(&"rgdd4") => Family::Rgdd4,
            Some(&"urgdd") => Family::Urgdd,
            Some(&"frame2") => Family::Frame2,
            _ => return Err(bad()),
        };
        let want = if family == Family::Urgdd { 4 } else { 3 };
        if parts.len() != want {
            return Err(bad());
        }
        let (g, u) = parts[1].split_once('^').ok_or_else(bad)?;
        let g: u32 = g.parse().map_err(|_| bad())?;
        let u: u32 = u.parse().map_err(|_| bad())?;
        let lambda: u32 = parts[2].strip_prefix('l').ok_or_else(bad)?.parse().map_err(|_| bad())?;
        let profile = if family == Family::Urgdd {
            let (r, s) = parts[3].strip_prefix('r').and_then(|x| x.split_once('s')).ok_or_else(bad)?;
            ClassPair::new(r.parse().map_err(|_| bad())?, s.parse().map_err(|_| bad())?)
        } else {
            ClassPair::new(0, 0)
        };
        if g == 0 || u == 0 || !(1..=2).contains(&lambda) {
            return Err(bad());
        }
        Ok(IngredientKey { family, g, u, lambda, profile })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngredientError {
    #[error("ingredient {key} not available: {reason}")]
    NotAvailable { key: IngredientKey, reason: String },
    #[error("stored ingredient {key} is invalid: {detail}")]
    Invalid { key: String, detail: String },
    #[error("ingredient store: {0}")]
    Store(#[from] std::io::Error),
    #[error("ingredient file: {0}")]
    Load(#[from] format::LoadError),
}

/// Near-one-factorization of `K_n`, `n` odd: class `i` misses `i` and
/// consists of the pairs `{i+k, i-k}`.
pub fn near_one_factorization(n: u32) -> Certificate {
    assert!(n % 2 == 1, "near-one-factorizations need an odd order");
    let classes = (0..n)
        .map(|i| {
            let blocks = (1..=n / 2).map(|k| Block::pair((i + k) % n, (i + n - k) % n)).collect();
            BlockClass::partial(BlockKind::Pair, blocks, vec![i])
        })
        .collect();
    Certificate::new(
        IngredientKey::frame2(n).target(),
        classes,
        vec![format!("near-one-factorization of K_{n}: class i = {{i+k, i-k}}")],
    )
}

/// `lambda K_{n,n}` into 4-cycle classes, `n` even. Group A is `0..n`, group
/// B is `n..2n`; class `a < n/2` holds the cycles
/// `(A_x, B_{x+a}, A_{x+n/2}, B_{x+a+n/2})`, repeated `lambda` times.
pub fn c4_factorization_bipartite(n: u32, lambda: u32) -> Certificate {
    assert!(n % 2 == 0 && n > 0);
    let h = n / 2;
    let b = |i: u32| n + i % n;
    let one: Vec<BlockClass> = (0..h)
        .map(|a| {
            let blocks = (0..h).map(|x| Block::cycle([x, b(x + a), x + h, b(x + a + h)])).collect();
            BlockClass::full(BlockKind::Cycle4, blocks)
        })
        .collect();
    let classes = (0..lambda).flat_map(|_| one.iter().cloned()).collect();
    Certificate::new(
        TargetGraph::uniform_multipartite(n, 2, lambda),
        classes,
        vec![format!("4-cycle factorization of {lambda}K_{{{n},{n}}} by rotation")],
    )
}

/// `K_{4,4,4}` into four 4-cycle classes, found by a small search.
fn c4_factorization_444() -> Result<Certificate, SearchError> {
    let t = TargetGraph::uniform_multipartite(4, 3, 1);
    search::find_uniform_factorization(&t, &[BlockKind::Cycle4; 4], Budget::nodes(1_000_000), None)
}

/// `K_{12,12,12}` into twelve 4-cycle classes. Each point of a `K_{4,4,4}`
/// factorization becomes three points; a cycle `(a,b,c,d)` becomes
/// `K_{6,6}` on `{a,c} x 3` and `{b,d} x 3`, which splits into three cycle
/// classes. Class `j` of every blown-up cycle in a class are merged.
pub fn c4_factorization_12_cubed() -> Result<Certificate, SearchError> {
    let base = c4_factorization_444()?;
    let k66 = c4_factorization_bipartite(6, 1);
    let mut classes = Vec::new();
    for class in &base.classes {
        for j in 0..3 {
            let mut blocks = Vec::new();
            for cyc in &class.blocks {
                let p = &cyc.points;
                let side = [p[0], p[2], p[1], p[3]];
                // K_{6,6} point i < 6 is copy i%3 of side[i/3], and 6 + i is
                // copy i%3 of side[2 + i/3]
                let map = |q: Point| {
                    let (s, i) = (q / 6, q % 6);
                    3 * side[(2 * s + i / 3) as usize] + i % 3
                };
                blocks.extend(k66.classes[j].blocks.iter().map(|b| b.relabel(map)));
            }
            classes.push(BlockClass::full(BlockKind::Cycle4, blocks));
        }
    }
    Ok(Certificate::new(
        TargetGraph::uniform_multipartite(12, 3, 1),
        classes,
        vec!["4-cycle factorization of K_{12,12,12}: K_{4,4,4} factorization with points tripled".into()],
    ))
}

/// `K_{12,12,12}` into sixteen 3-star classes. Point `12g + 3t + p` is copy
/// `p` of element `t` of GF(4) in group `g`. Class `(k, a)` puts the stars
/// with centre copies of `a`, `2a + k`, `3a + k` (groups 0, 1, 2) onto the
/// next group, copy `p` of the centre reaching the three copies of
/// `centre + (p+1)` there.
pub fn star_factorization_12_cubed() -> Certificate {
    const MUL: [[u32; 4]; 4] = [[0, 0, 0, 0], [0, 1, 2, 3], [0, 2, 3, 1], [0, 3, 1, 2]];
    let pt = |g: u32, t: u32, p: u32| 12 * g + 3 * t + p;
    let mut classes = Vec::new();
    for k in 0..4 {
        for a in 0..4u32 {
            let b = MUL[2][a as usize] ^ k;
            let c = MUL[3][a as usize] ^ k;
            let centre = [a, b, c];
            let mut blocks = Vec::new();
            for g in 0..3u32 {
                let next = (g + 1) % 3;
                let shifted = centre[next as usize];
                for p in 0..3 {
                    let t = shifted ^ (p + 1);
                    blocks.push(Block::star(
                        pt(g, centre[g as usize], p),
                        [pt(next, t, 0), pt(next, t, 1), pt(next, t, 2)],
                    ));
                }
            }
            classes.push(BlockClass::full(BlockKind::Star3, blocks));
        }
    }
    Certificate::new(
        TargetGraph::uniform_multipartite(12, 3, 1),
        classes,
        vec!["3-star factorization of K_{12,12,12} over GF(4)".into()],
    )
}

/// Union of two designs on the same underlying graph, indices added.
pub fn stack(a: &Certificate, b: &Certificate) -> Certificate {
    assert_eq!(a.target.shape, b.target.shape);
    let mut classes = a.classes.clone();
    classes.extend(b.classes.iter().cloned());
    classes.sort_by_key(|c| c.kind);
    let mut provenance = a.provenance.clone();
    provenance.extend(b.provenance.iter().cloned());
    Certificate::new(TargetGraph { shape: a.target.shape.clone(), lambda: a.target.lambda + b.target.lambda }, classes, provenance)
}

/// Direct constructions; `Ok(None)` when there is none for this key.
fn generate(key: &IngredientKey) -> Result<Option<Certificate>, SearchError> {
    let IngredientKey { family, g, u, lambda, profile } = *key;
    let cp = ClassPair::new;
    Ok(match family {
        Family::Frame2 if g == 1 && u % 2 == 1 && lambda == 1 => Some(near_one_factorization(u)),
        Family::Urgdd if u == 2 && g % 2 == 0 && profile == cp(lambda * g / 2, 0) => {
            Some(c4_factorization_bipartite(g, lambda))
        }
        Family::Urgdd if g == 12 && u == 2 && lambda == 2 => {
            catalog::explicit(&Designator::Urgdd12Squared { profile })
        }
        Family::Urgdd if g == 4 && u == 3 && profile == cp(4 * lambda, 0) => {
            let one = c4_factorization_444()?;
            Some(if lambda == 1 { one } else { stack(&one, &one) })
        }
        Family::Urgdd if g == 12 && u == 3 => {
            let parts: &[bool] = match (lambda, profile.r, profile.s) {
                (1, 12, 0) => &[true],
                (1, 0, 16) => &[false],
                (2, 24, 0) => &[true, true],
                (2, 12, 16) => &[true, false],
                (2, 0, 32) => &[false, false],
                _ => return Ok(None),
            };
            let mut out: Option<Certificate> = None;
            for &cycles in parts {
                let piece = if cycles { c4_factorization_12_cubed()? } else { star_factorization_12_cubed() };
                out = Some(match out {
                    None => piece,
                    Some(prev) => stack(&prev, &piece),
                });
            }
            out
        }
        _ => None,
    })
}

fn search_for(key: &IngredientKey, budget: Budget) -> Result<Certificate, SearchError> {
    match key.family {
        Family::Rgdd4 => search::find_resolvable_gdd(key.g, key.u, 1, budget, GddStrategy::Auto),
        Family::Urgdd => {
            let mut kinds = vec![BlockKind::Cycle4; key.profile.r as usize];
            kinds.extend(std::iter::repeat(BlockKind::Star3).take(key.profile.s as usize));
            search::find_uniform_factorization(&key.target(), &kinds, budget, None)
        }
        Family::Frame2 => Err(SearchError::Impossible("near-one-factorizations exist only for odd orders".into())),
    }
}

/// A directory of ingredient certificates, one file per key named
/// `<signature>.json`.
#[derive(Debug, Clone)]
pub struct IngredientStore {
    dir: PathBuf,
}

impl IngredientStore {
    pub fn open(dir: impl Into<PathBuf>) -> std::io::Result<IngredientStore> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(IngredientStore { dir })
    }

    /// The store named by `URD_STORE`, if set.
    pub fn from_env() -> std::io::Result<Option<IngredientStore>> {
        match std::env::var_os(STORE_ENV) {
            Some(d) if !d.is_empty() => IngredientStore::open(PathBuf::from(d)).map(Some),
            _ => Ok(None),
        }
    }

    pub fn dir(&self) -> &Path {
        &self.dir
    }

    pub fn path_for(&self, key: &IngredientKey) -> PathBuf {
        self.dir.join(format!("{key}.json"))
    }

    pub fn get(&self, key: &IngredientKey) -> Result<Option<Certificate>, IngredientError> {
        let path = self.path_for(key);
        if !path.exists() {
            return Ok(None);
        }
        Ok(Some(format::load(&path)?))
    }

    /// Writes atomically: a temporary file in the store, then a rename.
    pub fn put(&self, key: &IngredientKey, c: &Certificate) -> Result<PathBuf, IngredientError> {
        let path = self.path_for(key);
        let tmp = self.dir.join(format!(".{key}.json.tmp{}", std::process::id()));
        format::save(&tmp, c)?;
        fs::rename(&tmp, &path)?;
        Ok(path)
    }

    /// Keys present with their content hashes, sorted by key.
    pub fn list(&self) -> Result<Vec<(IngredientKey, String)>, IngredientError> {
        let mut out = Vec::new();
        for entry in fs::read_dir(&self.dir)? {
            let path = entry?.path();
            let Some(stem) = path.file_name().and_then(|n| n.to_str()).and_then(|n| n.strip_suffix(".json")) else {
                continue;
            };
            let Ok(key) = stem.parse::<IngredientKey>() else { continue };
            let c = format::load(&path)?;
            out.push((key, format::content_hash(&c)));
        }
        out.sort();
        Ok(out)
    }

    /// Verifies `c`, checks it against `key` and stores it.
    pub fn import(&self, key: &IngredientKey, c: &Certificate) -> Result<PathBuf, IngredientError> {
        check_ingredient(key, c)?;
        self.put(key, c)
    }
}

/// Key inferred from a certificate's target and classes.
pub fn infer_key(c: &Certificate) -> Option<IngredientKey> {
    let crate::model::TargetShape::Multipartite { groups } = &c.target.shape else {
        return None;
    };
    let g = groups.first()?.len() as u32;
    let u = groups.len() as u32;
    let kind = c.classes.first()?.kind;
    let key = match kind {
        BlockKind::Complete4 => IngredientKey { lambda: c.target.lambda, ..IngredientKey::rgdd4(g, u) },
        BlockKind::Pair => IngredientKey::frame2(u),
        _ => IngredientKey::urgdd(g, u, c.target.lambda, c.profile()),
    };
    key.matches(c).then_some(key)
}

fn check_ingredient(key: &IngredientKey, c: &Certificate) -> Result<(), IngredientError> {
    let report = verify(c);
    if !report.passed() {
        return Err(IngredientError::Invalid { key: key.to_string(), detail: report.to_string() });
    }
    if !key.matches(c) {
        return Err(IngredientError::Invalid {
            key: key.to_string(),
            detail: format!("certificate has profile {} and does not have the shape of {key}", c.profile()),
        });
    }
    Ok(())
}

/// Supplies ingredients: cached, then direct constructions, then the store,
/// then search. Every certificate handed out has been verified against its
/// key.
pub struct Provider {
    store: Option<IngredientStore>,
    cache: HashMap<IngredientKey, Certificate>,
    pub search: bool,
    pub budget: Budget,
}

impl Default for Provider {
    fn default() -> Self {
        Provider::new()
    }
}

impl Provider {
    pub fn new() -> Provider {
        Provider { store: None, cache: HashMap::new(), search: true, budget: Budget::default() }
    }

    pub fn with_store(store: IngredientStore) -> Provider {
        Provider { store: Some(store), ..Provider::new() }
    }

    pub fn store(&self) -> Option<&IngredientStore> {
        self.store.as_ref()
    }

    /// Like [`Provider::provide`] without falling back to search.
    pub fn provide_stored(&mut self, key: &IngredientKey) -> Result<Certificate, IngredientError> {
        let search = std::mem::replace(&mut self.search, false);
        let out = self.provide(key);
        self.search = search;
        out
    }

    pub fn provide(&mut self, key: &IngredientKey) -> Result<Certificate, IngredientError> {
        if let Some(c) = self.cache.get(key) {
            return Ok(c.clone());
        }
        let not_available = |reason: String| IngredientError::NotAvailable { key: *key, reason };
        let mut reasons = Vec::new();
        let found = match generate(key) {
            Ok(Some(c)) => Some(c),
            Ok(None) => None,
            Err(e) => {
                reasons.push(format!("direct construction: {e}"));
                None
            }
        };
        let found = match found {
            Some(c) => Some(c),
            None => match &self.store {
                Some(store) => store.get(key)?,
                None => None,
            },
        };
        let found = match found {
            Some(c) => Some(c),
            None if self.search => {
                if key.point_count() > search::POINT_CAP {
                    reasons.push(format!("{} points exceeds the search cap of {}", key.point_count(), search::POINT_CAP));
                    None
                } else {
                    match search_for(key, self.budget) {
                        Ok(c) => Some(c),
                        Err(e) => {
                            reasons.push(format!("search: {e}"));
                            None
                        }
                    }
                }
            }
            None => {
                reasons.push("search disabled".into());
                None
            }
        };
        let Some(c) = found else {
            if self.store.is_none() {
                reasons.push(format!("no store configured (set {STORE_ENV})"));
            } else {
                reasons.push("not in the store".into());
            }
            return Err(not_available(reasons.join("; ")));
        };
        check_ingredient(key, &c)?;
        self.cache.insert(*key, c.clone());
        Ok(c)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cp(r: u32, s: u32) -> ClassPair {
        ClassPair::new(r, s)
    }

    #[test]
    fn signatures_round_trip() {
        for key in [
            IngredientKey::rgdd4(4, 7),
            IngredientKey::urgdd(12, 2, 2, cp(12, 0)),
            IngredientKey::frame2(5),
        ] {
            assert_eq!(key.to_string().parse::<IngredientKey>(), Ok(key));
        }
        assert_eq!(IngredientKey::rgdd4(4, 7).to_string(), "rgdd4_4^7_l1");
        assert_eq!(IngredientKey::urgdd(12, 2, 2, cp(12, 0)).to_string(), "urgdd_12^2_l2_r12s0");
        assert_eq!(IngredientKey::frame2(5).to_string(), "frame2_1^5_l1");
        for bad in ["", "rgdd4_4^7", "urgdd_12^2_l2", "foo_1^2_l1", "rgdd4_4x7_l1", "rgdd4_4^7_l3"] {
            assert!(bad.parse::<IngredientKey>().is_err(), "{bad}");
        }
    }

    #[test]
    fn direct_constructions_verify() {
        for n in [1, 3, 5, 7, 9] {
            let c = near_one_factorization(n);
            assert!(verify(&c).passed(), "{}", verify(&c));
        }
        for (n, l) in [(2, 1), (4, 2), (6, 1), (12, 2)] {
            let c = c4_factorization_bipartite(n, l);
            assert!(verify(&c).passed(), "{}", verify(&c));
            assert_eq!(c.profile(), cp(l * n / 2, 0));
        }
        let c = c4_factorization_12_cubed().unwrap();
        assert!(verify(&c).passed(), "{}", verify(&c));
        assert_eq!(c.profile(), cp(12, 0));
        let s = star_factorization_12_cubed();
        assert!(verify(&s).passed(), "{}", verify(&s));
        assert_eq!(s.profile(), cp(0, 16));
    }

    #[test]
    fn provider_covers_12_cubed_index_two() {
        let mut p = Provider::new();
        p.search = false;
        for profile in [cp(24, 0), cp(12, 16), cp(0, 32)] {
            let c = p.provide(&IngredientKey::urgdd(12, 3, 2, profile)).unwrap();
            assert_eq!(c.profile(), profile);
        }
        let err = p.provide(&IngredientKey::urgdd(12, 3, 2, cp(18, 8))).unwrap_err();
        assert!(matches!(err, IngredientError::NotAvailable { .. }), "{err}");
    }

    #[test]
    fn provider_searches_small_rgdds() {
        let mut p = Provider::new();
        for (g, u) in [(4, 4), (8, 4), (12, 4), (4, 7), (4, 10)] {
            let c = p.provide(&IngredientKey::rgdd4(g, u)).unwrap();
            assert_eq!(c.classes.len() as u32, g * (u - 1) / 3);
        }
        let err = p.provide(&IngredientKey::rgdd4(4, 13)).unwrap_err();
        assert!(err.to_string().contains("search cap"), "{err}");
    }

    #[test]
    fn store_round_trip_and_rejection() {
        let dir = tempfile::tempdir().unwrap();
        let store = IngredientStore::open(dir.path()).unwrap();
        let key = IngredientKey::frame2(5);
        let c = near_one_factorization(5);
        store.import(&key, &c).unwrap();
        let listed = store.list().unwrap();
        assert_eq!(listed, vec![(key, format::content_hash(&c))]);
        assert_eq!(store.get(&key).unwrap().unwrap(), c.canonical());
        assert_eq!(infer_key(&c), Some(key));

        let wrong = IngredientKey::frame2(7);
        assert!(matches!(store.import(&wrong, &c), Err(IngredientError::Invalid { .. })));
        let mut broken = c.clone();
        broken.classes.pop();
        broken.claimed = crate::model::Claimed::tally(&broken.classes);
        assert!(matches!(store.import(&key, &broken), Err(IngredientError::Invalid { .. })));

        let mut p = Provider::with_store(store);
        p.search = false;
        let k = IngredientKey::urgdd(4, 2, 1, cp(2, 0));
        assert!(p.provide(&k).is_ok());
    }
}
