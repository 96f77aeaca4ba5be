//! Wreath recursion: root permutations, sections, level permutations and the
//! word problem.
//!
//! Everything acts on the right. A word `uv` first applies `u`, then `v`, so
//! the section of `uv` at a vertex `x` is `u|_x v|_{x^u}`.

use std::collections::HashSet;
use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::words::{Family, Gen, GeneratorWord, GroupSpec};

/// Default cap on the number of level-n vertices a permutation may have.
pub const DEFAULT_LEAF_CAP: u64 = 1 << 24;

/// Default level reached by the word problem before giving up.
pub const DEFAULT_DEPTH_GUARD: usize = 64;

/// Level-n blocks at least this large are split across threads.
const PAR_BLOCK: usize = 1 << 14;

/// Root permutation and the `p` sections of a word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Section {
    /// `root[i]` is the image of the letter `i`.
    pub root: Vec<u32>,
    pub children: Vec<GeneratorWord>,
}

impl Section {
    pub fn root_is_trivial(&self) -> bool {
        self.root.iter().enumerate().all(|(i, &r)| r as usize == i)
    }
}

fn generator_section(group: GroupSpec, g: Gen, e: i32) -> (Vec<u32>, Vec<(usize, Gen, i64)>) {
    let p = group.arity();
    match (group.family(), g) {
        (_, Gen::A) => {
            let s = e.rem_euclid(p as i32) as usize;
            ((0..p).map(|i| ((i + s) % p) as u32).collect(), Vec::new())
        }
        (Family::Grigorchuk, Gen::B) => (vec![0, 1], vec![(0, Gen::A, 1), (1, Gen::C, 1)]),
        (Family::Grigorchuk, Gen::C) => (vec![0, 1], vec![(0, Gen::A, 1), (1, Gen::D, 1)]),
        (Family::Grigorchuk, Gen::D) => (vec![0, 1], vec![(1, Gen::B, 1)]),
        (Family::GuptaSidki, Gen::B) => {
            let e = e as i64;
            let mut secs = vec![(0, Gen::A, e), (1, Gen::A, -e)];
            secs.push((p - 1, Gen::B, e));
            ((0..p as u32).collect(), secs)
        }
        (Family::GuptaSidki, _) => unreachable!("validated alphabet"),
    }
}

/// Splits a word into its root permutation and sections.
pub fn decompose(w: &GeneratorWord) -> Section {
    let group = w.group();
    let p = group.arity();
    let mut root: Vec<u32> = (0..p as u32).collect();
    let mut children = vec![GeneratorWord::identity(group); p];
    for l in w.letters() {
        let (groot, gsecs) = generator_section(group, l.gen, l.exp);
        // the letter acts on the subtree below root[x], where the prefix sent x
        if !gsecs.is_empty() {
            let mut inv = vec![0usize; p];
            for (x, &r) in root.iter().enumerate() {
                inv[r as usize] = x;
            }
            for (y, sg, se) in gsecs {
                children[inv[y]].push_reduce(sg, se);
            }
        }
        for r in root.iter_mut() {
            *r = groot[*r as usize];
        }
    }
    Section { root, children }
}

/// Permutation of the `p^n` vertices of level `n`.
///
/// Vertex `w_1 ... w_n` has index `sum w_i p^(n-i)`; `perm[v]` is the image
/// of `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LevelPermutation {
    arity: u32,
    level: u32,
    perm: Vec<u32>,
}

impl LevelPermutation {
    pub fn identity(arity: u32, level: u32) -> Self {
        let size = (arity as usize).pow(level);
        LevelPermutation {
            arity,
            level,
            perm: (0..size as u32).collect(),
        }
    }

    /// Wraps an image table, checking that it is a bijection of the right size.
    pub fn from_images(arity: u32, level: u32, perm: Vec<u32>) -> Result<Self> {
        let size = (arity as usize).pow(level);
        if perm.len() != size {
            return Err(Error::InvalidRequest(format!(
                "level {level} permutation needs {size} entries, got {}",
                perm.len()
            )));
        }
        let mut seen = vec![false; size];
        for &v in &perm {
            let v = v as usize;
            if v >= size || seen[v] {
                return Err(Error::InvalidRequest("image table is not a bijection".into()));
            }
            seen[v] = true;
        }
        Ok(LevelPermutation { arity, level, perm })
    }

    pub fn arity(&self) -> u32 {
        self.arity
    }

    pub fn level(&self) -> u32 {
        self.level
    }

    pub fn images(&self) -> &[u32] {
        &self.perm
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn apply(&self, v: u32) -> u32 {
        self.perm[v as usize]
    }

    pub fn is_identity(&self) -> bool {
        self.perm.iter().enumerate().all(|(i, &v)| i as u32 == v)
    }

    /// `self` followed by `other`.
    pub fn compose(&self, other: &LevelPermutation) -> LevelPermutation {
        assert_eq!((self.arity, self.level), (other.arity, other.level));
        LevelPermutation {
            arity: self.arity,
            level: self.level,
            perm: self.perm.iter().map(|&v| other.perm[v as usize]).collect(),
        }
    }

    pub fn inverse(&self) -> LevelPermutation {
        let mut inv = vec![0u32; self.perm.len()];
        for (i, &v) in self.perm.iter().enumerate() {
            inv[v as usize] = i as u32;
        }
        LevelPermutation {
            arity: self.arity,
            level: self.level,
            perm: inv,
        }
    }

    /// The induced permutation on a shallower level.
    pub fn restrict(&self, level: u32) -> LevelPermutation {
        assert!(level <= self.level);
        let block = (self.arity as usize).pow(self.level - level);
        let size = (self.arity as usize).pow(level);
        LevelPermutation {
            arity: self.arity,
            level,
            perm: (0..size)
                .map(|v| self.perm[v * block] / block as u32)
                .collect(),
        }
    }

    pub fn to_csv(&self) -> String {
        let parts: Vec<String> = self.perm.iter().map(|v| v.to_string()).collect();
        parts.join(",")
    }

    pub fn from_csv(arity: u32, level: u32, s: &str) -> Result<Self> {
        let perm = s
            .trim()
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<u32>()
                    .map_err(|_| Error::InvalidRequest(format!("bad csv entry {t:?}")))
            })
            .collect::<Result<Vec<u32>>>()?;
        Self::from_images(arity, level, perm)
    }
}

impl fmt::Display for LevelPermutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_csv())
    }
}

fn check_leaves(arity: usize, n: u32, cap: u64) -> Result<usize> {
    let points = (arity as u64).checked_pow(n).unwrap_or(u64::MAX);
    if points > cap || points > u32::MAX as u64 {
        return Err(Error::MemoryGuard { points, cap });
    }
    Ok(points as usize)
}

/// Level-n permutation of a word with the default leaf cap.
pub fn level_permutation(w: &GeneratorWord, n: u32) -> Result<LevelPermutation> {
    level_permutation_capped(w, n, DEFAULT_LEAF_CAP)
}

pub fn level_permutation_capped(w: &GeneratorWord, n: u32, cap: u64) -> Result<LevelPermutation> {
    let p = w.group().arity();
    let size = check_leaves(p, n, cap)?;
    let mut perm = vec![0u32; size];
    fill_word(w, n, 0, &mut perm);
    Ok(LevelPermutation {
        arity: p as u32,
        level: n,
        perm,
    })
}

/// Writes the level-n action of `w` into `out`, offsetting images by `base`.
fn fill_word(w: &GeneratorWord, n: u32, base: u32, out: &mut [u32]) {
    if w.is_empty() || n == 0 {
        for (i, o) in out.iter_mut().enumerate() {
            *o = base + i as u32;
        }
        return;
    }
    let s = decompose(w);
    fill_blocks(&s.root, base, out, |child, nb, dst| {
        fill_word(&s.children[child], n - 1, nb, dst)
    });
}

fn fill_blocks<F>(root: &[u32], base: u32, out: &mut [u32], f: F)
where
    F: Fn(usize, u32, &mut [u32]) + Sync,
{
    let block = out.len() / root.len();
    if block >= PAR_BLOCK {
        out.par_chunks_mut(block)
            .enumerate()
            .for_each(|(x, dst)| f(x, base + root[x] * block as u32, dst));
    } else {
        for (x, dst) in out.chunks_mut(block).enumerate() {
            f(x, base + root[x] * block as u32, dst);
        }
    }
}

/// Level-`m` permutation of `w` (as an image table) together with the
/// section of `w` at every level-`m` vertex, indexed by vertex.
pub fn sections_at_level(w: &GeneratorWord, m: u32) -> (Vec<u32>, Vec<GeneratorWord>) {
    if m == 0 {
        return (vec![0], vec![w.clone()]);
    }
    let s = decompose(w);
    let p = s.root.len();
    let block = p.pow(m - 1);
    let mut perm = Vec::with_capacity(p * block);
    let mut secs = Vec::with_capacity(p * block);
    for (x, c) in s.children.iter().enumerate() {
        let (cp, cs) = sections_at_level(c, m - 1);
        perm.extend(cp.iter().map(|&v| s.root[x] * block as u32 + v));
        secs.extend(cs);
    }
    (perm, secs)
}

pub fn in_stab(w: &GeneratorWord, n: u32) -> Result<bool> {
    Ok(level_permutation(w, n)?.is_identity())
}

/// Whether a letter sequence, read without any cancellation or use of the
/// relations, acts trivially on level `n`. Sections are pushed through the
/// recursion letter by letter, so no `p^n` table is built.
pub fn letters_in_stab(group: GroupSpec, letters: &[(Gen, i64)], n: u32) -> bool {
    let mut seen: HashSet<(Vec<(Gen, i64)>, u32)> = HashSet::new();
    raw_in_stab(group, letters.to_vec(), n, &mut seen)
}

fn raw_in_stab(
    group: GroupSpec,
    letters: Vec<(Gen, i64)>,
    n: u32,
    seen: &mut HashSet<(Vec<(Gen, i64)>, u32)>,
) -> bool {
    if n == 0 || letters.is_empty() {
        return true;
    }
    if !seen.insert((letters.clone(), n)) {
        return true;
    }
    let p = group.arity();
    let mut root: Vec<u32> = (0..p as u32).collect();
    let mut children: Vec<Vec<(Gen, i64)>> = vec![Vec::new(); p];
    let units = letters
        .iter()
        .flat_map(|&(g, e)| std::iter::repeat_n((g, e.signum()), e.unsigned_abs() as usize));
    for (g, e) in units {
        let (groot, gsecs) = generator_section(group, g, e as i32);
        let mut inv = vec![0usize; p];
        for (x, &r) in root.iter().enumerate() {
            inv[r as usize] = x;
        }
        for (y, sg, se) in gsecs {
            children[inv[y]].push((sg, se));
        }
        for r in root.iter_mut() {
            *r = groot[*r as usize];
        }
    }
    if root.iter().enumerate().any(|(i, &r)| r as usize != i) {
        return false;
    }
    children
        .into_iter()
        .all(|c| raw_in_stab(group, c, n - 1, seen))
}

/// Decides whether `w` is the identity with the default depth guard.
pub fn is_identity(w: &GeneratorWord) -> Result<bool> {
    is_identity_guarded(w, DEFAULT_DEPTH_GUARD)
}

/// Every section reachable from `w` is visited once; `w` is trivial exactly
/// when all of them have trivial root permutation. Groups in both families
/// are contracting, so the reachable set is finite.
pub fn is_identity_guarded(w: &GeneratorWord, depth_guard: usize) -> Result<bool> {
    let w = w.reduce();
    let mut seen: HashSet<GeneratorWord> = HashSet::new();
    let mut layer = vec![w];
    let mut depth = 0usize;
    while !layer.is_empty() {
        if depth > depth_guard {
            return Err(Error::Undecided { depth });
        }
        let mut next = Vec::new();
        for u in layer {
            if u.is_empty() || seen.contains(&u) {
                continue;
            }
            if u.group().is_grigorchuk() && u.len() <= 2 {
                // a, b, c, d and every reduced pair move the first level
                return Ok(false);
            }
            let s = decompose(&u);
            if !s.root_is_trivial() {
                return Ok(false);
            }
            seen.insert(u);
            next.extend(s.children.into_iter().filter(|c| !c.is_empty()));
        }
        layer = next;
        depth += 1;
    }
    Ok(true)
}

/// A tree automorphism given either by a word or by a root permutation and
/// sections. Used for tuple notation such as `(x^-1, 1, 1, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Element {
    Word(GeneratorWord),
    Node {
        group: GroupSpec,
        root: Vec<u32>,
        children: Vec<Element>,
    },
}

impl From<GeneratorWord> for Element {
    fn from(w: GeneratorWord) -> Self {
        Element::Word(w)
    }
}

impl Element {
    pub fn identity(group: GroupSpec) -> Element {
        Element::Word(GeneratorWord::identity(group))
    }

    /// The level-1 stabilizer element with the given sections.
    pub fn tuple(group: GroupSpec, children: Vec<Element>) -> Element {
        assert_eq!(children.len(), group.arity());
        Element::Node {
            group,
            root: (0..group.arity() as u32).collect(),
            children,
        }
    }

    /// The element of `Stab(depth)` whose level-`depth` sections are `leaves`
    /// (listed in vertex order).
    pub fn branch(group: GroupSpec, depth: u32, leaves: Vec<Element>) -> Element {
        let p = group.arity();
        assert_eq!(leaves.len(), p.pow(depth));
        if depth == 0 {
            return leaves.into_iter().next().unwrap();
        }
        let block = leaves.len() / p;
        let mut it = leaves.into_iter();
        let children = (0..p)
            .map(|_| Element::branch(group, depth - 1, it.by_ref().take(block).collect()))
            .collect();
        Element::tuple(group, children)
    }

    pub fn group(&self) -> GroupSpec {
        match self {
            Element::Word(w) => w.group(),
            Element::Node { group, .. } => *group,
        }
    }

    pub fn as_word(&self) -> Option<&GeneratorWord> {
        match self {
            Element::Word(w) => Some(w),
            Element::Node { .. } => None,
        }
    }

    /// Root permutation and sections, decomposing a word if needed.
    pub fn split(&self) -> (Vec<u32>, Vec<Element>) {
        match self {
            Element::Word(w) => {
                let s = decompose(w);
                (s.root, s.children.into_iter().map(Element::Word).collect())
            }
            Element::Node { root, children, .. } => (root.clone(), children.clone()),
        }
    }

    pub fn mul(&self, other: &Element) -> Element {
        if let (Element::Word(u), Element::Word(v)) = (self, other) {
            return Element::Word(u.mul(v));
        }
        let (ur, uc) = self.split();
        let (vr, vc) = other.split();
        let root = ur.iter().map(|&x| vr[x as usize]).collect();
        let children = uc
            .iter()
            .enumerate()
            .map(|(x, c)| c.mul(&vc[ur[x] as usize]))
            .collect();
        Element::Node {
            group: self.group(),
            root,
            children,
        }
    }

    pub fn inverse(&self) -> Element {
        match self {
            Element::Word(w) => Element::Word(w.inverse()),
            Element::Node {
                group,
                root,
                children,
            } => {
                let mut rinv = vec![0u32; root.len()];
                for (x, &r) in root.iter().enumerate() {
                    rinv[r as usize] = x as u32;
                }
                // (g')|_x = (g|_{x^{g'}})'
                let children = (0..root.len())
                    .map(|x| children[rinv[x] as usize].inverse())
                    .collect();
                Element::Node {
                    group: *group,
                    root: rinv,
                    children,
                }
            }
        }
    }

    pub fn pow(&self, k: i64) -> Element {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = Element::identity(self.group());
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    pub fn commutator(&self, other: &Element) -> Element {
        self.inverse()
            .mul(&other.inverse())
            .mul(self)
            .mul(other)
    }

    pub fn conjugate(&self, by: &Element) -> Element {
        by.inverse().mul(self).mul(by)
    }

    pub fn level_permutation(&self, n: u32) -> Result<LevelPermutation> {
        self.level_permutation_capped(n, DEFAULT_LEAF_CAP)
    }

    pub fn level_permutation_capped(&self, n: u32, cap: u64) -> Result<LevelPermutation> {
        let p = self.group().arity();
        let size = check_leaves(p, n, cap)?;
        let mut perm = vec![0u32; size];
        self.fill(n, 0, &mut perm);
        Ok(LevelPermutation {
            arity: p as u32,
            level: n,
            perm,
        })
    }

    fn fill(&self, n: u32, base: u32, out: &mut [u32]) {
        match self {
            Element::Word(w) => fill_word(w, n, base, out),
            Element::Node { root, children, .. } => {
                if n == 0 {
                    out[0] = base;
                    return;
                }
                fill_blocks(root, base, out, |x, nb, dst| {
                    children[x].fill(n - 1, nb, dst)
                });
            }
        }
    }

    /// As [`sections_at_level`], for tuple-built elements.
    pub fn sections_at_level(&self, m: u32) -> (Vec<u32>, Vec<Element>) {
        if let Element::Word(w) = self {
            let (perm, secs) = sections_at_level(w, m);
            return (perm, secs.into_iter().map(Element::Word).collect());
        }
        if m == 0 {
            return (vec![0], vec![self.clone()]);
        }
        let (root, children) = self.split();
        let p = root.len();
        let block = p.pow(m - 1);
        let mut perm = Vec::with_capacity(p * block);
        let mut secs = Vec::with_capacity(p * block);
        for (x, c) in children.iter().enumerate() {
            let (cp, cs) = c.sections_at_level(m - 1);
            perm.extend(cp.iter().map(|&v| root[x] * block as u32 + v));
            secs.extend(cs);
        }
        (perm, secs)
    }

    pub fn is_identity(&self) -> Result<bool> {
        match self {
            Element::Word(w) => is_identity(w),
            Element::Node { root, children, .. } => {
                if root.iter().enumerate().any(|(i, &r)| r as usize != i) {
                    return Ok(false);
                }
                for c in children {
                    if !c.is_identity()? {
                        return Ok(false);
                    }
                }
                Ok(true)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn grig(s: &str) -> GeneratorWord {
        GeneratorWord::parse(GroupSpec::grigorchuk(), s).unwrap()
    }

    fn gs(p: u32, s: &str) -> GeneratorWord {
        GeneratorWord::parse(GroupSpec::gupta_sidki(p).unwrap(), s).unwrap()
    }

    #[test]
    fn generator_sections() {
        let s = decompose(&grig("b"));
        assert!(s.root_is_trivial());
        assert_eq!(s.children, vec![grig("a"), grig("c")]);
        let s = decompose(&gs(3, "b"));
        assert_eq!(s.children, vec![gs(3, "a"), gs(3, "a'"), gs(3, "b")]);
    }

    #[test]
    fn x_sections() {
        let s = decompose(&grig("abab"));
        assert!(s.root_is_trivial());
        assert_eq!(s.children, vec![grig("ca"), grig("ac")]);
        let s = decompose(&gs(3, "[a,b]"));
        assert!(s.root_is_trivial());
        assert_eq!(s.children, vec![gs(3, "b'a"), gs(3, "a"), gs(3, "ab")]);
    }

    #[test]
    fn small_permutations() {
        assert_eq!(level_permutation(&grig("a"), 2).unwrap().images(), &[2, 3, 0, 1]);
        assert!(level_permutation(&grig("d"), 1).unwrap().is_identity());
        assert!(in_stab(&grig("b"), 1).unwrap());
        assert!(!in_stab(&grig("a"), 1).unwrap());
        assert!(in_stab(&gs(3, "[a,b]"), 1).unwrap());
        // abab acts as (a, a) on level 2
        let x = level_permutation(&grig("abab"), 2).unwrap();
        let aa = Element::tuple(
            GroupSpec::grigorchuk(),
            vec![grig("a").into(), grig("a").into()],
        );
        assert_eq!(x, aa.level_permutation(2).unwrap());
    }

    #[test]
    fn word_problem() {
        assert!(is_identity(&GeneratorWord::parse(GroupSpec::grigorchuk(), "dd").unwrap()).unwrap());
        assert!(!is_identity(&grig("ad")).unwrap());
        let x = grig("abab");
        assert!(is_identity(&x.pow(8)).unwrap());
        assert!(!is_identity(&x.pow(4)).unwrap());
        // level-permutation oracle
        let ident = (1..=12).all(|n| level_permutation(&x.pow(4), n).unwrap().is_identity());
        assert!(!ident);
        assert!((1..=12).all(|n| level_permutation(&x.pow(8), n).unwrap().is_identity()));
        for p in [3, 5] {
            let x1 = gs(p, "[a,b]");
            let mut k = 1i64;
            while !is_identity(&x1.pow(k)).unwrap() {
                assert!(!level_permutation(&x1.pow(k), 6).unwrap().is_identity() || k > 1);
                k *= p as i64;
                assert!(k <= 125);
            }
            assert!(level_permutation(&x1.pow(k), 6).unwrap().is_identity());
            assert!(!level_permutation(&x1.pow(k / p as i64), 6).unwrap().is_identity());
        }
    }

    #[test]
    fn depth_guard_reports() {
        let x = grig("abab").pow(8);
        assert_eq!(is_identity_guarded(&x, 1), Err(Error::Undecided { depth: 2 }));
    }

    #[test]
    fn memory_guard() {
        assert!(matches!(
            level_permutation_capped(&grig("a"), 30, 1 << 24),
            Err(Error::MemoryGuard { .. })
        ));
    }

    #[test]
    fn restrict_and_csv() {
        let w = grig("abacabad");
        let p5 = level_permutation(&w, 5).unwrap();
        for n in 0..5 {
            assert_eq!(p5.restrict(n), level_permutation(&w, n).unwrap());
        }
        let csv = p5.to_csv();
        assert_eq!(LevelPermutation::from_csv(2, 5, &csv).unwrap(), p5);
        assert!(LevelPermutation::from_csv(2, 1, "0,0").is_err());
    }

    #[test]
    fn element_inverse_and_tuple() {
        let g = GroupSpec::grigorchuk();
        let e = Element::tuple(g, vec![grig("abab").into(), grig("ad").into()]);
        let prod = e.mul(&e.inverse());
        assert!(prod.is_identity().unwrap());
        assert!(prod.level_permutation(6).unwrap().is_identity());
    }

    fn arb_word(group: GroupSpec, max: usize) -> impl Strategy<Value = GeneratorWord> {
        let gens = group.generators().to_vec();
        let p = group.prime() as i32;
        prop::collection::vec((0..gens.len(), 1..p), 0..max).prop_map(move |v| {
            let letters: Vec<_> = v
                .into_iter()
                .map(|(i, e)| crate::words::Letter::new(gens[i], e))
                .collect();
            GeneratorWord::from_letters(group, &letters).unwrap()
        })
    }

    fn arb_any() -> impl Strategy<Value = GeneratorWord> {
        prop_oneof![
            arb_word(GroupSpec::grigorchuk(), 30),
            arb_word(GroupSpec::gupta_sidki(3).unwrap(), 20),
            arb_word(GroupSpec::gupta_sidki(5).unwrap(), 12),
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn homomorphism(u in arb_word(GroupSpec::grigorchuk(), 30),
                        v in arb_word(GroupSpec::grigorchuk(), 30),
                        n in 0u32..=6) {
            let lhs = level_permutation(&u.mul(&v), n).unwrap();
            let rhs = level_permutation(&u, n).unwrap().compose(&level_permutation(&v, n).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn homomorphism_gs(u in arb_word(GroupSpec::gupta_sidki(3).unwrap(), 20),
                           v in arb_word(GroupSpec::gupta_sidki(3).unwrap(), 20),
                           n in 0u32..=5) {
            let lhs = level_permutation(&u.mul(&v), n).unwrap();
            let rhs = level_permutation(&u, n).unwrap().compose(&level_permutation(&v, n).unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn reduce_keeps_action(w in arb_any(), n in 0u32..=4) {
            // build the unreduced letter sequence by doubling each run
            let raw: Vec<_> = w.letters().iter().flat_map(|l| [*l, *l, crate::words::Letter::new(l.gen, -l.exp)]).collect();
            let doubled = GeneratorWord::from_letters(w.group(), &raw).unwrap();
            prop_assert_eq!(level_permutation(&doubled, n).unwrap(), level_permutation(&w, n).unwrap());
        }

        #[test]
        fn sections_rebuild(w in arb_any(), n in 0u32..=4) {
            let s = decompose(&w);
            let node = Element::Node {
                group: w.group(),
                root: s.root.clone(),
                children: s.children.into_iter().map(Element::Word).collect(),
            };
            prop_assert_eq!(node.level_permutation(n + 1).unwrap(), level_permutation(&w, n + 1).unwrap());
        }

        #[test]
        fn filtration(w in arb_any(), n in 0u32..=4) {
            if in_stab(&w, n + 1).unwrap() {
                prop_assert!(in_stab(&w, n).unwrap());
            }
        }

        #[test]
        fn word_problem_matches_levels(w in arb_word(GroupSpec::grigorchuk(), 24)) {
            let wp = is_identity(&w).unwrap();
            let deep = level_permutation(&w, 12).unwrap().is_identity();
            if wp {
                prop_assert!(deep);
            }
            // 12 levels separate all short nontrivial words here
            prop_assert_eq!(wp, deep);
        }
    }

    #[test]
    fn generator_orders() {
        for group in [
            GroupSpec::grigorchuk(),
            GroupSpec::gupta_sidki(3).unwrap(),
            GroupSpec::gupta_sidki(5).unwrap(),
        ] {
            for &g in group.generators() {
                let mut w = GeneratorWord::identity(group);
                let gen = GeneratorWord::generator(group, g);
                let mut perm = LevelPermutation::identity(group.prime(), 6);
                let gp = level_permutation(&gen, 6).unwrap();
                for _ in 0..group.prime() {
                    w = w.mul(&gen);
                    perm = perm.compose(&gp);
                }
                assert!(w.is_empty());
                assert!(perm.is_identity());
            }
        }
    }
}
