//! The Gupta-Sidki p-groups: the chain `x_1 = [a,b]`, `x_{i+1} = [a, x_i]`,
//! the tuple maps `j(g)`, membership in `K^(xp^m)`, `L_i^(xp^m)` and
//! `K_i^(xp^m)`, the commutator constructions behind the cover-growth step,
//! the constant `C_p`, and the sequences attached to the lower central series
//! of the 3-group.
//!
//! Membership works on sections. `K` is the kernel of the exponent sums, and
//! a level-1 stabilizer element lies in `K^(xp)` exactly when its sections
//! do, so `K/K^(xp)` is read off from the exponent sums of the sections.
//! Coordinates over `x_1, ..., x_{p-1}` come from a table of all `p^{p-1}`
//! combinations.

use std::collections::HashMap;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::check::Status;
use crate::error::{Error, Result};
use crate::quotient::{
    diameter, CosetGroup, EnumerateOptions, FiniteGroup, FiniteQuotient, QuotientKind, Subgroup,
};
use crate::sk::{ball_words, check_covers, cover, symmetric_set, SkReport};
use crate::words::{symmetrize, Gen, GeneratorWord, GroupSpec};
use crate::wreath::{Element, DEFAULT_LEAF_CAP};

/// Target sets with at most this many elements are checked in full by the
/// component checks; larger ones are sampled.
pub const EXHAUSTIVE_CAP: usize = 729;

/// Default number of sampled targets per component check.
pub const DEFAULT_SAMPLES: usize = 200;

/// `gamma_j` of `Gamma_3/K^(x9)` decides membership in `gamma_j(Gamma_3)`
/// for `j` up to this value, since `K^(x9) <= gamma_6`.
pub const GS3_FAITHFUL_THROUGH: u32 = 6;

/// `(x_1, 1, 1)` at `p = 3`, found by a meet-in-the-middle search over
/// products of conjugates of `b`.
const ZERO_X1_P3: &str = "bab'ab'ab'ababa";

fn gen_word(g: GroupSpec, x: Gen, e: i64) -> GeneratorWord {
    GeneratorWord::power_of(g, x, e)
}

/// `x_1, ..., x_{p-1}`.
pub fn x_chain(p: u32) -> Result<Vec<GeneratorWord>> {
    let g = GroupSpec::gupta_sidki(p)?;
    let a = gen_word(g, Gen::A, 1);
    let b = gen_word(g, Gen::B, 1);
    let mut out = vec![a.commutator(&b)];
    for _ in 2..p {
        let next = a.commutator(out.last().unwrap());
        out.push(next);
    }
    Ok(out)
}

fn binomial(n: u32, k: u32) -> i64 {
    if k > n {
        return 0;
    }
    let mut r: i64 = 1;
    for i in 0..k as i64 {
        r = r * (n as i64 - i) / (i + 1);
    }
    r
}

/// `alpha_{j,i} = (-1)^{i+1} binom(j, i-1)`, zero outside `1 <= i <= j+1`.
pub fn alpha(j: u32, i: u32) -> i64 {
    if i == 0 || i > j + 1 {
        return 0;
    }
    let sign = if i % 2 == 1 { 1 } else { -1 };
    sign * binomial(j, i - 1)
}

/// Exponents of the entries of `j(g)`, one per level-1 vertex.
pub fn bold_exponents(p: u32, j: u32) -> Vec<i64> {
    (1..=p).map(|i| alpha(j, i)).collect()
}

/// Image of an element in `Gamma/K = C_p x C_p`. For tuple-built elements
/// the `a`-class is the root rotation and the `b`-class the sum over the
/// sections, which is how the generators contribute.
pub fn abelian_class(e: &Element) -> Result<[u32; 2]> {
    match e {
        Element::Word(w) => {
            let s = w.exponent_sums()?;
            Ok([s.coords[0], s.coords[1]])
        }
        Element::Node { group, root, children } => {
            let p = group.prime();
            let k = root[0];
            if root.iter().enumerate().any(|(i, &r)| r != (i as u32 + k) % p) {
                return Err(Error::InvalidRequest(
                    "root permutation is not a power of a; not an element of the group".into(),
                ));
            }
            let mut sb = 0;
            for c in children {
                sb = (sb + abelian_class(c)?[1]) % p;
            }
            Ok([k, sb])
        }
    }
}

/// Named subgroups of a Gupta-Sidki group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SubgroupName {
    /// The derived subgroup.
    K,
    /// `K^(xp^m)`.
    Kpow(u32),
    /// `L_i = <x_i, ..., x_{p-1}, K^(xp)>`, `1 <= i <= p`.
    L(u32),
    /// `L_i^(xp^m)`.
    Lpow(u32, u32),
    /// `K_i^(xp^m)`, `0 <= i <= p`, `m >= 1`.
    Kbold(u32, u32),
    Gamma(u32),
    Stab(u32),
}

impl fmt::Display for SubgroupName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            SubgroupName::K => write!(f, "K"),
            SubgroupName::Kpow(m) => write!(f, "K^(xp^{m})"),
            SubgroupName::L(i) => write!(f, "L_{i}"),
            SubgroupName::Lpow(i, m) => write!(f, "L_{i}^(xp^{m})"),
            SubgroupName::Kbold(i, m) => write!(f, "K_{i}^(xp^{m})"),
            SubgroupName::Gamma(j) => write!(f, "gamma_{j}"),
            SubgroupName::Stab(n) => write!(f, "Stab({n})"),
        }
    }
}

/// The chain, coordinates and membership tests for one prime.
pub struct GuptaSidki {
    group: GroupSpec,
    p: u32,
    xs: Vec<GeneratorWord>,
    zero_x1: GeneratorWord,
    coords: HashMap<Vec<u32>, Vec<u32>>,
    lcs: Option<GsQuotient>,
}

impl fmt::Debug for GuptaSidki {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GuptaSidki").field("p", &self.p).finish_non_exhaustive()
    }
}

impl GuptaSidki {
    pub fn new(p: u32) -> Result<Self> {
        let group = GroupSpec::gupta_sidki(p)?;
        if p > 7 {
            // the table has p^{p-1} entries
            return Err(Error::Refused(format!(
                "coordinate table for p = {p} has {p}^{} entries; p <= 7 is supported",
                p - 1
            )));
        }
        let xs = x_chain(p)?;
        let zero_x1 = if p == 3 {
            GeneratorWord::parse(group, ZERO_X1_P3)?
        } else {
            let b = gen_word(group, Gen::B, 1);
            let a = gen_word(group, Gen::A, 1);
            b.commutator(&b.conjugate(&a))
        };
        let mut gs = GuptaSidki {
            group,
            p,
            xs,
            zero_x1,
            coords: HashMap::new(),
            lcs: None,
        };
        let basis = gs
            .xs
            .iter()
            .map(|x| gs.section_vector(&Element::Word(x.clone())))
            .collect::<Result<Vec<_>>>()?;
        let d = (p - 1) as usize;
        let total = (p as usize).pow(d as u32);
        let mut lambda = vec![0u32; d];
        for _ in 0..total {
            let mut v = vec![0u32; 2 * p as usize];
            for (l, b) in lambda.iter().zip(&basis) {
                for (vi, bi) in v.iter_mut().zip(b) {
                    *vi = (*vi + l * bi) % p;
                }
            }
            if gs.coords.insert(v, lambda.clone()).is_some() {
                return Err(Error::Inconsistent(format!(
                    "x_1, ..., x_{d} are dependent modulo K^(xp) at p = {p}"
                )));
            }
            for c in lambda.iter_mut() {
                *c += 1;
                if *c < p {
                    break;
                }
                *c = 0;
            }
        }
        Ok(gs)
    }

    /// Attaches `Gamma_3/K^(x9)` so that `gamma_j` membership can be
    /// decided for `j <= 6`.
    pub fn with_lcs(mut self, opts: &EnumerateOptions) -> Result<Self> {
        if self.p != 3 {
            return Err(Error::Unsupported(format!(
                "lower central series is only available for p = 3, got {}",
                self.p
            )));
        }
        self.lcs = Some(GsQuotient::build(3, 2, opts)?);
        Ok(self)
    }

    pub fn lcs(&self) -> Option<&GsQuotient> {
        self.lcs.as_ref()
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    /// `x_i`, `1 <= i <= p-1`.
    pub fn x(&self, i: u32) -> &GeneratorWord {
        &self.xs[i as usize - 1]
    }

    pub fn chain(&self) -> &[GeneratorWord] {
        &self.xs
    }

    pub fn a(&self) -> GeneratorWord {
        gen_word(self.group, Gen::A, 1)
    }

    pub fn b(&self) -> GeneratorWord {
        gen_word(self.group, Gen::B, 1)
    }

    fn one(&self) -> Element {
        Element::identity(self.group)
    }

    /// Exponent sums of the level-1 sections, `2p` entries (`a` then `b`
    /// per vertex). The element must fix level 1.
    pub fn section_vector(&self, e: &Element) -> Result<Vec<u32>> {
        let (root, children) = e.split();
        if root.iter().enumerate().any(|(i, &r)| r as usize != i) {
            return Err(Error::InvalidRequest("element moves level 1".into()));
        }
        let mut v = Vec::with_capacity(2 * self.p as usize);
        for c in &children {
            v.extend(abelian_class(c)?);
        }
        Ok(v)
    }

    /// Coordinates of the image in `K/K^(xp)` over `x_1, ..., x_{p-1}`, or
    /// `None` outside `K`.
    pub fn x_coords(&self, e: &Element) -> Result<Option<Vec<u32>>> {
        if abelian_class(e)? != [0, 0] {
            return Ok(None);
        }
        let v = self.section_vector(e)?;
        self.coords.get(&v).cloned().map(Some).ok_or_else(|| {
            Error::Inconsistent("element of K outside the span of the x-basis".into())
        })
    }

    fn in_l(&self, i: u32, e: &Element) -> Result<bool> {
        Ok(match self.x_coords(e)? {
            None => false,
            Some(c) => c.iter().take(i as usize - 1).all(|&x| x == 0),
        })
    }

    /// Coefficients `lambda_j` with `prod_j j(x_1)^{lambda_j}` congruent to
    /// `e` modulo `L_2^(xp)`, or `None` outside `K^(xp)`.
    pub fn bold_coords(&self, e: &Element) -> Result<Option<Vec<u32>>> {
        let p = self.p as i64;
        let (root, children) = e.split();
        if root.iter().enumerate().any(|(i, &r)| r as usize != i) {
            return Ok(None);
        }
        let mut c = Vec::with_capacity(self.p as usize);
        for ch in &children {
            match self.x_coords(ch)? {
                Some(x) => c.push(x[0] as i64),
                None => return Ok(None),
            }
        }
        // j(x_1) has its last nonzero entry, (-1)^j, at vertex j
        let mut lambda = vec![0u32; self.p as usize];
        for j in (0..self.p).rev() {
            let top = alpha(j, j + 1);
            let l = (c[j as usize] * top).rem_euclid(p);
            lambda[j as usize] = l as u32;
            for k in 0..=j {
                c[k as usize] = (c[k as usize] - l * alpha(j, k + 1)).rem_euclid(p);
            }
        }
        Ok(Some(lambda))
    }

    fn in_kbold1(&self, i: u32, e: &Element) -> Result<bool> {
        Ok(match self.bold_coords(e)? {
            None => false,
            Some(l) => l.iter().take(i as usize).all(|&x| x == 0),
        })
    }

    fn sections_in(&self, e: &Element, m: u32, test: impl Fn(&Element) -> Result<bool>) -> Result<bool> {
        let points = (self.p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if points > DEFAULT_LEAF_CAP {
            return Err(Error::MemoryGuard {
                points,
                cap: DEFAULT_LEAF_CAP,
            });
        }
        let (perm, secs) = e.sections_at_level(m);
        if perm.iter().enumerate().any(|(i, &r)| r as usize != i) {
            return Ok(false);
        }
        for s in &secs {
            if !test(s)? {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Decides `e` in the named subgroup. `e` must be an element of the
    /// group.
    pub fn member(&self, name: SubgroupName, e: &Element) -> Result<bool> {
        let p = self.p;
        match name {
            SubgroupName::K => Ok(abelian_class(e)? == [0, 0]),
            SubgroupName::Kpow(m) => self.member(SubgroupName::Lpow(1, m), e),
            SubgroupName::L(i) => self.member(SubgroupName::Lpow(i, 0), e),
            SubgroupName::Lpow(i, m) => {
                if !(1..=p).contains(&i) {
                    return Err(Error::InvalidRequest(format!("L_i needs 1 <= i <= {p}, got {i}")));
                }
                self.sections_in(e, m, |s| self.in_l(i, s))
            }
            SubgroupName::Kbold(i, m) => {
                if i > p || m == 0 {
                    return Err(Error::InvalidRequest(format!(
                        "K_i^(xp^m) needs 0 <= i <= {p} and m >= 1, got i = {i}, m = {m}"
                    )));
                }
                self.sections_in(e, m - 1, |s| self.in_kbold1(i, s))
            }
            SubgroupName::Stab(n) => Ok(e.level_permutation(n)?.is_identity()),
            SubgroupName::Gamma(j) => match j {
                0 => Err(Error::InvalidRequest("the lower central series starts at gamma_1".into())),
                1 => Ok(true),
                2 => self.member(SubgroupName::K, e),
                _ => {
                    let lcs = self.lcs.as_ref().filter(|_| j <= GS3_FAITHFUL_THROUGH).ok_or_else(|| {
                        Error::Unsupported(format!(
                            "gamma_{j} membership needs p = 3, j <= {GS3_FAITHFUL_THROUGH} and an attached quotient"
                        ))
                    })?;
                    let img = lcs.quotient().image_of_element(&self.wordify(e, lcs.depth)?)?;
                    Ok(lcs.gamma(j as usize).contains(img))
                }
            },
        }
    }

    pub fn member_word(&self, name: SubgroupName, w: &GeneratorWord) -> Result<bool> {
        self.member(name, &Element::Word(w.clone()))
    }

    /// Rewrites a tuple-built element so that its sections at `depth` are
    /// words, as the branch-power quotients need.
    fn wordify(&self, e: &Element, depth: u32) -> Result<Element> {
        match e {
            Element::Word(_) => Ok(e.clone()),
            Element::Node { root, children, .. } if depth > 0 => {
                let children = children
                    .iter()
                    .map(|c| self.wordify(c, depth - 1))
                    .collect::<Result<Vec<_>>>()?;
                Ok(Element::Node {
                    group: self.group,
                    root: root.clone(),
                    children,
                })
            }
            Element::Node { .. } => Err(Error::Unsupported(
                "element is tuple-built below the quotient depth".into(),
            )),
        }
    }

    /// `j(g)` as a tuple.
    pub fn bold(&self, j: u32, g: &Element) -> Element {
        let entries = bold_exponents(self.p, j).into_iter().map(|e| g.pow(e)).collect();
        Element::tuple(self.group, entries)
    }

    /// An element of `K` as a product of conjugates `(x_1^s)^h`, by moving
    /// every `a` to the front of the word.
    pub fn conjugate_form(&self, g: &GeneratorWord) -> Result<Vec<(i64, GeneratorWord)>> {
        let p = self.p as i64;
        let (mut i, mut j) = (0i64, 0i64);
        let mut terms: Vec<(i64, GeneratorWord)> = Vec::new();
        for l in g.letters() {
            let e = l.exp as i64;
            let step = gen_word(self.group, l.gen, e);
            // a^i b^j T l = a^i b^j l T^l
            for t in terms.iter_mut() {
                t.1 = t.1.mul(&step);
            }
            match l.gen {
                Gen::B => j += e,
                _ => {
                    // a^i b^j a^e = a^{i+e} b^j [b^j, a^e]
                    let mut front = self.comm_ba(j.rem_euclid(p), e.rem_euclid(p));
                    front.append(&mut terms);
                    terms = front;
                    i += e;
                }
            }
        }
        if i.rem_euclid(p) != 0 || j.rem_euclid(p) != 0 {
            return Err(Error::Precondition(format!("{g} is not in K")));
        }
        Ok(terms)
    }

    /// `[b^j, a^e]` for `j, e >= 0` as conjugates of `x_1^{+-1}`.
    fn comm_ba(&self, j: i64, e: i64) -> Vec<(i64, GeneratorWord)> {
        if j == 0 || e == 0 {
            return Vec::new();
        }
        let a = gen_word(self.group, Gen::A, 1);
        let b = gen_word(self.group, Gen::B, 1);
        // [b^j, a] = [b^{j-1}, a]^b [b, a]
        let mut ba: Vec<(i64, GeneratorWord)> = Vec::new();
        for _ in 0..j {
            for t in ba.iter_mut() {
                t.1 = t.1.mul(&b);
            }
            ba.push((-1, GeneratorWord::identity(self.group)));
        }
        // [b^j, a^e] = [b^j, a] [b^j, a^{e-1}]^a
        let mut out: Vec<(i64, GeneratorWord)> = Vec::new();
        for _ in 0..e {
            for t in out.iter_mut() {
                t.1 = t.1.mul(&a);
            }
            let mut next = ba.clone();
            next.append(&mut out);
            out = next;
        }
        out
    }

    /// Letter substitution `a -> b`, `b -> a'ba`: the image of `h` fixes
    /// level 1 and has section `h` at vertex 0.
    pub fn lift(&self, h: &GeneratorWord) -> GeneratorWord {
        let a = gen_word(self.group, Gen::A, 1);
        h.letters().iter().fold(GeneratorWord::identity(self.group), |acc, l| {
            let bl = gen_word(self.group, Gen::B, l.exp as i64);
            match l.gen {
                Gen::A => acc.mul(&bl),
                _ => acc.mul(&bl.conjugate(&a)),
            }
        })
    }

    /// A word for `0(g) = (g, 1, ..., 1)`, `g` in `K`.
    pub fn zero_word(&self, g: &GeneratorWord) -> Result<GeneratorWord> {
        let terms = self.conjugate_form(g)?;
        Ok(terms.iter().fold(GeneratorWord::identity(self.group), |acc, (s, h)| {
            acc.mul(&self.zero_x1.pow(*s).conjugate(&self.lift(h)))
        }))
    }

    /// A word for `j(g)`, through `(j+1)(g) = [a, j(g)]`.
    pub fn bold_word(&self, j: u32, g: &GeneratorWord) -> Result<GeneratorWord> {
        if j >= self.p {
            return Err(Error::InvalidRequest(format!("j(g) needs j < {}, got {j}", self.p)));
        }
        let a = self.a();
        let mut w = self.zero_word(g)?;
        for _ in 0..j {
            w = a.commutator(&w);
        }
        Ok(w)
    }

    fn rand_k_word(&self, rng: &mut ChaCha8Rng) -> GeneratorWord {
        let p = self.p as i64;
        let mut w = GeneratorWord::identity(self.group);
        for _ in 0..6 {
            let g = if rng.random_bool(0.5) { Gen::A } else { Gen::B };
            w = w.mul(&gen_word(self.group, g, rng.random_range(1..p)));
        }
        let s = w.exponent_sums().expect("Gupta-Sidki word");
        w.mul(&gen_word(self.group, Gen::A, -(s.coords[0] as i64)))
            .mul(&gen_word(self.group, Gen::B, -(s.coords[1] as i64)))
    }

    fn branch_with(&self, m: u32, mut leaf: impl FnMut() -> Element) -> Element {
        let n = (self.p as usize).pow(m);
        Element::branch(self.group, m, (0..n).map(|_| leaf()).collect())
    }

    fn rand_kpow(&self, m: u32, rng: &mut ChaCha8Rng) -> Element {
        self.branch_with(m, || Element::Word(self.rand_k_word(rng)))
    }

    fn rand_l(&self, i: u32, rng: &mut ChaCha8Rng) -> Element {
        let mut w = GeneratorWord::identity(self.group);
        for j in i..self.p {
            w = w.mul(&self.x(j).pow(rng.random_range(0..self.p as i64)));
        }
        Element::Word(w).mul(&self.rand_kpow(1, rng))
    }

    fn rand_lpow(&self, i: u32, m: u32, rng: &mut ChaCha8Rng) -> Element {
        self.branch_with(m, || self.rand_l(i, rng))
    }

    fn rand_kbold(&self, i: u32, m: u32, rng: &mut ChaCha8Rng) -> Element {
        let x1 = Element::Word(self.x(1).clone());
        self.branch_with(m - 1, || {
            let mut e = self.one();
            for j in i..self.p {
                e = e.mul(&self.bold(j, &x1).pow(rng.random_range(0..self.p as i64)));
            }
            e.mul(&self.rand_lpow(2, 1, rng))
        })
    }
}

/// The p-dependent commutator identities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GsIdentity {
    /// `0(x_1) = [x_1^{a^-2}, x_1^a]`, `p >= 7`.
    ZeroAsCommutator,
    /// `[x_1, x_1^a] = (x_1, aba^-2b'a, 1, 1, 1)` and its square law, `p = 5`.
    SquareOfZero,
    /// `[b, x_1] = (x_1', 1, x_1')` modulo `L_2^(x3)`, `p = 3`.
    CommutatorWithB,
}

impl GsIdentity {
    pub fn for_prime(p: u32) -> GsIdentity {
        match p {
            3 => GsIdentity::CommutatorWithB,
            5 => GsIdentity::SquareOfZero,
            _ => GsIdentity::ZeroAsCommutator,
        }
    }

    fn applies(self, p: u32) -> bool {
        match self {
            GsIdentity::ZeroAsCommutator => p >= 7,
            GsIdentity::SquareOfZero => p == 5,
            GsIdentity::CommutatorWithB => p == 3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: GsIdentity,
    pub p: u32,
    /// Each part of the identity as stated and whether it held.
    pub parts: Vec<(String, bool)>,
    /// What holds instead, when a stated part fails.
    pub corrections: Vec<(String, bool)>,
    pub status: Status,
}

fn same_to_level(l: &Element, r: &Element, n: u32) -> Result<bool> {
    for k in 1..=n {
        if l.level_permutation(k)? != r.level_permutation(k)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Checks the identity for `gs.prime()`; exact parts are compared as level
/// permutations up to level 4 and by the word problem.
pub fn verify_gs_identity(gs: &GuptaSidki, identity: GsIdentity) -> Result<IdentityCheck> {
    let p = gs.prime();
    if !identity.applies(p) {
        return Err(Error::InvalidRequest(format!("{identity:?} does not apply at p = {p}")));
    }
    let g = gs.group();
    let x1 = Element::Word(gs.x(1).clone());
    let a = gs.a();
    let zero = gs.bold(0, &x1);
    let mut parts = Vec::new();
    let mut corrections = Vec::new();
    let exact = |l: &Element, r: &Element| -> Result<bool> {
        Ok(same_to_level(l, r, 4)? && l.mul(&r.inverse()).is_identity()?)
    };
    match identity {
        GsIdentity::ZeroAsCommutator => {
            let u = gs.x(1).conjugate(&a.pow(-2));
            let v = gs.x(1).conjugate(&a);
            let rhs = Element::Word(u.commutator(&v));
            parts.push(("0(x_1) = [x_1^{a^-2}, x_1^a]".to_string(), exact(&zero, &rhs)?));
        }
        GsIdentity::SquareOfZero => {
            let v = gs.x(1).conjugate(&a);
            let lhs = Element::Word(gs.x(1).commutator(&v));
            let y = GeneratorWord::parse(g, "aba^-2b'a")?;
            let mut entries = vec![Element::identity(g); p as usize];
            entries[0] = x1.clone();
            entries[1] = Element::Word(y.clone());
            let rhs = Element::tuple(g, entries);
            parts.push(("[x_1, x_1^a] = (x_1, aba^-2b'a, 1, 1, 1)".to_string(), exact(&lhs, &rhs)?));
            parts.push((
                "aba^-2b'a = x_1 mod L_2".to_string(),
                gs.member_word(SubgroupName::L(2), &y.mul(&gs.x(1).inverse()))?,
            ));
            parts.push((
                "[x_1, x_1^a] = 0(x_1)^2 mod K_1^(x5)".to_string(),
                gs.member(SubgroupName::Kbold(1, 1), &lhs.mul(&zero.pow(-2)))?,
            ));
            corrections.push((
                "aba^-2b'a = x_1^2 mod L_2".to_string(),
                gs.member_word(SubgroupName::L(2), &y.mul(&gs.x(1).pow(-2)))?,
            ));
            corrections.push((
                "[x_1, x_1^a] = 0(x_1)^3 mod K_1^(x5)".to_string(),
                gs.member(SubgroupName::Kbold(1, 1), &lhs.mul(&zero.pow(-3)))?,
            ));
        }
        GsIdentity::CommutatorWithB => {
            let lhs = Element::Word(gs.b().commutator(gs.x(1)));
            let xi = x1.inverse();
            let rhs = Element::tuple(g, vec![xi.clone(), Element::identity(g), xi]);
            parts.push((
                "[b, x_1] = (x_1', 1, x_1') mod L_2^(x3)".to_string(),
                gs.member(SubgroupName::Lpow(2, 1), &lhs.mul(&rhs.inverse()))?,
            ));
            parts.push((
                "[b, x_1] = 0(x_1) mod K_1^(x3)".to_string(),
                gs.member(SubgroupName::Kbold(1, 1), &lhs.mul(&zero.inverse()))?,
            ));
        }
    }
    let ok = parts.iter().all(|(_, b)| *b);
    Ok(IdentityCheck {
        identity,
        p,
        parts,
        corrections,
        status: Status::from_bool(ok),
    })
}

/// `C_p` with the sequences it is built from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CpConstant {
    pub p: u32,
    /// `a_0, ..., a_{p-1}`.
    pub a: Vec<u128>,
    /// `b_1, ..., b_{p-1}`.
    pub b: Vec<u128>,
    pub value: u128,
}

/// `3 * 4^p - 2^p (p + 8) + 7`.
pub fn cp_closed_form(p: u32) -> u128 {
    3 * 4u128.pow(p) + 7 - 2u128.pow(p) * (p as u128 + 8)
}

/// `C_p` from the recursions, checked against the closed form.
pub fn cp(p: u32) -> Result<CpConstant> {
    GroupSpec::gupta_sidki(p)?;
    if p > 61 {
        return Err(Error::Refused(format!("C_p overflows 128 bits at p = {p}")));
    }
    let mut a = vec![4u128];
    for _ in 1..p {
        a.push(2 * a.last().unwrap() + 2);
    }
    let mut b = vec![a.iter().sum::<u128>()];
    for _ in 2..p {
        b.push(2 * b.last().unwrap() + 2);
    }
    let value = 1 + b.iter().sum::<u128>();
    let closed = cp_closed_form(p);
    if value != closed {
        return Err(Error::Inconsistent(format!(
            "C_{p}: recursion gives {value}, closed form {closed}"
        )));
    }
    Ok(CpConstant { p, a, b, value })
}

/// Index facts at level `n`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GsIndexBounds {
    pub p: u32,
    pub n: u32,
    /// Exponent of the stated lower bound `p^{(p-2)(p^{n-1}-1)+1}` on
    /// `|Gamma : Stab(n)|`.
    pub stab_bound_exponent: u64,
    /// Exponent `1 + (p-2)(p^{n-1}-1)/(p-1)` counted by the distinct
    /// products of the chain across levels.
    pub product_bound_exponent: u64,
    /// Exponent of `|Gamma : K^(xp^n)| = p^{p^n+1}`.
    pub kpow_index_exponent: u64,
    /// Exponent of the enumerated `|Gamma : Stab(n)|`, when enumerated.
    pub stab_index_exponent: Option<u64>,
    pub kpow_enumerated_exponent: Option<u64>,
    pub stab_bound_holds: Option<bool>,
    pub product_bound_holds: Option<bool>,
    pub kpow_index_holds: Option<bool>,
}

fn exponent_of(order: usize, p: u32) -> Result<u64> {
    let e = order.ilog(p as usize);
    if (p as usize).pow(e) != order {
        return Err(Error::Inconsistent(format!("order {order} is not a power of {p}")));
    }
    Ok(e as u64)
}

/// The index formulas at level `n`, compared with enumeration whenever the
/// quotient fits in `opts` (`None` skips enumeration).
pub fn gs_index_bounds(p: u32, n: u32, opts: Option<&EnumerateOptions>) -> Result<GsIndexBounds> {
    let g = GroupSpec::gupta_sidki(p)?;
    if n == 0 {
        return Err(Error::InvalidRequest("levels start at 1".into()));
    }
    let pp = p as u64;
    let span = pp.pow(n - 1) - 1;
    let stab_bound_exponent = (pp - 2) * span + 1;
    let product_bound_exponent = 1 + (pp - 2) * span / (pp - 1);
    let kpow_index_exponent = pp.pow(n) + 1;
    let mut r = GsIndexBounds {
        p,
        n,
        stab_bound_exponent,
        product_bound_exponent,
        kpow_index_exponent,
        stab_index_exponent: None,
        kpow_enumerated_exponent: None,
        stab_bound_holds: None,
        product_bound_holds: None,
        kpow_index_holds: None,
    };
    let Some(opts) = opts else { return Ok(r) };
    match FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(n), opts) {
        Ok(q) => {
            let e = exponent_of(q.order(), p)?;
            r.stab_index_exponent = Some(e);
            r.stab_bound_holds = Some(e >= stab_bound_exponent);
            r.product_bound_holds = Some(e >= product_bound_exponent);
        }
        Err(Error::PartialEnumeration { .. }) | Err(Error::MemoryGuard { .. }) => {}
        Err(e) => return Err(e),
    }
    let predicted = (p as f64).powf(kpow_index_exponent as f64);
    if predicted <= opts.max_elements as f64 {
        let q = FiniteQuotient::enumerate(g, &[], QuotientKind::BranchPower(n), opts)?;
        let e = exponent_of(q.order(), p)?;
        r.kpow_enumerated_exponent = Some(e);
        r.kpow_index_holds = Some(e == kpow_index_exponent);
    }
    Ok(r)
}

/// `Gamma/K^(xp^depth)` with its lower central series and the images of
/// `K^(xp^j)`, `j <= depth`.
pub struct GsQuotient {
    p: u32,
    depth: u32,
    q: FiniteQuotient,
    chain: Vec<Subgroup>,
    kpow: Vec<Subgroup>,
    trivial: Subgroup,
}

impl GsQuotient {
    pub fn build(p: u32, depth: u32, opts: &EnumerateOptions) -> Result<Self> {
        let g = GroupSpec::gupta_sidki(p)?;
        let q = FiniteQuotient::enumerate(g, &[], QuotientKind::BranchPower(depth), opts)?;
        let chain = crate::quotient::lower_central_series(&q)?;
        let x1 = x_chain(p)?.remove(0);
        let mut kpow = Vec::new();
        for j in 0..=depth {
            let mut leaves = vec![Element::identity(g); (p as usize).pow(j)];
            leaves[0] = Element::Word(x1.clone());
            let e = q.image_of_element(&Element::branch(g, j, leaves))?;
            kpow.push(Subgroup::generated(&q, &[e]).normal_closure(&q));
        }
        let trivial = Subgroup::trivial(q.order());
        Ok(GsQuotient {
            p,
            depth,
            q,
            chain,
            kpow,
            trivial,
        })
    }

    pub fn prime(&self) -> u32 {
        self.p
    }

    pub fn depth(&self) -> u32 {
        self.depth
    }

    pub fn quotient(&self) -> &FiniteQuotient {
        &self.q
    }

    pub fn gamma(&self, i: usize) -> &Subgroup {
        assert!(i >= 1, "the lower central series starts at gamma_1");
        self.chain.get(i - 1).unwrap_or(&self.trivial)
    }

    pub fn indices(&self) -> Vec<usize> {
        self.chain.iter().map(|h| h.index()).collect()
    }

    /// Image of `K^(xp^j)`.
    pub fn kpow(&self, j: u32) -> &Subgroup {
        &self.kpow[j as usize]
    }

    fn std_images(&self) -> Result<(Vec<GeneratorWord>, Vec<u32>)> {
        let words = symmetrize(&self.q.group().standard_generators());
        let imgs = words.iter().map(|w| self.q.image(w)).collect::<Result<Vec<u32>>>()?;
        Ok((words, imgs))
    }

    /// The standard-generator ball of least radius meeting every coset of
    /// `K^(xp^m)`, as one word per element of the quotient it reaches.
    pub fn covering_ball(&self, m: u32) -> Result<(usize, Vec<GeneratorWord>)> {
        let (words, imgs) = self.std_images()?;
        let cosets = CosetGroup::new(&self.q, self.kpow(m));
        let steps: Vec<u32> = imgs.iter().map(|&s| cosets.coset_of(s)).collect();
        let r = diameter(&cosets, &steps)?.diameter;
        let ball = ball_words(&self.q, &words, |w| self.q.image(w), r)?;
        Ok((r, ball.into_iter().map(|(_, w)| w).collect()))
    }
}

/// The cover-growth step in full: given `X` with `X K^(xp^m) = Gamma`, the
/// least `e` with `X^{<=e} K^(xp^{m+1}) = Gamma`, compared with `C_p`. The
/// quotient must be `Gamma/K^(xp^{m+1})`.
pub fn sk_step_verify_gs(gq: &GsQuotient, m: u32, x: &[GeneratorWord]) -> Result<SkReport> {
    if gq.depth != m + 1 {
        return Err(Error::InvalidRequest(format!(
            "step m = {m} needs Gamma/K^(xp^{}), got depth {}",
            m + 1,
            gq.depth
        )));
    }
    if x.is_empty() {
        return Err(Error::Precondition("X is empty".into()));
    }
    let bound = cp(gq.p)?.value;
    let q = &gq.q;
    let x = symmetric_set(x);
    let imgs = x.iter().map(|w| q.image(w)).collect::<Result<Vec<u32>>>()?;
    let (std_words, std_imgs) = gq.std_images()?;
    let hyp = CosetGroup::new(q, gq.kpow(m));
    check_covers(&hyp, &imgs, &std_words, &std_imgs, &format!("K^(x{}^{m})", gq.p))?;
    let (e, balls, witnesses) = cover(q, &imgs)?;
    let mut distinct = imgs.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let mut report = SkReport {
        group: q.group().to_string(),
        m,
        target: format!("Gamma/K^(x{}^{})", gq.p, m + 1),
        target_order: q.order(),
        x_images: distinct.len(),
        x_words: x.len(),
        e,
        bound: bound as u64,
        within_bound: e as u128 <= bound,
        balls,
        sample_witnesses: Vec::new(),
        witnesses,
        x,
    };
    let deepest = (0..report.witnesses.len())
        .max_by_key(|&t| report.witnesses[t].len())
        .unwrap_or(0);
    report.sample_witnesses = vec![report.witness_word(deepest).to_string()];
    Ok(report)
}

/// One inclusion of the cover-growth argument, checked on targets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCheck {
    /// 1: `K^(xp^m)` into `K_1^(xp^m)`; 2: `K_i` into `K_{i+1}`; 3: `L_i`
    /// into `L_{i+1}`.
    pub step: u8,
    /// The `i` whose layer is approximated.
    pub index: u32,
    /// Factors from `X` the inclusion allows: 4, `a_i` or `b_i`.
    pub factors: u128,
    pub targets: usize,
    /// All targets were tried (the perturbations are always random).
    pub exhaustive: bool,
    pub failures: usize,
    pub first_failure: Option<String>,
    pub status: Status,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub p: u32,
    pub m: u32,
    pub seed: u64,
    pub steps: Vec<StepCheck>,
    pub status: Status,
}

/// Exponent vectors to try: all of them when there are few, else a seeded
/// sample.
fn targets(p: u32, len: usize, samples: usize, rng: &mut ChaCha8Rng) -> (Vec<Vec<i64>>, bool) {
    let total = (p as f64).powi(len as i32);
    if total <= EXHAUSTIVE_CAP as f64 {
        let total = total as usize;
        let mut out = Vec::with_capacity(total);
        let mut l = vec![0i64; len];
        for _ in 0..total {
            out.push(l.clone());
            for c in l.iter_mut() {
                *c += 1;
                if *c < p as i64 {
                    break;
                }
                *c = 0;
            }
        }
        return (out, true);
    }
    let out = (0..samples)
        .map(|_| (0..len).map(|_| rng.random_range(0..p as i64)).collect())
        .collect();
    (out, false)
}

/// Checks the three families of inclusions at level `m >= 2`. For every
/// target `k` the commutator partners `g`, `h` are built as in the
/// argument, replaced by random elements of the same cosets (as arbitrary
/// covering sets would supply), and the commutator is tested against `k`.
pub fn sk_components_gs(gs: &GuptaSidki, m: u32, samples: usize, seed: u64) -> Result<ComponentReport> {
    if m < 2 {
        return Err(Error::Precondition(format!("the step needs m >= 2, got {m}")));
    }
    let p = gs.prime();
    let g = gs.group();
    let c = cp(p)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a = gs.a();
    let x1 = Element::Word(gs.x(1).clone());
    let xpm2 = Element::Word(gs.x(p - 2).clone());
    let width = (p as usize).pow(m - 1);
    let mut steps = Vec::new();

    let mut run = |step: u8,
                   index: u32,
                   factors: u128,
                   len: usize,
                   rng: &mut ChaCha8Rng,
                   check: &mut dyn FnMut(&[i64], &mut ChaCha8Rng) -> Result<bool>|
     -> Result<()> {
        let (ts, exhaustive) = targets(p, len, samples, rng);
        let mut failures = 0;
        let mut first_failure = None;
        for t in &ts {
            if !check(t, rng)? {
                failures += 1;
                first_failure.get_or_insert_with(|| format!("{t:?}"));
            }
        }
        let status = if failures > 0 {
            Status::Failed
        } else if exhaustive {
            Status::VerifiedExhaustive
        } else {
            Status::VerifiedSampled
        };
        steps.push(StepCheck {
            step,
            index,
            factors,
            targets: ts.len(),
            exhaustive,
            failures,
            first_failure,
            status,
        });
        Ok(())
    };

    // step 1: K^(xp^m) modulo K_1^(xp^m)
    let (gl, hl): (Element, Box<dyn Fn(i64) -> Element>) = match p {
        3 => (Element::branch(g, m - 2, vec![Element::Word(gs.x(2).clone()); width / 3]), {
            let x1 = x1.clone();
            Box::new(move |l| x1.pow(l))
        }),
        5 => {
            // [x_1, x_1^a] = 0(x_1)^c mod K_1^(x5); the exponent is read
            // off rather than assumed
            let v = Element::Word(gs.x(1).conjugate(&a));
            let lhs = x1.commutator(&v);
            let c = gs.bold_coords(&lhs)?.map(|l| l[0] as i64).unwrap_or(0);
            if c == 0 || !gs.member(SubgroupName::Kbold(1, 1), &lhs.mul(&gs.bold(0, &x1).pow(-c)))? {
                return Err(Error::Inconsistent("[x_1, x_1^a] is not a power of 0(x_1) mod K_1^(x5)".into()));
            }
            let inv = (1..5).find(|k| (k * c) % 5 == 1).unwrap();
            (Element::branch(g, m - 1, vec![x1.clone(); width]), Box::new(move |l| v.pow(inv * l)))
        }
        _ => {
            let u = Element::Word(gs.x(1).conjugate(&a.pow(-2)));
            let v = Element::Word(gs.x(1).conjugate(&a));
            (Element::branch(g, m - 1, vec![u; width]), Box::new(move |l| v.pow(l)))
        }
    };
    run(1, 0, 4, width, &mut rng, &mut |l, rng| {
        let h = Element::branch(g, m - 1, l.iter().map(|&e| hl(e)).collect());
        let k = Element::branch(g, m - 1, l.iter().map(|&e| gs.bold(0, &x1).pow(e)).collect())
            .mul(&gs.rand_kbold(1, m, rng));
        let xg = gl.mul(&gs.rand_kpow(m, rng));
        let xh = h.mul(&gs.rand_kpow(m, rng));
        gs.member(SubgroupName::Kbold(1, m), &xg.commutator(&xh).mul(&k.inverse()))
    })?;

    // step 2: K_t^(xp^m) modulo K_{t+1}^(xp^m)
    let gg = Element::branch(g, m - 2, vec![xpm2.clone(); width / p as usize]);
    for t in 1..p {
        let prev = gs.bold(t - 1, &x1);
        let cur = gs.bold(t, &x1);
        run(2, t, c.a[t as usize], width, &mut rng, &mut |l, rng| {
            let h = Element::branch(g, m - 1, l.iter().map(|&e| prev.pow(e)).collect());
            let k = Element::branch(g, m - 1, l.iter().map(|&e| cur.pow(e)).collect())
                .mul(&gs.rand_kbold(t + 1, m, rng));
            let xg = gg.mul(&gs.rand_kpow(m, rng));
            let xh = h.mul(&gs.rand_kbold(t, m, rng));
            gs.member(SubgroupName::Kbold(t + 1, m), &xg.commutator(&xh).mul(&k.inverse()))
        })?;
    }

    // step 3: L_t^(xp^m) modulo L_{t+1}^(xp^m)
    let gg = Element::branch(g, m - 1, vec![xpm2.clone(); width]);
    for t in 2..p {
        let prev = Element::Word(gs.x(t - 1).clone());
        let cur = Element::Word(gs.x(t).clone());
        run(3, t, c.b[t as usize - 1], width * p as usize, &mut rng, &mut |l, rng| {
            let h = Element::branch(g, m, l.iter().map(|&e| prev.pow(e)).collect());
            let k = Element::branch(g, m, l.iter().map(|&e| cur.pow(e)).collect())
                .mul(&gs.rand_lpow(t + 1, m, rng));
            let xg = gg.mul(&gs.rand_kpow(m, rng));
            let xh = h.mul(&gs.rand_lpow(t, m, rng));
            gs.member(SubgroupName::Lpow(t + 1, m), &xg.commutator(&xh).mul(&k.inverse()))
        })?;
    }

    let status = steps.iter().fold(Status::VerifiedExhaustive, |s, c| s.and(c.status));
    Ok(ComponentReport {
        p,
        m,
        seed,
        steps,
        status,
    })
}

/// Structural facts about the chain and the subgroup lattice, checked on
/// seeded samples.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LatticeCheck {
    pub name: String,
    pub trials: usize,
    pub failures: usize,
    pub status: Status,
}

fn lattice_check(name: &str, trials: usize, mut f: impl FnMut() -> Result<bool>) -> Result<LatticeCheck> {
    let mut failures = 0;
    for _ in 0..trials {
        if !f()? {
            failures += 1;
        }
    }
    Ok(LatticeCheck {
        name: name.to_string(),
        trials,
        failures,
        status: if failures == 0 {
            Status::VerifiedSampled
        } else {
            Status::Failed
        },
    })
}

/// Basis, normality, chain ordering and the two commutator inclusions for
/// level-1 stabilizers.
pub fn verify_lattice(gs: &GuptaSidki, samples: usize, seed: u64) -> Result<Vec<LatticeCheck>> {
    let p = gs.prime();
    let g = gs.group();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();

    // every product of powers of the chain has its own class mod K^(xp)
    let d = (p - 1) as usize;
    let total = (p as usize).pow(d as u32);
    let mut lambda = vec![0u32; d];
    let mut failures = 0;
    for _ in 0..total {
        let w = lambda
            .iter()
            .enumerate()
            .fold(GeneratorWord::identity(g), |acc, (j, &l)| acc.mul(&gs.x(j as u32 + 1).pow(l as i64)));
        if gs.x_coords(&Element::Word(w))? != Some(lambda.clone()) {
            failures += 1;
        }
        for c in lambda.iter_mut() {
            *c += 1;
            if *c < p {
                break;
            }
            *c = 0;
        }
    }
    out.push(LatticeCheck {
        name: "products of x_1..x_{p-1} are distinct mod K^(xp)".into(),
        trials: total,
        failures,
        status: if failures == 0 {
            Status::VerifiedExhaustive
        } else {
            Status::Failed
        },
    });

    let a = Element::Word(gs.a());
    let b = Element::Word(gs.b());
    let stab1 = |rng: &mut ChaCha8Rng| -> Element {
        let w = gs.rand_k_word(rng).mul(&gen_word(g, Gen::B, rng.random_range(0..p as i64)));
        Element::Word(w.conjugate(&gen_word(g, Gen::A, rng.random_range(0..p as i64))))
    };

    out.push(lattice_check("[Stab(1), Stab(1)] <= K^(xp)", samples, || {
        let (u, v) = (stab1(&mut rng), stab1(&mut rng));
        gs.member(SubgroupName::Kpow(1), &u.commutator(&v))
    })?);
    out.push(lattice_check("[Stab(1), K^(xp)] <= L_2^(xp)", samples, || {
        let u = stab1(&mut rng);
        let k = gs.rand_kpow(1, &mut rng);
        gs.member(SubgroupName::Lpow(2, 1), &u.commutator(&k))
    })?);

    let mut rng2 = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    out.push(lattice_check("L_i and K_i^(xp) are normal", samples, || {
        let i = rng2.random_range(1..p);
        let l = gs.rand_l(i, &mut rng2);
        let kb = gs.rand_kbold(i, 1, &mut rng2);
        for c in [&a, &b] {
            if !gs.member(SubgroupName::L(i), &l.conjugate(c))?
                || !gs.member(SubgroupName::Kbold(i, 1), &kb.conjugate(c))?
            {
                return Ok(false);
            }
        }
        Ok(true)
    })?);
    out.push(lattice_check("L_2^(xp) <= K_{p-1}^(xp) <= ... <= K^(xp) <= L_{p-1} <= ... <= K", samples, || {
        let i = rng2.random_range(0..=p);
        let e = gs.rand_kbold(i, 1, &mut rng2);
        for j in 0..=i {
            if !gs.member(SubgroupName::Kbold(j, 1), &e)? {
                return Ok(false);
            }
        }
        let i = rng2.random_range(1..=p);
        let e = gs.rand_l(i, &mut rng2);
        for j in 1..=i {
            if !gs.member(SubgroupName::L(j), &e)? {
                return Ok(false);
            }
        }
        Ok(gs.member(SubgroupName::Kpow(1), &gs.rand_kbold(0, 1, &mut rng2))?
            && gs.member(SubgroupName::L(p), &gs.rand_kpow(1, &mut rng2))?)
    })?);
    Ok(out)
}

/// The congruences `x_i = (i+1)(a) i(b)^{a^-1} mod K^(xp)`, compared on
/// exponent sums of sections, plus `x_{p-1} (b,...,b)^-1` in `K^(xp)` and
/// `x_{p-2} (a,...,a)^-1` in `Stab(2)`.
pub fn verify_chain_sections(gs: &GuptaSidki) -> Result<Vec<(String, bool)>> {
    let p = gs.prime();
    let g = gs.group();
    let mut out = Vec::new();
    for i in 1..p - 1 {
        let v = gs.section_vector(&Element::Word(gs.x(i).clone()))?;
        let ea = bold_exponents(p, i + 1);
        let eb = bold_exponents(p, i);
        let mut want = Vec::new();
        for k in 0..p as usize {
            want.push(ea.get(k).copied().unwrap_or(0).rem_euclid(p as i64) as u32);
            want.push(eb[(k + 1) % p as usize].rem_euclid(p as i64) as u32);
        }
        out.push((format!("x_{i} = ({})(a) {i}(b)^(a^-1) mod K^(xp)", i + 1), v == want));
    }
    let bs = Element::tuple(g, vec![Element::Word(gs.b()); p as usize]);
    let last = Element::Word(gs.x(p - 1).clone()).mul(&bs.inverse());
    out.push((
        format!("x_{} (b,...,b)^-1 in K^(xp)", p - 1),
        gs.member(SubgroupName::Kpow(1), &last)?,
    ));
    let aas = Element::tuple(g, vec![Element::Word(gs.a()); p as usize]);
    let pen = Element::Word(gs.x(p - 2).clone()).mul(&aas.inverse());
    out.push((
        format!("x_{} (a,...,a)^-1 in Stab(2)", p - 2),
        pen.level_permutation(2)?.is_identity(),
    ));
    Ok(out)
}

/// `alpha_n` and `beta_n` for the 3-group.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Gs3Sequences {
    pub alpha: Vec<u128>,
    pub beta: Vec<u128>,
    /// The closed forms in `Z[sqrt 2]` equal the recursions.
    pub closed_forms_exact: bool,
    /// Largest relative error of the floating-point closed forms.
    pub float_max_rel_error: f64,
}

/// `alpha_1 = 1`, `alpha_2 = 2`, `alpha_n = 2 alpha_{n-1} + alpha_{n-2}`,
/// `beta_n = alpha_1 + ... + alpha_n`, for `n <= count`.
pub fn gs3_sequences(count: usize) -> Result<Gs3Sequences> {
    if count == 0 || count > 90 {
        return Err(Error::InvalidRequest(format!("need 1 <= n <= 90, got {count}")));
    }
    let mut alpha: Vec<u128> = vec![1, 2];
    while alpha.len() < count {
        let n = alpha.len();
        alpha.push(2 * alpha[n - 1] + alpha[n - 2]);
    }
    alpha.truncate(count);
    let beta: Vec<u128> = alpha
        .iter()
        .scan(0u128, |s, &x| {
            *s += x;
            Some(*s)
        })
        .collect();
    // (1 + sqrt 2)^n = u_n + v_n sqrt 2; alpha_n = v_n and
    // beta_n = (u_{n+1} - 1) / 2
    let (mut u, mut v) = (1u128, 0u128);
    let mut exact = true;
    let mut worst = 0f64;
    let s2 = 2f64.sqrt();
    for n in 1..=count {
        (u, v) = (u + 2 * v, u + v);
        let (un, _) = (u + 2 * v, u + v);
        exact &= v == alpha[n - 1] && (un - 1) / 2 == beta[n - 1] && (un - 1) % 2 == 0;
        let nf = n as f64;
        let af = ((1.0 + s2).powf(nf) - (1.0 - s2).powf(nf)) / (2.0 * s2);
        let bf = ((1.0 + s2).powf(nf + 1.0) + (1.0 - s2).powf(nf + 1.0) - 2.0) / 4.0;
        worst = worst
            .max((af - alpha[n - 1] as f64).abs() / alpha[n - 1] as f64)
            .max((bf - beta[n - 1] as f64).abs() / beta[n - 1] as f64);
    }
    Ok(Gs3Sequences {
        alpha,
        beta,
        closed_forms_exact: exact,
        float_max_rel_error: worst,
    })
}

/// Facts about the lower central series of the 3-group seen in
/// `Gamma_3/K^(x9)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Gs3IndexCheck {
    pub claim: String,
    pub computed: usize,
    pub expected: usize,
    pub holds: bool,
}

/// `|Gamma : gamma_{beta_m+1}| = 3^{(3^m+1)/2}` for `m = 1, 2`, and
/// `K^(x3) <= gamma_{alpha_2+1}`.
pub fn gs3_index_checks(gq: &GsQuotient) -> Result<Vec<Gs3IndexCheck>> {
    if gq.p != 3 || gq.depth < 2 {
        return Err(Error::InvalidRequest("needs Gamma_3/K^(x9)".into()));
    }
    let s = gs3_sequences(3)?;
    let mut out = Vec::new();
    for m in 1..=2u32 {
        let j = s.beta[m as usize - 1] as usize + 1;
        let computed = gq.gamma(j).index();
        let expected = 3usize.pow(3u32.pow(m).div_ceil(2));
        out.push(Gs3IndexCheck {
            claim: format!("|Gamma : gamma_{j}| = 3^{}", 3u32.pow(m).div_ceil(2)),
            computed,
            expected,
            holds: computed == expected,
        });
    }
    let j = s.alpha[1] as usize + 1;
    let inside = gq.kpow(1).is_subgroup_of(gq.gamma(j));
    out.push(Gs3IndexCheck {
        claim: format!("K^(x3) <= gamma_{j}"),
        computed: inside as usize,
        expected: 1,
        holds: inside,
    });
    Ok(out)
}
