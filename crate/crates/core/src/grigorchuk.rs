//! The Grigorchuk group: the subgroup `K = <x>^G` with `x = abab`, its
//! branch powers, degrees in the lower central series, the commutator
//! identities behind the cover-growth step, and the step itself.
//!
//! All lower-central-series work happens in `P = G/K^(x8)` (order `2^18`).
//! Since `K^(x8) <= gamma_9(G)`, membership of an image in `gamma_i(P)`
//! decides membership in `gamma_i(G)` for `i <= 9`.

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::check::Status;
use crate::error::{Error, Result};
use crate::quotient::{
    diameter, worst_case_diameter, CosetGroup, EnumerateOptions, FiniteGroup, FiniteQuotient,
    QuotientKind, Subgroup, WORST_CASE_CAP,
};
use crate::sk::{ball_words, check_covers, cover, symmetric_set, SkReport};
use crate::words::{symmetrize, Gen, GeneratorWord, GroupSpec};
use crate::wreath::{letters_in_stab, Element, LevelPermutation};

/// Depth `m` of the working quotient `G/K^(x2^m)`.
pub const LCS_DEPTH: u32 = 3;

/// Largest `i` for which `gamma_i` of the working quotient is faithful.
pub const FAITHFUL_THROUGH: usize = 9;

/// Bound on the number of factors in the cover-growth step.
pub const SK_FACTORS: u64 = 35;

fn grig() -> GroupSpec {
    GroupSpec::grigorchuk()
}

fn word(s: &str) -> GeneratorWord {
    GeneratorWord::parse(grig(), s).expect("fixed word")
}

/// `x = abab`, the normal generator of `K`.
pub fn x() -> GeneratorWord {
    word("abab")
}

/// The defining relations, each as a letter sequence that should act
/// trivially.
pub fn relations() -> Vec<(&'static str, Vec<(Gen, i64)>)> {
    use Gen::*;
    vec![
        ("a^2 = 1", vec![(A, 2)]),
        ("b^2 = 1", vec![(B, 2)]),
        ("c^2 = 1", vec![(C, 2)]),
        ("d^2 = 1", vec![(D, 2)]),
        ("bc = d", vec![(B, 1), (C, 1), (D, -1)]),
        ("cb = d", vec![(C, 1), (B, 1), (D, -1)]),
        ("cd = b", vec![(C, 1), (D, 1), (B, -1)]),
        ("bd = c", vec![(B, 1), (D, 1), (C, -1)]),
    ]
}

/// How a relation was checked at a level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RelationMethod {
    /// Composed the level permutations of the single letters.
    Composed,
    /// Pushed the letters through the recursion without building the table.
    Recursive,
}

/// Whether a letter sequence acts trivially on level `n`. Level tables are
/// composed letter by letter when they have at most `leaf_cap` points.
pub fn relation_holds(
    group: GroupSpec,
    letters: &[(Gen, i64)],
    n: u32,
    leaf_cap: u64,
) -> Result<(bool, RelationMethod)> {
    let points = (group.arity() as u64).checked_pow(n);
    if points.is_none_or(|p| p > leaf_cap) {
        return Ok((letters_in_stab(group, letters, n), RelationMethod::Recursive));
    }
    let mut acc = LevelPermutation::identity(group.arity() as u32, n);
    for &(g, e) in letters {
        let single = Element::Word(GeneratorWord::generator(group, g)).level_permutation_capped(n, leaf_cap)?;
        let step = if e < 0 { single.inverse() } else { single };
        for _ in 0..e.unsigned_abs() {
            acc = acc.compose(&step);
        }
    }
    Ok((acc.is_identity(), RelationMethod::Composed))
}

/// An element of `K` as a product of conjugates `(x^{+-1})^h`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConjugateForm {
    /// `(inverted, h)` stands for `(x^h)^{-1}` or `x^h`.
    terms: Vec<(bool, GeneratorWord)>,
}

/// Letter substitution `a -> b, b -> ada, c -> aba, d -> aca`. The image of
/// a word `h` has first section `h`, so conjugating `(g, 1)` by it gives
/// `(g^h, 1)`.
fn lift(h: &GeneratorWord) -> GeneratorWord {
    let imgs = [word("b"), word("ada"), word("aba"), word("aca")];
    h.letters().iter().fold(GeneratorWord::identity(grig()), |acc, l| {
        let i = match l.gen {
            Gen::A => 0,
            Gen::B => 1,
            Gen::C => 2,
            Gen::D => 3,
        };
        acc.mul(&imgs[i])
    })
}

impl ConjugateForm {
    pub fn identity() -> Self {
        ConjugateForm { terms: Vec::new() }
    }

    /// `x^e`.
    pub fn x_power(e: i64) -> Self {
        let id = GeneratorWord::identity(grig());
        ConjugateForm {
            terms: (0..e.unsigned_abs()).map(|_| (e < 0, id.clone())).collect(),
        }
    }

    pub fn terms(&self) -> usize {
        self.terms.len()
    }

    pub fn mul(&self, other: &ConjugateForm) -> ConjugateForm {
        let mut terms = self.terms.clone();
        terms.extend(other.terms.iter().cloned());
        ConjugateForm { terms }
    }

    pub fn inverse(&self) -> ConjugateForm {
        ConjugateForm {
            terms: self.terms.iter().rev().map(|(i, h)| (!i, h.clone())).collect(),
        }
    }

    pub fn conjugate(&self, by: &GeneratorWord) -> ConjugateForm {
        ConjugateForm {
            terms: self.terms.iter().map(|(i, h)| (*i, h.mul(by))).collect(),
        }
    }

    /// `(g, 1)` for this `g`. Uses `(x, 1) = x^a x^{ca}`.
    pub fn bold_zero(&self) -> ConjugateForm {
        let zero_x = [word("a"), word("ca")];
        let mut terms = Vec::new();
        for (inv, h) in &self.terms {
            let l = lift(h);
            if *inv {
                terms.extend(zero_x.iter().rev().map(|k| (true, k.mul(&l))));
            } else {
                terms.extend(zero_x.iter().map(|k| (false, k.mul(&l))));
            }
        }
        ConjugateForm { terms }
    }

    /// `(g, g^-1) = (g, 1) ((g, 1)^-1)^a`.
    pub fn bold_one(&self) -> ConjugateForm {
        let z = self.bold_zero();
        z.mul(&z.inverse().conjugate(&word("a")))
    }

    pub fn to_word(&self) -> GeneratorWord {
        let x = x();
        let xi = x.inverse();
        self.terms.iter().fold(GeneratorWord::identity(grig()), |acc, (inv, h)| {
            let base = if *inv { &xi } else { &x };
            acc.mul(&base.conjugate(h))
        })
    }
}

/// `x` or `x^2`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DegreeBase {
    X,
    X2,
}

/// `X_1 ... X_n (base)` with `X_i` the map `0: g -> (g, 1)` or
/// `1: g -> (g, g^-1)`; `X_1` is applied last.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DegreeQuery {
    pub base: DegreeBase,
    /// `true` for the map `1`.
    pub bits: Vec<bool>,
}

impl DegreeQuery {
    pub fn new(base: DegreeBase, bits: &[bool]) -> Self {
        DegreeQuery {
            base,
            bits: bits.to_vec(),
        }
    }

    /// Every query with exactly `n` maps.
    pub fn all(n: usize) -> Vec<DegreeQuery> {
        let mut out = Vec::new();
        for base in [DegreeBase::X, DegreeBase::X2] {
            for mask in 0u32..(1 << n) {
                let bits = (0..n).map(|i| mask >> i & 1 == 1).collect();
                out.push(DegreeQuery { base, bits });
            }
        }
        out
    }

    fn base_power(&self) -> i64 {
        match self.base {
            DegreeBase::X => 1,
            DegreeBase::X2 => 2,
        }
    }

    /// The element as nested tuples.
    pub fn element(&self) -> Element {
        let g = grig();
        let mut e = Element::Word(x().pow(self.base_power()));
        for &one in self.bits.iter().rev() {
            let second = if one { e.inverse() } else { Element::identity(g) };
            e = Element::tuple(g, vec![e, second]);
        }
        e
    }

    /// A word for the element, built from conjugates of `x`.
    pub fn branch_embed(&self) -> GeneratorWord {
        let mut c = ConjugateForm::x_power(self.base_power());
        for &one in self.bits.iter().rev() {
            c = if one { c.bold_one() } else { c.bold_zero() };
        }
        c.to_word()
    }

    pub fn label(&self) -> String {
        let maps: String = self.bits.iter().map(|&b| if b { '1' } else { '0' }).collect();
        let base = match self.base {
            DegreeBase::X => "x",
            DegreeBase::X2 => "x^2",
        };
        if maps.is_empty() {
            base.to_string()
        } else {
            format!("{maps}({base})")
        }
    }
}

/// `1 + sum X_i 2^{i-1} + 2^n`, with `2^{n+1}` for the base `x^2`.
pub fn degree_formula(q: &DegreeQuery) -> u64 {
    let n = q.bits.len() as u32;
    let sum: u64 = q
        .bits
        .iter()
        .enumerate()
        .map(|(i, &b)| if b { 1u64 << i } else { 0 })
        .sum();
    let top = match q.base {
        DegreeBase::X => 1u64 << n,
        DegreeBase::X2 => 1u64 << (n + 1),
    };
    1 + sum + top
}

/// An element of `Stab(m)` whose section at each level-`m` vertex is a
/// power of `x`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BranchVector {
    pub depth: u32,
    /// Exponents of `x`, mod 4, in vertex order.
    pub exponents: Vec<u8>,
}

impl BranchVector {
    pub fn new(depth: u32, exponents: &[u8]) -> Result<Self> {
        if exponents.len() != 1usize << depth {
            return Err(Error::InvalidRequest(format!(
                "a depth-{depth} vector has {} entries, got {}",
                1usize << depth,
                exponents.len()
            )));
        }
        Ok(BranchVector {
            depth,
            exponents: exponents.iter().map(|e| e % 4).collect(),
        })
    }

    pub fn element(&self) -> Element {
        let leaves = self
            .exponents
            .iter()
            .map(|&e| Element::Word(x().pow(e as i64)))
            .collect();
        Element::branch(grig(), self.depth, leaves)
    }

    fn conjugate_form(depth: u32, exps: &[u8]) -> ConjugateForm {
        if depth == 0 {
            return ConjugateForm::x_power(exps[0] as i64);
        }
        let (left, right) = exps.split_at(exps.len() / 2);
        let l = Self::conjugate_form(depth - 1, left).bold_zero();
        // (1, h) = (h, 1)^a
        let r = Self::conjugate_form(depth - 1, right)
            .bold_zero()
            .conjugate(&word("a"));
        l.mul(&r)
    }

    pub fn to_word(&self) -> GeneratorWord {
        Self::conjugate_form(self.depth, &self.exponents).to_word()
    }
}

/// Both sides of one of the four level-2 commutator identities.
pub fn commutator_identity(idx: u8) -> Result<(Element, Element)> {
    let g = grig();
    let xw = Element::Word(x());
    let xi = xw.inverse();
    let one = Element::identity(g);
    let pair = |u: &Element, v: &Element| Element::tuple(g, vec![u.clone(), v.clone()]);
    let quad = |e: [&Element; 4]| Element::branch(g, 2, e.iter().map(|&v| v.clone()).collect());
    let x2 = xw.pow(2);
    let (lhs, rhs) = match idx {
        1 => (xw.commutator(&pair(&xw, &one)), quad([&xi, &one, &one, &one])),
        2 => (
            xw.commutator(&pair(&xw, &xw)),
            quad([&xi, &one, &one, &pair(&one, &xi).mul(&xw)]),
        ),
        3 => (x2.commutator(&pair(&xw, &one)), quad([&xi, &xw, &one, &one])),
        4 => (
            x2.commutator(&pair(&xw, &xi)),
            quad([&xi, &xw, &pair(&xi, &one).mul(&xi), &pair(&one, &xi).mul(&xw)]),
        ),
        _ => {
            return Err(Error::InvalidRequest(format!(
                "commutator identities are numbered 1 to 4, got {idx}"
            )))
        }
    };
    Ok((lhs, rhs))
}

/// Compares two elements as level-`n` permutations.
pub fn sides_agree(lhs: &Element, rhs: &Element, n: u32) -> Result<bool> {
    Ok(lhs.level_permutation(n)? == rhs.level_permutation(n)?)
}

pub fn verify_commutator_identity(idx: u8, n: u32) -> Result<bool> {
    let (l, r) = commutator_identity(idx)?;
    sides_agree(&l, &r, n)
}

/// Decides the identity in the group itself through the word problem.
pub fn commutator_identity_exact(idx: u8) -> Result<bool> {
    let (l, r) = commutator_identity(idx)?;
    l.mul(&r.inverse()).is_identity()
}

/// Degree read off in the working quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Degree {
    Exact(usize),
    /// Lies in `gamma_i` for every `i` the quotient can separate.
    AtLeast(usize),
}

/// `G/K^(x8)` with its lower central series and the images of the branch
/// powers `K^(x2^j)`, `j = 0..=3`.
pub struct LcsQuotient {
    q: FiniteQuotient,
    chain: Vec<Subgroup>,
    kpow: Vec<Subgroup>,
    trivial: Subgroup,
}

impl LcsQuotient {
    pub fn build(opts: &EnumerateOptions) -> Result<Self> {
        let q = FiniteQuotient::enumerate(grig(), &[], QuotientKind::BranchPower(LCS_DEPTH), opts)?;
        let chain = crate::quotient::lower_central_series(&q)?;
        let mut kpow = Vec::new();
        for j in 0..=LCS_DEPTH {
            let mut leaves = vec![Element::identity(grig()); 1 << j];
            leaves[0] = Element::Word(x());
            let e = q.image_of_element(&Element::branch(grig(), j, leaves))?;
            kpow.push(Subgroup::generated(&q, &[e]).normal_closure(&q));
        }
        let trivial = Subgroup::trivial(q.order());
        Ok(LcsQuotient {
            q,
            chain,
            kpow,
            trivial,
        })
    }

    pub fn quotient(&self) -> &FiniteQuotient {
        &self.q
    }

    /// `gamma_i` of the working quotient, `i >= 1`.
    pub fn gamma(&self, i: usize) -> &Subgroup {
        assert!(i >= 1, "the lower central series starts at gamma_1");
        self.chain.get(i - 1).unwrap_or(&self.trivial)
    }

    /// `|P : gamma_i(P)|` for every term down to the trivial group.
    pub fn indices(&self) -> Vec<usize> {
        self.chain.iter().map(|h| h.index()).collect()
    }

    /// Image of `K^(x2^j)`.
    pub fn kpow(&self, j: u32) -> &Subgroup {
        &self.kpow[j as usize]
    }

    pub fn degree(&self, e: u32) -> Degree {
        for i in 2..=FAITHFUL_THROUGH {
            if !self.gamma(i).contains(e) {
                return Degree::Exact(i - 1);
            }
        }
        Degree::AtLeast(FAITHFUL_THROUGH)
    }

    pub fn degree_of_element(&self, e: &Element) -> Result<Degree> {
        Ok(self.degree(self.q.image_of_element(e)?))
    }

    fn std_images(&self) -> Result<(Vec<GeneratorWord>, Vec<u32>)> {
        let words = symmetrize(&grig().standard_generators());
        let imgs = words.iter().map(|w| self.q.image(w)).collect::<Result<Vec<u32>>>()?;
        Ok((words, imgs))
    }
}

/// Outcome of a degree check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeCheck {
    pub query: String,
    pub formula: u64,
    pub measured: Degree,
    pub status: Status,
}

fn judge_degree(lo: u64, hi: u64, measured: Degree) -> Status {
    match measured {
        Degree::Exact(d) => Status::from_bool(lo <= d as u64 && d as u64 <= hi),
        Degree::AtLeast(d) if hi >= d as u64 => Status::Inconclusive,
        Degree::AtLeast(_) => Status::Failed,
    }
}

/// Places the image of `branch_embed(q)` in the lower central series and
/// compares with [`degree_formula`].
pub fn verify_degree(lcs: &LcsQuotient, q: &DegreeQuery) -> Result<DegreeCheck> {
    let formula = degree_formula(q);
    let measured = lcs.degree(lcs.q.image(&q.branch_embed())?);
    Ok(DegreeCheck {
        query: q.label(),
        formula,
        measured,
        status: judge_degree(formula, formula, measured),
    })
}

/// One of the eight degree estimates for vectors of level-2 (or level-1)
/// blocks.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeEstimate {
    pub item: String,
    pub n: u32,
    pub delta: Vec<bool>,
    pub lo: u64,
    pub hi: u64,
}

impl DegreeEstimate {
    /// The block pattern repeated over `delta` (powers of `x` per leaf).
    fn pattern(&self) -> &'static [i64] {
        match self.item.as_str() {
            "i" => &[1, 0, 0, 0],
            "ii" => &[1, 0, 1, 0],
            "iii" => &[1, 1, 0, 0],
            "iv" | "v" => &[1, 1, 1, 1],
            "vi" => &[2, 0],
            _ => &[2, 2],
        }
    }

    pub fn element(&self) -> Element {
        let g = grig();
        let pat = self.pattern();
        let depth = self.n - 2 + pat.len().ilog2();
        let leaves = self
            .delta
            .iter()
            .flat_map(|&d| pat.iter().map(move |&e| if d { e } else { 0 }))
            .map(|e| Element::Word(x().pow(e)))
            .collect();
        Element::branch(g, depth, leaves)
    }
}

/// The eight estimates at level `n >= 2`, for every nonzero `delta`.
pub fn degree_estimates(n: u32) -> Vec<DegreeEstimate> {
    assert!(n >= 2);
    let t = 1u64 << n;
    let q = 1u64 << (n - 2);
    let h = 1u64 << (n - 1);
    let ranges: [(&str, u64, u64); 8] = [
        ("i", t + 1, t + q),
        ("ii", t + q + 1, t + h),
        ("iii", t + h + 1, t + 3 * q),
        ("iv", t + 3 * q + 1, 2 * t),
        ("v", 2 * t, 2 * t),
        ("vi", t + 1, t + q),
        ("vii", t + q + 1, t + h),
        ("viii", t + h, t + h),
    ];
    let k = 1usize << (n - 2);
    let mut out = Vec::new();
    for (item, lo, hi) in ranges {
        let all_ones = item == "v" || item == "viii";
        for mask in 1u32..(1 << k) {
            let delta: Vec<bool> = (0..k).map(|i| mask >> i & 1 == 1).collect();
            if all_ones && delta.iter().any(|d| !d) {
                continue;
            }
            out.push(DegreeEstimate {
                item: item.to_string(),
                n,
                delta,
                lo,
                hi,
            });
        }
    }
    out
}

pub fn verify_degree_estimate(lcs: &LcsQuotient, est: &DegreeEstimate) -> Result<(Degree, Status)> {
    let d = lcs.degree_of_element(&est.element())?;
    Ok((d, judge_degree(est.lo, est.hi, d)))
}

/// `2^{3 * 2^{m-1} + 2} = |G : gamma_{2^m+1}|` for `m >= 2`.
pub fn central_index_formula(m: u32) -> BigUint {
    BigUint::from(1u8) << (3 * (1u64 << (m - 1)) + 2)
}

/// Lower bound `2^{2^{n-1}+1}` on `|G : Stab(n)|`.
pub fn stab_index_bound(n: u32) -> BigUint {
    BigUint::from(1u8) << ((1u64 << (n - 1)) + 1)
}

/// Result of checking a map between subquotients.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapCheck {
    pub name: String,
    pub status: Status,
    pub domain: usize,
    pub target: usize,
    pub covered: usize,
    pub well_defined: bool,
    pub detail: String,
}

/// The squaring map `K^(x2^{m-1})/gamma_{2^m+1} -> gamma_{2^m+1}/K^(x2^m)`:
/// well defined and onto.
pub fn verify_squaring(lcs: &LcsQuotient, m: u32) -> Result<MapCheck> {
    if !(1..=LCS_DEPTH).contains(&m) {
        return Err(Error::Unsupported(format!(
            "squaring is checked for m = 1..{LCS_DEPTH} in G/K^(x{}), got {m}",
            1u32 << LCS_DEPTH
        )));
    }
    let q = &lcs.q;
    let dom = lcs.kpow(m - 1);
    let mid = lcs.gamma((1 << m) + 1);
    let top = lcs.kpow(m);
    let name = format!("squaring K^(x{})/gamma_{} -> gamma_{}/K^(x{})", 1 << (m - 1), (1 << m) + 1, (1 << m) + 1, 1 << m);
    if !(top.is_subgroup_of(mid) && mid.is_subgroup_of(dom)) {
        return Ok(MapCheck {
            name,
            status: Status::Failed,
            domain: 0,
            target: 0,
            covered: 0,
            well_defined: false,
            detail: "the subgroups are not nested".into(),
        });
    }
    let cosets = CosetGroup::new(q, top);
    let mut hit = vec![false; cosets.order()];
    let mut in_mid = true;
    let mut well_defined = true;
    for &k in dom.elements() {
        let s = q.mul(k, k);
        in_mid &= mid.contains(s);
        let c = cosets.coset_of(s);
        hit[c as usize] = true;
        for &g in mid.generators() {
            let kg = q.mul(k, g);
            if cosets.coset_of(q.mul(kg, kg)) != c {
                well_defined = false;
            }
        }
    }
    let target: Vec<u32> = {
        let mut t: Vec<u32> = mid.elements().iter().map(|&g| cosets.coset_of(g)).collect();
        t.sort_unstable();
        t.dedup();
        t
    };
    let covered = target.iter().filter(|&&c| hit[c as usize]).count();
    let ok = in_mid && well_defined && covered == target.len();
    Ok(MapCheck {
        name,
        status: Status::from_bool(ok),
        domain: dom.order() / mid.order(),
        target: target.len(),
        covered,
        well_defined,
        detail: if in_mid {
            String::new()
        } else {
            "some square leaves the middle subgroup".into()
        },
    })
}

/// `(g, h) -> [g, h]` from `(gamma_lo/gamma_mid)^2` to `G/gamma_hi`: well
/// defined, with image containing `cover`.
fn commutator_map(lcs: &LcsQuotient, lo: usize, mid: usize, hi: usize, cover: &Subgroup, name: String) -> MapCheck {
    let q = &lcs.q;
    let dom = lcs.gamma(lo);
    let modmid = CosetGroup::new(q, lcs.gamma(mid));
    let target = CosetGroup::new(q, lcs.gamma(hi));
    // one representative per coset of gamma_mid inside gamma_lo
    let mut seen = vec![false; modmid.order()];
    let mut reps = Vec::new();
    for &g in dom.elements() {
        let c = modmid.coset_of(g) as usize;
        if !seen[c] {
            seen[c] = true;
            reps.push(g);
        }
    }
    let mut hit = vec![false; target.order()];
    let mut well_defined = true;
    let shifts = lcs.gamma(mid).generators();
    for &g in &reps {
        for &h in &reps {
            let c = target.coset_of(q.commutator(g, h));
            hit[c as usize] = true;
            for &n in shifts {
                if target.coset_of(q.commutator(q.mul(g, n), h)) != c
                    || target.coset_of(q.commutator(g, q.mul(h, n))) != c
                {
                    well_defined = false;
                }
            }
        }
    }
    let mut need: Vec<u32> = cover.elements().iter().map(|&g| target.coset_of(g)).collect();
    need.sort_unstable();
    need.dedup();
    let covered = need.iter().filter(|&&c| hit[c as usize]).count();
    MapCheck {
        name,
        status: Status::from_bool(well_defined && covered == need.len()),
        domain: reps.len() * reps.len(),
        target: need.len(),
        covered,
        well_defined,
        detail: format!("{} of {} cosets of gamma_{hi} are commutators", hit.iter().filter(|&&b| b).count(), target.order()),
    }
}

/// The two commutator maps at `m = 2`.
pub fn verify_commutator_maps(lcs: &LcsQuotient, m: u32) -> Result<Vec<MapCheck>> {
    if m != 2 {
        return Err(Error::Unsupported(format!(
            "commutator maps are checked for m = 2 only, got {m}"
        )));
    }
    let m1 = 1usize << (m - 1);
    let m2 = 1usize << (m - 2);
    let full = 1usize << m;
    let first = commutator_map(
        lcs,
        m1,
        full + 1,
        full + m1 + 1,
        lcs.kpow(m),
        format!("[gamma_{m1}, gamma_{m1}] mod gamma_{} contains K^(x{full})", full + m1 + 1),
    );
    let second = commutator_map(
        lcs,
        m1 + m2,
        full + m1 + 1,
        2 * full + 1,
        lcs.gamma(full + m1 + 1),
        format!(
            "[gamma_{0}, gamma_{0}] mod gamma_{1} contains gamma_{2}",
            m1 + m2,
            2 * full + 1,
            full + m1 + 1
        ),
    );
    Ok(vec![first, second])
}

/// `gamma_{2^m + 2^{m-1} + 1} <= K^(x2^m) <= gamma_{2^m + 1}`.
pub fn verify_sandwich(lcs: &LcsQuotient, m: u32) -> Result<Status> {
    let deep = (1usize << m) + (1usize << (m - 1)) + 1;
    if m == 0 || deep > FAITHFUL_THROUGH {
        return Err(Error::Unsupported(format!(
            "the containments are decided for m = 1, 2 only, got {m}"
        )));
    }
    let k = lcs.kpow(m);
    Ok(Status::from_bool(
        lcs.gamma(deep).is_subgroup_of(k) && k.is_subgroup_of(lcs.gamma((1 << m) + 1)),
    ))
}

/// `|G : gamma_{2^m+1}|` against the closed form, `m = 2, 3`.
pub fn verify_central_index(lcs: &LcsQuotient, m: u32) -> Result<(usize, BigUint, Status)> {
    if !(2..=3).contains(&m) {
        return Err(Error::Unsupported(format!("index checked for m = 2, 3, got {m}")));
    }
    let got = lcs.gamma((1 << m) + 1).index();
    let want = central_index_formula(m);
    Ok((got, want.clone(), Status::from_bool(BigUint::from(got) == want)))
}

/// The ball of the standard generators with the least radius `r` such that
/// it meets every coset of `gamma_{2^m+1}`. Returns `r` and one word per
/// element of the ball (taken in the working quotient).
pub fn covering_ball(lcs: &LcsQuotient, m: u32) -> Result<(usize, Vec<GeneratorWord>)> {
    let q = &lcs.q;
    let (words, imgs) = lcs.std_images()?;
    let cosets = CosetGroup::new(q, lcs.gamma((1 << m) + 1));
    let steps: Vec<u32> = imgs.iter().map(|&s| cosets.coset_of(s)).collect();
    let r = diameter(&cosets, &steps)?.diameter;
    let ball = ball_words(q, &words, |w| q.image(w), r)?;
    Ok((r, ball.into_iter().map(|(_, w)| w).collect()))
}

/// The cover-growth step: given `X` (closed under inverses here) with
/// `X gamma_{2^m+1} = G`, the least `e` with `X^{<=e} gamma_{2^{m+1}+1} = G`,
/// compared with 35.
pub fn sk_step_verify(lcs: &LcsQuotient, m: u32, x: &[GeneratorWord]) -> Result<SkReport> {
    if m < 2 {
        return Err(Error::Precondition(format!("the step needs m >= 2, got {m}")));
    }
    let deep = (1usize << (m + 1)) + 1;
    if deep > FAITHFUL_THROUGH {
        return Err(Error::Unsupported(format!(
            "G/gamma_{deep} is beyond the working quotient; m = 2 is the largest step checked"
        )));
    }
    if x.is_empty() {
        return Err(Error::Precondition("X is empty".into()));
    }
    let q = &lcs.q;
    let x = symmetric_set(x);
    let imgs = x.iter().map(|w| q.image(w)).collect::<Result<Vec<u32>>>()?;
    let (std_words, std_imgs) = lcs.std_images()?;
    let shallow = (1usize << m) + 1;
    let hyp = CosetGroup::new(q, lcs.gamma(shallow));
    check_covers(&hyp, &imgs, &std_words, &std_imgs, &format!("gamma_{shallow}"))?;
    let target = CosetGroup::new(q, lcs.gamma(deep));
    let timgs: Vec<u32> = imgs.iter().map(|&g| target.coset_of(g)).collect();
    let (e, balls, witnesses) = cover(&target, &timgs)?;
    let mut distinct = timgs.clone();
    distinct.sort_unstable();
    distinct.dedup();
    let mut report = SkReport {
        group: grig().to_string(),
        m,
        target: format!("G/gamma_{deep}"),
        target_order: target.order(),
        x_images: distinct.len(),
        x_words: x.len(),
        e,
        bound: SK_FACTORS,
        within_bound: e as u64 <= SK_FACTORS,
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

/// The absolute constant for the diameter bound: the largest diameter of
/// `G/gamma_5` over symmetric generating sets, or the diameter for the
/// standard generators if the exhaustive search is refused.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BaseConstant {
    pub value: u64,
    pub worst_case: bool,
}

pub fn base_constant(lcs: &LcsQuotient) -> Result<BaseConstant> {
    let q5 = CosetGroup::new(&lcs.q, lcs.gamma(5));
    if q5.order() <= WORST_CASE_CAP {
        return Ok(BaseConstant {
            value: worst_case_diameter(&q5)? as u64,
            worst_case: true,
        });
    }
    let (_, imgs) = lcs.std_images()?;
    let steps: Vec<u32> = imgs.iter().map(|&s| q5.coset_of(s)).collect();
    Ok(BaseConstant {
        value: diameter(&q5, &steps)?.diameter as u64,
        worst_case: false,
    })
}

/// Bound on the diameter of `G/gamma_n`: the base constant when `n <= 5`,
/// else `35^{m-2}` times it with `2^{m-1} + 1 < n <= 2^m + 1`.
pub fn diameter_bound(n: u64, base: u64) -> BigUint {
    if n <= 5 {
        return BigUint::from(base);
    }
    let mut m = 2u32;
    while (1u128 << m) + 1 < n as u128 {
        m += 1;
    }
    BigUint::from(base) * BigUint::from(SK_FACTORS).pow(m - 2)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::wreath::{decompose, is_identity};
    use std::sync::OnceLock;

    fn lcs() -> &'static LcsQuotient {
        static L: OnceLock<LcsQuotient> = OnceLock::new();
        L.get_or_init(|| LcsQuotient::build(&EnumerateOptions::default()).unwrap())
    }

    fn same(a: &Element, b: &Element) -> bool {
        a.mul(&b.inverse()).is_identity().unwrap()
    }

    #[test]
    fn x_sections() {
        let s = decompose(&x());
        assert!(s.root_is_trivial());
        assert_eq!(s.children, vec![word("ca"), word("ac")]);
    }

    #[test]
    fn relations_hold() {
        for (name, rel) in relations() {
            for n in 0..=10 {
                assert!(relation_holds(grig(), &rel, n, 1 << 24).unwrap().0, "{name} at {n}");
                assert!(letters_in_stab(grig(), &rel, n), "{name} at {n}");
            }
        }
        assert!(!relation_holds(grig(), &[(Gen::B, 1), (Gen::C, 1)], 3, 1 << 24).unwrap().0);
    }

    #[test]
    fn bold_maps_have_the_right_sections() {
        let zero = ConjugateForm::x_power(1).bold_zero().to_word();
        let one = ConjugateForm::x_power(1).bold_one().to_word();
        let s0 = decompose(&zero);
        assert!(s0.root_is_trivial());
        assert!(is_identity(&s0.children[0].mul(&x().inverse())).unwrap());
        assert!(is_identity(&s0.children[1]).unwrap());
        let s1 = decompose(&one);
        assert!(is_identity(&s1.children[0].mul(&x().inverse())).unwrap());
        assert!(is_identity(&s1.children[1].mul(&x())).unwrap());
    }

    #[test]
    fn embedded_words_match_tuples() {
        for n in 0..=3 {
            for q in DegreeQuery::all(n) {
                let w = q.branch_embed();
                assert!(same(&Element::Word(w), &q.element()), "{}", q.label());
            }
        }
        assert_eq!(DegreeQuery::new(DegreeBase::X, &[]).branch_embed(), x());
    }

    #[test]
    fn branch_vectors() {
        let v = BranchVector::new(2, &[1, 0, 3, 2]).unwrap();
        assert!(same(&Element::Word(v.to_word()), &v.element()));
        let (perm, secs) = crate::wreath::sections_at_level(&v.to_word(), 2);
        assert_eq!(perm, vec![0, 1, 2, 3]);
        for (s, e) in secs.iter().zip([1, 0, 3, 2]) {
            assert!(is_identity(&s.mul(&x().pow(-e))).unwrap());
        }
        assert!(BranchVector::new(1, &[1]).is_err());
    }

    #[test]
    fn formula_values() {
        let f = |base, bits: &[bool]| degree_formula(&DegreeQuery::new(base, bits));
        assert_eq!(f(DegreeBase::X, &[]), 2);
        assert_eq!(f(DegreeBase::X, &[false]), 3);
        assert_eq!(f(DegreeBase::X, &[true]), 4);
        assert_eq!(f(DegreeBase::X2, &[true, false]), 10);
    }

    #[test]
    fn commutator_identities_hold() {
        for idx in 1..=3 {
            for n in 0..=8 {
                assert!(verify_commutator_identity(idx, n).unwrap(), "identity {idx} at level {n}");
            }
            assert!(commutator_identity_exact(idx).unwrap());
        }
        assert!(commutator_identity(5).is_err());
    }

    #[test]
    fn fourth_identity_as_written_breaks_at_level_five() {
        for n in 0..=4 {
            assert!(verify_commutator_identity(4, n).unwrap());
        }
        for n in 5..=8 {
            assert!(!verify_commutator_identity(4, n).unwrap());
        }
        assert!(!commutator_identity_exact(4).unwrap());
        // the commutator is (x^-1, x, x, x^-1)
        let g = grig();
        let (lhs, _) = commutator_identity(4).unwrap();
        let xw = Element::Word(x());
        let xi = xw.inverse();
        let exact = Element::branch(g, 2, vec![xi.clone(), xw.clone(), xw, xi]);
        assert!(same(&lhs, &exact));
    }

    #[test]
    fn perturbed_identity_fails() {
        let g = grig();
        let (lhs, _) = commutator_identity(1).unwrap();
        let xw = Element::Word(x());
        let one = Element::identity(g);
        let wrong = Element::branch(g, 2, vec![xw, one.clone(), one.clone(), one]);
        assert!(!sides_agree(&lhs, &wrong, 6).unwrap());
        assert!(!lhs.mul(&wrong.inverse()).is_identity().unwrap());
    }

    #[test]
    fn lcs_indices() {
        let l = lcs();
        assert_eq!(l.gamma(5).index(), 256);
        assert_eq!(l.gamma(9).index(), 1 << 14);
        for m in 2..=3 {
            assert_eq!(verify_central_index(l, m).unwrap().2, Status::VerifiedExhaustive);
        }
        // K^(x8) is trivial in the working quotient
        assert!(l.kpow(3).is_trivial());
        assert_eq!(l.kpow(0).index(), 16);
    }

    #[test]
    fn degree_of_x() {
        let l = lcs();
        assert_eq!(l.degree(l.quotient().image(&x()).unwrap()), Degree::Exact(2));
        assert_eq!(l.degree(0), Degree::AtLeast(FAITHFUL_THROUGH));
        let c = verify_degree(l, &DegreeQuery::new(DegreeBase::X, &[false])).unwrap();
        assert_eq!(c.measured, Degree::Exact(3));
    }

    #[test]
    fn degrees_never_contradict() {
        let l = lcs();
        for n in 0..=3 {
            for q in DegreeQuery::all(n) {
                let c = verify_degree(l, &q).unwrap();
                assert_ne!(c.status, Status::Failed, "{c:?}");
                if c.formula <= 8 {
                    assert_eq!(c.status, Status::VerifiedExhaustive, "{c:?}");
                }
            }
        }
    }

    #[test]
    fn degree_estimates_hold() {
        let l = lcs();
        for n in 2..=3 {
            for est in degree_estimates(n) {
                let (d, s) = verify_degree_estimate(l, &est).unwrap();
                assert_ne!(s, Status::Failed, "{est:?} measured {d:?}");
            }
        }
        // at n = 2 every estimate is decided
        for est in degree_estimates(2) {
            assert_eq!(verify_degree_estimate(l, &est).unwrap().1, Status::VerifiedExhaustive);
        }
    }

    #[test]
    fn sandwich() {
        for m in 1..=2 {
            assert_eq!(verify_sandwich(lcs(), m).unwrap(), Status::VerifiedExhaustive);
        }
        assert!(verify_sandwich(lcs(), 3).is_err());
    }

    #[test]
    fn squaring_is_onto() {
        for m in 1..=3 {
            let c = verify_squaring(lcs(), m).unwrap();
            assert_eq!(c.status, Status::VerifiedExhaustive, "{c:?}");
        }
        // the identity squares to the identity coset
        let q = lcs().quotient();
        assert_eq!(q.mul(0, 0), 0);
    }

    #[test]
    fn commutator_maps() {
        for c in verify_commutator_maps(lcs(), 2).unwrap() {
            assert_eq!(c.status, Status::VerifiedExhaustive, "{c:?}");
        }
    }

    #[test]
    fn sk_step() {
        let l = lcs();
        let (r, x) = covering_ball(l, 2).unwrap();
        assert!(r > 0);
        let rep = sk_step_verify(l, 2, &x).unwrap();
        assert_eq!(rep.target_order, 1 << 14);
        assert!(rep.within_bound, "e = {}", rep.e);
        // witnesses land in the right cosets
        let target = CosetGroup::new(l.quotient(), l.gamma(9));
        for t in (0..rep.target_order).step_by(97) {
            let img = l.quotient().image(&rep.witness_word(t)).unwrap();
            assert_eq!(target.coset_of(img) as usize, t);
        }
    }

    #[test]
    fn sk_step_trivial_cases() {
        let l = lcs();
        let id = GeneratorWord::identity(grig());
        assert!(matches!(sk_step_verify(l, 2, &[id]), Err(Error::Precondition(_))));
        // X covering G/gamma_9 already
        let (words, _) = l.std_images().unwrap();
        let target = CosetGroup::new(l.quotient(), l.gamma(9));
        let all = ball_words(l.quotient(), &words, |w| l.quotient().image(w), 64).unwrap();
        let mut seen = vec![false; target.order()];
        let mut x = Vec::new();
        for (e, w) in all {
            let c = target.coset_of(e) as usize;
            if !seen[c] {
                seen[c] = true;
                x.push(w);
            }
        }
        assert_eq!(sk_step_verify(l, 2, &x).unwrap().e, 1);
    }

    #[test]
    fn diameter_bounds() {
        assert_eq!(diameter_bound(5, 7), BigUint::from(7u8));
        assert_eq!(diameter_bound(9, 7), BigUint::from(7u32 * 35));
        assert_eq!(diameter_bound(10, 7), BigUint::from(7u32 * 35 * 35));
        let mut prev = BigUint::from(0u8);
        for n in 1..100 {
            let b = diameter_bound(n, 7);
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn stab_bound_values() {
        assert_eq!(stab_index_bound(1), BigUint::from(4u8));
        assert_eq!(stab_index_bound(3), BigUint::from(32u8));
    }
}
