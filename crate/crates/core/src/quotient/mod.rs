//! Finite quotients of the two families, enumerated as images of the wreath
//! recursion.
//!
//! Two kinds of quotient are supported. `G/Stab(n)` records the action on
//! level `n`. `G/K^(xp^m)` records the action on level `m` together with the
//! class modulo `K` of the section at every level-`m` vertex, where
//! `G/K` is `D8 x C2` (Grigorchuk) or `C_p x C_p` (Gupta-Sidki).

pub mod cache;
pub mod diameter;
pub mod group;

use std::fmt;
use std::sync::{Arc, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::error::{Error, Result};
use crate::words::{symmetrize, Family, Gen, GeneratorWord, GroupSpec};
use crate::wreath::{level_permutation_capped, sections_at_level, Element};

pub use diameter::{diameter, quotient_diameter, worst_case_diameter, DiameterReport, WORST_CASE_CAP};
pub use group::{
    commutator_subgroup, lower_central_series, normal_closure, product, CosetGroup, FiniteGroup,
    Subgroup, TableGroup,
};

pub const DEFAULT_MAX_ELEMENTS: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QuotientKind {
    /// `G/Stab(n)`.
    LevelStabilizer(u32),
    /// `G/K^(xp^m)`.
    BranchPower(u32),
}

impl QuotientKind {
    pub fn depth(&self) -> u32 {
        match *self {
            QuotientKind::LevelStabilizer(n) | QuotientKind::BranchPower(n) => n,
        }
    }
}

impl fmt::Display for QuotientKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            QuotientKind::LevelStabilizer(n) => write!(f, "stab({n})"),
            QuotientKind::BranchPower(m) => write!(f, "kpow({m})"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerateOptions {
    pub max_elements: usize,
    pub max_leaves: u64,
}

impl Default for EnumerateOptions {
    fn default() -> Self {
        EnumerateOptions {
            max_elements: DEFAULT_MAX_ELEMENTS,
            max_leaves: crate::wreath::DEFAULT_LEAF_CAP,
        }
    }
}

/// The finite group `G/K` with the images of the generators.
#[derive(Debug, Clone)]
pub struct LabelGroup {
    table: TableGroup,
    gen_image: [u32; 4],
}

impl LabelGroup {
    pub fn for_group(group: GroupSpec) -> LabelGroup {
        match group.family() {
            Family::Grigorchuk => {
                // D8 on the square {0,1,2,3}, C2 on {4,5}
                let a = vec![0, 3, 2, 1, 4, 5];
                let rho = [1u32, 2, 3, 0, 4, 5];
                let d: Vec<u32> = a.iter().map(|&x| rho[x as usize]).collect();
                let b = vec![0, 1, 2, 3, 5, 4];
                let c: Vec<u32> = b.iter().map(|&x| d[x as usize]).collect();
                let (table, idx) = TableGroup::from_permutations(&[a, b, c, d]);
                LabelGroup {
                    table,
                    gen_image: [idx[0], idx[1], idx[2], idx[3]],
                }
            }
            Family::GuptaSidki => {
                let p = group.prime();
                let mut a: Vec<u32> = (0..2 * p).collect();
                let mut b = a.clone();
                for i in 0..p {
                    a[i as usize] = (i + 1) % p;
                    b[(p + i) as usize] = p + (i + 1) % p;
                }
                let (table, idx) = TableGroup::from_permutations(&[a, b]);
                LabelGroup {
                    table,
                    gen_image: [idx[0], idx[1], 0, 0],
                }
            }
        }
    }

    pub fn table(&self) -> &TableGroup {
        &self.table
    }

    pub fn order(&self) -> usize {
        self.table.order()
    }

    pub fn generator_image(&self, g: Gen) -> u32 {
        self.gen_image[g as usize]
    }

    pub fn image_of_word(&self, w: &GeneratorWord) -> u32 {
        let mut acc = 0;
        for l in w.letters() {
            let g = self.generator_image(l.gen);
            let e = l.exp.rem_euclid(w.group().prime() as i32) as u64;
            acc = self.table.mul(acc, self.table.pow(g, e));
        }
        acc
    }
}

type Digits = SmallVec<[u32; 128]>;
type Packed = SmallVec<[u64; 8]>;

/// Packing of quotient elements: `points` permutation digits followed, for
/// branch-power quotients, by `points` section labels.
#[derive(Debug, Clone)]
pub(crate) struct Codec {
    pub(crate) points: usize,
    pub(crate) labels: Option<Arc<LabelGroup>>,
    pub(crate) digits: usize,
    bits: u32,
    per_word: usize,
    pub(crate) words: usize,
}

impl Codec {
    fn new(points: usize, labels: Option<Arc<LabelGroup>>) -> Codec {
        let range = labels.as_ref().map_or(points, |l| points.max(l.order()));
        let bits = (usize::BITS - (range.max(2) - 1).leading_zeros()).max(1);
        let digits = if labels.is_some() { 2 * points } else { points };
        let per_word = (64 / bits) as usize;
        Codec {
            points,
            labels,
            digits,
            bits,
            per_word,
            words: digits.div_ceil(per_word),
        }
    }

    fn encode(&self, d: &[u32], out: &mut [u64]) {
        out.iter_mut().for_each(|w| *w = 0);
        for (i, &v) in d.iter().enumerate() {
            out[i / self.per_word] |= (v as u64) << ((i % self.per_word) as u32 * self.bits);
        }
    }

    fn decode(&self, packed: &[u64], out: &mut Digits) {
        out.clear();
        let mask = (1u64 << self.bits) - 1;
        for i in 0..self.digits {
            let w = packed[i / self.per_word];
            out.push(((w >> ((i % self.per_word) as u32 * self.bits)) & mask) as u32);
        }
    }

    /// `u` followed by `v`.
    fn compose(&self, u: &[u32], v: &[u32], out: &mut Digits) {
        out.clear();
        let n = self.points;
        for x in 0..n {
            out.push(v[u[x] as usize]);
        }
        if let Some(l) = &self.labels {
            let t = l.table();
            for x in 0..n {
                out.push(t.mul(u[n + x], v[n + u[x] as usize]));
            }
        }
    }

    fn invert(&self, u: &[u32], out: &mut Digits) {
        out.clear();
        out.resize(self.digits, 0);
        let n = self.points;
        for x in 0..n {
            out[u[x] as usize] = x as u32;
        }
        if let Some(l) = &self.labels {
            for x in 0..n {
                out[n + u[x] as usize] = l.table().inv(u[n + x]);
            }
        }
    }

    fn identity(&self) -> Digits {
        let mut d: Digits = (0..self.points as u32).collect();
        if self.labels.is_some() {
            d.extend(std::iter::repeat_n(0, self.points));
        }
        d
    }
}

fn hash_words(w: &[u64]) -> u64 {
    let mut h: u64 = 0x9e37_79b9_7f4a_7c15;
    for &x in w {
        h ^= x;
        h = h.wrapping_mul(0xbf58_476d_1ce4_e5b9);
        h ^= h >> 31;
    }
    h.wrapping_mul(0x94d0_49bb_1331_11eb) ^ (h >> 29)
}

/// Open-addressing hash index from packed elements to element numbers.
#[derive(Debug, Clone)]
pub(crate) struct PackedIndex {
    slots: Vec<u32>,
    len: usize,
}

const EMPTY: u32 = u32::MAX;

impl PackedIndex {
    fn with_capacity(n: usize) -> PackedIndex {
        let cap = (2 * n.max(8)).next_power_of_two();
        PackedIndex {
            slots: vec![EMPTY; cap],
            len: 0,
        }
    }

    fn find(&self, data: &[u64], words: usize, key: &[u64]) -> Option<u32> {
        let mask = self.slots.len() - 1;
        let mut i = hash_words(key) as usize & mask;
        loop {
            let s = self.slots[i];
            if s == EMPTY {
                return None;
            }
            let off = s as usize * words;
            if &data[off..off + words] == key {
                return Some(s);
            }
            i = (i + 1) & mask;
        }
    }

    fn insert(&mut self, data: &[u64], words: usize, id: u32) {
        if 2 * (self.len + 1) > self.slots.len() {
            self.grow(data, words);
        }
        self.place(data, words, id);
        self.len += 1;
    }

    fn place(&mut self, data: &[u64], words: usize, id: u32) {
        let mask = self.slots.len() - 1;
        let off = id as usize * words;
        let mut i = hash_words(&data[off..off + words]) as usize & mask;
        while self.slots[i] != EMPTY {
            i = (i + 1) & mask;
        }
        self.slots[i] = id;
    }

    fn grow(&mut self, data: &[u64], words: usize) {
        let doubled = vec![EMPTY; self.slots.len() * 2];
        let old = std::mem::replace(&mut self.slots, doubled);
        for id in old.into_iter().filter(|&s| s != EMPTY) {
            self.place(data, words, id);
        }
    }

    fn rebuild(data: &[u64], words: usize) -> PackedIndex {
        let n = data.len() / words;
        let mut idx = PackedIndex::with_capacity(n);
        for id in 0..n as u32 {
            idx.place(data, words, id);
        }
        idx.len = n;
        idx
    }
}

/// An enumerated finite quotient: element table, hash index, generator
/// images and right-multiplication table by the generators.
#[derive(Debug)]
pub struct FiniteQuotient {
    group: GroupSpec,
    kind: QuotientKind,
    codec: Codec,
    data: Vec<u64>,
    index: PackedIndex,
    gen_words: Vec<GeneratorWord>,
    gen_elems: Vec<u32>,
    gen_set: Vec<u32>,
    mul_gen: Vec<u32>,
    spheres: Vec<usize>,
    inverse: OnceLock<Vec<u32>>,
}

fn codec_for(group: GroupSpec, kind: QuotientKind, opts: &EnumerateOptions) -> Result<Codec> {
    let p = group.arity() as u64;
    let n = kind.depth();
    let points = p.checked_pow(n).unwrap_or(u64::MAX);
    if points > opts.max_leaves || points > u32::MAX as u64 {
        return Err(Error::MemoryGuard {
            points,
            cap: opts.max_leaves,
        });
    }
    let labels = match kind {
        QuotientKind::LevelStabilizer(_) => None,
        QuotientKind::BranchPower(_) => Some(Arc::new(LabelGroup::for_group(group))),
    };
    Ok(Codec::new(points as usize, labels))
}

fn digits_of_word(codec: &Codec, kind: QuotientKind, w: &GeneratorWord, cap: u64) -> Result<Digits> {
    match kind {
        QuotientKind::LevelStabilizer(n) => {
            let lp = level_permutation_capped(w, n, cap)?;
            Ok(lp.images().iter().copied().collect())
        }
        QuotientKind::BranchPower(m) => {
            let (perm, secs) = sections_at_level(w, m);
            let labels = codec.labels.as_ref().expect("branch-power codec has labels");
            let mut d: Digits = perm.into_iter().collect();
            d.extend(secs.iter().map(|s| labels.image_of_word(s)));
            Ok(d)
        }
    }
}

impl FiniteQuotient {
    /// Breadth-first closure of the images of `gens` (symmetrized) in the
    /// quotient of the given kind. Each new layer is numbered in packed
    /// order, so the numbering does not depend on thread count.
    pub fn enumerate(
        group: GroupSpec,
        gens: &[GeneratorWord],
        kind: QuotientKind,
        opts: &EnumerateOptions,
    ) -> Result<FiniteQuotient> {
        let codec = codec_for(group, kind, opts)?;
        let gen_words = prepare_generators(group, gens)?;
        let w = codec.words;
        let gen_digits: Vec<Digits> = gen_words
            .iter()
            .map(|g| digits_of_word(&codec, kind, g, opts.max_leaves))
            .collect::<Result<_>>()?;
        let ng = gen_words.len();

        let mut data = vec![0u64; w];
        codec.encode(&codec.identity(), &mut data[..w]);
        let mut index = PackedIndex::with_capacity(1024);
        index.insert(&data, w, 0);
        let mut mul_gen: Vec<u32> = Vec::new();
        let mut spheres = vec![1usize];
        let mut start = 0usize;
        let mut end = 1usize;

        while start < end {
            let prods = layer_products(&codec, &data[start * w..end * w], &gen_digits);
            let found: Vec<u32> = prods
                .par_chunks(w)
                .map(|k| index.find(&data, w, k).unwrap_or(EMPTY))
                .collect();
            let mut fresh: Vec<usize> = (0..found.len()).filter(|&i| found[i] == EMPTY).collect();
            fresh.par_sort_unstable_by(|&i, &j| prods[i * w..(i + 1) * w].cmp(&prods[j * w..(j + 1) * w]));
            fresh.dedup_by(|i, j| prods[*i * w..(*i + 1) * w] == prods[*j * w..(*j + 1) * w]);
            let total = end + fresh.len();
            if total > opts.max_elements {
                return Err(Error::PartialEnumeration {
                    reached: total,
                    cap: opts.max_elements,
                });
            }
            for &i in &fresh {
                let id = data.len() / w;
                data.extend_from_slice(&prods[i * w..(i + 1) * w]);
                index.insert(&data, w, id as u32);
            }
            let resolved: Vec<u32> = found
                .par_iter()
                .enumerate()
                .map(|(i, &f)| {
                    if f != EMPTY {
                        f
                    } else {
                        index.find(&data, w, &prods[i * w..(i + 1) * w]).expect("just inserted")
                    }
                })
                .collect();
            mul_gen.extend_from_slice(&resolved);
            if !fresh.is_empty() {
                spheres.push(fresh.len());
            }
            start = end;
            end = total;
        }
        debug_assert_eq!(mul_gen.len(), end * ng);

        let gen_elems: Vec<u32> = (0..ng).map(|s| mul_gen[s]).collect();
        Ok(Self::assemble(
            group, kind, codec, data, index, gen_words, gen_elems, mul_gen, spheres,
        ))
    }

    #[allow(clippy::too_many_arguments)]
    fn assemble(
        group: GroupSpec,
        kind: QuotientKind,
        codec: Codec,
        data: Vec<u64>,
        index: PackedIndex,
        gen_words: Vec<GeneratorWord>,
        gen_elems: Vec<u32>,
        mul_gen: Vec<u32>,
        spheres: Vec<usize>,
    ) -> FiniteQuotient {
        let mut gen_set = Vec::new();
        for &g in &gen_elems {
            if g != 0 && !gen_set.contains(&g) {
                gen_set.push(g);
            }
        }
        FiniteQuotient {
            group,
            kind,
            codec,
            data,
            index,
            gen_words,
            gen_elems,
            gen_set,
            mul_gen,
            spheres,
            inverse: OnceLock::new(),
        }
    }

    /// Rebuilds a quotient from a stored element table.
    pub(crate) fn from_table(
        group: GroupSpec,
        kind: QuotientKind,
        gens: &[GeneratorWord],
        data: Vec<u64>,
        spheres: Vec<usize>,
        opts: &EnumerateOptions,
    ) -> Result<FiniteQuotient> {
        let codec = codec_for(group, kind, opts)?;
        let gen_words = prepare_generators(group, gens)?;
        let w = codec.words;
        if !data.len().is_multiple_of(w) || data.is_empty() {
            return Err(Error::Inconsistent("stored table has the wrong width".into()));
        }
        let index = PackedIndex::rebuild(&data, w);
        let gen_digits: Vec<Digits> = gen_words
            .iter()
            .map(|g| digits_of_word(&codec, kind, g, opts.max_leaves))
            .collect::<Result<_>>()?;
        let prods = layer_products(&codec, &data, &gen_digits);
        let mul_gen: Vec<u32> = prods
            .par_chunks(w)
            .map(|k| index.find(&data, w, k).unwrap_or(EMPTY))
            .collect();
        if mul_gen.contains(&EMPTY) {
            return Err(Error::Inconsistent("stored table is not closed".into()));
        }
        let ng = gen_words.len();
        let gen_elems: Vec<u32> = (0..ng).map(|s| mul_gen[s]).collect();
        Ok(Self::assemble(
            group, kind, codec, data, index, gen_words, gen_elems, mul_gen, spheres,
        ))
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn kind(&self) -> QuotientKind {
        self.kind
    }

    /// The symmetrized generator words used for the enumeration.
    pub fn generator_words(&self) -> &[GeneratorWord] {
        &self.gen_words
    }

    /// Element numbers of the generator words, in the same order.
    pub fn generator_elements(&self) -> &[u32] {
        &self.gen_elems
    }

    /// `g * s` where `s` is the position of a generator word.
    pub fn mul_gen(&self, g: u32, s: usize) -> u32 {
        self.mul_gen[g as usize * self.gen_elems.len() + s]
    }

    /// Sizes of the spheres around the identity for the generator words.
    pub fn spheres(&self) -> &[usize] {
        &self.spheres
    }

    pub(crate) fn packed_table(&self) -> &[u64] {
        &self.data
    }

    pub(crate) fn words_per_element(&self) -> usize {
        self.codec.words
    }

    fn packed(&self, g: u32) -> &[u64] {
        let w = self.codec.words;
        &self.data[g as usize * w..(g as usize + 1) * w]
    }

    /// Permutation digits followed (for branch-power quotients) by section
    /// labels in `G/K`.
    pub fn digits(&self, g: u32) -> Vec<u32> {
        let mut d = Digits::new();
        self.codec.decode(self.packed(g), &mut d);
        d.into_vec()
    }

    /// The level permutation carried by an element.
    pub fn level_permutation(&self, g: u32) -> crate::wreath::LevelPermutation {
        let d = self.digits(g);
        crate::wreath::LevelPermutation::from_images(
            self.group.prime(),
            self.kind.depth(),
            d[..self.codec.points].to_vec(),
        )
        .expect("stored permutations are bijections")
    }

    pub fn label_group(&self) -> Option<&LabelGroup> {
        self.codec.labels.as_deref()
    }

    fn lookup_digits(&self, d: &[u32]) -> Option<u32> {
        let mut key: Packed = SmallVec::from_elem(0, self.codec.words);
        self.codec.encode(d, &mut key);
        self.index.find(&self.data, self.codec.words, &key)
    }

    /// Element number of the image of a word.
    pub fn image(&self, w: &GeneratorWord) -> Result<u32> {
        if w.group() != self.group {
            return Err(Error::InvalidRequest(format!(
                "word from {} used in a quotient of {}",
                w.group(),
                self.group
            )));
        }
        let d = digits_of_word(&self.codec, self.kind, w, u64::MAX)?;
        self.lookup_digits(&d).ok_or_else(|| {
            Error::Inconsistent(format!("image of {w} is not in the enumerated {} quotient", self.kind))
        })
    }

    /// Element number of the image of a tuple-built element. Branch-power
    /// quotients need the sections at the quotient depth to be words.
    pub fn image_of_element(&self, e: &Element) -> Result<u32> {
        if let Some(w) = e.as_word() {
            return self.image(w);
        }
        let d: Digits = match self.kind {
            QuotientKind::LevelStabilizer(n) => {
                e.level_permutation(n)?.images().iter().copied().collect()
            }
            QuotientKind::BranchPower(m) => {
                let (perm, secs) = e.sections_at_level(m);
                let labels = self.codec.labels.as_ref().expect("labels");
                let mut d: Digits = perm.into_iter().collect();
                for s in &secs {
                    let w = s.as_word().ok_or_else(|| {
                        Error::Unsupported(format!(
                            "element has tuple sections below level {m}; write it as a word first"
                        ))
                    })?;
                    d.push(labels.image_of_word(w));
                }
                d
            }
        };
        self.lookup_digits(&d).ok_or_else(|| {
            Error::Inconsistent(format!("element image is not in the enumerated {} quotient", self.kind))
        })
    }

    /// Closure of the images of some words.
    pub fn subgroup_image(&self, subgens: &[GeneratorWord]) -> Result<Subgroup> {
        let imgs = subgens
            .iter()
            .map(|w| self.image(w))
            .collect::<Result<Vec<u32>>>()?;
        Ok(Subgroup::generated(self, &imgs))
    }

    /// Normal closure of the images of some words.
    pub fn normal_closure_of(&self, words: &[GeneratorWord]) -> Result<Subgroup> {
        Ok(self.subgroup_image(words)?.normal_closure(self))
    }

    fn inverse_table(&self) -> &[u32] {
        self.inverse.get_or_init(|| {
            (0..self.order() as u32)
                .into_par_iter()
                .map(|g| {
                    let mut d = Digits::new();
                    let mut o = Digits::new();
                    self.codec.decode(self.packed(g), &mut d);
                    self.codec.invert(&d, &mut o);
                    self.lookup_digits(&o).expect("quotient is closed under inverses")
                })
                .collect()
        })
    }
}

impl FiniteGroup for FiniteQuotient {
    fn order(&self) -> usize {
        self.data.len() / self.codec.words
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        let mut u = Digits::new();
        let mut v = Digits::new();
        let mut o = Digits::new();
        self.codec.decode(self.packed(a), &mut u);
        self.codec.decode(self.packed(b), &mut v);
        self.codec.compose(&u, &v, &mut o);
        self.lookup_digits(&o).expect("quotient is closed under products")
    }

    fn inv(&self, a: u32) -> u32 {
        self.inverse_table()[a as usize]
    }

    fn generators(&self) -> &[u32] {
        &self.gen_set
    }
}

fn prepare_generators(group: GroupSpec, gens: &[GeneratorWord]) -> Result<Vec<GeneratorWord>> {
    if let Some(w) = gens.iter().find(|w| w.group() != group) {
        return Err(Error::InvalidRequest(format!("generator {w} is not a word of {group}")));
    }
    let gens = if gens.is_empty() {
        group.standard_generators()
    } else {
        gens.to_vec()
    };
    Ok(symmetrize(&gens))
}

fn layer_products(codec: &Codec, layer: &[u64], gens: &[Digits]) -> Vec<u64> {
    let w = codec.words;
    let ng = gens.len();
    let mut out = vec![0u64; layer.len() * ng];
    out.par_chunks_mut(ng * w)
        .zip(layer.par_chunks(w))
        .for_each(|(dst, src)| {
            let mut u = Digits::new();
            let mut o = Digits::new();
            codec.decode(src, &mut u);
            for (s, g) in gens.iter().enumerate() {
                codec.compose(&u, g, &mut o);
                codec.encode(&o, &mut dst[s * w..(s + 1) * w]);
            }
        });
    out
}

/// Orders or indices computed at consecutive levels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct StabilizationReport {
    pub quantity: String,
    pub values: Vec<(u32, u64)>,
    pub stabilized: bool,
    pub stable_value: Option<u64>,
}

/// Evaluates `f` at levels `n_min..=n_max`, stopping early on an error.
/// The last two values must agree for the report to count as stabilized.
pub fn stabilize<F>(quantity: &str, n_min: u32, n_max: u32, mut f: F) -> StabilizationReport
where
    F: FnMut(u32) -> Result<u64>,
{
    let mut values = Vec::new();
    for n in n_min..=n_max {
        match f(n) {
            Ok(v) => values.push((n, v)),
            Err(_) => break,
        }
    }
    let stabilized = values.len() >= 2 && values[values.len() - 1].1 == values[values.len() - 2].1;
    StabilizationReport {
        quantity: quantity.to_string(),
        stable_value: stabilized.then(|| values[values.len() - 1].1),
        values,
        stabilized,
    }
}

/// Index of the (normal closure of the) image of `subgens` in `G/Stab(n)`
/// for `n` in a range of levels.
pub fn stabilized_index(
    group: GroupSpec,
    subgens: &[GeneratorWord],
    normal: bool,
    n_min: u32,
    n_max: u32,
    opts: &EnumerateOptions,
) -> StabilizationReport {
    let name = format!(
        "index of {}<{}>",
        if normal { "normal closure of " } else { "" },
        subgens.iter().map(|w| w.to_string()).collect::<Vec<_>>().join(",")
    );
    stabilize(&name, n_min, n_max, |n| {
        let q = FiniteQuotient::enumerate(group, &[], QuotientKind::LevelStabilizer(n), opts)?;
        let h = if normal {
            q.normal_closure_of(subgens)?
        } else {
            q.subgroup_image(subgens)?
        };
        Ok(h.index() as u64)
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grig(s: &str) -> GeneratorWord {
        GeneratorWord::parse(GroupSpec::grigorchuk(), s).unwrap()
    }

    fn enumerate(group: GroupSpec, kind: QuotientKind) -> FiniteQuotient {
        FiniteQuotient::enumerate(group, &[], kind, &EnumerateOptions::default()).unwrap()
    }

    #[test]
    fn label_groups() {
        let l = LabelGroup::for_group(GroupSpec::grigorchuk());
        assert_eq!(l.order(), 16);
        assert_eq!(l.image_of_word(&grig("abab")), 0);
        let l = LabelGroup::for_group(GroupSpec::gupta_sidki(5).unwrap());
        assert_eq!(l.order(), 25);
    }

    #[test]
    fn small_grigorchuk_orders() {
        let g = GroupSpec::grigorchuk();
        let orders: Vec<usize> = (1..=4)
            .map(|n| enumerate(g, QuotientKind::LevelStabilizer(n)).order())
            .collect();
        assert_eq!(orders, vec![2, 8, 128, 4096]);
    }

    #[test]
    fn codec_round_trip() {
        let g = GroupSpec::gupta_sidki(3).unwrap();
        let q = enumerate(g, QuotientKind::BranchPower(1));
        assert_eq!(q.order(), 81);
        for e in 0..q.order() as u32 {
            let d = q.digits(e);
            assert_eq!(q.lookup_digits(&d), Some(e));
        }
    }

    #[test]
    fn products_agree_with_words() {
        let g = GroupSpec::grigorchuk();
        let q = enumerate(g, QuotientKind::BranchPower(1));
        let words = ["abac", "dabacab", "ad", "cabadab"];
        for u in words {
            for v in words {
                let (u, v) = (grig(u), grig(v));
                assert_eq!(
                    q.mul(q.image(&u).unwrap(), q.image(&v).unwrap()),
                    q.image(&u.mul(&v)).unwrap()
                );
                assert_eq!(q.inv(q.image(&u).unwrap()), q.image(&u.inverse()).unwrap());
            }
        }
    }

    #[test]
    fn numbering_is_deterministic() {
        let g = GroupSpec::grigorchuk();
        let a = enumerate(g, QuotientKind::LevelStabilizer(3));
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| enumerate(g, QuotientKind::LevelStabilizer(3)));
        assert_eq!(a.packed_table(), b.packed_table());
        // generator order changes numbering but not the order
        let gens = vec![grig("d"), grig("c"), grig("b"), grig("a")];
        let c = FiniteQuotient::enumerate(g, &gens, QuotientKind::LevelStabilizer(3), &EnumerateOptions::default())
            .unwrap();
        assert_eq!(c.order(), a.order());
    }

    #[test]
    fn caps() {
        let g = GroupSpec::grigorchuk();
        let opts = EnumerateOptions {
            max_elements: 100,
            ..Default::default()
        };
        assert!(matches!(
            FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(3), &opts),
            Err(Error::PartialEnumeration { cap: 100, .. })
        ));
        let opts = EnumerateOptions {
            max_leaves: 4,
            ..Default::default()
        };
        assert!(matches!(
            FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(3), &opts),
            Err(Error::MemoryGuard { .. })
        ));
    }

    #[test]
    fn wrong_level_image_is_inconsistent() {
        let g = GroupSpec::grigorchuk();
        let q = FiniteQuotient::enumerate(g, &[grig("b")], QuotientKind::LevelStabilizer(2), &EnumerateOptions::default())
            .unwrap();
        assert!(matches!(q.image(&grig("a")), Err(Error::Inconsistent(_))));
    }

    #[test]
    fn identity_subgroup_index() {
        let q = enumerate(GroupSpec::grigorchuk(), QuotientKind::LevelStabilizer(3));
        let h = q.subgroup_image(&[GeneratorWord::identity(GroupSpec::grigorchuk())]).unwrap();
        assert_eq!(h.index(), q.order());
    }

    #[test]
    fn k_index_stabilizes() {
        let g = GroupSpec::grigorchuk();
        let r = stabilized_index(g, &[grig("abab")], true, 2, 4, &EnumerateOptions::default());
        assert!(r.stabilized);
        assert_eq!(r.stable_value, Some(16));
        let all = stabilized_index(g, &g.standard_generators(), false, 1, 3, &EnumerateOptions::default());
        assert!(all.values.iter().all(|&(_, v)| v == 1));
        let gs = GroupSpec::gupta_sidki(3).unwrap();
        let r = stabilized_index(gs, &[GeneratorWord::parse(gs, "[a,b]").unwrap()], true, 1, 3, &EnumerateOptions::default());
        assert_eq!(r.stable_value, Some(9));
    }
}
