//! Generator alphabets, run-length encoded words, reduction by the defining
//! relations, and the word grammar used by the CLI and report files.
//!
//! Grammar: letters `a b c d`, inverse suffix `'`, integer power suffix `^k`
//! (negative allowed), commutator brackets `[u,v]` meaning `u' v' u v`,
//! parentheses for grouping, `1` for the empty word, juxtaposition for
//! products. Whitespace is ignored.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Family {
    Grigorchuk,
    GuptaSidki,
}

/// One of the two group families together with its prime.
///
/// The prime doubles as the size of the tree alphabet: 2 for the Grigorchuk
/// group, an odd prime `p` for the Gupta-Sidki group.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GroupSpec {
    family: Family,
    prime: u32,
}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl GroupSpec {
    pub const fn grigorchuk() -> Self {
        GroupSpec {
            family: Family::Grigorchuk,
            prime: 2,
        }
    }

    pub fn gupta_sidki(p: u32) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidGroup(format!(
                "Gupta-Sidki groups need an odd prime, got {p}"
            )));
        }
        // the alphabet is stored in a u8 and vertex digits in u32
        if p > 251 {
            return Err(Error::InvalidGroup(format!("prime {p} is too large")));
        }
        Ok(GroupSpec {
            family: Family::GuptaSidki,
            prime: p,
        })
    }

    pub fn family(&self) -> Family {
        self.family
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    /// Number of children of every vertex of the tree.
    pub fn arity(&self) -> usize {
        self.prime as usize
    }

    pub fn is_grigorchuk(&self) -> bool {
        self.family == Family::Grigorchuk
    }

    pub fn generators(&self) -> &'static [Gen] {
        match self.family {
            Family::Grigorchuk => &[Gen::A, Gen::B, Gen::C, Gen::D],
            Family::GuptaSidki => &[Gen::A, Gen::B],
        }
    }

    pub fn contains(&self, g: Gen) -> bool {
        self.generators().contains(&g)
    }

    /// The standard generating set as words (`a,b,c,d` or `a,b`).
    pub fn standard_generators(&self) -> Vec<GeneratorWord> {
        self.generators()
            .iter()
            .map(|&g| GeneratorWord::generator(*self, g))
            .collect()
    }

    /// Symmetric closure of the standard generators: `a,b,c,d` for the
    /// Grigorchuk group (all involutions), `a,a',b,b'` for Gupta-Sidki.
    pub fn symmetric_generators(&self) -> Vec<GeneratorWord> {
        symmetrize(&self.standard_generators())
    }

    fn normalize_exp(&self, e: i64) -> i32 {
        let p = self.prime as i64;
        let mut r = e.rem_euclid(p);
        if r > p / 2 {
            r -= p;
        }
        r as i32
    }
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.family {
            Family::Grigorchuk => write!(f, "grigorchuk"),
            Family::GuptaSidki => write!(f, "gupta-sidki:p={}", self.prime),
        }
    }
}

impl FromStr for GroupSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "grigorchuk" | "grig" => return Ok(GroupSpec::grigorchuk()),
            _ => {}
        }
        for prefix in ["gupta-sidki:p=", "gs:p=", "gupta-sidki:", "gs:"] {
            if let Some(rest) = t.strip_prefix(prefix) {
                let p: u32 = rest
                    .parse()
                    .map_err(|_| Error::InvalidGroup(format!("bad prime in {s:?}")))?;
                return GroupSpec::gupta_sidki(p);
            }
        }
        Err(Error::InvalidGroup(format!(
            "expected `grigorchuk` or `gupta-sidki:p=<odd prime>`, got {s:?}"
        )))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Gen {
    A,
    B,
    C,
    D,
}

impl Gen {
    pub fn symbol(self) -> char {
        match self {
            Gen::A => 'a',
            Gen::B => 'b',
            Gen::C => 'c',
            Gen::D => 'd',
        }
    }

    pub fn from_symbol(c: char) -> Option<Gen> {
        match c {
            'a' => Some(Gen::A),
            'b' => Some(Gen::B),
            'c' => Some(Gen::C),
            'd' => Some(Gen::D),
            _ => None,
        }
    }

    fn is_bcd(self) -> bool {
        self != Gen::A
    }
}

/// Klein-four product of two distinct letters from `{b,c,d}`.
fn klein(x: Gen, y: Gen) -> Gen {
    debug_assert!(x != y && x.is_bcd() && y.is_bcd());
    match (x, y) {
        (Gen::B, Gen::C) | (Gen::C, Gen::B) => Gen::D,
        (Gen::C, Gen::D) | (Gen::D, Gen::C) => Gen::B,
        _ => Gen::C,
    }
}

/// A run `gen^exp` inside a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter {
    pub gen: Gen,
    pub exp: i32,
}

impl Letter {
    pub fn new(gen: Gen, exp: i32) -> Self {
        Letter { gen, exp }
    }
}

/// A word over the generators of one of the two families, stored run-length
/// encoded. Words built through the public constructors are reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GeneratorWord {
    group: GroupSpec,
    letters: Vec<Letter>,
}

impl GeneratorWord {
    pub fn identity(group: GroupSpec) -> Self {
        GeneratorWord {
            group,
            letters: Vec::new(),
        }
    }

    pub fn generator(group: GroupSpec, g: Gen) -> Self {
        assert!(group.contains(g), "{g:?} is not a generator of {group}");
        GeneratorWord {
            group,
            letters: vec![Letter::new(g, 1)],
        }
    }

    pub fn power_of(group: GroupSpec, g: Gen, exp: i64) -> Self {
        assert!(group.contains(g), "{g:?} is not a generator of {group}");
        Self::from_iter_reduced(group, std::iter::once((g, exp)))
    }

    /// Builds a word from arbitrary letters, rejecting symbols outside the
    /// alphabet, and returns it reduced.
    pub fn from_letters(group: GroupSpec, letters: &[Letter]) -> Result<Self> {
        if let Some(l) = letters.iter().find(|l| !group.contains(l.gen)) {
            return Err(Error::InvalidWord(format!(
                "symbol {} is not in the alphabet of {group}",
                l.gen.symbol()
            )));
        }
        Ok(Self::from_iter_reduced(
            group,
            letters.iter().map(|l| (l.gen, l.exp as i64)),
        ))
    }

    fn from_iter_reduced(group: GroupSpec, it: impl IntoIterator<Item = (Gen, i64)>) -> Self {
        let mut out = GeneratorWord::identity(group);
        for (g, e) in it {
            out.push_reduce(g, e);
        }
        out
    }

    /// Appends `g^e` to a reduced word, keeping it reduced.
    pub(crate) fn push_reduce(&mut self, g: Gen, e: i64) {
        let group = self.group;
        let mut g = g;
        let mut e = group.normalize_exp(e) as i64;
        if e == 0 {
            return;
        }
        loop {
            let Some(top) = self.letters.last().copied() else {
                self.letters.push(Letter::new(g, e as i32));
                return;
            };
            if top.gen == g {
                let merged = group.normalize_exp(top.exp as i64 + e);
                self.letters.pop();
                if merged != 0 {
                    self.letters.push(Letter::new(g, merged));
                }
                return;
            }
            if group.is_grigorchuk() && top.gen.is_bcd() && g.is_bcd() {
                // distinct letters of {b,c,d}: replace the pair by the third
                self.letters.pop();
                g = klein(top.gen, g);
                e = 1;
                continue;
            }
            self.letters.push(Letter::new(g, e as i32));
            return;
        }
    }

    pub fn group(&self) -> GroupSpec {
        self.group
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Length in the symmetric generating set: `a^2` counts twice.
    pub fn len(&self) -> usize {
        self.letters.iter().map(|l| l.exp.unsigned_abs() as usize).sum()
    }

    /// Number of runs.
    pub fn syllables(&self) -> usize {
        self.letters.len()
    }

    /// Returns an equal word in normal form. Idempotent.
    pub fn reduce(&self) -> GeneratorWord {
        Self::from_iter_reduced(self.group, self.letters.iter().map(|l| (l.gen, l.exp as i64)))
    }

    pub fn mul(&self, other: &GeneratorWord) -> GeneratorWord {
        assert_eq!(self.group, other.group, "words from different groups");
        let mut out = self.clone();
        for l in &other.letters {
            out.push_reduce(l.gen, l.exp as i64);
        }
        out
    }

    pub fn inverse(&self) -> GeneratorWord {
        Self::from_iter_reduced(
            self.group,
            self.letters.iter().rev().map(|l| (l.gen, -(l.exp as i64))),
        )
    }

    pub fn pow(&self, k: i64) -> GeneratorWord {
        let base = if k < 0 { self.inverse() } else { self.clone() };
        let mut out = GeneratorWord::identity(self.group);
        for _ in 0..k.unsigned_abs() {
            out = out.mul(&base);
        }
        out
    }

    /// `[u,v] = u' v' u v`.
    pub fn commutator(&self, other: &GeneratorWord) -> GeneratorWord {
        self.inverse()
            .mul(&other.inverse())
            .mul(self)
            .mul(other)
    }

    /// `u^v = v' u v`.
    pub fn conjugate(&self, by: &GeneratorWord) -> GeneratorWord {
        by.inverse().mul(self).mul(by)
    }

    /// Sums of `a`- and `b`-exponents mod `p` (Gupta-Sidki only); the image
    /// in the abelianization `C_p x C_p`.
    pub fn exponent_sums(&self) -> Result<AbelianImage> {
        if self.group.is_grigorchuk() {
            return Err(Error::Unsupported(
                "exponent sums are defined for Gupta-Sidki words; use quotient images for the Grigorchuk group"
                    .into(),
            ));
        }
        let p = self.group.prime as i64;
        let mut sa = 0i64;
        let mut sb = 0i64;
        for l in &self.letters {
            match l.gen {
                Gen::A => sa += l.exp as i64,
                Gen::B => sb += l.exp as i64,
                _ => unreachable!("validated alphabet"),
            }
        }
        Ok(AbelianImage {
            prime: self.group.prime,
            coords: vec![sa.rem_euclid(p) as u32, sb.rem_euclid(p) as u32],
        })
    }

    pub fn parse(group: GroupSpec, s: &str) -> Result<GeneratorWord> {
        Parser::new(group, s).parse_all()
    }
}

impl fmt::Display for GeneratorWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.letters.is_empty() {
            return write!(f, "1");
        }
        for l in &self.letters {
            let s = l.gen.symbol();
            match l.exp {
                1 => write!(f, "{s}")?,
                -1 => write!(f, "{s}'")?,
                e => write!(f, "{s}^{e}")?,
            }
        }
        Ok(())
    }
}

/// Symmetric closure of a list of words, dropping the identity and
/// duplicates but keeping the input order.
pub fn symmetrize(words: &[GeneratorWord]) -> Vec<GeneratorWord> {
    let mut seen = std::collections::HashSet::new();
    let mut out: Vec<GeneratorWord> = Vec::new();
    for w in words {
        for v in [w.clone(), w.inverse()] {
            if !v.is_empty() && seen.insert(v.clone()) {
                out.push(v);
            }
        }
    }
    out
}

/// Image of a word in `C_p x C_p` (coordinates are the classes of `a`, `b`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct AbelianImage {
    pub prime: u32,
    pub coords: Vec<u32>,
}

impl AbelianImage {
    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|&c| c == 0)
    }

    pub fn add(&self, other: &AbelianImage) -> AbelianImage {
        assert_eq!(self.prime, other.prime);
        AbelianImage {
            prime: self.prime,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(x, y)| (x + y) % self.prime)
                .collect(),
        }
    }
}

struct Parser<'a> {
    group: GroupSpec,
    src: &'a str,
    chars: Vec<(usize, char)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(group: GroupSpec, src: &'a str) -> Self {
        let chars = src
            .char_indices()
            .filter(|(_, c)| !c.is_whitespace())
            .collect();
        Parser {
            group,
            src,
            chars,
            pos: 0,
        }
    }

    fn err(&self, msg: &str) -> Error {
        let at = self
            .chars
            .get(self.pos)
            .map(|(i, _)| *i)
            .unwrap_or(self.src.len());
        Error::InvalidWord(format!("{msg} at byte {at} in {:?}", self.src))
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).map(|&(_, c)| c)
    }

    fn parse_all(mut self) -> Result<GeneratorWord> {
        let w = self.product()?;
        if self.pos != self.chars.len() {
            return Err(self.err("unexpected character"));
        }
        Ok(w)
    }

    fn product(&mut self) -> Result<GeneratorWord> {
        let mut acc = GeneratorWord::identity(self.group);
        while let Some(c) = self.peek() {
            if c == ')' || c == ']' || c == ',' {
                break;
            }
            let atom = self.atom()?;
            let atom = self.postfix(atom)?;
            acc = acc.mul(&atom);
        }
        Ok(acc)
    }

    fn atom(&mut self) -> Result<GeneratorWord> {
        let c = self.peek().ok_or_else(|| self.err("unexpected end"))?;
        match c {
            '(' => {
                self.pos += 1;
                let w = self.product()?;
                self.expect(')')?;
                Ok(w)
            }
            '[' => {
                self.pos += 1;
                let u = self.product()?;
                self.expect(',')?;
                let v = self.product()?;
                self.expect(']')?;
                Ok(u.commutator(&v))
            }
            '1' => {
                self.pos += 1;
                Ok(GeneratorWord::identity(self.group))
            }
            _ => {
                let g = Gen::from_symbol(c).ok_or_else(|| self.err("unknown symbol"))?;
                if !self.group.contains(g) {
                    return Err(self.err(&format!(
                        "symbol {c} is not in the alphabet of {}",
                        self.group
                    )));
                }
                self.pos += 1;
                Ok(GeneratorWord::generator(self.group, g))
            }
        }
    }

    fn postfix(&mut self, mut w: GeneratorWord) -> Result<GeneratorWord> {
        loop {
            match self.peek() {
                Some('\'') => {
                    self.pos += 1;
                    w = w.inverse();
                }
                Some('^') => {
                    self.pos += 1;
                    let k = self.integer()?;
                    w = w.pow(k);
                }
                _ => return Ok(w),
            }
        }
    }

    fn integer(&mut self) -> Result<i64> {
        let mut neg = false;
        if self.peek() == Some('-') {
            neg = true;
            self.pos += 1;
        }
        let start = self.pos;
        let mut v: i64 = 0;
        while let Some(c) = self.peek() {
            let Some(d) = c.to_digit(10) else { break };
            v = v
                .checked_mul(10)
                .and_then(|v| v.checked_add(d as i64))
                .ok_or_else(|| self.err("exponent overflow"))?;
            self.pos += 1;
        }
        if self.pos == start {
            return Err(self.err("expected an integer exponent"));
        }
        Ok(if neg { -v } else { v })
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.peek() == Some(c) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.err(&format!("expected `{c}`")))
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

    #[test]
    fn involution_cancels() {
        assert!(grig("aa").is_empty());
        assert!(grig("dd").is_empty());
    }

    #[test]
    fn klein_four_merges() {
        assert_eq!(grig("bc").to_string(), "d");
        assert_eq!(grig("cd").to_string(), "b");
        assert_eq!(grig("db").to_string(), "c");
        assert_eq!(grig("abcda").to_string(), "1");
        assert_eq!(grig("a b c a").to_string(), "ada");
    }

    #[test]
    fn empty_word() {
        let e = GeneratorWord::identity(GroupSpec::grigorchuk());
        assert_eq!(e.reduce(), e);
        assert_eq!(e.to_string(), "1");
    }

    #[test]
    fn grammar() {
        let g = GroupSpec::gupta_sidki(5).unwrap();
        let w = GeneratorWord::parse(g, "[a,b]^2 a'").unwrap();
        let a = GeneratorWord::generator(g, Gen::A);
        let b = GeneratorWord::generator(g, Gen::B);
        assert_eq!(w, a.commutator(&b).pow(2).mul(&a.inverse()));
        assert_eq!(GeneratorWord::parse(g, "a^-1").unwrap(), a.inverse());
        assert_eq!(GeneratorWord::parse(g, "(ab)^3").unwrap(), a.mul(&b).pow(3));
        assert!(GeneratorWord::parse(g, "c").is_err());
        assert!(GeneratorWord::parse(g, "[a,b").is_err());
        assert!(GeneratorWord::parse(g, "a^").is_err());
    }

    #[test]
    fn gs_exponents_normalized() {
        let g = GroupSpec::gupta_sidki(3).unwrap();
        assert!(GeneratorWord::parse(g, "aaa").unwrap().is_empty());
        assert_eq!(GeneratorWord::parse(g, "aa").unwrap().to_string(), "a'");
        let g5 = GroupSpec::gupta_sidki(5).unwrap();
        assert_eq!(GeneratorWord::parse(g5, "b^4").unwrap().to_string(), "b'");
        assert_eq!(GeneratorWord::parse(g5, "b^3").unwrap().to_string(), "b^-2");
    }

    #[test]
    fn exponent_sum_examples() {
        let g3 = GroupSpec::gupta_sidki(3).unwrap();
        let comm = GeneratorWord::parse(g3, "a'b'ab").unwrap();
        assert!(comm.exponent_sums().unwrap().is_zero());
        assert_eq!(
            GeneratorWord::parse(g3, "ab").unwrap().exponent_sums().unwrap().coords,
            vec![1, 1]
        );
        let g5 = GroupSpec::gupta_sidki(5).unwrap();
        assert_eq!(
            GeneratorWord::parse(g5, "a'").unwrap().exponent_sums().unwrap().coords,
            vec![4, 0]
        );
        assert!(matches!(
            grig("ab").exponent_sums(),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn group_spec_strings() {
        assert_eq!("grigorchuk".parse::<GroupSpec>().unwrap(), GroupSpec::grigorchuk());
        let g: GroupSpec = "gupta-sidki:p=7".parse().unwrap();
        assert_eq!(g.prime(), 7);
        assert_eq!(g.to_string(), "gupta-sidki:p=7");
        assert!("gupta-sidki:p=9".parse::<GroupSpec>().is_err());
        assert!("gupta-sidki:p=2".parse::<GroupSpec>().is_err());
    }

    #[test]
    fn invalid_letters_rejected() {
        let g = GroupSpec::gupta_sidki(3).unwrap();
        assert!(GeneratorWord::from_letters(g, &[Letter::new(Gen::D, 1)]).is_err());
    }

    fn arb_word(group: GroupSpec, max: usize) -> impl Strategy<Value = GeneratorWord> {
        let gens = group.generators().to_vec();
        let p = group.prime() as i32;
        prop::collection::vec((0..gens.len(), -(p - 1)..p), 0..max).prop_map(move |v| {
            let letters: Vec<Letter> = v
                .into_iter()
                .map(|(i, e)| Letter::new(gens[i], if e == 0 { 1 } else { e }))
                .collect();
            GeneratorWord::from_letters(group, &letters).unwrap()
        })
    }

    proptest! {
        #[test]
        fn reduce_idempotent_grig(w in arb_word(GroupSpec::grigorchuk(), 40)) {
            prop_assert_eq!(w.reduce(), w.clone());
            // no adjacent equal symbols, no adjacent {b,c,d} pair
            for pair in w.letters().windows(2) {
                prop_assert!(pair[0].gen != pair[1].gen);
                prop_assert!(pair[0].gen == Gen::A || pair[1].gen == Gen::A);
            }
            prop_assert!(w.letters().iter().all(|l| l.exp == 1));
        }

        #[test]
        fn reduce_idempotent_gs(w in arb_word(GroupSpec::gupta_sidki(5).unwrap(), 40)) {
            prop_assert_eq!(w.reduce(), w.clone());
            for pair in w.letters().windows(2) {
                prop_assert!(pair[0].gen != pair[1].gen);
            }
            prop_assert!(w.letters().iter().all(|l| l.exp != 0 && l.exp.abs() <= 2));
        }

        #[test]
        fn exponent_sums_additive(u in arb_word(GroupSpec::gupta_sidki(7).unwrap(), 30),
                                  v in arb_word(GroupSpec::gupta_sidki(7).unwrap(), 30)) {
            let lhs = u.mul(&v).exponent_sums().unwrap();
            let rhs = u.exponent_sums().unwrap().add(&v.exponent_sums().unwrap());
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn inverse_cancels(w in arb_word(GroupSpec::grigorchuk(), 40)) {
            prop_assert!(w.mul(&w.inverse()).is_empty());
        }

        #[test]
        fn display_parses_back(w in arb_word(GroupSpec::gupta_sidki(5).unwrap(), 30)) {
            let s = w.to_string();
            prop_assert_eq!(GeneratorWord::parse(w.group(), &s).unwrap(), w);
        }
    }
}
