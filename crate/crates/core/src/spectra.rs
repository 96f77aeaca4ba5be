//! Spectral gap and lazy-walk mixing time of Cayley graphs of finite
//! quotients, ball growth in the infinite groups, and the growth constants.
//!
//! Generating multisets are taken as given: repeated elements and the
//! identity (a generator acting trivially in the quotient) become parallel
//! edges and loops of the normalized adjacency operator.

use std::collections::HashMap;

use nalgebra::{DMatrix, SymmetricEigen};
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::check::Status;
use crate::error::{Error, Result};
use crate::quotient::{diameter, EnumerateOptions, FiniteGroup, FiniteQuotient, QuotientKind};
use crate::words::{symmetrize, GeneratorWord, GroupSpec};
use crate::wreath::{is_identity, level_permutation, LevelPermutation};

/// Orders up to this use a dense eigensolve.
pub const DENSE_CAP: usize = 1024;

/// Orders below this get exact rational walks.
pub const EXACT_WALK_CAP: usize = 4096;

pub const DEFAULT_ITERATION_CAP: u64 = 10_000_000;

const POWER_TOLERANCE: f64 = 1e-10;

/// `A_S` as right multiplication tables, one per entry of `S`.
pub struct CayleyOperator {
    order: usize,
    steps: Vec<Vec<u32>>,
    gens: Vec<u32>,
}

impl CayleyOperator {
    /// `S` must be closed under inverses counting multiplicity.
    pub fn new<G: FiniteGroup + ?Sized>(g: &G, s: &[u32]) -> Result<Self> {
        if s.is_empty() {
            return Err(Error::Precondition("S is empty".into()));
        }
        let mut count: HashMap<u32, usize> = HashMap::new();
        for &x in s {
            *count.entry(x).or_default() += 1;
        }
        for (&x, &c) in &count {
            if count.get(&g.inv(x)).copied().unwrap_or(0) != c {
                return Err(Error::Precondition(format!(
                    "S is not symmetric: element {x} occurs {c} times, its inverse {} times",
                    count.get(&g.inv(x)).copied().unwrap_or(0)
                )));
            }
        }
        let n = g.order();
        let steps = s
            .iter()
            .map(|&x| (0..n as u32).map(|y| g.mul(y, x)).collect())
            .collect();
        Ok(CayleyOperator {
            order: n,
            steps,
            gens: s.to_vec(),
        })
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `|S|` with multiplicity.
    pub fn degree(&self) -> usize {
        self.steps.len()
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    /// `(A f)(x) = |S|^-1 sum_s f(xs)`.
    pub fn apply(&self, f: &[f64], out: &mut [f64]) {
        let k = self.degree() as f64;
        for (x, o) in out.iter_mut().enumerate() {
            *o = self.steps.iter().map(|t| f[t[x] as usize]).sum::<f64>() / k;
        }
    }

    pub fn dense(&self) -> DMatrix<f64> {
        let n = self.order;
        let w = 1.0 / self.degree() as f64;
        let mut m = DMatrix::zeros(n, n);
        for t in &self.steps {
            for (x, &y) in t.iter().enumerate() {
                m[(x, y as usize)] += w;
            }
        }
        m
    }

    fn generating<G: FiniteGroup + ?Sized>(&self, g: &G) -> Result<Option<usize>> {
        match diameter(g, &self.gens) {
            Ok(d) => Ok(Some(d.diameter)),
            Err(Error::NonGenerating { .. }) => Ok(None),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMethod {
    Dense,
    PowerIteration,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GapReport {
    pub order: usize,
    pub degree: usize,
    pub method: EigenMethod,
    pub lambda2: f64,
    /// Smallest eigenvalue, from the dense solve only.
    pub lambda_min: Option<f64>,
    pub gap: f64,
    pub generating: bool,
    pub diameter: Option<usize>,
    /// `(|S| diam^2)^-1`.
    pub lower_bound: Option<f64>,
    pub bound_holds: Option<bool>,
    pub warning: Option<String>,
}

/// `1 - lambda_2` of `A_S`, with the diameter lower bound checked when `S`
/// generates.
pub fn spectral_gap<G: FiniteGroup + ?Sized>(g: &G, s: &[u32]) -> Result<GapReport> {
    let op = CayleyOperator::new(g, s)?;
    let diam = op.generating(g)?;
    let n = op.order();
    let (method, lambda2, lambda_min) = if diam.is_none() {
        (EigenMethod::Dense, 1.0, None)
    } else if n == 1 {
        (EigenMethod::Dense, 1.0, Some(1.0))
    } else if n <= DENSE_CAP {
        let eig = SymmetricEigen::new(op.dense());
        let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        ev.sort_by(|a, b| b.total_cmp(a));
        if ev.iter().any(|&l| !(-1.0 - 1e-9..=1.0 + 1e-9).contains(&l)) || (ev[0] - 1.0).abs() > 1e-10 {
            return Err(Error::Inconsistent(format!(
                "spectrum of A_S outside [-1, 1] or top eigenvalue {} != 1",
                ev[0]
            )));
        }
        (EigenMethod::Dense, ev[1], Some(ev[n - 1]))
    } else {
        (EigenMethod::PowerIteration, second_eigenvalue(&op, DEFAULT_ITERATION_CAP)?, None)
    };
    let gap = 1.0 - lambda2;
    let lower_bound = diam.map(|d| 1.0 / (op.degree() as f64 * (d.max(1) * d.max(1)) as f64));
    Ok(GapReport {
        order: n,
        degree: op.degree(),
        method,
        lambda2,
        lambda_min,
        gap,
        generating: diam.is_some(),
        diameter: diam,
        bound_holds: lower_bound.map(|b| gap >= b * (1.0 - 1e-9)),
        lower_bound,
        warning: diam.is_none().then(|| "S does not generate; lambda_2 = 1 and no bound is checked".to_string()),
    })
}

/// `lambda_2` by power iteration on `(A + I)/2` away from the constants.
fn second_eigenvalue(op: &CayleyOperator, cap: u64) -> Result<f64> {
    let n = op.order();
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut v: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut w = vec![0.0; n];
    let deflate = |v: &mut [f64]| {
        let mean = v.iter().sum::<f64>() / n as f64;
        v.iter_mut().for_each(|x| *x -= mean);
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        v.iter_mut().for_each(|x| *x /= norm);
    };
    deflate(&mut v);
    let mut last = f64::NAN;
    for _ in 0..cap {
        op.apply(&v, &mut w);
        let rq: f64 = w.iter().zip(&v).map(|(a, b)| (a + b) / 2.0 * b).sum();
        for (x, y) in v.iter_mut().zip(&w) {
            *x = (*x + y) / 2.0;
        }
        deflate(&mut v);
        if (rq - last).abs() <= POWER_TOLERANCE * rq.abs().max(1e-300) {
            return Ok(2.0 * rq - 1.0);
        }
        last = rq;
    }
    Err(Error::IterationCap(cap))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MixingReport {
    pub order: usize,
    pub degree: usize,
    pub mixing_time: u64,
    /// `||f_l - 1/|G|||_inf` for `l = 0..=mixing_time`.
    pub trace: Vec<f64>,
    /// The distance never increased.
    pub monotone: bool,
    /// Rational arithmetic was used.
    pub exact: bool,
}

impl MixingReport {
    /// `mixing_time * gap / log|G|`, recorded rather than bounded.
    pub fn ratio(&self, gap: f64) -> Option<f64> {
        (self.order > 1).then(|| self.mixing_time as f64 * gap / (self.order as f64).ln())
    }
}

/// Least `l >= 1` with `||f_l - 1/|G|||_inf <= 1/(2|G|)` for the lazy walk
/// `T_S = (A_S + I)/2` started at the identity.
pub fn mixing_time<G: FiniteGroup + ?Sized>(g: &G, s: &[u32], cap: u64) -> Result<MixingReport> {
    let op = CayleyOperator::new(g, s)?;
    if op.order() < EXACT_WALK_CAP {
        mixing_exact(&op, cap)
    } else {
        mixing_float(&op, cap)
    }
}

/// Numerators over the common denominator `(2|S|)^l`.
fn mixing_exact(op: &CayleyOperator, cap: u64) -> Result<MixingReport> {
    let n = op.order();
    let k = op.degree();
    let nn = BigInt::from(n);
    let mut f = vec![BigInt::zero(); n];
    f[0] = BigInt::from(1);
    let mut den = BigInt::from(1);
    // 2 |n f - D| compared with D
    let distance = |f: &[BigInt], den: &BigInt| -> BigInt {
        f.iter().map(|x| (&nn * x - den).abs()).max().unwrap()
    };
    let to_f64 = |d: &BigInt, den: &BigInt| -> f64 {
        let bits = den.bits().saturating_sub(60);
        let (d, den) = (d >> bits, den >> bits);
        f64_of(&d) / f64_of(&den) / n as f64
    };
    let mut prev = distance(&f, &den);
    let mut trace = vec![to_f64(&prev, &den)];
    let mut monotone = true;
    let kk = BigInt::from(k);
    for l in 1..=cap {
        let mut next = Vec::with_capacity(n);
        for x in 0..n {
            let mut acc = &kk * &f[x];
            for t in &op.steps {
                acc += &f[t[x] as usize];
            }
            next.push(acc);
        }
        f = next;
        den *= 2 * k;
        let d = distance(&f, &den);
        // compare d/den with prev/(den/2k)
        monotone &= d <= &prev * (2 * k);
        trace.push(to_f64(&d, &den));
        if &d * 2 <= den {
            return Ok(MixingReport {
                order: n,
                degree: k,
                mixing_time: l,
                trace,
                monotone,
                exact: true,
            });
        }
        prev = d;
    }
    Err(Error::IterationCap(cap))
}

fn f64_of(x: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(x).unwrap_or(f64::INFINITY)
}

/// Double precision with a running bound on the accumulated rounding
/// error, which is added to the distance before comparing.
fn mixing_float(op: &CayleyOperator, cap: u64) -> Result<MixingReport> {
    let n = op.order();
    let k = op.degree();
    let u = 1.0 / n as f64;
    let mut f = vec![0.0; n];
    f[0] = 1.0;
    let mut w = vec![0.0; n];
    let mut err = 0.0f64;
    let dist = |f: &[f64]| f.iter().map(|x| (x - u).abs()).fold(0.0, f64::max);
    let mut prev = dist(&f);
    let mut trace = vec![prev];
    let mut monotone = true;
    for l in 1..=cap {
        op.apply(&f, &mut w);
        let mut top = 0.0f64;
        for (x, y) in f.iter_mut().zip(&w) {
            *x = (*x + y) / 2.0;
            top = top.max(*x);
        }
        // each entry is a sum of k + 1 terms of size at most top
        err += (k as f64 + 3.0) * f64::EPSILON * top;
        let d = dist(&f);
        monotone &= d <= prev + 2.0 * err;
        trace.push(d);
        if d + err <= u / 2.0 {
            return Ok(MixingReport {
                order: n,
                degree: k,
                mixing_time: l,
                trace,
                monotone,
                exact: false,
            });
        }
        prev = d;
    }
    Err(Error::IterationCap(cap))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum GrowthMethod {
    /// Distinct elements separated by the word problem.
    WordProblem,
    /// Distinct level-`level` permutations, with `level` raised until the
    /// counts stopped changing.
    Stabilized { level: u32 },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthTable {
    pub group: String,
    /// `|B_S(r)|` for `r = 0..=n`.
    pub balls: Vec<usize>,
    pub method: GrowthMethod,
}

impl GrowthTable {
    pub fn at(&self, r: usize) -> usize {
        self.balls[r]
    }
}

fn hash_level(group: GroupSpec) -> u32 {
    if group.is_grigorchuk() {
        10
    } else {
        (1024f64.ln() / (group.prime() as f64).ln()).floor().max(2.0) as u32
    }
}

/// Ball sizes `|B_S(r)|`, `r <= n`, in the infinite group. Elements are
/// bucketed by their action on a fixed level; words in one bucket are
/// separated by the word problem. `max_elements` caps the ball.
pub fn growth(group: GroupSpec, s: &[GeneratorWord], n: usize, max_elements: usize) -> Result<GrowthTable> {
    let s = symmetrize(if s.is_empty() { &[] } else { s });
    let s = if s.is_empty() { group.symmetric_generators() } else { s };
    let level = hash_level(group);
    let sp = s.iter().map(|w| level_permutation(w, level)).collect::<Result<Vec<_>>>()?;
    // Buckets key on a hash of the level permutation; only the frontier
    // keeps its permutation, so memory stays near one word per element.
    let key = |p: &LevelPermutation| {
        let mut h = std::collections::hash_map::DefaultHasher::new();
        std::hash::Hash::hash(p.images(), &mut h);
        std::hash::Hasher::finish(&h)
    };
    let id = LevelPermutation::identity(group.arity() as u32, level);
    let mut words = vec![GeneratorWord::identity(group)];
    let mut buckets: HashMap<u64, Vec<u32>> = HashMap::new();
    buckets.insert(key(&id), vec![0]);
    let mut frontier = vec![(0u32, id)];
    let mut balls = vec![1usize];
    for _ in 0..n {
        let mut next = Vec::new();
        for (x, px) in &frontier {
            for (t, w) in s.iter().enumerate() {
                let p = px.compose(&sp[t]);
                let cand = words[*x as usize].mul(w).reduce();
                let bucket = buckets.entry(key(&p)).or_default();
                let mut dup = false;
                for &y in bucket.iter() {
                    let other = &words[y as usize];
                    let same = is_identity(&cand.mul(&other.inverse())).map_err(|e| match e {
                        Error::Undecided { depth } => Error::UndecidedPair {
                            left: cand.to_string(),
                            right: other.to_string(),
                            depth,
                        },
                        e => e,
                    })?;
                    if same {
                        dup = true;
                        break;
                    }
                }
                if !dup {
                    let id = words.len() as u32;
                    bucket.push(id);
                    words.push(cand);
                    next.push((id, p));
                    if words.len() > max_elements {
                        return Err(Error::PartialEnumeration {
                            reached: words.len(),
                            cap: max_elements,
                        });
                    }
                }
            }
        }
        balls.push(words.len());
        frontier = next;
    }
    Ok(GrowthTable {
        group: group.to_string(),
        balls,
        method: GrowthMethod::WordProblem,
    })
}

/// Ball sizes from distinct level-`N` permutations, raising `N` from 1
/// until two consecutive levels agree at every radius (or `max_level`).
pub fn growth_stabilized(group: GroupSpec, s: &[GeneratorWord], n: usize, max_level: u32) -> Result<GrowthTable> {
    let s = if s.is_empty() { group.symmetric_generators() } else { symmetrize(s) };
    let mut last: Option<Vec<usize>> = None;
    for level in 1..=max_level {
        let sp = s.iter().map(|w| level_permutation(w, level)).collect::<Result<Vec<_>>>()?;
        let id = LevelPermutation::identity(group.arity() as u32, level);
        let mut seen: std::collections::HashSet<Vec<u32>> = std::collections::HashSet::new();
        seen.insert(id.images().to_vec());
        let mut frontier = vec![id];
        let mut balls = vec![1usize];
        for _ in 0..n {
            let mut next = Vec::new();
            for x in &frontier {
                for t in &sp {
                    let p = x.compose(t);
                    if seen.insert(p.images().to_vec()) {
                        next.push(p);
                    }
                }
            }
            balls.push(seen.len());
            frontier = next;
        }
        if last.as_ref() == Some(&balls) {
            return Ok(GrowthTable {
                group: group.to_string(),
                balls,
                method: GrowthMethod::Stabilized { level: level - 1 },
            });
        }
        last = Some(balls);
    }
    Err(Error::Undecided { depth: max_level as usize })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GrowthDiameterCheck {
    pub group: String,
    pub level: u32,
    pub order: usize,
    pub diameter: usize,
    pub ball_at_diameter: Option<usize>,
    pub status: Status,
}

/// `f_(G,S)(diam(G/Stab(n), S)) >= |G/Stab(n)|`.
pub fn growth_diameter_check(
    group: GroupSpec,
    s: &[GeneratorWord],
    level: u32,
    opts: &EnumerateOptions,
) -> Result<GrowthDiameterCheck> {
    let q = FiniteQuotient::enumerate(group, s, QuotientKind::LevelStabilizer(level), opts)?;
    let d = q.spheres().len() - 1;
    let (ball, status) = match growth(group, s, d, opts.max_elements) {
        Ok(t) => {
            let b = t.at(d);
            (Some(b), Status::from_bool(b >= q.order()))
        }
        Err(Error::PartialEnumeration { .. }) => (None, Status::Inconclusive),
        Err(e) => return Err(e),
    };
    Ok(GrowthDiameterCheck {
        group: group.to_string(),
        level,
        order: q.order(),
        diameter: d,
        ball_at_diameter: ball,
        status,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GrowthExponents {
    /// Real root of `X^3 + X^2 + X = 2`.
    pub eta: f64,
    /// `log 2 / (log 2 - log eta)`.
    pub beta: f64,
    /// `log 2 / log 35`.
    pub diameter_exponent_lower: f64,
    /// `log 35 / log 2`.
    pub inverse: f64,
}

/// Bisection on `[0, 1]` to `1e-12`.
pub fn growth_exponents() -> GrowthExponents {
    let f = |x: f64| x * x * x + x * x + x - 2.0;
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while hi - lo > 1e-12 {
        let mid = (lo + hi) / 2.0;
        if f(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta = (lo + hi) / 2.0;
    let l2 = 2f64.ln();
    GrowthExponents {
        eta,
        beta: l2 / (l2 - eta.ln()),
        diameter_exponent_lower: l2 / 35f64.ln(),
        inverse: 35f64.ln() / l2,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::TableGroup;

    fn cyclic(n: u32) -> TableGroup {
        let p: Vec<u32> = (0..n).map(|i| (i + 1) % n).collect();
        TableGroup::from_permutations(&[p]).0
    }

    #[test]
    fn c2_gap_and_mixing() {
        let g = cyclic(2);
        let r = spectral_gap(&g, &[1]).unwrap();
        assert!((r.lambda2 + 1.0).abs() < 1e-12);
        assert!((r.gap - 2.0).abs() < 1e-12);
        let m = mixing_time(&g, &[1], 100).unwrap();
        assert_eq!(m.mixing_time, 1);
        assert_eq!(m.trace, vec![0.5, 0.0]);
    }

    #[test]
    fn loops_halve_the_gap() {
        // C_2 with S = {a, 1, 1, 1}: A = (3I + swap)/4
        let g = cyclic(2);
        let r = spectral_gap(&g, &[1, 0, 0, 0]).unwrap();
        assert!((r.lambda2 - 0.5).abs() < 1e-12);
        assert!((r.gap - 0.5).abs() < 1e-12);
        assert_eq!(r.bound_holds, Some(true));
    }

    #[test]
    fn trivial_group_mixes_in_one_step() {
        let (g, _) = TableGroup::from_permutations(&[vec![0]]);
        assert_eq!(mixing_time(&g, &[0], 10).unwrap().mixing_time, 1);
    }

    #[test]
    fn cycle_spectrum() {
        // C_n with S = {1, -1}: lambda_2 = cos(2 pi / n)
        for n in [5u32, 12, 31] {
            let g = cyclic(n);
            let r = spectral_gap(&g, &[1, n - 1]).unwrap();
            let want = (2.0 * std::f64::consts::PI / n as f64).cos();
            assert!((r.lambda2 - want).abs() < 1e-10, "n = {n}");
            assert_eq!(r.bound_holds, Some(true));
            let op = CayleyOperator::new(&g, &[1, n - 1]).unwrap();
            let l2 = second_eigenvalue(&op, 10_000_000).unwrap();
            assert!((l2 - want).abs() < 1e-6, "n = {n}: {l2} vs {want}");
        }
    }

    #[test]
    fn asymmetric_set_is_refused() {
        assert!(matches!(
            CayleyOperator::new(&cyclic(5), &[1]),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn non_generating_reports_one() {
        let g = cyclic(6);
        let r = spectral_gap(&g, &[2, 4]).unwrap();
        assert!(!r.generating);
        assert_eq!(r.lambda2, 1.0);
        assert_eq!(r.bound_holds, None);
        assert!(r.warning.is_some());
    }

    #[test]
    fn float_walk_agrees_with_exact() {
        let g = cyclic(9);
        let op = CayleyOperator::new(&g, &[1, 8]).unwrap();
        let a = mixing_exact(&op, 10_000).unwrap();
        let b = mixing_float(&op, 10_000).unwrap();
        assert_eq!(a.mixing_time, b.mixing_time);
        assert!(a.monotone && b.monotone);
        for (x, y) in a.trace.iter().zip(&b.trace) {
            assert!((x - y).abs() < 1e-12);
        }
    }

    #[test]
    fn grigorchuk_balls() {
        let g = GroupSpec::grigorchuk();
        let t = growth(g, &[], 5, 1 << 20).unwrap();
        assert_eq!(&t.balls[..3], &[1, 5, 11]);
        let s = growth_stabilized(g, &[], 5, 12).unwrap();
        assert_eq!(t.balls, s.balls);
    }

    #[test]
    fn growth_beats_diameter() {
        let g = GroupSpec::grigorchuk();
        for n in 1..=3 {
            let c = growth_diameter_check(g, &[], n, &EnumerateOptions::default()).unwrap();
            assert_eq!(c.status, Status::VerifiedExhaustive, "{c:?}");
        }
        let c = growth_diameter_check(GroupSpec::gupta_sidki(3).unwrap(), &[], 1, &EnumerateOptions::default())
            .unwrap();
        assert_eq!(c.order, 3);
        assert_eq!(c.status, Status::VerifiedExhaustive);
    }

    #[test]
    fn constants() {
        let c = growth_exponents();
        assert!((c.eta - 0.810536).abs() < 1e-6);
        assert!((c.eta.powi(3) + c.eta.powi(2) + c.eta - 2.0).abs() < 1e-11);
        assert_eq!((c.beta * 1000.0).round(), 767.0);
        assert_eq!((c.diameter_exponent_lower * 1000.0).round(), 195.0);
        assert_eq!((c.inverse * 1000.0).round(), 5129.0);
    }
}
