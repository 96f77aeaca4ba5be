//! Verification suites: every checkable statement about one group, as
//! claim records.

use num_bigint::BigUint;
use serde_json::{json, Value};

use crate::check::Status;
use crate::error::{Error, Result};
use crate::grigorchuk::{self as grig, DegreeQuery, LcsQuotient};
use crate::guptasidki::{self as gs, GsQuotient, GuptaSidki};
use crate::quotient::{CosetGroup, EnumerateOptions, FiniteGroup, FiniteQuotient, QuotientKind};
use crate::report::Recorder;
use crate::spectra;
use crate::words::{symmetrize, Family, Gen, GroupSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Relations,
    Identities,
    Orders,
    Lcs,
    Sk,
    Spectra,
    Growth,
    Constants,
    All,
}

impl Suite {
    pub fn parse(s: &str) -> Result<Suite> {
        Ok(match s {
            "relations" => Suite::Relations,
            "identities" => Suite::Identities,
            "orders" => Suite::Orders,
            "lcs" => Suite::Lcs,
            "sk" => Suite::Sk,
            "spectra" => Suite::Spectra,
            "growth" => Suite::Growth,
            "constants" => Suite::Constants,
            "all" => Suite::All,
            _ => return Err(Error::InvalidRequest(format!("unknown suite {s}"))),
        })
    }

    fn includes(self, other: Suite) -> bool {
        self == Suite::All || self == other
    }
}

#[derive(Debug, Clone)]
pub struct SuiteOptions {
    pub enumerate: EnumerateOptions,
    pub max_leaves: u64,
    pub seed: u64,
    /// Sampled targets per component check.
    pub samples: usize,
    /// Deepest level for stabilizer orders and relation checks.
    pub max_level: u32,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            enumerate: EnumerateOptions::default(),
            max_leaves: crate::wreath::DEFAULT_LEAF_CAP,
            seed: crate::report::DEFAULT_SEED,
            samples: gs::DEFAULT_SAMPLES,
            max_level: 4,
        }
    }
}

/// Letter sequences for the defining relations, including generator orders
/// for the Gupta-Sidki groups.
fn relation_list(g: GroupSpec) -> Vec<(String, Vec<(Gen, i64)>)> {
    match g.family() {
        Family::Grigorchuk => grig::relations().into_iter().map(|(n, l)| (n.to_string(), l)).collect(),
        Family::GuptaSidki => {
            let p = g.prime() as i64;
            vec![
                (format!("a^{p} = 1"), vec![(Gen::A, p)]),
                (format!("b^{p} = 1"), vec![(Gen::B, p)]),
            ]
        }
    }
}

fn status_all(ok: impl IntoIterator<Item = Status>) -> Status {
    ok.into_iter().fold(Status::VerifiedExhaustive, Status::and)
}

pub fn run(group: GroupSpec, suite: Suite, opts: &SuiteOptions, rec: &mut Recorder) -> Result<()> {
    if suite.includes(Suite::Relations) {
        relations(group, opts, rec);
    }
    match group.family() {
        Family::Grigorchuk => grigorchuk(suite, opts, rec)?,
        Family::GuptaSidki => gupta_sidki(group.prime(), suite, opts, rec)?,
    }
    if suite.includes(Suite::Growth) {
        growth(group, opts, rec);
    }
    if suite.includes(Suite::Spectra) {
        spectra_claims(group, opts, rec);
    }
    Ok(())
}

fn relations(group: GroupSpec, opts: &SuiteOptions, rec: &mut Recorder) {
    for (name, letters) in relation_list(group) {
        rec.claim(&format!("relation {name}"), &name, || {
            for n in 1..=10 {
                let (ok, method) = grig::relation_holds(group, &letters, n, opts.max_leaves)?;
                if !ok {
                    return Ok((Status::Failed, json!({ "level": n, "method": method })));
                }
            }
            Ok((Status::VerifiedExhaustive, json!({ "levels": 10 })))
        });
    }
}

fn grigorchuk(suite: Suite, opts: &SuiteOptions, rec: &mut Recorder) -> Result<()> {
    let g = GroupSpec::grigorchuk();
    if suite.includes(Suite::Identities) {
        for idx in 1..=4u8 {
            rec.claim(&format!("commutator identity {idx}"), IDENTITY_TEXT[idx as usize - 1], || {
                for n in 1..=8 {
                    if !grig::verify_commutator_identity(idx, n)? {
                        return Ok((
                            Status::Failed,
                            json!({ "first_failing_level": n, "exact": grig::commutator_identity_exact(idx)? }),
                        ));
                    }
                }
                let exact = grig::commutator_identity_exact(idx)?;
                Ok((Status::from_bool(exact), json!({ "levels": 8, "exact": exact })))
            });
        }
    }
    if suite.includes(Suite::Orders) {
        for n in 2..=opts.max_level {
            rec.claim(&format!("|G : Stab({n})| lower bound"), "|G : Stab(n)| >= 2^{2^{n-1}+1}", || {
                let q = FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(n), &opts.enumerate)?;
                let bound = grig::stab_index_bound(n);
                Ok((
                    Status::from_bool(BigUint::from(q.order()) >= bound),
                    json!({ "order": q.order(), "bound": bound.to_string() }),
                ))
            });
        }
    }
    let needs_lcs = [Suite::Orders, Suite::Lcs, Suite::Sk].iter().any(|&s| suite.includes(s));
    if !needs_lcs {
        return Ok(());
    }
    let lcs = LcsQuotient::build(&opts.enumerate)?;
    if suite.includes(Suite::Orders) {
        rec.claim("|G : gamma_5| = 256", "|G : gamma_{2^m+1}| = 2^{3 * 2^{m-1} + 2}", || {
            let i = lcs.gamma(5).index();
            Ok((Status::from_bool(i == 256), json!({ "index": i })))
        });
    }
    if suite.includes(Suite::Lcs) {
        for m in 2..=3 {
            rec.claim(&format!("central index m = {m}"), "|G : gamma_{2^m+1}| = 2^{3 * 2^{m-1} + 2}", || {
                let (got, want, st) = grig::verify_central_index(&lcs, m)?;
                Ok((st, json!({ "index": got, "formula": want.to_string() })))
            });
        }
        for m in 1..=2 {
            rec.claim(
                &format!("sandwich m = {m}"),
                "gamma_{2^m + 2^{m-1} + 1} <= K^(x2^m) <= gamma_{2^m + 1}",
                || Ok((grig::verify_sandwich(&lcs, m)?, json!({ "m": m }))),
            );
        }
        for m in 1..=grig::LCS_DEPTH {
            rec.claim(&format!("squaring map m = {m}"), "k -> k^2 is well defined and onto", || {
                let c = grig::verify_squaring(&lcs, m)?;
                Ok((c.status, serde_json::to_value(&c).unwrap()))
            });
        }
        rec.claim("commutator maps m = 2", "commutators of the layers cover the next layers", || {
            let cs = grig::verify_commutator_maps(&lcs, 2)?;
            Ok((status_all(cs.iter().map(|c| c.status)), serde_json::to_value(&cs).unwrap()))
        });
        for n in 0..=3 {
            rec.claim(&format!("degree formula, {n} maps"), "deg = 1 + sum X_i 2^{i-1} + 2^n (2^{n+1} for x^2)", || {
                let mut out = Vec::new();
                let mut st = Status::VerifiedExhaustive;
                for q in DegreeQuery::all(n) {
                    let c = grig::verify_degree(&lcs, &q)?;
                    st = st.and(c.status);
                    out.push(c);
                }
                Ok((st, serde_json::to_value(&out).unwrap()))
            });
        }
    }
    if suite.includes(Suite::Sk) {
        rec.claim("cover growth m = 2", "X^35 gamma_{2^{m+1}+1} = G", || {
            let (r, x) = grig::covering_ball(&lcs, 2)?;
            let rep = grig::sk_step_verify(&lcs, 2, &x)?;
            let st = Status::from_bool(rep.within_bound);
            let mut v = serde_json::to_value(&rep).unwrap();
            v["ball_radius"] = json!(r);
            Ok((st, v))
        });
        rec.claim("diameter of G/gamma_5", "base constant", || {
            let b = grig::base_constant(&lcs)?;
            Ok((Status::VerifiedExhaustive, json!({ "value": b.value, "worst_case": b.worst_case })))
        });
    }
    Ok(())
}

const IDENTITY_TEXT: [&str; 4] = [
    "[x, (x, 1)] = (x^-1, 1, 1, 1)",
    "[x, (x, x)] = (x^-1, 1, 1, (1, x^-1) x)",
    "[x^2, (x, 1)] = (x^-1, x, 1, 1)",
    "[x^2, (x, x^-1)] = (x^-1, x, (x^-1, 1) x^-1, (1, x^-1) x)",
];

fn gupta_sidki(p: u32, suite: Suite, opts: &SuiteOptions, rec: &mut Recorder) -> Result<()> {
    GroupSpec::gupta_sidki(p)?;
    let needs_gs = [Suite::Identities, Suite::Sk, Suite::Lcs].iter().any(|&s| suite.includes(s));
    let model = if needs_gs { Some(GuptaSidki::new(p)?) } else { None };
    if suite.includes(Suite::Identities) {
        let m = model.as_ref().unwrap();
        let id = gs::GsIdentity::for_prime(p);
        rec.claim(&format!("identity {id:?}"), "p-specific commutator identity", || {
            let c = gs::verify_gs_identity(m, id)?;
            Ok((c.status, serde_json::to_value(&c).unwrap()))
        });
    }
    if suite.includes(Suite::Orders) {
        let top = if p == 3 { opts.max_level.min(3) } else { 2 };
        for n in 1..=top {
            rec.claim(
                &format!("|Gamma : Stab({n})| and |Gamma : K^(xp^{n})|"),
                "|Gamma : Stab(n)| >= p^{(p-2)(p^{n-1}-1)+1}; |Gamma : K^(xp^n)| = p^{p^n+1}",
                || {
                    let b = gs::gs_index_bounds(p, n, Some(&opts.enumerate))?;
                    let flags = [b.stab_bound_holds, b.kpow_index_holds];
                    let st = if flags.contains(&Some(false)) {
                        Status::Failed
                    } else if flags.contains(&None) {
                        Status::Inconclusive
                    } else {
                        Status::VerifiedExhaustive
                    };
                    Ok((st, serde_json::to_value(&b).unwrap()))
                },
            );
        }
    }
    if suite.includes(Suite::Lcs) {
        let m = model.as_ref().unwrap();
        rec.claim("lattice facts", "basis, normality, chain ordering, commutators of Stab(1)", || {
            let cs = gs::verify_lattice(m, opts.samples.min(50), opts.seed)?;
            Ok((status_all(cs.iter().map(|c| c.status)), serde_json::to_value(&cs).unwrap()))
        });
        rec.claim("chain sections", "x_i = (i+1)(a) i(b)^(a^-1) mod K^(xp)", || {
            let cs = gs::verify_chain_sections(m)?;
            let st = Status::from_bool(cs.iter().all(|c| c.1));
            Ok((st, serde_json::to_value(&cs).unwrap()))
        });
        if p == 3 {
            rec.claim("lower central series of Gamma_3", "|Gamma : gamma_{beta_m+1}| = 3^{(3^m+1)/2}", || {
                let gq = GsQuotient::build(3, 2, &opts.enumerate)?;
                let cs = gs::gs3_index_checks(&gq)?;
                let st = Status::from_bool(cs.iter().all(|c| c.holds));
                Ok((st, json!({ "checks": cs, "indices": gq.indices() })))
            });
        }
    }
    if suite.includes(Suite::Sk) {
        let m = model.as_ref().unwrap();
        if p == 3 {
            rec.claim("cover growth p = 3, m = 1", "X^{C_p} K^(xp^{m+1}) = Gamma", || {
                let gq = GsQuotient::build(3, 2, &opts.enumerate)?;
                let (r, x) = gq.covering_ball(1)?;
                let rep = gs::sk_step_verify_gs(&gq, 1, &x)?;
                let mut v = serde_json::to_value(&rep).unwrap();
                v["ball_radius"] = json!(r);
                Ok((Status::from_bool(rep.within_bound), v))
            });
        }
        rec.claim("cover growth components m = 2", "the three inclusion chains of the step", || {
            let r = gs::sk_components_gs(m, 2, opts.samples, opts.seed)?;
            Ok((r.status, serde_json::to_value(&r).unwrap()))
        });
    }
    if suite.includes(Suite::Constants) {
        rec.claim(&format!("C_{p}"), "C_p = 3 * 4^p - 2^p (p + 8) + 7", || {
            let c = gs::cp(p)?;
            Ok((Status::VerifiedExhaustive, json!({ "value": c.value.to_string() })))
        });
        if p == 3 {
            rec.claim("alpha and beta closed forms", "(1 + sqrt 2)^n", || {
                let s = gs::gs3_sequences(40)?;
                Ok((Status::from_bool(s.closed_forms_exact), serde_json::to_value(&s).unwrap()))
            });
        }
    }
    Ok(())
}

/// Ball size cap for the growth claims; beyond it the claim is inconclusive.
const GROWTH_CAP: usize = 2_000_000;

fn growth(group: GroupSpec, opts: &SuiteOptions, rec: &mut Recorder) {
    if group.is_grigorchuk() {
        rec.claim("f(1) = 5, f(2) = 11", "ball sizes of the standard generators", || {
            let t = spectra::growth(group, &[], 2, opts.enumerate.max_elements)?;
            Ok((Status::from_bool(t.balls == [1, 5, 11]), json!({ "balls": t.balls })))
        });
    }
    let top = match (group.is_grigorchuk(), group.prime()) {
        (true, _) => 4,
        (false, 3) => 3.min(opts.max_level),
        (false, 5) => 2,
        _ => 1,
    };
    let capped = EnumerateOptions {
        max_elements: opts.enumerate.max_elements.min(GROWTH_CAP),
        ..opts.enumerate
    };
    for n in 1..=top {
        rec.claim(&format!("growth at the diameter, level {n}"), "f(diam(F, S)) >= |F|", || {
            let c = spectra::growth_diameter_check(group, &[], n, &capped)?;
            Ok((c.status, serde_json::to_value(&c).unwrap()))
        });
    }
}

/// Gap bound and walk monotonicity on the level quotients with the
/// standard generators.
fn spectra_claims(group: GroupSpec, opts: &SuiteOptions, rec: &mut Recorder) {
    let top = match (group.is_grigorchuk(), group.prime()) {
        (true, _) => 3,
        (false, 3 | 5) => 2,
        _ => 1,
    };
    for n in 1..=top {
        rec.claim(&format!("spectral gap, level {n}"), "gap >= (|S| diam^2)^-1; walk distance non-increasing", || {
            let q = FiniteQuotient::enumerate(group, &[], QuotientKind::LevelStabilizer(n), &opts.enumerate)?;
            let words = symmetrize(&group.standard_generators());
            let s = words.iter().map(|w| q.image(w)).collect::<Result<Vec<u32>>>()?;
            gap_and_mixing(&q, &s)
        });
    }
}

/// Both checks on one pair, as a claim result.
pub fn gap_and_mixing<G: FiniteGroup + ?Sized>(g: &G, s: &[u32]) -> Result<(Status, Value)> {
    let gap = spectra::spectral_gap(g, s)?;
    let mix = spectra::mixing_time(g, s, spectra::DEFAULT_ITERATION_CAP)?;
    let ok = gap.bound_holds.unwrap_or(false) && mix.monotone;
    Ok((
        Status::from_bool(ok),
        json!({
            "order": gap.order,
            "diameter": gap.diameter,
            "lambda2": gap.lambda2,
            "gap": gap.gap,
            "paper_bound": gap.lower_bound,
            "mixing_time": mix.mixing_time,
            "monotone": mix.monotone,
            "ratio": mix.ratio(gap.gap),
        }),
    ))
}

/// Image of the coset group, used when a caller wants `G/N` spectra.
pub fn coset_spectra<G: FiniteGroup + ?Sized>(c: &CosetGroup<'_, G>, s: &[u32]) -> Result<(Status, Value)> {
    let s: Vec<u32> = s.iter().map(|&x| c.coset_of(x)).collect();
    gap_and_mixing(c, &s)
}
