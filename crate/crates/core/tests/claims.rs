//! Checks on the two groups that are too slow for unit tests.

use branchdiam::check::Status;
use branchdiam::grigorchuk::{self as grig, LcsQuotient};
use branchdiam::guptasidki::{self as gs, GuptaSidki, SubgroupName};
use branchdiam::quotient::EnumerateOptions;
use branchdiam::GeneratorWord;

#[test]
fn grigorchuk_series() {
    let lcs = LcsQuotient::build(&EnumerateOptions::default()).unwrap();
    assert_eq!(lcs.gamma(5).index(), 256);
    assert_eq!(lcs.gamma(9).index(), 1 << 14);
    for m in 1..=2 {
        assert!(!grig::verify_sandwich(&lcs, m).unwrap().is_failed(), "m = {m}");
    }
    let b = grig::base_constant(&lcs).unwrap();
    assert!(b.worst_case);
    assert_eq!(b.value, 14);
}

#[test]
fn grigorchuk_identities() {
    for idx in 1..=3 {
        assert!((1..=8).all(|n| grig::verify_commutator_identity(idx, n).unwrap()), "identity {idx}");
    }
    assert!(grig::verify_commutator_identity(4, 4).unwrap());
    assert!(!grig::verify_commutator_identity(4, 5).unwrap());
    assert!(!grig::commutator_identity_exact(4).unwrap());
}

#[test]
fn gupta_sidki_lattice() {
    for p in [3, 5] {
        let m = GuptaSidki::new(p).unwrap();
        for c in gs::verify_lattice(&m, 30, 11).unwrap() {
            assert_eq!(c.failures, 0, "p = {p}: {}", c.name);
        }
        assert!(gs::verify_chain_sections(&m).unwrap().iter().all(|c| c.1), "p = {p}");
    }
}

#[test]
fn gupta_sidki_commutators_of_stab1() {
    // [Stab(1), Stab(1)] <= K^(xp) on a few explicit elements
    let m = GuptaSidki::new(3).unwrap();
    let g = m.group();
    let words = ["b", "b^a", "b^(a')", "bb^a", "b'b^(aa)"];
    let words: Vec<GeneratorWord> = words
        .iter()
        .map(|w| {
            let w = w.replace("b^a", "a'ba").replace("b^(a')", "aba'").replace("b^(aa)", "a'a'baa");
            GeneratorWord::parse(g, &w).unwrap()
        })
        .collect();
    for u in &words {
        for v in &words {
            assert!(m.member_word(SubgroupName::Kpow(1), &u.commutator(v)).unwrap(), "[{u}, {v}]");
        }
    }
}

#[test]
fn gupta_sidki_five_identity_correction() {
    let m = GuptaSidki::new(5).unwrap();
    let c = gs::verify_gs_identity(&m, gs::GsIdentity::for_prime(5)).unwrap();
    assert_eq!(c.status, Status::Failed);
    assert!(c.corrections.iter().all(|x| x.1));
    for p in [3, 7] {
        let m = GuptaSidki::new(p).unwrap();
        assert!(!gs::verify_gs_identity(&m, gs::GsIdentity::for_prime(p)).unwrap().status.is_failed());
    }
}
