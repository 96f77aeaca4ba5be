use std::sync::OnceLock;

use branchdiam::quotient::{
    commutator_subgroup, diameter, lower_central_series, normal_closure, product, worst_case_diameter,
    EnumerateOptions, FiniteGroup, FiniteQuotient, QuotientKind, Subgroup, TableGroup, WORST_CASE_CAP,
};
use branchdiam::spectra::{self, CayleyOperator};
use branchdiam::{GeneratorWord, GroupSpec};
use nalgebra::SymmetricEigen;
use proptest::prelude::*;

fn level(g: GroupSpec, n: u32) -> FiniteQuotient {
    FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(n), &EnumerateOptions::default()).unwrap()
}

struct Fixture {
    name: &'static str,
    table: TableGroup,
    chain: Vec<Subgroup>,
}

/// Small quotients with their lower central series.
fn fixtures() -> &'static [Fixture] {
    static F: OnceLock<Vec<Fixture>> = OnceLock::new();
    F.get_or_init(|| {
        let gs3 = GroupSpec::gupta_sidki(3).unwrap();
        [
            ("G/Stab(3)", level(GroupSpec::grigorchuk(), 3)),
            ("G/Stab(4)", level(GroupSpec::grigorchuk(), 4)),
            ("Gamma_3/Stab(3)", level(gs3, 3)),
        ]
        .into_iter()
        .map(|(name, q)| {
            let table = TableGroup::from_group(&q);
            let chain = lower_central_series(&table).unwrap();
            Fixture { name, table, chain }
        })
        .collect()
    })
}

fn commutator<G: FiniteGroup + ?Sized>(g: &G, x: u32, y: u32) -> u32 {
    let xy = g.mul(x, y);
    g.mul(g.mul(g.inv(x), g.inv(y)), xy)
}

/// A normal subgroup below `top`: the normal closure of one element of it.
fn normal_below<G: FiniteGroup + ?Sized>(g: &G, top: &Subgroup, pick: usize) -> Subgroup {
    let e = top.elements()[pick % top.order()];
    normal_closure(g, &[e])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sk_congruence(f in 0usize..3, picks in prop::array::uniform8(any::<usize>())) {
        let fx = &fixtures()[f];
        let g = &fx.table;
        let whole = Subgroup::whole(g);
        let g1 = normal_below(g, &whole, picks[0]);
        let g2 = normal_below(g, &g1, picks[1]);
        let h1 = normal_below(g, &whole, picks[2]);
        let h2 = normal_below(g, &h1, picks[3]);
        let x1 = g1.elements()[picks[4] % g1.order()];
        let x2 = g2.elements()[picks[5] % g2.order()];
        let y1 = h1.elements()[picks[6] % h1.order()];
        let y2 = h2.elements()[picks[7] % h2.order()];
        let lhs = commutator(g, g.mul(x1, x2), g.mul(y1, y2));
        let diff = g.mul(lhs, g.inv(commutator(g, x1, y1)));
        let bound = product(g, &commutator_subgroup(g, &g1, &h2), &commutator_subgroup(g, &g2, &h1));
        prop_assert!(bound.contains(diff), "{}", fx.name);
    }

    #[test]
    fn symmetric_spectrum(k in 2u32..40, steps in prop::collection::vec(1u32..40, 1..4), lazy in 0usize..3) {
        // C_k with a random symmetric multiset, possibly with loops
        let perm: Vec<u32> = (0..k).map(|i| (i + 1) % k).collect();
        let (g, _) = TableGroup::from_permutations(&[perm]);
        let mut s = Vec::new();
        for &t in &steps {
            let t = t % k;
            s.push(t);
            s.push((k - t) % k);
        }
        s.extend(std::iter::repeat_n(0, lazy));
        let op = CayleyOperator::new(&g, &s).unwrap();
        let eig = SymmetricEigen::new(op.dense());
        let (top, _) = eig.eigenvalues.iter().enumerate().fold((0, f64::MIN), |a, (i, &l)| if l > a.1 { (i, l) } else { a });
        for &l in eig.eigenvalues.iter() {
            prop_assert!((-1.0 - 1e-9..=1.0 + 1e-9).contains(&l));
        }
        prop_assert!((eig.eigenvalues[top] - 1.0).abs() < 1e-10);
        let r = spectra::spectral_gap(&g, &s).unwrap();
        if r.generating {
            let v = eig.eigenvectors.column(top);
            let c = v[0];
            prop_assert!(v.iter().all(|x| (x - c).abs() < 1e-8));
            prop_assert_eq!(r.bound_holds, Some(true));
            let m = spectra::mixing_time(&g, &s, 100_000).unwrap();
            prop_assert!(m.monotone);
        }
    }

    #[test]
    fn order_ignores_generator_order(seed in any::<u64>(), n in 1u32..=4) {
        let g = GroupSpec::grigorchuk();
        let mut gens = g.standard_generators();
        let mut s = seed;
        for i in (1..gens.len()).rev() {
            s = s.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            gens.swap(i, (s >> 33) as usize % (i + 1));
        }
        let q = FiniteQuotient::enumerate(g, &gens, QuotientKind::LevelStabilizer(n), &EnumerateOptions::default()).unwrap();
        prop_assert_eq!(q.order(), [2, 8, 128, 4096][n as usize - 1]);
    }
}

#[test]
fn gamma_grading() {
    for fx in fixtures() {
        let g = &fx.table;
        let gamma = |i: usize| fx.chain.get(i - 1).cloned().unwrap_or_else(|| Subgroup::trivial(g.order()));
        for m in 1..=fx.chain.len() {
            for n in m..=fx.chain.len() {
                let c = commutator_subgroup(g, &gamma(m), &gamma(n));
                assert!(c.is_subgroup_of(&gamma(m + n)), "{}: [gamma_{m}, gamma_{n}]", fx.name);
            }
        }
    }
}

#[test]
fn standard_diameter_at_most_worst_case() {
    let gs3 = GroupSpec::gupta_sidki(3).unwrap();
    for q in [level(GroupSpec::grigorchuk(), 2), level(GroupSpec::grigorchuk(), 3), level(gs3, 2)] {
        assert!(q.order() <= WORST_CASE_CAP);
        let d = diameter(&q, q.generator_elements()).unwrap().diameter;
        assert!(d <= worst_case_diameter(&q).unwrap());
    }
}

#[test]
fn enumeration_ignores_thread_count() {
    let run = |threads: usize| {
        let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
        pool.install(|| {
            let q = level(GroupSpec::grigorchuk(), 4);
            let word = GeneratorWord::parse(GroupSpec::grigorchuk(), "abacabad[a,b]").unwrap();
            (q.order(), q.spheres().to_vec(), q.image(&word).unwrap())
        })
    };
    assert_eq!(run(1), run(4));
}

#[test]
fn growth_methods_agree() {
    for (g, r) in [(GroupSpec::grigorchuk(), 7), (GroupSpec::gupta_sidki(3).unwrap(), 5)] {
        let bfs = spectra::growth(g, &[], r, 1 << 20).unwrap();
        let lvl = spectra::growth_stabilized(g, &[], r, 12).unwrap();
        assert_eq!(bfs.balls, lvl.balls, "{g}");
    }
}
