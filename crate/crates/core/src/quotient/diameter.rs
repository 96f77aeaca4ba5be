//! Cayley-graph diameters over symmetric generating sets.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use super::group::{normal_closure, CosetGroup, FiniteGroup, Subgroup, TableGroup};
use super::FiniteQuotient;
use crate::error::{Error, Result};
use crate::words::{symmetrize, GeneratorWord};

/// Largest order accepted by [`worst_case_diameter`].
pub const WORST_CASE_CAP: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiameterReport {
    pub diameter: usize,
    /// `|B_S(r)|` for `r = 0..=diameter`.
    pub balls: Vec<usize>,
}

/// Exact diameter for the symmetric closure of `gens` (element numbers).
pub fn diameter<G: FiniteGroup + ?Sized>(g: &G, gens: &[u32]) -> Result<DiameterReport> {
    let mut sym: Vec<u32> = Vec::new();
    for &s in gens {
        for x in [s, g.inv(s)] {
            if !sym.contains(&x) {
                sym.push(x);
            }
        }
    }
    let n = g.order();
    let mut seen = vec![false; n];
    seen[0] = true;
    let mut frontier = vec![0u32];
    let mut balls = vec![1usize];
    let mut reached = 1;
    loop {
        let mut next = Vec::new();
        for &x in &frontier {
            for &s in &sym {
                let y = g.mul(x, s);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    next.push(y);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        reached += next.len();
        balls.push(reached);
        frontier = next;
    }
    if reached != n {
        return Err(Error::NonGenerating { reached, order: n });
    }
    Ok(DiameterReport {
        diameter: balls.len() - 1,
        balls,
    })
}

/// Diameter of a quotient for a set of words; inputs are symmetrized.
pub fn quotient_diameter(q: &FiniteQuotient, gens: &[GeneratorWord]) -> Result<DiameterReport> {
    let sym = symmetrize(gens);
    if sym == q.generator_words() {
        let mut balls = Vec::new();
        let mut acc = 0;
        for &s in q.spheres() {
            acc += s;
            balls.push(acc);
        }
        if acc != q.order() {
            return Err(Error::NonGenerating {
                reached: acc,
                order: q.order(),
            });
        }
        return Ok(DiameterReport {
            diameter: balls.len() - 1,
            balls,
        });
    }
    let imgs = sym.iter().map(|w| q.image(w)).collect::<Result<Vec<u32>>>()?;
    diameter(q, &imgs)
}

fn smallest_prime_factor(n: usize) -> usize {
    (2..=n).find(|d| n.is_multiple_of(*d)).unwrap_or(n)
}

/// Largest diameter over all symmetric generating sets of a finite p-group.
///
/// Supersets never have larger diameter, so only minimal symmetric
/// generating sets matter; by the Burnside basis theorem these are the sets
/// `{g_1^{±1}, ..., g_d^{±1}}` whose images form a basis of the Frattini
/// quotient. Sets conjugate to one already measured are skipped.
pub fn worst_case_diameter<G: FiniteGroup + ?Sized>(g: &G) -> Result<usize> {
    let n = g.order();
    if n > WORST_CASE_CAP {
        return Err(Error::Refused(format!(
            "worst-case diameter needs order at most {WORST_CASE_CAP}, got {n}"
        )));
    }
    if n == 1 {
        return Ok(0);
    }
    let t = TableGroup::from_group(g);
    let p = smallest_prime_factor(n);
    if n != p.pow(n.ilog(p)) {
        return Err(Error::InvalidRequest(format!("order {n} is not a prime power")));
    }
    let mut frat_gens = Vec::new();
    for &s in t.generators() {
        frat_gens.push(t.pow(s, p as u64));
        for &u in t.generators() {
            frat_gens.push(t.commutator(s, u));
        }
    }
    let phi = normal_closure(&t, &frat_gens);
    let fq = CosetGroup::new(&t, &phi);
    let f = TableGroup::from_group(&fq);
    let d = f.order().ilog(p) as usize;

    // one representative per block {g, g^-1} outside the Frattini subgroup
    let blocks: Vec<u32> = (0..n as u32)
        .filter(|&x| !phi.contains(x) && x <= t.inv(x))
        .collect();
    let img: Vec<u32> = blocks.iter().map(|&x| fq.coset_of(x)).collect();

    let mut best = 0;
    let mut seen: HashSet<Vec<u32>> = HashSet::new();
    let mut choice = Vec::with_capacity(d);
    let canon = |x: u32| x.min(t.inv(x));
    search(&blocks, &img, &f, d, 0, &mut choice, &mut |chosen: &[u32]| {
        let mut key: Vec<u32> = chosen.to_vec();
        key.sort_unstable();
        if seen.contains(&key) {
            return Ok(());
        }
        for c in 0..n as u32 {
            let mut k: Vec<u32> = chosen.iter().map(|&x| canon(t.conjugate(x, c))).collect();
            k.sort_unstable();
            seen.insert(k);
        }
        let r = diameter(&t, chosen)?;
        best = best.max(r.diameter);
        Ok(())
    })?;
    Ok(best)
}

/// Visits every `d`-subset of blocks whose Frattini images span `f`.
fn search<F>(
    blocks: &[u32],
    img: &[u32],
    f: &TableGroup,
    d: usize,
    start: usize,
    choice: &mut Vec<usize>,
    visit: &mut F,
) -> Result<()>
where
    F: FnMut(&[u32]) -> Result<()>,
{
    if choice.len() == d {
        let chosen: Vec<u32> = choice.iter().map(|&i| blocks[i]).collect();
        return visit(&chosen);
    }
    let span = Subgroup::generated(f, &choice.iter().map(|&i| img[i]).collect::<Vec<_>>());
    for i in start..blocks.len() {
        // keep only independent images
        if span.contains(img[i]) {
            continue;
        }
        choice.push(i);
        search(blocks, img, f, d, i + 1, choice, visit)?;
        choice.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::{EnumerateOptions, QuotientKind};
    use crate::words::GroupSpec;

    /// Every symmetric subset, generating or not.
    fn brute_force_worst(t: &TableGroup) -> usize {
        let n = t.order() as u32;
        let blocks: Vec<u32> = (1..n).filter(|&x| x <= t.inv(x)).collect();
        let mut best = 0;
        for mask in 1u64..(1 << blocks.len()) {
            let s: Vec<u32> = (0..blocks.len())
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| blocks[i])
                .collect();
            if let Ok(r) = diameter(t, &s) {
                best = best.max(r.diameter);
            }
        }
        best
    }

    #[test]
    fn c2_diameter() {
        let g = GroupSpec::grigorchuk();
        let q = FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(1), &EnumerateOptions::default())
            .unwrap();
        let a = GeneratorWord::parse(g, "a").unwrap();
        assert_eq!(quotient_diameter(&q, &[a]).unwrap().diameter, 1);
        assert_eq!(worst_case_diameter(&q).unwrap(), 1);
    }

    #[test]
    fn full_set_has_diameter_one() {
        let g = GroupSpec::grigorchuk();
        let q = FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(2), &EnumerateOptions::default())
            .unwrap();
        let all: Vec<u32> = (1..q.order() as u32).collect();
        assert_eq!(diameter(&q, &all).unwrap().diameter, 1);
    }

    #[test]
    fn worst_case_matches_brute_force_order_8() {
        let g = GroupSpec::grigorchuk();
        let q = FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(2), &EnumerateOptions::default())
            .unwrap();
        assert_eq!(q.order(), 8);
        let t = TableGroup::from_group(&q);
        let w = worst_case_diameter(&q).unwrap();
        assert_eq!(w, brute_force_worst(&t));
        let d = quotient_diameter(&q, &g.standard_generators()).unwrap().diameter;
        assert!(d <= w);
    }

    #[test]
    fn worst_case_matches_brute_force_order_16() {
        let g = GroupSpec::grigorchuk();
        let q = FiniteQuotient::enumerate(g, &[], QuotientKind::BranchPower(0), &EnumerateOptions::default())
            .unwrap();
        assert_eq!(q.order(), 16);
        let t = TableGroup::from_group(&q);
        assert_eq!(worst_case_diameter(&q).unwrap(), brute_force_worst(&t));
    }

    #[test]
    fn cyclic_three_symmetric() {
        let g = GroupSpec::gupta_sidki(3).unwrap();
        let q = FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(1), &EnumerateOptions::default())
            .unwrap();
        assert_eq!(q.order(), 3);
        assert_eq!(worst_case_diameter(&q).unwrap(), 1);
    }

    #[test]
    fn non_generating() {
        let g = GroupSpec::grigorchuk();
        let q = FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(2), &EnumerateOptions::default())
            .unwrap();
        let b = GeneratorWord::parse(g, "b").unwrap();
        assert!(matches!(
            quotient_diameter(&q, &[b]),
            Err(Error::NonGenerating { order: 8, .. })
        ));
    }

    #[test]
    fn refuses_large() {
        let g = GroupSpec::grigorchuk();
        let q = FiniteQuotient::enumerate(g, &[], QuotientKind::LevelStabilizer(4), &EnumerateOptions::default())
            .unwrap();
        assert!(matches!(worst_case_diameter(&q), Err(Error::Refused(_))));
    }
}
