//! Cover growth for one Solovay-Kitaev step: how many factors from a set `X`
//! are needed to reach every element of a finite group.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quotient::{CosetGroup, FiniteGroup};
use crate::words::{symmetrize, GeneratorWord};

/// Outcome of a cover-growth computation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkReport {
    pub group: String,
    pub m: u32,
    /// The quotient that must be covered, e.g. `G/gamma_9`.
    pub target: String,
    pub target_order: usize,
    /// Number of distinct images of `X` in the target.
    pub x_images: usize,
    pub x_words: usize,
    /// Least `e` with `X^0 u ... u X^e` equal to the target.
    pub e: usize,
    pub bound: u64,
    pub within_bound: bool,
    /// Elements reached with at most `r` factors, `r = 0..=e`.
    pub balls: Vec<usize>,
    pub sample_witnesses: Vec<String>,
    /// For each target element, indices into `x` whose product represents it.
    #[serde(skip)]
    pub witnesses: Vec<Vec<u32>>,
    #[serde(skip)]
    pub x: Vec<GeneratorWord>,
}

impl SkReport {
    /// The witness for target element `t` as a word.
    pub fn witness_word(&self, t: usize) -> GeneratorWord {
        let group = self.x[0].group();
        self.witnesses[t]
            .iter()
            .fold(GeneratorWord::identity(group), |acc, &i| acc.mul(&self.x[i as usize]))
    }
}

/// Symmetric closure of `X` that keeps the identity when `X` has it.
pub fn symmetric_set(x: &[GeneratorWord]) -> Vec<GeneratorWord> {
    let mut out = symmetrize(x);
    if let Some(id) = x.iter().find(|w| w.is_empty()) {
        out.insert(0, id.clone());
    }
    out
}

/// Breadth-first search over the Cayley graph of `g` with steps `steps`.
/// Returns, per element, the previous element and the step used, plus the
/// sphere sizes. Elements never reached keep `u32::MAX`.
pub(crate) fn bfs_tree<G: FiniteGroup + ?Sized>(
    g: &G,
    steps: &[u32],
    radius: Option<usize>,
) -> (Vec<(u32, u32)>, Vec<usize>) {
    let n = g.order();
    let mut prev = vec![(u32::MAX, u32::MAX); n];
    prev[0] = (0, u32::MAX);
    let mut frontier = vec![0u32];
    let mut spheres = vec![1usize];
    let mut reached = 1;
    while !frontier.is_empty() && reached < n && radius.is_none_or(|r| spheres.len() <= r) {
        // products in parallel per chunk, first discovery decided in
        // frontier order; stop as soon as everything is reached
        let mut next = Vec::new();
        for chunk in frontier.chunks(256) {
            let products: Vec<u32> = chunk
                .par_iter()
                .flat_map_iter(|&u| steps.iter().map(move |&s| g.mul(u, s)))
                .collect();
            for (k, &v) in products.iter().enumerate() {
                if prev[v as usize].0 == u32::MAX {
                    prev[v as usize] = (chunk[k / steps.len()], (k % steps.len()) as u32);
                    next.push(v);
                }
            }
            if reached + next.len() == n {
                break;
            }
        }
        if next.is_empty() {
            break;
        }
        reached += next.len();
        spheres.push(next.len());
        frontier = next;
    }
    (prev, spheres)
}

/// Path of step indices from the identity to `t`.
pub(crate) fn path_to(prev: &[(u32, u32)], t: u32) -> Vec<u32> {
    let mut out = Vec::new();
    let mut v = t;
    while v != 0 {
        let (u, s) = prev[v as usize];
        out.push(s);
        v = u;
    }
    out.reverse();
    out
}

/// One word per element of the ball of radius `radius` in `g`, for the
/// symmetric closure of `gens`.
pub fn ball_words<G: FiniteGroup + ?Sized>(
    g: &G,
    gens: &[GeneratorWord],
    image: impl Fn(&GeneratorWord) -> Result<u32>,
    radius: usize,
) -> Result<Vec<(u32, GeneratorWord)>> {
    let sym = symmetrize(gens);
    let imgs = sym.iter().map(&image).collect::<Result<Vec<u32>>>()?;
    let (prev, _) = bfs_tree(g, &imgs, Some(radius));
    let group = sym[0].group();
    let mut out = Vec::new();
    for t in 0..g.order() as u32 {
        if prev[t as usize].0 == u32::MAX {
            continue;
        }
        let w = path_to(&prev, t)
            .iter()
            .fold(GeneratorWord::identity(group), |acc, &i| acc.mul(&sym[i as usize]));
        out.push((t, w));
    }
    Ok(out)
}

/// Checks `X N = G` inside the parent of `cosets`; the error names a coset
/// that `X` misses by a word in the standard generators.
pub fn check_covers<G: FiniteGroup + ?Sized>(
    cosets: &CosetGroup<'_, G>,
    x_imgs: &[u32],
    std_words: &[GeneratorWord],
    std_imgs: &[u32],
    what: &str,
) -> Result<()> {
    let mut hit = vec![false; cosets.order()];
    for &x in x_imgs {
        hit[cosets.coset_of(x) as usize] = true;
    }
    if let Some(c) = hit.iter().position(|h| !h) {
        let steps: Vec<u32> = std_imgs.iter().map(|&s| cosets.coset_of(s)).collect();
        let (prev, _) = bfs_tree(cosets, &steps, None);
        let group = std_words[0].group();
        let w = path_to(&prev, c as u32)
            .iter()
            .fold(GeneratorWord::identity(group), |acc, &i| acc.mul(&std_words[i as usize]));
        return Err(Error::Precondition(format!(
            "X meets only {} of the {} cosets of {what}; the coset of {w} is missed",
            hit.iter().filter(|&&h| h).count(),
            cosets.order()
        )));
    }
    Ok(())
}

/// Least `e` with `X^{<=e}` covering `g`, plus witnesses.
pub fn cover<G: FiniteGroup + ?Sized>(g: &G, x_imgs: &[u32]) -> Result<(usize, Vec<usize>, Vec<Vec<u32>>)> {
    // distinct images, remembering the first word behind each
    let mut first: HashMap<u32, u32> = HashMap::new();
    let mut steps = Vec::new();
    let mut step_word = Vec::new();
    for (i, &x) in x_imgs.iter().enumerate() {
        if x != 0 && !first.contains_key(&x) {
            first.insert(x, i as u32);
            steps.push(x);
            step_word.push(i as u32);
        }
    }
    let (prev, spheres) = bfs_tree(g, &steps, None);
    let reached: usize = spheres.iter().sum();
    if reached != g.order() {
        return Err(Error::NonGenerating {
            reached,
            order: g.order(),
        });
    }
    let witnesses = (0..g.order() as u32)
        .map(|t| path_to(&prev, t).iter().map(|&s| step_word[s as usize]).collect())
        .collect();
    let mut balls = Vec::with_capacity(spheres.len());
    let mut acc = 0;
    for s in spheres {
        acc += s;
        balls.push(acc);
    }
    Ok((balls.len() - 1, balls, witnesses))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quotient::TableGroup;

    fn cyclic(n: u32) -> TableGroup {
        let perm: Vec<u32> = (0..n).map(|i| (i + 1) % n).collect();
        TableGroup::from_permutations(&[perm]).0
    }

    #[test]
    fn cover_of_cyclic_group() {
        let g = cyclic(12);
        let one = g.generators()[0];
        let (e, balls, w) = cover(&g, &[one, g.inv(one)]).unwrap();
        assert_eq!(e, 6);
        assert_eq!(balls.last().copied(), Some(12));
        for t in 0..12u32 {
            let prod = w[t as usize]
                .iter()
                .fold(0, |acc, &i| g.mul(acc, [one, g.inv(one)][i as usize]));
            assert_eq!(prod, t);
        }
    }

    #[test]
    fn everything_in_x_gives_one() {
        let g = cyclic(7);
        let all: Vec<u32> = (0..7).collect();
        assert_eq!(cover(&g, &all).unwrap().0, 1);
    }

    #[test]
    fn identity_only_does_not_cover() {
        let g = cyclic(5);
        assert!(matches!(cover(&g, &[0]), Err(Error::NonGenerating { reached: 1, .. })));
    }
}
