//! Finite groups given by an element numbering and a multiplication oracle,
//! with subgroup closures, normal closures, coset groups and the lower
//! central series.

use fixedbitset::FixedBitSet;

use crate::error::{Error, Result};

/// A finite group whose elements are numbered `0..order` with the identity
/// at 0.
pub trait FiniteGroup: Sync {
    fn order(&self) -> usize;

    fn mul(&self, a: u32, b: u32) -> u32;

    fn inv(&self, a: u32) -> u32;

    /// A generating set (closed under inverses for quotients built here).
    fn generators(&self) -> &[u32];

    fn pow(&self, a: u32, k: u64) -> u32 {
        let mut out = 0;
        let mut base = a;
        let mut k = k;
        while k > 0 {
            if k & 1 == 1 {
                out = self.mul(out, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        out
    }

    fn commutator(&self, a: u32, b: u32) -> u32 {
        let ab = self.mul(a, b);
        let ba = self.mul(b, a);
        self.mul(self.inv(ba), ab)
    }

    fn conjugate(&self, a: u32, by: u32) -> u32 {
        self.mul(self.mul(self.inv(by), a), by)
    }

    fn element_order(&self, a: u32) -> u64 {
        let mut k = 1;
        let mut x = a;
        while x != 0 {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }
}

/// A subgroup of a numbered finite group, stored as a membership bitmask and
/// an element list.
#[derive(Debug, Clone)]
pub struct Subgroup {
    members: FixedBitSet,
    elements: Vec<u32>,
    gens: Vec<u32>,
    parent_order: usize,
}

impl PartialEq for Subgroup {
    fn eq(&self, other: &Self) -> bool {
        self.members == other.members
    }
}

impl Eq for Subgroup {}

impl Subgroup {
    pub fn trivial(parent_order: usize) -> Subgroup {
        let mut members = FixedBitSet::with_capacity(parent_order);
        members.insert(0);
        Subgroup {
            members,
            elements: vec![0],
            gens: Vec::new(),
            parent_order,
        }
    }

    pub fn whole<G: FiniteGroup + ?Sized>(g: &G) -> Subgroup {
        let mut members = FixedBitSet::with_capacity(g.order());
        members.insert_range(..);
        Subgroup {
            members,
            elements: (0..g.order() as u32).collect(),
            gens: g.generators().to_vec(),
            parent_order: g.order(),
        }
    }

    /// The subgroup generated by `gens`.
    pub fn generated<G: FiniteGroup + ?Sized>(g: &G, gens: &[u32]) -> Subgroup {
        let mut h = Subgroup::trivial(g.order());
        for &x in gens {
            h.add_generator(g, x);
        }
        h
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    pub fn index(&self) -> usize {
        self.parent_order / self.elements.len()
    }

    pub fn contains(&self, x: u32) -> bool {
        self.members.contains(x as usize)
    }

    pub fn elements(&self) -> &[u32] {
        &self.elements
    }

    pub fn generators(&self) -> &[u32] {
        &self.gens
    }

    pub fn is_trivial(&self) -> bool {
        self.elements.len() == 1
    }

    pub fn is_subgroup_of(&self, other: &Subgroup) -> bool {
        self.members.is_subset(&other.members)
    }

    /// Extends the subgroup by one element using right cosets of the
    /// current subgroup (Dimino's method). Returns whether it grew.
    pub fn add_generator<G: FiniteGroup + ?Sized>(&mut self, g: &G, x: u32) -> bool {
        if self.contains(x) {
            return false;
        }
        self.gens.push(x);
        let base: Vec<u32> = self.elements.clone();
        let mut reps: Vec<u32> = vec![0];
        self.add_coset(g, &base, x);
        reps.push(x);
        let mut i = 0;
        while i < reps.len() {
            let r = reps[i];
            for k in 0..self.gens.len() {
                let t = g.mul(r, self.gens[k]);
                if !self.contains(t) {
                    self.add_coset(g, &base, t);
                    reps.push(t);
                }
            }
            i += 1;
        }
        true
    }

    fn add_coset<G: FiniteGroup + ?Sized>(&mut self, g: &G, base: &[u32], t: u32) {
        for &h in base {
            let y = g.mul(h, t);
            self.members.insert(y as usize);
            self.elements.push(y);
        }
    }

    /// Smallest normal subgroup of `g` containing this subgroup.
    pub fn normal_closure<G: FiniteGroup + ?Sized>(mut self, g: &G) -> Subgroup {
        let ggens = g.generators().to_vec();
        let mut i = 0;
        while i < self.gens.len() {
            let h = self.gens[i];
            for &s in &ggens {
                let c = g.conjugate(h, s);
                self.add_generator(g, c);
            }
            i += 1;
        }
        self
    }

    pub fn is_normal<G: FiniteGroup + ?Sized>(&self, g: &G) -> bool {
        self.gens.iter().all(|&h| {
            g.generators()
                .iter()
                .all(|&s| self.contains(g.conjugate(h, s)))
        })
    }
}

pub fn normal_closure<G: FiniteGroup + ?Sized>(g: &G, elems: &[u32]) -> Subgroup {
    Subgroup::generated(g, elems).normal_closure(g)
}

/// `[A, B]` for normal subgroups `A`, `B`.
pub fn commutator_subgroup<G: FiniteGroup + ?Sized>(g: &G, a: &Subgroup, b: &Subgroup) -> Subgroup {
    let mut comms = Vec::new();
    for &x in a.generators() {
        for &y in b.generators() {
            comms.push(g.commutator(x, y));
        }
    }
    normal_closure(g, &comms)
}

/// Product `AB` of two subgroups, one of which is normal.
pub fn product<G: FiniteGroup + ?Sized>(g: &G, a: &Subgroup, b: &Subgroup) -> Subgroup {
    let mut out = a.clone();
    for &y in b.generators() {
        out.add_generator(g, y);
    }
    out
}

/// `gamma_1 = G`, `gamma_{i+1} = [G, gamma_i]`, down to the trivial group.
pub fn lower_central_series<G: FiniteGroup + ?Sized>(g: &G) -> Result<Vec<Subgroup>> {
    let mut chain = vec![Subgroup::whole(g)];
    loop {
        let last = chain.last().unwrap();
        if last.is_trivial() {
            return Ok(chain);
        }
        let mut comms = Vec::new();
        for &s in g.generators() {
            for &h in last.generators() {
                comms.push(g.commutator(s, h));
            }
        }
        let next = normal_closure(g, &comms);
        if next.order() == last.order() {
            return Err(Error::Inconsistent(format!(
                "lower central series stalls at order {}; the group is not nilpotent",
                next.order()
            )));
        }
        chain.push(next);
    }
}

/// `G/N` for a normal subgroup `N`, with cosets numbered by the first
/// parent element (in index order) that lies in them.
pub struct CosetGroup<'a, G: FiniteGroup + ?Sized> {
    parent: &'a G,
    coset_of: Vec<u32>,
    reps: Vec<u32>,
    gens: Vec<u32>,
}

impl<'a, G: FiniteGroup + ?Sized> CosetGroup<'a, G> {
    pub fn new(parent: &'a G, normal: &Subgroup) -> CosetGroup<'a, G> {
        let n = parent.order();
        let mut coset_of = vec![u32::MAX; n];
        let mut reps = Vec::with_capacity(n / normal.order());
        for g in 0..n as u32 {
            if coset_of[g as usize] != u32::MAX {
                continue;
            }
            let id = reps.len() as u32;
            reps.push(g);
            for &h in normal.elements() {
                coset_of[parent.mul(g, h) as usize] = id;
            }
        }
        let mut gens: Vec<u32> = Vec::new();
        for &s in parent.generators() {
            let c = coset_of[s as usize];
            if !gens.contains(&c) {
                gens.push(c);
            }
        }
        CosetGroup {
            parent,
            coset_of,
            reps,
            gens,
        }
    }

    pub fn parent(&self) -> &'a G {
        self.parent
    }

    pub fn coset_of(&self, g: u32) -> u32 {
        self.coset_of[g as usize]
    }

    pub fn representative(&self, c: u32) -> u32 {
        self.reps[c as usize]
    }

    /// Image of a parent subgroup.
    pub fn image_of(&self, h: &Subgroup) -> Subgroup {
        let gens: Vec<u32> = h.generators().iter().map(|&x| self.coset_of(x)).collect();
        Subgroup::generated(self, &gens)
    }

    /// Preimage of a subgroup of the quotient.
    pub fn preimage(&self, h: &Subgroup) -> Subgroup {
        let mut members = FixedBitSet::with_capacity(self.parent.order());
        let mut elements = Vec::new();
        for g in 0..self.parent.order() as u32 {
            if h.contains(self.coset_of(g)) {
                members.insert(g as usize);
                elements.push(g);
            }
        }
        // generators: coset representatives of h's generators plus the kernel
        let mut gens: Vec<u32> = h.generators().iter().map(|&c| self.representative(c)).collect();
        let kernel: Vec<u32> = (0..self.parent.order() as u32)
            .filter(|&g| self.coset_of(g) == 0)
            .collect();
        let ksub = Subgroup::generated(self.parent, &kernel);
        gens.extend_from_slice(ksub.generators());
        Subgroup {
            members,
            elements,
            gens,
            parent_order: self.parent.order(),
        }
    }
}

impl<G: FiniteGroup + ?Sized> FiniteGroup for CosetGroup<'_, G> {
    fn order(&self) -> usize {
        self.reps.len()
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        self.coset_of[self.parent.mul(self.reps[a as usize], self.reps[b as usize]) as usize]
    }

    fn inv(&self, a: u32) -> u32 {
        self.coset_of[self.parent.inv(self.reps[a as usize]) as usize]
    }

    fn generators(&self) -> &[u32] {
        &self.gens
    }
}

/// A group with a full multiplication table; used for small groups where
/// table lookups beat recomputing products.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TableGroup {
    order: usize,
    table: Vec<u32>,
    inverse: Vec<u32>,
    gens: Vec<u32>,
}

impl TableGroup {
    pub fn from_group<G: FiniteGroup + ?Sized>(g: &G) -> TableGroup {
        let n = g.order();
        let mut table = vec![0u32; n * n];
        for a in 0..n {
            for b in 0..n {
                table[a * n + b] = g.mul(a as u32, b as u32);
            }
        }
        let inverse = (0..n as u32).map(|a| g.inv(a)).collect();
        TableGroup {
            order: n,
            table,
            inverse,
            gens: g.generators().to_vec(),
        }
    }

    /// The group generated by permutations of a small point set, numbered in
    /// breadth-first order from the identity. Returns the group and the
    /// element index of each input permutation.
    pub fn from_permutations(perms: &[Vec<u32>]) -> (TableGroup, Vec<u32>) {
        let points = perms.first().map_or(0, |p| p.len());
        let compose = |u: &[u32], v: &[u32]| -> Vec<u32> { u.iter().map(|&x| v[x as usize]).collect() };
        let mut elems: Vec<Vec<u32>> = vec![(0..points as u32).collect()];
        let mut index = std::collections::HashMap::new();
        index.insert(elems[0].clone(), 0u32);
        let mut i = 0;
        while i < elems.len() {
            for s in perms {
                let t = compose(&elems[i], s);
                if !index.contains_key(&t) {
                    index.insert(t.clone(), elems.len() as u32);
                    elems.push(t);
                }
            }
            i += 1;
        }
        let n = elems.len();
        let mut table = vec![0u32; n * n];
        let mut inverse = vec![0u32; n];
        for a in 0..n {
            for b in 0..n {
                let c = index[&compose(&elems[a], &elems[b])];
                table[a * n + b] = c;
                if c == 0 {
                    inverse[a] = b as u32;
                }
            }
        }
        let gen_idx: Vec<u32> = perms.iter().map(|s| index[s]).collect();
        let mut gens = Vec::new();
        for &g in &gen_idx {
            for x in [g, inverse[g as usize]] {
                if x != 0 && !gens.contains(&x) {
                    gens.push(x);
                }
            }
        }
        (
            TableGroup {
                order: n,
                table,
                inverse,
                gens,
            },
            gen_idx,
        )
    }

    pub fn with_generators(mut self, gens: Vec<u32>) -> TableGroup {
        self.gens = gens;
        self
    }
}

impl FiniteGroup for TableGroup {
    fn order(&self) -> usize {
        self.order
    }

    fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    fn generators(&self) -> &[u32] {
        &self.gens
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dihedral(n: u32) -> TableGroup {
        let r: Vec<u32> = (0..n).map(|i| (i + 1) % n).collect();
        let s: Vec<u32> = (0..n).map(|i| (n - i) % n).collect();
        TableGroup::from_permutations(&[r, s]).0
    }

    /// Unitriangular 3x3 matrices over F_3 (Heisenberg group, order 27),
    /// as permutations of F_3^3 acting on row vectors.
    fn heisenberg() -> TableGroup {
        let enc = |v: [u32; 3]| v[0] * 9 + v[1] * 3 + v[2];
        let mat = |m: [[u32; 3]; 3]| -> Vec<u32> {
            (0..27u32)
                .map(|i| {
                    let v = [i / 9, (i / 3) % 3, i % 3];
                    let mut w = [0u32; 3];
                    for (j, wj) in w.iter_mut().enumerate() {
                        *wj = (0..3).map(|k| v[k] * m[k][j]).sum::<u32>() % 3;
                    }
                    enc(w)
                })
                .collect()
        };
        let x = mat([[1, 1, 0], [0, 1, 0], [0, 0, 1]]);
        let y = mat([[1, 0, 0], [0, 1, 1], [0, 0, 1]]);
        TableGroup::from_permutations(&[x, y]).0
    }

    fn brute_commutator(g: &TableGroup, a: &Subgroup, b: &Subgroup) -> Subgroup {
        let mut comms = Vec::new();
        for &x in a.elements() {
            for &y in b.elements() {
                comms.push(g.commutator(x, y));
            }
        }
        Subgroup::generated(g, &comms)
    }

    #[test]
    fn orders() {
        assert_eq!(dihedral(4).order(), 8);
        assert_eq!(heisenberg().order(), 27);
    }

    #[test]
    fn subgroup_closure_and_index() {
        let g = dihedral(8);
        let r = g.generators()[0];
        let h = Subgroup::generated(&g, &[r]);
        assert_eq!(h.order(), 8);
        assert_eq!(h.index(), 2);
        assert!(h.is_normal(&g));
        let t = Subgroup::generated(&g, &[]);
        assert_eq!(t.index(), 16);
        assert!(normal_closure(&g, &[0]).is_trivial());
        assert_eq!(normal_closure(&g, g.generators()).order(), 16);
    }

    #[test]
    fn lcs_of_dihedral_16() {
        let g = dihedral(8);
        let chain = lower_central_series(&g).unwrap();
        let orders: Vec<usize> = chain.iter().map(|h| h.order()).collect();
        assert_eq!(orders, vec![16, 4, 2, 1]);
        let idx: usize = chain.windows(2).map(|w| w[0].order() / w[1].order()).product();
        assert_eq!(idx, 16);
    }

    #[test]
    fn commutator_subgroup_matches_brute_force() {
        for g in [dihedral(8), heisenberg(), dihedral(4)] {
            let chain = lower_central_series(&g).unwrap();
            for a in &chain {
                for b in &chain {
                    assert_eq!(commutator_subgroup(&g, a, b), brute_commutator(&g, a, b));
                }
            }
        }
    }

    #[test]
    fn abelian_collapses() {
        let c = TableGroup::from_permutations(&[vec![1, 2, 3, 4, 0]]).0;
        let chain = lower_central_series(&c).unwrap();
        assert_eq!(chain.len(), 2);
    }

    #[test]
    fn cosets() {
        let g = heisenberg();
        let chain = lower_central_series(&g).unwrap();
        let q = CosetGroup::new(&g, &chain[1]);
        assert_eq!(q.order(), 9);
        let qchain = lower_central_series(&q).unwrap();
        assert_eq!(qchain.len(), 2);
        let pre = q.preimage(&Subgroup::trivial(9));
        assert_eq!(pre, chain[1]);
        let full = q.preimage(&Subgroup::whole(&q));
        assert_eq!(full.order(), 27);
    }
}
