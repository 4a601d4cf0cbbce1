//! Subsets and subgroups of a [`GroupTable`] with dense membership.

use std::fmt;

use crate::kernel::{Elem, GroupTable};

/// Fixed-width membership bitmap over a table's element indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Membership {
    words: Vec<u64>,
}

impl Membership {
    fn empty(len: usize) -> Self {
        Membership { words: vec![0; len.div_ceil(64)] }
    }

    #[inline]
    fn contains(&self, x: Elem) -> bool {
        let i = x.index();
        self.words[i >> 6] >> (i & 63) & 1 == 1
    }

    /// Returns whether `x` was newly inserted.
    #[inline]
    fn insert(&mut self, x: Elem) -> bool {
        let i = x.index();
        let bit = 1u64 << (i & 63);
        let fresh = self.words[i >> 6] & bit == 0;
        self.words[i >> 6] |= bit;
        fresh
    }

    fn is_subset_of(&self, other: &Membership) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

/// A plain subset of a group, such as the set of elements of bounded order.
///
/// Nothing is assumed about closure; see [`ElementSet::is_subgroup`].
#[derive(Clone)]
pub struct ElementSet<'g> {
    group: &'g GroupTable,
    bits: Membership,
    elements: Vec<Elem>,
}

impl<'g> ElementSet<'g> {
    pub fn from_elements(group: &'g GroupTable, elems: impl IntoIterator<Item = Elem>) -> Self {
        let mut bits = Membership::empty(group.order());
        let mut elements = Vec::new();
        for x in elems {
            if bits.insert(x) {
                elements.push(x);
            }
        }
        elements.sort_unstable();
        ElementSet { group, bits, elements }
    }

    pub fn group(&self) -> &'g GroupTable {
        self.group
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        self.bits.contains(x)
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    /// Members in increasing index order.
    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    pub fn is_subgroup(&self) -> bool {
        generated(self.group, self.elements.iter().copied()).size() == self.size()
    }

    pub fn same_members(&self, h: &SubgroupSet<'_>) -> bool {
        self.bits == h.bits
    }
}

/// A subgroup of a [`GroupTable`], stored with a generating set.
#[derive(Clone)]
pub struct SubgroupSet<'g> {
    group: &'g GroupTable,
    bits: Membership,
    elements: Vec<Elem>,
    gens: Vec<Elem>,
}

impl fmt::Debug for SubgroupSet<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SubgroupSet")
            .field("group", &self.group.label())
            .field("size", &self.size())
            .field("gens", &self.gens)
            .finish()
    }
}

impl PartialEq for SubgroupSet<'_> {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self.group, other.group) && self.bits == other.bits
    }
}

impl Eq for SubgroupSet<'_> {}

impl<'g> SubgroupSet<'g> {
    pub fn trivial(group: &'g GroupTable) -> Self {
        let mut bits = Membership::empty(group.order());
        bits.insert(Elem::IDENTITY);
        SubgroupSet { group, bits, elements: vec![Elem::IDENTITY], gens: Vec::new() }
    }

    pub fn whole(group: &'g GroupTable) -> Self {
        let mut h = SubgroupSet::trivial(group);
        for &g in group.generators() {
            h.extend(g);
        }
        debug_assert_eq!(h.size(), group.order());
        h
    }

    pub fn group(&self) -> &'g GroupTable {
        self.group
    }

    #[inline]
    pub fn contains(&self, x: Elem) -> bool {
        self.bits.contains(x)
    }

    pub fn size(&self) -> usize {
        self.elements.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.size() == 1
    }

    /// Members in closure order, starting with the identity.
    pub fn elements(&self) -> &[Elem] {
        &self.elements
    }

    /// A generating set with no redundant prefix: each generator lies
    /// outside the subgroup generated by those before it.
    pub fn generators(&self) -> &[Elem] {
        &self.gens
    }

    pub fn membership(&self) -> &Membership {
        &self.bits
    }

    pub fn is_subgroup_of(&self, other: &SubgroupSet<'_>) -> bool {
        self.bits.is_subset_of(&other.bits)
    }

    pub fn as_set(&self) -> ElementSet<'g> {
        let mut elements = self.elements.clone();
        elements.sort_unstable();
        ElementSet { group: self.group, bits: self.bits.clone(), elements }
    }

    /// Replaces `self` by `<self, x>`. Returns whether it grew.
    pub fn extend(&mut self, x: Elem) -> bool {
        if self.contains(x) {
            return false;
        }
        let g = self.group;
        let old_len = self.elements.len();
        self.gens.push(x);
        let newest = self.gens.len() - 1;
        let mut cursor = 0;
        while cursor < self.elements.len() {
            let y = self.elements[cursor];
            // Old members times old generators are already present.
            let from = if cursor < old_len { newest } else { 0 };
            for k in from..self.gens.len() {
                let z = g.mul(y, self.gens[k]);
                if self.bits.insert(z) {
                    self.elements.push(z);
                }
            }
            cursor += 1;
        }
        true
    }
}

/// The least subgroup containing `seeds`.
pub fn generated<'g>(group: &'g GroupTable, seeds: impl IntoIterator<Item = Elem>) -> SubgroupSet<'g> {
    let mut h = SubgroupSet::trivial(group);
    for s in seeds {
        h.extend(s);
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{close_generators, BuildOptions};

    fn c9() -> GroupTable {
        close_generators("c9", 3, vec![("a".into(), 1u32)], 0, |x, y| (x + y) % 9, &BuildOptions::default()).unwrap()
    }

    #[test]
    fn generated_cyclic_subgroup() {
        let g = c9();
        let a3 = g.power(g.generators()[0], 3);
        let h = generated(&g, [a3]);
        assert_eq!(h.size(), 3);
        assert_eq!(generated(&g, g.elements()).size(), 9);
        assert!(generated(&g, []).is_trivial());
    }

    #[test]
    fn redundant_seeds_are_dropped() {
        let g = c9();
        let a = g.generators()[0];
        let h = generated(&g, [g.power(a, 3), a, g.power(a, 2)]);
        assert_eq!(h.generators().len(), 2);
        assert_eq!(h.size(), 9);
    }

    #[test]
    fn element_set_closure_test() {
        let g = c9();
        let a = g.generators()[0];
        let s = ElementSet::from_elements(&g, [Elem::IDENTITY, a]);
        assert!(!s.is_subgroup());
        let t = ElementSet::from_elements(&g, [Elem::IDENTITY, g.power(a, 3), g.power(a, 6)]);
        assert!(t.is_subgroup());
    }
}
