//! Omega and agemo subgroups, commutator subgroups, the lower central
//! series and the numeric invariants derived from them.
//!
//! Every operation that takes a [`SubgroupSet`] as its first argument
//! treats that subgroup as a group in its own right: `omega_set(&h, i)` is
//! the set of elements of `h` (not of the parent table) of order at most
//! `p^i`. Pass [`SubgroupSet::whole`] to work in the full group.

use crate::kernel::{Elem, GroupTable};
use crate::subgroups::{generated, ElementSet, SubgroupSet};

/// Elements of `h` of order at most `p^i`. For `i < 0` this is `{1}`.
pub fn omega_set<'g>(h: &SubgroupSet<'g>, i: i64) -> ElementSet<'g> {
    let g = h.group();
    if i < 0 {
        return ElementSet::from_elements(g, [Elem::IDENTITY]);
    }
    ElementSet::from_elements(g, h.elements().iter().copied().filter(|&x| (g.order_log(x) as i64) <= i))
}

/// The subgroup generated by [`omega_set`].
pub fn omega_subgroup<'g>(h: &SubgroupSet<'g>, i: i64) -> SubgroupSet<'g> {
    generated(h.group(), omega_set(h, i).elements().iter().copied())
}

/// The subgroup generated by all `p^i`-th powers of elements of `h`.
pub fn power_of_subgroup<'g>(h: &SubgroupSet<'g>, i: u32) -> SubgroupSet<'g> {
    let g = h.group();
    if i == 0 {
        return h.clone();
    }
    generated(g, h.elements().iter().map(|&x| g.power_p(x, i)))
}

/// `G^{p^i}` for the whole table.
pub fn power_subgroup(g: &GroupTable, i: u32) -> SubgroupSet<'_> {
    power_of_subgroup(&SubgroupSet::whole(g), i)
}

/// The smallest subgroup of `within` containing `seeds` and normalized by `within`.
pub fn normal_closure<'g>(within: &SubgroupSet<'g>, seeds: impl IntoIterator<Item = Elem>) -> SubgroupSet<'g> {
    let g = within.group();
    let mut n = generated(g, seeds);
    let mut cursor = 0;
    while cursor < n.generators().len() {
        let x = n.generators()[cursor];
        for &z in within.generators() {
            n.extend(g.conjugate(x, z));
        }
        cursor += 1;
    }
    n
}

/// `[A, B]`, the subgroup generated by all `[a, b]`.
///
/// Computed as the normal closure in `<A, B>` of the commutators of the
/// two generating sets.
pub fn commutator_subgroup<'g>(a: &SubgroupSet<'g>, b: &SubgroupSet<'g>) -> SubgroupSet<'g> {
    let g = a.group();
    let joint = generated(g, a.generators().iter().chain(b.generators()).copied());
    let seeds = a
        .generators()
        .iter()
        .flat_map(|&x| b.generators().iter().map(move |&y| (x, y)))
        .map(|(x, y)| g.commutator(x, y));
    normal_closure(&joint, seeds)
}

/// `[gamma_1 = H, gamma_2 = [H,H], gamma_3 = [gamma_2, H], ...]`, ending at
/// the first trivial term or after `up_to` terms.
pub fn lower_central_series<'g>(h: &SubgroupSet<'g>, up_to: usize) -> Vec<SubgroupSet<'g>> {
    let mut series = vec![h.clone()];
    while series.len() < up_to.max(1) {
        let last = series.last().expect("series is non-empty");
        if last.is_trivial() {
            break;
        }
        let next = commutator_subgroup(last, h);
        series.push(next);
    }
    series
}

/// `gamma_k` of a complete series (one ending in the trivial subgroup).
pub fn series_term<'g>(series: &[SubgroupSet<'g>], k: usize) -> SubgroupSet<'g> {
    assert!(k >= 1, "lower central series is indexed from 1");
    match series.get(k - 1) {
        Some(term) => term.clone(),
        None => {
            let last = series.last().expect("series is non-empty");
            assert!(last.is_trivial(), "series was truncated before gamma_{k}");
            last.clone()
        }
    }
}

/// The subgroup generated by the union of `parts`.
pub fn subgroup_product<'g>(g: &'g GroupTable, parts: &[SubgroupSet<'g>]) -> SubgroupSet<'g> {
    generated(g, parts.iter().flat_map(|h| h.generators().iter().copied()))
}

/// `|G : H|`. Panics if `h` is not a subgroup of `g`.
pub fn index(g: &SubgroupSet<'_>, h: &SubgroupSet<'_>) -> usize {
    assert!(h.is_subgroup_of(g), "index of a non-subgroup");
    assert_eq!(g.size() % h.size(), 0, "Lagrange violated");
    g.size() / h.size()
}

/// `e` with `exp H = p^e`.
pub fn exponent_log_of(h: &SubgroupSet<'_>) -> u32 {
    let g = h.group();
    h.elements().iter().map(|&x| g.order_log(x)).max().unwrap_or(0)
}

pub fn exponent_of(h: &SubgroupSet<'_>) -> u64 {
    (h.group().prime() as u64).pow(exponent_log_of(h))
}

pub fn nilpotency_class(h: &SubgroupSet<'_>) -> usize {
    lower_central_series(h, usize::MAX).len() - 1
}

/// Whether `h` is normalized by every element of `g`.
pub fn is_normal(g: &SubgroupSet<'_>, h: &SubgroupSet<'_>) -> bool {
    let t = g.group();
    h.is_subgroup_of(g) && g.generators().iter().all(|&z| h.generators().iter().all(|&x| h.contains(t.conjugate(x, z))))
}

/// Whether `h`, as a group in its own right, is powerful:
/// `[H,H] <= H^p` for odd `p`, `[H,H] <= H^4` for `p = 2`.
pub fn is_powerful_subgroup(h: &SubgroupSet<'_>) -> bool {
    let depth = if h.group().prime() == 2 { 2 } else { 1 };
    let derived = commutator_subgroup(h, h);
    derived.is_subgroup_of(&power_of_subgroup(h, depth))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{close_generators, BuildOptions};

    fn c4xc2() -> GroupTable {
        close_generators(
            "c4xc2",
            2,
            vec![("a".into(), (1u8, 0u8)), ("b".into(), (0, 1))],
            (0, 0),
            |x, y| ((x.0 + y.0) % 4, (x.1 + y.1) % 2),
            &BuildOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn c4xc2_power_structure() {
        let g = c4xc2();
        let whole = SubgroupSet::whole(&g);
        assert_eq!(omega_set(&whole, 1).size(), 4);
        assert_eq!(omega_set(&whole, -1).elements(), &[Elem::IDENTITY]);
        assert_eq!(omega_set(&whole, 5).size(), 8);
        let squares = power_subgroup(&g, 1);
        assert_eq!(squares.size(), 2);
        assert_eq!(index(&whole, &squares), 4);
        assert_eq!(power_subgroup(&g, 0), whole);
        assert!(power_subgroup(&g, 2).is_trivial());
        assert_eq!(exponent_of(&whole), 4);
        assert_eq!(exponent_of(&SubgroupSet::trivial(&g)), 1);
    }

    #[test]
    fn abelian_series_is_short() {
        let g = c4xc2();
        let whole = SubgroupSet::whole(&g);
        let series = lower_central_series(&whole, 10);
        assert_eq!(series.len(), 2);
        assert!(series[1].is_trivial());
        assert_eq!(nilpotency_class(&whole), 1);
        assert_eq!(nilpotency_class(&SubgroupSet::trivial(&g)), 0);
        assert!(commutator_subgroup(&whole, &SubgroupSet::trivial(&g)).is_trivial());
        assert!(is_normal(&whole, &power_subgroup(&g, 1)));
        assert!(series_term(&series, 7).is_trivial());
    }
}
