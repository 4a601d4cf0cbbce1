//! The two collection congruences
//!
//! ```text
//! (xy)^(p^n)  = x^(p^n) y^(p^n)   mod gamma_2(H)^(p^n) gamma_p(H)^(p^(n-1)) ... gamma_(p^n)(H),  H = <x, y>
//! [x,y]^(p^n) = [x^(p^n), y]      mod the same product over K = <x, [x,y]>
//! ```
//!
//! checked on concrete elements. They hold in every group, so any failure
//! points at the kernel.

use std::collections::HashMap;

use crate::kernel::{Elem, GroupTable};
use crate::series::{lower_central_series, power_of_subgroup, series_term, subgroup_product};
use crate::subgroups::{generated, Membership, SubgroupSet};

/// `gamma_2(H)^(p^n) * prod_{s=1..n} gamma_(p^s)(H)^(p^(n-s))`; trivial for `n = 0`.
pub fn hall_modulus<'g>(h: &SubgroupSet<'g>, n: u32) -> SubgroupSet<'g> {
    let series = lower_central_series(h, usize::MAX);
    modulus_from_series(h, &series, n)
}

fn modulus_from_series<'g>(h: &SubgroupSet<'g>, series: &[SubgroupSet<'g>], n: u32) -> SubgroupSet<'g> {
    let g = h.group();
    if n == 0 {
        return SubgroupSet::trivial(g);
    }
    let p = g.prime() as usize;
    let mut parts = Vec::new();
    // s = 0 contributes gamma_2, not gamma_1.
    let gamma2 = series_term(series, 2);
    if !gamma2.is_trivial() {
        parts.push(power_of_subgroup(&gamma2, n));
    }
    let mut weight = 1usize;
    for s in 1..=n {
        weight = weight.saturating_mul(p);
        if weight > series.len() {
            break;
        }
        let term = series_term(series, weight);
        if term.is_trivial() {
            break;
        }
        parts.push(power_of_subgroup(&term, n - s));
    }
    subgroup_product(g, &parts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HallOutcome {
    pub holds: bool,
    /// `(xy)^(p^n)`, resp. `[x,y]^(p^n)`.
    pub lhs: Elem,
    /// `x^(p^n) y^(p^n)`, resp. `[x^(p^n), y]`.
    pub rhs: Elem,
    /// `lhs * rhs^-1`, which must lie in the modulus.
    pub quotient: Elem,
    pub modulus_size: usize,
}

struct Moduli<'g> {
    subgroup: SubgroupSet<'g>,
    series: Vec<SubgroupSet<'g>>,
    by_n: Vec<Option<SubgroupSet<'g>>>,
}

/// Checks both congruences, caching the modulus per generated subgroup.
pub struct HallSweeper<'g> {
    group: &'g GroupTable,
    cache: HashMap<Membership, Moduli<'g>>,
}

impl<'g> HallSweeper<'g> {
    pub fn new(group: &'g GroupTable) -> Self {
        HallSweeper { group, cache: HashMap::new() }
    }

    fn modulus(&mut self, h: SubgroupSet<'g>, n: u32) -> &SubgroupSet<'g> {
        let entry = self.cache.entry(h.membership().clone()).or_insert_with(|| Moduli {
            series: lower_central_series(&h, usize::MAX),
            subgroup: h,
            by_n: Vec::new(),
        });
        let slot = n as usize;
        if entry.by_n.len() <= slot {
            entry.by_n.resize(slot + 1, None);
        }
        if entry.by_n[slot].is_none() {
            entry.by_n[slot] = Some(modulus_from_series(&entry.subgroup, &entry.series, n));
        }
        entry.by_n[slot].as_ref().expect("filled above")
    }

    fn outcome(&mut self, h: SubgroupSet<'g>, n: u32, lhs: Elem, rhs: Elem) -> HallOutcome {
        let g = self.group;
        let quotient = g.mul(lhs, g.inv(rhs));
        let modulus = self.modulus(h, n);
        HallOutcome { holds: modulus.contains(quotient), lhs, rhs, quotient, modulus_size: modulus.size() }
    }

    /// `(xy)^(p^n)` against `x^(p^n) y^(p^n)` modulo the modulus of `<x, y>`.
    pub fn product(&mut self, x: Elem, y: Elem, n: u32) -> HallOutcome {
        let g = self.group;
        let lhs = g.power_p(g.mul(x, y), n);
        let rhs = g.mul(g.power_p(x, n), g.power_p(y, n));
        self.outcome(generated(g, [x, y]), n, lhs, rhs)
    }

    /// `[x,y]^(p^n)` against `[x^(p^n), y]` modulo the modulus of `<x, [x,y]>`.
    pub fn commutator(&mut self, x: Elem, y: Elem, n: u32) -> HallOutcome {
        let g = self.group;
        let c = g.commutator(x, y);
        let lhs = g.power_p(c, n);
        let rhs = g.commutator(g.power_p(x, n), y);
        self.outcome(generated(g, [x, c]), n, lhs, rhs)
    }
}

pub fn check_product_formula(g: &GroupTable, x: Elem, y: Elem, n: u32) -> HallOutcome {
    HallSweeper::new(g).product(x, y, n)
}

pub fn check_commutator_formula(g: &GroupTable, x: Elem, y: Elem, n: u32) -> HallOutcome {
    HallSweeper::new(g).commutator(x, y, n)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructors::GroupSpec;
    use crate::kernel::BuildOptions;

    fn build(s: &str) -> GroupTable {
        s.parse::<GroupSpec>().unwrap().build(&BuildOptions::default()).unwrap()
    }

    #[test]
    fn abelian_modulus_is_trivial() {
        let g = build("abelian p=3 type=[2,1]");
        let whole = SubgroupSet::whole(&g);
        for n in 0..4 {
            assert!(hall_modulus(&whole, n).is_trivial());
        }
    }

    #[test]
    fn n_zero_is_trivial() {
        let g = build("quaternion m=3");
        assert!(hall_modulus(&SubgroupSet::whole(&g), 0).is_trivial());
    }

    #[test]
    fn quaternion_modulus() {
        let g = build("quaternion m=3");
        let m = hall_modulus(&SubgroupSet::whole(&g), 1);
        assert_eq!(m.size(), 2);
        let (i, j) = (g.generators()[0], g.generators()[1]);
        let out = check_product_formula(&g, i, j, 1);
        assert!(out.holds);
        assert_eq!(out.rhs, Elem::IDENTITY);
        assert_eq!(g.order_log(out.lhs), 1);
    }

    #[test]
    fn identity_argument() {
        let g = build("dihedral m=4");
        for x in g.elements() {
            let out = check_commutator_formula(&g, x, Elem::IDENTITY, 2);
            assert!(out.holds);
            assert_eq!((out.lhs, out.rhs), (Elem::IDENTITY, Elem::IDENTITY));
        }
    }
}
