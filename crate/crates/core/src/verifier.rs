//! Executable checks of the power-structure statements for powerful
//! p-groups, one [`CheckReport`] per parameter instance.
//!
//! Checks whose hypotheses a group does not meet produce a single
//! `skipped` report carrying the reason, so every (check, group) pair is
//! accounted for. Element-level quantifiers are swept exhaustively on
//! groups up to [`SweepPolicy::exhaustive_threshold`] and sampled with a
//! seeded generator above it; subgroup-level statements are always exact.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize, Serializer};

use crate::hall::HallSweeper;
use crate::kernel::{Elem, GroupTable};
use crate::series::{
    commutator_subgroup, exponent_log_of, index, is_powerful_subgroup, lower_central_series, nilpotency_class,
    omega_set, omega_subgroup, power_of_subgroup, power_subgroup, series_term,
};
use crate::subgroups::{ElementSet, SubgroupSet};

macro_rules! check_ids {
    ($($variant:ident => $name:literal, $desc:literal;)*) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum CheckId {
            $(#[serde(rename = $name)] $variant,)*
        }

        impl CheckId {
            pub const ALL: &'static [CheckId] = &[$(CheckId::$variant),*];

            pub fn as_str(self) -> &'static str {
                match self { $(CheckId::$variant => $name,)* }
            }

            pub fn description(self) -> &'static str {
                match self { $(CheckId::$variant => $desc,)* }
            }
        }

        impl FromStr for CheckId {
            type Err = String;
            fn from_str(s: &str) -> Result<Self, String> {
                match s { $($name => Ok(CheckId::$variant),)* other => Err(format!("unknown check id `{other}`")) }
            }
        }
    };
}

check_ids! {
    T1i => "T1i", "o(y) <= p^i implies o([x,y]) <= p^i";
    T1ii => "T1ii", "o(x) <= p^(i+1), o(y) <= p^i imply o([x^(p^j), y^(p^k)]) <= p^(i-j-k)";
    T1iii => "T1iii", "odd p: exp Omega_i(G) <= p^i and Omega_i(G) = Omega_{i}(G)";
    T1iv => "T1iv", "p = 2: exp Omega_i(T) <= 2^i for every T = <a, G^2>, and exp Omega_i(G^2) <= 2^i";
    C1 => "C1", "p = 2: exp [Omega_i(G), G] <= 2^i";
    C2 => "C2", "p = 2: exp Omega_i(G) <= 2^(i+1)";
    L1 => "L1", "(xy)^(p^i) = x^(p^i) y^(p^i) for y in G^(p^(e-i-1)), 0 <= i <= e-1";
    T2 => "T2", "|G : G^(p^i)| = |Omega_{i}(G)|";
    T2X => "T2_X", "X = {x : x^(p^i) in G^(p^(e-1))} has |X| = |Omega_{i}(G)| |G^(p^(e-1))| and the coset-count form";
    T2Even => "T2_even", "order-<=p^i elements are evenly spread over the cosets of G^(p^(e-i-1)) they meet";
    Hall1 => "HALL1", "(xy)^(p^n) = x^(p^n) y^(p^n) modulo the collection modulus of <x,y>";
    Hall2 => "HALL2", "[x,y]^(p^n) = [x^(p^n), y] modulo the collection modulus of <x,[x,y]>";
    R1 => "R1", "odd p: Omega_1(G^p) is powerful";
    R2 => "R2", "exp gamma_(r+2)(Omega_i(G)) <= p^(i-r)";
    R3 => "R3", "odd p: class of Omega_i(G) is at most i+1";
    Sharp => "SHARP", "p = 2: search for exp Omega_i(G) = 2^(i+1) (informational)";
}

impl fmt::Display for CheckId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// The quantifier parameters of one check instance.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Params {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub i: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub j: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<i64>,
}

impl Params {
    fn i(i: u32) -> Self {
        Params { i: Some(i as i64), ..Default::default() }
    }

    fn n(n: u32) -> Self {
        Params { n: Some(n as i64), ..Default::default() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SkipReason {
    NotPowerful,
    RequiresOddPrime,
    RequiresPrimeTwo,
    NoInstances,
}

impl SkipReason {
    pub fn as_str(self) -> &'static str {
        match self {
            SkipReason::NotPowerful => "not_powerful",
            SkipReason::RequiresOddPrime => "requires_odd_p",
            SkipReason::RequiresPrimeTwo => "requires_p_2",
            SkipReason::NoInstances => "no_instances",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Pass,
    Fail,
    Skipped(SkipReason),
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Status::Pass => f.write_str("pass"),
            Status::Fail => f.write_str("fail"),
            Status::Skipped(reason) => write!(f, "skipped:{}", reason.as_str()),
        }
    }
}

impl Serialize for Status {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Sampled { count: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct WitnessElement {
    pub role: String,
    pub index: Elem,
    pub word: String,
    pub order: u64,
}

/// Evidence attached to a report: the violating elements on failure, the
/// attained bound for `SHARP`, the failed equality for negative controls.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct Witness {
    pub elements: Vec<WitnessElement>,
    pub detail: String,
}

impl Witness {
    fn new(g: &GroupTable, elements: &[(&str, Elem)], detail: String) -> Self {
        Witness {
            elements: elements
                .iter()
                .map(|&(role, x)| WitnessElement {
                    role: role.to_string(),
                    index: x,
                    word: g.word_string(x),
                    order: g.element_order(x),
                })
                .collect(),
            detail,
        }
    }

    pub fn element(&self, role: &str) -> Option<Elem> {
        self.elements.iter().find(|w| w.role == role).map(|w| w.index)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct CheckReport {
    pub group_label: String,
    pub check_id: CheckId,
    pub params: Params,
    pub status: Status,
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
}

impl CheckReport {
    /// Deterministic merge order.
    pub fn sort_key(&self) -> (&str, CheckId, Params) {
        (&self.group_label, self.check_id, self.params)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SweepPolicy {
    pub exhaustive_threshold: usize,
    pub sample_count: usize,
    pub seed: u64,
}

impl Default for SweepPolicy {
    fn default() -> Self {
        SweepPolicy { exhaustive_threshold: 256, sample_count: 10_000, seed: 0 }
    }
}

/// A group together with the subgroups every check needs.
pub struct GroupContext<'g> {
    pub table: &'g GroupTable,
    pub powerful: bool,
    whole: SubgroupSet<'g>,
    /// `Omega_{i}(G)` for `i = 0..=e`.
    omega_sets: Vec<ElementSet<'g>>,
    /// `G^(p^i)` for `i = 0..=e`.
    powers: Vec<SubgroupSet<'g>>,
}

impl<'g> GroupContext<'g> {
    pub fn new(table: &'g GroupTable) -> Self {
        let powerful = is_powerful_subgroup(&SubgroupSet::whole(table));
        Self::with_hypothesis(table, powerful)
    }

    /// Like [`GroupContext::new`] but with the powerfulness gate set by the
    /// caller, so the powerful-only checks can be run on a control group to
    /// see which conclusions break without the hypothesis.
    pub fn with_hypothesis(table: &'g GroupTable, powerful: bool) -> Self {
        let whole = SubgroupSet::whole(table);
        let e = table.exponent_log();
        GroupContext {
            table,
            powerful,
            omega_sets: (0..=e).map(|i| omega_set(&whole, i as i64)).collect(),
            powers: (0..=e).map(|i| power_of_subgroup(&whole, i)).collect(),
            whole,
        }
    }

    fn e(&self) -> u32 {
        self.table.exponent_log()
    }

    fn omega(&self, i: u32) -> &ElementSet<'g> {
        &self.omega_sets[i.min(self.e()) as usize]
    }

    fn agemo(&self, i: u32) -> &SubgroupSet<'g> {
        &self.powers[i.min(self.e()) as usize]
    }

    /// In a powerful group every element of `G^(p^i)` is a `p^i`-th power.
    /// A failure means a kernel bug or a mislabelled group.
    pub fn check_power_sets(&self) -> Result<(), String> {
        let g = self.table;
        for i in 1..=self.e() {
            let powers = ElementSet::from_elements(g, g.elements().map(|x| g.power_p(x, i)));
            if !powers.same_members(self.agemo(i)) {
                return Err(format!(
                    "{}: G^(p^{i}) has {} elements but only {} are p^{i}-th powers",
                    g.label(),
                    self.agemo(i).size(),
                    powers.size()
                ));
            }
        }
        Ok(())
    }
}

fn fnv1a(parts: &[&[u8]]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for part in parts {
        for &b in *part {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h ^= 0xff;
        h = h.wrapping_mul(0x0100_0000_01b3);
    }
    h
}

struct Runner<'a, 'g> {
    ctx: &'a GroupContext<'g>,
    check: CheckId,
    policy: SweepPolicy,
    reports: Vec<CheckReport>,
}

impl<'g> Runner<'_, 'g> {
    fn g(&self) -> &'g GroupTable {
        self.ctx.table
    }

    fn push(&mut self, params: Params, mode: Mode, witness: Option<Witness>, failed: bool) {
        self.reports.push(CheckReport {
            group_label: self.g().label().to_string(),
            check_id: self.check,
            params,
            status: if failed { Status::Fail } else { Status::Pass },
            mode,
            witness,
        });
    }

    /// Records an exact (non-sampled) instance.
    fn exact(&mut self, params: Params, witness: Option<Witness>) {
        let failed = witness.is_some();
        self.push(params, Mode::Exhaustive, witness, failed);
    }

    fn skip(&mut self, reason: SkipReason, witness: Option<Witness>) {
        self.reports.push(CheckReport {
            group_label: self.g().label().to_string(),
            check_id: self.check,
            params: Params::default(),
            status: Status::Skipped(reason),
            mode: Mode::Exhaustive,
            witness,
        });
    }

    /// Runs `test` over `xs x ys`, exhaustively or on seeded samples, and
    /// records one report for `params`.
    fn sweep(&mut self, params: Params, xs: &[Elem], ys: &[Elem], mut test: impl FnMut(Elem, Elem) -> Option<Witness>) {
        let mut witness = None;
        let mode = if self.g().order() <= self.policy.exhaustive_threshold {
            'outer: for &x in xs {
                for &y in ys {
                    if let Some(w) = test(x, y) {
                        witness = Some(w);
                        break 'outer;
                    }
                }
            }
            Mode::Exhaustive
        } else {
            let key = serde_json::to_string(&params).expect("params serialize");
            let mut rng = ChaCha8Rng::seed_from_u64(self.policy.seed);
            rng.set_stream(fnv1a(&[self.g().label().as_bytes(), self.check.as_str().as_bytes(), key.as_bytes()]));
            if !xs.is_empty() && !ys.is_empty() {
                for _ in 0..self.policy.sample_count {
                    let x = xs[rng.random_range(0..xs.len())];
                    let y = ys[rng.random_range(0..ys.len())];
                    if let Some(w) = test(x, y) {
                        witness = Some(w);
                        break;
                    }
                }
            }
            Mode::Sampled { count: self.policy.sample_count, seed: self.policy.seed }
        };
        let failed = witness.is_some();
        self.push(params, mode, witness, failed);
    }

    /// The hypothesis gate shared by the checks on powerful groups.
    fn gate(&mut self, parity: Option<bool>) -> bool {
        let p = self.g().prime();
        match parity {
            Some(true) if p == 2 => self.skip(SkipReason::RequiresOddPrime, None),
            Some(false) if p != 2 => self.skip(SkipReason::RequiresPrimeTwo, None),
            _ if !self.ctx.powerful => self.skip(SkipReason::NotPowerful, None),
            _ => return true,
        }
        false
    }

    fn run(&mut self) {
        let check = self.check;
        match check {
            CheckId::T1i => self.t1i(),
            CheckId::T1ii => self.t1ii(),
            CheckId::T1iii => self.t1iii(),
            CheckId::T1iv => self.t1iv(),
            CheckId::C1 | CheckId::C2 => self.omega_exponents(),
            CheckId::L1 => self.l1(),
            CheckId::T2 => self.t2(),
            CheckId::T2X => self.t2_x(),
            CheckId::T2Even => self.t2_even(),
            CheckId::Hall1 | CheckId::Hall2 => self.hall(),
            CheckId::R1 => self.r1(),
            CheckId::R2 => self.r2(),
            CheckId::R3 => self.r3(),
            CheckId::Sharp => self.sharp(),
        }
        if self.reports.is_empty() {
            self.skip(SkipReason::NoInstances, None);
        }
    }

    fn t1i(&mut self) {
        if !self.gate(None) {
            return;
        }
        let g = self.g();
        let all: Vec<Elem> = g.elements().collect();
        for i in 0..=self.ctx.e() {
            let ys = self.ctx.omega(i).elements().to_vec();
            self.sweep(Params::i(i), &all, &ys, |x, y| {
                let c = g.commutator(x, y);
                (g.order_log(c) > i).then(|| {
                    Witness::new(
                        g,
                        &[("x", x), ("y", y), ("[x,y]", c)],
                        format!("o([x,y]) = {} > p^{i}", g.element_order(c)),
                    )
                })
            });
        }
    }

    fn t1ii(&mut self) {
        if !self.gate(None) {
            return;
        }
        let g = self.g();
        let e = self.ctx.e();
        for i in 0..=e {
            let xs = self.ctx.omega(i + 1).elements().to_vec();
            let ys = self.ctx.omega(i).elements().to_vec();
            for j in 0..=e {
                for k in 0..=e {
                    let params =
                        Params { i: Some(i as i64), j: Some(j as i64), k: Some(k as i64), ..Default::default() };
                    let bound = i as i64 - j as i64 - k as i64;
                    self.sweep(params, &xs, &ys, |x, y| {
                        let c = g.commutator(g.power_p(x, j), g.power_p(y, k));
                        (!within_bound(g, c, bound)).then(|| {
                            let detail = if bound < 0 {
                                format!("bound p^({bound}) requires the identity, got order {}", g.element_order(c))
                            } else {
                                format!("o([x^(p^j), y^(p^k)]) = {} > p^{bound}", g.element_order(c))
                            };
                            Witness::new(g, &[("x", x), ("y", y), ("commutator", c)], detail)
                        })
                    });
                }
            }
        }
    }

    fn t1iii(&mut self) {
        if !self.gate(Some(true)) {
            return;
        }
        let g = self.g();
        for i in 0..=self.ctx.e() {
            let sub = omega_subgroup(&self.ctx.whole, i as i64);
            let set = self.ctx.omega(i);
            let witness = sub.elements().iter().find(|&&z| !set.contains(z)).map(|&z| {
                Witness::new(
                    g,
                    &[("z", z)],
                    format!(
                        "Omega_{i}(G) has exponent {} > p^{i}; |Omega_{i}(G)| = {} vs |Omega_{{{i}}}(G)| = {}",
                        g.element_order(z),
                        sub.size(),
                        set.size()
                    ),
                )
            });
            self.exact(Params::i(i), witness);
        }
    }

    fn t1iv(&mut self) {
        if !self.gate(Some(false)) {
            return;
        }
        let g = self.g();
        let squares = self.ctx.agemo(1).clone();
        let mut seen = HashSet::new();
        let mut family: Vec<(Option<Elem>, SubgroupSet<'g>)> = vec![(None, squares.clone())];
        seen.insert(squares.membership().clone());
        for a in g.elements() {
            if squares.contains(a) {
                continue;
            }
            let mut t = squares.clone();
            t.extend(a);
            if seen.insert(t.membership().clone()) {
                family.push((Some(a), t));
            }
        }
        for i in 0..=self.ctx.e() {
            let mut witness = None;
            for (a, t) in &family {
                let omega = omega_subgroup(t, i as i64);
                if let Some(&z) = omega.elements().iter().find(|&&z| g.order_log(z) > i) {
                    let mut roles = vec![("z", z)];
                    if let Some(a) = a {
                        roles.insert(0, ("a", *a));
                    }
                    let which = if a.is_some() { "T = <a, G^2>" } else { "T = G^2" };
                    witness = Some(Witness::new(
                        g,
                        &roles,
                        format!("{which}: Omega_{i}(T) contains an element of order {} > 2^{i}", g.element_order(z)),
                    ));
                    break;
                }
            }
            self.exact(Params::i(i), witness);
        }
    }

    fn omega_exponents(&mut self) {
        if !self.gate(Some(false)) {
            return;
        }
        let g = self.g();
        for i in 0..=self.ctx.e() {
            let omega = omega_subgroup(&self.ctx.whole, i as i64);
            let witness = if self.check == CheckId::C1 {
                let bracket = commutator_subgroup(&omega, &self.ctx.whole);
                max_order_element(&bracket).filter(|&z| g.order_log(z) > i).map(|z| {
                    Witness::new(
                        g,
                        &[("z", z)],
                        format!("[Omega_{i}(G), G] has exponent {} > 2^{i}", g.element_order(z)),
                    )
                })
            } else {
                max_order_element(&omega).filter(|&z| g.order_log(z) > i + 1).map(|z| {
                    Witness::new(
                        g,
                        &[("z", z)],
                        format!("Omega_{i}(G) has exponent {} > 2^{}", g.element_order(z), i + 1),
                    )
                })
            };
            self.exact(Params::i(i), witness);
        }
    }

    fn l1(&mut self) {
        if !self.gate(None) {
            return;
        }
        let g = self.g();
        let e = self.ctx.e();
        let all: Vec<Elem> = g.elements().collect();
        for i in 0..e {
            let ys = self.ctx.agemo(e - i - 1).elements().to_vec();
            self.sweep(Params::i(i), &all, &ys, |x, y| {
                let lhs = g.power_p(g.mul(x, y), i);
                let rhs = g.mul(g.power_p(x, i), g.power_p(y, i));
                (lhs != rhs).then(|| {
                    Witness::new(
                        g,
                        &[("x", x), ("y", y), ("(xy)^(p^i)", lhs), ("x^(p^i) y^(p^i)", rhs)],
                        "powers differ".into(),
                    )
                })
            });
        }
    }

    fn t2(&mut self) {
        let g = self.g();
        let e = self.ctx.e();
        let counts: Vec<(u32, usize, usize)> =
            (0..=e).map(|i| (i, index(&self.ctx.whole, self.ctx.agemo(i)), self.ctx.omega(i).size())).collect();
        if !self.ctx.powerful {
            // Negative control: record where the equality breaks.
            let broken: Vec<String> = counts
                .iter()
                .filter(|(_, idx, om)| idx != om)
                .map(|(i, idx, om)| format!("i={i}: |G:G^(p^i)| = {idx} vs |Omega_{{i}}(G)| = {om}"))
                .collect();
            let witness =
                (!broken.is_empty()).then(|| Witness::new(g, &[], format!("negative control: {}", broken.join("; "))));
            self.skip(SkipReason::NotPowerful, witness);
            return;
        }
        for (i, idx, om) in counts {
            let witness = (idx != om)
                .then(|| Witness::new(g, &[], format!("|G:G^(p^{i})| = {idx} but |Omega_{{{i}}}(G)| = {om}")));
            self.exact(Params::i(i), witness);
        }
    }

    fn t2_x(&mut self) {
        if !self.gate(None) {
            return;
        }
        let g = self.g();
        let e = self.ctx.e();
        if e < 2 {
            return;
        }
        let top = self.ctx.agemo(e - 1);
        for i in 0..=e - 2 {
            let x_set = ElementSet::from_elements(g, g.elements().filter(|&x| top.contains(g.power_p(x, i))));
            let omega = self.ctx.omega(i);
            let mid = self.ctx.agemo(e - i - 1);
            let omega_mid = omega_set(mid, i as i64);
            let product = ElementSet::from_elements(
                g,
                omega.elements().iter().flat_map(|&w| mid.elements().iter().map(move |&m| g.mul(w, m))),
            );
            let mut problems = Vec::new();
            if x_set.size() != omega.size() * top.size() {
                problems.push(format!(
                    "|X| = {} but |Omega_{{i}}(G)| |G^(p^(e-1))| = {}",
                    x_set.size(),
                    omega.size() * top.size()
                ));
            }
            if x_set.size() * omega_mid.size() != omega.size() * mid.size() {
                problems.push(format!(
                    "|X| = {} but |Omega_{{i}}(G)| / |Omega_{{i}}(M)| * |M| = {} / {} * {}",
                    x_set.size(),
                    omega.size(),
                    omega_mid.size(),
                    mid.size()
                ));
            }
            if x_set.elements() != product.elements() {
                problems.push(format!("X ({}) differs from Omega_{{i}}(G) M ({})", x_set.size(), product.size()));
            }
            let witness = (!problems.is_empty()).then(|| Witness::new(g, &[], problems.join("; ")));
            self.exact(Params::i(i), witness);
        }
    }

    fn t2_even(&mut self) {
        if !self.gate(None) {
            return;
        }
        let g = self.g();
        let e = self.ctx.e();
        if e < 2 {
            return;
        }
        for i in 0..=e - 2 {
            let mid = self.ctx.agemo(e - i - 1);
            let omega = self.ctx.omega(i);
            let mut coset = vec![u32::MAX; g.order()];
            let mut reps = Vec::new();
            for x in g.elements() {
                if coset[x.index()] == u32::MAX {
                    for &m in mid.elements() {
                        coset[g.mul(x, m).index()] = reps.len() as u32;
                    }
                    reps.push(x);
                }
            }
            let mut counts = vec![0usize; reps.len()];
            for &w in omega.elements() {
                counts[coset[w.index()] as usize] += 1;
            }
            let expected = omega_set(mid, i as i64).size();
            let witness = counts.iter().enumerate().find(|&(_, &c)| c != 0 && c != expected).map(|(c, &count)| {
                Witness::new(
                    g,
                    &[("g", reps[c])],
                    format!("coset gM holds {count} elements of order <= p^{i}, expected {expected}"),
                )
            });
            self.exact(Params::i(i), witness);
        }
    }

    fn hall(&mut self) {
        let g = self.g();
        let all: Vec<Elem> = g.elements().collect();
        let mut sweeper = HallSweeper::new(g);
        let product = self.check == CheckId::Hall1;
        for n in 0..=self.ctx.e() {
            self.sweep(Params::n(n), &all, &all, |x, y| {
                let out = if product { sweeper.product(x, y, n) } else { sweeper.commutator(x, y, n) };
                (!out.holds).then(|| {
                    Witness::new(
                        g,
                        &[("x", x), ("y", y), ("lhs", out.lhs), ("rhs", out.rhs)],
                        format!("lhs * rhs^-1 lies outside the modulus of order {}", out.modulus_size),
                    )
                })
            });
        }
    }

    fn r1(&mut self) {
        if !self.gate(Some(true)) {
            return;
        }
        let g = self.g();
        let omega = omega_subgroup(self.ctx.agemo(1), 1);
        let witness = (!is_powerful_subgroup(&omega))
            .then(|| Witness::new(g, &[], format!("Omega_1(G^p) of order {} is not powerful", omega.size())));
        self.exact(Params::default(), witness);
    }

    fn r2(&mut self) {
        if !self.gate(None) {
            return;
        }
        let g = self.g();
        for i in 0..=self.ctx.e() {
            let omega = omega_subgroup(&self.ctx.whole, i as i64);
            let series = lower_central_series(&omega, usize::MAX);
            let class = series.len() - 1;
            for r in 0..class.max(1) {
                let term = series_term(&series, r + 2);
                let bound = i as i64 - r as i64;
                let witness = term.elements().iter().copied().find(|&z| !within_bound(g, z, bound)).map(|z| {
                    Witness::new(
                        g,
                        &[("z", z)],
                        format!(
                            "gamma_{}(Omega_{i}(G)) has an element of order {} > p^({bound})",
                            r + 2,
                            g.element_order(z)
                        ),
                    )
                });
                let params = Params { i: Some(i as i64), r: Some(r as i64), ..Default::default() };
                self.exact(params, witness);
            }
        }
    }

    fn r3(&mut self) {
        if !self.gate(Some(true)) {
            return;
        }
        let g = self.g();
        for i in 0..=self.ctx.e() {
            let class = nilpotency_class(&omega_subgroup(&self.ctx.whole, i as i64));
            let witness = (class > i as usize + 1)
                .then(|| Witness::new(g, &[], format!("class of Omega_{i}(G) is {class} > {}", i + 1)));
            self.exact(Params::i(i), witness);
        }
    }

    fn sharp(&mut self) {
        if !self.gate(Some(false)) {
            return;
        }
        let g = self.g();
        for i in 0..=self.ctx.e() {
            let omega = omega_subgroup(&self.ctx.whole, i as i64);
            let witness = max_order_element(&omega)
                .filter(|&z| g.order_log(z) == i + 1)
                .map(|z| Witness::new(g, &[("z", z)], format!("exp Omega_{i}(G) = 2^{} attains the bound", i + 1)));
            self.push(Params::i(i), Mode::Exhaustive, witness, false);
        }
    }
}

/// `o(x) <= p^bound`, where a negative bound means `x = 1`.
fn within_bound(g: &GroupTable, x: Elem, bound: i64) -> bool {
    if bound < 0 {
        x.is_identity()
    } else {
        g.order_log(x) as i64 <= bound
    }
}

fn max_order_element(h: &SubgroupSet<'_>) -> Option<Elem> {
    let g = h.group();
    h.elements().iter().copied().max_by_key(|&x| (g.order_log(x), std::cmp::Reverse(x)))
}

/// Runs one check on one group.
pub fn run_check(ctx: &GroupContext<'_>, check: CheckId, policy: &SweepPolicy) -> Vec<CheckReport> {
    let mut runner = Runner { ctx, check, policy: *policy, reports: Vec::new() };
    runner.run();
    runner.reports
}

/// Runs `checks` on one group, in the given order.
pub fn run_checks(ctx: &GroupContext<'_>, checks: &[CheckId], policy: &SweepPolicy) -> Vec<CheckReport> {
    checks.iter().flat_map(|&c| run_check(ctx, c, policy)).collect()
}

/// Re-derives the violation recorded in a failing report's witness from
/// the group alone. Returns `Ok(true)` when the violation reproduces.
pub fn recheck_witness(g: &GroupTable, report: &CheckReport) -> Result<bool, String> {
    let witness = report.witness.as_ref().ok_or("report has no witness")?;
    let el = |role: &str| witness.element(role).ok_or_else(|| format!("witness lacks `{role}`"));
    let param = |v: Option<i64>, name: &str| v.ok_or_else(|| format!("report lacks parameter {name}"));
    let whole = SubgroupSet::whole(g);
    let e = g.exponent_log();
    let p = report.params;
    Ok(match report.check_id {
        CheckId::T1i => {
            let i = param(p.i, "i")?;
            let (x, y) = (el("x")?, el("y")?);
            within_bound(g, y, i) && !within_bound(g, g.commutator(x, y), i)
        }
        CheckId::T1ii => {
            let (i, j, k) = (param(p.i, "i")?, param(p.j, "j")?, param(p.k, "k")?);
            let (x, y) = (el("x")?, el("y")?);
            let c = g.commutator(g.power_p(x, j as u32), g.power_p(y, k as u32));
            within_bound(g, x, i + 1) && within_bound(g, y, i) && !within_bound(g, c, i - j - k)
        }
        CheckId::T1iii => {
            let i = param(p.i, "i")?;
            let z = el("z")?;
            omega_subgroup(&whole, i).contains(z) && !within_bound(g, z, i)
        }
        CheckId::T1iv => {
            let i = param(p.i, "i")?;
            let z = el("z")?;
            let mut t = power_subgroup(g, 1);
            if let Ok(a) = el("a") {
                t.extend(a);
            }
            omega_subgroup(&t, i).contains(z) && !within_bound(g, z, i)
        }
        CheckId::C1 => {
            let i = param(p.i, "i")?;
            let z = el("z")?;
            commutator_subgroup(&omega_subgroup(&whole, i), &whole).contains(z) && !within_bound(g, z, i)
        }
        CheckId::C2 => {
            let i = param(p.i, "i")?;
            let z = el("z")?;
            omega_subgroup(&whole, i).contains(z) && !within_bound(g, z, i + 1)
        }
        CheckId::L1 => {
            let i = param(p.i, "i")? as u32;
            let (x, y) = (el("x")?, el("y")?);
            power_subgroup(g, e - i - 1).contains(y)
                && g.power_p(g.mul(x, y), i) != g.mul(g.power_p(x, i), g.power_p(y, i))
        }
        CheckId::T2 => {
            let i = param(p.i, "i")?;
            index(&whole, &power_subgroup(g, i as u32)) != omega_set(&whole, i).size()
        }
        CheckId::T2X | CheckId::T2Even => {
            let ctx = GroupContext::new(g);
            let fresh = run_check(&ctx, report.check_id, &SweepPolicy::default());
            fresh.iter().any(|r| r.params == p && r.status == Status::Fail)
        }
        CheckId::Hall1 | CheckId::Hall2 => {
            let n = param(p.n, "n")? as u32;
            let (x, y) = (el("x")?, el("y")?);
            let out = if report.check_id == CheckId::Hall1 {
                crate::hall::check_product_formula(g, x, y, n)
            } else {
                crate::hall::check_commutator_formula(g, x, y, n)
            };
            !out.holds
        }
        CheckId::R1 => !is_powerful_subgroup(&omega_subgroup(&power_subgroup(g, 1), 1)),
        CheckId::R2 => {
            let (i, r) = (param(p.i, "i")?, param(p.r, "r")?);
            let z = el("z")?;
            let series = lower_central_series(&omega_subgroup(&whole, i), usize::MAX);
            series_term(&series, r as usize + 2).contains(z) && !within_bound(g, z, i - r)
        }
        CheckId::R3 => {
            let i = param(p.i, "i")?;
            nilpotency_class(&omega_subgroup(&whole, i)) as i64 > i + 1
        }
        CheckId::Sharp => false,
    })
}

/// Scans groups for `(G, i)` with `exp Omega_i(G) = 2^(i+1)`, i.e. where
/// the `p = 2` bound is attained. Non-powerful and odd groups are ignored.
pub fn sharpness_search<'a>(groups: impl IntoIterator<Item = &'a GroupTable>) -> Vec<(String, u32, Elem)> {
    let mut found = Vec::new();
    for g in groups {
        if g.prime() != 2 {
            continue;
        }
        let whole = SubgroupSet::whole(g);
        if !is_powerful_subgroup(&whole) {
            continue;
        }
        for i in 0..=g.exponent_log() {
            let omega = omega_subgroup(&whole, i as i64);
            if exponent_log_of(&omega) == i + 1 {
                let z = max_order_element(&omega).expect("non-empty");
                found.push((g.label().to_string(), i, z));
            }
        }
    }
    found
}
