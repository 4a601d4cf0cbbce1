//! Concrete finite groups as enumerated tables.
//!
//! Every group is obtained by closing a list of generators under an
//! abstract multiplication. Elements are renumbered `0..order` in
//! breadth-first order from the identity, so index 0 is always the
//! identity and two builds of the same generators give identical tables.

use std::collections::HashMap;
use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// An element of a [`GroupTable`], addressed by its enumeration index.
///
/// The index only has meaning relative to the table that produced it.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Elem(u32);

impl Elem {
    pub const IDENTITY: Elem = Elem(0);

    #[inline]
    pub fn new(index: usize) -> Self {
        Elem(index as u32)
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0 as usize
    }

    #[inline]
    pub fn is_identity(self) -> bool {
        self.0 == 0
    }
}

impl fmt::Display for Elem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("closure exceeded the order cap of {cap} elements")]
    CapExceeded { cap: usize },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("order {order} is not a power of {prime}")]
    NotPrimePower { order: usize, prime: u32 },
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("group axiom violated: {0}")]
    AxiomViolation(String),
}

/// Limits and verification policy applied while building a table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildOptions {
    /// Largest permitted closure size.
    pub order_cap: usize,
    /// Groups up to this order get a dense multiplication table.
    pub dense_limit: usize,
    /// Associativity is checked on all triples up to this order.
    pub assoc_exhaustive_limit: usize,
    /// Random triples checked above `assoc_exhaustive_limit`.
    pub assoc_samples: usize,
    pub seed: u64,
}

impl Default for BuildOptions {
    fn default() -> Self {
        BuildOptions {
            order_cap: 4096,
            dense_limit: 4096,
            assoc_exhaustive_limit: 512,
            assoc_samples: 100_000,
            seed: 0x5eed,
        }
    }
}

type DelegatedMul = Arc<dyn Fn(u32, u32) -> u32 + Send + Sync>;

enum Multiplication {
    Dense(Vec<u32>),
    Delegated(DelegatedMul),
}

/// A fully enumerated finite p-group.
pub struct GroupTable {
    label: String,
    prime: u32,
    order: usize,
    exponent_log: u32,
    mult: Multiplication,
    inv: Vec<u32>,
    pth_power: Vec<u32>,
    order_log: Vec<u8>,
    generators: Vec<Elem>,
    generator_names: Vec<String>,
    // BFS tree: (parent, generator slot); the identity points at itself.
    tree: Vec<(u32, u16)>,
}

impl fmt::Debug for GroupTable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GroupTable")
            .field("label", &self.label)
            .field("prime", &self.prime)
            .field("order", &self.order)
            .field("exponent_log", &self.exponent_log)
            .field("dense", &self.is_dense())
            .finish()
    }
}

pub(crate) fn is_prime(p: u32) -> bool {
    p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| !p.is_multiple_of(d))
}

/// Returns `m` with `p^m == n`, if there is one.
pub fn prime_power_log(n: usize, p: u32) -> Option<u32> {
    let p = p as usize;
    let (mut n, mut m) = (n, 0);
    if n == 0 || p < 2 {
        return None;
    }
    while n % p == 0 {
        n /= p;
        m += 1;
    }
    (n == 1).then_some(m)
}

/// Closes `generators` under `op` starting from `identity`.
///
/// Elements are numbered in breadth-first order: the queue is processed
/// in index order and each element is right-multiplied by the generators
/// in the order given.
pub fn close_generators<T, F>(
    label: &str,
    prime: u32,
    generators: Vec<(String, T)>,
    identity: T,
    op: F,
    opts: &BuildOptions,
) -> Result<GroupTable, GroupError>
where
    T: Clone + Eq + Hash + Send + Sync + 'static,
    F: Fn(&T, &T) -> T + Send + Sync + 'static,
{
    if !is_prime(prime) {
        return Err(GroupError::NotPrime(prime));
    }
    if generators.len() > u16::MAX as usize {
        return Err(GroupError::NotAGroup("too many generators".into()));
    }
    let (generator_names, gen_values): (Vec<String>, Vec<T>) = generators.into_iter().unzip();

    let mut elements = vec![identity.clone()];
    let mut index: HashMap<T, u32> = HashMap::from([(identity, 0)]);
    let mut tree = vec![(0u32, u16::MAX)];
    let mut right: Vec<Vec<u32>> = vec![Vec::new(); gen_values.len()];

    let mut cursor = 0;
    while cursor < elements.len() {
        for (slot, g) in gen_values.iter().enumerate() {
            let y = op(&elements[cursor], g);
            let target = match index.get(&y) {
                Some(&t) => t,
                None => {
                    if elements.len() >= opts.order_cap {
                        return Err(GroupError::CapExceeded { cap: opts.order_cap });
                    }
                    let t = elements.len() as u32;
                    index.insert(y.clone(), t);
                    elements.push(y);
                    tree.push((cursor as u32, slot as u16));
                    t
                }
            };
            right[slot].push(target);
        }
        cursor += 1;
    }

    let order = elements.len();
    for (slot, perm) in right.iter().enumerate() {
        let mut seen = vec![false; order];
        for &t in perm {
            if std::mem::replace(&mut seen[t as usize], true) {
                return Err(GroupError::NotAGroup(format!(
                    "right multiplication by generator {} is not injective",
                    generator_names[slot]
                )));
            }
        }
    }
    if prime_power_log(order, prime).is_none() {
        return Err(GroupError::NotPrimePower { order, prime });
    }

    let generators = gen_values.iter().map(|g| Elem(index[g])).collect::<Vec<_>>();

    let elements = Arc::new(elements);
    let index = Arc::new(index);
    let op = Arc::new(op);

    let mult = if order <= opts.dense_limit {
        // Column y is column parent(y) pushed through one generator.
        let mut table = vec![0u32; order * order];
        for x in 0..order {
            let row = &mut table[x * order..(x + 1) * order];
            row[0] = x as u32;
            for y in 1..order {
                let (parent, slot) = tree[y];
                row[y] = right[slot as usize][row[parent as usize] as usize];
            }
        }
        Multiplication::Dense(table)
    } else {
        let (elements, index, op) = (elements.clone(), index.clone(), op.clone());
        Multiplication::Delegated(Arc::new(move |x, y| {
            let z = op(&elements[x as usize], &elements[y as usize]);
            *index.get(&z).expect("closure is closed under multiplication")
        }))
    };

    let mut table = GroupTable {
        label: label.to_string(),
        prime,
        order,
        exponent_log: 0,
        mult,
        inv: Vec::new(),
        pth_power: Vec::new(),
        order_log: Vec::new(),
        generators,
        generator_names,
        tree,
    };
    table.fill_power_structure()?;

    // The table must agree with the representation it was built from.
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let probe = |x: usize, y: usize, table: &GroupTable| -> Result<(), GroupError> {
        let expected = index[&op(&elements[x], &elements[y])];
        if table.mul(Elem(x as u32), Elem(y as u32)).0 != expected {
            return Err(GroupError::AxiomViolation(format!(
                "table product #{x}*#{y} disagrees with the representation"
            )));
        }
        Ok(())
    };
    if order <= opts.assoc_exhaustive_limit {
        for x in 0..order {
            for y in 0..order {
                probe(x, y, &table)?;
            }
        }
    } else {
        for _ in 0..opts.assoc_samples.min(10_000) {
            probe(rng.random_range(0..order), rng.random_range(0..order), &table)?;
        }
    }

    table.verify_axioms(opts)?;
    Ok(table)
}

impl GroupTable {
    fn fill_power_structure(&mut self) -> Result<(), GroupError> {
        let n = self.order;
        let p = self.prime;
        let max_log = prime_power_log(n, p).expect("checked by caller");

        self.pth_power = (0..n)
            .map(|x| {
                let x = Elem(x as u32);
                (1..p).fold(x, |acc, _| self.mul(acc, x)).0
            })
            .collect();

        let mut order_log = Vec::with_capacity(n);
        for x in 0..n {
            let mut y = x as u32;
            let mut k = 0u32;
            while y != 0 {
                if k > max_log {
                    return Err(GroupError::NotAGroup(format!("element #{x} has no p-power order")));
                }
                y = self.pth_power[y as usize];
                k += 1;
            }
            order_log.push(k as u8);
        }
        self.exponent_log = order_log.iter().copied().max().unwrap_or(0) as u32;
        self.order_log = order_log;

        self.inv = (0..n)
            .map(|x| {
                let x = Elem(x as u32);
                let o = self.element_order(x);
                self.power_u(x, o - 1).0
            })
            .collect();
        Ok(())
    }

    /// Checks identity, inverse and associativity laws.
    ///
    /// Associativity is exhaustive up to `opts.assoc_exhaustive_limit`
    /// and sampled with `opts.seed` above it.
    pub fn verify_axioms(&self, opts: &BuildOptions) -> Result<(), GroupError> {
        let n = self.order;
        for x in self.elements() {
            if self.mul(Elem::IDENTITY, x) != x || self.mul(x, Elem::IDENTITY) != x {
                return Err(GroupError::AxiomViolation(format!("identity law fails at {x}")));
            }
            if self.mul(x, self.inv(x)) != Elem::IDENTITY || self.mul(self.inv(x), x) != Elem::IDENTITY {
                return Err(GroupError::AxiomViolation(format!("inverse law fails at {x}")));
            }
            if self.exponent_log < self.order_log[x.index()] as u32 {
                return Err(GroupError::AxiomViolation(format!("order of {x} exceeds exponent")));
            }
        }
        let assoc = |x: Elem, y: Elem, z: Elem| -> Result<(), GroupError> {
            if self.mul(self.mul(x, y), z) != self.mul(x, self.mul(y, z)) {
                return Err(GroupError::AxiomViolation(format!("associativity fails at ({x}, {y}, {z})")));
            }
            Ok(())
        };
        if n <= opts.assoc_exhaustive_limit {
            if let Multiplication::Dense(t) = &self.mult {
                // Row-sliced form of the same triple loop.
                for x in 0..n {
                    let rx = &t[x * n..(x + 1) * n];
                    for y in 0..n {
                        let xy = rx[y] as usize;
                        let rxy = &t[xy * n..(xy + 1) * n];
                        let ry = &t[y * n..(y + 1) * n];
                        for z in 0..n {
                            if rxy[z] != rx[ry[z] as usize] {
                                return assoc(Elem::new(x), Elem::new(y), Elem::new(z));
                            }
                        }
                    }
                }
            } else {
                for x in self.elements() {
                    for y in self.elements() {
                        for z in self.elements() {
                            assoc(x, y, z)?;
                        }
                    }
                }
            }
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
            for _ in 0..opts.assoc_samples {
                let mut pick = || Elem::new(rng.random_range(0..n));
                assoc(pick(), pick(), pick())?;
            }
        }
        Ok(())
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub(crate) fn set_label(&mut self, label: String) {
        self.label = label;
    }

    pub fn prime(&self) -> u32 {
        self.prime
    }

    pub fn order(&self) -> usize {
        self.order
    }

    /// `e` such that `exp G = p^e`.
    pub fn exponent_log(&self) -> u32 {
        self.exponent_log
    }

    pub fn is_dense(&self) -> bool {
        matches!(self.mult, Multiplication::Dense(_))
    }

    pub fn generators(&self) -> &[Elem] {
        &self.generators
    }

    pub fn generator_names(&self) -> &[String] {
        &self.generator_names
    }

    pub fn elements(&self) -> impl Iterator<Item = Elem> + Clone + use<> {
        (0..self.order as u32).map(Elem)
    }

    pub fn contains(&self, x: Elem) -> bool {
        x.index() < self.order
    }

    #[inline]
    pub fn mul(&self, x: Elem, y: Elem) -> Elem {
        match &self.mult {
            Multiplication::Dense(t) => Elem(t[x.index() * self.order + y.index()]),
            Multiplication::Delegated(f) => Elem(f(x.0, y.0)),
        }
    }

    #[inline]
    pub fn inv(&self, x: Elem) -> Elem {
        Elem(self.inv[x.index()])
    }

    /// `x^p`.
    #[inline]
    pub fn pth_power(&self, x: Elem) -> Elem {
        Elem(self.pth_power[x.index()])
    }

    /// `x^(p^k)`, by iterating the p-th power map.
    #[inline]
    pub fn power_p(&self, x: Elem, k: u32) -> Elem {
        let mut y = x;
        for _ in 0..k.min(self.order_log(x)) {
            y = self.pth_power(y);
        }
        y
    }

    /// `x^n` for any integer `n`; negative exponents go through the inverse.
    pub fn power(&self, x: Elem, n: i64) -> Elem {
        let o = self.element_order(x) as i64;
        self.power_u(x, n.rem_euclid(o) as u64)
    }

    fn power_u(&self, x: Elem, mut n: u64) -> Elem {
        let mut base = x;
        let mut acc = Elem::IDENTITY;
        while n > 0 {
            if n & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            n >>= 1;
        }
        acc
    }

    /// `[x, y] = x^-1 y^-1 x y`.
    #[inline]
    pub fn commutator(&self, x: Elem, y: Elem) -> Elem {
        let xy = self.mul(x, y);
        let yx = self.mul(y, x);
        self.mul(self.inv(yx), xy)
    }

    /// `x^y = y^-1 x y`.
    #[inline]
    pub fn conjugate(&self, x: Elem, y: Elem) -> Elem {
        self.mul(self.mul(self.inv(y), x), y)
    }

    /// `k` such that `o(x) = p^k`.
    #[inline]
    pub fn order_log(&self, x: Elem) -> u32 {
        self.order_log[x.index()] as u32
    }

    pub fn element_order(&self, x: Elem) -> u64 {
        (self.prime as u64).pow(self.order_log(x))
    }

    /// `exp G = p^e`, the least common multiple of the element orders.
    pub fn group_exponent(&self) -> u64 {
        (self.prime as u64).pow(self.exponent_log)
    }

    pub fn is_abelian(&self) -> bool {
        self.generators.iter().all(|&a| self.generators.iter().all(|&b| self.mul(a, b) == self.mul(b, a)))
    }

    /// A shortest word in the generators reaching `x`, as generator slots.
    pub fn word(&self, x: Elem) -> Vec<usize> {
        let mut word = Vec::new();
        let mut cur = x.index();
        while cur != 0 {
            let (parent, slot) = self.tree[cur];
            word.push(slot as usize);
            cur = parent as usize;
        }
        word.reverse();
        word
    }

    /// The shortest word for `x` rendered with generator names, e.g. `a^2*b`.
    pub fn word_string(&self, x: Elem) -> String {
        let word = self.word(x);
        if word.is_empty() {
            return "1".to_string();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < word.len() {
            let run = word[i..].iter().take_while(|&&s| s == word[i]).count();
            let name = &self.generator_names[word[i]];
            parts.push(if run == 1 { name.clone() } else { format!("{name}^{run}") });
            i += run;
        }
        parts.join("*")
    }

    /// Dense table row for `x`, when the table is dense.
    pub fn row(&self, x: Elem) -> Option<&[u32]> {
        match &self.mult {
            Multiplication::Dense(t) => Some(&t[x.index() * self.order..(x.index() + 1) * self.order]),
            Multiplication::Delegated(_) => None,
        }
    }
}
