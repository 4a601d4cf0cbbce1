//! Deterministic group families and their textual descriptors.
//!
//! A [`GroupSpec`] is written as a keyword followed by `key=value`
//! parameters, for example `semidirect p=2 m=3 n=1 t=5`,
//! `congruence p=3 dim=2 k=2` or `abelian p=2 type=[2,1]`. Direct
//! products nest two specs in braces: `direct {cyclic p=2 m=1} {dihedral m=3}`.
//! The canonical rendering (via `Display`) doubles as the group label.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

use crate::kernel::{close_generators, is_prime, BuildOptions, GroupError, GroupTable};
use crate::series::is_powerful_subgroup;
use crate::subgroups::SubgroupSet;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GroupSpec {
    /// `C_{p^m}`.
    Cyclic {
        p: u32,
        m: u32,
    },
    /// `C_{p^m_1} x ... x C_{p^m_r}`.
    Abelian {
        p: u32,
        exponents: Vec<u32>,
    },
    /// `C_{p^m} x|_t C_{p^n}`: `b^-1 a b = a^t`.
    Semidirect {
        p: u32,
        m: u32,
        n: u32,
        t: u64,
    },
    /// Kernel of `GL_dim(Z/p^k) -> GL_dim(Z/p^c)`, `c = 1` for odd `p`, `c = 2` for `p = 2`.
    Congruence {
        p: u32,
        dim: u32,
        k: u32,
    },
    /// Dihedral group of order `2^m`.
    Dihedral {
        m: u32,
    },
    /// Generalized quaternion group of order `2^m`.
    Quaternion {
        m: u32,
    },
    /// Heisenberg group mod `p`: extraspecial of order `p^3`, exponent `p`.
    Extraspecial {
        p: u32,
    },
    Direct(Box<GroupSpec>, Box<GroupSpec>),
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum SpecError {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("unknown group family `{0}`")]
    UnknownFamily(String),
    #[error("`{family}` is missing parameter `{key}`")]
    MissingKey { family: &'static str, key: &'static str },
    #[error("`{family}` does not take parameter `{key}`")]
    UnknownKey { family: &'static str, key: String },
    #[error("invalid parameter: {0}")]
    BadParameter(String),
    #[error("invalid twist: {t}^({p}^{n}) is not 1 mod {p}^{m}")]
    InvalidTwist { p: u32, m: u32, n: u32, t: u64 },
    #[error(transparent)]
    Group(#[from] GroupError),
}

fn pow(p: u32, k: u32) -> Option<u64> {
    (p as u64).checked_pow(k)
}

fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// Whether `t^(p^n) = 1 (mod p^m)`.
pub fn twist_is_valid(p: u32, m: u32, n: u32, t: u64) -> bool {
    let (Some(modulus), Some(reps)) = (pow(p, m), pow(p, n)) else {
        return false;
    };
    mod_pow(t, reps, modulus) == 1 % modulus
}

fn generator_name(i: usize) -> String {
    const NAMES: &[u8] = b"abcdefghijklmnopqrstuvwxyz";
    match NAMES.get(i) {
        Some(&c) => (c as char).to_string(),
        None => format!("g{i}"),
    }
}

impl GroupSpec {
    pub fn prime(&self) -> u32 {
        match self {
            GroupSpec::Cyclic { p, .. }
            | GroupSpec::Abelian { p, .. }
            | GroupSpec::Semidirect { p, .. }
            | GroupSpec::Congruence { p, .. }
            | GroupSpec::Extraspecial { p } => *p,
            GroupSpec::Dihedral { .. } | GroupSpec::Quaternion { .. } => 2,
            GroupSpec::Direct(a, _) => a.prime(),
        }
    }

    pub fn label(&self) -> String {
        self.to_string()
    }

    /// `log_p` of the order the constructor will produce.
    pub fn order_log(&self) -> u32 {
        match self {
            GroupSpec::Cyclic { m, .. } => *m,
            GroupSpec::Abelian { exponents, .. } => exponents.iter().sum(),
            GroupSpec::Semidirect { m, n, .. } => m + n,
            GroupSpec::Congruence { p, dim, k } => dim * dim * (k - congruence_level(*p)),
            GroupSpec::Dihedral { m } | GroupSpec::Quaternion { m } => *m,
            GroupSpec::Extraspecial { .. } => 3,
            GroupSpec::Direct(a, b) => a.order_log() + b.order_log(),
        }
    }

    /// Checks the parameter constraints of each family.
    pub fn validate(&self) -> Result<(), SpecError> {
        let bad = |msg: String| Err(SpecError::BadParameter(msg));
        let prime = |p: u32| {
            if is_prime(p) {
                Ok(())
            } else {
                Err(SpecError::Group(GroupError::NotPrime(p)))
            }
        };
        match self {
            GroupSpec::Cyclic { p, m } => {
                prime(*p)?;
                if *m == 0 {
                    return bad("cyclic needs m >= 1".into());
                }
            }
            GroupSpec::Abelian { p, exponents } => {
                prime(*p)?;
                if exponents.is_empty() || exponents.contains(&0) {
                    return bad("abelian type must be a non-empty list of positive exponents".into());
                }
            }
            GroupSpec::Semidirect { p, m, n, t } => {
                prime(*p)?;
                if *m == 0 || *n == 0 {
                    return bad("semidirect needs m, n >= 1".into());
                }
                let modulus = pow(*p, *m).ok_or_else(|| SpecError::BadParameter("p^m overflows".into()))?;
                if *t == 0 || *t >= modulus {
                    return bad(format!("twist t={t} must lie in 1..{modulus}"));
                }
                if !twist_is_valid(*p, *m, *n, *t) {
                    return Err(SpecError::InvalidTwist { p: *p, m: *m, n: *n, t: *t });
                }
            }
            GroupSpec::Congruence { p, dim, k } => {
                prime(*p)?;
                if *dim == 0 {
                    return bad("congruence needs dim >= 1".into());
                }
                if *k < congruence_level(*p) {
                    return bad(format!("congruence needs k >= {}", congruence_level(*p)));
                }
            }
            GroupSpec::Dihedral { m } if *m < 2 => return bad("dihedral needs m >= 2".into()),
            GroupSpec::Quaternion { m } if *m < 3 => return bad("quaternion needs m >= 3".into()),
            GroupSpec::Extraspecial { p } => {
                prime(*p)?;
                if *p == 2 {
                    return bad("extraspecial of exponent p needs odd p".into());
                }
            }
            GroupSpec::Direct(a, b) => {
                a.validate()?;
                b.validate()?;
                if a.prime() != b.prime() {
                    return bad("direct product factors must share the prime".into());
                }
            }
            GroupSpec::Dihedral { .. } | GroupSpec::Quaternion { .. } => {}
        }
        Ok(())
    }

    /// Validates and builds the group; the table is labelled with [`GroupSpec::label`].
    pub fn build(&self, opts: &BuildOptions) -> Result<GroupTable, SpecError> {
        self.validate()?;
        let expected = pow(self.prime(), self.order_log()).filter(|&n| n <= opts.order_cap as u64);
        let Some(expected) = expected else {
            return Err(GroupError::CapExceeded { cap: opts.order_cap }.into());
        };
        let mut table = match self {
            GroupSpec::Cyclic { p, m } => build_cyclic(*p, *m, opts)?,
            GroupSpec::Abelian { p, exponents } => build_abelian(*p, exponents, opts)?,
            GroupSpec::Semidirect { p, m, n, t } => build_semidirect_cyclic(*p, *m, *n, *t, opts)?,
            GroupSpec::Congruence { p, dim, k } => build_congruence_kernel(*p, *dim, *k, opts)?,
            GroupSpec::Dihedral { m } => build_dihedral(*m, opts)?,
            GroupSpec::Quaternion { m } => build_generalized_quaternion(*m, opts)?,
            GroupSpec::Extraspecial { p } => build_extraspecial_exponent_p(*p, opts)?,
            GroupSpec::Direct(a, b) => build_direct_product(a.build(opts)?, b.build(opts)?, opts)?,
        };
        assert_eq!(table.order() as u64, expected, "constructor for {self} produced the wrong order");
        table.set_label(self.label());
        Ok(table)
    }
}

fn congruence_level(p: u32) -> u32 {
    if p == 2 {
        2
    } else {
        1
    }
}

pub fn build_cyclic(p: u32, m: u32, opts: &BuildOptions) -> Result<GroupTable, GroupError> {
    build_abelian(p, &[m], opts)
}

pub fn build_abelian(p: u32, exponents: &[u32], opts: &BuildOptions) -> Result<GroupTable, GroupError> {
    let moduli: Vec<u64> = exponents.iter().map(|&m| (p as u64).pow(m)).collect();
    let r = moduli.len();
    let gens = (0..r)
        .map(|i| {
            let mut v = vec![0u64; r];
            v[i] = 1 % moduli[i];
            (generator_name(i), v)
        })
        .collect();
    close_generators(
        &format!("abelian p={p} type={exponents:?}"),
        p,
        gens,
        vec![0; r],
        move |x: &Vec<u64>, y: &Vec<u64>| x.iter().zip(y).zip(&moduli).map(|((a, b), q)| (a + b) % q).collect(),
        opts,
    )
}

/// `C_{p^m} x|_t C_{p^n}` on normal forms `a^i b^j`.
pub fn build_semidirect_cyclic(p: u32, m: u32, n: u32, t: u64, opts: &BuildOptions) -> Result<GroupTable, SpecError> {
    if !twist_is_valid(p, m, n, t) {
        return Err(SpecError::InvalidTwist { p, m, n, t });
    }
    let qm = (p as u64).pow(m);
    let qn = (p as u64).pow(n);
    let twist: Arc<Vec<u64>> = Arc::new((0..qn).map(|j| mod_pow(t, j, qm)).collect());
    Ok(close_generators(
        &format!("semidirect p={p} m={m} n={n} t={t}"),
        p,
        vec![("a".into(), (1 % qm, 0)), ("b".into(), (0, 1 % qn))],
        (0u64, 0u64),
        move |&(i1, j1), &(i2, j2)| ((i1 + twist[j1 as usize] * i2) % qm, (j1 + j2) % qn),
        opts,
    )?)
}

/// The kernel of reduction `GL_dim(Z/p^k) -> GL_dim(Z/p^c)`, generated by
/// the elementary matrices `I + p^c E_rs`.
pub fn build_congruence_kernel(p: u32, dim: u32, k: u32, opts: &BuildOptions) -> Result<GroupTable, GroupError> {
    let c = congruence_level(p);
    let q = (p as u64).pow(k);
    let step = (p as u64).pow(c) % q;
    let d = dim as usize;
    let identity: Vec<u64> = (0..d * d).map(|i| u64::from(i % (d + 1) == 0) % q).collect();
    let mut gens = Vec::new();
    for r in 0..d {
        for s in 0..d {
            let mut mat = identity.clone();
            mat[r * d + s] = (mat[r * d + s] + step) % q;
            gens.push((format!("x{}{}", r + 1, s + 1), mat));
        }
    }
    close_generators(
        &format!("congruence p={p} dim={dim} k={k}"),
        p,
        gens,
        identity,
        move |x: &Vec<u64>, y: &Vec<u64>| {
            let mut z = vec![0u64; d * d];
            for r in 0..d {
                for s in 0..d {
                    z[r * d + s] = (0..d).map(|u| x[r * d + u] * y[u * d + s]).sum::<u64>() % q;
                }
            }
            z
        },
        opts,
    )
}

/// Dihedral group of order `2^m` on normal forms `r^i s^f`.
pub fn build_dihedral(m: u32, opts: &BuildOptions) -> Result<GroupTable, GroupError> {
    let n = 1u64 << (m - 1);
    close_generators(
        &format!("dihedral m={m}"),
        2,
        vec![("r".into(), (1 % n, 0u8)), ("s".into(), (0, 1))],
        (0u64, 0u8),
        move |&(i1, f1), &(i2, f2)| {
            let i = if f1 == 0 { i1 + i2 } else { i1 + n - i2 };
            (i % n, f1 ^ f2)
        },
        opts,
    )
}

/// Generalized quaternion group of order `2^m` on normal forms `a^i b^j`,
/// with `b^2 = a^(2^(m-2))` and `b^-1 a b = a^-1`.
pub fn build_generalized_quaternion(m: u32, opts: &BuildOptions) -> Result<GroupTable, GroupError> {
    let n = 1u64 << (m - 1);
    let half = n / 2;
    close_generators(
        &format!("quaternion m={m}"),
        2,
        vec![("a".into(), (1u64, 0u8)), ("b".into(), (0, 1))],
        (0u64, 0u8),
        move |&(i1, j1), &(i2, j2)| match (j1, j2) {
            (0, _) => ((i1 + i2) % n, j2),
            (_, 0) => ((i1 + n - i2) % n, 1),
            _ => ((i1 + n - i2 + half) % n, 0),
        },
        opts,
    )
}

/// Upper unitriangular 3x3 matrices mod `p`, stored as `(a, b, c)` for
/// `[[1, a, c], [0, 1, b], [0, 0, 1]]`.
pub fn build_extraspecial_exponent_p(p: u32, opts: &BuildOptions) -> Result<GroupTable, GroupError> {
    let q = p as u64;
    close_generators(
        &format!("extraspecial p={p}"),
        p,
        vec![("x".into(), (1u64, 0u64, 0u64)), ("y".into(), (0, 1, 0))],
        (0, 0, 0),
        move |&(a1, b1, c1), &(a2, b2, c2)| ((a1 + a2) % q, (b1 + b2) % q, (c1 + c2 + a1 * b2) % q),
        opts,
    )
}

/// `A x B`, generated by the generators of `A` followed by those of `B`.
pub fn build_direct_product(a: GroupTable, b: GroupTable, opts: &BuildOptions) -> Result<GroupTable, GroupError> {
    use crate::kernel::Elem;
    if a.prime() != b.prime() {
        return Err(GroupError::NotPrimePower { order: a.order() * b.order(), prime: a.prime() });
    }
    let prime = a.prime();
    let label = format!("{} x {}", a.label(), b.label());
    let mut gens: Vec<(String, (u32, u32))> = Vec::new();
    for (&g, name) in a.generators().iter().zip(a.generator_names()) {
        gens.push((format!("{name}1"), (g.index() as u32, 0)));
    }
    for (&g, name) in b.generators().iter().zip(b.generator_names()) {
        gens.push((format!("{name}2"), (0, g.index() as u32)));
    }
    let (a, b) = (Arc::new(a), Arc::new(b));
    close_generators(
        &label,
        prime,
        gens,
        (0, 0),
        move |&(x1, x2), &(y1, y2)| {
            let z1 = a.mul(Elem::new(x1 as usize), Elem::new(y1 as usize));
            let z2 = b.mul(Elem::new(x2 as usize), Elem::new(y2 as usize));
            (z1.index() as u32, z2.index() as u32)
        },
        opts,
    )
}

/// `G' <= G^p` for odd `p`, `G' <= G^4` for `p = 2`.
pub fn is_powerful(g: &GroupTable) -> bool {
    is_powerful_subgroup(&SubgroupSet::whole(g))
}

impl fmt::Display for GroupSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GroupSpec::Cyclic { p, m } => write!(f, "cyclic p={p} m={m}"),
            GroupSpec::Abelian { p, exponents } => {
                let list: Vec<String> = exponents.iter().map(u32::to_string).collect();
                write!(f, "abelian p={p} type=[{}]", list.join(","))
            }
            GroupSpec::Semidirect { p, m, n, t } => write!(f, "semidirect p={p} m={m} n={n} t={t}"),
            GroupSpec::Congruence { p, dim, k } => write!(f, "congruence p={p} dim={dim} k={k}"),
            GroupSpec::Dihedral { m } => write!(f, "dihedral m={m}"),
            GroupSpec::Quaternion { m } => write!(f, "quaternion m={m}"),
            GroupSpec::Extraspecial { p } => write!(f, "extraspecial p={p}"),
            GroupSpec::Direct(a, b) => write!(f, "direct {{{a}}} {{{b}}}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
enum Token {
    Word(String),
    Open,
    Close,
}

fn tokenize(s: &str) -> Result<Vec<Token>, SpecError> {
    let mut tokens = Vec::new();
    let mut chars = s.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '{' => {
                chars.next();
                tokens.push(Token::Open);
            }
            '}' => {
                chars.next();
                tokens.push(Token::Close);
            }
            c if c.is_whitespace() => {
                chars.next();
            }
            _ => {
                let mut word = String::new();
                let mut depth = 0;
                while let Some(&c) = chars.peek() {
                    if depth == 0 && (c.is_whitespace() || c == '{' || c == '}') {
                        break;
                    }
                    match c {
                        '[' => depth += 1,
                        ']' if depth == 0 => return Err(SpecError::Syntax(format!("unbalanced `]` in `{s}`"))),
                        ']' => depth -= 1,
                        _ => {}
                    }
                    word.push(c);
                    chars.next();
                }
                if depth != 0 {
                    return Err(SpecError::Syntax(format!("unbalanced `[` in `{s}`")));
                }
                tokens.push(Token::Word(word));
            }
        }
    }
    Ok(tokens)
}

struct Params {
    family: &'static str,
    values: BTreeMap<String, String>,
}

impl Params {
    fn take(&mut self, key: &'static str) -> Result<String, SpecError> {
        self.values.remove(key).ok_or(SpecError::MissingKey { family: self.family, key })
    }

    fn int<T: FromStr>(&mut self, key: &'static str) -> Result<T, SpecError> {
        let raw = self.take(key)?;
        raw.parse().map_err(|_| SpecError::BadParameter(format!("{key}={raw} is not a non-negative integer")))
    }

    fn list(&mut self, key: &'static str) -> Result<Vec<u32>, SpecError> {
        let raw = self.take(key)?;
        let inner = raw
            .strip_prefix('[')
            .and_then(|r| r.strip_suffix(']'))
            .ok_or_else(|| SpecError::BadParameter(format!("{key}={raw} is not a [..] list")))?;
        inner
            .split(',')
            .map(|v| {
                v.trim().parse().map_err(|_| SpecError::BadParameter(format!("{key}={raw} has a non-integer entry")))
            })
            .collect()
    }

    fn finish(self) -> Result<(), SpecError> {
        match self.values.into_keys().next() {
            Some(key) => Err(SpecError::UnknownKey { family: self.family, key }),
            None => Ok(()),
        }
    }
}

fn parse_tokens(tokens: &[Token], pos: &mut usize) -> Result<GroupSpec, SpecError> {
    let Some(Token::Word(family)) = tokens.get(*pos) else {
        return Err(SpecError::Syntax("expected a group family".into()));
    };
    *pos += 1;
    let family: &'static str = match family.as_str() {
        "cyclic" => "cyclic",
        "abelian" => "abelian",
        "semidirect" => "semidirect",
        "congruence" => "congruence",
        "dihedral" => "dihedral",
        "quaternion" => "quaternion",
        "extraspecial" => "extraspecial",
        "direct" => "direct",
        other => return Err(SpecError::UnknownFamily(other.to_string())),
    };
    if family == "direct" {
        let factor = |pos: &mut usize| -> Result<GroupSpec, SpecError> {
            if tokens.get(*pos) != Some(&Token::Open) {
                return Err(SpecError::Syntax("direct expects `{spec} {spec}`".into()));
            }
            *pos += 1;
            let inner = parse_tokens(tokens, pos)?;
            if tokens.get(*pos) != Some(&Token::Close) {
                return Err(SpecError::Syntax("missing `}`".into()));
            }
            *pos += 1;
            Ok(inner)
        };
        let a = factor(pos)?;
        let b = factor(pos)?;
        return Ok(GroupSpec::Direct(Box::new(a), Box::new(b)));
    }

    let mut values = BTreeMap::new();
    while let Some(Token::Word(word)) = tokens.get(*pos) {
        let (key, value) =
            word.split_once('=').ok_or_else(|| SpecError::Syntax(format!("expected key=value, found `{word}`")))?;
        if values.insert(key.to_string(), value.to_string()).is_some() {
            return Err(SpecError::Syntax(format!("parameter `{key}` given twice")));
        }
        *pos += 1;
    }
    let mut params = Params { family, values };
    let spec = match family {
        "cyclic" => GroupSpec::Cyclic { p: params.int("p")?, m: params.int("m")? },
        "abelian" => GroupSpec::Abelian { p: params.int("p")?, exponents: params.list("type")? },
        "semidirect" => {
            GroupSpec::Semidirect { p: params.int("p")?, m: params.int("m")?, n: params.int("n")?, t: params.int("t")? }
        }
        "congruence" => GroupSpec::Congruence { p: params.int("p")?, dim: params.int("dim")?, k: params.int("k")? },
        "dihedral" => GroupSpec::Dihedral { m: params.int("m")? },
        "quaternion" => GroupSpec::Quaternion { m: params.int("m")? },
        "extraspecial" => GroupSpec::Extraspecial { p: params.int("p")? },
        _ => unreachable!(),
    };
    params.finish()?;
    Ok(spec)
}

impl FromStr for GroupSpec {
    type Err = SpecError;

    /// Parses the textual form. Parameter constraints are checked by
    /// [`GroupSpec::validate`], not here.
    fn from_str(s: &str) -> Result<Self, SpecError> {
        let tokens = tokenize(s)?;
        let mut pos = 0;
        let spec = parse_tokens(&tokens, &mut pos)?;
        if pos != tokens.len() {
            return Err(SpecError::Syntax(format!("trailing input in `{s}`")));
        }
        Ok(spec)
    }
}

fn partitions(n: u32, max_part: u32) -> Vec<Vec<u32>> {
    if n == 0 {
        return vec![Vec::new()];
    }
    let mut out = Vec::new();
    for first in (1..=n.min(max_part)).rev() {
        for mut rest in partitions(n - first, first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// The shipped corpus.
///
/// Abelian groups of order at most 64 for p in {2, 3, 5}; split metacyclic
/// groups `C_{p^m} x| C_{p^n}` of order at most 512 with every valid twist
/// `t = 1 + p^r`; four congruence kernels; and the non-powerful controls
/// `D8, D16, Q8, Q16` and the Heisenberg groups mod 3 and 5.
pub fn default_corpus() -> Vec<GroupSpec> {
    let mut specs = Vec::new();
    for p in [2u32, 3, 5] {
        let mut m = 1;
        while (p as u64).pow(m) <= 64 {
            for part in partitions(m, m) {
                specs.push(match part.as_slice() {
                    [single] => GroupSpec::Cyclic { p, m: *single },
                    _ => GroupSpec::Abelian { p, exponents: part },
                });
            }
            m += 1;
        }
    }
    for p in [2u32, 3, 5] {
        for total in 2.. {
            if (p as u64).pow(total) > 512 {
                break;
            }
            for m in 1..total {
                let n = total - m;
                let qm = (p as u64).pow(m);
                let mut twists: Vec<u64> = (1..=m).map(|r| (1 + (p as u64).pow(r)) % qm).collect();
                twists.sort_unstable();
                twists.dedup();
                for t in twists {
                    if twist_is_valid(p, m, n, t) {
                        specs.push(GroupSpec::Semidirect { p, m, n, t });
                    }
                }
            }
        }
    }
    for (p, dim, k) in [(3, 2, 2), (2, 2, 3), (2, 2, 4), (5, 2, 2)] {
        specs.push(GroupSpec::Congruence { p, dim, k });
    }
    specs.extend([
        GroupSpec::Dihedral { m: 3 },
        GroupSpec::Dihedral { m: 4 },
        GroupSpec::Quaternion { m: 3 },
        GroupSpec::Quaternion { m: 4 },
        GroupSpec::Extraspecial { p: 3 },
        GroupSpec::Extraspecial { p: 5 },
    ]);
    specs
}
