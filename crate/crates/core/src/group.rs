//! Concrete computable groups.
//!
//! Every group is presented by an explicit multiplication oracle on canonical
//! encodings: integer tuples for `Z^d`, `Z/nZ` and the integer Heisenberg group,
//! reduced fractions for the Prüfer groups and `Q`, and nested tuples for
//! direct products. Derived `Ord` on [`Element`] is the canonical order used by
//! every set-valued output.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A group element in canonical encoding. Two elements of the same group are
/// equal iff their encodings are equal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Element {
    Ints(Vec<BigInt>),
    Frac(BigRational),
    Tuple(Vec<Element>),
}

impl Element {
    pub fn int(v: i64) -> Element {
        Element::Ints(vec![BigInt::from(v)])
    }

    pub fn ints(v: &[i64]) -> Element {
        Element::Ints(v.iter().map(|&x| BigInt::from(x)).collect())
    }

    pub fn frac(num: i64, den: i64) -> Element {
        Element::Frac(BigRational::new(num.into(), den.into()))
    }

    pub fn tuple(parts: Vec<Element>) -> Element {
        Element::Tuple(parts)
    }

    fn ints_slice(&self) -> Option<&[BigInt]> {
        match self {
            Element::Ints(v) => Some(v),
            _ => None,
        }
    }
}

impl fmt::Display for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Element::Ints(v) if v.len() == 1 => write!(f, "{}", v[0]),
            Element::Ints(v) => {
                write!(f, "(")?;
                for (i, x) in v.iter().enumerate() {
                    if i > 0 {
                        write!(f, ",")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, ")")
            }
            Element::Frac(q) => write!(f, "{q}"),
            Element::Tuple(parts) => {
                write!(f, "[")?;
                for (i, x) in parts.iter().enumerate() {
                    if i > 0 {
                        write!(f, ";")?;
                    }
                    write!(f, "{x}")?;
                }
                write!(f, "]")
            }
        }
    }
}

/// Which subgroup a [`GroupContext::FiniteExtension`] base embeds as.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Embedding {
    /// base and ambient coincide
    Identity,
    /// ambient is a direct product whose first factor is the base
    FirstFactor,
    /// base is the trivial group
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "GroupDescriptor", into = "GroupDescriptor")]
pub enum GroupContext {
    Lattice {
        d: usize,
    },
    Cyclic {
        n: u64,
    },
    Heisenberg3,
    Pruefer {
        p: u64,
    },
    Rationals,
    DirectProduct(Vec<GroupContext>),
    /// A group `G` with a finite-index subgroup `base`, multiplied through
    /// `ambient`. `coset_reps` are right coset representatives of the embedded
    /// base, the identity among them.
    FiniteExtension {
        base: Box<GroupContext>,
        ambient: Box<GroupContext>,
        coset_reps: Vec<Element>,
    },
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
enum GroupDescriptor {
    Lattice {
        d: usize,
    },
    Cyclic {
        n: u64,
    },
    Heisenberg3,
    Pruefer {
        p: u64,
    },
    Rationals,
    DirectProduct {
        factors: Vec<GroupContext>,
    },
    FiniteExtension {
        base: Box<GroupContext>,
        ambient: Box<GroupContext>,
        coset_reps: Vec<String>,
    },
}

impl TryFrom<GroupDescriptor> for GroupContext {
    type Error = Error;

    fn try_from(d: GroupDescriptor) -> Result<Self> {
        let ctx = match d {
            GroupDescriptor::Lattice { d } => GroupContext::Lattice { d },
            GroupDescriptor::Cyclic { n } => GroupContext::cyclic(n)?,
            GroupDescriptor::Heisenberg3 => GroupContext::Heisenberg3,
            GroupDescriptor::Pruefer { p } => GroupContext::pruefer(p)?,
            GroupDescriptor::Rationals => GroupContext::Rationals,
            GroupDescriptor::DirectProduct { factors } => GroupContext::DirectProduct(factors),
            GroupDescriptor::FiniteExtension {
                base,
                ambient,
                coset_reps,
            } => {
                let reps = coset_reps
                    .iter()
                    .map(|s| ambient.parse_element(s))
                    .collect::<Result<Vec<_>>>()?;
                GroupContext::finite_extension(*base, *ambient, reps)?
            }
        };
        Ok(ctx)
    }
}

impl From<GroupContext> for GroupDescriptor {
    fn from(c: GroupContext) -> Self {
        match c {
            GroupContext::Lattice { d } => GroupDescriptor::Lattice { d },
            GroupContext::Cyclic { n } => GroupDescriptor::Cyclic { n },
            GroupContext::Heisenberg3 => GroupDescriptor::Heisenberg3,
            GroupContext::Pruefer { p } => GroupDescriptor::Pruefer { p },
            GroupContext::Rationals => GroupDescriptor::Rationals,
            GroupContext::DirectProduct(factors) => GroupDescriptor::DirectProduct { factors },
            GroupContext::FiniteExtension {
                base,
                ambient,
                coset_reps,
            } => GroupDescriptor::FiniteExtension {
                base,
                ambient,
                coset_reps: coset_reps.iter().map(|e| e.to_string()).collect(),
            },
        }
    }
}

pub(crate) fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut i = 2u64;
    while i * i <= p {
        if p.is_multiple_of(i) {
            return false;
        }
        i += 1;
    }
    true
}

impl GroupContext {
    pub fn lattice(d: usize) -> Self {
        GroupContext::Lattice { d }
    }

    pub fn cyclic(n: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Descriptor("cyclic group order must be positive".into()));
        }
        Ok(GroupContext::Cyclic { n })
    }

    pub fn pruefer(p: u64) -> Result<Self> {
        if !is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        Ok(GroupContext::Pruefer { p })
    }

    pub fn finite_extension(
        base: GroupContext,
        ambient: GroupContext,
        coset_reps: Vec<Element>,
    ) -> Result<Self> {
        let embedding = embedding_kind(&base, &ambient)?;
        for r in &coset_reps {
            ambient.validate(r)?;
        }
        let id = ambient.identity();
        if !coset_reps.contains(&id) {
            return Err(Error::NotCosetReps("identity missing".into()));
        }
        // r_i r_j^{-1} ∈ L  iff  L r_i = L r_j
        for (i, a) in coset_reps.iter().enumerate() {
            for b in &coset_reps[i + 1..] {
                let q = ambient.mul(a, &ambient.inverse_unchecked(b));
                if embedded_contains(embedding, &ambient, &q) {
                    return Err(Error::NotCosetReps(format!("{a} and {b} share a coset")));
                }
            }
        }
        Ok(GroupContext::FiniteExtension {
            base: Box::new(base),
            ambient: Box::new(ambient),
            coset_reps,
        })
    }

    /// Short human-readable name, e.g. `lattice(2)`.
    pub fn name(&self) -> String {
        match self {
            GroupContext::Lattice { d } => format!("lattice({d})"),
            GroupContext::Cyclic { n } => format!("cyclic({n})"),
            GroupContext::Heisenberg3 => "heisenberg3".into(),
            GroupContext::Pruefer { p } => format!("pruefer({p})"),
            GroupContext::Rationals => "rationals".into(),
            GroupContext::DirectProduct(f) => {
                let parts: Vec<_> = f.iter().map(|c| c.name()).collect();
                format!("direct_product({})", parts.join(","))
            }
            GroupContext::FiniteExtension { base, ambient, .. } => {
                format!("finite_extension({} in {})", base.name(), ambient.name())
            }
        }
    }

    pub fn is_abelian(&self) -> bool {
        match self {
            GroupContext::Heisenberg3 => false,
            GroupContext::DirectProduct(f) => f.iter().all(|c| c.is_abelian()),
            GroupContext::FiniteExtension { ambient, .. } => ambient.is_abelian(),
            _ => true,
        }
    }

    /// True for the trivial group (`lattice(0)`, `cyclic(1)`, or products of those).
    pub fn is_trivial(&self) -> bool {
        match self {
            GroupContext::Lattice { d } => *d == 0,
            GroupContext::Cyclic { n } => *n == 1,
            GroupContext::DirectProduct(f) => f.iter().all(|c| c.is_trivial()),
            _ => false,
        }
    }

    pub fn identity(&self) -> Element {
        match self {
            GroupContext::Lattice { d } => Element::Ints(vec![BigInt::zero(); *d]),
            GroupContext::Cyclic { .. } => Element::Ints(vec![BigInt::zero()]),
            GroupContext::Heisenberg3 => Element::Ints(vec![BigInt::zero(); 3]),
            GroupContext::Pruefer { .. } | GroupContext::Rationals => {
                Element::Frac(BigRational::zero())
            }
            GroupContext::DirectProduct(f) => {
                Element::Tuple(f.iter().map(|c| c.identity()).collect())
            }
            GroupContext::FiniteExtension { ambient, .. } => ambient.identity(),
        }
    }

    fn encoding_error(&self, g: &Element, reason: &str) -> Error {
        Error::Encoding {
            group: self.name(),
            encoding: g.to_string(),
            reason: reason.into(),
        }
    }

    /// Checks that `g` is a canonical encoding of an element of this group.
    pub fn validate(&self, g: &Element) -> Result<()> {
        match (self, g) {
            (GroupContext::Lattice { d }, Element::Ints(v)) if v.len() == *d => Ok(()),
            (GroupContext::Heisenberg3, Element::Ints(v)) if v.len() == 3 => Ok(()),
            (GroupContext::Cyclic { n }, Element::Ints(v)) if v.len() == 1 => {
                if v[0].is_negative() || v[0] >= BigInt::from(*n) {
                    Err(self.encoding_error(g, "residue out of range"))
                } else {
                    Ok(())
                }
            }
            (GroupContext::Pruefer { p }, Element::Frac(q)) => {
                if q.is_negative() || *q >= BigRational::one() {
                    return Err(self.encoding_error(g, "not in [0,1)"));
                }
                let mut den = q.denom().clone();
                let pb = BigInt::from(*p);
                while den > BigInt::one() {
                    let (quo, rem) = den.div_rem(&pb);
                    if !rem.is_zero() {
                        return Err(self.encoding_error(g, "denominator is not a power of p"));
                    }
                    den = quo;
                }
                Ok(())
            }
            (GroupContext::Rationals, Element::Frac(_)) => Ok(()),
            (GroupContext::DirectProduct(f), Element::Tuple(parts)) if parts.len() == f.len() => {
                for (c, x) in f.iter().zip(parts) {
                    c.validate(x)?;
                }
                Ok(())
            }
            (GroupContext::FiniteExtension { ambient, .. }, _) => ambient.validate(g),
            _ => Err(self.encoding_error(g, "wrong shape")),
        }
    }

    /// Group law on validated encodings.
    pub fn product(&self, g: &Element, h: &Element) -> Result<Element> {
        self.validate(g)?;
        self.validate(h)?;
        Ok(self.mul(g, h))
    }

    /// Group inverse on a validated encoding.
    pub fn inverse(&self, g: &Element) -> Result<Element> {
        self.validate(g)?;
        Ok(self.inverse_unchecked(g))
    }

    /// Group law without validation. Callers must pass valid encodings.
    pub fn mul(&self, g: &Element, h: &Element) -> Element {
        match self {
            GroupContext::Lattice { .. } => add_ints(g, h),
            GroupContext::Cyclic { n } => {
                let a = &g.ints_slice().expect("cyclic encoding")[0];
                let b = &h.ints_slice().expect("cyclic encoding")[0];
                Element::Ints(vec![(a + b).mod_floor(&BigInt::from(*n))])
            }
            GroupContext::Heisenberg3 => {
                let a = g.ints_slice().expect("heisenberg encoding");
                let b = h.ints_slice().expect("heisenberg encoding");
                Element::Ints(vec![
                    &a[0] + &b[0],
                    &a[1] + &b[1],
                    &a[2] + &b[2] + &a[0] * &b[1],
                ])
            }
            GroupContext::Pruefer { .. } => match (g, h) {
                (Element::Frac(a), Element::Frac(b)) => Element::Frac(frac_part(a + b)),
                _ => panic!("pruefer encoding"),
            },
            GroupContext::Rationals => match (g, h) {
                (Element::Frac(a), Element::Frac(b)) => Element::Frac(a + b),
                _ => panic!("rational encoding"),
            },
            GroupContext::DirectProduct(f) => match (g, h) {
                (Element::Tuple(a), Element::Tuple(b)) => Element::Tuple(
                    f.iter()
                        .zip(a.iter().zip(b))
                        .map(|(c, (x, y))| c.mul(x, y))
                        .collect(),
                ),
                _ => panic!("product encoding"),
            },
            GroupContext::FiniteExtension { ambient, .. } => ambient.mul(g, h),
        }
    }

    pub fn inverse_unchecked(&self, g: &Element) -> Element {
        match self {
            GroupContext::Lattice { .. } => {
                Element::Ints(g.ints_slice().expect("lattice encoding").iter().map(|x| -x).collect())
            }
            GroupContext::Cyclic { n } => {
                let a = &g.ints_slice().expect("cyclic encoding")[0];
                Element::Ints(vec![(-a).mod_floor(&BigInt::from(*n))])
            }
            GroupContext::Heisenberg3 => {
                let a = g.ints_slice().expect("heisenberg encoding");
                Element::Ints(vec![-&a[0], -&a[1], &a[0] * &a[1] - &a[2]])
            }
            GroupContext::Pruefer { .. } => match g {
                Element::Frac(a) => Element::Frac(frac_part(-a)),
                _ => panic!("pruefer encoding"),
            },
            GroupContext::Rationals => match g {
                Element::Frac(a) => Element::Frac(-a),
                _ => panic!("rational encoding"),
            },
            GroupContext::DirectProduct(f) => match g {
                Element::Tuple(a) => Element::Tuple(
                    f.iter().zip(a).map(|(c, x)| c.inverse_unchecked(x)).collect(),
                ),
                _ => panic!("product encoding"),
            },
            GroupContext::FiniteExtension { ambient, .. } => ambient.inverse_unchecked(g),
        }
    }

    /// `g^k` for any integer `k`.
    pub fn pow(&self, g: &Element, k: &BigInt) -> Element {
        let base = if k.is_negative() {
            self.inverse_unchecked(g)
        } else {
            g.clone()
        };
        let mut e = k.abs();
        let mut acc = self.identity();
        let mut sq = base;
        let two = BigInt::from(2);
        while !e.is_zero() {
            if e.is_odd() {
                acc = self.mul(&acc, &sq);
            }
            e /= &two;
            if !e.is_zero() {
                sq = self.mul(&sq, &sq);
            }
        }
        acc
    }

    /// Left translate `g·F`.
    pub fn translate(&self, g: &Element, set: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::from_sorted_unchecked(sorted(set.iter().map(|f| self.mul(g, f)).collect()))
    }

    /// Right translate `F·g`.
    pub fn right_translate(&self, set: &FiniteSubset, g: &Element) -> FiniteSubset {
        FiniteSubset::from_sorted_unchecked(sorted(set.iter().map(|f| self.mul(f, g)).collect()))
    }

    /// `F^{-1}`, which turns a right Følner set into a left one.
    pub fn inverse_set(&self, set: &FiniteSubset) -> FiniteSubset {
        FiniteSubset::from_sorted_unchecked(sorted(
            set.iter().map(|f| self.inverse_unchecked(f)).collect(),
        ))
    }

    /// The product set `A·B`, required to have `|A|·|B|` distinct elements.
    pub fn product_set(&self, a: &FiniteSubset, b: &FiniteSubset) -> Result<FiniteSubset> {
        let mut out = Vec::with_capacity(a.len() * b.len());
        for x in a.iter() {
            for y in b.iter() {
                out.push(self.mul(x, y));
            }
        }
        FiniteSubset::new(out)
    }

    /// Parses the textual encoding produced by `Element`'s `Display`.
    pub fn parse_element(&self, s: &str) -> Result<Element> {
        let s = s.trim();
        let err = |reason: &str| Error::Encoding {
            group: self.name(),
            encoding: s.to_string(),
            reason: reason.into(),
        };
        let el = match self {
            GroupContext::Lattice { .. } | GroupContext::Heisenberg3 | GroupContext::Cyclic { .. } => {
                let inner = if s.starts_with('(') {
                    s.strip_prefix('(')
                        .and_then(|x| x.strip_suffix(')'))
                        .ok_or_else(|| err("unbalanced parentheses"))?
                } else {
                    s
                };
                let coords = if inner.trim().is_empty() {
                    Vec::new()
                } else {
                    inner
                        .split(',')
                        .map(|t| t.trim().parse::<BigInt>().map_err(|_| err("not an integer")))
                        .collect::<Result<Vec<_>>>()?
                };
                Element::Ints(coords)
            }
            GroupContext::Pruefer { .. } | GroupContext::Rationals => {
                Element::Frac(s.parse::<BigRational>().map_err(|_| err("not a fraction"))?)
            }
            GroupContext::DirectProduct(f) => {
                let inner = s
                    .strip_prefix('[')
                    .and_then(|x| x.strip_suffix(']'))
                    .ok_or_else(|| err("expected [..;..]"))?;
                let parts = split_top_level(inner, ';');
                if parts.len() != f.len() {
                    return Err(err("wrong number of factors"));
                }
                Element::Tuple(
                    f.iter()
                        .zip(parts)
                        .map(|(c, p)| c.parse_element(p))
                        .collect::<Result<Vec<_>>>()?,
                )
            }
            GroupContext::FiniteExtension { ambient, .. } => return ambient.parse_element(s),
        };
        self.validate(&el)?;
        Ok(el)
    }

    pub fn parse_set(&self, items: &[String]) -> Result<FiniteSubset> {
        FiniteSubset::new(
            items
                .iter()
                .map(|s| self.parse_element(s))
                .collect::<Result<Vec<_>>>()?,
        )
    }

    /// Embedding of the base subgroup of a finite extension into its ambient group.
    pub fn embed_base(&self, g: &Element) -> Result<Element> {
        match self {
            GroupContext::FiniteExtension { base, ambient, .. } => {
                base.validate(g)?;
                Ok(match embedding_kind(base, ambient)? {
                    Embedding::Identity => g.clone(),
                    Embedding::FirstFactor => match ambient.as_ref() {
                        GroupContext::DirectProduct(f) => {
                            let mut parts = vec![g.clone()];
                            parts.extend(f[1..].iter().map(|c| c.identity()));
                            Element::Tuple(parts)
                        }
                        _ => unreachable!("first-factor embedding needs a direct product"),
                    },
                    Embedding::Trivial => ambient.identity(),
                })
            }
            _ => Err(Error::UnsupportedGroup(format!(
                "{} has no base subgroup",
                self.name()
            ))),
        }
    }

    /// Canonical generators, used by defect reports.
    pub fn standard_generators(&self) -> Vec<Element> {
        match self {
            GroupContext::Lattice { d } => (0..*d)
                .map(|i| {
                    let mut v = vec![BigInt::zero(); *d];
                    v[i] = BigInt::one();
                    Element::Ints(v)
                })
                .collect(),
            GroupContext::Cyclic { n } if *n > 1 => vec![Element::int(1)],
            GroupContext::Cyclic { .. } => Vec::new(),
            GroupContext::Heisenberg3 => vec![
                Element::ints(&[1, 0, 0]),
                Element::ints(&[0, 1, 0]),
                Element::ints(&[0, 0, 1]),
            ],
            GroupContext::Pruefer { p } => {
                let p = *p as i64;
                let mut out = Vec::new();
                let mut den = p;
                for _ in 0..4 {
                    out.push(Element::frac(1, den));
                    den *= p;
                }
                out
            }
            GroupContext::Rationals => {
                let mut out = Vec::new();
                let mut fact = 1i64;
                for k in 1..=4 {
                    fact *= k;
                    out.push(Element::frac(1, fact));
                }
                out
            }
            GroupContext::DirectProduct(f) => {
                let mut out = Vec::new();
                for (i, c) in f.iter().enumerate() {
                    for g in c.standard_generators() {
                        let mut parts: Vec<Element> = f.iter().map(|c| c.identity()).collect();
                        parts[i] = g;
                        out.push(Element::Tuple(parts));
                    }
                }
                out
            }
            GroupContext::FiniteExtension { ambient, .. } => ambient.standard_generators(),
        }
    }
}

pub(crate) fn embedding_kind(base: &GroupContext, ambient: &GroupContext) -> Result<Embedding> {
    if base == ambient {
        return Ok(Embedding::Identity);
    }
    if base.is_trivial() {
        return Ok(Embedding::Trivial);
    }
    if let GroupContext::DirectProduct(f) = ambient {
        if f.first() == Some(base) {
            return Ok(Embedding::FirstFactor);
        }
    }
    Err(Error::UnsupportedGroup(format!(
        "no canonical embedding of {} into {}",
        base.name(),
        ambient.name()
    )))
}

fn embedded_contains(kind: Embedding, ambient: &GroupContext, g: &Element) -> bool {
    match kind {
        Embedding::Identity => true,
        Embedding::Trivial => *g == ambient.identity(),
        Embedding::FirstFactor => match (ambient, g) {
            (GroupContext::DirectProduct(f), Element::Tuple(parts)) => f[1..]
                .iter()
                .zip(&parts[1..])
                .all(|(c, x)| *x == c.identity()),
            _ => false,
        },
    }
}

fn add_ints(g: &Element, h: &Element) -> Element {
    let a = g.ints_slice().expect("integer encoding");
    let b = h.ints_slice().expect("integer encoding");
    Element::Ints(a.iter().zip(b).map(|(x, y)| x + y).collect())
}

fn frac_part(q: BigRational) -> BigRational {
    let fl = q.floor();
    q - fl
}

fn split_top_level(s: &str, sep: char) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in s.char_indices() {
        match ch {
            '[' | '(' => depth += 1,
            ']' | ')' => depth -= 1,
            c if c == sep && depth == 0 => {
                out.push(&s[start..i]);
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn sorted(mut v: Vec<Element>) -> Vec<Element> {
    v.sort_unstable();
    v
}

/// Duplicate-free finite subset, stored in canonical order.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct FiniteSubset {
    elements: Vec<Element>,
}

impl FiniteSubset {
    /// Builds a subset, rejecting duplicates.
    pub fn new(mut elements: Vec<Element>) -> Result<Self> {
        elements.sort_unstable();
        if let Some(w) = elements.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::DuplicateElement(w[0].to_string()));
        }
        Ok(FiniteSubset { elements })
    }

    /// Builds a subset, silently merging duplicates.
    pub fn collect_dedup(elements: impl IntoIterator<Item = Element>) -> Self {
        let mut v: Vec<Element> = elements.into_iter().collect();
        v.sort_unstable();
        v.dedup();
        FiniteSubset { elements: v }
    }

    fn from_sorted_unchecked(elements: Vec<Element>) -> Self {
        debug_assert!(elements.windows(2).all(|w| w[0] < w[1]));
        FiniteSubset { elements }
    }

    pub fn singleton(e: Element) -> Self {
        FiniteSubset { elements: vec![e] }
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Element> {
        self.elements.iter()
    }

    pub fn as_slice(&self) -> &[Element] {
        &self.elements
    }

    pub fn contains(&self, g: &Element) -> bool {
        self.elements.binary_search(g).is_ok()
    }

    pub fn index_of(&self, g: &Element) -> Option<usize> {
        self.elements.binary_search(g).ok()
    }

    pub fn is_subset_of(&self, other: &FiniteSubset) -> bool {
        self.len() <= other.len() && self.iter().all(|g| other.contains(g))
    }

    pub fn to_strings(&self) -> Vec<String> {
        self.iter().map(|e| e.to_string()).collect()
    }
}

impl<'a> IntoIterator for &'a FiniteSubset {
    type Item = &'a Element;
    type IntoIter = std::slice::Iter<'a, Element>;

    fn into_iter(self) -> Self::IntoIter {
        self.elements.iter()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(ctx: &GroupContext, items: &[&str]) -> FiniteSubset {
        FiniteSubset::new(items.iter().map(|s| ctx.parse_element(s).unwrap()).collect()).unwrap()
    }

    #[test]
    fn product_examples() {
        let z2 = GroupContext::lattice(2);
        let g = z2.parse_element("(1,2)").unwrap();
        let h = z2.parse_element("(3,-1)").unwrap();
        assert_eq!(z2.product(&g, &h).unwrap(), Element::ints(&[4, 1]));

        let heis = GroupContext::Heisenberg3;
        let x = Element::ints(&[1, 0, 0]);
        let y = Element::ints(&[0, 1, 0]);
        assert_eq!(heis.product(&x, &y).unwrap(), Element::ints(&[1, 1, 1]));
        assert_eq!(heis.product(&y, &x).unwrap(), Element::ints(&[1, 1, 0]));

        let pr = GroupContext::pruefer(2).unwrap();
        assert_eq!(
            pr.product(&Element::frac(1, 2), &Element::frac(3, 4)).unwrap(),
            Element::frac(1, 4)
        );
    }

    #[test]
    fn inverse_examples() {
        let z = GroupContext::lattice(1);
        assert_eq!(z.inverse(&Element::int(5)).unwrap(), Element::int(-5));
        let heis = GroupContext::Heisenberg3;
        assert_eq!(
            heis.inverse(&Element::ints(&[1, 1, 1])).unwrap(),
            Element::ints(&[-1, -1, 0])
        );
        let c6 = GroupContext::cyclic(6).unwrap();
        assert_eq!(c6.inverse(&Element::int(4)).unwrap(), Element::int(2));
    }

    #[test]
    fn translate_examples() {
        let z = GroupContext::lattice(1);
        let f = set(&z, &["-1", "0", "1"]);
        assert_eq!(z.translate(&Element::int(2), &f), set(&z, &["1", "2", "3"]));
        assert_eq!(z.translate(&Element::int(0), &f), f);

        let pr = GroupContext::pruefer(2).unwrap();
        let f = set(&pr, &["0", "1/2"]);
        assert_eq!(
            pr.translate(&Element::frac(1, 4), &f),
            set(&pr, &["1/4", "3/4"])
        );
    }

    #[test]
    fn malformed_encodings_are_rejected() {
        let z2 = GroupContext::lattice(2);
        assert!(matches!(
            z2.product(&Element::int(1), &Element::ints(&[0, 0])),
            Err(Error::Encoding { .. })
        ));
        let c6 = GroupContext::cyclic(6).unwrap();
        assert!(c6.validate(&Element::int(6)).is_err());
        let pr = GroupContext::pruefer(2).unwrap();
        assert!(pr.validate(&Element::frac(1, 3)).is_err());
        assert!(pr.validate(&Element::frac(3, 2)).is_err());
        assert!(pr.parse_element("abc").is_err());
        assert!(matches!(GroupContext::pruefer(4), Err(Error::NotPrime(4))));
    }

    #[test]
    fn duplicate_subset_rejected() {
        assert!(matches!(
            FiniteSubset::new(vec![Element::int(1), Element::int(1)]),
            Err(Error::DuplicateElement(_))
        ));
    }

    #[test]
    fn descriptor_roundtrip() {
        let z2 = GroupContext::lattice(2);
        let js = serde_json::to_string(&z2).unwrap();
        assert_eq!(js, r#"{"kind":"lattice","d":2}"#);
        let back: GroupContext = serde_json::from_str(r#"{"kind":"pruefer","p":2}"#).unwrap();
        assert_eq!(back, GroupContext::pruefer(2).unwrap());
        let bad: std::result::Result<GroupContext, _> =
            serde_json::from_str(r#"{"kind":"pruefer","p":6}"#);
        assert!(bad.is_err());

        let ext: GroupContext = serde_json::from_str(
            r#"{"kind":"finite_extension","base":{"kind":"lattice","d":1},
                "ambient":{"kind":"direct_product","factors":[{"kind":"lattice","d":1},{"kind":"cyclic","n":2}]},
                "coset_reps":["[0;0]","[0;1]"]}"#,
        )
        .unwrap();
        let again: GroupContext =
            serde_json::from_str(&serde_json::to_string(&ext).unwrap()).unwrap();
        assert_eq!(ext, again);
    }

    #[test]
    fn finite_extension_rejects_shared_cosets() {
        let amb = GroupContext::DirectProduct(vec![
            GroupContext::lattice(1),
            GroupContext::cyclic(2).unwrap(),
        ]);
        let reps = vec![
            amb.parse_element("[0;0]").unwrap(),
            amb.parse_element("[3;0]").unwrap(),
        ];
        assert!(matches!(
            GroupContext::finite_extension(GroupContext::lattice(1), amb, reps),
            Err(Error::NotCosetReps(_))
        ));
    }

    #[test]
    fn display_parse_roundtrip() {
        let ctxs = [
            GroupContext::lattice(3),
            GroupContext::Heisenberg3,
            GroupContext::Rationals,
            GroupContext::DirectProduct(vec![
                GroupContext::lattice(2),
                GroupContext::pruefer(3).unwrap(),
            ]),
        ];
        for ctx in &ctxs {
            for g in ctx.standard_generators() {
                let h = ctx.mul(&g, &g);
                assert_eq!(ctx.parse_element(&h.to_string()).unwrap(), h);
            }
        }
    }
}
