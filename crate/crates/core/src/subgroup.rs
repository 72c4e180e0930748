//! Membership and quotient-order oracles for finitely generated subgroups of
//! the abelian groups that ship one: `Z^d`, `Z/nZ`, Prüfer groups, `Q`, and
//! direct products whose generators each live in a single factor.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{Element, GroupContext};

/// Order of an element in the quotient by a subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QuotientOrder {
    Infinite,
    Finite(BigInt),
}

impl QuotientOrder {
    pub fn is_trivial(&self) -> bool {
        matches!(self, QuotientOrder::Finite(l) if l.is_one())
    }
}

/// The subgroup generated by a list of elements.
#[derive(Clone, Debug)]
pub struct AbelianSpan<'a> {
    ctx: &'a GroupContext,
    gens: Vec<Element>,
}

impl<'a> AbelianSpan<'a> {
    pub fn new(ctx: &'a GroupContext) -> Result<Self> {
        check_supported(ctx)?;
        Ok(AbelianSpan {
            ctx,
            gens: Vec::new(),
        })
    }

    pub fn push(&mut self, g: Element) -> Result<()> {
        self.ctx.validate(&g)?;
        if let GroupContext::DirectProduct(f) = self.ctx {
            factor_support(f, &g)?;
        }
        self.gens.push(g);
        Ok(())
    }

    pub fn generators(&self) -> &[Element] {
        &self.gens
    }

    pub fn contains(&self, h: &Element) -> Result<bool> {
        Ok(self.order_modulo(h)?.is_trivial())
    }

    /// Least `l > 0` with `l·h` in the span, or `Infinite`.
    pub fn order_modulo(&self, h: &Element) -> Result<QuotientOrder> {
        self.ctx.validate(h)?;
        order_in(self.ctx, &self.gens, h)
    }
}

fn check_supported(ctx: &GroupContext) -> Result<()> {
    match ctx {
        GroupContext::Lattice { .. }
        | GroupContext::Cyclic { .. }
        | GroupContext::Pruefer { .. }
        | GroupContext::Rationals => Ok(()),
        GroupContext::DirectProduct(f) => f.iter().try_for_each(check_supported),
        other => Err(Error::UnsupportedGroup(format!(
            "no subgroup-membership oracle for {}",
            other.name()
        ))),
    }
}

/// Index of the only non-identity factor of `g`, or `None` for the identity.
fn factor_support(factors: &[GroupContext], g: &Element) -> Result<Option<usize>> {
    let Element::Tuple(parts) = g else {
        return Err(Error::Domain("expected a tuple".into()));
    };
    let nonid: Vec<usize> = factors
        .iter()
        .zip(parts)
        .enumerate()
        .filter(|(_, (c, x))| **x != c.identity())
        .map(|(i, _)| i)
        .collect();
    match nonid.len() {
        0 => Ok(None),
        1 => Ok(Some(nonid[0])),
        _ => Err(Error::UnsupportedGroup(format!(
            "generator {g} spans several factors; only factor-supported generators have a membership oracle"
        ))),
    }
}

fn order_in(ctx: &GroupContext, gens: &[Element], h: &Element) -> Result<QuotientOrder> {
    match ctx {
        GroupContext::Lattice { .. } => Ok(lattice_order(gens, h)),
        GroupContext::Cyclic { n } => {
            let n = BigInt::from(*n);
            let mut g = n.clone();
            for x in gens {
                g = g.gcd(&int_of(x));
            }
            let hv = int_of(h);
            Ok(QuotientOrder::Finite(&g / g.gcd(&hv)))
        }
        GroupContext::Pruefer { p } => {
            let p = BigInt::from(*p);
            let k = gens.iter().map(|x| p_exponent(&frac_of(x), &p)).max().unwrap_or(0);
            let e = p_exponent(&frac_of(h), &p);
            Ok(QuotientOrder::Finite(if e <= k {
                BigInt::one()
            } else {
                num_traits::pow(p, (e - k) as usize)
            }))
        }
        GroupContext::Rationals => {
            let q = frac_of(h);
            let mut span: Option<BigRational> = None;
            for x in gens {
                let v = frac_of(x).abs();
                if v.is_zero() {
                    continue;
                }
                span = Some(match span {
                    None => v,
                    Some(s) => rational_gcd(&s, &v),
                });
            }
            match span {
                None if q.is_zero() => Ok(QuotientOrder::Finite(BigInt::one())),
                None => Ok(QuotientOrder::Infinite),
                Some(s) => Ok(QuotientOrder::Finite((q / s).denom().clone())),
            }
        }
        GroupContext::DirectProduct(f) => {
            let Some(i) = factor_support(f, h)? else {
                return Ok(QuotientOrder::Finite(BigInt::one()));
            };
            let mut sub = Vec::new();
            for g in gens {
                if factor_support(f, g)? == Some(i) {
                    if let Element::Tuple(parts) = g {
                        sub.push(parts[i].clone());
                    }
                }
            }
            let Element::Tuple(hp) = h else { unreachable!() };
            order_in(&f[i], &sub, &hp[i])
        }
        _ => Err(Error::UnsupportedGroup(ctx.name())),
    }
}

fn int_of(e: &Element) -> BigInt {
    match e {
        Element::Ints(v) => v[0].clone(),
        _ => panic!("integer encoding expected"),
    }
}

fn frac_of(e: &Element) -> BigRational {
    match e {
        Element::Frac(q) => q.clone(),
        _ => panic!("fraction encoding expected"),
    }
}

fn p_exponent(q: &BigRational, p: &BigInt) -> u32 {
    let mut d = q.denom().clone();
    let mut e = 0;
    while d > BigInt::one() {
        d /= p;
        e += 1;
    }
    e
}

fn rational_gcd(a: &BigRational, b: &BigRational) -> BigRational {
    let den = a.denom().lcm(b.denom());
    let na = a.numer() * (&den / a.denom());
    let nb = b.numer() * (&den / b.denom());
    BigRational::new(na.gcd(&nb), den)
}

/// Echelon Z-basis of the lattice spanned by `rows`.
pub(crate) fn hermite_basis(rows: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut rows: Vec<Vec<BigInt>> = rows.iter().filter(|r| r.iter().any(|x| !x.is_zero())).cloned().collect();
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut basis = Vec::new();
    for col in 0..ncols {
        loop {
            // smallest nonzero |entry| in this column acts as pivot
            let piv = rows
                .iter()
                .enumerate()
                .filter(|(_, r)| !r[col].is_zero())
                .min_by(|(_, a), (_, b)| a[col].abs().cmp(&b[col].abs()))
                .map(|(i, _)| i);
            let Some(pi) = piv else { break };
            let pivot = rows.swap_remove(pi);
            let mut reduced_any = false;
            for r in rows.iter_mut() {
                if !r[col].is_zero() {
                    let q = r[col].div_floor(&pivot[col]);
                    for (x, y) in r.iter_mut().zip(&pivot) {
                        *x -= &q * y;
                    }
                    reduced_any = true;
                }
            }
            rows.retain(|r| r.iter().any(|x| !x.is_zero()));
            if rows.iter().all(|r| r[col].is_zero()) {
                basis.push(pivot);
                break;
            }
            rows.push(pivot);
            debug_assert!(reduced_any);
        }
    }
    basis
}

fn lattice_order(gens: &[Element], h: &Element) -> QuotientOrder {
    let target: Vec<BigInt> = match h {
        Element::Ints(v) => v.clone(),
        _ => panic!("lattice encoding expected"),
    };
    if target.iter().all(|x| x.is_zero()) {
        return QuotientOrder::Finite(BigInt::one());
    }
    let rows: Vec<Vec<BigInt>> = gens
        .iter()
        .map(|g| match g {
            Element::Ints(v) => v.clone(),
            _ => panic!("lattice encoding expected"),
        })
        .collect();
    let basis = hermite_basis(&rows);
    // basis is in echelon form: each row has a distinct leading column
    let mut rest: Vec<BigRational> = target.iter().map(|x| BigRational::from(x.clone())).collect();
    let mut coeffs = Vec::with_capacity(basis.len());
    for b in &basis {
        let lead = b.iter().position(|x| !x.is_zero()).expect("nonzero basis row");
        let c = &rest[lead] / BigRational::from(b[lead].clone());
        for (r, x) in rest.iter_mut().zip(b) {
            *r -= &c * BigRational::from(x.clone());
        }
        coeffs.push(c);
    }
    if rest.iter().any(|x| !x.is_zero()) {
        return QuotientOrder::Infinite;
    }
    let l = coeffs
        .iter()
        .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    QuotientOrder::Finite(l)
}
