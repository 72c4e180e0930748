//! Finite-window checks of the dynamics of the block subshift: return
//! times, Kakutani–Rokhlin partitions, syndeticity and boundary mass.

use std::collections::HashMap;

use num_rational::BigRational;
use serde::Serialize;

use crate::blocks::{x0_patch, BlockHierarchy, Pattern};
use crate::error::{Error, Result};
use crate::folner::FolnerLadder;
use crate::group::{Element, FiniteSubset, GroupContext};
use crate::rational::ratio;

/// `v = c_{m−1}⋯c_n·s` with digits listed from `c_{m−1}` down to `c_n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct CosetAddress {
    pub digits: Vec<Element>,
    pub residual: Element,
}

impl CosetAddress {
    pub fn reassemble(&self, ctx: &GroupContext) -> Element {
        self.digits
            .iter()
            .rev()
            .fold(self.residual.clone(), |acc, c| ctx.mul(c, &acc))
    }
}

/// `C_{n,k}`; `block` is 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CylinderId {
    pub level: usize,
    pub block: usize,
}

fn check_levels(depth: usize, n: usize, m: usize) -> Result<()> {
    if n >= m {
        return Err(Error::Domain(format!("need n < m, got n={n}, m={m}")));
    }
    if m > depth {
        return Err(Error::LevelOutOfRange { level: m, depth });
    }
    Ok(())
}

/// Unique digits and residual of `v ∈ F_m` relative to `F_n`.
pub fn address(ladder: &FolnerLadder, v: &Element, n: usize, m: usize) -> Result<CosetAddress> {
    check_levels(ladder.depth(), n, m)?;
    let ctx = ladder.ctx();
    if !ladder.level(m)?.contains(v) {
        return Err(Error::OutOfWindow(v.to_string()));
    }
    let mut rest = v.clone();
    let mut digits = Vec::with_capacity(m - n);
    for j in (n..m).rev() {
        let tile = ladder.level(j)?;
        let c = ladder
            .glue(j)?
            .iter()
            .find(|c| tile.contains(&ctx.mul(&ctx.inverse_unchecked(c), &rest)))
            .ok_or_else(|| Error::Domain(format!("{rest} lies in no translate at level {j}")))?
            .clone();
        rest = ctx.mul(&ctx.inverse_unchecked(&c), &rest);
        digits.push(c);
    }
    Ok(CosetAddress {
        digits,
        residual: rest,
    })
}

/// The block index carried by the tile with the given digits, starting
/// from block `top` at the upper level.
pub fn tile_label(h: &BlockHierarchy, digits: &[Element], m: usize, top: usize) -> Result<usize> {
    let mut k = top;
    for (offset, c) in digits.iter().enumerate() {
        let j = m - 1 - offset;
        let glue = h.ladder().glue(j)?;
        let i = glue.index_of(c).ok_or_else(|| Error::OutOfWindow(c.to_string()))?;
        k = h.assignment(j)?.maps[k - 1][i];
    }
    Ok(k)
}

/// `{c_{m−1}⋯c_n : c_i ∈ J_i}`.
pub fn return_times(h: &BlockHierarchy, n: usize, m: usize) -> Result<FiniteSubset> {
    check_levels(h.depth(), n, m)?;
    h.ladder().composite_glue(n, m)
}

/// Positions `v` with `v·F_n` inside the patch, mapped to the 1-based index
/// of the level-`n` block read there.
pub fn occurrences_in(ctx: &GroupContext, patch: &Pattern, family: &[Pattern]) -> HashMap<Element, usize> {
    let Some(first) = family.first() else {
        return HashMap::new();
    };
    let tile = first.support();
    let index: HashMap<&[u32], usize> = family
        .iter()
        .enumerate()
        .map(|(k, b)| (b.symbols(), k + 1))
        .collect();
    let mut out = HashMap::new();
    let mut read = Vec::with_capacity(tile.len());
    'pos: for v in patch.support() {
        read.clear();
        for u in tile {
            match patch.get(&ctx.mul(v, u)) {
                Some(s) => read.push(s),
                None => continue 'pos,
            }
        }
        if let Some(&k) = index.get(read.as_slice()) {
            out.insert(v.clone(), k);
        }
    }
    out
}

/// Occurrences of level-`n` blocks in `x_0|F_m`, by pattern matching alone.
pub fn scan_occurrences(h: &BlockHierarchy, n: usize, m: usize) -> Result<FiniteSubset> {
    check_levels(h.depth(), n, m)?;
    scan_occurrences_in(h, x0_patch(h, m)?, n)
}

pub fn scan_occurrences_in(h: &BlockHierarchy, patch: &Pattern, n: usize) -> Result<FiniteSubset> {
    let occ = occurrences_in(h.ctx(), patch, h.family(n)?);
    Ok(FiniteSubset::collect_dedup(occ.into_keys()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KrWitness {
    pub property: String,
    pub position: String,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KrReport {
    pub n: usize,
    pub m: usize,
    pub kr1: bool,
    pub kr2: bool,
    pub testable_positions: usize,
    pub witnesses: Vec<KrWitness>,
}

impl KrReport {
    pub fn pass(&self) -> bool {
        self.kr1 && self.kr2
    }
}

const MAX_WITNESSES: usize = 16;

fn testable(ctx: &GroupContext, v: &Element, tile: &FiniteSubset, window: &FiniteSubset) -> bool {
    tile.iter().all(|u| window.contains(&ctx.mul(v, u)))
}

/// Cells `(u, k)` of `P_n` claiming position `v`: `v = w·u` with a block
/// `B_{n,k}` read at `w`.
fn claims(
    ctx: &GroupContext,
    v: &Element,
    tile: &FiniteSubset,
    occ: &HashMap<Element, usize>,
) -> Vec<(Element, usize)> {
    tile.iter()
        .filter_map(|u| {
            let w = ctx.mul(v, &ctx.inverse_unchecked(u));
            occ.get(&w).map(|&k| (u.clone(), k))
        })
        .collect()
}

/// KR1 and KR2 on `x_0|F_m`.
pub fn check_partitions(h: &BlockHierarchy, n: usize, m: usize) -> Result<KrReport> {
    check_partitions_on(h, x0_patch(h, m)?, n, m)
}

/// KR1: each testable position is claimed by exactly one level-`n` cell, and
/// it is the cell given by its address. KR2: for positions testable at
/// level `n+1`, the level-`n` cell is the one predicted from the level-`n+1`
/// cell through the assignment.
pub fn check_partitions_on(h: &BlockHierarchy, patch: &Pattern, n: usize, m: usize) -> Result<KrReport> {
    if m < n + 2 {
        return Err(Error::Domain(format!("need m > n+1, got n={n}, m={m}")));
    }
    check_levels(h.depth(), n, m)?;
    let ctx = h.ctx();
    let ladder = h.ladder();
    let window = ladder.level(m)?;
    let tile_n = ladder.level(n)?;
    let tile_up = ladder.level(n + 1)?;
    let occ_n = occurrences_in(ctx, patch, h.family(n)?);
    let occ_up = occurrences_in(ctx, patch, h.family(n + 1)?);
    let mut witnesses = Vec::new();
    let mut kr1 = true;
    let mut kr2 = true;
    let mut count = 0;
    let push = |w: &mut Vec<KrWitness>, property: &str, v: &Element, detail: String| {
        if w.len() < MAX_WITNESSES {
            w.push(KrWitness {
                property: property.into(),
                position: v.to_string(),
                detail,
            });
        }
    };
    for v in window {
        if !testable(ctx, v, tile_n, window) {
            continue;
        }
        count += 1;
        let cl = claims(ctx, v, tile_n, &occ_n);
        let addr = address(ladder, v, n, m)?;
        let expected = (addr.residual.clone(), tile_label(h, &addr.digits, m, 1)?);
        if cl.len() != 1 {
            kr1 = false;
            push(&mut witnesses, "KR1", v, format!("claimed by {} cells", cl.len()));
            continue;
        }
        if cl[0] != expected {
            kr1 = false;
            push(
                &mut witnesses,
                "KR1",
                v,
                format!(
                    "claimed by ({}, {}) but the address gives ({}, {})",
                    cl[0].0, cl[0].1, expected.0, expected.1
                ),
            );
            continue;
        }
        if !testable(ctx, v, tile_up, window) {
            continue;
        }
        let up = claims(ctx, v, tile_up, &occ_up);
        if up.len() != 1 {
            kr2 = false;
            push(&mut witnesses, "KR2", v, format!("level {} claimed by {} cells", n + 1, up.len()));
            continue;
        }
        let (u_up, k_up) = &up[0];
        let sub = address(ladder, u_up, n, n + 1)?;
        let glue = ladder.glue(n)?;
        let i = glue
            .index_of(&sub.digits[0])
            .ok_or_else(|| Error::OutOfWindow(sub.digits[0].to_string()))?;
        let predicted = (sub.residual, h.assignment(n)?.maps[k_up - 1][i]);
        if predicted != cl[0] {
            kr2 = false;
            push(
                &mut witnesses,
                "KR2",
                v,
                format!(
                    "level {} cell ({u_up}, {k_up}) predicts ({}, {}) but ({}, {}) is read",
                    n + 1,
                    predicted.0,
                    predicted.1,
                    cl[0].0,
                    cl[0].1
                ),
            );
        }
    }
    Ok(KrReport {
        n,
        m,
        kr1,
        kr2,
        testable_positions: count,
        witnesses,
    })
}

/// `|F_n ∖ F_n g| / |F_n|`.
pub fn boundary_mass_bound(ladder: &FolnerLadder, g: &Element, n: usize) -> Result<BigRational> {
    let ctx = ladder.ctx();
    ctx.validate(g)?;
    let f = ladder.level(n)?;
    let g_inv = ctx.inverse_unchecked(g);
    let shell = f.iter().filter(|x| !f.contains(&ctx.mul(x, &g_inv))).count();
    Ok(ratio(shell, f.len()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SyndeticityReport {
    pub cylinder_level: usize,
    pub n: usize,
    pub m: usize,
    pub covered: bool,
    pub visible_returns: usize,
    /// least `j` with every position of `F_m` in `R·F_j`
    pub max_gap_level: Option<usize>,
    pub uncovered: Vec<String>,
}

/// Visible returns `R` to `C_{n−1,1}` inside `F_m` and whether `R·F_n`
/// covers `F_m`; the gap is measured by the least ladder level `j` with
/// `R·F_j ⊇ F_m`.
pub fn syndeticity_window(h: &BlockHierarchy, cylinder: CylinderId, m: usize) -> Result<SyndeticityReport> {
    if cylinder.block != 1 {
        return Err(Error::Domain("syndeticity is checked for first-block cylinders".into()));
    }
    let n = cylinder.level + 1;
    check_levels(h.depth(), n, m)?;
    let ctx = h.ctx();
    let ladder = h.ladder();
    let window = ladder.level(m)?;
    let patch = x0_patch(h, m)?;
    let first = &h.family(cylinder.level)?[0..1];
    let returns: Vec<Element> = occurrences_in(ctx, patch, first).into_keys().collect();
    let covered_by = |j: usize| -> Result<Vec<Element>> {
        let tile = ladder.level(j)?;
        let mut reached = std::collections::HashSet::new();
        for r in &returns {
            for u in tile {
                reached.insert(ctx.mul(r, u));
            }
        }
        Ok(window.iter().filter(|x| !reached.contains(*x)).cloned().collect())
    };
    let missing = covered_by(n)?;
    let mut max_gap_level = None;
    for j in 0..=m {
        if covered_by(j)?.is_empty() {
            max_gap_level = Some(j);
            break;
        }
    }
    Ok(SyndeticityReport {
        cylinder_level: cylinder.level,
        n,
        m,
        covered: missing.is_empty(),
        visible_returns: returns.len(),
        max_gap_level,
        uncovered: missing.iter().take(MAX_WITNESSES).map(|x| x.to_string()).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folner::{build_lattice_ladder, build_pruefer_ladder};
    use num_traits::Zero;

    fn ternary(depth: usize) -> BlockHierarchy {
        BlockHierarchy::build_uniform(&build_lattice_ladder(1, depth).unwrap(), 3, depth).unwrap()
    }

    #[test]
    fn address_examples() {
        let l = build_lattice_ladder(1, 2).unwrap();
        let a = address(&l, &Element::int(4), 0, 2).unwrap();
        assert_eq!(a.digits, vec![Element::int(3), Element::int(1)]);
        assert_eq!(a.residual, Element::int(0));
        let b = address(&l, &Element::int(-2), 0, 2).unwrap();
        assert_eq!(b.digits, vec![Element::int(-3), Element::int(1)]);
        let z = address(&l, &Element::int(0), 0, 2).unwrap();
        assert!(z.digits.iter().all(|d| *d == Element::int(0)));
        assert!(matches!(address(&l, &Element::int(5), 0, 2), Err(Error::OutOfWindow(_))));
        for v in l.level(2).unwrap() {
            assert_eq!(&address(&l, v, 0, 2).unwrap().reassemble(l.ctx()), v);
        }
    }

    #[test]
    fn return_time_examples() {
        let h = ternary(2);
        let r = return_times(&h, 0, 1).unwrap();
        assert_eq!(&r, h.ladder().glue(0).unwrap());
        assert_eq!(return_times(&h, 0, 2).unwrap().len(), 9);
        for (n, m) in [(0, 1), (0, 2), (1, 2)] {
            assert_eq!(scan_occurrences(&h, n, m).unwrap(), return_times(&h, n, m).unwrap());
        }
        assert!(return_times(&h, 1, 3).is_err());
    }

    #[test]
    fn corrupted_patch_loses_an_occurrence() {
        let h = ternary(2);
        let patch = x0_patch(&h, 2).unwrap();
        let bad = patch.with_symbol(&Element::int(3), 0).unwrap();
        let scanned = scan_occurrences_in(&h, &bad, 1).unwrap();
        assert!(scanned.len() < return_times(&h, 1, 2).unwrap().len());
    }

    #[test]
    fn partitions_hold_on_ternary() {
        let h = ternary(3);
        for n in 0..=1 {
            for m in n + 2..=3 {
                let r = check_partitions(&h, n, m).unwrap();
                assert!(r.pass(), "{r:?}");
            }
        }
        let r = check_partitions(&h, 0, 2).unwrap();
        assert_eq!(r.testable_positions, 9);
    }

    #[test]
    fn boundary_mass_examples() {
        let l = build_lattice_ladder(1, 3).unwrap();
        assert_eq!(boundary_mass_bound(&l, &Element::int(1), 2).unwrap(), ratio(1, 9));
        assert!(boundary_mass_bound(&l, &Element::int(0), 2).unwrap().is_zero());
        let p = build_pruefer_ladder(2, 3).unwrap();
        for n in 0..=3 {
            for g in p.level(n).unwrap() {
                assert!(boundary_mass_bound(&p, g, n).unwrap().is_zero());
            }
        }
    }

    #[test]
    fn syndeticity_on_ternary() {
        let h = ternary(3);
        let r = syndeticity_window(&h, CylinderId { level: 0, block: 1 }, 3).unwrap();
        assert!(r.covered);
        assert!(r.max_gap_level.unwrap() <= 1);
        let r = syndeticity_window(&h, CylinderId { level: 1, block: 1 }, 3).unwrap();
        assert!(r.covered);
    }
}
