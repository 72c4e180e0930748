//! Block families `B_{n,1..k_n}` over the ladder levels, glued level by
//! level from coset assignments.

use std::collections::HashSet;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::folner::{FolnerLadder, LadderFile};
use crate::group::{Element, FiniteSubset, GroupContext};
use crate::matrix::ManagedMatrix;

/// A finite pattern: one symbol per support element, aligned with the
/// canonical order of the support.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Pattern {
    support: FiniteSubset,
    symbols: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PatternFile {
    pub support: Vec<String>,
    pub symbols: Vec<u32>,
}

impl Pattern {
    pub fn new(support: FiniteSubset, symbols: Vec<u32>) -> Result<Self> {
        if support.len() != symbols.len() {
            return Err(Error::Dimension(format!(
                "pattern has {} cells but {} symbols",
                support.len(),
                symbols.len()
            )));
        }
        Ok(Pattern { support, symbols })
    }

    pub fn support(&self) -> &FiniteSubset {
        &self.support
    }

    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    pub fn get(&self, g: &Element) -> Option<u32> {
        self.support.index_of(g).map(|i| self.symbols[i])
    }

    pub fn restrict(&self, window: &FiniteSubset) -> Result<Pattern> {
        let symbols = window
            .iter()
            .map(|g| self.get(g).ok_or_else(|| Error::OutOfWindow(g.to_string())))
            .collect::<Result<Vec<_>>>()?;
        Ok(Pattern {
            support: window.clone(),
            symbols,
        })
    }

    /// Copy with the symbol at `g` replaced.
    pub fn with_symbol(&self, g: &Element, symbol: u32) -> Result<Pattern> {
        let i = self.support.index_of(g).ok_or_else(|| Error::OutOfWindow(g.to_string()))?;
        let mut out = self.clone();
        out.symbols[i] = symbol;
        Ok(out)
    }

    pub fn to_file(&self) -> PatternFile {
        PatternFile {
            support: self.support.to_strings(),
            symbols: self.symbols.clone(),
        }
    }

    pub fn from_file(ctx: &GroupContext, f: &PatternFile) -> Result<Self> {
        let elements = f
            .support
            .iter()
            .map(|s| ctx.parse_element(s))
            .collect::<Result<Vec<_>>>()?;
        let mut cells: Vec<(Element, u32)> = elements.into_iter().zip(f.symbols.iter().copied()).collect();
        if cells.len() != f.symbols.len() || f.support.len() != f.symbols.len() {
            return Err(Error::Dimension("support and symbols differ in length".into()));
        }
        cells.sort();
        let (support, symbols): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
        Pattern::new(FiniteSubset::new(support)?, symbols)
    }
}

/// `maps[k][i]` is the block index `a_{k+1}(c_i)` for the `i`-th element of
/// `J_n` in canonical order. Block indices are 1-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Assignment {
    pub level: usize,
    pub maps: Vec<Vec<usize>>,
}

/// `B_{0,k}(1) = k`, zero elsewhere.
pub fn base_blocks(ctx: &GroupContext, k0: usize, f0: &FiniteSubset) -> Result<Vec<Pattern>> {
    if k0 < 3 {
        return Err(Error::Domain(format!("k_0 must be at least 3, got {k0}")));
    }
    let id = ctx.identity();
    let at = f0
        .index_of(&id)
        .ok_or_else(|| Error::Domain("F_0 must contain the identity".into()))?;
    Ok((1..=k0)
        .map(|k| {
            let mut symbols = vec![0u32; f0.len()];
            symbols[at] = k as u32;
            Pattern {
                support: f0.clone(),
                symbols,
            }
        })
        .collect())
}

/// Checks conditions C1 and C2 and the index ranges of an assignment.
pub fn check_assignment(ctx: &GroupContext, glue: &FiniteSubset, k_n: usize, a: &Assignment) -> Result<()> {
    let level = a.level;
    let err = |reason: String| Error::Construction { level, reason };
    let id_pos = glue
        .index_of(&ctx.identity())
        .ok_or_else(|| err("glue set lacks the identity".into()))?;
    for (k, map) in a.maps.iter().enumerate() {
        if map.len() != glue.len() {
            return Err(err(format!("a_{} has {} values for {} cosets", k + 1, map.len(), glue.len())));
        }
        for (i, &b) in map.iter().enumerate() {
            let c = &glue.as_slice()[i];
            if i == id_pos {
                if b != 1 {
                    return Err(err(format!("C1: a_{}(identity) = {b}, expected 1", k + 1)));
                }
            } else if !(2..=k_n).contains(&b) {
                return Err(err(format!("C2: a_{}({c}) = {b} is outside 2..{k_n}", k + 1)));
            }
        }
    }
    Ok(())
}

/// Applies the gluing rule `B_{n+1,k}(c·v) = B_{n,a_k(c)}(v)` without
/// checking C1/C2.
pub fn glue_patterns(ctx: &GroupContext, family: &[Pattern], glue: &FiniteSubset, a: &Assignment) -> Result<Vec<Pattern>> {
    let tile = family
        .first()
        .ok_or_else(|| Error::Construction {
            level: a.level,
            reason: "empty family".into(),
        })?
        .support();
    let mut out = Vec::with_capacity(a.maps.len());
    for map in &a.maps {
        let mut cells = Vec::with_capacity(glue.len() * tile.len());
        for (c, &b) in glue.iter().zip(map) {
            let block = family.get(b.wrapping_sub(1)).ok_or_else(|| Error::Construction {
                level: a.level,
                reason: format!("block index {b} out of range"),
            })?;
            for (v, &s) in tile.iter().zip(block.symbols()) {
                cells.push((ctx.mul(c, v), s));
            }
        }
        cells.sort();
        let (support, symbols): (Vec<_>, Vec<_>) = cells.into_iter().unzip();
        let support = FiniteSubset::new(support).map_err(|e| Error::Construction {
            level: a.level,
            reason: format!("translates overlap: {e}"),
        })?;
        out.push(Pattern { support, symbols });
    }
    Ok(out)
}

/// Glues level `n+1` from level `n`, enforcing C1, C2 and distinctness.
pub fn assemble_level(ctx: &GroupContext, family: &[Pattern], glue: &FiniteSubset, a: &Assignment) -> Result<Vec<Pattern>> {
    check_assignment(ctx, glue, family.len(), a)?;
    let next = glue_patterns(ctx, family, glue, a)?;
    for i in 0..next.len() {
        for j in i + 1..next.len() {
            if next[i] == next[j] {
                return Err(Error::Construction {
                    level: a.level,
                    reason: format!("blocks {} and {} coincide", i + 1, j + 1),
                });
            }
        }
    }
    Ok(next)
}

fn next_permutation(v: &mut [usize]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Coset assignment realizing the counts of `mtilde`: identity gets block 1;
/// the remaining cosets, in canonical order, get blocks `2..k_n` in
/// nondecreasing order. A repeated column first swaps the earliest two
/// cosets holding different indices; further repeats step through
/// lexicographic successors.
pub fn assignment_from_matrix(
    ctx: &GroupContext,
    mtilde: &ManagedMatrix,
    glue: &FiniteSubset,
    k_n: usize,
    level: usize,
) -> Result<Assignment> {
    if mtilde.rows() != k_n {
        return Err(Error::Dimension(format!(
            "matrix has {} rows but the family has {k_n} blocks",
            mtilde.rows()
        )));
    }
    if mtilde.ratio() as usize != glue.len() {
        return Err(Error::Infeasible(format!(
            "columns sum to {} but |J_{level}| = {}",
            mtilde.ratio(),
            glue.len()
        )));
    }
    let id_pos = glue
        .index_of(&ctx.identity())
        .ok_or_else(|| Error::Infeasible("glue set lacks the identity".into()))?;
    let mut used: HashSet<Vec<usize>> = HashSet::new();
    let mut maps = Vec::with_capacity(mtilde.cols());
    for k in 0..mtilde.cols() {
        let col = mtilde.column(k);
        if col[0] != 1 {
            return Err(Error::Infeasible(format!(
                "column {} puts {} cosets on block 1; only the identity coset may",
                k + 1,
                col[0]
            )));
        }
        let mut rest: Vec<usize> = Vec::with_capacity(glue.len() - 1);
        for (i, &count) in col.iter().enumerate().skip(1) {
            rest.extend(std::iter::repeat_n(i + 1, count as usize));
        }
        if used.contains(&rest) {
            let mut swapped = rest.clone();
            let first_diff = swapped.iter().position(|&b| b != swapped[0]);
            let mut found = false;
            if let Some(p) = first_diff {
                swapped.swap(0, p);
                if !used.contains(&swapped) {
                    rest = swapped;
                    found = true;
                }
            }
            if !found {
                let mut cand = rest.clone();
                while next_permutation(&mut cand) {
                    if !used.contains(&cand) {
                        found = true;
                        break;
                    }
                }
                if !found {
                    return Err(Error::Distinctness(format!(
                        "column {} admits no unused coset placement",
                        k + 1
                    )));
                }
                rest = cand;
            }
        }
        used.insert(rest.clone());
        let mut map = rest;
        map.insert(id_pos, 1);
        maps.push(map);
    }
    Ok(Assignment { level, maps })
}

/// Default incidence for a hierarchy with `k` blocks per level: the identity
/// row is all ones and the other rows of column `j` are the `j`-th
/// composition of `ratio − 1` into `k − 1` parts, most balanced first.
pub fn uniform_incidence(k: usize, ratio: u64) -> Result<ManagedMatrix> {
    if k < 3 {
        return Err(Error::Domain(format!("need at least 3 blocks, got {k}")));
    }
    if ratio < 2 {
        return Err(Error::Distinctness("a single coset cannot separate blocks".into()));
    }
    let parts = k - 1;
    let total = ratio - 1;
    let mut comps: Vec<Vec<u64>> = Vec::new();
    let mut cur = vec![0u64; parts];
    fn rec(i: usize, left: u64, cur: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if i + 1 == cur.len() {
            cur[i] = left;
            out.push(cur.clone());
            return;
        }
        for x in (0..=left).rev() {
            cur[i] = x;
            rec(i + 1, left - x, cur, out);
        }
    }
    rec(0, total, &mut cur, &mut comps);
    comps.sort_by_key(|c| c.iter().map(|x| x * x).sum::<u64>());
    if comps.len() < k {
        return Err(Error::Distinctness(format!(
            "only {} compositions of {total} into {parts} parts for {k} columns",
            comps.len()
        )));
    }
    let mut e = vec![0u64; k * k];
    for (j, comp) in comps.iter().take(k).enumerate() {
        e[j] = 1;
        for (i, &x) in comp.iter().enumerate() {
            e[(i + 1) * k + j] = x;
        }
    }
    ManagedMatrix::new(k, k, ratio, e)
}

/// The augmented matrix `M̃`: an identity row on top, the first column
/// duplicated, and `M(1,·)` lowered by one.
pub fn augment_matrix(m: &ManagedMatrix, k_next: usize) -> Result<ManagedMatrix> {
    if m.cols() != k_next {
        return Err(Error::Augmentation(format!(
            "matrix has {} columns but k_(n+1) = {k_next}",
            m.cols()
        )));
    }
    if m.min_entry() as usize <= k_next {
        return Err(Error::Augmentation(format!(
            "minimum entry {} does not exceed k_(n+1) = {k_next}",
            m.min_entry()
        )));
    }
    let rows = m.rows() + 1;
    let cols = m.cols() + 1;
    let mut e = vec![0u64; rows * cols];
    for jt in 0..cols {
        let j = jt.saturating_sub(1);
        e[jt] = 1;
        e[cols + jt] = m.get(0, j) - 1;
        for i in 1..m.rows() {
            e[(i + 1) * cols + jt] = m.get(i, j);
        }
    }
    ManagedMatrix::new(rows, cols, m.ratio(), e)
}

/// `3 ≤ k_{n+1}+1 ≤ min{M̃(i,j) : i ≥ 2}`.
pub fn satisfies_importante(mtilde: &ManagedMatrix) -> bool {
    let k_plus = mtilde.cols();
    let min_lower = (1..mtilde.rows())
        .flat_map(|i| (0..mtilde.cols()).map(move |j| (i, j)))
        .map(|(i, j)| mtilde.get(i, j))
        .min()
        .unwrap_or(0);
    k_plus >= 3 && k_plus as u64 <= min_lower
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct C3Report {
    pub pass: bool,
    /// `(g, k, k')` with 1-based block indices
    pub witness: Option<(Element, usize, usize)>,
    pub comparisons: usize,
}

/// Brute force over `g ∈ F_n` and block pairs: agreement of `B_k(g·)` with
/// `B_{k'}` on `F_n ∩ g^{-1}F_n` forces `g = 1` and `k = k'`.
pub fn verify_c3(ctx: &GroupContext, family: &[Pattern], f_n: &FiniteSubset) -> C3Report {
    let id = ctx.identity();
    let mut order: Vec<&Element> = f_n.iter().collect();
    order.sort_by_key(|g| **g != id);
    let mut comparisons = 0;
    for g in order {
        let pairs: Vec<(usize, usize)> = f_n
            .iter()
            .enumerate()
            .filter_map(|(vi, v)| f_n.index_of(&ctx.mul(g, v)).map(|gi| (gi, vi)))
            .collect();
        let is_id = *g == id;
        for (k, bk) in family.iter().enumerate() {
            for (kp, bkp) in family.iter().enumerate() {
                if is_id && k == kp {
                    continue;
                }
                comparisons += 1;
                let agree = pairs
                    .iter()
                    .all(|&(gi, vi)| bk.symbols()[gi] == bkp.symbols()[vi]);
                if agree {
                    return C3Report {
                        pass: false,
                        witness: Some((g.clone(), k + 1, kp + 1)),
                        comparisons,
                    };
                }
            }
        }
    }
    C3Report {
        pass: true,
        witness: None,
        comparisons,
    }
}

/// A finite prefix of the block construction over a ladder.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BlockHierarchy {
    ladder: FolnerLadder,
    families: Vec<Vec<Pattern>>,
    assignments: Vec<Assignment>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HierarchyFile {
    pub ladder: LadderFile,
    pub families: Vec<Vec<PatternFile>>,
    pub assignments: Vec<Assignment>,
}

impl BlockHierarchy {
    /// Builds `depth = mtildes.len()` levels from base blocks and matrices
    /// whose first row is the identity row.
    pub fn build(ladder: &FolnerLadder, k0: usize, mtildes: &[ManagedMatrix]) -> Result<Self> {
        let ctx = ladder.ctx();
        if mtildes.len() > ladder.depth() {
            return Err(Error::LevelOutOfRange {
                level: mtildes.len(),
                depth: ladder.depth(),
            });
        }
        let mut families = vec![base_blocks(ctx, k0, ladder.level(0)?)?];
        let mut assignments = Vec::with_capacity(mtildes.len());
        for (n, m) in mtildes.iter().enumerate() {
            let glue = ladder.glue(n)?;
            let k_n = families[n].len();
            let a = assignment_from_matrix(ctx, m, glue, k_n, n)?;
            let next = assemble_level(ctx, &families[n], glue, &a)?;
            if next[0].support() != ladder.level(n + 1)? {
                return Err(Error::Construction {
                    level: n,
                    reason: "glued support differs from the next ladder level".into(),
                });
            }
            families.push(next);
            assignments.push(a);
        }
        Ok(BlockHierarchy {
            ladder: ladder.clone(),
            families,
            assignments,
        })
    }

    /// `k` blocks at every level with [`uniform_incidence`] matrices.
    pub fn build_uniform(ladder: &FolnerLadder, k: usize, depth: usize) -> Result<Self> {
        let ms = ladder.ratios()[..depth.min(ladder.depth())]
            .iter()
            .map(|&r| uniform_incidence(k, r))
            .collect::<Result<Vec<_>>>()?;
        if depth > ladder.depth() {
            return Err(Error::LevelOutOfRange {
                level: depth,
                depth: ladder.depth(),
            });
        }
        BlockHierarchy::build(ladder, k, &ms)
    }

    /// Assembles a hierarchy from explicit parts, checking only shapes.
    pub fn from_parts(ladder: FolnerLadder, families: Vec<Vec<Pattern>>, assignments: Vec<Assignment>) -> Result<Self> {
        if families.len() != assignments.len() + 1 || assignments.len() > ladder.depth() {
            return Err(Error::Dimension("families, assignments and ladder depth disagree".into()));
        }
        for (n, fam) in families.iter().enumerate() {
            if fam.is_empty() || fam.iter().any(|p| p.support() != &ladder.levels()[n]) {
                return Err(Error::Construction {
                    level: n,
                    reason: "family support differs from the ladder level".into(),
                });
            }
        }
        Ok(BlockHierarchy {
            ladder,
            families,
            assignments,
        })
    }

    pub fn ladder(&self) -> &FolnerLadder {
        &self.ladder
    }

    pub fn ctx(&self) -> &GroupContext {
        self.ladder.ctx()
    }

    pub fn depth(&self) -> usize {
        self.assignments.len()
    }

    pub fn family(&self, n: usize) -> Result<&[Pattern]> {
        self.families.get(n).map(|f| f.as_slice()).ok_or(Error::LevelOutOfRange {
            level: n,
            depth: self.depth(),
        })
    }

    pub fn families(&self) -> &[Vec<Pattern>] {
        &self.families
    }

    pub fn assignment(&self, n: usize) -> Result<&Assignment> {
        self.assignments.get(n).ok_or(Error::LevelOutOfRange {
            level: n,
            depth: self.depth(),
        })
    }

    pub fn assignments(&self) -> &[Assignment] {
        &self.assignments
    }

    /// C1 and C2 at every built level.
    pub fn check_structure(&self) -> Result<()> {
        for (n, a) in self.assignments.iter().enumerate() {
            check_assignment(self.ctx(), self.ladder.glue(n)?, self.families[n].len(), a)?;
        }
        Ok(())
    }

    pub fn to_file(&self) -> HierarchyFile {
        HierarchyFile {
            ladder: self.ladder.to_file(),
            families: self
                .families
                .iter()
                .map(|f| f.iter().map(Pattern::to_file).collect())
                .collect(),
            assignments: self.assignments.clone(),
        }
    }

    pub fn from_file(f: &HierarchyFile) -> Result<Self> {
        let ladder = FolnerLadder::from_file(&f.ladder)?;
        let families = f
            .families
            .iter()
            .map(|fam| fam.iter().map(|p| Pattern::from_file(ladder.ctx(), p)).collect())
            .collect::<Result<Vec<Vec<_>>>>()?;
        BlockHierarchy::from_parts(ladder, families, f.assignments.clone())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("hierarchy serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }
}

/// `x_0` restricted to `F_n`, i.e. `B_{n,1}`.
pub fn x0_patch(h: &BlockHierarchy, n: usize) -> Result<&Pattern> {
    h.family(n).map(|f| &f[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::folner::build_lattice_ladder;

    fn z() -> GroupContext {
        GroupContext::lattice(1)
    }

    fn zs(v: &[i64]) -> FiniteSubset {
        FiniteSubset::new(v.iter().map(|&x| Element::int(x)).collect()).unwrap()
    }

    #[test]
    fn base_block_examples() {
        let b = base_blocks(&z(), 3, &zs(&[0])).unwrap();
        assert_eq!(b.iter().map(|p| p.symbols()[0]).collect::<Vec<_>>(), vec![1, 2, 3]);
        let b = base_blocks(&z(), 3, &zs(&[0, 1])).unwrap();
        assert_eq!(b[1].get(&Element::int(0)), Some(2));
        assert_eq!(b[1].get(&Element::int(1)), Some(0));
        assert!(base_blocks(&z(), 2, &zs(&[0])).is_err());
    }

    #[test]
    fn ternary_gluing_example() {
        let fam = base_blocks(&z(), 3, &zs(&[0])).unwrap();
        let a = Assignment {
            level: 0,
            maps: vec![vec![2, 1, 2], vec![2, 1, 3]],
        };
        let next = assemble_level(&z(), &fam, &zs(&[-1, 0, 1]), &a).unwrap();
        assert_eq!(next[0].symbols(), &[2, 1, 2]);
        assert_ne!(next[0], next[1]);
        for b in &next {
            assert_eq!(b.get(&Element::int(0)), Some(1));
        }
    }

    #[test]
    fn assemble_rejects_violations() {
        let fam = base_blocks(&z(), 3, &zs(&[0])).unwrap();
        let glue = zs(&[-1, 0, 1]);
        let c1 = Assignment { level: 0, maps: vec![vec![2, 2, 2]] };
        assert!(matches!(assemble_level(&z(), &fam, &glue, &c1), Err(Error::Construction { .. })));
        let c2 = Assignment { level: 0, maps: vec![vec![1, 1, 2]] };
        assert!(matches!(assemble_level(&z(), &fam, &glue, &c2), Err(Error::Construction { .. })));
        let dup = Assignment { level: 0, maps: vec![vec![2, 1, 3], vec![2, 1, 3]] };
        assert!(matches!(assemble_level(&z(), &fam, &glue, &dup), Err(Error::Construction { .. })));
    }

    #[test]
    fn augmentation_example() {
        let m = ManagedMatrix::from_rows(&[vec![5, 4], vec![4, 5]]).unwrap();
        let mt = augment_matrix(&m, 2).unwrap();
        assert_eq!(mt.column(0), vec![1, 4, 4]);
        assert_eq!(mt.column(1), vec![1, 4, 4]);
        assert_eq!(mt.column(2), vec![1, 3, 5]);
        assert_eq!(mt.ratio(), 9);
        assert!(satisfies_importante(&mt));
        let small = ManagedMatrix::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        assert!(matches!(augment_matrix(&small, 2), Err(Error::Augmentation(_))));
    }

    #[test]
    fn assignment_counts_and_distinct_duplicates() {
        let m = ManagedMatrix::from_rows(&[vec![5, 4], vec![4, 5]]).unwrap();
        let mt = augment_matrix(&m, 2).unwrap();
        let glue = zs(&[-4, -3, -2, -1, 0, 1, 2, 3, 4]);
        let a = assignment_from_matrix(&z(), &mt, &glue, 3, 0).unwrap();
        for (k, map) in a.maps.iter().enumerate() {
            for i in 1..=3 {
                let count = map.iter().filter(|&&b| b == i).count() as u64;
                assert_eq!(count, mt.get(i - 1, k));
            }
            assert_eq!(map[4], 1);
        }
        assert_ne!(a.maps[0], a.maps[1]);
        // greedy fill for the first column
        assert_eq!(a.maps[0], vec![2, 2, 2, 2, 1, 3, 3, 3, 3]);
        // the repeat swaps the earliest differing pair
        assert_eq!(a.maps[1], vec![3, 2, 2, 2, 1, 2, 3, 3, 3]);
    }

    #[test]
    fn assignment_infeasible_and_trivial_glue() {
        let glue = zs(&[0]);
        let one = ManagedMatrix::new(3, 2, 1, vec![1, 1, 0, 0, 0, 0]).unwrap();
        assert!(matches!(assignment_from_matrix(&z(), &one, &glue, 3, 0), Err(Error::Distinctness(_))));
        let single = ManagedMatrix::new(3, 2, 1, vec![1, 0, 0, 1, 0, 0]).unwrap();
        assert!(matches!(assignment_from_matrix(&z(), &single, &glue, 3, 0), Err(Error::Infeasible(_))));
        let wrong_sum = ManagedMatrix::from_rows(&[vec![1, 1], vec![1, 2], vec![2, 1]]).unwrap();
        assert!(matches!(
            assignment_from_matrix(&z(), &wrong_sum, &zs(&[-1, 0, 1]), 3, 0),
            Err(Error::Infeasible(_))
        ));
    }

    #[test]
    fn uniform_incidence_ternary() {
        let m = uniform_incidence(3, 3).unwrap();
        assert_eq!(m.column(0), vec![1, 1, 1]);
        assert_eq!(m.column(1), vec![1, 2, 0]);
        assert_eq!(m.column(2), vec![1, 0, 2]);
        assert!(matches!(uniform_incidence(4, 2), Err(Error::Distinctness(_))));
    }

    #[test]
    fn c3_examples() {
        let fam = base_blocks(&z(), 3, &zs(&[-1, 0, 1])).unwrap();
        assert!(verify_c3(&z(), &fam, &zs(&[-1, 0, 1])).pass);
        let dup = vec![fam[0].clone(), fam[0].clone(), fam[2].clone()];
        let r = verify_c3(&z(), &dup, &zs(&[-1, 0, 1]));
        assert_eq!(r.witness, Some((Element::int(0), 1, 2)));
    }

    #[test]
    fn uniform_hierarchy_c3_and_nesting() {
        let ladder = build_lattice_ladder(1, 3).unwrap();
        let h = BlockHierarchy::build_uniform(&ladder, 3, 3).unwrap();
        h.check_structure().unwrap();
        for n in 0..=3 {
            assert!(verify_c3(h.ctx(), h.family(n).unwrap(), ladder.level(n).unwrap()).pass, "level {n}");
        }
        for n in 0..3 {
            let up = x0_patch(&h, n + 1).unwrap().restrict(ladder.level(n).unwrap()).unwrap();
            assert_eq!(&up, x0_patch(&h, n).unwrap());
        }
        assert!(x0_patch(&h, 4).is_err());
        let back = BlockHierarchy::from_json(&h.to_json()).unwrap();
        assert_eq!(back, h);
    }
}
