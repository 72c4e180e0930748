//! Congruent right Følner ladders made of left monotiles.
//!
//! A ladder is a finite prefix `F_0, …, F_N` together with glue sets
//! `J_0, …, J_{N-1}` such that `{c·F_n : c ∈ J_n}` partitions `F_{n+1}`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{embedding_kind, Element, FiniteSubset, GroupContext};
use crate::rational::{parse_rational, ratio};
use crate::subgroup::{AbelianSpan, QuotientOrder};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FolnerLadder {
    ctx: GroupContext,
    levels: Vec<FiniteSubset>,
    glue: Vec<FiniteSubset>,
}

impl FolnerLadder {
    /// Assembles a ladder without checking congruence; see [`check_congruent`].
    pub fn new(ctx: GroupContext, levels: Vec<FiniteSubset>, glue: Vec<FiniteSubset>) -> Result<Self> {
        if levels.is_empty() || glue.len() + 1 != levels.len() {
            return Err(Error::Domain(format!(
                "ladder needs one more level than glue sets (got {} levels, {} glue)",
                levels.len(),
                glue.len()
            )));
        }
        for s in levels.iter().chain(&glue) {
            if s.is_empty() {
                return Err(Error::Domain("ladder sets must be nonempty".into()));
            }
            for g in s {
                ctx.validate(g)?;
            }
        }
        Ok(FolnerLadder { ctx, levels, glue })
    }

    /// The constant ladder `F_n = {1}` of the given depth.
    pub fn trivial(ctx: GroupContext, depth: usize) -> Self {
        let one = FiniteSubset::singleton(ctx.identity());
        FolnerLadder {
            levels: vec![one.clone(); depth + 1],
            glue: vec![one; depth],
            ctx,
        }
    }

    pub fn ctx(&self) -> &GroupContext {
        &self.ctx
    }

    /// Number of glue steps, i.e. the index of the top level.
    pub fn depth(&self) -> usize {
        self.glue.len()
    }

    pub fn level(&self, n: usize) -> Result<&FiniteSubset> {
        self.levels.get(n).ok_or(Error::LevelOutOfRange {
            level: n,
            depth: self.depth(),
        })
    }

    pub fn glue(&self, n: usize) -> Result<&FiniteSubset> {
        self.glue.get(n).ok_or(Error::LevelOutOfRange {
            level: n,
            depth: self.depth(),
        })
    }

    pub fn levels(&self) -> &[FiniteSubset] {
        &self.levels
    }

    pub fn glue_sets(&self) -> &[FiniteSubset] {
        &self.glue
    }

    /// `|J_n| = |F_{n+1}|/|F_n|` for every glue step.
    pub fn ratios(&self) -> Vec<u64> {
        self.glue.iter().map(|j| j.len() as u64).collect()
    }

    /// All products `c_{m-1}⋯c_n` with `c_i ∈ J_i`.
    pub fn composite_glue(&self, n: usize, m: usize) -> Result<FiniteSubset> {
        if n >= m || m > self.depth() {
            return Err(Error::Domain(format!(
                "composite glue needs n < m <= depth (n={n}, m={m}, depth={})",
                self.depth()
            )));
        }
        let mut acc = self.glue[n].clone();
        for j in &self.glue[n + 1..m] {
            acc = self.ctx.product_set(j, &acc)?;
        }
        Ok(acc)
    }

    /// Regroups the ladder along increasing level indices, composing glue.
    pub fn subsequence(&self, indices: &[usize]) -> Result<FolnerLadder> {
        if indices.len() < 2 || indices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain("subsequence needs at least two increasing indices".into()));
        }
        let mut levels = Vec::with_capacity(indices.len());
        let mut glue = Vec::with_capacity(indices.len() - 1);
        for &i in indices {
            levels.push(self.level(i)?.clone());
        }
        for w in indices.windows(2) {
            glue.push(self.composite_glue(w[0], w[1])?);
        }
        FolnerLadder::new(self.ctx.clone(), levels, glue)
    }

    /// Finite-scale exhaustion: for each sample element, the first level containing it.
    pub fn exhausts(&self, sample: &[Element]) -> Vec<Option<usize>> {
        sample
            .iter()
            .map(|g| self.levels.iter().position(|f| f.contains(g)))
            .collect()
    }

    pub fn to_file(&self) -> LadderFile {
        LadderFile {
            group: self.ctx.clone(),
            levels: self.levels.iter().map(|s| s.to_strings()).collect(),
            glue: self.glue.iter().map(|s| s.to_strings()).collect(),
        }
    }

    pub fn from_file(file: &LadderFile) -> Result<Self> {
        let ctx = file.group.clone();
        let levels = file
            .levels
            .iter()
            .map(|l| ctx.parse_set(l))
            .collect::<Result<Vec<_>>>()?;
        let glue = file
            .glue
            .iter()
            .map(|l| ctx.parse_set(l))
            .collect::<Result<Vec<_>>>()?;
        FolnerLadder::new(ctx, levels, glue)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.to_file()).expect("ladder serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }
}

/// On-disk form of a ladder: element encodings as strings.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LadderFile {
    pub group: GroupContext,
    pub levels: Vec<Vec<String>>,
    pub glue: Vec<Vec<String>>,
}

/// `1 − |{g∈F : gK⊆F}|/|F|`.
pub fn right_invariance_defect(
    ctx: &GroupContext,
    set: &FiniteSubset,
    window: &FiniteSubset,
) -> Result<BigRational> {
    if set.is_empty() {
        return Err(Error::Domain("invariance defect of an empty set".into()));
    }
    let good = set
        .iter()
        .filter(|g| window.iter().all(|k| set.contains(&ctx.mul(g, k))))
        .count();
    Ok(BigRational::one() - ratio(good, set.len()))
}

/// `|Fg∖F|/|F|`.
pub fn folner_defect(ctx: &GroupContext, set: &FiniteSubset, g: &Element) -> Result<BigRational> {
    if set.is_empty() {
        return Err(Error::Domain("Følner defect of an empty set".into()));
    }
    ctx.validate(g)?;
    let escaped = set.iter().filter(|f| !set.contains(&ctx.mul(f, g))).count();
    Ok(ratio(escaped, set.len()))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InvarianceReport {
    pub level: usize,
    pub window: Vec<String>,
    pub defect: String,
}

/// Right `(K, ε)`-invariance defects of every level of a ladder.
pub fn invariance_profile(ladder: &FolnerLadder, window: &FiniteSubset) -> Result<Vec<InvarianceReport>> {
    ladder
        .levels()
        .iter()
        .enumerate()
        .map(|(level, f)| {
            Ok(InvarianceReport {
                level,
                window: window.to_strings(),
                defect: right_invariance_defect(ladder.ctx(), f, window)?.to_string(),
            })
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CongruenceViolation {
    IdentityMissingFromBase,
    IdentityMissingFromGlue { level: usize },
    Overlap {
        level: usize,
        first: Element,
        second: Element,
        element: Element,
    },
    Uncovered { level: usize, element: Element },
    OutsideLevel { level: usize, translate_by: Element, element: Element },
}

impl fmt::Display for CongruenceViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CongruenceViolation::IdentityMissingFromBase => write!(f, "identity missing from F_0"),
            CongruenceViolation::IdentityMissingFromGlue { level } => {
                write!(f, "identity missing from J_{level}")
            }
            CongruenceViolation::Overlap {
                level,
                first,
                second,
                element,
            } => write!(
                f,
                "level {level}: translates by {first} and {second} overlap at {element}"
            ),
            CongruenceViolation::Uncovered { level, element } => {
                write!(f, "level {level}: {element} in F_{} is not covered", level + 1)
            }
            CongruenceViolation::OutsideLevel {
                level,
                translate_by,
                element,
            } => write!(
                f,
                "level {level}: translate by {translate_by} reaches {element} outside F_{}",
                level + 1
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CongruenceReport {
    pub pass: bool,
    pub levels_checked: usize,
    pub violation: Option<CongruenceViolation>,
}

fn partition_violation(
    ctx: &GroupContext,
    level: usize,
    glue: &FiniteSubset,
    tile: &FiniteSubset,
    target: &FiniteSubset,
) -> Option<CongruenceViolation> {
    let mut claimed: Vec<(Element, usize)> = Vec::with_capacity(glue.len() * tile.len());
    for (ci, c) in glue.iter().enumerate() {
        for f in tile {
            claimed.push((ctx.mul(c, f), ci));
        }
    }
    claimed.sort_unstable();
    for w in claimed.windows(2) {
        if w[0].0 == w[1].0 {
            return Some(CongruenceViolation::Overlap {
                level,
                first: glue.as_slice()[w[0].1].clone(),
                second: glue.as_slice()[w[1].1].clone(),
                element: w[0].0.clone(),
            });
        }
    }
    let covered = |g: &Element| claimed.binary_search_by(|(e, _)| e.cmp(g)).is_ok();
    if let Some(g) = target.iter().find(|g| !covered(g)) {
        return Some(CongruenceViolation::Uncovered {
            level,
            element: g.clone(),
        });
    }
    if let Some((g, ci)) = claimed.iter().find(|(g, _)| !target.contains(g)) {
        return Some(CongruenceViolation::OutsideLevel {
            level,
            translate_by: glue.as_slice()[*ci].clone(),
            element: g.clone(),
        });
    }
    None
}

/// Checks identity membership and the partition property at every level.
pub fn check_congruent(ladder: &FolnerLadder) -> CongruenceReport {
    let ctx = ladder.ctx();
    let id = ctx.identity();
    let fail = |levels_checked, v| CongruenceReport {
        pass: false,
        levels_checked,
        violation: Some(v),
    };
    if !ladder.levels()[0].contains(&id) {
        return fail(0, CongruenceViolation::IdentityMissingFromBase);
    }
    for n in 0..ladder.depth() {
        let j = &ladder.glue_sets()[n];
        if !j.contains(&id) {
            return fail(n, CongruenceViolation::IdentityMissingFromGlue { level: n });
        }
        if let Some(v) = partition_violation(ctx, n, j, &ladder.levels()[n], &ladder.levels()[n + 1]) {
            return fail(n, v);
        }
    }
    CongruenceReport {
        pass: true,
        levels_checked: ladder.depth(),
        violation: None,
    }
}

/// Whether `{c_{m-1}⋯c_n·F_n}` partitions `F_m`, by explicit expansion.
pub fn check_composite_partition(ladder: &FolnerLadder, n: usize, m: usize) -> Result<bool> {
    let digits = ladder.composite_glue(n, m)?;
    Ok(partition_violation(ladder.ctx(), n, &digits, ladder.level(n)?, ladder.level(m)?).is_none())
}

fn centered_interval(size: &BigInt) -> Vec<BigInt> {
    let half: BigInt = (size - BigInt::one()) / 2;
    let mut out = Vec::new();
    let mut x = -half.clone();
    while x <= half {
        out.push(x.clone());
        x += 1;
    }
    out
}

fn cartesian(axes: &[Vec<BigInt>]) -> Vec<Element> {
    let mut acc: Vec<Vec<BigInt>> = vec![Vec::new()];
    for axis in axes {
        let mut next = Vec::with_capacity(acc.len() * axis.len());
        for prefix in &acc {
            for x in axis {
                let mut v = prefix.clone();
                v.push(x.clone());
                next.push(v);
            }
        }
        acc = next;
    }
    acc.into_iter().map(Element::Ints).collect()
}

/// Centered boxes `[−(3ⁿ−1)/2, (3ⁿ−1)/2]^d` glued by `{−3ⁿ,0,3ⁿ}^d`.
pub fn build_lattice_ladder(d: usize, depth: usize) -> Result<FolnerLadder> {
    if d == 0 || depth == 0 {
        return Err(Error::Domain("lattice ladder needs d >= 1 and depth >= 1".into()));
    }
    let ctx = GroupContext::lattice(d);
    let mut levels = Vec::with_capacity(depth + 1);
    let mut glue = Vec::with_capacity(depth);
    let three = BigInt::from(3);
    for n in 0..=depth {
        let side = num_traits::pow(three.clone(), n);
        let axis = centered_interval(&side);
        levels.push(FiniteSubset::new(cartesian(&vec![axis; d]))?);
        if n < depth {
            let digits = vec![-side.clone(), BigInt::zero(), side.clone()];
            glue.push(FiniteSubset::new(cartesian(&vec![digits; d]))?);
        }
    }
    FolnerLadder::new(ctx, levels, glue)
}

/// Centered intervals of `Z` with odd ratios `r_n`: `J_n = {j·|F_n| : |j| ≤ (r_n−1)/2}`.
/// All ratios equal to 3 gives the ternary ladder.
pub fn build_interval_ladder(ratios: &[u64]) -> Result<FolnerLadder> {
    if ratios.is_empty() {
        return Err(Error::Domain("interval ladder needs at least one ratio".into()));
    }
    if let Some(r) = ratios.iter().find(|r| *r % 2 == 0) {
        return Err(Error::Domain(format!("interval ladder ratios must be odd, got {r}")));
    }
    let ctx = GroupContext::lattice(1);
    let mut size = BigInt::one();
    let mut levels = vec![FiniteSubset::singleton(ctx.identity())];
    let mut glue = Vec::new();
    for &r in ratios {
        let half = (r as i64 - 1) / 2;
        let digits = (-half..=half).map(|j| Element::Ints(vec![&size * j])).collect();
        glue.push(FiniteSubset::new(digits)?);
        size *= r;
        let level = centered_interval(&size).into_iter().map(|x| Element::Ints(vec![x])).collect();
        levels.push(FiniteSubset::new(level)?);
    }
    FolnerLadder::new(ctx, levels, glue)
}

/// Subgroups of order `pⁿ` of the Prüfer `p`-group, glued by `{j/p^{n+1} : 0≤j<p}`.
pub fn build_pruefer_ladder(p: u64, depth: usize) -> Result<FolnerLadder> {
    let ctx = GroupContext::pruefer(p)?;
    if depth == 0 {
        return Err(Error::Domain("depth must be >= 1".into()));
    }
    let pb = BigInt::from(p);
    let mut levels = Vec::with_capacity(depth + 1);
    let mut glue = Vec::with_capacity(depth);
    for n in 0..=depth {
        let den = num_traits::pow(pb.clone(), n);
        let mut level = Vec::new();
        let mut m = BigInt::zero();
        while m < den {
            level.push(Element::Frac(BigRational::new(m.clone(), den.clone())));
            m += 1;
        }
        levels.push(FiniteSubset::new(level)?);
        if n < depth {
            let next = &den * &pb;
            let digits = (0..p)
                .map(|j| Element::Frac(BigRational::new(BigInt::from(j), next.clone())))
                .collect();
            glue.push(FiniteSubset::new(digits)?);
        }
    }
    FolnerLadder::new(ctx, levels, glue)
}

#[derive(Clone, Debug)]
struct Direction {
    generator: Element,
    order: QuotientOrder,
    /// glue step during which the direction entered the ladder
    introduced: usize,
}

impl Direction {
    /// Coefficient range at level `s`.
    fn range(&self, s: usize) -> Vec<BigInt> {
        match &self.order {
            QuotientOrder::Infinite => {
                centered_interval(&num_traits::pow(BigInt::from(3), s - self.introduced))
            }
            QuotientOrder::Finite(l) => {
                let mut v = Vec::new();
                let mut t = BigInt::zero();
                while &t < l {
                    v.push(t.clone());
                    t += 1;
                }
                v
            }
        }
    }

    /// Glue coefficients for the step `s → s+1`.
    fn digits(&self, s: usize) -> Vec<BigInt> {
        if s == self.introduced {
            return self.range(s + 1);
        }
        match &self.order {
            QuotientOrder::Infinite => {
                let step = num_traits::pow(BigInt::from(3), s - self.introduced);
                vec![-step.clone(), BigInt::zero(), step]
            }
            QuotientOrder::Finite(_) => vec![BigInt::zero()],
        }
    }
}

fn sumset(ctx: &GroupContext, parts: &[(Element, Vec<BigInt>)]) -> Result<FiniteSubset> {
    let mut acc = FiniteSubset::singleton(ctx.identity());
    for (g, coeffs) in parts {
        let multiples = FiniteSubset::new(coeffs.iter().map(|t| ctx.pow(g, t)).collect())?;
        acc = ctx.product_set(&acc, &multiples)?;
    }
    Ok(acc)
}

/// Ladder for an abelian group along the chain of subgroups generated by an
/// enumeration. Each glue step grows every infinite cyclic direction by a
/// ternary factor and brings in the next enumerated element that is not yet
/// in the span, lifted by its fundamental domain (`{−1,0,1}` for an infinite
/// quotient, `{0,…,l−1}` for a quotient of order `l`).
pub fn build_abelian_chain_ladder(
    ctx: &GroupContext,
    enumeration: &[Element],
    depth: usize,
) -> Result<FolnerLadder> {
    if !ctx.is_abelian() {
        return Err(Error::UnsupportedGroup(format!("{} is not abelian", ctx.name())));
    }
    let mut span = AbelianSpan::new(ctx)?;
    let mut pending = enumeration.iter();
    let mut directions: Vec<Direction> = Vec::new();
    let mut levels = vec![FiniteSubset::singleton(ctx.identity())];
    let mut glue = Vec::with_capacity(depth);
    for s in 0..depth {
        for g in pending.by_ref() {
            let order = span.order_modulo(g)?;
            if order.is_trivial() {
                continue;
            }
            span.push(g.clone())?;
            directions.push(Direction {
                generator: g.clone(),
                order,
                introduced: s,
            });
            break;
        }
        let digit_parts: Vec<(Element, Vec<BigInt>)> = directions
            .iter()
            .map(|d| (d.generator.clone(), d.digits(s)))
            .collect();
        glue.push(sumset(ctx, &digit_parts)?);
        let level_parts: Vec<(Element, Vec<BigInt>)> = directions
            .iter()
            .map(|d| (d.generator.clone(), d.range(s + 1)))
            .collect();
        levels.push(sumset(ctx, &level_parts)?);
    }
    FolnerLadder::new(ctx.clone(), levels, glue)
}

/// `ε_s = r^s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EpsSchedule {
    pub ratio: BigRational,
}

impl EpsSchedule {
    pub fn geometric(ratio: BigRational) -> Self {
        EpsSchedule { ratio }
    }

    /// Parses `geometric:<r>` with `r` a fraction or decimal in (0,1].
    pub fn parse(s: &str) -> Result<Self> {
        let r = s
            .strip_prefix("geometric:")
            .ok_or_else(|| Error::Domain(format!("unknown eps schedule `{s}`")))?;
        let r = parse_rational(r)?;
        if r <= BigRational::zero() || r > BigRational::one() {
            return Err(Error::Domain("geometric ratio must lie in (0,1]".into()));
        }
        Ok(EpsSchedule { ratio: r })
    }

    pub fn eps(&self, s: usize) -> BigRational {
        num_traits::pow(self.ratio.clone(), s)
    }
}

impl Default for EpsSchedule {
    fn default() -> Self {
        EpsSchedule::geometric(ratio(1, 2))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct InvarianceTarget {
    pub window: FiniteSubset,
    pub eps: BigRational,
}

/// Data of an exact sequence `1 → L → G → Q → 1`.
pub struct ExactSequence<'a> {
    pub group: GroupContext,
    pub include: Box<dyn Fn(&Element) -> Element + 'a>,
    pub section: Box<dyn Fn(&Element) -> Element + 'a>,
    pub project: Box<dyn Fn(&Element) -> Element + 'a>,
}

#[derive(Clone, Debug)]
pub struct ComposedLadder {
    pub ladder: FolnerLadder,
    /// chosen indices `m_s` into the `L` ladder
    pub l_indices: Vec<usize>,
    /// right-invariance defect of `F_s` against its target window
    pub defects: Vec<BigRational>,
}

pub const DEFAULT_ITERATION_CAP: usize = 64;

/// `F_s = U_{m_s}·T̂_s` where `T̂_{s+1} = ⊔ section(d)·T̂_s` over the `Q` glue
/// and `m_s` is the least index above `m_{s-1}` meeting the target
/// `right_invariance_defect(F_s, K_s) ≤ ε_s`. Requires `L` central so the
/// output is congruent. Targets are indexed by level; the level-0 target is
/// not enforced because `F_0 = U_0·T̂_0` is fixed.
pub fn compose_exact_sequence(
    seq: &ExactSequence<'_>,
    ladder_l: &FolnerLadder,
    ladder_q: &FolnerLadder,
    targets: &[InvarianceTarget],
    max_iterations: usize,
) -> Result<ComposedLadder> {
    let g = &seq.group;
    let q = ladder_q.ctx();
    let depth = ladder_q.depth();
    if targets.len() < depth + 1 {
        return Err(Error::Domain(format!(
            "need {} invariance targets, got {}",
            depth + 1,
            targets.len()
        )));
    }
    if (seq.section)(&q.identity()) != g.identity() {
        return Err(Error::ExactSequence("section does not fix the identity".into()));
    }
    for set in ladder_q.levels().iter().chain(ladder_q.glue_sets()) {
        for x in set {
            let lifted = (seq.section)(x);
            g.validate(&lifted)?;
            if (seq.project)(&lifted) != *x {
                return Err(Error::ExactSequence(format!("projection∘section moves {x}")));
            }
        }
    }
    let include_set = |s: &FiniteSubset| -> Result<FiniteSubset> {
        FiniteSubset::new(s.iter().map(|x| (seq.include)(x)).collect())
    };
    for set in ladder_l.levels().iter().chain(ladder_l.glue_sets()) {
        for x in set {
            let y = (seq.include)(x);
            g.validate(&y)?;
            if (seq.project)(&y) != q.identity() {
                return Err(Error::ExactSequence(format!("{x} does not map into the kernel")));
            }
        }
    }

    // lifted tile tower
    let mut lifts = Vec::with_capacity(depth + 1);
    lifts.push(FiniteSubset::new(ladder_q.levels()[0].iter().map(|t| (seq.section)(t)).collect())?);
    for s in 0..depth {
        let d_hat = FiniteSubset::new(ladder_q.glue_sets()[s].iter().map(|d| (seq.section)(d)).collect())?;
        lifts.push(g.product_set(&d_hat, &lifts[s])?);
    }
    for (s, lift) in lifts.iter().enumerate() {
        let image = FiniteSubset::collect_dedup(lift.iter().map(|x| (seq.project)(x)));
        if image != ladder_q.levels()[s] || image.len() != lift.len() {
            return Err(Error::ExactSequence(format!("lift of T_{s} is not a lifting")));
        }
    }

    // centrality on generators of the two towers
    let l_gens: Vec<Element> = ladder_l.levels()[0]
        .iter()
        .chain(ladder_l.glue_sets().iter().flat_map(|j| j.iter()))
        .map(|x| (seq.include)(x))
        .collect();
    let q_gens: Vec<Element> = ladder_q.levels()[0]
        .iter()
        .chain(ladder_q.glue_sets().iter().flat_map(|j| j.iter()))
        .map(|x| (seq.section)(x))
        .collect();
    for a in &l_gens {
        for b in &q_gens {
            if g.mul(a, b) != g.mul(b, a) {
                return Err(Error::ExactSequence(format!(
                    "kernel element {a} does not commute with {b}; a congruent output needs L central"
                )));
            }
        }
    }

    let cap = max_iterations.min(ladder_l.depth());
    let mut l_indices = vec![0usize];
    let mut levels = vec![g.product_set(&include_set(&ladder_l.levels()[0])?, &lifts[0])?];
    let mut defects = vec![right_invariance_defect(g, &levels[0], &targets[0].window)?];

    for s in 1..=depth {
        let target = &targets[s];
        let projected = FiniteSubset::collect_dedup(target.window.iter().map(|k| (seq.project)(k)));
        let floor = right_invariance_defect(q, &ladder_q.levels()[s], &projected)?;
        if floor > target.eps {
            return Err(Error::InvarianceUnreachable {
                level: s,
                achieved: Box::new(floor),
                target: Box::new(target.eps.clone()),
            });
        }
        let mut best: Option<BigRational> = None;
        let mut chosen = None;
        for m in l_indices[s - 1] + 1..=cap {
            let f = g.product_set(&include_set(&ladder_l.levels()[m])?, &lifts[s])?;
            let defect = right_invariance_defect(g, &f, &target.window)?;
            if defect <= target.eps {
                chosen = Some((m, f, defect));
                break;
            }
            if best.as_ref().is_none_or(|b| &defect < b) {
                best = Some(defect);
            }
        }
        let Some((m, f, defect)) = chosen else {
            return Err(Error::InvarianceUnreachable {
                level: s,
                achieved: Box::new(best.unwrap_or(BigRational::one())),
                target: Box::new(target.eps.clone()),
            });
        };
        l_indices.push(m);
        levels.push(f);
        defects.push(defect);
    }

    let mut glue = Vec::with_capacity(depth);
    for s in 0..depth {
        let c = include_set(&ladder_l.composite_glue(l_indices[s], l_indices[s + 1])?)?;
        let e = FiniteSubset::new(ladder_q.glue_sets()[s].iter().map(|d| (seq.section)(d)).collect())?;
        glue.push(g.product_set(&c, &e)?);
    }
    Ok(ComposedLadder {
        ladder: FolnerLadder::new(g.clone(), levels, glue)?,
        l_indices,
        defects,
    })
}

/// `1 → Z → H_3 → Z² → 1` with the center `{(0,0,c)}`.
pub fn heisenberg_center_sequence() -> ExactSequence<'static> {
    fn coords(e: &Element) -> &[BigInt] {
        match e {
            Element::Ints(v) => v,
            _ => panic!("integer encoding expected"),
        }
    }
    ExactSequence {
        group: GroupContext::Heisenberg3,
        include: Box::new(|c| Element::Ints(vec![BigInt::zero(), BigInt::zero(), coords(c)[0].clone()])),
        section: Box::new(|q| {
            let v = coords(q);
            Element::Ints(vec![v[0].clone(), v[1].clone(), BigInt::zero()])
        }),
        project: Box::new(|g| {
            let v = coords(g);
            Element::Ints(vec![v[0].clone(), v[1].clone()])
        }),
    }
}

/// Heisenberg ladder from the ternary center ladder (depth `l_depth`) and the
/// ternary `Z²` ladder, targeting the standard generators with `ε_s` from
/// `schedule`.
pub fn build_heisenberg_ladder(
    depth: usize,
    schedule: &EpsSchedule,
    l_depth: usize,
) -> Result<ComposedLadder> {
    let seq = heisenberg_center_sequence();
    let ladder_l = build_lattice_ladder(1, l_depth)?;
    let ladder_q = build_lattice_ladder(2, depth)?;
    let window = FiniteSubset::new(GroupContext::Heisenberg3.standard_generators())?;
    let targets: Vec<InvarianceTarget> = (0..=depth)
        .map(|s| InvarianceTarget {
            window: window.clone(),
            eps: schedule.eps(s),
        })
        .collect();
    compose_exact_sequence(&seq, &ladder_l, &ladder_q, &targets, DEFAULT_ITERATION_CAP)
}

/// `F_n = U_n·R` for a finite extension `G ⊇ L` with right coset representatives `R`.
pub fn extend_virtually(base: &FolnerLadder, extension: &GroupContext) -> Result<FolnerLadder> {
    let GroupContext::FiniteExtension {
        base: base_ctx,
        ambient,
        coset_reps,
    } = extension
    else {
        return Err(Error::UnsupportedGroup(format!(
            "{} is not a finite extension",
            extension.name()
        )));
    };
    if base_ctx.as_ref() != base.ctx() {
        return Err(Error::Domain(format!(
            "ladder lives in {}, extension base is {}",
            base.ctx().name(),
            base_ctx.name()
        )));
    }
    embedding_kind(base_ctx, ambient)?;
    let reps = FiniteSubset::new(coset_reps.clone())?;
    let embed = |s: &FiniteSubset| -> Result<FiniteSubset> {
        FiniteSubset::new(s.iter().map(|x| extension.embed_base(x)).collect::<Result<Vec<_>>>()?)
    };
    let mut levels = Vec::with_capacity(base.levels().len());
    for u in base.levels() {
        let f = ambient.product_set(&embed(u)?, &reps).map_err(|e| match e {
            Error::DuplicateElement(x) => Error::NotCosetReps(format!("U_n·R repeats {x}")),
            other => other,
        })?;
        levels.push(f);
    }
    let glue = base.glue_sets().iter().map(embed).collect::<Result<Vec<_>>>()?;
    FolnerLadder::new(extension.clone(), levels, glue)
}
