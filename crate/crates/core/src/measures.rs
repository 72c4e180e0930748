//! Inverse limits of simplices `Δ(k_n, |F_n|)` under managed matrices,
//! Lemma-8 grouping and finite simplex realization.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::blocks::BlockHierarchy;
use crate::error::{Error, Result};
use crate::folner::FolnerLadder;
use crate::hull::{hausdorff_l1, hull_membership, l1_distance};
use crate::matrix::{ManagedMatrix, ManagedSequence};

/// `M_n(i,j) = |{c ∈ J_n : B_{n+1,j}(c·F_n) = B_{n,i}}|`, read off the patterns.
pub fn incidence_from_hierarchy(h: &BlockHierarchy, n: usize) -> Result<ManagedMatrix> {
    if n >= h.depth() {
        return Err(Error::LevelOutOfRange {
            level: n,
            depth: h.depth(),
        });
    }
    let ctx = h.ctx();
    let lower = h.family(n)?;
    let upper = h.family(n + 1)?;
    let glue = h.ladder().glue(n)?;
    let tile = lower[0].support();
    let rows = lower.len();
    let cols = upper.len();
    let mut e = vec![0u64; rows * cols];
    for (j, big) in upper.iter().enumerate() {
        for c in glue {
            let read: Vec<u32> = tile
                .iter()
                .map(|v| big.get(&ctx.mul(c, v)).ok_or_else(|| Error::OutOfWindow(v.to_string())))
                .collect::<Result<_>>()?;
            if let Some(i) = lower.iter().position(|b| b.symbols() == read.as_slice()) {
                e[i * cols + j] += 1;
            }
        }
    }
    ManagedMatrix::new(rows, cols, glue.len() as u64, e)
}

/// A point of `Δ(k, p)`: nonnegative coordinates summing to `1/p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexPoint {
    coords: Vec<BigRational>,
    scale: BigInt,
}

impl SimplexPoint {
    pub fn new(coords: Vec<BigRational>, scale: BigInt) -> Result<Self> {
        if scale < BigInt::one() {
            return Err(Error::Scale("scale must be positive".into()));
        }
        if coords.iter().any(|x| x.is_negative()) {
            return Err(Error::Domain("negative coordinate".into()));
        }
        let sum: BigRational = coords.iter().sum();
        if sum != BigRational::new(BigInt::one(), scale.clone()) {
            return Err(Error::Scale(format!("coordinates sum to {sum}, expected 1/{scale}")));
        }
        Ok(SimplexPoint { coords, scale })
    }

    /// `e_j / p`.
    pub fn vertex(k: usize, j: usize, scale: BigInt) -> Self {
        let mut coords = vec![BigRational::zero(); k];
        coords[j] = BigRational::new(BigInt::one(), scale.clone());
        SimplexPoint { coords, scale }
    }

    pub fn coords(&self) -> &[BigRational] {
        &self.coords
    }

    pub fn scale(&self) -> &BigInt {
        &self.scale
    }
}

/// `z_n = M_n z_{n+1}`, moving from scale `p_{n+1}` to `p_{n+1}/ratio`.
pub fn push(m: &ManagedMatrix, z: &SimplexPoint) -> Result<SimplexPoint> {
    if z.coords.len() != m.cols() {
        return Err(Error::Dimension(format!(
            "point has {} coordinates, matrix has {} columns",
            z.coords.len(),
            m.cols()
        )));
    }
    let ratio = BigInt::from(m.ratio());
    if (&z.scale % &ratio) != BigInt::zero() {
        return Err(Error::Scale(format!("scale {} is not a multiple of ratio {ratio}", z.scale)));
    }
    let coords = (0..m.rows())
        .map(|i| {
            z.coords
                .iter()
                .enumerate()
                .map(|(j, x)| x * BigRational::from_integer(m.get(i, j).into()))
                .sum()
        })
        .collect();
    Ok(SimplexPoint {
        coords,
        scale: &z.scale / ratio,
    })
}

/// Images of the vertices of `Δ(k_{n+d}, p_{n+d})` in `Δ(k_n, p_n)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplexApproximant {
    pub level: usize,
    pub depth: usize,
    pub scale: BigInt,
    pub vertices: Vec<Vec<BigRational>>,
}

/// Vertices of depth `d` written in those of depth `d − 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NestingCertificate {
    /// `weights[j][i] = M_{n+d−1}(i,j) / ratio`
    pub weights: Vec<Vec<BigRational>>,
    /// every weight vector reproduces its vertex and passes hull membership
    pub verified: bool,
    /// all weights positive, so the inner hull avoids the outer facets
    pub strict: bool,
    pub hausdorff: BigRational,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LimitApproximation {
    pub approximant: SimplexApproximant,
    pub previous: SimplexApproximant,
    pub nesting: NestingCertificate,
    /// L1 distance between the depth-`d` and depth-`d−1` images of each vertex
    pub cluster_diameters: Vec<BigRational>,
}

fn approximant(seq: &ManagedSequence, n: usize, d: usize) -> Result<SimplexApproximant> {
    if n + d > seq.len() {
        return Err(Error::LevelOutOfRange {
            level: n + d,
            depth: seq.len(),
        });
    }
    let top = seq.scale(n + d)?;
    let vertices = if d == 0 {
        let k = seq.dim(n)?;
        (0..k).map(|j| SimplexPoint::vertex(k, j, top.clone()).coords).collect()
    } else {
        let p = seq.product(n, n + d)?;
        (0..p.cols())
            .map(|j| {
                p.column(j)
                    .into_iter()
                    .map(|x| BigRational::new(x.into(), top.clone()))
                    .collect()
            })
            .collect()
    };
    Ok(SimplexApproximant {
        level: n,
        depth: d,
        scale: seq.scale(n)?,
        vertices,
    })
}

/// Depth-`d` approximant at level `n` with its nesting certificate inside
/// depth `d − 1` (depth 0 being the whole simplex `Δ(k_n, p_n)`).
pub fn approximate_limit(seq: &ManagedSequence, n: usize, d: usize) -> Result<LimitApproximation> {
    if d == 0 {
        return Err(Error::Domain("depth must be at least 1".into()));
    }
    let outer = approximant(seq, n, d - 1)?;
    let inner = approximant(seq, n, d)?;
    let last = seq.matrix(n + d - 1)?;
    let r = BigRational::from_integer(last.ratio().into());
    let weights: Vec<Vec<BigRational>> = (0..last.cols())
        .map(|j| {
            last.column(j)
                .into_iter()
                .map(|x| BigRational::from_integer(x.into()) / &r)
                .collect()
        })
        .collect();
    let mut verified = true;
    for (w, v) in weights.iter().zip(&inner.vertices) {
        let combo: Vec<BigRational> = (0..v.len())
            .map(|c| w.iter().zip(&outer.vertices).map(|(wi, o)| wi * &o[c]).sum())
            .collect();
        if &combo != v || !hull_membership(&outer.vertices, v).0 {
            verified = false;
        }
    }
    let strict = weights.iter().flatten().all(|x| x.is_positive());
    let hausdorff = hausdorff_l1(&inner.vertices, &outer.vertices);
    let cluster_diameters = match (inner.vertices.len(), outer.vertices.len()) {
        (a, b) if a == b => inner
            .vertices
            .iter()
            .zip(&outer.vertices)
            .map(|(x, y)| l1_distance(x, y))
            .collect(),
        _ => Vec::new(),
    };
    Ok(LimitApproximation {
        approximant: inner,
        previous: outer,
        nesting: NestingCertificate {
            weights,
            verified,
            strict,
            hausdorff,
        },
        cluster_diameters,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GroupingStep {
    pub from: usize,
    pub to: usize,
    pub min_entry: u64,
    pub column_count: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Lemma8Selection {
    pub indices: Vec<usize>,
    pub grouped: Vec<ManagedMatrix>,
    pub certificate: Vec<GroupingStep>,
    /// trailing matrices that never reached an admissible product
    pub dropped_tail: usize,
}

impl Lemma8Selection {
    /// Exact recheck of `min entry > column count` for every grouped product.
    pub fn certificate_holds(&self) -> bool {
        self.grouped
            .iter()
            .zip(&self.certificate)
            .all(|(m, c)| m.min_entry() == c.min_entry && m.min_entry() > m.cols() as u64)
    }

    pub fn grouped_sequence(&self, seq: &ManagedSequence) -> Result<ManagedSequence> {
        ManagedSequence::new(seq.scale(self.indices[0])?, self.grouped.clone())
    }
}

/// Greedy-minimal grouping: `n_0 = 0` and each next index is the least `m`
/// with every entry of `M_{n_i}⋯M_{m−1}` above its column count. Matrices
/// after the last admissible index are dropped and reported.
pub fn select_subsequence_lemma8(seq: &ManagedSequence, k_bound: &BigRational) -> Result<Lemma8Selection> {
    for (n, m) in seq.matrices().iter().enumerate() {
        let lhs = BigRational::from_integer(m.cols().into());
        let rhs = k_bound * BigRational::from_integer(m.ratio().into());
        if lhs > rhs {
            return Err(Error::Hypothesis(format!(
                "k_{} = {} exceeds K·ratio = {rhs}",
                n + 1,
                m.cols()
            )));
        }
    }
    let mut indices = vec![0usize];
    let mut grouped = Vec::new();
    let mut certificate = Vec::new();
    let mut start = 0;
    'outer: while start < seq.len() {
        let mut acc = seq.matrix(start)?.clone();
        for end in start + 1..=seq.len() {
            if end > start + 1 {
                acc = acc.mul(seq.matrix(end - 1)?)?;
            }
            if acc.min_entry() > acc.cols() as u64 {
                certificate.push(GroupingStep {
                    from: start,
                    to: end,
                    min_entry: acc.min_entry(),
                    column_count: acc.cols(),
                });
                grouped.push(acc);
                indices.push(end);
                start = end;
                continue 'outer;
            }
        }
        break;
    }
    if grouped.is_empty() {
        return Err(Error::Exhausted {
            reached: 0,
            len: seq.len(),
        });
    }
    Ok(Lemma8Selection {
        dropped_tail: seq.len() - start,
        indices,
        grouped,
        certificate,
    })
}

/// Ladder ratios `|J_n|` with an optional stationary continuation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RatioSchedule {
    pub base_size: BigInt,
    pub prefix: Vec<u64>,
    pub tail: Option<u64>,
}

impl RatioSchedule {
    pub fn from_ladder(ladder: &FolnerLadder) -> Self {
        RatioSchedule {
            base_size: BigInt::from(ladder.levels()[0].len()),
            prefix: ladder.ratios(),
            tail: None,
        }
    }

    /// Continues a constant-ratio ladder with the same ratio forever.
    pub fn stationary(ladder: &FolnerLadder) -> Self {
        let mut s = Self::from_ladder(ladder);
        if let Some(&r) = s.prefix.first() {
            if s.prefix.iter().all(|&x| x == r) {
                s.tail = Some(r);
            }
        }
        s
    }

    pub fn get(&self, n: usize) -> Option<u64> {
        self.prefix.get(n).copied().or(self.tail)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Realization {
    pub sequence: ManagedSequence,
    pub depth: usize,
    pub approximant: SimplexApproximant,
    pub cluster_diameters: Vec<BigRational>,
    /// largest L1 distance between two vertices of the final approximant
    pub hull_diameter: BigRational,
}

pub const REALIZE_MAX_DEPTH: usize = 64;

/// `d × d` matrix with `ratio − (d−1)` on the diagonal and ones elsewhere.
pub fn near_diagonal(d: usize, ratio: u64) -> Result<ManagedMatrix> {
    if ratio < d as u64 {
        return Err(Error::Infeasible(format!("ratio {ratio} below {d}")));
    }
    let mut e = vec![1u64; d * d];
    for i in 0..d {
        e[i * d + i] = ratio - (d as u64 - 1);
    }
    ManagedMatrix::new(d, d, ratio, e)
}

/// Near-diagonal managed sequence, extended until every vertex moves by at
/// most `tolerance` (L1) between consecutive depths of the level-0
/// approximant.
pub fn realize_finite_simplex(d: usize, ratios: &RatioSchedule, tolerance: &BigRational) -> Result<Realization> {
    if d < 2 {
        return Err(Error::Domain(format!("need at least 2 extreme points, got {d}")));
    }
    if !tolerance.is_positive() {
        return Err(Error::Domain("tolerance must be positive".into()));
    }
    let mut matrices = Vec::new();
    for depth in 1..=REALIZE_MAX_DEPTH {
        let r = ratios.get(depth - 1).ok_or_else(|| {
            Error::Infeasible(format!("ladder ends after {} steps before reaching the tolerance", depth - 1))
        })?;
        if r < d as u64 + 1 {
            return Err(Error::Infeasible(format!(
                "ratio {r} at step {} is below d+1 = {}",
                depth - 1,
                d + 1
            )));
        }
        matrices.push(near_diagonal(d, r)?);
        let seq = ManagedSequence::new(ratios.base_size.clone(), matrices.clone())?;
        let lim = approximate_limit(&seq, 0, depth)?;
        if lim.cluster_diameters.iter().all(|x| x <= tolerance) {
            let hull_diameter = lim
                .approximant
                .vertices
                .iter()
                .flat_map(|a| lim.approximant.vertices.iter().map(move |b| l1_distance(a, b)))
                .max()
                .unwrap_or_else(BigRational::zero);
            return Ok(Realization {
                sequence: seq,
                depth,
                approximant: lim.approximant,
                cluster_diameters: lim.cluster_diameters,
                hull_diameter,
            });
        }
    }
    Err(Error::Infeasible(format!(
        "tolerance not reached within {REALIZE_MAX_DEPTH} steps"
    )))
}
