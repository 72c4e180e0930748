//! Exact convex-hull membership over the rationals.

use num_rational::BigRational;
use num_traits::{Signed, Zero};

fn l1(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

pub fn l1_distance(a: &[BigRational], b: &[BigRational]) -> BigRational {
    l1(a, b)
}

/// Hausdorff distance between two finite point sets in the L1 metric.
pub fn hausdorff_l1(a: &[Vec<BigRational>], b: &[Vec<BigRational>]) -> BigRational {
    let one_way = |p: &[Vec<BigRational>], q: &[Vec<BigRational>]| {
        p.iter()
            .map(|x| q.iter().map(|y| l1(x, y)).min().unwrap_or_else(BigRational::zero))
            .max()
            .unwrap_or_else(BigRational::zero)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Reduced row echelon form in place; returns pivot columns.
fn rref(m: &mut [Vec<BigRational>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].clone();
        for x in m[r].iter_mut() {
            *x = &*x / &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let row_r = m[r].clone();
                for (x, y) in m[i].iter_mut().zip(&row_r) {
                    *x = &*x - &f * y;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == m.len() {
            break;
        }
    }
    pivots
}

/// Whether `point` lies in the convex hull of `vertices`, with barycentric
/// weights when they are determined uniquely.
pub fn hull_membership(vertices: &[Vec<BigRational>], point: &[BigRational]) -> (bool, Option<Vec<BigRational>>) {
    let m = vertices.len();
    if m == 0 {
        return (false, None);
    }
    let dim = point.len();
    // rows: coordinates and the affine row Σλ = 1
    let mut sys: Vec<Vec<BigRational>> = (0..dim)
        .map(|i| {
            let mut row: Vec<BigRational> = vertices.iter().map(|v| v[i].clone()).collect();
            row.push(point[i].clone());
            row
        })
        .collect();
    sys.push(vec![BigRational::from_integer(1.into()); m + 1]);
    let pivots = rref(&mut sys, m);
    // inconsistent row: zero coefficients, nonzero rhs
    if sys.iter().any(|row| row[..m].iter().all(|x| x.is_zero()) && !row[m].is_zero()) {
        return (false, None);
    }
    let free: Vec<usize> = (0..m).filter(|c| !pivots.contains(c)).collect();
    if free.is_empty() {
        let mut lambda = vec![BigRational::zero(); m];
        for (r, &c) in pivots.iter().enumerate() {
            lambda[c] = sys[r][m].clone();
        }
        let ok = lambda.iter().all(|x| !x.is_negative());
        return (ok, Some(lambda));
    }
    // pivot_c = rhs − Σ a_f free_f ≥ 0 and free_f ≥ 0
    let mut ineqs: Vec<(Vec<BigRational>, BigRational)> = Vec::new();
    for (r, _) in pivots.iter().enumerate() {
        let coeffs = free.iter().map(|&f| sys[r][f].clone()).collect();
        ineqs.push((coeffs, sys[r][m].clone()));
    }
    for i in 0..free.len() {
        let mut coeffs = vec![BigRational::zero(); free.len()];
        coeffs[i] = BigRational::from_integer((-1).into());
        ineqs.push((coeffs, BigRational::zero()));
    }
    (fourier_motzkin_feasible(ineqs, free.len()), None)
}

/// Feasibility of `{x : a·x ≤ b}` by eliminating variables one at a time.
pub fn fourier_motzkin_feasible(mut ineqs: Vec<(Vec<BigRational>, BigRational)>, nvars: usize) -> bool {
    for v in 0..nvars {
        let (mut pos, mut neg, mut zero) = (Vec::new(), Vec::new(), Vec::new());
        for (a, b) in ineqs {
            if a[v].is_positive() {
                pos.push((a, b));
            } else if a[v].is_negative() {
                neg.push((a, b));
            } else {
                zero.push((a, b));
            }
        }
        for (ap, bp) in &pos {
            for (an, bn) in &neg {
                let sp = -&an[v];
                let sn = ap[v].clone();
                let a: Vec<BigRational> = ap.iter().zip(an).map(|(x, y)| x * &sp + y * &sn).collect();
                let b = bp * &sp + bn * &sn;
                zero.push((a, b));
            }
        }
        zero.sort();
        zero.dedup();
        ineqs = zero;
    }
    ineqs.iter().all(|(_, b)| !b.is_negative())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn pt(v: &[(usize, usize)]) -> Vec<BigRational> {
        v.iter().map(|&(a, b)| ratio(a, b)).collect()
    }

    #[test]
    fn simplex_membership() {
        let verts = vec![pt(&[(1, 1), (0, 1)]), pt(&[(0, 1), (1, 1)])];
        let (inside, w) = hull_membership(&verts, &pt(&[(1, 3), (2, 3)]));
        assert!(inside);
        assert_eq!(w.unwrap(), pt(&[(1, 3), (2, 3)]));
        assert!(!hull_membership(&verts, &pt(&[(1, 2), (1, 3)])).0);
    }

    #[test]
    fn dependent_vertices_use_elimination() {
        // unit square: four vertices in the plane
        let verts = vec![
            pt(&[(0, 1), (0, 1)]),
            pt(&[(1, 1), (0, 1)]),
            pt(&[(0, 1), (1, 1)]),
            pt(&[(1, 1), (1, 1)]),
        ];
        assert!(hull_membership(&verts, &pt(&[(1, 2), (1, 3)])).0);
        assert!(!hull_membership(&verts, &pt(&[(3, 2), (1, 3)])).0);
    }

    #[test]
    fn hausdorff_of_segments() {
        let a = vec![pt(&[(1, 1), (0, 1)]), pt(&[(0, 1), (1, 1)])];
        let b = vec![pt(&[(2, 3), (1, 3)]), pt(&[(1, 3), (2, 3)])];
        assert_eq!(hausdorff_l1(&a, &b), ratio(2, 3));
    }
}
