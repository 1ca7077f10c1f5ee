//! Exact rational scalars and the small amount of dense linear algebra over
//! ℚ that the geometric modules need.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{PremError, Result};

pub type Rational = BigRational;

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn frac(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// Formats as `num/den`, always with an explicit denominator.
pub fn format_rational(q: &Rational) -> String {
    format!("{}/{}", q.numer(), q.denom())
}

/// Parses `num/den` or a bare integer.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let n: BigInt = n.parse().ok()?;
    let d: BigInt = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rational::new(n, d))
}

pub fn dot(a: &[Rational], b: &[Rational]) -> Rational {
    a.iter().zip(b).fold(Rational::zero(), |acc, (x, y)| acc + x * y)
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn add(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn scale(a: &[Rational], s: &Rational) -> Vec<Rational> {
    a.iter().map(|x| x * s).collect()
}

pub fn norm_sq(a: &[Rational]) -> Rational {
    dot(a, a)
}

pub fn dist_sq(a: &[Rational], b: &[Rational]) -> Rational {
    norm_sq(&sub(a, b))
}

pub fn is_zero_vec(a: &[Rational]) -> bool {
    a.iter().all(Zero::is_zero)
}

/// Row-reduces `rows` in place and returns the rank.
pub fn row_reduce(rows: &mut [Vec<Rational>]) -> usize {
    let ncols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let inv = rows[rank][col].recip();
        for x in rows[rank].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot = rows[rank].clone();
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && !row[col].is_zero() {
                let factor = row[col].clone();
                for (x, p) in row[col..].iter_mut().zip(&pivot[col..]) {
                    *x -= &factor * p;
                }
            }
        }
        rank += 1;
        if rank == rows.len() {
            break;
        }
    }
    rank
}

pub fn rank(rows: &[Vec<Rational>]) -> usize {
    let mut m = rows.to_vec();
    row_reduce(&mut m)
}

/// True iff the points are affinely independent.
pub fn affinely_independent(points: &[Vec<Rational>]) -> bool {
    if points.len() <= 1 {
        return true;
    }
    let diffs: Vec<Vec<Rational>> = points[1..].iter().map(|p| sub(p, &points[0])).collect();
    rank(&diffs) == diffs.len()
}

/// Solves `A x = b` exactly. `a` is given row-major. Returns one solution
/// (free variables set to zero) or `None` when inconsistent.
pub fn solve(a: &[Vec<Rational>], b: &[Rational]) -> Option<Vec<Rational>> {
    let ncols = a.first().map_or(0, Vec::len);
    let mut aug: Vec<Vec<Rational>> = a
        .iter()
        .zip(b)
        .map(|(row, rhs)| {
            let mut r = row.clone();
            r.push(rhs.clone());
            r
        })
        .collect();
    row_reduce(&mut aug);
    let mut x = vec![Rational::zero(); ncols];
    for row in &aug {
        match row[..ncols].iter().position(|v| !v.is_zero()) {
            Some(p) => x[p] = row[ncols].clone(),
            None => {
                if !row[ncols].is_zero() {
                    return None;
                }
            }
        }
    }
    Some(x)
}

/// Barycentric coordinates of `point` with respect to the affinely
/// independent `vertices`, if the point lies in their affine hull.
pub fn barycentric(vertices: &[Vec<Rational>], point: &[Rational]) -> Option<Vec<Rational>> {
    let dim = point.len();
    let n = vertices.len();
    let mut a: Vec<Vec<Rational>> = (0..dim)
        .map(|i| (0..n).map(|j| vertices[j][i].clone()).collect())
        .collect();
    a.push(vec![Rational::one(); n]);
    let mut b = point.to_vec();
    b.push(Rational::one());
    let x = solve(&a, &b)?;
    // the solve picks zeros for free variables; confirm it reproduces the point
    let check: Vec<Rational> = (0..dim)
        .map(|i| (0..n).fold(Rational::zero(), |acc, j| acc + &x[j] * &vertices[j][i]))
        .collect();
    (check == point).then_some(x)
}

/// Squared distance from `p` to the affine hull of `face` (nonempty).
pub fn dist_sq_to_affine_hull(p: &[Rational], face: &[Vec<Rational>]) -> Result<Rational> {
    let base = face
        .first()
        .ok_or_else(|| PremError::Internal("empty face in height computation".into()))?;
    let dirs: Vec<Vec<Rational>> = face[1..].iter().map(|q| sub(q, base)).collect();
    let w = sub(p, base);
    if dirs.is_empty() {
        return Ok(norm_sq(&w));
    }
    // Gram system G c = D^T w gives the orthogonal projection
    let gram: Vec<Vec<Rational>> = dirs.iter().map(|u| dirs.iter().map(|v| dot(u, v)).collect()).collect();
    let rhs: Vec<Rational> = dirs.iter().map(|u| dot(u, &w)).collect();
    let c = solve(&gram, &rhs).ok_or_else(|| PremError::Internal("singular Gram matrix".into()))?;
    let mut proj = vec![Rational::zero(); p.len()];
    for (ci, d) in c.iter().zip(&dirs) {
        for (x, y) in proj.iter_mut().zip(d) {
            *x += ci * y;
        }
    }
    Ok(norm_sq(&sub(&w, &proj)))
}

pub fn max_abs(values: &[Rational]) -> Rational {
    values.iter().map(|v| v.abs()).max().unwrap_or_else(Rational::zero)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        let q = parse_rational("-6/4").unwrap();
        assert_eq!(format_rational(&q), "-3/2");
        assert_eq!(parse_rational("7").unwrap(), int(7));
        assert!(parse_rational("1/0").is_none());
        assert!(parse_rational("x").is_none());
    }

    #[test]
    fn solve_and_rank() {
        let a = vec![vec![int(1), int(2)], vec![int(2), int(4)]];
        assert_eq!(rank(&a), 1);
        assert!(solve(&a, &[int(1), int(3)]).is_none());
        let x = solve(&a, &[int(1), int(2)]).unwrap();
        assert_eq!(&x[0] + int(2) * &x[1], int(1));
    }

    #[test]
    fn barycentric_in_triangle() {
        let tri = vec![vec![int(0), int(0)], vec![int(1), int(0)], vec![int(0), int(1)]];
        let b = barycentric(&tri, &[frac(1, 4), frac(1, 2)]).unwrap();
        assert_eq!(b, vec![frac(1, 4), frac(1, 4), frac(1, 2)]);
        let seg = vec![vec![int(0), int(0)], vec![int(1), int(0)]];
        assert!(barycentric(&seg, &[int(0), int(1)]).is_none());
    }

    #[test]
    fn heights() {
        let h = dist_sq_to_affine_hull(&[int(0), int(1)], &[vec![int(-1), int(0)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(h, int(1));
        let h = dist_sq_to_affine_hull(&[int(1), int(1)], &[vec![int(0), int(0)], vec![int(1), int(0)]]).unwrap();
        assert_eq!(h, int(1));
    }
}
