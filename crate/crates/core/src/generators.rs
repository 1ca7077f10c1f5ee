//! Built-in example maps.

use num_integer::Integer;

use crate::complex::{complex_from_labels, cycle, Simplex, SimplicialComplex};
use crate::double_point::check_star_condition;
use crate::error::{PremError, Result};
use crate::geometry::GeometricComplex;
use crate::map::{quotient_by_permutation, SimplicialMap};
use crate::rational::int;
use crate::subdivision::{barycentric_subdivide, subdivide_permutation};

/// `C_{pq} -> C_q`, vertex i to i mod q.
pub fn cycle_cover(p: usize, q: usize) -> Result<SimplicialMap> {
    if q < 3 || p < 1 {
        return Err(PremError::InvalidParameter(format!(
            "cycle-cover needs p >= 1 and q >= 3, got p={p} q={q}"
        )));
    }
    SimplicialMap::new(cycle(p * q, "x"), cycle(q, "y"), (0..p * q).map(|i| i % q).collect())
}

/// Boundary of the (m+1)-dimensional cross-polytope with its antipodal
/// involution. Vertices `p0 n0 p1 n1 …`.
pub fn cross_polytope(m: usize) -> Result<(SimplicialComplex, Vec<usize>)> {
    if m == 0 || m > 6 {
        return Err(PremError::InvalidParameter(format!(
            "cross-polytope needs 1 <= m <= 6, got {m}"
        )));
    }
    let d = m + 1;
    let labels = (0..d).flat_map(|i| [format!("p{i}"), format!("n{i}")]).collect();
    let facets = (0..1usize << d).map(|mask| (0..d).map(|i| 2 * i + (mask >> i & 1)).collect::<Simplex>());
    let complex = SimplicialComplex::from_generators(labels, facets)?;
    let involution = (0..2 * d).map(|v| v ^ 1).collect();
    Ok((complex, involution))
}

/// Covering of a complex by its quotient under the cyclic group generated
/// by `generator`, subdividing barycentrically until the quotient is
/// simplicial and the star condition holds.
pub fn cyclic_cover(complex: &SimplicialComplex, generator: &[usize], max_rounds: usize) -> Result<SimplicialMap> {
    let mut cover = complex.clone();
    let mut gen = generator.to_vec();
    for round in 0..=max_rounds {
        if let Some(f) = quotient_by_permutation(&cover, &gen)? {
            if check_star_condition(&f) {
                return Ok(f);
            }
        }
        if round < max_rounds {
            let next = subdivide_permutation(&cover, &gen)?;
            cover = barycentric_subdivide(&cover)?.child;
            gen = next;
        }
    }
    Err(PremError::ModelInvalid(
        "cyclic quotient not usable after subdivision".into(),
    ))
}

/// `sd ∂β_{m+1} -> sd ∂β_{m+1} / antipodal`.
pub fn cross_polytope_cover(m: usize) -> Result<SimplicialMap> {
    let (c, inv) = cross_polytope(m)?;
    cyclic_cover(&c, &inv, 2)
}

/// Join of two n-gons, vertices `a0 … a(n-1) b0 … b(n-1)`.
pub fn polygon_join(n: usize) -> SimplicialComplex {
    let labels = (0..n)
        .map(|i| format!("a{i}"))
        .chain((0..n).map(|i| format!("b{i}")))
        .collect();
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            gens.push(vec![i, (i + 1) % n, n + j, n + (j + 1) % n]);
        }
    }
    SimplicialComplex::from_generators(labels, gens).expect("join of polygons")
}

/// The ℤ/p action on `C_n * C_n` rotating the factors by `(s, q s)` with
/// `s = n / p`, where `n = p` for p ≥ 3 and `n = 2p` otherwise.
pub fn join_lens_action(p: usize, q: usize) -> Result<(SimplicialComplex, Vec<usize>)> {
    if p < 2 || q == 0 || p.gcd(&q) != 1 {
        return Err(PremError::InvalidParameter(format!(
            "join-lens needs p >= 2, q >= 1 and gcd(p,q) = 1, got p={p} q={q}"
        )));
    }
    let n = if p >= 3 { p } else { 2 * p };
    let s = n / p;
    let gen = (0..n)
        .map(|i| (i + s) % n)
        .chain((0..n).map(|j| n + (j + q * s) % n))
        .collect();
    Ok((polygon_join(n), gen))
}

pub fn join_lens(p: usize, q: usize) -> Result<SimplicialMap> {
    let (c, gen) = join_lens_action(p, q)?;
    cyclic_cover(&c, &gen, 3)
}

/// An 8-cycle immersed in the plane as a figure eight with one transverse
/// double point, with the target graph's planar realization.
pub fn figure_eight() -> (SimplicialMap, GeometricComplex) {
    let l = complex_from_labels(
        &["c", "a1", "a2", "a3", "b1", "b2", "b3"],
        &[
            &["c", "a1"],
            &["a1", "a2"],
            &["a2", "a3"],
            &["a3", "c"],
            &["c", "b1"],
            &["b1", "b2"],
            &["b2", "b3"],
            &["b3", "c"],
        ],
    )
    .expect("figure eight target");
    let f = SimplicialMap::new(cycle(8, "x"), l.clone(), vec![0, 1, 2, 3, 0, 4, 5, 6]).expect("figure eight");
    let pts = [(0, 0), (1, -1), (2, 0), (1, 1), (-1, -1), (-2, 0), (-1, 1)];
    let coords = pts.iter().map(|&(x, y)| vec![int(x), int(y)]).collect();
    (f, GeometricComplex::new(l, coords).expect("planar figure eight"))
}

/// Path `a-b-c` folded onto an edge at `b`.
pub fn fold_path() -> SimplicialMap {
    let k = complex_from_labels(&["a", "b", "c"], &[&["a", "b"], &["b", "c"]]).expect("path");
    let l = complex_from_labels(&["p0", "p1"], &[&["p0", "p1"]]).expect("edge");
    SimplicialMap::new(k, l, vec![0, 1, 0]).expect("fold")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts() {
        let f = cycle_cover(3, 3).unwrap();
        assert_eq!(f.source.count(0), 9);
        assert!(cycle_cover(2, 2).is_err());
        let (c, _) = cross_polytope(3).unwrap();
        assert_eq!(c.f_vector(), vec![8, 24, 32, 16]);
        let j = polygon_join(3);
        assert_eq!(j.count(0), 6);
        assert_eq!(j.count(3), 9);
        assert_eq!(j.euler_characteristic(), 0);
        assert!(join_lens_action(4, 2).is_err());
    }

    #[test]
    fn small_covers() {
        let f = cross_polytope_cover(1).unwrap();
        assert_eq!(f.source.count(0), 8);
        assert_eq!(f.target.count(0), 4);
        let (f, _) = figure_eight();
        assert!(f.is_non_degenerate());
        assert_eq!(f.fibers().iter().filter(|x| x.len() == 2).count(), 1);
    }

    #[test]
    fn lens_two_is_projective_space() {
        let (c, gen) = join_lens_action(2, 1).unwrap();
        let (b, inv) = cross_polytope(3).unwrap();
        assert_eq!(c.f_vector(), b.f_vector());
        assert!(gen.iter().enumerate().all(|(v, &w)| gen[w] == v && w != v));
        assert!(inv.iter().all(|&w| inv[w] != w));
    }
}
