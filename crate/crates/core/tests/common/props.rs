//! Property checks shared by the `properties` suites and the acceptance
//! harness.

use prem_core::cohomology::{quotient_involution, yang_index, yang_index_of, ChainComplex, Cocycle};
use prem_core::double_point::double_point_complex;
use prem_core::generators::{cross_polytope, cycle_cover};
use prem_core::geometry::GeometricComplex;
use prem_core::gf2::BitVec;
use prem_core::io::{parse_lift, parse_map, write_lift, write_map, MapBundle};
use prem_core::map::SimplicialMap;
use prem_core::obstruction::construct_equivariant_witness;
use prem_core::rational::{frac, int, Rational};
use prem_core::stability::{in_g_phi, is_general_position_config, LinearMapToRm};
use prem_core::subdivision::{barycentric_subdivide, subdivide_permutation};
use prem_core::verify::Lift;
use prem_core::SimplicialComplex;
use proptest::prelude::*;

use super::{instance, Instance};

fn fail(e: impl std::fmt::Display) -> TestCaseError {
    TestCaseError::fail(e.to_string())
}

/// Random maps from [`instance`] together with cycle covers.
pub fn any_map() -> impl Strategy<Value = SimplicialMap> {
    prop_oneof![
        instance().prop_map(|i| i.f),
        (1usize..=4, 3usize..=6).prop_map(|(p, q)| cycle_cover(p, q).unwrap()),
    ]
}

pub fn involution_of_double_points(f: SimplicialMap) -> Result<(), TestCaseError> {
    let d = double_point_complex(&f).map_err(fail)?;
    d.check().map_err(fail)?;
    for (i, &j) in d.involution.iter().enumerate() {
        prop_assert_ne!(i, j, "fixed vertex");
        prop_assert_eq!(d.involution[j], i);
        prop_assert_eq!(d.pairs[j], (d.pairs[i].1, d.pairs[i].0));
    }
    for cell in d.complex.maximal_simplices() {
        let image = d.apply_involution(&cell);
        prop_assert!(d.complex.contains(&image), "involution does not map cells to cells");
        prop_assert_eq!(f.image(&d.first(&cell)), f.image(&d.second(&cell)));
    }
    Ok(())
}

/// Free involutions: double-point complexes of cycle covers and antipodal
/// cross-polytope boundaries.
pub fn free_involution() -> impl Strategy<Value = (SimplicialComplex, Vec<usize>)> {
    prop_oneof![
        (2usize..=4, 3usize..=5).prop_map(|(p, q)| {
            let d = double_point_complex(&cycle_cover(p, q).unwrap()).unwrap();
            (d.complex, d.involution)
        }),
        (1usize..=2).prop_map(|m| cross_polytope(m).unwrap()),
    ]
}

pub fn yang_under_subdivision((c, inv): (SimplicialComplex, Vec<usize>)) -> Result<(), TestCaseError> {
    let before = yang_index_of(&quotient_involution(&c, &inv, 3).map_err(fail)?).map_err(fail)?;
    let sd_inv = subdivide_permutation(&c, &inv).map_err(fail)?;
    let sd = barycentric_subdivide(&c).map_err(fail)?.child;
    let after = yang_index_of(&quotient_involution(&sd, &sd_inv, 3).map_err(fail)?).map_err(fail)?;
    prop_assert_eq!(before, after);
    Ok(())
}

pub fn cochain() -> impl Strategy<Value = (SimplicialComplex, usize, Vec<bool>)> {
    (instance(), 0usize..2, proptest::collection::vec(any::<bool>(), 64))
        .prop_map(|(i, d, bits): (Instance, usize, Vec<bool>)| (i.f.source, d, bits))
}

pub fn coboundary_squares_to_zero((k, d, bits): (SimplicialComplex, usize, Vec<bool>)) -> Result<(), TestCaseError> {
    let n = k.count(d);
    let c = Cocycle {
        dim: d,
        support: BitVec::from_indices(n, (0..n).filter(|&i| bits[i % bits.len()])),
    };
    let chain = ChainComplex::new(&k);
    let dc = Cocycle {
        dim: d + 1,
        support: chain.coboundary(&c),
    };
    prop_assert!(chain.coboundary(&dc).is_zero());
    Ok(())
}

pub fn witness_case() -> impl Strategy<Value = (usize, usize, usize)> {
    (1usize..=4, 3usize..=6, 2usize..=4)
}

pub fn witness_antipodal((p, q, k): (usize, usize, usize)) -> Result<(), TestCaseError> {
    let d = double_point_complex(&cycle_cover(p, q).unwrap()).map_err(fail)?;
    if d.complex.num_vertices() == 0 {
        return Ok(());
    }
    let w = construct_equivariant_witness(&d, k).map_err(fail)?;
    for (v, &t) in d.involution.iter().enumerate() {
        let neg: Vec<Rational> = w.vectors[v].iter().map(|x| -x).collect();
        prop_assert_eq!(&w.vectors[t], &neg);
    }
    prop_assert_eq!(w.certificates.len(), d.complex.maximal_simplices().len());
    prop_assert!(yang_index(&d).map_err(fail)? < k);
    Ok(())
}

/// Points in ℚᵐ, biased toward degenerate configurations, with an integer
/// matrix of determinant ±1 (a product of elementary moves) and a shift.
pub fn affine_case() -> impl Strategy<Value = (Vec<Vec<Rational>>, Vec<Vec<Rational>>, Vec<Rational>)> {
    (1usize..=3, 1usize..=6, any::<bool>()).prop_flat_map(|(m, n, collapse)| {
        let point = proptest::collection::vec(-3i64..=3, m);
        (
            proptest::collection::vec(point, n),
            proptest::collection::vec((0..m, 0..m, -2i64..=2), 0..6),
            proptest::collection::vec((-5i64..=5, 1i64..=4), m),
        )
            .prop_map(move |(pts, moves, shift)| {
                let mut pts: Vec<Vec<Rational>> = pts.into_iter().map(|p| p.into_iter().map(int).collect()).collect();
                if collapse && pts.len() >= 3 {
                    // put the third point on the line through the first two
                    pts[2] = pts[0].iter().zip(&pts[1]).map(|(a, b)| a * int(2) - b).collect();
                }
                let mut a: Vec<Vec<Rational>> = (0..m)
                    .map(|i| (0..m).map(|j| int(i64::from(i == j))).collect())
                    .collect();
                for (i, j, c) in moves {
                    if i != j {
                        let row = a[j].clone();
                        for (x, y) in a[i].iter_mut().zip(&row) {
                            *x += int(c) * y;
                        }
                    } else {
                        a.swap(i, (i + 1) % m);
                    }
                }
                (pts, a, shift.into_iter().map(|(p, q)| frac(p, q)).collect())
            })
    })
}

pub fn general_position_affine_invariant(
    (pts, a, b): (Vec<Vec<Rational>>, Vec<Vec<Rational>>, Vec<Rational>),
) -> Result<(), TestCaseError> {
    let moved: Vec<Vec<Rational>> = pts
        .iter()
        .map(|p| {
            a.iter()
                .zip(&b)
                .map(|(row, s)| row.iter().zip(p).fold(s.clone(), |acc, (x, y)| acc + x * y))
                .collect()
        })
        .collect();
    prop_assert_eq!(is_general_position_config(&pts), is_general_position_config(&moved));
    Ok(())
}

/// A linear map from a random complex into one large triangle, with a
/// perturbation direction.
pub fn g_phi_case() -> impl Strategy<Value = (SimplicialComplex, Vec<Vec<Rational>>, Vec<(i64, i64)>)> {
    (
        instance(),
        proptest::collection::vec((1i64..=40, 1i64..=40), 12),
        proptest::collection::vec((-3i64..=3, -3i64..=3), 12),
    )
        .prop_map(|(i, vals, dirs)| {
            let n = i.f.source.num_vertices();
            let values = vals[..n].iter().map(|&(x, y)| vec![int(x), int(y)]).collect();
            (i.f.source, values, dirs[..n].to_vec())
        })
}

pub fn g_phi_open(
    (k, values, dirs): (SimplicialComplex, Vec<Vec<Rational>>, Vec<(i64, i64)>),
) -> Result<(), TestCaseError> {
    let l = GeometricComplex::new(
        SimplicialComplex::from_generators(vec!["p".into(), "q".into(), "r".into()], vec![vec![0, 1, 2]]).unwrap(),
        vec![vec![int(0), int(0)], vec![int(100), int(0)], vec![int(0), int(100)]],
    )
    .unwrap();
    let f = LinearMapToRm::new(k.clone(), 2, values.clone()).map_err(fail)?;
    if !in_g_phi(&f, &l).map_err(fail)? {
        return Ok(());
    }
    for t in [12u32, 20, 28] {
        let eps = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(t));
        let moved = values
            .iter()
            .zip(&dirs)
            .map(|(v, &(a, b))| vec![&v[0] + &eps * int(a), &v[1] + &eps * int(b)])
            .collect();
        let g = LinearMapToRm::new(k.clone(), 2, moved).map_err(fail)?;
        prop_assert!(in_g_phi(&g, &l).map_err(fail)?, "lost general position at 2^-{}", t);
    }
    Ok(())
}

pub fn round_trip_case() -> impl Strategy<Value = (Instance, Vec<(i64, i64)>, bool)> {
    (
        instance(),
        proptest::collection::vec((-50i64..=50, 1i64..=9), 64),
        any::<bool>(),
    )
}

pub fn files_round_trip((inst, qs, subdivide): (Instance, Vec<(i64, i64)>, bool)) -> Result<(), TestCaseError> {
    let mut q = qs.iter().cycle().map(|&(a, b)| frac(a, b));
    let f = inst.f;
    let target_coords = Some(
        (0..f.target.num_vertices())
            .map(|_| vec![q.next().unwrap(), q.next().unwrap()])
            .collect(),
    );
    let bundle = MapBundle {
        map: f.clone(),
        source_coords: None,
        target_coords,
    };
    let text = write_map(&bundle);
    let parsed = parse_map(&text).map_err(fail)?;
    prop_assert_eq!(&parsed, &bundle);
    prop_assert_eq!(write_map(&parsed), text);
    let rec = if subdivide {
        barycentric_subdivide(&f.source).map_err(fail)?
    } else {
        prem_core::subdivision::SubdivisionRecord::identity(&f.source)
    };
    let values = (0..rec.child.num_vertices())
        .map(|_| vec![q.next().unwrap(), q.next().unwrap()])
        .collect();
    let g = Lift::new(rec, values, 2).map_err(fail)?;
    let text = write_lift(&g);
    let back = parse_lift(&text, &f.source).map_err(fail)?;
    prop_assert_eq!(&back, &g);
    prop_assert_eq!(write_lift(&back), text);
    Ok(())
}
