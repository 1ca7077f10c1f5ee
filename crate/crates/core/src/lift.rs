//! Lifting a simple fold map without triple points to an embedding
//! `f × g: K -> L × ℝᵏ`.
//!
//! The construction lives on the closure Δ̄_f of the double-point complex:
//! pairs `(u, v)` with `f(u) = f(v)`, where `u = v` is allowed for vertices
//! of Σ_f. A function `φ = S + A′` on Δ̄_f is pushed to K along the second
//! projection, which is injective on Δ̄_f when there are no triple points.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::Zero;
use serde::Serialize;

use crate::complex::{Simplex, SimplicialComplex};
use crate::double_point::{double_point_complex, has_triple_points, is_simple_fold, DoublePointComplex};
use crate::error::{PremError, Result};
use crate::lp::origin_in_hull;
use crate::map::SimplicialMap;
use crate::obstruction::{certify_witness, EquivariantSphereWitness};
use crate::rational::{add, frac, rank, scale, sub, Rational};
use crate::subdivision::{subdivide_map, SubdivisionRecord};
use crate::verify::{verify_embedding, EmbeddingCertificate, Lift};

/// Δ̄_f: every pair of distinct simplices with a common image contributes the
/// cell of matched vertex pairs; shared vertices give diagonal pairs.
#[derive(Clone, Debug)]
pub struct ClosureModel {
    pub complex: SimplicialComplex,
    pub pairs: Vec<(usize, usize)>,
    pub involution: Vec<usize>,
}

impl ClosureModel {
    pub fn is_fixed(&self, v: usize) -> bool {
        self.involution[v] == v
    }

    pub fn index_of(&self, pair: (usize, usize)) -> Option<usize> {
        self.pairs.binary_search(&pair).ok()
    }
}

pub fn closure_model(f: &SimplicialMap) -> Result<ClosureModel> {
    f.require_non_degenerate()?;
    let mut groups: BTreeMap<Simplex, Vec<Simplex>> = BTreeMap::new();
    for s in f.source.all_simplices() {
        groups.entry(f.image(s)).or_default().push(s.clone());
    }
    let mut cells: Vec<Vec<(usize, usize)>> = Vec::new();
    let mut pairs: BTreeSet<(usize, usize)> = BTreeSet::new();
    for g in groups.values().filter(|g| g.len() > 1) {
        for s in g {
            for t in g {
                if s == t {
                    continue;
                }
                let cell: Vec<(usize, usize)> = s
                    .iter()
                    .map(|&u| {
                        (
                            u,
                            *t.iter()
                                .find(|&&v| f.vertex_map[v] == f.vertex_map[u])
                                .expect("same image"),
                        )
                    })
                    .collect();
                pairs.extend(cell.iter().copied());
                cells.push(cell);
            }
        }
    }
    let pairs: Vec<(usize, usize)> = pairs.into_iter().collect();
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let labels = pairs
        .iter()
        .map(|&(u, v)| format!("{}~{}", f.source.label(u), f.source.label(v)))
        .collect();
    let complex = SimplicialComplex::from_generators(
        labels,
        cells.iter().map(|c| c.iter().map(|p| index[p]).collect::<Simplex>()),
    )?;
    let involution = pairs.iter().map(|&(u, v)| index[&(v, u)]).collect();
    Ok(ClosureModel {
        complex,
        pairs,
        involution,
    })
}

/// An equivariant vertex assignment whose linear extension vanishes exactly
/// on the fixed subcomplex.
#[derive(Clone, Debug)]
pub struct IsovariantMap {
    pub complex: SimplicialComplex,
    pub involution: Vec<usize>,
    pub values: Vec<Vec<Rational>>,
}

/// Certifies that the linear extension of `values` is isovariant: each
/// simplex is a join S * T of its fixed part S and free part T, and the
/// values on T keep 0 outside their convex hull. The input is already PL on
/// the given triangulation, so no further subdivision is made; a failing
/// simplex is returned for the caller to refine.
pub fn isovariant_pl_approximation(
    complex: &SimplicialComplex,
    involution: &[usize],
    values: &[Vec<Rational>],
) -> Result<IsovariantMap> {
    for (v, &w) in involution.iter().enumerate() {
        let neg: Vec<Rational> = values[v].iter().map(|x| -x).collect();
        if values[w] != neg {
            return Err(PremError::Precondition(format!(
                "values not equivariant at {}",
                complex.label(v)
            )));
        }
        if v == w && values[v].iter().any(|x| !x.is_zero()) {
            return Err(PremError::Precondition(format!(
                "nonzero value at fixed vertex {}",
                complex.label(v)
            )));
        }
    }
    for s in complex.maximal_simplices() {
        let free: Vec<Vec<Rational>> = s
            .iter()
            .filter(|&&v| involution[v] != v)
            .map(|&v| values[v].clone())
            .collect();
        if free.is_empty() {
            continue;
        }
        if rank(&free) < free.len() && origin_in_hull(&free).is_some() {
            return Err(PremError::CertificationFailed(format!(
                "linear extension vanishes off the fixed set on {:?}",
                complex.labels_of(&s)
            )));
        }
    }
    Ok(IsovariantMap {
        complex: complex.clone(),
        involution: involution.to_vec(),
        values: values.to_vec(),
    })
}

/// Prescribed lift on a subcomplex N⋆ of K, a union of fibers of f.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct BoundaryData {
    pub values: BTreeMap<usize, Vec<Rational>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HomotopyCertificate {
    Certified,
    Inconclusive,
}

#[derive(Clone, Debug)]
pub struct LiftResult {
    pub lift: Lift,
    pub certificate: EmbeddingCertificate,
    pub homotopy: HomotopyCertificate,
    pub retries: usize,
}

fn positive_multiple(a: &[Rational], w: &[Rational]) -> bool {
    let Some(i) = w.iter().position(|x| !x.is_zero()) else {
        return false;
    };
    let c = &a[i] / &w[i];
    c > Rational::zero() && a.iter().zip(w).all(|(x, y)| *x == &c * y)
}

/// Straight-line homotopy from ẽ(u,v) = g(v) − g(u) to α misses 0 on
/// every cell of Δ.
fn homotopy_check(d: &DoublePointComplex, alpha: &[Vec<Rational>], g: &[Vec<Rational>]) -> HomotopyCertificate {
    let ok = d.complex.maximal_simplices().iter().all(|cell| {
        let mut pts = Vec::new();
        for &p in cell {
            let (u, v) = d.pairs[p];
            pts.push(sub(&g[v], &g[u]));
            pts.push(alpha[p].clone());
        }
        origin_in_hull(&pts).is_none()
    });
    if ok {
        HomotopyCertificate::Certified
    } else {
        HomotopyCertificate::Inconclusive
    }
}

pub fn construct_lift_3ptfree(
    f: &SimplicialMap,
    alpha: &EquivariantSphereWitness,
    boundary: &BoundaryData,
) -> Result<LiftResult> {
    construct(f, alpha, boundary, 1)
}

fn construct(
    f: &SimplicialMap,
    alpha: &EquivariantSphereWitness,
    boundary: &BoundaryData,
    retries_left: usize,
) -> Result<LiftResult> {
    f.require_non_degenerate()?;
    if let Some([a, b, c]) = has_triple_points(f)? {
        return Err(PremError::TriplePointsPresent(format!(
            "{:?}, {:?} and {:?} share an image",
            f.source.labels_of(&a),
            f.source.labels_of(&b),
            f.source.labels_of(&c)
        )));
    }
    if !is_simple_fold(f)? {
        return Err(PremError::NotSimpleFold("a double point meets the fold set".into()));
    }
    let k = alpha.k;
    let d = double_point_complex(f)?;
    if alpha.complex != d.complex || alpha.involution != d.involution {
        return Err(PremError::Mismatch(
            "witness is not defined on the double-point complex of this map".into(),
        ));
    }
    check_boundary(f, boundary, k)?;
    let closure = closure_model(f)?;
    let zero = vec![Rational::zero(); k];
    let half = frac(1, 2);

    // S and A on Δ̄_f; the radius a is 1 off the diagonal and 0 on it
    let mut s_vals = Vec::with_capacity(closure.pairs.len());
    let mut a_vals = Vec::with_capacity(closure.pairs.len());
    for &(u, v) in &closure.pairs {
        let star = (boundary.values.get(&u), boundary.values.get(&v));
        let (s, a) = match star {
            (Some(eu), Some(ev)) => {
                let a = if u == v {
                    zero.clone()
                } else {
                    scale(&sub(ev, eu), &half)
                };
                if u != v {
                    let p = d.pairs.binary_search(&(u, v)).expect("double point");
                    if !positive_multiple(&alpha.vectors[p], &a) {
                        return Err(PremError::Precondition(format!(
                            "witness does not extend the prescribed lift at {}",
                            d.pair_id(p)
                        )));
                    }
                }
                (scale(&add(eu, ev), &half), a)
            }
            _ if u == v => (zero.clone(), zero.clone()),
            _ => {
                let p = d.pairs.binary_search(&(u, v)).expect("double point");
                (zero.clone(), alpha.vectors[p].clone())
            }
        };
        s_vals.push(s);
        a_vals.push(a);
    }
    let iso = isovariant_pl_approximation(&closure.complex, &closure.involution, &a_vals)?;

    // e₁(v) = φ(u, v) along the second projection; elsewhere the prescribed
    // value or 0
    let n = f.source.num_vertices();
    let mut values: Vec<Vec<Rational>> = (0..n)
        .map(|v| boundary.values.get(&v).cloned().unwrap_or_else(|| zero.clone()))
        .collect();
    for (i, &(_, v)) in closure.pairs.iter().enumerate() {
        values[v] = add(&s_vals[i], &iso.values[i]);
    }
    let lift = Lift::new(SubdivisionRecord::identity(&f.source), values, k)?;
    let certificate = verify_embedding(f, &lift)?;
    if certificate.verdict {
        let homotopy = homotopy_check(&d, &alpha.vectors, &lift.values);
        return Ok(LiftResult {
            lift,
            certificate,
            homotopy,
            retries: 0,
        });
    }
    if retries_left == 0 {
        let detail = certificate
            .failures
            .first()
            .map(|p| format!("{:?} meets {:?}", p.sigma, p.tau))
            .unwrap_or_else(|| "a simplex is degenerate".into());
        return Err(PremError::CertificationFailed(format!(
            "lift is not an embedding: {detail}"
        )));
    }
    retry_subdivided(f, &closure, &iso.values, boundary, k, retries_left - 1)
}

fn check_boundary(f: &SimplicialMap, boundary: &BoundaryData, k: usize) -> Result<()> {
    for (&v, e) in &boundary.values {
        if e.len() != k {
            return Err(PremError::Mismatch(format!(
                "prescribed value at {} has wrong length",
                f.source.label(v)
            )));
        }
    }
    for fiber in f.fibers() {
        let inside = fiber.iter().filter(|v| boundary.values.contains_key(v)).count();
        if inside != 0 && inside != fiber.len() {
            return Err(PremError::Precondition(
                "prescribed subcomplex is not a union of fibers".into(),
            ));
        }
        if inside > 1 {
            let vals: BTreeSet<&Vec<Rational>> = fiber.iter().map(|v| &boundary.values[v]).collect();
            if vals.len() != fiber.len() {
                return Err(PremError::Precondition("prescribed lift is not injective".into()));
            }
        }
    }
    Ok(())
}

/// One barycentric subdivision of f, with the witness and prescribed values
/// carried to barycenters by averaging.
fn retry_subdivided(
    f: &SimplicialMap,
    closure: &ClosureModel,
    a_vals: &[Vec<Rational>],
    boundary: &BoundaryData,
    k: usize,
    retries_left: usize,
) -> Result<LiftResult> {
    let (sf, sk, _) = subdivide_map(f)?;
    let d2 = double_point_complex(&sf)?;
    let simplex_of: Vec<Simplex> = sk.vertex_coords.iter().map(|p| p.keys().copied().collect()).collect();
    let average = |cell: &[usize], vals: &[Vec<Rational>]| -> Vec<Rational> {
        let w = Rational::new(1.into(), (cell.len() as i64).into());
        cell.iter()
            .fold(vec![Rational::zero(); k], |acc, &i| add(&acc, &scale(&vals[i], &w)))
    };
    let mut vectors = Vec::with_capacity(d2.pairs.len());
    for &(a, b) in &d2.pairs {
        let (s, t) = (&simplex_of[a], &simplex_of[b]);
        let cell: Vec<usize> = s
            .iter()
            .map(|&u| {
                let v = *t
                    .iter()
                    .find(|&&v| f.vertex_map[v] == f.vertex_map[u])
                    .expect("same image");
                closure.index_of((u, v)).expect("closure pair")
            })
            .collect();
        vectors.push(average(&cell, a_vals));
    }
    let alpha2 = certify_witness(&d2.complex, &d2.involution, k, vectors)?;
    let mut boundary2 = BoundaryData::default();
    for (i, s) in simplex_of.iter().enumerate() {
        if s.iter().all(|v| boundary.values.contains_key(v)) {
            let w = Rational::new(1.into(), (s.len() as i64).into());
            let val = s.iter().fold(vec![Rational::zero(); k], |acc, v| {
                add(&acc, &scale(&boundary.values[v], &w))
            });
            boundary2.values.insert(i, val);
        }
    }
    let inner = construct(&sf, &alpha2, &boundary2, retries_left)?;
    let lift = Lift::new(sk.compose(&inner.lift.subdivision)?, inner.lift.values, k)?;
    let certificate = verify_embedding(f, &lift)?;
    if !certificate.verdict {
        return Err(PremError::Internal(
            "subdivided lift fails verification against the original map".into(),
        ));
    }
    Ok(LiftResult {
        lift,
        certificate,
        homotopy: inner.homotopy,
        retries: inner.retries + 1,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle_cover, figure_eight, fold_path};
    use crate::obstruction::{construct_equivariant_witness, witness_on};
    use crate::rational::int;

    #[test]
    fn figure_eight_lift() {
        let (f, _) = figure_eight();
        let d = double_point_complex(&f).unwrap();
        let alpha = construct_equivariant_witness(&d, 1).unwrap();
        let r = construct_lift_3ptfree(&f, &alpha, &BoundaryData::default()).unwrap();
        assert!(r.certificate.verdict);
        assert_eq!(r.homotopy, HomotopyCertificate::Certified);
        // e₁(y) − e₁(x) = A(x,y) − A(y,x) at every double point
        for (p, &(u, v)) in d.pairs.iter().enumerate() {
            let lhs = sub(&r.lift.values[v], &r.lift.values[u]);
            let rhs = sub(&alpha.vectors[p], &alpha.vectors[d.involution[p]]);
            assert_eq!(lhs, rhs);
        }
    }

    #[test]
    fn fold_lift() {
        let f = fold_path();
        let c = closure_model(&f).unwrap();
        assert_eq!(c.complex.f_vector(), vec![3, 2]);
        assert!(c.is_fixed(c.index_of((1, 1)).unwrap()));
        let d = double_point_complex(&f).unwrap();
        let alpha = witness_on(&d.complex, &d.involution, 1).unwrap();
        let r = construct_lift_3ptfree(&f, &alpha, &BoundaryData::default()).unwrap();
        assert!(r.certificate.verdict);
        assert_eq!(r.lift.values[1], vec![int(0)]);
    }

    #[test]
    fn cone_is_isovariant() {
        let cone = crate::complex::complex_from_labels(&["+", "-", "o"], &[&["+", "o"], &["-", "o"]]).unwrap();
        let m = isovariant_pl_approximation(&cone, &[1, 0, 2], &[vec![int(1)], vec![int(-1)], vec![int(0)]]).unwrap();
        assert_eq!(m.values[2], vec![int(0)]);
        let bad = crate::complex::complex_from_labels(&["+", "-"], &[&["+", "-"]]).unwrap();
        assert!(isovariant_pl_approximation(&bad, &[1, 0], &[vec![int(1)], vec![int(-1)]]).is_err());
    }

    #[test]
    fn triple_cover_refused() {
        let f = cycle_cover(3, 3).unwrap();
        let d = double_point_complex(&f).unwrap();
        let alpha = witness_on(&d.complex, &d.involution, 2).unwrap();
        let r = construct_lift_3ptfree(&f, &alpha, &BoundaryData::default());
        assert!(matches!(r, Err(PremError::TriplePointsPresent(_))));
    }

    #[test]
    fn embedding_gets_zero_lift() {
        let k = crate::complex::cycle(4, "a");
        let f = SimplicialMap::new(k.clone(), k, vec![0, 1, 2, 3]).unwrap();
        let d = double_point_complex(&f).unwrap();
        let alpha = witness_on(&d.complex, &d.involution, 1).unwrap();
        let r = construct_lift_3ptfree(&f, &alpha, &BoundaryData::default()).unwrap();
        assert!(r.lift.values.iter().all(|v| v[0].is_zero()));
        assert!(r.certificate.verdict);
    }

    #[test]
    fn prescribed_values_are_kept() {
        let (f, _) = figure_eight();
        let d = double_point_complex(&f).unwrap();
        let mut boundary = BoundaryData::default();
        boundary.values.insert(0, vec![int(-3)]);
        boundary.values.insert(4, vec![int(5)]);
        let p = d.pairs.binary_search(&(0, 4)).unwrap();
        let mut vecs = vec![vec![int(0)]; 2];
        vecs[p] = vec![int(2)];
        vecs[d.involution[p]] = vec![int(-2)];
        let alpha = certify_witness(&d.complex, &d.involution, 1, vecs).unwrap();
        let r = construct_lift_3ptfree(&f, &alpha, &boundary).unwrap();
        assert_eq!(r.lift.values[0], vec![int(-3)]);
        assert_eq!(r.lift.values[4], vec![int(5)]);
    }
}
