//! Existence of equivariant maps Δ_f → S^{k−1}, explicit witnesses, the
//! projection-degree parities of invariant components, and the report
//! assembling these for a map between n-dimensional pseudomanifolds.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::cohomology::{quotient_by_involution, yang_index_of, ChainComplex, QuotientData};
use crate::complex::{boundary_faces, Simplex, SimplicialComplex};
use crate::double_point::{accepted_model, invariant_components, Component, DoublePointComplex};
use crate::error::{PremError, Result};
use crate::lp::origin_in_hull;
use crate::map::SimplicialMap;
use crate::rational::{int, rank, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Exists,
    NotExists,
    NecessaryHolds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Justification {
    DimensionBelowK,
    CupPowerNonzero,
    ManifoldCompleteObstruction,
    Mod2Only,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ObstructionVerdict {
    pub k: usize,
    pub verdict: Verdict,
    pub justification: Justification,
    pub quotient_dim: isize,
    pub yang_index: usize,
}

impl ObstructionVerdict {
    pub fn exit_code(&self) -> i32 {
        match self.verdict {
            Verdict::Exists => 0,
            Verdict::NotExists => 1,
            Verdict::NecessaryHolds => 2,
        }
    }
}

/// Closed pseudomanifold: pure, and every codimension-one face lies in
/// exactly two facets.
pub fn is_closed_pseudomanifold(c: &SimplicialComplex) -> bool {
    let n = c.dim();
    if n < 0 || !c.is_pure() {
        return n < 0;
    }
    let n = n as usize;
    if n == 0 {
        return true;
    }
    let mut counts: BTreeMap<Simplex, usize> = BTreeMap::new();
    for s in c.simplices(n) {
        for f in boundary_faces(s) {
            *counts.entry(f).or_insert(0) += 1;
        }
    }
    c.simplices(n - 1).iter().all(|f| counts.get(f) == Some(&2))
}

/// Mod-2 Betti numbers of the (d)-sphere, with S^0 having b_0 = 2.
fn sphere_betti(d: usize) -> Vec<usize> {
    if d == 0 {
        return vec![2];
    }
    let mut b = vec![0; d + 1];
    b[0] = 1;
    b[d] = 1;
    b
}

/// Closed pseudomanifold whose vertex links have the mod-2 homology of
/// spheres of the right dimension.
pub fn manifold_certificate(c: &SimplicialComplex) -> bool {
    if !is_closed_pseudomanifold(c) {
        return false;
    }
    let n = c.dim();
    if n <= 0 {
        return true;
    }
    let expected = sphere_betti(n as usize - 1);
    let cofaces = c.vertex_to_maximal();
    (0..c.num_vertices()).into_par_iter().all(|v| {
        let link = c.link_from_cofaces(v, &cofaces[v]);
        ChainComplex::new(&link).betti() == expected
    })
}

pub fn verdict_from_quotient(q: &QuotientData, k: usize) -> Result<ObstructionVerdict> {
    if k < 1 {
        return Err(PremError::InvalidParameter("k must be at least 1".into()));
    }
    let quotient_dim = q.quotient().dim();
    let yang_index = yang_index_of(q)?;
    let (verdict, justification) = if quotient_dim < k as isize {
        (Verdict::Exists, Justification::DimensionBelowK)
    } else if yang_index >= k {
        (Verdict::NotExists, Justification::CupPowerNonzero)
    } else if quotient_dim == k as isize && manifold_certificate(q.quotient()) {
        (Verdict::Exists, Justification::ManifoldCompleteObstruction)
    } else {
        (Verdict::NecessaryHolds, Justification::Mod2Only)
    };
    Ok(ObstructionVerdict {
        k,
        verdict,
        justification,
        quotient_dim,
        yang_index,
    })
}

pub fn equivariant_map_exists(d: &DoublePointComplex, k: usize) -> Result<ObstructionVerdict> {
    if k < 1 {
        return Err(PremError::InvalidParameter("k must be at least 1".into()));
    }
    verdict_from_quotient(&quotient_by_involution(d)?, k)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum NonvanishingCertificate {
    LinearlyIndependent,
    LpInfeasible,
}

/// Vectors in ℚᵏ on the vertices of Δ, antipodal under the involution and
/// with 0 outside the convex hull of every cell.
#[derive(Clone, Debug, PartialEq)]
pub struct EquivariantSphereWitness {
    pub complex: SimplicialComplex,
    pub involution: Vec<usize>,
    pub k: usize,
    pub vectors: Vec<Vec<Rational>>,
    pub certificates: Vec<(Simplex, NonvanishingCertificate)>,
}

fn moment_vector(t: i64, k: usize) -> Vec<Rational> {
    let mut v = Vec::with_capacity(k);
    let mut x = int(1);
    for _ in 0..k {
        v.push(x.clone());
        x *= int(t);
    }
    v
}

fn certify_cell(vectors: &[Vec<Rational>], cell: &[usize]) -> Option<NonvanishingCertificate> {
    let pts: Vec<Vec<Rational>> = cell.iter().map(|&v| vectors[v].clone()).collect();
    if rank(&pts) == pts.len() {
        return Some(NonvanishingCertificate::LinearlyIndependent);
    }
    origin_in_hull(&pts)
        .is_none()
        .then_some(NonvanishingCertificate::LpInfeasible)
}

/// Checks antipodality and certifies every maximal cell.
pub fn certify_witness(
    complex: &SimplicialComplex,
    involution: &[usize],
    k: usize,
    vectors: Vec<Vec<Rational>>,
) -> Result<EquivariantSphereWitness> {
    if vectors.len() != complex.num_vertices() || vectors.iter().any(|v| v.len() != k) {
        return Err(PremError::Mismatch(format!(
            "witness needs one vector in Q^{k} per vertex"
        )));
    }
    for (v, &w) in involution.iter().enumerate() {
        let neg: Vec<Rational> = vectors[v].iter().map(|x| -x).collect();
        if vectors[w] != neg {
            return Err(PremError::CertificationFailed(format!(
                "witness is not antipodal at {}",
                complex.label(v)
            )));
        }
    }
    let cells = complex.maximal_simplices();
    let results: Vec<Option<NonvanishingCertificate>> = cells.par_iter().map(|c| certify_cell(&vectors, c)).collect();
    let mut certificates = Vec::with_capacity(cells.len());
    for (c, r) in cells.into_iter().zip(results) {
        match r {
            Some(cert) => certificates.push((c, cert)),
            None => {
                return Err(PremError::CertificationFailed(format!(
                    "origin lies in the hull over cell {:?}",
                    complex.labels_of(&c)
                )))
            }
        }
    }
    Ok(EquivariantSphereWitness {
        complex: complex.clone(),
        involution: involution.to_vec(),
        k,
        vectors,
        certificates,
    })
}

/// Moment-curve vectors on orbit representatives, mirrored on the other
/// sheet. Only available when dim(Δ/t) < k.
pub fn construct_equivariant_witness(d: &DoublePointComplex, k: usize) -> Result<EquivariantSphereWitness> {
    let v = equivariant_map_exists(d, k)?;
    if v.justification != Justification::DimensionBelowK {
        return Err(PremError::Precondition(format!(
            "witness construction needs dim(quotient) < k; quotient has dimension {} and k = {k}",
            v.quotient_dim
        )));
    }
    witness_on(&d.complex, &d.involution, k)
}

pub fn witness_on(complex: &SimplicialComplex, involution: &[usize], k: usize) -> Result<EquivariantSphereWitness> {
    let n = complex.num_vertices();
    let mut param = vec![0i64; n];
    let mut next = 1i64;
    for v in 0..n {
        if v < involution[v] {
            param[v] = next;
            next += 1;
        }
    }
    let build = |param: &[i64]| -> Vec<Vec<Rational>> {
        (0..n)
            .map(|v| {
                let rep = v.min(involution[v]);
                let m = moment_vector(param[rep], k);
                if v == rep {
                    m
                } else {
                    m.iter().map(|x| -x).collect()
                }
            })
            .collect()
    };
    const RETRIES: usize = 8;
    for _ in 0..RETRIES {
        match certify_witness(complex, involution, k, build(&param)) {
            Ok(w) => return Ok(w),
            Err(PremError::CertificationFailed(_)) => {
                // re-draw the parameters of every vertex on a failing cell
                let vectors = build(&param);
                for c in complex.maximal_simplices() {
                    if certify_cell(&vectors, &c).is_none() {
                        for &v in &c {
                            param[v.min(involution[v])] = next;
                            next += 1;
                        }
                    }
                }
            }
            Err(e) => return Err(e),
        }
    }
    certify_witness(complex, involution, k, build(&param))
}

/// Parity of the number of top cells of a component lying over each top
/// simplex of K, via the first or second coordinate; must be constant.
pub fn projection_degree_parity(d: &DoublePointComplex, component: &Component, second: bool) -> Result<u8> {
    let k = &d.base_map.source;
    let n = k.dim();
    if n < 0 {
        return Ok(0);
    }
    let n = n as usize;
    let members: std::collections::HashSet<usize> = component.vertices.iter().copied().collect();
    let mut counts: BTreeMap<Simplex, usize> = k.simplices(n).iter().map(|s| (s.clone(), 0)).collect();
    for cell in d.complex.simplices(n) {
        if members.contains(&cell[0]) {
            let proj = if second { d.second(cell) } else { d.first(cell) };
            *counts.get_mut(&proj).expect("top simplex") += 1;
        }
    }
    let mut it = counts.iter();
    let Some((s0, c0)) = it.next() else { return Ok(0) };
    for (s, c) in it {
        if c % 2 != c0 % 2 {
            return Err(PremError::Precondition(format!(
                "projection parity differs over {:?} and {:?}",
                k.labels_of(s0),
                k.labels_of(s)
            )));
        }
    }
    Ok((c0 % 2) as u8)
}

#[derive(Clone, Debug, Serialize)]
pub struct ComponentReport {
    pub vertices: usize,
    pub invariant: bool,
    pub first_parity: Option<u8>,
    pub second_parity: Option<u8>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ReadingCheck {
    /// Yang index < n predicted by the parities under this reading.
    pub predicts_below_n: bool,
    pub consistent: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct CoverReport {
    pub n: usize,
    pub model_subdivisions: usize,
    pub source_closed_pseudomanifold: bool,
    pub source_betti: Vec<usize>,
    pub source_mod2_sphere: bool,
    pub components: Vec<ComponentReport>,
    pub yang_index: usize,
    pub verdict: ObstructionVerdict,
    pub dimension_condition: bool,
    pub prem_conclusion: bool,
    pub odd_reading: ReadingCheck,
    pub even_reading: ReadingCheck,
    pub supported_reading: String,
    pub notes: Vec<String>,
}

impl CoverReport {
    pub fn exit_code(&self) -> i32 {
        self.verdict.exit_code()
    }
}

/// The dimension range `2(m + k) >= 3(n + 1)` in which an equivariant map
/// on the double-point locus of a map `N^n -> M^m` yields a `k`-prem.
pub fn dimension_condition(n: usize, m: usize, k: usize) -> bool {
    2 * (m + k) >= 3 * (n + 1)
}

/// Obstruction data for a map between closed n-dimensional complexes, with
/// `k = n`: the double-point components with their projection parities, the
/// Yang index and the resulting verdict.
pub fn cover_report(f: &SimplicialMap, n: usize) -> Result<CoverReport> {
    if n < 1 {
        return Err(PremError::InvalidParameter("n must be at least 1".into()));
    }
    let (d, model_subdivisions) = accepted_model(f, 2)?;
    let k = &d.base_map.source;
    let mut notes = Vec::new();
    let source_closed_pseudomanifold = is_closed_pseudomanifold(k) && k.dim() == n as isize;
    if !source_closed_pseudomanifold {
        notes.push(format!(
            "source is not a closed {n}-dimensional pseudomanifold; parities may be ill-defined"
        ));
    }
    let source_betti = ChainComplex::new(k).betti();
    let source_mod2_sphere = source_betti == sphere_betti(n);
    if !source_mod2_sphere {
        notes.push("source is not a mod-2 homology sphere; the parity criterion is not applicable as stated".into());
    }
    let mut components = Vec::new();
    for c in invariant_components(&d) {
        let mut parity = |second| match projection_degree_parity(&d, &c, second) {
            Ok(p) => Some(p),
            Err(e) => {
                notes.push(e.to_string());
                None
            }
        };
        let first_parity = parity(false);
        let second_parity = if c.invariant { parity(true) } else { None };
        components.push(ComponentReport {
            vertices: c.vertices.len(),
            invariant: c.invariant,
            first_parity,
            second_parity,
        });
    }
    let verdict = equivariant_map_exists(&d, n)?;
    let yang_index = verdict.yang_index;
    let dimension_condition = dimension_condition(n, n, n);
    let prem_conclusion = verdict.verdict == Verdict::Exists && dimension_condition;
    if verdict.verdict == Verdict::Exists && !dimension_condition {
        notes.push(format!(
            "equivariant map exists but 2(m+k) >= 3(n+1) fails for m = k = {n}: no prem conclusion"
        ));
    }
    let invariant: Vec<&ComponentReport> = components.iter().filter(|c| c.invariant).collect();
    let below = yang_index < n;
    let all_with = |p: u8| invariant.iter().all(|c| c.first_parity == Some(p));
    let odd_reading = ReadingCheck {
        predicts_below_n: all_with(1),
        consistent: all_with(1) == below,
    };
    let even_reading = ReadingCheck {
        predicts_below_n: all_with(0),
        consistent: all_with(0) == below,
    };
    let supported_reading = match (odd_reading.consistent, even_reading.consistent) {
        (true, true) => "both",
        (true, false) => "odd",
        (false, true) => "even",
        (false, false) => "neither",
    }
    .to_string();
    Ok(CoverReport {
        n,
        model_subdivisions,
        source_closed_pseudomanifold,
        source_betti,
        source_mod2_sphere,
        components,
        yang_index,
        verdict,
        dimension_condition,
        prem_conclusion,
        odd_reading,
        even_reading,
        supported_reading,
        notes,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::double_point::double_point_complex;
    use crate::generators::cycle_cover;

    #[test]
    fn verdicts_on_covers() {
        let d = double_point_complex(&cycle_cover(3, 3).unwrap()).unwrap();
        let v = equivariant_map_exists(&d, 1).unwrap();
        assert_eq!(v.verdict, Verdict::Exists);
        assert_eq!(v.justification, Justification::ManifoldCompleteObstruction);
        let d2 = double_point_complex(&cycle_cover(2, 4).unwrap()).unwrap();
        let v2 = equivariant_map_exists(&d2, 1).unwrap();
        assert_eq!(
            (v2.verdict, v2.justification),
            (Verdict::NotExists, Justification::CupPowerNonzero)
        );
        assert!(equivariant_map_exists(&d2, 0).is_err());
        assert_eq!(
            equivariant_map_exists(&d, 2).unwrap().justification,
            Justification::DimensionBelowK
        );
    }

    #[test]
    fn witnesses() {
        let d = double_point_complex(&cycle_cover(3, 3).unwrap()).unwrap();
        let w = construct_equivariant_witness(&d, 2).unwrap();
        assert_eq!(w.vectors.len(), 18);
        assert_eq!(w.certificates.len(), 18);
        let d2 = double_point_complex(&cycle_cover(2, 4).unwrap()).unwrap();
        assert!(construct_equivariant_witness(&d2, 1).is_err());
        // every sign pattern on the invariant circle fails to certify
        for mask in 0u32..16 {
            let vecs: Vec<Vec<Rational>> = (0..8)
                .map(|v| {
                    let rep = v.min(d2.involution[v]);
                    let order = (0..8).filter(|&u| u < d2.involution[u]).position(|u| u == rep).unwrap();
                    let s = if mask >> order & 1 == 1 { 1 } else { -1 };
                    vec![int(if v == rep { s } else { -s })]
                })
                .collect();
            assert!(certify_witness(&d2.complex, &d2.involution, 1, vecs).is_err());
        }
    }

    #[test]
    fn parities() {
        let d = double_point_complex(&cycle_cover(2, 4).unwrap()).unwrap();
        let c = &invariant_components(&d)[0];
        assert_eq!(projection_degree_parity(&d, c, false).unwrap(), 1);
        assert_eq!(projection_degree_parity(&d, c, true).unwrap(), 1);
        let d = double_point_complex(&cycle_cover(3, 3).unwrap()).unwrap();
        for c in invariant_components(&d) {
            assert_eq!(projection_degree_parity(&d, &c, false).unwrap(), 1);
        }
    }

    #[test]
    fn reports_on_circles() {
        let r = cover_report(&cycle_cover(3, 3).unwrap(), 1).unwrap();
        assert_eq!(r.verdict.verdict, Verdict::Exists);
        assert!(!r.prem_conclusion);
        assert_eq!(r.supported_reading, "both");
        let r = cover_report(&cycle_cover(2, 4).unwrap(), 1).unwrap();
        assert_eq!(r.verdict.verdict, Verdict::NotExists);
        assert_eq!(r.supported_reading, "even");
    }

    #[test]
    fn manifold_checks() {
        assert!(manifold_certificate(&crate::complex::cycle(5, "c")));
        let (b, _) = crate::generators::cross_polytope(2).unwrap();
        assert!(manifold_certificate(&b));
        let path = crate::complex::complex_from_labels(&["a", "b", "c"], &[&["a", "b"], &["b", "c"]]).unwrap();
        assert!(!is_closed_pseudomanifold(&path));
    }
}
