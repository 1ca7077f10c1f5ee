//! General-position tests for linear maps `K -> ℝᵐ` and a stability report
//! for maps to the line.

use std::collections::BTreeSet;

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::{Simplex, SimplicialComplex};
use crate::error::{PremError, Result};
use crate::geometry::GeometricComplex;
use crate::map::{BaryPoint, SemiLinearMap};
use crate::rational::{affinely_independent, barycentric, Rational};

/// Vertex values of a map `K -> ℝᵐ`, affine on each simplex.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearMapToRm {
    pub source: SimplicialComplex,
    pub m: usize,
    pub values: Vec<Vec<Rational>>,
}

impl LinearMapToRm {
    pub fn new(source: SimplicialComplex, m: usize, values: Vec<Vec<Rational>>) -> Result<Self> {
        if values.len() != source.num_vertices() || values.iter().any(|v| v.len() != m) {
            return Err(PremError::Mismatch(format!("need one vector in Q^{m} per vertex")));
        }
        Ok(Self { source, m, values })
    }
}

fn subsets_independent(points: &[Vec<Rational>], size: usize, start: usize, chosen: &mut Vec<usize>) -> bool {
    if chosen.len() == size {
        let pts: Vec<Vec<Rational>> = chosen.iter().map(|&i| points[i].clone()).collect();
        return affinely_independent(&pts);
    }
    let need = size - chosen.len();
    for i in start..=points.len() - need {
        chosen.push(i);
        let ok = subsets_independent(points, size, i + 1, chosen);
        chosen.pop();
        if !ok {
            return false;
        }
    }
    true
}

/// Every subset of at most `m + 1` points is affinely independent, where
/// `m` is the dimension of the ambient space. Subsets of an independent set
/// are independent, so only subsets of size `min(n, m + 1)` are examined.
pub fn is_general_position_config(points: &[Vec<Rational>]) -> bool {
    let Some(first) = points.first() else { return true };
    let size = points.len().min(first.len() + 1);
    subsets_independent(points, size, 0, &mut Vec::new())
}

/// The smallest face of `l` containing `y`, as barycentric coordinates.
pub fn locate(l: &GeometricComplex, y: &[Rational]) -> Option<BaryPoint> {
    for s in l.complex.maximal_simplices() {
        let verts: Vec<Vec<Rational>> = s.iter().map(|&v| l.coords[v].clone()).collect();
        if let Some(w) = barycentric(&verts, y) {
            if w.iter().all(|x| *x >= Rational::zero()) {
                return Some(s.iter().copied().zip(w).filter(|(_, x)| !x.is_zero()).collect());
            }
        }
    }
    None
}

/// The semi-linear map `K -> L` given by locating each vertex value in `l`.
pub fn as_semi_linear(f: &LinearMapToRm, l: &GeometricComplex) -> Result<SemiLinearMap> {
    if l.ambient_dim() != f.m {
        return Err(PremError::Mismatch("target realization has the wrong dimension".into()));
    }
    let images = f
        .values
        .iter()
        .enumerate()
        .map(|(v, y)| locate(l, y).ok_or_else(|| PremError::PointOutsideTarget(f.source.label(v).to_string())))
        .collect::<Result<Vec<_>>>()?;
    SemiLinearMap::new(f.source.clone(), l.complex.clone(), images)
}

/// Membership in `G(φ)`: for every simplex σ of L, the vertices of `f⁻¹(σ)`
/// form a general-position configuration in the affine hull of σ.
pub fn in_g_phi(f: &LinearMapToRm, l: &GeometricComplex) -> Result<bool> {
    let map = as_semi_linear(f, l)?;
    // the carrier of every source simplex must exist
    map.carrier_map()?;
    let sigmas: Vec<Simplex> = l.complex.all_simplices().cloned().collect();
    Ok(sigmas.par_iter().all(|sigma| {
        let pts: Vec<Vec<Rational>> = map
            .images
            .iter()
            .filter(|p| p.keys().all(|k| sigma.contains(k)))
            .map(|p| {
                sigma[1..]
                    .iter()
                    .map(|k| p.get(k).cloned().unwrap_or_default())
                    .collect()
            })
            .collect();
        is_general_position_config(&pts)
    }))
}

/// Perturbs `points` along the moment curve by `2⁻ᵗ`, `t = 1, 2, …`, and
/// returns the first configuration in general position with its `t`.
pub fn perturb_to_general_position(points: &[Vec<Rational>], max_steps: u32) -> Option<(Vec<Vec<Rational>>, u32)> {
    if is_general_position_config(points) {
        return Some((points.to_vec(), 0));
    }
    for t in 1..=max_steps {
        let eps = Rational::new(1.into(), num_bigint::BigInt::from(2).pow(t));
        let moved: Vec<Vec<Rational>> = points
            .iter()
            .enumerate()
            .map(|(i, p)| {
                let c = Rational::from_integer((i as i64 + 1).into());
                let mut power = Rational::one();
                p.iter()
                    .map(|x| {
                        power *= &c;
                        x + &eps * &power
                    })
                    .collect()
            })
            .collect();
        if is_general_position_config(&moved) {
            return Some((moved, t));
        }
    }
    None
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum StabilityVerdict {
    Stable,
    NotStable,
    /// Every edge is embedded but two critical vertices share a value.
    Tension,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StabilityReport {
    pub embeds_all_edges: bool,
    pub critical_vertices: Vec<String>,
    pub critical_values_injective: bool,
    pub verdict: StabilityVerdict,
    pub caveat: Option<String>,
}

fn connected(link: &SimplicialComplex, verts: &BTreeSet<usize>) -> bool {
    let Some(&root) = verts.iter().next() else { return true };
    let adj = link.neighbors();
    let mut seen = BTreeSet::from([root]);
    let mut stack = vec![root];
    while let Some(v) = stack.pop() {
        for &w in &adj[v] {
            if verts.contains(&w) && seen.insert(w) {
                stack.push(w);
            }
        }
    }
    seen.len() == verts.len()
}

/// Critical-vertex test: a weak local extremum, or (in dimension at most 2)
/// an upper or lower link that is disconnected.
fn is_critical(f: &LinearMapToRm, v: usize, low_dim: bool) -> bool {
    let link = f.source.link(v);
    let here = &f.values[v][0];
    let mut up = BTreeSet::new();
    let mut down = BTreeSet::new();
    for w in 0..link.num_vertices() {
        let orig = f.source.vertex_by_label(link.label(w)).expect("link vertex");
        let x = &f.values[orig][0];
        if x > here {
            up.insert(w);
        } else if x < here {
            down.insert(w);
        }
    }
    if up.is_empty() || down.is_empty() {
        return true;
    }
    low_dim && !(connected(&link, &up) && connected(&link, &down))
}

/// Stability certificate for a linear map `K -> ℝ`.
pub fn stable_to_r_report(f: &LinearMapToRm) -> Result<StabilityReport> {
    if f.m != 1 {
        return Err(PremError::InvalidParameter(format!(
            "stability report needs m = 1, got m = {}",
            f.m
        )));
    }
    let embeds_all_edges = f.source.simplices(1).iter().all(|e| f.values[e[0]] != f.values[e[1]]);
    let low_dim = f.source.dim() <= 2;
    let critical: Vec<usize> = (0..f.source.num_vertices())
        .filter(|&v| is_critical(f, v, low_dim))
        .collect();
    let values: BTreeSet<&Rational> = critical.iter().map(|&v| &f.values[v][0]).collect();
    let critical_values_injective = values.len() == critical.len();
    let verdict = match (embeds_all_edges, critical_values_injective) {
        (false, _) => StabilityVerdict::NotStable,
        (true, true) => StabilityVerdict::Stable,
        (true, false) => StabilityVerdict::Tension,
    };
    let caveat = (!low_dim)
        .then(|| "regularity away from extrema is only decided for complexes of dimension at most 2".to_string());
    Ok(StabilityReport {
        embeds_all_edges,
        critical_vertices: critical.iter().map(|&v| f.source.label(v).to_string()).collect(),
        critical_values_injective,
        verdict,
        caveat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::complex_from_labels;
    use crate::rational::{frac, int};

    fn pts(raw: &[&[i64]]) -> Vec<Vec<Rational>> {
        raw.iter().map(|p| p.iter().map(|&x| int(x)).collect()).collect()
    }

    fn path(values: &[i64]) -> LinearMapToRm {
        let labels: Vec<String> = (0..values.len()).map(|i| format!("v{i}")).collect();
        let gens: Vec<Vec<usize>> = (1..values.len()).map(|i| vec![i - 1, i]).collect();
        let k = SimplicialComplex::from_generators(labels, gens).unwrap();
        LinearMapToRm::new(k, 1, values.iter().map(|&x| vec![int(x)]).collect()).unwrap()
    }

    #[test]
    fn general_position_examples() {
        assert!(!is_general_position_config(&pts(&[&[0, 0], &[1, 1], &[2, 2]])));
        assert!(is_general_position_config(&pts(&[&[0, 0], &[1, 0], &[1, 1], &[0, 1]])));
        assert!(!is_general_position_config(&pts(&[
            &[0, 0, 0],
            &[1, 0, 0],
            &[0, 1, 0],
            &[1, 1, 0]
        ])));
        assert!(!is_general_position_config(&pts(&[&[3, 1], &[3, 1]])));
    }

    #[test]
    fn g_phi_examples() {
        let k = complex_from_labels(&["a", "b", "c"], &[&["a", "b", "c"]]).unwrap();
        let l = GeometricComplex::new(
            complex_from_labels(&["p", "q", "r"], &[&["p", "q", "r"]]).unwrap(),
            pts(&[&[0, 0], &[4, 0], &[0, 4]]),
        )
        .unwrap();
        let f = LinearMapToRm::new(k.clone(), 2, pts(&[&[1, 1], &[2, 1], &[1, 2]])).unwrap();
        assert!(in_g_phi(&f, &l).unwrap());
        let g = LinearMapToRm::new(k.clone(), 2, pts(&[&[1, 1], &[1, 1], &[1, 2]])).unwrap();
        assert!(!in_g_phi(&g, &l).unwrap());
        let h = LinearMapToRm::new(k, 2, pts(&[&[9, 9], &[1, 1], &[1, 2]])).unwrap();
        assert!(matches!(in_g_phi(&h, &l), Err(PremError::PointOutsideTarget(_))));
    }

    #[test]
    fn repair_by_perturbation() {
        let bad = pts(&[&[0, 0], &[1, 1], &[2, 2], &[3, 3]]);
        let (good, t) = perturb_to_general_position(&bad, 20).unwrap();
        assert!(t >= 1 && is_general_position_config(&good));
        assert_eq!(good[0][0], frac(1, 1 << t));
    }

    #[test]
    fn maps_to_the_line() {
        let r = stable_to_r_report(&path(&[0, 1, 2, 3])).unwrap();
        assert_eq!(r.verdict, StabilityVerdict::Stable);
        assert_eq!(r.critical_vertices, vec!["v0", "v3"]);
        let r = stable_to_r_report(&path(&[0, 1, 1, 2])).unwrap();
        assert_eq!(r.verdict, StabilityVerdict::NotStable);
        let w = stable_to_r_report(&path(&[0, 2, 1, 2, 0])).unwrap();
        assert!(w.embeds_all_edges && !w.critical_values_injective);
        assert_eq!(w.verdict, StabilityVerdict::Tension);
        let mut two = path(&[0, 1]);
        two.m = 2;
        assert!(stable_to_r_report(&two).is_err());
    }
}
