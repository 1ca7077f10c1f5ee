//! The double-point complex Δ_f of a non-degenerate simplicial map, with its
//! swap involution, and the fold/triple-point tests built on the same
//! enumeration of simplices with a common image.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;

use crate::complex::{all_faces, Simplex, SimplicialComplex};
use crate::error::{PremError, Result};
use crate::map::SimplicialMap;
use crate::subdivision::subdivide_map;

#[derive(Clone, Debug)]
pub struct DoublePointComplex {
    pub base_map: SimplicialMap,
    pub complex: SimplicialComplex,
    /// Vertex `i` of `complex` is the ordered pair `pairs[i]` of K-vertices.
    pub pairs: Vec<(usize, usize)>,
    pub involution: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<usize>,
    pub invariant: bool,
}

/// Source simplices grouped by their image, groups in image order.
fn fibers_by_image(f: &SimplicialMap) -> BTreeMap<Simplex, Vec<Simplex>> {
    let mut groups: BTreeMap<Simplex, Vec<Simplex>> = BTreeMap::new();
    for s in f.source.all_simplices() {
        groups.entry(f.image(s)).or_default().push(s.clone());
    }
    groups
}

fn disjoint(a: &[usize], b: &[usize]) -> bool {
    a.iter().all(|v| !b.contains(v))
}

/// Pairs up the vertices of σ and τ having the same image.
fn matching(f: &SimplicialMap, s: &[usize], t: &[usize]) -> Vec<(usize, usize)> {
    s.iter()
        .map(|&u| {
            let v = *t
                .iter()
                .find(|&&v| f.vertex_map[v] == f.vertex_map[u])
                .expect("equal images");
            (u, v)
        })
        .collect()
}

pub fn double_point_complex(f: &SimplicialMap) -> Result<DoublePointComplex> {
    f.require_non_degenerate()?;
    let groups = fibers_by_image(f);
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    for fiber in f.fibers() {
        for &u in &fiber {
            for &v in &fiber {
                if u != v {
                    pairs.push((u, v));
                }
            }
        }
    }
    pairs.sort_unstable();
    let index: HashMap<(usize, usize), usize> = pairs.iter().enumerate().map(|(i, &p)| (p, i)).collect();
    let cells: Vec<Simplex> = groups
        .par_iter()
        .filter(|(img, g)| img.len() > 1 && g.len() > 1)
        .flat_map_iter(|(_, g)| {
            let mut out = Vec::new();
            for s in g {
                for t in g {
                    if s != t && disjoint(s, t) {
                        let mut cell: Simplex = matching(f, s, t).iter().map(|p| index[p]).collect();
                        cell.sort_unstable();
                        out.push(cell);
                    }
                }
            }
            out
        })
        .collect();
    let labels = pairs
        .iter()
        .map(|&(u, v)| format!("{}~{}", f.source.label(u), f.source.label(v)))
        .collect();
    let complex = SimplicialComplex::from_generators(labels, cells)?;
    let involution = pairs.iter().map(|&(u, v)| index[&(v, u)]).collect();
    Ok(DoublePointComplex {
        base_map: f.clone(),
        complex,
        pairs,
        involution,
    })
}

impl DoublePointComplex {
    /// First-coordinate simplex of a cell.
    pub fn first(&self, cell: &[usize]) -> Simplex {
        let mut s: Simplex = cell.iter().map(|&i| self.pairs[i].0).collect();
        s.sort_unstable();
        s
    }

    pub fn second(&self, cell: &[usize]) -> Simplex {
        let mut s: Simplex = cell.iter().map(|&i| self.pairs[i].1).collect();
        s.sort_unstable();
        s
    }

    pub fn apply_involution(&self, cell: &[usize]) -> Simplex {
        let mut s: Simplex = cell.iter().map(|&i| self.involution[i]).collect();
        s.sort_unstable();
        s
    }

    pub fn pair_id(&self, i: usize) -> &str {
        self.complex.label(i)
    }

    pub fn components(&self) -> (usize, Vec<usize>) {
        self.complex.vertex_components()
    }

    /// Number of cells lying over each base simplex of L.
    pub fn cells_over(&self) -> BTreeMap<Simplex, usize> {
        let mut out = BTreeMap::new();
        for c in self.complex.all_simplices() {
            let img = self.base_map.image(&self.first(c));
            *out.entry(img).or_insert(0) += 1;
        }
        out
    }

    /// Checks the structural invariants: the involution is a free simplicial
    /// automorphism of order 2 and every cell pairs disjoint simplices with a
    /// common image.
    pub fn check(&self) -> Result<()> {
        for (i, &j) in self.involution.iter().enumerate() {
            if j == i || self.involution[j] != i {
                return Err(PremError::Internal(format!("involution broken at {}", self.pair_id(i))));
            }
        }
        let f = &self.base_map;
        for c in self.complex.all_simplices() {
            let (s, t) = (self.first(c), self.second(c));
            let ok = s.len() == c.len()
                && t.len() == c.len()
                && f.source.contains(&s)
                && f.source.contains(&t)
                && disjoint(&s, &t)
                && f.image(&s) == f.image(&t)
                && self.complex.contains(&self.apply_involution(c));
            if !ok {
                return Err(PremError::Internal(format!("bad cell {:?}", self.complex.labels_of(c))));
            }
        }
        Ok(())
    }
}

/// For every pair of distinct vertices with a common image the closed stars
/// are disjoint.
pub fn check_star_condition(f: &SimplicialMap) -> bool {
    let adj = f.source.neighbors();
    f.fibers().iter().all(|fiber| {
        let stars: Vec<BTreeSet<usize>> = fiber.iter().map(|&u| f.source.closed_star_vertices(u, &adj)).collect();
        (0..stars.len()).all(|i| (i + 1..stars.len()).all(|j| stars[i].is_disjoint(&stars[j])))
    })
}

/// The double-point complex of `f`, or of its barycentric subdivision
/// (at most `max_rounds` times) once the star condition holds. Returns the
/// model and the number of subdivisions used.
pub fn accepted_model(f: &SimplicialMap, max_rounds: usize) -> Result<(DoublePointComplex, usize)> {
    f.require_non_degenerate()?;
    let mut current = f.clone();
    for round in 0..=max_rounds {
        if check_star_condition(&current) {
            return Ok((double_point_complex(&current)?, round));
        }
        if round < max_rounds {
            current = subdivide_map(&current)?.0;
        }
    }
    Err(PremError::ModelInvalid(format!(
        "star condition still fails after {max_rounds} barycentric subdivisions"
    )))
}

/// Three distinct simplices with a common image, if any. Their relative
/// interiors are disjoint, so every point of the common image has three
/// distinct preimages. Higher-dimensional witnesses are preferred.
pub fn has_triple_points(f: &SimplicialMap) -> Result<Option<[Simplex; 3]>> {
    f.require_non_degenerate()?;
    let groups = fibers_by_image(f);
    let best = groups
        .iter()
        .filter(|(_, g)| g.len() >= 3)
        .max_by_key(|(img, _)| (img.len(), std::cmp::Reverse(*img)));
    Ok(best.map(|(_, g)| [g[0].clone(), g[1].clone(), g[2].clone()]))
}

/// Simplices ρ lying in two distinct simplices with the same image. For a
/// non-degenerate map the vertex matching between such simplices fixes ρ.
pub fn sigma_set(f: &SimplicialMap) -> Result<BTreeSet<Simplex>> {
    f.require_non_degenerate()?;
    let mut out = BTreeSet::new();
    for g in fibers_by_image(f).values().filter(|g| g.len() >= 2) {
        for a in 0..g.len() {
            for b in a + 1..g.len() {
                let common: Simplex = g[a].iter().copied().filter(|v| g[b].contains(v)).collect();
                if !common.is_empty() {
                    out.extend(all_faces(&common));
                }
            }
        }
    }
    Ok(out)
}

/// No double point has a coordinate in Σ_f.
pub fn is_simple_fold(f: &SimplicialMap) -> Result<bool> {
    let sigma: BTreeSet<usize> = sigma_set(f)?.iter().flatten().copied().collect();
    Ok(f.fibers()
        .iter()
        .all(|fiber| fiber.len() < 2 || fiber.iter().all(|v| !sigma.contains(v))))
}

pub fn invariant_components(d: &DoublePointComplex) -> Vec<Component> {
    let (count, labels) = d.components();
    let mut members = vec![Vec::new(); count];
    for (v, &c) in labels.iter().enumerate() {
        members[c].push(v);
    }
    members
        .into_iter()
        .map(|vertices| {
            let c = labels[vertices[0]];
            let invariant = labels[d.involution[vertices[0]]] == c;
            Component { vertices, invariant }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::{complex_from_labels, cycle};

    fn cover(p: usize, q: usize) -> SimplicialMap {
        SimplicialMap::new(cycle(p * q, "x"), cycle(q, "y"), (0..p * q).map(|i| i % q).collect()).unwrap()
    }

    #[test]
    fn triple_cover_of_triangle() {
        let d = double_point_complex(&cover(3, 3)).unwrap();
        d.check().unwrap();
        assert_eq!(d.complex.f_vector(), vec![18, 18]);
        let comps = invariant_components(&d);
        assert_eq!(comps.len(), 2);
        assert!(comps.iter().all(|c| !c.invariant));
        assert!(check_star_condition(&d.base_map));
        for (_, n) in d.cells_over() {
            assert_eq!(n, 6);
        }
    }

    #[test]
    fn double_cover_is_one_invariant_circle() {
        // brute force: pairs (i, i+4 mod 8), edges between (i,i+4) and (i+1,i+5)
        let d = double_point_complex(&cover(2, 4)).unwrap();
        assert_eq!(d.complex.f_vector(), vec![8, 8]);
        for i in 0..8 {
            let a = d.complex.vertex_by_label(&format!("x{}~x{}", i, (i + 4) % 8)).unwrap();
            let b = d
                .complex
                .vertex_by_label(&format!("x{}~x{}", (i + 1) % 8, (i + 5) % 8))
                .unwrap();
            assert!(d.complex.contains(&[a.min(b), a.max(b)]));
        }
        let comps = invariant_components(&d);
        assert_eq!(comps.len(), 1);
        assert!(comps[0].invariant);
        assert!(check_star_condition(&d.base_map));
    }

    #[test]
    fn identity_has_empty_model() {
        let k = cycle(5, "a");
        let f = SimplicialMap::new(k.clone(), k, (0..5).collect()).unwrap();
        let d = double_point_complex(&f).unwrap();
        assert_eq!(d.complex.num_vertices(), 0);
        assert!(invariant_components(&d).is_empty());
        assert!(has_triple_points(&f).unwrap().is_none());
        assert!(sigma_set(&f).unwrap().is_empty());
    }

    #[test]
    fn degenerate_rejected() {
        let k = complex_from_labels(&["a", "b"], &[&["a", "b"]]).unwrap();
        let l = complex_from_labels(&["p"], &[]).unwrap();
        let f = SimplicialMap::new(k, l, vec![0, 0]).unwrap();
        assert!(matches!(double_point_complex(&f), Err(PremError::Degenerate(_))));
    }

    #[test]
    fn triple_points_of_covers() {
        let w = has_triple_points(&cover(3, 3)).unwrap().unwrap();
        assert_eq!(w[0].len(), 2);
        assert!(disjoint(&w[0], &w[1]) && disjoint(&w[1], &w[2]));
        assert!(has_triple_points(&cover(2, 4)).unwrap().is_none());
    }

    fn fold_path() -> SimplicialMap {
        let k = complex_from_labels(&["a", "b", "c"], &[&["a", "b"], &["b", "c"]]).unwrap();
        let l = complex_from_labels(&["p0", "p1"], &[&["p0", "p1"]]).unwrap();
        SimplicialMap::new(k, l, vec![0, 1, 0]).unwrap()
    }

    #[test]
    fn fold_sigma() {
        let f = fold_path();
        let s = sigma_set(&f).unwrap();
        assert_eq!(s.into_iter().collect::<Vec<_>>(), vec![vec![1]]);
        assert!(is_simple_fold(&f).unwrap());
        assert!(sigma_set(&cover(3, 3)).unwrap().is_empty());
        assert!(!check_star_condition(&f));
        assert!(matches!(accepted_model(&f, 2), Err(PremError::ModelInvalid(_))));
    }

    #[test]
    fn three_arc_is_not_simple() {
        let k = complex_from_labels(
            &["a", "b", "c", "d", "e", "g"],
            &[&["a", "b"], &["b", "c"], &["d", "e"], &["e", "g"]],
        )
        .unwrap();
        let l = complex_from_labels(
            &["p0", "p1", "p2", "p3"],
            &[&["p0", "p1"], &["p1", "p2"], &["p1", "p3"]],
        )
        .unwrap();
        let f = SimplicialMap::new(k, l, vec![0, 1, 0, 2, 1, 3]).unwrap();
        assert!(!is_simple_fold(&f).unwrap());
        let d = double_point_complex(&f).unwrap();
        let be = d.complex.vertex_by_label("e~b").unwrap();
        assert!(sigma_set(&f).unwrap().contains(&d.second(&[be])));
    }
}
