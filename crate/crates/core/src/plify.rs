//! Replacing a lift that is PL on a fine subdivision `K*` by one that is
//! linear on a subdivision `K'` on which `f` stays simplicial.
//!
//! The refinement runs in stages `i = 0..=dim K`. Stage `i` looks at the
//! identified vertex pairs (distinct vertices of `K'` with equal image) whose
//! carrier in `K` is an `i`-simplex, shrinks the mesh away from the stars
//! protected by earlier stages until the convex hulls of `g` over the two
//! stars are disjoint, and then protects those stars. Edges are bisected
//! compatibly in `K` and `L`, so `f` remains simplicial throughout.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::Simplex;
use crate::error::{PremError, Result};
use crate::lp::{hulls_intersect, LinearProgram};
use crate::map::{vertex_point, BaryPoint, SimplicialMap};
use crate::rational::{barycentric, dist_sq, dist_sq_to_affine_hull, format_rational, frac, int, Rational};
use crate::subdivision::{Refinement, SubdivisionRecord};
use crate::verify::{verify_embedding, EmbeddingCertificate, Lift};

const MAX_SHRINK: usize = 8;

fn dense(p: &BaryPoint, keys: &[usize]) -> Vec<Rational> {
    keys.iter().map(|k| p.get(k).cloned().unwrap_or_default()).collect()
}

fn bary_dist_sq(a: &BaryPoint, b: &BaryPoint) -> Rational {
    let keys: BTreeSet<usize> = a.keys().chain(b.keys()).copied().collect();
    let keys: Vec<usize> = keys.into_iter().collect();
    dist_sq(&dense(a, &keys), &dense(b, &keys))
}

/// A maximal simplex of `K*` in the canonical realization of `K`.
struct Piece {
    verts: Vec<usize>,
    support: Vec<usize>,
    coords: Vec<Vec<Rational>>,
}

/// Evaluates a lift at points of `|K|` given in barycentric coordinates over `K`.
struct Evaluator<'a> {
    g: &'a Lift,
    pieces: Vec<Piece>,
}

impl<'a> Evaluator<'a> {
    fn new(g: &'a Lift) -> Self {
        let rec = &g.subdivision;
        let pieces = rec
            .child
            .maximal_simplices()
            .into_iter()
            .map(|verts| {
                let support: BTreeSet<usize> = verts
                    .iter()
                    .flat_map(|&v| rec.vertex_coords[v].keys().copied())
                    .collect();
                let support: Vec<usize> = support.into_iter().collect();
                let coords = verts.iter().map(|&v| dense(&rec.vertex_coords[v], &support)).collect();
                Piece { verts, support, coords }
            })
            .collect();
        Self { g, pieces }
    }

    fn eval(&self, p: &BaryPoint) -> Result<Vec<Rational>> {
        for piece in &self.pieces {
            if !p.keys().all(|k| piece.support.binary_search(k).is_ok()) {
                continue;
            }
            let Some(w) = barycentric(&piece.coords, &dense(p, &piece.support)) else {
                continue;
            };
            if w.iter().all(|x| *x >= Rational::zero()) {
                let point: BaryPoint = piece.verts.iter().copied().zip(w).collect();
                return Ok(self.g.eval(&point));
            }
        }
        Err(PremError::Internal("point outside the domain of the lift".into()))
    }
}

/// Squared upper bound on the Lipschitz constant of `g` with respect to the
/// canonical realization of `K`. On a `d`-simplex the gradient of a linear
/// function is bounded by `d * spread / h_min`.
pub fn lipschitz_bound_sq(g: &Lift) -> Result<Rational> {
    let ev = Evaluator::new(g);
    let mut best = Rational::zero();
    for piece in &ev.pieces {
        let d = piece.verts.len() - 1;
        if d == 0 {
            continue;
        }
        let mut spread = Rational::zero();
        for (i, &a) in piece.verts.iter().enumerate() {
            for &b in &piece.verts[i + 1..] {
                spread = spread.max(dist_sq(&g.values[a], &g.values[b]));
            }
        }
        if spread.is_zero() {
            continue;
        }
        let mut h_min: Option<Rational> = None;
        for i in 0..piece.coords.len() {
            let face: Vec<Vec<Rational>> = piece
                .coords
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, c)| c.clone())
                .collect();
            let h = dist_sq_to_affine_hull(&piece.coords[i], &face)?;
            h_min = Some(h_min.map_or(h.clone(), |m: Rational| m.min(h)));
        }
        let h = h_min.expect("simplex has vertices");
        if h.is_zero() {
            return Err(PremError::Degenerate(
                piece
                    .verts
                    .iter()
                    .map(|&v| g.subdivision.child.label(v).to_string())
                    .collect(),
            ));
        }
        best = best.max(spread * int((d * d) as i64) / h);
    }
    Ok(best)
}

/// `r² = (d/2)² / Λ²`; `None` stands for an unbounded radius (constant `g`).
pub fn stage_radius_sq(gap_sq: &Rational, lambda_sq: &Rational) -> Option<Rational> {
    (!lambda_sq.is_zero()).then(|| gap_sq / (int(4) * lambda_sq))
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageGap {
    /// Largest squared distance `‖g(u) − g(v)‖²` over the stage's pairs.
    pub gap_sq: Rational,
    /// Smallest one; this is what drives the refinement radius.
    pub separation_sq: Rational,
}

/// Extremes of `‖a − b‖²` over the given value pairs; `None` when there are none.
pub fn stage_gap(pairs: &[(Vec<Rational>, Vec<Rational>)]) -> Option<StageGap> {
    let d: Vec<Rational> = pairs.iter().map(|(a, b)| dist_sq(a, b)).collect();
    let gap_sq = d.iter().max()?.clone();
    let separation_sq = d.iter().min()?.clone();
    Some(StageGap { gap_sq, separation_sq })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StageTrace {
    pub stage: usize,
    pub pairs: usize,
    pub gap_sq: Option<String>,
    pub separation_sq: Option<String>,
    /// `None` when the stage was skipped or the radius is unbounded.
    pub radius_sq: Option<String>,
    pub shrinks: usize,
    pub bisections: usize,
    pub vertices: usize,
    pub cells: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HullCheck {
    pub u: String,
    pub v: String,
    pub disjoint: bool,
}

#[derive(Clone, Debug)]
pub struct PlifyResult {
    /// `g₁`, linear on the computed subdivision `K'` of `K`.
    pub lift: Lift,
    /// The matching subdivision `L'` of `L`; `f` is simplicial `K' -> L'`.
    pub target: SubdivisionRecord,
    pub stages: Vec<StageTrace>,
    /// Hull disjointness for identified pairs whose stars are vertex-disjoint.
    pub hull_checks: Vec<HullCheck>,
    /// Identified pairs whose stars share a vertex; these are left to the
    /// final certificate.
    pub adjacent_pairs: usize,
    pub protected_stars_unchanged: bool,
    pub certificate: EmbeddingCertificate,
}

/// Subdivisions of `K` and `L` under construction, with `f` simplicial
/// between them and `g` sampled at every vertex of `K'`.
struct Cascade<'a> {
    ev: Evaluator<'a>,
    rk: Refinement,
    rl: Refinement,
    fmap: Vec<usize>,
    values: Vec<Vec<Rational>>,
    protected: BTreeSet<usize>,
}

impl Cascade<'_> {
    fn rk_label(&self, v: usize) -> String {
        self.rk.label(v).to_string()
    }

    fn carrier_dim(&self, v: usize) -> usize {
        self.rk.coords(v).len() - 1
    }

    /// Distinct vertices `u < v` of `K'` with the same image.
    fn identified_pairs(&self) -> Vec<(usize, usize)> {
        let mut fibers: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (v, &w) in self.fmap.iter().enumerate() {
            fibers.entry(w).or_default().push(v);
        }
        let mut out = Vec::new();
        for fiber in fibers.values() {
            for (i, &u) in fiber.iter().enumerate() {
                for &v in &fiber[i + 1..] {
                    out.push((u, v));
                }
            }
        }
        out
    }

    /// Stars of `u` and `v` share a vertex (pairs straddling a fold).
    fn adjacent(&self, u: usize, v: usize) -> bool {
        let near: BTreeSet<usize> = self.rk.star(u).iter().flatten().copied().collect();
        self.rk.star(v).iter().flatten().any(|w| near.contains(w))
    }

    fn edge_blocked(&self, a: usize, b: usize) -> bool {
        self.rk
            .star(a)
            .iter()
            .filter(|s| s.contains(&b))
            .any(|s| s.iter().any(|w| self.protected.contains(w)))
    }

    /// Bisects, longest first, every edge of `L'` whose preimage edges are
    /// longer than `r` and avoid the protected stars. Returns the number of
    /// bisections of `L'`.
    fn refine(&mut self, r_sq: &Rational) -> Result<usize> {
        let mut count = 0;
        loop {
            let mut groups: BTreeMap<(usize, usize), Vec<(usize, usize)>> = BTreeMap::new();
            for (a, b) in self.rk.edges() {
                let (x, y) = (self.fmap[a], self.fmap[b]);
                groups.entry((x.min(y), x.max(y))).or_default().push((a, b));
            }
            let mut best: Option<(Rational, (usize, usize))> = None;
            for (&key, edges) in &groups {
                if edges.iter().any(|&(a, b)| self.edge_blocked(a, b)) {
                    continue;
                }
                let len = bary_dist_sq(self.rk.coords(edges[0].0), self.rk.coords(edges[0].1));
                if len > *r_sq && best.as_ref().is_none_or(|(l, _)| len > *l) {
                    best = Some((len, key));
                }
            }
            let Some((_, (x, y))) = best else { return Ok(count) };
            let ml = self.rl.bisect(x, y)?;
            for (a, b) in groups.remove(&(x, y)).unwrap_or_default() {
                let m = self.rk.bisect(a, b)?;
                debug_assert_eq!(m, self.fmap.len());
                self.fmap.push(ml);
                let value = self.ev.eval(self.rk.coords(m))?;
                self.values.push(value);
            }
            count += 1;
        }
    }

    /// Whether the convex hulls of `g` over the stars of `u` and `v` in `K'`
    /// meet. Each star is covered by the pieces `s ∩ ς` (`s` in `K*`, `ς` in
    /// the star) on which `g` is linear, and the hull of the union is
    /// described by the homogenized system of all pieces.
    fn star_hulls_intersect(&self, u: usize, v: usize) -> bool {
        let sides = [self.star_pieces(u), self.star_pieces(v)];
        let k = self.ev.g.k;
        let mut layout = Vec::new();
        let mut num_vars = 0;
        for side in &sides {
            for (p, cell) in side {
                layout.push(num_vars);
                num_vars += self.ev.pieces[*p].verts.len() + cell.len();
            }
        }
        let mut lp = LinearProgram::new(num_vars);
        let mut value_rows = vec![vec![Rational::zero(); num_vars]; k];
        let mut idx = 0;
        for (side_no, side) in sides.iter().enumerate() {
            let sign = if side_no == 0 {
                Rational::one()
            } else {
                -Rational::one()
            };
            let mut total = vec![Rational::zero(); num_vars];
            for (p, cell) in side {
                let piece = &self.ev.pieces[*p];
                let start = layout[idx];
                idx += 1;
                let keys: BTreeSet<usize> = piece
                    .support
                    .iter()
                    .copied()
                    .chain(cell.iter().flat_map(|&c| self.rk.coords(c).keys().copied()))
                    .collect();
                for key in keys {
                    let mut row = vec![Rational::zero(); num_vars];
                    for (j, &w) in piece.verts.iter().enumerate() {
                        row[start + j] = self.ev.g.subdivision.vertex_coords[w]
                            .get(&key)
                            .cloned()
                            .unwrap_or_default();
                    }
                    for (j, &c) in cell.iter().enumerate() {
                        row[start + piece.verts.len() + j] = -self.rk.coords(c).get(&key).cloned().unwrap_or_default();
                    }
                    lp.add_eq(row, Rational::zero());
                }
                for (j, &w) in piece.verts.iter().enumerate() {
                    total[start + j] = Rational::one();
                    for (d, row) in value_rows.iter_mut().enumerate() {
                        row[start + j] = &sign * &self.ev.g.values[w][d];
                    }
                }
            }
            lp.add_eq(total, Rational::one());
        }
        for row in value_rows {
            lp.add_eq(row, Rational::zero());
        }
        lp.solve().is_feasible()
    }

    /// Pairs (piece of `K*`, maximal simplex of the star of `u`) that meet.
    fn star_pieces(&self, u: usize) -> Vec<(usize, Simplex)> {
        let mut out = Vec::new();
        for cell in self.rk.star(u) {
            let cell_support: BTreeSet<usize> = cell.iter().flat_map(|&c| self.rk.coords(c).keys().copied()).collect();
            for (p, piece) in self.ev.pieces.iter().enumerate() {
                if !piece.support.iter().any(|k| cell_support.contains(k)) {
                    continue;
                }
                let keys: Vec<usize> = cell_support
                    .iter()
                    .chain(piece.support.iter())
                    .copied()
                    .collect::<BTreeSet<_>>()
                    .into_iter()
                    .collect();
                let a: Vec<Vec<Rational>> = piece
                    .verts
                    .iter()
                    .map(|&w| dense(&self.ev.g.subdivision.vertex_coords[w], &keys))
                    .collect();
                let b: Vec<Vec<Rational>> = cell.iter().map(|&c| dense(self.rk.coords(c), &keys)).collect();
                if hulls_intersect(&a, &b) {
                    out.push((p, cell.clone()));
                }
            }
        }
        out
    }

    fn cells(&self) -> usize {
        (0..self.rk.num_vertices())
            .flat_map(|v| self.rk.star(v).iter())
            .collect::<BTreeSet<_>>()
            .len()
    }
}

fn describe_failure(g: &Lift, cert: &EmbeddingCertificate) -> String {
    if let Some(p) = cert.failures.first() {
        format!(
            "f x g identifies a point of [{}] with a point of [{}]",
            p.sigma.join(" "),
            p.tau.join(" ")
        )
    } else if let Some(s) = cert.degenerate_simplices.first() {
        format!("f x g collapses simplex [{}]", s.join(" "))
    } else {
        format!(
            "f x g is not injective on a subdivision with {} vertices",
            g.subdivision.child.num_vertices()
        )
    }
}

/// Replaces `g` (PL on its own subdivision of `K`, with `f × g` injective)
/// by `g₁`, linear on a computed subdivision `K'` and equal to `g` at every
/// vertex of `K'`, with `f × g₁` injective.
pub fn plify_lift(f: &SimplicialMap, g: &Lift) -> Result<PlifyResult> {
    f.require_non_degenerate()?;
    if g.subdivision.parent != f.source {
        return Err(PremError::Mismatch(
            "lift is not defined on a subdivision of the source".into(),
        ));
    }
    let input = verify_embedding(f, g)?;
    if !input.verdict {
        return Err(PremError::InputNotInjective(describe_failure(g, &input)));
    }
    let lambda_sq = lipschitz_bound_sq(g)?;
    let ev = Evaluator::new(g);
    let k = &f.source;
    let values = (0..k.num_vertices())
        .map(|v| ev.eval(&vertex_point(v)))
        .collect::<Result<Vec<_>>>()?;
    let mut state = Cascade {
        ev,
        rk: Refinement::new(k),
        rl: Refinement::new(&f.target),
        fmap: f.vertex_map.clone(),
        values,
        protected: BTreeSet::new(),
    };
    let top = k.dim().max(0) as usize;
    let mut stages = Vec::new();
    let mut frozen: Vec<(usize, BTreeSet<Simplex>)> = Vec::new();
    for i in 0..=top {
        let stage_pairs = |st: &Cascade| -> Vec<(usize, usize)> {
            st.identified_pairs()
                .into_iter()
                .filter(|&(u, v)| st.carrier_dim(u) == i && !st.protected.contains(&u) && !st.protected.contains(&v))
                .collect()
        };
        let pairs = stage_pairs(&state);
        let sampled: Vec<(Vec<Rational>, Vec<Rational>)> = pairs
            .iter()
            .map(|&(u, v)| (state.values[u].clone(), state.values[v].clone()))
            .collect();
        let Some(gap) = stage_gap(&sampled) else {
            stages.push(StageTrace {
                stage: i,
                pairs: 0,
                gap_sq: None,
                separation_sq: None,
                radius_sq: None,
                shrinks: 0,
                bisections: 0,
                vertices: state.rk.num_vertices(),
                cells: state.cells(),
            });
            continue;
        };
        if gap.separation_sq.is_zero() {
            let &(u, v) = pairs
                .iter()
                .find(|&&(u, v)| state.values[u] == state.values[v])
                .expect("zero separation");
            return Err(PremError::InputNotInjective(format!(
                "g takes the same value at identified vertices {} and {}",
                state.rk_label(u),
                state.rk_label(v)
            )));
        }
        let mut radius = stage_radius_sq(&gap.separation_sq, &lambda_sq);
        let first_radius = radius.clone();
        let (mut bisections, mut shrinks) = (0, 0);
        loop {
            if let Some(r) = &radius {
                bisections += state.refine(r)?;
            }
            let pairs = stage_pairs(&state);
            let clash = pairs
                .par_iter()
                .any(|&(u, v)| !state.adjacent(u, v) && state.star_hulls_intersect(u, v));
            if !clash {
                for (u, v) in pairs {
                    state.protected.insert(u);
                    state.protected.insert(v);
                }
                break;
            }
            shrinks += 1;
            if shrinks > MAX_SHRINK {
                return Err(PremError::Internal(format!(
                    "stage {i}: star hulls still overlap after refinement"
                )));
            }
            radius = Some(radius.map_or_else(|| frac(1, 2), |r| r / int(4)));
        }
        for &v in &state.protected {
            if !frozen.iter().any(|(w, _)| *w == v) {
                frozen.push((v, state.rk.star(v).clone()));
            }
        }
        stages.push(StageTrace {
            stage: i,
            pairs: pairs.len(),
            gap_sq: Some(format_rational(&gap.gap_sq)),
            separation_sq: Some(format_rational(&gap.separation_sq)),
            radius_sq: first_radius.as_ref().map(format_rational),
            shrinks,
            bisections,
            vertices: state.rk.num_vertices(),
            cells: state.cells(),
        });
    }
    let protected_stars_unchanged = frozen.iter().all(|(v, st)| state.rk.star(*v) == st);
    let (far, near): (Vec<_>, Vec<_>) = state
        .identified_pairs()
        .into_iter()
        .partition(|&(u, v)| !state.adjacent(u, v));
    let hull_checks: Vec<HullCheck> = far
        .par_iter()
        .map(|&(u, v)| HullCheck {
            u: state.rk_label(u),
            v: state.rk_label(v),
            disjoint: !state.star_hulls_intersect(u, v),
        })
        .collect();
    let record = state.rk.finish()?;
    let target = state.rl.finish()?;
    let lift = Lift::new(record, state.values, g.k)?;
    let certificate = verify_embedding(f, &lift)?;
    if !certificate.verdict {
        return Err(PremError::Internal(format!(
            "linearized lift is not injective: {}",
            describe_failure(&lift, &certificate)
        )));
    }
    Ok(PlifyResult {
        lift,
        target,
        stages,
        hull_checks,
        adjacent_pairs: near.len(),
        protected_stars_unchanged,
        certificate,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{figure_eight, fold_path};
    use crate::subdivision::iterated_barycentric;

    /// The figure-eight lift `x4 ↦ 1`, sampled on the twice subdivided cycle
    /// with an alternating wiggle at the new vertices.
    fn wiggly(f: &SimplicialMap) -> Lift {
        let rec = iterated_barycentric(&f.source, 2).unwrap();
        let x4 = f.source.vertex_by_label("x4").unwrap();
        let values = rec
            .vertex_coords
            .iter()
            .enumerate()
            .map(|(w, p)| {
                let base = p.get(&x4).cloned().unwrap_or_default();
                let wiggle = if p.len() == 1 {
                    int(0)
                } else if w % 2 == 0 {
                    frac(1, 8)
                } else {
                    frac(-1, 8)
                };
                vec![base + wiggle]
            })
            .collect();
        Lift::new(rec, values, 1).unwrap()
    }

    #[test]
    fn radius_formula() {
        assert_eq!(stage_radius_sq(&int(1), &int(4)), Some(frac(1, 16)));
        assert_eq!(stage_radius_sq(&int(1), &int(0)), None);
        assert!(stage_gap(&[]).is_none());
        let g = stage_gap(&[(vec![int(0)], vec![int(1)]), (vec![int(0)], vec![int(3)])]).unwrap();
        assert_eq!((g.gap_sq, g.separation_sq), (int(9), int(1)));
    }

    #[test]
    fn lipschitz_of_linear_edge() {
        let (f, _) = figure_eight();
        let mut values = vec![vec![int(0)]; 8];
        values[4] = vec![int(1)];
        let g = Lift::new(SubdivisionRecord::identity(&f.source), values, 1).unwrap();
        // edges have squared length 2 in the canonical realization
        assert_eq!(lipschitz_bound_sq(&g).unwrap(), frac(1, 2));
    }

    #[test]
    fn wiggly_figure_eight() {
        let (f, _) = figure_eight();
        let g = wiggly(&f);
        let out = plify_lift(&f, &g).unwrap();
        assert!(out.certificate.verdict);
        assert!(out.protected_stars_unchanged);
        assert!(!out.hull_checks.is_empty() && out.hull_checks.iter().all(|h| h.disjoint));
        let ev = Evaluator::new(&g);
        for (v, p) in out.lift.subdivision.vertex_coords.iter().enumerate() {
            assert_eq!(out.lift.values[v], ev.eval(p).unwrap());
        }
        assert_eq!(out.stages[0].pairs, 1);
    }

    #[test]
    fn linear_lift_is_fixed() {
        let f = fold_path();
        let values = vec![vec![int(0)], vec![int(1)], vec![int(2)]];
        let g = Lift::new(SubdivisionRecord::identity(&f.source), values, 1).unwrap();
        let out = plify_lift(&f, &g).unwrap();
        assert!(out.certificate.verdict);
        assert!(out.adjacent_pairs > 0);
        assert!(out.hull_checks.iter().all(|h| h.disjoint));
        assert_eq!(&out.lift.values[..3], &g.values[..]);
    }

    #[test]
    fn non_injective_input() {
        let (f, _) = figure_eight();
        let err = plify_lift(&f, &Lift::zero(&f, 1)).unwrap_err();
        assert!(matches!(err, PremError::InputNotInjective(_)));
    }
}
