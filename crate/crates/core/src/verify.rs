//! Lifts `g: K' -> ℚᵏ` and the exact decision of whether `f × g` is
//! injective.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::complex::Simplex;
use crate::error::{PremError, Result};
use crate::lp::{LinearProgram, LpOutcome};
use crate::map::{BaryPoint, SimplicialMap};
use crate::rational::{affinely_independent, Rational};
use crate::subdivision::SubdivisionRecord;

/// Values on the vertices of a subdivision of K, extended linearly.
#[derive(Clone, Debug, PartialEq)]
pub struct Lift {
    pub subdivision: SubdivisionRecord,
    pub values: Vec<Vec<Rational>>,
    pub k: usize,
}

impl Lift {
    pub fn new(subdivision: SubdivisionRecord, values: Vec<Vec<Rational>>, k: usize) -> Result<Self> {
        if values.len() != subdivision.child.num_vertices() || values.iter().any(|v| v.len() != k) {
            return Err(PremError::Mismatch(format!(
                "lift needs one vector in Q^{k} per vertex"
            )));
        }
        Ok(Self { subdivision, values, k })
    }

    pub fn zero(f: &SimplicialMap, k: usize) -> Self {
        let rec = SubdivisionRecord::identity(&f.source);
        let values = vec![vec![Rational::zero(); k]; rec.child.num_vertices()];
        Self {
            subdivision: rec,
            values,
            k,
        }
    }

    /// Value at a point given over the child vertices.
    pub fn eval(&self, p: &BaryPoint) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.k];
        for (&v, w) in p {
            for (o, x) in out.iter_mut().zip(&self.values[v]) {
                *o += w * x;
            }
        }
        out
    }
}

/// Image of each child vertex in ℝ^{V(L)} (barycentric coordinates of its
/// image point in L).
pub fn target_points(f: &SimplicialMap, rec: &SubdivisionRecord) -> Result<Vec<BaryPoint>> {
    if rec.parent != f.source {
        return Err(PremError::Mismatch(
            "lift is not defined on a subdivision of the source".into(),
        ));
    }
    Ok(rec
        .vertex_coords
        .iter()
        .map(|p| {
            let mut out = BaryPoint::new();
            for (&u, w) in p {
                *out.entry(f.vertex_map[u]).or_insert_with(Rational::zero) += w;
            }
            out
        })
        .collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairFailure {
    pub sigma: Vec<String>,
    pub tau: Vec<String>,
    /// Barycentric coordinates of the two colliding points, keyed by child
    /// vertex label.
    pub x: BTreeMap<String, String>,
    pub y: BTreeMap<String, String>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingCertificate {
    pub simplices_checked: usize,
    pub pairs_checked: usize,
    pub degenerate_simplices: Vec<Vec<String>>,
    pub failures: Vec<PairFailure>,
    pub verdict: bool,
}

/// Injectivity of the map sending child vertex `v` to `(points[v], values[v])`
/// and extended linearly over `simplices` (the maximal simplices of a
/// complex whose vertex labels are `labels`).
pub fn verify_pl_injective(
    labels: &[String],
    simplices: &[Simplex],
    points: &[BaryPoint],
    values: &[Vec<Rational>],
) -> EmbeddingCertificate {
    let support = |s: &Simplex| -> BTreeSet<usize> { s.iter().flat_map(|&v| points[v].keys().copied()).collect() };

    let degenerate: Vec<Vec<String>> = simplices
        .par_iter()
        .filter(|s| {
            let keys: BTreeSet<usize> = support(s);
            let pts: Vec<Vec<Rational>> = s
                .iter()
                .map(|&v| {
                    let mut c: Vec<Rational> = keys
                        .iter()
                        .map(|k| points[v].get(k).cloned().unwrap_or_default())
                        .collect();
                    c.extend(values[v].iter().cloned());
                    c
                })
                .collect();
            !affinely_independent(&pts)
        })
        .map(|s| s.iter().map(|&v| labels[v].clone()).collect())
        .collect();

    let supports: Vec<BTreeSet<usize>> = simplices.iter().map(support).collect();
    let mut by_target: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, s) in supports.iter().enumerate() {
        for &t in s {
            by_target.entry(t).or_default().push(i);
        }
    }
    let mut candidates: BTreeSet<(usize, usize)> = BTreeSet::new();
    for list in by_target.values() {
        for (a, &i) in list.iter().enumerate() {
            for &j in &list[a + 1..] {
                candidates.insert((i.min(j), i.max(j)));
            }
        }
    }
    let candidates: Vec<(usize, usize)> = candidates.into_iter().collect();
    let failures: Vec<PairFailure> = candidates
        .par_iter()
        .filter_map(|&(i, j)| {
            let (s, t) = (&simplices[i], &simplices[j]);
            let all_keys: BTreeSet<usize> = supports[i].union(&supports[j]).copied().collect();
            check_pair(s, t, &all_keys, points, values).map(|(x, y)| PairFailure {
                sigma: s.iter().map(|&v| labels[v].clone()).collect(),
                tau: t.iter().map(|&v| labels[v].clone()).collect(),
                x: render_point(labels, &x),
                y: render_point(labels, &y),
            })
        })
        .collect();
    let verdict = degenerate.is_empty() && failures.is_empty();
    EmbeddingCertificate {
        simplices_checked: simplices.len(),
        pairs_checked: candidates.len(),
        degenerate_simplices: degenerate,
        failures,
        verdict,
    }
}

fn render_point(labels: &[String], p: &BaryPoint) -> BTreeMap<String, String> {
    p.iter()
        .map(|(&v, w)| (labels[v].clone(), crate::rational::format_rational(w)))
        .collect()
}

/// Returns two distinct colliding points of `s` and `t` if any.
fn check_pair(
    s: &[usize],
    t: &[usize],
    keys: &BTreeSet<usize>,
    points: &[BaryPoint],
    values: &[Vec<Rational>],
) -> Option<(BaryPoint, BaryPoint)> {
    let (ns, nt) = (s.len(), t.len());
    let mut lp = LinearProgram::new(ns + nt);
    let zero = Rational::zero;
    let one = Rational::one;
    for key in keys {
        let mut row: Vec<Rational> = s
            .iter()
            .map(|&v| points[v].get(key).cloned().unwrap_or_else(zero))
            .collect();
        row.extend(t.iter().map(|&v| -points[v].get(key).cloned().unwrap_or_else(zero)));
        lp.add_eq(row, zero());
    }
    let k = values.first().map_or(0, Vec::len);
    #[allow(clippy::needless_range_loop)]
    for d in 0..k {
        let mut row: Vec<Rational> = s.iter().map(|&v| values[v][d].clone()).collect();
        row.extend(t.iter().map(|&v| -values[v][d].clone()));
        lp.add_eq(row, zero());
    }
    let mut rs = vec![zero(); ns + nt];
    let mut rt = vec![zero(); ns + nt];
    for x in rs.iter_mut().take(ns) {
        *x = one();
    }
    for x in rt.iter_mut().skip(ns) {
        *x = one();
    }
    lp.add_eq(rs, one());
    lp.add_eq(rt, one());
    for (i, &v) in s.iter().enumerate() {
        if !t.contains(&v) {
            lp.objective[i] = one();
        }
    }
    for (i, &v) in t.iter().enumerate() {
        if !s.contains(&v) {
            lp.objective[ns + i] = one();
        }
    }
    match lp.solve() {
        LpOutcome::Optimal { value, x } if value > zero() => {
            let px: BaryPoint = s
                .iter()
                .zip(&x[..ns])
                .filter(|(_, w)| !w.is_zero())
                .map(|(&v, w)| (v, w.clone()))
                .collect();
            let py: BaryPoint = t
                .iter()
                .zip(&x[ns..])
                .filter(|(_, w)| !w.is_zero())
                .map(|(&v, w)| (v, w.clone()))
                .collect();
            Some((px, py))
        }
        _ => None,
    }
}

/// Decides whether `f × g` is injective on |K|.
pub fn verify_embedding(f: &SimplicialMap, g: &Lift) -> Result<EmbeddingCertificate> {
    let points = target_points(f, &g.subdivision)?;
    let child = &g.subdivision.child;
    Ok(verify_pl_injective(
        child.labels(),
        &child.maximal_simplices(),
        &points,
        &g.values,
    ))
}
