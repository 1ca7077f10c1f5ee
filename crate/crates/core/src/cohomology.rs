//! Mod-2 cochains on simplicial complexes, quotients by free involutions,
//! the characteristic class w₁ of the resulting double cover, cup powers
//! and the Yang index.

use std::collections::HashMap;

use rayon::prelude::*;

use crate::complex::{boundary_faces, Simplex, SimplicialComplex};
use crate::double_point::DoublePointComplex;
use crate::error::{PremError, Result};
use crate::gf2::{BitVec, Echelon};
use crate::map::{quotient_by_permutation, SimplicialMap};
use crate::subdivision::{barycentric_subdivide, subdivide_permutation};

/// Boundary and coboundary data over GF(2) for one complex.
pub struct ChainComplex<'a> {
    pub complex: &'a SimplicialComplex,
}

impl<'a> ChainComplex<'a> {
    pub fn new(complex: &'a SimplicialComplex) -> Self {
        Self { complex }
    }

    fn count(&self, d: usize) -> usize {
        self.complex.count(d)
    }

    fn face_indices(&self, s: &[usize]) -> Vec<usize> {
        boundary_faces(s)
            .iter()
            .map(|f| self.complex.index_of(f).expect("closed complex"))
            .collect()
    }

    /// Rows of ∂_d: one bit vector over (d−1)-simplices per d-simplex.
    pub fn boundary_rows(&self, d: usize) -> Vec<BitVec> {
        if d == 0 {
            return Vec::new();
        }
        let n = self.count(d - 1);
        self.complex
            .simplices(d)
            .par_iter()
            .map(|s| BitVec::from_indices(n, self.face_indices(s)))
            .collect()
    }

    /// δ c for a d-cochain c.
    pub fn coboundary(&self, c: &Cocycle) -> BitVec {
        let n = self.count(c.dim + 1);
        let mut out = BitVec::zeros(n);
        for (i, t) in self.complex.simplices(c.dim + 1).iter().enumerate() {
            let parity = self.face_indices(t).iter().filter(|&&j| c.support.get(j)).count() % 2;
            if parity == 1 {
                out.flip(i);
            }
        }
        out
    }

    /// Echelon form of the image of δ_{d−1} inside C^d.
    pub fn coboundary_image(&self, d: usize) -> Echelon {
        let mut e = Echelon::new();
        if d == 0 {
            return e;
        }
        let n = self.count(d);
        let mut cofaces: Vec<Vec<usize>> = vec![Vec::new(); self.count(d - 1)];
        for (i, t) in self.complex.simplices(d).iter().enumerate() {
            for j in self.face_indices(t) {
                cofaces[j].push(i);
            }
        }
        for c in cofaces {
            e.insert(BitVec::from_indices(n, c));
        }
        e
    }

    /// Mod-2 Betti numbers b_0 … b_dim.
    pub fn betti(&self) -> Vec<usize> {
        let top = self.complex.f_vector().len();
        let ranks: Vec<usize> = (0..=top)
            .map(|d| {
                if d == 0 || d >= top {
                    0
                } else {
                    crate::gf2::rank(&self.boundary_rows(d))
                }
            })
            .collect();
        (0..top).map(|d| self.count(d) - ranks[d] - ranks[d + 1]).collect()
    }

    pub fn is_coboundary(&self, c: &Cocycle) -> bool {
        c.support.is_zero() || self.coboundary_image(c.dim).in_span(&c.support)
    }

    /// Alexander–Whitney cup product using the complex's vertex order.
    pub fn cup(&self, a: &Cocycle, b: &Cocycle) -> Cocycle {
        let d = a.dim + b.dim;
        let layer = self.complex.simplices(d);
        let mut support = BitVec::zeros(layer.len());
        if !a.support.is_zero() && !b.support.is_zero() {
            for (i, s) in layer.iter().enumerate() {
                let front = self.complex.index_of(&s[..=a.dim]).expect("face");
                let back = self.complex.index_of(&s[a.dim..]).expect("face");
                if a.support.get(front) && b.support.get(back) {
                    support.flip(i);
                }
            }
        }
        Cocycle { dim: d, support }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cocycle {
    pub dim: usize,
    pub support: BitVec,
}

impl Cocycle {
    pub fn zero(complex: &SimplicialComplex, dim: usize) -> Self {
        Self {
            dim,
            support: BitVec::zeros(complex.count(dim)),
        }
    }
}

/// A free involution on a complex together with its simplicial quotient.
#[derive(Clone, Debug)]
pub struct QuotientData {
    /// The cover, possibly barycentrically subdivided.
    pub cover: SimplicialComplex,
    pub involution: Vec<usize>,
    pub orbit_map: SimplicialMap,
    pub subdivisions: usize,
}

impl QuotientData {
    pub fn quotient(&self) -> &SimplicialComplex {
        &self.orbit_map.target
    }

    /// Preferred preimage of a quotient vertex: the smaller cover index.
    pub fn preferred(&self) -> Vec<usize> {
        let mut rep = vec![usize::MAX; self.quotient().num_vertices()];
        for (v, &q) in self.orbit_map.vertex_map.iter().enumerate() {
            rep[q] = rep[q].min(v);
        }
        rep
    }
}

pub fn check_free(complex: &SimplicialComplex, involution: &[usize]) -> Result<()> {
    if involution.len() != complex.num_vertices() {
        return Err(PremError::Mismatch(
            "involution length differs from vertex count".into(),
        ));
    }
    for (v, &w) in involution.iter().enumerate() {
        if w >= involution.len() || involution[w] != v {
            return Err(PremError::NonFreeAction(format!(
                "not an involution at {}",
                complex.label(v)
            )));
        }
        if w == v {
            return Err(PremError::NonFreeAction(format!(
                "vertex {} is fixed",
                complex.label(v)
            )));
        }
    }
    for s in complex.all_simplices() {
        let mut img: Simplex = s.iter().map(|&v| involution[v]).collect();
        img.sort_unstable();
        if !complex.contains(&img) {
            return Err(PremError::NonFreeAction("involution is not simplicial".into()));
        }
        if img == *s {
            return Err(PremError::NonFreeAction(format!(
                "simplex {:?} is invariant",
                complex.labels_of(s)
            )));
        }
    }
    Ok(())
}

/// Quotient of a complex by a free involution, subdividing barycentrically
/// (at most `max_rounds` times) until the quotient is simplicial.
pub fn quotient_involution(
    complex: &SimplicialComplex,
    involution: &[usize],
    max_rounds: usize,
) -> Result<QuotientData> {
    check_free(complex, involution)?;
    let mut cover = complex.clone();
    let mut inv = involution.to_vec();
    for round in 0..=max_rounds {
        if let Some(orbit_map) = quotient_by_permutation(&cover, &inv)? {
            return Ok(QuotientData {
                cover,
                involution: inv,
                orbit_map,
                subdivisions: round,
            });
        }
        if round < max_rounds {
            let next = subdivide_permutation(&cover, &inv)?;
            cover = barycentric_subdivide(&cover)?.child;
            inv = next;
        }
    }
    Err(PremError::Internal("quotient not simplicial after subdivision".into()))
}

pub fn quotient_by_involution(d: &DoublePointComplex) -> Result<QuotientData> {
    quotient_involution(&d.complex, &d.involution, 3)
}

/// w₁ of the double cover: an edge of the quotient gets 1 iff the lift
/// starting at the preferred sheet ends on the other sheet.
pub fn w1_cocycle(q: &QuotientData) -> Result<Cocycle> {
    let quotient = q.quotient();
    let rep = q.preferred();
    let edges = quotient.simplices(1);
    let mut support = BitVec::zeros(edges.len());
    for (i, e) in edges.iter().enumerate() {
        let (a, b) = (rep[e[0]], rep[e[1]]);
        let straight = q.cover.contains(&[a.min(b), a.max(b)]);
        let crossed = q.cover.contains(&[a.min(q.involution[b]), a.max(q.involution[b])]);
        if straight == crossed {
            return Err(PremError::Internal(format!(
                "edge {:?} has inconsistent lifts",
                quotient.labels_of(e)
            )));
        }
        if crossed {
            support.flip(i);
        }
    }
    let w = Cocycle { dim: 1, support };
    if !ChainComplex::new(quotient).coboundary(&w).is_zero() {
        return Err(PremError::Internal("w1 fails the cocycle condition".into()));
    }
    Ok(w)
}

/// Largest k with w₁ᵏ ≠ 0 in H^k of the quotient (0 for an empty cover).
pub fn yang_index_of(q: &QuotientData) -> Result<usize> {
    let quotient = q.quotient();
    if quotient.num_vertices() == 0 {
        return Ok(0);
    }
    let cc = ChainComplex::new(quotient);
    let w = w1_cocycle(q)?;
    let top = quotient.dim().max(0) as usize;
    let mut power = w.clone();
    let mut k = 0;
    while power.dim <= top && !cc.is_coboundary(&power) {
        k = power.dim;
        if power.dim == top {
            break;
        }
        power = cc.cup(&power, &w);
    }
    Ok(k)
}

pub fn yang_index(d: &DoublePointComplex) -> Result<usize> {
    yang_index_of(&quotient_by_involution(d)?)
}

/// Cocycle with a chosen support on the listed simplices.
pub fn cocycle_on(complex: &SimplicialComplex, dim: usize, simplices: &[Simplex]) -> Cocycle {
    let ids: HashMap<&Simplex, usize> = complex.simplices(dim).iter().enumerate().map(|(i, s)| (s, i)).collect();
    Cocycle {
        dim,
        support: BitVec::from_indices(complex.count(dim), simplices.iter().map(|s| ids[s])),
    }
}
