//! Exact rational geometric realizations.

use num_traits::Zero;

use crate::complex::SimplicialComplex;
use crate::error::{PremError, Result};
use crate::map::BaryPoint;
use crate::rational::{affinely_independent, dist_sq, int, Rational};

#[derive(Clone, Debug, PartialEq)]
pub struct GeometricComplex {
    pub complex: SimplicialComplex,
    pub coords: Vec<Vec<Rational>>,
}

impl GeometricComplex {
    /// Checks that every simplex is embedded (affinely independent vertices).
    pub fn new(complex: SimplicialComplex, coords: Vec<Vec<Rational>>) -> Result<Self> {
        if coords.len() != complex.num_vertices() {
            return Err(PremError::Mismatch("one coordinate vector per vertex required".into()));
        }
        let dim = coords.first().map_or(0, Vec::len);
        if coords.iter().any(|c| c.len() != dim) {
            return Err(PremError::InvalidComplex("coordinate vectors of unequal length".into()));
        }
        for s in complex.maximal_simplices() {
            let pts: Vec<Vec<Rational>> = s.iter().map(|&v| coords[v].clone()).collect();
            if !affinely_independent(&pts) {
                return Err(PremError::InvalidComplex(format!(
                    "simplex {:?} is not embedded",
                    complex.labels_of(&s)
                )));
            }
        }
        Ok(Self { complex, coords })
    }

    /// The standard realization with vertex `v` at the unit vector `e_v`.
    pub fn canonical(complex: SimplicialComplex) -> Self {
        let n = complex.num_vertices();
        let coords = (0..n)
            .map(|v| (0..n).map(|i| if i == v { int(1) } else { Rational::zero() }).collect())
            .collect();
        Self { complex, coords }
    }

    pub fn ambient_dim(&self) -> usize {
        self.coords.first().map_or(0, Vec::len)
    }

    /// Squared Euclidean diameter; attained at a pair of vertices.
    pub fn simplex_diameter_sq(&self, s: &[usize]) -> Result<Rational> {
        if !self.complex.contains(s) {
            return Err(PremError::UnknownSimplex(s.to_vec()));
        }
        Ok(diameter_sq(s.iter().map(|&v| &self.coords[v])))
    }

    pub fn point(&self, p: &BaryPoint) -> Vec<Rational> {
        let mut out = vec![Rational::zero(); self.ambient_dim()];
        for (&v, w) in p {
            for (x, c) in out.iter_mut().zip(&self.coords[v]) {
                *x += w * c;
            }
        }
        out
    }
}

pub fn diameter_sq<'a>(points: impl Iterator<Item = &'a Vec<Rational>>) -> Rational {
    let pts: Vec<&Vec<Rational>> = points.collect();
    let mut best = Rational::zero();
    for i in 0..pts.len() {
        for j in i + 1..pts.len() {
            let d = dist_sq(pts[i], pts[j]);
            if d > best {
                best = d;
            }
        }
    }
    best
}
