//! Exact two-phase simplex method over ℚ.
//!
//! Problems are in equality form: maximize `c·x` subject to `A x = b`,
//! `x ≥ 0`. Bland's rule is used for both entering and leaving variables, so
//! the method terminates without cycling. Dense tableau; intended for the
//! small feasibility problems that arise in pairwise simplex checks.

use num_traits::{Signed, Zero};

use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Infeasible,
    Unbounded,
    Optimal { value: Rational, x: Vec<Rational> },
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }
}

#[derive(Debug, Clone, Default)]
pub struct LinearProgram {
    pub num_vars: usize,
    pub rows: Vec<Vec<Rational>>,
    pub rhs: Vec<Rational>,
    pub objective: Vec<Rational>,
}

impl LinearProgram {
    pub fn new(num_vars: usize) -> Self {
        Self {
            num_vars,
            rows: Vec::new(),
            rhs: Vec::new(),
            objective: vec![Rational::zero(); num_vars],
        }
    }

    pub fn add_eq(&mut self, row: Vec<Rational>, rhs: Rational) {
        debug_assert_eq!(row.len(), self.num_vars);
        self.rows.push(row);
        self.rhs.push(rhs);
    }

    pub fn solve(&self) -> LpOutcome {
        solve(&self.rows, &self.rhs, &self.objective)
    }
}

struct Tableau {
    t: Vec<Vec<Rational>>,
    rhs: Vec<Rational>,
    basis: Vec<usize>,
}

impl Tableau {
    fn pivot(&mut self, row: usize, col: usize) {
        let inv = self.t[row][col].recip();
        for x in self.t[row].iter_mut() {
            *x = &*x * &inv;
        }
        self.rhs[row] = &self.rhs[row] * &inv;
        for r in 0..self.t.len() {
            if r == row || self.t[r][col].is_zero() {
                continue;
            }
            let factor = self.t[r][col].clone();
            for c in 0..self.t[r].len() {
                if !self.t[row][c].is_zero() {
                    let delta = &factor * &self.t[row][c];
                    self.t[r][c] -= delta;
                }
            }
            let delta = &factor * &self.rhs[row];
            self.rhs[r] -= delta;
        }
        self.basis[row] = col;
    }

    /// Runs Bland's-rule iterations maximizing `cost` over the columns
    /// `allowed`. Returns false when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let entering = (0..allowed).find(|&j| {
                if self.basis.contains(&j) {
                    return false;
                }
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !self.t[i][j].is_zero() && !cost[b].is_zero() {
                        r -= &cost[b] * &self.t[i][j];
                    }
                }
                r.is_positive()
            });
            let Some(j) = entering else { return true };
            let mut best: Option<(usize, Rational)> = None;
            for i in 0..self.t.len() {
                if self.t[i][j].is_positive() {
                    let ratio = &self.rhs[i] / &self.t[i][j];
                    let better = match &best {
                        None => true,
                        Some((bi, br)) => ratio < *br || (ratio == *br && self.basis[i] < self.basis[*bi]),
                    };
                    if better {
                        best = Some((i, ratio));
                    }
                }
            }
            match best {
                Some((i, _)) => self.pivot(i, j),
                None => return false,
            }
        }
    }
}

/// Maximize `c·x` subject to `rows · x = rhs`, `x ≥ 0`.
pub fn solve(rows: &[Vec<Rational>], rhs: &[Rational], c: &[Rational]) -> LpOutcome {
    let n = c.len();
    let m = rows.len();
    let mut t = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    for (row, r) in rows.iter().zip(rhs) {
        let neg = r.is_negative();
        let mut full: Vec<Rational> = row.iter().map(|x| if neg { -x.clone() } else { x.clone() }).collect();
        full.extend((0..m).map(|_| Rational::zero()));
        t.push(full);
        b.push(if neg { -r.clone() } else { r.clone() });
    }
    for (i, row) in t.iter_mut().enumerate() {
        row[n + i] = Rational::from_integer(1.into());
    }
    let mut tab = Tableau {
        t,
        rhs: b,
        basis: (n..n + m).collect(),
    };

    // phase 1: maximize -(sum of artificials)
    let mut phase1 = vec![Rational::zero(); n + m];
    for x in phase1.iter_mut().skip(n) {
        *x = Rational::from_integer((-1).into());
    }
    tab.optimize(&phase1, n + m);
    let infeas: Rational = (0..m)
        .filter(|&i| tab.basis[i] >= n)
        .fold(Rational::zero(), |acc, i| acc + &tab.rhs[i]);
    if infeas.is_positive() {
        return LpOutcome::Infeasible;
    }

    // drive remaining (zero-level) artificials out of the basis
    let mut i = 0;
    while i < tab.t.len() {
        if tab.basis[i] >= n {
            match (0..n).find(|&j| !tab.t[i][j].is_zero()) {
                Some(j) => {
                    tab.pivot(i, j);
                    i += 1;
                }
                None => {
                    tab.t.remove(i);
                    tab.rhs.remove(i);
                    tab.basis.remove(i);
                }
            }
        } else {
            i += 1;
        }
    }

    let mut cost = c.to_vec();
    cost.extend((0..m).map(|_| Rational::zero()));
    if !tab.optimize(&cost, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bv) in tab.basis.iter().enumerate() {
        if bv < n {
            x[bv] = tab.rhs[i].clone();
        }
    }
    let value = x.iter().zip(c).fold(Rational::zero(), |acc, (xi, ci)| acc + xi * ci);
    LpOutcome::Optimal { value, x }
}

/// Decides whether `0` lies in the convex hull of `points` (all of the same
/// dimension). Returns convex weights when it does.
pub fn origin_in_hull(points: &[Vec<Rational>]) -> Option<Vec<Rational>> {
    if points.is_empty() {
        return None;
    }
    let dim = points[0].len();
    let mut lp = LinearProgram::new(points.len());
    for d in 0..dim {
        lp.add_eq(points.iter().map(|p| p[d].clone()).collect(), Rational::zero());
    }
    lp.add_eq(
        vec![Rational::from_integer(1.into()); points.len()],
        Rational::from_integer(1.into()),
    );
    match lp.solve() {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}

/// Decides whether the convex hulls of two point sets intersect.
pub fn hulls_intersect(a: &[Vec<Rational>], b: &[Vec<Rational>]) -> bool {
    if a.is_empty() || b.is_empty() {
        return false;
    }
    let dim = a[0].len();
    let nv = a.len() + b.len();
    let mut lp = LinearProgram::new(nv);
    for d in 0..dim {
        let mut row: Vec<Rational> = a.iter().map(|p| p[d].clone()).collect();
        row.extend(b.iter().map(|p| -p[d].clone()));
        lp.add_eq(row, Rational::zero());
    }
    let one = Rational::from_integer(1.into());
    let mut ra = vec![Rational::zero(); nv];
    let mut rb = vec![Rational::zero(); nv];
    for x in ra.iter_mut().take(a.len()) {
        *x = one.clone();
    }
    for x in rb.iter_mut().skip(a.len()) {
        *x = one.clone();
    }
    lp.add_eq(ra, one.clone());
    lp.add_eq(rb, one);
    lp.solve().is_feasible()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{frac, int};

    #[test]
    fn simple_max() {
        // max x + y  s.t. x + 2y + s1 = 4, 3x + y + s2 = 6
        let rows = vec![
            vec![int(1), int(2), int(1), int(0)],
            vec![int(3), int(1), int(0), int(1)],
        ];
        let out = solve(&rows, &[int(4), int(6)], &[int(1), int(1), int(0), int(0)]);
        match out {
            LpOutcome::Optimal { value, x } => {
                assert_eq!(value, frac(14, 5));
                assert_eq!(x[0], frac(8, 5));
                assert_eq!(x[1], frac(6, 5));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn infeasible_and_unbounded() {
        let rows = vec![vec![int(1), int(1)]];
        assert_eq!(solve(&rows, &[int(-1)], &[int(0), int(0)]), LpOutcome::Infeasible);
        let rows = vec![vec![int(1), int(-1)]];
        assert_eq!(solve(&rows, &[int(0)], &[int(1), int(0)]), LpOutcome::Unbounded);
    }

    #[test]
    fn redundant_rows() {
        let rows = vec![vec![int(1), int(1)], vec![int(2), int(2)]];
        let out = solve(&rows, &[int(1), int(2)], &[int(1), int(0)]);
        assert!(matches!(out, LpOutcome::Optimal { ref value, .. } if *value == int(1)));
    }

    #[test]
    fn hull_tests() {
        let pts = vec![vec![int(1), int(0)], vec![int(-1), int(1)], vec![int(-1), int(-1)]];
        assert!(origin_in_hull(&pts).is_some());
        let pts = vec![vec![int(1), int(0)], vec![int(2), int(1)]];
        assert!(origin_in_hull(&pts).is_none());
        let a = vec![vec![int(0), int(0)], vec![int(2), int(2)]];
        let b = vec![vec![int(0), int(2)], vec![int(2), int(0)]];
        assert!(hulls_intersect(&a, &b));
        let c = vec![vec![int(3), int(0)], vec![int(3), int(5)]];
        assert!(!hulls_intersect(&a, &c));
    }
}
