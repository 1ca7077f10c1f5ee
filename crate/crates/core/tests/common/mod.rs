//! Shared helpers for the integration tests.

#![allow(dead_code)]

use std::collections::HashMap;

pub mod props;

use prem_core::map::{BaryPoint, SimplicialMap};
use prem_core::rational::{int, Rational};
use prem_core::subdivision::SubdivisionRecord;
use prem_core::verify::Lift;
use prem_core::SimplicialComplex;
use proptest::prelude::*;

/// All points of a simplex whose barycentric coordinates have denominator `n`.
fn grid(simplex: &[usize], n: i64) -> Vec<BaryPoint> {
    fn rec(simplex: &[usize], left: i64, n: i64, acc: &mut Vec<(usize, i64)>, out: &mut Vec<BaryPoint>) {
        if simplex.len() == 1 {
            acc.push((simplex[0], left));
            out.push(
                acc.iter()
                    .filter(|(_, c)| *c > 0)
                    .map(|&(v, c)| (v, Rational::new(c.into(), n.into())))
                    .collect(),
            );
            acc.pop();
            return;
        }
        for c in 0..=left {
            acc.push((simplex[0], c));
            rec(&simplex[1..], left - c, n, acc, out);
            acc.pop();
        }
    }
    let mut out = Vec::new();
    rec(simplex, n, n, &mut Vec::new(), &mut out);
    out
}

/// A point of L together with the value of the lift there.
type GridKey = (Vec<(usize, Rational)>, Vec<Rational>);

/// Brute-force injectivity test of `f × g` on grid points with denominator
/// `n` in every maximal simplex of the lift's subdivision.
pub fn grid_oracle(f: &SimplicialMap, g: &Lift, n: i64) -> bool {
    let rec = &g.subdivision;
    let mut seen: HashMap<GridKey, BaryPoint> = HashMap::new();
    for s in rec.child.maximal_simplices() {
        for p in grid(&s, n) {
            let in_k = rec.to_parent(&p);
            let mut in_l: BaryPoint = BaryPoint::new();
            for (&u, w) in &in_k {
                *in_l.entry(f.vertex_map[u]).or_insert_with(|| int(0)) += w;
            }
            let key = (in_l.into_iter().collect(), g.eval(&p));
            match seen.get(&key) {
                Some(q) if *q != in_k => return false,
                Some(_) => {}
                None => {
                    seen.insert(key, in_k);
                }
            }
        }
    }
    true
}

/// A small random map into the complete complex on `targets` vertices with
/// a random linear lift.
#[derive(Clone, Debug)]
pub struct Instance {
    pub f: SimplicialMap,
    pub g: Lift,
    pub grid: i64,
}

fn complete(n: usize, top: usize) -> SimplicialComplex {
    let labels = (0..n).map(|i| format!("y{i}")).collect();
    let gens: Vec<Vec<usize>> = if top == 1 {
        (0..n).flat_map(|a| (a + 1..n).map(move |b| vec![a, b])).collect()
    } else {
        (0..n)
            .flat_map(|a| (a + 1..n).flat_map(move |b| (b + 1..n).map(move |c| vec![a, b, c])))
            .collect()
    };
    SimplicialComplex::from_generators(labels, gens).unwrap()
}

/// Graphs (dimension 1, `k <= 2`, values in -2..=2) or triangle complexes
/// (dimension 2, `k = 1`, values in -1..=1). Every collision of such an
/// instance occurs at a grid point of the returned denominator.
pub fn instance() -> impl Strategy<Value = Instance> {
    (
        any::<bool>(),
        3usize..=12,
        1usize..=2,
        proptest::collection::vec(any::<u32>(), 64),
    )
        .prop_map(|(triangles, n, k, noise)| {
            let targets = 4;
            let k = if triangles { 1 } else { k };
            let image: Vec<usize> = (0..n).map(|i| noise[i] as usize % targets).collect();
            let mut gens = Vec::new();
            let mut seed = noise[20] as usize;
            let mut next = || {
                seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                seed >> 33
            };
            let tries = if triangles { n } else { 2 * n };
            for _ in 0..tries {
                let (a, b, c) = (next() % n, next() % n, next() % n);
                let mut s = if triangles { vec![a, b, c] } else { vec![a, b] };
                let mut imgs: Vec<usize> = s.iter().map(|&v| image[v]).collect();
                imgs.sort_unstable();
                imgs.dedup();
                if imgs.len() == s.len() {
                    s.sort_unstable();
                    gens.push(s);
                }
            }
            let labels = (0..n).map(|i| format!("x{i}")).collect();
            let source = SimplicialComplex::from_generators(labels, gens).unwrap();
            let target = complete(targets, if triangles { 2 } else { 1 });
            let f = SimplicialMap::new(source, target, image).unwrap();
            let span = if triangles { 3 } else { 5 };
            let values = (0..n)
                .map(|v| {
                    (0..k)
                        .map(|j| int((noise[30 + v + 12 * j] % span) as i64 - (span as i64) / 2))
                        .collect()
                })
                .collect();
            let g = Lift::new(SubdivisionRecord::identity(&f.source), values, k).unwrap();
            Instance {
                f,
                g,
                grid: if triangles { 12 } else { 840 },
            }
        })
}
