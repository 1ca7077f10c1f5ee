//! Line-oriented text formats.
//!
//! Every line is a keyword followed by whitespace-separated fields; `#`
//! starts a comment. Numbers are written as `num/den`.
//!
//! | keyword | meaning |
//! |---|---|
//! | `v id` | vertex, in declaration order |
//! | `s id …` | maximal simplex (faces implied) |
//! | `c id q …` | coordinates of a vertex |
//! | `m src dst` | vertex map |
//! | `t a b` | involution pair |
//! | `w id q …` | witness vector |
//! | `k n` | lift codimension |
//! | `b child parent q parent q …` | subdivision vertex in parent coordinates |
//! | `g id q …` | lift or function value |
//!
//! A map file holds `[source]`, `[target]` and `[map]` sections.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use crate::complex::SimplicialComplex;
use crate::error::{PremError, Result};
use crate::map::{vertex_point, BaryPoint, SimplicialMap};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::subdivision::SubdivisionRecord;
use crate::verify::Lift;

/// Non-empty lines with comments removed, numbered from 1.
fn records(text: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    text.lines().enumerate().filter_map(|(i, line)| {
        let line = line.split('#').next().unwrap_or("");
        let fields: Vec<&str> = line.split_whitespace().collect();
        (!fields.is_empty()).then_some((i + 1, fields))
    })
}

fn rationals(line: usize, fields: &[&str]) -> Result<Vec<Rational>> {
    fields
        .iter()
        .map(|s| parse_rational(s).ok_or_else(|| PremError::parse(line, format!("bad number `{s}`"))))
        .collect()
}

fn vector_line(out: &mut String, key: &str, id: &str, v: &[Rational]) {
    let _ = write!(out, "{key} {id}");
    for q in v {
        let _ = write!(out, " {}", format_rational(q));
    }
    out.push('\n');
}

fn arity(line: usize, fields: &[&str], n: usize) -> Result<()> {
    if fields.len() == n {
        Ok(())
    } else {
        Err(PremError::parse(
            line,
            format!("`{}` expects {} field(s)", fields[0], n - 1),
        ))
    }
}

/// Accumulates `v`, `s` and `c` lines.
#[derive(Default)]
struct ComplexBuilder {
    labels: Vec<String>,
    index: HashMap<String, usize>,
    simplices: Vec<Vec<usize>>,
    coords: BTreeMap<usize, Vec<Rational>>,
}

impl ComplexBuilder {
    fn vertex(&self, line: usize, id: &str) -> Result<usize> {
        self.index
            .get(id)
            .copied()
            .ok_or_else(|| PremError::UnknownVertex(format!("{id} (line {line})")))
    }

    /// Consumes the record if it belongs to a complex.
    fn accept(&mut self, line: usize, fields: &[&str]) -> Result<bool> {
        match fields[0] {
            "v" => {
                arity(line, fields, 2)?;
                let id = fields[1].to_string();
                if self.index.insert(id.clone(), self.labels.len()).is_some() {
                    return Err(PremError::parse(line, format!("vertex `{id}` declared twice")));
                }
                self.labels.push(id);
            }
            "s" => {
                if fields.len() < 2 {
                    return Err(PremError::parse(line, "empty simplex"));
                }
                let s = fields[1..]
                    .iter()
                    .map(|id| self.vertex(line, id))
                    .collect::<Result<Vec<_>>>()?;
                self.simplices.push(s);
            }
            "c" => {
                if fields.len() < 2 {
                    return Err(PremError::parse(line, "coordinates need a vertex"));
                }
                let v = self.vertex(line, fields[1])?;
                self.coords.insert(v, rationals(line, &fields[2..])?);
            }
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn finish(self) -> Result<(SimplicialComplex, Option<Vec<Vec<Rational>>>)> {
        let n = self.labels.len();
        let coords = if self.coords.is_empty() {
            None
        } else if self.coords.len() != n {
            return Err(PremError::parse(
                0,
                "coordinates must be given for every vertex or none",
            ));
        } else {
            Some(self.coords.into_values().collect())
        };
        let k = SimplicialComplex::from_generators(self.labels, self.simplices)?;
        Ok((k, coords))
    }
}

pub fn parse_complex(text: &str) -> Result<(SimplicialComplex, Option<Vec<Vec<Rational>>>)> {
    let mut b = ComplexBuilder::default();
    for (line, fields) in records(text) {
        if !b.accept(line, &fields)? {
            return Err(PremError::parse(
                line,
                format!("unexpected `{}` in a complex file", fields[0]),
            ));
        }
    }
    b.finish()
}

pub fn write_complex(k: &SimplicialComplex, coords: Option<&[Vec<Rational>]>) -> String {
    let mut out = String::new();
    for l in k.labels() {
        let _ = writeln!(out, "v {l}");
    }
    for s in k.maximal_simplices() {
        let _ = writeln!(out, "s {}", k.labels_of(&s).join(" "));
    }
    if let Some(coords) = coords {
        for (l, c) in k.labels().iter().zip(coords) {
            vector_line(&mut out, "c", l, c);
        }
    }
    out
}

/// A simplicial map with optional realizations of its source and target.
#[derive(Clone, Debug, PartialEq)]
pub struct MapBundle {
    pub map: SimplicialMap,
    pub source_coords: Option<Vec<Vec<Rational>>>,
    pub target_coords: Option<Vec<Vec<Rational>>>,
}

impl MapBundle {
    pub fn new(map: SimplicialMap) -> Self {
        Self {
            map,
            source_coords: None,
            target_coords: None,
        }
    }
}

pub fn parse_map(text: &str) -> Result<MapBundle> {
    #[derive(PartialEq)]
    enum Section {
        None,
        Source,
        Target,
        Map,
    }
    let mut section = Section::None;
    let (mut src, mut dst) = (ComplexBuilder::default(), ComplexBuilder::default());
    let mut pairs = Vec::new();
    for (line, fields) in records(text) {
        match fields[0] {
            "[source]" => section = Section::Source,
            "[target]" => section = Section::Target,
            "[map]" => section = Section::Map,
            _ => {
                let ok = match section {
                    Section::Source => src.accept(line, &fields)?,
                    Section::Target => dst.accept(line, &fields)?,
                    Section::Map if fields[0] == "m" => {
                        arity(line, &fields, 3)?;
                        pairs.push((line, fields[1].to_string(), fields[2].to_string()));
                        true
                    }
                    _ => false,
                };
                if !ok {
                    return Err(PremError::parse(line, format!("unexpected `{}`", fields[0])));
                }
            }
        }
    }
    let mut vertex_map: Vec<Option<usize>> = vec![None; src.labels.len()];
    for (line, a, b) in &pairs {
        let u = src.vertex(*line, a)?;
        let w = dst.vertex(*line, b)?;
        if vertex_map[u].replace(w).is_some() {
            return Err(PremError::parse(*line, format!("vertex `{a}` mapped twice")));
        }
    }
    let (source, source_coords) = src.finish()?;
    let (target, target_coords) = dst.finish()?;
    let vertex_map = vertex_map
        .into_iter()
        .enumerate()
        .map(|(v, w)| w.ok_or_else(|| PremError::parse(0, format!("vertex `{}` has no image", source.label(v)))))
        .collect::<Result<Vec<_>>>()?;
    let map = SimplicialMap::new(source, target, vertex_map)?;
    Ok(MapBundle {
        map,
        source_coords,
        target_coords,
    })
}

pub fn write_map(b: &MapBundle) -> String {
    let f = &b.map;
    let mut out = String::from("[source]\n");
    out.push_str(&write_complex(&f.source, b.source_coords.as_deref()));
    out.push_str("[target]\n");
    out.push_str(&write_complex(&f.target, b.target_coords.as_deref()));
    out.push_str("[map]\n");
    for (v, &w) in f.vertex_map.iter().enumerate() {
        let _ = writeln!(out, "m {} {}", f.source.label(v), f.target.label(w));
    }
    out
}

/// Involution table on the vertices of `k`.
pub fn parse_involution(text: &str, k: &SimplicialComplex) -> Result<Vec<usize>> {
    let mut inv: Vec<Option<usize>> = vec![None; k.num_vertices()];
    let find = |line: usize, id: &str| {
        k.vertex_by_label(id)
            .ok_or_else(|| PremError::UnknownVertex(format!("{id} (line {line})")))
    };
    for (line, fields) in records(text) {
        if fields[0] != "t" {
            return Err(PremError::parse(
                line,
                format!("unexpected `{}` in an involution table", fields[0]),
            ));
        }
        arity(line, &fields, 3)?;
        let (a, b) = (find(line, fields[1])?, find(line, fields[2])?);
        for (x, y) in [(a, b), (b, a)] {
            if inv[x].is_some_and(|z| z != y) {
                return Err(PremError::parse(line, format!("`{}` already paired", k.label(x))));
            }
            inv[x] = Some(y);
        }
    }
    inv.into_iter()
        .enumerate()
        .map(|(v, w)| w.ok_or_else(|| PremError::parse(0, format!("`{}` is not paired", k.label(v)))))
        .collect()
}

pub fn write_involution(k: &SimplicialComplex, inv: &[usize]) -> String {
    let mut out = String::new();
    for (v, &w) in inv.iter().enumerate() {
        if v <= w {
            let _ = writeln!(out, "t {} {}", k.label(v), k.label(w));
        }
    }
    out
}

/// Vectors keyed by vertex id, from lines with the given keyword. All
/// vectors must have the same length.
pub fn parse_vectors(text: &str, key: &str) -> Result<BTreeMap<String, Vec<Rational>>> {
    let mut out = BTreeMap::new();
    let mut len = None;
    for (line, fields) in records(text) {
        if fields[0] != key || fields.len() < 2 {
            return Err(PremError::parse(line, format!("expected `{key} <id> <num/den> ...`")));
        }
        let v = rationals(line, &fields[2..])?;
        if *len.get_or_insert(v.len()) != v.len() {
            return Err(PremError::parse(line, "vectors of unequal length"));
        }
        if out.insert(fields[1].to_string(), v).is_some() {
            return Err(PremError::parse(line, format!("`{}` given twice", fields[1])));
        }
    }
    Ok(out)
}

/// One vector per vertex of `k`, in vertex order.
pub fn vectors_on(k: &SimplicialComplex, vectors: &BTreeMap<String, Vec<Rational>>) -> Result<Vec<Vec<Rational>>> {
    for id in vectors.keys() {
        if k.vertex_by_label(id).is_none() {
            return Err(PremError::UnknownVertex(id.clone()));
        }
    }
    k.labels()
        .iter()
        .map(|l| {
            vectors
                .get(l)
                .cloned()
                .ok_or_else(|| PremError::parse(0, format!("no value for `{l}`")))
        })
        .collect()
}

pub fn write_vectors(k: &SimplicialComplex, key: &str, vectors: &[Vec<Rational>]) -> String {
    let mut out = String::new();
    for (l, v) in k.labels().iter().zip(vectors) {
        vector_line(&mut out, key, l, v);
    }
    out
}

/// Lift on a subdivision of `parent`. Without `v` lines the subdivision is
/// the identity and `g` lines refer to vertices of `parent`.
pub fn parse_lift(text: &str, parent: &SimplicialComplex) -> Result<Lift> {
    let mut k = None;
    let mut child = ComplexBuilder::default();
    let mut coords: BTreeMap<String, (usize, BaryPoint)> = BTreeMap::new();
    let mut values: BTreeMap<String, (usize, Vec<Rational>)> = BTreeMap::new();
    for (line, fields) in records(text) {
        match fields[0] {
            "k" => {
                arity(line, &fields, 2)?;
                let n: usize = fields[1]
                    .parse()
                    .map_err(|_| PremError::parse(line, "bad codimension"))?;
                k = Some(n);
            }
            "b" => {
                if fields.len() < 4 || fields.len() % 2 != 0 {
                    return Err(PremError::parse(line, "expected `b <child> <parent> <num/den> ...`"));
                }
                let mut p = BaryPoint::new();
                for pair in fields[2..].chunks(2) {
                    let u = parent
                        .vertex_by_label(pair[0])
                        .ok_or_else(|| PremError::UnknownVertex(pair[0].to_string()))?;
                    p.insert(u, rationals(line, &pair[1..])?.remove(0));
                }
                coords.insert(fields[1].to_string(), (line, p));
            }
            "g" => {
                if fields.len() < 2 {
                    return Err(PremError::parse(line, "expected `g <vertex> <num/den> ...`"));
                }
                values.insert(fields[1].to_string(), (line, rationals(line, &fields[2..])?));
            }
            _ => {
                if !child.accept(line, &fields)? {
                    return Err(PremError::parse(
                        line,
                        format!("unexpected `{}` in a lift file", fields[0]),
                    ));
                }
            }
        }
    }
    let record = if child.labels.is_empty() {
        if !coords.is_empty() {
            return Err(PremError::parse(0, "`b` lines need the subdivided complex"));
        }
        SubdivisionRecord::identity(parent)
    } else {
        let (complex, _) = child.finish()?;
        let vertex_coords = complex
            .labels()
            .iter()
            .map(|l| {
                coords
                    .remove(l)
                    .map(|(_, p)| p)
                    .ok_or_else(|| PremError::parse(0, format!("no `b` line for `{l}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some((l, (line, _))) = coords.into_iter().next() {
            return Err(PremError::parse(line, format!("`b` line for unknown vertex `{l}`")));
        }
        let rec = SubdivisionRecord {
            parent: parent.clone(),
            child: complex,
            vertex_coords,
        };
        rec.check()?;
        rec
    };
    let k = k.or_else(|| values.values().next().map(|(_, v)| v.len())).unwrap_or(0);
    let mut vals = Vec::with_capacity(record.child.num_vertices());
    for l in record.child.labels() {
        let (_, v) = values
            .remove(l)
            .ok_or_else(|| PremError::parse(0, format!("no value for `{l}`")))?;
        vals.push(v);
    }
    if let Some((l, (line, _))) = values.into_iter().next() {
        return Err(PremError::UnknownVertex(format!("{l} (line {line})")));
    }
    Lift::new(record, vals, k)
}

pub fn write_lift(g: &Lift) -> String {
    let rec = &g.subdivision;
    let mut out = format!("k {}\n", g.k);
    let identity = rec.child == rec.parent && rec.vertex_coords.iter().enumerate().all(|(v, p)| *p == vertex_point(v));
    if !identity {
        out.push_str(&write_complex(&rec.child, None));
        for (l, p) in rec.child.labels().iter().zip(&rec.vertex_coords) {
            let _ = write!(out, "b {l}");
            for (&u, w) in p {
                let _ = write!(out, " {} {}", rec.parent.label(u), format_rational(w));
            }
            out.push('\n');
        }
    }
    out.push_str(&write_vectors(&rec.child, "g", &g.values));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cycle_cover, figure_eight};
    use crate::rational::frac;
    use crate::subdivision::iterated_barycentric;

    #[test]
    fn complex_round_trip() {
        let text = "# a triangle\nv a\nv b\nv c\ns a b c\nc a 0 0\nc b 1/2 0\nc c 0 -3/4\n";
        let (k, coords) = parse_complex(text).unwrap();
        assert_eq!(k.f_vector(), vec![3, 3, 1]);
        assert_eq!(coords.as_ref().unwrap()[2][1], frac(-3, 4));
        let again = write_complex(&k, coords.as_deref());
        assert_eq!(parse_complex(&again).unwrap(), (k, coords));
    }

    #[test]
    fn map_round_trip() {
        let (f, geo) = figure_eight();
        let b = MapBundle {
            map: f,
            source_coords: None,
            target_coords: Some(geo.coords),
        };
        let text = write_map(&b);
        assert_eq!(parse_map(&text).unwrap(), b);
        assert_eq!(write_map(&parse_map(&text).unwrap()), text);
    }

    #[test]
    fn lift_round_trip() {
        let f = cycle_cover(1, 4).unwrap();
        let rec = iterated_barycentric(&f.source, 1).unwrap();
        let values = (0..rec.child.num_vertices())
            .map(|i| vec![frac(i as i64, 3), frac(1, 2)])
            .collect();
        let g = Lift::new(rec, values, 2).unwrap();
        let text = write_lift(&g);
        assert_eq!(parse_lift(&text, &f.source).unwrap(), g);
        let plain = Lift::zero(&f, 1);
        assert_eq!(parse_lift(&write_lift(&plain), &f.source).unwrap(), plain);
    }

    #[test]
    fn involution_and_errors() {
        let (k, _) = parse_complex("v a\nv b\ns a b\n").unwrap();
        let inv = parse_involution("t a b\n", &k).unwrap();
        assert_eq!(inv, vec![1, 0]);
        assert_eq!(parse_involution(&write_involution(&k, &inv), &k).unwrap(), inv);
        assert!(matches!(
            parse_complex("v a\ns a z\n"),
            Err(PremError::UnknownVertex(_))
        ));
        assert!(matches!(
            parse_complex("v a\nq a\n"),
            Err(PremError::Parse { line: 2, .. })
        ));
        assert!(matches!(parse_complex("v a\nc a 1/0\n"), Err(PremError::Parse { .. })));
        assert!(parse_involution("t a a\n", &k).is_err());
        assert!(parse_map("[source]\nv a\n[target]\nv b\n[map]\n").is_err());
    }
}
