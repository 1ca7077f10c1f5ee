//! The `prem` command line.
//!
//! Every command builds a JSON report. With `--json` the report is printed
//! as is (with `"schema": 1`); otherwise it is flattened into `key: value`
//! lines, or, for commands that produce a file, the file is printed with
//! the summary as leading `#` comments.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use crate::cohomology::{quotient_by_involution, ChainComplex};
use crate::double_point::{accepted_model, double_point_complex, has_triple_points, invariant_components};
use crate::error::{PremError, Result};
use crate::generators;
use crate::geometry::GeometricComplex;
use crate::io::{
    parse_complex, parse_lift, parse_map, parse_vectors, vectors_on, write_complex, write_involution, write_lift,
    write_map, MapBundle,
};
use crate::lift::{construct_lift_3ptfree, BoundaryData};
use crate::obstruction::{
    certify_witness, construct_equivariant_witness, cover_report, dimension_condition, equivariant_map_exists,
};
use crate::plify::plify_lift;
use crate::stability::{in_g_phi, stable_to_r_report, LinearMapToRm};
use crate::verify::verify_embedding;

pub const SCHEMA: u32 = 1;

#[derive(Parser, Debug)]
#[command(name = "prem", version, about = "Lifting simplicial maps to embeddings in M x R^k")]
pub struct Cli {
    /// Machine-readable output.
    #[arg(long, global = true)]
    pub json: bool,
    /// Worker threads for parallel checks.
    #[arg(long, global = true, env = "PREM_JOBS")]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Write a built-in example.
    Gen {
        #[command(subcommand)]
        example: Example,
        /// Directory for all files of the example; without it the map file
        /// is printed.
        #[arg(long, global = true)]
        out: Option<PathBuf>,
    },
    /// Double-point complex and its involution table.
    Delta { map: PathBuf },
    /// Yang index of the double-point complex.
    Yang { map: PathBuf },
    /// Decide whether an equivariant map to the (k-1)-sphere exists.
    Obstruct {
        #[arg(short)]
        k: usize,
        map: PathBuf,
    },
    /// Construct a lift for a map without triple points.
    Lift {
        #[arg(short)]
        k: usize,
        map: PathBuf,
        /// Witness file with `w <pair-id> <num/den> ...` lines.
        #[arg(long)]
        alpha: Option<PathBuf>,
        /// Prescribed values (`g` lines) on a union of fibers.
        #[arg(long)]
        star: Vec<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Decide whether `f x g` is injective.
    Verify { map: PathBuf, lift: PathBuf },
    /// Linearize a lift on a computed subdivision.
    Plify {
        map: PathBuf,
        lift: PathBuf,
        /// Include per-stage data.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// General position and stability of a linear map to R^m.
    Stability {
        complex: PathBuf,
        values: PathBuf,
        /// Realized target triangulation for the G(phi) test.
        #[arg(long)]
        target: Option<PathBuf>,
    },
    /// Double-point parities, Yang index and verdict for a covering.
    #[command(name = "report-thm3")]
    ReportThm3 {
        map: PathBuf,
        /// Dimension; defaults to the dimension of the source.
        #[arg(short)]
        n: Option<usize>,
    },
}

#[derive(Subcommand, Debug, Clone)]
pub enum Example {
    CycleCover { p: usize, q: usize },
    CrossPolytope { m: usize },
    JoinLens { p: usize, q: usize },
    FigureEight,
    FoldPath,
}

/// What a command prints and its exit code.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub code: i32,
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| PremError::Io(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| PremError::Precondition(format!("cannot write {}: {e}", path.display())))
}

fn load_map(path: &Path) -> Result<MapBundle> {
    parse_map(&read(path)?)
}

fn flatten(prefix: &str, v: &Value, out: &mut String) {
    let scalar = |x: &Value| match x {
        Value::String(s) => s.clone(),
        other => other.to_string(),
    };
    match v {
        Value::Object(m) => {
            for (k, x) in m {
                let key = if prefix.is_empty() {
                    k.clone()
                } else {
                    format!("{prefix}.{k}")
                };
                flatten(&key, x, out);
            }
        }
        Value::Array(a) if a.iter().all(|x| !x.is_object() && !x.is_array()) => {
            let items: Vec<String> = a.iter().map(scalar).collect();
            out.push_str(&format!(
                "{prefix}:{}\n",
                items.iter().map(|s| format!(" {s}")).collect::<String>()
            ));
        }
        Value::Array(a) => {
            for (i, x) in a.iter().enumerate() {
                flatten(&format!("{prefix}[{i}]"), x, out);
            }
        }
        other => out.push_str(&format!("{prefix}: {}\n", scalar(other))),
    }
}

/// Renders a report; a `file` entry is printed verbatim after the summary.
fn finish(mut report: Value, code: i32, as_json: bool) -> Outcome {
    if as_json {
        report["schema"] = json!(SCHEMA);
        let stdout = serde_json::to_string_pretty(&report).expect("report serializes") + "\n";
        return Outcome { stdout, code };
    }
    let file = report.as_object_mut().and_then(|m| m.remove("file"));
    let mut summary = String::new();
    flatten("", &report, &mut summary);
    let stdout = match file {
        Some(Value::String(text)) => {
            let mut s: String = summary.lines().map(|l| format!("# {l}\n")).collect();
            s.push_str(&text);
            s
        }
        _ => summary,
    };
    Outcome { stdout, code }
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("report serializes")
}

fn gen(example: &Example, out: Option<&Path>) -> Result<Value> {
    let mut files: Vec<(String, String)> = Vec::new();
    let (name, bundle) = match *example {
        Example::CycleCover { p, q } => (
            format!("cycle_cover_{p}_{q}"),
            MapBundle::new(generators::cycle_cover(p, q)?),
        ),
        Example::CrossPolytope { m } => {
            let (c, inv) = generators::cross_polytope(m)?;
            let name = format!("cross_polytope_{m}");
            files.push((format!("{name}.complex"), write_complex(&c, None)));
            files.push((format!("{name}.inv"), write_involution(&c, &inv)));
            (name, MapBundle::new(generators::cross_polytope_cover(m)?))
        }
        Example::JoinLens { p, q } => {
            let (c, _) = generators::join_lens_action(p, q)?;
            let name = format!("join_lens_{p}_{q}");
            files.push((format!("{name}.complex"), write_complex(&c, None)));
            (name, MapBundle::new(generators::join_lens(p, q)?))
        }
        Example::FigureEight => {
            let (f, geo) = generators::figure_eight();
            (
                "figure_eight".to_string(),
                MapBundle {
                    map: f,
                    source_coords: None,
                    target_coords: Some(geo.coords),
                },
            )
        }
        Example::FoldPath => ("fold_path".to_string(), MapBundle::new(generators::fold_path())),
    };
    let map_text = write_map(&bundle);
    files.insert(0, (format!("{name}.map"), map_text.clone()));
    let mut report = json!({
        "command": "gen",
        "example": name,
        "source_f_vector": bundle.map.source.f_vector(),
        "target_f_vector": bundle.map.target.f_vector(),
        "files": files.iter().map(|(n, _)| n.clone()).collect::<Vec<_>>(),
    });
    match out {
        Some(dir) => {
            fs::create_dir_all(dir)
                .map_err(|e| PremError::Precondition(format!("cannot create {}: {e}", dir.display())))?;
            for (n, text) in &files {
                write(&dir.join(n), text)?;
            }
        }
        None => report["file"] = json!(map_text),
    }
    Ok(report)
}

fn delta(bundle: &MapBundle) -> Result<Value> {
    let (d, rounds) = accepted_model(&bundle.map, 2)?;
    let comps = invariant_components(&d);
    let file = write_complex(&d.complex, None) + &write_involution(&d.complex, &d.involution);
    Ok(json!({
        "command": "delta",
        "model_subdivisions": rounds,
        "f_vector": d.complex.f_vector(),
        "components": comps.len(),
        "invariant_components": comps.iter().filter(|c| c.invariant).count(),
        "file": file,
    }))
}

fn yang(bundle: &MapBundle) -> Result<Value> {
    let (d, rounds) = accepted_model(&bundle.map, 2)?;
    let q = quotient_by_involution(&d)?;
    let index = crate::cohomology::yang_index_of(&q)?;
    Ok(json!({
        "command": "yang",
        "model_subdivisions": rounds,
        "yang_index": index,
        "quotient_f_vector": q.quotient().f_vector(),
        "quotient_betti_mod2": ChainComplex::new(q.quotient()).betti(),
    }))
}

fn obstruct(bundle: &MapBundle, k: usize) -> Result<(Value, i32)> {
    let f = &bundle.map;
    let (d, rounds) = accepted_model(f, 2)?;
    let v = equivariant_map_exists(&d, k)?;
    let (n, m) = (f.source.dim().max(0) as usize, f.target.dim().max(0) as usize);
    let cond = dimension_condition(n, m, k);
    let mut notes = Vec::new();
    if !cond {
        notes.push(format!(
            "2(m+k) >= 3(n+1) fails for n={n}, m={m}, k={k}: the verdict does not decide whether f is a {k}-prem"
        ));
    }
    let mut report = to_value(&v);
    report["command"] = json!("obstruct");
    report["model_subdivisions"] = json!(rounds);
    report["dimension_condition"] = json!(cond);
    report["notes"] = json!(notes);
    Ok((report, v.exit_code()))
}

fn lift(bundle: &MapBundle, k: usize, alpha: Option<&Path>, star: &[PathBuf]) -> Result<Value> {
    let f = &bundle.map;
    f.require_non_degenerate()?;
    if let Some([a, b, c]) = has_triple_points(f)? {
        return Err(PremError::TriplePointsPresent(format!(
            "{:?}, {:?} and {:?} share an image",
            f.source.labels_of(&a),
            f.source.labels_of(&b),
            f.source.labels_of(&c)
        )));
    }
    let d = double_point_complex(f)?;
    let witness = match alpha {
        Some(path) => {
            let vectors = vectors_on(&d.complex, &parse_vectors(&read(path)?, "w")?)?;
            certify_witness(&d.complex, &d.involution, k, vectors)?
        }
        None => construct_equivariant_witness(&d, k)?,
    };
    let mut boundary = BoundaryData::default();
    for path in star {
        for (id, v) in parse_vectors(&read(path)?, "g")? {
            let u = f
                .source
                .vertex_by_label(&id)
                .ok_or_else(|| PremError::UnknownVertex(id.clone()))?;
            boundary.values.insert(u, v);
        }
    }
    let r = construct_lift_3ptfree(f, &witness, &boundary)?;
    Ok(json!({
        "command": "lift",
        "k": k,
        "verdict": r.certificate.verdict,
        "homotopy": to_value(&r.homotopy),
        "retries": r.retries,
        "vertices": r.lift.subdivision.child.num_vertices(),
        "file": write_lift(&r.lift),
    }))
}

fn verify(bundle: &MapBundle, lift_path: &Path) -> Result<(Value, i32)> {
    let g = parse_lift(&read(lift_path)?, &bundle.map.source)?;
    let cert = verify_embedding(&bundle.map, &g)?;
    let code = if cert.verdict { 0 } else { 1 };
    let mut report = to_value(&cert);
    report["command"] = json!("verify");
    Ok((report, code))
}

fn plify(bundle: &MapBundle, lift_path: &Path, trace: bool) -> Result<Value> {
    let g = parse_lift(&read(lift_path)?, &bundle.map.source)?;
    let r = plify_lift(&bundle.map, &g)?;
    let mut report = json!({
        "command": "plify",
        "verdict": r.certificate.verdict,
        "vertices": r.lift.subdivision.child.num_vertices(),
        "hull_pairs_checked": r.hull_checks.len(),
        "hulls_disjoint": r.hull_checks.iter().all(|h| h.disjoint),
        "adjacent_pairs": r.adjacent_pairs,
        "protected_stars_unchanged": r.protected_stars_unchanged,
        "file": write_lift(&r.lift),
    });
    if trace {
        report["stages"] = to_value(&r.stages);
        report["hull_checks"] = to_value(&r.hull_checks);
    }
    Ok(report)
}

fn stability(complex: &Path, values: &Path, target: Option<&Path>) -> Result<Value> {
    let (k, _) = parse_complex(&read(complex)?)?;
    let vectors: BTreeMap<String, _> = parse_vectors(&read(values)?, "g")?;
    let vals = vectors_on(&k, &vectors)?;
    let m = vals.first().map_or(1, Vec::len);
    let f = LinearMapToRm::new(k, m, vals)?;
    let mut report = json!({
        "command": "stability",
        "m": m,
        "general_position": crate::stability::is_general_position_config(&f.values),
    });
    if let Some(path) = target {
        let (l, coords) = parse_complex(&read(path)?)?;
        let coords = coords.ok_or_else(|| PremError::Precondition("target complex needs `c` lines".into()))?;
        let inside = in_g_phi(&f, &GeometricComplex::new(l, coords)?)?;
        report["in_g_phi"] = json!(inside);
        report["conclusion"] = json!(if inside {
            "in G(phi) hence stable"
        } else {
            "not in G(phi) (stability undecided)"
        });
    } else if m != 1 {
        return Err(PremError::InvalidParameter(format!(
            "maps to R^{m} need --target; the stability report covers m = 1"
        )));
    }
    if m == 1 {
        report["report"] = to_value(&stable_to_r_report(&f)?);
    }
    Ok(report)
}

fn report_thm3(bundle: &MapBundle, n: Option<usize>) -> Result<(Value, i32)> {
    let f = &bundle.map;
    let n = n.unwrap_or(f.source.dim().max(0) as usize);
    let r = cover_report(f, n)?;
    let mut report = to_value(&r);
    report["command"] = json!("report-thm3");
    Ok((report, r.exit_code()))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let (report, code) = match &cli.command {
        Command::Gen { example, out } => (gen(example, out.as_deref())?, 0),
        Command::Delta { map } => (delta(&load_map(map)?)?, 0),
        Command::Yang { map } => (yang(&load_map(map)?)?, 0),
        Command::Obstruct { k, map } => obstruct(&load_map(map)?, *k)?,
        Command::Lift {
            k,
            map,
            alpha,
            star,
            out,
        } => {
            let mut report = lift(&load_map(map)?, *k, alpha.as_deref(), star)?;
            save(&mut report, out.as_deref())?;
            (report, 0)
        }
        Command::Verify { map, lift } => verify(&load_map(map)?, lift)?,
        Command::Plify { map, lift, trace, out } => {
            let mut report = plify(&load_map(map)?, lift, *trace)?;
            save(&mut report, out.as_deref())?;
            (report, 0)
        }
        Command::Stability {
            complex,
            values,
            target,
        } => (stability(complex, values, target.as_deref())?, 0),
        Command::ReportThm3 { map, n } => report_thm3(&load_map(map)?, *n)?,
    };
    Ok(finish(report, code, cli.json))
}

/// Moves the `file` entry of a report to disk.
fn save(report: &mut Value, out: Option<&Path>) -> Result<()> {
    if let Some(path) = out {
        if let Some(Value::String(text)) = report.as_object_mut().and_then(|m| m.remove("file")) {
            write(path, &text)?;
        }
    }
    Ok(())
}

/// Runs a parsed command line on a thread pool of the requested size.
pub fn run(cli: &Cli) -> Result<Outcome> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.jobs {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| PremError::Internal(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli))
}

/// Parses `args` (including the program name) and runs the command.
/// Returns standard output, standard error and the exit code.
pub fn execute<I, T>(args: I) -> (String, String, i32)
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => 0,
                _ => 64,
            };
            let text = e.render().to_string();
            return if code == 0 {
                (text, String::new(), 0)
            } else {
                (String::new(), text, code)
            };
        }
    };
    match run(&cli) {
        Ok(o) => (o.stdout, String::new(), o.code),
        Err(e) => {
            let code = e.exit_code();
            let stdout = if cli.json {
                let v = json!({ "schema": SCHEMA, "error": { "code": code, "message": e.to_string() } });
                serde_json::to_string_pretty(&v).expect("error serializes") + "\n"
            } else {
                String::new()
            };
            (stdout, format!("error: {e}\n"), code)
        }
    }
}
