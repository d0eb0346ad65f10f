//! One-shot command line frontend: every subcommand reads a JSON space
//! description (or the database), computes one invariant and prints it,
//! either in display form or, with --json, as canonical JSON.
//!
//! Exit codes: 0 success, 1 domain error (the input is well formed but
//! the question has no answer there), 2 input or parse error.

use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Value};

use mds_core::abgroup::{AbelianGroup, GroupElement};
use mds_core::cone::Cone;
use mds_core::coxdb::{self, Database, DbRecord, ExportFormat};
use mds_core::deadline;
use mds_core::fan::Fan;
use mds_core::gitfan;
use mds_core::linalg::{IntMatrix, IntVec};
use mds_core::ring::{ring_from_ap, GradedRing};
use mds_core::space::MoriDreamSpace;
use mds_core::spacefile::SpaceFile;
use mds_core::VarMask;

#[derive(Parser)]
#[command(name = "mds", version, about = "Mori dream space calculator")]
struct Cli {
    /// Emit canonical JSON instead of display text.
    #[arg(long, global = true)]
    json: bool,

    /// Skip the homogeneity check on the input relations.
    #[arg(long, global = true)]
    nocheck: bool,

    /// Cap the number of worker threads.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,

    /// Give up after this many seconds.
    #[arg(long, global = true, value_name = "SECONDS")]
    timeout: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Display form and defining tuple of the space.
    Show { file: PathBuf },
    /// Picard group and class group modulo Picard group.
    Pic { file: PathBuf },
    /// Local class group at a relevant face, given as indices "1,5,6".
    Localcl { file: PathBuf, face: String },
    /// Effective, moving or semiample cone.
    Cones { file: PathBuf, which: WhichCone },
    /// Mori chamber decomposition of the effective cone.
    Chambers { file: PathBuf },
    /// GIT fan of the graded ring; the ample class is ignored.
    Gitfan { file: PathBuf },
    /// Strata of the singular locus, as sets of variable indices.
    Sing { file: PathBuf },
    /// Smoothness test.
    Smooth { file: PathBuf },
    /// Smoothness of the total coordinate space along relevant strata.
    Quasismooth { file: PathBuf },
    /// Are all local class groups trivial?
    Factorial { file: PathBuf },
    /// Are all local class groups finite?
    Qfactorial { file: PathBuf },
    /// Fano test.
    Fano { file: PathBuf },
    /// Gorenstein index, the order of the canonical class modulo Picard.
    Gorenstein { file: PathBuf },
    /// Anticanonical class.
    Anticanonical { file: PathBuf },
    /// Intersection number of dim-many classes, each given as "a,b,c".
    Intersect {
        file: PathBuf,
        #[arg(required = true, num_args = 1..)]
        classes: Vec<String>,
    },
    /// Self-intersection numbers of the generator classes (surfaces).
    Selfint { file: PathBuf },
    /// Intersection graph of the generator divisors (surfaces).
    Graph {
        file: PathBuf,
        /// Output language for the graph.
        #[arg(long, value_enum)]
        format: Option<GraphFormat>,
    },
    /// Fan of the canonical toric ambient variety.
    Ambientfan { file: PathBuf },
    /// Faces of the orthant whose stratum meets the zero set.
    Afaces { file: PathBuf },
    /// Build a ring from complexity-one data {"a": [...], "p": [...]}.
    Ringfromap { file: PathBuf },
    /// Cox ring database operations.
    #[command(subcommand)]
    Db(DbCommand),
}

#[derive(Subcommand)]
enum DbCommand {
    /// List records matching an AND query of substrings.
    Search {
        #[arg(long, value_name = "FILE")]
        db: PathBuf,
        query: Option<String>,
    },
    /// Print one record.
    Get {
        #[arg(long, value_name = "FILE")]
        db: PathBuf,
        id: u64,
    },
    /// Export one record as "spacefile" or "latex".
    Export {
        #[arg(long, value_name = "FILE")]
        db: PathBuf,
        id: u64,
        format: String,
    },
    /// Validate a record file and append it to the database.
    Add {
        #[arg(long, value_name = "FILE")]
        db: PathBuf,
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum WhichCone {
    Eff,
    Mov,
    Sample,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphFormat {
    Dot,
    Tikz,
}

enum Failure {
    /// Unreadable, unparsable or malformed input. Exit code 2.
    Input(String),
    /// Well formed input, unanswerable question. Exit code 1.
    Domain(String),
}

type CmdResult = Result<String, Failure>;

fn main() {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let timeout = cli.timeout.map(Duration::from_secs);
    let outcome = deadline::run_with_deadline(timeout, || {
        run(&cli.command, cli.json, cli.nocheck)
    });
    match outcome {
        Err(_) => {
            eprintln!("error: timed out after {} s", cli.timeout.unwrap_or(0));
            std::process::exit(1);
        }
        Ok(Ok(text)) => {
            use std::io::Write;
            // A closed pipe (e.g. piping into head) is not an error.
            let mut out = std::io::stdout().lock();
            let _ = writeln!(out, "{text}");
        }
        Ok(Err(Failure::Domain(msg))) => {
            eprintln!("error: {msg}");
            std::process::exit(1);
        }
        Ok(Err(Failure::Input(msg))) => {
            eprintln!("error: {msg}");
            std::process::exit(2);
        }
    }
}

fn run(command: &Command, json: bool, nocheck: bool) -> CmdResult {
    match command {
        Command::Show { file } => {
            let space = load_space(file, nocheck)?;
            if json {
                let tuple = SpaceFile::from_ring(space.ring(), space.ample_class())
                    .map_err(|e| Failure::Domain(e.to_string()))?;
                Ok(pretty(&json!({
                    "r": tuple.nvars(),
                    "relations": tuple.relations,
                    "grading": {
                        "free_rank": tuple.grading.free_rank,
                        "torsion": tuple.grading.torsion,
                        "matrix": tuple.grading.matrix,
                    },
                    "ample": tuple.ample,
                })))
            } else {
                Ok(space.descriptor())
            }
        }
        Command::Pic { file } => {
            let space = load_space(file, nocheck)?;
            let pic = space.picard_group();
            let group = pic.abstract_type();
            let factor = pic.factor_group();
            if json {
                let generators: Vec<Value> = pic
                    .generators()
                    .iter()
                    .map(|e| vec_json(e.coords()))
                    .collect();
                Ok(pretty(&json!({
                    "picard": group_json(&group),
                    "factor": group_json(&factor),
                    "generators": generators,
                })))
            } else {
                Ok(format!("{group}\n{factor}"))
            }
        }
        Command::Localcl { file, face } => {
            let space = load_space(file, nocheck)?;
            let mask = parse_face(face, space.ring().nvars())?;
            if !space.relevant_faces().contains(&mask) {
                return Err(Failure::Domain(format!(
                    "{} is not a relevant face of this space",
                    mask_set(mask)
                )));
            }
            let group = space.local_class_group(mask);
            if json {
                Ok(pretty(&group_json(&group)))
            } else {
                Ok(group.to_string())
            }
        }
        Command::Cones { file, which } => {
            let space = load_space(file, nocheck)?;
            let cone = match which {
                WhichCone::Eff => space.effective_cone(),
                WhichCone::Mov => space.moving_cone().clone(),
                WhichCone::Sample => space
                    .sample_cone()
                    .ok_or_else(|| {
                        Failure::Domain(
                            "an affine quotient has no semiample cone".to_string(),
                        )
                    })?
                    .clone(),
            };
            if json {
                Ok(pretty(&cone_json(&cone)))
            } else {
                Ok(cone.descriptor())
            }
        }
        Command::Chambers { file } => {
            let space = load_space(file, nocheck)?;
            let fan = space.git_fan();
            if json {
                Ok(pretty(&fan_json(&fan)))
            } else {
                Ok(fan.descriptor())
            }
        }
        Command::Gitfan { file } => {
            let (ring, _) = load_ring(file, nocheck)?;
            let fan = gitfan::git_fan(&ring);
            if json {
                Ok(pretty(&fan_json(&fan)))
            } else {
                Ok(fan.descriptor())
            }
        }
        Command::Sing { file } => {
            let space = load_space(file, nocheck)?;
            let strata = space.singular_strata();
            if json {
                Ok(pretty(&masks_json(&strata)))
            } else if strata.is_empty() {
                Ok("none".to_string())
            } else {
                Ok(strata
                    .iter()
                    .map(|&m| mask_set(m))
                    .collect::<Vec<_>>()
                    .join("\n"))
            }
        }
        Command::Smooth { file } => bool_answer(load_space(file, nocheck)?.is_smooth(), json),
        Command::Quasismooth { file } => {
            bool_answer(load_space(file, nocheck)?.is_quasismooth(), json)
        }
        Command::Factorial { file } => {
            bool_answer(load_space(file, nocheck)?.is_factorial(), json)
        }
        Command::Qfactorial { file } => {
            bool_answer(load_space(file, nocheck)?.is_qfactorial(), json)
        }
        Command::Fano { file } => {
            let space = load_space(file, nocheck)?;
            match space.is_fano() {
                Some(answer) => bool_answer(answer, json),
                None => Err(Failure::Domain(
                    "the Fano test needs a projective space with Q-Gorenstein \
                     anticanonical class"
                        .to_string(),
                )),
            }
        }
        Command::Gorenstein { file } => {
            let space = load_space(file, nocheck)?;
            match space.gorenstein_index() {
                Some(index) => {
                    if json {
                        Ok(pretty(&json!({ "index": big_json(&index) })))
                    } else {
                        Ok(index.to_string())
                    }
                }
                None => Err(Failure::Domain(
                    "the anticanonical class has infinite order modulo the \
                     Picard group"
                        .to_string(),
                )),
            }
        }
        Command::Anticanonical { file } => {
            let space = load_space(file, nocheck)?;
            let k = space.class_group().clone();
            let anti = space.anticanonical_class();
            if json {
                Ok(pretty(&class_json(&k, &anti)))
            } else {
                Ok(fmt_class(&k, &anti))
            }
        }
        Command::Intersect { file, classes } => {
            let space = load_space(file, nocheck)?;
            let k = space.class_group().clone();
            let parsed: Result<Vec<GroupElement>, Failure> =
                classes.iter().map(|c| parse_class(&k, c)).collect();
            let value = space
                .intersection_number(&parsed?)
                .map_err(|e| Failure::Domain(e.to_string()))?;
            if json {
                Ok(pretty(&json!({ "value": value.to_string() })))
            } else {
                Ok(value.to_string())
            }
        }
        Command::Selfint { file } => {
            let space = load_space(file, nocheck)?;
            let values = space
                .self_intersections()
                .map_err(|e| Failure::Domain(e.to_string()))?;
            if json {
                let list: Vec<Value> =
                    values.iter().map(|v| Value::from(v.to_string())).collect();
                Ok(pretty(&Value::from(list)))
            } else {
                let parts: Vec<String> = values.iter().map(|v| v.to_string()).collect();
                Ok(format!("[{}]", parts.join(", ")))
            }
        }
        Command::Graph { file, format } => {
            let space = load_space(file, nocheck)?;
            let edges = space
                .intersection_graph()
                .map_err(|e| Failure::Domain(e.to_string()))?;
            let edges: Vec<(usize, usize)> =
                edges.iter().map(|&(i, j)| (i + 1, j + 1)).collect();
            let nvars = space.ring().nvars();
            if json {
                let list: Vec<Value> =
                    edges.iter().map(|&(i, j)| json!([i, j])).collect();
                Ok(pretty(&Value::from(list)))
            } else {
                match format {
                    None => Ok(edges
                        .iter()
                        .map(|&(i, j)| format!("{{{i}, {j}}}"))
                        .collect::<Vec<_>>()
                        .join("\n")),
                    Some(GraphFormat::Dot) => Ok(render_dot(nvars, &edges)),
                    Some(GraphFormat::Tikz) => Ok(render_tikz(nvars, &edges)),
                }
            }
        }
        Command::Ambientfan { file } => {
            let space = load_space(file, nocheck)?;
            let fan = space.ambient_fan();
            if json {
                Ok(pretty(&fan_json(&fan)))
            } else {
                Ok(fan.descriptor())
            }
        }
        Command::Afaces { file } => {
            let (ring, _) = load_ring(file, nocheck)?;
            let faces = ring.a_faces();
            if json {
                Ok(pretty(&masks_json(faces)))
            } else {
                Ok(faces
                    .iter()
                    .map(|&m| mask_set(m))
                    .collect::<Vec<_>>()
                    .join("\n"))
            }
        }
        Command::Ringfromap { file } => {
            let data = read_ap(file)?;
            let ring = ring_from_ap(&data.0, &data.1)
                .map_err(|e| Failure::Input(e.to_string()))?;
            if json {
                let tuple = SpaceFile::from_ring(&ring, &ring.class_group().zero())
                    .map_err(|e| Failure::Domain(e.to_string()))?;
                Ok(pretty(&serde_json::to_value(&tuple).expect("serializable")))
            } else {
                let mut lines = vec![ring.descriptor()];
                for (i, g) in ring.relations().iter().enumerate() {
                    lines.push(format!("relation {}: {}", i + 1, g));
                }
                let m = ring.grading().matrix();
                for i in 0..m.rows {
                    let row: Vec<String> =
                        m.row(i).iter().map(|x| x.to_string()).collect();
                    lines.push(format!("degree row {}: [{}]", i + 1, row.join(", ")));
                }
                Ok(lines.join("\n"))
            }
        }
        Command::Db(op) => run_db(op, json),
    }
}

fn run_db(op: &DbCommand, json: bool) -> CmdResult {
    match op {
        DbCommand::Search { db, query } => {
            let db = load_db(db)?;
            let hits = db.search(query.as_deref().unwrap_or(""));
            if json {
                let list: Vec<Value> = hits
                    .iter()
                    .map(|r| serde_json::to_value(r).expect("serializable"))
                    .collect();
                Ok(pretty(&Value::from(list)))
            } else if hits.is_empty() {
                Ok("no matches".to_string())
            } else {
                Ok(hits
                    .iter()
                    .map(|r| format!("{}: {}", r.id, r.name))
                    .collect::<Vec<_>>()
                    .join("\n"))
            }
        }
        DbCommand::Get { db, id } => {
            let db = load_db(db)?;
            let record = db.get(*id).map_err(|e| Failure::Domain(e.to_string()))?;
            if json {
                Ok(pretty(&serde_json::to_value(record).expect("serializable")))
            } else {
                Ok(render_record(record))
            }
        }
        DbCommand::Export { db, id, format } => {
            let format: ExportFormat =
                format.parse().map_err(Failure::Input)?;
            let db = load_db(db)?;
            let record = db.get(*id).map_err(|e| Failure::Domain(e.to_string()))?;
            Ok(coxdb::export(record, format).trim_end().to_string())
        }
        DbCommand::Add { db: path, file } => {
            let mut db = load_db(path)?;
            let text = read_file(file)?;
            let record: DbRecord = serde_json::from_str(&text)
                .map_err(|e| Failure::Input(format!("{}: {e}", file.display())))?;
            let id = record.id;
            db.add(record).map_err(|e| match e {
                coxdb::DbError::DuplicateId { .. } => Failure::Domain(e.to_string()),
                other => Failure::Input(other.to_string()),
            })?;
            db.save(path).map_err(|e| Failure::Domain(e.to_string()))?;
            Ok(format!("added record {id}"))
        }
    }
}

fn read_file(path: &Path) -> Result<String, Failure> {
    std::fs::read_to_string(path)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn load_ring(path: &Path, nocheck: bool) -> Result<(GradedRing, GroupElement), Failure> {
    let text = read_file(path)?;
    let file =
        SpaceFile::from_json(&text).map_err(|e| Failure::Input(e.to_string()))?;
    file.build(!nocheck).map_err(|e| Failure::Input(e.to_string()))
}

fn load_space(path: &Path, nocheck: bool) -> Result<MoriDreamSpace, Failure> {
    let (ring, ample) = load_ring(path, nocheck)?;
    let space = if nocheck {
        MoriDreamSpace::new_unchecked(ring, ample)
    } else {
        MoriDreamSpace::new(ring, ample)
    };
    space.map_err(|e| Failure::Domain(e.to_string()))
}

fn load_db(path: &Path) -> Result<Database, Failure> {
    Database::load(path).map_err(|e| {
        Failure::Input(format!("{}: {e}", path.display()))
    })
}

fn read_ap(path: &Path) -> Result<(IntMatrix, IntMatrix), Failure> {
    #[derive(serde::Deserialize)]
    struct ApFile {
        a: Vec<Vec<i64>>,
        p: Vec<Vec<i64>>,
    }
    let text = read_file(path)?;
    let parsed: ApFile = serde_json::from_str(&text)
        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
    for (i, v) in parsed.a.iter().enumerate() {
        if v.len() != 2 {
            return Err(Failure::Input(format!(
                "plane vector {} has {} coordinates, expected 2",
                i + 1,
                v.len()
            )));
        }
    }
    let cols: Vec<IntVec> = parsed
        .a
        .iter()
        .map(|v| v.iter().map(|&x| BigInt::from(x)).collect())
        .collect();
    let a = IntMatrix::from_cols(&cols);
    if parsed.p.is_empty() {
        return Err(Failure::Input("empty matrix p".to_string()));
    }
    let width = parsed.p[0].len();
    if parsed.p.iter().any(|row| row.len() != width) {
        return Err(Failure::Input("ragged matrix p".to_string()));
    }
    let p = IntMatrix::from_rows(&parsed.p);
    Ok((a, p))
}

fn bool_answer(answer: bool, json: bool) -> CmdResult {
    if json {
        Ok(pretty(&Value::from(answer)))
    } else {
        Ok(answer.to_string())
    }
}

fn parse_face(text: &str, nvars: usize) -> Result<VarMask, Failure> {
    let cleaned = text.trim().trim_start_matches('{').trim_end_matches('}');
    let mut mask: VarMask = 0;
    if cleaned.trim().is_empty() {
        return Ok(0);
    }
    for part in cleaned.split(',') {
        let i: usize = part.trim().parse().map_err(|_| {
            Failure::Input(format!("malformed face index {:?}", part.trim()))
        })?;
        if i == 0 || i > nvars {
            return Err(Failure::Input(format!(
                "face index {i} out of range 1..={nvars}"
            )));
        }
        let bit: VarMask = 1 << (i - 1);
        if mask & bit != 0 {
            return Err(Failure::Input(format!("face index {i} repeated")));
        }
        mask |= bit;
    }
    Ok(mask)
}

fn parse_class(k: &AbelianGroup, text: &str) -> Result<GroupElement, Failure> {
    let coords: Result<Vec<i64>, _> =
        text.split(',').map(|p| p.trim().parse::<i64>()).collect();
    let coords = coords
        .map_err(|_| Failure::Input(format!("malformed class {text:?}")))?;
    k.element_from_i64(&coords)
        .map_err(|e| Failure::Input(e.to_string()))
}

fn fmt_class(k: &AbelianGroup, e: &GroupElement) -> String {
    let coords = e.coords();
    let free: Vec<String> =
        coords[..k.rank()].iter().map(|x| x.to_string()).collect();
    let tors: Vec<String> =
        coords[k.rank()..].iter().map(|x| x.to_string()).collect();
    if tors.is_empty() {
        format!("[{}]", free.join(", "))
    } else {
        format!("[{}; {}]", free.join(", "), tors.join(", "))
    }
}

fn mask_set(mask: VarMask) -> String {
    let indices: Vec<String> = (0..128)
        .filter(|i| mask & (1u128 << i) != 0)
        .map(|i| (i + 1).to_string())
        .collect();
    format!("{{{}}}", indices.join(", "))
}

fn render_record(record: &DbRecord) -> String {
    let mut lines = vec![
        format!("id: {}", record.id),
        format!("name: {}", record.name),
        format!("description: {}", record.description),
        format!("tags: {}", record.tags.join(", ")),
    ];
    if let Some(d) = record.dim {
        lines.push(format!("dim: {d}"));
    }
    if let Some(p) = record.picard_number {
        lines.push(format!("picard number: {p}"));
    }
    lines.push(format!("source: {}", record.source));
    if let Ok((ring, _)) = record.data.build(true) {
        lines.push(format!("ring: {}", ring.descriptor()));
    }
    lines.join("\n")
}

fn render_dot(nvars: usize, edges: &[(usize, usize)]) -> String {
    let mut out = String::from("graph intersection {\n");
    for i in 1..=nvars {
        out.push_str(&format!("  T{i};\n"));
    }
    for &(i, j) in edges {
        out.push_str(&format!("  T{i} -- T{j};\n"));
    }
    out.push('}');
    out
}

fn render_tikz(nvars: usize, edges: &[(usize, usize)]) -> String {
    let mut out = String::from("\\begin{tikzpicture}\n");
    for i in 1..=nvars {
        let angle = (i - 1) * 360 / nvars;
        out.push_str(&format!(
            "  \\node (T{i}) at ({angle}:2.2cm) {{$T_{{{i}}}$}};\n"
        ));
    }
    for &(i, j) in edges {
        out.push_str(&format!("  \\draw (T{i}) -- (T{j});\n"));
    }
    out.push_str("\\end{tikzpicture}");
    out
}

fn pretty(value: &Value) -> String {
    serde_json::to_string_pretty(value).expect("serializable")
}

fn big_json(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) => Value::from(v),
        None => Value::from(x.to_string()),
    }
}

fn vec_json(v: &[BigInt]) -> Value {
    Value::from(v.iter().map(big_json).collect::<Vec<_>>())
}

fn group_json(g: &AbelianGroup) -> Value {
    json!({
        "rank": g.rank(),
        "torsion": g.torsion().iter().map(big_json).collect::<Vec<_>>(),
    })
}

fn class_json(k: &AbelianGroup, e: &GroupElement) -> Value {
    let coords = e.coords();
    json!({
        "free": vec_json(&coords[..k.rank()]),
        "torsion": vec_json(&coords[k.rank()..]),
    })
}

fn cone_json(c: &Cone) -> Value {
    json!({
        "ambient": c.ambient_dim(),
        "dim": c.dim(),
        "lineality": c.lineality_dim(),
        "rays": c.rays().iter().map(|r| vec_json(r)).collect::<Vec<_>>(),
        "lines": c.lines().iter().map(|r| vec_json(r)).collect::<Vec<_>>(),
    })
}

fn fan_json(fan: &Fan) -> Value {
    let mut cones: Vec<&Cone> = fan.max_cones().iter().collect();
    cones.sort_by(|a, b| (a.dim(), a.rays()).cmp(&(b.dim(), b.rays())));
    json!({
        "ambient": fan.ambient_dim(),
        "lineality": fan.lineality_dim(),
        "counts": fan.dim_counts(),
        "max_cones": cones.iter().map(|c| cone_json(c)).collect::<Vec<_>>(),
    })
}

fn masks_json(masks: &[VarMask]) -> Value {
    let list: Vec<Value> = masks
        .iter()
        .map(|&m| {
            Value::from(
                (0..128)
                    .filter(|i| m & (1u128 << i) != 0)
                    .map(|i| i + 1)
                    .collect::<Vec<usize>>(),
            )
        })
        .collect();
    Value::from(list)
}
