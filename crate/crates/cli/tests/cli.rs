//! End-to-end tests that spawn the binary against the bundled fixtures
//! and pin output text, JSON shape and exit codes.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};
use std::process::Command;

use mds_core::space::MoriDreamSpace;
use mds_core::spacefile::SpaceFile;

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn seed_db() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../data/coxdb.jsonl")
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_mds"))
        .args(args)
        .output()
        .expect("binary should spawn");
    (
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    )
}

fn temp_file(name: &str, contents: &str) -> PathBuf {
    let path = std::env::temp_dir().join(format!("mds-cli-{}-{name}", std::process::id()));
    std::fs::write(&path, contents).expect("temp file should be writable");
    path
}

fn lines_as_set(text: &str) -> BTreeSet<String> {
    text.lines().map(|l| l.to_string()).collect()
}

#[test]
fn show_prints_the_defining_tuple() {
    let (code, out, _) = run(&["show", &fixture("fourfold.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "MDS(8, 1, 4, [3, [2]])\n");

    let (code, out, _) = run(&["show", &fixture("quotient.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "MDS(10, 20, 4, [0, [2, 2, 2, 2]])\n");
}

#[test]
fn show_json_round_trips_through_the_parser() {
    let (code, out, _) = run(&["show", "--json", &fixture("fourfold.json")]);
    assert_eq!(code, 0);
    let file = SpaceFile::from_json(&out).expect("output should parse back");
    let (ring, ample) = file.build(true).expect("output should rebuild");
    let space = MoriDreamSpace::new(ring, ample).expect("rebuilt space is valid");
    assert_eq!(space.descriptor(), "MDS(8, 1, 4, [3, [2]])");
}

#[test]
fn pic_prints_picard_group_and_factor_group() {
    let (code, out, _) = run(&["pic", &fixture("fourfold.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "AG(3, [])\nAG(0, [2, 12, 12, 24])\n");

    let (code, out, _) = run(&["pic", &fixture("quadric.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "AG(2, [])\nAG(0, [3, 6])\n");
}

#[test]
fn cones_prints_descriptors() {
    let file = fixture("fourfold.json");
    let (code, out, _) = run(&["cones", &file, "sample"]);
    assert_eq!(code, 0);
    assert_eq!(out, "CONE(3, 3, 0, 8, 8)\n");
    let (code, out, _) = run(&["cones", &file, "mov"]);
    assert_eq!(code, 0);
    assert_eq!(out, "CONE(3, 3, 0, 4, 4)\n");
    let (code, out, _) = run(&["cones", &file, "eff"]);
    assert_eq!(code, 0);
    assert_eq!(out, "CONE(3, 3, 0, 4, 4)\n");
}

#[test]
fn sample_cone_of_an_affine_quotient_is_a_domain_error() {
    let (code, _, err) = run(&["cones", &fixture("quotient.json"), "sample"]);
    assert_eq!(code, 1);
    assert!(err.contains("affine"), "stderr was: {err}");
}

#[test]
fn chambers_prints_the_fan_descriptor() {
    let (code, out, _) = run(&["chambers", &fixture("fourfold.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "FAN(3, 0, [0, 0, 37])\n");
}

#[test]
fn gitfan_works_without_an_ample_class() {
    let (code, out, _) = run(&["gitfan", &fixture("quadric.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "FAN(2, 0, [0, 4])\n");
}

#[test]
fn sing_lists_the_singular_strata() {
    let (code, out, _) = run(&["sing", &fixture("quadric.json")]);
    assert_eq!(code, 0);
    let expected: BTreeSet<String> = [
        "{2, 3}",
        "{1, 4}",
        "{1, 2, 5}",
        "{1, 2, 6}",
        "{1, 5, 6}",
        "{1, 2, 5, 6}",
    ]
    .iter()
    .map(|s| s.to_string())
    .collect();
    assert_eq!(lines_as_set(&out), expected);
}

#[test]
fn smoothness_tests_on_the_del_pezzo_surface() {
    let file = fixture("delpezzo.json");
    let (code, out, _) = run(&["smooth", &file]);
    assert_eq!(code, 0);
    assert_eq!(out, "false\n");
    let (code, out, _) = run(&["quasismooth", &file]);
    assert_eq!(code, 0);
    assert_eq!(out, "false\n");
    let (code, out, _) = run(&["sing", &file]);
    assert_eq!(code, 0);
    assert_eq!(lines_as_set(&out), lines_as_set("{1}\n{4}"));
}

#[test]
fn fano_and_gorenstein_on_the_fourfold() {
    let file = fixture("fourfold.json");
    let (code, out, _) = run(&["fano", &file]);
    assert_eq!(code, 0);
    assert_eq!(out, "true\n");
    let (code, out, _) = run(&["gorenstein", &file]);
    assert_eq!(code, 0);
    assert_eq!(out, "4\n");
}

#[test]
fn anticanonical_class_with_and_without_torsion() {
    let (code, out, _) = run(&["anticanonical", &fixture("quadric.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "[0, 4]\n");
    let (code, out, _) = run(&["anticanonical", &fixture("fourfold.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "[0, 0, 6; 1]\n");
}

#[test]
fn localcl_accepts_relevant_faces_only() {
    let file = fixture("quadric.json");
    let (code, out, _) = run(&["localcl", &file, "{1, 5, 6}"]);
    assert_eq!(code, 0);
    assert_eq!(out, "AG(0, [2])\n");
    let (code, _, err) = run(&["localcl", &file, "1,2"]);
    assert_eq!(code, 1);
    assert!(err.contains("not a relevant face"), "stderr was: {err}");
    let (code, _, _) = run(&["localcl", &file, "0,3"]);
    assert_eq!(code, 2);
    let (code, _, _) = run(&["localcl", &file, "1,99"]);
    assert_eq!(code, 2);
}

#[test]
fn intersect_multiplies_hyperplane_classes() {
    let (code, out, _) = run(&["intersect", &fixture("plane.json"), "1", "1", "1"]);
    assert_eq!(code, 0);
    assert_eq!(out, "2\n");
}

#[test]
fn intersect_rejects_malformed_classes() {
    let (code, _, _) = run(&["intersect", &fixture("plane.json"), "1", "x", "1"]);
    assert_eq!(code, 2);
}

#[test]
fn selfint_and_graph_on_the_del_pezzo_surface() {
    let file = fixture("delpezzo.json");
    let (code, out, _) = run(&["selfint", &file]);
    assert_eq!(code, 0);
    assert_eq!(out, "[1, 1, 1, 1]\n");
    let (code, out, _) = run(&["graph", &file]);
    assert_eq!(code, 0);
    let expected = lines_as_set("{1, 2}\n{1, 3}\n{1, 4}\n{2, 3}\n{2, 4}\n{3, 4}");
    assert_eq!(lines_as_set(&out), expected);
}

#[test]
fn graph_renders_dot_and_tikz() {
    let file = fixture("delpezzo.json");
    let (code, out, _) = run(&["graph", &file, "--format", "dot"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("graph intersection {"));
    assert!(out.contains("  T1 -- T2;"));
    assert!(out.trim_end().ends_with('}'));
    let (code, out, _) = run(&["graph", &file, "--format", "tikz"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("\\begin{tikzpicture}"));
    assert!(out.contains("\\draw (T1) -- (T2);"));
    assert!(out.trim_end().ends_with("\\end{tikzpicture}"));
}

#[test]
fn graph_needs_a_surface() {
    let (code, _, err) = run(&["graph", &fixture("quadric.json")]);
    assert_eq!(code, 1);
    assert!(err.contains("surface"), "stderr was: {err}");
}

#[test]
fn ringfromap_builds_the_ring_from_plane_data() {
    let (code, out, _) = run(&["ringfromap", &fixture("planedata.json")]);
    assert_eq!(code, 0);
    assert!(out.starts_with("GR(5, 1, [1, []])\n"), "stdout was: {out}");
    assert!(out.contains("relation 1: T1^2 + T2*T3 + T4*T5"));
    assert!(out.contains("degree row 1: [1, 1, 1, 1, 1]"));
}

#[test]
fn afaces_lists_faces_of_the_orthant() {
    let (code, out, _) = run(&["afaces", &fixture("delpezzo.json")]);
    assert_eq!(code, 0);
    let faces = lines_as_set(&out);
    assert_eq!(faces.len(), 9);
    assert!(faces.contains("{}"));
    assert!(faces.contains("{1, 2, 3, 4}"));
    assert!(faces.contains("{2, 3}"));
}

#[test]
fn ambientfan_prints_the_toric_fan() {
    let (code, out, _) = run(&["ambientfan", &fixture("delpezzo.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "FAN(3, 0, [0, 1, 2])\n");
}

#[test]
fn missing_file_is_an_input_error() {
    let (code, _, err) = run(&["show", "/no/such/file.json"]);
    assert_eq!(code, 2);
    assert!(err.contains("file.json"));
}

#[test]
fn malformed_json_is_an_input_error() {
    let path = temp_file("garbage.json", "this is not json");
    let (code, _, _) = run(&["show", path.to_str().unwrap()]);
    assert_eq!(code, 2);
}

#[test]
fn inhomogeneous_relation_is_an_input_error_unless_nocheck() {
    let path = temp_file(
        "inhomog.json",
        r#"{"vars": 2, "relations": ["T1^2 + T2"],
            "grading": {"free_rank": 1, "matrix": [[1, 1]]}, "ample": [1]}"#,
    );
    let file = path.to_str().unwrap();
    let (code, _, err) = run(&["show", file]);
    assert_eq!(code, 2);
    assert!(err.contains("homogeneous"), "stderr was: {err}");
    let (code, _, _) = run(&["show", "--nocheck", file]);
    assert_eq!(code, 0);
}

fn quadric_with_ample(name: &str, ample: &str) -> PathBuf {
    temp_file(
        name,
        &format!(
            r#"{{"vars": 6, "relations": ["T1*T2 + T3*T4 + T5^2 + T6^2"],
                "grading": {{"free_rank": 2,
                             "matrix": [[-2, 2, -1, 1, 0, 0], [1, 1, 1, 1, 1, 1]]}},
                "ample": {ample}}}"#
        ),
    )
}

#[test]
fn ample_class_outside_a_chamber_is_a_domain_error() {
    let path = quadric_with_ample("wall.json", "[1, 1]");
    let (code, _, err) = run(&["show", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("wall"), "stderr was: {err}");

    let path = quadric_with_ample("outside.json", "[-3, 1]");
    let (code, _, err) = run(&["show", path.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("chamber"), "stderr was: {err}");
}

#[test]
fn exhausted_timeout_is_reported() {
    let (code, out, err) = run(&["--timeout", "0", "chambers", &fixture("fourfold.json")]);
    assert_eq!(code, 1);
    assert!(out.is_empty());
    assert!(err.contains("timed out"), "stderr was: {err}");
}

#[test]
fn repeated_runs_are_byte_identical() {
    let args = ["chambers", "--json", &fixture("fourfold.json")];
    let first = run(&args);
    let second = run(&args);
    assert_eq!(first, second);
    assert_eq!(first.0, 0);
}

#[test]
fn threads_flag_is_accepted() {
    let (code, out, _) = run(&["--threads", "1", "pic", &fixture("quadric.json")]);
    assert_eq!(code, 0);
    assert_eq!(out, "AG(2, [])\nAG(0, [3, 6])\n");
}

#[test]
fn db_search_is_an_and_query_over_text_fields() {
    let db = seed_db();
    let (code, out, _) = run(&["db", "search", "--db", &db, "del Pezzo AND E6"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("6: "), "stdout was: {out}");

    let (code, out, _) = run(&["db", "search", "--db", &db, "quotient AND symplectic"]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 1);
    assert!(out.starts_with("99: "), "stdout was: {out}");

    let (code, out, _) = run(&["db", "search", "--db", &db]);
    assert_eq!(code, 0);
    assert_eq!(out.lines().count(), 6, "empty query lists everything");

    let (code, out, _) = run(&["db", "search", "--db", &db, "no such thing"]);
    assert_eq!(code, 0);
    assert_eq!(out, "no matches\n");
}

#[test]
fn db_get_shows_the_record_and_its_ring() {
    let (code, out, _) = run(&["db", "get", "--db", &seed_db(), "6"]);
    assert_eq!(code, 0);
    assert!(out.contains("id: 6"));
    assert!(out.contains("ring: GR(4, 1, [1, [3]])"), "stdout was: {out}");
    let (code, _, err) = run(&["db", "get", "--db", &seed_db(), "424242"]);
    assert_eq!(code, 1);
    assert!(err.contains("424242"));
}

#[test]
fn db_export_produces_latex_and_spacefile() {
    let db = seed_db();
    let (code, out, _) = run(&["db", "export", "--db", &db, "6", "latex"]);
    assert_eq!(code, 0);
    assert!(out.contains("\\begin{align*}"));
    assert!(out.contains("\\begin{tabular}"));
    assert!(out.contains("modulo 3"));

    let (code, out, _) = run(&["db", "export", "--db", &db, "98", "spacefile"]);
    assert_eq!(code, 0);
    let file = SpaceFile::from_json(&out).expect("export should re-parse");
    assert_eq!(file.nvars(), 5);

    let (code, _, _) = run(&["db", "export", "--db", &db, "6", "yaml"]);
    assert_eq!(code, 2);
}

#[test]
fn db_add_appends_and_rejects_duplicates() {
    let copy = temp_file(
        "dbcopy.jsonl",
        &std::fs::read_to_string(seed_db()).unwrap(),
    );
    let db = copy.to_str().unwrap();
    let record = temp_file(
        "newrec.json",
        r#"{"id": 500, "name": "projective line", "description": "a test record",
            "tags": ["test"], "source": "test",
            "data": {"vars": 2, "relations": [],
                     "grading": {"free_rank": 1, "matrix": [[1, 1]]}, "ample": [1]}}"#,
    );
    let (code, out, _) = run(&["db", "add", "--db", db, record.to_str().unwrap()]);
    assert_eq!(code, 0);
    assert_eq!(out, "added record 500\n");
    let (code, out, _) = run(&["db", "get", "--db", db, "500"]);
    assert_eq!(code, 0);
    assert!(out.contains("projective line"));

    let (code, _, err) = run(&["db", "add", "--db", db, record.to_str().unwrap()]);
    assert_eq!(code, 1);
    assert!(err.contains("duplicate"), "stderr was: {err}");
}

#[test]
fn db_add_validates_the_payload() {
    let copy = temp_file(
        "dbcopy2.jsonl",
        &std::fs::read_to_string(seed_db()).unwrap(),
    );
    let record = temp_file(
        "badrec.json",
        r#"{"id": 501, "name": "broken", "description": "inhomogeneous relation",
            "tags": [], "source": "test",
            "data": {"vars": 2, "relations": ["T1^2 + T2"],
                     "grading": {"free_rank": 1, "matrix": [[1, 1]]}, "ample": [1]}}"#,
    );
    let (code, _, err) = run(&[
        "db",
        "add",
        "--db",
        copy.to_str().unwrap(),
        record.to_str().unwrap(),
    ]);
    assert_eq!(code, 2);
    assert!(err.contains("homogeneous"), "stderr was: {err}");
    let after = std::fs::read_to_string(&copy).unwrap();
    assert_eq!(after.lines().count(), 6, "a rejected add must not change the file");
}
