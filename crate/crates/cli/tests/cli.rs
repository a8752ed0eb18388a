use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use polytower_core::io;
use polytower_core::maps::QsMap;
use polytower_core::name::VertexName;
use polytower_core::tower::Tower;
use polytower_core::{gen, rational};
use proptest::prelude::*;
use serde_json::Value;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_polytower"));
    c.env_remove("POLYTOWER_BUDGETS");
    c
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().current_dir(dir).args(args).output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

fn write(dir: &Path, name: &str, v: &Value) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, io::to_string(v)).unwrap();
    p
}

/// `β²S²` mapped to a point, as a two-level tower.
fn sphere_to_point() -> Tower {
    let point = gen::simplex_on(&["o"]);
    let sphere = gen::sphere(2).barycentric_subdivision().barycentric_subdivision();
    let o = VertexName::set(gen::named(&["o"]));
    let table: BTreeMap<VertexName, VertexName> = sphere.names().iter().map(|n| (n.clone(), o.clone())).collect();
    let p = QsMap::from_names(sphere.clone(), &point, &table).unwrap();
    Tower::new(vec![point, sphere], vec![p], None).unwrap()
}

#[test]
fn plain_commands() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(code(&run(d, &["gen", "simplex", "2", "-o", "d2.json"])), 0);
    let sd = run(d, &["subdivide", "d2.json"]);
    assert_eq!(code(&sd), 0);
    assert_eq!(json(&sd)["vertices"].as_array().unwrap().len(), 7);

    assert_eq!(code(&run(d, &["gen", "sphere", "2", "-o", "s2.json"])), 0);
    let s2 = io::parse_complex(&std::fs::read_to_string(d.join("s2.json")).unwrap()).unwrap();
    assert_eq!(s2, gen::sphere(2));
    assert_eq!(s2.f_vector(), vec![4, 6, 4]);
    let h = json(&run(d, &["homology", "s2.json"]));
    let betti: Vec<u64> = h["groups"].as_array().unwrap().iter().map(|g| g["betti"].as_u64().unwrap()).collect();
    assert_eq!(betti, vec![1, 0, 1]);
    assert!(h["groups"].as_array().unwrap().iter().all(|g| g["torsion"].as_array().unwrap().is_empty()));

    std::fs::write(d.join("empty.json"), "").unwrap();
    assert_eq!(code(&run(d, &["validate", "empty.json"])), 3);
    assert_eq!(code(&run(d, &["validate", "missing.json"])), 3);
    std::fs::write(d.join("broken.json"), "{\n  \"vertices\": [\"a\",\n").unwrap();
    let broken = run(d, &["validate", "broken.json"]);
    assert_eq!(code(&broken), 3);
    assert!(String::from_utf8_lossy(&broken.stderr).contains("line"));
    assert_eq!(code(&run(d, &["homology", "s2.json", "--n", "0"])), 3);
}

#[test]
fn map_checks() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["gen", "cylinder", "-o", "cyl.json"]);
    let cyl = io::parse_map(&std::fs::read_to_string(d.join("cyl.json")).unwrap()).unwrap().qs().unwrap();
    assert_eq!(cyl.source().vertex_count(), 9);
    assert_eq!(cyl, gen::cylinder().0);

    let r = run(d, &["check-map", "cyl.json", "--n", "2"]);
    assert_eq!(code(&r), 1);
    let report = json(&r);
    let w = serde_json::json!([["u", "v"]]);
    let entry = report["regularity"]["entries"].as_array().unwrap().iter().find(|e| e["delta"] == w).unwrap();
    assert_eq!(entry["verdict"]["witness"]["cause"]["kind"], "homology");
    assert_eq!(entry["verdict"]["witness"]["cause"]["betti"], 1);
    assert_eq!(report["lipschitz"]["constant"], "1/2");
    assert_eq!(code(&run(d, &["check-map", "cyl.json", "--n", "1"])), 0);

    let id = QsMap::subdivision_identity(&gen::simplex(2));
    write(d, "id.json", &io::map_to_json(&io::MapFile::Qs(id)));
    assert_eq!(code(&run(d, &["check-map", "id.json", "--n", "3"])), 0);

    let mut bad: Value = serde_json::from_str(&std::fs::read_to_string(d.join("cyl.json")).unwrap()).unwrap();
    bad["vertex_images"]["b1"] = serde_json::json!(["nowhere"]);
    write(d, "bad.json", &bad);
    let r = run(d, &["check-map", "bad.json"]);
    assert_eq!(code(&r), 3);
    assert!(String::from_utf8_lossy(&r.stderr).contains("b1"));
}

#[test]
fn tower_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["gen", "subdivision-tower", "--levels", "3", "-o", "t.json"]);
    let t = io::parse_tower(&std::fs::read_to_string(d.join("t.json")).unwrap()).unwrap();
    assert_eq!(t, Tower::subdivision(&gen::simplex(2), 3));
    assert!(t.bonds.iter().all(|b| *b == QsMap::subdivision_identity(b.base())));
    assert_eq!(code(&run(d, &["verify-tower", "t.json", "--n", "2"])), 0);

    run(d, &["gen", "cylinder-tower", "-o", "c.json"]);
    assert_eq!(code(&run(d, &["verify-tower", "c.json", "--n", "2"])), 1);
    assert_eq!(code(&run(d, &["verify-tower", "c.json", "--n", "1"])), 0);

    write(d, "sphere.json", &io::tower_to_json(&sphere_to_point()));
    assert_eq!(code(&run(d, &["verify-tower", "sphere.json", "--n", "2"])), 0);
    assert_eq!(code(&run(d, &["verify-tower", "sphere.json", "--n", "2", "--budget-pi1", "1"])), 2);
    let env = bin().current_dir(d).env("POLYTOWER_BUDGETS", "pi1=1").args(["verify-tower", "sphere.json", "--n", "2"]).output().unwrap();
    assert_eq!(code(&env), 2);
    let flag = bin().current_dir(d).env("POLYTOWER_BUDGETS", "pi1=1").args(["verify-tower", "sphere.json", "--n", "2", "--budget-pi1", "10000"]).output().unwrap();
    assert_eq!(code(&flag), 0);
    let junk = bin().current_dir(d).env("POLYTOWER_BUDGETS", "pi1=x").args(["verify-tower", "sphere.json"]).output().unwrap();
    assert_eq!(code(&junk), 3);

    let r = run(d, &["restrict", "t.json", "--a", "[[\"a\",\"b\"]]", "--n", "2"]);
    assert_eq!(code(&r), 0);
    let restricted = serde_json::from_value(json(&r)["restricted"].clone()).unwrap();
    assert_eq!(io::tower_from_json(&restricted).unwrap().levels, Tower::subdivision(&gen::simplex_on(&["a", "b"]), 3).levels);
    assert_eq!(code(&run(d, &["restrict", "t.json", "--a", "[[\"a\",\"z\"]]"])), 3);
    assert_eq!(code(&run(d, &["restrict", "t.json", "--level", "7", "--a", "[]"])), 3);

    let scaled = json(&run(d, &["verify-tower", "t.json", "--scale-base", "3"]));
    let scales: Vec<&str> = scaled["levels"].as_array().unwrap().iter().map(|l| l["scale"].as_str().unwrap()).collect();
    assert_eq!(scales, ["1/3", "1/9", "1/27"]);
}

#[test]
fn lifting_and_covers() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["gen", "edge-lift", "-o", "lift.json"]);
    let r = run(d, &["lift", "lift.json", "--n", "1"]);
    assert_eq!(code(&r), 0);
    let report = json(&r);
    assert_eq!(report["stages"].as_array().unwrap().len(), 3);
    assert_eq!(report["maps"].as_array().unwrap().len(), 3);
    let mut lifted: Value = serde_json::from_str(&std::fs::read_to_string(d.join("lift.json")).unwrap()).unwrap();
    lifted["g0"]["p"]["coords"] = serde_json::json!({ "[[\"b\"]]": "1" });
    write(d, "off.json", &lifted);
    assert_eq!(code(&run(d, &["lift", "off.json"])), 3);

    run(d, &["gen", "simplex", "2", "-o", "d2.json"]);
    run(d, &["stars", "d2.json", "-o", "b.json"]);
    let nerve = json(&run(d, &["nerve", "b.json"]));
    assert_eq!(io::parse_complex(&nerve["nerve"].to_string()).unwrap(), gen::simplex(2));
    assert_eq!(code(&run(d, &["nerve", "b.json", "--budget-nerve", "1"])), 2);
    let mesh = json(&run(d, &["mesh", "b.json", "--scale", "1/2"]));
    assert_eq!(mesh["mesh"]["value"], "2/3");
    run(d, &["stars", "d2.json", "--kind", "open", "-o", "o.json"]);
    assert_eq!(json(&run(d, &["validate", "o.json"]))["is_cover"]["status"], "holds");
}

fn leaves(v: &Value, path: String, out: &mut Vec<(String, Value)>) {
    match v {
        Value::Object(m) if !m.is_empty() => {
            for (k, c) in m {
                leaves(c, if path.is_empty() { k.clone() } else { format!("{path}.{k}") }, out);
            }
        }
        Value::Array(a) if !a.is_empty() => out.push((path, v.clone())),
        _ => out.push((path, v.clone())),
    }
}

#[test]
fn human_format_projects_the_json() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    run(d, &["gen", "cylinder", "-o", "cyl.json"]);
    let j = json(&run(d, &["check-map", "cyl.json", "--n", "2"]));
    let h = run(d, &["check-map", "cyl.json", "--n", "2", "--format", "human"]);
    assert_eq!(code(&h), 1);
    let text = String::from_utf8(h.stdout).unwrap();
    let mut flat = Vec::new();
    leaves(&j, String::new(), &mut flat);
    for (path, v) in flat {
        let shown = match &v {
            Value::String(s) => s.clone(),
            other => other.to_string(),
        };
        let direct = format!("{path}: {shown}\n");
        assert!(text.contains(&direct) || text.lines().any(|l| l.starts_with(&format!("{path}["))), "{path} missing");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn generated_towers_parse_back(seed in 0u64..1_000_000, levels in 1usize..=3) {
        let dir = tempfile::tempdir().unwrap();
        let seed_s = seed.to_string();
        let levels_s = levels.to_string();
        let o = run(dir.path(), &["gen", "random-tower", "--seed", &seed_s, "--levels", &levels_s, "--scale-base", "5/2"]);
        prop_assert_eq!(code(&o), 0);
        let t = io::parse_tower(&String::from_utf8(o.stdout).unwrap()).unwrap();
        let mut expected = gen::random_tower(seed, levels);
        expected.scales = (1..=levels as i32).map(|i| rational::rat(2, 5).pow(i)).collect();
        prop_assert_eq!(t, expected);
    }
}
