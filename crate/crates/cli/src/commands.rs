use std::path::Path;

use anyhow::{bail, Context, Result};
use polytower_core::complex::{Complex, Subcomplex};
use polytower_core::connectivity::{homology_all, pi1_verdict, Budgets};
use polytower_core::gen;
use polytower_core::io::{self, MapFile};
use polytower_core::lift::tower_lift;
use polytower_core::name::VertexName;
use polytower_core::rational::{self, Rational};
use polytower_core::stars::{cover_b, cover_o, CoverKind};
use polytower_core::tower::{n_regular_report, restrict_tower, verify_tower, Tower};
use polytower_core::verdict::Verdict;
use serde_json::{json, Value};

/// A report and, for checking commands, the status that decides the exit code.
pub struct Outcome {
    pub report: Value,
    pub status: Option<Verdict>,
}

impl Outcome {
    fn file(report: Value) -> Outcome {
        Outcome { report, status: None }
    }

    fn checked(report: Value, status: Verdict) -> Outcome {
        Outcome { report, status: Some(status) }
    }

    pub fn exit_code(&self) -> i32 {
        self.status.as_ref().map_or(0, Verdict::exit_code)
    }
}

pub fn read(path: &Path) -> Result<String> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    if text.trim().is_empty() {
        bail!("{}: empty file", path.display());
    }
    Ok(text)
}

fn at<T, E: std::fmt::Display>(path: &Path, r: Result<T, E>) -> Result<T> {
    r.map_err(|e| anyhow::anyhow!("{}: {e}", path.display()))
}

fn to_value(v: &impl serde::Serialize) -> Value {
    serde_json::to_value(v).expect("reports serialize")
}

fn complex(path: &Path) -> Result<Complex> {
    at(path, io::parse_complex(&read(path)?))
}

fn tower(path: &Path, scale_base: Option<&Rational>) -> Result<Tower> {
    let mut t = at(path, io::parse_tower(&read(path)?))?;
    if let Some(b) = scale_base {
        t.scales = crate::config::scales_from_base(b, t.depth());
    }
    Ok(t)
}

fn summary(k: &Complex) -> Value {
    json!({ "dimension": k.dim(), "f_vector": k.f_vector() })
}

pub fn validate(path: &Path) -> Result<Outcome> {
    let text = read(path)?;
    let v: Value = at(path, serde_json::from_str(&text))?;
    let Value::Object(map) = &v else { bail!("{}: expected a JSON object", path.display()) };
    let has = |k: &str| map.contains_key(k);
    let report = if has("tower") && has("domain") {
        let p = at(path, io::parse_lift(&text))?;
        json!({ "kind": "lift", "depth": p.tower.depth(), "domain": summary(&p.map.domain), "a_vertices": p.a.vertices().len() })
    } else if has("levels") {
        let t = at(path, io::parse_tower(&text))?;
        let levels: Vec<Value> = t.levels.iter().map(summary).collect();
        json!({ "kind": "tower", "depth": t.depth(), "levels": levels, "scales": t.scales.iter().map(rational::format).collect::<Vec<_>>() })
    } else if has("ambient") {
        let c = at(path, io::parse_cover(&text))?;
        json!({ "kind": "cover", "elements": c.elements.len(), "ambient": summary(&c.ambient), "is_cover": c.is_cover() })
    } else if has("source") {
        let m = at(path, io::parse_map(&text))?;
        let (kind, source, target) = match &m {
            MapFile::Qs(p) => ("quasi_simplicial_map", p.source().clone(), p.base().clone()),
            MapFile::Simplicial(f) => ("simplicial_map", f.source.clone(), f.target.clone()),
        };
        json!({ "kind": kind, "source": summary(&source), "target": summary(&target) })
    } else if has("vertices") {
        let k = at(path, io::parse_complex(&text))?;
        json!({ "kind": "complex", "complex": summary(&k) })
    } else {
        bail!("{}: not a complex, map, cover, tower or lift file", path.display());
    };
    Ok(Outcome::file(report))
}

pub fn subdivide(path: &Path, times: usize) -> Result<Outcome> {
    let mut k = complex(path)?;
    for _ in 0..times {
        k = k.barycentric_subdivision();
    }
    Ok(Outcome::file(io::complex_to_json(&k)))
}

pub fn stars(path: &Path, kind: CoverKind) -> Result<Outcome> {
    let k = complex(path)?;
    let c = match kind {
        CoverKind::Closed => cover_b(&k),
        CoverKind::Open => cover_o(&k),
    };
    Ok(Outcome::file(io::cover_to_json(&c)))
}

pub fn nerve(path: &Path, budgets: &Budgets) -> Result<Outcome> {
    let c = at(path, io::parse_cover(&read(path)?))?;
    Ok(match c.nerve(budgets.nerve_subsets) {
        Ok(n) => Outcome::checked(json!({ "verdict": Verdict::Holds, "nerve": io::complex_to_json(&n) }), Verdict::Holds),
        Err(_) => {
            let v = Verdict::inconclusive(format!("nerve budget of {} index subsets exhausted", budgets.nerve_subsets));
            Outcome::checked(json!({ "verdict": v, "nerve": null }), v)
        }
    })
}

pub fn homology(path: &Path, reduced: bool) -> Result<Outcome> {
    let k = complex(path)?;
    let groups = homology_all(&k, reduced);
    Ok(Outcome::file(json!({ "reduced": reduced, "groups": groups, "euler_characteristic": k.euler_characteristic() })))
}

pub fn pi1(path: &Path, budgets: &Budgets) -> Result<Outcome> {
    let k = complex(path)?;
    let v = pi1_verdict(&k, None, budgets.pi1_steps);
    Ok(Outcome::checked(json!({ "simply_connected": v, "budget": budgets.pi1_steps }), v))
}

pub fn check_map(path: &Path, n: usize, kappa: &Rational, lambda: &Rational, budgets: &Budgets) -> Result<Outcome> {
    let m = at(path, io::parse_map(&read(path)?))?;
    let p = at(path, m.qs())?;
    let quasi = p.vertex_map().check_simplicial();
    let surjective = p.is_surjective();
    let regularity = n_regular_report(&p, n, budgets);
    let lipschitz = p.lipschitz_constant(kappa, lambda);
    let status = quasi.clone().and(surjective.clone()).and(regularity.verdict.clone());
    let report = json!({
        "analysed_as": if matches!(m, MapFile::Simplicial(_)) { "subdivision_of_simplicial_map" } else { "quasi_simplicial_map" },
        "quasi_simplicial": quasi,
        "surjective": surjective,
        "lipschitz": { "kappa": rational::format(kappa), "lambda": rational::format(lambda), "constant": rational::format(&lipschitz) },
        "regularity": regularity,
        "verdict": status,
    });
    Ok(Outcome::checked(report, status))
}

pub fn verify(path: &Path, n: usize, scale_base: Option<&Rational>, budgets: &Budgets) -> Result<Outcome> {
    let t = tower(path, scale_base)?;
    let c = verify_tower(&t, n, budgets);
    let status = c.conclusion.clone();
    Ok(Outcome::checked(to_value(&c), status))
}

pub fn restrict(path: &Path, level: usize, a: &str, n: usize, scale_base: Option<&Rational>, budgets: &Budgets) -> Result<Outcome> {
    let t = tower(path, scale_base)?;
    if level >= t.depth() {
        bail!("--level {level} is outside the tower (depth {})", t.depth());
    }
    let gens: Vec<Vec<VertexName>> = serde_json::from_str(a).context("--a: expected a JSON list of simplices")?;
    let sub: Subcomplex = Subcomplex::from_names(&t.levels[level], &gens).context("--a")?;
    let r = restrict_tower(&t, level, &sub)?;
    let c = verify_tower(&r, n, budgets);
    let status = c.conclusion.clone();
    Ok(Outcome::checked(json!({ "restricted": io::tower_to_json(&r), "certificate": to_value(&c) }), status))
}

pub fn lift(path: &Path, n: usize, scale_base: Option<&Rational>, budgets: &Budgets) -> Result<Outcome> {
    let mut p = at(path, io::parse_lift(&read(path)?))?;
    if let Some(b) = scale_base {
        p.tower.scales = crate::config::scales_from_base(b, p.tower.depth());
    }
    let l = at(path, tower_lift(&p.tower, &p.map, &p.a, &p.threads, n, budgets))?;
    let maps: Vec<Value> = l.stages.iter().map(|s| io::pl_map_to_json(&s.map)).collect();
    let status = l.verdict.clone();
    let report = json!({ "verdict": l.verdict, "stages": to_value(&l.summary()), "maps": maps, "cauchy": to_value(&l.cauchy) });
    Ok(Outcome::checked(report, status))
}

pub fn mesh(path: &Path, kappa: &Rational) -> Result<Outcome> {
    let c = at(path, io::parse_cover(&read(path)?))?;
    let diameters: serde_json::Map<String, Value> =
        c.indices().iter().map(|i| (i.to_key(), Value::String(rational::format(&c.diameter(i, kappa))))).collect();
    Ok(Outcome::file(json!({ "scale": rational::format(kappa), "mesh": c.mesh(kappa), "diameters": diameters })))
}

pub enum Generate {
    SubdivisionTower { dim: usize, base: Option<std::path::PathBuf>, levels: usize },
    CylinderTower,
    Cylinder,
    Circle,
    Sphere(usize),
    Simplex(usize),
    Rp2,
    RandomTower { levels: usize },
    EdgeLift { levels: usize },
}

pub fn generate(what: &Generate, seed: u64, scale_base: Option<&Rational>) -> Result<Outcome> {
    let with_scales = |mut t: Tower| {
        if let Some(b) = scale_base {
            t.scales = crate::config::scales_from_base(b, t.depth());
        }
        io::tower_to_json(&t)
    };
    let levels_ok = |l: usize| if l == 0 { bail!("--levels must be at least 1") } else { Ok(l) };
    let v = match what {
        Generate::SubdivisionTower { dim, base, levels } => {
            let k = match base {
                Some(p) => complex(p)?,
                None => gen::simplex(*dim),
            };
            with_scales(Tower::subdivision(&k, levels_ok(*levels)?))
        }
        Generate::CylinderTower => {
            let (p, base) = gen::cylinder();
            with_scales(Tower::new(vec![base, p.source().clone()], vec![p], None)?)
        }
        Generate::Cylinder => io::map_to_json(&MapFile::Qs(gen::cylinder().0)),
        Generate::Circle => io::complex_to_json(&gen::circle()),
        Generate::Sphere(d) => io::complex_to_json(&gen::sphere(*d)),
        Generate::Simplex(d) => io::complex_to_json(&gen::simplex(*d)),
        Generate::Rp2 => io::complex_to_json(&gen::rp2()),
        Generate::RandomTower { levels } => with_scales(gen::random_tower(seed, levels_ok(*levels)?)),
        Generate::EdgeLift { levels } => {
            let levels = levels_ok(*levels)?;
            let top = (1..levels).fold(VertexName::atom("a"), |x, _| VertexName::set([x]));
            json!({
                "tower": with_scales(Tower::subdivision(&gen::simplex(2), levels)),
                "domain": io::complex_to_json(&gen::simplex_on(&["p", "q"])),
                "images": { "p": { "coords": { "a": "1" } }, "q": { "coords": { "b": "1" } } },
                "a": [["p"]],
                "g0": { "p": { "coords": { top.to_key(): "1" } } },
            })
        }
    };
    Ok(Outcome::file(v))
}
