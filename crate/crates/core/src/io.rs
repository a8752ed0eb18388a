//! JSON file formats. Keys come out in a fixed order, rationals as `"p/q"` strings and
//! subdivision vertex names as nested arrays.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::carrier::Homotopy;
use crate::complex::{Complex, ComplexError, Simplex, Subcomplex, Subdivision};
use crate::lift::ThreadApprox;
use crate::maps::{MapError, QsMap, VertexMap};
use crate::name::VertexName;
use crate::pl::{PlError, PlMap};
use crate::point::Point;
use crate::rational::{self, one, Rational};
use crate::stars::{barycentric_star, CoverElement, CoverError, CoverKind, IndexedCover, OpenStar};
use crate::tower::{Tower, TowerError};

#[derive(Debug, Error)]
pub enum InputError {
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{field}: {message}")]
    Field { field: String, message: String },
    #[error("complex: {0}")]
    Complex(#[from] ComplexError),
    #[error("map: {0}")]
    Map(#[from] MapError),
    #[error("cover: {0}")]
    Cover(#[from] CoverError),
    #[error("tower: {0}")]
    Tower(#[from] TowerError),
    #[error("map: {0}")]
    Pl(#[from] PlError),
}

fn field(name: impl Into<String>, message: impl ToString) -> InputError {
    InputError::Field { field: name.into(), message: message.to_string() }
}

fn key(s: &str, at: &str) -> Result<VertexName, InputError> {
    VertexName::from_key(s).map_err(|e| field(at, format!("bad vertex key {s:?}: {e}")))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ComplexJson {
    pub vertices: Vec<VertexName>,
    pub maximal: Vec<Vec<VertexName>>,
}

impl ComplexJson {
    pub fn of(k: &Complex) -> ComplexJson {
        ComplexJson { vertices: k.names().to_vec(), maximal: k.maximal_names() }
    }

    pub fn build(&self) -> Result<Complex, InputError> {
        Ok(Complex::with_vertices(&self.vertices, &self.maximal)?)
    }
}

pub fn complex_to_json(k: &Complex) -> Value {
    serde_json::to_value(ComplexJson::of(k)).expect("complexes serialize")
}

pub fn parse_complex(text: &str) -> Result<Complex, InputError> {
    let c: ComplexJson = serde_json::from_str(text)?;
    c.build()
}

/// Simplices of a subcomplex as lists of names, generators only.
pub fn subcomplex_to_json(a: &Subcomplex, k: &Complex) -> Value {
    let gens: Vec<Vec<VertexName>> = a.maximal().iter().map(|s| k.simplex_names(s)).collect();
    serde_json::to_value(gens).expect("names serialize")
}

pub fn subcomplex_from_json(v: &Value, k: &Complex, at: &str) -> Result<Subcomplex, InputError> {
    let gens: Vec<Vec<VertexName>> = serde_json::from_value(v.clone()).map_err(|e| field(at, e))?;
    Ok(Subcomplex::from_names(k, &gens)?)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapJson {
    pub source: ComplexJson,
    pub target: ComplexJson,
    pub subdivide_target: bool,
    pub vertex_images: BTreeMap<String, VertexName>,
}

/// A map file: either quasi-simplicial into the subdivided target, or simplicial.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum MapFile {
    Qs(QsMap),
    Simplicial(VertexMap),
}

impl MapFile {
    /// The quasi-simplicial map to analyse: the map itself, or `βf : βK → L`.
    pub fn qs(&self) -> Result<QsMap, MapError> {
        match self {
            MapFile::Qs(p) => Ok(p.clone()),
            MapFile::Simplicial(f) => QsMap::subdivided(f),
        }
    }
}

impl MapJson {
    pub fn of_qs(p: &QsMap) -> MapJson {
        MapJson {
            source: ComplexJson::of(p.source()),
            target: ComplexJson::of(p.base()),
            subdivide_target: true,
            vertex_images: p.vertex_map().table().into_iter().map(|(k, v)| (k.to_key(), v)).collect(),
        }
    }

    pub fn of_simplicial(f: &VertexMap) -> MapJson {
        MapJson {
            source: ComplexJson::of(&f.source),
            target: ComplexJson::of(&f.target),
            subdivide_target: false,
            vertex_images: f.table().into_iter().map(|(k, v)| (k.to_key(), v)).collect(),
        }
    }

    fn table(&self) -> Result<BTreeMap<VertexName, VertexName>, InputError> {
        self.vertex_images.iter().map(|(k, v)| Ok((key(k, "vertex_images")?, v.clone()))).collect()
    }

    /// Builds the map; simplicial maps are checked for simplicity here.
    pub fn build(&self) -> Result<MapFile, InputError> {
        let source = self.source.build()?;
        let target = self.target.build()?;
        let table = self.table()?;
        if self.subdivide_target {
            Ok(MapFile::Qs(QsMap::from_names(source, &target, &table)?))
        } else {
            Ok(MapFile::Simplicial(VertexMap::from_names(source, target, &table)?))
        }
    }
}

pub fn parse_map(text: &str) -> Result<MapFile, InputError> {
    let m: MapJson = serde_json::from_str(text)?;
    m.build()
}

/// A vertex map without the simplicial check, for reporting non-simplicial inputs.
pub fn parse_vertex_map(text: &str) -> Result<(VertexMap, bool), InputError> {
    let m: MapJson = serde_json::from_str(text)?;
    let source = m.source.build()?;
    let target = m.target.build()?;
    let target = if m.subdivide_target { Subdivision::of(&target).fine } else { target };
    Ok((VertexMap::from_names(source, target, &m.table()?)?, m.subdivide_target))
}

pub fn map_to_json(m: &MapFile) -> Value {
    let j = match m {
        MapFile::Qs(p) => MapJson::of_qs(p),
        MapFile::Simplicial(f) => MapJson::of_simplicial(f),
    };
    serde_json::to_value(j).expect("maps serialize")
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementJson {
    Star { star_of: VertexName },
    Simplices(Vec<Vec<VertexName>>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoverJson {
    pub ambient: ComplexJson,
    /// When present, `ambient` is the subdivision of `base` and closed `star_of` elements are
    /// barycentric stars of base vertices.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<ComplexJson>,
    pub kind: CoverKind,
    pub elements: BTreeMap<String, ElementJson>,
}

pub fn cover_to_json(c: &IndexedCover) -> Value {
    let elements = c
        .elements
        .iter()
        .map(|(i, e)| {
            let j = match e {
                CoverElement::Open(o) if o.vertices.len() == 1 => {
                    ElementJson::Star { star_of: c.ambient.name(*o.vertices.iter().next().expect("one vertex")).clone() }
                }
                CoverElement::Open(o) => ElementJson::Simplices(o.vertices.iter().map(|v| vec![c.ambient.name(*v).clone()]).collect()),
                CoverElement::Closed(s) => ElementJson::Simplices(s.maximal().iter().map(|m| c.ambient.simplex_names(m)).collect()),
            };
            (i.to_key(), j)
        })
        .collect();
    let j = CoverJson {
        ambient: ComplexJson::of(&c.ambient),
        base: c.geometry.as_ref().map(|sd| ComplexJson::of(&sd.parent)),
        kind: c.kind,
        elements,
    };
    serde_json::to_value(j).expect("covers serialize")
}

pub fn parse_cover(text: &str) -> Result<IndexedCover, InputError> {
    let j: CoverJson = serde_json::from_str(text)?;
    let ambient = j.ambient.build()?;
    let sd = match &j.base {
        Some(b) => Some(Subdivision::recover(&b.build()?, &ambient)?),
        None => None,
    };
    let mut elements = BTreeMap::new();
    for (k, e) in &j.elements {
        let at = format!("elements.{k}");
        let element = match (j.kind, e) {
            (CoverKind::Open, ElementJson::Star { star_of }) => {
                CoverElement::Open(OpenStar { vertices: BTreeSet::from([ambient.vertex(star_of)?]) })
            }
            (CoverKind::Open, ElementJson::Simplices(gens)) => {
                CoverElement::Open(OpenStar { vertices: Subcomplex::from_names(&ambient, gens)?.vertices() })
            }
            (CoverKind::Closed, ElementJson::Star { star_of }) => match &sd {
                Some(sd) => {
                    let v = sd.parent.vertex(star_of)?;
                    CoverElement::Closed(barycentric_star(sd, &Subcomplex::generated_by([Simplex::vertex(v)])))
                }
                None => {
                    let v = ambient.vertex(star_of)?;
                    CoverElement::Closed(Subcomplex::generated_by(
                        ambient.maximal().iter().filter(|s| s.contains_vertex(v)).cloned(),
                    ))
                }
            },
            (CoverKind::Closed, ElementJson::Simplices(gens)) => CoverElement::Closed(Subcomplex::from_names(&ambient, gens)?),
        };
        if element.is_empty() {
            return Err(field(at, "empty element"));
        }
        elements.insert(key(k, &at)?, element);
    }
    let cover = IndexedCover::new(ambient, j.kind, elements)?;
    Ok(match sd {
        Some(sd) => IndexedCover { geometry: Some(sd), ..cover },
        None => cover,
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TowerJson {
    pub levels: Vec<ComplexJson>,
    pub bonds: Vec<MapJson>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "rational::opt_vec")]
    pub scales: Option<Vec<Rational>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub covers: Option<Vec<CoverKind>>,
}

pub fn tower_to_json(t: &Tower) -> Value {
    let covers = t.covers.iter().any(|k| *k != CoverKind::Closed).then(|| t.covers.clone());
    let j = TowerJson {
        levels: t.levels.iter().map(ComplexJson::of).collect(),
        bonds: t.bonds.iter().map(MapJson::of_qs).collect(),
        scales: Some(t.scales.clone()),
        covers,
    };
    serde_json::to_value(j).expect("towers serialize")
}

pub fn tower_from_json(j: &TowerJson) -> Result<Tower, InputError> {
    let levels = j.levels.iter().map(ComplexJson::build).collect::<Result<Vec<_>, _>>()?;
    let mut bonds = Vec::new();
    for (i, b) in j.bonds.iter().enumerate() {
        if !b.subdivide_target {
            return Err(field(format!("bonds[{i}]"), "bonds must map into the subdivided target"));
        }
        match b.build()? {
            MapFile::Qs(p) => bonds.push(p),
            MapFile::Simplicial(_) => unreachable!(),
        }
    }
    let mut t = Tower::new(levels, bonds, j.scales.clone())?;
    if let Some(c) = &j.covers {
        if c.len() != t.depth() {
            return Err(field("covers", format!("expected {} entries", t.depth())));
        }
        t.covers = c.clone();
    }
    Ok(t)
}

pub fn parse_tower(text: &str) -> Result<Tower, InputError> {
    let j: TowerJson = serde_json::from_str(text)?;
    tower_from_json(&j)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PointJson {
    pub coords: BTreeMap<String, String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<String>,
}

pub fn point_to_json(x: &Point, k: &Complex) -> PointJson {
    PointJson {
        coords: x.coords().iter().map(|(v, c)| (k.name(*v).to_key(), rational::format(c))).collect(),
        scale: (x.scale() != &one()).then(|| rational::format(x.scale())),
    }
}

pub fn point_from_json(j: &PointJson, k: &Complex, at: &str) -> Result<Point, InputError> {
    let mut coords = BTreeMap::new();
    for (name, c) in &j.coords {
        let v = k.vertex(&key(name, at)?)?;
        let c = rational::parse(c).map_err(|e| field(at, e))?;
        if !c.is_zero() {
            coords.insert(v, c);
        }
    }
    let scale = match &j.scale {
        Some(s) => rational::parse(s).map_err(|e| field(at, e))?,
        None => one(),
    };
    let x = Point::new(coords, scale);
    x.validate(k).map_err(|e| field(at, e))?;
    Ok(x)
}

pub fn pl_map_to_json(f: &PlMap) -> Value {
    let images: BTreeMap<String, PointJson> =
        f.images().iter().map(|(v, x)| (f.domain.name(*v).to_key(), point_to_json(x, &f.target))).collect();
    serde_json::json!({
        "domain": complex_to_json(&f.domain),
        "defined": subcomplex_to_json(&f.defined, &f.domain),
        "images": images,
    })
}

/// Prism triangulation, vertex images and per-simplex cover witnesses.
pub fn homotopy_to_json(h: &Homotopy) -> Value {
    let certificate: Vec<Value> = h
        .certificate
        .iter()
        .map(|(s, i)| serde_json::json!({ "simplex": s, "element": i }))
        .collect();
    let prism = h.prism.as_ref().map(|e| {
        serde_json::json!({
            "complex": complex_to_json(&e.map.domain),
            "images": pl_map_to_json(&e.map)["images"],
        })
    });
    serde_json::json!({
        "verdict": h.verdict,
        "kind": h.kind,
        "certificate": certificate,
        "prism": prism,
    })
}

/// A lifting problem: a map `X → K_0` (or `βK_0`), a subcomplex `A ⊆ X` and, for every
/// vertex of `A`, a point of the top level whose thread prescribes the lift.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftJson {
    pub tower: TowerJson,
    pub domain: ComplexJson,
    #[serde(default)]
    pub subdivided: bool,
    pub images: BTreeMap<String, PointJson>,
    #[serde(default)]
    pub a: Vec<Vec<VertexName>>,
    #[serde(default)]
    pub g0: BTreeMap<String, PointJson>,
}

pub struct LiftProblem {
    pub tower: Tower,
    pub map: PlMap,
    pub a: Subcomplex,
    pub threads: BTreeMap<usize, ThreadApprox>,
}

pub fn parse_lift(text: &str) -> Result<LiftProblem, InputError> {
    let j: LiftJson = serde_json::from_str(text)?;
    let tower = tower_from_json(&j.tower)?;
    let domain = j.domain.build()?;
    let target = if j.subdivided { tower.subdivision_of(0).fine } else { tower.levels[0].clone() };
    let mut images = BTreeMap::new();
    for (name, p) in &j.images {
        let at = format!("images.{name}");
        let v = domain.vertex(&key(name, &at)?)?;
        images.insert(v, point_from_json(p, &target, &at)?.with_scale(one()));
    }
    let map = PlMap::total(domain.clone(), target, images)?;
    let a = Subcomplex::from_names(&domain, &j.a)?;
    let top = tower.depth() - 1;
    let mut threads = BTreeMap::new();
    for (name, p) in &j.g0 {
        let at = format!("g0.{name}");
        let v = domain.vertex(&key(name, &at)?)?;
        let x = point_from_json(p, &tower.levels[top], &at)?.with_scale(one());
        threads.insert(v, ThreadApprox::from_top(&tower, top, &x));
    }
    if let Some(v) = a.vertices().into_iter().find(|v| !threads.contains_key(v)) {
        return Err(field("g0", format!("no point for vertex {}", domain.name(v))));
    }
    Ok(LiftProblem { tower, map, a, threads })
}

/// Pretty JSON with a trailing newline.
pub fn to_string(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("reports serialize");
    s.push('\n');
    s
}
