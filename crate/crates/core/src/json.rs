//! JSON interchange.
//!
//! Order convention: a poset pair `[x, y]` in `le` means `x ≤ y`, and a
//! diagram has a map `D(x) → D(y)` exactly when `y ≤ x`, stored under the key
//! `"y<=x"`. Element ids of sets are atoms without `(`, `)` and `,`, or
//! tuples of ids such as `(0,(a,*))`, the form constructed sets use.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::base::{validate_id, BaseMorphism, BaseObject, DiagramView};
use crate::category::FinCategory;
use crate::diagram::{Diagram, NatTrans};
use crate::error::{Error, Result};
use crate::lifting::LiftingProblem;
use crate::order::FinPoset;
use crate::procalc::{ArrowMap, PreMorphism, RawMorphism};

pub const SCHEMA_VERSION: u32 = 1;

pub const MAP_CONVENTION: &str = "maps[\"y<=x\"] is the map D(x) -> D(y); it exists iff y <= x";

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PosetJson {
    pub elements: Vec<String>,
    #[serde(default)]
    pub le: Vec<(String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArrowJson {
    pub name: String,
    pub src: String,
    pub tgt: String,
}

/// `composites` lists `[g, f, g∘f]` for every composable pair of
/// non-identity morphisms.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct CategoryJson {
    pub objects: Vec<String>,
    #[serde(default)]
    pub morphisms: Vec<ArrowJson>,
    #[serde(default)]
    pub composites: Vec<(String, String, String)>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct MorphismJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub src: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tgt: Option<Vec<String>>,
    pub map: BTreeMap<String, String>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DiagramBody {
    pub objects: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub maps: BTreeMap<String, MorphismJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct DiagramJson {
    pub poset: PosetJson,
    pub objects: BTreeMap<String, Vec<String>>,
    #[serde(default)]
    pub maps: BTreeMap<String, MorphismJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct NatTransJson {
    pub poset: PosetJson,
    pub source: DiagramBody,
    pub target: DiagramBody,
    pub components: BTreeMap<String, MorphismJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct PreMorphismJson {
    pub alpha: BTreeMap<String, String>,
    pub phi: BTreeMap<String, MorphismJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArrowMapJson {
    pub top: MorphismJson,
    pub bottom: MorphismJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct ArrowPreMorphismJson {
    pub alpha: BTreeMap<String, String>,
    pub phi: BTreeMap<String, ArrowMapJson>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawEntryJson {
    pub index: String,
    pub map: MorphismJson,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct RawJson {
    pub rep: BTreeMap<String, RawEntryJson>,
}

/// `top[t]: A → X(t)` and `bottom[t]: B → Y(t)` for `left: A → B` and
/// `right: X → Y`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq, Eq)]
pub struct LiftJson {
    pub left: MorphismJson,
    pub right: NatTransJson,
    pub top: BTreeMap<String, MorphismJson>,
    pub bottom: BTreeMap<String, MorphismJson>,
}

/// Deserializes `text`, reporting syntax and shape errors by line and column.
pub fn parse<T: DeserializeOwned>(text: &str, what: &str) -> Result<T> {
    serde_json::from_str(text).map_err(|e| Error::Parse {
        location: format!("{what}: line {}, column {}", e.line(), e.column()),
        message: e.to_string(),
    })
}

/// Malformed-input errors become parse errors at `loc`; verification
/// failures pass through.
fn at(loc: impl Into<String>) -> impl FnOnce(Error) -> Error {
    let loc = loc.into();
    move |e| match e {
        Error::UnknownElement(_)
        | Error::DuplicateElement(_)
        | Error::ReservedId(_)
        | Error::InvalidMorphism(_)
        | Error::Mismatch(_)
        | Error::Cycle(..)
        | Error::InvalidCategory(_) => Error::Parse {
            location: loc,
            message: e.to_string(),
        },
        other => other,
    }
}

fn missing(loc: &str, what: &str) -> Error {
    Error::Parse {
        location: loc.to_string(),
        message: format!("missing {what}"),
    }
}

// ---------------------------------------------------------------- decoding

pub fn poset_from_json(j: &PosetJson) -> Result<FinPoset> {
    FinPoset::new(&j.elements, &j.le).map_err(at("poset"))
}

pub fn category_from_json(j: &CategoryJson) -> Result<FinCategory> {
    let arrows: Vec<(String, String, String)> =
        j.morphisms.iter().map(|a| (a.name.clone(), a.src.clone(), a.tgt.clone())).collect();
    FinCategory::new(&j.objects, &arrows, &j.composites).map_err(at("category"))
}

pub fn object_from_json(ids: &[String], loc: &str) -> Result<BaseObject> {
    for id in ids {
        validate_id(id).map_err(at(loc))?;
    }
    BaseObject::new(ids.iter().cloned()).map_err(at(loc))
}

/// A morphism between known objects; `src`/`tgt`, when present, must agree.
pub fn morphism_between(j: &MorphismJson, src: &BaseObject, tgt: &BaseObject, loc: &str) -> Result<BaseMorphism> {
    for (given, obj, side) in [(&j.src, src, "src"), (&j.tgt, tgt, "tgt")] {
        if let Some(ids) = given {
            if ids.as_slice() != obj.elements() {
                return Err(Error::Parse {
                    location: format!("{loc}.{side}"),
                    message: "does not match the expected object".into(),
                });
            }
        }
    }
    let pairs: Vec<(&str, &str)> = j.map.iter().map(|(x, y)| (x.as_str(), y.as_str())).collect();
    BaseMorphism::from_pairs(src.clone(), tgt.clone(), &pairs).map_err(at(loc))
}

/// A standalone morphism; `src` and `tgt` are required.
pub fn morphism_from_json(j: &MorphismJson, loc: &str) -> Result<BaseMorphism> {
    let src = j.src.as_ref().ok_or_else(|| missing(loc, "`src`"))?;
    let tgt = j.tgt.as_ref().ok_or_else(|| missing(loc, "`tgt`"))?;
    let src = object_from_json(src, &format!("{loc}.src"))?;
    let tgt = object_from_json(tgt, &format!("{loc}.tgt"))?;
    morphism_between(j, &src, &tgt, loc)
}

/// Splits `"y<=x"` into indices; element names may themselves contain `<=`.
fn split_key(shape: &FinPoset, key: &str, loc: &str) -> Result<(usize, usize)> {
    for (i, _) in key.match_indices("<=") {
        if let (Ok(y), Ok(x)) = (shape.index_of(&key[..i]), shape.index_of(&key[i + 2..])) {
            return Ok((y, x));
        }
    }
    Err(Error::Parse {
        location: format!("{loc}.\"{key}\""),
        message: "expected `y<=x` with both elements of the poset".into(),
    })
}

fn body_from_json(shape: Arc<FinPoset>, objects: &BTreeMap<String, Vec<String>>, maps: &BTreeMap<String, MorphismJson>, loc: &str) -> Result<Diagram> {
    for key in objects.keys() {
        shape.index_of(key).map_err(at(format!("{loc}.objects")))?;
    }
    let objs = shape
        .names()
        .iter()
        .map(|x| {
            let ids = objects
                .get(x)
                .ok_or_else(|| missing(&format!("{loc}.objects"), &format!("object for `{x}`")))?;
            object_from_json(ids, &format!("{loc}.objects.\"{x}\""))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut gens = Vec::with_capacity(maps.len());
    for (key, m) in maps {
        let (y, x) = split_key(&shape, key, &format!("{loc}.maps"))?;
        let mloc = format!("{loc}.maps.\"{key}\"");
        if !shape.le(y, x) {
            return Err(Error::Parse {
                location: mloc,
                message: "not a relation of the poset".into(),
            });
        }
        gens.push((x, y, morphism_between(m, &objs[x], &objs[y], &mloc)?));
    }
    Diagram::new(shape, objs, gens).map_err(at(loc))
}

pub fn diagram_from_json(j: &DiagramJson) -> Result<Diagram> {
    let shape = Arc::new(poset_from_json(&j.poset)?);
    body_from_json(shape, &j.objects, &j.maps, "diagram")
}

pub fn nat_trans_from_json(j: &NatTransJson) -> Result<NatTrans> {
    let shape = Arc::new(poset_from_json(&j.poset)?);
    let source = body_from_json(shape.clone(), &j.source.objects, &j.source.maps, "source")?;
    let target = body_from_json(shape.clone(), &j.target.objects, &j.target.maps, "target")?;
    let comps = components_from_json(&shape, &j.components, "components", |x| {
        (source.object(x).clone(), target.object(x).clone())
    })?;
    NatTrans::new(source, target, comps).map_err(at("components"))
}

fn components_from_json(
    shape: &FinPoset,
    comps: &BTreeMap<String, MorphismJson>,
    loc: &str,
    ends: impl Fn(usize) -> (BaseObject, BaseObject),
) -> Result<Vec<BaseMorphism>> {
    for key in comps.keys() {
        shape.index_of(key).map_err(at(loc))?;
    }
    shape
        .names()
        .iter()
        .enumerate()
        .map(|(x, name)| {
            let m = comps.get(name).ok_or_else(|| missing(loc, &format!("component at `{name}`")))?;
            let (s, t) = ends(x);
            morphism_between(m, &s, &t, &format!("{loc}.\"{name}\""))
        })
        .collect()
}

fn alpha_from_json(a: &FinPoset, b: &FinPoset, alpha: &BTreeMap<String, String>) -> Result<Vec<usize>> {
    for key in alpha.keys() {
        b.index_of(key).map_err(at("alpha"))?;
    }
    b.names()
        .iter()
        .map(|y| {
            let v = alpha.get(y).ok_or_else(|| missing("alpha", &format!("value at `{y}`")))?;
            a.index_of(v).map_err(at(format!("alpha.\"{y}\"")))
        })
        .collect()
}

/// A set-level pre-morphism `F → G`; `φ_b: F(α b) → G(b)`.
pub fn pre_morphism_from_json(f: &Diagram, g: &Diagram, j: &PreMorphismJson) -> Result<PreMorphism<BaseMorphism>> {
    let alpha = alpha_from_json(f.shape(), g.shape(), &j.alpha)?;
    let components = components_from_json(g.shape(), &j.phi, "phi", |y| (f.object(alpha[y]).clone(), g.object(y).clone()))?;
    Ok(PreMorphism { alpha, components })
}

pub fn arrow_pre_morphism_from_json(f: &NatTrans, g: &NatTrans, j: &ArrowPreMorphismJson) -> Result<PreMorphism<ArrowMap>> {
    let alpha = alpha_from_json(f.shape(), g.shape(), &j.alpha)?;
    for key in j.phi.keys() {
        g.shape().index_of(key).map_err(at("phi"))?;
    }
    let components = g
        .shape()
        .names()
        .iter()
        .enumerate()
        .map(|(y, name)| {
            let m = j.phi.get(name).ok_or_else(|| missing("phi", &format!("component at `{name}`")))?;
            let loc = format!("phi.\"{name}\"");
            Ok(ArrowMap {
                top: morphism_between(&m.top, f.source().object(alpha[y]), g.source().object(y), &format!("{loc}.top"))?,
                bottom: morphism_between(&m.bottom, f.target().object(alpha[y]), g.target().object(y), &format!("{loc}.bottom"))?,
            })
        })
        .collect::<Result<_>>()?;
    Ok(PreMorphism { alpha, components })
}

pub fn raw_from_json(f: &Diagram, g: &Diagram, j: &RawJson) -> Result<RawMorphism<BaseMorphism>> {
    let (a, b) = (f.shape(), g.shape());
    for key in j.rep.keys() {
        b.index_of(key).map_err(at("rep"))?;
    }
    let rep = b
        .names()
        .iter()
        .enumerate()
        .map(|(y, name)| {
            let e = j.rep.get(name).ok_or_else(|| missing("rep", &format!("entry at `{name}`")))?;
            let loc = format!("rep.\"{name}\"");
            let r = a.index_of(&e.index).map_err(at(format!("{loc}.index")))?;
            Ok((r, morphism_between(&e.map, f.object(r), g.object(y), &format!("{loc}.map"))?))
        })
        .collect::<Result<_>>()?;
    Ok(RawMorphism { rep })
}

pub fn lifting_problem_from_json(j: &LiftJson) -> Result<LiftingProblem> {
    let left = morphism_from_json(&j.left, "left")?;
    let right = nat_trans_from_json(&j.right)?;
    let shape = right.shape();
    let top = components_from_json(shape, &j.top, "top", |t| (left.source().clone(), right.source().object(t).clone()))?;
    let bottom = components_from_json(shape, &j.bottom, "bottom", |t| (left.target().clone(), right.target().object(t).clone()))?;
    LiftingProblem::new(left, right, top, bottom).map_err(at("problem"))
}

// ---------------------------------------------------------------- encoding

pub fn poset_to_json(p: &FinPoset) -> PosetJson {
    PosetJson {
        elements: p.names().to_vec(),
        le: p.covers().into_iter().map(|(x, y)| (p.name(x).to_string(), p.name(y).to_string())).collect(),
    }
}

pub fn category_to_json(c: &FinCategory) -> CategoryJson {
    let n_obj = c.objects().len();
    let arrows = c.arrows();
    let name = |i: usize| arrows[i].name.clone();
    let mut composites = Vec::new();
    for g in n_obj..arrows.len() {
        for f in n_obj..arrows.len() {
            if let Some(gf) = c.compose(g, f) {
                composites.push((name(g), name(f), name(gf)));
            }
        }
    }
    CategoryJson {
        objects: c.objects().to_vec(),
        morphisms: arrows[n_obj..]
            .iter()
            .map(|a| ArrowJson {
                name: a.name.clone(),
                src: c.objects()[a.src].clone(),
                tgt: c.objects()[a.tgt].clone(),
            })
            .collect(),
        composites,
    }
}

pub fn morphism_to_json(m: &BaseMorphism, endpoints: bool) -> MorphismJson {
    let s = m.source().elements();
    let t = m.target().elements();
    MorphismJson {
        src: endpoints.then(|| s.to_vec()),
        tgt: endpoints.then(|| t.to_vec()),
        map: (0..s.len()).map(|i| (s[i].clone(), t[m.apply(i)].clone())).collect(),
    }
}

fn body_to_json(d: &Diagram) -> DiagramBody {
    let p = d.shape();
    DiagramBody {
        objects: (0..p.len()).map(|x| (p.name(x).to_string(), d.object(x).elements().to_vec())).collect(),
        maps: p
            .covers()
            .into_iter()
            .map(|(y, x)| (format!("{}<={}", p.name(y), p.name(x)), morphism_to_json(d.arrow(x, y), false)))
            .collect(),
    }
}

pub fn diagram_to_json(d: &Diagram) -> DiagramJson {
    let body = body_to_json(d);
    DiagramJson {
        poset: poset_to_json(d.shape()),
        objects: body.objects,
        maps: body.maps,
    }
}

pub fn nat_trans_to_json(t: &NatTrans) -> NatTransJson {
    let p = t.shape();
    NatTransJson {
        poset: poset_to_json(p),
        source: body_to_json(t.source()),
        target: body_to_json(t.target()),
        components: (0..p.len()).map(|x| (p.name(x).to_string(), morphism_to_json(t.component(x), false))).collect(),
    }
}

pub fn pre_morphism_to_json(a: &FinPoset, b: &FinPoset, p: &PreMorphism<BaseMorphism>) -> PreMorphismJson {
    PreMorphismJson {
        alpha: (0..b.len()).map(|y| (b.name(y).to_string(), a.name(p.alpha[y]).to_string())).collect(),
        phi: (0..b.len()).map(|y| (b.name(y).to_string(), morphism_to_json(&p.components[y], false))).collect(),
    }
}

pub fn arrow_pre_morphism_to_json(a: &FinPoset, b: &FinPoset, p: &PreMorphism<ArrowMap>) -> ArrowPreMorphismJson {
    ArrowPreMorphismJson {
        alpha: (0..b.len()).map(|y| (b.name(y).to_string(), a.name(p.alpha[y]).to_string())).collect(),
        phi: (0..b.len())
            .map(|y| {
                let c = &p.components[y];
                (
                    b.name(y).to_string(),
                    ArrowMapJson {
                        top: morphism_to_json(&c.top, false),
                        bottom: morphism_to_json(&c.bottom, false),
                    },
                )
            })
            .collect(),
    }
}

pub fn raw_to_json(a: &FinPoset, b: &FinPoset, raw: &RawMorphism<BaseMorphism>) -> RawJson {
    RawJson {
        rep: (0..b.len())
            .map(|y| {
                let (r, ref m) = raw.rep[y];
                (
                    b.name(y).to_string(),
                    RawEntryJson {
                        index: a.name(r).to_string(),
                        map: morphism_to_json(m, false),
                    },
                )
            })
            .collect(),
    }
}

pub fn lifting_problem_to_json(p: &LiftingProblem) -> LiftJson {
    let shape = p.right().shape();
    let per = |ms: &[BaseMorphism]| {
        (0..shape.len())
            .map(|t| (shape.name(t).to_string(), morphism_to_json(&ms[t], false)))
            .collect()
    };
    LiftJson {
        left: morphism_to_json(p.left(), true),
        right: nat_trans_to_json(p.right()),
        top: per(p.top()),
        bottom: per(p.bottom()),
    }
}

/// Wraps an output document with the schema version and its kind.
pub fn envelope(kind: &str, body: impl Serialize) -> Value {
    let mut v = json!({ "schema_version": SCHEMA_VERSION, "kind": kind });
    if let (Value::Object(out), Ok(Value::Object(inner))) = (&mut v, serde_json::to_value(body)) {
        out.extend(inner);
    }
    v
}
