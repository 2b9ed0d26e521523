//! The base category: finite sets and total functions.
//!
//! The two classes of maps are `N` = injections and `M` = surjections. Every
//! map factors functorially as an injection followed by a surjection through
//! the disjoint union of its source and target, and injections lift against
//! surjections.
//!
//! Elements are string ids. Constructed objects name their elements
//! structurally: disjoint-union elements are tagged pairs `(0,x)` / `(1,y)`,
//! pullback points are `(x,y)`, limit families list their components on the
//! maximal indices, and the empty family is `*`. User supplied ids must be
//! plain atoms without `(`, `)` or `,`, or well-formed tuples of such ids
//! (see [`validate_id`]), so that these names parse back uniquely and
//! constructed sets can be fed in again.

use std::collections::HashMap;
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::order::FinPoset;

/// Accepts `atom | * | (id,…,id)` where atoms avoid `(`, `)` and `,`;
/// rejects everything that could collide with constructed element names.
pub fn validate_id(id: &str) -> Result<()> {
    fn term(s: &[u8], mut i: usize) -> Option<usize> {
        if s.get(i) == Some(&b'(') {
            i += 1;
            loop {
                i = term(s, i)?;
                match s.get(i) {
                    Some(b',') => i += 1,
                    Some(b')') => return Some(i + 1),
                    _ => return None,
                }
            }
        }
        let start = i;
        while i < s.len() && !matches!(s[i], b'(' | b')' | b',') {
            i += 1;
        }
        (i > start).then_some(i)
    }
    let b = id.as_bytes();
    match term(b, 0) {
        Some(end) if end == b.len() => Ok(()),
        _ => Err(Error::ReservedId(id.to_string())),
    }
}

#[derive(Clone)]
pub struct BaseObject {
    carrier: Arc<[String]>,
}

impl PartialEq for BaseObject {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.carrier, &other.carrier) || self.carrier == other.carrier
    }
}

impl Eq for BaseObject {}

impl fmt::Debug for BaseObject {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.carrier.iter()).finish()
    }
}

impl BaseObject {
    pub fn new<I, S>(ids: I) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        let carrier: Vec<String> = ids.into_iter().map(Into::into).collect();
        let mut seen = std::collections::HashSet::with_capacity(carrier.len());
        for id in &carrier {
            if !seen.insert(id.as_str()) {
                return Err(Error::DuplicateElement(id.clone()));
            }
        }
        Ok(BaseObject {
            carrier: carrier.into(),
        })
    }

    /// For carriers whose ids are distinct by construction.
    pub(crate) fn from_distinct(carrier: Vec<String>) -> Self {
        debug_assert!({
            let mut s = carrier.clone();
            s.sort();
            s.windows(2).all(|w| w[0] != w[1])
        });
        BaseObject {
            carrier: carrier.into(),
        }
    }

    pub fn empty() -> Self {
        BaseObject {
            carrier: Vec::new().into(),
        }
    }

    /// The one-element set `{*}`, the empty limit.
    pub fn terminal() -> Self {
        BaseObject {
            carrier: vec!["*".to_string()].into(),
        }
    }

    pub fn len(&self) -> usize {
        self.carrier.len()
    }

    pub fn is_empty(&self) -> bool {
        self.carrier.is_empty()
    }

    pub fn elements(&self) -> &[String] {
        &self.carrier
    }

    pub fn name(&self, i: usize) -> &str {
        &self.carrier[i]
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.carrier.iter().position(|c| c == id)
    }
}

/// A total function between finite sets, stored as target positions.
#[derive(Clone, PartialEq, Eq)]
pub struct BaseMorphism {
    source: BaseObject,
    target: BaseObject,
    map: Vec<usize>,
}

impl fmt::Debug for BaseMorphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_map()
            .entries(
                self.map
                    .iter()
                    .enumerate()
                    .map(|(i, &j)| (self.source.name(i), self.target.name(j))),
            )
            .finish()
    }
}

impl BaseMorphism {
    pub fn new(source: BaseObject, target: BaseObject, map: Vec<usize>) -> Result<Self> {
        if map.len() != source.len() {
            return Err(Error::InvalidMorphism(format!(
                "assignment has {} entries for a source of size {}",
                map.len(),
                source.len()
            )));
        }
        if let Some(&bad) = map.iter().find(|&&j| j >= target.len()) {
            return Err(Error::InvalidMorphism(format!(
                "value #{bad} outside a target of size {}",
                target.len()
            )));
        }
        Ok(BaseMorphism { source, target, map })
    }

    /// From `(source id, target id)` pairs; every source id must appear once.
    pub fn from_pairs<S: AsRef<str>>(
        source: BaseObject,
        target: BaseObject,
        pairs: &[(S, S)],
    ) -> Result<Self> {
        let mut map = vec![usize::MAX; source.len()];
        for (x, y) in pairs {
            let i = source
                .index_of(x.as_ref())
                .ok_or_else(|| Error::UnknownElement(x.as_ref().to_string()))?;
            let j = target
                .index_of(y.as_ref())
                .ok_or_else(|| Error::UnknownElement(y.as_ref().to_string()))?;
            if map[i] != usize::MAX && map[i] != j {
                return Err(Error::InvalidMorphism(format!(
                    "`{}` is assigned twice",
                    x.as_ref()
                )));
            }
            map[i] = j;
        }
        if let Some(i) = map.iter().position(|&j| j == usize::MAX) {
            return Err(Error::InvalidMorphism(format!(
                "`{}` has no image",
                source.name(i)
            )));
        }
        Ok(BaseMorphism { source, target, map })
    }

    pub(crate) fn new_unchecked(source: BaseObject, target: BaseObject, map: Vec<usize>) -> Self {
        debug_assert_eq!(map.len(), source.len());
        debug_assert!(map.iter().all(|&j| j < target.len()));
        BaseMorphism { source, target, map }
    }

    pub fn identity(object: &BaseObject) -> Self {
        BaseMorphism {
            source: object.clone(),
            target: object.clone(),
            map: (0..object.len()).collect(),
        }
    }

    pub fn source(&self) -> &BaseObject {
        &self.source
    }

    pub fn target(&self) -> &BaseObject {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.map
    }

    pub fn apply(&self, i: usize) -> usize {
        self.map[i]
    }

    pub fn is_identity(&self) -> bool {
        self.source == self.target && self.map.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        self.map.iter().all(|&j| !std::mem::replace(&mut hit[j], true))
    }

    pub fn is_surjective(&self) -> bool {
        let mut hit = vec![false; self.target.len()];
        for &j in &self.map {
            hit[j] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// `self ∘ f`
    pub fn after(&self, f: &BaseMorphism) -> Result<BaseMorphism> {
        compose(self, f)
    }
}

/// `g ∘ f`
pub fn compose(g: &BaseMorphism, f: &BaseMorphism) -> Result<BaseMorphism> {
    if f.target != g.source {
        return Err(Error::Mismatch(format!(
            "cannot compose: target {:?} differs from source {:?}",
            f.target, g.source
        )));
    }
    Ok(BaseMorphism {
        source: f.source.clone(),
        target: g.target.clone(),
        map: f.map.iter().map(|&j| g.map[j]).collect(),
    })
}

/// The two classes of maps of the base instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum MapClass {
    /// injections
    N,
    /// surjections
    M,
}

impl MapClass {
    pub fn contains(self, f: &BaseMorphism) -> bool {
        match self {
            MapClass::N => f.is_injective(),
            MapClass::M => f.is_surjective(),
        }
    }
}

impl fmt::Display for MapClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MapClass::N => "N (injective)",
            MapClass::M => "M (surjective)",
        })
    }
}

pub fn is_in_n(f: &BaseMorphism) -> bool {
    MapClass::N.contains(f)
}

pub fn is_in_m(f: &BaseMorphism) -> bool {
    MapClass::M.contains(f)
}

/// Read access to a (possibly partially built) diagram over a finite poset,
/// with the arrow-reversing convention: `arrow(from, to)` is defined for
/// `to ≤ from` and goes `object(from) → object(to)`.
pub trait DiagramView {
    fn shape(&self) -> &FinPoset;
    fn object(&self, x: usize) -> &BaseObject;
    fn arrow(&self, from: usize, to: usize) -> &BaseMorphism;
}

/// All families `(ξ_r)` over `members` with `ξ_r ∈ candidates[r]` and
/// `D(r → s)(ξ_r) = ξ_s` whenever `s ≤ r`. A family is determined by its
/// values on the maximal members, so only those are branched on.
fn compatible_families<D: DiagramView + ?Sized>(
    d: &D,
    members: &[usize],
    candidates: &[Vec<usize>],
) -> Vec<Vec<usize>> {
    let shape = d.shape();
    let k = members.len();
    let maximal: Vec<usize> = (0..k)
        .filter(|&i| !(0..k).any(|j| shape.lt(members[i], members[j])))
        .collect();
    let below: Vec<Vec<usize>> = maximal
        .iter()
        .map(|&i| (0..k).filter(|&q| shape.le(members[q], members[i])).collect())
        .collect();
    let allowed: Vec<Vec<bool>> = (0..k)
        .map(|q| {
            let mut mask = vec![false; d.object(members[q]).len()];
            for &c in &candidates[q] {
                mask[c] = true;
            }
            mask
        })
        .collect();

    struct Search<'a, D: ?Sized> {
        d: &'a D,
        members: &'a [usize],
        maximal: &'a [usize],
        below: &'a [Vec<usize>],
        candidates: &'a [Vec<usize>],
        allowed: &'a [Vec<bool>],
        assign: Vec<Option<usize>>,
        out: Vec<Vec<usize>>,
    }

    impl<D: DiagramView + ?Sized> Search<'_, D> {
        fn run(&mut self, i: usize) {
            if i == self.maximal.len() {
                self.out
                    .push(self.assign.iter().map(|v| v.expect("every member lies below a maximal one")).collect());
                return;
            }
            let top = self.maximal[i];
            let m = self.members[top];
            for &v in &self.candidates[top] {
                let mut set = Vec::new();
                let mut ok = true;
                for &q in &self.below[i] {
                    let s = self.members[q];
                    let val = if q == top { v } else { self.d.arrow(m, s).apply(v) };
                    match self.assign[q] {
                        Some(w) if w != val => {
                            ok = false;
                            break;
                        }
                        Some(_) => {}
                        None => {
                            if !self.allowed[q][val] {
                                ok = false;
                                break;
                            }
                            self.assign[q] = Some(val);
                            set.push(q);
                        }
                    }
                }
                if ok {
                    self.run(i + 1);
                }
                for q in set {
                    self.assign[q] = None;
                }
            }
        }
    }

    let mut search = Search {
        d,
        members,
        maximal: &maximal,
        below: &below,
        candidates,
        allowed: &allowed,
        assign: vec![None; k],
        out: Vec::new(),
    };
    search.run(0);
    search.out
}

fn family_name<D: DiagramView + ?Sized>(d: &D, members: &[usize], family: &[usize]) -> String {
    let shape = d.shape();
    let parts: Vec<&str> = (0..members.len())
        .filter(|&i| !members.iter().any(|&o| shape.lt(members[i], o)))
        .map(|i| d.object(members[i]).name(family[i]))
        .collect();
    if parts.is_empty() {
        "*".to_string()
    } else {
        format!("({})", parts.join(","))
    }
}

/// The limit of a diagram over a finite set of indices (with the induced
/// order), realized as the set of compatible families.
#[derive(Clone, Debug)]
pub struct Limit {
    apex: BaseObject,
    members: Vec<usize>,
    families: Vec<Vec<usize>>,
    lookup: HashMap<Vec<usize>, usize>,
    projections: Vec<BaseMorphism>,
}

impl Limit {
    pub fn apex(&self) -> &BaseObject {
        &self.apex
    }

    /// Indices of the diagram the limit is taken over, in order.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn family(&self, i: usize) -> &[usize] {
        &self.families[i]
    }

    pub fn locate(&self, family: &[usize]) -> Option<usize> {
        self.lookup.get(family).copied()
    }

    /// Projection onto the `pos`-th member.
    pub fn projection(&self, pos: usize) -> &BaseMorphism {
        &self.projections[pos]
    }

    pub fn projection_at(&self, element: usize) -> Option<&BaseMorphism> {
        self.members
            .iter()
            .position(|&m| m == element)
            .map(|p| &self.projections[p])
    }

    /// The map `source → lim` induced by a cone, given one leg per member.
    pub fn induced(&self, source: &BaseObject, legs: &[BaseMorphism]) -> Result<BaseMorphism> {
        if legs.len() != self.members.len() {
            return Err(Error::Mismatch("cone has the wrong number of legs".into()));
        }
        for (leg, proj) in legs.iter().zip(&self.projections) {
            if leg.source() != source || leg.target() != proj.target() {
                return Err(Error::Mismatch("cone leg has the wrong endpoints".into()));
            }
        }
        let mut map = Vec::with_capacity(source.len());
        for x in 0..source.len() {
            let fam: Vec<usize> = legs.iter().map(|l| l.apply(x)).collect();
            let i = self
                .locate(&fam)
                .ok_or_else(|| Error::NonCommuting(format!("cone is not compatible at `{}`", source.name(x))))?;
            map.push(i);
        }
        Ok(BaseMorphism::new_unchecked(source.clone(), self.apex.clone(), map))
    }
}

/// `lim_{members} D` for any set of indices of `d` (the order is the one
/// induced from `d.shape()`). The empty limit is the terminal object.
pub fn limit_over<D: DiagramView + ?Sized>(d: &D, members: &[usize]) -> Limit {
    let candidates: Vec<Vec<usize>> = members.iter().map(|&m| (0..d.object(m).len()).collect()).collect();
    let families = compatible_families(d, members, &candidates);
    let names: Vec<String> = families.iter().map(|f| family_name(d, members, f)).collect();
    let apex = BaseObject::from_distinct(names);
    let projections = members
        .iter()
        .enumerate()
        .map(|(pos, &m)| {
            BaseMorphism::new_unchecked(
                apex.clone(),
                d.object(m).clone(),
                families.iter().map(|f| f[pos]).collect(),
            )
        })
        .collect();
    let lookup = families.iter().cloned().enumerate().map(|(i, f)| (f, i)).collect();
    Limit {
        apex,
        members: members.to_vec(),
        families,
        lookup,
        projections,
    }
}

/// The fiber product `X ×_Z Y`.
#[derive(Clone, Debug)]
pub struct Pullback {
    apex: BaseObject,
    pairs: Vec<(usize, usize)>,
    lookup: HashMap<(usize, usize), usize>,
    left: BaseMorphism,
    right: BaseMorphism,
}

impl Pullback {
    pub fn apex(&self) -> &BaseObject {
        &self.apex
    }

    /// `X ×_Z Y → X`
    pub fn left(&self) -> &BaseMorphism {
        &self.left
    }

    /// `X ×_Z Y → Y`
    pub fn right(&self) -> &BaseMorphism {
        &self.right
    }

    pub fn pair(&self, i: usize) -> (usize, usize) {
        self.pairs[i]
    }

    pub fn induced(&self, to_left: &BaseMorphism, to_right: &BaseMorphism) -> Result<BaseMorphism> {
        if to_left.source() != to_right.source() {
            return Err(Error::Mismatch("legs have different sources".into()));
        }
        let source = to_left.source();
        let mut map = Vec::with_capacity(source.len());
        for x in 0..source.len() {
            let i = self
                .lookup
                .get(&(to_left.apply(x), to_right.apply(x)))
                .copied()
                .ok_or_else(|| Error::NonCommuting(format!("legs disagree over `{}`", source.name(x))))?;
            map.push(i);
        }
        Ok(BaseMorphism::new_unchecked(source.clone(), self.apex.clone(), map))
    }
}

pub fn pullback(f: &BaseMorphism, g: &BaseMorphism) -> Result<Pullback> {
    if f.target() != g.target() {
        return Err(Error::Mismatch("pullback of maps with different targets".into()));
    }
    let (x, y) = (f.source(), g.source());
    let mut pairs = Vec::new();
    for i in 0..x.len() {
        for j in 0..y.len() {
            if f.apply(i) == g.apply(j) {
                pairs.push((i, j));
            }
        }
    }
    let apex = BaseObject::from_distinct(
        pairs
            .iter()
            .map(|&(i, j)| format!("({},{})", x.name(i), y.name(j)))
            .collect(),
    );
    let left = BaseMorphism::new_unchecked(apex.clone(), x.clone(), pairs.iter().map(|p| p.0).collect());
    let right = BaseMorphism::new_unchecked(apex.clone(), y.clone(), pairs.iter().map(|p| p.1).collect());
    let lookup = pairs.iter().copied().enumerate().map(|(i, p)| (p, i)).collect();
    Ok(Pullback {
        apex,
        pairs,
        lookup,
        left,
        right,
    })
}

/// The relative matching object `Y_t ×_{lim_{s<t} Y} lim_{s<t} X` for a map
/// of diagrams `X → Y`, computed fiberwise: for each `y ∈ Y_t`, the
/// compatible families of `X` over `{s < t}` lying over the image of `y`.
/// Points are pairs `(y, family)`.
#[derive(Clone, Debug)]
pub struct MatchingPullback {
    apex: BaseObject,
    members: Vec<usize>,
    points: Vec<(usize, Vec<usize>)>,
    lookup: HashMap<(usize, Vec<usize>), usize>,
    to_target: BaseMorphism,
    projections: Vec<BaseMorphism>,
}

impl MatchingPullback {
    pub fn apex(&self) -> &BaseObject {
        &self.apex
    }

    /// The strict downset the matching limit is over.
    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn point(&self, i: usize) -> (usize, &[usize]) {
        let (y, ref fam) = self.points[i];
        (y, fam)
    }

    pub fn locate(&self, y: usize, family: &[usize]) -> Option<usize> {
        self.lookup.get(&(y, family.to_vec())).copied()
    }

    /// `P → Y_t`
    pub fn to_target(&self) -> &BaseMorphism {
        &self.to_target
    }

    /// `P → X_s` for the `pos`-th member `s`.
    pub fn projection(&self, pos: usize) -> &BaseMorphism {
        &self.projections[pos]
    }

    pub fn position_of(&self, element: usize) -> Option<usize> {
        self.members.iter().position(|&m| m == element)
    }
}

/// Builds the relative matching object at `t` for the map of diagrams with
/// components `component(s): X_s → Y_s`. Only the members of `{s < t}` (in
/// `target.shape()`) are read from `source`, so `source` may be a partial
/// diagram defined on a Reysha containing that downset.
pub fn matching_pullback<X, Y, C>(source: &X, target: &Y, component: C, t: usize) -> MatchingPullback
where
    X: DiagramView + ?Sized,
    Y: DiagramView + ?Sized,
    C: Fn(usize) -> BaseMorphism,
{
    let members: Vec<usize> = target.shape().strict_downset(t).members().to_vec();
    // fibers[pos][v] = elements of X(s) over v ∈ Y(s)
    let fibers: Vec<Vec<Vec<usize>>> = members
        .iter()
        .map(|&s| {
            let c = component(s);
            let mut fib = vec![Vec::new(); target.object(s).len()];
            for xi in 0..source.object(s).len() {
                fib[c.apply(xi)].push(xi);
            }
            fib
        })
        .collect();
    let y_t = target.object(t);
    let mut points = Vec::new();
    let mut names = Vec::new();
    for y in 0..y_t.len() {
        let candidates: Vec<Vec<usize>> = members
            .iter()
            .enumerate()
            .map(|(pos, &s)| fibers[pos][target.arrow(t, s).apply(y)].clone())
            .collect();
        for fam in compatible_families(source, &members, &candidates) {
            names.push(format!("({},{})", y_t.name(y), family_name(source, &members, &fam)));
            points.push((y, fam));
        }
    }
    let apex = BaseObject::from_distinct(names);
    let to_target = BaseMorphism::new_unchecked(apex.clone(), y_t.clone(), points.iter().map(|p| p.0).collect());
    let projections = members
        .iter()
        .enumerate()
        .map(|(pos, &s)| {
            BaseMorphism::new_unchecked(
                apex.clone(),
                source.object(s).clone(),
                points.iter().map(|p| p.1[pos]).collect(),
            )
        })
        .collect();
    let lookup = points.iter().cloned().enumerate().map(|(i, p)| (p, i)).collect();
    MatchingPullback {
        apex,
        members,
        points,
        lookup,
        to_target,
        projections,
    }
}

/// `X --left--> mid --right--> Y` with `left ∈ N`, `right ∈ M`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FactorizationTriple {
    pub mid: BaseObject,
    pub left: BaseMorphism,
    pub right: BaseMorphism,
}

/// The functorial factorization through `X ⊔ Y`: `left` is the inclusion of
/// `X`, `right` is `[f, id_Y]`.
pub fn factorize_base(f: &BaseMorphism) -> FactorizationTriple {
    let (x, y) = (f.source(), f.target());
    let mut carrier = Vec::with_capacity(x.len() + y.len());
    carrier.extend(x.elements().iter().map(|e| format!("(0,{e})")));
    carrier.extend(y.elements().iter().map(|e| format!("(1,{e})")));
    let mid = BaseObject::from_distinct(carrier);
    let left = BaseMorphism::new_unchecked(x.clone(), mid.clone(), (0..x.len()).collect());
    let mut right_map: Vec<usize> = f.assignment().to_vec();
    right_map.extend(0..y.len());
    let right = BaseMorphism::new_unchecked(mid.clone(), y.clone(), right_map);
    FactorizationTriple { mid, left, right }
}

impl FactorizationTriple {
    /// The middle map `L_f → L_t` induced by a commuting square
    /// `(l, k): f → t`, i.e. `l ⊔ k`. `self` must factor `f` and `other`
    /// must factor `t`.
    pub fn square_map(
        &self,
        other: &FactorizationTriple,
        l: &BaseMorphism,
        k: &BaseMorphism,
    ) -> Result<BaseMorphism> {
        let (x, y) = (self.left.source(), self.right.target());
        let (z, w) = (other.left.source(), other.right.target());
        if l.source() != x || l.target() != z || k.source() != y || k.target() != w {
            return Err(Error::Mismatch("square has the wrong endpoints".into()));
        }
        let f = compose(&self.right, &self.left)?;
        let t = compose(&other.right, &other.left)?;
        if compose(k, &f)? != compose(&t, l)? {
            return Err(Error::NonCommuting("k∘f ≠ t∘l".into()));
        }
        let mut map: Vec<usize> = l.assignment().to_vec();
        map.extend(k.assignment().iter().map(|&j| z.len() + j));
        Ok(BaseMorphism::new_unchecked(self.mid.clone(), other.mid.clone(), map))
    }
}

/// The mid map of the functorial factorization on a square `(l, k): f → t`.
pub fn factorize_square(
    f: &BaseMorphism,
    t: &BaseMorphism,
    l: &BaseMorphism,
    k: &BaseMorphism,
) -> Result<BaseMorphism> {
    factorize_base(f).square_map(&factorize_base(t), l, k)
}

/// A diagonal `h: B → X` for the square `f∘top = bottom∘g` with `g`
/// injective and `f` surjective. Off the image of `g`, `h` picks the first
/// preimage (in carrier order) of `bottom`'s value.
pub fn lift_base(
    g: &BaseMorphism,
    f: &BaseMorphism,
    top: &BaseMorphism,
    bottom: &BaseMorphism,
) -> Result<BaseMorphism> {
    check_square(g, f, top, bottom)?;
    if !g.is_injective() {
        return Err(Error::ClassViolation("left map is not injective".into()));
    }
    if !f.is_surjective() {
        return Err(Error::ClassViolation("right map is not surjective".into()));
    }
    let b = g.target();
    let mut preimage = vec![None; b.len()];
    for a in 0..g.source().len() {
        preimage[g.apply(a)] = Some(a);
    }
    let mut first_over = vec![usize::MAX; f.target().len()];
    for x in (0..f.source().len()).rev() {
        first_over[f.apply(x)] = x;
    }
    let map = (0..b.len())
        .map(|i| match preimage[i] {
            Some(a) => top.apply(a),
            None => first_over[bottom.apply(i)],
        })
        .collect();
    Ok(BaseMorphism::new_unchecked(b.clone(), f.source().clone(), map))
}

/// Checks endpoints and commutativity of `f∘top = bottom∘g`.
pub fn check_square(
    g: &BaseMorphism,
    f: &BaseMorphism,
    top: &BaseMorphism,
    bottom: &BaseMorphism,
) -> Result<()> {
    if top.source() != g.source()
        || top.target() != f.source()
        || bottom.source() != g.target()
        || bottom.target() != f.target()
    {
        return Err(Error::Mismatch("lifting square has the wrong endpoints".into()));
    }
    if compose(f, top)? != compose(bottom, g)? {
        return Err(Error::NonCommuting("f∘top ≠ bottom∘g".into()));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn obj(ids: &[&str]) -> BaseObject {
        BaseObject::new(ids.iter().copied()).unwrap()
    }

    fn map(src: &BaseObject, tgt: &BaseObject, pairs: &[(&str, &str)]) -> BaseMorphism {
        BaseMorphism::from_pairs(src.clone(), tgt.clone(), pairs).unwrap()
    }

    #[test]
    fn composition_examples() {
        let two = obj(&["1", "2"]);
        let one = obj(&["1"]);
        let f = map(&two, &one, &[("1", "1"), ("2", "1")]);
        assert_eq!(compose(&BaseMorphism::identity(&one), &f).unwrap(), f);
        let m = map(&one, &two, &[("1", "1")]);
        let c = compose(&m, &f).unwrap();
        assert_eq!(c, map(&two, &two, &[("1", "1"), ("2", "1")]));
        assert!(matches!(compose(&f, &f), Err(Error::Mismatch(_))));
    }

    #[test]
    fn class_membership() {
        let one = obj(&["1"]);
        let two = obj(&["1", "2"]);
        let inc = map(&one, &two, &[("1", "1")]);
        assert!(is_in_n(&inc) && !is_in_m(&inc));
        let c = map(&two, &one, &[("1", "1"), ("2", "1")]);
        assert!(!is_in_n(&c) && is_in_m(&c));
        let id = BaseMorphism::identity(&two);
        assert!(is_in_n(&id) && is_in_m(&id));
    }

    #[test]
    fn pullback_examples() {
        let two = obj(&["1", "2"]);
        let one = obj(&["1"]);
        let c = map(&two, &one, &[("1", "1"), ("2", "1")]);
        assert_eq!(pullback(&c, &c).unwrap().apex().len(), 4);
        let id = BaseMorphism::identity(&one);
        let pb = pullback(&c, &id).unwrap();
        assert_eq!(pb.apex().len(), 2);
        assert!(pb.left().is_injective() && pb.left().is_surjective());

        let z = obj(&["p", "q", "r"]);
        let f = map(&one, &z, &[("1", "p")]);
        let g = map(&two, &z, &[("1", "q"), ("2", "r")]);
        assert!(pullback(&f, &g).unwrap().apex().is_empty());
    }

    #[test]
    fn factorization_examples() {
        let two = obj(&["1", "2"]);
        let one = obj(&["1"]);
        let f = map(&two, &one, &[("1", "1"), ("2", "1")]);
        let t = factorize_base(&f);
        assert_eq!(t.mid.len(), 3);
        assert!(is_in_n(&t.left) && is_in_m(&t.right));
        assert_eq!(compose(&t.right, &t.left).unwrap(), f);

        let e = BaseMorphism::identity(&BaseObject::empty());
        assert!(factorize_base(&e).mid.is_empty());

        let mid = factorize_square(&f, &f, &BaseMorphism::identity(&two), &BaseMorphism::identity(&one)).unwrap();
        assert!(mid.is_identity());
    }

    #[test]
    fn lift_examples() {
        let one = obj(&["1"]);
        let two = obj(&["1", "2"]);
        let pq = obj(&["p", "q"]);
        let r = obj(&["r"]);
        let g = map(&one, &two, &[("1", "1")]);
        let f = map(&pq, &r, &[("p", "r"), ("q", "r")]);
        let top = map(&one, &pq, &[("1", "p")]);
        let bottom = map(&two, &r, &[("1", "r"), ("2", "r")]);
        let h = lift_base(&g, &f, &top, &bottom).unwrap();
        assert_eq!(h, map(&two, &pq, &[("1", "p"), ("2", "p")]));

        // g = id forces h = top; f = id forces h = bottom
        let idpq = BaseMorphism::identity(&pq);
        let idtwo = BaseMorphism::identity(&two);
        let sq_top = map(&two, &pq, &[("1", "q"), ("2", "p")]);
        let sq_bot = compose(&f, &sq_top).unwrap();
        assert_eq!(lift_base(&idtwo, &f, &sq_top, &sq_bot).unwrap(), sq_top);
        let g2 = map(&one, &two, &[("1", "2")]);
        let top2 = map(&one, &pq, &[("1", "q")]);
        let bot2 = map(&two, &pq, &[("1", "p"), ("2", "q")]);
        assert_eq!(lift_base(&g2, &idpq, &top2, &bot2).unwrap(), bot2);

        let bad_bottom = map(&two, &pq, &[("1", "p"), ("2", "p")]);
        assert!(matches!(
            lift_base(&g2, &idpq, &top2, &bad_bottom),
            Err(Error::NonCommuting(_))
        ));
    }

    #[test]
    fn reserved_ids() {
        assert!(validate_id("x1").is_ok());
        assert!(validate_id("*").is_ok());
        assert!(validate_id("(0,(a,*))").is_ok());
        assert!(validate_id("(a").is_err());
        assert!(validate_id("a,b").is_err());
        assert!(validate_id("(a,b)c").is_err());
        assert!(validate_id("()").is_err());
        assert!(validate_id("").is_err());
    }
}
