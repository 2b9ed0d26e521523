//! Diagrams `A → Set` over finite posets and natural transformations.
//!
//! Arrows follow the order convention of the pro-category literature: there
//! is a morphism `u → v` iff `u ≥ v`, so a diagram assigns a map
//! `D(x) → D(y)` to every pair `y ≤ x`. All such maps are stored, not only
//! those on covering pairs.

use std::fmt;
use std::sync::Arc;

use crate::base::{
    compose, limit_over, matching_pullback, pullback, BaseMorphism, BaseObject, DiagramView,
    MapClass, MatchingPullback,
};
use crate::error::{Error, Result};
use crate::order::{FinPoset, Reysha};

pub(crate) fn same_shape(a: &Arc<FinPoset>, b: &Arc<FinPoset>) -> bool {
    Arc::ptr_eq(a, b) || a == b
}

struct DiagramData {
    shape: Arc<FinPoset>,
    objects: Vec<BaseObject>,
    // arrows[from * n + to], present iff to ≤ from
    arrows: Vec<Option<BaseMorphism>>,
}

#[derive(Clone)]
pub struct Diagram(Arc<DiagramData>);

impl PartialEq for Diagram {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (same_shape(&self.0.shape, &other.0.shape)
                && self.0.objects == other.0.objects
                && self.0.arrows == other.0.arrows)
    }
}

impl Eq for Diagram {}

impl fmt::Debug for Diagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shape = self.shape();
        let mut m = f.debug_map();
        for x in 0..shape.len() {
            m.entry(&shape.name(x), self.object(x));
        }
        m.finish()
    }
}

impl DiagramView for Diagram {
    fn shape(&self) -> &FinPoset {
        &self.0.shape
    }

    fn object(&self, x: usize) -> &BaseObject {
        &self.0.objects[x]
    }

    fn arrow(&self, from: usize, to: usize) -> &BaseMorphism {
        self.0.arrows[from * self.0.objects.len() + to]
            .as_ref()
            .expect("arrow requested for an incomparable pair")
    }
}

impl Diagram {
    /// Builds a diagram from objects and any generating set of maps
    /// `(from, to, D(from) → D(to))` with `to ≤ from`. Missing maps are
    /// filled in by composition; the result is checked for functoriality on
    /// every comparable triple.
    pub fn new(
        shape: Arc<FinPoset>,
        objects: Vec<BaseObject>,
        maps: Vec<(usize, usize, BaseMorphism)>,
    ) -> Result<Self> {
        let n = shape.len();
        if objects.len() != n {
            return Err(Error::Mismatch(format!(
                "{} objects for a shape with {n} elements",
                objects.len()
            )));
        }
        let mut arrows: Vec<Option<BaseMorphism>> = vec![None; n * n];
        for x in 0..n {
            arrows[x * n + x] = Some(BaseMorphism::identity(&objects[x]));
        }
        for (from, to, m) in maps {
            if from >= n || to >= n {
                return Err(Error::Internal("map index outside the shape".into()));
            }
            let label = format!("{}<={}", shape.name(to), shape.name(from));
            if !shape.le(to, from) {
                return Err(Error::NotFunctorial(format!("`{label}` is not a relation of the poset")));
            }
            if m.source() != &objects[from] || m.target() != &objects[to] {
                return Err(Error::Mismatch(format!("map `{label}` has the wrong endpoints")));
            }
            if from == to && !m.is_identity() {
                return Err(Error::NotFunctorial(format!("`{label}` is not the identity")));
            }
            arrows[from * n + to] = Some(m);
        }
        // close under composition, shortest gaps first
        let mut pairs: Vec<(usize, usize)> = shape.strict_pairs().map(|(s, t)| (t, s)).collect();
        pairs.sort_by_key(|&(t, s)| (shape.degree(t) - shape.degree(s), t, s));
        for &(t, s) in &pairs {
            if arrows[t * n + s].is_some() {
                continue;
            }
            let mid = (0..n).find(|&m| {
                shape.lt(s, m) && shape.lt(m, t) && arrows[t * n + m].is_some() && arrows[m * n + s].is_some()
            });
            match mid {
                Some(m) => {
                    let c = compose(
                        arrows[m * n + s].as_ref().unwrap(),
                        arrows[t * n + m].as_ref().unwrap(),
                    )?;
                    arrows[t * n + s] = Some(c);
                }
                None => {
                    return Err(Error::NotFunctorial(format!(
                        "no map given for `{}<={}`",
                        shape.name(s),
                        shape.name(t)
                    )))
                }
            }
        }
        let d = Diagram(Arc::new(DiagramData {
            shape,
            objects,
            arrows,
        }));
        d.check_functorial()?;
        Ok(d)
    }

    /// All arrows supplied; only debug-checked.
    pub(crate) fn from_complete(
        shape: Arc<FinPoset>,
        objects: Vec<BaseObject>,
        arrows: Vec<Option<BaseMorphism>>,
    ) -> Self {
        let d = Diagram(Arc::new(DiagramData {
            shape,
            objects,
            arrows,
        }));
        debug_assert!(d.check_functorial().is_ok());
        d
    }

    pub fn constant(shape: Arc<FinPoset>, object: BaseObject) -> Self {
        let n = shape.len();
        let id = BaseMorphism::identity(&object);
        let arrows = (0..n * n)
            .map(|i| shape.le(i % n, i / n).then(|| id.clone()))
            .collect();
        Diagram(Arc::new(DiagramData {
            objects: vec![object; n],
            shape,
            arrows,
        }))
    }

    pub fn shape_arc(&self) -> &Arc<FinPoset> {
        &self.0.shape
    }

    pub fn objects(&self) -> &[BaseObject] {
        &self.0.objects
    }

    /// Verifies identities and `D(m→s)∘D(t→m) = D(t→s)` for all `s ≤ m ≤ t`.
    pub fn check_functorial(&self) -> Result<()> {
        let shape = self.shape();
        let n = shape.len();
        for t in 0..n {
            if !self.arrow(t, t).is_identity() {
                return Err(Error::NotFunctorial(format!("`{0}<={0}` is not the identity", shape.name(t))));
            }
            for m in 0..n {
                if !shape.lt(m, t) {
                    continue;
                }
                for s in 0..n {
                    if shape.lt(s, m) && compose(self.arrow(m, s), self.arrow(t, m))? != *self.arrow(t, s) {
                        return Err(Error::NotFunctorial(format!(
                            "`{}<={}` differs from the composite through `{}`",
                            shape.name(s),
                            shape.name(t),
                            shape.name(m)
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The restriction to a Reysha, indexed by `r.members()` in order.
    pub fn restrict(&self, r: &Reysha) -> Result<Diagram> {
        let shape = self.shape();
        if !shape.is_reysha(r.members()) {
            return Err(Error::Precondition("restriction to a subset that is not a Reysha".into()));
        }
        let (sub, back) = shape.subposet(r.members());
        Ok(self.pull_back_along(Arc::new(sub), &back))
    }

    /// The composite `D∘α` for an order-preserving `α: B → A`.
    pub fn reindex(&self, shape_b: Arc<FinPoset>, alpha: &[usize]) -> Result<Diagram> {
        let a = self.shape();
        if alpha.len() != shape_b.len() || alpha.iter().any(|&x| x >= a.len()) {
            return Err(Error::Mismatch("index map has the wrong size".into()));
        }
        for (s, t) in shape_b.strict_pairs() {
            if !a.le(alpha[s], alpha[t]) {
                return Err(Error::Precondition(format!(
                    "index map is not order preserving at `{}` < `{}`",
                    shape_b.name(s),
                    shape_b.name(t)
                )));
            }
        }
        Ok(self.pull_back_along(shape_b, alpha))
    }

    fn pull_back_along(&self, shape: Arc<FinPoset>, alpha: &[usize]) -> Diagram {
        let n = shape.len();
        let objects = alpha.iter().map(|&a| self.object(a).clone()).collect();
        let arrows = (0..n * n)
            .map(|i| {
                let (t, s) = (i / n, i % n);
                shape.le(s, t).then(|| self.arrow(alpha[t], alpha[s]).clone())
            })
            .collect();
        Diagram(Arc::new(DiagramData {
            shape,
            objects,
            arrows,
        }))
    }
}

/// A diagram defined on a growing Reysha; used by the inductive
/// constructions.
#[derive(Clone, Debug)]
pub(crate) struct PartialDiagram {
    shape: Arc<FinPoset>,
    objects: Vec<Option<BaseObject>>,
    arrows: Vec<Option<BaseMorphism>>,
}

impl DiagramView for PartialDiagram {
    fn shape(&self) -> &FinPoset {
        &self.shape
    }

    fn object(&self, x: usize) -> &BaseObject {
        self.objects[x].as_ref().expect("element not yet constructed")
    }

    fn arrow(&self, from: usize, to: usize) -> &BaseMorphism {
        self.arrows[from * self.objects.len() + to]
            .as_ref()
            .expect("arrow not yet constructed")
    }
}

impl PartialDiagram {
    pub(crate) fn new(shape: Arc<FinPoset>) -> Self {
        let n = shape.len();
        PartialDiagram {
            shape,
            objects: vec![None; n],
            arrows: vec![None; n * n],
        }
    }

    pub(crate) fn has(&self, x: usize) -> bool {
        self.objects[x].is_some()
    }

    /// Adds `x` with its object and the maps to every `s < x` (given as
    /// `(s, map)`); the identity is added automatically.
    pub(crate) fn graft(&mut self, x: usize, object: BaseObject, down: Vec<(usize, BaseMorphism)>) {
        let n = self.objects.len();
        self.arrows[x * n + x] = Some(BaseMorphism::identity(&object));
        self.objects[x] = Some(object);
        for (s, m) in down {
            self.arrows[x * n + s] = Some(m);
        }
    }

    pub(crate) fn finish(self) -> Result<Diagram> {
        if self.objects.iter().any(Option::is_none) {
            return Err(Error::Internal("partial diagram is incomplete".into()));
        }
        Ok(Diagram::from_complete(
            self.shape,
            self.objects.into_iter().map(Option::unwrap).collect(),
            self.arrows,
        ))
    }
}

/// A natural transformation between diagrams of the same shape.
#[derive(Clone, PartialEq, Eq)]
pub struct NatTrans {
    source: Diagram,
    target: Diagram,
    components: Vec<BaseMorphism>,
}

impl fmt::Debug for NatTrans {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shape = self.source.shape();
        let mut m = f.debug_map();
        for (x, c) in self.components.iter().enumerate() {
            m.entry(&shape.name(x), c);
        }
        m.finish()
    }
}

impl NatTrans {
    pub fn new(source: Diagram, target: Diagram, components: Vec<BaseMorphism>) -> Result<Self> {
        if !same_shape(source.shape_arc(), target.shape_arc()) {
            return Err(Error::Mismatch("source and target have different shapes".into()));
        }
        let shape = source.shape();
        if components.len() != shape.len() {
            return Err(Error::Mismatch("wrong number of components".into()));
        }
        for (x, c) in components.iter().enumerate() {
            if c.source() != source.object(x) || c.target() != target.object(x) {
                return Err(Error::Mismatch(format!("component at `{}` has the wrong endpoints", shape.name(x))));
            }
        }
        let t = NatTrans {
            source,
            target,
            components,
        };
        t.check_natural()?;
        Ok(t)
    }

    pub fn identity(d: &Diagram) -> Self {
        let components = d.objects().iter().map(BaseMorphism::identity).collect();
        NatTrans {
            source: d.clone(),
            target: d.clone(),
            components,
        }
    }

    pub fn source(&self) -> &Diagram {
        &self.source
    }

    pub fn target(&self) -> &Diagram {
        &self.target
    }

    pub fn shape(&self) -> &FinPoset {
        self.source.shape()
    }

    pub fn component(&self, x: usize) -> &BaseMorphism {
        &self.components[x]
    }

    pub fn components(&self) -> &[BaseMorphism] {
        &self.components
    }

    pub fn check_natural(&self) -> Result<()> {
        let shape = self.shape();
        for (s, t) in shape.strict_pairs() {
            let left = compose(self.target.arrow(t, s), &self.components[t])?;
            let right = compose(&self.components[s], self.source.arrow(t, s))?;
            if left != right {
                return Err(Error::NotNatural(format!(
                    "square for `{}<={}` does not commute",
                    shape.name(s),
                    shape.name(t)
                )));
            }
        }
        Ok(())
    }

    /// Vertical composite `g ∘ f`.
    pub fn then(&self, g: &NatTrans) -> Result<NatTrans> {
        if self.target != g.source {
            return Err(Error::Mismatch("transformations are not composable".into()));
        }
        let components = self
            .components
            .iter()
            .zip(&g.components)
            .map(|(f, g)| compose(g, f))
            .collect::<Result<_>>()?;
        Ok(NatTrans {
            source: self.source.clone(),
            target: g.target.clone(),
            components,
        })
    }

    pub fn restrict(&self, r: &Reysha) -> Result<NatTrans> {
        let source = self.source.restrict(r)?;
        let target = self.target.restrict(r)?;
        let components = r.members().iter().map(|&x| self.components[x].clone()).collect();
        Ok(NatTrans {
            source,
            target,
            components,
        })
    }

    pub fn reindex(&self, shape_b: Arc<FinPoset>, alpha: &[usize]) -> Result<NatTrans> {
        let source = self.source.reindex(shape_b.clone(), alpha)?;
        let target = self.target.reindex(shape_b, alpha)?;
        let components = alpha.iter().map(|&a| self.components[a].clone()).collect();
        Ok(NatTrans {
            source,
            target,
            components,
        })
    }

    pub fn is_levelwise(&self, class: MapClass) -> bool {
        self.components.iter().all(|c| class.contains(c))
    }

    /// The relative matching object at `x` together with the induced map
    /// `X_x → Y_x ×_{lim_{s<x} Y} lim_{s<x} X`.
    pub fn relative_matching_map(&self, x: usize) -> (MatchingPullback, BaseMorphism) {
        let p = matching_pullback(&self.source, &self.target, |s| self.components[s].clone(), x);
        let map = relative_map_into(&p, &self.source, &self.components[x], x);
        (p, map)
    }

    /// The same map computed the long way: both matching limits, their
    /// pullback, and the induced map. Used as an oracle.
    pub fn relative_matching_map_via_limits(&self, x: usize) -> Result<BaseMorphism> {
        let down = self.shape().strict_downset(x);
        let lx = limit_over(&self.source, down.members());
        let ly = limit_over(&self.target, down.members());
        let legs_y: Vec<BaseMorphism> = down.members().iter().map(|&s| self.target.arrow(x, s).clone()).collect();
        let y_to_lim = ly.induced(self.target.object(x), &legs_y)?;
        let legs_lim: Vec<BaseMorphism> = down
            .members()
            .iter()
            .enumerate()
            .map(|(pos, &s)| compose(&self.components[s], lx.projection(pos)))
            .collect::<Result<_>>()?;
        let lim_map = ly.induced(lx.apex(), &legs_lim)?;
        let pb = pullback(&y_to_lim, &lim_map)?;
        let legs_x: Vec<BaseMorphism> = down.members().iter().map(|&s| self.source.arrow(x, s).clone()).collect();
        let x_to_lim = lx.induced(self.source.object(x), &legs_x)?;
        pb.induced(&self.components[x], &x_to_lim)
    }

    /// Every relative matching map lies in `class`.
    pub fn is_special(&self, class: MapClass) -> bool {
        self.special_failure(class).is_none()
    }

    /// The first element (in degree order) where the relative matching map
    /// is not in `class`.
    pub fn special_failure(&self, class: MapClass) -> Option<usize> {
        let shape = self.shape();
        shape
            .by_degree()
            .iter()
            .copied()
            .find(|&x| !class.contains(&self.relative_matching_map(x).1))
    }
}

/// The levelwise pullback `X ×_Z Y` of `f: X → Z` and `g: Y → Z`, with its
/// two projections.
pub fn levelwise_pullback(f: &NatTrans, g: &NatTrans) -> Result<(Diagram, NatTrans, NatTrans)> {
    if f.target != g.target {
        return Err(Error::Mismatch("pullback of transformations with different targets".into()));
    }
    let shape = f.source.shape_arc().clone();
    let n = shape.len();
    let pbs = (0..n)
        .map(|x| pullback(&f.components[x], &g.components[x]))
        .collect::<Result<Vec<_>>>()?;
    let objects: Vec<BaseObject> = pbs.iter().map(|p| p.apex().clone()).collect();
    let mut arrows = vec![None; n * n];
    for t in 0..n {
        arrows[t * n + t] = Some(BaseMorphism::identity(&objects[t]));
        for s in 0..n {
            if shape.lt(s, t) {
                let l = compose(f.source.arrow(t, s), pbs[t].left())?;
                let r = compose(g.source.arrow(t, s), pbs[t].right())?;
                arrows[t * n + s] = Some(pbs[s].induced(&l, &r)?);
            }
        }
    }
    let d = Diagram::from_complete(shape, objects, arrows);
    let left = NatTrans::new(d.clone(), f.source.clone(), pbs.iter().map(|p| p.left().clone()).collect())?;
    let right = NatTrans::new(d.clone(), g.source.clone(), pbs.iter().map(|p| p.right().clone()).collect())?;
    Ok((d, left, right))
}

/// `ξ ↦ (comp(ξ), (X(x→s)ξ)_s)` into a matching pullback built at `x`.
pub(crate) fn relative_map_into<X: DiagramView + ?Sized>(
    p: &MatchingPullback,
    source: &X,
    comp: &BaseMorphism,
    x: usize,
) -> BaseMorphism {
    let obj = source.object(x);
    let mut fam = vec![0; p.members().len()];
    let map = (0..obj.len())
        .map(|xi| {
            for (pos, &s) in p.members().iter().enumerate() {
                fam[pos] = source.arrow(x, s).apply(xi);
            }
            p.locate(comp.apply(xi), &fam)
                .expect("naturality puts the image inside the matching pullback")
        })
        .collect();
    BaseMorphism::new_unchecked(obj.clone(), p.apex().clone(), map)
}
