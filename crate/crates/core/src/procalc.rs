//! The pre-morphism model of the pro-category at finite truncation.
//!
//! A pre-morphism `F → G` between diagrams over `A` and `B` is a strictly
//! increasing `α: B → A` together with a natural family
//! `φ_b: F(α b) → G(b)`. Pro-morphisms are connected components of the
//! poset of pre-morphisms. Everything here is written against
//! [`LevelDiagram`], so the same code handles diagrams of sets and diagrams
//! of arrows (natural transformations, whose level maps are commuting
//! squares).
//!
//! The index poset is a finite truncation of an infinite one. Searches for
//! bounds and successors only look inside it, and report
//! [`Error::TruncationExhausted`] when nothing suitable exists there.

use std::fmt;

use crate::base::{compose, BaseMorphism, DiagramView};
use crate::diagram::{Diagram, NatTrans};
use crate::error::{Error, Result};
use crate::order::FinPoset;

/// Node budget for the strict-assignment searches.
pub const DEFAULT_SEARCH_CAP: usize = 1_000_000;

/// A diagram over a finite poset whose level maps can be composed and
/// compared.
pub trait LevelDiagram {
    type Map: Clone + PartialEq + fmt::Debug;

    fn shape(&self) -> &FinPoset;

    /// `F(from → to)` for `to ≤ from`.
    fn structure_map(&self, from: usize, to: usize) -> Self::Map;

    /// `g ∘ f`
    fn compose_maps(g: &Self::Map, f: &Self::Map) -> Result<Self::Map>;

    /// Checks that `m` is a map `self(x) → target(y)`.
    fn check_fit(&self, x: usize, target: &Self, y: usize, m: &Self::Map) -> Result<()>;
}

impl LevelDiagram for Diagram {
    type Map = BaseMorphism;

    fn shape(&self) -> &FinPoset {
        DiagramView::shape(self)
    }

    fn structure_map(&self, from: usize, to: usize) -> BaseMorphism {
        self.arrow(from, to).clone()
    }

    fn compose_maps(g: &BaseMorphism, f: &BaseMorphism) -> Result<BaseMorphism> {
        compose(g, f)
    }

    fn check_fit(&self, x: usize, target: &Self, y: usize, m: &BaseMorphism) -> Result<()> {
        if m.source() != self.object(x) || m.target() != target.object(y) {
            return Err(Error::Mismatch(format!(
                "map at `{}` does not go from F({}) to G({})",
                DiagramView::shape(target).name(y),
                DiagramView::shape(self).name(x),
                DiagramView::shape(target).name(y)
            )));
        }
        Ok(())
    }
}

/// A map of arrows: a commuting square `top: X → X'`, `bottom: Y → Y'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ArrowMap {
    pub top: BaseMorphism,
    pub bottom: BaseMorphism,
}

impl LevelDiagram for NatTrans {
    type Map = ArrowMap;

    fn shape(&self) -> &FinPoset {
        NatTrans::shape(self)
    }

    fn structure_map(&self, from: usize, to: usize) -> ArrowMap {
        ArrowMap {
            top: self.source().arrow(from, to).clone(),
            bottom: self.target().arrow(from, to).clone(),
        }
    }

    fn compose_maps(g: &ArrowMap, f: &ArrowMap) -> Result<ArrowMap> {
        Ok(ArrowMap {
            top: compose(&g.top, &f.top)?,
            bottom: compose(&g.bottom, &f.bottom)?,
        })
    }

    fn check_fit(&self, x: usize, target: &Self, y: usize, m: &ArrowMap) -> Result<()> {
        self.source().check_fit(x, target.source(), y, &m.top)?;
        self.target().check_fit(x, target.target(), y, &m.bottom)?;
        if compose(target.component(y), &m.top)? != compose(&m.bottom, self.component(x))? {
            return Err(Error::NonCommuting(format!(
                "square at `{}` does not commute",
                target.shape().name(y)
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PreMorphism<M> {
    pub alpha: Vec<usize>,
    pub components: Vec<M>,
}

/// Level representatives without monotonicity: `rep[b] = (r(b), F(r b) → G(b))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawMorphism<M> {
    pub rep: Vec<(usize, M)>,
}

pub fn identity_pm<L: LevelDiagram>(f: &L) -> PreMorphism<L::Map> {
    let n = f.shape().len();
    PreMorphism {
        alpha: (0..n).collect(),
        components: (0..n).map(|x| f.structure_map(x, x)).collect(),
    }
}

/// Validity: `α` strictly increasing, components of the right shape and
/// natural in `b`.
pub fn check_pre_morphism<L: LevelDiagram>(f: &L, g: &L, p: &PreMorphism<L::Map>) -> Result<()> {
    let (a, b) = (f.shape(), g.shape());
    if p.alpha.len() != b.len() || p.components.len() != b.len() {
        return Err(Error::InvalidPreMorphism("index map has the wrong size".into()));
    }
    if let Some(&bad) = p.alpha.iter().find(|&&x| x >= a.len()) {
        return Err(Error::InvalidPreMorphism(format!("index #{bad} outside the source shape")));
    }
    for (s, t) in b.strict_pairs() {
        if !a.lt(p.alpha[s], p.alpha[t]) {
            return Err(Error::InvalidPreMorphism(format!(
                "index map is not strictly increasing at `{}` < `{}`",
                b.name(s),
                b.name(t)
            )));
        }
    }
    for y in 0..b.len() {
        f.check_fit(p.alpha[y], g, y, &p.components[y])?;
    }
    for (s, t) in b.strict_pairs() {
        let left = L::compose_maps(&g.structure_map(t, s), &p.components[t])?;
        let right = L::compose_maps(&p.components[s], &f.structure_map(p.alpha[t], p.alpha[s]))?;
        if left != right {
            return Err(Error::InvalidPreMorphism(format!(
                "components are not natural at `{}` < `{}`",
                b.name(s),
                b.name(t)
            )));
        }
    }
    Ok(())
}

pub fn is_pre_morphism<L: LevelDiagram>(f: &L, g: &L, p: &PreMorphism<L::Map>) -> bool {
    check_pre_morphism(f, g, p).is_ok()
}

/// `p ≤ q`: `α_q ≥ α_p` pointwise and `φ_{p,b} ∘ F(α_q b → α_p b) = φ_{q,b}`.
pub fn pm_leq<L: LevelDiagram>(f: &L, p: &PreMorphism<L::Map>, q: &PreMorphism<L::Map>) -> bool {
    let a = f.shape();
    p.alpha.len() == q.alpha.len()
        && (0..p.alpha.len()).all(|b| {
            a.le(p.alpha[b], q.alpha[b])
                && L::compose_maps(&p.components[b], &f.structure_map(q.alpha[b], p.alpha[b]))
                    .is_ok_and(|m| m == q.components[b])
        })
}

/// `q ∘ p = (α_p ∘ β_q, ψ ∘ φ_β)` for `p: F → G`, `q: G → H`.
pub fn pm_compose<M, L>(q: &PreMorphism<M>, p: &PreMorphism<M>) -> Result<PreMorphism<M>>
where
    L: LevelDiagram<Map = M>,
{
    let mut alpha = Vec::with_capacity(q.alpha.len());
    let mut components = Vec::with_capacity(q.alpha.len());
    for (c, &b) in q.alpha.iter().enumerate() {
        if b >= p.alpha.len() {
            return Err(Error::Mismatch("pre-morphisms are not composable".into()));
        }
        alpha.push(p.alpha[b]);
        components.push(L::compose_maps(&q.components[c], &p.components[b])?);
    }
    Ok(PreMorphism { alpha, components })
}

/// Searches, in canonical order, for `a ≥ a1, a2` with
/// `u ∘ F(a → a1) = v ∘ F(a → a2)`. `None` means no witness inside the
/// truncation.
pub fn eq_in_colim<L: LevelDiagram>(f: &L, a1: usize, u: &L::Map, a2: usize, v: &L::Map) -> Result<Option<usize>> {
    let shape = f.shape();
    for &a in shape.by_degree() {
        if shape.le(a1, a) && shape.le(a2, a) {
            let left = L::compose_maps(u, &f.structure_map(a, a1))?;
            let right = L::compose_maps(v, &f.structure_map(a, a2))?;
            if left == right {
                return Ok(Some(a));
            }
        }
    }
    Ok(None)
}

/// Checks that for `b' ≤ b` the two induced representatives at `b'` are
/// colim-equal.
pub fn check_raw<L: LevelDiagram>(f: &L, g: &L, raw: &RawMorphism<L::Map>) -> Result<()> {
    let b = g.shape();
    if raw.rep.len() != b.len() {
        return Err(Error::InvalidPreMorphism("raw morphism has the wrong size".into()));
    }
    for (y, (r, m)) in raw.rep.iter().enumerate() {
        if *r >= f.shape().len() {
            return Err(Error::InvalidPreMorphism(format!("index #{r} outside the source shape")));
        }
        f.check_fit(*r, g, y, m)?;
    }
    for (s, t) in b.strict_pairs() {
        let pushed = L::compose_maps(&g.structure_map(t, s), &raw.rep[t].1)?;
        if eq_in_colim(f, raw.rep[t].0, &pushed, raw.rep[s].0, &raw.rep[s].1)?.is_none() {
            return Err(Error::NotColimEqual(b.name(s).to_string()));
        }
    }
    Ok(())
}

/// Finds a strictly increasing `α` with `α(b) ∈ candidates[b]`, trying
/// candidates in the given order and backtracking. Returns `None` when no
/// such assignment exists.
fn strict_assignment(
    a: &FinPoset,
    b: &FinPoset,
    candidates: &[Vec<usize>],
    cap: usize,
) -> Result<Option<Vec<usize>>> {
    let order = b.by_degree();
    let preds: Vec<Vec<usize>> = (0..b.len()).map(|y| b.strict_downset(y).members().to_vec()).collect();
    let mut alpha = vec![usize::MAX; b.len()];
    let mut nodes = 0usize;

    fn go(
        i: usize,
        order: &[usize],
        a: &FinPoset,
        preds: &[Vec<usize>],
        candidates: &[Vec<usize>],
        alpha: &mut Vec<usize>,
        nodes: &mut usize,
        cap: usize,
    ) -> Result<bool> {
        if i == order.len() {
            return Ok(true);
        }
        let y = order[i];
        for &c in &candidates[y] {
            *nodes += 1;
            if *nodes > cap {
                return Err(Error::SearchExhausted(format!("strict index search exceeded {cap} nodes")));
            }
            if preds[y].iter().all(|&s| a.lt(alpha[s], c)) {
                alpha[y] = c;
                if go(i + 1, order, a, preds, candidates, alpha, nodes, cap)? {
                    return Ok(true);
                }
            }
        }
        alpha[y] = usize::MAX;
        Ok(false)
    }

    if go(0, order, a, &preds, candidates, &mut alpha, &mut nodes, cap)? {
        Ok(Some(alpha))
    } else {
        Ok(None)
    }
}

/// Replaces raw representatives by a pre-morphism inducing the same
/// representatives up to colim-equality.
///
/// `α(b)` is the first element `c` in canonical order with `c ≥ r(b)`,
/// `c > α(b')` for `b' < b`, and `G(b→b')∘raw_b∘F(c→r b) = raw_{b'}∘F(c→r b')`
/// for all `b' < b`; then `φ_b = raw_b∘F(c→r b)`. If the greedy choice
/// leaves no room further up, other admissible choices are tried.
pub fn straighten<L: LevelDiagram>(f: &L, g: &L, raw: &RawMorphism<L::Map>) -> Result<PreMorphism<L::Map>> {
    straighten_with_cap(f, g, raw, DEFAULT_SEARCH_CAP)
}

pub fn straighten_with_cap<L: LevelDiagram>(
    f: &L,
    g: &L,
    raw: &RawMorphism<L::Map>,
    cap: usize,
) -> Result<PreMorphism<L::Map>> {
    check_raw(f, g, raw)?;
    let (a, b) = (f.shape(), g.shape());
    let mut candidates = Vec::with_capacity(b.len());
    for y in 0..b.len() {
        let (r, ref m) = raw.rep[y];
        let preds = b.strict_downset(y);
        let pushed: Vec<(usize, L::Map)> = preds
            .members()
            .iter()
            .map(|&s| Ok((s, L::compose_maps(&g.structure_map(y, s), m)?)))
            .collect::<Result<_>>()?;
        let mut ok = Vec::new();
        for &c in a.by_degree() {
            if !a.le(r, c) {
                continue;
            }
            let mut good = true;
            for (s, pm) in &pushed {
                let (rs, ref ms) = raw.rep[*s];
                if !a.le(rs, c)
                    || L::compose_maps(pm, &f.structure_map(c, r))? != L::compose_maps(ms, &f.structure_map(c, rs))?
                {
                    good = false;
                    break;
                }
            }
            if good {
                ok.push(c);
            }
        }
        if ok.is_empty() {
            return Err(Error::TruncationExhausted(format!(
                "no equalizing bound for `{}` inside the truncation",
                b.name(y)
            )));
        }
        candidates.push(ok);
    }
    let alpha = strict_assignment(a, b, &candidates, cap)?.ok_or_else(|| {
        Error::TruncationExhausted("no strictly increasing choice of indices inside the truncation".into())
    })?;
    let components = (0..b.len())
        .map(|y| {
            let (r, ref m) = raw.rep[y];
            L::compose_maps(m, &f.structure_map(alpha[y], r))
        })
        .collect::<Result<_>>()?;
    Ok(PreMorphism { alpha, components })
}

/// A common upper bound of two pre-morphisms presenting the same
/// pro-morphism.
///
/// `α(b)` is the first `c` in canonical order with `c ≥ α_p(b), α_q(b)`,
/// `c > α(b')` for `b' < b`, and `φ_{p,b}∘F(c→α_p b) = φ_{q,b}∘F(c→α_q b)`;
/// then `φ_b = φ_{p,b}∘F(c→α_p b)`. For `p = q` this returns `p`.
pub fn dominate<L: LevelDiagram>(
    f: &L,
    g: &L,
    p: &PreMorphism<L::Map>,
    q: &PreMorphism<L::Map>,
) -> Result<PreMorphism<L::Map>> {
    dominate_with_cap(f, g, p, q, DEFAULT_SEARCH_CAP)
}

pub fn dominate_with_cap<L: LevelDiagram>(
    f: &L,
    g: &L,
    p: &PreMorphism<L::Map>,
    q: &PreMorphism<L::Map>,
    cap: usize,
) -> Result<PreMorphism<L::Map>> {
    check_pre_morphism(f, g, p)?;
    check_pre_morphism(f, g, q)?;
    let (a, b) = (f.shape(), g.shape());
    for y in 0..b.len() {
        if eq_in_colim(f, p.alpha[y], &p.components[y], q.alpha[y], &q.components[y])?.is_none() {
            return Err(Error::NotColimEqual(b.name(y).to_string()));
        }
    }
    let candidates = equalizing_bounds(f, p, q)?;
    let alpha = strict_assignment(a, b, &candidates, cap)?.ok_or_else(|| {
        Error::TruncationExhausted("no strictly increasing common bound inside the truncation".into())
    })?;
    let components = (0..b.len())
        .map(|y| L::compose_maps(&p.components[y], &f.structure_map(alpha[y], p.alpha[y])))
        .collect::<Result<_>>()?;
    Ok(PreMorphism { alpha, components })
}

/// Per `b`, all `c ≥ α_p(b), α_q(b)` equalizing the two components, in
/// canonical order.
pub fn equalizing_bounds<L: LevelDiagram>(
    f: &L,
    p: &PreMorphism<L::Map>,
    q: &PreMorphism<L::Map>,
) -> Result<Vec<Vec<usize>>> {
    let a = f.shape();
    let mut out = Vec::with_capacity(p.alpha.len());
    for y in 0..p.alpha.len() {
        let (ap, aq) = (p.alpha[y], q.alpha[y]);
        let mut ok = Vec::new();
        for &c in a.by_degree() {
            if a.le(ap, c)
                && a.le(aq, c)
                && L::compose_maps(&p.components[y], &f.structure_map(c, ap))?
                    == L::compose_maps(&q.components[y], &f.structure_map(c, aq))?
            {
                ok.push(c);
            }
        }
        out.push(ok);
    }
    Ok(out)
}

/// True iff [`dominate`] succeeds on every pair of the sample and its output
/// bounds both members.
pub fn connected_component_directed_check<L: LevelDiagram>(
    f: &L,
    g: &L,
    sample: &[PreMorphism<L::Map>],
) -> bool {
    sample.iter().enumerate().all(|(i, p)| {
        sample[i..].iter().all(|q| match dominate(f, g, p, q) {
            Ok(r) => pm_leq(f, p, &r) && pm_leq(f, q, &r),
            Err(_) => false,
        })
    })
}

/// A pro-object at finite truncation: a diagram over a directed poset whose
/// degrees stay below `height_cap`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProObject {
    diagram: Diagram,
    height_cap: usize,
}

impl ProObject {
    pub fn new(diagram: Diagram, height_cap: usize) -> Result<Self> {
        let shape = DiagramView::shape(&diagram);
        if !shape.is_directed() {
            return Err(Error::Precondition("index poset is not directed".into()));
        }
        if let Some(d) = shape.max_degree() {
            if d >= height_cap {
                return Err(Error::Precondition(format!(
                    "degree {d} reaches the truncation level {height_cap}"
                )));
            }
        }
        Ok(ProObject { diagram, height_cap })
    }

    pub fn diagram(&self) -> &Diagram {
        &self.diagram
    }

    pub fn height_cap(&self) -> usize {
        self.height_cap
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseObject;
    use std::sync::Arc;

    fn obj(ids: &[&str]) -> BaseObject {
        BaseObject::new(ids.iter().copied()).unwrap()
    }

    fn map(src: &BaseObject, tgt: &BaseObject, pairs: &[(&str, &str)]) -> BaseMorphism {
        BaseMorphism::from_pairs(src.clone(), tgt.clone(), pairs).unwrap()
    }

    fn chain(n: usize) -> Arc<FinPoset> {
        let names: Vec<String> = (0..n).map(|i| i.to_string()).collect();
        Arc::new(FinPoset::chain(&names).unwrap())
    }

    /// Over a chain: `F(i) = {x,y}` with `F(i+1 → i)` collapsing onto `x`
    /// from level 1 on.
    fn collapsing_chain(n: usize) -> Diagram {
        let c = chain(n);
        let xy = obj(&["x", "y"]);
        let col = map(&xy, &xy, &[("x", "x"), ("y", "x")]);
        let maps = (1..n).map(|i| (i, i - 1, if i >= 2 { col.clone() } else { BaseMorphism::identity(&xy) })).collect();
        Diagram::new(c, vec![xy; n], maps).unwrap()
    }

    #[test]
    fn eq_in_colim_examples() {
        let d = collapsing_chain(4);
        let xy = d.object(0).clone();
        let id = BaseMorphism::identity(&xy);
        assert_eq!(eq_in_colim(&d, 1, &id, 1, &id).unwrap(), Some(1));
        let swap = map(&xy, &xy, &[("x", "y"), ("y", "x")]);
        let cx = map(&xy, &xy, &[("x", "x"), ("y", "x")]);
        // id and const-x agree after the collapse at 2
        assert_eq!(eq_in_colim(&d, 1, &id, 1, &cx).unwrap(), Some(2));
        assert_eq!(eq_in_colim(&d, 1, &id, 1, &swap).unwrap(), None);

        let v = Arc::new(FinPoset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap());
        let dv = Diagram::constant(v, xy.clone());
        assert_eq!(eq_in_colim(&dv, 0, &id, 1, &id).unwrap(), Some(2));
        let anti = Arc::new(FinPoset::antichain(&["a", "b"]).unwrap());
        let da = Diagram::constant(anti, xy);
        assert_eq!(eq_in_colim(&da, 0, &id, 1, &id).unwrap(), None);
    }

    #[test]
    fn order_and_strictness() {
        let d = collapsing_chain(4);
        let e = Diagram::constant(chain(2), d.object(0).clone());
        let id = BaseMorphism::identity(d.object(0));
        let p = PreMorphism {
            alpha: vec![0, 1],
            components: vec![id.clone(), id.clone()],
        };
        // F(1→0) is the identity, so this is natural
        assert!(is_pre_morphism(&d, &e, &p));
        assert!(pm_leq(&d, &p, &p));
        let flat = PreMorphism {
            alpha: vec![1, 1],
            components: vec![id.clone(), id.clone()],
        };
        assert!(matches!(check_pre_morphism(&d, &e, &flat), Err(Error::InvalidPreMorphism(_))));
    }

    #[test]
    fn composition_with_identity() {
        let d = collapsing_chain(4);
        let e = Diagram::constant(chain(2), d.object(0).clone());
        let id = BaseMorphism::identity(d.object(0));
        let p = PreMorphism {
            alpha: vec![2, 3],
            components: vec![id.clone(), d.arrow(3, 2).clone()],
        };
        assert!(is_pre_morphism(&d, &e, &p));
        let left = pm_compose::<_, Diagram>(&identity_pm(&e), &p).unwrap();
        let right = pm_compose::<_, Diagram>(&p, &identity_pm(&d)).unwrap();
        assert_eq!(left, p);
        assert_eq!(right, p);
    }

    #[test]
    fn dominate_examples() {
        let d = collapsing_chain(5);
        let e = Diagram::constant(chain(2), d.object(0).clone());
        let xy = d.object(0).clone();
        let id = BaseMorphism::identity(&xy);
        let cx = map(&xy, &xy, &[("x", "x"), ("y", "x")]);
        let p = PreMorphism {
            alpha: vec![2, 3],
            components: vec![cx.clone(), cx.clone()],
        };
        assert_eq!(dominate(&d, &e, &p, &p).unwrap(), p);
        let q = PreMorphism {
            alpha: vec![3, 4],
            components: vec![cx.clone(), cx.clone()],
        };
        let r = dominate(&d, &e, &p, &q).unwrap();
        assert!(pm_leq(&d, &p, &r) && pm_leq(&d, &q, &r));
        assert_eq!(r.alpha, vec![3, 4]);

        let swap = map(&xy, &xy, &[("x", "y"), ("y", "x")]);
        let ce = Diagram::constant(chain(2), xy.clone());
        let cd = Diagram::constant(chain(4), xy.clone());
        let s1 = PreMorphism {
            alpha: vec![0, 1],
            components: vec![id.clone(), id.clone()],
        };
        let s2 = PreMorphism {
            alpha: vec![0, 1],
            components: vec![swap.clone(), swap],
        };
        assert!(matches!(dominate(&cd, &ce, &s1, &s2), Err(Error::NotColimEqual(_))));
        assert!(connected_component_directed_check(&d, &e, &[p.clone(), q]));
        assert!(connected_component_directed_check(&d, &e, &[p]));
    }

    #[test]
    fn dominate_reports_truncation() {
        // the bound for b=1 would have to sit strictly above the top
        let d = collapsing_chain(3);
        let e = Diagram::constant(chain(2), d.object(0).clone());
        let xy = d.object(0).clone();
        let id = BaseMorphism::identity(&xy);
        let cx = map(&xy, &xy, &[("x", "x"), ("y", "x")]);
        let p = PreMorphism {
            alpha: vec![0, 1],
            components: vec![cx.clone(), cx.clone()],
        };
        let q = PreMorphism {
            alpha: vec![0, 2],
            components: vec![id.clone(), cx.clone()],
        };
        assert!(is_pre_morphism(&d, &e, &p));
        assert!(is_pre_morphism(&d, &e, &q));
        // at b=0 the maps only agree from 2 on, leaving nothing above for b=1
        assert!(matches!(dominate(&d, &e, &p, &q), Err(Error::TruncationExhausted(_))));
    }

    #[test]
    fn straighten_constant_index() {
        let d = collapsing_chain(5);
        let e = Diagram::constant(chain(3), d.object(0).clone());
        let xy = d.object(0).clone();
        let cx = map(&xy, &xy, &[("x", "x"), ("y", "x")]);
        let raw = RawMorphism {
            rep: vec![(0, cx.clone()), (0, cx.clone()), (0, cx.clone())],
        };
        let p = straighten(&d, &e, &raw).unwrap();
        assert!(is_pre_morphism(&d, &e, &p));
        assert_eq!(p.alpha, vec![0, 1, 2]);
        for y in 0..3 {
            assert!(eq_in_colim(&d, p.alpha[y], &p.components[y], raw.rep[y].0, &raw.rep[y].1)
                .unwrap()
                .is_some());
        }
    }

    #[test]
    fn straighten_needs_correction() {
        // representatives at b=1 and b=0 agree only after the collapse at 2
        let d = collapsing_chain(5);
        let e = Diagram::constant(chain(2), d.object(0).clone());
        let xy = d.object(0).clone();
        let id = BaseMorphism::identity(&xy);
        let cx = map(&xy, &xy, &[("x", "x"), ("y", "x")]);
        let raw = RawMorphism {
            rep: vec![(0, cx.clone()), (1, id.clone())],
        };
        let p = straighten(&d, &e, &raw).unwrap();
        assert!(is_pre_morphism(&d, &e, &p));
        assert_eq!(p.alpha, vec![0, 2]);
        assert_eq!(eq_in_colim(&d, p.alpha[1], &p.components[1], 1, &id).unwrap(), Some(2));
    }
}
