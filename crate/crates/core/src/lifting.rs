//! Lifting problems: an exhaustive oracle in the base category, lifts of
//! injections against special surjections of diagrams, the retract
//! argument, and lifts of level representatives.

use serde::Serialize;

use crate::base::{check_square, compose, factorize_base, lift_base, BaseMorphism, DiagramView, MapClass};
use crate::diagram::NatTrans;
use crate::error::{Error, Result};

/// Cap on the number of candidate maps the exhaustive search may visit.
pub const DEFAULT_LIFT_SEARCH_CAP: u64 = 1_000_000;

/// Enumerates every map `B → X` (in lexicographic order of assignments) and
/// returns the first `h` with `h∘g = top` and `f∘h = bottom`.
pub fn has_lift_bruteforce(
    g: &BaseMorphism,
    f: &BaseMorphism,
    top: &BaseMorphism,
    bottom: &BaseMorphism,
) -> Result<Option<BaseMorphism>> {
    has_lift_bruteforce_with_cap(g, f, top, bottom, DEFAULT_LIFT_SEARCH_CAP)
}

pub fn has_lift_bruteforce_with_cap(
    g: &BaseMorphism,
    f: &BaseMorphism,
    top: &BaseMorphism,
    bottom: &BaseMorphism,
    cap: u64,
) -> Result<Option<BaseMorphism>> {
    check_square(g, f, top, bottom)?;
    let (b, x) = (g.target(), f.source());
    let space = (x.len() as u64).checked_pow(b.len() as u32);
    if space.is_none_or(|n| n > cap) {
        return Err(Error::SearchExhausted(format!(
            "{}^{} candidate maps exceed the cap of {cap}",
            x.len(),
            b.len()
        )));
    }
    if x.is_empty() {
        return Ok(b.is_empty().then(|| BaseMorphism::new_unchecked(b.clone(), x.clone(), vec![])));
    }
    let mut h = vec![0usize; b.len()];
    loop {
        let ok = (0..g.source().len()).all(|a| h[g.apply(a)] == top.apply(a))
            && (0..b.len()).all(|i| f.apply(h[i]) == bottom.apply(i));
        if ok {
            return Ok(Some(BaseMorphism::new_unchecked(b.clone(), x.clone(), h)));
        }
        // odometer, last position fastest
        let mut i = b.len();
        loop {
            if i == 0 {
                return Ok(None);
            }
            i -= 1;
            h[i] += 1;
            if h[i] < x.len() {
                break;
            }
            h[i] = 0;
        }
    }
}

/// A base map `g: A → B` against a map of diagrams `f: X → Y`, with
/// compatible cones `top_t: A → X_t` and `bottom_t: B → Y_t`.
#[derive(Clone, Debug)]
pub struct LiftingProblem {
    left: BaseMorphism,
    right: NatTrans,
    top: Vec<BaseMorphism>,
    bottom: Vec<BaseMorphism>,
}

impl LiftingProblem {
    pub fn new(left: BaseMorphism, right: NatTrans, top: Vec<BaseMorphism>, bottom: Vec<BaseMorphism>) -> Result<Self> {
        let shape = right.shape();
        let n = shape.len();
        if top.len() != n || bottom.len() != n {
            return Err(Error::Mismatch("cones have the wrong number of legs".into()));
        }
        let (x, y) = (right.source(), right.target());
        for t in 0..n {
            if top[t].source() != left.source() || top[t].target() != x.object(t) {
                return Err(Error::Mismatch(format!("top leg at `{}` has the wrong endpoints", shape.name(t))));
            }
            if bottom[t].source() != left.target() || bottom[t].target() != y.object(t) {
                return Err(Error::Mismatch(format!("bottom leg at `{}` has the wrong endpoints", shape.name(t))));
            }
            check_square(&left, right.component(t), &top[t], &bottom[t])
                .map_err(|e| Error::NonCommuting(format!("at `{}`: {e}", shape.name(t))))?;
        }
        for (s, t) in shape.strict_pairs() {
            if compose(x.arrow(t, s), &top[t])? != top[s] {
                return Err(Error::NonCommuting(format!(
                    "top cone is not compatible at `{}<={}`",
                    shape.name(s),
                    shape.name(t)
                )));
            }
            if compose(y.arrow(t, s), &bottom[t])? != bottom[s] {
                return Err(Error::NonCommuting(format!(
                    "bottom cone is not compatible at `{}<={}`",
                    shape.name(s),
                    shape.name(t)
                )));
            }
        }
        Ok(LiftingProblem {
            left,
            right,
            top,
            bottom,
        })
    }

    pub fn left(&self) -> &BaseMorphism {
        &self.left
    }

    pub fn right(&self) -> &NatTrans {
        &self.right
    }

    pub fn top(&self) -> &[BaseMorphism] {
        &self.top
    }

    pub fn bottom(&self) -> &[BaseMorphism] {
        &self.bottom
    }
}

/// Compatible lifts `L_t: B → X_t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConeLift {
    pub components: Vec<BaseMorphism>,
}

impl ConeLift {
    /// Both triangles at every element and compatibility with `X`.
    pub fn verify(&self, p: &LiftingProblem) -> Result<()> {
        let shape = p.right.shape();
        let x = p.right.source();
        for t in 0..shape.len() {
            let l = &self.components[t];
            if compose(l, &p.left)? != p.top[t] {
                return Err(Error::NonCommuting(format!("upper triangle fails at `{}`", shape.name(t))));
            }
            if compose(p.right.component(t), l)? != p.bottom[t] {
                return Err(Error::NonCommuting(format!("lower triangle fails at `{}`", shape.name(t))));
            }
        }
        for (s, t) in shape.strict_pairs() {
            if compose(x.arrow(t, s), &self.components[t])? != self.components[s] {
                return Err(Error::NonCommuting(format!(
                    "lift is not compatible at `{}<={}`",
                    shape.name(s),
                    shape.name(t)
                )));
            }
        }
        Ok(())
    }
}

/// Lifts an injection against a special surjection of diagrams, one element
/// at a time in degree order. At `t` the lifts built below `t` and
/// `bottom_t` give a map `B → Y_t ×_{lim Y} lim X`, and the base lift
/// against the relative matching map yields `L_t`.
pub fn lift_against_special(p: &LiftingProblem) -> Result<ConeLift> {
    if !p.left.is_injective() {
        return Err(Error::ClassViolation("left map is not injective".into()));
    }
    if let Some(t) = p.right.special_failure(MapClass::M) {
        return Err(Error::Precondition(format!(
            "right map is not special: relative matching map at `{}` is not surjective",
            p.right.shape().name(t)
        )));
    }
    let shape = p.right.shape();
    let b = p.left.target();
    let mut lifts: Vec<Option<BaseMorphism>> = vec![None; shape.len()];
    for &t in shape.by_degree() {
        let (pb, rel) = p.right.relative_matching_map(t);
        let lower: Vec<&BaseMorphism> = pb.members().iter().map(|&s| lifts[s].as_ref().unwrap()).collect();
        let mut fam = vec![0; lower.len()];
        let u_map: Vec<usize> = (0..b.len())
            .map(|i| {
                for (k, l) in lower.iter().enumerate() {
                    fam[k] = l.apply(i);
                }
                pb.locate(p.bottom[t].apply(i), &fam)
                    .ok_or_else(|| Error::Internal("cone leaves the matching pullback".into()))
            })
            .collect::<Result<_>>()?;
        let u = BaseMorphism::new_unchecked(b.clone(), pb.apex().clone(), u_map);
        let l = lift_base(&p.left, &rel, &p.top[t], &u).map_err(|e| Error::Internal(e.to_string()))?;
        lifts[t] = Some(l);
    }
    Ok(ConeLift {
        components: lifts.into_iter().map(Option::unwrap).collect(),
    })
}

/// Two rows `A → C → A` over `B → B → B` exhibiting `h` as a retract of
/// the right half `f` of its own factorization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RetractDiagram {
    /// `g: A → C`
    pub section: BaseMorphism,
    /// `k: C → A`, `k∘g = id`
    pub retraction: BaseMorphism,
    pub h: BaseMorphism,
    /// `f: C → B`
    pub f: BaseMorphism,
    pub id_b: BaseMorphism,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct RetractReport {
    pub top_row_identity: bool,
    pub left_square: bool,
    pub right_square: bool,
    pub f_in_m: bool,
}

impl RetractReport {
    pub fn passed(&self) -> bool {
        self.top_row_identity && self.left_square && self.right_square && self.f_in_m
    }
}

impl RetractDiagram {
    pub fn verify(&self) -> RetractReport {
        let eq = |l: Result<BaseMorphism>, r: &BaseMorphism| l.is_ok_and(|l| &l == r);
        RetractReport {
            top_row_identity: eq(
                compose(&self.retraction, &self.section),
                &BaseMorphism::identity(self.h.source()),
            ),
            left_square: compose(&self.f, &self.section).is_ok_and(|l| Ok(l) == compose(&self.id_b, &self.h)),
            right_square: compose(&self.h, &self.retraction).is_ok_and(|l| Ok(l) == compose(&self.id_b, &self.f)),
            f_in_m: self.f.is_surjective(),
        }
    }
}

/// For `h` with the right lifting property against the left half `g` of its
/// factorization `h = f∘g`, the lift `k` in the square `(g, h; id, f)`
/// exhibits `h` as a retract of `f`.
pub fn retract_exhibitor(h: &BaseMorphism) -> Result<RetractDiagram> {
    let t = factorize_base(h);
    let id_a = BaseMorphism::identity(h.source());
    let k = has_lift_bruteforce(&t.left, h, &id_a, &t.right)?.ok_or_else(|| {
        Error::Precondition("map does not lift against the left half of its factorization".into())
    })?;
    Ok(RetractDiagram {
        section: t.left,
        retraction: k,
        h: h.clone(),
        f: t.right,
        id_b: BaseMorphism::identity(h.target()),
    })
}

/// A lift of a square whose top and bottom are represented at level `t0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquareLift {
    pub t0: usize,
    /// `Y_{t0} → Z`
    pub lift: BaseMorphism,
    left: NatTrans,
}

impl SquareLift {
    /// The representative at `s ≥ t0`: `lift ∘ Y(s → t0)`.
    pub fn at(&self, s: usize) -> Result<BaseMorphism> {
        let shape = self.left.shape();
        if s >= shape.len() || !shape.le(self.t0, s) {
            return Err(Error::Precondition(format!("index #{s} does not lie above the representative")));
        }
        compose(&self.lift, self.left.target().arrow(s, self.t0))
    }
}

/// Lifts the square `p∘top = bottom∘left_{t0}` with `left` levelwise
/// injective over `T` and `right = p` a surjection.
pub fn solve_square_levelwise(
    left: &NatTrans,
    right: &BaseMorphism,
    t0: usize,
    top: &BaseMorphism,
    bottom: &BaseMorphism,
) -> Result<SquareLift> {
    if t0 >= left.shape().len() {
        return Err(Error::Precondition(format!("representative #{t0} outside the index poset")));
    }
    if !left.is_levelwise(MapClass::N) {
        return Err(Error::ClassViolation("left map is not levelwise injective".into()));
    }
    let lift = lift_base(left.component(t0), right, top, bottom)?;
    Ok(SquareLift {
        t0,
        lift,
        left: left.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseObject;
    use crate::diagram::Diagram;
    use crate::order::FinPoset;
    use std::sync::Arc;

    fn obj(ids: &[&str]) -> BaseObject {
        BaseObject::new(ids.iter().copied()).unwrap()
    }

    fn map(src: &BaseObject, tgt: &BaseObject, pairs: &[(&str, &str)]) -> BaseMorphism {
        BaseMorphism::from_pairs(src.clone(), tgt.clone(), pairs).unwrap()
    }

    #[test]
    fn bruteforce_examples() {
        let one = obj(&["1"]);
        let two = obj(&["1", "2"]);
        let pq = obj(&["p", "q"]);
        let r = obj(&["r"]);
        let g = map(&one, &two, &[("1", "1")]);
        let f = map(&pq, &r, &[("p", "r"), ("q", "r")]);
        let top = map(&one, &pq, &[("1", "p")]);
        let bottom = map(&two, &r, &[("1", "r"), ("2", "r")]);
        let h = has_lift_bruteforce(&g, &f, &top, &bottom).unwrap().unwrap();
        assert_eq!(h, lift_base(&g, &f, &top, &bottom).unwrap());

        // non-injective g against a non-surjective f
        let uv = obj(&["u", "v"]);
        let pt = obj(&["p"]);
        let rs = obj(&["r", "s"]);
        let c = map(&two, &uv, &[("1", "u"), ("2", "u")]);
        let inc = map(&pt, &rs, &[("p", "r")]);
        let top2 = map(&two, &pt, &[("1", "p"), ("2", "p")]);
        let bottom2 = map(&uv, &rs, &[("u", "r"), ("v", "s")]);
        assert_eq!(has_lift_bruteforce(&c, &inc, &top2, &bottom2).unwrap(), None);

        // f = identity: the witness is bottom
        let idpq = BaseMorphism::identity(&pq);
        let b3 = map(&two, &pq, &[("1", "p"), ("2", "q")]);
        let t3 = compose(&b3, &g).unwrap();
        assert_eq!(has_lift_bruteforce(&g, &idpq, &t3, &b3).unwrap(), Some(b3));
    }

    #[test]
    fn bruteforce_rejects_non_commuting_and_caps() {
        let two = obj(&["1", "2"]);
        let id = BaseMorphism::identity(&two);
        let sw = map(&two, &two, &[("1", "2"), ("2", "1")]);
        assert!(matches!(has_lift_bruteforce(&id, &id, &id, &sw), Err(Error::NonCommuting(_))));
        let big = BaseObject::new((0..20).map(|i| i.to_string())).unwrap();
        let idb = BaseMorphism::identity(&big);
        assert!(matches!(has_lift_bruteforce(&idb, &idb, &idb, &idb), Err(Error::SearchExhausted(_))));
    }

    #[test]
    fn special_lift_on_two_chain_identity() {
        let c = Arc::new(FinPoset::chain(&["0", "1"]).unwrap());
        let x = obj(&["p", "q"]);
        let d = Diagram::constant(c, x.clone());
        let f = NatTrans::identity(&d);
        let one = obj(&["1"]);
        let two = obj(&["1", "2"]);
        let g = map(&one, &two, &[("1", "1")]);
        let top = map(&one, &x, &[("1", "q")]);
        let bottom = map(&two, &x, &[("1", "q"), ("2", "p")]);
        let p = LiftingProblem::new(g, f, vec![top.clone(); 2], vec![bottom.clone(); 2]).unwrap();
        let l = lift_against_special(&p).unwrap();
        l.verify(&p).unwrap();
        assert_eq!(l.components, vec![bottom.clone(), bottom]);
    }

    #[test]
    fn special_lift_rejects_non_special() {
        let c = Arc::new(FinPoset::chain(&["0", "1"]).unwrap());
        let x0 = obj(&["p", "q"]);
        let y = obj(&["r"]);
        let down = map(&x0, &x0, &[("p", "p"), ("q", "p")]);
        let dx = Diagram::new(c.clone(), vec![x0.clone(), x0.clone()], vec![(1, 0, down)]).unwrap();
        let col = map(&x0, &y, &[("p", "r"), ("q", "r")]);
        let f = NatTrans::new(dx, Diagram::constant(c, y.clone()), vec![col.clone(), col]).unwrap();
        let e = BaseObject::empty();
        let one = obj(&["1"]);
        let g = BaseMorphism::new(e.clone(), one.clone(), vec![]).unwrap();
        let top = vec![BaseMorphism::new(e.clone(), x0.clone(), vec![]).unwrap(); 2];
        let bottom = vec![BaseMorphism::new(one, y, vec![0]).unwrap(); 2];
        let p = LiftingProblem::new(g, f, top, bottom).unwrap();
        assert!(matches!(lift_against_special(&p), Err(Error::Precondition(_))));
    }

    #[test]
    fn retract_examples() {
        let two = obj(&["1", "2"]);
        let one = obj(&["1"]);
        let c = map(&two, &one, &[("1", "1"), ("2", "1")]);
        let r = retract_exhibitor(&c).unwrap();
        assert!(r.verify().passed());
        let r = retract_exhibitor(&BaseMorphism::identity(&two)).unwrap();
        assert!(r.verify().passed());
        let inc = map(&one, &two, &[("1", "1")]);
        assert!(matches!(retract_exhibitor(&inc), Err(Error::Precondition(_))));
    }

    #[test]
    fn levelwise_square() {
        let c = Arc::new(FinPoset::chain(&["0", "1"]).unwrap());
        let one = obj(&["1"]);
        let two = obj(&["1", "2"]);
        let inc = map(&one, &two, &[("1", "1")]);
        let left = NatTrans::new(Diagram::constant(c.clone(), one.clone()), Diagram::constant(c, two.clone()), vec![inc.clone(); 2]).unwrap();
        let z = obj(&["p", "q"]);
        let w = obj(&["r"]);
        let p = map(&z, &w, &[("p", "r"), ("q", "r")]);
        let top = map(&one, &z, &[("1", "q")]);
        let bottom = map(&two, &w, &[("1", "r"), ("2", "r")]);
        let s = solve_square_levelwise(&left, &p, 0, &top, &bottom).unwrap();
        assert_eq!(s.lift, lift_base(&inc, &p, &top, &bottom).unwrap());
        assert_eq!(s.at(1).unwrap(), s.lift);
        assert!(s.at(0).is_ok());
        let idz = BaseMorphism::identity(&z);
        let b2 = map(&two, &z, &[("1", "q"), ("2", "p")]);
        let s2 = solve_square_levelwise(&left, &idz, 1, &top, &b2).unwrap();
        assert_eq!(s2.lift, b2);
    }
}
