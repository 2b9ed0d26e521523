//! Reedy factorization of a map of diagrams into a levelwise injection
//! followed by a special surjection, and its functorial extension to
//! pre-morphisms of arrows.
//!
//! For `f: C → D` over `A`, the factorization `C --g--> H --h--> D` is built
//! one element at a time in degree order. At `x`, with `H` known on
//! `{s < x}`, let `P(x) = D(x) ×_{lim_{s<x} D} lim_{s<x} H` and factor the
//! gap map `C(x) → P(x)` in the base category: its middle object is `H(x)`.

use serde::Serialize;

use crate::base::{compose, factorize_base, BaseMorphism, DiagramView, MapClass, MatchingPullback};
use crate::diagram::{Diagram, NatTrans, PartialDiagram};
use crate::error::{Error, Result};
use crate::procalc::{check_pre_morphism, ArrowMap, PreMorphism};

/// A factorization defined on a Reysha of the shape, grown by
/// [`extend_step`](PartialFactorization::extend_step).
#[derive(Clone, Debug)]
pub struct PartialFactorization {
    f: NatTrans,
    mid: PartialDiagram,
    g: Vec<Option<BaseMorphism>>,
    h: Vec<Option<BaseMorphism>>,
    gaps: Vec<Option<BaseMorphism>>,
    matching: Vec<Option<MatchingPullback>>,
}

impl PartialFactorization {
    pub fn new(f: NatTrans) -> Self {
        let n = f.shape().len();
        PartialFactorization {
            mid: PartialDiagram::new(f.source().shape_arc().clone()),
            f,
            g: vec![None; n],
            h: vec![None; n],
            gaps: vec![None; n],
            matching: vec![None; n],
        }
    }

    /// Elements the factorization is defined on, in index order.
    pub fn domain(&self) -> Vec<usize> {
        (0..self.g.len()).filter(|&x| self.g[x].is_some()).collect()
    }

    /// Extends to `x`. Every `s < x` must already be present and `x` must
    /// not be.
    pub fn extend_step(&mut self, x: usize) -> Result<()> {
        let shape = self.f.shape();
        if x >= shape.len() {
            return Err(Error::Precondition(format!("element #{x} outside the shape")));
        }
        if self.mid.has(x) {
            return Err(Error::Precondition(format!("`{}` is already factored", shape.name(x))));
        }
        let down = shape.strict_downset(x);
        if let Some(&s) = down.members().iter().find(|&&s| !self.mid.has(s)) {
            return Err(Error::Precondition(format!(
                "`{}` lies below `{}` but is not factored yet",
                shape.name(s),
                shape.name(x)
            )));
        }
        let d = self.f.target();
        let p = crate::base::matching_pullback(&self.mid, d, |s| self.h[s].clone().expect("factored"), x);
        // c ↦ (f_x c, (g_s C(x→s) c)_s)
        let c = self.f.source();
        let g_s: Vec<&BaseMorphism> = p.members().iter().map(|&s| self.g[s].as_ref().unwrap()).collect();
        let mut fam = vec![0; p.members().len()];
        let gap_map: Vec<usize> = (0..c.object(x).len())
            .map(|ci| {
                for (pos, &s) in p.members().iter().enumerate() {
                    fam[pos] = g_s[pos].apply(c.arrow(x, s).apply(ci));
                }
                p.locate(self.f.component(x).apply(ci), &fam)
                    .ok_or_else(|| Error::Internal("gap map leaves the matching pullback".into()))
            })
            .collect::<Result<_>>()?;
        let gap = BaseMorphism::new_unchecked(c.object(x).clone(), p.apex().clone(), gap_map);
        let triple = factorize_base(&gap);
        let down_maps = p
            .members()
            .iter()
            .enumerate()
            .map(|(pos, &s)| Ok((s, compose(p.projection(pos), &triple.right)?)))
            .collect::<Result<Vec<_>>>()?;
        self.h[x] = Some(compose(p.to_target(), &triple.right)?);
        self.g[x] = Some(triple.left);
        self.mid.graft(x, triple.mid, down_maps);
        self.gaps[x] = Some(gap);
        self.matching[x] = Some(p);
        Ok(())
    }

    pub fn finish(self) -> Result<ReedyFactorization> {
        if self.g.iter().any(Option::is_none) {
            return Err(Error::Precondition("factorization is not defined everywhere".into()));
        }
        let mid = self.mid.finish()?;
        let g = NatTrans::new(self.f.source().clone(), mid.clone(), self.g.into_iter().map(Option::unwrap).collect())?;
        let h = NatTrans::new(mid.clone(), self.f.target().clone(), self.h.into_iter().map(Option::unwrap).collect())?;
        let mut out = ReedyFactorization {
            input: self.f,
            mid,
            g,
            h,
            gaps: self.gaps.into_iter().map(Option::unwrap).collect(),
            matching: self.matching.into_iter().map(Option::unwrap).collect(),
            report: ReedyReport::default(),
        };
        out.report = out.verify();
        Ok(out)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ReedyReport {
    /// `h ∘ g = f` componentwise
    pub composite: bool,
    pub g_levelwise_n: bool,
    pub h_special_m: bool,
}

impl ReedyReport {
    pub fn passed(&self) -> bool {
        self.composite && self.g_levelwise_n && self.h_special_m
    }
}

#[derive(Clone, Debug)]
pub struct ReedyFactorization {
    pub input: NatTrans,
    pub mid: Diagram,
    pub g: NatTrans,
    pub h: NatTrans,
    /// `C(x) → P(x)` per element
    pub gaps: Vec<BaseMorphism>,
    /// `P(x)` per element
    pub matching: Vec<MatchingPullback>,
    pub report: ReedyReport,
}

impl ReedyFactorization {
    /// Re-checks the three invariants from scratch.
    pub fn verify(&self) -> ReedyReport {
        let composite = self
            .g
            .then(&self.h)
            .is_ok_and(|c| c.components() == self.input.components());
        ReedyReport {
            composite,
            g_levelwise_n: self.g.is_levelwise(MapClass::N),
            h_special_m: self.h.is_special(MapClass::M),
        }
    }
}

/// Factors `f` over its whole shape, in degree order with ties broken by
/// element index.
pub fn reedy(f: &NatTrans) -> Result<ReedyFactorization> {
    let mut partial = PartialFactorization::new(f.clone());
    for &x in f.shape().by_degree() {
        partial.extend_step(x)?;
    }
    partial.finish()
}

/// The middle maps `χ_b: H_f(α b) → H_t(b)` induced by a pre-morphism of
/// arrows.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChiMap {
    pub alpha: Vec<usize>,
    pub chi: Vec<BaseMorphism>,
}

impl ChiMap {
    pub fn as_pre_morphism(&self) -> PreMorphism<BaseMorphism> {
        PreMorphism {
            alpha: self.alpha.clone(),
            components: self.chi.clone(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ChiReport {
    /// `H_t(b→b') ∘ χ_b = χ_{b'} ∘ H_f(α b → α b')`
    pub natural: bool,
    /// `g_t ∘ φ = χ ∘ (g_f)_α`
    pub left_square: bool,
    /// `h_t ∘ χ = ψ ∘ (h_f)_α`
    pub right_square: bool,
}

impl ChiReport {
    pub fn passed(&self) -> bool {
        self.natural && self.left_square && self.right_square
    }
}

/// Builds `χ` by recursion on the degree of `b`: `χ_b` is the functorial
/// middle map of the square from the gap map of `f` at `α b` to the gap map
/// of `t` at `b`, whose top side is `φ_b` and whose bottom side sends
/// `(y, λ)` to `(ψ_b y, (χ_{b'} λ_{α b'})_{b'<b})`.
pub fn chi_construct(
    rf: &ReedyFactorization,
    rt: &ReedyFactorization,
    pm: &PreMorphism<ArrowMap>,
) -> Result<ChiMap> {
    check_pre_morphism(&rf.input, &rt.input, pm)?;
    let b_shape = rt.input.shape();
    let mut chi: Vec<Option<BaseMorphism>> = vec![None; b_shape.len()];
    for &b in b_shape.by_degree() {
        let a = pm.alpha[b];
        let (pf, pt) = (&rf.matching[a], &rt.matching[b]);
        let psi = &pm.components[b].bottom;
        let phi = &pm.components[b].top;
        let lower: Vec<(usize, &BaseMorphism)> = pt
            .members()
            .iter()
            .map(|&b2| {
                let pos = pf
                    .position_of(pm.alpha[b2])
                    .ok_or_else(|| Error::Internal("index map is not strict".into()))?;
                Ok((pos, chi[b2].as_ref().expect("lower degree first")))
            })
            .collect::<Result<_>>()?;
        let mut fam = vec![0; lower.len()];
        let v_map: Vec<usize> = (0..pf.apex().len())
            .map(|i| {
                let (y, lambda) = pf.point(i);
                for (k, (pos, c)) in lower.iter().enumerate() {
                    fam[k] = c.apply(lambda[*pos]);
                }
                pt.locate(psi.apply(y), &fam)
                    .ok_or_else(|| Error::Internal("induced map leaves the matching pullback".into()))
            })
            .collect::<Result<_>>()?;
        let v = BaseMorphism::new_unchecked(pf.apex().clone(), pt.apex().clone(), v_map);
        if compose(&v, &rf.gaps[a])? != compose(&rt.gaps[b], phi)? {
            return Err(Error::Internal(format!(
                "gap square at `{}` does not commute",
                b_shape.name(b)
            )));
        }
        // the functorial middle map on C ⊔ P
        let offset = phi.target().len();
        let mut map: Vec<usize> = phi.assignment().to_vec();
        map.extend(v.assignment().iter().map(|&j| offset + j));
        chi[b] = Some(BaseMorphism::new(rf.mid.object(a).clone(), rt.mid.object(b).clone(), map)?);
    }
    Ok(ChiMap {
        alpha: pm.alpha.clone(),
        chi: chi.into_iter().map(Option::unwrap).collect(),
    })
}

pub fn verify_chi(
    rf: &ReedyFactorization,
    rt: &ReedyFactorization,
    pm: &PreMorphism<ArrowMap>,
    chi: &ChiMap,
) -> ChiReport {
    let shape = rt.input.shape();
    let eq = |l: Result<BaseMorphism>, r: Result<BaseMorphism>| matches!((l, r), (Ok(l), Ok(r)) if l == r);
    let natural = shape.strict_pairs().all(|(s, t)| {
        eq(
            compose(rt.mid.arrow(t, s), &chi.chi[t]),
            compose(&chi.chi[s], rf.mid.arrow(chi.alpha[t], chi.alpha[s])),
        )
    });
    let left_square = (0..shape.len()).all(|b| {
        eq(
            compose(rt.g.component(b), &pm.components[b].top),
            compose(&chi.chi[b], rf.g.component(chi.alpha[b])),
        )
    });
    let right_square = (0..shape.len()).all(|b| {
        eq(
            compose(rt.h.component(b), &chi.chi[b]),
            compose(&pm.components[b].bottom, rf.h.component(chi.alpha[b])),
        )
    });
    ChiReport {
        natural,
        left_square,
        right_square,
    }
}

/// Reedy factorizations of both arrows and the middle map between them.
#[derive(Clone, Debug)]
pub struct ProFactorization {
    pub source: ReedyFactorization,
    pub target: ReedyFactorization,
    pub chi: ChiMap,
    pub report: ChiReport,
}

pub fn functorial_factorization_pro(
    f: &NatTrans,
    t: &NatTrans,
    pm: &PreMorphism<ArrowMap>,
) -> Result<ProFactorization> {
    let source = reedy(f)?;
    let target = reedy(t)?;
    let chi = chi_construct(&source, &target, pm)?;
    let report = verify_chi(&source, &target, pm, &chi);
    Ok(ProFactorization {
        source,
        target,
        chi,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::BaseObject;
    use crate::order::FinPoset;
    use crate::procalc::{identity_pm, pm_compose, pm_leq};
    use std::sync::Arc;

    fn obj(ids: &[&str]) -> BaseObject {
        BaseObject::new(ids.iter().copied()).unwrap()
    }

    fn map(src: &BaseObject, tgt: &BaseObject, pairs: &[(&str, &str)]) -> BaseMorphism {
        BaseMorphism::from_pairs(src.clone(), tgt.clone(), pairs).unwrap()
    }

    fn wedge() -> Arc<FinPoset> {
        Arc::new(FinPoset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap())
    }

    #[test]
    fn one_point_is_base_factorization() {
        let p = Arc::new(FinPoset::antichain(&["o"]).unwrap());
        let x = obj(&["1", "2"]);
        let y = obj(&["1"]);
        let f0 = map(&x, &y, &[("1", "1"), ("2", "1")]);
        let f = NatTrans::new(Diagram::constant(p.clone(), x), Diagram::constant(p, y), vec![f0.clone()]).unwrap();
        let r = reedy(&f).unwrap();
        assert!(r.report.passed());
        let base = factorize_base(&f0);
        // same shape of middle object, up to the matching-pullback naming
        assert_eq!(r.mid.object(0).len(), base.mid.len());
        assert_eq!(r.g.component(0).assignment(), base.left.assignment());
        assert_eq!(r.h.component(0).assignment(), base.right.assignment());
    }

    #[test]
    fn identity_over_wedge() {
        let v = wedge();
        let top = obj(&["0", "1"]);
        let bot = obj(&["0"]);
        let collapse = map(&top, &bot, &[("0", "0"), ("1", "0")]);
        let d = Diagram::new(v, vec![bot.clone(), bot, top], vec![(2, 0, collapse.clone()), (2, 1, collapse)]).unwrap();
        let r = reedy(&NatTrans::identity(&d)).unwrap();
        assert!(r.report.passed());
        assert_eq!(r.verify(), r.report);
    }

    #[test]
    fn two_chain_top_step_cardinality() {
        let c = Arc::new(FinPoset::chain(&["0", "1"]).unwrap());
        let x = obj(&["p", "q"]);
        let y = obj(&["r"]);
        let col = map(&x, &y, &[("p", "r"), ("q", "r")]);
        let f = NatTrans::new(Diagram::constant(c.clone(), x), Diagram::constant(c, y), vec![col.clone(), col]).unwrap();
        let mut pf = PartialFactorization::new(f);
        pf.extend_step(0).unwrap();
        assert!(matches!(pf.extend_step(0), Err(Error::Precondition(_))));
        pf.extend_step(1).unwrap();
        // H(0) = {p,q} ⊔ {r}; P(1) = {r} ×_{r} H(0) has 3 points; H(1) = 2 + 3
        assert_eq!(pf.mid.object(0).len(), 3);
        assert_eq!(pf.matching[1].as_ref().unwrap().apex().len(), 3);
        assert_eq!(pf.mid.object(1).len(), 5);
        assert!(pf.finish().unwrap().report.passed());
    }

    #[test]
    fn extend_requires_lower_elements() {
        let c = Arc::new(FinPoset::chain(&["0", "1"]).unwrap());
        let x = obj(&["p"]);
        let f = NatTrans::identity(&Diagram::constant(c, x));
        let mut pf = PartialFactorization::new(f);
        assert!(matches!(pf.extend_step(1), Err(Error::Precondition(_))));
    }

    #[test]
    fn chi_identity_and_composition() {
        let v = wedge();
        let x = obj(&["p", "q"]);
        let y = obj(&["r", "s"]);
        let col = map(&x, &y, &[("p", "r"), ("q", "r")]);
        let f = NatTrans::new(
            Diagram::constant(v.clone(), x.clone()),
            Diagram::constant(v.clone(), y.clone()),
            vec![col.clone(); 3],
        )
        .unwrap();
        let rf = reedy(&f).unwrap();
        let id = identity_pm(&f);
        let chi = chi_construct(&rf, &rf, &id).unwrap();
        assert_eq!(chi.as_pre_morphism(), identity_pm(&rf.mid));
        assert!(verify_chi(&rf, &rf, &id, &chi).passed());

        // swap p and q on top, fixed bottom: an automorphism of f
        let sw = map(&x, &x, &[("p", "q"), ("q", "p")]);
        let auto = PreMorphism {
            alpha: vec![0, 1, 2],
            components: vec![
                ArrowMap {
                    top: sw.clone(),
                    bottom: BaseMorphism::identity(&y)
                };
                3
            ],
        };
        let c1 = chi_construct(&rf, &rf, &auto).unwrap();
        assert!(verify_chi(&rf, &rf, &auto, &c1).passed());
        let twice = pm_compose::<_, NatTrans>(&auto, &auto).unwrap();
        let c2 = chi_construct(&rf, &rf, &twice).unwrap();
        let composed = pm_compose::<_, Diagram>(&c1.as_pre_morphism(), &c1.as_pre_morphism()).unwrap();
        assert_eq!(c2.as_pre_morphism(), composed);
        assert_eq!(c2.as_pre_morphism(), identity_pm(&rf.mid));
    }
    #[test]
    fn chi_not_monotone_on_two_chain() {
        // f over the chain 0 < 1, constant e -> p; t over a point, k -> g
        let c = Arc::new(FinPoset::chain(&["0", "1"]).unwrap());
        let (e, p) = (obj(&["e"]), obj(&["p"]));
        let fe = map(&e, &p, &[("e", "p")]);
        let f = NatTrans::new(
            Diagram::constant(c.clone(), e.clone()),
            Diagram::constant(c, p.clone()),
            vec![fe.clone(), fe],
        )
        .unwrap();
        let pt = Arc::new(FinPoset::antichain(&["b"]).unwrap());
        let (k, g) = (obj(&["k"]), obj(&["g"]));
        let t = NatTrans::new(
            Diagram::constant(pt.clone(), k.clone()),
            Diagram::constant(pt, g.clone()),
            vec![map(&k, &g, &[("k", "g")])],
        )
        .unwrap();
        let comp = ArrowMap {
            top: map(&e, &k, &[("e", "k")]),
            bottom: map(&p, &g, &[("p", "g")]),
        };
        let low = PreMorphism { alpha: vec![0], components: vec![comp.clone()] };
        let high = PreMorphism { alpha: vec![1], components: vec![comp] };
        assert!(pm_leq(&f, &low, &high));
        let (rf, rt) = (reedy(&f).unwrap(), reedy(&t).unwrap());
        let chi_low = chi_construct(&rf, &rt, &low).unwrap();
        let chi_high = chi_construct(&rf, &rt, &high).unwrap();
        assert!(verify_chi(&rf, &rt, &low, &chi_low).passed());
        assert!(verify_chi(&rf, &rt, &high, &chi_high).passed());
        // H(1) has a matching element whose family sits in the left summand
        // of H(0); the structure map sends it there, chi_high does not
        assert!(!pm_leq(&rf.mid, &chi_low.as_pre_morphism(), &chi_high.as_pre_morphism()));
    }
}
