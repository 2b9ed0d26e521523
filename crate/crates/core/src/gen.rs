//! Seeded random instances for the property suites.

use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::base::{compose, limit_over, matching_pullback, BaseMorphism, BaseObject, DiagramView};
use crate::diagram::{levelwise_pullback, Diagram, NatTrans, PartialDiagram};
use crate::error::Result;
use crate::factorize::reedy;
use crate::lifting::LiftingProblem;
use crate::order::FinPoset;
use crate::procalc::{ArrowMap, PreMorphism, RawMorphism};

fn atoms(prefix: &str, n: usize) -> BaseObject {
    BaseObject::from_distinct((0..n).map(|i| format!("{prefix}{i}")).collect())
}

/// A random poset on `e0, …, e{n-1}`: each pair `i < j` is related with
/// probability `p` (then closed transitively).
pub fn random_poset<R: Rng>(rng: &mut R, n: usize, p: f64) -> FinPoset {
    let names: Vec<String> = (0..n).map(|i| format!("e{i}")).collect();
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.gen_bool(p) {
                pairs.push((i, j));
            }
        }
    }
    FinPoset::from_indices(names, &pairs).expect("index order is a linear extension")
}

/// A random poset with a greatest element, hence directed.
pub fn random_directed_poset<R: Rng>(rng: &mut R, n: usize, p: f64) -> FinPoset {
    assert!(n > 0);
    let base = random_poset(rng, n - 1, p);
    let mut names = base.names().to_vec();
    names.push("top".into());
    let mut pairs: Vec<(usize, usize)> = base.strict_pairs().collect();
    pairs.extend((0..n - 1).map(|i| (i, n - 1)));
    FinPoset::from_indices(names, &pairs).expect("adding a top keeps a poset")
}

/// `D × [h]` for a random directed `D` with `width` elements: a directed
/// poset of height at least `h`. Elements are named `d#k`.
pub fn random_tall_poset<R: Rng>(rng: &mut R, width: usize, height: usize) -> FinPoset {
    let d = random_directed_poset(rng, width, 0.5);
    let idx = |x: usize, k: usize| x * (height + 1) + k;
    let mut names = Vec::new();
    for x in 0..d.len() {
        for k in 0..=height {
            names.push(format!("{}#{k}", d.name(x)));
        }
    }
    let mut pairs = Vec::new();
    for x in 0..d.len() {
        for k in 0..=height {
            if k < height {
                pairs.push((idx(x, k), idx(x, k + 1)));
            }
            for y in 0..d.len() {
                if d.lt(x, y) {
                    pairs.push((idx(x, k), idx(y, k)));
                }
            }
        }
    }
    FinPoset::from_indices(names, &pairs).expect("product of posets")
}

/// The chain coordinate of an element of [`random_tall_poset`].
pub fn tall_height(p: &FinPoset, x: usize) -> usize {
    p.name(x).rsplit('#').next().and_then(|k| k.parse().ok()).unwrap_or(0)
}

/// A random diagram: in degree order, each element of `D(x)` picks a random
/// compatible family over `{s < x}`, which fixes the maps out of `D(x)`.
pub fn random_diagram<R: Rng>(rng: &mut R, shape: Arc<FinPoset>, max_fiber: usize) -> Diagram {
    let mut d = PartialDiagram::new(shape.clone());
    for &x in shape.by_degree() {
        let down = shape.strict_downset(x);
        let lim = limit_over(&d, down.members());
        let size = if lim.apex().is_empty() { 0 } else { rng.gen_range(1..=max_fiber.max(1)) };
        let obj = atoms(&format!("{}.", shape.name(x)), size);
        let picks: Vec<usize> = (0..size).map(|_| rng.gen_range(0..lim.apex().len())).collect();
        let maps = down
            .members()
            .iter()
            .enumerate()
            .map(|(pos, &s)| {
                let proj = lim.projection(pos);
                (s, BaseMorphism::new_unchecked(obj.clone(), proj.target().clone(), picks.iter().map(|&i| proj.apply(i)).collect()))
            })
            .collect();
        d.graft(x, obj, maps);
    }
    d.finish().expect("all elements grafted")
}

/// A random natural transformation into `target`: each element of the new
/// source at `x` picks a random point of the relative matching object.
pub fn random_nat_trans_into<R: Rng>(rng: &mut R, target: &Diagram, max_fiber: usize) -> NatTrans {
    let shape = target.shape_arc().clone();
    let mut src = PartialDiagram::new(shape.clone());
    let mut comps: Vec<Option<BaseMorphism>> = vec![None; shape.len()];
    for &x in shape.by_degree() {
        let p = matching_pullback(&src, target, |s| comps[s].clone().unwrap(), x);
        let size = if p.apex().is_empty() { 0 } else { rng.gen_range(1..=max_fiber.max(1)) };
        let obj = atoms(&format!("{}.", shape.name(x)), size);
        let picks: Vec<usize> = (0..size).map(|_| rng.gen_range(0..p.apex().len())).collect();
        let pick = |m: &BaseMorphism| BaseMorphism::new_unchecked(obj.clone(), m.target().clone(), picks.iter().map(|&i| m.apply(i)).collect());
        let maps = p.members().iter().enumerate().map(|(pos, &s)| (s, pick(p.projection(pos)))).collect();
        comps[x] = Some(pick(p.to_target()));
        src.graft(x, obj, maps);
    }
    let source = src.finish().expect("all elements grafted");
    NatTrans::new(source, target.clone(), comps.into_iter().map(Option::unwrap).collect()).expect("natural by construction")
}

pub fn random_nat_trans<R: Rng>(rng: &mut R, shape: Arc<FinPoset>, max_fiber: usize) -> NatTrans {
    let target = random_diagram(rng, shape, max_fiber);
    random_nat_trans_into(rng, &target, max_fiber)
}

/// A special surjection: the right half of the Reedy factorization of a
/// random transformation.
pub fn random_special<R: Rng>(rng: &mut R, shape: Arc<FinPoset>, max_fiber: usize) -> Result<NatTrans> {
    let f = random_nat_trans(rng, shape, max_fiber);
    Ok(reedy(&f)?.h)
}

/// A random injection `A ↪ B` with `|A| ≤ max_a` and up to `extra` more
/// elements in `B`.
pub fn random_injection<R: Rng>(rng: &mut R, max_a: usize, extra: usize) -> BaseMorphism {
    let a = rng.gen_range(0..=max_a);
    let b = a + rng.gen_range(0..=extra);
    let mut slots: Vec<usize> = (0..b).collect();
    slots.shuffle(rng);
    slots.truncate(a);
    BaseMorphism::new_unchecked(atoms("a", a), atoms("b", b), slots)
}

/// A lifting problem of a random injection against `right`, with cones
/// chosen through the limits so that the square commutes.
pub fn random_lifting_problem<R: Rng>(rng: &mut R, right: &NatTrans, max_a: usize, extra: usize) -> Result<LiftingProblem> {
    let shape = right.shape();
    let all: Vec<usize> = (0..shape.len()).collect();
    let lx = limit_over(right.source(), &all);
    let ly = limit_over(right.target(), &all);
    let mut g = random_injection(rng, max_a, extra);
    if lx.apex().is_empty() && !g.source().is_empty() {
        g = BaseMorphism::new_unchecked(BaseObject::empty(), g.target().clone(), vec![]);
    }
    if ly.apex().is_empty() {
        g = BaseMorphism::new_unchecked(BaseObject::empty(), BaseObject::empty(), vec![]);
    }
    // lim h: lim X → lim Y
    let lim_h: Vec<usize> = (0..lx.apex().len())
        .map(|i| {
            let fam: Vec<usize> = (0..all.len()).map(|t| right.component(t).apply(lx.family(i)[t])).collect();
            ly.locate(&fam).expect("natural maps preserve compatible families")
        })
        .collect();
    let top_pts: Vec<usize> = (0..g.source().len()).map(|_| rng.gen_range(0..lx.apex().len())).collect();
    let mut bottom_pts: Vec<usize> = (0..g.target().len()).map(|_| rng.gen_range(0..ly.apex().len().max(1))).collect();
    for (a, &xi) in top_pts.iter().enumerate() {
        bottom_pts[g.apply(a)] = lim_h[xi];
    }
    let top_map = BaseMorphism::new_unchecked(g.source().clone(), lx.apex().clone(), top_pts);
    let bottom_map = BaseMorphism::new_unchecked(g.target().clone(), ly.apex().clone(), bottom_pts);
    let top = (0..all.len()).map(|t| compose(lx.projection(t), &top_map)).collect::<Result<_>>()?;
    let bottom = (0..all.len()).map(|t| compose(ly.projection(t), &bottom_map)).collect::<Result<_>>()?;
    LiftingProblem::new(g, right.clone(), top, bottom)
}

/// A random strictly increasing `α: B → A`, with `α ≥ lower` pointwise
/// when given. `None` if none exists.
pub fn random_strict_map<R: Rng>(rng: &mut R, b: &FinPoset, a: &FinPoset, lower: Option<&[usize]>) -> Option<Vec<usize>> {
    let order = b.by_degree().to_vec();
    let mut alpha = vec![usize::MAX; b.len()];
    fn go<R: Rng>(
        rng: &mut R,
        i: usize,
        order: &[usize],
        b: &FinPoset,
        a: &FinPoset,
        lower: Option<&[usize]>,
        alpha: &mut Vec<usize>,
    ) -> bool {
        if i == order.len() {
            return true;
        }
        let y = order[i];
        let mut cands: Vec<usize> = (0..a.len())
            .filter(|&c| lower.is_none_or(|l| a.le(l[y], c)))
            .filter(|&c| b.strict_downset(y).members().iter().all(|&s| a.lt(alpha[s], c)))
            .collect();
        cands.shuffle(rng);
        for c in cands {
            alpha[y] = c;
            if go(rng, i + 1, order, b, a, lower, alpha) {
                return true;
            }
        }
        alpha[y] = usize::MAX;
        false
    }
    go(rng, 0, &order, b, a, lower, &mut alpha).then_some(alpha)
}

/// Arrows `e_0 → e_1 → … → e_{len-1}` over one shape, with maps of arrows
/// `(top_k, bottom_k): e_k → e_{k+1}`. Built from the last arrow backwards:
/// the source of each map is a random transformation into the levelwise
/// pullback of the next arrow's right side against a random map into it.
#[derive(Clone, Debug)]
pub struct ArrowChain {
    pub arrows: Vec<NatTrans>,
    pub tops: Vec<NatTrans>,
    pub bottoms: Vec<NatTrans>,
}

pub fn random_arrow_chain<R: Rng>(rng: &mut R, shape: Arc<FinPoset>, len: usize, max_fiber: usize) -> Result<ArrowChain> {
    let mut arrows = vec![random_nat_trans(rng, shape, max_fiber)];
    let mut tops = Vec::new();
    let mut bottoms = Vec::new();
    for _ in 1..len {
        let next = arrows.last().unwrap().clone();
        // v: D → D' and the pullback C' ×_{D'} D
        let v = random_nat_trans_into(rng, next.target(), max_fiber);
        let (pb, to_c, to_d) = levelwise_pullback(&next, &v)?;
        let into = random_nat_trans_into(rng, &pb, max_fiber);
        let u = into.then(&to_c)?;
        let f = into.then(&to_d)?;
        arrows.push(f);
        tops.push(u);
        bottoms.push(v);
    }
    arrows.reverse();
    tops.reverse();
    bottoms.reverse();
    Ok(ArrowChain { arrows, tops, bottoms })
}

/// Pro-objects `e_0 ∘ ι_0, e_1 ∘ ι_1, …` over shrinking index posets: `ι_0`
/// is the identity of the tall shape and `ι_{k+1} = ι_k ∘ β_{k+1}` for random
/// strict `β_{k+1}: B_{k+1} → B_k`.
#[derive(Clone, Debug)]
pub struct ProChain {
    pub chain: ArrowChain,
    pub shapes: Vec<Arc<FinPoset>>,
    /// `β_k: B_k → B_{k-1}` for `k ≥ 1` (index 0 is the identity)
    pub betas: Vec<Vec<usize>>,
    /// `ι_k: B_k → A`
    pub iotas: Vec<Vec<usize>>,
    /// `e_k ∘ ι_k`
    pub objects: Vec<NatTrans>,
}

pub fn random_pro_chain<R: Rng>(
    rng: &mut R,
    width: usize,
    height: usize,
    len: usize,
    small: usize,
    max_fiber: usize,
) -> Result<ProChain> {
    let a = Arc::new(random_tall_poset(rng, width, height));
    let chain = random_arrow_chain(rng, a.clone(), len, max_fiber)?;
    let mut shapes = vec![a.clone()];
    let mut betas = vec![(0..a.len()).collect::<Vec<_>>()];
    let mut iotas = betas.clone();
    let mut objects = vec![chain.arrows[0].clone()];
    for k in 1..len {
        let prev = shapes[k - 1].clone();
        let (b, beta) = loop {
            let nb = rng.gen_range(1..=small);
            let b = random_directed_poset(rng, nb, 0.4);
            // keep room above the representatives for later choices
            let low: Vec<usize> = (0..prev.len()).filter(|&x| tall_height(&prev, x) <= height / 2).collect();
            let (sub, back) = prev.subposet(&low);
            if let Some(m) = random_strict_map(rng, &b, &sub, None) {
                break (b, m.into_iter().map(|i| back[i]).collect::<Vec<_>>());
            }
        };
        let b = Arc::new(b);
        let iota: Vec<usize> = beta.iter().map(|&x| iotas[k - 1][x]).collect();
        objects.push(chain.arrows[k].reindex(b.clone(), &iota)?);
        shapes.push(b);
        betas.push(beta);
        iotas.push(iota);
    }
    Ok(ProChain {
        chain,
        shapes,
        betas,
        iotas,
        objects,
    })
}

impl ProChain {
    /// The arrow pre-morphism `objects[k] → objects[k+1]` with index map
    /// `alpha ≥ β_{k+1}`: at `b`, the map of arrows
    /// `e_{k+1}(ι_k α b → ι_k β b) ∘ (top_k, bottom_k)_{ι_k α b}`.
    pub fn arrow_pm(&self, k: usize, alpha: &[usize]) -> Result<PreMorphism<ArrowMap>> {
        let beta = &self.betas[k + 1];
        let iota = &self.iotas[k];
        let next = &self.chain.arrows[k + 1];
        let components = alpha
            .iter()
            .zip(beta)
            .map(|(&a, &b)| {
                let (hi, lo) = (iota[a], iota[b]);
                Ok(ArrowMap {
                    top: compose(next.source().arrow(hi, lo), self.chain.tops[k].component(hi))?,
                    bottom: compose(next.target().arrow(hi, lo), self.chain.bottoms[k].component(hi))?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(PreMorphism {
            alpha: alpha.to_vec(),
            components,
        })
    }

    /// A random admissible index map for [`arrow_pm`](Self::arrow_pm).
    pub fn random_alpha<R: Rng>(&self, rng: &mut R, k: usize, lower: Option<&[usize]>) -> Option<Vec<usize>> {
        let beta = &self.betas[k + 1];
        let prev = &self.shapes[k];
        let floor: Vec<usize> = match lower {
            Some(l) => l.to_vec(),
            None => beta.clone(),
        };
        random_strict_map(rng, &self.shapes[k + 1], prev, Some(&floor))
    }

    /// Raw representatives for the set-level pre-morphisms
    /// `objects[0].source() → objects[1].source()`: an arbitrary index
    /// `r(b) ≥ β(b)` per `b`, the induced map, and random changes on
    /// elements that vanish further up.
    pub fn random_raw<R: Rng>(&self, rng: &mut R, noise_height: usize) -> RawMorphism<BaseMorphism> {
        let a = &self.shapes[0];
        let beta = &self.betas[1];
        let next = self.chain.arrows[1].source();
        let top0 = &self.chain.tops[0];
        let f = self.chain.arrows[0].source();
        let rep = beta
            .iter()
            .map(|&lo| {
                let cands: Vec<usize> = (0..a.len())
                    .filter(|&c| a.le(lo, c) && tall_height(a, c) <= noise_height)
                    .collect();
                let r = *cands.choose(rng).unwrap_or(&lo);
                let clean = compose(next.arrow(r, lo), top0.component(r)).expect("composable");
                let above: Vec<usize> = (0..a.len())
                    .filter(|&c| a.lt(r, c) && tall_height(a, c) <= noise_height + 1)
                    .collect();
                let mut map = clean.assignment().to_vec();
                if let (Some(&hi), false) = (above.choose(rng), clean.target().is_empty()) {
                    let restrict = f.arrow(hi, r);
                    let mut hit = vec![false; map.len()];
                    for i in 0..restrict.source().len() {
                        hit[restrict.apply(i)] = true;
                    }
                    for (i, v) in map.iter_mut().enumerate() {
                        if !hit[i] {
                            *v = rng.gen_range(0..clean.target().len());
                        }
                    }
                }
                (r, BaseMorphism::new_unchecked(clean.source().clone(), clean.target().clone(), map))
            })
            .collect();
        RawMorphism { rep }
    }
}
