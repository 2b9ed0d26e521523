//! A truncated cofinal tower `p: A → I` for a finite directed category `I`.
//!
//! `A⁰ = Ob(I)` with `p⁰` the identity on objects. Level `n+1` adjoins one
//! new element for every pair `(R, cone)` where `R` is a Reysha of `Aⁿ` with
//! at most `m` members and `cone` is a functor `R^◁ → I` extending `pⁿ` on
//! `R`: an apex object together with legs `apex → p(r)` compatible with the
//! images of the arrows of `R`. The new element lies exactly above `R`.
//! Copies are not merged: a Reysha already used at an earlier level yields
//! fresh elements again.

use std::collections::HashMap;

use petgraph::unionfind::UnionFind;
use serde::Serialize;

use crate::category::FinCategory;
use crate::error::{Error, Result};
use crate::order::FinPoset;

pub const DEFAULT_ELEMENT_CAP: usize = 10_000;
pub const DEFAULT_LEVELS: usize = 2;
pub const DEFAULT_REYSHA_CAP: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TowerElement {
    pub name: String,
    pub level: usize,
    /// The Reysha `R` this element was adjoined over, sorted.
    pub below: Vec<usize>,
    /// `p(c)`, an object of `I`.
    pub apex: usize,
    /// `p(c → r)` for `r` in `below`, aligned with it.
    pub legs: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct CofinalTower {
    category: FinCategory,
    elements: Vec<TowerElement>,
    /// number of elements in `A⁰, A¹, ...`
    level_sizes: Vec<usize>,
    poset: FinPoset,
    reysha_cap: usize,
}

impl CofinalTower {
    pub fn category(&self) -> &FinCategory {
        &self.category
    }

    pub fn elements(&self) -> &[TowerElement] {
        &self.elements
    }

    /// The top level `Aᵏ`.
    pub fn poset(&self) -> &FinPoset {
        &self.poset
    }

    pub fn levels(&self) -> usize {
        self.level_sizes.len() - 1
    }

    pub fn reysha_cap(&self) -> usize {
        self.reysha_cap
    }

    /// Size of `Aⁿ`.
    pub fn level_size(&self, n: usize) -> usize {
        self.level_sizes[n]
    }

    /// `Aⁿ` as a poset; its elements are the first `level_size(n)` elements
    /// of the tower.
    pub fn level(&self, n: usize) -> FinPoset {
        let members: Vec<usize> = (0..self.level_sizes[n]).collect();
        self.poset.subposet(&members).0
    }

    /// `p(c)`
    pub fn object_of(&self, c: usize) -> usize {
        self.elements[c].apex
    }

    /// `p(c → r)` for `r ≤ c`.
    pub fn arrow_image(&self, c: usize, r: usize) -> Option<usize> {
        if c == r {
            return Some(self.category.identity(self.elements[c].apex));
        }
        let e = &self.elements[c];
        e.below.iter().position(|&x| x == r).map(|pos| e.legs[pos])
    }

    fn find(&self, below: &[usize], apex: usize, legs: &[usize]) -> Option<usize> {
        self.elements
            .iter()
            .position(|e| e.below == below && e.apex == apex && e.legs == legs)
    }
}

pub fn build_tower(category: &FinCategory, levels: usize, reysha_cap: usize) -> Result<CofinalTower> {
    build_tower_with_cap(category, levels, reysha_cap, DEFAULT_ELEMENT_CAP)
}

pub fn build_tower_with_cap(
    category: &FinCategory,
    levels: usize,
    reysha_cap: usize,
    element_cap: usize,
) -> Result<CofinalTower> {
    let verdict = category.is_directed();
    if let Some(w) = verdict.witness {
        return Err(Error::Precondition(format!(
            "category is not directed (axiom {} fails: {w:?})",
            w.axiom()
        )));
    }
    let mut elements: Vec<TowerElement> = category
        .objects()
        .iter()
        .enumerate()
        .map(|(i, o)| TowerElement {
            name: o.clone(),
            level: 0,
            below: vec![],
            apex: i,
            legs: vec![],
        })
        .collect();
    if elements.len() > element_cap {
        return Err(Error::BudgetExceeded(format!("more than {element_cap} elements")));
    }
    let mut level_sizes = vec![elements.len()];
    let mut poset = poset_of(&elements)?;
    for n in 0..levels {
        let reyshas = poset.reyshas_up_to(reysha_cap);
        let mut fresh = Vec::new();
        let mut j = 0usize;
        for r in &reyshas {
            for apex in 0..category.objects().len() {
                for legs in cones(category, &elements, r.members(), apex) {
                    if elements.len() + fresh.len() >= element_cap {
                        return Err(Error::BudgetExceeded(format!(
                            "level {} would exceed {element_cap} elements",
                            n + 1
                        )));
                    }
                    fresh.push(TowerElement {
                        name: format!("({},{j})", n + 1),
                        level: n + 1,
                        below: r.members().to_vec(),
                        apex,
                        legs,
                    });
                    j += 1;
                }
            }
        }
        elements.extend(fresh);
        level_sizes.push(elements.len());
        poset = poset_of(&elements)?;
    }
    Ok(CofinalTower {
        category: category.clone(),
        elements,
        level_sizes,
        poset,
        reysha_cap,
    })
}

fn poset_of(elements: &[TowerElement]) -> Result<FinPoset> {
    let names = elements.iter().map(|e| e.name.clone()).collect();
    let pairs: Vec<(usize, usize)> = elements
        .iter()
        .enumerate()
        .flat_map(|(c, e)| e.below.iter().map(move |&r| (r, c)))
        .collect();
    FinPoset::from_indices(names, &pairs)
}

/// All leg families `apex → p(r)` over `members` (sorted, so predecessors
/// come first) compatible with the arrow images among them.
fn cones(category: &FinCategory, elements: &[TowerElement], members: &[usize], apex: usize) -> Vec<Vec<usize>> {
    let k = members.len();
    // image of r' → r for r < r' inside R
    let image = |hi: usize, lo: usize| -> Option<usize> {
        let e = &elements[members[hi]];
        e.below.iter().position(|&x| x == members[lo]).map(|pos| e.legs[pos])
    };
    let mut out = Vec::new();
    let mut legs = vec![usize::MAX; k];

    // assign from the top (largest index) down; a member below an assigned
    // one has its leg forced
    fn go(
        i: usize,
        k: usize,
        category: &FinCategory,
        elements: &[TowerElement],
        members: &[usize],
        apex: usize,
        image: &dyn Fn(usize, usize) -> Option<usize>,
        legs: &mut Vec<usize>,
        out: &mut Vec<Vec<usize>>,
    ) {
        if i == 0 {
            out.push(legs.clone());
            return;
        }
        let pos = i - 1;
        let mut forced = None;
        let mut consistent = true;
        for hi in (pos + 1)..k {
            if let Some(u) = image(hi, pos) {
                let via = category.compose(u, legs[hi]).expect("legs end where arrow images start");
                match forced {
                    None => forced = Some(via),
                    Some(f) if f != via => {
                        consistent = false;
                        break;
                    }
                    Some(_) => {}
                }
            }
        }
        if !consistent {
            return;
        }
        let target = elements[members[pos]].apex;
        let choices: Vec<usize> = match forced {
            Some(f) => vec![f],
            None => category.hom(apex, target).collect(),
        };
        for c in choices {
            legs[pos] = c;
            go(pos, k, category, elements, members, apex, image, legs, out);
        }
        legs[pos] = usize::MAX;
    }

    go(k, k, category, elements, members, apex, &image, &mut legs, &mut out);
    // canonical order: lexicographic on legs in member order
    out.sort();
    out
}

/// Every Reysha of `A^{max(k-1, 0)}` with at most `cap` members has an upper
/// bound in `Aᵏ`.
pub fn check_tower_directedness(t: &CofinalTower, cap: usize) -> bool {
    tower_directedness_failure(t, cap).is_none()
}

/// The first unbounded Reysha, by element names.
pub fn tower_directedness_failure(t: &CofinalTower, cap: usize) -> Option<Vec<String>> {
    let k = t.levels();
    let lower = t.level(k.saturating_sub(1));
    let top = t.poset();
    if top.is_empty() {
        return Some(vec![]);
    }
    lower
        .reyshas_up_to(cap)
        .into_iter()
        .find(|r| top.upper_bounds(r.members()).is_empty())
        .map(|r| r.members().iter().map(|&x| t.elements[x].name.clone()).collect())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Connectivity {
    True,
    /// several components inside the truncation that are joined in `I/i`
    Inconclusive,
    /// components that stay apart in `I/i`, hence at every level
    Refuted,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OverCategoryReport {
    pub object: String,
    pub nonempty: bool,
    pub connectivity: Connectivity,
    /// over-category objects asked about
    pub vertices: usize,
    pub components: usize,
    /// For a connected over-category, the edges of a spanning tree as pairs
    /// of vertices `element:arrow`.
    pub zigzag: Vec<(String, String)>,
}

/// For each object `i`, connectivity of the over-category `q/i`: its
/// objects `(a, f: p(a) → i)` with `a ∈ A^{max(k-1, 0)}` are asked to be
/// joined by zigzags `(a', f∘p(a'→a)) ~ (a, f)`, `a' > a`, running through
/// all of `Aᵏ`. Elements of the top level are only reachable from above, so
/// they serve as zigzag vertices but are not themselves asked about.
pub fn check_cofinality(t: &CofinalTower) -> Vec<OverCategoryReport> {
    let cat = &t.category;
    (0..cat.objects().len()).map(|i| over_category_report(t, i)).collect()
}

fn over_category_report(t: &CofinalTower, i: usize) -> OverCategoryReport {
    let cat = &t.category;
    let mut index: HashMap<(usize, usize), usize> = HashMap::new();
    let mut vertices: Vec<(usize, usize)> = Vec::new();
    for (a, e) in t.elements.iter().enumerate() {
        for f in cat.hom(e.apex, i) {
            index.insert((a, f), vertices.len());
            vertices.push((a, f));
        }
    }
    let mut uf = UnionFind::<usize>::new(vertices.len());
    let mut tree = Vec::new();
    for (c, e) in t.elements.iter().enumerate() {
        for (pos, &r) in e.below.iter().enumerate() {
            let u = e.legs[pos];
            for f in cat.hom(t.elements[r].apex, i) {
                let fu = cat.compose(f, u).expect("composable");
                let (x, y) = (index[&(c, fu)], index[&(r, f)]);
                if uf.union(x, y) {
                    tree.push((x, y));
                }
            }
        }
    }
    let asked = t.level_sizes[t.levels().saturating_sub(1)];
    let query: Vec<usize> = (0..vertices.len()).filter(|&v| vertices[v].0 < asked).collect();
    let labels: Vec<usize> = uf.into_labeling();
    let mut roots: Vec<usize> = query.iter().map(|&v| labels[v]).collect();
    roots.sort_unstable();
    roots.dedup();
    let components = roots.len();
    let nonempty = index.contains_key(&(i, cat.identity(i)));
    let connectivity = if components <= 1 {
        Connectivity::True
    } else {
        // map each component to its component in I/i
        let full = slice_components(cat, i);
        let mut seen: HashMap<usize, usize> = HashMap::new();
        for &v in &query {
            let (a, f) = vertices[v];
            seen.entry(labels[v]).or_insert(full[&(t.elements[a].apex, f)]);
        }
        let mut images: Vec<usize> = seen.into_values().collect();
        images.sort_unstable();
        images.dedup();
        if images.len() > 1 {
            Connectivity::Refuted
        } else {
            Connectivity::Inconclusive
        }
    };
    let name = |v: usize| {
        let (a, f) = vertices[v];
        format!("{}:{}", t.elements[a].name, cat.arrows()[f].name)
    };
    let zigzag = if connectivity == Connectivity::True {
        tree.into_iter().map(|(x, y)| (name(x), name(y))).collect()
    } else {
        vec![]
    };
    OverCategoryReport {
        object: cat.objects()[i].clone(),
        nonempty,
        connectivity,
        vertices: query.len(),
        components,
        zigzag,
    }
}

/// Component labels of `I/i` on its vertices `(j, g: j → i)`.
fn slice_components(cat: &FinCategory, i: usize) -> HashMap<(usize, usize), usize> {
    let mut index = HashMap::new();
    let mut vertices = Vec::new();
    for j in 0..cat.objects().len() {
        for g in cat.hom(j, i) {
            index.insert((j, g), vertices.len());
            vertices.push((j, g));
        }
    }
    let mut uf = UnionFind::<usize>::new(vertices.len());
    for u in 0..cat.arrows().len() {
        let (src, tgt) = (cat.src(u), cat.tgt(u));
        for g in cat.hom(tgt, i) {
            let gu = cat.compose(g, u).expect("composable");
            uf.union(index[&(src, gu)], index[&(tgt, g)]);
        }
    }
    let labels = uf.into_labeling();
    vertices.into_iter().enumerate().map(|(v, key)| (key, labels[v])).collect()
}

/// Given `c` and an arrow `h: i' → p(c)`, the element `c' = (R_c, p')` one
/// level above `c` with `R_c = {a ≤ c}`, `p'(∞) = i'` and `p'(c' → c) = h`.
/// Fails if `c'` falls outside the truncation.
pub fn lemma_witness(t: &CofinalTower, c: usize, h: usize) -> Result<usize> {
    let cat = &t.category;
    let e = &t.elements[c];
    if cat.tgt(h) != e.apex {
        return Err(Error::Mismatch("arrow does not end at the image of the element".into()));
    }
    let down = t.poset.downset(c);
    let legs: Vec<usize> = down
        .members()
        .iter()
        .map(|&r| cat.compose(t.arrow_image(c, r).expect("r ≤ c"), h).expect("composable"))
        .collect();
    if e.level + 1 > t.levels() || down.len() > t.reysha_cap {
        return Err(Error::TruncationExhausted(format!(
            "the witness above `{}` lies outside the truncation",
            e.name
        )));
    }
    t.find(down.members(), cat.src(h), &legs)
        .filter(|&w| t.elements[w].level == e.level + 1)
        .ok_or_else(|| Error::Internal("witness element missing from the tower".into()))
}
