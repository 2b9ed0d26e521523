//! Small finite categories: directedness and the cone extension `C^◁`.
//!
//! Posets are viewed as categories with a single arrow `u → v` exactly when
//! `u ≥ v`, so "directed" means cofiltered: every pair of objects receives
//! arrows from a common object, and every parallel pair is equalized by some
//! arrow into its source.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::order::{FinPoset, Reysha};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Arrow {
    pub name: String,
    pub src: usize,
    pub tgt: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinCategory {
    objects: Vec<String>,
    arrows: Vec<Arrow>,
    identity: Vec<usize>,
    /// `compose[g][f] = Some(g∘f)` when `tgt(f) = src(g)`.
    compose: Vec<Vec<Option<usize>>>,
}

/// Which axiom of directedness failed, and on what.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DirectednessWitness {
    /// Axiom 1: there are no objects.
    Empty,
    /// Axiom 2: no object maps to both `s` and `t`.
    NoCommonSource { s: String, t: String },
    /// Axiom 3: no arrow `h` into the common source has `f∘h = g∘h`.
    NotEqualized { f: String, g: String },
}

impl DirectednessWitness {
    pub fn axiom(&self) -> u8 {
        match self {
            DirectednessWitness::Empty => 1,
            DirectednessWitness::NoCommonSource { .. } => 2,
            DirectednessWitness::NotEqualized { .. } => 3,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DirectedVerdict {
    pub directed: bool,
    pub witness: Option<DirectednessWitness>,
}

impl FinCategory {
    /// Builds a category from objects, non-identity arrows and the table of
    /// composites `(g, f, g∘f)` for composable pairs of non-identity arrows.
    /// Identities are added as `id_<object>`; unit laws are automatic.
    /// Every composable non-identity pair must be listed, and the result is
    /// checked for associativity.
    pub fn new<S: AsRef<str>>(
        objects: &[S],
        arrows: &[(S, S, S)],
        composites: &[(S, S, S)],
    ) -> Result<Self> {
        let objects: Vec<String> = objects.iter().map(|s| s.as_ref().to_string()).collect();
        let mut obj_index = HashMap::new();
        for (i, o) in objects.iter().enumerate() {
            if obj_index.insert(o.clone(), i).is_some() {
                return Err(Error::DuplicateElement(o.clone()));
            }
        }
        let lookup_obj = |s: &str| {
            obj_index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };

        let mut all: Vec<Arrow> = Vec::new();
        let mut identity = Vec::with_capacity(objects.len());
        for (i, o) in objects.iter().enumerate() {
            identity.push(all.len());
            all.push(Arrow {
                name: format!("id_{o}"),
                src: i,
                tgt: i,
            });
        }
        for (name, src, tgt) in arrows {
            all.push(Arrow {
                name: name.as_ref().to_string(),
                src: lookup_obj(src.as_ref())?,
                tgt: lookup_obj(tgt.as_ref())?,
            });
        }
        let mut arrow_index = HashMap::new();
        for (i, a) in all.iter().enumerate() {
            if arrow_index.insert(a.name.clone(), i).is_some() {
                return Err(Error::DuplicateElement(a.name.clone()));
            }
        }
        let lookup_arrow = |s: &str| {
            arrow_index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownElement(s.to_string()))
        };

        let m = all.len();
        let mut table = vec![vec![None; m]; m];
        for (g, &id) in identity.iter().enumerate() {
            // id∘f = f, g∘id = g
            for f in 0..m {
                if all[f].tgt == g {
                    table[id][f] = Some(f);
                }
                if all[f].src == g {
                    table[f][id] = Some(f);
                }
            }
        }
        for (g, f, h) in composites {
            let (g, f, h) = (
                lookup_arrow(g.as_ref())?,
                lookup_arrow(f.as_ref())?,
                lookup_arrow(h.as_ref())?,
            );
            if all[f].tgt != all[g].src {
                return Err(Error::InvalidCategory(format!(
                    "`{}` and `{}` are not composable",
                    all[g].name, all[f].name
                )));
            }
            if all[h].src != all[f].src || all[h].tgt != all[g].tgt {
                return Err(Error::InvalidCategory(format!(
                    "`{}` has the wrong endpoints for `{}∘{}`",
                    all[h].name, all[g].name, all[f].name
                )));
            }
            match table[g][f] {
                Some(prev) if prev != h => {
                    return Err(Error::InvalidCategory(format!(
                        "`{}∘{}` is given two values",
                        all[g].name, all[f].name
                    )))
                }
                _ => table[g][f] = Some(h),
            }
        }
        Self::from_parts(objects, all, identity, table)
    }

    fn from_parts(
        objects: Vec<String>,
        arrows: Vec<Arrow>,
        identity: Vec<usize>,
        compose: Vec<Vec<Option<usize>>>,
    ) -> Result<Self> {
        let c = FinCategory {
            objects,
            arrows,
            identity,
            compose,
        };
        c.validate()?;
        Ok(c)
    }

    fn validate(&self) -> Result<()> {
        let m = self.arrows.len();
        for g in 0..m {
            for f in 0..m {
                let composable = self.arrows[f].tgt == self.arrows[g].src;
                match (composable, self.compose[g][f]) {
                    (true, None) => {
                        return Err(Error::InvalidCategory(format!(
                            "missing composite `{}∘{}`",
                            self.arrows[g].name, self.arrows[f].name
                        )))
                    }
                    (false, Some(_)) => {
                        return Err(Error::InvalidCategory(format!(
                            "composite given for non-composable `{}∘{}`",
                            self.arrows[g].name, self.arrows[f].name
                        )))
                    }
                    _ => {}
                }
            }
        }
        for (o, &id) in self.identity.iter().enumerate() {
            for f in 0..m {
                if self.arrows[f].tgt == o && self.compose[id][f] != Some(f) {
                    return Err(Error::InvalidCategory("left unit law fails".into()));
                }
                if self.arrows[f].src == o && self.compose[f][id] != Some(f) {
                    return Err(Error::InvalidCategory("right unit law fails".into()));
                }
            }
        }
        for h in 0..m {
            for g in 0..m {
                let Some(hg) = self.compose[h][g] else { continue };
                for f in 0..m {
                    let Some(gf) = self.compose[g][f] else { continue };
                    if self.compose[hg][f] != self.compose[h][gf] {
                        return Err(Error::InvalidCategory(format!(
                            "associativity fails on `{}`, `{}`, `{}`",
                            self.arrows[h].name, self.arrows[g].name, self.arrows[f].name
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// The category of a poset: one arrow `u → v` iff `u ≥ v`, named
    /// `u->v` (identities keep the `id_` naming).
    pub fn from_poset(p: &FinPoset) -> Self {
        let objects: Vec<String> = p.names().to_vec();
        let mut arrows = Vec::new();
        let mut identity = vec![0; p.len()];
        let mut index = HashMap::new();
        for u in 0..p.len() {
            for v in 0..p.len() {
                if p.le(v, u) {
                    if u == v {
                        identity[u] = arrows.len();
                    }
                    index.insert((u, v), arrows.len());
                    arrows.push(Arrow {
                        name: if u == v {
                            format!("id_{}", p.name(u))
                        } else {
                            format!("{}->{}", p.name(u), p.name(v))
                        },
                        src: u,
                        tgt: v,
                    });
                }
            }
        }
        let m = arrows.len();
        let mut compose = vec![vec![None; m]; m];
        for (g, ga) in arrows.iter().enumerate() {
            for (f, fa) in arrows.iter().enumerate() {
                if fa.tgt == ga.src {
                    compose[g][f] = Some(index[&(fa.src, ga.tgt)]);
                }
            }
        }
        FinCategory {
            objects,
            arrows,
            identity,
            compose,
        }
    }

    pub fn objects(&self) -> &[String] {
        &self.objects
    }

    pub fn arrows(&self) -> &[Arrow] {
        &self.arrows
    }

    pub fn object_index(&self, name: &str) -> Result<usize> {
        self.objects
            .iter()
            .position(|o| o == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn arrow_index(&self, name: &str) -> Result<usize> {
        self.arrows
            .iter()
            .position(|a| a.name == name)
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    pub fn identity(&self, object: usize) -> usize {
        self.identity[object]
    }

    pub fn src(&self, f: usize) -> usize {
        self.arrows[f].src
    }

    pub fn tgt(&self, f: usize) -> usize {
        self.arrows[f].tgt
    }

    /// `g∘f`, if composable.
    pub fn compose(&self, g: usize, f: usize) -> Option<usize> {
        self.compose[g][f]
    }

    pub fn hom(&self, src: usize, tgt: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.arrows.len()).filter(move |&f| self.arrows[f].src == src && self.arrows[f].tgt == tgt)
    }

    /// Exhaustive check of the three directedness axioms.
    pub fn is_directed(&self) -> DirectedVerdict {
        let fail = |w| DirectedVerdict {
            directed: false,
            witness: Some(w),
        };
        if self.objects.is_empty() {
            return fail(DirectednessWitness::Empty);
        }
        let n = self.objects.len();
        for s in 0..n {
            for t in s..n {
                let ok = (0..n).any(|u| self.hom(u, s).next().is_some() && self.hom(u, t).next().is_some());
                if !ok {
                    return fail(DirectednessWitness::NoCommonSource {
                        s: self.objects[s].clone(),
                        t: self.objects[t].clone(),
                    });
                }
            }
        }
        let m = self.arrows.len();
        for f in 0..m {
            for g in (f + 1)..m {
                let (fa, ga) = (&self.arrows[f], &self.arrows[g]);
                if fa.src != ga.src || fa.tgt != ga.tgt {
                    continue;
                }
                let ok = (0..m).any(|h| {
                    self.arrows[h].tgt == fa.src && self.compose[f][h] == self.compose[g][h]
                });
                if !ok {
                    return fail(DirectednessWitness::NotEqualized {
                        f: fa.name.clone(),
                        g: ga.name.clone(),
                    });
                }
            }
        }
        DirectedVerdict {
            directed: true,
            witness: None,
        }
    }
}

/// A fresh name for the adjoined initial object, not clashing with `taken`.
pub(crate) fn fresh_apex_name(taken: &[String]) -> String {
    let mut name = String::from("∞");
    while taken.iter().any(|t| *t == name) {
        name.push('\'');
    }
    name
}

/// `R^◁` as a poset: `R` with a new element `∞` above everything. Under the
/// arrow-reversing convention `∞` is the initial object of the category, so
/// `R^◁` is isomorphic to the principal downset of any element whose strict
/// downset is `R`. Returns the poset and the index of `∞` (always last).
pub fn cone_extend_poset(p: &FinPoset, r: &Reysha) -> (FinPoset, usize) {
    let mut names: Vec<String> = r.members().iter().map(|&x| p.name(x).to_string()).collect();
    let apex = names.len();
    names.push(fresh_apex_name(&names));
    let mut pairs = Vec::new();
    for (i, &x) in r.members().iter().enumerate() {
        for (j, &y) in r.members().iter().enumerate() {
            if i != j && p.le(x, y) {
                pairs.push((i, j));
            }
        }
        pairs.push((i, apex));
    }
    let ext = FinPoset::from_indices(names, &pairs).expect("cone extension of a poset is a poset");
    (ext, apex)
}

/// The category `R^◁`: the Reysha `R` of `p` (as a poset category) with an
/// initial object `∞` adjoined. For empty `R` this is the one-object
/// category.
pub fn cone_extend(p: &FinPoset, r: &Reysha) -> FinCategory {
    FinCategory::from_poset(&cone_extend_poset(p, r).0)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) fn parallel_pair() -> FinCategory {
        FinCategory::new(&["x", "y"], &[("f", "x", "y"), ("g", "x", "y")], &[]).unwrap()
    }

    #[test]
    fn parallel_pair_is_not_directed() {
        let v = parallel_pair().is_directed();
        assert!(!v.directed);
        assert_eq!(
            v.witness,
            Some(DirectednessWitness::NotEqualized {
                f: "f".into(),
                g: "g".into()
            })
        );
        assert_eq!(v.witness.unwrap().axiom(), 3);
    }

    #[test]
    fn terminal_category_is_directed() {
        let c = FinCategory::new(&["*"], &[], &[]).unwrap();
        assert!(c.is_directed().directed);
    }

    #[test]
    fn poset_category_agrees_with_poset_check() {
        let v = FinPoset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        assert!(FinCategory::from_poset(&v).is_directed().directed);
        let anti = FinPoset::antichain(&["a", "b"]).unwrap();
        let verdict = FinCategory::from_poset(&anti).is_directed();
        assert!(!verdict.directed);
        assert_eq!(verdict.witness.unwrap().axiom(), 2);
    }

    #[test]
    fn equalized_pair_is_directed() {
        let c = FinCategory::new(
            &["z", "x", "y"],
            &[("f", "x", "y"), ("g", "x", "y"), ("h", "z", "x"), ("k", "z", "y")],
            &[("f", "h", "k"), ("g", "h", "k")],
        )
        .unwrap();
        assert!(c.is_directed().directed);
    }

    #[test]
    fn missing_composite_is_rejected() {
        let r = FinCategory::new(&["x", "y", "z"], &[("f", "x", "y"), ("g", "y", "z")], &[]);
        assert!(matches!(r, Err(Error::InvalidCategory(_))));
    }

    #[test]
    fn associativity_violation_is_rejected() {
        // (e∘e)∘u = u∘u = e but e∘(e∘u) = e∘u = u
        let r = FinCategory::new(
            &["x"],
            &[("e", "x", "x"), ("u", "x", "x")],
            &[
                ("e", "e", "u"),
                ("e", "u", "u"),
                ("u", "e", "u"),
                ("u", "u", "e"),
            ],
        );
        assert!(matches!(r, Err(Error::InvalidCategory(_))));
    }

    #[test]
    fn cone_extension_shapes() {
        let empty = FinPoset::antichain::<&str>(&[]).unwrap();
        let c = cone_extend(&empty, &Reysha::empty());
        assert_eq!(c.objects(), &["∞".to_string()]);
        assert_eq!(c.arrows().len(), 1);

        let anti = FinPoset::antichain(&["a", "b"]).unwrap();
        let (ext, apex) = cone_extend_poset(&anti, &anti.full());
        assert!(ext.is_directed());
        assert!(ext.is_upper_bound(apex, &[0, 1]));
        let cat = cone_extend(&anti, &anti.full());
        let inf = cat.object_index("∞").unwrap();
        for o in 0..cat.objects().len() {
            assert_eq!(cat.hom(inf, o).count(), 1, "∞ is initial");
        }

        let v = FinPoset::new(&["a", "b", "c"], &[("a", "c"), ("b", "c")]).unwrap();
        let (ext, apex) = cone_extend_poset(&v, &v.full());
        assert!(ext.is_reysha(&[0, 1, 2]));
        assert!(!ext.is_reysha(&[apex]));
        assert_eq!(ext.strict_downset(apex).members(), &[0, 1, 2]);
    }

    #[test]
    fn apex_name_avoids_clash() {
        let p = FinPoset::antichain(&["∞"]).unwrap();
        let c = cone_extend(&p, &p.full());
        assert!(c.object_index("∞'").is_ok());
    }
}
