//! Finite posets, degree functions and Reyshas.
//!
//! A poset is stored with its full reflexive-transitive relation. Element ids
//! are strings; every enumeration runs in the input order unless it says
//! otherwise. Searches that want "the least eligible element" use
//! [`FinPoset::by_degree`], which sorts by degree and then by input position,
//! so that an element always precedes everything strictly above it.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct FinPoset {
    names: Vec<String>,
    index: HashMap<String, usize>,
    le: Vec<Vec<bool>>,
    degree: Vec<usize>,
    by_degree: Vec<usize>,
}

impl fmt::Debug for FinPoset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let pairs: Vec<(&str, &str)> = self
            .strict_pairs()
            .map(|(x, y)| (self.name(x), self.name(y)))
            .collect();
        f.debug_struct("FinPoset")
            .field("elements", &self.names)
            .field("lt", &pairs)
            .finish()
    }
}

/// A downward closed subset of a [`FinPoset`], held as sorted element
/// indices. A Reysha does not borrow its poset; it is only meaningful for
/// the poset that produced it.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default)]
pub struct Reysha {
    members: Vec<usize>,
}

impl Reysha {
    pub fn empty() -> Self {
        Reysha::default()
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.members.binary_search(&x).is_ok()
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl FinPoset {
    /// Builds a poset from element ids and generating pairs `(x, y)` meaning
    /// `x ≤ y`. The reflexive-transitive closure is computed; cycles are
    /// rejected.
    pub fn new<S: AsRef<str>>(elements: &[S], le: &[(S, S)]) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let mut index = HashMap::with_capacity(names.len());
        for (i, n) in names.iter().enumerate() {
            if index.insert(n.clone(), i).is_some() {
                return Err(Error::DuplicateElement(n.clone()));
            }
        }
        let mut pairs = Vec::with_capacity(le.len());
        for (x, y) in le {
            let xi = *index
                .get(x.as_ref())
                .ok_or_else(|| Error::UnknownElement(x.as_ref().to_string()))?;
            let yi = *index
                .get(y.as_ref())
                .ok_or_else(|| Error::UnknownElement(y.as_ref().to_string()))?;
            pairs.push((xi, yi));
        }
        Self::from_indices(names, &pairs)
    }

    /// Same as [`FinPoset::new`] with the generating pairs given by position.
    pub fn from_indices(names: Vec<String>, le: &[(usize, usize)]) -> Result<Self> {
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if index.insert(name.clone(), i).is_some() {
                return Err(Error::DuplicateElement(name.clone()));
            }
        }
        let mut rel = vec![vec![false; n]; n];
        for (i, row) in rel.iter_mut().enumerate() {
            row[i] = true;
        }
        for &(x, y) in le {
            if x >= n || y >= n {
                return Err(Error::UnknownElement(format!("#{}", x.max(y))));
            }
            rel[x][y] = true;
        }
        // Warshall
        for k in 0..n {
            for i in 0..n {
                if rel[i][k] {
                    for j in 0..n {
                        if rel[k][j] {
                            rel[i][j] = true;
                        }
                    }
                }
            }
        }
        for i in 0..n {
            for j in (i + 1)..n {
                if rel[i][j] && rel[j][i] {
                    return Err(Error::Cycle(names[i].clone(), names[j].clone()));
                }
            }
        }

        // Strict predecessors always have strictly smaller downsets, so
        // sorting by downset size is a topological order.
        let mut topo: Vec<usize> = (0..n).collect();
        topo.sort_by_key(|&x| ((0..n).filter(|&y| rel[y][x]).count(), x));
        let mut degree = vec![0usize; n];
        for &x in &topo {
            degree[x] = (0..n)
                .filter(|&y| y != x && rel[y][x])
                .map(|y| degree[y] + 1)
                .max()
                .unwrap_or(0);
        }
        let mut by_degree: Vec<usize> = (0..n).collect();
        by_degree.sort_by_key(|&x| (degree[x], x));

        Ok(FinPoset {
            names,
            index,
            le: rel,
            degree,
            by_degree,
        })
    }

    /// The discrete poset on the given ids.
    pub fn antichain<S: AsRef<str>>(elements: &[S]) -> Result<Self> {
        Self::new::<S>(elements, &[])
    }

    /// The chain `names[0] < names[1] < ...`.
    pub fn chain<S: AsRef<str>>(elements: &[S]) -> Result<Self> {
        let names: Vec<String> = elements.iter().map(|s| s.as_ref().to_string()).collect();
        let pairs: Vec<(usize, usize)> = (1..names.len()).map(|i| (i - 1, i)).collect();
        Self::from_indices(names, &pairs)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.index
            .get(name)
            .copied()
            .ok_or_else(|| Error::UnknownElement(name.to_string()))
    }

    /// `x ≤ y`
    pub fn le(&self, x: usize, y: usize) -> bool {
        self.le[x][y]
    }

    /// `x < y`
    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.le[x][y]
    }

    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.le[x][y] || self.le[y][x]
    }

    /// All pairs `(x, y)` with `x < y`, in input order.
    pub fn strict_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.len();
        (0..n).flat_map(move |x| (0..n).filter(move |&y| self.lt(x, y)).map(move |y| (x, y)))
    }

    /// Covering pairs `(x, y)`: `x < y` with nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        self.strict_pairs()
            .filter(|&(x, y)| !(0..self.len()).any(|z| self.lt(x, z) && self.lt(z, y)))
            .collect()
    }

    /// Length of the longest chain ending at `x`.
    pub fn degree(&self, x: usize) -> usize {
        self.degree[x]
    }

    pub fn degree_of(&self, name: &str) -> Result<usize> {
        Ok(self.degree(self.index_of(name)?))
    }

    pub fn max_degree(&self) -> Option<usize> {
        self.degree.iter().copied().max()
    }

    /// Elements sorted by degree, ties broken by input order.
    pub fn by_degree(&self) -> &[usize] {
        &self.by_degree
    }

    /// `{x : degree(x) ≤ n}`; empty for `n = -1`.
    pub fn level_set(&self, n: i64) -> Reysha {
        let members = (0..self.len())
            .filter(|&x| (self.degree[x] as i64) <= n)
            .collect();
        Reysha { members }
    }

    pub fn is_reysha(&self, subset: &[usize]) -> bool {
        self.first_reysha_violation(subset).is_none()
    }

    fn first_reysha_violation(&self, subset: &[usize]) -> Option<(usize, usize)> {
        let mut mask = vec![false; self.len()];
        for &x in subset {
            mask[x] = true;
        }
        for &x in subset {
            for y in 0..self.len() {
                if self.lt(y, x) && !mask[y] {
                    return Some((x, y));
                }
            }
        }
        None
    }

    /// Validates a subset as a Reysha.
    pub fn reysha(&self, subset: &[usize]) -> Result<Reysha> {
        if let Some(&bad) = subset.iter().find(|&&x| x >= self.len()) {
            return Err(Error::UnknownElement(format!("#{bad}")));
        }
        if let Some((member, missing)) = self.first_reysha_violation(subset) {
            return Err(Error::NotReysha {
                member: self.names[member].clone(),
                missing: self.names[missing].clone(),
            });
        }
        let mut members = subset.to_vec();
        members.sort_unstable();
        members.dedup();
        Ok(Reysha { members })
    }

    pub fn reysha_by_name<S: AsRef<str>>(&self, subset: &[S]) -> Result<Reysha> {
        let idx = subset
            .iter()
            .map(|s| self.index_of(s.as_ref()))
            .collect::<Result<Vec<_>>>()?;
        self.reysha(&idx)
    }

    pub fn full(&self) -> Reysha {
        Reysha {
            members: (0..self.len()).collect(),
        }
    }

    /// The principal downset `{z : z ≤ x}`.
    pub fn downset(&self, x: usize) -> Reysha {
        Reysha {
            members: (0..self.len()).filter(|&z| self.le(z, x)).collect(),
        }
    }

    /// `{z : z < x}`, the index set of the matching limit at `x`.
    pub fn strict_downset(&self, x: usize) -> Reysha {
        Reysha {
            members: (0..self.len()).filter(|&z| self.lt(z, x)).collect(),
        }
    }

    /// Maximal elements of `members` (relative to `members`).
    pub fn maximal_among(&self, members: &[usize]) -> Vec<usize> {
        members
            .iter()
            .copied()
            .filter(|&m| !members.iter().any(|&o| self.lt(m, o)))
            .collect()
    }

    pub fn is_upper_bound(&self, c: usize, set: &[usize]) -> bool {
        set.iter().all(|&r| self.le(r, c))
    }

    pub fn upper_bounds(&self, set: &[usize]) -> Vec<usize> {
        (0..self.len()).filter(|&c| self.is_upper_bound(c, set)).collect()
    }

    /// Directedness of a finite poset: nonempty, and every (finite) Reysha
    /// has an upper bound. For a finite poset it suffices to bound every
    /// principal downset pair, so this checks every pair of elements.
    pub fn is_directed(&self) -> bool {
        if self.is_empty() {
            return false;
        }
        let n = self.len();
        (0..n).all(|x| (x..n).all(|y| (0..n).any(|c| self.le(x, c) && self.le(y, c))))
    }

    /// Every Reysha with at most `cap` members, in a deterministic order
    /// (by size, then lexicographically on sorted indices).
    pub fn reyshas_up_to(&self, cap: usize) -> Vec<Reysha> {
        let mut out = vec![Reysha::empty()];
        let mut frontier = vec![Reysha::empty()];
        for _size in 1..=cap.min(self.len()) {
            let mut next: Vec<Reysha> = Vec::new();
            for r in &frontier {
                // add an element all of whose strict predecessors are present
                for x in 0..self.len() {
                    if r.contains(x) {
                        continue;
                    }
                    if !(0..self.len()).all(|y| !self.lt(y, x) || r.contains(y)) {
                        continue;
                    }
                    let mut members = r.members.clone();
                    members.push(x);
                    members.sort_unstable();
                    next.push(Reysha { members });
                }
            }
            next.sort_by(|a, b| a.members.cmp(&b.members));
            next.dedup();
            out.extend(next.iter().cloned());
            frontier = next;
        }
        out
    }

    /// The induced subposet on `members` (in the given order), with the
    /// map from new positions to old indices.
    pub fn subposet(&self, members: &[usize]) -> (FinPoset, Vec<usize>) {
        let names: Vec<String> = members.iter().map(|&x| self.names[x].clone()).collect();
        let mut pairs = Vec::new();
        for (i, &x) in members.iter().enumerate() {
            for (j, &y) in members.iter().enumerate() {
                if i != j && self.le(x, y) {
                    pairs.push((i, j));
                }
            }
        }
        let sub = FinPoset::from_indices(names, &pairs).expect("subposet of a poset is a poset");
        (sub, members.to_vec())
    }

    /// Order preserving and strict on strict pairs: `b < b'` implies
    /// `alpha[b] < alpha[b']` in `target`.
    pub fn is_strictly_increasing(&self, target: &FinPoset, alpha: &[usize]) -> bool {
        alpha.len() == self.len()
            && alpha.iter().all(|&a| a < target.len())
            && self.strict_pairs().all(|(x, y)| target.lt(alpha[x], alpha[y]))
    }
}
