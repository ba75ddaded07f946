//! Finite posets over a dense bit-matrix relation.
//!
//! Elements are identified by their canonical index (insertion order). Every
//! [`Poset`] value is immutable and satisfies the partial order axioms; all
//! derived relations (strict order, comparability, intervals, covers) are
//! answered from the stored up-sets and down-sets.

use std::collections::{HashMap, VecDeque};
use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::set::{ElemSet, MAX_ELEMENTS};

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poset {
    names: Arc<[String]>,
    /// `up[x]` is `↑x`, reflexive.
    up: Vec<ElemSet>,
    /// `down[x]` is `↓x`, reflexive.
    down: Vec<ElemSet>,
}

pub(crate) fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.bytes().all(|b| b.is_ascii_alphanumeric() || b == b'_')
}

fn check_names(names: &[String]) -> Result<()> {
    if names.is_empty() {
        return Err(Error::Empty);
    }
    if names.len() > MAX_ELEMENTS {
        return Err(Error::TooLarge {
            got: names.len(),
            max: MAX_ELEMENTS,
        });
    }
    let mut seen = HashMap::with_capacity(names.len());
    for n in names {
        if !valid_name(n) {
            return Err(Error::InvalidName(n.clone()));
        }
        if seen.insert(n.as_str(), ()).is_some() {
            return Err(Error::DuplicateName(n.clone()));
        }
    }
    Ok(())
}

/// Default element names `x0, x1, ..`.
pub fn default_names(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("x{i}")).collect()
}

impl Poset {
    /// Builds the reflexive-transitive closure of `pairs` over `names`.
    pub fn from_edges<S: AsRef<str>, T: AsRef<str>>(
        names: &[S],
        pairs: &[(T, T)],
    ) -> Result<Poset> {
        let names: Vec<String> = names.iter().map(|s| s.as_ref().to_owned()).collect();
        check_names(&names)?;
        let index: HashMap<&str, usize> = names
            .iter()
            .enumerate()
            .map(|(i, n)| (n.as_str(), i))
            .collect();
        let lookup = |s: &str| {
            index
                .get(s)
                .copied()
                .ok_or_else(|| Error::UnknownElement(s.to_owned()))
        };
        let mut idx_pairs = Vec::with_capacity(pairs.len());
        for (x, y) in pairs {
            idx_pairs.push((lookup(x.as_ref())?, lookup(y.as_ref())?));
        }
        Self::build(names.into(), &idx_pairs)
    }

    /// Like [`Poset::from_edges`] with pairs given as indices into `names`.
    pub fn from_index_pairs(names: Vec<String>, pairs: &[(usize, usize)]) -> Result<Poset> {
        check_names(&names)?;
        if let Some(&(x, y)) = pairs
            .iter()
            .find(|&&(x, y)| x >= names.len() || y >= names.len())
        {
            return Err(Error::UnknownElement(format!("#{}", x.max(y))));
        }
        Self::build(names.into(), pairs)
    }

    /// The antichain on `x0, .., x{n-1}`.
    pub fn antichain(n: usize) -> Result<Poset> {
        Self::from_index_pairs(default_names(n), &[])
    }

    fn build(names: Arc<[String]>, pairs: &[(usize, usize)]) -> Result<Poset> {
        let n = names.len();
        let mut up: Vec<ElemSet> = (0..n).map(ElemSet::singleton).collect();
        for &(x, y) in pairs {
            up[x].insert(y);
        }
        // Warshall over bit rows.
        for k in 0..n {
            let row_k = up[k];
            for row in up.iter_mut() {
                if row.contains(k) {
                    *row |= row_k;
                }
            }
        }
        for x in 0..n {
            if let Some(y) = (up[x].without(x)).iter().find(|&y| up[y].contains(x)) {
                return Err(Error::Cycle(names[x].clone(), names[y].clone()));
            }
        }
        Ok(Self::from_up_unchecked(names, up))
    }

    /// Trusts `up` to be a closed, antisymmetric, reflexive relation.
    pub(crate) fn from_up_unchecked(names: Arc<[String]>, up: Vec<ElemSet>) -> Poset {
        let n = up.len();
        let mut down = vec![ElemSet::EMPTY; n];
        for (x, row) in up.iter().enumerate() {
            for y in row.iter() {
                down[y].insert(x);
            }
        }
        Poset { names, up, down }
    }

    /// Builds from explicit up-sets, validating all three axioms.
    pub fn from_up_sets(names: Vec<String>, up: Vec<ElemSet>) -> Result<Poset> {
        check_names(&names)?;
        if up.len() != names.len() {
            return Err(Error::InvalidParameter(
                "relation size differs from carrier".into(),
            ));
        }
        let p = Self::from_up_unchecked(names.into(), up);
        if !p.satisfies_axioms() {
            return Err(Error::InvalidParameter(
                "relation is not a partial order".into(),
            ));
        }
        Ok(p)
    }

    /// Same relation, new names (must be valid, unique, same count).
    pub fn renamed(&self, names: Vec<String>) -> Result<Poset> {
        check_names(&names)?;
        if names.len() != self.len() {
            return Err(Error::InvalidParameter(
                "name count differs from carrier".into(),
            ));
        }
        Ok(Poset {
            names: names.into(),
            up: self.up.clone(),
            down: self.down.clone(),
        })
    }

    /// Full scan of reflexivity, antisymmetry and transitivity.
    pub fn satisfies_axioms(&self) -> bool {
        let n = self.len();
        for x in 0..n {
            if !self.leq(x, x) {
                return false;
            }
            for y in 0..n {
                if x != y && self.leq(x, y) && self.leq(y, x) {
                    return false;
                }
                for z in 0..n {
                    if self.leq(x, y) && self.leq(y, z) && !self.leq(x, z) {
                        return false;
                    }
                }
            }
        }
        // The down rows must mirror the up rows.
        (0..n).all(|x| (0..n).all(|y| self.up[x].contains(y) == self.down[y].contains(x)))
    }

    pub fn len(&self) -> usize {
        self.up.len()
    }

    pub fn is_empty(&self) -> bool {
        self.up.is_empty()
    }

    pub fn carrier(&self) -> ElemSet {
        ElemSet::full(self.len())
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn name(&self, x: usize) -> &str {
        &self.names[x]
    }

    pub fn index_of(&self, name: &str) -> Result<usize> {
        self.names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| Error::UnknownElement(name.to_owned()))
    }

    pub fn set_of<S: AsRef<str>>(&self, names: &[S]) -> Result<ElemSet> {
        names.iter().map(|n| self.index_of(n.as_ref())).collect()
    }

    pub fn names_of(&self, set: ElemSet) -> Vec<String> {
        set.iter().map(|x| self.names[x].clone()).collect()
    }

    pub(crate) fn check_index(&self, x: usize) -> Result<()> {
        if x < self.len() {
            Ok(())
        } else {
            Err(Error::UnknownElement(format!("#{x}")))
        }
    }

    pub(crate) fn check_subset(&self, set: ElemSet) -> Result<()> {
        match (set - self.carrier()).first() {
            None => Ok(()),
            Some(x) => Err(Error::UnknownElement(format!("#{x}"))),
        }
    }

    #[inline]
    pub fn leq(&self, x: usize, y: usize) -> bool {
        self.up[x].contains(y)
    }

    #[inline]
    pub fn lt(&self, x: usize, y: usize) -> bool {
        x != y && self.leq(x, y)
    }

    #[inline]
    pub fn comparable(&self, x: usize, y: usize) -> bool {
        self.leq(x, y) || self.leq(y, x)
    }

    #[inline]
    pub fn parallel(&self, x: usize, y: usize) -> bool {
        !self.comparable(x, y)
    }

    /// `↓x`
    #[inline]
    pub fn down(&self, x: usize) -> ElemSet {
        self.down[x]
    }

    /// `↑x`
    #[inline]
    pub fn up(&self, x: usize) -> ElemSet {
        self.up[x]
    }

    #[inline]
    pub fn strict_down(&self, x: usize) -> ElemSet {
        self.down[x].without(x)
    }

    #[inline]
    pub fn strict_up(&self, x: usize) -> ElemSet {
        self.up[x].without(x)
    }

    /// Every element comparable to `x`, including `x`.
    #[inline]
    pub fn comparables(&self, x: usize) -> ElemSet {
        self.up[x] | self.down[x]
    }

    /// `[x, y] = ↑x ∩ ↓y`
    #[inline]
    pub fn interval(&self, x: usize, y: usize) -> ElemSet {
        self.up[x] & self.down[y]
    }

    pub fn is_lower_cover(&self, x: usize, y: usize) -> bool {
        self.lt(x, y) && self.interval(x, y).len() == 2
    }

    /// The Hasse relation, sorted.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for x in 0..self.len() {
            for y in self.strict_up(x) {
                if self.interval(x, y).len() == 2 {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// All pairs `x < y`, sorted.
    pub fn strict_pairs(&self) -> Vec<(usize, usize)> {
        (0..self.len())
            .flat_map(|x| self.strict_up(x).iter().map(move |y| (x, y)))
            .collect()
    }

    /// Elements sorted by size of their down-set; every `x < y` has `x` first.
    pub fn linear_extension(&self) -> Vec<usize> {
        let mut order: Vec<usize> = (0..self.len()).collect();
        order.sort_by_key(|&x| (self.down[x].len(), x));
        order
    }

    /// Length (edge count) of a longest chain.
    pub fn height(&self) -> usize {
        let mut level = vec![0usize; self.len()];
        for x in self.linear_extension() {
            level[x] = self
                .strict_down(x)
                .iter()
                .map(|y| level[y] + 1)
                .max()
                .unwrap_or(0);
        }
        level.into_iter().max().unwrap_or(0)
    }

    pub fn minimal(&self) -> ElemSet {
        (0..self.len())
            .filter(|&x| self.strict_down(x).is_empty())
            .collect()
    }

    pub fn maximal(&self) -> ElemSet {
        (0..self.len())
            .filter(|&x| self.strict_up(x).is_empty())
            .collect()
    }

    pub fn extremal_partition(&self) -> ExtremalPartition {
        let lower = self.minimal();
        let upper = self.maximal();
        let extremal = lower | upper;
        let middle = self.carrier() - extremal;
        let mut lambda = vec![None; self.len()];
        let mut upsilon = vec![None; self.len()];
        for m in middle {
            lambda[m] = (self.strict_down(m) & lower).first();
            upsilon[m] = (self.strict_up(m) & upper).first();
        }
        ExtremalPartition {
            lower,
            upper,
            extremal,
            middle,
            lambda,
            upsilon,
        }
    }

    /// Connectivity components of the comparability graph, ordered by least element.
    pub fn components(&self) -> Vec<ElemSet> {
        let mut seen = ElemSet::EMPTY;
        let mut out = Vec::new();
        for start in 0..self.len() {
            if seen.contains(start) {
                continue;
            }
            let mut comp = ElemSet::singleton(start);
            let mut frontier = comp;
            while !frontier.is_empty() {
                let mut next = ElemSet::EMPTY;
                for x in frontier {
                    next |= self.comparables(x);
                }
                frontier = next - comp;
                comp |= next;
            }
            seen |= comp;
            out.push(comp);
        }
        out
    }

    pub fn is_connected(&self) -> bool {
        self.components().len() == 1
    }

    /// Shortest-path lengths in the comparability graph from `source`.
    pub(crate) fn comparability_distances(
        &self,
        source: usize,
        skip_edge: Option<(usize, usize)>,
    ) -> Vec<Option<usize>> {
        let mut dist = vec![None; self.len()];
        dist[source] = Some(0);
        let mut queue = VecDeque::from([source]);
        while let Some(x) = queue.pop_front() {
            let d = dist[x].unwrap();
            for y in self.comparables(x).without(x) {
                if let Some((a, b)) = skip_edge {
                    if (x, y) == (a, b) || (x, y) == (b, a) {
                        continue;
                    }
                }
                if dist[y].is_none() {
                    dist[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        dist
    }

    /// `P|_Y`, keeping the relative index order of `Y`.
    pub fn induced(&self, subset: ElemSet) -> Result<Poset> {
        Ok(self.induced_with_indices(subset)?.0)
    }

    /// `P|_Y` together with the original index of every new index.
    pub fn induced_with_indices(&self, subset: ElemSet) -> Result<(Poset, Vec<usize>)> {
        self.check_subset(subset)?;
        if subset.is_empty() {
            return Err(Error::Empty);
        }
        let keep: Vec<usize> = subset.iter().collect();
        let mut new_index = vec![usize::MAX; self.len()];
        for (i, &x) in keep.iter().enumerate() {
            new_index[x] = i;
        }
        let up = keep
            .iter()
            .map(|&x| (self.up[x] & subset).iter().map(|y| new_index[y]).collect())
            .collect();
        let names: Vec<String> = keep.iter().map(|&x| self.names[x].clone()).collect();
        Ok((Self::from_up_unchecked(names.into(), up), keep))
    }

    /// `P \ Y`
    pub fn remove(&self, subset: ElemSet) -> Result<Poset> {
        self.check_subset(subset)?;
        self.induced(self.carrier() - subset)
    }

    /// Indices of `sub`'s elements in `self`, if `sub` is an induced subposet by name.
    pub fn embedding_of(&self, sub: &Poset) -> Option<Vec<usize>> {
        let emb: Vec<usize> = sub
            .names
            .iter()
            .map(|n| self.index_of(n).ok())
            .collect::<Option<_>>()?;
        for (i, &x) in emb.iter().enumerate() {
            for (j, &y) in emb.iter().enumerate() {
                if sub.leq(i, j) != self.leq(x, y) {
                    return None;
                }
            }
        }
        Some(emb)
    }

    /// The poset with the order reversed.
    pub fn dual(&self) -> Poset {
        Poset {
            names: self.names.clone(),
            up: self.down.clone(),
            down: self.up.clone(),
        }
    }
}

impl fmt::Debug for Poset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let covers: Vec<String> = self
            .covers()
            .into_iter()
            .map(|(x, y)| format!("{}<{}", self.names[x], self.names[y]))
            .collect();
        write!(f, "Poset{{{}; {}}}", self.names.join(","), covers.join(" "))
    }
}

/// Minimal, maximal, extremal and middle points with the fixed choices `λ`, `υ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtremalPartition {
    pub lower: ElemSet,
    pub upper: ElemSet,
    pub extremal: ElemSet,
    pub middle: ElemSet,
    lambda: Vec<Option<usize>>,
    upsilon: Vec<Option<usize>>,
}

impl ExtremalPartition {
    /// Least-index minimal point strictly below the middle point `m`.
    pub fn lambda(&self, m: usize) -> Option<usize> {
        self.lambda.get(m).copied().flatten()
    }

    /// Least-index maximal point strictly above the middle point `m`.
    pub fn upsilon(&self, m: usize) -> Option<usize> {
        self.upsilon.get(m).copied().flatten()
    }
}
