//! Order homomorphisms and retractions: verification, the Abian–Brown
//! fixed point search, irreducible points and I-dismantling, bundle
//! dismantling towards a single extremal point, the distance-based
//! retraction of a flat poset onto a minimal crown, and normalization of
//! retracts so that their extremal points are extremal in the ambient poset.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::poset::Poset;
use crate::set::ElemSet;
use crate::zigzag::{find_crown_between, Crown};

/// A total map between the carriers of two posets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PosetMap {
    source: Poset,
    target: Poset,
    assignment: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verification {
    pub homomorphism: bool,
    pub retraction: bool,
    /// Source elements mapped to an element of the same name.
    pub fixed_points: ElemSet,
}

impl PosetMap {
    pub fn new(source: Poset, target: Poset, assignment: Vec<usize>) -> Result<PosetMap> {
        if assignment.len() != source.len() {
            return Err(Error::CarrierMismatch(format!(
                "{} images for {} source elements",
                assignment.len(),
                source.len()
            )));
        }
        if let Some(&y) = assignment.iter().find(|&&y| y >= target.len()) {
            return Err(Error::CarrierMismatch(format!(
                "image #{y} outside the target"
            )));
        }
        Ok(PosetMap {
            source,
            target,
            assignment,
        })
    }

    pub fn endomorphism(p: &Poset, assignment: Vec<usize>) -> Result<PosetMap> {
        Self::new(p.clone(), p.clone(), assignment)
    }

    pub fn identity(p: &Poset) -> PosetMap {
        PosetMap {
            source: p.clone(),
            target: p.clone(),
            assignment: (0..p.len()).collect(),
        }
    }

    /// Map given as `(source name, target name)` pairs covering the whole source.
    pub fn from_names<S: AsRef<str>>(
        source: &Poset,
        target: &Poset,
        pairs: &[(S, S)],
    ) -> Result<PosetMap> {
        let mut assignment = vec![usize::MAX; source.len()];
        for (x, y) in pairs {
            assignment[source.index_of(x.as_ref())?] = target.index_of(y.as_ref())?;
        }
        if let Some(x) = assignment.iter().position(|&y| y == usize::MAX) {
            return Err(Error::CarrierMismatch(format!(
                "no image for `{}`",
                source.name(x)
            )));
        }
        Self::new(source.clone(), target.clone(), assignment)
    }

    pub fn source(&self) -> &Poset {
        &self.source
    }

    pub fn target(&self) -> &Poset {
        &self.target
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    #[inline]
    pub fn apply(&self, x: usize) -> usize {
        self.assignment[x]
    }

    pub fn is_endomorphism(&self) -> bool {
        self.source == self.target
    }

    /// Image as a set of target indices.
    pub fn image(&self) -> ElemSet {
        self.assignment.iter().copied().collect()
    }

    pub fn is_homomorphism(&self) -> bool {
        (0..self.source.len()).all(|x| {
            self.source
                .strict_up(x)
                .iter()
                .all(|y| self.target.leq(self.assignment[x], self.assignment[y]))
        })
    }

    /// The map read as an endomorphism of the source, when the target is an
    /// induced subposet of the source (matched by name).
    pub fn ambient_assignment(&self) -> Option<Vec<usize>> {
        if self.is_endomorphism() {
            return Some(self.assignment.clone());
        }
        let emb = self.source.embedding_of(&self.target)?;
        Some(self.assignment.iter().map(|&y| emb[y]).collect())
    }

    pub fn fixed_points(&self) -> ElemSet {
        (0..self.source.len())
            .filter(|&x| self.target.name(self.assignment[x]) == self.source.name(x))
            .collect()
    }

    pub fn is_retraction(&self) -> bool {
        if !self.is_homomorphism() {
            return false;
        }
        if self.is_endomorphism() {
            return self.assignment.iter().all(|&y| self.assignment[y] == y);
        }
        match self.source.embedding_of(&self.target) {
            Some(emb) => emb
                .iter()
                .enumerate()
                .all(|(y, &x)| self.assignment[x] == y),
            None => false,
        }
    }

    pub fn verify(&self) -> Verification {
        Verification {
            homomorphism: self.is_homomorphism(),
            retraction: self.is_retraction(),
            fixed_points: self.fixed_points(),
        }
    }

    /// `then ∘ self`
    pub fn then(&self, then: &PosetMap) -> Result<PosetMap> {
        if self.target != then.source {
            return Err(Error::CarrierMismatch("composed maps do not meet".into()));
        }
        Ok(PosetMap {
            source: self.source.clone(),
            target: then.target.clone(),
            assignment: self
                .assignment
                .iter()
                .map(|&y| then.assignment[y])
                .collect(),
        })
    }

    /// Same assignment with a new (name-compatible) target, e.g. the post-restriction to the image.
    pub fn with_target(&self, target: &Poset) -> Result<PosetMap> {
        let assignment = self
            .assignment
            .iter()
            .map(|&y| target.index_of(self.target.name(y)))
            .collect::<Result<_>>()?;
        Self::new(self.source.clone(), target.clone(), assignment)
    }

    /// `(source name, target name)` pairs in source order.
    pub fn named_pairs(&self) -> Vec<(String, String)> {
        self.assignment
            .iter()
            .enumerate()
            .map(|(x, &y)| {
                (
                    self.source.name(x).to_owned(),
                    self.target.name(y).to_owned(),
                )
            })
            .collect()
    }
}

/// Follows `x, f(x), f²(x), ..` from a point comparable to its image until it is stationary.
pub fn abian_brown_from(f: &PosetMap, start: usize) -> Option<usize> {
    let p = f.source();
    let fx = f.apply(start);
    if !p.comparable(start, fx) {
        return None;
    }
    let mut x = start;
    loop {
        let next = f.apply(x);
        if next == x {
            return Some(x);
        }
        x = next;
    }
}

/// A fixed point of the endomorphism `f`, found from the first `x` with `x ≤ f(x)` or `x ≥ f(x)`.
pub fn abian_brown(f: &PosetMap) -> Result<Option<usize>> {
    if !f.is_endomorphism() {
        return Err(Error::CarrierMismatch("not an endomorphism".into()));
    }
    if !f.is_homomorphism() {
        return Err(Error::NotHomomorphism);
    }
    Ok((0..f.source().len()).find_map(|x| abian_brown_from(f, x)))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// `↓°x` has a maximum (retract downwards).
    Down,
    /// `↑°x` has a minimum (retract upwards).
    Up,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Irreducible {
    pub point: usize,
    pub witness: usize,
    pub side: Side,
}

fn max_of(p: &Poset, set: ElemSet) -> Option<usize> {
    set.iter().find(|&z| set.is_subset(p.down(z)))
}

fn min_of(p: &Poset, set: ElemSet) -> Option<usize> {
    set.iter().find(|&z| set.is_subset(p.up(z)))
}

fn irreducible_at(p: &Poset, x: usize) -> impl Iterator<Item = Irreducible> {
    let down = max_of(p, p.strict_down(x)).map(|z| Irreducible {
        point: x,
        witness: z,
        side: Side::Down,
    });
    let up = min_of(p, p.strict_up(x)).map(|z| Irreducible {
        point: x,
        witness: z,
        side: Side::Up,
    });
    down.into_iter().chain(up)
}

/// Every irreducible point with its witness; both sides are listed when both exist.
pub fn irreducible_points(p: &Poset) -> Vec<Irreducible> {
    (0..p.len()).flat_map(|x| irreducible_at(p, x)).collect()
}

/// Retracts `x` onto `z`: the map is the identity except `x ↦ z`.
pub fn i_retract(p: &Poset, x: usize, z: usize) -> Result<(Poset, PosetMap)> {
    p.check_index(x)?;
    p.check_index(z)?;
    if !irreducible_at(p, x).any(|irr| irr.witness == z) {
        return Err(Error::NotIrreducible {
            x: p.name(x).to_owned(),
            z: p.name(z).to_owned(),
        });
    }
    let rest = p.remove(ElemSet::singleton(x))?;
    let assignment = (0..p.len())
        .map(|y| {
            let image = if y == x { z } else { y };
            // indices above x shift down by one in P \ {x}
            if image > x {
                image - 1
            } else {
                image
            }
        })
        .collect();
    let map = PosetMap::new(p.clone(), rest.clone(), assignment)?;
    Ok((rest, map))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DismantlingStep {
    pub removed: String,
    pub target: String,
}

#[derive(Clone, Debug)]
pub struct DismantlingTrace {
    pub steps: Vec<DismantlingStep>,
    pub core: Poset,
    /// The composition of every step, from the original poset onto the core.
    pub composed: PosetMap,
}

impl DismantlingTrace {
    pub(crate) fn start(p: &Poset) -> DismantlingTrace {
        DismantlingTrace {
            steps: Vec::new(),
            core: p.clone(),
            composed: PosetMap::identity(p),
        }
    }

    fn push(&mut self, x: usize, z: usize) -> Result<()> {
        let (rest, map) = i_retract(&self.core, x, z)?;
        self.steps.push(DismantlingStep {
            removed: self.core.name(x).to_owned(),
            target: self.core.name(z).to_owned(),
        });
        self.composed = self.composed.then(&map)?;
        self.core = rest;
        Ok(())
    }

    /// Continues with `next`, which must start at this trace's core.
    pub(crate) fn append(&mut self, next: DismantlingTrace) -> Result<()> {
        self.composed = self.composed.then(&next.composed)?;
        self.steps.extend(next.steps);
        self.core = next.core;
        Ok(())
    }

    pub fn core_is_singleton(&self) -> bool {
        self.core.len() == 1
    }
}

/// Removes irreducible points greedily (least index first, down-witness preferred) until none remain.
pub fn i_dismantle(p: &Poset) -> DismantlingTrace {
    let mut trace = DismantlingTrace::start(p);
    while trace.core.len() > 1 {
        let Some(irr) = (0..trace.core.len()).find_map(|x| irreducible_at(&trace.core, x).next())
        else {
            break;
        };
        trace
            .push(irr.point, irr.witness)
            .expect("irreducible witness is valid");
    }
    trace
}

#[derive(Clone, Debug)]
pub struct BundleRetract {
    pub poset: Poset,
    /// The combined map: identity off the removed intervals, the anchor on them.
    pub map: PosetMap,
    /// The I-retractions realizing the map, in order.
    pub trace: DismantlingTrace,
}

/// Dismantles every interval `[n, anchor]` (side `Up`, anchor maximal with
/// `↑°n ∩ U = {anchor}`) or `[anchor, n]` (side `Down`, dual) onto the anchor.
pub fn bundle_retract(
    p: &Poset,
    bundle: ElemSet,
    anchor: usize,
    side: Side,
) -> Result<BundleRetract> {
    p.check_subset(bundle)?;
    p.check_index(anchor)?;
    let fail = |x: usize, reason: &str| Error::PreconditionFailed {
        element: p.name(x).to_owned(),
        reason: reason.to_owned(),
    };
    let (extremes, beyond): (ElemSet, fn(&Poset, usize) -> ElemSet) = match side {
        Side::Up => (p.maximal(), Poset::strict_up),
        Side::Down => (p.minimal(), Poset::strict_down),
    };
    if !extremes.contains(anchor) {
        return Err(fail(anchor, "anchor is not extremal on the requested side"));
    }
    for n in bundle {
        if beyond(p, n) & extremes != ElemSet::singleton(anchor) {
            return Err(fail(
                n,
                "extremal points beyond it are not exactly the anchor",
            ));
        }
    }
    let span = |q: &Poset, n: usize, a: usize| match side {
        Side::Up => q.interval(n, a),
        Side::Down => q.interval(a, n),
    };
    let removed: ElemSet = bundle
        .iter()
        .fold(ElemSet::EMPTY, |acc, n| acc | span(p, n, anchor))
        .without(anchor);

    let mut trace = DismantlingTrace::start(p);
    for n in bundle {
        loop {
            let q = &trace.core;
            let Ok(nq) = q.index_of(p.name(n)) else { break };
            let aq = q.index_of(p.name(anchor))?;
            // a cover of the anchor inside the span; its only neighbour beyond is the anchor
            let c = span(q, nq, aq)
                .without(aq)
                .iter()
                .find(|&c| match side {
                    Side::Up => q.is_lower_cover(c, aq),
                    Side::Down => q.is_lower_cover(aq, c),
                })
                .ok_or_else(|| {
                    Error::InvariantViolated("no cover of the anchor in the span".into())
                })?;
            trace.push(c, aq)?;
        }
    }

    let poset = p.remove(removed)?;
    let assignment = (0..p.len())
        .map(|y| {
            let image = if removed.contains(y) { anchor } else { y };
            poset.index_of(p.name(image))
        })
        .collect::<Result<_>>()?;
    let map = PosetMap::new(p.clone(), poset.clone(), assignment)?;
    if map != trace.composed || poset != trace.core {
        return Err(Error::InvariantViolated(
            "bundle map differs from its I-retraction sequence".into(),
        ));
    }
    Ok(BundleRetract { poset, map, trace })
}

/// Retraction of a flat connected poset onto a crown with no shorter crown
/// between the same endpoints: `x ↦ c_i` where `i` is the fence distance
/// from `c_0` with the closing edge removed, capped at `I`.
pub fn crown_retraction_flat(p: &Poset, crown: &Crown) -> Result<PosetMap> {
    if p.height() != 1 {
        return Err(Error::NotFlat);
    }
    if !p.is_connected() {
        return Err(Error::NotConnected);
    }
    let points = crown.points().to_vec();
    // re-validate: the crown may come from another poset
    Crown::new(p, points.clone())?;
    let last = points.len() - 1;
    let (start, end) = (points[0], points[last]);
    if let Some(shorter) = find_crown_between(p, None, start, end, points.len()) {
        return Err(Error::MinimalityViolated(shorter));
    }
    let dist = p.comparability_distances(start, Some((start, end)));
    let (target, emb) = p.induced_with_indices(crown.point_set())?;
    let local = |x: usize| emb.iter().position(|&y| y == x).unwrap();
    let assignment = (0..p.len())
        .map(|x| match dist[x] {
            Some(d) if d <= last => local(points[d]),
            _ => local(points[last]),
        })
        .collect();
    let map = PosetMap::new(p.clone(), target, assignment)?;
    if !map.is_retraction() {
        return Err(Error::InvariantViolated(
            "distance map is not a retraction".into(),
        ));
    }
    Ok(map)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Normalized {
    /// `ζ ∘ r`, a retraction onto `Q = ζ[R]`.
    pub retraction: PosetMap,
    /// `(x, ζ(x))` for every `x ∈ R`, as indices of the ambient poset.
    pub zeta: Vec<(usize, usize)>,
}

/// Moves the retract's minimal/maximal points that are middle points of `P`
/// down to `λ(x)` / up to `υ(x)`, giving an isomorphic retract `Q` with
/// `E(Q) ⊆ E(P)`.
pub fn normalize_retract(p: &Poset, r: &PosetMap) -> Result<Normalized> {
    if r.source() != p || !r.is_retraction() {
        return Err(Error::NotRetraction);
    }
    let g = r.ambient_assignment().ok_or(Error::NotRetraction)?;
    let retract: ElemSet = g.iter().copied().collect();
    let ext = p.extremal_partition();
    let (rp, emb) = p.induced_with_indices(retract)?;
    let r_lower: ElemSet = rp.minimal().iter().map(|i| emb[i]).collect();
    let r_upper: ElemSet = rp.maximal().iter().map(|i| emb[i]).collect();
    let r_middle = retract - r_lower - r_upper;

    let zeta = |x: usize| -> usize {
        if ext.extremal.contains(x) || r_middle.contains(x) {
            x
        } else if r_lower.contains(x) {
            ext.lambda(x)
                .expect("middle point has a minimal point below")
        } else {
            ext.upsilon(x)
                .expect("middle point has a maximal point above")
        }
    };
    let pairs: Vec<(usize, usize)> = retract.iter().map(|x| (x, zeta(x))).collect();
    for &(x, zx) in &pairs {
        for &(y, zy) in &pairs {
            if p.leq(x, y) != p.leq(zx, zy) {
                return Err(Error::InvariantViolated(
                    "ζ is not an order embedding".into(),
                ));
            }
        }
    }
    let image: ElemSet = pairs.iter().map(|&(_, z)| z).collect();
    let q = p.induced(image)?;
    let assignment = g
        .iter()
        .map(|&x| q.index_of(p.name(zeta(x))))
        .collect::<Result<_>>()?;
    let retraction = PosetMap::new(p.clone(), q, assignment)?;
    if !retraction.is_retraction() {
        return Err(Error::InvariantViolated("ζ ∘ r is not a retraction".into()));
    }
    Ok(Normalized {
        retraction,
        zeta: pairs,
    })
}
