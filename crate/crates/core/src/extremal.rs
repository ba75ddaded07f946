//! The extremal subposet `E(P) = L(P) ∪ U(P)` and what it says about `P`:
//! the crown-free sufficient condition with its dismantling certificate, the
//! component-graph characterization, splitting antichains, lifting of crown
//! retractions from `E(P)` to `P`, and the improper/hourglass necessary
//! conditions.

use serde::Serialize;

use crate::decomposition::{component_graph, minmax_covers};
use crate::error::{Error, Result};
use crate::par;
use crate::poset::Poset;
use crate::retract::{
    abian_brown_from, bundle_retract, crown_retraction_flat, irreducible_points, DismantlingTrace,
    PosetMap, Side,
};
use crate::set::ElemSet;
use crate::zigzag::{
    crown_caps, enumerate_crowns_within, find_crown, Crown, Direction, DEFAULT_CROWN_LIMIT,
};

fn require_connected(p: &Poset) -> Result<()> {
    if p.is_connected() {
        Ok(())
    } else {
        Err(Error::NotConnected)
    }
}

/// `E(P)` as an induced subposet with the ambient index of every point.
pub fn extremal_subposet(p: &Poset) -> (Poset, Vec<usize>) {
    p.induced_with_indices(p.extremal_partition().extremal)
        .expect("a nonempty poset has extremal points")
}

#[derive(Clone, Debug)]
pub struct EpSufficient {
    /// `E(P)` is crown-free, hence has the fixed point property.
    pub applies: bool,
    /// `Some(true)` exactly when `applies`.
    pub verdict: Option<bool>,
    /// I-retractions of `P` down to a single point, following a dismantling of `E(P)`.
    pub trace: Option<DismantlingTrace>,
}

/// If `E(P)` is crown-free then `P` has the fixed point property; the
/// certificate dismantles `P` to a point, one extremal point at a time.
pub fn ep_sufficient(p: &Poset) -> Result<EpSufficient> {
    require_connected(p)?;
    let (e, _) = extremal_subposet(p);
    if find_crown(&e, None).is_some() {
        return Ok(EpSufficient {
            applies: false,
            verdict: None,
            trace: None,
        });
    }
    let trace = dismantle_along_extremal(p)?;
    Ok(EpSufficient {
        applies: true,
        verdict: Some(true),
        trace: Some(trace),
    })
}

/// Each I-retraction `ℓ -> u` of the crown-free flat `E(P)` becomes the removal
/// of `[ℓ, u] \ {u}` from `P`, and `E` loses exactly `ℓ`.
fn dismantle_along_extremal(p: &Poset) -> Result<DismantlingTrace> {
    let mut trace = DismantlingTrace::start(p);
    while trace.core.len() > 1 {
        let cur = trace.core.clone();
        let (e, emb) = extremal_subposet(&cur);
        let irr = irreducible_points(&e).into_iter().next().ok_or_else(|| {
            Error::InvariantViolated("crown-free extremal poset has no irreducible point".into())
        })?;
        let (x, anchor) = (emb[irr.point], emb[irr.witness]);
        // a minimal point retracts up to its unique upper neighbour, a maximal one down
        let side = if cur.minimal().contains(x) {
            Side::Up
        } else {
            Side::Down
        };
        let step = bundle_retract(&cur, ElemSet::singleton(x), anchor, side)?;
        let before: Vec<String> = emb
            .iter()
            .map(|&y| cur.name(y).to_owned())
            .filter(|n| n != cur.name(x))
            .collect();
        let (e_after, emb_after) = extremal_subposet(&step.poset);
        let after: Vec<String> = emb_after
            .iter()
            .map(|&y| step.poset.name(y).to_owned())
            .collect();
        if before != after || !e_after.is_connected() {
            return Err(Error::InvariantViolated(format!(
                "removing `{}` changed the extremal points beyond that point",
                cur.name(x)
            )));
        }
        trace.append(step.trace)?;
    }
    Ok(trace)
}

/// `g : E(P) -> E(P)` from an endomorphism `f` of `P`: `f(x)` when extremal,
/// otherwise `λ(f(x))` for minimal `x` and `υ(f(x))` for maximal `x`.
pub fn project_endomorphism(p: &Poset, f: &PosetMap) -> Result<PosetMap> {
    if f.source() != p || f.target() != p {
        return Err(Error::CarrierMismatch(
            "expected an endomorphism of the poset".into(),
        ));
    }
    if !f.is_homomorphism() {
        return Err(Error::NotHomomorphism);
    }
    let ext = p.extremal_partition();
    let (e, emb) = extremal_subposet(p);
    let local = |x: usize| emb.iter().position(|&y| y == x).expect("extremal point");
    let assignment = emb
        .iter()
        .map(|&x| {
            let fx = f.apply(x);
            let g = if ext.extremal.contains(fx) {
                fx
            } else if ext.lower.contains(x) {
                ext.lambda(fx)
                    .expect("middle point has a minimal point below")
            } else {
                ext.upsilon(fx)
                    .expect("middle point has a maximal point above")
            };
            local(g)
        })
        .collect();
    let g = PosetMap::new(e.clone(), e, assignment)?;
    if !g.is_homomorphism() {
        return Err(Error::InvariantViolated(
            "projected map is not a homomorphism".into(),
        ));
    }
    Ok(g)
}

/// A fixed point of `f` given a fixed point `z` (ambient index) of its projection.
pub fn fixed_point_from_projection(f: &PosetMap, z: usize) -> Option<usize> {
    if f.apply(z) == z {
        Some(z)
    } else {
        abian_brown_from(f, z)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EpCharacterization {
    pub ep_fpp: bool,
    pub no_loops_no_multi: bool,
    pub tree: bool,
    pub per_component_crown_free: bool,
}

/// Decides whether `E(P)` has the fixed point property from the component
/// graph of `P` and the crowns inside each `K ∩ E(P)`.
pub fn characterize_ep(p: &Poset) -> Result<EpCharacterization> {
    require_connected(p)?;
    let graph = component_graph(p);
    let ext = p.extremal_partition().extremal;
    let no_loops_no_multi = !graph.has_loop && !graph.has_multi_edge;
    let per_component_crown_free = graph
        .vertices
        .iter()
        .all(|&k| find_crown(p, Some(k & ext)).is_none());
    let c = EpCharacterization {
        ep_fpp: no_loops_no_multi && graph.is_tree && per_component_crown_free,
        no_loops_no_multi,
        tree: graph.is_tree,
        per_component_crown_free,
    };
    let (e, _) = extremal_subposet(p);
    let direct = e.is_connected() && find_crown(&e, None).is_none();
    if c.ep_fpp != direct {
        return Err(Error::InvariantViolated(
            "component characterization disagrees with the direct crown search".into(),
        ));
    }
    Ok(c)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SplittingAntichain {
    pub antichain: ElemSet,
    /// Middle points outside the antichain lying below some antichain point.
    pub below: ElemSet,
    /// Middle points outside the antichain lying above some antichain point.
    pub above: ElemSet,
}

impl SplittingAntichain {
    /// Computes `B_<`, `B_>` for `antichain` and checks every splitting condition.
    pub fn from_antichain(p: &Poset, antichain: ElemSet) -> Result<SplittingAntichain> {
        p.check_subset(antichain)?;
        let middle = p.extremal_partition().middle;
        let rest = middle - antichain;
        let below = rest
            .iter()
            .filter(|&b| !(p.strict_up(b) & antichain).is_empty())
            .collect();
        let above = rest
            .iter()
            .filter(|&b| !(p.strict_down(b) & antichain).is_empty())
            .collect();
        let s = SplittingAntichain {
            antichain,
            below,
            above,
        };
        s.validate(p)?;
        Ok(s)
    }

    pub fn validate(&self, p: &Poset) -> Result<()> {
        let fail = |reason: String| {
            Err(Error::InvalidParameter(format!(
                "not a splitting antichain: {reason}"
            )))
        };
        let middle = p.extremal_partition().middle;
        let a = self.antichain;
        if !a.is_subset(middle) {
            return fail("contains an extremal point".into());
        }
        if let Some(x) = a.iter().find(|&x| !(p.strict_up(x) & a).is_empty()) {
            return fail(format!(
                "`{}` is comparable to another antichain point",
                p.name(x)
            ));
        }
        if !self.below.is_disjoint(self.above) {
            return fail("some middle point lies both below and above the antichain".into());
        }
        if self.below | self.above != middle - a {
            return fail("some middle point is unrelated to the antichain".into());
        }
        for b in self.below {
            for c in self.above & p.strict_up(b) {
                if (p.interval(b, c) & a).is_empty() {
                    return fail(format!(
                        "[{}, {}] misses the antichain",
                        p.name(b),
                        p.name(c)
                    ));
                }
            }
        }
        Ok(())
    }
}

/// The minimal points of `M(P)`; always splitting, with `B_<` empty.
pub fn splitting_antichain(p: &Poset) -> SplittingAntichain {
    let middle = p.extremal_partition().middle;
    let a = middle
        .iter()
        .filter(|&m| (p.strict_down(m) & middle).is_empty())
        .collect();
    SplittingAntichain::from_antichain(p, a)
        .expect("minimal middle points form a splitting antichain")
}

/// Extends a retraction `r` of `E(P)` onto a crown `C` of at least six points
/// to a retraction `ρ : P -> C` with `ρ|E(P) = r`.
///
/// `crown` is given by ambient indices; `r` maps `P|_{E(P)}` onto `P|_C`.
pub fn lift_crown_retraction(p: &Poset, crown: &Crown, r: &PosetMap) -> Result<PosetMap> {
    require_connected(p)?;
    let crown = Crown::new(p, crown.points().to_vec())?;
    if crown.cardinality() == 4 {
        return Err(Error::CrownTooShort);
    }
    let ext = p.extremal_partition();
    let (e, emb) = extremal_subposet(p);
    if r.source() != &e || !r.is_retraction() {
        return Err(Error::NotRetraction);
    }
    let r_local = r.ambient_assignment().ok_or(Error::NotRetraction)?;
    let mut rho: Vec<Option<usize>> = vec![None; p.len()];
    for (i, &x) in emb.iter().enumerate() {
        rho[x] = Some(emb[r_local[i]]);
    }
    let image: ElemSet = rho.iter().flatten().copied().collect();
    if image != crown.point_set() {
        return Err(Error::NotRetraction);
    }

    let split = splitting_antichain(p);
    for m in split.antichain {
        rho[m] = Some(lift_middle_point(p, &crown, &ext, &rho, m)?);
    }
    let value = |x: usize| rho[x].expect("extremal and antichain points are assigned");
    // α and β only read extremal and antichain points
    let mut extension = Vec::new();
    for b in split.below {
        let alpha = (split.antichain | ext.upper) & p.up(b);
        let images: Vec<usize> = alpha.iter().map(value).collect();
        extension.push((b, single_cap(&crown, &images, Direction::Down)?));
    }
    for b in split.above {
        let beta = (split.antichain | ext.lower) & p.down(b);
        let images: Vec<usize> = beta.iter().map(value).collect();
        extension.push((b, single_cap(&crown, &images, Direction::Up)?));
    }
    for (b, z) in extension {
        rho[b] = Some(z);
    }

    let (target, cemb) = p.induced_with_indices(crown.point_set())?;
    let assignment = rho
        .iter()
        .map(|v| {
            cemb.iter()
                .position(|&y| Some(y) == *v)
                .expect("image lies on the crown")
        })
        .collect();
    let map = PosetMap::new(p.clone(), target, assignment)?;
    if !map.is_retraction() {
        return Err(Error::InvariantViolated(
            "lifted map is not a retraction".into(),
        ));
    }
    Ok(map)
}

/// `ρ[S]` itself when it is a single point, otherwise its unique common cap in the crown.
fn single_cap(crown: &Crown, images: &[usize], direction: Direction) -> Result<usize> {
    let mut distinct = images.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    match distinct.as_slice() {
        [] => Err(Error::InvariantViolated(
            "empty neighbourhood while lifting".into(),
        )),
        [z] => Ok(*z),
        many => {
            let caps = crown_caps(crown, many, direction)?;
            if caps.len() != 1 {
                return Err(Error::InvariantViolated(format!(
                    "{} common caps of {} crown points",
                    caps.len(),
                    many.len()
                )));
            }
            Ok(caps.first().unwrap())
        }
    }
}

/// The height-two rule for a middle point whose lower and upper neighbours are extremal.
fn lift_middle_point(
    p: &Poset,
    crown: &Crown,
    ext: &crate::poset::ExtremalPartition,
    rho: &[Option<usize>],
    m: usize,
) -> Result<usize> {
    let lower = p.strict_down(m) & ext.lower;
    let upper = p.strict_up(m) & ext.upper;
    let r = |x: usize| rho[x].expect("extremal points are assigned");
    if let Some(x) = lower.iter().find(|&x| ext.upper.contains(r(x))) {
        return Ok(r(x));
    }
    if let Some(x) = upper.iter().find(|&x| ext.lower.contains(r(x))) {
        return Ok(r(x));
    }
    let ups: Vec<usize> = upper.iter().map(r).collect();
    let mut distinct = ups.clone();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() > 2 {
        return Err(Error::InvariantViolated(format!(
            "`{}` has {} distinct upper images on the crown",
            p.name(m),
            distinct.len()
        )));
    }
    let z = single_cap(crown, &distinct, Direction::Down)?;
    // for two upper images the cap must lie strictly below both of them
    if distinct.len() == 2 && crown.upper().contains(z) {
        return Err(Error::InvariantViolated(
            "cap of two upper crown points is not lower".into(),
        ));
    }
    Ok(z)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CrownKind {
    /// Empty inner.
    Proper,
    /// Nonempty inner, not an hourglass.
    Improper,
    /// Nonempty inner covered by the down-set and up-set of one inner point.
    Hourglass,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrownClass {
    /// Canonical form `a < b > c < d > a`.
    pub crown: Crown,
    /// `[a, b] ∩ [c, d]` in the ambient poset.
    pub inner: ElemSet,
    pub kind: CrownKind,
    /// First inner point (by index) whose cones cover the inner, for hourglasses.
    pub hourglass_witness: Option<usize>,
}

impl CrownClass {
    pub fn is_improper(&self) -> bool {
        self.kind != CrownKind::Proper
    }
}

pub fn classify_4crown(p: &Poset, crown: &Crown) -> Result<CrownClass> {
    if crown.cardinality() != 4 {
        return Err(Error::NotA4Crown);
    }
    let crown = Crown::new(p, crown.points().to_vec())?.canonical();
    let [a, b, c, d] = crown.points().try_into().expect("four points");
    let inner = p.interval(a, b) & p.interval(c, d);
    let hourglass_witness = inner.iter().find(|&x| inner.is_subset(p.down(x) | p.up(x)));
    let kind = if inner.is_empty() {
        CrownKind::Proper
    } else if hourglass_witness.is_some() {
        CrownKind::Hourglass
    } else {
        CrownKind::Improper
    };
    Ok(CrownClass {
        crown,
        inner,
        kind,
        hourglass_witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ViolationReason {
    /// No improper 4-crown of `E(P)` contains the edge.
    NoImproperWitness,
    /// Height two and no hourglass 4-crown of `E(P)` contains the edge.
    NoHourglassWitness,
    /// The edge is a minmax covering pair.
    EdgeIsMinMaxCover,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    /// The first crown (in enumeration order) through the edge.
    pub crown: Crown,
    /// `(lower, upper)`
    pub edge: (usize, usize),
    pub reasons: Vec<ViolationReason>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NecessaryReport {
    /// Any violation shows that the poset lacks the fixed point property.
    pub violations: Vec<Violation>,
    /// The crown enumeration hit its limit; edges of unlisted crowns were not checked.
    pub truncated: bool,
}

/// 4-crowns `a < b > c < d > a` of `E(P)` through the edge `(a, b)`, classified in `P`.
fn witnesses_through(
    p: &Poset,
    ext: ElemSet,
    a: usize,
    b: usize,
) -> impl Iterator<Item = CrownClass> + '_ {
    let cs = (p.strict_down(b) & ext).without(a);
    cs.into_iter().flat_map(move |c| {
        let ds = (p.strict_up(a) & p.strict_up(c) & ext).without(b);
        ds.into_iter().filter_map(move |d| {
            let crown = Crown::new(p, vec![a, b, c, d]).ok()?;
            classify_4crown(p, &crown).ok()
        })
    })
}

/// Checks every edge of every crown in `E(P)` for an improper (hourglass, at
/// height two) 4-crown witness in `E(P)`, and that it is not a minmax cover.
pub fn check_necessary(p: &Poset) -> Result<NecessaryReport> {
    require_connected(p)?;
    let ext = p.extremal_partition().extremal;
    let list = enumerate_crowns_within(p, ext, ext.len(), DEFAULT_CROWN_LIMIT);
    let mut edges: Vec<((usize, usize), &Crown)> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    for crown in &list.crowns {
        for edge in crown.edges() {
            if seen.insert(edge) {
                edges.push((edge, crown));
            }
        }
    }
    let covers = minmax_covers(p);
    let height_two = p.height() == 2;
    let violations = par::map(&edges, |&((a, b), crown)| {
        let mut reasons = Vec::new();
        let mut improper = false;
        let mut hourglass = false;
        for w in witnesses_through(p, ext, a, b) {
            improper |= w.is_improper();
            hourglass |= w.kind == CrownKind::Hourglass;
            if hourglass {
                break;
            }
        }
        if !improper {
            reasons.push(ViolationReason::NoImproperWitness);
        }
        if height_two && !hourglass {
            reasons.push(ViolationReason::NoHourglassWitness);
        }
        if covers.contains(a, b) {
            reasons.push(ViolationReason::EdgeIsMinMaxCover);
        }
        (!reasons.is_empty()).then(|| Violation {
            crown: crown.clone(),
            edge: (a, b),
            reasons,
        })
    });
    Ok(NecessaryReport {
        violations: violations.into_iter().flatten().collect(),
        truncated: list.truncated,
    })
}

/// A minimal crown of `E(P)` (ambient indices) with its distance retraction of `E(P)` onto it.
pub fn find_retract_crown_ep(p: &Poset) -> Result<Option<(Crown, PosetMap)>> {
    let (e, emb) = extremal_subposet(p);
    if e.height() != 1 || !e.is_connected() {
        return Ok(None);
    }
    let Some(local) = find_crown(&e, None) else {
        return Ok(None);
    };
    let r = crown_retraction_flat(&e, &local)?;
    let crown = Crown::new(p, local.points().iter().map(|&i| emb[i]).collect())?;
    Ok(Some((crown, r)))
}
