//! Walks, zigzag-lines, fences and crowns: classification, search and
//! enumeration, plus the fence metric.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::par;
use crate::poset::Poset;
use crate::set::ElemSet;

/// Strongest kind a sequence satisfies. Crowns and fences of positive
/// length are mutually exclusive.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SequenceKind {
    Invalid,
    Walk,
    Zigzag,
    Fence,
    Crown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// `z0 < z1`
    UpFirst,
    /// `z0 > z1`
    DownFirst,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Down,
    Up,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ZigzagSeq {
    pub points: Vec<usize>,
    pub kind: SequenceKind,
    /// `None` for a single point or a non-zigzag.
    pub orientation: Option<Orientation>,
}

impl ZigzagSeq {
    pub fn classify(p: &Poset, points: &[usize]) -> Result<ZigzagSeq> {
        if points.is_empty() {
            return Err(Error::EmptySequence);
        }
        for &x in points {
            p.check_index(x)?;
        }
        let len = points.len() - 1;
        let mut seq = ZigzagSeq {
            points: points.to_vec(),
            kind: SequenceKind::Invalid,
            orientation: None,
        };
        if points.windows(2).any(|w| !p.comparable(w[0], w[1])) {
            return Ok(seq);
        }
        seq.kind = SequenceKind::Walk;

        let up_first = len == 0 || p.lt(points[0], points[1]);
        let zigzag = points.windows(2).enumerate().all(|(i, w)| {
            // step i+1 goes up iff (i+1 odd) == up_first
            if (i % 2 == 0) == up_first {
                p.lt(w[0], w[1])
            } else {
                p.lt(w[1], w[0])
            }
        });
        if !zigzag {
            return Ok(seq);
        }
        seq.kind = SequenceKind::Zigzag;
        if len > 0 {
            seq.orientation = Some(if up_first {
                Orientation::UpFirst
            } else {
                Orientation::DownFirst
            });
        }

        let apart = |gap_ok: &dyn Fn(usize) -> bool| {
            (0..=len).all(|i| {
                ((i + 2)..=len).all(|j| !gap_ok(j - i) || p.parallel(points[i], points[j]))
            })
        };
        if len >= 3 && len % 2 == 1 && apart(&|gap| gap < len) {
            let closes = if up_first {
                p.lt(points[0], points[len])
            } else {
                p.lt(points[len], points[0])
            };
            if closes {
                seq.kind = SequenceKind::Crown;
                return Ok(seq);
            }
        }
        if apart(&|_| true) {
            seq.kind = SequenceKind::Fence;
        }
        Ok(seq)
    }
}

pub fn classify_sequence(p: &Poset, points: &[usize]) -> Result<SequenceKind> {
    Ok(ZigzagSeq::classify(p, points)?.kind)
}

/// A crown `z0, .., zI` with even cardinality `I + 1 >= 4`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct Crown {
    points: Vec<usize>,
    up_first: bool,
}

impl Crown {
    /// Validates `points` as a crown in `p`.
    pub fn new(p: &Poset, points: Vec<usize>) -> Result<Crown> {
        let seq = ZigzagSeq::classify(p, &points)?;
        if seq.kind != SequenceKind::Crown {
            return Err(Error::NotACrown(format!(
                "sequence classifies as {:?}",
                seq.kind
            )));
        }
        Ok(Crown {
            up_first: seq.orientation == Some(Orientation::UpFirst),
            points,
        })
    }

    pub fn from_names<S: AsRef<str>>(p: &Poset, names: &[S]) -> Result<Crown> {
        let points = names
            .iter()
            .map(|n| p.index_of(n.as_ref()))
            .collect::<Result<_>>()?;
        Crown::new(p, points)
    }

    fn from_search(points: Vec<usize>, up_first: bool) -> Crown {
        Crown { points, up_first }
    }

    pub fn points(&self) -> &[usize] {
        &self.points
    }

    pub fn point_set(&self) -> ElemSet {
        self.points.iter().copied().collect()
    }

    /// Number of points, `I + 1`.
    pub fn cardinality(&self) -> usize {
        self.points.len()
    }

    pub fn orientation(&self) -> Orientation {
        if self.up_first {
            Orientation::UpFirst
        } else {
            Orientation::DownFirst
        }
    }

    fn is_upper_position(&self, i: usize) -> bool {
        (i % 2 == 1) == self.up_first
    }

    /// Points that are maximal within the crown.
    pub fn upper(&self) -> ElemSet {
        (0..self.points.len())
            .filter(|&i| self.is_upper_position(i))
            .map(|i| self.points[i])
            .collect()
    }

    /// Points that are minimal within the crown.
    pub fn lower(&self) -> ElemSet {
        self.point_set() - self.upper()
    }

    /// Every edge as `(lower, upper)`, starting with `(z0, z1)` and ending with the closing edge.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let k = self.points.len();
        (0..k)
            .map(|i| {
                let (x, y) = (self.points[i], self.points[(i + 1) % k]);
                if self.is_upper_position(i) {
                    (y, x)
                } else {
                    (x, y)
                }
            })
            .collect()
    }

    /// Least-index lower point first, walking up first towards the smaller neighbour.
    pub fn canonical(&self) -> Crown {
        let k = self.points.len();
        let start = (0..k)
            .filter(|&i| !self.is_upper_position(i))
            .min_by_key(|&i| self.points[i])
            .unwrap();
        let next = self.points[(start + 1) % k];
        let prev = self.points[(start + k - 1) % k];
        let points = if next < prev {
            (0..k).map(|j| self.points[(start + j) % k]).collect()
        } else {
            (0..k).map(|j| self.points[(start + k - j) % k]).collect()
        };
        Crown {
            points,
            up_first: true,
        }
    }

    /// `↓_C z` or `↑_C z` inside the crown's own order.
    fn cone(&self, z: usize, direction: Direction) -> Option<ElemSet> {
        let k = self.points.len();
        let i = self.points.iter().position(|&x| x == z)?;
        let upper = self.is_upper_position(i);
        let mut cone = ElemSet::singleton(z);
        if upper == (direction == Direction::Down) {
            cone.insert(self.points[(i + 1) % k]);
            cone.insert(self.points[(i + k - 1) % k]);
        }
        Some(cone)
    }

    /// Cyclic shift by two positions; an automorphism of the crown with no fixed point.
    pub fn rotation(&self, x: usize) -> Option<usize> {
        let k = self.points.len();
        let i = self.points.iter().position(|&y| y == x)?;
        Some(self.points[(i + 2) % k])
    }

    pub fn display(&self, p: &Poset) -> String {
        let names: Vec<&str> = self.points.iter().map(|&x| p.name(x)).collect();
        names.join(",")
    }
}

/// `∩_{z ∈ Z} ↓_C z` (or `↑_C z`), computed inside the crown.
pub fn crown_caps(crown: &Crown, subset: &[usize], direction: Direction) -> Result<ElemSet> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut caps = crown.point_set();
    for &z in subset {
        caps &= crown
            .cone(z, direction)
            .ok_or_else(|| Error::UnknownElement(format!("#{z} is not on the crown")))?;
    }
    Ok(caps)
}

/// Backtracking over alternating sequences of a fixed cardinality.
struct CrownSearch<'a> {
    p: &'a Poset,
    allowed: ElemSet,
    cardinality: usize,
    up_first: bool,
    /// Lower points must have an index above `z0` and `z1 < zI` (one representative per crown).
    canonical: bool,
    end: Option<usize>,
    limit: usize,
    found: Vec<Vec<usize>>,
    seq: Vec<usize>,
}

impl CrownSearch<'_> {
    fn step_set(&self, x: usize, step_up: bool) -> ElemSet {
        if step_up {
            self.p.strict_up(x)
        } else {
            self.p.strict_down(x)
        }
    }

    fn run(&mut self, start: usize) {
        self.seq.clear();
        self.seq.push(start);
        self.extend(ElemSet::EMPTY);
    }

    /// `forbidden` holds everything comparable to `z1 ..= z_{i-2}`.
    fn extend(&mut self, forbidden: ElemSet) {
        if self.found.len() >= self.limit {
            return;
        }
        let i = self.seq.len();
        let last_index = self.cardinality - 1;
        let z0 = self.seq[0];
        let prev = self.seq[i - 1];
        let step_up = (i % 2 == 1) == self.up_first;
        let mut cand = self.step_set(prev, step_up) & self.allowed;
        cand = cand - forbidden;
        if i >= 2 && i < last_index {
            cand = cand - self.p.comparables(z0);
        }
        if i == last_index {
            cand &= self.step_set(z0, self.up_first);
            if let Some(end) = self.end {
                cand &= ElemSet::singleton(end);
            }
        }
        if self.canonical {
            if i.is_multiple_of(2) {
                cand = cand - ElemSet::full(z0 + 1);
            }
            if i == last_index {
                cand = cand - ElemSet::full(self.seq[1] + 1);
            }
        }
        let next_forbidden = if i >= 2 {
            forbidden | self.p.comparables(self.seq[i - 1])
        } else {
            forbidden
        };
        for z in cand {
            self.seq.push(z);
            if i == last_index {
                self.found.push(self.seq.clone());
            } else {
                self.extend(next_forbidden);
            }
            self.seq.pop();
            if self.found.len() >= self.limit {
                return;
            }
        }
    }
}

fn search_from(
    p: &Poset,
    allowed: ElemSet,
    cardinality: usize,
    start: usize,
    limit: usize,
) -> Vec<Vec<usize>> {
    let mut s = CrownSearch {
        p,
        allowed,
        cardinality,
        up_first: true,
        canonical: true,
        end: None,
        limit,
        found: Vec::new(),
        seq: Vec::with_capacity(cardinality),
    };
    s.run(start);
    s.found
}

/// A crown of minimal cardinality, in canonical form, or `None`.
pub fn find_crown(p: &Poset, restrict_to: Option<ElemSet>) -> Option<Crown> {
    let allowed = restrict_to.unwrap_or_else(|| p.carrier()) & p.carrier();
    let mut k = 4;
    while k <= allowed.len() {
        for start in allowed {
            if let Some(points) = search_from(p, allowed, k, start, 1).into_iter().next() {
                return Some(Crown::from_search(points, true));
            }
        }
        k += 2;
    }
    None
}

/// Shortest crown from `start` to `end` using fewer than `shorter_than` points, if any.
pub fn find_crown_between(
    p: &Poset,
    restrict_to: Option<ElemSet>,
    start: usize,
    end: usize,
    shorter_than: usize,
) -> Option<Crown> {
    let allowed = restrict_to.unwrap_or_else(|| p.carrier()) & p.carrier();
    if !p.comparable(start, end) || start == end {
        return None;
    }
    let up_first = p.lt(start, end);
    let mut k = 4;
    while k < shorter_than && k <= allowed.len() {
        let mut s = CrownSearch {
            p,
            allowed,
            cardinality: k,
            up_first,
            canonical: false,
            end: Some(end),
            limit: 1,
            found: Vec::new(),
            seq: Vec::with_capacity(k),
        };
        s.run(start);
        if let Some(points) = s.found.pop() {
            return Some(Crown::from_search(points, up_first));
        }
        k += 2;
    }
    None
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CrownList {
    /// Canonical forms, ordered by cardinality then lexicographically.
    pub crowns: Vec<Crown>,
    /// The limit was hit; more crowns may exist.
    pub truncated: bool,
}

pub const DEFAULT_CROWN_LIMIT: usize = 100_000;

/// All crowns of cardinality at most `max_len`, one per rotation/reflection class.
pub fn enumerate_crowns(p: &Poset, max_len: usize, limit: usize) -> CrownList {
    enumerate_crowns_within(p, p.carrier(), max_len, limit)
}

pub fn enumerate_crowns_within(
    p: &Poset,
    allowed: ElemSet,
    max_len: usize,
    limit: usize,
) -> CrownList {
    let allowed = allowed & p.carrier();
    let mut crowns = Vec::new();
    let mut truncated = false;
    let max_len = max_len.min(allowed.len());
    let mut k = 4;
    'outer: while k <= max_len {
        let starts: Vec<usize> = allowed.iter().collect();
        let per_start = par::map(&starts, |&s| {
            search_from(p, allowed, k, s, limit.saturating_add(1))
        });
        for found in per_start {
            for points in found {
                if crowns.len() >= limit {
                    truncated = true;
                    break 'outer;
                }
                crowns.push(Crown::from_search(points, true));
            }
        }
        k += 2;
    }
    CrownList { crowns, truncated }
}

/// `d_P(x, y)`: length of a shortest fence, `None` across components.
pub fn fence_distance(p: &Poset, x: usize, y: usize) -> Result<Option<usize>> {
    p.check_index(x)?;
    p.check_index(y)?;
    Ok(p.comparability_distances(x, None)[y])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn ids(p: &Poset, names: &[&str]) -> Vec<usize> {
        names.iter().map(|n| p.index_of(n).unwrap()).collect()
    }

    #[test]
    fn classify_examples() {
        let c4 = fixtures::c4();
        assert_eq!(
            classify_sequence(&c4, &ids(&c4, &["a", "b", "c", "d"])).unwrap(),
            SequenceKind::Crown
        );
        let f3 = fixtures::f3();
        assert_eq!(
            classify_sequence(&f3, &ids(&f3, &["z0", "z1", "z2", "z3"])).unwrap(),
            SequenceKind::Fence
        );
        let ch3 = fixtures::ch3();
        assert_eq!(
            classify_sequence(&ch3, &ids(&ch3, &["x", "z"])).unwrap(),
            SequenceKind::Fence
        );
        assert_eq!(classify_sequence(&ch3, &[0]).unwrap(), SequenceKind::Fence);
        // x < y < z does not alternate
        assert_eq!(
            classify_sequence(&ch3, &[0, 1, 2]).unwrap(),
            SequenceKind::Walk
        );
        assert_eq!(
            classify_sequence(&c4, &ids(&c4, &["a", "c"])).unwrap(),
            SequenceKind::Invalid
        );
        assert_eq!(classify_sequence(&c4, &[]), Err(Error::EmptySequence));
        assert!(matches!(
            classify_sequence(&c4, &[9]),
            Err(Error::UnknownElement(_))
        ));
    }

    #[test]
    fn zigzag_that_is_neither_fence_nor_crown() {
        // b > a < d > c < b returns to its start
        let c4 = fixtures::c4();
        let seq = ids(&c4, &["b", "a", "d", "c", "b"]);
        assert_eq!(classify_sequence(&c4, &seq).unwrap(), SequenceKind::Zigzag);
    }

    #[test]
    fn down_first_crown() {
        let c4 = fixtures::c4();
        let seq = ZigzagSeq::classify(&c4, &ids(&c4, &["b", "a", "d", "c"])).unwrap();
        assert_eq!(seq.kind, SequenceKind::Crown);
        assert_eq!(seq.orientation, Some(Orientation::DownFirst));
    }

    #[test]
    fn find_crown_examples() {
        let c4 = fixtures::c4();
        assert_eq!(
            find_crown(&c4, None).unwrap().points(),
            ids(&c4, &["a", "b", "c", "d"])
        );
        assert_eq!(find_crown(&fixtures::f3(), None), None);
        let hg = fixtures::hourglass();
        let e = hg.extremal_partition().extremal;
        assert_eq!(
            find_crown(&hg, Some(e)).unwrap().points(),
            ids(&hg, &["a", "b", "c", "d"])
        );
        let c6 = fixtures::c6();
        assert_eq!(find_crown(&c6, None).unwrap().cardinality(), 6);
    }

    #[test]
    fn enumerate_examples() {
        assert_eq!(
            enumerate_crowns(&fixtures::c4(), 4, DEFAULT_CROWN_LIMIT)
                .crowns
                .len(),
            1
        );
        let c6 = enumerate_crowns(&fixtures::c6(), 6, DEFAULT_CROWN_LIMIT);
        assert_eq!(c6.crowns.len(), 1);
        assert_eq!(c6.crowns[0].cardinality(), 6);
        let imp2 = fixtures::imp2();
        let e = imp2.extremal_partition().extremal;
        let list = enumerate_crowns_within(&imp2, e, 4, DEFAULT_CROWN_LIMIT);
        assert_eq!(list.crowns.len(), 1);
        assert_eq!(
            list.crowns[0].point_set(),
            imp2.set_of(&["a", "b", "c", "d"]).unwrap()
        );
        // without the restriction the inner points x, y form further 4-crowns
        assert!(enumerate_crowns(&imp2, 4, DEFAULT_CROWN_LIMIT).crowns.len() > 1);
    }

    #[test]
    fn enumeration_truncates() {
        let imp2 = fixtures::imp2();
        let list = enumerate_crowns(&imp2, 6, 2);
        assert!(list.truncated);
        assert_eq!(list.crowns.len(), 2);
    }

    #[test]
    fn crown_caps_examples() {
        let c6p = fixtures::c6();
        let c6 = Crown::new(&c6p, (0..6).collect()).unwrap();
        assert_eq!(
            crown_caps(&c6, &[1, 3], Direction::Down).unwrap(),
            ElemSet::singleton(2)
        );
        assert_eq!(
            crown_caps(&c6, &[1], Direction::Down).unwrap(),
            ElemSet::from_iter([0, 1, 2])
        );
        let c4p = fixtures::c4();
        let c4 = Crown::new(&c4p, (0..4).collect()).unwrap();
        let bd = ids(&c4p, &["b", "d"]);
        assert_eq!(
            crown_caps(&c4, &bd, Direction::Down).unwrap(),
            c4p.set_of(&["a", "c"]).unwrap()
        );
        assert_eq!(crown_caps(&c4, &[], Direction::Up), Err(Error::EmptySubset));
    }

    #[test]
    fn fence_distance_examples() {
        assert_eq!(fence_distance(&fixtures::ch3(), 0, 2).unwrap(), Some(1));
        assert_eq!(fence_distance(&fixtures::f3(), 0, 3).unwrap(), Some(3));
        assert_eq!(fence_distance(&fixtures::c6(), 0, 3).unwrap(), Some(3));
        let two = Poset::antichain(2).unwrap();
        assert_eq!(fence_distance(&two, 0, 1).unwrap(), None);
    }

    #[test]
    fn canonical_form_is_rotation_invariant() {
        let c6p = fixtures::c6();
        let base = Crown::new(&c6p, (0..6).collect()).unwrap();
        for shift in 0..6 {
            let rotated: Vec<usize> = (0..6).map(|j| (j + shift) % 6).collect();
            let reflected: Vec<usize> = rotated.iter().rev().copied().collect();
            assert_eq!(Crown::new(&c6p, rotated).unwrap().canonical(), base);
            assert_eq!(Crown::new(&c6p, reflected).unwrap().canonical(), base);
        }
    }

    #[test]
    fn edges_are_lower_upper_pairs() {
        let c4p = fixtures::c4();
        let c = Crown::new(&c4p, ids(&c4p, &["b", "a", "d", "c"])).unwrap();
        for (x, y) in c.edges() {
            assert!(c4p.lt(x, y));
        }
        assert_eq!(c.edges().len(), 4);
    }
}
