//! Brute-force ground truth: homomorphism enumeration, the fixed point
//! property by exhaustive search, retract search, and poset generators.
//!
//! The searches assign elements along a linear extension of the source and
//! prune every value that breaks monotonicity against an already assigned
//! comparable element. The first level of the search tree is fanned out in
//! parallel; each subtree stamps its solutions with the node count at which
//! they were found, so merging the subtrees in order reproduces the
//! sequential search exactly, budget cut-offs included.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::par;
use crate::poset::{default_names, Poset};
use crate::retract::PosetMap;
use crate::set::ElemSet;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBudget {
    /// Backtracking nodes (value assignments tried) before giving up.
    pub max_nodes: u64,
    pub max_results: usize,
}

pub const DEFAULT_MAX_NODES: u64 = 10_000_000;

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_nodes: DEFAULT_MAX_NODES,
            max_results: 1_000_000,
        }
    }
}

impl SearchBudget {
    pub fn new(max_nodes: u64, max_results: usize) -> Result<SearchBudget> {
        if max_nodes == 0 || max_results == 0 {
            return Err(Error::InvalidParameter(
                "search budgets must be positive".into(),
            ));
        }
        Ok(SearchBudget {
            max_nodes,
            max_results,
        })
    }

    pub fn with_nodes(max_nodes: u64) -> Result<SearchBudget> {
        Self::new(max_nodes, SearchBudget::default().max_results)
    }
}

/// Linear extension, most comparabilities first among ties.
fn variable_order(p: &Poset, skip: ElemSet) -> Vec<usize> {
    let mut order: Vec<usize> = (p.carrier() - skip).iter().collect();
    order.sort_by_key(|&x| (p.down(x).len(), usize::MAX - p.comparables(x).len(), x));
    order
}

struct Subtree {
    /// `(node stamp, assignment)`
    solutions: Vec<(u64, Vec<usize>)>,
    nodes: u64,
    exceeded: bool,
}

struct Search<'a> {
    p: &'a Poset,
    q: &'a Poset,
    order: &'a [usize],
    allowed: &'a [ElemSet],
    assign: Vec<usize>,
    assigned: ElemSet,
    nodes: u64,
    max_nodes: u64,
    max_solutions: usize,
    solutions: Vec<(u64, Vec<usize>)>,
    exceeded: bool,
}

impl Search<'_> {
    fn candidates(&self, x: usize) -> ElemSet {
        let mut cand = self.allowed[x];
        for y in self.p.strict_down(x) & self.assigned {
            cand &= self.q.up(self.assign[y]);
        }
        for y in self.p.strict_up(x) & self.assigned {
            cand &= self.q.down(self.assign[y]);
        }
        cand
    }

    /// Returns false once the search must stop.
    fn dfs(&mut self, depth: usize) -> bool {
        if depth == self.order.len() {
            self.solutions.push((self.nodes, self.assign.clone()));
            return self.solutions.len() < self.max_solutions;
        }
        let x = self.order[depth];
        for v in self.candidates(x) {
            self.nodes += 1;
            if self.nodes > self.max_nodes {
                self.exceeded = true;
                return false;
            }
            self.assign[x] = v;
            self.assigned.insert(x);
            let go_on = self.dfs(depth + 1);
            self.assigned.remove(x);
            if !go_on {
                return false;
            }
        }
        true
    }
}

/// Result of a (possibly cut-off) homomorphism search.
struct Outcome {
    solutions: Vec<Vec<usize>>,
    nodes: u64,
    exceeded: bool,
    result_limit_hit: bool,
}

/// Searches maps `p -> q` with `f(x) ∈ allowed[x]` and `f(x) = fixed[x]` where given.
fn search(
    p: &Poset,
    q: &Poset,
    allowed: &[ElemSet],
    fixed: &[(usize, usize)],
    budget: SearchBudget,
    max_solutions: usize,
) -> Outcome {
    let fixed_set: ElemSet = fixed.iter().map(|&(x, _)| x).collect();
    let order = variable_order(p, fixed_set);
    let mut base = vec![0usize; p.len()];
    for &(x, v) in fixed {
        base[x] = v;
    }
    let fresh = |assign: Vec<usize>, assigned: ElemSet| Search {
        p,
        q,
        order: &order,
        allowed,
        assign,
        assigned,
        nodes: 0,
        max_nodes: budget.max_nodes,
        max_solutions,
        solutions: Vec::new(),
        exceeded: false,
    };

    // fixed values must themselves be consistent
    let probe = fresh(base.clone(), fixed_set);
    for &(x, v) in fixed {
        if !probe.candidates(x).contains(v) {
            return Outcome {
                solutions: Vec::new(),
                nodes: 0,
                exceeded: false,
                result_limit_hit: false,
            };
        }
    }
    let Some(&first) = order.first() else {
        return Outcome {
            solutions: vec![base],
            nodes: 0,
            exceeded: false,
            result_limit_hit: max_solutions <= 1,
        };
    };

    let values: Vec<usize> = probe.candidates(first).iter().collect();
    let subtrees: Vec<Subtree> = par::map(&values, |&v| {
        let mut assign = base.clone();
        assign[first] = v;
        let mut s = fresh(assign, fixed_set.with(first));
        s.nodes = 1;
        if s.nodes <= s.max_nodes {
            s.dfs(1);
        } else {
            s.exceeded = true;
        }
        Subtree {
            solutions: s.solutions,
            nodes: s.nodes,
            exceeded: s.exceeded,
        }
    });

    let mut out = Outcome {
        solutions: Vec::new(),
        nodes: 0,
        exceeded: false,
        result_limit_hit: false,
    };
    for sub in subtrees {
        let remaining = budget.max_nodes - out.nodes;
        for (stamp, sol) in sub.solutions {
            if stamp > remaining {
                break;
            }
            out.solutions.push(sol);
            if out.solutions.len() == max_solutions {
                out.nodes += stamp;
                out.result_limit_hit = true;
                return out;
            }
        }
        if sub.exceeded || sub.nodes > remaining {
            out.nodes = budget.max_nodes;
            out.exceeded = true;
            return out;
        }
        out.nodes += sub.nodes;
    }
    out
}

#[derive(Clone, Debug)]
pub struct HomomorphismList {
    /// Assignments in search order.
    pub maps: Vec<PosetMap>,
    /// The node budget ran out; `maps` is partial.
    pub budget_exceeded: bool,
    /// `max_results` was reached; `maps` may be partial.
    pub result_limit_hit: bool,
    pub nodes: u64,
}

impl HomomorphismList {
    pub fn is_complete(&self) -> bool {
        !self.budget_exceeded && !self.result_limit_hit
    }
}

pub fn enumerate_homomorphisms(p: &Poset, q: &Poset, budget: SearchBudget) -> HomomorphismList {
    let allowed = vec![q.carrier(); p.len()];
    let out = search(p, q, &allowed, &[], budget, budget.max_results);
    HomomorphismList {
        maps: out
            .solutions
            .into_iter()
            .map(|a| PosetMap::new(p.clone(), q.clone(), a).expect("search stays in the target"))
            .collect(),
        budget_exceeded: out.exceeded,
        result_limit_hit: out.result_limit_hit,
        nodes: out.nodes,
    }
}

/// Calls `visit` with every homomorphism `p -> q`, sequentially and without budget.
pub fn for_each_homomorphism(p: &Poset, q: &Poset, mut visit: impl FnMut(&[usize])) {
    let order = variable_order(p, ElemSet::EMPTY);
    let allowed = vec![q.carrier(); p.len()];
    #[allow(clippy::too_many_arguments)]
    fn rec(
        p: &Poset,
        q: &Poset,
        order: &[usize],
        allowed: &[ElemSet],
        depth: usize,
        assign: &mut Vec<usize>,
        assigned: &mut ElemSet,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if depth == order.len() {
            visit(assign);
            return;
        }
        let x = order[depth];
        let mut cand = allowed[x];
        for y in p.strict_down(x) & *assigned {
            cand &= q.up(assign[y]);
        }
        for y in p.strict_up(x) & *assigned {
            cand &= q.down(assign[y]);
        }
        for v in cand {
            assign[x] = v;
            assigned.insert(x);
            rec(p, q, order, allowed, depth + 1, assign, assigned, visit);
            assigned.remove(x);
        }
    }
    let mut assign = vec![0; p.len()];
    let mut assigned = ElemSet::EMPTY;
    rec(
        p,
        q,
        &order,
        &allowed,
        0,
        &mut assign,
        &mut assigned,
        &mut visit,
    );
}

#[derive(Clone, Debug)]
pub struct FppVerdict {
    pub fpp: bool,
    /// A fixed-point-free endomorphism when `fpp` is false.
    pub witness: Option<PosetMap>,
    pub nodes: u64,
}

/// Decides the fixed point property by searching for a fixed-point-free endomorphism.
///
/// Such a map sends every point to an incomparable one (otherwise Abian–Brown
/// yields a fixed point), so values comparable to the point are never tried.
pub fn fpp_bruteforce(p: &Poset, budget: SearchBudget) -> Result<FppVerdict> {
    let allowed: Vec<ElemSet> = (0..p.len())
        .map(|x| p.carrier() - p.comparables(x))
        .collect();
    let out = search(p, p, &allowed, &[], budget, 1);
    if let Some(sol) = out.solutions.into_iter().next() {
        let witness = PosetMap::endomorphism(p, sol)?;
        debug_assert!(witness.is_homomorphism() && witness.fixed_points().is_empty());
        return Ok(FppVerdict {
            fpp: false,
            witness: Some(witness),
            nodes: out.nodes,
        });
    }
    if out.exceeded {
        return Err(Error::BudgetExceeded {
            max_nodes: budget.max_nodes,
        });
    }
    Ok(FppVerdict {
        fpp: true,
        witness: None,
        nodes: out.nodes,
    })
}

/// Some retraction of `p` onto `p|_Y`, or `None` when `p|_Y` is not a retract.
pub fn retract_bruteforce(
    p: &Poset,
    subset: ElemSet,
    budget: SearchBudget,
) -> Result<Option<PosetMap>> {
    p.check_subset(subset)?;
    let (target, emb) = p.induced_with_indices(subset)?;
    let allowed: Vec<ElemSet> = (0..p.len())
        .map(|x| {
            if subset.contains(x) {
                ElemSet::singleton(x)
            } else {
                subset
            }
        })
        .collect();
    let fixed: Vec<(usize, usize)> = subset.iter().map(|y| (y, y)).collect();
    let out = search(p, p, &allowed, &fixed, budget, 1);
    if let Some(sol) = out.solutions.into_iter().next() {
        let assignment = sol
            .into_iter()
            .map(|y| {
                emb.iter()
                    .position(|&e| e == y)
                    .expect("value inside the retract")
            })
            .collect();
        return Ok(Some(PosetMap::new(p.clone(), target, assignment)?));
    }
    if out.exceeded {
        return Err(Error::BudgetExceeded {
            max_nodes: budget.max_nodes,
        });
    }
    Ok(None)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Family {
    /// Every labeled poset on `n` elements.
    Exhaustive(usize),
    Random {
        n: usize,
        edge_prob: f64,
        seed: u64,
    },
    /// A `k`-crown, `k` even and at least 4.
    Crown(usize),
    /// A fence on `n` points.
    Fence(usize),
    Chain(usize),
}

pub fn generate(family: Family) -> Result<Vec<Poset>> {
    match family {
        Family::Exhaustive(n) => labeled_posets(n),
        Family::Random { n, edge_prob, seed } => Ok(vec![random_poset(n, edge_prob, seed)?]),
        Family::Crown(k) => Ok(vec![crown(k)?]),
        Family::Fence(n) => Ok(vec![fence(n)?]),
        Family::Chain(n) => Ok(vec![chain(n)?]),
    }
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("need at least one element".into()));
    }
    if n > crate::set::MAX_ELEMENTS {
        return Err(Error::InvalidParameter(format!(
            "at most {} elements",
            crate::set::MAX_ELEMENTS
        )));
    }
    Ok(())
}

/// Every labeled poset on `x0 .. x{n-1}`, each exactly once.
///
/// Element `k` is added to every poset on the first `k` elements with a
/// down-closed set `D` below it and an up-closed set `U` above it such that
/// every point of `D` is already below every point of `U`.
pub fn labeled_posets(n: usize) -> Result<Vec<Poset>> {
    check_size(n)?;
    if n > 7 {
        return Err(Error::InvalidParameter(
            "exhaustive generation is limited to 7 elements".into(),
        ));
    }
    let names: std::sync::Arc<[String]> = default_names(n).into();
    let mut out = Vec::new();
    let mut up: Vec<ElemSet> = Vec::with_capacity(n);
    extend_labeled(n, &mut up, &mut |up| {
        out.push(Poset::from_up_unchecked(names.clone(), up.to_vec()));
    });
    Ok(out)
}

fn extend_labeled(n: usize, up: &mut Vec<ElemSet>, emit: &mut dyn FnMut(&[ElemSet])) {
    let k = up.len();
    if k == n {
        emit(up);
        return;
    }
    let down_of =
        |x: usize, up: &[ElemSet]| -> ElemSet { (0..k).filter(|&y| up[y].contains(x)).collect() };
    let downs: Vec<ElemSet> = (0..k).map(|x| down_of(x, up)).collect();
    let all = ElemSet::full(k);
    let mut lower_sets = Vec::new();
    let mut upper_sets = Vec::new();
    for bits in 0..(1u64 << k) {
        let s = ElemSet::from_bits(bits);
        if s.iter().all(|x| downs[x].is_subset(s)) {
            lower_sets.push(s);
        }
        if s.iter().all(|x| up[x].is_subset(s)) {
            upper_sets.push(s);
        }
    }
    for &d in &lower_sets {
        // every u above k must lie above all of d
        let above_all = d.iter().fold(all, |acc, x| acc & up[x].without(x));
        for &u in &upper_sets {
            if !u.is_subset(above_all) || !u.is_disjoint(d) {
                continue;
            }
            let saved: Vec<ElemSet> = d.iter().map(|x| up[x]).collect();
            for x in d {
                up[x].insert(k);
            }
            up.push(u.with(k));
            extend_labeled(n, up, emit);
            up.pop();
            for (x, s) in d.iter().zip(saved) {
                up[x] = s;
            }
        }
    }
}

/// A random DAG on a random labeling with independent edge probability, closed transitively.
pub fn random_poset(n: usize, edge_prob: f64, seed: u64) -> Result<Poset> {
    check_size(n)?;
    if !(0.0..=1.0).contains(&edge_prob) {
        return Err(Error::InvalidParameter(format!(
            "edge probability {edge_prob} outside [0, 1]"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut rng);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random_bool(edge_prob) {
                pairs.push((perm[i], perm[j]));
            }
        }
    }
    Poset::from_index_pairs(default_names(n), &pairs)
}

/// The first connected poset among `random_poset(n, edge_prob, s)` for a seed stream derived from `seed`.
pub fn random_connected_poset(n: usize, edge_prob: f64, seed: u64) -> Result<Poset> {
    const ATTEMPTS: u64 = 100_000;
    for attempt in 0..ATTEMPTS {
        let p = random_poset(
            n,
            edge_prob,
            seed.wrapping_add(attempt.wrapping_mul(0x9E37_79B9_7F4A_7C15)),
        )?;
        if p.is_connected() {
            return Ok(p);
        }
    }
    Err(Error::InvalidParameter(format!(
        "no connected poset after {ATTEMPTS} attempts (n = {n}, p = {edge_prob})"
    )))
}

/// `c0 < c1 > c2 < .. > c0` with `k` points.
pub fn crown(k: usize) -> Result<Poset> {
    if k < 4 || k % 2 == 1 || k > crate::set::MAX_ELEMENTS {
        return Err(Error::InvalidParameter(format!(
            "crown size {k} must be even and at least 4"
        )));
    }
    let names: Vec<String> = (0..k).map(|i| format!("c{i}")).collect();
    let pairs: Vec<(usize, usize)> = (0..k)
        .step_by(2)
        .flat_map(|i| [(i, i + 1), (i, (i + k - 1) % k)])
        .collect();
    Poset::from_index_pairs(names, &pairs)
}

/// `z0 < z1 > z2 < ..` with `n` points.
pub fn fence(n: usize) -> Result<Poset> {
    check_size(n)?;
    let names: Vec<String> = (0..n).map(|i| format!("z{i}")).collect();
    let pairs: Vec<(usize, usize)> = (0..n.saturating_sub(1))
        .map(|i| if i % 2 == 0 { (i, i + 1) } else { (i + 1, i) })
        .collect();
    Poset::from_index_pairs(names, &pairs)
}

pub fn chain(n: usize) -> Result<Poset> {
    check_size(n)?;
    let pairs: Vec<(usize, usize)> = (1..n).map(|i| (i - 1, i)).collect();
    Poset::from_index_pairs(default_names(n), &pairs)
}
