//! Minmax covering pairs, the edge-deleted posets built from them, the
//! component multigraph, and the structural fixed point decision with its
//! leaf policy and certificates.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::extremal::{
    check_necessary, ep_sufficient, find_retract_crown_ep, lift_crown_retraction,
};
use crate::oracle::{fpp_bruteforce, SearchBudget};
use crate::par;
use crate::poset::Poset;
use crate::retract::{i_dismantle, DismantlingStep, PosetMap};
use crate::set::ElemSet;

/// `≺_P`: pairs `a < b` whose interval contains no middle point.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinMaxCovers {
    /// Sorted `(a, b)` pairs.
    pub pairs: Vec<(usize, usize)>,
}

impl MinMaxCovers {
    pub fn contains(&self, a: usize, b: usize) -> bool {
        self.pairs.binary_search(&(a, b)).is_ok()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }
}

pub fn minmax_covers(p: &Poset) -> MinMaxCovers {
    let middle = p.extremal_partition().middle;
    let pairs = p
        .strict_pairs()
        .into_iter()
        .filter(|&(a, b)| p.interval(a, b).is_disjoint(middle))
        .collect();
    MinMaxCovers { pairs }
}

fn without_pairs(p: &Poset, pairs: &[(usize, usize)]) -> Result<Poset> {
    let mut up: Vec<ElemSet> = (0..p.len()).map(|x| p.up(x)).collect();
    for &(a, b) in pairs {
        up[a].remove(b);
    }
    let q = Poset::from_up_sets(p.names().to_vec(), up)?;
    Ok(q)
}

/// `P^(a,b)`: the order with the single pair `a < b` removed.
pub fn delete_edge(p: &Poset, (a, b): (usize, usize)) -> Result<Poset> {
    p.check_index(a)?;
    p.check_index(b)?;
    if !minmax_covers(p).contains(a, b) {
        return Err(Error::NotMinMaxCover(
            p.name(a).to_owned(),
            p.name(b).to_owned(),
        ));
    }
    without_pairs(p, &[(a, b)])
}

/// `P^×` with all minmax covering pairs removed, and its components `𝔎(P)`.
pub fn p_cross(p: &Poset) -> (Poset, Vec<ElemSet>) {
    let q = without_pairs(p, &minmax_covers(p).pairs)
        .expect("removing minmax covers keeps a partial order");
    let components = q.components();
    (q, components)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct GraphEdge {
    pub lower: usize,
    pub upper: usize,
    /// Index into [`ComponentGraph::vertices`].
    pub lower_component: usize,
    pub upper_component: usize,
}

impl GraphEdge {
    pub fn is_loop(&self) -> bool {
        self.lower_component == self.upper_component
    }

    fn ends(&self) -> (usize, usize) {
        let (x, y) = (self.lower_component, self.upper_component);
        (x.min(y), x.max(y))
    }
}

/// `𝔊(P)`: one vertex per component of `P^×`, one edge per minmax covering pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComponentGraph {
    /// Ordered by least element.
    pub vertices: Vec<ElemSet>,
    /// In the order of the sorted minmax covering pairs.
    pub edges: Vec<GraphEdge>,
    pub has_loop: bool,
    pub has_multi_edge: bool,
    pub is_tree: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Obstruction {
    Loop {
        edge: (String, String),
    },
    MultiEdge {
        first: (String, String),
        second: (String, String),
    },
    /// The minmax covering pairs along a cycle of the component graph.
    Cycle {
        edges: Vec<(String, String)>,
    },
    /// The component graph is disconnected.
    Disconnected,
}

impl ComponentGraph {
    pub fn component_of(&self, x: usize) -> usize {
        self.vertices
            .iter()
            .position(|k| k.contains(x))
            .expect("components cover the carrier")
    }

    fn is_connected(&self) -> bool {
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            uf.union(e.lower_component, e.upper_component);
        }
        (0..self.vertices.len()).all(|v| uf.find(v) == uf.find(0))
    }

    /// Why the graph is not a tree without loops and multi-edges, if it is not.
    pub fn obstruction(&self, p: &Poset) -> Option<Obstruction> {
        let named = |e: &GraphEdge| (p.name(e.lower).to_owned(), p.name(e.upper).to_owned());
        if let Some(e) = self.edges.iter().find(|e| e.is_loop()) {
            return Some(Obstruction::Loop { edge: named(e) });
        }
        for (i, e) in self.edges.iter().enumerate() {
            if let Some(f) = self.edges[i + 1..].iter().find(|f| f.ends() == e.ends()) {
                return Some(Obstruction::MultiEdge {
                    first: named(e),
                    second: named(f),
                });
            }
        }
        // the first edge closing a cycle, together with the forest path between its ends
        let n = self.vertices.len();
        let mut uf = UnionFind::new(n);
        let mut forest: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
        for (i, e) in self.edges.iter().enumerate() {
            let (u, v) = e.ends();
            if uf.find(u) == uf.find(v) {
                let mut edges: Vec<(String, String)> = forest_path(&forest, u, v)
                    .into_iter()
                    .map(|j| named(&self.edges[j]))
                    .collect();
                edges.push(named(e));
                return Some(Obstruction::Cycle { edges });
            }
            uf.union(u, v);
            forest[u].push((v, i));
            forest[v].push((u, i));
        }
        (!self.is_connected()).then_some(Obstruction::Disconnected)
    }

    /// For every vertex, the edge leaving it towards `root` in the tree (`None` at the root).
    fn towards(&self, root: usize) -> Vec<Option<usize>> {
        let n = self.vertices.len();
        let mut parent_edge = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            for (i, e) in self.edges.iter().enumerate() {
                let (a, b) = (e.lower_component, e.upper_component);
                let w = if a == v {
                    b
                } else if b == v {
                    a
                } else {
                    continue;
                };
                if !seen[w] {
                    seen[w] = true;
                    parent_edge[w] = Some(i);
                    stack.push(w);
                }
            }
        }
        parent_edge
    }

    /// The tree retraction of `P` onto `P|_K` for the vertex `k`: every other
    /// component goes to the endpoint in `K` of the first edge on its path from `K`.
    pub fn retraction_onto(&self, p: &Poset, k: usize) -> Result<PosetMap> {
        if !self.is_tree {
            return Err(Error::InvalidParameter(
                "component graph is not a tree".into(),
            ));
        }
        let parent_edge = self.towards(k);
        let endpoint_in = |e: &GraphEdge, v: usize| {
            if e.lower_component == v {
                e.lower
            } else {
                e.upper
            }
        };
        // the vertex adjacent to k on the path from k to v
        let first_hop = |mut v: usize| -> usize {
            loop {
                let e = &self.edges[parent_edge[v].expect("tree is connected")];
                let w = if e.lower_component == v {
                    e.upper_component
                } else {
                    e.lower_component
                };
                if w == k {
                    return v;
                }
                v = w;
            }
        };
        let (target, emb) = p.induced_with_indices(self.vertices[k])?;
        let local = |x: usize| {
            emb.iter()
                .position(|&y| y == x)
                .expect("point of the component")
        };
        let assignment = (0..p.len())
            .map(|x| {
                let v = self.component_of(x);
                if v == k {
                    return local(x);
                }
                let hop = first_hop(v);
                let e = &self.edges[parent_edge[hop].unwrap()];
                local(endpoint_in(e, k))
            })
            .collect();
        PosetMap::new(p.clone(), target, assignment)
    }
}

fn forest_path(forest: &[Vec<(usize, usize)>], from: usize, to: usize) -> Vec<usize> {
    let mut back: Vec<Option<(usize, usize)>> = vec![None; forest.len()];
    let mut seen = vec![false; forest.len()];
    seen[from] = true;
    let mut queue = std::collections::VecDeque::from([from]);
    while let Some(v) = queue.pop_front() {
        for &(w, e) in &forest[v] {
            if !seen[w] {
                seen[w] = true;
                back[w] = Some((v, e));
                queue.push_back(w);
            }
        }
    }
    let mut path = Vec::new();
    let mut v = to;
    while let Some((u, e)) = back[v] {
        path.push(e);
        v = u;
    }
    path.reverse();
    path
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, x: usize, y: usize) {
        let (rx, ry) = (self.find(x), self.find(y));
        self.0[rx.max(ry)] = rx.min(ry);
    }
}

pub fn component_graph(p: &Poset) -> ComponentGraph {
    let covers = minmax_covers(p);
    let (_, vertices) = p_cross(p);
    let comp_of = |x: usize| vertices.iter().position(|k| k.contains(x)).unwrap();
    let edges: Vec<GraphEdge> = covers
        .pairs
        .iter()
        .map(|&(a, b)| GraphEdge {
            lower: a,
            upper: b,
            lower_component: comp_of(a),
            upper_component: comp_of(b),
        })
        .collect();
    let has_loop = edges.iter().any(GraphEdge::is_loop);
    let mut ends: Vec<(usize, usize)> = edges.iter().map(GraphEdge::ends).collect();
    ends.sort_unstable();
    let has_multi_edge = ends.windows(2).any(|w| w[0] == w[1]);
    let mut graph = ComponentGraph {
        vertices,
        edges,
        has_loop,
        has_multi_edge,
        is_tree: false,
    };
    graph.is_tree =
        !has_loop && graph.edges.len() + 1 == graph.vertices.len() && graph.is_connected();
    graph
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Split {
    pub disconnects: bool,
    /// Components of `P^(a,b)`, ordered by least element.
    pub parts: Vec<ElemSet>,
}

/// Removes the minmax cover `(a, b)` from a connected poset and reports the pieces.
pub fn schroeder_split(p: &Poset, edge: (usize, usize)) -> Result<Split> {
    if !p.is_connected() {
        return Err(Error::NotConnected);
    }
    let q = delete_edge(p, edge)?;
    let parts = q.components();
    Ok(Split {
        disconnects: parts.len() > 1,
        parts,
    })
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Component graph recursion; leaves only by the oracle-free rules.
    Structural,
    /// Component graph recursion with the full leaf policy.
    #[default]
    Auto,
    /// Brute force on the whole poset.
    Oracle,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn as_bool(self) -> Option<bool> {
        match self {
            Verdict::True => Some(true),
            Verdict::False => Some(false),
            Verdict::Unknown => None,
        }
    }

    fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

/// How a trace node was decided.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Rule {
    SinglePoint,
    /// Loop, multi-edge or cycle in the component graph.
    GraphObstruction,
    /// All components of the tree decided.
    TreeDecomposition,
    /// `E(P)` is crown-free.
    ExtremalCrownFree,
    /// I-dismantlable to one point.
    Dismantlable,
    /// A crown of `E(P)` with six or more points lifts to a retract of `P`.
    LiftedRetractCrown,
    /// An edge of a crown in `E(P)` lacks the required 4-crown witness.
    NecessaryConditionFailed,
    Oracle,
    Undecided,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ComponentRetraction {
    pub component: Vec<String>,
    pub map: Vec<(String, String)>,
    pub verified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceNode {
    pub elements: Vec<String>,
    pub verdict: Verdict,
    pub rule: Rule,
    pub detail: String,
    /// I-retractions certifying a dismantlable leaf.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub dismantling: Vec<DismantlingStep>,
    /// Retractions onto every component, materialized when the node has the fixed point property.
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub retractions: Vec<ComponentRetraction>,
    pub children: Vec<TraceNode>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// A fixed-point-free order endomorphism of the input.
    FixedPointFreeMap {
        map: Vec<(String, String)>,
    },
    /// The component graph of some node is not a tree without loops and multi-edges.
    GraphObstruction {
        elements: Vec<String>,
        obstruction: Obstruction,
    },
    /// Failed necessary condition on a leaf, no map found within budget.
    NecessaryCondition {
        elements: Vec<String>,
        edges: Vec<(String, String)>,
    },
    /// The tree decomposition; each leaf proof is recorded in the trace.
    Decomposition {
        components: Vec<Vec<String>>,
        tree_edges: Vec<(String, String)>,
    },
    None {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnalysisReport {
    pub verdict: Verdict,
    pub method: Method,
    pub certificate: Certificate,
    pub trace: TraceNode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DecideOptions {
    pub method: Method,
    pub budget: SearchBudget,
    /// Leaves larger than this are never sent to the oracle.
    pub oracle_max_elements: usize,
}

impl Default for DecideOptions {
    fn default() -> Self {
        DecideOptions {
            method: Method::Auto,
            budget: SearchBudget::default(),
            oracle_max_elements: 16,
        }
    }
}

impl DecideOptions {
    pub fn with_method(method: Method) -> Self {
        DecideOptions {
            method,
            ..Self::default()
        }
    }
}

struct NodeOutcome {
    trace: TraceNode,
    /// Fixed-point-free endomorphism of the node's poset.
    witness: Option<Vec<usize>>,
    certificate: Option<Certificate>,
}

fn node(p: &Poset, verdict: Verdict, rule: Rule, detail: impl Into<String>) -> TraceNode {
    TraceNode {
        elements: p.names().to_vec(),
        verdict,
        rule,
        detail: detail.into(),
        dismantling: Vec::new(),
        retractions: Vec::new(),
        children: Vec::new(),
    }
}

/// Decides the fixed point property of a connected poset.
pub fn decide_fpp(p: &Poset, options: DecideOptions) -> Result<AnalysisReport> {
    if !p.is_connected() {
        return Err(Error::NotConnected);
    }
    let outcome = match options.method {
        Method::Oracle => {
            let v = fpp_bruteforce(p, options.budget)?;
            let detail = format!("exhaustive search, {} nodes", v.nodes);
            NodeOutcome {
                trace: node(p, Verdict::from_bool(v.fpp), Rule::Oracle, detail),
                witness: v.witness.map(|w| w.assignment().to_vec()),
                certificate: None,
            }
        }
        _ => decide_node(p, &options)?,
    };
    let verdict = outcome.trace.verdict;
    let certificate = match (verdict, outcome.witness) {
        (Verdict::False, Some(w)) => {
            let map = PosetMap::endomorphism(p, w)?;
            if !map.is_homomorphism() || !map.fixed_points().is_empty() {
                return Err(Error::InvariantViolated(
                    "witness is not a fixed-point-free endomorphism".into(),
                ));
            }
            Certificate::FixedPointFreeMap {
                map: map.named_pairs(),
            }
        }
        (Verdict::False, None) => outcome
            .certificate
            .ok_or_else(|| Error::InvariantViolated("false verdict without certificate".into()))?,
        (Verdict::True, _) => {
            let graph = component_graph(p);
            Certificate::Decomposition {
                components: graph.vertices.iter().map(|&k| p.names_of(k)).collect(),
                tree_edges: graph
                    .edges
                    .iter()
                    .map(|e| (p.name(e.lower).to_owned(), p.name(e.upper).to_owned()))
                    .collect(),
            }
        }
        (Verdict::Unknown, _) => Certificate::None {
            reason: outcome.trace.detail.clone(),
        },
    };
    Ok(AnalysisReport {
        verdict,
        method: options.method,
        certificate,
        trace: outcome.trace,
    })
}

fn decide_node(p: &Poset, options: &DecideOptions) -> Result<NodeOutcome> {
    if p.len() == 1 {
        return Ok(NodeOutcome {
            trace: node(p, Verdict::True, Rule::SinglePoint, "a single point"),
            witness: None,
            certificate: None,
        });
    }
    let graph = component_graph(p);
    if let Some(obstruction) = graph.obstruction(p) {
        let detail = format!("component graph: {obstruction:?}");
        return Ok(NodeOutcome {
            trace: node(p, Verdict::False, Rule::GraphObstruction, detail),
            witness: None,
            certificate: Some(Certificate::GraphObstruction {
                elements: p.names().to_vec(),
                obstruction,
            }),
        });
    }
    if graph.vertices.len() == 1 {
        return decide_leaf(p, options);
    }

    let parts: Vec<(Poset, Vec<usize>)> = graph
        .vertices
        .iter()
        .map(|&k| p.induced_with_indices(k))
        .collect::<Result<_>>()?;
    let children = par::map(&parts, |(q, _)| decide_node(q, options));
    let children: Vec<NodeOutcome> = children.into_iter().collect::<Result<_>>()?;

    let mut trace = node(
        p,
        Verdict::True,
        Rule::TreeDecomposition,
        format!("{} components", parts.len()),
    );
    if let Some(i) = children
        .iter()
        .position(|c| c.trace.verdict == Verdict::False)
    {
        trace.verdict = Verdict::False;
        trace.detail = format!("component {} lacks the fixed point property", i + 1);
        let mut witness = None;
        if let Some(h) = &children[i].witness {
            // emb ∘ h ∘ ρ_K has no fixed point: inside K by h, outside K since the image is in K
            let rho = graph.retraction_onto(p, i)?;
            let emb = &parts[i].1;
            witness = Some((0..p.len()).map(|x| emb[h[rho.apply(x)]]).collect());
        }
        let certificate = children[i].certificate.clone();
        trace.children = children.into_iter().map(|c| c.trace).collect();
        return Ok(NodeOutcome {
            trace,
            witness,
            certificate,
        });
    }
    if children.iter().any(|c| c.trace.verdict == Verdict::Unknown) {
        trace.verdict = Verdict::Unknown;
        trace.detail = "some component is undecided".into();
        trace.children = children.into_iter().map(|c| c.trace).collect();
        return Ok(NodeOutcome {
            trace,
            witness: None,
            certificate: None,
        });
    }
    for (i, &k) in graph.vertices.iter().enumerate() {
        let rho = graph.retraction_onto(p, i)?;
        let verified = rho.is_retraction();
        if !verified {
            return Err(Error::InvariantViolated(format!(
                "tree map onto component {} is not a retraction",
                i + 1
            )));
        }
        trace.retractions.push(ComponentRetraction {
            component: p.names_of(k),
            map: rho.named_pairs(),
            verified,
        });
    }
    trace.children = children.into_iter().map(|c| c.trace).collect();
    Ok(NodeOutcome {
        trace,
        witness: None,
        certificate: None,
    })
}

/// Cheapest test first: crown-free `E(P)`, dismantling, a lifted retract
/// crown, the necessary conditions, then (in auto mode) the oracle.
fn decide_leaf(p: &Poset, options: &DecideOptions) -> Result<NodeOutcome> {
    let ep = ep_sufficient(p)?;
    if ep.applies {
        let mut trace = node(
            p,
            Verdict::True,
            Rule::ExtremalCrownFree,
            "extremal points contain no crown",
        );
        trace.dismantling = ep.trace.map(|t| t.steps).unwrap_or_default();
        return Ok(NodeOutcome {
            trace,
            witness: None,
            certificate: None,
        });
    }
    let dismantled = i_dismantle(p);
    if dismantled.core_is_singleton() {
        let mut trace = node(
            p,
            Verdict::True,
            Rule::Dismantlable,
            "I-dismantlable to a single point",
        );
        trace.dismantling = dismantled.steps;
        return Ok(NodeOutcome {
            trace,
            witness: None,
            certificate: None,
        });
    }
    if let Some((crown, r)) = find_retract_crown_ep(p)? {
        if crown.cardinality() > 4 {
            let rho = lift_crown_retraction(p, &crown, &r)?;
            let ambient = rho.ambient_assignment().ok_or(Error::NotRetraction)?;
            let witness: Vec<usize> = ambient
                .iter()
                .map(|&y| crown.rotation(y).expect("image on the crown"))
                .collect();
            let detail = format!("retract crown {}", crown.display(p));
            return Ok(NodeOutcome {
                trace: node(p, Verdict::False, Rule::LiftedRetractCrown, detail),
                witness: Some(witness),
                certificate: None,
            });
        }
    }
    let necessary = check_necessary(p)?;
    let oracle_allowed = options.method == Method::Auto && p.len() <= options.oracle_max_elements;
    if !necessary.violations.is_empty() {
        let edges: Vec<(String, String)> = necessary
            .violations
            .iter()
            .map(|v| (p.name(v.edge.0).to_owned(), p.name(v.edge.1).to_owned()))
            .collect();
        let detail = format!(
            "{} crown edges without the required 4-crown witness",
            edges.len()
        );
        let witness = if oracle_allowed {
            match fpp_bruteforce(p, options.budget) {
                Ok(v) if v.fpp => {
                    return Err(Error::InvariantViolated(
                        "necessary condition fails on a poset with the fixed point property".into(),
                    ))
                }
                Ok(v) => v.witness.map(|w| w.assignment().to_vec()),
                Err(Error::BudgetExceeded { .. }) => None,
                Err(e) => return Err(e),
            }
        } else {
            None
        };
        return Ok(NodeOutcome {
            trace: node(p, Verdict::False, Rule::NecessaryConditionFailed, detail),
            witness,
            certificate: Some(Certificate::NecessaryCondition {
                elements: p.names().to_vec(),
                edges,
            }),
        });
    }
    if oracle_allowed {
        match fpp_bruteforce(p, options.budget) {
            Ok(v) => {
                let detail = format!("exhaustive search, {} nodes", v.nodes);
                return Ok(NodeOutcome {
                    trace: node(p, Verdict::from_bool(v.fpp), Rule::Oracle, detail),
                    witness: v.witness.map(|w| w.assignment().to_vec()),
                    certificate: None,
                });
            }
            Err(Error::BudgetExceeded { max_nodes }) => {
                let detail = format!("oracle budget of {max_nodes} nodes exhausted");
                return Ok(NodeOutcome {
                    trace: node(p, Verdict::Unknown, Rule::Undecided, detail),
                    witness: None,
                    certificate: None,
                });
            }
            Err(e) => return Err(e),
        }
    }
    let detail = if options.method == Method::Auto {
        format!(
            "{} elements exceed the oracle limit of {}",
            p.len(),
            options.oracle_max_elements
        )
    } else {
        "no oracle-free rule applies".to_owned()
    };
    Ok(NodeOutcome {
        trace: node(p, Verdict::Unknown, Rule::Undecided, detail),
        witness: None,
        certificate: None,
    })
}
