//! Estimated weighted digraphs.
//!
//! An instance is a digraph whose true edge costs are hidden. Every edge
//! carries an ordered, non-empty list of estimator levels; applying level `i`
//! yields an interval `[l, u]` containing the true cost, and later levels
//! return nested (tighter) intervals at a higher price.

mod cache;
mod format;

use std::collections::{HashMap, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::scalar::Scalar;

pub use cache::EstimationCache;
pub use format::{parse_instance, serialize_instance};

/// Index of an edge in [`ProblemInstance::edges`].
pub type EdgeId = usize;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub String);

impl NodeId {
    pub fn new(label: impl Into<String>) -> Self {
        NodeId(label.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for NodeId {
    fn from(label: &str) -> Self {
        NodeId(label.to_owned())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EstimatorLevel<T> {
    pub l: T,
    pub u: T,
}

impl<T: Scalar> EstimatorLevel<T> {
    pub fn new(l: T, u: T) -> Self {
        EstimatorLevel { l, u }
    }

    /// Whether `self` lies inside `outer`.
    pub fn within(&self, outer: &EstimatorLevel<T>) -> bool {
        outer.l <= self.l && self.u <= outer.u
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeSpec<T> {
    pub from: NodeId,
    pub to: NodeId,
    pub levels: Vec<EstimatorLevel<T>>,
    pub true_cost: Option<T>,
}

impl<T: Scalar> EdgeSpec<T> {
    pub fn new(from: impl Into<NodeId>, to: impl Into<NodeId>, levels: Vec<EstimatorLevel<T>>) -> Self {
        EdgeSpec { from: from.into(), to: to.into(), levels, true_cost: None }
    }

    pub fn with_true_cost(mut self, cost: T) -> Self {
        self.true_cost = Some(cost);
        self
    }

    /// Number of estimator levels, `k(e)`.
    pub fn level_count(&self) -> usize {
        self.levels.len()
    }

    /// Bounds of the final (tightest) level.
    pub fn tightest(&self) -> &EstimatorLevel<T> {
        self.levels.last().expect("edge has no estimator levels")
    }

    pub fn label(&self) -> String {
        format!("{}->{}", self.from, self.to)
    }
}

impl From<String> for NodeId {
    fn from(label: String) -> Self {
        NodeId(label)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProblemInstance<T> {
    pub name: String,
    pub nodes: Vec<NodeId>,
    pub edges: Vec<EdgeSpec<T>>,
    pub source: NodeId,
    pub goals: Vec<NodeId>,
}

/// One failed instance invariant.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateNode { node: NodeId },
    UnknownNode { context: String, node: NodeId },
    NoGoals,
    NoLevels { edge: EdgeId },
    NegativeBound { edge: EdgeId, level: usize },
    InvertedLevel { edge: EdgeId, level: usize },
    NotNested { edge: EdgeId, level: usize },
    NegativeTrueCost { edge: EdgeId },
    TrueCostOutside { edge: EdgeId },
    ParallelEdge { edge: EdgeId, first: EdgeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateNode { node } => write!(f, "duplicate node {node}"),
            Violation::UnknownNode { context, node } => write!(f, "{context} refers to unknown node {node}"),
            Violation::NoGoals => f.write_str("goal set is empty"),
            Violation::NoLevels { edge } => write!(f, "edge #{edge}: no estimator levels"),
            Violation::NegativeBound { edge, level } => write!(f, "edge #{edge} level {level}: negative bound"),
            Violation::InvertedLevel { edge, level } => write!(f, "edge #{edge} level {level}: l > u"),
            Violation::NotNested { edge, level } => write!(f, "edge #{edge} level {level}: levels not nested"),
            Violation::NegativeTrueCost { edge } => write!(f, "edge #{edge}: negative true cost"),
            Violation::TrueCostOutside { edge } => write!(f, "edge #{edge}: true cost outside tightest interval"),
            Violation::ParallelEdge { edge, first } => write!(f, "edge #{edge}: parallel edge (duplicates edge #{first})"),
        }
    }
}

#[derive(Debug, Error)]
pub enum EwdgError {
    #[error("syntax error at line {line}, column {column}: {message}")]
    Syntax { line: usize, column: usize, message: String },
    #[error("schema error in `{field}`: {message}")]
    Schema { field: String, message: String },
    #[error("invalid instance: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    Invalid(Vec<Violation>),
    #[error("no estimators remain for edge #{edge}")]
    EscalationExhausted { edge: EdgeId },
    #[error("edge #{edge} does not exist")]
    UnknownEdge { edge: EdgeId },
    #[error("path is not contiguous at position {position}")]
    NonContiguousPath { position: usize },
}

impl<T: Scalar> ProblemInstance<T> {
    /// Checks every instance invariant and reports all violations found.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        let mut known = HashSet::new();
        for node in &self.nodes {
            if !known.insert(node) {
                violations.push(Violation::DuplicateNode { node: node.clone() });
            }
        }
        let check_node = |context: String, node: &NodeId, out: &mut Vec<Violation>| {
            if !known.contains(node) {
                out.push(Violation::UnknownNode { context, node: node.clone() });
            }
        };
        check_node("source".into(), &self.source, &mut violations);
        if self.goals.is_empty() {
            violations.push(Violation::NoGoals);
        }
        for goal in &self.goals {
            check_node("goals".into(), goal, &mut violations);
        }

        let mut pairs: HashMap<(&NodeId, &NodeId), EdgeId> = HashMap::new();
        for (id, edge) in self.edges.iter().enumerate() {
            check_node(format!("edge #{id} from"), &edge.from, &mut violations);
            check_node(format!("edge #{id} to"), &edge.to, &mut violations);
            if let Some(&first) = pairs.get(&(&edge.from, &edge.to)) {
                violations.push(Violation::ParallelEdge { edge: id, first });
            } else {
                pairs.insert((&edge.from, &edge.to), id);
            }
            if edge.levels.is_empty() {
                violations.push(Violation::NoLevels { edge: id });
                continue;
            }
            for (i, level) in edge.levels.iter().enumerate() {
                let level_no = i + 1;
                if level.l < T::zero() || level.u < T::zero() {
                    violations.push(Violation::NegativeBound { edge: id, level: level_no });
                }
                if level.l > level.u {
                    violations.push(Violation::InvertedLevel { edge: id, level: level_no });
                }
                if i > 0 && !level.within(&edge.levels[i - 1]) {
                    violations.push(Violation::NotNested { edge: id, level: level_no });
                }
            }
            if let Some(cost) = &edge.true_cost {
                if *cost < T::zero() {
                    violations.push(Violation::NegativeTrueCost { edge: id });
                }
                let tight = edge.tightest();
                if *cost < tight.l || *cost > tight.u {
                    violations.push(Violation::TrueCostOutside { edge: id });
                }
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    pub fn edge(&self, id: EdgeId) -> Result<&EdgeSpec<T>, EwdgError> {
        self.edges.get(id).ok_or(EwdgError::UnknownEdge { edge: id })
    }

    /// Edge id for the ordered pair `(from, to)`, if present.
    pub fn find_edge(&self, from: &str, to: &str) -> Option<EdgeId> {
        self.edges.iter().position(|e| e.from.as_str() == from && e.to.as_str() == to)
    }

    /// Fails with [`EwdgError::NonContiguousPath`] if consecutive edges do
    /// not share endpoints.
    pub fn check_contiguous(&self, path: &[EdgeId]) -> Result<(), EwdgError> {
        for (position, pair) in path.windows(2).enumerate() {
            if self.edge(pair[0])?.to != self.edge(pair[1])?.from {
                return Err(EwdgError::NonContiguousPath { position: position + 1 });
            }
        }
        if let Some(&last) = path.last() {
            self.edge(last)?;
        }
        Ok(())
    }

    /// Renders a path as `v0->v1->v4`; the empty path renders as the source.
    pub fn path_label(&self, path: &[EdgeId]) -> String {
        let mut out = match path.first() {
            Some(&first) => self.edges[first].from.to_string(),
            None => self.source.to_string(),
        };
        for &id in path {
            out.push_str("->");
            out.push_str(self.edges[id].to.as_str());
        }
        out
    }
}

/// Component-wise sum of tight edge bounds along a path.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PathBounds<T> {
    pub l: T,
    pub u: T,
}

impl<T: Scalar> PathBounds<T> {
    pub fn zero() -> Self {
        PathBounds { l: T::zero(), u: T::zero() }
    }
}

impl<T: Scalar> std::ops::Add for PathBounds<T> {
    type Output = PathBounds<T>;

    fn add(self, rhs: Self) -> Self {
        PathBounds { l: self.l + rhs.l, u: self.u + rhs.u }
    }
}

/// Sums the tightest bounds along `path`, escalating each edge through the
/// cache so every estimator application is counted.
pub fn path_bounds<T: Scalar>(
    inst: &ProblemInstance<T>,
    path: &[EdgeId],
    cache: &mut EstimationCache<T>,
) -> Result<PathBounds<T>, EwdgError> {
    inst.check_contiguous(path)?;
    let mut total = PathBounds::zero();
    for &id in path {
        let (l, u) = cache.tight_edge_bounds(inst, id)?;
        total.l = total.l + l;
        total.u = total.u + u;
    }
    Ok(total)
}

/// Adjacency view over a validated instance, with node indices and
/// successor lists in edge declaration order.
#[derive(Debug)]
pub struct SearchGraph<'a, T> {
    inst: &'a ProblemInstance<T>,
    source: usize,
    is_goal: Vec<bool>,
    out_edges: Vec<Vec<EdgeId>>,
    edge_ends: Vec<(usize, usize)>,
}

impl<'a, T: Scalar> SearchGraph<'a, T> {
    pub fn new(inst: &'a ProblemInstance<T>) -> Result<Self, EwdgError> {
        inst.validate().map_err(EwdgError::Invalid)?;
        let index: HashMap<&NodeId, usize> = inst.nodes.iter().enumerate().map(|(i, n)| (n, i)).collect();
        let mut out_edges = vec![Vec::new(); inst.nodes.len()];
        let mut edge_ends = Vec::with_capacity(inst.edges.len());
        for (id, edge) in inst.edges.iter().enumerate() {
            let (from, to) = (index[&edge.from], index[&edge.to]);
            out_edges[from].push(id);
            edge_ends.push((from, to));
        }
        let mut is_goal = vec![false; inst.nodes.len()];
        for goal in &inst.goals {
            is_goal[index[goal]] = true;
        }
        Ok(SearchGraph { inst, source: index[&inst.source], is_goal, out_edges, edge_ends })
    }

    pub fn instance(&self) -> &'a ProblemInstance<T> {
        self.inst
    }

    pub fn node_count(&self) -> usize {
        self.is_goal.len()
    }

    pub fn source(&self) -> usize {
        self.source
    }

    pub fn is_goal(&self, node: usize) -> bool {
        self.is_goal[node]
    }

    pub fn out_edges(&self, node: usize) -> &[EdgeId] {
        &self.out_edges[node]
    }

    pub fn head(&self, edge: EdgeId) -> usize {
        self.edge_ends[edge].1
    }

    pub fn tail(&self, edge: EdgeId) -> usize {
        self.edge_ends[edge].0
    }

    pub fn node_name(&self, node: usize) -> &str {
        self.inst.nodes[node].as_str()
    }
}
