//! Exhaustive ground truth for small instances.
//!
//! Every bound is non-negative, so removing a cycle from a path never
//! increases its lower or upper bound sum. The minima over all paths are
//! therefore attained by simple paths, and enumerating simple paths is exact.

use thiserror::Error;

use crate::ewdg::{EdgeId, EwdgError, ProblemInstance};
use crate::scalar::{Extended, Scalar};

pub const DEFAULT_NODE_LIMIT: usize = 14;

#[derive(Debug, Error)]
pub enum OracleError {
    #[error("instance has {nodes} nodes, above the oracle limit of {limit}")]
    TooLarge { nodes: usize, limit: usize },
    #[error("lower bound {l} exceeds upper bound {u}")]
    Domain { l: String, u: String },
    #[error("not a solution path: {0}")]
    InvalidPath(String),
    #[error(transparent)]
    Instance(#[from] EwdgError),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult<T> {
    pub l_star: Extended<T>,
    pub u_star: Extended<T>,
    pub b_star: Extended<T>,
    pub slb_witness: Option<Vec<EdgeId>>,
    pub sub_witness: Option<Vec<EdgeId>>,
}

/// Depth-first iterator over simple source-to-goal paths.
///
/// Paths come out in lexicographic order of edge declaration indices; a path
/// that reaches a goal is yielded before its extensions.
pub struct SimplePaths<'a, T> {
    inst: &'a ProblemInstance<T>,
    out: Vec<Vec<EdgeId>>,
    heads: Vec<usize>,
    goal: Vec<bool>,
    on_path: Vec<bool>,
    // (node, next successor slot) per depth
    stack: Vec<(usize, usize)>,
    path: Vec<EdgeId>,
    pending: bool,
}

impl<T: Scalar> Iterator for SimplePaths<'_, T> {
    type Item = Vec<EdgeId>;

    fn next(&mut self) -> Option<Vec<EdgeId>> {
        loop {
            if self.pending {
                self.pending = false;
                let node = self.stack.last()?.0;
                if self.goal[node] {
                    return Some(self.path.clone());
                }
            }
            let (node, slot) = self.stack.last_mut()?;
            let node = *node;
            if *slot < self.out[node].len() {
                let edge = self.out[node][*slot];
                *slot += 1;
                let head = self.heads[edge];
                if !self.on_path[head] {
                    self.on_path[head] = true;
                    self.stack.push((head, 0));
                    self.path.push(edge);
                    self.pending = true;
                }
            } else {
                self.on_path[node] = false;
                self.stack.pop();
                self.path.pop();
                if self.stack.is_empty() {
                    return None;
                }
            }
        }
    }
}

impl<T> SimplePaths<'_, T> {
    pub fn instance(&self) -> &ProblemInstance<T> {
        self.inst
    }
}

pub fn enumerate_simple_paths<T: Scalar>(
    inst: &ProblemInstance<T>,
    node_limit: usize,
) -> Result<SimplePaths<'_, T>, OracleError> {
    inst.validate().map_err(|v| OracleError::Instance(EwdgError::Invalid(v)))?;
    if inst.nodes.len() > node_limit {
        return Err(OracleError::TooLarge { nodes: inst.nodes.len(), limit: node_limit });
    }
    let position = |id: &crate::ewdg::NodeId| inst.nodes.iter().position(|n| n == id).expect("validated");
    let mut out = vec![Vec::new(); inst.nodes.len()];
    let mut heads = Vec::with_capacity(inst.edges.len());
    for (id, edge) in inst.edges.iter().enumerate() {
        out[position(&edge.from)].push(id);
        heads.push(position(&edge.to));
    }
    let mut goal = vec![false; inst.nodes.len()];
    for g in &inst.goals {
        goal[position(g)] = true;
    }
    let source = position(&inst.source);
    let mut on_path = vec![false; inst.nodes.len()];
    on_path[source] = true;
    Ok(SimplePaths {
        inst,
        out,
        heads,
        goal,
        on_path,
        stack: vec![(source, 0)],
        path: Vec::new(),
        pending: true,
    })
}

fn tight_sums<T: Scalar>(inst: &ProblemInstance<T>, path: &[EdgeId]) -> (T, T) {
    path.iter().fold((T::zero(), T::zero()), |(l, u), &id| {
        let tight = inst.edges[id].tightest();
        (l + tight.l.clone(), u + tight.u.clone())
    })
}

fn minimize<T: Scalar>(
    inst: &ProblemInstance<T>,
    node_limit: usize,
    pick: impl Fn((T, T)) -> T,
) -> Result<(Extended<T>, Option<Vec<EdgeId>>), OracleError> {
    let mut best: Option<(T, Vec<EdgeId>)> = None;
    for path in enumerate_simple_paths(inst, node_limit)? {
        let value = pick(tight_sums(inst, &path));
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, path));
        }
    }
    Ok(match best {
        Some((value, path)) => (Extended::Finite(value), Some(path)),
        None => (Extended::Infinite, None),
    })
}

/// `L*` and the first path attaining it.
pub fn oracle_slb<T: Scalar>(
    inst: &ProblemInstance<T>,
    node_limit: usize,
) -> Result<(Extended<T>, Option<Vec<EdgeId>>), OracleError> {
    minimize(inst, node_limit, |(l, _)| l)
}

/// `U*` and the first path attaining it.
pub fn oracle_sub<T: Scalar>(
    inst: &ProblemInstance<T>,
    node_limit: usize,
) -> Result<(Extended<T>, Option<Vec<EdgeId>>), OracleError> {
    minimize(inst, node_limit, |(_, u)| u)
}

/// `B* = U*/L*`, with `1` when the bounds coincide and `∞` when `L* = 0 < U*`
/// or there is no solution.
pub fn combine_bstar<T: Scalar>(l_star: &Extended<T>, u_star: &Extended<T>) -> Result<Extended<T>, OracleError> {
    if l_star > u_star {
        return Err(OracleError::Domain { l: l_star.to_string(), u: u_star.to_string() });
    }
    Ok(match (l_star, u_star) {
        (Extended::Infinite, _) | (_, Extended::Infinite) => Extended::Infinite,
        (Extended::Finite(l), Extended::Finite(u)) if l == u => Extended::Finite(T::one()),
        (Extended::Finite(l), _) if l.is_zero() => Extended::Infinite,
        (Extended::Finite(l), Extended::Finite(u)) => Extended::Finite(u.clone() / l.clone()),
    })
}

pub fn solve<T: Scalar>(inst: &ProblemInstance<T>, node_limit: usize) -> Result<OracleResult<T>, OracleError> {
    let (l_star, slb_witness) = oracle_slb(inst, node_limit)?;
    let (u_star, sub_witness) = oracle_sub(inst, node_limit)?;
    let b_star = combine_bstar(&l_star, &u_star)?;
    Ok(OracleResult { l_star, u_star, b_star, slb_witness, sub_witness })
}

/// Whether `path` is `factor`-admissible: `u_Θ(path) ≤ L* · factor`.
pub fn check_admissible<T: Scalar>(
    inst: &ProblemInstance<T>,
    path: &[EdgeId],
    factor: &T,
    node_limit: usize,
) -> Result<bool, OracleError> {
    inst.check_contiguous(path)?;
    let start = path.first().map_or(&inst.source, |&e| &inst.edges[e].from);
    let end = path.last().map_or(&inst.source, |&e| &inst.edges[e].to);
    if *start != inst.source {
        return Err(OracleError::InvalidPath(format!("starts at {start}, not the source")));
    }
    if !inst.goals.contains(end) {
        return Err(OracleError::InvalidPath(format!("ends at {end}, which is not a goal")));
    }
    let (_, upper) = tight_sums(inst, path);
    let l_star = oracle_slb(inst, node_limit)?.0.into_finite().expect("a solution path exists");
    Ok(upper <= l_star * factor.clone())
}
