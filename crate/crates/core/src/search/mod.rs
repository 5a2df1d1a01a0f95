//! Best-first search on estimated weighted digraphs.
//!
//! All algorithms share one skeleton: pop the OPEN node with minimal key,
//! stop on a goal, close it, and relax every outgoing edge in declaration
//! order. They differ only in how an edge is relaxed, i.e. how far its
//! estimators are escalated and which bound feeds the successor key:
//!
//! * [`ei_ucs`] applies every encountered edge's final estimator and keys on
//!   upper bounds.
//! * [`beast`] keys on upper bounds and escalates lazily, stopping as soon as
//!   the current lower bound shows the edge cannot improve the successor or
//!   would exceed `u_prune`.
//! * [`beauty`] keys on tight lower bounds and stops escalating once a loose
//!   lower bound already loses to the successor's current key.
//! * [`beauty_and_beast`] solves the lower-bound problem first and feeds the
//!   SLB path's upper bound to `beast` as its pruning threshold.
//!
//! OPEN ties are broken by insertion order, so runs are fully deterministic.

mod open;
mod relax;
mod tasp;
mod trace;

use std::time::Instant;

use serde::Serialize;

use crate::ewdg::{EdgeId, EstimationCache, SearchGraph};
use crate::scalar::{Extended, Scalar};

use open::OpenList;
use relax::{Outcome, Rule};

pub use tasp::{beauty_and_beast, TaspOptions, TaspReport};
pub use trace::{PruneReason, TraceEvent};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Found,
    NoSolution,
    TimedOut,
}

#[derive(Clone, Debug, Default)]
pub struct SearchOptions {
    /// Record an event log in the report.
    pub trace: bool,
    /// BEAST only: with `u_prune = ∞`, edges into never-seen nodes go
    /// straight to their final estimator instead of escalating level by level.
    pub jump_new_to_final: bool,
    pub deadline: Option<Instant>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveReport<T> {
    pub status: Status,
    pub path: Vec<EdgeId>,
    pub bound: Extended<T>,
    /// OPEN pops.
    pub expanded: u64,
    /// Successor edges considered.
    pub generated: u64,
    /// Rejections caused by the pruning threshold.
    pub pruned: u64,
    /// Estimator invocations per level (index 0 is level 1).
    pub counters: Vec<u64>,
    /// Final-level estimator invocations.
    pub theta_max: u64,
    pub trace: Option<Vec<TraceEvent<T>>>,
}

impl<T: Scalar> SolveReport<T> {
    pub fn found(&self) -> bool {
        self.status == Status::Found
    }

    /// Event log, one record per line.
    pub fn trace_text(&self) -> String {
        let mut out = String::new();
        for event in self.trace.iter().flatten() {
            out.push_str(&event.to_string());
            out.push('\n');
        }
        out
    }

    pub fn counter(&self, level: usize) -> u64 {
        self.counters.get(level.wrapping_sub(1)).copied().unwrap_or(0)
    }

    fn empty(status: Status) -> Self {
        SolveReport {
            status,
            path: Vec::new(),
            bound: Extended::Infinite,
            expanded: 0,
            generated: 0,
            pruned: 0,
            counters: Vec::new(),
            theta_max: 0,
            trace: None,
        }
    }
}

/// Uniform-cost search on upper bounds that applies the final estimator of
/// every edge it encounters.
pub fn ei_ucs<T: Scalar>(graph: &SearchGraph<'_, T>, opts: &SearchOptions) -> SolveReport<T> {
    let mut cache = EstimationCache::new(graph.instance());
    best_first(graph, Rule::EiUcs, &mut cache, opts)
}

/// Shortest path tightest upper bound search with pruning threshold
/// `u_prune`. Returns the optimum `U*` whenever `u_prune ≥ U*`, and no
/// solution whenever `u_prune < U*`.
pub fn beast<T: Scalar>(graph: &SearchGraph<'_, T>, u_prune: &Extended<T>, opts: &SearchOptions) -> SolveReport<T> {
    let mut cache = EstimationCache::new(graph.instance());
    beast_with_cache(graph, u_prune, &mut cache, opts)
}

/// [`beast`] over a caller-owned cache; already-applied levels are reused
/// without being counted again.
pub fn beast_with_cache<T: Scalar>(
    graph: &SearchGraph<'_, T>,
    u_prune: &Extended<T>,
    cache: &mut EstimationCache<T>,
    opts: &SearchOptions,
) -> SolveReport<T> {
    let rule = Rule::Beast { u_prune: u_prune.clone(), jump_new: opts.jump_new_to_final && !u_prune.is_finite() };
    best_first(graph, rule, cache, opts)
}

/// Shortest path tightest lower bound search with pruning threshold
/// `l_prune`; returns `L*` whenever `l_prune ≥ L*`.
pub fn beauty<T: Scalar>(graph: &SearchGraph<'_, T>, l_prune: &Extended<T>, opts: &SearchOptions) -> SolveReport<T> {
    let mut cache = EstimationCache::new(graph.instance());
    beauty_with_cache(graph, l_prune, &mut cache, opts)
}

pub fn beauty_with_cache<T: Scalar>(
    graph: &SearchGraph<'_, T>,
    l_prune: &Extended<T>,
    cache: &mut EstimationCache<T>,
    opts: &SearchOptions,
) -> SolveReport<T> {
    best_first(graph, Rule::Beauty { l_prune: l_prune.clone() }, cache, opts)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum NodeState {
    New,
    Open,
    Closed,
}

fn best_first<T: Scalar>(
    graph: &SearchGraph<'_, T>,
    rule: Rule<T>,
    cache: &mut EstimationCache<T>,
    opts: &SearchOptions,
) -> SolveReport<T> {
    let inst = graph.instance();
    let counters_before = cache.counters().to_vec();
    let theta_before = cache.theta_max();

    let n = graph.node_count();
    let mut g: Vec<Extended<T>> = vec![Extended::Infinite; n];
    let mut state = vec![NodeState::New; n];
    let mut parent: Vec<Option<EdgeId>> = vec![None; n];
    let mut open = OpenList::new(n);
    let mut report = SolveReport::empty(Status::NoSolution);
    let mut log: Option<Vec<TraceEvent<T>>> = opts.trace.then(Vec::new);

    let source = graph.source();
    g[source] = Extended::zero();
    state[source] = NodeState::Open;
    open.push(source, T::zero());
    if let Some(log) = log.as_mut() {
        log.push(TraceEvent::Ins { node: graph.node_name(source).into(), key: T::zero() });
    }

    let mut result: Option<(usize, T)> = None;
    while let Some((node, key)) = open.pop() {
        if opts.deadline.is_some_and(|d| Instant::now() > d) {
            report.status = Status::TimedOut;
            break;
        }
        report.expanded += 1;
        if let Some(log) = log.as_mut() {
            log.push(TraceEvent::Pop { node: graph.node_name(node).into(), key: key.clone() });
        }
        if graph.is_goal(node) {
            result = Some((node, key));
            break;
        }
        state[node] = NodeState::Closed;
        for &edge in graph.out_edges(node) {
            report.generated += 1;
            let succ = graph.head(edge);
            let is_new = state[succ] == NodeState::New;
            let outcome = rule.relax(inst, edge, &key, &g[succ], is_new, cache, log.as_mut());
            match outcome {
                Outcome::Improve(value) => {
                    g[succ] = Extended::Finite(value.clone());
                    if state[succ] == NodeState::Open {
                        open.remove(succ);
                    }
                    state[succ] = NodeState::Open;
                    parent[succ] = Some(edge);
                    open.push(succ, value.clone());
                    if let Some(log) = log.as_mut() {
                        log.push(TraceEvent::Ins { node: graph.node_name(succ).into(), key: value });
                    }
                }
                Outcome::Reject { pruned } => {
                    if pruned {
                        report.pruned += 1;
                    }
                    if let Some(log) = log.as_mut() {
                        let reason = if pruned { rule.prune_reason() } else { PruneReason::Dominated };
                        log.push(TraceEvent::Prune {
                            from: graph.node_name(node).into(),
                            to: graph.node_name(succ).into(),
                            reason,
                        });
                    }
                }
            }
        }
    }

    if let Some((goal, bound)) = result {
        let mut path = Vec::new();
        let mut at = goal;
        while let Some(edge) = parent[at] {
            path.push(edge);
            at = graph.tail(edge);
        }
        path.reverse();
        report.status = Status::Found;
        report.path = path;
        report.bound = Extended::Finite(bound);
    }
    if let Some(log) = log.as_mut() {
        let path = (report.status == Status::Found).then(|| inst.path_label(&report.path));
        log.push(TraceEvent::Ret { path, bound: report.bound.clone() });
    }

    report.counters = cache
        .counters()
        .iter()
        .enumerate()
        .map(|(i, &c)| c - counters_before.get(i).copied().unwrap_or(0))
        .collect();
    report.theta_max = cache.theta_max() - theta_before;
    report.trace = log;
    report
}
