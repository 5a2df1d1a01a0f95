use crate::ewdg::{path_bounds, EdgeId, EstimationCache, SearchGraph};
use crate::oracle::combine_bstar;
use crate::scalar::{Extended, Scalar};
use crate::search::{beast_with_cache, beauty_with_cache, SearchOptions, SolveReport, Status};

#[derive(Clone, Debug, Default)]
pub struct TaspOptions {
    pub search: SearchOptions,
    /// Let the upper-bound phase reuse estimates made during the lower-bound
    /// phase. Off by default, so each phase counts its own invocations.
    pub share_cache: bool,
}

#[derive(Clone, Debug)]
pub struct TaspReport<T> {
    pub status: Status,
    pub path: Vec<EdgeId>,
    pub b_star: Extended<T>,
    pub l_star: Extended<T>,
    pub u_star: Extended<T>,
    /// Tight upper bound of the lower-bound optimal path, used as `u_prune`.
    pub u_prune: Extended<T>,
    pub slb_report: SolveReport<T>,
    /// Absent when the lower-bound path's bounds already coincide.
    pub sub_report: Option<SolveReport<T>>,
}

/// Tightest admissible shortest path: returns a path achieving `U*` together
/// with `B* = U*/L*`.
pub fn beauty_and_beast<T: Scalar>(graph: &SearchGraph<'_, T>, opts: &TaspOptions) -> TaspReport<T> {
    let inst = graph.instance();
    let mut slb_cache = EstimationCache::new(inst);
    let slb = beauty_with_cache(graph, &Extended::Infinite, &mut slb_cache, &opts.search);

    let mut report = TaspReport {
        status: slb.status,
        path: Vec::new(),
        b_star: Extended::Infinite,
        l_star: Extended::Infinite,
        u_star: Extended::Infinite,
        u_prune: Extended::Infinite,
        slb_report: slb,
        sub_report: None,
    };
    if !report.slb_report.found() {
        return report;
    }

    let l_star = report.slb_report.bound.clone();
    let slb_upper = path_bounds(inst, &report.slb_report.path, &mut slb_cache)
        .expect("search returns contiguous paths")
        .u;
    report.l_star = l_star.clone();
    report.u_prune = Extended::Finite(slb_upper.clone());

    if l_star == Extended::Finite(slb_upper.clone()) {
        report.path = report.slb_report.path.clone();
        report.u_star = l_star;
        report.b_star = Extended::Finite(T::one());
        return report;
    }

    let sub = if opts.share_cache {
        beast_with_cache(graph, &report.u_prune, &mut slb_cache, &opts.search)
    } else {
        let mut cache = EstimationCache::new(inst);
        beast_with_cache(graph, &report.u_prune, &mut cache, &opts.search)
    };
    report.status = sub.status;
    if sub.found() {
        report.path = sub.path.clone();
        report.u_star = sub.bound.clone();
        report.b_star = combine_bstar(&report.l_star, &report.u_star).expect("L* <= U* for optimal searches");
    } else {
        debug_assert_eq!(sub.status, Status::TimedOut, "u(π_SLB) >= U*, so the bounded search must succeed");
    }
    report.sub_report = Some(sub);
    report
}
