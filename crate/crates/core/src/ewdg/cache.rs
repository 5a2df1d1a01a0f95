use crate::ewdg::{EdgeId, EwdgError, ProblemInstance};
use crate::scalar::Scalar;

/// Per-run memo of estimator applications, with invocation counters.
///
/// Level numbers are 1-based; level 0 means "not estimated yet" and carries
/// the sentinel bounds `(0, 0)`.
#[derive(Clone, Debug)]
pub struct EstimationCache<T> {
    applied: Vec<usize>,
    bounds: Vec<(T, T)>,
    final_level: Vec<usize>,
    counters: Vec<u64>,
    theta_max: u64,
}

impl<T: Scalar> EstimationCache<T> {
    pub fn new(inst: &ProblemInstance<T>) -> Self {
        let n = inst.edges.len();
        EstimationCache {
            applied: vec![0; n],
            bounds: vec![(T::zero(), T::zero()); n],
            final_level: inst.edges.iter().map(|e| e.level_count()).collect(),
            counters: Vec::new(),
            theta_max: 0,
        }
    }

    pub fn applied_level(&self, edge: EdgeId) -> usize {
        self.applied[edge]
    }

    pub fn current(&self, edge: EdgeId) -> (T, T) {
        self.bounds[edge].clone()
    }

    /// Whether the edge's final estimator has been applied.
    pub fn at_max_level(&self, edge: EdgeId) -> bool {
        self.applied[edge] == self.final_level[edge]
    }

    /// Invocation counts, index `i` holding level `i + 1`.
    pub fn counters(&self) -> &[u64] {
        &self.counters
    }

    /// Applications of an edge's final-level estimator.
    pub fn theta_max(&self) -> u64 {
        self.theta_max
    }

    pub fn total_applications(&self) -> u64 {
        self.counters.iter().sum()
    }

    fn record(&mut self, inst: &ProblemInstance<T>, edge: EdgeId, level: usize) -> (T, T) {
        let spec = &inst.edges[edge].levels[level - 1];
        self.applied[edge] = level;
        self.bounds[edge] = (spec.l.clone(), spec.u.clone());
        if self.counters.len() < level {
            self.counters.resize(level, 0);
        }
        self.counters[level - 1] += 1;
        if level == self.final_level[edge] {
            self.theta_max += 1;
        }
        self.bounds[edge].clone()
    }

    fn check_edge(&self, inst: &ProblemInstance<T>, edge: EdgeId) -> Result<(), EwdgError> {
        if edge >= self.applied.len() || edge >= inst.edges.len() {
            return Err(EwdgError::UnknownEdge { edge });
        }
        Ok(())
    }

    /// Applies the next estimator level of `edge`.
    pub fn apply_next(&mut self, inst: &ProblemInstance<T>, edge: EdgeId) -> Result<(T, T), EwdgError> {
        self.check_edge(inst, edge)?;
        let next = self.applied[edge] + 1;
        if next > self.final_level[edge] {
            return Err(EwdgError::EscalationExhausted { edge });
        }
        Ok(self.record(inst, edge, next))
    }

    /// Bounds of `level`, applying estimators in order up to it if needed.
    /// The flag reports whether any estimator was actually invoked.
    pub fn estimate(&mut self, inst: &ProblemInstance<T>, edge: EdgeId, level: usize) -> Result<((T, T), bool), EwdgError> {
        self.check_edge(inst, edge)?;
        if level == 0 || level > self.final_level[edge] {
            return Err(EwdgError::EscalationExhausted { edge });
        }
        if self.applied[edge] >= level {
            let spec = &inst.edges[edge].levels[level - 1];
            return Ok(((spec.l.clone(), spec.u.clone()), false));
        }
        let mut bounds = self.current(edge);
        while self.applied[edge] < level {
            bounds = self.apply_next(inst, edge)?;
        }
        Ok((bounds, true))
    }

    /// Applies only the final estimator, skipping any intermediate levels.
    /// Returns whether the estimator was invoked (false if already cached).
    pub fn jump_to_final(&mut self, inst: &ProblemInstance<T>, edge: EdgeId) -> Result<((T, T), bool), EwdgError> {
        self.check_edge(inst, edge)?;
        let last = self.final_level[edge];
        if self.applied[edge] == last {
            return Ok((self.current(edge), false));
        }
        Ok((self.record(inst, edge, last), true))
    }

    /// `(l_Θ(e), u_Θ(e))`: escalates through every remaining level.
    pub fn tight_edge_bounds(&mut self, inst: &ProblemInstance<T>, edge: EdgeId) -> Result<(T, T), EwdgError> {
        self.check_edge(inst, edge)?;
        let last = self.final_level[edge];
        self.estimate(inst, edge, last).map(|(b, _)| b)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::g_ex;
    use crate::Rational;

    fn r(v: i64) -> Rational {
        Rational::from_integer(v)
    }

    #[test]
    fn escalates_level_by_level() {
        let inst = g_ex();
        let e02 = inst.find_edge("v0", "v2").unwrap();
        let mut cache = EstimationCache::new(&inst);
        assert_eq!(cache.current(e02), (r(0), r(0)));
        assert_eq!(cache.apply_next(&inst, e02).unwrap(), (r(1), r(6)));
        assert!(!cache.at_max_level(e02));
        assert_eq!(cache.apply_next(&inst, e02).unwrap(), (r(2), r(5)));
        assert!(cache.at_max_level(e02));
        assert_eq!(cache.counters(), &[1, 1]);
        assert_eq!(cache.theta_max(), 1);
    }

    #[test]
    fn exhausted_edge_errors() {
        let inst = g_ex();
        let e01 = inst.find_edge("v0", "v1").unwrap();
        let mut cache = EstimationCache::new(&inst);
        cache.apply_next(&inst, e01).unwrap();
        assert!(matches!(cache.apply_next(&inst, e01), Err(EwdgError::EscalationExhausted { .. })));
        assert_eq!(cache.total_applications(), 1);
    }

    #[test]
    fn tight_bounds_are_idempotent() {
        let inst = g_ex();
        let e14 = inst.find_edge("v1", "v4").unwrap();
        let e01 = inst.find_edge("v0", "v1").unwrap();
        let mut cache = EstimationCache::new(&inst);
        assert_eq!(cache.tight_edge_bounds(&inst, e14).unwrap(), (r(5), r(6)));
        assert_eq!(cache.tight_edge_bounds(&inst, e01).unwrap(), (r(3), r(4)));
        let before = cache.counters().to_vec();
        assert_eq!(cache.tight_edge_bounds(&inst, e14).unwrap(), (r(5), r(6)));
        assert_eq!(cache.counters(), before.as_slice());
        assert_eq!(cache.theta_max(), 2);
    }

    #[test]
    fn jump_counts_only_final_level() {
        let inst = g_ex();
        let e23 = inst.find_edge("v2", "v3").unwrap();
        let mut cache = EstimationCache::new(&inst);
        assert_eq!(cache.jump_to_final(&inst, e23).unwrap(), ((r(7), r(8)), true));
        assert_eq!(cache.counters(), &[0, 1]);
        assert!(!cache.jump_to_final(&inst, e23).unwrap().1);
    }

    #[test]
    fn memoized_levels_are_free() {
        let inst = g_ex();
        let e14 = inst.find_edge("v1", "v4").unwrap();
        let mut cache = EstimationCache::new(&inst);
        cache.tight_edge_bounds(&inst, e14).unwrap();
        let (bounds, invoked) = cache.estimate(&inst, e14, 1).unwrap();
        assert_eq!(bounds, (r(1), r(7)));
        assert!(!invoked);
        assert_eq!(cache.total_applications(), 2);
    }
}
