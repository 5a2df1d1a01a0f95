use crate::ewdg::{EdgeId, EstimationCache, ProblemInstance};
use crate::scalar::{Extended, Scalar};
use crate::search::trace::{PruneReason, TraceEvent};

pub(super) enum Rule<T> {
    EiUcs,
    Beast { u_prune: Extended<T>, jump_new: bool },
    Beauty { l_prune: Extended<T> },
}

pub(super) enum Outcome<T> {
    Improve(T),
    /// `pruned` is set when the successor-key test passed but a threshold
    /// test failed, either in the escalation loop or in the update test.
    Reject { pruned: bool },
}

struct Escalation<'c, 'l, T> {
    inst: &'c ProblemInstance<T>,
    edge: EdgeId,
    cache: &'c mut EstimationCache<T>,
    log: Option<&'l mut Vec<TraceEvent<T>>>,
    level: usize,
    bounds: (T, T),
}

impl<T: Scalar> Escalation<'_, '_, T> {
    fn remaining(&self) -> bool {
        self.level < self.inst.edges[self.edge].level_count()
    }

    fn at_final(&self) -> bool {
        !self.remaining()
    }

    fn log(&mut self, invoked: bool) {
        if let (true, Some(log)) = (invoked, self.log.as_mut()) {
            let spec = &self.inst.edges[self.edge];
            log.push(TraceEvent::Est {
                from: spec.from.to_string(),
                to: spec.to.to_string(),
                level: self.level,
                l: self.bounds.0.clone(),
                u: self.bounds.1.clone(),
            });
        }
    }

    fn next(&mut self) {
        let (bounds, invoked) = self
            .cache
            .estimate(self.inst, self.edge, self.level + 1)
            .expect("escalation is guarded by the remaining-level check");
        self.level += 1;
        self.bounds = bounds;
        self.log(invoked);
    }

    fn jump(&mut self) {
        let (bounds, invoked) = self.cache.jump_to_final(self.inst, self.edge).expect("edge exists");
        self.level = self.inst.edges[self.edge].level_count();
        self.bounds = bounds;
        self.log(invoked);
    }
}

fn below<T: Scalar>(value: &T, bound: &Extended<T>) -> bool {
    match bound {
        Extended::Finite(b) => value < b,
        Extended::Infinite => true,
    }
}

fn within<T: Scalar>(value: &T, bound: &Extended<T>) -> bool {
    match bound {
        Extended::Finite(b) => value <= b,
        Extended::Infinite => true,
    }
}

impl<T: Scalar> Rule<T> {
    pub fn prune_reason(&self) -> PruneReason {
        match self {
            Rule::Beauty { .. } => PruneReason::LPrune,
            _ => PruneReason::UPrune,
        }
    }

    /// Relaxes `edge` out of a node with key `g_n` into a successor whose
    /// current key is `g_s` (`∞` if it has none).
    #[allow(clippy::too_many_arguments)]
    pub fn relax(
        &self,
        inst: &ProblemInstance<T>,
        edge: EdgeId,
        g_n: &T,
        g_s: &Extended<T>,
        successor_is_new: bool,
        cache: &mut EstimationCache<T>,
        log: Option<&mut Vec<TraceEvent<T>>>,
    ) -> Outcome<T> {
        let mut est = Escalation { inst, edge, cache, log, level: 0, bounds: (T::zero(), T::zero()) };
        match self {
            Rule::EiUcs => {
                est.jump();
                let candidate = g_n.clone() + est.bounds.1.clone();
                if below(&candidate, g_s) {
                    Outcome::Improve(candidate)
                } else {
                    Outcome::Reject { pruned: false }
                }
            }
            Rule::Beast { u_prune, jump_new } => {
                let mut threshold_stop = false;
                if *jump_new && successor_is_new {
                    est.jump();
                } else {
                    loop {
                        let probe = g_n.clone() + est.bounds.0.clone();
                        let improves = below(&probe, g_s);
                        let admitted = within(&probe, u_prune);
                        if !(improves && admitted && est.remaining()) {
                            threshold_stop = improves && !admitted;
                            break;
                        }
                        est.next();
                    }
                }
                let candidate = g_n.clone() + est.bounds.1.clone();
                let improves = below(&candidate, g_s);
                if improves && within(&candidate, u_prune) {
                    Outcome::Improve(candidate)
                } else {
                    Outcome::Reject { pruned: threshold_stop || improves }
                }
            }
            Rule::Beauty { l_prune } => {
                let threshold_stop;
                loop {
                    let probe = g_n.clone() + est.bounds.0.clone();
                    let improves = below(&probe, g_s);
                    let admitted = within(&probe, l_prune);
                    if !(improves && admitted && est.remaining()) {
                        threshold_stop = improves && !admitted;
                        break;
                    }
                    est.next();
                }
                // A loop that stopped early means a loose lower bound already
                // lost; the tight one can only be larger.
                let candidate = g_n.clone() + est.bounds.0.clone();
                let improves = below(&candidate, g_s);
                if est.at_final() && improves && within(&candidate, l_prune) {
                    Outcome::Improve(candidate)
                } else {
                    Outcome::Reject { pruned: threshold_stop || (est.at_final() && improves) }
                }
            }
        }
    }
}
