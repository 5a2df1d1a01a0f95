//! Small hand-built instances used by tests, docs and the CLI.

use crate::ewdg::{EdgeSpec, EstimatorLevel, ProblemInstance};
use crate::Rational;

/// Canonical document for [`g_ex`].
pub const G_EX_JSON: &str = include_str!("../fixtures/g_ex.json");

fn lv(l: i64, u: i64) -> EstimatorLevel<Rational> {
    EstimatorLevel::new(Rational::from_integer(l), Rational::from_integer(u))
}

fn edge(from: &str, to: &str, levels: &[(i64, i64)], true_cost: i64) -> EdgeSpec<Rational> {
    EdgeSpec::new(from, to, levels.iter().map(|&(l, u)| lv(l, u)).collect())
        .with_true_cost(Rational::from_integer(true_cost))
}

/// Five-node example with two goals: lower-bound optimum 7 on
/// `v0->v2->v4`, upper-bound optimum 10 on `v0->v1->v4`.
pub fn g_ex() -> ProblemInstance<Rational> {
    ProblemInstance {
        name: "g_ex".into(),
        nodes: (0..5).map(|i| format!("v{i}").into()).collect(),
        edges: vec![
            edge("v0", "v1", &[(3, 4)], 3),
            edge("v0", "v2", &[(1, 6), (2, 5)], 4),
            edge("v1", "v4", &[(1, 7), (5, 6)], 6),
            edge("v2", "v3", &[(7, 9), (7, 8)], 8),
            edge("v2", "v4", &[(5, 6)], 6),
        ],
        source: "v0".into(),
        goals: vec!["v3".into(), "v4".into()],
    }
}

/// Diamond where the second route into the goal is dominated after one cheap
/// estimate, so lazy escalation skips its final level.
pub fn diamond() -> ProblemInstance<Rational> {
    ProblemInstance {
        name: "diamond".into(),
        nodes: vec!["s".into(), "a".into(), "b".into(), "t".into()],
        edges: vec![
            edge("s", "a", &[(1, 1)], 1),
            edge("s", "b", &[(2, 2)], 2),
            edge("a", "t", &[(1, 1)], 1),
            edge("b", "t", &[(0, 10), (5, 6)], 5),
        ],
        source: "s".into(),
        goals: vec!["t".into()],
    }
}
