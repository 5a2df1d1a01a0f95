use std::fmt;

use serde::Serialize;

use crate::scalar::{Extended, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum PruneReason {
    /// The successor already has an equal or better key.
    Dominated,
    UPrune,
    LPrune,
}

impl fmt::Display for PruneReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PruneReason::Dominated => "dominated",
            PruneReason::UPrune => "u_prune",
            PruneReason::LPrune => "l_prune",
        })
    }
}

/// One search event. `Display` gives the line format of trace files:
///
/// ```text
/// POP <node> <key>
/// EST <from>-><to> L<level> l=<l> u=<u>
/// INS <node> <key>
/// PRUNE <from>-><to> <reason>
/// RET <path|empty> <bound|inf>
/// ```
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TraceEvent<T> {
    Pop { node: String, key: T },
    Est { from: String, to: String, level: usize, l: T, u: T },
    Ins { node: String, key: T },
    Prune { from: String, to: String, reason: PruneReason },
    Ret { path: Option<String>, bound: Extended<T> },
}

impl<T: Scalar> fmt::Display for TraceEvent<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceEvent::Pop { node, key } => write!(f, "POP {node} {key}"),
            TraceEvent::Est { from, to, level, l, u } => write!(f, "EST {from}->{to} L{level} l={l} u={u}"),
            TraceEvent::Ins { node, key } => write!(f, "INS {node} {key}"),
            TraceEvent::Prune { from, to, reason } => write!(f, "PRUNE {from}->{to} {reason}"),
            TraceEvent::Ret { path, bound } => {
                write!(f, "RET {} {bound}", path.as_deref().unwrap_or("empty"))
            }
        }
    }
}
