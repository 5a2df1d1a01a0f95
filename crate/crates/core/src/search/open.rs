use std::collections::BTreeSet;

use crate::scalar::Scalar;

/// Min-priority OPEN list keyed by `(key, insertion sequence)`.
///
/// Decrease-key is remove + reinsert, so a reinserted node queues behind
/// every node already holding an equal key.
pub(super) struct OpenList<T> {
    queue: BTreeSet<(T, u64, usize)>,
    entries: Vec<Option<(T, u64)>>,
    next_seq: u64,
}

impl<T: Scalar> OpenList<T> {
    pub fn new(nodes: usize) -> Self {
        OpenList { queue: BTreeSet::new(), entries: vec![None; nodes], next_seq: 0 }
    }

    pub fn push(&mut self, node: usize, key: T) {
        debug_assert!(self.entries[node].is_none(), "node already in OPEN");
        let seq = self.next_seq;
        self.next_seq += 1;
        self.queue.insert((key.clone(), seq, node));
        self.entries[node] = Some((key, seq));
    }

    pub fn remove(&mut self, node: usize) {
        if let Some((key, seq)) = self.entries[node].take() {
            self.queue.remove(&(key, seq, node));
        }
    }

    pub fn pop(&mut self) -> Option<(usize, T)> {
        let (key, _, node) = self.queue.pop_first()?;
        self.entries[node] = None;
        Some((node, key))
    }
}
