//! Per-nonterminal boolean relations over vertex pairs, witness records for
//! every true entry, and explicit path extraction.

use thiserror::Error;

use crate::grammar::{NtId, TermId};
use crate::graph::{Edge, Path};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error("grammar is not in CNF; run to_cnf first")]
    GrammarNotCnf,
    #[error("grammar is not in TALNF; run to_talnf first")]
    GrammarNotTalnf,
    #[error("no witness recorded for nonterminal {nt:?} and pair ({u}, {v})")]
    NoWitness { nt: NtId, u: u32, v: u32 },
    #[error("witness table inconsistent with relations at nonterminal {nt:?}, pair ({u}, {v})")]
    MissingWitness { nt: NtId, u: u32, v: u32 },
    #[error("vertex {v} out of range (index covers {n} vertices)")]
    VertexOutOfRange { v: u32, n: usize },
    #[error("invalid witness DAG handle {0}")]
    InvalidHandle(u32),
}

/// Square bit matrix with row-major packed words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitMatrix {
    n: usize,
    words_per_row: usize,
    words: Vec<u64>,
}

impl BitMatrix {
    pub fn new(n: usize) -> Self {
        let words_per_row = n.div_ceil(64);
        BitMatrix {
            n,
            words_per_row,
            words: vec![0; words_per_row * n],
        }
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.words[i * self.words_per_row + j / 64] >> (j % 64) & 1 == 1
    }

    /// Set bit `(i, j)`; returns true when the bit was newly set.
    pub fn set(&mut self, i: usize, j: usize) -> bool {
        let w = &mut self.words[i * self.words_per_row + j / 64];
        let mask = 1u64 << (j % 64);
        let newly = *w & mask == 0;
        *w |= mask;
        newly
    }

    pub fn row_words(&self, i: usize) -> &[u64] {
        &self.words[i * self.words_per_row..(i + 1) * self.words_per_row]
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }
}

/// Iterate the set-bit column indices of a packed row snapshot.
pub fn iter_set_bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(wi, &w)| {
        let mut rest = w;
        std::iter::from_fn(move || {
            if rest == 0 {
                return None;
            }
            let bit = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            Some(wi * 64 + bit)
        })
    })
}

/// One boolean relation per nonterminal: `get(A, u, v)` holds exactly when
/// some `u -> v` path has a trace derivable from `A`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationSet {
    n: usize,
    mats: Vec<BitMatrix>,
}

impl RelationSet {
    pub fn new(num_nts: usize, n: usize) -> Self {
        RelationSet {
            n,
            mats: vec![BitMatrix::new(n); num_nts],
        }
    }

    pub fn num_vertices(&self) -> usize {
        self.n
    }

    pub fn num_nonterminals(&self) -> usize {
        self.mats.len()
    }

    pub fn get(&self, nt: NtId, u: u32, v: u32) -> bool {
        self.mats[nt.index()].get(u as usize, v as usize)
    }

    pub fn set(&mut self, nt: NtId, u: u32, v: u32) -> bool {
        self.mats[nt.index()].set(u as usize, v as usize)
    }

    pub fn matrix(&self, nt: NtId) -> &BitMatrix {
        &self.mats[nt.index()]
    }

    /// Total number of true entries across all matrices.
    pub fn true_count(&self) -> usize {
        self.mats.iter().map(|m| m.count_ones()).sum()
    }

    /// Constant-time membership query with a range check.
    pub fn query(&self, nt: NtId, s: u32, t: u32) -> Result<bool, IndexError> {
        if (s as usize) >= self.n {
            return Err(IndexError::VertexOutOfRange { v: s, n: self.n });
        }
        if (t as usize) >= self.n {
            return Err(IndexError::VertexOutOfRange { v: t, n: self.n });
        }
        Ok(self.get(nt, s, t))
    }
}

/// How a true entry `(A, u, v)` was derived. Endpoints live in the entry key;
/// records hold only what the key does not determine.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessRecord {
    /// `A -> a` over the edge `(u, v)` labeled `label`.
    Term { label: TermId },
    /// `S -> eps`: the empty path at `u = v`.
    Eps,
    /// `A -> B C` split at `mid`: witnesses `(B, u, mid)` and `(C, mid, v)`.
    Bin { left: NtId, right: NtId, mid: u32 },
    /// `A -> a B`: edge `(u, via)` labeled `label`, then witness `(body, via, v)`.
    LinL { label: TermId, via: u32, body: NtId },
    /// `A -> B a`: witness `(body, u, via)`, then edge `(via, v)` labeled `label`.
    LinR { body: NtId, label: TermId, via: u32 },
}

/// Witness records stored densely per `(nonterminal, u, v)`, plus the entry
/// insertion order. Records are never overwritten, so every record refers
/// only to strictly earlier entries and recursion terminates.
#[derive(Debug, Clone, PartialEq)]
pub struct WitnessTable {
    n: usize,
    num_nts: usize,
    recs: Vec<Option<WitnessRecord>>,
    order: Vec<(NtId, u32, u32)>,
}

impl WitnessTable {
    pub fn new(num_nts: usize, n: usize) -> Self {
        WitnessTable {
            n,
            num_nts,
            recs: vec![None; num_nts * n * n],
            order: Vec::new(),
        }
    }

    fn slot(&self, nt: NtId, u: u32, v: u32) -> usize {
        (nt.index() * self.n + u as usize) * self.n + v as usize
    }

    pub fn insert(&mut self, nt: NtId, u: u32, v: u32, rec: WitnessRecord) {
        let slot = self.slot(nt, u, v);
        debug_assert!(
            self.recs[slot].is_none(),
            "witness overwrite at {nt:?} ({u},{v})"
        );
        self.recs[slot] = Some(rec);
        self.order.push((nt, u, v));
    }

    pub fn get(&self, nt: NtId, u: u32, v: u32) -> Option<WitnessRecord> {
        self.recs[self.slot(nt, u, v)]
    }

    /// Entries in first-insertion order.
    pub fn order(&self) -> &[(NtId, u32, u32)] {
        &self.order
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Instrumentation from an index build.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BuildStats {
    /// True relation entries produced.
    pub entries: usize,
    /// Worklist dequeues (at most one per entry).
    pub dequeues: usize,
    /// Total innermost-loop iterations across all dequeues: cells examined
    /// in row/column scans for the CNF build, adjacency-list elements
    /// scanned for the terminal-anchored build. Initialization is excluded.
    pub inner_iterations: u64,
}

/// Relations, witnesses, and counters from one build.
#[derive(Debug, Clone)]
pub struct BuiltIndex {
    pub relations: RelationSet,
    pub witnesses: WitnessTable,
    pub stats: BuildStats,
}

impl BuiltIndex {
    /// Inner-loop iteration counter, the quantity the scaling tests fit.
    pub fn propagation_count(&self) -> u64 {
        self.stats.inner_iterations
    }
}

/// Reconstruct an explicit path for a true entry by following witness
/// records. Runs in time linear in the output length (an explicit work stack
/// keeps deep derivations off the call stack).
pub fn extract_path(
    witnesses: &WitnessTable,
    nt: NtId,
    u: u32,
    v: u32,
) -> Result<Path, IndexError> {
    enum Item {
        Entry(NtId, u32, u32),
        Edge(Edge),
    }

    let mut edges = Vec::new();
    let mut stack = vec![Item::Entry(nt, u, v)];
    while let Some(item) = stack.pop() {
        match item {
            Item::Edge(e) => edges.push(e),
            Item::Entry(a, x, y) => {
                let rec =
                    witnesses
                        .get(a, x, y)
                        .ok_or(IndexError::NoWitness { nt: a, u: x, v: y })?;
                match rec {
                    WitnessRecord::Term { label } => {
                        edges.push(Edge {
                            from: x,
                            to: y,
                            label,
                        });
                    }
                    WitnessRecord::Eps => {}
                    WitnessRecord::Bin { left, right, mid } => {
                        stack.push(Item::Entry(right, mid, y));
                        stack.push(Item::Entry(left, x, mid));
                    }
                    WitnessRecord::LinL { label, via, body } => {
                        stack.push(Item::Entry(body, via, y));
                        stack.push(Item::Edge(Edge {
                            from: x,
                            to: via,
                            label,
                        }));
                    }
                    WitnessRecord::LinR { body, label, via } => {
                        stack.push(Item::Edge(Edge {
                            from: via,
                            to: y,
                            label,
                        }));
                        stack.push(Item::Entry(body, x, via));
                    }
                }
            }
        }
    }
    Ok(Path { start: u, edges })
}
