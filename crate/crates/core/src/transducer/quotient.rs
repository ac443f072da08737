//! Quotients of transducers by state equivalences, and the symmetry checks
//! built on them.

use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use super::{Edge, FiniteTransducer};
use crate::alphabet::{TokenId, TokenString};
use crate::automaton::StateId;
use crate::error::{Error, Result};

/// Default cap on subset-construction states.
pub const DEFAULT_STATE_CAP: usize = 100_000;

/// An equivalence relation over states, as a list of disjoint blocks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StatePartition {
    blocks: Vec<Vec<StateId>>,
    block_of: Vec<usize>,
}

impl StatePartition {
    /// Blocks must be non-empty, disjoint, and cover `0..num_states` exactly.
    pub fn new(num_states: usize, blocks: Vec<Vec<StateId>>) -> Result<Self> {
        let mut block_of = vec![usize::MAX; num_states];
        for (b, block) in blocks.iter().enumerate() {
            if block.is_empty() {
                return Err(Error::InvalidPartition(format!("block {b} is empty")));
            }
            for &s in block {
                let slot = block_of
                    .get_mut(s as usize)
                    .ok_or_else(|| Error::InvalidPartition(format!("state {s} out of range")))?;
                if *slot != usize::MAX {
                    return Err(Error::InvalidPartition(format!(
                        "state {s} appears in two blocks"
                    )));
                }
                *slot = b;
            }
        }
        if let Some(s) = block_of.iter().position(|&b| b == usize::MAX) {
            return Err(Error::InvalidPartition(format!(
                "state {s} is not in any block"
            )));
        }
        Ok(StatePartition { blocks, block_of })
    }

    pub fn singletons(num_states: usize) -> Self {
        StatePartition::new(
            num_states,
            (0..num_states as StateId).map(|s| vec![s]).collect(),
        )
        .expect("singletons partition")
    }

    /// Builds the partition induced by a labeling; blocks ordered by first state.
    pub fn from_labels(labels: &[usize]) -> Self {
        let mut order: Vec<usize> = Vec::new();
        let mut blocks: Vec<Vec<StateId>> = Vec::new();
        for (s, &l) in labels.iter().enumerate() {
            match order.iter().position(|&x| x == l) {
                Some(b) => blocks[b].push(s as StateId),
                None => {
                    order.push(l);
                    blocks.push(vec![s as StateId]);
                }
            }
        }
        StatePartition::new(labels.len(), blocks).expect("labels induce a partition")
    }

    /// One block per line, state names separated by whitespace.
    pub fn parse(text: &str, machine: &FiniteTransducer) -> Result<Self> {
        let mut blocks = Vec::new();
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let block = line
                .split_whitespace()
                .map(|name| {
                    machine.state_id(name).ok_or_else(|| Error::Format {
                        line: n + 1,
                        msg: format!("unknown state `{name}`"),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            blocks.push(block);
        }
        StatePartition::new(machine.num_states(), blocks)
    }

    pub fn to_text(&self, machine: &FiniteTransducer) -> String {
        let mut out = String::new();
        for b in &self.blocks {
            let names: Vec<&str> = b
                .iter()
                .map(|&s| machine.state_names()[s as usize].as_str())
                .collect();
            out.push_str(&names.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn blocks(&self) -> &[Vec<StateId>] {
        &self.blocks
    }

    pub fn block_of(&self, s: StateId) -> usize {
        self.block_of[s as usize]
    }

    pub fn num_states(&self) -> usize {
        self.block_of.len()
    }
}

/// Collapses each block to one state. The initial state is the block of the
/// old initial state; a block halts if any member halts; edges are kept
/// between blocks with duplicates removed. The result is generally
/// nondeterministic.
pub fn quotient(t: &FiniteTransducer, p: &StatePartition) -> Result<FiniteTransducer> {
    if p.num_states() != t.num_states() {
        return Err(Error::InvalidPartition(format!(
            "partition covers {} states, machine has {}",
            p.num_states(),
            t.num_states()
        )));
    }
    let names: Vec<String> = p
        .blocks()
        .iter()
        .map(|b| {
            let mut members = b.clone();
            members.sort_unstable();
            members
                .iter()
                .map(|&s| t.state_names()[s as usize].as_str())
                .collect::<Vec<_>>()
                .join("+")
        })
        .collect();
    let mut seen = HashSet::new();
    let mut edges = Vec::new();
    for e in t.edges() {
        let q = Edge {
            src: p.block_of(e.src) as StateId,
            dst: p.block_of(e.dst) as StateId,
            input: e.input,
            output: e.output.clone(),
        };
        if seen.insert(q.clone()) {
            edges.push(q);
        }
    }
    let halting: BTreeSet<StateId> = t
        .halting_states()
        .map(|s| p.block_of(s) as StateId)
        .collect();
    FiniteTransducer::new(
        names,
        Arc::clone(t.input_alphabet()),
        Arc::clone(t.output_alphabet()),
        p.block_of(t.initial()) as StateId,
        halting,
        edges,
    )
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AcceptorSymmetry {
    Symmetric,
    /// Shortest (then lexicographically smallest) string accepted by the
    /// quotient but not by the original.
    Counterexample(TokenString),
}

/// Decides whether collapsing `p` leaves the accepted language unchanged.
///
/// The quotient always accepts a superset, so only `L(m/p) ⊆ L(m)` is
/// searched, over the product of both determinizations.
pub fn check_quotient_symmetry_acceptor(
    m: &FiniteTransducer,
    p: &StatePartition,
    state_cap: usize,
) -> Result<AcceptorSymmetry> {
    let q = quotient(m, p)?;
    let dq = q.to_nfa().determinize(state_cap)?;
    let dm = m.to_nfa().determinize(state_cap)?;
    Ok(match dq.shortest_difference(&dm) {
        None => AcceptorSymmetry::Symmetric,
        Some(w) => AcceptorSymmetry::Counterexample(TokenString::from_ids(
            Arc::clone(m.input_alphabet()),
            w,
        )),
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TransducerSymmetry {
    /// No discrepancy on inputs up to this length.
    SymmetricUpTo(usize),
    Counterexample {
        input: TokenString,
        /// `t(input)`, if defined.
        expected: Option<TokenString>,
        /// Every output the quotient can produce on `input`, sorted.
        quotient_outputs: Vec<TokenString>,
    },
}

/// Bounded check that `t/p` induces the same partial map as `t`: on every
/// input up to `max_len`, the quotient's output set must be exactly
/// `{t(input)}` (or empty where `t` is undefined). Defaults to
/// `|S_t| * |S_quotient| + 1` when `max_len` is `None`.
pub fn check_quotient_symmetry_transducer(
    t: &FiniteTransducer,
    p: &StatePartition,
    max_len: Option<usize>,
) -> Result<TransducerSymmetry> {
    if !t.is_deterministic() {
        return Err(Error::Nondeterministic);
    }
    let q = quotient(t, p)?;
    let max_len = max_len.unwrap_or(t.num_states() * q.num_states() + 1);
    let k = t.input_alphabet().len();
    let out_alpha = t.output_alphabet();

    // Each search node: (input so far, t's configuration, quotient configurations).
    type Config = BTreeSet<(StateId, Vec<TokenId>)>;
    struct Node {
        input: Vec<TokenId>,
        det: Option<(StateId, Vec<TokenId>)>,
        configs: Config,
    }
    let mut frontier = vec![Node {
        input: Vec::new(),
        det: Some((t.initial(), Vec::new())),
        configs: BTreeSet::from([(q.initial(), Vec::new())]),
    }];
    // edges of q grouped by source
    let mut q_out: Vec<Vec<&Edge>> = vec![Vec::new(); q.num_states()];
    for e in q.edges() {
        q_out[e.src as usize].push(e);
    }

    for len in 0..=max_len {
        for node in &frontier {
            let expected = node
                .det
                .as_ref()
                .filter(|(s, _)| t.is_halting(*s))
                .map(|(_, o)| o.clone());
            let outs: BTreeSet<Vec<TokenId>> = node
                .configs
                .iter()
                .filter(|(s, _)| q.is_halting(*s))
                .map(|(_, o)| o.clone())
                .collect();
            let agree = match &expected {
                Some(o) => outs.len() == 1 && outs.contains(o),
                None => outs.is_empty(),
            };
            if !agree {
                let mut sorted: Vec<Vec<TokenId>> = outs.into_iter().collect();
                sorted.sort_by(|a, b| crate::alphabet::canonical_cmp(a, b));
                return Ok(TransducerSymmetry::Counterexample {
                    input: TokenString::from_ids(
                        Arc::clone(t.input_alphabet()),
                        node.input.clone(),
                    ),
                    expected: expected.map(|o| TokenString::from_ids(Arc::clone(out_alpha), o)),
                    quotient_outputs: sorted
                        .into_iter()
                        .map(|o| TokenString::from_ids(Arc::clone(out_alpha), o))
                        .collect(),
                });
            }
        }
        if len == max_len {
            break;
        }
        let mut next = Vec::with_capacity(frontier.len() * k);
        for node in &frontier {
            for tok in 0..k as TokenId {
                let det = node.det.as_ref().and_then(|(s, o)| {
                    t.edges()
                        .iter()
                        .find(|e| e.src == *s && e.input == Some(tok))
                        .map(|e| (e.dst, [o.as_slice(), &e.output].concat()))
                });
                let mut configs = Config::new();
                for (s, o) in &node.configs {
                    for e in &q_out[*s as usize] {
                        if e.input == Some(tok) {
                            configs.insert((e.dst, [o.as_slice(), &e.output].concat()));
                        }
                    }
                }
                // both sides dead: every extension agrees (both undefined)
                if det.is_none() && configs.is_empty() {
                    continue;
                }
                let mut input = node.input.clone();
                input.push(tok);
                next.push(Node {
                    input,
                    det,
                    configs,
                });
            }
        }
        frontier = next;
    }
    Ok(TransducerSymmetry::SymmetricUpTo(max_len))
}
