//! One-way finite-state transducers over token alphabets.
//!
//! A transducer is an edge-labeled graph: each edge reads one input token (or
//! nothing, for epsilon edges) and emits a possibly empty output string. A
//! deterministic transducer defines a partial function: an input is mapped to
//! the concatenated outputs of its unique path if that path ends in a halting
//! state.

mod quotient;
mod text;

pub use quotient::{
    check_quotient_symmetry_acceptor, check_quotient_symmetry_transducer, quotient,
    AcceptorSymmetry, StatePartition, TransducerSymmetry, DEFAULT_STATE_CAP,
};
pub use text::EPSILON;

use std::sync::Arc;

use crate::alphabet::{same_alphabet, Alphabet, TokenId, TokenString};
use crate::automaton::{Nfa, StateId};
use crate::error::{Error, Result};
use crate::map::{GrowthBound, TransductionMap};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Edge {
    pub src: StateId,
    pub dst: StateId,
    /// `None` for an epsilon edge.
    pub input: Option<TokenId>,
    pub output: Vec<TokenId>,
}

#[derive(Debug, Clone)]
pub struct FiniteTransducer {
    state_names: Vec<String>,
    input: Arc<Alphabet>,
    output: Arc<Alphabet>,
    initial: StateId,
    halting: Vec<bool>,
    edges: Vec<Edge>,
    deterministic: bool,
    /// For deterministic machines: `next[state * |Σ| + token]` is an edge index.
    next: Vec<Option<u32>>,
    growth: Option<GrowthBound>,
}

impl FiniteTransducer {
    pub fn new(
        state_names: Vec<String>,
        input: Arc<Alphabet>,
        output: Arc<Alphabet>,
        initial: StateId,
        halting: impl IntoIterator<Item = StateId>,
        edges: Vec<Edge>,
    ) -> Result<Self> {
        let n = state_names.len();
        if n == 0 {
            return Err(Error::InvalidTransducer("no states".into()));
        }
        let mut seen = std::collections::HashSet::new();
        for s in &state_names {
            if !seen.insert(s) {
                return Err(Error::InvalidTransducer(format!("duplicate state `{s}`")));
            }
        }
        if initial as usize >= n {
            return Err(Error::InvalidTransducer(
                "initial state out of range".into(),
            ));
        }
        let mut halt = vec![false; n];
        for h in halting {
            *halt
                .get_mut(h as usize)
                .ok_or_else(|| Error::InvalidTransducer("halting state out of range".into()))? =
                true;
        }
        for e in &edges {
            if e.src as usize >= n || e.dst as usize >= n {
                return Err(Error::InvalidTransducer(
                    "edge references unknown state".into(),
                ));
            }
            if e.input.is_some_and(|t| t as usize >= input.len())
                || e.output.iter().any(|&t| t as usize >= output.len())
            {
                return Err(Error::InvalidTransducer(
                    "edge references unknown token".into(),
                ));
            }
        }
        let k = input.len();
        let mut next = vec![None; n * k];
        let mut deterministic = true;
        for (i, e) in edges.iter().enumerate() {
            match e.input {
                None => deterministic = false,
                Some(t) => {
                    let slot = &mut next[e.src as usize * k + t as usize];
                    if slot.is_some() {
                        deterministic = false;
                    }
                    *slot = Some(i as u32);
                }
            }
        }
        if !deterministic {
            next.clear();
        }
        Ok(FiniteTransducer {
            state_names,
            input,
            output,
            initial,
            halting: halt,
            edges,
            deterministic,
            next,
            growth: None,
        })
    }

    /// Attaches a declared bound; [`run`](Self::run) fails on any output that violates it.
    pub fn with_growth_bound(mut self, bound: GrowthBound) -> Self {
        self.growth = Some(bound);
        self
    }

    pub fn declared_growth_bound(&self) -> Option<GrowthBound> {
        self.growth
    }

    pub fn num_states(&self) -> usize {
        self.state_names.len()
    }

    pub fn state_names(&self) -> &[String] {
        &self.state_names
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.state_names
            .iter()
            .position(|s| s == name)
            .map(|i| i as StateId)
    }

    pub fn input_alphabet(&self) -> &Arc<Alphabet> {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Arc<Alphabet> {
        &self.output
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_halting(&self, s: StateId) -> bool {
        self.halting[s as usize]
    }

    pub fn halting_states(&self) -> impl Iterator<Item = StateId> + '_ {
        (0..self.num_states() as StateId).filter(|&s| self.halting[s as usize])
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn is_deterministic(&self) -> bool {
        self.deterministic
    }

    /// Runs a deterministic machine. `Ok(None)` when the walk gets stuck or
    /// ends outside a halting state.
    pub fn run(&self, s: &TokenString) -> Result<Option<TokenString>> {
        if !same_alphabet(s.alphabet(), &self.input) {
            return Err(Error::AlphabetMismatch);
        }
        let out = self.run_ids(s.ids())?;
        if let (Some(o), Some(b)) = (&out, self.growth) {
            b.check(s.len(), o.len())?;
        }
        Ok(out.map(|o| TokenString::from_ids(Arc::clone(&self.output), o)))
    }

    /// Runs without consulting any growth bound.
    pub fn run_ids(&self, input: &[TokenId]) -> Result<Option<Vec<TokenId>>> {
        if !self.deterministic {
            return Err(Error::Nondeterministic);
        }
        let k = self.input.len();
        let mut state = self.initial;
        let mut out = Vec::new();
        for &t in input {
            match self.next[state as usize * k + t as usize] {
                Some(e) => {
                    let e = &self.edges[e as usize];
                    out.extend_from_slice(&e.output);
                    state = e.dst;
                }
                None => return Ok(None),
            }
        }
        Ok(self.halting[state as usize].then_some(out))
    }

    /// Linear growth bound: `D = 1`, `C` the longest edge output (at least 1).
    ///
    /// With epsilon edges, `C` also covers the longest output an epsilon path
    /// can add around each consumed token.
    pub fn infer_growth_bound(&self) -> Result<GrowthBound> {
        let eps_out = self.longest_epsilon_output()?;
        let edge_max = self
            .edges
            .iter()
            .filter(|e| e.input.is_some())
            .map(|e| e.output.len())
            .max()
            .unwrap_or(0);
        let c = (edge_max + 2 * eps_out).max(1);
        Ok(GrowthBound::linear(c as f64))
    }

    /// Longest output along any epsilon path; errors if an epsilon cycle emits output.
    fn longest_epsilon_output(&self) -> Result<usize> {
        let n = self.num_states();
        let eps: Vec<&Edge> = self.edges.iter().filter(|e| e.input.is_none()).collect();
        if eps.is_empty() {
            return Ok(0);
        }
        // Bellman-Ford style relaxation: a still-improving value after n rounds
        // means a positive-output cycle.
        let mut best = vec![0usize; n];
        for round in 0..=n {
            let mut changed = false;
            for e in &eps {
                let cand = best[e.dst as usize] + e.output.len();
                if cand > best[e.src as usize] {
                    best[e.src as usize] = cand;
                    changed = true;
                }
            }
            if !changed {
                return Ok(best.into_iter().max().unwrap_or(0));
            }
            if round == n {
                break;
            }
        }
        Err(Error::UnboundedOutput)
    }

    /// The machine read as an acceptor (outputs dropped).
    pub fn to_nfa(&self) -> Nfa {
        let mut nfa = Nfa::new(self.input.len());
        for s in 0..self.num_states() {
            nfa.add_state(self.halting[s]);
        }
        nfa.start = vec![self.initial];
        for e in &self.edges {
            nfa.add_edge(e.src, e.input, e.dst);
        }
        nfa
    }

    pub fn accepts(&self, s: &[TokenId]) -> bool {
        self.to_nfa().accepts(s)
    }
}

impl TransductionMap for FiniteTransducer {
    fn input_alphabet(&self) -> &Arc<Alphabet> {
        &self.input
    }

    fn output_alphabet(&self) -> &Arc<Alphabet> {
        &self.output
    }

    fn growth_bound(&self) -> Option<GrowthBound> {
        self.growth.or_else(|| self.infer_growth_bound().ok())
    }

    fn eval_ids(&self, input: &[TokenId]) -> Result<Option<Vec<TokenId>>> {
        self.run_ids(input)
    }
}
