//! Line-oriented text format.
//!
//! ```text
//! # comment
//! inputs: a b
//! outputs: x y
//! initial: q0
//! final: q0 q1
//! q0 q1 a : x x
//! q1 q0 @eps@ :
//! ```
//! `outputs:` may be omitted for acceptors; it then defaults to the input alphabet.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{Edge, FiniteTransducer};
use crate::alphabet::Alphabet;
use crate::automaton::StateId;
use crate::error::{Error, Result};

pub const EPSILON: &str = "@eps@";

fn ferr(line: usize, msg: impl Into<String>) -> Error {
    Error::Format {
        line,
        msg: msg.into(),
    }
}

impl FiniteTransducer {
    pub fn parse(text: &str) -> Result<Self> {
        let mut inputs: Option<Arc<Alphabet>> = None;
        let mut outputs: Option<Arc<Alphabet>> = None;
        let mut initial: Option<(usize, String)> = None;
        let mut finals: Vec<(usize, String)> = Vec::new();
        let mut raw_edges: Vec<(usize, Vec<&str>, Vec<&str>)> = Vec::new();

        for (n, line) in text.lines().enumerate() {
            let n = n + 1;
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((key, rest)) = line.split_once(':') {
                let key = key.trim();
                let words: Vec<&str> = rest.split_whitespace().collect();
                match key {
                    "inputs" => {
                        inputs = Some(Arc::new(
                            Alphabet::new(words.iter().copied())
                                .map_err(|e| ferr(n, e.to_string()))?,
                        ))
                    }
                    "outputs" => {
                        outputs = Some(Arc::new(
                            Alphabet::new(words.iter().copied())
                                .map_err(|e| ferr(n, e.to_string()))?,
                        ))
                    }
                    "initial" => match words.as_slice() {
                        [s] => initial = Some((n, s.to_string())),
                        _ => return Err(ferr(n, "`initial:` takes exactly one state")),
                    },
                    "final" => finals.extend(words.iter().map(|w| (n, w.to_string()))),
                    _ => {
                        let head: Vec<&str> = key.split_whitespace().collect();
                        if head.len() != 3 {
                            return Err(ferr(n, format!("unrecognized line `{line}`")));
                        }
                        raw_edges.push((n, head, words));
                    }
                }
            } else {
                return Err(ferr(
                    n,
                    format!("expected `SRC DST IN : OUT...`, got `{line}`"),
                ));
            }
        }

        let inputs = inputs.ok_or_else(|| ferr(0, "missing `inputs:` header"))?;
        let outputs = outputs.unwrap_or_else(|| Arc::clone(&inputs));
        let (init_line, init_name) = initial.ok_or_else(|| ferr(0, "missing `initial:` header"))?;

        let mut names: Vec<String> = Vec::new();
        let mut ids: HashMap<String, StateId> = HashMap::new();
        let mut intern = |s: &str| -> StateId {
            if let Some(&id) = ids.get(s) {
                return id;
            }
            let id = names.len() as StateId;
            names.push(s.to_string());
            ids.insert(s.to_string(), id);
            id
        };
        let init = intern(&init_name);
        let _ = init_line;
        let mut edges = Vec::with_capacity(raw_edges.len());
        for (n, head, outs) in &raw_edges {
            let src = intern(head[0]);
            let dst = intern(head[1]);
            let input = if head[2] == EPSILON {
                None
            } else {
                Some(
                    inputs
                        .id(head[2])
                        .ok_or_else(|| ferr(*n, format!("unknown input token `{}`", head[2])))?,
                )
            };
            let output = outs
                .iter()
                .map(|t| {
                    outputs
                        .id(t)
                        .ok_or_else(|| ferr(*n, format!("unknown output token `{t}`")))
                })
                .collect::<Result<Vec<_>>>()?;
            edges.push(Edge {
                src,
                dst,
                input,
                output,
            });
        }
        let halting: Vec<StateId> = finals.iter().map(|(_, s)| intern(s)).collect();
        FiniteTransducer::new(names, inputs, outputs, init, halting, edges)
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "inputs: {}", self.input.tokens().join(" "));
        let _ = writeln!(out, "outputs: {}", self.output.tokens().join(" "));
        let _ = writeln!(out, "initial: {}", self.state_names[self.initial as usize]);
        let finals: Vec<&str> = self
            .halting_states()
            .map(|s| self.state_names[s as usize].as_str())
            .collect();
        let _ = writeln!(out, "final: {}", finals.join(" "));
        for e in &self.edges {
            let input = e.input.map_or(EPSILON, |t| self.input.token(t));
            let _ = write!(
                out,
                "{} {} {} :",
                self.state_names[e.src as usize], self.state_names[e.dst as usize], input
            );
            for &o in &e.output {
                let _ = write!(out, " {}", self.output.token(o));
            }
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const EVEN: &str = "\
# even-length strings over {a}
inputs: a
initial: e
final: e
e o a :
o e a :
";

    #[test]
    fn parses_acceptor_without_outputs() {
        let t = FiniteTransducer::parse(EVEN).unwrap();
        assert_eq!(t.num_states(), 2);
        assert!(t.is_deterministic());
        assert!(t.accepts(&[0, 0]));
        assert!(!t.accepts(&[0]));
    }

    #[test]
    fn text_roundtrip() {
        let src = "inputs: a b\noutputs: x y\ninitial: p\nfinal: q\np q a : x y\nq p @eps@ :\nq q b : y\n";
        let t = FiniteTransducer::parse(src).unwrap();
        assert!(!t.is_deterministic());
        let again = FiniteTransducer::parse(&t.to_text()).unwrap();
        assert_eq!(again.to_text(), t.to_text());
        assert_eq!(again.edges(), t.edges());
    }

    #[test]
    fn reports_line_numbers() {
        let err = FiniteTransducer::parse("inputs: a\ninitial: p\np p z :\n").unwrap_err();
        assert!(matches!(err, Error::Format { line: 3, .. }), "{err}");
        assert!(FiniteTransducer::parse("initial: p\n").is_err());
        assert!(FiniteTransducer::parse("inputs: a\ninitial: p\nnonsense\n").is_err());
    }
}
