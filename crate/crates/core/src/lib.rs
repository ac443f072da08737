pub mod alphabet;
pub mod automaton;
pub mod cli;
pub mod corpus;
pub mod distance;
pub mod domain;
pub mod engine;
pub mod err;
pub mod error;
pub mod map;
pub mod rule;
pub mod search;
pub mod transducer;
