//! Token-level indel and Levenshtein distances.
//!
//! `cargo run --example edit_distance`

use std::sync::Arc;

use ggr::alphabet::{Alphabet, TokenString};
use ggr::distance::{indel_distance, levenshtein_distance};

fn main() -> ggr::error::Result<()> {
    let a = Arc::new(Alphabet::new(["JUMP", "WALK", "RUN", "LTURN"])?);
    let pairs = [
        ("JUMP WALK", "WALK JUMP"),
        ("RUN", "LTURN RUN"),
        ("JUMP JUMP RUN", "RUN"),
        ("WALK", "RUN"),
        ("", "LTURN LTURN"),
    ];
    println!("{:<16}{:<16}{:>6}{:>6}", "a", "b", "indel", "lev");
    for (x, y) in pairs {
        let (s, t) = (TokenString::parse(&a, x)?, TokenString::parse(&a, y)?);
        println!(
            "{:<16}{:<16}{:>6}{:>6}",
            x,
            y,
            indel_distance(&s, &t)?,
            levenshtein_distance(&s, &t)?
        );
    }
    Ok(())
}
