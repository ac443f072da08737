//! Quotients of small machines and whether they preserve behavior.
//!
//! `cargo run --example quotient_symmetry`

use ggr::transducer::{
    check_quotient_symmetry_acceptor, check_quotient_symmetry_transducer, quotient,
    FiniteTransducer, StatePartition, DEFAULT_STATE_CAP,
};

const EVEN: &str = "\
inputs: a
initial: even
final: even
even odd a : a
odd even a : a
";

// Two copies of a one-state identity map; merging them changes nothing.
const TWIN: &str = "\
inputs: a b
outputs: a b
initial: p
final: p q
p q a : a
p q b : b
q p a : a
q p b : b
";

fn main() -> ggr::error::Result<()> {
    let even = FiniteTransducer::parse(EVEN)?;
    let merge = StatePartition::parse("even odd", &even)?;
    println!("{}", quotient(&even, &merge)?.to_text());
    println!(
        "even/merge: {:?}",
        check_quotient_symmetry_acceptor(&even, &merge, DEFAULT_STATE_CAP)?
    );
    let keep = StatePartition::singletons(even.num_states());
    println!(
        "even/identity: {:?}",
        check_quotient_symmetry_acceptor(&even, &keep, DEFAULT_STATE_CAP)?
    );

    let twin = FiniteTransducer::parse(TWIN)?;
    let merge = StatePartition::parse("p q", &twin)?;
    println!(
        "twin/merge: {:?}",
        check_quotient_symmetry_transducer(&twin, &merge, None)?
    );
    Ok(())
}
