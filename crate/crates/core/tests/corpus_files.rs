//! The files under `corpus/` match the built-in corpus and stay usable.

use std::path::PathBuf;

use ggr::corpus::{generate_dataset, CorpusSpec};
use ggr::engine::EngineLimits;
use ggr::rule::parse_grammar;

fn read(name: &str) -> String {
    let p: PathBuf = [env!("CARGO_MANIFEST_DIR"), "corpus", name]
        .iter()
        .collect();
    std::fs::read_to_string(p).unwrap()
}

#[test]
fn grammar_files_match_builders() {
    for name in CorpusSpec::NAMES {
        let file = parse_grammar(&read(&format!("{name}.ggr"))).unwrap();
        let built = CorpusSpec::named(name).unwrap().build().unwrap();
        assert_eq!(file.to_dsl(), built.to_dsl(), "{name}");
    }
}

#[test]
fn lake_dataset_file_is_consistent_with_the_grammar() {
    let g = CorpusSpec::named("lake").unwrap().build().unwrap();
    let pairs = generate_dataset(&g, 3, 20, 1, &EngineLimits::default()).unwrap();
    let text: String = pairs.iter().map(|(i, o)| format!("{i}\t{o}\n")).collect();
    assert_eq!(read("lake.tsv"), text);
}

#[test]
fn unknown_corpus_name_is_rejected() {
    assert!(CorpusSpec::named("klingon").is_err());
}
