//! Built-in example grammars and seeded dataset generation.

use std::collections::BTreeSet;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::alphabet::{all_strings, TokenString};
use crate::engine::{CompiledGrammar, EngineLimits};
use crate::error::{Error, Result};
use crate::rule::{parse_grammar, Grammar};

/// Largest number of candidate inputs [`generate_dataset`] will enumerate.
pub const MAX_ENUMERATED_INPUTS: u128 = 5_000_000;

/// Lake word meanings: the four content words and their colors.
pub const LAKE_COLORS: [(&str, &str); 4] = [
    ("zup", "green"),
    ("fep", "rose"),
    ("gazzer", "red"),
    ("tufa", "bourbon"),
];

/// Lake function words.
pub const LAKE_FUNCTION_WORDS: [&str; 3] = ["lug", "kiki", "blicket"];

/// Opening and closing tags of the tagged Lake variant.
pub const LAKE_TAGS: (&str, &str) = ("l", "l'");

/// Variants of the Lake grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct LakeOptions {
    /// Function-word arguments range over `SIGMA+` and concatenation splits
    /// off one word at a time, so phrases compose.
    pub generalized: bool,
    /// Every word is written `l w l'`; rule arguments are tag-delimited words.
    pub tagged: bool,
}

/// One tag class of the tagged-brackets corpus: a permutation of its words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TagClass {
    pub permutation: Vec<(String, String)>,
}

/// Selects a built-in corpus and its parameters.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum CorpusSpec {
    GordonPermutation {
        permutation: Vec<(String, String)>,
    },
    AndAfter {
        ground: Vec<(String, String)>,
    },
    TaggedBrackets {
        classes: Vec<TagClass>,
        plain: Vec<String>,
    },
    Lake(LakeOptions),
}

impl CorpusSpec {
    /// Names accepted by [`CorpusSpec::named`].
    pub const NAMES: [&'static str; 6] = [
        "gordon",
        "and-after",
        "tagged",
        "lake",
        "lake-generalized",
        "lake-tagged",
    ];

    /// The default parameters of each built-in corpus.
    pub fn named(name: &str) -> Result<Self> {
        let pairs = |v: &[(&str, &str)]| {
            v.iter()
                .map(|&(a, b)| (a.to_string(), b.to_string()))
                .collect()
        };
        Ok(match name {
            "gordon" => CorpusSpec::GordonPermutation {
                permutation: pairs(&[("a", "b"), ("b", "a"), ("c", "c")]),
            },
            "and-after" => CorpusSpec::AndAfter {
                ground: pairs(&AND_AFTER_GROUND),
            },
            "tagged" => CorpusSpec::TaggedBrackets {
                classes: vec![
                    TagClass {
                        permutation: pairs(&[("jump", "walk"), ("walk", "jump")]),
                    },
                    TagClass {
                        permutation: pairs(&[("left", "right"), ("right", "left")]),
                    },
                ],
                plain: vec!["and".into(), "twice".into()],
            },
            "lake" => CorpusSpec::Lake(LakeOptions::default()),
            "lake-generalized" => CorpusSpec::Lake(LakeOptions {
                generalized: true,
                tagged: false,
            }),
            "lake-tagged" => CorpusSpec::Lake(LakeOptions {
                generalized: false,
                tagged: true,
            }),
            other => {
                return Err(Error::InvalidArgument(format!(
                    "unknown corpus `{other}`; expected one of {}",
                    Self::NAMES.join(", ")
                )))
            }
        })
    }

    pub fn build(&self) -> Result<Grammar> {
        match self {
            CorpusSpec::GordonPermutation { permutation } => {
                build_gordon_grammar(&str_pairs(permutation))
            }
            CorpusSpec::AndAfter { ground } => build_and_after_grammar(&str_pairs(ground)),
            CorpusSpec::TaggedBrackets { classes, plain } => {
                let classes: Vec<Vec<(&str, &str)>> =
                    classes.iter().map(|c| str_pairs(&c.permutation)).collect();
                let plain: Vec<&str> = plain.iter().map(String::as_str).collect();
                build_tagged_grammar(&classes, &plain)
            }
            CorpusSpec::Lake(o) => build_lake_grammar(*o),
        }
    }
}

/// Default atomic commands of the AND/AFTER corpus.
pub const AND_AFTER_GROUND: [(&str, &str); 4] = [
    ("RUN", "RUN"),
    ("WALK", "WALK"),
    ("RUN LEFT", "LTURN RUN"),
    ("WALK LEFT", "LTURN WALK"),
];

fn str_pairs(v: &[(String, String)]) -> Vec<(&str, &str)> {
    v.iter().map(|(a, b)| (a.as_str(), b.as_str())).collect()
}

fn quote(s: &str) -> String {
    format!("\"{s}\"")
}

fn quote_all<'a>(words: impl IntoIterator<Item = &'a str>) -> String {
    words.into_iter().map(quote).collect::<Vec<_>>().join(" ")
}

fn push_unique<'a>(v: &mut Vec<&'a str>, w: &'a str) {
    if !v.contains(&w) {
        v.push(w);
    }
}

fn check_bijection(perm: &[(&str, &str)]) -> Result<()> {
    let from: BTreeSet<&str> = perm.iter().map(|p| p.0).collect();
    let to: BTreeSet<&str> = perm.iter().map(|p| p.1).collect();
    if perm.is_empty() || from.len() != perm.len() || from != to {
        return Err(Error::InvalidArgument(
            "permutation table must be a bijection on its tokens".into(),
        ));
    }
    if let Some(w) = from.iter().find(|w| w.split_whitespace().count() != 1) {
        return Err(Error::InvalidArgument(format!(
            "`{w}` is not a single token"
        )));
    }
    Ok(())
}

/// Token-wise permutation: ground rules `T(a) = perm(a)` and concatenation
/// over non-empty strings.
pub fn build_gordon_grammar(perm: &[(&str, &str)]) -> Result<Grammar> {
    check_bijection(perm)?;
    let sigma = quote_all(perm.iter().map(|p| p.0));
    let mut src = format!("input-alphabet {sigma}\noutput-alphabet {sigma}\n");
    for (a, b) in perm {
        src.push_str(&format!("T({}) = {}\n", quote(a), quote(b)));
    }
    src.push_str("forall x1 in SIGMA+, x2 in SIGMA+: T(x1 x2) = T(x1) T(x2)\n");
    parse_grammar(&src)
}

/// The AND/AFTER command grammar. Each side of a connective is one of the
/// atomic commands in `ground`, so a sentence has at most one connective.
pub fn build_and_after_grammar(ground: &[(&str, &str)]) -> Result<Grammar> {
    if ground.is_empty() {
        return Err(Error::InvalidArgument("ground table is empty".into()));
    }
    let mut input = Vec::new();
    let mut output = Vec::new();
    for (i, o) in ground {
        i.split_whitespace()
            .for_each(|w| push_unique(&mut input, w));
        o.split_whitespace()
            .for_each(|w| push_unique(&mut output, w));
    }
    push_unique(&mut input, "AND");
    push_unique(&mut input, "AFTER");
    let atoms: Vec<String> = ground.iter().map(|(i, _)| quote(i)).collect();
    let mut src = format!(
        "input-alphabet {}\noutput-alphabet {}\nclass-domain CMD = {{{}}}\n\
         forall x1 in CMD, x2 in CMD: T(x1 \"AND\" x2) = T(x1) T(x2)\n\
         forall x1 in CMD, x2 in CMD: T(x1 \"AFTER\" x2) = T(x2) T(x1)\n",
        quote_all(input.iter().copied()),
        quote_all(output.iter().copied()),
        atoms.join(", ")
    );
    for (i, o) in ground {
        src.push_str(&format!("T({}) = {}\n", quote(i), quote(o)));
    }
    parse_grammar(&src)
}

/// Tagged-brackets grammar. Class `i` (from 1) uses tags `l<i>` and `l<i>'`;
/// a tagged word `l<i> w l<i>'` becomes `l<i> perm_i(w) l<i>'`. Sentences are
/// sequences of tagged words and `plain` words, which map to themselves.
pub fn build_tagged_grammar(classes: &[Vec<(&str, &str)>], plain: &[&str]) -> Result<Grammar> {
    if classes.is_empty() {
        return Err(Error::InvalidArgument(
            "at least one tag class is required".into(),
        ));
    }
    let mut sigma: Vec<&str> = Vec::new();
    for c in classes {
        check_bijection(c)?;
        for (w, _) in c {
            if sigma.contains(w) {
                return Err(Error::InvalidArgument(format!(
                    "`{w}` belongs to two tag classes"
                )));
            }
            sigma.push(w);
        }
    }
    for w in plain {
        if sigma.contains(w) {
            return Err(Error::InvalidArgument(format!(
                "plain word `{w}` is also tagged"
            )));
        }
        sigma.push(w);
    }
    let tags: Vec<(String, String)> = (1..=classes.len())
        .map(|i| (format!("l{i}"), format!("l{i}'")))
        .collect();
    let mut tokens: Vec<&str> = sigma.clone();
    for (a, b) in &tags {
        tokens.push(a);
        tokens.push(b);
    }
    let alpha = quote_all(tokens.iter().copied());
    let mut src = format!("input-alphabet {alpha}\noutput-alphabet {alpha}\n");
    let mut units = Vec::new();
    for (i, c) in classes.iter().enumerate() {
        let (open, close) = &tags[i];
        let members: Vec<String> = c.iter().map(|(w, _)| quote(w)).collect();
        src.push_str(&format!(
            "class-domain C{} = {{{}}}\n",
            i + 1,
            members.join(", ")
        ));
        units.extend(c.iter().map(|(w, _)| quote(&format!("{open} {w} {close}"))));
    }
    units.extend(plain.iter().map(|w| quote(w)));
    src.push_str(&format!("class-domain UNIT = {{{}}}\n", units.join(", ")));
    for (i, (open, close)) in tags.iter().enumerate() {
        src.push_str(&format!(
            "forall x1 in C{n}: T({o} x1 {c}) = {o} T(x1) {c}\n",
            n = i + 1,
            o = quote(open),
            c = quote(close)
        ));
    }
    src.push_str("forall x1 in UNIT, x2 in SIGMA+: T(x1 x2) = T(x1) T(x2)\n");
    for c in classes {
        for (a, b) in c {
            src.push_str(&format!("T({}) = {}\n", quote(a), quote(b)));
        }
    }
    for w in plain {
        src.push_str(&format!("T({}) = {}\n", quote(w), quote(w)));
    }
    parse_grammar(&src)
}

/// The Lake grammar: four color facts and the lug, kiki, blicket and
/// concatenation rules.
pub fn build_lake_grammar(options: LakeOptions) -> Result<Grammar> {
    if options.generalized && options.tagged {
        return Err(Error::InvalidArgument(
            "the generalized and tagged Lake variants are exclusive".into(),
        ));
    }
    let words: Vec<&str> = LAKE_COLORS
        .iter()
        .map(|c| c.0)
        .chain(LAKE_FUNCTION_WORDS)
        .collect();
    let mut input = words.clone();
    if options.tagged {
        input.extend([LAKE_TAGS.0, LAKE_TAGS.1]);
    }
    let mut src = format!(
        "input-alphabet {}\noutput-alphabet {}\n",
        quote_all(input.iter().copied()),
        quote_all(LAKE_COLORS.iter().map(|c| c.1))
    );
    for (w, c) in LAKE_COLORS {
        src.push_str(&format!("T({}) = {}\n", quote(w), quote(c)));
    }
    let rules = if options.tagged {
        src.push_str(&format!(
            "class-domain WORD = {{{}}}\n",
            quote_all(words.iter().copied()).replace(' ', ", ")
        ));
        let w = |x: &str| format!("\"l\" {x} \"l'\"");
        let f = |name: &str| format!("\"l\" \"{name}\" \"l'\"");
        [
            format!(
                "forall x1 in WORD, x2 in WORD: T({} {} {}) = T(x2) T(x1) T(x2) T(x1) T(x1)",
                w("x1"),
                f("lug"),
                w("x2")
            ),
            format!(
                "forall x1 in WORD, x2 in WORD: T({} {} {}) = T(x1) T(x2)",
                w("x1"),
                f("kiki"),
                w("x2")
            ),
            format!(
                "forall x1 in WORD: T({} {}) = T(x1) T(x1)",
                w("x1"),
                f("blicket")
            ),
            format!(
                "forall x1 in WORD, x2 in WORD: T({} {}) = T(x1) T(x2)",
                w("x1"),
                w("x2")
            ),
        ]
    } else {
        let (d, first) = if options.generalized {
            ("SIGMA+", "SIGMA1")
        } else {
            ("SIGMA1", "SIGMA1")
        };
        [
            format!(
                "forall x1 in {d}, x2 in {d}: T(x1 \"lug\" x2) = T(x2) T(x1) T(x2) T(x1) T(x1)"
            ),
            format!("forall x1 in {d}, x2 in {d}: T(x1 \"kiki\" x2) = T(x1) T(x2)"),
            format!("forall x1 in {d}: T(x1 \"blicket\") = T(x1) T(x1)"),
            format!("forall x1 in {first}, x2 in {d}: T(x1 x2) = T(x1) T(x2)"),
        ]
    };
    for r in rules {
        src.push_str(&r);
        src.push('\n');
    }
    parse_grammar(&src)
}

/// A duplicate-free sample of `count` pairs `(input, interpret(input))` with
/// `1 <= len(input) <= max_len`, drawn uniformly from the interpretable inputs
/// with a ChaCha generator seeded by `seed` and returned in canonical order.
/// When fewer than `count` inputs are interpretable, all of them are returned.
///
/// Inputs with no matching rule are outside the grammar's domain and are not
/// sampled; any other interpretation failure is an error.
pub fn generate_dataset(
    g: &Grammar,
    max_len: usize,
    count: usize,
    seed: u64,
    limits: &EngineLimits,
) -> Result<Vec<(TokenString, TokenString)>> {
    let n = g.input_alphabet().len();
    let space: u128 = (1..=max_len as u32)
        .map(|l| (n as u128).saturating_pow(l))
        .sum();
    if space > MAX_ENUMERATED_INPUTS {
        return Err(Error::InvalidArgument(format!(
            "{space} candidate inputs exceed the limit of {MAX_ENUMERATED_INPUTS}; lower max-len"
        )));
    }
    let cg = CompiledGrammar::new(Arc::new(g.clone()));
    let mut defined = Vec::new();
    for len in 1..=max_len {
        for s in all_strings(n, len) {
            match cg.interpret_ids(&s, limits) {
                Ok(o) => defined.push((s, o)),
                Err(Error::NoRuleMatches(_)) => {}
                Err(e) => {
                    return Err(Error::InvalidArgument(format!(
                        "grammar is not total on `{}`: {e}",
                        g.input_alphabet().render(&s)
                    )))
                }
            }
        }
    }
    let chosen: Vec<usize> = if count >= defined.len() {
        (0..defined.len()).collect()
    } else {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut idx = rand::seq::index::sample(&mut rng, defined.len(), count).into_vec();
        idx.sort_unstable();
        idx
    };
    let (ia, oa) = (g.input_alphabet(), g.output_alphabet());
    Ok(chosen
        .into_iter()
        .map(|i| {
            let (s, o) = &defined[i];
            (
                TokenString::from_ids(Arc::clone(ia), s.clone()),
                TokenString::from_ids(Arc::clone(oa), o.clone()),
            )
        })
        .collect())
}
