//! Generalized transduction rules and their grammar-rule restriction.
//!
//! A transduction rule equates two concatenations of literal blocks and calls
//! `T(pattern)`, universally quantified over variables ranging over regular
//! domains. A grammar rule is the restricted form
//!
//! ```text
//! forall x1 in C1, ..., xh in Ch:  T(A) = B0 T(A1) B1 ... T(Ak) Bk
//! ```
//!
//! with no output variables, a single call on the left, and every argument
//! pattern `Ai` no longer than `A`. Grammar rules act as production rules: they
//! say how to transduce an instance of `A` from the transductions of shorter
//! strings.

mod dsl;

pub use dsl::{parse_grammar, parse_rule_file, DomainSpec, NamedDomain, RuleFile};

use std::fmt::{self, Write as _};
use std::sync::Arc;

use crate::alphabet::{Alphabet, TokenId, TokenString};
use crate::domain::VariableDomain;
use crate::error::{Error, Result};

/// One element of a pattern: a variable (by index) or a literal token.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sym {
    Var(usize),
    Tok(TokenId),
}

/// A string over variables and tokens. Every element counts 1 toward its length.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pattern(pub Vec<Sym>);

impl Pattern {
    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn multiplicity(&self, var: usize) -> usize {
        self.0.iter().filter(|&&s| s == Sym::Var(var)).count()
    }

    pub fn literal_count(&self) -> usize {
        self.0.iter().filter(|s| matches!(s, Sym::Tok(_))).count()
    }

    pub fn vars(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().filter_map(|s| match s {
            Sym::Var(v) => Some(*v),
            Sym::Tok(_) => None,
        })
    }

    /// Appends the pattern with each variable replaced by its binding.
    pub fn instantiate_into<B: AsRef<[TokenId]>>(&self, bindings: &[B], out: &mut Vec<TokenId>) {
        for s in &self.0 {
            match *s {
                Sym::Var(v) => out.extend_from_slice(bindings[v].as_ref()),
                Sym::Tok(t) => out.push(t),
            }
        }
    }

    pub fn instantiate<B: AsRef<[TokenId]>>(&self, bindings: &[B]) -> Vec<TokenId> {
        let mut out = Vec::new();
        self.instantiate_into(bindings, &mut out);
        out
    }

    /// Length after substitution, given binding lengths.
    pub fn instantiated_len(&self, lens: &[usize]) -> usize {
        self.0
            .iter()
            .map(|s| match *s {
                Sym::Var(v) => lens[v],
                Sym::Tok(_) => 1,
            })
            .sum()
    }

    fn write(&self, f: &mut impl fmt::Write, vars: &[VarDecl], alpha: &Alphabet) -> fmt::Result {
        for (i, s) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            match *s {
                Sym::Var(v) => f.write_str(&vars[v].name)?,
                Sym::Tok(t) => write!(f, "\"{}\"", alpha.token(t))?,
            }
        }
        Ok(())
    }
}

/// A quantified variable and the domain it ranges over.
#[derive(Debug, Clone, PartialEq)]
pub struct VarDecl {
    pub name: String,
    /// Builtin (`SIGMA+`) or declared domain name, used when printing.
    pub domain_name: String,
    pub domain: Arc<VariableDomain>,
}

/// Source position of a rule (1-based).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Span {
    pub line: usize,
    pub col: usize,
}

/// An element of either side of a transduction rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Item {
    /// An output token.
    Lit(TokenId),
    /// An output variable `y_j`.
    OutVar(usize),
    /// `T(pattern)` with the pattern over input variables and input tokens.
    Call(Pattern),
}

/// A general transduction rule. Parsed and stored, but only its grammar-rule
/// form (see [`validate_ggr`]) has execution and error semantics.
#[derive(Debug, Clone)]
pub struct GtrRule {
    pub input: Arc<Alphabet>,
    pub output: Arc<Alphabet>,
    pub input_vars: Vec<VarDecl>,
    pub output_vars: Vec<VarDecl>,
    pub lhs: Vec<Item>,
    pub rhs: Vec<Item>,
    pub span: Span,
}

impl GtrRule {
    /// Checks the well-formedness conditions every transduction rule must meet:
    /// at least one call on the left, and every variable used somewhere.
    pub fn check_well_formed(&self) -> Result<()> {
        let calls = |side: &[Item]| side.iter().filter(|i| matches!(i, Item::Call(_))).count();
        if calls(&self.lhs) == 0 {
            return Err(Error::InvalidRule(format!(
                "{}:{}: the left-hand side needs at least one T(...) call",
                self.span.line, self.span.col
            )));
        }
        for (v, decl) in self.input_vars.iter().enumerate() {
            let used = self.lhs.iter().chain(&self.rhs).any(|i| match i {
                Item::Call(p) => p.multiplicity(v) > 0,
                _ => false,
            });
            if !used {
                return Err(Error::InvalidRule(format!(
                    "{}:{}: input variable `{}` never occurs",
                    self.span.line, self.span.col, decl.name
                )));
            }
        }
        for (v, decl) in self.output_vars.iter().enumerate() {
            if !self
                .lhs
                .iter()
                .chain(&self.rhs)
                .any(|i| *i == Item::OutVar(v))
            {
                return Err(Error::InvalidRule(format!(
                    "{}:{}: output variable `{}` never occurs",
                    self.span.line, self.span.col, decl.name
                )));
            }
        }
        Ok(())
    }

    fn write_side(&self, f: &mut impl fmt::Write, side: &[Item]) -> fmt::Result {
        for (i, item) in side.iter().enumerate() {
            if i > 0 {
                f.write_char(' ')?;
            }
            match item {
                Item::Lit(t) => write!(f, "\"{}\"", self.output.token(*t))?,
                Item::OutVar(v) => f.write_str(&self.output_vars[*v].name)?,
                Item::Call(p) => {
                    f.write_str("T(")?;
                    p.write(f, &self.input_vars, &self.input)?;
                    f.write_char(')')?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Display for GtrRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let binds: Vec<String> = self
            .input_vars
            .iter()
            .chain(&self.output_vars)
            .map(|v| format!("{} in {}", v.name, v.domain_name))
            .collect();
        if !binds.is_empty() {
            write!(f, "forall {}: ", binds.join(", "))?;
        }
        self.write_side(f, &self.lhs)?;
        f.write_str(" =")?;
        if !self.rhs.is_empty() {
            f.write_char(' ')?;
            self.write_side(f, &self.rhs)?;
        }
        Ok(())
    }
}

/// A right-hand-side element of a grammar rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RhsItem {
    Lit(TokenId),
    Call(Pattern),
}

/// A generalized grammar rule `forall x_i in C_i: T(A) = B0 T(A1) B1 ... T(Ak) Bk`.
#[derive(Debug, Clone)]
pub struct GgrRule {
    input: Arc<Alphabet>,
    output: Arc<Alphabet>,
    vars: Vec<VarDecl>,
    lhs: Pattern,
    rhs: Vec<RhsItem>,
    span: Span,
}

/// A violated grammar-rule side condition.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GgrViolation {
    /// The rule quantifies over output-language variables.
    OutputVariables(Vec<String>),
    /// The left side is not exactly one call (`calls` calls, `literals` output tokens or variables).
    LhsNotSingleCall { calls: usize, literals: usize },
    /// Argument `index` (1-based) has pattern length above the left pattern's.
    ArgumentLonger {
        index: usize,
        len: usize,
        lhs_len: usize,
    },
    /// An input variable occurs only on the right; its value would not be
    /// determined by the transduced string.
    VariableNotInLhs(String),
}

impl fmt::Display for GgrViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GgrViolation::OutputVariables(v) => {
                write!(f, "output variables present: {}", v.join(", "))
            }
            GgrViolation::LhsNotSingleCall { calls, literals } => write!(
                f,
                "left side must be a single T(...) call (found {calls} calls, {literals} other items)"
            ),
            GgrViolation::ArgumentLonger { index, len, lhs_len } => write!(
                f,
                "argument {index} has length {len}, longer than the left pattern ({lhs_len})"
            ),
            GgrViolation::VariableNotInLhs(v) => {
                write!(f, "variable `{v}` does not occur in the left pattern")
            }
        }
    }
}

/// Returns the grammar-rule view of `r`, or every violated side condition.
pub fn validate_ggr(r: &GtrRule) -> std::result::Result<GgrRule, Vec<GgrViolation>> {
    let mut violations = Vec::new();
    if !r.output_vars.is_empty() {
        violations.push(GgrViolation::OutputVariables(
            r.output_vars.iter().map(|v| v.name.clone()).collect(),
        ));
    }
    let calls: Vec<&Pattern> = r
        .lhs
        .iter()
        .filter_map(|i| match i {
            Item::Call(p) => Some(p),
            _ => None,
        })
        .collect();
    let others = r.lhs.len() - calls.len();
    if calls.len() != 1 || others != 0 {
        violations.push(GgrViolation::LhsNotSingleCall {
            calls: calls.len(),
            literals: others,
        });
    }
    let lhs = if calls.len() == 1 {
        Some(calls[0].clone())
    } else {
        None
    };
    if let Some(lhs) = &lhs {
        let mut index = 0;
        for item in &r.rhs {
            if let Item::Call(p) = item {
                index += 1;
                if p.len() > lhs.len() {
                    violations.push(GgrViolation::ArgumentLonger {
                        index,
                        len: p.len(),
                        lhs_len: lhs.len(),
                    });
                }
            }
        }
        for (v, decl) in r.input_vars.iter().enumerate() {
            if lhs.multiplicity(v) == 0 {
                violations.push(GgrViolation::VariableNotInLhs(decl.name.clone()));
            }
        }
    }
    if !violations.is_empty() {
        return Err(violations);
    }
    let rhs = r
        .rhs
        .iter()
        .map(|i| match i {
            Item::Lit(t) => RhsItem::Lit(*t),
            Item::Call(p) => RhsItem::Call(p.clone()),
            Item::OutVar(_) => unreachable!("rejected above"),
        })
        .collect();
    Ok(GgrRule {
        input: Arc::clone(&r.input),
        output: Arc::clone(&r.output),
        vars: r.input_vars.clone(),
        lhs: lhs.expect("checked above"),
        rhs,
        span: r.span,
    })
}

/// Both sides of a rule after substituting every variable.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroundEquation {
    /// `A` with substitutions: the input whose transduction is the left side.
    pub lhs_input: TokenString,
    pub rhs: Vec<GroundItem>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum GroundItem {
    Lit(TokenString),
    /// A transduction argument `A_i` with substitutions.
    Call(TokenString),
}

impl GroundEquation {
    pub fn args(&self) -> Vec<&TokenString> {
        self.rhs
            .iter()
            .filter_map(|i| match i {
                GroundItem::Call(s) => Some(s),
                GroundItem::Lit(_) => None,
            })
            .collect()
    }

    pub fn literals(&self) -> Vec<&TokenString> {
        self.rhs
            .iter()
            .filter_map(|i| match i {
                GroundItem::Lit(s) => Some(s),
                GroundItem::Call(_) => None,
            })
            .collect()
    }
}

impl GgrRule {
    /// Builds a rule directly; the grammar-rule side conditions are enforced.
    pub fn new(
        input: Arc<Alphabet>,
        output: Arc<Alphabet>,
        vars: Vec<VarDecl>,
        lhs: Pattern,
        rhs: Vec<RhsItem>,
    ) -> Result<Self> {
        let gtr = GtrRule {
            input,
            output,
            input_vars: vars,
            output_vars: Vec::new(),
            lhs: vec![Item::Call(lhs)],
            rhs: rhs
                .into_iter()
                .map(|i| match i {
                    RhsItem::Lit(t) => Item::Lit(t),
                    RhsItem::Call(p) => Item::Call(p),
                })
                .collect(),
            span: Span::default(),
        };
        check_pattern_refs(&gtr)?;
        gtr.check_well_formed()?;
        validate_ggr(&gtr).map_err(|v| {
            Error::InvalidRule(
                v.iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>()
                    .join("; "),
            )
        })
    }

    pub fn input_alphabet(&self) -> &Arc<Alphabet> {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Arc<Alphabet> {
        &self.output
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    /// Number of quantified variables.
    pub fn h(&self) -> usize {
        self.vars.len()
    }

    /// Number of calls on the right.
    pub fn k(&self) -> usize {
        self.calls().count()
    }

    pub fn lhs(&self) -> &Pattern {
        &self.lhs
    }

    pub fn rhs(&self) -> &[RhsItem] {
        &self.rhs
    }

    pub fn span(&self) -> Span {
        self.span
    }

    pub fn calls(&self) -> impl Iterator<Item = &Pattern> + '_ {
        self.rhs.iter().filter_map(|i| match i {
            RhsItem::Call(p) => Some(p),
            RhsItem::Lit(_) => None,
        })
    }

    /// The literal blocks `B0 .. Bk` between calls.
    pub fn literal_blocks(&self) -> Vec<Vec<TokenId>> {
        let mut blocks = vec![Vec::new()];
        for item in &self.rhs {
            match item {
                RhsItem::Lit(t) => blocks.last_mut().expect("non-empty").push(*t),
                RhsItem::Call(_) => blocks.push(Vec::new()),
            }
        }
        blocks
    }

    pub fn literal_len(&self) -> usize {
        self.rhs
            .iter()
            .filter(|i| matches!(i, RhsItem::Lit(_)))
            .count()
    }

    /// `|A| + Σ|A_i| + Σ|B_j| + h`.
    pub fn complexity(&self) -> usize {
        self.lhs.len()
            + self.calls().map(Pattern::len).sum::<usize>()
            + self.literal_len()
            + self.h()
    }

    /// A rule with no variables and no calls, such as `T("zup") = "green"`.
    pub fn is_ground(&self) -> bool {
        self.h() == 0 && self.k() == 0
    }

    /// True when the right side is literally `T(A)`: the rule holds for every map.
    pub fn is_tautology(&self) -> bool {
        matches!(self.rhs.as_slice(), [RhsItem::Call(p)] if *p == self.lhs)
    }

    /// Largest multiplicity of any variable in `A` or any `A_i`.
    pub fn max_multiplicity(&self) -> usize {
        (0..self.h())
            .flat_map(|v| {
                std::iter::once(self.lhs.multiplicity(v))
                    .chain(self.calls().map(move |p| p.multiplicity(v)))
            })
            .max()
            .unwrap_or(0)
    }

    /// Substitutes `assignment[i]` for variable `i`.
    pub fn substitute(&self, assignment: &[TokenString]) -> Result<GroundEquation> {
        if assignment.len() != self.h() {
            return Err(Error::Substitution(format!(
                "expected {} bindings, got {}",
                self.h(),
                assignment.len()
            )));
        }
        for (decl, value) in self.vars.iter().zip(assignment) {
            if !decl.domain.contains_string(value) {
                return Err(Error::Substitution(format!(
                    "`{value}` is not in the domain {} of `{}`",
                    decl.domain_name, decl.name
                )));
            }
        }
        let ids: Vec<&[TokenId]> = assignment.iter().map(TokenString::ids).collect();
        let lhs_input = TokenString::from_ids(Arc::clone(&self.input), self.lhs.instantiate(&ids));
        let mut rhs: Vec<GroundItem> = Vec::new();
        for item in &self.rhs {
            match item {
                RhsItem::Lit(t) => match rhs.last_mut() {
                    Some(GroundItem::Lit(block)) => {
                        *block = block
                            .concat(&TokenString::from_ids(Arc::clone(&self.output), vec![*t]))
                            .expect("same alphabet");
                    }
                    _ => rhs.push(GroundItem::Lit(TokenString::from_ids(
                        Arc::clone(&self.output),
                        vec![*t],
                    ))),
                },
                RhsItem::Call(p) => rhs.push(GroundItem::Call(TokenString::from_ids(
                    Arc::clone(&self.input),
                    p.instantiate(&ids),
                ))),
            }
        }
        Ok(GroundEquation { lhs_input, rhs })
    }

    /// Substitution by variable name.
    pub fn substitute_named(&self, assignment: &[(&str, &str)]) -> Result<GroundEquation> {
        let mut values = Vec::with_capacity(self.h());
        for decl in &self.vars {
            let (_, text) = assignment
                .iter()
                .find(|(n, _)| *n == decl.name)
                .ok_or_else(|| Error::Substitution(format!("missing variable `{}`", decl.name)))?;
            values.push(TokenString::parse(&self.input, text)?);
        }
        self.substitute(&values)
    }

    pub fn to_gtr(&self) -> GtrRule {
        GtrRule {
            input: Arc::clone(&self.input),
            output: Arc::clone(&self.output),
            input_vars: self.vars.clone(),
            output_vars: Vec::new(),
            lhs: vec![Item::Call(self.lhs.clone())],
            rhs: self
                .rhs
                .iter()
                .map(|i| match i {
                    RhsItem::Lit(t) => Item::Lit(*t),
                    RhsItem::Call(p) => Item::Call(p.clone()),
                })
                .collect(),
            span: self.span,
        }
    }

    /// Structural identity, ignoring source positions.
    pub fn same_structure(&self, other: &GgrRule) -> bool {
        self.lhs == other.lhs
            && self.rhs == other.rhs
            && self.vars.len() == other.vars.len()
            && self
                .vars
                .iter()
                .zip(&other.vars)
                .all(|(a, b)| a.name == b.name && a.domain == b.domain)
            && *self.input == *other.input
            && *self.output == *other.output
    }
}

impl fmt::Display for GgrRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.to_gtr().fmt(f)
    }
}

fn check_pattern_refs(r: &GtrRule) -> Result<()> {
    for item in r.lhs.iter().chain(&r.rhs) {
        match item {
            Item::Call(p) => {
                for s in &p.0 {
                    match *s {
                        Sym::Var(v) if v >= r.input_vars.len() => {
                            return Err(Error::InvalidRule(format!("undeclared variable #{v}")))
                        }
                        Sym::Tok(t) if t as usize >= r.input.len() => {
                            return Err(Error::InvalidRule(format!("unknown input token #{t}")))
                        }
                        _ => {}
                    }
                }
            }
            Item::Lit(t) if *t as usize >= r.output.len() => {
                return Err(Error::InvalidRule(format!("unknown output token #{t}")))
            }
            Item::OutVar(v) if *v >= r.output_vars.len() => {
                return Err(Error::InvalidRule(format!(
                    "undeclared output variable #{v}"
                )))
            }
            _ => {}
        }
    }
    Ok(())
}

/// An ordered set of grammar rules over fixed alphabets. Order is match priority.
#[derive(Debug, Clone)]
pub struct Grammar {
    input: Arc<Alphabet>,
    output: Arc<Alphabet>,
    domains: Vec<NamedDomain>,
    rules: Vec<GgrRule>,
}

impl Grammar {
    pub fn new(
        input: Arc<Alphabet>,
        output: Arc<Alphabet>,
        domains: Vec<NamedDomain>,
        rules: Vec<GgrRule>,
    ) -> Result<Self> {
        for (i, r) in rules.iter().enumerate() {
            if *r.input != *input || *r.output != *output {
                return Err(Error::InvalidRule(format!(
                    "rule {} uses different alphabets than the grammar",
                    i + 1
                )));
            }
        }
        for (i, d) in domains.iter().enumerate() {
            if domains[..i].iter().any(|e| e.name == d.name) {
                return Err(Error::InvalidRule(format!(
                    "domain `{}` declared twice",
                    d.name
                )));
            }
        }
        Ok(Grammar {
            input,
            output,
            domains,
            rules,
        })
    }

    pub fn input_alphabet(&self) -> &Arc<Alphabet> {
        &self.input
    }

    pub fn output_alphabet(&self) -> &Arc<Alphabet> {
        &self.output
    }

    pub fn domains(&self) -> &[NamedDomain] {
        &self.domains
    }

    pub fn rules(&self) -> &[GgrRule] {
        &self.rules
    }

    /// Renders the grammar in the rule DSL, including alphabet declarations.
    pub fn to_dsl(&self) -> String {
        let quote = |a: &Alphabet| {
            a.tokens()
                .iter()
                .map(|t| format!("\"{t}\""))
                .collect::<Vec<_>>()
                .join(" ")
        };
        let mut out = format!(
            "input-alphabet {}\noutput-alphabet {}\n",
            quote(&self.input),
            quote(&self.output)
        );
        for d in &self.domains {
            out.push_str(&format!("class-domain {} = {}\n", d.name, d.spec));
        }
        for r in &self.rules {
            out.push_str(&r.to_string());
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LAKE_LUG: &str = "\
input-alphabet \"zup\" \"fep\" \"lug\"
output-alphabet \"green\" \"rose\"
forall x1 in SIGMA1, x2 in SIGMA1: T(x1 \"lug\" x2) = T(x2) T(x1) T(x2) T(x1) T(x1)
T(\"zup\") = \"green\"
";

    #[test]
    fn substitute_lug() {
        let g = parse_grammar(LAKE_LUG).unwrap();
        let lug = &g.rules()[0];
        let eq = lug
            .substitute_named(&[("x1", "zup"), ("x2", "fep")])
            .unwrap();
        assert_eq!(eq.lhs_input.to_string(), "zup lug fep");
        let args: Vec<String> = eq.args().iter().map(|s| s.to_string()).collect();
        assert_eq!(args, ["fep", "zup", "fep", "zup", "zup"]);
        assert!(lug.substitute_named(&[("x1", "zup")]).is_err());
        assert!(lug
            .substitute_named(&[("x1", "zup fep"), ("x2", "fep")])
            .is_err());
    }

    #[test]
    fn substitute_ground() {
        let g = parse_grammar(LAKE_LUG).unwrap();
        let eq = g.rules()[1].substitute(&[]).unwrap();
        assert_eq!(eq.lhs_input.to_string(), "zup");
        assert_eq!(eq.literals()[0].to_string(), "green");
        assert!(eq.args().is_empty());
    }

    #[test]
    fn substitute_concatenation() {
        let src = "input-alphabet a b c\noutput-alphabet a b c\nforall x1 in SIGMA+, x2 in SIGMA+: T(x1 x2) = T(x1) T(x2)\n";
        let g = parse_grammar(src).unwrap();
        let eq = g.rules()[0]
            .substitute_named(&[("x1", "a"), ("x2", "b c")])
            .unwrap();
        assert_eq!(eq.lhs_input.to_string(), "a b c");
        let args: Vec<String> = eq.args().iter().map(|s| s.to_string()).collect();
        assert_eq!(args, ["a", "b c"]);
    }

    #[test]
    fn complexity_scores() {
        let g = parse_grammar(LAKE_LUG).unwrap();
        assert_eq!(g.rules()[1].complexity(), 2);
        let and = parse_grammar(
            "input-alphabet a AND\noutput-alphabet a\nforall x1 in SIGMA+, x2 in SIGMA+: T(x1 \"AND\" x2) = T(x1) T(x2)\n",
        )
        .unwrap();
        assert_eq!(and.rules()[0].complexity(), 7);
        let more = parse_grammar(
            "input-alphabet a AND\noutput-alphabet a\nforall x1 in SIGMA+, x2 in SIGMA+: T(x1 \"AND\" x2) = T(x1) \"a\" T(x2)\n",
        )
        .unwrap();
        assert_eq!(more.rules()[0].complexity(), 8);
    }

    #[test]
    fn worked_examples_validate() {
        let src = "\
input-alphabet a1 a2 a3
output-alphabet b1 b2 b3
forall x1 in SIGMA*, x2 in SIGMA*: T(x1 \"a1\" \"a2\" x2 \"a3\") = \"b1\" T(x1) T(x1) T(\"a1\" \"a3\") T(x2 \"a2\") \"b2\"
forall x1 in SIGMA*, x2 in SIGMA*, y1 in LAMBDA*: T(x1 \"a1\" \"a2\") \"b1\" y1 T(x2 \"a3\") = \"b1\" T(x1) T(x1) T(\"a1\" \"a3\") y1 T(\"a1\" x2 \"a2\") \"b3\" y1
forall x1 in SIGMA*: T(x1) = T(x1 \"a1\")
";
        let file = parse_rule_file(src).unwrap();
        assert!(validate_ggr(&file.rules[0]).is_ok());
        let v = validate_ggr(&file.rules[1]).unwrap_err();
        assert_eq!(v.len(), 2, "{v:?}");
        assert!(matches!(v[0], GgrViolation::OutputVariables(_)));
        assert!(matches!(
            v[1],
            GgrViolation::LhsNotSingleCall { calls: 2, .. }
        ));
        let v = validate_ggr(&file.rules[2]).unwrap_err();
        assert_eq!(
            v,
            vec![GgrViolation::ArgumentLonger {
                index: 1,
                len: 2,
                lhs_len: 1
            }]
        );
    }

    #[test]
    fn rhs_only_variable_is_rejected() {
        let file = parse_rule_file(
            "input-alphabet a\noutput-alphabet a\nforall x1 in SIGMA*, x2 in SIGMA*: T(x1 \"a\") = T(x2)\n",
        )
        .unwrap();
        assert_eq!(
            validate_ggr(&file.rules[0]).unwrap_err(),
            vec![GgrViolation::VariableNotInLhs("x2".into())]
        );
    }

    #[test]
    fn tautology_detection() {
        let g = parse_grammar(
            "input-alphabet a\noutput-alphabet a\nforall x1 in SIGMA+: T(x1) = T(x1)\n",
        )
        .unwrap();
        assert!(g.rules()[0].is_tautology());
        assert_eq!(g.rules()[0].complexity(), 3);
    }
}
