//! Boolean term ASTs and presentations (generators plus relations of
//! the form `term = 0`).

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::index_model::{parse_node, IndexNode};

#[derive(Debug, Error)]
pub enum TermError {
    #[error("term parse error: {0}")]
    Parse(String),
    #[error("relation references a generator outside the presentation: {0}")]
    UnknownGenerator(String),
}

/// Generator of a presented algebra: an index-model node, an atom of a
/// base algebra, or a named auxiliary generator.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum GeneratorId {
    Node(IndexNode),
    BaseAtom(u32),
    Named(String),
}

impl fmt::Display for GeneratorId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            GeneratorId::Node(n) => write!(f, "x:{}", n),
            GeneratorId::BaseAtom(k) => write!(f, "a:{}", k),
            GeneratorId::Named(s) => write!(f, "g:{}", s),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Term {
    Zero,
    One,
    Gen(GeneratorId),
    Meet(Box<Term>, Box<Term>),
    Join(Box<Term>, Box<Term>),
    Not(Box<Term>),
}

impl Term {
    pub fn gen(g: GeneratorId) -> Term {
        Term::Gen(g)
    }

    pub fn node(n: &IndexNode) -> Term {
        Term::Gen(GeneratorId::Node(n.clone()))
    }

    pub fn meet(a: Term, b: Term) -> Term {
        Term::Meet(Box::new(a), Box::new(b))
    }

    pub fn join(a: Term, b: Term) -> Term {
        Term::Join(Box::new(a), Box::new(b))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(a: Term) -> Term {
        Term::Not(Box::new(a))
    }

    /// `a - b` is sugar for `a /\ -b`.
    pub fn diff(a: Term, b: Term) -> Term {
        Term::meet(a, Term::not(b))
    }

    /// Meet of a list; the empty meet is 1.
    pub fn big_meet(terms: impl IntoIterator<Item = Term>) -> Term {
        let mut it = terms.into_iter();
        match it.next() {
            None => Term::One,
            Some(first) => it.fold(first, Term::meet),
        }
    }

    /// Join of a list; the empty join is 0.
    pub fn big_join(terms: impl IntoIterator<Item = Term>) -> Term {
        let mut it = terms.into_iter();
        match it.next() {
            None => Term::Zero,
            Some(first) => it.fold(first, Term::join),
        }
    }

    pub fn generators(&self) -> Vec<&GeneratorId> {
        let mut out = Vec::new();
        self.collect_generators(&mut out);
        out
    }

    fn collect_generators<'a>(&'a self, out: &mut Vec<&'a GeneratorId>) {
        match self {
            Term::Zero | Term::One => {}
            Term::Gen(g) => out.push(g),
            Term::Meet(a, b) | Term::Join(a, b) => {
                a.collect_generators(out);
                b.collect_generators(out);
            }
            Term::Not(a) => a.collect_generators(out),
        }
    }

    /// Evaluate under a two-valued assignment.
    pub fn eval_assignment(&self, assign: &dyn Fn(&GeneratorId) -> bool) -> bool {
        match self {
            Term::Zero => false,
            Term::One => true,
            Term::Gen(g) => assign(g),
            Term::Meet(a, b) => a.eval_assignment(assign) && b.eval_assignment(assign),
            Term::Join(a, b) => a.eval_assignment(assign) || b.eval_assignment(assign),
            Term::Not(a) => !a.eval_assignment(assign),
        }
    }
}

impl fmt::Display for Term {
    /// Parenthesized prefix syntax: `(and s t)`, `(or s t)`, `(not t)`,
    /// `0`, `1`, and generator atoms as in `GeneratorId`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Zero => write!(f, "0"),
            Term::One => write!(f, "1"),
            Term::Gen(g) => write!(f, "{}", g),
            Term::Meet(a, b) => write!(f, "(and {} {})", a, b),
            Term::Join(a, b) => write!(f, "(or {} {})", a, b),
            Term::Not(a) => write!(f, "(not {})", a),
        }
    }
}

/// Parse the prefix term syntax emitted by `Display`.
pub fn parse_term(text: &str) -> Result<Term, TermError> {
    let tokens = tokenize(text)?;
    let mut pos = 0;
    let term = parse_tokens(&tokens, &mut pos)?;
    if pos != tokens.len() {
        return Err(TermError::Parse(format!("trailing input after term: {:?}", &tokens[pos..])));
    }
    Ok(term)
}

fn tokenize(text: &str) -> Result<Vec<String>, TermError> {
    let mut tokens = Vec::new();
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' | ')' => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
                tokens.push(c.to_string());
            }
            c if c.is_whitespace() => {
                if !cur.is_empty() {
                    tokens.push(std::mem::take(&mut cur));
                }
            }
            c => cur.push(c),
        }
    }
    if !cur.is_empty() {
        tokens.push(cur);
    }
    if tokens.is_empty() {
        return Err(TermError::Parse("empty term".into()));
    }
    Ok(tokens)
}

fn parse_tokens(tokens: &[String], pos: &mut usize) -> Result<Term, TermError> {
    let tok = tokens
        .get(*pos)
        .ok_or_else(|| TermError::Parse("unexpected end of input".into()))?;
    *pos += 1;
    match tok.as_str() {
        "0" => Ok(Term::Zero),
        "1" => Ok(Term::One),
        "(" => {
            let op = tokens
                .get(*pos)
                .ok_or_else(|| TermError::Parse("missing operator".into()))?
                .clone();
            *pos += 1;
            let term = match op.as_str() {
                "and" | "or" => {
                    let a = parse_tokens(tokens, pos)?;
                    let b = parse_tokens(tokens, pos)?;
                    if op == "and" {
                        Term::meet(a, b)
                    } else {
                        Term::join(a, b)
                    }
                }
                "not" => Term::not(parse_tokens(tokens, pos)?),
                other => return Err(TermError::Parse(format!("unknown operator {:?}", other))),
            };
            match tokens.get(*pos) {
                Some(t) if t == ")" => {
                    *pos += 1;
                    Ok(term)
                }
                _ => Err(TermError::Parse("expected `)`".into())),
            }
        }
        atom => parse_generator_atom(atom).map(Term::Gen),
    }
}

fn parse_generator_atom(atom: &str) -> Result<GeneratorId, TermError> {
    if let Some(rest) = atom.strip_prefix("x:") {
        let node = parse_node(rest).map_err(|e| TermError::Parse(e.to_string()))?;
        return Ok(GeneratorId::Node(node));
    }
    if let Some(rest) = atom.strip_prefix("a:") {
        let k: u32 = rest
            .parse()
            .map_err(|_| TermError::Parse(format!("bad atom index {:?}", rest)))?;
        return Ok(GeneratorId::BaseAtom(k));
    }
    if let Some(rest) = atom.strip_prefix("g:") {
        return Ok(GeneratorId::Named(rest.to_string()));
    }
    Err(TermError::Parse(format!("unknown atom {:?}", atom)))
}

/// Which construction produced a presentation; builders record their
/// parameters so downstream checks can validate provenance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Provenance {
    Free { generators: usize },
    Tr,
    Ptr,
    TrH,
    Trr,
    TrHG { g: Vec<u32> },
    TrHE,
    BaseExtension { base_atoms: usize, disjoint_seq: usize },
    Synthetic(String),
}

/// Generators plus relations normalized to `term = 0`. Inequalities
/// `a <= b` are stored as `(a /\ -b) = 0`; equalities as two such
/// relations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Presentation {
    generators: Vec<GeneratorId>,
    index: BTreeMap<GeneratorId, usize>,
    relations: Vec<Term>,
    provenance: Provenance,
}

impl Presentation {
    pub fn new(
        generators: Vec<GeneratorId>,
        relations: Vec<Term>,
        provenance: Provenance,
    ) -> Result<Self, TermError> {
        let index: BTreeMap<GeneratorId, usize> =
            generators.iter().enumerate().map(|(i, g)| (g.clone(), i)).collect();
        for rel in &relations {
            for g in rel.generators() {
                if !index.contains_key(g) {
                    return Err(TermError::UnknownGenerator(g.to_string()));
                }
            }
        }
        Ok(Presentation { generators, index, relations, provenance })
    }

    /// Free algebra on `n` named generators.
    pub fn free(n: usize) -> Presentation {
        let generators = (0..n).map(|i| GeneratorId::Named(format!("f{}", i))).collect();
        Presentation::new(generators, Vec::new(), Provenance::Free { generators: n })
            .expect("no relations")
    }

    pub fn generators(&self) -> &[GeneratorId] {
        &self.generators
    }

    pub fn relations(&self) -> &[Term] {
        &self.relations
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn generator_index(&self, g: &GeneratorId) -> Option<usize> {
        self.index.get(g).copied()
    }

    /// One generator per line, then one relation per line.
    pub fn dump(&self) -> String {
        let mut lines: Vec<String> = self.generators.iter().map(|g| g.to_string()).collect();
        lines.extend(self.relations.iter().map(|r| r.to_string()));
        lines.join("\n")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn term_display_roundtrip() {
        let t = Term::meet(
            Term::node(&IndexNode::root()),
            Term::not(Term::join(Term::Gen(GeneratorId::BaseAtom(3)), Term::Zero)),
        );
        let text = t.to_string();
        assert_eq!(text, "(and x:. (not (or a:3 0)))");
        assert_eq!(parse_term(&text).unwrap(), t);
    }

    #[test]
    fn parse_rejects_garbage() {
        assert!(parse_term("(and 0)").is_err());
        assert!(parse_term("(xor 0 1)").is_err());
        assert!(parse_term("bogus").is_err());
        assert!(parse_term("0 1").is_err());
    }

    #[test]
    fn presentation_validates_generators() {
        let g = GeneratorId::Named("u".into());
        let bad = Presentation::new(
            vec![],
            vec![Term::Gen(g.clone())],
            Provenance::Synthetic("t".into()),
        );
        assert!(matches!(bad, Err(TermError::UnknownGenerator(_))));
        let ok = Presentation::new(
            vec![g.clone()],
            vec![Term::Gen(g)],
            Provenance::Synthetic("t".into()),
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn empty_meet_and_join_conventions() {
        assert_eq!(Term::big_meet(Vec::new()), Term::One);
        assert_eq!(Term::big_join(Vec::new()), Term::Zero);
    }
}
