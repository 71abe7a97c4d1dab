//! Exact semantics for presentations: a point is a two-valued
//! assignment of the generators under which every relation term
//! evaluates to 0, and the realized algebra is the full power set of
//! the point list. Elements are point sets.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use thiserror::Error;

use crate::term::{GeneratorId, Presentation, Term, TermError};

/// Generators per presentation the realizer will accept by default.
pub const DEFAULT_GENERATOR_BUDGET: usize = 24;

/// Assignments are stored in single machine words.
pub const HARD_GENERATOR_CAP: usize = 64;

static NEXT_ALGEBRA_ID: AtomicU64 = AtomicU64::new(1);

#[derive(Debug, Error)]
pub enum AlgebraError {
    #[error("presentation has {count} generators, over the budget of {budget}")]
    GeneratorBudget { count: usize, budget: usize },
    #[error("term references a generator the algebra does not know: {0}")]
    UnresolvedGenerator(String),
    #[error("element belongs to a different algebra")]
    AlgebraMismatch,
    #[error("operation requires a non-zero element")]
    ZeroElement,
    #[error("search budget exceeded: {0}")]
    Budget(String),
    #[error("operation applies to a different shape of model: {0}")]
    WrongShape(String),
    #[error("node does not belong to the model: {0}")]
    UnknownNode(String),
    #[error("expected property failed to verify: {0}")]
    FalsifiedProperty(String),
    #[error(transparent)]
    Term(#[from] TermError),
}

/// A set of points of one algebra, stored as a bit set.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Element {
    algebra: u64,
    n_points: usize,
    words: Vec<u64>,
}

impl Element {
    fn empty(algebra: u64, n_points: usize) -> Element {
        Element { algebra, n_points, words: vec![0; n_points.div_ceil(64)] }
    }

    fn full(algebra: u64, n_points: usize) -> Element {
        let mut e = Element::empty(algebra, n_points);
        for i in 0..n_points {
            e.insert(i);
        }
        e
    }

    fn insert(&mut self, idx: usize) {
        self.words[idx / 64] |= 1 << (idx % 64);
    }

    pub fn contains(&self, idx: usize) -> bool {
        idx < self.n_points && self.words[idx / 64] & (1 << (idx % 64)) != 0
    }

    pub fn algebra_id(&self) -> u64 {
        self.algebra
    }

    pub fn count(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn point_indices(&self) -> Vec<usize> {
        (0..self.n_points).filter(|&i| self.contains(i)).collect()
    }

    fn check_same(&self, other: &Element) {
        assert_eq!(self.algebra, other.algebra, "elements belong to different algebras");
    }

    pub fn meet(&self, other: &Element) -> Element {
        self.check_same(other);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect();
        Element { algebra: self.algebra, n_points: self.n_points, words }
    }

    pub fn join(&self, other: &Element) -> Element {
        self.check_same(other);
        let words = self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect();
        Element { algebra: self.algebra, n_points: self.n_points, words }
    }

    pub fn complement(&self) -> Element {
        let mut out = self.clone();
        for w in &mut out.words {
            *w = !*w;
        }
        out.trim();
        out
    }

    pub fn diff(&self, other: &Element) -> Element {
        self.meet(&other.complement())
    }

    pub fn leq(&self, other: &Element) -> bool {
        self.diff(other).is_empty()
    }

    pub fn disjoint(&self, other: &Element) -> bool {
        self.meet(other).is_empty()
    }

    fn trim(&mut self) {
        let extra = self.words.len() * 64 - self.n_points;
        if extra > 0 {
            if let Some(last) = self.words.last_mut() {
                *last &= u64::MAX >> extra;
            }
        }
    }
}

impl fmt::Display for Element {
    /// Sorted point-index list, e.g. `{0,2,3}`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let idx: Vec<String> = self.point_indices().iter().map(|i| i.to_string()).collect();
        write!(f, "{{{}}}", idx.join(","))
    }
}

/// The exact finite model of a presentation.
#[derive(Debug, Clone)]
pub struct CanonicalAlgebra {
    id: u64,
    presentation: Presentation,
    points: Vec<u64>,
    denotations: Vec<Element>,
}

impl CanonicalAlgebra {
    pub fn id(&self) -> u64 {
        self.id
    }

    pub fn presentation(&self) -> &Presentation {
        &self.presentation
    }

    pub fn n_points(&self) -> usize {
        self.points.len()
    }

    /// Assignment mask of a point; bit `i` is the value of generator `i`.
    pub fn point_mask(&self, idx: usize) -> u64 {
        self.points[idx]
    }

    pub fn n_generators(&self) -> usize {
        self.presentation.generators().len()
    }

    /// Number of elements: `2^points`.
    pub fn cardinality(&self) -> u128 {
        assert!(
            self.points.len() < 128,
            "cardinality overflows u128 for {} points",
            self.points.len()
        );
        1u128 << self.points.len()
    }

    pub fn zero(&self) -> Element {
        Element::empty(self.id, self.points.len())
    }

    pub fn one(&self) -> Element {
        Element::full(self.id, self.points.len())
    }

    pub fn element_from_points(&self, indices: &[usize]) -> Element {
        let mut e = self.zero();
        for &i in indices {
            assert!(i < self.points.len(), "point index out of range");
            e.insert(i);
        }
        e
    }

    /// Denotation of a generator.
    pub fn generator_element(&self, g: &GeneratorId) -> Result<Element, AlgebraError> {
        let idx = self
            .presentation
            .generator_index(g)
            .ok_or_else(|| AlgebraError::UnresolvedGenerator(g.to_string()))?;
        Ok(self.denotations[idx].clone())
    }

    /// Pointwise truth of a term.
    pub fn eval(&self, term: &Term) -> Result<Element, AlgebraError> {
        Ok(match term {
            Term::Zero => self.zero(),
            Term::One => self.one(),
            Term::Gen(g) => self.generator_element(g)?,
            Term::Meet(a, b) => self.eval(a)?.meet(&self.eval(b)?),
            Term::Join(a, b) => self.eval(a)?.join(&self.eval(b)?),
            Term::Not(a) => self.eval(a)?.complement(),
        })
    }

    pub fn is_zero(&self, term: &Term) -> Result<bool, AlgebraError> {
        Ok(self.eval(term)?.is_empty())
    }

    pub fn leq(&self, s: &Term, t: &Term) -> Result<bool, AlgebraError> {
        self.is_zero(&Term::meet(s.clone(), Term::not(t.clone())))
    }

    pub fn eq(&self, s: &Term, t: &Term) -> Result<bool, AlgebraError> {
        Ok(self.eval(s)? == self.eval(t)?)
    }

    /// The singleton point sets.
    pub fn atoms(&self) -> Vec<Element> {
        (0..self.points.len()).map(|i| self.element_from_points(&[i])).collect()
    }

    /// All elements, in point-set numeric order. Only sensible for small
    /// point counts.
    pub fn elements(&self) -> impl Iterator<Item = Element> + '_ {
        let n = self.points.len();
        assert!(n < 32, "element enumeration needs a small algebra");
        (0u64..(1u64 << n)).map(move |mask| {
            let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            self.element_from_points(&idx)
        })
    }

    /// A term denoting the element: join of the point minterms.
    pub fn term_of(&self, e: &Element) -> Term {
        assert_eq!(e.algebra, self.id, "element belongs to a different algebra");
        let gens = self.presentation.generators();
        let minterm = |mask: u64| {
            Term::big_meet(gens.iter().enumerate().map(|(i, g)| {
                if mask & (1 << i) != 0 {
                    Term::Gen(g.clone())
                } else {
                    Term::not(Term::Gen(g.clone()))
                }
            }))
        };
        Term::big_join(e.point_indices().into_iter().map(|i| minterm(self.points[i])))
    }

    /// A satisfying generator assignment for a non-zero term, as pairs
    /// of generator and value.
    pub fn witness(&self, term: &Term) -> Result<Option<Vec<(GeneratorId, bool)>>, AlgebraError> {
        let e = self.eval(term)?;
        Ok(e.point_indices().first().map(|&i| {
            let mask = self.points[i];
            self.presentation
                .generators()
                .iter()
                .enumerate()
                .map(|(k, g)| (g.clone(), mask & (1 << k) != 0))
                .collect()
        }))
    }
}

/// Build an algebra directly from a known point list. The caller
/// guarantees the points are exactly the respecting assignments of the
/// presentation; this is used by constructors that compute the point
/// set by a formula instead of a search.
pub(crate) fn algebra_from_points(
    presentation: Presentation,
    points: Vec<u64>,
) -> CanonicalAlgebra {
    let id = NEXT_ALGEBRA_ID.fetch_add(1, Ordering::Relaxed);
    let n_gens = presentation.generators().len();
    let mut denotations = Vec::with_capacity(n_gens);
    for g in 0..n_gens {
        let mut e = Element::empty(id, points.len());
        for (i, &mask) in points.iter().enumerate() {
            if mask & (1 << g) != 0 {
                e.insert(i);
            }
        }
        denotations.push(e);
    }
    CanonicalAlgebra { id, presentation, points, denotations }
}

/// Realize a presentation with the default generator budget.
pub fn realize(p: &Presentation) -> Result<CanonicalAlgebra, AlgebraError> {
    realize_with_budget(p, DEFAULT_GENERATOR_BUDGET)
}

/// Realize a presentation: enumerate every relation-respecting
/// assignment by backtracking with early termination of relation
/// terms, then order the points lexicographically in generator order.
pub fn realize_with_budget(
    p: &Presentation,
    budget: usize,
) -> Result<CanonicalAlgebra, AlgebraError> {
    let n = p.generators().len();
    let budget = budget.min(HARD_GENERATOR_CAP);
    if n > budget {
        return Err(AlgebraError::GeneratorBudget { count: n, budget });
    }
    let mut points = search(p, &[], false);
    sort_points_lex(&mut points, n);
    Ok(algebra_from_points(p.clone(), points))
}

/// Is there a respecting assignment extending the pinned literals?
/// Returns the first witness found. This is the same search core the
/// realizer uses, stopped at the first hit.
pub fn satisfiable_with(p: &Presentation, pins: &[(usize, bool)]) -> Option<u64> {
    search(p, pins, true).into_iter().next()
}

fn sort_points_lex(points: &mut [u64], n_gens: usize) {
    points.sort_by(|a, b| {
        for i in 0..n_gens {
            let (x, y) = (a >> i & 1, b >> i & 1);
            if x != y {
                return x.cmp(&y);
            }
        }
        std::cmp::Ordering::Equal
    });
}

/// Relation term compiled to generator indices for the search.
enum CTerm {
    Zero,
    One,
    Var(usize),
    Meet(Box<CTerm>, Box<CTerm>),
    Join(Box<CTerm>, Box<CTerm>),
    Not(Box<CTerm>),
}

fn compile(term: &Term, p: &Presentation) -> CTerm {
    match term {
        Term::Zero => CTerm::Zero,
        Term::One => CTerm::One,
        Term::Gen(g) => CTerm::Var(p.generator_index(g).expect("validated by Presentation::new")),
        Term::Meet(a, b) => CTerm::Meet(Box::new(compile(a, p)), Box::new(compile(b, p))),
        Term::Join(a, b) => CTerm::Join(Box::new(compile(a, p)), Box::new(compile(b, p))),
        Term::Not(a) => CTerm::Not(Box::new(compile(a, p))),
    }
}

/// Backtracking search for respecting assignments. Generators are
/// assigned in relation-aware order: members of short relations first.
fn search(p: &Presentation, pins: &[(usize, bool)], first_only: bool) -> Vec<u64> {
    let n = p.generators().len();
    let relations: Vec<CTerm> = p.relations().iter().map(|r| compile(r, p)).collect();

    // Size of the smallest relation mentioning each generator.
    let mut shortest = vec![usize::MAX; n];
    let mut touching: Vec<Vec<usize>> = vec![Vec::new(); n];
    for (ri, rel) in p.relations().iter().enumerate() {
        let gens = rel.generators();
        let size = gens.len();
        for g in gens {
            let gi = p.generator_index(g).expect("validated by Presentation::new");
            shortest[gi] = shortest[gi].min(size);
            if touching[gi].last() != Some(&ri) {
                touching[gi].push(ri);
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (shortest[i], i));

    let mut assigned: u64 = 0;
    let mut values: u64 = 0;
    for &(idx, val) in pins {
        assigned |= 1 << idx;
        if val {
            values |= 1 << idx;
        }
    }
    // A pinned-only conflict check for relations fully determined by pins.
    for rel in &relations {
        if eval3(rel, assigned, values) == Some(true) {
            return Vec::new();
        }
    }

    let mut out = Vec::new();
    let free: Vec<usize> = order.iter().copied().filter(|i| assigned & (1 << i) == 0).collect();
    dfs(&relations, &touching, &free, 0, assigned, values, &mut out, first_only);
    out
}

#[allow(clippy::too_many_arguments)]
fn dfs(
    relations: &[CTerm],
    touching: &[Vec<usize>],
    free: &[usize],
    depth: usize,
    assigned: u64,
    values: u64,
    out: &mut Vec<u64>,
    first_only: bool,
) {
    if first_only && !out.is_empty() {
        return;
    }
    if depth == free.len() {
        out.push(values);
        return;
    }
    let gi = free[depth];
    'next: for val in [false, true] {
        let new_assigned = assigned | 1 << gi;
        let new_values = if val { values | 1 << gi } else { values };
        for &ri in &touching[gi] {
            if eval3(&relations[ri], new_assigned, new_values) == Some(true) {
                continue 'next;
            }
        }
        dfs(relations, touching, free, depth + 1, new_assigned, new_values, out, first_only);
    }
}

/// Three-valued term evaluation under a partial assignment; `None`
/// means the value is not yet determined.
fn eval3(term: &CTerm, assigned: u64, values: u64) -> Option<bool> {
    match term {
        CTerm::Zero => Some(false),
        CTerm::One => Some(true),
        CTerm::Var(i) => {
            if assigned & (1 << i) != 0 {
                Some(values & (1 << i) != 0)
            } else {
                None
            }
        }
        CTerm::Meet(a, b) => and3(eval3(a, assigned, values), eval3(b, assigned, values)),
        CTerm::Join(a, b) => or3(eval3(a, assigned, values), eval3(b, assigned, values)),
        CTerm::Not(a) => eval3(a, assigned, values).map(|v| !v),
    }
}

fn and3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(false), _) | (_, Some(false)) => Some(false),
        (Some(true), Some(true)) => Some(true),
        _ => None,
    }
}

fn or3(a: Option<bool>, b: Option<bool>) -> Option<bool> {
    match (a, b) {
        (Some(true), _) | (_, Some(true)) => Some(true),
        (Some(false), Some(false)) => Some(false),
        _ => None,
    }
}

/// Joint-valuation independence: for every two-valued valuation of
/// `x` together with `over` that satisfies every exception relation,
/// some point of the algebra must extend it. One point query per
/// consistent valuation.
pub fn independence_check(
    alg: &CanonicalAlgebra,
    x: &[GeneratorId],
    over: &[GeneratorId],
    exceptions: &[Term],
    valuation_budget: usize,
) -> Result<bool, AlgebraError> {
    let mut gen_indices = Vec::new();
    for g in x.iter().chain(over) {
        let idx = alg
            .presentation()
            .generator_index(g)
            .ok_or_else(|| AlgebraError::UnresolvedGenerator(g.to_string()))?;
        gen_indices.push(idx);
    }
    let k = gen_indices.len();
    if k > valuation_budget || k >= 32 {
        return Err(AlgebraError::Budget(format!(
            "{} valuation variables over the budget of {}",
            k, valuation_budget
        )));
    }
    let joint: Vec<GeneratorId> = x.iter().chain(over).cloned().collect();
    for e in exceptions {
        for g in e.generators() {
            if !joint.contains(g) {
                return Err(AlgebraError::UnresolvedGenerator(format!(
                    "exception mentions {} outside the checked generators",
                    g
                )));
            }
        }
    }
    for mask in 0u64..(1 << k) {
        let lookup = |g: &GeneratorId| -> bool {
            let pos = joint.iter().position(|h| h == g).expect("checked above");
            mask & (1 << pos) != 0
        };
        if exceptions.iter().any(|e| e.eval_assignment(&lookup)) {
            continue;
        }
        let extends = (0..alg.n_points()).any(|pi| {
            let pm = alg.point_mask(pi);
            gen_indices
                .iter()
                .enumerate()
                .all(|(pos, &gi)| (pm >> gi & 1 == 1) == (mask >> pos & 1 == 1))
        });
        if !extends {
            return Ok(false);
        }
    }
    Ok(true)
}
