//! Algebra-level constructors: restriction, products, surgery and its
//! iteration, plus the regular-extension and projection checks. The
//! point sets are computed by the defining formulas; the synthetic
//! presentations attached to the results realize to the same points,
//! which the tests cross-check on small cases.

use std::sync::Arc;

use crate::algebra::{
    algebra_from_points, realize, AlgebraError, CanonicalAlgebra, Element,
};
use crate::builders::{build_ba, BuildError};
use crate::index_model::{IndexModel, IndexNode};
use crate::term::{GeneratorId, Presentation, Provenance, Term};

/// A homomorphism between two finite algebras, stored through its dual:
/// a map from target points to source points (`None` drops the point,
/// which only unit-ignoring maps use). The element-level map is
/// `f(a) = { q : dual(q) in a }`; it preserves meets, joins and
/// complements relative to the units by construction.
#[derive(Debug, Clone)]
pub struct Morphism {
    source: Arc<CanonicalAlgebra>,
    target: Arc<CanonicalAlgebra>,
    dual: Vec<Option<usize>>,
}

impl Morphism {
    pub fn new(
        source: Arc<CanonicalAlgebra>,
        target: Arc<CanonicalAlgebra>,
        dual: Vec<Option<usize>>,
    ) -> Morphism {
        assert_eq!(dual.len(), target.n_points(), "one dual value per target point");
        for d in dual.iter().flatten() {
            assert!(*d < source.n_points(), "dual value out of range");
        }
        Morphism { source, target, dual }
    }

    pub fn identity(alg: &CanonicalAlgebra) -> Morphism {
        let arc = Arc::new(alg.clone());
        let dual = (0..alg.n_points()).map(Some).collect();
        Morphism { source: arc.clone(), target: arc, dual }
    }

    pub fn source(&self) -> &CanonicalAlgebra {
        &self.source
    }

    pub fn target(&self) -> &CanonicalAlgebra {
        &self.target
    }

    pub fn dual(&self) -> &[Option<usize>] {
        &self.dual
    }

    pub fn apply(&self, a: &Element) -> Element {
        assert_eq!(a.algebra_id(), self.source.id(), "element not from the source algebra");
        let idx: Vec<usize> = (0..self.target.n_points())
            .filter(|&q| matches!(self.dual[q], Some(p) if a.contains(p)))
            .collect();
        self.target.element_from_points(&idx)
    }

    /// Injective exactly when the dual is onto the source points.
    pub fn is_injective(&self) -> bool {
        let mut hit = vec![false; self.source.n_points()];
        for d in self.dual.iter().flatten() {
            hit[*d] = true;
        }
        hit.into_iter().all(|h| h)
    }

    /// Surjective exactly when the dual is one-to-one and total.
    pub fn is_surjective(&self) -> bool {
        let mut seen = vec![false; self.source.n_points()];
        for d in &self.dual {
            match d {
                None => return false,
                Some(p) => {
                    if seen[*p] {
                        return false;
                    }
                    seen[*p] = true;
                }
            }
        }
        true
    }

    pub fn is_unit_preserving(&self) -> bool {
        self.dual.iter().all(|d| d.is_some())
    }

    /// Composition `other ∘ self` (first self, then other).
    pub fn then(&self, other: &Morphism) -> Morphism {
        assert_eq!(self.target.id(), other.source.id(), "composition mismatch");
        let dual = other.dual.iter().map(|d| d.and_then(|q| self.dual[q])).collect();
        Morphism { source: self.source.clone(), target: other.target.clone(), dual }
    }
}

fn named(prefix: &str, g: &GeneratorId) -> GeneratorId {
    GeneratorId::Named(format!("{}.{}", prefix, g))
}

fn relabel(term: &Term, prefix: &str) -> Term {
    match term {
        Term::Zero => Term::Zero,
        Term::One => Term::One,
        Term::Gen(g) => Term::Gen(named(prefix, g)),
        Term::Meet(a, b) => Term::meet(relabel(a, prefix), relabel(b, prefix)),
        Term::Join(a, b) => Term::join(relabel(a, prefix), relabel(b, prefix)),
        Term::Not(a) => Term::not(relabel(a, prefix)),
    }
}

/// Restriction of an algebra below a non-zero element: the points are
/// the points of `a`, the unit becomes `a`, and the projection
/// `b -> b /\ a` is the returned surjection.
pub fn restrict(
    alg: &CanonicalAlgebra,
    a: &Element,
) -> Result<(CanonicalAlgebra, Morphism), AlgebraError> {
    if a.is_empty() {
        return Err(AlgebraError::ZeroElement);
    }
    Ok(restrict_points(alg, a))
}

/// Restriction without the non-zero guard; quotients use the empty case.
pub(crate) fn restrict_points(alg: &CanonicalAlgebra, a: &Element) -> (CanonicalAlgebra, Morphism) {
    assert_eq!(a.algebra_id(), alg.id(), "element not from this algebra");
    let kept = a.point_indices();
    let masks: Vec<u64> = kept.iter().map(|&i| alg.point_mask(i)).collect();
    let mut relations = alg.presentation().relations().to_vec();
    relations.push(Term::not(alg.term_of(a)));
    let presentation = Presentation::new(
        alg.presentation().generators().to_vec(),
        relations,
        Provenance::Synthetic("restriction".into()),
    )
    .expect("generators unchanged");
    let restricted = algebra_from_points(presentation, masks);
    let dual: Vec<Option<usize>> = kept.into_iter().map(Some).collect();
    let m = Morphism::new(Arc::new(alg.clone()), Arc::new(restricted.clone()), dual);
    (restricted, m)
}

/// Direct product: points are the disjoint union of the factor points.
pub fn product(a: &CanonicalAlgebra, b: &CanonicalAlgebra) -> CanonicalAlgebra {
    let marker = GeneratorId::Named("side".into());
    let mut generators = vec![marker.clone()];
    generators.extend(a.presentation().generators().iter().map(|g| named("l", g)));
    generators.extend(b.presentation().generators().iter().map(|g| named("r", g)));
    let an = a.n_generators();
    let mut relations = Vec::new();
    for r in a.presentation().relations() {
        relations.push(Term::meet(relabel(r, "l"), Term::Gen(marker.clone())));
    }
    for r in b.presentation().relations() {
        relations.push(Term::meet(relabel(r, "r"), Term::not(Term::Gen(marker.clone()))));
    }
    for g in a.presentation().generators() {
        relations.push(Term::meet(Term::Gen(named("l", g)), Term::not(Term::Gen(marker.clone()))));
    }
    for g in b.presentation().generators() {
        relations.push(Term::meet(Term::Gen(named("r", g)), Term::Gen(marker.clone())));
    }
    let presentation =
        Presentation::new(generators, relations, Provenance::Synthetic("product".into()))
            .expect("fresh generators");
    // Left-factor points carry the marker, right-factor points do not;
    // the point order lists the marker-free side first, lexicographic
    // within each side.
    let mut points = Vec::with_capacity(a.n_points() + b.n_points());
    for i in 0..b.n_points() {
        points.push(b.point_mask(i) << (1 + an));
    }
    for i in 0..a.n_points() {
        points.push(1 | (a.point_mask(i) << 1));
    }
    algebra_from_points(presentation, points)
}

/// Free product: points are pairs of factor points. Returns the algebra
/// with the two canonical injections.
pub fn free_product(
    a: &CanonicalAlgebra,
    b: &CanonicalAlgebra,
) -> (CanonicalAlgebra, Morphism, Morphism) {
    let mut generators: Vec<GeneratorId> =
        a.presentation().generators().iter().map(|g| named("l", g)).collect();
    generators.extend(b.presentation().generators().iter().map(|g| named("r", g)));
    let an = a.n_generators();
    let mut relations: Vec<Term> =
        a.presentation().relations().iter().map(|r| relabel(r, "l")).collect();
    relations.extend(b.presentation().relations().iter().map(|r| relabel(r, "r")));
    let presentation =
        Presentation::new(generators, relations, Provenance::Synthetic("free-product".into()))
            .expect("fresh generators");
    let mut points = Vec::with_capacity(a.n_points() * b.n_points());
    let mut dual_a = Vec::with_capacity(points.capacity());
    let mut dual_b = Vec::with_capacity(points.capacity());
    for i in 0..a.n_points() {
        for j in 0..b.n_points() {
            points.push(a.point_mask(i) | (b.point_mask(j) << an));
            dual_a.push(Some(i));
            dual_b.push(Some(j));
        }
    }
    let alg = algebra_from_points(presentation, points);
    let arc = Arc::new(alg.clone());
    let inj_a = Morphism::new(Arc::new(a.clone()), arc.clone(), dual_a);
    let inj_b = Morphism::new(Arc::new(b.clone()), arc, dual_b);
    (alg, inj_a, inj_b)
}

/// Surgery of `b1` at a non-zero `a_star` by `b`: the part of `b1`
/// outside `a_star` is kept as a direct factor and the part below it is
/// freely multiplied by `b`. Returns the result and the canonical
/// embedding of `b1`.
pub fn surgery(
    b1: &CanonicalAlgebra,
    a_star: &Element,
    b: &CanonicalAlgebra,
) -> Result<(CanonicalAlgebra, Morphism), AlgebraError> {
    if a_star.is_empty() {
        return Err(AlgebraError::ZeroElement);
    }
    assert_eq!(a_star.algebra_id(), b1.id(), "element not from the carved algebra");
    if b.n_points() == 0 {
        return Err(AlgebraError::FalsifiedProperty(
            "surgery by the empty-point algebra cannot embed the source".into(),
        ));
    }
    // Generators: a split marker at bit 0 (the image of a_star), then
    // the carved algebra's generators, then the graft's.
    let marker = GeneratorId::Named("graft".into());
    let mut generators = vec![marker.clone()];
    generators.extend(b1.presentation().generators().iter().map(|g| named("l", g)));
    generators.extend(b.presentation().generators().iter().map(|g| named("r", g)));
    let n1 = b1.n_generators();
    let mut relations: Vec<Term> =
        b1.presentation().relations().iter().map(|r| relabel(r, "l")).collect();
    for r in b.presentation().relations() {
        relations.push(Term::meet(relabel(r, "r"), Term::Gen(marker.clone())));
    }
    for g in b.presentation().generators() {
        relations.push(Term::meet(Term::Gen(named("r", g)), Term::not(Term::Gen(marker.clone()))));
    }
    let a_star_term = relabel(&b1.term_of(a_star), "l");
    relations.push(Term::diff(Term::Gen(marker.clone()), a_star_term.clone()));
    relations.push(Term::diff(a_star_term, Term::Gen(marker.clone())));
    let presentation =
        Presentation::new(generators, relations, Provenance::Synthetic("surgery".into()))
            .expect("fresh generators");

    // Points: the b1-points outside a_star, then each a_star point paired
    // with every graft point.
    let mut points = Vec::new();
    let mut dual: Vec<Option<usize>> = Vec::new();
    for i in 0..b1.n_points() {
        if !a_star.contains(i) {
            points.push(b1.point_mask(i) << 1);
            dual.push(Some(i));
        }
    }
    for i in a_star.point_indices() {
        for j in 0..b.n_points() {
            points.push(1 | (b1.point_mask(i) << 1) | (b.point_mask(j) << (1 + n1)));
            dual.push(Some(i));
        }
    }
    let alg = algebra_from_points(presentation, points);
    let emb = Morphism::new(Arc::new(b1.clone()), Arc::new(alg.clone()), dual);
    Ok((alg, emb))
}

/// How a schedule step picks the surgery point in the current stage.
#[derive(Debug, Clone)]
pub enum ElementSelector {
    Atom(usize),
    Points(Vec<usize>),
    /// Complement of the forward image of the element carved at an
    /// earlier step.
    ComplementOfStage(usize),
}

/// Which presentation builder a schedule step applies to its model.
#[derive(Debug, Clone)]
pub enum BuilderTag {
    Tr,
    Ptr,
    TrH,
    Trr,
    TrHG(Vec<u32>),
    TrHE(crate::index_model::EquivProfile),
    /// Base extension over the two-element algebra with an empty
    /// disjointness sequence.
    Ba,
}

#[derive(Debug, Clone)]
pub struct ScheduleStep {
    pub model: IndexModel,
    pub selector: ElementSelector,
    pub builder: BuilderTag,
}

/// Result of folding surgeries over a schedule: the stage algebras, the
/// embedding at each step, and the carved elements.
pub struct ScheduleRun {
    pub stages: Vec<CanonicalAlgebra>,
    pub embeddings: Vec<Morphism>,
    pub carved: Vec<Element>,
}

impl ScheduleRun {
    pub fn last(&self) -> &CanonicalAlgebra {
        self.stages.last().expect("at least the seed stage")
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ScheduleError {
    #[error("selector resolved to zero at step {0}")]
    ZeroSelector(usize),
    #[error("selector out of range at step {0}")]
    BadSelector(usize),
    #[error(transparent)]
    Build(#[from] BuildError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Fold surgeries over a schedule starting from `seed`.
pub fn run_schedule(seed: &CanonicalAlgebra, steps: &[ScheduleStep]) -> Result<ScheduleRun, ScheduleError> {
    let mut run = ScheduleRun { stages: vec![seed.clone()], embeddings: Vec::new(), carved: Vec::new() };
    for (i, step) in steps.iter().enumerate() {
        let current = run.stages.last().expect("seeded").clone();
        let a_star = match &step.selector {
            ElementSelector::Atom(k) => {
                if *k >= current.n_points() {
                    return Err(ScheduleError::BadSelector(i));
                }
                current.element_from_points(&[*k])
            }
            ElementSelector::Points(idx) => {
                if idx.iter().any(|&p| p >= current.n_points()) {
                    return Err(ScheduleError::BadSelector(i));
                }
                current.element_from_points(idx)
            }
            ElementSelector::ComplementOfStage(j) => {
                if *j >= run.carved.len() {
                    return Err(ScheduleError::BadSelector(i));
                }
                // Push the step-j element through the later embeddings.
                let mut e = run.carved[*j].clone();
                for m in &run.embeddings[*j..] {
                    e = m.apply(&e);
                }
                e.complement()
            }
        };
        if a_star.is_empty() {
            return Err(ScheduleError::ZeroSelector(i));
        }
        let graft_pres = match &step.builder {
            BuilderTag::Tr => crate::builders::build_tr(&step.model)?,
            BuilderTag::Ptr => crate::builders::build_ptr(&step.model)?,
            BuilderTag::TrH => crate::builders::build_tr_h(&step.model)?,
            BuilderTag::Trr => crate::builders::build_trr(&step.model)?,
            BuilderTag::TrHG(g) => crate::builders::build_tr_h_g(&step.model, g)?,
            BuilderTag::TrHE(e) => crate::builders::build_tr_h_e(&step.model, e)?,
            BuilderTag::Ba => {
                let base = realize(&Presentation::free(0))?;
                build_ba(&base, &[], &step.model)?
            }
        };
        let graft = realize(&graft_pres)?;
        let (next, emb) = surgery(&current, &a_star, &graft)?;
        run.stages.push(next);
        run.embeddings.push(emb);
        run.carved.push(a_star);
    }
    Ok(run)
}

/// Literal regular-subalgebra check: every maximal antichain of the
/// image of `m` must stay maximal in the target. In a finite algebra a
/// maximal antichain of a subalgebra joins to the unit, so this holds
/// for every injective morphism; the check is kept literal. The search
/// enumerates the partitions of the image atoms, so it needs a small
/// image.
pub fn is_regular_sub(m: &Morphism, max_image_atoms: usize) -> Result<bool, AlgebraError> {
    if !m.is_injective() {
        return Err(AlgebraError::FalsifiedProperty("regularity check needs an embedding".into()));
    }
    // Fibers of the dual partition the target points; these are the
    // image atoms.
    let mut fibers: Vec<Vec<usize>> = vec![Vec::new(); m.source().n_points()];
    for (q, d) in m.dual().iter().enumerate() {
        if let Some(p) = d {
            fibers[*p].push(q);
        }
    }
    let k = fibers.len();
    if k > max_image_atoms {
        return Err(AlgebraError::Budget(format!(
            "{} image atoms over the partition budget {}",
            k, max_image_atoms
        )));
    }
    let target_points = m.target().n_points();
    // Enumerate set partitions of the k image atoms; each block is one
    // member of a maximal image antichain.
    let mut assignment = vec![0usize; k];
    let mut ok = true;
    enumerate_partitions(&mut assignment, 0, 0, &mut |assign| {
        let blocks = assign.iter().max().map_or(0, |&b| b + 1);
        let mut members: Vec<Element> = Vec::with_capacity(blocks);
        for b in 0..blocks {
            let idx: Vec<usize> = (0..k)
                .filter(|&i| assign[i] == b)
                .flat_map(|i| fibers[i].iter().copied())
                .collect();
            members.push(m.target().element_from_points(&idx));
        }
        // Maximal in the target: no target point escapes every member.
        let covered: Vec<usize> =
            members.iter().flat_map(|e| e.point_indices()).collect();
        if covered.len() != target_points {
            ok = false;
        }
    });
    Ok(ok)
}

fn enumerate_partitions(
    assignment: &mut [usize],
    pos: usize,
    max_used: usize,
    visit: &mut impl FnMut(&[usize]),
) {
    if pos == assignment.len() {
        visit(assignment);
        return;
    }
    for b in 0..=max_used {
        assignment[pos] = b;
        enumerate_partitions(assignment, pos + 1, max_used.max(b + 1), visit);
    }
}

/// The least element of the embedded subalgebra above a non-zero `c`:
/// the dual image of `c`'s points. It is the unique minimal upper
/// bound, and every non-zero subalgebra element below it meets `c`.
pub fn project_upper(m: &Morphism, c: &Element) -> Result<Element, AlgebraError> {
    if c.is_empty() {
        return Err(AlgebraError::ZeroElement);
    }
    assert_eq!(c.algebra_id(), m.target().id(), "element not from the target algebra");
    let idx: Vec<usize> = c
        .point_indices()
        .into_iter()
        .filter_map(|q| m.dual()[q])
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect::<Vec<_>>();
    Ok(m.source().element_from_points(&idx))
}

/// Realize the base-extension presentation and certify that the base
/// embeds injectively. A failure of injectivity is reported as a
/// falsified expectation, never silently.
pub fn build_ba_ext(
    base: &CanonicalAlgebra,
    disjoint_seq: &[Element],
    model: &IndexModel,
) -> Result<(CanonicalAlgebra, Morphism), AlgebraError> {
    let pres = build_ba(base, disjoint_seq, model)
        .map_err(|e| AlgebraError::FalsifiedProperty(e.to_string()))?;
    let ext = realize(&pres)?;
    // Dual: each extension point satisfies exactly one base atom.
    let mut dual = Vec::with_capacity(ext.n_points());
    for q in 0..ext.n_points() {
        let mut hit = None;
        for k in 0..base.n_points() {
            let e = ext.generator_element(&GeneratorId::BaseAtom(k as u32))?;
            if e.contains(q) {
                hit = Some(k);
                break;
            }
        }
        match hit {
            Some(k) => dual.push(Some(k)),
            None => {
                return Err(AlgebraError::FalsifiedProperty(
                    "extension point satisfies no base atom".into(),
                ))
            }
        }
    }
    let emb = Morphism::new(Arc::new(base.clone()), Arc::new(ext.clone()), dual);
    if !emb.is_injective() {
        return Err(AlgebraError::FalsifiedProperty(
            "base does not embed injectively into the extension".into(),
        ));
    }
    Ok((ext, emb))
}

/// Star inclusion: `i1` is included in `i2` and every branch of `i2`
/// outside `i1` has some restriction image outside `i1`.
pub fn subset_star(i1: &IndexModel, i2: &IndexModel) -> Result<bool, AlgebraError> {
    if i1.profile() != i2.profile() {
        return Err(AlgebraError::WrongShape("models must share the profile".into()));
    }
    if !i1.nodes().iter().all(|n| i2.contains(n)) {
        return Ok(false);
    }
    for branch in i2.branches() {
        if i1.contains(branch) {
            continue;
        }
        let escapes = i2.res_images(branch).iter().any(|img| !i1.contains(img));
        if !escapes {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A node-selector form of `subset_star`'s helper: build the sub-model
/// of `model` on `keep` (which must be restriction-closed).
pub fn sub_model(
    model: &IndexModel,
    keep: &[IndexNode],
) -> Result<IndexModel, crate::index_model::IndexModelError> {
    IndexModel::new(model.profile().clone(), model.j_size(), keep.to_vec())
}
