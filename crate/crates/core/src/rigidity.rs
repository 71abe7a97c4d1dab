//! Homomorphism and embedding enumeration through finite duality,
//! quotients by ideals, the sequence-tree quotient normal form, and
//! rigidity checks.

use std::collections::{BTreeMap, BTreeSet};
use std::sync::Arc;

use serde::Serialize;

use crate::algebra::{realize, AlgebraError, CanonicalAlgebra, Element};
use crate::builders::trr_relations;
use crate::combine::{restrict_points, Morphism};
use crate::index_model::{ArityProfile, IndexModel, IndexNode, NodeKind};
use crate::term::{GeneratorId, Presentation, Provenance, Term};

/// An ideal of a finite algebra, determined by the union of its
/// generators: it contains exactly the elements below that support.
#[derive(Debug, Clone)]
pub struct Ideal {
    generators: Vec<Element>,
    support: Element,
}

impl Ideal {
    pub fn new(alg: &CanonicalAlgebra, generators: Vec<Element>) -> Ideal {
        let mut support = alg.zero();
        for g in &generators {
            assert_eq!(g.algebra_id(), alg.id(), "generator from a different algebra");
            support = support.join(g);
        }
        Ideal { generators, support }
    }

    pub fn generators(&self) -> &[Element] {
        &self.generators
    }

    pub fn support(&self) -> &Element {
        &self.support
    }

    pub fn contains(&self, e: &Element) -> bool {
        e.leq(&self.support)
    }

    pub fn is_proper(&self, alg: &CanonicalAlgebra) -> bool {
        self.support != alg.one()
    }
}

/// All unit-preserving homomorphisms from `a` to `b` that satisfy the
/// generator-image constraints, enumerated as dual point functions.
pub fn enumerate_homs(
    a: &CanonicalAlgebra,
    b: &CanonicalAlgebra,
    constraints: &[(GeneratorId, Element)],
    budget: usize,
) -> Result<Vec<Morphism>, AlgebraError> {
    let (na, nb) = (a.n_points(), b.n_points());
    let total = (na as u128).checked_pow(nb as u32).unwrap_or(u128::MAX);
    if total > budget as u128 {
        return Err(AlgebraError::Budget(format!(
            "{} candidate duals over the budget {}",
            total, budget
        )));
    }
    for (g, img) in constraints {
        a.generator_element(g)?;
        assert_eq!(img.algebra_id(), b.id(), "constraint image from a different algebra");
    }
    if na == 0 && nb > 0 {
        return Ok(Vec::new());
    }
    let arc_a = Arc::new(a.clone());
    let arc_b = Arc::new(b.clone());
    let mut out = Vec::new();
    let mut dual = vec![0usize; nb];
    loop {
        let m = Morphism::new(arc_a.clone(), arc_b.clone(), dual.iter().map(|&d| Some(d)).collect());
        let ok = constraints.iter().all(|(g, img)| {
            let den = a.generator_element(g).expect("checked above");
            m.apply(&den) == *img
        });
        if ok {
            out.push(m);
        }
        // Advance the dual in mixed radix.
        let mut pos = 0;
        loop {
            if nb == 0 || na == 0 {
                return Ok(out);
            }
            dual[pos] += 1;
            if dual[pos] < na {
                break;
            }
            dual[pos] = 0;
            pos += 1;
            if pos == nb {
                return Ok(out);
            }
        }
    }
}

/// Quotient by an ideal: the restriction to the complement of the
/// support, together with the quotient surjection.
pub fn quotient(alg: &CanonicalAlgebra, ideal: &Ideal) -> (CanonicalAlgebra, Morphism) {
    restrict_points(alg, &ideal.support().complement())
}

/// Result of the sequence-tree quotient normal form: the computed index
/// set, the realized companion algebra, and the verified constrained
/// isomorphism onto the quotient. Improper ideals collapse both sides
/// to the one-element algebra and carry no index content.
pub struct TrrQuotient {
    pub index_seqs: Vec<Vec<u32>>,
    pub model: Option<IndexModel>,
    pub companion: Option<CanonicalAlgebra>,
    pub iso: Option<Morphism>,
    pub improper: bool,
}

/// Normal form of a quotient of a sequence-tree presentation: from the
/// ideal compute the surviving index set, the exactly-covered nodes,
/// their escape successors, and return an index set whose presentation
/// realizes isomorphically to the quotient. The isomorphism is found by
/// a search constrained to match the surviving generators and any
/// failure is reported loudly.
pub fn trr_quotient_index(
    model: &IndexModel,
    alg: &CanonicalAlgebra,
    ideal: &Ideal,
) -> Result<TrrQuotient, AlgebraError> {
    if *alg.presentation().provenance() != Provenance::Trr {
        return Err(AlgebraError::WrongShape(
            "quotient normal form needs a sequence-tree presentation".into(),
        ));
    }
    let (q, _) = quotient(alg, ideal);
    if !ideal.is_proper(alg) {
        if q.n_points() != 0 {
            return Err(AlgebraError::FalsifiedProperty(
                "improper ideal must collapse the quotient".into(),
            ));
        }
        return Ok(TrrQuotient {
            index_seqs: Vec::new(),
            model: None,
            companion: None,
            iso: None,
            improper: true,
        });
    }

    // Denotation per value sequence; twin nodes are glued equal by the
    // builder, so any witness serves.
    let mut witnesses: BTreeMap<Vec<u32>, &IndexNode> = BTreeMap::new();
    let mut has_branch: BTreeSet<Vec<u32>> = BTreeSet::new();
    for node in model.nodes() {
        witnesses.entry(node.seq()).or_insert(node);
        if node.kind() == NodeKind::Branch {
            has_branch.insert(node.seq());
        }
    }
    let den = |s: &[u32]| -> Result<Element, AlgebraError> {
        alg.generator_element(&GeneratorId::Node(witnesses[s].clone()))
    };
    let mut surviving: Vec<Vec<u32>> = Vec::new();
    for s in witnesses.keys() {
        if !ideal.contains(&den(s)?) {
            surviving.push(s.clone());
        }
    }
    let surv_set: BTreeSet<Vec<u32>> = surviving.iter().cloned().collect();
    let successors_in = |s: &[u32]| -> Vec<Vec<u32>> {
        surviving
            .iter()
            .filter(|t| t.len() == s.len() + 1 && t.starts_with(s))
            .cloned()
            .collect()
    };

    // Split the survivors into exactly-covered sequences and the rest.
    let mut exactly_covered: BTreeSet<Vec<u32>> = BTreeSet::new();
    let mut uncovered: BTreeSet<Vec<u32>> = BTreeSet::new();
    for s in &surviving {
        let mut cover = alg.zero();
        for t in successors_in(s) {
            cover = cover.join(&den(&t)?);
        }
        let residual = den(s)?.diff(&cover);
        if ideal.contains(&residual) {
            exactly_covered.insert(s.clone());
        } else {
            uncovered.insert(s.clone());
        }
    }

    // Escape pairs: an exactly-covered sequence below a surviving
    // branch, every approximation of which differs from it only inside
    // the ideal, minimally so. A truncated branch equals its absorbed
    // tail of prefixes, so the approximations include the branch itself
    // and a pair can only escape when the branch value leaks below
    // them, which the truncation rules out; the set stays computed for
    // the report.
    let pair_condition = |s: &[u32], bseq: &[u32]| -> Result<bool, AlgebraError> {
        if !exactly_covered.contains(s) {
            return Ok(false);
        }
        if bseq.len() < s.len() || !bseq.starts_with(s) {
            return Ok(false);
        }
        let x_s = den(s)?;
        for i in s.len()..=bseq.len() {
            if let Some(w) = witnesses.get(&bseq[..i]) {
                let prefix_den =
                    alg.generator_element(&GeneratorId::Node((*w).clone()))?;
                if !ideal.contains(&x_s.diff(&prefix_den)) {
                    return Ok(false);
                }
            }
        }
        // Absorbed tail: the branch carries its hidden prefixes.
        if !ideal.contains(&x_s.diff(&den(bseq)?)) {
            return Ok(false);
        }
        Ok(true)
    };
    let mut escape_pairs: Vec<(Vec<u32>, Vec<u32>)> = Vec::new();
    for bseq in has_branch.iter().filter(|b| surv_set.contains(*b)) {
        for s in &surviving {
            if !pair_condition(s, bseq)? {
                continue;
            }
            let minimal = {
                let mut m = true;
                for k in 0..s.len() {
                    if pair_condition(&s[..k], bseq)? {
                        m = false;
                        break;
                    }
                }
                m
            };
            if minimal && !ideal.contains(&den(s)?.diff(&den(bseq)?)) {
                escape_pairs.push((s.clone(), bseq.clone()));
            }
        }
    }

    // Fresh successor values and the final index set.
    let fresh_value = |s: &[u32]| -> u32 {
        (0..).find(|&v| {
            let mut t = s.to_vec();
            t.push(v);
            !witnesses.contains_key(&t)
        }).expect("some value is unused")
    };
    let mut index_seqs: BTreeSet<Vec<u32>> = surv_set.clone();
    for s in &uncovered {
        let mut t = s.clone();
        t.push(fresh_value(s));
        index_seqs.insert(t);
    }
    for (s, _) in &escape_pairs {
        let mut t = s.clone();
        t.push(fresh_value(s) + 1);
        index_seqs.insert(t);
    }
    let index_seqs: Vec<Vec<u32>> = index_seqs.into_iter().collect();

    // Companion presentation over the computed sequences.
    let seq_node = |s: &[u32]| IndexNode::from_seq(s);
    let generators: Vec<GeneratorId> =
        index_seqs.iter().map(|s| GeneratorId::Node(seq_node(s))).collect();
    let relations = trr_relations(&index_seqs, &|s| Term::node(&seq_node(s)));
    let companion_pres = Presentation::new(generators, relations, Provenance::Trr)?;
    let companion = realize(&companion_pres)?;

    // Constrained isomorphism: quotient points and companion points must
    // match up respecting every surviving generator.
    if companion.n_points() != q.n_points() {
        return Err(AlgebraError::FalsifiedProperty(format!(
            "companion has {} points, quotient has {}",
            companion.n_points(),
            q.n_points()
        )));
    }
    // The quotient keeps a sub-list of the original points.
    let kept = ideal.support().complement().point_indices();
    let signature_q: Vec<Vec<bool>> = (0..q.n_points())
        .map(|p| {
            surviving
                .iter()
                .map(|s| {
                    let img = den(s).expect("surviving generator");
                    img.contains(kept[p])
                })
                .collect()
        })
        .collect();
    let signature_c: Vec<Vec<bool>> = (0..companion.n_points())
        .map(|p| {
            surviving
                .iter()
                .map(|s| {
                    companion
                        .generator_element(&GeneratorId::Node(seq_node(s)))
                        .expect("surviving sequence is a companion generator")
                        .contains(p)
                })
                .collect()
        })
        .collect();
    let mut used = vec![false; companion.n_points()];
    let mut dual: Vec<Option<usize>> = Vec::with_capacity(q.n_points());
    for sig in &signature_q {
        let found = (0..companion.n_points()).find(|&c| !used[c] && signature_c[c] == *sig);
        match found {
            Some(c) => {
                used[c] = true;
                dual.push(Some(c));
            }
            None => {
                return Err(AlgebraError::FalsifiedProperty(
                    "no constrained point matching between companion and quotient".into(),
                ))
            }
        }
    }
    let iso = Morphism::new(Arc::new(companion.clone()), Arc::new(q), dual);
    debug_assert!(iso.is_injective() && iso.is_surjective());

    let model_out = if index_seqs.is_empty() {
        None
    } else {
        let depth = index_seqs.iter().map(Vec::len).max().unwrap_or(0).max(1);
        let j_size = index_seqs
            .iter()
            .flat_map(|s| s.iter().copied())
            .max()
            .map_or(1, |m| m + 1);
        let nodes: Vec<IndexNode> = index_seqs.iter().map(|s| seq_node(s)).collect();
        Some(
            IndexModel::new(ArityProfile::tr(depth), j_size, nodes)
                .map_err(|e| AlgebraError::FalsifiedProperty(e.to_string()))?,
        )
    };
    Ok(TrrQuotient {
        index_seqs,
        model: model_out,
        companion: Some(companion),
        iso: Some(iso),
        improper: false,
    })
}

/// Outcome of the two-map rigidity search.
#[derive(Debug)]
pub struct RigidityVerdict {
    pub rigid: bool,
    pub witness: Option<(Morphism, Morphism)>,
}

/// Search for a pair of homomorphisms into a common quotient, one
/// injective and one surjective, that differ. Quotients suffice as
/// targets because a surjection identifies the target with a quotient.
pub fn bonnet_rigid(alg: &CanonicalAlgebra, budget: usize) -> Result<RigidityVerdict, AlgebraError> {
    let n = alg.n_points();
    if n > budget {
        return Err(AlgebraError::Budget(format!("{} points over the budget {}", n, budget)));
    }
    // An injective map into a quotient needs at least as many points as
    // the source, so only the full quotient can host one.
    let arc = Arc::new(alg.clone());
    let perms = permutations(n);
    for f0_perm in &perms {
        let f0 = Morphism::new(
            arc.clone(),
            arc.clone(),
            f0_perm.iter().map(|&p| Some(p)).collect(),
        );
        for f1_perm in &perms {
            if f0_perm == f1_perm {
                continue;
            }
            let f1 = Morphism::new(
                arc.clone(),
                arc.clone(),
                f1_perm.iter().map(|&p| Some(p)).collect(),
            );
            debug_assert!(f0.is_injective() && f1.is_surjective());
            return Ok(RigidityVerdict { rigid: false, witness: Some((f0, f1)) });
        }
    }
    Ok(RigidityVerdict { rigid: true, witness: None })
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    assert!(n <= 8, "permutation sweep needs a small point count");
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn extend(n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n {
            if !cur.contains(&v) {
                cur.push(v);
                extend(n, cur, out);
                cur.pop();
            }
        }
    }
    extend(n, &mut cur, &mut out);
    out
}

/// Report of the disjoint-pieces obstruction search: does some pair of
/// disjoint non-zero elements admit an embedding of the algebra below
/// one into a homomorphic image of the algebra below the other?
#[derive(Debug, Serialize)]
pub struct ObstructionReport {
    pub obstruction_free: bool,
    pub witness: Option<ObstructionWitness>,
    pub rigid: bool,
    pub implication_holds: bool,
}

#[derive(Debug, Serialize)]
pub struct ObstructionWitness {
    pub below: Vec<usize>,
    pub into: Vec<usize>,
    pub image_of: Vec<usize>,
    /// Dual of the verified embedding: image points onto `below` points.
    pub embedding_dual: Vec<usize>,
}

/// Search all disjoint non-zero pairs `(a, b)` for an embedding of the
/// restriction below `a` into a homomorphic image of the restriction
/// below `b`, then cross-check that an obstruction-free algebra is
/// rigid in the two-map sense.
pub fn rigidity_obstruction(
    alg: &CanonicalAlgebra,
    budget: usize,
) -> Result<ObstructionReport, AlgebraError> {
    let n = alg.n_points();
    if n > budget || n >= 16 {
        return Err(AlgebraError::Budget(format!("{} points over the budget {}", n, budget)));
    }
    let mut witness: Option<ObstructionWitness> = None;
    'outer: for a_mask in 1u64..(1 << n) {
        for b_mask in 1u64..(1 << n) {
            if a_mask & b_mask != 0 {
                continue;
            }
            let a_pts: Vec<usize> = (0..n).filter(|&i| a_mask & (1 << i) != 0).collect();
            let b_pts: Vec<usize> = (0..n).filter(|&i| b_mask & (1 << i) != 0).collect();
            // Homomorphic images of the part below b are its
            // restrictions; an embedding needs at least |a| points, so
            // the part below b itself is the best candidate.
            if a_pts.len() <= b_pts.len() {
                let (ra, _) = restrict_points(alg, &alg.element_from_points(&a_pts));
                let (rb, _) = restrict_points(alg, &alg.element_from_points(&b_pts));
                let dual: Vec<usize> =
                    (0..rb.n_points()).map(|j| j.min(ra.n_points() - 1)).collect();
                let emb = Morphism::new(
                    Arc::new(ra),
                    Arc::new(rb),
                    dual.iter().map(|&d| Some(d)).collect(),
                );
                if !emb.is_injective() {
                    return Err(AlgebraError::FalsifiedProperty(
                        "constructed witness embedding is not injective".into(),
                    ));
                }
                witness = Some(ObstructionWitness {
                    below: a_pts,
                    into: b_pts.clone(),
                    image_of: b_pts,
                    embedding_dual: dual,
                });
                break 'outer;
            }
        }
    }
    let obstruction_free = witness.is_none();
    let verdict = bonnet_rigid(alg, budget)?;
    Ok(ObstructionReport {
        obstruction_free,
        witness,
        rigid: verdict.rigid,
        implication_holds: !obstruction_free || verdict.rigid,
    })
}

/// All injective endomorphisms other than the identity.
pub fn mono_endo_search(alg: &CanonicalAlgebra, budget: usize) -> Result<Vec<Morphism>, AlgebraError> {
    let n = alg.n_points();
    if n > budget {
        return Err(AlgebraError::Budget(format!("{} points over the budget {}", n, budget)));
    }
    let arc = Arc::new(alg.clone());
    let id: Vec<usize> = (0..n).collect();
    Ok(permutations(n)
        .into_iter()
        .filter(|p| *p != id)
        .map(|p| Morphism::new(arc.clone(), arc.clone(), p.into_iter().map(Some).collect()))
        .collect())
}

/// For an injective endomorphism other than the identity, produce a
/// non-zero element disjoint from its own image: take some `x` moved by
/// the map and keep whichever of `x - f(x)` and `f(x) - x` is non-zero.
pub fn disjointifier(alg: &CanonicalAlgebra, f: &Morphism) -> Result<Element, AlgebraError> {
    if f.source().id() != alg.id() || f.target().id() != alg.id() {
        return Err(AlgebraError::AlgebraMismatch);
    }
    if !f.is_injective() {
        return Err(AlgebraError::WrongShape("an injective endomorphism is required".into()));
    }
    let n = alg.n_points();
    assert!(n < 24, "element sweep needs a small algebra");
    let mut moved: Option<(Element, Element)> = None;
    for mask in 0u64..(1 << n) {
        let idx: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
        let x = alg.element_from_points(&idx);
        let fx = f.apply(&x);
        if fx != x {
            moved = Some((x, fx));
            break;
        }
    }
    let Some((x, fx)) = moved else {
        return Err(AlgebraError::WrongShape("the identity admits no disjoint mover".into()));
    };
    let candidate = {
        let first = x.diff(&fx);
        if first.is_empty() {
            fx.diff(&x)
        } else {
            first
        }
    };
    let f_candidate = f.apply(&candidate);
    if candidate.is_empty() || !candidate.disjoint(&f_candidate) {
        return Err(AlgebraError::FalsifiedProperty(
            "constructed element is not disjoint from its image".into(),
        ));
    }
    Ok(candidate)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::realize;
    use crate::builders::build_trr;
    use crate::term::Presentation;

    fn power(n: usize) -> CanonicalAlgebra {
        let gens: Vec<GeneratorId> = (0..n).map(|i| GeneratorId::Named(format!("p{}", i))).collect();
        let mut relations = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                relations.push(Term::meet(Term::Gen(gens[i].clone()), Term::Gen(gens[j].clone())));
            }
        }
        relations.push(Term::not(Term::big_join(gens.iter().cloned().map(Term::Gen))));
        realize(&Presentation::new(gens, relations, Provenance::Synthetic("points".into())).unwrap())
            .unwrap()
    }

    #[test]
    fn hom_counts_follow_duality() {
        let a = power(2);
        let b = power(1);
        assert_eq!(enumerate_homs(&a, &b, &[], 100_000).unwrap().len(), 2);
        for (na, nb) in [(1usize, 1usize), (2, 2), (3, 2), (2, 3)] {
            let x = power(na);
            let y = power(nb);
            let homs = enumerate_homs(&x, &y, &[], 100_000).unwrap();
            assert_eq!(homs.len(), na.pow(nb as u32));
            let has_injective = homs.iter().any(Morphism::is_injective);
            assert_eq!(has_injective, nb >= na);
        }
    }

    #[test]
    fn constrained_hom_search() {
        let a = power(2);
        let b = power(2);
        let img = b.element_from_points(&[0]);
        let constraint = (GeneratorId::Named("p0".into()), img.clone());
        let homs = enumerate_homs(&a, &b, &[constraint], 100_000).unwrap();
        assert!(!homs.is_empty());
        for m in &homs {
            let den = a.generator_element(&GeneratorId::Named("p0".into())).unwrap();
            assert_eq!(m.apply(&den), img);
        }
    }

    #[test]
    fn quotient_examples() {
        let a = power(3);
        let zero_ideal = Ideal::new(&a, vec![]);
        let (same, proj) = quotient(&a, &zero_ideal);
        assert_eq!(same.n_points(), 3);
        assert!(proj.is_surjective());
        let improper = Ideal::new(&a, vec![a.one()]);
        let (trivial, _) = quotient(&a, &improper);
        assert_eq!(trivial.n_points(), 0);
        let one_atom = Ideal::new(&a, vec![a.element_from_points(&[0])]);
        let (q, _) = quotient(&a, &one_atom);
        assert_eq!(q.n_points(), 2);
    }

    fn fan() -> (IndexModel, CanonicalAlgebra) {
        let model = IndexModel::new(
            ArityProfile::tr(1),
            2,
            vec![IndexNode::from_seq(&[0]), IndexNode::from_seq(&[1])],
        )
        .unwrap();
        let alg = realize(&build_trr(&model).unwrap()).unwrap();
        (model, alg)
    }

    #[test]
    fn trr_quotient_zero_ideal_reproduces_algebra() {
        let (model, alg) = fan();
        let j = Ideal::new(&alg, vec![]);
        let out = trr_quotient_index(&model, &alg, &j).unwrap();
        assert!(!out.improper);
        let companion = out.companion.unwrap();
        assert_eq!(companion.n_points(), alg.n_points());
        let iso = out.iso.unwrap();
        assert!(iso.is_injective() && iso.is_surjective());
    }

    #[test]
    fn trr_quotient_kills_a_generator() {
        let (model, alg) = fan();
        let x1 = alg
            .generator_element(&GeneratorId::Node(IndexNode::from_seq(&[1])))
            .unwrap();
        let j = Ideal::new(&alg, vec![x1]);
        let out = trr_quotient_index(&model, &alg, &j).unwrap();
        let companion = out.companion.unwrap();
        let (q, _) = quotient(&alg, &j);
        assert_eq!(companion.n_points(), q.n_points());
        assert!(out.iso.unwrap().is_surjective());
    }

    #[test]
    fn trr_quotient_improper() {
        let (model, alg) = fan();
        let j = Ideal::new(&alg, vec![alg.one()]);
        let out = trr_quotient_index(&model, &alg, &j).unwrap();
        assert!(out.improper);
        assert!(out.model.is_none());
    }

    #[test]
    fn trr_quotient_rejects_other_builders() {
        let model = IndexModel::new(ArityProfile::tr(1), 1, vec![IndexNode::from_seq(&[0])]).unwrap();
        let alg = realize(&crate::builders::build_tr(&model).unwrap()).unwrap();
        let j = Ideal::new(&alg, vec![]);
        assert!(matches!(
            trr_quotient_index(&model, &alg, &j),
            Err(AlgebraError::WrongShape(_))
        ));
    }

    #[test]
    fn bonnet_rigidity_small_cases() {
        // One point: the only maps agree.
        let one = power(1);
        assert!(bonnet_rigid(&one, 8).unwrap().rigid);
        // Two atoms: the swap against the identity is a witness.
        let two = power(2);
        let verdict = bonnet_rigid(&two, 8).unwrap();
        assert!(!verdict.rigid);
        let (f0, f1) = verdict.witness.unwrap();
        assert!(f0.is_injective());
        assert!(f1.is_surjective());
        for n in 2..=4 {
            assert!(!bonnet_rigid(&power(n), 8).unwrap().rigid);
        }
    }

    #[test]
    fn obstruction_report() {
        let one = power(1);
        let r = rigidity_obstruction(&one, 8).unwrap();
        assert!(r.obstruction_free);
        assert!(r.implication_holds);
        let two = power(2);
        let r = rigidity_obstruction(&two, 8).unwrap();
        assert!(!r.obstruction_free);
        assert!(r.witness.is_some());
        assert!(r.implication_holds);
    }

    #[test]
    fn disjointifier_on_swap() {
        let two = power(2);
        let endos = mono_endo_search(&two, 8).unwrap();
        assert_eq!(endos.len(), 1);
        let swap = &endos[0];
        let a = disjointifier(&two, swap).unwrap();
        assert!(!a.is_empty());
        assert!(a.disjoint(&swap.apply(&a)));
        // The identity is rejected.
        let id = Morphism::identity(&two);
        assert!(disjointifier(&two, &id).is_err());
    }
}
