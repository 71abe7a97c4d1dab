//! The presentation builders: each one turns an index model into a
//! family of `term = 0` relations over the node generators.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::algebra::{CanonicalAlgebra, Element};
use crate::index_model::{EquivProfile, IndexModel, IndexModelError, IndexNode};
use crate::term::{GeneratorId, Presentation, Provenance, Term, TermError};

#[derive(Debug, Error)]
pub enum BuildError {
    #[error("builder requires a different arity profile: {0}")]
    WrongProfile(String),
    #[error("bad builder parameter: {0}")]
    BadParameter(String),
    #[error("disjointness sequence entries must be pairwise disjoint")]
    NotDisjoint,
    #[error("disjointness sequence entries must be non-zero")]
    ZeroEntry,
    #[error(transparent)]
    Term(#[from] TermError),
    #[error(transparent)]
    Model(#[from] IndexModelError),
}

fn node_generators(model: &IndexModel) -> Vec<GeneratorId> {
    model.nodes().iter().map(|n| GeneratorId::Node(n.clone())).collect()
}

/// Branch-below-node collapse: for every branch above a node, the
/// branch generator sits below the node generator.
pub fn build_tr(model: &IndexModel) -> Result<Presentation, BuildError> {
    if !model.profile().is_classic_tr() {
        return Err(BuildError::WrongProfile("classic arity-1 profile required".into()));
    }
    let mut relations = Vec::new();
    for branch in model.branches() {
        for eta in model.nodes() {
            if model.proper_initial_segment(eta, branch) {
                relations.push(Term::meet(Term::node(branch), Term::not(Term::node(eta))));
            }
        }
    }
    Ok(Presentation::new(node_generators(model), relations, Provenance::Tr)?)
}

/// Pair-tree relations: each branch sits below its left restriction and
/// misses its right restriction, level by level.
pub fn build_ptr(model: &IndexModel) -> Result<Presentation, BuildError> {
    if !model.profile().is_ptr() {
        return Err(BuildError::WrongProfile("constant arity-2 profile required".into()));
    }
    let mut relations = Vec::new();
    for branch in model.branches() {
        for level in 0..model.profile().depth() {
            let left = model.res(branch, level, 0);
            let right = model.res(branch, level, 1);
            relations.push(Term::meet(Term::node(branch), Term::not(Term::node(&left))));
            relations.push(Term::meet(Term::node(branch), Term::node(&right)));
        }
    }
    Ok(Presentation::new(node_generators(model), relations, Provenance::Ptr)?)
}

/// Wide-tuple relations: each branch sits below its coordinate-0
/// restriction and misses the meet of the remaining restrictions. On a
/// classic profile this is by definition the branch-collapse builder.
pub fn build_tr_h(model: &IndexModel) -> Result<Presentation, BuildError> {
    if model.profile().is_classic_tr() {
        let p = build_tr(model)?;
        return Ok(Presentation::new(
            p.generators().to_vec(),
            p.relations().to_vec(),
            Provenance::TrH,
        )?);
    }
    let mut relations = Vec::new();
    for branch in model.branches() {
        for level in 0..model.profile().depth() {
            let h = model.profile().arity(level) as usize;
            let first = model.res(branch, level, 0);
            relations.push(Term::meet(Term::node(branch), Term::not(Term::node(&first))));
            if h >= 2 {
                let tail = Term::big_meet(
                    (1..h).map(|m| Term::node(&model.res(branch, level, m))),
                );
                relations.push(Term::meet(Term::node(branch), tail));
            }
        }
    }
    Ok(Presentation::new(node_generators(model), relations, Provenance::TrH)?)
}

/// Sequence-tree relations over the value sequences: sibling
/// disjointness, monotone descent, the finite-cover equality for nodes
/// with at least two successors, and chain collapse along
/// unique-successor intervals. The root generator is pinned to the
/// unit, which is what makes the node generators dense in the result
/// and the quotient normal form land on the right algebra.
///
/// A truncated branch stands for the whole absorbed tail of its finite
/// prefixes, every one of which has a unique successor, so when a
/// branch shares its value sequence with a finite node the two
/// generators are glued equal.
pub fn build_trr(model: &IndexModel) -> Result<Presentation, BuildError> {
    if !model.profile().is_classic_tr() {
        return Err(BuildError::WrongProfile("classic arity-1 profile required".into()));
    }
    let mut by_seq: BTreeMap<Vec<u32>, Vec<&IndexNode>> = BTreeMap::new();
    for n in model.nodes() {
        by_seq.entry(n.seq()).or_default().push(n);
    }
    let seqs: Vec<Vec<u32>> = by_seq.keys().cloned().collect();
    let mut relations = trr_relations(&seqs, &|s| Term::node(by_seq[s][0]));
    for group in by_seq.values().filter(|g| g.len() > 1) {
        for pair in group.windows(2) {
            relations.push(Term::diff(Term::node(pair[0]), Term::node(pair[1])));
            relations.push(Term::diff(Term::node(pair[1]), Term::node(pair[0])));
        }
    }
    Ok(Presentation::new(node_generators(model), relations, Provenance::Trr)?)
}

/// The root-unit pinning shared by the model-level and sequence-level
/// builders: `-x_root = 0`.
pub(crate) fn trr_root_unit(gen: &dyn Fn(&[u32]) -> Term) -> Term {
    Term::not(gen(&[]))
}

/// The sequence-tree relation recipe over a plain prefix-closed set of
/// value sequences, with a caller-chosen generator term per sequence.
/// When the root sequence is present its generator is the unit.
pub(crate) fn trr_relations(seqs: &[Vec<u32>], gen: &dyn Fn(&[u32]) -> Term) -> Vec<Term> {
    let successors = |s: &[u32]| -> Vec<Vec<u32>> {
        seqs.iter()
            .filter(|t| t.len() == s.len() + 1 && t.starts_with(s))
            .cloned()
            .collect()
    };

    let mut relations = Vec::new();
    // (a) siblings are disjoint.
    for s in seqs {
        let succ = successors(s);
        for i in 0..succ.len() {
            for j in i + 1..succ.len() {
                relations.push(Term::meet(gen(&succ[i]), gen(&succ[j])));
            }
        }
    }
    // (b) descent: longer sequences sit below their prefixes.
    for s in seqs {
        for t in seqs {
            if t.len() < s.len() && s.starts_with(t) {
                relations.push(Term::meet(gen(s), Term::not(gen(t))));
            }
        }
    }
    // (c) a node with k >= 2 successors equals their join.
    for s in seqs {
        let succ = successors(s);
        if succ.len() >= 2 {
            let join = Term::big_join(succ.iter().map(|t| gen(t)));
            relations.push(Term::meet(gen(s), Term::not(join.clone())));
            relations.push(Term::meet(join, Term::not(gen(s))));
        }
    }
    // (d) unique-successor intervals collapse.
    for s in seqs {
        for t in seqs {
            if t.len() >= s.len() || !s.starts_with(t) {
                continue;
            }
            let collapses = (t.len()..s.len()).all(|k| successors(&s[..k]).len() == 1);
            if collapses {
                relations.push(Term::meet(gen(t), Term::not(gen(s))));
                relations.push(Term::meet(gen(s), Term::not(gen(t))));
            }
        }
    }
    if seqs.iter().any(|s| s.is_empty()) {
        relations.push(trr_root_unit(gen));
    }
    relations
}

/// Cover-bound relations: each branch is covered by its first `g(l)`
/// restrictions at every level, and misses the meet of the rest when
/// that meet is non-trivial.
pub fn build_tr_h_g(model: &IndexModel, g: &[u32]) -> Result<Presentation, BuildError> {
    let d = model.profile().depth();
    if g.len() != d {
        return Err(BuildError::BadParameter(format!(
            "g must give one bound per level ({} levels)",
            d
        )));
    }
    for (lvl, &b) in g.iter().enumerate() {
        if b > model.profile().arity(lvl) {
            return Err(BuildError::BadParameter(format!(
                "g({}) = {} exceeds the arity {}",
                lvl,
                b,
                model.profile().arity(lvl)
            )));
        }
    }
    let mut relations = Vec::new();
    for branch in model.branches() {
        for (level, &bound) in g.iter().enumerate() {
            let h = model.profile().arity(level);
            let cover = Term::big_join(
                (0..bound as usize).map(|m| Term::node(&model.res(branch, level, m))),
            );
            relations.push(Term::meet(Term::node(branch), Term::not(cover)));
            if bound < h.saturating_sub(1) {
                let tail = Term::big_meet(
                    (bound as usize..h as usize)
                        .map(|m| Term::node(&model.res(branch, level, m))),
                );
                relations.push(Term::meet(Term::node(branch), tail));
            }
        }
    }
    Ok(Presentation::new(node_generators(model), relations, Provenance::TrHG { g: g.to_vec() })?)
}

/// Equivalence-pair relations: each branch is covered by the
/// restrictions named by the first member of the level's pair class and
/// misses the join of those named by the second.
pub fn build_tr_h_e(model: &IndexModel, e: &EquivProfile) -> Result<Presentation, BuildError> {
    let d = model.profile().depth();
    let mut pairs = Vec::with_capacity(d);
    for level in 0..d {
        let (u1, u2) = e.pair_class(level)?;
        pairs.push((u1.to_vec(), u2.to_vec()));
    }
    let mut relations = Vec::new();
    for branch in model.branches() {
        for (level, (u1, u2)) in pairs.iter().enumerate() {
            let cover = Term::big_join(
                u1.iter().map(|&m| Term::node(&model.res(branch, level, m as usize))),
            );
            relations.push(Term::meet(Term::node(branch), Term::not(cover)));
            let avoid = Term::big_join(
                u2.iter().map(|&m| Term::node(&model.res(branch, level, m as usize))),
            );
            relations.push(Term::meet(Term::node(branch), avoid));
        }
    }
    Ok(Presentation::new(node_generators(model), relations, Provenance::TrHE)?)
}

/// Extension of a base algebra by node generators: the base enters
/// through its atom partition, each branch is tied to the disjoint
/// sequence through the paired-difference clauses (even levels bound
/// from below, odd levels cut from above), and the root is zero.
pub fn build_ba(
    base: &CanonicalAlgebra,
    disjoint_seq: &[Element],
    model: &IndexModel,
) -> Result<Presentation, BuildError> {
    let d = model.profile().depth();
    if disjoint_seq.len() > d {
        return Err(BuildError::BadParameter(format!(
            "disjointness sequence longer than the profile depth {}",
            d
        )));
    }
    for (i, a) in disjoint_seq.iter().enumerate() {
        if a.algebra_id() != base.id() {
            return Err(BuildError::BadParameter(
                "sequence entries must come from the base algebra".into(),
            ));
        }
        if a.is_empty() {
            return Err(BuildError::ZeroEntry);
        }
        for b in &disjoint_seq[..i] {
            if !a.disjoint(b) {
                return Err(BuildError::NotDisjoint);
            }
        }
    }
    let n_atoms = base.n_points();
    let mut generators: Vec<GeneratorId> = (0..n_atoms as u32).map(GeneratorId::BaseAtom).collect();
    generators.extend(node_generators(model));

    let atom = |k: usize| Term::Gen(GeneratorId::BaseAtom(k as u32));
    let elem_term = |e: &Element| Term::big_join(e.point_indices().into_iter().map(atom));

    let mut relations = Vec::new();
    // Base atom partition: pairwise disjoint, join is the unit.
    for i in 0..n_atoms {
        for j in i + 1..n_atoms {
            relations.push(Term::meet(atom(i), atom(j)));
        }
    }
    relations.push(Term::not(Term::big_join((0..n_atoms).map(atom))));
    // Node generators sit below the unit.
    for node in model.nodes() {
        relations.push(Term::meet(Term::node(node), Term::not(Term::One)));
    }
    // Paired-difference clauses against the disjoint sequence.
    for branch in model.branches() {
        for (n, a_n) in disjoint_seq.iter().enumerate() {
            let h = model.profile().arity(n) as usize;
            let paired_diffs: Vec<Term> = (0..h / 2)
                .map(|l| {
                    Term::diff(
                        Term::node(&model.res(branch, n, 2 * l)),
                        Term::node(&model.res(branch, n, 2 * l + 1)),
                    )
                })
                .collect();
            if n % 2 == 0 {
                let lower = Term::diff(elem_term(a_n), Term::big_join(paired_diffs));
                relations.push(Term::meet(lower, Term::not(Term::node(branch))));
            } else {
                let guard = Term::big_meet(paired_diffs.into_iter().map(Term::not));
                relations.push(Term::meet(
                    Term::meet(elem_term(a_n), guard),
                    Term::node(branch),
                ));
            }
        }
    }
    // The root vanishes.
    relations.push(Term::node(&IndexNode::root()));
    Ok(Presentation::new(
        generators,
        relations,
        Provenance::BaseExtension { base_atoms: n_atoms, disjoint_seq: disjoint_seq.len() },
    )?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::realize;
    use crate::index_model::{full_tree, ArityProfile, BranchPolicy};
    use crate::term::Presentation;

    fn tr_model(seqs: &[&[u32]], branches: &[&[u32]], depth: usize, j: u32) -> IndexModel {
        let mut nodes: Vec<IndexNode> = seqs.iter().map(|s| IndexNode::from_seq(s)).collect();
        nodes.extend(branches.iter().map(|s| IndexNode::branch_from_seq(s)));
        IndexModel::new(ArityProfile::tr(depth), j, nodes).unwrap()
    }

    #[test]
    fn tr_root_only_is_free() {
        let m = tr_model(&[], &[], 1, 1);
        let p = build_tr(&m).unwrap();
        assert_eq!(p.generators().len(), 1);
        assert!(p.relations().is_empty());
    }

    #[test]
    fn tr_chain_relations() {
        let m = tr_model(&[&[0]], &[&[0, 0]], 2, 1);
        let p = build_tr(&m).unwrap();
        // x_branch below the root and below <0>.
        assert_eq!(p.relations().len(), 2);
    }

    #[test]
    fn tr_incomparable_branches_have_disjoint_relation_sets() {
        let m = tr_model(&[&[0], &[1]], &[&[0, 0], &[1, 0]], 2, 2);
        let p = build_tr(&m).unwrap();
        let b0 = IndexNode::branch_from_seq(&[0, 0]);
        let b1 = IndexNode::branch_from_seq(&[1, 0]);
        let mentions = |rel: &Term, b: &IndexNode| {
            rel.generators().iter().any(|g| matches!(g, GeneratorId::Node(n) if n == b))
        };
        for rel in p.relations() {
            assert!(mentions(rel, &b0) != mentions(rel, &b1));
        }
    }

    #[test]
    fn ptr_counts() {
        let free = full_tree(&ArityProfile::ptr(1), 2, BranchPolicy::None).unwrap();
        let p = build_ptr(&free).unwrap();
        assert!(p.relations().is_empty());
        let one_branch = full_tree(&ArityProfile::ptr(1), 2, BranchPolicy::All).unwrap();
        let p = build_ptr(&one_branch).unwrap();
        assert_eq!(p.relations().len(), 2);
        // Every referenced node is a generator (checked by construction,
        // which would have failed otherwise).
        assert!(Presentation::new(
            p.generators().to_vec(),
            p.relations().to_vec(),
            Provenance::Ptr
        )
        .is_ok());
    }

    #[test]
    fn tr_h_matches_tr_on_classic_profiles() {
        let m = tr_model(&[&[0], &[0, 0]], &[&[0, 0]], 2, 1);
        let tr = build_tr(&m).unwrap();
        let trh = build_tr_h(&m).unwrap();
        assert_eq!(tr.relations(), trh.relations());
        assert_eq!(tr.generators(), trh.generators());
    }

    #[test]
    fn tr_h_matches_ptr_semantically() {
        for (j, policy) in [(2, BranchPolicy::All), (3, BranchPolicy::All)] {
            let m = full_tree(&ArityProfile::ptr(1), j, policy).unwrap();
            let a_ptr = realize(&build_ptr(&m).unwrap()).unwrap();
            let a_trh = realize(&build_tr_h(&m).unwrap()).unwrap();
            assert_eq!(a_ptr.n_points(), a_trh.n_points());
            for node in m.nodes() {
                assert_eq!(
                    a_ptr.generator_element(&GeneratorId::Node(node.clone())).unwrap().point_indices(),
                    a_trh.generator_element(&GeneratorId::Node(node.clone())).unwrap().point_indices()
                );
            }
        }
    }

    #[test]
    fn trh3_clause_shape() {
        let profile = ArityProfile::new(vec![3]).unwrap();
        let m = full_tree(&profile, 3, BranchPolicy::All).unwrap();
        let p = build_tr_h(&m).unwrap();
        // One cover and one disjointness clause per branch and level.
        let branches = m.branches().count();
        assert_eq!(p.relations().len(), 2 * branches);
    }

    #[test]
    fn trr_binary_fan() {
        let m = tr_model(&[&[0], &[1]], &[], 1, 2);
        let p = build_trr(&m).unwrap();
        let a = realize(&p).unwrap();
        // Root equals the join of its two successors, which are disjoint.
        let root = Term::node(&IndexNode::root());
        let left = Term::node(&IndexNode::from_seq(&[0]));
        let right = Term::node(&IndexNode::from_seq(&[1]));
        assert!(a.eq(&root, &Term::join(left.clone(), right.clone())).unwrap());
        assert!(a.is_zero(&Term::meet(left, right)).unwrap());
    }

    #[test]
    fn trr_unique_successor_chain_collapses() {
        let m = tr_model(&[&[0], &[0, 0]], &[], 2, 1);
        let p = build_trr(&m).unwrap();
        let a = realize(&p).unwrap();
        let root = Term::node(&IndexNode::root());
        let leaf = Term::node(&IndexNode::from_seq(&[0, 0]));
        assert!(a.eq(&root, &leaf).unwrap());
    }

    #[test]
    fn trr_leaf_generates_no_cover_clause() {
        // Chain: descent, the unique-successor collapse pair, and the
        // root-unit pinning.
        let chain = tr_model(&[&[0]], &[], 1, 1);
        assert_eq!(build_trr(&chain).unwrap().relations().len(), 4);
        // Fan: one sibling disjointness, two descents, the two-sided
        // cover equality, the root unit; the leaves contribute no cover
        // or collapse clauses of their own.
        let fan = tr_model(&[&[0], &[1]], &[], 1, 2);
        assert_eq!(build_trr(&fan).unwrap().relations().len(), 6);
    }

    #[test]
    fn tr_h_g_examples() {
        let profile = ArityProfile::new(vec![3]).unwrap();
        let m = full_tree(&profile, 3, BranchPolicy::All).unwrap();
        // g = h: only the cover clause per level.
        let p = build_tr_h_g(&m, &[3]).unwrap();
        assert_eq!(p.relations().len(), m.branches().count());
        // g = 0: the cover clause is the empty join, forcing branches to 0.
        let p0 = build_tr_h_g(&m, &[0]).unwrap();
        let a = realize(&p0).unwrap();
        for b in m.branches() {
            assert!(a.is_zero(&Term::node(b)).unwrap());
        }
        // g above h is rejected.
        assert!(matches!(build_tr_h_g(&m, &[4]), Err(BuildError::BadParameter(_))));
    }

    #[test]
    fn tr_h_e_uses_pair_class() {
        let profile = ArityProfile::new(vec![3]).unwrap();
        let m = full_tree(&profile, 3, BranchPolicy::All).unwrap();
        let e = EquivProfile::windows(&profile);
        let p = build_tr_h_e(&m, &e).unwrap();
        assert_eq!(p.relations().len(), 2 * m.branches().count());
        // The singleton profile has no pair class.
        let e0 = EquivProfile::singletons(&profile);
        assert!(build_tr_h_e(&m, &e0).is_err());
    }

    #[test]
    fn ba_root_vanishes_and_base_survives() {
        let base = realize(&Presentation::free(1)).unwrap();
        let a0 = base.element_from_points(&[0]);
        let m = full_tree(&ArityProfile::ptr(1), 2, BranchPolicy::All).unwrap();
        let p = build_ba(&base, &[a0], &m).unwrap();
        let alg = realize(&p).unwrap();
        assert!(alg.is_zero(&Term::node(&IndexNode::root())).unwrap());
        // The base atoms partition the unit.
        let a0t = Term::Gen(GeneratorId::BaseAtom(0));
        let a1t = Term::Gen(GeneratorId::BaseAtom(1));
        assert!(alg.is_zero(&Term::meet(a0t.clone(), a1t.clone())).unwrap());
        assert!(alg.eq(&Term::join(a0t, a1t), &Term::One).unwrap());
    }

    #[test]
    fn ba_even_clause_bounds_the_branch_from_below() {
        // With a level-0 arity of two there is a single difference pair,
        // and the clause pins a0 minus that difference below the branch.
        let base = realize(&Presentation::free(1)).unwrap();
        let a0 = base.element_from_points(&[0]);
        let m = full_tree(&ArityProfile::ptr(1), 2, BranchPolicy::All).unwrap();
        let alg = realize(&build_ba(&base, &[a0], &m).unwrap()).unwrap();
        let branch = IndexNode::branch(vec![vec![0, 1]]);
        let left = Term::node(&m.res(&branch, 0, 0));
        let right = Term::node(&m.res(&branch, 0, 1));
        let a0_term = Term::Gen(GeneratorId::BaseAtom(0));
        let lower = Term::diff(a0_term, Term::diff(left, right));
        assert!(alg.leq(&lower, &Term::node(&branch)).unwrap());
    }

    #[test]
    fn ba_rejects_bad_sequences() {
        let base = realize(&Presentation::free(1)).unwrap();
        let m = tr_model(&[], &[], 2, 1);
        let zero = base.zero();
        assert!(matches!(build_ba(&base, &[zero], &m), Err(BuildError::ZeroEntry)));
        let a = base.element_from_points(&[0]);
        assert!(matches!(
            build_ba(&base, &[a.clone(), a], &m),
            Err(BuildError::NotDisjoint)
        ));
    }

    #[test]
    fn ba_branchless_is_free_product_with_base() {
        let base = realize(&Presentation::free(1)).unwrap();
        let m = tr_model(&[&[0]], &[], 1, 1);
        let p = build_ba(&base, &[], &m).unwrap();
        let alg = realize(&p).unwrap();
        // Two base points, one free node generator (the root is pinned
        // to zero): 2 * 2 = 4 points.
        assert_eq!(alg.n_points(), 4);
    }
}
