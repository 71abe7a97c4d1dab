//! Closed-form zero tests for meets of signed node generators,
//! evaluated directly on the index model without any search.

use crate::algebra::AlgebraError;
use crate::index_model::{IndexModel, IndexNode};

fn check_membership(model: &IndexModel, nodes: &[IndexNode]) -> Result<(), AlgebraError> {
    for n in nodes {
        if !model.contains(n) {
            return Err(AlgebraError::UnknownNode(n.to_string()));
        }
    }
    Ok(())
}

/// Zero test for the branch-collapse presentation: the meet of the
/// positive generators with the complements of the negative ones is
/// zero exactly when some negative node is a proper initial segment of
/// a positive branch, or some positive equals some negative.
pub fn closed_form_zero_tr(
    model: &IndexModel,
    positives: &[IndexNode],
    negatives: &[IndexNode],
) -> Result<bool, AlgebraError> {
    if !model.profile().is_classic_tr() {
        return Err(AlgebraError::WrongShape("classic arity-1 profile required".into()));
    }
    check_membership(model, positives)?;
    check_membership(model, negatives)?;
    for nu in negatives {
        for eta in positives {
            if nu == eta {
                return Ok(true);
            }
            if eta.is_branch() && model.proper_initial_segment(nu, eta) {
                return Ok(true);
            }
        }
    }
    Ok(false)
}

/// Zero test for the pair-tree presentation. The meet is zero exactly
/// when one of the following holds:
///  (a) some positive finite node is the right restriction of a
///      positive branch,
///  (b) some negative node is the left restriction of a positive
///      branch,
///  (c) two positive branches share a length-`j` prefix and the right
///      coordinate of one's level-`j` pair equals the left coordinate
///      of the other's, or
///  (d) a positive equals a negative.
pub fn closed_form_zero_ptr(
    model: &IndexModel,
    positives: &[IndexNode],
    negatives: &[IndexNode],
) -> Result<bool, AlgebraError> {
    if !model.profile().is_ptr() {
        return Err(AlgebraError::WrongShape("constant arity-2 profile required".into()));
    }
    check_membership(model, positives)?;
    check_membership(model, negatives)?;
    let depth = model.profile().depth();
    let pos_branches: Vec<&IndexNode> = positives.iter().filter(|n| n.is_branch()).collect();

    // (d)
    for eta in positives {
        if negatives.contains(eta) {
            return Ok(true);
        }
    }
    // (a) and (b)
    for branch in &pos_branches {
        for level in 0..depth {
            let left = model.res(branch, level, 0);
            let right = model.res(branch, level, 1);
            if positives.contains(&right) {
                return Ok(true);
            }
            if negatives.contains(&left) {
                return Ok(true);
            }
        }
    }
    // (c)
    for b1 in &pos_branches {
        for b2 in &pos_branches {
            for level in 0..depth {
                if !model.eq_level(level, b1, b2) {
                    continue;
                }
                let (Some(e1), Some(e2)) = (b1.entry(level), b2.entry(level)) else { continue };
                if e1[1] == e2[0] {
                    return Ok(true);
                }
            }
        }
    }
    Ok(false)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::index_model::{full_tree, ArityProfile, BranchPolicy, IndexModel};

    fn chain() -> IndexModel {
        IndexModel::new(
            ArityProfile::tr(2),
            1,
            vec![IndexNode::from_seq(&[0]), IndexNode::branch_from_seq(&[0, 0])],
        )
        .unwrap()
    }

    #[test]
    fn tr_criterion_examples() {
        let m = chain();
        let b = IndexNode::branch_from_seq(&[0, 0]);
        let n0 = IndexNode::from_seq(&[0]);
        assert!(closed_form_zero_tr(&m, &[b.clone()], &[n0.clone()]).unwrap());
        assert!(!closed_form_zero_tr(&m, &[b.clone(), n0.clone()], &[]).unwrap());
        assert!(closed_form_zero_tr(&m, &[n0.clone()], &[n0.clone()]).unwrap());
        // Negative below a positive finite node is fine.
        assert!(!closed_form_zero_tr(&m, &[n0], &[IndexNode::root()]).unwrap());
    }

    #[test]
    fn tr_criterion_rejects_foreign_nodes() {
        let m = chain();
        let stranger = IndexNode::from_seq(&[0, 0]);
        assert!(matches!(
            closed_form_zero_tr(&m, &[stranger], &[]),
            Err(AlgebraError::UnknownNode(_))
        ));
        let ptr_model = full_tree(&ArityProfile::ptr(1), 2, BranchPolicy::None).unwrap();
        assert!(matches!(
            closed_form_zero_tr(&ptr_model, &[], &[]),
            Err(AlgebraError::WrongShape(_))
        ));
    }

    #[test]
    fn ptr_criterion_examples() {
        let m = full_tree(&ArityProfile::ptr(1), 3, BranchPolicy::All).unwrap();
        let b01 = IndexNode::branch(vec![vec![0, 1]]);
        let b12 = IndexNode::branch(vec![vec![1, 2]]);
        let t0 = IndexNode::finite(vec![], 0);
        let t1 = IndexNode::finite(vec![], 1);
        // (d): shared positive and negative.
        assert!(closed_form_zero_ptr(&m, &[b01.clone()], &[b01.clone()]).unwrap());
        // (a): right restriction of a positive branch is positive.
        assert!(closed_form_zero_ptr(&m, &[b01.clone(), t1.clone()], &[]).unwrap());
        // (b): left restriction of a positive branch is negative.
        assert!(closed_form_zero_ptr(&m, &[b01.clone()], &[t0]).unwrap());
        // (c): <0,1> and <1,2> overlap coordinate-wise at level 0.
        assert!(closed_form_zero_ptr(&m, &[b01.clone(), b12.clone()], &[]).unwrap());
        assert!(closed_form_zero_ptr(&m, &[b12, b01], &[]).unwrap());
        // Disjoint-prefix branches with no negatives are compatible.
        let m2 = full_tree(&ArityProfile::ptr(1), 4, BranchPolicy::All).unwrap();
        let a = IndexNode::branch(vec![vec![0, 1]]);
        let b = IndexNode::branch(vec![vec![2, 3]]);
        assert!(!closed_form_zero_ptr(&m2, &[a, b], &[]).unwrap());
        // Lone tip positives never vanish.
        assert!(!closed_form_zero_ptr(&m, &[t1], &[]).unwrap());
    }
}
