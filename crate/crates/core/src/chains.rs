//! Chains, antichains, compatible subfamilies, set-system search
//! (common-heart subfamilies, free subsets), quantifier-free type
//! counting on index models, and indiscernibility of element tuples.
//! All searches are exact with explicit budgets.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::algebra::{AlgebraError, CanonicalAlgebra, Element};
use crate::index_model::{raw_res, IndexModel, IndexNode, Level};

/// Exact report on a family of elements, with witnesses that re-verify
/// under direct definitional checking.
#[derive(Debug, Clone, Serialize)]
pub struct FamilyReport {
    pub family_size: usize,
    pub longest_chain: usize,
    pub chain_witness: Vec<usize>,
    pub max_antichain: usize,
    pub antichain_witness: Vec<usize>,
    pub max_compatible: usize,
    pub compatible_witness: Vec<usize>,
}

/// Longest strict chain in a family of elements, with a witness of
/// family indices in ascending order.
pub fn longest_chain(family: &[Element]) -> (usize, Vec<usize>) {
    let n = family.len();
    // Order indices by point count so that strict containment only ever
    // points forward, then take the longest path.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&i| (family[i].count(), i));
    let mut best_len = vec![1usize; n];
    let mut prev: Vec<Option<usize>> = vec![None; n];
    for (pos, &i) in order.iter().enumerate() {
        for &j in &order[..pos] {
            if family[j] != family[i] && family[j].leq(&family[i]) && best_len[j] + 1 > best_len[i]
            {
                best_len[i] = best_len[j] + 1;
                prev[i] = Some(j);
            }
        }
    }
    let Some(&end) = order.iter().max_by_key(|&&i| best_len[i]) else {
        return (0, Vec::new());
    };
    let mut chain = Vec::new();
    let mut cur = Some(end);
    while let Some(i) = cur {
        chain.push(i);
        cur = prev[i];
    }
    chain.reverse();
    (chain.len(), chain)
}

/// Longest strict chain through the whole algebra: one point at a time
/// from zero to the unit.
pub fn longest_chain_in_algebra(alg: &CanonicalAlgebra) -> usize {
    alg.n_points() + 1
}

fn is_chain(family: &[Element], witness: &[usize]) -> bool {
    witness.windows(2).all(|w| {
        family[w[0]] != family[w[1]] && family[w[0]].leq(&family[w[1]])
    })
}

/// Exact maximum clique of a symmetric compatibility relation, by
/// branch and bound over vertices.
fn max_clique(n: usize, compatible: &dyn Fn(usize, usize) -> bool) -> Vec<usize> {
    let mut best: Vec<usize> = Vec::new();
    let mut current: Vec<usize> = Vec::new();
    fn extend(
        start: usize,
        n: usize,
        compatible: &dyn Fn(usize, usize) -> bool,
        current: &mut Vec<usize>,
        best: &mut Vec<usize>,
    ) {
        if current.len() > best.len() {
            *best = current.clone();
        }
        if current.len() + (n - start) <= best.len() {
            return;
        }
        for v in start..n {
            if current.iter().all(|&u| compatible(u, v)) {
                current.push(v);
                extend(v + 1, n, compatible, current, best);
                current.pop();
            }
        }
    }
    extend(0, n, compatible, &mut current, &mut best);
    best
}

/// Exact antichain and pairwise-compatible subfamily sizes for a family
/// of non-zero elements.
pub fn knaster_subfamily(
    family: &[Element],
    budget: usize,
) -> Result<FamilyReport, AlgebraError> {
    if family.len() > budget {
        return Err(AlgebraError::Budget(format!(
            "family of {} over the budget of {}",
            family.len(),
            budget
        )));
    }
    if let Some(z) = family.iter().position(|e| e.is_empty()) {
        return Err(AlgebraError::FalsifiedProperty(format!(
            "family member {} is zero",
            z
        )));
    }
    let n = family.len();
    let disjoint = |i: usize, j: usize| family[i].disjoint(&family[j]);
    let compatible = |i: usize, j: usize| !family[i].disjoint(&family[j]);
    let antichain = max_clique(n, &disjoint);
    let clique = max_clique(n, &compatible);
    let (chain_len, chain_witness) = longest_chain(family);
    let report = FamilyReport {
        family_size: n,
        longest_chain: chain_len,
        chain_witness,
        max_antichain: antichain.len(),
        antichain_witness: antichain,
        max_compatible: clique.len(),
        compatible_witness: clique,
    };
    debug_assert!(verify_report(family, &report));
    Ok(report)
}

/// Re-check every witness in a report against the definitions.
pub fn verify_report(family: &[Element], report: &FamilyReport) -> bool {
    let anti_ok = report
        .antichain_witness
        .iter()
        .enumerate()
        .all(|(k, &i)| {
            report.antichain_witness[..k]
                .iter()
                .all(|&j| family[i].disjoint(&family[j]))
        });
    let compat_ok = report
        .compatible_witness
        .iter()
        .enumerate()
        .all(|(k, &i)| {
            report.compatible_witness[..k]
                .iter()
                .all(|&j| !family[i].disjoint(&family[j]))
        });
    anti_ok
        && compat_ok
        && is_chain(family, &report.chain_witness)
        && report.longest_chain == report.chain_witness.len()
        && report.max_antichain == report.antichain_witness.len()
        && report.max_compatible == report.compatible_witness.len()
}

/// Exact search for `r` sets sharing a common pairwise intersection
/// (the heart). Returns the chosen indices and the heart.
pub fn delta_system(
    sets: &[BTreeSet<u32>],
    r: usize,
) -> Option<(Vec<usize>, BTreeSet<u32>)> {
    assert!(r >= 2, "a common heart needs at least two sets");
    let mut chosen: Vec<usize> = Vec::new();
    fn extend(
        sets: &[BTreeSet<u32>],
        r: usize,
        start: usize,
        chosen: &mut Vec<usize>,
        heart: Option<&BTreeSet<u32>>,
    ) -> Option<(Vec<usize>, BTreeSet<u32>)> {
        if chosen.len() == r {
            return Some((chosen.clone(), heart.expect("r >= 2").clone()));
        }
        for cand in start..sets.len() {
            let new_heart: Option<BTreeSet<u32>> = match (chosen.len(), heart) {
                (0, _) => None,
                (1, _) => Some(sets[chosen[0]].intersection(&sets[cand]).copied().collect()),
                (_, Some(h)) => {
                    let ok = chosen
                        .iter()
                        .all(|&i| sets[i].intersection(&sets[cand]).copied().collect::<BTreeSet<u32>>() == *h);
                    if !ok {
                        continue;
                    }
                    Some(h.clone())
                }
                _ => unreachable!(),
            };
            chosen.push(cand);
            let found = extend(sets, r, cand + 1, chosen, new_heart.as_ref().or(heart));
            chosen.pop();
            if found.is_some() {
                return found;
            }
        }
        None
    }
    let result = extend(sets, r, 0, &mut chosen, None);
    if let Some((idx, heart)) = &result {
        debug_assert!(verify_delta_system(sets, idx, heart));
    }
    result
}

pub fn verify_delta_system(sets: &[BTreeSet<u32>], idx: &[usize], heart: &BTreeSet<u32>) -> bool {
    idx.iter().enumerate().all(|(k, &i)| {
        idx[..k].iter().all(|&j| {
            sets[i].intersection(&sets[j]).copied().collect::<BTreeSet<u32>>() == *heart
        })
    })
}

/// Exact search for a subset `S` of size `r` of the domain of `w` that
/// is free for it: no member lies in the value of another.
pub fn free_subset(w: &BTreeMap<u32, BTreeSet<u32>>, r: usize) -> Option<Vec<u32>> {
    let domain: Vec<u32> = w.keys().copied().collect();
    let mut chosen: Vec<u32> = Vec::new();
    fn extend(
        domain: &[u32],
        w: &BTreeMap<u32, BTreeSet<u32>>,
        r: usize,
        start: usize,
        chosen: &mut Vec<u32>,
    ) -> Option<Vec<u32>> {
        if chosen.len() == r {
            return Some(chosen.clone());
        }
        for pos in start..domain.len() {
            let cand = domain[pos];
            let ok = chosen.iter().all(|&other| {
                !w[&other].contains(&cand) && !w[&cand].contains(&other)
            });
            if ok {
                chosen.push(cand);
                let found = extend(domain, w, r, pos + 1, chosen);
                chosen.pop();
                if found.is_some() {
                    return found;
                }
            }
        }
        None
    }
    let result = extend(&domain, w, r, 0, &mut chosen);
    if let Some(s) = &result {
        debug_assert!(verify_free_subset(w, s));
    }
    result
}

pub fn verify_free_subset(w: &BTreeMap<u32, BTreeSet<u32>>, s: &[u32]) -> bool {
    s.iter().all(|&i| s.iter().all(|&j| i == j || !w[&i].contains(&j)))
}

/// Number of distinct quantifier-free types of ordered `m`-tuples from
/// the model over the parameter set `params`, in the relational
/// signature of the model with restriction terms folded to depth one.
pub fn qf_type_count(
    model: &IndexModel,
    params: &[IndexNode],
    m: usize,
    budget: usize,
) -> Result<usize, AlgebraError> {
    qf_type_count_over(model.nodes(), model, params, m, budget)
}

pub(crate) fn qf_type_count_over(
    universe: &[IndexNode],
    model: &IndexModel,
    params: &[IndexNode],
    m: usize,
    budget: usize,
) -> Result<usize, AlgebraError> {
    if m > budget {
        return Err(AlgebraError::Budget(format!("arity {} over the budget {}", m, budget)));
    }
    let n = universe.len();
    if m == 0 {
        return Ok(1);
    }
    if n == 0 {
        return Ok(0);
    }
    let tuple_count = n.checked_pow(m as u32).unwrap_or(usize::MAX);
    if tuple_count > 200_000 {
        return Err(AlgebraError::Budget(format!("{} tuples to classify", tuple_count)));
    }
    let mut types: BTreeSet<Vec<u8>> = BTreeSet::new();
    let mut tuple = vec![0usize; m];
    loop {
        let nodes: Vec<&IndexNode> = tuple.iter().map(|&i| &universe[i]).collect();
        types.insert(type_fingerprint(model, &nodes, params));
        // Next tuple in mixed radix; stop after wrap.
        let mut pos = 0;
        loop {
            tuple[pos] += 1;
            if tuple[pos] < n {
                break;
            }
            tuple[pos] = 0;
            pos += 1;
            if pos == m {
                return Ok(types.len());
            }
        }
    }
}

/// Fingerprint of the atomic diagram of `tuple` over `params`: all base
/// and depth-one restriction terms are listed in a fixed syntactic
/// order and every relation of the signature is evaluated on every
/// term pair.
fn type_fingerprint(model: &IndexModel, tuple: &[&IndexNode], params: &[IndexNode]) -> Vec<u8> {
    let depth = model.profile().depth();
    let mut terms: Vec<IndexNode> = Vec::new();
    let mut base: Vec<IndexNode> = tuple.iter().map(|&n| n.clone()).collect();
    base.extend(params.iter().cloned());
    base.push(IndexNode::root());
    for b in &base {
        terms.push(b.clone());
    }
    for b in &base {
        for alpha in 0..depth {
            for coord in 0..model.profile().arity(alpha) {
                terms.push(raw_res(b, alpha, coord as usize));
            }
        }
    }
    let mut bits: Vec<u8> = Vec::new();
    for t in &terms {
        for lvl in 0..=depth {
            bits.push(u8::from(model.at_level(t, Level::Finite(lvl))));
        }
        bits.push(u8::from(model.at_level(t, Level::Top)));
        bits.push(u8::from(t.is_root()));
    }
    for a in &terms {
        for b in &terms {
            bits.push(u8::from(a == b));
            bits.push(u8::from(model.initial_segment(a, b)));
            bits.push(u8::from(model.lt1(a, b)));
            for i in 0..=depth {
                bits.push(u8::from(model.eq_level(i, a, b)));
            }
            for i in 0..depth {
                for coord in 0..model.profile().arity(i) {
                    bits.push(u8::from(model.suc(i, coord as usize, a, b)));
                }
            }
        }
    }
    bits
}

/// The quantifier-free type of a tuple of elements in a finite algebra,
/// refined to the cell-size profile: the cardinality of every signed
/// intersection cell, listed in a fixed sign order.
pub fn cell_profile(elements: &[&Element]) -> Vec<usize> {
    let k = elements.len();
    assert!(k < 24, "cell profile needs a small tuple");
    (0u64..(1 << k))
        .map(|signs| {
            let mut cell: Option<Element> = None;
            for (i, e) in elements.iter().enumerate() {
                let part = if signs & (1 << i) != 0 { (*e).clone() } else { e.complement() };
                cell = Some(match cell {
                    None => part,
                    Some(c) => c.meet(&part),
                });
            }
            cell.map_or(0, |c| c.count())
        })
        .collect()
}

fn selection_profile(tuples: &[Vec<Element>], selection: &[usize]) -> Vec<usize> {
    let flat: Vec<&Element> = selection
        .iter()
        .flat_map(|&i| tuples[i].iter())
        .collect();
    cell_profile(&flat)
}

fn injective_selections(n_from: usize, n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn extend(n_from: usize, n: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == n {
            out.push(cur.clone());
            return;
        }
        for v in 0..n_from {
            if !cur.contains(&v) {
                cur.push(v);
                extend(n_from, n, cur, out);
                cur.pop();
            }
        }
    }
    extend(n_from, n, &mut cur, &mut out);
    out
}

/// A family of `m`-tuples is `n`-indiscernible when every injective
/// ordered selection of `n` member tuples realizes the same
/// quantifier-free type (here the cell-size profile of the
/// concatenated tuple).
pub fn indiscernible_check(
    tuples: &[Vec<Element>],
    n: usize,
    budget: usize,
) -> Result<bool, AlgebraError> {
    let f = tuples.len();
    if n > f {
        return Ok(true);
    }
    let m = tuples.first().map_or(0, Vec::len);
    if tuples.iter().any(|t| t.len() != m) {
        return Err(AlgebraError::FalsifiedProperty("tuples must share the arity".into()));
    }
    let selections = injective_selections(f, n);
    if selections.len() > budget {
        return Err(AlgebraError::Budget(format!(
            "{} selections over the budget {}",
            selections.len(),
            budget
        )));
    }
    let mut first: Option<Vec<usize>> = None;
    for sel in &selections {
        let profile = selection_profile(tuples, sel);
        match &first {
            None => first = Some(profile),
            Some(f0) => {
                if *f0 != profile {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// A witnessing pair of selections with distinct types, when the family
/// is not indiscernible.
pub fn indiscernible_counterexample(
    tuples: &[Vec<Element>],
    n: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let selections = injective_selections(tuples.len(), n);
    let mut seen: Option<(Vec<usize>, Vec<usize>)> = None;
    for sel in &selections {
        let profile = selection_profile(tuples, sel);
        match &seen {
            None => seen = Some((sel.clone(), profile)),
            Some((first_sel, first_profile)) => {
                if *first_profile != profile {
                    return Some((first_sel.clone(), sel.clone()));
                }
            }
        }
    }
    None
}

/// Exact maximum indiscernible subfamily, by descending-size subset
/// search.
pub fn indiscernible_extract(
    tuples: &[Vec<Element>],
    n: usize,
    budget: usize,
) -> Result<Vec<usize>, AlgebraError> {
    let f = tuples.len();
    if f > 16 {
        return Err(AlgebraError::Budget(format!("family of {} too large to sweep", f)));
    }
    let mut best: Vec<usize> = Vec::new();
    for mask in 0u32..(1 << f) {
        let subset: Vec<usize> = (0..f).filter(|&i| mask & (1 << i) != 0).collect();
        if subset.len() <= best.len() {
            continue;
        }
        let sub: Vec<Vec<Element>> = subset.iter().map(|&i| tuples[i].clone()).collect();
        if indiscernible_check(&sub, n, budget)? {
            best = subset;
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::realize;
    use crate::index_model::{full_tree, ArityProfile, BranchPolicy, IndexModel};
    use crate::term::Presentation;

    #[test]
    fn longest_chain_whole_algebra() {
        let a = realize(&Presentation::free(2)).unwrap();
        let all: Vec<Element> = a.elements().collect();
        let (len, witness) = longest_chain(&all);
        assert_eq!(len, 5);
        assert_eq!(longest_chain_in_algebra(&a), 5);
        assert!(is_chain(&all, &witness));
        // An antichain family has chains of length one.
        let atoms = a.atoms();
        assert_eq!(longest_chain(&atoms).0, 1);
        // 0 < a < 1 is a chain of three.
        let chain = vec![a.zero(), a.element_from_points(&[0]), a.one()];
        assert_eq!(longest_chain(&chain).0, 3);
    }

    #[test]
    fn knaster_reports() {
        let a = realize(&Presentation::free(2)).unwrap();
        let atoms = a.atoms();
        let report = knaster_subfamily(&atoms, 16).unwrap();
        assert_eq!(report.max_antichain, 4);
        assert_eq!(report.max_compatible, 1);
        assert!(verify_report(&atoms, &report));
        // A family all containing one point is fully compatible.
        let family: Vec<Element> = vec![
            a.element_from_points(&[0, 1]),
            a.element_from_points(&[0, 2]),
            a.element_from_points(&[0, 3]),
        ];
        let report = knaster_subfamily(&family, 16).unwrap();
        assert_eq!(report.max_compatible, 3);
        assert_eq!(report.max_antichain, 1);
        assert!(matches!(
            knaster_subfamily(&[a.zero()], 16),
            Err(AlgebraError::FalsifiedProperty(_))
        ));
        // Reports serialize with their witnesses.
        let json = serde_json::to_value(&report).unwrap();
        assert_eq!(json["compatible_witness"].as_array().unwrap().len(), 3);
    }

    #[test]
    fn delta_system_examples() {
        let set = |v: &[u32]| v.iter().copied().collect::<BTreeSet<u32>>();
        let sunflower = vec![set(&[1, 2]), set(&[1, 3]), set(&[1, 4])];
        let (idx, heart) = delta_system(&sunflower, 3).unwrap();
        assert_eq!(idx, vec![0, 1, 2]);
        assert_eq!(heart, set(&[1]));
        let disjoint = vec![set(&[1]), set(&[2]), set(&[3])];
        let (_, heart) = delta_system(&disjoint, 3).unwrap();
        assert!(heart.is_empty());
        let triangle = vec![set(&[1, 2]), set(&[2, 3]), set(&[1, 3])];
        assert!(delta_system(&triangle, 3).is_none());
    }

    #[test]
    fn delta_system_matches_exhaustive_search() {
        // Oracle: check every r-subset directly against the definition.
        fn exhaustive(sets: &[BTreeSet<u32>], r: usize) -> bool {
            fn subsets(n: usize, r: usize) -> Vec<Vec<usize>> {
                let mut out = Vec::new();
                let mut cur = Vec::new();
                fn rec(n: usize, r: usize, start: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
                    if cur.len() == r {
                        out.push(cur.clone());
                        return;
                    }
                    for i in start..n {
                        cur.push(i);
                        rec(n, r, i + 1, cur, out);
                        cur.pop();
                    }
                }
                rec(n, r, 0, &mut cur, &mut out);
                out
            }
            subsets(sets.len(), r).into_iter().any(|idx| {
                let heart: BTreeSet<u32> =
                    sets[idx[0]].intersection(&sets[idx[1]]).copied().collect();
                verify_delta_system(sets, &idx, &heart)
            })
        }
        // A small deterministic sweep over set families of up to ten
        // sets with at most four members each.
        let mut state = 0x5eed_u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            state
        };
        for _ in 0..200 {
            let n_sets = 3 + (next() % 8) as usize;
            let sets: Vec<BTreeSet<u32>> = (0..n_sets)
                .map(|_| (0..8u32).filter(|_| next() % 3 == 0).take(4).collect())
                .collect();
            for r in 2..=3usize {
                if r > sets.len() {
                    continue;
                }
                assert_eq!(delta_system(&sets, r).is_some(), exhaustive(&sets, r));
            }
        }
    }

    #[test]
    fn free_subset_examples() {
        let mut w: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        for i in 0..4 {
            w.insert(i, BTreeSet::new());
        }
        let s = free_subset(&w, 3).unwrap();
        assert_eq!(s.len(), 3);
        // Everyone excludes everyone: no pair is free.
        let mut all: BTreeMap<u32, BTreeSet<u32>> = BTreeMap::new();
        for i in 0..3u32 {
            all.insert(i, (0..3).filter(|&j| j != i).collect());
        }
        assert!(free_subset(&all, 2).is_none());
        assert!(free_subset(&all, 1).is_some());
    }

    /// Orbit count under the relational automorphisms, used as the
    /// independent oracle for type counting on rigid models.
    fn automorphism_orbits(model: &IndexModel) -> usize {
        let nodes = model.nodes();
        let n = nodes.len();
        let mut perms: Vec<Vec<usize>> = Vec::new();
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
        extend(n, &mut cur, &mut perms);
        let depth = model.profile().depth();
        let preserves = |p: &[usize]| {
            (0..n).all(|a| {
                let (na, ma) = (&nodes[a], &nodes[p[a]]);
                if na.level() != ma.level() {
                    return false;
                }
                (0..n).all(|b| {
                    let (nb, mb) = (&nodes[b], &nodes[p[b]]);
                    model.initial_segment(na, nb) == model.initial_segment(ma, mb)
                        && model.lt1(na, nb) == model.lt1(ma, mb)
                        && (0..=depth).all(|i| model.eq_level(i, na, nb) == model.eq_level(i, ma, mb))
                        && (0..depth).all(|i| {
                            (0..model.profile().arity(i) as usize)
                                .all(|c| model.suc(i, c, na, nb) == model.suc(i, c, ma, mb))
                        })
                })
            })
        };
        let autos: Vec<&Vec<usize>> = perms.iter().filter(|p| preserves(p)).collect();
        let mut orbit_of: Vec<usize> = (0..n).collect();
        for p in &autos {
            for a in 0..n {
                let r = orbit_of[a].min(orbit_of[p[a]]);
                orbit_of[a] = r;
                orbit_of[p[a]] = r;
            }
        }
        orbit_of.iter().collect::<std::collections::BTreeSet<_>>().len()
    }

    #[test]
    fn qf_type_counts() {
        // Chain model: every node its own type over the empty set, so
        // the count matches the automorphism orbits (all singletons).
        let m = IndexModel::new(
            ArityProfile::tr(1),
            1,
            vec![IndexNode::from_seq(&[0]), IndexNode::branch_from_seq(&[0])],
        );
        // <0> and branch <0> share the value sequence but remain
        // distinct nodes at different levels.
        let m = m.unwrap();
        assert_eq!(qf_type_count(&m, &[], 1, 3).unwrap(), 3);
        assert_eq!(automorphism_orbits(&m), 3);
        // Parameters name everything: each tuple is its own type.
        let full = full_tree(&ArityProfile::tr(1), 2, BranchPolicy::None).unwrap();
        let params: Vec<IndexNode> = full.nodes().to_vec();
        assert_eq!(qf_type_count(&full, &params, 2, 3).unwrap(), full.len() * full.len());
        // Empty universe has no tuples.
        assert_eq!(qf_type_count_over(&[], &full, &[], 1, 3).unwrap(), 0);
        // Tips are interchangeable over the empty parameter set.
        assert_eq!(qf_type_count(&full, &[], 1, 3).unwrap(), 2);
    }

    #[test]
    fn indiscernibility_examples() {
        let a = realize(&Presentation::free(2)).unwrap();
        // Constant family.
        let e = a.element_from_points(&[0, 1]);
        let fam = vec![vec![e.clone()], vec![e.clone()], vec![e]];
        assert!(indiscernible_check(&fam, 2, 10_000).unwrap());
        // Distinct free generators.
        let gens: Vec<Vec<Element>> = a
            .presentation()
            .generators()
            .iter()
            .map(|g| vec![a.generator_element(g).unwrap()])
            .collect();
        for n in 1..=2 {
            assert!(indiscernible_check(&gens, n, 10_000).unwrap());
        }
        // An atom and its complement differ in cell sizes.
        let atom = a.element_from_points(&[0]);
        let fam = vec![vec![atom.clone()], vec![atom.complement()]];
        assert!(!indiscernible_check(&fam, 2, 10_000).unwrap());
        let (s1, s2) = indiscernible_counterexample(&fam, 2).unwrap();
        assert_ne!(selection_profile(&fam, &s1), selection_profile(&fam, &s2));
        // Permuting a family does not change the verdict.
        let fam_rev: Vec<Vec<Element>> = fam.iter().rev().cloned().collect();
        assert_eq!(
            indiscernible_check(&fam, 2, 10_000).unwrap(),
            indiscernible_check(&fam_rev, 2, 10_000).unwrap()
        );
        // Extraction drops one of the two.
        let best = indiscernible_extract(&fam, 2, 10_000).unwrap();
        assert_eq!(best.len(), 1);
    }
}
