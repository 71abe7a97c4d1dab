//! A family of almost-disjoint perfect subtrees of the binary tree,
//! built stage by stage. Each stage first extends every maximal node
//! along a fixed no-split band, then gives each child tree its own
//! window slot: an identifying level forced to one and a free splitting
//! level recorded in the tree's marker set. Band and identifying levels
//! go to the shared marker set, so distinct trees meet either at a
//! common splitting marker or at a shared level, and the verification
//! report checks exactly that.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TreeFamilyError {
    #[error("depth {0} over the supported bound {1}")]
    DepthBudget(usize, usize),
    #[error("unknown tree {0:?} at level {1}")]
    UnknownTree(String, usize),
}

pub const MAX_DEPTH: usize = 6;

type Bits = Vec<u8>;

fn bits_to_string(b: &[u8]) -> String {
    b.iter().map(|&x| if x == 0 { '0' } else { '1' }).collect()
}

/// All binary strings of length `n` in lexicographic order.
fn strings(n: usize) -> Vec<Bits> {
    let mut out = vec![Vec::new()];
    for _ in 0..n {
        let mut next = Vec::with_capacity(out.len() * 2);
        for s in out {
            let mut a = s.clone();
            a.push(0);
            next.push(a);
            let mut b = s;
            b.push(1);
            next.push(b);
        }
        out = next;
    }
    out
}

/// The family data: level thresholds `k`, the shared level set, and one
/// marker set and tree per binary string at every built stage.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PerfectTreeFamily {
    depth: usize,
    k: Vec<usize>,
    k1: Vec<usize>,
    w_star: BTreeSet<usize>,
    w: BTreeMap<(usize, Bits), BTreeSet<usize>>,
    u: BTreeMap<(usize, Bits), BTreeSet<Bits>>,
}

impl PerfectTreeFamily {
    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn k(&self) -> &[usize] {
        &self.k
    }

    pub fn k1(&self) -> &[usize] {
        &self.k1
    }

    /// Shared level set at the built depth.
    pub fn w_star(&self) -> &BTreeSet<usize> {
        &self.w_star
    }

    /// Shared level set as of stage `m`.
    pub fn w_star_at(&self, m: usize) -> BTreeSet<usize> {
        self.w_star.iter().copied().filter(|&l| l < self.k[m]).collect()
    }

    pub fn markers(&self, eta: &[u8]) -> Option<&BTreeSet<usize>> {
        self.w.get(&(eta.len(), eta.to_vec()))
    }

    pub fn tree(&self, eta: &[u8]) -> Option<&BTreeSet<Bits>> {
        self.u.get(&(eta.len(), eta.to_vec()))
    }

    /// Maximal paths of the tree of `eta`, cut at `horizon`.
    pub fn branches(&self, eta: &[u8], horizon: usize) -> Result<Vec<Bits>, TreeFamilyError> {
        let tree = self
            .tree(eta)
            .ok_or_else(|| TreeFamilyError::UnknownTree(bits_to_string(eta), eta.len()))?;
        let cut = horizon.min(self.k[eta.len()]);
        Ok(tree.iter().filter(|s| s.len() == cut).cloned().collect())
    }

    pub fn to_json(&self) -> serde_json::Value {
        let trees: Vec<serde_json::Value> = self
            .u
            .iter()
            .map(|((_, eta), tree)| {
                let w = &self.w[&(eta.len(), eta.clone())];
                serde_json::json!({
                    "eta": bits_to_string(eta),
                    "w": w.iter().collect::<Vec<_>>(),
                    "u": tree.iter().map(|s| bits_to_string(s)).collect::<Vec<_>>(),
                })
            })
            .collect();
        serde_json::json!({
            "depth": self.depth,
            "k": self.k,
            "k1": self.k1,
            "w_star": self.w_star.iter().collect::<Vec<_>>(),
            "trees": trees,
        })
    }
}

/// Run the staged construction to the requested depth.
pub fn build_family(depth: usize) -> Result<PerfectTreeFamily, TreeFamilyError> {
    if depth > MAX_DEPTH {
        return Err(TreeFamilyError::DepthBudget(depth, MAX_DEPTH));
    }
    let mut fam = PerfectTreeFamily {
        depth: 0,
        k: vec![0],
        k1: Vec::new(),
        w_star: BTreeSet::new(),
        w: BTreeMap::new(),
        u: BTreeMap::new(),
    };
    fam.w.insert((0, Vec::new()), BTreeSet::new());
    let mut root_tree = BTreeSet::new();
    root_tree.insert(Vec::new());
    fam.u.insert((0, Vec::new()), root_tree);

    for n in 0..depth {
        let kn = fam.k[n];
        let k1n = kn + n + 1;
        fam.k1.push(k1n);
        // No-split band: extend every maximal node by the tree's own
        // bits plus a padding zero.
        let mut u1: BTreeMap<Bits, BTreeSet<Bits>> = BTreeMap::new();
        for eta in strings(n) {
            let tree = &fam.u[&(n, eta.clone())];
            let mut extended = tree.clone();
            let mut band = eta.clone();
            band.push(0);
            for node in tree.iter().filter(|s| s.len() == kn) {
                for l in 1..=band.len() {
                    let mut s = node.clone();
                    s.extend_from_slice(&band[..l]);
                    extended.insert(s);
                }
            }
            u1.insert(eta, extended);
        }
        fam.w_star.extend(kn..k1n);
        let children = strings(n + 1);
        let width = 1usize << (n + 2);
        let kn1 = k1n + width;
        fam.k.push(kn1);
        // Shared identifying levels: one even slot per child tree.
        for slot in 0..children.len() {
            fam.w_star.insert(k1n + 2 * slot);
        }
        for (slot, child) in children.iter().enumerate() {
            let parent: Bits = child[..n].to_vec();
            let ident = k1n + 2 * slot;
            let marker = k1n + 2 * slot + 1;
            let base = &u1[&parent];
            let mut tree = base.clone();
            // Window content: zero everywhere except one at the
            // identifying level and free at the marker.
            let mut frontier: Vec<Bits> =
                base.iter().filter(|s| s.len() == k1n).cloned().collect();
            for pos in k1n..kn1 {
                let mut next = Vec::new();
                for s in &frontier {
                    let choices: &[u8] = if pos == ident {
                        &[1]
                    } else if pos == marker {
                        &[0, 1]
                    } else {
                        &[0]
                    };
                    for &c in choices {
                        let mut t = s.clone();
                        t.push(c);
                        tree.insert(t.clone());
                        next.push(t);
                    }
                }
                frontier = next;
            }
            let mut w = fam.w[&(n, parent)].clone();
            w.insert(marker);
            fam.w.insert((n + 1, child.clone()), w);
            fam.u.insert((n + 1, child.clone()), tree);
        }
        fam.depth = n + 1;
    }
    Ok(fam)
}

/// Which clause of the cross-tree meet analysis a divergence falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MeetCase {
    SharedMarker,
    SharedLevel,
    Comparable,
}

#[derive(Debug, Serialize)]
pub struct PropertyResult {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Debug, Serialize)]
pub struct FamilyVerdict {
    pub properties: Vec<PropertyResult>,
    pub meet_case_counts: BTreeMap<String, usize>,
    /// Per marker window of each final tree: whether a split occurs.
    pub window_split_stats: Vec<(String, usize, bool)>,
}

impl FamilyVerdict {
    pub fn all_pass(&self) -> bool {
        self.properties.iter().all(|p| p.pass)
    }
}

/// Check the finitized family properties on the built depth.
pub fn verify_family(fam: &PerfectTreeFamily) -> FamilyVerdict {
    let mut properties = Vec::new();
    let mut push = |name: &str, pass: bool, detail: String| {
        properties.push(PropertyResult { name: name.to_string(), pass, detail });
    };
    let d = fam.depth;
    let finals = strings(d);

    // (A) marker sets are non-empty past the root stage and grow with
    // the stage; the shared set grows as well.
    {
        let mut pass = true;
        let mut detail = String::new();
        for m in 1..=d {
            for eta in strings(m) {
                let w = &fam.w[&(m, eta.clone())];
                let parent = &fam.w[&(m - 1, eta[..m - 1].to_vec())];
                if w.is_empty() || !w.is_superset(parent) || w.len() <= parent.len() {
                    pass = false;
                    detail = format!("marker growth fails at {}", bits_to_string(&eta));
                }
            }
            if fam.w_star_at(m).len() <= fam.w_star_at(m - 1).len() {
                pass = false;
                detail = format!("shared set fails to grow at stage {}", m);
            }
        }
        push("marker-growth", pass, detail);
    }

    // (B) trees are perfect within the horizon: downward closed, rooted,
    // and every node either extends to a split or lies beyond the last
    // marker.
    let mut window_split_stats = Vec::new();
    {
        let mut pass = true;
        let mut detail = String::new();
        for eta in &finals {
            let tree = &fam.u[&(d, eta.clone())];
            let w = &fam.w[&(d, eta.clone())];
            if !tree.contains(&Vec::new()) {
                pass = false;
                detail = format!("tree {} misses the root", bits_to_string(eta));
            }
            for s in tree.iter() {
                if !s.is_empty() && !tree.contains(&s[..s.len() - 1].to_vec()) {
                    pass = false;
                    detail = format!("tree {} is not downward closed", bits_to_string(eta));
                }
            }
            let splits: BTreeSet<usize> = tree
                .iter()
                .filter(|s| {
                    let mut a = (*s).clone();
                    a.push(0);
                    let mut b = (*s).clone();
                    b.push(1);
                    tree.contains(&a) && tree.contains(&b)
                })
                .map(Vec::len)
                .collect();
            let last_marker = w.iter().next_back().copied().unwrap_or(0);
            for s in tree.iter() {
                let has_split_above = splits.iter().any(|&l| l >= s.len());
                if !has_split_above && s.len() <= last_marker {
                    pass = false;
                    detail = format!(
                        "node of length {} in {} has no split above",
                        s.len(),
                        bits_to_string(eta)
                    );
                }
            }
            for (i, &m) in w.iter().enumerate() {
                let lo = if i == 0 { 0 } else { *w.iter().nth(i - 1).expect("in range") };
                let in_window = splits.iter().any(|&l| l > lo && l <= m);
                window_split_stats.push((bits_to_string(eta), m, in_window));
            }
        }
        push("perfect-within-horizon", pass, detail);
    }

    // (C) splits happen at marker levels.
    {
        let mut pass = true;
        let mut detail = String::new();
        for eta in &finals {
            let tree = &fam.u[&(d, eta.clone())];
            let w = &fam.w[&(d, eta.clone())];
            for s in tree.iter() {
                let mut a = s.clone();
                a.push(0);
                let mut b = s.clone();
                b.push(1);
                if tree.contains(&a) && tree.contains(&b) && !w.contains(&s.len()) {
                    pass = false;
                    detail = format!(
                        "split at level {} of {} outside the markers",
                        s.len(),
                        bits_to_string(eta)
                    );
                }
            }
        }
        push("splits-at-markers", pass, detail);
    }

    // (D) cross-tree divergences land in a case; count the cases with
    // comparability taking precedence.
    let mut meet_case_counts: BTreeMap<String, usize> = BTreeMap::new();
    {
        let mut pass = true;
        let mut detail = String::new();
        for (i, e1) in finals.iter().enumerate() {
            for e2 in finals.iter().skip(i + 1) {
                let (t1, t2) = (&fam.u[&(d, e1.clone())], &fam.u[&(d, e2.clone())]);
                let (w1, w2) = (&fam.w[&(d, e1.clone())], &fam.w[&(d, e2.clone())]);
                // Comparable pairs are the common nodes themselves.
                if t1.intersection(t2).next().is_some() {
                    *meet_case_counts.entry("comparable".into()).or_insert(0) += 1;
                }
                for node in t1.intersection(t2) {
                    let l = node.len();
                    let diverges = (0..=1u8).any(|a| {
                        (0..=1u8).any(|b| {
                            if a == b {
                                return false;
                            }
                            let mut x = node.clone();
                            x.push(a);
                            let mut y = node.clone();
                            y.push(b);
                            t1.contains(&x) && t2.contains(&y)
                        })
                    });
                    if !diverges {
                        continue;
                    }
                    let case = if w1.contains(&l) && w2.contains(&l) {
                        Some(MeetCase::SharedMarker)
                    } else if fam.w_star.contains(&l)
                        && (0..l).all(|j| w1.contains(&j) == w2.contains(&j))
                    {
                        Some(MeetCase::SharedLevel)
                    } else {
                        None
                    };
                    match case {
                        Some(MeetCase::SharedMarker) => {
                            *meet_case_counts.entry("shared-marker".into()).or_insert(0) += 1;
                        }
                        Some(MeetCase::SharedLevel) => {
                            *meet_case_counts.entry("shared-level".into()).or_insert(0) += 1;
                        }
                        _ => {
                            pass = false;
                            detail = format!(
                                "divergence at level {} between {} and {} fits no case",
                                l,
                                bits_to_string(e1),
                                bits_to_string(e2)
                            );
                        }
                    }
                }
            }
        }
        push("meets-classified", pass, detail);
    }

    // (E) marker sets avoid the shared set.
    {
        let mut pass = true;
        let mut detail = String::new();
        for m in 0..=d {
            for eta in strings(m) {
                let w = &fam.w[&(m, eta.clone())];
                if w.intersection(&fam.w_star).next().is_some() {
                    pass = false;
                    detail = format!("markers of {} meet the shared set", bits_to_string(&eta));
                }
            }
        }
        push("markers-disjoint-from-shared", pass, detail);
    }

    // (F) pairwise marker sets share an initial segment; above it the
    // trees separate below the next marker and below it they agree.
    {
        let mut pass = true;
        let mut detail = String::new();
        for (i, e1) in finals.iter().enumerate() {
            for e2 in finals.iter().skip(i + 1) {
                let (w1, w2) = (&fam.w[&(d, e1.clone())], &fam.w[&(d, e2.clone())]);
                let common: BTreeSet<usize> = w1.intersection(w2).copied().collect();
                let seg1: Vec<usize> = w1.iter().copied().take(common.len()).collect();
                let seg2: Vec<usize> = w2.iter().copied().take(common.len()).collect();
                let common_vec: Vec<usize> = common.iter().copied().collect();
                if seg1 != common_vec || seg2 != common_vec {
                    pass = false;
                    detail = format!(
                        "common markers of {} and {} are not an initial segment",
                        bits_to_string(e1),
                        bits_to_string(e2)
                    );
                }
                let (t1, t2) = (&fam.u[&(d, e1.clone())], &fam.u[&(d, e2.clone())]);
                let inter: BTreeSet<Bits> = t1.intersection(t2).cloned().collect();
                let sup_common = common.iter().next_back().copied();
                for &l in &fam.w_star {
                    let above = sup_common.is_none_or(|s| l > s);
                    if above {
                        // Separation: the intersection stays below any
                        // further marker and splits no more.
                        for &lp in w1.union(w2) {
                            if lp > l && inter.iter().any(|s| s.len() >= lp) {
                                pass = false;
                                detail = format!(
                                    "intersection of {} and {} reaches past level {}",
                                    bits_to_string(e1),
                                    bits_to_string(e2),
                                    lp
                                );
                            }
                        }
                        let split_high = inter.iter().any(|s| {
                            if s.len() < l {
                                return false;
                            }
                            let mut a = s.clone();
                            a.push(0);
                            let mut b = s.clone();
                            b.push(1);
                            inter.contains(&a) && inter.contains(&b)
                        });
                        if split_high {
                            pass = false;
                            detail = format!(
                                "intersection of {} and {} splits at or above {}",
                                bits_to_string(e1),
                                bits_to_string(e2),
                                l
                            );
                        }
                    } else if sup_common.is_some_and(|s| l < s) {
                        // Agreement below the common markers.
                        let cut1: BTreeSet<&Bits> = t1.iter().filter(|s| s.len() <= l).collect();
                        let cut2: BTreeSet<&Bits> = t2.iter().filter(|s| s.len() <= l).collect();
                        if cut1 != cut2 {
                            pass = false;
                            detail = format!(
                                "trees {} and {} disagree below shared level {}",
                                bits_to_string(e1),
                                bits_to_string(e2),
                                l
                            );
                        }
                    }
                }
            }
        }
        push("pairwise-coherence", pass, detail);
    }

    FamilyVerdict { properties, meet_case_counts, window_split_stats }
}

/// Restriction of a family to a smaller depth, for the monotone
/// consistency check.
pub fn restrict_family(fam: &PerfectTreeFamily, depth: usize) -> PerfectTreeFamily {
    assert!(depth <= fam.depth);
    PerfectTreeFamily {
        depth,
        k: fam.k[..=depth].to_vec(),
        k1: fam.k1[..depth].to_vec(),
        w_star: fam.w_star_at(depth),
        w: fam
            .w
            .iter()
            .filter(|((m, _), _)| *m <= depth)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect(),
        u: fam
            .u
            .iter()
            .filter(|((m, _), _)| *m <= depth)
            .map(|(k, v)| (k.clone(), v.clone()))
            .collect(),
    }
}
