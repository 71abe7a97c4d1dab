//! Tree-shaped index models: finite trees whose level-`i` entries are
//! strictly increasing `h(i)`-tuples over an initial segment of the
//! naturals, with full-depth nodes optionally flagged as branches.
//!
//! A model carries the relational views (initial segment, level
//! predicates, sibling order, prefix equivalence, successor relations)
//! and the coordinate-restriction functions that the presentation
//! builders consume.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum IndexModelError {
    #[error("profile must have depth >= 1 and every arity >= 1")]
    InvalidProfile,
    #[error("node is not legal for this profile/universe: {0}")]
    InvalidNode(String),
    #[error("universe size {j_size} too small to form an increasing {arity}-tuple")]
    UniverseTooSmall { j_size: u32, arity: u32 },
    #[error("root node missing from model")]
    MissingRoot,
    #[error("model is not closed under coordinate restriction: {0} requires {1}")]
    NotClosed(String, String),
    #[error("profile mismatch between models")]
    ProfileMismatch,
    #[error("node does not belong to the model: {0}")]
    UnknownNode(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("equivalence profile is malformed: {0}")]
    MalformedEquiv(String),
}

/// Tuple arities per level. Depth `D` is the number of levels; a branch
/// node has a tuple at every level, a finite node of length `n <= D` has
/// tuples at levels `0..n-1` and a bare value (tip) at level `n-1`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ArityProfile {
    arities: Vec<u32>,
}

impl ArityProfile {
    pub fn new(arities: Vec<u32>) -> Result<Self, IndexModelError> {
        if arities.is_empty() || arities.contains(&0) {
            return Err(IndexModelError::InvalidProfile);
        }
        Ok(ArityProfile { arities })
    }

    pub fn uniform(depth: usize, arity: u32) -> Result<Self, IndexModelError> {
        Self::new(vec![arity; depth])
    }

    /// The classic single-successor tree shape (`h` constantly 1).
    pub fn tr(depth: usize) -> Self {
        Self::uniform(depth, 1).expect("depth >= 1")
    }

    /// The pair-tree shape (`h` constantly 2).
    pub fn ptr(depth: usize) -> Self {
        Self::uniform(depth, 2).expect("depth >= 1")
    }

    pub fn depth(&self) -> usize {
        self.arities.len()
    }

    pub fn arity(&self, level: usize) -> u32 {
        self.arities[level]
    }

    pub fn arities(&self) -> &[u32] {
        &self.arities
    }

    pub fn max_arity(&self) -> u32 {
        *self.arities.iter().max().expect("nonempty")
    }

    /// Arity-1 tuples are identified with tips, so nodes embed into the
    /// classical tree of plain sequences.
    pub fn is_classic_tr(&self) -> bool {
        self.arities.iter().all(|&a| a == 1)
    }

    pub fn is_ptr(&self) -> bool {
        self.arities.iter().all(|&a| a == 2)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum NodeKind {
    Finite,
    Branch,
}

/// Level of a node: finite nodes sit at their length, branches at the
/// top (omega) level.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Level {
    Finite(usize),
    Top,
}

/// A single node: `tuples` at the lower levels and, for a finite
/// non-root node, a bare `tip` at the last level. A branch has a tuple
/// at every level of the profile and no tip.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct IndexNode {
    tuples: Vec<Vec<u32>>,
    tip: Option<u32>,
}

impl IndexNode {
    pub fn root() -> Self {
        IndexNode { tuples: Vec::new(), tip: None }
    }

    pub fn finite(tuples: Vec<Vec<u32>>, tip: u32) -> Self {
        IndexNode { tuples, tip: Some(tip) }
    }

    pub fn branch(tuples: Vec<Vec<u32>>) -> Self {
        IndexNode { tuples, tip: None }
    }

    /// Finite node over a classic (arity-1) profile, given as its plain
    /// sequence of values.
    pub fn from_seq(seq: &[u32]) -> Self {
        match seq.split_last() {
            None => IndexNode::root(),
            Some((&tip, init)) => {
                IndexNode::finite(init.iter().map(|&v| vec![v]).collect(), tip)
            }
        }
    }

    /// Branch node over a classic profile from its plain sequence.
    pub fn branch_from_seq(seq: &[u32]) -> Self {
        IndexNode::branch(seq.iter().map(|&v| vec![v]).collect())
    }

    pub fn kind(&self) -> NodeKind {
        if self.tip.is_none() && !self.tuples.is_empty() {
            NodeKind::Branch
        } else {
            NodeKind::Finite
        }
    }

    pub fn is_root(&self) -> bool {
        self.tuples.is_empty() && self.tip.is_none()
    }

    pub fn is_branch(&self) -> bool {
        self.kind() == NodeKind::Branch
    }

    /// Number of levels that carry an entry (tuples plus tip).
    pub fn entry_len(&self) -> usize {
        self.tuples.len() + usize::from(self.tip.is_some())
    }

    /// Sequence length for finite nodes; branches live above every
    /// finite level.
    pub fn level(&self) -> Level {
        match self.kind() {
            NodeKind::Branch => Level::Top,
            NodeKind::Finite => Level::Finite(self.entry_len()),
        }
    }

    pub fn tuples(&self) -> &[Vec<u32>] {
        &self.tuples
    }

    pub fn tip(&self) -> Option<u32> {
        self.tip
    }

    /// Entry at `level` as a slice of coordinates (a tip is a 1-slice).
    pub fn entry(&self, level: usize) -> Option<&[u32]> {
        if level < self.tuples.len() {
            Some(&self.tuples[level])
        } else if level == self.tuples.len() {
            self.tip.as_ref().map(std::slice::from_ref)
        } else {
            None
        }
    }

    /// Plain value sequence under the arity-1 identification; tuples are
    /// unwrapped coordinate-wise, so for classic profiles this is the
    /// node as an ordinal sequence.
    pub fn seq(&self) -> Vec<u32> {
        let mut out: Vec<u32> = Vec::with_capacity(self.entry_len());
        for t in &self.tuples {
            out.extend_from_slice(t);
        }
        if let Some(t) = self.tip {
            out.push(t);
        }
        out
    }

    fn legal_for(&self, profile: &ArityProfile, j_size: u32) -> Result<(), IndexModelError> {
        let d = profile.depth();
        let bad = |msg: &str| Err(IndexModelError::InvalidNode(format!("{}: {}", self, msg)));
        match self.kind() {
            NodeKind::Branch => {
                if self.tuples.len() != d {
                    return bad("branch must carry a tuple at every level");
                }
            }
            NodeKind::Finite => {
                if self.tip.is_some() && self.tuples.len() + 1 > d {
                    return bad("finite node longer than the profile depth");
                }
            }
        }
        for (i, t) in self.tuples.iter().enumerate() {
            if t.len() != profile.arity(i) as usize {
                return bad(&format!("level {} entry has wrong arity", i));
            }
            if !t.windows(2).all(|w| w[0] < w[1]) {
                return bad(&format!("level {} tuple is not strictly increasing", i));
            }
            if t.iter().any(|&v| v >= j_size) {
                return bad(&format!("level {} coordinate outside the universe", i));
            }
        }
        if let Some(t) = self.tip {
            if t >= j_size {
                return bad("tip outside the universe");
            }
        }
        Ok(())
    }
}

impl fmt::Display for IndexNode {
    /// Inline text form: levels joined by `/`, coordinates by `,`, a
    /// trailing `/*` marks a branch, and the root prints as `.`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_root() {
            return write!(f, ".");
        }
        let mut parts: Vec<String> = self
            .tuples
            .iter()
            .map(|t| t.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        match self.tip {
            Some(t) => parts.push(t.to_string()),
            None => parts.push("*".to_string()),
        }
        write!(f, "{}", parts.join("/"))
    }
}

/// Parse the inline node text form (see `Display`).
pub fn parse_node(text: &str) -> Result<IndexNode, IndexModelError> {
    let text = text.trim();
    let err = |msg: &str| IndexModelError::Parse { line: 0, msg: format!("{:?}: {}", text, msg) };
    if text == "." || text.is_empty() {
        return Ok(IndexNode::root());
    }
    let parts: Vec<&str> = text.split('/').collect();
    let (tuple_parts, tip) = match parts.last() {
        Some(&"*") => (&parts[..parts.len() - 1], None),
        Some(last) if !last.contains(',') => {
            let t: u32 = last.trim().parse().map_err(|_| err("bad tip"))?;
            (&parts[..parts.len() - 1], Some(t))
        }
        _ => return Err(err("last level must be a tip or `*`")),
    };
    let mut tuples = Vec::new();
    for p in tuple_parts {
        let coords: Result<Vec<u32>, _> = p.split(',').map(|c| c.trim().parse::<u32>()).collect();
        tuples.push(coords.map_err(|_| err("bad coordinate"))?);
    }
    Ok(match tip {
        Some(t) => IndexNode::finite(tuples, t),
        None => {
            if tuples.is_empty() {
                IndexNode::root()
            } else {
                IndexNode::branch(tuples)
            }
        }
    })
}

/// Which full-depth branch nodes a constructed tree should include.
#[derive(Debug, Clone)]
pub enum BranchPolicy {
    All,
    None,
    Explicit(Vec<IndexNode>),
}

/// A finite, restriction-closed set of nodes over a common profile and
/// universe `{0, .., j_size-1}`. Immutable after construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IndexModel {
    profile: ArityProfile,
    j_size: u32,
    nodes: Vec<IndexNode>,
}

impl IndexModel {
    pub fn new(
        profile: ArityProfile,
        j_size: u32,
        nodes: impl IntoIterator<Item = IndexNode>,
    ) -> Result<Self, IndexModelError> {
        if j_size == 0 {
            return Err(IndexModelError::UniverseTooSmall { j_size, arity: 1 });
        }
        let mut set: BTreeSet<IndexNode> = nodes.into_iter().collect();
        set.insert(IndexNode::root());
        let model = IndexModel { profile, j_size, nodes: set.into_iter().collect() };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<(), IndexModelError> {
        for n in &self.nodes {
            n.legal_for(&self.profile, self.j_size)?;
        }
        if !self.contains(&IndexNode::root()) {
            return Err(IndexModelError::MissingRoot);
        }
        // Closure: every tuple level of every node must restrict into the
        // model. For classic profiles membership is read through the
        // arity-1 identification, which makes the requirement exactly
        // "the value-sequence set is closed under initial segments".
        for n in &self.nodes {
            for (i, t) in n.tuples.iter().enumerate() {
                for m in 0..t.len() {
                    let img = raw_res(n, i, m);
                    if !self.contains_identified(&img) {
                        return Err(IndexModelError::NotClosed(n.to_string(), img.to_string()));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn profile(&self) -> &ArityProfile {
        &self.profile
    }

    pub fn j_size(&self) -> u32 {
        self.j_size
    }

    pub fn nodes(&self) -> &[IndexNode] {
        &self.nodes
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn branches(&self) -> impl Iterator<Item = &IndexNode> {
        self.nodes.iter().filter(|n| n.is_branch())
    }

    pub fn contains(&self, node: &IndexNode) -> bool {
        self.nodes.binary_search(node).is_ok()
    }

    /// Membership modulo the classic-profile identification: for arity-1
    /// profiles a node counts as present when some member carries the
    /// same value sequence.
    fn contains_identified(&self, node: &IndexNode) -> bool {
        if self.contains(node) {
            return true;
        }
        if self.profile.is_classic_tr() {
            let seq = node.seq();
            return self.nodes.iter().any(|m| m.seq() == seq);
        }
        false
    }

    /// Initial-segment relation. Over classic profiles nodes compare
    /// through their value sequences, and a finite node precedes any
    /// branch extending its sequence (sequence equality included, since
    /// the branch stands for an unbounded continuation). Over wider
    /// profiles the comparison is literal: a non-root finite node ends
    /// in a tip while any proper extension carries a tuple there, so
    /// only the root and the node itself qualify.
    pub fn initial_segment(&self, a: &IndexNode, b: &IndexNode) -> bool {
        if self.profile.is_classic_tr() {
            let (sa, sb) = (a.seq(), b.seq());
            return match (a.kind(), b.kind()) {
                (NodeKind::Finite, NodeKind::Finite) | (NodeKind::Finite, NodeKind::Branch) => {
                    sb.starts_with(&sa)
                }
                (NodeKind::Branch, NodeKind::Branch) => a == b,
                (NodeKind::Branch, NodeKind::Finite) => false,
            };
        }
        a.is_root() || a == b
    }

    /// Strict initial segment.
    pub fn proper_initial_segment(&self, a: &IndexNode, b: &IndexNode) -> bool {
        a != b && self.initial_segment(a, b)
    }

    /// Level membership: finite nodes at their length, branches at the
    /// top level.
    pub fn at_level(&self, node: &IndexNode, level: Level) -> bool {
        node.level() == level
    }

    /// Sibling order: equal-length finite nodes with a common proper
    /// prefix, ordered by their last entry values.
    pub fn lt1(&self, a: &IndexNode, b: &IndexNode) -> bool {
        if a.kind() != NodeKind::Finite || b.kind() != NodeKind::Finite {
            return false;
        }
        let n = a.entry_len();
        if n == 0 || n != b.entry_len() {
            return false;
        }
        if !self.eq_level(n - 1, a, b) {
            return false;
        }
        match (a.tip, b.tip) {
            (Some(x), Some(y)) => x < y,
            _ => false,
        }
    }

    /// Prefix equivalence: the first `i` entries agree (for classic
    /// profiles, the first `i` sequence values agree).
    pub fn eq_level(&self, i: usize, a: &IndexNode, b: &IndexNode) -> bool {
        if a.entry_len() < i || b.entry_len() < i {
            return false;
        }
        if self.profile.is_classic_tr() {
            let (sa, sb) = (a.seq(), b.seq());
            return sa[..i] == sb[..i];
        }
        (0..i).all(|k| a.entry(k) == b.entry(k))
    }

    /// Successor relation at level `i`, coordinate `m`: `a` is the
    /// length-`i+1` node matching `b`'s prefix whose tip is the `m`-th
    /// coordinate of `b`'s level-`i` tuple.
    pub fn suc(&self, i: usize, m: usize, a: &IndexNode, b: &IndexNode) -> bool {
        if a.level() != Level::Finite(i + 1) {
            return false;
        }
        let Some(tip) = a.tip else { return false };
        // b must carry a genuine tuple at level i.
        let tuple_at_i = match b.kind() {
            NodeKind::Branch => i < b.entry_len(),
            NodeKind::Finite => i + 1 < b.entry_len(),
        };
        let Some(entry_b) = b.entry(i) else { return false };
        if !tuple_at_i || m >= entry_b.len() {
            return false;
        }
        self.eq_level(i, a, b) && tip == entry_b[m]
    }

    /// Left/right successor views for pair profiles.
    pub fn suc_left(&self, a: &IndexNode, b: &IndexNode) -> bool {
        (0..self.profile.depth()).any(|i| self.suc(i, 0, a, b))
    }

    pub fn suc_right(&self, a: &IndexNode, b: &IndexNode) -> bool {
        (0..self.profile.depth()).any(|i| self.suc(i, 1, a, b))
    }

    /// Coordinate restriction: replace the level-`alpha` tuple by its
    /// `m`-th coordinate as a tip. Total: nodes shorter than `alpha`
    /// come back unchanged, an out-of-range coordinate or a tip at
    /// `alpha` falls back to coordinate 0. Over classic profiles the
    /// result is resolved to the member of the model carrying the same
    /// value sequence, if the literal node is absent.
    pub fn res(&self, node: &IndexNode, alpha: usize, m: usize) -> IndexNode {
        let img = raw_res(node, alpha, m);
        if self.contains(&img) || !self.profile.is_classic_tr() {
            return img;
        }
        let seq = img.seq();
        for cand in &self.nodes {
            if cand.seq() == seq {
                return cand.clone();
            }
        }
        img
    }

    /// All restriction images of a node (every level, every coordinate).
    pub fn res_images(&self, node: &IndexNode) -> Vec<IndexNode> {
        let mut out = Vec::new();
        for (i, t) in node.tuples.iter().enumerate() {
            for m in 0..t.len() {
                out.push(self.res(node, i, m));
            }
        }
        out
    }
}

/// Restriction computed on the node alone, without model resolution.
pub(crate) fn raw_res(node: &IndexNode, alpha: usize, m: usize) -> IndexNode {
    if node.entry_len() <= alpha {
        return node.clone();
    }
    if alpha < node.tuples.len() {
        let t = &node.tuples[alpha];
        let coord = if m < t.len() { t[m] } else { t[0] };
        return IndexNode::finite(node.tuples[..alpha].to_vec(), coord);
    }
    // Tip at `alpha`: the fallback reproduces the node.
    node.clone()
}

/// The tree of all legal finite nodes to the profile depth, together
/// with the branches selected by the policy.
pub fn full_tree(
    profile: &ArityProfile,
    j_size: u32,
    branch_policy: BranchPolicy,
) -> Result<IndexModel, IndexModelError> {
    if j_size < profile.max_arity() {
        return Err(IndexModelError::UniverseTooSmall { j_size, arity: profile.max_arity() });
    }
    let d = profile.depth();
    // Tuple stacks per length: all sequences of tuples for levels 0..k.
    let mut stacks: Vec<Vec<Vec<Vec<u32>>>> = vec![vec![Vec::new()]];
    for lvl in 0..d {
        let tuples = increasing_tuples(j_size, profile.arity(lvl));
        let prev = stacks.last().expect("nonempty").clone();
        let mut next = Vec::new();
        for stack in prev {
            for t in &tuples {
                let mut s = stack.clone();
                s.push(t.clone());
                next.push(s);
            }
        }
        stacks.push(next);
    }
    let mut nodes: Vec<IndexNode> = vec![IndexNode::root()];
    for len in 1..=d {
        for stack in &stacks[len - 1] {
            for tip in 0..j_size {
                nodes.push(IndexNode::finite(stack.clone(), tip));
            }
        }
    }
    match branch_policy {
        BranchPolicy::All => {
            for stack in &stacks[d] {
                nodes.push(IndexNode::branch(stack.clone()));
            }
        }
        BranchPolicy::None => {}
        BranchPolicy::Explicit(list) => nodes.extend(list),
    }
    IndexModel::new(profile.clone(), j_size, nodes)
}

/// All strictly increasing `arity`-tuples over `{0, .., j_size-1}`.
pub fn increasing_tuples(j_size: u32, arity: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, start: u32, j: u32, left: u32) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for v in start..j {
            cur.push(v);
            rec(out, cur, v + 1, j, left - 1);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, 0, j_size, arity);
    out
}

/// Sum of an ordered family of models over common profile: the disjoint
/// union glued at the root, each summand's level-0 coordinates shifted
/// by `shift_base * label`. `shift_base` is one past the largest label
/// or level-0 coordinate in sight.
pub fn sum(
    profile: &ArityProfile,
    family: &[(u32, &IndexModel)],
) -> Result<IndexModel, IndexModelError> {
    for (_, m) in family {
        if m.profile() != profile {
            return Err(IndexModelError::ProfileMismatch);
        }
    }
    let mut sup: u32 = 0;
    for (label, m) in family {
        sup = sup.max(*label);
        for n in m.nodes() {
            if let Some(e) = n.entry(0) {
                for &c in e {
                    sup = sup.max(c);
                }
            }
        }
    }
    let shift_base = sup + 1;
    let mut nodes = vec![IndexNode::root()];
    let mut max_coord: u32 = 0;
    for (label, m) in family {
        let off = shift_base * label;
        for n in m.nodes() {
            if n.is_root() {
                continue;
            }
            let mut tuples = n.tuples.clone();
            let mut tip = n.tip;
            if !tuples.is_empty() {
                for c in &mut tuples[0] {
                    *c += off;
                }
            } else if let Some(t) = tip.as_mut() {
                *t += off;
            }
            let shifted = IndexNode { tuples, tip };
            for i in 0..shifted.entry_len() {
                if let Some(e) = shifted.entry(i) {
                    for &c in e {
                        max_coord = max_coord.max(c);
                    }
                }
            }
            nodes.push(shifted);
        }
    }
    let j_size = (max_coord + 1).max(1);
    IndexModel::new(profile.clone(), j_size, nodes)
}

/// Order-compress every coordinate so that label-shifted models compare
/// structurally: the used coordinates are renumbered 0..m preserving
/// order, levels untouched otherwise.
pub fn canonical_form(model: &IndexModel) -> IndexModel {
    let mut used: BTreeSet<u32> = BTreeSet::new();
    for n in model.nodes() {
        for i in 0..n.entry_len() {
            if let Some(e) = n.entry(i) {
                used.extend(e.iter().copied());
            }
        }
    }
    let map: std::collections::BTreeMap<u32, u32> =
        used.iter().enumerate().map(|(i, &v)| (v, i as u32)).collect();
    let remap = |v: u32| map[&v];
    let nodes: Vec<IndexNode> = model
        .nodes()
        .iter()
        .map(|n| IndexNode {
            tuples: n.tuples.iter().map(|t| t.iter().map(|&v| remap(v)).collect()).collect(),
            tip: n.tip.map(remap),
        })
        .collect();
    let j_size = (map.len() as u32).max(1);
    IndexModel::new(model.profile().clone(), j_size, nodes).expect("relabelling preserves closure")
}

/// Model text format: a header `h=<comma list>; J=<int>; D=<int>`, then
/// one non-root node per line (the root is implicit).
pub fn format_model(model: &IndexModel) -> String {
    let header = format!(
        "h={}; J={}; D={}",
        model
            .profile()
            .arities()
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(","),
        model.j_size(),
        model.profile().depth()
    );
    let mut lines = vec![header];
    for n in model.nodes() {
        if !n.is_root() {
            lines.push(n.to_string());
        }
    }
    lines.join("\n")
}

pub fn parse_model(text: &str) -> Result<IndexModel, IndexModelError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or(IndexModelError::Parse { line: 1, msg: "empty input".into() })?;
    let mut arities: Option<Vec<u32>> = None;
    let mut j_size: Option<u32> = None;
    let mut depth: Option<usize> = None;
    for part in header.split(';') {
        let part = part.trim();
        if let Some(rest) = part.strip_prefix("h=") {
            let a: Result<Vec<u32>, _> = rest.split(',').map(|s| s.trim().parse()).collect();
            arities = Some(a.map_err(|_| IndexModelError::Parse {
                line: 1,
                msg: "bad arity list".into(),
            })?);
        } else if let Some(rest) = part.strip_prefix("J=") {
            j_size = Some(rest.trim().parse().map_err(|_| IndexModelError::Parse {
                line: 1,
                msg: "bad universe size".into(),
            })?);
        } else if let Some(rest) = part.strip_prefix("D=") {
            depth = Some(rest.trim().parse().map_err(|_| IndexModelError::Parse {
                line: 1,
                msg: "bad depth".into(),
            })?);
        }
    }
    let (arities, j_size) = match (arities, j_size) {
        (Some(a), Some(j)) => (a, j),
        _ => {
            return Err(IndexModelError::Parse { line: 1, msg: "header must set h= and J=".into() })
        }
    };
    if let Some(d) = depth {
        if d != arities.len() {
            return Err(IndexModelError::Parse {
                line: 1,
                msg: "D= disagrees with the arity list length".into(),
            });
        }
    }
    let profile = ArityProfile::new(arities).map_err(|_| IndexModelError::Parse {
        line: 1,
        msg: "invalid profile".into(),
    })?;
    let mut nodes = vec![IndexNode::root()];
    for (idx, line) in lines {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let node = parse_node(line).map_err(|e| IndexModelError::Parse {
            line: idx + 1,
            msg: e.to_string(),
        })?;
        nodes.push(node);
    }
    IndexModel::new(profile, j_size, nodes)
}

/// Per-level equivalence classes of coordinate subsets. Subsets not
/// listed form singleton classes; within a class all members have the
/// same cardinality.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivProfile {
    classes: Vec<Vec<Vec<Vec<u32>>>>,
}

impl EquivProfile {
    pub fn new(classes: Vec<Vec<Vec<Vec<u32>>>>, profile: &ArityProfile) -> Result<Self, IndexModelError> {
        if classes.len() != profile.depth() {
            return Err(IndexModelError::MalformedEquiv("one level of classes per profile level".into()));
        }
        for (lvl, level_classes) in classes.iter().enumerate() {
            let h = profile.arity(lvl);
            let mut seen: BTreeSet<Vec<u32>> = BTreeSet::new();
            for class in level_classes {
                let mut size: Option<usize> = None;
                for member in class {
                    if member.iter().any(|&c| c >= h) {
                        return Err(IndexModelError::MalformedEquiv(format!(
                            "level {} member uses a coordinate >= {}",
                            lvl, h
                        )));
                    }
                    if !member.windows(2).all(|w| w[0] < w[1]) {
                        return Err(IndexModelError::MalformedEquiv("members must be sorted sets".into()));
                    }
                    if !seen.insert(member.clone()) {
                        return Err(IndexModelError::MalformedEquiv("classes must be disjoint".into()));
                    }
                    match size {
                        None => size = Some(member.len()),
                        Some(s) if s != member.len() => {
                            return Err(IndexModelError::MalformedEquiv(
                                "equivalent subsets must have equal cardinality".into(),
                            ))
                        }
                        _ => {}
                    }
                }
            }
        }
        Ok(EquivProfile { classes })
    }

    /// All singletons equivalent at every level.
    pub fn singletons(profile: &ArityProfile) -> Self {
        let classes = profile
            .arities()
            .iter()
            .map(|&h| vec![(0..h).map(|c| vec![c]).collect::<Vec<_>>()])
            .collect();
        EquivProfile::new(classes, profile).expect("well formed")
    }

    /// The two length-(h-1) windows `{0..h-2}` and `{1..h-1}`.
    pub fn windows(profile: &ArityProfile) -> Self {
        let classes = profile
            .arities()
            .iter()
            .map(|&h| {
                if h < 2 {
                    vec![]
                } else {
                    vec![vec![(0..h - 1).collect::<Vec<u32>>(), (1..h).collect::<Vec<u32>>()]]
                }
            })
            .collect();
        EquivProfile::new(classes, profile).expect("well formed")
    }

    /// The lower and upper halves `{0..floor(h/2)-1}` and
    /// `{floor(h/2)..2*floor(h/2)-1}`.
    pub fn halves(profile: &ArityProfile) -> Self {
        let classes = profile
            .arities()
            .iter()
            .map(|&h| {
                let half = h / 2;
                if half == 0 {
                    vec![]
                } else {
                    vec![vec![
                        (0..half).collect::<Vec<u32>>(),
                        (half..2 * half).collect::<Vec<u32>>(),
                    ]]
                }
            })
            .collect();
        EquivProfile::new(classes, profile).expect("well formed")
    }

    pub fn equivalent(&self, level: usize, u1: &[u32], u2: &[u32]) -> bool {
        if u1 == u2 {
            return true;
        }
        self.classes[level]
            .iter()
            .any(|class| class.iter().any(|m| m == u1) && class.iter().any(|m| m == u2))
    }

    /// The unique two-member class at `level`, when the level's relation
    /// consists of exactly one such class whose members are not both
    /// singletons.
    pub fn pair_class(&self, level: usize) -> Result<(&[u32], &[u32]), IndexModelError> {
        let nontrivial: Vec<&Vec<Vec<u32>>> =
            self.classes[level].iter().filter(|c| c.len() > 1).collect();
        match nontrivial.as_slice() {
            [class] if class.len() == 2 => {
                let (u1, u2) = (&class[0], &class[1]);
                if u1.len() <= 1 && u2.len() <= 1 {
                    return Err(IndexModelError::MalformedEquiv(format!(
                        "level {} pair members must not both be singletons",
                        level
                    )));
                }
                Ok((u1, u2))
            }
            _ => Err(IndexModelError::MalformedEquiv(format!(
                "level {} must carry exactly one two-member class",
                level
            ))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tr_model(seqs: &[&[u32]], branch_seqs: &[&[u32]], depth: usize, j: u32) -> IndexModel {
        let mut nodes: Vec<IndexNode> = seqs.iter().map(|s| IndexNode::from_seq(s)).collect();
        nodes.extend(branch_seqs.iter().map(|s| IndexNode::branch_from_seq(s)));
        IndexModel::new(ArityProfile::tr(depth), j, nodes).expect("valid model")
    }

    #[test]
    fn res_replaces_tuple_by_coordinate() {
        // h(0)=3 profile; node <(0,2,5); tip 1>.
        let profile = ArityProfile::new(vec![3, 1]).unwrap();
        let eta = IndexNode::finite(vec![vec![0, 2, 5]], 1);
        let model = IndexModel::new(
            profile,
            6,
            vec![
                eta.clone(),
                IndexNode::finite(vec![], 0),
                IndexNode::finite(vec![], 2),
                IndexNode::finite(vec![], 5),
            ],
        )
        .unwrap();
        assert_eq!(model.res(&eta, 0, 1), IndexNode::finite(vec![], 2));
        // Past the node length the restriction is the identity.
        assert_eq!(model.res(&eta, 7, 0), eta);
        // Out-of-range coordinate falls back to coordinate 0.
        assert_eq!(model.res(&eta, 0, 9), IndexNode::finite(vec![], 0));
    }

    #[test]
    fn res_on_branch_membership() {
        let model = full_tree(&ArityProfile::ptr(2), 4, BranchPolicy::All).unwrap();
        let branch = IndexNode::branch(vec![vec![0, 1], vec![2, 3]]);
        assert!(model.contains(&branch));
        let img = model.res(&branch, 1, 0);
        assert_eq!(img, IndexNode::finite(vec![vec![0, 1]], 2));
        assert!(model.contains(&img));
    }

    #[test]
    fn closure_is_validated() {
        // A lone ptr branch without its restriction images is rejected.
        let profile = ArityProfile::ptr(1);
        let branch = IndexNode::branch(vec![vec![0, 1]]);
        let err = IndexModel::new(profile.clone(), 2, vec![branch.clone()]);
        assert!(matches!(err, Err(IndexModelError::NotClosed(..))));
        let ok = IndexModel::new(
            profile,
            2,
            vec![branch, IndexNode::finite(vec![], 0), IndexNode::finite(vec![], 1)],
        );
        assert!(ok.is_ok());
    }

    #[test]
    fn classic_identification_closure() {
        // {root, <0>, branch <0,0>}: the level-1 restriction of the
        // branch resolves to the branch itself through the value
        // sequence, so the three-node model is closed.
        let m = tr_model(&[&[0]], &[&[0, 0]], 2, 1);
        assert_eq!(m.len(), 3);
        let b = IndexNode::branch_from_seq(&[0, 0]);
        assert_eq!(m.res(&b, 0, 0), IndexNode::from_seq(&[0]));
        assert_eq!(m.res(&b, 1, 0), b);
        // Without <0> the model is not closed.
        let bad = IndexModel::new(
            ArityProfile::tr(2),
            1,
            vec![IndexNode::branch_from_seq(&[0, 0])],
        );
        assert!(matches!(bad, Err(IndexModelError::NotClosed(..))));
    }

    #[test]
    fn initial_segment_examples() {
        let m = tr_model(&[&[0]], &[&[0, 0]], 2, 1);
        let root = IndexNode::root();
        for n in m.nodes() {
            assert!(m.initial_segment(&root, n));
        }
        // Pair profiles compare entries literally: a tip is not a tuple.
        let ptr = full_tree(&ArityProfile::ptr(2), 2, BranchPolicy::All).unwrap();
        let eta = IndexNode::finite(vec![], 0);
        let nu = IndexNode::branch(vec![vec![0, 1], vec![0, 1]]);
        assert!(!ptr.initial_segment(&eta, &nu));
        assert!(ptr.suc(0, 0, &eta, &nu));
        assert!(!ptr.suc(0, 1, &eta, &nu));
    }

    #[test]
    fn lt1_orders_tips() {
        let m = tr_model(&[&[0], &[1]], &[], 1, 2);
        let a = IndexNode::from_seq(&[0]);
        let b = IndexNode::from_seq(&[1]);
        assert!(m.lt1(&a, &b));
        assert!(!m.lt1(&b, &a));
        assert!(!m.lt1(&a, &a));
    }

    #[test]
    fn full_tree_small_cases() {
        let t = full_tree(&ArityProfile::tr(1), 2, BranchPolicy::All).unwrap();
        assert_eq!(t.len(), 5);
        let err = full_tree(&ArityProfile::ptr(1), 1, BranchPolicy::All);
        assert!(matches!(err, Err(IndexModelError::UniverseTooSmall { .. })));
        let no_branches = full_tree(&ArityProfile::ptr(1), 2, BranchPolicy::None).unwrap();
        assert_eq!(no_branches.len(), 3);
    }

    #[test]
    fn sum_counts_and_degenerate_cases() {
        let profile = ArityProfile::tr(1);
        let base = full_tree(&profile, 2, BranchPolicy::None).unwrap();
        // Single summand with label 0 is a relabelled copy.
        let single = sum(&profile, &[(0, &base)]).unwrap();
        assert_eq!(single.len(), base.len());
        assert_eq!(canonical_form(&single), canonical_form(&base));
        // Two copies: disjoint except the root.
        let two = sum(&profile, &[(0, &base), (1, &base)]).unwrap();
        assert_eq!(two.len(), 1 + 2 * (base.len() - 1));
        // Empty family: just the root.
        let empty = sum(&profile, &[]).unwrap();
        assert_eq!(empty.len(), 1);
    }

    #[test]
    fn sum_associates_up_to_relabelling() {
        let profile = ArityProfile::tr(1);
        let a = full_tree(&profile, 1, BranchPolicy::None).unwrap();
        let b = full_tree(&profile, 2, BranchPolicy::None).unwrap();
        let c = full_tree(&profile, 2, BranchPolicy::All).unwrap();
        let left = sum(&profile, &[(0, &sum(&profile, &[(0, &a), (1, &b)]).unwrap()), (1, &c)]).unwrap();
        let flat = sum(&profile, &[(0, &a), (1, &b), (2, &c)]).unwrap();
        assert_eq!(canonical_form(&left), canonical_form(&flat));
    }

    #[test]
    fn text_roundtrip() {
        let m = full_tree(&ArityProfile::new(vec![2, 2]).unwrap(), 3, BranchPolicy::All).unwrap();
        let text = format_model(&m);
        let back = parse_model(&text).unwrap();
        assert_eq!(m, back);
        let node = parse_node("0,2/1").unwrap();
        assert_eq!(node, IndexNode::finite(vec![vec![0, 2]], 1));
        let branch = parse_node("0,1/2,3/*").unwrap();
        assert_eq!(branch, IndexNode::branch(vec![vec![0, 1], vec![2, 3]]));
    }

    #[test]
    fn equiv_profiles() {
        let profile = ArityProfile::new(vec![3]).unwrap();
        let e0 = EquivProfile::singletons(&profile);
        assert!(e0.equivalent(0, &[0], &[2]));
        assert!(!e0.equivalent(0, &[0], &[0, 1]));
        let e1 = EquivProfile::windows(&profile);
        let (u1, u2) = e1.pair_class(0).unwrap();
        assert_eq!(u1, &[0, 1]);
        assert_eq!(u2, &[1, 2]);
        // On a pair profile the windows collapse to singletons and the
        // pair class is rejected.
        let p2 = ArityProfile::ptr(1);
        let e1p = EquivProfile::windows(&p2);
        assert!(e1p.pair_class(0).is_err());
        let p4 = ArityProfile::new(vec![4]).unwrap();
        let e2 = EquivProfile::halves(&p4);
        let (u1, u2) = e2.pair_class(0).unwrap();
        assert_eq!(u1, &[0, 1]);
        assert_eq!(u2, &[2, 3]);
    }
}
