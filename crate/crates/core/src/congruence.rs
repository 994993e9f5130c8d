//! Congruences of a finite algebra and their lattice.
//!
//! A congruence is stored as a `block_of` array mapping each element to the
//! least element of its block, so equality of congruences is array equality
//! and every function of congruences is deterministic.

use std::collections::BTreeSet;

use crate::algebra::{tuples, FiniteAlgebra};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Congruence {
    block_of: Vec<usize>,
}

impl Congruence {
    /// The identity congruence Δ.
    pub fn identity(n: usize) -> Self {
        Congruence {
            block_of: (0..n).collect(),
        }
    }

    /// The full congruence ∇.
    pub fn full(n: usize) -> Self {
        Congruence {
            block_of: vec![0; n],
        }
    }

    /// Builds a partition from an arbitrary block-label array,
    /// re-canonicalizing labels to least block members.
    pub fn from_labels(labels: &[usize]) -> Self {
        let n = labels.len();
        let mut canon = vec![usize::MAX; n];
        let mut block_of = vec![0; n];
        for e in 0..n {
            let l = labels[e];
            if canon[l] == usize::MAX {
                canon[l] = e;
            }
            block_of[e] = canon[l];
        }
        Congruence { block_of }
    }

    pub fn universe_size(&self) -> usize {
        self.block_of.len()
    }

    pub fn block_of(&self, e: usize) -> usize {
        self.block_of[e]
    }

    pub fn block_array(&self) -> &[usize] {
        &self.block_of
    }

    pub fn related(&self, a: usize, b: usize) -> bool {
        self.block_of[a] == self.block_of[b]
    }

    /// Least members of blocks, in increasing order.
    pub fn representatives(&self) -> Vec<usize> {
        let mut reps: Vec<usize> = self
            .block_of
            .iter()
            .copied()
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        reps.sort_unstable();
        reps
    }

    pub fn block_count(&self) -> usize {
        self.representatives().len()
    }

    /// The block of `e` as a sorted element set.
    pub fn class_of(&self, e: usize) -> BTreeSet<usize> {
        let rep = self.block_of[e];
        (0..self.block_of.len())
            .filter(|&x| self.block_of[x] == rep)
            .collect()
    }

    pub fn blocks(&self) -> Vec<BTreeSet<usize>> {
        self.representatives()
            .into_iter()
            .map(|r| self.class_of(r))
            .collect()
    }

    /// Refinement order: `self ≤ other` iff every block of `self` is
    /// contained in a block of `other`.
    pub fn leq(&self, other: &Congruence) -> bool {
        (0..self.block_of.len()).all(|e| other.related(e, self.block_of[e]))
    }

    /// Meet of equivalence relations: intersection of the partitions.
    pub fn meet(&self, other: &Congruence) -> Congruence {
        let n = self.block_of.len();
        let mut labels = vec![0; n];
        for e in 0..n {
            // first element with the same pair of blocks
            labels[e] = (0..=e)
                .find(|&u| self.related(u, e) && other.related(u, e))
                .unwrap();
        }
        Congruence::from_labels(&labels)
    }

    /// Is the partition compatible with every operation of `alg`?
    pub fn is_compatible(&self, alg: &FiniteAlgebra) -> bool {
        let n = alg.size();
        if self.block_of.len() != n {
            return false;
        }
        // Check single-coordinate substitutions; transitivity of the
        // relation lifts this to full componentwise compatibility.
        for idx in 0..alg.signature().symbols().len() {
            let k = alg.arity(idx);
            if k == 0 {
                continue;
            }
            for args in tuples(n, k) {
                let value = alg.apply(idx, &args);
                for pos in 0..k {
                    for v in 0..n {
                        if !self.related(args[pos], v) {
                            continue;
                        }
                        let mut other = args.clone();
                        other[pos] = v;
                        if !self.related(value, alg.apply(idx, &other)) {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// Render as blocks, e.g. `{{0},{1,2}}`.
    pub fn render(&self) -> String {
        let blocks: Vec<String> = self
            .blocks()
            .into_iter()
            .map(|b| {
                let elems: Vec<String> = b.iter().map(|e| e.to_string()).collect();
                format!("{{{}}}", elems.join(","))
            })
            .collect();
        format!("{{{}}}", blocks.join(","))
    }
}

/// Disjoint-set forest used while closing partitions.
struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut a: usize) -> usize {
        while self.parent[a] != a {
            self.parent[a] = self.parent[self.parent[a]];
            a = self.parent[a];
        }
        a
    }

    /// Returns the merged pair of roots when the union did something.
    fn union(&mut self, a: usize, b: usize) -> Option<(usize, usize)> {
        let ra = self.find(a);
        let rb = self.find(b);
        if ra == rb {
            return None;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi] = lo;
        Some((lo, hi))
    }

    fn to_congruence(&mut self) -> Congruence {
        let labels: Vec<usize> = (0..self.parent.len()).map(|e| self.find(e)).collect();
        Congruence::from_labels(&labels)
    }
}

/// Least congruence relating `a` and `b`: merge, then propagate
/// single-coordinate substitutions `f(..u..) ~ f(..v..)` until stable.
pub fn principal_congruence(alg: &FiniteAlgebra, a: usize, b: usize) -> Result<Congruence> {
    let n = alg.size();
    if a >= n {
        return Err(Error::ElementOutOfRange(a, n));
    }
    if b >= n {
        return Err(Error::ElementOutOfRange(b, n));
    }
    let mut uf = UnionFind::new(n);
    let mut worklist = Vec::new();
    if let Some(pair) = uf.union(a, b) {
        worklist.push(pair);
    }
    while let Some((u, v)) = worklist.pop() {
        for idx in 0..alg.signature().symbols().len() {
            let k = alg.arity(idx);
            if k == 0 {
                continue;
            }
            for pos in 0..k {
                for params in tuples(n, k - 1) {
                    let mut args_u = Vec::with_capacity(k);
                    let mut args_v = Vec::with_capacity(k);
                    args_u.extend_from_slice(&params[..pos]);
                    args_u.push(u);
                    args_u.extend_from_slice(&params[pos..]);
                    args_v.extend_from_slice(&params[..pos]);
                    args_v.push(v);
                    args_v.extend_from_slice(&params[pos..]);
                    let fu = alg.apply(idx, &args_u);
                    let fv = alg.apply(idx, &args_v);
                    if let Some(pair) = uf.union(fu, fv) {
                        worklist.push(pair);
                    }
                }
            }
        }
    }
    Ok(uf.to_congruence())
}

/// Join in Con A: transitive closure of the union followed by a
/// compatibility closure, iterated to a fixpoint.
pub fn join(alg: &FiniteAlgebra, theta: &Congruence, phi: &Congruence) -> Congruence {
    let n = alg.size();
    let mut uf = UnionFind::new(n);
    let mut worklist = Vec::new();
    for e in 0..n {
        for rel in [theta, phi] {
            if let Some(pair) = uf.union(e, rel.block_of(e)) {
                worklist.push(pair);
            }
        }
    }
    // The union of two congruences closes to a congruence under
    // transitivity alone, but we propagate compatibility anyway: the same
    // worklist loop costs nothing when it finds no new pairs.
    while let Some((u, v)) = worklist.pop() {
        for idx in 0..alg.signature().symbols().len() {
            let k = alg.arity(idx);
            if k == 0 {
                continue;
            }
            for pos in 0..k {
                for params in tuples(n, k - 1) {
                    let mut args_u = Vec::with_capacity(k);
                    let mut args_v = Vec::with_capacity(k);
                    args_u.extend_from_slice(&params[..pos]);
                    args_u.push(u);
                    args_u.extend_from_slice(&params[pos..]);
                    args_v.extend_from_slice(&params[..pos]);
                    args_v.push(v);
                    args_v.extend_from_slice(&params[pos..]);
                    if let Some(pair) = uf.union(alg.apply(idx, &args_u), alg.apply(idx, &args_v)) {
                        worklist.push(pair);
                    }
                }
            }
        }
    }
    uf.to_congruence()
}

/// The congruence lattice of a finite algebra, materialized eagerly.
#[derive(Debug, Clone)]
pub struct CongruenceLattice {
    congruences: Vec<Congruence>,
    join_table: Vec<Vec<usize>>,
    meet_table: Vec<Vec<usize>>,
}

impl CongruenceLattice {
    pub fn len(&self) -> usize {
        self.congruences.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn get(&self, i: usize) -> &Congruence {
        &self.congruences[i]
    }

    pub fn iter(&self) -> impl Iterator<Item = &Congruence> {
        self.congruences.iter()
    }

    pub fn position(&self, theta: &Congruence) -> Option<usize> {
        self.congruences.iter().position(|c| c == theta)
    }

    pub fn join_of(&self, i: usize, j: usize) -> usize {
        self.join_table[i][j]
    }

    pub fn meet_of(&self, i: usize, j: usize) -> usize {
        self.meet_table[i][j]
    }

    pub fn bottom(&self) -> usize {
        self.congruences
            .iter()
            .position(|c| c.block_count() == c.universe_size())
            .unwrap()
    }

    pub fn top(&self) -> usize {
        self.congruences
            .iter()
            .position(|c| c.block_count() == 1)
            .unwrap()
    }

    /// Covering pairs (i, j) with `congruences[i] < congruences[j]` and
    /// nothing strictly between.
    pub fn covers(&self) -> Vec<(usize, usize)> {
        let lt = |i: usize, j: usize| i != j && self.congruences[i].leq(&self.congruences[j]);
        let mut out = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if lt(i, j) && !(0..self.len()).any(|k| lt(i, k) && lt(k, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }
}

/// All congruences: every congruence is a join of principal ones, so the
/// join-closure of the principal congruences is the whole of Con A.
pub fn all_congruences(alg: &FiniteAlgebra) -> CongruenceLattice {
    let n = alg.size();
    let mut set: BTreeSet<Congruence> = BTreeSet::new();
    set.insert(Congruence::identity(n));
    let mut principals = Vec::new();
    for a in 0..n {
        for b in a + 1..n {
            let p = principal_congruence(alg, a, b).unwrap();
            if set.insert(p.clone()) {
                principals.push(p);
            }
        }
    }
    principals.sort();
    principals.dedup();
    // close under joins with principals
    loop {
        let mut new = Vec::new();
        for c in &set {
            for p in &principals {
                let j = join(alg, c, p);
                if !set.contains(&j) {
                    new.push(j);
                }
            }
        }
        if new.is_empty() {
            break;
        }
        set.extend(new);
    }
    let congruences: Vec<Congruence> = set.into_iter().collect();
    let m = congruences.len();
    let mut join_table = vec![vec![0; m]; m];
    let mut meet_table = vec![vec![0; m]; m];
    for i in 0..m {
        for j in 0..m {
            let jo = join(alg, &congruences[i], &congruences[j]);
            let me = congruences[i].meet(&congruences[j]);
            join_table[i][j] = congruences.iter().position(|c| *c == jo).unwrap();
            meet_table[i][j] = congruences.iter().position(|c| *c == me).unwrap();
        }
    }
    CongruenceLattice {
        congruences,
        join_table,
        meet_table,
    }
}

/// The designated point's block of θ.
pub fn point_class(alg: &FiniteAlgebra, theta: &Congruence) -> BTreeSet<usize> {
    theta.class_of(alg.point())
}

/// `0/(θ∘φ)`: the point class of the relational composition,
/// `{c : ∃u, 0 θ u and u φ c}`.
pub fn compose_at_point(
    alg: &FiniteAlgebra,
    theta: &Congruence,
    phi: &Congruence,
) -> BTreeSet<usize> {
    let mut out = BTreeSet::new();
    for u in theta.class_of(alg.point()) {
        out.extend(phi.class_of(u));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn principal_on_g3_isolates_bottom() {
        let g3 = corpus::g3();
        let p = principal_congruence(&g3, 1, 2).unwrap();
        assert_eq!(p.render(), "{{0},{1,2}}");
    }

    #[test]
    fn principal_of_equal_pair_is_identity() {
        let g3 = corpus::g3();
        for e in g3.elements() {
            assert_eq!(
                principal_congruence(&g3, e, e).unwrap(),
                Congruence::identity(3)
            );
        }
        assert!(principal_congruence(&g3, 0, 7).is_err());
    }

    #[test]
    fn l3_is_simple() {
        let l3 = corpus::l3();
        let p = principal_congruence(&l3, 1, 2).unwrap();
        assert_eq!(p, Congruence::full(3));
        let lat = all_congruences(&l3);
        assert_eq!(lat.len(), 2);
    }

    #[test]
    fn g3_has_three_congruences() {
        let g3 = corpus::g3();
        let lat = all_congruences(&g3);
        let rendered: Vec<String> = lat.iter().map(|c| c.render()).collect();
        assert_eq!(lat.len(), 3);
        assert!(rendered.contains(&"{{0},{1},{2}}".to_string()));
        assert!(rendered.contains(&"{{0},{1,2}}".to_string()));
        assert!(rendered.contains(&"{{0,1,2}}".to_string()));
    }

    #[test]
    fn one_element_lattice_is_trivial() {
        let one = corpus::onepoint();
        let lat = all_congruences(&one);
        assert_eq!(lat.len(), 1);
        assert_eq!(lat.bottom(), lat.top());
    }

    #[test]
    fn compose_at_point_examples() {
        let g3 = corpus::g3();
        let theta = principal_congruence(&g3, 1, 2).unwrap();
        let delta = Congruence::identity(3);
        let nabla = Congruence::full(3);
        // point of g3 is the top element 2
        assert_eq!(
            compose_at_point(&g3, &theta, &delta),
            BTreeSet::from([1, 2])
        );
        assert_eq!(compose_at_point(&g3, &delta, &delta), BTreeSet::from([2]));
        assert_eq!(
            compose_at_point(&g3, &nabla, &delta),
            BTreeSet::from([0, 1, 2])
        );
    }

    #[test]
    fn point_class_examples() {
        let g3 = corpus::g3();
        let theta = principal_congruence(&g3, 1, 2).unwrap();
        assert_eq!(point_class(&g3, &theta), BTreeSet::from([1, 2]));
        assert_eq!(
            point_class(&g3, &Congruence::identity(3)),
            BTreeSet::from([2])
        );
        assert_eq!(
            point_class(&g3, &Congruence::full(3)),
            BTreeSet::from([0, 1, 2])
        );
    }

    #[test]
    fn quotient_of_g3_by_top_block_is_boolean() {
        let g3 = corpus::g3();
        let theta = principal_congruence(&g3, 1, 2).unwrap();
        let q = g3.quotient(&theta).unwrap();
        assert_eq!(q.algebra.size(), 2);
        assert_eq!(q.map, vec![0, 1, 1]);
        let b2 = corpus::b2();
        // same tables as b2 up to the shared signature
        for (idx, sym) in b2.signature().symbols().iter().enumerate() {
            let j = q.algebra.op_index(&sym.name).unwrap();
            assert_eq!(q.algebra.table(j), b2.table(idx), "table of {}", sym.name);
        }
    }

    #[test]
    fn quotient_by_identity_and_full() {
        let g3 = corpus::g3();
        let q = g3.quotient(&Congruence::identity(3)).unwrap();
        assert_eq!(q.algebra.size(), 3);
        for idx in 0..g3.signature().symbols().len() {
            assert_eq!(q.algebra.table(idx), g3.table(idx));
        }
        let q = g3.quotient(&Congruence::full(3)).unwrap();
        assert_eq!(q.algebra.size(), 1);
    }

    #[test]
    fn quotient_rejects_incompatible_partition() {
        let g3 = corpus::g3();
        let bad = Congruence::from_labels(&[0, 0, 2]);
        assert!(!bad.is_compatible(&g3));
        assert!(g3.quotient(&bad).is_err());
    }
}
