//! Term enumeration with behavioral deduplication.
//!
//! Terms are enumerated by depth, then symbol order, then argument order.
//! Two terms inducing the same function on every generator algebra are
//! represented once, by the first one found; since the first occurrence of
//! a behavior has minimal depth, the level sets stay prefix-closed.

use std::collections::HashMap;
use std::hash::{BuildHasherDefault, Hasher};

use crate::algebra::{tuple_index, tuples, FiniteAlgebra};
use crate::error::{Error, Result};
use crate::term::{Term, Var};

/// Multiplicative hash for already-mixed u64 fingerprint keys.
#[derive(Default)]
struct FingerprintHasher(u64);

impl Hasher for FingerprintHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for &b in bytes {
            self.0 = (self.0 ^ b as u64).wrapping_mul(0x100000001b3);
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.0 = x.wrapping_mul(0x9e3779b97f4a7c15);
    }
}

type PackedMap = HashMap<u64, usize, BuildHasherDefault<FingerprintHasher>>;

/// Where an assignment block for one generator sits in a fingerprint.
#[derive(Debug, Clone)]
struct Layout {
    offset: usize,
    /// One assignment tuple (over the variable list) per fingerprint slot.
    assignments: Vec<Vec<usize>>,
    size: usize,
}

impl Layout {
    fn points(&self) -> usize {
        self.assignments.len()
    }
}

#[derive(Debug, Clone)]
enum Build {
    Var(usize),
    Const(usize),
    App(usize, Vec<usize>),
}

#[derive(Debug, Clone)]
struct Entry {
    fingerprint: Vec<u8>,
    depth: usize,
    build: Build,
}

enum Seen {
    Packed(PackedMap),
    Raw(HashMap<Vec<u8>, usize>),
}

/// Behaviorally-deduplicated terms over a fixed variable list, evaluated on
/// every generator of a variety at once.
pub struct BehaviorSpace<'a> {
    generators: &'a [FiniteAlgebra],
    vars: Vec<Var>,
    layouts: Vec<Layout>,
    entries: Vec<Entry>,
    seen: Seen,
    depth: usize,
    max_base: Option<u64>,
}

impl<'a> BehaviorSpace<'a> {
    /// Behaviors over all assignments of `vars` into each generator.
    pub fn new(generators: &'a [FiniteAlgebra], vars: &[Var]) -> Result<Self> {
        let assignments: Vec<Vec<Vec<usize>>> = generators
            .iter()
            .map(|g| tuples(g.size(), vars.len()).collect())
            .collect();
        Self::with_assignments(generators, vars, assignments)
    }

    /// Behaviors distinguished only on the given assignment tuples. Used by
    /// witness searches that constrain a term on a slice of its domain.
    pub fn with_assignments(
        generators: &'a [FiniteAlgebra],
        vars: &[Var],
        assignments: Vec<Vec<Vec<usize>>>,
    ) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyVariety);
        }
        let sig = generators[0].signature();
        if generators.iter().any(|g| g.signature() != sig) {
            return Err(Error::SignatureMismatch);
        }
        if generators.iter().any(|g| g.size() > u8::MAX as usize) {
            return Err(Error::Precondition(
                "enumeration supports universes up to 255 elements".into(),
            ));
        }
        let mut layouts = Vec::new();
        let mut offset = 0usize;
        for (g, tuples) in generators.iter().zip(assignments) {
            let points = tuples.len();
            layouts.push(Layout {
                offset,
                assignments: tuples,
                size: g.size(),
            });
            offset += points;
        }
        // fingerprints pack into a u64 when the mixed-radix value fits
        let mut max_base: Option<u64> = Some(1);
        for l in &layouts {
            for _ in 0..l.points() {
                max_base = max_base.and_then(|m| m.checked_mul(l.size as u64));
            }
        }
        let seen = if max_base.is_some() {
            Seen::Packed(PackedMap::default())
        } else {
            Seen::Raw(HashMap::new())
        };
        let mut space = BehaviorSpace {
            generators,
            vars: vars.to_vec(),
            layouts,
            entries: Vec::new(),
            seen,
            depth: 0,
            max_base,
        };
        space.seed();
        Ok(space)
    }

    fn total_points(&self) -> usize {
        self.layouts.iter().map(|l| l.points()).sum()
    }

    fn pack(&self, fp: &[u8]) -> u64 {
        let mut acc: u64 = 0;
        let mut i = 0;
        for l in &self.layouts {
            for _ in 0..l.points() {
                acc = acc * l.size as u64 + fp[i] as u64;
                i += 1;
            }
        }
        acc
    }

    fn insert(&mut self, fingerprint: Vec<u8>, depth: usize, build: Build) -> bool {
        let idx = self.entries.len();
        let key = if self.max_base.is_some() {
            Some(self.pack(&fingerprint))
        } else {
            None
        };
        let fresh = match (&mut self.seen, key) {
            (Seen::Packed(map), Some(key)) => {
                if map.contains_key(&key) {
                    false
                } else {
                    map.insert(key, idx);
                    true
                }
            }
            (Seen::Raw(map), _) => {
                if map.contains_key(&fingerprint) {
                    false
                } else {
                    map.insert(fingerprint.clone(), idx);
                    true
                }
            }
            _ => unreachable!(),
        };
        if fresh {
            self.entries.push(Entry {
                fingerprint,
                depth,
                build,
            });
        }
        fresh
    }

    fn seed(&mut self) {
        // depth 0: variables in declared order, then constants in
        // signature order
        for vi in 0..self.vars.len() {
            let mut fp = Vec::with_capacity(self.total_points());
            for l in &self.layouts {
                for tuple in &l.assignments {
                    fp.push(tuple[vi] as u8);
                }
            }
            self.insert(fp, 0, Build::Var(vi));
        }
        let sig = self.generators[0].signature().clone();
        for (si, sym) in sig.symbols().iter().enumerate() {
            if sym.arity != 0 {
                continue;
            }
            let mut fp = Vec::with_capacity(self.total_points());
            for (gi, l) in self.layouts.iter().enumerate() {
                let c = self.generators[gi].table(si)[0] as u8;
                fp.extend(std::iter::repeat(c).take(l.points()));
            }
            self.insert(fp, 0, Build::Const(si));
        }
    }

    fn apply_pointwise(&self, si: usize, children: &[usize], out: &mut [u8]) {
        let k = children.len();
        let mut args = vec![0usize; k];
        for (gi, l) in self.layouts.iter().enumerate() {
            let table = self.generators[gi].table(si);
            for p in 0..l.points() {
                for (ai, &c) in children.iter().enumerate() {
                    args[ai] = self.entries[c].fingerprint[l.offset + p] as usize;
                }
                out[l.offset + p] = table[tuple_index(l.size, &args)] as u8;
            }
        }
    }

    /// Grows one depth level; returns the number of new behaviors.
    pub fn grow(&mut self) -> usize {
        let prev_len = self.entries.len();
        self.depth += 1;
        let depth = self.depth;
        let sig = self.generators[0].signature().clone();
        let mut scratch = vec![0u8; self.total_points()];
        for (si, sym) in sig.symbols().iter().enumerate() {
            let k = sym.arity;
            if k == 0 {
                continue;
            }
            for children in tuples(prev_len, k) {
                self.apply_pointwise(si, &children, &mut scratch);
                let fresh = match &self.seen {
                    Seen::Packed(map) => !map.contains_key(&self.pack(&scratch)),
                    Seen::Raw(map) => !map.contains_key(scratch.as_slice()),
                };
                if fresh {
                    self.insert(scratch.clone(), depth, Build::App(si, children));
                }
            }
        }
        self.entries.len() - prev_len
    }

    /// Looks for an existing behavior equal to `target`.
    pub fn position_of(&self, target: &[u8]) -> Option<usize> {
        self.entries.iter().position(|e| e.fingerprint == target)
    }

    /// One-level sweep without inserting: the first application of a symbol
    /// to existing behaviors whose fingerprint equals `target`. Candidates
    /// are compared with early exit, so this stays usable when a full extra
    /// level would not fit in memory or time.
    pub fn find_application_matching(&self, target: &[u8]) -> Option<Term> {
        let sig = self.generators[0].signature();
        let len = self.entries.len();
        for (si, sym) in sig.symbols().iter().enumerate() {
            let k = sym.arity;
            if k == 0 {
                continue;
            }
            if k == 2 {
                if let Some(t) = self.sweep_binary(si, target) {
                    return Some(t);
                }
                continue;
            }
            let mut args = vec![0usize; k];
            'cand: for children in tuples(len, k) {
                for (gi, l) in self.layouts.iter().enumerate() {
                    let table = self.generators[gi].table(si);
                    for p in 0..l.points() {
                        for (ai, &c) in children.iter().enumerate() {
                            args[ai] = self.entries[c].fingerprint[l.offset + p] as usize;
                        }
                        if table[tuple_index(l.size, &args)] as u8 != target[l.offset + p] {
                            continue 'cand;
                        }
                    }
                }
                return Some(Term::app(
                    &sym.name,
                    children.iter().map(|&c| self.term(c)).collect(),
                ));
            }
        }
        None
    }

    /// Binary case of the target sweep, pruned through per-point preimage
    /// masks: a left child survives only if every point admits some right
    /// value, and right candidates are filtered by the admissible-value
    /// bucket of the first point.
    fn sweep_binary(&self, si: usize, target: &[u8]) -> Option<Term> {
        let len = self.entries.len();
        let total = self.total_points();
        // mask[l][t]: bitmask of right values w with table[l][w] == t
        let mut masks: Vec<Vec<Vec<u32>>> = Vec::new();
        for (gi, l) in self.layouts.iter().enumerate() {
            let table = self.generators[gi].table(si);
            let n = l.size;
            let mut m = vec![vec![0u32; n]; n];
            for lv in 0..n {
                for w in 0..n {
                    let t = table[lv * n + w];
                    m[lv][t] |= 1 << w;
                }
            }
            masks.push(m);
        }
        let point_gen: Vec<usize> = {
            // generator index owning each fingerprint slot
            let mut v = vec![0usize; total];
            for (gi, l) in self.layouts.iter().enumerate() {
                for p in 0..l.points() {
                    v[l.offset + p] = gi;
                }
            }
            v
        };
        // bucket entries by their value at slot 0
        let bucket_count = self.layouts[0].size;
        let mut buckets: Vec<Vec<usize>> = vec![Vec::new(); bucket_count];
        for (i, e) in self.entries.iter().enumerate() {
            buckets[e.fingerprint[0] as usize].push(i);
        }
        let mut allowed = vec![0u32; total];
        'left: for li in 0..len {
            let lf = &self.entries[li].fingerprint;
            for p in 0..total {
                let m = masks[point_gen[p]][lf[p] as usize][target[p] as usize];
                if m == 0 {
                    continue 'left;
                }
                allowed[p] = m;
            }
            for w0 in 0..bucket_count {
                if allowed[0] & (1 << w0) == 0 {
                    continue;
                }
                'right: for &ri in &buckets[w0] {
                    let rf = &self.entries[ri].fingerprint;
                    for p in 1..total {
                        if allowed[p] & (1 << rf[p]) == 0 {
                            continue 'right;
                        }
                    }
                    let name = &self.generators[0].signature().symbols()[si].name;
                    return Some(Term::app(name, vec![self.term(li), self.term(ri)]));
                }
            }
        }
        None
    }

    pub fn grow_to_depth(&mut self, max_depth: usize) {
        while self.depth < max_depth {
            if self.grow() == 0 {
                break;
            }
        }
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn vars(&self) -> &[Var] {
        &self.vars
    }

    pub fn depth_of(&self, idx: usize) -> usize {
        self.entries[idx].depth
    }

    /// The value block of behavior `idx` on generator `gi`, one entry per
    /// assignment tuple of that generator's layout.
    pub fn values_on(&self, idx: usize, gi: usize) -> &[u8] {
        let l = &self.layouts[gi];
        &self.entries[idx].fingerprint[l.offset..l.offset + l.points()]
    }

    /// Reconstructs the first term found with this behavior.
    pub fn term(&self, idx: usize) -> Term {
        match &self.entries[idx].build {
            Build::Var(vi) => Term::Var(self.vars[*vi]),
            Build::Const(si) => Term::constant(&self.generators[0].signature().symbols()[*si].name),
            Build::App(si, children) => {
                let name = &self.generators[0].signature().symbols()[*si].name;
                Term::app(name, children.iter().map(|&c| self.term(c)).collect())
            }
        }
    }

    pub fn packable(&self) -> bool {
        self.max_base.is_some()
    }
}

/// Behaviorally-distinct terms over `vars` up to `max_depth`, deduplicated
/// on the generators of `generators`.
pub fn enumerate_terms(
    generators: &[FiniteAlgebra],
    vars: &[Var],
    max_depth: usize,
) -> Result<Vec<Term>> {
    let mut space = BehaviorSpace::new(generators, vars)?;
    space.grow_to_depth(max_depth);
    Ok((0..space.len()).map(|i| space.term(i)).collect())
}

/// Plain syntactic enumeration, no deduplication. Blows up quickly; used
/// as the oracle against the deduplicated enumeration.
pub fn all_terms(alg: &FiniteAlgebra, vars: &[Var], max_depth: usize) -> Vec<Term> {
    let mut level: Vec<Term> = vars.iter().map(|&v| Term::Var(v)).collect();
    for sym in alg.signature().symbols() {
        if sym.arity == 0 {
            level.push(Term::constant(&sym.name));
        }
    }
    let mut out = level.clone();
    for _ in 0..max_depth {
        let mut next = Vec::new();
        for sym in alg.signature().symbols() {
            if sym.arity == 0 {
                continue;
            }
            for children in tuples(out.len(), sym.arity) {
                next.push(Term::app(
                    &sym.name,
                    children.iter().map(|&c| out[c].clone()).collect(),
                ));
            }
        }
        let mut merged = out.clone();
        merged.extend(next.into_iter().filter(|t| !out.contains(t)));
        out = merged;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::term::{x, y};

    #[test]
    fn depth_zero_is_vars_then_constants() {
        let g3 = corpus::g3();
        let gens = vec![g3];
        let terms = enumerate_terms(&gens, &[x(1)], 0).unwrap();
        let rendered: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
        assert_eq!(rendered, vec!["x1", "0", "1"]);
    }

    #[test]
    fn goedel_implication_collapses_to_top() {
        // over G3: x->x, x->1, 1 all induce the constant-top function
        let gens = vec![corpus::g3()];
        let terms = enumerate_terms(&gens, &[x(1), y(1)], 1).unwrap();
        let rendered: Vec<String> = terms.iter().map(|t| t.to_string()).collect();
        assert!(rendered.contains(&"->(x1,y1)".to_string()));
        assert!(rendered.contains(&"->(y1,x1)".to_string()));
        assert!(!rendered.contains(&"->(x1,x1)".to_string()));
    }

    #[test]
    fn prefix_closed_by_depth() {
        let gens = vec![corpus::l3()];
        let d1 = enumerate_terms(&gens, &[x(1), y(1)], 1).unwrap();
        let d2 = enumerate_terms(&gens, &[x(1), y(1)], 2).unwrap();
        assert!(d2.len() >= d1.len());
        assert_eq!(&d2[..d1.len()], &d1[..]);
    }

    #[test]
    fn dedup_matches_raw_enumeration_behaviors() {
        use std::collections::BTreeSet;
        let g3 = corpus::g3();
        let vars = [x(1), y(1)];
        let deduped = enumerate_terms(std::slice::from_ref(&g3), &vars, 2).unwrap();
        let raw = all_terms(&g3, &vars, 2);
        let fp = |t: &crate::term::Term| g3.value_table(t, &vars).unwrap();
        let lhs: BTreeSet<Vec<usize>> = deduped.iter().map(|t| fp(t)).collect();
        let rhs: BTreeSet<Vec<usize>> = raw.iter().map(|t| fp(t)).collect();
        assert_eq!(lhs, rhs);
        // pairwise distinct behaviors after dedup
        assert_eq!(lhs.len(), deduped.len());
    }
}
