//! Quasi-views: lattice and monoid laws weakened so idempotence and the
//! unit law hold only after regularization `a ↦ a·1`. Regular elements
//! form an ordinary bounded integral view; the audits here test, model by
//! model, how far the filter/congruence correspondence survives the
//! weakening, and an enumerator provides the evidence base.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::{tuples, FiniteAlgebra, OpSym, Signature};
use crate::congruence::{all_congruences, Congruence, CongruenceLattice};
use crate::error::{Error, Result};
use crate::ideal::render_set;
use crate::report::AuditReport;
use crate::residuated::{
    check_residuated_axioms, is_normal_filter, normal_filters, ResiduatedView, RoleBindings,
};

pub const ORDER_READING: &str =
    "quasiorder read as a∧a = a∧b (equivalently b∨b = b∨a on validated views)";

/// A validated quasi-view of a finite algebra.
#[derive(Debug, Clone)]
pub struct QuasiView<'a> {
    alg: &'a FiniteAlgebra,
    join: usize,
    meet: usize,
    fuse: usize,
    lres: usize,
    rres: usize,
    same_residual_symbol: bool,
    zero: usize,
    one: usize,
    le: Vec<bool>,
}

impl<'a> QuasiView<'a> {
    pub fn algebra(&self) -> &'a FiniteAlgebra {
        self.alg
    }

    pub fn size(&self) -> usize {
        self.alg.size()
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn zero(&self) -> usize {
        self.zero
    }

    pub fn le(&self, a: usize, b: usize) -> bool {
        self.le[a * self.alg.size() + b]
    }

    pub fn join_el(&self, a: usize, b: usize) -> usize {
        self.alg.apply(self.join, &[a, b])
    }

    pub fn meet_el(&self, a: usize, b: usize) -> usize {
        self.alg.apply(self.meet, &[a, b])
    }

    pub fn fuse_el(&self, a: usize, b: usize) -> usize {
        self.alg.apply(self.fuse, &[a, b])
    }

    pub fn under(&self, a: usize, b: usize) -> usize {
        self.alg.apply(self.lres, &[a, b])
    }

    pub fn over(&self, a: usize, b: usize) -> usize {
        if self.same_residual_symbol {
            self.alg.apply(self.rres, &[b, a])
        } else {
            self.alg.apply(self.rres, &[a, b])
        }
    }

    /// `a · 1`.
    pub fn regularize(&self, a: usize) -> usize {
        self.fuse_el(a, self.one)
    }

    pub fn is_regular(&self, a: usize) -> bool {
        self.regularize(a) == a
    }

    /// Upward closure in the quasiorder.
    pub fn up_closure(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        (0..self.size())
            .filter(|&b| set.iter().any(|&s| self.le(s, b)))
            .collect()
    }
}

pub struct QuasiCheck<'a> {
    pub reports: Vec<AuditReport>,
    pub view: Option<QuasiView<'a>>,
}

impl QuasiCheck<'_> {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }
}

/// Exhaustively checks the weakened lattice/monoid laws, the quasiorder
/// structure, residuation with respect to the quasiorder, and the
/// regularity items. Every failed law is reported with the assignment.
pub fn check_quasi_axioms<'a>(
    alg: &'a FiniteAlgebra,
    bindings: &RoleBindings,
) -> Result<QuasiCheck<'a>> {
    let zero_name = bindings
        .zero
        .clone()
        .ok_or_else(|| Error::MissingBinding("zero".into()))?;
    let bin = |name: &str| -> Result<usize> {
        let idx = alg.op_index(name)?;
        if alg.arity(idx) != 2 {
            return Err(Error::ArityMismatch {
                symbol: name.to_string(),
                expected: 2,
                got: alg.arity(idx),
            });
        }
        Ok(idx)
    };
    let join = bin(&bindings.join)?;
    let meet = bin(&bindings.meet)?;
    let fuse = bin(&bindings.fuse)?;
    let lres = bin(&bindings.lres)?;
    let rres = bin(&bindings.rres)?;
    let same = bindings.lres == bindings.rres;
    let con = |name: &str| -> Result<usize> {
        let idx = alg.op_index(name)?;
        if alg.arity(idx) != 0 {
            return Err(Error::ArityMismatch {
                symbol: name.to_string(),
                expected: 0,
                got: alg.arity(idx),
            });
        }
        Ok(alg.table(idx)[0])
    };
    let one = con(&bindings.one)?;
    let zero = con(&zero_name)?;
    let n = alg.size();
    let j = |a: usize, b: usize| alg.apply(join, &[a, b]);
    let m = |a: usize, b: usize| alg.apply(meet, &[a, b]);
    let f = |a: usize, b: usize| alg.apply(fuse, &[a, b]);
    let under = |a: usize, b: usize| alg.apply(lres, &[a, b]);
    let over = |a: usize, b: usize| {
        if same {
            alg.apply(rres, &[b, a])
        } else {
            alg.apply(rres, &[a, b])
        }
    };
    let mut reports = Vec::new();

    let mut qlat = AuditReport::pass("quasi/q-lattice");
    'qlat: for a in 0..n {
        for b in 0..n {
            if j(a, b) != j(b, a) || m(a, b) != m(b, a) {
                qlat = AuditReport::fail(
                    "quasi/q-lattice",
                    format!("commutativity fails at ({},{})", a, b),
                );
                break 'qlat;
            }
            let r = j(a, a);
            if j(a, m(b, a)) != r || m(a, a) != r || m(a, j(b, a)) != r {
                qlat = AuditReport::fail(
                    "quasi/q-lattice",
                    format!("weak absorption fails at a={} b={}", a, b),
                );
                break 'qlat;
            }
            if j(a, b) != j(a, j(b, b)) || m(a, b) != m(a, m(b, b)) {
                qlat = AuditReport::fail(
                    "quasi/q-lattice",
                    format!("regularized-argument law fails at a={} b={}", a, b),
                );
                break 'qlat;
            }
            for c in 0..n {
                if j(a, j(b, c)) != j(j(a, b), c) || m(a, m(b, c)) != m(m(a, b), c) {
                    qlat = AuditReport::fail(
                        "quasi/q-lattice",
                        format!("associativity fails at ({},{},{})", a, b, c),
                    );
                    break 'qlat;
                }
            }
        }
    }
    let qlat_ok = qlat.passed();
    reports.push(qlat);

    let le = |a: usize, b: usize| m(a, a) == m(a, b);
    let mut order = AuditReport::pass("quasi/quasiorder").with_note(ORDER_READING);
    if qlat_ok {
        'order: for a in 0..n {
            for b in 0..n {
                if le(a, b) != (j(b, b) == j(b, a)) {
                    order = AuditReport::fail(
                        "quasi/quasiorder",
                        format!("meet and join orders disagree at ({},{})", a, b),
                    )
                    .with_note(ORDER_READING);
                    break 'order;
                }
                for c in 0..n {
                    if le(a, b) && le(b, c) && !le(a, c) {
                        order = AuditReport::fail(
                            "quasi/quasiorder",
                            format!("transitivity fails at ({},{},{})", a, b, c),
                        )
                        .with_note(ORDER_READING);
                        break 'order;
                    }
                }
            }
        }
        if order.passed() {
            for a in 0..n {
                if !le(zero, a) || !le(a, one) {
                    order = AuditReport::fail(
                        "quasi/quasiorder",
                        format!(
                            "bounds fail at {}: 0≤a is {}, a≤1 is {}",
                            a,
                            le(zero, a),
                            le(a, one)
                        ),
                    )
                    .with_note(ORDER_READING);
                    break;
                }
            }
        }
    } else {
        order =
            AuditReport::fail("quasi/quasiorder", "skipped: no q-lattice").with_note(ORDER_READING);
    }
    let order_ok = order.passed();
    reports.push(order);

    let mut qmon = AuditReport::pass("quasi/q-monoid");
    'qmon: for a in 0..n {
        if f(a, one) != f(one, a) {
            qmon = AuditReport::fail("quasi/q-monoid", format!("a·1 = 1·a fails at {}", a));
            break 'qmon;
        }
        for b in 0..n {
            if f(f(a, b), one) != f(a, b) {
                qmon = AuditReport::fail(
                    "quasi/q-monoid",
                    format!("a·b·1 = a·b fails at ({},{})", a, b),
                );
                break 'qmon;
            }
            for c in 0..n {
                if f(a, f(b, c)) != f(f(a, b), c) {
                    qmon = AuditReport::fail(
                        "quasi/q-monoid",
                        format!("associativity fails at ({},{},{})", a, b, c),
                    );
                    break 'qmon;
                }
            }
        }
    }
    if qmon.passed() && f(one, one) != one {
        qmon = AuditReport::fail("quasi/q-monoid", "1·1 = 1 fails");
    }
    reports.push(qmon);

    let mut resid = AuditReport::pass("quasi/residuation");
    if order_ok {
        'resid: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let prod = le(f(a, b), c);
                    if prod != le(b, under(a, c)) || prod != le(a, over(c, b)) {
                        resid = AuditReport::fail(
                            "quasi/residuation",
                            format!("x={} y={} z={}", a, b, c),
                        );
                        break 'resid;
                    }
                }
            }
        }
    } else {
        resid = AuditReport::fail("quasi/residuation", "skipped: no quasiorder");
    }
    reports.push(resid);

    let mut items = AuditReport::pass("quasi/regularity-items");
    if m(zero, zero) != zero {
        items = AuditReport::fail("quasi/regularity-items", "0∧0 = 0 fails");
    } else {
        'items: for a in 0..n {
            if f(a, one) != m(a, a) {
                items = AuditReport::fail(
                    "quasi/regularity-items",
                    format!("a·1 = a∧a fails at {}", a),
                );
                break 'items;
            }
            for b in 0..n {
                let u = under(a, b);
                let o = over(a, b);
                if f(u, one) != u || f(o, one) != o {
                    items = AuditReport::fail(
                        "quasi/regularity-items",
                        format!("residual values not regular at ({},{})", a, b),
                    );
                    break 'items;
                }
            }
        }
    }
    reports.push(items);

    let view = if reports.iter().all(|r| r.passed()) {
        let mut le_table = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                le_table[a * n + b] = le(a, b);
            }
        }
        Some(QuasiView {
            alg,
            join,
            meet,
            fuse,
            lres,
            rres,
            same_residual_symbol: same,
            zero,
            one,
            le: le_table,
        })
    } else {
        None
    };
    Ok(QuasiCheck { reports, view })
}

pub fn quasi_view_of(alg: &FiniteAlgebra) -> Result<QuasiView<'_>> {
    let bindings = RoleBindings::of_algebra(alg)?;
    let check = check_quasi_axioms(alg, &bindings)?;
    check.view.ok_or_else(|| {
        let first = check
            .reports
            .iter()
            .find(|r| !r.passed())
            .map(|r| r.to_string())
            .unwrap_or_default();
        Error::ViewNotValid(format!("a quasi view: {}", first))
    })
}

/// The regular elements with their induced algebra.
#[derive(Debug, Clone)]
pub struct RegularCore {
    pub elements: Vec<usize>,
    pub algebra: FiniteAlgebra,
    pub index_of: BTreeMap<usize, usize>,
}

impl RegularCore {
    pub fn restrict(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        set.iter()
            .filter_map(|e| self.index_of.get(e).copied())
            .collect()
    }

    pub fn embed(&self, set: &BTreeSet<usize>) -> BTreeSet<usize> {
        set.iter().map(|&i| self.elements[i]).collect()
    }
}

/// Extracts `{a : a·1 = a}`, audits that it equals the regularization
/// image and is closed under all operations, and that the induced algebra
/// is a bounded integral view.
pub fn regular_core<'a>(view: &QuasiView<'a>) -> (Vec<AuditReport>, Option<RegularCore>) {
    let alg = view.algebra();
    let n = view.size();
    let mut reports = Vec::new();
    let elements: Vec<usize> = (0..n).filter(|&a| view.is_regular(a)).collect();
    let image: BTreeSet<usize> = (0..n).map(|a| view.regularize(a)).collect();
    let fixed: BTreeSet<usize> = elements.iter().copied().collect();
    reports.push(if image == fixed {
        AuditReport::pass("sec6/regular-core-image")
    } else {
        AuditReport::fail(
            "sec6/regular-core-image",
            format!(
                "fixed points {} differ from the image {}",
                render_set(&fixed),
                render_set(&image)
            ),
        )
    });
    let index_of: BTreeMap<usize, usize> =
        elements.iter().enumerate().map(|(i, &e)| (e, i)).collect();
    let mut closed = AuditReport::pass("sec6/regular-core-closed");
    let mut tables: Vec<Vec<usize>> = Vec::new();
    'symbols: for (si, sym) in alg.signature().symbols().iter().enumerate() {
        let mut table = Vec::with_capacity(elements.len().pow(sym.arity as u32));
        for idx in tuples(elements.len(), sym.arity) {
            let args: Vec<usize> = idx.iter().map(|&i| elements[i]).collect();
            let v = alg.apply(si, &args);
            match index_of.get(&v) {
                Some(&ci) => table.push(ci),
                None => {
                    closed = AuditReport::fail(
                        "sec6/regular-core-closed",
                        format!("{}{:?} = {} is not regular", sym.name, args, v),
                    );
                    break 'symbols;
                }
            }
        }
        tables.push(table);
    }
    let closed_ok = closed.passed();
    reports.push(closed);
    if !closed_ok {
        return (reports, None);
    }
    let signature = Signature::new(
        alg.signature().symbols().to_vec(),
        alg.signature().point_name(),
    )
    .expect("signature is valid");
    let mut core_alg = match FiniteAlgebra::new(
        format!("core({})", alg.name()),
        signature,
        elements.len(),
        tables,
    ) {
        Ok(a) => a,
        Err(e) => {
            reports.push(AuditReport::fail(
                "sec6/regular-core-flw",
                format!("induced algebra is malformed: {}", e),
            ));
            return (reports, None);
        }
    };
    core_alg.set_bindings(alg.bindings().clone());
    let flw = match RoleBindings::of_algebra(&core_alg)
        .and_then(|b| check_residuated_axioms(&core_alg, &b))
    {
        Ok(check) => match check.flags {
            Some(flags) if flags.fl_w => AuditReport::pass("sec6/regular-core-flw"),
            Some(_) => AuditReport::fail(
                "sec6/regular-core-flw",
                "core is residuated but not bounded integral",
            ),
            None => AuditReport::fail(
                "sec6/regular-core-flw",
                check
                    .reports
                    .iter()
                    .find(|r| !r.passed())
                    .map(|r| r.to_string())
                    .unwrap_or_default(),
            ),
        },
        Err(e) => AuditReport::fail("sec6/regular-core-flw", e.to_string()),
    };
    let flw_ok = flw.passed();
    reports.push(flw);
    let core = RegularCore {
        elements,
        algebra: core_alg,
        index_of,
    };
    if flw_ok {
        (reports, Some(core))
    } else {
        (reports, None)
    }
}

pub fn is_regular_congruence(view: &QuasiView, theta: &Congruence) -> bool {
    let n = view.size();
    for a in 0..n {
        for b in 0..n {
            if theta.related(view.regularize(a), view.regularize(b)) && !theta.related(a, b) {
                return false;
            }
        }
    }
    true
}

/// Indices into the congruence lattice of the regular congruences.
pub fn regular_congruences(view: &QuasiView, lattice: &CongruenceLattice) -> Vec<usize> {
    (0..lattice.len())
        .filter(|&i| is_regular_congruence(view, lattice.get(i)))
        .collect()
}

/// Regular congruences are closed under the lattice join and meet.
pub fn check_regular_sublattice(view: &QuasiView, lattice: &CongruenceLattice) -> AuditReport {
    let check = "sec6/regular-sublattice";
    let regular = regular_congruences(view, lattice);
    for &i in &regular {
        for &j in &regular {
            for k in [lattice.join_of(i, j), lattice.meet_of(i, j)] {
                if !regular.contains(&k) {
                    return AuditReport::fail(
                        check,
                        format!(
                            "join/meet of {} and {} leaves the regular family",
                            lattice.get(i).render(),
                            lattice.get(j).render()
                        ),
                    );
                }
            }
        }
    }
    let mut r = AuditReport::pass(check);
    r.vacuous = regular.len() <= 1;
    r
}

/// Subsets containing the unit, upward closed in the quasiorder, with the
/// two residuals entering together.
pub fn quasi_normal_filters(view: &QuasiView) -> Vec<BTreeSet<usize>> {
    let n = view.size();
    let mut out = Vec::new();
    'mask: for mask in 0..(1u64 << n) {
        let set: BTreeSet<usize> = (0..n).filter(|&e| mask & (1 << e) != 0).collect();
        if !set.contains(&view.one()) {
            continue;
        }
        for &a in &set {
            for b in 0..n {
                if view.le(a, b) && !set.contains(&b) {
                    continue 'mask;
                }
            }
        }
        for a in 0..n {
            for b in 0..n {
                if set.contains(&view.under(a, b)) != set.contains(&view.over(b, a)) {
                    continue 'mask;
                }
            }
        }
        out.push(set);
    }
    out
}

/// The displayed map from a subset to a relation: both residual quotients
/// in the set.
fn displayed_relation(view: &QuasiView, set: &BTreeSet<usize>, a: usize, b: usize) -> bool {
    set.contains(&view.over(a, b)) && set.contains(&view.over(b, a))
}

fn displayed_congruence(view: &QuasiView, set: &BTreeSet<usize>) -> Option<Congruence> {
    let n = view.size();
    for a in 0..n {
        if !displayed_relation(view, set, a, a) {
            return None;
        }
        for b in 0..n {
            for c in 0..n {
                if displayed_relation(view, set, a, b)
                    && displayed_relation(view, set, b, c)
                    && !displayed_relation(view, set, a, c)
                {
                    return None;
                }
            }
        }
    }
    let labels: Vec<usize> = (0..n)
        .map(|e| {
            (0..=e)
                .find(|&u| displayed_relation(view, set, u, e))
                .unwrap()
        })
        .collect();
    let theta = Congruence::from_labels(&labels);
    if theta.is_compatible(view.algebra()) {
        Some(theta)
    } else {
        None
    }
}

/// Five statements audited for equivalence at every congruence:
/// regularity; the quotient being a bounded integral view; the unit class
/// meeting the core in a normal filter; the unit class being an up-set of
/// a core normal filter; and the unit class recovering the congruence.
pub fn theorem_audit_61(view: &QuasiView, lattice: &CongruenceLattice) -> AuditReport {
    let check = "sec6.1/regularity-equivalences";
    let alg = view.algebra();
    let (core_reports, core) = regular_core(view);
    let core = match core {
        Some(c) => c,
        None => {
            let first = core_reports
                .iter()
                .find(|r| !r.passed())
                .map(|r| r.to_string())
                .unwrap_or_default();
            return AuditReport::fail(check, format!("regular core audit failed: {}", first));
        }
    };
    let core_view = match ResiduatedView::of_algebra(&core.algebra) {
        Ok(v) => v,
        Err(e) => return AuditReport::fail(check, e.to_string()),
    };
    let bindings = RoleBindings::of_algebra(alg).expect("validated view has bindings");
    let core_nf = normal_filters(&core_view);
    let mut failures = Vec::new();
    for theta in lattice.iter() {
        let unit_class = theta.class_of(view.one());
        let c1 = is_regular_congruence(view, theta);
        let c2 = {
            let q = alg.quotient(theta).expect("lattice members are compatible");
            let mut qa = q.algebra;
            qa.set_bindings(alg.bindings().clone());
            match check_residuated_axioms(&qa, &bindings) {
                Ok(chk) => chk.flags.map(|f| f.fl_w).unwrap_or(false),
                Err(_) => false,
            }
        };
        let c3 = {
            let restricted = core.restrict(&unit_class);
            is_normal_filter(&core_view, &restricted)
        };
        let c4 = core_nf
            .sets
            .iter()
            .any(|g| view.up_closure(&core.embed(g)) == unit_class);
        let c5 = {
            let n = view.size();
            (0..n).all(|a| {
                (0..n).all(|b| displayed_relation(view, &unit_class, a, b) == theta.related(a, b))
            })
        };
        let bools = [c1, c2, c3, c4, c5];
        if bools.iter().any(|&b| b != c1) {
            failures.push(format!(
                "θ={}: regular={} quotient-flw={} core-trace-normal={} up-set-of-core-filter={} recovered={}",
                theta.render(),
                c1,
                c2,
                c3,
                c4,
                c5
            ));
        }
    }
    if failures.is_empty() {
        let mut r = AuditReport::pass(check);
        r.vacuous = view.size() == 1;
        r
    } else {
        let mut r = AuditReport::fail(check, failures[0].clone());
        r = r.with_note(format!(
            "{} congruence(s) break the equivalence",
            failures.len()
        ));
        for f in failures.iter().skip(1) {
            r = r.with_note(f.clone());
        }
        r
    }
}

/// The normal-filter ↔ regular-congruence correspondence, with the three
/// lattice isomorphisms checked through explicit maps. Failures are
/// expected on some models — the filter definition has no closure under
/// fusion or modus ponens — and are reported as findings with witnesses.
pub fn theorem_audit_62(view: &QuasiView, lattice: &CongruenceLattice) -> AuditReport {
    let check = "sec6.2/normal-filter-correspondence";
    let (core_reports, core) = regular_core(view);
    let core = match core {
        Some(c) => c,
        None => {
            let first = core_reports
                .iter()
                .find(|r| !r.passed())
                .map(|r| r.to_string())
                .unwrap_or_default();
            return AuditReport::fail(check, format!("regular core audit failed: {}", first));
        }
    };
    let core_view = match ResiduatedView::of_algebra(&core.algebra) {
        Ok(v) => v,
        Err(e) => return AuditReport::fail(check, e.to_string()),
    };
    let nfil = quasi_normal_filters(view);
    let regular = regular_congruences(view, lattice);
    let unit_classes: Vec<BTreeSet<usize>> = regular
        .iter()
        .map(|&i| lattice.get(i).class_of(view.one()))
        .collect();

    // (1) normal filters are exactly the unit classes of regular congruences
    for f in &nfil {
        if !unit_classes.contains(f) {
            return AuditReport::fail(
                check,
                format!(
                    "normal filter {} is not the unit class of any regular congruence",
                    render_set(f)
                ),
            );
        }
    }
    for c in &unit_classes {
        if !nfil.contains(c) {
            return AuditReport::fail(
                check,
                format!("unit class {} is not a normal filter", render_set(c)),
            );
        }
    }

    // (2) the displayed formula recovers the congruence from its unit class
    for &i in &regular {
        let theta = lattice.get(i);
        let f = theta.class_of(view.one());
        match displayed_congruence(view, &f) {
            Some(t) if t == *theta => {}
            _ => {
                return AuditReport::fail(
                    check,
                    format!("formula does not recover θ={}", theta.render()),
                )
            }
        }
    }
    for f in &nfil {
        match displayed_congruence(view, f) {
            Some(t) if is_regular_congruence(view, &t) && t.class_of(view.one()) == *f => {}
            _ => {
                return AuditReport::fail(
                    check,
                    format!(
                        "θ_F for F={} is not a regular congruence with unit class F",
                        render_set(f)
                    ),
                )
            }
        }
    }

    // (4) regular congruences form a sublattice
    let sub = check_regular_sublattice(view, lattice);
    if !sub.passed() {
        return AuditReport::fail(check, sub.witness.unwrap_or_default());
    }

    // (3) the chain of isomorphisms, through explicit maps and counts
    let core_con = all_congruences(&core.algebra);
    let core_nf = normal_filters(&core_view);
    if !(nfil.len() == regular.len()
        && regular.len() == core_con.len()
        && core_con.len() == core_nf.len())
    {
        return AuditReport::fail(
            check,
            format!(
                "lattice sizes differ: |NFil|={} |RCon|={} |Con(core)|={} |NFil(core)|={}",
                nfil.len(),
                regular.len(),
                core_con.len(),
                core_nf.len()
            ),
        );
    }
    // order preservation of F ↦ θ_F
    for f in &nfil {
        for g in &nfil {
            let tf = displayed_congruence(view, f).expect("checked above");
            let tg = displayed_congruence(view, g).expect("checked above");
            if f.is_subset(g) != tf.leq(&tg) {
                return AuditReport::fail(
                    check,
                    format!(
                        "F ↦ θ_F does not preserve order between {} and {}",
                        render_set(f),
                        render_set(g)
                    ),
                );
            }
        }
    }
    // restriction to the core is an order isomorphism RCon → Con(core)
    let mut restricted = Vec::new();
    for &i in &regular {
        let theta = lattice.get(i);
        let labels: Vec<usize> = core
            .elements
            .iter()
            .map(|&e| {
                core.elements
                    .iter()
                    .position(|&u| theta.related(u, e))
                    .unwrap()
            })
            .collect();
        let sigma = Congruence::from_labels(&labels);
        if core_con.position(&sigma).is_none() {
            return AuditReport::fail(
                check,
                format!("restriction of θ={} escapes Con(core)", theta.render()),
            );
        }
        // inverse: inflate along regularization
        let n = view.size();
        let inflated_labels: Vec<usize> = (0..n)
            .map(|e| {
                (0..=e)
                    .find(|&u| {
                        let ru = core.index_of[&view.regularize(u)];
                        let re = core.index_of[&view.regularize(e)];
                        sigma.related(ru, re)
                    })
                    .unwrap()
            })
            .collect();
        if Congruence::from_labels(&inflated_labels) != *theta {
            return AuditReport::fail(
                check,
                format!(
                    "θ={} is not recovered from its core restriction",
                    theta.render()
                ),
            );
        }
        restricted.push(sigma);
    }
    restricted.sort();
    restricted.dedup();
    if restricted.len() != regular.len() {
        return AuditReport::fail(check, "core restriction is not injective");
    }
    // unit classes in the core are its normal filters
    for sigma in core_con.iter() {
        let f = sigma.class_of(core_view.one());
        if core_nf.position(&f).is_none() {
            return AuditReport::fail(
                check,
                format!(
                    "core unit class {} is not a core normal filter",
                    render_set(&f)
                ),
            );
        }
    }
    let mut r = AuditReport::pass(check);
    r.vacuous = view.size() == 1;
    r
}

const QUASI_SYMBOLS: [(&str, usize); 7] = [
    ("v", 2),
    ("^", 2),
    ("*", 2),
    ("\\", 2),
    ("/", 2),
    ("0", 0),
    ("1", 0),
];

fn quasi_signature() -> Signature {
    Signature::new(
        QUASI_SYMBOLS
            .iter()
            .map(|(name, arity)| OpSym {
                name: name.to_string(),
                arity: *arity,
            })
            .collect(),
        "1",
    )
    .expect("fixed signature")
}

fn quasi_bindings() -> BTreeMap<String, String> {
    [
        ("join", "v"),
        ("meet", "^"),
        ("fuse", "*"),
        ("lres", "\\"),
        ("rres", "/"),
        ("one", "1"),
        ("zero", "0"),
    ]
    .iter()
    .map(|(k, v)| (k.to_string(), v.to_string()))
    .collect()
}

fn permutations(n: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current: Vec<usize> = (0..n).collect();
    fn heap(k: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if k <= 1 {
            out.push(current.clone());
            return;
        }
        for i in 0..k {
            heap(k - 1, current, out);
            if k % 2 == 0 {
                current.swap(i, k - 1);
            } else {
                current.swap(0, k - 1);
            }
        }
    }
    heap(n, &mut current, &mut out);
    out.sort();
    out.dedup();
    out
}

fn permute_binary(table: &[usize], n: usize, sigma: &[usize]) -> Vec<usize> {
    let mut inv = vec![0; n];
    for (i, &s) in sigma.iter().enumerate() {
        inv[s] = i;
    }
    let mut out = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            out[a * n + b] = sigma[table[inv[a] * n + inv[b]]];
        }
    }
    out
}

/// Canonical key: minimum over universe permutations of the concatenated
/// permuted tables.
fn canonical_key(tables: &[Vec<usize>], n: usize) -> Vec<usize> {
    let mut best: Option<Vec<usize>> = None;
    for sigma in permutations(n) {
        let mut key = Vec::new();
        for table in tables {
            match table.len() {
                1 => key.push(sigma[table[0]]),
                _ => key.extend(permute_binary(table, n, &sigma)),
            }
        }
        if best.as_ref().map(|b| key < *b).unwrap_or(true) {
            best = Some(key);
        }
    }
    best.unwrap()
}

fn tables_from_key(key: &[usize], n: usize) -> Vec<Vec<usize>> {
    let mut tables = Vec::new();
    let mut pos = 0;
    for (_, arity) in QUASI_SYMBOLS {
        let len = n.pow(arity as u32);
        tables.push(key[pos..pos + len].to_vec());
        pos += len;
    }
    tables
}

/// Symmetric tables that are associative and absorb regularized arguments.
fn semilattice_candidates(n: usize) -> Vec<Vec<usize>> {
    let slots = n * (n + 1) / 2;
    let mut out = Vec::new();
    'cand: for assignment in tuples(n, slots) {
        let mut table = vec![0; n * n];
        let mut s = 0;
        for a in 0..n {
            for b in a..n {
                table[a * n + b] = assignment[s];
                table[b * n + a] = assignment[s];
                s += 1;
            }
        }
        for a in 0..n {
            for b in 0..n {
                if table[a * n + table[b * n + b]] != table[a * n + b] {
                    continue 'cand;
                }
                for c in 0..n {
                    if table[table[a * n + b] * n + c] != table[a * n + table[b * n + c]] {
                        continue 'cand;
                    }
                }
            }
        }
        out.push(table);
    }
    out
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn next(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    fn below(&mut self, n: usize) -> usize {
        (self.next() % n as u64) as usize
    }
}

/// All quasi structures on `0..size-1` up to isomorphism, by exhausting
/// operation tables with the laws as filters. Sizes 1–3 are exhaustive;
/// larger sizes must be sampled with a fixed seed.
pub fn enumerate_quasi_models(
    size: usize,
    sample: Option<(usize, u64)>,
) -> Result<Vec<FiniteAlgebra>> {
    if size == 0 {
        return Err(Error::Precondition("size must be positive".into()));
    }
    if size > 3 && sample.is_none() {
        return Err(Error::Precondition(
            "exhaustive enumeration is limited to size ≤ 3; pass a sample budget".into(),
        ));
    }
    let n = size;
    let semis = semilattice_candidates(n);
    let mut canon: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut try_candidate =
        |join: &[usize], meet: &[usize], zero: usize, one: usize, fuse: &[usize]| -> Result<()> {
            let derived = match derive_residuals(join, meet, fuse, n, zero, one) {
                Some(d) => d,
                None => return Ok(()),
            };
            let tables = vec![
                join.to_vec(),
                meet.to_vec(),
                fuse.to_vec(),
                derived.0,
                derived.1,
                vec![zero],
                vec![one],
            ];
            let mut alg = FiniteAlgebra::new("candidate", quasi_signature(), n, tables)?;
            alg.set_bindings(quasi_bindings());
            let bindings = RoleBindings::of_algebra(&alg)?;
            if check_quasi_axioms(&alg, &bindings)?.passed() {
                let all_tables: Vec<Vec<usize>> = (0..QUASI_SYMBOLS.len())
                    .map(|i| alg.table(i).to_vec())
                    .collect();
                canon.insert(canonical_key(&all_tables, n));
            }
            Ok(())
        };

    match sample {
        None => {
            for join in &semis {
                for meet in &semis {
                    if !qlattice_pair_ok(join, meet, n) {
                        continue;
                    }
                    for zero in 0..n {
                        for one in 0..n {
                            for fuse in fuse_candidates(meet, n, one) {
                                try_candidate(join, meet, zero, one, &fuse)?;
                            }
                        }
                    }
                }
            }
        }
        Some((attempts, seed)) => {
            let mut rng = SplitMix64(seed);
            for _ in 0..attempts {
                let join = &semis[rng.below(semis.len())];
                let meet = &semis[rng.below(semis.len())];
                if !qlattice_pair_ok(join, meet, n) {
                    continue;
                }
                let zero = rng.below(n);
                let one = rng.below(n);
                let regulars: Vec<usize> = (0..n).filter(|&a| meet[a * n + a] == a).collect();
                if regulars.is_empty() {
                    continue;
                }
                let mut fuse = vec![0; n * n];
                for a in 0..n {
                    for b in 0..n {
                        fuse[a * n + b] = if a == one {
                            meet[b * n + b]
                        } else if b == one {
                            meet[a * n + a]
                        } else {
                            regulars[rng.below(regulars.len())]
                        };
                    }
                }
                try_candidate(join, meet, zero, one, &fuse)?;
            }
        }
    }

    let mut out = Vec::new();
    for (i, key) in canon.iter().enumerate() {
        let tables = tables_from_key(key, n);
        let mut alg =
            FiniteAlgebra::new(format!("quasi{}_{:03}", n, i), quasi_signature(), n, tables)?;
        alg.set_bindings(quasi_bindings());
        out.push(alg);
    }
    Ok(out)
}

fn qlattice_pair_ok(join: &[usize], meet: &[usize], n: usize) -> bool {
    for a in 0..n {
        let r = join[a * n + a];
        if meet[a * n + a] != r {
            return false;
        }
        for b in 0..n {
            if join[a * n + meet[b * n + a]] != r || meet[a * n + join[b * n + a]] != r {
                return false;
            }
        }
    }
    true
}

/// Fuse tables with the unit column pinned to the regularization, values
/// regular and associativity holding.
fn fuse_candidates(meet: &[usize], n: usize, one: usize) -> Vec<Vec<usize>> {
    let regular: Vec<usize> = (0..n).filter(|&a| meet[a * n + a] == a).collect();
    // the pinned entries must themselves be regular
    for a in 0..n {
        let r = meet[a * n + a];
        if meet[r * n + r] != r {
            return Vec::new();
        }
    }
    let free: Vec<(usize, usize)> = (0..n)
        .flat_map(|a| (0..n).map(move |b| (a, b)))
        .filter(|&(a, b)| a != one && b != one)
        .collect();
    let mut out = Vec::new();
    'cand: for choice in tuples(regular.len(), free.len()) {
        let mut fuse = vec![0; n * n];
        for a in 0..n {
            fuse[a * n + one] = meet[a * n + a];
            fuse[one * n + a] = meet[a * n + a];
        }
        for (slot, &(a, b)) in free.iter().enumerate() {
            fuse[a * n + b] = regular[choice[slot]];
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if fuse[fuse[a * n + b] * n + c] != fuse[a * n + fuse[b * n + c]] {
                        continue 'cand;
                    }
                }
            }
        }
        out.push(fuse);
    }
    out
}

/// Residual tables determined by the quasiorder, when they exist: the
/// value is the unique regular element bounding the solution set.
fn derive_residuals(
    join: &[usize],
    meet: &[usize],
    fuse: &[usize],
    n: usize,
    _zero: usize,
    _one: usize,
) -> Option<(Vec<usize>, Vec<usize>)> {
    let _ = join;
    let le = |a: usize, b: usize| meet[a * n + a] == meet[a * n + b];
    let regular: Vec<usize> = (0..n).filter(|&a| meet[a * n + a] == a).collect();
    let mut under = vec![0; n * n];
    let mut over = vec![0; n * n];
    for a in 0..n {
        for b in 0..n {
            let mut under_c = None;
            for &c in &regular {
                if (0..n).all(|y| le(fuse[a * n + y], b) == le(y, c)) {
                    if under_c.replace(c).is_some() {
                        return None;
                    }
                }
            }
            under[a * n + b] = under_c?;
            let mut over_c = None;
            for &c in &regular {
                if (0..n).all(|x| le(fuse[x * n + b], a) == le(x, c)) {
                    if over_c.replace(c).is_some() {
                        return None;
                    }
                }
            }
            over[a * n + b] = over_c?;
        }
    }
    Some((under, over))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn flw_corpus_algebras_pass_quasi_axioms() {
        for alg in [corpus::b2(), corpus::g3(), corpus::l3()] {
            let bindings = RoleBindings::of_algebra(&alg).unwrap();
            let check = check_quasi_axioms(&alg, &bindings).unwrap();
            assert!(check.passed(), "{:?}", check.reports);
            let view = check.view.unwrap();
            // every element regular
            assert!((0..view.size()).all(|a| view.is_regular(a)));
            let (reports, core) = regular_core(&view);
            assert!(reports.iter().all(|r| r.passed()));
            assert_eq!(core.unwrap().elements.len(), alg.size());
        }
    }

    #[test]
    fn quasi_axiom_violation_is_reported() {
        // break a·1 = a∧a by making ^ differ from the fuse unit column
        let mut json = corpus::g3().to_json();
        json["operations"][1]["table"] = serde_json::json!([[0, 0, 0], [0, 1, 1], [0, 1, 1]]);
        json["name"] = serde_json::json!("g3_broken");
        let alg =
            crate::algebra::algebra_from_json(&serde_json::to_string(&json).unwrap()).unwrap();
        let bindings = RoleBindings::of_algebra(&alg).unwrap();
        let check = check_quasi_axioms(&alg, &bindings).unwrap();
        assert!(!check.passed());
    }

    #[test]
    fn regular_congruences_on_flw_views_are_all_of_con() {
        for alg in [corpus::b2(), corpus::g3(), corpus::l3()] {
            let view = quasi_view_of(&alg).unwrap();
            let lat = all_congruences(&alg);
            assert_eq!(regular_congruences(&view, &lat).len(), lat.len());
            assert!(check_regular_sublattice(&view, &lat).passed());
        }
    }

    #[test]
    fn audit_61_passes_on_flw_views() {
        for alg in [corpus::b2(), corpus::g3(), corpus::l3()] {
            let view = quasi_view_of(&alg).unwrap();
            let lat = all_congruences(&alg);
            let rep = theorem_audit_61(&view, &lat);
            assert!(rep.passed(), "{} on {}", rep, alg.name());
        }
    }

    #[test]
    fn audit_62_finds_the_modus_ponens_gap_on_l3() {
        // upward-closed {1,2} contains the unit but is not a congruence
        // unit class; the correspondence fails and the audit says where
        let l3 = corpus::l3();
        let view = quasi_view_of(&l3).unwrap();
        let lat = all_congruences(&l3);
        let nfil = quasi_normal_filters(&view);
        assert!(nfil.contains(&BTreeSet::from([1, 2])));
        let rep = theorem_audit_62(&view, &lat);
        assert!(!rep.passed());
        assert!(rep.witness.as_ref().unwrap().contains("{1,2}"));
    }

    #[test]
    fn audit_62_passes_on_g3_and_b2() {
        for alg in [corpus::b2(), corpus::g3()] {
            let view = quasi_view_of(&alg).unwrap();
            let lat = all_congruences(&alg);
            let rep = theorem_audit_62(&view, &lat);
            assert!(rep.passed(), "{} on {}", rep, alg.name());
        }
    }

    #[test]
    fn enumeration_small_sizes() {
        let one = enumerate_quasi_models(1, None).unwrap();
        assert_eq!(one.len(), 1);
        // the one-element view is its own regular core
        let view = quasi_view_of(&one[0]).unwrap();
        let (reports, core) = regular_core(&view);
        assert!(reports.iter().all(|r| r.passed()));
        assert_eq!(core.unwrap().elements.len(), 1);
        let two = enumerate_quasi_models(2, None).unwrap();
        // B2 and the collapsed model with 0 = 1
        assert_eq!(two.len(), 2);
        let b2 = corpus::b2();
        let b2_key = {
            let t = |s: &str| b2.table(b2.op_index(s).unwrap()).to_vec();
            let imp = t("->");
            // the over table is the transpose of the shared implication
            let over: Vec<usize> = (0..4).map(|i| imp[(i % 2) * 2 + i / 2]).collect();
            let tables = vec![t("v"), t("^"), t("*"), imp, over, t("0"), t("1")];
            canonical_key(&tables, 2)
        };
        let found = two.iter().any(|m| {
            let tables: Vec<Vec<usize>> = (0..QUASI_SYMBOLS.len())
                .map(|i| m.table(i).to_vec())
                .collect();
            canonical_key(&tables, 2) == b2_key
        });
        assert!(found, "B2 missing from the size-2 enumeration");
    }

    #[test]
    fn enumeration_size_three_contains_the_chains_and_a_non_regular_model() {
        let models = enumerate_quasi_models(3, None).unwrap();
        assert!(!models.is_empty());
        let mut chains = 0;
        let mut with_non_regular = 0;
        for m in &models {
            let view = quasi_view_of(m).unwrap();
            let regulars = (0..3).filter(|&a| view.is_regular(a)).count();
            if regulars == 3 {
                chains += 1;
            } else {
                with_non_regular += 1;
            }
        }
        // the two residuated chains (idempotent and nilpotent fuse)
        assert_eq!(chains, 2);
        assert!(with_non_regular > 0);
        // every model passes the axioms it was filtered by
        for m in &models {
            let bindings = RoleBindings::of_algebra(m).unwrap();
            assert!(check_quasi_axioms(m, &bindings).unwrap().passed());
        }
    }

    #[test]
    fn non_regular_model_has_boolean_core() {
        let models = enumerate_quasi_models(3, None).unwrap();
        let m = models
            .iter()
            .find(|m| {
                let view = quasi_view_of(m).unwrap();
                (0..3).filter(|&a| !view.is_regular(a)).count() == 1
            })
            .expect("a size-3 model with one non-regular element");
        let view = quasi_view_of(m).unwrap();
        let (reports, core) = regular_core(&view);
        assert!(reports.iter().all(|r| r.passed()), "{:?}", reports);
        let core = core.unwrap();
        assert_eq!(core.algebra.size(), 2);
        let lat = all_congruences(m);
        // the identity cannot be regular when a non-regular element exists
        let delta = lat
            .iter()
            .position(|t| t.block_count() == 3)
            .map(|i| lat.get(i))
            .unwrap();
        assert!(!is_regular_congruence(&view, delta));
        // |NFil| matches |Con(core)|
        assert_eq!(
            quasi_normal_filters(&view).len(),
            all_congruences(&core.algebra).len()
        );
    }
}
