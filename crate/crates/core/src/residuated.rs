//! Residuated-lattice views over a finite algebra: axiom checking with
//! derived flags, filters and normal filters, and the correspondence
//! between normal filters and congruences on integral views.

use std::collections::{BTreeMap, BTreeSet};

use crate::algebra::FiniteAlgebra;
use crate::congruence::{all_congruences, Congruence};
use crate::error::{Error, Result};
use crate::ideal::{self, render_set, GammaSet, IdealLattice, LatticeTables};
use crate::report::AuditReport;
use crate::term::Term;
use crate::variety::VarietyPresentation;

pub const NORMALITY_READING: &str =
    "normality read as closure under the conjugates b\\(a·b) and (b·a)/b";

/// Names of the symbols playing each residuated role. `lres` and `rres`
/// may name the same symbol on commutative views; the right residual is
/// then the left one with swapped arguments.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoleBindings {
    pub join: String,
    pub meet: String,
    pub fuse: String,
    pub lres: String,
    pub rres: String,
    pub one: String,
    pub zero: Option<String>,
}

impl RoleBindings {
    pub fn from_map(map: &BTreeMap<String, String>) -> Result<Self> {
        let need = |key: &str| {
            map.get(key)
                .cloned()
                .ok_or_else(|| Error::MissingBinding(key.to_string()))
        };
        Ok(RoleBindings {
            join: need("join")?,
            meet: need("meet")?,
            fuse: need("fuse")?,
            lres: need("lres")?,
            rres: need("rres")?,
            one: need("one")?,
            zero: map.get("zero").cloned(),
        })
    }

    pub fn of_algebra(alg: &FiniteAlgebra) -> Result<Self> {
        Self::from_map(alg.bindings())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Flags {
    pub integral: bool,
    pub commutative: bool,
    /// Has a zero binding that is the lattice bottom.
    pub bounded: bool,
    pub fl_w: bool,
    pub fl_e: bool,
    pub fl_ew: bool,
}

/// A validated residuated-lattice view of a finite algebra.
#[derive(Debug, Clone)]
pub struct ResiduatedView<'a> {
    alg: &'a FiniteAlgebra,
    join: usize,
    meet: usize,
    fuse: usize,
    lres: usize,
    rres: usize,
    same_residual_symbol: bool,
    one: usize,
    zero: Option<usize>,
    le: Vec<bool>,
    pub flags: Flags,
}

struct RawView<'a> {
    alg: &'a FiniteAlgebra,
    join: usize,
    meet: usize,
    fuse: usize,
    lres: usize,
    rres: usize,
    same_residual_symbol: bool,
    one: usize,
    zero: Option<usize>,
}

impl<'a> RawView<'a> {
    fn bind(alg: &'a FiniteAlgebra, bindings: &RoleBindings) -> Result<Self> {
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
        Ok(RawView {
            alg,
            join: bin(&bindings.join)?,
            meet: bin(&bindings.meet)?,
            fuse: bin(&bindings.fuse)?,
            lres: bin(&bindings.lres)?,
            rres: bin(&bindings.rres)?,
            same_residual_symbol: bindings.lres == bindings.rres,
            one: con(&bindings.one)?,
            zero: bindings.zero.as_deref().map(con).transpose()?,
        })
    }

    fn join_el(&self, a: usize, b: usize) -> usize {
        self.alg.apply(self.join, &[a, b])
    }

    fn meet_el(&self, a: usize, b: usize) -> usize {
        self.alg.apply(self.meet, &[a, b])
    }

    fn fuse_el(&self, a: usize, b: usize) -> usize {
        self.alg.apply(self.fuse, &[a, b])
    }

    /// `a \ b`: solves `a · y ≤ b`.
    fn under(&self, a: usize, b: usize) -> usize {
        self.alg.apply(self.lres, &[a, b])
    }

    /// `a / b`: solves `x · b ≤ a`. With one shared implication symbol the
    /// arguments swap: `a / b = b -> a`.
    fn over(&self, a: usize, b: usize) -> usize {
        if self.same_residual_symbol {
            self.alg.apply(self.rres, &[b, a])
        } else {
            self.alg.apply(self.rres, &[a, b])
        }
    }

    fn le(&self, a: usize, b: usize) -> bool {
        self.join_el(a, b) == b
    }
}

/// Per-axiom-group outcome of validating residuated bindings.
pub struct ResidCheck {
    pub reports: Vec<AuditReport>,
    pub flags: Option<Flags>,
}

impl ResidCheck {
    pub fn passed(&self) -> bool {
        self.reports.iter().all(|r| r.passed())
    }
}

/// Checks the lattice, monoid and residuation axioms under the given role
/// bindings, deriving the classification flags when they pass.
pub fn check_residuated_axioms(alg: &FiniteAlgebra, bindings: &RoleBindings) -> Result<ResidCheck> {
    let raw = RawView::bind(alg, bindings)?;
    let n = alg.size();
    let mut reports = Vec::new();

    let mut lattice = AuditReport::pass("rl/lattice-axioms");
    'lattice: for a in 0..n {
        for b in 0..n {
            if raw.join_el(a, b) != raw.join_el(b, a) {
                lattice = AuditReport::fail(
                    "rl/lattice-axioms",
                    format!("join not commutative at ({},{})", a, b),
                );
                break 'lattice;
            }
            if raw.meet_el(a, b) != raw.meet_el(b, a) {
                lattice = AuditReport::fail(
                    "rl/lattice-axioms",
                    format!("meet not commutative at ({},{})", a, b),
                );
                break 'lattice;
            }
            if raw.join_el(a, raw.meet_el(a, b)) != a || raw.meet_el(a, raw.join_el(a, b)) != a {
                lattice = AuditReport::fail(
                    "rl/lattice-axioms",
                    format!("absorption fails at ({},{})", a, b),
                );
                break 'lattice;
            }
            for c in 0..n {
                if raw.join_el(a, raw.join_el(b, c)) != raw.join_el(raw.join_el(a, b), c)
                    || raw.meet_el(a, raw.meet_el(b, c)) != raw.meet_el(raw.meet_el(a, b), c)
                {
                    lattice = AuditReport::fail(
                        "rl/lattice-axioms",
                        format!("associativity fails at ({},{},{})", a, b, c),
                    );
                    break 'lattice;
                }
            }
        }
    }
    let lattice_ok = lattice.passed();
    reports.push(lattice);

    let mut monoid = AuditReport::pass("rl/monoid-axioms");
    'monoid: for a in 0..n {
        if raw.fuse_el(a, raw.one) != a || raw.fuse_el(raw.one, a) != a {
            monoid = AuditReport::fail("rl/monoid-axioms", format!("unit fails at {}", a));
            break 'monoid;
        }
        for b in 0..n {
            for c in 0..n {
                if raw.fuse_el(a, raw.fuse_el(b, c)) != raw.fuse_el(raw.fuse_el(a, b), c) {
                    monoid = AuditReport::fail(
                        "rl/monoid-axioms",
                        format!("associativity fails at ({},{},{})", a, b, c),
                    );
                    break 'monoid;
                }
            }
        }
    }
    let monoid_ok = monoid.passed();
    reports.push(monoid);

    let mut residuation = AuditReport::pass("rl/residuation");
    if lattice_ok {
        'res: for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    let prod_le = raw.le(raw.fuse_el(a, b), c);
                    let under_le = raw.le(b, raw.under(a, c));
                    let over_le = raw.le(a, raw.over(c, b));
                    if prod_le != under_le || prod_le != over_le {
                        residuation = AuditReport::fail(
                            "rl/residuation",
                            format!(
                                "x={} y={} z={}: x·y≤z is {} but y≤x\\z is {} and x≤z/y is {}",
                                a, b, c, prod_le, under_le, over_le
                            ),
                        );
                        break 'res;
                    }
                }
            }
        }
    } else {
        residuation = AuditReport::fail("rl/residuation", "skipped: no lattice order");
    }
    let residuation_ok = residuation.passed();
    reports.push(residuation);

    if !(lattice_ok && monoid_ok && residuation_ok) {
        return Ok(ResidCheck {
            reports,
            flags: None,
        });
    }

    let integral = (0..n).all(|a| raw.le(a, raw.one));
    let commutative = (0..n).all(|a| (0..n).all(|b| raw.fuse_el(a, b) == raw.fuse_el(b, a)));
    let bounded = raw
        .zero
        .map(|z| (0..n).all(|a| raw.le(z, a)))
        .unwrap_or(false);
    let flags = Flags {
        integral,
        commutative,
        bounded,
        fl_w: integral && bounded,
        fl_e: commutative && raw.zero.is_some(),
        fl_ew: integral && bounded && commutative,
    };
    if commutative {
        // the two residuals must then coincide up to argument order
        for a in 0..n {
            for b in 0..n {
                if raw.under(a, b) != raw.over(b, a) {
                    reports.push(AuditReport::fail(
                        "rl/classification",
                        format!("commutative but a\\b ≠ b/a at ({},{})", a, b),
                    ));
                    return Ok(ResidCheck {
                        reports,
                        flags: None,
                    });
                }
            }
        }
    }
    let mut class = AuditReport::pass("rl/classification");
    class = class.with_note(format!(
        "integral={} commutative={} bounded={} fl_w={} fl_e={} fl_ew={}",
        flags.integral, flags.commutative, flags.bounded, flags.fl_w, flags.fl_e, flags.fl_ew
    ));
    reports.push(class);
    Ok(ResidCheck {
        reports,
        flags: Some(flags),
    })
}

impl<'a> ResiduatedView<'a> {
    /// Validates the axioms and builds the view; fails with the first
    /// broken axiom group.
    pub fn new(alg: &'a FiniteAlgebra, bindings: &RoleBindings) -> Result<Self> {
        let check = check_residuated_axioms(alg, bindings)?;
        let flags = match check.flags {
            Some(f) => f,
            None => {
                let first = check
                    .reports
                    .iter()
                    .find(|r| !r.passed())
                    .map(|r| format!("{}", r))
                    .unwrap_or_else(|| "axiom failure".into());
                return Err(Error::ViewNotValid(format!(
                    "a residuated lattice: {}",
                    first
                )));
            }
        };
        let raw = RawView::bind(alg, bindings)?;
        let n = alg.size();
        let mut le = vec![false; n * n];
        for a in 0..n {
            for b in 0..n {
                le[a * n + b] = raw.le(a, b);
            }
        }
        Ok(ResiduatedView {
            alg,
            join: raw.join,
            meet: raw.meet,
            fuse: raw.fuse,
            lres: raw.lres,
            rres: raw.rres,
            same_residual_symbol: raw.same_residual_symbol,
            one: raw.one,
            zero: raw.zero,
            le,
            flags,
        })
    }

    /// View from the bindings stored in the algebra file.
    pub fn of_algebra(alg: &'a FiniteAlgebra) -> Result<Self> {
        ResiduatedView::new(alg, &RoleBindings::of_algebra(alg)?)
    }

    pub fn algebra(&self) -> &'a FiniteAlgebra {
        self.alg
    }

    pub fn size(&self) -> usize {
        self.alg.size()
    }

    pub fn one(&self) -> usize {
        self.one
    }

    pub fn zero(&self) -> Option<usize> {
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

    pub fn positive_cone(&self) -> BTreeSet<usize> {
        (0..self.alg.size())
            .filter(|&a| self.le(self.one, a))
            .collect()
    }

    pub fn fuse_symbol(&self) -> &str {
        &self.alg.signature().symbols()[self.fuse].name
    }

    pub fn lres_symbol(&self) -> &str {
        &self.alg.signature().symbols()[self.lres].name
    }
}

/// A family of subsets closed under intersection, with join/meet tables.
#[derive(Debug, Clone)]
pub struct FilterFamily {
    pub sets: Vec<BTreeSet<usize>>,
    join_table: Vec<Vec<usize>>,
    meet_table: Vec<Vec<usize>>,
}

impl FilterFamily {
    pub fn build_from(mut sets: Vec<BTreeSet<usize>>) -> Self {
        sets.sort();
        sets.dedup();
        let m = sets.len();
        let mut join_table = vec![vec![0; m]; m];
        let mut meet_table = vec![vec![0; m]; m];
        for i in 0..m {
            for j in 0..m {
                let union: BTreeSet<usize> = sets[i].union(&sets[j]).copied().collect();
                // least family member containing the union
                let join = sets
                    .iter()
                    .enumerate()
                    .filter(|(_, s)| union.is_subset(s))
                    .min_by_key(|(_, s)| s.len())
                    .map(|(k, _)| k)
                    .expect("family has a top");
                join_table[i][j] = join;
                let inter: BTreeSet<usize> = sets[i].intersection(&sets[j]).copied().collect();
                meet_table[i][j] = sets
                    .iter()
                    .position(|s| *s == inter)
                    .expect("intersection closure");
            }
        }
        FilterFamily {
            sets,
            join_table,
            meet_table,
        }
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }

    pub fn position(&self, set: &BTreeSet<usize>) -> Option<usize> {
        self.sets.iter().position(|s| s == set)
    }

    pub fn join_of(&self, i: usize, j: usize) -> usize {
        self.join_table[i][j]
    }

    pub fn meet_of(&self, i: usize, j: usize) -> usize {
        self.meet_table[i][j]
    }

    pub fn covers(&self) -> Vec<(usize, usize)> {
        let lt = |i: usize, j: usize| i != j && self.sets[i].is_subset(&self.sets[j]);
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

    pub fn tables(&self) -> LatticeTables {
        LatticeTables {
            size: self.len(),
            join: self.join_table.clone(),
            meet: self.meet_table.clone(),
            labels: self.sets.iter().map(render_set).collect(),
        }
    }
}

/// Filter: contains the positive cone, closed under both modus ponens
/// directions and under meet.
pub fn is_filter(view: &ResiduatedView, set: &BTreeSet<usize>) -> bool {
    if !view.positive_cone().is_subset(set) {
        return false;
    }
    for &a in set {
        for &b in set {
            if !set.contains(&view.meet_el(a, b)) {
                return false;
            }
        }
        for b in 0..view.size() {
            if set.contains(&view.under(a, b)) && !set.contains(&b) {
                return false;
            }
            if set.contains(&view.over(b, a)) && !set.contains(&b) {
                return false;
            }
        }
    }
    true
}

/// Filter closed under the two conjugations.
pub fn is_normal_filter(view: &ResiduatedView, set: &BTreeSet<usize>) -> bool {
    if !is_filter(view, set) {
        return false;
    }
    for &a in set {
        for b in 0..view.size() {
            let left = view.under(b, view.fuse_el(a, b));
            let right = view.over(view.fuse_el(b, a), b);
            if !set.contains(&left) || !set.contains(&right) {
                return false;
            }
        }
    }
    true
}

pub fn filters(view: &ResiduatedView) -> FilterFamily {
    let n = view.size();
    let sets = (0..(1u64 << n))
        .map(|mask| {
            (0..n)
                .filter(|&e| mask & (1 << e) != 0)
                .collect::<BTreeSet<usize>>()
        })
        .filter(|s| is_filter(view, s))
        .collect();
    FilterFamily::build_from(sets)
}

pub fn normal_filters(view: &ResiduatedView) -> FilterFamily {
    let n = view.size();
    let sets = (0..(1u64 << n))
        .map(|mask| {
            (0..n)
                .filter(|&e| mask & (1 << e) != 0)
                .collect::<BTreeSet<usize>>()
        })
        .filter(|s| is_normal_filter(view, s))
        .collect();
    FilterFamily::build_from(sets)
}

/// `θ_F = {(a,b) : a\b ∈ F and b\a ∈ F}`, as a partition when the relation
/// is an equivalence.
pub fn theta_from_filter(view: &ResiduatedView, filter: &BTreeSet<usize>) -> Result<Congruence> {
    if !view.flags.integral {
        return Err(Error::ViewNotValid("integral".into()));
    }
    let n = view.size();
    let related = |a: usize, b: usize| {
        filter.contains(&view.under(a, b)) && filter.contains(&view.under(b, a))
    };
    // transitivity can fail for non-normal candidates; report rather than close
    for a in 0..n {
        for b in 0..n {
            for c in 0..n {
                if related(a, b) && related(b, c) && !related(a, c) {
                    return Err(Error::Precondition(format!(
                        "the relation of {} is not transitive at ({},{},{})",
                        render_set(filter),
                        a,
                        b,
                        c
                    )));
                }
            }
        }
    }
    let labels: Vec<usize> = (0..n)
        .map(|e| (0..=e).find(|&u| related(u, e)).unwrap())
        .collect();
    Ok(Congruence::from_labels(&labels))
}

/// The unit class of θ.
pub fn filter_from_theta(view: &ResiduatedView, theta: &Congruence) -> BTreeSet<usize> {
    theta.class_of(view.one())
}

/// Mutual-inverse order isomorphism between normal filters and
/// congruences on an integral view.
pub fn check_sec3_isomorphism(view: &ResiduatedView) -> Result<AuditReport> {
    let check = "sec3/filter-congruence-iso";
    if !view.flags.integral {
        return Err(Error::ViewNotValid(
            "integral (the non-integral correspondence is out of scope)".into(),
        ));
    }
    let family = normal_filters(view);
    let lattice = all_congruences(view.algebra());
    let mut rep = AuditReport::pass(check).with_note(NORMALITY_READING);
    rep.vacuous = view.size() == 1;
    if family.len() != lattice.len() {
        return Ok(AuditReport::fail(
            check,
            format!(
                "{} normal filters but {} congruences",
                family.len(),
                lattice.len()
            ),
        )
        .with_note(NORMALITY_READING));
    }
    for f in &family.sets {
        let theta = match theta_from_filter(view, f) {
            Ok(t) => t,
            Err(e) => {
                return Ok(AuditReport::fail(check, format!("{}", e)).with_note(NORMALITY_READING))
            }
        };
        if !theta.is_compatible(view.algebra()) {
            return Ok(AuditReport::fail(
                check,
                format!("θ_F for F={} is not a congruence", render_set(f)),
            )
            .with_note(NORMALITY_READING));
        }
        if lattice.position(&theta).is_none() {
            return Ok(AuditReport::fail(
                check,
                format!("θ_F for F={} escapes Con", render_set(f)),
            )
            .with_note(NORMALITY_READING));
        }
        if filter_from_theta(view, &theta) != *f {
            return Ok(AuditReport::fail(
                check,
                format!("round trip differs from F={}", render_set(f)),
            )
            .with_note(NORMALITY_READING));
        }
    }
    for theta in lattice.iter() {
        let f = filter_from_theta(view, theta);
        if family.position(&f).is_none() {
            return Ok(AuditReport::fail(
                check,
                format!(
                    "unit class {} of θ={} is not a normal filter",
                    render_set(&f),
                    theta.render()
                ),
            )
            .with_note(NORMALITY_READING));
        }
        match theta_from_filter(view, &f) {
            Ok(back) if back == *theta => {}
            Ok(_) => {
                return Ok(AuditReport::fail(
                    check,
                    format!("round trip differs from θ={}", theta.render()),
                )
                .with_note(NORMALITY_READING));
            }
            Err(e) => {
                return Ok(AuditReport::fail(check, e.to_string()).with_note(NORMALITY_READING))
            }
        }
    }
    // order preservation in both directions
    for f in &family.sets {
        for g in &family.sets {
            let ti = theta_from_filter(view, f)?;
            let tj = theta_from_filter(view, g)?;
            if f.is_subset(g) != ti.leq(&tj) {
                return Ok(AuditReport::fail(
                    check,
                    format!(
                        "order not preserved between {} and {}",
                        render_set(f),
                        render_set(g)
                    ),
                )
                .with_note(NORMALITY_READING));
            }
        }
    }
    Ok(rep)
}

/// The point-zero machinery of bounded commutative integral views:
/// the subtraction witness, the interval-top formula, and the
/// zero-regularity report.
pub fn zero_ideal_suite(alg: &FiniteAlgebra, max_depth: usize) -> Result<Vec<AuditReport>> {
    let bindings = RoleBindings::of_algebra(alg)?;
    let view = ResiduatedView::new(alg, &bindings)?;
    if !view.flags.fl_ew {
        return Err(Error::ViewNotValid("an FL_ew view".into()));
    }
    let zero_name = bindings.zero.clone().expect("fl_ew implies zero");
    let at_zero = alg.with_point(&zero_name)?;
    let mut out = Vec::new();

    // s(x,y) = (y -> 0) * x
    let s = Term::app(
        &bindings.fuse,
        vec![
            Term::app(
                &bindings.lres,
                vec![Term::var(crate::term::x(2)), Term::constant(&zero_name)],
            ),
            Term::var(crate::term::x(1)),
        ],
    );
    let mut witness_rep = if ideal::is_subtractive_witness(&at_zero, &s)? {
        AuditReport::pass("sec5/subtractive-witness")
    } else {
        AuditReport::fail(
            "sec5/subtractive-witness",
            format!("{} fails a subtractive identity at the zero point", s),
        )
    };
    witness_rep = witness_rep.with_note(format!("s = {}", s));
    witness_rep.vacuous = alg.size() == 1;
    out.push(witness_rep);

    // d1(x,y) = (x -> 0)·y, d2(x,y) = (y -> 0)·x: the interval-top formula
    let d: Vec<Term> = vec![
        Term::app(
            &bindings.fuse,
            vec![
                Term::app(
                    &bindings.lres,
                    vec![Term::var(crate::term::x(1)), Term::constant(&zero_name)],
                ),
                Term::var(crate::term::x(2)),
            ],
        ),
        Term::app(
            &bindings.fuse,
            vec![
                Term::app(
                    &bindings.lres,
                    vec![Term::var(crate::term::x(2)), Term::constant(&zero_name)],
                ),
                Term::var(crate::term::x(1)),
            ],
        ),
    ];
    let lattice = all_congruences(&at_zero);
    let variety = VarietyPresentation::single(at_zero.clone());
    let gamma: GammaSet = ideal::enumerate_ideal_terms(&variety, 1, 2, max_depth)?;
    let ideals: IdealLattice = ideal::ideal_lattice(&at_zero, &gamma)?;
    let mut formula = ideal::check_congruential_witness(&at_zero, &d, &lattice, &ideals)?;
    formula.check = "sec5/epsilon-formula".into();
    formula = formula.with_note(format!("d = ({}, {})", d[0], d[1]));
    out.push(formula);

    let mut regular = ideal::check_zero_regular(&at_zero, &lattice);
    regular.check = "sec5/zero-regular-at-zero".into();
    out.push(regular);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    fn view(alg: &FiniteAlgebra) -> ResiduatedView<'_> {
        ResiduatedView::of_algebra(alg).unwrap()
    }

    #[test]
    fn b2_passes_all_flags() {
        let b2 = corpus::b2();
        let check = check_residuated_axioms(&b2, &RoleBindings::of_algebra(&b2).unwrap()).unwrap();
        assert!(check.passed());
        let flags = check.flags.unwrap();
        assert!(flags.integral && flags.commutative && flags.bounded);
        assert!(flags.fl_w && flags.fl_e && flags.fl_ew);
    }

    #[test]
    fn l3_and_g3_are_flew() {
        for alg in [corpus::l3(), corpus::g3()] {
            let v = view(&alg);
            assert!(v.flags.fl_ew, "{}", alg.name());
        }
        // idempotent fuse on g3
        let g3 = corpus::g3();
        let v = view(&g3);
        for a in 0..3 {
            assert_eq!(v.fuse_el(a, a), a);
        }
    }

    #[test]
    fn broken_binding_is_rejected() {
        let z4 = corpus::z4();
        assert!(matches!(
            RoleBindings::of_algebra(&z4),
            Err(Error::MissingBinding(_))
        ));
        let mut map = BTreeMap::new();
        for (k, v) in [
            ("join", "+"),
            ("meet", "+"),
            ("fuse", "+"),
            ("lres", "+"),
            ("rres", "+"),
            ("one", "0"),
        ] {
            map.insert(k.to_string(), v.to_string());
        }
        let bindings = RoleBindings::from_map(&map).unwrap();
        let check = check_residuated_axioms(&z4, &bindings).unwrap();
        assert!(!check.passed());
        assert!(check.flags.is_none());
    }

    #[test]
    fn filter_families_of_corpus() {
        let g3 = corpus::g3();
        let fam = filters(&view(&g3));
        assert_eq!(
            fam.sets,
            vec![
                BTreeSet::from([0, 1, 2]),
                BTreeSet::from([1, 2]),
                BTreeSet::from([2]),
            ]
        );
        let l3 = corpus::l3();
        let fam = filters(&view(&l3));
        assert_eq!(
            fam.sets,
            vec![BTreeSet::from([0, 1, 2]), BTreeSet::from([2])]
        );
        let b2 = corpus::b2();
        let fam = filters(&view(&b2));
        assert_eq!(fam.sets, vec![BTreeSet::from([0, 1]), BTreeSet::from([1])]);
    }

    #[test]
    fn commutative_views_have_normal_equals_plain_filters() {
        for alg in [corpus::b2(), corpus::g3(), corpus::l3()] {
            let v = view(&alg);
            assert_eq!(filters(&v).sets, normal_filters(&v).sets);
        }
    }

    #[test]
    fn theta_filter_round_trips_on_g3() {
        let g3 = corpus::g3();
        let v = view(&g3);
        let theta = theta_from_filter(&v, &BTreeSet::from([1, 2])).unwrap();
        assert_eq!(theta.render(), "{{0},{1,2}}");
        assert_eq!(filter_from_theta(&v, &theta), BTreeSet::from([1, 2]));
        let delta = theta_from_filter(&v, &BTreeSet::from([2])).unwrap();
        assert_eq!(delta, Congruence::identity(3));
        let nabla = theta_from_filter(&v, &BTreeSet::from([0, 1, 2])).unwrap();
        assert_eq!(nabla, Congruence::full(3));
    }

    #[test]
    fn sec3_isomorphism_on_corpus() {
        for alg in [corpus::b2(), corpus::g3(), corpus::l3()] {
            let v = view(&alg);
            let rep = check_sec3_isomorphism(&v).unwrap();
            assert!(rep.passed(), "{} on {}", rep, alg.name());
        }
    }

    #[test]
    fn zero_suite_verdicts() {
        let l3 = corpus::l3();
        let reports = zero_ideal_suite(&l3, 3).unwrap();
        assert!(reports.iter().all(|r| r.passed()), "{:?}", reports);

        let b2 = corpus::b2();
        let reports = zero_ideal_suite(&b2, 3).unwrap();
        assert!(reports.iter().all(|r| r.passed()));

        // g3 is not zero-regular: two congruences share the zero class {0}
        let g3 = corpus::g3();
        let reports = zero_ideal_suite(&g3, 3).unwrap();
        let regular = reports
            .iter()
            .find(|r| r.check == "sec5/zero-regular-at-zero")
            .unwrap();
        assert!(!regular.passed());
        assert!(regular.witness.as_ref().unwrap().contains("{0}"));
        // but the witness and formula parts hold
        assert!(reports
            .iter()
            .filter(|r| r.check != "sec5/zero-regular-at-zero")
            .all(|r| r.passed()));
    }

    #[test]
    fn zero_suite_rejects_unbounded_views() {
        let z4 = corpus::z4();
        assert!(zero_ideal_suite(&z4, 2).is_err());
    }
}
