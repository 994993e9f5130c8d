//! Normal operators on commutative integral residuated views: extra
//! operations whose unary slices fix the unit and sub-distribute over the
//! implication. Filters of the expansion are the operator-closed filters
//! of the reduct, with an explicit generation formula.

use std::collections::BTreeSet;

use crate::algebra::{tuples, FiniteAlgebra};
use crate::congruence::all_congruences;
use crate::error::{Error, Result};
use crate::ideal::render_set;
use crate::report::AuditReport;
use crate::residuated::{filters, FilterFamily, ResiduatedView, RoleBindings};

/// A commutative integral residuated view plus the non-role symbols,
/// treated as extra operators.
pub struct OperatorAlgebra<'a> {
    pub view: ResiduatedView<'a>,
    /// Symbol indices of the extra operations (anything not bound to a
    /// lattice/monoid role and not a bound constant).
    pub operators: Vec<usize>,
}

impl<'a> OperatorAlgebra<'a> {
    pub fn new(alg: &'a FiniteAlgebra, bindings: &RoleBindings) -> Result<Self> {
        let view = ResiduatedView::new(alg, bindings)?;
        if !view.flags.commutative || !view.flags.integral {
            return Err(Error::ViewNotValid(
                "a commutative integral residuated lattice".into(),
            ));
        }
        let mut role_names: BTreeSet<&str> = BTreeSet::new();
        for name in [
            bindings.join.as_str(),
            bindings.meet.as_str(),
            bindings.fuse.as_str(),
            bindings.lres.as_str(),
            bindings.rres.as_str(),
            bindings.one.as_str(),
        ] {
            role_names.insert(name);
        }
        if let Some(z) = &bindings.zero {
            role_names.insert(z);
        }
        let operators = alg
            .signature()
            .symbols()
            .iter()
            .enumerate()
            .filter(|(_, sym)| !role_names.contains(sym.name.as_str()))
            .map(|(i, _)| i)
            .collect();
        Ok(OperatorAlgebra { view, operators })
    }

    pub fn of_algebra(alg: &'a FiniteAlgebra) -> Result<Self> {
        OperatorAlgebra::new(alg, &RoleBindings::of_algebra(alg)?)
    }

    pub fn algebra(&self) -> &'a FiniteAlgebra {
        self.view.algebra()
    }

    pub fn operator_names(&self) -> Vec<String> {
        self.operators
            .iter()
            .map(|&i| self.algebra().signature().symbols()[i].name.clone())
            .collect()
    }
}

/// Every unary slice fixes the unit and sub-distributes over the
/// implication; the derived fact that slices are monotone is checked too.
pub fn check_normal_operator(view: &ResiduatedView, sym: usize) -> AuditReport {
    let alg = view.algebra();
    let name = &alg.signature().symbols()[sym].name;
    let check = format!("sec4/normal-operator({})", name);
    let k = alg.arity(sym);
    let n = alg.size();
    let one = view.one();
    if k == 0 {
        return AuditReport::pass(check).with_note("nullary: no slices to check");
    }
    for pos in 0..k {
        for params in tuples(n, k - 1) {
            let slice = |v: usize| {
                let mut args = Vec::with_capacity(k);
                args.extend_from_slice(&params[..pos]);
                args.push(v);
                args.extend_from_slice(&params[pos..]);
                alg.apply(sym, &args)
            };
            if slice(one) != one {
                return AuditReport::fail(
                    check,
                    format!(
                        "slice at position {} with parameters {:?} sends 1 to {}",
                        pos,
                        params,
                        slice(one)
                    ),
                );
            }
            for a in 0..n {
                for b in 0..n {
                    let lhs = slice(view.under(a, b));
                    let rhs = view.under(slice(a), slice(b));
                    if !view.le(lhs, rhs) {
                        return AuditReport::fail(
                            check,
                            format!(
                                "h(a→b) ≤ h(a)→h(b) fails at position {} params {:?} a={} b={}",
                                pos, params, a, b
                            ),
                        );
                    }
                    if view.le(a, b) && !view.le(slice(a), slice(b)) {
                        return AuditReport::fail(
                            check,
                            format!(
                                "slice not increasing at position {} params {:?} a={} b={}",
                                pos, params, a, b
                            ),
                        );
                    }
                }
            }
        }
    }
    AuditReport::pass(check)
}

pub fn check_all_operators_normal(opalg: &OperatorAlgebra) -> Vec<AuditReport> {
    opalg
        .operators
        .iter()
        .map(|&sym| check_normal_operator(&opalg.view, sym))
        .collect()
}

fn closed_under_operators(opalg: &OperatorAlgebra, set: &BTreeSet<usize>) -> bool {
    let alg = opalg.algebra();
    let members: Vec<usize> = set.iter().copied().collect();
    for &sym in &opalg.operators {
        let k = alg.arity(sym);
        for idx in tuples(members.len(), k) {
            let args: Vec<usize> = idx.iter().map(|&i| members[i]).collect();
            if !set.contains(&alg.apply(sym, &args)) {
                return false;
            }
        }
    }
    true
}

/// Filters of the reduct that are closed under every operator.
pub fn operator_filters(opalg: &OperatorAlgebra) -> FilterFamily {
    let reduct = filters(&opalg.view);
    let sets = reduct
        .sets
        .into_iter()
        .filter(|s| closed_under_operators(opalg, s))
        .collect::<Vec<_>>();
    FilterFamily::build_from(sets)
}

/// The operator filters are exactly the unit classes of the congruences
/// of the expanded algebra.
pub fn check_prop35(opalg: &OperatorAlgebra) -> AuditReport {
    let check = "prop35/operator-filters";
    let fam = operator_filters(opalg);
    let lattice = all_congruences(opalg.algebra());
    let classes: BTreeSet<BTreeSet<usize>> = lattice
        .iter()
        .map(|t| t.class_of(opalg.view.one()))
        .collect();
    let sets: BTreeSet<BTreeSet<usize>> = fam.sets.iter().cloned().collect();
    if classes == sets {
        let mut r = AuditReport::pass(check);
        r.vacuous = opalg.algebra().size() == 1;
        r
    } else {
        let missing: Vec<String> = sets.difference(&classes).map(render_set).collect();
        let extra: Vec<String> = classes.difference(&sets).map(render_set).collect();
        AuditReport::fail(
            check,
            format!(
                "operator filters without a congruence: [{}]; unit classes outside: [{}]",
                missing.join(" "),
                extra.join(" ")
            ),
        )
    }
}

/// Least operator filter containing `seed`: fixpoint under upward
/// closure, meet, modus ponens and operator images.
pub fn generate_operator_filter(
    opalg: &OperatorAlgebra,
    seed: &BTreeSet<usize>,
) -> BTreeSet<usize> {
    let view = &opalg.view;
    let alg = opalg.algebra();
    let n = view.size();
    let mut current = seed.clone();
    current.insert(view.one());
    loop {
        let mut next = current.clone();
        let members: Vec<usize> = current.iter().copied().collect();
        for &a in &members {
            for b in 0..n {
                if view.le(a, b) {
                    next.insert(b);
                }
                if current.contains(&view.under(a, b)) {
                    next.insert(b);
                }
            }
            for &b in &members {
                next.insert(view.meet_el(a, b));
            }
        }
        for &sym in &opalg.operators {
            let k = alg.arity(sym);
            for idx in tuples(members.len(), k) {
                let args: Vec<usize> = idx.iter().map(|&i| members[i]).collect();
                next.insert(alg.apply(sym, &args));
            }
        }
        if next == current {
            return current;
        }
        current = next;
    }
}

/// Unary polynomials built from the operators alone: the identity, and
/// `w ↦ f(c̄, p(w), c̄')` for operators `f`, constant parameters and
/// already-built `p`. Deduplicated as functions, bounded by composition
/// depth.
fn operator_polynomials(opalg: &OperatorAlgebra, depth: usize) -> Vec<Vec<usize>> {
    let alg = opalg.algebra();
    let n = alg.size();
    let identity: Vec<usize> = (0..n).collect();
    let mut polys = vec![identity];
    let mut seen: BTreeSet<Vec<usize>> = polys.iter().cloned().collect();
    for _ in 0..depth {
        let mut fresh = Vec::new();
        for p in &polys {
            for &sym in &opalg.operators {
                let k = alg.arity(sym);
                if k == 0 {
                    continue;
                }
                for pos in 0..k {
                    for params in tuples(n, k - 1) {
                        let table: Vec<usize> = (0..n)
                            .map(|w| {
                                let mut args = Vec::with_capacity(k);
                                args.extend_from_slice(&params[..pos]);
                                args.push(p[w]);
                                args.extend_from_slice(&params[pos..]);
                                alg.apply(sym, &args)
                            })
                            .collect();
                        if seen.insert(table.clone()) {
                            fresh.push(table);
                        }
                    }
                }
            }
        }
        if fresh.is_empty() {
            break;
        }
        polys.extend(fresh);
    }
    polys
}

/// The generation formula: `a` is in the filter generated by `X` iff some
/// product `(p1(b1)∧1)…(pk(bk)∧1)` with `bi ∈ X` and polynomials `pi` lies
/// below `a`. The empty product is the unit. Audited against the fixpoint
/// for every seed.
pub fn check_generation_lemma(opalg: &OperatorAlgebra, poly_depth: usize) -> AuditReport {
    let check = "prop36/generation-formula";
    let view = &opalg.view;
    let n = view.size();
    let polys = operator_polynomials(opalg, poly_depth);
    for mask in 0..(1u64 << n) {
        let seed: BTreeSet<usize> = (0..n).filter(|&e| mask & (1 << e) != 0).collect();
        let fixpoint = generate_operator_filter(opalg, &seed);
        // multiplicative closure of the witness factors, then upward closure
        let mut factors: BTreeSet<usize> = BTreeSet::new();
        factors.insert(view.one()); // empty product
        for &b in &seed {
            for p in &polys {
                factors.insert(view.meet_el(p[b], view.one()));
            }
        }
        let mut products = factors.clone();
        loop {
            let mut next = products.clone();
            for &a in &products {
                for &f in &factors {
                    next.insert(view.fuse_el(a, f));
                }
            }
            if next == products {
                break;
            }
            products = next;
        }
        let witness_set: BTreeSet<usize> = (0..n)
            .filter(|&a| products.iter().any(|&m| view.le(m, a)))
            .collect();
        if witness_set != fixpoint {
            let sound = witness_set.is_subset(&fixpoint);
            return AuditReport::fail(
                check,
                format!(
                    "seed {}: witness characterization {} vs fixpoint {}{}",
                    render_set(&seed),
                    render_set(&witness_set),
                    render_set(&fixpoint),
                    if sound {
                        " (witness set is sound but incomplete at this depth)"
                    } else {
                        ""
                    }
                ),
            )
            .with_note(format!("polynomial depth {}", poly_depth));
        }
    }
    let mut r = AuditReport::pass(check).with_note(format!("polynomial depth {}", poly_depth));
    r.vacuous = opalg.algebra().size() == 1;
    r
}

/// `F ∨ G = {c : a·b ≤ c for some a ∈ F, b ∈ G}`.
pub fn filter_join(
    view: &ResiduatedView,
    f: &BTreeSet<usize>,
    g: &BTreeSet<usize>,
) -> BTreeSet<usize> {
    let n = view.size();
    (0..n)
        .filter(|&c| {
            f.iter()
                .any(|&a| g.iter().any(|&b| view.le(view.fuse_el(a, b), c)))
        })
        .collect()
}

/// The join formula agrees with the lattice join for every pair in the
/// family.
pub fn check_filter_join_formula(view: &ResiduatedView, family: &FilterFamily) -> AuditReport {
    let check = "prop36/filter-join-formula";
    for i in 0..family.len() {
        for j in 0..family.len() {
            let formula = filter_join(view, &family.sets[i], &family.sets[j]);
            let lattice = &family.sets[family.join_of(i, j)];
            if formula != *lattice {
                return AuditReport::fail(
                    check,
                    format!(
                        "F={} G={}: formula {} but lattice join {}",
                        render_set(&family.sets[i]),
                        render_set(&family.sets[j]),
                        render_set(&formula),
                        render_set(lattice)
                    ),
                );
            }
        }
    }
    let mut r = AuditReport::pass(check);
    r.vacuous = family.len() <= 1;
    r
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;

    #[test]
    fn delta_and_double_negation_are_normal_on_g3() {
        let gd = corpus::g3_delta();
        let opalg = OperatorAlgebra::of_algebra(&gd).unwrap();
        assert_eq!(opalg.operator_names(), vec!["d"]);
        for rep in check_all_operators_normal(&opalg) {
            assert!(rep.passed(), "{}", rep);
        }
        let gn = corpus::g3_dneg();
        let opalg = OperatorAlgebra::of_algebra(&gn).unwrap();
        for rep in check_all_operators_normal(&opalg) {
            assert!(rep.passed(), "{}", rep);
        }
    }

    #[test]
    fn constant_zero_operator_is_not_normal() {
        let mut alg = corpus::g3_delta();
        // rewrite the d table to the constant 0 map
        let json = {
            let mut v = alg.to_json();
            v["operations"][6]["table"] = serde_json::json!([0, 0, 0]);
            v["name"] = serde_json::json!("g3_const0");
            serde_json::to_string(&v).unwrap()
        };
        alg = crate::algebra::algebra_from_json(&json).unwrap();
        let opalg = OperatorAlgebra::of_algebra(&alg).unwrap();
        let reports = check_all_operators_normal(&opalg);
        assert!(!reports[0].passed());
        assert!(reports[0].witness.as_ref().unwrap().contains("sends 1"));
    }

    #[test]
    fn operator_filters_of_g3_delta_lose_the_middle_filter() {
        let gd = corpus::g3_delta();
        let opalg = OperatorAlgebra::of_algebra(&gd).unwrap();
        let fam = operator_filters(&opalg);
        assert_eq!(
            fam.sets,
            vec![BTreeSet::from([0, 1, 2]), BTreeSet::from([2])]
        );
        let gn = corpus::g3_dneg();
        let opalg = OperatorAlgebra::of_algebra(&gn).unwrap();
        assert_eq!(operator_filters(&opalg).len(), 3);
    }

    #[test]
    fn identity_operator_keeps_the_reduct_filters() {
        let mut json = corpus::g3_delta().to_json();
        json["operations"][6]["table"] = serde_json::json!([0, 1, 2]);
        json["operations"][6]["symbol"] = serde_json::json!("id");
        json["name"] = serde_json::json!("g3_id");
        let alg =
            crate::algebra::algebra_from_json(&serde_json::to_string(&json).unwrap()).unwrap();
        let opalg = OperatorAlgebra::of_algebra(&alg).unwrap();
        assert!(check_all_operators_normal(&opalg)
            .iter()
            .all(|r| r.passed()));
        assert_eq!(operator_filters(&opalg).sets, filters(&opalg.view).sets);
    }

    #[test]
    fn prop35_on_corpus_operator_algebras() {
        for alg in [corpus::g3_delta(), corpus::g3_dneg()] {
            let opalg = OperatorAlgebra::of_algebra(&alg).unwrap();
            let rep = check_prop35(&opalg);
            assert!(rep.passed(), "{} on {}", rep, alg.name());
        }
    }

    #[test]
    fn generation_examples() {
        let gd = corpus::g3_delta();
        let opalg = OperatorAlgebra::of_algebra(&gd).unwrap();
        assert_eq!(
            generate_operator_filter(&opalg, &BTreeSet::from([1])),
            BTreeSet::from([0, 1, 2])
        );
        assert_eq!(
            generate_operator_filter(&opalg, &BTreeSet::new()),
            BTreeSet::from([2])
        );
        // no operators: plain filter generation
        let g3 = corpus::g3();
        let opalg = OperatorAlgebra::of_algebra(&g3).unwrap();
        assert!(opalg.operators.is_empty());
        assert_eq!(
            generate_operator_filter(&opalg, &BTreeSet::from([1])),
            BTreeSet::from([1, 2])
        );
    }

    #[test]
    fn generation_lemma_audit_passes_at_depth_four() {
        for alg in [
            corpus::g3(),
            corpus::g3_delta(),
            corpus::g3_dneg(),
            corpus::b2(),
            corpus::l3(),
        ] {
            let opalg = OperatorAlgebra::of_algebra(&alg).unwrap();
            let rep = check_generation_lemma(&opalg, 4);
            assert!(rep.passed(), "{} on {}", rep, alg.name());
        }
    }

    #[test]
    fn filter_join_examples() {
        let g3 = corpus::g3();
        let view = ResiduatedView::of_algebra(&g3).unwrap();
        assert_eq!(
            filter_join(&view, &BTreeSet::from([2]), &BTreeSet::from([1, 2])),
            BTreeSet::from([1, 2])
        );
        let f = BTreeSet::from([1, 2]);
        assert_eq!(filter_join(&view, &f, &f), f);
        assert_eq!(
            filter_join(&view, &BTreeSet::from([2]), &BTreeSet::from([0, 1, 2])),
            BTreeSet::from([0, 1, 2])
        );
        let fam = filters(&view);
        assert!(check_filter_join_formula(&view, &fam).passed());
    }
}
