//! Assembles the per-theorem audit suites over one loaded algebra.

use std::collections::BTreeMap;

use idealkit::algebra::FiniteAlgebra;
use idealkit::congruence::{all_congruences, CongruenceLattice};
use idealkit::error::Error;
use idealkit::ideal::{self, GammaSet, IdealLattice};
use idealkit::operators::{self, OperatorAlgebra};
use idealkit::quasi;
use idealkit::report::AuditReport;
use idealkit::residuated::{self, ResiduatedView, RoleBindings};
use idealkit::term::Term;
use idealkit::variety::VarietyPresentation;

pub const THEOREMS: [&str; 12] = [
    "lemma1",
    "thm2",
    "cormain",
    "maincon",
    "gummursini",
    "special",
    "sec3-iso",
    "prop35",
    "prop36",
    "sec5",
    "sec6-1",
    "sec6-2",
];

/// Search and enumeration bounds, all pinned by flags so runs are
/// reproducible.
#[derive(Debug, Clone, Copy)]
pub struct Bounds {
    pub depth: usize,
    pub max_n: usize,
    pub poly_depth: usize,
    pub n_x: usize,
    pub n_y: usize,
}

impl Default for Bounds {
    fn default() -> Self {
        Bounds {
            depth: 3,
            max_n: 2,
            poly_depth: 4,
            n_x: 1,
            n_y: 2,
        }
    }
}

fn skip(theorem: &str, why: &str) -> AuditReport {
    AuditReport::vacuous_pass(format!("{}/not-applicable", theorem)).with_note(why.to_string())
}

pub struct Prepared {
    lattice: CongruenceLattice,
    gamma: GammaSet,
    ideals: IdealLattice,
}

fn prepared<'c>(
    alg: &FiniteAlgebra,
    bounds: Bounds,
    cache: &'c mut Option<Prepared>,
) -> Result<&'c Prepared, Error> {
    if cache.is_none() {
        let variety = VarietyPresentation::single(alg.clone());
        let gamma = ideal::enumerate_ideal_terms(&variety, bounds.n_x, bounds.n_y, bounds.depth)?;
        let ideals = ideal::ideal_lattice(alg, &gamma)?;
        *cache = Some(Prepared {
            lattice: all_congruences(alg),
            gamma,
            ideals,
        });
    }
    Ok(cache.as_ref().unwrap())
}

/// Symbols of the algebra not bound to any lattice/monoid role. The pure
/// residuated and quasi audits only apply when there are none; expansions
/// are covered by the operator-filter audits instead.
fn unbound_symbols(alg: &FiniteAlgebra) -> Vec<String> {
    let bound: std::collections::BTreeSet<&String> = alg.bindings().values().collect();
    alg.signature()
        .symbols()
        .iter()
        .map(|s| s.name.clone())
        .filter(|name| !bound.contains(name))
        .collect()
}

fn skip_expansion(alg: &FiniteAlgebra, theorem: &str) -> Option<AuditReport> {
    if alg.bindings().is_empty() {
        return None; // reported as missing bindings instead
    }
    let extra = unbound_symbols(alg);
    if extra.is_empty() {
        None
    } else {
        Some(skip(
            theorem,
            &format!(
                "operations outside the bound roles ({}); expansions are audited through the operator-filter checks",
                extra.join(", ")
            ),
        ))
    }
}

/// Runs one named audit; `terms` supplies the subvariety term pool for the
/// `special` audit. The congruence/ideal context is computed once per
/// algebra and shared through `cache`.
pub fn run_theorem(
    alg: &FiniteAlgebra,
    theorem: &str,
    bounds: Bounds,
    terms: Option<&Vec<Term>>,
    cache: &mut Option<Prepared>,
) -> Result<Vec<AuditReport>, Error> {
    let variety = VarietyPresentation::single(alg.clone());
    match theorem {
        "lemma1" => {
            let p = prepared(alg, bounds, cache)?;
            Ok(vec![
                p.gamma.verify_over(&variety)?,
                ideal::check_intersection_closure(alg, &p.gamma, &p.ideals)?,
                ideal::check_one_step_vs_fixpoint(alg, &p.gamma)?,
                ideal::check_point_classes_are_ideals(alg, &p.gamma, &p.lattice)?,
            ])
        }
        "thm2" => {
            let s = match ideal::find_subtractive_witness(&variety, bounds.depth)? {
                Some(s) => s,
                None => {
                    return Ok(vec![skip(
                        "thm2",
                        &format!(
                        "no subtractive witness within depth {}; equivalent conditions unchecked",
                        bounds.depth
                    ),
                    )])
                }
            };
            let p = prepared(alg, bounds, cache)?;
            let mut witness_rep =
                AuditReport::pass("thm2/subtractive-witness").with_note(format!("s = {}", s));
            witness_rep.vacuous = alg.size() == 1;
            let mut out = vec![witness_rep];
            out.extend(ideal::check_subtractive_equivalents(
                alg, &s, &p.lattice, &p.ideals,
            )?);
            Ok(out)
        }
        "cormain" => {
            if ideal::find_subtractive_witness(&variety, bounds.depth)?.is_none() {
                return Ok(vec![skip(
                    "cormain",
                    &format!("no subtractive witness within depth {}", bounds.depth),
                )]);
            }
            let p = prepared(alg, bounds, cache)?;
            Ok(vec![
                ideal::check_modularity(&p.ideals.tables()),
                ideal::check_normal_ideals(alg, &p.lattice, &p.ideals),
            ])
        }
        "maincon" => {
            let p = prepared(alg, bounds, cache)?;
            let d = match ideal::find_congruential_witness(
                alg,
                &p.lattice,
                &p.ideals,
                bounds.max_n,
                bounds.depth,
            )? {
                Some(d) => d,
                None => {
                    return Ok(vec![skip(
                        "maincon",
                        &format!(
                            "no congruential witness within depth {} and length {}",
                            bounds.depth, bounds.max_n
                        ),
                    )])
                }
            };
            let rendered: Vec<String> = d.iter().map(|t| t.to_string()).collect();
            let mut out = vec![
                ideal::check_congruential_witness(alg, &d, &p.lattice, &p.ideals)?
                    .with_note(format!("d = ({})", rendered.join(", "))),
            ];
            out.push(ideal::check_epsilon_monotone(alg, &p.lattice, &p.ideals));
            out.push(ideal::check_interval_structure(alg, &p.lattice, &p.ideals));
            match ideal::find_maincon3_q(alg, &d, bounds.depth)? {
                Some(q) => {
                    let mut r: BTreeMap<(String, usize), Term> = BTreeMap::new();
                    let point = Term::constant(alg.signature().point_name());
                    for sym in alg.signature().symbols() {
                        if sym.arity == 0 {
                            continue;
                        }
                        for i in 1..=d.len() {
                            r.insert((sym.name.clone(), i), point.clone());
                        }
                    }
                    out.push(
                        ideal::check_maincon3(alg, &d, &q, &r)?
                            .with_note(format!("q = {}", q))
                            .with_note("r-terms taken as the constant point"),
                    );
                }
                None => out.push(skip(
                    "maincon",
                    &format!("no recovery term within depth {}", bounds.depth),
                )),
            }
            Ok(out)
        }
        "gummursini" => {
            let p = prepared(alg, bounds, cache)?;
            Ok(vec![
                ideal::check_zero_regular(alg, &p.lattice),
                ideal::check_ideal_determined(
                    alg,
                    &p.lattice,
                    &p.ideals,
                    bounds.depth,
                    bounds.max_n,
                )?,
            ])
        }
        "special" => {
            let p = prepared(alg, bounds, cache)?;
            let d = match ideal::find_congruential_witness(
                alg,
                &p.lattice,
                &p.ideals,
                bounds.max_n,
                bounds.depth,
            )? {
                Some(d) => d,
                None => {
                    return Ok(vec![skip(
                        "special",
                        &format!(
                            "no congruential witness within depth {} and length {}",
                            bounds.depth, bounds.max_n
                        ),
                    )])
                }
            };
            let pools: Vec<(String, Vec<Term>)> = match terms {
                Some(ts) => vec![("terms-file".to_string(), ts.clone())],
                None => default_pools(alg),
            };
            if pools.is_empty() {
                return Ok(vec![skip(
                    "special",
                    "no term pool applies to this signature; pass --terms",
                )]);
            }
            let mut out = Vec::new();
            for (name, pool) in pools {
                let mut rep =
                    ideal::check_lemma_special(alg, &d, &p.lattice, &p.ideals, None, &pool)?;
                rep.check = format!("special/t-special-quotient({})", name);
                out.push(rep);
            }
            Ok(out)
        }
        "sec3-iso" => {
            if let Some(rep) = skip_expansion(alg, "sec3-iso") {
                return Ok(vec![rep]);
            }
            match ResiduatedView::of_algebra(alg) {
                Ok(view) => {
                    if view.flags.integral {
                        Ok(vec![residuated::check_sec3_isomorphism(&view)?])
                    } else {
                        Ok(vec![skip(
                            "sec3-iso",
                            "non-integral view: the correspondence is out of scope",
                        )])
                    }
                }
                Err(Error::MissingBinding(_)) => Ok(vec![skip(
                    "sec3-iso",
                    "no residuated bindings in the algebra file",
                )]),
                Err(e) => Ok(vec![AuditReport::fail(
                    "sec3/filter-congruence-iso",
                    e.to_string(),
                )]),
            }
        }
        "prop35" => match OperatorAlgebra::of_algebra(alg) {
            Ok(opalg) => {
                let mut out = operators::check_all_operators_normal(&opalg);
                out.push(operators::check_prop35(&opalg));
                Ok(out)
            }
            Err(Error::MissingBinding(_)) => Ok(vec![skip(
                "prop35",
                "no residuated bindings in the algebra file",
            )]),
            Err(Error::ViewNotValid(v)) => Ok(vec![skip("prop35", &format!("view is not {}", v))]),
            Err(e) => Err(e),
        },
        "prop36" => match OperatorAlgebra::of_algebra(alg) {
            Ok(opalg) => Ok(vec![
                operators::check_generation_lemma(&opalg, bounds.poly_depth),
                operators::check_filter_join_formula(
                    &opalg.view,
                    &operators::operator_filters(&opalg),
                ),
            ]),
            Err(Error::MissingBinding(_)) => Ok(vec![skip(
                "prop36",
                "no residuated bindings in the algebra file",
            )]),
            Err(Error::ViewNotValid(v)) => Ok(vec![skip("prop36", &format!("view is not {}", v))]),
            Err(e) => Err(e),
        },
        "sec5" => {
            if let Some(rep) = skip_expansion(alg, "sec5") {
                return Ok(vec![rep]);
            }
            match residuated::zero_ideal_suite(alg, bounds.depth) {
                Ok(reports) => Ok(reports),
                Err(Error::MissingBinding(_)) => Ok(vec![skip(
                    "sec5",
                    "no residuated bindings in the algebra file",
                )]),
                Err(Error::ViewNotValid(v)) => {
                    Ok(vec![skip("sec5", &format!("view is not {}", v))])
                }
                Err(e) => Err(e),
            }
        }
        "sec6-1" | "sec6-2" => {
            if let Some(rep) = skip_expansion(alg, theorem) {
                return Ok(vec![rep]);
            }
            let bindings = match RoleBindings::of_algebra(alg) {
                Ok(b) => b,
                Err(Error::MissingBinding(_)) => {
                    return Ok(vec![skip(
                        theorem,
                        "no residuated bindings in the algebra file",
                    )])
                }
                Err(e) => return Err(e),
            };
            if bindings.zero.is_none() {
                return Ok(vec![skip(theorem, "no zero binding in the algebra file")]);
            }
            let check = quasi::check_quasi_axioms(alg, &bindings)?;
            let view = match check.view {
                Some(v) => v,
                None => {
                    return Ok(vec![skip(
                        theorem,
                        &format!(
                            "not a quasi view: {}",
                            check
                                .reports
                                .iter()
                                .find(|r| !r.passed())
                                .map(|r| r.to_string())
                                .unwrap_or_default()
                        ),
                    )])
                }
            };
            let lattice = all_congruences(alg);
            if theorem == "sec6-1" {
                let (mut reports, _) = quasi::regular_core(&view);
                reports.push(quasi::check_regular_sublattice(&view, &lattice));
                reports.push(quasi::theorem_audit_61(&view, &lattice));
                Ok(reports)
            } else {
                Ok(vec![quasi::theorem_audit_62(&view, &lattice)])
            }
        }
        _ => Err(Error::Precondition(format!(
            "unknown theorem id `{}`",
            theorem
        ))),
    }
}

/// Bundled subvariety term pools, usable whenever the signature has the
/// bounded commutative symbols they mention.
fn default_pools(alg: &FiniteAlgebra) -> Vec<(String, Vec<Term>)> {
    let mut pools = Vec::new();
    for (name, term) in idealkit::corpus::term_pools() {
        let applies = term_symbols(&term)
            .iter()
            .all(|s| alg.signature().index_of(s).is_some());
        if applies {
            pools.push((name.to_string(), vec![term]));
        }
    }
    pools
}

fn term_symbols(term: &Term) -> Vec<String> {
    let mut out = Vec::new();
    fn rec(t: &Term, out: &mut Vec<String>) {
        if let Term::App(sym, args) = t {
            out.push(sym.clone());
            for a in args {
                rec(a, out);
            }
        }
    }
    rec(term, &mut out);
    out.sort();
    out.dedup();
    out
}
