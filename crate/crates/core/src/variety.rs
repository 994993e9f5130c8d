//! Varieties presented by finite generator algebras.
//!
//! An identity holds in the generated variety iff it holds in every
//! generator, so checking on the presentation is checking the variety.

use std::collections::BTreeSet;

use crate::algebra::{tuples, FiniteAlgebra};
use crate::enumerate;
use crate::error::{Error, Result};
use crate::report::AuditReport;
use crate::term::{Assignment, Term, Var};

#[derive(Debug, Clone)]
pub struct VarietyPresentation {
    generators: Vec<FiniteAlgebra>,
}

impl VarietyPresentation {
    pub fn new(generators: Vec<FiniteAlgebra>) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::EmptyVariety);
        }
        let sig = generators[0].signature().clone();
        if generators.iter().any(|g| *g.signature() != sig) {
            return Err(Error::SignatureMismatch);
        }
        Ok(VarietyPresentation { generators })
    }

    pub fn single(alg: FiniteAlgebra) -> Self {
        VarietyPresentation {
            generators: vec![alg],
        }
    }

    pub fn generators(&self) -> &[FiniteAlgebra] {
        &self.generators
    }

    fn joint_vars(terms: &[&Term]) -> Vec<Var> {
        let mut vars = BTreeSet::new();
        for t in terms {
            vars.extend(t.free_vars());
        }
        vars.into_iter().collect()
    }

    /// First assignment (by generator, then lexicographic tuple) where the
    /// two sides differ; `None` when the identity holds everywhere.
    pub fn identity_counterexample(
        &self,
        lhs: &Term,
        rhs: &Term,
    ) -> Result<Option<(usize, Assignment)>> {
        let vars = Self::joint_vars(&[lhs, rhs]);
        for (gi, g) in self.generators.iter().enumerate() {
            for tuple in tuples(g.size(), vars.len()) {
                let a = Assignment::from_tuple(&vars, &tuple);
                if g.eval(lhs, &a)? != g.eval(rhs, &a)? {
                    return Ok(Some((gi, a)));
                }
            }
        }
        Ok(None)
    }

    /// Does `lhs ≈ rhs` hold in the presented variety?
    pub fn satisfies_identity(&self, lhs: &Term, rhs: &Term) -> Result<AuditReport> {
        let check = format!("identity {} ≈ {}", lhs, rhs);
        Ok(match self.identity_counterexample(lhs, rhs)? {
            None => AuditReport::pass(check),
            Some((gi, a)) => AuditReport::fail(
                check,
                format!("fails on {} at {}", self.generators[gi].name(), a),
            ),
        })
    }

    pub fn quasi_identity_counterexample(
        &self,
        premises: &[(Term, Term)],
        conclusion: &(Term, Term),
    ) -> Result<Option<(usize, Assignment)>> {
        let mut all: Vec<&Term> = Vec::new();
        for (l, r) in premises {
            all.push(l);
            all.push(r);
        }
        all.push(&conclusion.0);
        all.push(&conclusion.1);
        let vars = Self::joint_vars(&all);
        for (gi, g) in self.generators.iter().enumerate() {
            'tuple: for tuple in tuples(g.size(), vars.len()) {
                let a = Assignment::from_tuple(&vars, &tuple);
                for (l, r) in premises {
                    if g.eval(l, &a)? != g.eval(r, &a)? {
                        continue 'tuple;
                    }
                }
                if g.eval(&conclusion.0, &a)? != g.eval(&conclusion.1, &a)? {
                    return Ok(Some((gi, a)));
                }
            }
        }
        Ok(None)
    }

    /// Does every assignment satisfying all premises satisfy the
    /// conclusion?
    pub fn satisfies_quasi_identity(
        &self,
        premises: &[(Term, Term)],
        conclusion: &(Term, Term),
    ) -> Result<AuditReport> {
        let check = format!(
            "quasi-identity [{}] ⇒ {} ≈ {}",
            premises
                .iter()
                .map(|(l, r)| format!("{} ≈ {}", l, r))
                .collect::<Vec<_>>()
                .join(", "),
            conclusion.0,
            conclusion.1
        );
        Ok(
            match self.quasi_identity_counterexample(premises, conclusion)? {
                None => AuditReport::pass(check),
                Some((gi, a)) => AuditReport::fail(
                    check,
                    format!("fails on {} at {}", self.generators[gi].name(), a),
                ),
            },
        )
    }

    /// Behaviorally-distinct terms over `vars` up to `max_depth`,
    /// deduplicated on the generators.
    pub fn enumerate_terms(&self, vars: &[Var], max_depth: usize) -> Result<Vec<Term>> {
        enumerate::enumerate_terms(&self.generators, vars, max_depth)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus;
    use crate::term::{x, y};

    #[test]
    fn mixed_signatures_are_rejected() {
        let err = VarietyPresentation::new(vec![corpus::g3(), corpus::z4()]);
        assert!(matches!(err, Err(crate::error::Error::SignatureMismatch)));
        assert!(VarietyPresentation::new(vec![]).is_err());
    }

    #[test]
    fn subtractive_identity_of_l3_at_zero() {
        let v = VarietyPresentation::single(corpus::l3());
        let s: Term = "*(->(y1,0),x1)".parse().unwrap(); // s(x,y) = (y -> 0) * x
        let sxx = {
            use std::collections::BTreeMap;
            let mut m = BTreeMap::new();
            m.insert(y(1), Term::var(x(1)));
            s.substitute(&m)
        };
        let zero = Term::constant("0");
        assert!(v.satisfies_identity(&sxx, &zero).unwrap().passed());
    }

    #[test]
    fn reflexive_identity_passes() {
        let v = VarietyPresentation::single(corpus::z4());
        let t = Term::var(x(1));
        assert!(v.satisfies_identity(&t, &t).unwrap().passed());
    }

    #[test]
    fn double_negation_fails_on_g3_with_witness() {
        let v = VarietyPresentation::single(corpus::g3());
        let lhs: Term = "->(->(->(x1,0),0),x1)".parse().unwrap();
        let rhs = Term::constant("1");
        let report = v.satisfies_identity(&lhs, &rhs).unwrap();
        assert!(!report.passed());
        assert_eq!(report.witness.unwrap(), "fails on g3 at {x1=1}");
    }

    #[test]
    fn chain_antisymmetry_as_quasi_identity() {
        let v = VarietyPresentation::single(corpus::g3());
        let xy: Term = "->(x1,x2)".parse().unwrap();
        let yx: Term = "->(x2,x1)".parse().unwrap();
        let one = Term::constant("1");
        let premises = vec![(xy, one.clone()), (yx, one)];
        let conclusion = (Term::var(x(1)), Term::var(x(2)));
        assert!(v
            .satisfies_quasi_identity(&premises, &conclusion)
            .unwrap()
            .passed());
    }

    #[test]
    fn empty_premises_reflexive_conclusion() {
        let v = VarietyPresentation::single(corpus::g3());
        let conclusion = (Term::var(x(1)), Term::var(x(1)));
        assert!(v
            .satisfies_quasi_identity(&[], &conclusion)
            .unwrap()
            .passed());
    }

    #[test]
    fn pointed_two_set_refutes_collapse() {
        let v = VarietyPresentation::single(corpus::pset2());
        let conclusion = (Term::var(x(1)), Term::var(x(2)));
        let report = v.satisfies_quasi_identity(&[], &conclusion).unwrap();
        assert!(!report.passed());
    }

    #[test]
    fn identities_preserved_by_quotients() {
        // H-preservation spot check over the corpus
        use crate::congruence::all_congruences;
        let identities: Vec<(Term, Term)> = vec![
            ("->(x1,x1)".parse().unwrap(), Term::constant("1")),
            ("v(x1,x2)".parse().unwrap(), "v(x2,x1)".parse().unwrap()),
            ("*(x1,1)".parse().unwrap(), Term::var(x(1))),
        ];
        for alg in [corpus::b2(), corpus::g3(), corpus::l3()] {
            let v = VarietyPresentation::single(alg.clone());
            for (l, r) in &identities {
                assert!(v.satisfies_identity(l, r).unwrap().passed());
            }
            for theta in all_congruences(&alg).iter() {
                let q = alg.quotient(theta).unwrap();
                let vq = VarietyPresentation::single(q.algebra);
                for (l, r) in &identities {
                    assert!(vq.satisfies_identity(l, r).unwrap().passed());
                }
            }
        }
    }
}
