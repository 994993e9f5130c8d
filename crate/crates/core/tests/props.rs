//! Property tests over randomly generated terms and partitions.

use std::collections::BTreeSet;

use proptest::prelude::*;

use idealkit::congruence::Congruence;
use idealkit::corpus;
use idealkit::term::{Assignment, Term, Var};

fn arb_var() -> impl Strategy<Value = Var> {
    prop_oneof![(1u32..=3).prop_map(Var::X), (1u32..=2).prop_map(Var::Y),]
}

/// Random terms over the bounded-lattice signature of the corpus.
fn arb_term() -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        arb_var().prop_map(Term::var),
        Just(Term::constant("0")),
        Just(Term::constant("1")),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        (
            prop_oneof![Just("v"), Just("^"), Just("*"), Just("->")],
            inner.clone(),
            inner,
        )
            .prop_map(|(sym, l, r)| Term::app(sym, vec![l, r]))
    })
}

fn full_assignment(seed: &[usize], size: usize) -> Assignment {
    let mut a = Assignment::new();
    for (i, v) in [Var::X(1), Var::X(2), Var::X(3), Var::Y(1), Var::Y(2)]
        .into_iter()
        .enumerate()
    {
        a.set(v, seed[i] % size);
    }
    a
}

proptest! {
    #[test]
    fn eval_respects_subterm_structure(term in arb_term(), seed in proptest::array::uniform5(0usize..3)) {
        let g3 = corpus::g3();
        let a = full_assignment(&seed, g3.size());
        let direct = g3.eval(&term, &a).unwrap();
        if let Term::App(sym, args) = &term {
            let idx = g3.op_index(sym).unwrap();
            let children: Vec<usize> = args
                .iter()
                .map(|t| g3.eval(t, &a).unwrap())
                .collect();
            prop_assert_eq!(direct, g3.apply(idx, &children));
        }
    }

    #[test]
    fn term_display_parses_back(term in arb_term()) {
        let printed = term.to_string();
        let reparsed: Term = printed.parse().unwrap();
        prop_assert_eq!(reparsed, term);
    }

    #[test]
    fn identities_transfer_to_quotients(seed in proptest::array::uniform5(0usize..3)) {
        // satisfaction of a fixed identity is preserved by every quotient
        let l3 = corpus::l3();
        let _ = seed;
        let v = idealkit::variety::VarietyPresentation::single(l3.clone());
        let lhs: Term = "v(x1,x2)".parse().unwrap();
        let rhs: Term = "v(x2,x1)".parse().unwrap();
        prop_assert!(v.satisfies_identity(&lhs, &rhs).unwrap().passed());
        for theta in idealkit::congruence::all_congruences(&l3).iter() {
            let q = l3.quotient(theta).unwrap();
            let vq = idealkit::variety::VarietyPresentation::single(q.algebra);
            prop_assert!(vq.satisfies_identity(&lhs, &rhs).unwrap().passed());
        }
    }

    #[test]
    fn congruence_canonical_form_and_lattice_bounds(labels in proptest::collection::vec(0usize..4, 4)) {
        let theta = Congruence::from_labels(&labels);
        // canonical labels are least block members
        for e in 0..4 {
            let rep = theta.block_of(e);
            prop_assert!(rep <= e);
            prop_assert_eq!(theta.block_of(rep), rep);
        }
        // meet is a lower bound of both arguments
        let other = Congruence::from_labels(&[0, 0, 1, 1]);
        let meet = theta.meet(&other);
        prop_assert!(meet.leq(&theta));
        prop_assert!(meet.leq(&other));
        let blocks: BTreeSet<usize> = (0..4).map(|e| theta.block_of(e)).collect();
        prop_assert_eq!(blocks.len(), theta.block_count());
    }
}
