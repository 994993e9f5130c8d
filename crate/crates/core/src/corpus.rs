//! The bundled desk-scale algebras. The JSON files under `corpus/` are the
//! source of truth; the same files are meant to be passed to the CLI.

use crate::algebra::{algebra_from_json, FiniteAlgebra};
use crate::term::Term;

macro_rules! bundled {
    ($fn_name:ident, $file:literal) => {
        pub fn $fn_name() -> FiniteAlgebra {
            algebra_from_json(include_str!(concat!("../corpus/", $file)))
                .expect(concat!($file, " is well-formed"))
        }
    };
}

bundled!(b2, "b2.json");
bundled!(g3, "g3.json");
bundled!(l3, "l3.json");
bundled!(z4, "z4.json");
bundled!(chain3, "chain3.json");
bundled!(pset2, "pset2.json");
bundled!(onepoint, "onepoint.json");
bundled!(g3_delta, "g3_delta.json");
bundled!(g3_dneg, "g3_dneg.json");

/// Every bundled algebra, in a fixed order.
pub fn all() -> Vec<FiniteAlgebra> {
    vec![
        b2(),
        g3(),
        l3(),
        z4(),
        chain3(),
        pset2(),
        onepoint(),
        g3_delta(),
        g3_dneg(),
    ]
}

/// The bounded commutative integral views of the corpus.
pub fn fl_ew() -> Vec<FiniteAlgebra> {
    vec![b2(), g3(), l3()]
}

/// Test term pools for subvariety axioms, same files as `corpus/*.trm`.
pub fn term_pools() -> Vec<(&'static str, Term)> {
    vec![
        (
            "double-negation",
            include_str!("../corpus/boolt.trm").trim().parse().unwrap(),
        ),
        (
            "prelinearity",
            include_str!("../corpus/prelin.trm").trim().parse().unwrap(),
        ),
        (
            "fuse-idempotence",
            include_str!("../corpus/idem.trm").trim().parse().unwrap(),
        ),
    ]
}
