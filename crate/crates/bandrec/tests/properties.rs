//! Randomized structural properties of operators and polynomials.

use proptest::collection::btree_set;
use proptest::prelude::*;

use bandrec::operator::{compose, MinorOp};
use bandrec::poly::MultiPoly;
use bandrec::symbols::{Integer, SymbolTable};

fn minor_op() -> impl Strategy<Value = MinorOp> {
    (btree_set(1u32..12, 0..5), btree_set(1u32..12, 0..5)).prop_map(|(rows, cols)| {
        let k = rows.len().min(cols.len());
        MinorOp::new(
            rows.into_iter().take(k).collect(),
            cols.into_iter().take(k).collect(),
        )
        .unwrap()
    })
}

fn poly(table: &SymbolTable) -> impl Strategy<Value = MultiPoly> {
    let nvars = table.var_count();
    let term = (
        proptest::collection::vec(0u16..3, nvars),
        -5i64..=5,
    );
    proptest::collection::vec(term, 0..6).prop_map(move |terms| {
        MultiPoly::from_terms(
            nvars,
            terms
                .into_iter()
                .map(|(exps, c)| (exps, Integer::from(c))),
        )
    })
}

proptest! {
    #[test]
    fn compose_is_associative(a in minor_op(), b in minor_op(), c in minor_op()) {
        prop_assert_eq!(
            compose(&a, &compose(&b, &c)),
            compose(&compose(&a, &b), &c)
        );
    }

    #[test]
    fn reduce_is_idempotent(o in minor_op()) {
        let first = o.reduce();
        let second = first.target.reduce();
        prop_assert_eq!(&second.target, &first.target);
        prop_assert_eq!(second.shift, 0);
        prop_assert!(!first.target.is_reducible());
    }

    #[test]
    fn operator_text_round_trips(o in minor_op()) {
        let parsed: MinorOp = o.to_string().parse().unwrap();
        prop_assert_eq!(parsed, o);
    }

    #[test]
    fn reduction_preserves_tail_indices(o in minor_op()) {
        // stripping s leading pairs shifts every surviving index down by s
        let red = o.reduce();
        let s = red.shift as usize;
        prop_assert_eq!(red.target.len(), o.len() - s);
        for (i, r) in red.target.rows().iter().enumerate() {
            prop_assert_eq!(r + red.shift, o.rows()[s + i]);
        }
        for (i, c) in red.target.cols().iter().enumerate() {
            prop_assert_eq!(c + red.shift, o.cols()[s + i]);
        }
    }

    #[test]
    fn polynomial_text_round_trips(p in poly(&SymbolTable::new(3).unwrap())) {
        let table = SymbolTable::new(3).unwrap();
        let parsed = MultiPoly::parse(&p.render(&table), &table).unwrap();
        prop_assert_eq!(parsed, p);
    }
}
