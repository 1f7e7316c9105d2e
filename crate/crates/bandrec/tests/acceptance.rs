//! End-to-end acceptance checks, one test per criterion. Each prints a
//! single summary line; run with `-- --nocapture` to see them on success.

use std::time::Instant;

use num_traits::Zero;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use bandrec::engine::run;
use bandrec::operator::{compose, MinorOp};
use bandrec::oracle::{
    build_minor, check_annihilates_coeffs, check_equation_cached, check_reduction, DetCache,
};
use bandrec::output::coefficient_strings;
use bandrec::solver::{
    assemble, char_recursion, eliminate_by_substitution, numeric_minimal_order, numeric_recursion,
};
use bandrec::symbols::{BandValues, SymbolTable};

fn passed(n: u32, label: &str) {
    println!("criterion {n} ({label}): PASS");
}

fn binomial(n: usize, k: usize) -> usize {
    if k > n {
        return 0;
    }
    let mut acc: u128 = 1;
    for i in 0..k.min(n - k) {
        acc = acc * (n - i) as u128 / (i + 1) as u128;
    }
    acc as usize
}

fn op(text: &str) -> MinorOp {
    text.parse().unwrap()
}

#[test]
fn criterion_1_order_three_recursion_coefficients() {
    let started = Instant::now();
    let table = SymbolTable::new(3).unwrap();
    let rec = char_recursion(&assemble(&run(3).unwrap()).unwrap()).unwrap();
    assert_eq!(
        coefficient_strings(&rec, &table),
        [
            "1",
            "-a",
            "bd - ce",
            "2ace - b^2e - cd^2",
            "bcde - c^2e^2",
            "-ac^2e^2",
            "c^3e^3",
        ]
    );
    assert!(started.elapsed().as_secs() < 10, "took too long");
    passed(1, "order-3 recursion coefficients");
}

#[test]
fn criterion_2_order_three_equations_and_index_sets() {
    let table = SymbolTable::new(3).unwrap();
    let res = run(3).unwrap();
    let names: Vec<String> = res.operators.iter().map(|o| o.to_string()).collect();
    assert_eq!(
        names,
        ["(0;0)", "(1;2)", "(1;3)", "(1,2;2,3)", "(1,2;2,4)", "(1,2;3,4)"]
    );
    let rendered: Vec<String> = res.equations.iter().map(|e| e.render(&table)).collect();
    assert_eq!(
        rendered,
        [
            "(0;0) = a y (0;0) - b y (1;2) + c y (1;3)",
            "(1;2) = d y (0;0) - b y (1,2;2,3) + c y (1,2;2,4)",
            "(1;3) = d y (1;2) - a y (1,2;2,3) + c y (1,2;3,4)",
            "(1,2;2,3) = e y (0;0)",
            "(1,2;2,4) = e y (1;2)",
            "(1,2;3,4) = e y (1,2;2,3)",
        ]
    );
    assert_eq!(
        res.e_sets,
        vec![
            vec![vec![2], vec![3]],
            vec![vec![2, 3], vec![2, 4], vec![3, 4]],
        ]
    );
    passed(2, "order-3 equation system and index sets");
}

#[test]
fn criterion_3_termination_and_operator_counts() {
    let started = Instant::now();
    for r in 1..=7u32 {
        let res = run(r).unwrap();
        assert_eq!(res.rounds.len(), r as usize, "order {r} round count");
        assert_eq!(res.e_sets.len(), r as usize - 1);
        for (i, level) in res.e_sets.iter().enumerate() {
            let k = i + 1;
            assert_eq!(
                level.len(),
                binomial(r as usize + k - 2, k),
                "order {r} level {k} tuple count"
            );
        }
        let total = 1 + res.e_sets.iter().map(Vec::len).sum::<usize>();
        assert_eq!(res.operators.len(), total);
        assert_eq!(total, binomial(2 * (r as usize) - 2, r as usize - 1));
        assert_eq!(res.equations.len(), total);
    }
    assert_eq!(run(4).unwrap().operators.len(), 20);
    assert_eq!(run(5).unwrap().operators.len(), 70);
    assert!(started.elapsed().as_secs() < 60, "took too long");
    passed(3, "termination in R rounds with binomial operator counts");
}

#[test]
fn criterion_4_recursion_annihilates_determinant_sequences() {
    for r in 2..=4u32 {
        let rec = char_recursion(&assemble(&run(r).unwrap()).unwrap()).unwrap();
        let deg = rec.degree();
        for trial in 0..10u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(1000 + trial);
            let values = BandValues::random_nonzero(r, &mut rng);
            let coeffs = rec.poly().substitute(&values).unwrap();
            let report = check_annihilates_coeffs(&coeffs, &values, deg + 1, deg + 15);
            assert!(
                report.pass,
                "order {r} trial {trial}: residuals {:?}",
                report.residuals
            );
        }
    }
    let tm = assemble(&run(5).unwrap()).unwrap();
    for trial in 0..10u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(2000 + trial);
        let values = BandValues::random_nonzero(5, &mut rng);
        let coeffs = numeric_recursion(&tm, &values).unwrap();
        let deg = coeffs.len() - 1;
        assert!(deg <= 70);
        let report = check_annihilates_coeffs(&coeffs, &values, deg + 1, deg + 15);
        assert!(
            report.pass,
            "order 5 trial {trial}: residuals {:?}",
            report.residuals
        );
    }
    passed(4, "recursions annihilate exact determinant sequences");
}

#[test]
fn criterion_5_every_equation_holds_numerically() {
    for r in 1..=5u32 {
        let res = run(r).unwrap();
        for trial in 0..5u64 {
            let mut rng = ChaCha8Rng::seed_from_u64(3000 + trial);
            let mut cache = DetCache::new(BandValues::random_nonzero(r, &mut rng));
            for eq in &res.equations {
                let report = check_equation_cached(eq, &mut cache, 1, 5).unwrap();
                assert!(
                    report.pass,
                    "order {r} trial {trial} equation for {}: residuals {:?}",
                    eq.lhs, report.residuals
                );
            }
        }
    }
    passed(5, "every equation holds at five sizes and five substitutions");
}

#[test]
fn criterion_6_operator_lemmas() {
    // the four composition identities
    let corner = op("(1;1)");
    let twice = compose(&corner, &corner);
    assert_eq!(twice, op("(1,2;1,2)"));
    let red = twice.reduce();
    assert!(red.target.is_identity());
    assert_eq!(red.shift, 2);

    let second = compose(&corner, &op("(1;2)"));
    assert_eq!(second, op("(1,2;1,2)"));
    assert!(second.reduce().target.is_identity());

    let chain = compose(&op("(1;3)"), &compose(&op("(1;2)"), &op("(1;2)")));
    assert_eq!(chain, op("(1,2,3;2,3,5)"));

    let mixed = compose(&op("(2;3)"), &compose(&corner, &corner));
    assert_eq!(mixed, op("(1,2,4;1,2,5)"));
    let red = mixed.reduce();
    assert_eq!(red.target, op("(2;3)"));
    assert_eq!(red.shift, 2);

    // every first-row expansion chain deletes a leading block of rows
    for r in 1..=5u32 {
        for s in 1..r {
            let expected: Vec<u32> = (1..=s).collect();
            let mut cols = vec![1u32; s as usize];
            'tuples: loop {
                let mut acc = op(&format!("(1;{})", cols[0]));
                for c in &cols[1..] {
                    acc = compose(&op(&format!("(1;{c})")), &acc);
                }
                assert_eq!(acc.rows(), expected, "order {r} chain {cols:?}");

                let mut i = cols.len();
                loop {
                    if i == 0 {
                        break 'tuples;
                    }
                    i -= 1;
                    if cols[i] < r {
                        cols[i] += 1;
                        for c in &mut cols[i + 1..] {
                            *c = 1;
                        }
                        break;
                    }
                    cols[i] = 1;
                }
            }
        }
    }

    // corner deletion after any generated operator with column set off 1
    for r in 1..=5u32 {
        let res = run(r).unwrap();
        for o in &res.operators {
            if o.is_identity() {
                continue;
            }
            assert_ne!(o.cols()[0], 1);
            assert!(
                compose(&corner, o).is_reducible(),
                "order {r} operator {o} resists the corner reduction"
            );
        }
    }

    // logged reductions preserve the whole determinant family
    for r in 1..=5u32 {
        let res = run(r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4000 + u64::from(r));
        let values = BandValues::random_nonzero(r, &mut rng);
        for red in &res.reductions {
            let report = check_reduction(&red.from, &red.to, &values, 5).unwrap();
            assert!(
                report.pass,
                "order {r} reduction {} -> {}: residuals {:?}",
                red.from, red.to, report.residuals
            );
        }
    }

    // operators entering the final round have a single-entry first column
    for r in 1..=5u32 {
        let res = run(r).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5000 + u64::from(r));
        let values = BandValues::random_nonzero(r, &mut rng);
        let last = res.rounds.last().unwrap();
        for o in &last.expanded {
            for size in r + 2..=r + 6 {
                let minor = build_minor(o, size as usize + o.len(), &values).unwrap();
                for i in 1..minor.size() {
                    assert!(
                        minor.entry(i, 0).is_zero(),
                        "order {r} operator {o} size {size} row {}",
                        i + 1
                    );
                }
            }
        }
    }

    passed(6, "operator algebra and reduction soundness");
}

#[test]
fn criterion_7_elimination_routes_agree() {
    let table = SymbolTable::new(3).unwrap();
    let res = run(3).unwrap();
    let rec = char_recursion(&assemble(&res).unwrap()).unwrap();
    let el = eliminate_by_substitution(&res).unwrap();
    assert_eq!(el.recursion, rec);

    let after: Vec<(String, String)> = el
        .after_substitution
        .iter()
        .map(|(o, c)| (o.to_string(), c.render(&table)))
        .collect();
    assert_eq!(
        after,
        [
            (
                "(0;0)".to_string(),
                "1 - a y + bd y^2 + (ace - b^2e) y^3 - c^2e^2 y^4".to_string()
            ),
            ("(1;2)".to_string(), "-cd y^2 + bce y^3".to_string()),
        ]
    );
    assert_eq!(el.clearings.len(), 1);
    let clearing = &el.clearings[0];
    assert_eq!(clearing.op.to_string(), "(1;2)");
    assert_eq!(clearing.factor.render(&table), "1 - ce y^2");
    assert_eq!(clearing.image.render(&table), "d y - be y^2");
    passed(7, "substitution route matches the characteristic route");
}

#[test]
fn criterion_8_observed_minimal_order_matches_degree() {
    for r in 2..=4u32 {
        let degree = binomial(2 * (r as usize - 1), r as usize - 1);
        let observed = numeric_minimal_order(r, degree, 4, 6000 + u64::from(r)).unwrap();
        println!("  order {r}: observed minimal order {observed}, recursion degree {degree}");
        assert!(
            observed <= degree,
            "order {r}: observed {observed} exceeds degree {degree}"
        );
        if observed < degree {
            println!("  order {r}: substitutions were degenerate, observed below degree");
        }
    }
    passed(8, "observed minimal order never exceeds the recursion degree");
}
