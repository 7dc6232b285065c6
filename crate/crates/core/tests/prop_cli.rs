use epmono::cli::{parse_complex, run, RunConfig};
use proptest::prelude::*;

fn literal(re: f64, im: f64) -> String {
    if im < 0.0 {
        format!("{re:e}-{:e}i", -im)
    } else {
        format!("{re:e}+{im:e}i")
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn complex_literals_round_trip(re in -1e6..1e6f64, im in -1e6..1e6f64) {
        let c = parse_complex(&literal(re, im)).unwrap();
        prop_assert_eq!((c.re, c.im), (re, im));
        prop_assert_eq!(parse_complex(&format!("{re:e}")).map(|c| (c.re, c.im)), Some((re, 0.0)));
        prop_assert_eq!(parse_complex(&format!("{im:e}i")).map(|c| (c.re, c.im)), Some((0.0, im)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn worker_count_does_not_change_tables(
        rho in 0.1..2.0f64,
        delta in 0.0..1.0f64,
        lo in -1.0..0.0f64,
        hi in 0.1..1.0f64,
        rows in 2usize..12,
        cols in 2usize..9,
        workers in 2usize..9,
    ) {
        let text = format!(
            "scenario = atom-noncyclic\nrho = {rho}\ndelta = {delta}\nomega = 1\ngrid.z = {lo}:{hi}:{rows}\ngrid.t = 0.5:6:{cols}\n"
        );
        let mut cfg = RunConfig::parse(&text, None).unwrap();
        let one = run(&cfg).unwrap();
        cfg.workers = workers;
        let many = run(&cfg).unwrap();
        prop_assert_eq!(one.rows.len(), rows * cols);
        prop_assert_eq!(one.to_csv(), many.to_csv());
    }
}
