use aim_cli::config::parse_rational;
use aim_cli::ProblemConfig;
use aim_core::algebra::Rational;
use proptest::prelude::*;

fn number() -> impl Strategy<Value = String> {
    prop_oneof![
        (-50i64..50).prop_map(|n| n.to_string()),
        (-50i64..50, 1i64..20).prop_map(|(n, d)| format!("{n}/{d}")),
        (-999i64..999, 0u32..4).prop_map(|(m, k)| format!("{}", m as f64 / 10f64.powi(k as i32))),
        (1i64..9, -3i32..3).prop_map(|(m, e)| format!("{m}e{e}")),
    ]
}

fn poly() -> impl Strategy<Value = String> {
    prop::collection::vec(number(), 1..5).prop_map(|v| v.join(", "))
}

fn config_text() -> impl Strategy<Value = String> {
    let source = prop_oneof![
        (poly(), prop_oneof![
            Just(String::new()),
            (1i64..5).prop_map(|b| format!("beta = {b}\n")),
            poly().prop_map(|s| format!("gauge = {s}\n")),
            Just("beta_candidates = 1, 2, 3\n".to_string()),
        ])
            .prop_map(|(v, g)| format!("mode = eigen\npotential = {v}\n{g}")),
        (poly(), poly(), poly()).prop_map(|(p, q, l)| format!("mode = terminate\np = {p}\nq = {q}\nq_lambda = {l}\n")),
    ];
    (source, 1usize..40, prop::option::of((0i64..5, 1i64..5)), prop::sample::select(vec!["v1", "v2"]), number()).prop_map(
        |(src, n, window, variant, x0)| {
            let mut text = format!("# generated\n{src}n_max = {n}\nvariant = {variant}\nx0 = {x0}\n");
            if let Some((lo, w)) = window {
                text.push_str(&format!("window = {lo}, {}\n", lo + w));
            }
            text
        },
    )
}

proptest! {
    #[test]
    fn serialize_is_idempotent(text in config_text()) {
        let cfg = ProblemConfig::parse(&text).unwrap();
        let canonical = cfg.to_text();
        let again = ProblemConfig::parse(&canonical).unwrap();
        prop_assert_eq!(&again, &cfg);
        prop_assert_eq!(again.to_text(), canonical);
    }

    #[test]
    fn decimals_are_exact(negative: bool, whole in 0u64..10_000, frac in 0u64..1000, places in 0u32..6) {
        let sign = if negative { "-" } else { "" };
        let parsed = parse_rational(&format!("{sign}{whole}.{frac:03}")).unwrap();
        let magnitude = Rational::new((whole * 1000 + frac).into(), 1000.into());
        prop_assert_eq!(parsed, if negative { -magnitude } else { magnitude });

        let int = whole as i64 * if negative { -1 } else { 1 };
        let scaled = parse_rational(&format!("{int}e-{places}")).unwrap();
        prop_assert_eq!(scaled * Rational::from_integer(10i64.pow(places).into()), Rational::from_integer(int.into()));
    }
}
