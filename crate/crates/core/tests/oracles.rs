mod common;

use aim_core::aim::run_full;
use aim_core::algebra::Rational;
use aim_core::oracle::{constant_coeff_closed_form, hermite_defect, hermite_table, numerov_level};
use common::*;
use num_traits::Zero;
use proptest::prelude::*;

fn rational() -> impl Strategy<Value = Rational> {
    (-9i64..9, 1i64..4).prop_map(|(n, d)| Rational::new(n.into(), d.into()))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10))]

    #[test]
    fn closed_form_matches_recurrence(r1 in rational(), r2 in rational()) {
        prop_assume!(r1 != r2);
        // p² + 4q = (r1 - r2)²
        let (p, q) = (&r1 + &r2, -(&r1 * &r2));
        let problem = aim_core::aim::OdeProblem::new(
            aim_core::algebra::Poly::constant(p.clone()),
            aim_core::algebra::Poly::constant(q.clone()),
        ).unwrap();
        let seq = run_full(&problem, 30).unwrap();
        for n in 0..=30 {
            let (pn, qn) = constant_coeff_closed_form(&p, &q, n).unwrap();
            prop_assert_eq!(seq.iterate(n).p.coeff(0), pn);
            prop_assert_eq!(seq.iterate(n).q.coeff(0), qn);
        }
    }
}

#[test]
fn hermite_table_has_zero_defects() {
    for (m, y) in hermite_table(12).iter().enumerate() {
        assert!(hermite_defect(y, m).is_zero(), "m = {m}");
        assert_eq!(y.degree(), Some(m));
    }
}

#[test]
fn numerov_error_is_fourth_order() {
    let meshes = [161usize, 321, 641, 1281];
    let points: Vec<(f64, f64)> = meshes
        .iter()
        .map(|&m| {
            let h = 16.0 / (m - 1) as f64;
            let e = numerov_level(&harmonic(), 0, (-8.0, 8.0), m, 1e-15).unwrap();
            (h.ln(), (e - 1.0).abs().ln())
        })
        .collect();
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), (x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let slope = points.iter().map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / points.iter().map(|(x, _)| (x - mx).powi(2)).sum::<f64>();
    assert!((slope - 4.0).abs() < 0.5, "fitted order {slope}");
}
