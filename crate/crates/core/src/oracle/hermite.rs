use crate::algebra::{Poly, Rational, Ring};

/// `y'' - 2x y' + 2m y`; zero exactly when `y` solves the Hermite equation.
pub fn hermite_defect(y: &Poly<Rational>, m: usize) -> Poly<Rational> {
    let y1 = y.derivative();
    y1.derivative() - &Poly::from_i64s(&[0, 2]) * &y1 + y.scale(&Rational::from_i64(2 * m as i64))
}

/// `H_0 ..= H_{m_max}` from `H_{k+1} = 2x H_k - 2k H_{k-1}`.
pub fn hermite_table(m_max: usize) -> Vec<Poly<Rational>> {
    let two_x = Poly::from_i64s(&[0, 2]);
    let mut table = vec![Poly::from_i64s(&[1])];
    if m_max >= 1 {
        table.push(two_x.clone());
    }
    for k in 1..m_max {
        let next = &two_x * &table[k] - table[k - 1].scale(&Rational::from_i64(2 * k as i64));
        table.push(next);
    }
    for (m, h) in table.iter().enumerate() {
        assert!(num_traits::Zero::is_zero(&hermite_defect(h, m)), "H_{m} fails the Hermite equation");
    }
    table
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::ratio;

    #[test]
    fn first_entries() {
        let t = hermite_table(3);
        assert_eq!(t[0], Poly::from_i64s(&[1]));
        assert_eq!(t[1], Poly::from_i64s(&[0, 2]));
        assert_eq!(t[2], Poly::from_i64s(&[-2, 0, 4]));
        assert_eq!(t[3], Poly::from_i64s(&[0, -12, 0, 8]));
    }

    #[test]
    fn log_derivatives() {
        let t = hermite_table(3);
        // -H2'/H2 = -4x/(2x^2-1): cross-multiplied
        let lhs = -t[2].derivative() * Poly::from_i64s(&[-1, 0, 2]);
        assert_eq!(lhs, Poly::from_i64s(&[0, -4]) * t[2].clone());
        // -H3'/H3 = -3(2x^2-1)/(x(2x^2-3))
        let lhs = -t[3].derivative() * Poly::from_i64s(&[0, -3, 0, 2]);
        assert_eq!(lhs, Poly::from_i64s(&[3, 0, -6]) * t[3].clone());
        assert_eq!(t[3].eval(&ratio(1, 2)), ratio(-5, 1));
    }

    #[test]
    fn non_solution_has_defect() {
        assert!(!num_traits::Zero::is_zero(&hermite_defect(&Poly::from_i64s(&[0, 0, 1]), 2)));
    }
}
