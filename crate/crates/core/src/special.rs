//! Log-gamma and log-factorial.

use std::f64::consts::PI;
use std::sync::OnceLock;

const LANCZOS_G: f64 = 7.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEF: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Largest `n` whose `ln n!` is served from the summed table.
const TABLE_MAX: usize = 255;

/// `ln |Γ(x)|` via the Lanczos approximation (g = 7, 9 terms), with the
/// reflection formula below 1/2. Returns +inf at the poles.
pub fn ln_gamma(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x <= 0.0 && x == x.floor() {
        return f64::INFINITY;
    }
    if x < 0.5 {
        return (PI / (PI * x).sin().abs()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let mut acc = LANCZOS_COEF[0];
    for (i, &c) in LANCZOS_COEF.iter().enumerate().skip(1) {
        acc += c / (x + i as f64);
    }
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + acc.ln()
}

fn factorial_table() -> &'static [f64; TABLE_MAX + 1] {
    static TABLE: OnceLock<[f64; TABLE_MAX + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut table = [0.0; TABLE_MAX + 1];
        for n in 2..=TABLE_MAX {
            table[n] = table[n - 1] + (n as f64).ln();
        }
        table
    })
}

/// `ln n!`, exact-summed for small `n` and Lanczos beyond.
pub fn ln_factorial(n: u64) -> f64 {
    match usize::try_from(n) {
        Ok(k) if k <= TABLE_MAX => factorial_table()[k],
        _ => ln_gamma(n as f64 + 1.0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorials_match_direct_products() {
        let mut fact = 1.0_f64;
        for n in 1..=30u64 {
            fact *= n as f64;
            let rel = (ln_factorial(n) - fact.ln()).abs() / fact.ln().max(1.0);
            assert!(rel < 1e-14, "n={n}");
        }
        assert_eq!(ln_factorial(0), 0.0);
        assert_eq!(ln_factorial(1), 0.0);
    }

    #[test]
    fn lanczos_agrees_with_table_at_the_seam() {
        for n in [20u64, 100, 200, 255] {
            let lanczos = ln_gamma(n as f64 + 1.0);
            let rel = (lanczos - ln_factorial(n)).abs() / ln_factorial(n);
            assert!(rel < 1e-13, "n={n} rel={rel}");
        }
        // continuity across the table boundary
        let step = ln_factorial(256) - ln_factorial(255);
        assert!((step - 256f64.ln()).abs() < 1e-10);
    }

    #[test]
    fn gamma_at_half_integers_and_reflection() {
        // Γ(1/2) = √π
        assert!((ln_gamma(0.5) - PI.sqrt().ln()).abs() < 1e-14);
        // Γ(-1/2) = -2√π
        assert!((ln_gamma(-0.5) - (2.0 * PI.sqrt()).ln()).abs() < 1e-13);
        assert!(ln_gamma(0.0).is_infinite());
        assert!(ln_gamma(-3.0).is_infinite());
    }
}
