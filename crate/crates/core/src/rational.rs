//! Exact coefficient arithmetic used by the compiler and the oracle.

use num_rational::Ratio;
use num_traits::{Signed, ToPrimitive, Zero};

pub type Rational = Ratio<i64>;

pub fn int(value: i64) -> Rational {
    Rational::from_integer(value)
}

pub fn to_f64(value: &Rational) -> f64 {
    value.to_f64().unwrap_or(f64::NAN)
}

/// Renders a rational as an exact decimal string when the denominator only has
/// factors 2 and 5 (`-10.5`, `131`), and as `p/q` otherwise.
pub fn to_decimal_string(value: &Rational) -> String {
    if value.is_zero() {
        return "0".to_string();
    }
    let numer = *value.numer() as i128;
    let mut denom = *value.denom() as i128;
    let (mut twos, mut fives) = (0u32, 0u32);
    while denom % 2 == 0 {
        denom /= 2;
        twos += 1;
    }
    while denom % 5 == 0 {
        denom /= 5;
        fives += 1;
    }
    if denom != 1 {
        return format!("{}/{}", value.numer(), value.denom());
    }
    let places = twos.max(fives);
    // numer / (2^twos 5^fives) == numer * 2^(places-twos) * 5^(places-fives) / 10^places
    let scaled = numer.abs() * 2i128.pow(places - twos) * 5i128.pow(places - fives);
    let unit = 10i128.pow(places);
    let whole = scaled / unit;
    let frac = scaled % unit;
    let sign = if value.is_negative() { "-" } else { "" };
    if places == 0 {
        format!("{sign}{whole}")
    } else {
        let mut digits = format!("{frac:0width$}", width = places as usize);
        while digits.ends_with('0') {
            digits.pop();
        }
        format!("{sign}{whole}.{digits}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal_string(&int(-283)), "-283");
        assert_eq!(to_decimal_string(&Rational::new(-21, 2)), "-10.5");
        assert_eq!(to_decimal_string(&Rational::new(3, 4)), "0.75");
        assert_eq!(to_decimal_string(&Rational::new(-1, 8)), "-0.125");
        assert_eq!(to_decimal_string(&Rational::new(1, 5)), "0.2");
        assert_eq!(to_decimal_string(&Rational::new(1, 3)), "1/3");
        assert_eq!(to_decimal_string(&int(0)), "0");
    }
}
