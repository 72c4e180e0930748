//! Small helpers around exact rationals.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};

/// Parses `3`, `-2/7` or a finite decimal such as `0.125`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if let Some((int, frac)) = s.split_once('.') {
        let neg = int.starts_with('-');
        let int_part: BigInt = if int.is_empty() || int == "-" {
            BigInt::zero()
        } else {
            int.parse().map_err(|_| Error::Domain(format!("bad number `{s}`")))?
        };
        let digits: BigInt = if frac.is_empty() {
            BigInt::zero()
        } else {
            frac.parse().map_err(|_| Error::Domain(format!("bad number `{s}`")))?
        };
        let scale = num_traits::pow(BigInt::from(10), frac.len());
        let frac_val = BigRational::new(digits, scale);
        let abs = BigRational::from(num_traits::Signed::abs(&int_part)) + frac_val;
        return Ok(if neg { -abs } else { abs });
    }
    s.parse::<BigRational>()
        .map_err(|_| Error::Domain(format!("bad rational `{s}`")))
}

pub fn ratio(num: usize, den: usize) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn one() -> BigRational {
    BigRational::one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_forms() {
        assert_eq!(parse_rational("1/1000").unwrap(), ratio(1, 1000));
        assert_eq!(parse_rational("0.5").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), -ratio(5, 4));
        assert_eq!(parse_rational("3").unwrap(), ratio(3, 1));
        assert!(parse_rational("x").is_err());
    }
}
