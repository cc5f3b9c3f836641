//! Binary digit arithmetic: one-bit counts, carry counts, and the 2-adic
//! valuation of central binomial coefficients.
//!
//! The whole construction ultimately rests on two facts about base-2 digits:
//! the number of carries in an addition is `sigma(a) + sigma(b) - sigma(a+b)`,
//! and the 2-adic valuation of `binom(2X, X)` is exactly `sigma(X)`.

use num_bigint::{BigInt, BigUint};
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

/// A count of binary digits. Wraps a plain integer so that bit counts are not
/// confused with the arbitrary-precision values they describe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct BitCount(pub u64);

impl std::fmt::Display for BitCount {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

fn to_uint(name: &str, a: &BigInt) -> Result<BigUint> {
    if a.is_negative() {
        return Err(Error::domain(format!("{name} must be nonnegative, got {a}")));
    }
    Ok(a.magnitude().clone())
}

/// sigma(a): the number of one digits in the binary expansion of `a >= 0`.
pub fn sigma(a: &BigInt) -> Result<BitCount> {
    let m = to_uint("sigma argument", a)?;
    Ok(BitCount(m.count_ones()))
}

/// tau(a, b): the number of carries when adding `a` and `b` in base 2,
/// computed as `sigma(a) + sigma(b) - sigma(a + b)`.
pub fn tau(a: &BigInt, b: &BigInt) -> Result<BitCount> {
    let sa = sigma(a)?.0;
    let sb = sigma(b)?.0;
    let ss = sigma(&(a + b))?.0;
    // sigma is subadditive, so this cannot underflow.
    debug_assert!(sa + sb >= ss);
    Ok(BitCount(sa + sb - ss))
}

/// 2-adic valuation of `binom(2X, X)`; equals `sigma(X)`. Tests validate the
/// identity against directly computed binomials.
pub fn central_binom_val2(x: &BigInt) -> Result<BitCount> {
    sigma(x)
}

/// True iff `n` is a positive power of two (1 counts: 2^0).
pub fn is_power_of_two(n: &BigInt) -> bool {
    !n.is_negative() && !n.is_zero() && n.magnitude().count_ones() == 1
}

/// Exact base-2 logarithm of a power of two.
pub fn exact_log2(n: &BigInt) -> Result<u64> {
    if !is_power_of_two(n) {
        return Err(Error::domain(format!("{n} is not a power of two")));
    }
    Ok(n.magnitude().trailing_zeros().unwrap_or(0))
}

/// 2-adic valuation of a nonzero integer.
pub fn val2(n: &BigInt) -> Result<u64> {
    if n.is_zero() {
        return Err(Error::domain("the 2-adic valuation of 0 is undefined"));
    }
    Ok(n.magnitude()
        .trailing_zeros()
        .expect("nonzero magnitude has trailing_zeros"))
}

/// True iff `n` is a perfect square (of an integer).
pub fn is_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let root = n.magnitude().sqrt();
    &root * &root == *n.magnitude()
}

/// Floor square root of `n >= 0`.
pub fn isqrt(n: &BigInt) -> Result<BigInt> {
    let m = to_uint("isqrt argument", n)?;
    Ok(BigInt::from(m.sqrt()))
}

/// d | x in the sign-agnostic sense: |d| divides x. Everything divides 0;
/// only 0 is divisible by 0.
pub fn divides(d: &BigInt, x: &BigInt) -> bool {
    if d.is_zero() {
        return x.is_zero();
    }
    (x % d).is_zero()
}

/// binom(n, k) over arbitrary-precision integers; 0 when k > n.
pub fn binomial(n: &BigUint, k: &BigUint) -> BigUint {
    if k > n {
        return BigUint::zero();
    }
    num_integer::binomial(n.clone(), k.clone())
}

/// binom(2m, m), the central binomial coefficient.
pub fn central_binomial(m: &BigUint) -> BigUint {
    binomial(&(m * 2u32), m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::{One, ToPrimitive};

    fn bi(n: i64) -> BigInt {
        BigInt::from(n)
    }

    /// Independent oracle: count carries by simulating base-2 addition.
    fn tau_by_carry_simulation(a: u64, b: u64) -> u64 {
        let mut carries = 0u64;
        let mut carry = 0u64;
        for bit in 0..66 {
            let da = (a >> bit.min(63)) & if bit < 64 { 1 } else { 0 };
            let db = (b >> bit.min(63)) & if bit < 64 { 1 } else { 0 };
            let s = da + db + carry;
            carry = s >> 1;
            carries += carry;
        }
        carries
    }

    /// Independent oracle: 2-adic valuation of a directly computed binomial.
    fn val2_of_central_binomial(x: u64) -> u64 {
        let b = central_binomial(&BigUint::from(x));
        assert!(!b.is_zero());
        b.trailing_zeros().unwrap()
    }

    #[test]
    fn sigma_examples() {
        assert_eq!(sigma(&bi(12)).unwrap(), BitCount(2));
        assert_eq!(sigma(&bi(0)).unwrap(), BitCount(0));
        assert_eq!(sigma(&bi(255)).unwrap(), BitCount(8));
        assert!(sigma(&bi(-1)).is_err());
    }

    #[test]
    fn tau_examples() {
        assert_eq!(tau(&bi(3), &bi(1)).unwrap(), BitCount(2));
        assert_eq!(tau(&bi(5), &bi(2)).unwrap(), BitCount(0));
        assert!(tau(&bi(-3), &bi(1)).is_err());
    }

    #[test]
    fn tau_matches_carry_simulation() {
        for a in 0..256u64 {
            for b in 0..256u64 {
                let expected = tau_by_carry_simulation(a, b);
                let got = tau(&bi(a as i64), &bi(b as i64)).unwrap().0;
                assert_eq!(got, expected, "tau({a},{b})");
            }
        }
    }

    #[test]
    fn central_binom_val2_examples() {
        // binom(6,3) = 20 = 2^2 * 5 and binom(16,8) = 12870 = 2 * 6435.
        assert_eq!(
            central_binomial(&BigUint::from(3u32)).to_u64().unwrap(),
            20
        );
        assert_eq!(
            central_binomial(&BigUint::from(8u32)).to_u64().unwrap(),
            12870
        );
        assert_eq!(central_binom_val2(&bi(3)).unwrap(), BitCount(2));
        assert_eq!(central_binom_val2(&bi(8)).unwrap(), BitCount(1));
    }

    #[test]
    fn central_binom_val2_matches_direct_binomials_small() {
        for x in 1..=512u64 {
            assert_eq!(
                central_binom_val2(&bi(x as i64)).unwrap().0,
                val2_of_central_binomial(x),
                "X = {x}"
            );
        }
    }

    #[test]
    fn ones_block_has_sigma_k() {
        for k in 0..=64u32 {
            let n = (BigInt::one() << k) - 1;
            assert_eq!(sigma(&n).unwrap().0, k as u64);
        }
    }

    #[test]
    fn complement_within_block() {
        let k = 16u32;
        let top = 1u64 << k;
        for a in 0..top {
            let s1 = sigma(&bi(a as i64)).unwrap().0;
            let s2 = sigma(&bi((top - 1 - a) as i64)).unwrap().0;
            assert_eq!(s1 + s2, k as u64);
        }
    }

    #[test]
    fn power_of_two_helpers() {
        assert!(is_power_of_two(&bi(1)));
        assert!(is_power_of_two(&bi(256)));
        assert!(!is_power_of_two(&bi(0)));
        assert!(!is_power_of_two(&bi(12)));
        assert!(!is_power_of_two(&bi(-4)));
        assert_eq!(exact_log2(&bi(1024)).unwrap(), 10);
        assert!(exact_log2(&bi(12)).is_err());
        assert_eq!(val2(&bi(48)).unwrap(), 4);
        assert!(val2(&bi(0)).is_err());
    }

    #[test]
    fn square_helpers() {
        assert!(is_square(&bi(0)));
        assert!(is_square(&bi(1)));
        assert!(is_square(&bi(144)));
        assert!(!is_square(&bi(2)));
        assert!(!is_square(&bi(-4)));
        assert_eq!(isqrt(&bi(17)).unwrap(), bi(4));
    }
}
