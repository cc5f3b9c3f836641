//! Lucas sequences psi_n(A), chi_n(A) for signed indices, their Pell-equation
//! correspondence, fast modular evaluation, and the congruence that encodes
//! "W is a power of two" in Diophantine terms.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::{Error, Result};

/// A solution node of the Pell equation X^2 - (A^2 - 4) Y^2 = 4:
/// (X, Y) = (chi_n(A), psi_n(A)).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LucasPair {
    pub a: BigInt,
    pub n: i64,
    pub psi: BigInt,
    pub chi: BigInt,
}

/// 2x2 matrices over BigInt in row-major order; the powering companion of
/// the recurrence x_{n+1} = A x_n - x_{n-1} is [[A, -1], [1, 0]], whose n-th
/// power is [[psi_{n+1}, -psi_n], [psi_n, -psi_{n-1}]].
fn mat_mul(x: &[BigInt; 4], y: &[BigInt; 4]) -> [BigInt; 4] {
    [
        &x[0] * &y[0] + &x[1] * &y[2],
        &x[0] * &y[1] + &x[1] * &y[3],
        &x[2] * &y[0] + &x[3] * &y[2],
        &x[2] * &y[1] + &x[3] * &y[3],
    ]
}

/// (psi_n(a), psi_{n+1}(a)) by binary matrix powering.
pub(crate) fn psi_pair(a: &BigInt, n: u64) -> (BigInt, BigInt) {
    let mut acc = [
        BigInt::one(),
        BigInt::zero(),
        BigInt::zero(),
        BigInt::one(),
    ];
    let mut base = [a.clone(), BigInt::from(-1), BigInt::one(), BigInt::zero()];
    let mut k = n;
    while k > 0 {
        if k & 1 == 1 {
            acc = mat_mul(&acc, &base);
        }
        k >>= 1;
        if k > 0 {
            base = mat_mul(&base, &base);
        }
    }
    let [next, _, cur, _] = acc;
    (cur, next)
}

/// psi_n(a) for any sign of n, via psi_{-n} = -psi_n.
pub fn psi(a: &BigInt, n: i64) -> BigInt {
    let (p, _) = psi_pair(a, n.unsigned_abs());
    if n < 0 {
        -p
    } else {
        p
    }
}

/// chi_n(a) for any sign of n, via chi_{-n} = chi_n and
/// chi_n = 2 psi_{n+1} - A psi_n.
pub fn chi(a: &BigInt, n: i64) -> BigInt {
    let (p, next) = psi_pair(a, n.unsigned_abs());
    2 * next - a * p
}

/// Both sequences at one index, packaged with the parameter.
pub fn lucas_pair(a: &BigInt, n: i64) -> LucasPair {
    LucasPair {
        a: a.clone(),
        n,
        psi: psi(a, n),
        chi: chi(a, n),
    }
}

/// psi_n(a) with a result-size guard, for indices beyond i64 or parameters
/// whose powers would be astronomically large. The growth bound
/// psi_{n+1} < A^n caps the result near n * bits(A) bits.
pub fn psi_checked(a: &BigInt, n: &BigInt) -> Result<BigInt> {
    let mag = n
        .magnitude()
        .to_u64()
        .ok_or_else(|| Error::resource("Lucas index exceeds u64"))?;
    let bits = a.magnitude().bits().max(2);
    if mag.saturating_mul(bits + 1) > crate::EVAL_BIT_GUARD {
        return Err(Error::resource(format!(
            "Lucas value at index {mag} with a {bits}-bit parameter exceeds the evaluation guard"
        )));
    }
    let (p, _) = psi_pair(a, mag);
    Ok(if n.is_negative() { -p } else { p })
}

/// psi_n(a) mod m in O(log n) matrix squarings. The congruence lemma for
/// Lucas sequences (values depend on A only through A mod m) makes reduction
/// at every step sound.
pub fn psi_mod(a: &BigInt, n: &BigUint, m: &BigInt) -> Result<BigInt> {
    if m < &BigInt::from(2) {
        return Err(Error::domain(format!(
            "modular Lucas evaluation needs modulus >= 2, got {m}"
        )));
    }
    let red = |v: BigInt| v.mod_floor(m);
    let mut acc = [
        BigInt::one(),
        BigInt::zero(),
        BigInt::zero(),
        BigInt::one(),
    ];
    let mut base = [
        a.mod_floor(m),
        (-BigInt::one()).mod_floor(m),
        BigInt::one(),
        BigInt::zero(),
    ];
    for i in (0..n.bits()).rev().map(|i| n.bit(i)) {
        acc = mat_mul(&acc, &acc).map(&red);
        if i {
            acc = mat_mul(&acc, &base).map(&red);
        }
    }
    let _ = &mut base;
    Ok(acc[2].clone())
}

/// All solutions of X^2 - (A^2 - 4) Y^2 = 4 over the naturals with both
/// coordinates at most `bound`, in increasing index order. For A >= 3 the
/// discriminant is positive and not a square, and the solutions are exactly
/// the Lucas pairs at n >= 0.
pub fn pell_enumerate(a: &BigInt, bound: &BigInt) -> Result<Vec<LucasPair>> {
    if a < &BigInt::from(3) {
        return Err(Error::domain(format!(
            "Pell enumeration needs A >= 3 so that A^2 - 4 is positive and not a square, got {a}"
        )));
    }
    let mut out = Vec::new();
    // chi dominates psi for A > 2, so chi crossing the bound ends the scan.
    let mut n = 0i64;
    loop {
        let pair = lucas_pair(a, n);
        if pair.chi > *bound {
            return Ok(out);
        }
        if pair.psi <= *bound {
            out.push(pair);
        }
        n += 1;
    }
}

/// Least n in [1, search_cap] with N | psi_n(A); None when the cap is hit
/// first. The law of apparition guarantees existence but gives no usable
/// bound, hence the cap. The scan runs the recurrence mod N incrementally.
pub fn apparition_rank(a: &BigInt, n: &BigInt, search_cap: u64) -> Result<Option<u64>> {
    if !n.is_positive() {
        return Err(Error::domain(format!(
            "apparition rank needs a positive divisor, got {n}"
        )));
    }
    if n.is_one() {
        return Ok(Some(1).filter(|_| search_cap >= 1));
    }
    let mut prev = BigInt::zero();
    let mut cur = BigInt::one();
    let a_red = a.mod_floor(n);
    for idx in 1..=search_cap {
        if cur.is_zero() {
            return Ok(Some(idx));
        }
        let next = (&a_red * &cur - &prev).mod_floor(n);
        prev = cur;
        cur = next;
    }
    Ok(None)
}

/// Whether 3 W psi_B(A) = 2 (W^2 - 1) modulo 2A - 5. Holds unconditionally
/// for W = 2^B; conversely, it pins W to 2^B once |A| >= max(W^4, 2^(4B)).
pub fn congruence_46_check(a: &BigInt, b: u64, w: &BigInt) -> Result<bool> {
    if b == 0 {
        return Err(Error::domain("the congruence check needs B >= 1"));
    }
    let m: BigInt = 2 * a - 5;
    let m = m.abs();
    if m.is_one() {
        return Ok(true);
    }
    let psi_b = psi_mod(a, &BigUint::from(b), &m)?;
    let lhs: BigInt = 3 * w * psi_b;
    let rhs: BigInt = 2 * (w * w - 1);
    let diff = lhs - rhs;
    Ok(diff.mod_floor(&m).is_zero())
}
