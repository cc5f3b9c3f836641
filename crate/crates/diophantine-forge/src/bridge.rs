//! The variable tower U through J over inputs (X, Y, b, g, h, k, l, w, x, y),
//! the five relation predicates in integer-only form, and the desk-feasible
//! fragment of the forward witness construction.
//!
//! The relations jointly express "b is a power of two and Y divides the
//! central binomial coefficient at X" once the inputs range over integers;
//! here they are checked exactly, with the two rational inequalities cleared
//! of denominators.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::bitarith;
use crate::lucas;
use crate::mpoly::pow_bigint;
use crate::{Error, Result};

/// The ten free inputs, named as in the defining equations.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Default)]
pub struct BridgeInputs {
    pub X: BigInt,
    pub Y: BigInt,
    pub b: BigInt,
    pub g: BigInt,
    pub h: BigInt,
    pub k: BigInt,
    pub l: BigInt,
    pub w: BigInt,
    pub x: BigInt,
    pub y: BigInt,
}

/// The twelve derived quantities. Each is a polynomial in the inputs and its
/// predecessors; `bridge_vars` is the single evaluation path.
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BridgeVars {
    pub U: BigInt,
    pub V: BigInt,
    pub A: BigInt,
    pub B: BigInt,
    pub C: BigInt,
    pub D: BigInt,
    pub E: BigInt,
    pub F: BigInt,
    pub G: BigInt,
    pub H: BigInt,
    pub I: BigInt,
    pub J: BigInt,
}

/// Exact substitution of the defining equations.
pub fn bridge_vars(inp: &BridgeInputs) -> BridgeVars {
    let u: BigInt = 2 * &inp.l * &inp.X * &inp.Y;
    let v: BigInt = 4 * &inp.g * &inp.w * &inp.Y;
    let a: BigInt = &u * (&v + 1);
    let b: BigInt = 2 * &inp.X + 1;
    let c: BigInt = &b + (&a - 2) * &inp.h;
    let a2m4: BigInt = &a * &a - 4;
    let d: BigInt = &a2m4 * &c * &c + 4;
    let e: BigInt = &c * &c * &d * &inp.x;
    let f: BigInt = 4 * &a2m4 * &e * &e + 1;
    let g: BigInt = 1 + &c * &d * &f - 2 * (&a + 2) * (&a - 2) * (&a - 2) * &e * &e;
    let h: BigInt = &c + &b * &f + (2 * &inp.y - 1) * &c * &f;
    let i: BigInt = (&g * &g - 1) * &h * &h + 1;
    let j: BigInt = &inp.X + 1 + &inp.k * (&u * &u * &v - 2);
    BridgeVars {
        U: u,
        V: v,
        A: a,
        B: b,
        C: c,
        D: d,
        E: e,
        F: f,
        G: g,
        H: h,
        I: i,
        J: j,
    }
}

/// One of the five relation predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    DfiSquare,
    UvkSquare,
    Divisibility,
    IneqG,
    IneqWeak,
}

/// Outcome of all five relations at one point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RelationReport {
    pub dfi_square: bool,
    pub uvk_square: bool,
    pub divisibility: bool,
    pub ineq_g: bool,
    pub ineq_weak: bool,
}

impl RelationReport {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "dfi": self.dfi_square,
            "uvk": self.uvk_square,
            "div": self.divisibility,
            "g": self.ineq_g,
            "weak": self.ineq_weak,
        })
    }
}

/// Checks a single relation. The divisibility convention is n | m iff |n|
/// divides m, with 0 | m only for m = 0. The two inequalities are the
/// denominator-cleared forms 16 g^2 (C - lJY)^2 < J^2 and
/// 4 (C - lJY)^2 < J^2; both need J != 0, the first also g != 0.
pub fn relation_check(v: &BridgeVars, inp: &BridgeInputs, which: Relation) -> Result<bool> {
    match which {
        Relation::DfiSquare => Ok(bitarith::is_square(&(&v.D * &v.F * &v.I))),
        Relation::UvkSquare => {
            let u4v2: BigInt = pow_bigint(&v.U, 4) * &v.V * &v.V;
            let probe: BigInt = (u4v2 - 4) * &v.J * &v.J + 4;
            Ok(bitarith::is_square(&probe))
        }
        Relation::Divisibility => {
            let modulus: BigInt = 2 * &v.A - 5;
            let val: BigInt =
                3 * &inp.b * &inp.w * &v.C - 2 * (&inp.b * &inp.b * &inp.w * &inp.w - 1);
            Ok(bitarith::divides(&modulus, &val))
        }
        Relation::IneqG => {
            if v.J.is_zero() {
                return Err(Error::domain(
                    "the inequality (C/J - lY)^2 < 1/(16g^2) needs J != 0",
                ));
            }
            if inp.g.is_zero() {
                return Err(Error::domain(
                    "the inequality (C/J - lY)^2 < 1/(16g^2) needs g != 0",
                ));
            }
            let diff: BigInt = &v.C - &inp.l * &v.J * &inp.Y;
            Ok(16 * &inp.g * &inp.g * &diff * &diff < &v.J * &v.J)
        }
        Relation::IneqWeak => {
            if v.J.is_zero() {
                return Err(Error::domain(
                    "the inequality (C/J - lY)^2 < 1/4 needs J != 0",
                ));
            }
            let diff: BigInt = &v.C - &inp.l * &v.J * &inp.Y;
            Ok(4 * &diff * &diff < &v.J * &v.J)
        }
    }
}

/// Checks all five relations at once.
pub fn relations_check(v: &BridgeVars, inp: &BridgeInputs) -> Result<RelationReport> {
    Ok(RelationReport {
        dfi_square: relation_check(v, inp, Relation::DfiSquare)?,
        uvk_square: relation_check(v, inp, Relation::UvkSquare)?,
        divisibility: relation_check(v, inp, Relation::Divisibility)?,
        ineq_g: relation_check(v, inp, Relation::IneqG)?,
        ineq_weak: relation_check(v, inp, Relation::IneqWeak)?,
    })
}

/// floor((V+1)^(2X) / V^X) for V >= 1, the rational pivot of the witness
/// construction.
pub fn floor_rho(v: &BigInt, x: u64) -> Result<BigInt> {
    if !v.is_positive() {
        return Err(Error::domain("floor_rho needs V >= 1"));
    }
    let bits = (v + 1u32).bits();
    if bits.saturating_mul(2 * x) > crate::EVAL_BIT_GUARD {
        return Err(Error::resource(format!(
            "floor_rho at a {bits}-bit base and exponent {} exceeds the evaluation guard",
            2 * x
        )));
    }
    Ok(pow_bigint(&(v + 1), 2 * x) / pow_bigint(v, x))
}

/// (psi_B(A) - B) / (A - 2): the h making C = B + (A-2)h equal psi_B(A).
/// None when A = 2 (any h works there); exact otherwise because
/// psi_B(A) = B mod A - 2.
pub fn h_component(a: &BigInt, b_index: &BigInt) -> Result<Option<BigInt>> {
    if *a == BigInt::from(2) {
        return Ok(None);
    }
    let psi = lucas::psi_checked(a, b_index)?;
    let num: BigInt = psi - b_index;
    let den: BigInt = a - 2;
    if !(&num % &den).is_zero() {
        return Err(Error::invariant(
            "psi_B(A) - B must be divisible by A - 2",
        ));
    }
    Ok(Some(num / den))
}

/// (psi_{X+1}(m) - (X+1)) / (m - 2): the k making J = X + 1 + k(m - 2)
/// equal psi_{X+1}(m) at m = U^2 V. None when m = 2.
pub fn k_component(m: &BigInt, x: &BigInt) -> Result<Option<BigInt>> {
    if *m == BigInt::from(2) {
        return Ok(None);
    }
    let idx: BigInt = x + 1;
    let psi = lucas::psi_checked(m, &idx)?;
    let num: BigInt = psi - idx;
    let den: BigInt = m - 2;
    if !(&num % &den).is_zero() {
        return Err(Error::invariant(
            "psi_{X+1}(m) - (X+1) must be divisible by m - 2",
        ));
    }
    Ok(Some(num / den))
}

/// The desk-feasible part of the forward witness at (b, X, Y, g).
#[derive(Debug, Clone)]
pub struct PartialWitness {
    pub w: BigInt,
    pub floor_rho: BigInt,
    pub l: Option<BigInt>,
    pub h: Option<BigInt>,
    pub k: Option<BigInt>,
}

/// Constructs w = 2^(2X+1)/b, the floor of rho at V = 4gwY, l = floor/Y when
/// divisible, and the Lucas quotients h and k when their values fit the size
/// guard. The remaining witnesses x and y need apparition ranks modulo
/// numbers of magnitude A^(4X) and are out of desk-scale reach.
pub fn partial_witness(
    b: &BigInt,
    x: &BigInt,
    y: &BigInt,
    g: &BigInt,
) -> Result<PartialWitness> {
    if !bitarith::is_power_of_two(b) {
        return Err(Error::domain("partial witness needs b to be a power of two"));
    }
    if x < b {
        return Err(Error::domain("partial witness needs X >= b"));
    }
    if y < b || y < &BigInt::from(256) {
        return Err(Error::domain("partial witness needs Y >= max(b, 2^8)"));
    }
    if !g.is_positive() {
        return Err(Error::domain("partial witness needs g >= 1"));
    }
    let x_small = x
        .to_u64()
        .filter(|&xv| 2 * xv + 1 <= crate::EVAL_BIT_GUARD / 2)
        .ok_or_else(|| Error::resource("partial witness X exceeds the evaluation guard"))?;
    let binom = BigInt::from(bitarith::central_binomial(x.magnitude()));
    if !bitarith::divides(y, &binom) {
        return Err(Error::domain(
            "partial witness needs Y to divide binom(2X, X)",
        ));
    }
    let log_b = bitarith::exact_log2(b)?;
    let w: BigInt = BigInt::one() << (2 * x_small + 1 - log_b);
    let v: BigInt = 4 * g * &w * y;
    let rho = floor_rho(&v, x_small)?;
    let l = if (&rho % y).is_zero() {
        Some(&rho / y)
    } else {
        None
    };
    let mut h = None;
    let mut k = None;
    if let Some(l) = &l {
        let u: BigInt = 2 * l * x * y;
        let a: BigInt = &u * (&v + 1);
        let b_index: BigInt = 2 * x + 1;
        h = match h_component(&a, &b_index) {
            Ok(v) => v,
            Err(Error::Resource(_)) => None,
            Err(e) => return Err(e),
        };
        let m: BigInt = &u * &u * &v;
        k = match k_component(&m, x) {
            Ok(v) => v,
            Err(Error::Resource(_)) => None,
            Err(e) => return Err(e),
        };
    }
    Ok(PartialWitness {
        w,
        floor_rho: rho,
        l,
        h,
        k,
    })
}
