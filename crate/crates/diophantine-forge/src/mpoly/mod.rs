//! Sparse multivariate polynomial arithmetic over arbitrary-precision
//! integers, plus a composition DAG (`PolyExpr`) with exact evaluation,
//! compositional degree tracking, and budgeted expansion.

pub mod expr;

pub use expr::{CoeffSource, ExprBuilder, MqArgs, Node, NodeId, PolyExpr};

use std::collections::{BTreeMap, HashMap};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};
use serde_json::{json, Value};

use crate::error::{Error, Result};

/// Exponent assignment for one monomial, keyed by variable name. Zero
/// exponents are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct MultiIndex(pub BTreeMap<String, u64>);

impl MultiIndex {
    pub fn total(&self) -> u64 {
        self.0.values().sum()
    }

    pub fn get(&self, var: &str) -> u64 {
        self.0.get(var).copied().unwrap_or(0)
    }
}

/// A polynomial in canonical sparse form. Internally terms are keyed by
/// exponent vectors aligned to a sorted variable list; the variable list is
/// kept equal to the support (variables that actually occur).
#[derive(Debug, Clone)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: HashMap<Vec<u64>, BigInt>,
}

impl MultiPoly {
    pub fn zero() -> Self {
        MultiPoly {
            vars: Vec::new(),
            terms: HashMap::new(),
        }
    }

    pub fn one() -> Self {
        Self::constant(BigInt::one())
    }

    pub fn constant(c: impl Into<BigInt>) -> Self {
        let c = c.into();
        let mut terms = HashMap::new();
        if !c.is_zero() {
            terms.insert(Vec::new(), c);
        }
        MultiPoly {
            vars: Vec::new(),
            terms,
        }
    }

    pub fn var(name: impl Into<String>) -> Self {
        let mut terms = HashMap::new();
        terms.insert(vec![1u64], BigInt::one());
        MultiPoly {
            vars: vec![name.into()],
            terms,
        }
    }

    /// Build from named terms; like terms are combined, zero results dropped.
    pub fn from_terms(terms: impl IntoIterator<Item = (MultiIndex, BigInt)>) -> Self {
        let mut acc = MultiPoly::zero();
        for (idx, coef) in terms {
            if coef.is_zero() {
                continue;
            }
            let mut t = MultiPoly {
                vars: idx.0.keys().cloned().collect(),
                terms: HashMap::new(),
            };
            let key: Vec<u64> = idx.0.values().copied().collect();
            t.terms.insert(key, coef);
            acc = acc.add(&t);
        }
        acc
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.is_empty() || (self.terms.len() == 1 && self.terms.keys().next().unwrap().iter().all(|&e| e == 0))
    }

    pub fn as_constant(&self) -> Option<BigInt> {
        if self.is_zero() {
            return Some(BigInt::zero());
        }
        if self.is_constant() {
            return Some(self.terms.values().next().unwrap().clone());
        }
        None
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    /// Variables in the support, sorted.
    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    /// Terms as (named multi-index, coefficient) in canonical order:
    /// descending total degree, then descending exponent vector.
    pub fn terms_named(&self) -> Vec<(MultiIndex, BigInt)> {
        let mut keys: Vec<&Vec<u64>> = self.terms.keys().collect();
        keys.sort_by(|a, b| Self::term_cmp(a, b));
        keys.into_iter()
            .map(|k| {
                let mut m = BTreeMap::new();
                for (v, &e) in self.vars.iter().zip(k.iter()) {
                    if e > 0 {
                        m.insert(v.clone(), e);
                    }
                }
                (MultiIndex(m), self.terms[k].clone())
            })
            .collect()
    }

    fn term_cmp(a: &[u64], b: &[u64]) -> std::cmp::Ordering {
        let da: u64 = a.iter().sum();
        let db: u64 = b.iter().sum();
        db.cmp(&da).then_with(|| b.cmp(a))
    }

    /// Coefficient of the given monomial (0 if absent).
    pub fn coefficient(&self, idx: &MultiIndex) -> BigInt {
        for (v, _) in idx.0.iter() {
            if !self.vars.contains(v) {
                return BigInt::zero();
            }
        }
        let key: Vec<u64> = self.vars.iter().map(|v| idx.get(v)).collect();
        self.terms.get(&key).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn constant_coef(&self) -> BigInt {
        let key = vec![0u64; self.vars.len()];
        self.terms.get(&key).cloned().unwrap_or_else(BigInt::zero)
    }

    /// Sum of absolute values of all coefficients.
    pub fn coef_abs_sum(&self) -> BigUint {
        let mut s = BigUint::zero();
        for c in self.terms.values() {
            s += c.magnitude();
        }
        s
    }

    /// True when all coefficients share one sign (no cancellation possible in
    /// products of such polynomials).
    pub fn is_sign_uniform(&self) -> bool {
        let mut pos = false;
        let mut neg = false;
        for c in self.terms.values() {
            if c.is_positive() {
                pos = true;
            } else {
                neg = true;
            }
        }
        !(pos && neg)
    }

    /// Drop variables whose column is identically zero.
    fn normalize(mut self) -> Self {
        if self.vars.is_empty() {
            return self;
        }
        let n = self.vars.len();
        let mut used = vec![false; n];
        for key in self.terms.keys() {
            for (i, &e) in key.iter().enumerate() {
                if e > 0 {
                    used[i] = true;
                }
            }
        }
        if used.iter().all(|&u| u) {
            return self;
        }
        let keep: Vec<usize> = (0..n).filter(|&i| used[i]).collect();
        let vars: Vec<String> = keep.iter().map(|&i| self.vars[i].clone()).collect();
        let mut terms = HashMap::with_capacity(self.terms.len());
        for (key, coef) in self.terms.drain() {
            let nk: Vec<u64> = keep.iter().map(|&i| key[i]).collect();
            terms.insert(nk, coef);
        }
        MultiPoly { vars, terms }
    }

    /// Re-key both polynomials over the union of their variable lists.
    fn aligned<'a>(
        a: &'a MultiPoly,
        b: &'a MultiPoly,
    ) -> (
        Vec<String>,
        std::borrow::Cow<'a, HashMap<Vec<u64>, BigInt>>,
        std::borrow::Cow<'a, HashMap<Vec<u64>, BigInt>>,
    ) {
        use std::borrow::Cow;
        if a.vars == b.vars {
            return (a.vars.clone(), Cow::Borrowed(&a.terms), Cow::Borrowed(&b.terms));
        }
        let mut vars: Vec<String> = a.vars.iter().chain(b.vars.iter()).cloned().collect();
        vars.sort();
        vars.dedup();
        let rekey = |p: &MultiPoly| -> HashMap<Vec<u64>, BigInt> {
            let pos: Vec<usize> = p
                .vars
                .iter()
                .map(|v| vars.binary_search(v).expect("var in union"))
                .collect();
            p.terms
                .iter()
                .map(|(k, c)| {
                    let mut nk = vec![0u64; vars.len()];
                    for (i, &e) in k.iter().enumerate() {
                        nk[pos[i]] = e;
                    }
                    (nk, c.clone())
                })
                .collect()
        };
        let ta = rekey(a);
        let tb = rekey(b);
        (vars, Cow::Owned(ta), Cow::Owned(tb))
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        let (vars, ta, tb) = Self::aligned(self, other);
        let mut terms: HashMap<Vec<u64>, BigInt> = ta.into_owned();
        for (k, c) in tb.iter() {
            let entry = terms.entry(k.clone()).or_insert_with(BigInt::zero);
            *entry += c;
            if entry.is_zero() {
                terms.remove(k);
            }
        }
        MultiPoly { vars, terms }.normalize()
    }

    pub fn neg(&self) -> MultiPoly {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(k, c)| (k.clone(), -c)).collect(),
        }
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        self.mul_budget(other, usize::MAX)
            .expect("unbudgeted multiply cannot exceed")
    }

    /// Multiply with an intermediate term-count budget; exceeding it is an
    /// explicit resource error, never silent truncation.
    pub fn mul_budget(&self, other: &MultiPoly, budget: usize) -> Result<MultiPoly> {
        if self.is_zero() || other.is_zero() {
            return Ok(MultiPoly::zero());
        }
        let (vars, ta, tb) = Self::aligned(self, other);
        // Iterate the smaller operand in the outer loop: fewer allocations of
        // the shifted key.
        let (outer, inner) = if ta.len() <= tb.len() {
            (&*ta, &*tb)
        } else {
            (&*tb, &*ta)
        };
        let mut terms: HashMap<Vec<u64>, BigInt> =
            HashMap::with_capacity(inner.len().saturating_mul(2));
        // Check the budget inside the loop so oversized products abort
        // promptly instead of after a full pass.
        let mut since_check: u32 = 0;
        for (ko, co) in outer.iter() {
            for (ki, ci) in inner.iter() {
                let mut key = Vec::with_capacity(ko.len());
                for (x, y) in ko.iter().zip(ki.iter()) {
                    key.push(x.checked_add(*y).ok_or_else(|| {
                        Error::resource("exponent overflow in polynomial multiply")
                    })?);
                }
                let entry = terms.entry(key).or_insert_with(BigInt::zero);
                *entry += co * ci;
                if entry.is_zero() {
                    let k2: Vec<u64> = ko.iter().zip(ki.iter()).map(|(x, y)| x + y).collect();
                    terms.remove(&k2);
                }
                since_check += 1;
                if since_check == 4096 {
                    since_check = 0;
                    if terms.len() > budget {
                        return Err(Error::resource(format!(
                            "polynomial multiply exceeded term budget {budget}"
                        )));
                    }
                }
            }
        }
        if terms.len() > budget {
            return Err(Error::resource(format!(
                "polynomial multiply exceeded term budget {budget}"
            )));
        }
        Ok(MultiPoly { vars, terms }.normalize())
    }

    pub fn pow(&self, exp: u64) -> MultiPoly {
        self.pow_budget(exp, usize::MAX)
            .expect("unbudgeted power cannot exceed")
    }

    pub fn pow_budget(&self, exp: u64, budget: usize) -> Result<MultiPoly> {
        let mut result = MultiPoly::one();
        let mut base = self.clone();
        let mut e = exp;
        while e > 0 {
            if e & 1 == 1 {
                result = result.mul_budget(&base, budget)?;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul_budget(&base, budget)?;
            }
        }
        Ok(result)
    }

    /// Simultaneous substitution; unbound variables pass through.
    pub fn substitute(&self, bindings: &BTreeMap<String, MultiPoly>) -> MultiPoly {
        let mut acc = MultiPoly::zero();
        for (key, coef) in self.terms.iter() {
            let mut term = MultiPoly::constant(coef.clone());
            for (var, &e) in self.vars.iter().zip(key.iter()) {
                if e == 0 {
                    continue;
                }
                let factor = match bindings.get(var) {
                    Some(p) => p.pow(e),
                    None => MultiPoly::var(var.clone()).pow(e),
                };
                term = term.mul(&factor);
            }
            acc = acc.add(&term);
        }
        acc
    }

    /// Exact value at a point; all variables of the support must be bound.
    pub fn evaluate(&self, point: &BTreeMap<String, BigInt>) -> Result<BigInt> {
        for v in &self.vars {
            if !point.contains_key(v) {
                return Err(Error::UnboundVariable(v.clone()));
            }
        }
        let vals: Vec<&BigInt> = self.vars.iter().map(|v| &point[v]).collect();
        let mut acc = BigInt::zero();
        for (key, coef) in self.terms.iter() {
            let mut t = coef.clone();
            for (i, &e) in key.iter().enumerate() {
                if e == 0 {
                    continue;
                }
                t *= pow_bigint(vals[i], e);
            }
            acc += t;
        }
        Ok(acc)
    }

    /// Max over terms of the exponent sum; the zero polynomial has none.
    pub fn total_degree(&self) -> Result<u64> {
        if self.is_zero() {
            return Err(Error::ZeroDegree);
        }
        Ok(self
            .terms
            .keys()
            .map(|k| k.iter().sum::<u64>())
            .max()
            .expect("nonempty"))
    }

    pub fn to_json(&self) -> Value {
        let terms: Vec<Value> = self
            .terms_named()
            .into_iter()
            .map(|(idx, coef)| {
                let exp: serde_json::Map<String, Value> = idx
                    .0
                    .into_iter()
                    .map(|(v, e)| (v, json!(e)))
                    .collect();
                json!({"exp": exp, "coef": coef.to_string()})
            })
            .collect();
        json!({"vars": self.vars, "terms": terms})
    }

    pub fn from_json(v: &Value) -> Result<MultiPoly> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::domain("polynomial JSON must be an object"))?;
        let terms = obj
            .get("terms")
            .and_then(|t| t.as_array())
            .ok_or_else(|| Error::domain("polynomial JSON needs a \"terms\" array"))?;
        let mut parsed: Vec<(MultiIndex, BigInt)> = Vec::with_capacity(terms.len());
        for t in terms {
            let exp = t
                .get("exp")
                .and_then(|e| e.as_object())
                .ok_or_else(|| Error::domain("term needs an \"exp\" object"))?;
            let coef_s = t
                .get("coef")
                .and_then(|c| c.as_str())
                .ok_or_else(|| Error::domain("term needs a decimal-string \"coef\""))?;
            let coef: BigInt = coef_s
                .parse()
                .map_err(|_| Error::domain(format!("bad coefficient {coef_s:?}")))?;
            let mut idx = BTreeMap::new();
            for (var, e) in exp {
                let e = e
                    .as_u64()
                    .ok_or_else(|| Error::domain(format!("bad exponent for {var}")))?;
                if var.is_empty() {
                    return Err(Error::domain("empty variable name"));
                }
                if e > 0 {
                    idx.insert(var.clone(), e);
                }
            }
            parsed.push((MultiIndex(idx), coef));
        }
        Ok(MultiPoly::from_terms(parsed))
    }
}

impl PartialEq for MultiPoly {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        // Different supports can only be equal through unnormalized inputs;
        // compare name-keyed views.
        self.terms_named() == other.terms_named()
    }
}

impl Eq for MultiPoly {}

impl std::fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (idx, coef) in self.terms_named() {
            let mag = coef.magnitude();
            if first {
                if coef.is_negative() {
                    write!(f, "-")?;
                }
                first = false;
            } else if coef.is_negative() {
                write!(f, " - ")?;
            } else {
                write!(f, " + ")?;
            }
            let mut parts: Vec<String> = Vec::new();
            if !mag.is_one() || idx.0.is_empty() {
                parts.push(mag.to_string());
            }
            for (v, e) in idx.0.iter() {
                if *e == 1 {
                    parts.push(v.clone());
                } else {
                    parts.push(format!("{v}^{e}"));
                }
            }
            write!(f, "{}", parts.join("*"))?;
        }
        Ok(())
    }
}

/// base^exp for arbitrary-precision base and u64 exponent.
pub(crate) fn pow_bigint(base: &BigInt, exp: u64) -> BigInt {
    let mut result = BigInt::one();
    let mut b = base.clone();
    let mut e = exp;
    while e > 0 {
        if e & 1 == 1 {
            result = &result * &b;
        }
        e >>= 1;
        if e > 0 {
            b = &b * &b;
        }
    }
    result
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(text: &str) -> MultiPoly {
        crate::cli::parse_poly(text).unwrap()
    }

    #[test]
    fn construction_and_equality() {
        let x = MultiPoly::var("a");
        let one = MultiPoly::one();
        let sum = x.add(&one);
        assert_eq!(sum.term_count(), 2);
        assert_eq!(sum.total_degree().unwrap(), 1);
        assert_eq!(sum.vars(), &["a".to_string()]);
        assert_eq!(sum, one.add(&x));
    }

    #[test]
    fn difference_of_squares() {
        let x = MultiPoly::var("a");
        let one = MultiPoly::one();
        let prod = x.add(&one).mul(&x.sub(&one));
        let expect = x.mul(&x).sub(&one);
        assert_eq!(prod, expect);
    }

    #[test]
    fn pow_zero_is_one() {
        let x = MultiPoly::var("a").add(&MultiPoly::var("z1"));
        assert_eq!(x.pow(0), MultiPoly::one());
        assert_eq!(MultiPoly::zero().pow(0), MultiPoly::one());
    }

    #[test]
    fn cancellation_gives_zero() {
        let t = MultiPoly::var("a")
            .pow(2)
            .mul(&MultiPoly::var("z1"))
            .mul(&MultiPoly::constant(2));
        let s = t.add(&t.neg());
        assert!(s.is_zero());
        assert!(s.total_degree().is_err());
        assert!(s.vars().is_empty());
    }

    #[test]
    fn constant_degree_zero() {
        assert_eq!(MultiPoly::constant(5).total_degree().unwrap(), 0);
    }

    #[test]
    fn substitution_examples() {
        let zp1 = MultiPoly::var("z1").add(&MultiPoly::one());
        let mut b = BTreeMap::new();
        b.insert("z1".to_string(), MultiPoly::var("y").pow(2));
        assert_eq!(
            zp1.substitute(&b),
            MultiPoly::var("y").pow(2).add(&MultiPoly::one())
        );

        let sq = MultiPoly::var("a").pow(2);
        let mut b2 = BTreeMap::new();
        b2.insert(
            "a".to_string(),
            MultiPoly::var("a").add(&MultiPoly::one()),
        );
        assert_eq!(sq.substitute(&b2), p("a^2 + 2*a + 1"));
    }

    #[test]
    fn substitute_unbound_passes_through() {
        let q = p("a + z1");
        let mut b = BTreeMap::new();
        b.insert("z1".to_string(), MultiPoly::constant(3));
        assert_eq!(q.substitute(&b), p("a + 3"));
    }

    #[test]
    fn evaluate_examples() {
        let q = p("a + 1 - z1");
        let mut pt = BTreeMap::new();
        pt.insert("a".to_string(), BigInt::from(2));
        pt.insert("z1".to_string(), BigInt::from(3));
        assert_eq!(q.evaluate(&pt).unwrap(), BigInt::zero());

        let r = p("a^2 - 1");
        let mut pt2 = BTreeMap::new();
        pt2.insert("a".to_string(), BigInt::zero());
        assert_eq!(r.evaluate(&pt2).unwrap(), BigInt::from(-1));

        match q.evaluate(&pt2) {
            Err(Error::UnboundVariable(v)) => assert_eq!(v, "z1"),
            other => panic!("expected unbound variable, got {other:?}"),
        }
    }

    #[test]
    fn suitable_shape_degree() {
        let q = p("(a - z1)^2 + (z2 - 1)^2");
        assert_eq!(q.total_degree().unwrap(), 2);
    }

    #[test]
    fn mul_budget_enforced() {
        let dense = p("(a + z1 + z2 + 1)^4");
        let err = dense.mul_budget(&dense, 10).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn json_round_trip() {
        let q = p("3*a^2*z1 - 2*z1^3 + 7");
        let v = q.to_json();
        let back = MultiPoly::from_json(&v).unwrap();
        assert_eq!(q, back);
    }

    #[test]
    fn display_round_trip() {
        for text in [
            "3*a^2*z1 - 2*z1^3 + 7",
            "a + 1 - z1",
            "-a^3 + z2",
            "0",
            "-5",
            "(a - z1)^2 + (z2 - 1)^2",
        ] {
            let q = p(text);
            let printed = q.to_string();
            let back = crate::cli::parse_poly(&printed).unwrap();
            assert_eq!(q, back, "round trip of {text:?} via {printed:?}");
        }
    }

    #[test]
    fn abs_sum_and_sign_uniform() {
        let q = p("3*a - 2*z1 + 1");
        assert_eq!(q.coef_abs_sum(), BigUint::from(6u32));
        assert!(!q.is_sign_uniform());
        assert!(p("3*a + 2*z1 + 1").is_sign_uniform());
        assert!(p("-3*a - 1").is_sign_uniform());
        assert!(MultiPoly::zero().is_sign_uniform());
    }

    #[test]
    fn coefficient_lookup() {
        let q = p("3*a^2*z1 - 2*z1^3 + 7");
        let mut m = BTreeMap::new();
        m.insert("a".to_string(), 2u64);
        m.insert("z1".to_string(), 1u64);
        assert_eq!(q.coefficient(&MultiIndex(m)), BigInt::from(3));
        assert_eq!(q.constant_coef(), BigInt::from(7));
        assert_eq!(q.coefficient(&MultiIndex::default()), BigInt::from(7));
    }
}
