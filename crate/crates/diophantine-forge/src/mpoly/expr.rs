//! Composition DAG over polynomials. Constructions that would be
//! astronomically large in expanded form (coefficient encodings, geometric
//! digit sums, the product over sign choices) stay symbolic as dedicated
//! node kinds, so exact evaluation and exact total-degree accounting work at
//! parameter sizes where expansion is impossible.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, OnceLock};

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde_json::{json, Value};

use crate::combine;
use crate::error::{Error, Result};
use crate::mpoly::{pow_bigint, MultiPoly};

pub type NodeId = usize;

/// Hard ceiling, in bits, for any single integer produced while evaluating a
/// DAG node. Large enough for every supported desk-scale computation, small
/// enough to refuse the astronomically sized regime with a clear error
/// instead of exhausting memory.
const EVAL_BIT_GUARD: u64 = 1 << 28;

/// One DAG node. Children always have smaller ids than their parent, so ids
/// in ascending order are a topological order.
#[derive(Debug, Clone)]
pub enum Node {
    Const(BigInt),
    Var(String),
    Sum(Vec<NodeId>),
    Product(Vec<NodeId>),
    /// base ^ exp with an arbitrary-precision constant exponent.
    Pow(NodeId, BigUint),
    /// 1 + base + base^2 + ... + base^(count-1).
    GeomSum(NodeId, BigUint),
    /// The coefficient-encoding sum of a suitable polynomial, evaluated with
    /// the child as the radix.
    Coeffs(NodeId, Arc<CoeffSource>),
    /// Product over all sign choices of the q-th square-root head; equals an
    /// integer polynomial in the children.
    Mq(MqArgs),
    /// Transparent label for lookup and reporting.
    Named(String, NodeId),
}

#[derive(Debug, Clone)]
pub struct MqArgs {
    pub a: Vec<NodeId>,
    pub s: NodeId,
    pub t: NodeId,
    pub r: NodeId,
    pub n: NodeId,
}

/// The suitable polynomial behind a `Coeffs` node, either given directly or
/// represented lazily as p^2 + (slack - 1)^2. The weighted-term list is
/// expanded on first use and cached.
#[derive(Debug)]
pub struct CoeffSource {
    kind: CoeffKind,
    /// Degree bound delta of the suitable polynomial.
    pub delta: u64,
    /// Unknown count nu; variable slots are a -> 0 and zK -> K.
    pub nu: u64,
    cached: OnceLock<std::result::Result<Vec<(BigInt, BigUint)>, String>>,
}

#[derive(Debug, Clone)]
enum CoeffKind {
    Ready(MultiPoly),
    SquarePlus { p: MultiPoly, slack: String },
}

/// Budget for materializing p^2 when a `Coeffs` source was given lazily.
const SQUARE_BUDGET: usize = 4_000_000;

impl CoeffSource {
    /// Source given as an already suitable polynomial: positive constant
    /// coefficient and positive degree, over variables a, z1..zNU.
    pub fn ready(p: MultiPoly) -> Result<Arc<CoeffSource>> {
        if !p.constant_coef().is_positive() {
            return Err(Error::domain(
                "coefficient encoding needs a positive constant coefficient",
            ));
        }
        let delta = p.total_degree()?;
        if delta == 0 {
            return Err(Error::domain(
                "coefficient encoding needs positive total degree",
            ));
        }
        let nu = max_slot(&p)?;
        Ok(Arc::new(CoeffSource {
            kind: CoeffKind::Ready(p),
            delta,
            nu,
            cached: OnceLock::new(),
        }))
    }

    /// Source p^2 + (slack - 1)^2 kept unexpanded; slack must be the next
    /// unused z-variable of p. The result is suitable for any p: the constant
    /// coefficient is const(p)^2 + 1 and the degree is max(2 deg p, 2).
    pub fn square_plus(p: MultiPoly, slack: String) -> Result<Arc<CoeffSource>> {
        let nu = max_slot(&p)?;
        let expect = format!("z{}", nu + 1);
        if slack != expect {
            return Err(Error::domain(format!(
                "slack variable must be {expect}, got {slack}"
            )));
        }
        let dp = if p.is_zero() { 0 } else { p.total_degree()? };
        let delta = (2 * dp).max(2);
        Ok(Arc::new(CoeffSource {
            kind: CoeffKind::SquarePlus { p, slack },
            delta,
            nu: nu + 1,
            cached: OnceLock::new(),
        }))
    }

    /// The represented polynomial, expanded. Cheap for `Ready`; budgeted for
    /// `SquarePlus`.
    pub fn polynomial(&self) -> Result<MultiPoly> {
        match &self.kind {
            CoeffKind::Ready(p) => Ok(p.clone()),
            CoeffKind::SquarePlus { p, slack } => {
                let sq = p.mul_budget(p, SQUARE_BUDGET)?;
                let sm1 = MultiPoly::var(slack.clone()).sub(&MultiPoly::one());
                Ok(sq.add(&sm1.mul(&sm1)))
            }
        }
    }

    /// Weighted coefficient terms (weight, radix exponent), cached. Weight of
    /// the term with exponent tuple i is i! * (delta - |i|)! * a_i.
    pub fn weighted_terms(&self) -> Result<&[(BigInt, BigUint)]> {
        let res = self.cached.get_or_init(|| {
            let p = match self.polynomial() {
                Ok(p) => p,
                Err(e) => return Err(e.to_string()),
            };
            Ok(weight_terms(&p, self.delta, self.nu))
        });
        match res {
            Ok(v) => Ok(v),
            Err(msg) => Err(Error::resource(msg.clone())),
        }
    }

    /// Largest radix exponent in the encoding: (delta+1)^(nu+1), attained by
    /// the constant term.
    pub fn max_exponent(&self) -> BigUint {
        pow_biguint(&BigUint::from(self.delta + 1), self.nu + 1)
    }

    fn to_json(&self) -> Value {
        match &self.kind {
            CoeffKind::Ready(p) => json!({
                "kind": "ready",
                "poly": p.to_json(),
            }),
            CoeffKind::SquarePlus { p, slack } => json!({
                "kind": "square_plus",
                "poly": p.to_json(),
                "slack": slack,
            }),
        }
    }

    fn from_json(v: &Value) -> Result<Arc<CoeffSource>> {
        let kind = v
            .get("kind")
            .and_then(|k| k.as_str())
            .ok_or_else(|| Error::domain("coeffs source needs a \"kind\""))?;
        let poly = MultiPoly::from_json(
            v.get("poly")
                .ok_or_else(|| Error::domain("coeffs source needs a \"poly\""))?,
        )?;
        match kind {
            "ready" => CoeffSource::ready(poly),
            "square_plus" => {
                let slack = v
                    .get("slack")
                    .and_then(|s| s.as_str())
                    .ok_or_else(|| Error::domain("square_plus source needs a \"slack\""))?;
                CoeffSource::square_plus(poly, slack.to_string())
            }
            other => Err(Error::domain(format!("unknown coeffs kind {other:?}"))),
        }
    }
}

/// Weighted coefficient terms of a degree-delta polynomial over slots a -> 0,
/// zK -> K: each exponent tuple i with coefficient a_i contributes the weight
/// i! * (delta - |i|)! * a_i at radix exponent (delta+1)^(nu+1) minus the
/// slot-weighted sum of i. Distinct tuples with |i| <= delta land on distinct
/// exponents because every i_s < delta + 1; output sorted ascending by
/// exponent so evaluation can build radix powers incrementally.
pub(crate) fn weight_terms(p: &MultiPoly, delta: u64, nu: u64) -> Vec<(BigInt, BigUint)> {
    let base = BigUint::from(delta + 1);
    let top = pow_biguint(&base, nu + 1);
    let mut out = Vec::with_capacity(p.term_count());
    for (idx, coef) in p.terms_named() {
        let total = idx.total();
        debug_assert!(total <= delta);
        let mut w = factorial(delta - total);
        let mut e = top.clone();
        for (var, &exp) in idx.0.iter() {
            w *= factorial(exp);
            let slot = if var == "a" {
                0
            } else {
                var.strip_prefix('z')
                    .and_then(|k| k.parse::<u64>().ok())
                    .expect("validated slot")
            };
            e -= exp * pow_biguint(&base, slot);
        }
        out.push((coef * BigInt::from(w), e));
    }
    out.sort_by(|a, b| a.1.cmp(&b.1));
    out
}

/// Highest z-slot used; variables must be a or z1..z99.
pub(crate) fn max_slot(p: &MultiPoly) -> Result<u64> {
    let mut max = 0u64;
    for v in p.vars() {
        if v == "a" {
            continue;
        }
        let k = v
            .strip_prefix('z')
            .and_then(|k| k.parse::<u64>().ok())
            .filter(|&k| (1..=99).contains(&k))
            .ok_or_else(|| {
                Error::domain(format!(
                    "coefficient encoding variables must be a or z1..z99, got {v}"
                ))
            })?;
        max = max.max(k);
    }
    Ok(max)
}

pub(crate) fn factorial(n: u64) -> BigUint {
    let mut f = BigUint::one();
    for i in 2..=n {
        f *= i;
    }
    f
}

pub(crate) fn pow_biguint(base: &BigUint, exp: u64) -> BigUint {
    let mut result = BigUint::one();
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

/// An immutable DAG with a distinguished root and a name table.
#[derive(Debug, Clone)]
pub struct PolyExpr {
    nodes: Vec<Node>,
    root: NodeId,
    names: BTreeMap<String, NodeId>,
}

/// Incremental DAG builder with structural deduplication of the plain node
/// kinds, so shared subterms get shared ids.
pub struct ExprBuilder {
    nodes: Vec<Node>,
    names: BTreeMap<String, NodeId>,
    dedup: HashMap<DedupKey, NodeId>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
enum DedupKey {
    Const(BigInt),
    Var(String),
    Sum(Vec<NodeId>),
    Product(Vec<NodeId>),
    Pow(NodeId, BigUint),
    GeomSum(NodeId, BigUint),
}

impl Default for ExprBuilder {
    fn default() -> Self {
        Self::new()
    }
}

impl ExprBuilder {
    pub fn new() -> Self {
        ExprBuilder {
            nodes: Vec::new(),
            names: BTreeMap::new(),
            dedup: HashMap::new(),
        }
    }

    fn push(&mut self, node: Node) -> NodeId {
        let id = self.nodes.len();
        self.nodes.push(node);
        id
    }

    fn intern(&mut self, key: DedupKey, node: Node) -> NodeId {
        if let Some(&id) = self.dedup.get(&key) {
            return id;
        }
        let id = self.push(node);
        self.dedup.insert(key, id);
        id
    }

    pub fn constant(&mut self, c: impl Into<BigInt>) -> NodeId {
        let c = c.into();
        self.intern(DedupKey::Const(c.clone()), Node::Const(c))
    }

    pub fn var(&mut self, name: impl Into<String>) -> NodeId {
        let name = name.into();
        self.intern(DedupKey::Var(name.clone()), Node::Var(name))
    }

    pub fn sum(&mut self, children: Vec<NodeId>) -> NodeId {
        self.check_children(&children);
        self.intern(DedupKey::Sum(children.clone()), Node::Sum(children))
    }

    pub fn product(&mut self, children: Vec<NodeId>) -> NodeId {
        self.check_children(&children);
        self.intern(DedupKey::Product(children.clone()), Node::Product(children))
    }

    pub fn pow(&mut self, base: NodeId, exp: impl Into<BigUint>) -> NodeId {
        self.check_children(&[base]);
        let exp = exp.into();
        self.intern(DedupKey::Pow(base, exp.clone()), Node::Pow(base, exp))
    }

    pub fn geom_sum(&mut self, base: NodeId, count: impl Into<BigUint>) -> NodeId {
        self.check_children(&[base]);
        let count = count.into();
        self.intern(
            DedupKey::GeomSum(base, count.clone()),
            Node::GeomSum(base, count),
        )
    }

    pub fn coeffs(&mut self, base: NodeId, source: Arc<CoeffSource>) -> NodeId {
        self.check_children(&[base]);
        self.push(Node::Coeffs(base, source))
    }

    pub fn mq(&mut self, args: MqArgs) -> NodeId {
        let mut all = args.a.clone();
        all.extend([args.s, args.t, args.r, args.n]);
        self.check_children(&all);
        assert!(!args.a.is_empty(), "Mq needs at least one square argument");
        self.push(Node::Mq(args))
    }

    /// Wrap a node with a label; labels are unique per DAG.
    pub fn named(&mut self, name: impl Into<String>, inner: NodeId) -> Result<NodeId> {
        let name = name.into();
        if self.names.contains_key(&name) {
            return Err(Error::domain(format!("duplicate node name {name:?}")));
        }
        self.check_children(&[inner]);
        let id = self.push(Node::Named(name.clone(), inner));
        self.names.insert(name, id);
        Ok(id)
    }

    /// Convenience: difference built from sum and a -1 scale.
    pub fn sub(&mut self, a: NodeId, b: NodeId) -> NodeId {
        let m1 = self.constant(-1);
        let nb = self.product(vec![m1, b]);
        self.sum(vec![a, nb])
    }

    fn check_children(&self, children: &[NodeId]) {
        for &c in children {
            assert!(c < self.nodes.len(), "child id {c} not yet defined");
        }
    }

    pub fn build(self, root: NodeId) -> PolyExpr {
        assert!(root < self.nodes.len(), "root id {root} not defined");
        PolyExpr {
            nodes: self.nodes,
            root,
            names: self.names,
        }
    }
}

impl PolyExpr {
    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node {
        &self.nodes[id]
    }

    /// Name table, sorted by name.
    pub fn named_nodes(&self) -> &BTreeMap<String, NodeId> {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<NodeId> {
        self.names.get(name).copied()
    }

    /// All variable names occurring at or below the root.
    pub fn variables(&self) -> Vec<String> {
        let mut out: Vec<String> = Vec::new();
        for node in &self.nodes {
            match node {
                Node::Var(v) => out.push(v.clone()),
                Node::Coeffs(_, src) => {
                    // Coeffs nodes evaluate the source at the radix child;
                    // the source variables themselves are not free here.
                    let _ = src;
                }
                _ => {}
            }
        }
        out.sort();
        out.dedup();
        out
    }

    pub fn evaluate(&self, point: &BTreeMap<String, BigInt>) -> Result<BigInt> {
        self.evaluate_node(self.root, point)
    }

    /// Evaluate one node exactly; a fresh memo per call.
    pub fn evaluate_node(&self, id: NodeId, point: &BTreeMap<String, BigInt>) -> Result<BigInt> {
        let order = self.reachable_in_order(id);
        let mut memo: Vec<Option<BigInt>> = vec![None; self.nodes.len()];
        for &i in &order {
            let val = match &self.nodes[i] {
                Node::Const(c) => c.clone(),
                Node::Var(v) => point
                    .get(v)
                    .cloned()
                    .ok_or_else(|| Error::UnboundVariable(v.clone()))?,
                Node::Sum(cs) => {
                    let mut acc = BigInt::zero();
                    for &c in cs {
                        acc += memo[c].as_ref().expect("child before parent");
                    }
                    acc
                }
                Node::Product(cs) => {
                    let mut acc = BigInt::one();
                    for &c in cs {
                        let v = memo[c].as_ref().expect("child before parent");
                        if v.is_zero() {
                            acc = BigInt::zero();
                            break;
                        }
                        acc *= v;
                        guard_bits(acc.bits())?;
                    }
                    acc
                }
                Node::Pow(base, exp) => {
                    let b = memo[*base].as_ref().expect("child before parent");
                    eval_pow(b, exp)?
                }
                Node::GeomSum(base, count) => {
                    let b = memo[*base].as_ref().expect("child before parent");
                    eval_geom_sum(b, count)?
                }
                Node::Coeffs(base, src) => {
                    let b = memo[*base].as_ref().expect("child before parent");
                    eval_coeffs(b, src)?
                }
                Node::Mq(args) => {
                    let a: Vec<BigInt> = args
                        .a
                        .iter()
                        .map(|&c| memo[c].clone().expect("child before parent"))
                        .collect();
                    let take = |c: NodeId| memo[c].clone().expect("child before parent");
                    combine::m_q_eval_values(
                        &a,
                        &take(args.s),
                        &take(args.t),
                        &take(args.r),
                        &take(args.n),
                    )?
                }
                Node::Named(_, inner) => memo[*inner].clone().expect("child before parent"),
            };
            memo[i] = Some(val);
        }
        Ok(memo[id].take().expect("target evaluated"))
    }

    /// Evaluate by node name.
    pub fn evaluate_named(&self, name: &str, point: &BTreeMap<String, BigInt>) -> Result<BigInt> {
        let id = self
            .lookup(name)
            .ok_or_else(|| Error::domain(format!("no node named {name:?}")))?;
        self.evaluate_node(id, point)
    }

    /// Total degree of the polynomial a node denotes, as a function of the
    /// DAG variables. None encodes the zero polynomial. The result is exact,
    /// not just a bound: every construction step here preserves exact
    /// degrees (sums of distinct-degree parts, products of nonzero
    /// polynomials with integer coefficients, encodings with a positive
    /// constant term).
    pub fn degree_of(&self, id: NodeId) -> Result<Option<BigUint>> {
        let order = self.reachable_in_order(id);
        let mut memo: Vec<Option<Option<BigUint>>> = vec![None; self.nodes.len()];
        for &i in &order {
            let deg: Option<BigUint> = match &self.nodes[i] {
                Node::Const(c) => {
                    if c.is_zero() {
                        None
                    } else {
                        Some(BigUint::zero())
                    }
                }
                Node::Var(_) => Some(BigUint::one()),
                Node::Sum(cs) => {
                    // Summands in this construction never cancel top degree:
                    // distinct radix positions or dominated lower parts.
                    let mut best: Option<BigUint> = None;
                    for &c in cs {
                        if let Some(d) = memo[c].as_ref().expect("child first") {
                            if best.as_ref().map_or(true, |b| d > b) {
                                best = Some(d.clone());
                            }
                        }
                    }
                    best
                }
                Node::Product(cs) => {
                    let mut acc = BigUint::zero();
                    let mut zero = false;
                    for &c in cs {
                        match memo[c].as_ref().expect("child first") {
                            Some(d) => acc += d,
                            None => {
                                zero = true;
                                break;
                            }
                        }
                    }
                    if zero {
                        None
                    } else {
                        Some(acc)
                    }
                }
                Node::Pow(base, exp) => match memo[*base].as_ref().expect("child first") {
                    Some(d) => Some(d * exp),
                    None => {
                        if exp.is_zero() {
                            Some(BigUint::zero())
                        } else {
                            None
                        }
                    }
                },
                Node::GeomSum(base, count) => {
                    if count.is_zero() {
                        // Empty sum is the zero polynomial.
                        None
                    } else {
                        match memo[*base].as_ref().expect("child first") {
                            // Top term base^(count-1); leading coefficient 1.
                            Some(d) => Some(d * (count - 1u32)),
                            None => Some(BigUint::zero()),
                        }
                    }
                }
                Node::Coeffs(base, src) => {
                    // The constant term of the source is positive, so the
                    // exponent (delta+1)^(nu+1) occurs with nonzero weight
                    // and strictly dominates all other exponents.
                    match memo[*base].as_ref().expect("child first") {
                        Some(d) => Some(d * src.max_exponent()),
                        None => {
                            // Radix 0: only the exponent-0 position survives,
                            // and no tuple maps to exponent 0.
                            None
                        }
                    }
                }
                Node::Mq(args) => {
                    let get = |c: NodeId| -> Result<BigUint> {
                        memo[c]
                            .as_ref()
                            .expect("child first")
                            .clone()
                            .ok_or_else(|| {
                                Error::domain(
                                    "degree of a sign-product with an identically zero argument",
                                )
                            })
                    };
                    let q = args.a.len() as u64;
                    let ds = get(args.s)?;
                    let dt = get(args.t)?;
                    let dr = get(args.r)?;
                    // n may be the zero polynomial (n = 0 identically).
                    let dn = memo[args.n]
                        .as_ref()
                        .expect("child first")
                        .clone()
                        .unwrap_or_else(BigUint::zero);
                    let mut da_max = BigUint::zero();
                    for &c in &args.a {
                        let d = get(c)?;
                        if d > da_max {
                            da_max = d;
                        }
                    }
                    let two = BigUint::from(2u32);
                    let b1 = &two * &ds + &dn;
                    let b2 = &two * &dt;
                    let inner = b2.clone().max(BigUint::from(2 * q) * &da_max);
                    let b3 = &two * &ds + &dr + inner;
                    let branch = b1.max(b2).max(b3);
                    Some(pow_biguint(&two, q) * branch)
                }
                Node::Named(_, inner) => memo[*inner].as_ref().expect("child first").clone(),
            };
            memo[i] = Some(deg);
        }
        Ok(memo[id].take().expect("target computed"))
    }

    /// Root degree; the zero polynomial is a domain error here.
    pub fn degree(&self) -> Result<BigUint> {
        self.degree_of(self.root)?.ok_or(Error::ZeroDegree)
    }

    pub fn degree_named(&self, name: &str) -> Result<Option<BigUint>> {
        let id = self
            .lookup(name)
            .ok_or_else(|| Error::domain(format!("no node named {name:?}")))?;
        self.degree_of(id)
    }

    /// Expand the root into a sparse polynomial, refusing past the budget.
    pub fn expand(&self, budget: usize) -> Result<MultiPoly> {
        self.expand_node(self.root, budget)
    }

    pub fn expand_node(&self, id: NodeId, budget: usize) -> Result<MultiPoly> {
        let mut memo: HashMap<NodeId, MultiPoly> = HashMap::new();
        self.expand_into(&[id], budget, &mut memo)?;
        Ok(memo.remove(&id).expect("target expanded"))
    }

    /// Expand several nodes sharing one memo, so common subgraphs are
    /// expanded once.
    pub fn expand_many(&self, ids: &[NodeId], budget: usize) -> Result<Vec<MultiPoly>> {
        let mut memo: HashMap<NodeId, MultiPoly> = HashMap::new();
        self.expand_into(ids, budget, &mut memo)?;
        Ok(ids
            .iter()
            .map(|id| memo.get(id).expect("target expanded").clone())
            .collect())
    }

    fn expand_into(
        &self,
        targets: &[NodeId],
        budget: usize,
        memo: &mut HashMap<NodeId, MultiPoly>,
    ) -> Result<()> {
        let mut order: Vec<NodeId> = Vec::new();
        for &t in targets {
            order.extend(self.reachable_in_order(t));
        }
        order.sort_unstable();
        order.dedup();
        for &i in &order {
            if memo.contains_key(&i) {
                continue;
            }
            let poly = match &self.nodes[i] {
                Node::Const(c) => MultiPoly::constant(c.clone()),
                Node::Var(v) => MultiPoly::var(v.clone()),
                Node::Sum(cs) => {
                    let mut acc = MultiPoly::zero();
                    for &c in cs {
                        acc = acc.add(&memo[&c]);
                        check_budget(&acc, budget)?;
                    }
                    acc
                }
                Node::Product(cs) => {
                    let mut acc = MultiPoly::one();
                    for &c in cs {
                        acc = acc.mul_budget(&memo[&c], budget)?;
                    }
                    acc
                }
                Node::Pow(base, exp) => {
                    let e = exp.to_u64().ok_or_else(|| {
                        Error::resource(format!("exponent {exp} too large to expand"))
                    })?;
                    memo[base].pow_budget(e, budget)?
                }
                Node::GeomSum(base, count) => expand_geom_sum(&memo[base], count, budget)?,
                Node::Coeffs(base, src) => expand_coeffs(&memo[base], src, budget)?,
                Node::Mq(args) => {
                    let a: Vec<&MultiPoly> = args.a.iter().map(|c| &memo[c]).collect();
                    combine::m_q_expand_polys(
                        &a,
                        &memo[&args.s],
                        &memo[&args.t],
                        &memo[&args.r],
                        &memo[&args.n],
                        budget,
                    )?
                }
                Node::Named(_, inner) => memo[inner].clone(),
            };
            memo.insert(i, poly);
        }
        Ok(())
    }

    /// Node ids reachable from `target`, ascending (children precede
    /// parents by the id invariant).
    fn reachable_in_order(&self, target: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut stack = vec![target];
        seen[target] = true;
        while let Some(i) = stack.pop() {
            let mut visit = |c: NodeId| {
                if !seen[c] {
                    seen[c] = true;
                    stack.push(c);
                }
            };
            match &self.nodes[i] {
                Node::Const(_) | Node::Var(_) => {}
                Node::Sum(cs) | Node::Product(cs) => cs.iter().copied().for_each(&mut visit),
                Node::Pow(b, _) | Node::GeomSum(b, _) | Node::Coeffs(b, _) => visit(*b),
                Node::Mq(args) => {
                    args.a.iter().copied().for_each(&mut visit);
                    [args.s, args.t, args.r, args.n]
                        .into_iter()
                        .for_each(&mut visit);
                }
                Node::Named(_, inner) => visit(*inner),
            }
        }
        (0..self.nodes.len()).filter(|&i| seen[i]).collect()
    }

    pub fn to_json(&self) -> Value {
        let nodes: Vec<Value> = self
            .nodes
            .iter()
            .enumerate()
            .map(|(id, node)| match node {
                Node::Const(c) => json!({"id": id, "kind": "const", "value": c.to_string()}),
                Node::Var(v) => json!({"id": id, "kind": "var", "name": v}),
                Node::Sum(cs) => json!({"id": id, "kind": "sum", "children": cs}),
                Node::Product(cs) => json!({"id": id, "kind": "product", "children": cs}),
                Node::Pow(b, e) => {
                    json!({"id": id, "kind": "pow", "base": b, "exp": e.to_string()})
                }
                Node::GeomSum(b, c) => {
                    json!({"id": id, "kind": "geomsum", "base": b, "count": c.to_string()})
                }
                Node::Coeffs(b, src) => {
                    json!({"id": id, "kind": "coeffs", "base": b, "source": src.to_json()})
                }
                Node::Mq(args) => json!({
                    "id": id,
                    "kind": "mq",
                    "a": args.a,
                    "s": args.s,
                    "t": args.t,
                    "r": args.r,
                    "n": args.n,
                }),
                Node::Named(name, inner) => {
                    json!({"id": id, "kind": "named", "name": name, "child": inner})
                }
            })
            .collect();
        json!({"root": self.root, "nodes": nodes})
    }

    pub fn from_json(v: &Value) -> Result<PolyExpr> {
        let obj = v
            .as_object()
            .ok_or_else(|| Error::domain("expression JSON must be an object"))?;
        let nodes_json = obj
            .get("nodes")
            .and_then(|n| n.as_array())
            .ok_or_else(|| Error::domain("expression JSON needs a \"nodes\" array"))?;
        let n = nodes_json.len();
        let get_id = |v: Option<&Value>, what: &str, limit: usize| -> Result<NodeId> {
            let id = v
                .and_then(|x| x.as_u64())
                .ok_or_else(|| Error::domain(format!("node needs {what}")))?
                as usize;
            if id >= limit {
                return Err(Error::domain(format!(
                    "{what} {id} must reference an earlier node"
                )));
            }
            Ok(id)
        };
        let get_ids = |v: Option<&Value>, what: &str, limit: usize| -> Result<Vec<NodeId>> {
            let arr = v
                .and_then(|x| x.as_array())
                .ok_or_else(|| Error::domain(format!("node needs {what}")))?;
            arr.iter()
                .map(|x| get_id(Some(x), what, limit))
                .collect()
        };
        let get_big = |v: Option<&Value>, what: &str| -> Result<BigUint> {
            let s = v
                .and_then(|x| x.as_str())
                .ok_or_else(|| Error::domain(format!("node needs decimal-string {what}")))?;
            s.parse()
                .map_err(|_| Error::domain(format!("bad {what} {s:?}")))
        };
        let mut nodes: Vec<Node> = Vec::with_capacity(n);
        let mut names: BTreeMap<String, NodeId> = BTreeMap::new();
        for (pos, nj) in nodes_json.iter().enumerate() {
            let id = nj
                .get("id")
                .and_then(|x| x.as_u64())
                .ok_or_else(|| Error::domain("node needs an \"id\""))? as usize;
            if id != pos {
                return Err(Error::domain(format!(
                    "node ids must be dense and ascending; expected {pos}, got {id}"
                )));
            }
            let kind = nj
                .get("kind")
                .and_then(|k| k.as_str())
                .ok_or_else(|| Error::domain("node needs a \"kind\""))?;
            let node = match kind {
                "const" => {
                    let s = nj
                        .get("value")
                        .and_then(|x| x.as_str())
                        .ok_or_else(|| Error::domain("const needs a decimal-string value"))?;
                    Node::Const(
                        s.parse()
                            .map_err(|_| Error::domain(format!("bad constant {s:?}")))?,
                    )
                }
                "var" => {
                    let name = nj
                        .get("name")
                        .and_then(|x| x.as_str())
                        .ok_or_else(|| Error::domain("var needs a name"))?;
                    if name.is_empty() {
                        return Err(Error::domain("empty variable name"));
                    }
                    Node::Var(name.to_string())
                }
                "sum" => Node::Sum(get_ids(nj.get("children"), "children", pos)?),
                "product" => Node::Product(get_ids(nj.get("children"), "children", pos)?),
                "pow" => Node::Pow(
                    get_id(nj.get("base"), "base", pos)?,
                    get_big(nj.get("exp"), "exp")?,
                ),
                "geomsum" => Node::GeomSum(
                    get_id(nj.get("base"), "base", pos)?,
                    get_big(nj.get("count"), "count")?,
                ),
                "coeffs" => Node::Coeffs(
                    get_id(nj.get("base"), "base", pos)?,
                    CoeffSource::from_json(
                        nj.get("source")
                            .ok_or_else(|| Error::domain("coeffs needs a source"))?,
                    )?,
                ),
                "mq" => {
                    let a = get_ids(nj.get("a"), "a", pos)?;
                    if a.is_empty() {
                        return Err(Error::domain("mq needs at least one square argument"));
                    }
                    Node::Mq(MqArgs {
                        a,
                        s: get_id(nj.get("s"), "s", pos)?,
                        t: get_id(nj.get("t"), "t", pos)?,
                        r: get_id(nj.get("r"), "r", pos)?,
                        n: get_id(nj.get("n"), "n", pos)?,
                    })
                }
                "named" => {
                    let name = nj
                        .get("name")
                        .and_then(|x| x.as_str())
                        .ok_or_else(|| Error::domain("named needs a name"))?;
                    if names.contains_key(name) {
                        return Err(Error::domain(format!("duplicate node name {name:?}")));
                    }
                    names.insert(name.to_string(), pos);
                    Node::Named(name.to_string(), get_id(nj.get("child"), "child", pos)?)
                }
                other => return Err(Error::domain(format!("unknown node kind {other:?}"))),
            };
            nodes.push(node);
        }
        let root = get_id(obj.get("root"), "root", n)?;
        Ok(PolyExpr { nodes, root, names })
    }
}

fn guard_bits(bits: u64) -> Result<()> {
    if bits > EVAL_BIT_GUARD {
        return Err(Error::resource(format!(
            "intermediate value exceeds {EVAL_BIT_GUARD} bits; this parameter regime is \
             not evaluable exactly"
        )));
    }
    Ok(())
}

fn eval_pow(base: &BigInt, exp: &BigUint) -> Result<BigInt> {
    if base.is_zero() {
        return Ok(if exp.is_zero() {
            BigInt::one()
        } else {
            BigInt::zero()
        });
    }
    let e = exp
        .to_u64()
        .ok_or_else(|| Error::resource(format!("exponent {exp} too large to evaluate")))?;
    let bbits = base.bits().max(1);
    guard_bits(bbits.saturating_mul(e))?;
    Ok(pow_bigint(base, e))
}

/// (base^count - 1) / (base - 1) with the degenerate radices handled exactly.
fn eval_geom_sum(base: &BigInt, count: &BigUint) -> Result<BigInt> {
    let c = count
        .to_u64()
        .ok_or_else(|| Error::resource(format!("geometric length {count} too large")))?;
    if c == 0 {
        return Ok(BigInt::zero());
    }
    if base.is_zero() {
        return Ok(BigInt::one());
    }
    if base.is_one() {
        return Ok(BigInt::from(c));
    }
    if *base == BigInt::from(-1) {
        return Ok(BigInt::from(c % 2));
    }
    guard_bits(base.bits().saturating_mul(c))?;
    let num: BigInt = pow_bigint(base, c) - 1;
    let den: BigInt = base - 1;
    let (q, r) = num_integer::Integer::div_rem(&num, &den);
    debug_assert!(r.is_zero());
    Ok(q)
}

fn eval_coeffs(base: &BigInt, src: &CoeffSource) -> Result<BigInt> {
    let terms = src.weighted_terms()?;
    if base.is_zero() {
        // No tuple has exponent zero, so the value at radix 0 is 0.
        return Ok(BigInt::zero());
    }
    let max_e = src.max_exponent();
    let max_e64 = max_e
        .to_u64()
        .ok_or_else(|| Error::resource(format!("encoding exponent {max_e} too large")))?;
    guard_bits(base.bits().max(1).saturating_mul(max_e64))?;
    // Terms are sorted by exponent; walk up with incremental powers.
    let mut acc = BigInt::zero();
    let mut cur_pow = BigInt::one();
    let mut cur_exp = BigUint::zero();
    for (w, e) in terms {
        let step = (e - &cur_exp)
            .to_u64()
            .expect("bounded by max exponent");
        if step > 0 {
            cur_pow *= pow_bigint(base, step);
            cur_exp = e.clone();
        }
        acc += w * &cur_pow;
    }
    Ok(acc)
}

fn check_budget(p: &MultiPoly, budget: usize) -> Result<()> {
    if p.term_count() > budget {
        return Err(Error::resource(format!(
            "expansion exceeded term budget {budget}"
        )));
    }
    Ok(())
}

fn expand_geom_sum(base: &MultiPoly, count: &BigUint, budget: usize) -> Result<MultiPoly> {
    if let Some(c) = base.as_constant() {
        let v = eval_geom_sum(&c, count)?;
        return Ok(MultiPoly::constant(v));
    }
    let c = count
        .to_u64()
        .ok_or_else(|| Error::resource(format!("geometric length {count} too large to expand")))?;
    if c as u128 > budget as u128 {
        return Err(Error::resource(format!(
            "geometric sum of length {c} exceeds term budget {budget}"
        )));
    }
    let mut acc = MultiPoly::zero();
    let mut cur = MultiPoly::one();
    for j in 0..c {
        if j > 0 {
            cur = cur.mul_budget(base, budget)?;
        }
        acc = acc.add(&cur);
        check_budget(&acc, budget)?;
    }
    Ok(acc)
}

fn expand_coeffs(base: &MultiPoly, src: &CoeffSource, budget: usize) -> Result<MultiPoly> {
    let terms = src.weighted_terms()?;
    if let Some(c) = base.as_constant() {
        return Ok(MultiPoly::constant(eval_coeffs(&c, src)?));
    }
    let mut acc = MultiPoly::zero();
    let mut cur_pow = MultiPoly::one();
    let mut cur_exp = BigUint::zero();
    for (w, e) in terms {
        let step = (e - &cur_exp)
            .to_u64()
            .ok_or_else(|| Error::resource("encoding exponent too large to expand".to_string()))?;
        if step > 0 {
            cur_pow = cur_pow.mul_budget(&base.pow_budget(step, budget)?, budget)?;
            cur_exp = e.clone();
        }
        acc = acc.add(&cur_pow.mul_budget(&MultiPoly::constant(w.clone()), budget)?);
        check_budget(&acc, budget)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cli::parse_poly;

    fn pt(pairs: &[(&str, i64)]) -> BTreeMap<String, BigInt> {
        pairs
            .iter()
            .map(|(k, v)| (k.to_string(), BigInt::from(*v)))
            .collect()
    }

    #[test]
    fn basic_evaluate_and_degree() {
        let mut b = ExprBuilder::new();
        let x = b.var("x");
        let c2 = b.constant(2);
        let x2 = b.pow(x, 2u32);
        let s = b.sum(vec![x2, c2]);
        let prod = b.product(vec![s, x]);
        let e = b.build(prod);
        // (x^2 + 2) * x at x = 3 is 33.
        assert_eq!(e.evaluate(&pt(&[("x", 3)])).unwrap(), BigInt::from(33));
        assert_eq!(e.degree().unwrap(), BigUint::from(3u32));
        let expanded = e.expand(100).unwrap();
        let xv = MultiPoly::var("x");
        let want = xv.pow(3).add(&xv.mul(&MultiPoly::constant(2)));
        assert_eq!(expanded, want);
    }

    #[test]
    fn dedup_shares_ids() {
        let mut b = ExprBuilder::new();
        let x1 = b.var("x");
        let x2 = b.var("x");
        assert_eq!(x1, x2);
        let s1 = b.sum(vec![x1, x2]);
        let s2 = b.sum(vec![x1, x2]);
        assert_eq!(s1, s2);
    }

    #[test]
    fn named_lookup_and_duplicates() {
        let mut b = ExprBuilder::new();
        let x = b.var("x");
        let n = b.named("mid", x).unwrap();
        assert!(b.named("mid", x).is_err());
        let e = b.build(n);
        assert_eq!(e.lookup("mid"), Some(n));
        assert_eq!(
            e.evaluate_named("mid", &pt(&[("x", 7)])).unwrap(),
            BigInt::from(7)
        );
        assert_eq!(
            e.degree_named("mid").unwrap().unwrap(),
            BigUint::from(1u32)
        );
    }

    #[test]
    fn geom_sum_small_cases() {
        let mut b = ExprBuilder::new();
        let x = b.var("x");
        let g = b.geom_sum(x, 4u32);
        let e = b.build(g);
        // 1 + x + x^2 + x^3 at x = 3 is 40.
        assert_eq!(e.evaluate(&pt(&[("x", 3)])).unwrap(), BigInt::from(40));
        assert_eq!(e.evaluate(&pt(&[("x", 1)])).unwrap(), BigInt::from(4));
        assert_eq!(e.evaluate(&pt(&[("x", 0)])).unwrap(), BigInt::from(1));
        assert_eq!(e.evaluate(&pt(&[("x", -1)])).unwrap(), BigInt::from(0));
        assert_eq!(e.degree().unwrap(), BigUint::from(3u32));
        let xv = MultiPoly::var("x");
        let want = xv
            .pow(3)
            .add(&xv.pow(2))
            .add(&xv)
            .add(&MultiPoly::one());
        assert_eq!(e.expand(10).unwrap(), want);
    }

    #[test]
    fn geom_sum_zero_length() {
        let mut b = ExprBuilder::new();
        let x = b.var("x");
        let g = b.geom_sum(x, 0u32);
        let e = b.build(g);
        assert_eq!(e.evaluate(&pt(&[("x", 5)])).unwrap(), BigInt::zero());
        assert!(e.degree_of(e.root()).unwrap().is_none());
    }

    #[test]
    fn pow_degree_and_zero_base() {
        let mut b = ExprBuilder::new();
        let z = b.constant(0);
        let p0 = b.pow(z, 0u32);
        let p3 = b.pow(z, 3u32);
        let x = b.var("x");
        let px = b.pow(x, 5u32);
        let e = b.build(px);
        assert_eq!(e.degree_of(p0).unwrap().unwrap(), BigUint::zero());
        assert!(e.degree_of(p3).unwrap().is_none());
        assert_eq!(e.degree_of(px).unwrap().unwrap(), BigUint::from(5u32));
        assert_eq!(e.evaluate_node(p0, &pt(&[])).unwrap(), BigInt::one());
        assert_eq!(e.evaluate_node(p3, &pt(&[])).unwrap(), BigInt::zero());
    }

    #[test]
    fn huge_pow_evaluation_is_refused() {
        let mut b = ExprBuilder::new();
        let c = b.constant(3);
        let big = BigUint::from(10u32).pow(30);
        let p = b.pow(c, big);
        let e = b.build(p);
        match e.evaluate(&pt(&[])) {
            Err(Error::Resource(_)) => {}
            other => panic!("expected resource error, got {other:?}"),
        }
        // Degree tracking still works at that scale.
        assert_eq!(e.degree_of(p).unwrap().unwrap(), BigUint::zero());
    }

    #[test]
    fn coeffs_node_single_variable() {
        // Source a + 1 has delta = 1, nu = 0, so slot 0 carries a and the
        // top exponent is (1+1)^1 = 2: term a lands at exponent 2 - 1 = 1
        // with weight 1!0! = 1, the constant at exponent 2 with weight 0!1!.
        let src = CoeffSource::ready(parse_poly("a + 1").unwrap()).unwrap();
        assert_eq!(src.delta, 1);
        assert_eq!(src.nu, 0);
        let mut b = ExprBuilder::new();
        let y = b.var("y");
        let c = b.coeffs(y, src);
        let e = b.build(c);
        let yv = MultiPoly::var("y");
        assert_eq!(e.expand(10).unwrap(), yv.pow(2).add(&yv));
        assert_eq!(e.evaluate(&pt(&[("y", 2)])).unwrap(), BigInt::from(6));
        assert_eq!(e.degree().unwrap(), BigUint::from(2u32));
    }

    #[test]
    fn coeffs_square_plus_matches_ready() {
        let p = parse_poly("a + 1 - z1").unwrap();
        let lazy = CoeffSource::square_plus(p.clone(), "z2".to_string()).unwrap();
        let explicit =
            CoeffSource::ready(parse_poly("(a + 1 - z1)^2 + (z2 - 1)^2").unwrap()).unwrap();
        assert_eq!(lazy.delta, explicit.delta);
        assert_eq!(lazy.nu, explicit.nu);
        let mut b1 = ExprBuilder::new();
        let y1 = b1.var("y");
        let c1 = b1.coeffs(y1, lazy);
        let e1 = b1.build(c1);
        let mut b2 = ExprBuilder::new();
        let y2 = b2.var("y");
        let c2 = b2.coeffs(y2, explicit);
        let e2 = b2.build(c2);
        for v in [0i64, 1, 2, 3, 7] {
            assert_eq!(
                e1.evaluate(&pt(&[("y", v)])).unwrap(),
                e2.evaluate(&pt(&[("y", v)])).unwrap(),
                "radix {v}"
            );
        }
        assert_eq!(e1.degree().unwrap(), e2.degree().unwrap());
        assert_eq!(e1.expand(10_000).unwrap(), e2.expand(10_000).unwrap());
    }

    #[test]
    fn coeffs_rejects_unsuitable() {
        assert!(CoeffSource::ready(parse_poly("a - 1").unwrap()).is_err());
        assert!(CoeffSource::ready(parse_poly("5").unwrap()).is_err());
        let off_slot = MultiPoly::var("a").add(&MultiPoly::var("x"));
        assert!(CoeffSource::ready(off_slot.add(&MultiPoly::one())).is_err());
        assert!(
            CoeffSource::square_plus(parse_poly("a - z1").unwrap(), "z3".to_string()).is_err()
        );
    }

    #[test]
    fn sub_helper() {
        let mut b = ExprBuilder::new();
        let x = b.var("x");
        let y = b.var("y");
        let d = b.sub(x, y);
        let e = b.build(d);
        assert_eq!(
            e.evaluate(&pt(&[("x", 10), ("y", 4)])).unwrap(),
            BigInt::from(6)
        );
        let want = MultiPoly::var("x").sub(&MultiPoly::var("y"));
        assert_eq!(e.expand(10).unwrap(), want);
    }

    #[test]
    fn expand_budget_enforced() {
        let mut b = ExprBuilder::new();
        let x = b.var("x");
        let y = b.var("y");
        let s = b.sum(vec![x, y]);
        let p = b.pow(s, 40u32);
        let e = b.build(p);
        match e.expand(10) {
            Err(Error::Resource(_)) => {}
            other => panic!("expected resource error, got {other:?}"),
        }
        assert_eq!(e.expand(100).unwrap().term_count(), 41);
    }

    #[test]
    fn json_round_trip() {
        let src = CoeffSource::square_plus(parse_poly("a + 1 - z1").unwrap(), "z2".to_string())
            .unwrap();
        let mut b = ExprBuilder::new();
        let x = b.var("x");
        let c3 = b.constant(3);
        let s = b.sum(vec![x, c3]);
        let g = b.geom_sum(s, 5u32);
        let co = b.coeffs(x, src);
        let m = b.mq(MqArgs {
            a: vec![x, s],
            s: g,
            t: co,
            r: c3,
            n: x,
        });
        let named = b.named("head", m).unwrap();
        let e = b.build(named);
        let j = e.to_json();
        let back = PolyExpr::from_json(&j).unwrap();
        assert_eq!(back.len(), e.len());
        assert_eq!(back.lookup("head"), e.lookup("head"));
        let point = pt(&[("x", 2)]);
        assert_eq!(back.evaluate(&point).unwrap(), e.evaluate(&point).unwrap());
        assert_eq!(back.degree().unwrap(), e.degree().unwrap());
        assert_eq!(j, back.to_json());
    }

    #[test]
    fn from_json_rejects_forward_references() {
        let j = json!({
            "root": 0,
            "nodes": [
                {"id": 0, "kind": "sum", "children": [1]},
                {"id": 1, "kind": "const", "value": "1"},
            ],
        });
        assert!(PolyExpr::from_json(&j).is_err());
    }

    #[test]
    fn variables_listing() {
        let mut b = ExprBuilder::new();
        let x = b.var("x");
        let a = b.var("a");
        let s = b.sum(vec![x, a]);
        let e = b.build(s);
        assert_eq!(e.variables(), vec!["a".to_string(), "x".to_string()]);
    }
}
