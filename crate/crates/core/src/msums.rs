//! Sums over the semigroup `N_Σ` generated by a multiplicatively independent
//! set Σ of reals > 1, lattice counts in simplices, and the oscillation
//! constants `λ^±` that govern the single-prime envelope.
//!
//! Elements of Σ are exact reals of the form `b^(n/d)` with `b` rational, so
//! every ordering question has an exact answer: raising both sides to a
//! common power turns it into a comparison of rationals. Floats are used
//! first and the exact path only runs when the float gap is inside the
//! rounding error.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use dashu::base::Gcd;
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;

use crate::error::{Error, Result};
use crate::num::{float, float_rat, parse_rational, rational_string, Float, DEFAULT_PRECISION};

/// Extra bits carried through sums and closed forms.
const GUARD_BITS: usize = 64;

/// Precision ceiling for the escalation loop when `β = e`.
const MAX_ESCALATION_BITS: usize = 4096;

/// A positive real `base^(num/den)` with rational `base`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct ExactReal {
    base: RBig,
    num: u32,
    den: u32,
}

impl ExactReal {
    pub fn new(base: RBig, num: u32, den: u32) -> Result<Self> {
        if base <= RBig::ZERO || num == 0 || den == 0 {
            return Err(Error::InvalidInput(format!(
                "{}^({num}/{den}) is not a positive real with positive exponent",
                rational_string(&base)
            )));
        }
        let g = gcd_u32(num, den);
        Ok(ExactReal {
            base,
            num: num / g,
            den: den / g,
        })
    }

    pub fn rational(r: RBig) -> Result<Self> {
        Self::new(r, 1, 1)
    }

    pub fn integer(n: u64) -> Self {
        Self::new(RBig::from(n), 1, 1).expect("positive integer")
    }

    /// `p^(1/r)`.
    pub fn root(p: u64, r: u32) -> Result<Self> {
        Self::new(RBig::from(p), 1, r)
    }

    /// `p^(num/den)`.
    pub fn power(p: u64, num: u32, den: u32) -> Result<Self> {
        Self::new(RBig::from(p), num, den)
    }

    pub fn base(&self) -> &RBig {
        &self.base
    }

    pub fn exponent(&self) -> (u32, u32) {
        (self.num, self.den)
    }

    pub fn as_rational(&self) -> Option<RBig> {
        (self.den == 1).then(|| self.base.pow(self.num as usize))
    }

    pub fn is_greater_than_one(&self) -> bool {
        self.base > RBig::ONE
    }

    pub fn ln(&self, prec: usize) -> Float {
        let lb = float_rat(&self.base, prec).ln();
        lb * float(self.num, prec) / float(self.den, prec)
    }

    pub fn to_float(&self, prec: usize) -> Float {
        match self.as_rational() {
            Some(r) => float_rat(&r, prec),
            None => self.ln(prec + 16).exp().with_precision(prec).value(),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_float(64).to_f64().value()
    }

    /// `self^(k·D/den)` as an exact rational, where `den | D`.
    fn raised(&self, k: u64, d: u64) -> RBig {
        debug_assert_eq!(d % self.den as u64, 0);
        let e = self.num as u64 * (d / self.den as u64) * k;
        self.base.pow(e as usize)
    }
}

impl fmt::Display for ExactReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let base = if self.base.denominator() == &UBig::ONE {
            self.base.numerator().to_string()
        } else {
            rational_string(&self.base)
        };
        match (self.num, self.den) {
            (1, 1) => f.write_str(&base),
            (n, 1) => write!(f, "{base}^{n}"),
            (n, d) => write!(f, "{base}^({n}/{d})"),
        }
    }
}

impl FromStr for ExactReal {
    type Err = Error;

    /// `3`, `3/2`, `1.5`, `2^(1/2)`, `2^3`, `2^(7/2)`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (base, exp) = match s.split_once('^') {
            Some((b, e)) => (b, Some(e)),
            None => (s, None),
        };
        let base = parse_rational(base)?;
        let (num, den) = match exp {
            None => (1, 1),
            Some(e) => {
                let e = e.trim().trim_start_matches('(').trim_end_matches(')');
                let r = parse_rational(e)?;
                if r <= RBig::ZERO {
                    return Err(Error::Parse(format!("exponent must be positive in {s:?}")));
                }
                let n = u32::try_from(r.numerator()).map_err(|_| Error::Parse(format!("exponent too large in {s:?}")))?;
                let d = u32::try_from(r.denominator()).map_err(|_| Error::Parse(format!("exponent too large in {s:?}")))?;
                (n, d)
            }
        };
        ExactReal::new(base, num, den)
    }
}

fn gcd_u32(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd_u32(b, a % b)
    }
}

fn lcm_u64(a: u64, b: u64) -> u64 {
    a / UBig::from(a).gcd(UBig::from(b)).try_into().unwrap_or(1u64) * b
}

/// Exact comparison of `∏ x_i^{e_i}` on each side.
pub fn exact_cmp(lhs: &[(&ExactReal, u64)], rhs: &[(&ExactReal, u64)]) -> Ordering {
    let d = lhs
        .iter()
        .chain(rhs)
        .fold(1u64, |acc, (x, _)| lcm_u64(acc, x.den as u64));
    let side = |terms: &[(&ExactReal, u64)]| {
        terms
            .iter()
            .filter(|(_, e)| *e > 0)
            .fold(RBig::ONE, |acc, (x, e)| acc * x.raised(*e, d))
    };
    side(lhs).cmp(&side(rhs))
}

/// Sign of `a - b` when it is certain given the rounding allowance.
fn certain_cmp(a: &Float, b: &Float, prec: usize) -> Option<Ordering> {
    let diff = a - b;
    let mag = abs(a) + abs(b) + float(1, prec);
    let tol = mag * two_pow(-(prec as isize) + 12, prec);
    if abs(&diff) <= tol {
        None
    } else {
        a.partial_cmp(b)
    }
}

fn abs(x: &Float) -> Float {
    if x.sign() == dashu::base::Sign::Negative {
        -x.clone()
    } else {
        x.clone()
    }
}

fn two_pow(e: isize, prec: usize) -> Float {
    Float::from_parts(IBig::ONE, e).with_precision(prec).value()
}

/// A finite set Σ of reals > 1, assumed multiplicatively independent.
#[derive(Clone, Debug)]
pub struct SigmaSet {
    elements: Vec<ExactReal>,
    logs: Vec<Float>,
    prec: usize,
}

impl SigmaSet {
    pub fn new(elements: Vec<ExactReal>) -> Result<Self> {
        Self::with_precision(elements, DEFAULT_PRECISION)
    }

    pub fn with_precision(elements: Vec<ExactReal>, prec: usize) -> Result<Self> {
        if elements.is_empty() {
            return Err(Error::InvalidInput("Σ must be non-empty".into()));
        }
        if let Some(bad) = elements.iter().find(|x| !x.is_greater_than_one()) {
            return Err(Error::InvalidInput(format!("element {bad} of Σ is not > 1")));
        }
        let logs = elements.iter().map(|x| x.ln(prec)).collect();
        Ok(SigmaSet { elements, logs, prec })
    }

    pub fn from_integers(qs: &[u64]) -> Result<Self> {
        Self::new(qs.iter().map(|&q| ExactReal::integer(q)).collect())
    }

    pub fn elements(&self) -> &[ExactReal] {
        &self.elements
    }

    pub fn logs(&self) -> &[Float] {
        &self.logs
    }

    pub fn precision(&self) -> usize {
        self.prec
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    fn log_of(&self, exps: &[u32]) -> Float {
        let mut acc = float(0, self.prec);
        for (l, &k) in self.logs.iter().zip(exps) {
            if k > 0 {
                acc += l * float(k, self.prec);
            }
        }
        acc
    }

    fn monomial<'a>(&'a self, exps: &[u32]) -> Vec<(&'a ExactReal, u64)> {
        self.elements.iter().zip(exps).map(|(x, &k)| (x, k as u64)).collect()
    }

    /// Order of two elements of `N_Σ` given by exponent vectors.
    fn cmp_exps(&self, a: &[u32], la: &Float, b: &[u32], lb: &Float) -> Ordering {
        certain_cmp(la, lb, self.prec).unwrap_or_else(|| exact_cmp(&self.monomial(a), &self.monomial(b)))
    }

    /// Whether `∏ q_i^{k_i} ≤ limit`.
    fn within(&self, exps: &[u32], log: &Float, limit: &Limit) -> bool {
        match limit {
            Limit::Log(l) => log <= l,
            Limit::Value(x, lx) => match certain_cmp(log, lx, self.prec) {
                Some(o) => o != Ordering::Greater,
                None => exact_cmp(&self.monomial(exps), &[(x, 1)]) != Ordering::Greater,
            },
        }
    }
}

impl FromStr for SigmaSet {
    type Err = Error;

    /// Comma-separated list such as `2,3` or `2^(1/2),3`.
    fn from_str(s: &str) -> Result<Self> {
        let elements = s.split(',').map(ExactReal::from_str).collect::<Result<Vec<_>>>()?;
        SigmaSet::new(elements)
    }
}

impl fmt::Display for SigmaSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.elements.iter().map(|x| x.to_string()).collect();
        f.write_str(&parts.join(","))
    }
}

/// Element `q_1^{k_1} ... q_s^{k_s}` of `N_Σ`.
#[derive(Clone, Debug)]
pub struct NSigmaElement {
    pub exponent_vector: Vec<u32>,
    pub value_log: Float,
}

impl NSigmaElement {
    /// `h^alpha` for this element `h`.
    pub fn pow(&self, alpha: &Float) -> Float {
        (&self.value_log * alpha).exp()
    }
}

#[derive(Clone, Debug)]
enum Limit {
    Log(Float),
    Value(ExactReal, Float),
}

struct HeapItem {
    elem: NSigmaElement,
    sigma: Arc<SigmaSet>,
}

impl PartialEq for HeapItem {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for HeapItem {}

impl PartialOrd for HeapItem {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for HeapItem {
    // Reversed so that BinaryHeap pops the smallest value first.
    fn cmp(&self, other: &Self) -> Ordering {
        self.sigma
            .cmp_exps(
                &self.elem.exponent_vector,
                &self.elem.value_log,
                &other.elem.exponent_vector,
                &other.elem.value_log,
            )
            .reverse()
    }
}

/// Elements of `N_Σ` up to a limit, in strictly increasing order.
///
/// Each exponent vector has one parent, obtained by decrementing its last
/// nonzero coordinate, so children are produced by incrementing coordinates
/// at or after that position.
pub struct NSigmaIter {
    sigma: Arc<SigmaSet>,
    heap: BinaryHeap<HeapItem>,
    limit: Limit,
}

impl NSigmaIter {
    fn new(sigma: &SigmaSet, limit: Limit) -> Self {
        let sigma = Arc::new(sigma.clone());
        let zero = NSigmaElement {
            exponent_vector: vec![0; sigma.len()],
            value_log: float(0, sigma.prec),
        };
        let mut heap = BinaryHeap::new();
        if sigma.within(&zero.exponent_vector, &zero.value_log, &limit) {
            heap.push(HeapItem {
                elem: zero,
                sigma: sigma.clone(),
            });
        }
        NSigmaIter { sigma, heap, limit }
    }
}

impl Iterator for NSigmaIter {
    type Item = NSigmaElement;

    fn next(&mut self) -> Option<NSigmaElement> {
        let item = self.heap.pop()?;
        let exps = &item.elem.exponent_vector;
        let start = exps.iter().rposition(|&k| k > 0).unwrap_or(0);
        for i in start..exps.len() {
            let mut child = exps.clone();
            child[i] += 1;
            let log = &item.elem.value_log + &self.sigma.logs[i];
            if self.sigma.within(&child, &log, &self.limit) {
                self.heap.push(HeapItem {
                    elem: NSigmaElement {
                        exponent_vector: child,
                        value_log: log,
                    },
                    sigma: self.sigma.clone(),
                });
            }
        }
        Some(item.elem)
    }
}

/// All `h ∈ N_Σ` with `log h ≤ limit_log`, increasing.
pub fn nsigma_enumerate(sigma: &SigmaSet, limit_log: &Float) -> NSigmaIter {
    NSigmaIter::new(sigma, Limit::Log(limit_log.clone().with_precision(sigma.prec).value()))
}

/// All `h ∈ N_Σ` with `h ≤ limit`, increasing; the boundary is decided exactly.
pub fn nsigma_up_to(sigma: &SigmaSet, limit: &ExactReal) -> NSigmaIter {
    let log = limit.ln(sigma.prec);
    NSigmaIter::new(sigma, Limit::Value(limit.clone(), log))
}

fn check_alpha(alpha: &Float) -> Result<()> {
    if alpha.sign() == dashu::base::Sign::Negative || alpha.repr().is_zero() {
        return Err(Error::InvalidInput("alpha must be positive".into()));
    }
    Ok(())
}

fn check_limit(l: &ExactReal) -> Result<()> {
    if l.base < RBig::ONE {
        return Err(Error::InvalidInput(format!("L = {l} must be at least 1")));
    }
    Ok(())
}

/// `Σ_{h ∈ N_Σ, h ≤ L} h^α`.
pub fn power_sum_le(sigma: &SigmaSet, alpha: &Float, l: &ExactReal) -> Result<Float> {
    check_alpha(alpha)?;
    check_limit(l)?;
    let prec = sigma.prec + GUARD_BITS;
    let alpha = alpha.clone().with_precision(prec).value();
    let mut acc = float(0, prec);
    for h in nsigma_up_to(sigma, l) {
        acc += (h.value_log.with_precision(prec).value() * &alpha).exp();
    }
    Ok(acc.with_precision(sigma.prec).value())
}

/// `Σ_{h ∈ N_Σ, h > L} h^{-α}`.
///
/// Computed as the full product `∏ (1 - q_i^{-α})^{-1}` minus the finite
/// sum over `h ≤ L`, with enough extra precision to absorb the
/// cancellation. The result is accurate far below any `tail_tol` above
/// `2^{-precision}`.
pub fn power_sum_gt(sigma: &SigmaSet, alpha: &Float, l: &ExactReal, tail_tol: &Float) -> Result<Float> {
    check_alpha(alpha)?;
    check_limit(l)?;
    let tol_bits = if tail_tol.repr().is_zero() || tail_tol.sign() == dashu::base::Sign::Negative {
        0
    } else {
        (-tail_tol.ln().to_f64().value() / std::f64::consts::LN_2).max(0.0) as usize
    };
    let l_bits = (l.ln(64).to_f64().value() / std::f64::consts::LN_2).ceil().max(0.0) as usize;
    let alpha_f = alpha.to_f64().value().max(1e-6);
    let cancel_bits = (l_bits as f64 * alpha_f).ceil() as usize + 8 * sigma.len();
    let prec = sigma.prec.max(tol_bits) + GUARD_BITS + cancel_bits;
    let s = SigmaSet::with_precision(sigma.elements.clone(), prec)?;
    let alpha = alpha.clone().with_precision(prec).value();
    let one = float(1, prec);
    let mut total = one.clone();
    for lq in &s.logs {
        total *= &one / (&one - (-(lq * &alpha)).exp());
    }
    let mut head = float(0, prec);
    for h in nsigma_up_to(&s, l) {
        head += (-(&h.value_log * &alpha)).exp();
    }
    Ok((total - head).with_precision(sigma.prec).value())
}

/// `⌊log_q L⌋` for `L ≥ 1`, decided exactly near integer boundaries.
pub fn floor_log(q: &ExactReal, l: &ExactReal, prec: usize) -> Result<u64> {
    check_limit(l)?;
    if !q.is_greater_than_one() {
        return Err(Error::InvalidInput(format!("q = {q} must exceed 1")));
    }
    let x = l.ln(prec) / q.ln(prec);
    let k = x.floor().to_int().value();
    let mut k = u64::try_from(&k).unwrap_or(0);
    let frac = &x - float(k, prec);
    let tol = (abs(&x) + float(1, prec)) * two_pow(-(prec as isize) + 12, prec);
    let near_low = frac <= tol;
    let near_high = float(1, prec) - &frac <= tol;
    if near_low || near_high {
        // q^k ≤ L < q^{k+1}
        while k > 0 && exact_cmp(&[(q, k)], &[(l, 1)]) == Ordering::Greater {
            k -= 1;
        }
        while exact_cmp(&[(q, k + 1)], &[(l, 1)]) != Ordering::Greater {
            k += 1;
        }
    }
    Ok(k)
}

/// `Σ_{k ≥ 0, q^k ≤ L} q^{αk}` in the fractional-part closed form
/// `q^{α(1 - {log_q L})} L^α / (q^α - 1) - 1/(q^α - 1)`.
pub fn geometric_closed_form_le(q: &ExactReal, alpha: &Float, l: &ExactReal) -> Result<Float> {
    check_alpha(alpha)?;
    let prec = DEFAULT_PRECISION.max(alpha.precision()) + GUARD_BITS;
    let alpha = alpha.clone().with_precision(prec).value();
    let k = floor_log(q, l, prec)?;
    let lq = q.ln(prec);
    let ll = l.ln(prec);
    let frac = &ll / &lq - float(k, prec);
    let one = float(1, prec);
    let a = (&lq * &alpha).exp() - &one;
    let lead = (&alpha * &lq * (&one - &frac)).exp() * (&alpha * &ll).exp() / &a;
    Ok((lead - &one / &a).with_precision(DEFAULT_PRECISION).value())
}

/// `Σ_{k ≥ 0, q^k > L} q^{-αk}` as `q^{α{log_q L}} L^{-α} / (q^α - 1)`.
pub fn geometric_closed_form_gt(q: &ExactReal, alpha: &Float, l: &ExactReal) -> Result<Float> {
    check_alpha(alpha)?;
    let prec = DEFAULT_PRECISION.max(alpha.precision()) + GUARD_BITS;
    let alpha = alpha.clone().with_precision(prec).value();
    let k = floor_log(q, l, prec)?;
    let lq = q.ln(prec);
    let ll = l.ln(prec);
    let frac = &ll / &lq - float(k, prec);
    let one = float(1, prec);
    let a = (&lq * &alpha).exp() - &one;
    let v = (&alpha * &lq * &frac).exp() * (-(&alpha * &ll)).exp() / &a;
    Ok(v.with_precision(DEFAULT_PRECISION).value())
}

/// Base β of the simplex `Σ k_i log_β q_i ≤ t`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Beta {
    E,
    Exact(ExactReal),
}

impl FromStr for Beta {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "e" | "E" => Ok(Beta::E),
            other => {
                let x = ExactReal::from_str(other)?;
                if !x.is_greater_than_one() {
                    return Err(Error::InvalidInput("beta must exceed 1".into()));
                }
                Ok(Beta::Exact(x))
            }
        }
    }
}

impl fmt::Display for Beta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Beta::E => f.write_str("e"),
            Beta::Exact(x) => write!(f, "{x}"),
        }
    }
}

enum Unresolved {
    Tie,
}

/// `#{k ∈ Z_{≥0}^s : Σ k_i log_β q_i ≤ t}`.
pub fn lattice_count(sigma: &SigmaSet, beta: &Beta, t: u64) -> Result<u64> {
    if t == 0 {
        // every log q_i is positive, so only the origin fits
        return Ok(1);
    }
    let mut prec = sigma.prec;
    loop {
        let s = SigmaSet::with_precision(sigma.elements.clone(), prec)?;
        let budget = match beta {
            Beta::E => float(t, prec),
            Beta::Exact(b) => b.ln(prec) * float(t, prec),
        };
        let mut prefix = Vec::with_capacity(s.len());
        match count_rec(&s, beta, t, &budget, &mut prefix, prec) {
            Ok(n) => return Ok(n),
            Err(Unresolved::Tie) => {
                prec *= 2;
                if prec > MAX_ESCALATION_BITS {
                    return Err(Error::BoundaryTieUnresolved);
                }
            }
        }
    }
}

fn count_rec(
    s: &SigmaSet,
    beta: &Beta,
    t: u64,
    budget: &Float,
    prefix: &mut Vec<u32>,
    prec: usize,
) -> std::result::Result<u64, Unresolved> {
    let i = prefix.len();
    let last = i + 1 == s.len();
    let used = s.log_of(prefix);
    let rest = budget - &used;
    if last {
        let x = &rest / &s.logs[i];
        let tol = (abs(&x) + float(1, prec)) * two_pow(-(prec as isize) + 16, prec);
        let k0 = x.floor().to_int().value();
        let frac = &x - Float::from(k0.clone()).with_precision(prec).value();
        let boundary = frac <= tol || float(1, prec) - &frac <= tol;
        let mut k = k0;
        if boundary {
            match beta {
                Beta::E => return Err(Unresolved::Tie),
                Beta::Exact(b) => {
                    // largest k with ∏ q^prefix · q_i^k ≤ β^t
                    let fits = |k: &IBig| {
                        if k.sign() == dashu::base::Sign::Negative {
                            return true;
                        }
                        let kk = u64::try_from(k).expect("small exponent");
                        let mut lhs = s.monomial(prefix);
                        lhs.push((&s.elements[i], kk));
                        exact_cmp(&lhs, &[(b, t)]) != Ordering::Greater
                    };
                    while k.sign() != dashu::base::Sign::Negative && !fits(&k) {
                        k -= IBig::ONE;
                    }
                    while fits(&(&k + IBig::ONE)) {
                        k += IBig::ONE;
                    }
                }
            }
        }
        if k.sign() == dashu::base::Sign::Negative {
            return Ok(0);
        }
        return Ok(u64::try_from(&(k + IBig::ONE)).expect("count fits u64"));
    }
    let mut total = 0u64;
    let mut k = 0u32;
    loop {
        prefix.push(k);
        let fits = {
            let used = s.log_of(prefix);
            match certain_cmp(&used, budget, prec) {
                Some(o) => o != Ordering::Greater,
                None => match beta {
                    Beta::E => {
                        prefix.pop();
                        return Err(Unresolved::Tie);
                    }
                    Beta::Exact(b) => exact_cmp(&s.monomial(prefix), &[(b, t)]) != Ordering::Greater,
                },
            }
        };
        if !fits {
            prefix.pop();
            break;
        }
        let r = count_rec(s, beta, t, budget, prefix, prec);
        prefix.pop();
        total += r?;
        k += 1;
    }
    Ok(total)
}

/// `c(Σ) = 1 / ((s-1)! ∏ log q_i)`.
pub fn c_sigma(sigma: &SigmaSet) -> Result<Float> {
    let s = sigma.len();
    if s < 2 {
        return Err(Error::CSigmaNeedsTwo);
    }
    let prec = sigma.prec;
    let mut denom = float(1, prec);
    for k in 1..s as u64 {
        denom *= float(k, prec);
    }
    for l in &sigma.logs {
        denom *= l;
    }
    Ok(float(1, prec) / denom)
}

/// Exponents `(α, α') = (1/(nε) + σ, -σ)` after validating the parameters.
fn lambda_params(n: u32, sigma_exp: &Float, q: &Float, eps: &Float) -> Result<(Float, Float, usize)> {
    let prec = DEFAULT_PRECISION
        .max(sigma_exp.precision())
        .max(q.precision())
        .max(eps.precision())
        + GUARD_BITS;
    let zero = float(0, prec);
    let one = float(1, prec);
    let sigma = sigma_exp.clone().with_precision(prec).value();
    let q = q.clone().with_precision(prec).value();
    let eps = eps.clone().with_precision(prec).value();
    if n == 0 || sigma >= zero || q <= one {
        return Err(Error::InvalidInput("need n ≥ 1, σ < 0 and q > 1".into()));
    }
    let ne = float(n, prec) * &eps;
    let upper = -(&one / (&sigma * float(n, prec)));
    if eps <= zero || eps >= upper {
        return Err(Error::InvalidEpsilon(format!(
            "ε must lie in (0, {})",
            crate::num::format_float(&upper, 12)
        )));
    }
    let alpha = &one / &ne + &sigma;
    Ok((alpha, -sigma, prec))
}

/// `λ^-(n, σ, q, ε)`, the liminf constant.
pub fn lambda_minus(n: u32, sigma_exp: &Float, q: &Float, eps: &Float) -> Result<Float> {
    let (alpha, alpha_p, prec) = lambda_params(n, sigma_exp, q, eps)?;
    let q = q.clone().with_precision(prec).value();
    let one = float(1, prec);
    let lq = q.ln();
    let a = (&alpha * &lq).exp();
    let rho = &alpha_p / &alpha;
    let a_rho = (&alpha_p * &lq).exp();
    // inf of 𝓛 = (1 + 1/ρ) A/(A-1) A^{-1/(1+ρ)} (ρ(A-1)/(A^ρ-1))^{1/(1+ρ)}
    let inv = &one / (&one + &rho);
    let base = &rho * (&a - &one) / (&a_rho - &one);
    let v = (&one + &one / &rho) * &a / (&a - &one) * (-(&inv * a.ln())).exp() * (&inv * base.ln()).exp();
    Ok(v.with_precision(DEFAULT_PRECISION).value())
}

/// `𝓛(u) = A^{1-u}/(A-1) + A^{ρu}/(A^ρ-1)` with `A = q^α`, `ρ = α'/α`.
pub fn script_l(q: &Float, alpha: &Float, alpha_prime: &Float, u: &Float) -> Float {
    let prec = DEFAULT_PRECISION + GUARD_BITS;
    let q = q.clone().with_precision(prec).value();
    let alpha = alpha.clone().with_precision(prec).value();
    let alpha_p = alpha_prime.clone().with_precision(prec).value();
    let u = u.clone().with_precision(prec).value();
    let one = float(1, prec);
    let lq = q.ln();
    let a = (&alpha * &lq).exp();
    let a_rho = (&alpha_p * &lq).exp();
    let v = (&alpha * &lq * (&one - &u)).exp() / (&a - &one) + (&alpha_p * &lq * &u).exp() / (&a_rho - &one);
    v.with_precision(DEFAULT_PRECISION).value()
}

/// `λ^+(n, σ, q, ε) = sup_u 𝓛(u) = 𝓛(0) = 1 + 1/(A-1) + 1/(A^ρ-1)`.
pub fn lambda_plus(n: u32, sigma_exp: &Float, q: &Float, eps: &Float) -> Result<Float> {
    let (alpha, alpha_p, prec) = lambda_params(n, sigma_exp, q, eps)?;
    let l0 = script_l(q, &alpha, &alpha_p, &float(0, prec));
    let l1 = script_l(q, &alpha, &alpha_p, &float(1, prec));
    Ok(if l0 >= l1 { l0 } else { l1 })
}

/// `L^{-α} Σ_{h ∈ N_{q}} min(h^α, L^{α+α'} h^{-α'})`, split at `h ≤ L` and
/// evaluated with the geometric closed forms.
pub fn oscillation_eval(q: &ExactReal, alpha: &Float, alpha_prime: &Float, l: &ExactReal) -> Result<Float> {
    check_alpha(alpha_prime)?;
    let prec = DEFAULT_PRECISION + GUARD_BITS;
    let le = geometric_closed_form_le(q, alpha, l)?.with_precision(prec).value();
    let gt = geometric_closed_form_gt(q, alpha_prime, l)?.with_precision(prec).value();
    let alpha = alpha.clone().with_precision(prec).value();
    let alpha_p = alpha_prime.clone().with_precision(prec).value();
    let ll = l.ln(prec);
    let v = (le + (&ll * (&alpha + &alpha_p)).exp() * gt) / (&ll * &alpha).exp();
    Ok(v.with_precision(DEFAULT_PRECISION).value())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::{float_f64, to_f64};

    fn sigma(s: &str) -> SigmaSet {
        s.parse().unwrap()
    }

    fn x(s: &str) -> ExactReal {
        s.parse().unwrap()
    }

    fn values(s: &SigmaSet, l: &str) -> Vec<f64> {
        nsigma_up_to(s, &x(l))
            .map(|h| to_f64(&h.value_log.exp()).round())
            .collect()
    }

    fn close(a: &Float, b: f64, tol: f64) -> bool {
        (to_f64(a) - b).abs() <= tol * b.abs().max(1.0)
    }

    #[test]
    fn exact_real_parsing() {
        assert_eq!(x("2^(1/2)").to_string(), "2^(1/2)");
        assert_eq!(x("4^(2/4)").to_string(), "4^(1/2)");
        assert_eq!(x("3/2").to_string(), "3/2");
        assert_eq!(x("2^3").to_string(), "2^3");
        assert!(!"1".parse::<ExactReal>().unwrap().is_greater_than_one());
        assert!("1,2".parse::<SigmaSet>().is_err());
        assert!("2^(0)".parse::<ExactReal>().is_err());
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(values(&sigma("2,3"), "6"), vec![1.0, 2.0, 3.0, 4.0, 6.0]);
        assert_eq!(values(&sigma("2"), "10"), vec![1.0, 2.0, 4.0, 8.0]);
        assert_eq!(
            values(&sigma("2,3,5"), "10"),
            vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 8.0, 9.0, 10.0]
        );
        let by_log: Vec<_> = nsigma_enumerate(&sigma("2,3"), &float(6, 120).ln()).collect();
        assert!(by_log.len() >= 4);
        assert_eq!(by_log[0].exponent_vector, vec![0, 0]);
    }

    #[test]
    fn power_sum_examples() {
        let one = float(1, 120);
        assert!(close(&power_sum_le(&sigma("2"), &one, &x("10")).unwrap(), 15.0, 1e-30));
        assert!(close(&power_sum_le(&sigma("2,3"), &one, &x("6")).unwrap(), 16.0, 1e-30));
        let tol = float_f64(1e-30, 120);
        assert!(close(&power_sum_gt(&sigma("2"), &one, &x("4"), &tol).unwrap(), 0.25, 1e-30));
        assert!(close(&power_sum_gt(&sigma("2"), &one, &x("1"), &tol).unwrap(), 1.0, 1e-30));
        let two = float(2, 120);
        assert!(close(&power_sum_gt(&sigma("2,3"), &two, &x("1"), &tol).unwrap(), 0.5, 1e-30));
    }

    #[test]
    fn closed_form_examples() {
        let one = float(1, 120);
        assert!(close(&geometric_closed_form_le(&x("2"), &one, &x("10")).unwrap(), 15.0, 1e-30));
        assert!(close(&geometric_closed_form_le(&x("2"), &one, &x("16")).unwrap(), 31.0, 1e-30));
        assert!(close(&geometric_closed_form_le(&x("3"), &float(2, 120), &x("1")).unwrap(), 1.0, 1e-30));
        assert!(close(&geometric_closed_form_gt(&x("2"), &one, &x("1")).unwrap(), 1.0, 1e-30));
        assert!(close(&geometric_closed_form_gt(&x("2"), &one, &x("4")).unwrap(), 0.25, 1e-30));
    }

    #[test]
    fn floor_log_on_exact_powers() {
        assert_eq!(floor_log(&x("2"), &x("16"), 120).unwrap(), 4);
        assert_eq!(floor_log(&x("2"), &x("2^(61/2)"), 120).unwrap(), 30);
        assert_eq!(floor_log(&x("2^(1/2)"), &x("8"), 120).unwrap(), 6);
        assert_eq!(floor_log(&x("3"), &x("1"), 120).unwrap(), 0);
    }

    #[test]
    fn lattice_examples() {
        assert_eq!(lattice_count(&sigma("2,3"), &Beta::E, 10).unwrap(), 78);
        assert_eq!(lattice_count(&sigma("2"), &Beta::Exact(x("2")), 5).unwrap(), 6);
        assert_eq!(lattice_count(&sigma("2,3"), &Beta::E, 0).unwrap(), 1);
        // exact boundary: 2^a 3^b ≤ 6^2 = 36
        assert_eq!(lattice_count(&sigma("2,3"), &Beta::Exact(x("6")), 2).unwrap(), 14);
    }

    #[test]
    fn c_sigma_examples() {
        assert!(close(&c_sigma(&sigma("2,3")).unwrap(), 1.0 / (2f64.ln() * 3f64.ln()), 1e-14));
        assert!(close(
            &c_sigma(&sigma("2,3,5")).unwrap(),
            1.0 / (2.0 * 2f64.ln() * 3f64.ln() * 5f64.ln()),
            1e-14
        ));
        assert!(close(&c_sigma(&sigma("4,9")).unwrap(), 0.25 / (2f64.ln() * 3f64.ln()), 1e-14));
        assert_eq!(c_sigma(&sigma("2")).unwrap_err(), Error::CSigmaNeedsTwo);
    }

    #[test]
    fn lambda_examples() {
        let m1 = float(-1, 120);
        let two = float(2, 120);
        let third = float(1, 120) / float(3, 120);
        let half = float(1, 120) / float(2, 120);
        let lm = lambda_minus(1, &m1, &two, &third).unwrap();
        let lp = lambda_plus(1, &m1, &two, &third).unwrap();
        assert!(close(&lm, 3f64.powf(2.0 / 3.0), 1e-14));
        assert!(close(&lp, 7.0 / 3.0, 1e-14));
        assert!(close(&lambda_minus(1, &m1, &two, &half).unwrap(), 2.0 * 2f64.sqrt(), 1e-14));
        assert!(close(&lambda_plus(1, &m1, &two, &half).unwrap(), 3.0, 1e-14));
        assert!(matches!(lambda_minus(1, &m1, &two, &float(1, 120)), Err(Error::InvalidEpsilon(_))));
    }

    #[test]
    fn oscillation_examples() {
        let two = float(2, 120);
        let one = float(1, 120);
        let v = oscillation_eval(&x("2"), &two, &one, &x("2^10")).unwrap();
        let want = 7.0 / 3.0 - (1.0 / 3.0) * 4f64.powi(-10);
        assert!(close(&v, want, 1e-14));
        let v = oscillation_eval(&x("2"), &two, &one, &x("2^(21/2)")).unwrap();
        assert!((to_f64(&v) - 2.0801).abs() < 1e-3);
        // at L = 1 the h = 1 term is 1 and every h > 1 contributes h^{-α'}
        let v = oscillation_eval(&x("5/2"), &two, &one, &x("1")).unwrap();
        assert!(close(&v, 5.0 / 3.0, 1e-30));
    }
}
