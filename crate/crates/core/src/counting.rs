//! S-parts of polynomial values, exact counters for `N` and `Ñ`, the real
//! measure of `V_f(B, M)`, the adelic measure and the predicted main terms.

use std::cmp::Ordering;

use dashu::base::{Abs, BitTest, Signed, UnsignedAbs};
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::igusa::LocalFactor;
use crate::msums::{c_sigma, lambda_minus, lambda_plus, SigmaSet};
use crate::num::{float, float_rat, float_to_rational, rational_string, to_f64, Float, DEFAULT_PRECISION};
use crate::padic::{check_prime, p_power, val};
use crate::poly::IntPoly;

/// Number of integers handled by one sieve partition.
pub const DEFAULT_CHUNK: u64 = 1 << 16;

/// Bisection depth for `V_f` endpoints, relative to `max(B, 1)`.
const VF_TOL_BITS: u32 = 64;

/// `[y]_S`, the largest divisor of `|y|` supported on `S`.
pub fn s_part(y: &IBig, primes: &[u64]) -> Result<UBig> {
    if y.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    let mut out = UBig::ONE;
    for &p in primes {
        check_prime(p)?;
        let v = val(y, p).expect("nonzero");
        out *= UBig::from(p).pow(v as usize);
    }
    Ok(out)
}

/// Everything about `(f, S)` the counters and predictors need.
#[derive(Clone, Debug, Serialize)]
pub struct SPartContext {
    #[serde(serialize_with = "serialize_poly")]
    pub f: IntPoly,
    pub primes: Vec<u64>,
    pub s_prime: Vec<u64>,
    /// `R_p(f)` for `p ∈ S'`, in the order of `s_prime`.
    pub r_p: Vec<u32>,
    /// `R_{S'}(f)`, zero when `S'` is empty.
    pub r_s_prime: u32,
    /// `r_{p,S}(f)` for every `p ∈ S`, in the order of `primes`.
    #[serde(serialize_with = "serialize_rationals")]
    pub r_exponents: Vec<RBig>,
    #[serde(serialize_with = "crate::num::serialize_ibig")]
    pub h_s: IBig,
    #[serde(serialize_with = "serialize_weights")]
    pub divisor_weights: Vec<(IBig, RBig)>,
    #[serde(skip)]
    pub locals: Vec<LocalFactor>,
}

fn serialize_poly<S: serde::Serializer>(f: &IntPoly, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&f.to_human())
}

fn serialize_rationals<S: serde::Serializer>(v: &[RBig], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational_string))
}

fn serialize_weights<S: serde::Serializer>(v: &[(IBig, RBig)], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|(h, c)| (h.to_string(), rational_string(c))))
}

impl SPartContext {
    pub fn degree(&self) -> usize {
        self.f.degree().unwrap_or(0)
    }

    pub fn s_prime_len(&self) -> usize {
        self.s_prime.len()
    }

    pub fn local(&self, p: u64) -> Option<&LocalFactor> {
        self.primes.iter().position(|&q| q == p).map(|i| &self.locals[i])
    }

    /// True when every `p ∈ S'` has the same `R_p`.
    pub fn is_balanced(&self) -> bool {
        self.r_p.windows(2).all(|w| w[0] == w[1])
    }

    /// True when all Z_p-roots are simple for every `p ∈ S'`.
    pub fn simple_roots(&self) -> bool {
        self.r_p.iter().all(|&r| r == 1)
    }

    /// `Σ_{h0 | H_S} C_{h0} h0`.
    pub fn weighted_divisor_sum(&self) -> RBig {
        self.divisor_weights
            .iter()
            .map(|(h, c)| c * RBig::from(h.clone()))
            .fold(RBig::ZERO, |a, b| a + b)
    }
}

/// Assembles `S'`, `R_p`, `r_{p,S}`, `H_S` and the weights `C_{h0}`.
pub fn build_context(f: &IntPoly, primes: &[u64]) -> Result<SPartContext> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if primes.is_empty() {
        return Err(Error::InvalidInput("S must be non-empty".into()));
    }
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    for &p in &primes {
        check_prime(p)?;
    }
    let locals = primes
        .par_iter()
        .map(|&p| LocalFactor::new(f, p))
        .collect::<Result<Vec<_>>>()?;

    let mut s_prime = Vec::new();
    let mut r_p = Vec::new();
    for l in &locals {
        if let Some(d) = l.igusa() {
            s_prime.push(d.p());
            r_p.push(d.profile.r_max);
        }
    }
    let r_s_prime = r_p.iter().copied().max().unwrap_or(0);
    let r_exponents = locals
        .iter()
        .map(|l| match l.igusa() {
            Some(d) => RBig::from_parts(IBig::from(r_s_prime), UBig::from(d.profile.r_max)),
            None => RBig::ONE,
        })
        .collect();

    let mut divisor_weights = vec![(IBig::ONE, RBig::ONE)];
    for l in &locals {
        if let LocalFactor::Rootless { p, u_p, .. } = l {
            let mut next = Vec::new();
            for (h, c) in &divisor_weights {
                for e in 0..=*u_p {
                    let w = l.measure(e);
                    if !w.is_zero() {
                        next.push((h * p_power(*p, e), c * w));
                    }
                }
            }
            divisor_weights = next;
        }
    }
    divisor_weights.sort_by(|a, b| a.0.cmp(&b.0));
    let h_s = locals
        .iter()
        .filter_map(|l| match l {
            LocalFactor::Rootless { p, u_p, .. } => Some(p_power(*p, *u_p)),
            LocalFactor::Rooted(_) => None,
        })
        .fold(IBig::ONE, |a, b| a * b);

    Ok(SPartContext {
        f: f.clone(),
        primes,
        s_prime,
        r_p,
        r_s_prime,
        r_exponents,
        h_s,
        divisor_weights,
        locals,
    })
}

/// Parses and validates `ε > 0`.
pub fn check_eps(eps: &RBig) -> Result<()> {
    if eps.numerator() <= &IBig::ZERO {
        return Err(Error::InvalidEpsilon(format!("ε must be positive, got {}", rational_string(eps))));
    }
    Ok(())
}

/// The inequality `|y|^ε ≤ ∏ p^{w_p v_p}` with `ε = a/b` and `w_p = n_p/D`,
/// decided as `|y|^{aD} ≤ ∏ p^{b n_p v_p}`.
#[derive(Clone, Debug)]
struct Criterion {
    primes: Vec<u64>,
    a: usize,
    b: u64,
    d: usize,
    n: Vec<u64>,
    eps_f: f64,
    log_w: Vec<f64>,
}

impl Criterion {
    fn new(ctx: &SPartContext, eps: &RBig, normalized: bool) -> Result<Self> {
        check_eps(eps)?;
        let a: usize = eps
            .numerator()
            .try_into()
            .map_err(|_| Error::InvalidEpsilon("numerator too large".into()))?;
        let b: u64 = eps
            .denominator()
            .try_into()
            .map_err(|_| Error::InvalidEpsilon("denominator too large".into()))?;
        let weights: Vec<RBig> = if normalized {
            ctx.r_exponents.clone()
        } else {
            vec![RBig::ONE; ctx.primes.len()]
        };
        let mut d = UBig::ONE;
        for w in &weights {
            let den = w.denominator();
            let g = dashu::base::Gcd::gcd(&d, den);
            d = &d * den / g;
        }
        let d_small: usize = (&d).try_into().map_err(|_| Error::InvalidInput("weights too large".into()))?;
        let n = weights
            .iter()
            .map(|w| {
                let scaled = w * RBig::from(d.clone());
                u64::try_from(scaled.numerator()).expect("small weight")
            })
            .collect();
        let log_w = weights
            .iter()
            .zip(&ctx.primes)
            .map(|(w, &p)| crate::num::rat_to_f64(w) * (p as f64).ln())
            .collect();
        Ok(Criterion {
            primes: ctx.primes.clone(),
            a,
            b,
            d: d_small,
            n,
            eps_f: crate::num::rat_to_f64(eps),
            log_w,
        })
    }

    /// Decision given `ln|y|` (approximate) and the exact valuations.
    fn decide(&self, y_abs: impl FnOnce() -> UBig, ln_y: f64, vals: &[u32]) -> bool {
        if vals.iter().all(|&v| v == 0) {
            return ln_y < 0.5; // |y| ≤ 1 ⟺ |y| == 1
        }
        let lhs = self.eps_f * ln_y;
        let rhs: f64 = vals.iter().zip(&self.log_w).map(|(&v, w)| v as f64 * w).sum();
        let margin = 1e-9 * (1.0 + lhs.abs() + rhs.abs());
        if lhs < rhs - margin {
            return true;
        }
        if lhs > rhs + margin {
            return false;
        }
        self.exact(&y_abs(), vals)
    }

    fn exact(&self, y_abs: &UBig, vals: &[u32]) -> bool {
        let lhs = y_abs.pow(self.a * self.d);
        let mut rhs = UBig::ONE;
        for ((&p, &n), &v) in self.primes.iter().zip(&self.n).zip(vals) {
            let e = self.b as usize * n as usize * v as usize;
            rhs *= UBig::from(p).pow(e);
        }
        lhs <= rhs
    }
}

fn ln_ubig(y: &UBig) -> f64 {
    let bits = y.bit_len();
    if bits <= 1000 {
        return y.to_f64().value().ln();
    }
    let shift = bits - 64;
    let top: UBig = y >> shift;
    top.to_f64().value().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Exact truth of `0 < |f(x)|^ε ≤ [f(x)]_S` (plain) or `≤ [f(x)]_{f,S}` (normalized).
pub fn satisfies_condition(x: &IBig, ctx: &SPartContext, eps: &RBig, normalized: bool) -> Result<bool> {
    let crit = Criterion::new(ctx, eps, normalized)?;
    Ok(satisfies_with(&crit, &ctx.f, x))
}

fn satisfies_with(crit: &Criterion, f: &IntPoly, x: &IBig) -> bool {
    let y = f.eval(x);
    if y.is_zero() {
        return false;
    }
    let vals: Vec<u32> = crit.primes.iter().map(|&p| val(&y, p).expect("nonzero")).collect();
    let y_abs = y.unsigned_abs();
    let ln_y = ln_ubig(&y_abs);
    crit.decide(|| y_abs, ln_y, &vals)
}

/// Per-prime residue classes `a mod p^j` with `p^j | f(a) / p^e`, `e` the
/// content valuation, for `j = 1..=depth`.
#[derive(Clone, Debug)]
struct PrimeSieve {
    p: u64,
    content: u32,
    depth: u32,
    levels: Vec<(i64, Vec<i64>)>,
}

impl PrimeSieve {
    fn new(f: &IntPoly, p: u64, b: u64) -> Self {
        let content = crate::padic::content_valuation(f, p).unwrap_or(0);
        let reduced = f.div_scalar(&p_power(p, content));
        let span = 2 * b as u128 + 1;
        let mut depth = 0u32;
        let mut m: u128 = 1;
        while m * p as u128 <= span {
            m *= p as u128;
            depth += 1;
        }
        let mut levels = Vec::with_capacity(depth as usize);
        let mut classes: Vec<i64> = vec![0];
        let mut modulus: i64 = 1;
        for _ in 0..depth {
            let next_mod = modulus * p as i64;
            let m_big = IBig::from(next_mod);
            let mut next = Vec::new();
            for &a in &classes {
                for t in 0..p as i64 {
                    let c = a + t * modulus;
                    if reduced.eval_mod(&IBig::from(c), &m_big).is_zero() {
                        next.push(c);
                    }
                }
            }
            next.sort_unstable();
            modulus = next_mod;
            classes = next;
            levels.push((modulus, classes.clone()));
            if classes.is_empty() {
                break;
            }
        }
        PrimeSieve {
            p,
            content,
            depth,
            levels,
        }
    }

    /// Adds one to `vals[x - lo]` for every level whose class contains `x`.
    fn mark(&self, lo: i64, vals: &mut [u8]) {
        let len = vals.len() as i64;
        for (m, classes) in &self.levels {
            for &a in classes {
                let mut x = (a - lo).rem_euclid(*m);
                while x < len {
                    vals[x as usize] += 1;
                    x += m;
                }
            }
        }
    }
}

/// Horner evaluation in `i128`, `None` on overflow.
fn eval_i128(coeffs: &[i128], x: i128) -> Option<i128> {
    let mut acc: i128 = 0;
    for &c in coeffs.iter().rev() {
        acc = acc.checked_mul(x)?.checked_add(c)?;
    }
    Some(acc)
}

struct Counter<'a> {
    f: &'a IntPoly,
    small: Option<Vec<i128>>,
    sieves: Vec<PrimeSieve>,
    crit: Criterion,
}

impl<'a> Counter<'a> {
    fn new(ctx: &'a SPartContext, eps: &RBig, b: u64, normalized: bool) -> Result<Self> {
        let crit = Criterion::new(ctx, eps, normalized)?;
        let small = ctx.f.coeffs().iter().map(|c| i128::try_from(c).ok()).collect();
        let sieves = ctx.primes.iter().map(|&p| PrimeSieve::new(&ctx.f, p, b)).collect();
        Ok(Counter {
            f: &ctx.f,
            small,
            sieves,
            crit,
        })
    }

    fn count_range(&self, lo: i64, hi: i64) -> u64 {
        let len = (hi - lo + 1) as usize;
        let lanes: Vec<Vec<u8>> = self
            .sieves
            .iter()
            .map(|s| {
                let mut v = vec![0u8; len];
                s.mark(lo, &mut v);
                v
            })
            .collect();
        let no_content = self.sieves.iter().all(|s| s.content == 0);
        let mut vals = vec![0u32; self.sieves.len()];
        let mut count = 0u64;
        for i in 0..len {
            let x = lo + i as i64;
            let y_small = self.small.as_ref().and_then(|c| eval_i128(c, x as i128));
            if y_small == Some(0) {
                continue;
            }
            if no_content && lanes.iter().all(|l| l[i] == 0) {
                let unit = match y_small {
                    Some(y) => y.unsigned_abs() == 1,
                    None => self.f.eval(&IBig::from(x)).unsigned_abs() == UBig::ONE,
                };
                count += unit as u64;
                continue;
            }
            let y_big = || match y_small {
                Some(y) => IBig::from(y),
                None => self.f.eval(&IBig::from(x)),
            };
            let mut exact_y: Option<IBig> = None;
            let mut zero = false;
            for (k, s) in self.sieves.iter().enumerate() {
                let lane = lanes[k][i] as u32;
                vals[k] = if lane >= s.depth {
                    let y = exact_y.get_or_insert_with(y_big);
                    match val(y, s.p) {
                        Some(v) => v,
                        None => {
                            zero = true;
                            break;
                        }
                    }
                } else {
                    s.content + lane
                };
            }
            if zero {
                continue;
            }
            let ok = match (y_small, exact_y) {
                (Some(y), _) => {
                    let ya = y.unsigned_abs();
                    self.crit.decide(|| UBig::from(ya), (ya as f64).ln(), &vals)
                }
                (None, Some(y)) => {
                    let ya = y.unsigned_abs();
                    let ln = ln_ubig(&ya);
                    self.crit.decide(|| ya, ln, &vals)
                }
                (None, None) => {
                    let ya = y_big().unsigned_abs();
                    let ln = ln_ubig(&ya);
                    self.crit.decide(|| ya, ln, &vals)
                }
            };
            count += ok as u64;
        }
        count
    }
}

/// `N(f, S, ε, B)` (plain) or `Ñ(f, S, ε, B)` (normalized), counted by the
/// residue-class sieve over parallel partitions of `[-B, B]`.
pub fn count_n(ctx: &SPartContext, eps: &RBig, b: u64, normalized: bool) -> Result<u64> {
    count_n_partitioned(ctx, eps, b, normalized, DEFAULT_CHUNK, true)
}

/// Single-threaded variant of [`count_n`].
pub fn count_n_serial(ctx: &SPartContext, eps: &RBig, b: u64, normalized: bool) -> Result<u64> {
    count_n_partitioned(ctx, eps, b, normalized, DEFAULT_CHUNK, false)
}

/// Sieve count with an explicit partition size; the result does not depend
/// on `chunk` or `parallel`.
pub fn count_n_partitioned(
    ctx: &SPartContext,
    eps: &RBig,
    b: u64,
    normalized: bool,
    chunk: u64,
    parallel: bool,
) -> Result<u64> {
    if b > (i64::MAX / 4) as u64 {
        return Err(Error::InvalidInput("bound too large".into()));
    }
    let counter = Counter::new(ctx, eps, b, normalized)?;
    let chunk = chunk.max(1);
    let total = 2 * b + 1;
    let parts = total.div_ceil(chunk);
    let lo = -(b as i64);
    let part = |k: u64| {
        let start = lo + (k * chunk) as i64;
        let end = (start + chunk as i64 - 1).min(b as i64);
        counter.count_range(start, end)
    };
    Ok(if parallel {
        (0..parts).into_par_iter().map(part).sum()
    } else {
        (0..parts).map(part).sum()
    })
}

/// Reference count: factor every `f(x)` over `S` directly.
pub fn count_naive(ctx: &SPartContext, eps: &RBig, b: u64, normalized: bool) -> Result<u64> {
    let crit = Criterion::new(ctx, eps, normalized)?;
    let b = b as i64;
    Ok((-b..=b)
        .filter(|&x| satisfies_with(&crit, &ctx.f, &IBig::from(x)))
        .count() as u64)
}

/// A dyadic rational `num / 2^shift`.
#[derive(Clone, Debug, PartialEq, Eq)]
struct Dyadic {
    num: IBig,
    shift: usize,
}

impl Dyadic {
    fn from_float(x: &Float) -> Self {
        let repr = x.repr();
        let exp = repr.exponent();
        if exp >= 0 {
            Dyadic {
                num: repr.significand().clone() << exp as usize,
                shift: 0,
            }
        } else {
            Dyadic {
                num: repr.significand().clone(),
                shift: (-exp) as usize,
            }
        }
    }

    fn at_shift(&self, s: usize) -> IBig {
        debug_assert!(s >= self.shift);
        self.num.clone() << (s - self.shift)
    }

    fn midpoint(a: &Dyadic, b: &Dyadic) -> Dyadic {
        let s = a.shift.max(b.shift);
        Dyadic {
            num: a.at_shift(s) + b.at_shift(s),
            shift: s + 1,
        }
    }

    fn cmp(&self, other: &Dyadic) -> Ordering {
        let s = self.shift.max(other.shift);
        self.at_shift(s).cmp(&other.at_shift(s))
    }
}

/// `2^{shift·deg} P(num / 2^shift)`, an integer with the sign of `P` at the point.
fn eval_dyadic(p: &IntPoly, x: &Dyadic) -> IBig {
    let c = p.coeffs();
    let Some(n) = p.degree() else {
        return IBig::ZERO;
    };
    let mut acc = c[n].clone();
    for i in (0..n).rev() {
        acc = acc * &x.num + (c[i].clone() << (x.shift * (n - i)));
    }
    acc
}

fn sign_dyadic(p: &IntPoly, x: &Dyadic) -> i8 {
    let v = eval_dyadic(p, x);
    if v.is_zero() {
        0
    } else if v.is_negative() {
        -1
    } else {
        1
    }
}

/// Sturm chain of `g` over Z, kept primitive with positive rescalings only.
fn sturm_chain(g: &IntPoly) -> Vec<IntPoly> {
    let mut chain = vec![g.clone()];
    let d = g.derivative();
    if d.is_zero() {
        return chain;
    }
    chain.push(d);
    loop {
        let n = chain.len();
        let (a, b) = (&chain[n - 2], &chain[n - 1]);
        if b.degree() == Some(0) {
            break;
        }
        let r = a.pseudo_rem(b);
        if r.is_zero() {
            break;
        }
        let delta = a.degree().unwrap() - b.degree().unwrap();
        let flip = b.leading_coeff().unwrap().is_negative() && delta % 2 == 0;
        let r = if flip { r } else { -&r };
        let c = IBig::from(r.content());
        chain.push(r.div_scalar(&c));
    }
    chain
}

fn variations(chain: &[IntPoly], x: &Dyadic) -> usize {
    let mut last = 0i8;
    let mut v = 0;
    for p in chain {
        let s = sign_dyadic(p, x);
        if s != 0 {
            if last != 0 && s != last {
                v += 1;
            }
            last = s;
        }
    }
    v
}

/// Midpoints of width-limited intervals containing the roots of `chain[0]` in `(lo, hi]`.
fn isolate(chain: &[IntPoly], lo: &Dyadic, vlo: usize, hi: &Dyadic, vhi: usize, depth: u32, out: &mut Vec<Dyadic>) {
    if vlo <= vhi {
        return;
    }
    let mid = Dyadic::midpoint(lo, hi);
    if depth == 0 {
        out.push(mid);
        return;
    }
    let vmid = variations(chain, &mid);
    isolate(chain, lo, vlo, &mid, vmid, depth - 1, out);
    isolate(chain, &mid, vmid, hi, vhi, depth - 1, out);
}

fn abs_coeff_bound(f: &IntPoly, b: &Float) -> Float {
    let one = float(1, DEFAULT_PRECISION);
    let base = if b > &one { b.clone() } else { one };
    let mut acc = float(0, DEFAULT_PRECISION);
    for c in f.coeffs().iter().rev() {
        acc = acc * &base + float(c.abs(), DEFAULT_PRECISION);
    }
    acc
}

/// Lebesgue measure of `V_f(B, M) = {x ∈ R : |x| ≤ B, |f(x)| ≤ M}`.
pub fn vf_measure(f: &IntPoly, b: &Float, m: &Float) -> Float {
    vf_measure_with_depth(f, b, m, VF_TOL_BITS)
}

/// [`vf_measure`] with endpoints located to within `max(B, 1)·2^{-tol_bits}`.
pub fn vf_measure_with_depth(f: &IntPoly, b: &Float, m: &Float, tol_bits: u32) -> Float {
    let zero = float(0, DEFAULT_PRECISION);
    if b <= &zero || m < &zero {
        return zero;
    }
    let two_b = float(2, DEFAULT_PRECISION) * b;
    if m >= &abs_coeff_bound(f, b) {
        return two_b;
    }
    let Some(n) = f.degree().filter(|&n| n > 0) else {
        return if float(f.coeff(0).abs(), DEFAULT_PRECISION) <= *m { two_b } else { zero };
    };
    let bd = Dyadic::from_float(b);
    let md = Dyadic::from_float(m);
    let lo = Dyadic {
        num: -bd.num.clone(),
        shift: bd.shift,
    };
    let scale = IBig::ONE << md.shift;
    let scaled = f.scale(&scale);
    let mconst = IntPoly::constant(md.num.clone());
    let bits = b.to_int().value().unsigned_abs().bit_len() as u32 + 1;
    let depth = tol_bits + bits + 1;

    let mut points = vec![lo.clone(), bd.clone()];
    for g in [&scaled - &mconst, &scaled + &mconst] {
        let chain = sturm_chain(&g);
        let vlo = variations(&chain, &lo);
        let vhi = variations(&chain, &bd);
        isolate(&chain, &lo, vlo, &bd, vhi, depth, &mut points);
    }
    points.sort_by(|a, b| a.cmp(b));
    points.dedup();
    points.retain(|x| x.cmp(&lo) != Ordering::Less && x.cmp(&bd) != Ordering::Greater);

    let shift = points.iter().map(|x| x.shift).max().unwrap_or(0) + 1;
    let mut total = IBig::ZERO;
    for w in points.windows(2) {
        let mid = Dyadic::midpoint(&w[0], &w[1]);
        // |f(mid)| ≤ M, cleared of denominators
        let fv = eval_dyadic(f, &mid).unsigned_abs() << md.shift;
        let bound = md.num.clone().unsigned_abs() << (mid.shift * n);
        if fv <= bound {
            total += w[1].at_shift(shift) - w[0].at_shift(shift);
        }
    }
    Float::from_parts(total, -(shift as isize)).with_precision(DEFAULT_PRECISION).value()
}

/// Exponents `(a, b)` of `ε` as floats and the validated positive rational.
fn eps_float(eps: &RBig) -> Result<Float> {
    check_eps(eps)?;
    Ok(float_rat(eps, DEFAULT_PRECISION))
}

/// `μ(𝔸(f, S, ε, B, γ))`: the sum over `h0 | H_S` and `h' ∈ N_{S'}` of
/// `μ_∞(V_f(B, (γ ξ_f(h0 h'))^{1/ε})) C_{h0} ∏_{p ∈ S'} μ_p(U_{p^{v_p(h')}})`.
///
/// Terms with `(γ ξ)^{1/ε}` above `max_{|x| ≤ B} |f|` have `μ_∞ = 2B`; their
/// total local weight is one minus the weight of the enumerated terms, so the
/// sum is exact up to the endpoint tolerance `tol_bits` of [`vf_measure_with_depth`].
pub fn adelic_measure(ctx: &SPartContext, eps: &RBig, b: &Float, gamma: &RBig, tol_bits: u32) -> Result<Float> {
    let eps_f = eps_float(eps)?;
    if gamma.numerator() <= &IBig::ZERO {
        return Err(Error::InvalidInput("γ must be positive".into()));
    }
    let prec = DEFAULT_PRECISION;
    let two_b = float(2, prec) * b;
    let ln_gamma = float_rat(gamma, prec).ln();
    let ln_max = abs_coeff_bound(&ctx.f, b).ln();
    let ln_threshold = &eps_f * &ln_max;

    let sp: Vec<(u64, Float, &LocalFactor)> = ctx
        .primes
        .iter()
        .zip(&ctx.r_exponents)
        .zip(&ctx.locals)
        .filter(|(_, l)| l.igusa().is_some())
        .map(|((&p, r), l)| (p, float_rat(r, prec) * float(p, prec).ln(), l))
        .collect();

    let mut total = float(0, prec);
    for (h0, c) in &ctx.divisor_weights {
        let base_log = &ln_gamma + float(h0.clone(), prec).ln();
        let mut terms = Vec::new();
        enumerate_below(&sp, 0, base_log, RBig::ONE, &ln_threshold, &mut terms);
        let mut inner = float(0, prec);
        let mut used = RBig::ZERO;
        for (log_xi, w) in terms {
            let m = (log_xi / &eps_f).exp();
            inner += vf_measure_with_depth(&ctx.f, b, &m, tol_bits) * float_rat(&w, prec);
            used += w;
        }
        inner += &two_b * float_rat(&(RBig::ONE - used), prec);
        total += inner * float_rat(c, prec);
    }
    Ok(total)
}

/// Exponent vectors with `ln(γ h0 ξ) < threshold`, paired with their local weight.
fn enumerate_below(
    sp: &[(u64, Float, &LocalFactor)],
    i: usize,
    log: Float,
    weight: RBig,
    threshold: &Float,
    out: &mut Vec<(Float, RBig)>,
) {
    if &log >= threshold {
        return;
    }
    if i == sp.len() {
        out.push((log, weight));
        return;
    }
    let (_, step, local) = &sp[i];
    let mut k = 0u32;
    let mut cur = log;
    while &cur < threshold {
        let w = local.measure(k);
        if !w.is_zero() {
            enumerate_below(sp, i + 1, cur.clone(), &weight * w, threshold, out);
        }
        cur += step;
        k += 1;
    }
}

fn check_simple_roots(ctx: &SPartContext) -> Result<()> {
    for (&p, &r) in ctx.s_prime.iter().zip(&ctx.r_p) {
        if r > 1 {
            return Err(Error::MultipleRoot(p));
        }
    }
    Ok(())
}

/// Checks `0 < ε < bound/n` for a positive integer degree.
fn check_eps_below(ctx: &SPartContext, eps: &RBig, bound: u32) -> Result<()> {
    check_eps(eps)?;
    let n = ctx.degree();
    if n == 0 {
        return Err(Error::InvalidInput("predictions need degree ≥ 1".into()));
    }
    let limit = RBig::from_parts(IBig::from(bound), UBig::from(n));
    if eps >= &limit {
        return Err(Error::InvalidEpsilon(format!(
            "ε must lie in (0, {})",
            rational_string(&limit)
        )));
    }
    Ok(())
}

/// `μ_p(U_{p^{a_p+1}}) p^{a_p+1}` for `p ∈ S'`.
fn local_leading(local: &LocalFactor) -> RBig {
    let d = local.igusa().expect("rooted");
    let k = d.a_p + 1;
    d.measure(k) * RBig::from(p_power(d.p(), k))
}

/// `|c_f|^{-ε}`.
fn leading_coeff_factor(ctx: &SPartContext, eps: &Float) -> Float {
    let c = ctx.f.leading_coeff().expect("nonzero").abs();
    (-(eps * float(c, DEFAULT_PRECISION).ln())).exp()
}

/// `C(f, S, ε)`, the constant of `N(f,S,ε,B) ~ C B^{1-nε} (log B)^{s'-1}`.
pub fn asymptotic_constant(ctx: &SPartContext, eps: &RBig) -> Result<Float> {
    if ctx.s_prime.len() < 2 {
        return Err(Error::ExactAsymptoticsNeedsTwo);
    }
    check_simple_roots(ctx)?;
    check_eps_below(ctx, eps, 1)?;
    let prec = DEFAULT_PRECISION;
    let eps_f = float_rat(eps, prec);
    let sigma = SigmaSet::from_integers(&ctx.s_prime)?;
    let c = c_sigma(&sigma)?;
    let n = float(ctx.degree(), prec);
    let one = float(1, prec);
    let mut local = RBig::ONE;
    for l in ctx.locals.iter().filter(|l| l.igusa().is_some()) {
        local *= local_leading(l);
    }
    let value = float(2, prec) * c / (&one - &n * &eps_f)
        * float_rat(&ctx.weighted_divisor_sum(), prec)
        * float_rat(&local, prec)
        * leading_coeff_factor(ctx, &eps_f);
    Ok(value)
}

/// [`asymptotic_constant`] times `(nε)^{s'-1}`.
///
/// The cut-off `h* ≈ |c_f|^ε B^{nε}` between the two regimes of the sum over
/// `N_{S'}` contributes `(log h*)^{s'-1} ~ (nε)^{s'-1} (log B)^{s'-1}`, so this is
/// the value `N / (B^{1-nε} (log B)^{s'-1})` actually tends to.
pub fn refined_asymptotic_constant(ctx: &SPartContext, eps: &RBig) -> Result<Float> {
    let c = asymptotic_constant(ctx, eps)?;
    let ne = float_rat(&(RBig::from(ctx.degree()) * eps), DEFAULT_PRECISION);
    Ok(c * pow_float(&ne, ctx.s_prime.len() as u32 - 1))
}

/// `(liminf, limsup)` of `N(f, {p}, ε, B) / B^{1-nε}` when `S = S' = {p}`.
pub fn envelope_s1(ctx: &SPartContext, eps: &RBig) -> Result<(Float, Float)> {
    if ctx.s_prime.len() != 1 {
        return Err(Error::EnvelopeUnavailable(format!(
            "needs s′ = 1, got s′ = {}",
            ctx.s_prime.len()
        )));
    }
    if ctx.primes.len() != 1 {
        return Err(Error::EnvelopeUnavailable("S ⊋ S′ = {p} has no closed envelope".into()));
    }
    check_simple_roots(ctx)?;
    check_eps_below(ctx, eps, 1)?;
    let prec = DEFAULT_PRECISION;
    let p = ctx.s_prime[0];
    let eps_f = float_rat(eps, prec);
    let sigma = float(-1, prec);
    let q = float(p, prec);
    let n = ctx.degree() as u32;
    let lm = lambda_minus(n, &sigma, &q, &eps_f)?;
    let lp = lambda_plus(n, &sigma, &q, &eps_f)?;
    let base = float(2, prec) * float_rat(&local_leading(&ctx.locals[0]), prec) * leading_coeff_factor(ctx, &eps_f);
    Ok((&base * lm, base * lp))
}

/// A main-term prediction; `order_only` marks a bare growth shape without constant.
#[derive(Clone, Debug)]
pub struct Prediction {
    pub value: Float,
    pub order_only: bool,
    /// Exponent of `B` in the prediction.
    pub exponent: Float,
    /// Power of `log B` in the prediction.
    pub log_power: u32,
}

/// Growth exponent `1 - nε/R_{S'}` of the count.
pub fn growth_exponent(ctx: &SPartContext, eps: &RBig) -> Result<RBig> {
    if ctx.s_prime.is_empty() {
        return Err(Error::FiniteCountRegime);
    }
    check_eps_below(ctx, eps, ctx.r_s_prime)?;
    let n = RBig::from(ctx.degree());
    Ok(RBig::ONE - n * eps / RBig::from(ctx.r_s_prime))
}

/// `C B^{1-nε} (log B)^{s'-1}` when the exact constant applies, otherwise the
/// shape `B^{1-nε/R_{S'}} (log B)^{s'-1}` flagged order-only.
pub fn predicted_main_term(ctx: &SPartContext, eps: &RBig, b: &Float, normalized: bool) -> Result<Prediction> {
    let theta = growth_exponent(ctx, eps)?;
    let prec = DEFAULT_PRECISION;
    let s1 = ctx.s_prime.len() as u32 - 1;
    let exponent = float_rat(&theta, prec);
    let lb = b.clone().with_precision(prec).value().ln();
    let shape = (&exponent * &lb).exp() * pow_float(&lb, s1);
    let exact = ctx.s_prime.len() >= 2 && ctx.simple_roots() && (normalized || ctx.is_balanced());
    if exact {
        let c = asymptotic_constant(ctx, eps)?;
        return Ok(Prediction {
            value: c * shape,
            order_only: false,
            exponent,
            log_power: s1,
        });
    }
    Ok(Prediction {
        value: shape,
        order_only: true,
        exponent,
        log_power: s1,
    })
}

fn pow_float(x: &Float, k: u32) -> Float {
    let mut acc = float(1, x.precision().max(DEFAULT_PRECISION));
    for _ in 0..k {
        acc *= x;
    }
    acc
}

/// One rung of a report ladder.
#[derive(Clone, Debug)]
pub struct LadderEntry {
    pub b: u64,
    pub count: u64,
    pub predicted: Option<Float>,
    pub ratio: Option<Float>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Plain,
    Normalized,
}

impl Mode {
    pub fn is_normalized(self) -> bool {
        self == Mode::Normalized
    }
}

impl std::fmt::Display for Mode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Mode::Plain => "plain",
            Mode::Normalized => "normalized",
        })
    }
}

impl std::str::FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "plain" => Ok(Mode::Plain),
            "normalized" => Ok(Mode::Normalized),
            _ => Err(Error::Parse(format!("unknown mode {s:?}"))),
        }
    }
}

/// Counts, predictions and fitted growth along a ladder of bounds.
#[derive(Clone, Debug)]
pub struct CountReport {
    pub f: IntPoly,
    pub primes: Vec<u64>,
    pub s_prime: Vec<u64>,
    pub eps: RBig,
    pub mode: Mode,
    pub order_only: bool,
    pub ladder: Vec<LadderEntry>,
    pub fitted_exponent: Option<f64>,
    pub fitted_log_power: Option<f64>,
}

/// Runs the exact counter along `ladder` and fits the growth.
///
/// `fitted_exponent` is the least-squares slope of `ln N - (s'-1) ln ln B`
/// against `ln B`; `fitted_log_power` is the slope of `ln N - θ ln B` against
/// `ln ln B` with `θ` the predicted exponent. Rungs with `N = 0` or `B < 3`
/// are left out of the fits.
pub fn count_report(ctx: &SPartContext, eps: &RBig, ladder: &[u64], normalized: bool) -> Result<CountReport> {
    if ladder.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidInput("ladder must be strictly increasing".into()));
    }
    check_eps(eps)?;
    let mut rows = Vec::with_capacity(ladder.len());
    let mut order_only = false;
    for &b in ladder {
        let count = count_n(ctx, eps, b, normalized)?;
        let (predicted, ratio) = match predicted_main_term(ctx, eps, &float(b, DEFAULT_PRECISION), normalized) {
            Ok(pred) => {
                order_only = pred.order_only;
                let zero = float(0, DEFAULT_PRECISION);
                let ratio = (pred.value > zero).then(|| float(count, DEFAULT_PRECISION) / &pred.value);
                (Some(pred.value), ratio)
            }
            Err(Error::FiniteCountRegime | Error::InvalidEpsilon(_)) => (None, None),
            Err(e) => return Err(e),
        };
        rows.push(LadderEntry {
            b,
            count,
            predicted,
            ratio,
        });
    }
    let s1 = ctx.s_prime.len().saturating_sub(1) as f64;
    let pts: Vec<(f64, f64, f64)> = rows
        .iter()
        .filter(|r| r.count > 0 && r.b >= 3)
        .map(|r| {
            let lb = (r.b as f64).ln();
            (lb, lb.ln(), (r.count as f64).ln())
        })
        .collect();
    let fitted_exponent = slope(pts.iter().map(|&(lb, llb, ln)| (lb, ln - s1 * llb)));
    let fitted_log_power = match growth_exponent(ctx, eps) {
        Ok(theta) => {
            let th = crate::num::rat_to_f64(&theta);
            slope(pts.iter().map(|&(lb, llb, ln)| (llb, ln - th * lb)))
        }
        Err(_) => None,
    };
    Ok(CountReport {
        f: ctx.f.clone(),
        primes: ctx.primes.clone(),
        s_prime: ctx.s_prime.clone(),
        eps: eps.clone(),
        mode: if normalized { Mode::Normalized } else { Mode::Plain },
        order_only,
        ladder: rows,
        fitted_exponent,
        fitted_log_power,
    })
}

/// Least-squares slope, `None` with fewer than two distinct abscissae.
fn slope(points: impl Iterator<Item = (f64, f64)>) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points.collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

/// `to_f64` on an optional float.
pub fn opt_f64(x: &Option<Float>) -> Option<f64> {
    x.as_ref().map(to_f64)
}

/// Exact `#{x ≡ a mod λ : |x| ≤ B, |f(x)| ≤ M}` for integer `B` and rational `M`.
pub fn count_progression(f: &IntPoly, a: i64, lambda: u64, b: u64, m: &RBig) -> u64 {
    let lambda = lambda as i64;
    let b = b as i64;
    let mut x = -b + (a + b).rem_euclid(lambda);
    let mut count = 0;
    let mb = m.clone();
    while x <= b {
        let y = RBig::from(f.eval(&IBig::from(x)).abs());
        if y <= mb {
            count += 1;
        }
        x += lambda;
    }
    count
}

/// Exact value of a float as a rational, exposed for callers building `M`.
pub fn float_exact(x: &Float) -> RBig {
    float_to_rational(x)
}
