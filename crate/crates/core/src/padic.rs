//! p-adic valuations, roots in Z_p with multiplicities, and `u_p`.
//!
//! Roots are found per squarefree factor by walking the residue tree
//! `a mod p^j`. A branch is certified once Hensel's condition holds for the
//! factor at that residue, after which Newton iteration lifts it to any
//! requested precision.

use std::cmp::Ordering;

use dashu::integer::IBig;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::num::valuation_nonzero;
use crate::poly::{modulo, squarefree_decompose, IntPoly};

/// Hard cap on any p-adic precision exponent or residue-tree depth.
pub const PRECISION_CAP: u32 = 10_000;

const INITIAL_PRECISION: u32 = 8;

/// Deterministic primality test for `u64` (Miller-Rabin with a fixed base set).
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for sp in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(sp) {
            return n == sp;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    let mul = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    let pow = |mut b: u64, mut e: u64| {
        let mut acc = 1u64;
        while e > 0 {
            if e & 1 == 1 {
                acc = mul(acc, b);
            }
            b = mul(b, b);
            e >>= 1;
        }
        acc
    };
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow(a, d);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

pub(crate) fn check_prime(p: u64) -> Result<()> {
    if is_prime(p) {
        Ok(())
    } else {
        Err(Error::NotPrime(p))
    }
}

/// `v_p(n)`, the exponent of `p` in `n`.
pub fn vp(n: &IBig, p: u64) -> Result<u32> {
    if n.is_zero() {
        return Err(Error::ValuationOfZero);
    }
    check_prime(p)?;
    Ok(valuation_nonzero(n, p))
}

/// Valuation with `None` standing for `+∞`.
pub(crate) fn val(n: &IBig, p: u64) -> Option<u32> {
    (!n.is_zero()).then(|| valuation_nonzero(n, p))
}

/// Valuation capped at `cap`: a value `< cap` is exact, `cap` means "at least cap".
fn val_capped(n: &IBig, p: u64, cap: u32) -> u32 {
    val(n, p).map_or(cap, |v| v.min(cap))
}

pub(crate) fn p_power(p: u64, e: u32) -> IBig {
    IBig::from(p).pow(e as usize)
}

/// Minimum coefficient valuation; `None` for the zero polynomial.
pub(crate) fn content_valuation(f: &IntPoly, p: u64) -> Option<u32> {
    f.coeffs().iter().filter_map(|c| val(c, p)).min()
}

/// Inverse of a unit modulo `p^n` by Newton iteration from the inverse mod `p`.
fn inverse_mod_prime_power(u: &IBig, p: u64, n: u32) -> IBig {
    let pm = IBig::from(p);
    let u0 = modulo(u, &pm);
    let u0 = u64::try_from(&u0).expect("residue fits u64");
    let mut y = IBig::from(pow_mod_u64(u0, p - 2, p));
    let mut prec = 1u32;
    while prec < n {
        prec = (2 * prec).min(n);
        let m = p_power(p, prec);
        y = modulo(&(&y * (IBig::from(2) - u * &y)), &m);
    }
    modulo(&y, &p_power(p, n))
}

fn pow_mod_u64(b: u64, mut e: u64, m: u64) -> u64 {
    let m = m as u128;
    let mut acc = 1u128 % m;
    let mut b = b as u128 % m;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % m;
        }
        b = b * b % m;
        e >>= 1;
    }
    acc as u64
}

/// Certified branch of the residue tree: its class holds exactly one root
/// of the squarefree factor with index `factor`.
#[derive(Clone, Debug)]
struct CertifiedBranch {
    residue: IBig,
    factor: usize,
}

/// Residue-tree search for the Z_p-roots of a squarefree polynomial `h`.
///
/// With `stop_at_first` the search returns as soon as one root is certified.
fn certified_branches(h: &IntPoly, p: u64, factor: usize, stop_at_first: bool) -> Result<Vec<CertifiedBranch>> {
    let dh = h.derivative();
    let mut out = Vec::new();
    let mut level: Vec<IBig> = vec![IBig::ZERO];
    let mut j = 0u32;
    while !level.is_empty() {
        if j > PRECISION_CAP {
            return Err(Error::PrecisionCapExceeded);
        }
        let mut next = Vec::new();
        let pj = p_power(p, j);
        let pj1 = &pj * IBig::from(p);
        for a in level {
            let ha = h.eval(&a);
            let vh = val(&ha, p);
            let d = val(&dh.eval(&a), p);
            if let Some(d) = d {
                if j > d && vh.is_none_or(|v| v > 2 * d) {
                    // Unique root in the disc v(x - a) > d; it sits in this class
                    // iff v(h(a)) - d >= j.
                    if vh.is_none_or(|v| v - d >= j) {
                        out.push(CertifiedBranch {
                            residue: a,
                            factor,
                        });
                        if stop_at_first {
                            return Ok(out);
                        }
                    }
                    continue;
                }
            }
            for t in 0..p {
                let child = &a + IBig::from(t) * &pj;
                if (h.eval(&child) % &pj1).is_zero() {
                    next.push(child);
                }
            }
        }
        level = next;
        j += 1;
    }
    Ok(out)
}

/// Newton lift of a certified branch to a residue `x` with `v(x - α) ≥ m`.
fn lift(h: &IntPoly, p: u64, start: &IBig, m: u32) -> IBig {
    let dh = h.derivative();
    let mut x = start.clone();
    loop {
        let hx = h.eval(&x);
        let dhx = dh.eval(&x);
        let d = val(&dhx, p).expect("h'(x) nonzero near a simple root");
        match val(&hx, p) {
            None => break,
            Some(v) if v >= m + d => break,
            Some(_) => {}
        }
        let n = m + d + 1;
        let pd = p_power(p, d);
        let unit = &dhx / &pd;
        let step = (&hx / &pd) * inverse_mod_prime_power(&unit, p, n);
        x = modulo(&(x - step), &p_power(p, n));
    }
    modulo(&x, &p_power(p, m))
}

/// A root `α ∈ Z_p` known modulo `p^precision_exponent`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PAdicApproxRoot {
    #[serde(serialize_with = "crate::num::serialize_ibig")]
    pub residue: IBig,
    pub precision_exponent: u32,
    pub multiplicity: u32,
    pub certified: bool,
}

/// Root data of `f` over Z_p.
#[derive(Clone, Debug, Serialize)]
pub struct PAdicRootProfile {
    pub p: u64,
    pub roots: Vec<PAdicApproxRoot>,
    pub l: usize,
    /// `R_p(f)`: the largest multiplicity, zero when there are no roots.
    pub r_max: u32,
    pub pairwise_valuations: Vec<Vec<u32>>,
    /// `v_p(g(α_i))` where `f = ∏ (X - α_j)^{r_j} g`.
    pub residual_valuations: Vec<u32>,
    /// `u_p(g)`.
    pub u_p_g: u32,
    /// Precision `m` at which `roots` and `root_free_part` are known.
    pub working_precision: u32,
    /// Coefficients of `g` modulo `p^m`.
    #[serde(skip)]
    pub root_free_part: IntPoly,
}

impl PAdicRootProfile {
    pub fn has_roots(&self) -> bool {
        !self.roots.is_empty()
    }

    pub fn total_multiplicity(&self) -> u32 {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }

    pub fn all_simple(&self) -> bool {
        self.roots.iter().all(|r| r.multiplicity == 1)
    }
}

/// Whether `f` has at least one root in Z_p.
pub fn has_zp_root(f: &IntPoly, p: u64) -> Result<bool> {
    check_prime(p)?;
    let dec = squarefree_decompose(f)?;
    for (i, (h, _)) in dec.factors.iter().enumerate() {
        if !certified_branches(h, p, i, true)?.is_empty() {
            return Ok(true);
        }
    }
    Ok(false)
}

/// Lexicographic order on base-p digit expansions, least significant first.
/// Stable under increasing precision for residues of distinct roots.
fn digit_order(a: &IBig, b: &IBig, p: u64) -> Ordering {
    let pm = IBig::from(p);
    let (mut a, mut b) = (a.clone(), b.clone());
    while !(a.is_zero() && b.is_zero()) {
        let (da, db) = (&a % &pm, &b % &pm);
        match da.cmp(&db) {
            Ordering::Equal => {}
            o => return o,
        }
        a /= &pm;
        b /= &pm;
    }
    Ordering::Equal
}

/// Max alive depth of the residue tree of `h`, that is `max_x v_p(h(x))`,
/// reading `h` modulo `p^modulus`. `None` when the tree reaches depth
/// `modulus` (the answer would not be trustworthy).
fn max_alive_depth(h: &IntPoly, p: u64, modulus: u32) -> Option<u32> {
    let mut level: Vec<IBig> = vec![IBig::ZERO];
    let mut j = 0u32;
    loop {
        if j >= modulus {
            return None;
        }
        let pj = p_power(p, j);
        let pj1 = &pj * IBig::from(p);
        let mut next = Vec::new();
        for a in &level {
            for t in 0..p {
                let child = a + IBig::from(t) * &pj;
                if h.eval_mod(&child, &pj1).is_zero() {
                    next.push(child);
                }
            }
        }
        if next.is_empty() {
            return Some(j);
        }
        level = next;
        j += 1;
    }
}

/// `u_p` of a polynomial known modulo `p^m`, or `None` if `m` is too small.
fn u_p_mod(g: &IntPoly, p: u64, m: u32) -> Option<u32> {
    let g = g.reduce_mod(&p_power(p, m));
    let e = content_valuation(&g, p)?;
    if e >= m {
        return None;
    }
    let g0 = g.div_scalar(&p_power(p, e));
    max_alive_depth(&g0, p, m - e).map(|u| u + e)
}

/// `max_{x ∈ Z_p} v_p(f(x))` for `f` without roots in Z_p.
pub fn u_p(f: &IntPoly, p: u64) -> Result<u32> {
    check_prime(p)?;
    if f.is_zero() {
        return Err(Error::UpInfinite);
    }
    if has_zp_root(f, p)? {
        return Err(Error::UpInfinite);
    }
    let e = content_valuation(f, p).expect("nonzero");
    let f0 = f.div_scalar(&p_power(p, e));
    // f0 is exact, so any depth is trustworthy up to the cap.
    max_alive_depth(&f0, p, PRECISION_CAP)
        .map(|u| u + e)
        .ok_or(Error::PrecisionCapExceeded)
}

/// All distinct Z_p-roots of `f` with multiplicities, plus the residual data
/// of the root-free part, at precision at least `target_precision`.
pub fn padic_roots(f: &IntPoly, p: u64, target_precision: u32) -> Result<PAdicRootProfile> {
    check_prime(p)?;
    let dec = squarefree_decompose(f)?;
    let mut branches = Vec::new();
    for (i, (h, _)) in dec.factors.iter().enumerate() {
        branches.extend(certified_branches(h, p, i, false)?);
    }
    if branches.is_empty() {
        let u = u_p(f, p)?;
        return Ok(PAdicRootProfile {
            p,
            roots: Vec::new(),
            l: 0,
            r_max: 0,
            pairwise_valuations: Vec::new(),
            residual_valuations: Vec::new(),
            u_p_g: u,
            working_precision: target_precision.max(1),
            root_free_part: f.clone(),
        });
    }

    let mut m = INITIAL_PRECISION.max(target_precision);
    loop {
        if m > PRECISION_CAP {
            return Err(Error::PrecisionCapExceeded);
        }
        if let Some(profile) = profile_at(f, p, &dec.factors, &branches, m)? {
            return Ok(profile);
        }
        m *= 2;
    }
}

/// Attempt to assemble the profile at precision `m`; `None` if some
/// valuation reading reaches `m`.
fn profile_at(
    f: &IntPoly,
    p: u64,
    factors: &[(IntPoly, u32)],
    branches: &[CertifiedBranch],
    m: u32,
) -> Result<Option<PAdicRootProfile>> {
    let pm = p_power(p, m);
    let mut roots: Vec<PAdicApproxRoot> = branches
        .iter()
        .map(|b| PAdicApproxRoot {
            residue: lift(&factors[b.factor].0, p, &b.residue, m),
            precision_exponent: m,
            multiplicity: factors[b.factor].1,
            certified: true,
        })
        .collect();
    roots.sort_by(|a, b| digit_order(&a.residue, &b.residue, p));
    let l = roots.len();

    let mut pairwise = vec![vec![0u32; l]; l];
    for i in 0..l {
        for j in i + 1..l {
            let v = val_capped(&(&roots[i].residue - &roots[j].residue), p, m);
            if v >= m {
                return Ok(None);
            }
            pairwise[i][j] = v;
            pairwise[j][i] = v;
        }
    }

    let mut residual = Vec::with_capacity(l);
    for i in 0..l {
        let r = roots[i].multiplicity;
        let taylor = f.hasse_derivative(r as usize);
        let reading = val_capped(&taylor.eval_mod(&roots[i].residue, &pm), p, m);
        if reading >= m {
            return Ok(None);
        }
        let shift: u32 = (0..l)
            .filter(|&j| j != i)
            .map(|j| roots[j].multiplicity * pairwise[i][j])
            .sum();
        residual.push(reading - shift);
    }

    let mut root_part = IntPoly::constant(IBig::ONE);
    for r in &roots {
        root_part = &root_part * &IntPoly::linear_root(&r.residue).pow(r.multiplicity);
    }
    let (g, _) = f.div_rem_monic(&root_part);
    let g = g.reduce_mod(&pm);
    let Some(u) = u_p_mod(&g, p, m) else {
        return Ok(None);
    };

    let r_max = roots.iter().map(|r| r.multiplicity).max().unwrap_or(0);
    Ok(Some(PAdicRootProfile {
        p,
        roots,
        l,
        r_max,
        pairwise_valuations: pairwise,
        residual_valuations: residual,
        u_p_g: u,
        working_precision: m,
        root_free_part: g,
    }))
}

/// `μ_p{x ∈ Z_p : v_p(f(x)) ≥ k}` as `(numerator, k')`, meaning
/// `numerator / p^k'`, by counting alive classes of the residue tree.
pub(crate) fn density_at_least(f: &IntPoly, p: u64, k: u32) -> (IBig, u32) {
    if k == 0 {
        return (IBig::ONE, 0);
    }
    let Some(e) = content_valuation(f, p) else {
        return (IBig::ONE, 0);
    };
    if k <= e {
        return (IBig::ONE, 0);
    }
    let f0 = f.div_scalar(&p_power(p, e));
    let depth = k - e;
    let mut level: Vec<IBig> = vec![IBig::ZERO];
    for j in 0..depth {
        let pj = p_power(p, j);
        let pj1 = &pj * IBig::from(p);
        let mut next = Vec::new();
        for a in &level {
            for t in 0..p {
                let child = a + IBig::from(t) * &pj;
                if f0.eval_mod(&child, &pj1).is_zero() {
                    next.push(child);
                }
            }
        }
        level = next;
        if level.is_empty() {
            break;
        }
    }
    (IBig::from(level.len()), depth)
}

/// True when every coefficient of `f` is divisible by `p`.
pub fn vanishes_mod_p(f: &IntPoly, p: u64) -> bool {
    let pm = IBig::from(p);
    f.coeffs().iter().all(|c| (c % &pm).is_zero())
}


#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    #[test]
    fn primes() {
        let small: Vec<u64> = (0..30).filter(|&n| is_prime(n)).collect();
        assert_eq!(small, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(561));
    }

    #[test]
    fn valuations() {
        assert_eq!(vp(&IBig::from(12), 2).unwrap(), 2);
        assert_eq!(vp(&IBig::from(1), 5).unwrap(), 0);
        assert_eq!(vp(&IBig::from(-54), 3).unwrap(), 3);
        assert_eq!(vp(&IBig::ZERO, 3), Err(Error::ValuationOfZero));
        assert_eq!(vp(&IBig::from(4), 4), Err(Error::NotPrime(4)));
    }

    #[test]
    fn root_existence() {
        assert!(has_zp_root(&p("x"), 7).unwrap());
        assert!(has_zp_root(&p("x^2-2"), 7).unwrap());
        assert!(!has_zp_root(&p("x^2-2"), 5).unwrap());
        assert!(!has_zp_root(&p("2x+1"), 2).unwrap());
        assert!(has_zp_root(&p("2x+1"), 3).unwrap());
        assert!(has_zp_root(&p("x^2+7"), 2).unwrap());
        assert!(!has_zp_root(&p("x^2+1"), 2).unwrap());
    }

    #[test]
    fn roots_of_x2_minus_1_at_2() {
        let prof = padic_roots(&p("x^2-1"), 2, 4).unwrap();
        assert_eq!(prof.l, 2);
        assert_eq!(prof.r_max, 1);
        assert_eq!(prof.pairwise_valuations[0][1], 1);
        let m = prof.working_precision;
        let pm = p_power(2, m);
        let mut res: Vec<IBig> = prof.roots.iter().map(|r| r.residue.clone()).collect();
        res.sort();
        assert_eq!(res, vec![IBig::ONE, &pm - IBig::ONE]);
        assert_eq!(prof.residual_valuations, vec![0, 0]);
    }

    #[test]
    fn double_root() {
        let prof = padic_roots(&p("x^2"), 3, 3).unwrap();
        assert_eq!(prof.l, 1);
        assert_eq!(prof.r_max, 2);
        assert_eq!(prof.roots[0].residue, IBig::ZERO);
        assert_eq!(prof.roots[0].multiplicity, 2);
    }

    #[test]
    fn rootless_profile() {
        let prof = padic_roots(&p("x^2+1"), 3, 2).unwrap();
        assert_eq!(prof.l, 0);
        assert_eq!(prof.u_p_g, 0);
    }

    #[test]
    fn u_p_examples() {
        assert_eq!(u_p(&p("x^2+1"), 2).unwrap(), 1);
        assert_eq!(u_p(&p("x^2+1"), 3).unwrap(), 0);
        assert_eq!(u_p(&p("x^2-2"), 5).unwrap(), 0);
        assert_eq!(u_p(&p("4x^2+4"), 2).unwrap(), 3);
        assert_eq!(u_p(&p("x"), 2), Err(Error::UpInfinite));
    }

    #[test]
    fn residual_valuation_of_nontrivial_cofactor() {
        // (x - 1)(x^2 + 1) at p = 2: g = x^2 + 1, g(1) = 2.
        let prof = padic_roots(&p("(x-1)(x^2+1)"), 2, 1).unwrap();
        assert_eq!(prof.l, 1);
        assert_eq!(prof.residual_valuations, vec![1]);
        assert_eq!(prof.u_p_g, 1);
    }

    #[test]
    fn densities() {
        // v_2(x^2 - 1) >= 3 on odd x: density 1/2
        let (n, k) = density_at_least(&p("x^2-1"), 2, 3);
        assert_eq!((n, k), (IBig::from(4), 3));
    }
}
