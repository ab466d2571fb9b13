//! Local measures `μ_p{x ∈ Z_p : v_p(f(x)) = k}` and the Igusa zeta function.
//!
//! For `f` with roots in Z_p the measures follow a closed form beyond the
//! threshold `a_p(f)`; below it they are counted on the residue tree.

use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;
use rayon::prelude::*;
use serde::ser::SerializeStruct;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::num::{rat_pow_i, rational_string};
use crate::padic::{check_prime, density_at_least, p_power, padic_roots, val, PAdicRootProfile};
use crate::poly::{modulo, IntPoly};

/// Default cap on `p^{k+1}` for [`local_measure_oracle`].
pub const DEFAULT_ORACLE_BUDGET: u64 = 100_000_000;

/// Cap on the number of shifts tried when deciding the stability condition exactly.
const LAMBDA_CHECK_BUDGET: u64 = 1_000_000;

/// `λ_p`, `a_p` and the exponents `k_i` for a polynomial with roots in Z_p.
#[derive(Clone, Debug, Serialize)]
pub struct IgusaData {
    pub profile: PAdicRootProfile,
    pub lambda_p: u32,
    pub a_p: u32,
    pub k_list: Vec<u32>,
    /// `μ_p(U_{p^k})` for `0 ≤ k ≤ a_p`.
    #[serde(serialize_with = "serialize_rationals")]
    pub initial_coeffs: Vec<RBig>,
}

impl IgusaData {
    pub fn p(&self) -> u64 {
        self.profile.p
    }

    /// `(1 - 1/p) p^{-λ-1}`.
    pub fn scale(&self) -> RBig {
        let p = self.p();
        RBig::from_parts(IBig::from(p - 1), UBig::from(p)) * rat_pow_i(p, -(self.lambda_p as i64) - 1)
    }

    /// Closed-form measure, valid for `k ≥ a_p + 1`.
    pub fn closed_form(&self, k: u32) -> RBig {
        let p = self.p();
        let mut sum = RBig::ZERO;
        for (root, &ki) in self.profile.roots.iter().zip(&self.k_list) {
            let r = root.multiplicity;
            if k >= ki && (k - ki).is_multiple_of(r) {
                sum += rat_pow_i(p, -(((k - ki) / r) as i64));
            }
        }
        self.scale() * sum
    }

    pub fn measure(&self, k: u32) -> RBig {
        if k <= self.a_p {
            self.initial_coeffs[k as usize].clone()
        } else {
            self.closed_form(k)
        }
    }
}

/// Local data for any nonzero `f`: either full Igusa data, or the rootless
/// case where the measures vanish past `u_p(f)`.
#[derive(Clone, Debug)]
pub enum LocalFactor {
    Rooted(Box<IgusaData>),
    Rootless {
        p: u64,
        u_p: u32,
        coeffs: Vec<RBig>,
    },
}

impl LocalFactor {
    pub fn new(f: &IntPoly, p: u64) -> Result<Self> {
        check_prime(p)?;
        if f.is_zero() {
            return Err(Error::ZeroPolynomial);
        }
        let profile = padic_roots(f, p, 1)?;
        if profile.has_roots() {
            return Ok(LocalFactor::Rooted(Box::new(data_from_profile(f, profile)?)));
        }
        let u = profile.u_p_g;
        let coeffs = tree_measures(f, p, u);
        Ok(LocalFactor::Rootless { p, u_p: u, coeffs })
    }

    pub fn p(&self) -> u64 {
        match self {
            LocalFactor::Rooted(d) => d.p(),
            LocalFactor::Rootless { p, .. } => *p,
        }
    }

    pub fn measure(&self, k: u32) -> RBig {
        match self {
            LocalFactor::Rooted(d) => d.measure(k),
            LocalFactor::Rootless { u_p, coeffs, .. } => {
                if k <= *u_p {
                    coeffs[k as usize].clone()
                } else {
                    RBig::ZERO
                }
            }
        }
    }

    pub fn igusa(&self) -> Option<&IgusaData> {
        match self {
            LocalFactor::Rooted(d) => Some(d),
            LocalFactor::Rootless { .. } => None,
        }
    }

    pub fn zeta(&self) -> LocalZeta {
        match self {
            LocalFactor::Rooted(d) => {
                let scale = d.scale();
                let pole_terms: Vec<PoleTerm> = d
                    .profile
                    .roots
                    .iter()
                    .zip(&d.k_list)
                    .map(|(root, &k)| PoleTerm {
                        k,
                        r: root.multiplicity,
                        scale: scale.clone(),
                    })
                    .collect();
                let mut zeta = LocalZeta {
                    p: d.p(),
                    polynomial_part: Vec::new(),
                    pole_terms,
                };
                let poly: Vec<RBig> = (0..=d.a_p)
                    .map(|k| &d.initial_coeffs[k as usize] - zeta.pole_coefficient(k))
                    .collect();
                zeta.polynomial_part = trim(poly);
                zeta
            }
            LocalFactor::Rootless { p, coeffs, .. } => LocalZeta {
                p: *p,
                polynomial_part: trim(coeffs.clone()),
                pole_terms: Vec::new(),
            },
        }
    }
}

fn trim(mut v: Vec<RBig>) -> Vec<RBig> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

/// `μ(U_k)` for `0 ≤ k ≤ top` from alive-class counts on the residue tree.
fn tree_measures(f: &IntPoly, p: u64, top: u32) -> Vec<RBig> {
    let density = |k: u32| {
        let (n, depth) = density_at_least(f, p, k);
        RBig::from_parts(n, UBig::from(p).pow(depth as usize))
    };
    let mut at_least: Vec<RBig> = (0..=top + 1).map(density).collect();
    let tail = at_least.pop().unwrap();
    let mut out = Vec::with_capacity(at_least.len());
    for k in 0..at_least.len() {
        let next = at_least.get(k + 1).unwrap_or(&tail);
        out.push(&at_least[k] - next);
    }
    out
}

/// Whether `v_p(g(α + y)) = v_p(g(α))` for every `y` with `v_p(y) ≥ λ + 1`.
///
/// `taylor_vals[m]` bounds `v_p` of the m-th Taylor coefficient of `g` at `α`
/// from below. When that bound is not enough the shifts are enumerated
/// modulo `p^{v0+1}`; an enumeration over budget counts as failure.
fn stable_at(profile: &PAdicRootProfile, i: usize, taylor_vals: &[u32], lambda: u32) -> bool {
    let p = profile.p;
    let v0 = profile.residual_valuations[i];
    if v0 < lambda + 1 {
        return true;
    }
    let taylor_min = taylor_vals
        .iter()
        .enumerate()
        .skip(1)
        .map(|(m, &v)| v as u64 + m as u64 * (lambda as u64 + 1))
        .min();
    if taylor_min.is_none_or(|t| t > v0 as u64) {
        return true;
    }
    let span = v0 - lambda;
    let Some(count) = (p as u128).checked_pow(span).filter(|&c| c <= LAMBDA_CHECK_BUDGET as u128) else {
        return false;
    };
    let g = &profile.root_free_part;
    let alpha = &profile.roots[i].residue;
    let modulus = p_power(p, v0 + 1);
    let lower = p_power(p, v0);
    let step = p_power(p, lambda + 1);
    (0..count as u64).all(|t| {
        let x = alpha + IBig::from(t) * &step;
        let gx = g.eval_mod(&x, &modulus);
        !gx.is_zero() && (&gx % &lower).is_zero()
    })
}

fn data_from_profile(f: &IntPoly, profile: PAdicRootProfile) -> Result<IgusaData> {
    let p = profile.p;
    let l = profile.l;
    if l == 0 {
        return Err(Error::LambdaUndefined);
    }
    let m = profile.working_precision;
    let pm = p_power(p, m);
    let g = &profile.root_free_part;
    let deg_g = g.degree().unwrap_or(0);

    let taylor: Vec<Vec<u32>> = profile
        .roots
        .iter()
        .map(|root| {
            (0..=deg_g)
                .map(|j| {
                    let c = g.hasse_derivative(j).eval_mod(&root.residue, &pm);
                    val(&c, p).map_or(m, |v| v.min(m))
                })
                .collect()
        })
        .collect();

    let lambda0 = profile
        .pairwise_valuations
        .iter()
        .flatten()
        .copied()
        .max()
        .unwrap_or(0);
    let mut lambda = lambda0;
    while !(0..l).all(|i| stable_at(&profile, i, &taylor[i], lambda)) {
        lambda += 1;
    }

    let total: u32 = profile.total_multiplicity();
    let a_p = total * lambda + profile.r_max + profile.u_p_g - 1;
    let k_list: Vec<u32> = (0..l)
        .map(|i| {
            let cross: u32 = (0..l)
                .filter(|&j| j != i)
                .map(|j| profile.roots[j].multiplicity * profile.pairwise_valuations[i][j])
                .sum();
            cross + profile.residual_valuations[i] + profile.roots[i].multiplicity * (lambda + 1)
        })
        .collect();
    let initial_coeffs = tree_measures(f, p, a_p);
    Ok(IgusaData {
        profile,
        lambda_p: lambda,
        a_p,
        k_list,
        initial_coeffs,
    })
}

/// Full Igusa data of `f` at `p`; fails when `f` has no root in Z_p.
pub fn igusa_data(f: &IntPoly, p: u64) -> Result<IgusaData> {
    check_prime(p)?;
    let profile = padic_roots(f, p, 1)?;
    data_from_profile(f, profile)
}

pub fn lambda_p(f: &IntPoly, p: u64) -> Result<u32> {
    igusa_data(f, p).map(|d| d.lambda_p)
}

pub fn a_p(f: &IntPoly, p: u64) -> Result<u32> {
    igusa_data(f, p).map(|d| d.a_p)
}

pub fn k_exponents(f: &IntPoly, p: u64) -> Result<Vec<u32>> {
    igusa_data(f, p).map(|d| d.k_list)
}

/// `μ_p{x ∈ Z_p : v_p(f(x)) = k}` exactly.
pub fn local_measure(f: &IntPoly, p: u64, k: u32) -> Result<RBig> {
    LocalFactor::new(f, p).map(|lf| lf.measure(k))
}

/// Brute-force count of residues `a mod p^{k+1}` with `v_p(f(a)) = k`,
/// limited by [`DEFAULT_ORACLE_BUDGET`].
pub fn local_measure_oracle(f: &IntPoly, p: u64, k: u32) -> Result<RBig> {
    local_measure_oracle_with_budget(f, p, k, DEFAULT_ORACLE_BUDGET)
}

/// Moduli of `2^32` and above are refused whatever the budget.
pub fn local_measure_oracle_with_budget(f: &IntPoly, p: u64, k: u32, budget: u64) -> Result<RBig> {
    check_prime(p)?;
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    let modulus = (p as u128)
        .checked_pow(k + 1)
        .filter(|&m| m <= budget as u128 && m < 1 << 32)
        .ok_or(Error::OracleBudgetExceeded)? as u64;
    let lower = p.pow(k);
    let m_big = IBig::from(modulus);
    let coeffs: Vec<u64> = f
        .coeffs()
        .iter()
        .map(|c| u64::try_from(&modulo(c, &m_big)).expect("reduced coefficient"))
        .collect();
    // modulus < 2^32 keeps every product inside u64
    let m = modulus;
    let eval = |a: u64| coeffs.iter().rev().fold(0u64, |acc, &c| (acc * a + c) % m);
    let n = coeffs.len() - 1;
    const CHUNK: u64 = 1 << 16;
    let chunks = modulus.div_ceil(CHUNK);
    let hits: u64 = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let (start, end) = (c * CHUNK, ((c + 1) * CHUNK).min(modulus));
            // forward differences of f at `start`, stepped by additions only
            let mut diff: Vec<u64> = (0..=n as u64).map(|i| eval((start + i) % m)).collect();
            for level in 1..=n {
                for i in (level..=n).rev() {
                    diff[i] = (diff[i] + m - diff[i - 1]) % m;
                }
            }
            let mut count = 0;
            for _ in start..end {
                let v = diff[0];
                if v != 0 && v.is_multiple_of(lower) {
                    count += 1;
                }
                for i in 0..n {
                    let s = diff[i] + diff[i + 1];
                    diff[i] = if s >= m { s - m } else { s };
                }
            }
            count
        })
        .sum();
    Ok(RBig::from_parts(IBig::from(hits), UBig::from(modulus)))
}

/// One pole term `scale · t^k / (1 - p^{-1} t^r)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PoleTerm {
    pub k: u32,
    pub r: u32,
    #[serde(serialize_with = "crate::num::serialize_rbig")]
    pub scale: RBig,
}

/// The zeta function as a rational function of `t = p^{-s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LocalZeta {
    pub p: u64,
    pub polynomial_part: Vec<RBig>,
    pub pole_terms: Vec<PoleTerm>,
}

impl LocalZeta {
    /// Exact value at rational `t`; `None` at a pole.
    pub fn eval(&self, t: &RBig) -> Option<RBig> {
        let mut acc = RBig::ZERO;
        for c in self.polynomial_part.iter().rev() {
            acc = acc * t + c;
        }
        let inv_p = RBig::from_parts(IBig::ONE, UBig::from(self.p));
        for term in &self.pole_terms {
            let denom = RBig::ONE - &inv_p * t.pow(term.r as usize);
            if denom.is_zero() {
                return None;
            }
            acc += &term.scale * t.pow(term.k as usize) / denom;
        }
        Some(acc)
    }

    fn pole_coefficient(&self, k: u32) -> RBig {
        let mut acc = RBig::ZERO;
        for term in &self.pole_terms {
            if k >= term.k && (k - term.k).is_multiple_of(term.r) {
                acc += &term.scale * rat_pow_i(self.p, -(((k - term.k) / term.r) as i64));
            }
        }
        acc
    }

    /// Coefficient of `t^k` in the power series expansion.
    pub fn series_coefficient(&self, k: u32) -> RBig {
        let poly = self
            .polynomial_part
            .get(k as usize)
            .cloned()
            .unwrap_or(RBig::ZERO);
        poly + self.pole_coefficient(k)
    }

    pub fn series(&self, n: u32) -> Vec<RBig> {
        (0..n).map(|k| self.series_coefficient(k)).collect()
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("serializable")
    }
}

impl Serialize for LocalZeta {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("LocalZeta", 3)?;
        st.serialize_field("p", &self.p)?;
        let poly: Vec<String> = self.polynomial_part.iter().map(rational_string).collect();
        st.serialize_field("polynomial_part", &poly)?;
        st.serialize_field("pole_terms", &self.pole_terms)?;
        st.end()
    }
}

fn serialize_rationals<S: Serializer>(v: &[RBig], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(rational_string))
}

/// The zeta function of `f` at `p` as an exact rational function.
pub fn zeta_rational(f: &IntPoly, p: u64) -> Result<LocalZeta> {
    LocalFactor::new(f, p).map(|lf| lf.zeta())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::num::parse_rational;

    fn p(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn q(s: &str) -> RBig {
        parse_rational(s).unwrap()
    }

    #[test]
    fn lambda_examples() {
        for prime in [2, 3, 5, 7] {
            assert_eq!(lambda_p(&p("x"), prime).unwrap(), 0);
        }
        assert_eq!(lambda_p(&p("x^2-1"), 2).unwrap(), 1);
        assert_eq!(lambda_p(&p("x^2-1"), 3).unwrap(), 0);
        assert_eq!(lambda_p(&p("x^2+1"), 3), Err(Error::LambdaUndefined));
    }

    #[test]
    fn a_p_examples() {
        assert_eq!(a_p(&p("x"), 5).unwrap(), 0);
        assert_eq!(a_p(&p("x^2"), 3).unwrap(), 1);
        assert_eq!(a_p(&p("x^2-1"), 2).unwrap(), 2);
    }

    #[test]
    fn k_examples() {
        assert_eq!(k_exponents(&p("x"), 7).unwrap(), vec![1]);
        assert_eq!(k_exponents(&p("x^2-1"), 2).unwrap(), vec![3, 3]);
        assert_eq!(k_exponents(&p("x^2"), 2).unwrap(), vec![2]);
    }

    #[test]
    fn measure_examples() {
        assert_eq!(local_measure(&p("x"), 5, 2).unwrap(), q("4/125"));
        assert_eq!(local_measure(&p("x^2-1"), 2, 3).unwrap(), q("1/4"));
        assert_eq!(local_measure(&p("x^2+1"), 3, 1).unwrap(), q("0"));
    }

    #[test]
    fn oracle_examples() {
        assert_eq!(local_measure_oracle(&p("x"), 2, 1).unwrap(), q("1/4"));
        assert_eq!(local_measure_oracle(&p("x^2"), 3, 2).unwrap(), q("2/9"));
        assert_eq!(local_measure_oracle(&p("x^2-1"), 2, 3).unwrap(), q("1/4"));
        assert_eq!(
            local_measure_oracle_with_budget(&p("x"), 2, 10, 1000),
            Err(Error::OracleBudgetExceeded)
        );
    }

    #[test]
    fn zeta_closed_forms() {
        for prime in [2u64, 3, 5] {
            let unit = RBig::from_parts(IBig::from(prime - 1), UBig::from(prime));
            let inv_p = RBig::from_parts(IBig::ONE, UBig::from(prime));
            let z = zeta_rational(&p("x"), prime).unwrap();
            let z2 = zeta_rational(&p("x^2"), prime).unwrap();
            for t in ["0", "1", "1/2", "-3/7", "5/3"] {
                let t = q(t);
                let want = &unit / (RBig::ONE - &inv_p * &t);
                assert_eq!(z.eval(&t), Some(want));
                let want2 = &unit / (RBig::ONE - &inv_p * &t * &t);
                assert_eq!(z2.eval(&t), Some(want2));
            }
            assert_eq!(z2.series_coefficient(3), RBig::ZERO);
            assert_eq!(z2.series_coefficient(0), unit);
        }
        let z = zeta_rational(&p("x^2+1"), 3).unwrap();
        assert_eq!(z.polynomial_part, vec![RBig::ONE]);
        assert!(z.pole_terms.is_empty());
    }

    #[test]
    fn zeta_json_shape() {
        let z = zeta_rational(&p("x^2-1"), 2).unwrap();
        let j = z.to_json();
        assert_eq!(j["p"], 2);
        assert_eq!(j["pole_terms"][0]["k"], 3);
        assert_eq!(j["pole_terms"][0]["r"], 1);
        assert_eq!(j["pole_terms"][0]["scale"], "1/8");
        assert_eq!(j["pole_terms"].as_array().unwrap().len(), 2);
        assert_eq!(j["polynomial_part"][0], "1/2");
    }
}
