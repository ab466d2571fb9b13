//! Univariate polynomials over the integers.
//!
//! Coefficients are stored in ascending order and are arbitrary precision.
//! Besides ring arithmetic this module provides the exact algorithms the
//! p-adic code leans on: primitive gcds, Yun's squarefree decomposition and
//! the subresultant resultant used for discriminants.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use dashu::base::{Gcd, Sign, Signed, UnsignedAbs};
use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;

use crate::error::{Error, Result};

/// Polynomial with integer coefficients, `coeffs[i]` multiplying `x^i`.
///
/// The highest stored coefficient is never zero; the zero polynomial has no
/// coefficients.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct IntPoly {
    coeffs: Vec<IBig>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<IBig>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64s(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| IBig::from(c)).collect())
    }

    pub fn zero() -> Self {
        IntPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: IBig) -> Self {
        Self::new(vec![c])
    }

    /// `c * x^k`
    pub fn monomial(c: IBig, k: usize) -> Self {
        let mut coeffs = vec![IBig::ZERO; k];
        coeffs.push(c);
        Self::new(coeffs)
    }

    /// `x - a`
    pub fn linear_root(a: &IBig) -> Self {
        IntPoly {
            coeffs: vec![-a, IBig::ONE],
        }
    }

    pub fn coeffs(&self) -> &[IBig] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, or `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    fn deg(&self) -> usize {
        self.degree().expect("nonzero polynomial")
    }

    pub fn leading_coeff(&self) -> Option<&IBig> {
        self.coeffs.last()
    }

    pub fn coeff(&self, i: usize) -> IBig {
        self.coeffs.get(i).cloned().unwrap_or(IBig::ZERO)
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &IBig) -> IBig {
        let mut acc = IBig::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_rational(&self, x: &RBig) -> RBig {
        let mut acc = RBig::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + RBig::from(c.clone());
        }
        acc
    }

    /// Sign of `self(x)` for rational `x`, computed on the cleared-denominator form.
    pub fn sign_at(&self, x: &RBig) -> Sign {
        let v = self.eval_rational(x);
        if v.is_zero() {
            Sign::Positive
        } else {
            v.sign()
        }
    }

    /// Whether `self(x) == 0` for rational `x`.
    pub fn vanishes_at(&self, x: &RBig) -> bool {
        self.eval_rational(x).is_zero()
    }

    /// `self(x) mod m` in `[0, m)`.
    pub fn eval_mod(&self, x: &IBig, m: &IBig) -> IBig {
        let mut acc = IBig::ZERO;
        for c in self.coeffs.iter().rev() {
            acc = (acc * x + c) % m;
        }
        modulo(&acc, m)
    }

    pub fn derivative(&self) -> IntPoly {
        if self.coeffs.len() <= 1 {
            return IntPoly::zero();
        }
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * IBig::from(i))
                .collect(),
        )
    }

    /// The `k`-th Taylor coefficient polynomial `f^{(k)} / k!`, which has
    /// integer coefficients `binom(i, k) * c_i`.
    pub fn hasse_derivative(&self, k: usize) -> IntPoly {
        if k == 0 {
            return self.clone();
        }
        if self.coeffs.len() <= k {
            return IntPoly::zero();
        }
        let mut out = Vec::with_capacity(self.coeffs.len() - k);
        for i in k..self.coeffs.len() {
            out.push(&self.coeffs[i] * binomial(i, k));
        }
        IntPoly::new(out)
    }

    /// Non-negative gcd of the coefficients (zero for the zero polynomial).
    pub fn content(&self) -> UBig {
        let mut g = UBig::ZERO;
        for c in self.coeffs.iter().filter(|c| !c.is_zero()) {
            g = if g.is_zero() {
                c.unsigned_abs()
            } else {
                g.gcd(c.unsigned_abs())
            };
            if g == UBig::ONE {
                break;
            }
        }
        g
    }

    /// Primitive part normalized to a positive leading coefficient.
    pub fn primitive_part(&self) -> IntPoly {
        if self.is_zero() {
            return IntPoly::zero();
        }
        let mut c = IBig::from(self.content());
        if self.leading_coeff().unwrap().is_negative() {
            c = -c;
        }
        IntPoly::new(self.coeffs.iter().map(|x| x / &c).collect())
    }

    pub fn scale(&self, k: &IBig) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| c * k).collect())
    }

    /// Exact division of every coefficient by `k`; panics in debug if inexact.
    pub fn div_scalar(&self, k: &IBig) -> IntPoly {
        IntPoly::new(
            self.coeffs
                .iter()
                .map(|c| {
                    debug_assert!((c % k).is_zero());
                    c / k
                })
                .collect(),
        )
    }

    /// Coefficients reduced into `[0, m)`.
    pub fn reduce_mod(&self, m: &IBig) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| modulo(c, m)).collect())
    }

    pub fn pow(&self, e: u32) -> IntPoly {
        let mut acc = IntPoly::constant(IBig::ONE);
        for _ in 0..e {
            acc = &acc * self;
        }
        acc
    }

    /// Pseudo-remainder: `lc(b)^(deg a - deg b + 1) * a mod b`.
    pub fn pseudo_rem(&self, b: &IntPoly) -> IntPoly {
        assert!(!b.is_zero(), "pseudo-remainder by zero polynomial");
        let db = b.deg();
        let lb = b.leading_coeff().unwrap().clone();
        let mut r = self.clone();
        let Some(da) = self.degree() else {
            return r;
        };
        if da < db {
            return r;
        }
        let mut steps = da - db + 1;
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.leading_coeff().unwrap().clone();
            let shift = dr - db;
            let mut next = r.scale(&lb);
            let sub = IntPoly::monomial(lr, shift);
            next = &next - &(&sub * b);
            r = next;
            steps -= 1;
        }
        if steps > 0 {
            r = r.scale(&lb.pow(steps));
        }
        r
    }

    /// Quotient and remainder when dividing by a monic polynomial.
    pub fn div_rem_monic(&self, b: &IntPoly) -> (IntPoly, IntPoly) {
        assert!(
            b.leading_coeff().is_some_and(|c| *c == IBig::ONE),
            "divisor must be monic"
        );
        let db = b.deg();
        let mut rem = self.coeffs.clone();
        let Some(da) = self.degree() else {
            return (IntPoly::zero(), IntPoly::zero());
        };
        if da < db {
            return (IntPoly::zero(), self.clone());
        }
        let mut quot = vec![IBig::ZERO; da - db + 1];
        for i in (0..=da - db).rev() {
            let q = rem[i + db].clone();
            if q.is_zero() {
                continue;
            }
            for (j, bc) in b.coeffs.iter().enumerate() {
                rem[i + j] -= &q * bc;
            }
            quot[i] = q;
        }
        (IntPoly::new(quot), IntPoly::new(rem))
    }

    /// Division over Z, `None` unless `b` divides `self` exactly in Z[x].
    pub fn div_exact(&self, b: &IntPoly) -> Option<IntPoly> {
        assert!(!b.is_zero(), "division by zero polynomial");
        if self.is_zero() {
            return Some(IntPoly::zero());
        }
        let db = b.deg();
        let da = self.deg();
        if da < db {
            return None;
        }
        let lb = b.leading_coeff().unwrap();
        let mut rem = self.coeffs.clone();
        let mut quot = vec![IBig::ZERO; da - db + 1];
        for i in (0..=da - db).rev() {
            let top = &rem[i + db];
            if top.is_zero() {
                continue;
            }
            if !(top % lb).is_zero() {
                return None;
            }
            let q = top / lb;
            for (j, bc) in b.coeffs.iter().enumerate() {
                rem[i + j] -= &q * bc;
            }
            quot[i] = q;
        }
        if rem.iter().all(|c| c.is_zero()) {
            Some(IntPoly::new(quot))
        } else {
            None
        }
    }

    /// Gcd in Q[x], returned as a primitive integer polynomial with positive
    /// leading coefficient. `gcd(0, 0)` is zero.
    pub fn primitive_gcd(&self, other: &IntPoly) -> IntPoly {
        let mut a = self.primitive_part();
        let mut b = other.primitive_part();
        if a.is_zero() {
            return b;
        }
        if b.is_zero() {
            return a;
        }
        if a.deg() < b.deg() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b).primitive_part();
            a = b;
            b = r;
        }
        a
    }

    /// Lowest-terms human form, e.g. `2*x^3+x-1`.
    pub fn to_human(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut out = String::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.unsigned_abs();
            if out.is_empty() {
                if neg {
                    out.push('-');
                }
            } else {
                out.push(if neg { '-' } else { '+' });
            }
            let unit = mag == UBig::ONE;
            match i {
                0 => out.push_str(&mag.to_string()),
                _ => {
                    if !unit {
                        out.push_str(&mag.to_string());
                        out.push('*');
                    }
                    out.push('x');
                    if i > 1 {
                        out.push('^');
                        out.push_str(&i.to_string());
                    }
                }
            }
        }
        out
    }

    /// Ascending comma-separated coefficient form, e.g. `-1,0,1`.
    pub fn to_coeff_list(&self) -> String {
        if self.is_zero() {
            return "0".into();
        }
        self.coeffs
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub(crate) fn modulo(a: &IBig, m: &IBig) -> IBig {
    let r = a % m;
    if r.is_negative() {
        r + m
    } else {
        r
    }
}

fn binomial(n: usize, k: usize) -> IBig {
    let k = k.min(n - k);
    let mut acc = IBig::ONE;
    for i in 0..k {
        acc = acc * IBig::from(n - i) / IBig::from(i + 1);
    }
    acc
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_human())
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({})", self.to_human())
    }
}

impl Add for &IntPoly {
    type Output = IntPoly;
    fn add(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &IntPoly {
    type Output = IntPoly;
    fn sub(self, rhs: &IntPoly) -> IntPoly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        IntPoly::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &IntPoly {
    type Output = IntPoly;
    fn mul(self, rhs: &IntPoly) -> IntPoly {
        if self.is_zero() || rhs.is_zero() {
            return IntPoly::zero();
        }
        let mut out = vec![IBig::ZERO; self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        IntPoly::new(out)
    }
}

impl Neg for &IntPoly {
    type Output = IntPoly;
    fn neg(self) -> IntPoly {
        IntPoly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for IntPoly {
            type Output = IntPoly;
            fn $m(self, rhs: IntPoly) -> IntPoly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

// ---------------------------------------------------------------------------
// Squarefree decomposition

/// `unit * prod(factor^multiplicity)` with primitive, squarefree, pairwise
/// coprime factors of positive degree (positive leading coefficients).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SquarefreeDecomposition {
    pub unit: IBig,
    pub factors: Vec<(IntPoly, u32)>,
}

impl SquarefreeDecomposition {
    pub fn expand(&self) -> IntPoly {
        let mut acc = IntPoly::constant(self.unit.clone());
        for (f, m) in &self.factors {
            acc = &acc * &f.pow(*m);
        }
        acc
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.factors.iter().map(|(_, m)| *m).max().unwrap_or(0)
    }
}

/// Yun's algorithm over Z, relying on Gauss's lemma to keep every division exact.
pub fn squarefree_decompose(f: &IntPoly) -> Result<SquarefreeDecomposition> {
    if f.is_zero() {
        return Err(Error::ZeroPolynomial);
    }
    if f.deg() == 0 {
        return Ok(SquarefreeDecomposition {
            unit: f.coeffs[0].clone(),
            factors: Vec::new(),
        });
    }
    let prim = f.primitive_part();
    let df = prim.derivative();
    let a0 = prim.primitive_gcd(&df);
    let mut b = prim.div_exact(&a0).expect("gcd divides f");
    let c = df.div_exact(&a0).expect("gcd divides f'");
    let mut d = &c - &b.derivative();
    let mut factors = Vec::new();
    let mut mult = 1u32;
    while b.deg() > 0 {
        let a = b.primitive_gcd(&d);
        let next_b = b.div_exact(&a).expect("Yun step: a | b");
        let next_c = d.div_exact(&a).expect("Yun step: a | d");
        if a.deg() > 0 {
            factors.push((a.primitive_part(), mult));
        }
        d = &next_c - &next_b.derivative();
        b = next_b;
        mult += 1;
    }
    let mut product = IntPoly::constant(IBig::ONE);
    for (g, m) in &factors {
        product = &product * &g.pow(*m);
    }
    let unit = f.leading_coeff().unwrap() / product.leading_coeff().unwrap();
    debug_assert_eq!(&product.scale(&unit), f);
    Ok(SquarefreeDecomposition { unit, factors })
}

// ---------------------------------------------------------------------------
// Resultants and discriminants

/// Resultant of `a` and `b` by the subresultant pseudo-remainder sequence.
pub fn resultant(a: &IntPoly, b: &IntPoly) -> IBig {
    if a.is_zero() || b.is_zero() {
        return IBig::ZERO;
    }
    let (mut a, mut b) = (a.clone(), b.clone());
    let mut s = IBig::ONE;
    if a.deg() < b.deg() {
        std::mem::swap(&mut a, &mut b);
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            s = -s;
        }
    }
    if b.deg() == 0 {
        return s * b.coeffs[0].pow(a.deg());
    }
    let ca = IBig::from(a.content());
    let cb = IBig::from(b.content());
    let t = ca.pow(b.deg()) * cb.pow(a.deg());
    a = a.div_scalar(&ca);
    b = b.div_scalar(&cb);
    let mut g = IBig::ONE;
    let mut h = IBig::ONE;
    loop {
        let delta = a.deg() - b.deg();
        if a.deg() % 2 == 1 && b.deg() % 2 == 1 {
            s = -s;
        }
        let r = a.pseudo_rem(&b);
        a = b;
        if r.is_zero() {
            return IBig::ZERO;
        }
        let divisor = &g * h.pow(delta);
        b = r.div_scalar(&divisor);
        g = a.leading_coeff().unwrap().clone();
        // h <- g^delta / h^(delta - 1)
        h = if delta == 0 {
            h.clone()
        } else {
            g.pow(delta) / h.pow(delta - 1)
        };
        if b.deg() == 0 {
            let da = a.deg();
            let lb = b.coeffs[0].clone();
            let hh = if da == 0 {
                h.clone()
            } else {
                lb.pow(da) / h.pow(da - 1)
            };
            return s * t * hh;
        }
    }
}

/// `(-1)^(n(n-1)/2) Res(f, f') / c_f`.
pub fn discriminant(f: &IntPoly) -> Result<IBig> {
    let n = match f.degree() {
        Some(n) if n >= 2 => n,
        _ => return Err(Error::DiscriminantUndefined),
    };
    let res = resultant(f, &f.derivative());
    let lc = f.leading_coeff().unwrap();
    debug_assert!((&res % lc).is_zero());
    let d = res / lc;
    Ok(if (n * (n - 1) / 2) % 2 == 1 { -d } else { d })
}

// ---------------------------------------------------------------------------
// Parsing

impl FromStr for IntPoly {
    type Err = Error;

    /// Accepts an ascending coefficient list (`-1,0,1`) or an expression in
    /// `x` with `+ - *`, integer powers and parentheses (`2*x^3+x`,
    /// `(x-1)^2*(x+1)`).
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        if t.is_empty() {
            return Err(Error::Parse("empty polynomial".into()));
        }
        if t.contains(',') {
            let coeffs = t
                .split(',')
                .map(|c| {
                    IBig::from_str(c.trim())
                        .map_err(|_| Error::Parse(format!("bad coefficient {c:?}")))
                })
                .collect::<Result<Vec<_>>>()?;
            return Ok(IntPoly::new(coeffs));
        }
        let mut p = ExprParser {
            chars: t.chars().filter(|c| !c.is_whitespace()).collect(),
            pos: 0,
        };
        let poly = p.expr()?;
        if p.pos != p.chars.len() {
            return Err(Error::Parse(format!(
                "unexpected {:?} at offset {}",
                p.chars[p.pos], p.pos
            )));
        }
        Ok(poly)
    }
}

struct ExprParser {
    chars: Vec<char>,
    pos: usize,
}

impl ExprParser {
    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn expr(&mut self) -> Result<IntPoly> {
        let mut acc = self.term()?;
        while let Some(c) = self.peek() {
            match c {
                '+' => {
                    self.pos += 1;
                    acc = &acc + &self.term()?;
                }
                '-' => {
                    self.pos += 1;
                    acc = &acc - &self.term()?;
                }
                _ => break,
            }
        }
        Ok(acc)
    }

    fn term(&mut self) -> Result<IntPoly> {
        let mut acc = self.unary()?;
        loop {
            match self.peek() {
                Some('*') => {
                    self.pos += 1;
                    acc = &acc * &self.unary()?;
                }
                // implicit product: 3x, 2(x+1), (x-1)(x+1)
                Some(c) if c == 'x' || c == 'X' || c == '(' => {
                    acc = &acc * &self.power()?;
                }
                _ => return Ok(acc),
            }
        }
    }

    fn unary(&mut self) -> Result<IntPoly> {
        match self.peek() {
            Some('-') => {
                self.pos += 1;
                Ok(-&self.unary()?)
            }
            Some('+') => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<IntPoly> {
        let base = self.primary()?;
        if self.peek() == Some('^') {
            self.pos += 1;
            let start = self.pos;
            while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            let digits: String = self.chars[start..self.pos].iter().collect();
            let e: u32 = digits
                .parse()
                .map_err(|_| Error::Parse("exponent must be a non-negative integer".into()))?;
            return Ok(base.pow(e));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<IntPoly> {
        match self.peek() {
            Some('x') | Some('X') => {
                self.pos += 1;
                Ok(IntPoly::monomial(IBig::ONE, 1))
            }
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if self.peek() != Some(')') {
                    return Err(Error::Parse("missing ')'".into()));
                }
                self.pos += 1;
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() => {
                let start = self.pos;
                while self.peek().is_some_and(|c| c.is_ascii_digit()) {
                    self.pos += 1;
                }
                let digits: String = self.chars[start..self.pos].iter().collect();
                Ok(IntPoly::constant(IBig::from_str(&digits).unwrap()))
            }
            Some(c) => Err(Error::Parse(format!("unexpected {c:?}"))),
            None => Err(Error::Parse("unexpected end of input".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> IntPoly {
        s.parse().unwrap()
    }

    fn i(v: i64) -> IBig {
        IBig::from(v)
    }

    #[test]
    fn eval_examples() {
        assert_eq!(p("x^2-1").eval(&i(3)), i(8));
        assert_eq!(p("x").eval(&i(0)), i(0));
        assert_eq!(p("2*x^3+1").eval(&i(-2)), i(-15));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(p("x^2-1").derivative(), p("2x"));
        assert!(p("5").derivative().is_zero());
        assert_eq!(p("x^3+x").derivative(), p("3x^2+1"));
    }

    #[test]
    fn parsers_agree() {
        assert_eq!(p("-1,0,1"), p("x^2-1"));
        assert_eq!(p("0,1,0,2"), p("2*x^3+x"));
        assert_eq!(p("(x-1)^2*(x+1)"), p("x^3-x^2-x+1"));
        assert_eq!(p("1,2,0"), p("2x+1"));
        assert_eq!(p("X^2 + 1"), p("1,0,1"));
        assert_eq!(p("-x"), IntPoly::from_i64s(&[0, -1]));
        assert!("x^".parse::<IntPoly>().is_err());
        assert!("y+1".parse::<IntPoly>().is_err());
        assert!("(x+1".parse::<IntPoly>().is_err());
    }

    #[test]
    fn rendering_round_trips() {
        for s in ["x^2-1", "2*x^3+x", "-x^4+3*x-7", "x", "0", "12"] {
            assert_eq!(p(s).to_human(), s);
            assert_eq!(p(&p(s).to_coeff_list()), p(s));
        }
    }

    #[test]
    fn squarefree_examples() {
        let d = squarefree_decompose(&p("x^2-1")).unwrap();
        assert_eq!(d.unit, i(1));
        assert_eq!(d.factors, vec![(p("x^2-1"), 1)]);

        let d = squarefree_decompose(&p("x^2")).unwrap();
        assert_eq!(d.factors, vec![(p("x"), 2)]);

        let d = squarefree_decompose(&p("x^3-x^2-x+1")).unwrap();
        assert_eq!(d.unit, i(1));
        assert_eq!(d.factors, vec![(p("x+1"), 1), (p("x-1"), 2)]);
        assert_eq!(d.expand(), p("x^3-x^2-x+1"));

        let d = squarefree_decompose(&p("-12*(x-2)^3*(x^2+1)")).unwrap();
        assert_eq!(d.unit, i(-12));
        assert_eq!(d.factors, vec![(p("x^2+1"), 1), (p("x-2"), 3)]);

        assert_eq!(
            squarefree_decompose(&IntPoly::zero()),
            Err(Error::ZeroPolynomial)
        );
        let d = squarefree_decompose(&p("7")).unwrap();
        assert_eq!((d.unit, d.factors.len()), (i(7), 0));
    }

    #[test]
    fn discriminant_examples() {
        assert_eq!(discriminant(&p("x^2-1")).unwrap(), i(4));
        assert_eq!(discriminant(&p("x^2")).unwrap(), i(0));
        assert_eq!(discriminant(&p("x^3-x")).unwrap(), i(4));
        // b^2 - 4ac
        assert_eq!(discriminant(&p("3x^2+5x-2")).unwrap(), i(25 + 24));
        // -4p^3 - 27q^2 for x^3 + px + q
        assert_eq!(discriminant(&p("x^3+2x+5")).unwrap(), i(-4 * 8 - 27 * 25));
        assert_eq!(discriminant(&p("x+1")), Err(Error::DiscriminantUndefined));
    }

    #[test]
    fn hasse_derivatives() {
        let f = p("x^4+2x+3");
        assert_eq!(f.hasse_derivative(2), p("6x^2"));
        assert_eq!(f.hasse_derivative(1), f.derivative());
        assert!(f.hasse_derivative(5).is_zero());
    }

    #[test]
    fn monic_division() {
        let (q, r) = p("x^3+2x+5").div_rem_monic(&p("x-1"));
        assert_eq!(q, p("x^2+x+3"));
        assert_eq!(r, p("8"));
    }

    #[test]
    fn gcd_is_primitive() {
        let g = p("2x^2-2").primitive_gcd(&p("4x-4"));
        assert_eq!(g, p("x-1"));
        assert_eq!(p("x^2+1").primitive_gcd(&p("x")), p("1"));
    }
}
