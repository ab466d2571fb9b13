use std::collections::BTreeSet;

use dashu::integer::IBig;
use proptest::prelude::*;
use spart::padic::{has_zp_root, padic_roots, u_p, vp};
use spart::poly::squarefree_decompose;
use spart::{Error, IntPoly};

const SUITE: [&str; 8] = ["x", "x^2", "x^2-1", "x^2+1", "x^3-x", "(x-1)^2(x+1)", "x^2-2", "2x+1"];

fn poly(s: &str) -> IntPoly {
    s.parse().unwrap()
}

fn pow(p: u64, e: u32) -> IBig {
    IBig::from(p).pow(e as usize)
}

#[test]
fn vp_examples() {
    assert_eq!(vp(&IBig::from(12), 2).unwrap(), 2);
    assert_eq!(vp(&IBig::from(1), 5).unwrap(), 0);
    assert_eq!(vp(&IBig::from(-54), 3).unwrap(), 3);
    assert_eq!(vp(&IBig::ZERO, 3).unwrap_err(), Error::ValuationOfZero);
}

#[test]
fn root_existence_examples() {
    assert!(has_zp_root(&poly("x"), 7).unwrap());
    assert!(has_zp_root(&poly("x^2-2"), 7).unwrap());
    assert!(!has_zp_root(&poly("x^2-2"), 5).unwrap());
}

#[test]
fn profile_examples() {
    let pr = padic_roots(&poly("x^2-1"), 2, 4).unwrap();
    assert_eq!(pr.l, 2);
    assert_eq!(pr.r_max, 1);
    let m = pow(2, 4);
    let residues: BTreeSet<IBig> = pr.roots.iter().map(|r| &r.residue % &m).collect();
    assert_eq!(residues, [IBig::from(1), IBig::from(15)].into_iter().collect());
    assert_eq!(pr.pairwise_valuations[0][1], 1);

    let pr = padic_roots(&poly("x^2"), 3, 3).unwrap();
    assert_eq!(pr.l, 1);
    assert_eq!(pr.roots[0].multiplicity, 2);
    assert_eq!(&pr.roots[0].residue % &pow(3, 3), IBig::ZERO);

    let pr = padic_roots(&poly("x^2+1"), 3, 2).unwrap();
    assert!(pr.roots.is_empty());
    assert_eq!(pr.u_p_g, 0);
}

#[test]
fn u_p_examples() {
    assert_eq!(u_p(&poly("x^2+1"), 2).unwrap(), 1);
    assert_eq!(u_p(&poly("x^2+1"), 3).unwrap(), 0);
    assert_eq!(u_p(&poly("x^2-2"), 5).unwrap(), 0);
    assert_eq!(u_p(&poly("x^2-1"), 5).unwrap_err(), Error::UpInfinite);
}

/// Residues mod `p^3` with `f ≡ 0 mod p^3` that still have a lift with `f ≡ 0 mod p^9`.
fn deep_residues(f: &IntPoly, p: u64) -> BTreeSet<IBig> {
    let mut level = vec![IBig::ZERO];
    let mut at3 = BTreeSet::new();
    for j in 0..9u32 {
        let m = pow(p, j + 1);
        let mut next = Vec::new();
        for a in &level {
            for t in 0..p {
                let c = a + IBig::from(t) * pow(p, j);
                if (f.eval(&c) % &m).is_zero() {
                    next.push(c);
                }
            }
        }
        level = next;
    }
    for a in level {
        at3.insert(a % pow(p, 3));
    }
    at3
}

#[test]
fn residues_match_exhaustive_deepening() {
    for f in SUITE {
        let f = poly(f);
        for p in [2u64, 3, 5] {
            let pr = padic_roots(&f, p, 3).unwrap();
            let got: BTreeSet<IBig> = pr.roots.iter().map(|r| &r.residue % &pow(p, 3)).collect();
            assert_eq!(got, deep_residues(&f, p), "f={f} p={p}");
        }
    }
}

#[test]
fn multiplicities_follow_yun() {
    for f in SUITE {
        let f = poly(f);
        let dec = squarefree_decompose(&f).unwrap();
        for p in [2u64, 3, 5, 7] {
            let pr = padic_roots(&f, p, 12).unwrap();
            assert!(pr.total_multiplicity() as usize <= f.degree().unwrap());
            assert_eq!(pr.r_max, pr.roots.iter().map(|r| r.multiplicity).max().unwrap_or(0));
            for r in &pr.roots {
                let m = pow(p, r.precision_exponent);
                assert!((f.eval(&r.residue) % &m).is_zero());
                // the factor annihilating the root vanishes to the working precision
                let owner: Vec<u32> = dec
                    .factors
                    .iter()
                    .filter(|(h, _)| (h.eval(&r.residue) % &m).is_zero())
                    .map(|(_, e)| *e)
                    .collect();
                assert_eq!(owner, vec![r.multiplicity], "f={f} p={p}");
            }
            for i in 0..pr.l {
                for j in 0..pr.l {
                    assert_eq!(pr.pairwise_valuations[i][j], pr.pairwise_valuations[j][i]);
                }
            }
        }
    }
}

fn arb_poly() -> impl Strategy<Value = IntPoly> {
    prop::collection::vec(-20i64..=20, 2..=5)
        .prop_map(|c| IntPoly::from_i64s(&c))
        .prop_filter("positive degree", |f| f.degree().is_some_and(|d| d >= 1))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn precision_does_not_change_invariants(f in arb_poly(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let a = padic_roots(&f, p, 4).unwrap();
        let b = padic_roots(&f, p, 20).unwrap();
        prop_assert_eq!(a.l, b.l);
        let ma: Vec<u32> = a.roots.iter().map(|r| r.multiplicity).collect();
        let mb: Vec<u32> = b.roots.iter().map(|r| r.multiplicity).collect();
        prop_assert_eq!(ma, mb);
        prop_assert_eq!(a.pairwise_valuations, b.pairwise_valuations);
        prop_assert_eq!(a.residual_valuations, b.residual_valuations);
        for r in &b.roots {
            prop_assert!(r.precision_exponent >= 20);
            prop_assert!((f.eval(&r.residue) % pow(p, r.precision_exponent)).is_zero());
        }
    }

    #[test]
    fn roots_exist_iff_profile_nonempty(f in arb_poly(), p in prop::sample::select(vec![2u64, 3, 5])) {
        let pr = padic_roots(&f, p, 2).unwrap();
        prop_assert_eq!(has_zp_root(&f, p).unwrap(), pr.has_roots());
        if !pr.has_roots() {
            let u = u_p(&f, p).unwrap();
            // no residue mod p^{u+1} makes f vanish to order u+1
            let m = pow(p, u + 1);
            let top = pow(p, u + 1);
            let mut x = IBig::ZERO;
            while x < top {
                prop_assert!(!(f.eval(&x) % &m).is_zero());
                x += IBig::ONE;
            }
        }
    }
}
