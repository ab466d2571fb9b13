use dashu::integer::{IBig, UBig};
use dashu::rational::RBig;
use spart::igusa::{local_measure, local_measure_oracle, zeta_rational, LocalFactor};
use spart::padic::vp;
use spart::poly::discriminant;
use spart::{Error, IntPoly};

const SUITE: [&str; 8] = ["x", "x^2", "x^2-1", "x^2+1", "x^3-x", "(x-1)^2(x+1)", "x^2-2", "2x+1"];
const PRIMES: [u64; 4] = [2, 3, 5, 7];

fn poly(s: &str) -> IntPoly {
    s.parse().unwrap()
}

fn threshold(lf: &LocalFactor) -> u32 {
    match lf {
        LocalFactor::Rooted(d) => d.a_p,
        LocalFactor::Rootless { u_p, .. } => *u_p,
    }
}

#[test]
fn measures_match_oracle_on_suite() {
    for f in SUITE {
        let f = poly(f);
        for p in PRIMES {
            let lf = LocalFactor::new(&f, p).unwrap();
            for k in 0..=threshold(&lf) + 6 {
                match local_measure_oracle(&f, p, k) {
                    Ok(want) => assert_eq!(lf.measure(k), want, "f={f} p={p} k={k}"),
                    Err(Error::OracleBudgetExceeded) => break,
                    Err(e) => panic!("{e}"),
                }
            }
        }
    }
}

#[test]
fn zeta_normalized_and_series_matches() {
    for f in SUITE {
        let f = poly(f);
        for p in PRIMES {
            let z = zeta_rational(&f, p).unwrap();
            assert_eq!(z.eval(&RBig::ONE), Some(RBig::ONE), "f={f} p={p}");
            for (k, c) in z.series(12).into_iter().enumerate() {
                assert_eq!(c, local_measure(&f, p, k as u32).unwrap(), "f={f} p={p} k={k}");
            }
        }
    }
}

#[test]
fn scaled_measure_stabilizes_past_discriminant_valuation() {
    for f in SUITE {
        let f = poly(f);
        let Ok(delta) = discriminant(&f) else { continue };
        if delta == IBig::ZERO {
            continue;
        }
        for p in PRIMES {
            let lf = LocalFactor::new(&f, p).unwrap();
            if lf.igusa().is_none() {
                continue;
            }
            let start = vp(&delta, p).unwrap() + 1;
            let scaled = |k: u32| lf.measure(k) * RBig::from(UBig::from(p).pow(k as usize));
            for k in start..start + 10 {
                assert_eq!(scaled(k), scaled(start), "f={f} p={p} k={k}");
            }
        }
    }
}

#[test]
fn threshold_can_exceed_discriminant_valuation() {
    // Roots 0, 1, -1 in Z_2 with pairwise valuations 0, 0, 1 force λ = 1,
    // so a_2 = 3 while v_2(Δ) = v_2(4) = 2.
    let f = poly("x^3-x");
    let d = spart::igusa::igusa_data(&f, 2).unwrap();
    assert_eq!((d.lambda_p, d.a_p), (1, 3));
    assert_eq!(vp(&discriminant(&f).unwrap(), 2).unwrap(), 2);
}

#[test]
fn simple_roots_give_constant_scaled_measure() {
    for f in SUITE {
        let f = poly(f);
        for p in PRIMES {
            let LocalFactor::Rooted(d) = LocalFactor::new(&f, p).unwrap() else { continue };
            if !d.profile.all_simple() {
                continue;
            }
            let want: RBig = d.scale()
                * RBig::from(d.k_list.iter().map(|&k| UBig::from(p).pow(k as usize)).sum::<UBig>());
            for k in d.a_p + 1..=d.a_p + 12 {
                let scaled = d.measure(k) * RBig::from(UBig::from(p).pow(k as usize));
                assert_eq!(scaled, want, "f={f} p={p} k={k}");
            }
        }
    }
}
