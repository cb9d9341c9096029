use proptest::prelude::*;
use rand::Rng;
use rand_distr::Exp1;

use xfpt::closed_forms::summary_mean;
use xfpt::harness::ks_distance;
use xfpt::models::{RunTumble1dParams, RunTumbleIsoParams};
use xfpt::quadrature::integrate;
use xfpt::rng::stream;
use xfpt::special::{gamma, lambert_w_m1, upper_incomplete_gamma};
use xfpt::{AsymptoticLaw, ExtremeOrderQuery, GenGammaDist};

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn lambert_w_residual_on_log_grid() {
    let lo = (1.0 / std::f64::consts::E - 1e-6).ln();
    let hi = (1e-8f64).ln();
    for i in 0..200 {
        let z = -(lo + (hi - lo) * i as f64 / 199.0).exp();
        let w = lambert_w_m1(z).unwrap();
        assert!(w <= -1.0, "w = {w} at z = {z}");
        assert!(
            (w * w.exp() - z).abs() <= 1e-12 * z.abs(),
            "z = {z}, w = {w}"
        );
    }
}

#[test]
fn lambert_w_domain() {
    for z in [0.0, 0.1, -0.4, f64::NAN] {
        assert!(lambert_w_m1(z).is_err(), "z = {z}");
    }
    assert_eq!(lambert_w_m1(-(-1.0f64).exp()).unwrap(), -1.0);
}

#[test]
fn incomplete_gamma_matches_quadrature() {
    for &(a, z) in &[(2.0, 1.0), (0.5, 0.3), (3.5, 7.0), (1.5, 0.0), (10.0, 2.0)] {
        let f = |u: f64| u.powf(a - 1.0) * (-u).exp();
        let quad = integrate(f, z, z + 200.0, 1e-13 * gamma(a)).unwrap();
        let v = upper_incomplete_gamma(a, z).unwrap();
        assert!(rel(v, quad) < 1e-10, "a = {a}, z = {z}: {v} vs {quad}");
    }
}

#[test]
fn gengamma_pdf_integrates_to_survival_differences() {
    for &(t, p, k) in &[
        (1.0, 1.0, 1.0),
        (1.0, 0.5, 2.0),
        (2.0, 2.0, 3.0),
        (0.3, 1.7, 1.5),
    ] {
        let d = GenGammaDist::new(t, p, k).unwrap();
        for &(a, b) in &[(0.1, 0.5), (0.5, 2.0), (0.05 * t, 3.0 * t)] {
            let quad = integrate(|x| d.pdf(x), a, b, 1e-15).unwrap();
            let exact = d.survival(a) - d.survival(b);
            assert!(
                rel(quad, exact) < 1e-8,
                "{d:?} on [{a}, {b}]: {quad} vs {exact}"
            );
        }
        let total = integrate(|x| d.pdf(x), 0.0, t, 1e-15).unwrap()
            + integrate(|x| d.pdf(x), t, t * 100f64.powf(1.0 / p), 1e-15).unwrap();
        assert!((total - 1.0).abs() < 1e-8, "{d:?} total mass {total}");
    }
}

#[test]
fn gengamma_moments_match_quadrature() {
    for &(t, p, k) in &[
        (1.0, 2.0, 2.0),
        (2.0, 2.0, 1.0),
        (1.0, 0.5, 1.0),
        (0.5, 1.3, 2.5),
    ] {
        let d = GenGammaDist::new(t, p, k).unwrap();
        for m in [0.0, 0.5, 1.0, 2.5] {
            let f = |x: f64| x.powf(m) * d.pdf(x);
            let upper = t * 100f64.powf(1.0 / p);
            let exact = d.moment(m).unwrap();
            let tol = 1e-12 * exact;
            let quad = integrate(f, 0.0, t, tol).unwrap() + integrate(f, t, upper, tol).unwrap();
            assert!(rel(quad, exact) < 1e-8, "{d:?}, m = {m}: {quad} vs {exact}");
        }
    }
}

#[test]
fn erlang_is_a_sum_of_exponentials() {
    let n = 100_000;
    let band = 1.63 / (n as f64).sqrt();
    for k in 1..=3u32 {
        let mut rng = stream(77, k as u64);
        let mut sums: Vec<f64> = (0..n)
            .map(|_| (0..k).map(|_| rng.sample::<f64, _>(Exp1)).sum())
            .collect();
        sums.sort_by(f64::total_cmp);
        let d = GenGammaDist::erlang(1.0, k).unwrap();
        let ks = ks_distance(&sums, |x| d.survival(x)).unwrap();
        assert!(ks <= band, "k = {k}: KS {ks} above {band}");
    }
}

#[test]
fn scaling_constant_examples() {
    let plain = AsymptoticLaw::new(1.0, 0.0, 0.5, 1.0, false).unwrap();
    assert!(rel(plain.scaling_constant(100, false).unwrap(), 0.02) < 1e-15);
    assert_eq!(
        plain.scaling_constant(100, true).unwrap(),
        plain.scaling_constant(100, false).unwrap()
    );
}

#[test]
fn closed_forms_agree_with_composed_laws() {
    for dim in 1..=3u8 {
        for rho in [0.5, 1.0, 3.0, 10.0] {
            let law = match dim {
                1 => RunTumble1dParams::symmetric_interval(1.0, 1.0, rho)
                    .unwrap()
                    .law()
                    .unwrap(),
                _ => RunTumbleIsoParams::new(dim, rho).unwrap().law().unwrap(),
            };
            for n in [100u64, 10_000, 1_000_000] {
                let closed = summary_mean(dim, rho, n, 1.0, 1.0).unwrap();
                let composed = law.mean_variance(n).unwrap().mean;
                assert!(rel(closed, composed) < 1e-12, "dim {dim}, rho {rho}, N {n}");
            }
        }
    }
}

fn arb_law() -> impl Strategy<Value = AsymptoticLaw> {
    (
        0.1f64..10.0,
        0.0f64..0.9,
        0.01f64..5.0,
        0.2f64..3.0,
        any::<bool>(),
    )
        .prop_map(|(t0, q, alpha, p, log)| AsymptoticLaw::new(t0, q, alpha, p, log).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn lambert_w_residual(x in -20.0f64..-1e-6) {
        // z = -e^{x-1} sweeps (-1/e, 0)
        let z = -(x.exp()) / std::f64::consts::E;
        prop_assume!(z > -1.0 / std::f64::consts::E && z < 0.0);
        let w = lambert_w_m1(z).unwrap();
        prop_assert!(w <= -1.0);
        prop_assert!((w * w.exp() - z).abs() <= 1e-12 * z.abs());
    }

    #[test]
    fn survival_is_monotone(t in 0.1f64..5.0, p in 0.2f64..4.0, k in 0.5f64..6.0,
                            a in 0.0f64..10.0, b in 0.0f64..10.0) {
        let d = GenGammaDist::new(t, p, k).unwrap();
        prop_assert_eq!(d.survival(0.0), 1.0);
        prop_assert_eq!(d.survival(-a), 1.0);
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        prop_assert!(d.survival(hi) <= d.survival(lo) + 1e-15);
        prop_assert!(d.pdf(lo) >= 0.0);
    }

    #[test]
    fn order_one_is_weibull(t in 0.1f64..5.0, p in 0.2f64..4.0, x in 0.0f64..20.0) {
        let d = GenGammaDist::new(t, p, 1.0).unwrap();
        let weibull = (-(x / t).powf(p)).exp();
        prop_assert!((d.survival(x) - weibull).abs() < 1e-14);
        prop_assert!(rel(d.moment(1.0).unwrap(), t * gamma(1.0 + 1.0 / p)) < 1e-12);
    }

    #[test]
    fn integer_order_unit_shape_is_erlang(k in 1u32..8, x in 0.0f64..30.0) {
        let d = GenGammaDist::erlang(1.0, k).unwrap();
        let mut term = 1.0;
        let mut sum = 1.0;
        for j in 1..k {
            term *= x / j as f64;
            sum += term;
        }
        let erlang = (-x).exp() * sum;
        prop_assert!((d.survival(x) - erlang).abs() < 1e-12, "{} vs {}", d.survival(x), erlang);
    }

    #[test]
    fn atom_and_survival_complement(law in arb_law(), n in 2u64..1_000_000) {
        let s = law.fastest_survival(n, law.t0).unwrap();
        prop_assert!((s + law.atom_probability(n) - 1.0).abs() < 1e-15);
        prop_assert_eq!(law.fastest_survival(n, 0.5 * law.t0).unwrap(), 1.0);
    }

    #[test]
    fn kth_survival_nondecreasing_in_k(law in arb_law(), n in 10u64..100_000, x in 0.0f64..5.0) {
        let a_n = law.scaling_constant(n, false).unwrap();
        let t = law.t0 * (1.0 + a_n * x);
        let mut prev = 0.0;
        for k in 1..=6u64 {
            let s = ExtremeOrderQuery::new(law, n, k).unwrap().kth_survival(t).unwrap();
            prop_assert!(s >= prev - 1e-14, "k = {} gives {} < {}", k, s, prev);
            prev = s;
        }
    }

    #[test]
    fn first_order_equals_fastest(law in arb_law(), n in 2u64..100_000, x in -1.0f64..5.0) {
        let a_n = law.scaling_constant(n, false).unwrap();
        let t = law.t0 * (1.0 + a_n * x);
        let kth = ExtremeOrderQuery::new(law, n, 1).unwrap().kth_survival(t).unwrap();
        prop_assert!((kth - law.fastest_survival(n, t).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn zeroth_moment_is_branch_weight(law in arb_law(), n in 2u64..100_000, k in 1u64..5) {
        let query = ExtremeOrderQuery::new(law, n, k).unwrap();
        let weight: f64 = query.mixture_weights().iter().sum();
        let m0 = query.extreme_moment(0.0).unwrap();
        // weights can sit in the subnormal range, hence the absolute floor
        prop_assert!((m0 - weight).abs() <= 1e-12 * weight + 1e-300);
    }

    #[test]
    fn scaling_constant_decreases(law in arb_law(), n in 20u64..1_000_000) {
        let a = law.scaling_constant(n, false).unwrap();
        let b = law.scaling_constant(n + 1, false).unwrap();
        prop_assert!(b < a && b > 0.0);
    }

    #[test]
    fn mean_variance_q_zero_limit(t0 in 0.1f64..5.0, alpha in 0.1f64..5.0, n in 2u64..10_000) {
        let law = AsymptoticLaw::new(t0, 1e-300, alpha, 1.0, false).unwrap();
        let mv = law.mean_variance(n).unwrap();
        let scale = t0 * law.scaling_constant(n, false).unwrap();
        prop_assert!(rel(mv.variance, scale * scale) < 1e-12);
    }
}
