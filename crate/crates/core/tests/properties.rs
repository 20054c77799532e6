use proptest::prelude::*;

use wienerlab::inversion::{inverse_residual, invert_stable_detailed, verification_box};
use wienerlab::io::{filter_from_json, filter_to_json};
use wienerlab::lattice::{convolve_direct, convolve_fft};
use wienerlab::{
    convolve, decay_fit, invert_exact_1d, invert_singular_1d, invert_stable, kronecker, submultiplicative_check,
    toeplitz_oracle, weighted_norm, DecayModel, ExactInverse1D, Filter, IndexBox, NormExponent, Weight,
};

fn filter_1d(max_len: usize) -> impl Strategy<Value = Filter<f64>> {
    (-5i64..=5, prop::collection::vec(-1.0f64..1.0, 1..=max_len)).prop_map(|(o, c)| Filter::from_slice(o, &c))
}

fn filter_2d() -> impl Strategy<Value = Filter<f64>> {
    (-3i64..=3, -3i64..=3, 1usize..=5, 1usize..=5)
        .prop_flat_map(|(o0, o1, s0, s1)| {
            prop::collection::vec(-1.0f64..1.0, s0 * s1)
                .prop_map(move |c| Filter::new(vec![o0, o1], vec![s0, s1], c).unwrap())
        })
}

fn weight(dim: usize) -> impl Strategy<Value = Weight<f64>> {
    prop_oneof![
        (0.0f64..4.0).prop_map(move |n| Weight::polynomial(dim, n).unwrap()),
        (0.0f64..1.5).prop_map(move |r| Weight::exponential(dim, r).unwrap()),
        (0.0f64..2.0, 0.05f64..0.95).prop_map(move |(r, b)| Weight::subexponential(dim, r, b).unwrap()),
    ]
}

/// `Π (δ − z δ[· − 1])` with real roots or conjugate pairs, `|z| ∈ [0.05, 0.8]`.
fn stable_filter() -> impl Strategy<Value = Filter<f64>> {
    let factor = prop_oneof![
        (0.05f64..0.8, any::<bool>()).prop_map(|(r, neg)| vec![1.0, if neg { r } else { -r }]),
        (0.05f64..0.8, 0.0f64..std::f64::consts::PI).prop_map(|(r, t)| vec![1.0, -2.0 * r * t.cos(), r * r]),
    ];
    (prop::collection::vec(factor, 1..=6), -3i64..=3).prop_map(|(fs, shift)| {
        let poly = fs.iter().fold(vec![1.0], |acc, f| {
            let mut out = vec![0.0; acc.len() + f.len() - 1];
            for (i, a) in acc.iter().enumerate() {
                for (j, b) in f.iter().enumerate() {
                    out[i + j] += a * b;
                }
            }
            out
        });
        Filter::from_slice(shift, &poly)
    })
}

/// A radius on whose last eight shells the inverse has sunk below 1e-15 of its sup.
fn settled_radius(exact: &ExactInverse1D<f64>) -> Option<usize> {
    let sup = (-300..=300).map(|k| exact.eval(k).abs()).fold(0.0, f64::max);
    (16..=300usize).step_by(8).find(|&r| {
        (r as i64 - 8..=r as i64).all(|k| exact.eval(k).abs().max(exact.eval(-k).abs()) <= 1e-15 * sup)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn convolution_commutes_and_associates(a in filter_2d(), b in filter_2d(), c in filter_2d()) {
        let ab = convolve(&a, &b).unwrap();
        prop_assert!(ab.max_abs_diff(&convolve(&b, &a).unwrap()) <= 1e-12);
        let l = convolve(&ab, &c).unwrap();
        let r = convolve(&a, &convolve(&b, &c).unwrap()).unwrap();
        prop_assert!(l.max_abs_diff(&r) <= 1e-12 * (1.0 + l.sup_norm()));
    }

    #[test]
    fn direct_and_fft_agree(a in filter_1d(40), b in filter_1d(40)) {
        let d = convolve_direct(&a, &b).unwrap();
        let f = convolve_fft(&a, &b).unwrap();
        prop_assert!(d.max_abs_diff(&f) <= 1e-10 * d.sup_norm().max(1e-300));
    }

    #[test]
    fn delta_is_neutral(a in filter_2d()) {
        prop_assert_eq!(convolve(&a, &kronecker(2).unwrap()).unwrap(), a);
    }

    #[test]
    fn young_inequality(a in filter_2d(), b in filter_2d(), w in weight(2)) {
        let lhs = weighted_norm(&convolve(&a, &b).unwrap(), NormExponent::One, &w).unwrap();
        let rhs = weighted_norm(&a, NormExponent::One, &w).unwrap() * weighted_norm(&b, NormExponent::One, &w).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12));
    }

    #[test]
    fn builtin_weights_are_submultiplicative(w in weight(1)) {
        prop_assert!(submultiplicative_check(&w, &IndexBox::symmetric(1, 12)).is_empty());
    }

    #[test]
    fn filter_json_round_trip(a in filter_2d()) {
        let text = filter_to_json(&a).unwrap();
        let back = filter_from_json(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(filter_to_json(&back).unwrap(), text);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn inverses_agree_and_satisfy_residual(h in stable_filter()) {
        let exact = invert_exact_1d(&h).unwrap();
        let radius = settled_radius(&exact);
        prop_assume!(radius.is_some());
        let radius = radius.unwrap();
        let s = invert_stable_detailed(&h, 1e-10, radius).unwrap();
        let check = verification_box(&h, &IndexBox::symmetric(1, radius)).unwrap();
        prop_assert!(inverse_residual(&h, &s.inverse, &check) <= 1e-10);
        let oracle = toeplitz_oracle(&h, radius).unwrap();
        let closed = exact.to_filter(radius);
        let scale = closed.sup_norm().max(1.0);
        prop_assert!(s.inverse.max_abs_diff(&closed) <= 1e-8 * scale, "{}", s.inverse.max_abs_diff(&closed));
        prop_assert!(oracle.max_abs_diff(&closed) <= 1e-8 * scale, "{}", oracle.max_abs_diff(&closed));
    }

    #[test]
    fn double_inversion_recovers_filter(h in stable_filter()) {
        let radius = settled_radius(&invert_exact_1d(&h).unwrap());
        prop_assume!(radius.is_some());
        let g = invert_stable(&h, 1e-12, radius.unwrap()).unwrap();
        let back = invert_stable(&g, 1e-10, radius.unwrap()).unwrap();
        for (k, v) in h.iter() {
            prop_assert!((back.get(k.coords()) - v).abs() <= 1e-7 * h.sup_norm(), "k = {}", k);
        }
    }

    #[test]
    fn inverse_of_decaying_filter_decays(
        coeffs in prop::collection::vec(prop_oneof![-1.0f64..-0.1, 0.1f64..1.0], 41),
        c in 0.5f64..2.0,
    ) {
        // δ + p with ∥p∥₁ ≤ 1/2 is invertible in every ℓ1,w with w ≤ e^{c|k|}
        let raw = Filter::from_fn(&IndexBox::symmetric(1, 20), |k| {
            coeffs[(k.coords()[0] + 20) as usize] * (-c * k.l1() as f64).exp()
        });
        let l1: f64 = raw.coeffs().iter().map(|v| v.abs()).sum();
        let h = kronecker(1).unwrap().add(&raw.scaled(0.5 / l1));
        let g = invert_stable(&h, 1e-12, 80).unwrap();
        let report = decay_fit(&g).unwrap();
        prop_assert!(matches!(report.model, DecayModel::Exponential { rate } if rate > 0.0), "{:?}", report);
    }

    #[test]
    fn singular_inverse_growth_bound(
        stable in stable_filter(),
        unit_mult in 1usize..=2,
        alternating in any::<bool>(),
    ) {
        let step = if alternating { 1.0 } else { -1.0 };
        let unit = (0..unit_mult).fold(kronecker(1).unwrap(), |acc, _| {
            convolve(&acc, &Filter::from_slice(0, &[1.0, step])).unwrap()
        });
        let h = convolve(&stable, &unit).unwrap();
        let g = invert_singular_1d(&h, 50).unwrap();
        prop_assert_eq!(g.growth_order, unit_mult - 1);
        let wide = invert_singular_1d(&h, 200).unwrap();
        for (i, k) in wide.window.iter().enumerate() {
            let env = g.bound_constant * (1.0 + k.l1() as f64).powi(g.growth_order as i32);
            prop_assert!(wide.values[i].abs() <= env, "k = {}", k);
        }
    }
}

#[test]
fn single_precision_pipeline() {
    let h = Filter::<f32>::from_slice(-1, &[1.0 / 6.0, 4.0 / 6.0, 1.0 / 6.0]);
    let g = invert_stable(&h, 1e-5, 20).unwrap();
    let s3 = 3f32.sqrt();
    assert!((g.get(&[0]) - s3).abs() < 1e-5);
    let exact = invert_exact_1d(&h).unwrap();
    assert!((exact.eval(1) - s3 * (s3 - 2.0)).abs() < 1e-5);
}
