use proptest::prelude::*;

use tightframe::frames::{
    build_combined_hahn_frame, build_hahn_frame, build_kraw_frame, build_xi_frame, frame_operator_residual,
    gram_vs_kernel_check, parseval_identity,
};
use tightframe::lattice::{binomial, n_dim, r_dim};
use tightframe::scalar::{Rational, ToleranceProfile};

fn rational(num: i64, den: i64) -> Rational {
    Rational::new(num.into(), den.into())
}

/// kappa entries in (-1, 4] with small denominators.
fn kappa_entry() -> impl Strategy<Value = Rational> {
    (-5i64..=20, 1i64..=5)
        .prop_filter("kappa > -1", |(p, q)| p > &-q)
        .prop_map(|(p, q)| rational(p, q))
}

fn kappa(d: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(kappa_entry(), d + 1)
}

/// rho with positive entries summing below one.
fn rho(d: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec(1i64..=6, d + 1).prop_map(move |w| {
        let total: i64 = w.iter().sum();
        w[..d].iter().map(|&v| rational(v, total)).collect()
    })
}

fn small_vector(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((-9i64..=9, 1i64..=6).prop_map(|(p, q)| rational(p, q)), len)
}

fn degrees() -> impl Strategy<Value = (usize, usize)> {
    (1usize..=3).prop_flat_map(|m| (1..=m).prop_map(move |n| (n, m)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn hahn_frames_are_exactly_tight(d in 2usize..=3, (n, m) in degrees(), k in kappa(3)) {
        let k = &k[..=d];
        let f = build_hahn_frame(d, n, m, k).unwrap();
        prop_assert_eq!(f.cols(), binomial(m + d, d).try_into().unwrap_or(0usize));
        prop_assert_eq!(f.rows(), r_dim(d, n));
        let rep = gram_vs_kernel_check(&f, &ToleranceProfile::exact()).unwrap();
        prop_assert!(rep.tight);
        prop_assert_eq!(rep.gram_kernel_ok, Some(true));
    }

    #[test]
    fn kraw_frames_are_exactly_tight(d in 2usize..=3, (n, m) in degrees(), seed in rho(3)) {
        let r: Vec<Rational> = seed[..d].to_vec();
        let f = build_kraw_frame(d, n, m, &r).unwrap();
        prop_assert_eq!(f.cols(), n_dim(d, m));
        let rep = gram_vs_kernel_check(&f, &ToleranceProfile::exact()).unwrap();
        prop_assert!(rep.tight);
        prop_assert_eq!(rep.gram_kernel_ok, Some(true));
    }

    #[test]
    fn single_column_sign_flips_keep_tightness(d in 2usize..=3, (n, m) in degrees(), col in any::<prop::sample::Index>()) {
        let f = build_hahn_frame(d, n, m, &vec![Rational::from_integer(0.into()); d + 1]).unwrap();
        let g = f.with_negated_column(col.index(f.cols()));
        let rep = frame_operator_residual(&g, &ToleranceProfile::exact()).unwrap();
        prop_assert!(rep.tight);
        prop_assert_eq!(rep.tight_residual, 0.0);
    }

    #[test]
    fn xi_parseval_for_rational_vectors(d in 2usize..=3, big_n in 1usize..=3, v in small_vector(20)) {
        let f = build_xi_frame::<Rational>(d, big_n).unwrap();
        prop_assert_eq!(f.cols(), 1 + big_n * n_dim(d, big_n));
        let v = &v[..f.rows().min(v.len())];
        prop_assume!(v.len() == f.rows());
        prop_assert!(parseval_identity(&f, v).unwrap());
    }

    #[test]
    fn hahn_parseval_for_rational_vectors(k in kappa(2), v in small_vector(3)) {
        let f = build_hahn_frame(2, 2, 3, &k).unwrap();
        prop_assert!(parseval_identity(&f, &v).unwrap());
    }

    #[test]
    fn combined_frames_are_tight(k in kappa(2), big_n in 1usize..=3, picks in prop::collection::vec(0usize..3, 3)) {
        let m_list: Vec<usize> = (1..=big_n).map(|n| n + picks[n - 1] % (big_n - n + 1)).collect();
        let f = build_combined_hahn_frame(2, big_n, &m_list, &k).unwrap();
        prop_assert_eq!(f.rows(), n_dim(2, big_n));
        let rep = frame_operator_residual(&f, &ToleranceProfile::exact()).unwrap();
        prop_assert!(rep.tight);
    }
}

/// One hundred random rational vectors against Xi(2,2).
#[test]
fn xi22_parseval_hundred_vectors() {
    use rand::{Rng, SeedableRng};
    let f = build_xi_frame::<Rational>(2, 2).unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(22);
    for _ in 0..100 {
        let v: Vec<Rational> = (0..f.rows())
            .map(|_| rational(rng.gen_range(-20..=20), rng.gen_range(1..=9)))
            .collect();
        assert!(parseval_identity(&f, &v).unwrap(), "{v:?}");
    }
}

#[test]
fn float_frames_are_tight_to_tolerance() {
    let profile = ToleranceProfile::float(1e-12);
    for m in 1..=4 {
        for n in 1..=m {
            let h = build_hahn_frame(2, n, m, &[1.0, 0.0, 2.0]).unwrap();
            assert!(gram_vs_kernel_check(&h, &profile).unwrap().tight);
            let k = build_kraw_frame(2, n, m, &[0.25, 0.5]).unwrap();
            let rep = gram_vs_kernel_check(&k, &profile).unwrap();
            assert!(rep.tight && rep.gram_kernel_ok == Some(true), "{rep:?}");
        }
    }
}
