use k3wild::ffpoly::PrimeField;
use k3wild::tate::{classify_fibration, local_reduction, Strictness};
use k3wild::weierstrass::{ModelError, ModelRecord, Place, WeierstrassModel};
use proptest::prelude::*;

/// Random K3-degree models (`n = 2`) in general Weierstrass form.
fn model_strategy() -> impl Strategy<Value = WeierstrassModel> {
    (prop::sample::select(vec![5u64, 7, 11]), prop::collection::vec(-6i64..=6, 3 + 5 + 7 + 9 + 13)).prop_filter_map(
        "nondegenerate",
        |(p, c)| {
            let (a1, rest) = c.split_at(3);
            let (a2, rest) = rest.split_at(5);
            let (a3, rest) = rest.split_at(7);
            let (a4, a6) = rest.split_at(9);
            let rec = ModelRecord {
                p,
                n: 2,
                a1: a1.to_vec(),
                a2: a2.to_vec(),
                a3: a3.to_vec(),
                a4: a4.to_vec(),
                a6: a6.to_vec(),
            };
            match rec.build() {
                Ok(m) => Some(m),
                Err(ModelError::Degenerate) => None,
                Err(e) => panic!("unexpected {e}"),
            }
        },
    )
}

/// Sparse short models, which hit additive fibers far more often.
fn short_strategy() -> impl Strategy<Value = WeierstrassModel> {
    let sparse = |len: usize| prop::collection::vec(prop::sample::select(vec![0i64, 0, 0, 1, -1, 2]), len);
    (prop::sample::select(vec![5u64, 7]), sparse(9), sparse(13)).prop_filter_map("nondegenerate", |(p, a4, a6)| {
        let f = PrimeField::new(p).unwrap();
        WeierstrassModel::short(p, f.poly(&a4), f.poly(&a6), 2).ok()
    })
}

fn check_model(m: &WeierstrassModel) -> Result<(), TestCaseError> {
    let config = classify_fibration(m).unwrap();
    // a non-minimal model loses a multiple of 12
    let e = config.euler_sum();
    prop_assert!(e <= 24 && e.is_multiple_of(12), "euler sum {} for {}", e, m);
    for entry in &config.entries {
        prop_assert!(!entry.fiber.is_smooth());
        prop_assert_eq!(entry.fiber.euler(), entry.disc_valuation);
    }
    // t ↦ t + c moves the configuration and nothing else
    for c in m.field().elements() {
        let moved = classify_fibration(&m.translate_t(c)).unwrap();
        prop_assert_eq!(&moved, &config.translate(c), "c = {}", c.value());
    }
    // the fiber at infinity is the fiber at s = 0 of the other chart
    let s = Place::finite(m.field().t()).unwrap();
    let chart = local_reduction(&m.chart_at_infinity(), &s, Strictness::Lenient);
    prop_assert_eq!(
        config.fiber_at(&Place::Infinity),
        chart.map(|r| r.fiber).unwrap_or(k3wild::tate::KodairaFiber::I(0))
    );
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn general_models(m in model_strategy()) { check_model(&m)?; }

    #[test]
    fn short_models(m in short_strategy()) { check_model(&m)?; }

    #[test]
    fn record_round_trip(m in model_strategy()) {
        let rec = m.to_record();
        let text = rec.to_string();
        let back = ModelRecord::parse(&text).unwrap();
        prop_assert_eq!(&back, &rec);
        prop_assert_eq!(back.build().unwrap(), m);
    }
}
