use proptest::prelude::*;
use tgembed::eval::{auc, train_logistic, LogisticParams};

fn brute_force_auc(scores: &[f64], labels: &[bool]) -> f64 {
    let (mut good, mut pairs) = (0.0, 0.0);
    for (s_pos, _) in scores.iter().zip(labels).filter(|(_, &l)| l) {
        for (s_neg, _) in scores.iter().zip(labels).filter(|(_, &l)| !l) {
            pairs += 1.0;
            good += match s_pos.total_cmp(s_neg) {
                std::cmp::Ordering::Greater => 1.0,
                std::cmp::Ordering::Equal => 0.5,
                std::cmp::Ordering::Less => 0.0,
            };
        }
    }
    good / pairs
}

fn labelled_scores() -> impl Strategy<Value = (Vec<f64>, Vec<bool>)> {
    prop::collection::vec((0u8..12, any::<bool>()), 2..200).prop_map(|mut v| {
        v[0].1 = true;
        v[1].1 = false;
        v.into_iter().map(|(s, l)| (f64::from(s) / 4.0, l)).unzip()
    })
}

proptest! {
    #[test]
    fn auc_equals_pair_count((scores, labels) in labelled_scores()) {
        prop_assert_eq!(auc(&scores, &labels).unwrap(), brute_force_auc(&scores, &labels));
    }

    #[test]
    fn auc_ignores_monotone_rescaling((scores, labels) in labelled_scores()) {
        let squashed: Vec<f64> = scores.iter().map(|s| (3.0 * s).exp()).collect();
        prop_assert_eq!(auc(&scores, &labels).unwrap(), auc(&squashed, &labels).unwrap());
    }

    #[test]
    fn logistic_loss_never_increases(
        rows in prop::collection::vec((prop::collection::vec(-3.0f64..3.0, 3), any::<bool>()), 4..60),
        reg in 0.0f64..3.0,
        standardize in any::<bool>(),
    ) {
        let (mut x, mut y): (Vec<Vec<f64>>, Vec<bool>) = rows.into_iter().unzip();
        y[0] = true;
        y[1] = false;
        x[0][0] += 0.5;
        let params = LogisticParams { reg_strength: reg, standardize, ..LogisticParams::default() };
        let model = train_logistic(&x, &y, &params).unwrap();
        prop_assert!(model.loss_history.windows(2).all(|w| w[1] <= w[0]));
    }
}
