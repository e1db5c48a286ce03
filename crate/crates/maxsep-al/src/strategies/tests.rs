use super::*;
use crate::prototypes::build_prototypes;
use crate::seeding::{stream_rng, Stream};
use approx::assert_abs_diff_eq;
use ndarray::array;
use proptest::prelude::*;

fn feature_matrix(rows: &[Vec<f64>]) -> Array2<f64> {
    let dim = rows[0].len();
    Array2::from_shape_fn((rows.len(), dim), |(i, j)| rows[i][j])
}

#[test]
fn msal_scores_match_the_planar_simplex_geometry() {
    let protos = build_prototypes(3).unwrap();
    let features = feature_matrix(&[
        vec![1.0, 0.0],  // exactly prototype 0
        vec![-1.0, 0.0], // dots (-1, 1/2, 1/2)
        vec![0.0, 1.0],  // dots (0, sqrt(3)/2, -sqrt(3)/2)
        vec![0.0, 0.0],  // zero norm: maximally uncertain
    ]);
    let scores = score_msal(&features, &[0, 1, 2, 3], &protos).unwrap();
    assert_abs_diff_eq!(scores.scores[0], -1.0, epsilon = 1e-12);
    assert_abs_diff_eq!(scores.scores[1], -0.5, epsilon = 1e-12);
    assert_abs_diff_eq!(scores.scores[2], -3.0f64.sqrt() / 2.0, epsilon = 1e-12);
    assert_abs_diff_eq!(scores.scores[3], 1.0, epsilon = 1e-15);
}

#[test]
fn msal_rejects_wrong_feature_width() {
    let protos = build_prototypes(3).unwrap();
    let features = Array2::zeros((2, 5));
    assert!(score_msal(&features, &[0, 1], &protos).is_err());
}

#[test]
fn classical_scores_hit_their_landmark_values() {
    let uniform = Array2::from_elem((1, 10), 0.1);
    let e = score_entropy(&uniform, &[0]).unwrap();
    assert_abs_diff_eq!(e.scores[0], 10.0f64.ln(), epsilon = 1e-12);

    let one_hot = array![[0.0, 1.0, 0.0]];
    assert_abs_diff_eq!(score_least_conf(&one_hot, &[0]).unwrap().scores[0], 0.0);
    assert_abs_diff_eq!(score_margin(&one_hot, &[0]).unwrap().scores[0], -1.0);
    assert_abs_diff_eq!(score_entropy(&one_hot, &[0]).unwrap().scores[0], 0.0);

    let tied = array![[0.5, 0.5, 0.0]];
    assert_abs_diff_eq!(score_margin(&tied, &[0]).unwrap().scores[0], 0.0);
}

#[test]
fn non_probability_rows_are_rejected() {
    let bad = array![[0.7, 0.7]];
    assert!(score_entropy(&bad, &[0]).is_err());
    assert!(score_least_conf(&bad, &[0]).is_err());
    assert!(score_margin(&bad, &[0]).is_err());
}

#[test]
fn top_uncertain_ranks_and_breaks_ties_by_pool_index() {
    let scores = UncertaintyScores {
        pool_indices: vec![7, 3, 9],
        scores: vec![0.1, 0.9, 0.5],
    };
    assert_eq!(select_top_uncertain(&scores, 2).unwrap(), vec![3, 9]);
    assert_eq!(select_top_uncertain(&scores, 3).unwrap(), vec![3, 9, 7]);
    // more than the pool holds: the whole pool
    assert_eq!(select_top_uncertain(&scores, 10).unwrap(), vec![3, 9, 7]);

    let tied = UncertaintyScores {
        pool_indices: vec![12, 4, 8],
        scores: vec![0.5, 0.5, 0.5],
    };
    assert_eq!(select_top_uncertain(&tied, 3).unwrap(), vec![4, 8, 12]);

    let empty = UncertaintyScores {
        pool_indices: vec![],
        scores: vec![],
    };
    assert!(matches!(
        select_top_uncertain(&empty, 1),
        Err(crate::error::Error::InvalidState(_))
    ));
}

#[test]
fn msal_d_fills_class_quotas_with_the_closest_samples() {
    // C = 3: prototypes (1,0), (-1/2, rt3/2), (-1/2, -rt3/2).
    // idx 5 points away from everything (alpha = 0.5, most uncertain),
    // idx 7 sits on prototype 1, idx 6 on prototype 0, idx 8 near
    // prototype 2. Quotas for b = 2 go to classes 0 and 1, which pick
    // their closest members (6 and 7) over the globally most uncertain 5.
    let protos = build_prototypes(3).unwrap();
    let features = feature_matrix(&[
        vec![-0.5, 0.0],
        vec![0.97, 0.0],
        vec![-0.3, 0.52],
        vec![0.1, -0.9],
    ]);
    let pool = vec![5, 6, 7, 8];
    let scores = score_msal(&features, &pool, &protos).unwrap();
    let picked = select_msal_d(&features, &protos, 2, 2, &scores).unwrap();
    assert_eq!(picked, vec![6, 7]);
}

#[test]
fn msal_d_with_beta_one_is_plain_uncertainty_sampling() {
    let protos = build_prototypes(4).unwrap();
    let mut rng = stream_rng(5, Stream::Select, 0);
    let features =
        Array2::from_shape_fn((20, 3), |_| crate::seeding::unit_f64(&mut rng) * 4.0 - 2.0);
    let pool: Vec<usize> = (100..120).collect();
    let scores = score_msal(&features, &pool, &protos).unwrap();

    let mut diverse = select_msal_d(&features, &protos, 6, 1, &scores).unwrap();
    let mut top = select_top_uncertain(&scores, 6).unwrap();
    diverse.sort_unstable();
    top.sort_unstable();
    assert_eq!(diverse, top);
}

#[test]
fn msal_d_tops_up_from_uncertainty_rank_when_a_class_dominates() {
    // every sample leans on prototype 0 of C = 4 (p0 = e1), with varying
    // tilt; classes 1..3 get empty groups so their quotas fall back to
    // uncertainty order.
    let protos = build_prototypes(4).unwrap();
    let eps = [0.01, 0.3, 0.2, 0.25, 0.15, 0.05];
    let rows: Vec<Vec<f64>> = eps.iter().map(|&e| vec![1.0, e, 0.0]).collect();
    let features = feature_matrix(&rows);
    let pool: Vec<usize> = (100..106).collect();
    let scores = score_msal(&features, &pool, &protos).unwrap();

    let picked = select_msal_d(&features, &protos, 4, 1, &scores).unwrap();
    // class 0 quota takes the most aligned pre-filtered member (eps 0.15),
    // then the deficit goes by uncertainty: eps 0.3, 0.25, 0.2.
    assert_eq!(picked, vec![104, 101, 103, 102]);
}

#[test]
fn msal_d_rejects_oversized_batches() {
    let protos = build_prototypes(3).unwrap();
    let features = Array2::zeros((3, 2));
    let pool = vec![0, 1, 2];
    let scores = score_msal(&features, &pool, &protos).unwrap();
    assert!(select_msal_d(&features, &protos, 4, 1, &scores).is_err());
}

#[test]
fn random_selection_is_seeded_and_within_the_pool() {
    let pool: Vec<usize> = (50..80).collect();
    let mut a = stream_rng(9, Stream::Select, 0);
    let mut b = stream_rng(9, Stream::Select, 0);
    let pa = select_random(&pool, 10, &mut a).unwrap();
    let pb = select_random(&pool, 10, &mut b).unwrap();
    assert_eq!(pa, pb);
    assert!(pa.iter().all(|i| pool.contains(i)));
    let mut dedup = pa.clone();
    dedup.sort_unstable();
    dedup.dedup();
    assert_eq!(dedup.len(), 10);

    let mut whole = select_random(&pool, pool.len(), &mut a).unwrap();
    whole.sort_unstable();
    assert_eq!(whole, pool);
    assert!(select_random(&pool, pool.len() + 1, &mut a).is_err());
}

#[test]
fn kmeans_lands_one_pick_per_separated_blob() {
    let mut rows = Vec::new();
    let centers = [(0.0, 0.0), (10.0, 0.0), (0.0, 10.0), (10.0, 10.0)];
    for (i, &(cx, cy)) in centers.iter().enumerate() {
        for j in 0..5 {
            let wiggle = 0.01 * (i * 5 + j) as f64;
            rows.push(vec![cx + wiggle, cy - wiggle]);
        }
    }
    let features = feature_matrix(&rows);
    let pool: Vec<usize> = (0..rows.len()).collect();
    let mut rng = stream_rng(1, Stream::Select, 0);
    let picked = select_kmeans(&features, &pool, 4, &mut rng).unwrap();
    assert_eq!(picked.len(), 4);
    let mut blob_hit = [false; 4];
    for &i in &picked {
        blob_hit[i / 5] = true;
    }
    assert!(blob_hit.iter().all(|&h| h), "picks {picked:?}");
}

#[test]
fn kmeans_with_one_cluster_picks_the_sample_nearest_the_mean() {
    let rows = vec![
        vec![0.0, 0.0],
        vec![10.0, 0.0],
        vec![4.0, 1.0],
        vec![6.0, -1.0],
        vec![5.4, 0.2],
    ];
    let features = feature_matrix(&rows);
    let pool: Vec<usize> = (0..rows.len()).collect();
    let mut rng = stream_rng(2, Stream::Select, 0);
    let picked = select_kmeans(&features, &pool, 1, &mut rng).unwrap();

    // brute-force nearest-to-mean
    let n = rows.len() as f64;
    let mean = [
        rows.iter().map(|r| r[0]).sum::<f64>() / n,
        rows.iter().map(|r| r[1]).sum::<f64>() / n,
    ];
    let expect = (0..rows.len())
        .min_by(|&a, &b| {
            let da = (rows[a][0] - mean[0]).powi(2) + (rows[a][1] - mean[1]).powi(2);
            let db = (rows[b][0] - mean[0]).powi(2) + (rows[b][1] - mean[1]).powi(2);
            da.total_cmp(&db)
        })
        .unwrap();
    assert_eq!(picked, vec![expect]);
}

#[test]
fn kmeans_is_deterministic_under_a_fixed_seed() {
    let mut rng1 = stream_rng(33, Stream::Select, 0);
    let mut rng2 = stream_rng(33, Stream::Select, 0);
    let features = Array2::from_shape_fn((40, 3), |(i, j)| ((i * 7 + j * 13) % 17) as f64);
    let pool: Vec<usize> = (0..40).collect();
    let a = select_kmeans(&features, &pool, 6, &mut rng1).unwrap();
    let b = select_kmeans(&features, &pool, 6, &mut rng2).unwrap();
    assert_eq!(a, b);
}

#[test]
fn kcenter_walks_out_by_max_min_distance() {
    let pool_features = feature_matrix(&[vec![1.0], vec![2.0], vec![10.0]]);
    let labeled = feature_matrix(&[vec![0.0]]);
    let pool = vec![1, 2, 10];

    assert_eq!(
        select_kcenter(&pool_features, &pool, &labeled, 1).unwrap(),
        vec![10]
    );
    // after 10 is covered: min-dist(1) = 1, min-dist(2) = 2 -> pick 2
    assert_eq!(
        select_kcenter(&pool_features, &pool, &labeled, 2).unwrap(),
        vec![10, 2]
    );
    assert_eq!(
        select_kcenter(&pool_features, &pool, &labeled, 3).unwrap(),
        vec![10, 2, 1]
    );

    let empty = Array2::zeros((0, 1));
    assert!(matches!(
        select_kcenter(&pool_features, &pool, &empty, 1),
        Err(crate::error::Error::InvalidState(_))
    ));
}

#[test]
fn dbal_with_beta_one_reduces_to_top_uncertain() {
    let protos = build_prototypes(3).unwrap();
    let mut gen_rng = stream_rng(7, Stream::Select, 0);
    let features =
        Array2::from_shape_fn((15, 2), |_| crate::seeding::unit_f64(&mut gen_rng) * 6.0 - 3.0);
    let pool: Vec<usize> = (0..15).collect();
    let scores = score_msal(&features, &pool, &protos).unwrap();

    let mut rng = stream_rng(7, Stream::Select, 1);
    let mut picked = select_dbal(&features, 5, 1, &scores, &mut rng).unwrap();
    let mut top = select_top_uncertain(&scores, 5).unwrap();
    picked.sort_unstable();
    top.sort_unstable();
    assert_eq!(picked, top);
}

#[test]
fn ceal_entropy_variant_respects_the_threshold() {
    let probs = array![[1.0, 0.0, 0.0], [0.4, 0.35, 0.25]];
    let pool = vec![3, 4];

    // delta_t = 0 admits nothing: entropy >= 0 always
    assert!(ceal_pseudo_label_entropy(&probs, &pool, 0.0).unwrap().is_empty());

    // a one-hot row has entropy 0 < any positive threshold
    let labeled = ceal_pseudo_label_entropy(&probs, &pool, 0.1).unwrap();
    assert_eq!(labeled, vec![(3, 0)]);
}

#[test]
fn ceal_msal_variant_cannot_fire_at_zero_threshold() {
    let alphas = vec![1.0, 0.9999, 0.3];
    let preds = vec![0, 1, 2];
    let pool = vec![10, 11, 12];
    assert!(ceal_pseudo_label_msal(&alphas, &preds, &pool, 0.0).unwrap().is_empty());

    let fired = ceal_pseudo_label_msal(&alphas, &preds, &pool, 0.01).unwrap();
    assert_eq!(fired, vec![(10, 0), (11, 1)]);
}

#[test]
fn ceal_threshold_decays_to_zero() {
    assert_abs_diff_eq!(ceal_threshold(0.5, 0.1, 0), 0.5);
    assert_abs_diff_eq!(ceal_threshold(0.5, 0.1, 3), 0.2);
    assert_abs_diff_eq!(ceal_threshold(0.5, 0.2, 10), 0.0);
}

#[test]
fn strategy_spec_validation_catches_bad_hyperparameters() {
    let mut spec = StrategySpec::new(StrategyKind::MsalD);
    spec.beta = 0;
    assert!(spec.validate().is_err());

    let bad_ceal = StrategySpec::new(StrategyKind::Msal).with_ceal(CealSettings {
        delta0: 1.5,
        decay_rate: 0.0,
    });
    assert!(bad_ceal.validate().is_err());
}

fn pool_with_features() -> impl Strategy<Value = (usize, Vec<Vec<f64>>, usize)> {
    (2usize..5).prop_flat_map(|c| {
        (5usize..30).prop_flat_map(move |n| {
            (
                Just(c),
                proptest::collection::vec(
                    proptest::collection::vec(-5.0f64..5.0, c - 1),
                    n,
                ),
                1usize..=n.min(8),
            )
        })
    })
}

proptest! {
    #[test]
    fn msal_d_output_is_well_formed((c, rows, b) in pool_with_features(), beta in 1usize..4) {
        let protos = build_prototypes(c).unwrap();
        let features = feature_matrix(&rows);
        let pool: Vec<usize> = (0..rows.len()).map(|i| i * 3 + 1).collect();
        let scores = score_msal(&features, &pool, &protos).unwrap();
        let picked = select_msal_d(&features, &protos, b, beta, &scores).unwrap();

        prop_assert_eq!(picked.len(), b);
        let mut sorted = picked.clone();
        sorted.sort_unstable();
        sorted.dedup();
        prop_assert_eq!(sorted.len(), b, "duplicates in {:?}", picked);
        prop_assert!(picked.iter().all(|i| pool.contains(i)));
    }

    #[test]
    fn msal_score_is_scale_invariant((c, rows, _) in pool_with_features(), t in prop_oneof![Just(1e-3), Just(1.0), Just(1e3)]) {
        let protos = build_prototypes(c).unwrap();
        let features = feature_matrix(&rows);
        let scaled = features.mapv(|v| v * t);
        let pool: Vec<usize> = (0..rows.len()).collect();
        let base = score_msal(&features, &pool, &protos).unwrap();
        let after = score_msal(&scaled, &pool, &protos).unwrap();
        for (a, b) in base.scores.iter().zip(&after.scores) {
            prop_assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
        }
    }

    #[test]
    fn top1_msal_is_the_argmin_of_max_cosine((c, rows, _) in pool_with_features()) {
        let protos = build_prototypes(c).unwrap();
        let features = feature_matrix(&rows);
        let pool: Vec<usize> = (0..rows.len()).collect();
        let scores = score_msal(&features, &pool, &protos).unwrap();
        let top = select_top_uncertain(&scores, 1).unwrap()[0];

        let alphas = max_cosines(&features, &protos);
        let argmin = (0..alphas.len())
            .min_by(|&a, &b| alphas[a].total_cmp(&alphas[b]).then(a.cmp(&b)))
            .unwrap();
        prop_assert_eq!(top, pool[argmin]);
    }

    #[test]
    fn msal_d_beta_one_matches_top_b((c, rows, b) in pool_with_features()) {
        let protos = build_prototypes(c).unwrap();
        let features = feature_matrix(&rows);
        let pool: Vec<usize> = (0..rows.len()).collect();
        let scores = score_msal(&features, &pool, &protos).unwrap();
        let mut diverse = select_msal_d(&features, &protos, b, 1, &scores).unwrap();
        let mut top = select_top_uncertain(&scores, b).unwrap();
        diverse.sort_unstable();
        top.sort_unstable();
        prop_assert_eq!(diverse, top);
    }
}
