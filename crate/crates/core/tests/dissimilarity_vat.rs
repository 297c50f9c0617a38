mod common;

use std::sync::atomic::{AtomicUsize, Ordering};

use common::*;
use egotopo::dissimilarity::{build_dissimilarity_matrix, distance, DissimilarityMatrix, Distance};
use egotopo::vat::{idm_pixels, render_idm, vat_order};
use egotopo::{DistanceMethod, FeatureMatrix};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn matrix(rows: Vec<Vec<f64>>) -> FeatureMatrix {
    let ids = (0..rows.len()).map(|i| format!("r{i}")).collect();
    let cols = (0..rows[0].len()).map(|c| format!("c{c}")).collect();
    FeatureMatrix::new(ids, cols, rows).unwrap()
}

fn d(x: &[f64], y: &[f64], m: DistanceMethod) -> f64 {
    distance(x, y, m).unwrap().value
}

#[test]
fn standardize_examples() {
    let f = matrix(vec![vec![1.0, 5.0], vec![2.0, 5.0], vec![3.0, 5.0]]);
    let (s, constant) = f.standardize().unwrap();
    assert_eq!(s.column(0), vec![-1.0, 0.0, 1.0]);
    assert_eq!(s.column(1), vec![0.0, 0.0, 0.0]);
    assert_eq!(constant, vec!["c1".to_string()]);
    assert!(matrix(vec![vec![1.0]]).standardize().is_err());

    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let rows: Vec<Vec<f64>> = (0..40)
        .map(|_| (0..6).map(|_| rng.gen_range(-50.0..300.0)).collect())
        .collect();
    let (s, _) = matrix(rows).standardize().unwrap();
    for c in 0..6 {
        let col = s.column(c);
        let mean = col.iter().sum::<f64>() / 40.0;
        let var = col.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 39.0;
        assert!(mean.abs() < 1e-12);
        assert!((var - 1.0).abs() < 1e-12);
    }
}

#[test]
fn distance_examples() {
    let x = [1.0, 4.0, 2.0, 8.0];
    for m in DistanceMethod::ALL {
        assert!(d(&x, &x, m).abs() < 1e-15, "{m}");
    }
    let neg: Vec<f64> = x.iter().map(|v| -v).collect();
    assert!((d(&x, &neg, DistanceMethod::Pearson) - 2.0).abs() < 1e-12);
    assert_eq!(
        d(&[1.0, 2.0, 3.0], &[3.0, 2.0, 1.0], DistanceMethod::Kendall),
        2.0
    );

    let flat = distance(&[2.0, 2.0, 2.0], &x[..3], DistanceMethod::Spearman).unwrap();
    assert_eq!(
        flat,
        Distance {
            value: 1.0,
            flagged: true
        }
    );
    assert!(distance(&[1.0], &[2.0], DistanceMethod::Pearson).is_err());
}

#[test]
fn spearman_matches_rank_oracle_with_ties() {
    // average ranks done by hand
    let x = [3.0, 1.0, 3.0, 2.0];
    let y = [10.0, 20.0, 30.0, 40.0];
    let rx = [3.5, 1.0, 3.5, 2.0];
    let ry = [1.0, 2.0, 3.0, 4.0];
    let want = 1.0 - pearson_two_pass(&rx, &ry).unwrap();
    assert!((d(&x, &y, DistanceMethod::Spearman) - want).abs() < 1e-12);
}

#[test]
fn kendall_tau_b_matches_pair_count() {
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    for _ in 0..50 {
        let x: Vec<f64> = (0..9).map(|_| rng.gen_range(0..4) as f64).collect();
        let y: Vec<f64> = (0..9).map(|_| rng.gen_range(0..4) as f64).collect();
        let (mut c, mut dd, mut tx, mut ty) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for i in 0..9 {
            for j in i + 1..9 {
                // f64::signum maps 0 to 1, so compare explicitly
                let sign = |v: f64| {
                    if v > 0.0 {
                        1
                    } else if v < 0.0 {
                        -1
                    } else {
                        0
                    }
                };
                let a = sign(x[i] - x[j]);
                let b = sign(y[i] - y[j]);
                if a == 0 && b == 0 {
                } else if a == 0 {
                    tx += 1.0;
                } else if b == 0 {
                    ty += 1.0;
                } else if a == b {
                    c += 1.0;
                } else {
                    dd += 1.0;
                }
            }
        }
        let den = ((c + dd + tx) * (c + dd + ty)).sqrt();
        let got = distance(&x, &y, DistanceMethod::Kendall).unwrap();
        if den == 0.0 {
            assert!(got.flagged);
        } else {
            assert!(
                (got.value - (1.0 - (c - dd) / den)).abs() < 1e-12,
                "{x:?} {y:?} {got:?} {}",
                1.0 - (c - dd) / den
            );
        }
    }
}

#[test]
fn matrix_matches_pairwise_recompute() {
    let f = matrix(vec![
        vec![1.0, 2.0, 9.0],
        vec![4.0, 0.5, 3.0],
        vec![7.0, 7.0, 1.0],
    ]);
    let (s, _) = f.standardize().unwrap();
    for m in DistanceMethod::ALL {
        let dm = build_dissimilarity_matrix(&s, m).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j {
                    0.0
                } else {
                    d(s.row(i), s.row(j), m)
                };
                assert_eq!(dm.get(i, j), want);
            }
        }
    }
    let dup = matrix(vec![
        vec![1.0, 2.0, 3.0],
        vec![1.0, 2.0, 3.0],
        vec![0.0, 5.0, 1.0],
    ]);
    let (s, _) = dup.standardize().unwrap();
    assert_eq!(
        build_dissimilarity_matrix(&s, DistanceMethod::Euclidean)
            .unwrap()
            .get(0, 1),
        0.0
    );
    assert!(build_dissimilarity_matrix(&dup, DistanceMethod::Euclidean).is_err());
}

#[test]
fn one_evaluation_per_pair() {
    for n in [1usize, 2, 7, 33] {
        let calls = AtomicUsize::new(0);
        let ids = (0..n).map(|i| i.to_string()).collect();
        DissimilarityMatrix::from_fn(ids, None, |i, j| {
            calls.fetch_add(1, Ordering::Relaxed);
            Ok(Distance {
                value: (i + j) as f64,
                flagged: false,
            })
        })
        .unwrap();
        assert_eq!(calls.into_inner(), n * (n.saturating_sub(1)) / 2);
    }
}

fn three_point() -> DissimilarityMatrix {
    DissimilarityMatrix::from_rows(&[
        vec![0.0, 1.0, 5.0],
        vec![1.0, 0.0, 4.0],
        vec![5.0, 4.0, 0.0],
    ])
    .unwrap()
}

#[test]
fn vat_examples() {
    assert_eq!(vat_order(&three_point()), vec![0, 1, 2]);
    let two = DissimilarityMatrix::from_rows(&[vec![0.0, 3.0], vec![3.0, 0.0]]).unwrap();
    assert_eq!(vat_order(&two), vec![0, 1]);

    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let pts = planted_blobs(&mut rng, 30, 20.0);
    let dm = euclidean_matrix(&pts);
    let order = vat_order(&dm);
    let first_block = order[0] % 2;
    let switch = order.iter().position(|&i| i % 2 != first_block).unwrap();
    assert!(order[switch..].iter().all(|&i| i % 2 != first_block));
    assert_eq!(switch, 15);
}

#[test]
fn idm_pixels_by_formula() {
    let dm = three_point();
    let px = idm_pixels(&dm, &[0, 1, 2]).unwrap();
    let want: Vec<u8> = [0.0, 1.0, 5.0, 1.0, 0.0, 4.0, 5.0, 4.0, 0.0]
        .iter()
        .map(|&x: &f64| (255.0 * (1.0 - x / 5.0)).round() as u8)
        .collect();
    assert_eq!(px, want);
    assert_eq!(px, vec![255, 204, 0, 204, 255, 51, 0, 51, 255]);

    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nested/idm.pgm");
    render_idm(&dm, &[0, 1, 2], &path).unwrap();
    let bytes = std::fs::read(&path).unwrap();
    let mut expected = b"P5\n3 3\n255\n".to_vec();
    expected.extend(&want);
    assert_eq!(bytes, expected);

    let zero = DissimilarityMatrix::from_rows(&[vec![0.0; 3], vec![0.0; 3], vec![0.0; 3]]).unwrap();
    assert!(idm_pixels(&zero, &[2, 0, 1])
        .unwrap()
        .iter()
        .all(|&p| p == 255));
    assert!(idm_pixels(&dm, &[0, 0, 1]).is_err());
}

#[test]
fn idm_blocks_brighter_inside() {
    let mut rng = ChaCha8Rng::seed_from_u64(24);
    let dm = euclidean_matrix(&planted_blobs(&mut rng, 20, 15.0));
    let order = vat_order(&dm);
    let px = idm_pixels(&dm, &order).unwrap();
    let block: Vec<usize> = order.iter().map(|&i| i % 2).collect();
    let (mut inside, mut ni, mut across, mut na) = (0.0, 0, 0.0, 0);
    for a in 0..20 {
        for b in 0..20 {
            let p = px[a * 20 + b] as f64;
            if block[a] == block[b] {
                inside += p;
                ni += 1;
            } else {
                across += p;
                na += 1;
            }
        }
    }
    // similar pairs are bright under 255·(1 − d/max)
    assert!(inside / ni as f64 > across / na as f64);
}

fn rows_strategy() -> impl Strategy<Value = Vec<Vec<f64>>> {
    (3usize..12, 2usize..6).prop_flat_map(|(n, p)| {
        proptest::collection::vec(proptest::collection::vec(-100.0f64..100.0, p), n)
    })
}

proptest! {
    #[test]
    fn matrices_are_symmetric_nonnegative(rows in rows_strategy(), m in 0usize..4) {
        let (s, _) = matrix(rows).standardize().unwrap();
        let dm = build_dissimilarity_matrix(&s, DistanceMethod::ALL[m]).unwrap();
        for i in 0..dm.len() {
            prop_assert_eq!(dm.get(i, i), 0.0);
            for j in 0..dm.len() {
                prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                prop_assert!(dm.get(i, j) >= 0.0);
            }
        }
        let order = vat_order(&dm);
        let mut sorted = order.clone();
        sorted.sort_unstable();
        prop_assert_eq!(sorted, (0..dm.len()).collect::<Vec<_>>());
        prop_assert_eq!(order, vat_order(&dm));
    }

    #[test]
    fn correlation_distances_ignore_positive_affine_maps(
        x in proptest::collection::vec(-10.0f64..10.0, 5),
        y in proptest::collection::vec(-10.0f64..10.0, 5),
        a in 0.1f64..20.0,
        b in -50.0f64..50.0,
    ) {
        let ax: Vec<f64> = x.iter().map(|v| a * v + b).collect();
        for m in [DistanceMethod::Spearman, DistanceMethod::Kendall] {
            // rank ties may differ after rounding only if values collide
            let before = distance(&x, &y, m).unwrap();
            let after = distance(&ax, &y, m).unwrap();
            if average_rank_pattern(&x) == average_rank_pattern(&ax) {
                prop_assert_eq!(before, after);
            }
        }
        let p = distance(&x, &y, DistanceMethod::Pearson).unwrap();
        let q = distance(&ax, &y, DistanceMethod::Pearson).unwrap();
        if !p.flagged {
            prop_assert!((p.value - q.value).abs() <= 1e-12);
        }
    }

    #[test]
    fn euclidean_triangle_inequality(
        x in proptest::collection::vec(-10.0f64..10.0, 4),
        y in proptest::collection::vec(-10.0f64..10.0, 4),
        z in proptest::collection::vec(-10.0f64..10.0, 4),
    ) {
        let e = DistanceMethod::Euclidean;
        prop_assert!(d(&x, &z, e) <= d(&x, &y, e) + d(&y, &z, e) + 1e-9);
    }
}

fn average_rank_pattern(x: &[f64]) -> Vec<f64> {
    egotopo::dissimilarity::average_ranks(x)
}
