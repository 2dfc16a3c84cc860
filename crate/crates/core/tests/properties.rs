use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sigclass::dnn::{
    classify_logits, forward, init_network, sigmoid, sigmoid_cross_entropy, AdamConfig, AdamState, Matrix,
    Prediction,
};
use sigclass::fuse_select::{compute_selection, fuse, FusionWeights, SpectrumRow};
use sigclass::spectral::Spectrum;
use sigclass::synthgen::{
    build_group_profiles, standard_roster, synthesize_recording, Group, SensorChannel, SensorKind, SpectralLine,
    TargetProfile,
};
use sigclass::trainer::{evaluate, split, train, Dataset, TrainConfig};

fn spectra(values: &[Vec<f64>]) -> Vec<Spectrum> {
    values
        .iter()
        .enumerate()
        .map(|(j, bins)| Spectrum {
            channel_id: format!("c{j}"),
            label: "L".into(),
            bins: bins.clone(),
        })
        .collect()
}

fn weights(ws: &[f64]) -> FusionWeights {
    let ids: Vec<String> = (0..ws.len()).map(|j| format!("c{j}")).collect();
    let mut w = FusionWeights::uniform(&ids);
    w.weights = ids.into_iter().zip(ws.iter().copied()).collect();
    w
}

/// Two-to-four classes, each with a few hot bins, plus noise.
fn class_rows(seed: u64, classes: usize, per_class: usize) -> Vec<SpectrumRow> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    for c in 0..classes {
        let hot: Vec<usize> = (0..4).map(|k| 20 + 60 * c + 7 * k).collect();
        for _ in 0..per_class {
            let mut bins: Vec<f64> = (0..300).map(|_| rng.random_range(0.5..1.5)).collect();
            for &h in &hot {
                bins[h] += rng.random_range(4.0..8.0);
            }
            rows.push(SpectrumRow {
                bins,
                label: format!("K{c}"),
            });
        }
    }
    rows
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn fusion_is_convex(
        vals in prop::collection::vec(prop::collection::vec(0.0f64..100.0, 300), 1..5),
        ws in prop::collection::vec(0.01f64..10.0, 5),
    ) {
        let n = vals.len();
        let row = fuse(&spectra(&vals), &weights(&ws[..n])).unwrap();
        for i in 0..300 {
            let lo = vals.iter().map(|v| v[i]).fold(f64::INFINITY, f64::min);
            let hi = vals.iter().map(|v| v[i]).fold(0.0, f64::max);
            prop_assert!(row.bins[i] >= lo * (1.0 - 1e-12) && row.bins[i] <= hi * (1.0 + 1e-12));
        }
    }

    #[test]
    fn fusion_is_scale_equivariant(
        vals in prop::collection::vec(prop::collection::vec(0.0f64..100.0, 300), 1..4),
        c in 0.001f64..1000.0,
    ) {
        let n = vals.len();
        let w = weights(&vec![1.0; n]);
        let base = fuse(&spectra(&vals), &w).unwrap();
        let scaled_in: Vec<Vec<f64>> = vals.iter().map(|v| v.iter().map(|x| x * c).collect()).collect();
        let scaled = fuse(&spectra(&scaled_in), &w).unwrap();
        for (a, b) in base.bins.iter().zip(&scaled.bins) {
            prop_assert!((a * c - b).abs() <= 1e-9 * (1.0 + b.abs()));
        }
    }

    #[test]
    fn selection_is_scale_invariant_and_stable(seed in 0u64..1000, classes in 2usize..5) {
        let rows = class_rows(seed, classes, 12);
        let (mask, _) = compute_selection(&rows, 1.75, classes - 1).unwrap();
        let (again, _) = compute_selection(&rows, 1.75, classes - 1).unwrap();
        prop_assert_eq!(&mask, &again);
        let scaled: Vec<SpectrumRow> = rows
            .iter()
            .map(|r| SpectrumRow { bins: r.bins.iter().map(|v| v * 1e3).collect(), label: r.label.clone() })
            .collect();
        let (mask_scaled, _) = compute_selection(&scaled, 1.75, classes - 1).unwrap();
        prop_assert_eq!(mask, mask_scaled);
    }

    #[test]
    fn loss_is_nonnegative(z in -1e4f64..1e4, y in prop::bool::ANY) {
        let l = sigmoid_cross_entropy(z, f64::from(u8::from(y)));
        prop_assert!(l >= 0.0 && l.is_finite());
    }

    #[test]
    fn permuting_batch_permutes_logits(seed in 0u64..500) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let p = init_network(6, 3, seed).unwrap();
        let rows: Vec<Vec<f64>> = (0..7).map(|_| (0..6).map(|_| rng.random_range(-2.0..2.0)).collect()).collect();
        let mut perm: Vec<usize> = (0..7).collect();
        for i in (1..7).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        let permuted: Vec<Vec<f64>> = perm.iter().map(|&i| rows[i].clone()).collect();
        let a = forward(&p, &Matrix::from_rows(&rows).unwrap()).unwrap().logits;
        let b = forward(&p, &Matrix::from_rows(&permuted).unwrap()).unwrap().logits;
        for (k, &i) in perm.iter().enumerate() {
            prop_assert_eq!(a.row(i), b.row(k));
        }
    }

    #[test]
    fn class_prediction_means_exact_one_hot(logits in prop::collection::vec(-10.0f64..10.0, 2..8)) {
        let rounded: Vec<u8> = logits.iter().map(|&z| u8::from(sigmoid(z) > 0.5)).collect();
        match classify_logits(&logits) {
            Prediction::Class(k) => {
                let mut expect = vec![0u8; logits.len()];
                expect[k] = 1;
                prop_assert_eq!(rounded, expect);
            }
            Prediction::Unclassified => prop_assert_ne!(rounded.iter().map(|&v| v as usize).sum::<usize>(), 1),
        }
    }

    #[test]
    fn split_partitions_rows(n in 2usize..300, seed in 0u64..1000, frac in 0.05f64..0.95) {
        let rows: Vec<SpectrumRow> = (0..n)
            .map(|i| SpectrumRow { bins: vec![i as f64; 300], label: format!("L{}", i % 3) })
            .collect();
        let ds = Dataset::new(rows);
        let cfg = TrainConfig { seed, train_fraction: frac, ..TrainConfig::default() };
        let s = split(&ds, &cfg).unwrap();
        prop_assert_eq!(s.train.len(), (frac * n as f64).round() as usize);
        let mut all: Vec<usize> = s.train.iter().chain(&s.test).copied().collect();
        all.sort_unstable();
        prop_assert_eq!(all, (0..n).collect::<Vec<_>>());
        prop_assert_eq!(&s, &split(&ds, &cfg).unwrap());
    }
}

#[test]
fn adam_descends_on_convex_toy() {
    // Single linear layer with sigmoid cross-entropy, full batch.
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (n, d, c) = (40, 5, 3);
    let x: Vec<Vec<f64>> = (0..n).map(|_| (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()).collect();
    let y: Vec<usize> = (0..n).map(|_| rng.random_range(0..c)).collect();
    let mut w = vec![0.0; c * d];
    let mut b = vec![0.0; c];
    let loss_and_grad = |w: &[f64], b: &[f64]| {
        let mut gw = vec![0.0; c * d];
        let mut gb = vec![0.0; c];
        let mut total = 0.0;
        let scale = 1.0 / (n * c) as f64;
        for (xi, &yi) in x.iter().zip(&y) {
            for k in 0..c {
                let z: f64 = b[k] + (0..d).map(|j| w[k * d + j] * xi[j]).sum::<f64>();
                let t = if k == yi { 1.0 } else { 0.0 };
                total += sigmoid_cross_entropy(z, t);
                let delta = (sigmoid(z) - t) * scale;
                gb[k] += delta;
                for j in 0..d {
                    gw[k * d + j] += delta * xi[j];
                }
            }
        }
        (total * scale, gw, gb)
    };
    let mut state = AdamState::new(AdamConfig::default(), &[c * d, c]);
    let mut prev = f64::INFINITY;
    for step in 0..50 {
        let (l, gw, gb) = loss_and_grad(&w, &b);
        assert!(l < prev, "loss rose at step {step}: {l} >= {prev}");
        prev = l;
        state.step(&mut [&mut w[..], &mut b[..]], &[&gw[..], &gb[..]]).unwrap();
    }
}

#[test]
fn synthesized_energy_matches_lines_plus_noise() {
    let setup = vec![SensorChannel::new("g", SensorKind::Geophone, "x")];
    let p = TargetProfile::new("T", 0.5)
        .with_line("g", SpectralLine::new(40, 1.0, 0.5))
        .with_line("g", SpectralLine::new(90, 0.6, 0.5))
        .with_line("g", SpectralLine::new(250, 0.3, 0.0));
    let rec = synthesize_recording(&p, &setup, 10.0, 2000, 8).unwrap();
    let ms = rec.samples[0].iter().map(|x| x * x).sum::<f64>() / rec.len() as f64;
    let expected = (1.0 + 0.36 + 0.09) / 2.0 + 0.25;
    assert!((ms - expected).abs() < 0.05 * expected, "{ms} vs {expected}");
}

#[test]
fn synthesis_is_deterministic() {
    let roster = standard_roster();
    let p = &build_group_profiles(Group::Group1, 3)[2];
    let a = synthesize_recording(p, &roster, 2.0, 1000, 42).unwrap();
    let b = synthesize_recording(p, &roster, 2.0, 1000, 42).unwrap();
    assert_eq!(a, b);
    let bits = |r: &sigclass::synthgen::Recording| -> Vec<u64> {
        r.samples.iter().flatten().map(|v| v.to_bits()).collect()
    };
    assert_eq!(bits(&a), bits(&b));
    assert_ne!(a, synthesize_recording(p, &roster, 2.0, 1000, 43).unwrap());
}

#[test]
fn confusion_conservation_and_unclassified_bound() {
    let rows = class_rows(9, 3, 40);
    let ds = Dataset::new(rows);
    let (mask, _) = compute_selection(&ds.rows, 1.75, 1).unwrap();
    for runs in [1, 5, 40] {
        let cfg = TrainConfig {
            runs,
            batch_size: 30,
            seed: 4,
            ..TrainConfig::default()
        };
        let out = train(&ds, &mask, &cfg).unwrap();
        assert_eq!(out.optimizer.t as usize, runs);
        let test: Vec<SpectrumRow> = out.split.test.iter().map(|&i| ds.rows[i].clone()).collect();
        let ev = evaluate(&out.params, &test, &mask, &ds.label_vocab, true).unwrap();
        assert_eq!(ev.confusion.total(), test.len());
        for (k, label) in ds.label_vocab.iter().enumerate() {
            let actual = test.iter().filter(|r| &r.label == label).count();
            assert_eq!(ev.confusion.row_sum(k), actual);
        }
        let bound = 1.0 - ev.confusion.unclassified() as f64 / test.len() as f64;
        assert!(ev.accuracy <= bound + 1e-12);
        assert_eq!(ev.accuracy, out.log.last().unwrap().test_acc);
    }
}

#[test]
fn training_is_deterministic() {
    let ds = Dataset::new(class_rows(1, 3, 30));
    let (mask, _) = compute_selection(&ds.rows, 1.75, 1).unwrap();
    let cfg = TrainConfig {
        runs: 20,
        batch_size: 40,
        seed: 12,
        ..TrainConfig::default()
    };
    let a = train(&ds, &mask, &cfg).unwrap();
    let b = train(&ds, &mask, &cfg).unwrap();
    assert_eq!(a.log, b.log);
    assert_eq!(a.params, b.params);
}
