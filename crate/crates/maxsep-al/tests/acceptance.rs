#![allow(clippy::needless_range_loop)]

//! Acceptance suite: one test per shipping criterion, each printing a
//! pass line (failures panic with the measured values). The selection and
//! gradient checks run against reference implementations coded in this
//! file, independent of the library's code paths.

use std::path::PathBuf;
use std::sync::Mutex;
use std::time::Instant;

/// Serializes the two CPU-heavy criteria (1 and 7) so the timed geometry
/// scan never races the MNIST training threads for cores.
static HEAVY: Mutex<()> = Mutex::new(());

use maxsep_al::al_loop::{run_experiment, ExperimentConfig, Precision};
use maxsep_al::config::preset;
use maxsep_al::data::{gen_gaussian, make_longtail, ImbalanceSpec};
use maxsep_al::metrics::{aubc, mean_std};
use maxsep_al::model::{init_classifier, Architecture, Classifier};
use maxsep_al::prototypes::{build_prototype_family, build_prototypes, verify_separation, PrototypeMatrix};
use maxsep_al::seeding::{stream_rng, unit_f64, Stream};
use maxsep_al::strategies::{
    score_msal, select_dbal, select_kcenter, select_msal_d, CealSettings, StrategyKind,
    StrategySpec, UncertaintyScores,
};
use ndarray::Array2;

#[test]
fn criterion_01_prototype_geometry_to_256_classes() {
    let _gate = HEAVY.lock().unwrap_or_else(|e| e.into_inner());
    let started = Instant::now();
    for p in build_prototype_family(256).unwrap() {
        let report = verify_separation(&p, 1e-9);
        assert!(
            report.pass,
            "C={}: norm error {}, angle error {}",
            p.num_classes(),
            report.max_norm_error,
            report.max_angle_error
        );
    }
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "geometry scan took {:.3}s, budget is 1s",
        elapsed.as_secs_f64()
    );
    println!(
        "criterion 1 PASS: unit norms and -1/(C-1) cosines within 1e-9 for C in 2..=256 ({:.3}s)",
        elapsed.as_secs_f64()
    );
}

/// Central finite differences over every trainable coordinate, built on
/// the public layer accessors only.
fn finite_difference_grads(
    clf: &mut Classifier<f64>,
    inputs: &Array2<f64>,
    labels: &[usize],
    h: f64,
) -> Vec<(Array2<f64>, Vec<f64>)> {
    let mut out = Vec::new();
    for l in 0..clf.layers().len() {
        let (rows, cols) = {
            let w = &clf.layers()[l].weight;
            (w.nrows(), w.ncols())
        };
        let mut gw = Array2::zeros((rows, cols));
        for i in 0..rows {
            for j in 0..cols {
                let orig = clf.layers()[l].weight[[i, j]];
                clf.layers_mut()[l].weight[[i, j]] = orig + h;
                let up = clf.loss_and_grad(&inputs.view(), labels).unwrap().0;
                clf.layers_mut()[l].weight[[i, j]] = orig - h;
                let down = clf.loss_and_grad(&inputs.view(), labels).unwrap().0;
                clf.layers_mut()[l].weight[[i, j]] = orig;
                gw[[i, j]] = (up - down) / (2.0 * h);
            }
        }
        let mut gb = Vec::new();
        for j in 0..clf.layers()[l].bias.len() {
            let orig = clf.layers()[l].bias[j];
            clf.layers_mut()[l].bias[j] = orig + h;
            let up = clf.loss_and_grad(&inputs.view(), labels).unwrap().0;
            clf.layers_mut()[l].bias[j] = orig - h;
            let down = clf.loss_and_grad(&inputs.view(), labels).unwrap().0;
            clf.layers_mut()[l].bias[j] = orig;
            gb.push((up - down) / (2.0 * h));
        }
        out.push((gw, gb));
    }
    out
}

/// Smallest hidden pre-activation magnitude, recomputed from the public
/// weights; nets with near-zero pre-activations would let the difference
/// step cross a relu kink and invalidate the numeric gradient.
fn min_preactivation(clf: &Classifier<f64>, inputs: &Array2<f64>) -> f64 {
    let mut activ = inputs.clone();
    let mut smallest = f64::INFINITY;
    let layers = clf.layers();
    for (l, layer) in layers.iter().enumerate() {
        let z = activ.dot(&layer.weight) + &layer.bias;
        if l + 1 < layers.len() {
            for &v in z.iter() {
                smallest = smallest.min(v.abs());
            }
            activ = z.mapv(|v| v.max(0.0));
        }
    }
    smallest
}

#[test]
fn criterion_02_gradients_match_finite_differences() {
    let h = 1e-5;
    let mut worst_overall = 0.0f64;
    for trial in 0..20u64 {
        let classes = [3usize, 5, 10][trial as usize % 3];
        let mut attempt = 0u64;
        let (mut clf, inputs, labels) = loop {
            let seed = 1000 + trial + 100_000 * attempt;
            let mut rng = stream_rng(seed, Stream::Data, 0);
            let depth = 1 + (unit_f64(&mut rng) * 3.0) as usize;
            let input_dim = 4 + (unit_f64(&mut rng) * 5.0) as usize;
            let hidden: Vec<usize> =
                (0..depth).map(|_| 3 + (unit_f64(&mut rng) * 5.0) as usize).collect();
            let clf: Classifier<f64> = init_classifier(
                Architecture::new(input_dim, hidden, classes),
                classes,
                0.5 + unit_f64(&mut rng),
                seed,
            )
            .unwrap();
            let inputs =
                Array2::from_shape_fn((8, input_dim), |_| unit_f64(&mut rng) * 4.0 - 2.0);
            let labels: Vec<usize> =
                (0..8).map(|_| (unit_f64(&mut rng) * classes as f64) as usize).collect();
            if min_preactivation(&clf, &inputs) > 1e-3 {
                break (clf, inputs, labels);
            }
            attempt += 1;
            assert!(attempt < 50, "could not find a kink-free net for trial {trial}");
        };

        let (_, analytic) = clf.loss_and_grad(&inputs.view(), &labels).unwrap();
        let numeric = finite_difference_grads(&mut clf, &inputs, &labels, h);

        // relative error with a unit floor: sub-unit gradients are held to
        // the same absolute bar so difference noise cannot dominate
        let rel = |a: f64, b: f64| (a - b).abs() / 1.0f64.max(a.abs()).max(b.abs());
        let mut worst = 0.0f64;
        for (a, (nw, nb)) in analytic.iter().zip(&numeric) {
            for (&x, &y) in a.weight.iter().zip(nw.iter()) {
                worst = worst.max(rel(x, y));
            }
            for (&x, &y) in a.bias.iter().zip(nb) {
                worst = worst.max(rel(x, y));
            }
        }
        assert!(worst <= 1e-5, "trial {trial} (C={classes}): max relative error {worst}");
        worst_overall = worst_overall.max(worst);
    }
    println!(
        "criterion 2 PASS: analytic vs central differences within 1e-5 over 20 trials (worst {worst_overall:.2e})"
    );
}

/// Reference implementations for the selection oracles, written as plain
/// loops over the documented procedures.
mod reference {
    use maxsep_al::prototypes::PrototypeMatrix;
    use maxsep_al::seeding::{pick_index, pick_weighted};
    use ndarray::Array2;
    use rand_chacha::ChaCha8Rng;

    pub fn msal_scores(features: &Array2<f64>, protos: &PrototypeMatrix) -> Vec<f64> {
        let p = protos.values();
        (0..features.nrows())
            .map(|i| {
                let mut norm2 = 0.0;
                for d in 0..features.ncols() {
                    norm2 += features[[i, d]] * features[[i, d]];
                }
                let norm = norm2.sqrt();
                if norm < 1e-12 {
                    return 1.0; // -alpha with alpha = -1
                }
                let mut best = f64::NEG_INFINITY;
                for c in 0..protos.num_classes() {
                    let mut dot = 0.0;
                    for d in 0..features.ncols() {
                        dot += features[[i, d]] * p[[d, c]];
                    }
                    best = best.max(dot / norm);
                }
                -best
            })
            .collect()
    }

    fn ranked(scores: &[f64], pool: &[usize]) -> Vec<usize> {
        let mut order: Vec<usize> = (0..scores.len()).collect();
        order.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(pool[a].cmp(&pool[b])));
        order
    }

    pub fn msal_d(
        features: &Array2<f64>,
        protos: &PrototypeMatrix,
        b: usize,
        beta: usize,
        scores: &[f64],
        pool: &[usize],
    ) -> Vec<usize> {
        let c_total = protos.num_classes();
        let p = protos.values();
        let filtered: Vec<usize> =
            ranked(scores, pool).into_iter().take((beta * b).min(pool.len())).collect();

        // nearest prototype by dot (ties to the lower class), cosine to it
        let assignments: Vec<(usize, f64)> = filtered
            .iter()
            .map(|&pos| {
                let mut best_class = 0;
                let mut best_dot = f64::NEG_INFINITY;
                let mut norm2 = 0.0;
                for d in 0..features.ncols() {
                    norm2 += features[[pos, d]] * features[[pos, d]];
                }
                for c in 0..c_total {
                    let mut dot = 0.0;
                    for d in 0..features.ncols() {
                        dot += features[[pos, d]] * p[[d, c]];
                    }
                    if dot > best_dot {
                        best_dot = dot;
                        best_class = c;
                    }
                }
                let norm = norm2.sqrt();
                let cosine = if norm < 1e-12 { 0.0 } else { best_dot / norm };
                (best_class, cosine)
            })
            .collect();

        let mut taken = vec![false; filtered.len()];
        let mut selection = Vec::new();
        for class in 0..c_total {
            let quota = b / c_total + usize::from(class < b % c_total);
            let mut members: Vec<usize> = (0..filtered.len())
                .filter(|&f| assignments[f].0 == class)
                .collect();
            members.sort_by(|&x, &y| {
                assignments[y]
                    .1
                    .total_cmp(&assignments[x].1)
                    .then(pool[filtered[x]].cmp(&pool[filtered[y]]))
            });
            for &f in members.iter().take(quota) {
                taken[f] = true;
                selection.push(pool[filtered[f]]);
            }
        }
        for f in 0..filtered.len() {
            if selection.len() == b {
                break;
            }
            if !taken[f] {
                taken[f] = true;
                selection.push(pool[filtered[f]]);
            }
        }
        selection
    }

    fn d2(a: &[f64], b: &[f64]) -> f64 {
        let mut acc = 0.0;
        for (x, y) in a.iter().zip(b) {
            acc += (x - y) * (x - y);
        }
        acc
    }

    pub fn kcenter(
        pool_features: &Array2<f64>,
        pool: &[usize],
        labeled: &Array2<f64>,
        b: usize,
    ) -> Vec<usize> {
        let rows: Vec<Vec<f64>> =
            (0..pool_features.nrows()).map(|i| pool_features.row(i).to_vec()).collect();
        let mut covered: Vec<Vec<f64>> =
            (0..labeled.nrows()).map(|i| labeled.row(i).to_vec()).collect();
        let mut claimed = vec![false; rows.len()];
        let mut out = Vec::new();
        for _ in 0..b {
            let mut far = None;
            let mut far_d = f64::NEG_INFINITY;
            for (i, row) in rows.iter().enumerate() {
                if claimed[i] {
                    continue;
                }
                let mut nearest = f64::INFINITY;
                for c in &covered {
                    nearest = nearest.min(d2(row, c));
                }
                if nearest > far_d {
                    far_d = nearest;
                    far = Some(i);
                }
            }
            let pick = far.unwrap();
            claimed[pick] = true;
            covered.push(rows[pick].clone());
            out.push(pool[pick]);
        }
        out
    }

    /// k-means++ seeding, Lloyd with ties to the lower center, empty
    /// clusters frozen, 100 iterations or relative inertia change below
    /// 1e-4, then nearest-unclaimed mapping per centroid.
    pub fn kmeans(
        features: &Array2<f64>,
        pool: &[usize],
        k: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<usize> {
        let n = pool.len();
        let dim = features.ncols();
        let row = |i: usize| -> Vec<f64> { (0..dim).map(|d| features[[i, d]]).collect() };

        let mut centers: Vec<Vec<f64>> = vec![row(pick_index(rng, n))];
        let mut dist2: Vec<f64> = (0..n).map(|i| d2(&row(i), &centers[0])).collect();
        while centers.len() < k {
            let total: f64 = dist2.iter().sum();
            let next = if total > 0.0 {
                pick_weighted(rng, &dist2)
            } else {
                pick_index(rng, n)
            };
            let center = row(next);
            for i in 0..n {
                let d = d2(&row(i), &center);
                if d < dist2[i] {
                    dist2[i] = d;
                }
            }
            centers.push(center);
        }

        let mut assignment = vec![0usize; n];
        let mut prev: Option<f64> = None;
        for _ in 0..100 {
            let mut inertia = 0.0;
            for i in 0..n {
                let this = row(i);
                let mut best = 0;
                let mut best_d = f64::INFINITY;
                for (j, c) in centers.iter().enumerate() {
                    let d = d2(&this, c);
                    if d < best_d {
                        best_d = d;
                        best = j;
                    }
                }
                assignment[i] = best;
                inertia += best_d;
            }
            if let Some(p) = prev {
                if p == 0.0 || (p - inertia).abs() / p < 1e-4 {
                    break;
                }
            }
            let mut sums = vec![vec![0.0; dim]; k];
            let mut counts = vec![0usize; k];
            for i in 0..n {
                counts[assignment[i]] += 1;
                for d in 0..dim {
                    sums[assignment[i]][d] += features[[i, d]];
                }
            }
            for j in 0..k {
                if counts[j] > 0 {
                    for d in 0..dim {
                        centers[j][d] = sums[j][d] / counts[j] as f64;
                    }
                }
            }
            prev = Some(inertia);
        }

        let mut claimed = vec![false; n];
        let mut out = Vec::new();
        for center in &centers {
            let mut best = None;
            let mut best_d = f64::INFINITY;
            for i in 0..n {
                if claimed[i] {
                    continue;
                }
                let d = d2(&row(i), center);
                if d < best_d {
                    best_d = d;
                    best = Some(i);
                }
            }
            let pick = best.unwrap();
            claimed[pick] = true;
            out.push(pool[pick]);
        }
        out
    }

    pub fn dbal(
        features: &Array2<f64>,
        pool: &[usize],
        scores: &[f64],
        b: usize,
        beta: usize,
        rng: &mut ChaCha8Rng,
    ) -> Vec<usize> {
        let filtered: Vec<usize> =
            ranked(scores, pool).into_iter().take((beta * b).min(pool.len())).collect();
        let sub = Array2::from_shape_fn((filtered.len(), features.ncols()), |(i, j)| {
            features[[filtered[i], j]]
        });
        let sub_pool: Vec<usize> = filtered.iter().map(|&f| pool[f]).collect();
        kmeans(&sub, &sub_pool, b, rng)
    }
}

fn sorted(mut v: Vec<usize>) -> Vec<usize> {
    v.sort_unstable();
    v
}

#[test]
fn criterion_03_selectors_match_reference_implementations() {
    for trial in 0..100u64 {
        let mut rng = stream_rng(3000 + trial, Stream::Data, 0);
        let classes = 2 + (unit_f64(&mut rng) * 3.0) as usize; // 2..=4
        let dim = classes - 1;
        let n = 5 + (unit_f64(&mut rng) * 46.0) as usize; // 5..=50
        let b = 1 + (unit_f64(&mut rng) * 8.0).min((n - 1) as f64) as usize; // 1..=min(8, n)
        let beta = 1 + (unit_f64(&mut rng) * 3.0) as usize; // 1..=3
        let protos = build_prototypes(classes).unwrap();
        let features = Array2::from_shape_fn((n, dim), |_| unit_f64(&mut rng) * 6.0 - 3.0);
        let pool: Vec<usize> = (0..n).map(|i| i * 2 + 3).collect();
        let labeled = Array2::from_shape_fn((3, dim), |_| unit_f64(&mut rng) * 6.0 - 3.0);

        let scores = score_msal(&features, &pool, &protos).unwrap();
        let ref_scores = reference::msal_scores(&features, &protos);
        for (a, b) in scores.scores.iter().zip(&ref_scores) {
            assert_eq!(a.to_bits(), b.to_bits(), "trial {trial}: scoring paths diverged");
        }

        let got = select_msal_d(&features, &protos, b, beta, &scores).unwrap();
        let want = reference::msal_d(&features, &protos, b, beta, &ref_scores, &pool);
        assert_eq!(sorted(got), sorted(want), "trial {trial}: msal_d diverged");

        let got = select_kcenter(&features, &pool, &labeled, b).unwrap();
        let want = reference::kcenter(&features, &pool, &labeled, b);
        assert_eq!(sorted(got), sorted(want), "trial {trial}: kcenter diverged");

        let mut rng_impl = stream_rng(7000 + trial, Stream::Select, 0);
        let mut rng_ref = rng_impl.clone();
        let got = select_dbal(&features, b, beta, &scores, &mut rng_impl).unwrap();
        let want = reference::dbal(&features, &pool, &ref_scores, b, beta, &mut rng_ref);
        assert_eq!(sorted(got), sorted(want), "trial {trial}: dbal diverged");
    }
    println!(
        "criterion 3 PASS: msal_d, kcenter and dbal match their reference implementations on 100 pools"
    );
}

#[test]
fn criterion_04_aubc_oracle_and_invariants() {
    // hand-computed curves, exact
    assert_eq!(aubc(&[(0.0, 0.7), (50.0, 0.7), (75.0, 0.7)]).unwrap(), 0.7);
    assert_eq!(aubc(&[(0.0, 0.0), (200.0, 1.0)]).unwrap(), 0.5);
    assert_eq!(aubc(&[(0.0, 0.2), (100.0, 0.6), (200.0, 0.8)]).unwrap(), 0.55);

    let mut rng = stream_rng(4, Stream::Data, 0);
    for trial in 0..100 {
        let n = 2 + (unit_f64(&mut rng) * 12.0) as usize;
        let mut x = 0.0;
        let mut base = Vec::with_capacity(n);
        let mut above = Vec::with_capacity(n);
        for _ in 0..n {
            x += 0.5 + unit_f64(&mut rng) * 40.0;
            let y = unit_f64(&mut rng) * 0.7;
            base.push((x, y));
            above.push((x, y + unit_f64(&mut rng) * 0.3));
        }
        let a = aubc(&base).unwrap();
        let b = aubc(&above).unwrap();
        assert!(b >= a, "trial {trial}: dominating curve scored below");
        assert!((0.0..=1.0).contains(&a));

        let scale = 3.0 + unit_f64(&mut rng) * 100.0;
        let rescaled: Vec<(f64, f64)> = base.iter().map(|&(x, y)| (x * scale, y)).collect();
        let c = aubc(&rescaled).unwrap();
        assert!((a - c).abs() <= 1e-12, "trial {trial}: rescaling moved {a} to {c}");
    }
    println!("criterion 4 PASS: hand curves exact; dominance and rescaling hold on 100 random curves");
}

#[test]
fn criterion_05_runs_are_bit_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let config_path = dir.path().join("exp.conf");
    std::fs::write(
        &config_path,
        "[dataset]\nkind = gaussian\nclasses = 3\ndim = 2\nper_class = 80\nseparation = 2.0\n\
         [al]\ninitial = 12\nbatch = 6\nbudget = 36\nstrategy = msal_d\nbeta = 3\n\
         [model]\nhidden_dims = 8\nepochs = 4\n\
         [run]\nseeds = 0,1\nname = det\n",
    )
    .unwrap();

    // two passes of the *same* config into the same out_dir; the first
    // pass is snapshotted aside before --force overwrites it
    let out = dir.path().join("out");
    let snapshot = dir.path().join("first-pass");
    maxsep_al::cli::cmd_run(&config_path, Some(out.clone()), false, None, None, Some(1)).unwrap();
    std::fs::create_dir_all(&snapshot).unwrap();
    for seed in [0, 1] {
        for file in ["query_log.csv", "summary.json"] {
            std::fs::copy(
                out.join(format!("det-seed{seed}/{file}")),
                snapshot.join(format!("seed{seed}-{file}")),
            )
            .unwrap();
        }
    }
    maxsep_al::cli::cmd_run(&config_path, Some(out.clone()), true, None, None, Some(1)).unwrap();

    for seed in [0, 1] {
        let log_a = std::fs::read(snapshot.join(format!("seed{seed}-query_log.csv"))).unwrap();
        let log_b = std::fs::read(out.join(format!("det-seed{seed}/query_log.csv"))).unwrap();
        assert_eq!(log_a, log_b, "seed {seed}: query logs differ between identical runs");

        let strip = |path: PathBuf| -> serde_json::Value {
            let mut value: serde_json::Value =
                serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap();
            value.as_object_mut().unwrap().remove("total_seconds");
            value
        };
        let sum_a = strip(snapshot.join(format!("seed{seed}-summary.json")));
        let sum_b = strip(out.join(format!("det-seed{seed}/summary.json")));
        assert_eq!(sum_a, sum_b, "seed {seed}: summaries differ beyond wall time");
    }
    println!("criterion 5 PASS: identical config+seed gives bit-identical query logs and summaries");
}

#[test]
fn criterion_06_budget_ledger_is_exact() {
    let ds = gen_gaussian(4, 3, 60, 2.5, 0.2, 61).unwrap();
    for kind in [
        StrategyKind::Random,
        StrategyKind::Entropy,
        StrategyKind::MsalD,
        StrategyKind::Kcenter,
    ] {
        let cfg = ExperimentConfig {
            initial_labeled: 16,
            batch: 8,
            budget: 48,
            strategy: StrategySpec::new(kind).with_beta(2),
            hidden_dims: vec![8],
            rho: 1.0,
            epochs: 3,
            minibatch_size: 16,
            learning_rate: 0.01,
            warm_start: false,
            precision: Precision::F64,
            seed: 5,
            eval_every: 1,
        };
        let (_, state) = run_experiment(&cfg, &ds).unwrap();
        assert_eq!(state.labeled.len(), 16 + 48, "{kind:?}: |L_T| != #i + Q");
        assert_eq!(state.budget_used, 48);
        let mut seen = std::collections::BTreeSet::new();
        for round in 0..cfg.rounds() {
            let picks: Vec<usize> = state
                .query_log
                .iter()
                .filter(|r| r.round == round)
                .map(|r| r.pool_index)
                .collect();
            assert_eq!(picks.len(), 8, "{kind:?} round {round}: additions != b");
            for i in picks {
                assert!(seen.insert(i), "{kind:?}: queried {i} twice");
            }
        }
    }

    // an admissive CEAL wrapper attaches pseudo-labels without touching the ledger
    let ceal_cfg = ExperimentConfig {
        initial_labeled: 16,
        batch: 8,
        budget: 48,
        strategy: StrategySpec::new(StrategyKind::Entropy)
            .with_source(maxsep_al::strategies::UncertaintySource::Entropy)
            .with_ceal(CealSettings { delta0: 0.9, decay_rate: 0.0 }),
        hidden_dims: vec![8],
        rho: 1.0,
        epochs: 3,
        minibatch_size: 16,
        learning_rate: 0.01,
        warm_start: false,
        precision: Precision::F64,
        seed: 5,
        eval_every: 1,
    };
    let (_, state) = run_experiment(&ceal_cfg, &ds).unwrap();
    assert!(!state.pseudo_labeled.is_empty(), "wrapper never fired; weak test");
    assert_eq!(state.labeled.len(), 16 + 48);
    assert_eq!(state.budget_used, 48);
    for &(i, _) in &state.pseudo_labeled {
        assert!(!state.labeled.contains(&i), "pseudo-label {i} leaked into L");
    }
    println!("criterion 6 PASS: |L_T| = #i + Q, per-round additions b, disjoint queries, CEAL off-ledger");
}

fn mnist_dir() -> PathBuf {
    if let Ok(dir) = std::env::var(maxsep_al::config::DATA_DIR_ENV) {
        return PathBuf::from(dir);
    }
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data")
}

#[test]
fn criterion_07_mnist_desk_directional_check() {
    let _gate = HEAVY.lock().unwrap_or_else(|e| e.into_inner());
    let data_dir = mnist_dir();
    assert!(
        data_dir.join("mnist").exists() || data_dir.join("train-images-idx3-ubyte").exists()
            || data_dir.join("train-images-idx3-ubyte.gz").exists(),
        "MNIST IDX files not found under {} — see README for setup, or set ${}",
        data_dir.display(),
        maxsep_al::config::DATA_DIR_ENV,
    );

    let started = Instant::now();
    let base = preset("mnist-desk").unwrap();
    let dataset = base.load_dataset(Some(&data_dir)).unwrap();

    let strategies = [StrategyKind::Random, StrategyKind::Msal, StrategyKind::MsalD];
    let jobs: Vec<(StrategyKind, u64)> = strategies
        .iter()
        .flat_map(|&kind| [0u64, 1, 2].map(|seed| (kind, seed)))
        .collect();

    let mut aubcs: std::collections::BTreeMap<&'static str, Vec<f64>> = Default::default();
    for wave in jobs.chunks(3) {
        let results: Vec<(&'static str, f64)> = std::thread::scope(|scope| {
            let handles: Vec<_> = wave
                .iter()
                .map(|&(kind, seed)| {
                    let mut cfg = base.experiment(seed);
                    cfg.strategy = StrategySpec::new(kind).with_beta(5);
                    let dataset = &dataset;
                    scope.spawn(move || {
                        let (result, _) = run_experiment(&cfg, dataset).unwrap();
                        (kind.name(), result.aubc)
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().unwrap()).collect()
        });
        for (name, aubc) in results {
            aubcs.entry(name).or_default().push(aubc);
        }
    }

    let mean = |name: &str| mean_std(&aubcs[name]).0;
    let (random, msal, msal_d) = (mean("random"), mean("msal"), mean("msal_d"));
    let elapsed = started.elapsed().as_secs_f64();

    assert!(
        msal_d >= random - 0.005,
        "mean AUBC msal_d {msal_d:.4} fell more than 0.005 below random {random:.4}"
    );
    assert!(
        msal >= random - 0.01,
        "mean AUBC msal {msal:.4} fell more than 0.01 below random {random:.4}"
    );
    assert!(elapsed < 300.0, "desk-scale check took {elapsed:.0}s, budget is 300s");
    println!(
        "criterion 7 PASS: mean AUBC random {random:.4}, msal {msal:.4}, msal_d {msal_d:.4} ({elapsed:.0}s)"
    );
}

#[test]
fn criterion_08_longtail_profile() {
    let ds = gen_gaussian(10, 9, 5_000, 1.0, 0.0, 80).unwrap();
    let lt = make_longtail(&ds, &ImbalanceSpec::exponential(0.01), 1).unwrap();
    let mut counts = [0usize; 10];
    for &y in &lt.train_labels {
        counts[y] += 1;
    }
    let (min, max) = (counts.iter().min().unwrap(), counts.iter().max().unwrap());
    assert_eq!(*max, 5_000);
    assert_eq!(*min, 50); // round(5000 * 0.01)
    assert_eq!(*min as f64 / *max as f64, 0.01);
    for (c, &count) in counts.iter().enumerate() {
        let expect = (5_000.0 * 0.01f64.powf(c as f64 / 9.0)).round() as usize;
        assert_eq!(count, expect, "class {c} off the exponential profile");
    }

    let identity = make_longtail(&ds, &ImbalanceSpec::exponential(1.0), 1).unwrap();
    assert_eq!(identity.train_inputs, ds.train_inputs);
    assert_eq!(identity.train_labels, ds.train_labels);
    println!("criterion 8 PASS: mu=0.01 ratio exactly 0.01 on the exponential profile; mu=1 is identity");
}

#[test]
fn criterion_09_degenerate_ceal_equals_plain_msal() {
    let ds = gen_gaussian(3, 2, 70, 2.0, 0.2, 90).unwrap();
    let plain = ExperimentConfig {
        initial_labeled: 12,
        batch: 6,
        budget: 36,
        strategy: StrategySpec::new(StrategyKind::Msal),
        hidden_dims: vec![8],
        rho: 1.0,
        epochs: 4,
        minibatch_size: 16,
        learning_rate: 0.01,
        warm_start: false,
        precision: Precision::F64,
        seed: 17,
        eval_every: 1,
    };
    let mut wrapped = plain.clone();
    wrapped.strategy = StrategySpec::new(StrategyKind::Msal).with_ceal(CealSettings {
        delta0: 1e-12, // alpha > 1 - 1e-12 never holds on trained features
        decay_rate: 0.0,
    });

    let (result_p, state_p) = run_experiment(&plain, &ds).unwrap();
    let (result_w, state_w) = run_experiment(&wrapped, &ds).unwrap();
    assert!(state_w.pseudo_labeled.is_empty(), "threshold unexpectedly admitted pseudo-labels");
    assert_eq!(state_p.query_log, state_w.query_log, "wrapper changed the query log");
    assert_eq!(result_p.aubc.to_bits(), result_w.aubc.to_bits());
    println!("criterion 9 PASS: CEAL(msal) with an inadmissible threshold reproduces plain msal queries");
}

#[test]
fn criterion_10_score_scale_invariance_and_zero_norm() {
    let mut rng = stream_rng(100, Stream::Data, 0);
    for classes in [2usize, 3, 4, 10] {
        let protos: PrototypeMatrix = build_prototypes(classes).unwrap();
        let n = 40;
        let mut features = Array2::from_shape_fn((n, classes - 1), |_| unit_f64(&mut rng) * 8.0 - 4.0);
        for d in 0..classes - 1 {
            features[[7, d]] = 0.0; // plant a zero-norm row
        }
        let pool: Vec<usize> = (0..n).collect();
        let base = score_msal(&features, &pool, &protos).unwrap();

        for t in [1e-3, 1.0, 1e3] {
            let scaled = features.mapv(|v| v * t);
            let after: UncertaintyScores = score_msal(&scaled, &pool, &protos).unwrap();
            for (i, (a, b)) in base.scores.iter().zip(&after.scores).enumerate() {
                assert!(
                    (a - b).abs() <= 1e-12,
                    "C={classes}, t={t}, row {i}: {a} vs {b}"
                );
            }
        }

        // the zero-norm row scores as the most uncertain possible value
        assert_eq!(base.scores[7], 1.0);
        assert!(base.scores.iter().all(|&s| s <= base.scores[7]));
    }
    println!("criterion 10 PASS: scores invariant to feature scale within 1e-12; zero-norm rows maximal");
}
