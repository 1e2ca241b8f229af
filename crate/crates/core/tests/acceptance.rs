//! Acceptance suite. Prints one PASS/FAIL line per criterion and exits
//! non-zero if any criterion fails.

mod common;

use std::process::Command;
use std::time::{Duration, Instant};

use gridnav::agent::{rollout_policy, run_training, EpisodeRecord, TrainConfig, TrainingRun};
use gridnav::baselines::{astar, dijkstra};
use gridnav::experiments::{
    corpus_train_config, eval_all_starts, eval_fixed_start, generate_noise_corpus,
    run_noise_experiment, NoiseCorpusSpec, DEFAULT_EVAL_STEP_CAP,
};
use gridnav::gridworld::canonical_map;
use gridnav::neuralnet::{NetworkArch, NetworkParams};
use gridnav::reward::{shaped_reward, RewardParams, RewardTerms};
use gridnav::{Action, GridMap, Position};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const SEEDS: [u64; 3] = [7, 11, 13];
const CORPUS_SEED: u64 = 7;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn secs(d: Duration) -> f64 {
    d.as_secs_f64()
}

fn criterion_1() -> Outcome {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut maps = vec![canonical_map()];
    maps.extend((0..200).map(|_| common::random_solvable_map(&mut rng, 20, 20, 0.3)));
    let mut worst = 0.0f64;
    for map in &maps {
        let a = astar(map, map.start()).unwrap().length;
        let d = dijkstra(map, map.start()).unwrap().length;
        worst = worst.max((a - d).abs());
    }
    let el = t.elapsed();
    outcome(
        worst <= 1e-9 && el < Duration::from_secs(10),
        format!(
            "{} maps, max |astar - dijkstra| = {worst:.1e}, {:.2}s",
            maps.len(),
            secs(el)
        ),
    )
}

fn criterion_2() -> Outcome {
    let t = Instant::now();
    let arch = NetworkArch::default();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let h = 1e-5;
    let mut worst = 0.0f64;
    let mut checked = 0usize;
    for _ in 0..50 {
        let mut net = NetworkParams::init(arch, rng.gen()).unwrap();
        for b in net
            .weights
            .conv_b
            .iter_mut()
            .chain(net.weights.fc_b.iter_mut())
        {
            *b = rng.gen_range(-0.3..0.3);
        }
        let x: Vec<f64> = (0..arch.input_size())
            .map(|_| [0.0, 0.0, 0.0, -1.0, 1.0, 0.5][rng.gen_range(0..6)])
            .collect();
        let a = Action::from_slot(rng.gen_range(0..8));
        let y = rng.gen_range(-10.0..10.0);
        let grads = net.backward(&x, a, y).unwrap();
        let loss = |net: &NetworkParams| {
            let q = net.forward(&x).unwrap()[a.slot()];
            (y - q) * (y - q)
        };
        // Every conv weight and bias, plus a sample of the output layer.
        let n_conv = net.weights.conv_w.len() + net.weights.conv_b.len();
        let mut indices: Vec<usize> = (0..n_conv).collect();
        indices.extend((0..40).map(|_| rng.gen_range(n_conv..net.weights.len())));
        for i in indices {
            let orig = net.weights.get(i).unwrap();
            *net.weights.get_mut(i).unwrap() = orig + h;
            let up = loss(&net);
            *net.weights.get_mut(i).unwrap() = orig - h;
            let down = loss(&net);
            *net.weights.get_mut(i).unwrap() = orig;
            let numeric = (up - down) / (2.0 * h);
            let analytic = grads.get(i).unwrap();
            let rel = (numeric - analytic).abs() / numeric.abs().max(analytic.abs()).max(1e-8);
            worst = worst.max(rel);
            checked += 1;
        }
    }
    let el = t.elapsed();
    outcome(
        worst <= 1e-4 && el < Duration::from_secs(30),
        format!(
            "50 instances, {checked} weights, max relative error {worst:.2e}, {:.2}s",
            secs(el)
        ),
    )
}

fn criterion_3() -> Outcome {
    let params = RewardParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut p = || Position::new(rng.gen_range(0..20), rng.gen_range(0..20));
    let mut max_beta = f64::NEG_INFINITY;
    for _ in 0..100_000 {
        let (s, prev) = (p(), p());
        let curr = loop {
            let c = p();
            if c != prev {
                break c;
            }
        };
        let beta =
            params.beta * RewardTerms::new(s, Position::new(0, 0), prev, curr).straightness();
        max_beta = max_beta.max(beta);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(33);
    let mut max_collinear = 0.0f64;
    for _ in 0..100_000 {
        let s = Position::new(rng.gen_range(-20..20), rng.gen_range(-20..20));
        let (dx, dy) = loop {
            let d = (rng.gen_range(-3..=3), rng.gen_range(-3..=3));
            if d != (0, 0) {
                break d;
            }
        };
        let k = rng.gen_range(0..8);
        let m = k + rng.gen_range(1..4);
        let prev = s.offset(k * dx, k * dy);
        let curr = s.offset(m * dx, m * dy);
        let beta =
            params.beta * RewardTerms::new(s, Position::new(0, 0), prev, curr).straightness();
        max_collinear = max_collinear.max(beta.abs());
    }
    outcome(
        max_beta <= 1e-12 && max_collinear < 1e-9,
        format!("max beta term {max_beta:.2e} over 100000 triples; max |beta| when collinear {max_collinear:.1e}"),
    )
}

fn criterion_4() -> Outcome {
    // Oracle written out directly from the distance definitions.
    let d = |a: (f64, f64), b: (f64, f64)| ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt();
    let oracle = |s, e, prev, curr| {
        0.6 * (d(prev, e) - d(curr, e)) + 0.4 * (d(curr, s) - d(prev, s) - d(prev, curr))
    };
    let p = Position::new;
    let params = RewardParams::default();
    let cases = [
        (
            ((0.0, 0.0), (10.0, 10.0), (2.0, 2.0), (3.0, 3.0)),
            [p(0, 0), p(10, 10), p(2, 2), p(3, 3)],
            0.84853,
        ),
        (
            ((0.0, 0.0), (10.0, 0.0), (5.0, 0.0), (5.0, 1.0)),
            [p(0, 0), p(10, 0), p(5, 0), p(5, 1)],
            -0.41980,
        ),
    ];
    let mut pass = true;
    let mut parts = Vec::new();
    for ((s, e, a, b), [ps, pe, pa, pb], frozen) in cases {
        let o = oracle(s, e, a, b);
        let got = shaped_reward(&params, ps, pe, pa, pb);
        pass &= (got - frozen).abs() < 1e-5 && (got - o).abs() < 1e-12;
        parts.push(format!("{got:.5} (oracle {o:.5}, expected {frozen})"));
    }
    outcome(pass, parts.join("; "))
}

/// Mean average-reward-per-step over episodes that began in the last fifth
/// of the step budget.
fn late_reward(episodes: &[EpisodeRecord], total_steps: u64) -> f64 {
    let cutoff = total_steps * 4 / 5;
    let mut begun = 0u64;
    let mut late = Vec::new();
    for e in episodes {
        if begun >= cutoff {
            late.push(e.average_reward_per_step);
        }
        begun += e.steps as u64;
    }
    late.iter().sum::<f64>() / late.len().max(1) as f64
}

struct SeedRun {
    seed: u64,
    run: TrainingRun,
    elapsed: Duration,
    reached: bool,
    ratio: Option<f64>,
    late: f64,
}

fn train_seed(map: &GridMap, config: TrainConfig) -> SeedRun {
    let t = Instant::now();
    let run = run_training(map, &config).unwrap();
    let elapsed = t.elapsed();
    let (summary, _) = eval_fixed_start(map, &run.params, DEFAULT_EVAL_STEP_CAP).unwrap();
    SeedRun {
        seed: config.seed,
        late: late_reward(&run.episodes, config.total_train_steps),
        reached: summary.succeeded == 1,
        ratio: summary.mean_path_ratio,
        run,
        elapsed,
    }
}

fn criterion_5(runs: &[SeedRun]) -> Outcome {
    let good = runs
        .iter()
        .filter(|r| r.reached && r.ratio.is_some_and(|x| x <= 1.35))
        .count();
    let slowest = runs.iter().map(|r| r.elapsed).max().unwrap();
    let detail: Vec<String> = runs
        .iter()
        .map(|r| match r.ratio {
            Some(x) => format!("seed {} ratio {x:.3}", r.seed),
            None => format!("seed {} failed", r.seed),
        })
        .collect();
    outcome(
        good >= 2 && slowest <= Duration::from_secs(600),
        format!(
            "{good}/3 within 1.35x of A*: {}; slowest seed {:.1}s",
            detail.join(", "),
            secs(slowest)
        ),
    )
}

fn criterion_6(improved: &[SeedRun], baseline: &[SeedRun]) -> Outcome {
    let failed = baseline.iter().filter(|r| !r.reached).count();
    let mean = |rs: &[SeedRun]| rs.iter().map(|r| r.late).sum::<f64>() / rs.len() as f64;
    let (b, i) = (mean(baseline), mean(improved));
    outcome(
        failed >= 2 && b < i,
        format!(
            "baseline failed {failed}/3; late avg reward/step baseline {b:.4} vs improved {i:.4}"
        ),
    )
}

fn criterion_7(map: &GridMap, improved: &[SeedRun]) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for r in improved {
        let t = Instant::now();
        let s = eval_all_starts(map, &r.run.params, DEFAULT_EVAL_STEP_CAP).unwrap();
        let el = t.elapsed();
        pass &= s.success_rate >= 0.55 && el < Duration::from_secs(30);
        parts.push(format!(
            "seed {} {}/{} = {:.1}% in {:.2}s",
            r.seed,
            s.succeeded,
            s.attempted,
            100.0 * s.success_rate,
            secs(el)
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_8() -> Outcome {
    let t = Instant::now();
    let corpus =
        generate_noise_corpus(&NoiseCorpusSpec::new(canonical_map(), CORPUS_SEED)).unwrap();
    let config = corpus_train_config(CORPUS_SEED);
    let exp = run_noise_experiment(&corpus, &config).unwrap();
    let el = t.elapsed();
    outcome(
        exp.train.success_rate >= 0.75
            && exp.test.success_rate >= 0.50
            && config.total_train_steps <= 150_000
            && el <= Duration::from_secs(45 * 60),
        format!(
            "train {}/{} = {:.1}%, test {}/{} = {:.1}% after {} steps, {:.1}s",
            exp.train.succeeded,
            exp.train.attempted,
            100.0 * exp.train.success_rate,
            exp.test.succeeded,
            exp.test.attempted,
            100.0 * exp.test.success_rate,
            config.total_train_steps,
            secs(el)
        ),
    )
}

fn criterion_9() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_gridnav");
    let dir = tempfile::tempdir().unwrap();
    let outs = [dir.path().join("a"), dir.path().join("b")];
    for out in &outs {
        let status = Command::new(bin)
            .args(["train", "--steps", "10000", "--seed", "7", "--out"])
            .arg(out)
            .output()
            .unwrap();
        if !status.status.success() {
            return outcome(false, String::from_utf8_lossy(&status.stderr).into_owned());
        }
    }
    let same = |f: &str| {
        std::fs::read(outs[0].join(f)).unwrap() == std::fs::read(outs[1].join(f)).unwrap()
    };
    let (ckpt, csv) = (same("checkpoint.bin"), same("episodes.csv"));
    outcome(
        ckpt && csv,
        format!("checkpoint identical: {ckpt}, episode CSV identical: {csv}"),
    )
}

fn criterion_10(map: &GridMap, params: &NetworkParams) -> Outcome {
    let mut worst = Duration::ZERO;
    for _ in 0..5 {
        let t = Instant::now();
        rollout_policy(map, params, map.start(), DEFAULT_EVAL_STEP_CAP).unwrap();
        worst = worst.max(t.elapsed());
    }
    outcome(
        worst < Duration::from_millis(150),
        format!(
            "slowest of 5 fixed-start rollouts {:.3} ms",
            1e3 * secs(worst)
        ),
    )
}

fn report(id: u32, name: &str, o: &Outcome) {
    let tag = if o.pass { "PASS" } else { "FAIL" };
    println!("{tag} [{id:>2}] {name}: {}", o.detail);
}

fn main() {
    let map = canonical_map();
    let mut results = Vec::new();
    let mut run = |id: u32, name: &str, o: Outcome| {
        report(id, name, &o);
        results.push(o.pass);
    };

    run(1, "A* and Dijkstra agree", criterion_1());
    run(2, "gradient matches finite differences", criterion_2());
    run(3, "straightness term geometry", criterion_3());
    run(4, "worked reward values", criterion_4());

    let improved: Vec<SeedRun> = SEEDS
        .iter()
        .map(|&seed| {
            train_seed(
                &map,
                TrainConfig {
                    seed,
                    ..TrainConfig::default()
                },
            )
        })
        .collect();
    let baseline: Vec<SeedRun> = SEEDS
        .iter()
        .map(|&seed| {
            train_seed(
                &map,
                TrainConfig {
                    seed,
                    ..TrainConfig::baseline()
                },
            )
        })
        .collect();
    run(
        5,
        "improved training reaches the end",
        criterion_5(&improved),
    );
    run(
        6,
        "baseline is worse than improved",
        criterion_6(&improved, &baseline),
    );
    run(
        7,
        "success from reachable starts",
        criterion_7(&map, &improved),
    );
    run(8, "noisy-map corpus generalization", criterion_8());
    run(9, "training is deterministic", criterion_9());
    run(
        10,
        "rollout speed",
        criterion_10(&map, &improved[0].run.params),
    );

    let failed = results.iter().filter(|p| !**p).count();
    println!(
        "acceptance: {} passed, {failed} failed",
        results.len() - failed
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
