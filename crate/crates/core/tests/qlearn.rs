use autodrive_core::qlearn::*;
use autodrive_core::sim::*;
use autodrive_core::Result;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const CHAIN_LEN: usize = 5;
const CHAIN_GAMMA: f64 = 0.9;

/// Five-state deterministic chain. Action 0 moves left (state 0 loops on
/// itself for +1), action 1 moves right; moving right out of the last state
/// ends the episode with +12. Episodes are cut after 40 steps.
struct Chain {
    state: usize,
    steps: u32,
    distance: f64,
}

impl Chain {
    fn new() -> Self {
        Self { state: 0, steps: 0, distance: 0.0 }
    }

    fn index(s: usize) -> StateIndex {
        StateIndex([s, 0, 0, 0, 0])
    }

    /// (next state, reward, terminal)
    fn model(s: usize, a: usize) -> (usize, f64, bool) {
        match (s, a) {
            (0, 0) => (0, 1.0, false),
            (s, 0) => (s - 1, 0.0, false),
            (s, _) if s == CHAIN_LEN - 1 => (s, 12.0, true),
            (s, _) => (s + 1, 0.0, false),
        }
    }
}

impl TabularEnv for Chain {
    fn action_count(&self) -> usize {
        2
    }

    fn reset(&mut self) -> Result<StateIndex> {
        *self = Self::new();
        Ok(Self::index(0))
    }

    fn step(&mut self, action: usize) -> Result<Transition> {
        let (next, reward, terminal) = Self::model(self.state, action);
        self.state = next;
        self.steps += 1;
        self.distance += 1.0;
        Ok(Transition { next: Self::index(next), reward, terminal, truncated: !terminal && self.steps >= 40 })
    }

    fn progress(&self) -> Progress {
        Progress { distance: self.distance, checkpoints_hit: 0, laps: 0, steps: self.steps }
    }
}

fn value_iteration() -> [[f64; 2]; CHAIN_LEN] {
    let mut q = [[0.0f64; 2]; CHAIN_LEN];
    loop {
        let mut next = q;
        for (s, row) in next.iter_mut().enumerate() {
            for (a, v) in row.iter_mut().enumerate() {
                let (s2, r, terminal) = Chain::model(s, a);
                let boot = if terminal { 0.0 } else { q[s2][0].max(q[s2][1]) };
                *v = r + CHAIN_GAMMA * boot;
            }
        }
        let delta = (0..CHAIN_LEN)
            .flat_map(|s| (0..2).map(move |a| (s, a)))
            .map(|(s, a)| (next[s][a] - q[s][a]).abs())
            .fold(0.0, f64::max);
        q = next;
        if delta < 1e-14 {
            return q;
        }
    }
}

fn chain_config() -> QConfig {
    QConfig {
        episodes_train: 3000,
        gamma: CHAIN_GAMMA,
        epsilon0: 1.0,
        epsilon_min: 1.0,
        epsilon_decay: 1.0,
        lr0: 0.5,
        lr_min: 0.5,
        lr_decay: 1.0,
        buckets: CHAIN_LEN,
        seed: 4,
        ..QConfig::default()
    }
}

#[test]
fn chain_values_match_value_iteration() {
    let oracle = value_iteration();
    let (q, _) = train_env(&mut Chain::new(), &chain_config()).unwrap();
    for (s, row) in oracle.iter().enumerate() {
        for (a, &want) in row.iter().enumerate() {
            let got = q.get(&Chain::index(s), a);
            assert!((got - want).abs() < 1e-9, "q[{s}][{a}] = {got}, want {want}");
        }
        let greedy = if row[1] > row[0] { 1 } else { 0 };
        assert_eq!(q.argmax(&Chain::index(s)), greedy, "state {s}");
    }
    // the oracle policy is mixed: left near the loop, right near the exit
    assert_eq!(q.argmax(&Chain::index(1)), 0);
    assert_eq!(q.argmax(&Chain::index(3)), 1);
}

#[test]
fn uniform_exploration_passes_chi_square() {
    let q = QTable::new(11, 6, 0);
    let s = StateIndex([0; 5]);
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    let mut counts = [0usize; 6];
    let n = 10_000;
    for _ in 0..n {
        counts[select_action(&q, &s, 1.0, &mut rng)] += 1;
    }
    let expected = n as f64 / 6.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 99th percentile of chi-square with 5 degrees of freedom
    assert!(chi2 < 15.086, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn greedy_choice_and_tie_break() {
    let mut q = QTable::new(11, 6, 0);
    let s = StateIndex([1, 2, 3, 4, 5]);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    assert_eq!(select_action(&q, &s, 0.0, &mut rng), 0);
    for (a, v) in [1.0, 5.0, 2.0].into_iter().enumerate() {
        q.set(&s, a, v);
    }
    assert_eq!(select_action(&q, &s, 0.0, &mut rng), 1);
}

#[test]
fn decay_examples() {
    assert!((decay(0.8, 0.9995, 0.001) - 0.7996).abs() < 1e-12);
    assert_eq!(decay(0.001, 0.9995, 0.001), 0.001);
    assert_eq!(decay(0.37, 1.0, 0.0), 0.37);
}

#[test]
fn reward_examples() {
    let cfg = EnvConfig::default();
    let mut car = CarState::at(Pose::new(0.0, 0.0, 0), &cfg);
    let ev = |cp, fin, crash| StepEvents { crossed_checkpoint: cp, crossed_finish: fin, crashed: crash, truncated: false };
    assert_eq!(step_reward(&ev(true, false, false), &car), 10.0);
    assert_eq!(step_reward(&ev(false, true, false), &car), 60.0);
    assert_eq!(step_reward(&ev(false, false, false), &car), 0.0);
    car.distance = 2000.0;
    assert_eq!(step_reward(&ev(false, false, true), &car), -800.0);
}

fn small_track() -> TrackMap {
    let arch = Archetype::SimpleLoop;
    generate_map(arch, &GenParams::for_archetype(arch), 1).unwrap()
}

#[test]
fn training_is_deterministic_and_decays_monotonically() {
    let track = small_track();
    let env = EnvConfig::default();
    let cfg = QConfig { episodes_train: 40, seed: 9, ..QConfig::default() };
    let (q1, r1) = train(&track, &env, &cfg).unwrap();
    let (q2, r2) = train(&track, &env, &cfg).unwrap();
    assert_eq!(r1, r2);
    assert_eq!(q1, q2);
    assert_eq!(r1.len(), 40);
    for w in r1.windows(2) {
        assert!(w[1].epsilon <= w[0].epsilon && w[1].epsilon >= cfg.epsilon_min);
        assert!(w[1].lr <= w[0].lr && w[1].lr >= cfg.lr_min);
    }
    for r in &r1 {
        assert!(r.steps <= cfg.max_steps);
    }
}

#[test]
fn zero_episodes_leave_the_table_empty() {
    let track = small_track();
    let cfg = QConfig { episodes_train: 0, ..QConfig::default() };
    let (q, records) = train(&track, &EnvConfig::default(), &cfg).unwrap();
    assert!(records.is_empty());
    assert!(q.values().iter().all(|&v| v == 0.0));
}

#[test]
fn evaluation_does_not_touch_the_table() {
    let track = small_track();
    let env = EnvConfig::default();
    let cfg = QConfig { episodes_train: 20, episodes_eval: 100, seed: 2, ..QConfig::default() };
    let (q, _) = train(&track, &env, &cfg).unwrap();
    let before = q.to_bytes();
    let records = evaluate(&q, &track, &env, &cfg).unwrap();
    assert_eq!(records.len(), 100);
    assert_eq!(q.to_bytes(), before);
    assert_eq!(records, evaluate(&q, &track, &env, &cfg).unwrap());
}

#[test]
fn table_file_round_trip_and_shape_checks() {
    let dir = tempfile::tempdir().unwrap();
    let mut q = QTable::new(11, 3, 77);
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    for _ in 0..500 {
        let s = StateIndex(std::array::from_fn(|_| rand::Rng::random_range(&mut rng, 0..11)));
        q.set(&s, rand::Rng::random_range(&mut rng, 0..3), rand::Rng::random_range(&mut rng, -1e3..1e3));
    }
    let path = dir.path().join("q.bin");
    q.save(&path).unwrap();
    let back = QTable::load(&path).unwrap();
    assert_eq!(back.to_bytes(), q.to_bytes());
    assert!(QTable::load_expecting(&path, 11, 6).is_err());
    std::fs::write(dir.path().join("empty.bin"), b"").unwrap();
    assert!(QTable::load(dir.path().join("empty.bin")).is_err());
}

fn state() -> impl Strategy<Value = StateIndex> {
    prop::array::uniform5(0..11usize).prop_map(StateIndex)
}

proptest! {
    #[test]
    fn update_changes_exactly_one_cell(
        s in state(), s2 in state(), a in 0..6usize, r in -2000.0..100.0f64,
        alpha in 0.01..1.0f64, gamma in 0.0..=1.0f64, terminal: bool, seed: u64,
    ) {
        let mut q = QTable::new(11, 6, 0);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..50 {
            let t = StateIndex(std::array::from_fn(|_| rand::Rng::random_range(&mut rng, 0..11)));
            q.set(&t, rand::Rng::random_range(&mut rng, 0..6), rand::Rng::random_range(&mut rng, -10.0..10.0));
        }
        let before = q.values().to_vec();
        let expected = q.get(&s, a) + alpha * (r + gamma * if terminal { 0.0 } else { q.max_value(&s2) } - q.get(&s, a));
        update_q(&mut q, &s, a, r, &s2, alpha, gamma, terminal).unwrap();
        let changed: Vec<usize> = before.iter().zip(q.values()).enumerate()
            .filter(|(_, (x, y))| x.to_bits() != y.to_bits()).map(|(i, _)| i).collect();
        prop_assert!(changed.len() <= 1);
        prop_assert_eq!(q.get(&s, a), expected);
    }

    #[test]
    fn full_step_update_keeps_last_reward(rewards in prop::collection::vec(-1000.0..1000.0f64, 1..20), s in state(), a in 0..6usize) {
        let mut q = QTable::new(11, 6, 0);
        for &r in &rewards {
            update_q(&mut q, &s, a, r, &s, 1.0, 0.0, false).unwrap();
        }
        let last = *rewards.last().unwrap();
        prop_assert!((q.get(&s, a) - last).abs() <= 1e-9 * (1.0 + last.abs()));
    }

    #[test]
    fn discretize_is_monotone(d in prop::array::uniform5(0.0..=300.0f64), bump in 0.0..50.0f64, i in 0..5usize) {
        let a = discretize(&RadarReading { distances: d }, 300.0, 11).unwrap();
        let mut e = d;
        e[i] = (e[i] + bump).min(300.0);
        let b = discretize(&RadarReading { distances: e }, 300.0, 11).unwrap();
        prop_assert!(b.0[i] >= a.0[i]);
        prop_assert!(a.0.iter().all(|&k| k < 11));
    }
}

#[test]
fn discretize_examples() {
    let r = RadarReading { distances: [0.0, 300.0, 150.0, 27.0, 299.9] };
    assert_eq!(discretize(&r, 300.0, 11).unwrap(), StateIndex([0, 10, 5, 0, 10]));
    let bad = RadarReading { distances: [-1.0, 0.0, 0.0, 0.0, 0.0] };
    assert!(discretize(&bad, 300.0, 11).is_err());
}

#[test]
fn episode_reward_matches_event_counts() {
    let track = small_track();
    let env_cfg = EnvConfig::default();
    let cfg = QConfig { episodes_train: 60, episodes_eval: 20, seed: 5, ..QConfig::default() };
    let (q, records) = train(&track, &env_cfg, &cfg).unwrap();
    let evals = evaluate(&q, &track, &env_cfg, &cfg).unwrap();
    for rec in records.iter().chain(&evals) {
        let crash = if rec.terminal == Terminal::Crashed { -1000.0 + rec.distance / 10.0 } else { 0.0 };
        let want = 10.0 * rec.checkpoints_hit as f64 + 60.0 * rec.laps as f64 + crash;
        assert!((rec.total_reward - want).abs() < 1e-9, "{rec:?}");
    }
}
