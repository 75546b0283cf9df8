use std::collections::{BTreeSet, HashMap, HashSet};

use autodrive_core::neat::*;
use autodrive_core::sim::*;
use autodrive_core::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn cfg() -> NeatConfig {
    NeatConfig::default()
}

fn hidden(key: u64) -> NodeGene {
    NodeGene { key, kind: NodeKind::Hidden, bias: 0.0, activation: Activation::Tanh }
}

/// A population of `n` genomes grown from the initial topology by `rounds`
/// rounds of mutation and crossover.
fn evolved(seed: u64, n: usize, rounds: usize) -> (Vec<Genome>, InnovationRegistry) {
    let c = cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut reg = InnovationRegistry::new(c.first_hidden_key());
    let mut pop = init_population(&NeatConfig { population: n, ..c.clone() }, &mut rng, &mut reg);
    for next_key in (n as u64..).take(rounds) {
        reg.new_generation();
        for g in &mut pop {
            mutate(g, &c, &mut rng, &mut reg);
            g.fitness = Some(rng.random_range(0.0..1.0));
        }
        let a = rng.random_range(0..n);
        let b = rng.random_range(0..n);
        let child = crossover(&pop[a], &pop[b], next_key, &mut rng);
        pop[rng.random_range(0..n)] = child;
    }
    (pop, reg)
}

/// Depth-first search for a cycle over enabled connections.
fn has_cycle(g: &Genome) -> bool {
    let mut adj: HashMap<u64, Vec<u64>> = HashMap::new();
    for c in g.connections.values().filter(|c| c.enabled) {
        adj.entry(c.in_node).or_default().push(c.out_node);
    }
    fn visit(n: u64, adj: &HashMap<u64, Vec<u64>>, state: &mut HashMap<u64, u8>) -> bool {
        match state.get(&n) {
            Some(1) => return true,
            Some(2) => return false,
            _ => {}
        }
        state.insert(n, 1);
        for &m in adj.get(&n).map(Vec::as_slice).unwrap_or(&[]) {
            if visit(m, adj, state) {
                return true;
            }
        }
        state.insert(n, 2);
        false
    }
    let mut state = HashMap::new();
    g.nodes.keys().any(|&k| visit(k, &adj, &mut state))
}

#[test]
fn initial_population_is_fully_connected_with_shared_markers() {
    let c = NeatConfig { population: 10, ..cfg() };
    let mut reg = InnovationRegistry::new(c.first_hidden_key());
    let pop = init_population(&c, &mut ChaCha8Rng::seed_from_u64(1), &mut reg);
    assert_eq!(pop.len(), 10);
    for g in &pop {
        assert_eq!(g.connections.len(), 20);
        assert_eq!(g.input_keys(), vec![0, 1, 2, 3, 4]);
        assert_eq!(g.output_keys(), vec![5, 6, 7, 8]);
        assert!(g.hidden_keys().is_empty());
        assert!(g.connections.values().all(|c| c.weight.abs() <= 1.0));
    }
    let innov = |g: &Genome| g.connections.values().find(|c| c.in_node == 0 && c.out_node == 5).unwrap().innovation;
    assert_eq!(innov(&pop[0]), innov(&pop[7]));
    let again = init_population(&c, &mut ChaCha8Rng::seed_from_u64(1), &mut InnovationRegistry::new(9));
    assert_eq!(pop, again);
}

#[test]
fn distance_examples() {
    let c = cfg();
    let mut reg = InnovationRegistry::new(9);
    let pop = init_population(&NeatConfig { population: 1, ..c.clone() }, &mut ChaCha8Rng::seed_from_u64(3), &mut reg);
    let g1 = pop[0].clone();
    assert_eq!(genomic_distance(&g1, &g1, &c), 0.0);

    let mut g2 = g1.clone();
    g2.connections.get_mut(&1).unwrap().weight += 0.4;
    // mean weight difference over 20 matching connections is 0.4 / 20
    assert!((genomic_distance(&g1, &g2, &c) - 0.5 * 0.4 / 20.0).abs() < 1e-12);

    // one matching connection, weights differ by 0.4
    let mut a = Genome::bare(0, &c);
    a.add_connection(0, 5, 0.1, 1);
    let mut b = a.clone();
    b.connections.get_mut(&1).unwrap().weight = 0.5;
    assert!((genomic_distance(&a, &b, &c) - 0.2).abs() < 1e-12);

    let mut g3 = g1.clone();
    g3.add_connection(5, 6, 0.3, 100);
    g3.add_connection(5, 7, -0.3, 101);
    assert_eq!(g3.connections.len(), 22);
    assert!((genomic_distance(&g1, &g3, &c) - 2.0 / 22.0).abs() < 1e-12);
}

#[test]
fn crossover_takes_disjoint_genes_from_the_fitter_parent() {
    let c = cfg();
    let mut fitter = Genome::bare(0, &c);
    let mut other = Genome::bare(1, &c);
    for (innov, i, o) in [(1, 0, 5), (2, 1, 5), (3, 2, 6)] {
        fitter.add_connection(i, o, 0.5, innov);
        other.add_connection(i, o, -0.5, innov);
    }
    fitter.add_connection(3, 7, 0.9, 7);
    other.add_connection(4, 8, 0.9, 5);
    fitter.fitness = Some(2.0);
    other.fitness = Some(1.0);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for key in 0..50 {
        let child = crossover(&fitter, &other, key + 10, &mut rng);
        let innovs: BTreeSet<u64> = child.connections.keys().copied().collect();
        assert_eq!(innovs, BTreeSet::from([1, 2, 3, 7]));
        for (i, g) in &child.connections {
            let w = g.weight;
            assert!(fitter.connections.get(i).is_some_and(|p| p.weight == w)
                || other.connections.get(i).is_some_and(|p| p.weight == w));
        }
    }
    let twin = crossover(&fitter, &fitter, 99, &mut rng);
    assert_eq!(twin.connections, fitter.connections);
    assert_eq!(twin.nodes, fitter.nodes);
}

#[test]
fn add_node_splits_a_connection() {
    let c = cfg();
    let mut g = Genome::bare(0, &c);
    g.add_connection(1, 6, 0.7, 1);
    let mut reg = InnovationRegistry::resume(c.first_hidden_key(), [&g]);
    let before = build_phenotype(&g).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    mutate_add_node(&mut g, &c, &mut rng, &mut reg);
    assert!(!g.connections[&1].enabled);
    let n = g.hidden_keys()[0];
    let into: Vec<_> = g.connections.values().filter(|x| x.out_node == n).collect();
    let out: Vec<_> = g.connections.values().filter(|x| x.in_node == n).collect();
    assert_eq!((into[0].in_node, into[0].weight, into[0].enabled), (1, 1.0, true));
    assert_eq!((out[0].out_node, out[0].weight, out[0].enabled), (6, 0.7, true));
    assert_eq!(g.connections.len(), 3);
    assert_eq!(g.nodes.len(), 10);

    // tanh is nearly linear for small inputs, so the split path
    // tanh(0.7 * tanh(x)) tracks the direct tanh(0.7 * x)
    let after = build_phenotype(&g).unwrap();
    for x in [0.0, 0.01, -0.02, 0.05] {
        let input = [0.0, x, 0.0, 0.0, 0.0];
        let (a, b) = (before.activate(&input).unwrap()[1], after.activate(&input).unwrap()[1]);
        assert!((a - b).abs() < 1e-4, "{x}: {a} vs {b}");
        assert_eq!(b, (0.7 * x.tanh()).tanh());
    }
}

#[test]
fn same_split_in_one_generation_shares_markers() {
    let c = cfg();
    let mut reg = InnovationRegistry::new(9);
    let mut pop = init_population(&NeatConfig { population: 2, ..c.clone() }, &mut ChaCha8Rng::seed_from_u64(8), &mut reg);
    for g in &mut pop {
        for conn in g.connections.values_mut() {
            conn.enabled = conn.innovation == 4;
        }
        mutate_add_node(g, &c, &mut ChaCha8Rng::seed_from_u64(0), &mut reg);
    }
    assert_eq!(pop[0].hidden_keys(), pop[1].hidden_keys());
    let a: BTreeSet<u64> = pop[0].connections.keys().copied().collect();
    let b: BTreeSet<u64> = pop[1].connections.keys().copied().collect();
    assert_eq!(a, b);

    reg.new_generation();
    let mut late = pop[0].clone();
    late.connections.values_mut().for_each(|x| x.enabled = x.innovation == 5);
    mutate_add_node(&mut late, &c, &mut ChaCha8Rng::seed_from_u64(0), &mut reg);
    assert!(late.connections.keys().max() > a.iter().max());
}

#[test]
fn delete_node_removes_incident_connections() {
    let c = cfg();
    let mut g = Genome::bare(0, &c);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let untouched = g.clone();
    mutate_delete_node(&mut g, &mut rng);
    assert_eq!(g, untouched);

    g.nodes.insert(9, hidden(9));
    g.add_connection(0, 9, 0.5, 1);
    g.add_connection(9, 5, 0.5, 2);
    g.add_connection(1, 6, 0.5, 3);
    mutate_delete_node(&mut g, &mut rng);
    assert!(!g.nodes.contains_key(&9));
    assert_eq!(g.connections.keys().copied().collect::<Vec<_>>(), vec![3]);
    assert_eq!(g.nodes.len(), 9);
}

#[test]
fn add_connection_gives_up_on_a_saturated_genome() {
    let c = cfg();
    let mut g = Genome::bare(0, &c);
    let mut reg = InnovationRegistry::new(9);
    // every feed-forward edge: inputs to outputs plus outputs in key order
    for i in 0..9u64 {
        for o in 5..9u64 {
            if i < o {
                let innov = reg.connection(i, o);
                g.add_connection(i, o, 0.1, innov);
            }
        }
    }
    let before = g.clone();
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for _ in 0..20 {
        mutate_add_connection(&mut g, &mut rng, &mut reg);
    }
    assert_eq!(g, before);
}

#[test]
fn delete_connection_examples() {
    let c = cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut empty = Genome::bare(0, &c);
    mutate_delete_connection(&mut empty, &mut rng);
    assert!(empty.connections.is_empty());

    let (pop, _) = evolved(4, 1, 0);
    let mut g = pop[0].clone();
    let before: BTreeSet<u64> = g.connections.keys().copied().collect();
    mutate_delete_connection(&mut g, &mut rng);
    let after: BTreeSet<u64> = g.connections.keys().copied().collect();
    assert_eq!(after.len() + 1, before.len());
    let removed = before.difference(&after).next().unwrap();
    assert!(!g.connections.contains_key(removed));
}

#[test]
fn weight_perturbation_has_the_configured_spread() {
    let c = NeatConfig { weight_mutate_rate: 1.0, weight_replace_rate: 0.0, ..cfg() };
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let mut g = Genome::bare(0, &c);
    for i in 0..5u64 {
        for o in 5..9u64 {
            g.add_connection(i, o, 0.0, i * 4 + o);
        }
    }
    let mut deltas = Vec::new();
    while deltas.len() < 10_000 {
        let mut m = g.clone();
        mutate_weights_and_activation(&mut m, &c, &mut rng);
        deltas.extend(m.connections.values().map(|x| x.weight));
    }
    let n = deltas.len() as f64;
    let mean = deltas.iter().sum::<f64>() / n;
    let sd = (deltas.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!((sd - 0.5).abs() < 0.05, "sd {sd}");
    assert!(mean.abs() < 0.05);

    let frozen = NeatConfig { weight_mutate_rate: 0.0, ..cfg() };
    let mut m = g.clone();
    mutate_weights_and_activation(&mut m, &frozen, &mut rng);
    assert_eq!(m.connections, g.connections);
    assert!(m.nodes.values().all(|n| n.activation == Activation::Tanh));
}

#[test]
fn phenotype_examples() {
    let c = cfg();
    let mut g = Genome::bare(0, &c);
    for i in 0..5u64 {
        g.add_connection(i, 5 + i % 4, 0.0, i + 1);
    }
    let net = build_phenotype(&g).unwrap();
    assert_eq!(net.activate(&[0.3, 0.9, 0.1, 1.0, 0.0]).unwrap(), vec![0.0; 4]);

    let mut single = Genome::bare(0, &c);
    single.add_connection(2, 7, 0.5, 1);
    let out = build_phenotype(&single).unwrap().activate(&[0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
    assert!((out[2] - 0.46212).abs() < 1e-5);
    assert_eq!(out[2], 0.5f64.tanh());

    let mut disabled = single.clone();
    disabled.connections.get_mut(&1).unwrap().enabled = false;
    let out = build_phenotype(&disabled).unwrap().activate(&[0.0, 0.0, 1.0, 0.0, 0.0]).unwrap();
    assert_eq!(out[2], 0.0);

    let mut looped = Genome::bare(0, &c);
    looped.nodes.insert(9, hidden(9));
    looped.add_connection(9, 5, 1.0, 1);
    looped.add_connection(5, 9, 1.0, 2);
    assert!(matches!(build_phenotype(&looped), Err(Error::Cycle(0))));
    assert!(build_phenotype(&looped).unwrap_err().to_string().contains("cycle"));
}

#[test]
fn speciation_separates_two_clusters() {
    let c = cfg();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut reg = InnovationRegistry::new(9);
    let base = init_population(&NeatConfig { population: 1, ..c.clone() }, &mut rng, &mut reg).remove(0);
    // cluster B carries 70 extra hidden nodes: 70 / 20 = 3.5 above cluster A
    let mut far = base.clone();
    for k in 0..70u64 {
        far.nodes.insert(100 + k, hidden(100 + k));
    }
    let mut pop = Vec::new();
    for key in 0..10u64 {
        let mut g = if key < 5 { base.clone() } else { far.clone() };
        g.key = key;
        // small weight jitter keeps intra-cluster distance well under threshold
        for conn in g.connections.values_mut() {
            conn.weight += rng.random_range(-0.05..0.05);
        }
        pop.push(g);
    }
    assert!(genomic_distance(&pop[0], &pop[9], &c) > c.compat_threshold);
    assert!(genomic_distance(&pop[0], &pop[4], &c) < c.compat_threshold);
    let mut next_id = 1;
    let species = speciate(&pop, &[], &c, 0, &mut next_id);
    assert_eq!(species.len(), 2);
    assert_eq!(species[0].members, vec![0, 1, 2, 3, 4]);
    assert_eq!(species[1].members, vec![5, 6, 7, 8, 9]);

    let clones: Vec<Genome> = (0..6).map(|k| Genome { key: k, ..base.clone() }).collect();
    assert_eq!(speciate(&clones, &[], &c, 0, &mut next_id).len(), 1);
}

fn open_track() -> TrackMap {
    let (w, h) = (4000u32, 4000u32);
    let grid = OccupancyGrid::new(w, h, vec![true; (w * h) as usize]).unwrap();
    let cp = vec![Checkpoint { x: 100.0, y: 100.0, radius: 5.0, index: 0 }];
    let finish = FinishLine { x1: 0.0, y1: 10.0, x2: 10.0, y2: 10.0 };
    TrackMap::new("open", grid, Pose::new(2000.0, 200.0, 0), cp, finish).unwrap()
}

/// Replays a fixed action script and returns (distance, mean post-step speed).
fn replay(track: &TrackMap, env: &EnvConfig, script: impl Fn(u32) -> Action) -> (f64, f64) {
    let (_, mut car) = reset(track, env);
    let mut speeds = Vec::new();
    loop {
        let out = step(track, &car, env, script(car.steps)).unwrap();
        speeds.push(out.car.speed);
        car = out.car;
        if out.events.is_done() {
            break;
        }
    }
    (car.distance, speeds.iter().sum::<f64>() / speeds.len() as f64)
}

#[test]
fn fitness_is_distance_times_mean_speed() {
    assert!((fitness(100_000.0, 14.0) - 1.4).abs() < 1e-12);

    let track = open_track();
    let env = EnvConfig::default();
    let script = |t: u32| if t % 7 < 3 { Action::SpeedUp } else if t % 7 == 3 { Action::TurnLeft } else { Action::SlowDown };
    let mut t = 0;
    let summary = drive_episode(&track, &env, 0, |_| {
        t += 1;
        Ok(script(t - 1))
    })
    .unwrap();
    let (d, s) = replay(&track, &env, script);
    assert!((summary.fitness() - d * s * 1e-6).abs() < 1e-12);

    // a genome whose SpeedUp output carries the only positive bias
    let c = cfg();
    let mut g = Genome::bare(0, &c);
    g.nodes.get_mut(&7).unwrap().bias = 1.0;
    let f = genome_fitness(&mut g, &track, &env, c.lap_limit).unwrap();
    let (d, s) = replay(&track, &env, |_| Action::SpeedUp);
    assert!((f - d * s * 1e-6).abs() < 1e-12);
    assert_eq!(g.fitness, Some(f));
    assert_eq!(evaluate_genome(&g, &track, &env, c.lap_limit).unwrap().fitness(), f);
}

#[test]
fn immediate_crash_scores_zero() {
    let track = open_track();
    let env = EnvConfig::default();
    let mut stuck = track.clone();
    stuck.start = Pose::new(5.0, 2000.0, 0);
    let s = drive_episode(&stuck, &env, 0, |_| Ok(Action::TurnLeft)).unwrap();
    assert!(s.crashed);
    assert_eq!(s.distance, 0.0);
    assert_eq!(s.fitness(), 0.0);
}

#[test]
fn genome_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let (pop, _) = evolved(12, 6, 30);
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    for g in &pop {
        let path = dir.path().join(format!("g{}.json", g.key));
        save_genome(g, &path).unwrap();
        let back = load_genome(&path).unwrap();
        assert_eq!(&back, g);
        let (a, b) = (build_phenotype(g).unwrap(), build_phenotype(&back).unwrap());
        for _ in 0..100 {
            let x: Vec<f64> = (0..5).map(|_| rng.random_range(0.0..1.0)).collect();
            assert_eq!(a.activate(&x).unwrap(), b.activate(&x).unwrap());
        }
    }

    let mut broken = pop[0].clone();
    broken.add_connection(0, 4242, 1.0, 9999);
    let path = dir.path().join("broken.json");
    std::fs::write(&path, genome_to_json(&broken)).unwrap();
    assert!(matches!(load_genome(&path), Err(Error::DanglingNode { node: 4242, .. })));
    std::fs::write(&path, "{").unwrap();
    assert!(matches!(load_genome(&path), Err(Error::Malformed { .. })));
}

#[test]
fn config_file_rejects_unknown_fields() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("neat.json");
    std::fs::write(&path, r#"{"population": 50, "generations": 3}"#).unwrap();
    let c = load_neat_config(&path).unwrap();
    assert_eq!((c.population, c.generations, c.node_add_prob), (50, 3, 0.2));
    std::fs::write(&path, r#"{"populaton": 50}"#).unwrap();
    assert!(load_neat_config(&path).is_err());
    std::fs::write(&path, r#"{"population": 3}"#).unwrap();
    assert!(load_neat_config(&path).is_err());
}

fn tiny_run(seed: u64, generations: usize) -> NeatRun {
    let arch = Archetype::SimpleLoop;
    let track = generate_map(arch, &GenParams::for_archetype(arch), 2).unwrap();
    let c = NeatConfig { population: 20, generations, seed, ..cfg() };
    run_neat(&track, &c, &EnvConfig::default()).unwrap()
}

#[test]
fn runs_are_reproducible_and_elitist() {
    let a = tiny_run(3, 6);
    let b = tiny_run(3, 6);
    assert_eq!(a.stats, b.stats);
    assert_eq!(a.best, b.best);
    assert_eq!(a.stats.len(), 6);
    for w in a.stats.windows(2) {
        assert!(w[1].best_fitness >= w[0].best_fitness);
    }
    for s in &a.stats {
        assert!(s.mean_fitness <= s.best_fitness);
        assert_eq!(s.species.iter().map(|x| x.size).sum::<usize>(), 20);
    }
    assert_eq!(a.best.fitness, Some(a.stats.last().unwrap().best_fitness));
}

#[test]
fn zero_generations_return_the_best_initial_genome() {
    let run = tiny_run(1, 0);
    assert!(run.stats.is_empty());
    assert!(run.best.fitness.is_some());
    assert!(run.best.hidden_keys().is_empty());
}

#[test]
fn stagnant_species_is_dropped_after_the_limit() {
    let c = NeatConfig { population: 10, population_elitism: 1, ..cfg() };
    let mut state = NeatState::new(&c).unwrap();
    // two species: the fitter one is protected by species elitism
    for g in &mut state.population {
        g.fitness = Some(if g.key < 5 { 2.0 } else { 1.0 });
    }
    let mut second = state.species[0].clone();
    second.id = 99;
    second.members = (5..10).collect();
    state.species[0].members = (0..5).collect();
    state.species[0].last_improved_generation = 0;
    second.last_improved_generation = 0;
    state.species.push(second);
    state.generation = c.max_stagnation;
    for s in &mut state.species {
        s.best_fitness_ever = 5.0;
        s.last_improved_generation = 0;
    }
    advance_generation(&mut state, &c).unwrap();
    assert_eq!(state.population.len(), 10);
    assert!(state.species.iter().all(|s| s.id != 99));
    // one generation short of the limit: both survive
    let mut state = NeatState::new(&c).unwrap();
    for g in &mut state.population {
        g.fitness = Some(1.0);
    }
    let mut other = state.species[0].clone();
    other.id = 99;
    other.members = (5..10).collect();
    state.species[0].members = (0..5).collect();
    state.species.push(other);
    state.generation = c.max_stagnation - 1;
    advance_generation(&mut state, &c).unwrap();
    assert!(state.species.iter().any(|s| s.id == 99));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn distance_is_symmetric_and_non_negative(seed: u64, rounds in 0..25usize) {
        let (pop, _) = evolved(seed, 4, rounds);
        let c = cfg();
        for a in &pop {
            prop_assert_eq!(genomic_distance(a, a, &c), 0.0);
            for b in &pop {
                let (x, y) = (genomic_distance(a, b, &c), genomic_distance(b, a, &c));
                prop_assert!(x >= 0.0);
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn mutated_genomes_stay_valid(seed: u64, rounds in 0..40usize) {
        let (pop, _) = evolved(seed, 5, rounds);
        for g in &pop {
            prop_assert!(!has_cycle(g));
            prop_assert!(g.validate().is_ok());
            let keys: Vec<u64> = g.connections.values().map(|c| c.innovation).collect();
            prop_assert_eq!(keys.len(), keys.iter().collect::<HashSet<_>>().len());
            let out = build_phenotype(g).unwrap().activate(&[0.5; 5]).unwrap();
            prop_assert!(out.iter().all(|v| v.abs() < 1.0));
        }
    }

    #[test]
    fn crossover_invents_nothing(seed: u64, rounds in 0..30usize) {
        let (pop, _) = evolved(seed, 4, rounds);
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 1);
        let child = crossover(&pop[0], &pop[1], 1000, &mut rng);
        prop_assert!(!has_cycle(&child));
        prop_assert!(child.validate().is_ok());
        for (i, g) in &child.connections {
            prop_assert!(pop[0].connections.contains_key(i));
            let from_a = pop[0].connections.get(i).is_some_and(|p| p.weight == g.weight);
            let from_b = pop[1].connections.get(i).is_some_and(|p| p.weight == g.weight);
            prop_assert!(from_a || from_b);
        }
    }

    #[test]
    fn speciation_is_a_partition(seed: u64, rounds in 0..30usize) {
        let (pop, _) = evolved(seed, 12, rounds);
        let c = NeatConfig { compat_threshold: 0.6, ..cfg() };
        let mut id = 1;
        let species = speciate(&pop, &[], &c, 0, &mut id);
        let mut seen = HashSet::new();
        for s in &species {
            for k in &s.members {
                prop_assert!(seen.insert(*k));
                let g = pop.iter().find(|g| g.key == *k).unwrap();
                prop_assert!(g.key == s.representative.key || genomic_distance(&s.representative, g, &c) < c.compat_threshold);
            }
        }
        prop_assert_eq!(seen.len(), pop.len());
    }

    #[test]
    fn registry_is_consistent(pairs in prop::collection::vec((0..12u64, 0..12u64), 1..40)) {
        let mut reg = InnovationRegistry::new(9);
        let mut seen: HashMap<(u64, u64), u64> = HashMap::new();
        let mut high = 0;
        for &(a, b) in &pairs {
            let i = reg.connection(a, b);
            if let Some(&j) = seen.get(&(a, b)) {
                prop_assert_eq!(i, j);
            } else {
                prop_assert!(i > high);
                high = i;
                seen.insert((a, b), i);
            }
        }
        reg.new_generation();
        for &(a, b) in &pairs {
            prop_assert!(reg.connection(a, b) > high);
        }
    }
}
