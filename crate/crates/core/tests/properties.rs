mod common;

use proptest::prelude::*;
use qsched::baselines::PolicyKind;
use qsched::qagent::{
    argmax, discretize, q_update, reward, select_action, DiscretizationScheme, QTable, ReplayBuffer, StateId,
    Transition,
};
use qsched::sim::Observation;
use qsched::workload::{generate_synthetic, parse_trace_str, SynthParams, WorkloadSource};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn synth_params() -> impl Strategy<Value = SynthParams> {
    (0usize..150, 0.05f64..8.0, 1u64..10, 0u64..20, 1u32..8, 0u32..8, 1u32..16, 0u32..16, any::<u64>()).prop_map(
        |(n, rate, dmin, dspan, cmin, cspan, mmin, mspan, seed)| SynthParams {
            task_count: n,
            arrival_rate: rate,
            duration_range: (dmin, dmin + dspan),
            cpu_range: (cmin, cmin + cspan),
            mem_range: (mmin, mmin + mspan),
            seed,
            ..SynthParams::default()
        },
    )
}

fn transition(states: usize) -> impl Strategy<Value = Transition> {
    (0..states, 0usize..4, -3.0f64..=0.0, 0..states, any::<bool>()).prop_map(move |(s, a, r, n, terminal)| {
        Transition { s: StateId(s), a, r, s_next: StateId(n), terminal }
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn write_then_parse_is_identity(params in synth_params()) {
        let w = generate_synthetic(&params).unwrap();
        let csv = w.to_csv();
        let back = parse_trace_str(&csv, WorkloadSource::Inline).unwrap();
        prop_assert_eq!(back.to_csv(), csv);
        prop_assert_eq!(back.checksum(), w.checksum());
        prop_assert_eq!(back, w);
    }

    #[test]
    fn no_policy_breaks_capacity_or_conservation(seed in any::<u64>()) {
        let workload = common::random_workload(seed);
        let fleet = common::random_fleet(seed);
        for kind in PolicyKind::ALL {
            let mut policy = common::policy_for(kind, seed);
            let checked = common::check_episode(workload.tasks(), policy.as_mut(), &fleet);
            prop_assert!(checked.is_ok(), "{}: {:?}", kind, checked);
        }
    }

    #[test]
    fn q_values_stay_within_reward_bounds(
        ts in prop::collection::vec(transition(6), 1..400),
        alpha in 0.01f64..=1.0,
        gamma in 0.0f64..0.99,
    ) {
        let mut table = QTable::zeros(6, 4);
        let floor = -3.0 / (1.0 - gamma) - 1e-9;
        for t in &ts {
            q_update(&mut table, t, alpha, gamma);
        }
        prop_assert!(table.values().iter().all(|&v| (floor..=0.0).contains(&v)));
    }

    #[test]
    fn argmax_is_first_maximum_and_shift_invariant(
        row in prop::collection::vec(-4i32..4, 1..8),
        shift in -100.0f64..100.0,
        scale in 0.1f64..10.0,
    ) {
        let row: Vec<f64> = row.into_iter().map(f64::from).collect();
        let i = argmax(&row);
        let max = row.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        prop_assert_eq!(row[i], max);
        prop_assert!(row[..i].iter().all(|&v| v < max));
        let moved: Vec<f64> = row.iter().map(|v| v * scale + shift).collect();
        prop_assert_eq!(argmax(&moved), i);
    }

    #[test]
    fn reward_falls_as_load_grows(
        cpu in 0.0f64..=1.0, mem in 0.0f64..=1.0, q in 0usize..40,
        dc in 0.0f64..=1.0, dm in 0.0f64..=1.0, dq in 0usize..10,
    ) {
        let scheme = DiscretizationScheme::default();
        let low = Observation { cpu_util: cpu, mem_util: mem, queue_len: q };
        let high = Observation { cpu_util: (cpu + dc).min(1.0), mem_util: (mem + dm).min(1.0), queue_len: q + dq };
        let (rl, rh) = (reward(&low, &scheme), reward(&high, &scheme));
        prop_assert!(rh <= rl);
        prop_assert!((-3.0..=0.0).contains(&rl));
        prop_assert!(discretize(&low, &scheme).0 < scheme.state_count());
    }

    #[test]
    fn greedy_selection_is_argmax(row in prop::collection::vec(-3i32..1, 4), seed in any::<u64>()) {
        let mut table = QTable::zeros(1, 4);
        table.row_mut(StateId(0)).copy_from_slice(&row.iter().map(|&v| f64::from(v)).collect::<Vec<_>>());
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        prop_assert_eq!(select_action(&table, StateId(0), 0.0, &mut rng), argmax(table.row(StateId(0))));
    }
}

#[test]
fn replay_sampling_is_uniform() {
    let n = 50;
    let mut buffer = ReplayBuffer::new(n);
    for i in 0..n {
        buffer.push(Transition { s: StateId(i), a: 0, r: 0.0, s_next: StateId(i), terminal: false });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let draws = 100_000;
    let mut counts = vec![0usize; n];
    for _ in 0..draws / n {
        for i in buffer.sample_indices(n, &mut rng).unwrap() {
            counts[i] += 1;
        }
    }
    let p = 1.0 / n as f64;
    let mean = draws as f64 * p;
    let sigma = (draws as f64 * p * (1.0 - p)).sqrt();
    for (i, &c) in counts.iter().enumerate() {
        assert!((c as f64 - mean).abs() <= 3.0 * sigma + 1.0, "slot {i}: {c} vs {mean:.0} +- {:.0}", 3.0 * sigma);
    }
}

#[test]
fn full_exploration_passes_chi_square() {
    let table = QTable::zeros(1, 4);
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let draws = 100_000;
    let mut counts = [0usize; 4];
    for _ in 0..draws {
        counts[select_action(&table, StateId(0), 1.0, &mut rng)] += 1;
    }
    let expected = draws as f64 / 4.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // 3 degrees of freedom, p = 0.001
    assert!(chi2 < 16.27, "chi-square {chi2} for {counts:?}");
}
