//! Property suites. Each metric, aggregate and protocol rule is checked
//! against a brute-force oracle written independently of the library code.

use hwrbench::aggregation::{hwrb_count, median, median_metric, per_game_leader, MetricColumn};
use hwrbench::metrics::{chns, hns, hwrns, saber, CapMode, MetricKind, MetricValue, CHNS_CAP, SABER_CAP};
use hwrbench::protocol::{
    accumulate_episode, check_budget, training_score, EpisodeError, RunLedger, StepEvent,
    Termination, MAX_EPISODE_FRAMES,
};
use hwrbench::{load_baselines, Baselines, GameId, GAME_COUNT};
use proptest::prelude::*;

fn game_strategy() -> impl Strategy<Value = GameId> {
    (0..GAME_COUNT).prop_map(|i| GameId::all().nth(i).unwrap())
}

fn cap_mode() -> impl Strategy<Value = CapMode> {
    prop_oneof![Just(CapMode::SpecFloor), Just(CapMode::TableCompat)]
}

#[test]
fn anchors_hold_for_every_bundled_game() {
    let b = Baselines::bundled();
    for rec in b.records() {
        assert_eq!(hns(rec.random, rec).unwrap().value(), 0.0, "{}", rec.game);
        assert_eq!(hns(rec.human_average, rec).unwrap().value(), 1.0, "{}", rec.game);
        assert_eq!(hwrns(rec.random, rec).unwrap().value(), 0.0, "{}", rec.game);
        assert_eq!(hwrns(rec.human_world_record, rec).unwrap().value(), 1.0, "{}", rec.game);
    }
}

#[test]
fn baseline_csv_round_trip_is_bit_exact() {
    let b = Baselines::bundled();
    let again = load_baselines(b.to_csv().as_bytes(), "again").unwrap();
    for (x, y) in b.records().iter().zip(again.records()) {
        assert_eq!(x.random.to_bits(), y.random.to_bits());
        assert_eq!(x.human_average.to_bits(), y.human_average.to_bits());
        assert_eq!(x.human_world_record.to_bits(), y.human_world_record.to_bits());
    }
    assert_eq!(b.to_csv(), again.to_csv());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn normalization_is_strictly_monotone(game in game_strategy(), a in -1e7f64..1e7, b in -1e7f64..1e7) {
        prop_assume!(a != b);
        let base = Baselines::bundled();
        let rec = base.lookup(game);
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        prop_assert!(hns(lo, rec).unwrap().value() <= hns(hi, rec).unwrap().value());
        prop_assert!(hwrns(lo, rec).unwrap().value() <= hwrns(hi, rec).unwrap().value());
    }

    #[test]
    fn caps_are_idempotent_and_in_range(x in -1e4f64..1e4, mode in cap_mode()) {
        let c = chns(MetricValue::hns(x).unwrap()).unwrap();
        prop_assert!((0.0..=CHNS_CAP).contains(&c.value()));
        prop_assert_eq!(chns(c).unwrap(), c);

        let s = saber(MetricValue::hwrns(x).unwrap(), mode).unwrap();
        prop_assert!(s.value() <= SABER_CAP);
        prop_assert_eq!(saber(s, mode).unwrap(), s);

        let floor = saber(MetricValue::hwrns(x).unwrap(), CapMode::SpecFloor).unwrap().value();
        let compat = saber(MetricValue::hwrns(x).unwrap(), CapMode::TableCompat).unwrap().value();
        prop_assert!(floor >= 0.0);
        if x >= 0.0 {
            prop_assert_eq!(floor, compat);
        }
    }

    #[test]
    fn leaders_are_invariant_under_normalization(
        game in game_strategy(),
        raws in prop::collection::vec(prop::option::of(-100_000i64..1_000_000), 1..8),
    ) {
        prop_assume!(raws.iter().any(Option::is_some));
        let base = Baselines::bundled();
        let rec = base.lookup(game);
        let build = |kind: MetricKind| -> Vec<MetricColumn> {
            raws.iter().enumerate().map(|(i, r)| {
                let mut col = MetricColumn::new(format!("alg{i}"), kind);
                if let Some(r) = r {
                    let raw = *r as f64;
                    let v = match kind {
                        MetricKind::Hns => hns(raw, rec).unwrap(),
                        MetricKind::Hwrns => hwrns(raw, rec).unwrap(),
                        _ => MetricValue::uncapped(raw, MetricKind::Raw).unwrap(),
                    };
                    col.insert(game, v).unwrap();
                }
                col
            }).collect()
        };
        // Oracle: every algorithm whose raw equals the largest raw.
        let best = raws.iter().flatten().max().unwrap();
        let mut oracle: Vec<String> = raws.iter().enumerate()
            .filter(|(_, r)| r.as_ref() == Some(best))
            .map(|(i, _)| format!("alg{i}"))
            .collect();
        oracle.sort();
        for kind in [MetricKind::Raw, MetricKind::Hns, MetricKind::Hwrns] {
            prop_assert_eq!(per_game_leader(&build(kind), game).unwrap(), oracle.clone());
        }
    }

    #[test]
    fn median_matches_selection_oracle(values in prop::collection::vec(-1e6f64..1e6, 1..12)) {
        // Oracle: pull minima one at a time until the middle is reached.
        let mut pool = values.clone();
        let n = pool.len();
        let mut taken = Vec::new();
        while taken.len() <= n / 2 {
            let (i, _) = pool.iter().enumerate()
                .min_by(|a, b| a.1.partial_cmp(b.1).unwrap()).unwrap();
            taken.push(pool.remove(i));
        }
        let oracle = if n % 2 == 1 {
            taken[n / 2]
        } else {
            (taken[n / 2 - 1] + taken[n / 2]) / 2.0
        };
        prop_assert_eq!(median(&values), Some(oracle));

        let mut col = MetricColumn::new("A", MetricKind::Hns);
        for (g, v) in GameId::all().zip(&values) {
            col.insert(g, MetricValue::hns(*v).unwrap()).unwrap();
        }
        prop_assert_eq!(median_metric(&col).unwrap(), oracle);
    }

    #[test]
    fn hwrb_matches_raw_comparison(raws in prop::collection::vec(prop::option::of(-50_000i64..2_000_000), 1..57)) {
        let base = Baselines::bundled();
        let mut col = MetricColumn::new("A", MetricKind::Hwrns);
        let mut oracle = 0;
        for (g, r) in GameId::all().zip(&raws) {
            if let Some(r) = r {
                let rec = base.lookup(g);
                col.insert(g, hwrns(*r as f64, rec).unwrap()).unwrap();
                if *r as f64 >= rec.human_world_record {
                    oracle += 1;
                }
            }
        }
        prop_assert_eq!(hwrb_count(&col).unwrap(), oracle);
    }

    #[test]
    fn episode_return_matches_oracle(
        steps in prop::collection::vec((-100i32..100, 0u32..3, 1u32..20_000, prop::bool::weighted(0.05)), 1..80),
        start_lives in 0u32..6,
    ) {
        // Lives never increase within the generated stream.
        let mut lives = start_lives;
        let events: Vec<StepEvent> = steps.iter().map(|(r, drop, f, over)| {
            lives = lives.saturating_sub(*drop);
            StepEvent::new(*r as f64 * 0.5, lives, *over, *f)
        }).collect();

        // Oracle: the consumed prefix ends at the first game over or at the
        // longest prefix that fits in the frame cap, whichever is shorter.
        let mut fits = 0;
        let mut total_frames = 0u64;
        for e in &events {
            if total_frames + e.env_frames as u64 > 108_000 { break; }
            total_frames += e.env_frames as u64;
            fits += 1;
        }
        let first_over = events.iter().position(|e| e.game_over);
        let result = accumulate_episode(events.clone());
        match first_over {
            Some(i) if i < fits => {
                let s = result.unwrap();
                let expected: f64 = events[..=i].iter().map(|e| e.reward).sum();
                prop_assert_eq!(s.episode_return, expected);
                prop_assert_eq!(s.terminated_by, Termination::GameOver);
            }
            _ if fits < events.len() || total_frames == 108_000 => {
                let s = result.unwrap();
                let expected: f64 = events[..fits].iter().map(|e| e.reward).sum();
                prop_assert_eq!(s.episode_return, expected);
                prop_assert_eq!(s.terminated_by, Termination::FrameCap);
                prop_assert_eq!(s.env_frames_used, total_frames);
            }
            _ => {
                let is_unterminated = matches!(result, Err(EpisodeError::Unterminated { .. }));
                prop_assert!(is_unterminated);
            }
        }
    }

    #[test]
    fn no_episode_exceeds_the_cap(
        frames in prop::collection::vec(1u32..60_000, 1..400),
        over_every in 1usize..50,
    ) {
        let mut text = String::from("action_set 18\n");
        for (i, f) in frames.iter().enumerate() {
            let over = u8::from(i % over_every == over_every - 1);
            text.push_str(&format!("1 3 {over} {f}\n"));
        }
        let log = hwrbench::protocol::parse_log(text.as_bytes()).unwrap();
        let ledger = RunLedger::from_log(&log, u64::MAX, 1).unwrap();
        prop_assert!(ledger.episodes.iter().all(|e| e.env_frames_used <= MAX_EPISODE_FRAMES));
        let all: u64 = frames.iter().map(|f| *f as u64).sum();
        prop_assert_eq!(ledger.total_env_frames, all);
    }

    #[test]
    fn training_score_matches_window_oracle(
        returns in prop::collection::vec(-1e4f64..1e4, 1..60),
        k in 1usize..10,
    ) {
        let result = training_score(&returns, k);
        if returns.len() < k {
            prop_assert!(result.is_err());
        } else {
            let s = result.unwrap();
            let mut oracle = Vec::new();
            for start in 0..=returns.len() - k {
                let mut sum = 0.0;
                for i in start..start + k {
                    sum += returns[i];
                }
                oracle.push(sum / k as f64);
            }
            prop_assert_eq!(s.series.len(), returns.len() - k + 1);
            prop_assert_eq!(s.final_score, *oracle.last().unwrap());
            prop_assert_eq!(s.series, oracle);
        }
    }

    #[test]
    fn constant_returns_score_the_constant(c in -1000i32..1000, n in 1usize..40, k in 1usize..40) {
        prop_assume!(k <= n);
        let s = training_score(&vec![c as f64; n], k).unwrap();
        prop_assert!(s.series.iter().all(|v| *v == c as f64));
    }

    #[test]
    fn budget_check_is_monotone(used in 0u64..400_000_000, extra in 0u64..400_000_000, action in 1u32..20) {
        let mut ledger = RunLedger::new(200_000_000, Some(action), 1).unwrap();
        ledger.total_env_frames = used;
        let before = check_budget(&ledger).conforming;
        ledger.total_env_frames = used + extra;
        let after = check_budget(&ledger).conforming;
        prop_assert!(!after || before);
        prop_assert_eq!(after, used + extra <= 200_000_000 && action == 18);
    }
}
