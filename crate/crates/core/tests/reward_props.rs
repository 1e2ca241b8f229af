use gridnav::reward::{shaped_reward, step_reward, RewardParams, RewardTerms};
use gridnav::{Action, GridMap, Position, StepOutcome, StepStatus};
use proptest::prelude::*;

fn pos() -> impl Strategy<Value = Position> {
    (0..20i32, 0..20i32).prop_map(|(x, y)| Position::new(x, y))
}

fn step() -> impl Strategy<Value = (i32, i32)> {
    (1u8..=8).prop_map(|i| Action::new(i).unwrap().displacement())
}

proptest! {
    #[test]
    fn straightness_never_positive(s in pos(), p in pos(), (dx, dy) in step()) {
        let c = p.offset(dx, dy);
        prop_assert!(RewardTerms::new(s, Position::new(0, 0), p, c).straightness() <= 1e-12);
    }

    #[test]
    fn shaped_reward_bounded_by_one_diagonal(s in pos(), e in pos(), p in pos(), (dx, dy) in step()) {
        let c = p.offset(dx, dy);
        let r = shaped_reward(&RewardParams::default(), s, e, p, c);
        let diag = 2f64.sqrt();
        // Progress is at most one move length, straightness at least -2 moves.
        prop_assert!(r <= 0.6 * diag + 1e-12);
        prop_assert!(r >= -0.6 * diag - 0.4 * 2.0 * diag - 1e-12);
    }

    #[test]
    fn translation_invariant(s in pos(), e in pos(), p in pos(), (dx, dy) in step(), tx in -30..30i32, ty in -30..30i32) {
        let c = p.offset(dx, dy);
        let params = RewardParams::default();
        let a = shaped_reward(&params, s, e, p, c);
        let b = shaped_reward(&params, s.offset(tx, ty), e.offset(tx, ty), p.offset(tx, ty), c.offset(tx, ty));
        prop_assert!((a - b).abs() < 1e-9);
    }

    #[test]
    fn progress_reverses_with_move(s in pos(), e in pos(), p in pos(), (dx, dy) in step()) {
        let c = p.offset(dx, dy);
        let fwd = RewardTerms::new(s, e, p, c).progress();
        let back = RewardTerms::new(s, e, c, p).progress();
        prop_assert!((fwd + back).abs() < 1e-12);
    }

    #[test]
    fn weights_scale_linearly(s in pos(), e in pos(), p in pos(), (dx, dy) in step(), k in 0.1f64..5.0) {
        let c = p.offset(dx, dy);
        let params = RewardParams::default();
        let scaled = RewardParams { alpha: params.alpha * k, beta: params.beta * k, ..params };
        let a = shaped_reward(&params, s, e, p, c);
        let b = shaped_reward(&scaled, s, e, p, c);
        prop_assert!((a * k - b).abs() < 1e-9);
    }
}

#[test]
fn moving_straight_away_from_start_costs_nothing() {
    let s = Position::new(2, 2);
    for a in Action::all() {
        let (dx, dy) = a.displacement();
        for k in 1..6 {
            let p = s.offset(dx * k, dy * k);
            let c = p.offset(dx, dy);
            assert!(
                RewardTerms::new(s, Position::new(0, 0), p, c)
                    .straightness()
                    .abs()
                    < 1e-9
            );
        }
    }
}

#[test]
fn terminal_outcomes_replace_shaping() {
    let map = GridMap::empty(5, 5, Position::new(0, 0), Position::new(4, 4)).unwrap();
    let params = RewardParams::default();
    let prev = Position::new(3, 3);
    let cases = [
        (StepStatus::ReachedEnd, Position::new(4, 4), 10.0),
        (StepStatus::HitObstacle, Position::new(3, 4), -10.0),
        (StepStatus::OffGrid, Position::new(3, 5), -10.0),
    ];
    for (status, next, want) in cases {
        let outcome = StepOutcome { next, status };
        assert_eq!(
            step_reward(&params, map.start(), map.end(), prev, &outcome),
            want
        );
    }
}
