//! Replays the bundled move scripts: each one carries the image of the
//! standard pair under a generating automorphism back to the standard
//! pair (possibly with the components swapped), with every conjugate
//! replacement verified semantically.

use ac::moves::{apply_aut, parse_script, replay, Script};
use ac::words::{ak_pair, parse_word};

fn load(name: &str) -> Script {
    let path = format!("{}/scripts/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    parse_script(&text).unwrap()
}

fn check(name: &str, image_x: &str, image_y: &str, k: i64) -> Vec<(usize, usize)> {
    let script = load(name);
    let start = script.expand_start(k).expect("script has a start pair");
    let target = script.expand_target(k).expect("script has a target pair");
    // The start pair is the automorphism image of the standard pair.
    let images = (parse_word(image_x).unwrap(), parse_word(image_y).unwrap());
    let expected_start = apply_aut(&ak_pair(k as usize), &images.0, &images.1).unwrap();
    assert_eq!(start, expected_start, "{name} start pair at k={k}");
    let max_len = 2 * k as usize + 7;
    let outcome = replay(&start, &script.expand_moves(k), max_len, 4)
        .unwrap_or_else(|f| panic!("{name} at k={k}: {f}"));
    assert_eq!(outcome.final_pair, target, "{name} target at k={k}");
    for &(step, rounds) in &outcome.acm_rounds {
        assert!(rounds <= 4, "{name} step {step} needed {rounds} rounds");
    }
    outcome.acm_rounds
}

#[test]
fn swap_generators_script_replays() {
    for k in [3, 4] {
        let rounds = check("swap_generators.moves", "y", "x", k);
        assert_eq!(rounds.len(), 1);
    }
}

#[test]
fn invert_y_script_replays() {
    for k in [3, 4] {
        check("invert_y.moves", "x", "Y", k);
    }
}

#[test]
fn y_to_yx_script_replays() {
    for k in [3, 4] {
        check("y_to_yx.moves", "x", "yx", k);
    }
}

#[test]
fn corrupted_script_fails_at_the_bad_step() {
    let script = load("swap_generators.moves");
    let k = 3;
    let start = script.expand_start(k).unwrap();
    let mut moves = script.expand_moves(k);
    // Corrupt the conjugate target of the ACM step.
    if let ac::moves::Move::Acm { target, .. } = &mut moves[1] {
        *target = target.concat(&parse_word("xx").unwrap());
    } else {
        panic!("expected an ACM step at index 1");
    }
    let fail = replay(&start, &moves, 13, 3).unwrap_err();
    assert_eq!(fail.index, 1);
}

#[test]
fn swapped_target_is_cyclically_equal_to_standard_pair() {
    // The two scripts that end with the components swapped still present
    // the same pair up to normalization.
    use ac::normal_forms::cyclic_nf;
    for name in ["invert_y.moves", "y_to_yx.moves"] {
        let script = load(name);
        let target = script.expand_target(3).unwrap();
        assert_eq!(
            cyclic_nf(&target).unwrap(),
            cyclic_nf(&ak_pair(3)).unwrap()
        );
    }
}
