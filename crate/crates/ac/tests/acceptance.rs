//! Acceptance suite: one test per release criterion, covering the
//! reference enumeration columns, the named trivializations, script
//! replays, the differential and property suites, and classification.

use ac::classify::{classify_relator, RelatorTag};
use ac::conjugacy::{acm_conjugates, finite_quotient_oracle, harvest, PseudoConjugacyGraph, Verdict};
use ac::digraph::WeightedDigraph;
use ac::moves::{parse_script, replay, Move};
use ac::normal_forms::{apply_whitehead, full_nf, whitehead_moves};
use ac::search::{run, SearchConfig, SearchMode, SearchReport};
use ac::words::{parse_pair, parse_word, Letter, Pair, Word};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::BTreeMap;
use std::sync::OnceLock;
use std::time::{Duration, Instant};

fn threads() -> usize {
    std::thread::available_parallelism().map_or(1, |n| n.get())
}

fn enumerate(max_len: usize) -> SearchReport {
    let seed = parse_pair("xyxYXY xxxYYYY").unwrap();
    let mut cfg = SearchConfig::new(seed, max_len, 2, SearchMode::Enumerate);
    cfg.threads = threads();
    run(&cfg).unwrap_or_else(|e| panic!("enumeration at L={max_len}: {e}"))
}

fn report_l10() -> &'static SearchReport {
    static REPORT: OnceLock<SearchReport> = OnceLock::new();
    REPORT.get_or_init(|| enumerate(10))
}

fn report_l11() -> &'static SearchReport {
    static REPORT: OnceLock<SearchReport> = OnceLock::new();
    REPORT.get_or_init(|| enumerate(11))
}

fn expected(column: &[(usize, u64)]) -> BTreeMap<usize, u64> {
    column.iter().copied().collect()
}

#[test]
fn c01_enumeration_counts_l10() {
    let want = expected(&[
        (13, 4),
        (14, 10),
        (15, 70),
        (16, 64),
        (17, 220),
        (18, 98),
        (19, 240),
        (20, 10),
        (21, 20),
    ]);
    assert_eq!(report_l10().counts, want, "L=10 column mismatch");
}

#[test]
fn c02_enumeration_counts_l11_stretch() {
    let want = expected(&[
        (13, 4),
        (14, 10),
        (15, 70),
        (16, 86),
        (17, 416),
        (18, 392),
        (19, 764),
        (20, 442),
        (21, 746),
        (22, 438),
        (23, 112),
        (24, 6),
    ]);
    assert_eq!(report_l11().counts, want, "L=11 column mismatch");
}

#[test]
fn c03_stabilized_cells_agree_between_l10_and_l11() {
    let (a, b) = (&report_l10().counts, &report_l11().counts);
    for (t, want) in [(13usize, 4u64), (14, 10), (15, 70)] {
        assert_eq!(a.get(&t), Some(&want), "L=10, T={t}");
        assert_eq!(b.get(&t), Some(&want), "L=11, T={t}");
    }
}

fn assert_trivializes(seed: &str, max_len: usize) {
    let cfg = SearchConfig::new(
        parse_pair(seed).unwrap(),
        max_len,
        2,
        SearchMode::Trivialize,
    );
    let started = Instant::now();
    let report = run(&cfg).unwrap();
    let elapsed = started.elapsed();
    assert!(report.reached_target, "{seed} did not trivialize");
    let acm_steps = report
        .witness
        .unwrap()
        .iter()
        .filter(|m| matches!(m, Move::Acm { .. }))
        .count();
    assert!(acm_steps < 5, "{seed}: witness used {acm_steps} conjugate moves");
    assert!(
        elapsed < Duration::from_secs(10),
        "{seed}: took {elapsed:?} single-threaded"
    );
}

#[test]
fn c04_ak2_trivializes_quickly() {
    assert_trivializes("xxYYY xyxYXY", 7);
}

#[test]
fn c05_gordon_pair_trivializes_quickly() {
    assert_trivializes("XyxxY xyyyXYYYY", 9);
}

#[test]
fn c06_lemma_scripts_replay_with_bounded_verification() {
    for name in ["swap_generators.moves", "invert_y.moves", "y_to_yx.moves"] {
        let path = format!("{}/scripts/{name}", env!("CARGO_MANIFEST_DIR"));
        let script = parse_script(&std::fs::read_to_string(&path).unwrap()).unwrap();
        for k in [3i64, 4] {
            let start = script.expand_start(k).expect("start directive");
            let target = script.expand_target(k).expect("target directive");
            let max_len = 2 * k as usize + 7;
            let outcome = replay(&start, &script.expand_moves(k), max_len, 4)
                .unwrap_or_else(|f| panic!("{name} at k={k}: {f}"));
            assert_eq!(outcome.final_pair, target, "{name} at k={k}");
            for (step, rounds) in outcome.acm_rounds {
                assert!(
                    rounds <= 4,
                    "{name} at k={k}: step {step} needed {rounds} rounds"
                );
            }
        }
    }
}

fn random_digraph(rng: &mut ChaCha8Rng, max_v: usize) -> WeightedDigraph {
    let mut g = WeightedDigraph::new();
    let nv = rng.gen_range(1..=max_v);
    for _ in 0..nv {
        g.add_vertex();
    }
    for _ in 0..rng.gen_range(0..=2 * nv) {
        g.add_edge(
            rng.gen_range(0..nv),
            Letter::from_code(rng.gen_range(0..4)),
            rng.gen_range(-6..=6),
            rng.gen_range(0..nv),
        );
    }
    g
}

fn circuits(graph: WeightedDigraph, max_len: usize) -> std::collections::BTreeSet<Word> {
    let pcg = PseudoConjugacyGraph {
        graph,
        base_word: parse_word("x").unwrap(),
        relator: parse_word("y").unwrap(),
        rounds: 0,
    };
    let out = harvest(&pcg, max_len);
    assert!(!out.truncated);
    out.words
}

#[test]
fn c07_fold_differential_with_circuit_harvest() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0701);
    for case in 0..1000 {
        let g0 = random_digraph(&mut rng, 50);
        let mut fast = g0.clone();
        let mut slow = g0;
        fast.fold();
        slow.naive_fold();
        assert_eq!(fast.modulus, slow.modulus, "case {case}: modulus");
        assert_eq!(
            circuits(fast, 6),
            circuits(slow, 6),
            "case {case}: weight-1 circuit sets"
        );
    }
}

fn random_reduced_word(rng: &mut ChaCha8Rng, len: usize) -> Word {
    let mut letters: Vec<Letter> = Vec::with_capacity(len);
    for _ in 0..len {
        loop {
            let l = Letter::from_code(rng.gen_range(0..4));
            if letters.last() != Some(&l.inverse()) {
                letters.push(l);
                break;
            }
        }
    }
    ac::words::free_reduce(&letters)
}

fn random_pair(rng: &mut ChaCha8Rng, max_total: usize) -> Pair {
    let a = rng.gen_range(1..max_total);
    let b = rng.gen_range(1..=(max_total - a).max(1));
    Pair::new(random_reduced_word(rng, a), random_reduced_word(rng, b))
}

#[test]
fn c08_normal_form_property_suite() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0801);
    let table = whitehead_moves();
    let mut checked = 0usize;
    while checked < 10_000 {
        let p = random_pair(&mut rng, 16);
        let nf = match full_nf(&p) {
            Ok(nf) => nf,
            // Components that are trivial or become so are out of domain.
            Err(_) => continue,
        };
        checked += 1;
        assert_eq!(full_nf(&nf).unwrap(), nf, "idempotence at {p}");
        assert_eq!(full_nf(&p.swap()).unwrap(), nf, "swap at {p}");
        for i in 0..2 {
            let inv = p.with_component(i, p.component(i).inverse());
            assert_eq!(full_nf(&inv).unwrap(), nf, "inversion of {i} at {p}");
            let clen = rng.gen_range(1..=4);
            let c = random_reduced_word(&mut rng, clen);
            let conj = p.with_component(i, p.component(i).conjugate(&c));
            assert_eq!(full_nf(&conj).unwrap(), nf, "conjugation of {i} at {p}");
        }
        let mut image = p.clone();
        for _ in 0..rng.gen_range(1..=3) {
            let m = &table[rng.gen_range(0..table.len())];
            image = Pair::new(
                apply_whitehead(image.component(0), m),
                apply_whitehead(image.component(1), m),
            );
        }
        assert_eq!(full_nf(&image).unwrap(), nf, "automorphism image of {p}");
    }
}

#[test]
fn c09_conjugate_harvest_passes_finite_quotient_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0901);
    let mut checked = 0usize;
    while checked < 200 {
        let ulen = rng.gen_range(1..=8);
        let vlen = rng.gen_range(1..=8);
        let u = random_reduced_word(&mut rng, ulen);
        let v = random_reduced_word(&mut rng, vlen);
        let Ok(words) = acm_conjugates(&u, &v, 8, 2) else {
            continue;
        };
        checked += 1;
        for u_prime in &words {
            assert_eq!(
                finite_quotient_oracle(&u, u_prime, &v, 0),
                Verdict::Consistent,
                "oracle refuted {u_prime} as a conjugate of {u} against {v}"
            );
        }
    }
}

#[test]
fn c10_whitehead_table_counts() {
    let table = whitehead_moves();
    assert_eq!(table.len(), 20);
    let non_lp = table.iter().filter(|m| !m.is_length_preserving()).count();
    assert_eq!(non_lp, 12);
}

#[test]
fn c11_relator_classification() {
    let baumslag = classify_relator(&parse_word("YXyxYxyXX").unwrap());
    assert_eq!(baumslag.tag, RelatorTag::BaumslagType);

    let bs23 = classify_relator(&parse_word("xyyXYYY").unwrap());
    assert_eq!(bs23.tag, RelatorTag::BsType);

    for relator in ["xyxYXY", "xxYYY", "xxxYYYY"] {
        let class = classify_relator(&parse_word(relator).unwrap());
        assert_eq!(class.tag, RelatorTag::Unclassified, "{relator}");
    }
}

#[test]
fn c12_miller_schupp_pairs_trivialize_stretch() {
    let pairs = [
        "XyyxYYY xxYYYXYxYXYY",
        "XyyxYYY xxyyyXYYXyxY",
        "XyyxYYY xxYXyxyyyXY",
        "XyyxYYY xxYXyXyyxyy",
        "XyyxYYY xxyyyXYxYXYY",
        "XyyxYYY xyxYYYYYYXy",
        "XyyxYYY xyxYXyy",
        "XyyxYYY xxYYXYXYXyy",
        "XyyxYYY xyyxYYYXYYY",
        "XyyxYYY xyxYYXyyyyyy",
        "XyyxYYY xyXyyxYXyyxY",
        "XyyxYYY xyyyXyyXyy",
    ];
    let mut failures = Vec::new();
    for seed in pairs {
        let mut ok = false;
        // Escalating budget within L <= 16, D = 2.
        for max_len in [8, 10, 12, 14, 16] {
            let mut cfg = SearchConfig::new(
                parse_pair(seed).unwrap(),
                max_len,
                2,
                SearchMode::Trivialize,
            );
            cfg.threads = threads();
            cfg.visited_cap = 100_000;
            if run(&cfg).unwrap().reached_target {
                ok = true;
                break;
            }
        }
        if !ok {
            failures.push(seed);
        }
    }
    assert!(
        failures.is_empty(),
        "{} of {} pairs did not trivialize within budget: {failures:?}",
        failures.len(),
        pairs.len()
    );
}
