use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pktreorder::metrics::Threshold;
use pktreorder::{
    behaviorally_equivalent, enumerate_classes, is_consistent_on, lds_bruteforce, map_m,
    permutations, reconstruct, reorder_density, sus_greedy, verify_identities, verify_theorem,
    IdSequence, Permutation, Verdict,
};

type Metric = Box<dyn Fn(&Permutation) -> Vec<u64> + Sync>;

fn in_pool<R: Send>(threads: usize, f: impl FnOnce() -> R + Send) -> R {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .unwrap()
        .install(f)
}

#[test]
fn greedy_equals_lds_exhaustive_and_random() {
    for n in 1..=7 {
        for p in permutations(n) {
            assert_eq!(sus_greedy(&p).u(), lds_bruteforce(&p), "{p}");
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..1000 {
        let n = rng.random_range(8..=64u64);
        let mut ids: Vec<u64> = (1..=n).collect();
        ids.shuffle(&mut rng);
        let a = IdSequence::new(ids).unwrap();
        assert_eq!(sus_greedy(&a).u(), lds_bruteforce(&a), "{a}");
    }
}

#[test]
fn fb_equivalent_pairs_are_behaviorally_equivalent() {
    for n in 1..=7 {
        let report = enumerate_classes(n).unwrap();
        for members in report.classes.values() {
            for b in &members[1..] {
                assert!(
                    behaviorally_equivalent(&members[0], b),
                    "{} vs {b}",
                    members[0]
                );
            }
        }
    }
}

#[test]
fn classes_partition_and_keys_reconstruct() {
    for n in 1..=7 {
        let report = enumerate_classes(n).unwrap();
        let members: usize = report.classes.values().map(Vec::len).sum();
        assert_eq!(members, (1..=n).product::<usize>());
        for (image, class) in &report.classes {
            assert!(class.windows(2).all(|p| p[0] < p[1]));
            for p in class {
                assert_eq!(&map_m(p), image);
            }
            if let Some(low) = class.iter().find(|p| sus_greedy(p).u() <= 3) {
                assert_eq!(&reconstruct(image).unwrap(), low);
            } else {
                assert!(reconstruct(image).is_err());
            }
        }
        assert_eq!(report.stats.shared_low_sus_classes, 0);
    }
}

#[test]
fn identities_hold_up_to_seven() {
    for n in 1..=7 {
        assert_eq!(verify_identities(n).unwrap(), Verdict::Pass, "n = {n}");
    }
}

#[test]
fn reports_do_not_depend_on_worker_count() {
    let single = in_pool(1, || {
        (
            enumerate_classes(6).unwrap(),
            verify_theorem(6).unwrap(),
            is_consistent_on(|p| reorder_density(p, Threshold::Finite(2)).unwrap(), 6).unwrap(),
        )
    });
    let many = in_pool(4, || {
        (
            enumerate_classes(6).unwrap(),
            verify_theorem(6).unwrap(),
            is_consistent_on(|p| reorder_density(p, Threshold::Finite(2)).unwrap(), 6).unwrap(),
        )
    });
    assert_eq!(single, many);
}

#[test]
fn consistency_witness_is_minimal() {
    // brute-force the smallest violating pair for a few metrics
    let metrics: Vec<Metric> = vec![
        Box::new(|p| p.ids().to_vec()),
        Box::new(|p| vec![p.ids()[0]]),
        Box::new(|p| vec![sus_greedy(p).u() as u64]),
    ];
    for n in 4..=5 {
        let all: Vec<_> = permutations(n).collect();
        for metric in &metrics {
            let mut expected = None;
            'outer: for (i, a) in all.iter().enumerate() {
                for b in &all[i + 1..] {
                    if map_m(a) == map_m(b) && metric(a) != metric(b) {
                        expected = Some((a.clone(), b.clone()));
                        break 'outer;
                    }
                }
            }
            let got = is_consistent_on(metric, n).unwrap();
            match (expected, got) {
                (None, c) => assert!(c.is_consistent()),
                (Some((a, b)), pktreorder::Consistency::Counterexample { first, second, .. }) => {
                    assert_eq!((first, second), (a, b));
                }
                (Some(_), c) => panic!("expected counterexample, got {c:?}"),
            }
        }
    }
}

#[test]
fn random_buffers_never_yield_wrong_preimages() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut hits = 0;
    for _ in 0..5000 {
        let n = rng.random_range(1..=9usize);
        let w: Vec<u64> = (0..n).map(|_| rng.random_range(0..=n as u64)).collect();
        let w = pktreorder::BufferSequence::new(w);
        if let Ok(p) = reconstruct(&w) {
            hits += 1;
            assert_eq!(map_m(&p), w);
            assert!(sus_greedy(&p).u() <= 3);
        }
    }
    assert!(hits > 0);
}
