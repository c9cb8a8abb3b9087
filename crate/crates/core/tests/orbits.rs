use proptest::prelude::*;
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use toral_core::orbits::{epsilon_dense, iterate, iterate_two_sided, orbit_points, TorusPoint};
use toral_core::ToralMap;

fn random_bits(seed: u64, n: usize) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| (rng.next_u32() & 1) as u8).collect()
}

/// Under ×2 the orbit point at step n lies in the dyadic cell named by
/// digits n..n+k, so visit counts and first visits are block statistics
/// of the word itself.
#[test]
fn doubling_orbit_reads_the_digits() {
    let (steps, k) = (1000u64, 3u32);
    for seed in 0..100 {
        let word = random_bits(seed, 1000 + k as usize);
        let x = TorusPoint::from_digits(2, &[&word]).unwrap();
        let trace = iterate(&ToralMap::times(2), &x, steps, k).unwrap();
        let h = &trace.histogram;
        // the error box 2^{n−P} fits a 2^{−k} cell while n ≤ P − k
        assert_eq!(h.recorded, steps, "seed {seed}");
        let mut visits = vec![0u64; 1 << k];
        let mut first = vec![None; 1 << k];
        for n in 0..steps as usize {
            let cell = word[n..n + k as usize].iter().fold(0usize, |a, &d| 2 * a + d as usize);
            visits[cell] += 1;
            first[cell].get_or_insert(n as u64);
        }
        assert_eq!(h.visits, visits, "seed {seed}");
        assert_eq!(h.first_visit, first, "seed {seed}");
    }
}

#[test]
fn exact_points_follow_digit_shift() {
    let word = random_bits(7, 300);
    let x = TorusPoint::from_digits(2, &[&word]).unwrap();
    let pts = orbit_points(&ToralMap::times(2), &x, 300).unwrap();
    for (n, p) in pts.iter().enumerate() {
        let lead = (p.numerators()[0].clone() * 2u32) / p.denominator();
        assert_eq!(lead, word[n].into(), "step {n}");
    }
}

/// `a/q ↦ 3a mod q` by machine integers.
#[test]
fn rational_orbits_match_modular_arithmetic() {
    for q in [7u64, 11, 13, 31, 64, 81] {
        for a in 0..q {
            let x = TorusPoint::exact(&[a], q).unwrap();
            let trace = iterate(&ToralMap::times(3), &x, 200, 4).unwrap();
            let mut visits = vec![0u64; 16];
            let mut v = a;
            for _ in 0..200 {
                visits[(16 * v / q) as usize] += 1;
                v = 3 * v % q;
            }
            assert_eq!(trace.histogram.visits, visits, "{a}/{q}");
            assert_eq!(trace.histogram.recorded, 200);
        }
    }
}

fn visits_prefix(map: &ToralMap, x: &TorusPoint, steps: u64, depth: u32) -> (u64, Vec<u64>) {
    let t = iterate(map, x, steps, depth).unwrap();
    (t.histogram.recorded, t.histogram.visits)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    /// Doubling the number of digits never changes what was already certified.
    #[test]
    fn precision_doubling_is_consistent(seed in any::<u64>(), p in 64usize..400, which in 0usize..3, depth in 1u32..5) {
        let maps = [
            ToralMap::times(3),
            ToralMap::times(-5),
            ToralMap::new(vec![vec![2, 1], vec![1, 1]]).unwrap(),
        ];
        let map = &maps[which];
        let d = map.dim();
        let words: Vec<Vec<u8>> = (0..d).map(|i| random_bits(seed.wrapping_add(i as u64), 2 * p)).collect();
        let short: Vec<&[u8]> = words.iter().map(|w| &w[..p]).collect();
        let long: Vec<&[u8]> = words.iter().map(|w| &w[..]).collect();
        let xs = TorusPoint::from_digits(2, &short).unwrap();
        let xl = TorusPoint::from_digits(2, &long).unwrap();
        let (r, v) = visits_prefix(map, &xs, 10_000, depth);
        prop_assert!(r < 10_000, "short sample must run out of precision");
        let (r2, v2) = visits_prefix(map, &xl, r, depth);
        prop_assert_eq!(r2, r);
        prop_assert_eq!(v2, v);
    }

    #[test]
    fn visits_sum_to_recorded(seed in any::<u64>(), steps in 1u64..500, depth in 1u32..6) {
        let word = random_bits(seed, 600);
        let x = TorusPoint::from_digits(2, &[&word]).unwrap();
        let t = iterate(&ToralMap::times(3), &x, steps, depth).unwrap();
        prop_assert_eq!(t.histogram.visits.iter().sum::<u64>(), t.histogram.recorded);
        let v = epsilon_dense(&t, 0.5f64.powi(depth as i32)).unwrap();
        prop_assert_eq!(v.achieved, v.empty_cells == 0);
        prop_assert_eq!(v.achieved, v.first_cover_step.is_some());
    }
}

#[test]
fn two_sided_trace_counts_the_start_once() {
    let cat = ToralMap::new(vec![vec![2, 1], vec![1, 1]]).unwrap();
    let x = TorusPoint::exact(&[1, 3], 7).unwrap();
    let fwd = iterate(&cat, &x, 50, 2).unwrap();
    let both = iterate_two_sided(&cat, &x, 50, 2).unwrap();
    assert_eq!(both.backward_recorded, 49);
    assert_eq!(both.histogram.recorded, fwd.histogram.recorded + 49);
    assert_eq!(both.histogram.visits.iter().sum::<u64>(), both.histogram.recorded);
}
