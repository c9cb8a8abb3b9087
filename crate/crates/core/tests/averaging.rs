use proptest::prelude::*;
use toral_core::averaging::{cesaro_average, distance_to_uniform, pushforward, GridMeasure};
use toral_core::ToralMap;

fn random_measure(dim: usize, base: u32, depth: u32, raw: &[u32]) -> GridMeasure {
    let n = (base as usize).pow(depth).pow(dim as u32);
    let w: Vec<f64> = raw.iter().cycle().take(n).map(|&x| x as f64 + 1.0).collect();
    let total: f64 = w.iter().sum();
    GridMeasure::new(dim, base, depth, w.into_iter().map(|x| x / total).collect()).unwrap()
}

/// `x ↦ kx` on the circle: cell `[i, i+1)/N` is stretched over the `|k|`
/// unit cells starting at `k·i` (or ending at `k·i` for negative `k`).
fn scalar_oracle(m: &GridMeasure, k: i64) -> Vec<f64> {
    let n = m.weights.len() as i64;
    let mut out = vec![0.0; n as usize];
    for (i, &w) in m.weights.iter().enumerate() {
        for s in 0..k.abs() {
            let cell = if k > 0 { k * i as i64 + s } else { k * i as i64 - s - 1 };
            out[cell.rem_euclid(n) as usize] += w / k.abs() as f64;
        }
    }
    out
}

/// Midpoint sampling of a 2-D push-forward with `sub²` points per cell.
fn sampled_pushforward(m: &GridMeasure, a: [[i64; 2]; 2], sub: u64) -> Vec<f64> {
    let c = (m.base as u64).pow(m.depth);
    let fine = c * sub;
    let mut out = vec![0.0; m.weights.len()];
    let per = m.weights.iter().map(|w| w / (sub * sub) as f64).collect::<Vec<_>>();
    for x in 0..fine {
        for y in 0..fine {
            let src = ((x / sub) * c + y / sub) as usize;
            // doubled coordinates of the midpoint, mod 2·fine
            let (px, py) = (2 * x as i64 + 1, 2 * y as i64 + 1);
            let qx = (a[0][0] * px + a[0][1] * py).rem_euclid(2 * fine as i64) as u64;
            let qy = (a[1][0] * px + a[1][1] * py).rem_euclid(2 * fine as i64) as u64;
            let dst = ((qx / (2 * sub)) * c + qy / (2 * sub)) as usize;
            out[dst] += per[src];
        }
    }
    out
}

fn map2(a: [[i64; 2]; 2]) -> ToralMap {
    ToralMap::new(vec![a[0].to_vec(), a[1].to_vec()]).unwrap()
}

fn nonsingular() -> impl Strategy<Value = [[i64; 2]; 2]> {
    prop::array::uniform2(prop::array::uniform2(-3i64..=3)).prop_filter("det ≠ 0", |m| m[0][0] * m[1][1] != m[0][1] * m[1][0])
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn scalar_pushforward_matches_oracle(k in prop_oneof![-5i64..=-2, 2i64..=5], base in 2u32..=3, depth in 1u32..=5, raw in prop::collection::vec(0u32..100, 1..50)) {
        let m = random_measure(1, base, depth, &raw);
        let p = pushforward(&m, &ToralMap::times(k)).unwrap();
        for (a, b) in p.weights.iter().zip(scalar_oracle(&m, k)) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn planar_pushforward_matches_sampling(a in nonsingular(), raw in prop::collection::vec(0u32..100, 1..20)) {
        let m = random_measure(2, 2, 2, &raw);
        let p = pushforward(&m, &map2(a)).unwrap();
        let s = sampled_pushforward(&m, a, 64);
        let tv: f64 = p.weights.iter().zip(&s).map(|(x, y)| (x - y).abs()).sum::<f64>() / 2.0;
        prop_assert!(tv < 0.02, "TV {tv} for {a:?}");
    }

    #[test]
    fn mass_is_preserved(a in nonsingular(), raw in prop::collection::vec(0u32..100, 1..64)) {
        let m = random_measure(2, 2, 3, &raw);
        let p = pushforward(&m, &map2(a)).unwrap();
        prop_assert!((p.total_mass() - 1.0).abs() < 1e-12);
        prop_assert!(p.weights.iter().all(|&w| w >= 0.0));
    }

    #[test]
    fn haar_is_invariant(a in nonsingular(), depth in 1u32..=3) {
        let u = GridMeasure::uniform(2, 2, depth).unwrap();
        let p = pushforward(&u, &map2(a)).unwrap();
        prop_assert!(distance_to_uniform(&p).total_variation < 1e-12);
        let c = cesaro_average(&u, &map2(a), 5).unwrap();
        prop_assert!(distance_to_uniform(&c).total_variation < 1e-12);
    }

    #[test]
    fn pushforward_is_linear(a in nonsingular(), r1 in prop::collection::vec(0u32..100, 1..16), r2 in prop::collection::vec(0u32..100, 1..16), t in 0.0f64..=1.0) {
        let (m1, m2) = (random_measure(2, 2, 2, &r1), random_measure(2, 2, 2, &r2));
        let mix = GridMeasure::new(2, 2, 2, m1.weights.iter().zip(&m2.weights).map(|(x, y)| t * x + (1.0 - t) * y).collect()).unwrap();
        let (p1, p2, pm) = (pushforward(&m1, &map2(a)).unwrap(), pushforward(&m2, &map2(a)).unwrap(), pushforward(&mix, &map2(a)).unwrap());
        for i in 0..pm.weights.len() {
            prop_assert!((pm.weights[i] - (t * p1.weights[i] + (1.0 - t) * p2.weights[i])).abs() < 1e-12);
        }
    }
}

#[test]
fn cesaro_of_a_point_mass_spreads_out() {
    let m = GridMeasure::point_mass(1, 2, 6, 5).unwrap();
    let d1 = distance_to_uniform(&cesaro_average(&m, &ToralMap::times(3), 1).unwrap()).total_variation;
    let d64 = distance_to_uniform(&cesaro_average(&m, &ToralMap::times(3), 64).unwrap()).total_variation;
    assert!(d64 < d1);
}
