use std::f64::consts::PI;

use cryotrace::collision::{
    collision_rate, elastic_update, mean_free_path_check, mean_thermal_speed, sample_partner, scatter_pair, GasParams,
    SamplingMethod,
};
use cryotrace::constants::BOLTZMANN;
use cryotrace::Vec3;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

const T: f64 = 4.5;

/// One-sample Kolmogorov-Smirnov statistic against `cdf`.
fn ks_statistic(mut xs: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

/// Critical value at α = 0.001.
fn ks_critical(n: usize) -> f64 {
    1.949 / (n as f64).sqrt()
}

#[test]
fn direct_partner_variance_is_kt_over_buffer_mass() {
    let params = GasParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let u = Vec3::new(10.0, -5.0, 30.0);
    let v = Vec3::new(200.0, 0.0, 0.0);
    let n = 1_000_000;
    let mut sum = Vec3::zeros();
    let mut sq = Vec3::zeros();
    for _ in 0..n {
        let d = sample_partner(&v, &u, T, SamplingMethod::Direct, &params, &mut rng) - u;
        sum += d;
        sq += d.component_mul(&d);
    }
    let expected = BOLTZMANN * T / params.buffer_mass;
    for a in 0..3 {
        let mean = sum[a] / n as f64;
        let var = sq[a] / n as f64 - mean * mean;
        assert!((var - expected).abs() / expected < 0.01, "axis {a}: {var} vs {expected}");
        assert!(mean.abs() < 5.0 * (expected / n as f64).sqrt());
    }
}

/// Two-sample Kolmogorov-Smirnov statistic.
fn ks_two_sample(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len(), b.len());
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < na && j < nb {
        let x = a[i].min(b[j]);
        while i < na && a[i] <= x {
            i += 1;
        }
        while j < nb && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na as f64 - j as f64 / nb as f64).abs());
    }
    d
}

#[test]
fn direct_partner_components_are_normal() {
    let params = GasParams::default();
    let sigma = (BOLTZMANN * T / params.buffer_mass).sqrt();
    let u = Vec3::new(3.0, 0.0, -8.0);
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let n = 1_000_000;
    let draws: Vec<Vec3> = (0..n)
        .map(|_| sample_partner(&Vec3::zeros(), &u, T, SamplingMethod::Direct, &params, &mut rng))
        .collect();
    for a in 0..3 {
        let normal = Normal::new(u[a], sigma).unwrap();
        let d = ks_statistic(draws.iter().map(|w| w[a]).collect(), |x| normal.cdf(x));
        assert!(d < ks_critical(n), "axis {a}: D = {d}");
    }
}

#[test]
fn single_candidate_weighting_is_indistinguishable_from_direct() {
    let params = GasParams::default();
    let v = Vec3::new(120.0, 0.0, 0.0);
    let u = Vec3::new(0.0, 0.0, 15.0);
    let n = 100_000;
    let draw = |method, seed| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| sample_partner(&v, &u, T, method, &params, &mut rng))
            .collect::<Vec<_>>()
    };
    let direct = draw(SamplingMethod::Direct, 40);
    let weighted = draw(SamplingMethod::Weighted { candidates: 1 }, 41);
    let critical = 1.949 * (2.0 / n as f64).sqrt();
    for a in 0..3 {
        let d = ks_two_sample(direct.iter().map(|w| w[a]).collect(), weighted.iter().map(|w| w[a]).collect());
        assert!(d < critical, "axis {a}: D = {d}");
    }
}

#[test]
fn direct_partner_mean_thermal_speed() {
    let params = GasParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(22);
    let n = 200_000;
    let mean = (0..n)
        .map(|_| sample_partner(&Vec3::zeros(), &Vec3::zeros(), T, SamplingMethod::Direct, &params, &mut rng).norm())
        .sum::<f64>()
        / n as f64;
    let expected = (8.0 * BOLTZMANN * T / (PI * params.buffer_mass)).sqrt();
    assert!((mean - expected).abs() / expected < 0.01);
    assert_eq!(mean_thermal_speed(T, params.buffer_mass), expected);
}

#[test]
fn single_candidate_weighting_reproduces_direct_sampling() {
    let params = GasParams::default();
    let mut a = ChaCha8Rng::seed_from_u64(23);
    let mut b = a.clone();
    let v = Vec3::new(100.0, 20.0, -3.0);
    let u = Vec3::new(0.0, 0.0, 20.0);
    for _ in 0..1000 {
        let d = sample_partner(&v, &u, T, SamplingMethod::Direct, &params, &mut a);
        let w = sample_partner(&v, &u, T, SamplingMethod::Weighted { candidates: 1 }, &params, &mut b);
        assert_eq!(d, w);
    }
}

#[test]
fn weighted_selection_approaches_speed_weighted_mean() {
    // Selecting with probability ∝ relative speed turns the Maxwell mean
    // speed sqrt(8/π) σ into E[s²]/E[s] = 3 σ sqrt(π/8).
    let params = GasParams::default();
    let sigma = (BOLTZMANN * T / params.buffer_mass).sqrt();
    let mean_speed = |candidates: u32, seed: u64| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = 20_000;
        (0..n)
            .map(|_| {
                sample_partner(&Vec3::zeros(), &Vec3::zeros(), T, SamplingMethod::Weighted { candidates }, &params, &mut rng)
                    .norm()
            })
            .sum::<f64>()
            / n as f64
            / sigma
    };
    let one = mean_speed(1, 24);
    let ten = mean_speed(10, 25);
    let many = mean_speed(1000, 26);
    assert!((one - (8.0 / PI).sqrt()).abs() < 0.02);
    assert!(one < ten && ten < many);
    let limit = 3.0 * (PI / 8.0).sqrt();
    assert!((many - limit).abs() / limit < 0.01, "{many} vs {limit}");
}

#[test]
fn scattering_angle_is_isotropic() {
    let params = GasParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(27);
    let v = Vec3::new(150.0, -40.0, 10.0);
    let w = Vec3::new(0.0, 30.0, 0.0);
    let g = (v - w).normalize();
    let n = 50_000;
    let cosines: Vec<f64> = (0..n)
        .map(|_| {
            let (v2, w2) = scatter_pair(&v, &w, &params, &mut rng);
            (v2 - w2).normalize().dot(&g)
        })
        .collect();
    let d = ks_statistic(cosines, |c| ((c + 1.0) / 2.0).clamp(0.0, 1.0));
    assert!(d < ks_critical(n), "D = {d}");
}

#[test]
fn relative_speed_is_preserved() {
    let params = GasParams::default();
    let mut rng = ChaCha8Rng::seed_from_u64(28);
    let v = Vec3::new(150.0, -40.0, 10.0);
    let w = Vec3::new(0.0, 30.0, 0.0);
    for _ in 0..1000 {
        let (v2, w2) = scatter_pair(&v, &w, &params, &mut rng);
        assert!(((v2 - w2).norm() - (v - w).norm()).abs() < 1e-10);
    }
}

#[test]
fn rate_of_comoving_molecule_uses_buffer_thermal_speed() {
    let params = GasParams::default();
    let u = Vec3::new(0.0, 0.0, 12.0);
    let n = 1e21;
    let gamma = collision_rate(&u, &u, n, T, &params).unwrap();
    let expected = params.cross_section * n * mean_thermal_speed(T, params.buffer_mass);
    assert!((gamma - expected).abs() / expected < 1e-14);
    assert!(collision_rate(&u, &u, n, 0.0, &params).is_err());
    assert!(collision_rate(&u, &u, -1.0, T, &params).is_err());
}

#[test]
fn comoving_rate_vanishes_as_gas_cools() {
    let params = GasParams::default();
    let u = Vec3::new(1.0, 2.0, 3.0);
    let rates: Vec<f64> = [1.0, 1e-4, 1e-8, 1e-12]
        .iter()
        .map(|&t| collision_rate(&u, &u, 1e21, t, &params).unwrap())
        .collect();
    assert!(rates.windows(2).all(|w| w[1] < w[0]));
    assert!(rates[3] < 1e-5 * rates[0]);
}

#[test]
fn mean_free_path_ratio_limits() {
    let ratio = |m_amu: f64| {
        let params = GasParams::from_amu(1.2e-17, m_amu, 4.0).unwrap();
        mean_free_path_check(1e21, T, &params).unwrap().ratio()
    };
    assert!((ratio(128.0) - (132.0f64 / 128.0).sqrt()).abs() < 1e-12);
    assert!((ratio(4.0) - 2f64.sqrt()).abs() < 1e-12);
    assert!((ratio(1e9) - 1.0).abs() < 1e-8);
    assert!(ratio(128.0) > ratio(1e4));
}

fn vec3() -> impl Strategy<Value = Vec3> {
    prop::array::uniform3(-500.0f64..500.0).prop_map(Vec3::from)
}

proptest! {
    #[test]
    fn collisions_conserve_momentum_and_energy(v in vec3(), w in vec3(), seed in any::<u64>()) {
        let params = GasParams::default();
        let (m, mb) = (params.molecule_mass, params.buffer_mass);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut twin = rng.clone();
        let (v2, w2) = scatter_pair(&v, &w, &params, &mut rng);
        prop_assert_eq!(elastic_update(&v, &w, &params, &mut twin), v2);
        let p_scale = m * v.norm() + mb * w.norm() + 1e-30;
        prop_assert!(((v2 * m + w2 * mb) - (v * m + w * mb)).norm() <= 1e-12 * p_scale);
        let e0 = m * v.norm_squared() + mb * w.norm_squared();
        let e1 = m * v2.norm_squared() + mb * w2.norm_squared();
        prop_assert!((e1 - e0).abs() <= 1e-12 * e0.max(1e-300));
    }
}

proptest! {
    #[test]
    fn rate_is_non_decreasing_in_speed_density_and_temperature(
        v in vec3(),
        u in vec3(),
        scale in 1.0f64..10.0,
        n in 1e18f64..1e23,
        t in 0.1f64..1000.0,
    ) {
        let params = GasParams::default();
        let base = collision_rate(&v, &u, n, t, &params).unwrap();
        let faster = collision_rate(&(u + (v - u) * scale), &u, n, t, &params).unwrap();
        prop_assert!(faster >= base);
        prop_assert!(collision_rate(&v, &u, n * scale, t, &params).unwrap() >= base);
        prop_assert!(collision_rate(&v, &u, n, t * scale, &params).unwrap() >= base);
    }
}
