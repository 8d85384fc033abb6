use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use smallcell::access::{allocate, interferer_mtilde_pmf, typical_joint_pmf, PmfMethod, SchemeId, SdmaAccounting};
use smallcell::load::LoadPmf;
use statrs::distribution::{ChiSquared, ContinuousCDF};

const SCHEMES: [SchemeId; 2] = [SchemeId::Scheme1, SchemeId::Scheme2];

#[test]
fn typical_subchannel_is_uniform() {
    let trials = 10_000;
    let mut rng = ChaCha8Rng::seed_from_u64(404);
    for scheme in SCHEMES {
        for (k, n, m_max) in [(1, 4, 1), (3, 5, 2), (7, 3, 2), (12, 6, 3)] {
            let mut hits = vec![0u32; n];
            for _ in 0..trials {
                hits[allocate(scheme, k, n, m_max, &mut rng).assignments[0].subchannel] += 1;
            }
            let expected = trials as f64 / n as f64;
            let stat: f64 = hits.iter().map(|&h| (h as f64 - expected).powi(2) / expected).sum();
            let p = 1.0 - ChiSquared::new((n - 1) as f64).unwrap().cdf(stat);
            assert!(p > 0.001, "{scheme} k={k} n={n}: chi2 {stat:.2}, p {p:.2e}");
        }
    }
}

#[test]
fn scheme1_without_crowding_never_shares() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for n in 1..8 {
        for k in 0..=n {
            for _ in 0..50 {
                let counts = allocate(SchemeId::Scheme1, k, n, 3, &mut rng).subchannel_counts();
                assert!(counts.iter().all(|&c| c <= 1));
            }
        }
    }
}

/// Largest deviation of a sampled pmf from the enumerated one, in binomial standard errors.
fn worst_z(mc: &[f64], exact: &[f64], samples: f64) -> f64 {
    let len = mc.len().max(exact.len());
    (0..len)
        .map(|i| {
            let (q, p) = (mc.get(i).copied().unwrap_or(0.0), exact.get(i).copied().unwrap_or(0.0));
            let se = (p * (1.0 - p) / samples).sqrt();
            if se == 0.0 {
                if (q - p).abs() < 1e-12 {
                    0.0
                } else {
                    f64::INFINITY
                }
            } else {
                (q - p).abs() / se
            }
        })
        .fold(0.0, f64::max)
}

#[test]
fn sampled_pmfs_agree_with_enumeration() {
    let samples = 100_000;
    let mc = PmfMethod::MonteCarlo { samples, seed: 2024 };
    for scheme in SCHEMES {
        for k in 1..=6 {
            for n in 1..=6 {
                let m_max = 2;
                let load = LoadPmf::degenerate(k);
                let a = interferer_mtilde_pmf(scheme, SdmaAccounting::Pooled, &load, n, m_max, mc).unwrap();
                let b = interferer_mtilde_pmf(scheme, SdmaAccounting::Pooled, &load, n, m_max, PmfMethod::Enumeration).unwrap();
                let z = worst_z(a.probs(), b.probs(), samples as f64);
                assert!(z <= 3.0, "{scheme} K={k} N={n} interferer mark: {z:.2} se");

                let extra = LoadPmf::degenerate(k - 1);
                let a = typical_joint_pmf(scheme, SdmaAccounting::Pooled, &extra, n, m_max, mc).unwrap();
                let b = typical_joint_pmf(scheme, SdmaAccounting::Pooled, &extra, n, m_max, PmfMethod::Enumeration).unwrap();
                let cells: Vec<(usize, usize)> = (1..=k).flat_map(|k0| (1..=m_max).map(move |m| (k0, m))).collect();
                let pa: Vec<f64> = cells.iter().map(|&(k0, m)| a.prob(k0, m)).collect();
                let pb: Vec<f64> = cells.iter().map(|&(k0, m)| b.prob(k0, m)).collect();
                let z = worst_z(&pa, &pb, samples as f64);
                assert!(z <= 3.0, "{scheme} K={k} N={n} typical (K0, M): {z:.2} se");
            }
        }
    }
}
