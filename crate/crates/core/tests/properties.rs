use proptest::prelude::*;
use rand::Rng;

use qentropy::capacity::{cqc_mutual, holevo_bound, simplex_capacity};
use qentropy::channels::{apply, compose, ClassicalChannel, MeasurementDecoding, QuantumChannel, QuantumCoding};
use qentropy::cli::random_zoo_channel;
use qentropy::cqc::{build_pipeline, induced_classical_channel, trace_pipeline, MessageEnsemble};
use qentropy::entropy::{classical_mutual, shannon, umegaki_relative, von_neumann};
use qentropy::linalg::{frobenius_distance, hermitian_eig, unitarity_defect};
use qentropy::mutual::{cross_check_forms, mutual_entropy, pseudo_mutual_entropy};
use qentropy::random::{flat_dirichlet, haar_unitary, random_pure_vector, random_stochastic, stream_rng};
use qentropy::search::SearchParams;
use qentropy::states::{density_with_spectrum, random_density, sample_schatten, spectral_decomposition};

fn config(cases: u32) -> ProptestConfig {
    ProptestConfig {
        cases,
        ..ProptestConfig::default()
    }
}

proptest! {
    #![proptest_config(config(64))]

    #[test]
    fn eigendecomposition_reconstructs(d in 1usize..7, seed in any::<u64>()) {
        let rho = random_density(d, d, seed).unwrap();
        let e = hermitian_eig(rho.matrix()).unwrap();
        prop_assert!(frobenius_distance(&e.reconstruct(), rho.matrix()) < 1e-10);
        prop_assert!(unitarity_defect(&e.eigenvectors) < 1e-10);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] >= w[1] - 1e-14));
    }

    #[test]
    fn haar_unitaries_are_unitary(d in 1usize..7, seed in any::<u64>()) {
        let u = haar_unitary(d, &mut stream_rng(seed, 0));
        prop_assert!(unitarity_defect(&u) < 1e-10);
    }

    #[test]
    fn random_states_are_states(d in 1usize..6, seed in any::<u64>()) {
        let rank = 1 + (seed as usize) % d;
        let rho = random_density(d, rank, seed).unwrap();
        let tr = rho.matrix().trace().unwrap();
        prop_assert!((tr.re - 1.0).abs() < 1e-12 && tr.im.abs() < 1e-12);
        prop_assert!(rho.eigenvalues().iter().all(|&x| x > -1e-12));
        let rank_found = rho.eigenvalues().iter().filter(|&&x| x > 1e-10).count();
        prop_assert_eq!(rank_found, rank);
    }

    #[test]
    fn entropy_within_bounds(d in 1usize..6, seed in any::<u64>()) {
        let rho = random_density(d, d, seed).unwrap();
        let s = von_neumann(&rho).nats();
        prop_assert!(s >= -1e-12 && s <= (d as f64).ln() + 1e-12);
    }

    #[test]
    fn relative_entropy_nonnegative(d in 1usize..5, seed in any::<u64>()) {
        let rho = random_density(d, 1 + (seed as usize) % d, seed).unwrap();
        let sigma = random_density(d, d, seed.wrapping_add(1)).unwrap();
        prop_assert!(umegaki_relative(&rho, &sigma, 1e-10).unwrap().nats() >= -1e-10);
        prop_assert!(umegaki_relative(&rho, &rho, 1e-10).unwrap().nats().abs() < 1e-9);
    }

    #[test]
    fn channels_preserve_states(d in 2usize..5, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 1);
        let ch = random_zoo_channel(d, &mut rng);
        prop_assert!(ch.trace_preservation_defect() < 1e-12);
        let rho = random_density(d, d, rng.random()).unwrap();
        let out = apply(&ch, &rho).unwrap();
        prop_assert!(out.eigenvalues().iter().all(|&x| x > -1e-12));
        let back = QuantumChannel::from_choi(&ch.choi(), d, d).unwrap();
        prop_assert!(frobenius_distance(apply(&back, &rho).unwrap().matrix(), out.matrix()) < 1e-9);
    }

    #[test]
    fn data_processing(d in 2usize..4, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 2);
        let (a, b) = (random_zoo_channel(d, &mut rng), random_zoo_channel(d, &mut rng));
        let rho = random_density(d, d, rng.random()).unwrap();
        let sigma = random_density(d, d, rng.random()).unwrap();
        let before = umegaki_relative(&rho, &sigma, 1e-10).unwrap().nats();
        let ab = compose(&b, &a).unwrap();
        let after = umegaki_relative(&apply(&ab, &rho).unwrap(), &apply(&ab, &sigma).unwrap(), 1e-10).unwrap().nats();
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn classical_mutual_bounded(n_in in 2usize..6, n_out in 2usize..6, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 3);
        let mu = flat_dirichlet(n_in, &mut rng);
        let t = ClassicalChannel::new(random_stochastic(n_out, n_in, &mut rng)).unwrap();
        let i = classical_mutual(&mu, &t).unwrap().nats();
        prop_assert!(i >= -1e-12);
        prop_assert!(i <= shannon(&mu).unwrap().nats() + 1e-12);
        prop_assert!(i <= shannon(&t.push_forward(&mu)).unwrap().nats() + 1e-12);
    }

    #[test]
    fn simplex_gap_certifies(n_in in 2usize..5, n_out in 2usize..5, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 4);
        let t = ClassicalChannel::new(random_stochastic(n_out, n_in, &mut rng)).unwrap();
        let sol = simplex_capacity(&t, 1e-9, 20000);
        let probe = flat_dirichlet(n_in, &mut rng);
        let other = classical_mutual(&probe, &t).unwrap().nats();
        prop_assert!(other <= sol.value + sol.gap + 1e-12);
    }
}

proptest! {
    #![proptest_config(config(24))]

    #[test]
    fn mutual_between_zero_and_entropy(d in 2usize..5, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 5);
        let ch = random_zoo_channel(d, &mut rng);
        let rho = random_density(d, d, rng.random()).unwrap();
        let i = mutual_entropy(&rho, &ch, &SearchParams::default()).unwrap().value.nats();
        prop_assert!(i >= -1e-10 && i <= von_neumann(&rho).nats() + 1e-8);
    }

    #[test]
    fn forms_agree_on_degenerate_spectra(d in 2usize..5, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 6);
        let ch = random_zoo_channel(d, &mut rng);
        let rho = density_with_spectrum(&vec![1.0 / d as f64; d], rng.random()).unwrap();
        let e = sample_schatten(&spectral_decomposition(&rho, 1e-8), rng.random());
        prop_assert!(cross_check_forms(&rho, &ch, &e).unwrap().agrees(1e-8));
    }

    #[test]
    fn pseudo_dominates_mutual(seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 7);
        let ch = random_zoo_channel(2, &mut rng);
        let rho = random_density(2, 2, rng.random()).unwrap();
        let search = SearchParams::default().with_restarts(2).with_refine_iters(20).with_seed(seed);
        let i = mutual_entropy(&rho, &ch, &search).unwrap().value.nats();
        let ip = pseudo_mutual_entropy(&rho, &ch, &search).unwrap().value.nats();
        prop_assert!(ip >= i - 1e-9);
    }

    #[test]
    fn pipelines_are_stochastic(d in 2usize..4, symbols in 2usize..5, seed in any::<u64>()) {
        let mut rng = stream_rng(seed, 8);
        let codes = QuantumCoding::from_vectors(
            &(0..symbols).map(|_| random_pure_vector(d, &mut rng)).collect::<Vec<_>>(),
        ).unwrap();
        let ch = random_zoo_channel(d, &mut rng);
        let dec = MeasurementDecoding::projective(&haar_unitary(d, &mut rng)).unwrap();
        let lambda = flat_dirichlet(symbols, &mut rng);
        let pipe = build_pipeline(codes.clone(), ch.clone(), dec).unwrap();
        let t = induced_classical_channel(&pipe);
        let trace = trace_pipeline(&pipe, &MessageEnsemble::new(lambda.clone()).unwrap()).unwrap();
        let pushed = t.push_forward(&lambda);
        prop_assert!(trace.decoded.iter().zip(&pushed).all(|(a, b)| (a - b).abs() < 1e-10));
        let i = cqc_mutual(&pipe, &lambda).unwrap().nats();
        prop_assert!(i <= holevo_bound(&lambda, &codes, &ch).unwrap().nats() + 1e-8);
    }
}
