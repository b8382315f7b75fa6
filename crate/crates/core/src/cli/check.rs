//! Built-in invariant battery.

use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::report::{InvariantResult, RunReport};
use crate::capacity::{
    cqc_mutual, holevo_bound, verify_chains, ChainScenario, CodingFamily, DecodingFamily, DistributionSet, StateSet,
};
use crate::channels::{channel_zoo, embed_classical, ClassicalChannel, MeasurementDecoding, QuantumChannel, QuantumCoding};
use crate::cqc::{build_pipeline, induced_classical_channel};
use crate::entropy::{
    classical_mutual, orthogonal_additivity_check, relative_entropy_scaling_check, von_neumann,
};
use crate::linalg::{frobenius_distance, ComplexMatrix};
use crate::mutual::{
    classical_input_mutual, cross_check_forms, mutual_entropy, mutual_orthogonal, shannon_form,
};
use crate::random::{flat_dirichlet, haar_unitary, random_pure_vector, random_stochastic, stream_rng};
use crate::search::SearchParams;
use crate::states::{
    density_with_spectrum, random_coarse_graining, random_density, sample_schatten, spectral_decomposition,
    DensityMatrix,
};

/// Random channel from the zoo acting on dimension `d`.
pub fn random_zoo_channel<R: Rng + ?Sized>(d: usize, rng: &mut R) -> QuantumChannel {
    let p: f64 = rng.random();
    let names: &[&str] = if d == 2 {
        &["identity", "depolarizing", "dephasing", "bit-flip", "phase-flip", "amplitude-damping"]
    } else {
        &["identity", "depolarizing", "dephasing"]
    };
    let name = names[rng.random_range(0..names.len())];
    let params = if name == "identity" { vec![d as f64] } else if d == 2 { vec![p] } else { vec![p, d as f64] };
    channel_zoo(name, &params).expect("zoo parameters in range")
}

struct Battery {
    dim: usize,
    seed: u64,
    out: Vec<InvariantResult>,
}

impl Battery {
    fn push(&mut self, name: &str, passed: bool, dump: serde_json::Value) {
        self.out.push(InvariantResult {
            name: format!("{name} [dim {}, seed {}]", self.dim, self.seed),
            passed,
            dump,
        });
    }

    fn push_err(&mut self, name: &str, e: crate::Error) {
        self.push(name, false, json!({ "error": e.to_string() }));
    }
}

/// `m` placed as the diagonal block starting at `offset` of an n×n zero matrix.
pub fn block_embed(m: &ComplexMatrix, offset: usize, n: usize) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(n, n);
    for i in 0..m.rows() {
        for j in 0..m.cols() {
            out[(offset + i, offset + j)] = m[(i, j)];
        }
    }
    out
}

fn ratio(a: f64, b: f64) -> f64 {
    if b.abs() > 1e-300 {
        a / b
    } else {
        f64::NAN
    }
}

fn run_battery(dim: usize, seed: u64, search: &SearchParams) -> Vec<InvariantResult> {
    let mut b = Battery { dim, seed, out: vec![] };
    let mut rng = stream_rng(seed, 900 + dim as u64);
    let search = search.with_seed(seed);

    // identity channel: I(ρ; id) = S(ρ)
    let rho = random_density(dim, dim, rng.random()).expect("valid rank");
    match mutual_entropy(&rho, &QuantumChannel::identity(dim), &search) {
        Ok(o) => {
            let s = von_neumann(&rho).nats();
            let i = o.value.nats();
            b.push(
                "identity-channel law",
                (i - s).abs() < 1e-8,
                json!({ "mutual_entropy": i, "entropy": s, "ratio": ratio(i, s) }),
            );
        }
        Err(e) => b.push_err("identity-channel law", e),
    }

    // 0 ≤ I ≤ S(ρ) through a zoo channel
    let ch = random_zoo_channel(dim, &mut rng);
    match mutual_entropy(&rho, &ch, &search) {
        Ok(o) => {
            let s = von_neumann(&rho).nats();
            let i = o.value.nats();
            b.push("fundamental inequality", i >= -1e-10 && i <= s + 1e-8, json!({ "mutual_entropy": i, "entropy": s }));
        }
        Err(e) => b.push_err("fundamental inequality", e),
    }

    // embedded classical channel on a diagonal state
    let mu = flat_dirichlet(dim, &mut rng);
    let t = ClassicalChannel::new(random_stochastic(dim, dim, &mut rng)).expect("stochastic");
    let classical = classical_mutual(&mu, &t).map(|v| v.nats());
    let quantum = DensityMatrix::diagonal(&mu).and_then(|r| mutual_entropy(&r, &embed_classical(&t), &search));
    match (classical, quantum) {
        (Ok(c), Ok(q)) => {
            let q = q.value.nats();
            b.push("classical reduction", (c - q).abs() < 1e-8, json!({ "quantum": q, "classical": c }));
        }
        (Err(e), _) | (_, Err(e)) => b.push_err("classical reduction", e),
    }

    // compound-state form equals decomposition form, generic and degenerate
    let mut spectrum = flat_dirichlet(dim, &mut rng);
    if dim > 1 {
        let avg = (spectrum[0] + spectrum[1]) / 2.0;
        spectrum[0] = avg;
        spectrum[1] = avg;
    }
    for (label, state) in [("generic", rho.clone()), ("degenerate", density_with_spectrum(&spectrum, rng.random()).expect("spectrum"))] {
        let spec = spectral_decomposition(&state, search.gap_tol);
        let e = sample_schatten(&spec, rng.random());
        match cross_check_forms(&state, &ch, &e) {
            Ok(fc) => b.push(
                &format!("form equivalence ({label})"),
                fc.agrees(1e-8),
                json!({ "decomposition_form": fc.decomposition_form.nats(), "compound_form": fc.compound_form.nats() }),
            ),
            Err(e) => b.push_err("form equivalence", e),
        }
    }

    // I_f ≤ I, and refining a coarse-graining does not decrease the value
    let spec = spectral_decomposition(&rho, search.gap_tol);
    let e = sample_schatten(&spec, rng.random());
    let coarse = random_coarse_graining(&e, dim, &mut rng);
    let fine = coarse.refine(search.gap_tol);
    let r = (|| -> crate::Result<(f64, f64, f64)> {
        Ok((
            mutual_orthogonal(&rho, &ch, &coarse)?.nats(),
            mutual_entropy(&rho, &ch, &search)?.value.nats(),
            mutual_orthogonal(&rho, &ch, &fine.to_orthogonal())?.nats(),
        ))
    })();
    match r {
        Ok((c, i, f)) => {
            b.push("I_f <= I", c <= i + 1e-8, json!({ "coarse": c, "mutual_entropy": i }));
            b.push("refinement does not decrease", f >= c - 1e-8, json!({ "coarse": c, "refined": f }));
        }
        Err(e) => b.push_err("orthogonal decompositions", e),
    }

    // relative entropy identities
    let sigma = random_density(dim, dim, rng.random()).expect("valid rank");
    let (a, bb) = (rng.random_range(0.1..2.0), rng.random_range(0.1..2.0));
    match relative_entropy_scaling_check(&rho, &sigma, a, bb) {
        Ok((l, r)) => {
            let (l, r) = (l.nats(), r.nats());
            b.push("relative entropy scaling", (l - r).abs() < 1e-9, json!({ "lhs": l, "rhs": r }));
        }
        Err(e) => b.push_err("relative entropy scaling", e),
    }
    let w: f64 = rng.random_range(0.1..0.9);
    let r1 = block_embed(random_density(dim, dim, rng.random()).expect("valid rank").matrix(), 0, 2 * dim).scale_real(w);
    let r2 = block_embed(random_density(dim, dim, rng.random()).expect("valid rank").matrix(), dim, 2 * dim)
        .scale_real(1.0 - w);
    let sig2 = random_density(2 * dim, 2 * dim, rng.random()).expect("valid rank");
    match orthogonal_additivity_check(&r1, &r2, &sig2) {
        Ok((l, r)) => {
            let (l, r) = (l.nats(), r.nats());
            b.push("orthogonal additivity", (l - r).abs() < 1e-9, json!({ "lhs": l, "rhs": r }));
        }
        Err(e) => b.push_err("orthogonal additivity", e),
    }

    // C-Q-C pipeline identities
    let codes = QuantumCoding::from_vectors(&(0..dim).map(|_| random_pure_vector(dim, &mut rng)).collect::<Vec<_>>())
        .expect("unit vectors");
    let dec = MeasurementDecoding::projective(&haar_unitary(dim, &mut rng)).expect("unitary frame");
    let lambda = flat_dirichlet(dim, &mut rng);
    let r = (|| -> crate::Result<[f64; 5]> {
        let pipe = build_pipeline(codes.clone(), ch.clone(), dec.clone())?;
        Ok([
            cqc_mutual(&pipe, &lambda)?.nats(),
            holevo_bound(&lambda, &codes, &ch)?.nats(),
            classical_mutual(&lambda, &induced_classical_channel(&pipe))?.nats(),
            classical_input_mutual(&lambda, &codes, &ch)?.nats(),
            shannon_form(&lambda, &codes, &ch)?.nats(),
        ])
    })();
    match r {
        Ok([m, h, cl, ci, sf]) => {
            b.push("holevo domination", m <= h + 1e-8, json!({ "cqc_mutual": m, "holevo_bound": h }));
            b.push("induced classical channel", (m - cl).abs() < 1e-10, json!({ "cqc_mutual": m, "classical": cl }));
            b.push("data processing", m <= ci + 1e-8, json!({ "cqc_mutual": m, "classical_input_mutual": ci }));
            b.push("entropy-difference form", (ci - sf).abs() < 1e-8, json!({ "relative_form": ci, "shannon_form": sf }));
        }
        Err(e) => b.push_err("pipeline identities", e),
    }

    // channel outputs are states
    let out = ch.map_operator(rho.matrix());
    let tr = out.trace().map(|t| t.re).unwrap_or(f64::NAN);
    b.push(
        "trace preservation",
        (tr - 1.0).abs() < 1e-10 && frobenius_distance(&out, &out.adjoint()) < 1e-10,
        json!({ "trace": tr }),
    );
    b.out
}

/// Capacity-chain scenario for one dimension and seed.
pub fn chain_scenario(dim: usize, seed: u64, search: &SearchParams) -> ChainScenario {
    let mut rng = stream_rng(seed, 950 + dim as u64);
    let channel = random_zoo_channel(dim, &mut rng);
    let coding = QuantumCoding::from_vectors(&(0..dim).map(|_| random_pure_vector(dim, &mut rng)).collect::<Vec<_>>())
        .expect("unit vectors");
    let decoding = MeasurementDecoding::projective(&haar_unitary(dim, &mut rng)).expect("unitary frame");
    ChainScenario {
        id: format!("chain-d{dim}-s{seed:04}"),
        channel,
        states: StateSet::FullSpace(dim),
        coding,
        decoding,
        inputs: DistributionSet::FullSimplex(dim),
        coding_family: CodingFamily {
            members: vec![QuantumCoding::basis(dim)],
            constellation: Some(dim),
        },
        decoding_family: DecodingFamily {
            members: vec![MeasurementDecoding::basis(dim)],
            projective: true,
        },
        search: search.with_seed(seed),
    }
}

/// Search budget used by the battery.
pub fn battery_search() -> SearchParams {
    SearchParams::default().with_restarts(2).with_refine_iters(20)
}

/// Runs the invariant battery of every module for each (dim, seed) pair,
/// including the capacity chains.
pub fn check_suite(dims: &[usize], seeds: &[u64]) -> RunReport {
    let search = battery_search();
    let pairs: Vec<(usize, u64)> = dims.iter().flat_map(|&d| seeds.iter().map(move |&s| (d, s))).collect();
    let mut invariants: Vec<InvariantResult> = pairs
        .par_iter()
        .flat_map(|&(d, s)| run_battery(d, s, &search))
        .collect();
    let chains: Vec<ChainScenario> = pairs.iter().map(|&(d, s)| chain_scenario(d, s, &search)).collect();
    let report = verify_chains(&chains);
    for c in &report.checks {
        invariants.push(InvariantResult {
            name: format!("{} [{}]", c.relation, c.scenario),
            passed: c.holds,
            dump: json!({ "lhs": c.lhs, "rhs": c.rhs }),
        });
    }
    for (id, e) in &report.errors {
        invariants.push(InvariantResult {
            name: format!("capacity chains [{id}]"),
            passed: false,
            dump: json!({ "error": e }),
        });
    }
    RunReport {
        scenario: "check".into(),
        seed: seeds.first().copied().unwrap_or(0),
        records: vec![],
        invariants,
    }
}
