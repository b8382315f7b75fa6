//! Classical → quantum → classical communication.
//!
//! A message k drawn with probability λ_k is coded to the state σ_k, sent
//! through a quantum channel, and read out by a POVM. The whole chain acts
//! on message indices as a finite classical channel.

use serde::{Deserialize, Serialize};

use crate::channels::{ClassicalChannel, MeasurementDecoding, QuantumChannel, QuantumCoding};
use crate::error::{Error, Result};
use crate::states::{check_distribution, DensityMatrix};

/// Distribution over a finite message set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MessageEnsemble {
    probabilities: Vec<f64>,
}

impl MessageEnsemble {
    pub fn new(probabilities: Vec<f64>) -> Result<Self> {
        if probabilities.is_empty() {
            return Err(Error::NotDistribution {
                reason: "empty message set".into(),
            });
        }
        check_distribution(&probabilities, 1e-10)?;
        Ok(Self { probabilities })
    }

    pub fn uniform(n: usize) -> Result<Self> {
        Self::new(vec![1.0 / n as f64; n])
    }

    /// The point mass on message `k`.
    pub fn delta(n: usize, k: usize) -> Result<Self> {
        if k >= n {
            return Err(Error::LengthMismatch {
                context: "delta message index".into(),
                expected: n,
                found: k,
            });
        }
        let mut p = vec![0.0; n];
        p[k] = 1.0;
        Self::new(p)
    }

    pub fn n_messages(&self) -> usize {
        self.probabilities.len()
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probabilities
    }
}

/// Coding, channel and decoding with matching dimensions.
#[derive(Debug, Clone, PartialEq)]
pub struct CqcPipeline {
    coding: QuantumCoding,
    channel: QuantumChannel,
    decoding: MeasurementDecoding,
}

impl CqcPipeline {
    pub fn coding(&self) -> &QuantumCoding {
        &self.coding
    }

    pub fn channel(&self) -> &QuantumChannel {
        &self.channel
    }

    pub fn decoding(&self) -> &MeasurementDecoding {
        &self.decoding
    }

    pub fn n_symbols(&self) -> usize {
        self.coding.n_symbols()
    }

    pub(crate) fn check_lambda(&self, lambda: &[f64]) -> Result<()> {
        if lambda.len() != self.n_symbols() {
            return Err(Error::LengthMismatch {
                context: "input distribution vs coding".into(),
                expected: self.n_symbols(),
                found: lambda.len(),
            });
        }
        check_distribution(lambda, 1e-10)
    }
}

pub fn build_pipeline(
    codes: QuantumCoding,
    ch: QuantumChannel,
    dec: MeasurementDecoding,
) -> Result<CqcPipeline> {
    if codes.dim() != ch.dim_in() {
        return Err(Error::DimMismatch {
            context: "coding→channel".into(),
            expected: ch.dim_in(),
            found: codes.dim(),
        });
    }
    if ch.dim_out() != dec.dim_in() {
        return Err(Error::DimMismatch {
            context: "channel→decoding".into(),
            expected: ch.dim_out(),
            found: dec.dim_in(),
        });
    }
    Ok(CqcPipeline {
        coding: codes,
        channel: ch,
        decoding: dec,
    })
}

/// Every stage of one pass through a pipeline.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PipelineTrace {
    pub input: Vec<f64>,
    pub coded: DensityMatrix,
    pub transmitted: DensityMatrix,
    pub decoded: Vec<f64>,
}

pub fn trace_pipeline(pipe: &CqcPipeline, ensemble: &MessageEnsemble) -> Result<PipelineTrace> {
    let lambda = ensemble.probabilities();
    pipe.check_lambda(lambda)?;
    let coded = DensityMatrix::mixture(lambda, pipe.coding.states())?;
    let transmitted = pipe.channel.image(&coded);
    let decoded = pipe.decoding.probabilities(transmitted.matrix());
    Ok(PipelineTrace {
        input: lambda.to_vec(),
        coded,
        transmitted,
        decoded,
    })
}

/// T_jk = tr(M_j Γ*σ_k).
pub fn induced_classical_channel(pipe: &CqcPipeline) -> ClassicalChannel {
    let n_out = pipe.decoding.n_outcomes();
    let mut t = vec![vec![0.0; pipe.n_symbols()]; n_out];
    for (k, s) in pipe.coding.states().iter().enumerate() {
        let col = pipe.decoding.probabilities(pipe.channel.image(s).matrix());
        for (j, p) in col.into_iter().enumerate() {
            t[j][k] = p;
        }
    }
    ClassicalChannel::new(t).expect("POVM outcomes on a state form a distribution")
}
