//! Declarative scenario files.
//!
//! Scenarios are JSON documents. Complex numbers are `[re, im]` pairs and
//! matrices are row-major nested arrays of them. Every object is validated
//! when the scenario is parsed, so a scenario that parses will run.

use serde::{Deserialize, Serialize};

use crate::capacity::{CodingFamily, DecodingFamily, DistributionSet, StateSet};
use crate::channels::{channel_zoo, MeasurementDecoding, QuantumChannel, QuantumCoding};
use crate::cqc::{build_pipeline, CqcPipeline};
use crate::error::Error;
use crate::linalg::{c, ComplexMatrix, C64};
use crate::search::SearchParams;
use crate::states::{density_with_spectrum, random_density, validate_density, DensityMatrix};

pub type Complex = [f64; 2];
pub type MatrixSpec = Vec<Vec<Complex>>;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("parse error at line {line}, column {column} (field `{path}`): {message}")]
    Parse {
        line: usize,
        column: usize,
        path: String,
        message: String,
    },
    #[error("invalid `{field}`: {source}")]
    Validation {
        field: String,
        #[source]
        source: Error,
    },
}

fn invalid(field: impl Into<String>) -> impl FnOnce(Error) -> ScenarioError {
    let field = field.into();
    move |source| ScenarioError::Validation { field, source }
}

pub(crate) fn to_complex(z: &Complex) -> C64 {
    c(z[0], z[1])
}

pub(crate) fn from_complex(z: C64) -> Complex {
    [z.re, z.im]
}

pub fn matrix_from_spec(m: &MatrixSpec) -> crate::Result<ComplexMatrix> {
    let rows: Vec<Vec<C64>> = m.iter().map(|r| r.iter().map(to_complex).collect()).collect();
    ComplexMatrix::from_rows(&rows)
}

pub fn matrix_to_spec(m: &ComplexMatrix) -> MatrixSpec {
    m.to_rows()
        .into_iter()
        .map(|r| r.into_iter().map(from_complex).collect())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSpec {
    Matrix(MatrixSpec),
    Diagonal(Vec<f64>),
    MaximallyMixed(usize),
    /// Unnormalized amplitudes of a pure state.
    Pure(Vec<Complex>),
    Basis { dim: usize, index: usize },
    Random { dim: usize, rank: usize, seed: u64 },
    /// The given spectrum, repeated values allowed, in a random frame.
    Spectrum { eigenvalues: Vec<f64>, seed: u64 },
}

impl StateSpec {
    pub fn build(&self) -> crate::Result<DensityMatrix> {
        match self {
            Self::Matrix(m) => validate_density(&matrix_from_spec(m)?),
            Self::Diagonal(p) => DensityMatrix::diagonal(p),
            Self::MaximallyMixed(d) => Ok(DensityMatrix::maximally_mixed(*d)),
            Self::Pure(v) => DensityMatrix::pure(&v.iter().map(to_complex).collect::<Vec<_>>()),
            Self::Basis { dim, index } => {
                if index >= dim {
                    return Err(Error::RankOutOfRange { dim: *dim, rank: *index });
                }
                Ok(DensityMatrix::basis(*dim, *index))
            }
            Self::Random { dim, rank, seed } => random_density(*dim, *rank, *seed),
            Self::Spectrum { eigenvalues, seed } => density_with_spectrum(eigenvalues, *seed),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelSpec {
    Zoo {
        name: String,
        #[serde(default)]
        params: Vec<f64>,
    },
    Kraus(Vec<MatrixSpec>),
    Choi {
        matrix: MatrixSpec,
        dim_in: usize,
        dim_out: usize,
    },
}

impl ChannelSpec {
    pub fn build(&self) -> crate::Result<QuantumChannel> {
        match self {
            Self::Zoo { name, params } => channel_zoo(name, params),
            Self::Kraus(ks) => QuantumChannel::new(ks.iter().map(matrix_from_spec).collect::<crate::Result<_>>()?),
            Self::Choi { matrix, dim_in, dim_out } => QuantumChannel::from_choi(&matrix_from_spec(matrix)?, *dim_in, *dim_out),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum CodingSpec {
    Basis(usize),
    States(Vec<StateSpec>),
    Vectors(Vec<Vec<Complex>>),
}

impl CodingSpec {
    pub fn build(&self) -> crate::Result<QuantumCoding> {
        match self {
            Self::Basis(d) => Ok(QuantumCoding::basis(*d)),
            Self::States(s) => QuantumCoding::new(s.iter().map(StateSpec::build).collect::<crate::Result<_>>()?),
            Self::Vectors(v) => QuantumCoding::from_vectors(
                &v.iter()
                    .map(|x| x.iter().map(to_complex).collect())
                    .collect::<Vec<_>>(),
            ),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DecodingSpec {
    Basis(usize),
    Trivial(usize),
    Povm(Vec<MatrixSpec>),
    /// Measurement in the orthonormal basis given by the frame's columns.
    Projective(MatrixSpec),
}

impl DecodingSpec {
    pub fn build(&self) -> crate::Result<MeasurementDecoding> {
        match self {
            Self::Basis(d) => Ok(MeasurementDecoding::basis(*d)),
            Self::Trivial(d) => Ok(MeasurementDecoding::trivial(*d)),
            Self::Povm(ms) => MeasurementDecoding::new(ms.iter().map(matrix_from_spec).collect::<crate::Result<_>>()?),
            Self::Projective(f) => MeasurementDecoding::projective(&matrix_from_spec(f)?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum StateSetSpec {
    FullSpace(usize),
    DiagonalSimplex(usize),
    Explicit(Vec<StateSpec>),
}

impl StateSetSpec {
    pub fn build(&self) -> crate::Result<StateSet> {
        match self {
            Self::FullSpace(d) => Ok(StateSet::FullSpace(*d)),
            Self::DiagonalSimplex(d) => Ok(StateSet::DiagonalSimplex(*d)),
            Self::Explicit(m) => StateSet::explicit(m.iter().map(StateSpec::build).collect::<crate::Result<_>>()?),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DistributionSetSpec {
    FullSimplex(usize),
    Explicit(Vec<Vec<f64>>),
}

impl DistributionSetSpec {
    pub fn build(&self) -> crate::Result<DistributionSet> {
        match self {
            Self::FullSimplex(n) => Ok(DistributionSet::FullSimplex(*n)),
            Self::Explicit(m) => DistributionSet::explicit(m.clone()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodingFamilySpec {
    pub members: Vec<CodingSpec>,
    pub constellation: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecodingFamilySpec {
    pub members: Vec<DecodingSpec>,
    pub projective: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Computation {
    Entropy,
    RelativeEntropy,
    MutualEntropy,
    FormCheck,
    PseudoMutualEntropy,
    ClassicalInputMutual,
    ShannonForm,
    QuantumCapacity,
    PseudoCapacity,
    CqcMutual,
    CqcCapacity,
    CodingCapacity,
    CodingDecodingCapacity,
    HolevoBound,
    TracePipeline,
    VerifyChains,
}

impl Computation {
    pub fn name(self) -> &'static str {
        match self {
            Self::Entropy => "entropy",
            Self::RelativeEntropy => "relative_entropy",
            Self::MutualEntropy => "mutual_entropy",
            Self::FormCheck => "form_check",
            Self::PseudoMutualEntropy => "pseudo_mutual_entropy",
            Self::ClassicalInputMutual => "classical_input_mutual",
            Self::ShannonForm => "shannon_form",
            Self::QuantumCapacity => "quantum_capacity",
            Self::PseudoCapacity => "pseudo_capacity",
            Self::CqcMutual => "cqc_mutual",
            Self::CqcCapacity => "cqc_capacity",
            Self::CodingCapacity => "coding_capacity",
            Self::CodingDecodingCapacity => "coding_decoding_capacity",
            Self::HolevoBound => "holevo_bound",
            Self::TracePipeline => "trace_pipeline",
            Self::VerifyChains => "verify_chains",
        }
    }
}

/// One scenario file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub id: String,
    #[serde(default)]
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub channel: Option<ChannelSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    /// Second argument of relative entropies.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<StateSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<StateSetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub inputs: Option<DistributionSetSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coding: Option<CodingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoding: Option<DecodingSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub coding_family: Option<CodingFamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub decoding_family: Option<DecodingFamilySpec>,
    #[serde(default)]
    pub search: SearchParams,
    pub computations: Vec<Computation>,
}

/// A scenario with every object built and dimension-checked.
#[derive(Debug, Clone)]
pub struct Resolved {
    pub channel: Option<QuantumChannel>,
    pub state: Option<DensityMatrix>,
    pub reference: Option<DensityMatrix>,
    pub states: Option<StateSet>,
    pub lambda: Option<Vec<f64>>,
    pub inputs: Option<DistributionSet>,
    pub coding: Option<QuantumCoding>,
    pub decoding: Option<MeasurementDecoding>,
    pub pipeline: Option<CqcPipeline>,
    pub coding_family: CodingFamily,
    pub decoding_family: DecodingFamily,
    pub search: SearchParams,
}

fn build_opt<S, T>(spec: &Option<S>, field: &str, f: impl Fn(&S) -> crate::Result<T>) -> Result<Option<T>, ScenarioError> {
    spec.as_ref().map(f).transpose().map_err(invalid(field))
}

fn require<T>(v: &Option<T>, field: &str, comp: Computation) -> Result<(), ScenarioError> {
    if v.is_none() {
        return Err(ScenarioError::Validation {
            field: field.into(),
            source: Error::ParamOutOfRange {
                channel: comp.name().into(),
                reason: format!("`{field}` is required"),
            },
        });
    }
    Ok(())
}

impl Scenario {
    /// Builds every object, checking each against its invariants and the
    /// dimension chain, and checks that every computation has its inputs.
    pub fn resolve(&self) -> Result<Resolved, ScenarioError> {
        let channel = build_opt(&self.channel, "channel", ChannelSpec::build)?;
        let state = build_opt(&self.state, "state", StateSpec::build)?;
        let reference = build_opt(&self.reference, "reference", StateSpec::build)?;
        let states = build_opt(&self.states, "states", StateSetSpec::build)?;
        let inputs = build_opt(&self.inputs, "inputs", DistributionSetSpec::build)?;
        let coding = build_opt(&self.coding, "coding", CodingSpec::build)?;
        let decoding = build_opt(&self.decoding, "decoding", DecodingSpec::build)?;
        if let Some(l) = &self.lambda {
            crate::states::check_distribution(l, 1e-10).map_err(invalid("lambda"))?;
        }

        let mut coding_family = CodingFamily::default();
        if let Some(f) = &self.coding_family {
            for (i, m) in f.members.iter().enumerate() {
                coding_family
                    .members
                    .push(m.build().map_err(invalid(format!("coding_family.members[{i}]")))?);
            }
            coding_family.constellation = f.constellation;
        }
        let mut decoding_family = DecodingFamily::default();
        if let Some(f) = &self.decoding_family {
            for (i, m) in f.members.iter().enumerate() {
                decoding_family
                    .members
                    .push(m.build().map_err(invalid(format!("decoding_family.members[{i}]")))?);
            }
            decoding_family.projective = f.projective;
        }

        if let (Some(ch), Some(rho)) = (&channel, &state) {
            if rho.dim() != ch.dim_in() {
                return Err(ScenarioError::Validation {
                    field: "state".into(),
                    source: Error::DimMismatch {
                        context: "state vs channel input".into(),
                        expected: ch.dim_in(),
                        found: rho.dim(),
                    },
                });
            }
        }
        if let (Some(rho), Some(sigma)) = (&state, &reference) {
            if rho.dim() != sigma.dim() {
                return Err(ScenarioError::Validation {
                    field: "reference".into(),
                    source: Error::DimMismatch {
                        context: "reference vs state".into(),
                        expected: rho.dim(),
                        found: sigma.dim(),
                    },
                });
            }
        }
        if let (Some(ch), Some(s)) = (&channel, &states) {
            let d = s.dim().map_err(invalid("states"))?;
            if d != ch.dim_in() {
                return Err(ScenarioError::Validation {
                    field: "states".into(),
                    source: Error::DimMismatch {
                        context: "state set vs channel input".into(),
                        expected: ch.dim_in(),
                        found: d,
                    },
                });
            }
        }
        let pipeline = match (&coding, &channel, &decoding) {
            (Some(cd), Some(ch), Some(dec)) => {
                Some(build_pipeline(cd.clone(), ch.clone(), dec.clone()).map_err(invalid("decoding"))?)
            }
            _ => None,
        };
        if let (Some(cd), Some(l)) = (&coding, &self.lambda) {
            if cd.n_symbols() != l.len() {
                return Err(ScenarioError::Validation {
                    field: "lambda".into(),
                    source: Error::LengthMismatch {
                        context: "lambda vs coding".into(),
                        expected: cd.n_symbols(),
                        found: l.len(),
                    },
                });
            }
        }

        for &comp in &self.computations {
            use Computation::*;
            match comp {
                Entropy => require(&state, "state", comp)?,
                RelativeEntropy => {
                    require(&state, "state", comp)?;
                    require(&reference, "reference", comp)?;
                }
                MutualEntropy | FormCheck | PseudoMutualEntropy => {
                    require(&state, "state", comp)?;
                    require(&channel, "channel", comp)?;
                }
                ClassicalInputMutual | ShannonForm | HolevoBound => {
                    require(&coding, "coding", comp)?;
                    require(&channel, "channel", comp)?;
                    require(&self.lambda, "lambda", comp)?;
                }
                QuantumCapacity | PseudoCapacity => {
                    require(&channel, "channel", comp)?;
                    require(&states, "states", comp)?;
                }
                CqcMutual | TracePipeline => {
                    require(&pipeline, "decoding", comp)?;
                    require(&self.lambda, "lambda", comp)?;
                }
                CqcCapacity => {
                    require(&pipeline, "decoding", comp)?;
                    require(&inputs, "inputs", comp)?;
                }
                CodingCapacity => {
                    require(&decoding, "decoding", comp)?;
                    require(&channel, "channel", comp)?;
                    require(&inputs, "inputs", comp)?;
                    require(&self.coding_family, "coding_family", comp)?;
                }
                CodingDecodingCapacity => {
                    require(&channel, "channel", comp)?;
                    require(&inputs, "inputs", comp)?;
                    require(&self.coding_family, "coding_family", comp)?;
                    require(&self.decoding_family, "decoding_family", comp)?;
                }
                VerifyChains => {
                    require(&pipeline, "decoding", comp)?;
                    require(&states, "states", comp)?;
                    require(&inputs, "inputs", comp)?;
                }
            }
        }

        Ok(Resolved {
            channel,
            state,
            reference,
            states,
            lambda: self.lambda.clone(),
            inputs,
            coding,
            decoding,
            pipeline,
            coding_family,
            decoding_family,
            search: self.search.with_seed(self.seed),
        })
    }
}

/// Parses and validates a scenario.
pub fn parse_scenario(text: &[u8]) -> Result<Scenario, ScenarioError> {
    let mut de = serde_json::Deserializer::from_slice(text);
    let scenario: Scenario = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        ScenarioError::Parse {
            line: inner.line(),
            column: inner.column(),
            path,
            message: inner.to_string(),
        }
    })?;
    de.end().map_err(|e| ScenarioError::Parse {
        line: e.line(),
        column: e.column(),
        path: ".".into(),
        message: e.to_string(),
    })?;
    scenario.resolve()?;
    Ok(scenario)
}

pub fn serialize_scenario(s: &Scenario) -> String {
    serde_json::to_string_pretty(s).expect("scenario serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"{
        "id": "minimal",
        "channel": {"zoo": {"name": "identity", "params": [2]}},
        "state": {"maximally_mixed": 2},
        "computations": ["mutual_entropy"]
    }"#;

    #[test]
    fn minimal_scenario_parses() {
        let s = parse_scenario(MINIMAL.as_bytes()).unwrap();
        assert_eq!(s.computations, vec![Computation::MutualEntropy]);
        let again = parse_scenario(serialize_scenario(&s).as_bytes()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn non_trace_preserving_kraus_is_rejected() {
        let text = r#"{
            "id": "bad",
            "channel": {"kraus": [[[[1.0488088481701516, 0], [0, 0]], [[0, 0], [1, 0]]]]},
            "computations": []
        }"#;
        match parse_scenario(text.as_bytes()) {
            Err(ScenarioError::Validation {
                field,
                source: Error::NotTracePreserving { defect },
            }) => {
                assert_eq!(field, "channel");
                assert!((defect - 0.1).abs() < 1e-12, "{defect}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn complex_pairs_are_amplitudes() {
        let text = r#"{
            "id": "amp",
            "state": {"pure": [[0.5, -0.5], [0.5, 0.5]]},
            "computations": ["entropy"]
        }"#;
        let s = parse_scenario(text.as_bytes()).unwrap();
        let Some(StateSpec::Pure(v)) = &s.state else { panic!() };
        assert_eq!(to_complex(&v[0]), c(0.5, -0.5));
    }

    #[test]
    fn parse_errors_carry_location() {
        let text = "{\n  \"id\": \"x\",\n  \"seed\": \"seven\",\n  \"computations\": []\n}";
        match parse_scenario(text.as_bytes()) {
            Err(ScenarioError::Parse { line, path, .. }) => {
                assert_eq!(line, 3);
                assert_eq!(path, "seed");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_inputs_are_named() {
        let text = r#"{"id": "x", "computations": ["entropy"]}"#;
        match parse_scenario(text.as_bytes()) {
            Err(ScenarioError::Validation { field, .. }) => assert_eq!(field, "state"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn dimension_chain_is_checked() {
        let text = r#"{
            "id": "chain",
            "channel": {"zoo": {"name": "identity", "params": [3]}},
            "coding": {"basis": 2},
            "decoding": {"basis": 3},
            "computations": []
        }"#;
        assert!(matches!(
            parse_scenario(text.as_bytes()),
            Err(ScenarioError::Validation { source: Error::DimMismatch { .. }, .. })
        ));
    }
}
