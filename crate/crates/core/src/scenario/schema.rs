//! Serde model of scenario files. Complex scalars are `[re, im]` or a bare
//! real number; matrices are row-major nested arrays.

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Evolution,
    Sampling,
    MarkovChain,
    Process,
    QuantumWalk,
    Schrodinger,
    Jointness,
    BellExample,
}

impl Kind {
    pub const ALL: [Kind; 8] = [
        Kind::Evolution,
        Kind::Sampling,
        Kind::MarkovChain,
        Kind::Process,
        Kind::QuantumWalk,
        Kind::Schrodinger,
        Kind::Jointness,
        Kind::BellExample,
    ];
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawScenario {
    pub kind: Kind,
    #[serde(default)]
    pub name: Option<String>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub payload: serde_json::Value,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    pub tol: Option<f64>,
    pub horizon: Option<usize>,
    pub base_horizon: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub enum Num {
    Real(f64),
    Complex([f64; 2]),
}

impl<'de> Deserialize<'de> for Num {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct NumVisitor;

        impl<'de> serde::de::Visitor<'de> for NumVisitor {
            type Value = Num;

            fn expecting(&self, f: &mut std::fmt::Formatter) -> std::fmt::Result {
                f.write_str("a real number or a [re, im] pair")
            }

            fn visit_f64<E>(self, v: f64) -> Result<Num, E> {
                Ok(Num::Real(v))
            }

            fn visit_i64<E>(self, v: i64) -> Result<Num, E> {
                Ok(Num::Real(v as f64))
            }

            fn visit_u64<E>(self, v: u64) -> Result<Num, E> {
                Ok(Num::Real(v as f64))
            }

            fn visit_seq<A: serde::de::SeqAccess<'de>>(self, mut seq: A) -> Result<Num, A::Error> {
                use serde::de::Error;
                let re = seq.next_element::<f64>()?.ok_or_else(|| A::Error::invalid_length(0, &self))?;
                let im = seq.next_element::<f64>()?.ok_or_else(|| A::Error::invalid_length(1, &self))?;
                if seq.next_element::<serde::de::IgnoredAny>()?.is_some() {
                    return Err(A::Error::invalid_length(3, &self));
                }
                Ok(Num::Complex([re, im]))
            }
        }

        d.deserialize_any(NumVisitor)
    }
}

pub type VectorSpec = Vec<Num>;
pub type MatrixSpec = Vec<Vec<Num>>;
pub type RealMatrixSpec = Vec<Vec<f64>>;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EvolutionPayload {
    pub op: Option<MatrixSpec>,
    pub start: Option<VectorSpec>,
    pub corpus: Option<EvolutionCorpus>,
    #[serde(default)]
    pub method: LimitMethodSpec,
    #[serde(default)]
    pub force: bool,
    #[serde(default)]
    pub split: bool,
    pub compare_start: Option<VectorSpec>,
    /// Horizon of the Cesàro cross-check of the limit.
    pub cesaro_check: Option<usize>,
}

#[derive(Debug, Clone, Copy, Default, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LimitMethodSpec {
    #[default]
    Spectral,
    Cesaro,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum EvolutionCorpus {
    /// Unitary with a known fixed subspace; the start is Gaussian.
    UnitaryFixed { dim: usize, fixed: usize },
    /// Unimodular eigenvalues on `big` modes, moduli at most `w_max` elsewhere.
    SplitSpectrum { dim: usize, big: usize, w_max: f64 },
    /// Column-stochastic matrix started at a random distribution.
    Stochastic {
        dim: usize,
        #[serde(default)]
        sparsity: f64,
    },
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingPayload {
    pub op: Option<MatrixSpec>,
    pub start: Option<VectorSpec>,
    pub sampler: Option<MatrixSpec>,
    /// Number of sample values and averages to report.
    #[serde(default = "default_values")]
    pub values: usize,
    pub corpus: Option<SamplingCorpus>,
}

fn default_values() -> usize {
    8
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SamplingCorpus {
    pub count: usize,
    pub max_dim: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MarkovPayload {
    /// Column-stochastic transition matrix of a random walk.
    pub transition: Option<RealMatrixSpec>,
    /// Labels of the walk's states; turns the walk into a hidden chain.
    pub labeling: Option<Vec<String>>,
    pub op: Option<MatrixSpec>,
    pub start: Option<VectorSpec>,
    pub observable: Option<ObservableSpec>,
    pub indicator: Option<String>,
    #[serde(default = "yes")]
    pub limit: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableSpec {
    pub labels: Vec<String>,
    /// One row functional per label.
    pub functionals: MatrixSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessPayload {
    pub preset: Option<ProcessPreset>,
    pub alphabet: Option<Vec<String>>,
    pub ops: Option<Vec<RealMatrixSpec>>,
    pub init: Option<Vec<f64>>,
    pub eval: Option<Vec<f64>>,
    /// Compare against full path enumeration up to this time.
    pub enumerate_to: Option<usize>,
    pub corpus: Option<ProcessCorpus>,
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProcessPreset {
    FairCoin,
    Alternator,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProcessCorpus {
    pub count: usize,
    pub max_dim: usize,
    #[serde(default)]
    pub scramble: bool,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkPayload {
    pub d: Option<usize>,
    /// `channels[i][j]` carries mass from site `j` to site `i`.
    pub channels: Option<Vec<Vec<ChannelSpec>>>,
    pub state: Option<Vec<MatrixSpec>>,
    pub localized: Option<LocalizedSpec>,
    #[serde(default)]
    pub paths: Vec<Vec<usize>>,
    /// Sum path probabilities over all paths up to this length.
    pub enumerate_to: Option<usize>,
    pub corpus: Option<WalkCorpus>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ChannelSpec {
    Named(NamedChannel),
    Matrix {
        matrix: RealMatrixSpec,
    },
    Conjugation {
        unitary: MatrixSpec,
        #[serde(default = "one")]
        weight: f64,
    },
}

fn one() -> f64 {
    1.0
}

#[derive(Debug, Clone, Copy, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NamedChannel {
    Zero,
    Identity,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LocalizedSpec {
    pub site: usize,
    pub rho: MatrixSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WalkCorpus {
    pub sites: usize,
    pub d: usize,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SchrodingerPayload {
    pub unitary: MatrixSpec,
    pub wave: VectorSpec,
    #[serde(default)]
    pub normalize: bool,
    /// Orthonormal basis for Born probabilities; standard basis by default.
    pub basis: Option<Vec<VectorSpec>>,
    pub measurement: Option<MatrixSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct JointnessPayload {
    #[serde(default)]
    pub measurements: Vec<NamedMatrix>,
    pub density: Option<MatrixSpec>,
    pub wave: Option<VectorSpec>,
    pub pairs: Option<Vec<[usize; 2]>>,
    pub coupling: Option<CouplingSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: MatrixSpec,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CouplingSpec {
    pub alphabets: Vec<Vec<String>>,
    pub constraints: Vec<ConstraintSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConstraintSpec {
    pub vars: Vec<usize>,
    /// Probabilities as numbers or exact `"p/q"` strings.
    pub target: Vec<ProbSpec>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
pub enum ProbSpec {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmptyPayload {}
