use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::domains::Domain;

fn default_fiber() -> String {
    "y".into()
}

fn is_default_fiber(s: &str) -> bool {
    s == "y"
}

/// Declarative scenario as written in TOML.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub description: String,
    /// Base coordinates.
    pub variables: Vec<String>,
    /// Fiber coordinate appended for total spaces of lifts.
    #[serde(default = "default_fiber", skip_serializing_if = "is_default_fiber")]
    pub fiber: String,
    pub domain: Domain,
    #[serde(default)]
    pub samples: SampleSpec,
    #[serde(default)]
    pub output: OutputSpec,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub forms: BTreeMap<String, FormSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub maps: BTreeMap<String, MapSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub lifts: BTreeMap<String, LiftSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub loops: BTreeMap<String, LoopSpec>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub atlases: BTreeMap<String, AtlasSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleSpec {
    #[serde(default = "default_count")]
    pub count: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_tolerance")]
    pub tolerance: f64,
}

fn default_count() -> usize {
    200
}

fn default_tolerance() -> f64 {
    1e-9
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            count: default_count(),
            seed: 0,
            tolerance: default_tolerance(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Format {
    Text,
    #[default]
    Json,
    Csv,
}

impl std::str::FromStr for Format {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "text" => Ok(Format::Text),
            "json" => Ok(Format::Json),
            "csv" => Ok(Format::Csv),
            other => Err(format!("unknown format `{other}` (expected text, json or csv)")),
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    #[serde(default)]
    pub format: Format,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
}

/// A complex constant: a number, a `[re, im]` pair, or constant expression
/// text such as `"0.5 - 0.5i"` or `"exp(i*pi/3)"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexSpec {
    Real(f64),
    Pair([f64; 2]),
    Text(String),
}

impl Default for ComplexSpec {
    fn default() -> Self {
        ComplexSpec::Real(0.0)
    }
}

/// A real constant: a number or constant expression text such as `"3*pi/4"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RealSpec {
    Real(f64),
    Text(String),
}

/// Form text over the base variables, or over explicit variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum FormSpec {
    Text(String),
    Full {
        text: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variables: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        degree: Option<usize>,
    },
}

impl FormSpec {
    pub fn text(&self) -> &str {
        match self {
            FormSpec::Text(t) | FormSpec::Full { text: t, .. } => t,
        }
    }
}

/// Map components over the base variables (or explicit variables), or a
/// composition of named maps applied left to right.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MapSpec {
    Components(Vec<String>),
    Full {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        variables: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        components: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        compose: Option<Vec<String>>,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LiftSpec {
    pub omega: String,
    pub nu: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub twist: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
}

/// Counterclockwise circle in one coordinate around a base point (the
/// domain basepoint by default).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoopSpec {
    pub coordinate: String,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub center: Option<Vec<ComplexSpec>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SectorSpec {
    pub coordinate: String,
    pub center: RealSpec,
    pub half_width: RealSpec,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChartSpec {
    pub nu: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sector: Option<SectorSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransitionSpec {
    pub from: usize,
    pub to: usize,
    pub f: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AtlasSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    pub charts: Vec<ChartSpec>,
    pub transitions: Vec<TransitionSpec>,
}

/// Expected outcome of a check: `pass`, `fail` (any failure or error), or
/// the name of a specific error kind such as `NotScaleSymplectic`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub enum Expect {
    #[default]
    Pass,
    Fail,
    Error(String),
}

impl Expect {
    pub fn is_pass(&self) -> bool {
        *self == Expect::Pass
    }
}

impl fmt::Display for Expect {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expect::Pass => f.write_str("pass"),
            Expect::Fail => f.write_str("fail"),
            Expect::Error(k) => f.write_str(k),
        }
    }
}

impl Serialize for Expect {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Expect {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Ok(match s.as_str() {
            "pass" => Expect::Pass,
            "fail" => Expect::Fail,
            _ => Expect::Error(s),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckSpec {
    pub id: String,
    #[serde(default, skip_serializing_if = "Expect::is_pass")]
    pub expect: Expect,
    /// Overrides the scenario tolerance.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tolerance: Option<f64>,
    /// Sampling domain for base samples; defaults to the relevant lift base
    /// or the scenario domain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub domain: Option<Domain>,
    #[serde(flatten)]
    pub op: CheckOp,
}

fn is_zero_complex(c: &ComplexSpec) -> bool {
    *c == ComplexSpec::Real(0.0)
}

fn is_zero(k: &usize) -> bool {
    *k == 0
}

/// Operations a check can run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckOp {
    /// Closedness and nondegeneracy of a 2-form.
    SymplecticCheck { omega: String },
    /// `ξ ∧ (dξ)^N ≠ 0` for the contact form of a lift.
    ContactCheck { lift: String },
    /// Reeb field normalization and invariance at total-space samples.
    Reeb { lift: String },
    /// Legendrian residual of a holomorphic disc in the total space.
    Legendrian { lift: String, map: String },
    ValidateLift { lift: String },
    /// Lifts a base disc; optionally compares the fiber with an expression
    /// in `zeta`.
    LiftDisc {
        lift: String,
        map: String,
        #[serde(default, skip_serializing_if = "is_zero_complex")]
        y0: ComplexSpec,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        fiber: Option<String>,
    },
    /// Constant `λ` with `F^*target = λ ω`.
    ScaleFactor {
        map: String,
        omega: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        target: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<ComplexSpec>,
    },
    ThetaClass {
        lift: String,
        other: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        loops: Option<Vec<String>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        periods: Option<Vec<ComplexSpec>>,
    },
    AreEquivalent {
        lift: String,
        other: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        loops: Option<Vec<String>>,
        equivalent: bool,
    },
    Monodromy {
        lift: String,
        nu_ref: String,
        #[serde(rename = "loop")]
        loop_: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<ComplexSpec>,
    },
    IsFit {
        lift: String,
        nu_ref: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        loops: Option<Vec<String>>,
        fit: bool,
    },
    LiftAutomorphism {
        lift: String,
        map: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        loops: Option<Vec<String>>,
        lifts: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lambda: Option<ComplexSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        periods: Option<Vec<ComplexSpec>>,
    },
    /// Pulls a lift back along a map from the check domain.
    PullbackLift { map: String, lift: String },
    ValidateAtlas { atlas: String },
    /// `κ_V` against the base metric at seeded horizontal vectors.
    KappaV { lift: String, count: usize },
    /// Lower and upper distance bounds at seeded fiber-matched pairs.
    DistBounds { lift: String, count: usize },
    DistToFiber {
        lift: String,
        from: Vec<ComplexSpec>,
        to: Vec<ComplexSpec>,
    },
    ModelDist {
        from: Vec<ComplexSpec>,
        to: Vec<ComplexSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        value: Option<f64>,
    },
    /// Horizontal curves to the origin in the standard box from
    /// `point / 2^k`, `k = 0..=halvings`; lengths must strictly decrease
    /// and the last must stay below `below` when given.
    LocalConnect {
        radius: f64,
        point: Vec<ComplexSpec>,
        #[serde(default, skip_serializing_if = "is_zero")]
        halvings: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        below: Option<f64>,
    },
}

impl CheckOp {
    pub fn name(&self) -> &'static str {
        match self {
            CheckOp::SymplecticCheck { .. } => "symplectic_check",
            CheckOp::ContactCheck { .. } => "contact_check",
            CheckOp::Reeb { .. } => "reeb",
            CheckOp::Legendrian { .. } => "legendrian",
            CheckOp::ValidateLift { .. } => "validate_lift",
            CheckOp::LiftDisc { .. } => "lift_disc",
            CheckOp::ScaleFactor { .. } => "scale_factor",
            CheckOp::ThetaClass { .. } => "theta_class",
            CheckOp::AreEquivalent { .. } => "are_equivalent",
            CheckOp::Monodromy { .. } => "monodromy",
            CheckOp::IsFit { .. } => "is_fit",
            CheckOp::LiftAutomorphism { .. } => "lift_automorphism",
            CheckOp::PullbackLift { .. } => "pullback_lift",
            CheckOp::ValidateAtlas { .. } => "validate_atlas",
            CheckOp::KappaV { .. } => "kappa_v",
            CheckOp::DistBounds { .. } => "dist_bounds",
            CheckOp::DistToFiber { .. } => "dist_to_fiber",
            CheckOp::ModelDist { .. } => "model_dist",
            CheckOp::LocalConnect { .. } => "local_connect",
        }
    }
}
